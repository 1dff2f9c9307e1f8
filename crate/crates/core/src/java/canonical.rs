//! Layout-insensitive statement text.
//!
//! Two statements that differ only in whitespace or comments map to the same
//! string. Tokens are re-joined with single spaces except around a small set
//! of punctuation, so `return  a + b ;` becomes `return a + b;`.

use super::lexer::{self, Token, TokenKind};
use super::model::Statement;

pub fn canonicalize_statement(statement: &Statement) -> String {
    canonicalize(&statement.canonical_text)
}

/// Canonical form of arbitrary source text. Text that does not tokenize is
/// only whitespace-collapsed.
pub fn canonicalize(text: &str) -> String {
    match lexer::tokenize(text) {
        Ok(tokens) => join_tokens(&tokens),
        Err(_) => text.split_whitespace().collect::<Vec<_>>().join(" "),
    }
}

pub(crate) fn join_tokens(tokens: &[Token]) -> String {
    let mut out = String::new();
    for (i, tok) in tokens.iter().enumerate() {
        if i > 0 && needs_space(&tokens[i - 1], tok) {
            out.push(' ');
        }
        out.push_str(&tok.text);
    }
    out
}

fn needs_space(left: &Token, right: &Token) -> bool {
    let is_op = |t: &Token, set: &[&str]| t.kind == TokenKind::Op && set.contains(&t.text.as_str());
    if is_op(right, &[";", ",", ")", "]", "::"]) {
        return false;
    }
    if is_op(right, &["."]) {
        return left.kind == TokenKind::Number || is_op(left, &["."]);
    }
    if is_op(left, &["(", "[", "::", "@"]) {
        return false;
    }
    if is_op(left, &["."]) {
        return right.kind == TokenKind::Number;
    }
    if is_op(right, &["(", "["]) {
        let callish = (left.kind == TokenKind::Ident && !is_control_keyword(&left.text))
            || is_op(left, &[")", "]", ">"]);
        return !callish;
    }
    // Keep `> >` apart so that closing generics never re-lex as a shift.
    true
}

fn is_control_keyword(word: &str) -> bool {
    matches!(
        word,
        "if" | "for" | "while" | "switch" | "catch" | "synchronized" | "try" | "return" | "throw"
            | "case" | "assert" | "yield" | "else" | "do"
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn layout_and_comments_do_not_matter() {
        assert_eq!(canonicalize("x = 1;"), canonicalize("x   =  1 ; // init"));
        assert_eq!(canonicalize("x = 1;"), canonicalize("x=1;"));
        assert_eq!(canonicalize("foo( a,b ) ;"), "foo(a, b);");
    }

    #[test]
    fn identifiers_matter() {
        assert_ne!(canonicalize("x = 1;"), canonicalize("y = 1;"));
    }

    #[test]
    fn normalization_rule() {
        assert_eq!(canonicalize("return  a + b ;"), "return a + b;");
        assert_eq!(canonicalize("if(a.b[0] >= c)"), "if (a.b[0] >= c)");
        assert_eq!(canonicalize("List<List<String>> xs = new ArrayList<>();"), "List < List < String > > xs = new ArrayList < >();");
    }

    proptest! {
        #[test]
        fn idempotent(parts in proptest::collection::vec(
            prop_oneof![
                Just("x"), Just("y1"), Just("1"), Just("2.5"), Just("\"s t\""), Just("'c'"),
                Just("("), Just(")"), Just("["), Just("]"), Just("."), Just(";"), Just(","),
                Just("+"), Just("-"), Just("="), Just("=="), Just(">"), Just(">="), Just("<"),
                Just("->"), Just("::"), Just("if"), Just("return"), Just("{"), Just("}"),
                Just(" "), Just("\n"), Just("/* c */"), Just("@"),
            ],
            0..40,
        )) {
            let text = parts.concat();
            let once = canonicalize(&text);
            prop_assert_eq!(canonicalize(&once), once.clone());
        }
    }
}
