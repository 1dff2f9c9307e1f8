//! A second, deliberately naive metric counter that works on raw tokens.
//!
//! It shares no code with the real parser. It only covers metrics that can be
//! read off a flat token stream; everything that needs scoping or type
//! knowledge (Cbo, Nosi, VariablesQty, cohesion) is left to the hand counts.
//! Binary `>>`/`>>>` are not recognised.

use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Word,
    Number,
    Str,
    Char,
    Punct,
}

#[derive(Debug, Clone)]
struct Tok {
    kind: Kind,
    text: String,
    line: usize,
    end_line: usize,
}

impl Tok {
    fn is(&self, s: &str) -> bool {
        matches!(self.kind, Kind::Word | Kind::Punct) && self.text == s
    }
}

const PUNCT: &[&str] = &[
    ">>>=", "<<=", ">>=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=",
    "%=", "&=", "|=", "^=", "<<",
];

const KEYWORDS: &[&str] = &[
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "continue", "default", "do",
    "double", "else", "enum", "extends", "final", "finally", "float", "for", "if", "implements", "import",
    "instanceof", "int", "interface", "long", "native", "new", "package", "private", "protected", "public", "return",
    "short", "static", "super", "switch", "synchronized", "this", "throw", "throws", "transient", "try", "void",
    "volatile", "while", "true", "false", "null", "yield", "record",
];

fn scan(src: &str) -> Vec<Tok> {
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut line = 1;
    let mut out = Vec::new();
    let at = |i: usize, s: &str| s.chars().enumerate().all(|(k, c)| chars.get(i + k) == Some(&c));
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if at(i, "//") {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if at(i, "/*") {
            i += 2;
            while !at(i, "*/") {
                if chars[i] == '\n' {
                    line += 1;
                }
                i += 1;
            }
            i += 2;
            continue;
        }
        let start = i;
        let start_line = line;
        let kind = if at(i, "\"\"\"") {
            i += 3;
            while !at(i, "\"\"\"") {
                if chars[i] == '\n' {
                    line += 1;
                }
                i += 1;
            }
            i += 3;
            Kind::Str
        } else if c == '"' || c == '\'' {
            i += 1;
            while chars[i] != c {
                if chars[i] == '\\' {
                    i += 1;
                }
                i += 1;
            }
            i += 1;
            if c == '"' {
                Kind::Str
            } else {
                Kind::Char
            }
        } else if c.is_ascii_digit() {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '.' || chars[i] == '_') {
                i += 1;
            }
            Kind::Number
        } else if c.is_alphabetic() || c == '_' || c == '$' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '$') {
                i += 1;
            }
            Kind::Word
        } else {
            let len = PUNCT.iter().find(|p| at(i, p)).map_or(1, |p| p.len());
            i += len;
            Kind::Punct
        };
        out.push(Tok { kind, text: chars[start..i].iter().collect(), line: start_line, end_line: line });
    }
    out
}

fn is_keyword(w: &str) -> bool {
    KEYWORDS.contains(&w)
}

fn matching(toks: &[Tok], open_idx: usize, open: &str, close: &str) -> usize {
    let mut depth = 0;
    for (i, t) in toks.iter().enumerate().skip(open_idx) {
        if t.is(open) {
            depth += 1;
        } else if t.is(close) {
            depth -= 1;
            if depth == 0 {
                return i;
            }
        }
    }
    panic!("unbalanced {open}");
}

/// Walks back from `i` over modifiers, annotations, type parameters and
/// the return type to the first token of a declaration.
fn declaration_start(toks: &[Tok], i: usize) -> usize {
    let mut j = i;
    while j > 0 && !(toks[j - 1].is(";") || toks[j - 1].is("{") || toks[j - 1].is("}")) {
        j -= 1;
    }
    // Skip leading annotations.
    loop {
        if toks[j].is("@") && !toks[j + 1].is("interface") {
            j += 2;
            while toks[j].is(".") {
                j += 2;
            }
            if toks[j].is("(") {
                j = matching(toks, j, "(", ")") + 1;
            }
        } else {
            return j;
        }
    }
}

fn compact_param_types(toks: &[Tok], open: usize, close: usize) -> Vec<String> {
    let mut params = Vec::new();
    let mut current: Vec<&Tok> = Vec::new();
    let mut depth = 0;
    for t in &toks[open + 1..close] {
        if t.is("<") {
            depth += 1;
        } else if t.is(">") {
            depth -= 1;
        }
        if t.is(",") && depth == 0 {
            params.push(std::mem::take(&mut current));
        } else {
            current.push(t);
        }
    }
    if !current.is_empty() {
        params.push(current);
    }
    params
        .into_iter()
        .map(|p| {
            let mut p: Vec<&Tok> = p.into_iter().filter(|t| !t.is("final")).collect();
            while p.first().is_some_and(|t| t.is("@")) {
                p.drain(..2);
            }
            p.pop(); // parameter name
            p.iter().map(|t| t.text.as_str()).collect()
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
struct Span {
    decl_start: usize,
    open: usize,
    close: usize,
    params: usize,
}

fn find_method(toks: &[Tok], signature: &str) -> Option<Span> {
    let (name, rest) = signature.split_once('(')?;
    let want: Vec<&str> = rest.strip_suffix(')')?.split(',').filter(|s| !s.is_empty()).collect();
    for i in 1..toks.len() - 1 {
        if toks[i].text != name || toks[i].kind != Kind::Word {
            continue;
        }
        let prev = &toks[i - 1];
        let after_type = (prev.kind == Kind::Word
            && !matches!(
                prev.text.as_str(),
                "new" | "return" | "throw" | "class" | "interface" | "enum" | "record"
            ))
            || prev.is(">")
            || prev.is("]");
        // Constructors follow a statement boundary, as do plain calls.
        let after_boundary = prev.is("{") || prev.is("}") || prev.is(";");
        if !after_type && !after_boundary {
            continue;
        }
        if toks[i + 1].is("{") && want.is_empty() {
            // Compact record constructor.
            let close = matching(toks, i + 1, "{", "}");
            return Some(Span { decl_start: declaration_start(toks, i), open: i + 1, close, params: 0 });
        }
        if !toks[i + 1].is("(") {
            continue;
        }
        let pclose = matching(toks, i + 1, "(", ")");
        if after_boundary && !(toks[pclose + 1].is("{") || toks[pclose + 1].is("throws")) {
            continue;
        }
        let types = compact_param_types(toks, i + 1, pclose);
        if types != want {
            continue;
        }
        let mut j = pclose + 1;
        while !(toks[j].is("{") || toks[j].is(";")) {
            j += 1;
        }
        let decl_start = declaration_start(toks, i);
        if toks[j].is(";") {
            return Some(Span { decl_start, open: j, close: j, params: types.len() });
        }
        let close = matching(toks, j, "{", "}");
        return Some(Span { decl_start, open: j, close, params: types.len() });
    }
    None
}

fn find_class(toks: &[Tok], simple_name: &str) -> Option<(usize, usize, usize)> {
    for i in 0..toks.len() - 1 {
        let kw = ["class", "interface", "enum", "record"].iter().any(|k| toks[i].is(k));
        if kw && toks[i + 1].text == simple_name {
            let mut open = i + 2;
            while !toks[open].is("{") {
                open += 1;
            }
            let close = matching(toks, open, "{", "}");
            return Some((declaration_start(toks, i), open, close));
        }
    }
    None
}

fn operand_end(t: &Tok) -> bool {
    match t.kind {
        Kind::Number | Kind::Str | Kind::Char => true,
        Kind::Word => !is_keyword(&t.text) || matches!(t.text.as_str(), "this" | "true" | "false" | "null"),
        Kind::Punct => t.is(")") || t.is("]") || t.is("++") || t.is("--"),
    }
}

/// Counts over the token range `[a, b]` (a body, braces included).
fn body_counts(toks: &[Tok], a: usize, b: usize) -> BTreeMap<&'static str, f64> {
    let body = &toks[a..=b];
    let count = |s: &str| body.iter().filter(|t| t.is(s)).count() as f64;
    let mut m = BTreeMap::new();
    m.insert("ReturnQty", count("return"));
    m.insert("StringLiteralsQty", body.iter().filter(|t| t.kind == Kind::Str).count() as f64);
    m.insert("NumbersQty", body.iter().filter(|t| t.kind == Kind::Number).count() as f64);
    m.insert("ComparisonsQty", count("==") + count("!="));
    m.insert("LoopQty", count("for") + count("while"));
    m.insert("TryCatchQty", count("try") + count("catch"));

    let wildcard = |k: usize| {
        let next = &toks[k + 1];
        next.is(">") || next.is(",") || next.is("extends") || next.is("super")
    };
    let ternaries = (a..=b).filter(|&k| toks[k].is("?") && !wildcard(k)).count() as f64;
    let cc = count("if") + count("for") + count("while") + count("case") + count("catch") + count("&&") + count("||");
    m.insert("Wmc", 1.0 + cc + ternaries);

    // Lambdas: `->` outside switch labels.
    let mut lambdas = 0;
    let mut in_label = false;
    for t in body {
        if t.is("case") || t.is("default") {
            in_label = true;
        } else if t.is(";") || t.is("{") || t.is("}") || t.is(":") {
            in_label = false;
        } else if t.is("->") {
            if in_label {
                in_label = false;
            } else {
                lambdas += 1;
            }
        }
    }
    m.insert("LambdasQty", lambdas as f64);

    // Calls: identifier + `(` not preceded by a type-like token or `new`.
    let mut callees = BTreeSet::new();
    for k in a.max(1)..b {
        let t = &toks[k];
        if t.kind != Kind::Word || is_keyword(&t.text) || !toks[k + 1].is("(") {
            continue;
        }
        let prev = &toks[k - 1];
        let declaration = (prev.kind == Kind::Word
            && !matches!(prev.text.as_str(), "return" | "throw" | "else" | "case" | "yield" | "assert"))
            || prev.is(">")
            || prev.is("]");
        if !declaration {
            callees.insert(t.text.clone());
        }
    }
    m.insert("Rfc", callees.len() as f64);

    let mut anonymous = 0;
    for k in a..b {
        if toks[k].is("new") {
            let mut j = k + 1;
            while !(toks[j].is("(") || toks[j].is("[")) {
                j += 1;
            }
            if toks[j].is("(") && toks[matching(toks, j, "(", ")") + 1].is("{") {
                anonymous += 1;
            }
        }
    }
    m.insert("AnonymousClassesQty", anonymous as f64);
    m.insert(
        "SubClassesQty",
        (a + 1..b).filter(|&k| toks[k].is("class") && !toks[k - 1].is(".")).count() as f64,
    );

    // Code-block depth below the body's own braces; array initializers skipped.
    let (mut depth, mut max, mut stack) = (0usize, 0usize, Vec::new());
    for k in a + 1..b {
        if toks[k].is("{") {
            let prev = &toks[k - 1];
            let array = prev.is("=") || prev.is("]") || (stack.last() == Some(&false) && (prev.is(",") || prev.is("{")));
            stack.push(!array);
            if !array {
                depth += 1;
                max = max.max(depth);
            }
        } else if toks[k].is("}") && stack.pop() == Some(true) {
            depth -= 1;
        }
    }
    m.insert("MaxNestedBlocks", max as f64);

    let mut assignments = 0;
    for k in a..=b {
        let t = &toks[k];
        if t.kind != Kind::Punct {
            continue;
        }
        if t.text == "=" {
            let p1 = &toks[k - 1];
            let p2 = &toks[k - 2];
            let declaration = p1.kind == Kind::Word
                && ((p2.kind == Kind::Word && !matches!(p2.text.as_str(), "return" | "else")) || p2.is(">") || p2.is("]"));
            if !declaration {
                assignments += 1;
            }
        } else if t.text.len() >= 2 && t.text.ends_with('=') && !["==", "!=", "<=", ">="].contains(&t.text.as_str()) {
            assignments += 1;
        }
    }
    m.insert("AssignmentsQty", assignments as f64);

    let mut math = 0;
    for k in a..=b {
        let t = &toks[k];
        if ["*", "/", "%", "<<"].iter().any(|s| t.is(s)) {
            math += 1;
        } else if (t.is("+") || t.is("-")) && operand_end(&toks[k - 1]) {
            math += 1;
        }
    }
    m.insert("MathOperationsQty", math as f64);

    let words: BTreeSet<&str> = toks[a + 1..b]
        .iter()
        .filter(|t| matches!(t.kind, Kind::Word | Kind::Number))
        .map(|t| t.text.as_str())
        .collect();
    m.insert("UniqueWordsQty", words.len() as f64);
    m
}

fn lines(toks: &[Tok], a: usize, b: usize) -> f64 {
    let set: BTreeSet<usize> = toks[a..=b].iter().flat_map(|t| t.line..=t.end_line).collect();
    set.len() as f64
}

/// Oracle values for one method, keyed by metric name.
pub fn method_oracle(source: &str, signature: &str) -> Option<BTreeMap<&'static str, f64>> {
    let toks = scan(source);
    let span = find_method(&toks, signature)?;
    let mut m = if span.open == span.close {
        // Bodiless: only the declaration.
        let mut m = BTreeMap::new();
        for k in METHOD_ORACLE_METRICS {
            m.insert(*k, 0.0);
        }
        m.insert("Wmc", 1.0);
        m
    } else {
        body_counts(&toks, span.open, span.close)
    };
    m.insert("Loc", lines(&toks, span.decl_start, span.close));
    m.insert("ParametersQty", span.params as f64);
    Some(m)
}

/// Oracle values for a top-level type without member types. The class-level
/// `Wmc` is not included (initializer code would be miscounted).
pub fn class_oracle(source: &str, simple_name: &str) -> Option<BTreeMap<&'static str, f64>> {
    let toks = scan(source);
    let (start, open, close) = find_class(&toks, simple_name)?;
    let mut m = body_counts(&toks, open, close);
    m.remove("Wmc");
    m.remove("Rfc");
    m.remove("SubClassesQty");
    m.remove("MaxNestedBlocks");
    m.insert("Loc", lines(&toks, start, close));
    Some(m)
}

pub const METHOD_ORACLE_METRICS: &[&str] = &[
    "AnonymousClassesQty",
    "AssignmentsQty",
    "ComparisonsQty",
    "LambdasQty",
    "Loc",
    "LoopQty",
    "MathOperationsQty",
    "MaxNestedBlocks",
    "NumbersQty",
    "ParametersQty",
    "ReturnQty",
    "Rfc",
    "StringLiteralsQty",
    "SubClassesQty",
    "TryCatchQty",
    "UniqueWordsQty",
    "Wmc",
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_a_small_method() {
        let src = "class A {\n  int f(int a, String b) {\n    if (a == 1 && b != null) { return g(a); }\n    return a > 0 ? 1 : 2;\n  }\n}\n";
        let m = method_oracle(src, "f(int,String)").unwrap();
        assert_eq!(m["Loc"], 4.0);
        assert_eq!(m["ReturnQty"], 2.0);
        assert_eq!(m["ComparisonsQty"], 2.0);
        assert_eq!(m["Wmc"], 4.0);
        assert_eq!(m["Rfc"], 1.0);
        assert_eq!(m["ParametersQty"], 2.0);
        assert_eq!(m["MaxNestedBlocks"], 1.0);
    }
}
