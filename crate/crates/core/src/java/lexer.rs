//! Tokenizer for the supported Java subset.
//!
//! Comments are dropped here so that nothing downstream ever sees them.
//! String, character and text-block literals are scanned as single tokens,
//! which keeps braces inside literals away from the parser.
//!
//! `>` is always emitted on its own (or as `>=`) so that nested generic
//! arguments such as `List<List<T>>` close cleanly; the expression parser
//! re-joins adjacent `>` tokens into shift operators.

use super::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    /// Identifiers and keywords alike; see [`is_keyword`].
    Ident,
    Number,
    Str,
    Char,
    Op,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// 1-based line of the first character.
    pub line: usize,
    /// 1-based column (in chars) of the first character.
    pub col: usize,
    /// Line of the last character; differs from `line` only for text blocks.
    pub end_line: usize,
    pub start: usize,
    pub end: usize,
}

impl Token {
    pub fn is(&self, text: &str) -> bool {
        self.text == text && self.kind != TokenKind::Str && self.kind != TokenKind::Char
    }

    pub fn is_ident(&self) -> bool {
        self.kind == TokenKind::Ident && !is_keyword(&self.text)
    }

    /// Alphanumeric token in the unique-words sense: identifiers, keywords and
    /// number literals.
    pub fn is_word(&self) -> bool {
        matches!(self.kind, TokenKind::Ident | TokenKind::Number)
    }
}

const KEYWORDS: &[&str] = &[
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally", "float",
    "for", "goto", "if", "implements", "import", "instanceof", "int", "interface", "long", "native",
    "new", "package", "private", "protected", "public", "return", "short", "static", "strictfp",
    "super", "switch", "synchronized", "this", "throw", "throws", "transient", "try", "void",
    "volatile", "while", "true", "false", "null",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

pub const PRIMITIVES: &[&str] = &[
    "boolean", "byte", "char", "short", "int", "long", "float", "double", "void",
];

pub fn is_primitive(word: &str) -> bool {
    PRIMITIVES.contains(&word)
}

// Longest first.
const OPERATORS: &[&str] = &[
    "<<=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "*=",
    "/=", "%=", "&=", "|=", "^=", "<<", "(", ")", "{", "}", "[", "]", ";", ",", ".", "@", "=",
    ">", "<", "!", "~", "?", ":", "+", "-", "*", "/", "&", "|", "^", "%",
];

struct Cursor<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    idx: usize,
    line: usize,
    col: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.idx + ahead).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.idx).map_or(self.src.len(), |&(o, _)| o)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek(0)?;
        self.idx += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.offset()..].starts_with(s)
    }

    fn error(&self, line: usize, col: usize, message: &str) -> ParseError {
        ParseError::Syntax { line, col, message: message.to_string() }
    }
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut cur = Cursor { src, chars: src.char_indices().collect(), idx: 0, line: 1, col: 1 };
    let mut tokens = Vec::new();

    while let Some(c) = cur.peek(0) {
        if c.is_whitespace() || c == '\u{feff}' {
            cur.bump();
            continue;
        }
        let (line, col, start) = (cur.line, cur.col, cur.offset());

        if cur.starts_with("//") {
            while let Some(c) = cur.peek(0) {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            continue;
        }
        if cur.starts_with("/*") {
            cur.bump();
            cur.bump();
            loop {
                if cur.starts_with("*/") {
                    cur.bump();
                    cur.bump();
                    break;
                }
                if cur.bump().is_none() {
                    return Err(cur.error(line, col, "unterminated block comment"));
                }
            }
            continue;
        }

        let kind = if cur.starts_with("\"\"\"") {
            for _ in 0..3 {
                cur.bump();
            }
            loop {
                if cur.starts_with("\\") {
                    cur.bump();
                    cur.bump();
                    continue;
                }
                if cur.starts_with("\"\"\"") {
                    for _ in 0..3 {
                        cur.bump();
                    }
                    break;
                }
                if cur.bump().is_none() {
                    return Err(cur.error(line, col, "unterminated text block"));
                }
            }
            TokenKind::Str
        } else if c == '"' || c == '\'' {
            cur.bump();
            loop {
                match cur.bump() {
                    Some('\\') => {
                        cur.bump();
                    }
                    Some(q) if q == c => break,
                    Some('\n') | None => {
                        return Err(cur.error(line, col, "unterminated literal"));
                    }
                    Some(_) => {}
                }
            }
            if c == '"' {
                TokenKind::Str
            } else {
                TokenKind::Char
            }
        } else if c.is_ascii_digit() || (c == '.' && cur.peek(1).is_some_and(|d| d.is_ascii_digit())) {
            scan_number(&mut cur);
            TokenKind::Number
        } else if c.is_alphabetic() || c == '_' || c == '$' {
            while let Some(c) = cur.peek(0) {
                if c.is_alphanumeric() || c == '_' || c == '$' {
                    cur.bump();
                } else {
                    break;
                }
            }
            TokenKind::Ident
        } else {
            let op = if cur.starts_with(">=") {
                Some(">=")
            } else if c == '>' {
                Some(">")
            } else {
                OPERATORS.iter().copied().find(|op| cur.starts_with(op))
            };
            let Some(op) = op else {
                return Err(cur.error(line, col, &format!("unexpected character {c:?}")));
            };
            for _ in 0..op.chars().count() {
                cur.bump();
            }
            TokenKind::Op
        };

        let end = cur.offset();
        tokens.push(Token {
            kind,
            text: src[start..end].to_string(),
            line,
            col,
            end_line: cur.line - usize::from(src[start..end].ends_with('\n')),
            start,
            end,
        });
    }
    Ok(tokens)
}

fn scan_number(cur: &mut Cursor<'_>) {
    let hex = cur.starts_with("0x") || cur.starts_with("0X");
    let mut prev = '\0';
    let mut seen_dot = false;
    while let Some(c) = cur.peek(0) {
        let exponent_sign = (c == '+' || c == '-')
            && if hex { matches!(prev, 'p' | 'P') } else { matches!(prev, 'e' | 'E') };
        // `1.5`, `1.`, `1.e3` and `1.f` are numbers; `a[1].equals` is not.
        let dot = c == '.'
            && !seen_dot
            && !hex
            && match (cur.peek(1), cur.peek(2)) {
                (Some(n), _) if n.is_ascii_digit() => true,
                (Some(n), after) if matches!(n, 'e' | 'E' | 'f' | 'F' | 'd' | 'D') => {
                    after.map_or(true, |a| !a.is_alphabetic() && a != '_')
                }
                (Some(n), _) => !n.is_alphabetic() && n != '_' && n != '.',
                (None, _) => true,
            };
        if c.is_ascii_alphanumeric() || c == '_' || exponent_sign || dot {
            seen_dot |= c == '.';
            prev = c;
            cur.bump();
        } else {
            break;
        }
    }
}
