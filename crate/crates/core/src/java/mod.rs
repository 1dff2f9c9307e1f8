//! Java source model: tokenizer, parser and canonical statement text.

pub mod canonical;
pub mod lexer;
pub mod model;
mod parser;

pub use canonical::{canonicalize, canonicalize_statement};
pub use model::*;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("invalid UTF-8 at byte {offset}")]
    Encoding { offset: usize },
}

/// Parses one compilation unit. Deterministic: the same text always yields
/// the same model.
pub fn parse_compilation_unit(source: &str, path: &str) -> Result<CodeModel, ParseError> {
    let tokens = lexer::tokenize(source)?;
    let mut parser = parser::Parser::new(source, &tokens);
    let (package, classes) = parser.parse_unit()?;
    Ok(CodeModel { path: path.to_string(), package, classes })
}

pub fn parse_compilation_unit_bytes(bytes: &[u8], path: &str) -> Result<CodeModel, ParseError> {
    let source = std::str::from_utf8(bytes).map_err(|e| ParseError::Encoding { offset: e.valid_up_to() })?;
    parse_compilation_unit(source, path)
}
