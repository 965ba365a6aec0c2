//! The `.ustpa` model text format: tokenizer, recovering parser, and
//! canonical renderer.
//!
//! The format is line-oriented in practice but whitespace-insensitive between
//! tokens. One statement per declaration, `#` starts a comment running to end
//! of line, strings are double-quoted with `\"` and `\\` escapes, and id
//! lists are bracketed and whitespace-separated (`[L1 L2]`).
//!
//! Parsing never panics and never stops at the first problem: errors are
//! collected with source spans and recovery resumes at the next statement
//! keyword, so a single run reports every malformed statement in the file.
//! [`render_canonical`] is the inverse direction; for any valid model, text
//! produced by it parses back to an equal model.

mod lexer;
mod parser;
mod render;

pub use lexer::{tokenize, Keyword, Token, TokenKind};
pub use parser::parse_document;
pub use render::render_canonical;

use crate::model::Declaration;
use std::fmt;

/// A half-open source region: 1-based line and column, length in characters.
///
/// Every diagnostic span lies within its input text; for errors at end of
/// input the span covers the last character (or `1:1` of an empty file).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: u32,
    pub column: u32,
    pub length: u32,
}

impl SourceSpan {
    pub(crate) fn new(line: u32, column: u32, length: u32) -> Self {
        SourceSpan { line, column, length: length.max(1) }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Errors reject the document; warnings are advisory only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

/// One lexer or parser finding, anchored to a source span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: SourceSpan,
}

impl ParseDiagnostic {
    pub(crate) fn error(message: impl Into<String>, span: SourceSpan) -> Self {
        ParseDiagnostic { severity: Severity::Error, message: message.into(), span }
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} at {}", self.severity, self.message, self.span)
    }
}

/// The result of parsing one model text: whatever declarations could be
/// recovered, plus every diagnostic encountered on the way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelDocument {
    /// Successfully parsed declarations, in source order (header first).
    pub declarations: Vec<Declaration>,
    /// All findings, ordered by source position.
    pub diagnostics: Vec<ParseDiagnostic>,
}

impl ModelDocument {
    /// True when any diagnostic is an [`Severity::Error`]; such a document
    /// must not be accepted.
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.severity == Severity::Error)
    }

    /// The error-severity subset of [`Self::diagnostics`].
    pub fn errors(&self) -> impl Iterator<Item = &ParseDiagnostic> {
        self.diagnostics.iter().filter(|d| d.severity == Severity::Error)
    }
}
