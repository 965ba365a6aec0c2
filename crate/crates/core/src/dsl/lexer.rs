//! Tokenizer for the model DSL.
//!
//! Produces a flat token stream; bracketed id lists are lexed as one
//! composite token (the grammar allows nothing else between brackets, and it
//! keeps the parser's attribute handling uniform). Lexing recovers from
//! every error — an illegal character or unterminated string is recorded and
//! scanning continues — so one pass collects all lexical problems.

use super::{ParseDiagnostic, SourceSpan};

/// Reserved words. Stage tags (`IG`..`DT`) and failure-mode names are *not*
/// keywords; they lex as identifiers and are checked by the parser, which
/// can then name the legal values in its error messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    Model,
    Loss,
    Hazard,
    Node,
    Edge,
    Action,
    Uca,
    Scenario,
    Requirement,
    Critical,
    Losses,
    Stage,
    Kind,
    Controller,
    Mode,
    Hazards,
    Scenarios,
    Control,
    Feedback,
    Technical,
    Human,
    True,
    False,
}

impl Keyword {
    pub(crate) fn lookup(word: &str) -> Option<Keyword> {
        Some(match word {
            "model" => Keyword::Model,
            "loss" => Keyword::Loss,
            "hazard" => Keyword::Hazard,
            "node" => Keyword::Node,
            "edge" => Keyword::Edge,
            "action" => Keyword::Action,
            "uca" => Keyword::Uca,
            "scenario" => Keyword::Scenario,
            "requirement" => Keyword::Requirement,
            "critical" => Keyword::Critical,
            "losses" => Keyword::Losses,
            "stage" => Keyword::Stage,
            "kind" => Keyword::Kind,
            "controller" => Keyword::Controller,
            "mode" => Keyword::Mode,
            "hazards" => Keyword::Hazards,
            "scenarios" => Keyword::Scenarios,
            "control" => Keyword::Control,
            "feedback" => Keyword::Feedback,
            "technical" => Keyword::Technical,
            "human" => Keyword::Human,
            "true" => Keyword::True,
            "false" => Keyword::False,
            _ => return None,
        })
    }

    pub fn text(self) -> &'static str {
        match self {
            Keyword::Model => "model",
            Keyword::Loss => "loss",
            Keyword::Hazard => "hazard",
            Keyword::Node => "node",
            Keyword::Edge => "edge",
            Keyword::Action => "action",
            Keyword::Uca => "uca",
            Keyword::Scenario => "scenario",
            Keyword::Requirement => "requirement",
            Keyword::Critical => "critical",
            Keyword::Losses => "losses",
            Keyword::Stage => "stage",
            Keyword::Kind => "kind",
            Keyword::Controller => "controller",
            Keyword::Mode => "mode",
            Keyword::Hazards => "hazards",
            Keyword::Scenarios => "scenarios",
            Keyword::Control => "control",
            Keyword::Feedback => "feedback",
            Keyword::Technical => "technical",
            Keyword::Human => "human",
            Keyword::True => "true",
            Keyword::False => "false",
        }
    }

    /// Keywords that begin a statement; error recovery skips to the next one.
    pub(crate) fn starts_statement(self) -> bool {
        matches!(
            self,
            Keyword::Model
                | Keyword::Loss
                | Keyword::Hazard
                | Keyword::Node
                | Keyword::Edge
                | Keyword::Action
                | Keyword::Uca
                | Keyword::Scenario
                | Keyword::Requirement
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Keyword(Keyword),
    /// A bare word that is not a keyword: ids, stage tags, mode names.
    Ident(String),
    /// A quoted string, with escapes already decoded.
    Str(String),
    /// A bracketed id list, lexed as one token: `[L1 L2]`.
    IdList(Vec<(String, SourceSpan)>),
    Eq,
    Arrow,
}

impl TokenKind {
    /// Short description for "expected X, found Y" messages.
    pub(crate) fn describe(&self) -> String {
        match self {
            TokenKind::Keyword(k) => format!("`{}`", k.text()),
            TokenKind::Ident(text) => format!("identifier `{text}`"),
            TokenKind::Str(_) => "string".to_string(),
            TokenKind::IdList(_) => "id list".to_string(),
            TokenKind::Eq => "`=`".to_string(),
            TokenKind::Arrow => "`->`".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

/// Character cursor with 1-based line/column bookkeeping.
struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    column: u32,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor { chars: text.chars().peekable(), line: 1, column: 1 }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn here(&self) -> (u32, u32) {
        (self.line, self.column)
    }
}

/// Lexes the whole input, returning every token that could be formed and
/// every problem found. Used by the parser, which wants both.
pub(crate) fn lex(text: &str) -> (Vec<Token>, Vec<ParseDiagnostic>) {
    let mut cursor = Cursor::new(text);
    let mut tokens = Vec::new();
    let mut diagnostics = Vec::new();

    while let Some(c) = cursor.peek() {
        let (line, column) = cursor.here();
        match c {
            ' ' | '\t' | '\n' => {
                cursor.bump();
            }
            '\r' => {
                // Accept CRLF line endings; a bare CR is an error.
                cursor.bump();
                if cursor.peek() != Some('\n') {
                    diagnostics.push(ParseDiagnostic::error(
                        "stray carriage return (expected CRLF or LF line ending)",
                        SourceSpan::new(line, column, 1),
                    ));
                }
            }
            '#' => {
                while let Some(c) = cursor.peek() {
                    if c == '\n' {
                        break;
                    }
                    cursor.bump();
                }
            }
            '"' => lex_string(&mut cursor, &mut tokens, &mut diagnostics),
            '[' => lex_id_list(&mut cursor, &mut tokens, &mut diagnostics),
            '=' => {
                cursor.bump();
                tokens.push(Token { kind: TokenKind::Eq, span: SourceSpan::new(line, column, 1) });
            }
            '-' => {
                cursor.bump();
                if cursor.peek() == Some('>') {
                    cursor.bump();
                    tokens.push(Token {
                        kind: TokenKind::Arrow,
                        span: SourceSpan::new(line, column, 2),
                    });
                } else {
                    diagnostics.push(ParseDiagnostic::error(
                        "stray `-` (identifiers must start with a letter; did you mean `->`?)",
                        SourceSpan::new(line, column, 1),
                    ));
                }
            }
            c if c.is_ascii_alphabetic() => lex_word(&mut cursor, &mut tokens),
            other => {
                cursor.bump();
                diagnostics.push(ParseDiagnostic::error(
                    format!("illegal character `{}`", other.escape_default()),
                    SourceSpan::new(line, column, 1),
                ));
            }
        }
    }

    (tokens, diagnostics)
}

/// Lexes the input and returns the token stream, or every lexical error if
/// there is at least one. A comment-only or empty input yields no tokens.
pub fn tokenize(text: &str) -> Result<Vec<Token>, Vec<ParseDiagnostic>> {
    let (tokens, diagnostics) = lex(text);
    if diagnostics.is_empty() {
        Ok(tokens)
    } else {
        Err(diagnostics)
    }
}

fn lex_word(cursor: &mut Cursor, tokens: &mut Vec<Token>) {
    let (line, column) = cursor.here();
    let mut word = String::new();
    while let Some(c) = cursor.peek() {
        let continues = c.is_ascii_alphanumeric() || matches!(c, '_' | '.')
            // `-` continues an identifier unless it opens an arrow.
            || (c == '-' && {
                let mut ahead = cursor.chars.clone();
                ahead.next();
                ahead.peek() != Some(&'>')
            });
        if !continues {
            break;
        }
        word.push(c);
        cursor.bump();
    }
    let length = word.chars().count() as u32;
    let kind = match Keyword::lookup(&word) {
        Some(keyword) => TokenKind::Keyword(keyword),
        None => TokenKind::Ident(word),
    };
    tokens.push(Token { kind, span: SourceSpan::new(line, column, length) });
}

fn lex_string(cursor: &mut Cursor, tokens: &mut Vec<Token>, diagnostics: &mut Vec<ParseDiagnostic>) {
    let (line, column) = cursor.here();
    cursor.bump(); // opening quote
    let mut value = String::new();
    let mut length: u32 = 1;
    loop {
        match cursor.peek() {
            None | Some('\n') => {
                // Strings are single-line; report at the opening quote.
                diagnostics.push(ParseDiagnostic::error(
                    "unterminated string literal",
                    SourceSpan::new(line, column, length),
                ));
                return;
            }
            Some('"') => {
                cursor.bump();
                length += 1;
                tokens.push(Token {
                    kind: TokenKind::Str(value),
                    span: SourceSpan::new(line, column, length),
                });
                return;
            }
            Some('\\') => {
                let (esc_line, esc_column) = cursor.here();
                cursor.bump();
                length += 1;
                match cursor.peek() {
                    Some('"') => {
                        value.push('"');
                        cursor.bump();
                        length += 1;
                    }
                    Some('\\') => {
                        value.push('\\');
                        cursor.bump();
                        length += 1;
                    }
                    Some(other) if other != '\n' => {
                        diagnostics.push(ParseDiagnostic::error(
                            format!("unknown escape `\\{other}` (only \\\" and \\\\ exist)"),
                            SourceSpan::new(esc_line, esc_column, 2),
                        ));
                        value.push(other);
                        cursor.bump();
                        length += 1;
                    }
                    _ => {
                        // Backslash at end of line: fall through to the
                        // unterminated-string report on the next iteration.
                    }
                }
            }
            Some(other) => {
                value.push(other);
                cursor.bump();
                length += 1;
            }
        }
    }
}

fn lex_id_list(
    cursor: &mut Cursor,
    tokens: &mut Vec<Token>,
    diagnostics: &mut Vec<ParseDiagnostic>,
) {
    let (line, column) = cursor.here();
    cursor.bump(); // `[`
    let mut items: Vec<(String, SourceSpan)> = Vec::new();
    loop {
        match cursor.peek() {
            None => {
                diagnostics.push(ParseDiagnostic::error(
                    "unterminated id list",
                    SourceSpan::new(line, column, 1),
                ));
                break;
            }
            Some(']') => {
                cursor.bump();
                break;
            }
            Some(c) if c == ' ' || c == '\t' || c == '\n' || c == '\r' => {
                cursor.bump();
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let (id_line, id_column) = cursor.here();
                let mut id = String::new();
                while let Some(c) = cursor.peek() {
                    if c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-') {
                        id.push(c);
                        cursor.bump();
                    } else {
                        break;
                    }
                }
                let span = SourceSpan::new(id_line, id_column, id.chars().count() as u32);
                items.push((id, span));
            }
            Some(other) => {
                let (bad_line, bad_column) = cursor.here();
                cursor.bump();
                diagnostics.push(ParseDiagnostic::error(
                    format!("expected identifier in id list, found `{}`", other.escape_default()),
                    SourceSpan::new(bad_line, bad_column, 1),
                ));
            }
        }
    }
    tokens.push(Token {
        kind: TokenKind::IdList(items),
        span: SourceSpan::new(line, column, 1),
    });
}
