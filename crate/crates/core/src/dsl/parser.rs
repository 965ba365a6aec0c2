//! Recovering recursive-descent parser for the model DSL.
//!
//! Each statement is parsed independently: after any error the parser skips
//! to the next statement keyword, so two broken statements yield exactly two
//! errors. Attributes may appear in any order after the statement id;
//! duplicates are errors (never last-wins), unknown attributes are errors,
//! and a statement missing a required attribute is reported and dropped.

use super::lexer::{lex, Keyword, Token, TokenKind};
use super::{ModelDocument, ParseDiagnostic, SourceSpan};
use crate::model::{
    CausalScenario, ControlAction, Declaration, Edge, EdgeKind, FailureMode, Hazard, Identifier,
    LifecycleStage, Loss, Node, NodeKind, SafetyRequirement, Uca,
};

/// Parses a model text into declarations plus diagnostics. Never panics;
/// errors in [`ModelDocument::diagnostics`] mean the document is invalid,
/// but everything parseable is still returned.
pub fn parse_document(text: &str) -> ModelDocument {
    let (tokens, mut diagnostics) = lex(text);
    let mut parser = Parser { tokens: &tokens, pos: 0, end_span: end_span(text) };
    let mut declarations = Vec::new();

    // Header: the document must open with `model "<name>"`.
    match parser.peek() {
        Some(token) if matches!(token.kind, TokenKind::Keyword(Keyword::Model)) => {
            let keyword_span = token.span;
            parser.bump();
            match parser.take_string() {
                Some((name, _)) => declarations.push(Declaration::Model { name }),
                None => {
                    diagnostics.push(ParseDiagnostic::error(
                        "expected model name string after `model`",
                        parser.span_here(keyword_span),
                    ));
                    parser.skip_to_statement();
                }
            }
        }
        Some(token) => {
            diagnostics.push(ParseDiagnostic::error(
                format!("expected `model` header, found {}", token.kind.describe()),
                token.span,
            ));
        }
        None => {
            diagnostics.push(ParseDiagnostic::error(
                "empty document: expected `model` header",
                parser.end_span,
            ));
        }
    }

    // Statements until end of input.
    while let Some(token) = parser.peek() {
        let keyword = match &token.kind {
            TokenKind::Keyword(k) if k.starts_statement() => *k,
            other => {
                diagnostics.push(ParseDiagnostic::error(
                    format!("expected statement keyword, found {}", other.describe()),
                    token.span,
                ));
                parser.bump();
                parser.skip_to_statement();
                continue;
            }
        };
        let keyword_span = token.span;
        parser.bump();

        match keyword {
            Keyword::Model => {
                diagnostics.push(ParseDiagnostic::error(
                    "duplicate `model` header (only the first statement may name the model)",
                    keyword_span,
                ));
                parser.skip_to_statement();
            }
            Keyword::Edge => {
                if let Some(decl) = parse_edge(&mut parser, keyword_span, &mut diagnostics) {
                    declarations.push(decl);
                }
            }
            _ => {
                if let Some(decl) =
                    parse_keyed_statement(&mut parser, keyword, keyword_span, &mut diagnostics)
                {
                    declarations.push(decl);
                }
            }
        }
    }

    diagnostics.sort_by_key(|d| (d.span.line, d.span.column));
    ModelDocument { declarations, diagnostics }
}

/// Span pointing at the very end of the input, for end-of-file errors.
fn end_span(text: &str) -> SourceSpan {
    let mut line = 1u32;
    let mut column = 1u32;
    for c in text.chars() {
        if c == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    SourceSpan::new(line, column.saturating_sub(1).max(1), 1)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    end_span: SourceSpan,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<&'a Token> {
        let token = self.tokens.get(self.pos)?;
        self.pos += 1;
        Some(token)
    }

    /// The span of the next token, or `fallback` at end of input.
    fn span_here(&self, fallback: SourceSpan) -> SourceSpan {
        self.peek().map(|t| t.span).unwrap_or(fallback)
    }

    fn take_string(&mut self) -> Option<(String, SourceSpan)> {
        match self.peek() {
            Some(Token { kind: TokenKind::Str(s), span }) => {
                let result = (s.clone(), *span);
                self.bump();
                Some(result)
            }
            _ => None,
        }
    }

    fn take_eq(&mut self) -> bool {
        if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Eq)) {
            self.bump();
            return true;
        }
        false
    }

    /// True at a token that begins a new statement. A statement keyword
    /// directly followed by `=` is an attribute instead (`uca=` inside a
    /// scenario, `action=` inside a uca).
    fn at_statement_start(&self) -> bool {
        match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Keyword(k)) if k.starts_statement() => {
                !matches!(self.tokens.get(self.pos + 1).map(|t| &t.kind), Some(TokenKind::Eq))
            }
            _ => false,
        }
    }

    /// Error recovery: drop tokens until the next statement keyword.
    fn skip_to_statement(&mut self) {
        while self.peek().is_some() && !self.at_statement_start() {
            self.bump();
        }
    }
}

/// `edge` is the one positional statement: `edge <kind> <from> -> <to> ["label"]`.
fn parse_edge(
    parser: &mut Parser,
    keyword_span: SourceSpan,
    diagnostics: &mut Vec<ParseDiagnostic>,
) -> Option<Declaration> {
    fn fail(
        parser: &mut Parser,
        diagnostics: &mut Vec<ParseDiagnostic>,
        message: String,
        span: SourceSpan,
    ) -> Option<Declaration> {
        diagnostics.push(ParseDiagnostic::error(message, span));
        parser.skip_to_statement();
        None
    }

    let kind = match parser.peek() {
        Some(Token { kind: TokenKind::Keyword(Keyword::Control), .. }) => {
            parser.bump();
            EdgeKind::Control
        }
        Some(Token { kind: TokenKind::Keyword(Keyword::Feedback), .. }) => {
            parser.bump();
            EdgeKind::Feedback
        }
        other => {
            let span = other.map(|t| t.span).unwrap_or(parser.end_span);
            let message = "expected `control` or `feedback` after `edge`".into();
            return fail(parser, diagnostics, message, span);
        }
    };

    let from = match take_identifier(parser, diagnostics, "edge source node") {
        Some(id) => id,
        None => {
            parser.skip_to_statement();
            return None;
        }
    };

    if !matches!(parser.peek().map(|t| &t.kind), Some(TokenKind::Arrow)) {
        let span = parser.span_here(keyword_span);
        return fail(parser, diagnostics, "expected `->` between edge endpoints".into(), span);
    }
    parser.bump();

    let to = match take_identifier(parser, diagnostics, "edge target node") {
        Some(id) => id,
        None => {
            parser.skip_to_statement();
            return None;
        }
    };

    let label = parser.take_string().map(|(s, _)| s).unwrap_or_default();
    Some(Declaration::Edge(Edge { kind, from, to, label }))
}

/// Expects an identifier token and converts it, reporting a contextual error
/// otherwise.
fn take_identifier(
    parser: &mut Parser,
    diagnostics: &mut Vec<ParseDiagnostic>,
    what: &str,
) -> Option<Identifier> {
    match parser.peek() {
        Some(Token { kind: TokenKind::Ident(text), .. }) => {
            // The lexer only forms words matching the identifier shape.
            let id = Identifier::new(text.clone()).expect("lexer produced malformed identifier");
            parser.bump();
            Some(id)
        }
        other => {
            let (found, span) = match other {
                Some(token) => (token.kind.describe(), token.span),
                None => ("end of input".to_string(), parser.end_span),
            };
            diagnostics.push(ParseDiagnostic::error(
                format!("expected {what}, found {found}"),
                span,
            ));
            None
        }
    }
}

/// One parsed attribute value.
enum AttrValue {
    Ident(String, SourceSpan),
    IdList(Vec<(String, SourceSpan)>),
    Bool(bool),
}

/// Collected body of a keyed statement: a description string plus named
/// attributes, in any order.
struct StatementBody {
    description: Option<(String, SourceSpan)>,
    attrs: Vec<(Keyword, AttrValue, SourceSpan)>,
}

impl StatementBody {
    fn take(&mut self, keyword: Keyword) -> Option<AttrValue> {
        let index = self.attrs.iter().position(|(k, _, _)| *k == keyword)?;
        Some(self.attrs.remove(index).1)
    }
}

/// Parses `<keyword> <id> <attributes and description in any order>` for all
/// non-edge statements, then assembles the declaration per statement kind.
fn parse_keyed_statement(
    parser: &mut Parser,
    keyword: Keyword,
    keyword_span: SourceSpan,
    diagnostics: &mut Vec<ParseDiagnostic>,
) -> Option<Declaration> {
    let statement_name = keyword.text();

    let id = match take_identifier(parser, diagnostics, &format!("{statement_name} id")) {
        Some(id) => id,
        None => {
            parser.skip_to_statement();
            return None;
        }
    };

    // Attribute keywords legal for each statement kind.
    let allowed: &[Keyword] = match keyword {
        Keyword::Loss => &[Keyword::Critical],
        Keyword::Hazard => &[Keyword::Losses],
        Keyword::Node => &[Keyword::Stage, Keyword::Kind],
        Keyword::Action => &[Keyword::Controller],
        Keyword::Uca => &[Keyword::Action, Keyword::Mode, Keyword::Hazards],
        Keyword::Scenario => &[Keyword::Uca, Keyword::Stage],
        Keyword::Requirement => &[Keyword::Scenarios],
        _ => unreachable!("parse_keyed_statement called for non-keyed statement"),
    };

    let mut body = StatementBody { description: None, attrs: Vec::new() };
    let mut poisoned = false;

    while let Some(token) = parser.peek() {
        if parser.at_statement_start() {
            break;
        }
        match &token.kind {
            TokenKind::Str(text) => {
                if body.description.is_some() {
                    diagnostics.push(ParseDiagnostic::error(
                        format!("duplicate description string in `{statement_name}` statement"),
                        token.span,
                    ));
                    poisoned = true;
                } else {
                    body.description = Some((text.clone(), token.span));
                }
                parser.bump();
            }
            TokenKind::Keyword(attr) => {
                let attr = *attr;
                let attr_span = token.span;
                parser.bump();
                if !allowed.contains(&attr) {
                    diagnostics.push(ParseDiagnostic::error(
                        format!(
                            "unknown attribute `{}` for `{statement_name}`",
                            attr.text()
                        ),
                        attr_span,
                    ));
                    poisoned = true;
                    // Swallow a trailing `= value` so recovery stays local,
                    // but never eat into the next statement.
                    if parser.take_eq() && !parser.at_statement_start() {
                        parser.bump();
                    }
                    continue;
                }
                if !parser.take_eq() {
                    diagnostics.push(ParseDiagnostic::error(
                        format!("expected `=` after `{}`", attr.text()),
                        parser.span_here(attr_span),
                    ));
                    poisoned = true;
                    continue;
                }
                let value = match parser.peek() {
                    Some(Token { kind: TokenKind::Ident(text), span }) => {
                        let v = AttrValue::Ident(text.clone(), *span);
                        parser.bump();
                        v
                    }
                    Some(Token { kind: TokenKind::IdList(items), .. }) => {
                        let v = AttrValue::IdList(items.clone());
                        parser.bump();
                        v
                    }
                    Some(Token { kind: TokenKind::Keyword(k), span })
                        if matches!(
                            k,
                            Keyword::True
                                | Keyword::False
                                | Keyword::Technical
                                | Keyword::Human
                        ) =>
                    {
                        let v = match k {
                            Keyword::True => AttrValue::Bool(true),
                            Keyword::False => AttrValue::Bool(false),
                            // `technical` / `human` ride along as idents so the
                            // node assembler can match on their text.
                            other => AttrValue::Ident(other.text().to_string(), *span),
                        };
                        parser.bump();
                        v
                    }
                    other => {
                        let (found, span) = match other {
                            Some(token) => (token.kind.describe(), token.span),
                            None => ("end of input".to_string(), parser.end_span),
                        };
                        diagnostics.push(ParseDiagnostic::error(
                            format!("expected value after `{}=`, found {found}", attr.text()),
                            span,
                        ));
                        poisoned = true;
                        continue;
                    }
                };
                if body.attrs.iter().any(|(k, _, _)| *k == attr) {
                    diagnostics.push(ParseDiagnostic::error(
                        format!("duplicate attribute `{}`", attr.text()),
                        attr_span,
                    ));
                    poisoned = true;
                } else {
                    body.attrs.push((attr, value, attr_span));
                }
            }
            other => {
                diagnostics.push(ParseDiagnostic::error(
                    format!(
                        "unexpected {} in `{statement_name}` statement",
                        other.describe()
                    ),
                    token.span,
                ));
                poisoned = true;
                parser.bump();
            }
        }
    }

    if poisoned {
        return None;
    }
    assemble(keyword, keyword_span, id, body, diagnostics)
}

/// Turns a collected statement body into a declaration, checking required
/// attributes and value kinds.
fn assemble(
    keyword: Keyword,
    keyword_span: SourceSpan,
    id: Identifier,
    mut body: StatementBody,
    diagnostics: &mut Vec<ParseDiagnostic>,
) -> Option<Declaration> {
    let statement_name = keyword.text();
    let missing = |diagnostics: &mut Vec<ParseDiagnostic>, what: &str| {
        diagnostics.push(ParseDiagnostic::error(
            format!("`{statement_name} {id}` is missing {what}"),
            keyword_span,
        ));
    };

    macro_rules! require_description {
        () => {
            match body.description.take() {
                Some((text, _)) => text,
                None => {
                    missing(diagnostics, "its description string");
                    return None;
                }
            }
        };
    }

    match keyword {
        Keyword::Loss => {
            let safety_critical = match body.take(Keyword::Critical) {
                Some(AttrValue::Bool(flag)) => flag,
                Some(_) => {
                    diagnostics.push(ParseDiagnostic::error(
                        "`critical` expects `true` or `false`",
                        keyword_span,
                    ));
                    return None;
                }
                None => true,
            };
            let description = require_description!();
            Some(Declaration::Loss(Loss { id, description, safety_critical }))
        }
        Keyword::Hazard => {
            let losses = take_id_list(&mut body, Keyword::Losses, keyword_span, diagnostics)?;
            let description = require_description!();
            Some(Declaration::Hazard(Hazard { id, description, losses }))
        }
        Keyword::Node => {
            let stage = take_stage(&mut body, keyword_span, diagnostics)?;
            let kind = match body.take(Keyword::Kind) {
                Some(AttrValue::Ident(text, span)) => match text.as_str() {
                    "technical" => NodeKind::Technical,
                    "human" => NodeKind::Human,
                    other => {
                        diagnostics.push(ParseDiagnostic::error(
                            format!("unknown node kind `{other}` (expected technical or human)"),
                            span,
                        ));
                        return None;
                    }
                },
                Some(_) => {
                    diagnostics.push(ParseDiagnostic::error(
                        "`kind` expects `technical` or `human`",
                        keyword_span,
                    ));
                    return None;
                }
                None => {
                    missing(diagnostics, "`kind=`");
                    return None;
                }
            };
            let label = require_description!();
            Some(Declaration::Node(Node { id, stage, kind, label }))
        }
        Keyword::Action => {
            let controller = match body.take(Keyword::Controller) {
                Some(AttrValue::Ident(text, span)) => ident_from(text, span, diagnostics)?,
                Some(_) => {
                    diagnostics.push(ParseDiagnostic::error(
                        "`controller` expects a node id",
                        keyword_span,
                    ));
                    return None;
                }
                None => {
                    missing(diagnostics, "`controller=`");
                    return None;
                }
            };
            let name = require_description!();
            Some(Declaration::Action(ControlAction { id, controller, name }))
        }
        Keyword::Uca => {
            let action = match body.take(Keyword::Action) {
                Some(AttrValue::Ident(text, span)) => ident_from(text, span, diagnostics)?,
                Some(_) => {
                    diagnostics.push(ParseDiagnostic::error(
                        "`action` expects a control action id",
                        keyword_span,
                    ));
                    return None;
                }
                None => {
                    missing(diagnostics, "`action=`");
                    return None;
                }
            };
            let mode = match body.take(Keyword::Mode) {
                Some(AttrValue::Ident(text, span)) => match FailureMode::from_token(&text) {
                    Some(mode) => mode,
                    None => {
                        diagnostics.push(ParseDiagnostic::error(
                            format!(
                                "unknown failure mode `{text}` (expected not_provided, \
                                 provided_improperly, mistimed, or inappropriate_duration)"
                            ),
                            span,
                        ));
                        return None;
                    }
                },
                Some(_) => {
                    diagnostics.push(ParseDiagnostic::error(
                        "`mode` expects a failure mode name",
                        keyword_span,
                    ));
                    return None;
                }
                None => {
                    missing(diagnostics, "`mode=`");
                    return None;
                }
            };
            let hazards = take_id_list(&mut body, Keyword::Hazards, keyword_span, diagnostics)?;
            let description = require_description!();
            Some(Declaration::Uca(Uca { id, action, mode, hazards, description }))
        }
        Keyword::Scenario => {
            let uca = match body.take(Keyword::Uca) {
                Some(AttrValue::Ident(text, span)) => ident_from(text, span, diagnostics)?,
                Some(_) => {
                    diagnostics.push(ParseDiagnostic::error(
                        "`uca` expects a UCA id",
                        keyword_span,
                    ));
                    return None;
                }
                None => {
                    missing(diagnostics, "`uca=`");
                    return None;
                }
            };
            let stage = take_stage(&mut body, keyword_span, diagnostics)?;
            let description = require_description!();
            Some(Declaration::Scenario(CausalScenario { id, uca, stage, description }))
        }
        Keyword::Requirement => {
            let scenarios =
                take_id_list(&mut body, Keyword::Scenarios, keyword_span, diagnostics)?;
            let description = require_description!();
            Some(Declaration::Requirement(SafetyRequirement { id, scenarios, description }))
        }
        _ => unreachable!("assemble called for non-keyed statement"),
    }
}

fn ident_from(
    text: String,
    span: SourceSpan,
    diagnostics: &mut Vec<ParseDiagnostic>,
) -> Option<Identifier> {
    match Identifier::new(text) {
        Ok(id) => Some(id),
        Err(err) => {
            diagnostics.push(ParseDiagnostic::error(err.to_string(), span));
            None
        }
    }
}

fn take_stage(
    body: &mut StatementBody,
    keyword_span: SourceSpan,
    diagnostics: &mut Vec<ParseDiagnostic>,
) -> Option<LifecycleStage> {
    match body.take(Keyword::Stage) {
        Some(AttrValue::Ident(text, span)) => match LifecycleStage::from_tag(&text) {
            Some(stage) => Some(stage),
            None => {
                diagnostics.push(ParseDiagnostic::error(
                    format!("unknown stage `{text}` (expected IG, DP, LT, VF, or DT)"),
                    span,
                ));
                None
            }
        },
        Some(_) => {
            diagnostics.push(ParseDiagnostic::error(
                "`stage` expects a stage tag (IG, DP, LT, VF, or DT)",
                keyword_span,
            ));
            None
        }
        None => {
            diagnostics.push(ParseDiagnostic::error(
                "missing `stage=` attribute",
                keyword_span,
            ));
            None
        }
    }
}

fn take_id_list(
    body: &mut StatementBody,
    attr: Keyword,
    keyword_span: SourceSpan,
    diagnostics: &mut Vec<ParseDiagnostic>,
) -> Option<Vec<Identifier>> {
    match body.take(attr) {
        Some(AttrValue::IdList(items)) => {
            let mut ids = Vec::with_capacity(items.len());
            for (text, span) in items {
                ids.push(ident_from(text, span, diagnostics)?);
            }
            Some(ids)
        }
        Some(_) => {
            diagnostics.push(ParseDiagnostic::error(
                format!("`{}` expects a bracketed id list", attr.text()),
                keyword_span,
            ));
            None
        }
        None => {
            diagnostics.push(ParseDiagnostic::error(
                format!("missing `{}=` attribute", attr.text()),
                keyword_span,
            ));
            None
        }
    }
}
