//! Control-structure export in the DOT graph language, and a minimal
//! syntax checker for the emitted subset.

use std::fmt::Write;

use crate::model::{EdgeKind, LifecycleStage, NodeKind, SafetyModel};

/// Renders the control structure as a DOT digraph.
///
/// One cluster subgraph per lifecycle stage, always five, in IG..DT order
/// (empty stages still get their cluster so the report shape is stable).
/// Technical nodes are gray boxes, human nodes yellow ellipses; control
/// edges solid, feedback edges dashed; edges that cross stage boundaries
/// are additionally colored red. Node and edge order is declaration order.
pub fn export_graph(model: &SafetyModel) -> String {
    let mut out = String::new();
    if model.name().is_empty() {
        out.push_str("digraph {\n");
    } else {
        let _ = writeln!(out, "digraph {} {{", quoted(model.name()));
    }
    out.push_str("  rankdir=LR;\n");

    for stage in LifecycleStage::ALL {
        let _ = writeln!(out, "  subgraph cluster_{} {{", stage.tag().to_lowercase());
        let _ = writeln!(out, "    label={};", quoted(stage.display_name()));
        for node in model.nodes().iter().filter(|n| n.stage == stage) {
            let (shape, fill) = match node.kind {
                NodeKind::Technical => ("box", "gray"),
                NodeKind::Human => ("ellipse", "yellow"),
            };
            let _ = writeln!(
                out,
                "    {} [label={}, shape={shape}, style=filled, fillcolor={fill}];",
                quoted(node.id.as_str()),
                quoted(&node.label),
            );
        }
        out.push_str("  }\n");
    }

    for edge in model.edges() {
        let style = match edge.kind {
            EdgeKind::Control => "solid",
            EdgeKind::Feedback => "dashed",
        };
        let cross_stage = {
            let from = model.nodes().get(&edge.from).map(|n| n.stage);
            let to = model.nodes().get(&edge.to).map(|n| n.stage);
            from != to
        };
        let _ = write!(
            out,
            "  {} -> {} [style={style}",
            quoted(edge.from.as_str()),
            quoted(edge.to.as_str()),
        );
        if cross_stage {
            out.push_str(", color=red");
        }
        if !edge.label.is_empty() {
            let _ = write!(out, ", label={}", quoted(&edge.label));
        }
        out.push_str("];\n");
    }

    out.push_str("}\n");
    out
}

fn quoted(text: &str) -> String {
    format!("\"{}\"", text.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Checks that `text` is well-formed DOT within the subset this module
/// emits: a `digraph` with nested `subgraph` blocks, node statements with
/// attribute lists, edge statements, and `key=value;` assignments.
///
/// This is a syntax check only — it does not resolve node references.
pub fn validate_dot(text: &str) -> Result<(), String> {
    let tokens = lex_dot(text)?;
    let mut pos = 0;
    expect_word(&tokens, &mut pos, "digraph")?;
    // Optional graph id.
    if matches!(tokens.get(pos), Some(DotTok::Id(_))) {
        pos += 1;
    }
    parse_block(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(format!("trailing tokens after closing brace (token {pos})"));
    }
    Ok(())
}

#[derive(Debug, PartialEq)]
enum DotTok {
    Id(String),
    OpenBrace,
    CloseBrace,
    OpenBracket,
    CloseBracket,
    Semi,
    Comma,
    Eq,
    Arrow,
}

fn lex_dot(text: &str) -> Result<Vec<DotTok>, String> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '{' => {
                tokens.push(DotTok::OpenBrace);
                chars.next();
            }
            '}' => {
                tokens.push(DotTok::CloseBrace);
                chars.next();
            }
            '[' => {
                tokens.push(DotTok::OpenBracket);
                chars.next();
            }
            ']' => {
                tokens.push(DotTok::CloseBracket);
                chars.next();
            }
            ';' => {
                tokens.push(DotTok::Semi);
                chars.next();
            }
            ',' => {
                tokens.push(DotTok::Comma);
                chars.next();
            }
            '=' => {
                tokens.push(DotTok::Eq);
                chars.next();
            }
            '-' => {
                chars.next();
                if chars.next() != Some('>') {
                    return Err("stray `-` (expected `->`)".to_owned());
                }
                tokens.push(DotTok::Arrow);
            }
            '"' => {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        None => return Err("unterminated quoted id".to_owned()),
                        Some('"') => break,
                        Some('\\') => match chars.next() {
                            Some(e) => s.push(e),
                            None => return Err("dangling escape in quoted id".to_owned()),
                        },
                        Some(c) => s.push(c),
                    }
                }
                tokens.push(DotTok::Id(s));
            }
            c if c.is_ascii_alphanumeric() || c == '_' || c == '.' => {
                let mut s = String::new();
                while let Some(&w) = chars.peek() {
                    if w.is_ascii_alphanumeric() || w == '_' || w == '.' {
                        s.push(w);
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push(DotTok::Id(s));
            }
            other => return Err(format!("unexpected character `{other}`")),
        }
    }
    Ok(tokens)
}

fn expect_word(tokens: &[DotTok], pos: &mut usize, word: &str) -> Result<(), String> {
    match tokens.get(*pos) {
        Some(DotTok::Id(w)) if w == word => {
            *pos += 1;
            Ok(())
        }
        other => Err(format!("expected `{word}`, found {other:?}")),
    }
}

fn parse_block(tokens: &[DotTok], pos: &mut usize) -> Result<(), String> {
    if tokens.get(*pos) != Some(&DotTok::OpenBrace) {
        return Err(format!("expected `{{` at token {pos:?}"));
    }
    *pos += 1;
    loop {
        match tokens.get(*pos) {
            None => return Err("unbalanced braces".to_owned()),
            Some(DotTok::CloseBrace) => {
                *pos += 1;
                return Ok(());
            }
            Some(DotTok::Id(w)) if w == "subgraph" => {
                *pos += 1;
                if matches!(tokens.get(*pos), Some(DotTok::Id(_))) {
                    *pos += 1;
                }
                parse_block(tokens, pos)?;
            }
            Some(DotTok::Id(_)) => {
                *pos += 1;
                match tokens.get(*pos) {
                    // key=value;
                    Some(DotTok::Eq) => {
                        *pos += 1;
                        if !matches!(tokens.get(*pos), Some(DotTok::Id(_))) {
                            return Err("expected a value after `=`".to_owned());
                        }
                        *pos += 1;
                    }
                    // edge: id -> id [attrs];
                    Some(DotTok::Arrow) => {
                        *pos += 1;
                        if !matches!(tokens.get(*pos), Some(DotTok::Id(_))) {
                            return Err("expected a node id after `->`".to_owned());
                        }
                        *pos += 1;
                        parse_optional_attrs(tokens, pos)?;
                    }
                    // node: id [attrs];
                    _ => parse_optional_attrs(tokens, pos)?,
                }
                if tokens.get(*pos) != Some(&DotTok::Semi) {
                    return Err("expected `;` after statement".to_owned());
                }
                *pos += 1;
            }
            other => return Err(format!("unexpected token {other:?} in block")),
        }
    }
}

fn parse_optional_attrs(tokens: &[DotTok], pos: &mut usize) -> Result<(), String> {
    if tokens.get(*pos) != Some(&DotTok::OpenBracket) {
        return Ok(());
    }
    *pos += 1;
    if tokens.get(*pos) == Some(&DotTok::CloseBracket) {
        *pos += 1;
        return Ok(());
    }
    loop {
        if !matches!(tokens.get(*pos), Some(DotTok::Id(_))) {
            return Err("expected an attribute name".to_owned());
        }
        *pos += 1;
        if tokens.get(*pos) != Some(&DotTok::Eq) {
            return Err("expected `=` in attribute".to_owned());
        }
        *pos += 1;
        if !matches!(tokens.get(*pos), Some(DotTok::Id(_))) {
            return Err("expected an attribute value".to_owned());
        }
        *pos += 1;
        match tokens.get(*pos) {
            Some(DotTok::Comma) => *pos += 1,
            Some(DotTok::CloseBracket) => {
                *pos += 1;
                return Ok(());
            }
            other => return Err(format!("expected `,` or `]`, found {other:?}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_document;
    use crate::model::build_model;

    fn model() -> SafetyModel {
        let text = r#"
model "toy"
node a stage=IG kind=technical "sensor suite"
node b stage=DP kind=technical "processing"
node h stage=DT kind=human "driver"
edge control a -> b "raw data"
edge feedback b -> a
edge control b -> h
"#;
        build_model(parse_document(text).declarations).unwrap()
    }

    #[test]
    fn emits_five_clusters_regardless_of_population() {
        let dot = export_graph(&model());
        assert_eq!(dot.matches("subgraph cluster_").count(), 5);
        for tag in ["ig", "dp", "lt", "vf", "dt"] {
            assert!(dot.contains(&format!("subgraph cluster_{tag}")), "{tag}");
        }
        // IG..DT order.
        let ig = dot.find("cluster_ig").unwrap();
        let dp = dot.find("cluster_dp").unwrap();
        let lt = dot.find("cluster_lt").unwrap();
        let vf = dot.find("cluster_vf").unwrap();
        let dt = dot.find("cluster_dt").unwrap();
        assert!(ig < dp && dp < lt && lt < vf && vf < dt);
    }

    #[test]
    fn styles_follow_kind_and_edge_type() {
        let dot = export_graph(&model());
        assert!(dot.contains("\"a\" [label=\"sensor suite\", shape=box, style=filled, fillcolor=gray];"));
        assert!(dot.contains("\"h\" [label=\"driver\", shape=ellipse, style=filled, fillcolor=yellow];"));
        assert!(dot.contains("\"a\" -> \"b\" [style=solid, color=red, label=\"raw data\"];"));
        assert!(dot.contains("\"b\" -> \"a\" [style=dashed, color=red];"));
    }

    #[test]
    fn export_is_deterministic_and_valid() {
        let m = model();
        let a = export_graph(&m);
        assert_eq!(a, export_graph(&m));
        validate_dot(&a).unwrap();
    }

    #[test]
    fn empty_model_is_still_a_valid_graph() {
        let m = build_model(vec![]).unwrap();
        let dot = export_graph(&m);
        assert!(dot.starts_with("digraph {\n"));
        assert_eq!(dot.matches("subgraph cluster_").count(), 5);
        validate_dot(&dot).unwrap();
    }

    #[test]
    fn checker_rejects_malformed_documents() {
        assert!(validate_dot("graph {}").is_err());
        assert!(validate_dot("digraph {").is_err());
        assert!(validate_dot("digraph { \"a\" -> ; }").is_err());
        assert!(validate_dot("digraph { \"a\" [label=]; }").is_err());
        assert!(validate_dot("digraph {} extra").is_err());
        assert!(validate_dot("digraph { \"unterminated }").is_err());
    }
}
