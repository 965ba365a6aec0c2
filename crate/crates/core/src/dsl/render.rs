//! Canonical text rendering: the inverse of parsing.
//!
//! Output is deterministic byte-for-byte: one statement per line in category
//! order (header, losses, hazards, nodes, edges, actions, ucas, scenarios,
//! requirements), each category in declaration order, attributes in
//! grammar order, LF line endings, minimal escaping. Two renders of equal
//! models are identical, and parsing the output rebuilds an equal model.

use crate::model::{Declaration, SafetyModel};
use std::fmt::Write as _;

/// Renders a validated model as canonical DSL text.
pub fn render_canonical(model: &SafetyModel) -> String {
    let mut out = String::new();
    for declaration in model.to_declarations() {
        render_declaration(&mut out, &declaration);
    }
    out
}

fn render_declaration(out: &mut String, declaration: &Declaration) {
    match declaration {
        Declaration::Model { name } => {
            let _ = writeln!(out, "model {}", quote(name));
        }
        Declaration::Loss(loss) => {
            let _ = write!(out, "loss {} {}", loss.id, quote(&loss.description));
            // `critical=true` is the default and stays implicit.
            if !loss.safety_critical {
                out.push_str(" critical=false");
            }
            out.push('\n');
        }
        Declaration::Hazard(hazard) => {
            let _ = writeln!(
                out,
                "hazard {} {} losses={}",
                hazard.id,
                quote(&hazard.description),
                id_list(&hazard.losses)
            );
        }
        Declaration::Node(node) => {
            let _ = writeln!(
                out,
                "node {} stage={} kind={} {}",
                node.id,
                node.stage.tag(),
                node.kind.token(),
                quote(&node.label)
            );
        }
        Declaration::Edge(edge) => {
            let _ = write!(out, "edge {} {} -> {}", edge.kind.token(), edge.from, edge.to);
            if !edge.label.is_empty() {
                let _ = write!(out, " {}", quote(&edge.label));
            }
            out.push('\n');
        }
        Declaration::Action(action) => {
            let _ = writeln!(
                out,
                "action {} controller={} {}",
                action.id,
                action.controller,
                quote(&action.name)
            );
        }
        Declaration::Uca(uca) => {
            let _ = writeln!(
                out,
                "uca {} action={} mode={} hazards={} {}",
                uca.id,
                uca.action,
                uca.mode.token(),
                id_list(&uca.hazards),
                quote(&uca.description)
            );
        }
        Declaration::Scenario(scenario) => {
            let _ = writeln!(
                out,
                "scenario {} uca={} stage={} {}",
                scenario.id,
                scenario.uca,
                scenario.stage.tag(),
                quote(&scenario.description)
            );
        }
        Declaration::Requirement(requirement) => {
            let _ = writeln!(
                out,
                "requirement {} scenarios={} {}",
                requirement.id,
                id_list(&requirement.scenarios),
                quote(&requirement.description)
            );
        }
    }
}

/// Quotes a string with the two escapes the grammar knows.
fn quote(text: &str) -> String {
    let mut quoted = String::with_capacity(text.len() + 2);
    quoted.push('"');
    for c in text.chars() {
        match c {
            '"' => quoted.push_str("\\\""),
            '\\' => quoted.push_str("\\\\"),
            other => quoted.push(other),
        }
    }
    quoted.push('"');
    quoted
}

fn id_list(ids: &[crate::model::Identifier]) -> String {
    let mut out = String::from("[");
    for (i, id) in ids.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(id.as_str());
    }
    out.push(']');
    out
}
