//! Structured (JSON) export and loss-free re-import.

use serde::Deserialize;
use serde_json::{json, Value};

use super::ReportBundle;
use crate::model::{
    build_model, CausalScenario, ControlAction, Declaration, Edge, Hazard, Loss, Node,
    SafetyModel, SafetyRequirement, Uca, ValidationFailure,
};

/// Serializes the bundle as one JSON document: keys sorted
/// lexicographically, arrays in declaration order, 2-space indentation,
/// LF newlines, trailing newline. Byte-identical across runs.
pub fn export_structured(bundle: &ReportBundle) -> String {
    let value = json!({
        "coverage": bundle.coverage,
        "loop_findings": bundle.loop_findings,
        "meta": bundle.meta,
        "model": model_value(&bundle.model),
        "traceability_audit": bundle.audit,
        "worksheet": bundle.worksheet,
    });
    let mut text =
        serde_json::to_string_pretty(&value).expect("report serialization cannot fail");
    text.push('\n');
    text
}

fn model_value(model: &SafetyModel) -> Value {
    json!({
        "name": model.name(),
        "losses": model.losses().as_slice(),
        "hazards": model.hazards().as_slice(),
        "nodes": model.nodes().as_slice(),
        "edges": model.edges(),
        "actions": model.actions().as_slice(),
        "ucas": model.ucas().as_slice(),
        "scenarios": model.scenarios().as_slice(),
        "requirements": model.requirements().as_slice(),
    })
}

/// Why a structured document could not be imported.
#[derive(Debug, thiserror::Error)]
pub enum ImportError {
    #[error("structured document is not valid JSON: {0}")]
    Syntax(String),
    #[error("structured document shape: {0}")]
    Shape(String),
    #[error(transparent)]
    Validation(#[from] ValidationFailure),
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    #[serde(default)]
    name: String,
    #[serde(default)]
    losses: Vec<Loss>,
    #[serde(default)]
    hazards: Vec<Hazard>,
    #[serde(default)]
    nodes: Vec<Node>,
    #[serde(default)]
    edges: Vec<Edge>,
    #[serde(default)]
    actions: Vec<ControlAction>,
    #[serde(default)]
    ucas: Vec<Uca>,
    #[serde(default)]
    scenarios: Vec<CausalScenario>,
    #[serde(default)]
    requirements: Vec<SafetyRequirement>,
}

/// Rebuilds the model from a structured export.
///
/// Accepts either a full report document (the model is read from its
/// `model` key) or a bare model object. The result passes through full
/// validation, so a hand-edited document cannot smuggle in a broken model.
pub fn import_structured(text: &str) -> Result<SafetyModel, ImportError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| ImportError::Syntax(e.to_string()))?;
    let model_part = match &value {
        Value::Object(map) if map.contains_key("model") => map["model"].clone(),
        _ => value,
    };
    let doc: ModelDoc = serde_json::from_value(model_part)
        .map_err(|e| ImportError::Shape(e.to_string()))?;

    let mut declarations = vec![Declaration::Model { name: doc.name }];
    declarations.extend(doc.losses.into_iter().map(Declaration::Loss));
    declarations.extend(doc.hazards.into_iter().map(Declaration::Hazard));
    declarations.extend(doc.nodes.into_iter().map(Declaration::Node));
    declarations.extend(doc.edges.into_iter().map(Declaration::Edge));
    declarations.extend(doc.actions.into_iter().map(Declaration::Action));
    declarations.extend(doc.ucas.into_iter().map(Declaration::Uca));
    declarations.extend(doc.scenarios.into_iter().map(Declaration::Scenario));
    declarations.extend(doc.requirements.into_iter().map(Declaration::Requirement));
    Ok(build_model(declarations)?)
}
