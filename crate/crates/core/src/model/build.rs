//! Model construction and validation.
//!
//! [`build_model`] performs two passes: registration (catching duplicate
//! ids) and reference checking (catching dangling references, empty link
//! sets, self loops, and stage mismatches). It never stops at the first
//! problem — the returned [`ValidationFailure`] lists every violation, in
//! declaration order, so one run of `check` shows the whole repair list.

use super::{
    Category, Declaration, Edge, Identifier, LifecycleStage, Registry, SafetyModel,
};
use std::collections::{HashMap, HashSet};
use std::fmt;

/// A single structural violation found while building a model.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidationError {
    #[error("duplicate {category} id `{id}`")]
    DuplicateId { category: Category, id: Identifier },

    /// `from` is the referring element: its id for registry elements, the
    /// `<kind> <from>-><to>` descriptor for edges.
    #[error("`{from}` references unknown {to_category} `{to}`")]
    DanglingReference { from: String, to_category: Category, to: Identifier },

    #[error("{category} `{id}` must link at least one {target}")]
    EmptyLinkSet { category: Category, id: Identifier, target: Category },

    #[error("edge `{edge}` is a self loop")]
    SelfLoop { edge: String },

    #[error(
        "scenario `{scenario}` declares stage {declared} but its UCA's control action sits in stage {derived}"
    )]
    StageMismatch {
        scenario: Identifier,
        declared: LifecycleStage,
        derived: LifecycleStage,
    },

    /// Link sets are ordered *sets*: listing the same target twice is
    /// rejected rather than silently deduplicated.
    #[error("`{owner}` lists `{target}` more than once")]
    DuplicateLinkEntry { owner: String, target: Identifier },

    /// Two UCAs may not share the (action, mode, description) triple.
    #[error("uca `{id}` repeats the (action, mode, description) of `{existing}`")]
    DuplicateUcaTriple { id: Identifier, existing: Identifier },

    /// Descriptions and labels must stay renderable as single-line strings.
    #[error("{owner}: {field} contains a line break")]
    UnrenderableText { owner: String, field: &'static str },

    /// Losses must say what is lost.
    #[error("loss `{id}` has an empty description")]
    EmptyDescription { id: Identifier },
}

/// The complete list of violations for a rejected declaration list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationFailure {
    pub errors: Vec<ValidationError>,
}

impl fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "model validation failed with {} error(s)", self.errors.len())?;
        for error in &self.errors {
            write!(f, "\n  {error}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationFailure {}

/// Builds a validated [`SafetyModel`] from raw declarations.
///
/// On failure the error lists *all* violations. The first `model` header
/// names the model (no header means an unnamed model, which is fine for
/// programmatic callers).
pub fn build_model(declarations: Vec<Declaration>) -> Result<SafetyModel, ValidationFailure> {
    let mut errors = Vec::new();

    let mut name: Option<String> = None;
    let mut losses = Registry::new();
    let mut hazards = Registry::new();
    let mut nodes = Registry::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut actions = Registry::new();
    let mut ucas = Registry::new();
    let mut scenarios = Registry::new();
    let mut requirements = Registry::new();

    // Pass 1: register everything, reporting id collisions. Collisions keep
    // the first declaration so reference checks still have a target.
    for declaration in declarations {
        match declaration {
            Declaration::Model { name: n } => {
                if name.is_none() {
                    name = Some(n);
                }
            }
            Declaration::Loss(loss) => {
                let id = loss.id.clone();
                if !losses.insert(loss) {
                    errors.push(ValidationError::DuplicateId { category: Category::Loss, id });
                }
            }
            Declaration::Hazard(hazard) => {
                let id = hazard.id.clone();
                if !hazards.insert(hazard) {
                    errors.push(ValidationError::DuplicateId { category: Category::Hazard, id });
                }
            }
            Declaration::Node(node) => {
                let id = node.id.clone();
                if !nodes.insert(node) {
                    errors.push(ValidationError::DuplicateId { category: Category::Node, id });
                }
            }
            Declaration::Edge(edge) => edges.push(edge),
            Declaration::Action(action) => {
                let id = action.id.clone();
                if !actions.insert(action) {
                    errors.push(ValidationError::DuplicateId { category: Category::Action, id });
                }
            }
            Declaration::Uca(uca) => {
                let id = uca.id.clone();
                if !ucas.insert(uca) {
                    errors.push(ValidationError::DuplicateId { category: Category::Uca, id });
                }
            }
            Declaration::Scenario(scenario) => {
                let id = scenario.id.clone();
                if !scenarios.insert(scenario) {
                    errors.push(ValidationError::DuplicateId { category: Category::Scenario, id });
                }
            }
            Declaration::Requirement(requirement) => {
                let id = requirement.id.clone();
                if !requirements.insert(requirement) {
                    errors.push(ValidationError::DuplicateId {
                        category: Category::Requirement,
                        id,
                    });
                }
            }
        }
    }

    let name = name.unwrap_or_default();

    // Pass 2: reference and text checks, in declaration order per category.
    let check_text = |errors: &mut Vec<ValidationError>, owner: String, field: &'static str, text: &str| {
        if text.contains('\n') || text.contains('\r') {
            errors.push(ValidationError::UnrenderableText { owner, field });
        }
    };

    check_text(&mut errors, "model".to_string(), "name", &name);

    for loss in &losses {
        check_text(&mut errors, format!("loss `{}`", loss.id), "description", &loss.description);
        if loss.description.is_empty() {
            errors.push(ValidationError::EmptyDescription { id: loss.id.clone() });
        }
    }

    for hazard in &hazards {
        check_text(
            &mut errors,
            format!("hazard `{}`", hazard.id),
            "description",
            &hazard.description,
        );
        if hazard.losses.is_empty() {
            errors.push(ValidationError::EmptyLinkSet {
                category: Category::Hazard,
                id: hazard.id.clone(),
                target: Category::Loss,
            });
        }
        check_links(&mut errors, hazard.id.as_str(), &hazard.losses, Category::Loss, |id| {
            losses.contains(id)
        });
    }

    for node in &nodes {
        check_text(&mut errors, format!("node `{}`", node.id), "label", &node.label);
    }

    for edge in &edges {
        let describe = edge.describe();
        check_text(&mut errors, format!("edge `{describe}`"), "label", &edge.label);
        for endpoint in [&edge.from, &edge.to] {
            if !nodes.contains(endpoint) {
                errors.push(ValidationError::DanglingReference {
                    from: describe.clone(),
                    to_category: Category::Node,
                    to: endpoint.clone(),
                });
            }
        }
        if edge.from == edge.to {
            errors.push(ValidationError::SelfLoop { edge: describe });
        }
    }

    for action in &actions {
        check_text(&mut errors, format!("action `{}`", action.id), "name", &action.name);
        if !nodes.contains(&action.controller) {
            errors.push(ValidationError::DanglingReference {
                from: action.id.as_str().to_string(),
                to_category: Category::Node,
                to: action.controller.clone(),
            });
        }
    }

    let mut uca_triples: HashMap<(&Identifier, super::FailureMode, &str), &Identifier> =
        HashMap::new();
    for uca in &ucas {
        check_text(&mut errors, format!("uca `{}`", uca.id), "description", &uca.description);
        if !actions.contains(&uca.action) {
            errors.push(ValidationError::DanglingReference {
                from: uca.id.as_str().to_string(),
                to_category: Category::Action,
                to: uca.action.clone(),
            });
        }
        if uca.hazards.is_empty() {
            errors.push(ValidationError::EmptyLinkSet {
                category: Category::Uca,
                id: uca.id.clone(),
                target: Category::Hazard,
            });
        }
        check_links(&mut errors, uca.id.as_str(), &uca.hazards, Category::Hazard, |id| {
            hazards.contains(id)
        });
        match uca_triples.entry((&uca.action, uca.mode, uca.description.as_str())) {
            std::collections::hash_map::Entry::Occupied(existing) => {
                errors.push(ValidationError::DuplicateUcaTriple {
                    id: uca.id.clone(),
                    existing: (*existing.get()).clone(),
                });
            }
            std::collections::hash_map::Entry::Vacant(slot) => {
                slot.insert(&uca.id);
            }
        }
    }

    for scenario in &scenarios {
        check_text(
            &mut errors,
            format!("scenario `{}`", scenario.id),
            "description",
            &scenario.description,
        );
        if !ucas.contains(&scenario.uca) {
            errors.push(ValidationError::DanglingReference {
                from: scenario.id.as_str().to_string(),
                to_category: Category::Uca,
                to: scenario.uca.clone(),
            });
            continue;
        }
        // Stage consistency is only checkable when the whole chain
        // scenario -> uca -> action -> controller resolves; broken links
        // already produced their own findings above.
        let derived = ucas
            .get(&scenario.uca)
            .and_then(|uca| actions.get(&uca.action))
            .and_then(|action| nodes.get(&action.controller))
            .map(|node| node.stage);
        if let Some(derived) = derived {
            if derived != scenario.stage {
                errors.push(ValidationError::StageMismatch {
                    scenario: scenario.id.clone(),
                    declared: scenario.stage,
                    derived,
                });
            }
        }
    }

    for requirement in &requirements {
        check_text(
            &mut errors,
            format!("requirement `{}`", requirement.id),
            "description",
            &requirement.description,
        );
        if requirement.scenarios.is_empty() {
            errors.push(ValidationError::EmptyLinkSet {
                category: Category::Requirement,
                id: requirement.id.clone(),
                target: Category::Scenario,
            });
        }
        check_links(&mut errors, requirement.id.as_str(), &requirement.scenarios, Category::Scenario, |id| {
            scenarios.contains(id)
        });
    }

    if errors.is_empty() {
        Ok(SafetyModel {
            name,
            losses,
            hazards,
            nodes,
            edges,
            actions,
            ucas,
            scenarios,
            requirements,
        })
    } else {
        Err(ValidationFailure { errors })
    }
}

/// Checks one link list for duplicates and dangling targets.
fn check_links(
    errors: &mut Vec<ValidationError>,
    owner: &str,
    links: &[Identifier],
    target_category: Category,
    exists: impl Fn(&Identifier) -> bool,
) {
    let mut seen: HashSet<&Identifier> = HashSet::new();
    for link in links {
        if !seen.insert(link) {
            errors.push(ValidationError::DuplicateLinkEntry {
                owner: owner.to_string(),
                target: link.clone(),
            });
            continue;
        }
        if !exists(link) {
            errors.push(ValidationError::DanglingReference {
                from: owner.to_string(),
                to_category: target_category,
                to: link.clone(),
            });
        }
    }
}
