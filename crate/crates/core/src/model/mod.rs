//! Core safety-model types: the validated [`SafetyModel`] and everything it
//! is made of.
//!
//! A model is only ever obtained through [`build_model`], which checks every
//! structural invariant (id uniqueness, reference resolution, non-empty link
//! sets, stage consistency) and reports *all* violations at once rather than
//! stopping at the first. Once built, a model is immutable; the analysis and
//! report layers treat it as ground truth.
//!
//! All registries preserve declaration order, so every downstream artifact
//! (worksheets, reports, graph exports) is deterministic by construction.

mod build;

pub use build::{build_model, ValidationError, ValidationFailure};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::HashMap;
use std::fmt;

/// Element categories used in lookups and error reporting.
///
/// Edges are not listed: they are anonymous (identified by their endpoints)
/// and live outside the id namespaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Loss,
    Hazard,
    Node,
    Action,
    Uca,
    Scenario,
    Requirement,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Category::Loss => "loss",
            Category::Hazard => "hazard",
            Category::Node => "node",
            Category::Action => "action",
            Category::Uca => "uca",
            Category::Scenario => "scenario",
            Category::Requirement => "requirement",
        };
        f.write_str(name)
    }
}

/// A case-sensitive identifier: `[A-Za-z][A-Za-z0-9_.-]*`.
///
/// Identifiers are unique per category, not globally, so `H1` may name both a
/// hazard and a node without conflict.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Identifier(String);

impl Identifier {
    /// Validates the lexical shape and wraps the text.
    pub fn new(text: impl Into<String>) -> Result<Self, InvalidIdentifier> {
        let text = text.into();
        if Self::is_valid(&text) {
            Ok(Identifier(text))
        } else {
            Err(InvalidIdentifier(text))
        }
    }

    /// True if `text` matches `[A-Za-z][A-Za-z0-9_.-]*`.
    pub fn is_valid(text: &str) -> bool {
        let mut chars = text.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() => {}
            _ => return false,
        }
        chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Identifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Identifier {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl Serialize for Identifier {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Identifier {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Identifier::new(text).map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid identifier `{0}`: expected [A-Za-z][A-Za-z0-9_.-]*")]
pub struct InvalidIdentifier(pub String);

/// The five lifecycle stages, ordered `IG < DP < LT < VF < DT`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LifecycleStage {
    #[serde(rename = "IG")]
    InformationGathering,
    #[serde(rename = "DP")]
    DataPreparation,
    #[serde(rename = "LT")]
    ClosedLoopTraining,
    #[serde(rename = "VF")]
    Verification,
    #[serde(rename = "DT")]
    Deployment,
}

impl LifecycleStage {
    /// All stages in lifecycle order.
    pub const ALL: [LifecycleStage; 5] = [
        LifecycleStage::InformationGathering,
        LifecycleStage::DataPreparation,
        LifecycleStage::ClosedLoopTraining,
        LifecycleStage::Verification,
        LifecycleStage::Deployment,
    ];

    /// The two-letter tag used in the model DSL.
    pub fn tag(self) -> &'static str {
        match self {
            LifecycleStage::InformationGathering => "IG",
            LifecycleStage::DataPreparation => "DP",
            LifecycleStage::ClosedLoopTraining => "LT",
            LifecycleStage::Verification => "VF",
            LifecycleStage::Deployment => "DT",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            LifecycleStage::InformationGathering => "Information Gathering",
            LifecycleStage::DataPreparation => "Data Preparation",
            LifecycleStage::ClosedLoopTraining => "Closed Loop Training",
            LifecycleStage::Verification => "Verification",
            LifecycleStage::Deployment => "Deployment",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.tag() == tag)
    }
}

impl fmt::Display for LifecycleStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// The four ways a control action can be unsafe. Column order of every
/// worksheet and report is fixed to the declaration order here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FailureMode {
    #[serde(rename = "not_provided")]
    NotProvided,
    #[serde(rename = "provided_improperly")]
    ProvidedImproperly,
    #[serde(rename = "mistimed")]
    MistimedProvision,
    #[serde(rename = "inappropriate_duration")]
    InappropriateDuration,
}

impl FailureMode {
    /// All modes in worksheet column order.
    pub const ALL: [FailureMode; 4] = [
        FailureMode::NotProvided,
        FailureMode::ProvidedImproperly,
        FailureMode::MistimedProvision,
        FailureMode::InappropriateDuration,
    ];

    /// The keyword used in the model DSL and structured exports.
    pub fn token(self) -> &'static str {
        match self {
            FailureMode::NotProvided => "not_provided",
            FailureMode::ProvidedImproperly => "provided_improperly",
            FailureMode::MistimedProvision => "mistimed",
            FailureMode::InappropriateDuration => "inappropriate_duration",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            FailureMode::NotProvided => "Not Provided",
            FailureMode::ProvidedImproperly => "Provided Improperly",
            FailureMode::MistimedProvision => "Mistimed Provision",
            FailureMode::InappropriateDuration => "Inappropriate Duration",
        }
    }

    pub fn from_token(token: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.token() == token)
    }
}

impl fmt::Display for FailureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Technical,
    Human,
}

impl NodeKind {
    pub fn token(self) -> &'static str {
        match self {
            NodeKind::Technical => "technical",
            NodeKind::Human => "human",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Control,
    Feedback,
}

impl EdgeKind {
    pub fn token(self) -> &'static str {
        match self {
            EdgeKind::Control => "control",
            EdgeKind::Feedback => "feedback",
        }
    }
}

/// A stakeholder loss. `safety_critical` defaults to `true` in the DSL.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Loss {
    pub id: Identifier,
    pub description: String,
    pub safety_critical: bool,
}

/// A system-level hazard traced to one or more losses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hazard {
    pub id: Identifier,
    pub description: String,
    /// Non-empty, ordered, duplicate-free.
    pub losses: Vec<Identifier>,
}

/// A controller or controlled process in the control structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: Identifier,
    pub stage: LifecycleStage,
    pub kind: NodeKind,
    pub label: String,
}

/// A directed control or feedback arc between two distinct nodes.
///
/// Edges carry no id of their own; error messages describe them as
/// `<kind> <from>-><to>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub kind: EdgeKind,
    pub from: Identifier,
    pub to: Identifier,
    /// Optional human label; empty string when omitted.
    pub label: String,
}

impl Edge {
    /// Stable textual description used in diagnostics and findings.
    pub fn describe(&self) -> String {
        format!("{} {}->{}", self.kind.token(), self.from, self.to)
    }
}

/// A control action issued by a controller node. Its stage is the stage of
/// its controller.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlAction {
    pub id: Identifier,
    pub controller: Identifier,
    pub name: String,
}

/// An unsafe control action: one worksheet cell entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Uca {
    pub id: Identifier,
    pub action: Identifier,
    pub mode: FailureMode,
    /// Non-empty, ordered, duplicate-free.
    pub hazards: Vec<Identifier>,
    pub description: String,
}

/// A causal scenario explaining how a UCA can occur. The declared stage must
/// equal the stage derived from the UCA's control action.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CausalScenario {
    pub id: Identifier,
    pub uca: Identifier,
    pub stage: LifecycleStage,
    pub description: String,
}

/// A safety requirement mitigating one or more causal scenarios.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SafetyRequirement {
    pub id: Identifier,
    pub scenarios: Vec<Identifier>,
    pub description: String,
}

/// Anything the DSL (or a programmatic caller) can declare, in source order.
///
/// Declarations are raw and unchecked; [`build_model`] turns a list of them
/// into a validated [`SafetyModel`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Declaration {
    /// The `model "<name>"` header.
    Model { name: String },
    Loss(Loss),
    Hazard(Hazard),
    Node(Node),
    Edge(Edge),
    Action(ControlAction),
    Uca(Uca),
    Scenario(CausalScenario),
    Requirement(SafetyRequirement),
}

/// Anything with an id, for registry storage and lookups.
pub trait HasId {
    fn id(&self) -> &Identifier;
}

macro_rules! impl_has_id {
    ($($ty:ty),*) => {
        $(impl HasId for $ty {
            fn id(&self) -> &Identifier { &self.id }
        })*
    };
}

impl_has_id!(Loss, Hazard, Node, ControlAction, Uca, CausalScenario, SafetyRequirement);

/// An insertion-ordered, id-indexed collection. Equality is order-sensitive:
/// two registries with the same items in a different order are different.
#[derive(Debug, Clone)]
pub struct Registry<T> {
    items: Vec<T>,
    index: HashMap<Identifier, usize>,
}

impl<T: HasId> Registry<T> {
    pub(crate) fn new() -> Self {
        Registry { items: Vec::new(), index: HashMap::new() }
    }

    /// Inserts unless the id is taken; returns `false` on collision.
    pub(crate) fn insert(&mut self, item: T) -> bool {
        if self.index.contains_key(item.id()) {
            return false;
        }
        self.index.insert(item.id().clone(), self.items.len());
        self.items.push(item);
        true
    }

    pub fn get(&self, id: &Identifier) -> Option<&T> {
        self.index.get(id).map(|&i| &self.items[i])
    }

    pub fn contains(&self, id: &Identifier) -> bool {
        self.index.contains_key(id)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.items.iter()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.items
    }
}

impl<'a, T> IntoIterator for &'a Registry<T> {
    type Item = &'a T;
    type IntoIter = std::slice::Iter<'a, T>;
    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

impl<T: PartialEq> PartialEq for Registry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.items == other.items
    }
}

impl<T: Eq> Eq for Registry<T> {}

/// A fully validated safety model. Immutable; construct via [`build_model`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafetyModel {
    pub(crate) name: String,
    pub(crate) losses: Registry<Loss>,
    pub(crate) hazards: Registry<Hazard>,
    pub(crate) nodes: Registry<Node>,
    pub(crate) edges: Vec<Edge>,
    pub(crate) actions: Registry<ControlAction>,
    pub(crate) ucas: Registry<Uca>,
    pub(crate) scenarios: Registry<CausalScenario>,
    pub(crate) requirements: Registry<SafetyRequirement>,
}

impl SafetyModel {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn losses(&self) -> &Registry<Loss> {
        &self.losses
    }

    pub fn hazards(&self) -> &Registry<Hazard> {
        &self.hazards
    }

    pub fn nodes(&self) -> &Registry<Node> {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn actions(&self) -> &Registry<ControlAction> {
        &self.actions
    }

    pub fn ucas(&self) -> &Registry<Uca> {
        &self.ucas
    }

    pub fn scenarios(&self) -> &Registry<CausalScenario> {
        &self.scenarios
    }

    pub fn requirements(&self) -> &Registry<SafetyRequirement> {
        &self.requirements
    }

    /// Reconstructs the declaration list (header first, then each registry in
    /// canonical category order, each in declaration order). Feeding the
    /// result back through [`build_model`] yields an equal model.
    pub fn to_declarations(&self) -> Vec<Declaration> {
        let mut decls = Vec::with_capacity(
            1 + self.losses.len()
                + self.hazards.len()
                + self.nodes.len()
                + self.edges.len()
                + self.actions.len()
                + self.ucas.len()
                + self.scenarios.len()
                + self.requirements.len(),
        );
        decls.push(Declaration::Model { name: self.name.clone() });
        decls.extend(self.losses.iter().cloned().map(Declaration::Loss));
        decls.extend(self.hazards.iter().cloned().map(Declaration::Hazard));
        decls.extend(self.nodes.iter().cloned().map(Declaration::Node));
        decls.extend(self.edges.iter().cloned().map(Declaration::Edge));
        decls.extend(self.actions.iter().cloned().map(Declaration::Action));
        decls.extend(self.ucas.iter().cloned().map(Declaration::Uca));
        decls.extend(self.scenarios.iter().cloned().map(Declaration::Scenario));
        decls.extend(self.requirements.iter().cloned().map(Declaration::Requirement));
        decls
    }

    /// Resolves the lifecycle stage of a staged element.
    ///
    /// Nodes carry their stage directly; actions inherit from their
    /// controller, UCAs from their action, scenarios from their declaration.
    /// When one id names elements in several categories, the first staged
    /// category in the order node, action, UCA, scenario wins.
    pub fn stage_of(&self, id: &Identifier) -> Result<LifecycleStage, StageQueryError> {
        if let Some(node) = self.nodes.get(id) {
            return Ok(node.stage);
        }
        if let Some(action) = self.actions.get(id) {
            return self.stage_of(&action.controller);
        }
        if let Some(uca) = self.ucas.get(id) {
            return self.stage_of(&uca.action);
        }
        if let Some(scenario) = self.scenarios.get(id) {
            return Ok(scenario.stage);
        }
        for (registry_has, category) in [
            (self.losses.contains(id), Category::Loss),
            (self.hazards.contains(id), Category::Hazard),
            (self.requirements.contains(id), Category::Requirement),
        ] {
            if registry_has {
                return Err(StageQueryError::StagelessCategory { id: id.clone(), category });
            }
        }
        Err(StageQueryError::UnknownId(id.clone()))
    }

    /// Returns the ids one hop away on the traceability chain
    /// `loss <- hazard <- UCA <- scenario <- requirement`.
    ///
    /// `downstream` walks toward losses, `upstream` toward requirements; both
    /// lists are in declaration order. Ids outside the chain (nodes, actions)
    /// are unknown to this query.
    pub fn chain_neighbors(&self, id: &Identifier) -> Result<ChainNeighbors, UnknownId> {
        if self.losses.contains(id) {
            let upstream = self
                .hazards
                .iter()
                .filter(|h| h.losses.contains(id))
                .map(|h| h.id.clone())
                .collect();
            return Ok(ChainNeighbors { upstream, downstream: Vec::new() });
        }
        if let Some(hazard) = self.hazards.get(id) {
            let upstream = self
                .ucas
                .iter()
                .filter(|u| u.hazards.contains(id))
                .map(|u| u.id.clone())
                .collect();
            return Ok(ChainNeighbors { upstream, downstream: hazard.losses.clone() });
        }
        if let Some(uca) = self.ucas.get(id) {
            let upstream = self
                .scenarios
                .iter()
                .filter(|s| &s.uca == id)
                .map(|s| s.id.clone())
                .collect();
            return Ok(ChainNeighbors { upstream, downstream: uca.hazards.clone() });
        }
        if let Some(scenario) = self.scenarios.get(id) {
            let upstream = self
                .requirements
                .iter()
                .filter(|r| r.scenarios.contains(id))
                .map(|r| r.id.clone())
                .collect();
            return Ok(ChainNeighbors { upstream, downstream: vec![scenario.uca.clone()] });
        }
        if let Some(requirement) = self.requirements.get(id) {
            return Ok(ChainNeighbors {
                upstream: Vec::new(),
                downstream: requirement.scenarios.clone(),
            });
        }
        Err(UnknownId(id.clone()))
    }
}

/// Direct chain neighbors of one element; see [`SafetyModel::chain_neighbors`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainNeighbors {
    /// Toward requirements.
    pub upstream: Vec<Identifier>,
    /// Toward losses.
    pub downstream: Vec<Identifier>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown id `{0}`")]
pub struct UnknownId(pub Identifier);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StageQueryError {
    #[error("unknown id `{0}`")]
    UnknownId(Identifier),
    #[error("{category} `{id}` has no lifecycle stage")]
    StagelessCategory { id: Identifier, category: Category },
}
