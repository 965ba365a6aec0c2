//! Structural checks on the control graph: open loops, isolated nodes,
//! cross-stage coupling.

use serde::Serialize;
use std::collections::HashSet;

use crate::model::{Edge, EdgeKind, Identifier, SafetyModel};

/// Control-structure findings.
///
/// A controller's loop is considered closed when it receives a feedback
/// edge directly, or when some path from a node it controls leads back to
/// it and that path contains at least one feedback edge — indirect
/// feedback through intermediate modules counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoopFindings {
    /// Nodes that emit control but never (directly or indirectly) receive
    /// feedback, in declaration order.
    pub controllers_without_feedback: Vec<Identifier>,
    /// Nodes with no incident edges at all, in declaration order.
    pub unreachable_nodes: Vec<Identifier>,
    /// Edges whose endpoints sit in different lifecycle stages, in
    /// declaration order.
    pub cross_stage_edges: Vec<Edge>,
}

impl LoopFindings {
    pub fn is_clean(&self) -> bool {
        self.controllers_without_feedback.is_empty() && self.unreachable_nodes.is_empty()
    }
}

/// Audits the control structure of a valid model.
pub fn control_loop_audit(model: &SafetyModel) -> LoopFindings {
    let controllers_without_feedback = model
        .nodes()
        .iter()
        .map(|n| &n.id)
        .filter(|id| emits_control(model, id) && !receives_feedback(model, id))
        .cloned()
        .collect();

    let mut touched: HashSet<&Identifier> = HashSet::new();
    for edge in model.edges() {
        touched.insert(&edge.from);
        touched.insert(&edge.to);
    }
    let unreachable_nodes = model
        .nodes()
        .iter()
        .map(|n| &n.id)
        .filter(|id| !touched.contains(id))
        .cloned()
        .collect();

    let cross_stage_edges = model
        .edges()
        .iter()
        .filter(|e| {
            let from = model.nodes().get(&e.from).map(|n| n.stage);
            let to = model.nodes().get(&e.to).map(|n| n.stage);
            from != to
        })
        .cloned()
        .collect();

    LoopFindings { controllers_without_feedback, unreachable_nodes, cross_stage_edges }
}

fn emits_control(model: &SafetyModel, id: &Identifier) -> bool {
    model.edges().iter().any(|e| e.kind == EdgeKind::Control && &e.from == id)
}

fn receives_feedback(model: &SafetyModel, controller: &Identifier) -> bool {
    // Direct: any feedback edge ends at the controller.
    if model.edges().iter().any(|e| e.kind == EdgeKind::Feedback && &e.to == controller) {
        return true;
    }
    // Indirect: search from every node the controller controls for a path
    // back to it containing at least one feedback edge. BFS over
    // (node, seen-feedback) states keeps this linear in edges.
    let starts: Vec<&Identifier> = model
        .edges()
        .iter()
        .filter(|e| e.kind == EdgeKind::Control && &e.from == controller)
        .map(|e| &e.to)
        .collect();
    let mut queue: Vec<(&Identifier, bool)> = starts.into_iter().map(|n| (n, false)).collect();
    let mut seen: HashSet<(&Identifier, bool)> = queue.iter().copied().collect();
    while let Some((node, fed)) = queue.pop() {
        if node == controller && fed {
            return true;
        }
        for edge in model.edges().iter().filter(|e| &e.from == node) {
            let state = (&edge.to, fed || edge.kind == EdgeKind::Feedback);
            if seen.insert(state) {
                queue.push(state);
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_document;
    use crate::model::build_model;

    fn id(s: &str) -> Identifier {
        Identifier::new(s).unwrap()
    }

    fn model_from(text: &str) -> SafetyModel {
        let doc = parse_document(text);
        assert!(!doc.has_errors(), "{:?}", doc.diagnostics);
        build_model(doc.declarations).unwrap()
    }

    #[test]
    fn lone_control_edge_leaves_loop_open() {
        let m = model_from(
            r#"
model "toy"
node a stage=IG kind=technical "a"
node b stage=IG kind=technical "b"
edge control a -> b
"#,
        );
        let findings = control_loop_audit(&m);
        assert_eq!(findings.controllers_without_feedback, vec![id("a")]);
        assert!(findings.unreachable_nodes.is_empty());
        assert!(findings.cross_stage_edges.is_empty());
    }

    #[test]
    fn direct_feedback_closes_the_loop() {
        let m = model_from(
            r#"
model "toy"
node a stage=IG kind=technical "a"
node b stage=IG kind=technical "b"
edge control a -> b
edge feedback b -> a
"#,
        );
        assert!(control_loop_audit(&m).controllers_without_feedback.is_empty());
    }

    #[test]
    fn indirect_feedback_through_an_intermediate_counts() {
        let m = model_from(
            r#"
model "toy"
node a stage=IG kind=technical "a"
node b stage=IG kind=technical "b"
node c stage=IG kind=technical "c"
edge control a -> b
edge control b -> c
edge feedback c -> a
"#,
        );
        assert!(control_loop_audit(&m).controllers_without_feedback.is_empty());
    }

    #[test]
    fn control_only_cycle_does_not_close_the_loop() {
        let m = model_from(
            r#"
model "toy"
node a stage=IG kind=technical "a"
node b stage=IG kind=technical "b"
edge control a -> b
edge control b -> a
"#,
        );
        let findings = control_loop_audit(&m);
        assert_eq!(findings.controllers_without_feedback, vec![id("a"), id("b")]);
    }

    #[test]
    fn isolated_nodes_and_cross_stage_edges_are_reported() {
        let m = model_from(
            r#"
model "toy"
node a stage=IG kind=technical "a"
node b stage=DP kind=technical "b"
node lonely stage=VF kind=human "nobody talks to me"
edge control a -> b
edge feedback b -> a
"#,
        );
        let findings = control_loop_audit(&m);
        assert_eq!(findings.unreachable_nodes, vec![id("lonely")]);
        assert_eq!(findings.cross_stage_edges.len(), 2);
    }
}
