//! Random valid-model generator shared by the round-trip and acceptance
//! suites. All randomness flows through the caller's RNG, so a seeded RNG
//! makes every generated model reproducible.

use rand::seq::SliceRandom;
use rand::Rng;
use ustpa::model::{
    CausalScenario, ControlAction, Declaration, Edge, EdgeKind, FailureMode, Hazard, Identifier,
    LifecycleStage, Loss, Node, NodeKind, SafetyRequirement, Uca,
};

const WORDS: &[&str] = &[
    "sensor", "input", "late", "missing", "stale", "update", "command", "drift", "fusion",
    "label", "noise", "bound", "limit", "check", "replay", "export", "signal", "budget",
    "gate", "window",
];

fn ident(text: String) -> Identifier {
    Identifier::new(text).expect("generated identifier is valid")
}

/// A short phrase; occasionally ends in one of the two escapable
/// characters so rendering and re-lexing of escapes gets exercised.
fn phrase(rng: &mut impl Rng) -> String {
    let count = rng.random_range(2..=5);
    let mut out = String::new();
    for i in 0..count {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(WORDS[rng.random_range(0..WORDS.len())]);
    }
    match rng.random_range(0..12) {
        0 => out.push('"'),
        1 => out.push('\\'),
        _ => {}
    }
    out
}

/// A random non-empty, duplicate-free subset of `pool`, in pool order.
fn subset(rng: &mut impl Rng, pool: &[Identifier]) -> Vec<Identifier> {
    loop {
        let picked: Vec<Identifier> =
            pool.iter().filter(|_| rng.random_bool(0.4)).cloned().collect();
        if !picked.is_empty() {
            return picked;
        }
    }
}

fn stage(rng: &mut impl Rng) -> LifecycleStage {
    LifecycleStage::ALL[rng.random_range(0..LifecycleStage::ALL.len())]
}

/// Builds a random declaration list that satisfies every validation rule:
/// unique ids, resolving references, non-empty duplicate-free link sets, no
/// self-loop edges, scenario stages matching their UCA's controller stage,
/// and unique (action, mode, description) triples.
pub fn random_declarations(rng: &mut impl Rng) -> Vec<Declaration> {
    let mut decls =
        vec![Declaration::Model { name: format!("Model {}", rng.random_range(0..10_000)) }];

    let losses: Vec<Identifier> =
        (1..=rng.random_range(1..=5)).map(|i| ident(format!("L{i}"))).collect();
    for id in &losses {
        decls.push(Declaration::Loss(Loss {
            id: id.clone(),
            description: phrase(rng),
            safety_critical: rng.random_bool(0.7),
        }));
    }

    let hazards: Vec<Identifier> =
        (1..=rng.random_range(0..=5)).map(|i| ident(format!("H{i}"))).collect();
    for id in &hazards {
        decls.push(Declaration::Hazard(Hazard {
            id: id.clone(),
            description: phrase(rng),
            losses: subset(rng, &losses),
        }));
    }

    let node_count = rng.random_range(0..=8);
    let mut node_stages: Vec<(Identifier, LifecycleStage)> = Vec::new();
    for i in 1..=node_count {
        let id = ident(format!("N{i}"));
        let node_stage = stage(rng);
        decls.push(Declaration::Node(Node {
            id: id.clone(),
            stage: node_stage,
            kind: if rng.random_bool(0.3) { NodeKind::Human } else { NodeKind::Technical },
            label: phrase(rng),
        }));
        node_stages.push((id, node_stage));
    }

    if node_stages.len() >= 2 {
        for _ in 0..rng.random_range(0..=2 * node_stages.len()) {
            let from = rng.random_range(0..node_stages.len());
            let mut to = rng.random_range(0..node_stages.len() - 1);
            if to >= from {
                to += 1;
            }
            decls.push(Declaration::Edge(Edge {
                kind: if rng.random_bool(0.3) { EdgeKind::Feedback } else { EdgeKind::Control },
                from: node_stages[from].0.clone(),
                to: node_stages[to].0.clone(),
                label: if rng.random_bool(0.5) { phrase(rng) } else { String::new() },
            }));
        }
    }

    let mut action_stages: Vec<(Identifier, LifecycleStage)> = Vec::new();
    if !node_stages.is_empty() {
        for i in 1..=rng.random_range(0..=6) {
            let id = ident(format!("CA{i}"));
            let (controller, controller_stage) =
                node_stages[rng.random_range(0..node_stages.len())].clone();
            decls.push(Declaration::Action(ControlAction {
                id: id.clone(),
                controller,
                name: phrase(rng),
            }));
            action_stages.push((id, controller_stage));
        }
    }

    // Sampling (action, mode) pairs without replacement keeps the
    // (action, mode, description) triples unique even when phrases repeat.
    let mut uca_stages: Vec<(Identifier, LifecycleStage)> = Vec::new();
    if !action_stages.is_empty() && !hazards.is_empty() {
        let mut cells: Vec<(usize, FailureMode)> = (0..action_stages.len())
            .flat_map(|a| FailureMode::ALL.iter().map(move |&m| (a, m)))
            .collect();
        cells.shuffle(rng);
        cells.truncate(rng.random_range(0..=cells.len().min(8)));
        for (i, (action_index, mode)) in cells.into_iter().enumerate() {
            let id = ident(format!("UCA{}", i + 1));
            let (action, action_stage) = action_stages[action_index].clone();
            decls.push(Declaration::Uca(Uca {
                id: id.clone(),
                action,
                mode,
                hazards: subset(rng, &hazards),
                description: phrase(rng),
            }));
            uca_stages.push((id, action_stage));
        }
    }

    let mut scenarios: Vec<Identifier> = Vec::new();
    if !uca_stages.is_empty() {
        for i in 1..=rng.random_range(0..=6) {
            let id = ident(format!("CS{i}"));
            let (uca, uca_stage) = uca_stages[rng.random_range(0..uca_stages.len())].clone();
            decls.push(Declaration::Scenario(CausalScenario {
                id: id.clone(),
                uca,
                stage: uca_stage,
                description: phrase(rng),
            }));
            scenarios.push(id);
        }
    }

    if !scenarios.is_empty() {
        for i in 1..=rng.random_range(0..=4) {
            decls.push(Declaration::Requirement(SafetyRequirement {
                id: ident(format!("SR{i}")),
                scenarios: subset(rng, &scenarios),
                description: phrase(rng),
            }));
        }
    }

    decls
}
