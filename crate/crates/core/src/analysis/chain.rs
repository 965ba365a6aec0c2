//! Chain queries: all maximal traceability paths from one element.

use serde::Serialize;

use crate::model::{Identifier, SafetyModel, UnknownId};

/// Walk direction on the chain loss ← hazard ← UCA ← scenario ← requirement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainDirection {
    /// Toward requirements.
    Upstream,
    /// Toward losses.
    Downstream,
}

impl std::fmt::Display for ChainDirection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ChainDirection::Upstream => "upstream",
            ChainDirection::Downstream => "downstream",
        })
    }
}

/// All maximal paths from `origin` in one direction.
///
/// Every path starts at the origin and extends until no further link
/// exists; a path that dead-ends before the chain boundary (at an orphan)
/// is still reported, truncated where it stopped. Origins with no link in
/// the chosen direction yield an empty path set. The chain is acyclic by
/// construction, so no cycle handling is needed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceChain {
    pub origin: Identifier,
    pub direction: ChainDirection,
    pub paths: Vec<Vec<Identifier>>,
}

impl TraceChain {
    /// Deduplicated endpoints of all paths, in path order.
    pub fn terminals(&self) -> Vec<Identifier> {
        let mut out: Vec<Identifier> = Vec::new();
        for path in &self.paths {
            if let Some(last) = path.last() {
                if !out.contains(last) {
                    out.push(last.clone());
                }
            }
        }
        out
    }
}

/// Enumerates maximal chain paths from `origin`.
///
/// Neighbor expansion follows declaration order, so the path list is
/// deterministic. Ids outside the chain (nodes, actions) are unknown to
/// this query, as are undeclared ids.
pub fn trace_chain(
    model: &SafetyModel,
    origin: &Identifier,
    direction: ChainDirection,
) -> Result<TraceChain, UnknownId> {
    // Validate the origin up front so the error names it rather than a
    // mid-walk id.
    model.chain_neighbors(origin)?;

    let mut paths = Vec::new();
    let mut stack = vec![origin.clone()];
    walk(model, direction, &mut stack, &mut paths);
    Ok(TraceChain { origin: origin.clone(), direction, paths })
}

fn walk(
    model: &SafetyModel,
    direction: ChainDirection,
    stack: &mut Vec<Identifier>,
    paths: &mut Vec<Vec<Identifier>>,
) {
    let here = stack.last().expect("walk starts with the origin on the stack");
    let neighbors = model
        .chain_neighbors(here)
        .expect("chain walk only visits resolved ids");
    let next = match direction {
        ChainDirection::Upstream => neighbors.upstream,
        ChainDirection::Downstream => neighbors.downstream,
    };
    if next.is_empty() {
        // Maximal. Single-element "paths" (the origin itself is a terminal)
        // are not reported; a chain query asks where you can go, not where
        // you are.
        if stack.len() > 1 {
            paths.push(stack.clone());
        }
        return;
    }
    for id in next {
        stack.push(id);
        walk(model, direction, stack, paths);
        stack.pop();
    }
}
