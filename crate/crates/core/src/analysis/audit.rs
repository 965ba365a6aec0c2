//! Traceability audit over the loss ← hazard ← UCA ← scenario ← requirement
//! chain.

use serde::Serialize;
use std::collections::HashSet;

use crate::model::{Identifier, SafetyModel};

/// Finding severity. Orphans are warnings — a model is allowed to document
/// a deliberately partial analysis — while broken references are errors
/// (those cannot survive model validation, so an audit of a valid model
/// reports none).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AuditSeverity {
    Warning,
    Error,
}

impl std::fmt::Display for AuditSeverity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AuditSeverity::Warning => "warning",
            AuditSeverity::Error => "error",
        })
    }
}

/// One explanatory record per orphan or gap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditFinding {
    pub severity: AuditSeverity,
    pub id: Identifier,
    pub message: String,
}

/// Orphans at every chain level, in declaration order.
///
/// An element is an orphan when nothing one level upstream (toward
/// requirements) references it; a requirement is unreached when its
/// downstream walk fails to arrive at any loss.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceAudit {
    pub orphan_losses: Vec<Identifier>,
    pub orphan_hazards: Vec<Identifier>,
    pub orphan_ucas: Vec<Identifier>,
    pub orphan_scenarios: Vec<Identifier>,
    pub unreached_requirements: Vec<Identifier>,
    pub findings: Vec<AuditFinding>,
}

impl TraceAudit {
    pub fn has_warnings(&self) -> bool {
        self.findings.iter().any(|f| f.severity == AuditSeverity::Warning)
    }

    pub fn has_errors(&self) -> bool {
        self.findings.iter().any(|f| f.severity == AuditSeverity::Error)
    }
}

/// Audits the chain end to end.
pub fn traceability_audit(model: &SafetyModel) -> TraceAudit {
    let referenced_losses: HashSet<&Identifier> =
        model.hazards().iter().flat_map(|h| &h.losses).collect();
    let referenced_hazards: HashSet<&Identifier> =
        model.ucas().iter().flat_map(|u| &u.hazards).collect();
    let referenced_ucas: HashSet<&Identifier> =
        model.scenarios().iter().map(|s| &s.uca).collect();
    let referenced_scenarios: HashSet<&Identifier> =
        model.requirements().iter().flat_map(|r| &r.scenarios).collect();

    let orphan_losses: Vec<Identifier> = model
        .losses()
        .iter()
        .map(|l| &l.id)
        .filter(|id| !referenced_losses.contains(id))
        .cloned()
        .collect();
    let orphan_hazards: Vec<Identifier> = model
        .hazards()
        .iter()
        .map(|h| &h.id)
        .filter(|id| !referenced_hazards.contains(id))
        .cloned()
        .collect();
    let orphan_ucas: Vec<Identifier> = model
        .ucas()
        .iter()
        .map(|u| &u.id)
        .filter(|id| !referenced_ucas.contains(id))
        .cloned()
        .collect();
    let orphan_scenarios: Vec<Identifier> = model
        .scenarios()
        .iter()
        .map(|s| &s.id)
        .filter(|id| !referenced_scenarios.contains(id))
        .cloned()
        .collect();

    // A requirement reaches losses through scenario -> UCA -> hazard ->
    // loss. In a validated model every link resolves and every link set is
    // non-empty, so this stays empty; it is computed rather than assumed so
    // the audit remains honest if construction invariants ever loosen.
    let unreached_requirements: Vec<Identifier> = model
        .requirements()
        .iter()
        .filter(|req| {
            !req.scenarios.iter().any(|sid| {
                model
                    .scenarios()
                    .get(sid)
                    .and_then(|s| model.ucas().get(&s.uca))
                    .map(|u| {
                        u.hazards.iter().any(|hid| {
                            model.hazards().get(hid).is_some_and(|h| !h.losses.is_empty())
                        })
                    })
                    .unwrap_or(false)
            })
        })
        .map(|req| req.id.clone())
        .collect();

    let mut findings = Vec::new();
    let warn = |findings: &mut Vec<AuditFinding>, id: &Identifier, message: String| {
        findings.push(AuditFinding {
            severity: AuditSeverity::Warning,
            id: id.clone(),
            message,
        });
    };
    for id in &orphan_losses {
        warn(&mut findings, id, format!("loss `{id}` is not referenced by any hazard"));
    }
    for id in &orphan_hazards {
        warn(&mut findings, id, format!("hazard `{id}` is not referenced by any UCA"));
    }
    for id in &orphan_ucas {
        warn(&mut findings, id, format!("UCA `{id}` has no causal scenario"));
    }
    for id in &orphan_scenarios {
        warn(&mut findings, id, format!("scenario `{id}` is not referenced by any requirement"));
    }
    for id in &unreached_requirements {
        warn(&mut findings, id, format!("requirement `{id}` does not reach any loss"));
    }

    TraceAudit {
        orphan_losses,
        orphan_hazards,
        orphan_ucas,
        orphan_scenarios,
        unreached_requirements,
        findings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_document;
    use crate::model::build_model;

    fn model_from(text: &str) -> SafetyModel {
        let doc = parse_document(text);
        assert!(!doc.has_errors(), "{:?}", doc.diagnostics);
        build_model(doc.declarations).unwrap()
    }

    const FULL_CHAIN: &str = r#"
model "toy"
loss L1 "collision"
hazard H1 "violation" losses=[L1]
node ctl stage=IG kind=technical "controller"
action C1 controller=ctl "act"
uca U1 action=C1 mode=not_provided hazards=[H1] "missing action"
scenario S1 uca=U1 stage=IG "why"
requirement R1 scenarios=[S1] "constraint"
"#;

    #[test]
    fn fully_linked_chain_has_no_orphans() {
        let audit = traceability_audit(&model_from(FULL_CHAIN));
        assert!(audit.orphan_losses.is_empty());
        assert!(audit.orphan_hazards.is_empty());
        assert!(audit.orphan_ucas.is_empty());
        assert!(audit.orphan_scenarios.is_empty());
        assert!(audit.unreached_requirements.is_empty());
        assert!(audit.findings.is_empty());
    }

    #[test]
    fn orphans_reported_per_level() {
        let text = r#"
model "toy"
loss L1 "collision"
loss L2 "unreferenced"
hazard H1 "violation" losses=[L1]
hazard H2 "no uca covers this" losses=[L1]
node ctl stage=IG kind=technical "controller"
action C1 controller=ctl "act"
uca U1 action=C1 mode=not_provided hazards=[H1] "missing action"
uca U2 action=C1 mode=mistimed hazards=[H1] "late action"
scenario S1 uca=U1 stage=IG "why"
requirement R1 scenarios=[S1] "constraint"
"#;
        let audit = traceability_audit(&model_from(text));
        assert_eq!(audit.orphan_losses, vec![Identifier::new("L2").unwrap()]);
        assert_eq!(audit.orphan_hazards, vec![Identifier::new("H2").unwrap()]);
        assert_eq!(audit.orphan_ucas, vec![Identifier::new("U2").unwrap()]);
        assert!(audit.orphan_scenarios.is_empty());
        assert_eq!(audit.findings.len(), 3);
        assert!(audit.has_warnings());
        assert!(!audit.has_errors());
    }
}
