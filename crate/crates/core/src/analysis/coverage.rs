//! Quantitative coverage over the worksheet and the mitigation chain.

use serde::Serialize;
use std::collections::{BTreeMap, HashSet};

use super::{uca_worksheet, Ratio};
use crate::model::{FailureMode, Identifier, LifecycleStage, SafetyModel};

/// Coverage numbers for one model.
///
/// The count maps always carry all five stages and all four modes, zeros
/// included, so the report shape is independent of the data. "Mitigated"
/// means chain-reachable: a hazard (loss) counts as mitigated iff some
/// requirement reaches it via scenario → UCA → hazard (→ loss). No
/// strength or adequacy scoring is implied.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageMetrics {
    pub uca_mode_coverage: Ratio,
    pub per_stage_uca_counts: BTreeMap<LifecycleStage, u64>,
    pub per_mode_uca_counts: BTreeMap<FailureMode, u64>,
    pub hazard_mitigation_ratio: Ratio,
    pub loss_mitigation_ratio: Ratio,
    pub unmitigated_hazards: Vec<Identifier>,
}

/// Computes coverage for a valid model.
pub fn coverage_metrics(model: &SafetyModel) -> CoverageMetrics {
    let worksheet = uca_worksheet(model);

    let mut per_stage: BTreeMap<LifecycleStage, u64> =
        LifecycleStage::ALL.iter().map(|&s| (s, 0)).collect();
    let mut per_mode: BTreeMap<FailureMode, u64> =
        FailureMode::ALL.iter().map(|&m| (m, 0)).collect();
    for uca in model.ucas() {
        // stage_of cannot fail here: the UCA's action and its controller
        // resolved during validation.
        let stage = model
            .stage_of(&uca.id)
            .expect("validated UCA resolves to a stage");
        *per_stage.entry(stage).or_default() += 1;
        *per_mode.entry(uca.mode).or_default() += 1;
    }

    // Hazards (and through them losses) reached by some requirement.
    let mut mitigated_hazards: HashSet<&Identifier> = HashSet::new();
    let mut mitigated_losses: HashSet<&Identifier> = HashSet::new();
    for requirement in model.requirements() {
        for sid in &requirement.scenarios {
            let Some(scenario) = model.scenarios().get(sid) else { continue };
            let Some(uca) = model.ucas().get(&scenario.uca) else { continue };
            for hid in &uca.hazards {
                mitigated_hazards.insert(hid);
                if let Some(hazard) = model.hazards().get(hid) {
                    mitigated_losses.extend(&hazard.losses);
                }
            }
        }
    }

    let unmitigated_hazards: Vec<Identifier> = model
        .hazards()
        .iter()
        .map(|h| &h.id)
        .filter(|id| !mitigated_hazards.contains(id))
        .cloned()
        .collect();

    let hazard_total = model.hazards().len() as u64;
    let loss_total = model.losses().len() as u64;
    CoverageMetrics {
        uca_mode_coverage: worksheet.coverage(),
        per_stage_uca_counts: per_stage,
        per_mode_uca_counts: per_mode,
        hazard_mitigation_ratio: Ratio::new(
            hazard_total - unmitigated_hazards.len() as u64,
            hazard_total,
        ),
        loss_mitigation_ratio: Ratio::new(
            model
                .losses()
                .iter()
                .filter(|l| mitigated_losses.contains(&l.id))
                .count() as u64,
            loss_total,
        ),
        unmitigated_hazards,
    }
}
