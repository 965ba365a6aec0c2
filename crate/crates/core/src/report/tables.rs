//! Human-readable tabular report: pipe tables, one per artifact class,
//! plus an analysis-findings section.

use std::fmt::Write;

use super::ReportBundle;
use crate::model::{FailureMode, Identifier, LifecycleStage};

/// Renders the five artifact tables (losses, hazards, UCAs, causal
/// scenarios, safety requirements) followed by an "Analysis Findings"
/// section with worksheet gaps, orphans, loop findings, and coverage.
///
/// Header strings are fixed — golden tests depend on them:
///
/// ```text
/// | ID | Description | Safety-Critical |
/// | ID | Description | Losses |
/// | ID | Control Action | Description | Failure Mode | Hazards |
/// | ID | UCA | Stage | Description |
/// | ID | Scenarios | Description |
/// ```
pub fn render_tables(bundle: &ReportBundle) -> String {
    let model = &bundle.model;
    let mut out = String::new();

    if model.name().is_empty() {
        out.push_str("# Safety Analysis Report\n");
    } else {
        let _ = writeln!(out, "# Safety Analysis Report: {}", cell(model.name()));
    }
    let _ = writeln!(out, "\ninput digest: `{}`", bundle.meta.input_digest);

    section(&mut out, "Losses", &["ID", "Description", "Safety-Critical"]);
    for loss in model.losses() {
        row(
            &mut out,
            &[
                loss.id.as_str(),
                &loss.description,
                if loss.safety_critical { "yes" } else { "no" },
            ],
        );
    }

    section(&mut out, "Hazards", &["ID", "Description", "Losses"]);
    for hazard in model.hazards() {
        row(&mut out, &[hazard.id.as_str(), &hazard.description, &id_list(&hazard.losses)]);
    }

    section(
        &mut out,
        "Unsafe Control Actions",
        &["ID", "Control Action", "Description", "Failure Mode", "Hazards"],
    );
    for uca in model.ucas() {
        let action_name = model
            .actions()
            .get(&uca.action)
            .map(|a| a.name.as_str())
            .unwrap_or(uca.action.as_str());
        row(
            &mut out,
            &[
                uca.id.as_str(),
                action_name,
                &uca.description,
                uca.mode.display_name(),
                &id_list(&uca.hazards),
            ],
        );
    }

    section(&mut out, "Causal Scenarios", &["ID", "UCA", "Stage", "Description"]);
    for scenario in model.scenarios() {
        row(
            &mut out,
            &[
                scenario.id.as_str(),
                scenario.uca.as_str(),
                scenario.stage.display_name(),
                &scenario.description,
            ],
        );
    }

    section(&mut out, "Safety Requirements", &["ID", "Scenarios", "Description"]);
    for req in model.requirements() {
        row(&mut out, &[req.id.as_str(), &id_list(&req.scenarios), &req.description]);
    }

    out.push_str("\n## Analysis Findings\n\n");
    let cov = &bundle.coverage;
    let _ = writeln!(out, "- uca mode coverage: {}", cov.uca_mode_coverage);
    let stages = LifecycleStage::ALL
        .iter()
        .map(|s| format!("{}={}", s.tag(), cov.per_stage_uca_counts.get(s).unwrap_or(&0)))
        .collect::<Vec<_>>()
        .join(", ");
    let _ = writeln!(out, "- per-stage ucas: {stages}");
    let modes = FailureMode::ALL
        .iter()
        .map(|m| format!("{}={}", m.token(), cov.per_mode_uca_counts.get(m).unwrap_or(&0)))
        .collect::<Vec<_>>()
        .join(", ");
    let _ = writeln!(out, "- per-mode ucas: {modes}");
    let _ = writeln!(out, "- hazard mitigation: {}", cov.hazard_mitigation_ratio);
    let _ = writeln!(out, "- loss mitigation: {}", cov.loss_mitigation_ratio);
    if !cov.unmitigated_hazards.is_empty() {
        let _ = writeln!(out, "- unmitigated hazards: {}", id_list(&cov.unmitigated_hazards));
    }

    // Worksheet gaps, grouped per control action.
    for worksheet_row in &bundle.worksheet.rows {
        let missing: Vec<&str> = worksheet_row
            .cells
            .iter()
            .filter(|c| c.ucas.is_empty())
            .map(|c| c.mode.token())
            .collect();
        if !missing.is_empty() {
            let _ = writeln!(
                out,
                "- worksheet gaps for {}: {}",
                worksheet_row.action,
                missing.join(", ")
            );
        }
    }

    let audit = &bundle.audit;
    for (label, ids) in [
        ("orphan losses", &audit.orphan_losses),
        ("orphan hazards", &audit.orphan_hazards),
        ("orphan ucas", &audit.orphan_ucas),
        ("orphan scenarios", &audit.orphan_scenarios),
        ("unreached requirements", &audit.unreached_requirements),
    ] {
        if !ids.is_empty() {
            let _ = writeln!(out, "- {label}: {}", id_list(ids));
        }
    }

    let loops = &bundle.loop_findings;
    if !loops.controllers_without_feedback.is_empty() {
        let _ = writeln!(
            out,
            "- controllers without feedback: {}",
            id_list(&loops.controllers_without_feedback)
        );
    }
    if !loops.unreachable_nodes.is_empty() {
        let _ = writeln!(out, "- isolated nodes: {}", id_list(&loops.unreachable_nodes));
    }
    let _ = writeln!(out, "- cross-stage edges: {}", loops.cross_stage_edges.len());

    out
}

fn section(out: &mut String, title: &str, headers: &[&str]) {
    let _ = writeln!(out, "\n## {title}\n");
    row(out, headers);
    let dashes: Vec<&str> = headers.iter().map(|_| "---").collect();
    row(out, &dashes);
}

fn row(out: &mut String, cells: &[&str]) {
    out.push('|');
    for value in cells {
        let _ = write!(out, " {} |", cell(value));
    }
    out.push('\n');
}

/// Escapes pipe characters so free text cannot break the table.
fn cell(text: &str) -> String {
    text.replace('|', "\\|")
}

fn id_list(ids: &[Identifier]) -> String {
    ids.iter().map(Identifier::as_str).collect::<Vec<_>>().join(", ")
}
