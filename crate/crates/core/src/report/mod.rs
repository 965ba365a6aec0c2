//! Deterministic report artifacts: structured data, pipe tables, and a
//! graph-description export of the control structure.
//!
//! All three exporters are pure functions — byte-identical output for
//! identical input. The bundle metadata carries the tool version and a
//! cryptographic digest of the canonical model text; it deliberately
//! excludes timestamps so reports diff cleanly.

mod graph;
mod structured;
mod tables;

pub use graph::{export_graph, validate_dot};
pub use structured::{export_structured, import_structured, ImportError};
pub use tables::render_tables;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::analysis::{
    control_loop_audit, coverage_metrics, traceability_audit, uca_worksheet, CoverageMetrics,
    LoopFindings, TraceAudit, UcaWorksheet,
};
use crate::dsl::render_canonical;
use crate::model::SafetyModel;

/// Generation metadata. No timestamps: two runs over the same input must
/// produce the same bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportMeta {
    pub tool_version: String,
    /// SHA-256 of the canonical model text, lowercase hex.
    pub input_digest: String,
}

/// Everything the exporters need, computed once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportBundle {
    pub model: SafetyModel,
    pub worksheet: UcaWorksheet,
    pub audit: TraceAudit,
    pub coverage: CoverageMetrics,
    pub loop_findings: LoopFindings,
    pub meta: ReportMeta,
}

/// Runs every analysis pass over the model and snapshots the results.
pub fn build_bundle(model: &SafetyModel) -> ReportBundle {
    let canonical = render_canonical(model);
    let digest = Sha256::digest(canonical.as_bytes());
    let input_digest = digest.iter().map(|b| format!("{b:02x}")).collect();
    ReportBundle {
        model: model.clone(),
        worksheet: uca_worksheet(model),
        audit: traceability_audit(model),
        coverage: coverage_metrics(model),
        loop_findings: control_loop_audit(model),
        meta: ReportMeta {
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            input_digest,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_document;
    use crate::model::build_model;

    #[test]
    fn digest_tracks_model_content_not_formatting() {
        let a = build_model(parse_document("model \"m\"\nloss L1 \"x\"").declarations).unwrap();
        let b = build_model(
            parse_document("model \"m\"\n\n# comment\nloss   L1   \"x\"").declarations,
        )
        .unwrap();
        let c = build_model(parse_document("model \"m\"\nloss L1 \"y\"").declarations).unwrap();
        assert_eq!(build_bundle(&a).meta.input_digest, build_bundle(&b).meta.input_digest);
        assert_ne!(build_bundle(&a).meta.input_digest, build_bundle(&c).meta.input_digest);
        assert_eq!(build_bundle(&a).meta.input_digest.len(), 64);
    }
}
