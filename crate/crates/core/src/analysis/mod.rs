//! Analytical passes over a validated [`SafetyModel`](crate::model::SafetyModel).
//!
//! Each pass is a pure function of the model:
//!
//! - [`uca_worksheet`] — the control-action × failure-mode matrix with
//!   documented cells and explicit gaps.
//! - [`traceability_audit`] — orphan detection at every level of the
//!   loss ← hazard ← UCA ← scenario ← requirement chain.
//! - [`coverage_metrics`] — quantitative coverage over the worksheet and
//!   the mitigation chain, as exact ratios.
//! - [`trace_chain`] — all maximal chain paths from one element, upstream
//!   or downstream.
//! - [`control_loop_audit`] — structural checks on the control graph:
//!   open loops, isolated nodes, cross-stage edges.
//!
//! Worksheet gaps can be waived through a reviewed waiver file
//! ([`parse_waivers`] / [`apply_waivers`]); waivers are always reported,
//! never silent.

mod audit;
mod chain;
mod coverage;
mod loops;
mod ratio;
mod waiver;
mod worksheet;

pub use audit::{traceability_audit, AuditFinding, AuditSeverity, TraceAudit};
pub use chain::{trace_chain, ChainDirection, TraceChain};
pub use coverage::{coverage_metrics, CoverageMetrics};
pub use loops::{control_loop_audit, LoopFindings};
pub use ratio::Ratio;
pub use waiver::{apply_waivers, parse_waivers, Waiver, WaiverOutcome, WaiverParseError};
pub use worksheet::{uca_worksheet, UcaWorksheet, WorksheetCell, WorksheetGap, WorksheetRow};
