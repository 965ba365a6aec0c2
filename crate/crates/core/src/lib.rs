//! Lifecycle-wide STPA safety analysis as code.
//!
//! This crate turns a textual safety model — losses, hazards, a control
//! structure spanning the machine-learning lifecycle, unsafe control
//! actions, causal scenarios, and safety requirements — into a validated
//! in-memory graph, and offers analysis passes, deterministic report
//! exports, and a runtime safety-guard simulator on top of it.
//!
//! The pipeline is:
//!
//! 1. [`dsl::parse_document`] — text to declarations, with recoverable
//!    diagnostics carrying line/column spans.
//! 2. [`model::build_model`] — declarations to a [`model::SafetyModel`],
//!    enforcing referential integrity and uniqueness.
//! 3. [`analysis`] — UCA worksheets, traceability audits, coverage
//!    metrics, trace chains, and control-loop audits over the model.
//! 4. [`report`] — structured (JSON), table (Markdown), and graph (DOT)
//!    exports, all byte-stable for a given model.
//! 5. [`guard`] — a deterministic runtime monitor/response simulator
//!    driven by risk readings, with hysteresis and feedback routing.
//!
//! All analyses are pure functions of the model; no pass mutates it.

pub mod analysis;
pub mod cli;
pub mod dsl;
pub mod guard;
pub mod model;
pub mod report;

pub use dsl::{parse_document, tokenize, ModelDocument, ParseDiagnostic, Severity, SourceSpan};
pub use model::{build_model, SafetyModel, ValidationError, ValidationFailure};
