//! Trace-file parsing and decision-log formatting.

use super::{MonitorReading, MonitorSource, ResponseDecision, RiskLevel};

/// A malformed trace file.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("trace line {line}: {message}")]
pub struct TraceParseError {
    pub line: usize,
    pub message: String,
}

/// Parses a trace file: one `STEP SOURCE LEVEL` reading per line
/// (e.g. `5 perception degraded`), `#` comments, case-insensitive source
/// and level tokens, steps non-decreasing.
pub fn parse_trace(text: &str) -> Result<Vec<MonitorReading>, TraceParseError> {
    let mut readings: Vec<MonitorReading> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |message: String| TraceParseError { line: line_no, message };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [step, source, level] = fields.as_slice() else {
            return Err(err(format!(
                "expected `STEP SOURCE LEVEL`, found {} field(s)",
                fields.len()
            )));
        };
        let step: u64 =
            step.parse().map_err(|_| err(format!("invalid step `{step}`")))?;
        let source = MonitorSource::from_token(source).ok_or_else(|| {
            err(format!(
                "unknown source `{source}`; expected ego_motion, perception or trajectory"
            ))
        })?;
        let level = RiskLevel::from_token(level).ok_or_else(|| {
            err(format!("unknown level `{level}`; expected nominal, degraded or critical"))
        })?;
        if let Some(prev) = readings.last() {
            if step < prev.step {
                return Err(err(format!(
                    "step {step} goes backwards (previous step {})",
                    prev.step
                )));
            }
        }
        readings.push(MonitorReading { step, source, level });
    }
    Ok(readings)
}

/// The plain-text decision log: one `STEP RESPONSE [TICKETS...]` line per
/// decision, tickets rendered as `source->STAGE`.
///
/// ```text
/// 4 continue
/// 5 takeover_request trajectory->VF
/// ```
pub fn format_decision_log(decisions: &[ResponseDecision]) -> String {
    let mut out = String::new();
    for decision in decisions {
        out.push_str(&decision.step.to_string());
        out.push(' ');
        out.push_str(decision.response.token());
        for ticket in &decision.tickets {
            out.push(' ');
            out.push_str(ticket.source.token());
            out.push_str("->");
            out.push_str(ticket.target_stage.tag());
        }
        out.push('\n');
    }
    out
}

/// The structured form of the decision log: a single JSON document with
/// sorted keys, 2-space indentation and a trailing newline — byte-stable
/// for a given decision list.
pub fn decisions_to_json(decisions: &[ResponseDecision]) -> String {
    let value = serde_json::json!({ "decisions": decisions });
    let mut text = serde_json::to_string_pretty(&value)
        .expect("decision serialization cannot fail");
    text.push('\n');
    text
}
