//! Worksheet gap waivers.
//!
//! An undocumented worksheet cell can be waived through a reviewed waiver
//! file so coverage can legitimately reach 1.0. Waivers are applied against
//! the worksheet and always reported — matched, redundant, or unknown —
//! never silently dropped.

use serde::Serialize;

use super::{Ratio, UcaWorksheet, WorksheetGap};
use crate::model::{FailureMode, Identifier};

/// One waiver line: this (action, mode) cell is intentionally undocumented.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Waiver {
    pub action: Identifier,
    pub mode: FailureMode,
    pub reason: String,
}

/// The result of applying a waiver list to a worksheet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WaiverOutcome {
    /// Waivers that matched an undocumented cell.
    pub waived: Vec<Waiver>,
    /// Waivers whose cell is documented (or already waived) — harmless,
    /// but worth cleaning up.
    pub redundant: Vec<Waiver>,
    /// Waivers naming an action the model does not declare.
    pub unknown_action: Vec<Waiver>,
    /// Gaps no waiver covered.
    pub remaining_gaps: Vec<WorksheetGap>,
}

impl WaiverOutcome {
    /// Coverage counting waived cells as handled.
    pub fn effective_coverage(&self, sheet: &UcaWorksheet) -> Ratio {
        Ratio::new(
            (sheet.documented_count() + self.waived.len()) as u64,
            sheet.cell_count() as u64,
        )
    }
}

/// A malformed waiver file line.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("waiver line {line}: {message}")]
pub struct WaiverParseError {
    pub line: usize,
    pub message: String,
}

/// Parses a waiver file: one `ACTION_ID MODE "reason"` per line, `#`
/// comments and blank lines allowed.
pub fn parse_waivers(text: &str) -> Result<Vec<Waiver>, WaiverParseError> {
    let mut waivers = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| WaiverParseError { line: line_no, message };

        let mut parts = line.splitn(3, char::is_whitespace);
        let action_text = parts.next().unwrap_or_default();
        let action = Identifier::new(action_text)
            .map_err(|_| err(format!("invalid action id `{action_text}`")))?;
        let mode_text = parts
            .next()
            .ok_or_else(|| err("expected `ACTION_ID MODE \"reason\"`".to_owned()))?;
        let mode = FailureMode::from_token(mode_text).ok_or_else(|| {
            err(format!(
                "unknown failure mode `{mode_text}`; expected one of not_provided, \
                 provided_improperly, mistimed, inappropriate_duration"
            ))
        })?;
        let rest = parts.next().map(str::trim_start).unwrap_or_default();
        let reason = parse_reason(rest).map_err(err)?;
        waivers.push(Waiver { action, mode, reason });
    }
    Ok(waivers)
}

fn parse_reason(rest: &str) -> Result<String, String> {
    let mut chars = rest.chars();
    if chars.next() != Some('"') {
        return Err("expected a quoted reason".to_owned());
    }
    let mut reason = String::new();
    loop {
        match chars.next() {
            None => return Err("unterminated reason string".to_owned()),
            Some('"') => break,
            Some('\\') => match chars.next() {
                Some('"') => reason.push('"'),
                Some('\\') => reason.push('\\'),
                other => {
                    return Err(format!(
                        "unknown escape `\\{}` in reason",
                        other.map(String::from).unwrap_or_default()
                    ))
                }
            },
            Some(c) => reason.push(c),
        }
    }
    let trailing = chars.as_str().trim();
    if !trailing.is_empty() {
        return Err(format!("unexpected trailing text `{trailing}` after reason"));
    }
    Ok(reason)
}

/// Applies waivers to a worksheet, classifying every waiver.
pub fn apply_waivers(sheet: &UcaWorksheet, waivers: &[Waiver]) -> WaiverOutcome {
    let mut waived: Vec<Waiver> = Vec::new();
    let mut redundant = Vec::new();
    let mut unknown_action = Vec::new();

    for waiver in waivers {
        let Some(row) = sheet.rows.iter().find(|r| r.action == waiver.action) else {
            unknown_action.push(waiver.clone());
            continue;
        };
        let cell = row
            .cells
            .iter()
            .find(|c| c.mode == waiver.mode)
            .expect("every row carries all four modes");
        let already =
            waived.iter().any(|w| w.action == waiver.action && w.mode == waiver.mode);
        if cell.ucas.is_empty() && !already {
            waived.push(waiver.clone());
        } else {
            redundant.push(waiver.clone());
        }
    }

    let remaining_gaps = sheet
        .gaps
        .iter()
        .filter(|gap| {
            !waived.iter().any(|w| w.action == gap.action && w.mode == gap.mode)
        })
        .cloned()
        .collect();

    WaiverOutcome { waived, redundant, unknown_action, remaining_gaps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::uca_worksheet;
    use crate::dsl::parse_document;
    use crate::model::build_model;

    #[test]
    fn parses_comments_blanks_and_escapes() {
        let text = r#"
# reviewed 2024-11-02
CA-1 not_provided "covered by interlock"

CA-2 mistimed "timing is \"bounded\" by design"
"#;
        let waivers = parse_waivers(text).unwrap();
        assert_eq!(waivers.len(), 2);
        assert_eq!(waivers[0].mode, FailureMode::NotProvided);
        assert_eq!(waivers[1].reason, "timing is \"bounded\" by design");
    }

    #[test]
    fn rejects_bad_mode_and_missing_reason() {
        let err = parse_waivers("CA-1 sideways \"zip\"").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.message.contains("sideways"));
        assert!(err.message.contains("not_provided"));

        let err = parse_waivers("\nCA-1 mistimed").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("quoted reason"));
    }

    #[test]
    fn classifies_waivers_and_recomputes_coverage() {
        let text = r#"
model "toy"
loss L1 "one"
hazard H1 "h" losses=[L1]
node n stage=IG kind=technical "n"
action CA-1 controller=n "act"
uca U1 action=CA-1 mode=not_provided hazards=[H1] "missing"
"#;
        let doc = parse_document(text);
        let model = build_model(doc.declarations).unwrap();
        let sheet = uca_worksheet(&model);
        assert_eq!(sheet.gaps.len(), 3);

        let waivers = parse_waivers(
            "CA-1 not_provided \"already documented\"\n\
             CA-1 mistimed \"reviewed\"\n\
             CA-9 mistimed \"no such action\"\n",
        )
        .unwrap();
        let outcome = apply_waivers(&sheet, &waivers);
        assert_eq!(outcome.waived.len(), 1);
        assert_eq!(outcome.redundant.len(), 1);
        assert_eq!(outcome.unknown_action.len(), 1);
        assert_eq!(outcome.remaining_gaps.len(), 2);
        assert_eq!(outcome.effective_coverage(&sheet), Ratio::new(2, 4));
    }
}
