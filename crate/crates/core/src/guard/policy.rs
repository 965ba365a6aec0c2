//! Guard policy: the risk-pattern → response mapping plus the two timing
//! parameters, and the policy-file parser.

use std::num::NonZeroU32;

use super::{ResponseLevel, RiskLevel};

/// The decision table and timing parameters of the guard.
///
/// The mapping is total: for every aggregated risk level and every count
/// of sources at that level (1–3) there is a response. The defaults:
///
/// | pattern               | response                |
/// |-----------------------|-------------------------|
/// | nominal (any count)   | continue                |
/// | degraded ×1           | performance_degradation |
/// | degraded ×2, ×3       | functional_escalation   |
/// | critical ×1           | takeover_request        |
/// | critical ×2, ×3       | system_deactivation     |
///
/// plus `hold = 3` (consecutive lower-level steps before one tier of
/// de-escalation) and `persistence = 2` (consecutive critical steps before
/// forced system deactivation).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardPolicy {
    /// `table[level][count_at_max - 1]`.
    table: [[ResponseLevel; 3]; 3],
    hold: NonZeroU32,
    persistence: NonZeroU32,
}

impl Default for GuardPolicy {
    fn default() -> Self {
        use ResponseLevel::*;
        GuardPolicy {
            table: [
                [Continue, Continue, Continue],
                [PerformanceDegradation, FunctionalEscalation, FunctionalEscalation],
                [TakeoverRequest, SystemDeactivation, SystemDeactivation],
            ],
            hold: NonZeroU32::new(3).unwrap(),
            persistence: NonZeroU32::new(2).unwrap(),
        }
    }
}

impl GuardPolicy {
    /// The response for an aggregated `(level, count_at_max)` pattern.
    /// Counts outside 1–3 are clamped.
    pub fn response_for(&self, level: RiskLevel, count_at_max: u8) -> ResponseLevel {
        let count = count_at_max.clamp(1, 3) as usize - 1;
        self.table[level as usize][count]
    }

    pub fn deescalation_hold(&self) -> u32 {
        self.hold.get()
    }

    pub fn deactivation_persistence(&self) -> u32 {
        self.persistence.get()
    }

    /// Overrides one table cell.
    pub fn set_rule(&mut self, level: RiskLevel, count_at_max: u8, response: ResponseLevel) {
        let count = count_at_max.clamp(1, 3) as usize - 1;
        self.table[level as usize][count] = response;
    }

    pub fn set_deescalation_hold(&mut self, hold: NonZeroU32) {
        self.hold = hold;
    }

    pub fn set_deactivation_persistence(&mut self, persistence: NonZeroU32) {
        self.persistence = persistence;
    }
}

/// A malformed policy file.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("policy line {line}: {message}")]
pub struct PolicyParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Int(u64),
    OpenBrace,
    CloseBrace,
    Eq,
    Arrow,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::OpenBrace => f.write_str("`{`"),
            Tok::CloseBrace => f.write_str("`}`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Arrow => f.write_str("`->`"),
        }
    }
}

fn lex_policy(text: &str) -> Result<Vec<(Tok, usize)>, PolicyParseError> {
    let mut tokens = Vec::new();
    let mut line = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                line += 1;
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '{' => {
                tokens.push((Tok::OpenBrace, line));
                chars.next();
            }
            '}' => {
                tokens.push((Tok::CloseBrace, line));
                chars.next();
            }
            '=' => {
                tokens.push((Tok::Eq, line));
                chars.next();
            }
            '-' => {
                chars.next();
                if chars.peek() == Some(&'>') {
                    chars.next();
                    tokens.push((Tok::Arrow, line));
                } else {
                    return Err(PolicyParseError {
                        line,
                        message: "stray `-` (expected `->`)".to_owned(),
                    });
                }
            }
            c if c.is_ascii_digit() => {
                let mut n: u64 = 0;
                while let Some(&d) = chars.peek() {
                    if let Some(digit) = d.to_digit(10) {
                        n = n.saturating_mul(10).saturating_add(u64::from(digit));
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push((Tok::Int(n), line));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut word = String::new();
                while let Some(&w) = chars.peek() {
                    if w.is_ascii_alphanumeric() || w == '_' {
                        word.push(w);
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push((Tok::Word(word), line));
            }
            other => {
                return Err(PolicyParseError {
                    line,
                    message: format!("unexpected character `{other}`"),
                });
            }
        }
    }
    Ok(tokens)
}

/// Parses a policy file.
///
/// Format, in the same statement style as the model DSL:
///
/// ```text
/// policy {
///   hold=3
///   persistence=2
///   rule degraded x2 -> functional_escalation
///   rule critical -> takeover_request      # all counts for that level
/// }
/// ```
///
/// Omitted entries keep their defaults; `rule` lines apply in file order,
/// later lines overriding earlier ones cell by cell. `hold` and
/// `persistence` must be at least 1 and may appear at most once.
pub fn parse_policy(text: &str) -> Result<GuardPolicy, PolicyParseError> {
    let tokens = lex_policy(text)?;
    let mut pos = 0usize;
    let last_line = tokens.last().map(|&(_, l)| l).unwrap_or(1);
    let err = |line: usize, message: String| PolicyParseError { line, message };

    let expect = |want: Tok, pos: &mut usize, what: &str| -> Result<usize, PolicyParseError> {
        match tokens.get(*pos) {
            Some((tok, line)) if *tok == want => {
                *pos += 1;
                Ok(*line)
            }
            Some((tok, line)) => Err(err(*line, format!("expected {what}, found {tok}"))),
            None => Err(err(last_line, format!("expected {what}, found end of input"))),
        }
    };

    expect(Tok::Word("policy".to_owned()), &mut pos, "`policy`")?;
    expect(Tok::OpenBrace, &mut pos, "`{`")?;

    let mut policy = GuardPolicy::default();
    let mut saw_hold = false;
    let mut saw_persistence = false;

    loop {
        match tokens.get(pos) {
            None => return Err(err(last_line, "expected `}` before end of input".to_owned())),
            Some((Tok::CloseBrace, _)) => {
                pos += 1;
                break;
            }
            Some((Tok::Word(w), line)) if w == "hold" || w == "persistence" => {
                let (line, name) = (*line, w.clone());
                pos += 1;
                expect(Tok::Eq, &mut pos, "`=`")?;
                let value = match tokens.get(pos) {
                    Some((Tok::Int(n), _)) => {
                        pos += 1;
                        *n
                    }
                    Some((tok, line)) => {
                        return Err(err(*line, format!("expected an integer, found {tok}")))
                    }
                    None => {
                        return Err(err(last_line, "expected an integer, found end of input".to_owned()))
                    }
                };
                let value = u32::try_from(value)
                    .ok()
                    .and_then(NonZeroU32::new)
                    .ok_or_else(|| err(line, format!("`{name}` must be at least 1")))?;
                let seen = if name == "hold" { &mut saw_hold } else { &mut saw_persistence };
                if *seen {
                    return Err(err(line, format!("duplicate `{name}` entry")));
                }
                *seen = true;
                if name == "hold" {
                    policy.set_deescalation_hold(value);
                } else {
                    policy.set_deactivation_persistence(value);
                }
            }
            Some((Tok::Word(w), line)) if w == "rule" => {
                let line = *line;
                pos += 1;
                let level = match tokens.get(pos) {
                    Some((Tok::Word(w), line)) => RiskLevel::from_token(w).ok_or_else(|| {
                        err(
                            *line,
                            format!(
                                "unknown risk level `{w}`; expected nominal, degraded or critical"
                            ),
                        )
                    })?,
                    _ => return Err(err(line, "expected a risk level after `rule`".to_owned())),
                };
                pos += 1;
                // Optional count selector `x1`..`x3`; without it the rule
                // covers every count for that level.
                let mut counts: Vec<u8> = vec![1, 2, 3];
                if let Some((Tok::Word(w), line)) = tokens.get(pos) {
                    if let Some(rest) = w.strip_prefix('x') {
                        match rest.parse::<u8>() {
                            Ok(n @ 1..=3) => {
                                counts = vec![n];
                                pos += 1;
                            }
                            _ => {
                                return Err(err(
                                    *line,
                                    format!("invalid count selector `{w}`; expected x1, x2 or x3"),
                                ))
                            }
                        }
                    }
                }
                expect(Tok::Arrow, &mut pos, "`->`")?;
                let response = match tokens.get(pos) {
                    Some((Tok::Word(w), line)) => {
                        ResponseLevel::from_token(w).ok_or_else(|| {
                            err(
                                *line,
                                format!(
                                    "unknown response `{w}`; expected continue, \
                                     performance_degradation, functional_escalation, \
                                     takeover_request or system_deactivation"
                                ),
                            )
                        })?
                    }
                    _ => return Err(err(line, "expected a response tier after `->`".to_owned())),
                };
                pos += 1;
                for count in counts {
                    policy.set_rule(level, count, response);
                }
            }
            Some((tok, line)) => {
                return Err(err(
                    *line,
                    format!("expected `hold`, `persistence`, `rule` or `}}`, found {tok}"),
                ))
            }
        }
    }

    if let Some((tok, line)) = tokens.get(pos) {
        return Err(err(*line, format!("unexpected {tok} after `}}`")));
    }
    Ok(policy)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_table_matches_the_documented_patterns() {
        let p = GuardPolicy::default();
        use ResponseLevel::*;
        use RiskLevel::*;
        assert_eq!(p.response_for(Nominal, 3), Continue);
        assert_eq!(p.response_for(Degraded, 1), PerformanceDegradation);
        assert_eq!(p.response_for(Degraded, 2), FunctionalEscalation);
        assert_eq!(p.response_for(Degraded, 3), FunctionalEscalation);
        assert_eq!(p.response_for(Critical, 1), TakeoverRequest);
        assert_eq!(p.response_for(Critical, 2), SystemDeactivation);
        assert_eq!(p.response_for(Critical, 3), SystemDeactivation);
        assert_eq!(p.deescalation_hold(), 3);
        assert_eq!(p.deactivation_persistence(), 2);
    }

    #[test]
    fn parses_overrides_and_keeps_defaults_elsewhere() {
        let text = r#"
# stricter escalation, slower recovery
policy {
  hold=5
  rule degraded x1 -> functional_escalation
  rule critical -> system_deactivation
}
"#;
        let p = parse_policy(text).unwrap();
        assert_eq!(p.deescalation_hold(), 5);
        assert_eq!(p.deactivation_persistence(), 2); // default kept
        use ResponseLevel::*;
        use RiskLevel::*;
        assert_eq!(p.response_for(Degraded, 1), FunctionalEscalation);
        assert_eq!(p.response_for(Degraded, 2), FunctionalEscalation); // default kept
        assert_eq!(p.response_for(Critical, 1), SystemDeactivation);
        assert_eq!(p.response_for(Critical, 3), SystemDeactivation);
    }

    #[test]
    fn single_line_form_parses() {
        let p = parse_policy("policy { hold=3 persistence=2 }").unwrap();
        assert_eq!(p, GuardPolicy::default());
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(parse_policy("").is_err());
        assert!(parse_policy("policy {").is_err());
        assert!(parse_policy("policy { hold=0 }").is_err());
        assert!(parse_policy("policy { hold=1 hold=2 }").is_err());
        assert!(parse_policy("policy { rule sideways -> continue }").is_err());
        assert!(parse_policy("policy { rule degraded x9 -> continue }").is_err());
        assert!(parse_policy("policy { rule degraded -> sideways }").is_err());
        assert!(parse_policy("policy {} trailing").is_err());

        let err = parse_policy("policy {\n  rule degraded -> sideways\n}").unwrap_err();
        assert_eq!(err.line, 2);
    }
}
