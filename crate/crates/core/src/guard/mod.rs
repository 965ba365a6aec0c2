//! Runtime safety guard: monitor readings in, tiered response decisions and
//! feedback tickets out.
//!
//! Three monitors (ego motion, perception, trajectory) report discrete risk
//! levels at integer steps. Each step, the guard aggregates the effective
//! levels (missing readings hold the last observed value, initially
//! nominal), maps the aggregate through the policy table, and updates its
//! response tier:
//!
//! - escalation is immediate;
//! - de-escalation drops at most one tier after `hold` consecutive steps
//!   whose computed level sits below the current tier (hysteresis);
//! - critical risk sustained for `persistence` consecutive steps forces
//!   system deactivation;
//! - system deactivation is absorbing for the rest of the trace.
//!
//! Every source at degraded or worse additionally raises a
//! [`FeedbackTicket`] routed to the lifecycle stage that can fix it
//! (ego motion → data preparation, perception → closed loop training,
//! trajectory → verification).
//!
//! Everything here is deterministic: replaying a trace against a policy
//! always yields the same decision list.

mod policy;
mod trace;

pub use policy::{parse_policy, GuardPolicy, PolicyParseError};
pub use trace::{
    decisions_to_json, format_decision_log, parse_trace, TraceParseError,
};

use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

use crate::model::LifecycleStage;

/// The three runtime monitors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum MonitorSource {
    #[serde(rename = "ego_motion")]
    EgoMotion,
    #[serde(rename = "perception")]
    Perception,
    #[serde(rename = "trajectory")]
    Trajectory,
}

impl MonitorSource {
    pub const ALL: [MonitorSource; 3] =
        [MonitorSource::EgoMotion, MonitorSource::Perception, MonitorSource::Trajectory];

    pub fn token(self) -> &'static str {
        match self {
            MonitorSource::EgoMotion => "ego_motion",
            MonitorSource::Perception => "perception",
            MonitorSource::Trajectory => "trajectory",
        }
    }

    /// Case-insensitive token lookup (trace files are case-insensitive).
    pub fn from_token(token: &str) -> Option<Self> {
        let lower = token.to_ascii_lowercase();
        Self::ALL.into_iter().find(|s| s.token() == lower)
    }
}

impl fmt::Display for MonitorSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Discrete risk level reported by a monitor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RiskLevel {
    Nominal,
    Degraded,
    Critical,
}

impl RiskLevel {
    pub const ALL: [RiskLevel; 3] = [RiskLevel::Nominal, RiskLevel::Degraded, RiskLevel::Critical];

    pub fn token(self) -> &'static str {
        match self {
            RiskLevel::Nominal => "nominal",
            RiskLevel::Degraded => "degraded",
            RiskLevel::Critical => "critical",
        }
    }

    pub fn from_token(token: &str) -> Option<Self> {
        let lower = token.to_ascii_lowercase();
        Self::ALL.into_iter().find(|l| l.token() == lower)
    }
}

impl fmt::Display for RiskLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Tiered response, severity-ascending. `Continue` is the explicit
/// no-action tier below the four intervention tiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseLevel {
    Continue,
    PerformanceDegradation,
    FunctionalEscalation,
    TakeoverRequest,
    SystemDeactivation,
}

impl ResponseLevel {
    pub const ALL: [ResponseLevel; 5] = [
        ResponseLevel::Continue,
        ResponseLevel::PerformanceDegradation,
        ResponseLevel::FunctionalEscalation,
        ResponseLevel::TakeoverRequest,
        ResponseLevel::SystemDeactivation,
    ];

    pub fn token(self) -> &'static str {
        match self {
            ResponseLevel::Continue => "continue",
            ResponseLevel::PerformanceDegradation => "performance_degradation",
            ResponseLevel::FunctionalEscalation => "functional_escalation",
            ResponseLevel::TakeoverRequest => "takeover_request",
            ResponseLevel::SystemDeactivation => "system_deactivation",
        }
    }

    pub fn from_token(token: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.token() == token)
    }

    /// One tier less severe; `Continue` stays `Continue`.
    fn step_down(self) -> ResponseLevel {
        match self {
            ResponseLevel::Continue => ResponseLevel::Continue,
            ResponseLevel::PerformanceDegradation => ResponseLevel::Continue,
            ResponseLevel::FunctionalEscalation => ResponseLevel::PerformanceDegradation,
            ResponseLevel::TakeoverRequest => ResponseLevel::FunctionalEscalation,
            ResponseLevel::SystemDeactivation => ResponseLevel::TakeoverRequest,
        }
    }
}

impl fmt::Display for ResponseLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// One monitor report at one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MonitorReading {
    pub step: u64,
    pub source: MonitorSource,
    pub level: RiskLevel,
}

/// A routed improvement ticket, raised whenever a source reports degraded
/// or worse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeedbackTicket {
    pub step: u64,
    pub source: MonitorSource,
    pub target_stage: LifecycleStage,
    pub note: String,
}

/// The guard's output for one step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResponseDecision {
    pub step: u64,
    pub response: ResponseLevel,
    /// Sources whose effective level equals the aggregated maximum, in
    /// fixed source order.
    pub triggering_sources: Vec<MonitorSource>,
    pub tickets: Vec<FeedbackTicket>,
}

/// Mutable guard state across steps of one simulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardState {
    last_levels: BTreeMap<MonitorSource, RiskLevel>,
    current_response: ResponseLevel,
    hold_counter: u32,
    critical_streak: u32,
    last_step: Option<u64>,
}

impl GuardState {
    pub fn new() -> Self {
        GuardState {
            last_levels: MonitorSource::ALL.iter().map(|&s| (s, RiskLevel::Nominal)).collect(),
            current_response: ResponseLevel::Continue,
            hold_counter: 0,
            critical_streak: 0,
            last_step: None,
        }
    }

    pub fn current_response(&self) -> ResponseLevel {
        self.current_response
    }

    /// The last observed level per source (initially all nominal).
    pub fn last_levels(&self) -> &BTreeMap<MonitorSource, RiskLevel> {
        &self.last_levels
    }

    pub fn hold_counter(&self) -> u32 {
        self.hold_counter
    }

    pub fn critical_streak(&self) -> u32 {
        self.critical_streak
    }
}

impl Default for GuardState {
    fn default() -> Self {
        Self::new()
    }
}

/// Step-ordering violations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GuardError {
    #[error("reading {index} rewinds to step {found}: the guard already processed step {current}")]
    NonMonotonicStep { index: usize, current: u64, found: u64 },
    #[error("readings for one decision mix steps {first} and {second}")]
    MixedStepReadings { first: u64, second: u64 },
    #[error("decide_step called with no readings")]
    NoReadings,
}

/// Maximum level across all sources and how many sources sit at it.
///
/// Sources absent from the map count as nominal (the guard's initial
/// assumption).
pub fn aggregate_risk(levels: &BTreeMap<MonitorSource, RiskLevel>) -> (RiskLevel, u8) {
    let max = MonitorSource::ALL
        .iter()
        .map(|s| levels.get(s).copied().unwrap_or(RiskLevel::Nominal))
        .max()
        .expect("there are three sources");
    let count = MonitorSource::ALL
        .iter()
        .filter(|s| levels.get(s).copied().unwrap_or(RiskLevel::Nominal) == max)
        .count() as u8;
    (max, count)
}

/// Fixed routing of monitor findings to the lifecycle stage that can
/// address them.
pub fn route_feedback(source: MonitorSource) -> LifecycleStage {
    match source {
        MonitorSource::EgoMotion => LifecycleStage::DataPreparation,
        MonitorSource::Perception => LifecycleStage::ClosedLoopTraining,
        MonitorSource::Trajectory => LifecycleStage::Verification,
    }
}

/// Advances the guard by one step.
///
/// `readings` must be non-empty, share a single step value, and that step
/// must not precede any previously processed step. Absent sources hold
/// their last level. See the module docs for the escalation /
/// de-escalation / absorption rules.
pub fn decide_step(
    state: &mut GuardState,
    policy: &GuardPolicy,
    readings: &[MonitorReading],
) -> Result<ResponseDecision, GuardError> {
    let step = readings.first().ok_or(GuardError::NoReadings)?.step;
    for (index, reading) in readings.iter().enumerate() {
        if reading.step != step {
            return Err(GuardError::MixedStepReadings { first: step, second: reading.step });
        }
        if let Some(last) = state.last_step {
            if reading.step < last {
                return Err(GuardError::NonMonotonicStep {
                    index,
                    current: last,
                    found: reading.step,
                });
            }
        }
    }
    state.last_step = Some(step);

    // Later readings for the same source within one step win.
    for reading in readings {
        state.last_levels.insert(reading.source, reading.level);
    }

    let (max_level, count_at_max) = aggregate_risk(&state.last_levels);
    if max_level == RiskLevel::Critical {
        state.critical_streak += 1;
    } else {
        state.critical_streak = 0;
    }

    let mut computed = policy.response_for(max_level, count_at_max);
    if state.critical_streak >= policy.deactivation_persistence() {
        computed = ResponseLevel::SystemDeactivation;
    }

    if state.current_response == ResponseLevel::SystemDeactivation {
        // Absorbing: nothing below deactivation is reachable any more.
    } else if computed > state.current_response {
        state.current_response = computed;
        state.hold_counter = 0;
    } else if computed == state.current_response {
        state.hold_counter = 0;
    } else {
        state.hold_counter += 1;
        if state.hold_counter >= policy.deescalation_hold() {
            state.current_response = state.current_response.step_down();
            state.hold_counter = 0;
        }
    }

    let triggering_sources: Vec<MonitorSource> = MonitorSource::ALL
        .iter()
        .copied()
        .filter(|s| state.last_levels[s] == max_level)
        .collect();
    let tickets: Vec<FeedbackTicket> = MonitorSource::ALL
        .iter()
        .copied()
        .filter(|s| state.last_levels[s] >= RiskLevel::Degraded)
        .map(|source| FeedbackTicket {
            step,
            source,
            target_stage: route_feedback(source),
            note: format!("{} reported {}", source, state.last_levels[&source]),
        })
        .collect();

    Ok(ResponseDecision {
        step,
        response: state.current_response,
        triggering_sources,
        tickets,
    })
}

/// Replays a whole trace from a fresh state: one decision per distinct
/// step, in order.
pub fn simulate_trace(
    trace: &[MonitorReading],
    policy: &GuardPolicy,
) -> Result<Vec<ResponseDecision>, GuardError> {
    // Validate monotonicity up front so the error carries the global
    // reading index rather than a per-group one.
    for (index, pair) in trace.windows(2).enumerate() {
        if pair[1].step < pair[0].step {
            return Err(GuardError::NonMonotonicStep {
                index: index + 1,
                current: pair[0].step,
                found: pair[1].step,
            });
        }
    }

    let mut state = GuardState::new();
    let mut decisions = Vec::new();
    let mut rest = trace;
    while let Some(first) = rest.first() {
        let group_len = rest.iter().take_while(|r| r.step == first.step).count();
        let (group, tail) = rest.split_at(group_len);
        decisions.push(decide_step(&mut state, policy, group)?);
        rest = tail;
    }
    Ok(decisions)
}
