//! Alternating-offers stage game: Rubinstein wages inside each period and
//! the reduced-form screening objects they imply.

use crate::error::{Error, Result};
use crate::model::{expected_observers, EPS, ModelParams, SharingMatrix, WageProfile, WorkerId, WorkerSet};
use crate::payoff::check_profile;

/// Complete-information wage `w(s) = s(1-δ)/(1-δ²)` of a proposing worker.
pub fn rubinstein_wage(s: f64, params: &ModelParams) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::DomainError(format!("output {s} must be positive")));
    }
    Ok(rubinstein(s, params.delta))
}

pub(crate) fn rubinstein(s: f64, delta: f64) -> f64 {
    s * (1.0 - delta) / (1.0 - delta * delta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RubinsteinWages {
    pub w_low: f64,
    pub w_high: f64,
    /// Highest second-period offer the high type accepts from a screening worker.
    pub w_h: f64,
    /// Highest first-period offer the high type accepts when acceptance reveals it.
    pub w_h1: f64,
}

impl RubinsteinWages {
    pub fn new(params: &ModelParams) -> Self {
        let d = params.delta;
        let w_low = rubinstein(params.s_low, d);
        let w_high = rubinstein(params.s_high, d);
        let w_h = (1.0 - d) * params.s_high + d * d * w_low;
        let w_h1 = w_h - params.beta * (w_high - w_low);
        RubinsteinWages { w_low, w_high, w_h, w_h1 }
    }

    /// Value `V_S(q)` of screening in the second period at belief `q`.
    pub fn screen_value(&self, q: f64, delta: f64) -> f64 {
        q * self.w_h + (1.0 - q) * delta * delta * self.w_low
    }

    /// Uninformed worker screens in the second period iff `q·w(s'') ≥ w(s')`.
    pub fn screens(&self, q: f64) -> bool {
        q * self.w_high >= self.w_low - EPS
    }

    /// Second-period value `V₂` of an uninformed worker at belief `q`.
    pub fn uninformed_value(&self, q: f64, delta: f64) -> f64 {
        if self.screens(q) {
            self.screen_value(q, delta)
        } else {
            self.w_low
        }
    }
}

/// `(w_h, V_S(q), screens)` of the second-period screening problem.
pub fn p2_screen_values(q: f64, params: &ModelParams) -> (f64, f64, bool) {
    let rw = RubinsteinWages::new(params);
    (rw.w_h, rw.screen_value(q, params.delta), rw.screens(q))
}

pub fn p1_separating_wage(params: &ModelParams) -> f64 {
    RubinsteinWages::new(params).w_h1
}

/// High-type value `U₂(s'')` from a worker who learned nothing in the first period.
pub fn u2_high_alt(params: &ModelParams) -> f64 {
    let rw = RubinsteinWages::new(params);
    if rw.screens(params.p) {
        params.s_high - rw.w_h
    } else {
        params.s_high - rw.w_low
    }
}

/// High-type payoff `π(A|C,ω)` when every negotiation is an alternating-offers game.
pub fn firm_payoff_alt(
    accepted: WorkerSet,
    screening: WorkerSet,
    offers: &WageProfile,
    params: &ModelParams,
    m: &SharingMatrix,
) -> Result<f64> {
    check_profile(accepted, screening, offers)?;
    let rw = RubinsteinWages::new(params);
    let (beta, delta, s2) = (params.beta, params.delta, params.s_high);
    let u2 = u2_high_alt(params);
    let rejected = screening.difference(accepted);
    let revealed = s2 - rw.w_high;
    let passed = s2 - rw.w_low;

    let first: f64 = accepted.iter().map(|i| s2 - offers.wage(i) + beta * revealed).sum();
    let outsiders: f64 = m
        .all()
        .difference(screening)
        .iter()
        .map(|j| {
            let pa = m.observe(j, accepted);
            let pr = m.observe(j, rejected);
            passed + beta * (pa * revealed + (1.0 - pa) * (pr * passed + (1.0 - pr) * u2))
        })
        .sum();
    let refused: f64 = rejected
        .iter()
        .map(|j| {
            let pa = m.observe(j, accepted);
            delta * (s2 - delta * rw.w_low) + beta * (pa * revealed + (1.0 - pa) * passed)
        })
        .sum();
    Ok(first + outsiders + refused)
}

pub fn wbar_alt(screening: WorkerSet, params: &ModelParams, m: &SharingMatrix) -> f64 {
    if screening.is_empty() {
        return 0.0;
    }
    let rw = RubinsteinWages::new(params);
    let k = screening.len() as f64;
    k * ((1.0 - params.delta) * params.s_high + params.delta * params.delta * rw.w_low)
        - params.beta * (rw.w_high - rw.w_low) * (expected_observers(screening, m) + k)
}

/// Low type prefers rejecting every offer in `accepted` to taking the money and running.
pub fn lowtype_constraint(accepted: WorkerSet, offers: &WageProfile, params: &ModelParams, m: &SharingMatrix) -> Result<bool> {
    Ok(lowtype_slack(accepted, offers, params, m)? >= -EPS)
}

pub fn lowtype_slack(accepted: WorkerSet, offers: &WageProfile, params: &ModelParams, m: &SharingMatrix) -> Result<f64> {
    if accepted.is_empty() {
        return Err(Error::EmptySet);
    }
    if !accepted.is_subset(offers.domain()) {
        return Err(Error::SubsetViolation);
    }
    let w_low = rubinstein(params.s_low, params.delta);
    let lhs = params.beta * (expected_observers(accepted, m) + accepted.len() as f64) * (params.s_low - w_low);
    let rhs: f64 = accepted.iter().map(|i| w_low - offers.wage(i)).sum();
    Ok(lhs - rhs)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoolDeviateCheck {
    /// `β(P̄(C∪j)/(|C|+1) + 1)`.
    pub lhs: f64,
    /// `(1-δ)(s'-s'')/(s'-w(s''))`.
    pub rhs: f64,
    /// The inequality `lhs ≥ rhs` as printed.
    pub displayed: bool,
    /// The printed sufficient condition `β ≥ rhs`.
    pub sufficient: bool,
    /// Low type rejects the deviation offer: `lhs·(s'-w(s'')) ≥ (1-δ)(s'-s'')`.
    pub holds: bool,
}

/// Whether the low type rejects a pooler's deviation offer `W̄(C∪j) - W̄(C)`.
pub fn pool_deviate_feasible(screening: WorkerSet, j: WorkerId, params: &ModelParams, m: &SharingMatrix) -> Result<PoolDeviateCheck> {
    if j >= m.n() {
        return Err(Error::IndexOutOfRange { worker: j, n: m.n() });
    }
    if screening.contains(j) {
        return Err(Error::MemberQuery(j));
    }
    let joined = screening.with(j);
    let w_high = rubinstein(params.s_high, params.delta);
    let denom = params.s_low - w_high;
    let lhs = params.beta * (expected_observers(joined, m) / joined.len() as f64 + 1.0);
    let numer = (1.0 - params.delta) * (params.s_low - params.s_high);
    let rhs = numer / denom;
    Ok(PoolDeviateCheck {
        lhs,
        rhs,
        displayed: lhs >= rhs - EPS,
        sufficient: params.beta >= rhs - EPS,
        holds: lhs * denom >= numer - EPS,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeliefRange {
    pub lower: f64,
    pub upper: f64,
    pub contains_prior: bool,
    pub empty: bool,
}

pub fn intermediate_beliefs_range(params: &ModelParams) -> BeliefRange {
    let (d, b) = (params.delta, params.beta);
    let ratio = params.s_high / params.s_low;
    let lower = (1.0 - d * d) / ((2.0 - d * d - b) * ratio + b - 1.0);
    let upper = params.s_low / params.s_high;
    BeliefRange {
        lower,
        upper,
        contains_prior: params.p >= lower - EPS && params.p <= upper + EPS,
        empty: lower > upper + EPS,
    }
}
