//! Closed-form payoffs of the simple two-round stage game.

use crate::error::{Error, Result};
use crate::model::{
    expected_observers, EPS, ModelParams, SharingMatrix, WageProfile, WorkerId, WorkerSet, ENUMERATION_LIMIT,
};

/// Outcome of the second-period negotiation with a worker who holds belief `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondPeriodDecision {
    pub screens: bool,
    pub worker_value: f64,
    pub firm_value_high: f64,
    pub firm_value_low: f64,
}

/// Second-period screening wage `δs' + (1-δ)s''`.
pub fn p2_screening_wage(params: &ModelParams) -> f64 {
    params.delta * params.s_low + (1.0 - params.delta) * params.s_high
}

/// Whether an uninformed worker at belief `q` screens (ties screen).
pub fn p2_screens(q: f64, params: &ModelParams) -> bool {
    q * params.s_high >= params.s_low - EPS
}

pub fn p2_decision(q: f64, params: &ModelParams) -> Result<SecondPeriodDecision> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::DomainError(format!("belief {q} outside [0, 1]")));
    }
    let gap = params.surplus_gap();
    let screens = p2_screens(q, params);
    let (worker_value, firm_value_high) = if screens {
        (q * p2_screening_wage(params) + (1.0 - q) * params.delta * params.s_low, params.delta * gap)
    } else {
        (params.s_low, gap)
    };
    Ok(SecondPeriodDecision { screens, worker_value, firm_value_high, firm_value_low: 0.0 })
}

/// Type-conditional second-period receipts `(v_h, v_l)` of an uninformed worker at belief `q`.
pub fn uninformed_receipts(q: f64, params: &ModelParams) -> (f64, f64) {
    if p2_screens(q, params) {
        (p2_screening_wage(params), params.delta * params.s_low)
    } else {
        (params.s_low, params.s_low)
    }
}

/// High-type firm's value from an uninformed worker holding the prior.
pub fn u2_high(params: &ModelParams) -> f64 {
    if p2_screens(params.p, params) {
        params.delta * params.surplus_gap()
    } else {
        params.surplus_gap()
    }
}

pub(crate) fn check_profile(accepted: WorkerSet, screening: WorkerSet, offers: &WageProfile) -> Result<()> {
    offers.check_domain(screening)?;
    if !accepted.is_subset(screening) {
        return Err(Error::SubsetViolation);
    }
    Ok(())
}

/// High-type payoff `π(A|C,ω)` of accepting exactly the first offers in `accepted`.
pub fn firm_payoff(
    accepted: WorkerSet,
    screening: WorkerSet,
    offers: &WageProfile,
    params: &ModelParams,
    m: &SharingMatrix,
) -> Result<f64> {
    check_profile(accepted, screening, offers)?;
    let gap = params.surplus_gap();
    let u2 = u2_high(params);
    let (beta, delta) = (params.beta, params.delta);
    let rejected = screening.difference(accepted);

    let first: f64 = accepted.iter().map(|i| params.s_high - offers.wage(i)).sum();
    let outsiders: f64 = m
        .all()
        .difference(screening)
        .iter()
        .map(|j| {
            let pa = m.observe(j, accepted);
            let pr = m.observe(j, rejected);
            gap + beta * (1.0 - pa) * (pr * gap + (1.0 - pr) * u2)
        })
        .sum();
    let refused: f64 = rejected
        .iter()
        .map(|j| delta * gap + beta * (1.0 - m.observe(j, accepted)) * gap)
        .sum();
    Ok(first + outsiders + refused)
}

/// Outcome of exhaustively testing supermodularity of a set function.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SupermodularityReport {
    pub pairs_checked: usize,
    /// Pairs with `π(A∪B) + π(A∩B) < π(A) + π(B) - EPS`.
    pub violations: Vec<(WorkerSet, WorkerSet, f64)>,
    pub strict_pairs: usize,
    /// Non-nested pairs where the inequality holds with equality.
    pub equality_pairs: Vec<(WorkerSet, WorkerSet)>,
}

impl SupermodularityReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exhaustive supermodularity check of `f` over subsets of `universe`.
pub fn supermodularity_of<F>(universe: WorkerSet, f: F) -> Result<SupermodularityReport>
where
    F: Fn(WorkerSet) -> Result<f64>,
{
    if universe.len() > ENUMERATION_LIMIT {
        return Err(Error::UniverseTooLarge { size: universe.len(), limit: ENUMERATION_LIMIT });
    }
    let subsets: Vec<WorkerSet> = universe.subsets().collect();
    let mut values = std::collections::HashMap::with_capacity(subsets.len());
    for &s in &subsets {
        values.insert(s, f(s)?);
    }
    let mut report = SupermodularityReport::default();
    for (ia, &a) in subsets.iter().enumerate() {
        for &b in subsets.iter().skip(ia) {
            report.pairs_checked += 1;
            let slack = values[&a.union(b)] + values[&a.intersection(b)] - values[&a] - values[&b];
            if slack < -EPS {
                report.violations.push((a, b, slack));
            } else if slack > EPS {
                report.strict_pairs += 1;
            } else if !a.is_subset(b) && !b.is_subset(a) {
                report.equality_pairs.push((a, b));
            }
        }
    }
    Ok(report)
}

pub fn supermodularity_report(
    screening: WorkerSet,
    offers: &WageProfile,
    params: &ModelParams,
    m: &SharingMatrix,
) -> Result<SupermodularityReport> {
    offers.check_domain(screening)?;
    supermodularity_of(screening, |a| firm_payoff(a, screening, offers, params, m))
}

/// Screening wage sum `W̄(C)` that leaves the high type indifferent between accepting all and none.
pub fn wbar(screening: WorkerSet, params: &ModelParams, m: &SharingMatrix) -> f64 {
    if screening.is_empty() {
        return 0.0;
    }
    let gap = params.surplus_gap();
    let k = screening.len() as f64;
    k * (params.s_high - (params.delta + params.beta) * gap) - params.beta * expected_observers(screening, m) * gap
}

/// Whether the low type rejects the uniform screening offer `W̄(C)/|C|`.
pub fn feasible_screening(screening: WorkerSet, params: &ModelParams, m: &SharingMatrix) -> Result<bool> {
    if screening.is_empty() {
        return Err(Error::EmptySet);
    }
    let lhs = 1.0 - params.delta - params.beta;
    let rhs = params.beta * expected_observers(screening, m) / screening.len() as f64;
    Ok(lhs >= rhs - EPS)
}

fn check_outsider(i: WorkerId, screening: WorkerSet, m: &SharingMatrix) -> Result<()> {
    if i >= m.n() {
        return Err(Error::IndexOutOfRange { worker: i, n: m.n() });
    }
    if screening.contains(i) {
        return Err(Error::MemberQuery(i));
    }
    Ok(())
}

/// Highest acceptable deviation wage of pooler `i`, in its displayed closed form.
pub fn wtilde(screening: WorkerSet, i: WorkerId, params: &ModelParams, m: &SharingMatrix) -> Result<f64> {
    check_outsider(i, screening, m)?;
    let gap = params.surplus_gap();
    let dp = expected_observers(screening.with(i), m) - expected_observers(screening, m);
    Ok(params.s_high - (params.delta + params.beta) * gap - params.beta * dp * u2_high(params))
}

/// Wage at which the high type is indifferent between accepting `C ∪ i` and rejecting every offer,
/// when a rejected deviator concludes the firm is the low type and its `s'` wage informs nobody.
pub fn wtilde_indifference(screening: WorkerSet, i: WorkerId, params: &ModelParams, m: &SharingMatrix) -> Result<f64> {
    check_outsider(i, screening, m)?;
    let gap = params.surplus_gap();
    let u2 = u2_high(params);
    let joined = screening.with(i);
    let spill: f64 = m
        .all()
        .difference(joined)
        .iter()
        .map(|j| m.observe(j, joined) - m.observe(j, screening))
        .sum();
    Ok(params.s_high - (params.delta + params.beta) * gap + params.beta * m.observe(i, screening) * gap
        - params.beta * spill * u2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedQuantities {
    pub p_star: f64,
    pub sigma: f64,
    pub wage_sum: f64,
}

/// Rejection probability that leaves a rejected worker exactly at the screening cutoff.
pub fn sigma_of(p: f64, p_star: f64) -> f64 {
    p_star / (1.0 - p_star) * (1.0 - p) / p
}

/// Wage sum `W̃(C)` under randomized rejection, as displayed.
pub fn wtilde_sum(screening: WorkerSet, params: &ModelParams, m: &SharingMatrix) -> f64 {
    if screening.is_empty() {
        return 0.0;
    }
    let gap = params.surplus_gap();
    let k = screening.len() as f64;
    k * (params.s_high - params.delta * gap) - params.beta * expected_observers(screening, m) * params.delta * gap
}

pub fn mixed_quantities(screening: WorkerSet, params: &ModelParams, m: &SharingMatrix) -> Result<MixedQuantities> {
    let p_star = params.p_star();
    if params.p <= p_star {
        return Err(Error::BeliefTooLow { p: params.p, p_star });
    }
    Ok(MixedQuantities { p_star, sigma: sigma_of(params.p, p_star), wage_sum: wtilde_sum(screening, params, m) })
}

/// Reading of the rejected-branch first-period receipt in the mixed screener payoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MixedReading {
    /// Round-two acceptance at `s'`, worth `δs'`.
    #[default]
    Delay,
    /// The term exactly as printed, `σs'`.
    SigmaLiteral,
}

/// Expected payoff of a screener when the high type rejects everyone with probability `σ`.
pub fn mixed_screener_payoff(
    screening: WorkerSet,
    params: &ModelParams,
    m: &SharingMatrix,
    reading: MixedReading,
) -> Result<f64> {
    if screening.is_empty() {
        return Err(Error::EmptySet);
    }
    let mq = mixed_quantities(screening, params, m)?;
    let (p, s1, beta) = (params.p, params.s_low, params.beta);
    let wage = mq.wage_sum / screening.len() as f64;
    let fallback = match reading {
        MixedReading::Delay => params.delta * s1,
        MixedReading::SigmaLiteral => mq.sigma * s1,
    };
    Ok(p * (1.0 - mq.sigma) * (wage + beta * params.s_high) + ((1.0 - p) + mq.sigma * p) * (fallback + beta * s1))
}

/// Payoffs of worker `i` on path and under its relevant unilateral deviation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WorkerValues {
    /// On-path value of a screener.
    pub screen_value: Option<f64>,
    /// Value of a screener who instead pools; every other offer is then rejected.
    pub screen_to_pool_deviation: Option<f64>,
    /// On-path value of a pooler.
    pub pool_value: Option<f64>,
    /// Value of a pooler who screens at the highest wage the high type accepts.
    pub pool_to_screen_deviation: Option<f64>,
    /// The same deviation valued at the displayed `w̃(C,i)`.
    pub pool_to_screen_displayed: Option<f64>,
    /// Highest wage the high type accepts from the deviating pooler.
    pub deviation_wage: Option<f64>,
}

impl WorkerValues {
    /// On-path value minus best deviation value.
    pub fn ic_slack(&self) -> Option<f64> {
        match (self.screen_value, self.screen_to_pool_deviation, self.pool_value, self.pool_to_screen_deviation) {
            (Some(v), Some(d), _, _) => Some(v - d),
            (_, _, Some(v), Some(d)) => Some(v - d),
            _ => None,
        }
    }
}

/// Value of screening at `wage`: accepted and informed by the high type, rejected by the low.
pub fn screening_value(wage: f64, params: &ModelParams) -> f64 {
    let (p, beta) = (params.p, params.beta);
    p * (wage + beta * params.s_high) + (1.0 - p) * (params.delta * params.s_low + beta * params.s_low)
}

/// Value of pooling when the wages of `screening` are visible with probability `P^i(C)`.
pub fn pooling_value(i: WorkerId, screening: WorkerSet, params: &ModelParams, m: &SharingMatrix) -> f64 {
    let (p, beta) = (params.p, params.beta);
    let seen = m.observe(i, screening);
    let (vh, vl) = uninformed_receipts(p, params);
    params.s_low
        + beta * (p * (seen * params.s_high + (1.0 - seen) * vh) + (1.0 - p) * (seen * params.s_low + (1.0 - seen) * vl))
}

/// Value of pooling with no information from anyone else.
pub fn uninformed_pooling_value(params: &ModelParams) -> f64 {
    let (vh, vl) = uninformed_receipts(params.p, params);
    params.s_low + params.beta * (params.p * vh + (1.0 - params.p) * vl)
}

pub fn worker_values(
    i: WorkerId,
    screening: WorkerSet,
    offers: &WageProfile,
    params: &ModelParams,
    m: &SharingMatrix,
) -> Result<WorkerValues> {
    offers.check_domain(screening)?;
    if i >= m.n() {
        return Err(Error::IndexOutOfRange { worker: i, n: m.n() });
    }
    if screening.contains(i) {
        return Ok(WorkerValues {
            screen_value: Some(screening_value(offers.wage(i), params)),
            screen_to_pool_deviation: Some(uninformed_pooling_value(params)),
            ..WorkerValues::default()
        });
    }
    let dev = wtilde_indifference(screening, i, params, m)?;
    let shown = wtilde(screening, i, params, m)?;
    Ok(WorkerValues {
        pool_value: Some(pooling_value(i, screening, params, m)),
        pool_to_screen_deviation: Some(screening_value(dev, params)),
        pool_to_screen_displayed: Some(screening_value(shown, params)),
        deviation_wage: Some(dev),
        ..WorkerValues::default()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Variant;
    use approx::assert_abs_diff_eq;

    fn p0() -> (ModelParams, SharingMatrix) {
        let params = ModelParams::new(1.0, 2.0, 0.6, 0.4, 0.5, 0.5, 4, Variant::Simple).unwrap();
        (params, SharingMatrix::scalar(4, 0.2).unwrap())
    }

    fn set(ids: &[usize]) -> WorkerSet {
        ids.iter().copied().collect()
    }

    #[test]
    fn screening_wage_limits() {
        let (params, _) = p0();
        assert_abs_diff_eq!(p2_screening_wage(&params), 1.5);
        let mut patient = params;
        patient.delta = 1.0 - 1e-12;
        assert_abs_diff_eq!(p2_screening_wage(&patient), 1.0, epsilon = 1e-9);
        let mut impatient = params;
        impatient.delta = 0.0;
        assert_abs_diff_eq!(p2_screening_wage(&impatient), 2.0);
    }

    #[test]
    fn decision_branches() {
        let (params, _) = p0();
        let tie = p2_decision(0.5, &params).unwrap();
        assert!(tie.screens);
        assert_abs_diff_eq!(tie.worker_value, 1.0, epsilon = 1e-12);
        let sure = p2_decision(1.0, &params).unwrap();
        assert_abs_diff_eq!(sure.worker_value, 1.5);
        assert_abs_diff_eq!(sure.firm_value_high, 0.5);
        let none = p2_decision(0.0, &params).unwrap();
        assert!(!none.screens);
        assert_abs_diff_eq!(none.worker_value, 1.0);
        assert_abs_diff_eq!(none.firm_value_high, 1.0);
        assert!(p2_decision(1.2, &params).is_err());
    }

    #[test]
    fn receipts_recover_unconditional_value() {
        let (params, _) = p0();
        for q in [0.0, 0.3, 0.5, 0.6, 0.9, 1.0] {
            let (vh, vl) = uninformed_receipts(q, &params);
            let d = p2_decision(q, &params).unwrap();
            assert_abs_diff_eq!(q * vh + (1.0 - q) * vl, d.worker_value, epsilon = 1e-12);
        }
    }

    #[test]
    fn firm_payoff_examples() {
        let (params, m) = p0();
        let all = m.all();
        let none = WageProfile::uniform(WorkerSet::empty(), 0.0, 4);
        assert_abs_diff_eq!(firm_payoff(WorkerSet::empty(), WorkerSet::empty(), &none, &params, &m).unwrap(), 4.8, epsilon = 1e-12);
        let w = WageProfile::uniform(all, 1.1, 4);
        assert_abs_diff_eq!(firm_payoff(all, all, &w, &params, &m).unwrap(), 3.6, epsilon = 1e-12);
        assert_abs_diff_eq!(firm_payoff(WorkerSet::empty(), all, &w, &params, &m).unwrap(), 3.6, epsilon = 1e-12);
    }

    #[test]
    fn firm_payoff_errors() {
        let (params, m) = p0();
        let w = WageProfile::uniform(set(&[0, 1]), 1.1, 4);
        assert_eq!(firm_payoff(set(&[0]), set(&[0, 1, 2]), &w, &params, &m), Err(Error::ProfileMismatch));
        assert_eq!(firm_payoff(set(&[2]), set(&[0, 1]), &w, &params, &m), Err(Error::SubsetViolation));
    }

    #[test]
    fn wbar_examples_and_indifference() {
        let (params, m) = p0();
        assert_eq!(wbar(WorkerSet::empty(), &params, &m), 0.0);
        let c = set(&[0, 1, 2]);
        let sum = wbar(c, &params, &m);
        assert_abs_diff_eq!(sum, 3.1048, epsilon = 1e-12);
        assert_abs_diff_eq!(wbar(m.all(), &params, &m), 4.4, epsilon = 1e-12);
        let w = WageProfile::uniform(c, sum / 3.0, 4);
        let all = firm_payoff(c, c, &w, &params, &m).unwrap();
        let none = firm_payoff(WorkerSet::empty(), c, &w, &params, &m).unwrap();
        assert_abs_diff_eq!(all, none, epsilon = 1e-12);
    }

    #[test]
    fn feasibility_examples() {
        let (params, m) = p0();
        assert!(feasible_screening(set(&[0, 1, 2]), &params, &m).unwrap());
        assert!(!feasible_screening(set(&[0, 1]), &params, &m).unwrap());
        assert_abs_diff_eq!(wbar(set(&[0, 1]), &params, &m) / 2.0, 0.956, epsilon = 1e-12);
        assert_eq!(feasible_screening(WorkerSet::empty(), &params, &m), Err(Error::EmptySet));
        let mut impatient = params;
        impatient.beta = 0.6;
        assert!(!feasible_screening(m.all(), &impatient, &m).unwrap());
    }

    #[test]
    fn wtilde_examples() {
        let (params, m) = p0();
        assert_abs_diff_eq!(wtilde(set(&[0, 1, 2]), 3, &params, &m).unwrap(), 1.1976, epsilon = 1e-12);
        assert_eq!(wtilde(set(&[0, 1, 2]), 1, &params, &m), Err(Error::MemberQuery(1)));
        let blind = SharingMatrix::scalar(4, 0.0).unwrap();
        for c in [WorkerSet::empty(), set(&[0]), set(&[0, 1, 2])] {
            assert_abs_diff_eq!(wtilde(c, 3, &params, &blind).unwrap(), 1.1, epsilon = 1e-12);
        }
        // the indifference wage credits the deviator's own information rent at s'' - s'
        assert_abs_diff_eq!(wtilde_indifference(set(&[0, 1, 2]), 3, &params, &m).unwrap(), 1.2952, epsilon = 1e-12);
        assert_abs_diff_eq!(wtilde_indifference(WorkerSet::empty(), 0, &params, &m).unwrap(), 0.98, epsilon = 1e-12);
    }

    #[test]
    fn mixed_examples() {
        let (params, m) = p0();
        let mq = mixed_quantities(m.all(), &params, &m).unwrap();
        assert_abs_diff_eq!(mq.p_star, 0.5);
        assert_abs_diff_eq!(mq.sigma, 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mq.wage_sum, 6.0, epsilon = 1e-12);
        assert_eq!(sigma_of(1.0, 0.5), 0.0);
        assert!(matches!(mixed_quantities(m.all(), &params.with_p(0.5), &m), Err(Error::BeliefTooLow { .. })));
        let delay = mixed_screener_payoff(m.all(), &params, &m, MixedReading::Delay).unwrap();
        assert_abs_diff_eq!(delay, 0.6 / 3.0 * 2.3 + 0.8 * 0.9, epsilon = 1e-12);
        let literal = mixed_screener_payoff(m.all(), &params, &m, MixedReading::SigmaLiteral).unwrap();
        assert_abs_diff_eq!(literal, 0.6 / 3.0 * 2.3 + 0.8 * (2.0 / 3.0 + 0.4), epsilon = 1e-12);
    }

    #[test]
    fn mixed_dominance_identity() {
        let (params, _) = p0();
        for rho in [0.1, 0.2, 0.5, 0.9] {
            let m = SharingMatrix::scalar(6, rho).unwrap();
            let params = params.with_n_workers(6);
            for k in 1..=6 {
                let c = WorkerSet::full(k);
                let kf = k as f64;
                let gap = params.surplus_gap();
                let lhs = wtilde_sum(c, &params, &m) / kf - wbar(c, &params, &m) / kf;
                let rhs = params.beta * gap + params.beta * expected_observers(c, &m) / kf * (1.0 - params.delta) * gap;
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
                assert!(lhs > 0.0);
            }
        }
    }

    #[test]
    fn worker_value_examples() {
        let (params, m) = p0();
        let all = m.all();
        let v = worker_values(0, all, &WageProfile::uniform(all, 1.1, 4), &params, &m).unwrap();
        assert_abs_diff_eq!(v.screen_value.unwrap(), 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(v.screen_to_pool_deviation.unwrap(), 1.44, epsilon = 1e-12);
        let c = set(&[0, 1, 2]);
        let w = WageProfile::uniform(c, wbar(c, &params, &m) / 3.0, 4);
        let v = worker_values(3, c, &w, &params, &m).unwrap();
        assert_abs_diff_eq!(v.pool_value.unwrap(), 1.5376, epsilon = 1e-12);
        assert_abs_diff_eq!(v.pool_to_screen_displayed.unwrap(), 1.55856, epsilon = 1e-12);
        assert_abs_diff_eq!(v.pool_to_screen_deviation.unwrap(), 1.61712, epsilon = 1e-12);
        assert!(v.ic_slack().unwrap() < 0.0);
    }

    #[test]
    fn blind_pooler_gets_uninformed_value() {
        let (params, _) = p0();
        let m = SharingMatrix::scalar(4, 0.0).unwrap();
        let c = set(&[0, 1]);
        let w = WageProfile::uniform(c, 1.2, 4);
        let v = worker_values(3, c, &w, &params, &m).unwrap();
        assert_abs_diff_eq!(v.pool_value.unwrap(), uninformed_pooling_value(&params), epsilon = 1e-12);
    }

    #[test]
    fn supermodularity_examples() {
        let (params, m) = p0();
        let all = m.all();
        let w = WageProfile::uniform(all, 1.1, 4);
        let f = |a| firm_payoff(a, all, &w, &params, &m).unwrap();
        let (a, b) = (set(&[0, 1]), set(&[1, 2]));
        assert!(f(a.union(b)) + f(a.intersection(b)) > f(a) + f(b) + EPS);
        let report = supermodularity_report(all, &w, &params, &m).unwrap();
        assert!(report.holds());
        assert!(report.equality_pairs.is_empty());
        let blind = SharingMatrix::scalar(4, 0.0).unwrap();
        let report = supermodularity_report(all, &w, &params, &blind).unwrap();
        assert!(report.holds());
        assert!(!report.equality_pairs.is_empty());
    }

    #[test]
    fn average_wage_increases_with_size() {
        let (params, _) = p0();
        for n in 2..=12 {
            let params = params.with_n_workers(n);
            let m = SharingMatrix::scalar(n, 0.3).unwrap();
            let avg: Vec<f64> = (1..=n).map(|k| wbar(WorkerSet::full(k), &params, &m) / k as f64).collect();
            assert!(avg.windows(2).all(|w| w[1] > w[0] + EPS), "n = {n}: {avg:?}");
        }
    }

    #[test]
    fn wbar_decreases_in_rho() {
        let (params, _) = p0();
        let params = params.with_n_workers(6);
        let c = WorkerSet::full(3);
        let sums: Vec<f64> = [0.05, 0.2, 0.4, 0.7, 0.95]
            .iter()
            .map(|&r| wbar(c, &params, &SharingMatrix::scalar(6, r).unwrap()))
            .collect();
        assert!(sums.windows(2).all(|w| w[1] < w[0]));
    }
}
