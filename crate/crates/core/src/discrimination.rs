//! Penalties for verifiable discrimination against a protected group `Y`,
//! and the three sources of discrimination the penalty interacts with.

use std::fmt;

use crate::error::{Error, Result};
use crate::game::{brute_deviation_wage, game_for, game_worker_values, BargainingGame, EquilibriumCandidate};
use crate::model::{ModelParams, SharingMatrix, WageProfile, WorkerId, WorkerPartition, WorkerSet, EPS};
use crate::payoff::{check_profile, WorkerValues};
use crate::play::{Scenario, StageRules};
use crate::solver::{find_symmetric_equilibria, symmetric_candidate};

/// How the protected group is treated differently.
pub trait DiscriminationMode: Send + Sync {
    fn name(&self) -> &'static str;

    /// Cost a protected worker pays for each proposal above `s'` and each lawsuit.
    fn negotiation_cost(&self, _cfg: &DiscriminationConfig) -> f64 {
        0.0
    }

    /// High-type output of each worker when it differs from `s''`.
    fn high_output(&self, _params: &ModelParams, _cfg: &DiscriminationConfig, _n: usize) -> Option<Vec<f64>> {
        None
    }

    /// Non-wage cost the high type bears when it accepts `accepted`.
    fn firm_cost(&self, _accepted: WorkerSet, _sc: &Scenario, _cfg: &DiscriminationConfig) -> f64 {
        0.0
    }

    /// Whether the low type bears a cost of employing protected workers.
    fn burdens_low_type(&self) -> bool {
        false
    }
}

/// Protected workers are penalized for negotiating.
#[derive(Debug, Clone, Copy)]
pub struct Perception;

impl DiscriminationMode for Perception {
    fn name(&self) -> &'static str {
        "perception"
    }

    fn negotiation_cost(&self, cfg: &DiscriminationConfig) -> f64 {
        cfg.c
    }
}

/// The firm dislikes employing protected workers.
#[derive(Debug, Clone, Copy)]
pub struct TasteBased;

impl DiscriminationMode for TasteBased {
    fn name(&self) -> &'static str {
        "taste"
    }

    fn firm_cost(&self, _accepted: WorkerSet, sc: &Scenario, cfg: &DiscriminationConfig) -> f64 {
        // every worker is employed in both periods, and the cost is not discounted within one
        let y = cfg.y.intersection(sc.m.all()).len() as f64;
        (1.0 + sc.rules.firm_beta()) * cfg.c * y
    }

    fn burdens_low_type(&self) -> bool {
        true
    }
}

/// The firm believes protected workers are less productive at the high type.
#[derive(Debug, Clone, Copy)]
pub struct Statistical;

impl DiscriminationMode for Statistical {
    fn name(&self) -> &'static str {
        "statistical"
    }

    fn high_output(&self, params: &ModelParams, cfg: &DiscriminationConfig, n: usize) -> Option<Vec<f64>> {
        Some((0..n).map(|k| if cfg.y.contains(k) { params.s_high - cfg.c } else { params.s_high }).collect())
    }

    fn burdens_low_type(&self) -> bool {
        true
    }
}

pub const MODES: &[&dyn DiscriminationMode] = &[&Perception, &TasteBased, &Statistical];

pub fn mode_by_name(name: &str) -> Result<&'static dyn DiscriminationMode> {
    MODES
        .iter()
        .copied()
        .find(|m| m.name() == name)
        .ok_or_else(|| Error::UnknownName { kind: "discrimination mode", name: name.to_string() })
}

#[derive(Clone, Copy)]
pub struct DiscriminationConfig {
    /// Protected workers.
    pub y: WorkerSet,
    /// Penalty per case of verifiable discrimination.
    pub ell: f64,
    /// Share of the penalty paid to the worker.
    pub alpha: f64,
    pub c: f64,
    pub mode: &'static dyn DiscriminationMode,
    /// Only comparators paid at least the plaintiff's offer count.
    pub narrow: bool,
}

impl fmt::Debug for DiscriminationConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiscriminationConfig")
            .field("y", &self.y)
            .field("ell", &self.ell)
            .field("alpha", &self.alpha)
            .field("c", &self.c)
            .field("mode", &self.mode.name())
            .field("narrow", &self.narrow)
            .finish()
    }
}

impl PartialEq for DiscriminationConfig {
    fn eq(&self, o: &Self) -> bool {
        (self.y, self.ell, self.alpha, self.c, self.mode.name(), self.narrow)
            == (o.y, o.ell, o.alpha, o.c, o.mode.name(), o.narrow)
    }
}

impl DiscriminationConfig {
    pub fn new(y: WorkerSet, ell: f64, alpha: f64, c: f64, mode: &str) -> Result<Self> {
        Ok(DiscriminationConfig { y, ell, alpha, c, mode: mode_by_name(mode)?, narrow: false })
    }

    pub fn with_ell(self, ell: f64) -> Self {
        DiscriminationConfig { ell, ..self }
    }

    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        let bad = |m: String| Err(Error::ConfigInvalid(m));
        if self.y.bound() > params.n_workers {
            return bad(format!("protected set {} exceeds {} workers", self.y, params.n_workers));
        }
        if !(self.ell >= 0.0) {
            return bad(format!("penalty {} must be nonnegative", self.ell));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad(format!("worker share {} must lie in [0, 1]", self.alpha));
        }
        if !(self.c >= 0.0) {
            return bad(format!("cost {} must be nonnegative", self.c));
        }
        if !(params.s_high - self.c > params.s_low) {
            return bad(format!("s'' - c = {} must exceed s'", params.s_high - self.c));
        }
        Ok(())
    }
}

fn litigable(w: f64, params: &ModelParams) -> bool {
    w > params.s_low + EPS && w <= params.s_high + EPS
}

/// Chance that rejected `i` sees an accepted non-protected wage that makes its case.
fn case_prob(i: WorkerId, accepted: WorkerSet, offers: &WageProfile, params: &ModelParams, cfg: &DiscriminationConfig, m: &SharingMatrix) -> f64 {
    let own = offers.wage(i);
    let comparators: WorkerSet = accepted
        .difference(cfg.y)
        .iter()
        .filter(|&j| {
            let w = offers.wage(j);
            w > params.s_low + EPS && (!cfg.narrow || w >= own - EPS)
        })
        .collect();
    m.observe(i, comparators)
}

/// Probability that protected worker `i`, rejected while the high type accepts `A`, sues.
pub fn lawsuit_prob(
    i: WorkerId,
    accepted: WorkerSet,
    offers: &WageProfile,
    params: &ModelParams,
    cfg: &DiscriminationConfig,
    m: &SharingMatrix,
) -> Result<f64> {
    if i >= m.n() {
        return Err(Error::IndexOutOfRange { worker: i, n: m.n() });
    }
    if accepted.contains(i) {
        return Err(Error::NotRejected(i));
    }
    if !accepted.is_subset(offers.domain()) {
        return Err(Error::SubsetViolation);
    }
    let w = offers.get(i).unwrap_or(f64::NAN);
    if !litigable(w, params) {
        return Err(Error::OfferOutOfRange(w));
    }
    if !cfg.y.contains(i) {
        return Ok(0.0);
    }
    Ok(case_prob(i, accepted, offers, params, cfg, m))
}

/// Expected penalty the high type pays when it accepts exactly `accepted`.
fn expected_penalty(accepted: WorkerSet, sc: &Scenario, cfg: &DiscriminationConfig) -> f64 {
    if cfg.ell == 0.0 {
        return 0.0;
    }
    let params = &sc.rules.params;
    sc.offered()
        .intersection(cfg.y)
        .difference(accepted)
        .iter()
        .filter(|&i| litigable(sc.offers.wage(i), params))
        .map(|i| cfg.ell * case_prob(i, accepted, sc.offers, params, cfg, sc.m))
        .sum()
}

/// Probability that worker `k` proposes above `s'` in the second period.
fn p2_demand_prob(k: WorkerId, sc: &Scenario, policy: &[(f64, WorkerSet)]) -> f64 {
    let r = &sc.rules;
    let s1 = r.params.s_low;
    let prior = r.params.p;
    let rb = sc.rejection_belief;
    let informed = f64::from(r.informed_wage(sc.output(k)) > s1 + EPS);
    let screening = f64::from(r.screen_wage(r.params.s_high) > s1 + EPS);
    let uninformed = |q: f64| if sc.screens(k, q) { screening } else { f64::from(r.pool_wage() > s1 + EPS) };
    let offered = sc.offered().contains(k);
    let high: f64 = policy
        .iter()
        .map(|&(prob, a)| {
            let v = if a.contains(k) {
                informed
            } else {
                let seen = sc.m.observe(k, a);
                let rest = if offered {
                    uninformed(rb)
                } else {
                    let hint = sc.m.observe(k, sc.informative.difference(a));
                    hint * uninformed(rb) + (1.0 - hint) * uninformed(prior)
                };
                seen * informed + (1.0 - seen) * rest
            };
            prob * v
        })
        .sum();
    let low = if offered {
        uninformed(rb)
    } else {
        let hint = sc.m.observe(k, sc.informative);
        hint * uninformed(rb) + (1.0 - hint) * uninformed(prior)
    };
    prior * high + (1.0 - prior) * low
}

/// A game with penalties for verifiable discrimination and a discrimination mode.
pub struct DiscriminatedGame {
    inner: Box<dyn BargainingGame>,
    cfg: DiscriminationConfig,
    outputs: Option<Vec<f64>>,
}

impl DiscriminatedGame {
    pub fn new(inner: Box<dyn BargainingGame>, cfg: DiscriminationConfig) -> Result<Self> {
        cfg.validate(inner.params())?;
        let outputs = cfg.mode.high_output(inner.params(), &cfg, inner.matrix().n());
        Ok(DiscriminatedGame { inner, cfg, outputs })
    }

    pub fn from_parts(params: ModelParams, m: SharingMatrix, partition: WorkerPartition, cfg: DiscriminationConfig) -> Result<Self> {
        Self::new(game_for(params, m, partition)?, cfg)
    }

    pub fn config(&self) -> &DiscriminationConfig {
        &self.cfg
    }

    pub fn inner(&self) -> &dyn BargainingGame {
        self.inner.as_ref()
    }
}

impl BargainingGame for DiscriminatedGame {
    fn name(&self) -> &'static str {
        self.inner.name()
    }

    fn params(&self) -> &ModelParams {
        self.inner.params()
    }

    fn matrix(&self) -> &SharingMatrix {
        self.inner.matrix()
    }

    fn partition(&self) -> &WorkerPartition {
        self.inner.partition()
    }

    fn precondition(&self) -> Result<()> {
        self.inner.precondition()
    }

    fn scenario<'a>(&'a self, offers: &'a WageProfile, sigma: f64) -> Scenario<'a> {
        let mut sc = self.inner.scenario(offers, sigma);
        sc.high_output = self.outputs.as_deref();
        sc
    }

    fn firm_payoff_in(&self, accepted: WorkerSet, sc: &Scenario) -> f64 {
        self.inner.firm_payoff_in(accepted, sc) - expected_penalty(accepted, sc, &self.cfg) - self.cfg.mode.firm_cost(accepted, sc, &self.cfg)
    }

    fn worker_value_in(&self, k: WorkerId, sc: &Scenario, policy: &[(f64, WorkerSet)]) -> f64 {
        let base = self.inner.worker_value_in(k, sc, policy);
        if !self.cfg.y.contains(k) {
            return base;
        }
        let params = &sc.rules.params;
        let cost = self.cfg.mode.negotiation_cost(&self.cfg);
        let offer = sc.offers.get(k);
        let mut adj = 0.0;
        if offer.is_some_and(|w| w > params.s_low + EPS) {
            adj -= cost;
        }
        if cost > 0.0 {
            adj -= sc.rules.worker_beta() * cost * p2_demand_prob(k, sc, policy);
        }
        if offer.is_some_and(|w| litigable(w, params)) {
            let suits: f64 = policy
                .iter()
                .filter(|(_, a)| !a.contains(k))
                .map(|&(prob, a)| prob * case_prob(k, a, sc.offers, params, &self.cfg, sc.m))
                .sum();
            adj += params.p * suits * (self.cfg.alpha * self.cfg.ell - cost);
        }
        base + adj
    }

    fn wage_sum(&self, screening: WorkerSet) -> Result<f64> {
        if screening.is_empty() {
            return Ok(0.0);
        }
        let n = self.matrix().n();
        let k = screening.len() as f64;
        let gap = |total: f64| {
            let cand = EquilibriumCandidate::uniform(screening, total / k, n);
            self.firm_payoff(screening, &cand) - self.firm_payoff(WorkerSet::empty(), &cand)
        };
        bisect(gap, 0.0, k * self.params().s_high, 1e-10)
    }

    fn lowtype_slack(&self, cand: &EquilibriumCandidate) -> Result<f64> {
        self.inner.lowtype_slack(cand)
    }

    fn deviation_wage(&self, cand: &EquilibriumCandidate, j: WorkerId) -> Result<Option<f64>> {
        let params = self.params();
        if self.inner.deviation_wage(cand, j)?.is_none() {
            return Ok(None);
        }
        let plain = brute_deviation_wage(self, cand, j, 0.0)?;
        let w = if self.cfg.ell > 0.0 {
            let pen = brute_deviation_wage(self, cand, j, params.s_high)?;
            if pen > params.s_high {
                plain.max(params.s_high)
            } else if pen <= params.s_low + EPS {
                plain
            } else {
                pen
            }
        } else {
            plain
        };
        Ok((w > params.s_low + EPS).then_some(w))
    }

    fn worker_tag(&self, k: WorkerId) -> u64 {
        self.inner.worker_tag(k) | u64::from(self.cfg.y.contains(k)) << 8
    }
}

/// Root of a decreasing function on `[lo, hi]`.
fn bisect(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a), f(b));
    if fa.abs() <= EPS {
        return Ok(a);
    }
    if fb.abs() <= EPS {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::BracketFailure { lo, hi });
    }
    let rising = fb > fa;
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if (f(mid) > 0.0) == rising {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(0.5 * (a + b))
}

fn disc_game(params: &ModelParams, m: &SharingMatrix, cfg: &DiscriminationConfig) -> Result<DiscriminatedGame> {
    DiscriminatedGame::from_parts(*params, m.clone(), WorkerPartition::all_screeners(params), *cfg)
}

/// High type's payoff with penalties and the mode's costs.
pub fn firm_payoff_disc(
    accepted: WorkerSet,
    screening: WorkerSet,
    offers: &WageProfile,
    params: &ModelParams,
    m: &SharingMatrix,
    cfg: &DiscriminationConfig,
) -> Result<f64> {
    check_profile(accepted, screening, offers)?;
    let game = disc_game(params, m, cfg)?;
    Ok(game.firm_payoff(accepted, &EquilibriumCandidate::pure(screening, offers.clone())))
}

pub fn worker_values_disc(
    i: WorkerId,
    screening: WorkerSet,
    offers: &WageProfile,
    params: &ModelParams,
    m: &SharingMatrix,
    cfg: &DiscriminationConfig,
) -> Result<WorkerValues> {
    let game = disc_game(params, m, cfg)?;
    game_worker_values(&game, i, &EquilibriumCandidate::pure(screening, offers.clone()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntrapmentReport {
    /// Offer to be rejected, settle at `s'`, and sue.
    pub entrapment: f64,
    /// Offer the high type accepts, raised by the expected penalty it avoids.
    pub acceptable_offer: f64,
    pub acceptable_wage: f64,
    pub lawsuit_prob: f64,
    pub dominated: bool,
}

/// Compares entrapment by protected worker `i` with the acceptable-offer alternative.
pub fn entrapment_value(
    i: WorkerId,
    screening: WorkerSet,
    offers: &WageProfile,
    params: &ModelParams,
    m: &SharingMatrix,
    cfg: &DiscriminationConfig,
) -> Result<EntrapmentReport> {
    let game = disc_game(params, m, cfg)?;
    entrapment_in(&game, i, &EquilibriumCandidate::pure(screening, offers.clone()))
}

pub fn entrapment_in(game: &DiscriminatedGame, i: WorkerId, cand: &EquilibriumCandidate) -> Result<EntrapmentReport> {
    let cfg = game.config();
    let params = *game.params();
    let m = game.matrix();
    cand.offers.check_domain(cand.screening)?;
    if !cfg.y.contains(i) {
        return Err(Error::DomainError(format!("worker {i} is not protected")));
    }
    if cand.screening.contains(i) {
        return Err(Error::MemberQuery(i));
    }
    let comparators: WorkerSet =
        cand.screening.difference(cfg.y).iter().filter(|&j| cand.offers.wage(j) > params.s_low + EPS).collect();
    if comparators.is_empty() {
        return Err(Error::NoComparators);
    }
    let rules = StageRules::new(params);
    let cost = cfg.mode.negotiation_cost(cfg);
    let policy = cand.policy();
    let sc = game.scenario(&cand.offers, cand.sigma);
    let pooled = game.worker_value_in(i, &sc, &policy);
    let suits: f64 = policy.iter().map(|&(prob, a)| prob * m.observe(i, a.intersection(comparators))).sum();
    let entrapment = pooled - rules.pool_wage() + rules.delay() * rules.fallback_wage() - cost
        + params.p * suits * (cfg.alpha * cfg.ell - cost);
    let base = game.inner().deviation_wage(cand, i)?.unwrap_or(rules.pool_wage());
    let lawsuit = m.observe(i, comparators);
    let acceptable_wage = base + lawsuit * cfg.ell;
    let joined = EquilibriumCandidate {
        screening: cand.screening.with(i),
        offers: cand.offers.with_offer(i, acceptable_wage),
        sigma: cand.sigma,
    };
    let sc = game.scenario(&joined.offers, joined.sigma);
    let acceptable_offer = game.worker_value_in(i, &sc, &joined.policy());
    Ok(EntrapmentReport {
        entrapment,
        acceptable_offer,
        acceptable_wage,
        lawsuit_prob: lawsuit,
        dominated: acceptable_offer >= entrapment - EPS,
    })
}

/// Equilibrium outcomes at one penalty level.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyOutcome {
    pub ell: f64,
    /// Screening sets and their uniform wages.
    pub outcomes: Vec<(WorkerSet, f64)>,
    /// Every applicable entrapment comparison favors the acceptable offer.
    pub entrapment_dominated: bool,
    pub entrapment_checks: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyReport {
    pub per_ell: Vec<PenaltyOutcome>,
    pub identical: bool,
}

fn same_outcomes(a: &[(WorkerSet, f64)], b: &[(WorkerSet, f64)]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|((c1, w1), (c2, w2))| c1 == c2 && (w1 - w2).abs() <= 1e-8)
}

/// Re-solves the symmetric equilibria at each penalty in `ell_grid`.
pub fn penalty_irrelevance_check(
    params: &ModelParams,
    m: &SharingMatrix,
    partition: &WorkerPartition,
    cfg: &DiscriminationConfig,
    ell_grid: &[f64],
) -> Result<PenaltyReport> {
    m.scalar_value().ok_or(Error::AsymmetricMatrix)?;
    let mut per_ell = Vec::with_capacity(ell_grid.len());
    for &ell in ell_grid {
        let game = DiscriminatedGame::from_parts(*params, m.clone(), *partition, cfg.with_ell(ell))?;
        let found = find_symmetric_equilibria(&game)?;
        let outcomes: Vec<(WorkerSet, f64)> =
            found.iter().map(|c| (c.screening, c.offers.uniform_wage().unwrap_or(0.0))).collect();
        let mut checks = 0;
        let mut dominated = true;
        let mut probes: Vec<EquilibriumCandidate> = found.clone();
        // also probe the all-screen candidate of the unprotected pool, equilibrium or not
        let open = partition.screeners_pool.difference(cfg.y);
        if !open.is_empty() {
            probes.push(symmetric_candidate(&game, open)?);
        }
        for cand in &probes {
            for i in cfg.y.intersection(m.all()).difference(cand.screening).iter() {
                match entrapment_in(&game, i, cand) {
                    Ok(r) => {
                        checks += 1;
                        dominated &= r.dominated;
                    }
                    Err(Error::NoComparators) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        per_ell.push(PenaltyOutcome { ell, outcomes, entrapment_dominated: dominated, entrapment_checks: checks });
    }
    let identical = per_ell.windows(2).all(|w| same_outcomes(&w[0].outcomes, &w[1].outcomes));
    Ok(PenaltyReport { per_ell, identical })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WbarDisc {
    pub value: f64,
    /// Adding any outsider raises the average wage.
    pub increasing: bool,
    pub increasing_protected: Option<bool>,
    pub increasing_unprotected: Option<bool>,
}

/// Indifference wage sum `W̄(C|c)` and whether the average rises with any added worker.
pub fn wbar_disc(screening: WorkerSet, params: &ModelParams, m: &SharingMatrix, cfg: &DiscriminationConfig) -> Result<WbarDisc> {
    if !cfg.mode.burdens_low_type() {
        return Err(Error::ConfigInvalid(format!("mode {} has no firm-side cost", cfg.mode.name())));
    }
    let game = disc_game(params, m, cfg)?;
    let value = game.wage_sum(screening)?;
    let avg = if screening.is_empty() { f64::NEG_INFINITY } else { value / screening.len() as f64 };
    let mut prot: Option<bool> = None;
    let mut unprot: Option<bool> = None;
    for i in m.all().difference(screening).iter() {
        let joined = screening.with(i);
        let up = game.wage_sum(joined)? / joined.len() as f64 > avg + EPS;
        let slot = if cfg.y.contains(i) { &mut prot } else { &mut unprot };
        *slot = Some(slot.unwrap_or(true) && up);
    }
    Ok(WbarDisc {
        value,
        increasing: prot.unwrap_or(true) && unprot.unwrap_or(true),
        increasing_protected: prot,
        increasing_unprotected: unprot,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowTypePolicy {
    /// Cost of employing every protected worker at `s'` in the first period.
    pub accept_cost: f64,
    /// Expected penalties from turning all of them away.
    pub reject_cost: f64,
    pub accept: bool,
    /// Penalty above which accepting wins.
    pub ell_threshold: f64,
    /// Scalar sharing probability above which accepting wins, if one exists.
    pub rho_threshold: Option<f64>,
}

/// The discriminating low type's choice between hiring protected workers at `s'` and risking suits.
pub fn lowtype_policy(params: &ModelParams, m: &SharingMatrix, cfg: &DiscriminationConfig) -> Result<LowTypePolicy> {
    cfg.validate(params)?;
    if !cfg.mode.burdens_low_type() {
        return Err(Error::ConfigInvalid(format!("mode {} does not burden the low type", cfg.mode.name())));
    }
    let y = cfg.y.intersection(m.all());
    let employed = m.all().difference(y);
    let detect: f64 = y.iter().map(|i| m.observe(i, employed)).sum();
    let accept_cost = cfg.c * y.len() as f64;
    let reject_cost = cfg.ell * detect;
    let ell_threshold = if detect > 0.0 { accept_cost / detect } else { f64::INFINITY };
    let rho_threshold = match m.scalar_value() {
        Some(_) if cfg.ell > cfg.c && !employed.is_empty() && !y.is_empty() => {
            Some(1.0 - (1.0 - cfg.c / cfg.ell).powf(1.0 / employed.len() as f64))
        }
        _ => None,
    };
    Ok(LowTypePolicy { accept_cost, reject_cost, accept: accept_cost < reject_cost, ell_threshold, rho_threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Variant;
    use crate::payoff::{firm_payoff, supermodularity_of, wbar, worker_values};
    use approx::assert_abs_diff_eq;

    fn p0() -> (ModelParams, SharingMatrix) {
        (ModelParams::new(1.0, 2.0, 0.6, 0.4, 0.5, 0.5, 4, Variant::Simple).unwrap(), SharingMatrix::scalar(4, 0.2).unwrap())
    }

    fn cfg(mode: &str, ell: f64, c: f64) -> DiscriminationConfig {
        DiscriminationConfig::new(WorkerSet::singleton(3), ell, 1.0, c, mode).unwrap()
    }

    #[test]
    fn modes_registered() {
        for m in MODES {
            assert_eq!(mode_by_name(m.name()).unwrap().name(), m.name());
        }
        assert!(matches!(mode_by_name("envy"), Err(Error::UnknownName { .. })));
    }

    #[test]
    fn config_validation() {
        let (p, _) = p0();
        assert!(cfg("perception", 1.0, 0.05).validate(&p).is_ok());
        assert!(matches!(cfg("taste", 1.0, 1.5).validate(&p), Err(Error::ConfigInvalid(_))));
        assert!(matches!(DiscriminationConfig { alpha: 2.0, ..cfg("taste", 1.0, 0.1) }.validate(&p), Err(Error::ConfigInvalid(_))));
        assert!(matches!(DiscriminationConfig { y: WorkerSet::singleton(9), ..cfg("taste", 1.0, 0.1) }.validate(&p), Err(Error::ConfigInvalid(_))));
    }

    #[test]
    fn lawsuit_probabilities() {
        let (p, m) = p0();
        let c = WorkerSet::full(4);
        let w = WageProfile::uniform(c, 1.1, 4);
        let k = cfg("perception", 2.0, 0.0);
        assert_abs_diff_eq!(lawsuit_prob(3, WorkerSet::full(3), &w, &p, &k, &m).unwrap(), 0.488, epsilon = 1e-12);
        assert_eq!(lawsuit_prob(3, WorkerSet::empty(), &w, &p, &k, &m).unwrap(), 0.0);
        let mut rows = vec![vec![0.0; 2]; 2];
        rows[1][0] = 0.2;
        rows[0][1] = 0.2;
        let m2 = SharingMatrix::from_rows(rows).unwrap();
        let p2 = p.with_n_workers(2);
        let k2 = DiscriminationConfig { y: WorkerSet::singleton(1), ..k };
        let w2 = WageProfile::uniform(WorkerSet::full(2), 1.1, 2);
        assert_abs_diff_eq!(lawsuit_prob(1, WorkerSet::singleton(0), &w2, &p2, &k2, &m2).unwrap(), 0.2);
        assert_eq!(lawsuit_prob(3, c, &w, &p, &k, &m), Err(Error::NotRejected(3)));
        let low = WageProfile::uniform(c, 0.9, 4);
        assert!(matches!(lawsuit_prob(3, WorkerSet::full(3), &low, &p, &k, &m), Err(Error::OfferOutOfRange(_))));
    }

    #[test]
    fn narrow_definition_needs_higher_comparator() {
        let (p, m) = p0();
        let w = WageProfile::from_pairs(4, [(0, 1.1), (1, 1.1), (2, 1.1), (3, 1.2)]).unwrap();
        let k = DiscriminationConfig { narrow: true, ..cfg("perception", 2.0, 0.0) };
        assert_eq!(lawsuit_prob(3, WorkerSet::full(3), &w, &p, &k, &m).unwrap(), 0.0);
    }

    #[test]
    fn penalty_enters_firm_payoff() {
        let (p, m) = p0();
        let c = WorkerSet::full(4);
        let w = WageProfile::uniform(c, 1.1, 4);
        let a = WorkerSet::full(3);
        let plain = firm_payoff(a, c, &w, &p, &m).unwrap();
        let k = cfg("perception", 2.0, 0.05);
        assert_abs_diff_eq!(firm_payoff_disc(a, c, &w, &p, &m, &k).unwrap(), plain - 2.0 * 0.488, epsilon = 1e-12);
        assert_abs_diff_eq!(firm_payoff_disc(a, c, &w, &p, &m, &k.with_ell(0.0)).unwrap(), plain, epsilon = 1e-12);
        let no_y = DiscriminationConfig { y: WorkerSet::empty(), ..k };
        assert_abs_diff_eq!(firm_payoff_disc(a, c, &w, &p, &m, &no_y).unwrap(), plain, epsilon = 1e-12);
    }

    #[test]
    fn penalized_payoff_stays_supermodular() {
        let (p, m) = p0();
        let c = WorkerSet::full(4);
        let w = WageProfile::uniform(c, 1.1, 4);
        for mode in ["perception", "taste", "statistical"] {
            for ell in [0.0, 0.5, 5.0] {
                let k = DiscriminationConfig { y: WorkerSet::from_bits(0b1010), ..cfg(mode, ell, 0.1) };
                let r = supermodularity_of(c, |a| firm_payoff_disc(a, c, &w, &p, &m, &k)).unwrap();
                assert!(r.holds(), "{mode} {ell}");
            }
        }
    }

    #[test]
    fn perception_costs_of_a_protected_screener() {
        let (p, m) = p0();
        let c = WorkerSet::full(4);
        let w = WageProfile::uniform(c, 1.1, 4);
        let base = worker_values(3, c, &w, &p, &m).unwrap();
        let k = cfg("perception", 0.0, 0.05);
        let v = worker_values_disc(3, c, &w, &p, &m, &k).unwrap();
        // pays c when screening, and β·c when demanding s'' after acceptance
        assert_abs_diff_eq!(v.screen_value.unwrap(), base.screen_value.unwrap() - 0.05 - 0.6 * 0.4 * 0.05, epsilon = 1e-12);
        let other = worker_values_disc(0, c, &w, &p, &m, &k).unwrap();
        assert_abs_diff_eq!(other.screen_value.unwrap(), base.screen_value.unwrap(), epsilon = 1e-12);
        let pool = worker_values_disc(3, WorkerSet::full(3), &WageProfile::uniform(WorkerSet::full(3), 1.1, 4), &p, &m, &cfg("taste", 3.0, 0.05)).unwrap();
        let pool0 = worker_values(3, WorkerSet::full(3), &WageProfile::uniform(WorkerSet::full(3), 1.1, 4), &p, &m).unwrap();
        assert_abs_diff_eq!(pool.pool_value.unwrap(), pool0.pool_value.unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn lawsuit_income_needs_alpha() {
        let (p, m) = p0();
        let c = WorkerSet::full(4);
        let w = WageProfile::uniform(c, 1.1, 4);
        let game = disc_game(&p, &m, &DiscriminationConfig { alpha: 0.0, ..cfg("perception", 2.0, 0.0) }).unwrap();
        let sc = game.scenario(&w, 0.0);
        let forced = [(1.0, WorkerSet::full(3))];
        let plain = disc_game(&p, &m, &cfg("perception", 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(game.worker_value_in(3, &sc, &forced), plain.worker_value_in(3, &sc, &forced), epsilon = 1e-12);
        let paid = disc_game(&p, &m, &cfg("perception", 2.0, 0.0)).unwrap();
        assert_abs_diff_eq!(
            paid.worker_value_in(3, &sc, &forced) - plain.worker_value_in(3, &sc, &forced),
            0.6 * 0.488 * 2.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn entrapment_is_dominated() {
        let (p, m) = p0();
        let c = WorkerSet::full(3);
        let w = WageProfile::uniform(c, wbar(c, &p, &m) / 3.0, 4);
        for (ell, alpha) in [(2.0, 1.0), (0.0, 1.0), (2.0, 0.0)] {
            let k = DiscriminationConfig { alpha, ..cfg("perception", ell, 0.0) };
            let r = entrapment_value(3, c, &w, &p, &m, &k).unwrap();
            assert!(r.dominated, "{r:?}");
            assert!(r.acceptable_offer > r.entrapment);
        }
        let none = WageProfile::uniform(WorkerSet::empty(), 0.0, 4);
        assert_eq!(entrapment_value(3, WorkerSet::empty(), &none, &p, &m, &cfg("perception", 1.0, 0.0)), Err(Error::NoComparators));
    }

    #[test]
    fn penalty_irrelevance_at_p0() {
        let (p, m) = p0();
        let w = WorkerPartition::all_screeners(&p);
        for (mode, c) in [("perception", 0.05), ("taste", 0.05)] {
            let r = penalty_irrelevance_check(&p, &m, &w, &cfg(mode, 0.0, c), &[0.0, 0.5, 2.0]).unwrap();
            assert!(r.identical, "{mode}: {r:?}");
            assert!(r.per_ell.iter().all(|o| o.entrapment_dominated && o.entrapment_checks > 0));
        }
        let empty = DiscriminationConfig { y: WorkerSet::empty(), ..cfg("perception", 0.0, 0.05) };
        assert!(penalty_irrelevance_check(&p, &m, &w, &empty, &[0.0, 3.0]).unwrap().identical);
    }

    #[test]
    fn statistical_wage_sum() {
        let (p, m) = p0();
        let c = WorkerSet::full(4);
        let zero = wbar_disc(c, &p, &m, &cfg("statistical", 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(zero.value, wbar(c, &p, &m), epsilon = 1e-9);
        let costly = wbar_disc(c, &p, &m, &cfg("statistical", 0.0, 0.2)).unwrap();
        assert!(costly.value < zero.value - 1e-6);
        let outside = wbar_disc(WorkerSet::full(3), &p, &m, &cfg("statistical", 0.0, 0.2)).unwrap();
        // a protected pooler is worth less to inform, so the firm asks for less rent
        let gain = 0.4 * 0.488 * 0.2;
        assert_abs_diff_eq!(outside.value, wbar(WorkerSet::full(3), &p, &m) + gain, epsilon = 1e-9);
        let nobody = DiscriminationConfig { y: WorkerSet::empty(), ..cfg("statistical", 0.0, 0.2) };
        assert_abs_diff_eq!(wbar_disc(c, &p, &m, &nobody).unwrap().value, zero.value, epsilon = 1e-9);
        assert_eq!(outside.increasing_unprotected, None);
        assert!(outside.increasing_protected.is_some());
        let taste = wbar_disc(c, &p, &m, &cfg("taste", 0.0, 0.2)).unwrap();
        assert_abs_diff_eq!(taste.value, wbar(c, &p, &m), epsilon = 1e-9);
        assert!(matches!(wbar_disc(c, &p, &m, &cfg("perception", 0.0, 0.2)), Err(Error::ConfigInvalid(_))));
    }

    #[test]
    fn low_type_hiring() {
        let (p, m) = p0();
        assert!(!lowtype_policy(&p, &m, &cfg("taste", 0.0, 0.1)).unwrap().accept);
        let m0 = SharingMatrix::scalar(4, 0.0).unwrap();
        assert!(!lowtype_policy(&p, &m0, &cfg("taste", 5.0, 0.1)).unwrap().accept);
        let m9 = SharingMatrix::scalar(4, 0.95).unwrap();
        let r = lowtype_policy(&p, &m9, &cfg("statistical", 10.0, 0.05)).unwrap();
        assert!(r.accept);
        // the reported thresholds are where the comparison flips
        let rho = r.rho_threshold.unwrap();
        for (q, expect) in [(rho - 1e-6, false), (rho + 1e-6, true)] {
            let mq = SharingMatrix::scalar(4, q).unwrap();
            assert_eq!(lowtype_policy(&p, &mq, &cfg("statistical", 10.0, 0.05)).unwrap().accept, expect);
        }
        let l = lowtype_policy(&p, &m, &cfg("taste", 1.0, 0.1)).unwrap().ell_threshold;
        assert!(!lowtype_policy(&p, &m, &cfg("taste", l - 1e-6, 0.1)).unwrap().accept);
        assert!(lowtype_policy(&p, &m, &cfg("taste", l + 1e-6, 0.1)).unwrap().accept);
        assert!(matches!(lowtype_policy(&p, &m, &cfg("perception", 1.0, 0.1)), Err(Error::ConfigInvalid(_))));
    }
}
