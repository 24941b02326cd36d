//! Equilibrium verification and search over screening sets.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{game_for, representatives, AlternatingGame, BargainingGame, EquilibriumCandidate, SimpleGame, SUBSET_LIMIT};
use crate::model::{expected_observers_symmetric, ModelParams, SharingMatrix, WageProfile, WorkerId, WorkerPartition, WorkerSet, EPS};
use crate::payoff::{mixed_quantities, mixed_screener_payoff, p2_screens, screening_value, MixedQuantities, MixedReading};

/// One incentive or optimality condition; positive slack means it holds strictly.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub worker: Option<WorkerId>,
    pub passed: bool,
    pub slack: f64,
}

impl Check {
    fn new(name: &'static str, worker: Option<WorkerId>, slack: f64, tol: f64) -> Self {
        Check { name, worker, passed: slack >= -tol, slack }
    }

    fn vacuous(name: &'static str) -> Self {
        Check { name, worker: None, passed: true, slack: 0.0 }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "pass" } else { "FAIL" };
        match self.worker {
            Some(w) => write!(f, "{:<18} worker {:<3} {verdict}", self.name, w)?,
            None => write!(f, "{:<18} {:<10} {verdict}", self.name, "")?,
        }
        if self.slack.is_finite() {
            write!(f, "  slack {:+.6}", self.slack)
        } else {
            write!(f, "  slack n/a")
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub firm_indifference: Check,
    pub firm_optimality: Check,
    pub empty_in_chi: Vec<Check>,
    pub lowtype_bound: Check,
    pub screener_ic: Vec<Check>,
    pub pooler_ic: Vec<Check>,
    pub notes: Vec<String>,
    pub verdict: bool,
}

impl VerificationReport {
    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        [&self.firm_indifference, &self.firm_optimality, &self.lowtype_bound]
            .into_iter()
            .chain(&self.empty_in_chi)
            .chain(&self.screener_ic)
            .chain(&self.pooler_ic)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks().filter(|c| !c.passed)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.checks() {
            writeln!(f, "{c}")?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        write!(f, "verdict: {}", if self.verdict { "pass" } else { "FAIL" })
    }
}

fn tolerance(scale: f64) -> f64 {
    EPS * (1.0 + scale.abs())
}

fn class_of(k: WorkerId, classes: Option<&[WorkerSet]>) -> WorkerSet {
    classes
        .and_then(|cls| cls.iter().copied().find(|c| c.contains(k)))
        .unwrap_or(WorkerSet::singleton(k))
}

/// Evaluates `f` once per class of interchangeable workers in `workers`.
fn per_worker<T: Clone>(workers: WorkerSet, classes: Option<&[WorkerSet]>, mut f: impl FnMut(WorkerId) -> Result<T>) -> Result<Vec<(WorkerId, T)>> {
    let mut out: Vec<(WorkerId, T)> = Vec::with_capacity(workers.len());
    let mut done = WorkerSet::empty();
    for k in workers.iter() {
        if done.contains(k) {
            continue;
        }
        let class = class_of(k, classes).intersection(workers);
        let v = f(k)?;
        out.extend(class.iter().map(|i| (i, v.clone())));
        done = done.union(class);
    }
    out.sort_by_key(|(k, _)| *k);
    Ok(out)
}

fn check_candidate(game: &dyn BargainingGame, cand: &EquilibriumCandidate) -> Result<()> {
    cand.offers.check_domain(cand.screening)?;
    if cand.screening.bound() > game.matrix().n() {
        return Err(Error::ProfileMismatch);
    }
    if !cand.screening.intersection(game.partition().reluctant_pool).is_empty() {
        return Err(Error::PartitionViolation("reluctant workers cannot be in the screening set".into()));
    }
    if !(0.0..1.0).contains(&cand.sigma) {
        return Err(Error::DomainError(format!("rejection probability {} outside [0, 1)", cand.sigma)));
    }
    Ok(())
}

/// All acceptance sets `X ⊆ C∖i` maximising the high type's payoff (the family `χ^i`).
pub fn best_response_sets(game: &dyn BargainingGame, i: WorkerId, cand: &EquilibriumCandidate) -> Result<Vec<WorkerSet>> {
    check_candidate(game, cand)?;
    if !cand.screening.contains(i) {
        return Err(Error::DomainError(format!("worker {i} is not in the screening set")));
    }
    let rest = cand.screening.without(i);
    if rest.len() > SUBSET_LIMIT {
        return Err(Error::UniverseTooLarge { size: rest.len(), limit: SUBSET_LIMIT });
    }
    let values: Vec<(WorkerSet, f64)> = rest.subsets().map(|x| (x, game.firm_payoff(x, cand))).collect();
    let best = values.iter().map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
    let tol = tolerance(best);
    let mut out: Vec<WorkerSet> = values.into_iter().filter(|(_, v)| *v >= best - tol).map(|(x, _)| x).collect();
    out.sort_by_key(|x| (x.len(), x.bits()));
    Ok(out)
}

/// Checks every equilibrium condition of a candidate in `game`.
pub fn verify(game: &dyn BargainingGame, cand: &EquilibriumCandidate) -> Result<VerificationReport> {
    game.precondition()?;
    check_candidate(game, cand)?;
    let params = game.params();
    let c = cand.screening;
    let classes = game.worker_classes(&cand.offers);
    let cls = classes.as_deref();
    let mut notes = Vec::new();

    let (firm_indifference, firm_optimality, empty_in_chi) = if c.is_empty() {
        (Check::vacuous("firm_indifference"), Check::vacuous("firm_optimality"), Vec::new())
    } else {
        let reps = representatives(c, cls)?;
        let values: HashMap<WorkerSet, f64> = reps.iter().map(|&a| (a, game.firm_payoff(a, cand))).collect();
        let value_of = |set: WorkerSet| values.get(&set).copied();
        let all = value_of(c).unwrap_or_else(|| game.firm_payoff(c, cand));
        let none = value_of(WorkerSet::empty()).unwrap_or_else(|| game.firm_payoff(WorkerSet::empty(), cand));
        let tol = tolerance(all);
        let best = values.values().copied().fold(f64::NEG_INFINITY, f64::max);
        let indiff = Check::new("firm_indifference", None, -(all - none).abs(), tol);
        let optimal = Check::new("firm_optimality", None, all - best, tol);
        let chi = per_worker(c, cls, |i| {
            let best_without = representatives(c.without(i), cls)?
                .into_iter()
                .map(|x| value_of(x).unwrap_or_else(|| game.firm_payoff(x, cand)))
                .fold(f64::NEG_INFINITY, f64::max);
            Ok(none - best_without)
        })?
        .into_iter()
        .map(|(i, s)| Check::new("empty_in_chi", Some(i), s, tol))
        .collect();
        (indiff, optimal, chi)
    };

    let lowtype_bound = if c.is_empty() {
        Check::vacuous("lowtype_bound")
    } else {
        Check::new("lowtype_bound", None, game.lowtype_slack(cand)?, EPS)
    };

    let screener_ic = per_worker(c, cls, |i| Ok(game.screener_values(i, cand)))?
        .into_iter()
        .map(|(i, v)| Check::new("screener_ic", Some(i), v.slack(), tolerance(v.on_path)))
        .collect();

    let outsiders = game.matrix().all().difference(c);
    let pooler_values = per_worker(outsiders, cls, |j| game.pooler_values(j, cand))?;
    let mut pooler_ic = Vec::with_capacity(pooler_values.len());
    for (j, v) in pooler_values {
        if game.partition().reluctant_pool.contains(j) {
            notes.push(format!("worker {j} is reluctant and never screens at the prior"));
        } else if v.deviation.is_none() {
            notes.push(format!("worker {j} has no screening offer the low type would refuse"));
        }
        pooler_ic.push(Check::new("pooler_ic", Some(j), v.slack(), tolerance(v.on_path)));
    }
    if cand.sigma > 0.0 {
        notes.push(format!("high type rejects every offer with probability {:.6}", cand.sigma));
    }
    if !c.is_empty() && params.beta + params.delta > 1.0 {
        notes.push("beta + delta > 1: screening offers cannot exceed the low output".into());
    }

    let mut report = VerificationReport {
        firm_indifference,
        firm_optimality,
        empty_in_chi,
        lowtype_bound,
        screener_ic,
        pooler_ic,
        notes,
        verdict: false,
    };
    let verdict = report.checks().all(|c| c.passed);
    report.verdict = verdict;
    Ok(report)
}

/// Verifies a candidate in the game selected by `params.variant`.
pub fn verify_equilibrium(
    cand: &EquilibriumCandidate,
    params: &ModelParams,
    m: &SharingMatrix,
    partition: &WorkerPartition,
) -> Result<VerificationReport> {
    let game = game_for(*params, m.clone(), *partition)?;
    verify(game.as_ref(), cand)
}

/// Verifies a candidate of the alternating-offers game; every worker may screen.
pub fn verify_equilibrium_alt(screening: WorkerSet, offers: &WageProfile, params: &ModelParams, m: &SharingMatrix) -> Result<VerificationReport> {
    let game = AlternatingGame::new(*params, m.clone(), WorkerPartition::all_screeners(params))?;
    verify(&game, &EquilibriumCandidate::pure(screening, offers.clone()))
}

/// Uniform candidate paying each member of `C` its share of the indifference wage sum.
pub fn symmetric_candidate(game: &dyn BargainingGame, screening: WorkerSet) -> Result<EquilibriumCandidate> {
    let n = game.matrix().n();
    if screening.is_empty() {
        return Ok(EquilibriumCandidate::no_screening(n));
    }
    let wage = game.wage_sum(screening)? / screening.len() as f64;
    Ok(EquilibriumCandidate::uniform(screening, wage, n))
}

/// Every symmetric candidate with its report: no screening, then one screening set per
/// combination of class sizes within the screener pool.
pub fn symmetric_scan(game: &dyn BargainingGame) -> Result<Vec<(EquilibriumCandidate, VerificationReport)>> {
    let n = game.matrix().n();
    let classes = game.worker_classes(&EquilibriumCandidate::no_screening(n).offers).ok_or(Error::AsymmetricMatrix)?;
    let mut sets = representatives(game.partition().screeners_pool, Some(&classes))?;
    sets.sort_by_key(|c| (c.len(), c.bits()));
    sets.into_par_iter()
        .map(|c| {
            let cand = symmetric_candidate(game, c)?;
            let report = verify(game, &cand)?;
            Ok((cand, report))
        })
        .collect()
}

/// Symmetric pure-strategy equilibria, ordered by size then bitmask.
pub fn find_symmetric_equilibria(game: &dyn BargainingGame) -> Result<Vec<EquilibriumCandidate>> {
    let mut found: Vec<EquilibriumCandidate> =
        symmetric_scan(game)?.into_iter().filter(|(_, r)| r.verdict).map(|(c, _)| c).collect();
    found.sort_by_key(|c| (c.screening.len(), c.screening.bits()));
    Ok(found)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Existence {
    AlwaysExists,
    ExistsUnderConditions,
    NoScreeningEquilibrium,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdProbes {
    pub rho: f64,
    pub n_at_rho: Option<usize>,
    pub n_at_extra_reluctant: Option<usize>,
    /// Neither probe lowers the threshold.
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    /// Least screener-pool size from which the all-screen candidate always verifies.
    pub n_value: Option<usize>,
    pub existence_note: Existence,
    pub verifies_by_size: Vec<(usize, bool)>,
    /// No size below `n_value` verifies.
    pub structure_holds: bool,
    /// Uninformed workers do not screen in the second period.
    pub condition_i: bool,
    /// `P̄(S)/|S| ≤ δ(|W|-1)ρ`.
    pub condition_ii_delta: bool,
    /// `P̄(S)/|S| ≤ (|W|-1)ρ`.
    pub condition_ii_plain: bool,
    pub probes: Option<ThresholdProbes>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdOptions {
    /// Largest screener pool scanned.
    pub max_screeners: usize,
    /// Step in `ρ` for the monotonicity probe; `None` skips the probes.
    pub probe_rho_step: Option<f64>,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        ThresholdOptions { max_screeners: 40, probe_rho_step: Some(0.05) }
    }
}

fn before(a: Option<usize>, b: Option<usize>) -> bool {
    match (a, b) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(x), Some(y)) => x <= y,
    }
}

/// Whether all of a pool of `screeners` verifies in a population with `reluctant` more workers.
pub fn all_screen_verifies(params: &ModelParams, rho: f64, screeners: usize, reluctant: usize, q_reluctant: f64) -> Result<bool> {
    let n = screeners + reluctant;
    let params = params.with_n_workers(n);
    let m = SharingMatrix::scalar(n, rho)?;
    let partition = if reluctant == 0 {
        WorkerPartition::all_screeners(&params)
    } else {
        WorkerPartition::split(&params, reluctant, q_reluctant)?
    };
    let game = game_for(params, m, partition)?;
    let cand = symmetric_candidate(game.as_ref(), partition.screeners_pool)?;
    Ok(verify(game.as_ref(), &cand)?.verdict)
}

/// The heterogeneity threshold `n(ρ, P)` for a scalar matrix and fixed reluctant pool.
pub fn screening_threshold(params: &ModelParams, m: &SharingMatrix, partition: &WorkerPartition, opts: ThresholdOptions) -> Result<ThresholdResult> {
    let rho = m.scalar_value().ok_or(Error::AsymmetricMatrix)?;
    let reluctant = partition.reluctant_pool.len();
    let actual = partition.screeners_pool.len();
    let q = partition.q_reluctant;
    let max_s = opts.max_screeners.max(actual).min(WorkerSet::CAPACITY - reluctant);
    let verifies_by_size = (1..=max_s)
        .into_par_iter()
        .map(|s| Ok((s, all_screen_verifies(params, rho, s, reluctant, q)?)))
        .collect::<Result<Vec<_>>>()?;
    let n_value = match verifies_by_size.iter().rposition(|(_, ok)| !ok) {
        None => Some(1),
        Some(last) if last + 1 < verifies_by_size.len() => Some(verifies_by_size[last + 1].0),
        Some(_) => None,
    };
    let structure_holds = n_value.is_some_and(|n| verifies_by_size.iter().all(|&(s, ok)| ok == (s >= n)));
    let existence_note = match n_value {
        None => Existence::NoScreeningEquilibrium,
        Some(n) if actual >= n => Existence::AlwaysExists,
        Some(_) => Existence::ExistsUnderConditions,
    };
    let total = actual + reluctant;
    let ratio = if actual == 0 { 0.0 } else { expected_observers_symmetric(rho, total, actual) / actual as f64 };
    let single = (total as f64 - 1.0) * rho;
    let probes = match opts.probe_rho_step {
        None => None,
        Some(step) => {
            let inner = ThresholdOptions { probe_rho_step: None, ..opts };
            let rho_up = (rho + step).min(1.0);
            let m_up = SharingMatrix::scalar(m.n(), rho_up)?;
            let n_rho = screening_threshold(params, &m_up, partition, inner)?.n_value;
            let n_p = extra_reluctant_threshold(params, rho, partition, inner)?;
            Some(ThresholdProbes {
                rho: rho_up,
                n_at_rho: n_rho,
                n_at_extra_reluctant: n_p,
                monotone: before(n_value, n_rho) && before(n_value, n_p),
            })
        }
    };
    Ok(ThresholdResult {
        n_value,
        existence_note,
        verifies_by_size,
        structure_holds,
        condition_i: !p2_screens(params.p, params),
        condition_ii_delta: ratio <= params.delta * single + EPS,
        condition_ii_plain: ratio <= single + EPS,
        probes,
    })
}

fn extra_reluctant_threshold(params: &ModelParams, rho: f64, partition: &WorkerPartition, opts: ThresholdOptions) -> Result<Option<usize>> {
    let q = if partition.reluctant_pool.is_empty() { 1.0 } else { partition.q_reluctant };
    let n = params.n_workers + 1;
    let params = params.with_n_workers(n);
    let m = SharingMatrix::scalar(n, rho)?;
    let bigger = WorkerPartition::split(&params, partition.reluctant_pool.len() + 1, q)?;
    Ok(screening_threshold(&params, &m, &bigger, opts)?.n_value)
}

/// Randomized-rejection candidate and the worker payoffs it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedSolution {
    pub candidate: EquilibriumCandidate,
    pub quantities: MixedQuantities,
    /// Screener payoff with round-two acceptance at `s'` after rejection.
    pub screener_payoff: f64,
    /// Screener payoff with the rejected-branch term as printed.
    pub screener_payoff_literal: f64,
    /// Pooler payoff under randomization, when someone pools.
    pub pooler_payoff: Option<f64>,
    /// Screener payoff in the pure candidate at `W̄(C)/|C|`.
    pub pure_screener_payoff: f64,
    pub pure_pooler_payoff: Option<f64>,
    /// Worker payoff when nobody screens.
    pub no_screening_payoff: f64,
    pub pure_equilibrium_exists: bool,
    /// `π(C) - π(∅)` for the high type at the mixed wage.
    pub firm_indifference_gap: f64,
    /// No pure screening equilibrium exists and randomization makes every worker better off than no screening.
    pub improves_all_workers: bool,
}

pub fn solve_mixed(params: &ModelParams, m: &SharingMatrix, screening: WorkerSet) -> Result<MixedSolution> {
    if screening.is_empty() {
        return Err(Error::EmptySet);
    }
    let mq = mixed_quantities(screening, params, m)?;
    let partition = WorkerPartition::all_screeners(params);
    let game = SimpleGame::new(*params, m.clone(), partition)?;
    let n = m.n();
    let wage = mq.wage_sum / screening.len() as f64;
    let candidate = EquilibriumCandidate { screening, offers: WageProfile::uniform(screening, wage, n), sigma: mq.sigma };
    let screener_payoff = mixed_screener_payoff(screening, params, m, MixedReading::Delay)?;
    let screener_payoff_literal = mixed_screener_payoff(screening, params, m, MixedReading::SigmaLiteral)?;
    let outsider = m.all().difference(screening).iter().next();
    let pooler_payoff = outsider.map(|j| {
        game.worker_value_in(j, &game.scenario(&candidate.offers, candidate.sigma), &candidate.policy())
    });
    let pure = symmetric_candidate(&game, screening)?;
    let pure_screener_payoff = screening_value(pure.offers.wage(screening.iter().next().unwrap_or(0)), params);
    let pure_pooler_payoff = outsider.map(|j| game.pooler_values(j, &pure).map(|v| v.on_path)).transpose()?;
    let none = EquilibriumCandidate::no_screening(n);
    let no_screening_payoff = game.pooler_values(0, &none)?.on_path;
    let pure_equilibrium_exists = match m.scalar_value() {
        Some(_) => find_symmetric_equilibria(&game)?.iter().any(|c| !c.screening.is_empty()),
        None => verify(&game, &pure)?.verdict,
    };
    let firm_indifference_gap = game.firm_payoff(screening, &candidate) - game.firm_payoff(WorkerSet::empty(), &candidate);
    let improves_all_workers = !pure_equilibrium_exists
        && screener_payoff > no_screening_payoff + EPS
        && pooler_payoff.is_none_or(|v| v > no_screening_payoff + EPS);
    Ok(MixedSolution {
        candidate,
        quantities: mq,
        screener_payoff,
        screener_payoff_literal,
        pooler_payoff,
        pure_screener_payoff,
        pure_pooler_payoff,
        no_screening_payoff,
        pure_equilibrium_exists,
        firm_indifference_gap,
        improves_all_workers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Variant;
    use crate::payoff::wbar;
    use approx::assert_abs_diff_eq;

    fn p0() -> (ModelParams, SharingMatrix, WorkerPartition) {
        let params = ModelParams::new(1.0, 2.0, 0.6, 0.4, 0.5, 0.5, 4, Variant::Simple).unwrap();
        (params, SharingMatrix::scalar(4, 0.2).unwrap(), WorkerPartition::all_screeners(&params))
    }

    fn game() -> SimpleGame {
        let (p, m, w) = p0();
        SimpleGame::new(p, m, w).unwrap()
    }

    #[test]
    fn all_screen_passes_at_p0() {
        let (p, m, w) = p0();
        let cand = EquilibriumCandidate::uniform(m.all(), 1.1, 4);
        let r = verify_equilibrium(&cand, &p, &m, &w).unwrap();
        assert!(r.verdict, "{r}");
        assert_eq!(r.empty_in_chi.len(), 4);
        assert_eq!(r.screener_ic.len(), 4);
        assert!(r.pooler_ic.is_empty());
    }

    #[test]
    fn three_screeners_fail_on_pooler_ic() {
        let (p, m, w) = p0();
        let cand = EquilibriumCandidate::uniform(WorkerSet::full(3), 1.03493, 4);
        let r = verify_equilibrium(&cand, &p, &m, &w).unwrap();
        assert!(!r.verdict);
        let failed: Vec<_> = r.failures().map(|c| (c.name, c.worker)).collect();
        assert!(failed.contains(&("pooler_ic", Some(3))), "{r}");
        assert!(r.screener_ic.iter().all(|c| c.passed));
    }

    #[test]
    fn chi_contains_empty_set() {
        let g = game();
        let cand = EquilibriumCandidate::uniform(WorkerSet::full(4), 1.1, 4);
        for i in 0..4 {
            assert!(best_response_sets(&g, i, &cand).unwrap().contains(&WorkerSet::empty()));
        }
        let single = EquilibriumCandidate::uniform(WorkerSet::singleton(2), 1.0, 4);
        assert_eq!(best_response_sets(&g, 2, &single).unwrap(), vec![WorkerSet::empty()]);
    }

    #[test]
    fn no_sharing_decouples_acceptance() {
        let (p, _, w) = p0();
        let m = SharingMatrix::scalar(4, 0.0).unwrap();
        let g = SimpleGame::new(p, m, w).unwrap();
        let c = WorkerSet::full(2);
        // W̄/|C| at ρ = 0 is the stand-alone acceptable wage
        let cand = EquilibriumCandidate::uniform(c, 1.0, 4);
        assert_eq!(best_response_sets(&g, 0, &cand).unwrap(), vec![WorkerSet::singleton(1)]);
    }

    #[test]
    fn symmetric_search_at_p0() {
        let g = game();
        let found = find_symmetric_equilibria(&g).unwrap();
        let screening: Vec<_> = found.iter().filter(|c| !c.screening.is_empty()).collect();
        assert_eq!(screening.len(), 1);
        assert_eq!(screening[0].screening, WorkerSet::full(4));
        assert_abs_diff_eq!(screening[0].offers.uniform_wage().unwrap(), 1.1, epsilon = 1e-12);
        // the no-screening profile also survives: a lone deviator is held to 0.98 < s'
        assert!(found.iter().any(|c| c.screening.is_empty()));
        for c in &found {
            assert!(verify(&g, c).unwrap().verdict);
        }
    }

    #[test]
    fn impatient_firm_leaves_only_no_screening() {
        let (p, m, w) = p0();
        let p = ModelParams { beta: 0.6, delta: 0.5, ..p };
        let g = SimpleGame::new(p, m, w).unwrap();
        let found = find_symmetric_equilibria(&g).unwrap();
        assert!(found.iter().all(|c| c.screening.is_empty()));
    }

    #[test]
    fn high_sharing_with_reluctant_worker_blocks_screening() {
        let (p, _, _) = p0();
        let m = SharingMatrix::scalar(4, 0.9).unwrap();
        let w = WorkerPartition::split(&p, 1, 0.9).unwrap();
        let g = SimpleGame::new(p, m, w).unwrap();
        assert!(find_symmetric_equilibria(&g).unwrap().iter().all(|c| c.screening.is_empty()));
    }

    #[test]
    fn asymmetric_matrix_rejected() {
        let (p, _, w) = p0();
        let mut rows = vec![vec![0.2; 4]; 4];
        for (i, r) in rows.iter_mut().enumerate() {
            r[i] = 0.0;
        }
        rows[0][1] = 0.5;
        let g = SimpleGame::new(p, SharingMatrix::from_rows(rows).unwrap(), w).unwrap();
        assert_eq!(find_symmetric_equilibria(&g), Err(Error::AsymmetricMatrix));
        // verification still works without symmetry
        let c = WorkerSet::full(4);
        let cand = symmetric_candidate(&g, c).unwrap();
        assert!(verify(&g, &cand).is_ok());
    }

    #[test]
    fn reluctant_in_screening_set_rejected() {
        let (p, m, _) = p0();
        let w = WorkerPartition::split(&p, 1, 0.9).unwrap();
        let cand = EquilibriumCandidate::uniform(WorkerSet::full(4), 1.1, 4);
        assert!(matches!(verify_equilibrium(&cand, &p, &m, &w), Err(Error::PartitionViolation(_))));
        let bad = EquilibriumCandidate { screening: WorkerSet::full(3), ..cand };
        assert_eq!(verify_equilibrium(&bad, &p, &m, &w), Err(Error::ProfileMismatch));
    }

    #[test]
    fn threshold_at_p0() {
        let (p, m, w) = p0();
        let t = screening_threshold(&p, &m, &w, ThresholdOptions { max_screeners: 12, ..Default::default() }).unwrap();
        let n = t.n_value.unwrap();
        assert!(n <= 4);
        assert!(t.structure_holds);
        assert_eq!(t.existence_note, Existence::AlwaysExists);
        assert!(t.probes.unwrap().monotone);
    }

    #[test]
    fn threshold_small_rho_is_one() {
        let p = ModelParams::new(1.0, 2.0, 0.6, 0.2, 0.3, 0.5, 4, Variant::Simple).unwrap();
        let m = SharingMatrix::scalar(4, 0.01).unwrap();
        let t = screening_threshold(&p, &m, &WorkerPartition::all_screeners(&p), ThresholdOptions { max_screeners: 8, probe_rho_step: None }).unwrap();
        assert_eq!(t.n_value, Some(1));
    }

    #[test]
    fn threshold_without_screening() {
        let (p, m, w) = p0();
        let p = ModelParams { beta: 0.7, ..p };
        let t = screening_threshold(&p, &m, &w, ThresholdOptions { max_screeners: 10, probe_rho_step: None }).unwrap();
        assert_eq!(t.existence_note, Existence::NoScreeningEquilibrium);
        assert_eq!(t.n_value, None);
    }

    #[test]
    fn mixed_solution_at_p0() {
        let (p, m, _) = p0();
        let s = solve_mixed(&p, &m, m.all()).unwrap();
        assert_abs_diff_eq!(s.candidate.sigma, 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.candidate.offers.uniform_wage().unwrap(), 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.screener_payoff, 1.18, epsilon = 1e-12);
        assert!(s.pure_equilibrium_exists);
        assert!(!s.improves_all_workers);
        assert!(s.pooler_payoff.is_none());
        // the displayed W̃ leaves the high type preferring rejection
        assert_abs_diff_eq!(s.firm_indifference_gap, 2.0 - 2.8, epsilon = 1e-12);
        assert_eq!(solve_mixed(&p.with_p(0.4), &m, m.all()).unwrap_err(), Error::BeliefTooLow { p: 0.4, p_star: 0.5 });
    }

    #[test]
    fn mixed_near_certain_high_type_matches_pure_payoff() {
        let (p, m, _) = p0();
        let p = p.with_p(1.0 - 1e-9);
        let s = solve_mixed(&p, &m, m.all()).unwrap();
        assert!(s.candidate.sigma < 1e-8);
        let w = s.candidate.offers.uniform_wage().unwrap();
        assert_abs_diff_eq!(s.screener_payoff, screening_value(w, &p), epsilon = 1e-6);
    }

    #[test]
    fn alt_verification_reports_gating() {
        let (p, m, _) = p0();
        let p = ModelParams { variant: Variant::AlternatingOffers, ..p.with_p(0.45) };
        let c = WorkerSet::full(3);
        let wage = crate::alt_offers::wbar_alt(c, &p, &m) / 3.0;
        let r = verify_equilibrium_alt(c, &WageProfile::uniform(c, wage, 4), &p, &m).unwrap();
        assert!(r.firm_indifference.passed, "{r}");
        assert_eq!(r.pooler_ic.len(), 1);
        let p6 = ModelParams { p: 0.6, ..p };
        assert_eq!(
            verify_equilibrium_alt(c, &WageProfile::uniform(c, wage, 4), &p6, &m).unwrap_err(),
            Error::BeliefsNotIntermediate(0.6)
        );
    }

    #[test]
    fn verification_is_idempotent_for_wbar() {
        let g = game();
        for k in 1..=4 {
            let c = WorkerSet::full(k);
            let cand = symmetric_candidate(&g, c).unwrap();
            assert_abs_diff_eq!(cand.offers.uniform_wage().unwrap(), wbar(c, &g.params().clone(), g.matrix()) / k as f64);
            let r = verify(&g, &cand).unwrap();
            assert!(r.firm_indifference.passed && r.firm_optimality.passed);
        }
    }
}
