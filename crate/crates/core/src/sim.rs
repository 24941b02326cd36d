//! Monte-Carlo play of a strategy profile.
//!
//! Each trial owns a ChaCha stream keyed by `(seed, trial)`. Every trial
//! consumes the same fixed sequence of draws (firm type, randomization, then
//! one uniform per ordered worker pair), so a draw site always maps to the
//! same word of the stream and results do not depend on thread scheduling.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::discrimination::{lawsuit_prob, DiscriminatedGame, DiscriminationConfig};
use crate::error::{Error, Result};
use crate::game::{game_for, BargainingGame, EquilibriumCandidate};
use crate::model::{ModelParams, SharingMatrix, Variant, WorkerId, WorkerPartition, WorkerSet, EPS};
use crate::play::Scenario;
use crate::report::fmt_sig;
use crate::solver::verify;

/// Off-path behavior injected into the high type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForcedDeviation {
    /// Reject worker `k`'s offer whenever the profile says accept.
    RejectWorker(WorkerId),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub trials: usize,
    pub seed: u64,
    pub profile: EquilibriumCandidate,
    pub discrimination: Option<DiscriminationConfig>,
    pub partition: Option<WorkerPartition>,
    pub forced: Option<ForcedDeviation>,
}

impl SimConfig {
    pub fn new(trials: usize, seed: u64, profile: EquilibriumCandidate) -> Self {
        SimConfig { trials, seed, profile, discrimination: None, partition: None, forced: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum P2Action {
    /// Knows the firm is the high type.
    Informed,
    Screen,
    Pool,
}

/// Nominal wages of one worker; a delayed wage is paid in the second round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WageStream {
    pub p1: f64,
    pub p1_delayed: bool,
    pub p2: f64,
    pub p2_delayed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub trial: u64,
    pub firm_high: bool,
    /// High type drew its reject-everyone branch.
    pub rejected_all: bool,
    pub accepted: WorkerSet,
    /// `(observer, observed)` pairs.
    pub edges: Vec<(WorkerId, WorkerId)>,
    pub p2_actions: Vec<P2Action>,
    pub wages: Vec<WageStream>,
    /// `(plaintiff, comparator)` pairs.
    pub lawsuits: Vec<(WorkerId, WorkerId)>,
    pub worker_payoffs: Vec<f64>,
    pub firm_payoff: f64,
    /// Every wage the low type accepted is one the high type accepts too.
    pub single_crossing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentEstimate {
    pub agent: String,
    pub samples: usize,
    pub mean: f64,
    pub se: f64,
    pub analytic: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub trials: usize,
    pub rows: Vec<AgentEstimate>,
    pub single_crossing_violations: usize,
    pub warnings: Vec<String>,
}

impl SimReport {
    pub fn max_abs_z(&self) -> f64 {
        self.rows.iter().map(|r| r.z.abs()).fold(0.0, f64::max)
    }

    pub fn row(&self, agent: &str) -> Option<&AgentEstimate> {
        self.rows.iter().find(|r| r.agent == agent)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("agent,samples,mean,se,analytic,z\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{},{},{}", r.agent, r.samples, fmt_sig(r.mean), fmt_sig(r.se), fmt_sig(r.analytic), fmt_sig(r.z));
        }
        out
    }
}

/// A profile bound to its game, ready to play episodes.
pub struct Simulator {
    game: Box<dyn BargainingGame>,
    disc: Option<DiscriminationConfig>,
    config: SimConfig,
    warnings: Vec<String>,
}

impl Simulator {
    pub fn new(config: SimConfig, params: &ModelParams, m: &SharingMatrix) -> Result<Self> {
        if config.trials == 0 {
            return Err(Error::ConfigInvalid("trials must be at least 1".into()));
        }
        let partition = config.partition.clone().unwrap_or_else(|| WorkerPartition::all_screeners(params));
        let base = game_for(*params, m.clone(), partition)?;
        let game: Box<dyn BargainingGame> = match config.discrimination {
            Some(cfg) => Box::new(DiscriminatedGame::new(base, cfg)?),
            None => base,
        };
        config.profile.offers.check_domain(config.profile.screening)?;
        if let Some(ForcedDeviation::RejectWorker(k)) = config.forced {
            if !config.profile.screening.contains(k) {
                return Err(Error::ConfigInvalid(format!("forced rejection of worker {k} outside the screening set")));
            }
        }
        let mut warnings = Vec::new();
        match verify(game.as_ref(), &config.profile) {
            Ok(r) if r.verdict => {}
            Ok(r) => {
                let failed: Vec<String> = r.failures().map(|c| c.name.to_string()).collect();
                warnings.push(format!("unverified profile: {}", failed.join(", ")));
            }
            Err(e) => warnings.push(format!("unverified profile: {e}")),
        }
        if config.forced.is_some() {
            warnings.push("forced deviation active".into());
        }
        Ok(Simulator { disc: config.discrimination, game, config, warnings })
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    fn accepted_set(&self) -> WorkerSet {
        match self.config.forced {
            Some(ForcedDeviation::RejectWorker(k)) => self.config.profile.screening.without(k),
            None => self.config.profile.screening,
        }
    }

    fn policy(&self) -> Vec<(f64, WorkerSet)> {
        let sigma = self.config.profile.sigma;
        let a = self.accepted_set();
        if sigma > 0.0 {
            vec![(1.0 - sigma, a), (sigma, WorkerSet::empty())]
        } else {
            vec![(1.0, a)]
        }
    }

    /// Plays trial `trial`; deterministic in `(seed, trial)`.
    pub fn episode(&self, trial: u64) -> EpisodeRecord {
        let cand = &self.config.profile;
        let sc = self.game.scenario(&cand.offers, cand.sigma);
        let r = sc.rules;
        let params = &r.params;
        let n = sc.m.n();

        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(trial);
        let firm_high = rng.random::<f64>() < params.p;
        let reject_draw = rng.random::<f64>();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && rng.random::<f64>() < sc.m.get(i, j) {
                    edges.push((i, j));
                }
            }
        }
        let sees = |i: WorkerId, set: WorkerSet| edges.iter().any(|&(o, t)| o == i && set.contains(t));

        let rejected_all = firm_high && reject_draw < cand.sigma;
        let accepted = if firm_high && !rejected_all { self.accepted_set() } else { WorkerSet::empty() };
        let offered = sc.offered();
        let (delay, fbeta, wbeta) = (r.delay(), r.firm_beta(), r.worker_beta());
        let known = r.informed_wage(params.s_high);
        let high_cap = known + EPS;

        let mut p2_actions = Vec::with_capacity(n);
        let mut wages = Vec::with_capacity(n);
        let mut worker_payoffs = Vec::with_capacity(n);
        let mut firm = 0.0;
        let mut single_crossing = true;
        for k in 0..n {
            let out = if firm_high { sc.output(k) } else { params.s_low };
            let (p1, p1_delayed) = if accepted.contains(k) {
                (cand.offers.wage(k), false)
            } else if offered.contains(k) {
                (r.fallback_wage(), true)
            } else {
                (r.pool_wage(), false)
            };
            let q = if accepted.contains(k) || sees(k, accepted) {
                1.0
            } else if offered.contains(k) || sees(k, sc.informative.difference(accepted)) {
                sc.rejection_belief
            } else {
                params.p
            };
            let action = if q >= 1.0 - EPS {
                P2Action::Informed
            } else if sc.screens(k, q) {
                P2Action::Screen
            } else {
                P2Action::Pool
            };
            let (p2, p2_delayed, firm_p2_wage) = match (action, firm_high) {
                (P2Action::Informed, _) => (known, false, r.informed_wage(out)),
                (P2Action::Screen, true) => (r.screen_wage(params.s_high), false, r.screen_wage(out)),
                (P2Action::Screen, false) => (r.fallback_wage(), true, r.fallback_wage()),
                (P2Action::Pool, _) => (r.pool_wage(), false, r.pool_wage()),
            };
            let at = |delayed: bool| if delayed { delay } else { 1.0 };
            firm += at(p1_delayed) * (out - p1) + fbeta * at(p2_delayed) * (out - firm_p2_wage);
            let mut value = at(p1_delayed) * p1 + wbeta * at(p2_delayed) * p2;
            if !firm_high {
                single_crossing &= p1 <= high_cap && p2 <= high_cap;
            }
            if let Some(cfg) = &self.disc {
                if cfg.y.contains(k) {
                    let cost = cfg.mode.negotiation_cost(cfg);
                    if cand.offers.get(k).is_some_and(|w| w > params.s_low + EPS) {
                        value -= cost;
                    }
                    let demand = match action {
                        P2Action::Informed => r.informed_wage(sc.output(k)),
                        P2Action::Screen => r.screen_wage(params.s_high),
                        P2Action::Pool => r.pool_wage(),
                    };
                    if demand > params.s_low + EPS {
                        value -= wbeta * cost;
                    }
                }
            }
            p2_actions.push(action);
            wages.push(WageStream { p1, p1_delayed, p2, p2_delayed });
            worker_payoffs.push(value);
        }

        let mut lawsuits = Vec::new();
        if let Some(cfg) = &self.disc {
            for i in offered.intersection(cfg.y).difference(accepted).iter() {
                let own = cand.offers.wage(i);
                if !(own > params.s_low + EPS && own <= params.s_high + EPS) {
                    continue;
                }
                let comparator = accepted.difference(cfg.y).iter().find(|&j| {
                    let w = cand.offers.wage(j);
                    w > params.s_low + EPS && (!cfg.narrow || w >= own - EPS) && sees(i, WorkerSet::singleton(j))
                });
                if let Some(j) = comparator {
                    lawsuits.push((i, j));
                    firm -= cfg.ell;
                    worker_payoffs[i] += cfg.alpha * cfg.ell - cfg.mode.negotiation_cost(cfg);
                }
            }
            if firm_high {
                firm -= cfg.mode.firm_cost(accepted, &sc, cfg);
            }
        }

        EpisodeRecord {
            trial,
            firm_high,
            rejected_all,
            accepted,
            edges,
            p2_actions,
            wages,
            lawsuits,
            worker_payoffs,
            firm_payoff: firm,
            single_crossing,
        }
    }

    fn analytic(&self, sc: &Scenario) -> (Vec<f64>, f64, f64, f64) {
        let policy = self.policy();
        let n = sc.m.n();
        let workers = (0..n).map(|k| self.game.worker_value_in(k, sc, &policy)).collect();
        let high = policy.iter().map(|&(prob, a)| prob * self.game.firm_payoff_in(a, sc)).sum();
        let low = sc.firm_low();
        let suits = self.disc.as_ref().map_or(0.0, |cfg| {
            let params = &sc.rules.params;
            let per_state: f64 = policy
                .iter()
                .map(|&(prob, a)| {
                    let s: f64 = sc
                        .offered()
                        .intersection(cfg.y)
                        .difference(a)
                        .iter()
                        .map(|i| lawsuit_prob(i, a, sc.offers, params, cfg, sc.m).unwrap_or(0.0))
                        .sum();
                    prob * s
                })
                .sum();
            params.p * per_state
        });
        (workers, high, low, suits)
    }

    /// Runs every trial and compares means with the analytic values.
    pub fn estimate(&self) -> SimReport {
        let trials = self.config.trials;
        let records: Vec<EpisodeRecord> = (0..trials as u64).into_par_iter().map(|t| self.episode(t)).collect();
        let cand = &self.config.profile;
        let sc = self.game.scenario(&cand.offers, cand.sigma);
        let (workers, high, low, suits) = self.analytic(&sc);

        let mut rows = Vec::new();
        for (k, &analytic) in workers.iter().enumerate() {
            let xs: Vec<f64> = records.iter().map(|e| e.worker_payoffs[k]).collect();
            rows.push(summarize(format!("worker{k}"), &xs, analytic));
        }
        let highs: Vec<f64> = records.iter().filter(|e| e.firm_high).map(|e| e.firm_payoff).collect();
        let lows: Vec<f64> = records.iter().filter(|e| !e.firm_high).map(|e| e.firm_payoff).collect();
        if !highs.is_empty() {
            rows.push(summarize("firm_high".into(), &highs, high));
        }
        if !lows.is_empty() {
            rows.push(summarize("firm_low".into(), &lows, low));
        }
        if self.disc.is_some() {
            let xs: Vec<f64> = records.iter().map(|e| e.lawsuits.len() as f64).collect();
            rows.push(summarize("lawsuits".into(), &xs, suits));
        }
        let single_crossing_violations = records.iter().filter(|e| !e.single_crossing).count();
        let mut warnings = self.warnings.clone();
        if self.game.params().variant == Variant::AlternatingOffers && single_crossing_violations > 0 {
            warnings.push(format!("single crossing violated in {single_crossing_violations} episodes"));
        }
        SimReport { trials, rows, single_crossing_violations, warnings }
    }
}

/// Sum in index order by halves, which bounds rounding error by `O(log n)`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn summarize(agent: String, xs: &[f64], analytic: f64) -> AgentEstimate {
    let n = xs.len();
    let mean = pairwise_sum(xs) / n as f64;
    let se = if n > 1 {
        let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
        (pairwise_sum(&dev) / (n - 1) as f64 / n as f64).sqrt()
    } else {
        0.0
    };
    // rounding noise on a constant sample
    let se = if se <= 1e-12 * (1.0 + mean.abs()) { 0.0 } else { se };
    let diff = mean - analytic;
    let z = if se > 0.0 {
        diff / se
    } else if diff.abs() <= 1e-9 * (1.0 + analytic.abs()) {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    };
    AgentEstimate { agent, samples: n, mean, se, analytic, z }
}

/// One episode of `config` at trial index `trial`.
pub fn simulate_episode(config: &SimConfig, params: &ModelParams, m: &SharingMatrix, trial: u64) -> Result<EpisodeRecord> {
    Ok(Simulator::new(config.clone(), params, m)?.episode(trial))
}

pub fn estimate(config: &SimConfig, params: &ModelParams, m: &SharingMatrix) -> Result<SimReport> {
    Ok(Simulator::new(config.clone(), params, m)?.estimate())
}

/// One CSV row per episode.
pub fn episodes_csv(records: &[EpisodeRecord]) -> String {
    let mut out = String::from("trial,firm_type,rejected_all,accepted,edges,wages,lawsuits,worker_payoffs,firm_payoff\n");
    let join = |parts: Vec<String>| parts.join(";");
    for e in records {
        let edges = join(e.edges.iter().map(|(i, j)| format!("{i}>{j}")).collect());
        let wages = join(e.wages.iter().map(|w| format!("{}|{}", fmt_sig(w.p1), fmt_sig(w.p2))).collect());
        let suits = join(e.lawsuits.iter().map(|(i, j)| format!("{i}>{j}")).collect());
        let pays = join(e.worker_payoffs.iter().map(|&x| fmt_sig(x)).collect());
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            e.trial,
            if e.firm_high { "high" } else { "low" },
            u8::from(e.rejected_all),
            e.accepted.bits(),
            edges,
            wages,
            suits,
            pays,
            fmt_sig(e.firm_payoff)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p0() -> (ModelParams, SharingMatrix) {
        let params = ModelParams::new(1.0, 2.0, 0.6, 0.4, 0.5, 0.5, 4, Variant::Simple).unwrap();
        (params, SharingMatrix::scalar(4, 0.2).unwrap())
    }

    #[test]
    fn high_type_accepts_everything_without_randomization() {
        let (params, m) = p0();
        let cand = EquilibriumCandidate::uniform(WorkerSet::full(3), 1.2, 4);
        let sim = Simulator::new(SimConfig::new(10, 7, cand), &params, &m).unwrap();
        for t in 0..50 {
            let e = sim.episode(t);
            if e.firm_high {
                assert_eq!(e.accepted, WorkerSet::full(3));
                assert_eq!(e.wages[3].p1, 1.0);
            } else {
                assert!(e.accepted.is_empty());
            }
        }
    }

    #[test]
    fn no_edges_without_sharing() {
        let (params, _) = p0();
        let m = SharingMatrix::scalar(4, 0.0).unwrap();
        let cand = EquilibriumCandidate::uniform(WorkerSet::full(4), 1.1, 4);
        let sim = Simulator::new(SimConfig::new(10, 1, cand), &params, &m).unwrap();
        assert!((0..200).all(|t| sim.episode(t).edges.is_empty()));
    }

    #[test]
    fn episodes_are_reproducible() {
        let (params, m) = p0();
        let cand = EquilibriumCandidate::uniform(WorkerSet::full(4), 1.1, 4);
        let cfg = SimConfig::new(100, 42, cand);
        let a = simulate_episode(&cfg, &params, &m, 17).unwrap();
        let b = simulate_episode(&cfg, &params, &m, 17).unwrap();
        assert_eq!(a, b);
        let other = SimConfig { seed: 43, ..cfg.clone() };
        let streams: Vec<_> = (0..20).map(|t| simulate_episode(&other, &params, &m, t).unwrap()).collect();
        let base: Vec<_> = (0..20).map(|t| simulate_episode(&cfg, &params, &m, t).unwrap()).collect();
        assert_ne!(streams, base);
    }

    #[test]
    fn screener_mean_converges() {
        let (params, m) = p0();
        let cand = EquilibriumCandidate::uniform(WorkerSet::full(4), 1.1, 4);
        let report = estimate(&SimConfig::new(20_000, 3, cand), &params, &m).unwrap();
        assert!(report.warnings.is_empty(), "{:?}", report.warnings);
        let w0 = report.row("worker0").unwrap();
        assert_abs_diff_eq!(w0.analytic, 1.5, epsilon = 1e-12);
        assert!(report.max_abs_z() < 4.5, "{}", report.to_csv());
    }

    #[test]
    fn degenerate_prior_is_exact() {
        let (params, m) = p0();
        let params = params.with_p(1.0 - 1e-12);
        let cand = EquilibriumCandidate::uniform(WorkerSet::full(4), 1.1, 4);
        let report = estimate(&SimConfig::new(200, 5, cand), &params, &m).unwrap();
        assert!(report.row("firm_low").is_none());
        let firm = report.row("firm_high").unwrap();
        assert_eq!(firm.se, 0.0);
        assert_abs_diff_eq!(firm.mean, firm.analytic, epsilon = 1e-12);
    }

    #[test]
    fn forced_rejection_sues_at_the_lawsuit_rate() {
        let (params, m) = p0();
        let cfg = DiscriminationConfig::new(WorkerSet::singleton(0), 1.0, 0.5, 0.1, "perception").unwrap();
        let cand = EquilibriumCandidate::uniform(WorkerSet::full(4), 1.3, 4);
        let mut sc = SimConfig::new(20_000, 9, cand);
        sc.discrimination = Some(cfg);
        let on_path = estimate(&sc, &params, &m).unwrap();
        assert_eq!(on_path.row("lawsuits").unwrap().mean, 0.0);
        sc.forced = Some(ForcedDeviation::RejectWorker(0));
        let report = estimate(&sc, &params, &m).unwrap();
        let suits = report.row("lawsuits").unwrap();
        // P^0 of three comparators at 0.2, times p
        assert_abs_diff_eq!(suits.analytic, 0.6 * 0.488, epsilon = 1e-12);
        assert!(suits.z.abs() < 4.0, "{}", report.to_csv());
        assert!(report.max_abs_z() < 4.5, "{}", report.to_csv());
    }

    #[test]
    fn mixed_profile_converges() {
        let (params, m) = p0();
        let mixed = crate::solver::solve_mixed(&params, &m, WorkerSet::full(4)).unwrap();
        assert_abs_diff_eq!(mixed.candidate.sigma, 2.0 / 3.0, epsilon = 1e-12);
        let report = estimate(&SimConfig::new(20_000, 11, mixed.candidate.clone()), &params, &m).unwrap();
        let high = report.row("firm_high").unwrap();
        assert!(report.max_abs_z() < 4.5, "{}", report.to_csv());
        assert!(high.se > 0.0);
    }

    #[test]
    fn rejection_frequency_matches_sigma() {
        let (params, m) = p0();
        let mixed = crate::solver::solve_mixed(&params, &m, WorkerSet::full(4)).unwrap();
        let sim = Simulator::new(SimConfig::new(1, 13, mixed.candidate), &params, &m).unwrap();
        let highs: Vec<_> = (0..20_000).map(|t| sim.episode(t)).filter(|e| e.firm_high).collect();
        let share = highs.iter().filter(|e| e.rejected_all).count() as f64 / highs.len() as f64;
        let se = (2.0 / 9.0 / highs.len() as f64).sqrt();
        assert!((share - 2.0 / 3.0).abs() < 3.0 * se, "{share}");
    }

    #[test]
    fn alternating_profile_converges_with_single_crossing() {
        let params = ModelParams::new(1.0, 2.0, 0.45, 0.4, 0.5, 0.5, 4, Variant::AlternatingOffers).unwrap();
        let m = SharingMatrix::scalar(4, 0.2).unwrap();
        let c = WorkerSet::full(4);
        let wage = crate::alt_offers::wbar_alt(c, &params, &m) / 4.0;
        let report = estimate(&SimConfig::new(20_000, 17, EquilibriumCandidate::uniform(c, wage, 4)), &params, &m).unwrap();
        assert_eq!(report.single_crossing_violations, 0);
        assert!(report.max_abs_z() < 4.5, "{}", report.to_csv());
    }

    #[test]
    fn pairwise_sum_matches_naive() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64 * 0.5).collect();
        assert_eq!(pairwise_sum(&xs), xs.iter().sum::<f64>());
    }

    #[test]
    fn csv_has_one_row_per_episode() {
        let (params, m) = p0();
        let cand = EquilibriumCandidate::uniform(WorkerSet::full(4), 1.1, 4);
        let sim = Simulator::new(SimConfig::new(3, 1, cand), &params, &m).unwrap();
        let recs: Vec<_> = (0..3).map(|t| sim.episode(t)).collect();
        let csv = episodes_csv(&recs);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with("trial,firm_type"));
    }
}
