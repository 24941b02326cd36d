//! Named property suites over random and grid parameterizations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::alt_offers::{firm_payoff_alt, wbar_alt};
use crate::error::{Error, Result};
use crate::model::{pbar_ratio_series, submodularity_report, ModelParams, SharingMatrix, Variant, WageProfile, WorkerSet, EPS};
use crate::payoff::{firm_payoff, supermodularity_of, wbar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub draws: usize,
    /// Fixed worker count for random draws; `None` draws it per case.
    pub workers: Option<usize>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { seed: 1, draws: 100, workers: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub checks: usize,
    pub violations: Vec<String>,
    pub notes: Vec<String>,
}

impl SuiteOutcome {
    fn new(name: &'static str) -> Self {
        SuiteOutcome { name, cases: 0, checks: 0, violations: Vec::new(), notes: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn absorb(&mut self, other: CaseOutcome) {
        self.cases += 1;
        self.checks += other.checks;
        self.violations.extend(other.violations);
        self.notes.extend(other.notes);
    }
}

#[derive(Default)]
struct CaseOutcome {
    checks: usize,
    violations: Vec<String>,
    notes: Vec<String>,
}

pub type Suite = fn(&SuiteOptions) -> Result<SuiteOutcome>;

pub const SUITES: &[(&str, Suite)] = &[
    ("submodularity", submodularity_suite),
    ("supermodularity", supermodularity_suite),
    ("indifference", indifference_suite),
    ("monotonicity", monotonicity_suite),
];

pub fn suite_by_name(name: &str) -> Result<Suite> {
    SUITES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|&(_, s)| s)
        .ok_or_else(|| Error::UnknownName { kind: "property suite", name: name.to_string() })
}

fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    rng
}

/// Uniform on the open interval `(lo, hi)`.
fn open(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    loop {
        let x = rng.random::<f64>();
        if x > 0.0 {
            return lo + (hi - lo) * x;
        }
    }
}

/// Random matrix with every off-diagonal entry in `(0, 1)`.
pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> Result<SharingMatrix> {
    let rows = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0.0 } else { open(rng, 0.0, 1.0) }).collect())
        .collect();
    SharingMatrix::from_rows(rows)
}

fn random_params(rng: &mut ChaCha8Rng, n: usize, variant: Variant) -> Result<ModelParams> {
    let s_low = open(rng, 0.5, 2.0);
    let s_high = s_low + open(rng, 0.1, 2.0);
    ModelParams::new(s_low, s_high, open(rng, 0.05, 0.95), open(rng, 0.05, 1.0), open(rng, 0.05, 0.95), open(rng, 0.1, 1.0), n, variant)
}

fn workers(rng: &mut ChaCha8Rng, opts: &SuiteOptions, lo: usize, hi: usize) -> usize {
    opts.workers.unwrap_or_else(|| rng.random_range(lo..=hi))
}

fn run_cases<F>(name: &'static str, cases: usize, f: F) -> Result<SuiteOutcome>
where
    F: Fn(usize) -> Result<CaseOutcome> + Sync + Send,
{
    let outcomes = (0..cases).into_par_iter().map(&f).collect::<Result<Vec<_>>>()?;
    let mut suite = SuiteOutcome::new(name);
    for o in outcomes {
        suite.absorb(o);
    }
    Ok(suite)
}

/// `P^j` submodular for every observer, strict exactly under the three conditions.
pub fn submodularity_suite(opts: &SuiteOptions) -> Result<SuiteOutcome> {
    run_cases("submodularity", opts.draws, |case| {
        let mut rng = case_rng(opts.seed, case);
        let n = workers(&mut rng, opts, 3, 8);
        let m = random_matrix(&mut rng, n)?;
        let mut out = CaseOutcome::default();
        for j in 0..n {
            let r = submodularity_report(&m, j, m.all())?;
            out.checks += r.pairs_checked;
            if let Some((a, b, slack)) = r.violations.first() {
                out.violations.push(format!("case {case}: P^{j} not submodular on {a}, {b} (slack {slack:e})"));
            }
            if let Some((a, b)) = r.condition_mismatches.first() {
                out.violations.push(format!("case {case}: P^{j} strictness disagrees with conditions on {a}, {b}"));
            }
        }
        Ok(out)
    })
}

/// `π(·|C, ω)` supermodular, strictly on non-nested pairs, in both variants.
pub fn supermodularity_suite(opts: &SuiteOptions) -> Result<SuiteOutcome> {
    run_cases("supermodularity", opts.draws, |case| {
        let mut rng = case_rng(opts.seed, case);
        let variant = if case % 2 == 0 { Variant::Simple } else { Variant::AlternatingOffers };
        let n = workers(&mut rng, opts, 2, 6);
        let params = random_params(&mut rng, n, variant)?;
        let m = random_matrix(&mut rng, n)?;
        let c = m.all();
        let pairs = c.iter().map(|i| (i, open(&mut rng, params.s_low, params.s_high)));
        let offers = WageProfile::from_pairs(n, pairs)?;
        let r = match variant {
            Variant::Simple => supermodularity_of(c, |a| firm_payoff(a, c, &offers, &params, &m))?,
            Variant::AlternatingOffers => supermodularity_of(c, |a| firm_payoff_alt(a, c, &offers, &params, &m))?,
        };
        let mut out = CaseOutcome { checks: r.pairs_checked, ..Default::default() };
        if let Some((a, b, slack)) = r.violations.first() {
            out.violations.push(format!("case {case} ({}): not supermodular on {a}, {b} (slack {slack:e})", variant.name()));
        }
        if let Some((a, b)) = r.equality_pairs.first() {
            out.violations.push(format!("case {case} ({}): equality on non-nested {a}, {b}", variant.name()));
        }
        Ok(out)
    })
}

const RHO_GRID: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

/// Uniform `W̄(C)/|C|` leaves the high type indifferent and `C` optimal.
pub fn indifference_suite(opts: &SuiteOptions) -> Result<SuiteOutcome> {
    let max_n = opts.workers.unwrap_or(8);
    let mut grid = Vec::new();
    for variant in [Variant::Simple, Variant::AlternatingOffers] {
        for n in 1..=max_n {
            for size in 1..=n {
                for rho in RHO_GRID {
                    grid.push((variant, n, size, rho));
                }
            }
        }
    }
    run_cases("indifference", grid.len(), |case| {
        let (variant, n, size, rho) = grid[case];
        let p = if variant == Variant::Simple { 0.6 } else { 0.45 };
        let params = ModelParams::new(1.0, 2.0, p, 0.4, 0.5, 0.5, n, variant)?;
        let m = SharingMatrix::scalar(n, rho)?;
        let c = WorkerSet::full(size);
        let (total, pay): (f64, fn(WorkerSet, WorkerSet, &WageProfile, &ModelParams, &SharingMatrix) -> Result<f64>) = match variant {
            Variant::Simple => (wbar(c, &params, &m), firm_payoff),
            Variant::AlternatingOffers => (wbar_alt(c, &params, &m), firm_payoff_alt),
        };
        let offers = WageProfile::uniform(c, total / size as f64, n);
        let full = pay(c, c, &offers, &params, &m)?;
        let none = pay(WorkerSet::empty(), c, &offers, &params, &m)?;
        let mut out = CaseOutcome::default();
        out.checks += 1;
        if (full - none).abs() > 1e-8 {
            out.violations.push(format!("{} n={n} |C|={size} rho={rho}: |pi(C) - pi(0)| = {:e}", variant.name(), (full - none).abs()));
        }
        for a in c.subsets() {
            out.checks += 1;
            let v = pay(a, c, &offers, &params, &m)?;
            if v > full + EPS {
                out.violations.push(format!("{} n={n} |C|={size} rho={rho}: pi({a}) exceeds pi(C) by {:e}", variant.name(), v - full));
                break;
            }
        }
        Ok(out)
    })
}

/// `P̄(C)/|C|` strictly decreasing and `W̄(C)/|C|` strictly increasing in `|C|`;
/// the alternating-offers average-wage direction is reported.
pub fn monotonicity_suite(opts: &SuiteOptions) -> Result<SuiteOutcome> {
    let max_n = opts.workers.unwrap_or(12);
    let grid: Vec<(usize, f64)> = (2..=max_n).flat_map(|n| RHO_GRID.into_iter().map(move |r| (n, r))).collect();
    let mut suite = run_cases("monotonicity", grid.len(), |case| {
        let (n, rho) = grid[case];
        let mut out = CaseOutcome::default();
        let series = pbar_ratio_series(rho, n)?;
        out.checks += series.ratios.len();
        if !series.strictly_decreasing {
            out.violations.push(format!("n={n} rho={rho}: P̄(C)/|C| not strictly decreasing"));
        }
        let m = SharingMatrix::scalar(n, rho)?;
        let simple = ModelParams::new(1.0, 2.0, 0.6, 0.4, 0.5, 0.5, n, Variant::Simple)?;
        let alt = ModelParams::new(1.0, 2.0, 0.45, 0.4, 0.5, 0.5, n, Variant::AlternatingOffers)?;
        let avg = |f: &dyn Fn(WorkerSet) -> f64| -> Vec<f64> { (1..=n).map(|k| f(WorkerSet::full(k)) / k as f64).collect() };
        let simple_avg = avg(&|c| wbar(c, &simple, &m));
        out.checks += simple_avg.len();
        if !simple_avg.windows(2).all(|w| w[1] > w[0] + EPS) {
            out.violations.push(format!("n={n} rho={rho}: W̄(C)/|C| not strictly increasing"));
        }
        let alt_avg = avg(&|c| wbar_alt(c, &alt, &m));
        let up = alt_avg.windows(2).all(|w| w[1] > w[0] + EPS);
        let down = alt_avg.windows(2).all(|w| w[1] < w[0] - EPS);
        let dir = if up { "increasing" } else if down { "decreasing" } else { "mixed" };
        out.notes.push(format!("n={n} rho={rho}: alternating W̄(C)/|C| {dir}"));
        Ok(out)
    })?;
    let dirs: std::collections::BTreeSet<String> =
        suite.notes.iter().filter_map(|s| s.rsplit(' ').next().map(str::to_string)).collect();
    suite.notes = vec![format!("alternating average wage directions: {}", dirs.into_iter().collect::<Vec<_>>().join(", "))];
    Ok(suite)
}
