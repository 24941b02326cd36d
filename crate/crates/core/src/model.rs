//! Primitive data of the economy: parameters, the worker population, the
//! wage-sharing matrix and the observability functions built on it.

use std::fmt;

use crate::error::{Error, Result};

/// Absolute tolerance for every (in)equality tested on model quantities.
pub const EPS: f64 = 1e-9;

/// Largest universe handed to exhaustive subset enumeration.
pub const ENUMERATION_LIMIT: usize = 20;

pub type WorkerId = usize;

/// Which stage game the workers and the firm play in each period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Variant {
    /// Two worker-proposal rounds per period.
    #[default]
    Simple,
    /// Infinite-horizon alternating offers within each period.
    AlternatingOffers,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Simple => "simple",
            Variant::AlternatingOffers => "alternating",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "simple" => Ok(Variant::Simple),
            "alternating" => Ok(Variant::AlternatingOffers),
            other => Err(Error::UnknownName { kind: "game", name: other.to_string() }),
        }
    }
}

/// Scalar primitives of the economy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Per-period output at the low-type firm.
    pub s_low: f64,
    /// Per-period output at the high-type firm.
    pub s_high: f64,
    /// Prior probability that the firm is the high type.
    pub p: f64,
    /// Discount factor between periods.
    pub beta: f64,
    /// Discount factor between bargaining rounds.
    pub delta: f64,
    /// Workers' outside option is `-d`.
    pub d: f64,
    pub n_workers: usize,
    pub variant: Variant,
}

impl ModelParams {
    pub fn new(
        s_low: f64,
        s_high: f64,
        p: f64,
        beta: f64,
        delta: f64,
        d: f64,
        n_workers: usize,
        variant: Variant,
    ) -> Result<Self> {
        let params = ModelParams { s_low, s_high, p, beta, delta, d, n_workers, variant };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParams(msg.to_string()));
        if !(self.s_low > 0.0 && self.s_low < self.s_high) {
            return bad("require 0 < s_low < s_high");
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return bad("require 0 < p < 1");
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return bad("require 0 < beta <= 1");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("require 0 < delta < 1");
        }
        if !(self.d > 0.0) {
            return bad("require d > 0");
        }
        if self.n_workers == 0 || self.n_workers > WorkerSet::CAPACITY {
            return bad("require 1 <= n_workers <= 64");
        }
        Ok(())
    }

    /// An uninformed worker's last-round offer is `s_low` when
    /// `p * s_high - d < s_low`.
    pub fn outside_option_assumption_holds(&self) -> bool {
        self.p * self.s_high - self.d < self.s_low
    }

    pub fn surplus_gap(&self) -> f64 {
        self.s_high - self.s_low
    }

    /// Screening cutoff `s_low / s_high`.
    pub fn p_star(&self) -> f64 {
        self.s_low / self.s_high
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn with_n_workers(mut self, n: usize) -> Self {
        self.n_workers = n;
        self
    }
}

/// A set of workers stored as a bitmask over dense ids `0..64`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct WorkerSet(u64);

impl WorkerSet {
    pub const CAPACITY: usize = 64;

    pub const fn empty() -> Self {
        WorkerSet(0)
    }

    pub fn full(n: usize) -> Self {
        assert!(n <= Self::CAPACITY);
        if n == Self::CAPACITY {
            WorkerSet(u64::MAX)
        } else {
            WorkerSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: WorkerId) -> Self {
        WorkerSet(1u64 << i)
    }

    /// The first `k` ids of `self`, in increasing order.
    pub fn first(self, k: usize) -> Self {
        self.iter().take(k).collect()
    }

    pub const fn from_bits(bits: u64) -> Self {
        WorkerSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, i: WorkerId) -> bool {
        i < Self::CAPACITY && self.0 & (1u64 << i) != 0
    }

    pub fn with(self, i: WorkerId) -> Self {
        WorkerSet(self.0 | (1u64 << i))
    }

    pub fn without(self, i: WorkerId) -> Self {
        WorkerSet(self.0 & !(1u64 << i))
    }

    pub fn union(self, other: Self) -> Self {
        WorkerSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        WorkerSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        WorkerSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Highest id in the set plus one, or 0 for the empty set.
    pub fn bound(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = WorkerId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }

    /// Every subset of `self`, starting from the empty set.
    pub fn subsets(self) -> impl Iterator<Item = WorkerSet> {
        let mask = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == mask { None } else { Some((cur.wrapping_sub(mask)) & mask) };
            Some(WorkerSet(cur))
        })
    }
}

impl FromIterator<WorkerId> for WorkerSet {
    fn from_iter<I: IntoIterator<Item = WorkerId>>(iter: I) -> Self {
        iter.into_iter().fold(WorkerSet::empty(), WorkerSet::with)
    }
}

impl fmt::Debug for WorkerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for WorkerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", ids.join(","))
    }
}

/// Probabilities `rho[i][j]` that worker `i` sees worker `j`'s first-period wage.
#[derive(Debug, Clone, PartialEq)]
pub struct SharingMatrix {
    n: usize,
    rho: Vec<f64>,
}

impl SharingMatrix {
    /// Every off-diagonal entry equal to `rho`.
    pub fn scalar(n: usize, rho: f64) -> Result<Self> {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { rho }).collect())
            .collect::<Vec<Vec<f64>>>();
        Self::from_rows(rows)
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || n > WorkerSet::CAPACITY {
            return Err(Error::InvalidMatrix(format!("unsupported dimension {n}")));
        }
        let mut rho = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMatrix(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            for (j, v) in row.into_iter().enumerate() {
                if i == j && v != 0.0 {
                    return Err(Error::InvalidMatrix(format!("diagonal entry ({i},{i}) must be 0")));
                }
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidMatrix(format!("entry ({i},{j}) = {v} is not a probability")));
                }
                rho.push(v);
            }
        }
        Ok(SharingMatrix { n, rho })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: WorkerId, j: WorkerId) -> f64 {
        self.rho[i * self.n + j]
    }

    /// The common off-diagonal value when the matrix is scalar-symmetric.
    pub fn scalar_value(&self) -> Option<f64> {
        if self.n == 1 {
            return Some(0.0);
        }
        let first = self.get(0, 1);
        let uniform = (0..self.n)
            .all(|i| (0..self.n).all(|j| i == j || (self.get(i, j) - first).abs() <= EPS));
        uniform.then_some(first)
    }

    /// Probability that `j` sees none of the wages in `set`.
    pub fn miss_prob(&self, j: WorkerId, set: WorkerSet) -> f64 {
        set.iter().map(|k| 1.0 - self.get(j, k)).product()
    }

    /// Observability of `set` to `j` without membership checks.
    pub fn observe(&self, j: WorkerId, set: WorkerSet) -> f64 {
        1.0 - self.miss_prob(j, set)
    }

    fn check_id(&self, j: WorkerId) -> Result<()> {
        if j >= self.n {
            Err(Error::IndexOutOfRange { worker: j, n: self.n })
        } else {
            Ok(())
        }
    }

    fn check_set(&self, set: WorkerSet) -> Result<()> {
        match set.bound() {
            b if b > self.n => Err(Error::IndexOutOfRange { worker: b - 1, n: self.n }),
            _ => Ok(()),
        }
    }

    pub fn all(&self) -> WorkerSet {
        WorkerSet::full(self.n)
    }
}

/// Workers who will screen at the prior and workers who never do.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkerPartition {
    pub screeners_pool: WorkerSet,
    pub reluctant_pool: WorkerSet,
    /// Belief above which a reluctant worker screens in the second period.
    pub q_reluctant: f64,
}

impl WorkerPartition {
    pub fn new(screeners_pool: WorkerSet, reluctant_pool: WorkerSet, q_reluctant: f64, params: &ModelParams) -> Result<Self> {
        let all = WorkerSet::full(params.n_workers);
        if !screeners_pool.intersection(reluctant_pool).is_empty() {
            return Err(Error::PartitionViolation("screener and reluctant pools overlap".into()));
        }
        if screeners_pool.union(reluctant_pool) != all {
            return Err(Error::PartitionViolation("pools do not cover every worker".into()));
        }
        if !(q_reluctant > params.p && q_reluctant <= 1.0) {
            return Err(Error::PartitionViolation(format!(
                "q_reluctant {q_reluctant} must lie in (p, 1]"
            )));
        }
        Ok(WorkerPartition { screeners_pool, reluctant_pool, q_reluctant })
    }

    /// Every worker willing to screen.
    pub fn all_screeners(params: &ModelParams) -> Self {
        WorkerPartition {
            screeners_pool: WorkerSet::full(params.n_workers),
            reluctant_pool: WorkerSet::empty(),
            q_reluctant: 1.0,
        }
    }

    /// The first `n - reluctant` workers screen, the rest are reluctant.
    pub fn split(params: &ModelParams, reluctant: usize, q_reluctant: f64) -> Result<Self> {
        let n = params.n_workers;
        if reluctant > n {
            return Err(Error::PartitionViolation(format!("{reluctant} reluctant workers among {n}")));
        }
        let screeners = WorkerSet::full(n - reluctant);
        Self::new(screeners, WorkerSet::full(n).difference(screeners), q_reluctant, params)
    }
}

/// First-period offers of the screening workers.
#[derive(Debug, Clone, PartialEq)]
pub struct WageProfile {
    offers: Vec<Option<f64>>,
}

impl WageProfile {
    pub fn uniform(set: WorkerSet, wage: f64, n: usize) -> Self {
        let offers = (0..n).map(|i| set.contains(i).then_some(wage)).collect();
        WageProfile { offers }
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (WorkerId, f64)>) -> Result<Self> {
        let mut offers = vec![None; n];
        for (i, w) in pairs {
            if i >= n {
                return Err(Error::IndexOutOfRange { worker: i, n });
            }
            if !(w > 0.0) {
                return Err(Error::DomainError(format!("offer {w} for worker {i} must be positive")));
            }
            offers[i] = Some(w);
        }
        Ok(WageProfile { offers })
    }

    pub fn domain(&self) -> WorkerSet {
        self.offers.iter().enumerate().filter(|(_, w)| w.is_some()).map(|(i, _)| i).collect()
    }

    pub fn get(&self, i: WorkerId) -> Option<f64> {
        self.offers.get(i).copied().flatten()
    }

    /// Offer of a worker known to be in the domain.
    pub fn wage(&self, i: WorkerId) -> f64 {
        self.get(i).unwrap_or(f64::NAN)
    }

    pub fn sum_over(&self, set: WorkerSet) -> f64 {
        set.iter().map(|i| self.wage(i)).sum()
    }

    pub fn with_offer(&self, i: WorkerId, w: f64) -> Self {
        let mut offers = self.offers.clone();
        if i >= offers.len() {
            offers.resize(i + 1, None);
        }
        offers[i] = Some(w);
        WageProfile { offers }
    }

    pub fn check_domain(&self, set: WorkerSet) -> Result<()> {
        if self.domain() == set {
            Ok(())
        } else {
            Err(Error::ProfileMismatch)
        }
    }

    /// Common offer if every offer in the domain is equal.
    pub fn uniform_wage(&self) -> Option<f64> {
        let mut it = self.offers.iter().flatten();
        let first = *it.next()?;
        it.all(|w| (w - first).abs() <= EPS).then_some(first)
    }
}

/// Observability `P^j(C)`: chance that outsider `j` sees at least one wage in `set`.
pub fn observe_prob(j: WorkerId, set: WorkerSet, m: &SharingMatrix) -> Result<f64> {
    m.check_id(j)?;
    m.check_set(set)?;
    if set.contains(j) {
        return Err(Error::MemberQuery(j));
    }
    Ok(m.observe(j, set))
}

/// Expected number of outsiders who observe some wage in `set`.
pub fn expected_observers(set: WorkerSet, m: &SharingMatrix) -> f64 {
    if set.is_empty() {
        return 0.0;
    }
    m.all().difference(set).iter().map(|j| m.observe(j, set)).sum()
}

/// Closed form of [`expected_observers`] under a scalar matrix.
pub fn expected_observers_symmetric(rho: f64, n: usize, size: usize) -> f64 {
    if size == 0 || size >= n {
        return 0.0;
    }
    (n - size) as f64 * (1.0 - (1.0 - rho).powi(size as i32))
}

/// Outcome of exhaustively testing submodularity of `P^j` on a universe.
#[derive(Debug, Clone, PartialEq)]
pub struct SubmodularityReport {
    pub observer: WorkerId,
    pub pairs_checked: usize,
    /// Pairs with `P(A) + P(B) < P(A∩B) + P(A∪B) - EPS`.
    pub violations: Vec<(WorkerSet, WorkerSet, f64)>,
    pub strict_pairs: usize,
    /// Pairs where observed strictness disagrees with the three conditions
    /// (intersection condition read as "no certain observation in `A∩B`").
    pub condition_mismatches: Vec<(WorkerSet, WorkerSet)>,
    /// Pairs where observed strictness disagrees with the literal
    /// "some k in `A∩B` has `rho < 1`" reading; differs only on disjoint pairs.
    pub literal_condition_mismatches: usize,
}

impl SubmodularityReport {
    pub fn weakly_submodular(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn strictness_matches_conditions(&self) -> bool {
        self.condition_mismatches.is_empty()
    }
}

/// Three conditions under which `P^j` is strictly submodular on `(a, b)`.
/// Returns `(intersection_ok, a_minus_b_ok, b_minus_a_ok)` with the
/// intersection condition as "every k in `a∩b` has `rho < 1`".
pub fn strictness_conditions(m: &SharingMatrix, j: WorkerId, a: WorkerSet, b: WorkerSet) -> (bool, bool, bool) {
    let inter = a.intersection(b);
    let first = inter.iter().all(|k| m.get(j, k) < 1.0);
    let second = a.difference(b).iter().any(|k| m.get(j, k) > 0.0);
    let third = b.difference(a).iter().any(|k| m.get(j, k) > 0.0);
    (first, second, third)
}

pub fn submodularity_report(m: &SharingMatrix, j: WorkerId, universe: WorkerSet) -> Result<SubmodularityReport> {
    m.check_id(j)?;
    m.check_set(universe)?;
    let universe = universe.without(j);
    if universe.len() > ENUMERATION_LIMIT {
        return Err(Error::UniverseTooLarge { size: universe.len(), limit: ENUMERATION_LIMIT });
    }
    let subsets: Vec<WorkerSet> = universe.subsets().collect();
    let values: Vec<f64> = subsets.iter().map(|&s| m.observe(j, s)).collect();
    let value_of = |s: WorkerSet| m.observe(j, s);

    let mut report = SubmodularityReport {
        observer: j,
        pairs_checked: 0,
        violations: Vec::new(),
        strict_pairs: 0,
        condition_mismatches: Vec::new(),
        literal_condition_mismatches: 0,
    };
    for (ia, &a) in subsets.iter().enumerate() {
        for (ib, &b) in subsets.iter().enumerate().skip(ia) {
            report.pairs_checked += 1;
            let slack = values[ia] + values[ib] - value_of(a.intersection(b)) - value_of(a.union(b));
            if slack < -EPS {
                report.violations.push((a, b, slack));
            }
            // same slack on miss probabilities, strict when it clears its own rounding bound
            let miss = [a.intersection(b), a.union(b), a, b].map(|s| m.miss_prob(j, s));
            let exact = miss[0] + miss[1] - miss[2] - miss[3];
            let strict = exact > 64.0 * f64::EPSILON * miss.iter().sum::<f64>();
            if strict {
                report.strict_pairs += 1;
            }
            let (c1, c2, c3) = strictness_conditions(m, j, a, b);
            if strict != (c1 && c2 && c3) {
                report.condition_mismatches.push((a, b));
            }
            let literal_c1 = a.intersection(b).iter().any(|k| m.get(j, k) < 1.0);
            if strict != (literal_c1 && c2 && c3) {
                report.literal_condition_mismatches += 1;
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PbarSeries {
    /// `(|C|, P̄(C)/|C|)` for `|C| = 1..=n`.
    pub ratios: Vec<(usize, f64)>,
    pub strictly_decreasing: bool,
}

/// Per-screener expected observers under a scalar matrix, for every screening-set size.
pub fn pbar_ratio_series(rho: f64, n_workers: usize) -> Result<PbarSeries> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::DomainError(format!("rho = {rho} must lie in (0, 1)")));
    }
    let ratios: Vec<(usize, f64)> = (1..=n_workers)
        .map(|k| (k, expected_observers_symmetric(rho, n_workers, k) / k as f64))
        .collect();
    let strictly_decreasing = ratios.windows(2).all(|w| w[1].1 < w[0].1 - EPS);
    Ok(PbarSeries { ratios, strictly_decreasing })
}
