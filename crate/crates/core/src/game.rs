//! Stage-game variants behind one interface, registered by name.
//!
//! The solver only talks to [`BargainingGame`]; the simple game, the
//! alternating-offers game and the discrimination wrapper plug in here.

use std::collections::BTreeMap;

use crate::alt_offers::{intermediate_beliefs_range, lowtype_slack, pool_deviate_feasible, wbar_alt};
use crate::error::{Error, Result};
use crate::model::{ModelParams, SharingMatrix, Variant, WageProfile, WorkerId, WorkerPartition, WorkerSet, EPS};
use crate::payoff::{screening_value, wbar, wtilde, WorkerValues};
use crate::play::{rejection_posterior, Scenario, StageRules};

/// Largest universe enumerated subset by subset when no symmetry is available.
pub const SUBSET_LIMIT: usize = 16;

/// A screening set, its offers and the high type's probability of rejecting everyone.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumCandidate {
    pub screening: WorkerSet,
    pub offers: WageProfile,
    pub sigma: f64,
}

impl EquilibriumCandidate {
    pub fn pure(screening: WorkerSet, offers: WageProfile) -> Self {
        EquilibriumCandidate { screening, offers, sigma: 0.0 }
    }

    pub fn uniform(screening: WorkerSet, wage: f64, n: usize) -> Self {
        Self::pure(screening, WageProfile::uniform(screening, wage, n))
    }

    pub fn no_screening(n: usize) -> Self {
        Self::uniform(WorkerSet::empty(), 0.0, n)
    }

    /// High type's acceptance lottery on path.
    pub fn policy(&self) -> Vec<(f64, WorkerSet)> {
        if self.sigma > 0.0 {
            vec![(1.0 - self.sigma, self.screening), (self.sigma, WorkerSet::empty())]
        } else {
            vec![(1.0, self.screening)]
        }
    }
}

/// Values of one worker on path and under its unilateral deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationValues {
    pub on_path: f64,
    /// `None` when the worker has no deviation the low type would reject.
    pub deviation: Option<f64>,
    /// Highest screening wage the high type accepts from a deviating pooler.
    pub deviation_wage: Option<f64>,
}

impl DeviationValues {
    pub fn slack(&self) -> f64 {
        self.deviation.map_or(f64::INFINITY, |d| self.on_path - d)
    }
}

/// A two-period screening game with a firm of unknown type.
pub trait BargainingGame: Send + Sync {
    fn name(&self) -> &'static str;
    fn params(&self) -> &ModelParams;
    fn matrix(&self) -> &SharingMatrix;
    fn partition(&self) -> &WorkerPartition;

    fn rules(&self) -> StageRules {
        StageRules::new(*self.params())
    }

    /// Errors when the game's standing assumptions fail for these parameters.
    fn precondition(&self) -> Result<()> {
        Ok(())
    }

    /// Period-1 scenario of a candidate, with rejection beliefs from its `σ`.
    fn scenario<'a>(&'a self, offers: &'a WageProfile, sigma: f64) -> Scenario<'a> {
        let mut sc = Scenario::on_path(self.rules(), self.matrix(), offers, Some(self.partition()));
        sc.rejection_belief = rejection_posterior(self.params().p, sigma);
        sc
    }

    /// High type's payoff from accepting `accepted` within a scenario.
    fn firm_payoff_in(&self, accepted: WorkerSet, sc: &Scenario) -> f64 {
        sc.firm_high(accepted)
    }

    /// Worker `k`'s value within a scenario against an acceptance lottery.
    fn worker_value_in(&self, k: WorkerId, sc: &Scenario, policy: &[(f64, WorkerSet)]) -> f64 {
        sc.worker_value(k, policy)
    }

    /// Wage sum leaving the high type indifferent between accepting all of `C` and none.
    fn wage_sum(&self, screening: WorkerSet) -> Result<f64>;

    /// Margin by which the low type prefers rejecting the candidate's offers.
    fn lowtype_slack(&self, cand: &EquilibriumCandidate) -> Result<f64>;

    /// Highest wage the high type accepts from pooler `j` deviating to screening,
    /// or `None` if no such offer would be rejected by the low type.
    fn deviation_wage(&self, cand: &EquilibriumCandidate, j: WorkerId) -> Result<Option<f64>>;

    /// Features that make two workers interchangeable, beyond the offer they make.
    fn worker_tag(&self, k: WorkerId) -> u64 {
        let part = self.partition();
        u64::from(part.reluctant_pool.contains(k)) | u64::from(part.screeners_pool.contains(k)) << 1
    }

    /// Partition of all workers into classes any permutation of which leaves
    /// payoffs unchanged, or `None` when the matrix is not scalar.
    fn worker_classes(&self, offers: &WageProfile) -> Option<Vec<WorkerSet>> {
        self.matrix().scalar_value()?;
        let mut groups: BTreeMap<(Option<u64>, u64), WorkerSet> = BTreeMap::new();
        for k in 0..self.matrix().n() {
            let key = (offers.get(k).map(f64::to_bits), self.worker_tag(k));
            let e = groups.entry(key).or_insert(WorkerSet::empty());
            *e = e.with(k);
        }
        Some(groups.into_values().collect())
    }

    fn firm_payoff(&self, accepted: WorkerSet, cand: &EquilibriumCandidate) -> f64 {
        self.firm_payoff_in(accepted, &self.scenario(&cand.offers, cand.sigma))
    }

    fn screener_values(&self, i: WorkerId, cand: &EquilibriumCandidate) -> DeviationValues {
        let sc = self.scenario(&cand.offers, cand.sigma);
        let on_path = self.worker_value_in(i, &sc, &cand.policy());
        // the deviator knows the remaining rejections are its own doing
        let rest = WageProfile::from_pairs(
            self.matrix().n(),
            cand.screening.without(i).iter().map(|k| (k, cand.offers.wage(k))),
        )
        .expect("offers of a valid candidate");
        let mut dev = self.scenario(&rest, cand.sigma);
        dev.informative = WorkerSet::empty();
        let deviation = self.worker_value_in(i, &dev, &[(1.0, WorkerSet::empty())]);
        DeviationValues { on_path, deviation: Some(deviation), deviation_wage: None }
    }

    fn pooler_values(&self, j: WorkerId, cand: &EquilibriumCandidate) -> Result<DeviationValues> {
        let sc = self.scenario(&cand.offers, cand.sigma);
        let on_path = self.worker_value_in(j, &sc, &cand.policy());
        if self.partition().reluctant_pool.contains(j) {
            return Ok(DeviationValues { on_path, deviation: None, deviation_wage: None });
        }
        let wage = self.deviation_wage(cand, j)?;
        let deviation = wage.map(|w| {
            let offers = cand.offers.with_offer(j, w);
            let joined = cand.screening.with(j);
            let dev = EquilibriumCandidate { screening: joined, offers, sigma: cand.sigma };
            let sc = self.scenario(&dev.offers, dev.sigma);
            self.worker_value_in(j, &sc, &dev.policy())
        });
        Ok(DeviationValues { on_path, deviation, deviation_wage: wage })
    }
}

/// Closed-form style summary of a worker's values in `game`.
pub fn game_worker_values(game: &dyn BargainingGame, i: WorkerId, cand: &EquilibriumCandidate) -> Result<WorkerValues> {
    if i >= game.matrix().n() {
        return Err(Error::IndexOutOfRange { worker: i, n: game.matrix().n() });
    }
    cand.offers.check_domain(cand.screening)?;
    if cand.screening.contains(i) {
        let v = game.screener_values(i, cand);
        return Ok(WorkerValues { screen_value: Some(v.on_path), screen_to_pool_deviation: v.deviation, ..WorkerValues::default() });
    }
    let v = game.pooler_values(i, cand)?;
    Ok(WorkerValues {
        pool_value: Some(v.on_path),
        pool_to_screen_deviation: v.deviation,
        deviation_wage: v.deviation_wage,
        ..WorkerValues::default()
    })
}

/// Subsets of `universe` that represent every payoff-distinct acceptance set.
pub fn representatives(universe: WorkerSet, classes: Option<&[WorkerSet]>) -> Result<Vec<WorkerSet>> {
    match classes {
        Some(cls) => {
            let mut reps = vec![WorkerSet::empty()];
            for class in cls.iter().map(|c| c.intersection(universe)).filter(|c| !c.is_empty()) {
                reps = reps
                    .iter()
                    .flat_map(|&r| (0..=class.len()).map(move |k| r.union(class.first(k))))
                    .collect();
            }
            Ok(reps)
        }
        None if universe.len() > SUBSET_LIMIT => {
            Err(Error::UniverseTooLarge { size: universe.len(), limit: SUBSET_LIMIT })
        }
        None => Ok(universe.subsets().collect()),
    }
}

/// Highest acceptable screening wage for pooler `j`, found by comparing the
/// high type's best acceptance sets with and without `j`.
pub fn brute_deviation_wage<G: BargainingGame + ?Sized>(game: &G, cand: &EquilibriumCandidate, j: WorkerId, placeholder: f64) -> Result<f64> {
    let offers = cand.offers.with_offer(j, placeholder);
    let mut sc = game.scenario(&offers, cand.sigma);
    // a rejected deviator's fallback wage matches what a pooler earns
    sc.informative = cand.screening;
    let joined = cand.screening.with(j);
    let classes = game.worker_classes(&offers);
    let mut with_j = f64::NEG_INFINITY;
    let mut without_j = f64::NEG_INFINITY;
    for a in representatives(joined, classes.as_deref())? {
        let v = game.firm_payoff_in(a, &sc);
        if a.contains(j) {
            with_j = with_j.max(v);
        } else {
            without_j = without_j.max(v);
        }
    }
    Ok(placeholder + with_j - without_j)
}

/// The baseline game: take-it-or-leave-it offers each period.
#[derive(Debug, Clone)]
pub struct SimpleGame {
    params: ModelParams,
    m: SharingMatrix,
    partition: WorkerPartition,
}

impl SimpleGame {
    pub fn new(params: ModelParams, m: SharingMatrix, partition: WorkerPartition) -> Result<Self> {
        check_shapes(&params, &m)?;
        let params = ModelParams { variant: Variant::Simple, ..params };
        Ok(SimpleGame { params, m, partition })
    }

    /// Deviation value of pooler `j` at the displayed closed-form wage.
    pub fn displayed_deviation_value(&self, cand: &EquilibriumCandidate, j: WorkerId) -> Result<f64> {
        Ok(screening_value(wtilde(cand.screening, j, &self.params, &self.m)?, &self.params))
    }
}

fn check_shapes(params: &ModelParams, m: &SharingMatrix) -> Result<()> {
    params.validate()?;
    if m.n() != params.n_workers {
        return Err(Error::InvalidMatrix(format!("matrix has {} workers, parameters {}", m.n(), params.n_workers)));
    }
    Ok(())
}

impl BargainingGame for SimpleGame {
    fn name(&self) -> &'static str {
        "simple"
    }

    fn params(&self) -> &ModelParams {
        &self.params
    }

    fn matrix(&self) -> &SharingMatrix {
        &self.m
    }

    fn partition(&self) -> &WorkerPartition {
        &self.partition
    }

    fn wage_sum(&self, screening: WorkerSet) -> Result<f64> {
        Ok(wbar(screening, &self.params, &self.m))
    }

    fn lowtype_slack(&self, cand: &EquilibriumCandidate) -> Result<f64> {
        Ok(cand.screening.iter().map(|i| cand.offers.wage(i) - self.params.s_low).fold(f64::INFINITY, f64::min))
    }

    fn deviation_wage(&self, cand: &EquilibriumCandidate, j: WorkerId) -> Result<Option<f64>> {
        let w = brute_deviation_wage(self, cand, j, 0.0)?;
        Ok((w > self.params.s_low + EPS).then_some(w))
    }
}

/// Rubinstein bargaining within each period.
#[derive(Debug, Clone)]
pub struct AlternatingGame {
    params: ModelParams,
    m: SharingMatrix,
    partition: WorkerPartition,
}

impl AlternatingGame {
    pub fn new(params: ModelParams, m: SharingMatrix, partition: WorkerPartition) -> Result<Self> {
        check_shapes(&params, &m)?;
        let params = ModelParams { variant: Variant::AlternatingOffers, ..params };
        Ok(AlternatingGame { params, m, partition })
    }
}

impl BargainingGame for AlternatingGame {
    fn name(&self) -> &'static str {
        "alternating"
    }

    fn params(&self) -> &ModelParams {
        &self.params
    }

    fn matrix(&self) -> &SharingMatrix {
        &self.m
    }

    fn partition(&self) -> &WorkerPartition {
        &self.partition
    }

    fn precondition(&self) -> Result<()> {
        if intermediate_beliefs_range(&self.params).contains_prior {
            Ok(())
        } else {
            Err(Error::BeliefsNotIntermediate(self.params.p))
        }
    }

    fn wage_sum(&self, screening: WorkerSet) -> Result<f64> {
        Ok(wbar_alt(screening, &self.params, &self.m))
    }

    fn lowtype_slack(&self, cand: &EquilibriumCandidate) -> Result<f64> {
        if cand.screening.is_empty() {
            return Ok(f64::INFINITY);
        }
        lowtype_slack(cand.screening, &cand.offers, &self.params, &self.m)
    }

    fn deviation_wage(&self, cand: &EquilibriumCandidate, j: WorkerId) -> Result<Option<f64>> {
        if !pool_deviate_feasible(cand.screening, j, &self.params, &self.m)?.holds {
            return Ok(None);
        }
        let c = cand.screening;
        Ok(Some(self.wage_sum(c.with(j))? - self.wage_sum(c)?))
    }
}

pub type GameBuilder = fn(ModelParams, SharingMatrix, WorkerPartition) -> Result<Box<dyn BargainingGame>>;

/// Registered game variants.
pub const GAMES: &[(&str, GameBuilder)] = &[
    ("simple", |p, m, w| Ok(Box::new(SimpleGame::new(p, m, w)?))),
    ("alternating", |p, m, w| Ok(Box::new(AlternatingGame::new(p, m, w)?))),
];

pub fn game_names() -> impl Iterator<Item = &'static str> {
    GAMES.iter().map(|(n, _)| *n)
}

pub fn build_game(name: &str, params: ModelParams, m: SharingMatrix, partition: WorkerPartition) -> Result<Box<dyn BargainingGame>> {
    let (_, build) = GAMES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::UnknownName { kind: "game", name: name.to_string() })?;
    build(params, m, partition)
}

/// The game matching `params.variant`.
pub fn game_for(params: ModelParams, m: SharingMatrix, partition: WorkerPartition) -> Result<Box<dyn BargainingGame>> {
    build_game(params.variant.name(), params, m, partition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payoff::{firm_payoff, pooling_value, uninformed_pooling_value, wtilde_indifference};
    use approx::assert_abs_diff_eq;

    fn p0() -> SimpleGame {
        let params = ModelParams::new(1.0, 2.0, 0.6, 0.4, 0.5, 0.5, 4, Variant::Simple).unwrap();
        let m = SharingMatrix::scalar(4, 0.2).unwrap();
        SimpleGame::new(params, m, WorkerPartition::all_screeners(&params)).unwrap()
    }

    #[test]
    fn registry_builds_by_name() {
        let g = p0();
        for name in game_names() {
            let b = build_game(name, g.params, g.m.clone(), g.partition).unwrap();
            assert_eq!(b.name(), name);
        }
        assert!(matches!(
            build_game("ultimatum", g.params, g.m.clone(), g.partition),
            Err(Error::UnknownName { .. })
        ));
        assert_eq!(game_for(g.params.with_p(0.45), g.m.clone(), g.partition).unwrap().name(), "simple");
    }

    #[test]
    fn representatives_cover_sizes() {
        let u = WorkerSet::full(5);
        let cls = [WorkerSet::full(3), WorkerSet::full(5).difference(WorkerSet::full(3))];
        let reps = representatives(u, Some(&cls)).unwrap();
        assert_eq!(reps.len(), 4 * 3);
        assert_eq!(representatives(u, None).unwrap().len(), 32);
        assert!(matches!(representatives(WorkerSet::full(17), None), Err(Error::UniverseTooLarge { .. })));
    }

    #[test]
    fn classes_follow_offers() {
        let g = p0();
        let c = WorkerSet::full(3);
        let cand = EquilibriumCandidate::uniform(c, 1.03, 4);
        let cls = g.worker_classes(&cand.offers).unwrap();
        assert_eq!(cls.len(), 2);
        assert!(cls.contains(&c));
    }

    #[test]
    fn game_payoff_matches_display() {
        let g = p0();
        let c = WorkerSet::full(3);
        let cand = EquilibriumCandidate::uniform(c, 1.1, 4);
        for a in c.subsets() {
            assert_abs_diff_eq!(
                g.firm_payoff(a, &cand),
                firm_payoff(a, c, &cand.offers, &g.params, &g.m).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn brute_deviation_wage_matches_indifference_form() {
        let g = p0();
        let c = WorkerSet::full(3);
        let w = wbar(c, &g.params, &g.m) / 3.0;
        let cand = EquilibriumCandidate::uniform(c, w, 4);
        let brute = g.deviation_wage(&cand, 3).unwrap().unwrap();
        assert_abs_diff_eq!(brute, wtilde_indifference(c, 3, &g.params, &g.m).unwrap(), epsilon = 1e-12);
        assert_abs_diff_eq!(brute, 1.2952, epsilon = 1e-12);
        let none = EquilibriumCandidate::no_screening(4);
        // 0.98 is below s', so the pooler has no screening deviation
        assert_abs_diff_eq!(brute_deviation_wage(&g, &none, 0, 0.0).unwrap(), 0.98, epsilon = 1e-12);
        assert_eq!(g.deviation_wage(&none, 0).unwrap(), None);
    }

    #[test]
    fn engine_values_match_closed_forms() {
        let g = p0();
        let c = WorkerSet::full(3);
        let cand = EquilibriumCandidate::uniform(c, 1.03493, 4);
        let s = g.screener_values(0, &cand);
        assert_abs_diff_eq!(s.on_path, screening_value(1.03493, &g.params), epsilon = 1e-12);
        assert_abs_diff_eq!(s.deviation.unwrap(), uninformed_pooling_value(&g.params), epsilon = 1e-12);
        let pv = g.pooler_values(3, &cand).unwrap();
        assert_abs_diff_eq!(pv.on_path, pooling_value(3, c, &g.params, &g.m), epsilon = 1e-12);
        assert_abs_diff_eq!(pv.on_path, 1.5376, epsilon = 1e-12);
    }

    #[test]
    fn alternating_requires_intermediate_beliefs() {
        let g = p0();
        let alt = AlternatingGame::new(g.params, g.m.clone(), g.partition).unwrap();
        assert!(matches!(alt.precondition(), Err(Error::BeliefsNotIntermediate(_))));
        let ok = AlternatingGame::new(g.params.with_p(0.45), g.m.clone(), g.partition).unwrap();
        assert!(ok.precondition().is_ok());
    }
}
