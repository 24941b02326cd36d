//! Expected payoffs of one round of play, built from the stage rules of a
//! variant rather than from the closed forms. Used to value deviations that
//! have no closed form and as the analytic side of the simulator.

use crate::alt_offers::rubinstein;
use crate::model::{ModelParams, SharingMatrix, Variant, WageProfile, WorkerId, WorkerPartition, WorkerSet, EPS};

/// Per-period wages and acceptance rules of a stage game.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageRules {
    pub params: ModelParams,
}

impl StageRules {
    pub fn new(params: ModelParams) -> Self {
        StageRules { params }
    }

    pub fn variant(&self) -> Variant {
        self.params.variant
    }

    pub fn delay(&self) -> f64 {
        self.params.delta
    }

    pub fn firm_beta(&self) -> f64 {
        self.params.beta
    }

    /// Workers do not discount between periods in the alternating-offers game.
    pub fn worker_beta(&self) -> f64 {
        match self.params.variant {
            Variant::Simple => self.params.beta,
            Variant::AlternatingOffers => 1.0,
        }
    }

    /// Wage both types accept from a worker who reveals nothing.
    pub fn pool_wage(&self) -> f64 {
        match self.params.variant {
            Variant::Simple => self.params.s_low,
            Variant::AlternatingOffers => rubinstein(self.params.s_low, self.params.delta),
        }
    }

    /// Second-round wage after a rejected screening offer (paid one round late).
    pub fn fallback_wage(&self) -> f64 {
        match self.params.variant {
            Variant::Simple => self.params.s_low,
            Variant::AlternatingOffers => self.params.delta * rubinstein(self.params.s_low, self.params.delta),
        }
    }

    /// Wage a worker who knows the firm produces `out` obtains.
    pub fn informed_wage(&self, out: f64) -> f64 {
        match self.params.variant {
            Variant::Simple => out,
            Variant::AlternatingOffers => rubinstein(out, self.params.delta),
        }
    }

    /// Second-period screening offer the firm producing `out` accepts.
    pub fn screen_wage(&self, out: f64) -> f64 {
        let d = self.params.delta;
        match self.params.variant {
            Variant::Simple => d * self.params.s_low + (1.0 - d) * out,
            Variant::AlternatingOffers => (1.0 - d) * out + d * d * rubinstein(self.params.s_low, d),
        }
    }

    /// Whether a worker with the baseline cutoff screens at belief `q`.
    pub fn screens(&self, q: f64) -> bool {
        q * self.params.s_high >= self.params.s_low - EPS
    }

    /// Low type's largest acceptable first offer.
    pub fn low_cap(&self) -> f64 {
        self.pool_wage()
    }
}

/// A first-period configuration: who made screening offers, which of those
/// offers carry information when seen at the fallback wage, and the belief a
/// rejection induces.
#[derive(Debug, Clone)]
pub struct Scenario<'a> {
    pub rules: StageRules,
    pub m: &'a SharingMatrix,
    pub offers: &'a WageProfile,
    /// Workers whose fallback wage signals rejection to observers.
    pub informative: WorkerSet,
    /// Belief of a rejected worker and of observers of an informative fallback wage.
    pub rejection_belief: f64,
    pub reluctant: WorkerSet,
    pub q_reluctant: f64,
    /// High-type output per worker when it differs from `s''`.
    pub high_output: Option<&'a [f64]>,
}

impl<'a> Scenario<'a> {
    /// Equilibrium configuration: every offer is informative and rejection means the low type.
    pub fn on_path(rules: StageRules, m: &'a SharingMatrix, offers: &'a WageProfile, partition: Option<&WorkerPartition>) -> Self {
        let (reluctant, q_reluctant) = partition.map_or((WorkerSet::empty(), 1.0), |p| (p.reluctant_pool, p.q_reluctant));
        Scenario {
            rules,
            m,
            offers,
            informative: offers.domain(),
            rejection_belief: 0.0,
            reluctant,
            q_reluctant,
            high_output: None,
        }
    }

    pub fn offered(&self) -> WorkerSet {
        self.offers.domain()
    }

    fn prior(&self) -> f64 {
        self.rules.params.p
    }

    pub fn output(&self, k: WorkerId) -> f64 {
        self.high_output.map_or(self.rules.params.s_high, |o| o[k])
    }

    pub fn screens(&self, k: WorkerId, q: f64) -> bool {
        if q >= 1.0 - EPS {
            return false;
        }
        if self.reluctant.contains(k) {
            q >= self.q_reluctant - EPS
        } else {
            self.rules.screens(q)
        }
    }

    /// High type's second-period surplus from `k` at belief `q < 1`.
    fn firm_p2(&self, k: WorkerId, q: f64) -> f64 {
        let out = self.output(k);
        if self.screens(k, q) {
            out - self.rules.screen_wage(out)
        } else {
            out - self.rules.pool_wage()
        }
    }

    fn firm_p2_informed(&self, k: WorkerId) -> f64 {
        let out = self.output(k);
        out - self.rules.informed_wage(out)
    }

    /// Payoff of the high type that accepts exactly the offers in `accepted`.
    pub fn firm_high(&self, accepted: WorkerSet) -> f64 {
        let r = &self.rules;
        let (beta, delay) = (r.firm_beta(), r.delay());
        let offered = self.offered();
        let rb = self.rejection_belief;
        let prior = self.prior();
        let mut total = 0.0;
        for k in 0..self.m.n() {
            let out = self.output(k);
            if accepted.contains(k) {
                total += out - self.offers.wage(k) + beta * self.firm_p2_informed(k);
                continue;
            }
            let seen = self.m.observe(k, accepted);
            let informed = seen * self.firm_p2_informed(k);
            if offered.contains(k) {
                total += delay * (out - r.fallback_wage()) + beta * (informed + (1.0 - seen) * self.firm_p2(k, rb));
            } else {
                let hint = self.m.observe(k, self.informative.difference(accepted));
                let uninformed = hint * self.firm_p2(k, rb) + (1.0 - hint) * self.firm_p2(k, prior);
                total += out - r.pool_wage() + beta * (informed + (1.0 - seen) * uninformed);
            }
        }
        total
    }

    /// Payoff of the low type, which rejects every screening offer.
    pub fn firm_low(&self) -> f64 {
        let r = &self.rules;
        let s1 = r.params.s_low;
        let offered = self.offered();
        let prior = self.prior();
        let low_p2 = |k: WorkerId, q: f64| {
            if self.screens(k, q) {
                r.delay() * (s1 - r.fallback_wage())
            } else {
                s1 - r.pool_wage()
            }
        };
        (0..self.m.n())
            .map(|k| {
                if offered.contains(k) {
                    r.delay() * (s1 - r.fallback_wage()) + r.firm_beta() * low_p2(k, self.rejection_belief)
                } else {
                    let hint = self.m.observe(k, self.informative);
                    s1 - r.pool_wage()
                        + r.firm_beta() * (hint * low_p2(k, self.rejection_belief) + (1.0 - hint) * low_p2(k, prior))
                }
            })
            .sum()
    }

    fn receipt_high(&self, k: WorkerId, q: f64) -> f64 {
        if self.screens(k, q) {
            self.rules.screen_wage(self.rules.params.s_high)
        } else {
            self.rules.pool_wage()
        }
    }

    fn receipt_low(&self, k: WorkerId, q: f64) -> f64 {
        if self.screens(k, q) {
            self.rules.delay() * self.rules.fallback_wage()
        } else {
            self.rules.pool_wage()
        }
    }

    /// Worker `k`'s value against a high type that accepts set `A` with the given probabilities.
    pub fn worker_value(&self, k: WorkerId, policy: &[(f64, WorkerSet)]) -> f64 {
        let r = &self.rules;
        let beta = r.worker_beta();
        let offered = self.offered();
        let rb = self.rejection_belief;
        let prior = self.prior();
        let known = r.informed_wage(r.params.s_high);
        let high: f64 = policy
            .iter()
            .map(|&(prob, accepted)| {
                let value = if accepted.contains(k) {
                    self.offers.wage(k) + beta * known
                } else {
                    let seen = self.m.observe(k, accepted);
                    if offered.contains(k) {
                        r.delay() * r.fallback_wage() + beta * (seen * known + (1.0 - seen) * self.receipt_high(k, rb))
                    } else {
                        let hint = self.m.observe(k, self.informative.difference(accepted));
                        let uninformed = hint * self.receipt_high(k, rb) + (1.0 - hint) * self.receipt_high(k, prior);
                        r.pool_wage() + beta * (seen * known + (1.0 - seen) * uninformed)
                    }
                };
                prob * value
            })
            .sum();
        let low = if offered.contains(k) {
            r.delay() * r.fallback_wage() + beta * self.receipt_low(k, rb)
        } else {
            let hint = self.m.observe(k, self.informative);
            r.pool_wage() + beta * (hint * self.receipt_low(k, rb) + (1.0 - hint) * self.receipt_low(k, prior))
        };
        prior * high + (1.0 - prior) * low
    }
}

/// Posterior that the firm is the high type after a rejection, when the high
/// type rejects everyone with probability `sigma`.
pub fn rejection_posterior(p: f64, sigma: f64) -> f64 {
    let num = p * sigma;
    if num <= 0.0 {
        0.0
    } else {
        num / (num + 1.0 - p)
    }
}
