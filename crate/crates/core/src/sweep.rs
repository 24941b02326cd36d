//! One-parameter comparative statics of the symmetric equilibrium.

use std::fmt::Write as _;

use crate::discrimination::{DiscriminatedGame, DiscriminationConfig};
use crate::error::{Error, Result};
use crate::game::{game_for, BargainingGame};
use crate::model::{ModelParams, SharingMatrix, WorkerPartition, WorkerSet};
use crate::report::fmt_sig;
use crate::solver::{find_symmetric_equilibria, screening_threshold, ThresholdOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Rho,
    Ell,
    Beta,
    Delta,
    P,
}

impl SweepParam {
    pub const ALL: [SweepParam; 5] = [SweepParam::Rho, SweepParam::Ell, SweepParam::Beta, SweepParam::Delta, SweepParam::P];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Rho => "rho",
            SweepParam::Ell => "ell",
            SweepParam::Beta => "beta",
            SweepParam::Delta => "delta",
            SweepParam::P => "p",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == name)
            .ok_or_else(|| Error::UnknownName { kind: "sweep parameter", name: name.to_string() })
    }
}

/// Everything a grid point needs besides the swept value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSetup {
    pub params: ModelParams,
    pub m: SharingMatrix,
    pub partition: WorkerPartition,
    pub discrimination: Option<DiscriminationConfig>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param_value: f64,
    pub n_threshold: Option<usize>,
    pub eq_size: usize,
    pub per_worker_wage: f64,
    /// Mean `P^j(C)` over workers outside the equilibrium screening set.
    pub pooler_observability: f64,
    pub screening_collapsed: bool,
}

fn apply(setup: &SweepSetup, param: SweepParam, v: f64) -> Result<SweepSetup> {
    let mut s = setup.clone();
    match param {
        SweepParam::Rho => s.m = SharingMatrix::scalar(s.params.n_workers, v)?,
        SweepParam::Ell => {
            let cfg = s.discrimination.ok_or_else(|| Error::ConfigInvalid("sweeping ell needs a discrimination block".into()))?;
            s.discrimination = Some(cfg.with_ell(v));
        }
        SweepParam::Beta => s.params.beta = v,
        SweepParam::Delta => s.params.delta = v,
        SweepParam::P => {
            s.params.p = v;
            s.partition = WorkerPartition::new(s.partition.screeners_pool, s.partition.reluctant_pool, s.partition.q_reluctant, &s.params)?;
        }
    }
    s.params.validate()?;
    Ok(s)
}

fn build(setup: &SweepSetup) -> Result<Box<dyn BargainingGame>> {
    let base = game_for(setup.params, setup.m.clone(), setup.partition)?;
    Ok(match setup.discrimination {
        Some(cfg) => Box::new(DiscriminatedGame::new(base, cfg)?),
        None => base,
    })
}

/// Equilibrium outcome at one value of the swept parameter. The reported
/// equilibrium is the verified symmetric one with the largest screening set.
pub fn sweep_point(setup: &SweepSetup, param: SweepParam, value: f64) -> Result<SweepRow> {
    let s = apply(setup, param, value)?;
    let game = build(&s)?;
    game.precondition()?;
    let eq = find_symmetric_equilibria(game.as_ref())?;
    let chosen = eq.last();
    let screening = chosen.map_or(WorkerSet::empty(), |c| c.screening);
    let size = screening.len();
    let per_worker_wage = chosen.filter(|_| size > 0).map_or(0.0, |c| c.offers.sum_over(screening) / size as f64);
    let poolers = s.m.all().difference(screening);
    let pooler_observability = if poolers.is_empty() {
        f64::NAN
    } else {
        poolers.iter().map(|j| s.m.observe(j, screening)).sum::<f64>() / poolers.len() as f64
    };
    let n_threshold = if s.m.scalar_value().is_some() {
        let opts = ThresholdOptions { max_screeners: s.params.n_workers.max(12), probe_rho_step: None };
        screening_threshold(&s.params, &s.m, &s.partition, opts)?.n_value
    } else {
        None
    };
    Ok(SweepRow { param_value: value, n_threshold, eq_size: size, per_worker_wage, pooler_observability, screening_collapsed: size == 0 })
}

/// Evenly spaced grid from `from` to `to` inclusive.
pub fn grid(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..steps).map(|i| from + (to - from) * i as f64 / (steps - 1) as f64).collect(),
    }
}

pub fn sweep(setup: &SweepSetup, param: SweepParam, from: f64, to: f64, steps: usize) -> Result<Vec<SweepRow>> {
    grid(from, to, steps).into_iter().map(|v| sweep_point(setup, param, v)).collect()
}

pub const SWEEP_HEADER: &str = "param_value,n_threshold,eq_size,per_worker_wage,pooler_observability,screening_collapsed";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_sig(r.param_value),
            r.n_threshold.map_or(String::new(), |n| n.to_string()),
            r.eq_size,
            fmt_sig(r.per_worker_wage),
            fmt_sig(r.pooler_observability),
            u8::from(r.screening_collapsed)
        );
    }
    out
}

/// First grid value at which screening collapses after having been present.
pub fn collapse_point(rows: &[SweepRow]) -> Option<f64> {
    rows.windows(2).find(|w| !w[0].screening_collapsed && w[1].screening_collapsed).map(|w| w[1].param_value)
}
