//! Command bodies. Each returns the text to print and an exit code.

use std::fmt::Write as _;

use screening_core::discrimination::DiscriminatedGame;
use screening_core::game::{game_for, BargainingGame, EquilibriumCandidate};
use screening_core::props::{suite_by_name, SuiteOptions, SUITES};
use screening_core::report::fmt_sig;
use screening_core::sim::{episodes_csv, ForcedDeviation, SimConfig, Simulator};
use screening_core::solver::{find_symmetric_equilibria, solve_mixed, verify};
use screening_core::sweep::{sweep, sweep_csv, SweepParam, SweepSetup};
use screening_core::{Variant, WageProfile, WorkerSet};

use crate::config::{parse_set, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: EXIT_OK, stdout, stderr: String::new() }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: msg.into() }
    }
}

type CmdResult = Result<Outcome, String>;

pub fn run(f: impl FnOnce() -> CmdResult) -> Outcome {
    f().unwrap_or_else(Outcome::usage)
}

pub fn build_game(cfg: &RunConfig) -> Result<Box<dyn BargainingGame>, String> {
    let base = game_for(cfg.params, cfg.matrix.clone(), cfg.partition).map_err(|e| e.to_string())?;
    Ok(match cfg.discrimination {
        Some(d) => Box::new(DiscriminatedGame::new(base, d).map_err(|e| e.to_string())?),
        None => base,
    })
}

fn ids(set: WorkerSet) -> String {
    set.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

/// Candidate from a set spec and either one wage or a per-member list.
pub fn candidate(cfg: &RunConfig, screening: &str, wage: Option<f64>, wages: Option<&str>, sigma: f64) -> Result<EquilibriumCandidate, String> {
    let n = cfg.params.n_workers;
    let c = parse_set(screening, n)?;
    let offers = match (wage, wages) {
        (Some(_), Some(_)) => return Err("give either --wage or --wages".into()),
        (_, Some(list)) => {
            let ws: Vec<f64> = list
                .split(|ch: char| ch == ',' || ch.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<f64>().map_err(|_| format!("'{t}' is not a wage")))
                .collect::<Result<_, _>>()?;
            if ws.len() != c.len() {
                return Err(format!("{} wages for {} screening workers", ws.len(), c.len()));
            }
            WageProfile::from_pairs(n, c.iter().zip(ws)).map_err(|e| e.to_string())?
        }
        (Some(w), None) => WageProfile::uniform(c, w, n),
        (None, None) if c.is_empty() => WageProfile::uniform(c, 0.0, n),
        (None, None) => return Err("a nonempty screening set needs --wage or --wages".into()),
    };
    Ok(EquilibriumCandidate { screening: c, offers, sigma })
}

pub fn cmd_verify(cfg: &RunConfig, cand: &EquilibriumCandidate) -> CmdResult {
    let game = build_game(cfg)?;
    let report = verify(game.as_ref(), cand).map_err(|e| e.to_string())?;
    let mut out = String::new();
    let _ = writeln!(out, "game {} screening {{{}}} sigma {}", game.name(), ids(cand.screening), fmt_sig(cand.sigma));
    for i in cand.screening.iter() {
        let _ = writeln!(out, "offer worker {i} {}", fmt_sig(cand.offers.wage(i)));
    }
    let _ = writeln!(out, "{report}");
    Ok(Outcome { code: if report.verdict { EXIT_OK } else { EXIT_FAIL }, stdout: out, stderr: String::new() })
}

pub fn cmd_solve(cfg: &RunConfig, require_equilibrium: bool) -> CmdResult {
    let game = build_game(cfg)?;
    game.precondition().map_err(|e| e.to_string())?;
    let mut found = find_symmetric_equilibria(game.as_ref()).map_err(|e| e.to_string())?;
    let pool = cfg.partition.screeners_pool;
    if cfg.variant() == Variant::Simple && cfg.discrimination.is_none() && !pool.is_empty() {
        if let Ok(mixed) = solve_mixed(&cfg.params, &cfg.matrix, pool) {
            if mixed.candidate.sigma > 0.0 && verify(game.as_ref(), &mixed.candidate).is_ok_and(|r| r.verdict) {
                found.push(mixed.candidate);
            }
        }
    }
    let mut out = String::from("size,screening,per_worker_wage,sigma\n");
    for c in &found {
        let size = c.screening.len();
        let wage = if size == 0 { 0.0 } else { c.offers.sum_over(c.screening) / size as f64 };
        let _ = writeln!(out, "{size},{},{},{}", ids(c.screening), fmt_sig(wage), fmt_sig(c.sigma));
    }
    let code = if require_equilibrium && found.is_empty() { EXIT_FAIL } else { EXIT_OK };
    let stderr = if found.is_empty() { "no symmetric equilibrium found\n".to_string() } else { String::new() };
    Ok(Outcome { code, stdout: out, stderr })
}

pub fn cmd_sweep(cfg: &RunConfig, param: &str, from: f64, to: f64, steps: usize) -> CmdResult {
    let param = SweepParam::from_name(param).map_err(|e| e.to_string())?;
    if steps == 0 {
        return Err("--steps must be at least 1".into());
    }
    let setup = SweepSetup { params: cfg.params, m: cfg.matrix.clone(), partition: cfg.partition, discrimination: cfg.discrimination };
    let rows = sweep(&setup, param, from, to, steps).map_err(|e| e.to_string())?;
    Ok(Outcome::ok(sweep_csv(&rows)))
}

pub struct SimulateOptions<'a> {
    pub trials: usize,
    pub seed: u64,
    pub profile: Option<EquilibriumCandidate>,
    pub forced_reject: Option<usize>,
    pub episodes: Option<&'a std::path::Path>,
}

pub fn cmd_simulate(cfg: &RunConfig, opts: SimulateOptions) -> CmdResult {
    let profile = match opts.profile {
        Some(p) => p,
        None => {
            let game = build_game(cfg)?;
            let found = find_symmetric_equilibria(game.as_ref()).map_err(|e| e.to_string())?;
            found.last().cloned().unwrap_or_else(|| EquilibriumCandidate::no_screening(cfg.params.n_workers))
        }
    };
    let mut sc = SimConfig::new(opts.trials, opts.seed, profile);
    sc.discrimination = cfg.discrimination;
    sc.partition = Some(cfg.partition);
    sc.forced = opts.forced_reject.map(ForcedDeviation::RejectWorker);
    let sim = Simulator::new(sc, &cfg.params, &cfg.matrix).map_err(|e| e.to_string())?;
    let report = sim.estimate();
    if let Some(path) = opts.episodes {
        let records: Vec<_> = (0..opts.trials as u64).map(|t| sim.episode(t)).collect();
        std::fs::write(path, episodes_csv(&records)).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    let mut stderr = String::new();
    for w in &report.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    Ok(Outcome { code: EXIT_OK, stdout: report.to_csv(), stderr })
}

pub fn cmd_checkprops(suites: &[String], opts: SuiteOptions) -> CmdResult {
    let names: Vec<&str> = if suites.is_empty() { SUITES.iter().map(|(n, _)| *n).collect() } else { suites.iter().map(String::as_str).collect() };
    let mut out = String::new();
    let mut failed = false;
    for name in names {
        let suite = suite_by_name(name).map_err(|e| e.to_string())?;
        let res = suite(&opts).map_err(|e| e.to_string())?;
        let verdict = if res.passed() { "pass" } else { "FAIL" };
        let _ = writeln!(out, "{name}: {verdict} ({} cases, {} checks, {} violations)", res.cases, res.checks, res.violations.len());
        for v in res.violations.iter().take(10) {
            let _ = writeln!(out, "  violation: {v}");
        }
        for n in &res.notes {
            let _ = writeln!(out, "  note: {n}");
        }
        failed |= !res.passed();
    }
    Ok(Outcome { code: if failed { EXIT_FAIL } else { EXIT_OK }, stdout: out, stderr: String::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    const P0: &str = "s_low = 1\ns_high = 2\np = 0.6\nbeta = 0.4\ndelta = 0.5\nd = 0.5\nn_workers = 4\nrho = 0.2\n";

    #[test]
    fn verify_p0() {
        let cfg = parse_config(P0).unwrap();
        let cand = candidate(&cfg, "0,1,2,3", Some(1.1), None, 0.0).unwrap();
        assert_eq!(cmd_verify(&cfg, &cand).unwrap().code, EXIT_OK);
        let cand = candidate(&cfg, "0,1,2", Some(1.03493), None, 0.0).unwrap();
        let out = cmd_verify(&cfg, &cand).unwrap();
        assert_eq!(out.code, EXIT_FAIL);
        assert!(out.stdout.lines().any(|l| l.starts_with("pooler") && l.contains("FAIL")), "{}", out.stdout);
    }

    #[test]
    fn candidate_errors() {
        let cfg = parse_config(P0).unwrap();
        assert!(candidate(&cfg, "0,9", Some(1.1), None, 0.0).is_err());
        assert!(candidate(&cfg, "0,1", None, Some("1.1"), 0.0).is_err());
        assert!(candidate(&cfg, "0,1", None, None, 0.0).is_err());
        assert!(candidate(&cfg, "", None, None, 0.0).is_ok());
    }

    #[test]
    fn solve_lists_equilibria() {
        let cfg = parse_config(P0).unwrap();
        let out = cmd_solve(&cfg, true).unwrap();
        assert_eq!(out.code, EXIT_OK);
        assert!(out.stdout.contains("4,0 1 2 3,1.10000000000,0\n"), "{}", out.stdout);
    }

    #[test]
    fn unknown_sweep_param_is_usage_error() {
        let cfg = parse_config(P0).unwrap();
        assert!(cmd_sweep(&cfg, "gamma", 0.0, 1.0, 3).is_err());
    }
}
