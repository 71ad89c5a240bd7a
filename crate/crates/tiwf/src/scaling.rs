//! Distances and bound totals along `N -> infinity` families, with log-log
//! slope fits.

use rayon::prelude::*;
use serde::Serialize;
use tiwf_core::regime::ScalingRegime;
use tiwf_core::stats::loglog_slope;
use tiwf_core::ModelKind;

use crate::config::{ScalingConfig, Target};
use crate::eval::{evaluate_point, Plan};
use crate::report::{sort_records, Counts, Provenance, Record, SCHEMA_VERSION};

/// Rate of the diffusion bound: `max(2 eps - 1, -1/2)`.
pub fn expected_ti_slope(eps: f64) -> f64 {
    (2.0 * eps - 1.0).max(-0.5)
}

/// Rate of the Beta bound: `-eps / 2`.
pub fn expected_beta_slope(eps: f64) -> f64 {
    -eps / 2.0
}

pub fn regime(cfg: &ScalingConfig, kind: ModelKind, eps: f64) -> ScalingRegime {
    let (q1, q2) = match kind {
        ModelKind::TwoIslandWF => (cfg.q_hat1, cfg.q_hat2),
        ModelKind::SeedBank => (0.0, 0.0),
    };
    ScalingRegime {
        m: cfg.m,
        p_hat1: cfg.p_hat1,
        p_hat2: cfg.p_hat2,
        q_hat1: q1,
        q_hat2: q2,
        c_hat: cfg.c_hat,
        eps,
        kind,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeFit {
    pub kind: &'static str,
    pub eps: f64,
    pub target: &'static str,
    pub h: String,
    /// `"bound"` or `"distance"`.
    pub quantity: &'static str,
    pub points: usize,
    pub slope: Option<f64>,
    pub expected: Option<f64>,
    pub within_tol: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingSummary {
    pub schema_version: u32,
    pub command: &'static str,
    pub provenance: Provenance,
    pub slope_tol: f64,
    pub counts: Counts,
    pub fits: Vec<SlopeFit>,
    /// Every exact distance is at most its bound.
    pub dominance: bool,
    /// Every bound slope is within tolerance of its rate.
    pub slopes_ok: bool,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct ScalingOutcome {
    pub records: Vec<Record>,
    pub summary: ScalingSummary,
}

fn sizes(cfg: &ScalingConfig) -> Vec<u64> {
    let mut ns: Vec<u64> = cfg.n_grid.iter().chain(&cfg.exact_n_grid).copied().collect();
    ns.sort_unstable();
    ns.dedup();
    ns
}

pub fn run_scaling(cfg: &ScalingConfig, prov: Provenance) -> ScalingOutcome {
    let mut jobs = Vec::new();
    for &kind in &cfg.kinds {
        for &eps in &cfg.eps {
            for n in sizes(cfg) {
                jobs.push((ModelKind::from(kind), eps, n));
            }
        }
    }
    let mut records: Vec<Record> = jobs
        .par_iter()
        .flat_map_iter(|&(kind, eps, n)| {
            let plan = Plan { ti_h: vec![cfg.ti_h], beta_h: vec![cfg.beta_h], distances: n <= cfg.exact_max_n };
            match regime(cfg, kind, eps).instantiate(n) {
                Ok(p) => evaluate_point(p, Some(eps), &plan),
                Err(e) => {
                    let p = tiwf_core::ChainParams { n, m: 0, c: 0, p1: 0.0, p2: 0.0, q1: 0.0, q2: 0.0, kind };
                    let mut r = Record::new(p, Some(eps), Target::Ti, cfg.ti_h);
                    r.error = Some(e.to_string());
                    vec![r]
                }
            }
        })
        .collect();
    sort_records(&mut records);

    let mut fits = Vec::new();
    for &kind in &cfg.kinds {
        let kind = ModelKind::from(kind);
        for &eps in &cfg.eps {
            for (target, h, rate) in [
                (Target::Ti, cfg.ti_h, expected_ti_slope(eps)),
                (Target::Beta, cfg.beta_h, expected_beta_slope(eps)),
            ] {
                let sel: Vec<&Record> = records
                    .iter()
                    .filter(|r| r.params.kind == kind && r.eps == Some(eps) && r.target == target && r.h == h)
                    .collect();
                let bounds: Vec<(f64, f64)> = sel
                    .iter()
                    .filter(|r| cfg.n_grid.contains(&r.params.n))
                    .filter_map(|r| Some((r.params.n as f64, r.bound_total()?)))
                    .collect();
                let dists: Vec<(f64, f64)> = sel
                    .iter()
                    .filter_map(|r| Some((r.params.n as f64, r.exact_distance?)))
                    .collect();
                for (quantity, pts, expected) in [("bound", bounds, Some(rate)), ("distance", dists, None)] {
                    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
                    let slope = loglog_slope(&xs, &ys);
                    let within_tol = expected.zip(slope).map(|(e, s)| (s - e).abs() <= cfg.slope_tol);
                    fits.push(SlopeFit {
                        kind: kind.name(),
                        eps,
                        target: target.name(),
                        h: h.to_string(),
                        quantity,
                        points: pts.len(),
                        slope,
                        expected,
                        within_tol,
                    });
                }
            }
        }
    }

    let counts = Counts::of(&records);
    let dominance = counts.violations == 0;
    let slopes_ok = fits.iter().filter(|f| f.expected.is_some()).all(|f| f.within_tol == Some(true));
    let pass = dominance && (!cfg.check_slopes || slopes_ok);
    let summary = ScalingSummary {
        schema_version: SCHEMA_VERSION,
        command: "scaling",
        provenance: prov,
        slope_tol: cfg.slope_tol,
        counts,
        fits,
        dominance,
        slopes_ok,
        pass,
    };
    ScalingOutcome { records, summary }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theoretical_rates() {
        assert_eq!(expected_ti_slope(0.0), -0.5);
        assert_eq!(expected_ti_slope(0.25), -0.5);
        assert_eq!(expected_ti_slope(0.5), 0.0);
        assert_eq!(expected_ti_slope(1.0), 1.0);
        assert_eq!(expected_beta_slope(1.0), -0.5);
    }

    #[test]
    fn sizes_merge_grids() {
        let cfg = ScalingConfig { n_grid: vec![10, 100], exact_n_grid: vec![50, 100], ..ScalingConfig::default() };
        assert_eq!(sizes(&cfg), vec![10, 50, 100]);
    }
}
