//! Exact distance against bound on a grid of chains.

use rayon::prelude::*;
use serde::Serialize;
use tiwf_core::{ChainParams, ModelKind};

use crate::config::{Target, VerifyConfig};
use crate::eval::{evaluate_point, Plan};
use crate::report::{sort_records, Counts, Provenance, Record, SCHEMA_VERSION};

/// The product grid followed by the explicit points. Mutation probabilities
/// run over `hat / N` for every combination; the seed-bank model takes only
/// `p1, p2`.
pub fn grid_points(cfg: &VerifyConfig) -> Vec<ChainParams> {
    let mut out = Vec::new();
    for &kind in &cfg.kinds {
        for &n in &cfg.n {
            let nf = n as f64;
            for &ratio in &cfg.m_ratio {
                let m = (ratio * nf).round().max(1.0) as u64;
                for &c in &cfg.c {
                    let hats = &cfg.mutation_hats;
                    for &h1 in hats {
                        for &h2 in hats {
                            match ModelKind::from(kind) {
                                ModelKind::SeedBank => {
                                    out.push(ChainParams::seed_bank(n, m, c, h1 / nf, h2 / nf));
                                }
                                ModelKind::TwoIslandWF => {
                                    for &g1 in hats {
                                        for &g2 in hats {
                                            out.push(ChainParams::wf(n, m, c, h1 / nf, h2 / nf, g1 / nf, g2 / nf));
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out.extend(cfg.points.iter().map(|p| p.params()));
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct TargetSummary {
    pub target: &'static str,
    pub counts: Counts,
    /// Largest `distance / bound` over checked records.
    pub max_ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifySummary {
    pub schema_version: u32,
    pub command: &'static str,
    pub provenance: Provenance,
    pub counts: Counts,
    pub by_target: Vec<TargetSummary>,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub records: Vec<Record>,
    pub summary: VerifySummary,
}

fn max_ratio<'a>(records: impl Iterator<Item = &'a Record>) -> Option<f64> {
    records
        .filter_map(|r| Some(r.exact_distance? / r.bound_total()?))
        .filter(|v| v.is_finite())
        .reduce(f64::max)
}

pub fn run_verify(cfg: &VerifyConfig, prov: Provenance) -> VerifyOutcome {
    let plan = Plan {
        ti_h: if cfg.targets.contains(&Target::Ti) { cfg.ti_h.clone() } else { Vec::new() },
        beta_h: if cfg.targets.contains(&Target::Beta) { cfg.beta_h.clone() } else { Vec::new() },
        distances: true,
    };
    let points = grid_points(cfg);
    let mut records: Vec<Record> = points.par_iter().flat_map_iter(|p| evaluate_point(*p, None, &plan)).collect();
    sort_records(&mut records);
    let counts = Counts::of(&records);
    let by_target = [Target::Ti, Target::Beta]
        .into_iter()
        .filter(|t| cfg.targets.contains(t))
        .map(|t| {
            let sel: Vec<Record> = records.iter().filter(|r| r.target == t).cloned().collect();
            TargetSummary { target: t.name(), counts: Counts::of(&sel), max_ratio: max_ratio(sel.iter()) }
        })
        .collect();
    let summary = VerifySummary {
        schema_version: SCHEMA_VERSION,
        command: "verify",
        provenance: prov,
        counts,
        by_target,
        pass: counts.violations == 0,
    };
    VerifyOutcome { records, summary }
}
