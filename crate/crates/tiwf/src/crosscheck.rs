//! Independent cross-checks: dual Monte Carlo against the moment solver, urn
//! quadrature against closed forms, chain Monte Carlo against exact moments,
//! and tiny chains against full enumeration.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use tiwf_core::beta::beta_moment;
use tiwf_core::chain::run_chain;
use tiwf_core::dual::{
    simulate_dual_absorption, urn_integral_closed_form, urn_integral_quadrature, IntegralKind, UrnRates,
};
use tiwf_core::moments::{exact_stationary_moments, MomentIndex};
use tiwf_core::ti::{limit_moments_large_c, printed_limit_variance, ti_stationary_moments};
use tiwf_core::{BetaParams, ChainParams, RngSeed, TIParams};

use crate::config::CrosscheckConfig;
use crate::error::AppResult;
use crate::oracle::{enumerated_moments, transfer_discrepancy};
use crate::report::{Provenance, SCHEMA_VERSION};

/// Pinned tolerance for the enumeration comparisons.
pub const ENUMERATION_TOL: f64 = 1e-12;

const TI_STREAM: u64 = 0;
const URN_STREAM: u64 = 1;
const DUAL_STREAM0: u64 = 1_000;
const CHAIN_STREAM0: u64 = 2_000;

pub fn random_ti_params<R: Rng + ?Sized>(rng: &mut R) -> TIParams {
    let mut r = |lo: f64, hi: f64| rng.random_range(lo..hi);
    TIParams {
        a1: r(0.2, 2.0),
        a2: r(0.2, 2.0),
        b1: r(0.2, 2.0),
        b2: r(0.2, 2.0),
        c1: r(0.2, 3.0),
        c2: r(0.2, 3.0),
        alpha: r(0.5, 2.5),
        beta: r(0.5, 2.5),
    }
}

/// Rates log-uniform on `[e^-3, e^3]`.
pub fn random_urn_rates<R: Rng + ?Sized>(rng: &mut R) -> UrnRates {
    let mut r = || rng.random_range(-3.0f64..3.0).exp();
    UrnRates::new(r(), r(), r(), r())
}

pub fn ti_draws(seed: u64, count: usize) -> Vec<TIParams> {
    let mut rng = RngSeed::new(seed, TI_STREAM).rng();
    (0..count).map(|_| random_ti_params(&mut rng)).collect()
}

pub fn urn_draws(seed: u64, count: usize) -> Vec<UrnRates> {
    let mut rng = RngSeed::new(seed, URN_STREAM).rng();
    (0..count).map(|_| random_urn_rates(&mut rng)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct DualCheck {
    pub draw: usize,
    pub n: u64,
    pub m: u64,
    pub estimate: f64,
    pub se: f64,
    pub reference: f64,
    pub z: f64,
}

pub fn dual_checks(draws: &[TIParams], exponents: &[[u64; 2]], reps: u64, seed: u64) -> AppResult<Vec<DualCheck>> {
    let mut jobs = Vec::new();
    for (d, ti) in draws.iter().enumerate() {
        for &[n, m] in exponents {
            jobs.push((d, *ti, n, m));
        }
    }
    jobs.par_iter()
        .enumerate()
        .map(|(k, &(draw, ti, n, m))| {
            let degree = (n + m) as usize;
            let reference = ti_stationary_moments(&ti, degree)?.value(n as usize, m as usize);
            let mut rng = RngSeed::new(seed, DUAL_STREAM0 + k as u64).rng();
            let est = simulate_dual_absorption(n, m, &ti, reps, &mut rng)?;
            Ok(DualCheck { draw, n, m, estimate: est.mean, se: est.se, reference, z: est.z_score(reference) })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadCheck {
    pub kind: &'static str,
    pub draws: usize,
    pub max_rel_err: f64,
}

pub fn quadrature_checks(rates: &[UrnRates], rel_tol: f64) -> AppResult<Vec<QuadCheck>> {
    IntegralKind::ALL
        .par_iter()
        .map(|&kind| {
            let mut worst = 0.0_f64;
            for r in rates {
                let exact = urn_integral_closed_form(kind, r)?;
                let quad = urn_integral_quadrature(kind, r, rel_tol * 1e-2)?;
                worst = worst.max((exact - quad).abs() / exact.abs().max(f64::MIN_POSITIVE));
            }
            Ok(QuadCheck { kind: kind.name(), draws: rates.len(), max_rel_err: worst })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainCheck {
    pub chain: usize,
    pub kind: &'static str,
    pub n: usize,
    pub m: usize,
    pub empirical: f64,
    pub se: f64,
    pub exact: f64,
    pub z: f64,
}

pub fn chain_checks(
    chains: &[ChainParams],
    cfg: &CrosscheckConfig,
    seed: u64,
) -> AppResult<Vec<ChainCheck>> {
    let per_chain: Vec<AppResult<Vec<ChainCheck>>> = chains
        .par_iter()
        .enumerate()
        .map(|(k, p)| {
            let p = p.validate()?;
            let exact = exact_stationary_moments::<f64>(&p, cfg.chain_degree)?;
            let run = run_chain(
                p,
                cfg.chain_burn_in,
                cfg.chain_samples,
                cfg.chain_thin,
                RngSeed::new(seed, CHAIN_STREAM0 + k as u64),
                cfg.chain_degree,
            )?;
            let (means, ses) = (run.moments.means(), run.moments.standard_errors());
            Ok(MomentIndex::all(cfg.chain_degree)
                .skip(1)
                .map(|idx| {
                    let (e, s, x) = (means.value(idx.n, idx.m), ses.value(idx.n, idx.m), exact.value(idx.n, idx.m));
                    ChainCheck {
                        chain: k,
                        kind: p.kind.name(),
                        n: idx.n,
                        m: idx.m,
                        empirical: e,
                        se: s,
                        exact: x,
                        z: if s > 0.0 { (e - x) / s } else { 0.0 },
                    }
                })
                .collect())
        })
        .collect();
    let mut out = Vec::new();
    for r in per_chain {
        out.extend(r?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct EnumerationCheck {
    pub kind: &'static str,
    pub n: u64,
    pub m: u64,
    pub c: u64,
    pub transfer_err: f64,
    pub moment_err: f64,
}

/// The smallest nontrivial chains of each kind.
pub fn enumeration_cases() -> Vec<ChainParams> {
    let mut out = Vec::new();
    for (n, m, c) in [(3, 2, 1), (4, 3, 1)] {
        out.push(ChainParams::wf(n, m, c, 0.1, 0.2, 0.15, 0.05));
        out.push(ChainParams::seed_bank(n, m, c, 0.1, 0.2));
    }
    out
}

pub fn enumeration_checks(cases: &[ChainParams], degree: usize) -> AppResult<Vec<EnumerationCheck>> {
    cases
        .iter()
        .map(|p| {
            let exact = exact_stationary_moments::<f64>(p, degree)?;
            let brute = enumerated_moments(p, degree)?;
            let moment_err = exact
                .values()
                .iter()
                .zip(brute.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            Ok(EnumerationCheck {
                kind: p.kind.name(),
                n: p.n,
                m: p.m,
                c: p.c,
                transfer_err: transfer_discrepancy(p, degree)?,
                moment_err,
            })
        })
        .collect()
}

/// One step along the large-migration path `c1 = c`, `c2 = gamma c`.
#[derive(Debug, Clone, Serialize)]
pub struct LargeCPoint {
    pub c: f64,
    pub mean_x: f64,
    pub mean_y: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub cov: f64,
    pub exy2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LargeCCheck {
    pub gamma: f64,
    pub path: Vec<LargeCPoint>,
    pub limit_mean: f64,
    pub limit_var: f64,
    /// The commonly printed variance expression, for comparison only.
    pub printed_var: f64,
    pub exy2_monotone: bool,
    pub final_exy2: f64,
    /// Largest relative gap to the limits at the end of the path.
    pub mean_rel_err: f64,
    pub var_rel_err: f64,
    pub cov_rel_err: f64,
    pub printed_var_rel_err: f64,
}

pub fn large_c_check(base: &TIParams, gamma: f64, cs: &[f64]) -> AppResult<LargeCCheck> {
    let path = cs
        .iter()
        .map(|&c| {
            let ti = TIParams { c1: c, c2: gamma * c, ..*base };
            let mu = ti_stationary_moments(&ti, 2)?;
            let (mx, my) = (mu.value(1, 0), mu.value(0, 1));
            Ok(LargeCPoint {
                c,
                mean_x: mx,
                mean_y: my,
                var_x: mu.value(2, 0) - mx * mx,
                var_y: mu.value(0, 2) - my * my,
                cov: mu.value(1, 1) - mx * my,
                exy2: mu.exy2(),
            })
        })
        .collect::<AppResult<Vec<_>>>()?;
    let b = base;
    let lim = limit_moments_large_c(b.a1, b.a2, b.b1, b.b2, gamma, b.alpha, b.beta)?;
    let printed_var = printed_limit_variance(b.a1, b.a2, b.b1, b.b2, gamma, b.alpha, b.beta);
    let last = path.last().cloned().ok_or(tiwf_core::Error::InvalidArgument("empty migration path"))?;
    let rel = |x: f64, y: f64| (x - y).abs() / y.abs();
    Ok(LargeCCheck {
        gamma,
        exy2_monotone: path.windows(2).all(|w| w[1].exy2 < w[0].exy2),
        final_exy2: last.exy2,
        mean_rel_err: rel(last.mean_x, lim.mean).max(rel(last.mean_y, lim.mean)),
        var_rel_err: rel(last.var_x, lim.var).max(rel(last.var_y, lim.var)),
        cov_rel_err: rel(last.cov, lim.cov),
        printed_var_rel_err: rel(last.var_x, printed_var),
        limit_mean: lim.mean,
        limit_var: lim.var,
        printed_var,
        path,
    })
}

/// Report-only probe: with `b`'s and `c2` scaled by `gamma`, `alpha = 2`,
/// `beta = 2 gamma`, compare the X marginal with `Beta(a1 + b1, a2 + b2)`.
#[derive(Debug, Clone, Serialize)]
pub struct ConjecturePoint {
    pub c: f64,
    /// `|E X^k - E Z^k|` for `k = 1..=4`.
    pub gaps: [f64; 4],
}

pub fn conjecture_probe(a1: f64, a2: f64, b1: f64, b2: f64, gamma: f64, cs: &[f64]) -> AppResult<Vec<ConjecturePoint>> {
    let beta = BetaParams::new(a1 + b1, a2 + b2)?;
    cs.iter()
        .map(|&c| {
            let ti = TIParams {
                a1,
                a2,
                b1: gamma * b1,
                b2: gamma * b2,
                c1: c,
                c2: gamma * c,
                alpha: 2.0,
                beta: 2.0 * gamma,
            };
            let mu = ti_stationary_moments(&ti, 4)?;
            let mut gaps = [0.0; 4];
            for (k, g) in gaps.iter_mut().enumerate() {
                *g = (mu.value(k + 1, 0) - beta_moment(&beta, k as u32 + 1)).abs();
            }
            Ok(ConjecturePoint { c, gaps })
        })
        .collect()
}

/// Fixed base point and path for the large-migration checks.
pub fn default_large_c() -> (TIParams, f64, Vec<f64>) {
    let base = TIParams { a1: 0.8, a2: 1.3, b1: 0.6, b2: 0.9, c1: 0.0, c2: 0.0, alpha: 1.0, beta: 1.5 };
    let cs = (1..=6).map(|k| 10f64.powi(k)).collect();
    (base, 2.0, cs)
}

#[derive(Debug, Clone, Serialize)]
pub struct CrosscheckSummary {
    pub schema_version: u32,
    pub command: &'static str,
    pub provenance: Provenance,
    pub z_max: f64,
    pub quad_rel_tol: f64,
    pub enumeration_tol: f64,
    pub dual: Vec<DualCheck>,
    pub quadrature: Vec<QuadCheck>,
    pub chains: Vec<ChainCheck>,
    pub enumeration: Vec<EnumerationCheck>,
    pub large_c: LargeCCheck,
    pub conjecture_probe: Vec<ConjecturePoint>,
    pub max_abs_z_dual: f64,
    pub max_abs_z_chain: f64,
    pub max_quad_rel_err: f64,
    pub pass: bool,
}

pub fn run_crosscheck(cfg: &CrosscheckConfig, prov: Provenance) -> AppResult<CrosscheckSummary> {
    let seed = prov.seed;
    let dual = dual_checks(&ti_draws(seed, cfg.ti_draws), &cfg.exponents, cfg.dual_reps, seed)?;
    let quadrature = quadrature_checks(&urn_draws(seed, cfg.quad_draws), cfg.quad_rel_tol)?;
    let chain_params: Vec<ChainParams> = cfg.chains.iter().map(|p| p.params()).collect();
    let chains = chain_checks(&chain_params, cfg, seed)?;
    let enumeration = if cfg.enumeration { enumeration_checks(&enumeration_cases(), 4)? } else { Vec::new() };
    let (base, gamma, cs) = default_large_c();
    let large_c = large_c_check(&base, gamma, &cs)?;
    let conjecture_probe = conjecture_probe(base.a1, base.a2, base.b1, base.b2, gamma, &cs)?;

    let max_abs = |zs: &mut dyn Iterator<Item = f64>| zs.map(f64::abs).fold(0.0, f64::max);
    let max_abs_z_dual = max_abs(&mut dual.iter().map(|d| d.z));
    let max_abs_z_chain = max_abs(&mut chains.iter().map(|d| d.z));
    let max_quad_rel_err = quadrature.iter().map(|q| q.max_rel_err).fold(0.0, f64::max);
    let enum_ok = enumeration.iter().all(|e| e.transfer_err <= ENUMERATION_TOL && e.moment_err <= ENUMERATION_TOL);
    let pass = max_abs_z_dual <= cfg.z_max
        && max_abs_z_chain <= cfg.z_max
        && max_quad_rel_err <= cfg.quad_rel_tol
        && enum_ok;
    Ok(CrosscheckSummary {
        schema_version: SCHEMA_VERSION,
        command: "crosscheck",
        provenance: prov,
        z_max: cfg.z_max,
        quad_rel_tol: cfg.quad_rel_tol,
        enumeration_tol: ENUMERATION_TOL,
        dual,
        quadrature,
        chains,
        enumeration,
        large_c,
        conjecture_probe,
        max_abs_z_dual,
        max_abs_z_chain,
        max_quad_rel_err,
        pass,
    })
}
