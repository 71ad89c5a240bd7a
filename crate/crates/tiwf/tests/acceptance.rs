//! One PASS/FAIL line per acceptance criterion, with pinned tolerances and
//! time limits. Criteria 5, 6 and 8 fail against the formulas as printed;
//! for those the exact failure signature is frozen instead, so the run still
//! breaks if their behaviour changes in either direction.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use tiwf::config::{ScalingConfig, Target, VerifyConfig};
use tiwf::crosscheck::{
    default_large_c, dual_checks, enumeration_cases, enumeration_checks, large_c_check, quadrature_checks, ti_draws,
    urn_draws,
};
use tiwf::report::{Provenance, Record, DISTANCE_ABS_TOL};
use tiwf::scaling::run_scaling;
use tiwf::verify::run_verify;
use tiwf_core::beta::{beta_moment, BetaParams};
use tiwf_core::moments::{exact_stationary_moments, leading_order_exy2};
use tiwf_core::stein::factors_from_rates;
use tiwf_core::ti::ti_stationary_moments;
use tiwf_core::{ModelKind, ScalingRegime, TIParams};

const SEED: u64 = 20240601;

const ENUM_TOL: f64 = 1e-12;
const QUAD_REL_TOL: f64 = 1e-8;
const QUAD_DRAWS: usize = 50;
const DUAL_DRAWS: usize = 5;
const DUAL_REPS: u64 = 1_000_000;
const DUAL_Z: f64 = 3.0;
const MARGINAL_TOL: f64 = 1e-12;
const SLOPE_TOL: f64 = 0.05;
const LEADING_REL_TOL: f64 = 0.02;
const LARGE_C_EXY2: f64 = 1e-5;
const LARGE_C_REL_TOL: f64 = 1e-3;

struct Line {
    id: u32,
    pass: bool,
    /// Whether the criterion is attainable with the formulas as printed.
    attainable: bool,
    /// For unattainable criteria: whether the failure has the known shape.
    signature_ok: bool,
    detail: String,
}

impl Line {
    fn emit(&self) {
        let status = if self.pass { "PASS" } else { "FAIL" };
        let note = match (self.attainable, self.pass, self.signature_ok) {
            (true, _, _) => "",
            (false, false, true) => " [expected: printed formula]",
            (false, false, false) => " [unexpected failure shape]",
            (false, true, _) => " [unexpectedly passes]",
        };
        println!("criterion {}: {status}{note} {}", self.id, self.detail);
    }

    fn as_frozen(&self) -> bool {
        if self.attainable {
            self.pass
        } else {
            !self.pass && self.signature_ok
        }
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn criterion_1() -> Line {
    let (res, dt) = timed(|| enumeration_checks(&enumeration_cases(), 4));
    let checks = res.expect("enumeration");
    let transfer = checks.iter().map(|c| c.transfer_err).fold(0.0, f64::max);
    let moments = checks.iter().map(|c| c.moment_err).fold(0.0, f64::max);
    let pass = checks.len() == 4 && transfer <= ENUM_TOL && moments <= ENUM_TOL && dt < Duration::from_secs(1);
    Line {
        id: 1,
        pass,
        attainable: true,
        signature_ok: true,
        detail: format!(
            "enumeration (3,2,1),(4,3,1) both kinds: transfer err {transfer:.2e}, moment err {moments:.2e} \
             (tol {ENUM_TOL:e}), {:.3} s (limit 1 s)",
            dt.as_secs_f64()
        ),
    }
}

/// `Dx = n/a`, `Dxx = n(n-1)/(2a)`, `Dxxx = n(n-1)(n-2)/(3a)` with no
/// migration and `b = a`. Dyadic `a` keeps every operation exact in f64.
fn one_island_exact() -> bool {
    let mut ok = true;
    for &a in &[0.25, 0.5, 1.0, 2.0, 8.0] {
        for n in 1..=6u64 {
            let f = factors_from_rates(n, 0, a, a, 0.0, 0.0).expect("factors");
            let nf = n as f64;
            ok &= f.dx == nf / a;
            ok &= f.dxx == nf * (nf - 1.0) / (2.0 * a);
            ok &= f.dxxx == nf * (nf - 1.0) * (nf - 2.0) / (3.0 * a);
        }
    }
    ok
}

fn criterion_2() -> Line {
    let ((checks, exact), dt) = timed(|| (quadrature_checks(&urn_draws(SEED, QUAD_DRAWS), QUAD_REL_TOL), one_island_exact()));
    let checks = checks.expect("quadrature");
    let worst = checks.iter().map(|c| c.max_rel_err).fold(0.0, f64::max);
    let pass = checks.len() == 20 && worst <= QUAD_REL_TOL && exact && dt < Duration::from_secs(10);
    Line {
        id: 2,
        pass,
        attainable: true,
        signature_ok: true,
        detail: format!(
            "{} closed forms x {QUAD_DRAWS} draws: max rel err {worst:.2e} (tol {QUAD_REL_TOL:e}); \
             one-island identities exact: {exact}; {:.3} s (limit 10 s)",
            checks.len(),
            dt.as_secs_f64()
        ),
    }
}

fn beta_marginals_err() -> f64 {
    let mut worst = 0.0_f64;
    for ti in ti_draws(SEED, DUAL_DRAWS) {
        let ti = TIParams { c1: 0.0, c2: 0.0, ..ti };
        let t = ti_stationary_moments(&ti, 6).expect("moments");
        let bx = BetaParams::new(2.0 * ti.a1 / ti.alpha, 2.0 * ti.a2 / ti.alpha).expect("beta");
        let by = BetaParams::new(2.0 * ti.b1 / ti.beta, 2.0 * ti.b2 / ti.beta).expect("beta");
        for k in 1..=6usize {
            worst = worst.max((t.value(k, 0) - beta_moment(&bx, k as u32)).abs());
            worst = worst.max((t.value(0, k) - beta_moment(&by, k as u32)).abs());
        }
    }
    worst
}

fn criterion_3() -> Line {
    let exps = [[1, 0], [0, 1], [1, 1], [2, 0]];
    let ((dual, marg), dt) =
        timed(|| (dual_checks(&ti_draws(SEED, DUAL_DRAWS), &exps, DUAL_REPS, SEED), beta_marginals_err()));
    let dual = dual.expect("dual");
    let z = dual.iter().map(|d| d.z.abs()).fold(0.0, f64::max);
    let pass = dual.len() == DUAL_DRAWS * exps.len() && z <= DUAL_Z && marg <= MARGINAL_TOL && dt < Duration::from_secs(60);
    Line {
        id: 3,
        pass,
        attainable: true,
        signature_ok: true,
        detail: format!(
            "dual vs solver, {} cases x {DUAL_REPS} reps: max |z| {z:.3} (limit {DUAL_Z}); \
             uncoupled Beta marginals k<=6 max err {marg:.2e} (tol {MARGINAL_TOL:e}); {:.3} s (limit 60 s)",
            dual.len(),
            dt.as_secs_f64()
        ),
    }
}

fn verify_target(t: Target) -> (tiwf::verify::VerifyOutcome, Duration) {
    let cfg = VerifyConfig { targets: vec![t], ..VerifyConfig::default() };
    timed(|| run_verify(&cfg, Provenance::new("acceptance", SEED)))
}

fn criterion_4() -> Line {
    let (out, dt) = verify_target(Target::Ti);
    let c = out.summary.counts;
    let pass = c.errors == 0 && c.checked == c.records && c.violations == 0 && dt < Duration::from_secs(30);
    Line {
        id: 4,
        pass,
        attainable: true,
        signature_ok: true,
        detail: format!(
            "TI dominance: {} records, {} checked, {} violations, {} errors; {:.3} s (limit 30 s)",
            c.records,
            c.checked,
            c.violations,
            c.errors,
            dt.as_secs_f64()
        ),
    }
}

/// Total with the Wright-Fisher `A1` taken at the `1/lambda` scale of the
/// other terms.
fn total_with_scaled_a1(r: &Record) -> Option<f64> {
    let b = r.bound.as_ref()?;
    let (a1, scaled) = (b.extra("A1")?, b.extra("A1_scaled")?);
    let t1 = b.term("h1*A1")?;
    let ratio = if a1 > 0.0 { scaled / a1 } else { 0.0 };
    Some(b.total - t1 + t1 * ratio)
}

fn criterion_5() -> Line {
    let (out, dt) = verify_target(Target::Beta);
    let c = out.summary.counts;
    let bad: Vec<&Record> = out.records.iter().filter(|r| r.holds() == Some(false)).collect();
    let pass = c.errors == 0 && c.checked == c.records && c.violations == 0 && dt < Duration::from_secs(30);
    // Every violation is WF with h = x and unequal total mutation, and
    // disappears once A1 carries the 1/lambda factor.
    let shape = bad.iter().all(|r| {
        let p = &r.params;
        p.kind == ModelKind::TwoIslandWF
            && r.h.to_string() == "x"
            && (p.p1 + p.p2 - p.q1 - p.q2).abs() > 0.0
            && total_with_scaled_a1(r).is_some_and(|t| r.exact_distance.unwrap() <= t + DISTANCE_ABS_TOL)
    });
    let rescued = out.records.iter().filter(|r| r.params.kind == ModelKind::TwoIslandWF).all(|r| {
        total_with_scaled_a1(r).is_some_and(|t| r.exact_distance.unwrap() <= t + DISTANCE_ABS_TOL)
    });
    Line {
        id: 5,
        pass,
        attainable: false,
        signature_ok: c.errors == 0 && !bad.is_empty() && shape && rescued && dt < Duration::from_secs(30),
        detail: format!(
            "Beta dominance: {} records, {} checked, {} violations (all WF h=x with unequal mutation totals: {shape}; \
             max ratio {:.1}); all WF records hold with A1 scaled by N+M: {rescued}; {:.3} s (limit 30 s)",
            c.records,
            c.checked,
            c.violations,
            out.summary.by_target[0].max_ratio.unwrap_or(f64::NAN),
            dt.as_secs_f64()
        ),
    }
}

fn criterion_6() -> Line {
    let cfg = ScalingConfig::default();
    let (out, dt) = timed(|| run_scaling(&cfg, Provenance::new("acceptance", SEED)));
    let s = &out.summary;
    let bound_fits: Vec<_> = s.fits.iter().filter(|f| f.quantity == "bound").collect();
    let off: Vec<String> = bound_fits
        .iter()
        .filter(|f| f.within_tol != Some(true))
        .map(|f| format!("{}/{}/eps={}:{:.3}", f.kind, f.target, f.eps, f.slope.unwrap_or(f64::NAN)))
        .collect();
    let pass = s.dominance && s.slopes_ok && s.counts.errors == 0 && dt < Duration::from_secs(300);

    // Far out the same regime recovers every slope except WF Beta at
    // eps in (0, 1), where symmetric mutation zeroes A1 and the rest decays
    // like N^-min(eps, 1/2).
    let far = ScalingConfig {
        n_grid: vec![10_000_000_000, 100_000_000_000, 1_000_000_000_000, 10_000_000_000_000],
        exact_n_grid: vec![],
        exact_max_n: 0,
        ..ScalingConfig::default()
    };
    let far_out = run_scaling(&far, Provenance::new("acceptance", SEED));
    let far_ok = far_out.summary.fits.iter().filter(|f| f.quantity == "bound").all(|f| {
        let wf_beta_mid = f.kind == "wf" && f.target == "beta" && f.eps > 0.0 && f.eps < 1.0;
        let expect = if wf_beta_mid { -f.eps.min(0.5) } else { f.expected.unwrap() };
        f.slope.is_some_and(|v| (v - expect).abs() <= SLOPE_TOL)
    });
    Line {
        id: 6,
        pass,
        attainable: false,
        signature_ok: s.dominance && s.counts.errors == 0 && !off.is_empty() && far_ok && dt < Duration::from_secs(300),
        detail: format!(
            "exact distances <= bounds: {}; {}/{} slopes within {SLOPE_TOL} over N=1e3..1e6, off: [{}]; \
             N=1e10..1e13 slopes match asymptotic orders: {far_ok}; {:.3} s (limit 300 s)",
            s.dominance,
            bound_fits.len() - off.len(),
            bound_fits.len(),
            off.join(" "),
            dt.as_secs_f64()
        ),
    }
}

fn criterion_7() -> Line {
    let n = 100_000u64;
    let run = || {
        [ModelKind::TwoIslandWF, ModelKind::SeedBank].map(|kind| {
            let reg = ScalingRegime::symmetric(kind, 1.0, 0.5);
            let p = reg.instantiate(n).expect("regime");
            let exy2 = exact_stationary_moments::<f64>(&p, 2).expect("moments").exy2();
            let scaled = (n as f64).powf(reg.eps) * exy2;
            (leading_order_exy2(&reg, kind), scaled)
        })
    };
    let (res, dt) = timed(run);
    let [(kw, sw), (ks, ss)] = res;
    let frozen = (kw - 1.0 / 9.0).abs() < 1e-15 && (ks - 1.0 / 18.0).abs() < 1e-15;
    let ew = (sw / (1.0 / 9.0) - 1.0).abs();
    let es = (ss / (1.0 / 18.0) - 1.0).abs();
    let pass = frozen && ew <= LEADING_REL_TOL && es <= LEADING_REL_TOL && dt < Duration::from_secs(10);
    Line {
        id: 7,
        pass,
        attainable: true,
        signature_ok: true,
        detail: format!(
            "N=1e5, eps=0.5: WF N^eps E(X-Y)^2 = {sw:.5} vs 1/9 (rel {ew:.2e}), SB {ss:.5} vs 1/18 (rel {es:.2e}), \
             tol {LEADING_REL_TOL}; {:.3} s (limit 10 s)",
            dt.as_secs_f64()
        ),
    }
}

fn criterion_8() -> Line {
    let (base, gamma, cs) = default_large_c();
    let (res, dt) = timed(|| large_c_check(&base, gamma, &cs));
    let lc = res.expect("large c");
    let exy2_ok = lc.exy2_monotone && lc.final_exy2 < LARGE_C_EXY2;
    let mean_ok = lc.mean_rel_err <= LARGE_C_REL_TOL;
    let printed_ok = lc.printed_var_rel_err <= LARGE_C_REL_TOL;
    let derived_ok = lc.var_rel_err <= LARGE_C_REL_TOL && lc.cov_rel_err <= LARGE_C_REL_TOL;
    let in_time = dt < Duration::from_secs(5);
    Line {
        id: 8,
        pass: exy2_ok && mean_ok && printed_ok && in_time,
        attainable: false,
        signature_ok: exy2_ok && mean_ok && !printed_ok && derived_ok && in_time,
        detail: format!(
            "c=1e1..1e6: E(X-Y)^2 decreasing {} to {:.2e} (limit {LARGE_C_EXY2:e}); mean rel err {:.2e}; \
             printed variance rel err {:.3} (tol {LARGE_C_REL_TOL:e}); variance from the moment equations rel err \
             {:.2e}, covariance {:.2e}; {:.3} s (limit 5 s)",
            lc.exy2_monotone,
            lc.final_exy2,
            lc.mean_rel_err,
            lc.printed_var_rel_err,
            lc.var_rel_err,
            lc.cov_rel_err,
            dt.as_secs_f64()
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [fn() -> Line; 8] =
        [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8];
    let mut frozen = true;
    for f in criteria {
        let line = f();
        line.emit();
        frozen &= line.as_frozen();
    }
    if frozen {
        println!("acceptance: outcomes match the frozen expectations");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: outcomes differ from the frozen expectations");
        ExitCode::FAILURE
    }
}
