//! Stein factors and the explicit approximation bounds.
//!
//! For `h = x^n y^m` the derivatives of the Stein solution are bounded by the
//! factors `D_*`, which depend only on `(n, m, a, b, c1, c2)` with
//! `a = a1 + a2`, `b = b1 + b2`. Each chain contributes discrepancy terms
//! `A_*`, and the bound is `sum D_* A_*`.
//!
//! The Beta bounds are for `h(w)` with `w = (N X + M Y) / (N + M)` and only
//! need the norms `|h|_1`, `|h|_2`, `|h|_{2,1}` plus the exact `E(X - Y)^2`.

use alloc::vec::Vec;

use crate::chain::{ChainParams, ModelKind};
use crate::error::{Error, Result};
use crate::ti::{map_chain_to_ti, TIParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteinFactors {
    pub dx: f64,
    pub dy: f64,
    pub dxx: f64,
    pub dyy: f64,
    pub dxy: f64,
    pub dxxx: f64,
    pub dxxy: f64,
    pub dxyy: f64,
    pub dyyy: f64,
}

impl SteinFactors {
    pub fn as_array(&self) -> [f64; 9] {
        [
            self.dx, self.dy, self.dxx, self.dyy, self.dxy, self.dxxx, self.dxxy, self.dxyy, self.dyyy,
        ]
    }

    pub const NAMES: [&'static str; 9] = ["Dx", "Dy", "Dxx", "Dyy", "Dxy", "Dxxx", "Dxxy", "Dxyy", "Dyyy"];
}

/// The nine factor bounds for `h = x^n y^m`.
pub fn stein_factors(n: u64, m: u64, ti: &TIParams) -> Result<SteinFactors> {
    let a = ti.a1 + ti.a2;
    let b = ti.b1 + ti.b2;
    factors_from_rates(n, m, a, b, ti.c1, ti.c2)
}

pub fn factors_from_rates(n: u64, m: u64, a: f64, b: f64, c1: f64, c2: f64) -> Result<SteinFactors> {
    let delta = a * b + a * c2 + b * c1;
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::DegenerateDenominator("ab + a c2 + b c1"));
    }
    let (nf, mf) = (n as f64, m as f64);
    let n2 = nf * (nf - 1.0);
    let m2 = mf * (mf - 1.0);
    let n3 = n2 * (nf - 2.0);
    let m3 = m2 * (mf - 2.0);
    let s = a + b + c1 + c2;
    let two = 2.0 * s * delta;
    let three = 3.0 * delta * (2.0 * s * s + delta);

    let dx = (nf * (b + c2) + mf * c2) / delta;
    let dy = (mf * (a + c1) + nf * c1) / delta;
    let dxx = (n2 * (b * s + c2 * (a + b + c2)) + m2 * c2 * c2 + 2.0 * mf * nf * c2 * (b + c2)) / two;
    let dyy = (m2 * (a * s + c1 * (a + b + c1)) + n2 * c1 * c1 + 2.0 * mf * nf * c1 * (a + c1)) / two;
    let dxy = (n2 * c1 * (b + c2) + m2 * c2 * (a + c1) + 2.0 * mf * nf * (a + c1) * (b + c2)) / two;

    let dxxx = (n3
        * (b * (2.0 * s * s + a * b + b * c1 + c1 * c2)
            + c2 * (2.0 * (a + b + c2) * (a + b + c2) + a * (2.0 * b + 2.0 * c1 + c2)))
        + 3.0 * mf * n2 * c2 * (delta + 2.0 * (b + c2) * (b + c2))
        + 6.0 * nf * m2 * c2 * c2 * (b + c2)
        + 2.0 * m3 * c2 * c2 * c2)
        / three;
    let dxxy = (n3 * c1 * (delta + 2.0 * (b + c2) * (b + c2))
        + 4.0 * mf * n2 * c1 * c2 * (b + c2)
        + 2.0 * nf * m2 * c1 * c2 * c2
        + mf * n2
            * (3.0 * b * (a + c1) * (a + 2.0 * b + c1)
                + (3.0 * a * a + 8.0 * b * c1 + 3.0 * a * (4.0 * b + c1)) * c2
                + 2.0 * (3.0 * a + c1) * c2 * c2)
        + 2.0 * nf * m2 * c2 * (3.0 * a * (b + c2) + c1 * (3.0 * b + 2.0 * c2))
        + 2.0 * m3 * (a + c1) * c2 * c2)
        / three;
    let dxyy = (m3 * c2 * (delta + 2.0 * (a + c1) * (a + c1))
        + 4.0 * nf * m2 * c1 * c2 * (a + c1)
        + 2.0 * mf * n2 * c1 * c1 * c2
        + nf * m2
            * (3.0 * a * (b + c2) * (b + 2.0 * a + c2)
                + (3.0 * b * b + 8.0 * a * c2 + 3.0 * b * (4.0 * a + c2)) * c1
                + 2.0 * (3.0 * b + c2) * c1 * c1)
        + 2.0 * mf * n2 * c1 * (3.0 * b * (a + c1) + c2 * (3.0 * a + 2.0 * c1))
        + 2.0 * n3 * (b + c2) * c1 * c1)
        / three;
    let dyyy = (m3
        * (a * (2.0 * s * s + a * b + a * c2 + c1 * c2)
            + c1 * (2.0 * (a + b + c1) * (a + b + c1) + b * (2.0 * a + 2.0 * c2 + c1)))
        + 3.0 * nf * m2 * c1 * (delta + 2.0 * (a + c1) * (a + c1))
        + 6.0 * mf * n2 * c1 * c1 * (a + c1)
        + 2.0 * n3 * c1 * c1 * c1)
        / three;

    Ok(SteinFactors { dx, dy, dxx, dyy, dxy, dxxx, dxxy, dxyy, dyyy })
}

/// Discrepancy terms paired with the Stein factors. `ax` is `None` when the
/// bound has no first-order `x` term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ATerms {
    pub ax: Option<f64>,
    pub ay: f64,
    pub axx: f64,
    pub ayy: f64,
    pub axy: f64,
    pub axxx: f64,
    pub axxy: f64,
    pub axyy: f64,
    pub ayyy: f64,
}

impl ATerms {
    pub fn zero() -> Self {
        Self { ax: Some(0.0), ay: 0.0, axx: 0.0, ayy: 0.0, axy: 0.0, axxx: 0.0, axxy: 0.0, axyy: 0.0, ayyy: 0.0 }
    }

    fn products(&self, f: &SteinFactors) -> Vec<(&'static str, f64)> {
        let mut out = Vec::with_capacity(9);
        if let Some(ax) = self.ax {
            out.push(("Dx*Ax", f.dx * ax));
        }
        out.push(("Dy*Ay", f.dy * self.ay));
        out.push(("Dxx*Axx", f.dxx * self.axx));
        out.push(("Dyy*Ayy", f.dyy * self.ayy));
        out.push(("Dxy*Axy", f.dxy * self.axy));
        out.push(("Dxxx*Axxx", f.dxxx * self.axxx));
        out.push(("Dxxy*Axxy", f.dxxy * self.axxy));
        out.push(("Dxyy*Axyy", f.dxyy * self.axyy));
        out.push(("Dyyy*Ayyy", f.dyyy * self.ayyy));
        out
    }

    fn named(&self) -> Vec<(&'static str, f64)> {
        let mut out = Vec::with_capacity(9);
        if let Some(ax) = self.ax {
            out.push(("Ax", ax));
        }
        out.extend([
            ("Ay", self.ay),
            ("Axx", self.axx),
            ("Ayy", self.ayy),
            ("Axy", self.axy),
            ("Axxx", self.axxx),
            ("Axxy", self.axxy),
            ("Axyy", self.axyy),
            ("Ayyy", self.ayyy),
        ]);
        out
    }
}

/// `sum D_* A_*`.
pub fn assemble_total(factors: &SteinFactors, a: &ATerms) -> f64 {
    a.products(factors).iter().map(|(_, v)| v).sum()
}

/// `|h|_1`, `|h|_2`, `|h|_{2,1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HNorms {
    pub h1: f64,
    pub h2: f64,
    pub h21: f64,
}

/// Norms of `h(x) = x^k` on `[0, 1]`.
pub fn polynomial_h_norms(k: u32) -> HNorms {
    let k = k as f64;
    HNorms {
        h1: k,
        h2: (k * (k - 1.0)).max(0.0),
        h21: (k * (k - 1.0) * (k - 2.0)).max(0.0),
    }
}

/// A bound split into its additive pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundBreakdown {
    /// Additive contributions; they sum to `total`.
    pub terms: Vec<(&'static str, f64)>,
    /// Ingredients reported alongside (A-values, Stein factors, epsilons).
    pub extras: Vec<(&'static str, f64)>,
    pub lambda: Option<f64>,
    pub total: f64,
}

impl BoundBreakdown {
    fn from_terms(terms: Vec<(&'static str, f64)>, extras: Vec<(&'static str, f64)>, lambda: Option<f64>) -> Self {
        let total = terms.iter().map(|(_, v)| v).sum();
        Self { terms, extras, lambda, total }
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|(k, _)| *k == name).map(|(_, v)| *v)
    }

    pub fn extra(&self, name: &str) -> Option<f64> {
        self.extras.iter().find(|(k, _)| *k == name).map(|(_, v)| *v)
    }

    /// Whether the bound exceeds the trivial bound 1 on distances between
    /// expectations of `[0, 1]`-valued test functions.
    pub fn is_vacuous(&self) -> bool {
        self.total > 1.0
    }
}

fn require(params: &ChainParams, kind: ModelKind) -> Result<ChainParams> {
    let params = params.validate()?;
    if params.kind != kind {
        return Err(Error::WrongKind { expected: kind.name() });
    }
    Ok(params)
}

/// `(eps_x, eps_y)` of the Wright-Fisher diffusion bound.
pub fn wf_epsilons(params: &ChainParams) -> (f64, f64) {
    let (n, m, c) = (params.n as f64, params.m as f64, params.c as f64);
    let sp = params.p1 + params.p2;
    let sq = params.q1 + params.q2;
    (sp + c / n * (1.0 + sq), sq + c / m * (1.0 + sp))
}

/// Discrepancy terms of the Wright-Fisher to diffusion bound.
pub fn wf_ti_terms(params: &ChainParams) -> Result<ATerms> {
    let p = require(params, ModelKind::TwoIslandWF)?;
    let (n, m, c) = (p.n as f64, p.m as f64, p.c as f64);
    let (p1, q1) = (p.p1, p.q1);
    let sp = p.p1 + p.p2;
    let sq = p.q1 + p.q2;
    let (ex, ey) = wf_epsilons(&p);

    let ax = 2.0 * c * sq;
    let ay = 2.0 * c * n / m * sp;
    let axx = n * sp * sp + (4.0 * c + 1.0 + 2.0 * n * p1 + 2.0 * c * q1) * sp + p1 + n * p1 * p1
        + 2.0 * c * p1 * sq
        + 2.0 * c * c * (1.0 + p1 + q1) / n;
    let ayy = n / m
        * (m * sq * sq + (4.0 * c + 1.0 + 2.0 * m * q1 + 2.0 * c * p1) * sq + q1 + m * q1 * q1
            + 2.0 * c * q1 * sp
            + 2.0 * c * c * (1.0 + p1 + q1) / m);
    let axy = 2.0 * n * ex * ey;
    let bx = libm::pow(4.0 * n * n + 4.0 * c * c + 6.0 * c * n, 0.25) / n + ex;
    let by = libm::pow(4.0 * m * m + 4.0 * c * c + 6.0 * c * m, 0.25) / m + ey;
    let tail_x = 2.0 * libm::sqrt(n) + 2.0 * n * ex;
    let tail_y = 2.0 * n / libm::sqrt(m) + 2.0 * n * ey;
    Ok(ATerms {
        ax: Some(ax),
        ay,
        axx,
        ayy,
        axy,
        axxx: bx * bx * tail_x / 6.0,
        axxy: bx * bx * tail_y / 2.0,
        axyy: by * by * tail_x / 2.0,
        ayyy: by * by * tail_y / 6.0,
    })
}

/// `eps_{M,c}`, the hypergeometric fourth-moment remainder. Needs `M >= 4`.
pub fn eps_mc(m: u64, c: u64) -> Result<f64> {
    if m < 4 {
        return Err(Error::MTooSmall(m));
    }
    let (mf, cf) = (m as f64, c as f64);
    Ok(cf * mf / (4.0 * (mf - 1.0) * (mf - 2.0) * (mf - 3.0))
        * (mf * mf * (1.0 + cf) + mf * (1.0 + 6.0 * cf + cf * cf) + 6.0 * cf * cf))
}

/// Discrepancy terms of the seed-bank to diffusion bound (no `Ax`).
pub fn sb_ti_terms(params: &ChainParams) -> Result<(ATerms, f64)> {
    let p = require(params, ModelKind::SeedBank)?;
    let emc = eps_mc(p.m, p.c)?;
    let (n, m, c) = (p.n as f64, p.m as f64, p.c as f64);
    let (p1, p2) = (p.p1, p.p2);
    let sp = p1 + p2;

    let ay = 2.0 * c * n / m * sp;
    let axx = n * sp * sp + n * p1 * p1 + (4.0 * c + 3.0 + (4.0 * c + 2.0 + 2.0 * n) * p1) * sp
        + (2.0 * c + 3.0) * p1
        + (3.0 * c * c + 2.0 * c * c * p1 + c * p2) / n;
    let ayy = 4.0 * c * c * n * (1.0 + p1) / (m * (m - 1.0));
    let axy = 2.0 / m
        * ((2.0 * c * n + c * n * p1) * sp + (2.0 * c * c + 2.0 * c * n) * p1 + 3.0 * c * c
            + c * n * p1 * p1
            + c * c * m / (m - 1.0));
    let bx = libm::pow(4.0 * n * n + 2.0 * c * n + emc, 0.25) / n + sp + c / n;
    let by = libm::pow(6.0 * c * c + emc, 0.25) / m + c / m * (1.0 + sp);
    let tail_x = libm::sqrt(n) + n * sp + c;
    let tail_y = libm::sqrt(5.0 * c * n * n / (4.0 * m * m)) + c * n / m * (1.0 + sp);
    Ok((
        ATerms {
            ax: None,
            ay,
            axx,
            ayy,
            axy,
            axxx: bx * bx * tail_x / 6.0,
            axxy: bx * bx * tail_y / 2.0,
            axyy: by * by * tail_x / 2.0,
            ayyy: by * by * tail_y / 6.0,
        },
        emc,
    ))
}

fn ti_breakdown(
    factors: &SteinFactors,
    a: &ATerms,
    mut extras: Vec<(&'static str, f64)>,
    lambda: f64,
) -> BoundBreakdown {
    extras.extend(a.named());
    extras.extend(SteinFactors::NAMES.iter().copied().zip(factors.as_array()));
    BoundBreakdown::from_terms(a.products(factors), extras, Some(lambda))
}

/// Bound on `|E h(X, Y) - E h(Z1, Z2)|` for the Wright-Fisher chain and
/// `h = x^n y^m`.
pub fn wf_ti_bound(params: &ChainParams, n: u64, m: u64) -> Result<BoundBreakdown> {
    let a = wf_ti_terms(params)?;
    let (ti, lambda) = map_chain_to_ti(params);
    let f = stein_factors(n, m, &ti)?;
    let (ex, ey) = wf_epsilons(params);
    Ok(ti_breakdown(&f, &a, alloc::vec![("eps_x", ex), ("eps_y", ey)], lambda))
}

/// Bound on `|E h(X, Y) - E h(Z1, Z2)|` for the seed-bank chain and
/// `h = x^n y^m`.
pub fn sb_ti_bound(params: &ChainParams, n: u64, m: u64) -> Result<BoundBreakdown> {
    let (a, emc) = sb_ti_terms(params)?;
    let (ti, lambda) = map_chain_to_ti(params);
    let f = stein_factors(n, m, &ti)?;
    Ok(ti_breakdown(&f, &a, alloc::vec![("eps_Mc", emc)], lambda))
}

/// Diffusion bound for either chain.
pub fn ti_bound(params: &ChainParams, n: u64, m: u64) -> Result<BoundBreakdown> {
    match params.kind {
        ModelKind::TwoIslandWF => wf_ti_bound(params, n, m),
        ModelKind::SeedBank => sb_ti_bound(params, n, m),
    }
}

fn beta_breakdown(
    sum_a: f64,
    norms: &HNorms,
    a1: f64,
    a2: f64,
    a3: f64,
    more: &[(&'static str, f64)],
) -> BoundBreakdown {
    let t1 = norms.h1 / sum_a * a1;
    let t2 = norms.h2 / (2.0 * (sum_a + 1.0)) * a2;
    let t3 = norms.h21 / (18.0 * (sum_a + 2.0)) * a3;
    let mut extras = alloc::vec![("A1", a1), ("A2", a2), ("A3", a3)];
    extras.extend_from_slice(more);
    BoundBreakdown::from_terms(alloc::vec![("h1*A1", t1), ("h2*A2", t2), ("h21*A3", t3)], extras, None)
}

/// Bound on `|E h(w) - E h(Z)|`, `Z ~ Beta(2(Np1 + Mq1), 2(Np2 + Mq2))`, for
/// the Wright-Fisher chain. `exy2` is the exact `E(X - Y)^2`.
///
/// `A1` is the drift remainder without the `1 / lambda = 2(N + M)` scaling
/// that `A2`, `A3` and the seed-bank `A1` carry. The scaled value is kept in
/// the extras as `A1_scaled` and is not part of the total.
pub fn wf_beta_bound(params: &ChainParams, norms: &HNorms, exy2: f64) -> Result<BoundBreakdown> {
    let p = require(params, ModelKind::TwoIslandWF)?;
    if !(exy2 >= 0.0) {
        return Err(Error::InvalidArgument("E(X - Y)^2 must be non-negative"));
    }
    let (n, m) = (p.n as f64, p.m as f64);
    let nm = n + m;
    let a1 = 2.0 * (n * p.p1 + m * p.q1);
    let a2 = 2.0 * (n * p.p2 + m * p.q2);
    let sigma = p.p1 + p.p2 + p.q1 + p.q2;
    let big_a1 = 2.0 * n * m / (nm * nm) * ((p.q1 + p.q2) - (p.p1 + p.p2)).abs() * libm::sqrt(exy2);
    let scaled_a1 = big_a1 * nm;
    let lin = n * (2.0 * p.p1 + p.p2) + m * (2.0 * p.q1 + p.q2);
    let big_a2 = (lin * lin + 3.0 * n * (2.0 * p.p1 + p.p2) + 3.0 * m * (2.0 * p.q1 + p.q2)) / nm
        + n * m / (nm * nm) * exy2;
    let br = libm::pow(4.0 * n * n + 6.0 * n * m + 4.0 * m * m, 0.25) + sigma;
    let big_a3 = br * br * (libm::sqrt(nm) + sigma) / (nm * nm);
    Ok(beta_breakdown(a1 + a2, norms, big_a1, big_a2, big_a3, &[("A1_scaled", scaled_a1)]))
}

/// Bound on `|E h(w) - E h(Z)|`, `Z ~ Beta(2(N + M)p1, 2(N + M)p2)`, for the
/// seed-bank chain.
pub fn sb_beta_bound(params: &ChainParams, norms: &HNorms, exy2: f64) -> Result<BoundBreakdown> {
    let p = require(params, ModelKind::SeedBank)?;
    if !(exy2 >= 0.0) {
        return Err(Error::InvalidArgument("E(X - Y)^2 must be non-negative"));
    }
    let (n, m) = (p.n as f64, p.m as f64);
    let nm = n + m;
    let sp = p.p1 + p.p2;
    let a1 = 2.0 * nm * p.p1;
    let a2 = 2.0 * nm * p.p2;
    let root = libm::sqrt(exy2);
    let big_a1 = 2.0 * m * sp * root;
    let big_a2 = n * sp * sp + sp + m / nm * root;
    let br = libm::sqrt(2.0 * n) + n * sp;
    let big_a3 = 2.0 / (n * nm) * br * br * (libm::sqrt(n) + n * sp);
    Ok(beta_breakdown(a1 + a2, norms, big_a1, big_a2, big_a3, &[]))
}

/// Beta bound for either chain.
pub fn beta_bound(params: &ChainParams, norms: &HNorms, exy2: f64) -> Result<BoundBreakdown> {
    match params.kind {
        ModelKind::TwoIslandWF => wf_beta_bound(params, norms, exy2),
        ModelKind::SeedBank => sb_beta_bound(params, norms, exy2),
    }
}
