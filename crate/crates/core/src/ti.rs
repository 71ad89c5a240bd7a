//! The two-island diffusion and its stationary moments.
//!
//! Generator, for `f` on `[0, 1]^2`:
//!
//! ```text
//! A f = (a1 - (a1 + a2) x + c1 (y - x)) f_x + (b1 - (b1 + b2) y + c2 (x - y)) f_y
//!     + (alpha / 2) x (1 - x) f_xx + (beta / 2) y (1 - y) f_yy
//! ```
//!
//! Applied to `x^n y^m` it produces a combination of five monomials, and
//! `E[A h] = 0` under the stationary law gives one linear equation per
//! monomial. The equations for total degree `d` only involve moments of
//! degree `d` and `d - 1`, so the moments are solved block by block.

use alloc::vec::Vec;

use crate::chain::{ChainParams, ModelKind};
use crate::error::{Error, Result};
use crate::linalg::{solve, DenseMatrix};
use crate::moments::{MomentIndex, MomentTable, TableTag, MAX_DEGREE};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TIParams {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub c1: f64,
    pub c2: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl TIParams {
    pub fn a(&self) -> f64 {
        self.a1 + self.a2
    }

    pub fn b(&self) -> f64 {
        self.b1 + self.b2
    }

    /// `ab + a c2 + b c1`, positive exactly when the moment blocks are solvable
    /// and the Stein factors are finite.
    pub fn delta(&self) -> f64 {
        let (a, b) = (self.a(), self.b());
        a * b + a * self.c2 + b * self.c1
    }

    pub fn validate(self) -> Result<Self> {
        let all = [self.a1, self.a2, self.b1, self.b2, self.c1, self.c2, self.alpha, self.beta];
        if all.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidArgument("diffusion parameters must be finite and non-negative"));
        }
        Ok(self)
    }

    /// Exchanges the two islands.
    pub fn swapped(&self) -> Self {
        Self {
            a1: self.b1,
            a2: self.b2,
            b1: self.a1,
            b2: self.a2,
            c1: self.c2,
            c2: self.c1,
            alpha: self.beta,
            beta: self.alpha,
        }
    }
}

/// Diffusion parameters matched to a chain, and the time scale `lambda`.
pub fn map_chain_to_ti(params: &ChainParams) -> (TIParams, f64) {
    let (n, m, c) = (params.n as f64, params.m as f64, params.c as f64);
    let lambda = 1.0 / (2.0 * n);
    let a1 = 2.0 * params.p1 * (n - c);
    let a2 = 2.0 * params.p2 * (n - c);
    let c1 = 2.0 * c;
    let c2 = 2.0 * c * n / m;
    let ti = match params.kind {
        ModelKind::TwoIslandWF => TIParams {
            a1,
            a2,
            b1: 2.0 * n * (m - c) * params.q1 / m,
            b2: 2.0 * n * (m - c) * params.q2 / m,
            c1,
            c2,
            alpha: 2.0,
            beta: 2.0 * n / m,
        },
        ModelKind::SeedBank => TIParams {
            a1,
            a2,
            b1: 0.0,
            b2: 0.0,
            c1,
            c2,
            alpha: 2.0,
            beta: 0.0,
        },
    };
    (ti, lambda)
}

/// `A(x^n y^m)` as `(monomial, coefficient)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorRow<T = f64> {
    pub index: MomentIndex,
    pub entries: Vec<(MomentIndex, T)>,
}

impl<T: Scalar> GeneratorRow<T> {
    pub fn coeff(&self, idx: MomentIndex) -> T {
        self.entries
            .iter()
            .filter(|(i, _)| *i == idx)
            .fold(T::zero(), |acc, (_, c)| acc + c.clone())
    }

    pub fn sum(&self) -> T {
        self.entries.iter().fold(T::zero(), |acc, (_, c)| acc + c.clone())
    }

    /// `sum_k coeff_k mu_k`.
    pub fn dot(&self, mu: &MomentTable<T>) -> T {
        self.entries
            .iter()
            .fold(T::zero(), |acc, (i, c)| acc + c.clone() * mu.value(i.n, i.m))
    }
}

struct Coeffs<T> {
    a1: T,
    a2: T,
    b1: T,
    b2: T,
    c1: T,
    c2: T,
    half_alpha: T,
    half_beta: T,
}

impl<T: Scalar> Coeffs<T> {
    fn new(ti: &TIParams) -> Self {
        let half = T::one() / T::from_u64(2);
        Self {
            a1: T::from_f64(ti.a1),
            a2: T::from_f64(ti.a2),
            b1: T::from_f64(ti.b1),
            b2: T::from_f64(ti.b2),
            c1: T::from_f64(ti.c1),
            c2: T::from_f64(ti.c2),
            half_alpha: T::from_f64(ti.alpha) * half.clone(),
            half_beta: T::from_f64(ti.beta) * half,
        }
    }

    fn row(&self, idx: MomentIndex) -> GeneratorRow<T> {
        let (n, m) = (idx.n, idx.m);
        let nt = T::from_u64(n as u64);
        let mt = T::from_u64(m as u64);
        let mut entries = Vec::with_capacity(5);
        let mut out_rate = T::zero();
        if n > 0 {
            let down = self.half_alpha.clone() * nt.clone() * T::from_u64(n as u64 - 1)
                + nt.clone() * self.a1.clone();
            let across = nt.clone() * self.c1.clone();
            out_rate = out_rate + down.clone() + across.clone() + nt.clone() * self.a2.clone();
            entries.push((MomentIndex::new(n - 1, m), down));
            entries.push((MomentIndex::new(n - 1, m + 1), across));
        }
        if m > 0 {
            let down = self.half_beta.clone() * mt.clone() * T::from_u64(m as u64 - 1)
                + mt.clone() * self.b1.clone();
            let across = mt.clone() * self.c2.clone();
            out_rate = out_rate + down.clone() + across.clone() + mt.clone() * self.b2.clone();
            entries.push((MomentIndex::new(n, m - 1), down));
            entries.push((MomentIndex::new(n + 1, m - 1), across));
        }
        entries.push((idx, -out_rate));
        GeneratorRow { index: idx, entries }
    }
}

/// The generator applied to `x^n y^m`.
pub fn generator_apply(n: usize, m: usize, ti: &TIParams) -> GeneratorRow<f64> {
    generator_apply_in::<f64>(n, m, ti)
}

pub fn generator_apply_in<T: Scalar>(n: usize, m: usize, ti: &TIParams) -> GeneratorRow<T> {
    Coeffs::<T>::new(ti).row(MomentIndex::new(n, m))
}

/// Stationary moments of the diffusion up to total degree `max_degree`.
pub fn ti_stationary_moments(ti: &TIParams, max_degree: usize) -> Result<MomentTable<f64>> {
    ti_stationary_moments_in::<f64>(ti, max_degree)
}

pub fn ti_stationary_moments_in<T: Scalar>(ti: &TIParams, max_degree: usize) -> Result<MomentTable<T>> {
    if max_degree > MAX_DEGREE {
        return Err(Error::DegreeOverflow { requested: max_degree, max: MAX_DEGREE });
    }
    let ti = ti.validate()?;
    let coeffs = Coeffs::<T>::new(&ti);
    let mut mu = alloc::vec![T::zero(); MomentIndex::count(max_degree)];
    mu[0] = T::one();
    for d in 1..=max_degree {
        let block: Vec<MomentIndex> = MomentIndex::block(d).collect();
        let mut a = DenseMatrix::<T>::zeros(d + 1);
        let mut rhs = alloc::vec![T::zero(); d + 1];
        for (r, &idx) in block.iter().enumerate() {
            for (k, c) in coeffs.row(idx).entries {
                if k.degree() == d {
                    let col = k.m;
                    a[(r, col)] = a[(r, col)].clone() + c;
                } else {
                    rhs[r] = rhs[r].clone() - c * mu[k.position()].clone();
                }
            }
        }
        let x = solve(a, rhs).ok_or(Error::SingularSystem { degree: d })?;
        for (idx, v) in block.iter().zip(x) {
            mu[idx.position()] = v;
        }
    }
    Ok(MomentTable::from_values(max_degree, TableTag::TI, mu))
}

/// Largest `|sum row(n,m) . mu|` divided by the largest coefficient in that
/// row, over all `1 <= n + m <= degree of mu`.
pub fn generator_residual(ti: &TIParams, mu: &MomentTable<f64>) -> f64 {
    let mut worst = 0.0_f64;
    for idx in MomentIndex::all(mu.max_degree()).skip(1) {
        let row = generator_apply(idx.n, idx.m, ti);
        let scale = row.entries.iter().map(|(_, c)| c.abs()).fold(0.0, f64::max);
        if scale > 0.0 {
            worst = worst.max(row.dot(mu).abs() / scale);
        }
    }
    worst
}

/// Limits of the first two moments along `c1 = c`, `c2 = gamma c`, `c -> inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LargeCLimit {
    /// Common limit of `E X` and `E Y`.
    pub mean: f64,
    /// Common limit of `E X^2`, `E Y^2` and `E XY`.
    pub second_moment: f64,
    /// Common limit of `Var X`, `Var Y` and `Cov(X, Y)`.
    pub var: f64,
    pub cov: f64,
}

/// Large-migration limits of the mean and second-moment structure.
///
/// With `A = gamma a1 + b1`, `G = gamma (a1 + a2) + b1 + b2` and
/// `s = gamma^2 alpha + beta`, the five degree-two moment equations give
/// `mean = A / G` and `E X^2 -> A (2 (1 + gamma) A + s) / (G (2 (1 + gamma) G + s))`.
pub fn limit_moments_large_c(
    a1: f64,
    a2: f64,
    b1: f64,
    b2: f64,
    gamma: f64,
    alpha: f64,
    beta: f64,
) -> Result<LargeCLimit> {
    let big_a = gamma * a1 + b1;
    let big_g = gamma * (a1 + a2) + b1 + b2;
    let s = gamma * gamma * alpha + beta;
    let k = 2.0 * (1.0 + gamma);
    let den = big_g * (k * big_g + s);
    if !(big_g > 0.0) || !(den > 0.0) {
        return Err(Error::DegenerateDenominator("gamma (a1 + a2) + b1 + b2"));
    }
    let mean = big_a / big_g;
    let second_moment = big_a * (k * big_a + s) / den;
    let var = second_moment - mean * mean;
    Ok(LargeCLimit { mean, second_moment, var, cov: var })
}

/// The limiting variance expression exactly as it is commonly printed,
/// `A [2 (1 + gamma)(A + gamma^2 alpha + beta)] / (G [2 (1 + gamma) G + gamma^2 alpha + beta])`.
/// It agrees with neither the limiting variance nor the second moment; kept
/// for comparison in reports.
pub fn printed_limit_variance(
    a1: f64,
    a2: f64,
    b1: f64,
    b2: f64,
    gamma: f64,
    alpha: f64,
    beta: f64,
) -> f64 {
    let big_a = gamma * a1 + b1;
    let big_g = gamma * (a1 + a2) + b1 + b2;
    let s = gamma * gamma * alpha + beta;
    big_a * (2.0 * (1.0 + gamma) * (big_a + s)) / (big_g * (2.0 * (1.0 + gamma) * big_g + s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ti(a1: f64, a2: f64, b1: f64, b2: f64, c1: f64, c2: f64, alpha: f64, beta: f64) -> TIParams {
        TIParams { a1, a2, b1, b2, c1, c2, alpha, beta }
    }

    #[test]
    fn chain_map() {
        let p = ChainParams::wf(100, 100, 2, 0.01, 0.01, 0.01, 0.01);
        let (t, lambda) = map_chain_to_ti(&p);
        assert!((t.a1 - 1.96).abs() < 1e-12);
        assert_eq!(lambda, 0.005);
        let p = ChainParams::wf(50, 50, 1, 0.01, 0.01, 0.01, 0.01);
        let (t, _) = map_chain_to_ti(&p);
        assert_eq!((t.c1, t.c2), (2.0, 2.0));
        let p = ChainParams::seed_bank(50, 20, 3, 0.01, 0.02);
        let (t, _) = map_chain_to_ti(&p);
        assert_eq!((t.b1, t.b2, t.beta), (0.0, 0.0, 0.0));
    }

    #[test]
    fn first_order_rows() {
        let t = ti(0.3, 0.5, 0.0, 0.0, 0.7, 0.0, 2.0, 0.0);
        let row = generator_apply(1, 0, &t);
        assert_eq!(row.coeff(MomentIndex::new(0, 0)), 0.3);
        assert_eq!(row.coeff(MomentIndex::new(0, 1)), 0.7);
        assert!((row.coeff(MomentIndex::new(1, 0)) + 1.5).abs() < 1e-15);
        let row = generator_apply(2, 0, &t);
        assert!((row.coeff(MomentIndex::new(1, 0)) - (2.0 + 2.0 * 0.3)).abs() < 1e-15);
    }

    #[test]
    fn small_linear_example() {
        let t = ti(1.0, 2.0, 2.0, 1.0, 1.0, 1.0, 2.0, 2.0);
        let mu = ti_stationary_moments(&t, 1).unwrap();
        assert!((mu.value(1, 0) - 0.4).abs() < 1e-14);
        assert!((mu.value(0, 1) - 0.6).abs() < 1e-14);
    }

    #[test]
    fn decoupled_mean() {
        let t = ti(0.7, 1.3, 0.5, 0.5, 0.0, 0.0, 2.0, 2.0);
        let mu = ti_stationary_moments(&t, 2).unwrap();
        assert!((mu.value(1, 0) - 0.35).abs() < 1e-14);
    }

    #[test]
    fn symmetric_second_moments() {
        let t = ti(0.7, 1.3, 0.7, 1.3, 2.0, 2.0, 2.0, 2.0);
        let mu = ti_stationary_moments(&t, 2).unwrap();
        assert!((mu.value(2, 0) - mu.value(0, 2)).abs() < 1e-14);
    }

    #[test]
    fn limit_symmetric_mean() {
        let l = limit_moments_large_c(0.5, 0.5, 0.5, 0.5, 1.0, 2.0, 2.0).unwrap();
        assert!((l.mean - 0.5).abs() < 1e-15);
        assert!(limit_moments_large_c(0.0, 0.0, 0.0, 0.0, 1.0, 2.0, 2.0).is_err());
    }
}
