//! Beta reference laws.

use crate::chain::{ChainParams, ModelKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParams {
    pub a_one: f64,
    pub a_two: f64,
}

impl BetaParams {
    pub fn new(a_one: f64, a_two: f64) -> Result<Self> {
        if !(a_one > 0.0 && a_two > 0.0) || !(a_one.is_finite() && a_two.is_finite()) {
            return Err(Error::InvalidArgument("Beta parameters must be positive and finite"));
        }
        Ok(Self { a_one, a_two })
    }

    /// Log-density, for quadrature checks.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        let (a, b) = (self.a_one, self.a_two);
        libm::lgamma(a + b) - libm::lgamma(a) - libm::lgamma(b)
            + (a - 1.0) * libm::log(x)
            + (b - 1.0) * libm::log1p(-x)
    }
}

/// `E Z^k = prod_{i<k} (a1 + i) / (a1 + a2 + i)`.
pub fn beta_moment(params: &BetaParams, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| {
        let i = i as f64;
        acc * (params.a_one + i) / (params.a_one + params.a_two + i)
    })
}

/// The Beta law matched to a chain.
pub fn beta_params_from_chain(params: &ChainParams) -> Result<BetaParams> {
    let p = params.validate()?;
    let (n, m) = (p.n as f64, p.m as f64);
    match p.kind {
        ModelKind::TwoIslandWF => BetaParams::new(2.0 * (n * p.p1 + m * p.q1), 2.0 * (n * p.p2 + m * p.q2)),
        ModelKind::SeedBank => BetaParams::new(2.0 * (n + m) * p.p1, 2.0 * (n + m) * p.p2),
    }
}

/// `E h(Z)` for `h(z) = sum_k coeffs[k] z^k`.
pub fn beta_poly_expectation(params: &BetaParams, coeffs: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut moment = 1.0;
    for (k, c) in coeffs.iter().enumerate() {
        if k > 0 {
            let i = (k - 1) as f64;
            moment *= (params.a_one + i) / (params.a_one + params.a_two + i);
        }
        total += c * moment;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_moments() {
        let u = BetaParams::new(1.0, 1.0).unwrap();
        assert_eq!(beta_moment(&u, 0), 1.0);
        assert_eq!(beta_moment(&u, 1), 0.5);
        assert!((beta_moment(&u, 2) - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(beta_moment(&BetaParams::new(2.0, 2.0).unwrap(), 1), 0.5);
        assert!((beta_poly_expectation(&u, &[0.0, 1.0, -1.0]) - 1.0 / 6.0).abs() < 1e-16);
        assert_eq!(beta_poly_expectation(&u, &[1.0]), 1.0);
    }

    #[test]
    fn chain_maps() {
        let p = ChainParams::wf(100, 50, 1, 0.01, 0.02, 0.03, 0.01);
        let b = beta_params_from_chain(&p).unwrap();
        assert!((b.a_one - 5.0).abs() < 1e-12 && (b.a_two - 5.0).abs() < 1e-12);
        let p = ChainParams::seed_bank(50, 50, 1, 0.005, 0.005);
        let b = beta_params_from_chain(&p).unwrap();
        assert!((b.a_one - 1.0).abs() < 1e-12 && (b.a_two - 1.0).abs() < 1e-12);
        let p = ChainParams::wf(30, 20, 1, 0.02, 0.02, 0.05, 0.05);
        let b = beta_params_from_chain(&p).unwrap();
        assert_eq!(b.a_one, b.a_two);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(BetaParams::new(0.0, 1.0).is_err());
    }
}
