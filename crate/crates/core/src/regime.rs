//! Parameter families indexed by `N`: `M = mN`, `p_i = p̂_i / N`,
//! `q_i = q̂_i / N`, `c = ĉ N^eps`.

use crate::chain::{ChainParams, ModelKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRegime {
    pub m: f64,
    pub p_hat1: f64,
    pub p_hat2: f64,
    pub q_hat1: f64,
    pub q_hat2: f64,
    pub c_hat: f64,
    pub eps: f64,
    pub kind: ModelKind,
}

impl ScalingRegime {
    /// All hats equal to one, `m = 1`.
    pub fn symmetric(kind: ModelKind, c_hat: f64, eps: f64) -> Self {
        let q = if kind == ModelKind::SeedBank { 0.0 } else { 1.0 };
        Self { m: 1.0, p_hat1: 1.0, p_hat2: 1.0, q_hat1: q, q_hat2: q, c_hat, eps, kind }
    }

    /// Chain parameters at population size `n`. `c` is rounded and clamped to
    /// `[1, min(M, N)]`; the realized value is in the returned params.
    pub fn instantiate(&self, n: u64) -> Result<ChainParams> {
        if !(self.m > 0.0) || !(self.c_hat > 0.0) {
            return Err(Error::InvalidArgument("m and c_hat must be positive"));
        }
        if !(0.0..=1.0).contains(&self.eps) {
            return Err(Error::InvalidArgument("eps must lie in [0, 1]"));
        }
        let nf = n as f64;
        let m = libm::round(self.m * nf).max(1.0) as u64;
        let c_raw = libm::round(self.c_hat * libm::pow(nf, self.eps)) as u64;
        let c = c_raw.clamp(1, n.min(m).max(1));
        let params = match self.kind {
            ModelKind::TwoIslandWF => ChainParams::wf(
                n,
                m,
                c,
                self.p_hat1 / nf,
                self.p_hat2 / nf,
                self.q_hat1 / nf,
                self.q_hat2 / nf,
            ),
            ModelKind::SeedBank => ChainParams::seed_bank(n, m, c, self.p_hat1 / nf, self.p_hat2 / nf),
        };
        params.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instantiation_rounds_and_clamps() {
        let r = ScalingRegime::symmetric(ModelKind::TwoIslandWF, 0.5, 0.5);
        let p = r.instantiate(10_000).unwrap();
        assert_eq!((p.n, p.m, p.c), (10_000, 10_000, 50));
        assert!((p.p1 - 1e-4).abs() < 1e-18);

        let r = ScalingRegime::symmetric(ModelKind::SeedBank, 2.0, 1.0);
        let p = r.instantiate(100).unwrap();
        assert_eq!(p.c, 100);
        assert_eq!(p.q1, 0.0);

        let r = ScalingRegime::symmetric(ModelKind::TwoIslandWF, 0.1, 0.0);
        assert_eq!(r.instantiate(100).unwrap().c, 1);
    }
}
