//! Exact distances between chain moments and the reference laws.

use crate::beta::{beta_moment, BetaParams};
use crate::chain::ChainParams;
use crate::moments::{binomial_coeff, MomentTable};

/// `|E X^n Y^m (chain) - E X^n Y^m (diffusion)|`.
pub fn ti_monomial_distance(chain: &MomentTable, ti: &MomentTable, n: usize, m: usize) -> f64 {
    (chain.value(n, m) - ti.value(n, m)).abs()
}

/// Island-1 weight `N / (N + M)` of the population-weighted average.
pub fn island_weight(params: &ChainParams) -> f64 {
    params.n as f64 / (params.n + params.m) as f64
}

/// `E W^k` for `W = w X + (1 - w) Y`.
pub fn weighted_average_moment(chain: &MomentTable, w: f64, k: usize) -> f64 {
    (0..=k)
        .map(|j| {
            binomial_coeff(k, j) as f64
                * libm::pow(w, j as f64)
                * libm::pow(1.0 - w, (k - j) as f64)
                * chain.value(j, k - j)
        })
        .sum()
}

/// `|E W^k - E Z^k|` with `W` the population-weighted average.
pub fn beta_monomial_distance(params: &ChainParams, chain: &MomentTable, beta: &BetaParams, k: usize) -> f64 {
    (weighted_average_moment(chain, island_weight(params), k) - beta_moment(beta, k as u32)).abs()
}
