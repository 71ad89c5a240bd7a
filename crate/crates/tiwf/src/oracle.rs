//! Brute-force reference for tiny chains: enumerate every offspring outcome,
//! build the full transition matrix and solve for its stationary vector.

use tiwf_core::linalg::{solve, DenseMatrix};
use tiwf_core::moments::{transfer_matrix, MomentIndex, TableTag};
use tiwf_core::{ChainParams, MomentTable, ModelKind};

fn choose(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn binom_pmf(n: u64, p: f64) -> Vec<f64> {
    (0..=n)
        .map(|k| choose(n, k) * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32))
        .collect()
}

fn hyper_pmf(total: u64, good: u64, draws: u64) -> Vec<f64> {
    let den = choose(total, draws);
    (0..=draws)
        .map(|k| {
            if k > good || draws - k > total - good {
                0.0
            } else {
                choose(good, k) * choose(total - good, draws - k) / den
            }
        })
        .collect()
}

/// Successor states of `(i, j)` with their probabilities (repeats allowed).
pub fn transitions(p: &ChainParams, i: u64, j: u64) -> Vec<((u64, u64), f64)> {
    let u = p.u(i as f64 / p.n as f64);
    let pa = binom_pmf(p.n - p.c, u);
    let pb = binom_pmf(p.c, u);
    let mut out = Vec::new();
    match p.kind {
        ModelKind::TwoIslandWF => {
            let v = p.v(j as f64 / p.m as f64);
            let pc = binom_pmf(p.c, v);
            let pd = binom_pmf(p.m - p.c, v);
            for (a, wa) in pa.iter().enumerate() {
                for (b, wb) in pb.iter().enumerate() {
                    for (c, wc) in pc.iter().enumerate() {
                        for (d, wd) in pd.iter().enumerate() {
                            out.push((((a + c) as u64, (b + d) as u64), wa * wb * wc * wd));
                        }
                    }
                }
            }
        }
        ModelKind::SeedBank => {
            let pc = hyper_pmf(p.m, j, p.c);
            for (a, wa) in pa.iter().enumerate() {
                for (b, wb) in pb.iter().enumerate() {
                    for (c, wc) in pc.iter().enumerate() {
                        if *wc > 0.0 {
                            out.push((((a + c) as u64, b as u64 + j - c as u64), wa * wb * wc));
                        }
                    }
                }
            }
        }
    }
    out
}

fn monomial(p: &ChainParams, i: u64, j: u64, idx: MomentIndex) -> f64 {
    (i as f64 / p.n as f64).powi(idx.n as i32) * (j as f64 / p.m as f64).powi(idx.m as i32)
}

fn states(p: &ChainParams) -> Vec<(u64, u64)> {
    (0..=p.n).flat_map(|i| (0..=p.m).map(move |j| (i, j))).collect()
}

/// Largest gap between each transfer row and the enumerated conditional
/// expectation, over every state and every monomial up to `degree`.
pub fn transfer_discrepancy(p: &ChainParams, degree: usize) -> tiwf_core::Result<f64> {
    let t = transfer_matrix::<f64>(p, degree)?;
    let mut worst = 0.0_f64;
    for (i, j) in states(p) {
        let trans = transitions(p, i, j);
        let (x, y) = (i as f64 / p.n as f64, j as f64 / p.m as f64);
        for row in MomentIndex::all(degree) {
            let brute: f64 = trans.iter().map(|((i2, j2), w)| w * monomial(p, *i2, *j2, row)).sum();
            worst = worst.max((brute - t.row_poly(row).eval(&x, &y)).abs());
        }
    }
    Ok(worst)
}

/// Moments of the stationary vector of the fully enumerated chain.
pub fn enumerated_moments(p: &ChainParams, degree: usize) -> tiwf_core::Result<MomentTable> {
    let p = p.validate()?;
    let sts = states(&p);
    let k = sts.len();
    let pos = |i: u64, j: u64| (i * (p.m + 1) + j) as usize;
    // Rows of pi (P - I) = 0, the last replaced by sum(pi) = 1.
    let mut a = DenseMatrix::<f64>::zeros(k);
    for &(i, j) in &sts {
        for ((i2, j2), w) in transitions(&p, i, j) {
            a[(pos(i2, j2), pos(i, j))] += w;
        }
    }
    for r in 0..k {
        a[(r, r)] -= 1.0;
        a[(k - 1, r)] = 1.0;
    }
    let mut rhs = vec![0.0; k];
    rhs[k - 1] = 1.0;
    let pi = solve(a, rhs).ok_or(tiwf_core::Error::SingularSystem { degree: 0 })?;
    let values = MomentIndex::all(degree)
        .map(|idx| sts.iter().map(|&(i, j)| pi[pos(i, j)] * monomial(&p, i, j, idx)).sum())
        .collect();
    Ok(MomentTable::from_values(degree, TableTag::ChainExact, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transition_mass_sums_to_one() {
        for p in [ChainParams::wf(3, 2, 1, 0.1, 0.2, 0.3, 0.1), ChainParams::seed_bank(4, 3, 2, 0.1, 0.2)] {
            for (i, j) in states(&p) {
                let s: f64 = transitions(&p, i, j).iter().map(|(_, w)| w).sum();
                assert!((s - 1.0).abs() < 1e-14);
            }
        }
    }
}
