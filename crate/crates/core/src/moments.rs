//! Exact stationary moments of the finite chains.
//!
//! `E[X'^n Y'^m | X, Y]` is a polynomial of total degree at most `n + m` in
//! `(X, Y)`. Writing powers as sums of falling factorials (Stirling numbers of
//! the second kind) and splitting `(A + C)^(k)` with the Vandermonde identity
//! reduces everything to joint factorial moments of the offspring components,
//! which are closed-form polynomials. Collecting coefficients gives the
//! moment-transfer matrix, lower block-triangular in total degree, so the
//! stationary moments are found one degree at a time.

use alloc::vec::Vec;

use crate::chain::{ChainParams, ModelKind};
use crate::error::{Error, Result};
use crate::linalg::{solve, DenseMatrix};
use crate::poly::BiPoly;
use crate::regime::ScalingRegime;
use crate::scalar::Scalar;

/// Largest total degree any moment routine accepts.
pub const MAX_DEGREE: usize = 24;

/// Exponent pair of the monomial `x^n y^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MomentIndex {
    pub n: usize,
    pub m: usize,
}

impl MomentIndex {
    pub const fn new(n: usize, m: usize) -> Self {
        Self { n, m }
    }

    pub const fn degree(self) -> usize {
        self.n + self.m
    }

    /// Position in degree-graded order: `(0,0), (1,0), (0,1), (2,0), (1,1), ...`.
    pub const fn position(self) -> usize {
        let d = self.degree();
        d * (d + 1) / 2 + self.m
    }

    /// Number of monomials of total degree at most `max_degree`.
    pub const fn count(max_degree: usize) -> usize {
        (max_degree + 1) * (max_degree + 2) / 2
    }

    /// The `d + 1` monomials of total degree exactly `d`.
    pub fn block(d: usize) -> impl Iterator<Item = MomentIndex> {
        (0..=d).map(move |m| MomentIndex::new(d - m, m))
    }

    pub fn all(max_degree: usize) -> impl Iterator<Item = MomentIndex> {
        (0..=max_degree).flat_map(MomentIndex::block)
    }
}

impl From<(usize, usize)> for MomentIndex {
    fn from((n, m): (usize, usize)) -> Self {
        Self::new(n, m)
    }
}

/// Which law a table of moments describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TableTag {
    ChainExact,
    ChainEmpirical,
    TI,
    Beta,
}

impl TableTag {
    pub fn name(self) -> &'static str {
        match self {
            TableTag::ChainExact => "chain-exact",
            TableTag::ChainEmpirical => "chain-empirical",
            TableTag::TI => "ti",
            TableTag::Beta => "beta",
        }
    }
}

/// `E[X^n Y^m]` for every `n + m <= max_degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable<T = f64> {
    max_degree: usize,
    tag: TableTag,
    values: Vec<T>,
}

impl<T: Scalar> MomentTable<T> {
    pub fn from_values(max_degree: usize, tag: TableTag, values: Vec<T>) -> Self {
        assert_eq!(values.len(), MomentIndex::count(max_degree));
        Self { max_degree, tag, values }
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn tag(&self) -> TableTag {
        self.tag
    }

    pub fn get(&self, n: usize, m: usize) -> Option<&T> {
        if n + m > self.max_degree {
            return None;
        }
        self.values.get(MomentIndex::new(n, m).position())
    }

    /// Panics when `n + m` exceeds the table degree.
    pub fn value(&self, n: usize, m: usize) -> T {
        self.get(n, m).expect("moment index within table degree").clone()
    }

    pub fn iter(&self) -> impl Iterator<Item = (MomentIndex, &T)> {
        MomentIndex::all(self.max_degree).zip(self.values.iter())
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn to_f64(&self) -> MomentTable<f64> {
        MomentTable {
            max_degree: self.max_degree,
            tag: self.tag,
            values: self.values.iter().map(Scalar::to_f64).collect(),
        }
    }

    /// `E(X - Y)^2`; needs degree at least 2.
    pub fn exy2(&self) -> T {
        self.value(2, 0) - self.value(1, 1) - self.value(1, 1) + self.value(0, 2)
    }

    /// Expectation of a polynomial in `(X, Y)`; `None` if its degree is too high.
    pub fn expect(&self, h: &BiPoly<T>) -> Option<T> {
        let mut total = T::zero();
        for ((i, j), coeff) in h.terms() {
            total = total + coeff * self.get(i, j)?.clone();
        }
        Some(total)
    }

    /// Swaps the roles of the two islands.
    pub fn transposed(&self) -> Self {
        let values = MomentIndex::all(self.max_degree)
            .map(|idx| self.value(idx.m, idx.n))
            .collect();
        Self { max_degree: self.max_degree, tag: self.tag, values }
    }
}

/// `n (n - 1) ... (n - k + 1)`.
pub fn falling<T: Scalar>(n: u64, k: usize) -> T {
    let mut acc = T::one();
    for i in 0..k as u64 {
        if i >= n {
            return T::zero();
        }
        acc = acc * T::from_u64(n - i);
    }
    acc
}

/// Stirling numbers of the second kind `S(n, k)` for `n, k <= max`.
pub fn stirling2(max: usize) -> Vec<Vec<u64>> {
    let mut s = alloc::vec![alloc::vec![0u64; max + 1]; max + 1];
    s[0][0] = 1;
    for n in 1..=max {
        for k in 1..=n {
            s[n][k] = (k as u64) * s[n - 1][k] + s[n - 1][k - 1];
        }
    }
    s
}

pub fn binomial_coeff(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// A pair of offspring counts whose joint factorial moments are polynomial
/// in `(X, Y)`.
#[derive(Debug, Clone, PartialEq)]
pub enum OffspringLaw<T> {
    /// `W1 ~ Bin(trials, p(X, Y))` with `W2 = trials - W1`.
    Binomial { trials: u64, p: BiPoly<T> },
    /// The `MY` type-1 seeds split between `drawn` migrants (`W1`) and the
    /// `total - drawn` that stay (`W2`), drawn without replacement.
    HypergeometricPair { total: u64, drawn: u64 },
}

/// `E[W1^(j) W2^(k) | X, Y]` as a polynomial.
pub fn joint_factorial_moment<T: Scalar>(
    law: &OffspringLaw<T>,
    j: usize,
    k: usize,
) -> Result<BiPoly<T>> {
    if j + k > MAX_DEGREE {
        return Err(Error::DegreeOverflow { requested: j + k, max: MAX_DEGREE });
    }
    match law {
        OffspringLaw::Binomial { trials, p } => {
            let q = &BiPoly::constant(T::one()) + &p.scale(&-T::one());
            let lead = falling::<T>(*trials, j + k);
            Ok((&p.pow(j as u32) * &q.pow(k as u32)).scale(&lead))
        }
        OffspringLaw::HypergeometricPair { total, drawn } => {
            let lead = falling::<T>(*drawn, j) * falling::<T>(*total - *drawn, k);
            if lead.is_zero() {
                return Ok(BiPoly::zero());
            }
            // (M Y)^(r) / M^(r) = prod_i (M Y - i) / (M - i)
            let mut acc = BiPoly::constant(lead);
            for i in 0..(j + k) as u64 {
                let den = T::from_u64(*total - i);
                let factor = BiPoly::affine(
                    -T::from_u64(i) / den.clone(),
                    T::zero(),
                    T::from_u64(*total) / den,
                );
                acc = &acc * &factor;
            }
            Ok(acc)
        }
    }
}

fn affine_u<T: Scalar>(params: &ChainParams) -> BiPoly<T> {
    let p1 = T::from_f64(params.p1);
    let p2 = T::from_f64(params.p2);
    BiPoly::affine(p1.clone(), T::one() - p1 - p2, T::zero())
}

fn affine_v<T: Scalar>(params: &ChainParams) -> BiPoly<T> {
    let q1 = T::from_f64(params.q1);
    let q2 = T::from_f64(params.q2);
    BiPoly::affine(q1.clone(), T::zero(), T::one() - q1 - q2)
}

/// `E[(A + C)^(k) (B + D)^(l) | X, Y]` for all `k + l <= max_degree`,
/// indexed `[k][l]`.
fn factorial_table<T: Scalar>(params: &ChainParams, max_degree: usize) -> Result<Vec<Vec<BiPoly<T>>>> {
    let u = affine_u::<T>(params);
    let a_law = OffspringLaw::Binomial { trials: params.n - params.c, p: u.clone() };
    let b_law = OffspringLaw::Binomial { trials: params.c, p: u };

    let mut fa = Vec::with_capacity(max_degree + 1);
    let mut fb = Vec::with_capacity(max_degree + 1);
    for r in 0..=max_degree {
        fa.push(joint_factorial_moment(&a_law, r, 0)?);
        fb.push(joint_factorial_moment(&b_law, r, 0)?);
    }

    // fcd[r][s] = E[C^(r) D^(s)]
    let mut fcd: Vec<Vec<BiPoly<T>>> = Vec::with_capacity(max_degree + 1);
    match params.kind {
        ModelKind::TwoIslandWF => {
            let v = affine_v::<T>(params);
            let c_law = OffspringLaw::Binomial { trials: params.c, p: v.clone() };
            let d_law = OffspringLaw::Binomial { trials: params.m - params.c, p: v };
            let mut fc = Vec::new();
            let mut fd = Vec::new();
            for r in 0..=max_degree {
                fc.push(joint_factorial_moment(&c_law, r, 0)?);
                fd.push(joint_factorial_moment(&d_law, r, 0)?);
            }
            for r in 0..=max_degree {
                fcd.push((0..=max_degree - r).map(|s| &fc[r] * &fd[s]).collect());
            }
        }
        ModelKind::SeedBank => {
            let law = OffspringLaw::HypergeometricPair { total: params.m, drawn: params.c };
            for r in 0..=max_degree {
                let row = (0..=max_degree - r)
                    .map(|s| joint_factorial_moment::<T>(&law, r, s))
                    .collect::<Result<Vec<_>>>()?;
                fcd.push(row);
            }
        }
    }

    let mut table = Vec::with_capacity(max_degree + 1);
    for k in 0..=max_degree {
        let mut row = Vec::with_capacity(max_degree + 1 - k);
        for l in 0..=max_degree - k {
            let mut acc = BiPoly::zero();
            for r in 0..=k {
                for s in 0..=l {
                    let weight = T::from_u64(binomial_coeff(k, r) * binomial_coeff(l, s));
                    let ab = &fa[r] * &fb[s];
                    let term = &ab * &fcd[k - r][l - s];
                    acc = &acc + &term.scale(&weight);
                }
            }
            row.push(acc);
        }
        table.push(row);
    }
    Ok(table)
}

/// The polynomials `E[X'^n Y'^m | X, Y]` for every `n + m <= max_degree`, in
/// [`MomentIndex::position`] order.
pub fn conditional_moment_polys<T: Scalar>(
    params: &ChainParams,
    max_degree: usize,
) -> Result<Vec<BiPoly<T>>> {
    if max_degree > MAX_DEGREE {
        return Err(Error::DegreeOverflow { requested: max_degree, max: MAX_DEGREE });
    }
    let params = params.validate()?;
    let g = factorial_table::<T>(&params, max_degree)?;
    let s = stirling2(max_degree);
    let n_pop = T::from_u64(params.n);
    let m_pop = T::from_u64(params.m);

    let mut out = Vec::with_capacity(MomentIndex::count(max_degree));
    for idx in MomentIndex::all(max_degree) {
        let mut acc = BiPoly::zero();
        for k in 0..=idx.n {
            for l in 0..=idx.m {
                let w = s[idx.n][k] * s[idx.m][l];
                if w != 0 {
                    acc = &acc + &g[k][l].scale(&T::from_u64(w));
                }
            }
        }
        let mut norm = T::one();
        for _ in 0..idx.n {
            norm = norm * n_pop.clone();
        }
        for _ in 0..idx.m {
            norm = norm * m_pop.clone();
        }
        out.push(acc.scale(&(T::one() / norm)));
    }
    Ok(out)
}

/// Linear map from the moment vector at time `t` to the one at `t + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTransfer<T = f64> {
    max_degree: usize,
    matrix: DenseMatrix<T>,
}

impl<T: Scalar> MomentTransfer<T> {
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.matrix
    }

    /// Coefficient of `X^col.n Y^col.m` in `E[X'^row.n Y'^row.m | X, Y]`.
    pub fn coeff(&self, row: MomentIndex, col: MomentIndex) -> T {
        self.matrix[(row.position(), col.position())].clone()
    }

    /// The row as a polynomial in `(X, Y)`.
    pub fn row_poly(&self, row: MomentIndex) -> BiPoly<T> {
        let mut acc = BiPoly::zero();
        for col in MomentIndex::all(self.max_degree) {
            let c = self.coeff(row, col);
            if c.is_zero() {
                continue;
            }
            let mono = &BiPoly::affine(T::zero(), T::one(), T::zero()).pow(col.n as u32)
                * &BiPoly::affine(T::zero(), T::zero(), T::one()).pow(col.m as u32);
            acc = &acc + &mono.scale(&c);
        }
        acc
    }

    pub fn apply(&self, mu: &MomentTable<T>) -> Vec<T> {
        self.matrix.mul_vec(mu.values())
    }
}

pub fn transfer_matrix<T: Scalar>(params: &ChainParams, max_degree: usize) -> Result<MomentTransfer<T>> {
    let polys = conditional_moment_polys::<T>(params, max_degree)?;
    let len = MomentIndex::count(max_degree);
    let mut matrix = DenseMatrix::zeros(len);
    for (row, poly) in polys.iter().enumerate() {
        for ((i, j), c) in poly.terms() {
            debug_assert!(i + j <= max_degree);
            matrix[(row, MomentIndex::new(i, j).position())] = c;
        }
    }
    Ok(MomentTransfer { max_degree, matrix })
}

/// Solves `mu = T mu`, `mu(0,0) = 1`, one degree block at a time.
pub fn solve_stationary<T: Scalar>(transfer: &MomentTransfer<T>, tag: TableTag) -> Result<MomentTable<T>> {
    let max_degree = transfer.max_degree;
    let mut mu = alloc::vec![T::zero(); MomentIndex::count(max_degree)];
    mu[0] = T::one();
    for d in 1..=max_degree {
        let rows: Vec<MomentIndex> = MomentIndex::block(d).collect();
        let mut a = DenseMatrix::zeros(d + 1);
        let mut rhs = Vec::with_capacity(d + 1);
        for (r, &row) in rows.iter().enumerate() {
            for (k, &col) in rows.iter().enumerate() {
                let t = transfer.coeff(row, col);
                a[(r, k)] = if r == k { T::one() - t } else { -t };
            }
            let mut b = T::zero();
            for lower in MomentIndex::all(d - 1) {
                b = b + transfer.coeff(row, lower) * mu[lower.position()].clone();
            }
            rhs.push(b);
        }
        let x = solve(a, rhs).ok_or(Error::SingularSystem { degree: d })?;
        for (idx, v) in rows.iter().zip(x) {
            mu[idx.position()] = v;
        }
    }
    Ok(MomentTable::from_values(max_degree, tag, mu))
}

/// Exact stationary moments of the chain up to total degree `max_degree`.
pub fn exact_stationary_moments<T: Scalar>(params: &ChainParams, max_degree: usize) -> Result<MomentTable<T>> {
    let transfer = transfer_matrix::<T>(params, max_degree)?;
    solve_stationary(&transfer, TableTag::ChainExact)
}

/// Leading coefficient `K` in `E(X - Y)^2 = K N^(-eps) + o(N^(-eps))`.
pub fn leading_order_exy2(regime: &ScalingRegime, kind: ModelKind) -> f64 {
    let r = regime;
    match kind {
        ModelKind::TwoIslandWF => {
            let p = r.p_hat1 + r.m * r.q_hat1;
            let q = r.p_hat2 + r.m * r.q_hat2;
            p * q / (r.c_hat * (p + q) * (1.0 + 2.0 * p + 2.0 * q))
        }
        ModelKind::SeedBank => {
            let s = r.p_hat1 + r.p_hat2;
            r.m * r.p_hat1 * r.p_hat2 / (r.c_hat * s * (1.0 + 2.0 * (r.m + 1.0) * s))
        }
    }
}

/// `E(W - np)^2` for `W ~ Bin(n, p)`.
pub fn binom2(n: f64, p: f64) -> f64 {
    n * p * (1.0 - p)
}

/// `E(W - np)^4` for `W ~ Bin(n, p)`.
pub fn binom4(n: f64, p: f64) -> f64 {
    let v = n * p * (1.0 - p);
    3.0 * v * v + v * (1.0 - 6.0 * p * (1.0 - p))
}

/// `E(W - nD/N)^2` for `W ~ Hg(N, D, n)` (population `N`, `D` successes, `n` draws).
pub fn hgmom2(total: f64, successes: f64, draws: f64) -> f64 {
    let (big, d, n) = (total, successes, draws);
    n * d * (big - d) * (big - n) / (big * big * (big - 1.0))
}

/// `E(W - nD/N)^4` for `W ~ Hg(N, D, n)`; needs `N >= 4`.
pub fn hgmom4(total: f64, successes: f64, draws: f64) -> f64 {
    let (big, d, n) = (total, successes, draws);
    let lead = n * d * (big - d) * (big - n)
        / (big * big * big * big * (big - 1.0) * (big - 2.0) * (big - 3.0));
    let bracket = big * big * (6.0 * n * n + big - 6.0 * n * big + big * big)
        + 3.0 * d * (d - big) * (2.0 * big * big + (n * n - n * big) * (6.0 + big));
    lead * bracket
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn positions_are_dense() {
        for (k, idx) in MomentIndex::all(6).enumerate() {
            assert_eq!(idx.position(), k);
        }
        assert_eq!(MomentIndex::count(6), MomentIndex::all(6).count());
    }

    #[test]
    fn stirling_small() {
        let s = stirling2(5);
        assert_eq!(s[4], alloc::vec![0, 1, 7, 6, 1, 0]);
        assert_eq!(s[5][2], 15);
    }

    #[test]
    fn binomial_mean() {
        let law = OffspringLaw::Binomial { trials: 7, p: BiPoly::constant(0.3) };
        let m = joint_factorial_moment(&law, 1, 0).unwrap();
        assert!(close(m.coeff(0, 0), 2.1, 1e-15));
    }

    #[test]
    fn hypergeometric_mean() {
        let law = OffspringLaw::<f64>::HypergeometricPair { total: 4, drawn: 2 };
        let m = joint_factorial_moment(&law, 1, 0).unwrap();
        assert!(close(m.eval(&0.0, &0.5), 1.0, 1e-15));
    }

    #[test]
    fn hypergeometric_variance_formula() {
        assert!(close(hgmom2(10.0, 5.0, 4.0), 2.0 / 3.0, 1e-15));
    }

    #[test]
    fn degree_overflow() {
        let law = OffspringLaw::<f64>::HypergeometricPair { total: 4, drawn: 2 };
        assert!(matches!(
            joint_factorial_moment(&law, MAX_DEGREE, 1),
            Err(Error::DegreeOverflow { .. })
        ));
    }

    #[test]
    fn unit_row() {
        let p = ChainParams::wf(5, 4, 2, 0.1, 0.2, 0.3, 0.1);
        let t = transfer_matrix::<f64>(&p, 3).unwrap();
        let first = t.matrix().row(0);
        assert_eq!(first[0], 1.0);
        assert!(first[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn symmetric_wf_mean_is_half() {
        let p = ChainParams::wf(6, 6, 2, 0.05, 0.05, 0.05, 0.05);
        let mu = exact_stationary_moments::<f64>(&p, 2).unwrap();
        assert!(close(mu.value(1, 0), 0.5, 1e-14));
        assert!(close(mu.value(0, 1), 0.5, 1e-14));
    }

    #[test]
    fn printed_leading_orders() {
        let r = ScalingRegime {
            m: 1.0,
            p_hat1: 1.0,
            p_hat2: 1.0,
            q_hat1: 1.0,
            q_hat2: 1.0,
            c_hat: 1.0,
            eps: 0.5,
            kind: ModelKind::TwoIslandWF,
        };
        assert!(close(leading_order_exy2(&r, ModelKind::TwoIslandWF), 1.0 / 9.0, 1e-15));
        assert!(close(leading_order_exy2(&r, ModelKind::SeedBank), 1.0 / 18.0, 1e-15));
        let r0 = ScalingRegime { p_hat1: 1e-12, q_hat1: 0.0, ..r };
        assert!(leading_order_exy2(&r0, ModelKind::TwoIslandWF) < 1e-11);
    }
}
