//! The two finite-population chains.
//!
//! Both chains track `(i, j)`, the type-1 counts on island 1 (size `N`) and
//! island 2 (size `M`). Per generation, with `u = p1 + (1 - p1 - p2) X` and
//! `v = q1 + (1 - q1 - q2) Y`:
//!
//! * Wright-Fisher: `i' = A + C`, `j' = B + D` with `A ~ Bin(N - c, u)`,
//!   `B ~ Bin(c, u)`, `C ~ Bin(c, v)`, `D ~ Bin(M - c, v)`, all independent.
//! * Seed bank: `A`, `B` as above, `C ~ Hg(M, j, c)` and `D = j - C`. The bank
//!   neither reproduces nor mutates; `c` seeds germinate and `c` fresh seeds
//!   from the active island replace them.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Hypergeometric};

use crate::error::{Error, Result};
use crate::moments::{MomentIndex, MomentTable, TableTag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    TwoIslandWF,
    SeedBank,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::TwoIslandWF => "wf",
            ModelKind::SeedBank => "seedbank",
        }
    }
}

/// Chain parameters. For the seed bank `q1` and `q2` are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    pub n: u64,
    pub m: u64,
    pub c: u64,
    pub p1: f64,
    pub p2: f64,
    pub q1: f64,
    pub q2: f64,
    pub kind: ModelKind,
}

fn check_pair(name1: &'static str, x1: f64, name2: &'static str, x2: f64) -> Result<()> {
    let inside = |x: f64| x > 0.0 && x < 1.0;
    if !inside(x1) {
        return Err(Error::ProbRange { name: name1, value: x1 });
    }
    if !inside(x2) {
        return Err(Error::ProbRange { name: name2, value: x2 });
    }
    if x1 + x2 >= 1.0 {
        return Err(Error::ProbRange {
            name: if name1 == "p1" { "p1 + p2" } else { "q1 + q2" },
            value: x1 + x2,
        });
    }
    Ok(())
}

impl ChainParams {
    /// Unvalidated two-island Wright-Fisher parameters.
    pub fn wf(n: u64, m: u64, c: u64, p1: f64, p2: f64, q1: f64, q2: f64) -> Self {
        Self { n, m, c, p1, p2, q1, q2, kind: ModelKind::TwoIslandWF }
    }

    /// Unvalidated seed-bank parameters.
    pub fn seed_bank(n: u64, m: u64, c: u64, p1: f64, p2: f64) -> Self {
        Self { n, m, c, p1, p2, q1: 0.0, q2: 0.0, kind: ModelKind::SeedBank }
    }

    /// Returns `self` unchanged when every parameter constraint holds.
    pub fn validate(self) -> Result<Self> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::PopulationSize { n: self.n, m: self.m });
        }
        let max = self.n.min(self.m);
        if self.c < 1 || self.c > max {
            return Err(Error::CRange { c: self.c, max });
        }
        check_pair("p1", self.p1, "p2", self.p2)?;
        match self.kind {
            ModelKind::TwoIslandWF => check_pair("q1", self.q1, "q2", self.q2)?,
            ModelKind::SeedBank => {
                if self.q1 != 0.0 || self.q2 != 0.0 {
                    return Err(Error::KindMismatch);
                }
            }
        }
        Ok(self)
    }

    /// Island-1 offspring success probability `p1 + (1 - p1 - p2) x`.
    pub fn u(&self, x: f64) -> f64 {
        self.p1 + (1.0 - self.p1 - self.p2) * x
    }

    /// Island-2 offspring success probability `q1 + (1 - q1 - q2) y`.
    pub fn v(&self, y: f64) -> f64 {
        self.q1 + (1.0 - self.q1 - self.q2) * y
    }

    pub fn midpoint(&self) -> ChainState {
        ChainState { i: self.n / 2, j: self.m / 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChainState {
    pub i: u64,
    pub j: u64,
}

impl ChainState {
    pub fn x(&self, params: &ChainParams) -> f64 {
        self.i as f64 / params.n as f64
    }

    pub fn y(&self, params: &ChainParams) -> f64 {
        self.j as f64 / params.m as f64
    }
}

/// A `(seed, stream)` pair naming one reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

fn binomial<R: Rng + ?Sized>(rng: &mut R, n: u64, p: f64) -> u64 {
    if n == 0 {
        return 0;
    }
    Binomial::new(n, p).expect("probability in [0, 1]").sample(rng)
}

/// The four offspring components of one generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Offspring {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

pub fn sample_offspring<R: Rng + ?Sized>(
    state: ChainState,
    params: &ChainParams,
    rng: &mut R,
) -> Offspring {
    let u = params.u(state.x(params));
    let a = binomial(rng, params.n - params.c, u);
    let b = binomial(rng, params.c, u);
    match params.kind {
        ModelKind::TwoIslandWF => {
            let v = params.v(state.y(params));
            let c = binomial(rng, params.c, v);
            let d = binomial(rng, params.m - params.c, v);
            Offspring { a, b, c, d }
        }
        ModelKind::SeedBank => {
            let c = if params.c == params.m {
                state.j
            } else {
                Hypergeometric::new(params.m, state.j, params.c)
                    .expect("valid hypergeometric")
                    .sample(rng)
            };
            Offspring { a, b, c, d: state.j - c }
        }
    }
}

/// One generation of the chain.
pub fn step<R: Rng + ?Sized>(state: ChainState, params: &ChainParams, rng: &mut R) -> ChainState {
    let o = sample_offspring(state, params, rng);
    ChainState { i: o.a + o.c, j: o.b + o.d }
}

/// `(E[X' - X | X, Y], E[Y' - Y | X, Y])`.
pub fn conditional_drift(state: ChainState, params: &ChainParams) -> (f64, f64) {
    let x = state.x(params);
    let y = state.y(params);
    let (n, m, c) = (params.n as f64, params.m as f64, params.c as f64);
    let u = params.u(x);
    match params.kind {
        ModelKind::TwoIslandWF => {
            let v = params.v(y);
            (
                ((n - c) * u + c * v) / n - x,
                (c * u + (m - c) * v) / m - y,
            )
        }
        ModelKind::SeedBank => (((n - c) * u + c * y) / n - x, c / m * (u - y)),
    }
}

/// Iterator over thinned post-burn-in states from the midpoint.
#[derive(Debug, Clone)]
pub struct Trajectory {
    params: ChainParams,
    state: ChainState,
    rng: ChaCha8Rng,
    burn_in: u64,
    thin: u64,
    started: bool,
    steps: u64,
}

impl Trajectory {
    pub fn new(params: ChainParams, burn_in: u64, thin: u64, seed: RngSeed) -> Result<Self> {
        let params = params.validate()?;
        if burn_in == 0 || thin == 0 {
            return Err(Error::InvalidArgument("burn_in and thin must be at least 1"));
        }
        Ok(Self {
            state: params.midpoint(),
            params,
            rng: seed.rng(),
            burn_in,
            thin,
            started: false,
            steps: 0,
        })
    }

    /// Chain steps executed so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    fn advance(&mut self, k: u64) {
        for _ in 0..k {
            self.state = step(self.state, &self.params, &mut self.rng);
        }
        self.steps += k;
    }
}

impl Iterator for Trajectory {
    type Item = ChainState;

    fn next(&mut self) -> Option<ChainState> {
        if self.started {
            self.advance(self.thin);
        } else {
            self.advance(self.burn_in + self.thin);
            self.started = true;
        }
        Some(self.state)
    }
}

/// Running raw moments `E[X^n Y^m]` with batch-means standard errors.
#[derive(Debug, Clone)]
pub struct MomentAccumulator {
    max_degree: usize,
    batch_size: u64,
    count: u64,
    in_batch: u64,
    totals: Vec<f64>,
    batch: Vec<f64>,
    batch_means: Vec<Vec<f64>>,
}

impl MomentAccumulator {
    pub const DEFAULT_BATCHES: u64 = 32;

    pub fn new(max_degree: usize, expected_samples: u64) -> Self {
        let len = MomentIndex::count(max_degree);
        Self {
            max_degree,
            batch_size: (expected_samples / Self::DEFAULT_BATCHES).max(1),
            count: 0,
            in_batch: 0,
            totals: alloc::vec![0.0; len],
            batch: alloc::vec![0.0; len],
            batch_means: Vec::new(),
        }
    }

    pub fn push(&mut self, x: f64, y: f64) {
        for (k, idx) in MomentIndex::all(self.max_degree).enumerate() {
            let v = libm::pow(x, idx.n as f64) * libm::pow(y, idx.m as f64);
            self.totals[k] += v;
            self.batch[k] += v;
        }
        self.count += 1;
        self.in_batch += 1;
        if self.in_batch == self.batch_size {
            let size = self.batch_size as f64;
            self.batch_means.push(self.batch.iter().map(|s| s / size).collect());
            self.batch.iter_mut().for_each(|s| *s = 0.0);
            self.in_batch = 0;
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn means(&self) -> MomentTable<f64> {
        let n = self.count.max(1) as f64;
        MomentTable::from_values(
            self.max_degree,
            TableTag::ChainEmpirical,
            self.totals.iter().map(|s| s / n).collect(),
        )
    }

    /// Batch-means standard errors; zero with fewer than two full batches.
    pub fn standard_errors(&self) -> MomentTable<f64> {
        let b = self.batch_means.len();
        let values = (0..self.totals.len())
            .map(|k| {
                if b < 2 {
                    return 0.0;
                }
                let mean = self.batch_means.iter().map(|row| row[k]).sum::<f64>() / b as f64;
                let var = self
                    .batch_means
                    .iter()
                    .map(|row| (row[k] - mean) * (row[k] - mean))
                    .sum::<f64>()
                    / (b - 1) as f64;
                libm::sqrt(var / b as f64)
            })
            .collect();
        MomentTable::from_values(self.max_degree, TableTag::ChainEmpirical, values)
    }
}

/// Result of a long chain run.
#[derive(Debug, Clone)]
pub struct ChainRun {
    pub steps: u64,
    pub last: ChainState,
    pub moments: MomentAccumulator,
}

/// Runs `burn_in + n_samples * thin` steps from the midpoint and accumulates
/// raw moments up to `max_degree` over the `n_samples` retained states.
pub fn run_chain(
    params: ChainParams,
    burn_in: u64,
    n_samples: u64,
    thin: u64,
    seed: RngSeed,
    max_degree: usize,
) -> Result<ChainRun> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be at least 1"));
    }
    let mut path = Trajectory::new(params, burn_in, thin, seed)?;
    let mut acc = MomentAccumulator::new(max_degree, n_samples);
    let mut last = params.midpoint();
    for _ in 0..n_samples {
        last = path.next().expect("trajectory is infinite");
        acc.push(last.x(&params), last.y(&params));
    }
    Ok(ChainRun { steps: path.steps(), last, moments: acc })
}
