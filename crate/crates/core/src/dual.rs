//! Moment dual of the diffusion and the two-urn occupancy process.
//!
//! The dual runs on exponent pairs `(n, m)`. From `x^n y^m` it jumps to
//!
//! | target | rate |
//! |--------|------|
//! | `(n-1, m)` | `alpha n(n-1)/2 + n a1` |
//! | `(n-1, m+1)` | `n c1` |
//! | `(n, m-1)` | `beta m(m-1)/2 + m b1` |
//! | `(n+1, m-1)` | `m c2` |
//! | killed | `n a2 + m b2` |
//!
//! and the probability of reaching `(0, 0)` before being killed is the
//! stationary moment `E[X^n Y^m]`.
//!
//! Dropping the coalescence and replacing both mutation rates by a single
//! death rate gives the urn process: balls die at rate `a` in urn 1 and `b` in
//! urn 2 and move between urns at rates `c1` and `c2`. Balls are independent,
//! so everything reduces to the one-ball occupancy probabilities.

use rand::Rng;

use crate::error::{Error, Result};
use crate::quad;
use crate::ti::TIParams;

/// Position of the dual process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DualState {
    pub n: u64,
    pub m: u64,
    pub killed: bool,
}

impl DualState {
    pub fn new(n: u64, m: u64) -> Self {
        Self { n, m, killed: false }
    }

    pub fn is_absorbed(&self) -> bool {
        self.killed || (self.n == 0 && self.m == 0)
    }

    /// `x^n y^m`, or zero once killed.
    pub fn value(&self, x: f64, y: f64) -> f64 {
        if self.killed {
            0.0
        } else {
            libm::pow(x, self.n as f64) * libm::pow(y, self.m as f64)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct DualRates {
    down_x: f64,
    across_x: f64,
    down_y: f64,
    across_y: f64,
    kill: f64,
}

fn dual_rates(s: DualState, ti: &TIParams) -> DualRates {
    let n = s.n as f64;
    let m = s.m as f64;
    DualRates {
        down_x: 0.5 * ti.alpha * n * (n - 1.0).max(0.0) + n * ti.a1,
        across_x: n * ti.c1,
        down_y: 0.5 * ti.beta * m * (m - 1.0).max(0.0) + m * ti.b1,
        across_y: m * ti.c2,
        kill: n * ti.a2 + m * ti.b2,
    }
}

/// One jump of the embedded chain. `None` if no jump is possible.
pub fn dual_jump<R: Rng + ?Sized>(s: DualState, ti: &TIParams, rng: &mut R) -> Option<DualState> {
    if s.is_absorbed() {
        return Some(s);
    }
    let r = dual_rates(s, ti);
    let total = r.down_x + r.across_x + r.down_y + r.across_y + r.kill;
    if !(total > 0.0) {
        return None;
    }
    let mut u = rng.random::<f64>() * total;
    let next = if u < r.down_x {
        DualState::new(s.n - 1, s.m)
    } else {
        u -= r.down_x;
        if u < r.across_x {
            DualState::new(s.n - 1, s.m + 1)
        } else {
            u -= r.across_x;
            if u < r.down_y {
                DualState::new(s.n, s.m - 1)
            } else {
                u -= r.down_y;
                if u < r.across_y {
                    DualState::new(s.n + 1, s.m - 1)
                } else {
                    DualState { killed: true, ..s }
                }
            }
        }
    };
    Some(next)
}

/// Runs one dual path to absorption and returns the terminal state.
pub fn dual_path<R: Rng + ?Sized>(start: DualState, ti: &TIParams, max_jumps: u64, rng: &mut R) -> Result<DualState> {
    let mut s = start;
    for _ in 0..max_jumps {
        if s.is_absorbed() {
            return Ok(s);
        }
        s = dual_jump(s, ti, rng).ok_or(Error::NonAbsorbing(max_jumps))?;
    }
    if s.is_absorbed() {
        Ok(s)
    } else {
        Err(Error::NonAbsorbing(max_jumps))
    }
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub reps: u64,
}

impl Estimate {
    /// Estimate of a Bernoulli mean from a success count.
    pub fn from_hits(hits: u64, reps: u64) -> Self {
        let p = hits as f64 / reps as f64;
        let se = if reps > 1 {
            libm::sqrt(p * (1.0 - p) / (reps - 1) as f64)
        } else {
            0.0
        };
        Self { mean: p, se, reps }
    }

    pub fn z_score(&self, reference: f64) -> f64 {
        if self.se > 0.0 {
            (self.mean - reference) / self.se
        } else if self.mean == reference {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

pub const DEFAULT_MAX_JUMPS: u64 = 1_000_000;

/// Fraction of dual paths from `(n, m)` absorbed at `(0, 0)`.
pub fn simulate_dual_absorption<R: Rng + ?Sized>(
    n: u64,
    m: u64,
    ti: &TIParams,
    reps: u64,
    rng: &mut R,
) -> Result<Estimate> {
    if reps == 0 {
        return Err(Error::InvalidArgument("reps must be at least 1"));
    }
    let mut hits = 0u64;
    for _ in 0..reps {
        let end = dual_path(DualState::new(n, m), ti, DEFAULT_MAX_JUMPS, rng)?;
        if !end.killed {
            hits += 1;
        }
    }
    Ok(Estimate::from_hits(hits, reps))
}

/// Urn death and migration rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UrnRates {
    pub a: f64,
    pub b: f64,
    pub c1: f64,
    pub c2: f64,
}

impl UrnRates {
    pub fn new(a: f64, b: f64, c1: f64, c2: f64) -> Self {
        Self { a, b, c1, c2 }
    }

    /// Urn rates of the diffusion: `a = a1 + a2`, `b = b1 + b2`.
    pub fn from_ti(ti: &TIParams) -> Self {
        Self { a: ti.a(), b: ti.b(), c1: ti.c1, c2: ti.c2 }
    }

    pub fn swapped(&self) -> Self {
        Self { a: self.b, b: self.a, c1: self.c2, c2: self.c1 }
    }

    /// `ab + a c2 + b c1`.
    pub fn delta(&self) -> f64 {
        self.a * self.b + self.a * self.c2 + self.b * self.c1
    }

    /// `a + b + c1 + c2`.
    pub fn total(&self) -> f64 {
        self.a + self.b + self.c1 + self.c2
    }

    /// Eigenvalues `l1 >= l2` of the one-ball generator (both `<= 0`).
    pub fn eigenvalues(&self) -> (f64, f64) {
        let d1 = self.a + self.c1;
        let d2 = self.b + self.c2;
        let half_trace = -0.5 * (d1 + d2);
        let half_disc = 0.5 * libm::sqrt((d1 - d2) * (d1 - d2) + 4.0 * self.c1 * self.c2);
        // l2 is the sum of two negative terms, computed directly; l1 from the
        // determinant to avoid cancellation.
        let l2 = half_trace - half_disc;
        let det = d1 * d2 - self.c1 * self.c2;
        let l1 = if l2 != 0.0 { det / l2 } else { 0.0 };
        (l1, l2)
    }
}

/// One-ball occupancy probabilities at time `t`: `(p11, p12, p21, p22)`, where
/// `pij` is the chance a ball starting in urn `i` is alive in urn `j`.
pub fn occupancy_probabilities(t: f64, rates: &UrnRates) -> (f64, f64, f64, f64) {
    let (l1, l2) = rates.eigenvalues();
    let delta = l1 - l2;
    // exp(Qt) = e^{l1 t} [I + (Q - l1 I) phi],  phi = (1 - e^{-delta t}) / delta
    let phi = if delta.abs() < 1e-9 * (l1.abs() + l2.abs()) || delta == 0.0 {
        let z = delta * t;
        t * (1.0 - z / 2.0 + z * z / 6.0)
    } else {
        -libm::expm1(-delta * t) / delta
    };
    let e = libm::exp(l1 * t);
    let q11 = -(rates.a + rates.c1) - l1;
    let q22 = -(rates.b + rates.c2) - l1;
    (
        e * (1.0 + q11 * phi),
        e * rates.c1 * phi,
        e * rates.c2 * phi,
        e * (1.0 + q22 * phi),
    )
}

/// Every occupancy integral with a closed form.
///
/// `N10` is the urn-1 occupancy of a ball started in urn 1 (`p11`), `N01` of
/// one started in urn 2 (`p21`); `M10` and `M01` are the urn-2 occupancies
/// (`p12`, `p22`). Each variant is `int_0^inf` of the named product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IntegralKind {
    N10,
    N01,
    M10,
    M01,
    N10Sq,
    N01Sq,
    N10N01,
    N10M10,
    N01M01,
    /// `N10 M01 + N01 M10`.
    Cross,
    N10Cube,
    N10SqN01,
    N10N01Sq,
    N01Cube,
    M10N10Sq,
    M10N10N01,
    M10N01Sq,
    M01N10Sq,
    M01N10N01,
    M01N01Sq,
}

impl IntegralKind {
    pub const ALL: [IntegralKind; 20] = [
        IntegralKind::N10,
        IntegralKind::N01,
        IntegralKind::M10,
        IntegralKind::M01,
        IntegralKind::N10Sq,
        IntegralKind::N01Sq,
        IntegralKind::N10N01,
        IntegralKind::N10M10,
        IntegralKind::N01M01,
        IntegralKind::Cross,
        IntegralKind::N10Cube,
        IntegralKind::N10SqN01,
        IntegralKind::N10N01Sq,
        IntegralKind::N01Cube,
        IntegralKind::M10N10Sq,
        IntegralKind::M10N10N01,
        IntegralKind::M10N01Sq,
        IntegralKind::M01N10Sq,
        IntegralKind::M01N10N01,
        IntegralKind::M01N01Sq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IntegralKind::N10 => "N10",
            IntegralKind::N01 => "N01",
            IntegralKind::M10 => "M10",
            IntegralKind::M01 => "M01",
            IntegralKind::N10Sq => "N10^2",
            IntegralKind::N01Sq => "N01^2",
            IntegralKind::N10N01 => "N10*N01",
            IntegralKind::N10M10 => "N10*M10",
            IntegralKind::N01M01 => "N01*M01",
            IntegralKind::Cross => "N10*M01+N01*M10",
            IntegralKind::N10Cube => "N10^3",
            IntegralKind::N10SqN01 => "N10^2*N01",
            IntegralKind::N10N01Sq => "N10*N01^2",
            IntegralKind::N01Cube => "N01^3",
            IntegralKind::M10N10Sq => "M10*N10^2",
            IntegralKind::M10N10N01 => "M10*N10*N01",
            IntegralKind::M10N01Sq => "M10*N01^2",
            IntegralKind::M01N10Sq => "M01*N10^2",
            IntegralKind::M01N10N01 => "M01*N10*N01",
            IntegralKind::M01N01Sq => "M01*N01^2",
        }
    }

    /// Order of the product (1, 2 or 3).
    pub fn order(self) -> usize {
        match self {
            IntegralKind::N10 | IntegralKind::N01 | IntegralKind::M10 | IntegralKind::M01 => 1,
            IntegralKind::N10Sq
            | IntegralKind::N01Sq
            | IntegralKind::N10N01
            | IntegralKind::N10M10
            | IntegralKind::N01M01
            | IntegralKind::Cross => 2,
            _ => 3,
        }
    }

    /// The integrand as a function of `(p11, p12, p21, p22)`.
    pub fn integrand(self, p: (f64, f64, f64, f64)) -> f64 {
        let (n10, m10, n01, m01) = p;
        match self {
            IntegralKind::N10 => n10,
            IntegralKind::N01 => n01,
            IntegralKind::M10 => m10,
            IntegralKind::M01 => m01,
            IntegralKind::N10Sq => n10 * n10,
            IntegralKind::N01Sq => n01 * n01,
            IntegralKind::N10N01 => n10 * n01,
            IntegralKind::N10M10 => n10 * m10,
            IntegralKind::N01M01 => n01 * m01,
            IntegralKind::Cross => n10 * m01 + n01 * m10,
            IntegralKind::N10Cube => n10 * n10 * n10,
            IntegralKind::N10SqN01 => n10 * n10 * n01,
            IntegralKind::N10N01Sq => n10 * n01 * n01,
            IntegralKind::N01Cube => n01 * n01 * n01,
            IntegralKind::M10N10Sq => m10 * n10 * n10,
            IntegralKind::M10N10N01 => m10 * n10 * n01,
            IntegralKind::M10N01Sq => m10 * n01 * n01,
            IntegralKind::M01N10Sq => m01 * n10 * n10,
            IntegralKind::M01N10N01 => m01 * n10 * n01,
            IntegralKind::M01N01Sq => m01 * n01 * n01,
        }
    }
}

/// Closed form of the occupancy integral.
pub fn urn_integral_closed_form(kind: IntegralKind, rates: &UrnRates) -> Result<f64> {
    let UrnRates { a, b, c1, c2 } = *rates;
    let delta = rates.delta();
    if !(delta > 0.0) {
        return Err(Error::DegenerateDenominator("ab + a c2 + b c1"));
    }
    let s = rates.total();
    let two = 2.0 * s * delta;
    let three = 3.0 * delta * (2.0 * s * s + delta);
    let v = match kind {
        IntegralKind::N10 => (b + c2) / delta,
        IntegralKind::N01 => c2 / delta,
        IntegralKind::M10 => c1 / delta,
        IntegralKind::M01 => (a + c1) / delta,
        IntegralKind::N10Sq => (b * s + c2 * (a + b + c2)) / two,
        IntegralKind::N01Sq => c2 * c2 / two,
        IntegralKind::N10N01 => c2 * (b + c2) / two,
        IntegralKind::N10M10 => c1 * (b + c2) / two,
        IntegralKind::N01M01 => c2 * (a + c1) / two,
        IntegralKind::Cross => 2.0 * (a + c1) * (b + c2) / two,
        IntegralKind::N10Cube => {
            (b * (2.0 * s * s + a * b + b * c1 + c1 * c2)
                + c2 * (2.0 * (a + b + c2) * (a + b + c2) + a * (2.0 * b + 2.0 * c1 + c2)))
                / three
        }
        IntegralKind::N10SqN01 => c2 * (delta + 2.0 * (b + c2) * (b + c2)) / three,
        IntegralKind::N10N01Sq => 2.0 * c2 * c2 * (b + c2) / three,
        IntegralKind::N01Cube => 2.0 * c2 * c2 * c2 / three,
        IntegralKind::M10N10Sq => c1 * (delta + 2.0 * (b + c2) * (b + c2)) / three,
        IntegralKind::M10N10N01 => 2.0 * c1 * c2 * (b + c2) / three,
        IntegralKind::M10N01Sq => 2.0 * c1 * c2 * c2 / three,
        IntegralKind::M01N10Sq => {
            (3.0 * b * (a + c1) * (a + 2.0 * b + c1)
                + (3.0 * a * a + 8.0 * b * c1 + 3.0 * a * (4.0 * b + c1)) * c2
                + 2.0 * (3.0 * a + c1) * c2 * c2)
                / three
        }
        IntegralKind::M01N10N01 => c2 * (3.0 * a * (b + c2) + c1 * (3.0 * b + 2.0 * c2)) / three,
        IntegralKind::M01N01Sq => 2.0 * (a + c1) * c2 * c2 / three,
    };
    Ok(v)
}

/// The same integral by adaptive quadrature over `[0, T]`, with `T` chosen so
/// that `exp(-lambda_min T) <= tol / 10`.
pub fn urn_integral_quadrature(kind: IntegralKind, rates: &UrnRates, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tol must be positive"));
    }
    let (l1, _) = rates.eigenvalues();
    let decay = -l1;
    if !(decay > 0.0) {
        return Err(Error::DegenerateDenominator("ab + a c2 + b c1"));
    }
    let horizon = libm::log(10.0 / tol) / decay;
    quad::integrate(
        |t| kind.integrand(occupancy_probabilities(t, rates)),
        0.0,
        horizon,
        tol * 1e-3 / decay,
        tol / 10.0,
        20_000,
    )
}

/// Mean urn-1 count at time `t` from `n` balls in urn 1 and `m` in urn 2,
/// by direct simulation of the multi-ball urn.
pub fn simulate_urn_count<R: Rng + ?Sized>(
    n: u64,
    m: u64,
    t: f64,
    rates: &UrnRates,
    reps: u64,
    rng: &mut R,
) -> Estimate {
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..reps {
        let (mut k1, mut k2) = (n, m);
        let mut clock = 0.0;
        loop {
            let r_die1 = k1 as f64 * rates.a;
            let r_move1 = k1 as f64 * rates.c1;
            let r_die2 = k2 as f64 * rates.b;
            let r_move2 = k2 as f64 * rates.c2;
            let total = r_die1 + r_move1 + r_die2 + r_move2;
            if !(total > 0.0) {
                break;
            }
            let u: f64 = rng.random();
            clock += -libm::log1p(-u) / total;
            if clock > t {
                break;
            }
            let mut pick = rng.random::<f64>() * total;
            if pick < r_die1 {
                k1 -= 1;
                continue;
            }
            pick -= r_die1;
            if pick < r_move1 {
                k1 -= 1;
                k2 += 1;
                continue;
            }
            pick -= r_move1;
            if pick < r_die2 {
                k2 -= 1;
            } else {
                k2 -= 1;
                k1 += 1;
            }
        }
        let v = k1 as f64;
        sum += v;
        sum_sq += v * v;
    }
    let r = reps.max(1) as f64;
    let mean = sum / r;
    let var = if reps > 1 { (sum_sq - r * mean * mean) / (r - 1.0) } else { 0.0 };
    Estimate { mean, se: libm::sqrt(var.max(0.0) / r), reps }
}
