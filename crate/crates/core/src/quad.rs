//! Globally adaptive Gauss-Kronrod (7/15) quadrature on a finite interval.
//!
//! Used as an independent check on closed-form integrals, so it is kept
//! deliberately plain: bisect the interval with the largest error estimate
//! until the summed estimate meets `max(abs_tol, rel_tol * |I|)`.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (and the centre).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for k in 0..7 {
        let dx = half * XGK[k];
        let s = f(centre - dx) + f(centre + dx);
        kronrod += WGK[k] * s;
        if k % 2 == 1 {
            gauss += WG[k / 2] * s;
        }
    }
    (kronrod * half, libm::fabs((kronrod - gauss) * half))
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Integral of `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> Result<f64> {
    if !(abs_tol >= 0.0 && rel_tol >= 0.0) || !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument("quadrature tolerances and limits"));
    }
    let (value, err) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, err });
    let mut total = value;
    let mut total_err = err;
    let max_segments = max_segments.max(1);

    loop {
        let target = abs_tol.max(rel_tol * libm::fabs(total));
        if total_err <= target {
            return Ok(total);
        }
        if heap.len() >= max_segments {
            return Err(Error::NonConvergent {
                estimate: total,
                error: total_err,
            });
        }
        let worst = heap.pop().expect("heap never empties");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval can no longer be split in floating point.
            return Err(Error::NonConvergent {
                estimate: total,
                error: total_err,
            });
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Segment { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, err: e2 });
        // Re-sum occasionally to keep the running totals honest.
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.err).sum();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| x * x * x, 0.0, 2.0, 1e-14, 1e-14, 10).unwrap();
        assert!((v - 4.0).abs() < 1e-13);
    }

    #[test]
    fn exponential_decay() {
        let v = integrate(|t| libm::exp(-3.0 * t), 0.0, 40.0, 1e-13, 1e-12, 500).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn beta_density_moment() {
        // x^(1/2) (1 - x)^(1/2) over [0, 1] equals pi / 8.
        let v = integrate(
            |x| libm::sqrt(x * (1.0 - x)),
            0.0,
            1.0,
            1e-11,
            1e-11,
            4000,
        )
        .unwrap();
        assert!((v - core::f64::consts::PI / 8.0).abs() < 1e-10);
    }

    #[test]
    fn reports_non_convergence() {
        let r = integrate(|x| libm::sin(1.0 / x), 1e-9, 1.0, 1e-15, 0.0, 3);
        assert!(matches!(r, Err(Error::NonConvergent { .. })));
    }
}
