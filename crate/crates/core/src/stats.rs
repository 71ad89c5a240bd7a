//! Small summary statistics.

/// Least-squares slope of `ln y` against `ln x`. `None` with fewer than two
/// usable points or when all `x` coincide.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (libm::log(*x), libm::log(*y)));
    let (mut n, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (x, y) in pts {
        n += 1.0;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    if n < 2.0 {
        return None;
    }
    let den = n * sxx - sx * sx;
    if den.abs() <= 1e-300 {
        return None;
    }
    Some((n * sxy - sx * sy) / den)
}

/// `(mean, standard error)` of a sample.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, libm::sqrt(var / n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let xs = [1e3, 1e4, 1e5, 1e6];
        let ys: [f64; 4] = xs.map(|x: f64| 3.0 * x.powf(-0.5));
        assert!((loglog_slope(&xs, &ys).unwrap() + 0.5).abs() < 1e-12);
        assert!(loglog_slope(&xs[..1], &ys[..1]).is_none());
    }

    #[test]
    fn mean_and_se() {
        let (m, se) = mean_se(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((se - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }
}
