use rand::Rng;
use tiwf_core::chain::{
    conditional_drift, run_chain, sample_offspring, step, ChainParams, ChainState, RngSeed,
};
use tiwf_core::moments::{
    binom2, binom4, exact_stationary_moments, hgmom2, hgmom4, transfer_matrix, MomentIndex,
};
use tiwf_core::poly::BiPoly;

fn choose(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn central(pmf: &[f64], order: i32) -> f64 {
    let mean: f64 = pmf.iter().enumerate().map(|(k, w)| k as f64 * w).sum();
    pmf.iter().enumerate().map(|(k, w)| w * (k as f64 - mean).powi(order)).sum()
}

#[test]
fn binomial_central_moments_match_enumeration() {
    for n in 1..=11u64 {
        for &p in &[0.05f64, 0.3, 0.5, 0.77] {
            let pmf: Vec<f64> = (0..=n)
                .map(|k| choose(n, k) * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32))
                .collect();
            assert!((central(&pmf, 2) - binom2(n as f64, p)).abs() < 1e-12);
            assert!((central(&pmf, 4) - binom4(n as f64, p)).abs() < 1e-11);
        }
    }
}

#[test]
fn hypergeometric_central_moments_match_enumeration() {
    for total in 4..=12u64 {
        for good in 0..=total {
            for draws in 0..=total {
                let den = choose(total, draws);
                let pmf: Vec<f64> = (0..=draws)
                    .map(|k| {
                        if k > good || draws - k > total - good {
                            0.0
                        } else {
                            choose(good, k) * choose(total - good, draws - k) / den
                        }
                    })
                    .collect();
                let (t, g, d) = (total as f64, good as f64, draws as f64);
                assert!((central(&pmf, 2) - hgmom2(t, g, d)).abs() < 1e-12);
                assert!(
                    (central(&pmf, 4) - hgmom4(t, g, d)).abs() < 1e-10,
                    "Hg({total},{good},{draws}): {} vs {}",
                    central(&pmf, 4),
                    hgmom4(t, g, d)
                );
            }
        }
    }
    assert!((hgmom2(10.0, 5.0, 4.0) - 2.0 / 3.0).abs() < 1e-15);
}

fn grid() -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    for i in 0..=4 {
        for j in 0..=4 {
            pts.push((i as f64 / 4.0, j as f64 / 4.0));
        }
    }
    pts
}

#[test]
fn first_rows_are_state_plus_drift() {
    for p in [
        ChainParams::wf(12, 7, 3, 0.1, 0.2, 0.05, 0.3),
        ChainParams::seed_bank(12, 8, 3, 0.1, 0.2),
    ] {
        let t = transfer_matrix::<f64>(&p, 1).unwrap();
        for i in 0..=p.n {
            for j in 0..=p.m {
                let s = ChainState { i, j };
                let (x, y) = (s.x(&p), s.y(&p));
                let (dx, dy) = conditional_drift(s, &p);
                assert!((t.row_poly(MomentIndex::new(1, 0)).eval(&x, &y) - (x + dx)).abs() < 1e-14);
                assert!((t.row_poly(MomentIndex::new(0, 1)).eval(&x, &y) - (y + dy)).abs() < 1e-14);
            }
        }
    }
}

/// Degree-two rows written out by hand from means and variances of the
/// offspring components.
#[test]
fn degree_two_rows_match_hand_expansion() {
    let wf = ChainParams::wf(15, 9, 4, 0.07, 0.11, 0.13, 0.02);
    let t = transfer_matrix::<f64>(&wf, 2).unwrap();
    let (n, m, c) = (15.0, 9.0, 4.0);
    for (x, y) in grid() {
        let u = wf.u(x);
        let v = wf.v(y);
        let (ea, eb, ec, ed) = ((n - c) * u, c * u, c * v, (m - c) * v);
        let xx = (binom2(n - c, u) + binom2(c, v) + (ea + ec).powi(2)) / (n * n);
        let yy = (binom2(c, u) + binom2(m - c, v) + (eb + ed).powi(2)) / (m * m);
        let xy = (ea + ec) * (eb + ed) / (n * m);
        assert!((t.row_poly(MomentIndex::new(2, 0)).eval(&x, &y) - xx).abs() < 1e-13);
        assert!((t.row_poly(MomentIndex::new(0, 2)).eval(&x, &y) - yy).abs() < 1e-13);
        assert!((t.row_poly(MomentIndex::new(1, 1)).eval(&x, &y) - xy).abs() < 1e-13);
    }

    let sb = ChainParams::seed_bank(15, 9, 4, 0.07, 0.11);
    let t = transfer_matrix::<f64>(&sb, 2).unwrap();
    for (x, _) in grid() {
        for j in 0..=9 {
            let y = j as f64 / m;
            let u = sb.u(x);
            let (ea, eb) = ((n - c) * u, c * u);
            let ec = c * y;
            let vc = hgmom2(m, m * y, c);
            let ed = m * y - ec;
            let xx = (binom2(n - c, u) + vc + (ea + ec).powi(2)) / (n * n);
            let yy = (binom2(c, u) + vc + (eb + ed).powi(2)) / (m * m);
            // E[C D] = MY E C - E C^2
            let ecd = m * y * ec - (vc + ec * ec);
            let xy = (ea * eb + ea * ed + ec * eb + ecd) / (n * m);
            assert!((t.row_poly(MomentIndex::new(2, 0)).eval(&x, &y) - xx).abs() < 1e-13);
            assert!((t.row_poly(MomentIndex::new(0, 2)).eval(&x, &y) - yy).abs() < 1e-13);
            assert!((t.row_poly(MomentIndex::new(1, 1)).eval(&x, &y) - xy).abs() < 1e-13);
        }
    }
}

#[test]
fn row_degrees_are_bounded() {
    let p = ChainParams::seed_bank(9, 6, 2, 0.1, 0.1);
    let t = transfer_matrix::<f64>(&p, 5).unwrap();
    for idx in MomentIndex::all(5) {
        assert!(t.row_poly(idx).effective_degree() <= idx.degree());
    }
}

#[test]
fn exy2_identity() {
    let p = ChainParams::wf(20, 10, 2, 0.05, 0.05, 0.1, 0.02);
    let mu = exact_stationary_moments::<f64>(&p, 2).unwrap();
    let h = BiPoly::affine(0.0, 1.0, -1.0).pow(2);
    assert!((mu.expect(&h).unwrap() - mu.exy2()).abs() < 1e-15);
}

#[test]
fn extreme_state_mean_by_monte_carlo() {
    let p = ChainParams::wf(30, 20, 5, 0.1, 0.2, 0.05, 0.15);
    let s = ChainState { i: 30, j: 20 };
    let mut rng = RngSeed::new(2024, 0).rng();
    let reps = 1_000_000u64;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..reps {
        let v = step(s, &p, &mut rng).i as f64;
        sum += v;
        sum_sq += v * v;
    }
    let mean = sum / reps as f64;
    let se = ((sum_sq / reps as f64 - mean * mean) / reps as f64).sqrt();
    let expected = 25.0 * (1.0 - 0.2) + 5.0 * (1.0 - 0.15);
    assert!((mean - expected).abs() < 4.0 * se, "{mean} vs {expected} (se {se})");
}

#[test]
fn drift_matches_one_step_monte_carlo() {
    let mut pick = RngSeed::new(99, 0).rng();
    let chains = [
        ChainParams::wf(25, 15, 4, 0.1, 0.2, 0.15, 0.05),
        ChainParams::seed_bank(25, 15, 4, 0.1, 0.2),
    ];
    for (k, p) in chains.iter().enumerate() {
        for s_idx in 0..5u64 {
            let s = ChainState { i: pick.random_range(0..=p.n), j: pick.random_range(0..=p.m) };
            let (dx, dy) = conditional_drift(s, p);
            let mut rng = RngSeed::new(7, 100 * k as u64 + s_idx).rng();
            let reps = 1_000_000u64;
            let (mut sx, mut sxx, mut sy, mut syy) = (0.0, 0.0, 0.0, 0.0);
            for _ in 0..reps {
                let t = step(s, p, &mut rng);
                let ex = t.x(p) - s.x(p);
                let ey = t.y(p) - s.y(p);
                sx += ex;
                sxx += ex * ex;
                sy += ey;
                syy += ey * ey;
            }
            let r = reps as f64;
            let (mx, my) = (sx / r, sy / r);
            let sex = ((sxx / r - mx * mx) / r).sqrt();
            let sey = ((syy / r - my * my) / r).sqrt();
            assert!((mx - dx).abs() < 4.0 * sex, "{p:?} {s:?}: x {mx} vs {dx}");
            assert!((my - dy).abs() < 4.0 * sey.max(1e-300), "{p:?} {s:?}: y {my} vs {dy}");
        }
    }
}

#[test]
fn seed_bank_conserves_bank_mass() {
    let p = ChainParams::seed_bank(10, 6, 3, 0.2, 0.1);
    let mut rng = RngSeed::new(5, 1).rng();
    for j in 0..=6 {
        for _ in 0..200 {
            let o = sample_offspring(ChainState { i: 4, j }, &p, &mut rng);
            assert_eq!(o.c + o.d, j);
            assert!(o.c <= p.c);
        }
    }
}

#[test]
fn symmetric_run_is_centred() {
    let p = ChainParams::wf(20, 20, 2, 0.05, 0.05, 0.05, 0.05);
    let run = run_chain(p, 1000, 1_000_000, 1, RngSeed::new(31, 0), 1).unwrap();
    let mean = run.moments.means().value(1, 0);
    let se = run.moments.standard_errors().value(1, 0);
    assert!((mean - 0.5).abs() < 4.0 * se, "{mean} (se {se})");
}

#[test]
fn long_runs_match_exact_moments() {
    for p in [
        ChainParams::wf(20, 10, 2, 0.05, 0.1, 0.08, 0.04),
        ChainParams::seed_bank(20, 10, 2, 0.05, 0.1),
    ] {
        let exact = exact_stationary_moments::<f64>(&p, 2).unwrap();
        let run = run_chain(p, 1000, 1_000_000, 1, RngSeed::new(77, 3), 2).unwrap();
        let (means, ses) = (run.moments.means(), run.moments.standard_errors());
        for (idx, &v) in exact.iter().skip(1) {
            let (m, se) = (means.value(idx.n, idx.m), ses.value(idx.n, idx.m));
            assert!((m - v).abs() < 4.0 * se, "{p:?} {idx:?}: {m} vs {v} (se {se})");
        }
    }
}

// E w - E Z = NM (sq - sp)(E X - E Y) / ((N + M)(N sp + M sq)) exactly, which
// is |h|_1 / (a1 + a2) times the 1/lambda-scaled drift remainder.
#[test]
fn weighted_mean_offset_is_the_scaled_drift_remainder() {
    use tiwf_core::beta::{beta_moment, beta_params_from_chain};
    use tiwf_core::distance::{island_weight, weighted_average_moment};
    use tiwf_core::stein::{polynomial_h_norms, wf_beta_bound};

    for &(n, m, c) in &[(20u64, 10u64, 1u64), (50, 50, 2), (200, 200, 1), (100, 50, 5)] {
        let nf = n as f64;
        let p = ChainParams::wf(n, m, c, 1.0 / nf, 1.0 / nf, 2.0 / nf, 1.0 / nf);
        let t = exact_stationary_moments::<f64>(&p, 2).unwrap();
        let (mx, my) = (t.value(1, 0), t.value(0, 1));
        let (sp, sq) = (p.p1 + p.p2, p.q1 + p.q2);
        let (nn, mm) = (n as f64, m as f64);
        let offset = nn * mm * (sq - sp) * (mx - my) / ((nn + mm) * (nn * sp + mm * sq));
        let beta = beta_params_from_chain(&p).unwrap();
        let got = weighted_average_moment(&t, island_weight(&p), 1) - beta_moment(&beta, 1);
        assert!((got - offset).abs() < 1e-12 * offset.abs().max(1e-3), "{got} vs {offset}");

        let b = wf_beta_bound(&p, &polynomial_h_norms(1), t.exy2()).unwrap();
        let sum_a = beta.a_one + beta.a_two;
        assert!(got.abs() <= b.extra("A1_scaled").unwrap() / sum_a);
        assert!((b.extra("A1_scaled").unwrap() - (nn + mm) * b.extra("A1").unwrap()).abs() < 1e-15);
    }
}
