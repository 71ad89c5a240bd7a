//! Small tables for the `factors` and `moments` commands, printed as CSV.

use std::io::Write;

use tiwf_core::beta::{beta_moment, beta_params_from_chain};
use tiwf_core::distance::{island_weight, weighted_average_moment};
use tiwf_core::moments::{exact_stationary_moments, MomentIndex};
use tiwf_core::stein::stein_factors;
use tiwf_core::ti::{map_chain_to_ti, ti_stationary_moments};
use tiwf_core::{ChainParams, SteinFactors, TIParams};

use crate::error::AppResult;
use crate::report::SCHEMA_VERSION;

pub fn ti_named(ti: &TIParams) -> [(&'static str, f64); 8] {
    [
        ("a1", ti.a1),
        ("a2", ti.a2),
        ("b1", ti.b1),
        ("b2", ti.b2),
        ("c1", ti.c1),
        ("c2", ti.c2),
        ("alpha", ti.alpha),
        ("beta", ti.beta),
    ]
}

/// `(name, value)` rows: the diffusion parameters, then the nine factors.
pub fn factor_rows(n: u64, m: u64, ti: &TIParams, lambda: Option<f64>) -> AppResult<Vec<(String, f64)>> {
    let f = stein_factors(n, m, ti)?;
    let mut rows: Vec<(String, f64)> = ti_named(ti).iter().map(|(k, v)| (k.to_string(), *v)).collect();
    if let Some(l) = lambda {
        rows.push(("lambda".into(), l));
    }
    rows.extend(SteinFactors::NAMES.iter().map(|s| s.to_string()).zip(f.as_array()));
    Ok(rows)
}

pub fn write_factors<W: Write>(out: &mut W, n: u64, m: u64, rows: &[(String, f64)]) -> AppResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["schema_version", "n", "m", "name", "value"])?;
    for (k, v) in rows {
        w.write_record([SCHEMA_VERSION.to_string(), n.to_string(), m.to_string(), k.clone(), v.to_string()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Rows `(table, n, m, value)`: chain and diffusion monomials up to `degree`,
/// then the weighted average `W` and its Beta reference, powers `1..=degree`.
pub fn moment_rows(params: &ChainParams, degree: usize) -> AppResult<Vec<(&'static str, usize, usize, f64)>> {
    let p = params.validate()?;
    let chain = exact_stationary_moments::<f64>(&p, degree)?;
    let ti = ti_stationary_moments(&map_chain_to_ti(&p).0, degree)?;
    let mut rows = Vec::new();
    for idx in MomentIndex::all(degree) {
        rows.push(("chain", idx.n, idx.m, chain.value(idx.n, idx.m)));
    }
    for idx in MomentIndex::all(degree) {
        rows.push(("ti", idx.n, idx.m, ti.value(idx.n, idx.m)));
    }
    rows.push(("chain_exy2", 0, 0, chain.exy2()));
    let w = island_weight(&p);
    let beta = beta_params_from_chain(&p)?;
    for k in 1..=degree {
        rows.push(("weighted", k, 0, weighted_average_moment(&chain, w, k)));
    }
    for k in 1..=degree {
        rows.push(("beta", k, 0, beta_moment(&beta, k as u32)));
    }
    Ok(rows)
}

pub fn write_moments<W: Write>(out: &mut W, params: &ChainParams, rows: &[(&str, usize, usize, f64)]) -> AppResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["schema_version", "kind", "table", "n", "m", "value"])?;
    for (t, n, m, v) in rows {
        w.write_record([
            SCHEMA_VERSION.to_string(),
            params.kind.name().to_string(),
            t.to_string(),
            n.to_string(),
            m.to_string(),
            v.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
