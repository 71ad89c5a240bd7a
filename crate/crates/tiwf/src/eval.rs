//! Exact distance and bound for one chain and a set of test functions.

use tiwf_core::beta::beta_params_from_chain;
use tiwf_core::distance::{beta_monomial_distance, ti_monomial_distance};
use tiwf_core::moments::exact_stationary_moments;
use tiwf_core::stein::{beta_bound, polynomial_h_norms, ti_bound};
use tiwf_core::ti::{map_chain_to_ti, ti_stationary_moments};
use tiwf_core::{ChainParams, MomentTable};

use crate::config::Target;
use crate::report::Record;
use crate::testfn::Monomial;

/// Which test functions to evaluate against which target.
#[derive(Debug, Clone, Default)]
pub struct Plan {
    pub ti_h: Vec<Monomial>,
    pub beta_h: Vec<Monomial>,
    /// Compute exact distances (otherwise bounds only).
    pub distances: bool,
}

impl Plan {
    fn pairs(&self) -> impl Iterator<Item = (Target, Monomial)> + '_ {
        self.ti_h
            .iter()
            .map(|h| (Target::Ti, *h))
            .chain(self.beta_h.iter().map(|h| (Target::Beta, *h)))
    }

    fn chain_degree(&self) -> usize {
        let needed = if self.distances {
            self.pairs().map(|(_, h)| h.degree()).max().unwrap_or(0)
        } else {
            0
        };
        // E(X - Y)^2 feeds every Beta bound.
        if self.beta_h.is_empty() {
            needed
        } else {
            needed.max(2)
        }
    }
}

fn fail_all(params: ChainParams, eps: Option<f64>, plan: &Plan, msg: &str) -> Vec<Record> {
    plan.pairs()
        .map(|(t, h)| {
            let mut r = Record::new(params, eps, t, h);
            r.error = Some(msg.to_string());
            r
        })
        .collect()
}

/// One record per (target, h). Model errors are stored in the records, never
/// returned, so a grid run always continues.
pub fn evaluate_point(params: ChainParams, eps: Option<f64>, plan: &Plan) -> Vec<Record> {
    let params = match params.validate() {
        Ok(p) => p,
        Err(e) => return fail_all(params, eps, plan, &e.to_string()),
    };
    let degree = plan.chain_degree();
    let chain: Option<MomentTable> = if degree > 0 {
        match exact_stationary_moments::<f64>(&params, degree) {
            Ok(m) => Some(m),
            Err(e) => return fail_all(params, eps, plan, &e.to_string()),
        }
    } else {
        None
    };
    let ti_degree = plan.ti_h.iter().map(Monomial::degree).max().unwrap_or(0);
    let ti_moments = if plan.distances && ti_degree > 0 {
        Some(ti_stationary_moments(&map_chain_to_ti(&params).0, ti_degree))
    } else {
        None
    };

    let mut out = Vec::new();
    for h in &plan.ti_h {
        let mut r = Record::new(params, eps, Target::Ti, *h);
        match (&chain, &ti_moments) {
            (Some(c), Some(Ok(t))) => r.exact_distance = Some(ti_monomial_distance(c, t, h.n, h.m)),
            (_, Some(Err(e))) => r.error = Some(e.to_string()),
            _ => {}
        }
        match ti_bound(&params, h.n as u64, h.m as u64) {
            Ok(b) => r.bound = Some(b),
            Err(e) => r.error = Some(e.to_string()),
        }
        out.push(r);
    }
    if !plan.beta_h.is_empty() {
        let beta = beta_params_from_chain(&params);
        let exy2 = chain.as_ref().map(|c| c.exy2().max(0.0));
        for h in &plan.beta_h {
            let mut r = Record::new(params, eps, Target::Beta, *h);
            match (&beta, &chain) {
                (Ok(b), Some(c)) => {
                    if plan.distances {
                        r.exact_distance = Some(beta_monomial_distance(&params, c, b, h.n));
                    }
                    match beta_bound(&params, &polynomial_h_norms(h.n as u32), exy2.unwrap_or(0.0)) {
                        Ok(bd) => r.bound = Some(bd),
                        Err(e) => r.error = Some(e.to_string()),
                    }
                }
                (Err(e), _) => r.error = Some(e.to_string()),
                (Ok(_), None) => r.error = Some("chain moments unavailable".to_string()),
            }
            out.push(r);
        }
    }
    out
}
