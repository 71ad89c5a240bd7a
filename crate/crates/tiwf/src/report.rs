//! Per-point records, the versioned CSV layout and JSON summaries.

use std::cmp::Ordering;
use std::fs;
use std::path::Path;

use serde::Serialize;
use tiwf_core::{BoundBreakdown, ChainParams};

use crate::config::Target;
use crate::error::{AppError, AppResult};
use crate::testfn::Monomial;

/// Bumped whenever a CSV column is added, removed, renamed or reordered.
pub const SCHEMA_VERSION: u32 = 1;

/// Slack on `distance <= bound` for round-off in the f64 moment solves. Some
/// bounds are exactly zero (e.g. `h = x` with equal total mutation on both
/// islands), where the true distance is zero too but evaluates to ~1e-16.
pub const DISTANCE_ABS_TOL: f64 = 1e-12;

pub const CODE_VERSION: &str = concat!("tiwf ", env!("CARGO_PKG_VERSION"));

/// Additive bound pieces, in column order. Pieces a bound does not have are
/// left empty.
pub const TERM_COLUMNS: [&str; 12] = [
    "Dx*Ax", "Dy*Ay", "Dxx*Axx", "Dyy*Ayy", "Dxy*Axy", "Dxxx*Axxx", "Dxxy*Axxy", "Dxyy*Axyy", "Dyyy*Ayyy", "h1*A1",
    "h2*A2", "h21*A3",
];

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub config_hash: String,
    pub code_version: &'static str,
    pub seed: u64,
}

impl Provenance {
    pub fn new(config_hash: &str, seed: u64) -> Self {
        Self { config_hash: config_hash.to_string(), code_version: CODE_VERSION, seed }
    }
}

/// One (chain, target, test function) evaluation.
#[derive(Debug, Clone)]
pub struct Record {
    pub params: ChainParams,
    pub eps: Option<f64>,
    pub target: Target,
    pub h: Monomial,
    pub exact_distance: Option<f64>,
    pub bound: Option<BoundBreakdown>,
    pub error: Option<String>,
}

impl Record {
    pub fn new(params: ChainParams, eps: Option<f64>, target: Target, h: Monomial) -> Self {
        Self { params, eps, target, h, exact_distance: None, bound: None, error: None }
    }

    pub fn bound_total(&self) -> Option<f64> {
        self.bound.as_ref().map(|b| b.total)
    }

    /// `distance <= bound` up to [`DISTANCE_ABS_TOL`], when both are available.
    pub fn holds(&self) -> Option<bool> {
        Some(self.exact_distance? <= self.bound_total()? + DISTANCE_ABS_TOL)
    }

    pub fn vacuous(&self) -> Option<bool> {
        self.bound.as_ref().map(BoundBreakdown::is_vacuous)
    }

    fn key_cmp(&self, other: &Self) -> Ordering {
        let a = &self.params;
        let b = &other.params;
        a.kind
            .cmp(&b.kind)
            .then(a.n.cmp(&b.n))
            .then(a.m.cmp(&b.m))
            .then(a.c.cmp(&b.c))
            .then(a.p1.total_cmp(&b.p1))
            .then(a.p2.total_cmp(&b.p2))
            .then(a.q1.total_cmp(&b.q1))
            .then(a.q2.total_cmp(&b.q2))
            .then(self.eps.unwrap_or(-1.0).total_cmp(&other.eps.unwrap_or(-1.0)))
            .then(self.target.cmp(&other.target))
            .then(self.h.cmp(&other.h))
    }
}

pub fn sort_records(records: &mut [Record]) {
    records.sort_by(Record::key_cmp);
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn csv_header() -> Vec<String> {
    let mut cols: Vec<String> = [
        "schema_version",
        "kind",
        "N",
        "M",
        "c",
        "p1",
        "p2",
        "q1",
        "q2",
        "eps",
        "target",
        "h",
        "exact_distance",
        "bound_total",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    cols.extend(TERM_COLUMNS.iter().map(|t| format!("term_{}", t.replace('*', "_"))));
    cols.extend(["vacuous_flag", "holds", "error", "config_hash", "code_version", "seed"].iter().map(|s| s.to_string()));
    cols
}

fn csv_row(r: &Record, prov: &Provenance) -> Vec<String> {
    let p = &r.params;
    let mut row = vec![
        SCHEMA_VERSION.to_string(),
        p.kind.name().to_string(),
        p.n.to_string(),
        p.m.to_string(),
        p.c.to_string(),
        p.p1.to_string(),
        p.p2.to_string(),
        p.q1.to_string(),
        p.q2.to_string(),
        opt(r.eps),
        r.target.name().to_string(),
        r.h.to_string(),
        opt(r.exact_distance),
        opt(r.bound_total()),
    ];
    for name in TERM_COLUMNS {
        row.push(opt(r.bound.as_ref().and_then(|b| b.term(name))));
    }
    row.push(opt(r.vacuous()));
    row.push(opt(r.holds()));
    row.push(r.error.clone().unwrap_or_default());
    row.push(prov.config_hash.clone());
    row.push(prov.code_version.to_string());
    row.push(prov.seed.to_string());
    row
}

/// Writes the records in sorted order.
pub fn write_csv(path: &Path, records: &[Record], prov: &Provenance) -> AppResult<()> {
    ensure_parent(path)?;
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(csv_header())?;
    for r in &sorted {
        w.write_record(csv_row(r, prov))?;
    }
    w.flush().map_err(|source| AppError::Output { path: path.to_path_buf(), source })?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> AppResult<()> {
    ensure_parent(path)?;
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|source| AppError::Output { path: path.to_path_buf(), source })
}

fn ensure_parent(path: &Path) -> AppResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| AppError::Output { path: dir.to_path_buf(), source })?;
    }
    Ok(())
}

/// Tallies over a set of records.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub records: usize,
    pub checked: usize,
    pub holds: usize,
    pub violations: usize,
    pub vacuous: usize,
    pub errors: usize,
}

impl Counts {
    pub fn of(records: &[Record]) -> Self {
        let mut c = Counts { records: records.len(), ..Counts::default() };
        for r in records {
            match r.holds() {
                Some(true) => {
                    c.checked += 1;
                    c.holds += 1;
                }
                Some(false) => {
                    c.checked += 1;
                    c.violations += 1;
                }
                None => {}
            }
            if r.vacuous() == Some(true) {
                c.vacuous += 1;
            }
            if r.error.is_some() {
                c.errors += 1;
            }
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_rows_align() {
        let p = ChainParams::wf(10, 5, 1, 0.1, 0.1, 0.1, 0.1);
        let r = Record::new(p, None, Target::Ti, Monomial::new(1, 0));
        let prov = Provenance::new("abc", 1);
        assert_eq!(csv_header().len(), csv_row(&r, &prov).len());
        assert_eq!(csv_header()[0], "schema_version");
    }

    #[test]
    fn counts_tally_outcomes() {
        let p = ChainParams::wf(10, 5, 1, 0.1, 0.1, 0.1, 0.1);
        let mut ok = Record::new(p, None, Target::Ti, Monomial::new(1, 0));
        ok.exact_distance = Some(0.1);
        ok.bound = Some(BoundBreakdown { terms: vec![("Dx*Ax", 2.0)], extras: vec![], lambda: None, total: 2.0 });
        let mut bad = ok.clone();
        bad.exact_distance = Some(3.0);
        let mut err = Record::new(p, None, Target::Beta, Monomial::new(1, 0));
        err.error = Some("boom".into());
        let c = Counts::of(&[ok, bad, err]);
        assert_eq!((c.records, c.checked, c.holds, c.violations, c.vacuous, c.errors), (3, 2, 1, 1, 2, 1));
    }
}
