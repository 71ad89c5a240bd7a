//! TOML run configuration. Every section is optional; each command reads its
//! own section and falls back to the defaults below.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tiwf_core::{ChainParams, ModelKind};

use crate::error::{AppError, AppResult};
use crate::testfn::Monomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Wf,
    Seedbank,
}

impl From<KindArg> for ModelKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Wf => ModelKind::TwoIslandWF,
            KindArg::Seedbank => ModelKind::SeedBank,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Ti,
    Beta,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Ti => "ti",
            Target::Beta => "beta",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub scaling: ScalingConfig,
    #[serde(default)]
    pub crosscheck: CrosscheckConfig,
}

fn default_seed() -> u64 {
    20240601
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: default_seed(),
            output: OutputConfig::default(),
            verify: VerifyConfig::default(),
            scaling: ScalingConfig::default(),
            crosscheck: CrosscheckConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("results") }
    }
}

/// One explicit chain, in addition to (or instead of) the product grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointConfig {
    pub kind: KindArg,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "M")]
    pub m: u64,
    pub c: u64,
    pub p1: f64,
    pub p2: f64,
    #[serde(default)]
    pub q1: f64,
    #[serde(default)]
    pub q2: f64,
}

impl PointConfig {
    pub fn params(&self) -> ChainParams {
        match self.kind {
            KindArg::Wf => ChainParams::wf(self.n, self.m, self.c, self.p1, self.p2, self.q1, self.q2),
            KindArg::Seedbank => ChainParams::seed_bank(self.n, self.m, self.c, self.p1, self.p2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub kinds: Vec<KindArg>,
    /// Island-1 sizes `N`.
    pub n: Vec<u64>,
    /// `M = round(ratio N)`.
    pub m_ratio: Vec<f64>,
    pub c: Vec<u64>,
    /// Each mutation probability ranges over `hat / N`.
    pub mutation_hats: Vec<f64>,
    pub targets: Vec<Target>,
    pub ti_h: Vec<Monomial>,
    /// Powers `z^k` of the Beta-target test functions.
    pub beta_h: Vec<Monomial>,
    pub points: Vec<PointConfig>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            kinds: vec![KindArg::Wf, KindArg::Seedbank],
            n: vec![20, 50, 100, 200],
            m_ratio: vec![1.0, 0.5],
            c: vec![1, 2, 5],
            mutation_hats: vec![1.0, 2.0],
            targets: vec![Target::Ti, Target::Beta],
            ti_h: vec![Monomial::new(1, 0), Monomial::new(0, 1), Monomial::new(1, 1), Monomial::new(2, 0)],
            beta_h: (1..=4).map(|k| Monomial::new(k, 0)).collect(),
            points: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalingConfig {
    pub kinds: Vec<KindArg>,
    pub m: f64,
    pub p_hat1: f64,
    pub p_hat2: f64,
    /// Ignored for the seed-bank model.
    pub q_hat1: f64,
    pub q_hat2: f64,
    pub c_hat: f64,
    pub eps: Vec<f64>,
    /// Sizes at which bound totals are evaluated and fitted.
    pub n_grid: Vec<u64>,
    /// Extra sizes for exact distances.
    pub exact_n_grid: Vec<u64>,
    /// Exact distances are skipped above this size.
    pub exact_max_n: u64,
    pub ti_h: Monomial,
    pub beta_h: Monomial,
    pub slope_tol: f64,
    /// Whether a slope outside tolerance counts as a failed check.
    pub check_slopes: bool,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            kinds: vec![KindArg::Wf, KindArg::Seedbank],
            m: 1.0,
            p_hat1: 1.0,
            p_hat2: 1.0,
            q_hat1: 1.0,
            q_hat2: 1.0,
            c_hat: 0.5,
            eps: vec![0.0, 0.25, 0.5, 1.0],
            n_grid: vec![1_000, 10_000, 100_000, 1_000_000],
            exact_n_grid: vec![125, 250, 500, 1_000, 2_000],
            exact_max_n: 2_000,
            ti_h: Monomial::new(2, 1),
            beta_h: Monomial::new(3, 0),
            slope_tol: 0.05,
            check_slopes: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrosscheckConfig {
    /// Dual paths per (parameter draw, exponent) pair.
    pub dual_reps: u64,
    pub ti_draws: usize,
    pub exponents: Vec<[u64; 2]>,
    pub z_max: f64,
    pub quad_draws: usize,
    pub quad_rel_tol: f64,
    pub chains: Vec<PointConfig>,
    pub chain_samples: u64,
    pub chain_burn_in: u64,
    pub chain_thin: u64,
    pub chain_degree: usize,
    /// Also compare against fully enumerated tiny chains.
    pub enumeration: bool,
}

impl Default for CrosscheckConfig {
    fn default() -> Self {
        Self {
            dual_reps: 1_000_000,
            ti_draws: 5,
            exponents: vec![[1, 0], [0, 1], [1, 1], [2, 0]],
            z_max: 3.0,
            quad_draws: 50,
            quad_rel_tol: 1e-8,
            chains: vec![
                PointConfig { kind: KindArg::Wf, n: 20, m: 10, c: 2, p1: 0.05, p2: 0.1, q1: 0.08, q2: 0.04 },
                PointConfig { kind: KindArg::Seedbank, n: 20, m: 10, c: 2, p1: 0.05, p2: 0.1, q1: 0.0, q2: 0.0 },
            ],
            chain_samples: 1_000_000,
            chain_burn_in: 1_000,
            chain_thin: 1,
            chain_degree: 2,
            enumeration: true,
        }
    }
}

/// A parsed configuration with the hash of its source text.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: Config,
    pub hash: String,
}

impl LoadedConfig {
    pub fn parse(text: &str) -> AppResult<Self> {
        let config: Config = toml::from_str(text)?;
        config.check()?;
        Ok(Self { config, hash: sha256_hex(text.as_bytes()) })
    }

    pub fn load(path: &Path) -> AppResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| AppError::ConfigRead { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    /// Defaults, hashed through their TOML rendering.
    pub fn defaults() -> Self {
        let config = Config::default();
        let text = toml::to_string(&config).unwrap_or_default();
        Self { config, hash: sha256_hex(text.as_bytes()) }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Config {
    /// Checks that cannot be expressed in the serde schema.
    pub fn check(&self) -> AppResult<()> {
        let bad = |msg: &str| Err(AppError::Config(msg.to_string()));
        let v = &self.verify;
        if v.n.contains(&0) || v.c.contains(&0) {
            return bad("verify.n and verify.c entries must be positive");
        }
        if v.m_ratio.iter().chain(&v.mutation_hats).any(|x| !(x.is_finite() && *x > 0.0)) {
            return bad("verify.m_ratio and verify.mutation_hats entries must be positive");
        }
        if v.beta_h.iter().any(|h| h.m != 0 || h.n == 0) {
            return bad("verify.beta_h entries must be powers x^k with k >= 1");
        }
        let s = &self.scaling;
        if s.n_grid.windows(2).any(|w| w[0] >= w[1]) || s.n_grid.contains(&0) {
            return bad("scaling.n_grid must be positive and strictly increasing");
        }
        if s.exact_n_grid.contains(&0) {
            return bad("scaling.exact_n_grid entries must be positive");
        }
        if s.eps.iter().any(|e| !(0.0..=1.0).contains(e)) {
            return bad("scaling.eps entries must lie in [0, 1]");
        }
        if s.beta_h.m != 0 || s.beta_h.n == 0 {
            return bad("scaling.beta_h must be a power x^k with k >= 1");
        }
        if !(s.slope_tol > 0.0) {
            return bad("scaling.slope_tol must be positive");
        }
        let x = &self.crosscheck;
        if x.dual_reps < 10_000 {
            return bad("crosscheck.dual_reps must be at least 10000");
        }
        if !(x.z_max > 0.0) || !(x.quad_rel_tol > 0.0) {
            return bad("crosscheck.z_max and crosscheck.quad_rel_tol must be positive");
        }
        if x.chain_thin == 0 || x.chain_samples < 2 {
            return bad("crosscheck.chain_thin must be positive and chain_samples at least 2");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let loaded = LoadedConfig::parse("").unwrap();
        assert_eq!(loaded.config, Config::default());
        assert_eq!(loaded.hash.len(), 64);
    }

    #[test]
    fn sections_parse() {
        let text = r#"
seed = 7
[verify]
kinds = ["wf"]
n = [30]
ti_h = ["x^2*y", "xy"]

[[verify.points]]
kind = "seedbank"
N = 10
M = 3
c = 1
p1 = 0.1
p2 = 0.1
"#;
        let cfg = LoadedConfig::parse(text).unwrap().config;
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.verify.ti_h, vec![Monomial::new(2, 1), Monomial::new(1, 1)]);
        assert_eq!(cfg.verify.points[0].m, 3);
        assert_eq!(cfg.verify.c, VerifyConfig::default().c);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(LoadedConfig::parse("sed = 1").is_err());
        assert!(LoadedConfig::parse("[scaling]\nn_grid = [10, 5]").is_err());
        assert!(LoadedConfig::parse("[verify]\nbeta_h = [\"xy\"]").is_err());
    }
}
