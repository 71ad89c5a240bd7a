use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use tiwf::config::{KindArg, LoadedConfig};
use tiwf::crosscheck::run_crosscheck;
use tiwf::inspect::{factor_rows, moment_rows, write_factors, write_moments};
use tiwf::report::{write_csv, write_json, Provenance};
use tiwf::scaling::run_scaling;
use tiwf::verify::run_verify;
use tiwf::{AppError, AppResult, EXIT_CHECK_FAILED, EXIT_USAGE};
use tiwf_core::ti::map_chain_to_ti;
use tiwf_core::{ChainParams, TIParams};

/// Exact moments, diffusion approximations and explicit bounds for the
/// two-island Wright-Fisher and seed-bank chains.
#[derive(Parser)]
#[command(name = "tiwf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact distance against bound over a parameter grid.
    Verify(RunArgs),
    /// Distances, bounds and log-log slopes along N -> infinity.
    Scaling(RunArgs),
    /// Dual, urn, chain and enumeration cross-checks.
    Crosscheck(RunArgs),
    /// Print the Stein factors for x^n y^m.
    Factors(FactorsArgs),
    /// Print exact chain, diffusion and Beta moments.
    Moments(MomentsArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML config; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ChainArgs {
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    /// Island-1 size N.
    #[arg(long = "pop1")]
    pop1: Option<u64>,
    /// Island-2 (or seed-bank) size M.
    #[arg(long = "pop2")]
    pop2: Option<u64>,
    /// Migrants per generation c.
    #[arg(long)]
    migrants: Option<u64>,
    #[arg(long)]
    p1: Option<f64>,
    #[arg(long)]
    p2: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    q1: f64,
    #[arg(long, default_value_t = 0.0)]
    q2: f64,
}

impl ChainArgs {
    fn params(&self) -> AppResult<ChainParams> {
        let missing = |name: &str| AppError::Config(format!("missing --{name}"));
        let kind = self.kind.ok_or_else(|| missing("kind"))?;
        let n = self.pop1.ok_or_else(|| missing("pop1"))?;
        let m = self.pop2.ok_or_else(|| missing("pop2"))?;
        let c = self.migrants.ok_or_else(|| missing("migrants"))?;
        let p1 = self.p1.ok_or_else(|| missing("p1"))?;
        let p2 = self.p2.ok_or_else(|| missing("p2"))?;
        let p = match kind {
            KindArg::Wf => ChainParams::wf(n, m, c, p1, p2, self.q1, self.q2),
            KindArg::Seedbank => ChainParams::seed_bank(n, m, c, p1, p2),
        };
        if kind == KindArg::Seedbank && (self.q1 != 0.0 || self.q2 != 0.0) {
            return Err(tiwf_core::Error::KindMismatch.into());
        }
        Ok(p.validate()?)
    }
}

#[derive(Args)]
struct FactorsArgs {
    /// Exponents n,m of the test function x^n y^m.
    #[arg(long, value_delimiter = ',', default_values_t = [1u64, 0])]
    exponents: Vec<u64>,
    /// Diffusion parameters a1,a2,b1,b2,c1,c2,alpha,beta; otherwise mapped
    /// from the chain options.
    #[arg(long, value_delimiter = ',')]
    ti: Option<Vec<f64>>,
    #[command(flatten)]
    chain: ChainArgs,
}

#[derive(Args)]
struct MomentsArgs {
    #[arg(long, default_value_t = 4)]
    degree: usize,
    #[command(flatten)]
    chain: ChainArgs,
}

fn load(args: &RunArgs) -> AppResult<LoadedConfig> {
    let mut loaded = match &args.config {
        Some(path) => LoadedConfig::load(path)?,
        None => LoadedConfig::defaults(),
    };
    if let Some(out) = &args.out {
        loaded.config.output.dir = out.clone();
    }
    if let Some(seed) = args.seed {
        loaded.config.seed = seed;
    }
    Ok(loaded)
}

fn status(pass: bool) -> i32 {
    if pass {
        0
    } else {
        EXIT_CHECK_FAILED
    }
}

fn run(cli: Cli) -> AppResult<i32> {
    let started = Instant::now();
    let code = match cli.command {
        Command::Verify(args) => {
            let loaded = load(&args)?;
            let cfg = &loaded.config;
            let out = run_verify(&cfg.verify, Provenance::new(&loaded.hash, cfg.seed));
            write_csv(&cfg.output.dir.join("verify.csv"), &out.records, &out.summary.provenance)?;
            write_json(&cfg.output.dir.join("verify.json"), &out.summary)?;
            let c = out.summary.counts;
            println!(
                "verify: {} records, {} checked, {} violations, {} vacuous, {} errors",
                c.records, c.checked, c.violations, c.vacuous, c.errors
            );
            status(out.summary.pass)
        }
        Command::Scaling(args) => {
            let loaded = load(&args)?;
            let cfg = &loaded.config;
            let out = run_scaling(&cfg.scaling, Provenance::new(&loaded.hash, cfg.seed));
            write_csv(&cfg.output.dir.join("scaling.csv"), &out.records, &out.summary.provenance)?;
            write_json(&cfg.output.dir.join("scaling.json"), &out.summary)?;
            for f in out.summary.fits.iter().filter(|f| f.quantity == "bound") {
                println!(
                    "scaling: {} eps={} {} h={} slope={} expected={} ok={}",
                    f.kind,
                    f.eps,
                    f.target,
                    f.h,
                    f.slope.map_or("-".into(), |s| format!("{s:.4}")),
                    f.expected.map_or("-".into(), |s| format!("{s:.4}")),
                    f.within_tol.map_or("-".into(), |b| b.to_string()),
                );
            }
            println!("scaling: dominance={} slopes_ok={}", out.summary.dominance, out.summary.slopes_ok);
            status(out.summary.pass)
        }
        Command::Crosscheck(args) => {
            let loaded = load(&args)?;
            let cfg = &loaded.config;
            let out = run_crosscheck(&cfg.crosscheck, Provenance::new(&loaded.hash, cfg.seed))?;
            write_json(&cfg.output.dir.join("crosscheck.json"), &out)?;
            println!(
                "crosscheck: max |z| dual {:.3}, chain {:.3}; max quadrature rel err {:.3e}; pass {}",
                out.max_abs_z_dual, out.max_abs_z_chain, out.max_quad_rel_err, out.pass
            );
            status(out.pass)
        }
        Command::Factors(args) => {
            let [n, m] = args.exponents[..] else {
                return Err(AppError::Config("--exponents takes two values n,m".into()));
            };
            let (ti, lambda) = match &args.ti {
                Some(v) if v.len() != 8 => {
                    return Err(AppError::Config("--ti takes eight values a1,a2,b1,b2,c1,c2,alpha,beta".into()));
                }
                Some(v) => (
                    TIParams { a1: v[0], a2: v[1], b1: v[2], b2: v[3], c1: v[4], c2: v[5], alpha: v[6], beta: v[7] }
                        .validate()?,
                    None,
                ),
                None => {
                    let (ti, l) = map_chain_to_ti(&args.chain.params()?);
                    (ti, Some(l))
                }
            };
            let rows = factor_rows(n, m, &ti, lambda)?;
            write_factors(&mut std::io::stdout().lock(), n, m, &rows)?;
            0
        }
        Command::Moments(args) => {
            let p = args.chain.params()?;
            let rows = moment_rows(&p, args.degree)?;
            write_moments(&mut std::io::stdout().lock(), &p, &rows)?;
            0
        }
    };
    eprintln!("elapsed: {:.3} s", started.elapsed().as_secs_f64());
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => {
            let _ = std::io::stdout().flush();
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
