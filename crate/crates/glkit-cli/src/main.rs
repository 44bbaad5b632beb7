//! `verify`: command-line front end for the glkit verification suites.

mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::mpsc;
use std::time::Duration;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use glkit::counting::SweepSpec;
use glkit::eisenstein::{parse_tgrid, EisensteinConfig};
use glkit::hecke::Pair;
use glkit::report::{merge, Check, Format, Report};
use glkit::suites::{self, CountingParams, HeckeParams};
use glkit::AlgebraError;

use config::Config;

const DEFAULT_SEED: u64 = 7;

#[derive(Parser)]
#[command(name = "verify", version, about = "Run glkit verification suites and emit versioned reports")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML configuration file; defaults to the file named by GLKIT_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every randomized check.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output format: json, csv or text.
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Grade soft checks as hard.
    #[arg(long, global = true)]
    strict_soft: bool,
    /// Wall-clock budget in seconds.
    #[arg(long, global = true)]
    budget_secs: Option<f64>,
    /// Omit timing fields so reruns are byte-identical.
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Capelli determinant, Harish-Chandra image and cofactor identities.
    Capelli {
        #[arg(long)]
        n: Option<usize>,
        /// Also run centrality and the HC identity one rank higher.
        #[arg(long)]
        extended: bool,
    },
    /// Random trials of the τ(ψ, λ) construction.
    Tau {
        #[arg(long)]
        cases: Option<usize>,
        #[arg(long)]
        nmax: Option<usize>,
    },
    /// Star-product coefficients, support conditions and the Gutt identity.
    Star {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        pairs: Option<usize>,
    },
    /// Whittaker, Satake and basic-vector identities.
    Whittaker {
        #[arg(long)]
        n: Option<usize>,
        /// A prime, or `formal`.
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        deg: Option<usize>,
    },
    /// Hecke operators, the tempered inequality and restricted main terms.
    Hecke {
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, value_parser = clap::value_parser!(i64).range(1..=2))]
        j: Option<i64>,
        /// gl2-gl1 or gl3-gl2.
        #[arg(long)]
        pair: Option<String>,
        /// Largest prime in the main-term sweep.
        #[arg(long)]
        bound: Option<u64>,
        /// Constant the main-term ratios must stay under.
        #[arg(long)]
        ratio_bound: Option<f64>,
    },
    /// Matrix-counting bounds and the combinatorial lemmas.
    Counting {
        #[arg(long)]
        pair: Option<String>,
        /// TOML sweep description.
        #[arg(long)]
        sweep: Option<PathBuf>,
        #[arg(long)]
        lemma_cases: Option<usize>,
    },
    /// SL(2) Eisenstein wave-packet growth experiment.
    Eisenstein {
        #[arg(long = "T")]
        t: Option<u64>,
        /// `a:b:n` (geometric), a comma list, or `auto`.
        #[arg(long)]
        tgrid: Option<String>,
        /// Fourier truncation.
        #[arg(long = "L")]
        l: Option<i64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Subconvexity exponent table and identities.
    Exponents {
        #[arg(long)]
        nmax: Option<i64>,
    },
    /// Combine JSON reports.
    Report {
        #[arg(long, num_args = 1.., required = true)]
        merge: Vec<PathBuf>,
    },
}

/// A failure that maps to the usage exit status.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(Usage(msg.into()))
}

fn algebra(e: AlgebraError) -> anyhow::Error {
    match e {
        AlgebraError::Precondition(m) => usage(m),
        other => anyhow!(other),
    }
}

type Job = Box<dyn FnOnce() -> Result<Report> + Send>;

struct Plan {
    suite: &'static str,
    seed: Option<u64>,
    default_format: Format,
    job: Job,
}

fn plan(command: Command, cfg: &Config, seed: u64) -> Result<Plan> {
    let p = match command {
        Command::Capelli { n, extended } => {
            let n = n.or(cfg.capelli.n).unwrap_or(3);
            let extended = extended || cfg.capelli.extended.unwrap_or(false);
            if n == 0 {
                return Err(usage("--n must be positive"));
            }
            Plan { suite: "capelli", seed: None, default_format: Format::Json, job: Box::new(move || Ok(suites::capelli(n, extended))) }
        }
        Command::Tau { cases, nmax } => {
            let cases = cases.or(cfg.tau.cases).unwrap_or(100);
            let nmax = nmax.or(cfg.tau.nmax).unwrap_or(5);
            Plan {
                suite: "tau",
                seed: Some(seed),
                default_format: Format::Json,
                job: Box::new(move || suites::tau(cases, nmax, seed).map_err(algebra)),
            }
        }
        Command::Star { n, order, pairs } => {
            let n = n.or(cfg.star.n).unwrap_or(2);
            let order = order.or(cfg.star.order).unwrap_or(if n >= 3 { 3 } else { 4 });
            let pairs = pairs.or(cfg.star.pairs).unwrap_or(50);
            Plan {
                suite: "star",
                seed: Some(seed),
                default_format: Format::Json,
                job: Box::new(move || suites::star(n, order, pairs, seed).map_err(algebra)),
            }
        }
        Command::Whittaker { n, q, deg } => {
            let n = n.or(cfg.whittaker.n).unwrap_or(2);
            let q = q.or_else(|| cfg.whittaker.q.clone()).unwrap_or_else(|| "formal".into());
            let q = match q.as_str() {
                "formal" => None,
                s => Some(s.parse::<u64>().map_err(|_| usage(format!("--q must be a prime or `formal`, got {s}")))?),
            };
            let deg = deg.or(cfg.whittaker.deg).unwrap_or(if n >= 3 { 8 } else { 12 });
            Plan { suite: "whittaker", seed: Some(seed), default_format: Format::Json, job: Box::new(move || Ok(suites::whittaker(n, q, deg, seed))) }
        }
        Command::Hecke { p, j, pair, bound, ratio_bound } => {
            let h = &cfg.hecke;
            let j = j.or(h.j).unwrap_or(1);
            if !(1..=2).contains(&j) {
                return Err(usage("j must be 1 or 2"));
            }
            let pair: Pair = pair.or_else(|| h.pair.clone()).unwrap_or_else(|| "gl2-gl1".into()).parse().map_err(algebra)?;
            let params = HeckeParams {
                p: p.or(h.p).unwrap_or(2),
                j,
                pair,
                bound: bound.or(h.bound).unwrap_or(50),
                ratio_bound: ratio_bound.or(h.ratio_bound),
            };
            Plan { suite: "hecke", seed: Some(seed), default_format: Format::Csv, job: Box::new(move || suites::hecke(&params, seed).map_err(algebra)) }
        }
        Command::Counting { pair, sweep, lemma_cases } => {
            let c = &cfg.counting;
            let mut params = CountingParams::standard();
            if let Some(path) = sweep.or_else(|| c.sweep.as_ref().map(PathBuf::from)) {
                params.sweep = read_sweep(&path)?;
            }
            if let Some(pair) = pair.or_else(|| c.pair.clone()) {
                params.sweep.pair = pair;
            }
            params.sweep.pair.parse::<Pair>().map_err(algebra)?;
            params.lemma_cases = lemma_cases.or(c.lemma_cases).unwrap_or(params.lemma_cases);
            params.max_len = c.max_len.unwrap_or(params.max_len);
            params.distance_samples = c.distance_samples.unwrap_or(params.distance_samples);
            Plan { suite: "counting", seed: Some(seed), default_format: Format::Csv, job: Box::new(move || suites::counting(&params, seed).map_err(algebra)) }
        }
        Command::Eisenstein { t, tgrid, l, samples } => {
            let e = &cfg.eisenstein;
            let t = t.or(e.t).unwrap_or(64);
            if t < 4 {
                return Err(usage("--T must be at least 4"));
            }
            let mut conf = EisensteinConfig::new(t as f64);
            conf.seed = seed;
            conf.tgrid = parse_tgrid(tgrid.as_deref().or(e.tgrid.as_deref()).unwrap_or("auto"), t as f64).map_err(algebra)?;
            if let Some(l) = l.or(e.l) {
                if l < 1 {
                    return Err(usage("--L must be positive"));
                }
                conf.truncation = l;
            }
            conf.samples = samples.or(e.samples).unwrap_or(conf.samples);
            Plan { suite: "eisenstein", seed: Some(seed), default_format: Format::Csv, job: Box::new(move || suites::eisenstein(&conf).map_err(algebra)) }
        }
        Command::Exponents { nmax } => {
            let nmax = nmax.or(cfg.exponents.nmax).unwrap_or(50);
            if nmax < 1 {
                return Err(usage("--nmax must be positive"));
            }
            Plan { suite: "exponents", seed: None, default_format: Format::Csv, job: Box::new(move || Ok(suites::exponents(nmax))) }
        }
        Command::Report { .. } => unreachable!("handled before planning"),
    };
    Ok(p)
}

fn read_sweep(path: &Path) -> Result<SweepSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("reading sweep {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| usage(format!("parsing sweep {}: {e}", path.display())))
}

fn run_with_budget(plan: Plan, budget: Option<f64>) -> Result<Report> {
    let Plan { suite, seed, job, .. } = plan;
    let Some(secs) = budget else { return job() };
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        let _ = tx.send(job());
    });
    match rx.recv_timeout(Duration::from_secs_f64(secs.max(0.0))) {
        Ok(result) => result,
        Err(mpsc::RecvTimeoutError::Timeout) => {
            let mut r = Report::new(suite, seed);
            r.push(Check::budget_exceeded(suite, secs));
            Ok(r)
        }
        Err(mpsc::RecvTimeoutError::Disconnected) => Err(anyhow!("suite {suite} panicked")),
    }
}

fn write_out(path: Option<&Path>, body: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    let cfg = Config::load(cli.common.config.as_deref()).map_err(|e| usage(format!("{e:#}")))?;
    let config_format = cfg.format.as_deref().map(str::parse::<Format>).transpose().map_err(usage)?;
    let format = cli.common.format.or(config_format);
    let timing = !cli.common.no_timing && cfg.timing.unwrap_or(true);

    if let Command::Report { merge: files } = &cli.command {
        let mut reports = Vec::new();
        for f in files {
            let text = std::fs::read_to_string(f).map_err(|e| usage(format!("reading {}: {e}", f.display())))?;
            let mut r: Report = serde_json::from_str(&text).map_err(|e| usage(format!("{} is not a JSON report: {e}", f.display())))?;
            if !timing {
                r.strip_timing();
            }
            reports.push(r);
        }
        let merged = merge(reports).map_err(usage)?;
        write_out(cli.common.output.as_deref(), &merged.emit(format.unwrap_or(Format::Json)))?;
        return Ok(merged.exit_code());
    }

    let seed = cli.common.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let budget = cli.common.budget_secs.or(cfg.budget_secs);
    let plan = plan(cli.command, &cfg, seed)?;
    let format = format.unwrap_or(plan.default_format);
    let mut report = run_with_budget(plan, budget)?;
    report.apply_tolerances(&cfg.tolerances);
    if cli.common.strict_soft || cfg.strict_soft.unwrap_or(false) {
        report.harden();
    }
    if !timing {
        report.strip_timing();
    }
    report.finish();
    write_out(cli.common.output.as_deref(), &report.emit(format))?;
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("verify: {e:#}");
            ExitCode::from(if e.downcast_ref::<Usage>().is_some() { 2 } else { 1 })
        }
    }
}
