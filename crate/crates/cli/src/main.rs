//! `covert`: capacity evaluation, region sweeps and Monte Carlo experiments.

mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use config::Settings;
use covert_core::channels::{trial_rng, BitVector};
use covert_core::codec::Codebook;
use covert_core::harness::{self, DetectorSpec, ExperimentConfig, JammerSpec, Scheme, SweepAxis};
use covert_core::specmath::{
    bac_capacity, code_weight_param, covert_capacity, mi_bob, small_key_boundary, ChannelSpec,
    CovertParams, KeyGrowth, KeyRegime,
};
use covert_core::Execution;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "covert", version, about = "Covert communication over a jammed binary channel")]
struct Cli {
    /// Flat `key = value` settings file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct ChannelArgs {
    /// Jamming budget fraction.
    #[arg(long)]
    p: Option<f64>,
    /// Eavesdropper crossover probability.
    #[arg(long)]
    q: Option<f64>,
    /// Blocklength.
    #[arg(long)]
    n: Option<u64>,
    /// Covertness tolerance.
    #[arg(long)]
    eps_d: Option<f64>,
    /// small | large | moderate:<sigma> | exact:<bits>[:log|:sqrt:<sigma>|:super]
    #[arg(long)]
    regime: Option<String>,
}

impl ChannelArgs {
    fn apply(&self, s: &mut Settings) {
        s.apply("p", &self.p);
        s.apply("q", &self.q);
        s.apply("n", &self.n);
        s.apply("eps_d", &self.eps_d);
        s.apply("regime", &self.regime);
    }
}

const CHANNEL_KEYS: [&str; 5] = ["p", "q", "n", "eps_d", "regime"];

#[derive(Args, Default)]
struct RateArgs {
    /// Message bits per √n; overrides `rate_fraction`.
    #[arg(long)]
    r: Option<f64>,
    /// Rate as a fraction of the scheme's reference rate.
    #[arg(long)]
    rate_fraction: Option<f64>,
}

impl RateArgs {
    fn apply(&self, s: &mut Settings) {
        s.apply("r", &self.r);
        s.apply("rate_fraction", &self.rate_fraction);
    }
}

#[derive(Subcommand)]
enum Command {
    /// Capacity quantities at one point (JSON).
    Capacity {
        #[command(flatten)]
        channel: ChannelArgs,
    },
    /// Region membership over a (p, q) grid (CSV).
    Region {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Grid spacing in (0, 1/2).
        #[arg(long)]
        step: Option<f64>,
        /// Comma-separated key regimes.
        #[arg(long)]
        regimes: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rate curves along one axis (CSV).
    Curves {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Varied parameter: p or q.
        #[arg(long)]
        axis: Option<String>,
        /// Value of the other parameter.
        #[arg(long)]
        fixed: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        /// Comma-separated covertness tolerances.
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        regimes: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reliability and covertness Monte Carlo (JSON).
    Simulate {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        rate: RateArgs,
        #[arg(long)]
        seed: u64,
        /// random | efficient
        #[arg(long)]
        scheme: Option<String>,
        /// none | myopic | oblivious
        #[arg(long)]
        jammer: Option<String>,
        /// Myopic slack; defaults to n^(-1/3).
        #[arg(long)]
        nu: Option<f64>,
        /// weight | lr
        #[arg(long)]
        detector: Option<String>,
        /// Weight-detector threshold constant.
        #[arg(long)]
        c_t: Option<f64>,
        /// Trials per arm.
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        book_seed: Option<u64>,
        /// Eavesdropper crossover when it differs from q.
        #[arg(long)]
        james_noise: Option<f64>,
        #[arg(long)]
        tv_samples: Option<u64>,
        #[arg(long)]
        scan_cap: Option<u64>,
        /// parallel | sequential
        #[arg(long)]
        execution: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Oblivious spoofing attack on the random-code scheme (JSON).
    Attack {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        rate: RateArgs,
        #[arg(long)]
        seed: u64,
        /// Shared key length; sets the regime to an exact key of this many bits.
        #[arg(long)]
        key_bits: Option<u32>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        book_seed: Option<u64>,
        #[arg(long)]
        scan_cap: Option<u64>,
        #[arg(long)]
        execution: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Total variation between silent and active outputs (JSON).
    Tv {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        rate: RateArgs,
        /// exact | mc | ensemble | scheme
        #[arg(long)]
        route: Option<String>,
        /// Words in the random book (exact, mc).
        #[arg(long)]
        words: Option<u64>,
        /// Codeword density (exact, mc, ensemble).
        #[arg(long)]
        rho: Option<f64>,
        /// log2 of the book size (ensemble).
        #[arg(long)]
        log2_size: Option<f64>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        book_seed: Option<u64>,
        #[arg(long)]
        execution: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

type CliResult<T> = Result<T, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn channel(s: &Settings) -> CliResult<ChannelSpec> {
    ChannelSpec::new(s.get_or("p", 0.05)?, s.get_or("q", 0.25)?).map_err(err)
}

fn regime(s: &Settings) -> CliResult<KeyRegime> {
    s.get_or::<String>("regime", "small".into())?.parse().map_err(err)
}

fn execution(s: &Settings) -> CliResult<Execution> {
    match s.get_or::<String>("execution", "parallel".into())?.as_str() {
        "parallel" => Ok(Execution::Parallel),
        "sequential" => Ok(Execution::Sequential),
        other => Err(format!("unknown execution mode `{other}`")),
    }
}

fn scheme(s: &Settings) -> CliResult<Scheme> {
    match s.get_or::<String>("scheme", "random".into())?.as_str() {
        "random" => Ok(Scheme::RandomCode),
        "efficient" => Ok(Scheme::Efficient),
        other => Err(format!("unknown scheme `{other}`")),
    }
}

/// Explicit `r`, else `rate_fraction` times the scheme's reference rate:
/// `t·I_B` for the random code, `(t/ρ*)·C_BAC` for the efficient one.
fn rate(s: &Settings, spec: &ChannelSpec, eps_d: f64, scheme: Scheme) -> CliResult<f64> {
    if let Some(r) = s.get::<f64>("r")? {
        return Ok(r);
    }
    let t = code_weight_param(spec.q, eps_d).map_err(err)?;
    match scheme {
        Scheme::RandomCode => {
            let frac = s.get_or("rate_fraction", 0.5)?;
            Ok(frac * t * mi_bob(spec.p, spec.q).map_err(err)?)
        }
        Scheme::Efficient => {
            let frac = s.get_or("rate_fraction", 0.6)?;
            let (c, rho) = bac_capacity(spec.p, spec.q).map_err(err)?;
            Ok(frac * t / rho * c)
        }
    }
}

fn params(s: &Settings, spec: &ChannelSpec, scheme: Scheme, default_n: u64) -> CliResult<CovertParams> {
    let eps_d = s.get_or("eps_d", 0.5)?;
    let r = rate(s, spec, eps_d, scheme)?;
    CovertParams::new(s.get_or("n", default_n)?, eps_d, regime(s)?, r).map_err(err)
}

fn emit(out: Option<&PathBuf>, write: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> CliResult<()> {
    match out {
        Some(path) => {
            let mut f = std::io::BufWriter::new(std::fs::File::create(path).map_err(|e| format!("{}: {e}", path.display()))?);
            write(&mut f).and_then(|_| f.flush()).map_err(err)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            match write(&mut lock) {
                // a closed pipe (`covert region | head`) is not a failure
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => other.map_err(err),
            }
        }
    }
}

fn emit_json<T: Serialize>(out: Option<&PathBuf>, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(err)?;
    emit(out, |w| writeln!(w, "{text}"))
}

#[derive(Serialize)]
struct CapacityOutput {
    p: f64,
    q: f64,
    n: u64,
    eps_d: f64,
    regime: &'static str,
    t: f64,
    i_b: Option<f64>,
    i_j: f64,
    r_star: f64,
    in_region: bool,
    bac_capacity: Option<f64>,
    rho_star: Option<f64>,
    small_key_boundary: Option<f64>,
}

#[derive(Serialize)]
struct TvOutput {
    route: String,
    n: usize,
    q: f64,
    rho: f64,
    log2_size: f64,
    exact: Option<f64>,
    estimate: Option<harness::TvEstimate>,
}

fn run(cli: Cli) -> CliResult<()> {
    let mut s = Settings::load(cli.config.as_deref())?;
    match cli.command {
        Command::Capacity { channel: ch } => {
            ch.apply(&mut s);
            s.check_keys(&CHANNEL_KEYS)?;
            let spec = channel(&s)?;
            let eps_d = s.get_or("eps_d", 0.5)?;
            let params = CovertParams::new(s.get_or("n", 10_000)?, eps_d, regime(&s)?, 0.0).map_err(err)?;
            let rep = covert_capacity(&spec, &params);
            let bac = bac_capacity(spec.p, spec.q).ok();
            emit_json(
                None,
                &CapacityOutput {
                    p: spec.p,
                    q: spec.q,
                    n: params.n,
                    eps_d,
                    regime: params.regime.name(),
                    t: rep.t,
                    i_b: rep.i_b,
                    i_j: rep.i_j,
                    r_star: rep.r_star,
                    in_region: rep.in_region,
                    bac_capacity: bac.map(|b| b.0),
                    rho_star: bac.map(|b| b.1),
                    small_key_boundary: small_key_boundary(spec.q),
                },
            )
        }
        Command::Region { channel: ch, step, regimes, out } => {
            ch.apply(&mut s);
            s.apply("step", &step);
            s.apply("regimes", &regimes);
            s.check_keys(&["n", "eps_d", "step", "regimes"])?;
            let grid = harness::grid(s.get_or("step", 0.0125)?);
            let regimes: Vec<KeyRegime> = s.list("regimes", "small,moderate:0.5,large")?;
            let rows = harness::sweep_region(&grid, &grid, s.get_or("n", 10_000)?, s.get_or("eps_d", 0.1)?, &regimes)
                .map_err(err)?;
            emit(out.as_ref(), |w| harness::write_csv(&rows, w))
        }
        Command::Curves { channel: ch, axis, fixed, step, eps, regimes, out } => {
            ch.apply(&mut s);
            s.apply("axis", &axis);
            s.apply("fixed", &fixed);
            s.apply("step", &step);
            s.apply("eps", &eps);
            s.apply("regimes", &regimes);
            s.check_keys(&["n", "axis", "fixed", "step", "eps", "regimes"])?;
            let fixed = s.get_or("fixed", 0.25)?;
            let axis = match s.get_or::<String>("axis", "p".into())?.as_str() {
                "p" => SweepAxis::P { q: fixed },
                "q" => SweepAxis::Q { p: fixed },
                other => return Err(format!("unknown axis `{other}`; expected p or q")),
            };
            let values = harness::grid(s.get_or("step", 0.005)?);
            let eps: Vec<f64> = s.list("eps", "0.05,0.1,0.3,0.5")?;
            let regimes: Vec<KeyRegime> = s.list("regimes", "small,large")?;
            let rows = harness::sweep_capacity(axis, &values, s.get_or("n", 10_000)?, &eps, &regimes).map_err(err)?;
            emit(out.as_ref(), |w| harness::write_csv(&rows, w))
        }
        Command::Simulate {
            channel: ch,
            rate: rt,
            seed,
            scheme: sch,
            jammer,
            nu,
            detector,
            c_t,
            trials,
            book_seed,
            james_noise,
            tv_samples,
            scan_cap,
            execution: exe,
            out,
        } => {
            ch.apply(&mut s);
            rt.apply(&mut s);
            s.apply("seed", &Some(seed));
            s.apply("scheme", &sch);
            s.apply("jammer", &jammer);
            s.apply("nu", &nu);
            s.apply("detector", &detector);
            s.apply("c_t", &c_t);
            s.apply("trials", &trials);
            s.apply("book_seed", &book_seed);
            s.apply("james_noise", &james_noise);
            s.apply("tv_samples", &tv_samples);
            s.apply("scan_cap", &scan_cap);
            s.apply("execution", &exe);
            let mut keys = CHANNEL_KEYS.to_vec();
            keys.extend([
                "r", "rate_fraction", "seed", "scheme", "jammer", "nu", "detector", "c_t", "trials", "book_seed",
                "james_noise", "tv_samples", "scan_cap", "execution",
            ]);
            s.check_keys(&keys)?;
            let spec = channel(&s)?;
            let scheme = scheme(&s)?;
            let mut cfg = ExperimentConfig::new(spec, params(&s, &spec, scheme, 2500)?, s.require("seed")?);
            cfg.scheme = scheme;
            cfg.jammer = match s.get_or::<String>("jammer", "myopic".into())?.as_str() {
                "none" => JammerSpec::None,
                "myopic" => JammerSpec::Myopic { nu: s.get("nu")? },
                "oblivious" => JammerSpec::Oblivious,
                other => return Err(format!("unknown jammer `{other}`")),
            };
            cfg.detector = match s.get_or::<String>("detector", "weight".into())?.as_str() {
                "weight" => DetectorSpec::Weight { c_t: s.get("c_t")? },
                "lr" => DetectorSpec::LikelihoodRatio,
                other => return Err(format!("unknown detector `{other}`")),
            };
            cfg.trials = s.get_or("trials", cfg.trials)?;
            cfg.book_seed = s.get("book_seed")?;
            cfg.james_noise = s.get("james_noise")?;
            cfg.tv_samples = s.get_or("tv_samples", 0)?;
            cfg.scan_cap = s.get_or("scan_cap", cfg.scan_cap)?;
            cfg.execution = execution(&s)?;
            let report = harness::run_reliability(&cfg).map_err(err)?;
            emit_json(out.as_ref(), &report)
        }
        Command::Attack {
            channel: ch,
            rate: rt,
            seed,
            key_bits,
            trials,
            book_seed,
            scan_cap,
            execution: exe,
            out,
        } => {
            ch.apply(&mut s);
            rt.apply(&mut s);
            s.apply("seed", &Some(seed));
            s.apply("key_bits", &key_bits);
            s.apply("trials", &trials);
            s.apply("book_seed", &book_seed);
            s.apply("scan_cap", &scan_cap);
            s.apply("execution", &exe);
            let mut keys = CHANNEL_KEYS.to_vec();
            keys.extend(["r", "rate_fraction", "seed", "key_bits", "trials", "book_seed", "scan_cap", "execution"]);
            s.check_keys(&keys)?;
            let spec = channel(&s)?;
            let mut params = params(&s, &spec, Scheme::RandomCode, 2500)?;
            if let Some(bits) = s.get::<u32>("key_bits")? {
                if s.has("regime") {
                    return Err("set either key_bits or regime, not both".into());
                }
                params.regime = KeyRegime::Exact {
                    bits,
                    growth: KeyGrowth::Logarithmic,
                };
            }
            let mut cfg = ExperimentConfig::new(spec, params, s.require("seed")?);
            cfg.trials = s.get_or("trials", cfg.trials)?;
            cfg.book_seed = s.get("book_seed")?;
            cfg.scan_cap = s.get_or("scan_cap", cfg.scan_cap)?;
            cfg.execution = execution(&s)?;
            let report = harness::run_attack(&cfg).map_err(err)?;
            emit_json(out.as_ref(), &report)
        }
        Command::Tv {
            channel: ch,
            rate: rt,
            route,
            words,
            rho,
            log2_size,
            samples,
            seed,
            book_seed,
            execution: exe,
            out,
        } => {
            ch.apply(&mut s);
            rt.apply(&mut s);
            s.apply("route", &route);
            s.apply("words", &words);
            s.apply("rho", &rho);
            s.apply("log2_size", &log2_size);
            s.apply("samples", &samples);
            s.apply("seed", &seed);
            s.apply("book_seed", &book_seed);
            s.apply("execution", &exe);
            let mut keys = CHANNEL_KEYS.to_vec();
            keys.extend([
                "r", "rate_fraction", "route", "words", "rho", "log2_size", "samples", "seed", "book_seed", "execution",
            ]);
            s.check_keys(&keys)?;
            let mode = execution(&s)?;
            let seed = s.get_or("seed", 0u64)?;
            let samples = s.get_or("samples", 10_000u64)?;
            let q = s.get_or("q", 0.25)?;
            let route = s.get_or::<String>("route", "exact".into())?;
            let output = match route.as_str() {
                "exact" | "mc" => {
                    let n: usize = s.get_or("n", 12)?;
                    let rho = s.get_or("rho", 0.1)?;
                    let count = s.get_or("words", 16u64)?;
                    let mut rng = trial_rng(s.get_or("book_seed", seed)?, 0);
                    let words = (0..count).map(|_| BitVector::bernoulli(n, rho, &mut rng)).collect();
                    let book = Codebook::from_words(words).map_err(err)?;
                    let exact = harness::exact_tv(&book, q, mode).map_err(err)?;
                    let estimate = if route == "mc" {
                        Some(harness::mc_tv(&book, q, samples, seed, mode).map_err(err)?)
                    } else {
                        None
                    };
                    TvOutput {
                        route,
                        n,
                        q,
                        rho: book.rho,
                        log2_size: (count as f64).log2(),
                        exact: Some(exact),
                        estimate,
                    }
                }
                "ensemble" => {
                    let n: usize = s.get_or("n", 1000)?;
                    let rho = s.require("rho")?;
                    let log2_size = s.require("log2_size")?;
                    let est = harness::mc_tv_ensemble(n, rho, log2_size, q, samples, seed, mode).map_err(err)?;
                    TvOutput {
                        route,
                        n,
                        q,
                        rho,
                        log2_size,
                        exact: None,
                        estimate: Some(est),
                    }
                }
                "scheme" => {
                    let spec = channel(&s)?;
                    let params = params(&s, &spec, Scheme::RandomCode, 1000)?;
                    let book = covert_core::codec::scheme_book(&spec, &params, s.get_or("book_seed", seed)?)
                        .map_err(err)?;
                    let layout = covert_core::codec::KeyLayout::for_params(&params, book.message_bits()).map_err(err)?;
                    let mut cfg = ExperimentConfig::new(spec, params, seed);
                    cfg.tv_samples = samples;
                    cfg.execution = mode;
                    cfg.book_seed = s.get("book_seed")?;
                    TvOutput {
                        route,
                        n: book.n,
                        q: spec.q,
                        rho: book.rho,
                        log2_size: book.size_log2() + layout.subcode_bits as f64,
                        exact: None,
                        estimate: harness::estimate_covertness(&cfg).map_err(err)?,
                    }
                }
                other => return Err(format!("unknown route `{other}`; expected exact, mc, ensemble or scheme")),
            };
            emit_json(out.as_ref(), &output)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
