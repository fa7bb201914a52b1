//! Command-line front end. Exit codes: 0 success, 1 a checked bound failed,
//! 2 usage or input error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;
use serde::Serialize;

use crate::catalog::{build, build_monotone, enumerate_monotone, standard_catalog, SetSpec};
use crate::chain::{empirical_tv, run as run_chain, ChainConfig};
use crate::cube::{measure_of, BitState, ExplicitSet, Frac, Measure, SetRep};
use crate::error::{Error, Result};
use crate::ising;
use crate::monotone::{self, GglrsSweep};
use crate::percolation::{self, HexLattice};
use crate::report::{write_tv_csv, Report};
use crate::rng::stream;
use crate::spectral::{self, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "monomix",
    version,
    about = "Censored Glauber dynamics on monotone subsets of the hypercube",
    arg_required_else_help = true,
    args_override_self = true,
    after_help = SPEC_HELP
)]
pub struct Cli {
    /// Worker threads for parallel sections [default: available parallelism]
    #[arg(long, global = true, env = "MONOMIX_WORKERS")]
    pub workers: Option<usize>,
    /// TOML file whose keys mirror the flags (`command = "analyze"`, `set = "full(3)"`, ...)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

const SPEC_HELP: &str = "\
Set specs (coordinates 0-based, states written little-endian, bit i = char i):
  full(n)  dictator(n,i)  threshold(n,k)  subcube-union(n,m)
  crossing(L)  random-monotone(n,density,seed)  explicit(0110,1110,...)";

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Run the censored chain and write its trajectory as CSV
    Simulate(SimulateArgs),
    /// Exact conductance, mixing time, spectral gap and bound certificates
    Analyze(AnalyzeArgs),
    /// Violation rate, distance to monotone and the tester inequality
    TestMonotone(TestMonotoneArgs),
    /// Crossing sampler on the hexagonal-cell rhombus
    Percolation(PercolationArgs),
    /// Curie-Weiss counterexample
    Ising(IsingArgs),
    /// Exhaustive checks of the tester inequality and the bounds
    VerifyAll(VerifyAllArgs),
}

fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().map_err(|_| format!("`{s}` is not a count"))?;
    if f >= 0.0 && f.fract() == 0.0 && f < 1.8e19 {
        Ok(f as u64)
    } else {
        Err(format!("`{s}` is not a nonnegative integer"))
    }
}

#[derive(Args, Debug, Serialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub set: SetSpec,
    /// Start state as a 0/1 string [default: all ones]
    #[arg(long)]
    pub x0: Option<String>,
    #[arg(long, default_value = "10000", value_parser = parse_count)]
    pub steps: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "1", value_parser = parse_count)]
    pub thin: u64,
    /// Trajectory CSV (step,state,event)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON report path [default: stdout]
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub set: SetSpec,
    #[arg(long)]
    pub conductance: bool,
    #[arg(long)]
    pub mix: bool,
    #[arg(long)]
    pub certify: bool,
    #[arg(long)]
    pub gap: bool,
    /// Start state for the TV curve [default: first member]
    #[arg(long)]
    pub x0: Option<String>,
    #[arg(long, default_value_t = 100)]
    pub t_max: usize,
    /// TV curve CSV (t,d)
    #[arg(long)]
    pub tv_out: Option<PathBuf>,
    #[arg(long, default_value_t = spectral::DEFAULT_MIX_CAP)]
    pub mix_cap: usize,
    /// JSON report path [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct TestMonotoneArgs {
    #[arg(long)]
    pub set: SetSpec,
    /// Also estimate the violation rate from this many random pairs
    #[arg(long, value_parser = parse_count)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct PercolationArgs {
    /// Lattice side
    #[arg(long = "L", short = 'L')]
    pub l: usize,
    /// Chain steps [default: min(N^3, 10^7) for N = L^2 sites]
    #[arg(long, value_parser = parse_count)]
    pub steps: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Uniform samples for the Monte Carlo crossing probability (0 = skip)
    #[arg(long, default_value = "0", value_parser = parse_count)]
    pub mc_samples: u64,
    /// Exact crossing probability by enumeration (L^2 <= 24)
    #[arg(long)]
    pub exact: bool,
    /// Final configuration, L lines of 0/1
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct IsingArgs {
    #[arg(long, default_value_t = 12)]
    pub n: usize,
    #[arg(long, default_value_t = ising::DEFAULT_BETA)]
    pub beta: f64,
    /// Inverse temperatures `start:stop:step`, inclusive
    #[arg(long)]
    pub sweep: Option<String>,
    /// Exhaustive transport check (n <= 4)
    #[arg(long)]
    pub transport: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyAllArgs {
    #[arg(long, default_value_t = 3)]
    pub n_max: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

const SUBCOMMANDS: &[&str] = &[
    "simulate",
    "analyze",
    "test-monotone",
    "percolation",
    "ising",
    "verify-all",
];
const GLOBAL_KEYS: &[&str] = &["workers"];

/// Splices a `--config` file into the argument list. The file's keys become
/// flags placed before the ones typed on the command line, so typed flags
/// win.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    let program = it.next().unwrap_or_else(|| "monomix".into());
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(
                it.next()
                    .ok_or_else(|| Error::InvalidArgument("--config needs a path".into()))?,
            );
        } else if let Some(p) = a.to_str().and_then(|s| s.strip_prefix("--config=")) {
            path = Some(p.into());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(std::iter::once(program).chain(rest).collect());
    };
    let text = fs::read_to_string(Path::new(&path))?;
    let table: toml::Table = toml::from_str(&text).map_err(|e| {
        Error::InvalidArgument(format!("config {}: {e}", Path::new(&path).display()))
    })?;
    let split = rest
        .iter()
        .position(|a| a.to_str().is_some_and(|s| SUBCOMMANDS.contains(&s)));
    let (globals, sub, tail) = match split {
        Some(k) => (
            rest[..k].to_vec(),
            Some(rest[k].clone()),
            rest[k + 1..].to_vec(),
        ),
        // every flag is allowed after the subcommand, globals included
        None => (Vec::new(), None, rest),
    };
    let command = match (sub, table.get("command")) {
        (Some(s), _) => s,
        (None, Some(toml::Value::String(c))) => c.into(),
        (None, _) => {
            return Err(Error::InvalidArgument(
                "config file needs a `command` key".into(),
            ))
        }
    };
    let mut global_flags = Vec::new();
    let mut flags = Vec::new();
    for (key, value) in &table {
        if key == "command" {
            continue;
        }
        let flag: OsString = format!("--{}", key.replace('_', "-")).into();
        let target = if GLOBAL_KEYS.contains(&key.as_str()) {
            &mut global_flags
        } else {
            &mut flags
        };
        match value {
            toml::Value::Boolean(true) => target.push(flag),
            toml::Value::Boolean(false) => {}
            toml::Value::String(s) => target.extend([flag, s.into()]),
            toml::Value::Integer(i) => target.extend([flag, i.to_string().into()]),
            toml::Value::Float(f) => target.extend([flag, f.to_string().into()]),
            other => {
                return Err(Error::InvalidArgument(format!(
                    "config key `{key}` has unsupported value {other}"
                )))
            }
        }
    }
    Ok(std::iter::once(program)
        .chain(global_flags)
        .chain(globals)
        .chain([command])
        .chain(flags)
        .chain(tail)
        .collect())
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code. Reports without an output path go to `stdout`.
pub fn run<W: Write>(args: Vec<OsString>, stdout: &mut W) -> i32 {
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Some(w) = cli.workers {
        // the global pool can only be set once per process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global();
    }
    match execute(&cli.command, stdout) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_ASSERTION,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn emit<W: Write, R: Serialize>(
    stdout: &mut W,
    path: Option<&PathBuf>,
    command: &Command,
    seed: Option<u64>,
    pass: bool,
    result: R,
    started: Instant,
) -> Result<bool> {
    let name = command_name(command);
    let report = Report::new(
        name,
        command,
        seed,
        pass,
        result,
        started.elapsed().as_millis() as u64,
    );
    let json = report.to_json()?;
    match path {
        Some(p) => fs::write(p, json)?,
        None => stdout.write_all(json.as_bytes())?,
    }
    Ok(pass)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Simulate(_) => "simulate",
        Command::Analyze(_) => "analyze",
        Command::TestMonotone(_) => "test-monotone",
        Command::Percolation(_) => "percolation",
        Command::Ising(_) => "ising",
        Command::VerifyAll(_) => "verify-all",
    }
}

fn execute<W: Write>(command: &Command, stdout: &mut W) -> Result<bool> {
    let started = Instant::now();
    match command {
        Command::Simulate(a) => {
            let result = simulate(a)?;
            emit(
                stdout,
                a.report.as_ref(),
                command,
                Some(a.seed),
                true,
                result,
                started,
            )
        }
        Command::Analyze(a) => {
            let (pass, result) = analyze(a)?;
            emit(stdout, a.out.as_ref(), command, None, pass, result, started)
        }
        Command::TestMonotone(a) => {
            let (pass, result) = test_monotone(a)?;
            emit(
                stdout,
                a.out.as_ref(),
                command,
                Some(a.seed),
                pass,
                result,
                started,
            )
        }
        Command::Percolation(a) => {
            let (pass, result) = percolation_cmd(a)?;
            emit(
                stdout,
                a.report.as_ref(),
                command,
                Some(a.seed),
                pass,
                result,
                started,
            )
        }
        Command::Ising(a) => {
            let (pass, result) = ising_cmd(a)?;
            emit(stdout, a.out.as_ref(), command, None, pass, result, started)
        }
        Command::VerifyAll(a) => {
            let (pass, result) = verify_all(a)?;
            emit(stdout, a.out.as_ref(), command, None, pass, result, started)
        }
    }
}

fn parse_state(bits: &str, n: usize) -> Result<BitState> {
    let x = BitState::parse(bits)?;
    if x.dim() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: x.dim(),
        });
    }
    Ok(x)
}

#[derive(Serialize)]
struct SimulateResult {
    set: String,
    n: usize,
    x0: String,
    steps: u64,
    thin: u64,
    accepted: u64,
    censored: u64,
    held: u64,
    recorded: usize,
    final_state: String,
    tv_to_uniform: Option<f64>,
}

fn simulate(a: &SimulateArgs) -> Result<SimulateResult> {
    let set = build(&a.set)?;
    let n = set.dim();
    let x0 = match &a.x0 {
        Some(bits) => parse_state(bits, n)?,
        None => BitState::ones(n),
    };
    let cfg = ChainConfig {
        set,
        x0: x0.clone(),
        steps: a.steps,
        seed: a.seed,
        thin: a.thin,
    };
    let traj = run_chain(&cfg)?;
    if let Some(path) = &a.out {
        traj.write_csv(std::io::BufWriter::new(fs::File::create(path)?))?;
    }
    let tv_to_uniform = match &cfg.set {
        SetRep::Explicit(s) if !traj.states.is_empty() => Some(empirical_tv(&traj.states, s)?),
        _ => None,
    };
    Ok(SimulateResult {
        set: a.set.to_string(),
        n,
        x0: x0.to_bit_string(),
        steps: a.steps,
        thin: a.thin,
        accepted: traj.accepted,
        censored: traj.censored,
        held: traj.held,
        recorded: traj.records.len(),
        final_state: traj.final_state.to_bit_string(),
        tv_to_uniform,
    })
}

#[derive(Serialize, Default)]
struct AnalyzeResult {
    set: String,
    n: usize,
    size: usize,
    p_a: Option<Frac>,
    monotone: bool,
    connected: bool,
    conductance: Option<spectral::ConductanceResult>,
    tau_mix: Option<usize>,
    spectral_gap: Option<f64>,
    conductance_certificate: Option<spectral::ConductanceCertificate>,
    mixing_bound: Option<spectral::MixingBoundReport>,
    slow_family: Option<spectral::SlowFamilyReport>,
    tv_start: Option<String>,
    skipped: Vec<String>,
}

/// Cap violations become notes; anything else is an error.
fn capped<T>(r: Result<T>, what: &str, skipped: &mut Vec<String>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e @ (Error::SizeCap { .. } | Error::MixingCapExceeded { .. })) => {
            skipped.push(format!("{what}: {e}"));
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn analyze(a: &AnalyzeArgs) -> Result<(bool, AnalyzeResult)> {
    let set = build(&a.set)?.into_explicit_checked()?;
    let all = !(a.conductance || a.mix || a.certify || a.gap || a.tv_out.is_some());
    let n = set.dim();
    let monotone = set.is_monotone();
    let mut r = AnalyzeResult {
        set: a.set.to_string(),
        n,
        size: set.len(),
        monotone,
        connected: !set.is_empty() && set.is_connected()?,
        ..Default::default()
    };
    r.p_a = measure_of(&Measure::uniform(n), &set)?
        .as_exact()
        .map(Frac::from);
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let kernel = spectral::build_kernel(&set)?;
    if a.conductance || all {
        r.conductance = capped(
            spectral::conductance_exact(&set),
            "conductance",
            &mut r.skipped,
        )?;
    }
    if a.mix || all {
        r.tau_mix = capped(
            spectral::mixing_time(&kernel, 0.25, a.mix_cap),
            "mixing time",
            &mut r.skipped,
        )?;
    }
    if a.gap || all {
        r.spectral_gap = capped(
            spectral::spectral_gap(&kernel),
            "spectral gap",
            &mut r.skipped,
        )?;
    }
    let mut pass = true;
    if a.certify || all {
        if !monotone {
            if a.certify {
                return Err(Error::NotMonotone);
            }
            r.skipped.push("certificates: set is not monotone".into());
        } else {
            r.conductance_certificate = capped(
                spectral::theorem1_certificate(&set),
                "conductance certificate",
                &mut r.skipped,
            )?;
            r.mixing_bound = capped(
                spectral::corollary_bound(&set),
                "mixing bound",
                &mut r.skipped,
            )?;
            pass &= r
                .conductance_certificate
                .as_ref()
                .is_none_or(|c| c.verdict.ok());
            pass &= r.mixing_bound.as_ref().is_none_or(|c| c.pass);
        }
    }
    if let SetSpec::SubcubeUnion { n, m } = a.set {
        let (_, fam) = spectral::example_slow_family(n, m, a.mix_cap)?;
        pass &= fam.phi_claim_holds && fam.tau_claim_holds.unwrap_or(true);
        r.slow_family = Some(fam);
    }
    if let Some(path) = &a.tv_out {
        let start = match &a.x0 {
            Some(bits) => {
                let x = parse_state(bits, n)?;
                let idx = x.index().expect("explicit dimension fits a word") as usize;
                kernel
                    .position(idx)
                    .ok_or_else(|| Error::StateNotInSet(bits.clone()))?
            }
            None => 0,
        };
        let curve = spectral::tv_curve(&kernel, start, a.t_max)?;
        write_tv_csv(&curve, std::io::BufWriter::new(fs::File::create(path)?))?;
        r.tv_start = Some(crate::cube::index_to_bit_string(kernel.states()[start], n));
    }
    Ok((pass, r))
}

trait IntoExplicitChecked {
    fn into_explicit_checked(self) -> Result<ExplicitSet>;
}

impl IntoExplicitChecked for SetRep {
    fn into_explicit_checked(self) -> Result<ExplicitSet> {
        match self {
            SetRep::Explicit(s) => Ok(s),
            SetRep::Oracle(o) => Err(Error::InvalidArgument(format!(
                "`{}` has n = {} > {}; exact analysis needs an explicit set",
                o.label(),
                o.dim(),
                crate::cube::MAX_EXPLICIT_DIM
            ))),
        }
    }
}

#[derive(Serialize)]
struct TestMonotoneResult {
    set: String,
    n: usize,
    monotone: Option<bool>,
    exact: Option<monotone::GglrsCheck>,
    brute_force_agrees: Option<bool>,
    sampled: Option<monotone::SampledDelta>,
}

fn test_monotone(a: &TestMonotoneArgs) -> Result<(bool, TestMonotoneResult)> {
    let set = build(&a.set)?;
    let n = set.dim();
    let mut r = TestMonotoneResult {
        set: a.set.to_string(),
        n,
        monotone: None,
        exact: None,
        brute_force_agrees: None,
        sampled: None,
    };
    let mut pass = true;
    if let SetRep::Explicit(s) = &set {
        let check = monotone::check_gglrs(s)?;
        if n <= monotone::BRUTE_FORCE_MAX_DIM {
            let bf = monotone::epsilon_bruteforce(s, &Measure::uniform(n))?;
            r.brute_force_agrees = Some(bf.mismatch_count == Some(check.mismatch_count));
            pass &= r.brute_force_agrees == Some(true);
        }
        pass &= check.pass;
        r.monotone = Some(s.is_monotone());
        r.exact = Some(check);
    }
    let samples = match (&set, a.samples) {
        (_, Some(k)) => Some(k),
        (SetRep::Oracle(_), None) => Some(100_000),
        _ => None,
    };
    if let Some(k) = samples {
        r.sampled = Some(monotone::delta_sampled(&set, k, &mut stream(a.seed, 0))?);
    }
    Ok((pass, r))
}

#[derive(Serialize)]
struct PercolationResult {
    geometry: percolation::Geometry,
    sites: usize,
    steps: u64,
    final_crossing: bool,
    open_sites: usize,
    exact: Option<percolation::ExactCrossing>,
    monte_carlo: Option<percolation::McCrossing>,
    mc_within_4_sigma_of_half: Option<bool>,
}

pub fn default_percolation_steps(l: usize) -> u64 {
    let sites = (l * l) as u64;
    sites.saturating_pow(3).min(10_000_000)
}

fn percolation_cmd(a: &PercolationArgs) -> Result<(bool, PercolationResult)> {
    if a.l == 0 {
        return Err(Error::InvalidArgument("--L must be >= 1".into()));
    }
    let lat = HexLattice::new(a.l);
    let steps = a.steps.unwrap_or_else(|| default_percolation_steps(a.l));
    let config = percolation::sample_crossing(&lat, steps, a.seed)?;
    if let Some(path) = &a.out {
        fs::write(path, percolation::config_to_rows(&config, &lat))?;
    }
    let final_crossing = percolation::has_crossing(&config, &lat);
    let exact = if a.exact {
        Some(percolation::crossing_probability_exact(&lat)?)
    } else {
        None
    };
    let monte_carlo = if a.mc_samples > 0 {
        Some(percolation::crossing_probability_mc(
            &lat,
            a.mc_samples,
            a.seed,
        )?)
    } else {
        None
    };
    let within = monte_carlo.as_ref().map(|mc| {
        let sigma = (0.25 / mc.samples as f64).sqrt();
        (mc.estimate - 0.5).abs() <= 4.0 * sigma
    });
    let pass = final_crossing && within.unwrap_or(true);
    Ok((
        pass,
        PercolationResult {
            geometry: lat.geometry(),
            sites: lat.sites(),
            steps,
            final_crossing,
            open_sites: config.weight(),
            exact,
            monte_carlo,
            mc_within_4_sigma_of_half: within,
        },
    ))
}

pub fn parse_sweep(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidArgument(format!("sweep `{s}` must be start:stop:step")))?;
    let [start, stop, step] = parts[..] else {
        return Err(Error::InvalidArgument(format!(
            "sweep `{s}` must be start:stop:step"
        )));
    };
    if step.is_nan() || step <= 0.0 || stop < start || start < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "sweep `{s}` needs 0 <= start <= stop and step > 0"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|k| start + k as f64 * step).collect())
}

#[derive(Serialize)]
struct IsingResult {
    headline: ising::CounterexampleReport,
    sweep: Vec<ising::CounterexampleReport>,
    delta_strictly_decreasing: bool,
    transport: Option<ising::TransportReport>,
}

fn ising_cmd(a: &IsingArgs) -> Result<(bool, IsingResult)> {
    let headline = ising::counterexample(a.n, a.beta)?;
    let sweep = match &a.sweep {
        Some(s) => ising::sweep(a.n, &parse_sweep(s)?)?,
        None => Vec::new(),
    };
    let decreasing = sweep.windows(2).all(|w| w[1].delta_a < w[0].delta_a);
    let transport = if a.transport {
        Some(ising::transport_verify(a.n, a.beta)?)
    } else {
        None
    };
    let ok = |r: &ising::CounterexampleReport| r.epsilon_at_least_sixth && r.delta_at_most_mu_mid;
    let pass = ok(&headline)
        && sweep.iter().all(ok)
        && decreasing
        && transport
            .as_ref()
            .is_none_or(|t| t.headline_holds && t.bound_violations == 0);
    Ok((
        pass,
        IsingResult {
            headline,
            sweep,
            delta_strictly_decreasing: decreasing,
            transport,
        },
    ))
}

#[derive(Serialize, Default)]
struct CertificateTally {
    n: usize,
    sets: usize,
    pass: usize,
    vacuous: usize,
    fail: usize,
    bound_pass: usize,
    bound_fail: usize,
    min_phi_over_bound: Option<f64>,
    max_tau_over_bound: Option<f64>,
}

#[derive(Serialize)]
struct VerifyAllResult {
    tester_inequality: Vec<GglrsSweep>,
    monotone_sets: Vec<CertificateTally>,
    catalog: Option<CertificateTally>,
    slow_family: Vec<spectral::SlowFamilyReport>,
}

fn tally(n: usize, sets: &[ExplicitSet]) -> Result<CertificateTally> {
    use rayon::prelude::*;
    let rows: Vec<(
        spectral::ConductanceCertificate,
        spectral::MixingBoundReport,
    )> = sets
        .par_iter()
        .filter(|s| !s.is_empty())
        .map(|s| {
            Ok((
                spectral::theorem1_certificate(s)?,
                spectral::corollary_bound(s)?,
            ))
        })
        .collect::<Result<_>>()?;
    let mut t = CertificateTally {
        n,
        sets: rows.len(),
        ..Default::default()
    };
    for (cert, cor) in &rows {
        match cert.verdict {
            Verdict::Pass => t.pass += 1,
            Verdict::Vacuous => t.vacuous += 1,
            Verdict::Fail => t.fail += 1,
        }
        if cor.pass {
            t.bound_pass += 1;
        } else {
            t.bound_fail += 1;
        }
        if let Some(phi) = cert.phi {
            let ratio = (Ratio::new(phi.num, phi.den)
                / Ratio::new(cert.lower_bound.num, cert.lower_bound.den))
            .to_integer_f64();
            t.min_phi_over_bound = Some(t.min_phi_over_bound.map_or(ratio, |m: f64| m.min(ratio)));
        }
        let tau_ratio = cor.tau_mix as f64 / cor.bound;
        t.max_tau_over_bound = Some(
            t.max_tau_over_bound
                .map_or(tau_ratio, |m: f64| m.max(tau_ratio)),
        );
    }
    Ok(t)
}

trait RatioF64 {
    fn to_integer_f64(&self) -> f64;
}

impl RatioF64 for Ratio<u64> {
    fn to_integer_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

fn verify_all(a: &VerifyAllArgs) -> Result<(bool, VerifyAllResult)> {
    if a.n_max == 0 || a.n_max > monotone::BRUTE_FORCE_MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "--n-max must lie in 1..={}",
            monotone::BRUTE_FORCE_MAX_DIM
        )));
    }
    let tester_inequality = (1..=a.n_max)
        .map(monotone::gglrs_exhaustive)
        .collect::<Result<Vec<_>>>()?;
    let monotone_sets = (1..=a.n_max)
        .map(|n| tally(n, &enumerate_monotone(n)?))
        .collect::<Result<Vec<_>>>()?;
    let catalog = if a.n_max == 4 {
        let sets = standard_catalog(4)
            .iter()
            .map(|s| build_monotone(s)?.into_explicit())
            .collect::<Result<Vec<_>>>()?;
        Some(tally(4, &sets)?)
    } else {
        None
    };
    let slow_family = [(4, 2), (6, 3)]
        .iter()
        .map(|&(n, m)| Ok(spectral::example_slow_family(n, m, spectral::DEFAULT_MIX_CAP)?.1))
        .collect::<Result<Vec<_>>>()?;
    let ok_tally = |t: &CertificateTally| t.fail == 0 && t.bound_fail == 0;
    let pass = tester_inequality.iter().all(|g| g.failures == 0)
        && monotone_sets.iter().all(ok_tally)
        && catalog.as_ref().is_none_or(ok_tally)
        && slow_family
            .iter()
            .all(|f| f.phi_claim_holds && f.tau_claim_holds != Some(false));
    Ok((
        pass,
        VerifyAllResult {
            tester_inequality,
            monotone_sets,
            catalog,
            slow_family,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<OsString> {
        std::iter::once("monomix")
            .chain(s.split_whitespace())
            .map(OsString::from)
            .collect()
    }

    fn run_str(s: &str) -> (i32, String) {
        let mut out = Vec::new();
        let code = run(argv(s), &mut out);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn counts_accept_scientific_notation() {
        assert_eq!(parse_count("1e6").unwrap(), 1_000_000);
        assert_eq!(parse_count("250").unwrap(), 250);
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-3").is_err());
    }

    #[test]
    fn sweep_parsing() {
        assert_eq!(parse_sweep("0:4:0.5").unwrap().len(), 9);
        assert_eq!(parse_sweep("0:3:1").unwrap(), vec![0.0, 1.0, 2.0, 3.0]);
        assert!(parse_sweep("1:0:1").is_err());
        assert!(parse_sweep("0:1").is_err());
    }

    #[test]
    fn no_arguments_is_usage_error() {
        assert_eq!(run(argv(""), &mut Vec::new()), EXIT_USAGE);
        assert_eq!(run_str("analyze --set nope(3)").0, EXIT_USAGE);
    }

    #[test]
    fn analyze_subcube_union() {
        let (code, out) = run_str("analyze --set subcube-union(6,3) --conductance --mix");
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(
            v["result"]["p_a"],
            serde_json::json!({"num": 15, "den": 64})
        );
        assert!(v["result"]["conductance"]["phi"].is_object());
        assert!(v["result"]["tau_mix"].as_u64().unwrap() >= 1);
        assert_eq!(v["config"]["set"], "subcube-union(6,3)");
    }

    #[test]
    fn verify_all_small() {
        let (code, out) = run_str("verify-all --n-max 2");
        assert_eq!(code, EXIT_OK, "{out}");
    }

    #[test]
    fn test_monotone_non_monotone_set() {
        let (code, out) = run_str("test-monotone --set explicit(00,01)");
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["result"]["monotone"], false);
        assert_eq!(v["result"]["exact"]["pass"], true);
    }

    #[test]
    fn certify_rejects_non_monotone() {
        assert_eq!(
            run_str("analyze --set explicit(00) --certify").0,
            EXIT_USAGE
        );
    }

    #[test]
    fn config_file_expansion() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(
            &path,
            "command = \"analyze\"\nset = \"full(2)\"\nmix = true\nt_max = 5\nworkers = 2\n",
        )
        .unwrap();
        let args = expand_config(argv(&format!("--config {} --gap", path.display()))).unwrap();
        let text: Vec<String> = args
            .iter()
            .map(|a| a.to_string_lossy().into_owned())
            .collect();
        assert_eq!(text[0], "monomix");
        assert!(text.contains(&"analyze".to_string()));
        assert!(text.contains(&"--t-max".to_string()));
        assert!(
            text.iter().position(|a| a == "--workers").unwrap()
                < text.iter().position(|a| a == "analyze").unwrap()
        );
        assert_eq!(text.last().unwrap(), "--gap");

        let mut out = Vec::new();
        assert_eq!(
            run(argv(&format!("--config {}", path.display())), &mut out),
            EXIT_OK
        );
        let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(v["result"]["tau_mix"], 1);
    }
}
