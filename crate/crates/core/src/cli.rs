//! Command-line front end. Every command writes one artifact (CSV or JSON)
//! to `--output`, or to stdout when no path is given.
//!
//! Exit status: 0 on success, 1 when a verification check reports
//! failures, 2 on configuration or runtime errors, 3 when a constrained
//! optimization finds no feasible state.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::capacity::{
    bin_maxima, depolarizing_closed_forms, eve_bound, mc_scan, optimize_constrained,
    qec_chi_integrand, qec_closed_forms, CapacityResult, Clause, ConstraintSpec, EncodingEnsemble,
    StateFamily,
};
use crate::channels::{check_generalized_covariance, weyl_group, BuiltinChannel, ChannelSpec, KrausChannel};
use crate::error::{Error, Result};
use crate::random::derive_seed;
use crate::states::DensityMatrix;
use crate::verify::{
    check_dpi, check_lemma1, check_subadditivity, check_superadditivity_i,
    check_superadditivity_ii, PropertyReport,
};

pub const THREADS_ENV: &str = "CHANCAP_THREADS";

#[derive(Debug, Parser)]
#[command(name = "chancap", version, about = "Noisy-entanglement-assisted capacity toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Erasure-channel capacity lines over a grid of mutual-information constraints.
    Capcurve(CapcurveArgs),
    /// Monte Carlo scatter of F against I(S:W), plus per-bin maxima.
    Scan(ScanArgs),
    /// Seeded entropy-inequality checks.
    Verify(VerifyArgs),
    /// Channel dimensions, Kraus count and Weyl-covariance verdict.
    Info(InfoArgs),
    /// Constrained maximum of F with a fixed witness marginal.
    EveBound(EveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; written atomically. Defaults to stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CapcurveArgs {
    /// Erasure channel, e.g. `erasure:d=2,eps=0.25`.
    #[arg(long)]
    pub channel: String,
    /// start:stop:step, inclusive of both ends.
    #[arg(long)]
    pub grid: String,
    #[arg(long)]
    pub seed: u64,
    /// Samples per grid point for the optimized column.
    #[arg(long, default_value_t = 5000)]
    pub budget: usize,
    /// Encoding applied before the channel: identity or reset.
    #[arg(long, default_value = "identity")]
    pub encoding: String,
    /// Half-width of the I(S:W) = y band.
    #[arg(long, default_value_t = crate::capacity::DEFAULT_TOLERANCE)]
    pub tol: f64,
    /// Leave the optimized column empty (nan).
    #[arg(long)]
    pub skip_optimize: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub channel: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value = "ten-param")]
    pub family: StateFamily,
    #[arg(long, default_value_t = 0.1)]
    pub bin_width: f64,
    /// Sidecar with per-bin maxima; defaults to `<output stem>.bins.<ext>`.
    #[arg(long)]
    pub bins_output: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Dpi,
    SuperadditivityI,
    SuperadditivityIi,
    Lemma1,
    Subadditivity,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Run every check.
    #[arg(long)]
    pub all: bool,
    /// Checks to run (repeatable).
    #[arg(long, value_enum)]
    pub check: Vec<Check>,
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    /// Channels for the covariant-entropy check (repeatable).
    #[arg(long, default_values_t = vec!["depolarizing:lam=0.3".to_string()])]
    pub channel: Vec<String>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    #[arg(long)]
    pub channel: String,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EveArgs {
    #[arg(long)]
    pub channel: String,
    /// identity, reset or weyl.
    #[arg(long, default_value = "identity")]
    pub encoding: String,
    /// Target I(S:W).
    #[arg(long)]
    pub y: f64,
    #[arg(long, default_value_t = crate::capacity::DEFAULT_TOLERANCE)]
    pub tol: f64,
    /// Diagonal of the fixed ρ_W, comma separated.
    #[arg(long, default_value = "0.5,0.5")]
    pub rho_w: String,
    #[arg(long, default_value = "bell-diagonal")]
    pub family: StateFamily,
    #[arg(long, default_value_t = 5000)]
    pub budget: usize,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Parses `name:key=value,...`, a JSON object, or `@path` to a JSON file.
pub fn parse_channel_spec(text: &str) -> Result<KrausChannel> {
    let text = text.trim();
    if let Some(path) = text.strip_prefix('@') {
        let body = fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read channel file {path}: {e}")))?;
        return ChannelSpec::from_json(&body);
    }
    if text.starts_with('{') {
        return ChannelSpec::from_json(text);
    }
    parse_builtin(text)?.build()
}

/// Parses `name:key=value,...` into a built-in channel description.
pub fn parse_builtin(text: &str) -> Result<BuiltinChannel> {
    let (name, rest) = text.split_once(':').unwrap_or((text, ""));
    let mut obj = Map::new();
    obj.insert("name".into(), Value::String(name.trim().to_string()));
    for pair in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got '{pair}'")))?;
        let v = v.trim();
        let value = if let Ok(i) = v.parse::<u64>() {
            Value::from(i)
        } else {
            let x: f64 = v
                .parse()
                .map_err(|_| Error::Parse(format!("'{v}' is not a number (key {k})")))?;
            Value::from(x)
        };
        obj.insert(k.trim().to_string(), value);
    }
    serde_json::from_value(Value::Object(obj))
        .map_err(|e| Error::Parse(format!("channel '{text}': {e}")))
}

/// start:stop:step; the last point is included when it lies within half a
/// step of `stop`, and points within 1e-9 steps of `stop` snap to it.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(Error::Parse(format!("grid '{text}' is not start:stop:step")));
    };
    let num = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Error::Parse(format!("grid value '{s}' is not a finite number")))
    };
    let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
    if !(step > 0.0) || stop < start {
        return Err(Error::Parse(format!("grid '{text}' needs step > 0 and stop >= start")));
    }
    let count = ((stop - start) / step + 0.5 - 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|k| {
            let x = start + k as f64 * step;
            if (x - stop).abs() <= 1e-9 * step {
                stop
            } else {
                x
            }
        })
        .collect())
}

fn parse_encoding(name: &str, d: usize) -> Result<EncodingEnsemble> {
    match name {
        "identity" => Ok(EncodingEnsemble::identity(d)),
        "reset" => Ok(EncodingEnsemble::reset(d)),
        "weyl" => Ok(EncodingEnsemble::weyl(d)),
        other => Err(Error::Parse(format!(
            "unknown encoding '{other}' (expected identity, reset or weyl)"
        ))),
    }
}

fn parse_diagonal(text: &str) -> Result<DensityMatrix> {
    let probs = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("'{s}' in --rho-w is not a number")))
        })
        .collect::<Result<Vec<f64>>>()?;
    DensityMatrix::diagonal(&probs)
}

/// `%.12g`-style rendering: 12 significant digits, trailing zeros removed.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A rectangular table that renders as CSV or as a JSON array of objects.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Table {
    fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| match c {
                Cell::Num(x) => format_number(*x),
                Cell::Int(i) => i.to_string(),
                Cell::Text(s) => s.clone(),
            }))
            .map_err(io)?;
        }
        w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
    }

    fn to_json(&self) -> Result<Vec<u8>> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, c)| {
                        let v = match c {
                            Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
                            Cell::Int(i) => Value::from(*i),
                            Cell::Text(s) => Value::String(s.clone()),
                        };
                        (k.to_string(), v)
                    })
                    .collect();
                Value::Object(obj)
            })
            .collect();
        json_bytes(&rows)
    }

    fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

fn json_bytes<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::Validation(format!("output path {} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

fn emit(out: &OutputArgs, bytes: &[u8]) -> Result<()> {
    match &out.output {
        Some(path) => write_atomic(path, bytes),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn sidecar_path(output: &Path, format: Format) -> PathBuf {
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let stem = output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    output.with_file_name(format!("{stem}.bins.{ext}"))
}

/// What a finished command reports back to `main`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    ChecksFailed,
}

fn capcurve(args: &CapcurveArgs) -> Result<Outcome> {
    let (d, eps) = match parse_builtin(&args.channel)? {
        BuiltinChannel::Erasure { d, eps } => (d, eps),
        other => {
            return Err(Error::Validation(format!(
                "capcurve needs an erasure channel, got {other:?}"
            )))
        }
    };
    KrausChannel::erasure(d, eps)?;
    let grid = parse_grid(&args.grid)?;
    let optimize = !args.skip_optimize;
    if optimize && d != 2 {
        return Err(Error::Validation(format!(
            "the optimized column searches two-qubit states; d = {d} needs --skip-optimize"
        )));
    }
    let encoding = match args.encoding.as_str() {
        "identity" => KrausChannel::identity(d),
        "reset" => KrausChannel::reset(d),
        other => return Err(Error::Parse(format!("unknown encoding '{other}' (expected identity or reset)"))),
    };
    let mut table = Table::new(vec!["y", "chi_L_I_closed", "chi_L_I_optimized", "C1", "C_E"]);
    for (k, &y) in grid.iter().enumerate() {
        let closed = qec_closed_forms(eps, d, y)?;
        let optimized = if optimize {
            let cons = ConstraintSpec::none().with_clause(Clause::equal(y).with_tolerance(args.tol));
            optimize_constrained(
                |s| qec_chi_integrand(eps, d, &encoding, s),
                StateFamily::BellDiagonal,
                &cons,
                args.budget,
                derive_seed(args.seed, k as u64),
            )?
            .value
        } else {
            f64::NAN
        };
        table.push(vec![
            Cell::Num(y),
            Cell::Num(closed.chi_l_i),
            Cell::Num(optimized),
            Cell::Num(closed.c1),
            Cell::Num(closed.c_e),
        ]);
    }
    emit(&args.out, &table.render(args.out.format)?)?;
    Ok(Outcome::Success)
}

fn scan(args: &ScanArgs) -> Result<Outcome> {
    let ch = parse_channel_spec(&args.channel)?;
    let records = mc_scan(&ch, args.family, args.n, args.seed)?;
    let reference = match parse_builtin(&args.channel) {
        Ok(BuiltinChannel::Depolarizing { d: 2, lam }) if lam <= 1.0 => Some(depolarizing_closed_forms(lam)?),
        _ => None,
    };
    let mut rows = Table::new(vec!["q", "F"]);
    for r in &records {
        rows.push(vec![Cell::Num(r.q), Cell::Num(r.f)]);
    }
    emit(&args.out, &rows.render(args.out.format)?)?;

    let bins_path = args
        .bins_output
        .clone()
        .or_else(|| args.out.output.as_deref().map(|p| sidecar_path(p, args.out.format)));
    if let Some(path) = bins_path {
        let line = |q: f64| reference.map_or(f64::NAN, |c| c.chi_star(q));
        let bins = bin_maxima(&records, args.bin_width, 2.0, line)?;
        let mut table = Table::new(vec!["q_bin", "F_max", "chi_star", "count", "q_at_max", "deviation"]);
        for b in bins {
            table.push(vec![
                Cell::Num(b.q_lo),
                Cell::Num(b.f_max),
                Cell::Num(b.reference),
                Cell::Int(b.count as u64),
                Cell::Num(b.q_at_max),
                Cell::Num(b.deviation),
            ]);
        }
        write_atomic(&path, &table.render(args.out.format)?)?;
    }
    Ok(Outcome::Success)
}

fn verify(args: &VerifyArgs) -> Result<Outcome> {
    let checks: Vec<Check> = if args.all {
        Check::value_variants().to_vec()
    } else if args.check.is_empty() {
        return Err(Error::Validation("choose checks with --check or pass --all".into()));
    } else {
        args.check.clone()
    };
    if args.n == 0 {
        return Err(Error::Validation("--n must be at least 1".into()));
    }
    let mut reports: Vec<PropertyReport> = Vec::new();
    for check in checks {
        match check {
            Check::Dpi => reports.push(check_dpi(args.n, args.seed)),
            Check::SuperadditivityI => reports.push(check_superadditivity_i(args.n, args.seed)),
            Check::SuperadditivityIi => reports.push(check_superadditivity_ii(args.n, args.seed)),
            Check::Subadditivity => reports.push(check_subadditivity(args.n, args.seed)),
            Check::Lemma1 => {
                for spec in &args.channel {
                    let ch = parse_channel_spec(spec)?;
                    let mut r = check_lemma1(&ch, &weyl_group(ch.din()), args.n, args.seed)?;
                    r.name = format!("lemma1[{spec}]");
                    reports.push(r);
                }
            }
        }
    }
    let bytes = match args.out.format {
        Format::Json => json_bytes(&reports)?,
        Format::Csv => {
            let mut table = Table::new(vec!["name", "instances", "min_slack", "failures", "seed"]);
            for r in &reports {
                table.push(vec![
                    Cell::Text(r.name.clone()),
                    Cell::Int(r.instances as u64),
                    Cell::Num(r.min_slack),
                    Cell::Int(r.failures as u64),
                    Cell::Int(r.seed),
                ]);
            }
            table.to_csv()?
        }
    };
    emit(&args.out, &bytes)?;
    Ok(if reports.iter().all(PropertyReport::passed) {
        Outcome::Success
    } else {
        Outcome::ChecksFailed
    })
}

fn info(args: &InfoArgs) -> Result<Outcome> {
    let ch = parse_channel_spec(&args.channel)?;
    let cov = check_generalized_covariance(&ch, &weyl_group(ch.din().max(2)));
    let mut table = Table::new(vec!["din", "dout", "kraus", "covariant", "worst_residual"]);
    table.push(vec![
        Cell::Int(ch.din() as u64),
        Cell::Int(ch.dout() as u64),
        Cell::Int(ch.num_kraus() as u64),
        Cell::Text(cov.covariant.to_string()),
        Cell::Num(cov.worst_residual),
    ]);
    emit(&args.out, &table.render(args.out.format)?)?;
    Ok(Outcome::Success)
}

fn eve(args: &EveArgs) -> Result<Outcome> {
    let ch = parse_channel_spec(&args.channel)?;
    let enc = parse_encoding(&args.encoding, ch.din())?;
    let cons = ConstraintSpec::none()
        .with_clause(Clause::equal(args.y).with_tolerance(args.tol))
        .with_fixed_marginal(parse_diagonal(&args.rho_w)?);
    let result = eve_bound(&ch, &enc, args.family, &cons, args.budget, args.seed)?;
    let bytes = match args.out.format {
        Format::Json => json_bytes(&result)?,
        Format::Csv => capacity_csv(&result)?,
    };
    emit(&args.out, &bytes)?;
    Ok(Outcome::Success)
}

fn capacity_csv(r: &CapacityResult) -> Result<Vec<u8>> {
    let join = |xs: &[f64]| xs.iter().map(|x| format_number(*x)).collect::<Vec<_>>().join(";");
    let mut table = Table::new(vec!["value", "argmax_params", "samples_evaluated", "constraint_slacks", "seed"]);
    table.push(vec![
        Cell::Num(r.value),
        Cell::Text(join(&r.argmax_params)),
        Cell::Int(r.samples_evaluated as u64),
        Cell::Text(join(&r.constraint_slacks)),
        Cell::Int(r.seed),
    ]);
    table.to_csv()
}

fn thread_limit() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::Parse(format!("{THREADS_ENV} must be an integer >= 1, got '{v}'"))),
        },
    }
}

/// Runs a parsed command inside a worker pool capped by `CHANCAP_THREADS`.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_limit()? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Validation(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Capcurve(a) => capcurve(a),
        Command::Scan(a) => scan(a),
        Command::Verify(a) => verify(a),
        Command::Info(a) => info(a),
        Command::EveBound(a) => eve(a),
    })
}

/// Parses `args`, runs the command and maps the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(Outcome::Success) => 0,
        Ok(Outcome::ChecksFailed) => {
            eprintln!("chancap: one or more checks reported failures");
            1
        }
        Err(e @ Error::Infeasible { .. }) => {
            eprintln!("chancap: {e}");
            3
        }
        Err(e) => {
            eprintln!("chancap: {e}");
            2
        }
    }
}
