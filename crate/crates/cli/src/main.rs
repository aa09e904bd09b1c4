//! Command-line front end: index tables, splitting numbers, the crossing oracle,
//! jump search, the ellipsoid pipeline and the self-test suites.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use indexjump::ellipsoid::{run_pipeline, EllipsoidSpec, Mode, PipelineParams};
use indexjump::iteration::{
    c_of_m, index_iterate, mean_index, nullity_iterate, s_plus_one, splitting_numbers, validate,
    NormalFormDecomposition, PathIndexData,
};
use indexjump::jump::{
    build_jump_vector, default_epsilon, default_m, search_n, theorem211_report, ChiVector, SearchParams,
};
use indexjump::normal_forms::{unit_spectrum, UnitPoint};
use indexjump::numeric::{parse_rational, set_precision, Real, DEFAULT_DIGITS};
use indexjump::oracle::{
    cz_index, iterate_path, path_from_quadratic_hamiltonian, BlockPath, OracleOptions, SampledSymplecticPath,
};
use indexjump::{selftest, SCHEMA_VERSION};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Parser)]
#[command(name = "indexjump", version, about = "Maslov-type index iteration and common index jumps")]
struct Cli {
    /// Decimal digits for irrational arithmetic
    #[arg(long, global = true, env = "INDEXJUMP_PRECISION", default_value_t = DEFAULT_DIGITS)]
    precision: u32,
    /// Worker threads for jump search (0 = all cores)
    #[arg(long, global = true, env = "INDEXJUMP_WORKERS", default_value_t = 0)]
    workers: usize,
    /// Write the report here instead of stdout
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Index and nullity of iterates from normal-form data
    Iterate(IterateArgs),
    /// Splitting numbers over the unit spectrum
    Splitting(SplittingArgs),
    /// Crossing-count index of a sampled path
    Oracle(OracleArgs),
    /// Search for common index jumps
    JumpSearch(JumpArgs),
    /// Run the ellipsoid pipeline
    Ellipsoid(EllipsoidArgs),
    /// Run the property suites
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct IterateArgs {
    /// PathIndexData JSON
    #[arg(long, visible_alias = "input")]
    data: PathBuf,
    #[arg(long, default_value_t = 20)]
    m_max: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct SplittingArgs {
    /// PathIndexData or NormalFormDecomposition JSON
    #[arg(long)]
    input: PathBuf,
    /// Single point: `1`, `-1` or `<x>pi`
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<String>,
}

#[derive(Args)]
struct OracleArgs {
    /// Generator JSON: `hamiltonian`, `blocks` or `samples`
    #[arg(long)]
    generator: PathBuf,
    /// `1`, `-1` or `<x>pi`
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    omega: String,
    #[arg(long, default_value_t = 1)]
    m: u32,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    rank_tol: Option<f64>,
}

#[derive(Args)]
struct JumpArgs {
    /// JSON array of PathIndexData
    #[arg(long)]
    paths: PathBuf,
    /// `auto` or a bit string such as `0110`
    #[arg(long, default_value = "auto")]
    chi: String,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long, default_value_t = 1_000_000)]
    n_max: u64,
    #[arg(long = "scale")]
    m: Option<u64>,
    #[arg(long)]
    m0: Option<u64>,
    /// Dimension `n` for the theorem report; defaults to the first path's
    #[arg(long)]
    n: Option<u32>,
}

#[derive(Args)]
struct EllipsoidArgs {
    /// Comma-separated frequencies: integers, `p/q`, `sqrtK`, `c*sqrtK`
    #[arg(long)]
    alphas: String,
    #[arg(long, default_value = "convex")]
    mode: String,
    #[arg(long, default_value_t = 20)]
    m_max: u64,
    #[arg(long, default_value_t = 1_000_000)]
    n_max: u64,
    #[arg(long)]
    chi: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    /// Compare formula and oracle for iterates up to this m
    #[arg(long, default_value_t = 0)]
    oracle_check: u32,
    #[arg(long, default_value_t = 1_000_000)]
    ratio_bound: i128,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, env = "INDEXJUMP_SEED", default_value_t = 0)]
    seed: u64,
    /// Smaller randomized suites
    #[arg(long)]
    quick: bool,
}

/// Failures that are bugs rather than bad input.
#[derive(Debug)]
struct Internal(String);

impl std::fmt::Display for Internal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Internal {}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    result: T,
}

fn json_report<T: Serialize>(command: &str, result: T) -> anyhow::Result<String> {
    let env = Envelope { schema_version: SCHEMA_VERSION, command, result };
    Ok(serde_json::to_string_pretty(&env)? + "\n")
}

struct JsonInput {
    name: String,
    text: String,
    value: Value,
}

impl JsonInput {
    fn read(path: &Path) -> anyhow::Result<JsonInput> {
        let name = path.display().to_string();
        let text = fs::read_to_string(path).with_context(|| format!("reading {name}"))?;
        let value = serde_json::from_str(&text).with_context(|| format!("malformed JSON in {name}"))?;
        Ok(JsonInput { name, text, value })
    }

    fn has(&self, key: &str) -> bool {
        self.value.get(key).is_some()
    }

    /// Typed decode from the source text so errors keep line and column.
    fn decode<T: for<'de> Deserialize<'de>>(&self, what: &str) -> anyhow::Result<T> {
        serde_json::from_str(&self.text).with_context(|| format!("invalid {what} in {}", self.name))
    }
}

fn load_path_data(path: &Path) -> anyhow::Result<PathIndexData> {
    JsonInput::read(path)?.decode("path index data")
}

fn load_decomposition(path: &Path) -> anyhow::Result<NormalFormDecomposition> {
    let input = JsonInput::read(path)?;
    if input.has("decomp") {
        Ok(input.decode::<PathIndexData>("path index data")?.decomp)
    } else {
        input.decode("normal form decomposition")
    }
}

fn parse_real(s: &str) -> anyhow::Result<Real> {
    if let Ok(q) = parse_rational(s) {
        return Ok(Real::Rational(q));
    }
    match Real::parse_literal(s) {
        Ok(r) => Ok(r),
        // decimals too long for an exact i128 ratio are taken as tagged irrationals
        Err(e) => Real::irrational_str(s.trim()).map_err(|_| e.into()),
    }
}

/// `1`, `-1`, or `<x>pi` for `e^{iπx}`.
fn parse_omega(s: &str) -> anyhow::Result<UnitPoint> {
    let t = s.trim();
    let x = match t {
        "1" => Real::int(0),
        "-1" => Real::int(1),
        _ => match t.strip_suffix("pi") {
            Some(x) => parse_real(x.trim().trim_end_matches('*'))?,
            None => bail!("ω must be 1, -1 or <x>pi, got {s:?}"),
        },
    };
    Ok(UnitPoint::from_over_pi(&x))
}

#[derive(Serialize)]
struct IterateRow {
    m: u64,
    index: i64,
    nullity: u32,
    mean_index_m: Real,
}

#[derive(Serialize)]
struct IterateReport {
    data: PathIndexData,
    mean_index: Real,
    diagnostics: Vec<indexjump::iteration::Diagnostic>,
    rows: Vec<IterateRow>,
}

fn cmd_iterate(a: &IterateArgs) -> anyhow::Result<String> {
    let data = load_path_data(&a.data)?;
    let mean = mean_index(&data);
    let mut rows = Vec::new();
    for m in 1..=a.m_max {
        rows.push(IterateRow {
            m,
            index: index_iterate(&data, m)?,
            nullity: nullity_iterate(&data, m)?,
            mean_index_m: &mean * &Real::int(i128::from(m)),
        });
    }
    match a.format {
        Format::Csv => {
            let mut out = String::from("m,index,nullity,mean_index_m\n");
            for r in &rows {
                out.push_str(&format!("{},{},{},{}\n", r.m, r.index, r.nullity, r.mean_index_m));
            }
            Ok(out)
        }
        Format::Json => {
            let report = IterateReport { mean_index: mean, diagnostics: validate(&data), data, rows };
            json_report("iterate", report)
        }
    }
}

#[derive(Serialize)]
struct SplittingEntry {
    omega_over_pi: Real,
    multiplicity: usize,
    s_plus: u32,
    s_minus: u32,
}

#[derive(Serialize)]
struct SplittingReport {
    entries: Vec<SplittingEntry>,
    s_plus_one: u32,
    c: u32,
}

fn cmd_splitting(a: &SplittingArgs) -> anyhow::Result<String> {
    let d = load_decomposition(&a.input)?;
    d.check()?;
    let points: Vec<(UnitPoint, usize)> = match &a.omega {
        Some(w) => {
            let p = parse_omega(w)?;
            let mult = unit_spectrum(&d).into_iter().find(|(q, _)| *q == p).map_or(0, |(_, k)| k);
            vec![(p, mult)]
        }
        None => unit_spectrum(&d),
    };
    let mut entries = Vec::new();
    for (p, mult) in points {
        let s = splitting_numbers(&d, &p)?;
        entries.push(SplittingEntry { omega_over_pi: p.over_pi(), multiplicity: mult, s_plus: s.s_plus, s_minus: s.s_minus });
    }
    json_report("splitting", SplittingReport { entries, s_plus_one: s_plus_one(&d), c: c_of_m(&d) })
}

fn matrix(rows: &[Vec<f64>]) -> anyhow::Result<DMatrix<f64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        bail!("matrix must be square");
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn load_generator(path: &Path) -> anyhow::Result<SampledSymplecticPath> {
    #[derive(Deserialize)]
    struct Ham {
        hamiltonian: Vec<Vec<f64>>,
        tau: f64,
        steps: Option<usize>,
    }
    #[derive(Deserialize)]
    struct Blocks {
        blocks: Vec<BlockPath>,
        #[serde(default = "one")]
        tau: f64,
    }
    #[derive(Deserialize)]
    struct Samples {
        samples: Vec<(f64, Vec<Vec<f64>>)>,
        tau: Option<f64>,
    }
    fn one() -> f64 {
        1.0
    }
    let input = JsonInput::read(path)?;
    if input.has("hamiltonian") {
        let h: Ham = input.decode("hamiltonian generator")?;
        let b = matrix(&h.hamiltonian)?;
        let steps = h.steps.unwrap_or_else(|| ((b.amax() * h.tau / 0.02).ceil() as usize).max(64));
        Ok(path_from_quadratic_hamiltonian(&b, h.tau, steps)?)
    } else if input.has("blocks") {
        let b: Blocks = input.decode("block generator")?;
        Ok(BlockPath::sample(&b.blocks, b.tau)?)
    } else if input.has("samples") {
        let s: Samples = input.decode("sample list")?;
        let samples = s.samples.iter().map(|(t, m)| Ok((*t, matrix(m)?))).collect::<anyhow::Result<Vec<_>>>()?;
        let n = samples.first().map_or(0, |(_, m)| m.nrows() / 2);
        let tau = s.tau.or(samples.last().map(|(t, _)| *t)).unwrap_or(0.0);
        Ok(SampledSymplecticPath::new(n, tau, samples)?)
    } else {
        bail!("generator needs one of the keys hamiltonian, blocks, samples")
    }
}

#[derive(Serialize)]
struct OracleReport {
    omega_over_pi: Real,
    m: u32,
    index: i64,
    nullity: usize,
}

fn cmd_oracle(a: &OracleArgs) -> anyhow::Result<String> {
    let path = load_generator(&a.generator)?;
    let omega = parse_omega(&a.omega)?;
    let mut opts = OracleOptions::default();
    if let Some(e) = a.epsilon {
        opts.epsilon = e;
    }
    if let Some(t) = a.rank_tol {
        opts.rank_tol = t;
    }
    let it = iterate_path(&path, a.m)?;
    let w: Complex64 = omega.to_complex();
    let r = cz_index(&it, w, &opts)?;
    json_report("oracle", OracleReport { omega_over_pi: omega.over_pi(), m: a.m, index: r.index, nullity: r.nullity })
}

fn load_paths(path: &Path) -> anyhow::Result<Vec<PathIndexData>> {
    #[derive(Deserialize)]
    struct Wrapped {
        paths: Vec<PathIndexData>,
    }
    let input = JsonInput::read(path)?;
    if input.has("paths") {
        Ok(input.decode::<Wrapped>("path list")?.paths)
    } else {
        input.decode("path list")
    }
}

fn parse_chi(s: &str) -> anyhow::Result<Option<ChiVector>> {
    match s.trim() {
        "auto" => Ok(None),
        bits => Ok(Some(bits.parse()?)),
    }
}

#[derive(Serialize)]
struct JumpSearchReport {
    vector: indexjump::jump::JumpVector,
    params: SearchParams,
    hits_per_vertex: BTreeMap<String, usize>,
    outcome: indexjump::jump::SearchOutcome,
    theorem211: Vec<indexjump::jump::Theorem211Report>,
}

fn cmd_jump(a: &JumpArgs, workers: usize) -> anyhow::Result<String> {
    let paths = load_paths(&a.paths)?;
    if paths.is_empty() {
        bail!("the path list is empty");
    }
    let m = match a.m {
        Some(m) => m,
        None => default_m(&paths)?,
    };
    let v = build_jump_vector(&paths, m, a.m0.unwrap_or(m))?;
    let mut params = SearchParams::with_defaults(&v, &paths, a.n_max)?;
    params.workers = workers;
    if let Some(d) = &a.delta {
        params.delta = parse_real(d)?;
        params.epsilon = default_epsilon(&v, &paths, &params.delta)?;
    }
    if let Some(e) = &a.eps {
        params.epsilon = parse_real(e)?;
    }
    let chi = parse_chi(&a.chi)?;
    let outcome = search_n(&v, chi.as_ref(), &paths, &params)?;
    let n = a.n.unwrap_or(paths[0].decomp.n);
    let theorem211 = outcome.solutions.iter().map(|s| theorem211_report(s, &paths, n)).collect::<Result<Vec<_>, _>>()?;
    let mut hits_per_vertex = BTreeMap::new();
    for s in &outcome.solutions {
        *hits_per_vertex.entry(s.chi.to_string()).or_insert(0) += 1;
    }
    json_report("jump-search", JumpSearchReport { vector: v, params, hits_per_vertex, outcome, theorem211 })
}

fn cmd_ellipsoid(a: &EllipsoidArgs, workers: usize) -> anyhow::Result<String> {
    let mode: Mode = a.mode.parse()?;
    let spec = EllipsoidSpec::parse(&a.alphas, mode)?;
    let params = PipelineParams {
        m_max: a.m_max,
        n_max: a.n_max,
        workers,
        chi: a.chi.as_deref().map(parse_chi).transpose()?.flatten(),
        epsilon: a.eps.as_deref().map(parse_real).transpose()?,
        delta: a.delta.as_deref().map(parse_real).transpose()?,
        ratio_bound: a.ratio_bound,
        oracle_check_m: a.oracle_check,
    };
    json_report("ellipsoid", run_pipeline(&spec, &params)?)
}

fn cmd_selftest(a: &SelftestArgs) -> anyhow::Result<String> {
    let reports = selftest::run_all(a.seed, a.quick);
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.name.as_str()).collect();
    let text = json_report("selftest", &reports)?;
    if !failed.is_empty() {
        print!("{text}");
        return Err(Internal(format!("suites failed: {}", failed.join(", "))).into());
    }
    Ok(text)
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    set_precision(cli.precision)?;
    let text = match &cli.command {
        Command::Iterate(a) => cmd_iterate(a)?,
        Command::Splitting(a) => cmd_splitting(a)?,
        Command::Oracle(a) => cmd_oracle(a)?,
        Command::JumpSearch(a) => cmd_jump(a, cli.workers)?,
        Command::Ellipsoid(a) => cmd_ellipsoid(a, cli.workers)?,
        Command::Selftest(a) => cmd_selftest(a)?,
    };
    match &cli.output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let internal = err.chain().any(|e| {
        e.is::<Internal>() || e.downcast_ref::<indexjump::Error>().is_some_and(indexjump::Error::is_internal)
    });
    if internal {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
