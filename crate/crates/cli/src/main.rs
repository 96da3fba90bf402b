//! `cobound`: command-line front end for the cobound library.
//!
//! Every JSON report carries the tool version, the command, its configuration
//! (without the worker count) and an exactness flag. Exit codes: 0 success,
//! 1 validation error, 2 budget exceeded, 3 certificate violation.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use cobound::cochain::{Cochain, CochainFile};
use cobound::covers::{
    build_cover, injectivity_radius, level_lambdas, lifting_experiment, sample_local_cochains, MonodromySpec, Tower,
};
use cobound::duality::{check_closed_manifold, dual_complex};
use cobound::expansion::{
    expansion_auto, expansion_by_cuts, expansion_constant, sampled_upper_bound, Lambda, Variant, CSV_HEADER,
};
use cobound::generators::{generate, GeneratorSpec};
use cobound::io::{complex_to_json, parse_complex, ComplexFile};
use cobound::isoperimetry::{dehn_profile, expander_filling, min_filling, sample_boundaries, zero_dim_witness};
use cobound::metric::CofaceGraph;
use cobound::{CellComplex, CoefficientGroup, Error, Limits};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(
    name = "cobound",
    version,
    about = "Exact coboundary and cocycle expansion of finite cell complexes"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Serialize)]
struct Common {
    /// Worker threads (default: available parallelism). Not part of the report.
    #[arg(long, global = true)]
    #[serde(skip)]
    workers: Option<usize>,
    /// Search node budget.
    #[arg(long, global = true, env = "COBOUND_BUDGET", default_value_t = 1 << 28)]
    budget: u64,
    /// Largest coset-leader table, in entries.
    #[arg(long, global = true, default_value_t = 1 << 22)]
    table_limit: u64,
    /// Maximum number of minimizers kept per distance query.
    #[arg(long, global = true, default_value_t = 64)]
    cap: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum TowerFamily {
    /// Covers of the 7-vertex torus with fiber Z_k x Z_k.
    Torus,
    /// Iterated cyclic covers of the triangle.
    Cycle,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum AlgoArg {
    Auto,
    FullTable,
    CutEnumeration,
    SampledUpperBound,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Validate a complex.
    Check(CheckArgs),
    /// Expansion constant with witness.
    Expansion(ExpansionArgs),
    /// Coboundary metric queries.
    Metric(MetricArgs),
    /// Covers and towers.
    #[command(subcommand)]
    Cover(CoverCommand),
    /// Dual complexes.
    #[command(subcommand)]
    Dual(DualCommand),
    /// Minimal filling of a cycle.
    Fill(FillArgs),
    /// Filling through a cocycle expander on the dual complex.
    Expanderfill(ExpanderfillArgs),
    /// Homological Dehn profile from random boundaries.
    Dehn(DehnArgs),
    /// Lifting experiments along a tower.
    Lift(LiftArgs),
    /// Dimension-0 isoperimetric witness in a tower.
    Witness0(Witness0Args),
    /// Emit a generator complex as JSON.
    Gen(GenArgs),
}

#[derive(Args, Serialize)]
struct ComplexArg {
    /// Complex JSON file; `-` or absent reads stdin.
    #[arg(long)]
    complex: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct CheckArgs {
    #[command(flatten)]
    input: ComplexArg,
}

#[derive(Args, Serialize)]
struct ExpansionArgs {
    #[command(flatten)]
    input: ComplexArg,
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value = "z2")]
    coeff: String,
    #[arg(long, default_value = "cocycle")]
    variant: String,
    #[arg(long, value_enum, default_value_t = AlgoArg::Auto)]
    algo: AlgoArg,
    /// Random cochains for the sampled upper bound.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Serialize)]
struct MetricArgs {
    #[command(flatten)]
    input: ComplexArg,
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value = "z2")]
    coeff: String,
    /// Distance between two cells.
    #[arg(long, requires = "to")]
    from: Option<usize>,
    #[arg(long, requires = "from")]
    to: Option<usize>,
    /// Cells whose neighbourhood of radius `--radius` is reported.
    #[arg(long, value_delimiter = ',', requires = "radius")]
    seeds: Option<Vec<usize>>,
    #[arg(long)]
    radius: Option<usize>,
    /// Cells split into coboundary-connected components.
    #[arg(long, value_delimiter = ',')]
    components: Option<Vec<usize>>,
    /// Emit the coface graph as an edge list instead of JSON.
    #[arg(long)]
    edge_list: bool,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum CoverCommand {
    /// Build a cover from a monodromy spec.
    Build(CoverBuildArgs),
    /// Build a standard tower and report injectivity radii.
    Tower(TowerArgs),
}

#[derive(Args, Serialize)]
struct CoverBuildArgs {
    /// Base complex JSON file; `-` or absent reads stdin.
    #[arg(long)]
    base: Option<PathBuf>,
    /// Monodromy spec JSON file.
    #[arg(long)]
    spec: PathBuf,
    /// Also write the total complex to this file.
    #[arg(long)]
    #[serde(skip)]
    total_out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct TowerSpec {
    #[arg(long, value_enum, default_value_t = TowerFamily::Torus)]
    tower: TowerFamily,
    /// Torus: fiber sizes k (fiber Z_k x Z_k). Cycle: degrees of the successive covers.
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
}

#[derive(Args, Serialize)]
struct TowerArgs {
    #[command(flatten)]
    spec: TowerSpec,
    /// Largest radius tried for injectivity.
    #[arg(long, default_value_t = 4)]
    max_radius: usize,
    /// Also write the top complex to this file.
    #[arg(long)]
    #[serde(skip)]
    top_out: Option<PathBuf>,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum DualCommand {
    /// Dual complex of a closed triangulated manifold.
    Build(DualBuildArgs),
}

#[derive(Args, Serialize)]
struct DualBuildArgs {
    #[command(flatten)]
    input: ComplexArg,
    /// Also write the dual complex to this file.
    #[arg(long)]
    #[serde(skip)]
    dual_out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct FillArgs {
    #[command(flatten)]
    input: ComplexArg,
    /// Chain JSON file (`{ "degree", "coeff", "values" }`).
    #[arg(long)]
    chain: PathBuf,
}

#[derive(Args, Serialize)]
struct ExpanderfillArgs {
    /// Primal manifold complex; `-` or absent reads stdin.
    #[command(flatten)]
    input: ComplexArg,
    /// Dual 1-chain; without it `--samples` random dual 1-boundaries are used.
    #[arg(long)]
    chain: Option<PathBuf>,
    /// Cocycle expansion constant in degree n-2, e.g. `5/3`; computed exactly when absent.
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long, default_value_t = 30)]
    samples: usize,
    #[arg(long, default_value_t = 0.2)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Serialize)]
struct DehnArgs {
    #[command(flatten)]
    input: ComplexArg,
    /// Degree k of the sampled boundaries.
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value = "z2")]
    coeff: String,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Serialize)]
struct LiftArgs {
    #[command(flatten)]
    spec: TowerSpec,
    /// Cochain on the top complex; without it `--samples` random local cochains are used.
    #[arg(long)]
    cochain: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    samples: usize,
    /// Radius of the ball around a random vertex holding each random cochain.
    #[arg(long, default_value_t = 1)]
    radius: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Serialize)]
struct Witness0Args {
    #[command(flatten)]
    spec: TowerSpec,
    /// Isoperimetric constant, e.g. `1/5`.
    #[arg(long)]
    kappa: String,
    #[arg(long, default_value = "z2")]
    coeff: String,
}

#[derive(Args, Serialize)]
struct GenArgs {
    /// cycle, simplex_skeleton, simplex_boundary, torus2, torus3, rp2, sphere, random_lm
    family: String,
    params: Vec<String>,
}

/// A failure with the process exit code it maps to.
struct Failure {
    kind: String,
    message: String,
    code: u8,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            kind: e.kind().to_string(),
            message: e.to_string(),
            code: e.exit_code() as u8,
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            kind: "Io".into(),
            message: e.to_string(),
            code: 1,
        }
    }
}

type CliResult<T> = Result<T, Failure>;

/// Report body: the JSON result plus an optional CSV rendering.
struct Output {
    exact: bool,
    result: Value,
    csv: Option<String>,
    text: Option<String>,
}

impl Output {
    fn json(exact: bool, result: impl Serialize) -> CliResult<Self> {
        Ok(Output {
            exact,
            result: to_value(result)?,
            csv: None,
            text: None,
        })
    }
}

fn to_value(x: impl Serialize) -> CliResult<Value> {
    serde_json::to_value(x).map_err(|e| Error::Format(e.to_string()).into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let err = json!({ "error": f.kind, "message": f.message });
            eprintln!("{err}");
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let common = &cli.common;
    let limits = Limits {
        table_limit: common.table_limit,
        node_budget: common.budget,
        workers: common
            .workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
        cap: common.cap,
    };
    if let Command::Gen(args) = &cli.command {
        let x = generate(&GeneratorSpec::from_args(&args.family, &args.params)?)?;
        return emit(common.out.as_ref(), &(complex_to_json(&x) + "\n"));
    }
    let out = match &cli.command {
        Command::Check(a) => check(a)?,
        Command::Expansion(a) => expansion(a, &limits)?,
        Command::Metric(a) => metric(a)?,
        Command::Cover(CoverCommand::Build(a)) => cover_build(a)?,
        Command::Cover(CoverCommand::Tower(a)) => cover_tower(a)?,
        Command::Dual(DualCommand::Build(a)) => dual_build(a)?,
        Command::Fill(a) => fill(a, &limits)?,
        Command::Expanderfill(a) => expanderfill(a, &limits)?,
        Command::Dehn(a) => dehn(a, &limits)?,
        Command::Lift(a) => lift(a, &limits)?,
        Command::Witness0(a) => witness0(a, &limits)?,
        Command::Gen(_) => unreachable!("handled above"),
    };
    if let Some(text) = out.text {
        return emit(common.out.as_ref(), &text);
    }
    if common.format == Format::Csv {
        let csv = out
            .csv
            .ok_or_else(|| Error::BadParameters("this command has no CSV output".into()))?;
        return emit(common.out.as_ref(), &csv);
    }
    let report = json!({
        "tool": "cobound",
        "version": VERSION,
        "command": to_value(&cli.command)?,
        "config": to_value(common)?,
        "exact": out.exact,
        "result": out.result,
    });
    let mut s = serde_json::to_string_pretty(&report).map_err(|e| Error::Format(e.to_string()))?;
    s.push('\n');
    emit(common.out.as_ref(), &s)
}

fn emit(out: Option<&PathBuf>, s: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, s)?,
        None => io::stdout().write_all(s.as_bytes())?,
    }
    Ok(())
}

fn read_input(path: Option<&PathBuf>) -> CliResult<String> {
    match path {
        Some(p) if p.as_os_str() != "-" => Ok(fs::read_to_string(p)?),
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn load_complex(arg: &ComplexArg) -> CliResult<CellComplex> {
    Ok(parse_complex(&read_input(arg.complex.as_ref())?)?)
}

fn load_cochain(x: &CellComplex, path: &PathBuf) -> CliResult<Cochain> {
    let file: CochainFile =
        serde_json::from_str(&fs::read_to_string(path)?).map_err(|e| Error::Format(e.to_string()))?;
    Ok(Cochain::from_file(x, &file)?)
}

fn group(s: &str) -> CliResult<CoefficientGroup> {
    Ok(s.parse()?)
}

fn check(a: &CheckArgs) -> CliResult<Output> {
    let x = load_complex(&a.input)?;
    let simplicial = x.simplices().is_ok();
    let manifold = simplicial.then(|| check_closed_manifold(&x).err().map(|e| e.to_string()));
    Output::json(
        true,
        json!({
            "name": x.name(),
            "dim": x.dim(),
            "cells": x.counts(),
            "euler_characteristic": x.euler_characteristic(),
            "valid": true,
            "simplicial": simplicial,
            "closed_manifold": manifold.as_ref().map(Option::is_none),
            "manifold_failure": manifold.flatten(),
        }),
    )
}

fn expansion(a: &ExpansionArgs, limits: &Limits) -> CliResult<Output> {
    let x = load_complex(&a.input)?;
    let g = group(&a.coeff)?;
    let variant: Variant = a.variant.parse()?;
    let report = match a.algo {
        AlgoArg::Auto => expansion_auto(&x, a.dim, &g, variant, limits)?,
        AlgoArg::FullTable => expansion_constant(&x, a.dim, &g, variant, limits)?,
        AlgoArg::CutEnumeration => {
            if a.dim != 0 {
                return Err(Error::BadParameters("cut enumeration is for degree 0".into()).into());
            }
            expansion_by_cuts(&x, &g, variant, limits)?
        }
        AlgoArg::SampledUpperBound => sampled_upper_bound(&x, a.dim, &g, variant, a.samples, a.seed, limits)?,
    };
    let csv = format!("# cobound expansion csv v1\n{CSV_HEADER}\n{}\n", report.csv_row());
    let mut out = Output::json(report.exact, &report)?;
    out.csv = Some(csv);
    Ok(out)
}

fn metric(a: &MetricArgs) -> CliResult<Output> {
    let x = load_complex(&a.input)?;
    let g = group(&a.coeff)?;
    if a.dim > x.dim() {
        return Err(Error::DegreeOutOfRange {
            degree: a.dim,
            top: x.dim(),
        }
        .into());
    }
    let graph = CofaceGraph::new(&x, a.dim, &g);
    if a.edge_list {
        return Ok(Output {
            exact: true,
            result: Value::Null,
            csv: None,
            text: Some(graph.to_edge_list()),
        });
    }
    let mut result = json!({
        "complex": x.name(),
        "dim": a.dim,
        "coeff": g,
        "cells": graph.len(),
        "edges": graph.edges().count(),
    });
    if let (Some(from), Some(to)) = (a.from, a.to) {
        result["distance"] = to_value(graph.distance(from, to)?)?;
    }
    if let (Some(seeds), Some(r)) = (&a.seeds, a.radius) {
        result["neighbourhood"] = to_value(graph.neighbourhood(seeds, r)?)?;
    }
    if let Some(cells) = &a.components {
        result["components"] = to_value(graph.components(cells)?)?;
    }
    Output::json(true, result)
}

fn cover_build(a: &CoverBuildArgs) -> CliResult<Output> {
    let base = parse_complex(&read_input(a.base.as_ref())?)?;
    let spec: MonodromySpec =
        serde_json::from_str(&fs::read_to_string(&a.spec)?).map_err(|e| Error::Format(e.to_string()))?;
    let map = build_cover(&base, &spec)?;
    if let Some(p) = &a.total_out {
        fs::write(p, complex_to_json(&map.total) + "\n")?;
    }
    let projection: Vec<&[usize]> = (0..=map.total.dim()).map(|k| map.projection(k)).collect();
    Output::json(
        true,
        json!({
            "base": base.name(),
            "fiber": map.fiber,
            "cells": map.total.counts(),
            "total": ComplexFile::from_complex(&map.total),
            "projection": projection,
        }),
    )
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn build_tower(spec: &TowerSpec) -> CliResult<Tower> {
    match spec.tower {
        TowerFamily::Torus => {
            let ks = spec.k.clone().unwrap_or_else(|| vec![1, 2, 3]);
            if ks.is_empty() || ks.contains(&0) {
                return Err(Error::BadParameters("fiber sizes must be positive".into()).into());
            }
            let top = ks.iter().fold(1, |acc, &k| acc / gcd(acc, k) * k);
            Ok(Tower::torus(&ks, top)?)
        }
        TowerFamily::Cycle => {
            let ks = spec.k.clone().unwrap_or_else(|| vec![4, 2]);
            let base = cobound::generators::cycle(3)?;
            Ok(Tower::cyclic_chain(&base, &ks)?)
        }
    }
}

fn cover_tower(a: &TowerArgs) -> CliResult<Output> {
    let tower = build_tower(&a.spec)?;
    if let Some(p) = &a.top_out {
        fs::write(p, complex_to_json(&tower.top) + "\n")?;
    }
    let z2 = CoefficientGroup::z2();
    let levels: Vec<Value> = tower
        .levels
        .iter()
        .map(|m| {
            json!({
                "name": m.base.name(),
                "cells": m.base.counts(),
                "fiber_over_level": m.fiber,
                "injectivity_radius_at_vertex_0": injectivity_radius(m, 0, &z2, 0, a.max_radius),
            })
        })
        .collect();
    Output::json(
        true,
        json!({ "top": tower.top.name(), "cells": tower.top.counts(), "levels": levels }),
    )
}

fn dual_build(a: &DualBuildArgs) -> CliResult<Output> {
    let x = load_complex(&a.input)?;
    let ds = dual_complex(&x)?;
    if let Some(p) = &a.dual_out {
        fs::write(p, complex_to_json(ds.dual()) + "\n")?;
    }
    Output::json(
        true,
        json!({ "dual": ComplexFile::from_complex(ds.dual()), "table": ds.table() }),
    )
}

fn fill(a: &FillArgs, limits: &Limits) -> CliResult<Output> {
    let x = load_complex(&a.input)?;
    let p = load_cochain(&x, &a.chain)?;
    let f = min_filling(&x, &p, limits)?;
    Output::json(
        f.exact,
        json!({ "p_norm": p.hamming_norm(), "norm": f.norm, "exact": f.exact, "q": f.q.to_file() }),
    )
}

fn expanderfill(a: &ExpanderfillArgs, limits: &Limits) -> CliResult<Output> {
    let x = load_complex(&a.input)?;
    let ds = dual_complex(&x)?;
    let z2 = CoefficientGroup::z2();
    if ds.dim() < 2 {
        return Err(Error::BadParameters("the manifold must have dimension at least 2".into()).into());
    }
    let lambda = match &a.lambda {
        Some(s) => s.parse::<Lambda>()?,
        None => expansion_auto(&x, ds.dim() - 2, &z2, Variant::Cocycle, limits)?.lambda,
    };
    let cycles = match &a.chain {
        Some(path) => vec![load_cochain(ds.dual(), path)?],
        None => sample_boundaries(ds.dual(), &z2, 1, a.samples, a.density, a.seed)?,
    };
    let runs = cycles
        .iter()
        .map(|p| {
            let f = expander_filling(&ds, lambda, p, limits)?;
            Ok(json!({ "p": p.to_file(), "q": f.q.to_file(), "r_norm": f.r.hamming_norm(), "certificate": f.certificate }))
        })
        .collect::<CliResult<Vec<Value>>>()?;
    Output::json(true, json!({ "lambda": lambda, "runs": runs }))
}

fn dehn(a: &DehnArgs, limits: &Limits) -> CliResult<Output> {
    let x = load_complex(&a.input)?;
    let g = group(&a.coeff)?;
    let cycles = sample_boundaries(&x, &g, a.dim, a.samples, a.density, a.seed)?;
    let profile = dehn_profile(&x, &cycles, limits)?;
    let csv = format!("# cobound dehn csv v1\n{}", profile.to_csv());
    let mut out = Output::json(profile.exact, &profile)?;
    out.csv = Some(csv);
    Ok(out)
}

fn lift(a: &LiftArgs, limits: &Limits) -> CliResult<Output> {
    let tower = build_tower(&a.spec)?;
    let z2 = CoefficientGroup::z2();
    let lambdas = level_lambdas(&tower, 0, &z2, limits)?;
    let cochains = match &a.cochain {
        Some(path) => vec![load_cochain(&tower.top, path)?],
        None => sample_local_cochains(&tower.top, 0, &z2, a.radius, a.samples, a.seed)?,
    };
    let reports = cochains
        .iter()
        .map(|c| Ok(lifting_experiment(&tower, c, &lambdas, limits)?))
        .collect::<CliResult<Vec<_>>>()?;
    let lifted = reports.iter().filter(|r| r.holds()).count();
    let levels: Vec<Value> = tower
        .levels
        .iter()
        .zip(&lambdas)
        .map(|(m, l)| json!({ "name": m.base.name(), "lambda": l }))
        .collect();
    Output::json(
        true,
        json!({
            "top": tower.top.name(),
            "levels": levels,
            "experiments": reports.len(),
            "lifted": lifted,
            "not_lifted": reports.len() - lifted,
            "reports": reports,
        }),
    )
}

fn witness0(a: &Witness0Args, limits: &Limits) -> CliResult<Output> {
    let tower = build_tower(&a.spec)?;
    let g = group(&a.coeff)?;
    let kappa = match a.kappa.parse::<Lambda>()? {
        Lambda::Finite(r) => r,
        Lambda::Infinite => return Err(Error::BadParameters("kappa must be finite".into()).into()),
    };
    let mut levels: Vec<CellComplex> = tower.levels.iter().map(|m| m.base.clone()).collect();
    levels.push(tower.top.clone());
    let w = zero_dim_witness(&levels, kappa, &g, limits)?;
    Output::json(true, w)
}
