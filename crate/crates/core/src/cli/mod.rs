//! `minpath` command-line front end. Every command prints one JSON document
//! (with `"schema": 1`) on stdout; diagnostics go to stderr. Exit codes:
//! 0 success, 1 domain failure, 2 usage or input error.

mod bench;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::config::{Config, Mode};
use crate::decomp::{build_color_graph, decompose, verify_decomposition, Strategy};
use crate::exact::{exact_min_color_path, exact_min_separator, exact_prize};
use crate::gen::{add_color_connector, gen_diamond_hardness, gen_grid, gen_random_hypergraph, GridParams, HardnessParams};
use crate::instance::{normalize_terminals, validate, ColorSet, Instance};
use crate::lp::{solve_hitting_lp, LpOptions};
use crate::planar::{build_dual, faces, ReferencePath};
use crate::round::{solve, solve_prize, solve_steiner};
use crate::separator::{SeparatorOracle, SeparatorOutcome};
use crate::{Error, Result};

pub const SCHEMA: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "minpath", version, about = "Minimum-color paths on color-connected planar graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check every instance invariant and list the violations.
    Validate(InstanceArg),
    /// Approximate min-color path (every pair must be connected).
    Solve(SolveArgs),
    /// Approximate min-color Steiner forest.
    SolveSteiner(SolveArgs),
    /// Approximate prize-collecting Steiner forest.
    SolvePrize(SolveArgs),
    /// Minimum-weight color separator for one pair.
    Separator(SeparatorArgs),
    /// Solve the hitting LP by cutting planes.
    Lp(LpArgs),
    /// Exact solvers for small instances.
    Exact(ExactArgs),
    /// Small-diameter decomposition of the color intersection graph.
    Decompose(DecomposeArgs),
    /// Generate instances.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Run a benchmark suite against the exact solver.
    Bench(bench::BenchArgs),
}

#[derive(Args, Debug)]
struct InstanceArg {
    #[arg(long)]
    instance: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
enum StrategyArg {
    BallCarving,
    KprChop,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::BallCarving => Strategy::BallCarving,
            StrategyArg::KprChop => Strategy::KprChop,
        }
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long, value_enum, default_value = "ball_carving")]
    strategy: StrategyArg,
    #[arg(long, conflicts_with = "repair")]
    strict: bool,
    /// Add colors greedily instead of failing when a pair stays disconnected.
    #[arg(long)]
    repair: bool,
    #[arg(long)]
    max_cuts: Option<usize>,
    /// Also write the report to this file.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Include wall-clock timings (makes the output non-deterministic).
    #[arg(long)]
    timings: bool,
}

impl SolveArgs {
    fn config(&self) -> Config {
        Config {
            epsilon: self.epsilon,
            tolerance: self.tol,
            strategy: self.strategy.into(),
            mode: if self.repair { Mode::Repair } else { Mode::Strict },
            max_cuts: self.max_cuts,
            ..Config::default()
        }
    }
}

#[derive(Args, Debug)]
struct SeparatorArgs {
    #[arg(long)]
    instance: PathBuf,
    /// JSON array of per-color weights (default: the instance's weights).
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pair: usize,
    /// Write the colored dual graph to this file.
    #[arg(long)]
    dump_dual: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LpArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long)]
    max_cuts: Option<usize>,
    /// Add forfeit variables for pairs with finite prizes.
    #[arg(long)]
    prize: bool,
    /// Write every generated cut to this file.
    #[arg(long)]
    dump_cuts: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ExactKind {
    Path,
    Separator,
    Prize,
}

#[derive(Args, Debug)]
struct ExactArgs {
    #[arg(value_enum)]
    kind: ExactKind,
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = crate::exact::DEFAULT_LIMIT)]
    limit: usize,
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pair: usize,
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    #[arg(long)]
    instance: PathBuf,
    /// JSON array of per-color node weights.
    #[arg(long)]
    weights: PathBuf,
    #[arg(long, default_value_t = 0.4)]
    delta: f64,
    #[arg(long, value_enum, default_value = "ball_carving")]
    strategy: StrategyArg,
}

#[derive(Subcommand, Debug)]
enum GenCommand {
    /// Grid world with random connected obstacles.
    Grid {
        #[arg(long, default_value_t = 8)]
        width: usize,
        #[arg(long, default_value_t = 8)]
        height: usize,
        #[arg(long, default_value_t = 5)]
        obstacles: usize,
        #[arg(long, default_value_t = 4)]
        size: usize,
        #[arg(long, default_value_t = 1)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Diamond path built from a random hypergraph.
    Hardness {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        #[arg(long, default_value_t = 4.0)]
        k: f64,
        /// Hyperedge probability (default n^(alpha-(r-1))).
        #[arg(long)]
        p: Option<f64>,
        /// Add the all-colors hub vertex (non-planar, color-connected).
        #[arg(long)]
        connector: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path)?;
    crate::instance::parse(&text)
}

fn read_weights(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|err| {
        let path = err.path().to_string();
        let inner = err.into_inner();
        Error::Parse {
            path,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn with_schema(mut v: Value) -> Value {
    if let Value::Object(map) = &mut v {
        map.insert("schema".into(), json!(SCHEMA));
    }
    v
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report types serialize")
}

fn cmd_solve(args: &SolveArgs, which: fn(&Instance, &Config) -> Result<crate::Solution>) -> Result<Value> {
    let instance = read_instance(&args.instance)?;
    let started = Instant::now();
    let sol = which(&instance, &args.config())?;
    let mut out = to_value(&sol);
    if args.timings {
        out["timings_ms"] = json!({ "total": started.elapsed().as_secs_f64() * 1e3 });
    }
    let out = with_schema(out);
    if let Some(path) = &args.report {
        write_json(path, &out)?;
    }
    Ok(out)
}

fn cmd_separator(args: &SeparatorArgs) -> Result<Value> {
    let instance = read_instance(&args.instance)?;
    instance.ensure_valid()?;
    let pair = instance.pair(args.pair)?.clone();
    let (norm, base) = normalize_terminals(&instance);
    let weights = match &args.weights {
        Some(p) => read_weights(p)?,
        None => norm.graph.color_weights(),
    };
    let mut oracle = SeparatorOracle::new(&norm.graph, pair.s, pair.t)?;
    let outcome = oracle.solve(&weights)?;
    if let Some(path) = &args.dump_dual {
        write_json(path, &with_schema(json!({ "dual": oracle.dual() })))?;
    }
    let separator = match outcome {
        SeparatorOutcome::Separator(r) => to_value(&r),
        SeparatorOutcome::NoSeparator => Value::Null,
    };
    Ok(with_schema(json!({
        "pair": args.pair,
        "separator": separator,
        "terminal_colors": base,
    })))
}

fn cmd_lp(args: &LpArgs) -> Result<Value> {
    let instance = read_instance(&args.instance)?;
    instance.ensure_valid()?;
    let (norm, base) = normalize_terminals(&instance);
    let opts = LpOptions {
        tolerance: args.tol,
        max_cuts: args.max_cuts,
        prize: args.prize,
    };
    let st = solve_hitting_lp(&norm, &opts)?;
    if let Some(path) = &args.dump_cuts {
        write_json(path, &with_schema(json!({ "cuts": st.constraints })))?;
    }
    Ok(with_schema(json!({
        "value": st.objective_value,
        "x": st.x,
        "y": st.y,
        "cuts": st.constraints.len(),
        "iterations": st.iterations,
        "terminal_colors": base,
    })))
}

fn cmd_exact(args: &ExactArgs) -> Result<Value> {
    let instance = read_instance(&args.instance)?;
    let g = &instance.graph;
    let p = instance.pair(args.pair)?.clone();
    let out = match args.kind {
        ExactKind::Path => to_value(&exact_min_color_path(g, p.s, p.t, args.limit)?),
        ExactKind::Separator => {
            let weights = match &args.weights {
                Some(path) => read_weights(path)?,
                None => g.color_weights(),
            };
            match exact_min_separator(g, &weights, p.s, p.t, args.limit)? {
                Some((colors, weight)) => json!({ "separator": { "colors": colors, "weight": weight } }),
                None => json!({ "separator": null }),
            }
        }
        ExactKind::Prize => to_value(&exact_prize(&instance, args.limit)?),
    };
    Ok(with_schema(out))
}

fn cmd_decompose(args: &DecomposeArgs) -> Result<Value> {
    let instance = read_instance(&args.instance)?;
    let g = &instance.graph;
    let weights = read_weights(&args.weights)?;
    if weights.len() != g.num_colors() {
        return Err(Error::WeightCount {
            expected: g.num_colors(),
            got: weights.len(),
        });
    }
    let f = faces(g)?;
    let dual = build_dual(g, &f, &ReferencePath { vertices: vec![], edges: vec![] });
    let cg = build_color_graph(&dual, &ColorSet::full(g.num_colors()), &weights);
    let dec = decompose(&cg, args.delta, args.strategy.into())?;
    let report = verify_decomposition(&cg, &dec);
    let components: Vec<ColorSet> = dec
        .components
        .iter()
        .map(|c| c.iter().map(|&u| cg.colors[u]).collect())
        .collect();
    Ok(with_schema(json!({
        "delta": args.delta,
        "cut": dec.cut_colors(&cg),
        "components": components,
        "max_diameter": report.max_diameter,
        "diameter_violations": report.diameter_violations.len(),
    })))
}

fn emit_instance(instance: &Instance, out: &Option<PathBuf>) -> Result<Value> {
    let text = crate::instance::serialize(instance);
    match out {
        Some(path) => {
            fs::write(path, text + "\n")?;
            Ok(with_schema(json!({
                "out": path,
                "vertices": instance.graph.num_vertices(),
                "edges": instance.graph.num_edges(),
                "colors": instance.num_colors(),
                "pairs": instance.terminals.len(),
            })))
        }
        None => Ok(serde_json::from_str(&text).expect("serialized instance is JSON")),
    }
}

fn cmd_gen(cmd: &GenCommand) -> Result<Value> {
    match cmd {
        GenCommand::Grid {
            width,
            height,
            obstacles,
            size,
            pairs,
            seed,
            out,
        } => {
            let params = GridParams {
                pairs: *pairs,
                ..GridParams::new(*width, *height, *obstacles, *size)
            };
            emit_instance(&gen_grid(&params, *seed)?, out)
        }
        GenCommand::Hardness {
            n,
            r,
            alpha,
            beta,
            k,
            p,
            connector,
            seed,
            out,
        } => {
            let params = HardnessParams {
                n: *n,
                r: *r,
                alpha: *alpha,
                beta: *beta,
                k: *k,
            };
            params.validate()?;
            let hg = gen_random_hypergraph(*n, p.unwrap_or_else(|| params.p()), *r, *seed)?;
            let mut inst = gen_diamond_hardness(&hg, &params, *seed)?;
            if *connector {
                inst = add_color_connector(&inst);
            }
            emit_instance(&inst, out)
        }
    }
}

fn dispatch(cmd: &Command) -> Result<(Value, i32)> {
    let ok = |v| Ok((v, 0));
    match cmd {
        Command::Validate(a) => {
            let instance = read_instance(&a.instance)?;
            let report = validate(&instance);
            let code = if report.is_valid() { 0 } else { 1 };
            Ok((
                with_schema(json!({ "valid": report.is_valid(), "violations": report.violations })),
                code,
            ))
        }
        Command::Solve(a) => ok(cmd_solve(a, solve)?),
        Command::SolveSteiner(a) => ok(cmd_solve(a, solve_steiner)?),
        Command::SolvePrize(a) => ok(cmd_solve(a, solve_prize)?),
        Command::Separator(a) => ok(cmd_separator(a)?),
        Command::Lp(a) => ok(cmd_lp(a)?),
        Command::Exact(a) => ok(cmd_exact(a)?),
        Command::Decompose(a) => ok(cmd_decompose(a)?),
        Command::Gen(g) => ok(cmd_gen(g)?),
        Command::Bench(b) => bench::run(b),
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("MINPATH_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // fails only if a pool already exists, which is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// its JSON to `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    let (value, code) = match dispatch(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            let v = with_schema(json!({ "error": { "kind": e.kind(), "message": e.to_string() } }));
            (v, e.exit_code())
        }
    };
    let text = serde_json::to_string_pretty(&value).expect("JSON values serialize");
    if writeln!(out, "{text}").is_err() {
        return 2;
    }
    code
}
