use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use super::{with_schema, StrategyArg};
use crate::config::Config;
use crate::exact::exact_min_color_path;
use crate::gen::{gen_grid, GridParams};
use crate::round::{check_solution, solve};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Suite {
    /// Sixteen grids up to 8x8 with at most 10 colors.
    Small,
    /// Forty grids up to 12x12 with at most 12 colors.
    Medium,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value = "small")]
    suite: Suite,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "ball_carving")]
    strategy: StrategyArg,
    /// Also write the table, including timings, as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct Row {
    instance: String,
    vertices: usize,
    colors: usize,
    opt: f64,
    lp: f64,
    alg: f64,
    ratio: f64,
    feasible: bool,
    #[serde(skip)]
    ms: f64,
}

pub fn suite_params(suite: Suite, seed: u64) -> Vec<(String, GridParams, u64)> {
    let (count, sides, max_colors) = match suite {
        Suite::Small => (16, 4, 10),
        Suite::Medium => (40, 8, 12),
    };
    (0..count)
        .map(|i| {
            let w = 5 + i % sides;
            let h = 5 + (i / sides) % sides;
            let m = 3 + (i * 7) % (max_colors - 2);
            let size = 3 + i % 5;
            let s = seed.wrapping_mul(1_000_003).wrapping_add(i as u64);
            (
                format!("grid-{w}x{h}-m{m}-s{size}-{i}"),
                GridParams::new(w, h, m, size),
                s,
            )
        })
        .collect()
}

pub fn run(args: &BenchArgs) -> Result<(Value, i32)> {
    let config = Config {
        strategy: args.strategy.into(),
        seed: args.seed,
        ..Config::default()
    };
    let mut rows = Vec::new();
    for (name, params, seed) in suite_params(args.suite, args.seed) {
        let inst = gen_grid(&params, seed)?;
        let p = &inst.terminals[0];
        let opt = exact_min_color_path(&inst.graph, p.s, p.t, config.exact_limit)?.value;
        let started = Instant::now();
        let sol = solve(&inst, &config)?;
        let ms = started.elapsed().as_secs_f64() * 1e3;
        let ratio = if opt > 0.0 { sol.objective / opt } else if sol.objective == 0.0 { 1.0 } else { f64::INFINITY };
        rows.push(Row {
            instance: name,
            vertices: inst.graph.num_vertices(),
            colors: inst.num_colors(),
            opt,
            lp: sol.lower_bound,
            alg: sol.objective,
            ratio,
            feasible: check_solution(&inst, &sol),
            ms,
        });
    }
    if let Some(path) = &args.csv {
        let mut csv = String::from("instance,vertices,colors,opt,lp,alg,ratio,ms\n");
        for r in &rows {
            writeln!(
                csv,
                "{},{},{},{},{:.6},{},{:.4},{:.3}",
                r.instance, r.vertices, r.colors, r.opt, r.lp, r.alg, r.ratio, r.ms
            )
            .expect("writing to a String cannot fail");
        }
        fs::write(path, csv).map_err(Error::Io)?;
    }
    let max_ratio = rows.iter().map(|r| r.ratio).fold(1.0, f64::max);
    let mean_ratio = rows.iter().map(|r| r.ratio).sum::<f64>() / rows.len().max(1) as f64;
    let all_feasible = rows.iter().all(|r| r.feasible);
    let out = with_schema(json!({
        "suite": format!("{:?}", args.suite).to_lowercase(),
        "seed": args.seed,
        "strategy": config.strategy,
        "rows": rows,
        "max_ratio": max_ratio,
        "mean_ratio": mean_ratio,
        "all_feasible": all_feasible,
    }));
    Ok((out, if all_feasible { 0 } else { 1 }))
}
