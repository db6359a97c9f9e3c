//! Rounding the hitting LP to a color set and extracting the paths.
//!
//! Colors with `x ≥ ε` are taken outright. The remaining colors form the
//! color intersection graph with node weights `x`; a decomposition of
//! diameter `1/2 − ε` contributes its cut. The union hits every separator,
//! so every pair has a path using only chosen colors.

use serde::Serialize;

use crate::config::{Config, Mode};
use crate::decomp::{build_color_graph, decompose};
use crate::instance::{normalize_terminals, ColorSet, ColoredPlanarGraph, Instance, TerminalPair, VertexId};
use crate::lp::{solve_hitting_lp, LpOptions, LpState};
use crate::planar::{build_dual, faces, ReferencePath};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairPath {
    pub pair: usize,
    /// Vertex path from `s` to `t`; `None` when the pair was forfeited.
    pub path: Option<Vec<VertexId>>,
}

impl PairPath {
    pub fn forfeited(&self) -> bool {
        self.path.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Solution {
    pub colors: ColorSet,
    pub paths: Vec<PairPath>,
    /// `|colors|` plus the prizes of forfeited pairs.
    pub objective: f64,
    /// LP optimum plus the colors every solution has to pay for.
    pub lower_bound: f64,
    pub ratio: f64,
    /// Terminal colors removed before solving and added back.
    pub base_colors: ColorSet,
    /// Colors added by repair mode (empty in strict mode).
    pub repaired: ColorSet,
    pub lp_iterations: usize,
    pub cuts: usize,
}

/// Algorithm 1 on a normalized plane instance: pre-round `x ≥ ε`, decompose
/// the rest with `Δ = 1/2 − ε`, add the cut.
pub fn round_hitting(g: &ColoredPlanarGraph, x: &[f64], config: &Config) -> Result<ColorSet> {
    config.validate()?;
    let m = g.num_colors();
    if x.len() != m {
        return Err(Error::WeightCount { expected: m, got: x.len() });
    }
    let pre: ColorSet = (0..m).filter(|&c| x[c] >= config.epsilon).collect();
    if (0..m).all(|c| x[c] >= config.epsilon || x[c] <= 0.0) {
        // nothing left to decompose: a weightless graph has an empty cut
        return Ok(pre);
    }
    let rest: ColorSet = (0..m).filter(|&c| x[c] < config.epsilon).collect();
    let f = faces(g)?;
    let dual = build_dual(g, &f, &ReferencePath { vertices: vec![], edges: vec![] });
    let cg = build_color_graph(&dual, &rest, x);
    let dec = decompose(&cg, config.delta(), config.strategy)?;
    Ok(pre.union(&dec.cut_colors(&cg)))
}

/// BFS through vertices whose colors all lie in `allowed`.
pub fn extract_path(g: &ColoredPlanarGraph, allowed: &ColorSet, s: VertexId, t: VertexId) -> Option<Vec<VertexId>> {
    g.bfs_path(s, t, |v| g.colors(v).is_subset(allowed))
}

/// Adds colors until `s` reaches `t`, each time the color that enlarges
/// the reachable region most (lowest id on ties).
fn repair(g: &ColoredPlanarGraph, allowed: &mut ColorSet, s: VertexId, t: VertexId) -> ColorSet {
    let mut added = ColorSet::new();
    let reach = |a: &ColorSet| {
        g.bfs_parents(s, |v| g.colors(v).is_subset(a))
            .iter()
            .filter(|&&p| p != usize::MAX)
            .count()
    };
    while extract_path(g, allowed, s, t).is_none() {
        let best = (0..g.num_colors())
            .filter(|&c| !allowed.contains(c))
            .max_by_key(|&c| {
                let mut a = allowed.clone();
                a.insert(c);
                (reach(&a), std::cmp::Reverse(c))
            });
        let Some(c) = best else { break };
        allowed.insert(c);
        added.insert(c);
    }
    added
}

fn check_pairs_connected(instance: &Instance) -> Result<()> {
    let g = &instance.graph;
    for p in &instance.terminals {
        for v in [p.s, p.t] {
            if v >= g.num_vertices() {
                return Err(Error::VertexOutOfRange(v));
            }
        }
        if g.bfs_path(p.s, p.t, |_| true).is_none() {
            return Err(Error::Disconnected { s: p.s, t: p.t });
        }
    }
    Ok(())
}

fn preflight(instance: &Instance, config: &Config) -> Result<()> {
    config.validate()?;
    if !instance.graph.is_planar() {
        return Err(Error::NotPlanar);
    }
    check_pairs_connected(instance)?;
    instance.ensure_valid()
}

fn lp_options(config: &Config, prize: bool) -> LpOptions {
    LpOptions {
        tolerance: config.tolerance,
        max_cuts: config.max_cuts,
        prize,
    }
}

/// Chosen colors, colors added by repair, and one path per pair.
type Rounded = (ColorSet, ColorSet, Vec<Option<Vec<VertexId>>>);

/// Rounds `x`, then extracts a path for every pair in `keep`.
fn round_and_extract(
    g: &ColoredPlanarGraph,
    pairs: &[TerminalPair],
    keep: &[bool],
    x: &[f64],
    config: &Config,
) -> Result<Rounded> {
    let mut colors = if keep.iter().any(|&k| k) {
        round_hitting(g, x, config)?
    } else {
        ColorSet::new()
    };
    let mut repaired = ColorSet::new();
    let mut paths = Vec::with_capacity(pairs.len());
    for (k, p) in pairs.iter().enumerate() {
        if !keep[k] {
            paths.push(None);
            continue;
        }
        let path = match extract_path(g, &colors, p.s, p.t) {
            Some(path) => path,
            None if config.mode == Mode::Strict => return Err(Error::InvariantViolation { pair: k }),
            None => {
                repaired = repaired.union(&repair(g, &mut colors, p.s, p.t));
                extract_path(g, &colors, p.s, p.t).ok_or(Error::Disconnected { s: p.s, t: p.t })?
            }
        };
        paths.push(Some(path));
    }
    Ok((colors, repaired, paths))
}

fn finish(
    colors: ColorSet,
    base: ColorSet,
    repaired: ColorSet,
    paths: Vec<PairPath>,
    forfeit_cost: f64,
    lp: &LpState,
) -> Result<Solution> {
    let colors = colors.union(&base);
    let objective = colors.len() as f64 + forfeit_cost;
    let lower_bound = lp.objective_value + base.len() as f64;
    if objective < lower_bound - 1e-6 {
        return Err(Error::Internal(format!(
            "objective {objective} below LP bound {lower_bound}"
        )));
    }
    Ok(Solution {
        colors,
        paths,
        objective,
        lower_bound,
        ratio: objective / lower_bound.max(1.0),
        base_colors: base,
        repaired,
        lp_iterations: lp.iterations,
        cuts: lp.constraints.len(),
    })
}

/// Min-color path (one pair) or Steiner forest (several pairs); every pair
/// must be connected.
pub fn solve(instance: &Instance, config: &Config) -> Result<Solution> {
    if !instance.all_must_connect() {
        return Err(Error::InvalidConfig(
            "instance has finite prizes; use the prize-collecting solver".into(),
        ));
    }
    preflight(instance, config)?;
    let (norm, base) = normalize_terminals(instance);
    let lp = solve_hitting_lp(&norm, &lp_options(config, false))?;
    let keep = vec![true; norm.terminals.len()];
    let (colors, repaired, paths) = round_and_extract(&norm.graph, &norm.terminals, &keep, &lp.x, config)?;
    let paths = paths
        .into_iter()
        .enumerate()
        .map(|(pair, path)| PairPath { pair, path })
        .collect();
    finish(colors, base, repaired, paths, 0.0, &lp)
}

/// Steiner forest: one LP over all pairs, one rounding, per-pair paths.
pub fn solve_steiner(instance: &Instance, config: &Config) -> Result<Solution> {
    solve(instance, config)
}

/// Prize-collecting Steiner forest. Pairs with `y ≥ 1/2` are forfeited;
/// for the rest `x` is scaled by `1/(1 − max y)` (at most 2) and rounded.
pub fn solve_prize(instance: &Instance, config: &Config) -> Result<Solution> {
    preflight(instance, config)?;
    if let Some(p) = instance.terminals.iter().find(|p| p.prize.is_nan() || p.prize < 0.0) {
        return Err(Error::InvalidConfig(format!("bad prize {}", p.prize)));
    }
    let n = instance.graph.num_vertices();

    // Mandatory pairs pay for their terminal colors; remove them globally.
    // Optional pairs get white pendant terminals so their colors are paid
    // only when the pair is connected.
    let forced = Instance::new(
        instance.graph.clone(),
        instance.terminals.iter().filter(|p| p.must_connect()).cloned().collect(),
    );
    let (_, base) = normalize_terminals(&forced);
    let mut g = instance.graph.without_colors(&base);
    let mut pairs = instance.terminals.clone();
    for p in pairs.iter_mut().filter(|p| !p.must_connect()) {
        for v in [&mut p.s, &mut p.t] {
            if !g.is_white(*v) {
                let pendant = g.add_vertex(ColorSet::new());
                g.add_edge(*v, pendant);
                *v = pendant;
            }
        }
    }
    let work = Instance::new(g, pairs);

    let lp = solve_hitting_lp(&work, &lp_options(config, true))?;
    let y = lp.y.clone().unwrap_or_default();
    let keep: Vec<bool> = work
        .terminals
        .iter()
        .enumerate()
        .map(|(k, p)| p.must_connect() || y[k] < 0.5)
        .collect();
    let ymax = keep
        .iter()
        .zip(&y)
        .filter(|(k, _)| **k)
        .map(|(_, &v)| v)
        .fold(0.0, f64::max);
    let x: Vec<f64> = lp.x.iter().map(|&v| (v / (1.0 - ymax)).min(1.0)).collect();
    let (colors, repaired, paths) = round_and_extract(&work.graph, &work.terminals, &keep, &x, config)?;

    let forfeit_cost: f64 = work
        .terminals
        .iter()
        .zip(&keep)
        .filter(|(_, k)| !**k)
        .map(|(p, _)| p.prize)
        .sum();
    let paths = paths
        .into_iter()
        .enumerate()
        .map(|(pair, path)| PairPath {
            pair,
            path: path.map(|p| p.into_iter().filter(|&v| v < n).collect()),
        })
        .collect();
    finish(colors, base, repaired, paths, forfeit_cost, &lp)
}

/// True iff every connected pair's path is a walk in `g` from `s` to `t`
/// whose colors lie in `solution.colors`.
pub fn check_solution(instance: &Instance, solution: &Solution) -> bool {
    let g = &instance.graph;
    solution.paths.iter().all(|pp| {
        let Some(path) = &pp.path else {
            return instance.terminals[pp.pair].prize.is_finite();
        };
        let p = &instance.terminals[pp.pair];
        path.first() == Some(&p.s)
            && path.last() == Some(&p.t)
            && path.windows(2).all(|w| g.neighbors(w[0]).iter().any(|&(u, _)| u == w[1]))
            && g.path_colors(path).is_subset(&solution.colors)
    })
}
