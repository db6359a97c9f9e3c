//! Small-diameter decompositions of the color intersection graph.
//!
//! Nodes are colors with weights `d ≥ 0`; edge `uv` has length
//! `(d(u) + d(v)) / 2`. A decomposition removes a cut set so that every
//! remaining component has small weighted diameter, where distances are
//! measured in the whole graph.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::instance::{ColorId, ColorSet};
use crate::planar::DualColoredGraph;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Region growing with a guaranteed `O(log n / Δ)` cut bound.
    #[default]
    BallCarving,
    /// Three rounds of layer chopping, repaired by ball carving where needed.
    KprChop,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ball_carving" => Ok(Strategy::BallCarving),
            "kpr_chop" => Ok(Strategy::KprChop),
            other => Err(Error::InvalidConfig(format!("unknown strategy `{other}`"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::BallCarving => "ball_carving",
            Strategy::KprChop => "kpr_chop",
        })
    }
}

/// One node per color; nodes are indexed `0..len()` and carry the color id
/// they stand for.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ColorIntersectionGraph {
    pub colors: Vec<ColorId>,
    pub d: Vec<f64>,
    #[serde(skip)]
    adj: Vec<Vec<usize>>,
}

impl ColorIntersectionGraph {
    /// Graph on nodes `0..d.len()` (color ids equal node ids).
    pub fn from_edges(d: Vec<f64>, edges: &[(usize, usize)]) -> Self {
        let n = d.len();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        Self {
            colors: (0..n).collect(),
            d,
            adj,
        }
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|u| self.adj[u].iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
            .collect()
    }

    pub fn node_of(&self, color: ColorId) -> Option<usize> {
        self.colors.binary_search(&color).ok()
    }

    pub fn total_weight(&self) -> f64 {
        self.d.iter().sum()
    }
}

/// Colors in `survivors` become nodes, adjacent when they meet at a dual
/// vertex. `weights` is indexed by color id.
pub fn build_color_graph(dual: &DualColoredGraph, survivors: &ColorSet, weights: &[f64]) -> ColorIntersectionGraph {
    let colors: Vec<ColorId> = survivors.iter().collect();
    let node = |c: ColorId| colors.binary_search(&c).ok();
    let mut adj = vec![Vec::new(); colors.len()];
    for vc in &dual.vertex_colors {
        let here: Vec<usize> = vc.iter().filter_map(node).collect();
        for (i, &a) in here.iter().enumerate() {
            for &b in &here[i + 1..] {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    ColorIntersectionGraph {
        d: colors.iter().map(|&c| weights[c]).collect(),
        colors,
        adj,
    }
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Half-sum distances from `src` inside the nodes accepted by `allowed`,
/// settling nothing farther than `limit`.
fn distances(
    g: &ColorIntersectionGraph,
    src: usize,
    allowed: impl Fn(usize) -> bool,
    limit: f64,
) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.len()];
    dist[src] = 0.0;
    let mut heap = BinaryHeap::from([Entry(0.0, src)]);
    while let Some(Entry(du, u)) = heap.pop() {
        if du > dist[u] {
            continue;
        }
        if du > limit {
            break;
        }
        for &v in &g.adj[u] {
            if !allowed(v) {
                continue;
            }
            let nd = du + (g.d[u] + g.d[v]) / 2.0;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Entry(nd, v));
            }
        }
    }
    dist
}

/// Shortest-path distance under half-sum edge lengths; infinite if disconnected.
pub fn node_distance(g: &ColorIntersectionGraph, u: usize, v: usize) -> f64 {
    distances(g, u, |_| true, f64::INFINITY)[v]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decomposition {
    /// Cut nodes, ascending.
    pub cut: Vec<usize>,
    /// Remaining nodes grouped into components, each ascending.
    pub components: Vec<Vec<usize>>,
    pub delta: f64,
}

impl Decomposition {
    pub fn cut_colors(&self, g: &ColorIntersectionGraph) -> ColorSet {
        self.cut.iter().map(|&u| g.colors[u]).collect()
    }

    pub fn cut_weight(&self, g: &ColorIntersectionGraph) -> f64 {
        self.cut.iter().map(|&u| g.d[u]).sum()
    }
}

/// `4·ln(n + 2)/Δ · Σd`, the ball-carving guarantee on the number of cut nodes.
pub fn ball_carving_bound(g: &ColorIntersectionGraph, delta: f64) -> f64 {
    4.0 * ((g.len() + 2) as f64).ln() / delta * g.total_weight()
}

fn connected_pieces(g: &ColorIntersectionGraph, nodes: &[usize], keep: &[bool]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; g.len()];
    let mut out = Vec::new();
    for &s in nodes {
        if seen[s] || !keep[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            let u = comp[i];
            i += 1;
            for &v in &g.adj[u] {
                if keep[v] && !seen[v] {
                    seen[v] = true;
                    comp.push(v);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Region growing over `nodes`. Each ball around the lowest-id uncovered
/// node `c` has interior `{v : dist(c,v) < r − d(v)/2}` and shell
/// `{v : r − d(v)/2 ≤ dist(c,v) < r + d(v)/2}`, with distances inside the
/// uncovered nodes. The radius is taken inside `(0, Δ/2)` on the piece of
/// the piecewise-constant shell that satisfies the volume condition with
/// the fewest shell nodes.
fn ball_carve(g: &ColorIntersectionGraph, delta: f64, nodes: &[usize]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let mut uncovered = vec![false; g.len()];
    for &u in nodes {
        uncovered[u] = true;
    }
    let total: f64 = nodes.iter().map(|&u| g.d[u]).sum();
    if total <= 0.0 {
        return (Vec::new(), connected_pieces(g, nodes, &uncovered));
    }
    let w0 = total / nodes.len() as f64;
    let k = 2.0 * (1.0 + total / w0).ln() / delta;
    let half = delta / 2.0;
    let dmax = nodes.iter().map(|&u| g.d[u]).fold(0.0, f64::max);

    let mut order: Vec<usize> = nodes.to_vec();
    order.sort_unstable();
    let mut cut = Vec::new();
    let mut components = Vec::new();
    for &c in &order {
        if !uncovered[c] {
            continue;
        }
        let dist = distances(g, c, |v| uncovered[v], half + dmax / 2.0);
        let near: Vec<usize> = order
            .iter()
            .copied()
            .filter(|&v| uncovered[v] && dist[v] - g.d[v] / 2.0 < half)
            .collect();

        let mut bps = vec![0.0, half];
        for &v in &near {
            for b in [dist[v] - g.d[v] / 2.0, dist[v] + g.d[v] / 2.0] {
                if b > 0.0 && b < half {
                    bps.push(b);
                }
            }
        }
        bps.sort_by(f64::total_cmp);
        bps.dedup();

        let volume = |r: f64| -> f64 {
            w0 + near
                .iter()
                .map(|&v| (r - dist[v] + g.d[v] / 2.0).clamp(0.0, g.d[v]))
                .sum::<f64>()
        };
        let shell_size = |r: f64| {
            near.iter()
                .filter(|&&v| {
                    let half_d = g.d[v] / 2.0;
                    dist[v] - half_d < r && r <= dist[v] + half_d
                })
                .count()
        };

        // (condition holds, shell size, excess over the bound, radius)
        let mut best: Option<(bool, usize, f64, f64)> = None;
        for w in bps.windows(2) {
            if w[1] - w[0] <= 1e-15 {
                continue;
            }
            let r = (w[0] + w[1]) / 2.0;
            let s = shell_size(r);
            let bound = k * volume(w[1]);
            let ok = s as f64 <= bound;
            let better = match best {
                None => true,
                Some((bok, bs, bslack, _)) => {
                    if ok != bok {
                        ok
                    } else if ok {
                        s < bs
                    } else {
                        s as f64 - bound < bslack
                    }
                }
            };
            if better {
                best = Some((ok, s, s as f64 - bound, r));
            }
        }
        let r = best.map_or(half / 2.0, |b| b.3);

        let mut interior = Vec::new();
        for &v in &near {
            if dist[v] < r - g.d[v] / 2.0 {
                interior.push(v);
            } else if dist[v] < r + g.d[v] / 2.0 {
                cut.push(v);
                uncovered[v] = false;
            }
        }
        for &v in &interior {
            uncovered[v] = false;
        }
        if !interior.is_empty() {
            interior.sort_unstable();
            components.push(interior);
        }
        debug_assert!(!uncovered[c]);
    }
    cut.sort_unstable();
    (cut, components)
}

/// Layer chopping: three rounds; in each, every piece is layered by
/// distance from its lowest-id node and the nodes whose band straddles a
/// layer boundary (spacing Δ) are cut, for the best of a few offsets.
fn kpr_chop(g: &ColorIntersectionGraph, delta: f64) -> (Vec<usize>, Vec<Vec<usize>>) {
    const OFFSETS: usize = 8;
    let all: Vec<usize> = (0..g.len()).collect();
    let mut keep = vec![true; g.len()];
    let mut pieces = connected_pieces(g, &all, &keep);
    let mut cut = Vec::new();
    for _ in 0..3 {
        let mut next = Vec::new();
        for piece in pieces {
            let root = piece[0];
            let inside = {
                let mut m = vec![false; g.len()];
                for &u in &piece {
                    m[u] = true;
                }
                m
            };
            let dist = distances(g, root, |v| inside[v], f64::INFINITY);
            let chopped = |o: f64| -> Vec<usize> {
                piece
                    .iter()
                    .copied()
                    .filter(|&v| {
                        g.d[v] > 0.0
                            && ((dist[v] - g.d[v] / 2.0 - o) / delta).floor()
                                != ((dist[v] + g.d[v] / 2.0 - o) / delta).floor()
                    })
                    .collect()
            };
            let best = (0..OFFSETS)
                .map(|j| chopped(j as f64 * delta / OFFSETS as f64))
                .min_by_key(Vec::len)
                .unwrap_or_default();
            for &v in &best {
                keep[v] = false;
            }
            cut.extend(best);
            next.extend(connected_pieces(g, &piece, &keep));
        }
        pieces = next;
    }

    // repair: re-carve any piece whose path-weight diameter is too large
    let mut components = Vec::new();
    for piece in pieces {
        if path_weight_diameter(g, &piece) <= delta {
            components.push(piece);
        } else {
            let (c, comps) = ball_carve(g, delta, &piece);
            cut.extend(c);
            components.extend(comps);
        }
    }
    cut.sort_unstable();
    (cut, components)
}

pub fn decompose(g: &ColorIntersectionGraph, delta: f64, strategy: Strategy) -> Result<Decomposition> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidDelta(delta));
    }
    if let Some(&d) = g.d.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
        return Err(Error::InvalidConfig(format!("node weight {d} is not finite and nonnegative")));
    }
    let (cut, mut components) = match strategy {
        Strategy::BallCarving => {
            let all: Vec<usize> = (0..g.len()).collect();
            let (cut, comps) = ball_carve(g, delta, &all);
            let bound = ball_carving_bound(g, delta);
            if cut.len() as f64 > bound + 1e-9 {
                return Err(Error::Internal(format!(
                    "ball carving cut {} exceeds its bound {bound}",
                    cut.len()
                )));
            }
            (cut, comps)
        }
        Strategy::KprChop => kpr_chop(g, delta),
    };
    components.sort();
    Ok(Decomposition { cut, components, delta })
}

fn max_over_component(g: &ColorIntersectionGraph, comp: &[usize], with_ends: bool) -> f64 {
    comp.par_iter()
        .map(|&u| {
            let dist = distances(g, u, |_| true, f64::INFINITY);
            comp.iter()
                .map(|&v| {
                    if with_ends {
                        dist[v] + (g.d[u] + g.d[v]) / 2.0
                    } else {
                        dist[v]
                    }
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Largest half-sum distance between two nodes of `comp`, measured in the
/// whole graph.
pub fn diameter(g: &ColorIntersectionGraph, comp: &[usize]) -> f64 {
    max_over_component(g, comp, false)
}

/// Like [`diameter`] but counting the full weight of both end nodes, i.e.
/// the heaviest shortest path between two nodes of `comp`.
pub fn path_weight_diameter(g: &ColorIntersectionGraph, comp: &[usize]) -> f64 {
    max_over_component(g, comp, true)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub partition_ok: bool,
    pub diameter_violations: Vec<(usize, f64)>,
    pub max_diameter: f64,
}

/// Exact check: cut and components partition the nodes, and every
/// component has diameter at most Δ (all-pairs, whole-graph distances).
pub fn verify_decomposition(g: &ColorIntersectionGraph, dec: &Decomposition) -> DecompositionReport {
    let mut count = vec![0usize; g.len()];
    for &u in dec.cut.iter().chain(dec.components.iter().flatten()) {
        count[u] += 1;
    }
    let partition_ok = count.iter().all(|&c| c == 1);
    let mut diameter_violations = Vec::new();
    let mut max_diameter = 0.0f64;
    for (i, comp) in dec.components.iter().enumerate() {
        let d = diameter(g, comp);
        max_diameter = max_diameter.max(d);
        if d > dec.delta + 1e-12 {
            diameter_violations.push((i, d));
        }
    }
    DecompositionReport {
        partition_ok,
        diameter_violations,
        max_diameter,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize, d: f64) -> ColorIntersectionGraph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        ColorIntersectionGraph::from_edges(vec![d; n], &edges)
    }

    #[test]
    fn co_occurrence_edges() {
        let dual = DualColoredGraph::from_parts(vec![[1, 2, 5].into(), [7].into()], vec![]);
        let g = build_color_graph(&dual, &[1, 2, 5, 7].into(), &[0.1; 8]);
        assert_eq!(g.colors, vec![1, 2, 5, 7]);
        assert_eq!(g.edges(), vec![(0, 1), (0, 2), (1, 2)]);
        assert!(g.neighbors(3).is_empty());

        let g = build_color_graph(&dual, &[1, 7].into(), &[0.1; 8]);
        assert!(g.edges().is_empty());
    }

    #[test]
    fn distances_use_half_sums() {
        let g = ColorIntersectionGraph::from_edges(vec![0.2, 0.4], &[(0, 1)]);
        assert_eq!(node_distance(&g, 0, 0), 0.0);
        assert!((node_distance(&g, 0, 1) - 0.3).abs() < 1e-15);
        // u - w - v with a zero-weight middle, plus a heavy direct detour
        let g = ColorIntersectionGraph::from_edges(vec![0.2, 0.0, 0.4, 5.0], &[(0, 1), (1, 2), (0, 3), (3, 2)]);
        assert!((node_distance(&g, 0, 2) - 0.3).abs() < 1e-15);
        let g = ColorIntersectionGraph::from_edges(vec![0.2, 0.4], &[]);
        assert!(node_distance(&g, 0, 1).is_infinite());
    }

    #[test]
    fn zero_weights_give_empty_cut() {
        let g = path(6, 0.0);
        for s in [Strategy::BallCarving, Strategy::KprChop] {
            let dec = decompose(&g, 0.4, s).unwrap();
            assert!(dec.cut.is_empty());
            assert_eq!(dec.components, vec![(0..6).collect::<Vec<_>>()]);
        }
    }

    #[test]
    fn single_node() {
        let g = ColorIntersectionGraph::from_edges(vec![0.05], &[]);
        let dec = decompose(&g, 0.4, Strategy::BallCarving).unwrap();
        assert!(dec.cut.is_empty());
        assert_eq!(dec.components, vec![vec![0]]);
    }

    #[test]
    fn five_node_path() {
        let g = path(5, 0.3);
        for s in [Strategy::BallCarving, Strategy::KprChop] {
            let dec = decompose(&g, 0.4, s).unwrap();
            let rep = verify_decomposition(&g, &dec);
            assert!(rep.partition_ok);
            assert!(rep.diameter_violations.is_empty(), "{s}: {rep:?}");
            for comp in &dec.components {
                for &u in comp {
                    for &v in comp {
                        assert!(node_distance(&g, u, v) <= 0.4);
                    }
                }
            }
        }
    }

    #[test]
    fn invalid_delta() {
        let g = path(3, 0.1);
        assert!(matches!(decompose(&g, 0.0, Strategy::BallCarving), Err(Error::InvalidDelta(_))));
        assert!(matches!(decompose(&g, -1.0, Strategy::KprChop), Err(Error::InvalidDelta(_))));
    }

    #[test]
    fn ball_carving_respects_its_bound_on_stars_and_grids() {
        let star: Vec<_> = (1..200).map(|i| (0, i)).collect();
        let mut d = vec![0.05; 200];
        d[0] = 0.35;
        let g = ColorIntersectionGraph::from_edges(d, &star);
        let dec = decompose(&g, 0.4, Strategy::BallCarving).unwrap();
        assert!(dec.cut.len() as f64 <= ball_carving_bound(&g, 0.4));
        assert!(verify_decomposition(&g, &dec).diameter_violations.is_empty());

        let w = 20;
        let mut edges = Vec::new();
        for r in 0..w {
            for c in 0..w {
                if c + 1 < w {
                    edges.push((r * w + c, r * w + c + 1));
                }
                if r + 1 < w {
                    edges.push((r * w + c, (r + 1) * w + c));
                }
            }
        }
        let d: Vec<f64> = (0..w * w).map(|i| 0.01 + 0.09 * ((i * 37 % 11) as f64 / 10.0)).collect();
        let g = ColorIntersectionGraph::from_edges(d, &edges);
        for s in [Strategy::BallCarving, Strategy::KprChop] {
            let dec = decompose(&g, 0.4, s).unwrap();
            let rep = verify_decomposition(&g, &dec);
            assert!(rep.partition_ok && rep.diameter_violations.is_empty(), "{s}");
            for comp in &dec.components {
                assert!(path_weight_diameter(&g, comp) <= 0.4 + 1e-12);
            }
        }
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in [Strategy::BallCarving, Strategy::KprChop] {
            assert_eq!(s.to_string().parse::<Strategy>().unwrap(), s);
        }
        assert!("lee".parse::<Strategy>().is_err());
    }
}
