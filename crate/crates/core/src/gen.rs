//! Instance generators: grid worlds with obstacle regions, and the
//! diamond-path instances built from random hypergraphs that show why color
//! connectivity matters.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::instance::{ColorSet, ColoredPlanarGraph, Instance, TerminalPair, VertexId};
use crate::{Error, Result};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `width × height` grid; vertex `(r, c)` has id `r·width + c`. The rotation
/// lists up, right, down, left (clockwise with rows growing downwards).
pub fn grid_graph(width: usize, height: usize, colors: Vec<ColorSet>, num_colors: usize) -> ColoredPlanarGraph {
    assert_eq!(colors.len(), width * height, "one color set per cell");
    let id = |r: usize, c: usize| r * width + c;
    let mut edges = Vec::new();
    let mut right = vec![usize::MAX; width * height];
    let mut down = vec![usize::MAX; width * height];
    for r in 0..height {
        for c in 0..width {
            if c + 1 < width {
                right[id(r, c)] = edges.len();
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < height {
                down[id(r, c)] = edges.len();
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    let mut rotation = vec![Vec::with_capacity(4); width * height];
    for r in 0..height {
        for c in 0..width {
            let rot = &mut rotation[id(r, c)];
            if r > 0 {
                rot.push(down[id(r - 1, c)]);
            }
            if c + 1 < width {
                rot.push(right[id(r, c)]);
            }
            if r + 1 < height {
                rot.push(down[id(r, c)]);
            }
            if c > 0 {
                rot.push(right[id(r, c - 1)]);
            }
        }
    }
    ColoredPlanarGraph::new(num_colors, colors, edges, rotation)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    pub width: usize,
    pub height: usize,
    pub num_obstacles: usize,
    pub obstacle_size: usize,
    /// Number of terminal pairs; pair 0 joins the top-left and bottom-right corners.
    pub pairs: usize,
    /// Prize range for the pairs; `None` makes every pair mandatory.
    pub prize: Option<(f64, f64)>,
}

impl GridParams {
    pub fn new(width: usize, height: usize, num_obstacles: usize, obstacle_size: usize) -> Self {
        Self {
            width,
            height,
            num_obstacles,
            obstacle_size,
            pairs: 1,
            prize: None,
        }
    }
}

/// Grid world whose obstacles are connected cell sets grown by random BFS,
/// one color per obstacle (so every color is connected). Obstacles may
/// overlap but never cover a terminal.
pub fn gen_grid(params: &GridParams, seed: u64) -> Result<Instance> {
    let &GridParams {
        width: w,
        height: h,
        num_obstacles,
        obstacle_size,
        pairs,
        prize,
    } = params;
    if w < 2 || h < 2 {
        return Err(Error::InvalidParams(format!("grid must be at least 2x2, got {w}x{h}")));
    }
    if obstacle_size == 0 {
        return Err(Error::InvalidParams("obstacle size must be positive".into()));
    }
    if pairs == 0 {
        return Err(Error::InvalidParams("need at least one terminal pair".into()));
    }
    if let Some((lo, hi)) = prize {
        if !(lo >= 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::InvalidParams(format!("bad prize range [{lo}, {hi}]")));
        }
    }
    let n = w * h;
    if 2 * pairs > n {
        return Err(Error::InvalidParams(format!("{pairs} pairs do not fit in {n} cells")));
    }
    let mut rng = rng(seed);

    let mut terminals = vec![(0, n - 1)];
    let mut used = vec![false; n];
    used[0] = true;
    used[n - 1] = true;
    while terminals.len() < pairs {
        let s = rng.gen_range(0..n);
        let t = rng.gen_range(0..n);
        if s != t && !used[s] && !used[t] {
            used[s] = true;
            used[t] = true;
            terminals.push((s, t));
        }
    }
    let is_terminal = used;

    let neighbors = |v: usize| {
        let (r, c) = (v / w, v % w);
        let mut out = Vec::with_capacity(4);
        if r > 0 {
            out.push(v - w);
        }
        if c + 1 < w {
            out.push(v + 1);
        }
        if r + 1 < h {
            out.push(v + w);
        }
        if c > 0 {
            out.push(v - 1);
        }
        out
    };

    let mut colors = vec![ColorSet::new(); n];
    for color in 0..num_obstacles {
        let free: Vec<usize> = (0..n).filter(|&v| !is_terminal[v]).collect();
        let start = *free.choose(&mut rng).expect("grid has non-terminal cells");
        let mut inside = vec![false; n];
        let mut queued = vec![false; n];
        inside[start] = true;
        colors[start].insert(color);
        let mut size = 1;
        let mut frontier: Vec<usize> = Vec::new();
        for u in neighbors(start) {
            if !is_terminal[u] {
                queued[u] = true;
                frontier.push(u);
            }
        }
        while size < obstacle_size && !frontier.is_empty() {
            let v = frontier.swap_remove(rng.gen_range(0..frontier.len()));
            inside[v] = true;
            colors[v].insert(color);
            size += 1;
            for u in neighbors(v) {
                if !is_terminal[u] && !inside[u] && !queued[u] {
                    queued[u] = true;
                    frontier.push(u);
                }
            }
        }
    }

    let graph = grid_graph(w, h, colors, num_obstacles);
    let terminals = terminals
        .into_iter()
        .map(|(s, t)| {
            let p = prize.map_or(f64::INFINITY, |(lo, hi)| {
                if lo == hi {
                    lo
                } else {
                    rng.gen_range(lo..hi)
                }
            });
            TerminalPair::with_prize(s, t, p)
        })
        .collect();
    Ok(Instance::new(graph, terminals))
}

/// `r`-uniform hypergraph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hypergraph {
    pub n: usize,
    pub r: usize,
    pub hyperedges: Vec<Vec<usize>>,
}

const MAX_HYPERGRAPH_N: usize = 30;
const MAX_SUBSETS: u64 = 5_000_000;

fn binomial(n: usize, r: usize) -> u64 {
    let r = r.min(n - r);
    (0..r).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Includes every `r`-subset of `0..n` independently with probability `p`,
/// enumerating subsets in lexicographic order.
pub fn gen_random_hypergraph(n: usize, p: f64, r: usize, seed: u64) -> Result<Hypergraph> {
    if n > MAX_HYPERGRAPH_N {
        return Err(Error::LimitExceeded {
            what: "hypergraph vertices",
            got: n,
            limit: MAX_HYPERGRAPH_N,
        });
    }
    if r == 0 || r > n {
        return Err(Error::InvalidParams(format!("need 1 <= r <= n, got r={r}, n={n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParams(format!("probability {p} outside [0, 1]")));
    }
    let count = binomial(n, r);
    if count > MAX_SUBSETS {
        return Err(Error::LimitExceeded {
            what: "r-subsets",
            got: count as usize,
            limit: MAX_SUBSETS as usize,
        });
    }
    let mut rng = rng(seed);
    let mut hyperedges = Vec::new();
    let mut comb: Vec<usize> = (0..r).collect();
    loop {
        if rng.gen_bool(p) {
            hyperedges.push(comb.clone());
        }
        // next combination in lexicographic order
        let Some(i) = (0..r).rev().find(|&i| comb[i] < n - r + i) else {
            break;
        };
        comb[i] += 1;
        for j in i + 1..r {
            comb[j] = comb[j - 1] + 1;
        }
    }
    Ok(Hypergraph { n, r, hyperedges })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardnessParams {
    pub n: usize,
    pub r: usize,
    pub alpha: f64,
    pub beta: f64,
    pub k: f64,
}

impl HardnessParams {
    pub fn validate(&self) -> Result<()> {
        let top = self.r as f64 - 1.0;
        if self.n < 2 {
            return Err(Error::InvalidParams("n must be at least 2".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < top && self.beta > 0.0 && self.beta < top) {
            return Err(Error::InvalidParams(format!(
                "need 0 < alpha, beta < r - 1 = {top}"
            )));
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::InvalidParams("k must be positive".into()));
        }
        Ok(())
    }

    /// `q = k^{1+β}`.
    pub fn q(&self) -> f64 {
        self.k.powf(1.0 + self.beta)
    }

    /// Number of diamonds, `q / ((r+1)·ln n)` rounded to nearest, at least 1.
    pub fn ell(&self) -> usize {
        let raw = self.q() / ((self.r as f64 + 1.0) * (self.n as f64).ln());
        (raw.round() as usize).max(1)
    }

    /// Hyperedge probability `n^{α−(r−1)}`.
    pub fn p(&self) -> f64 {
        (self.n as f64).powf(self.alpha - (self.r as f64 - 1.0))
    }
}

/// Diamond path over spine `v_1 … v_{ℓ+1}` (ids `0..=ℓ`). Every hyperedge
/// goes to a uniformly random group `i` and becomes a degree-2 vertex
/// between `v_i` and `v_{i+1}` colored with the hyperedge's vertices;
/// hyperedge vertices follow the spine in hyperedge order.
pub fn gen_diamond_hardness(hg: &Hypergraph, params: &HardnessParams, seed: u64) -> Result<Instance> {
    params.validate()?;
    let ell = params.ell();
    let mut rng = rng(seed);
    let groups: Vec<usize> = hg.hyperedges.iter().map(|_| rng.gen_range(0..ell)).collect();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); ell];
    for (e, &g) in groups.iter().enumerate() {
        members[g].push(e);
    }
    if let Some(group) = members.iter().position(Vec::is_empty) {
        return Err(Error::EmptyGroup { group });
    }

    let nv = ell + 1 + hg.hyperedges.len();
    let mut colors = vec![ColorSet::new(); nv];
    let mut edges = Vec::with_capacity(2 * hg.hyperedges.len());
    let mut rotation = vec![Vec::new(); nv];
    // left[e], right[e]: edge ids joining hyperedge vertex e to its spine ends
    let mut left = vec![0; hg.hyperedges.len()];
    let mut right = vec![0; hg.hyperedges.len()];
    for (e, he) in hg.hyperedges.iter().enumerate() {
        let v = ell + 1 + e;
        colors[v] = he.iter().copied().collect();
        let i = groups[e];
        left[e] = edges.len();
        edges.push((i, v));
        right[e] = edges.len();
        edges.push((v, i + 1));
        rotation[v] = vec![left[e], right[e]];
    }
    for (i, rot) in rotation.iter_mut().enumerate().take(ell + 1) {
        // diamonds to the right, top to bottom, then to the left, bottom to top
        if i < ell {
            rot.extend(members[i].iter().map(|&e| left[e]));
        }
        if i > 0 {
            rot.extend(members[i - 1].iter().rev().map(|&e| right[e]));
        }
    }
    let graph = ColoredPlanarGraph::new(hg.n, colors, edges, rotation);
    Ok(Instance::new(graph, vec![TerminalPair::new(0, ell)]))
}

/// Adds a vertex carrying every color, adjacent to all other vertices. The
/// result is color-connected but in general not planar, and is flagged so.
pub fn add_color_connector(instance: &Instance) -> Instance {
    let mut g = instance.graph.clone();
    let n = g.num_vertices();
    let hub = g.add_vertex(ColorSet::full(g.num_colors()));
    for v in 0..n {
        g.add_edge(v, hub);
    }
    Instance::new(g.with_planar(false), instance.terminals.clone())
}

/// Spine vertices of a diamond path: every non-spine vertex has degree 2
/// with both neighbors on consecutive spine vertices.
pub fn is_diamond_path(g: &ColoredPlanarGraph, ell: usize) -> bool {
    (ell + 1..g.num_vertices()).all(|v| {
        let nb: Vec<VertexId> = g.neighbors(v).iter().map(|&(u, _)| u).collect();
        nb.len() == 2 && nb[0] <= ell && nb[1] <= ell && nb[1] == nb[0] + 1
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{color_connected, validate};
    use crate::planar::faces;

    #[test]
    fn grid_without_obstacles_is_white() {
        let inst = gen_grid(&GridParams::new(4, 3, 0, 1), 1).unwrap();
        assert!(validate(&inst).is_valid());
        assert!((0..12).all(|v| inst.graph.is_white(v)));
        assert_eq!(inst.terminals[0], TerminalPair::new(0, 11));
    }

    #[test]
    fn grids_validate_and_are_deterministic() {
        for seed in 0..30 {
            let p = GridParams::new(6, 5, 5, 4);
            let a = gen_grid(&p, seed).unwrap();
            assert!(validate(&a).is_valid(), "seed {seed}: {}", validate(&a));
            assert_eq!(a, gen_grid(&p, seed).unwrap());
            assert!(a.graph.is_white(0) && a.graph.is_white(29));
        }
    }

    #[test]
    fn multi_pair_grid_has_distinct_terminals() {
        let p = GridParams {
            pairs: 3,
            prize: Some((0.1, 0.9)),
            ..GridParams::new(6, 6, 4, 5)
        };
        let inst = gen_grid(&p, 5).unwrap();
        assert_eq!(inst.terminals.len(), 3);
        let mut ends: Vec<_> = inst.terminals.iter().flat_map(|p| [p.s, p.t]).collect();
        ends.sort();
        ends.dedup();
        assert_eq!(ends.len(), 6);
        assert!(inst.terminals.iter().all(|p| (0.1..0.9).contains(&p.prize)));
    }

    #[test]
    fn bad_grid_params() {
        assert!(gen_grid(&GridParams::new(1, 5, 0, 1), 0).is_err());
        assert!(gen_grid(&GridParams::new(3, 3, 1, 0), 0).is_err());
    }

    #[test]
    fn hypergraph_extremes() {
        assert!(gen_random_hypergraph(8, 0.0, 3, 1).unwrap().hyperedges.is_empty());
        let full = gen_random_hypergraph(8, 1.0, 3, 1).unwrap();
        assert_eq!(full.hyperedges.len(), 56);
        assert!(full.hyperedges.iter().all(|e| e.len() == 3 && e.windows(2).all(|w| w[0] < w[1])));
        assert!(matches!(
            gen_random_hypergraph(31, 0.5, 2, 0),
            Err(Error::LimitExceeded { .. })
        ));
    }

    #[test]
    fn hypergraph_edge_count_statistics() {
        // Binomial(120, 0.5): mean 60, sd sqrt(30)
        let sd = 30f64.sqrt();
        for seed in 0..100 {
            let c = gen_random_hypergraph(10, 0.5, 3, seed).unwrap().hyperedges.len() as f64;
            assert!((c - 60.0).abs() <= 3.0 * sd + 1.0, "seed {seed}: {c}");
        }
    }

    fn params(k: f64) -> HardnessParams {
        HardnessParams {
            n: 8,
            r: 3,
            alpha: 1.0,
            beta: 0.5,
            k,
        }
    }

    #[test]
    fn single_diamond() {
        let hg = Hypergraph {
            n: 3,
            r: 3,
            hyperedges: vec![vec![0, 1, 2]],
        };
        let inst = gen_diamond_hardness(&hg, &params(1.0), 0).unwrap();
        assert_eq!(inst.graph.num_vertices(), 3);
        assert_eq!(inst.graph.colors(2), &ColorSet::from([0, 1, 2]));
        assert_eq!(inst.terminals[0], TerminalPair::new(0, 1));
    }

    #[test]
    fn hardness_instances_are_plane_diamond_paths() {
        let p = params(6.0);
        let ell = p.ell();
        assert!(ell >= 2);
        let hg = gen_random_hypergraph(8, 0.3, 3, 4).unwrap();
        let inst = gen_diamond_hardness(&hg, &p, 9).unwrap();
        let g = &inst.graph;
        assert!(is_diamond_path(g, ell));
        let f = faces(g).unwrap();
        assert_eq!(f.len(), hg.hyperedges.len() - ell + 1);

        let wired = add_color_connector(&inst);
        assert!(!wired.graph.is_planar());
        assert_eq!(wired.graph.num_vertices(), g.num_vertices() + 1);
        assert_eq!(wired.num_colors(), inst.num_colors());
        assert!((0..wired.num_colors()).all(|c| color_connected(&wired.graph, c)));
    }

    #[test]
    fn empty_group_is_reported() {
        let hg = Hypergraph {
            n: 8,
            r: 3,
            hyperedges: vec![vec![0, 1, 2]],
        };
        assert!(matches!(
            gen_diamond_hardness(&hg, &params(6.0), 0),
            Err(Error::EmptyGroup { .. })
        ));
    }

    #[test]
    fn group_assignment_is_uniform() {
        // chi-square over group sizes pooled across seeds
        let p = params(6.0);
        let ell = p.ell();
        let hg = gen_random_hypergraph(8, 0.5, 3, 1).unwrap();
        let mut counts = vec![0f64; ell];
        let mut total = 0f64;
        for seed in 0..1000 {
            let Ok(inst) = gen_diamond_hardness(&hg, &p, seed) else { continue };
            for v in ell + 1..inst.graph.num_vertices() {
                counts[inst.graph.neighbors(v)[0].0] += 1.0;
                total += 1.0;
            }
        }
        let expect = total / ell as f64;
        let chi2: f64 = counts.iter().map(|c| (c - expect).powi(2) / expect).sum();
        // 0.001 critical value for ell - 1 <= 4 degrees of freedom is 18.47
        assert!(ell <= 5 && chi2 < 18.47, "ell {ell}, chi2 {chi2}");
    }
}
