//! Colored planar graph instances.
//!
//! A [`ColoredPlanarGraph`] is a simple connected graph with a rotation
//! system (clockwise order of incident edges at every vertex) and a color
//! set per vertex. Every color must be *color-connected*: the vertices
//! carrying it induce a connected subgraph. [`validate`] reports every
//! violated invariant instead of failing on the first one.

mod json;

use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;

pub use json::{parse, serialize};

pub type VertexId = usize;
pub type EdgeId = usize;
pub type ColorId = usize;

/// Sorted, duplicate-free set of color ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct ColorSet(Vec<ColorId>);

impl ColorSet {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn full(m: usize) -> Self {
        Self((0..m).collect())
    }

    pub fn from_mask(mask: u64) -> Self {
        Self((0..64).filter(|c| mask >> c & 1 == 1).collect())
    }

    /// Bitmask representation; `None` if some id does not fit in 64 bits.
    pub fn to_mask(&self) -> Option<u64> {
        self.0
            .iter()
            .try_fold(0u64, |acc, &c| (c < 64).then(|| acc | 1 << c))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, c: ColorId) -> bool {
        self.0.binary_search(&c).is_ok()
    }

    pub fn insert(&mut self, c: ColorId) -> bool {
        match self.0.binary_search(&c) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, c);
                true
            }
        }
    }

    pub fn remove(&mut self, c: ColorId) -> bool {
        match self.0.binary_search(&c) {
            Ok(pos) => {
                self.0.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = ColorId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[ColorId] {
        &self.0
    }

    pub fn union(&self, other: &ColorSet) -> ColorSet {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i], other.0[j]);
            out.push(a.min(b));
            i += (a <= b) as usize;
            j += (b <= a) as usize;
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        ColorSet(out)
    }

    pub fn difference(&self, other: &ColorSet) -> ColorSet {
        ColorSet(self.iter().filter(|&c| !other.contains(c)).collect())
    }

    pub fn intersects(&self, other: &ColorSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn is_subset(&self, other: &ColorSet) -> bool {
        self.iter().all(|c| other.contains(c))
    }

    /// Sum of `weights[c]` over the set.
    pub fn weight(&self, weights: &[f64]) -> f64 {
        self.iter().map(|c| weights[c]).sum()
    }
}

impl FromIterator<ColorId> for ColorSet {
    fn from_iter<I: IntoIterator<Item = ColorId>>(iter: I) -> Self {
        let mut v: Vec<ColorId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        ColorSet(v)
    }
}

impl<const N: usize> From<[ColorId; N]> for ColorSet {
    fn from(a: [ColorId; N]) -> Self {
        a.into_iter().collect()
    }
}

impl fmt::Display for ColorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColoredPlanarGraph {
    num_colors: usize,
    colors: Vec<ColorSet>,
    edges: Vec<(VertexId, VertexId)>,
    rotation: Vec<Vec<EdgeId>>,
    color_weights: Option<Vec<f64>>,
    planar: bool,
    // (neighbor, edge) sorted by neighbor id; derived from `edges`.
    adj: Vec<Vec<(VertexId, EdgeId)>>,
}

impl ColoredPlanarGraph {
    /// Builds a graph. Nothing is checked here beyond what is needed to
    /// index safely; run [`validate`] for the invariants.
    pub fn new(
        num_colors: usize,
        colors: Vec<ColorSet>,
        edges: Vec<(VertexId, VertexId)>,
        rotation: Vec<Vec<EdgeId>>,
    ) -> Self {
        let n = colors.len();
        let mut adj = vec![Vec::new(); n];
        for (e, &(u, v)) in edges.iter().enumerate() {
            if u < n && v < n && u != v {
                adj[u].push((v, e));
                adj[v].push((u, e));
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let mut rotation = rotation;
        rotation.resize(n, Vec::new());
        Self {
            num_colors,
            colors,
            edges,
            rotation,
            color_weights: None,
            planar: true,
            adj,
        }
    }

    pub fn with_color_weights(mut self, weights: Option<Vec<f64>>) -> Self {
        self.color_weights = weights;
        self
    }

    pub fn with_planar(mut self, planar: bool) -> Self {
        self.planar = planar;
        self
    }

    pub fn num_colors(&self) -> usize {
        self.num_colors
    }

    pub fn num_vertices(&self) -> usize {
        self.colors.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn colors(&self, v: VertexId) -> &ColorSet {
        &self.colors[v]
    }

    pub fn vertex_colors(&self) -> &[ColorSet] {
        &self.colors
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e]
    }

    pub fn rotation(&self, v: VertexId) -> &[EdgeId] {
        &self.rotation[v]
    }

    pub fn rotations(&self) -> &[Vec<EdgeId>] {
        &self.rotation
    }

    /// Neighbors with the connecting edge, ascending by neighbor id.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adj[v]
    }

    pub fn raw_color_weights(&self) -> Option<&[f64]> {
        self.color_weights.as_deref()
    }

    /// Per-color weights, defaulting to 1.0.
    pub fn color_weights(&self) -> Vec<f64> {
        self.color_weights
            .clone()
            .unwrap_or_else(|| vec![1.0; self.num_colors])
    }

    /// False for instances whose rotation system is not a planar embedding
    /// (e.g. after adding a universal color connector).
    pub fn is_planar(&self) -> bool {
        self.planar
    }

    pub fn is_white(&self, v: VertexId) -> bool {
        self.colors[v].is_empty()
    }

    /// Union of the colors of the two endpoints.
    pub fn edge_colors(&self, e: EdgeId) -> ColorSet {
        let (u, v) = self.edges[e];
        self.colors[u].union(&self.colors[v])
    }

    /// All colors that appear on at least one vertex.
    pub fn used_colors(&self) -> ColorSet {
        self.colors.iter().flat_map(|c| c.iter()).collect()
    }

    /// Colors of a vertex sequence.
    pub fn path_colors(&self, path: &[VertexId]) -> ColorSet {
        path.iter().flat_map(|&v| self.colors[v].iter()).collect()
    }

    /// Same graph with every color in `remove` stripped from all vertices.
    pub fn without_colors(&self, remove: &ColorSet) -> Self {
        let mut g = self.clone();
        for c in &mut g.colors {
            *c = c.difference(remove);
        }
        g
    }

    /// Appends a vertex and returns its id. New edges must be added with
    /// [`ColoredPlanarGraph::add_edge`].
    pub(crate) fn add_vertex(&mut self, colors: ColorSet) -> VertexId {
        self.colors.push(colors);
        self.rotation.push(Vec::new());
        self.adj.push(Vec::new());
        self.colors.len() - 1
    }

    /// Appends edge `(u, v)` at the end of both rotation lists.
    pub(crate) fn add_edge(&mut self, u: VertexId, v: VertexId) -> EdgeId {
        let e = self.edges.len();
        self.edges.push((u, v));
        self.rotation[u].push(e);
        self.rotation[v].push(e);
        for (a, b) in [(u, v), (v, u)] {
            let pos = self.adj[a].partition_point(|&(x, _)| x < b);
            self.adj[a].insert(pos, (b, e));
        }
        e
    }

    /// BFS from `s` through vertices accepted by `allowed` (the start must be
    /// accepted too). Returns the parent array; `usize::MAX` marks unvisited,
    /// the root is its own parent. Neighbors are scanned in ascending order.
    pub fn bfs_parents(&self, s: VertexId, allowed: impl Fn(VertexId) -> bool) -> Vec<VertexId> {
        let n = self.num_vertices();
        let mut parent = vec![usize::MAX; n];
        if !allowed(s) {
            return parent;
        }
        parent[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.adj[u] {
                if parent[v] == usize::MAX && allowed(v) {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        parent
    }

    /// Fewest-edges path from `s` to `t` through `allowed` vertices.
    pub fn bfs_path(
        &self,
        s: VertexId,
        t: VertexId,
        allowed: impl Fn(VertexId) -> bool,
    ) -> Option<Vec<VertexId>> {
        let parent = self.bfs_parents(s, allowed);
        if parent[t] == usize::MAX {
            return None;
        }
        let mut path = vec![t];
        let mut v = t;
        while v != s {
            v = parent[v];
            path.push(v);
        }
        path.reverse();
        Some(path)
    }
}

/// One source-destination pair. `prize` is the penalty for leaving the pair
/// disconnected; `f64::INFINITY` means the pair must be connected.
#[derive(Clone, Debug, PartialEq)]
pub struct TerminalPair {
    pub s: VertexId,
    pub t: VertexId,
    pub prize: f64,
}

impl TerminalPair {
    pub fn new(s: VertexId, t: VertexId) -> Self {
        Self {
            s,
            t,
            prize: f64::INFINITY,
        }
    }

    pub fn with_prize(s: VertexId, t: VertexId, prize: f64) -> Self {
        Self { s, t, prize }
    }

    pub fn must_connect(&self) -> bool {
        self.prize.is_infinite()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub graph: ColoredPlanarGraph,
    pub terminals: Vec<TerminalPair>,
}

impl Instance {
    pub fn new(graph: ColoredPlanarGraph, terminals: Vec<TerminalPair>) -> Self {
        Self { graph, terminals }
    }

    pub fn num_colors(&self) -> usize {
        self.graph.num_colors()
    }

    pub fn pair(&self, k: usize) -> crate::Result<&TerminalPair> {
        self.terminals.get(k).ok_or(crate::Error::PairOutOfRange(k))
    }

    pub fn all_must_connect(&self) -> bool {
        self.terminals.iter().all(TerminalPair::must_connect)
    }

    /// Fails with [`crate::Error::InvalidInstance`] unless `validate` is clean.
    pub fn ensure_valid(&self) -> crate::Result<()> {
        let report = validate(self);
        if report.is_valid() {
            Ok(())
        } else {
            Err(crate::Error::InvalidInstance(report))
        }
    }
}

/// A single violated invariant.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    ColorOutOfRange { vertex: VertexId, color: ColorId },
    EdgeOutOfRange { edge: EdgeId, vertex: VertexId },
    SelfLoop { edge: EdgeId },
    ParallelEdge { edge: EdgeId, first: EdgeId },
    Disconnected { vertex: VertexId },
    ColorDisconnected { color: ColorId },
    RotationMissing { vertex: VertexId, edge: EdgeId },
    RotationForeign { vertex: VertexId, edge: EdgeId },
    RotationDuplicate { vertex: VertexId, edge: EdgeId },
    Euler { vertices: usize, edges: usize, faces: usize },
    NoTerminals,
    TerminalOutOfRange { pair: usize, vertex: VertexId },
    TerminalsEqual { pair: usize },
    BadPrize { pair: usize },
    WeightCount { expected: usize, got: usize },
    BadWeight { color: ColorId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            ColorOutOfRange { vertex, color } => write!(f, "vertex {vertex}: color {color} >= m"),
            EdgeOutOfRange { edge, vertex } => write!(f, "edge {edge}: endpoint {vertex} out of range"),
            SelfLoop { edge } => write!(f, "edge {edge} is a self-loop"),
            ParallelEdge { edge, first } => write!(f, "edge {edge} parallel to edge {first}"),
            Disconnected { vertex } => write!(f, "vertex {vertex} unreachable from vertex 0"),
            ColorDisconnected { color } => write!(f, "color {color} is not connected"),
            RotationMissing { vertex, edge } => write!(f, "rotation at {vertex} misses edge {edge}"),
            RotationForeign { vertex, edge } => write!(f, "rotation at {vertex} lists non-incident edge {edge}"),
            RotationDuplicate { vertex, edge } => write!(f, "rotation at {vertex} lists edge {edge} twice"),
            Euler { vertices, edges, faces } => {
                write!(f, "euler characteristic {vertices} - {edges} + {faces} != 2")
            }
            NoTerminals => write!(f, "no terminal pairs"),
            TerminalOutOfRange { pair, vertex } => write!(f, "pair {pair}: vertex {vertex} out of range"),
            TerminalsEqual { pair } => write!(f, "pair {pair}: s == t"),
            BadPrize { pair } => write!(f, "pair {pair}: prize must be nonnegative"),
            WeightCount { expected, got } => write!(f, "expected {expected} color weights, got {got}"),
            BadWeight { color } => write!(f, "color {color}: weight must be finite and nonnegative"),
        }
    }
}

/// Every violation found, in a fixed order: vertex colors, edges,
/// connectivity, color-connectivity, rotation, Euler, terminals, weights.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate(instance: &Instance) -> ValidationReport {
    let mut out = validate_graph(&instance.graph);
    let g = &instance.graph;
    let n = g.num_vertices();
    if instance.terminals.is_empty() {
        out.push(Violation::NoTerminals);
    }
    for (k, p) in instance.terminals.iter().enumerate() {
        for v in [p.s, p.t] {
            if v >= n {
                out.push(Violation::TerminalOutOfRange { pair: k, vertex: v });
            }
        }
        if p.s == p.t {
            out.push(Violation::TerminalsEqual { pair: k });
        }
        if p.prize.is_nan() || p.prize < 0.0 {
            out.push(Violation::BadPrize { pair: k });
        }
    }
    if let Some(w) = g.raw_color_weights() {
        if w.len() != g.num_colors() {
            out.push(Violation::WeightCount {
                expected: g.num_colors(),
                got: w.len(),
            });
        }
        for (c, &x) in w.iter().enumerate() {
            if !x.is_finite() || x < 0.0 {
                out.push(Violation::BadWeight { color: c });
            }
        }
    }
    ValidationReport { violations: out }
}

fn validate_graph(g: &ColoredPlanarGraph) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = g.num_vertices();
    let m = g.num_colors();

    for (v, cs) in g.colors.iter().enumerate() {
        for c in cs.iter().filter(|&c| c >= m) {
            out.push(Violation::ColorOutOfRange { vertex: v, color: c });
        }
    }

    let mut edges_ok = true;
    let mut seen = std::collections::HashMap::new();
    for (e, &(u, v)) in g.edges.iter().enumerate() {
        for x in [u, v] {
            if x >= n {
                out.push(Violation::EdgeOutOfRange { edge: e, vertex: x });
                edges_ok = false;
            }
        }
        if u == v {
            out.push(Violation::SelfLoop { edge: e });
            edges_ok = false;
            continue;
        }
        if let Some(&first) = seen.get(&(u.min(v), u.max(v))) {
            out.push(Violation::ParallelEdge { edge: e, first });
            edges_ok = false;
        } else {
            seen.insert((u.min(v), u.max(v)), e);
        }
    }

    if n > 0 {
        let parent = g.bfs_parents(0, |_| true);
        if let Some(v) = parent.iter().position(|&p| p == usize::MAX) {
            out.push(Violation::Disconnected { vertex: v });
        }
    }

    for c in 0..m {
        if !color_connected(g, c) {
            out.push(Violation::ColorDisconnected { color: c });
        }
    }

    if g.planar {
        let mut rotation_ok = edges_ok;
        for v in 0..n {
            let mut incident: Vec<EdgeId> = g.adj[v].iter().map(|&(_, e)| e).collect();
            incident.sort_unstable();
            let mut listed = g.rotation[v].clone();
            listed.sort_unstable();
            for w in listed.windows(2) {
                if w[0] == w[1] {
                    out.push(Violation::RotationDuplicate { vertex: v, edge: w[0] });
                    rotation_ok = false;
                }
            }
            listed.dedup();
            for &e in &incident {
                if listed.binary_search(&e).is_err() {
                    out.push(Violation::RotationMissing { vertex: v, edge: e });
                    rotation_ok = false;
                }
            }
            for &e in &listed {
                if incident.binary_search(&e).is_err() {
                    out.push(Violation::RotationForeign { vertex: v, edge: e });
                    rotation_ok = false;
                }
            }
        }
        if rotation_ok {
            let faces = crate::planar::trace_faces(g);
            let chi = n as i64 - g.num_edges() as i64 + faces.len() as i64;
            if chi != 2 {
                out.push(Violation::Euler {
                    vertices: n,
                    edges: g.num_edges(),
                    faces: faces.len(),
                });
            }
        }
    }
    out
}

/// Whether the vertices carrying color `c` induce a connected subgraph
/// (vacuously true when no vertex carries it).
pub fn color_connected(g: &ColoredPlanarGraph, c: ColorId) -> bool {
    let hosts: Vec<VertexId> = (0..g.num_vertices())
        .filter(|&v| g.colors[v].contains(c))
        .collect();
    let Some(&start) = hosts.first() else {
        return true;
    };
    let parent = g.bfs_parents(start, |v| g.colors[v].contains(c));
    hosts.iter().all(|&v| parent[v] != usize::MAX)
}

/// Vertices whose color set intersects `colors`, ascending.
pub fn host_vertices(g: &ColoredPlanarGraph, colors: &ColorSet) -> Vec<VertexId> {
    (0..g.num_vertices())
        .filter(|&v| g.colors[v].intersects(colors))
        .collect()
}

/// Removes every color appearing on a terminal from the whole graph and
/// returns the removed colors. Every feasible solution pays for them, so
/// they are added back to reported solutions.
pub fn normalize_terminals(instance: &Instance) -> (Instance, ColorSet) {
    let base: ColorSet = instance
        .terminals
        .iter()
        .flat_map(|p| {
            let g = &instance.graph;
            let n = g.num_vertices();
            [p.s, p.t]
                .into_iter()
                .filter(move |&v| v < n)
                .flat_map(move |v| g.colors(v).iter())
        })
        .collect();
    if base.is_empty() {
        return (instance.clone(), base);
    }
    let graph = instance.graph.without_colors(&base);
    (Instance::new(graph, instance.terminals.clone()), base)
}
