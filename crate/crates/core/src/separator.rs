//! Minimum-weight color separators.
//!
//! A color set `S` separates `s` from `t` when deleting every vertex that
//! carries a color of `S` disconnects them. On a color-connected plane graph
//! the cheapest separator is the cheapest closed walk in the colored dual
//! that crosses a fixed s-t reference path an odd number of times, paying
//! each color once when the walk enters it. The auxiliary graph below turns
//! that into shortest paths: two copies of every (face, color) pair, one per
//! layer; free arcs follow dual edges that carry the color, switching layers
//! exactly when the dual edge crosses the reference path; clique arcs change
//! color inside a face and cost the color entered. A path from the source of
//! face `i` (layer a) to the sink of face `i` (layer b) therefore crosses the
//! reference path an odd number of times.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::instance::{host_vertices, ColorId, ColorSet, ColoredPlanarGraph, VertexId};
use crate::planar::{dual_for_pair, DualColoredGraph, ReferencePath};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AuxNode {
    Source(usize),
    Sink(usize),
    Copy { face: usize, color: ColorId, layer: Layer },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcKind {
    Clique,
    Free,
    Source,
    Sink,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Arc {
    pub to: usize,
    pub kind: ArcKind,
    /// Color whose weight the arc costs (clique and source arcs).
    pub pays: Option<ColorId>,
    pub weight: f64,
}

#[derive(Clone, Debug)]
pub struct AuxiliaryGraph {
    nodes: Vec<AuxNode>,
    out: Vec<Vec<Arc>>,
    // first node id of each face block: source, sink, a-copies, b-copies
    face_base: Vec<usize>,
    face_colors: Vec<ColorSet>,
}

impl AuxiliaryGraph {
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: usize) -> AuxNode {
        self.nodes[id]
    }

    pub fn arcs(&self, id: usize) -> &[Arc] {
        &self.out[id]
    }

    pub fn num_arcs(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn source(&self, face: usize) -> usize {
        self.face_base[face]
    }

    pub fn sink(&self, face: usize) -> usize {
        self.face_base[face] + 1
    }

    /// Node id of the copy of `(face, color)` in `layer`, if the face carries the color.
    pub fn copy(&self, face: usize, color: ColorId, layer: Layer) -> Option<usize> {
        let cs = &self.face_colors[face];
        let i = cs.as_slice().binary_search(&color).ok()?;
        let r = cs.len();
        Some(self.face_base[face] + 2 + i + if layer == Layer::B { r } else { 0 })
    }

    /// Recomputes arc weights for new color weights; the topology is unchanged.
    pub fn reweight(&mut self, weights: &[f64]) {
        for arcs in &mut self.out {
            for a in arcs {
                a.weight = a.pays.map_or(0.0, |c| weights[c]);
            }
        }
    }
}

pub fn build_aux(dual: &DualColoredGraph, weights: &[f64]) -> AuxiliaryGraph {
    let nf = dual.num_vertices();
    let mut nodes = Vec::new();
    let mut face_base = Vec::with_capacity(nf);
    for (i, cs) in dual.vertex_colors.iter().enumerate() {
        face_base.push(nodes.len());
        nodes.push(AuxNode::Source(i));
        nodes.push(AuxNode::Sink(i));
        for layer in [Layer::A, Layer::B] {
            for color in cs.iter() {
                nodes.push(AuxNode::Copy { face: i, color, layer });
            }
        }
    }
    let mut g = AuxiliaryGraph {
        out: vec![Vec::new(); nodes.len()],
        nodes,
        face_base,
        face_colors: dual.vertex_colors.clone(),
    };

    let arc = |to, kind, pays: Option<ColorId>| Arc {
        to,
        kind,
        pays,
        weight: pays.map_or(0.0, |c| weights[c]),
    };

    for i in 0..nf {
        let cs = g.face_colors[i].clone();
        for layer in [Layer::A, Layer::B] {
            for k in cs.iter() {
                let from = g.copy(i, k, layer).unwrap();
                for l in cs.iter().filter(|&l| l != k) {
                    let to = g.copy(i, l, layer).unwrap();
                    g.out[from].push(arc(to, ArcKind::Clique, Some(l)));
                }
            }
        }
        let (src, snk) = (g.source(i), g.sink(i));
        for k in cs.iter() {
            let a = g.copy(i, k, Layer::A).unwrap();
            let b = g.copy(i, k, Layer::B).unwrap();
            g.out[src].push(arc(a, ArcKind::Source, Some(k)));
            g.out[b].push(arc(snk, ArcKind::Sink, None));
        }
    }

    for e in &dual.edges {
        let (x, y) = e.ends;
        for j in e.colors.iter() {
            let (ax, bx) = (g.copy(x, j, Layer::A).unwrap(), g.copy(x, j, Layer::B).unwrap());
            let (ay, by) = (g.copy(y, j, Layer::A).unwrap(), g.copy(y, j, Layer::B).unwrap());
            let pairs = if e.crossing { [(ax, by), (ay, bx)] } else { [(ax, ay), (bx, by)] };
            for (p, q) in pairs {
                if p != q {
                    g.out[p].push(arc(q, ArcKind::Free, None));
                    g.out[q].push(arc(p, ArcKind::Free, None));
                }
            }
        }
    }
    g
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparatorResult {
    pub colors: ColorSet,
    pub weight: f64,
    /// Faces visited by the winning walk, consecutive repeats collapsed.
    pub witness_cycle: Vec<usize>,
    /// Number of layer switches on the winning path (always odd).
    pub crossings: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SeparatorOutcome {
    Separator(SeparatorResult),
    /// An all-white s-t path exists, so no color set separates s and t.
    NoSeparator,
}

impl SeparatorOutcome {
    pub fn separator(&self) -> Option<&SeparatorResult> {
        match self {
            SeparatorOutcome::Separator(r) => Some(r),
            SeparatorOutcome::NoSeparator => None,
        }
    }
}

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (dist, node)
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const TIE_EPS: f64 = 1e-12;

/// Reusable separation oracle for one terminal pair. The dual, reference
/// path and auxiliary topology depend only on the graph; each call to
/// [`SeparatorOracle::solve`] just reweights the arcs.
#[derive(Clone, Debug)]
pub struct SeparatorOracle {
    num_colors: usize,
    white_path: bool,
    dual: Option<DualColoredGraph>,
    path: Option<ReferencePath>,
    aux: Option<AuxiliaryGraph>,
    sources: Vec<usize>,
}

impl SeparatorOracle {
    pub fn new(g: &ColoredPlanarGraph, s: VertexId, t: VertexId) -> Result<Self> {
        let n = g.num_vertices();
        for v in [s, t] {
            if v >= n {
                return Err(Error::VertexOutOfRange(v));
            }
            if !g.is_white(v) {
                return Err(Error::NotNormalized { vertex: v });
            }
        }
        let white_path = g.bfs_path(s, t, |v| g.is_white(v)).is_some();
        if white_path {
            return Ok(Self {
                num_colors: g.num_colors(),
                white_path,
                dual: None,
                path: None,
                aux: None,
                sources: Vec::new(),
            });
        }
        let (_, path, dual) = dual_for_pair(g, s, t)?;
        let aux = build_aux(&dual, &vec![0.0; g.num_colors()]);
        // every separating cycle crosses the reference path, so it visits a
        // face incident to a crossing dual edge
        let mut sources: Vec<usize> = dual
            .edges
            .iter()
            .filter(|e| e.crossing)
            .flat_map(|e| [e.ends.0, e.ends.1])
            .filter(|&f| !dual.vertex_colors[f].is_empty())
            .collect();
        sources.sort_unstable();
        sources.dedup();
        Ok(Self {
            num_colors: g.num_colors(),
            white_path,
            dual: Some(dual),
            path: Some(path),
            aux: Some(aux),
            sources,
        })
    }

    pub fn dual(&self) -> Option<&DualColoredGraph> {
        self.dual.as_ref()
    }

    pub fn reference_path(&self) -> Option<&ReferencePath> {
        self.path.as_ref()
    }

    pub fn aux(&self) -> Option<&AuxiliaryGraph> {
        self.aux.as_ref()
    }

    pub fn solve(&mut self, weights: &[f64]) -> Result<SeparatorOutcome> {
        check_weights(weights, self.num_colors)?;
        if self.white_path {
            return Ok(SeparatorOutcome::NoSeparator);
        }
        let aux = self.aux.as_mut().expect("aux graph exists without a white path");
        aux.reweight(weights);
        let aux = &*aux;

        let nn = aux.num_nodes();
        let mut dist = vec![f64::INFINITY; nn];
        let mut prev = vec![usize::MAX; nn];
        let mut touched = Vec::new();
        let mut best: Option<(f64, ColorSet, Vec<usize>)> = None;

        for &face in &self.sources {
            for &v in &touched {
                dist[v] = f64::INFINITY;
                prev[v] = usize::MAX;
            }
            touched.clear();
            let (src, snk) = (aux.source(face), aux.sink(face));
            let bound = best.as_ref().map_or(f64::INFINITY, |b| b.0 + TIE_EPS);
            dist[src] = 0.0;
            touched.push(src);
            let mut heap = BinaryHeap::from([HeapEntry { dist: 0.0, node: src }]);
            while let Some(HeapEntry { dist: d, node: u }) = heap.pop() {
                if d > dist[u] || d > bound {
                    if d > bound {
                        break;
                    }
                    continue;
                }
                if u == snk {
                    break;
                }
                for a in aux.arcs(u) {
                    let nd = d + a.weight;
                    if nd < dist[a.to] && nd <= bound {
                        if dist[a.to].is_infinite() {
                            touched.push(a.to);
                        }
                        dist[a.to] = nd;
                        prev[a.to] = u;
                        heap.push(HeapEntry { dist: nd, node: a.to });
                    }
                }
            }
            if !dist[snk].is_finite() {
                continue;
            }
            let mut path = vec![snk];
            let mut v = snk;
            while v != src {
                v = prev[v];
                path.push(v);
            }
            path.reverse();
            let colors: ColorSet = path
                .iter()
                .filter_map(|&v| match aux.node(v) {
                    AuxNode::Copy { color, .. } => Some(color),
                    _ => None,
                })
                .collect();
            let len = dist[snk];
            let better = match &best {
                None => true,
                Some((bw, bs, _)) => len < bw - TIE_EPS || (len <= bw + TIE_EPS && colors < *bs),
            };
            if better {
                best = Some((len, colors, path));
            }
        }

        let (len, colors, path) = best.ok_or_else(|| {
            Error::Internal("no source-sink path although no white s-t path exists".into())
        })?;
        let weight = colors.weight(weights);
        if (weight - len).abs() > 1e-9 * len.max(1.0) {
            return Err(Error::Internal(format!(
                "separator weight {weight} differs from path length {len}"
            )));
        }
        let mut witness_cycle: Vec<usize> = Vec::new();
        let mut crossings = 0;
        let mut last_layer = None;
        for &v in &path {
            if let AuxNode::Copy { face, layer, .. } = aux.node(v) {
                if witness_cycle.last() != Some(&face) {
                    witness_cycle.push(face);
                }
                if last_layer.is_some_and(|l| l != layer) {
                    crossings += 1;
                }
                last_layer = Some(layer);
            }
        }
        if witness_cycle.len() > 1 && witness_cycle.first() == witness_cycle.last() {
            witness_cycle.pop();
        }
        Ok(SeparatorOutcome::Separator(SeparatorResult {
            colors,
            weight,
            witness_cycle,
            crossings,
        }))
    }
}

fn check_weights(weights: &[f64], m: usize) -> Result<()> {
    if weights.len() != m {
        return Err(Error::WeightCount {
            expected: m,
            got: weights.len(),
        });
    }
    if let Some((color, &value)) = weights
        .iter()
        .enumerate()
        .find(|(_, w)| !w.is_finite() || **w < 0.0)
    {
        return Err(Error::BadWeight { color, value });
    }
    Ok(())
}

/// Minimum-weight s-t color separator on a normalized (white-terminal),
/// color-connected plane graph. Ties between equally cheap separators are
/// broken towards the lexicographically smallest color set.
pub fn min_color_separator(
    g: &ColoredPlanarGraph,
    weights: &[f64],
    s: VertexId,
    t: VertexId,
) -> Result<SeparatorOutcome> {
    SeparatorOracle::new(g, s, t)?.solve(weights)
}

/// True iff deleting every vertex that carries a color of `colors`
/// disconnects `s` from `t`.
pub fn verify_separator(g: &ColoredPlanarGraph, colors: &ColorSet, s: VertexId, t: VertexId) -> bool {
    let removed = host_vertices(g, colors);
    let mut blocked = vec![false; g.num_vertices()];
    for v in removed {
        blocked[v] = true;
    }
    g.bfs_path(s, t, |v| !blocked[v]).is_none()
}
