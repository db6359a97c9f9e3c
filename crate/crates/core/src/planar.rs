//! Faces, colored dual graph and reference-path crossings.
//!
//! Faces are orbits of darts under "arrive at `w` along `e`, leave along the
//! edge after `e` in the rotation of `w`". The dual is built on the sphere:
//! the outer face is an ordinary dual vertex, and parallel dual edges (two
//! faces sharing several primal edges) and loops (bridges) are kept.

use std::collections::VecDeque;

use serde::Serialize;

use crate::instance::{ColorSet, ColoredPlanarGraph, EdgeId, ValidationReport, VertexId, Violation};
use crate::{Error, Result};

/// Directed edge. `reversed == false` walks `edges[edge].0 -> edges[edge].1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Dart {
    pub edge: EdgeId,
    pub reversed: bool,
}

impl Dart {
    pub fn id(self) -> usize {
        2 * self.edge + self.reversed as usize
    }

    pub fn tail(self, g: &ColoredPlanarGraph) -> VertexId {
        let (u, v) = g.edge(self.edge);
        if self.reversed {
            v
        } else {
            u
        }
    }

    pub fn head(self, g: &ColoredPlanarGraph) -> VertexId {
        let (u, v) = g.edge(self.edge);
        if self.reversed {
            u
        } else {
            v
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FaceList {
    pub faces: Vec<Vec<Dart>>,
    /// Indexed by [`Dart::id`].
    pub face_of: Vec<usize>,
}

impl FaceList {
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Distinct vertices on the boundary of face `f`, ascending.
    pub fn boundary_vertices(&self, g: &ColoredPlanarGraph, f: usize) -> Vec<VertexId> {
        let mut vs: Vec<VertexId> = self.faces[f].iter().map(|d| d.tail(g)).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }
}

/// Face orbits of the rotation system without the Euler check. Assumes the
/// rotation lists are consistent with the edge list.
pub(crate) fn trace_faces(g: &ColoredPlanarGraph) -> Vec<Vec<Dart>> {
    let m = g.num_edges();
    if m == 0 {
        return if g.num_vertices() > 0 { vec![Vec::new()] } else { Vec::new() };
    }
    // position of edge e in the rotation of its endpoint: [at u, at v]
    let mut pos = vec![[0usize; 2]; m];
    for v in 0..g.num_vertices() {
        for (i, &e) in g.rotation(v).iter().enumerate() {
            let (a, _) = g.edge(e);
            pos[e][(a != v) as usize] = i;
        }
    }
    let mut seen = vec![false; 2 * m];
    let mut faces = Vec::new();
    for start in 0..2 * m {
        if seen[start] {
            continue;
        }
        let mut face = Vec::new();
        let mut d = Dart {
            edge: start / 2,
            reversed: start % 2 == 1,
        };
        while !seen[d.id()] {
            seen[d.id()] = true;
            face.push(d);
            let w = d.head(g);
            let rot = g.rotation(w);
            let (a, _) = g.edge(d.edge);
            let i = pos[d.edge][(a != w) as usize];
            let next = rot[(i + 1) % rot.len()];
            let (na, _) = g.edge(next);
            d = Dart {
                edge: next,
                reversed: na != w,
            };
        }
        faces.push(face);
    }
    faces
}

/// Faces of the embedding; fails unless |V| - |E| + |F| = 2.
pub fn faces(g: &ColoredPlanarGraph) -> Result<FaceList> {
    if !g.is_planar() {
        return Err(Error::NotPlanar);
    }
    let faces = trace_faces(g);
    let (n, m, f) = (g.num_vertices(), g.num_edges(), faces.len());
    if n as i64 - m as i64 + f as i64 != 2 {
        return Err(Error::EulerViolation {
            vertices: n,
            edges: m,
            faces: f,
        });
    }
    let mut face_of = vec![0; 2 * m];
    for (i, face) in faces.iter().enumerate() {
        for d in face {
            face_of[d.id()] = i;
        }
    }
    Ok(FaceList { faces, face_of })
}

/// Simple s-t path in the primal graph that dual crossings are measured against.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReferencePath {
    pub vertices: Vec<VertexId>,
    /// Sorted edge ids of the path.
    pub edges: Vec<EdgeId>,
}

impl ReferencePath {
    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.edges.binary_search(&e).is_ok()
    }
}

/// Fewest-edges s-t path; BFS scans neighbors in ascending id order.
pub fn reference_path(g: &ColoredPlanarGraph, s: VertexId, t: VertexId) -> Result<ReferencePath> {
    let n = g.num_vertices();
    for v in [s, t] {
        if v >= n {
            return Err(Error::VertexOutOfRange(v));
        }
    }
    let vertices = g.bfs_path(s, t, |_| true).ok_or(Error::Disconnected { s, t })?;
    let mut edges: Vec<EdgeId> = vertices
        .windows(2)
        .map(|w| {
            let nb = g.neighbors(w[0]);
            let i = nb.partition_point(|&(x, _)| x < w[1]);
            nb[i].1
        })
        .collect();
    edges.sort_unstable();
    Ok(ReferencePath { vertices, edges })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualEdge {
    pub ends: (usize, usize),
    pub colors: ColorSet,
    pub primal: EdgeId,
    pub crossing: bool,
}

/// One dual vertex per face, one dual edge per primal edge (dual edge `i`
/// is the dual of primal edge `i`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualColoredGraph {
    pub vertex_colors: Vec<ColorSet>,
    pub edges: Vec<DualEdge>,
    #[serde(skip)]
    incident: Vec<Vec<usize>>,
}

impl DualColoredGraph {
    /// Assembles a dual from parts; used for hand-built test duals.
    pub fn from_parts(vertex_colors: Vec<ColorSet>, edges: Vec<DualEdge>) -> Self {
        let mut incident = vec![Vec::new(); vertex_colors.len()];
        for (i, e) in edges.iter().enumerate() {
            incident[e.ends.0].push(i);
            if e.ends.1 != e.ends.0 {
                incident[e.ends.1].push(i);
            }
        }
        Self {
            vertex_colors,
            edges,
            incident,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_colors.len()
    }

    /// Dual edge ids incident to dual vertex `v` (loops listed once).
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn num_crossing(&self) -> usize {
        self.edges.iter().filter(|e| e.crossing).count()
    }
}

pub fn build_dual(g: &ColoredPlanarGraph, faces: &FaceList, path: &ReferencePath) -> DualColoredGraph {
    let mut vertex_colors = vec![ColorSet::new(); faces.len()];
    let edges: Vec<DualEdge> = (0..g.num_edges())
        .map(|e| {
            let colors = g.edge_colors(e);
            let a = faces.face_of[2 * e];
            let b = faces.face_of[2 * e + 1];
            for f in [a, b] {
                vertex_colors[f] = vertex_colors[f].union(&colors);
            }
            DualEdge {
                ends: (a, b),
                colors,
                primal: e,
                crossing: path.contains_edge(e),
            }
        })
        .collect();
    DualColoredGraph::from_parts(vertex_colors, edges)
}

/// Faces, reference path and dual for one terminal pair in a single call.
pub fn dual_for_pair(g: &ColoredPlanarGraph, s: VertexId, t: VertexId) -> Result<(FaceList, ReferencePath, DualColoredGraph)> {
    let faces = faces(g)?;
    let path = reference_path(g, s, t)?;
    let dual = build_dual(g, &faces, &path);
    Ok((faces, path, dual))
}

/// Reports every color whose dual vertices are not connected through dual
/// edges that carry the color.
pub fn dual_color_connectivity_check(dual: &DualColoredGraph) -> ValidationReport {
    let max_color = dual
        .vertex_colors
        .iter()
        .filter_map(|c| c.as_slice().last().copied())
        .max();
    let Some(max_color) = max_color else {
        return ValidationReport::default();
    };
    let mut violations = Vec::new();
    for c in 0..=max_color {
        let hosts: Vec<usize> = (0..dual.num_vertices())
            .filter(|&v| dual.vertex_colors[v].contains(c))
            .collect();
        let Some(&start) = hosts.first() else { continue };
        let mut seen = vec![false; dual.num_vertices()];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &ei in dual.incident(v) {
                let e = &dual.edges[ei];
                if !e.colors.contains(c) {
                    continue;
                }
                let w = if e.ends.0 == v { e.ends.1 } else { e.ends.0 };
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        if hosts.iter().any(|&v| !seen[v]) {
            violations.push(Violation::ColorDisconnected { color: c });
        }
    }
    ValidationReport { violations }
}
