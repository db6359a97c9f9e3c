//! Canonical JSON form of an [`Instance`].
//!
//! ```json
//! { "num_colors": 2,
//!   "vertices": [{"id": 0, "colors": []}, ...],
//!   "edges": [[0, 1], ...],
//!   "rotation": {"0": [0, 3], ...},
//!   "color_weights": [1.0, 1.0],
//!   "terminals": [{"s": 0, "t": 3, "prize": null}] }
//! ```
//!
//! `color_weights` is optional. `prize: null` means the pair must be
//! connected. Non-planar instances carry an extra `"planar": false`.

use std::collections::BTreeMap;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use super::{ColorSet, ColoredPlanarGraph, Instance, TerminalPair};
use crate::{Error, Result};

#[derive(Deserialize)]
struct RawInstance {
    num_colors: usize,
    vertices: Vec<RawVertex>,
    edges: Vec<[usize; 2]>,
    #[serde(default)]
    rotation: BTreeMap<String, Vec<usize>>,
    #[serde(default)]
    color_weights: Option<Vec<f64>>,
    #[serde(default)]
    planar: Option<bool>,
    terminals: Vec<RawPair>,
}

#[derive(Serialize, Deserialize)]
struct RawVertex {
    id: usize,
    colors: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawPair {
    s: usize,
    t: usize,
    prize: Option<f64>,
}

#[derive(Serialize)]
struct OutInstance<'a> {
    num_colors: usize,
    vertices: Vec<RawVertex>,
    edges: Vec<[usize; 2]>,
    rotation: Rotation<'a>,
    #[serde(skip_serializing_if = "Option::is_none")]
    color_weights: Option<&'a [f64]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    planar: Option<bool>,
    terminals: Vec<RawPair>,
}

/// Rotation map keyed by vertex id, emitted in numeric order.
struct Rotation<'a>(&'a [Vec<usize>]);

impl Serialize for Rotation<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (v, list) in self.0.iter().enumerate() {
            map.serialize_entry(&v.to_string(), list)?;
        }
        map.end()
    }
}

fn field_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.into(),
        line: 0,
        column: 0,
        message: message.into(),
    }
}

/// Parses the canonical JSON form. Structural problems that make the data
/// unusable (bad vertex ids, self-loops) are parse errors; everything else
/// is left to [`super::validate`].
pub fn parse(text: &str) -> Result<Instance> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawInstance = serde_path_to_error::deserialize(de).map_err(|err| {
        let path = err.path().to_string();
        let inner = err.into_inner();
        Error::Parse {
            path,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })?;

    let n = raw.vertices.len();
    let mut colors: Vec<Option<ColorSet>> = vec![None; n];
    for (i, v) in raw.vertices.into_iter().enumerate() {
        if v.id >= n {
            return Err(field_error(
                format!("vertices[{i}].id"),
                format!("vertex id {} out of range (n = {n})", v.id),
            ));
        }
        if colors[v.id].is_some() {
            return Err(field_error(
                format!("vertices[{i}].id"),
                format!("duplicate vertex id {}", v.id),
            ));
        }
        colors[v.id] = Some(v.colors.into_iter().collect());
    }
    let colors: Vec<ColorSet> = colors.into_iter().map(Option::unwrap_or_default).collect();

    let mut edges = Vec::with_capacity(raw.edges.len());
    for (e, [u, v]) in raw.edges.into_iter().enumerate() {
        if u == v {
            return Err(field_error(format!("edges[{e}]"), format!("self-loop at vertex {u}")));
        }
        edges.push((u, v));
    }

    let mut rotation = vec![Vec::new(); n];
    for (key, list) in raw.rotation {
        let v: usize = key
            .parse()
            .map_err(|_| field_error(format!("rotation.{key}"), "key is not a vertex id"))?;
        if v >= n {
            return Err(field_error(format!("rotation.{key}"), "vertex id out of range"));
        }
        rotation[v] = list;
    }

    let graph = ColoredPlanarGraph::new(raw.num_colors, colors, edges, rotation)
        .with_color_weights(raw.color_weights)
        .with_planar(raw.planar.unwrap_or(true));
    let terminals = raw
        .terminals
        .into_iter()
        .map(|p| TerminalPair::with_prize(p.s, p.t, p.prize.unwrap_or(f64::INFINITY)))
        .collect();
    Ok(Instance::new(graph, terminals))
}

pub fn serialize(instance: &Instance) -> String {
    let g = &instance.graph;
    let out = OutInstance {
        num_colors: g.num_colors(),
        vertices: g
            .vertex_colors()
            .iter()
            .enumerate()
            .map(|(id, c)| RawVertex {
                id,
                colors: c.as_slice().to_vec(),
            })
            .collect(),
        edges: g.edges().iter().map(|&(u, v)| [u, v]).collect(),
        rotation: Rotation(g.rotations()),
        color_weights: g.raw_color_weights(),
        planar: (!g.is_planar()).then_some(false),
        terminals: instance
            .terminals
            .iter()
            .map(|p| RawPair {
                s: p.s,
                t: p.t,
                prize: p.prize.is_finite().then_some(p.prize),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&out).expect("instance serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::validate;

    const MINIMAL: &str = r#"{
        "num_colors": 0,
        "vertices": [{"id": 0, "colors": []}, {"id": 1, "colors": []}],
        "edges": [[0, 1]],
        "rotation": {"0": [0], "1": [0]},
        "terminals": [{"s": 0, "t": 1, "prize": null}]
    }"#;

    #[test]
    fn minimal_instance_parses() {
        let inst = parse(MINIMAL).unwrap();
        assert_eq!(inst.graph.num_vertices(), 2);
        assert_eq!(inst.graph.num_edges(), 1);
        assert!(inst.terminals[0].prize.is_infinite());
        assert!(validate(&inst).is_valid());
    }

    #[test]
    fn color_out_of_range_parses_but_fails_validation() {
        let text = MINIMAL.replace(r#"{"id": 1, "colors": []}"#, r#"{"id": 1, "colors": [4]}"#);
        let inst = parse(&text).unwrap();
        assert!(!validate(&inst).is_valid());
    }

    #[test]
    fn self_loop_is_a_parse_error() {
        let text = MINIMAL.replace("[[0, 1]]", "[[0, 1], [1, 1]]");
        match parse(&text) {
            Err(Error::Parse { path, .. }) => assert_eq!(path, "edges[1]"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn type_errors_carry_path_and_line() {
        let text = MINIMAL.replace(r#""s": 0"#, r#""s": "zero""#);
        match parse(&text) {
            Err(Error::Parse { path, line, .. }) => {
                assert_eq!(path, "terminals[0].s");
                assert_eq!(line, 6);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn finite_prize_and_weights_round_trip() {
        let text = MINIMAL
            .replace(r#""prize": null"#, r#""prize": 0.4"#)
            .replace(r#""num_colors": 0"#, r#""num_colors": 1, "color_weights": [0.25]"#);
        let inst = parse(&text).unwrap();
        assert_eq!(inst.terminals[0].prize, 0.4);
        let again = parse(&serialize(&inst)).unwrap();
        assert_eq!(again, inst);
        assert_eq!(serialize(&again), serialize(&inst));
    }

    #[test]
    fn rotation_keys_are_numeric_order() {
        let mut colors = vec![ColorSet::new(); 12];
        colors[11] = ColorSet::new();
        let edges: Vec<_> = (0..11).map(|i| (i, i + 1)).collect();
        let mut rotation = vec![Vec::new(); 12];
        for (e, &(u, v)) in edges.iter().enumerate() {
            rotation[u].push(e);
            rotation[v].push(e);
        }
        let g = ColoredPlanarGraph::new(0, colors, edges, rotation);
        let text = serialize(&Instance::new(g, vec![TerminalPair::new(0, 11)]));
        let p2 = text.find("\"2\":").unwrap();
        let p10 = text.find("\"10\":").unwrap();
        assert!(p2 < p10);
    }
}
