//! Exact solvers for small instances, used as reference oracles. None of
//! them needs planarity or color connectivity.

use std::collections::BinaryHeap;
use std::cmp::Reverse;

use rayon::prelude::*;
use serde::Serialize;

use crate::instance::{ColorSet, ColoredPlanarGraph, Instance, VertexId};
use crate::separator::verify_separator;
use crate::{Error, Result};

pub const DEFAULT_LIMIT: usize = 15;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactResult {
    pub value: f64,
    pub colors: ColorSet,
    /// One entry per pair; `None` for forfeited pairs.
    pub paths: Vec<Option<Vec<VertexId>>>,
}

fn check_limit(m: usize, limit: usize) -> Result<()> {
    let limit = limit.min(63);
    if m > limit {
        return Err(Error::LimitExceeded {
            what: "colors",
            got: m,
            limit,
        });
    }
    Ok(())
}

fn masks(g: &ColoredPlanarGraph) -> Vec<u64> {
    g.vertex_colors()
        .iter()
        .map(|c| c.to_mask().expect("color ids below 64"))
        .collect()
}

fn path_under(g: &ColoredPlanarGraph, vm: &[u64], allowed: u64, s: VertexId, t: VertexId) -> Option<Vec<VertexId>> {
    g.bfs_path(s, t, |v| vm[v] & !allowed == 0)
}

/// Fewest colors on an s-t path: best-first search over (vertex, color
/// set) states, keeping per vertex only color sets not dominated by a
/// subset already reached.
pub fn exact_min_color_path(g: &ColoredPlanarGraph, s: VertexId, t: VertexId, limit: usize) -> Result<ExactResult> {
    check_limit(g.num_colors(), limit)?;
    let n = g.num_vertices();
    for v in [s, t] {
        if v >= n {
            return Err(Error::VertexOutOfRange(v));
        }
    }
    let vm = masks(g);
    // arena of states: (vertex, mask, parent)
    let mut states: Vec<(VertexId, u64, usize)> = vec![(s, vm[s], usize::MAX)];
    let mut alive = vec![true];
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new(); n];
    frontier[s].push(0);
    let mut heap = BinaryHeap::from([Reverse((vm[s].count_ones(), 0usize))]);
    while let Some(Reverse((cost, id))) = heap.pop() {
        if !alive[id] {
            continue;
        }
        let (v, mask, _) = states[id];
        if v == t {
            let mut path = vec![v];
            let mut cur = states[id].2;
            while cur != usize::MAX {
                path.push(states[cur].0);
                cur = states[cur].2;
            }
            path.reverse();
            return Ok(ExactResult {
                value: f64::from(cost),
                colors: ColorSet::from_mask(mask),
                paths: vec![Some(path)],
            });
        }
        for &(u, _) in g.neighbors(v) {
            let nm = mask | vm[u];
            if frontier[u].iter().any(|&o| states[o].1 & !nm == 0) {
                continue;
            }
            frontier[u].retain(|&o| {
                let dominated = nm & !states[o].1 == 0;
                if dominated {
                    alive[o] = false;
                }
                !dominated
            });
            let nid = states.len();
            states.push((u, nm, id));
            alive.push(true);
            frontier[u].push(nid);
            heap.push(Reverse((nm.count_ones(), nid)));
        }
    }
    Err(Error::Disconnected { s, t })
}

/// Minimum-weight separator by enumerating all `2^m` color sets; ties go to
/// the lexicographically smallest set. `None` when nothing separates.
pub fn exact_min_separator(
    g: &ColoredPlanarGraph,
    weights: &[f64],
    s: VertexId,
    t: VertexId,
    limit: usize,
) -> Result<Option<(ColorSet, f64)>> {
    let m = g.num_colors();
    check_limit(m, limit)?;
    if weights.len() != m {
        return Err(Error::WeightCount { expected: m, got: weights.len() });
    }
    let vm = masks(g);
    let best = (0u64..1 << m)
        .into_par_iter()
        .filter(|&mask| path_under(g, &vm, !mask, s, t).is_none())
        .map(|mask| {
            let c = ColorSet::from_mask(mask);
            let w = c.weight(weights);
            (w, c)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    Ok(best.map(|(w, c)| (c, w)))
}

/// Every color set separating `s` from `t` (all `2^m` candidates checked).
pub fn all_separators(g: &ColoredPlanarGraph, s: VertexId, t: VertexId, limit: usize) -> Result<Vec<ColorSet>> {
    let m = g.num_colors();
    check_limit(m, limit)?;
    Ok((0u64..1 << m)
        .into_par_iter()
        .map(ColorSet::from_mask)
        .filter(|c| verify_separator(g, c, s, t))
        .collect())
}

/// Prize-collecting optimum: minimum over color sets `C` of
/// `|C| + Σ prizes of pairs not connectable using only C`. Mandatory pairs
/// must be connectable. With every prize infinite this is the Steiner
/// forest optimum.
pub fn exact_prize(instance: &Instance, limit: usize) -> Result<ExactResult> {
    let g = &instance.graph;
    let m = g.num_colors();
    check_limit(m, limit)?;
    let vm = masks(g);
    let eval = |mask: u64| -> f64 {
        let mut cost = f64::from(mask.count_ones());
        for p in &instance.terminals {
            if path_under(g, &vm, mask, p.s, p.t).is_none() {
                cost += p.prize;
            }
        }
        cost
    };
    let (value, mask) = (0u64..1 << m)
        .into_par_iter()
        .map(|mask| (eval(mask), mask))
        .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| ColorSet::from_mask(a.1).cmp(&ColorSet::from_mask(b.1))))
        .expect("at least the empty set is evaluated");
    if value.is_infinite() {
        let p = instance
            .terminals
            .iter()
            .find(|p| p.must_connect() && path_under(g, &vm, u64::MAX, p.s, p.t).is_none())
            .expect("an infinite value comes from an unconnectable pair");
        return Err(Error::Disconnected { s: p.s, t: p.t });
    }
    let paths = instance
        .terminals
        .iter()
        .map(|p| path_under(g, &vm, mask, p.s, p.t))
        .collect();
    Ok(ExactResult {
        value,
        colors: ColorSet::from_mask(mask),
        paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::separator::tests::diamond;

    #[test]
    fn white_path_is_free() {
        let inst = diamond([0].into(), ColorSet::new(), 1);
        let r = exact_min_color_path(&inst.graph, 0, 3, 15).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.paths[0], Some(vec![0, 2, 3]));
        assert_eq!(exact_min_separator(&inst.graph, &[1.0], 0, 3, 15).unwrap(), None);
    }

    #[test]
    fn diamond_values() {
        let inst = diamond([0].into(), [1].into(), 2);
        let r = exact_min_color_path(&inst.graph, 0, 3, 15).unwrap();
        assert_eq!(r.value, 1.0);
        let (c, w) = exact_min_separator(&inst.graph, &[1.0, 1.0], 0, 3, 15).unwrap().unwrap();
        assert_eq!((c, w), ([0, 1].into(), 2.0));
        let (_, w) = exact_min_separator(&inst.graph, &[5.0, 1.0], 0, 3, 15).unwrap().unwrap();
        assert_eq!(w, 6.0);
    }

    #[test]
    fn prize_values() {
        let mut inst = diamond([0].into(), [1].into(), 2);
        for (prize, value) in [(0.0, 0.0), (0.4, 0.4), (10.0, 1.0), (f64::INFINITY, 1.0)] {
            inst.terminals[0].prize = prize;
            assert_eq!(exact_prize(&inst, 15).unwrap().value, value, "prize {prize}");
        }
    }

    #[test]
    fn limit_is_enforced() {
        let inst = diamond([0].into(), [1].into(), 20);
        assert!(matches!(
            exact_min_color_path(&inst.graph, 0, 3, 15),
            Err(Error::LimitExceeded { got: 20, limit: 15, .. })
        ));
        assert!(exact_prize(&inst, 15).is_err());
    }

    #[test]
    fn path_search_agrees_with_subset_enumeration() {
        use crate::gen::{gen_grid, GridParams};
        for seed in 0..40 {
            let inst = gen_grid(&GridParams::new(5, 5, 6, 4), seed).unwrap();
            let p = &inst.terminals[0];
            let a = exact_min_color_path(&inst.graph, p.s, p.t, 15).unwrap();
            let b = exact_prize(&inst, 15).unwrap();
            assert_eq!(a.value, b.value, "seed {seed}");
            let path = a.paths[0].as_ref().unwrap();
            assert_eq!(inst.graph.path_colors(path).len() as f64, a.value);
        }
    }
}
