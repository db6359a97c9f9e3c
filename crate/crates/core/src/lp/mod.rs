//! The hitting LP
//!
//! ```text
//! min Σ x_c   s.t.   Σ_{c∈S} x_c (+ y_k) ≥ 1   for every s_k-t_k color separator S
//! ```
//!
//! solved by cutting planes. The minimum-weight separator under weights `x`
//! is the separation oracle; a pair is violated when its cheapest separator
//! weighs less than `1 − y_k`. The prize-collecting variant adds a forfeit
//! variable `y_k` with cost `w_k` for every pair with a finite prize.
//!
//! The restricted LPs are solved in packing form (one column per cut), so a
//! new cut is a new column and the previous basis stays feasible.

pub mod simplex;

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::instance::{ColorSet, Instance};
use crate::separator::{SeparatorOracle, SeparatorOutcome};
use crate::{Error, Result};
use simplex::PackingSimplex;

pub use simplex::{simplex_solve, SimplexError, SimplexProblem, SimplexSolution};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cut {
    pub pair: usize,
    pub colors: ColorSet,
    /// Separator weight under the x-vector that produced the cut.
    pub weight: f64,
    pub iteration: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpState {
    pub x: Vec<f64>,
    /// Forfeit variables, one per pair (prize mode only).
    pub y: Option<Vec<f64>>,
    pub constraints: Vec<Cut>,
    pub objective_value: f64,
    /// Objective after each restricted solve.
    pub history: Vec<f64>,
    pub iterations: usize,
    pub pivots: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpOptions {
    pub tolerance: f64,
    /// `None` means `10·m·pairs + 1000`.
    pub max_cuts: Option<usize>,
    /// Add forfeit variables for pairs with finite prizes.
    pub prize: bool,
}

impl Default for LpOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-7,
            max_cuts: None,
            prize: false,
        }
    }
}

pub fn default_cut_limit(num_colors: usize, num_pairs: usize) -> usize {
    10 * num_colors * num_pairs + 1000
}

/// Cutting-plane solve of the hitting LP over all terminal pairs.
///
/// Expects a normalized instance (white terminals) on a plane graph.
pub fn solve_hitting_lp(instance: &Instance, opts: &LpOptions) -> Result<LpState> {
    let g = &instance.graph;
    let m = g.num_colors();
    let pairs = &instance.terminals;
    let limit = opts
        .max_cuts
        .unwrap_or_else(|| default_cut_limit(m, pairs.len()));

    // packing rows: one per color, then one per forfeitable pair
    let mut prize_row = vec![None; pairs.len()];
    let mut h = vec![1.0; m];
    if opts.prize {
        for (k, p) in pairs.iter().enumerate() {
            if p.prize.is_finite() {
                prize_row[k] = Some(h.len());
                h.push(p.prize.max(0.0));
            }
        }
    }
    let mut lp = PackingSimplex::new(h)?;

    let mut oracles = pairs
        .iter()
        .map(|p| SeparatorOracle::new(g, p.s, p.t))
        .collect::<Result<Vec<_>>>()?;

    let mut seen: HashSet<(usize, ColorSet)> = HashSet::new();
    let mut cuts: Vec<Cut> = Vec::new();
    let mut history = Vec::new();
    let mut iteration = 0;
    loop {
        let value = lp.solve()?;
        history.push(value);
        let prices = lp.prices();
        let x: Vec<f64> = prices[..m].iter().map(|p| p.clamp(0.0, 1.0)).collect();
        let y: Vec<f64> = prize_row
            .iter()
            .map(|r| r.map_or(0.0, |r| prices[r].clamp(0.0, 1.0)))
            .collect();

        let found: Vec<Result<Option<(ColorSet, f64)>>> = oracles
            .par_iter_mut()
            .enumerate()
            .map(|(k, oracle)| {
                if y[k] >= 1.0 - opts.tolerance {
                    return Ok(None);
                }
                Ok(match oracle.solve(&x)? {
                    SeparatorOutcome::Separator(r) if r.weight < 1.0 - y[k] - opts.tolerance => {
                        Some((r.colors, r.weight))
                    }
                    _ => None,
                })
            })
            .collect();

        let mut added = 0;
        for (k, f) in found.into_iter().enumerate() {
            let Some((colors, weight)) = f? else { continue };
            if !seen.insert((k, colors.clone())) {
                // already a row of the restricted LP; only numerical noise
                // can make it look violated again
                continue;
            }
            if cuts.len() >= limit {
                return Err(Error::IterationLimit { limit });
            }
            let mut entries: Vec<(usize, f64)> = colors.iter().map(|c| (c, 1.0)).collect();
            if let Some(r) = prize_row[k] {
                entries.push((r, 1.0));
            }
            lp.add_column(entries, 1.0);
            cuts.push(Cut {
                pair: k,
                colors,
                weight,
                iteration,
            });
            added += 1;
        }
        iteration += 1;
        if added == 0 {
            return Ok(LpState {
                x,
                y: opts.prize.then_some(y),
                constraints: cuts,
                objective_value: value,
                history,
                iterations: iteration,
                pivots: lp.pivots(),
            });
        }
    }
}

/// LP optimum; a lower bound on the integral optimum (colors plus forfeited prizes).
pub fn lp_lower_bound(state: &LpState) -> f64 {
    state.objective_value
}
