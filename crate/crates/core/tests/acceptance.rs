//! Acceptance gate: one line per criterion, non-zero exit if any fails.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::Instant;

use minpath::decomp::{
    ball_carving_bound, decompose, path_weight_diameter, verify_decomposition, ColorIntersectionGraph, Strategy,
};
use minpath::exact::{all_separators, exact_min_color_path, exact_min_separator, exact_prize};
use minpath::gen::{
    add_color_connector, gen_diamond_hardness, gen_grid, gen_random_hypergraph, is_diamond_path, GridParams,
    HardnessParams,
};
use minpath::instance::{color_connected, normalize_terminals, validate, ColorSet};
use minpath::lp::{default_cut_limit, solve_hitting_lp, LpOptions};
use minpath::planar::faces;
use minpath::round::{check_solution, extract_path, solve, solve_prize};
use minpath::separator::{SeparatorOracle, SeparatorOutcome};
use minpath::{Config, Error, Instance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Grids up to 8x8 with at most 10 colors.
fn small_corpus(count: u64) -> Vec<Instance> {
    (0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + i);
            let p = GridParams::new(
                rng.gen_range(4..=8),
                rng.gen_range(4..=8),
                rng.gen_range(1..=10),
                rng.gen_range(2..=8),
            );
            gen_grid(&p, i).unwrap()
        })
        .collect()
}

fn separator_exactness(corpus: &[Instance]) -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (mut checked, mut bad, mut worst) = (0, 0, 0.0f64);
    for inst in corpus {
        let (norm, _) = normalize_terminals(inst);
        let g = &norm.graph;
        let m = g.num_colors();
        let p = &norm.terminals[0];
        let mut oracle = SeparatorOracle::new(g, p.s, p.t).unwrap();
        let unit = vec![1.0; m];
        let random: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..=1.0)).collect();
        for (weights, integral) in [(unit, true), (random, false)] {
            let fast = oracle.solve(&weights).unwrap();
            let exact = exact_min_separator(g, &weights, p.s, p.t, 15).unwrap();
            checked += 1;
            match (fast, exact) {
                (SeparatorOutcome::NoSeparator, None) => {}
                (SeparatorOutcome::Separator(r), Some((_, w))) => {
                    let diff = (r.weight - w).abs();
                    worst = worst.max(diff);
                    let ok = if integral { r.weight == w } else { diff <= 1e-6 * m as f64 };
                    if !ok || r.crossings % 2 == 0 {
                        bad += 1;
                    }
                }
                _ => bad += 1,
            }
        }
    }
    let secs = started.elapsed().as_secs_f64();
    outcome(
        bad == 0 && corpus.len() >= 200 && secs < 60.0,
        format!(
            "{} instances, {checked} oracle calls, {bad} mismatches, max |dw| {worst:.2e}, {secs:.1}s",
            corpus.len()
        ),
    )
}

fn lp_validity(corpus: &[Instance]) -> Outcome {
    let (mut bad_sweep, mut bad_bound, mut limit_hits) = (0, 0, 0);
    let mut max_cuts = 0;
    for inst in corpus {
        let (norm, base) = normalize_terminals(inst);
        let m = norm.num_colors();
        let st = match solve_hitting_lp(&norm, &LpOptions::default()) {
            Ok(st) => st,
            Err(Error::IterationLimit { .. }) => {
                limit_hits += 1;
                continue;
            }
            Err(e) => panic!("{e}"),
        };
        max_cuts = max_cuts.max(st.constraints.len());
        let p = &norm.terminals[0];
        let sweep = SeparatorOracle::new(&norm.graph, p.s, p.t).unwrap().solve(&st.x).unwrap();
        if let SeparatorOutcome::Separator(r) = sweep {
            if r.weight < 1.0 - 1e-7 {
                bad_sweep += 1;
            }
        }
        let q = &inst.terminals[0];
        let opt = exact_min_color_path(&inst.graph, q.s, q.t, 15).unwrap().value;
        if st.objective_value + base.len() as f64 > opt + 1e-9 {
            bad_bound += 1;
        }
        if st.constraints.len() > default_cut_limit(m, 1) {
            limit_hits += 1;
        }
    }
    outcome(
        bad_sweep + bad_bound + limit_hits == 0,
        format!(
            "{} instances, {bad_sweep} sweep violations, {bad_bound} LP > OPT, {limit_hits} limit hits, max {max_cuts} cuts",
            corpus.len()
        ),
    )
}

fn end_to_end() -> Outcome {
    let started = Instant::now();
    let (mut total, mut infeasible, mut violations) = (0, 0, 0);
    let mut max_side = 0;
    for i in 0..520u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(5000 + i);
        let w = rng.gen_range(4..=20);
        let h = rng.gen_range(4..=20);
        max_side = max_side.max(w.max(h));
        let m = rng.gen_range(1..=40);
        let size = rng.gen_range(2..=(w * h / 8).max(3));
        let inst = gen_grid(&GridParams::new(w, h, m, size), 5000 + i).unwrap();
        total += 1;
        match solve(&inst, &Config::default()) {
            Ok(sol) => {
                if !check_solution(&inst, &sol) {
                    infeasible += 1;
                }
            }
            Err(Error::InvariantViolation { .. }) => violations += 1,
            Err(e) => panic!("instance {i}: {e}"),
        }
    }
    outcome(
        total >= 500 && infeasible == 0 && violations == 0,
        format!(
            "{total} instances up to {max_side}x{max_side}, {infeasible} infeasible, {violations} invariant violations, {:.1}s",
            started.elapsed().as_secs_f64()
        ),
    )
}

fn approximation() -> Outcome {
    let mut hist: BTreeMap<String, usize> = BTreeMap::new();
    let (mut sandwich_bad, mut count) = (0, 0);
    let mut max_ratio = 1.0f64;
    for i in 0..300u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(9000 + i);
        let p = GridParams::new(
            rng.gen_range(4..=10),
            rng.gen_range(4..=10),
            rng.gen_range(1..=12),
            rng.gen_range(2..=10),
        );
        let inst = gen_grid(&p, 9000 + i).unwrap();
        let q = &inst.terminals[0];
        let opt = exact_min_color_path(&inst.graph, q.s, q.t, 15).unwrap().value;
        let sol = solve(&inst, &Config::default()).unwrap();
        count += 1;
        let lp_ceil = (sol.lower_bound - 1e-6).ceil();
        if !(lp_ceil <= opt && opt <= sol.objective) {
            sandwich_bad += 1;
        }
        let ratio = if opt > 0.0 {
            sol.objective / opt
        } else if sol.objective == 0.0 {
            1.0
        } else {
            f64::INFINITY
        };
        max_ratio = max_ratio.max(ratio);
        *hist.entry(format!("{:.2}", (ratio * 4.0).floor() / 4.0)).or_default() += 1;
    }
    let hist: Vec<String> = hist.iter().map(|(k, v)| format!("{k}:{v}")).collect();
    outcome(
        sandwich_bad == 0 && max_ratio <= 6.0,
        format!(
            "{count} instances (m <= 12), {sandwich_bad} sandwich violations, max ratio {max_ratio:.3}, histogram [{}]",
            hist.join(" ")
        ),
    )
}

fn grid_graph(w: usize, h: usize, d: impl Fn(usize) -> f64) -> ColorIntersectionGraph {
    let mut edges = Vec::new();
    for r in 0..h {
        for c in 0..w {
            if c + 1 < w {
                edges.push((r * w + c, r * w + c + 1));
            }
            if r + 1 < h {
                edges.push((r * w + c, (r + 1) * w + c));
            }
        }
    }
    ColorIntersectionGraph::from_edges((0..w * h).map(d).collect(), &edges)
}

fn decomposition() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut corpus: Vec<(String, ColorIntersectionGraph)> = Vec::new();
    for n in [5, 50, 500, 2000] {
        for d in [0.0, 0.05, 0.3, 0.39] {
            let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
            corpus.push((format!("path{n}-{d}"), ColorIntersectionGraph::from_edges(vec![d; n], &edges)));
        }
        let star: Vec<_> = (1..n).map(|i| (0, i)).collect();
        let d: Vec<f64> = (0..n).map(|i| if i == 0 { 0.3 } else { rng.gen_range(0.0..0.1) }).collect();
        corpus.push((format!("star{n}"), ColorIntersectionGraph::from_edges(d, &star)));
    }
    for (w, h) in [(10, 10), (25, 40), (40, 50)] {
        let ds: Vec<f64> = (0..w * h).map(|_| rng.gen_range(0.0..0.1)).collect();
        corpus.push((format!("grid{w}x{h}"), grid_graph(w, h, |i| ds[i])));
        corpus.push((format!("grid{w}x{h}-alt"), grid_graph(w, h, |i| if i % 3 == 0 { 0.09 } else { 0.001 })));
    }
    let mut decs = 0;
    let (mut diam_bad, mut bound_bad, mut partition_bad) = (0, 0, 0);
    let mut max_nodes = 0;
    for (_, g) in &corpus {
        max_nodes = max_nodes.max(g.len());
        for s in [Strategy::BallCarving, Strategy::KprChop] {
            let dec = decompose(g, 0.4, s).unwrap();
            decs += 1;
            let rep = verify_decomposition(g, &dec);
            if !rep.partition_ok {
                partition_bad += 1;
            }
            diam_bad += rep.diameter_violations.len();
            if s == Strategy::BallCarving && dec.cut.len() as f64 > ball_carving_bound(g, 0.4) + 1e-9 {
                bound_bad += 1;
            }
            debug_assert!(dec.components.iter().all(|c| path_weight_diameter(g, c) <= 0.4 + 1e-12));
        }
    }
    let secs = started.elapsed().as_secs_f64();
    outcome(
        diam_bad + bound_bad + partition_bad == 0 && secs < 120.0,
        format!(
            "{decs} decompositions (up to {max_nodes} nodes), {diam_bad} diameter violations, {bound_bad} bound violations, {partition_bad} bad partitions, {secs:.1}s"
        ),
    )
}

fn hitting_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let (mut checks, mut mismatches) = (0, 0);
    for i in 0..100u64 {
        let p = GridParams::new(rng.gen_range(3..=6), rng.gen_range(3..=6), rng.gen_range(1..=10), rng.gen_range(1..=6));
        let inst = gen_grid(&p, 700 + i).unwrap();
        let g = &inst.graph;
        let m = g.num_colors();
        let q = &inst.terminals[0];
        let seps = all_separators(g, q.s, q.t, 15).unwrap();
        for _ in 0..50 {
            let a: ColorSet = (0..m).filter(|_| rng.gen_bool(0.5)).collect();
            let hits = seps.iter().all(|s| s.intersects(&a));
            let found = extract_path(g, &a, q.s, q.t).is_some();
            checks += 1;
            if hits != found {
                mismatches += 1;
            }
        }
    }
    outcome(mismatches == 0, format!("{checks} subset checks on 100 instances, {mismatches} mismatches"))
}

/// Independent optimum: every color subset times every forfeit subset.
fn brute_prize(inst: &Instance) -> f64 {
    let g = &inst.graph;
    let m = g.num_colors();
    let k = inst.terminals.len();
    let mut best = f64::INFINITY;
    for cmask in 0u64..1 << m {
        let c = ColorSet::from_mask(cmask);
        for fmask in 0u32..1 << k {
            let mut cost = c.len() as f64;
            let mut ok = true;
            for (j, p) in inst.terminals.iter().enumerate() {
                if fmask >> j & 1 == 1 {
                    cost += p.prize;
                } else if extract_path(g, &c, p.s, p.t).is_none() {
                    ok = false;
                }
            }
            if ok {
                best = best.min(cost);
            }
        }
    }
    best
}

fn steiner_prize() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let (mut disagree, mut below_lp, mut infeasible, mut forfeiting) = (0, 0, 0, 0);
    for i in 0..100u64 {
        let small = i % 3 == 0;
        let p = GridParams {
            pairs: rng.gen_range(1..=3),
            prize: Some(if small { (0.05, 0.6) } else { (0.5, 4.0) }),
            ..GridParams::new(rng.gen_range(4..=7), rng.gen_range(4..=7), rng.gen_range(1..=10), rng.gen_range(2..=6))
        };
        let inst = gen_grid(&p, 300 + i).unwrap();
        let exact = exact_prize(&inst, 15).unwrap().value;
        if (exact - brute_prize(&inst)).abs() > 1e-9 {
            disagree += 1;
        }
        let sol = solve_prize(&inst, &Config::default()).unwrap();
        if sol.objective < sol.lower_bound - 1e-6 || sol.lower_bound > exact + 1e-6 {
            below_lp += 1;
        }
        if !check_solution(&inst, &sol) {
            infeasible += 1;
        }
        if sol.paths.iter().any(|p| p.forfeited()) {
            forfeiting += 1;
        }
    }
    outcome(
        disagree + below_lp + infeasible == 0 && forfeiting >= 20,
        format!(
            "100 instances, {disagree} exact/brute disagreements, {below_lp} LP-bound violations, {infeasible} infeasible, {forfeiting} with forfeits"
        ),
    )
}

fn hardness() -> Outcome {
    let params = HardnessParams {
        n: 8,
        r: 2,
        alpha: 0.5,
        beta: 0.5,
        k: 7.0,
    };
    let ell = params.ell();
    let (mut built, mut bad_shape, mut bad_planar, mut bad_cc, mut bad_opt) = (0, 0, 0, 0, 0);
    let mut seed = 0u64;
    while built < 100 {
        seed += 1;
        let hg = gen_random_hypergraph(params.n, 0.35, params.r, seed).unwrap();
        let inst = match gen_diamond_hardness(&hg, &params, seed) {
            Ok(inst) => inst,
            Err(Error::EmptyGroup { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        built += 1;
        let g = &inst.graph;
        if !is_diamond_path(g, ell) {
            bad_shape += 1;
        }
        if faces(g).is_err() {
            bad_planar += 1;
        }
        // hyperedge vertices are pairwise non-adjacent, so a color is
        // connected iff it appears on at most one of them
        let expect_cc = (0..params.n).all(|c| hg.hyperedges.iter().filter(|e| e.contains(&c)).count() <= 1);
        let cc = (0..params.n).all(|c| color_connected(g, c));
        let wired = add_color_connector(&inst);
        let cc_after = (0..params.n).all(|c| color_connected(&wired.graph, c));
        if cc != expect_cc || !cc_after || wired.graph.is_planar() {
            bad_cc += 1;
        }
        let opt = exact_min_color_path(g, 0, ell, 15).unwrap().value;
        let mut brute = f64::INFINITY;
        for mask in 0u64..1 << params.n {
            let c = ColorSet::from_mask(mask);
            if extract_path(g, &c, 0, ell).is_some() {
                brute = brute.min(c.len() as f64);
            }
        }
        if opt != brute {
            bad_opt += 1;
        }
    }
    let non_cc = validate(&gen_diamond_hardness(
        &gen_random_hypergraph(8, 0.9, 2, 1).unwrap(),
        &params,
        1,
    )
    .unwrap())
    .violations
    .len();
    outcome(
        bad_shape + bad_planar + bad_cc + bad_opt == 0 && non_cc > 0,
        format!(
            "{built} instances (ell = {ell}), {bad_shape} shape, {bad_planar} planarity, {bad_cc} color-connectivity, {bad_opt} OPT mismatches"
        ),
    )
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_minpath"))
            .args(["bench", "--suite", "small", "--seed", "7"])
            .output()
            .expect("binary runs")
    };
    let a = run();
    let b = run();
    let same = a.stdout == b.stdout && !a.stdout.is_empty();
    outcome(
        same && a.status.success() && b.status.success(),
        format!("{} bytes, identical = {same}", a.stdout.len()),
    )
}

fn main() {
    let corpus = small_corpus(220);
    let criteria: Vec<Criterion> = vec![
        ("separator oracle exactness", Box::new(|| separator_exactness(&corpus))),
        ("hitting LP validity", Box::new(|| lp_validity(&corpus))),
        ("end-to-end feasibility", Box::new(end_to_end)),
        ("approximation quality", Box::new(approximation)),
        ("decomposition diameter and cut bound", Box::new(decomposition)),
        ("hitting-set equivalence", Box::new(hitting_equivalence)),
        ("steiner and prize-collecting", Box::new(steiner_prize)),
        ("hardness generator", Box::new(hardness)),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        let o = check();
        println!("[{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
