use minpath::exact::{all_separators, exact_min_color_path, exact_min_separator};
use minpath::gen::{gen_grid, GridParams};
use minpath::instance::{normalize_terminals, parse, serialize};
use minpath::lp::{solve_hitting_lp, LpOptions};
use minpath::round::{check_solution, extract_path, solve};
use minpath::separator::{min_color_separator, verify_separator, SeparatorOutcome};
use minpath::{ColorSet, Config, Instance, Strategy as Decomp};
use proptest::prelude::*;

fn grid() -> impl Strategy<Value = Instance> {
    (3usize..=7, 3usize..=7, 1usize..=9, 1usize..=6, any::<u64>())
        .prop_map(|(w, h, m, size, seed)| gen_grid(&GridParams::new(w, h, m, size), seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// A color set admits a path iff it meets every separator.
    #[test]
    fn paths_and_separators_are_dual(inst in grid(), mask in any::<u64>()) {
        let g = &inst.graph;
        let p = &inst.terminals[0];
        let a = ColorSet::from_mask(mask & ((1 << g.num_colors()) - 1));
        let seps = all_separators(g, p.s, p.t, 15).unwrap();
        let hits = seps.iter().all(|s| s.intersects(&a));
        prop_assert_eq!(extract_path(g, &a, p.s, p.t).is_some(), hits);
        // the complement of a non-path set is a separator
        if !hits {
            prop_assert!(verify_separator(g, &ColorSet::full(g.num_colors()).difference(&a), p.s, p.t));
        }
    }

    #[test]
    fn oracle_matches_enumeration(inst in grid(), raw in prop::collection::vec(0.0f64..=1.0, 9)) {
        let (norm, _) = normalize_terminals(&inst);
        let g = &norm.graph;
        let p = &norm.terminals[0];
        let w = &raw[..g.num_colors()];
        let fast = min_color_separator(g, w, p.s, p.t).unwrap();
        let exact = exact_min_separator(g, w, p.s, p.t, 15).unwrap();
        match (fast, exact) {
            (SeparatorOutcome::NoSeparator, None) => {}
            (SeparatorOutcome::Separator(r), Some((_, ew))) => {
                prop_assert!((r.weight - ew).abs() <= 1e-9, "{} vs {}", r.weight, ew);
                prop_assert!(verify_separator(g, &r.colors, p.s, p.t));
            }
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
        }
    }

    #[test]
    fn lp_sandwich(inst in grid()) {
        let (norm, base) = normalize_terminals(&inst);
        let st = solve_hitting_lp(&norm, &LpOptions::default()).unwrap();
        let p = &inst.terminals[0];
        let opt = exact_min_color_path(&inst.graph, p.s, p.t, 15).unwrap().value;
        prop_assert!(st.objective_value + base.len() as f64 <= opt + 1e-7);
        prop_assert!(st.x.iter().all(|&x| (-1e-9..=1.0 + 1e-9).contains(&x)));
    }

    #[test]
    fn solutions_are_feasible(inst in grid(), kpr in any::<bool>()) {
        let config = Config {
            strategy: if kpr { Decomp::KprChop } else { Decomp::BallCarving },
            ..Config::default()
        };
        let sol = solve(&inst, &config).unwrap();
        prop_assert!(check_solution(&inst, &sol));
        prop_assert!(sol.lower_bound <= sol.objective + 1e-9);
    }

    #[test]
    fn json_round_trip(inst in grid()) {
        let back = parse(&serialize(&inst)).unwrap();
        prop_assert_eq!(serialize(&back), serialize(&inst));
    }
}
