mod common;

use std::fs;

use common::{by_scenario, dec, diverging_bundle, rejected, turns, GridOracle};
use proptest::prelude::*;
use rendezvous_core::exact_solver::{solve_value, solve_with, SolveOptions};
use rendezvous_core::line_model::{
    check_consistency, evaluate_bundle, evaluate_paths, Direction, GameInstance, GameKind, PathPlan, StrategyBundle,
};
use rendezvous_core::mesh_bounds::{bracket_1d, read_mesh_1d, sweep_1d, sweep_1d_to_file};
use rendezvous_core::{q, Rational};

fn d16() -> Rational {
    q(16, 1)
}

fn rational(max: i128) -> impl Strategy<Value = Rational> {
    (1i128..=8).prop_flat_map(move |den| (0..=max * den).prop_map(move |n| Rational::new(n, den)))
}

fn instance(kind: GameKind) -> impl Strategy<Value = GameInstance> {
    (rational(32), rational(32)).prop_map(move |(a, b)| match kind {
        GameKind::NoGift => GameInstance::no_gift(d16()).unwrap(),
        GameKind::OneGift => GameInstance::one_gift(d16(), b).unwrap(),
        _ => GameInstance::two_gifts(kind, d16(), a, b).unwrap(),
    })
}

fn any_instance() -> impl Strategy<Value = GameInstance> {
    prop_oneof![
        instance(GameKind::NoGift),
        instance(GameKind::OneGift),
        instance(GameKind::TwoGiftsOr),
        instance(GameKind::TwoGiftsAnd),
    ]
}

/// Up to four increasing turning points in `(0, 40]`.
fn path() -> impl Strategy<Value = PathPlan> {
    (any::<bool>(), prop::collection::btree_set(1i128..=160, 0..4)).prop_map(|(fwd, ts)| {
        let ts: Vec<Rational> = ts.into_iter().map(|t| Rational::new(t, 4)).collect();
        let dir = if fwd { Direction::Forward } else { Direction::Backward };
        PathPlan::from_turning_points(&ts, dir).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symmetry_reduction_keeps_the_value(inst in any_instance()) {
        let plain = solve_value(&inst).unwrap();
        let reduced = solve_with(&inst, SolveOptions { symmetry: true, ..Default::default() }).unwrap();
        prop_assert_eq!(plain.value, reduced.value);
    }

    #[test]
    fn seeding_does_not_change_the_value(inst in any_instance()) {
        let seeded = solve_value(&inst).unwrap();
        let unseeded = solve_with(&inst, SolveOptions { unseeded: true, ..Default::default() }).unwrap();
        prop_assert_eq!(seeded.value, unseeded.value);
        let v = evaluate_bundle(&inst, &unseeded.optimal_bundles[0]).unwrap().value;
        prop_assert_eq!(v, Some(unseeded.value));
    }

    #[test]
    fn solver_beats_every_fixed_pair(inst in any_instance(), f in path(), g in path()) {
        let bundle = StrategyBundle::fixed(&f, &g, inst.drop_i, inst.drop_ii);
        let solved = solve_value(&inst).unwrap().value;
        if let Some(v) = evaluate_bundle(&inst, &bundle).unwrap().value {
            prop_assert!(solved <= v, "fixed pair {} beats solver {}", v, solved);
        }
    }

    #[test]
    fn evaluator_scales(inst in any_instance(), f in path(), g in path(), k in rational(6)) {
        prop_assume!(k.signum() > 0);
        let bundle = StrategyBundle::fixed(&f, &g, inst.drop_i, inst.drop_ii);
        let out = evaluate_bundle(&inst, &bundle).unwrap();
        let scaled = evaluate_bundle(&inst.scaled(k).unwrap(), &bundle.scaled(k)).unwrap();
        prop_assert_eq!(scaled.end_times, out.end_times.map(|t| t.map(|t| t * k)));
    }

    #[test]
    fn evaluator_reflects(inst in any_instance(), f in path(), g in path()) {
        let out = evaluate_paths(&inst, &f, &g);
        let mi = evaluate_paths(&inst, &f.mirrored(), &g);
        let mii = evaluate_paths(&inst, &f, &g.mirrored());
        let e = out.end_times;
        prop_assert_eq!(mi.end_times, [e[2], e[3], e[0], e[1]]);
        prop_assert_eq!(mii.end_times, [e[3], e[2], e[1], e[0]]);
        prop_assert_eq!(mi.value, out.value);
    }

    #[test]
    fn unobservable_divergence_is_rejected(
        inst in any_instance(),
        base in path(),
        other in path(),
        odd in 0usize..4,
        player_i in any::<bool>(),
        t in 1i128..96,
    ) {
        let latest = [Some(q(8, 1)), inst.drop_i, inst.drop_ii].into_iter().flatten().min().unwrap();
        prop_assume!(latest.signum() > 0);
        let diverge = Rational::new(t, 12).min(latest * q(1, 2));
        let bundle = diverging_bundle(&inst, player_i, &base, &other, odd, diverge);
        prop_assert!(rejected(&inst, &bundle));
    }

    #[test]
    fn fixed_pairs_are_consistent(inst in any_instance(), f in path(), g in path()) {
        let bundle = StrategyBundle::fixed(&f, &g, inst.drop_i, inst.drop_ii);
        prop_assert!(check_consistency(&inst, &bundle).unwrap().is_consistent());
    }

    #[test]
    fn two_gift_values_are_symmetric(a in rational(16), b in rational(16)) {
        for kind in [GameKind::TwoGiftsOr, GameKind::TwoGiftsAnd] {
            let x = solve_value(&GameInstance::two_gifts(kind, d16(), a, b).unwrap()).unwrap().value;
            let y = solve_value(&GameInstance::two_gifts(kind, d16(), b, a).unwrap()).unwrap().value;
            prop_assert_eq!(x, y);
        }
    }
}

fn grid(kind: GameKind, drop_i: Option<i64>, drop_ii: Option<i64>) -> GridOracle {
    GridOracle {
        kind,
        d: 16,
        drop_i,
        drop_ii,
        horizon: 96,
    }
}

const GRID_TURNS: [i64; 8] = [4, 8, 12, 16, 20, 24, 28, 32];

#[test]
fn grid_oracle_agrees_where_fixed_pairs_are_optimal() {
    let cases = [
        (grid(GameKind::NoGift, None, None), GameInstance::no_gift(d16()).unwrap(), q(26, 1)),
        (
            grid(GameKind::OneGift, None, Some(4)),
            GameInstance::one_gift(d16(), q(4, 1)).unwrap(),
            q(21, 1),
        ),
        (
            grid(GameKind::TwoGiftsOr, Some(8), Some(8)),
            GameInstance::two_gifts(GameKind::TwoGiftsOr, d16(), q(8, 1), q(8, 1)).unwrap(),
            q(20, 1),
        ),
    ];
    for (oracle, inst, expected) in cases {
        let (best, f, g) = oracle.best(&GRID_TURNS, 3);
        let solved = solve_value(&inst).unwrap().value;
        assert_eq!(best, expected, "{:?}: grid best f={f:?} g={g:?}", inst.kind);
        assert_eq!(solved, expected, "{:?}", inst.kind);
    }
}

#[test]
fn grid_oracle_bounds_the_adaptive_game() {
    // both needed: adaptive play beats every fixed pair on the grid
    for (a, b) in [(0, 0), (8, 8), (4, 0), (0, 4)] {
        let (best, _, _) = grid(GameKind::TwoGiftsAnd, Some(a), Some(b)).best(&GRID_TURNS, 3);
        let inst = GameInstance::two_gifts(GameKind::TwoGiftsAnd, d16(), q(a as i128, 1), q(b as i128, 1)).unwrap();
        let solved = solve_value(&inst).unwrap().value;
        assert_eq!(solved, q(24, 1));
        assert!(best > solved, "({a}, {b}): grid {best} vs solver {solved}");
    }
}

#[test]
fn grid_oracle_matches_the_evaluator() {
    // the two simulators agree on grid paths
    let oracle = GridOracle {
        horizon: 64,
        ..grid(GameKind::TwoGiftsOr, Some(4), Some(12))
    };
    let inst = GameInstance::two_gifts(GameKind::TwoGiftsOr, d16(), q(4, 1), q(12, 1)).unwrap();
    let paths = common::bang_bang_paths(&[8, 16, 24], 2, oracle.horizon);
    for (fi, ft, fp) in &paths {
        for (gi, gt, gp) in &paths {
            let plan = |i: &i64, t: &Vec<i64>| {
                let ts: Vec<Rational> = t.iter().map(|&x| q(x as i128, 1)).collect();
                let dir = if *i > 0 { Direction::Forward } else { Direction::Backward };
                PathPlan::from_turning_points(&ts, dir).unwrap()
            };
            let out = evaluate_paths(&inst, &plan(fi, ft), &plan(gi, gt));
            let total = oracle.total(fp, gp);
            assert_eq!(total.map(|t| q(t as i128, 4)), out.value, "f {fi} {ft:?}, g {gi} {gt:?}");
        }
    }
}

#[test]
fn excluded_cells_hold_nothing_better() {
    let a = dec("0.00016");
    let mesh = sweep_1d(GameKind::OneGift, d16(), dec("3.99904"), dec("4.00096"), a, 1).unwrap();
    let report = bracket_1d(&mesh);
    let candidate = |i: usize| report.candidates.iter().any(|c| c.i0 < i && i <= c.i1);
    let mut probed = 0;
    for i in 1..mesh.len() {
        if candidate(i) {
            continue;
        }
        for frac in [q(1, 7), q(1, 2), q(5, 6)] {
            let t = mesh.point(i - 1) + a * frac;
            let v = solve_value(&GameInstance::one_gift(d16(), t).unwrap()).unwrap().value;
            assert!(v >= report.x_min, "x({t}) = {v} below {}", report.x_min);
            probed += 1;
        }
    }
    assert!(probed >= 9);
}

#[test]
fn refinement_stays_inside_the_parent_interval() {
    let a = dec("0.00032");
    let coarse = bracket_1d(&sweep_1d(GameKind::OneGift, d16(), dec("3.99872"), dec("4.00128"), a, 1).unwrap());
    let fine = bracket_1d(
        &sweep_1d(GameKind::OneGift, d16(), dec("3.99872"), dec("4.00128"), a * q(1, 2), 1).unwrap(),
    );
    assert!(coarse.interval[0] <= fine.x_min && fine.x_min <= coarse.interval[1]);
    let (clo, chi) = coarse.candidate_hull().unwrap();
    let (flo, fhi) = fine.candidate_hull().unwrap();
    assert!(clo[0] <= flo[0] && fhi[0] <= chi[0]);
}

#[test]
fn decimal_column_is_display_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.csv");
    let mesh = sweep_1d_to_file(&path, false, GameKind::OneGift, d16(), q(3, 1), q(5, 1), q(1, 4), 1).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    let blanked: Vec<String> = text
        .lines()
        .enumerate()
        .map(|(n, l)| {
            if n == 0 {
                return l.to_string();
            }
            let mut cols: Vec<&str> = l.split(',').collect();
            *cols.last_mut().unwrap() = "0";
            cols.join(",")
        })
        .collect();
    fs::write(&path, blanked.join("\n") + "\n").unwrap();
    assert_eq!(read_mesh_1d(&path, GameKind::OneGift, d16()).unwrap(), mesh);
}

#[test]
fn scenario_times_match_the_listed_quadruples() {
    let inst = GameInstance::no_gift(d16()).unwrap();
    let out = evaluate_paths(&inst, &turns(&[16]), &turns(&[8, 16, 32]));
    assert_eq!(out.ordered_times, by_scenario([8, 16, 32, 48]));
}
