//! Reference tables at D = 16: local fine windows at mesh step 0.00016 and
//! the value of the best closed-form schedules.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use rendezvous_core::exact_solver::solve_value;
use rendezvous_core::line_model::{GameInstance, GameKind};
use rendezvous_core::mesh_bounds::{bracket_1d, bracket_2d, sweep_1d, sweep_2d, BracketReport};
use rendezvous_core::Rational;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Table1,
    Table2,
    Table3,
    ExclusionOr,
    ExclusionAnd,
    All,
}

const SINGLE: [Target; 5] = [
    Target::Table1,
    Target::Table2,
    Target::Table3,
    Target::ExclusionOr,
    Target::ExclusionAnd,
];

impl Target {
    fn file_stem(self) -> &'static str {
        match self {
            Target::Table1 => "table1",
            Target::Table2 => "table2",
            Target::Table3 => "table3",
            Target::ExclusionOr => "exclusion_or",
            Target::ExclusionAnd => "exclusion_and",
            Target::All => "all",
        }
    }
}

fn r(n: i128) -> Rational {
    Rational::from(n)
}

fn distance() -> Rational {
    r(16)
}

/// Mesh step 0.00016.
fn alpha() -> Rational {
    Rational::new(1, 6250)
}

/// Shortest decimal form, for reading alongside the exact `p/q`.
fn dec(x: Rational) -> String {
    let s = x.to_decimal(15);
    match s.split_once('.') {
        Some((int, frac)) if frac.trim_end_matches('0').is_empty() => int.to_string(),
        Some((int, frac)) => format!("{int}.{}", frac.trim_end_matches('0')),
        None => s,
    }
}

fn exact(x: Rational) -> Value {
    json!({ "exact": x.to_string(), "decimal": dec(x) })
}

/// Window `[center - below * a, center + above * a]`, clipped at zero.
fn window(center: Rational, below: i128, above: i128) -> (Rational, Rational) {
    let a = alpha();
    ((center - a * r(below)).max(Rational::ZERO), center + a * r(above))
}

fn window_json(lo: Rational, hi: Rational) -> Value {
    json!({ "lo": exact(lo), "hi": exact(hi), "step": exact(alpha()) })
}

fn bracket_json(report: &BracketReport) -> Value {
    let hull = report.candidate_hull().map(|(lo, hi)| {
        json!({
            "lower": lo.iter().map(|x| exact(*x)).collect::<Vec<_>>(),
            "upper": hi.iter().map(|x| exact(*x)).collect::<Vec<_>>(),
        })
    });
    json!({
        "x_min": exact(report.x_min),
        "interval": [exact(report.interval[0]), exact(report.interval[1])],
        "argmin": report.argmin.iter().map(|p| p.iter().map(|x| exact(*x)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "candidate_hull": hull,
        "candidate_cells": report.candidate_cells(),
        "undetermined_cells": report.undetermined_cells(),
        "excluded_cells": report.excluded_cells(),
        "candidates": report.candidates,
        "undetermined": report.undetermined,
    })
}

fn table2_window(workers: usize) -> Result<(Rational, Rational, rendezvous_core::mesh_bounds::Mesh1D)> {
    let (lo, hi) = window(r(4), 2, 2);
    let mesh = sweep_1d(GameKind::OneGift, distance(), lo, hi, alpha(), workers)?;
    Ok((lo, hi, mesh))
}

fn local_2d(kind: GameKind, center: Rational, below: i128, above: i128, workers: usize) -> Result<(Value, BracketReport)> {
    let (lo, hi) = window(center, below, above);
    let mesh = sweep_2d(kind, distance(), lo, hi, alpha(), workers)?;
    let report = bracket_2d(&mesh);
    Ok((json!({ "window": window_json(lo, hi), "bracket": bracket_json(&report) }), report))
}

fn value_at(kind: GameKind, drops: (Option<Rational>, Option<Rational>)) -> Result<Rational> {
    Ok(solve_value(&GameInstance::new(kind, distance(), drops.0, drops.1)?)?.value)
}

fn drops_json(drops: &[(Option<Rational>, Option<Rational>)]) -> Value {
    drops
        .iter()
        .map(|(a, b)| {
            let side = |x: &Option<Rational>| x.map_or(Value::Null, exact);
            json!([side(a), side(b)])
        })
        .collect()
}

fn table1(workers: usize) -> Result<Value> {
    let mut rows = Vec::new();
    let g = value_at(GameKind::NoGift, (None, None))?;
    rows.push(json!({
        "game": "g",
        "drops": [],
        "x_min": exact(g),
        "interval": [exact(g), exact(g)],
    }));

    let (_, _, mesh) = table2_window(workers)?;
    let b = bracket_1d(&mesh);
    rows.push(json!({
        "game": "g1",
        "drops": drops_json(&[(None, Some(r(4)))]),
        "x_min": exact(b.x_min),
        "interval": [exact(b.interval[0]), exact(b.interval[1])],
    }));

    let (_, b) = local_2d(GameKind::TwoGiftsOr, r(8), 2, 2, workers)?;
    rows.push(json!({
        "game": "g2or",
        "drops": drops_json(&[(Some(r(8)), Some(r(8)))]),
        "x_min": exact(b.x_min),
        "interval": [exact(b.interval[0]), exact(b.interval[1])],
    }));

    // (4, x) stands for a stripe; sample a few x
    let and_drops: Vec<_> = [(0, 0), (8, 8), (4, 0), (4, 2), (4, 6), (4, 12)]
        .iter()
        .map(|&(a, b)| (Some(r(a)), Some(r(b))))
        .collect();
    let values = and_drops
        .iter()
        .map(|d| value_at(GameKind::TwoGiftsAnd, *d))
        .collect::<Result<Vec<_>>>()?;
    let (_, b) = local_2d(GameKind::TwoGiftsAnd, r(0), 0, 4, workers)?;
    let x_min = values.iter().copied().chain([b.x_min]).min().expect("non-empty");
    let step2 = alpha() + alpha();
    rows.push(json!({
        "game": "g2and",
        "drops": drops_json(&and_drops),
        "values": values.iter().map(|v| exact(*v)).collect::<Vec<_>>(),
        "x_min": exact(x_min),
        "interval": [exact(x_min - step2), exact(x_min)],
    }));
    Ok(json!({ "distance": exact(distance()), "step": exact(alpha()), "rows": rows }))
}

fn table2(workers: usize) -> Result<Value> {
    let (lo, hi, mesh) = table2_window(workers)?;
    let points: Vec<Value> = mesh
        .points()
        .map(|(t, v)| json!({ "tau": exact(t), "value": exact(v) }))
        .collect();
    Ok(json!({
        "game": "g1",
        "window": window_json(lo, hi),
        "points": points,
        "bracket": bracket_json(&bracket_1d(&mesh)),
    }))
}

fn table3(workers: usize) -> Result<Value> {
    let (lo, hi) = window(r(0), 0, 4);
    let mesh = sweep_2d(GameKind::TwoGiftsAnd, distance(), lo, hi, alpha(), workers)?;
    // rows by Player II's drop time, columns by Player I's
    let rows: Vec<Value> = (0..mesh.n)
        .map(|j| {
            json!({
                "l2": exact(mesh.point(j)),
                "values": (0..mesh.n).map(|i| exact(mesh.at(i, j))).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(json!({
        "game": "g2and",
        "window": window_json(lo, hi),
        "l1": (0..mesh.n).map(|i| exact(mesh.point(i))).collect::<Vec<_>>(),
        "rows": rows,
    }))
}

fn exclusion_or(workers: usize) -> Result<Value> {
    let (v, _) = local_2d(GameKind::TwoGiftsOr, r(8), 15, 15, workers)?;
    Ok(json!({ "game": "g2or", "around": [exact(r(8)), exact(r(8))], "report": v }))
}

fn exclusion_and(workers: usize) -> Result<Value> {
    let mut regions = Vec::new();
    for (center, below, above) in [(0, 0, 15), (4, 15, 15), (8, 15, 15)] {
        let (v, _) = local_2d(GameKind::TwoGiftsAnd, r(center), below, above, workers)?;
        regions.push(json!({ "around": [exact(r(center)), exact(r(center))], "report": v }));
    }
    Ok(json!({ "game": "g2and", "regions": regions }))
}

fn build(target: Target, workers: usize) -> Result<Value> {
    match target {
        Target::Table1 => table1(workers),
        Target::Table2 => table2(workers),
        Target::Table3 => table3(workers),
        Target::ExclusionOr => exclusion_or(workers),
        Target::ExclusionAnd => exclusion_and(workers),
        Target::All => {
            let mut all = serde_json::Map::new();
            for t in SINGLE {
                all.insert(t.file_stem().to_string(), build(t, workers)?);
            }
            Ok(Value::Object(all))
        }
    }
}

pub fn run(target: Target, out: Option<&Path>, workers: usize) -> Result<()> {
    let Some(dir) = out else {
        return crate::print_stdout(&serde_json::to_string_pretty(&build(target, workers)?)?);
    };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let targets: Vec<Target> = if target == Target::All { SINGLE.to_vec() } else { vec![target] };
    for t in targets {
        let path = dir.join(format!("{}.json", t.file_stem()));
        let text = serde_json::to_string_pretty(&build(t, workers)?)?;
        fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}
