use serde::Serialize;

use super::mesh::{Mesh1D, Mesh2D};
use crate::rational::Rational;

/// A block of mesh cells: `[d_i0, d_i1]` in 1-D, `[d_i0, d_i1] x [d_j0, d_j1]`
/// in 2-D, with the matching drop-time bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellRange {
    pub i0: usize,
    pub i1: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j0: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j1: Option<usize>,
    pub lower: Vec<Rational>,
    pub upper: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BracketReport {
    pub dims: usize,
    pub step: Rational,
    /// Smallest mesh value.
    pub x_min: Rational,
    /// Every mesh point attaining `x_min`.
    pub argmin: Vec<Vec<Rational>>,
    /// Interval containing the infimum over the whole meshed range.
    pub interval: [Rational; 2],
    /// Cells that may still hold a point below `x_min`.
    pub candidates: Vec<CellRange>,
    /// Border cells whose test needs a value outside the mesh. They are
    /// neither candidates nor excluded.
    pub undetermined: Vec<CellRange>,
    pub cells_total: usize,
}

impl BracketReport {
    /// Smallest box holding every candidate cell.
    pub fn candidate_hull(&self) -> Option<(Vec<Rational>, Vec<Rational>)> {
        let first = self.candidates.first()?;
        let (mut lo, mut hi) = (first.lower.clone(), first.upper.clone());
        for c in &self.candidates[1..] {
            for k in 0..self.dims {
                lo[k] = lo[k].min(c.lower[k]);
                hi[k] = hi[k].max(c.upper[k]);
            }
        }
        Some((lo, hi))
    }

    pub fn candidate_cells(&self) -> usize {
        self.candidates.iter().map(cell_count).sum()
    }

    pub fn undetermined_cells(&self) -> usize {
        self.undetermined.iter().map(cell_count).sum()
    }

    pub fn excluded_cells(&self) -> usize {
        self.cells_total - self.candidate_cells() - self.undetermined_cells()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

fn cell_count(c: &CellRange) -> usize {
    (c.i1 - c.i0) * c.j1.zip(c.j0).map_or(1, |(a, b)| a - b)
}

/// Merges sorted cell indices into runs `[first - 1, last]` of point indices.
fn runs(cells: &[usize]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for &c in cells {
        match out.last_mut() {
            Some(r) if r.1 == c - 1 => r.1 = c,
            _ => out.push((c - 1, c)),
        }
    }
    out
}

fn min_points<'a>(values: impl Iterator<Item = (Vec<Rational>, &'a Rational)>) -> (Rational, Vec<Vec<Rational>>) {
    let all: Vec<_> = values.collect();
    let x_min = *all.iter().map(|(_, v)| *v).min().expect("mesh is not empty");
    let argmin = all.into_iter().filter(|(_, v)| **v == x_min).map(|(p, _)| p).collect();
    (x_min, argmin)
}

/// Brackets the infimum of a 1-D mesh. The cell `[d_(i-1), d_i]` is a
/// candidate when `x(d_i) - a <= x_min`; otherwise every drop time in it has
/// value at least `x(d_i) - a > x_min`.
pub fn bracket_1d(mesh: &Mesh1D) -> BracketReport {
    let a = mesh.step;
    let (x_min, argmin) = min_points(mesh.values.iter().enumerate().map(|(i, v)| (vec![mesh.point(i)], v)));
    let cells: Vec<usize> = (1..mesh.len()).filter(|&i| mesh.values[i] - a <= x_min).collect();
    let candidates = runs(&cells)
        .into_iter()
        .map(|(i0, i1)| CellRange {
            i0,
            i1,
            j0: None,
            j1: None,
            lower: vec![mesh.point(i0)],
            upper: vec![mesh.point(i1)],
        })
        .collect();
    BracketReport {
        dims: 1,
        step: a,
        x_min,
        argmin,
        interval: [x_min - a, x_min],
        candidates,
        undetermined: Vec::new(),
        cells_total: mesh.len().saturating_sub(1),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Verdict {
    Candidate,
    Excluded,
    Undetermined,
}

/// Brackets the infimum of a 2-D mesh. For the cell with upper corner
/// `(d_i, d_j)`, the test below the diagonal uses `x(d_(i+1), d_j)` and the
/// one above uses `x(d_i, d_(j+1))`; diagonal cells may use either. A cell is
/// excluded when every applicable neighbour exceeds `x_min + 2a`.
pub fn bracket_2d(mesh: &Mesh2D) -> BracketReport {
    let a = mesh.step;
    let n = mesh.n;
    let (x_min, argmin) = min_points(
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (vec![mesh.point(i), mesh.point(j)], &mesh.values[i * n + j])),
    );
    let threshold = x_min + a + a;
    let verdict = |i: usize, j: usize| {
        let mut tests = Vec::new();
        if i >= j {
            tests.push((i + 1 < n).then(|| mesh.at(i + 1, j)));
        }
        if j >= i {
            tests.push((j + 1 < n).then(|| mesh.at(i, j + 1)));
        }
        if tests.iter().any(|t| matches!(t, Some(x) if *x <= threshold)) {
            Verdict::Candidate
        } else if tests.iter().any(Option::is_none) {
            Verdict::Undetermined
        } else {
            Verdict::Excluded
        }
    };
    let mut candidates = Vec::new();
    let mut undetermined = Vec::new();
    for i in 1..n {
        for (want, out) in [(Verdict::Candidate, &mut candidates), (Verdict::Undetermined, &mut undetermined)] {
            let cells: Vec<usize> = (1..n).filter(|&j| verdict(i, j) == want).collect();
            for (j0, j1) in runs(&cells) {
                out.push(CellRange {
                    i0: i - 1,
                    i1: i,
                    j0: Some(j0),
                    j1: Some(j1),
                    lower: vec![mesh.point(i - 1), mesh.point(j0)],
                    upper: vec![mesh.point(i), mesh.point(j1)],
                });
            }
        }
    }
    BracketReport {
        dims: 2,
        step: a,
        x_min,
        argmin,
        interval: [x_min - a - a, x_min],
        candidates,
        undetermined,
        cells_total: n.saturating_sub(1).pow(2),
    }
}
