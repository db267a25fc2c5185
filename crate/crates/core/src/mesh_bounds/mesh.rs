use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::MeshError;
use crate::exact_solver::solve_value;
use crate::line_model::{GameInstance, GameKind};
use crate::rational::Rational;

/// Grid `lo, lo + step, ...` up to and including the last point `<= hi`.
fn grid(lo: Rational, hi: Rational, step: Rational) -> Result<Vec<Rational>, MeshError> {
    if step.signum() <= 0 {
        return Err(MeshError::NonPositiveStep(step));
    }
    if lo > hi {
        return Err(MeshError::EmptyRange { lo, hi });
    }
    let count = ((hi - lo) / step).numer() / ((hi - lo) / step).denom();
    Ok((0..=count).map(|i| lo + step * Rational::from(i)).collect())
}

/// Values of the one-gift game on a regular mesh of Player II's drop time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mesh1D {
    pub kind: GameKind,
    pub distance: Rational,
    pub lo: Rational,
    pub step: Rational,
    /// `values[i]` is the value at `lo + i * step`.
    pub values: Vec<Rational>,
}

impl Mesh1D {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn point(&self, i: usize) -> Rational {
        self.lo + self.step * Rational::from(i as i128)
    }

    pub fn hi(&self) -> Rational {
        self.point(self.len().saturating_sub(1))
    }

    pub fn points(&self) -> impl Iterator<Item = (Rational, Rational)> + '_ {
        self.values.iter().enumerate().map(|(i, v)| (self.point(i), *v))
    }
}

/// Values of a two-gift game on a square mesh of both drop times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mesh2D {
    pub kind: GameKind,
    pub distance: Rational,
    pub lo: Rational,
    pub step: Rational,
    /// Points per axis.
    pub n: usize,
    /// `values[i * n + j]` is the value at `(lo + i * step, lo + j * step)`,
    /// `i` indexing Player I's drop time.
    pub values: Vec<Rational>,
}

impl Mesh2D {
    pub fn point(&self, i: usize) -> Rational {
        self.lo + self.step * Rational::from(i as i128)
    }

    pub fn at(&self, i: usize, j: usize) -> Rational {
        self.values[i * self.n + j]
    }

    pub fn points(&self) -> impl Iterator<Item = (Rational, Rational, Rational)> + '_ {
        (0..self.n).flat_map(move |i| (0..self.n).map(move |j| (self.point(i), self.point(j), self.at(i, j))))
    }
}

fn solve_point(kind: GameKind, d: Rational, tau1: Option<Rational>, tau2: Rational) -> Result<Rational, MeshError> {
    let label = match tau1 {
        Some(t1) => format!("({t1}, {tau2})"),
        None => tau2.to_string(),
    };
    let wrap = |source| MeshError::Solve {
        point: label.clone(),
        source,
    };
    let instance = GameInstance::new(kind, d, tau1, Some(tau2)).map_err(|e| wrap(e.into()))?;
    solve_value(&instance).map(|r| r.value).map_err(wrap)
}

fn pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool")
}

/// Sweeps Player II's drop time over `[lo, hi]` in the one-gift game.
pub fn sweep_1d(
    kind: GameKind,
    distance: Rational,
    lo: Rational,
    hi: Rational,
    step: Rational,
    workers: usize,
) -> Result<Mesh1D, MeshError> {
    sweep_1d_with(kind, distance, lo, hi, step, workers, &BTreeMap::new(), |_| Ok(()))
}

#[allow(clippy::too_many_arguments)]
fn sweep_1d_with(
    kind: GameKind,
    distance: Rational,
    lo: Rational,
    hi: Rational,
    step: Rational,
    workers: usize,
    known: &BTreeMap<Rational, Rational>,
    mut sink: impl FnMut(&[(Rational, Rational)]) -> Result<(), MeshError>,
) -> Result<Mesh1D, MeshError> {
    if kind != GameKind::OneGift {
        return Err(MeshError::WrongGame("only the one-gift game has a 1-D drop schedule"));
    }
    let taus = grid(lo, hi, step)?;
    let todo: Vec<Rational> = taus.iter().copied().filter(|t| !known.contains_key(t)).collect();
    let mut found = known.clone();
    let pool = pool(workers);
    for chunk in todo.chunks(CHUNK) {
        let solved: Vec<(Rational, Rational)> = pool.install(|| {
            chunk
                .par_iter()
                .map(|&t| solve_point(kind, distance, None, t).map(|v| (t, v)))
                .collect::<Result<_, _>>()
        })?;
        sink(&solved)?;
        found.extend(solved);
    }
    Ok(Mesh1D {
        kind,
        distance,
        lo,
        step,
        values: taus.iter().map(|t| found[t]).collect(),
    })
}

const CHUNK: usize = 64;

/// Sweeps both drop times over `[lo, hi]^2` in a two-gift game.
pub fn sweep_2d(
    kind: GameKind,
    distance: Rational,
    lo: Rational,
    hi: Rational,
    step: Rational,
    workers: usize,
) -> Result<Mesh2D, MeshError> {
    sweep_2d_with(kind, distance, lo, hi, step, workers, &BTreeMap::new(), |_| Ok(()))
}

type Cell2 = (Rational, Rational);

#[allow(clippy::too_many_arguments)]
fn sweep_2d_with(
    kind: GameKind,
    distance: Rational,
    lo: Rational,
    hi: Rational,
    step: Rational,
    workers: usize,
    known: &BTreeMap<Cell2, Rational>,
    mut sink: impl FnMut(&[(Cell2, Rational)]) -> Result<(), MeshError>,
) -> Result<Mesh2D, MeshError> {
    if !matches!(kind, GameKind::TwoGiftsOr | GameKind::TwoGiftsAnd) {
        return Err(MeshError::WrongGame("a 2-D sweep needs a two-gift game"));
    }
    let taus = grid(lo, hi, step)?;
    let cells: Vec<Cell2> = taus.iter().flat_map(|&a| taus.iter().map(move |&b| (a, b))).collect();
    let todo: Vec<Cell2> = cells.iter().copied().filter(|c| !known.contains_key(c)).collect();
    let mut found = known.clone();
    let pool = pool(workers);
    for chunk in todo.chunks(CHUNK) {
        let solved: Vec<(Cell2, Rational)> = pool.install(|| {
            chunk
                .par_iter()
                .map(|&(a, b)| solve_point(kind, distance, Some(a), b).map(|v| ((a, b), v)))
                .collect::<Result<_, _>>()
        })?;
        sink(&solved)?;
        found.extend(solved);
    }
    Ok(Mesh2D {
        kind,
        distance,
        lo,
        step,
        n: taus.len(),
        values: cells.iter().map(|c| found[c]).collect(),
    })
}

const HEADER_1D: [&str; 4] = ["tau", "value_num", "value_den", "value_decimal15"];
const HEADER_2D: [&str; 5] = ["tau1", "tau2", "value_num", "value_den", "value_decimal15"];

fn value_fields(v: Rational) -> [String; 3] {
    [v.numer().to_string(), v.denom().to_string(), v.to_decimal(15)]
}

fn parse_rational(s: &str) -> Result<Rational, MeshError> {
    s.parse().map_err(|e| MeshError::Format(format!("bad number {s:?}: {e}")))
}

fn parse_value(num: &str, den: &str) -> Result<Rational, MeshError> {
    let num: i128 = num.parse().map_err(|_| MeshError::Format(format!("bad numerator {num:?}")))?;
    let den: i128 = den.parse().map_err(|_| MeshError::Format(format!("bad denominator {den:?}")))?;
    if den <= 0 {
        return Err(MeshError::Format(format!("bad denominator {den}")));
    }
    Ok(Rational::new(num, den))
}

/// One parsed mesh row: drop times (one or two) and the value.
type Row = (Vec<Rational>, Rational);

fn read_rows(path: &Path) -> Result<(usize, Vec<Row>), MeshError> {
    let mut reader = csv::ReaderBuilder::new().flexible(false).from_path(path)?;
    let header = reader.headers()?.clone();
    let dims = if header.iter().eq(HEADER_1D) {
        1
    } else if header.iter().eq(HEADER_2D) {
        2
    } else {
        return Err(MeshError::Format(format!(
            "{}: unrecognised header {:?}",
            path.display(),
            header.iter().collect::<Vec<_>>()
        )));
    };
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let taus = (0..dims).map(|k| parse_rational(&record[k])).collect::<Result<Vec<_>, _>>()?;
        let value = parse_value(&record[dims], &record[dims + 1])?;
        rows.push((taus, value));
    }
    Ok((dims, rows))
}

fn uniform_axis(mut taus: Vec<Rational>) -> Result<(Rational, Rational, usize), MeshError> {
    taus.sort();
    taus.dedup();
    let lo = *taus.first().ok_or_else(|| MeshError::Format("mesh file has no rows".into()))?;
    if taus.len() == 1 {
        return Ok((lo, Rational::ONE, 1));
    }
    let step = taus[1] - taus[0];
    for (i, t) in taus.iter().enumerate() {
        if *t != lo + step * Rational::from(i as i128) {
            return Err(MeshError::Format(format!("drop times are not a regular mesh near {t}")));
        }
    }
    Ok((lo, step, taus.len()))
}

/// Reads a complete 1-D mesh. Single-point meshes get step 1.
pub fn read_mesh_1d(path: &Path, kind: GameKind, distance: Rational) -> Result<Mesh1D, MeshError> {
    let (dims, rows) = read_rows(path)?;
    if dims != 1 {
        return Err(MeshError::Format("expected a 1-D mesh".into()));
    }
    let (lo, step, n) = uniform_axis(rows.iter().map(|r| r.0[0]).collect())?;
    if rows.len() != n {
        return Err(MeshError::Format("duplicate drop times in mesh file".into()));
    }
    let mut values = vec![Rational::ZERO; n];
    for (taus, v) in rows {
        let i = ((taus[0] - lo) / step).numer() as usize;
        values[i] = v;
    }
    Ok(Mesh1D {
        kind,
        distance,
        lo,
        step,
        values,
    })
}

/// Reads a complete 2-D mesh.
pub fn read_mesh_2d(path: &Path, kind: GameKind, distance: Rational) -> Result<Mesh2D, MeshError> {
    let (dims, rows) = read_rows(path)?;
    if dims != 2 {
        return Err(MeshError::Format("expected a 2-D mesh".into()));
    }
    let (lo, step, n) = uniform_axis(rows.iter().flat_map(|r| r.0.clone()).collect())?;
    let mut values = vec![None; n * n];
    for (taus, v) in rows {
        let i = ((taus[0] - lo) / step).numer() as usize;
        let j = ((taus[1] - lo) / step).numer() as usize;
        if values[i * n + j].replace(v).is_some() {
            return Err(MeshError::Format(format!("duplicate row ({}, {})", taus[0], taus[1])));
        }
    }
    let values = values
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| MeshError::Format("2-D mesh file is incomplete".into()))?;
    Ok(Mesh2D {
        kind,
        distance,
        lo,
        step,
        n,
        values,
    })
}

/// Which of the two mesh files a CSV holds.
pub fn mesh_dimension(path: &Path) -> Result<usize, MeshError> {
    let mut reader = csv::ReaderBuilder::new().from_path(path)?;
    let header = reader.headers()?;
    if header.iter().eq(HEADER_1D) {
        Ok(1)
    } else if header.iter().eq(HEADER_2D) {
        Ok(2)
    } else {
        Err(MeshError::Format(format!("{}: not a mesh file", path.display())))
    }
}

fn write_atomic(path: &Path, write: impl FnOnce(&mut csv::Writer<fs::File>) -> Result<(), MeshError>) -> Result<(), MeshError> {
    let tmp = tmp_path(path);
    {
        let mut w = csv::Writer::from_path(&tmp)?;
        write(&mut w)?;
        w.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".tmp");
    path.with_file_name(name)
}

pub fn write_mesh_1d(path: &Path, mesh: &Mesh1D) -> Result<(), MeshError> {
    write_atomic(path, |w| {
        w.write_record(HEADER_1D)?;
        for (t, v) in mesh.points() {
            let [n, d, dec] = value_fields(v);
            w.write_record([t.to_string(), n, d, dec])?;
        }
        Ok(())
    })
}

pub fn write_mesh_2d(path: &Path, mesh: &Mesh2D) -> Result<(), MeshError> {
    write_atomic(path, |w| {
        w.write_record(HEADER_2D)?;
        for (a, b, v) in mesh.points() {
            let [n, d, dec] = value_fields(v);
            w.write_record([a.to_string(), b.to_string(), n, d, dec])?;
        }
        Ok(())
    })
}

/// Opens `path` for appending rows, starting a fresh file (with header)
/// unless resuming. An existing file is never overwritten without `resume`.
fn open_for_sweep(path: &Path, resume: bool, header: &[&str]) -> Result<(fs::File, bool), MeshError> {
    let exists = path.exists();
    if exists && !resume {
        return Err(MeshError::Format(format!(
            "{} already exists; pass resume to continue it",
            path.display()
        )));
    }
    let mut file = fs::OpenOptions::new().create(true).append(true).open(path)?;
    if !exists || fs::metadata(path)?.len() == 0 {
        writeln!(file, "{}", header.join(","))?;
        return Ok((file, false));
    }
    Ok((file, true))
}

fn append_rows(file: &mut fs::File, rows: &[Vec<String>]) -> Result<(), MeshError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| MeshError::Format(e.to_string()))?;
    file.write_all(&bytes)?;
    file.sync_data()?;
    Ok(())
}

/// Like [`sweep_1d`], persisting each batch of solved points to `path` as
/// it completes. With `resume`, points already in the file are kept and
/// skipped. The finished file is rewritten in mesh order.
#[allow(clippy::too_many_arguments)]
pub fn sweep_1d_to_file(
    path: &Path,
    resume: bool,
    kind: GameKind,
    distance: Rational,
    lo: Rational,
    hi: Rational,
    step: Rational,
    workers: usize,
) -> Result<Mesh1D, MeshError> {
    let (mut file, had_rows) = open_for_sweep(path, resume, &HEADER_1D)?;
    let mut known = BTreeMap::new();
    if had_rows {
        let (dims, rows) = read_rows(path)?;
        if dims != 1 {
            return Err(MeshError::Format("cannot resume a 2-D mesh as 1-D".into()));
        }
        known.extend(rows.into_iter().map(|(t, v)| (t[0], v)));
    }
    let mesh = sweep_1d_with(kind, distance, lo, hi, step, workers, &known, |rows| {
        let rows: Vec<Vec<String>> = rows
            .iter()
            .map(|(t, v)| {
                let [n, d, dec] = value_fields(*v);
                vec![t.to_string(), n, d, dec]
            })
            .collect();
        append_rows(&mut file, &rows)
    })?;
    drop(file);
    write_mesh_1d(path, &mesh)?;
    Ok(mesh)
}

/// Two-gift counterpart of [`sweep_1d_to_file`].
#[allow(clippy::too_many_arguments)]
pub fn sweep_2d_to_file(
    path: &Path,
    resume: bool,
    kind: GameKind,
    distance: Rational,
    lo: Rational,
    hi: Rational,
    step: Rational,
    workers: usize,
) -> Result<Mesh2D, MeshError> {
    let (mut file, had_rows) = open_for_sweep(path, resume, &HEADER_2D)?;
    let mut known = BTreeMap::new();
    if had_rows {
        let (dims, rows) = read_rows(path)?;
        if dims != 2 {
            return Err(MeshError::Format("cannot resume a 1-D mesh as 2-D".into()));
        }
        known.extend(rows.into_iter().map(|(t, v)| ((t[0], t[1]), v)));
    }
    let mesh = sweep_2d_with(kind, distance, lo, hi, step, workers, &known, |rows| {
        let rows: Vec<Vec<String>> = rows
            .iter()
            .map(|((a, b), v)| {
                let [n, d, dec] = value_fields(*v);
                vec![a.to_string(), b.to_string(), n, d, dec]
            })
            .collect();
        append_rows(&mut file, &rows)
    })?;
    drop(file);
    write_mesh_2d(path, &mesh)?;
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn grid_is_exact() {
        let g = grid(q(399968, 100000), q(400032, 100000), q(16, 100000)).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g[2], q(4, 1));
        assert_eq!(grid(q(4, 1), q(4, 1), q(1, 4)).unwrap(), vec![q(4, 1)]);
        assert_eq!(grid(q(0, 1), q(1, 1), q(1, 3)).unwrap().len(), 4);
        assert!(grid(q(1, 1), q(0, 1), q(1, 1)).is_err());
        assert!(grid(q(0, 1), q(1, 1), q(0, 1)).is_err());
    }

    #[test]
    fn single_point_sweep() {
        let m = sweep_1d(GameKind::OneGift, q(16, 1), q(4, 1), q(4, 1), q(1, 4), 1).unwrap();
        assert_eq!(m.values, vec![q(21, 1)]);
    }

    #[test]
    fn wrong_game_rejected() {
        assert!(matches!(
            sweep_1d(GameKind::TwoGiftsOr, q(16, 1), q(0, 1), q(1, 1), q(1, 1), 1),
            Err(MeshError::WrongGame(_))
        ));
        assert!(matches!(
            sweep_2d(GameKind::OneGift, q(16, 1), q(0, 1), q(1, 1), q(1, 1), 1),
            Err(MeshError::WrongGame(_))
        ));
    }

    #[test]
    fn file_round_trip_and_resume() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let d = q(16, 1);
        let full = sweep_1d_to_file(&path, false, GameKind::OneGift, d, q(3, 1), q(5, 1), q(1, 2), 2).unwrap();
        assert_eq!(read_mesh_1d(&path, GameKind::OneGift, d).unwrap(), full);
        // refuses to clobber
        assert!(sweep_1d_to_file(&path, false, GameKind::OneGift, d, q(3, 1), q(5, 1), q(1, 2), 2).is_err());
        // drop the last rows and resume
        let text = fs::read_to_string(&path).unwrap();
        let kept: Vec<&str> = text.lines().take(3).collect();
        fs::write(&path, kept.join("\n") + "\n").unwrap();
        let resumed = sweep_1d_to_file(&path, true, GameKind::OneGift, d, q(3, 1), q(5, 1), q(1, 2), 1).unwrap();
        assert_eq!(resumed, full);
        assert_eq!(fs::read_to_string(&path).unwrap(), text);
    }

    #[test]
    fn output_is_independent_of_worker_count() {
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
        let d = q(16, 1);
        sweep_2d_to_file(&a, false, GameKind::TwoGiftsOr, d, q(6, 1), q(8, 1), q(1, 1), 1).unwrap();
        sweep_2d_to_file(&b, false, GameKind::TwoGiftsOr, d, q(6, 1), q(8, 1), q(1, 1), 3).unwrap();
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
        let m = read_mesh_2d(&a, GameKind::TwoGiftsOr, d).unwrap();
        assert_eq!(m.n, 3);
        assert_eq!(m.at(2, 2), q(20, 1));
    }
}
