use serde::Serialize;

use super::mesh::{Mesh1D, Mesh2D};
use crate::rational::Rational;

/// The neighbour inequalities checked between adjacent mesh points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    /// `x(l) >= x(l + a) - a`
    Ahead,
    /// `x(l) >= x(l - a) - 2a`
    Behind,
    /// `|x(l + a) - x(l)| <= a`
    Step,
    /// `x(l1, l2) >= x(l1 + a, l2) - a` for `l1 >= l2`
    FirstAxis,
    /// `x(l1, l2) >= x(l1 + a, l2 + a) - a`
    Diagonal,
    /// `x(l1, l2) >= x(l1, l2 + a) - a` for `l2 >= l1`
    SecondAxis,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditViolation {
    pub inequality: Inequality,
    pub point: Vec<Rational>,
    pub neighbor: Vec<Rational>,
    pub value: Rational,
    pub neighbor_value: Rational,
    /// How far the inequality is missed, always positive.
    pub excess: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub checked: usize,
    pub violations: Vec<AuditViolation>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, inequality: Inequality) -> usize {
        self.violations.iter().filter(|v| v.inequality == inequality).count()
    }
}

struct Auditor {
    report: AuditReport,
}

impl Auditor {
    /// Records `lhs >= rhs`.
    fn check(
        &mut self,
        inequality: Inequality,
        point: Vec<Rational>,
        neighbor: Vec<Rational>,
        (value, neighbor_value): (Rational, Rational),
        lhs: Rational,
        rhs: Rational,
    ) {
        self.report.checked += 1;
        if lhs < rhs {
            self.report.violations.push(AuditViolation {
                inequality,
                point,
                neighbor,
                value,
                neighbor_value,
                excess: rhs - lhs,
            });
        }
    }
}

/// Checks every adjacent pair of a 1-D mesh against the one-step bounds.
pub fn lipschitz_audit_1d(mesh: &Mesh1D) -> AuditReport {
    let a = mesh.step;
    let mut au = Auditor {
        report: AuditReport {
            checked: 0,
            violations: Vec::new(),
        },
    };
    for i in 0..mesh.len().saturating_sub(1) {
        let (l, r) = (mesh.point(i), mesh.point(i + 1));
        let (xl, xr) = (mesh.values[i], mesh.values[i + 1]);
        au.check(Inequality::Ahead, vec![l], vec![r], (xl, xr), xl, xr - a);
        au.check(Inequality::Behind, vec![r], vec![l], (xr, xl), xr, xl - a - a);
        au.check(Inequality::Step, vec![l], vec![r], (xl, xr), a, (xr - xl).abs());
    }
    au.report
}

/// Checks every adjacent pair of a 2-D mesh against the inequalities that
/// apply at its position relative to the diagonal.
pub fn lipschitz_audit_2d(mesh: &Mesh2D) -> AuditReport {
    let a = mesh.step;
    let n = mesh.n;
    let mut au = Auditor {
        report: AuditReport {
            checked: 0,
            violations: Vec::new(),
        },
    };
    for i in 0..n {
        for j in 0..n {
            let here = vec![mesh.point(i), mesh.point(j)];
            let x = mesh.at(i, j);
            let step = |ineq, ni: usize, nj: usize, au: &mut Auditor| {
                let y = mesh.at(ni, nj);
                au.check(ineq, here.clone(), vec![mesh.point(ni), mesh.point(nj)], (x, y), x, y - a);
            };
            if i + 1 < n && i >= j {
                step(Inequality::FirstAxis, i + 1, j, &mut au);
            }
            if i + 1 < n && j + 1 < n {
                step(Inequality::Diagonal, i + 1, j + 1, &mut au);
            }
            if j + 1 < n && j >= i {
                step(Inequality::SecondAxis, i, j + 1, &mut au);
            }
        }
    }
    au.report
}
