//! Batch verification of the commutation relations on random generic
//! points.
//!
//! All residuals are normalized so that a single tolerance applies:
//!
//! * `r_r`: `|{r_i, r_j}| / (1 + max|x|)`
//! * `r_s`: `|{r_i, s_j} - delta_ij s_j| / (1 + |s_j|)`
//! * `s_s`: `|{s_i, s_j}| / (1 + |s_i s_j|)`
//! * `rparen_s`: `|{r_i / s_i, s_j} - delta_ij|`
//! * `casimir`: `|{r_top, c}|` over every chart coordinate `c`
//! * `order_independence`: entrywise gap between two orderings of the
//!   torus flows, over `1 + max|entry|`
//! * `roundtrip`: chart then unchart and unchart then chart, relative

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::chart::{chart_covered, s_tracked, unchart_covered, ChartPoint};
use crate::error::{GzError, Result};
use crate::flows::{torus_apply, torus_apply_ordered, TorusElement};
use crate::ladder::{d, CoveredPoint, Ladder};
use crate::numerics::ComplexMatrix;
use crate::poisson::{
    bracket_of_gradients, default_step, grad_contour_many, grad_fd_many, grad_r, CONTOUR_NODES,
};
use crate::sampling::{generic_point, random_order, random_torus, rng};

/// Tolerance used for every chart evaluation inside the verifier.
pub const VERIFY_CHART_TOL: f64 = 1e-8;

/// Relation names in report order.
pub const RELATIONS: [&str; 7] = [
    "r_r",
    "r_s",
    "s_s",
    "rparen_s",
    "casimir",
    "order_independence",
    "roundtrip",
];

/// Largest normalized bracket residuals at one point.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BracketResiduals {
    pub r_r: f64,
    pub r_s: f64,
    pub s_s: f64,
    pub rparen_s: f64,
    pub casimir: f64,
}

/// Gradients of every chart coordinate at a point: analytic projectors for
/// `r`, contour differences on the tracked sheet for `s`.
pub struct ChartGradients {
    pub r: Vec<ComplexMatrix>,
    pub s: Vec<ComplexMatrix>,
    pub s_values: Vec<Complex64>,
}

impl ChartGradients {
    pub fn at(z: &CoveredPoint, tol: f64) -> Result<Self> {
        let n = z.n();
        let r = (1..=d(n))
            .map(|i| grad_r(z, i))
            .collect::<Result<Vec<_>>>()?;
        let s_values = s_tracked(z.x(), z.ladder(), tol)?;
        let ladder = z.ladder().clone();
        let s = if d(n - 1) == 0 {
            Vec::new()
        } else {
            s_gradients(z.x(), &ladder, tol)?
        };
        Ok(Self { r, s, s_values })
    }

    /// Gradient of `r_i / s_i` by the quotient rule.
    pub fn r_over_s(&self, z: &CoveredPoint, i: usize) -> ComplexMatrix {
        let ri = z.ladder().flat()[i - 1];
        let si = self.s_values[i - 1];
        &self.r[i - 1].scale(si.inv()) - &self.s[i - 1].scale(ri / (si * si))
    }
}

/// Gradients of `s` on the sheet of `ladder`. The contour radius starts
/// well inside the gap and is halved whenever a probe leaves the sheet;
/// plain central differences are the last resort.
fn s_gradients(x: &ComplexMatrix, ladder: &Ladder, tol: f64) -> Result<Vec<ComplexMatrix>> {
    let f = |y: &ComplexMatrix| s_tracked(y, ladder, tol);
    let mut radius = (1e-3 * (1.0 + x.max_norm())).min(0.05 * ladder.min_gap());
    for _ in 0..4 {
        match grad_contour_many(f, x, radius, CONTOUR_NODES) {
            Err(GzError::BranchMismatch { .. }) => radius /= 2.0,
            other => return other,
        }
    }
    grad_fd_many(f, x, default_step(x))
}

/// Evaluates every bracket relation at `z`.
pub fn bracket_residuals(z: &CoveredPoint, tol: f64) -> Result<BracketResiduals> {
    let n = z.n();
    let x = z.x();
    let g = ChartGradients::at(z, tol)?;
    let xs = 1.0 + x.max_norm();
    let mut out = BracketResiduals::default();

    for i in 0..d(n) {
        for j in 0..d(n) {
            let b = bracket_of_gradients(x, &g.r[i], &g.r[j])?;
            out.r_r = out.r_r.max(b.norm() / xs);
        }
        for (j, sj) in g.s_values.iter().enumerate() {
            let b = bracket_of_gradients(x, &g.r[i], &g.s[j])?;
            let want = if i == j {
                *sj
            } else {
                Complex64::new(0.0, 0.0)
            };
            out.r_s = out.r_s.max((b - want).norm() / (1.0 + sj.norm()));
        }
    }
    for (i, si) in g.s_values.iter().enumerate() {
        for (j, sj) in g.s_values.iter().enumerate() {
            let b = bracket_of_gradients(x, &g.s[i], &g.s[j])?;
            out.s_s = out.s_s.max(b.norm() / (1.0 + (si * sj).norm()));
        }
        let rp = g.r_over_s(z, i + 1);
        for j in 0..g.s_values.len() {
            let b = bracket_of_gradients(x, &rp, &g.s[j])?;
            let want = if i == j { 1.0 } else { 0.0 };
            out.rparen_s = out.rparen_s.max((b - want).norm());
        }
    }
    for top in d(n - 1)..d(n) {
        for other in g.r.iter().chain(&g.s) {
            let b = bracket_of_gradients(x, &g.r[top], other)?;
            out.casimir = out.casimir.max(b.norm());
        }
    }
    Ok(out)
}

/// Entrywise disagreement between applying `b` in ascending order and in
/// `order`, relative to the result's size.
pub fn order_independence(b: &TorusElement, z: &CoveredPoint, order: &[usize]) -> Result<f64> {
    let a = torus_apply(b, z)?;
    let c = torus_apply_ordered(b, z, order)?;
    Ok(a.x().max_abs_diff(c.x()) / (1.0 + a.x().max_norm()))
}

/// Relative error of `unchart . chart` at `z` and of `chart . unchart` at
/// the chart point of `b . z`.
pub fn roundtrip(z: &CoveredPoint, b: &TorusElement, tol: f64) -> Result<f64> {
    let p = chart_covered(z, tol)?;
    let back = unchart_covered(&p, tol)?;
    let forward = back.x().max_abs_diff(z.x()) / (1.0 + z.x().max_norm());

    let moved = ChartPoint::new(
        p.n(),
        p.r().to_vec(),
        p.s()
            .iter()
            .zip(b.zeta())
            .map(|(s, zeta)| s * zeta)
            .collect(),
    )?;
    let again = chart_covered(&unchart_covered(&moved, tol)?, tol)?;
    let backward = again
        .r()
        .iter()
        .zip(moved.r())
        .chain(again.s().iter().zip(moved.s()))
        .map(|(a, b)| (a - b).norm() / (1.0 + b.norm()))
        .fold(0.0, f64::max);
    Ok(forward.max(backward))
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub n: usize,
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    pub residuals: BTreeMap<String, f64>,
    pub pass: BTreeMap<String, bool>,
    pub all_pass: bool,
}

/// Draws `samples` generic points of `M(n)` and records the largest
/// residual of every relation in [`RELATIONS`].
pub fn run_verification(
    n: usize,
    seed: u64,
    samples: usize,
    tol: f64,
) -> Result<VerificationReport> {
    if !(2..=8).contains(&n) {
        return Err(GzError::DimensionMismatch(format!(
            "verification supports 2 <= n <= 8, got {n}"
        )));
    }
    let mut g = rng(seed);
    let mut worst: BTreeMap<String, f64> = RELATIONS.iter().map(|r| (r.to_string(), 0.0)).collect();
    let mut record = |name: &str, value: f64| {
        let slot = worst.get_mut(name).expect("known relation");
        // NaN must register as a failure.
        if !(value <= *slot) {
            *slot = value;
        }
    };
    for _ in 0..samples {
        let z = generic_point(&mut g, n, 0.0)?;
        let br = bracket_residuals(&z, VERIFY_CHART_TOL)?;
        record("r_r", br.r_r);
        record("r_s", br.r_s);
        record("s_s", br.s_s);
        record("rparen_s", br.rparen_s);
        record("casimir", br.casimir);

        let b = random_torus(&mut g, n, 1.0);
        let order = random_order(&mut g, d(n - 1));
        record("order_independence", order_independence(&b, &z, &order)?);
        record("roundtrip", roundtrip(&z, &b, VERIFY_CHART_TOL)?);
    }
    let pass: BTreeMap<String, bool> = worst.iter().map(|(k, &v)| (k.clone(), v <= tol)).collect();
    let all_pass = pass.values().all(|&p| p);
    Ok(VerificationReport {
        n,
        seed,
        samples,
        tol,
        residuals: worst,
        pass,
        all_pass,
    })
}
