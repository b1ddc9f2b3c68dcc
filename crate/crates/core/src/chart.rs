//! The `(r, s)` coordinate chart on the generic stratum.
//!
//! Every generic point `x` with ladder `nu` is `b . y` for a unique torus
//! element `b`, where `y` is the Hessenberg matrix reconstructed from `nu`.
//! The dual coordinates are `s_j(x) = zeta_j(b)`, so `s = 1` on the
//! Hessenberg section and `s_j(b . x) = zeta_j(b) s_j(x)`.
//!
//! `s` is computed level by level. Flows below level `n - 1` act on the
//! minor `x_{n-1}` exactly as the flows of `M(n-1)` do, while level
//! `n - 1` flows fix `x_{n-1}`; so the lower coordinates come from the
//! minor, and the top ones are read off the last column, on which the
//! level `n - 1` conjugation acts by `sum_l zeta_l^{-1} eps_l`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GzError, Result};
use crate::flows::{
    apply_raw, spectral_projector, torus_apply, TorusElement, DEFAULT_PROJECTOR_TOL,
};
use crate::hessenberg::reconstruct;
use crate::ladder::{
    d, extract_ladder, in_e_omega, track_branches, CoveredPoint, Ladder, DEFAULT_GAP_TOL,
};
use crate::numerics::{principal_minor, ComplexMatrix, DEFAULT_ROOT_TOL};
use crate::poisson::MatrixFunction;

/// Default tolerance for chart consistency checks.
pub const DEFAULT_CHART_TOL: f64 = 1e-8;

/// Full coordinate tuple `(r_1, ..., r_{d(n)}, s_1, ..., s_{d(n-1)})`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChartPointRepr", into = "ChartPointRepr")]
pub struct ChartPoint {
    n: usize,
    r: Vec<Complex64>,
    s: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct ChartPointRepr {
    n: usize,
    r: Vec<[f64; 2]>,
    s: Vec<[f64; 2]>,
}

impl TryFrom<ChartPointRepr> for ChartPoint {
    type Error = GzError;

    fn try_from(repr: ChartPointRepr) -> Result<Self> {
        let conv = |v: Vec<[f64; 2]>| {
            v.into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect()
        };
        ChartPoint::new(repr.n, conv(repr.r), conv(repr.s))
    }
}

impl From<ChartPoint> for ChartPointRepr {
    fn from(p: ChartPoint) -> Self {
        let conv = |v: Vec<Complex64>| v.into_iter().map(|z| [z.re, z.im]).collect();
        ChartPointRepr {
            n: p.n,
            r: conv(p.r),
            s: conv(p.s),
        }
    }
}

impl ChartPoint {
    /// Validates sizes, nonvanishing of `s` and genericity of the ladder
    /// assembled from `r`.
    pub fn new(n: usize, r: Vec<Complex64>, s: Vec<Complex64>) -> Result<Self> {
        if n == 0 || r.len() != d(n) || s.len() != d(n - 1) {
            return Err(GzError::DimensionMismatch(format!(
                "chart point for n = {n} needs {} r values and {} s values, got {} and {}",
                d(n),
                d(n.saturating_sub(1)),
                r.len(),
                s.len()
            )));
        }
        if s.iter().any(|z| z.norm() == 0.0 || !z.is_finite()) {
            return Err(GzError::InvalidInput(
                "s coordinates must be finite and nonzero".into(),
            ));
        }
        let ladder = Ladder::from_flat(&r)?;
        if !in_e_omega(&ladder, DEFAULT_GAP_TOL) {
            return Err(GzError::NotInOmega(
                "r values do not form a generic ladder".into(),
            ));
        }
        Ok(Self { n, r, s })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> &[Complex64] {
        &self.r
    }

    pub fn s(&self) -> &[Complex64] {
        &self.s
    }

    pub fn ladder(&self) -> Ladder {
        Ladder::from_flat(&self.r).expect("validated on construction")
    }

    /// Largest coordinatewise difference from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.r
            .iter()
            .zip(&other.r)
            .chain(self.s.iter().zip(&other.s))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// The dual coordinates `s_1, ..., s_{d(n-1)}` of `z`: the torus element
/// carrying the Hessenberg point with the same ladder onto `z`.
pub fn compute_s(z: &CoveredPoint, tol: f64) -> Result<Vec<Complex64>> {
    let n = z.n();
    if n == 1 {
        return Ok(Vec::new());
    }
    let mut s = compute_s(&z.restrict(n - 1)?, tol)?;

    let x = z.x();
    let ladder = z.ladder();
    let y = reconstruct(ladder, tol)?.into_matrix();
    let lower_order: Vec<usize> = (1..=d(n - 2)).collect();
    let partial = apply_raw(&s, &y, ladder, &lower_order)?;

    let scale = 1.0 + x.max_norm().max(partial.max_norm());
    let minor_drift = principal_minor(&partial, n - 1)?.max_abs_diff(&principal_minor(x, n - 1)?);
    if !(minor_drift <= tol * scale) {
        return Err(GzError::BranchMismatch {
            level: n - 1,
            distance: minor_drift,
            threshold: tol * scale,
        });
    }

    let xm = principal_minor(x, n - 1)?;
    let level = ladder.level(n - 1);
    let col = |m: &ComplexMatrix| (0..n - 1).map(|i| m[(i, n - 1)]).collect::<Vec<_>>();
    let (w, w_sec) = (col(x), col(&partial));
    for &nu in level {
        let eps = spectral_projector(&xm, nu, level, DEFAULT_PROJECTOR_TOL)?;
        let a = mat_vec(&eps, &w);
        let a_sec = mat_vec(&eps, &w_sec);
        let p = (0..n - 1)
            .max_by(|&i, &j| a_sec[i].norm().total_cmp(&a_sec[j].norm()))
            .expect("n >= 2");
        if !(a_sec[p].norm() > tol * scale) {
            return Err(GzError::NonGenericPoint(format!(
                "last-column component for eigenvalue {nu} vanishes"
            )));
        }
        if !(a[p].norm() > tol * scale) {
            return Err(GzError::NonGenericPoint(format!(
                "last-column component for eigenvalue {nu} vanishes at the input"
            )));
        }
        // x = G partial G^{-1} with G = sum_l zeta_l^{-1} eps_l on the minor.
        s.push(a_sec[p] / a[p]);
    }

    let order: Vec<usize> = (1..=d(n - 1)).collect();
    let rebuilt = apply_raw(&s, &y, ladder, &order)?;
    let drift = rebuilt.max_abs_diff(x);
    let scale = scale.max(1.0 + rebuilt.max_norm());
    if !(drift <= tol * scale) {
        return Err(GzError::BranchMismatch {
            level: n,
            distance: drift,
            threshold: tol * scale,
        });
    }
    Ok(s)
}

fn mat_vec(m: &ComplexMatrix, v: &[Complex64]) -> Vec<Complex64> {
    (0..m.n())
        .map(|i| (0..m.n()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

/// Chart coordinates of a point on an arbitrary sheet.
pub fn chart_covered(z: &CoveredPoint, tol: f64) -> Result<ChartPoint> {
    if !in_e_omega(z.ladder(), tol) {
        return Err(GzError::NotInOmega(
            "ladder fails the generic gap test".into(),
        ));
    }
    let s = compute_s(z, tol)?;
    ChartPoint::new(z.n(), z.ladder().flat(), s)
}

/// Chart coordinates of `x` on the canonical sheet.
pub fn chart(x: &ComplexMatrix, tol: f64) -> Result<ChartPoint> {
    chart_covered(&extract_ladder(x, DEFAULT_ROOT_TOL)?, tol)
}

/// Inverse of the chart: the Hessenberg point of the ladder moved by the
/// torus element with coordinates `s`.
pub fn unchart_covered(p: &ChartPoint, tol: f64) -> Result<CoveredPoint> {
    let ladder = p.ladder();
    if !in_e_omega(&ladder, tol) {
        return Err(GzError::NotInOmega(
            "r values do not form a generic ladder".into(),
        ));
    }
    let y = reconstruct(&ladder, tol)?.into_matrix();
    let b = TorusElement::new(p.n, p.s.clone())?;
    torus_apply(&b, &CoveredPoint::new_unchecked(y, ladder))
}

pub fn unchart(p: &ChartPoint, tol: f64) -> Result<ComplexMatrix> {
    Ok(unchart_covered(p, tol)?.into_parts().0)
}

/// `r_i / s_i`, the momentum conjugate to `s_i`.
pub fn r_over_s(p: &ChartPoint, i: usize) -> Result<Complex64> {
    if i == 0 || i > p.s.len() {
        return Err(GzError::DimensionMismatch(format!(
            "index {i} out of range 1..={}",
            p.s.len()
        )));
    }
    Ok(p.r[i - 1] / p.s[i - 1])
}

/// All `s` coordinates of a matrix near the point whose ladder is
/// `reference`, with branches tracked to that sheet.
pub fn s_tracked(x: &ComplexMatrix, reference: &Ladder, tol: f64) -> Result<Vec<Complex64>> {
    let ladder = track_branches(x, reference)?;
    compute_s(&CoveredPoint::new_unchecked(x.clone(), ladder), tol)
}

/// `s_j` as a differentiable function on the sheet of `reference`.
/// Gradients come from finite differences.
pub fn s_function(reference: Ladder, j: usize, tol: f64) -> Result<MatrixFunction> {
    check_s_index(j, reference.n())?;
    let reference = Arc::new(reference);
    Ok(MatrixFunction::new(move |x| {
        Ok(s_tracked(x, &reference, tol)?[j - 1])
    }))
}

/// `r_i / s_i` as a differentiable function on the sheet of `reference`.
pub fn r_over_s_function(reference: Ladder, i: usize, tol: f64) -> Result<MatrixFunction> {
    check_s_index(i, reference.n())?;
    let reference = Arc::new(reference);
    Ok(MatrixFunction::new(move |x| {
        let ladder = track_branches(x, &reference)?;
        let r = ladder.flat()[i - 1];
        let s = compute_s(&CoveredPoint::new_unchecked(x.clone(), ladder), tol)?;
        Ok(r / s[i - 1])
    }))
}

fn check_s_index(j: usize, n: usize) -> Result<()> {
    if j == 0 || j > d(n - 1) {
        return Err(GzError::DimensionMismatch(format!(
            "s index {j} out of range 1..={}",
            d(n - 1)
        )));
    }
    Ok(())
}
