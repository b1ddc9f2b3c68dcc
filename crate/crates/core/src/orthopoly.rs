//! Orthogonal polynomials as a ladder: the minors of a Jacobi matrix have
//! the monic orthogonal polynomials as characteristic polynomials, so the
//! ladder of the Jacobi chain is the table of their zeros.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{GzError, Result};
use crate::hessenberg::HessenbergForm;
use crate::ladder::extract_ladder;
use crate::numerics::{canonical_sort, polyroots, ComplexMatrix, MonicPoly, DEFAULT_ROOT_TOL};

pub const MAX_DEMO_N: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    /// `dx / sqrt(1 - x^2)` on `[-1, 1]`; Chebyshev polynomials of the first kind.
    Chebyshev1,
    /// Uniform weight on `[-1, 1]`; Legendre polynomials.
    LegendreLike,
}

impl std::str::FromStr for Measure {
    type Err = GzError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chebyshev1" => Ok(Self::Chebyshev1),
            "legendre-like" | "legendre" => Ok(Self::LegendreLike),
            other => Err(GzError::InvalidInput(format!("unknown measure {other:?}"))),
        }
    }
}

impl Measure {
    /// Monic recurrence `p_{k+1} = (x - alpha_k) p_k - beta_k p_{k-1}`;
    /// returns `(alpha_k, beta_k)` for `k = 0, 1, ...` (`beta_0` unused).
    pub fn recurrence(self, k: usize) -> (f64, f64) {
        match self {
            Self::Chebyshev1 => (0.0, if k == 1 { 0.5 } else { 0.25 }),
            Self::LegendreLike => {
                let k = k as f64;
                (0.0, k * k / (4.0 * k * k - 1.0))
            }
        }
    }

    /// Monic orthogonal polynomial of degree `m` from the recurrence.
    pub fn monic_poly(self, m: usize) -> MonicPoly {
        // Ascending coefficients.
        let mut prev: Vec<f64> = vec![];
        let mut cur: Vec<f64> = vec![1.0];
        for k in 0..m {
            let (alpha, beta) = self.recurrence(k);
            let mut next = vec![0.0; cur.len() + 1];
            for (i, &c) in cur.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= alpha * c;
            }
            for (i, &c) in prev.iter().enumerate() {
                next[i] -= beta * c;
            }
            prev = cur;
            cur = next;
        }
        let desc: Vec<f64> = cur.into_iter().rev().collect();
        MonicPoly::from_real(&desc).expect("recurrence keeps polynomials monic")
    }

    /// Reference zeros of the degree-`m` polynomial in canonical order:
    /// closed form for Chebyshev, root finding on the recurrence
    /// polynomial otherwise.
    pub fn reference_zeros(self, m: usize) -> Result<Vec<Complex64>> {
        let mut zeros = match self {
            Self::Chebyshev1 => (1..=m)
                .map(|k| Complex64::new(((2 * k - 1) as f64 * PI / (2 * m) as f64).cos(), 0.0))
                .collect(),
            Self::LegendreLike => polyroots(&self.monic_poly(m), DEFAULT_ROOT_TOL)?,
        };
        canonical_sort(&mut zeros);
        Ok(zeros)
    }
}

/// Symmetric tridiagonal Jacobi matrix with diagonal `alpha_k` and
/// off-diagonal `sqrt(beta_k)`.
pub fn jacobi_matrix(measure: Measure, n: usize) -> ComplexMatrix {
    let mut j = ComplexMatrix::zeros(n);
    for k in 0..n {
        j[(k, k)] = Complex64::new(measure.recurrence(k).0, 0.0);
        if k + 1 < n {
            let off = Complex64::new(measure.recurrence(k + 1).1.sqrt(), 0.0);
            j[(k, k + 1)] = off;
            j[(k + 1, k)] = off;
        }
    }
    j
}

/// Conjugates a tridiagonal matrix with nonzero subdiagonal by a diagonal
/// matrix so that the subdiagonal becomes exactly 1.
pub fn to_unit_subdiagonal(t: &ComplexMatrix) -> Result<HessenbergForm> {
    let n = t.n();
    let mut scale = vec![Complex64::new(1.0, 0.0); n];
    for k in 0..n.saturating_sub(1) {
        let sub = t[(k + 1, k)];
        if sub.norm() == 0.0 {
            return Err(GzError::InvalidInput("subdiagonal must be nonzero".into()));
        }
        scale[k + 1] = scale[k] / sub;
    }
    let mut h = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] = if i == j + 1 {
                Complex64::new(1.0, 0.0)
            } else {
                scale[i] * t[(i, j)] / scale[j]
            };
        }
    }
    HessenbergForm::new(h)
}

#[derive(Clone, Debug, Serialize)]
pub struct DemoReport {
    pub measure: Measure,
    pub n: usize,
    /// The unit-subdiagonal form of the Jacobi matrix.
    pub matrix: ComplexMatrix,
    /// `max_k |ladder level m - reference zero k|` for `m = 1..=n`.
    pub level_residuals: Vec<f64>,
    pub max_residual: f64,
}

/// Builds the Jacobi chain for `measure`, extracts its ladder and compares
/// each level with the zeros of the matching orthogonal polynomial.
pub fn demo(measure: Measure, n: usize) -> Result<DemoReport> {
    if n == 0 || n > MAX_DEMO_N {
        return Err(GzError::DimensionMismatch(format!(
            "demo supports 1 <= n <= {MAX_DEMO_N}"
        )));
    }
    let h = to_unit_subdiagonal(&jacobi_matrix(measure, n))?.into_matrix();
    let z = extract_ladder(&h, DEFAULT_ROOT_TOL)?;
    let level_residuals = (1..=n)
        .map(|m| {
            let want = measure.reference_zeros(m)?;
            Ok(z.ladder()
                .level(m)
                .iter()
                .zip(&want)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    let max_residual = level_residuals.iter().copied().fold(0.0, f64::max);
    Ok(DemoReport {
        measure,
        n,
        matrix: h,
        level_residuals,
        max_residual,
    })
}
