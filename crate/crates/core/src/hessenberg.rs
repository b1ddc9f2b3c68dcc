//! The unit-subdiagonal Hessenberg section and the inverse eigenvalue
//! problem on it: given a ladder, build the unique Hessenberg matrix whose
//! leading minors have exactly those spectra.

use num_complex::Complex64;

use crate::error::{GzError, Result};
use crate::ladder::{ladder_to_charpolys, Ladder};
use crate::numerics::ComplexMatrix;

/// Intermediate coefficients larger than this multiple of the input scale
/// are reported as `NumericalInstability`.
const GROWTH_LIMIT: f64 = 1e12;

/// A matrix with ones on the subdiagonal and zeros below it.
#[derive(Clone, Debug, PartialEq)]
pub struct HessenbergForm(ComplexMatrix);

impl HessenbergForm {
    pub fn new(x: ComplexMatrix) -> Result<Self> {
        if is_hessenberg(&x) {
            Ok(Self(x))
        } else {
            Err(GzError::InvalidInput(
                "matrix is not unit-subdiagonal Hessenberg".into(),
            ))
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }
}

/// Exact pattern test: `x[i+1][i] == 1` and `x[i][j] == 0` for `i > j + 1`.
pub fn is_hessenberg(x: &ComplexMatrix) -> bool {
    let n = x.n();
    (0..n).all(|i| {
        (0..n).all(|j| {
            if i == j + 1 {
                x[(i, j)] == Complex64::new(1.0, 0.0)
            } else if i > j + 1 {
                x[(i, j)] == Complex64::new(0.0, 0.0)
            } else {
                true
            }
        })
    })
}

/// Builds the Hessenberg matrix whose `m`-th leading minor has the level-`m`
/// entries of `ladder` as its spectrum.
///
/// Column `m` is read off from `lambda P_{m-1} - P_m` expanded in the basis
/// `P_0, ..., P_{m-1}` of lower target polynomials, which is the
/// last-column cofactor expansion of `det(lambda I - y_m)` run backwards.
/// The ladder need not be generic; repeated values are fine.
pub fn reconstruct(ladder: &Ladder, _tol: f64) -> Result<HessenbergForm> {
    let n = ladder.n();
    // Ascending coefficient vectors; index 0 is P_0 = 1.
    let mut basis: Vec<Vec<Complex64>> = vec![vec![Complex64::new(1.0, 0.0)]];
    for p in ladder_to_charpolys(ladder) {
        basis.push(p.coeffs().iter().rev().copied().collect());
    }
    let scale = 1.0 + basis.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
    if !scale.is_finite() {
        return Err(GzError::NumericalInstability(
            "target coefficients overflow".into(),
        ));
    }
    let limit = GROWTH_LIMIT * scale;

    let mut y = ComplexMatrix::zeros(n);
    for m in 1..=n {
        if m < n {
            y[(m, m - 1)] = Complex64::new(1.0, 0.0);
        }
        // q = lambda * P_{m-1} - P_m, degree at most m - 1.
        let mut q = vec![Complex64::new(0.0, 0.0); m + 1];
        for (deg, &c) in basis[m - 1].iter().enumerate() {
            q[deg + 1] += c;
        }
        for (deg, &c) in basis[m].iter().enumerate() {
            q[deg] -= c;
        }
        for deg in (0..m).rev() {
            let coeff = q[deg];
            if !(coeff.norm() <= limit) {
                return Err(GzError::NumericalInstability(format!(
                    "column {m} coefficient {coeff} exceeds {limit:e}"
                )));
            }
            for (t, &b) in basis[deg].iter().enumerate() {
                q[t] -= coeff * b;
            }
            y[(deg, m - 1)] = coeff;
        }
    }
    Ok(HessenbergForm(y))
}
