//! Exact integration of the eigenvalue flows.
//!
//! The Hamiltonian field of `r_j` (level `m`, branch `l`) integrates to
//! conjugation by `gamma(c) = I + (c - 1) eps`, where `eps` is the spectral
//! projector of the minor `x_m` onto its `l`-th eigenvalue, padded to
//! `n x n`. Since `eps` is idempotent, `gamma(c)^{-1} = gamma(1 / c)`, and
//! since `eps` is a polynomial in `x_m`, the flow fixes `x_m` and every
//! minor spectrum.
//!
//! A torus element with coordinates `zeta_j` acts as the time-`q_j` flows
//! with `zeta_j = exp(q_j)`, i.e. through the conjugators `gamma(1 / zeta_j)`.

use num_complex::Complex64;

use crate::error::{GzError, Result};
use crate::ladder::{d, split_index, tracked_ladder, CoveredPoint, Ladder, MATCH_TOL};
use crate::numerics::{principal_minor, ComplexMatrix, DEFAULT_ROOT_TOL};

/// Default gap tolerance for projector construction.
pub const DEFAULT_PROJECTOR_TOL: f64 = 1e-10;

/// An element of `(C^x)^{d(n-1)}`, coordinates `zeta_1, ..., zeta_{d(n-1)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusElement {
    n: usize,
    zeta: Vec<Complex64>,
}

impl TorusElement {
    pub fn new(n: usize, zeta: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(GzError::DimensionMismatch(
                "dimension must be at least 1".into(),
            ));
        }
        if zeta.len() != d(n - 1) {
            return Err(GzError::DimensionMismatch(format!(
                "torus of M({n}) has {} coordinates, got {}",
                d(n - 1),
                zeta.len()
            )));
        }
        if let Some(j) = zeta
            .iter()
            .position(|z| *z == Complex64::new(0.0, 0.0) || !z.is_finite())
        {
            return Err(GzError::InvalidInput(format!(
                "torus coordinate {} must be finite and nonzero",
                j + 1
            )));
        }
        Ok(Self { n, zeta })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            zeta: vec![Complex64::new(1.0, 0.0); d(n.saturating_sub(1))],
        }
    }

    /// The element `exp(q_1 xi_1) ... exp(q_k xi_k)`, i.e. `zeta_j = exp(q_j)`.
    pub fn from_times(n: usize, q: &[Complex64]) -> Result<Self> {
        Self::new(n, q.iter().map(|q| q.exp()).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn zeta(&self) -> &[Complex64] {
        &self.zeta
    }

    /// Componentwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(GzError::DimensionMismatch(
                "torus elements differ in dimension".into(),
            ));
        }
        Ok(Self {
            n: self.n,
            zeta: self
                .zeta
                .iter()
                .zip(&other.zeta)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn inverse(&self) -> Self {
        Self {
            n: self.n,
            zeta: self.zeta.iter().map(|z| z.inv()).collect(),
        }
    }

    /// `prod zeta_j^{alpha_j}`.
    pub fn monomial(&self, alpha: &[i32]) -> Complex64 {
        self.zeta
            .iter()
            .zip(alpha)
            .map(|(z, &a)| z.powi(a))
            .product()
    }
}

/// Lagrange-form spectral projector of `xm` onto `eigenvalue`:
/// `prod_{mu != nu} (xm - mu I) / (nu - mu)` over the other entries of
/// `spectrum`.
pub fn spectral_projector(
    xm: &ComplexMatrix,
    eigenvalue: Complex64,
    spectrum: &[Complex64],
    tol: f64,
) -> Result<ComplexMatrix> {
    if spectrum.len() != xm.n() {
        return Err(GzError::DimensionMismatch(format!(
            "spectrum has {} entries for a {}x{} matrix",
            spectrum.len(),
            xm.n(),
            xm.n()
        )));
    }
    for (a, za) in spectrum.iter().enumerate() {
        for zb in &spectrum[a + 1..] {
            let gap = (za - zb).norm();
            if gap <= tol {
                return Err(GzError::DegenerateSpectrum { gap, tol });
            }
        }
    }
    let k = spectrum
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            (*a - eigenvalue)
                .norm()
                .total_cmp(&(*b - eigenvalue).norm())
        })
        .map(|(k, _)| k)
        .expect("spectrum is nonempty");
    let nearest_other = spectrum
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != k)
        .map(|(_, z)| (z - spectrum[k]).norm())
        .fold(f64::INFINITY, f64::min);
    if !((spectrum[k] - eigenvalue).norm() < 0.5 * nearest_other) {
        return Err(GzError::InvalidInput(format!(
            "{eigenvalue} is not an entry of the spectrum"
        )));
    }
    Ok(lagrange_projector(xm, spectrum, k))
}

fn lagrange_projector(xm: &ComplexMatrix, spectrum: &[Complex64], k: usize) -> ComplexMatrix {
    let nu = spectrum[k];
    let mut eps = ComplexMatrix::identity(xm.n());
    for (j, &mu) in spectrum.iter().enumerate() {
        if j != k {
            let factor = xm.shift(-mu).scale((nu - mu).inv());
            eps = &eps * &factor;
        }
    }
    eps
}

/// Projector of the level-`m` minor of `x` onto branch `l` (1-based) of
/// `ladder`, padded with zeros to the size of `x`.
pub(crate) fn padded_projector(
    x: &ComplexMatrix,
    ladder: &Ladder,
    m: usize,
    l: usize,
    tol: f64,
) -> Result<ComplexMatrix> {
    let level = ladder.level(m);
    let xm = principal_minor(x, m)?;
    spectral_projector(&xm, level[l - 1], level, tol)?.pad(x.n())
}

/// `gamma(c) x gamma(c)^{-1}` with `gamma(c) = I + (c - 1) eps` and `eps` the
/// (unpadded) level-`m` projector.
///
/// Writing `x = [[A, B], [C, D]]` with `A = x_m`, the factor
/// `g = I_m + (c - 1) eps` commutes with `A`, so the conjugate is
/// `[[A, g B], [C g^{-1}, D]]`. Only the off-diagonal blocks are touched,
/// which keeps `x_m` (and every smaller minor) bit-for-bit fixed.
fn conjugate_by_projector(x: &ComplexMatrix, eps: &ComplexMatrix, c: Complex64) -> ComplexMatrix {
    let n = x.n();
    let m = eps.n();
    let one = Complex64::new(1.0, 0.0);
    let (up, down) = (c - one, c.inv() - one);
    let mut out = x.clone();
    // g B = B + (c - 1) eps B
    for col in m..n {
        for i in 0..m {
            let v: Complex64 = (0..m).map(|k| eps[(i, k)] * x[(k, col)]).sum();
            out[(i, col)] += up * v;
        }
    }
    // C g^{-1} = C + (1/c - 1) C eps
    for row in m..n {
        for j in 0..m {
            let v: Complex64 = (0..m).map(|k| x[(row, k)] * eps[(k, j)]).sum();
            out[(row, j)] += down * v;
        }
    }
    out
}

/// Conjugates by the level projector for flat index `j` without any
/// ladder re-check.
pub(crate) fn flow_step(
    x: &ComplexMatrix,
    ladder: &Ladder,
    j: usize,
    c: Complex64,
) -> Result<ComplexMatrix> {
    let (m, l) = split_index(j, ladder.n())?;
    let level = ladder.level(m);
    let eps = spectral_projector(
        &principal_minor(x, m)?,
        level[l - 1],
        level,
        DEFAULT_PROJECTOR_TOL,
    )?;
    Ok(conjugate_by_projector(x, &eps, c))
}

fn check_flat_index(j: usize, n: usize) -> Result<()> {
    if j == 0 || j > d(n - 1) {
        return Err(GzError::DimensionMismatch(format!(
            "flow index {j} out of range 1..={}; top-level fields vanish",
            d(n - 1)
        )));
    }
    Ok(())
}

fn verify_ladder(x: &ComplexMatrix, ladder: &Ladder) -> Result<()> {
    tracked_ladder(x, ladder, MATCH_TOL, DEFAULT_ROOT_TOL).map(|_| ())
}

/// The time-`q` flow of the Hamiltonian field of `r_j`, conjugating by
/// `gamma(exp(-q))`. The ladder is carried along unchanged and re-checked
/// against the flowed matrix.
pub fn one_param_flow(z: &CoveredPoint, j: usize, q: Complex64) -> Result<CoveredPoint> {
    check_flat_index(j, z.n())?;
    let x = flow_step(z.x(), z.ladder(), j, (-q).exp())?;
    verify_ladder(&x, z.ladder())?;
    Ok(CoveredPoint::new_unchecked(x, z.ladder().clone()))
}

/// Applies `b` as the composite of its one-parameter flows in ascending
/// index order, each step using the projectors of the current point.
pub fn torus_apply(b: &TorusElement, z: &CoveredPoint) -> Result<CoveredPoint> {
    let order: Vec<usize> = (1..=b.zeta.len()).collect();
    torus_apply_ordered(b, z, &order)
}

/// Like [`torus_apply`] but visiting the flat indices in `order`, which
/// must be a permutation of `1..=d(n-1)`.
pub fn torus_apply_ordered(
    b: &TorusElement,
    z: &CoveredPoint,
    order: &[usize],
) -> Result<CoveredPoint> {
    if b.n != z.n() {
        return Err(GzError::DimensionMismatch(format!(
            "torus element for M({}) applied to a point of M({})",
            b.n,
            z.n()
        )));
    }
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (1..=b.zeta.len()).collect::<Vec<_>>() {
        return Err(GzError::InvalidInput(
            "order must be a permutation of the torus indices".into(),
        ));
    }
    let x = apply_raw(&b.zeta, z.x(), z.ladder(), order)?;
    verify_ladder(&x, z.ladder())?;
    Ok(CoveredPoint::new_unchecked(x, z.ladder().clone()))
}

/// Torus action on a bare matrix with a known ladder, no final re-check.
/// `zeta` may be shorter than `d(n-1)`; missing coordinates are 1.
pub(crate) fn apply_raw(
    zeta: &[Complex64],
    x: &ComplexMatrix,
    ladder: &Ladder,
    order: &[usize],
) -> Result<ComplexMatrix> {
    let mut x = x.clone();
    for &j in order {
        let Some(&zj) = zeta.get(j - 1) else { continue };
        if zj != Complex64::new(1.0, 0.0) {
            x = flow_step(&x, ladder, j, zj.inv())?;
        }
    }
    Ok(x)
}
