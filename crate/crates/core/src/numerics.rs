//! Small dense complex linear algebra: matrices, monic polynomials,
//! characteristic polynomials and a simultaneous root finder.
//!
//! Everything here is sized for desk-scale problems (n up to about 12).
//! The characteristic polynomial comes from the Faddeev-LeVerrier
//! recursion and roots come from Aberth-Ehrlich iteration, so no general
//! nonsymmetric eigensolver is needed.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GzError, Result};

/// Default relative residual tolerance for [`polyroots`] and [`eigenvalues`].
pub const DEFAULT_ROOT_TOL: f64 = 1e-11;

/// Maximum number of Aberth sweeps before giving up.
pub const MAX_SWEEPS: usize = 200;

/// Real parts closer than this are treated as tied when ordering roots,
/// and the imaginary part decides.
pub const TIE_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense square complex matrix stored row-major.
///
/// JSON form: `{"n": n, "entries": [[[re, im], ...], ...]}`, row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    n: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<MatrixRepr> for ComplexMatrix {
    type Error = GzError;

    fn try_from(repr: MatrixRepr) -> Result<Self> {
        if repr.entries.len() != repr.n {
            return Err(GzError::DimensionMismatch(format!(
                "matrix declares n = {} but has {} rows",
                repr.n,
                repr.entries.len()
            )));
        }
        let rows: Vec<Vec<Complex64>> = repr
            .entries
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|[re, im]| Complex64::new(re, im))
                    .collect()
            })
            .collect();
        ComplexMatrix::from_rows(&rows)
    }
}

impl From<ComplexMatrix> for MatrixRepr {
    fn from(m: ComplexMatrix) -> Self {
        MatrixRepr {
            n: m.n,
            entries: m
                .data
                .chunks(m.n)
                .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

impl ComplexMatrix {
    /// Builds an `n x n` matrix from row-major entries.
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(GzError::DimensionMismatch(
                "matrix dimension must be at least 1".into(),
            ));
        }
        if data.len() != n * n {
            return Err(GzError::DimensionMismatch(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(GzError::InvalidInput(
                "matrix entries must be finite".into(),
            ));
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(GzError::DimensionMismatch(
                "rows must all have length n".into(),
            ));
        }
        Self::new(n, rows.iter().flatten().copied().collect())
    }

    /// Convenience constructor for real-valued matrices.
    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&v| Complex64::new(v, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// The matrix with a single 1 at `(i, j)` (zero-based).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n);
        m[(i, j)] = ONE;
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    /// `self + c * I`.
    pub fn shift(&self, c: Complex64) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m[(i, i)] += c;
        }
        m
    }

    /// `[self, other] = self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch in max_abs_diff");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Embeds `self` as the upper-left block of an `n x n` zero matrix.
    pub fn pad(&self, n: usize) -> Result<Self> {
        if n < self.n {
            return Err(GzError::DimensionMismatch(format!(
                "cannot pad a {}x{} matrix to {n}x{n}",
                self.n, self.n
            )));
        }
        let mut m = Self::zeros(n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = self[(i, j)];
            }
        }
        Ok(m)
    }

    /// `tr((lambda I - self)^{-1})` via LU with partial pivoting.
    /// Returns `None` when the shifted matrix is exactly singular.
    fn resolvent_trace(&self, lambda: Complex64) -> Option<Complex64> {
        let n = self.n;
        let mut a = self.scale(-ONE).shift(lambda).data;
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + k].norm().total_cmp(&a[j * n + k].norm()))
                .unwrap();
            if a[p * n + k] == ZERO {
                return None;
            }
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                a[i * n + k] = f;
                for c in k + 1..n {
                    let t = a[k * n + c];
                    a[i * n + c] -= f * t;
                }
            }
        }
        // Solve for each column of the inverse and accumulate its diagonal.
        let mut tr = ZERO;
        let mut col = vec![ZERO; n];
        for j in 0..n {
            for (i, v) in col.iter_mut().enumerate() {
                *v = if perm[i] == j { ONE } else { ZERO };
            }
            for i in 0..n {
                let mut s = col[i];
                for c in 0..i {
                    s -= a[i * n + c] * col[c];
                }
                col[i] = s;
            }
            for i in (0..n).rev() {
                let mut s = col[i];
                for c in i + 1..n {
                    s -= a[i * n + c] * col[c];
                }
                col[i] = s / a[i * n + i];
            }
            tr += col[j];
        }
        Some(tr)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in matrix product");
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in matrix sum");
        ComplexMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in matrix difference");
        ComplexMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.n, self.n)?;
        for row in self.data.chunks(self.n) {
            write!(f, "  ")?;
            for z in row {
                write!(f, "{:>12.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Monic polynomial with coefficients stored by descending power.
#[derive(Clone, Debug, PartialEq)]
pub struct MonicPoly {
    coeffs: Vec<Complex64>,
}

impl MonicPoly {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        match coeffs.first() {
            Some(&c) if c == ONE => Ok(Self { coeffs }),
            Some(_) => Err(GzError::InvalidInput(
                "leading coefficient must be exactly 1".into(),
            )),
            None => Err(GzError::InvalidInput(
                "a polynomial needs at least one coefficient".into(),
            )),
        }
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// The polynomial `prod (lambda - root)`.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = vec![ONE];
        for &root in roots {
            coeffs.push(ZERO);
            for k in (1..coeffs.len()).rev() {
                let prev = coeffs[k - 1];
                coeffs[k] -= root * prev;
            }
        }
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// Value and derivative at `z` by Horner's scheme.
    fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for &c in &self.coeffs {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Running error bound for Horner evaluation at `z`.
    fn rounding_bound(&self, z: Complex64) -> f64 {
        let r = z.norm();
        let s = self.coeffs.iter().fold(0.0, |acc, c| acc * r + c.norm());
        4.0 * (self.degree() as f64 + 1.0) * f64::EPSILON * s
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference between two coefficient vectors of
    /// equal degree.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Upper-left `m x m` block of `x` (1-based level index).
pub fn principal_minor(x: &ComplexMatrix, m: usize) -> Result<ComplexMatrix> {
    if m == 0 || m > x.n() {
        return Err(GzError::DimensionMismatch(format!(
            "minor size {m} out of range 1..={}",
            x.n()
        )));
    }
    let mut out = ComplexMatrix::zeros(m);
    for i in 0..m {
        for j in 0..m {
            out[(i, j)] = x[(i, j)];
        }
    }
    Ok(out)
}

/// `det(lambda I - x)` by the Faddeev-LeVerrier recursion.
pub fn charpoly(x: &ComplexMatrix) -> MonicPoly {
    let n = x.n();
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(ONE);
    let mut m = ComplexMatrix::identity(n);
    for k in 1..=n {
        let am = x * &m;
        let c = -am.trace() / k as f64;
        coeffs.push(c);
        m = am.shift(c);
    }
    MonicPoly { coeffs }
}

/// Orders values lexicographically by real part then imaginary part.
/// Real parts within [`TIE_TOL`] of their predecessor form a tie group
/// that is ordered by imaginary part.
pub fn canonical_sort(values: &mut [Complex64]) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && values[end].re - values[end - 1].re <= TIE_TOL {
            end += 1;
        }
        values[start..end].sort_by(|a, b| a.im.total_cmp(&b.im));
        start = end;
    }
}

/// All roots of `p` by Aberth-Ehrlich iteration followed by a guarded
/// Newton polish, in canonical order.
///
/// Every returned root satisfies `|p(root)| <= tol * (1 + max|coeff|)`.
pub fn polyroots(p: &MonicPoly, tol: f64) -> Result<Vec<Complex64>> {
    let n = p.degree();
    if n == 0 {
        return Err(GzError::InvalidInput("polyroots needs degree >= 1".into()));
    }
    if n == 1 {
        return Ok(vec![-p.coeffs[1]]);
    }

    let radius = 1.0 + p.max_coeff_norm();
    let mut roots: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();
    let mut done = vec![false; n];

    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS && done.iter().any(|d| !d) {
        sweeps += 1;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let z = roots[i];
            let (pz, dpz) = p.eval_with_derivative(z);
            if pz.norm() <= p.rounding_bound(z) {
                done[i] = true;
                continue;
            }
            let ratio = pz / dpz;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| ONE / (z - roots[j]))
                .sum();
            let step = ratio / (ONE - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                continue;
            }
            roots[i] = z - step;
            if step.norm() <= f64::EPSILON * z.norm() {
                done[i] = true;
            }
        }
    }

    polish(p, &mut roots);

    let bound = tol * (1.0 + p.max_coeff_norm());
    let worst = roots.iter().map(|&z| p.eval(z).norm()).fold(0.0, f64::max);
    if !(worst <= bound) {
        return Err(GzError::ConvergenceFailure {
            sweeps,
            residual: worst,
        });
    }
    canonical_sort(&mut roots);
    Ok(roots)
}

/// Newton steps that are accepted only when they reduce the residual and
/// stay well inside the distance to the nearest other root.
fn polish(p: &MonicPoly, roots: &mut [Complex64]) {
    for i in 0..roots.len() {
        for _ in 0..2 {
            let z = roots[i];
            let (pz, dpz) = p.eval_with_derivative(z);
            if pz == ZERO || dpz == ZERO {
                break;
            }
            let step = pz / dpz;
            let nearest = nearest_other(roots, i);
            if !(step.norm() < 0.25 * nearest) {
                break;
            }
            let candidate = z - step;
            if p.eval(candidate).norm() < pz.norm() {
                roots[i] = candidate;
            } else {
                break;
            }
        }
    }
}

fn nearest_other(values: &[Complex64], i: usize) -> f64 {
    values
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, v)| (v - values[i]).norm())
        .fold(f64::INFINITY, f64::min)
}

/// Eigenvalues of `x` in canonical order: roots of the characteristic
/// polynomial, refined by Newton steps on `det(lambda I - x)` itself.
pub fn eigenvalues(x: &ComplexMatrix, tol: f64) -> Result<Vec<Complex64>> {
    let mut values = polyroots(&charpoly(x), tol)?;
    if x.n() > 1 {
        refine_eigenvalues(x, &mut values);
        canonical_sort(&mut values);
    }
    Ok(values)
}

/// Newton steps per eigenvalue; convergence is quadratic once the guard
/// lets the first step through.
const MAX_REFINE_STEPS: usize = 12;

/// Newton on `log det(lambda I - x)`, whose derivative is the resolvent
/// trace. Steps larger than a quarter of the distance to the nearest other
/// eigenvalue are rejected, so clustered values are left alone.
fn refine_eigenvalues(x: &ComplexMatrix, values: &mut [Complex64]) {
    for i in 0..values.len() {
        for _ in 0..MAX_REFINE_STEPS {
            let lambda = values[i];
            let Some(tr) = x.resolvent_trace(lambda) else {
                break;
            };
            let step = ONE / tr;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            if !(step.norm() < 0.25 * nearest_other(values, i)) {
                break;
            }
            values[i] = lambda - step;
            if step.norm() <= 4.0 * f64::EPSILON * (1.0 + lambda.norm()) {
                break;
            }
        }
    }
}
