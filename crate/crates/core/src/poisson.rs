//! Lie-Poisson structure on `M(n)`, identified with `gl(n)*` through the
//! trace form.
//!
//! Gradients follow the pairing `df_x(E) = tr(grad f(x) E)`, so
//! `grad f(x)[j][i] = df / dx[i][j]`. The bracket is
//! `{f, g}(x) = tr(x [grad f, grad g])` and the Hamiltonian field is
//! `xi_f(x) = [x, grad f]`. With these signs `{f, g} = xi_f g`, and the field
//! of an eigenvalue function `r_j` is the derivative of conjugation by
//! `exp(-q eps_j)`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{GzError, Result};
use crate::flows::{padded_projector, DEFAULT_PROJECTOR_TOL};
use crate::ladder::{split_index, track_branches, CoveredPoint, Ladder};
use crate::numerics::ComplexMatrix;

type Evaluator = dyn Fn(&ComplexMatrix) -> Result<Complex64> + Send + Sync;
type Gradient = dyn Fn(&ComplexMatrix) -> Result<ComplexMatrix> + Send + Sync;

/// A holomorphic function on (an open subset of) `M(n)`, optionally with
/// an analytic gradient. Without one, gradients come from central
/// differences.
#[derive(Clone)]
pub struct MatrixFunction {
    eval: Arc<Evaluator>,
    grad: Option<Arc<Gradient>>,
}

impl MatrixFunction {
    pub fn new(eval: impl Fn(&ComplexMatrix) -> Result<Complex64> + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(eval),
            grad: None,
        }
    }

    pub fn with_gradient(
        eval: impl Fn(&ComplexMatrix) -> Result<Complex64> + Send + Sync + 'static,
        grad: impl Fn(&ComplexMatrix) -> Result<ComplexMatrix> + Send + Sync + 'static,
    ) -> Self {
        Self {
            eval: Arc::new(eval),
            grad: Some(Arc::new(grad)),
        }
    }

    /// Drops the analytic gradient, forcing finite differences.
    pub fn without_gradient(&self) -> Self {
        Self {
            eval: self.eval.clone(),
            grad: None,
        }
    }

    pub fn has_gradient(&self) -> bool {
        self.grad.is_some()
    }

    pub fn eval(&self, x: &ComplexMatrix) -> Result<Complex64> {
        (self.eval)(x)
    }

    /// Analytic gradient when available, else [`grad_fd`] with
    /// [`default_step`].
    pub fn gradient(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        match &self.grad {
            Some(g) => g(x),
            None => grad_fd(self, x, default_step(x)),
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::with_gradient(move |_| Ok(c), |x| Ok(ComplexMatrix::zeros(x.n())))
    }

    /// The coordinate function `x -> x[i][j]` (0-based).
    pub fn entry(i: usize, j: usize) -> Self {
        Self::with_gradient(
            move |x| Ok(x[(i, j)]),
            move |x| Ok(ComplexMatrix::unit(x.n(), j, i)),
        )
    }

    /// `x -> tr(x^k)`, gradient `k x^{k-1}`.
    pub fn trace_power(k: u32) -> Self {
        fn power(x: &ComplexMatrix, k: u32) -> ComplexMatrix {
            (0..k).fold(ComplexMatrix::identity(x.n()), |acc, _| &acc * x)
        }
        Self::with_gradient(
            move |x| Ok(power(x, k).trace()),
            move |x| {
                if k == 0 {
                    Ok(ComplexMatrix::zeros(x.n()))
                } else {
                    Ok(power(x, k - 1).scale(Complex64::new(k as f64, 0.0)))
                }
            },
        )
    }

    /// Pointwise product; the gradient follows the product rule when both
    /// factors have analytic gradients.
    pub fn product(f: &Self, g: &Self) -> Self {
        let (fe, ge) = (f.eval.clone(), g.eval.clone());
        let eval = move |x: &ComplexMatrix| Ok(fe(x)? * ge(x)?);
        match (&f.grad, &g.grad) {
            (Some(fg), Some(gg)) => {
                let (fe, ge, fg, gg) = (f.eval.clone(), g.eval.clone(), fg.clone(), gg.clone());
                Self::with_gradient(eval, move |x| {
                    Ok(&fg(x)?.scale(ge(x)?) + &gg(x)?.scale(fe(x)?))
                })
            }
            _ => Self::new(eval),
        }
    }

    /// The eigenvalue function `r_i` on the sheet of `reference`: minor
    /// spectra of the argument are labelled by nearest match to
    /// `reference`. The gradient is the padded spectral projector.
    pub fn r(reference: Ladder, i: usize) -> Result<Self> {
        let (m, k) = split_index(i, reference.n())?;
        let reference = Arc::new(reference);
        let eval_ref = reference.clone();
        Ok(Self::with_gradient(
            move |x| Ok(track_branches(x, &eval_ref)?.level(m)[k - 1]),
            move |x| {
                let ladder = track_branches(x, &reference)?;
                padded_projector(x, &ladder, m, k, DEFAULT_PROJECTOR_TOL)
            },
        ))
    }
}

/// Central-difference step `1e-6 * (1 + max|x_ij|)`.
pub fn default_step(x: &ComplexMatrix) -> f64 {
    1e-6 * (1.0 + x.max_norm())
}

/// `tr(a b)`.
pub fn trace_form(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    if a.n() != b.n() {
        return Err(GzError::DimensionMismatch(format!(
            "trace form of {}x{} and {}x{} matrices",
            a.n(),
            a.n(),
            b.n(),
            b.n()
        )));
    }
    let n = a.n();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    Ok(acc)
}

/// Gradient by central differences with a real step `h` along each entry.
/// Valid for holomorphic `f`, where the real-direction derivative is the
/// complex derivative.
pub fn grad_fd(f: &MatrixFunction, x: &ComplexMatrix, h: f64) -> Result<ComplexMatrix> {
    let n = x.n();
    let mut g = ComplexMatrix::zeros(n);
    let mut probe = x.clone();
    for i in 0..n {
        for j in 0..n {
            let orig = probe[(i, j)];
            probe[(i, j)] = orig + h;
            let plus = f.eval(&probe)?;
            probe[(i, j)] = orig - h;
            let minus = f.eval(&probe)?;
            probe[(i, j)] = orig;
            g[(j, i)] = (plus - minus) / (2.0 * h);
        }
    }
    Ok(g)
}

/// Vector-valued variant of [`grad_fd`]: one gradient per component of
/// `f`, sharing each pair of perturbed evaluations.
pub fn grad_fd_many<F>(f: F, x: &ComplexMatrix, h: f64) -> Result<Vec<ComplexMatrix>>
where
    F: Fn(&ComplexMatrix) -> Result<Vec<Complex64>>,
{
    let n = x.n();
    let mut grads: Vec<ComplexMatrix> = Vec::new();
    let mut probe = x.clone();
    for i in 0..n {
        for j in 0..n {
            let orig = probe[(i, j)];
            probe[(i, j)] = orig + h;
            let plus = f(&probe)?;
            probe[(i, j)] = orig - h;
            let minus = f(&probe)?;
            probe[(i, j)] = orig;
            if grads.is_empty() {
                grads = vec![ComplexMatrix::zeros(n); plus.len()];
            }
            for (g, (p, m)) in grads.iter_mut().zip(plus.iter().zip(&minus)) {
                g[(j, i)] = (p - m) / (2.0 * h);
            }
        }
    }
    Ok(grads)
}

/// Nodes on the circle used by [`grad_contour_many`].
pub const CONTOUR_NODES: usize = 16;

/// Gradients of a holomorphic vector-valued function by the trapezoid rule
/// on the Cauchy integral: each entry is perturbed around a circle of the
/// given radius. The error decays like `radius^nodes`, so the radius can be
/// far larger than a central-difference step and rounding noise shrinks
/// accordingly. Same layout as [`grad_fd_many`].
pub fn grad_contour_many<F>(
    f: F,
    x: &ComplexMatrix,
    radius: f64,
    nodes: usize,
) -> Result<Vec<ComplexMatrix>>
where
    F: Fn(&ComplexMatrix) -> Result<Vec<Complex64>>,
{
    if nodes < 2 || !(radius > 0.0) {
        return Err(GzError::InvalidInput(
            "contour needs at least two nodes and a positive radius".into(),
        ));
    }
    let n = x.n();
    let roots: Vec<Complex64> = (0..nodes)
        .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / nodes as f64))
        .collect();
    let mut grads: Vec<ComplexMatrix> = Vec::new();
    let mut probe = x.clone();
    for i in 0..n {
        for j in 0..n {
            let orig = probe[(i, j)];
            let mut acc: Vec<Complex64> = Vec::new();
            for w in &roots {
                probe[(i, j)] = orig + w * radius;
                let v = f(&probe);
                let v = match v {
                    Ok(v) => v,
                    Err(e) => {
                        probe[(i, j)] = orig;
                        return Err(e);
                    }
                };
                if acc.is_empty() {
                    acc = vec![Complex64::new(0.0, 0.0); v.len()];
                }
                for (a, vk) in acc.iter_mut().zip(&v) {
                    *a += vk * w.conj();
                }
            }
            probe[(i, j)] = orig;
            if grads.is_empty() {
                grads = vec![ComplexMatrix::zeros(n); acc.len()];
            }
            for (g, a) in grads.iter_mut().zip(&acc) {
                g[(j, i)] = a / (nodes as f64 * radius);
            }
        }
    }
    Ok(grads)
}

/// Analytic gradient of `r_i` at `z`: the spectral projector of the
/// level-`m` minor onto branch `k`, padded with zeros to `n x n`.
pub fn grad_r(z: &CoveredPoint, i: usize) -> Result<ComplexMatrix> {
    let (m, k) = split_index(i, z.n())?;
    padded_projector(z.x(), z.ladder(), m, k, DEFAULT_PROJECTOR_TOL)
}

/// `tr(x [a, b])` for gradients `a`, `b` at `x`.
pub fn bracket_of_gradients(
    x: &ComplexMatrix,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
) -> Result<Complex64> {
    trace_form(x, &a.commutator(b))
}

/// `{f, g}(x) = tr(x [grad f, grad g])`.
pub fn bracket(f: &MatrixFunction, g: &MatrixFunction, x: &ComplexMatrix) -> Result<Complex64> {
    bracket_of_gradients(x, &f.gradient(x)?, &g.gradient(x)?)
}

/// `xi_f(x) = [x, grad f(x)]`.
pub fn hamiltonian_field(f: &MatrixFunction, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(x.commutator(&f.gradient(x)?))
}
