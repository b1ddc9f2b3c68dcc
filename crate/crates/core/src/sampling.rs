//! Seeded random generators for generic points, ladders and torus elements.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{GzError, Result};
use crate::flows::TorusElement;
use crate::ladder::{d, extract_ladder, in_e_omega, CoveredPoint, Ladder, DEFAULT_GAP_TOL};
use crate::numerics::{canonical_sort, ComplexMatrix, DEFAULT_ROOT_TOL};

/// Consecutive rejections tolerated before giving up.
pub const MAX_REJECTIONS: usize = 1000;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian: real and imaginary parts independent N(0, 1/2).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    ComplexMatrix::new(n, (0..n * n).map(|_| complex_gaussian(rng)).collect())
        .expect("gaussian entries are finite")
}

/// Draws Gaussian matrices until one lies in the generic stratum with
/// every ladder gap above `min_gap`. Returns the point on its canonical
/// sheet.
pub fn generic_point<R: Rng + ?Sized>(rng: &mut R, n: usize, min_gap: f64) -> Result<CoveredPoint> {
    for _ in 0..MAX_REJECTIONS {
        let x = gaussian_matrix(rng, n);
        let Ok(z) = extract_ladder(&x, DEFAULT_ROOT_TOL) else {
            continue;
        };
        if in_e_omega(z.ladder(), DEFAULT_GAP_TOL) && z.ladder().min_gap() > min_gap {
            return Ok(z);
        }
    }
    Err(GzError::SamplingFailure(MAX_REJECTIONS))
}

/// A random ladder in canonical order with every gap at least `min_gap`.
/// Entries are complex Gaussian scaled by `spread`.
pub fn random_ladder<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    spread: f64,
    min_gap: f64,
) -> Result<Ladder> {
    for _ in 0..MAX_REJECTIONS {
        let levels: Vec<Vec<Complex64>> = (1..=n)
            .map(|m| {
                let mut lvl: Vec<Complex64> =
                    (0..m).map(|_| complex_gaussian(rng) * spread).collect();
                canonical_sort(&mut lvl);
                lvl
            })
            .collect();
        let ladder = Ladder::new(levels)?;
        if ladder.min_gap() >= min_gap {
            return Ok(ladder);
        }
    }
    Err(GzError::InvalidInput(format!(
        "could not draw a ladder with gaps >= {min_gap} in {MAX_REJECTIONS} attempts"
    )))
}

/// A random torus element `zeta_j = exp(q_j)` with `q_j` uniform in the
/// square `[-q_max, q_max]^2` of the complex plane.
pub fn random_torus<R: Rng + ?Sized>(rng: &mut R, n: usize, q_max: f64) -> TorusElement {
    let q: Vec<Complex64> = (0..d(n - 1))
        .map(|_| {
            Complex64::new(
                rng.random_range(-q_max..=q_max),
                rng.random_range(-q_max..=q_max),
            )
        })
        .collect();
    TorusElement::from_times(n, &q).expect("exponentials are nonzero")
}

/// A uniformly random permutation of `1..=k`.
pub fn random_order<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (1..=k).collect();
    for i in (1..k).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    order
}
