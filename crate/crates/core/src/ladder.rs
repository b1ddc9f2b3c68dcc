//! Eigenvalue ladders: the nested spectra of the leading principal minors
//! of a matrix, their flat `r_i` indexing, membership in the generic
//! stratum and the per-level permutation (deck) action.
//!
//! Flat indices are 1-based: `i = d(m - 1) + k` with level `m` in `1..=n`
//! and branch `k` in `1..=m`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GzError, Result};
use crate::numerics::{canonical_sort, eigenvalues, principal_minor, ComplexMatrix, MonicPoly};

/// Default gap tolerance for the membership predicates, applied after
/// scaling by `1 + spectral radius`.
pub const DEFAULT_GAP_TOL: f64 = 1e-8;

/// Threshold for matching a stored ladder against recomputed minor spectra.
pub const MATCH_TOL: f64 = 1e-6;

/// Triangular number `m (m + 1) / 2`.
pub const fn d(m: usize) -> usize {
    m * (m + 1) / 2
}

/// Splits a flat index `i` in `1..=d(n)` into `(level, branch)`.
pub fn split_index(i: usize, n: usize) -> Result<(usize, usize)> {
    if i == 0 || i > d(n) {
        return Err(GzError::DimensionMismatch(format!(
            "flat index {i} out of range 1..={} for n = {n}",
            d(n)
        )));
    }
    let mut m = 1;
    while d(m) < i {
        m += 1;
    }
    Ok((m, i - d(m - 1)))
}

/// Inverse of [`split_index`].
pub const fn flat_index(m: usize, k: usize) -> usize {
    d(m - 1) + k
}

/// Nested spectra `nu(1), ..., nu(n)`; level `m` holds `m` values in
/// stored order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LadderRepr", into = "LadderRepr")]
pub struct Ladder {
    levels: Vec<Vec<Complex64>>,
}

#[derive(Serialize, Deserialize)]
struct LadderRepr {
    n: usize,
    levels: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<LadderRepr> for Ladder {
    type Error = GzError;

    fn try_from(repr: LadderRepr) -> Result<Self> {
        let levels: Vec<Vec<Complex64>> = repr
            .levels
            .into_iter()
            .map(|lvl| {
                lvl.into_iter()
                    .map(|[re, im]| Complex64::new(re, im))
                    .collect()
            })
            .collect();
        if levels.len() != repr.n {
            return Err(GzError::DimensionMismatch(format!(
                "ladder declares n = {} but has {} levels",
                repr.n,
                levels.len()
            )));
        }
        Ladder::new(levels)
    }
}

impl From<Ladder> for LadderRepr {
    fn from(ladder: Ladder) -> Self {
        LadderRepr {
            n: ladder.n(),
            levels: ladder
                .levels
                .iter()
                .map(|lvl| lvl.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

impl Ladder {
    pub fn new(levels: Vec<Vec<Complex64>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(GzError::DimensionMismatch(
                "a ladder needs at least one level".into(),
            ));
        }
        for (idx, lvl) in levels.iter().enumerate() {
            if lvl.len() != idx + 1 {
                return Err(GzError::DimensionMismatch(format!(
                    "level {} must have {} entries, found {}",
                    idx + 1,
                    idx + 1,
                    lvl.len()
                )));
            }
            if lvl.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(GzError::InvalidInput(format!(
                    "level {} has a non-finite entry",
                    idx + 1
                )));
            }
        }
        Ok(Self { levels })
    }

    pub fn from_real<R: AsRef<[f64]>>(levels: &[R]) -> Result<Self> {
        Self::new(
            levels
                .iter()
                .map(|l| l.as_ref().iter().map(|&v| Complex64::new(v, 0.0)).collect())
                .collect(),
        )
    }

    /// Builds a ladder from the flat list `r_1, ..., r_{d(n)}`.
    pub fn from_flat(r: &[Complex64]) -> Result<Self> {
        let mut n = 0;
        while d(n) < r.len() {
            n += 1;
        }
        if d(n) != r.len() {
            return Err(GzError::DimensionMismatch(format!(
                "{} values is not a triangular number",
                r.len()
            )));
        }
        Self::new((1..=n).map(|m| r[d(m - 1)..d(m)].to_vec()).collect())
    }

    pub fn n(&self) -> usize {
        self.levels.len()
    }

    /// Level `m` (1-based).
    pub fn level(&self, m: usize) -> &[Complex64] {
        &self.levels[m - 1]
    }

    pub fn levels(&self) -> &[Vec<Complex64>] {
        &self.levels
    }

    /// Entries in flat order `r_1, ..., r_{d(n)}`.
    pub fn flat(&self) -> Vec<Complex64> {
        self.levels.iter().flatten().copied().collect()
    }

    /// The ladder of the first `m` levels.
    pub fn truncate(&self, m: usize) -> Ladder {
        Ladder {
            levels: self.levels[..m].to_vec(),
        }
    }

    /// Largest entry modulus.
    pub fn spectral_radius(&self) -> f64 {
        self.levels
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Smallest separation within each level and between adjacent levels.
    /// Infinite when there is nothing to compare.
    pub fn min_gap(&self) -> f64 {
        let mut gap = f64::INFINITY;
        for (idx, lvl) in self.levels.iter().enumerate() {
            for (a, za) in lvl.iter().enumerate() {
                for zb in &lvl[a + 1..] {
                    gap = gap.min((za - zb).norm());
                }
                if let Some(next) = self.levels.get(idx + 1) {
                    for zb in next {
                        gap = gap.min((za - zb).norm());
                    }
                }
            }
        }
        gap
    }

    /// Per-level minimum gaps: entry `m - 1` covers separations within
    /// level `m` and between levels `m - 1` and `m`.
    pub fn level_gaps(&self) -> Vec<f64> {
        (0..self.n())
            .map(|idx| {
                let lvl = &self.levels[idx];
                let mut gap = f64::INFINITY;
                for (a, za) in lvl.iter().enumerate() {
                    for zb in &lvl[a + 1..] {
                        gap = gap.min((za - zb).norm());
                    }
                    if idx > 0 {
                        for zb in &self.levels[idx - 1] {
                            gap = gap.min((za - zb).norm());
                        }
                    }
                }
                gap
            })
            .collect()
    }
}

/// A matrix together with a labelled ladder of its minor spectra: a point
/// on the eigenvalue cover.
#[derive(Clone, Debug, PartialEq)]
pub struct CoveredPoint {
    x: ComplexMatrix,
    ladder: Ladder,
}

impl CoveredPoint {
    /// Pairs `x` with `ladder`, checking that every level matches the
    /// spectrum of the corresponding minor of `x` to within [`MATCH_TOL`]
    /// (scaled by `1 + spectral radius`).
    pub fn new(x: ComplexMatrix, ladder: Ladder, tol: f64) -> Result<Self> {
        if x.n() != ladder.n() {
            return Err(GzError::DimensionMismatch(format!(
                "matrix is {}x{} but ladder has {} levels",
                x.n(),
                x.n(),
                ladder.n()
            )));
        }
        let fresh = minor_spectra(&x, tol)?;
        check_ladder_match(&fresh, &ladder, MATCH_TOL)?;
        Ok(Self { x, ladder })
    }

    /// Pairs without re-deriving spectra. Callers must already know that
    /// the ladder labels the minor spectra of `x`.
    pub(crate) fn new_unchecked(x: ComplexMatrix, ladder: Ladder) -> Self {
        debug_assert_eq!(x.n(), ladder.n());
        Self { x, ladder }
    }

    pub fn x(&self) -> &ComplexMatrix {
        &self.x
    }

    pub fn ladder(&self) -> &Ladder {
        &self.ladder
    }

    pub fn n(&self) -> usize {
        self.x.n()
    }

    pub fn into_parts(self) -> (ComplexMatrix, Ladder) {
        (self.x, self.ladder)
    }

    /// The point over the leading `m x m` minor with the first `m` levels.
    pub fn restrict(&self, m: usize) -> Result<CoveredPoint> {
        Ok(CoveredPoint {
            x: principal_minor(&self.x, m)?,
            ladder: self.ladder.truncate(m),
        })
    }
}

fn minor_spectra(x: &ComplexMatrix, tol: f64) -> Result<Ladder> {
    let levels = (1..=x.n())
        .map(|m| eigenvalues(&principal_minor(x, m)?, tol))
        .collect::<Result<Vec<_>>>()?;
    Ladder::new(levels)
}

/// Computes the ladder of `x` on the canonical sheet: each level sorted by
/// real part, then imaginary part.
pub fn extract_ladder(x: &ComplexMatrix, tol: f64) -> Result<CoveredPoint> {
    let ladder = minor_spectra(x, tol)?;
    Ok(CoveredPoint::new_unchecked(x.clone(), ladder))
}

/// Relabels `candidate` level by level so that it follows the order of
/// `reference`, using greedy nearest matching. Fails with
/// `BranchMismatch` if any matched pair is farther apart than
/// `threshold * (1 + spectral radius of reference)`.
pub fn match_ladder(candidate: &Ladder, reference: &Ladder, threshold: f64) -> Result<Ladder> {
    if candidate.n() != reference.n() {
        return Err(GzError::DimensionMismatch("ladders differ in size".into()));
    }
    let limit = threshold * (1.0 + reference.spectral_radius());
    let mut levels = Vec::with_capacity(reference.n());
    for (idx, (cand, refl)) in candidate.levels.iter().zip(&reference.levels).enumerate() {
        // Pairs are taken globally closest-first so that a poorly placed
        // early reference entry cannot steal a later entry's partner.
        let m = refl.len();
        let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(m * m);
        for (a, ra) in refl.iter().enumerate() {
            for (b, cb) in cand.iter().enumerate() {
                pairs.push(((ra - cb).norm(), a, b));
            }
        }
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        let mut assigned: Vec<Option<Complex64>> = vec![None; m];
        let mut used = vec![false; m];
        let mut worst: f64 = 0.0;
        for (dist, a, b) in pairs {
            if assigned[a].is_none() && !used[b] {
                assigned[a] = Some(cand[b]);
                used[b] = true;
                worst = worst.max(dist);
            }
        }
        if !(worst <= limit) {
            return Err(GzError::BranchMismatch {
                level: idx + 1,
                distance: worst,
                threshold: limit,
            });
        }
        levels.push(assigned.into_iter().map(Option::unwrap).collect());
    }
    Ladder::new(levels)
}

fn check_ladder_match(fresh: &Ladder, stored: &Ladder, threshold: f64) -> Result<()> {
    match_ladder(fresh, stored, threshold).map(|_| ())
}

/// Recomputes the minor spectra of `x` and labels them after `reference`.
pub fn tracked_ladder(
    x: &ComplexMatrix,
    reference: &Ladder,
    threshold: f64,
    tol: f64,
) -> Result<Ladder> {
    match_ladder(&minor_spectra(x, tol)?, reference, threshold)
}

/// Labels the minor spectra of a matrix near the point that produced
/// `reference`, for evaluating coordinate functions on one sheet of the
/// cover. Matches are accepted within a quarter of the smallest gap of
/// `reference`, which keeps the nearest-match assignment unambiguous.
pub fn track_branches(x: &ComplexMatrix, reference: &Ladder) -> Result<Ladder> {
    let gap = reference.min_gap();
    let threshold = if gap.is_finite() {
        0.25 * gap / (1.0 + reference.spectral_radius())
    } else {
        f64::INFINITY
    };
    tracked_ladder(x, reference, threshold, crate::numerics::DEFAULT_ROOT_TOL)
}

/// The value `r_i` at `z`.
pub fn r(z: &CoveredPoint, i: usize) -> Result<Complex64> {
    let (m, k) = split_index(i, z.n())?;
    Ok(z.ladder.level(m)[k - 1])
}

/// Whether every level has distinct entries and adjacent levels are
/// disjoint, with all gaps strictly above `tol * (1 + spectral radius)`.
pub fn in_e_omega(ladder: &Ladder, tol: f64) -> bool {
    ladder.min_gap() > tol * (1.0 + ladder.spectral_radius())
}

/// Whether `x` lies in the generic stratum: every minor regular
/// semisimple and adjacent minors with disjoint spectra.
pub fn in_m_omega(x: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(in_e_omega(
        extract_ladder(x, crate::numerics::DEFAULT_ROOT_TOL)?.ladder(),
        tol,
    ))
}

/// An element of the product of symmetric groups `S_1 x ... x S_n`.
/// Permutation `m` acts on the 0-based positions `0..m` of level `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeckElement {
    perms: Vec<Vec<usize>>,
}

impl DeckElement {
    pub fn new(perms: Vec<Vec<usize>>) -> Result<Self> {
        for (idx, p) in perms.iter().enumerate() {
            if p.len() != idx + 1 {
                return Err(GzError::DimensionMismatch(format!(
                    "permutation {} must act on {} points",
                    idx + 1,
                    idx + 1
                )));
            }
            let mut seen = vec![false; p.len()];
            for &v in p {
                if v >= p.len() || std::mem::replace(&mut seen[v], true) {
                    return Err(GzError::InvalidInput(format!(
                        "permutation {} is not a bijection",
                        idx + 1
                    )));
                }
            }
        }
        Ok(Self { perms })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            perms: (1..=n).map(|m| (0..m).collect()).collect(),
        }
    }

    /// Transposition of positions `a` and `b` (0-based) at level `m`.
    pub fn transposition(n: usize, m: usize, a: usize, b: usize) -> Result<Self> {
        let mut e = Self::identity(n);
        if m == 0 || m > n || a >= m || b >= m {
            return Err(GzError::DimensionMismatch(
                "transposition out of range".into(),
            ));
        }
        e.perms[m - 1].swap(a, b);
        Ok(e)
    }

    pub fn n(&self) -> usize {
        self.perms.len()
    }

    pub fn perm(&self, m: usize) -> &[usize] {
        &self.perms[m - 1]
    }

    /// Group product `self * other`, acting as `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n() != other.n() {
            return Err(GzError::DimensionMismatch(
                "deck elements differ in size".into(),
            ));
        }
        Ok(Self {
            perms: self
                .perms
                .iter()
                .zip(&other.perms)
                .map(|(s, t)| t.iter().map(|&j| s[j]).collect())
                .collect(),
        })
    }

    /// Moves the entry at position `j` of each level to position
    /// `perm(j)`.
    pub fn apply_to_ladder(&self, ladder: &Ladder) -> Result<Ladder> {
        if self.n() != ladder.n() {
            return Err(GzError::DimensionMismatch(
                "deck element and ladder differ in size".into(),
            ));
        }
        let levels = self
            .perms
            .iter()
            .zip(&ladder.levels)
            .map(|(p, lvl)| {
                let mut out = lvl.clone();
                for (j, &target) in p.iter().enumerate() {
                    out[target] = lvl[j];
                }
                out
            })
            .collect();
        Ladder::new(levels)
    }
}

/// Relabels the ladder of `z` by `sigma`; the matrix is untouched.
pub fn deck_apply(sigma: &DeckElement, z: &CoveredPoint) -> Result<CoveredPoint> {
    Ok(CoveredPoint::new_unchecked(
        z.x.clone(),
        sigma.apply_to_ladder(&z.ladder)?,
    ))
}

/// The monic polynomial of each level, whose roots are that level's
/// entries. Its signed coefficients are the elementary symmetric functions
/// of the level.
pub fn ladder_to_charpolys(ladder: &Ladder) -> Vec<MonicPoly> {
    ladder
        .levels
        .iter()
        .map(|lvl| MonicPoly::from_roots(lvl))
        .collect()
}

/// Normalized power sum `(1 / e) * sum_j r_j^e` over level `m`, with
/// `(m, k) = split_index(i)` and exponent `e = m + 1 - k`.
pub fn power_sum(z: &CoveredPoint, i: usize) -> Result<Complex64> {
    let (m, k) = split_index(i, z.n())?;
    let e = (m + 1 - k) as i32;
    let sum: Complex64 = z.ladder.level(m).iter().map(|v| v.powi(e)).sum();
    Ok(sum / e as f64)
}

/// Entries of level `m` sorted canonically; handy for comparing ladders
/// up to relabelling.
pub fn sorted_level(ladder: &Ladder, m: usize) -> Vec<Complex64> {
    let mut v = ladder.level(m).to_vec();
    canonical_sort(&mut v);
    v
}
