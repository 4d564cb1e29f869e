//! Complex dense linear-algebra kernels shared by the channel, precoder and
//! metric code.
//!
//! Everything here is a pure function of its inputs. Rank decisions all go
//! through one cutoff, `rcond = eps * max(rows, cols)` relative to the
//! largest singular value, so the pseudoinverse, the null space and the
//! zero-forcing fallback agree on what "rank deficient" means.

use faer::complex_native::c64;
use faer::prelude::SpSolver;
use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Full singular value decomposition `A = U diag(s) D^H`.
///
/// `left_vectors` is `rows x rows` and `right_vectors` is `cols x cols`; the
/// first `min(rows, cols)` columns of each pair with `singular_values`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub singular_values: Vec<f64>,
    pub left_vectors: CMatrix,
    pub right_vectors: CMatrix,
    pub rank: usize,
}

impl SvdResult {
    /// Singular values above this are counted towards the rank.
    pub fn cutoff(&self) -> f64 {
        let first = self.singular_values.first().copied().unwrap_or(0.0);
        let dims = self.left_vectors.nrows().max(self.right_vectors.nrows());
        first * rank_rcond(dims)
    }
}

pub fn rank_rcond(max_dim: usize) -> f64 {
    f64::EPSILON * max_dim.max(1) as f64
}

pub fn ensure_finite(a: &CMatrix, what: &str) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what} has non-finite entries")))
    }
}

/// Multiplies the column by a unit phase so that its largest-magnitude entry
/// (first one on ties) is real and positive. Returns the conjugate phase that
/// was applied.
fn canonical_phase(col: &mut [Complex64]) -> Complex64 {
    let mut best = 0usize;
    let mut best_abs = -1.0;
    for (i, z) in col.iter().enumerate() {
        let a = z.norm();
        if a > best_abs {
            best_abs = a;
            best = i;
        }
    }
    if best_abs <= 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let rot = col[best].conj() / best_abs;
    for z in col.iter_mut() {
        *z *= rot;
    }
    rot
}

fn to_faer(a: &CMatrix) -> Mat<c64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| {
        let z = a[(i, j)];
        c64::new(z.re, z.im)
    })
}

fn from_faer(a: faer::MatRef<'_, c64>) -> CMatrix {
    CMatrix::from_fn(a.nrows(), a.ncols(), |i, j| {
        let z = a.read(i, j);
        Complex64::new(z.re, z.im)
    })
}

/// Full SVD with descending singular values and the canonical phase
/// convention: each left singular vector's largest entry is real-positive and
/// the paired right vector is rotated by the same phase.
pub fn svd(a: &CMatrix) -> Result<SvdResult> {
    ensure_finite(a, "svd input")?;
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return Ok(SvdResult {
            singular_values: Vec::new(),
            left_vectors: CMatrix::identity(rows, rows),
            right_vectors: CMatrix::identity(cols, cols),
            rank: 0,
        });
    }

    let dec = to_faer(a).svd();
    let u = from_faer(dec.u());
    let v = from_faer(dec.v());
    let s_diag = dec.s_diagonal();
    let p = rows.min(cols);
    let sv: Vec<f64> = (0..p).map(|i| s_diag.read(i).re).collect();

    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&i, &j| sv[j].partial_cmp(&sv[i]).expect("finite singular values"));

    let mut singular_values = Vec::with_capacity(p);
    let mut left = u.clone();
    let mut right = v.clone();
    for (dst, &src) in order.iter().enumerate() {
        singular_values.push(sv[src]);
        let mut ucol: Vec<Complex64> = u.column(src).iter().copied().collect();
        let rot = canonical_phase(&mut ucol);
        left.set_column(dst, &CVector::from_vec(ucol));
        right.set_column(dst, &(v.column(src) * rot));
    }
    for (m, from) in [(&mut left, p), (&mut right, p)] {
        for j in from..m.ncols() {
            canonical_phase(m.column_mut(j).as_mut_slice());
        }
    }

    let cutoff = singular_values[0] * rank_rcond(rows.max(cols));
    let rank = singular_values.iter().filter(|&&s| s > cutoff).count();

    Ok(SvdResult {
        singular_values,
        left_vectors: left,
        right_vectors: right,
        rank,
    })
}

/// Moore-Penrose pseudoinverse, truncated at the shared rank cutoff.
pub fn pseudo_inverse(a: &CMatrix) -> Result<CMatrix> {
    let dec = svd(a)?;
    let (rows, cols) = a.shape();
    let mut out = CMatrix::zeros(cols, rows);
    for l in 0..dec.rank {
        let u = dec.left_vectors.column(l);
        let d = dec.right_vectors.column(l);
        let inv = Complex64::new(1.0 / dec.singular_values[l], 0.0);
        out += (d * inv) * u.adjoint();
    }
    Ok(out)
}

/// Orthonormal basis of `{x : A x = 0}`, as an `N x Z` matrix with
/// `Z = N - rank(A)` (possibly zero columns).
pub fn null_space_basis(a: &CMatrix) -> Result<CMatrix> {
    let dec = svd(a)?;
    let n = a.ncols();
    Ok(dec.right_vectors.columns(dec.rank, n - dec.rank).into_owned())
}

/// Solves `A X = B` for Hermitian positive definite `A` via Cholesky.
pub fn hermitian_pd_solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() || a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "hermitian solve with A {:?} and B {:?}",
            a.shape(),
            b.shape()
        )));
    }
    ensure_finite(a, "system matrix")?;
    ensure_finite(b, "right-hand side")?;
    let chol = to_faer(a)
        .cholesky(Side::Lower)
        .map_err(|_| Error::NotPositiveDefinite)?;
    Ok(from_faer(chol.solve(&to_faer(b)).as_ref()))
}

/// Squared Euclidean norm of every column.
pub fn column_norms_sqr(a: &CMatrix) -> Vec<f64> {
    a.column_iter().map(|c| c.norm_squared()).collect()
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        })
    }

    pub fn unitary_defect(q: &CMatrix) -> f64 {
        (q.adjoint() * q - CMatrix::identity(q.ncols(), q.ncols())).norm()
    }
}
