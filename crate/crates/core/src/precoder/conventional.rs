//! User-only precoders: ZF / RZF data precoding with null-space artificial
//! noise. Nothing here looks at the eavesdropper channel.

use num_complex::Complex64;

use super::{normalize, LinearVariant, PrecoderSet, Scheme};
use crate::error::{Error, Result};
use crate::numerics::{hermitian_pd_solve, null_space_basis, pseudo_inverse, svd, CMatrix};

/// Unnormalized zero-forcing precoder `pinv(H^H)`.
///
/// For full-column-rank `H` this is `H (H^H H)^-1`; it is evaluated through
/// the SVD so the Gram matrix's squared condition number never enters. When
/// `K > rank(H)` it degrades to the minimum-norm solution.
pub fn zf_data(h: &CMatrix) -> Result<CMatrix> {
    pseudo_inverse(&h.adjoint())
}

/// Unnormalized regularized ZF precoder `(H H^H + beta I)^-1 H`.
pub fn rzf_data(h: &CMatrix, beta: f64) -> Result<CMatrix> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidInput(format!("regularization {beta} must be finite and >= 0")));
    }
    let n = h.nrows();
    if beta == 0.0 {
        let rank = svd(h)?.rank;
        if rank < n {
            return Err(Error::Singular(format!(
                "H H^H has rank {rank} < {n} and no regularization"
            )));
        }
    }
    let gram = h * h.adjoint() + CMatrix::identity(n, n) * Complex64::new(beta, 0.0);
    hermitian_pd_solve(&gram, h).map_err(|e| match e {
        Error::NotPositiveDefinite => Error::Singular("H H^H + beta I is not positive definite".into()),
        other => other,
    })
}

/// Orthonormal basis of `null(H^H)`, `N x (N - rank H)`.
pub fn nullspace_an(h: &CMatrix) -> Result<CMatrix> {
    null_space_basis(&h.adjoint())
}

/// MMSE-style loading `beta = K / rho`.
pub fn default_beta(n_users: usize, rho: f64) -> f64 {
    n_users as f64 / rho
}

/// Conventional scheme end to end: data precoder, null-space AN, power split.
pub fn conventional_precoders(
    h: &CMatrix,
    variant: LinearVariant,
    beta: f64,
    phi: f64,
) -> Result<PrecoderSet> {
    let (data, scheme) = match variant {
        LinearVariant::Zf => (zf_data(h)?, Scheme::ZfConv),
        LinearVariant::Rzf => (rzf_data(h, beta)?, Scheme::RzfConv),
    };
    normalize(&data, &nullspace_an(h)?, phi, scheme)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::testing::*;
    use approx::assert_relative_eq;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn zf_of_orthonormal_columns_is_identity_map() {
        let q = svd(&random_matrix(&mut rng(1), 8, 3)).unwrap().left_vectors.columns(0, 3).into_owned();
        assert!((zf_data(&q).unwrap() - &q).norm() < 1e-12);
    }

    #[test]
    fn zf_inverts_effective_channel() {
        let h = random_matrix(&mut rng(2), 10, 4);
        let w = zf_data(&h).unwrap();
        assert!((h.adjoint() * &w - CMatrix::identity(4, 4)).norm() < 1e-8);
        let gram = h.adjoint() * &h;
        let direct = &h * hermitian_pd_solve(&gram, &CMatrix::identity(4, 4)).unwrap();
        assert!((w - direct).norm() < 1e-8);
    }

    #[test]
    fn zf_single_user_is_scaled_matched_filter() {
        let h = random_matrix(&mut rng(3), 6, 1);
        let w = zf_data(&h).unwrap();
        let expected = &h / c(h.norm_squared());
        assert!((w - &expected).norm() < 1e-12 * expected.norm());
    }

    #[test]
    fn zf_overloaded_falls_back_to_min_norm() {
        let h = random_matrix(&mut rng(4), 4, 6);
        let w = zf_data(&h).unwrap();
        assert_eq!(w.shape(), (4, 6));
        let hh = h.adjoint();
        // Penrose: H^H W H^H = H^H
        assert!((&hh * &w * &hh - &hh).norm() < 1e-9 * hh.norm());
    }

    #[test]
    fn rzf_large_beta_tends_to_matched_filter() {
        let h = random_matrix(&mut rng(5), 6, 3);
        let beta = 1e9;
        let w = rzf_data(&h, beta).unwrap() * c(beta);
        assert!((w - &h).norm() < 1e-6 * h.norm());
    }

    #[test]
    fn rzf_without_loading_equals_zf_for_square_channel() {
        let h = random_matrix(&mut rng(6), 5, 5);
        let a = rzf_data(&h, 0.0).unwrap();
        let b = zf_data(&h).unwrap();
        assert!((a - &b).norm() < 1e-8 * b.norm());
    }

    #[test]
    fn rzf_on_basis_vector() {
        let mut h = CMatrix::zeros(4, 1);
        h[(0, 0)] = c(1.0);
        let w = rzf_data(&h, 1.0).unwrap();
        assert!((w - &h * c(0.5)).norm() < 1e-15);
    }

    #[test]
    fn rzf_unregularized_singular_is_error() {
        let h = random_matrix(&mut rng(7), 6, 2);
        assert!(matches!(rzf_data(&h, 0.0), Err(Error::Singular(_))));
        assert!(rzf_data(&h, -1.0).is_err());
    }

    #[test]
    fn nullspace_an_dimensions() {
        let h = random_matrix(&mut rng(8), 16, 16);
        assert_eq!(nullspace_an(&h).unwrap().shape(), (16, 0));

        let h = random_matrix(&mut rng(9), 16, 4) * c(1e-5);
        let v = nullspace_an(&h).unwrap();
        assert_eq!(v.ncols(), 12);
        assert!((h.adjoint() * &v).norm() <= 1e-10 * h.norm());
        assert!(unitary_defect(&v) < 1e-10);
    }

    #[test]
    fn conventional_set_obeys_power_split() {
        let h = random_matrix(&mut rng(10), 8, 3);
        for variant in [LinearVariant::Zf, LinearVariant::Rzf] {
            let set = conventional_precoders(&h, variant, 0.1, 0.7).unwrap();
            assert_relative_eq!(set.data_power(), 0.7, epsilon = 1e-12);
            assert_relative_eq!(set.an_power(), 0.3, epsilon = 1e-12);
            assert_eq!(set.an.ncols(), 5);
        }
    }
}
