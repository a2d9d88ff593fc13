//! Eigenvalues of a real (1,1)-form relative to a Kähler form, and the
//! primitive split `α = η + f ω`.

use num_complex::Complex64;

use crate::curvature::Kaehler11;
use crate::error::{Error, Result};
use crate::exterior::{divided_power, top_ratio, wedge};
use crate::symfun::elem_sym;

/// Primitivity gate for [`primitive_square_ratio`]: `|γ_1(η/ω)| <= 1e-9 (1 + ‖η‖)`.
pub const PRIMITIVE_TOL: f64 = 1e-9;

fn same_dim(a: &Kaehler11, w: &Kaehler11) -> Result<()> {
    if a.n() != w.n() {
        return Err(Error::DimensionMismatch {
            left: a.n(),
            right: w.n(),
        });
    }
    Ok(())
}

/// Generalized eigenvalues of the hermitian pencil `(A, G)`, ascending.
///
/// With `G = L L*` the pencil reduces to the hermitian matrix `L⁻¹ A L⁻*`.
pub fn relative_eigenvalues(a: &Kaehler11, w: &Kaehler11) -> Result<Vec<f64>> {
    same_dim(a, w)?;
    w.require_positive_definite()?;
    let chol = w
        .matrix()
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    let n = a.n();
    // X = L⁻¹ A, then L⁻¹ X* = L⁻¹ A L⁻* since A is hermitian
    let x = l
        .solve_lower_triangular(a.matrix())
        .ok_or(Error::NotPositiveDefinite)?;
    let c = l
        .solve_lower_triangular(&x.adjoint())
        .ok_or(Error::NotPositiveDefinite)?;
    let c = (&c + c.adjoint()) * Complex64::new(0.5, 0.0);
    let mut eig: Vec<f64> = if n == 0 {
        Vec::new()
    } else {
        c.symmetric_eigenvalues().iter().copied().collect()
    };
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// `γ_k(α/ω)`.
pub fn gamma_rel(a: &Kaehler11, w: &Kaehler11, k: usize) -> Result<f64> {
    elem_sym(&relative_eigenvalues(a, w)?, k)
}

/// `tr(G⁻¹ A)`, an eigenvalue-free route to `γ_1(α/ω)`.
pub fn trace_ratio(a: &Kaehler11, w: &Kaehler11) -> Result<f64> {
    same_dim(a, w)?;
    w.require_positive_definite()?;
    let inv = w
        .matrix()
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite)?
        .inverse();
    Ok((inv * a.matrix()).trace().re)
}

/// `top_ratio(α^k/k! ∧ ω^{n-k}/(n-k)!, ω^n/n!)`, the wedge route to `γ_k(α/ω)`.
pub fn gamma_rel_wedge(a: &Kaehler11, w: &Kaehler11, k: usize) -> Result<f64> {
    same_dim(a, w)?;
    w.require_positive_definite()?;
    let n = w.n();
    if k > n {
        return Err(Error::OutOfRange {
            what: "k",
            value: k,
            min: 0,
            max: n,
        });
    }
    let omega = w.to_form();
    let top = wedge(&divided_power(&a.to_form(), k), &divided_power(&omega, n - k))?;
    Ok(top_ratio(&top, &divided_power(&omega, n))?.re)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrimitiveSplit {
    pub eta: Kaehler11,
    pub f: f64,
}

/// `c1 = η + f ω` with `f = γ_1(c1/ω)/n`, so `γ_1(η/ω) = 0`.
pub fn primitive_split(c1: &Kaehler11, w: &Kaehler11) -> Result<PrimitiveSplit> {
    same_dim(c1, w)?;
    w.require_positive_definite()?;
    let f = trace_ratio(c1, w)? / w.n() as f64;
    let eta = c1.sub(&w.scale(f))?;
    Ok(PrimitiveSplit { eta, f })
}

fn check_primitive(eta: &Kaehler11, w: &Kaehler11) -> Result<()> {
    if w.n() < 2 {
        return Err(Error::OutOfRange {
            what: "n",
            value: w.n(),
            min: 2,
            max: usize::MAX,
        });
    }
    let trace = trace_ratio(eta, w)?;
    let tol = PRIMITIVE_TOL * (1.0 + eta.max_abs());
    if trace.abs() > tol {
        return Err(Error::NotPrimitive { trace, tol });
    }
    Ok(())
}

/// `q = Σ_{j<k} α_j α_k` over the relative eigenvalues of a primitive `η`.
///
/// Equivalently `η² ∧ ω^{n-2} = (2!(n-2)!/n!) q ω^n`. For primitive `η` one
/// has `q <= 0` with equality iff `η = 0`.
pub fn primitive_square_ratio(eta: &Kaehler11, w: &Kaehler11) -> Result<f64> {
    check_primitive(eta, w)?;
    gamma_rel(eta, w, 2)
}

/// The same `q` recovered from the wedge `η² ∧ ω^{n-2}` against `ω^n`.
pub fn primitive_square_ratio_wedge(eta: &Kaehler11, w: &Kaehler11) -> Result<f64> {
    check_primitive(eta, w)?;
    let n = w.n();
    let omega = w.to_form();
    let top = wedge(
        &wedge(&eta.to_form(), &eta.to_form())?,
        &crate::exterior::power(&omega, n - 2),
    )?;
    let ratio = top_ratio(&top, &crate::exterior::power(&omega, n))?.re;
    // divide out 2!(n-2)!/n! = 2 / (n (n-1))
    Ok(ratio * (n * (n - 1)) as f64 / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn congruence(g: &DMatrix<Complex64>, u: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        u.adjoint() * g * u
    }

    fn binom(n: usize, k: usize) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn eigenvalue_examples() {
        let w = Kaehler11::random_positive(3, 1);
        let e = relative_eigenvalues(&w, &w).unwrap();
        assert!(e.iter().all(|x| close(*x, 1.0, 1e-12)));
        let e = relative_eigenvalues(&Kaehler11::zero(3), &w).unwrap();
        assert!(e.iter().all(|x| x.abs() < 1e-15));
        let e = relative_eigenvalues(&Kaehler11::diagonal(&[3.0, 2.0]), &Kaehler11::euclidean(2)).unwrap();
        assert!(close(e[0], 2.0, 1e-14) && close(e[1], 3.0, 1e-14));
        assert_eq!(
            relative_eigenvalues(&w, &Kaehler11::diagonal(&[1.0, 0.0, 1.0])),
            Err(Error::NotPositiveDefinite)
        );
    }

    #[test]
    fn eigenpairs_have_small_residual() {
        // ‖A v - α G v‖ small for the reduced eigenvectors
        let a = Kaehler11::random(4, 3);
        let w = Kaehler11::random_positive(4, 4);
        let l = w.matrix().clone().cholesky().unwrap().l();
        let linv = l.clone().try_inverse().unwrap();
        let c = &linv * a.matrix() * linv.adjoint();
        let eig = c.symmetric_eigen();
        for (i, alpha) in eig.eigenvalues.iter().enumerate() {
            let y = eig.eigenvectors.column(i).into_owned();
            let v = linv.adjoint() * y;
            let res = a.matrix() * &v - w.matrix() * &v * Complex64::new(*alpha, 0.0);
            assert!(res.norm() < 1e-12);
        }
    }

    #[test]
    fn gamma_examples() {
        let w = Kaehler11::random_positive(4, 2);
        for k in 0..=4 {
            assert!(close(gamma_rel(&w, &w, k).unwrap(), binom(4, k), 1e-10));
        }
        let a = Kaehler11::random(4, 5);
        assert!(close(gamma_rel(&a, &w, 1).unwrap(), trace_ratio(&a, &w).unwrap(), 1e-12));
        assert!(gamma_rel(&a, &w, 5).is_err());
    }

    #[test]
    fn gamma_matches_wedge_identity() {
        for n in 1..=4 {
            for seed in 0..50u64 {
                let a = Kaehler11::random(n, seed);
                let w = Kaehler11::random_positive(n, 1000 + seed);
                for k in 0..=n {
                    let g = gamma_rel(&a, &w, k).unwrap();
                    let t = gamma_rel_wedge(&a, &w, k).unwrap();
                    assert!(close(g, t, 1e-9), "n={n} seed={seed} k={k}: {g} vs {t}");
                }
            }
        }
    }

    #[test]
    fn primitive_split_examples() {
        let w = Kaehler11::random_positive(3, 7);
        let (lambda, r, n) = (0.9, 2.0, 3.0);
        let c1 = w.scale(lambda * r / n);
        let s = primitive_split(&c1, &w).unwrap();
        assert!(s.eta.max_abs() < 1e-12 && close(s.f, lambda * r / n, 1e-12));

        let eta = primitive_split(&Kaehler11::random(3, 2), &w).unwrap().eta;
        let again = primitive_split(&eta, &w).unwrap();
        assert!(again.eta.max_abs_diff(&eta).unwrap() < 1e-12 && again.f.abs() < 1e-12);

        let w1 = Kaehler11::diagonal(&[2.5]);
        let s = primitive_split(&Kaehler11::diagonal(&[-4.0]), &w1).unwrap();
        assert!(s.eta.max_abs() < 1e-15);
    }

    #[test]
    fn primitive_square_examples() {
        let w = Kaehler11::euclidean(2);
        assert_eq!(primitive_square_ratio(&Kaehler11::zero(2), &w).unwrap(), 0.0);
        let eta = Kaehler11::diagonal(&[1.0, -1.0]);
        assert!(close(primitive_square_ratio(&eta, &w).unwrap(), -1.0, 1e-14));
        assert!(close(primitive_square_ratio_wedge(&eta, &w).unwrap(), -1.0, 1e-14));
        assert!(matches!(
            primitive_square_ratio(&Kaehler11::diagonal(&[1.0, 0.0]), &w),
            Err(Error::NotPrimitive { .. })
        ));
        assert!(primitive_square_ratio(&Kaehler11::zero(1), &Kaehler11::euclidean(1)).is_err());
    }

    #[test]
    fn primitive_square_near_zero() {
        let w = Kaehler11::random_positive(3, 9);
        let eta = primitive_split(&Kaehler11::random(3, 4), &w).unwrap().eta.scale(1e-8);
        let q = primitive_square_ratio(&eta, &w).unwrap();
        assert!(q < 0.0 && q > -1e-12);
        let q0 = primitive_square_ratio(&Kaehler11::zero(3), &w).unwrap();
        assert_eq!(q0, 0.0);
    }

    #[test]
    fn congruence_preserves_eigenvalues() {
        let a = Kaehler11::random(3, 1);
        let w = Kaehler11::random_positive(3, 2);
        let (q, _) = Kaehler11::random(3, 3).matrix().clone().qr().unpack();
        let a2 = Kaehler11::hermitian_part(&congruence(a.matrix(), &q));
        let w2 = Kaehler11::hermitian_part(&congruence(w.matrix(), &q));
        let e1 = relative_eigenvalues(&a, &w).unwrap();
        let e2 = relative_eigenvalues(&a2, &w2).unwrap();
        for (x, y) in e1.iter().zip(&e2) {
            assert!(close(*x, *y, 1e-12));
        }
    }

    proptest! {
        #[test]
        fn primitive_square_is_nonpositive(n in 2usize..=5, seed in 0u64..10_000) {
            let w = Kaehler11::random_positive(n, seed);
            let eta = primitive_split(&Kaehler11::random(n, seed + 1), &w).unwrap().eta;
            let q = primitive_square_ratio(&eta, &w).unwrap();
            prop_assert!(q <= 1e-12);
            let q2 = primitive_square_ratio_wedge(&eta, &w).unwrap();
            prop_assert!((q - q2).abs() <= 1e-10 * (1.0 + q.abs()));
        }

        #[test]
        fn eigenvalues_scale_inversely(n in 1usize..=4, seed in 0u64..10_000, t in 0.1f64..10.0) {
            let a = Kaehler11::random(n, seed);
            let w = Kaehler11::random_positive(n, seed + 7);
            let e = relative_eigenvalues(&a, &w).unwrap();
            let et = relative_eigenvalues(&a, &w.scale(t)).unwrap();
            for (x, y) in e.iter().zip(&et) {
                prop_assert!((x / t - y).abs() <= 1e-10 * (1.0 + x.abs()));
            }
        }
    }
}
