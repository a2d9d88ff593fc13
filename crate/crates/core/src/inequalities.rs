//! Pointwise Kobayashi–Lübke type inequalities for Hermite–Einstein curvature.
//!
//! Every scalar is a ratio of a top-degree form against `ω^n` at the point.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use crate::curvature::{
    chern_forms, direction_form, flatness_detectors, is_hermite_einstein, require_hermite_einstein,
    CurvatureTensor, Kaehler11,
};
use crate::error::{Error, Result};
use crate::exterior::{divided_power, power, top_ratio, wedge, Form};
use crate::kahler::{gamma_rel, primitive_split, primitive_square_ratio};
use crate::symfun::elem_sym;

/// Absolute tolerance on inequality margins.
pub const MARGIN_TOL: f64 = 1e-10;
/// Tolerance for equality-case detection.
pub const EQUALITY_TOL: f64 = 1e-8;

fn require_surface_or_higher(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::OutOfRange {
            what: "n",
            value: n,
            min: 2,
            max: usize::MAX,
        });
    }
    Ok(())
}

fn check_base(t: &CurvatureTensor, w: &Kaehler11) -> Result<()> {
    if t.n() != w.n() {
        return Err(Error::DimensionMismatch {
            left: t.n(),
            right: w.n(),
        });
    }
    w.require_positive_definite()
}

/// `top_ratio(a ∧ ω^{n-deg}, ω^n)` for a (deg,deg)-form `a`.
fn ratio_against(a: &Form, w: &Kaehler11) -> Result<f64> {
    let n = w.n();
    let omega = w.to_form();
    let (deg, _) = a.bidegree();
    let top = wedge(a, &power(&omega, n - deg))?;
    Ok(top_ratio(&top, &power(&omega, n))?.re)
}

/// Pointwise Chern numbers against `ω^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChernRatios {
    /// `c_1 ∧ ω^{n-1}`.
    pub c1: f64,
    /// `c_1² ∧ ω^{n-2}`.
    pub c1_sq: f64,
    /// `c_2 ∧ ω^{n-2}`.
    pub c2: f64,
}

pub fn chern_ratios(t: &CurvatureTensor, w: &Kaehler11) -> Result<ChernRatios> {
    check_base(t, w)?;
    require_surface_or_higher(t.n())?;
    let c = chern_forms(t);
    let c1 = c.get(1);
    Ok(ChernRatios {
        c1: ratio_against(&c1, w)?,
        c1_sq: ratio_against(&wedge(&c1, &c1)?, w)?,
        c2: ratio_against(&c.get(2), w)?,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct KlResult {
    /// `((r-1) c_1² − 2r c_2) ∧ ω^{n-2}` against `ω^n`; nonpositive.
    pub q: f64,
    pub equality: bool,
    pub lambda: f64,
}

/// Classical Kobayashi–Lübke quantity for Hermite–Einstein input.
pub fn kl_classical(t: &CurvatureTensor, w: &Kaehler11, he_tol: f64) -> Result<KlResult> {
    check_base(t, w)?;
    require_surface_or_higher(t.n())?;
    let lambda = require_hermite_einstein(t, w, he_tol)?;
    let r = t.r() as f64;
    let c = chern_ratios(t, w)?;
    let q = (r - 1.0) * c.c1_sq - 2.0 * r * c.c2;
    Ok(KlResult {
        q,
        equality: q.abs() <= EQUALITY_TOL,
        lambda,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Thm12Result {
    /// `s_2 ∧ ω^{n-2}` against `ω^n`.
    pub lhs: f64,
    /// `λ (r+1)/(2n) c_1 ∧ ω^{n-1}` against `ω^n`.
    pub rhs_trace: f64,
    /// `λ² r(r+1)/(2n²)`.
    pub rhs: f64,
    /// `rhs − lhs`, nonnegative.
    pub margin: f64,
    pub equality: bool,
    pub lambda: f64,
}

/// The sharpened Segre inequality in both of its equivalent right-hand forms.
pub fn thm12(t: &CurvatureTensor, w: &Kaehler11, he_tol: f64) -> Result<Thm12Result> {
    check_base(t, w)?;
    require_surface_or_higher(t.n())?;
    let lambda = require_hermite_einstein(t, w, he_tol)?;
    let n = t.n() as f64;
    let r = t.r() as f64;
    let c = chern_ratios(t, w)?;
    let lhs = c.c1_sq - c.c2;
    let rhs_trace = lambda * (r + 1.0) / (2.0 * n) * c.c1;
    let rhs = lambda * lambda * r * (r + 1.0) / (2.0 * n * n);
    let strong = flatness_detectors(t, w, EQUALITY_TOL)?.strong_flat;
    Ok(Thm12Result {
        lhs,
        rhs_trace,
        rhs,
        margin: rhs - lhs,
        equality: strong,
        lambda,
    })
}

/// Curvature of `E* ⊗ E` (rank `r²`, frame index `a r + b` for `e^a ⊗ e_b`):
/// the endomorphism `−Θ̂ᵀ ⊗ Id + Id ⊗ Θ̂`.
pub fn dual_tensor(t: &CurvatureTensor) -> CurvatureTensor {
    let r = t.r();
    let zero = Complex64::new(0.0, 0.0);
    CurvatureTensor::from_fn(t.n(), r * r, |j, k, l, mu| {
        let (a, b) = (l / r, l % r);
        let (a2, b2) = (mu / r, mu % r);
        let mut v = zero;
        if b == b2 {
            v -= t.get(j, k, a2, a);
        }
        if a == a2 {
            v += t.get(j, k, b, b2);
        }
        v
    })
}

/// Independent route to the margin of [`thm12`] through `c_1 = η + f ω`.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivationPath {
    pub eta: Kaehler11,
    pub f: f64,
    /// `max |η ∧ ω^{n-1}/(n-1)!|` over coefficients.
    pub eta_residual: f64,
    /// `η² ∧ ω^{n-2}` against `ω^n`.
    pub eta_sq: f64,
    /// The classical quantity of [`kl_classical`].
    pub q: f64,
    /// `−(r+1)/(2r) η_sq − q/(2r)`.
    pub margin: f64,
}

pub fn thm12_via_primitive(t: &CurvatureTensor, w: &Kaehler11, he_tol: f64) -> Result<DerivationPath> {
    let kl = kl_classical(t, w, he_tol)?;
    let n = t.n();
    let r = t.r() as f64;
    let split = primitive_split(&t.trace(), w)?;
    let omega = w.to_form();
    let eta_residual = wedge(&split.eta.to_form(), &divided_power(&omega, n - 1))?.max_abs();
    let gamma2 = primitive_square_ratio(&split.eta, w)?;
    let eta_sq = 2.0 / (n * (n - 1)) as f64 * gamma2;
    let margin = -(r + 1.0) / (2.0 * r) * eta_sq - kl.q / (2.0 * r);
    Ok(DerivationPath {
        eta: split.eta,
        f: split.f,
        eta_residual,
        eta_sq,
        q: kl.q,
        margin,
    })
}

fn lemma34_point(x: &[f64], c: f64) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::OutOfRange {
            what: "n",
            value: 1,
            min: 2,
            max: usize::MAX,
        });
    }
    let n = (x.len() + 1) as f64;
    let base = c / n;
    let mut y: Vec<f64> = x.iter().map(|xi| xi + base).collect();
    // C − Σ(x_i + C/n), written so that x = 0 lands exactly on C/n
    y.push(base - x.iter().sum::<f64>());
    Ok(y)
}

/// `γ_2(x + C/n, C − Σ(x_i + C/n)) − γ_2(C/n, ..., C/n)` by direct evaluation;
/// `n = x.len() + 1`.
pub fn lemma34_gap(x: &[f64], c: f64) -> Result<f64> {
    let y = lemma34_point(x, c)?;
    let center = vec![c / y.len() as f64; y.len()];
    Ok(elem_sym(&y, 2)? - elem_sym(&center, 2)?)
}

/// `−½(Σx)² − ½Σx²`.
pub fn lemma34_gap_closed(x: &[f64]) -> f64 {
    let s: f64 = x.iter().sum();
    let s2: f64 = x.iter().map(|v| v * v).sum();
    -0.5 * s * s - 0.5 * s2
}

/// `max γ_2 = C(n,2) C²/n²` on the hyperplane `Σ y = C`.
pub fn lemma34_max(n: usize, c: f64) -> f64 {
    (n * (n - 1)) as f64 / 2.0 * c * c / (n * n) as f64
}

/// `γ_2` of exact rationals.
pub fn gamma2_exact(values: &[BigRational]) -> BigRational {
    let mut s = BigRational::zero();
    let mut acc = BigRational::zero();
    for v in values {
        acc += &s * v;
        s += v;
    }
    acc
}

/// `C(n,2) C²/n²` as an exact rational, for `C` exactly representable.
pub fn lemma34_max_exact(n: usize, c: &BigRational) -> BigRational {
    let pairs = BigRational::from_integer(BigInt::from(n * (n - 1) / 2));
    let nn = BigRational::from_integer(BigInt::from(n * n));
    pairs * c * c / nn
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gamma2Bound {
    /// `γ_2(ϑ(v)/ω)`.
    pub gamma2: f64,
    /// `(n-1) λ² / (2n)`.
    pub bound: f64,
    /// `ϑ(v) = (λ/n) ω` within [`EQUALITY_TOL`].
    pub equality: bool,
}

pub fn gamma2_bound(
    t: &CurvatureTensor,
    w: &Kaehler11,
    v: &[Complex64],
    he_tol: f64,
) -> Result<Gamma2Bound> {
    check_base(t, w)?;
    require_surface_or_higher(t.n())?;
    let lambda = require_hermite_einstein(t, w, he_tol)?;
    let n = t.n() as f64;
    let theta = direction_form(t, v)?;
    let gamma2 = gamma_rel(&theta, w, 2)?;
    let deviation = theta.max_abs_diff(&w.scale(lambda / n))?;
    Ok(Gamma2Bound {
        gamma2,
        bound: (n - 1.0) * lambda * lambda / (2.0 * n),
        equality: deviation <= EQUALITY_TOL,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Remark41 {
    /// `c_1² ∧ ω^{n-2}` against `ω^n`.
    pub lhs: f64,
    /// `(λ r/n)²`.
    pub rhs: f64,
    pub holds: bool,
}

/// The `c_1²` bound for projectively flat Hermite–Einstein curvature.
pub fn remark41_bound(t: &CurvatureTensor, w: &Kaehler11, tol: f64) -> Result<Remark41> {
    check_base(t, w)?;
    require_surface_or_higher(t.n())?;
    let lambda = require_hermite_einstein(t, w, tol)?;
    let flat = flatness_detectors(t, w, tol)?;
    if !flat.projectively_flat {
        return Err(Error::NotProjectivelyFlat {
            deviation: flat.projective_deviation,
            tol,
        });
    }
    let c = chern_ratios(t, w)?;
    let rhs = (lambda * t.r() as f64 / t.n() as f64).powi(2);
    Ok(Remark41 {
        lhs: c.c1_sq,
        rhs,
        holds: c.c1_sq <= rhs + MARGIN_TOL,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stronger {
    Classical,
    Eq4,
    Equal,
}

impl Stronger {
    pub fn as_str(self) -> &'static str {
        match self {
            Stronger::Classical => "classical",
            Stronger::Eq4 => "segre",
            Stronger::Equal => "equal",
        }
    }
}

pub const SURFACE_CAVEAT: &str = "pointwise analogue: ratios against omega^2 at a single point; \
    normalizing the total mass of omega is the caller's responsibility";

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceComparison {
    pub c1_sq: f64,
    pub c2: f64,
    pub lambda: f64,
    pub hermite_einstein: bool,
    /// `2r/(r-1) c_2`.
    pub classical_rhs: f64,
    /// `c_2 + λ² r(r+1)/8`.
    pub eq4_rhs: f64,
    /// The bound with the smaller right-hand side.
    pub stronger: Stronger,
    /// `c_2 > (r-1)/(2r) (c_1·ω)²`, the condition for the Segre bound to win.
    pub condition11: bool,
    pub caveat: &'static str,
}

/// Compares the two upper bounds on `c_1²` on a surface (`n = 2`).
pub fn surface_compare(t: &CurvatureTensor, w: &Kaehler11, he_tol: f64) -> Result<SurfaceComparison> {
    check_base(t, w)?;
    if t.n() != 2 {
        return Err(Error::OutOfRange {
            what: "n",
            value: t.n(),
            min: 2,
            max: 2,
        });
    }
    if t.r() < 2 {
        return Err(Error::OutOfRange {
            what: "r",
            value: t.r(),
            min: 2,
            max: usize::MAX,
        });
    }
    let he = is_hermite_einstein(t, w, he_tol)?;
    let r = t.r() as f64;
    let c = chern_ratios(t, w)?;
    let lambda = he.lambda;
    let classical_rhs = 2.0 * r / (r - 1.0) * c.c2;
    let eq4_rhs = c.c2 + lambda * lambda * r * (r + 1.0) / 8.0;
    let stronger = if (classical_rhs - eq4_rhs).abs() <= EQUALITY_TOL {
        Stronger::Equal
    } else if eq4_rhs < classical_rhs {
        Stronger::Eq4
    } else {
        Stronger::Classical
    };
    let c1_omega = lambda * r / 2.0;
    Ok(SurfaceComparison {
        c1_sq: c.c1_sq,
        c2: c.c2,
        lambda,
        hermite_einstein: he.hermite_einstein,
        classical_rhs,
        eq4_rhs,
        stronger,
        condition11: c.c2 > (r - 1.0) / (2.0 * r) * c1_omega * c1_omega,
        caveat: SURFACE_CAVEAT,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{project_to_he, random_curvature, segre_forms, DEFAULT_HE_TOL};
    use crate::sampling::{complex_normal, rng_for};
    use proptest::prelude::*;

    fn he_instance(n: usize, r: usize, seed: u64, lambda: f64) -> (CurvatureTensor, Kaehler11) {
        let w = Kaehler11::random_positive(n, seed + 1000);
        let t = project_to_he(&random_curvature(n, r, seed), &w, lambda).unwrap();
        (t, w)
    }

    fn strong_flat(n: usize, r: usize, w: &Kaehler11, lambda: f64) -> CurvatureTensor {
        CurvatureTensor::scalar(&w.scale(lambda / n as f64), r)
    }

    /// `(1/r) c_1 ⊗ Id` with `c_1 = η + (λ r/n) ω`, `η` primitive.
    fn projectively_flat(n: usize, r: usize, w: &Kaehler11, lambda: f64, seed: u64) -> CurvatureTensor {
        let beta = Kaehler11::random(n, seed);
        let eta = primitive_split(&beta, w).unwrap().eta;
        let c1 = eta.add(&w.scale(lambda * r as f64 / n as f64)).unwrap();
        CurvatureTensor::scalar(&c1.scale(1.0 / r as f64), r)
    }

    fn binom(n: usize, k: usize) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn kl_examples() {
        for seed in 0..10 {
            let (t, w) = he_instance(2 + seed as usize % 2, 2 + seed as usize % 3, seed, 0.7);
            let kl = kl_classical(&t, &w, DEFAULT_HE_TOL).unwrap();
            assert!(kl.q < -1e-6, "{kl:?}");
            assert!(!kl.equality);
        }
        let w = Kaehler11::random_positive(3, 5);
        let flat = projectively_flat(3, 3, &w, 1.2, 6);
        let kl = kl_classical(&flat, &w, DEFAULT_HE_TOL).unwrap();
        assert!(kl.q.abs() <= 1e-10 && kl.equality);
        assert!(flatness_detectors(&flat, &w, EQUALITY_TOL).unwrap().projectively_flat);

        let raw = random_curvature(2, 2, 1);
        let w2 = Kaehler11::euclidean(2);
        assert!(matches!(
            kl_classical(&raw, &w2, DEFAULT_HE_TOL),
            Err(Error::NotHermiteEinstein { .. })
        ));
        let (t1, w1) = he_instance(1, 2, 0, 1.0);
        assert!(kl_classical(&t1, &w1, DEFAULT_HE_TOL).is_err());
    }

    #[test]
    fn dual_tensor_reduces_to_kl() {
        for seed in 0..5 {
            let (t, w) = he_instance(2 + seed as usize % 2, 2 + seed as usize % 2, seed, 0.9);
            let d = dual_tensor(&t);
            assert!(d.hermitian_deviation() < 1e-12);
            let kl = kl_classical(&t, &w, DEFAULT_HE_TOL).unwrap();
            let th = thm12(&d, &w, DEFAULT_HE_TOL).unwrap();
            assert!(th.lambda.abs() < 1e-10);
            assert!((th.lhs - kl.q).abs() <= 1e-9, "{} vs {}", th.lhs, kl.q);
            // c_1(E*⊗E) = 0 and c_2(E*⊗E) = 2r c_2 − (r−1) c_1²
            let cd = chern_ratios(&d, &w).unwrap();
            assert!(cd.c1.abs() < 1e-10);
            assert!((cd.c2 + kl.q).abs() < 1e-9);
        }
    }

    #[test]
    fn thm12_strong_flat_equality() {
        for (n, r) in [(2, 2), (2, 3), (3, 2), (3, 4)] {
            let w = Kaehler11::random_positive(n, (n * r) as u64);
            let lambda = 1.3;
            let t = strong_flat(n, r, &w, lambda);
            // closed form from c_k = C(r,k)(λω/n)^k: s_2 = (r² − C(r,2)) (λ/n)² ω²
            let c = segre_forms(&chern_forms(&t), n).unwrap();
            let expect = (r as f64 * r as f64 - binom(r, 2)) * (lambda / n as f64).powi(2);
            assert!((ratio_against(&c[2], &w).unwrap() - expect).abs() < 1e-12);
            let res = thm12(&t, &w, DEFAULT_HE_TOL).unwrap();
            let closed = (r * (r + 1)) as f64 * lambda * lambda / (2 * n * n) as f64;
            assert!((res.lhs - closed).abs() < 1e-12);
            assert!((res.rhs - closed).abs() < 1e-12);
            assert!(res.margin.abs() <= 1e-10 && res.equality);
            let kl = kl_classical(&t, &w, DEFAULT_HE_TOL).unwrap();
            assert!(kl.equality);
        }
    }

    #[test]
    fn thm12_general_cases() {
        for seed in 0..10 {
            let (t, w) = he_instance(3, 2, seed, 0.5 + seed as f64 * 0.1);
            let res = thm12(&t, &w, DEFAULT_HE_TOL).unwrap();
            assert!(res.margin > 0.0 && !res.equality);
            assert!((res.rhs - res.rhs_trace).abs() <= 1e-10);
        }
        let (t, w) = he_instance(2, 3, 4, 0.0);
        let res = thm12(&t, &w, DEFAULT_HE_TOL).unwrap();
        assert!(res.rhs.abs() < 1e-20);
        assert!(res.lhs <= 1e-10, "{res:?}");
    }

    #[test]
    fn projectively_flat_is_not_strong_flat() {
        let w = Kaehler11::random_positive(2, 8);
        let t = projectively_flat(2, 2, &w, 1.0, 9);
        let th = thm12(&t, &w, DEFAULT_HE_TOL).unwrap();
        let kl = kl_classical(&t, &w, DEFAULT_HE_TOL).unwrap();
        assert!(kl.equality && !th.equality);
        assert!(th.margin > 1e-6);
    }

    #[test]
    fn derivation_path_matches() {
        for seed in 0..10 {
            let n = 2 + seed as usize % 2;
            let r = 2 + seed as usize % 3;
            let lambda = 0.4 * seed as f64 - 1.0;
            let (t, w) = he_instance(n, r, seed, lambda);
            let path = thm12_via_primitive(&t, &w, DEFAULT_HE_TOL).unwrap();
            let th = thm12(&t, &w, DEFAULT_HE_TOL).unwrap();
            assert!(path.eta_residual <= 1e-10);
            assert!((path.f - lambda * r as f64 / n as f64).abs() <= 1e-10);
            assert!((path.margin - th.margin).abs() <= 1e-9);
            assert!(path.eta_sq <= 1e-12);
        }
    }

    #[test]
    fn lemma34_examples() {
        assert_eq!(lemma34_gap(&[0.0, 0.0], 3.0).unwrap(), 0.0);
        assert!((lemma34_gap(&[1.0], 0.0).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(lemma34_gap_closed(&[1.0]), -1.0);
        assert!(lemma34_gap(&[], 1.0).is_err());
        assert!((lemma34_max(3, 3.0) - 3.0).abs() < 1e-15);
        let c = BigRational::from_float(0.7).unwrap();
        let n = 5;
        let center = vec![&c / BigRational::from_integer(BigInt::from(n)); n];
        assert_eq!(gamma2_exact(&center), lemma34_max_exact(n, &c));
    }

    proptest! {
        #[test]
        fn lemma34_gap_is_closed_form(x in proptest::collection::vec(-3.0f64..3.0, 1..=5), c in -5.0f64..5.0) {
            let gap = lemma34_gap(&x, c).unwrap();
            prop_assert!((gap - lemma34_gap_closed(&x)).abs() <= 1e-12 * (1.0 + c * c));
            prop_assert!(gap <= 1e-12 * (1.0 + c * c));
        }

        #[test]
        fn scaling_omega_keeps_verdicts(seed in 0u64..200, s in 0.2f64..5.0) {
            let (t, w) = he_instance(2, 2, seed, 0.8);
            let ws = w.scale(s);
            let a = thm12(&t, &w, DEFAULT_HE_TOL).unwrap();
            let b = thm12(&t, &ws, DEFAULT_HE_TOL * s.max(1.0)).unwrap();
            prop_assert!((b.lambda - a.lambda / s).abs() <= 1e-10);
            prop_assert_eq!(a.margin >= -MARGIN_TOL, b.margin >= -MARGIN_TOL);
            prop_assert_eq!(a.equality, b.equality);
            prop_assert!((b.margin - a.margin / (s * s)).abs() <= 1e-9);
        }
    }

    #[test]
    fn gamma2_bound_cases() {
        let w = Kaehler11::random_positive(3, 2);
        let flat = strong_flat(3, 2, &w, 1.1);
        let mut rng = rng_for(5, 9);
        let v: Vec<Complex64> = (0..2).map(|_| complex_normal(&mut rng)).collect();
        let b = gamma2_bound(&flat, &w, &v, DEFAULT_HE_TOL).unwrap();
        assert!((b.gamma2 - b.bound).abs() < 1e-12 && b.equality);

        let (t, w) = he_instance(3, 3, 11, 1.0);
        for _ in 0..50 {
            let v: Vec<Complex64> = (0..3).map(|_| complex_normal(&mut rng)).collect();
            let b = gamma2_bound(&t, &w, &v, DEFAULT_HE_TOL).unwrap();
            assert!(b.gamma2 < b.bound && !b.equality);
        }
        let (t, w) = he_instance(2, 2, 12, 0.0);
        let b = gamma2_bound(&t, &w, &v[..2], DEFAULT_HE_TOL).unwrap();
        assert!(b.bound.abs() < 1e-20);
        assert!(b.gamma2 <= 1e-12);
    }

    #[test]
    fn remark41_cases() {
        let w = Kaehler11::random_positive(2, 3);
        let exact = strong_flat(2, 3, &w, 0.9);
        let res = remark41_bound(&exact, &w, DEFAULT_HE_TOL).unwrap();
        assert!((res.lhs - res.rhs).abs() < 1e-12 && res.holds);

        // n = 2, η with relative eigenvalues (a, −a): lhs − rhs = 2 γ_2 / 2 = −a²
        let a = 0.35;
        let eta = Kaehler11::diagonal(&[a, -a]);
        let lambda = 0.5;
        let w = Kaehler11::euclidean(2);
        let c1 = eta.add(&w.scale(lambda * 2.0 / 2.0)).unwrap();
        let t = CurvatureTensor::scalar(&c1.scale(0.5), 2);
        let res = remark41_bound(&t, &w, DEFAULT_HE_TOL).unwrap();
        assert!((res.lhs - res.rhs + a * a).abs() < 1e-12);
        assert!(res.holds);

        let (t, w) = he_instance(2, 2, 1, 1.0);
        assert!(matches!(
            remark41_bound(&t, &w, DEFAULT_HE_TOL),
            Err(Error::NotProjectivelyFlat { .. })
        ));
    }

    #[test]
    fn surface_cases() {
        let w = Kaehler11::euclidean(2);
        let lambda = 1.0;
        let t = strong_flat(2, 2, &w, lambda);
        let s = surface_compare(&t, &w, DEFAULT_HE_TOL).unwrap();
        // c_1 = λω and c_2 = (λ/2)² ω²: all three quantities meet at λ²
        assert!((s.c1_sq - 1.0).abs() < 1e-12);
        assert!((s.c2 - 0.25).abs() < 1e-12);
        assert!((s.classical_rhs - 1.0).abs() < 1e-12);
        assert!((s.eq4_rhs - 1.0).abs() < 1e-12);
        assert_eq!(s.stronger, Stronger::Equal);
        assert!(!s.condition11);

        // condition11 decides which bound is smaller
        for seed in 0..10 {
            let (t, w) = he_instance(2, 2 + seed as usize % 3, seed, 0.3 * seed as f64);
            let s = surface_compare(&t, &w, DEFAULT_HE_TOL).unwrap();
            if s.stronger != Stronger::Equal {
                assert_eq!(s.condition11, s.stronger == Stronger::Eq4);
            }
            assert!(s.c1_sq <= s.eq4_rhs + 1e-10);
        }

        let (t0, w0) = he_instance(2, 2, 3, 0.0);
        let s = surface_compare(&t0, &w0, DEFAULT_HE_TOL).unwrap();
        assert!((s.eq4_rhs - s.c2).abs() < 1e-15);
        assert!(s.c1_sq <= s.eq4_rhs + 1e-10);

        let (t3, w3) = he_instance(3, 2, 3, 1.0);
        assert!(surface_compare(&t3, &w3, DEFAULT_HE_TOL).is_err());
        let (t1, w1) = he_instance(2, 1, 3, 1.0);
        assert!(surface_compare(&t1, &w1, DEFAULT_HE_TOL).is_err());
    }
}
