//! The projectivized bundle `P(E)` over a point: the curvature form `Ξ` of
//! `O_E(1)` at a fiber point, fiber integrals of its powers, and the
//! top-degree identities relating `Ξ` to the directional form.
//!
//! Everything is evaluated at the center of an adapted chart. For a fiber
//! direction `v` the tensor is rotated into a unitary frame whose last vector
//! is `v/‖v‖`; in coordinates `(z_1..z_n, ξ_1..ξ_{r-1})` on `C^{n+r-1}`,
//!
//! ```text
//! Ξ = (1/2π) Σ_λ i dξ_λ ∧ dξ̄_λ − ϑ(v),
//! ```
//!
//! with no mixed terms. The vertical part is the Fubini–Study form of unit
//! fiber mass.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::curvature::{direction_form, require_hermite_einstein, CurvatureTensor, Kaehler11};
use crate::error::{Error, Result};
use crate::exterior::{block_embed, divided_power, power, wedge, Form, Key, MultiIndex};
use crate::kahler::gamma_rel;
use crate::moments::{phi_k_tensor, sphere_mc};
use crate::sampling::{rng_for, unit_sphere};

/// A fiber point `[v]` together with the unitary frame adapted to it.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberPointFrame {
    tensor: CurvatureTensor,
    direction: Vec<Complex64>,
    unitary: DMatrix<Complex64>,
    rotated: CurvatureTensor,
}

/// Unitary `U` with last column `v` (unit). The other columns come from
/// Gram–Schmidt on the standard basis, skipping the coordinate where `v` is
/// largest, so `v = e_r` gives `U = Id`.
fn adapted_unitary(v: &[Complex64]) -> DMatrix<Complex64> {
    let r = v.len();
    let pivot = (0..r)
        .max_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm()))
        .unwrap_or(0);
    let mut basis: Vec<Vec<Complex64>> = vec![v.to_vec()];
    for i in (0..r).filter(|&i| i != pivot) {
        let mut e = vec![Complex64::new(0.0, 0.0); r];
        e[i] = Complex64::new(1.0, 0.0);
        // two passes of classical Gram–Schmidt for stability
        for _ in 0..2 {
            for b in &basis {
                let proj: Complex64 = b.iter().zip(&e).map(|(x, y)| x.conj() * y).sum();
                for (y, x) in e.iter_mut().zip(b) {
                    *y -= proj * x;
                }
            }
        }
        let norm = e.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        basis.push(e.into_iter().map(|c| c / norm).collect());
    }
    let mut u = DMatrix::zeros(r, r);
    for (col, b) in basis[1..].iter().chain(std::iter::once(&basis[0])).enumerate() {
        for (row, &x) in b.iter().enumerate() {
            u[(row, col)] = x;
        }
    }
    u
}

impl FiberPointFrame {
    pub fn new(t: &CurvatureTensor, v: &[Complex64]) -> Result<Self> {
        if v.len() != t.r() {
            return Err(Error::DimensionMismatch {
                left: v.len(),
                right: t.r(),
            });
        }
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        let direction: Vec<Complex64> = v.iter().map(|c| c / norm).collect();
        let unitary = adapted_unitary(&direction);
        let rotated = t.rotated(&unitary)?;
        Ok(FiberPointFrame {
            tensor: t.clone(),
            direction,
            unitary,
            rotated,
        })
    }

    pub fn tensor(&self) -> &CurvatureTensor {
        &self.tensor
    }

    /// The unit representative of `[v]`.
    pub fn direction(&self) -> &[Complex64] {
        &self.direction
    }

    pub fn unitary(&self) -> &DMatrix<Complex64> {
        &self.unitary
    }

    pub fn rotated(&self) -> &CurvatureTensor {
        &self.rotated
    }

    /// `ϑ(v)`, read off the rotated tensor at the last frame vector.
    pub fn direction_form(&self) -> Kaehler11 {
        let r = self.rotated.r();
        Kaehler11::hermitian_part(&self.rotated.entry_matrix(r - 1, r - 1))
    }

    /// Dimension `n + r - 1` of the chart on `P(E)`.
    pub fn total_dim(&self) -> usize {
        self.tensor.n() + self.tensor.r() - 1
    }
}

/// `ω^FS` at the chart center of `P^{r-1}`, on coordinates `0..r-1`.
fn fubini_study(r: usize) -> Form {
    Form::from_hermitian_matrix(r - 1, |a, b| {
        if a == b {
            Complex64::new(1.0 / (2.0 * PI), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `Ξ` at the fiber point, a real (1,1)-form on `C^{n+r-1}`.
pub fn xi_at(fp: &FiberPointFrame) -> Form {
    let n = fp.tensor.n();
    let r = fp.tensor.r();
    let m = fp.total_dim();
    let horizontal = block_embed(&fp.direction_form().to_form(), 0, m).expect("fits");
    let vertical = block_embed(&fubini_study(r), n, m).expect("fits");
    vertical - horizontal
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Exact Wick moments.
    Exact,
    /// Sphere average of `ϑ(v)^k` over sampled directions.
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Pushforward {
    pub form: Form,
    /// Monte Carlo only: standard errors of the real and imaginary parts of
    /// each coefficient, stored as `re + i·im` on the same keys.
    pub stderr: Option<Form>,
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn subsets(n: usize, k: usize) -> Vec<MultiIndex> {
    (0u32..(1 << n))
        .filter(|b| b.count_ones() as usize == k)
        .map(MultiIndex::from_bits)
        .collect()
}

/// `π_*(Ξ^{r-1+k}) = (−1)^k C(r-1+k, k) E_v[ϑ(v)^k]`, a (k,k)-form on `C^n`.
pub fn pushforward_segre(t: &CurvatureTensor, k: usize, method: Method) -> Result<Pushforward> {
    let n = t.n();
    let r = t.r();
    if k > n {
        return Err(Error::OutOfRange {
            what: "k",
            value: k,
            min: 0,
            max: n,
        });
    }
    let factor = if k % 2 == 0 { 1.0 } else { -1.0 } * binom(r - 1 + k, k);
    match method {
        Method::Exact => Ok(Pushforward {
            form: phi_k_tensor(t, k).scale_real(factor),
            stderr: None,
        }),
        Method::MonteCarlo { samples, seed } => {
            let idx = subsets(n, k);
            let keys: Vec<Key> = idx
                .iter()
                .flat_map(|&i| idx.iter().map(move |&j| (i, j)))
                .collect();
            let slot: BTreeMap<Key, usize> = keys.iter().enumerate().map(|(s, &k)| (k, s)).collect();
            let mc = sphere_mc(r, samples.max(1), seed, 2 * keys.len(), |v, out| {
                let theta = direction_form(t, v).expect("unit vector").to_form();
                for (key, c) in power(&theta, k).terms() {
                    let s = slot[key];
                    out[2 * s] = c.re;
                    out[2 * s + 1] = c.im;
                }
            });
            let mut form = Form::zero(n, k, k);
            let mut stderr = Form::zero(n, k, k);
            for (s, &(i, j)) in keys.iter().enumerate() {
                form.add_term(i, j, Complex64::new(mc.mean[2 * s], mc.mean[2 * s + 1]) * factor);
                stderr.add_term(
                    i,
                    j,
                    Complex64::new(mc.stderr[2 * s], mc.stderr[2 * s + 1]) * factor.abs(),
                );
            }
            Ok(Pushforward {
                form,
                stderr: Some(stderr),
            })
        }
    }
}

struct TopForms {
    lhs: Form,
    rhs: Form,
}

/// `Ξ^{r-1+k}/(r-1+k)! ∧ Ω^{n-k}/(n-k)!` and `Ξ^{r-1}/(r-1)! ∧ Ω^n/n!`,
/// with `Ω` the pullback of `ω` to the chart.
fn top_forms(fp: &FiberPointFrame, w: &Kaehler11, k: usize) -> Result<TopForms> {
    let n = fp.tensor.n();
    let r = fp.tensor.r();
    let m = fp.total_dim();
    let xi = xi_at(fp);
    let omega = block_embed(&w.to_form(), 0, m)?;
    let lhs = wedge(&divided_power(&xi, r - 1 + k), &divided_power(&omega, n - k))?;
    let rhs = wedge(&divided_power(&xi, r - 1), &divided_power(&omega, n))?;
    Ok(TopForms { lhs, rhs })
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

/// Residual `max |LHS + λ_E · RHS|` of the Einstein-factor identity for
/// Hermite–Einstein input.
pub fn verify_identity_8(
    t: &CurvatureTensor,
    w: &Kaehler11,
    v: &[Complex64],
    he_tol: f64,
) -> Result<f64> {
    check_base(t, w)?;
    let lambda = require_hermite_einstein(t, w, he_tol)?;
    let fp = FiberPointFrame::new(t, v)?;
    let f = top_forms(&fp, w, 1)?;
    Ok((f.lhs + f.rhs.scale_real(lambda)).max_abs())
}

/// The same identity with `λ_E` replaced by `γ_1(ϑ(v)/ω)`; holds for any tensor.
pub fn verify_identity_8_general(t: &CurvatureTensor, w: &Kaehler11, v: &[Complex64]) -> Result<f64> {
    verify_identity_9(t, w, v, 1)
}

/// Residual `max |LHS − (−1)^k γ_k(ϑ(v)/ω) · RHS|` of the degree-k top-form
/// identity, `1 ≤ k ≤ n`.
pub fn verify_identity_9(t: &CurvatureTensor, w: &Kaehler11, v: &[Complex64], k: usize) -> Result<f64> {
    check_base(t, w)?;
    if k == 0 || k > t.n() {
        return Err(Error::OutOfRange {
            what: "k",
            value: k,
            min: 1,
            max: t.n(),
        });
    }
    let fp = FiberPointFrame::new(t, v)?;
    let gamma = gamma_rel(&fp.direction_form(), w, k)?;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let f = top_forms(&fp, w, k)?;
    Ok((f.lhs - f.rhs.scale_real(sign * gamma)).max_abs())
}

#[derive(Clone, Debug, PartialEq)]
pub struct GammaStats {
    pub k: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// `max - min`.
    pub spread: f64,
}

const PROFILE_STREAM: u64 = 0x6761_6d6d;

/// Distribution of `γ_k(ϑ(v)/ω)` over `samples` uniform directions.
pub fn gamma_profile(
    t: &CurvatureTensor,
    w: &Kaehler11,
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<GammaStats> {
    Ok(gamma_profiles(t, w, k, samples, seed)?.pop().expect("k >= 1"))
}

/// Profiles for every `1 ≤ k' ≤ ℓ` from one shared set of directions.
pub fn gamma_profiles(
    t: &CurvatureTensor,
    w: &Kaehler11,
    ell: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<GammaStats>> {
    check_base(t, w)?;
    if ell == 0 || ell > t.n() {
        return Err(Error::OutOfRange {
            what: "k",
            value: ell,
            min: 1,
            max: t.n(),
        });
    }
    let samples = samples.max(1);
    let mut rng = rng_for(seed, PROFILE_STREAM);
    let mut values = vec![Vec::with_capacity(samples); ell];
    for _ in 0..samples {
        let v = unit_sphere(&mut rng, t.r());
        let theta = direction_form(t, &v)?;
        let eig = crate::kahler::relative_eigenvalues(&theta, w)?;
        let gam = crate::symfun::elem_sym_all(&eig);
        for (kk, vals) in values.iter_mut().enumerate() {
            vals.push(gam[kk + 1]);
        }
    }
    Ok(values
        .into_iter()
        .enumerate()
        .map(|(kk, vals)| {
            let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            GammaStats {
                k: kk + 1,
                min,
                max,
                mean,
                spread: max - min,
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct LheCheck {
    pub profiles: Vec<GammaStats>,
    /// Largest `ℓ` such that every `γ_{k'}` with `k' ≤ ℓ` has spread within
    /// tolerance (0 if even `γ_1` varies).
    pub ell_max: usize,
    pub tol: f64,
}

impl LheCheck {
    pub fn is_l_hermite_einstein(&self, ell: usize) -> bool {
        ell <= self.ell_max
    }
}

pub fn lhe_check(
    t: &CurvatureTensor,
    w: &Kaehler11,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<LheCheck> {
    let profiles = gamma_profiles(t, w, t.n(), samples, seed)?;
    let ell_max = profiles.iter().take_while(|p| p.spread <= tol).count();
    Ok(LheCheck {
        profiles,
        ell_max,
        tol,
    })
}
