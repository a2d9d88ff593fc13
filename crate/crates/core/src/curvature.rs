//! Curvature data of a hermitian holomorphic bundle at a point, in a normal
//! frame (the fiber metric is the identity).
//!
//! The tensor stores the normalized curvature `Θ̂ = (i/2π) Θ(E, h)`: its
//! endomorphism entry in row `μ`, column `λ` is the real-structured
//! (1,1)-form
//!
//! ```text
//! Θ̂_{μλ} = Σ_{j,k} ĉ_{jkλμ} (i dz_j ∧ dz̄_k),
//! ```
//!
//! so `⟨Θ̂ v, v⟩ = Σ Θ̂_{μλ} v_λ v̄_μ`. Hermitian symmetry reads
//! `conj(ĉ_{jkλμ}) = ĉ_{kjμλ}`. Kähler forms follow the same convention:
//! `ω = Σ g_{jk} (i dz_j ∧ dz̄_k)` with `g` hermitian positive definite.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exterior::{divided_power, top_ratio, wedge, Form};
use crate::sampling::{complex_normal, rng_for};

const HERMITIAN_TOL: f64 = 1e-12;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// A real (1,1)-form `Σ g_{jk} (i dz_j ∧ dz̄_k)` with hermitian `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct Kaehler11 {
    g: DMatrix<Complex64>,
}

impl Kaehler11 {
    pub fn new(g: DMatrix<Complex64>) -> Result<Self> {
        if !g.is_square() {
            return Err(Error::DimensionMismatch {
                left: g.nrows(),
                right: g.ncols(),
            });
        }
        let deviation = hermitian_deviation(&g);
        let scale = 1.0 + g.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if deviation > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Kaehler11 { g })
    }

    /// Hermitian part of an arbitrary square matrix.
    pub fn hermitian_part(g: &DMatrix<Complex64>) -> Self {
        Kaehler11 {
            g: (g + g.adjoint()) * Complex64::new(0.5, 0.0),
        }
    }

    pub fn zero(n: usize) -> Self {
        Kaehler11 {
            g: DMatrix::zeros(n, n),
        }
    }

    /// The flat metric `Σ i dz_j ∧ dz̄_j`.
    pub fn euclidean(n: usize) -> Self {
        Kaehler11 {
            g: DMatrix::identity(n, n),
        }
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        let n = entries.len();
        Kaehler11 {
            g: DMatrix::from_fn(n, n, |j, k| {
                if j == k {
                    Complex64::new(entries[j], 0.0)
                } else {
                    czero()
                }
            }),
        }
    }

    /// Random hermitian (1,1)-form with complex normal entries, deterministic per seed.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = rng_for(seed, 0x6b61_6568);
        let a = DMatrix::from_fn(n, n, |_, _| complex_normal(&mut rng));
        Self::hermitian_part(&a)
    }

    /// Random positive definite form `A A* / n + Id / 2`, deterministic per seed.
    pub fn random_positive(n: usize, seed: u64) -> Self {
        let mut rng = rng_for(seed, 0x6f6d_6567);
        let a = DMatrix::from_fn(n, n, |_, _| complex_normal(&mut rng));
        let g = &a * a.adjoint() * Complex64::new(1.0 / n as f64, 0.0)
            + DMatrix::identity(n, n) * Complex64::new(0.5, 0.0);
        Self::hermitian_part(&g)
    }

    pub fn n(&self) -> usize {
        self.g.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.g
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.g[(j, k)]
    }

    pub fn to_form(&self) -> Form {
        Form::from_hermitian_matrix(self.n(), |j, k| self.g[(j, k)])
    }

    pub fn is_positive_definite(&self) -> bool {
        // complex Cholesky takes square roots of negative pivots, so test the spectrum
        self.n() > 0
            && self
                .g
                .clone()
                .symmetric_eigenvalues()
                .iter()
                .all(|&e| e > 0.0)
    }

    pub fn require_positive_definite(&self) -> Result<()> {
        if self.is_positive_definite() {
            Ok(())
        } else {
            Err(Error::NotPositiveDefinite)
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Kaehler11 {
            g: &self.g * Complex64::new(s, 0.0),
        }
    }

    pub fn add(&self, other: &Kaehler11) -> Result<Self> {
        check_dim(self.n(), other.n())?;
        Ok(Kaehler11 {
            g: &self.g + &other.g,
        })
    }

    pub fn sub(&self, other: &Kaehler11) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.g.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Kaehler11) -> Result<f64> {
        check_dim(self.n(), other.n())?;
        Ok((&self.g - &other.g)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max))
    }
}

fn check_dim(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left: a, right: b })
    }
}

pub(crate) fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    (m - m.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Normalized curvature coefficients `ĉ_{jkλμ}` (all indices 0-based here).
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureTensor {
    n: usize,
    r: usize,
    c: Vec<Complex64>,
}

impl CurvatureTensor {
    pub fn zeros(n: usize, r: usize) -> Self {
        CurvatureTensor {
            n,
            r,
            c: vec![czero(); n * n * r * r],
        }
    }

    /// Builds `ĉ_{jkλμ} = f(j, k, λ, μ)` without any symmetry check.
    pub fn from_fn(
        n: usize,
        r: usize,
        mut f: impl FnMut(usize, usize, usize, usize) -> Complex64,
    ) -> Self {
        let mut t = CurvatureTensor::zeros(n, r);
        for j in 0..n {
            for k in 0..n {
                for l in 0..r {
                    for m in 0..r {
                        t.set(j, k, l, m, f(j, k, l, m));
                    }
                }
            }
        }
        t
    }

    /// `β ⊗ Id_r`.
    pub fn scalar(beta: &Kaehler11, r: usize) -> Self {
        CurvatureTensor::from_fn(beta.n(), r, |j, k, l, m| {
            if l == m {
                beta.get(j, k)
            } else {
                czero()
            }
        })
    }

    /// `diag(β_1, ..., β_r)`.
    pub fn diagonal(betas: &[Kaehler11]) -> Result<Self> {
        let n = betas.first().map(Kaehler11::n).unwrap_or(0);
        for b in betas {
            check_dim(n, b.n())?;
        }
        Ok(CurvatureTensor::from_fn(n, betas.len(), |j, k, l, m| {
            if l == m {
                betas[l].get(j, k)
            } else {
                czero()
            }
        }))
    }

    /// `β ⊗ X` for an r×r endomorphism matrix `X` (row μ, column λ).
    pub fn tensor_product(beta: &Kaehler11, x: &DMatrix<Complex64>) -> Self {
        CurvatureTensor::from_fn(beta.n(), x.nrows(), |j, k, l, m| beta.get(j, k) * x[(m, l)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    fn idx(&self, j: usize, k: usize, l: usize, m: usize) -> usize {
        ((j * self.n + k) * self.r + l) * self.r + m
    }

    /// `ĉ_{jkλμ}` with 0-based indices.
    pub fn get(&self, j: usize, k: usize, lambda: usize, mu: usize) -> Complex64 {
        self.c[self.idx(j, k, lambda, mu)]
    }

    pub fn set(&mut self, j: usize, k: usize, lambda: usize, mu: usize, v: Complex64) {
        let i = self.idx(j, k, lambda, mu);
        self.c[i] = v;
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.c
    }

    /// Largest `|conj(ĉ_{jkλμ}) - ĉ_{kjμλ}|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.n {
            for k in 0..self.n {
                for l in 0..self.r {
                    for m in 0..self.r {
                        let d = (self.get(j, k, l, m).conj() - self.get(k, j, m, l)).norm();
                        worst = worst.max(d);
                    }
                }
            }
        }
        worst
    }

    /// Lists every index tuple (1-based) that breaks hermitian symmetry.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let mut bad = Vec::new();
        for j in 0..self.n {
            for k in 0..self.n {
                for l in 0..self.r {
                    for m in 0..self.r {
                        let d = (self.get(j, k, l, m).conj() - self.get(k, j, m, l)).norm();
                        if d > tol && (j, k, l, m) <= (k, j, m, l) {
                            bad.push(format!(
                                "conj(c[{},{},{},{}]) != c[{},{},{},{}] (|diff| = {d:.3e})",
                                j + 1,
                                k + 1,
                                l + 1,
                                m + 1,
                                k + 1,
                                j + 1,
                                m + 1,
                                l + 1
                            ));
                        }
                    }
                }
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidTensor(format!(
                "hermitian symmetry violated: {}",
                bad.join("; ")
            )))
        }
    }

    /// `(ĉ_{jkλμ} + conj(ĉ_{kjμλ})) / 2`.
    pub fn symmetrized(&self) -> Self {
        CurvatureTensor::from_fn(self.n, self.r, |j, k, l, m| {
            (self.get(j, k, l, m) + self.get(k, j, m, l).conj()) * 0.5
        })
    }

    /// The (1,1)-form `Θ̂_{μλ}`.
    pub fn entry_form(&self, mu: usize, lambda: usize) -> Form {
        Form::from_hermitian_matrix(self.n, |j, k| self.get(j, k, lambda, mu))
    }

    /// The n×n coefficient matrix of `Θ̂_{μλ}`.
    pub fn entry_matrix(&self, mu: usize, lambda: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.n, self.n, |j, k| self.get(j, k, lambda, mu))
    }

    /// `Θ̂_{μλ}` as forms, indexed `[μ][λ]`.
    pub fn endomorphism_forms(&self) -> Vec<Vec<Form>> {
        (0..self.r)
            .map(|mu| (0..self.r).map(|l| self.entry_form(mu, l)).collect())
            .collect()
    }

    /// `tr Θ̂ = c_1` as a (1,1)-form.
    pub fn trace(&self) -> Kaehler11 {
        let g = DMatrix::from_fn(self.n, self.n, |j, k| {
            (0..self.r).map(|l| self.get(j, k, l, l)).sum()
        });
        Kaehler11 { g }
    }

    pub fn add(&self, other: &CurvatureTensor) -> Result<Self> {
        check_dim(self.n, other.n)?;
        check_dim(self.r, other.r)?;
        Ok(CurvatureTensor {
            n: self.n,
            r: self.r,
            c: self.c.iter().zip(&other.c).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &CurvatureTensor) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        CurvatureTensor {
            n: self.n,
            r: self.r,
            c: self.c.iter().map(|a| a * s).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CurvatureTensor) -> Result<f64> {
        check_dim(self.n, other.n)?;
        check_dim(self.r, other.r)?;
        Ok(self
            .c
            .iter()
            .zip(&other.c)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Expresses the tensor in the frame `e'_λ = Σ_a U_{aλ} e_a` for unitary `U`,
    /// i.e. the endomorphism becomes `U* Θ̂ U`.
    pub fn rotated(&self, u: &DMatrix<Complex64>) -> Result<Self> {
        check_dim(u.nrows(), self.r)?;
        check_dim(u.ncols(), self.r)?;
        let r = self.r;
        let mut out = CurvatureTensor::zeros(self.n, r);
        for j in 0..self.n {
            for k in 0..self.n {
                let block = DMatrix::from_fn(r, r, |mu, l| self.get(j, k, l, mu));
                let rot = u.adjoint() * block * u;
                for mu in 0..r {
                    for l in 0..r {
                        out.set(j, k, l, mu, rot[(mu, l)]);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Chern forms `c_0, ..., c_r` (bidegree (k,k) on `C^n`).
#[derive(Clone, Debug, PartialEq)]
pub struct ChernSequence {
    forms: Vec<Form>,
}

impl ChernSequence {
    pub fn new(forms: Vec<Form>) -> Self {
        ChernSequence { forms }
    }

    pub fn forms(&self) -> &[Form] {
        &self.forms
    }

    pub fn rank(&self) -> usize {
        self.forms.len().saturating_sub(1)
    }

    /// `c_k`, or the zero form beyond the rank.
    pub fn get(&self, k: usize) -> Form {
        match self.forms.get(k) {
            Some(f) => f.clone(),
            None => {
                let m = self.forms.first().map(Form::dim).unwrap_or(0);
                Form::zero(m, k, k)
            }
        }
    }
}

fn permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<(Vec<usize>, f64)>) {
        let k = used.len();
        if prefix.len() == k {
            let inversions = (0..k)
                .flat_map(|a| ((a + 1)..k).map(move |b| (a, b)))
                .filter(|&(a, b)| prefix[a] > prefix[b])
                .count();
            out.push((prefix.clone(), if inversions % 2 == 0 { 1.0 } else { -1.0 }));
            return;
        }
        for i in 0..k {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

fn subsets_of_size(r: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << r))
        .filter(|b| b.count_ones() as usize == k)
        .map(|b| (0..r).filter(|i| b & (1 << i) != 0).collect())
        .collect()
}

/// `c_k = Σ_{|S| = k} det(Θ̂_S)` with the minors expanded by wedge products.
pub fn chern_forms(t: &CurvatureTensor) -> ChernSequence {
    let n = t.n();
    let entries = t.endomorphism_forms();
    let mut forms = vec![Form::one(n)];
    for k in 1..=t.r() {
        let mut ck = Form::zero(n, k, k);
        if k <= n {
            let perms = permutations(k);
            for s in subsets_of_size(t.r(), k) {
                for (perm, sign) in &perms {
                    let mut prod = Form::one(n);
                    for (a, &b) in perm.iter().enumerate() {
                        prod = wedge(&prod, &entries[s[a]][s[b]]).expect("same base");
                        if prod.num_terms() == 0 {
                            break;
                        }
                    }
                    if prod.num_terms() > 0 {
                        ck += &prod.scale_real(*sign);
                    }
                }
            }
        }
        forms.push(ck);
    }
    ChernSequence { forms }
}

/// Segre forms `s_0, ..., s_n` from `Σ_{j=0}^k c_j ∧ s_{k-j} = 0`, `s_0 = 1`.
pub fn segre_forms(c: &ChernSequence, n: usize) -> Result<Vec<Form>> {
    use crate::symfun::Commutative;
    let c0 = c.forms.first().ok_or(Error::NonUnitLeading)?;
    if !c0.is_unit() {
        return Err(Error::NonUnitLeading);
    }
    let m = c0.dim();
    let mut s: Vec<Form> = vec![Form::one(m)];
    for k in 1..=n {
        let mut acc = Form::zero(m, k, k);
        for j in 1..=k.min(c.rank()) {
            acc += &wedge(&c.forms[j], &s[k - j])?;
        }
        s.push(-acc);
    }
    Ok(s)
}

/// `ϑ(v) = ⟨Θ̂ v, v⟩ / ‖v‖²`: `g_{jk} = Σ ĉ_{jkλμ} v_λ v̄_μ / ‖v‖²`.
pub fn direction_form(t: &CurvatureTensor, v: &[Complex64]) -> Result<Kaehler11> {
    check_dim(v.len(), t.r())?;
    let norm2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    if norm2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let n = t.n();
    let g = DMatrix::from_fn(n, n, |j, k| {
        let mut acc = czero();
        for l in 0..t.r() {
            for m in 0..t.r() {
                acc += t.get(j, k, l, m) * v[l] * v[m].conj();
            }
        }
        acc / norm2
    });
    Ok(Kaehler11 { g })
}

/// Mean curvature `T` with `Θ̂ ∧ ω^{n-1}/(n-1)! = T ⊗ ω^n/n!`, row μ column λ.
pub fn mean_curvature(t: &CurvatureTensor, w: &Kaehler11) -> Result<DMatrix<Complex64>> {
    check_dim(t.n(), w.n())?;
    w.require_positive_definite()?;
    let n = t.n();
    let omega = w.to_form();
    let vol = divided_power(&omega, n);
    let omega_rest = divided_power(&omega, n - 1);
    let mut out = DMatrix::zeros(t.r(), t.r());
    for mu in 0..t.r() {
        for l in 0..t.r() {
            let top = wedge(&t.entry_form(mu, l), &omega_rest)?;
            out[(mu, l)] = top_ratio(&top, &vol)?;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeCheck {
    pub hermite_einstein: bool,
    /// `tr(T) / r`.
    pub lambda: f64,
    /// `‖T - λ Id‖_max`.
    pub deviation: f64,
}

pub const DEFAULT_HE_TOL: f64 = 1e-9;

pub fn is_hermite_einstein(t: &CurvatureTensor, w: &Kaehler11, tol: f64) -> Result<HeCheck> {
    let tm = mean_curvature(t, w)?;
    let r = t.r();
    let lambda = tm.trace().re / r as f64;
    let deviation = (tm - DMatrix::identity(r, r) * Complex64::new(lambda, 0.0))
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    Ok(HeCheck {
        hermite_einstein: deviation <= tol,
        lambda,
        deviation,
    })
}

/// Errors unless the tensor is Hermite-Einstein within `tol`; returns the slope.
pub fn require_hermite_einstein(t: &CurvatureTensor, w: &Kaehler11, tol: f64) -> Result<f64> {
    let he = is_hermite_einstein(t, w, tol)?;
    if he.hermite_einstein {
        Ok(he.lambda)
    } else {
        Err(Error::NotHermiteEinstein {
            deviation: he.deviation,
            tol,
        })
    }
}

/// `t + (ω/n) ⊗ (λ Id - T)`, whose mean curvature is exactly `λ Id`.
pub fn project_to_he(t: &CurvatureTensor, w: &Kaehler11, lambda: f64) -> Result<CurvatureTensor> {
    let tm = mean_curvature(t, w)?;
    let r = t.r();
    // hermitian part only: T is hermitian up to rounding
    let tm = (&tm + tm.adjoint()) * Complex64::new(0.5, 0.0);
    let shift = DMatrix::identity(r, r) * Complex64::new(lambda, 0.0) - tm;
    let correction = CurvatureTensor::tensor_product(&w.scale(1.0 / t.n() as f64), &shift);
    t.add(&correction)
}

/// Complex normal entries symmetrized to satisfy hermitian symmetry.
pub fn random_curvature(n: usize, r: usize, seed: u64) -> CurvatureTensor {
    let mut rng = rng_for(seed, 0x6375_7276);
    let raw = CurvatureTensor::from_fn(n, r, |_, _, _, _| complex_normal(&mut rng));
    raw.symmetrized()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Flatness {
    pub projectively_flat: bool,
    pub strong_flat: bool,
    /// `‖Θ̂ - (1/r) c_1 ⊗ Id‖_max`.
    pub projective_deviation: f64,
    /// `‖Θ̂ - (λ/n) ω ⊗ Id‖_max`.
    pub strong_deviation: f64,
    pub lambda: f64,
}

pub fn flatness_detectors(t: &CurvatureTensor, w: &Kaehler11, tol: f64) -> Result<Flatness> {
    let he = is_hermite_einstein(t, w, tol)?;
    let r = t.r();
    let projective = CurvatureTensor::scalar(&t.trace().scale(1.0 / r as f64), r);
    let strong = CurvatureTensor::scalar(&w.scale(he.lambda / t.n() as f64), r);
    let projective_deviation = t.max_abs_diff(&projective)?;
    let strong_deviation = t.max_abs_diff(&strong)?;
    Ok(Flatness {
        projectively_flat: projective_deviation <= tol,
        strong_flat: strong_deviation <= tol,
        projective_deviation,
        strong_deviation,
        lambda: he.lambda,
    })
}
