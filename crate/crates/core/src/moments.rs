//! Unitary-invariant moments on the unit sphere of `C^r` and the sphere
//! averages `φ_k(T) = E[⟨T v, v⟩^k]`.
//!
//! Exact moments are rationals. For the normalized sphere measure,
//!
//! ```text
//! E[v_{λ_1} ... v_{λ_k} v̄_{μ_1} ... v̄_{μ_k}] = perm(M) (r-1)! / (r-1+k)!,
//! M_{ab} = [λ_a = μ_b],
//! ```
//!
//! which for `λ = μ` reduces to `m_1! ... m_r! (r-1)!/(r-1+k)!`.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::curvature::{hermitian_deviation, CurvatureTensor};
use crate::error::{Error, Result};
use crate::exterior::{wedge, Form};
use crate::sampling::{rng_for, unit_sphere};
use crate::symfun::{elem_sym_all, newton_convert, SymSeq};

/// Index lists `(λ_1..λ_k)`, `(μ_1..μ_k)` (1-based) for the moment
/// `E[∏ v_{λ_a} v̄_{μ_a}]` on the sphere of `C^r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentSpec {
    r: usize,
    lambdas: Vec<usize>,
    mus: Vec<usize>,
}

impl MomentSpec {
    pub fn new(r: usize, lambdas: Vec<usize>, mus: Vec<usize>) -> Result<Self> {
        if r == 0 {
            return Err(Error::Invalid("sphere dimension r must be positive".into()));
        }
        if lambdas.len() != mus.len() {
            return Err(Error::DimensionMismatch {
                left: lambdas.len(),
                right: mus.len(),
            });
        }
        if let Some(&bad) = lambdas.iter().chain(&mus).find(|&&i| i == 0 || i > r) {
            return Err(Error::OutOfRange {
                what: "moment index",
                value: bad,
                min: 1,
                max: r,
            });
        }
        Ok(MomentSpec { r, lambdas, mus })
    }

    /// `|z_1|^{2 m_1} ... |z_r|^{2 m_r}`.
    pub fn diagonal(multiplicities: &[usize]) -> Result<Self> {
        let idx: Vec<usize> = multiplicities
            .iter()
            .enumerate()
            .flat_map(|(l, &m)| std::iter::repeat(l + 1).take(m))
            .collect();
        MomentSpec::new(multiplicities.len(), idx.clone(), idx)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn k(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[usize] {
        &self.lambdas
    }

    pub fn mus(&self) -> &[usize] {
        &self.mus
    }
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `(r-1)! / (r-1+k)!`.
fn sphere_normalization(r: usize, k: usize) -> BigRational {
    BigRational::new(factorial(r - 1), factorial(r - 1 + k))
}

/// Lemma-style closed form `m_1! ... m_r! (r-1)! / (r-1+k)!`, `k = Σ m_ℓ`.
pub fn moment_diagonal(r: usize, multiplicities: &[usize]) -> Result<BigRational> {
    if r == 0 || multiplicities.len() != r {
        return Err(Error::DimensionMismatch {
            left: r,
            right: multiplicities.len(),
        });
    }
    let k: usize = multiplicities.iter().sum();
    let num = multiplicities
        .iter()
        .fold(BigInt::one(), |acc, &m| acc * factorial(m));
    Ok(BigRational::from_integer(num) * sphere_normalization(r, k))
}

/// Permanent of a 0/1 matrix by Ryser's inclusion-exclusion formula.
pub fn permanent01(m: &[Vec<bool>]) -> BigInt {
    let k = m.len();
    if k == 0 {
        return BigInt::one();
    }
    let mut total = BigInt::zero();
    for subset in 1u64..(1u64 << k) {
        let mut prod = BigInt::one();
        for row in m {
            let s = (0..k).filter(|&c| subset & (1 << c) != 0 && row[c]).count();
            if s == 0 {
                prod = BigInt::zero();
                break;
            }
            prod *= BigInt::from(s);
        }
        if prod.is_zero() {
            continue;
        }
        if (k - subset.count_ones() as usize) % 2 == 0 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    total
}

fn wick_count(lambdas: &[usize], mus: &[usize]) -> BigInt {
    let m: Vec<Vec<bool>> = lambdas
        .iter()
        .map(|l| mus.iter().map(|mu| l == mu).collect())
        .collect();
    permanent01(&m)
}

/// Exact moment via the Wick permanent.
pub fn moment_wick(spec: &MomentSpec) -> BigRational {
    let count = wick_count(&spec.lambdas, &spec.mus);
    BigRational::from_integer(count) * sphere_normalization(spec.r, spec.k())
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Debug, PartialEq)]
pub struct McEstimate {
    pub estimate: Complex64,
    /// Sample standard deviation of the complex integrand over `√samples`.
    pub stderr: f64,
    pub samples: usize,
}

/// Per-component means and standard errors of a vector-valued integrand.
#[derive(Clone, Debug, PartialEq)]
pub struct McVector {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub samples: usize,
}

const MC_CHUNK: usize = 1 << 14;

#[derive(Clone)]
struct Welford {
    count: f64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Welford {
    fn new(dim: usize) -> Self {
        Welford {
            count: 0.0,
            mean: vec![0.0; dim],
            m2: vec![0.0; dim],
        }
    }

    fn push(&mut self, x: &[f64]) {
        self.count += 1.0;
        for ((m, s), &v) in self.mean.iter_mut().zip(&mut self.m2).zip(x) {
            let d = v - *m;
            *m += d / self.count;
            *s += d * (v - *m);
        }
    }

    fn merge(mut self, other: &Welford) -> Self {
        let total = self.count + other.count;
        if other.count == 0.0 {
            return self;
        }
        for i in 0..self.mean.len() {
            let d = other.mean[i] - self.mean[i];
            self.mean[i] += d * other.count / total;
            self.m2[i] += other.m2[i] + d * d * self.count * other.count / total;
        }
        self.count = total;
        self
    }
}

/// Monte Carlo mean of `f(v)` for `v` uniform on the unit sphere of `C^r`.
///
/// Samples are drawn in fixed-size chunks, chunk `c` from stream `c` of the
/// seeded generator, and chunk statistics are merged in chunk order: the
/// result depends only on `(r, samples, seed)`, not on the thread count.
pub fn sphere_mc<F>(r: usize, samples: usize, seed: u64, dim: usize, f: F) -> McVector
where
    F: Fn(&[Complex64], &mut [f64]) + Sync,
{
    let chunks = samples.div_ceil(MC_CHUNK);
    let parts: Vec<Welford> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng_for(seed, c as u64);
            let mut acc = Welford::new(dim);
            let mut buf = vec![0.0; dim];
            let len = MC_CHUNK.min(samples - c * MC_CHUNK);
            for _ in 0..len {
                let v = unit_sphere(&mut rng, r);
                buf.iter_mut().for_each(|b| *b = 0.0);
                f(&v, &mut buf);
                acc.push(&buf);
            }
            acc
        })
        .collect();
    let total = parts
        .iter()
        .fold(Welford::new(dim), |acc, p| acc.merge(p));
    let n = total.count;
    let stderr = total
        .m2
        .iter()
        .map(|&s| {
            if n > 1.0 {
                (s / (n - 1.0)).sqrt() / n.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    McVector {
        mean: total.mean,
        stderr,
        samples,
    }
}

pub fn moment_mc(spec: &MomentSpec, samples: usize, seed: u64) -> McEstimate {
    let samples = samples.max(1);
    let mc = sphere_mc(spec.r, samples, seed, 2, |v, out| {
        let mut p = Complex64::new(1.0, 0.0);
        for (&l, &m) in spec.lambdas.iter().zip(&spec.mus) {
            p *= v[l - 1] * v[m - 1].conj();
        }
        out[0] = p.re;
        out[1] = p.im;
    });
    McEstimate {
        estimate: Complex64::new(mc.mean[0], mc.mean[1]),
        stderr: mc.stderr[0].hypot(mc.stderr[1]),
        samples,
    }
}

fn binom_f64(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn check_hermitian_square(t: &DMatrix<Complex64>) -> Result<()> {
    if !t.is_square() || t.nrows() == 0 {
        return Err(Error::DimensionMismatch {
            left: t.nrows(),
            right: t.ncols(),
        });
    }
    let deviation = hermitian_deviation(t);
    let scale = 1.0 + t.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if deviation > 1e-10 * scale {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// `φ_k(T) = σ_k(eigenvalues of T) / C(r-1+k, k)`.
pub fn phi_k_scalar(t: &DMatrix<Complex64>, k: usize) -> Result<f64> {
    check_hermitian_square(t)?;
    let r = t.nrows();
    let h = (t + t.adjoint()) * Complex64::new(0.5, 0.0);
    let eig: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    let gammas = SymSeq::new(elem_sym_all(&eig))?;
    let sigma = newton_convert(&gammas, k)[k];
    Ok(sigma / binom_f64(r - 1 + k, k))
}

fn for_each_tuple(r: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0usize; k];
    loop {
        f(&idx);
        let mut pos = k;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < r {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn one_based(idx: &[usize]) -> Vec<usize> {
    idx.iter().map(|i| i + 1).collect()
}

/// `φ_k(T)` as `Σ_{λ, μ} ∏_a T_{μ_a λ_a} E[∏ v_{λ_a} v̄_{μ_a}]` over all index
/// tuples, each moment taken from [`moment_wick`].
pub fn phi_k_scalar_moments(t: &DMatrix<Complex64>, k: usize) -> Result<f64> {
    check_hermitian_square(t)?;
    let r = t.nrows();
    let mut total = Complex64::new(0.0, 0.0);
    for_each_tuple(r, k, |lam| {
        for_each_tuple(r, k, |mu| {
            if !same_multiset(lam, mu) {
                return;
            }
            let spec = MomentSpec::new(r, one_based(lam), one_based(mu)).expect("indices in range");
            let w = rational_to_f64(&moment_wick(&spec));
            let prod: Complex64 = lam.iter().zip(mu).map(|(&l, &m)| t[(m, l)]).product();
            total += prod * w;
        });
    });
    Ok(total.re)
}

fn same_multiset(a: &[usize], b: &[usize]) -> bool {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_unstable();
    y.sort_unstable();
    x == y
}

/// `E_v[ϑ(v)^k]`, the fiber average of the k-th power of the direction
/// form, as an exact (k,k)-form on `C^n`.
///
/// The sum runs over multisets of index pairs `(λ_a, μ_a)`: the product of
/// the commuting entries `Θ̂_{μ_a λ_a}` and the Wick weight depend only on
/// the multiset, counted with its number of orderings.
pub fn phi_k_tensor(t: &CurvatureTensor, k: usize) -> Form {
    let n = t.n();
    let r = t.r();
    if k == 0 {
        return Form::one(n);
    }
    let mut out = Form::zero(n, k, k);
    if k > n {
        return out;
    }
    let pairs: Vec<(usize, usize)> = (0..r).flat_map(|l| (0..r).map(move |m| (l, m))).collect();
    let entries: Vec<Form> = pairs.iter().map(|&(l, m)| t.entry_form(m, l)).collect();
    let norm = sphere_normalization(r, k);
    let k_fact = factorial(k);

    struct Walk<'a> {
        k: usize,
        pairs: &'a [(usize, usize)],
        entries: &'a [Form],
        chosen: Vec<usize>,
        norm: &'a BigRational,
        k_fact: &'a BigInt,
        out: &'a mut Form,
    }

    impl Walk<'_> {
        fn go(&mut self, start: usize, prod: &Form) {
            if self.chosen.len() == self.k {
                let lam: Vec<usize> = self.chosen.iter().map(|&p| self.pairs[p].0).collect();
                let mu: Vec<usize> = self.chosen.iter().map(|&p| self.pairs[p].1).collect();
                if !same_multiset(&lam, &mu) {
                    return;
                }
                let mut orderings = self.k_fact.clone();
                let mut run = 1usize;
                for w in self.chosen.windows(2) {
                    if w[0] == w[1] {
                        run += 1;
                    } else {
                        orderings /= factorial(run);
                        run = 1;
                    }
                }
                orderings /= factorial(run);
                let weight = BigRational::from_integer(orderings * wick_count(&lam, &mu)) * self.norm;
                *self.out += &prod.scale_real(rational_to_f64(&weight));
                return;
            }
            for p in start..self.pairs.len() {
                let next = wedge(prod, &self.entries[p]).expect("same base");
                if next.num_terms() == 0 {
                    continue;
                }
                self.chosen.push(p);
                self.go(p, &next);
                self.chosen.pop();
            }
        }
    }

    Walk {
        k,
        pairs: &pairs,
        entries: &entries,
        chosen: Vec::with_capacity(k),
        norm: &norm,
        k_fact: &k_fact,
        out: &mut out,
    }
    .go(0, &Form::one(n));
    out
}

/// Reference evaluation of [`phi_k_tensor`] over all `r^{2k}` index tuples.
pub fn phi_k_tensor_naive(t: &CurvatureTensor, k: usize) -> Form {
    let n = t.n();
    let r = t.r();
    let mut out = if k == 0 { Form::one(n) } else { Form::zero(n, k, k) };
    if k == 0 || k > n {
        return out;
    }
    let forms = t.endomorphism_forms();
    for_each_tuple(r, k, |lam| {
        for_each_tuple(r, k, |mu| {
            let spec = MomentSpec::new(r, one_based(lam), one_based(mu)).expect("indices in range");
            let w = moment_wick(&spec);
            if w.is_zero() {
                return;
            }
            let mut prod = Form::one(n);
            for (&l, &m) in lam.iter().zip(mu) {
                prod = wedge(&prod, &forms[m][l]).expect("same base");
            }
            out += &prod.scale_real(rational_to_f64(&w));
        });
    });
    out
}
