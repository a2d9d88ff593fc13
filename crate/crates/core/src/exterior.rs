//! Exterior algebra of complex (p,q)-forms on a fixed `C^m`.
//!
//! A form is a sparse map from canonical key pairs `(I, J)` to complex
//! coefficients, where the key stands for the basis element
//! `dz_I ∧ dz̄_J` with all holomorphic differentials written first, each
//! block in increasing index order. The sign of any reordering is the
//! parity of the permutation that sorts the z-differentials first and
//! then the z̄-differentials. Coefficients are stored raw: factors of `i`
//! are not absorbed into the basis.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest ambient dimension supported by the bitmask index representation.
pub const MAX_DIM: usize = 24;

/// A strictly increasing set of indices in `1..=m`, stored as a bitmask
/// (bit `i - 1` set iff index `i` is present).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex(u32);

impl MultiIndex {
    pub const EMPTY: MultiIndex = MultiIndex(0);

    pub fn from_bits(bits: u32) -> Self {
        MultiIndex(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Multi-index of a strictly increasing 1-based sequence.
    pub fn new(indices: &[usize]) -> Result<Self> {
        match canonicalize(indices)? {
            (idx, 1) => Ok(idx),
            _ => Err(Error::Invalid(format!(
                "indices {indices:?} are not strictly increasing"
            ))),
        }
    }

    /// The full index set `{1, ..., m}`.
    pub fn full(m: usize) -> Self {
        debug_assert!(m <= MAX_DIM);
        MultiIndex(((1u64 << m) - 1) as u32)
    }

    pub fn singleton(i: usize) -> Self {
        debug_assert!((1..=MAX_DIM).contains(&i));
        MultiIndex(1 << (i - 1))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Largest index present (0 for the empty set).
    pub fn max_index(self) -> usize {
        32 - self.0.leading_zeros() as usize
    }

    /// 1-based indices in increasing order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |b| bits & (1 << b) != 0).map(|b| b + 1)
    }

    pub fn shifted(self, offset: usize) -> Self {
        MultiIndex(self.0 << offset)
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        MultiIndex(self.0 | other.0)
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.indices()).finish()
    }
}

/// Sorts an arbitrary 1-based index sequence.
///
/// Returns the set of indices together with the sign of the sorting
/// permutation; the sign is 0 iff the sequence has a repeat.
pub fn canonicalize(seq: &[usize]) -> Result<(MultiIndex, i8)> {
    let mut bits = 0u32;
    let mut repeated = false;
    for &i in seq {
        if i == 0 || i > MAX_DIM {
            return Err(Error::OutOfRange {
                what: "index",
                value: i,
                min: 1,
                max: MAX_DIM,
            });
        }
        let b = 1u32 << (i - 1);
        repeated |= bits & b != 0;
        bits |= b;
    }
    if repeated {
        return Ok((MultiIndex(bits), 0));
    }
    let inversions = (0..seq.len())
        .flat_map(|a| ((a + 1)..seq.len()).map(move |b| (a, b)))
        .filter(|&(a, b)| seq[a] > seq[b])
        .count();
    Ok((MultiIndex(bits), if inversions % 2 == 0 { 1 } else { -1 }))
}

/// Sign of concatenating two disjoint sorted blocks `a` then `b` and sorting:
/// the parity of pairs `(x in a, y in b)` with `x > y`.
fn merge_sign(a: MultiIndex, b: MultiIndex) -> i32 {
    let mut inv = 0u32;
    let mut rest = b.0;
    while rest != 0 {
        let low = rest & rest.wrapping_neg();
        // bits of `a` strictly above this element of `b`
        inv += (a.0 & !(low | (low - 1))).count_ones();
        rest &= rest - 1;
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

pub type Key = (MultiIndex, MultiIndex);

/// A homogeneous (p,q)-form on `C^m`.
#[derive(Clone, PartialEq)]
pub struct Form {
    m: usize,
    p: usize,
    q: usize,
    coeffs: BTreeMap<Key, Complex64>,
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form(m={}, ({}, {})) ", self.m, self.p, self.q)?;
        f.debug_map()
            .entries(self.coeffs.iter().map(|(k, v)| (k, v)))
            .finish()
    }
}

impl Form {
    pub fn zero(m: usize, p: usize, q: usize) -> Self {
        assert!(m <= MAX_DIM, "dimension {m} exceeds {MAX_DIM}");
        Form {
            m,
            p,
            q,
            coeffs: BTreeMap::new(),
        }
    }

    /// The (0,0)-form with constant value `c`.
    pub fn constant(m: usize, c: Complex64) -> Self {
        let mut f = Form::zero(m, 0, 0);
        f.add_term(MultiIndex::EMPTY, MultiIndex::EMPTY, c);
        f
    }

    pub fn one(m: usize) -> Self {
        Form::constant(m, Complex64::new(1.0, 0.0))
    }

    /// `c · dz_{zs} ∧ dz̄_{zbars}` for arbitrary 1-based index sequences.
    pub fn monomial(m: usize, zs: &[usize], zbars: &[usize], c: Complex64) -> Result<Self> {
        let (i, si) = canonicalize(zs)?;
        let (j, sj) = canonicalize(zbars)?;
        if i.max_index() > m || j.max_index() > m {
            return Err(Error::OutOfRange {
                what: "index",
                value: i.max_index().max(j.max_index()),
                min: 1,
                max: m,
            });
        }
        let mut f = Form::zero(m, zs.len(), zbars.len());
        let sign = f64::from(si * sj);
        if sign != 0.0 {
            f.add_term(i, j, c * sign);
        }
        Ok(f)
    }

    /// The real (1,1)-form `Σ g_{jk} i dz_j ∧ dz̄_k` from a row-major n×n matrix.
    pub fn from_hermitian_matrix(n: usize, g: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut f = Form::zero(n, 1, 1);
        for j in 0..n {
            for k in 0..n {
                let c = g(j, k);
                if c != Complex64::new(0.0, 0.0) {
                    f.add_term(
                        MultiIndex::singleton(j + 1),
                        MultiIndex::singleton(k + 1),
                        Complex64::i() * c,
                    );
                }
            }
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    /// True if the bidegree exceeds the ambient dimension, so the form must vanish.
    pub fn is_degree_truncated(&self) -> bool {
        self.p > self.m || self.q > self.m
    }

    pub fn coeff(&self, i: MultiIndex, j: MultiIndex) -> Complex64 {
        self.coeffs
            .get(&(i, j))
            .copied()
            .unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }

    /// Adds `c` to the coefficient of the canonical key `(i, j)`.
    pub fn add_term(&mut self, i: MultiIndex, j: MultiIndex, c: Complex64) {
        debug_assert_eq!(i.len(), self.p);
        debug_assert_eq!(j.len(), self.q);
        debug_assert!(i.max_index() <= self.m && j.max_index() <= self.m);
        *self
            .coeffs
            .entry((i, j))
            .or_insert_with(|| Complex64::new(0.0, 0.0)) += c;
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Largest coefficient modulus (0 for the zero form).
    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }

    /// Largest coefficientwise difference between two forms of the same shape.
    pub fn max_abs_diff(&self, other: &Form) -> Result<f64> {
        self.check_same_shape(other)?;
        let mut worst = 0.0f64;
        for (k, v) in &self.coeffs {
            let w = other.coeffs.get(k).copied().unwrap_or_default();
            worst = worst.max((v - w).norm());
        }
        for (k, w) in &other.coeffs {
            if !self.coeffs.contains_key(k) {
                worst = worst.max(w.norm());
            }
        }
        Ok(worst)
    }

    /// Reality predicate: `conj` of the form equals itself, i.e.
    /// `coeff(J, I) = (-1)^{pq} conj(coeff(I, J))` for all keys. Only
    /// (p,p)-forms (or the zero form) can pass.
    pub fn is_real(&self, tol: f64) -> bool {
        if self.p != self.q {
            return self.is_zero(tol);
        }
        let sign = if (self.p * self.q) % 2 == 0 { 1.0 } else { -1.0 };
        self.coeffs
            .iter()
            .all(|(&(i, j), c)| (self.coeff(j, i) - c.conj() * sign).norm() <= tol)
    }

    pub fn scale(&self, c: Complex64) -> Form {
        let mut out = self.clone();
        out.coeffs.values_mut().for_each(|v| *v *= c);
        out
    }

    pub fn scale_real(&self, s: f64) -> Form {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn checked_add(&self, other: &Form) -> Result<Form> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (&(i, j), &c) in &other.coeffs {
            out.add_term(i, j, c);
        }
        Ok(out)
    }

    /// Drops coefficients with modulus at most `tol`.
    pub fn pruned(mut self, tol: f64) -> Form {
        self.coeffs.retain(|_, c| c.norm() > tol);
        self
    }

    fn check_same_shape(&self, other: &Form) -> Result<()> {
        if self.m != other.m {
            return Err(Error::DimensionMismatch {
                left: self.m,
                right: other.m,
            });
        }
        if (self.p, self.q) != (other.p, other.q) {
            return Err(Error::BidegreeMismatch(self.p, self.q, other.p, other.q));
        }
        Ok(())
    }

    fn wedge_unchecked(&self, other: &Form) -> Form {
        let mut out = Form::zero(self.m, self.p + other.p, self.q + other.q);
        if out.is_degree_truncated() {
            return out;
        }
        for (&(i, j), &a) in &self.coeffs {
            for (&(k, l), &b) in &other.coeffs {
                if !i.is_disjoint(k) || !j.is_disjoint(l) {
                    continue;
                }
                // dz_I dz̄_J dz_K dz̄_L -> dz_{I∪K} dz̄_{J∪L}
                let cross = if (j.len() * k.len()) % 2 == 0 { 1 } else { -1 };
                let sign = cross * merge_sign(i, k) * merge_sign(j, l);
                out.add_term(i.union(k), j.union(l), a * b * f64::from(sign));
            }
        }
        out.coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        out
    }
}

/// Exterior product. Bidegrees beyond `m` give the zero form.
pub fn wedge(a: &Form, b: &Form) -> Result<Form> {
    if a.m != b.m {
        return Err(Error::DimensionMismatch {
            left: a.m,
            right: b.m,
        });
    }
    Ok(a.wedge_unchecked(b))
}

/// `a^k` (the unit for `k = 0`).
pub fn power(a: &Form, k: usize) -> Form {
    let mut acc = Form::one(a.m);
    for _ in 0..k {
        acc = acc.wedge_unchecked(a);
    }
    acc
}

/// Divided power `a^k / k!`.
pub fn divided_power(a: &Form, k: usize) -> Form {
    let mut acc = Form::one(a.m);
    for step in 1..=k {
        acc = acc.wedge_unchecked(a).scale_real(1.0 / step as f64);
    }
    acc
}

/// The scalar `c` with `t = c · vol` for top-degree forms.
pub fn top_ratio(t: &Form, vol: &Form) -> Result<Complex64> {
    if t.m != vol.m {
        return Err(Error::DimensionMismatch {
            left: t.m,
            right: vol.m,
        });
    }
    for f in [t, vol] {
        if f.bidegree() != (f.m, f.m) {
            return Err(Error::NotTopDegree {
                m: f.m,
                p: f.p,
                q: f.q,
            });
        }
    }
    let full = MultiIndex::full(t.m);
    let v = vol.coeff(full, full);
    if v.norm() == 0.0 {
        return Err(Error::ZeroVolume);
    }
    Ok(t.coeff(full, full) / v)
}

/// Reindexes a form on `C^a` into coordinates `offset+1 ..= offset+a` of `C^m`.
pub fn block_embed(f: &Form, offset: usize, m: usize) -> Result<Form> {
    if offset + f.m > m || m > MAX_DIM {
        return Err(Error::OutOfRange {
            what: "offset + block dimension",
            value: offset + f.m,
            min: 0,
            max: m.min(MAX_DIM),
        });
    }
    let mut out = Form::zero(m, f.p, f.q);
    for (&(i, j), &c) in &f.coeffs {
        out.add_term(i.shifted(offset), j.shifted(offset), c);
    }
    Ok(out)
}

impl Add for &Form {
    type Output = Form;

    /// Panics on mismatched shape; use [`Form::checked_add`] for a fallible sum.
    fn add(self, rhs: &Form) -> Form {
        self.checked_add(rhs).expect("adding forms of different shape")
    }
}

impl Add for Form {
    type Output = Form;
    fn add(self, rhs: Form) -> Form {
        &self + &rhs
    }
}

impl AddAssign<&Form> for Form {
    fn add_assign(&mut self, rhs: &Form) {
        self.check_same_shape(rhs)
            .expect("adding forms of different shape");
        for (&(i, j), &c) in &rhs.coeffs {
            self.add_term(i, j, c);
        }
    }
}

impl Sub for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        self + &(-rhs)
    }
}

impl Sub for Form {
    type Output = Form;
    fn sub(self, rhs: Form) -> Form {
        &self - &rhs
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.scale_real(-1.0)
    }
}

impl Neg for Form {
    type Output = Form;
    fn neg(self) -> Form {
        -&self
    }
}

impl Mul<f64> for &Form {
    type Output = Form;
    fn mul(self, rhs: f64) -> Form {
        self.scale_real(rhs)
    }
}

impl Mul<f64> for Form {
    type Output = Form;
    fn mul(self, rhs: f64) -> Form {
        self.scale_real(rhs)
    }
}

impl Mul<Complex64> for &Form {
    type Output = Form;
    fn mul(self, rhs: Complex64) -> Form {
        self.scale(rhs)
    }
}
