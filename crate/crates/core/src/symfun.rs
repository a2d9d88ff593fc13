//! Elementary (`γ_k`) and complete homogeneous (`σ_k`) symmetric polynomials,
//! over scalars and over the commutative algebra of even-degree forms.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exterior::{wedge, Form, MultiIndex};

/// A commutative algebra with unit, as far as the recursions here need it.
pub trait Commutative: Clone {
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, s: f64) -> Self;
    fn is_unit(&self) -> bool;
    /// Whether `self` and `other` live in the same algebra instance.
    fn compatible(&self, other: &Self) -> bool;
    /// The zero element in graded degree `degree`.
    fn zero_of_degree(&self, degree: usize) -> Self;
}

impl Commutative for f64 {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
    fn is_unit(&self) -> bool {
        *self == 1.0
    }
    fn compatible(&self, _: &Self) -> bool {
        true
    }
    fn zero_of_degree(&self, _: usize) -> Self {
        0.0
    }
}

/// Even bidegree (k,k) forms on a common `C^m`; the product is the wedge.
/// Sums of different bidegrees are not representable, so `add` is only
/// used on same-degree terms by the recursions below.
impl Commutative for Form {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        wedge(self, other).expect("forms share the ambient dimension")
    }
    fn scale(&self, s: f64) -> Self {
        self.scale_real(s)
    }
    fn is_unit(&self) -> bool {
        self.bidegree() == (0, 0)
            && self.num_terms() == 1
            && self.coeff(MultiIndex::EMPTY, MultiIndex::EMPTY) == Complex64::new(1.0, 0.0)
    }
    fn compatible(&self, other: &Self) -> bool {
        let (p, q) = self.bidegree();
        self.dim() == other.dim() && p == q
    }
    fn zero_of_degree(&self, degree: usize) -> Self {
        Form::zero(self.dim(), degree, degree)
    }
}

/// `entries[0..=m]` with `entries[0]` the unit; entry `j` has degree `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymSeq<T> {
    entries: Vec<T>,
}

impl<T: Commutative> SymSeq<T> {
    pub fn new(entries: Vec<T>) -> Result<Self> {
        match entries.first() {
            Some(u) if u.is_unit() => {}
            _ => return Err(Error::NonUnitLeading),
        }
        if !entries.iter().all(|e| e.compatible(&entries[0])) {
            return Err(Error::Invalid(
                "sequence entries belong to different algebras".into(),
            ));
        }
        Ok(SymSeq { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, j: usize) -> Option<&T> {
        self.entries.get(j)
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<T> {
        self.entries
    }

    pub fn unit(&self) -> &T {
        &self.entries[0]
    }
}

impl<T> std::ops::Index<usize> for SymSeq<T> {
    type Output = T;
    fn index(&self, j: usize) -> &T {
        &self.entries[j]
    }
}

/// `γ_k(values)`.
pub fn elem_sym(values: &[f64], k: usize) -> Result<f64> {
    if k > values.len() {
        return Err(Error::OutOfRange {
            what: "k",
            value: k,
            min: 0,
            max: values.len(),
        });
    }
    Ok(elem_sym_all(values)[k])
}

/// `γ_0, ..., γ_n` of `values` by the product expansion of `∏ (1 + x_i t)`.
pub fn elem_sym_all(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (i, &x) in values.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] += x * e[k - 1];
        }
    }
    e
}

const DIRECT_COMPLETE_MAX: usize = 6;

/// `σ_k(values)` by explicit enumeration of weakly increasing index tuples.
/// Only provided for `k <= 6`; larger degrees go through [`newton_convert`].
pub fn complete_sym(values: &[f64], k: usize) -> Result<f64> {
    if k > DIRECT_COMPLETE_MAX {
        return Err(Error::OutOfRange {
            what: "k",
            value: k,
            min: 0,
            max: DIRECT_COMPLETE_MAX,
        });
    }
    fn go(values: &[f64], start: usize, left: usize, prod: f64) -> f64 {
        if left == 0 {
            return prod;
        }
        (start..values.len())
            .map(|i| go(values, i, left - 1, prod * values[i]))
            .sum()
    }
    Ok(go(values, 0, k, 1.0))
}

/// `σ_0, ..., σ_{m_max}` from `γ_0, γ_1, ...` via the relation
/// `Σ_{j=0}^m (-1)^j σ_j γ_{m-j} = 0`, i.e.
/// `σ_m = Σ_{j=1}^m (-1)^{j+1} γ_j σ_{m-j}`. Missing `γ_j` are zero.
pub fn newton_convert<T: Commutative>(gammas: &SymSeq<T>, m_max: usize) -> SymSeq<T> {
    let mut sigmas: Vec<T> = vec![gammas.unit().clone()];
    for m in 1..=m_max {
        let mut acc: Option<T> = None;
        for j in 1..=m.min(gammas.len() - 1) {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            let term = gammas[j].mul(&sigmas[m - j]).scale(sign);
            acc = Some(match acc {
                Some(a) => a.add(&term),
                None => term,
            });
        }
        sigmas.push(acc.unwrap_or_else(|| gammas.unit().zero_of_degree(m)));
    }
    SymSeq { entries: sigmas }
}
