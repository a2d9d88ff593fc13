//! JSON interchange for curvature tensors and Kähler forms.
//!
//! Tensor files use 1-based indices:
//!
//! ```json
//! { "n": 2, "r": 2,
//!   "coeffs": [ { "j": 1, "k": 1, "lambda": 1, "mu": 1, "re": 0.5, "im": 0.0 } ] }
//! ```
//!
//! Entries are written in `(j, k, lambda, mu)` order, exact zeros are
//! omitted, and floats carry 17 significant digits, so save → load → save
//! is byte-stable.

use std::collections::BTreeSet;
use std::io::{self, Write};
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::curvature::{CurvatureTensor, Kaehler11};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
struct CoeffEntry {
    j: usize,
    k: usize,
    lambda: usize,
    mu: usize,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
struct TensorFile {
    n: usize,
    r: usize,
    coeffs: Vec<CoeffEntry>,
}

/// Pretty JSON with every float written as `{:.16e}`.
pub struct FixedFloatFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl Default for FixedFloatFormatter<'_> {
    fn default() -> Self {
        FixedFloatFormatter {
            inner: PrettyFormatter::with_indent(b"  "),
        }
    }
}

impl Formatter for FixedFloatFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}

/// Serializes `value` with [`FixedFloatFormatter`], newline-terminated.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloatFormatter::default());
    value.serialize(&mut ser).expect("serializing to memory");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits utf-8")
}

fn parse_error(e: serde_json::Error) -> Error {
    let message = e.to_string();
    // serde_json appends " at line L column C"; keep the message itself
    let message = match message.rfind(" at line ") {
        Some(pos) => message[..pos].to_string(),
        None => message,
    };
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message,
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn tensor_to_json(t: &CurvatureTensor) -> String {
    let mut coeffs = Vec::new();
    for j in 0..t.n() {
        for k in 0..t.n() {
            for l in 0..t.r() {
                for m in 0..t.r() {
                    let c = t.get(j, k, l, m);
                    if c.re != 0.0 || c.im != 0.0 {
                        coeffs.push(CoeffEntry {
                            j: j + 1,
                            k: k + 1,
                            lambda: l + 1,
                            mu: m + 1,
                            re: c.re,
                            im: c.im,
                        });
                    }
                }
            }
        }
    }
    to_json_string(&TensorFile {
        n: t.n(),
        r: t.r(),
        coeffs,
    })
}

/// Relative tolerance of the hermitian-symmetry check on load.
pub const LOAD_HERMITIAN_TOL: f64 = 1e-12;

/// Parses a tensor. With `symmetrize`, hermitian symmetry is enforced by
/// averaging; otherwise any violation is an error listing the offending
/// entries.
pub fn tensor_from_json(text: &str, symmetrize: bool) -> Result<CurvatureTensor> {
    let file: TensorFile = serde_json::from_str(text).map_err(parse_error)?;
    if file.n == 0 || file.r == 0 {
        return Err(Error::InvalidTensor(format!(
            "n and r must be positive (got n = {}, r = {})",
            file.n, file.r
        )));
    }
    if file.n > 12 || file.r > 12 {
        return Err(Error::InvalidTensor(format!(
            "n and r are limited to 12 (got n = {}, r = {})",
            file.n, file.r
        )));
    }
    let mut t = CurvatureTensor::zeros(file.n, file.r);
    let mut seen = BTreeSet::new();
    for (pos, e) in file.coeffs.iter().enumerate() {
        let in_range = |v: usize, max: usize| (1..=max).contains(&v);
        if !(in_range(e.j, file.n) && in_range(e.k, file.n)) {
            return Err(Error::InvalidTensor(format!(
                "coeffs[{pos}]: (j, k) = ({}, {}) outside 1..={}",
                e.j, e.k, file.n
            )));
        }
        if !(in_range(e.lambda, file.r) && in_range(e.mu, file.r)) {
            return Err(Error::InvalidTensor(format!(
                "coeffs[{pos}]: (lambda, mu) = ({}, {}) outside 1..={}",
                e.lambda, e.mu, file.r
            )));
        }
        let key = (e.j, e.k, e.lambda, e.mu);
        if !seen.insert(key) {
            return Err(Error::InvalidTensor(format!(
                "coeffs[{pos}]: duplicate entry ({}, {}, {}, {})",
                e.j, e.k, e.lambda, e.mu
            )));
        }
        if !(e.re.is_finite() && e.im.is_finite()) {
            return Err(Error::InvalidTensor(format!("coeffs[{pos}]: non-finite value")));
        }
        t.set(e.j - 1, e.k - 1, e.lambda - 1, e.mu - 1, Complex64::new(e.re, e.im));
    }
    if symmetrize {
        return Ok(t.symmetrized());
    }
    t.validate(LOAD_HERMITIAN_TOL * (1.0 + t.max_abs()))?;
    Ok(t)
}

pub fn load_tensor(path: &Path, symmetrize: bool) -> Result<CurvatureTensor> {
    tensor_from_json(&read_file(path)?, symmetrize)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixEntry {
    Real(f64),
    Complex { re: f64, im: f64 },
}

impl MatrixEntry {
    fn value(&self) -> Complex64 {
        match *self {
            MatrixEntry::Real(re) => Complex64::new(re, 0.0),
            MatrixEntry::Complex { re, im } => Complex64::new(re, im),
        }
    }
}

fn omega_from_json(text: &str, n: usize) -> Result<Kaehler11> {
    let rows: Vec<Vec<MatrixEntry>> = serde_json::from_str(text).map_err(parse_error)?;
    if rows.len() != n || rows.iter().any(|row| row.len() != n) {
        return Err(Error::Invalid(format!(
            "omega must be a {n}x{n} matrix to match the tensor"
        )));
    }
    let g = DMatrix::from_fn(n, n, |a, b| rows[a][b].value());
    Kaehler11::new(g)
}

/// Kähler form from a command-line spec: `euclidean`, `diag:a,b,...`,
/// `@path` to a JSON matrix file, or an inline JSON matrix whose entries are
/// numbers or `{"re": .., "im": ..}` objects. The result must be positive
/// definite.
pub fn parse_omega(spec: &str, n: usize) -> Result<Kaehler11> {
    let spec = spec.trim();
    let w = if spec.eq_ignore_ascii_case("euclidean") {
        Kaehler11::euclidean(n)
    } else if let Some(list) = spec.strip_prefix("diag:") {
        let entries = list
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Invalid(format!("omega diagonal entry {s:?}: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if entries.len() != n {
            return Err(Error::Invalid(format!(
                "omega has {} diagonal entries, expected {n}",
                entries.len()
            )));
        }
        Kaehler11::diagonal(&entries)
    } else if let Some(path) = spec.strip_prefix('@') {
        omega_from_json(&read_file(Path::new(path))?, n)?
    } else {
        omega_from_json(spec, n)?
    };
    w.require_positive_definite()?;
    Ok(w)
}
