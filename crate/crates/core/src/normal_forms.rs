//! Symplectic matrices, basic normal forms, the ⋄-product and the functions `D_ω`, `ν_ω`.
//!
//! Matrices act on `(x₁..xₙ, y₁..yₙ)` with `J = ((0, −I), (I, 0))`. Rotations are
//! `R(θ) = ((cos θ, −sin θ), (sin θ, cos θ))`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iteration::NormalFormDecomposition;
use crate::numeric::{parse_rational, rational_to_f64, Rational, Real};

pub const SYMPLECTIC_TOL: f64 = 1e-9;
pub const RANK_TOL: f64 = 1e-9;

pub fn j_matrix(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = -1.0;
        j[(n + i, i)] = 1.0;
    }
    j
}

/// `max |MᵀJM − J|`.
pub fn symplectic_defect(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows() / 2;
    let j = j_matrix(n);
    (m.transpose() * &j * m - j).amax()
}

/// A real symplectic matrix with an optional exact rational image.
#[derive(Clone, Debug)]
pub struct SymplecticMatrix {
    n: usize,
    values: DMatrix<f64>,
    exact: Option<Vec<Rational>>,
}

fn exact_symplectic_defect(n: usize, e: &[Rational]) -> Option<f64> {
    let d = 2 * n;
    let jv = |i: usize, k: usize| -> i128 {
        if i < n && k == i + n {
            -1
        } else if i >= n && k + n == i {
            1
        } else {
            0
        }
    };
    let mut worst = 0.0f64;
    for a in 0..d {
        for b in 0..d {
            // (MᵀJM)_{ab} = Σ_{i,k} M_{ia} J_{ik} M_{kb}
            let mut s = Rational::zero();
            for i in 0..d {
                let k = if i < n { i + n } else { i - n };
                let j = jv(i, k);
                if j != 0 {
                    s += e[i * d + a] * e[k * d + b] * Rational::from_integer(j);
                }
            }
            let diff = s - Rational::from_integer(jv(a, b));
            if !diff.is_zero() {
                worst = worst.max(rational_to_f64(&diff).abs().max(f64::MIN_POSITIVE));
            }
        }
    }
    (worst > 0.0).then_some(worst)
}

impl SymplecticMatrix {
    pub fn identity(n: usize) -> SymplecticMatrix {
        let d = 2 * n;
        let exact = (0..d * d)
            .map(|k| if k / d == k % d { Rational::one() } else { Rational::zero() })
            .collect();
        SymplecticMatrix { n, values: DMatrix::identity(d, d), exact: Some(exact) }
    }

    /// Validates a float matrix against `MᵀJM = J` within `1e-9`.
    pub fn from_f64(values: DMatrix<f64>) -> Result<SymplecticMatrix> {
        Self::from_f64_tol(values, SYMPLECTIC_TOL)
    }

    pub fn from_f64_tol(values: DMatrix<f64>, tol: f64) -> Result<SymplecticMatrix> {
        let d = values.nrows();
        if d == 0 || !d.is_multiple_of(2) || values.ncols() != d {
            return Err(Error::Dimension(format!(
                "expected a square even-dimensional matrix, got {}×{}",
                values.nrows(),
                values.ncols()
            )));
        }
        let defect = symplectic_defect(&values);
        if !(defect <= tol) {
            return Err(Error::NotSymplectic { defect });
        }
        Ok(SymplecticMatrix { n: d / 2, values, exact: None })
    }

    /// Validates a row-major rational matrix exactly.
    pub fn from_exact(n: usize, entries: Vec<Rational>) -> Result<SymplecticMatrix> {
        let d = 2 * n;
        if n == 0 || entries.len() != d * d {
            return Err(Error::Dimension(format!(
                "expected {} entries for n = {n}, got {}",
                d * d,
                entries.len()
            )));
        }
        if let Some(defect) = exact_symplectic_defect(n, &entries) {
            return Err(Error::NotSymplectic { defect });
        }
        let values = DMatrix::from_row_iterator(d, d, entries.iter().map(rational_to_f64));
        Ok(SymplecticMatrix { n, values, exact: Some(entries) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// Row-major exact entries, when every entry is rational.
    pub fn exact(&self) -> Option<&[Rational]> {
        self.exact.as_deref()
    }

    pub fn defect(&self) -> f64 {
        symplectic_defect(&self.values)
    }
}

impl PartialEq for SymplecticMatrix {
    fn eq(&self, other: &Self) -> bool {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a == b,
            _ => self.n == other.n && (&self.values - &other.values).amax() <= SYMPLECTIC_TOL,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EntryRepr {
    Exact(String),
    Float(f64),
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    n: usize,
    entries: Vec<EntryRepr>,
}

impl Serialize for SymplecticMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = match &self.exact {
            Some(e) => e.iter().map(|q| EntryRepr::Exact(q.to_string())).collect(),
            None => {
                let d = 2 * self.n;
                (0..d * d).map(|k| EntryRepr::Float(self.values[(k / d, k % d)])).collect()
            }
        };
        MatrixRepr { n: self.n, entries }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymplecticMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = MatrixRepr::deserialize(d)?;
        let dim = 2 * repr.n;
        if repr.entries.len() != dim * dim {
            return Err(D::Error::custom(format!(
                "expected {} entries for n = {}, got {}",
                dim * dim,
                repr.n,
                repr.entries.len()
            )));
        }
        let all_exact = repr.entries.iter().all(|e| matches!(e, EntryRepr::Exact(_)));
        let result = if all_exact {
            let exact = repr
                .entries
                .iter()
                .map(|e| match e {
                    EntryRepr::Exact(s) => parse_rational(s),
                    EntryRepr::Float(_) => unreachable!(),
                })
                .collect::<Result<Vec<_>>>()
                .map_err(D::Error::custom)?;
            SymplecticMatrix::from_exact(repr.n, exact)
        } else {
            let vals = repr
                .entries
                .iter()
                .map(|e| match e {
                    EntryRepr::Exact(s) => parse_rational(s).map(|q| rational_to_f64(&q)),
                    EntryRepr::Float(x) => Ok(*x),
                })
                .collect::<Result<Vec<_>>>()
                .map_err(D::Error::custom)?;
            SymplecticMatrix::from_f64(DMatrix::from_row_slice(dim, dim, &vals))
        };
        result.map_err(D::Error::custom)
    }
}

/// An angle `θ` recorded as `θ/π ∈ (0, 2) \ {1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Real", into = "Real")]
pub struct AngleClass(Real);

impl AngleClass {
    pub fn new(over_pi: Real) -> Result<AngleClass> {
        let in_range = over_pi.signum() > 0 && over_pi.cmp_real(&Real::int(2)).is_lt();
        let is_pi = over_pi.as_rational().is_some_and(|q| q.is_one());
        if !in_range || is_pi {
            return Err(Error::InvalidAngle(format!(
                "θ/π must lie in (0, 2) and differ from 1, got {over_pi}"
            )));
        }
        Ok(AngleClass(over_pi))
    }

    pub fn rational(p: i128, q: i128) -> Result<AngleClass> {
        AngleClass::new(Real::ratio(p, q))
    }

    /// Reduces `x mod 2` into an angle class; integers (±1 eigenvalues) are rejected.
    pub fn reduce(x: &Real) -> Result<AngleClass> {
        let shift = x.floor().div_euclid(2) * 2;
        AngleClass::new(x - &Real::int(shift))
    }

    pub fn over_pi(&self) -> &Real {
        &self.0
    }

    pub fn radians(&self) -> f64 {
        PI * self.0.to_f64()
    }

    pub fn is_rational(&self) -> bool {
        self.0.is_rational()
    }

    /// The angle `2π − θ`.
    pub fn conjugate(&self) -> AngleClass {
        AngleClass(&Real::int(2) - &self.0)
    }

    /// Sign of `sin θ`.
    pub fn sin_sign(&self) -> i32 {
        if self.0.cmp_real(&Real::int(1)).is_lt() {
            1
        } else {
            -1
        }
    }
}

impl TryFrom<Real> for AngleClass {
    type Error = Error;
    fn try_from(x: Real) -> Result<AngleClass> {
        AngleClass::new(x)
    }
}

impl From<AngleClass> for Real {
    fn from(a: AngleClass) -> Real {
        a.0
    }
}

/// A point of the unit circle that can carry a spectral angle.
#[derive(Clone, Debug, PartialEq)]
pub enum UnitPoint {
    One,
    MinusOne,
    Angle(AngleClass),
}

impl UnitPoint {
    /// From `θ/π`, reduced mod 2.
    pub fn from_over_pi(x: &Real) -> UnitPoint {
        match x.as_rational() {
            Some(q) if q.is_integer() => {
                if q.to_integer().rem_euclid(2) == 0 {
                    UnitPoint::One
                } else {
                    UnitPoint::MinusOne
                }
            }
            _ => UnitPoint::Angle(AngleClass::reduce(x).expect("non-integer reduces into range")),
        }
    }

    /// `θ/π ∈ [0, 2)`.
    pub fn over_pi(&self) -> Real {
        match self {
            UnitPoint::One => Real::int(0),
            UnitPoint::MinusOne => Real::int(1),
            UnitPoint::Angle(a) => a.over_pi().clone(),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            UnitPoint::One => Complex64::new(1.0, 0.0),
            UnitPoint::MinusOne => Complex64::new(-1.0, 0.0),
            UnitPoint::Angle(a) => Complex64::from_polar(1.0, a.radians()),
        }
    }

    pub fn conjugate(&self) -> UnitPoint {
        match self {
            UnitPoint::Angle(a) => UnitPoint::Angle(a.conjugate()),
            other => other.clone(),
        }
    }
}

impl Serialize for UnitPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.over_pi().serialize(s)
    }
}

impl<'de> Deserialize<'de> for UnitPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(UnitPoint::from_over_pi(&Real::deserialize(d)?))
    }
}

/// The basic normal forms `D(λ)`, `N₁(λ, b)`, `R(θ)`, `N₂(ω, b)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form")]
pub enum BasicNormalForm {
    D { lambda: i8 },
    N1 { lambda: i8, b: i8 },
    R { theta: AngleClass },
    N2 { theta: AngleClass, b: [f64; 4] },
}

impl BasicNormalForm {
    pub fn d(lambda: i8) -> Result<BasicNormalForm> {
        BasicNormalForm::D { lambda }.checked()
    }

    pub fn n1(lambda: i8, b: i8) -> Result<BasicNormalForm> {
        BasicNormalForm::N1 { lambda, b }.checked()
    }

    pub fn r(theta: AngleClass) -> BasicNormalForm {
        BasicNormalForm::R { theta }
    }

    pub fn n2(theta: AngleClass, b: [f64; 4]) -> Result<BasicNormalForm> {
        BasicNormalForm::N2 { theta, b }.checked()
    }

    /// The `N₂` block with `b₂ − b₃ = d` and the remaining entries fixed by symplecticity.
    pub fn n2_with_twist(theta: AngleClass, d: f64) -> Result<BasicNormalForm> {
        let (s, c) = theta.radians().sin_cos();
        let diag = -c * d / (2.0 * s);
        BasicNormalForm::n2(theta, [diag, d / 2.0, -d / 2.0, diag])
    }

    /// Checks the variant's parameter constraints.
    pub fn checked(self) -> Result<BasicNormalForm> {
        match &self {
            BasicNormalForm::D { lambda } if ![2, -2].contains(lambda) => {
                Err(Error::InvalidForm(format!("D(λ) requires λ = ±2, got {lambda}")))
            }
            BasicNormalForm::N1 { lambda, .. } if ![1, -1].contains(lambda) => {
                Err(Error::InvalidForm(format!("N1(λ, b) requires λ = ±1, got {lambda}")))
            }
            BasicNormalForm::N1 { b, .. } if !(-1..=1).contains(b) => {
                Err(Error::InvalidForm(format!("N1(λ, b) requires b ∈ {{−1, 0, 1}}, got {b}")))
            }
            BasicNormalForm::N2 { theta, b } => {
                if b[1] == b[2] {
                    return Err(Error::InvalidForm("N2 requires b₂ ≠ b₃".into()));
                }
                let (s, c) = theta.radians().sin_cos();
                let gap = c * (b[1] - b[2]) + s * (b[0] + b[3]);
                if gap.abs() > SYMPLECTIC_TOL * (1.0 + b.iter().map(|x| x.abs()).fold(0.0, f64::max)) {
                    return Err(Error::InvalidForm(format!(
                        "N2 block is not symplectic: cos θ (b₂ − b₃) + sin θ (b₁ + b₄) = {gap:.3e}"
                    )));
                }
                Ok(self)
            }
            _ => Ok(self),
        }
    }

    pub fn half_dim(&self) -> usize {
        match self {
            BasicNormalForm::N2 { .. } => 2,
            _ => 1,
        }
    }

    /// `N₂` triviality: trivial iff `(b₂ − b₃) sin θ > 0`. `None` for other variants.
    pub fn n2_is_trivial(&self) -> Option<bool> {
        match self {
            BasicNormalForm::N2 { theta, b } => Some((b[1] - b[2]) * f64::from(theta.sin_sign()) > 0.0),
            _ => None,
        }
    }
}

fn rat(p: i128, q: i128) -> Rational {
    Rational::new(p, q)
}

/// The literal matrix of a basic normal form.
pub fn realize(form: &BasicNormalForm) -> SymplecticMatrix {
    let exact2 = |e: [Rational; 4]| SymplecticMatrix::from_exact(1, e.to_vec()).expect("basic form is symplectic");
    match form {
        BasicNormalForm::D { lambda } => {
            let l = i128::from(*lambda);
            exact2([rat(l, 1), rat(0, 1), rat(0, 1), rat(1, l)])
        }
        BasicNormalForm::N1 { lambda, b } => {
            let l = i128::from(*lambda);
            exact2([rat(l, 1), rat(i128::from(*b), 1), rat(0, 1), rat(l, 1)])
        }
        BasicNormalForm::R { theta } => {
            let quarter = theta.over_pi().as_rational().and_then(|q| {
                if *q == rat(1, 2) {
                    Some(1)
                } else if *q == rat(3, 2) {
                    Some(-1)
                } else {
                    None
                }
            });
            match quarter {
                Some(s) => exact2([rat(0, 1), rat(-s, 1), rat(s, 1), rat(0, 1)]),
                None => {
                    let (s, c) = theta.radians().sin_cos();
                    SymplecticMatrix::from_f64(DMatrix::from_row_slice(2, 2, &[c, -s, s, c]))
                        .expect("rotation is symplectic")
                }
            }
        }
        BasicNormalForm::N2 { theta, b } => {
            SymplecticMatrix::from_f64(n2_matrix(theta.radians(), b)).expect("checked N2 block is symplectic")
        }
    }
}

/// `((R(θ), b), (0, R(θ)))` in `(x₁, x₂, y₁, y₂)` coordinates.
pub fn n2_matrix(theta: f64, b: &[f64; 4]) -> DMatrix<f64> {
    let (s, c) = theta.sin_cos();
    DMatrix::from_row_slice(
        4,
        4,
        &[c, -s, b[0], b[1], s, c, b[2], b[3], 0.0, 0.0, c, -s, 0.0, 0.0, s, c],
    )
}

/// Interleaves the `A, B, C, D` blocks of two matrices.
pub fn diamond_raw(m1: &DMatrix<f64>, m2: &DMatrix<f64>) -> DMatrix<f64> {
    let (a, b) = (m1.nrows() / 2, m2.nrows() / 2);
    let n = a + b;
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    let map1 = |i: usize| if i < a { i } else { n + (i - a) };
    let map2 = |i: usize| if i < b { a + i } else { n + a + (i - b) };
    for i in 0..2 * a {
        for j in 0..2 * a {
            out[(map1(i), map1(j))] = m1[(i, j)];
        }
    }
    for i in 0..2 * b {
        for j in 0..2 * b {
            out[(map2(i), map2(j))] = m2[(i, j)];
        }
    }
    out
}

fn diamond_exact(a: usize, e1: &[Rational], b: usize, e2: &[Rational]) -> Vec<Rational> {
    let n = a + b;
    let d = 2 * n;
    let mut out = vec![Rational::zero(); d * d];
    let map1 = |i: usize| if i < a { i } else { n + (i - a) };
    let map2 = |i: usize| if i < b { a + i } else { n + a + (i - b) };
    for i in 0..2 * a {
        for j in 0..2 * a {
            out[map1(i) * d + map1(j)] = e1[i * 2 * a + j];
        }
    }
    for i in 0..2 * b {
        for j in 0..2 * b {
            out[map2(i) * d + map2(j)] = e2[i * 2 * b + j];
        }
    }
    out
}

/// `M₁ ⋄ M₂`.
pub fn diamond(m1: &SymplecticMatrix, m2: &SymplecticMatrix) -> SymplecticMatrix {
    let n = m1.n + m2.n;
    let values = diamond_raw(&m1.values, &m2.values);
    let exact = match (&m1.exact, &m2.exact) {
        (Some(e1), Some(e2)) => Some(diamond_exact(m1.n, e1, m2.n, e2)),
        _ => None,
    };
    SymplecticMatrix { n, values, exact }
}

/// Folds `⋄` over a non-empty list.
pub fn diamond_all(ms: &[SymplecticMatrix]) -> Option<SymplecticMatrix> {
    let (first, rest) = ms.split_first()?;
    Some(rest.iter().fold(first.clone(), |acc, m| diamond(&acc, m)))
}

fn exact_shifted(m: &SymplecticMatrix, shift: i128) -> Option<Vec<Rational>> {
    let d = 2 * m.n;
    let e = m.exact.as_ref()?;
    Some(
        e.iter()
            .enumerate()
            .map(|(k, v)| if k / d == k % d { v - Rational::from_integer(shift) } else { *v })
            .collect(),
    )
}

fn real_unit(omega: Complex64) -> Option<i128> {
    if omega.im != 0.0 {
        return None;
    }
    if omega.re == 1.0 {
        Some(1)
    } else if omega.re == -1.0 {
        Some(-1)
    } else {
        None
    }
}

/// Determinant over `Q` by Gaussian elimination.
pub fn exact_det(d: usize, mut a: Vec<Rational>) -> Rational {
    let mut det = Rational::one();
    for col in 0..d {
        let Some(piv) = (col..d).find(|&r| !a[r * d + col].is_zero()) else {
            return Rational::zero();
        };
        if piv != col {
            for k in 0..d {
                a.swap(piv * d + k, col * d + k);
            }
            det = -det;
        }
        let p = a[col * d + col];
        det *= p;
        for r in col + 1..d {
            let f = a[r * d + col] / p;
            if f.is_zero() {
                continue;
            }
            for k in col..d {
                let v = a[col * d + k];
                a[r * d + k] -= f * v;
            }
        }
    }
    det
}

/// Rank over `Q` of a `rows × cols` row-major matrix.
pub fn exact_rank(rows: usize, cols: usize, mut a: Vec<Rational>) -> usize {
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| !a[r * cols + col].is_zero()) else {
            continue;
        };
        for k in 0..cols {
            a.swap(piv * cols + k, rank * cols + k);
        }
        let p = a[rank * cols + col];
        for r in 0..rows {
            if r == rank {
                continue;
            }
            let f = a[r * cols + col] / p;
            if f.is_zero() {
                continue;
            }
            for k in col..cols {
                let v = a[rank * cols + k];
                a[r * cols + k] -= f * v;
            }
        }
        rank += 1;
    }
    rank
}

fn complex_shifted(m: &DMatrix<f64>, omega: Complex64) -> DMatrix<Complex64> {
    let d = m.nrows();
    DMatrix::from_fn(d, d, |i, j| {
        let v = Complex64::new(m[(i, j)], 0.0);
        if i == j {
            v - omega
        } else {
            v
        }
    })
}

/// Exact `D_{±1}(M)` when `M` has rational entries.
pub fn d_omega_exact(m: &SymplecticMatrix, sign: i128) -> Option<Rational> {
    let shifted = exact_shifted(m, sign)?;
    let det = exact_det(2 * m.n, shifted);
    let parity = if (m.n - 1).is_multiple_of(2) { 1 } else { -1 };
    let omega_pow = if m.n.is_multiple_of(2) { 1 } else { sign };
    let prefactor = parity * omega_pow;
    Some(det * Rational::from_integer(prefactor))
}

/// `D_ω(M) = (−1)^{n−1} ω̄ⁿ det(M − ωI)`.
pub fn d_omega(m: &SymplecticMatrix, omega: Complex64) -> Complex64 {
    if let Some(sign) = real_unit(omega) {
        if let Some(v) = d_omega_exact(m, sign) {
            return Complex64::new(rational_to_f64(&v), 0.0);
        }
    }
    let n = m.n as i32;
    let det = complex_shifted(&m.values, omega).determinant();
    let sign = if (n - 1) % 2 == 0 { 1.0 } else { -1.0 };
    let v = omega.conj().powi(n) * det * sign;
    if real_unit(omega).is_some() {
        Complex64::new(v.re, 0.0)
    } else {
        v
    }
}

/// `dim_C ker(M − ωI)` with singular-value threshold `tol` (relative to `max(1, ‖M − ωI‖₂)`).
pub fn nu_omega_tol(m: &SymplecticMatrix, omega: Complex64, tol: f64) -> usize {
    if let Some(sign) = real_unit(omega) {
        if let Some(shifted) = exact_shifted(m, sign) {
            let d = 2 * m.n;
            return d - exact_rank(d, d, shifted);
        }
    }
    nu_omega_float(&m.values, omega, tol)
}

pub fn nu_omega(m: &SymplecticMatrix, omega: Complex64) -> usize {
    nu_omega_tol(m, omega, RANK_TOL)
}

pub(crate) fn nu_omega_float(m: &DMatrix<f64>, omega: Complex64, tol: f64) -> usize {
    let sv = complex_shifted(m, omega).singular_values();
    let scale = sv.iter().cloned().fold(1.0f64, f64::max);
    sv.iter().filter(|s| **s < tol * scale).count()
}

/// Unit-circle eigenvalues of the realized decomposition with algebraic multiplicities,
/// ordered by angle in `[0, 2π)`.
pub fn unit_spectrum(decomp: &NormalFormDecomposition) -> Vec<(UnitPoint, usize)> {
    let mut out: Vec<(UnitPoint, usize)> = Vec::new();
    let mut push = |p: UnitPoint, mult: usize| {
        if mult == 0 {
            return;
        }
        match out.iter_mut().find(|(q, _)| *q == p) {
            Some(entry) => entry.1 += mult,
            None => out.push((p, mult)),
        }
    };
    let ones = 2 * (decomp.p_minus + decomp.p_zero + decomp.p_plus) as usize;
    let minus = 2 * (decomp.q_minus + decomp.q_zero + decomp.q_plus) as usize;
    push(UnitPoint::One, ones);
    push(UnitPoint::MinusOne, minus);
    for t in &decomp.thetas {
        push(UnitPoint::Angle(t.clone()), 1);
        push(UnitPoint::Angle(t.conjugate()), 1);
    }
    for a in decomp.alphas.iter().chain(&decomp.betas) {
        push(UnitPoint::Angle(a.clone()), 2);
        push(UnitPoint::Angle(a.conjugate()), 2);
    }
    out.sort_by(|a, b| a.0.over_pi().cmp_real(&b.0.over_pi()));
    out
}
