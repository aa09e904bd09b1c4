//! Closed-form iteration of the Maslov-type index, nullity and mean index from normal-form
//! data, together with the splitting-number tables they are built on.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal_forms::{
    diamond_all, nu_omega, realize, unit_spectrum, AngleClass, BasicNormalForm, SymplecticMatrix, UnitPoint,
};
use crate::numeric::{floor_parts, FloorParts, Real};

/// Block counts and angles of the normal form `f(1)` of a monodromy matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalFormDecomposition {
    pub n: u32,
    #[serde(default)]
    pub p_minus: u32,
    #[serde(default)]
    pub p_zero: u32,
    #[serde(default)]
    pub p_plus: u32,
    #[serde(default)]
    pub q_minus: u32,
    #[serde(default)]
    pub q_zero: u32,
    #[serde(default)]
    pub q_plus: u32,
    #[serde(default)]
    pub thetas: Vec<AngleClass>,
    #[serde(default)]
    pub alphas: Vec<AngleClass>,
    #[serde(default)]
    pub betas: Vec<AngleClass>,
    #[serde(default)]
    pub k: u32,
}

impl NormalFormDecomposition {
    pub fn empty(n: u32) -> NormalFormDecomposition {
        NormalFormDecomposition {
            n,
            p_minus: 0,
            p_zero: 0,
            p_plus: 0,
            q_minus: 0,
            q_zero: 0,
            q_plus: 0,
            thetas: Vec::new(),
            alphas: Vec::new(),
            betas: Vec::new(),
            k: 0,
        }
    }

    pub fn r(&self) -> u32 {
        self.thetas.len() as u32
    }

    pub fn r_star(&self) -> u32 {
        self.alphas.len() as u32
    }

    pub fn r_zero(&self) -> u32 {
        self.betas.len() as u32
    }

    /// `p₋ + p₀ + p₊ + q₋ + q₀ + q₊ + r + 2r* + 2r₀ + k`.
    pub fn block_dimension(&self) -> u32 {
        self.p_minus
            + self.p_zero
            + self.p_plus
            + self.q_minus
            + self.q_zero
            + self.q_plus
            + self.r()
            + 2 * self.r_star()
            + 2 * self.r_zero()
            + self.k
    }

    pub fn block_count(&self) -> u32 {
        self.p_minus
            + self.p_zero
            + self.p_plus
            + self.q_minus
            + self.q_zero
            + self.q_plus
            + self.r()
            + self.r_star()
            + self.r_zero()
            + self.k
    }

    pub fn check(&self) -> Result<()> {
        let dim = self.block_dimension();
        if dim != self.n || self.n == 0 {
            return Err(Error::Decomposition(format!(
                "n = {} but the blocks account for dimension {dim}",
                self.n
            )));
        }
        Ok(())
    }

    /// `ν(γ, 1) = p₋ + 2p₀ + p₊`.
    pub fn nu1(&self) -> u32 {
        self.p_minus + 2 * self.p_zero + self.p_plus
    }

    /// Whether every Floquet multiplier lies on the unit circle.
    pub fn is_elliptic(&self) -> bool {
        self.k == 0
    }

    /// The basic normal forms in canonical order; `N₂` blocks use twist `b₂ − b₃ = ∓1`.
    pub fn basic_forms(&self) -> Result<Vec<BasicNormalForm>> {
        let mut forms = Vec::new();
        let mut rep = |count: u32, form: BasicNormalForm| {
            forms.extend(std::iter::repeat_n(form, count as usize));
        };
        rep(self.p_minus, BasicNormalForm::n1(1, 1)?);
        rep(self.p_zero, BasicNormalForm::n1(1, 0)?);
        rep(self.p_plus, BasicNormalForm::n1(1, -1)?);
        rep(self.q_minus, BasicNormalForm::n1(-1, 1)?);
        rep(self.q_zero, BasicNormalForm::n1(-1, 0)?);
        rep(self.q_plus, BasicNormalForm::n1(-1, -1)?);
        rep(self.k, BasicNormalForm::d(2)?);
        let mut tail = Vec::new();
        for t in &self.thetas {
            tail.push(BasicNormalForm::r(t.clone()));
        }
        for a in &self.alphas {
            tail.push(BasicNormalForm::n2_with_twist(a.clone(), -f64::from(a.sin_sign()))?);
        }
        for b in &self.betas {
            tail.push(BasicNormalForm::n2_with_twist(b.clone(), f64::from(b.sin_sign()))?);
        }
        let k_forms: Vec<_> = forms.drain(forms.len() - self.k as usize..).collect();
        forms.extend(tail);
        forms.extend(k_forms);
        Ok(forms)
    }

    /// The ⋄-product of the basic forms.
    pub fn realize(&self) -> Result<SymplecticMatrix> {
        self.check()?;
        let mats: Vec<_> = self.basic_forms()?.iter().map(realize).collect();
        diamond_all(&mats).ok_or_else(|| Error::Decomposition("empty decomposition".into()))
    }
}

/// A decomposition together with the base index `i(γ, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathIndexData {
    pub decomp: NormalFormDecomposition,
    pub i1: i64,
    #[serde(default)]
    pub convex_mode: bool,
}

impl PathIndexData {
    pub fn new(decomp: NormalFormDecomposition, i1: i64) -> PathIndexData {
        PathIndexData { decomp, i1, convex_mode: false }
    }

    pub fn n(&self) -> u32 {
        self.decomp.n
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingPair {
    pub s_plus: u32,
    pub s_minus: u32,
}

impl std::ops::Add for SplittingPair {
    type Output = SplittingPair;
    fn add(self, o: SplittingPair) -> SplittingPair {
        SplittingPair { s_plus: self.s_plus + o.s_plus, s_minus: self.s_minus + o.s_minus }
    }
}

/// `([x], E(x), {x}, φ(x))`.
pub fn floor_e_frac_phi(x: &Real) -> FloorParts {
    floor_parts(x)
}

fn pair(s_plus: u32, s_minus: u32) -> SplittingPair {
    SplittingPair { s_plus, s_minus }
}

/// Splitting numbers of a single basic form at `ω`.
pub fn block_splitting(form: &BasicNormalForm, omega: &UnitPoint) -> SplittingPair {
    match (form, omega) {
        (BasicNormalForm::N1 { lambda: 1, b }, UnitPoint::One) if *b >= 0 => pair(1, 1),
        (BasicNormalForm::N1 { lambda: -1, b }, UnitPoint::MinusOne) if *b <= 0 => pair(1, 1),
        (BasicNormalForm::R { theta }, UnitPoint::Angle(w)) => {
            if theta == w {
                pair(0, 1)
            } else if theta.conjugate() == *w {
                pair(1, 0)
            } else {
                pair(0, 0)
            }
        }
        (f @ BasicNormalForm::N2 { theta, .. }, UnitPoint::Angle(w)) => {
            let on_spectrum = theta == w || theta.conjugate() == *w;
            if on_spectrum && f.n2_is_trivial() == Some(false) {
                pair(1, 1)
            } else {
                pair(0, 0)
            }
        }
        _ => pair(0, 0),
    }
}

/// `S^±_M(ω)` by table lookup per block, summed over the ⋄-factors.
pub fn splitting_numbers(decomp: &NormalFormDecomposition, omega: &UnitPoint) -> Result<SplittingPair> {
    Ok(decomp
        .basic_forms()?
        .iter()
        .map(|f| block_splitting(f, omega))
        .fold(SplittingPair::default(), |a, b| a + b))
}

/// `C(M) = q₀ + q₊ + r + 2r*`.
pub fn c_of_m(decomp: &NormalFormDecomposition) -> u32 {
    decomp.q_zero + decomp.q_plus + decomp.r() + 2 * decomp.r_star()
}

/// `S⁺_M(1) = p₋ + p₀`.
pub fn s_plus_one(decomp: &NormalFormDecomposition) -> u32 {
    decomp.p_minus + decomp.p_zero
}

/// Unit-spectrum angles in `(0, 2π)` with their `S⁻` weights, zero weights dropped.
pub fn weighted_angles(decomp: &NormalFormDecomposition) -> Result<Vec<(Real, u32)>> {
    let mut out = Vec::new();
    for (point, _) in unit_spectrum(decomp) {
        if point == UnitPoint::One {
            continue;
        }
        let s = splitting_numbers(decomp, &point)?.s_minus;
        if s > 0 {
            out.push((point.over_pi(), s));
        }
    }
    Ok(out)
}

fn checked_m(m: u64) -> Result<i128> {
    if m == 0 {
        return Err(Error::InvalidArgument("iteration count m must be at least 1".into()));
    }
    Ok(i128::from(m))
}

fn to_i64(v: i128) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::InvalidArgument(format!("index value {v} overflows i64")))
}

fn even(m: i128) -> i128 {
    i128::from(m % 2 == 0)
}

/// `E(m·x/2)` for `x = θ/π`.
fn e_half(x: &Real, m: i128) -> i128 {
    if x.is_rational() {
        x.as_rational().map(|q| (q * m / 2).ceil().to_integer()).unwrap_or_default()
    } else {
        x.floor_mul(m).div_euclid(2) + 1
    }
}

/// `φ(m·x/2)`.
fn phi_half(x: &Real, m: i128) -> i128 {
    match x.as_rational() {
        Some(q) => i128::from(!(q * m / 2).is_integer()),
        None => 1,
    }
}

/// `i(γ, m)` by the closed formula in the block counts.
pub fn index_iterate(data: &PathIndexData, m: u64) -> Result<i64> {
    let d = &data.decomp;
    d.check()?;
    let m = checked_m(m)?;
    let v = index_formula(data, m);
    if m == 1 && v != i128::from(data.i1) {
        return Err(Error::Internal(format!("index formula at m = 1 gives {v}, expected {}", data.i1)));
    }
    to_i64(v)
}

fn index_formula(data: &PathIndexData, m: i128) -> i128 {
    let d = &data.decomp;
    let (pm, p0, r, rs) = (i128::from(d.p_minus), i128::from(d.p_zero), i128::from(d.r()), i128::from(d.r_star()));
    let mut v = m * (i128::from(data.i1) + pm + p0 - r);
    v += 2 * d.thetas.iter().map(|t| e_half(t.over_pi(), m)).sum::<i128>();
    v -= r + pm + p0;
    v -= even(m) * i128::from(d.q_zero + d.q_plus);
    v += 2 * (d.alphas.iter().map(|a| phi_half(a.over_pi(), m)).sum::<i128>() - rs);
    v
}

/// `i(γ, m)` through splitting numbers over the unit spectrum.
pub fn index_iterate_via_splitting(data: &PathIndexData, m: u64) -> Result<i64> {
    let d = &data.decomp;
    d.check()?;
    let m = checked_m(m)?;
    let s_plus = i128::from(splitting_numbers(d, &UnitPoint::One)?.s_plus);
    let angles = weighted_angles(d)?;
    let c: i128 = angles.iter().map(|(_, s)| i128::from(*s)).sum();
    let mut v = m * (i128::from(data.i1) + s_plus - c);
    for (x, s) in &angles {
        v += 2 * e_half(x, m) * i128::from(*s);
    }
    v -= s_plus + c;
    to_i64(v)
}

/// `ν(γ, m)`.
pub fn nullity_iterate(data: &PathIndexData, m: u64) -> Result<u32> {
    let d = &data.decomp;
    d.check()?;
    let m = checked_m(m)?;
    let mut v = i128::from(d.nu1());
    v += even(m) * i128::from(d.q_minus + 2 * d.q_zero + d.q_plus);
    v += 2 * i128::from(d.r() + d.r_star() + d.r_zero());
    let phis: i128 = d
        .thetas
        .iter()
        .chain(&d.alphas)
        .chain(&d.betas)
        .map(|t| phi_half(t.over_pi(), m))
        .sum();
    v -= 2 * phis;
    u32::try_from(v).map_err(|_| Error::Internal(format!("negative nullity {v}")))
}

/// `î(γ, 1) = i₁ + p₋ + p₀ − r + Σ θ_j/π`.
pub fn mean_index(data: &PathIndexData) -> Real {
    let d = &data.decomp;
    let base = i128::from(data.i1) + i128::from(d.p_minus + d.p_zero) - i128::from(d.r());
    d.thetas.iter().fold(Real::int(base), |acc, t| &acc + t.over_pi())
}

/// `I(m) = m(i₁ + S⁺(1) − C(M)) + Σ E(mθ/π) S⁻(e^{iθ})`.
pub fn i_value(data: &PathIndexData, m: u64) -> Result<i64> {
    let d = &data.decomp;
    d.check()?;
    let m = checked_m(m)?;
    let angles = weighted_angles(d)?;
    let c = i128::from(c_of_m(d));
    let mut v = m * (i128::from(data.i1) + i128::from(s_plus_one(d)) - c);
    for (x, s) in &angles {
        v += x.ceil_mul(m) * i128::from(*s);
    }
    to_i64(v)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    DimensionMismatch { n: u32, blocks: u32 },
    ParityViolation { block: String, i1: i64, expected: String },
    ConvexNoPMinus { p_minus: u32 },
    ConvexIndexBelowN { i1: i64, n: u32 },
    ConvexMeanIndex { mean_index: String },
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Diagnostic::DimensionMismatch { n, blocks } => {
                write!(f, "n = {n} but the blocks account for dimension {blocks}")
            }
            Diagnostic::ParityViolation { block, i1, expected } => {
                write!(f, "single {block} block requires {expected} i1, got {i1}")
            }
            Diagnostic::ConvexNoPMinus { p_minus } => write!(f, "convex mode requires p₋ ≥ 1, got {p_minus}"),
            Diagnostic::ConvexIndexBelowN { i1, n } => write!(f, "convex mode requires i1 ≥ n = {n}, got {i1}"),
            Diagnostic::ConvexMeanIndex { mean_index } => {
                write!(f, "convex mode requires mean index > 2, got {mean_index}")
            }
        }
    }
}

fn single_block_parity(d: &NormalFormDecomposition) -> Option<(&'static str, i64)> {
    if d.block_count() != 1 {
        return None;
    }
    let odd = 1;
    let even = 0;
    if d.p_minus == 1 {
        Some(("N1(1,1)", odd))
    } else if d.p_zero == 1 {
        Some(("I2", odd))
    } else if d.p_plus == 1 {
        Some(("N1(1,-1)", even))
    } else if d.q_minus == 1 {
        Some(("N1(-1,1)", odd))
    } else if d.q_zero == 1 {
        Some(("-I2", odd))
    } else if d.q_plus == 1 {
        Some(("N1(-1,-1)", odd))
    } else if d.r() == 1 {
        Some(("R(θ)", odd))
    } else if d.r_star() == 1 || d.r_zero() == 1 {
        Some(("N2", even))
    } else {
        None
    }
}

/// Structural and hypothesis checks on index data, reported rather than raised.
pub fn validate(data: &PathIndexData) -> Vec<Diagnostic> {
    let d = &data.decomp;
    let mut out = Vec::new();
    let blocks = d.block_dimension();
    if blocks != d.n {
        out.push(Diagnostic::DimensionMismatch { n: d.n, blocks });
    }
    if let Some((block, parity)) = single_block_parity(d) {
        if data.i1.rem_euclid(2) != parity {
            let expected = if parity == 1 { "odd" } else { "even" };
            out.push(Diagnostic::ParityViolation { block: block.into(), i1: data.i1, expected: expected.into() });
        }
    }
    if data.convex_mode {
        if d.p_minus < 1 {
            out.push(Diagnostic::ConvexNoPMinus { p_minus: d.p_minus });
        }
        if data.i1 < i64::from(d.n) {
            out.push(Diagnostic::ConvexIndexBelowN { i1: data.i1, n: d.n });
        }
        let mi = mean_index(data);
        if d.n >= 2 && !mi.cmp_real(&Real::int(2)).is_gt() {
            out.push(Diagnostic::ConvexMeanIndex { mean_index: mi.to_string() });
        }
    }
    out
}

/// Cross-check of the derived nullity against the realized monodromy.
pub fn realized_nullity_matches(data: &PathIndexData) -> Result<bool> {
    let m = data.decomp.realize()?;
    Ok(nu_omega(&m, Complex64::new(1.0, 0.0)) == data.decomp.nu1() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn angle(p: i128, q: i128) -> AngleClass {
        AngleClass::rational(p, q).unwrap()
    }

    fn rot(theta: AngleClass, i1: i64) -> PathIndexData {
        let mut d = NormalFormDecomposition::empty(1);
        d.thetas.push(theta);
        PathIndexData::new(d, i1)
    }

    #[test]
    fn index_examples() {
        let data = rot(angle(1, 2), 1);
        assert_eq!(index_iterate(&data, 1).unwrap(), 1);
        assert_eq!(index_iterate(&data, 5).unwrap(), 3);
        assert_eq!(index_iterate_via_splitting(&data, 4).unwrap(), index_iterate(&data, 4).unwrap());
        let mut d = NormalFormDecomposition::empty(1);
        d.q_zero = 1;
        let minus = PathIndexData::new(d, 1);
        assert_eq!(index_iterate(&minus, 2).unwrap(), 1);
        assert_eq!(index_iterate(&minus, 3).unwrap(), 3);
    }

    #[test]
    fn splitting_examples() {
        let mut d = NormalFormDecomposition::empty(1);
        d.p_minus = 1;
        assert_eq!(splitting_numbers(&d, &UnitPoint::One).unwrap(), pair(1, 1));
        let r = rot(angle(1, 3), 1).decomp;
        assert_eq!(splitting_numbers(&r, &UnitPoint::Angle(angle(1, 3))).unwrap(), pair(0, 1));
        assert_eq!(splitting_numbers(&r, &UnitPoint::Angle(angle(5, 3))).unwrap(), pair(1, 0));
        assert_eq!(splitting_numbers(&r, &UnitPoint::Angle(angle(1, 2))).unwrap(), pair(0, 0));
        let mut both = NormalFormDecomposition::empty(2);
        both.p_minus = 1;
        both.thetas.push(angle(1, 3));
        assert_eq!(splitting_numbers(&both, &UnitPoint::One).unwrap(), pair(1, 1));
    }

    #[test]
    fn c_and_s_plus() {
        let mut d = NormalFormDecomposition::empty(6);
        d.q_zero = 1;
        d.q_plus = 1;
        d.thetas = vec![angle(1, 3), angle(1, 5)];
        d.alphas = vec![angle(2, 3)];
        assert_eq!(c_of_m(&d), 6);
        let sum: u32 = weighted_angles(&d).unwrap().iter().map(|(_, s)| s).sum();
        assert_eq!(sum, 6);
        let mut p = NormalFormDecomposition::empty(2);
        p.p_zero = 2;
        assert_eq!(s_plus_one(&p), 2);
        assert_eq!(splitting_numbers(&p, &UnitPoint::One).unwrap().s_plus, 2);
    }

    #[test]
    fn nontrivial_versus_trivial_n2() {
        let mut a = NormalFormDecomposition::empty(2);
        a.alphas.push(angle(1, 3));
        let mut b = NormalFormDecomposition::empty(2);
        b.betas.push(angle(1, 3));
        for m in 1..=12u64 {
            let ia = index_iterate(&PathIndexData::new(a.clone(), 0), m).unwrap();
            let ib = index_iterate(&PathIndexData::new(b.clone(), 0), m).unwrap();
            let y = Real::ratio(m as i128, 6);
            assert_eq!(ia - ib, 2 * (floor_parts(&y).phi as i64 - 1));
            assert_eq!(index_iterate_via_splitting(&PathIndexData::new(a.clone(), 0), m).unwrap(), ia);
        }
    }

    #[test]
    fn nullity_examples() {
        let irr = rot(AngleClass::new(Real::sqrt_int(2) - Real::int(1)).unwrap(), 1);
        for m in 1..10 {
            assert_eq!(nullity_iterate(&irr, m).unwrap(), 0);
        }
        let mut d = NormalFormDecomposition::empty(1);
        d.p_zero = 1;
        assert_eq!(nullity_iterate(&PathIndexData::new(d, 1), 7).unwrap(), 2);
        let mut q = NormalFormDecomposition::empty(1);
        q.q_zero = 1;
        let q = PathIndexData::new(q, 1);
        assert_eq!(nullity_iterate(&q, 3).unwrap(), 0);
        assert_eq!(nullity_iterate(&q, 4).unwrap(), 2);
        assert_eq!(nullity_iterate(&rot(angle(1, 2), 1), 4).unwrap(), 2);
    }

    #[test]
    fn mean_index_examples() {
        let data = rot(angle(1, 3), 1);
        assert_eq!(mean_index(&data), Real::ratio(1, 3));
        let irr = rot(AngleClass::new(Real::sqrt_int(2) - Real::int(1)).unwrap(), 1);
        assert!(!mean_index(&irr).is_rational());
        for m in [10u64, 100, 1000, 10_000] {
            let i = index_iterate(&irr, m).unwrap() as f64;
            let c = 2.0 * 1.0 + 1.0;
            assert!((i / m as f64 - mean_index(&irr).to_f64()).abs() <= c / m as f64);
        }
    }

    #[test]
    fn i_value_examples() {
        let mut d = NormalFormDecomposition::empty(1);
        d.p_minus = 1;
        let data = PathIndexData::new(d, 3);
        assert_eq!(i_value(&data, 5).unwrap(), 5 * 4);
        assert_eq!(i_value(&rot(angle(1, 2), 1), 2).unwrap(), 1);
        let r = rot(angle(2, 7), 1);
        for m in 1..=50 {
            let lhs = 2 * i_value(&r, m).unwrap() - i64::from(s_plus_one(&r.decomp) + c_of_m(&r.decomp));
            assert_eq!(lhs, index_iterate(&r, 2 * m).unwrap());
        }
    }

    #[test]
    fn validation() {
        let mut d = NormalFormDecomposition::empty(2);
        d.p_minus = 1;
        let v = validate(&PathIndexData::new(d, 1));
        assert!(matches!(v[0], Diagnostic::DimensionMismatch { n: 2, blocks: 1 }));
        let v = validate(&rot(angle(1, 2), 2));
        assert!(matches!(v[0], Diagnostic::ParityViolation { .. }));
        let mut c = rot(angle(1, 2), 1);
        c.convex_mode = true;
        let v = validate(&c);
        assert!(v.iter().any(|x| matches!(x, Diagnostic::ConvexNoPMinus { .. })));
        assert!(index_iterate(&PathIndexData::new(NormalFormDecomposition::empty(2), 0), 1).is_err());
    }

    #[test]
    fn realized_nullity() {
        let mut d = NormalFormDecomposition::empty(4);
        d.p_minus = 1;
        d.p_zero = 1;
        d.p_plus = 1;
        d.thetas.push(angle(1, 2));
        assert!(realized_nullity_matches(&PathIndexData::new(d, 0)).unwrap());
    }

    #[test]
    fn json_schema() {
        let js = r#"{"decomp":{"n":2,"p_minus":1,"thetas":[{"irrational":"0.41421356237309504880168872420969807856967187537694"}]},"i1":3}"#;
        let data: PathIndexData = serde_json::from_str(js).unwrap();
        assert_eq!(data.decomp.r(), 1);
        assert!(!data.decomp.thetas[0].is_rational());
        assert!(!data.convex_mode);
    }
}
