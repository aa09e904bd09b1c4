//! Common index jump search.
//!
//! The torus vector `v` collects `1/(M·î_k)` for every path followed by `x/î_k` for every
//! unit-spectrum angle `x = θ/π` of path `k`, repeated by its `S⁻` weight. A hit is an `N`
//! with `{N·v}` within `ε` of a cube vertex `χ` whose iterates `m_k` satisfy the index
//! identity `I(k, m_k) = N + Δ_k` exactly.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iteration::{
    c_of_m, i_value, index_iterate, mean_index, nullity_iterate, s_plus_one, weighted_angles, PathIndexData,
};
use crate::numeric::{detect_rational, lcm_all, precision, Fixed, Rational, Real};

/// Multiples of `M0` examined per work unit. Fixed so results never depend on the pool size.
const CHUNK: u64 = 16_384;
/// Largest `h` accepted in automatic vertex mode.
pub const AUTO_MAX_H: usize = 12;
const MAX_LOGGED_REJECTIONS: usize = 256;

/// What a coordinate of `v` measures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoordKind {
    MeanIndex { path: usize },
    Angle { path: usize, angle_over_pi: Real },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JumpVector {
    pub q: usize,
    pub mu: Vec<u32>,
    pub h: usize,
    pub coords: Vec<Real>,
    pub kinds: Vec<CoordKind>,
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(rename = "M0")]
    pub m0: u64,
}

/// A vertex of `[0, 1]^h`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChiVector(pub Vec<u8>);

impl ChiVector {
    pub fn zeros(h: usize) -> ChiVector {
        ChiVector(vec![0; h])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn complement(&self) -> ChiVector {
        ChiVector(self.0.iter().map(|b| 1 - b).collect())
    }
}

impl fmt::Display for ChiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|b| write!(f, "{b}"))
    }
}

impl FromStr for ChiVector {
    type Err = Error;
    fn from_str(s: &str) -> Result<ChiVector> {
        let bits: Option<Vec<u8>> = s
            .trim()
            .chars()
            .filter(|c| *c != ',')
            .map(|c| match c {
                '0' => Some(0),
                '1' => Some(1),
                _ => None,
            })
            .collect();
        match bits {
            Some(b) if !b.is_empty() => Ok(ChiVector(b)),
            _ => Err(Error::Parse(format!("χ must be a string of 0/1 bits, got {s:?}"))),
        }
    }
}

/// `ψ` applied componentwise: 0 for `x ≥ 0`, 1 for `x < 0`.
pub fn chi_of(a: &[f64]) -> ChiVector {
    ChiVector(a.iter().map(|x| u8::from(*x < 0.0)).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpSolution {
    #[serde(rename = "N")]
    pub n: u64,
    pub m: Vec<u64>,
    pub chi: ChiVector,
    pub delta: Vec<u32>,
    pub residual: f64,
    pub delta_threshold: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gate {
    /// `m_k ≥ 1` failed.
    Iterate,
    /// `I(k, m_k) = N + Δ_k` failed.
    Identity,
    /// The window `min({m_k x}, 1 − {m_k x}) < δ` or `m_k x ∈ Z` failed.
    AngleWindow,
}

/// An `N` that passed the torus conditions but failed a later gate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateRejection {
    #[serde(rename = "N")]
    pub n: u64,
    pub chi: ChiVector,
    pub gate: Gate,
    pub path: usize,
    pub lhs: i64,
    pub rhs: i64,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchParams {
    pub epsilon: Real,
    pub delta: Real,
    pub n_max: u64,
    /// Worker threads; 0 picks the machine default. Not part of the report.
    #[serde(skip)]
    pub workers: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub solutions: Vec<JumpSolution>,
    pub rejections: Vec<GateRejection>,
    pub rejection_count: u64,
    pub scanned: u64,
}

fn positive_mean(data: &PathIndexData, k: usize) -> Result<Real> {
    let mean = mean_index(data);
    if mean.signum() <= 0 {
        return Err(Error::Precondition(format!("path {k} has non-positive mean index {mean}")));
    }
    Ok(mean)
}

/// `M`: lcm of the denominators of the rational angles and rational mean indices.
pub fn default_m(paths: &[PathIndexData]) -> Result<u64> {
    let mut dens = Vec::new();
    for p in paths {
        if let Some(q) = mean_index(p).as_rational() {
            dens.push(*q.denom());
        }
        for (x, _) in weighted_angles(&p.decomp)? {
            if let Some(q) = x.as_rational() {
                dens.push(*q.denom());
            }
        }
    }
    u64::try_from(lcm_all(dens)).map_err(|_| Error::InvalidArgument("scaling constant M overflows".into()))
}

/// Assembles `v` in the layout described in the module docs.
pub fn build_jump_vector(paths: &[PathIndexData], m: u64, m0: u64) -> Result<JumpVector> {
    if paths.is_empty() {
        return Err(Error::InvalidArgument("at least one path is required".into()));
    }
    if m == 0 || m0 == 0 {
        return Err(Error::InvalidArgument("M and M0 must be positive".into()));
    }
    let big_m = Real::int(i128::from(m));
    let mut coords = Vec::new();
    let mut kinds = Vec::new();
    let mut tail = Vec::new();
    let mut tail_kinds = Vec::new();
    let mut mu = Vec::new();
    for (k, p) in paths.iter().enumerate() {
        let mean = positive_mean(p, k)?;
        coords.push((&big_m * &mean).recip());
        kinds.push(CoordKind::MeanIndex { path: k });
        let mut count = 0;
        for (x, s) in weighted_angles(&p.decomp)? {
            let c = &x / &mean;
            for _ in 0..s {
                tail.push(c.clone());
                tail_kinds.push(CoordKind::Angle { path: k, angle_over_pi: x.clone() });
            }
            count += s;
        }
        debug_assert_eq!(count, c_of_m(&p.decomp));
        mu.push(count);
    }
    coords.extend(tail);
    kinds.extend(tail_kinds);
    Ok(JumpVector { q: paths.len(), mu, h: coords.len(), coords, kinds, m, m0 })
}

/// `δ = 1/(4·max_k(μ_k + 1))`.
pub fn default_delta(v: &JumpVector) -> Real {
    let top = v.mu.iter().copied().max().unwrap_or(0);
    Real::ratio(1, 4 * (i128::from(top) + 1))
}

/// `ε = δ/(4·M·max_k î_k)`.
pub fn default_epsilon(v: &JumpVector, paths: &[PathIndexData], delta: &Real) -> Result<Real> {
    let mut top: Option<Real> = None;
    for (k, p) in paths.iter().enumerate() {
        let mean = positive_mean(p, k)?;
        if top.as_ref().is_none_or(|t| mean.cmp_real(t) == Ordering::Greater) {
            top = Some(mean);
        }
    }
    let top = top.ok_or_else(|| Error::InvalidArgument("at least one path is required".into()))?;
    Ok(delta / &(&Real::int(4 * i128::from(v.m)) * &top))
}

impl SearchParams {
    pub fn with_defaults(v: &JumpVector, paths: &[PathIndexData], n_max: u64) -> Result<SearchParams> {
        let delta = default_delta(v);
        let epsilon = default_epsilon(v, paths, &delta)?;
        Ok(SearchParams { epsilon, delta, n_max, workers: 0 })
    }
}

/// `m_k = ([N/(M·î_k)] + χ_k)·M`.
pub fn compute_m(n: u64, data: &PathIndexData, chi_k: u8, m: u64) -> Result<u64> {
    let mean = positive_mean(data, 0)?;
    let v = (&Real::int(i128::from(m)) * &mean).recip();
    m_from_coord(n, &v, chi_k, m)
}

fn m_from_coord(n: u64, v: &Real, chi_k: u8, m: u64) -> Result<u64> {
    let base = v.floor_mul(i128::from(n)) + i128::from(chi_k);
    let mk = base * i128::from(m);
    if mk <= 0 {
        return Err(Error::Precondition(format!("iterate m_k = {mk} is not positive")));
    }
    u64::try_from(mk).map_err(|_| Error::InvalidArgument(format!("iterate m_k = {mk} overflows")))
}

fn delta_from_angles(angles: &[(Real, u32)], mk: u64, delta: &Real) -> u32 {
    angles
        .iter()
        .filter(|(x, _)| {
            let f = x.frac_mul(i128::from(mk));
            !f.is_zero() && f.cmp_real(delta) == Ordering::Less
        })
        .map(|(_, s)| *s)
        .sum()
}

/// `Δ_k = Σ_{0 < {m_k x} < δ} S⁻`.
pub fn delta_k(data: &PathIndexData, mk: u64, delta: &Real) -> Result<u32> {
    Ok(delta_from_angles(&weighted_angles(&data.decomp)?, mk, delta))
}

/// A threshold in `(0, 1)` with the truncated image `floor(b·2^128)`.
struct FracBound {
    value: Real,
    bits: u128,
}

fn rational_bits(num: i128, den: i128) -> Option<u128> {
    ((BigInt::from(num) << 128usize) / BigInt::from(den)).to_u128()
}

impl FracBound {
    fn new(value: Real) -> FracBound {
        let bits = match (&value, value.fixed()) {
            (_, Some(f)) => f.frac,
            (Real::Rational(q), None) => rational_bits(*q.numer(), *q.denom()).unwrap_or(u128::MAX),
            _ => unreachable!("irrationals carry a fixed image"),
        };
        FracBound { value, bits }
    }
}

/// One coordinate prepared for repeated evaluation of `{N·v_i}`.
enum Coord {
    Rational { p: i128, q: i128 },
    Irrational { fixed: Fixed, value: Real },
}

impl Coord {
    fn new(x: &Real) -> Coord {
        match (x.as_rational(), x.fixed()) {
            (Some(q), _) => Coord::Rational { p: *q.numer(), q: *q.denom() },
            (None, Some(f)) => Coord::Irrational { fixed: *f, value: x.clone() },
            (None, None) => unreachable!("irrationals carry a fixed image"),
        }
    }

    /// Half-open bounds on `{n·x}·2^128`.
    fn bits(&self, n: u64) -> Option<(u128, u128)> {
        match self {
            Coord::Rational { p, q } => {
                let r = (p.checked_mul(i128::from(n))?).rem_euclid(*q);
                let lo = rational_bits(r, *q)?;
                Some((lo, lo.checked_add(1)?))
            }
            Coord::Irrational { fixed, .. } => {
                let (_, lo) = fixed.mul(n)?;
                Some((lo, lo + u128::from(n)))
            }
        }
    }

    fn frac(&self, n: u64) -> Real {
        match self {
            Coord::Rational { p, q } => {
                Real::Rational(Rational::new(*p, *q) * i128::from(n)).frac_mul(1)
            }
            Coord::Irrational { value, .. } => value.frac_mul(i128::from(n)),
        }
    }

    fn frac_less(&self, n: u64, b: &FracBound) -> bool {
        if let Some((lo, hi)) = self.bits(n) {
            if hi <= b.bits {
                return true;
            }
            if lo > b.bits {
                return false;
            }
        }
        self.frac(n).cmp_real(&b.value) == Ordering::Less
    }

    fn frac_greater(&self, n: u64, b: &FracBound) -> bool {
        if let Some((lo, hi)) = self.bits(n) {
            if lo > b.bits {
                return true;
            }
            if hi <= b.bits {
                return false;
            }
        }
        self.frac(n).cmp_real(&b.value) == Ordering::Greater
    }
}

struct PathCtx<'a> {
    data: &'a PathIndexData,
    angles: Vec<(Real, u32)>,
}

struct Engine<'a> {
    coords: Vec<Coord>,
    paths: Vec<PathCtx<'a>>,
    /// Per path: the exact `1/(M·î_k)` when `î_k` is rational.
    rational_q: Vec<Option<Rational>>,
    chi: Option<&'a ChiVector>,
    low: FracBound,
    high: FracBound,
    delta: Real,
    delta_f64: f64,
    m: u64,
}

#[derive(Default)]
struct ChunkResult {
    solutions: Vec<JumpSolution>,
    rejections: Vec<GateRejection>,
    rejection_count: u64,
}

impl Engine<'_> {
    /// Gate (a): the vertex matched by `{N·v}`, if any.
    fn torus_vertex(&self, n: u64) -> Option<ChiVector> {
        let mut bits = Vec::with_capacity(self.coords.len());
        for (i, c) in self.coords.iter().enumerate() {
            let want = self.chi.map(|x| x.0[i]);
            let bit = match want {
                Some(0) => c.frac_less(n, &self.low).then_some(0),
                Some(_) => c.frac_greater(n, &self.high).then_some(1),
                None if c.frac_less(n, &self.low) => Some(0),
                None => c.frac_greater(n, &self.high).then_some(1),
            }?;
            bits.push(bit);
        }
        Some(ChiVector(bits))
    }

    /// Gate (b): `N/(M·î_k) ∈ Z` for rational `î_k`.
    fn rational_means_divide(&self, n: u64) -> bool {
        self.rational_q.iter().flatten().all(|q| (q * i128::from(n)).is_integer())
    }

    fn residual(&self, n: u64, chi: &ChiVector) -> f64 {
        self.coords
            .iter()
            .zip(&chi.0)
            .map(|(c, b)| (&c.frac(n) - &Real::int(i128::from(*b))).abs().to_f64())
            .fold(0.0, f64::max)
    }

    fn reject(out: &mut ChunkResult, r: GateRejection) {
        out.rejection_count += 1;
        if out.rejections.len() < MAX_LOGGED_REJECTIONS {
            out.rejections.push(r);
        }
    }

    fn examine(&self, n: u64, out: &mut ChunkResult) -> Result<()> {
        let Some(chi) = self.torus_vertex(n) else { return Ok(()) };
        if !self.rational_means_divide(n) {
            return Ok(());
        }
        let q = self.paths.len();
        let mut ms = Vec::with_capacity(q);
        let mut deltas = Vec::with_capacity(q);
        for (k, p) in self.paths.iter().enumerate() {
            let base = self.coords[k].frac_floor(n) + i128::from(chi.0[k]);
            let mk = base * i128::from(self.m);
            if mk < 1 {
                Self::reject(out, GateRejection {
                    n,
                    chi: chi.clone(),
                    gate: Gate::Iterate,
                    path: k,
                    lhs: mk as i64,
                    rhs: 1,
                    detail: format!("m_{k} = {mk} is below 1"),
                });
                return Ok(());
            }
            let mk = u64::try_from(mk).map_err(|_| Error::InvalidArgument(format!("m_{k} overflows")))?;
            let dk = delta_from_angles(&p.angles, mk, &self.delta);
            let lhs = i_value(p.data, mk)?;
            let rhs = i64::try_from(n).map_err(|_| Error::InvalidArgument("N overflows".into()))? + i64::from(dk);
            if lhs != rhs {
                Self::reject(out, GateRejection {
                    n,
                    chi: chi.clone(),
                    gate: Gate::Identity,
                    path: k,
                    lhs,
                    rhs,
                    detail: format!("I({k}, {mk}) = {lhs} but N + Δ = {rhs}"),
                });
                return Ok(());
            }
            for (x, _) in &p.angles {
                let ok = if x.is_rational() {
                    x.is_integer_mul(i128::from(mk))
                } else {
                    let f = x.frac_mul(i128::from(mk));
                    let g = &Real::int(1) - &f;
                    let near = if f.cmp_real(&g) == Ordering::Less { f } else { g };
                    near.cmp_real(&self.delta) == Ordering::Less
                };
                if !ok {
                    Self::reject(out, GateRejection {
                        n,
                        chi: chi.clone(),
                        gate: Gate::AngleWindow,
                        path: k,
                        lhs,
                        rhs,
                        detail: format!("m_{k}·θ/π = {mk}·{x} misses the δ-window"),
                    });
                    return Ok(());
                }
            }
            ms.push(mk);
            deltas.push(dk);
        }
        let residual = self.residual(n, &chi);
        out.solutions.push(JumpSolution { n, m: ms, chi, delta: deltas, residual, delta_threshold: self.delta_f64 });
        Ok(())
    }
}

impl Coord {
    /// `[n·x]`.
    fn frac_floor(&self, n: u64) -> i128 {
        match self {
            Coord::Rational { p, q } => Integer::div_floor(&(p * i128::from(n)), q),
            Coord::Irrational { value, .. } => value.floor_mul(i128::from(n)),
        }
    }
}

fn unit_interval(name: &str, x: &Real) -> Result<()> {
    let half = Real::ratio(1, 2);
    if x.signum() <= 0 || x.cmp_real(&half) != Ordering::Less {
        return Err(Error::InvalidArgument(format!("{name} must lie in (0, 1/2), got {x}")));
    }
    Ok(())
}

/// Enumerates `N = M0, 2·M0, … ≤ N_max` and keeps the identity-gated hits.
///
/// With `chi = None` every vertex is admissible and each hit records the vertex it matched.
pub fn search_n(v: &JumpVector, chi: Option<&ChiVector>, paths: &[PathIndexData], params: &SearchParams) -> Result<SearchOutcome> {
    unit_interval("ε", &params.epsilon)?;
    unit_interval("δ", &params.delta)?;
    if paths.len() != v.q {
        return Err(Error::InvalidArgument(format!("jump vector has {} paths but {} were given", v.q, paths.len())));
    }
    match chi {
        Some(c) if c.len() != v.h => {
            return Err(Error::InvalidArgument(format!("χ has {} entries but h = {}", c.len(), v.h)));
        }
        None if v.h > AUTO_MAX_H => {
            return Err(Error::InvalidArgument(format!("automatic χ needs h ≤ {AUTO_MAX_H}, got {}", v.h)));
        }
        _ => {}
    }
    let mut ctx = Vec::with_capacity(paths.len());
    for p in paths {
        ctx.push(PathCtx { data: p, angles: weighted_angles(&p.decomp)? });
    }
    let rational_q = v.coords[..v.q].iter().map(|c| c.as_rational().copied()).collect();
    let engine = Engine {
        coords: v.coords.iter().map(Coord::new).collect(),
        paths: ctx,
        rational_q,
        chi,
        low: FracBound::new(params.epsilon.clone()),
        high: FracBound::new(&Real::int(1) - &params.epsilon),
        delta: params.delta.clone(),
        delta_f64: params.delta.to_f64(),
        m: v.m,
    };
    let count = params.n_max / v.m0;
    let chunks: Vec<(u64, u64)> = (0..count.div_ceil(CHUNK))
        .map(|c| (c * CHUNK + 1, ((c + 1) * CHUNK).min(count)))
        .collect();
    let run = |(a, b): (u64, u64)| -> Result<ChunkResult> {
        let mut out = ChunkResult::default();
        for j in a..=b {
            engine.examine(j * v.m0, &mut out)?;
        }
        Ok(out)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(params.workers)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let parts: Vec<Result<ChunkResult>> = pool.install(|| chunks.into_par_iter().map(run).collect());
    let mut outcome = SearchOutcome { solutions: Vec::new(), rejections: Vec::new(), rejection_count: 0, scanned: count };
    for part in parts {
        let part = part?;
        outcome.solutions.extend(part.solutions);
        outcome.rejection_count += part.rejection_count;
        let room = MAX_LOGGED_REJECTIONS - outcome.rejections.len();
        outcome.rejections.extend(part.rejections.into_iter().take(room));
    }
    Ok(outcome)
}

/// `ϱₙ = min_k [(i₁ + 2S⁺(1) − ν₁ + n)/2]`.
pub fn varrho(paths: &[PathIndexData], n: u32) -> Result<i64> {
    paths
        .iter()
        .map(|p| {
            let d = &p.decomp;
            let num = p.i1 + 2 * i64::from(s_plus_one(d)) - i64::from(d.nu1()) + i64::from(n);
            num.div_euclid(2)
        })
        .min()
        .ok_or_else(|| Error::InvalidArgument("ϱ needs at least one path".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub s: i64,
    pub target: i64,
    pub candidates: Vec<usize>,
    pub path: Option<usize>,
    pub index_2m: Option<i64>,
    pub nullity_2m: Option<u32>,
    /// `i(2m) = 2(N + Δ) − (S⁺(1) + C(M))`.
    pub index_value_ok: Option<bool>,
    /// `2s ≥ n + S⁺ + C − 2Δ − ν(2m) + 1`.
    pub lower_ok: Option<bool>,
    /// `2s ≤ n + S⁺ + C − 2Δ`.
    pub upper_ok: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem211Report {
    pub varrho: i64,
    pub assignments: Vec<Assignment>,
    pub all_assigned: bool,
    /// `m_{j(s₂)}·D_{j(s₂)} < m_{j(s₁)}·D_{j(s₁)}` for all assigned `s₁ < s₂`.
    pub ordering_ok: bool,
    /// `χ_{j(s₂)} ≤ χ_{j(s₁)}` for all assigned `s₁ < s₂`.
    pub monotone_ok: bool,
    pub issues: Vec<String>,
}

impl Theorem211Report {
    pub fn passed(&self) -> bool {
        self.all_assigned
            && self.ordering_ok
            && self.monotone_ok
            && self.assignments.iter().all(|a| {
                a.index_value_ok != Some(false) && a.lower_ok != Some(false) && a.upper_ok != Some(false)
            })
    }
}

/// Reconstructs `j(s)` for `s = 1..ϱₙ` from the interval condition and checks its consequences.
pub fn theorem211_report(sol: &JumpSolution, paths: &[PathIndexData], n: u32) -> Result<Theorem211Report> {
    if sol.m.len() != paths.len() || sol.delta.len() != paths.len() {
        return Err(Error::InvalidArgument("solution and path list disagree in length".into()));
    }
    let big_n = i64::try_from(sol.n).map_err(|_| Error::InvalidArgument("N overflows".into()))?;
    let varrho = varrho(paths, n)?;
    let mut tables = Vec::with_capacity(paths.len());
    for (p, mk) in paths.iter().zip(&sol.m) {
        tables.push((index_iterate(p, 2 * mk)?, nullity_iterate(p, 2 * mk)?));
    }
    let mut issues = Vec::new();
    let mut assignments = Vec::new();
    for s in 1..=varrho {
        let target = 2 * big_n - 2 * s + i64::from(n);
        let candidates: Vec<usize> = tables
            .iter()
            .enumerate()
            .filter(|(_, (i, nu))| *i <= target && target < i + i64::from(*nu))
            .map(|(k, _)| k)
            .collect();
        let mut a = Assignment {
            s,
            target,
            candidates: candidates.clone(),
            path: None,
            index_2m: None,
            nullity_2m: None,
            index_value_ok: None,
            lower_ok: None,
            upper_ok: None,
        };
        match candidates.as_slice() {
            [k] => {
                let k = *k;
                let d = &paths[k].decomp;
                let (i2, nu2) = tables[k];
                let spc = i64::from(s_plus_one(d) + c_of_m(d));
                let dk = i64::from(sol.delta[k]);
                let bound = i64::from(n) + spc - 2 * dk;
                a.path = Some(k);
                a.index_2m = Some(i2);
                a.nullity_2m = Some(nu2);
                a.index_value_ok = Some(i2 == 2 * (big_n + dk) - spc);
                a.lower_ok = Some(2 * s > bound - i64::from(nu2));
                a.upper_ok = Some(2 * s <= bound);
            }
            [] => issues.push(format!("s = {s}: no path interval contains {target}")),
            _ => issues.push(format!("s = {s}: several paths {candidates:?} contain {target}")),
        }
        assignments.push(a);
    }
    let all_assigned = assignments.iter().all(|a| a.path.is_some());
    let weights: Vec<Real> = paths
        .iter()
        .zip(&sol.m)
        .map(|(p, mk)| &Real::int(i128::from(*mk)) * &mean_index(p))
        .collect();
    let assigned: Vec<(i64, usize)> = assignments.iter().filter_map(|a| a.path.map(|k| (a.s, k))).collect();
    let (mut ordering_ok, mut monotone_ok) = (true, true);
    for (x, &(s1, j1)) in assigned.iter().enumerate() {
        for &(s2, j2) in &assigned[x + 1..] {
            if weights[j2].cmp_real(&weights[j1]) != Ordering::Less {
                ordering_ok = false;
                issues.push(format!("ordering fails for s₁ = {s1}, s₂ = {s2}"));
            }
            if sol.chi.0[j2] > sol.chi.0[j1] {
                monotone_ok = false;
                issues.push(format!("χ increases from s₁ = {s1} to s₂ = {s2}"));
            }
        }
    }
    Ok(Theorem211Report { varrho, assignments, all_assigned, ordering_ok, monotone_ok, issues })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioVerdict {
    /// `({N v_j} − χ_j)/({N v_i} − χ_i)`, absent when indeterminate.
    pub ratio: Option<f64>,
    pub ratio_matches: bool,
    pub chi_equal: bool,
    pub indeterminate: bool,
}

impl RatioVerdict {
    pub fn consistent(&self) -> bool {
        self.ratio_matches && self.chi_equal && !self.indeterminate
    }
}

/// Checks the residual ratio on a hit against the declared `v_j/v_i = p/q`.
pub fn ratio_consistency_check(sol: &JumpSolution, v: &JumpVector, i: usize, j: usize, p_over_q: Rational) -> Result<RatioVerdict> {
    let (Some(vi), Some(vj)) = (v.coords.get(i), v.coords.get(j)) else {
        return Err(Error::InvalidArgument(format!("coordinate index out of range (h = {})", v.h)));
    };
    if vi.is_rational() || vj.is_rational() {
        return Err(Error::Precondition("ratio check needs irrational-tagged coordinates".into()));
    }
    let n = i128::from(sol.n);
    let ri = &vi.frac_mul(n) - &Real::int(i128::from(sol.chi.0[i]));
    let rj = &vj.frac_mul(n) - &Real::int(i128::from(sol.chi.0[j]));
    let chi_equal = sol.chi.0[i] == sol.chi.0[j];
    if ri.abs().to_f64() < 1e-15 {
        return Ok(RatioVerdict { ratio: None, ratio_matches: false, chi_equal, indeterminate: true });
    }
    let ratio = &rj / &ri;
    let target = Real::Rational(p_over_q);
    let err = (&ratio - &target).abs();
    let tol = Real::irrational_str(&format!("1e-{}", precision() / 2))?;
    let scale = &target.abs() + &Real::int(1);
    let ratio_matches = err.cmp_real(&(&tol * &scale)) == Ordering::Less;
    Ok(RatioVerdict { ratio: Some(ratio.to_f64()), ratio_matches, chi_equal, indeterminate: false })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum RatioClass {
    Rational { value: Real, exact: bool },
    Irrational,
}

impl RatioClass {
    pub fn is_irrational(&self) -> bool {
        matches!(self, RatioClass::Irrational)
    }
}

/// Pairwise classification of `î_k/î_l`.
pub fn mean_ratio_classify(paths: &[PathIndexData], denominator_bound: i128) -> Vec<Vec<RatioClass>> {
    let means: Vec<Real> = paths.iter().map(mean_index).collect();
    means
        .iter()
        .map(|a| {
            means
                .iter()
                .map(|b| {
                    if b.is_zero() {
                        return RatioClass::Irrational;
                    }
                    let r = a / b;
                    match r.as_rational() {
                        Some(q) => RatioClass::Rational { value: Real::Rational(*q), exact: true },
                        None => match detect_rational(&r.to_big(), denominator_bound) {
                            Some(q) => RatioClass::Rational { value: Real::Rational(q), exact: false },
                            None => RatioClass::Irrational,
                        },
                    }
                })
                .collect()
        })
        .collect()
}

/// A largest set of indices whose pairwise ratios are all irrational, smallest indices first.
pub fn largest_irrational_family(matrix: &[Vec<RatioClass>]) -> Vec<usize> {
    let q = matrix.len();
    if q > 20 {
        let mut picked: Vec<usize> = Vec::new();
        for k in 0..q {
            if picked.iter().all(|&l| matrix[k][l].is_irrational()) {
                picked.push(k);
            }
        }
        return picked;
    }
    let mut best = 0u32;
    for mask in 1u32..(1 << q) {
        if mask.count_ones() <= best.count_ones() {
            continue;
        }
        let ok = (0..q).filter(|k| mask >> k & 1 == 1).all(|k| {
            (k + 1..q).filter(|l| mask >> l & 1 == 1).all(|l| matrix[k][l].is_irrational())
        });
        if ok {
            best = mask;
        }
    }
    (0..q).filter(|k| best >> k & 1 == 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iteration::NormalFormDecomposition;
    use crate::normal_forms::AngleClass;

    fn golden_path() -> PathIndexData {
        let phi_minus_one = (&Real::sqrt_int(5) - &Real::int(1)) / Real::int(2);
        let mut d = NormalFormDecomposition::empty(2);
        d.p_minus = 1;
        d.thetas = vec![AngleClass::new(phi_minus_one).unwrap()];
        PathIndexData::new(d, 1)
    }

    fn rational_path(i1: i64) -> PathIndexData {
        let mut d = NormalFormDecomposition::empty(1);
        d.p_minus = 1;
        PathIndexData::new(d, i1)
    }

    #[test]
    fn vector_layout() {
        let mut d = NormalFormDecomposition::empty(1);
        d.p_minus = 1;
        let p = PathIndexData::new(d, 1);
        let v = build_jump_vector(std::slice::from_ref(&p), 1, 1).unwrap();
        assert_eq!(v.h, 1);
        assert_eq!(v.coords[0], Real::ratio(1, 2));

        let g = golden_path();
        let v = build_jump_vector(&[g], 1, 1).unwrap();
        assert_eq!((v.q, v.h, v.mu.clone()), (1, 2, vec![1]));
        let sum = &v.coords[0] + &v.coords[1];
        assert!((&sum - &Real::int(1)).abs().to_f64() < 1e-40);
        assert!(build_jump_vector(&[rational_path(-3)], 1, 1).is_err());
    }

    #[test]
    fn chi_and_m() {
        assert_eq!(chi_of(&[0.1, -0.1]), ChiVector(vec![0, 1]));
        assert_eq!(chi_of(&[0.0, 0.0]), ChiVector(vec![0, 0]));
        assert_eq!("0110".parse::<ChiVector>().unwrap(), ChiVector(vec![0, 1, 1, 0]));
        assert!("01x".parse::<ChiVector>().is_err());
        // î = 5/2 via p₋ = 1, i1 = 3, one rotation at θ/π = 1/2.
        let mut d = NormalFormDecomposition::empty(2);
        d.p_minus = 1;
        d.thetas = vec![AngleClass::rational(1, 2).unwrap()];
        let p = PathIndexData::new(d, 2);
        assert_eq!(mean_index(&p), Real::ratio(5, 2));
        assert_eq!(compute_m(100, &p, 0, 2).unwrap(), 40);
        assert_eq!(compute_m(100, &p, 1, 2).unwrap(), 42);
        assert!(compute_m(1, &p, 0, 2).is_err());
    }

    #[test]
    fn rational_vector_hits_every_multiple() {
        let p = rational_path(1);
        let v = build_jump_vector(std::slice::from_ref(&p), 2, 2).unwrap();
        let params = SearchParams { epsilon: Real::ratio(1, 100), delta: Real::ratio(1, 8), n_max: 40, workers: 1 };
        let out = search_n(&v, Some(&ChiVector::zeros(1)), &[p], &params).unwrap();
        // v = 1/4 with M0 = 2: hits at multiples of 4.
        let ns: Vec<u64> = out.solutions.iter().map(|s| s.n).collect();
        assert_eq!(ns, (1..=10).map(|k| 4 * k).collect::<Vec<_>>());
        assert!(out.solutions.iter().all(|s| s.residual == 0.0));
    }

    #[test]
    fn golden_hits_and_symmetry() {
        let g = golden_path();
        let v = build_jump_vector(std::slice::from_ref(&g), 1, 1).unwrap();
        let params = SearchParams::with_defaults(&v, std::slice::from_ref(&g), 20_000).unwrap();
        let a = chi_of(&[1.0, -1.0]);
        let b = chi_of(&[-1.0, 1.0]);
        let hits_a = search_n(&v, Some(&a), std::slice::from_ref(&g), &params).unwrap();
        let hits_b = search_n(&v, Some(&b), std::slice::from_ref(&g), &params).unwrap();
        assert!(!hits_a.solutions.is_empty() && !hits_b.solutions.is_empty());
        assert_eq!(a.complement(), b);
        for s in hits_a.solutions.iter().chain(&hits_b.solutions) {
            assert_eq!(i_value(&g, s.m[0]).unwrap(), s.n as i64 + i64::from(s.delta[0]));
        }
        let auto = search_n(&v, None, std::slice::from_ref(&g), &params).unwrap();
        assert_eq!(auto.solutions.len(), hits_a.solutions.len() + hits_b.solutions.len());
    }

    #[test]
    fn workers_do_not_change_output() {
        let g = golden_path();
        let v = build_jump_vector(std::slice::from_ref(&g), 1, 1).unwrap();
        let mut params = SearchParams::with_defaults(&v, std::slice::from_ref(&g), 100_000).unwrap();
        params.workers = 1;
        let one = search_n(&v, None, std::slice::from_ref(&g), &params).unwrap();
        params.workers = 4;
        let four = search_n(&v, None, std::slice::from_ref(&g), &params).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn delta_counts() {
        let p = rational_path(1);
        assert_eq!(delta_k(&p, 7, &Real::ratio(1, 8)).unwrap(), 0);
        let mut d = NormalFormDecomposition::empty(1);
        d.thetas = vec![AngleClass::rational(1, 2).unwrap()];
        let p = PathIndexData::new(d, 1);
        assert_eq!(delta_k(&p, 4, &Real::ratio(1, 8)).unwrap(), 0);
        let g = golden_path();
        // {7(φ − 1)} ≈ 0.326, {13(φ − 1)} ≈ 0.034.
        assert_eq!(delta_k(&g, 7, &Real::ratio(1, 8)).unwrap(), 0);
        assert_eq!(delta_k(&g, 13, &Real::ratio(1, 8)).unwrap(), 1);
    }

    #[test]
    fn varrho_examples() {
        let mut d = NormalFormDecomposition::empty(2);
        d.p_minus = 1;
        d.thetas = vec![AngleClass::rational(1, 3).unwrap()];
        let p = PathIndexData::new(d, 2);
        assert_eq!(varrho(std::slice::from_ref(&p), 2).unwrap(), 2);
        let q = PathIndexData { i1: 0, ..p.clone() };
        assert_eq!(varrho(&[p, q], 2).unwrap(), 1);
    }

    #[test]
    fn ratio_classes() {
        let g = golden_path();
        let p = rational_path(1);
        let m = mean_ratio_classify(&[g.clone(), p], 1_000_000);
        assert!(m[0][1].is_irrational());
        assert_eq!(m[0][0], RatioClass::Rational { value: Real::int(1), exact: false });
        assert_eq!(m[1][1], RatioClass::Rational { value: Real::int(1), exact: true });
        assert_eq!(largest_irrational_family(&m), vec![0, 1]);
    }

    #[test]
    fn ratio_check_on_dependent_coordinates() {
        let phi = (&Real::int(1) + &Real::sqrt_int(5)) / Real::int(2);
        let v = JumpVector {
            q: 0,
            mu: vec![],
            h: 2,
            coords: vec![phi.recip(), &Real::int(2) / &phi],
            kinds: vec![],
            m: 1,
            m0: 1,
        };
        let mut found = 0;
        for n in 1..2000u64 {
            let f = v.coords[0].frac_mul(i128::from(n)).to_f64();
            if !(0.01..=0.99).contains(&f) {
                let chi = ChiVector(vec![u8::from(f > 0.5); 2]);
                let sol = JumpSolution { n, m: vec![], chi, delta: vec![], residual: 0.0, delta_threshold: 0.0 };
                let verdict = ratio_consistency_check(&sol, &v, 0, 1, Rational::from_integer(2)).unwrap();
                assert!(verdict.consistent(), "{n}: {verdict:?}");
                found += 1;
            }
        }
        assert!(found > 0);
        let w = JumpVector { coords: vec![Real::int(1), Real::int(2)], ..v };
        let sol = JumpSolution { n: 1, m: vec![], chi: ChiVector::zeros(2), delta: vec![], residual: 0.0, delta_threshold: 0.0 };
        assert!(ratio_consistency_check(&sol, &w, 0, 1, Rational::from_integer(2)).is_err());
    }
}
