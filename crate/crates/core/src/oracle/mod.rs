//! A numerical index oracle for sampled symplectic paths.
//!
//! The index `i_ω(γ)` is computed as the spectral flow of the unitary
//! `W(M) = U_ω* Z₋ Z₊⁻¹`, where `Z±` are the Cayley-type images of the graph of `M`
//! and `U_ω` that of the graph of `ω·I`. Along the path the winding of `det W` equals
//! `−2 Δarg f`, with `f(M) = det((B − C) − i(A + D))` nonzero on all of `Sp(2n)`, so
//! the count reduces to a phase integral plus the eigenvalue arguments of `W` at both
//! ends. Degenerate endpoints are pushed off by `M·e^{−εJ}`.

mod generators;

pub use generators::BlockPath;

use std::f64::consts::PI;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iteration::SplittingPair;
use crate::normal_forms::{j_matrix, nu_omega_float, symplectic_defect, SYMPLECTIC_TOL};

pub const DEFAULT_ETA: f64 = 0.05;
pub const DEFAULT_EPSILON: f64 = 1e-4;
/// Relative singular-value threshold for endpoint nullity.
pub const ORACLE_RANK_TOL: f64 = 1e-12;
/// `W`-eigenvalue arguments closer than this to 0 mark an endpoint as degenerate.
const DEGENERATE_ARG: f64 = 1e-11;
const SCHUR_MAX_ITER: usize = 10_000;
const XI_STEPS: usize = 128;
const PERTURB_STEPS: usize = 32;
const MAX_AUTO_STEPS: usize = 1 << 20;

/// A path in `Sp(2n)` sampled at increasing times in `[0, τ]`, starting at the identity.
#[derive(Clone, Debug)]
pub struct SampledSymplecticPath {
    n: usize,
    tau: f64,
    samples: Vec<(f64, DMatrix<f64>)>,
}

fn max_step(samples: &[(f64, DMatrix<f64>)]) -> (f64, usize) {
    samples
        .windows(2)
        .enumerate()
        .map(|(k, w)| ((&w[1].1 - &w[0].1).amax(), k))
        .fold((0.0, 0), |a, b| if b.0 > a.0 { b } else { a })
}

impl SampledSymplecticPath {
    pub fn new(n: usize, tau: f64, samples: Vec<(f64, DMatrix<f64>)>) -> Result<Self> {
        Self::with_eta(n, tau, samples, DEFAULT_ETA)
    }

    /// Validates start, ordering, dimensions, symplecticity and the step bound `η`.
    pub fn with_eta(n: usize, tau: f64, samples: Vec<(f64, DMatrix<f64>)>, eta: f64) -> Result<Self> {
        let d = 2 * n;
        if n == 0 || !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::InvalidPath(format!("need n ≥ 1 and τ > 0, got n = {n}, τ = {tau}")));
        }
        let Some((t0, m0)) = samples.first() else {
            return Err(Error::InvalidPath("no samples".into()));
        };
        if *t0 != 0.0 || m0.shape() != (d, d) || *m0 != DMatrix::identity(d, d) {
            return Err(Error::InvalidPath("the first sample must be (0, I)".into()));
        }
        let t_last = samples.last().map(|s| s.0).unwrap_or_default();
        if (t_last - tau).abs() > 1e-12 * tau {
            return Err(Error::InvalidPath(format!("last sample time {t_last} differs from τ = {tau}")));
        }
        for (k, (t, m)) in samples.iter().enumerate() {
            if m.shape() != (d, d) {
                return Err(Error::Dimension(format!("sample {k} is {:?}, expected {d}×{d}", m.shape())));
            }
            if k > 0 && !(*t > samples[k - 1].0) {
                return Err(Error::InvalidPath(format!("sample times not increasing at index {k}")));
            }
            let defect = symplectic_defect(m);
            if defect > SYMPLECTIC_TOL * m.amax().powi(2).max(1.0) {
                return Err(Error::NotSymplectic { defect });
            }
        }
        let (step, at) = max_step(&samples);
        if step >= eta {
            return Err(Error::InvalidPath(format!(
                "step-size bound violated: entries change by {step:.3e} ≥ η = {eta} between samples {at} and {}",
                at + 1
            )));
        }
        Ok(SampledSymplecticPath { n, tau, samples })
    }

    pub(crate) fn unchecked(n: usize, tau: f64, samples: Vec<(f64, DMatrix<f64>)>) -> Self {
        SampledSymplecticPath { n, tau, samples }
    }

    /// Samples `f` at `steps + 1` equally spaced times.
    pub fn from_fn(n: usize, tau: f64, steps: usize, f: impl Fn(f64) -> DMatrix<f64>) -> Result<Self> {
        let steps = steps.max(1);
        let samples = (0..=steps)
            .map(|k| {
                if k == 0 {
                    (0.0, DMatrix::identity(2 * n, 2 * n))
                } else {
                    let t = tau * k as f64 / steps as f64;
                    (t, f(t))
                }
            })
            .collect();
        Self::new(n, tau, samples)
    }

    /// Like [`Self::from_fn`], doubling the step count from `steps` until the bound holds.
    pub fn from_fn_auto(n: usize, tau: f64, steps: usize, f: impl Fn(f64) -> DMatrix<f64>) -> Result<Self> {
        let mut steps = steps.max(1);
        loop {
            match Self::from_fn(n, tau, steps, &f) {
                Err(Error::InvalidPath(msg)) if msg.starts_with("step-size") && steps < MAX_AUTO_STEPS => {
                    steps *= 2;
                }
                other => return other,
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn samples(&self) -> &[(f64, DMatrix<f64>)] {
        &self.samples
    }

    pub fn endpoint(&self) -> &DMatrix<f64> {
        &self.samples.last().expect("non-empty path").1
    }
}

/// `ξ_n(s) = diag(2 − s, 1/(2 − s))^{⋄n}`.
fn xi(n: usize, s: f64) -> DMatrix<f64> {
    let l = 2.0 - s;
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, i)] = l;
        m[(n + i, n + i)] = 1.0 / l;
    }
    m
}

/// The arc running `ξ_n` from `diag(2, 1/2)` to `I` on `[0, τ/2]`, then `γ` on `[τ/2, τ]`.
pub fn extend_with_xi(path: &SampledSymplecticPath) -> SampledSymplecticPath {
    let tau = path.tau;
    let mut samples: Vec<_> =
        (0..XI_STEPS).map(|k| (0.5 * tau * k as f64 / XI_STEPS as f64, xi(path.n, k as f64 / XI_STEPS as f64))).collect();
    samples.extend(path.samples.iter().map(|(t, m)| (0.5 * tau + 0.5 * t, m.clone())));
    SampledSymplecticPath::unchecked(path.n, tau, samples)
}

/// `γ^m(t) = γ(t − jτ) γ(τ)^j` on `[0, mτ]`.
pub fn iterate_path(path: &SampledSymplecticPath, m: u32) -> Result<SampledSymplecticPath> {
    if m == 0 {
        return Err(Error::InvalidArgument("iteration count m must be at least 1".into()));
    }
    let end = path.endpoint().clone();
    let mut power = DMatrix::identity(2 * path.n, 2 * path.n);
    let mut samples = Vec::with_capacity(path.samples.len() * m as usize);
    for j in 0..m {
        let skip = usize::from(j > 0);
        let shift = path.tau * f64::from(j);
        for (t, g) in &path.samples[skip..] {
            samples.push((t + shift, g * &power));
        }
        power = &end * &power;
    }
    Ok(SampledSymplecticPath::unchecked(path.n, path.tau * f64::from(m), samples))
}

/// `f(M) = det((B − C) − i(A + D))` over the `n × n` blocks.
fn phase_function(m: &DMatrix<f64>) -> Complex64 {
    let n = m.nrows() / 2;
    let z = DMatrix::from_fn(n, n, |i, j| {
        Complex64::new(m[(i, n + j)] - m[(n + i, j)], -(m[(i, j)] + m[(n + i, n + j)]))
    });
    z.determinant()
}

fn unitary_w(m: &DMatrix<f64>, omega: Complex64) -> Result<DMatrix<Complex64>> {
    let n = m.nrows() / 2;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut zp = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
    let mut zm = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        zp[(i, i)] = Complex64::new(s, 0.0);
        zp[(i, n + i)] = Complex64::new(0.0, s);
        zm[(i, i)] = Complex64::new(s, 0.0);
        zm[(i, n + i)] = Complex64::new(0.0, -s);
        for j in 0..2 * n {
            let (top, bottom) = (m[(i, j)], m[(n + i, j)]);
            zp[(n + i, j)] = Complex64::new(top * s, -bottom * s);
            zm[(n + i, j)] = Complex64::new(top * s, bottom * s);
        }
    }
    let inv = zp.try_inverse().ok_or_else(|| Error::Oracle("graph frame is singular".into()))?;
    let mut u_omega = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        u_omega[(i, n + i)] = omega.conj();
        u_omega[(n + i, i)] = omega;
    }
    Ok(u_omega.adjoint() * zm * inv)
}

/// Principal arguments in `[0, 2π)` of the eigenvalues of `W`.
///
/// Unshifted QR can stall on nearly scalar unitary matrices; a rotated copy `e^{iφ}W`
/// is tried before giving up.
fn eigen_arguments(w: DMatrix<Complex64>) -> Result<Vec<f64>> {
    for phi in [0.0, 0.7, 1.9, 3.1] {
        let rot = Complex64::from_polar(1.0, phi);
        if let Some(schur) = Schur::try_new(&w * rot, f64::EPSILON, SCHUR_MAX_ITER) {
            let ev = schur.eigenvalues().ok_or_else(|| Error::Oracle("Schur form is not triangular".into()))?;
            return Ok(ev.iter().map(|z| (z.arg() - phi).rem_euclid(2.0 * PI)).collect());
        }
    }
    Err(Error::Oracle("Schur iteration did not converge".into()))
}

#[derive(Clone, Copy, Debug)]
pub struct OracleOptions {
    /// Endpoint perturbation scale `ε`.
    pub epsilon: f64,
    pub rank_tol: f64,
    /// Largest phase increment accepted between consecutive samples.
    pub max_phase_step: f64,
    /// Bisection depth before a step is declared unresolvable.
    pub max_depth: u32,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { epsilon: DEFAULT_EPSILON, rank_tol: ORACLE_RANK_TOL, max_phase_step: PI / 4.0, max_depth: 40 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleIndex {
    pub index: i64,
    pub nullity: usize,
}

fn phase_increment(a: &DMatrix<f64>, b: &DMatrix<f64>, fa: Complex64, fb: Complex64, depth: u32, opts: &OracleOptions) -> Result<f64> {
    let step = (fb / fa).arg();
    if step.abs() <= opts.max_phase_step {
        return Ok(step);
    }
    if depth >= opts.max_depth || (b - a).amax() < 1e-12 {
        return Err(Error::Oracle(format!(
            "phase step {step:.3} unresolved after {depth} bisections; sample the path more finely"
        )));
    }
    let mid = (a + b) * 0.5;
    let fm = phase_function(&mid);
    if fm.norm() == 0.0 {
        return Err(Error::Oracle("phase function vanished during refinement".into()));
    }
    Ok(phase_increment(a, &mid, fa, fm, depth + 1, opts)? + phase_increment(&mid, b, fm, fb, depth + 1, opts)?)
}

/// `e^{−sJ} = cos s · I − sin s · J`.
fn rotate_back(m: &DMatrix<f64>, s: f64) -> DMatrix<f64> {
    let n = m.nrows() / 2;
    let e = DMatrix::identity(2 * n, 2 * n) * s.cos() - j_matrix(n) * s.sin();
    m * e
}

/// `(i_ω(γ), ν_ω(γ))` for a sampled path.
pub fn cz_index(path: &SampledSymplecticPath, omega: Complex64, opts: &OracleOptions) -> Result<OracleIndex> {
    if (omega.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("ω must lie on the unit circle, got {omega}")));
    }
    let beta = extend_with_xi(path);
    let mut mats: Vec<&DMatrix<f64>> = beta.samples.iter().map(|(_, m)| m).collect();
    let end = path.endpoint();
    let nullity = nu_omega_float(end, omega, opts.rank_tol);
    let degenerate = nullity > 0 || eigen_arguments(unitary_w(end, omega)?)?.iter().any(|a| near_zero_angle(*a, DEGENERATE_ARG));
    let tail: Vec<DMatrix<f64>> = if degenerate {
        (1..=PERTURB_STEPS).map(|k| rotate_back(end, opts.epsilon * k as f64 / PERTURB_STEPS as f64)).collect()
    } else {
        Vec::new()
    };
    mats.extend(tail.iter());

    let mut total = 0.0;
    let mut prev = phase_function(mats[0]);
    for pair in mats.windows(2) {
        let next = phase_function(pair[1]);
        total += phase_increment(pair[0], pair[1], prev, next, 0, opts)?;
        prev = next;
    }
    let start_args = eigen_arguments(unitary_w(mats[0], omega)?)?;
    let last = mats.last().expect("non-empty");
    let end_args = eigen_arguments(unitary_w(last, omega)?)?;
    if end_args.iter().any(|a| near_zero_angle(*a, 1e-12)) {
        return Err(Error::Oracle(format!(
            "endpoint remains degenerate after perturbation by ε = {}",
            opts.epsilon
        )));
    }
    let raw = (-2.0 * total + start_args.iter().sum::<f64>() - end_args.iter().sum::<f64>()) / (2.0 * PI);
    let index = raw.round();
    if (raw - index).abs() > 1e-6 {
        return Err(Error::Oracle(format!("spectral flow {raw:.9} is not an integer")));
    }
    Ok(OracleIndex { index: index as i64, nullity })
}

fn near_zero_angle(a: f64, tol: f64) -> bool {
    a < tol || 2.0 * PI - a < tol
}

/// One-sided index jumps `i_{ω e^{±iε}} − i_ω`.
pub fn splitting_estimate(path: &SampledSymplecticPath, omega: Complex64, eps: f64, opts: &OracleOptions) -> Result<SplittingPair> {
    let base = cz_index(path, omega, opts)?.index;
    let plus = cz_index(path, omega * Complex64::from_polar(1.0, eps), opts)?.index - base;
    let minus = cz_index(path, omega * Complex64::from_polar(1.0, -eps), opts)?.index - base;
    let to_u32 = |v: i64| {
        u32::try_from(v).map_err(|_| Error::Oracle(format!("negative splitting number {v} at ε = {eps}")))
    };
    Ok(SplittingPair { s_plus: to_u32(plus)?, s_minus: to_u32(minus)? })
}

/// Splitting numbers estimated at each `ε` in `eps_list`, required to agree.
pub fn splitting_stable(path: &SampledSymplecticPath, omega: Complex64, eps_list: &[f64], opts: &OracleOptions) -> Result<SplittingPair> {
    let mut found: Option<SplittingPair> = None;
    for &eps in eps_list {
        let s = splitting_estimate(path, omega, eps, opts)?;
        match found {
            Some(prev) if prev != s => {
                return Err(Error::Oracle(format!("splitting estimate unstable: {prev:?} vs {s:?} at ε = {eps}")));
            }
            _ => found = Some(s),
        }
    }
    found.ok_or_else(|| Error::InvalidArgument("empty ε list".into()))
}

/// Samples of `γ(t) = exp(tJB)` for symmetric `B`.
pub fn path_from_quadratic_hamiltonian(b: &DMatrix<f64>, tau: f64, steps: usize) -> Result<SampledSymplecticPath> {
    let d = b.nrows();
    if d == 0 || !d.is_multiple_of(2) || b.ncols() != d {
        return Err(Error::Dimension(format!("B must be square of even size, got {}×{}", b.nrows(), b.ncols())));
    }
    let asym = (b - b.transpose()).amax();
    if asym > 1e-12 * b.amax().max(1.0) {
        return Err(Error::InvalidArgument(format!("B is not symmetric: max |B − Bᵀ| = {asym:.3e}")));
    }
    let a = j_matrix(d / 2) * b;
    SampledSymplecticPath::from_fn(d / 2, tau, steps, |t| (&a * t).exp())
}
