//! The ellipsoid `Σ (α_i/2)(p_i² + q_i²) = 1` and its `n` axis orbits.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iteration::{
    index_iterate, mean_index, nullity_iterate, validate, Diagnostic, NormalFormDecomposition, PathIndexData,
};
use crate::jump::{
    build_jump_vector, default_m, largest_irrational_family, mean_ratio_classify, search_n, theorem211_report,
    varrho, ChiVector, JumpVector, RatioClass, SearchOutcome, SearchParams, Theorem211Report, AUTO_MAX_H,
};
use crate::normal_forms::AngleClass;
use crate::numeric::{Real, Surd};
use crate::oracle::{cz_index, iterate_path, path_from_quadratic_hamiltonian, BlockPath, OracleOptions, SampledSymplecticPath};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// The literal linearized flow: the axis block ends at `I₂`.
    Quadratic,
    /// The axis block ends at `N₁(1, 1)`.
    Convex,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "quadratic" => Ok(Mode::Quadratic),
            "convex" => Ok(Mode::Convex),
            _ => Err(Error::Parse(format!("mode must be quadratic or convex, got {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllipsoidSpec {
    pub alphas: Vec<Surd>,
    pub mode: Mode,
}

impl EllipsoidSpec {
    pub fn new(alphas: Vec<Surd>, mode: Mode) -> Result<EllipsoidSpec> {
        if alphas.is_empty() {
            return Err(Error::InvalidArgument("an ellipsoid needs at least one frequency".into()));
        }
        if let Some(a) = alphas.iter().find(|a| !a.is_positive()) {
            return Err(Error::InvalidArgument(format!("frequencies must be positive, got {a}")));
        }
        Ok(EllipsoidSpec { alphas, mode })
    }

    /// Parses a comma-separated list such as `1,sqrt2,3/2`.
    pub fn parse(alphas: &str, mode: Mode) -> Result<EllipsoidSpec> {
        let list = alphas.split(',').map(str::parse).collect::<Result<Vec<Surd>>>()?;
        EllipsoidSpec::new(list, mode)
    }

    pub fn n(&self) -> usize {
        self.alphas.len()
    }

    /// Whether every pairwise ratio is irrational.
    pub fn non_resonant(&self) -> bool {
        let a = &self.alphas;
        (0..a.len()).all(|i| (i + 1..a.len()).all(|j| a[i].div(&a[j]).is_ok_and(|r| !r.is_rational())))
    }
}

/// One axis orbit: its index data and the sampled linearized path over one period.
#[derive(Clone, Debug)]
pub struct OrbitData {
    pub axis: usize,
    pub tau: f64,
    pub data: PathIndexData,
    pub path: SampledSymplecticPath,
}

/// `θ_j/π = 2α_j/α_i mod 2`.
fn rotation_angle(spec: &EllipsoidSpec, i: usize, j: usize) -> Result<AngleClass> {
    let ratio = spec.alphas[j].div(&spec.alphas[i])?;
    let twice = Surd { coef: ratio.coef * 2, radicand: ratio.radicand };
    AngleClass::reduce(&twice.to_real()).map_err(|_| {
        Error::InvalidAngle(format!(
            "resonant frequencies: α_{}/α_{} = {ratio} is a multiple of 1/2",
            j + 1,
            i + 1
        ))
    })
}

fn sampled_path(spec: &EllipsoidSpec, i: usize, tau: f64) -> Result<SampledSymplecticPath> {
    let alphas: Vec<f64> = spec.alphas.iter().map(|a| a.to_real().to_f64()).collect();
    let n = alphas.len();
    match spec.mode {
        Mode::Quadratic => {
            let mut b = DMatrix::zeros(2 * n, 2 * n);
            for (k, a) in alphas.iter().enumerate() {
                b[(k, k)] = *a;
                b[(n + k, n + k)] = *a;
            }
            let speed = alphas.iter().fold(0.0f64, |m, a| m.max(*a)) * tau;
            path_from_quadratic_hamiltonian(&b, tau, ((speed / 0.02).ceil() as usize).max(64))
        }
        Mode::Convex => {
            let blocks: Vec<BlockPath> = alphas
                .iter()
                .enumerate()
                .map(|(k, a)| {
                    if k == i {
                        BlockPath::Shear { half_turns: 2, b: 1.0 }
                    } else {
                        BlockPath::Rotation { angle_over_pi: a * tau / PI }
                    }
                })
                .collect();
            BlockPath::sample(&blocks, tau)
        }
    }
}

/// Index data and sampled path of the orbit on axis `i` (zero-based).
pub fn orbit_data(spec: &EllipsoidSpec, i: usize) -> Result<OrbitData> {
    let n = spec.n();
    if i >= n {
        return Err(Error::InvalidArgument(format!("axis {} out of range 1..={n}", i + 1)));
    }
    let n32 = u32::try_from(n).map_err(|_| Error::InvalidArgument("dimension overflows".into()))?;
    let mut decomp = NormalFormDecomposition::empty(n32);
    match spec.mode {
        Mode::Quadratic => decomp.p_zero = 1,
        Mode::Convex => decomp.p_minus = 1,
    }
    for j in (0..n).filter(|&j| j != i) {
        decomp.thetas.push(rotation_angle(spec, i, j)?);
    }
    let tau = 2.0 * PI / spec.alphas[i].to_real().to_f64();
    let path = sampled_path(spec, i, tau)?;
    let i1 = cz_index(&path, Complex64::new(1.0, 0.0), &OracleOptions::default())?.index;
    let mut data = PathIndexData::new(decomp, i1);
    data.convex_mode = spec.mode == Mode::Convex;
    Ok(OrbitData { axis: i, tau, data, path })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexRow {
    pub m: u64,
    pub index: i64,
    pub nullity: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleMismatch {
    pub m: u32,
    pub formula: IndexRow,
    pub oracle_index: i64,
    pub oracle_nullity: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitReport {
    pub axis: usize,
    pub alpha: Surd,
    pub tau: f64,
    pub data: PathIndexData,
    pub mean_index: Real,
    pub elliptic: bool,
    pub diagnostics: Vec<Diagnostic>,
    pub table: Vec<IndexRow>,
    /// Iterates compared against the oracle, and any disagreements.
    pub oracle_checked: u32,
    pub oracle_mismatches: Vec<OracleMismatch>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineParams {
    pub m_max: u64,
    pub n_max: u64,
    pub workers: usize,
    /// Fixed vertex; `None` admits every vertex.
    pub chi: Option<ChiVector>,
    pub epsilon: Option<Real>,
    pub delta: Option<Real>,
    pub ratio_bound: i128,
    /// Compare formula and oracle for iterates `m ≤ oracle_check_m`.
    pub oracle_check_m: u32,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams {
            m_max: 20,
            n_max: 1_000_000,
            workers: 0,
            chi: None,
            epsilon: None,
            delta: None,
            ratio_bound: 1_000_000,
            oracle_check_m: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JumpReport {
    pub vector: JumpVector,
    pub params: SearchParams,
    pub outcome: SearchOutcome,
    pub theorem211: Vec<Theorem211Report>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TheoremCounts {
    pub elliptic_orbits: usize,
    /// At least two elliptic orbits.
    pub elliptic_claim: bool,
    pub varrho: i64,
    pub varrho_lower_bound: i64,
    pub irrational_family: Vec<usize>,
    /// At least `ϱₙ` orbits with pairwise irrational mean-index ratios.
    pub irrational_claim: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EllipsoidReport {
    pub spec: EllipsoidSpec,
    pub non_resonant: bool,
    pub orbits: Vec<OrbitReport>,
    /// `max |î_i·α_i − î_j·α_j|`.
    pub mean_ratio_defect: Real,
    pub ratio_matrix: Vec<Vec<RatioClass>>,
    pub jump: Option<JumpReport>,
    /// Why the jump search was skipped, if it was.
    pub jump_skipped: Option<String>,
    pub counts: TheoremCounts,
}

fn oracle_compare(orbit: &OrbitData, upto: u32) -> Result<Vec<OracleMismatch>> {
    let mut out = Vec::new();
    let opts = OracleOptions::default();
    for m in 1..=upto {
        let it = iterate_path(&orbit.path, m)?;
        let o = cz_index(&it, Complex64::new(1.0, 0.0), &opts)?;
        let row = IndexRow {
            m: u64::from(m),
            index: index_iterate(&orbit.data, u64::from(m))?,
            nullity: nullity_iterate(&orbit.data, u64::from(m))?,
        };
        if o.index != row.index || o.nullity != row.nullity as usize {
            out.push(OracleMismatch { m, formula: row, oracle_index: o.index, oracle_nullity: o.nullity });
        }
    }
    Ok(out)
}

/// Orbit data, index tables, jump search and the theorem checks for one ellipsoid.
pub fn run_pipeline(spec: &EllipsoidSpec, params: &PipelineParams) -> Result<EllipsoidReport> {
    let n = spec.n();
    let orbits = (0..n).map(|i| orbit_data(spec, i)).collect::<Result<Vec<_>>>()?;
    let paths: Vec<PathIndexData> = orbits.iter().map(|o| o.data.clone()).collect();

    let mut reports = Vec::with_capacity(n);
    for o in &orbits {
        let table = (1..=params.m_max)
            .map(|m| {
                Ok(IndexRow { m, index: index_iterate(&o.data, m)?, nullity: nullity_iterate(&o.data, m)? })
            })
            .collect::<Result<Vec<_>>>()?;
        reports.push(OrbitReport {
            axis: o.axis + 1,
            alpha: spec.alphas[o.axis].clone(),
            tau: o.tau,
            data: o.data.clone(),
            mean_index: mean_index(&o.data),
            elliptic: o.data.decomp.is_elliptic(),
            diagnostics: validate(&o.data),
            table,
            oracle_checked: params.oracle_check_m,
            oracle_mismatches: oracle_compare(o, params.oracle_check_m)?,
        });
    }

    let weighted: Vec<Real> = reports.iter().zip(&spec.alphas).map(|(r, a)| &r.mean_index * &a.to_real()).collect();
    let mut defect = Real::int(0);
    for a in &weighted {
        for b in &weighted {
            let d = (a - b).abs();
            if d.cmp_real(&defect).is_gt() {
                defect = d;
            }
        }
    }

    let ratio_matrix = mean_ratio_classify(&paths, params.ratio_bound);
    let family = largest_irrational_family(&ratio_matrix);
    let n32 = u32::try_from(n).map_err(|_| Error::InvalidArgument("dimension overflows".into()))?;
    let rho = varrho(&paths, n32)?;
    let elliptic = reports.iter().filter(|r| r.elliptic).count();
    let counts = TheoremCounts {
        elliptic_orbits: elliptic,
        elliptic_claim: elliptic >= 2.min(n),
        varrho: rho,
        varrho_lower_bound: i64::from(n32 / 2 + 1),
        irrational_claim: family.len() as i64 >= rho,
        irrational_family: family,
    };

    let (jump, jump_skipped) = if paths.iter().any(|p| mean_index(p).signum() <= 0) {
        (None, Some("a mean index is not positive".to_string()))
    } else {
        let m = default_m(&paths)?;
        let vector = build_jump_vector(&paths, m, m)?;
        if params.chi.is_none() && vector.h > AUTO_MAX_H {
            (None, Some(format!("h = {} exceeds {AUTO_MAX_H}; pass an explicit χ", vector.h)))
        } else {
            let mut sp = SearchParams::with_defaults(&vector, &paths, params.n_max)?;
            sp.workers = params.workers;
            if let Some(d) = &params.delta {
                sp.delta = d.clone();
                sp.epsilon = crate::jump::default_epsilon(&vector, &paths, d)?;
            }
            if let Some(e) = &params.epsilon {
                sp.epsilon = e.clone();
            }
            let outcome = search_n(&vector, params.chi.as_ref(), &paths, &sp)?;
            let theorem211 = outcome
                .solutions
                .iter()
                .map(|s| theorem211_report(s, &paths, n32))
                .collect::<Result<Vec<_>>>()?;
            (Some(JumpReport { vector, params: sp, outcome, theorem211 }), None)
        }
    };

    Ok(EllipsoidReport {
        spec: spec.clone(),
        non_resonant: spec.non_resonant(),
        orbits: reports,
        mean_ratio_defect: defect,
        ratio_matrix,
        jump,
        jump_skipped,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str, mode: Mode) -> EllipsoidSpec {
        EllipsoidSpec::parse(s, mode).unwrap()
    }

    #[test]
    fn single_axis() {
        for mode in [Mode::Quadratic, Mode::Convex] {
            let o = orbit_data(&spec("1", mode), 0).unwrap();
            assert!(o.data.decomp.thetas.is_empty());
            assert_eq!(o.data.i1, 1);
        }
    }

    #[test]
    fn two_axes() {
        let s = spec("1,sqrt2", Mode::Convex);
        assert!(s.non_resonant());
        let o1 = orbit_data(&s, 0).unwrap();
        let o2 = orbit_data(&s, 1).unwrap();
        assert_eq!((o1.data.i1, o2.data.i1), (4, 2));
        assert!(!o1.data.decomp.thetas[0].is_rational());
        let two_root_two = &Real::int(2) * &Real::sqrt_int(2);
        assert_eq!(mean_index(&o1.data), &Real::int(2) + &two_root_two);
        assert!(validate(&o1.data).is_empty() && validate(&o2.data).is_empty());
    }

    #[test]
    fn resonance_rejected() {
        let err = orbit_data(&spec("1,2", Mode::Quadratic), 0).unwrap_err();
        assert!(matches!(err, Error::InvalidAngle(_)));
        assert!(!spec("1,3/2", Mode::Quadratic).non_resonant());
        assert!(orbit_data(&spec("1,3/2", Mode::Quadratic), 0).is_err());
        assert!(orbit_data(&spec("1,4/3", Mode::Quadratic), 0).is_ok());
    }

    #[test]
    fn quadratic_oracle_agreement() {
        let s = spec("1,sqrt2", Mode::Quadratic);
        for i in 0..2 {
            let o = orbit_data(&s, i).unwrap();
            assert!(oracle_compare(&o, 6).unwrap().is_empty());
        }
    }

    #[test]
    fn small_pipeline() {
        let s = spec("1,sqrt2", Mode::Convex);
        let params = PipelineParams { n_max: 5_000, m_max: 5, workers: 1, ..PipelineParams::default() };
        let r = run_pipeline(&s, &params).unwrap();
        assert!(r.mean_ratio_defect.to_f64() < 1e-40);
        assert!(r.orbits.iter().all(|o| o.elliptic));
        assert!(r.ratio_matrix[0][1].is_irrational());
        assert_eq!(r.counts.varrho, 2);
        assert!(r.counts.irrational_claim && r.counts.elliptic_claim);
        let jump = r.jump.unwrap();
        assert_eq!(jump.vector.h, 4);
        for t in &jump.theorem211 {
            assert!(t.passed(), "{t:?}");
        }
    }
}
