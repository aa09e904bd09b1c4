//! Seeded property suites shared by the test targets and the `selftest` command.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ellipsoid::{orbit_data, EllipsoidSpec, Mode};
use crate::error::Result;
use crate::iteration::{
    block_splitting, index_iterate, index_iterate_via_splitting, mean_index, nullity_iterate,
    realized_nullity_matches, NormalFormDecomposition, PathIndexData, SplittingPair,
};
use crate::jump::{build_jump_vector, chi_of, search_n, SearchParams};
use crate::normal_forms::{AngleClass, BasicNormalForm, UnitPoint};
use crate::numeric::{Rational, Real};
use crate::oracle::{cz_index, iterate_path, splitting_stable, BlockPath, OracleOptions};

const SQUAREFREE: [u64; 8] = [2, 3, 5, 6, 7, 10, 11, 13];

/// A random angle class, rational or irrational with equal odds.
pub fn random_angle(rng: &mut impl Rng) -> AngleClass {
    loop {
        let x = if rng.gen_bool(0.5) {
            let q: i128 = rng.gen_range(2..=12);
            Real::ratio(rng.gen_range(1..2 * q), q)
        } else {
            let k = *SQUAREFREE.choose(rng).expect("non-empty");
            let c = Real::ratio(rng.gen_range(1..=7), rng.gen_range(1..=5));
            &c * &Real::sqrt_int(k)
        };
        if let Ok(a) = AngleClass::reduce(&x) {
            return a;
        }
    }
}

/// A random decomposition with `1 ≤ n ≤ max_n`.
pub fn random_decomposition(rng: &mut impl Rng, max_n: u32) -> NormalFormDecomposition {
    let n = rng.gen_range(1..=max_n);
    let mut d = NormalFormDecomposition::empty(n);
    let mut left = n;
    while left > 0 {
        let pick = rng.gen_range(0..if left >= 2 { 12 } else { 10 });
        match pick {
            0 => d.p_minus += 1,
            1 => d.p_zero += 1,
            2 => d.p_plus += 1,
            3 => d.q_minus += 1,
            4 => d.q_zero += 1,
            5 => d.q_plus += 1,
            6 => d.k += 1,
            7..=9 => d.thetas.push(random_angle(rng)),
            10 => d.alphas.push(random_angle(rng)),
            _ => d.betas.push(random_angle(rng)),
        }
        left = n - d.block_dimension();
    }
    d
}

/// The endpoint decomposition of a ⋄-product of generator blocks.
pub fn block_decomposition(blocks: &[(BlockPath, Option<AngleClass>)]) -> NormalFormDecomposition {
    let n = blocks.iter().map(|(b, _)| b.half_dim() as u32).sum();
    let mut d = NormalFormDecomposition::empty(n);
    for (b, angle) in blocks {
        match (b, angle) {
            (BlockPath::Rotation { .. }, Some(a)) => d.thetas.push(a.clone()),
            (BlockPath::Rotation { angle_over_pi }, None) => {
                if angle_over_pi.rem_euclid(2.0) == 0.0 {
                    d.p_zero += 1;
                } else {
                    d.q_zero += 1;
                }
            }
            (BlockPath::Shear { half_turns, b }, _) => {
                let slot = match (half_turns % 2 == 0, b.partial_cmp(&0.0)) {
                    (true, Some(std::cmp::Ordering::Greater)) => &mut d.p_minus,
                    (true, Some(std::cmp::Ordering::Equal)) => &mut d.p_zero,
                    (true, _) => &mut d.p_plus,
                    (false, Some(std::cmp::Ordering::Greater)) => &mut d.q_minus,
                    (false, Some(std::cmp::Ordering::Equal)) => &mut d.q_zero,
                    (false, _) => &mut d.q_plus,
                };
                *slot += 1;
            }
            (BlockPath::Hyperbolic { .. }, _) => d.k += 1,
            (BlockPath::N2 { b, .. }, Some(a)) => {
                let nontrivial = (b[1] - b[2]) * f64::from(a.sin_sign()) < 0.0;
                if nontrivial {
                    d.alphas.push(a.clone());
                } else {
                    d.betas.push(a.clone());
                }
            }
            (BlockPath::N2 { .. }, None) => {}
        }
    }
    d
}

/// An `N₂` generator ending at the canonical block for `a`.
pub fn n2_block(a: &AngleClass, nontrivial: bool) -> BlockPath {
    let sign = f64::from(a.sin_sign());
    let d = if nontrivial { -sign } else { sign };
    let (s, c) = a.radians().sin_cos();
    let diag = -c * d / (2.0 * s);
    BlockPath::N2 { angle_over_pi: a.over_pi().to_f64(), b: [diag, d / 2.0, -d / 2.0, diag] }
}

/// Random generator blocks with total half-dimension at most `max_n`.
pub fn random_blocks(rng: &mut impl Rng, max_n: usize) -> Vec<(BlockPath, Option<AngleClass>)> {
    let n = rng.gen_range(1..=max_n);
    let mut out = Vec::new();
    let mut used = 0;
    while used < n {
        let pick = rng.gen_range(0..if n - used >= 2 { 6 } else { 5 });
        let block = match pick {
            0 | 1 => {
                let a = random_angle(rng);
                (BlockPath::Rotation { angle_over_pi: a.over_pi().to_f64() }, Some(a))
            }
            2 => (BlockPath::Rotation { angle_over_pi: f64::from(rng.gen_range(1..=2u8)) }, None),
            3 => {
                let b = [-1.0, 0.0, 1.0, 0.5, -2.0][rng.gen_range(0..5)];
                (BlockPath::Shear { half_turns: rng.gen_range(0..=3), b }, None)
            }
            4 => (BlockPath::Hyperbolic { lambda: 2.0 }, None),
            _ => {
                let a = random_angle(rng);
                (n2_block(&a, rng.gen_bool(0.5)), Some(a))
            }
        };
        used += block.0.half_dim();
        out.push(block);
    }
    out
}

/// The fixture with `î = φ`: `p₋ = 1`, one rotation at `θ/π = φ − 1`, `i₁ = 1`.
pub fn golden_fixture() -> PathIndexData {
    let x = (&Real::sqrt_int(5) - &Real::int(1)) / Real::int(2);
    let mut d = NormalFormDecomposition::empty(2);
    d.p_minus = 1;
    d.thetas = vec![AngleClass::new(x).expect("φ − 1 lies in (0, 1)")];
    PathIndexData::new(d, 1)
}

/// One row of the splitting-number table with the generator that realizes it.
#[derive(Clone, Debug)]
pub struct SplittingRow {
    pub label: String,
    pub blocks: Vec<BlockPath>,
    pub omega_over_pi: f64,
    pub expected: SplittingPair,
}

fn row(label: String, blocks: Vec<BlockPath>, omega_over_pi: f64, s_plus: u32, s_minus: u32) -> SplittingRow {
    SplittingRow { label, blocks, omega_over_pi, expected: SplittingPair { s_plus, s_minus } }
}

/// The single-block rows, with expectations taken from [`block_splitting`].
pub fn splitting_table_rows() -> Result<Vec<SplittingRow>> {
    let mut rows = Vec::new();
    let table = |form: &BasicNormalForm, w: &UnitPoint| block_splitting(form, w);
    for a in [1i8, 0, -1] {
        let f = BasicNormalForm::n1(1, a)?;
        let e = table(&f, &UnitPoint::One);
        rows.push(row(format!("N1(1,{a}) at 1"), vec![BlockPath::Shear { half_turns: 0, b: f64::from(a) }], 0.0, e.s_plus, e.s_minus));
        let f = BasicNormalForm::n1(-1, a)?;
        let e = table(&f, &UnitPoint::MinusOne);
        rows.push(row(format!("N1(-1,{a}) at -1"), vec![BlockPath::Shear { half_turns: 1, b: f64::from(a) }], 1.0, e.s_plus, e.s_minus));
    }
    for (p, q) in [(1i128, 3i128), (1, 2), (3, 4), (5, 4), (5, 3), (7, 4)] {
        let a = AngleClass::rational(p, q)?;
        let f = BasicNormalForm::r(a.clone());
        let x = a.over_pi().to_f64();
        let path = vec![BlockPath::Rotation { angle_over_pi: x }];
        for (w, name) in [(a.clone(), "θ"), (a.conjugate(), "-θ")] {
            let e = table(&f, &UnitPoint::Angle(w.clone()));
            rows.push(row(format!("R({p}π/{q}) at e^(i{name})"), path.clone(), w.over_pi().to_f64(), e.s_plus, e.s_minus));
        }
        rows.push(row(format!("R({p}π/{q}) off spectrum"), path.clone(), (x + 0.37).rem_euclid(2.0), 0, 0));
        for nontrivial in [true, false] {
            let f = BasicNormalForm::n2_with_twist(a.clone(), if nontrivial { -1.0 } else { 1.0 } * f64::from(a.sin_sign()))?;
            let e = table(&f, &UnitPoint::Angle(a.clone()));
            let kind = if nontrivial { "nontrivial" } else { "trivial" };
            rows.push(row(format!("N2({p}π/{q}) {kind}"), vec![n2_block(&a, nontrivial)], x, e.s_plus, e.s_minus));
        }
    }
    rows.push(row("D(2) at 1".into(), vec![BlockPath::Hyperbolic { lambda: 2.0 }], 0.0, 0, 0));
    rows.push(row("N1(1,1) at -1".into(), vec![BlockPath::Shear { half_turns: 0, b: 1.0 }], 1.0, 0, 0));
    Ok(rows)
}

/// Oracle estimate of `S^±` for a row.
pub fn estimate_row(r: &SplittingRow) -> Result<SplittingPair> {
    let path = BlockPath::sample(&r.blocks, 1.0)?;
    let w = Complex64::from_polar(1.0, PI * r.omega_over_pi);
    splitting_stable(&path, w, &[1e-3, 3e-4, 1e-4], &OracleOptions::default())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub cases: u64,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str) -> SuiteReport {
        SuiteReport { name: name.into(), cases: 0, failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, msg: String) {
        if self.failures.len() < 20 {
            self.failures.push(msg);
        }
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Closed formula against the splitting-number route, exact equality.
pub fn formula_equivalence(seed: u64, cases: u64, m_max: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("formula_equivalence");
    let mut rng = rng_for(seed, 1);
    for c in 0..cases {
        let d = random_decomposition(&mut rng, 5);
        let data = PathIndexData::new(d, rng.gen_range(-5..=10));
        for m in 1..=m_max {
            rep.cases += 1;
            match (index_iterate(&data, m), index_iterate_via_splitting(&data, m)) {
                (Ok(a), Ok(b)) if a == b => {}
                (a, b) => rep.fail(format!("case {c}, m = {m}: {a:?} vs {b:?}")),
            }
        }
    }
    rep
}

/// Derived nullity against the realized monodromy.
pub fn nullity_realization(seed: u64, cases: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("nullity_realization");
    let mut rng = rng_for(seed, 2);
    for c in 0..cases {
        let d = random_decomposition(&mut rng, 4);
        rep.cases += 1;
        match realized_nullity_matches(&PathIndexData::new(d.clone(), 0)) {
            Ok(true) => {}
            other => rep.fail(format!("case {c}: {other:?} for {d:?}")),
        }
    }
    rep
}

/// Oracle index and nullity of iterated generator paths against the formulas.
pub fn oracle_agreement(seed: u64, paths: u64, m_max: u32) -> SuiteReport {
    let mut rep = SuiteReport::new("oracle_agreement");
    let mut rng = rng_for(seed, 3);
    let opts = OracleOptions::default();
    let one = Complex64::new(1.0, 0.0);
    for c in 0..paths {
        let blocks = random_blocks(&mut rng, 3);
        let decomp = block_decomposition(&blocks);
        let gens: Vec<BlockPath> = blocks.iter().map(|(b, _)| b.clone()).collect();
        let outcome = (|| -> Result<Vec<String>> {
            let path = BlockPath::sample(&gens, 1.0)?;
            let i1 = cz_index(&path, one, &opts)?.index;
            let data = PathIndexData::new(decomp.clone(), i1);
            let mut bad = Vec::new();
            for m in 1..=m_max {
                let o = cz_index(&iterate_path(&path, m)?, one, &opts)?;
                let (i, nu) = (index_iterate(&data, u64::from(m))?, nullity_iterate(&data, u64::from(m))?);
                if o.index != i || o.nullity != nu as usize {
                    bad.push(format!("case {c}, m = {m}: oracle ({}, {}) vs formula ({i}, {nu}) for {gens:?}", o.index, o.nullity));
                }
            }
            Ok(bad)
        })();
        rep.cases += u64::from(m_max);
        match outcome {
            Ok(bad) => bad.into_iter().for_each(|b| rep.fail(b)),
            Err(e) => rep.fail(format!("case {c}: {e} for {gens:?}")),
        }
    }
    rep
}

/// Every row of the splitting table recovered by the oracle.
pub fn splitting_table() -> SuiteReport {
    let mut rep = SuiteReport::new("splitting_table");
    let rows = match splitting_table_rows() {
        Ok(r) => r,
        Err(e) => {
            rep.fail(format!("building rows: {e}"));
            return rep;
        }
    };
    for r in &rows {
        rep.cases += 1;
        match estimate_row(r) {
            Ok(s) if s == r.expected => {}
            other => rep.fail(format!("{}: oracle {other:?}, table {:?}", r.label, r.expected)),
        }
    }
    rep
}

/// Hits for `χ(a)` and `χ(−a)` on the golden fixture, with complementary vertices.
pub fn sign_symmetry(n_max: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("sign_symmetry");
    let g = golden_fixture();
    let paths = std::slice::from_ref(&g);
    let run = || -> Result<(usize, usize, bool)> {
        let v = build_jump_vector(paths, 1, 1)?;
        let params = SearchParams { workers: 1, ..SearchParams::with_defaults(&v, paths, n_max)? };
        let (a, b) = (chi_of(&[1.0, -1.0]), chi_of(&[-1.0, 1.0]));
        let ha = search_n(&v, Some(&a), paths, &params)?;
        let hb = search_n(&v, Some(&b), paths, &params)?;
        Ok((ha.solutions.len(), hb.solutions.len(), a.complement() == b))
    };
    rep.cases = 2;
    match run() {
        Ok((x, y, comp)) if x > 0 && y > 0 && comp => {}
        other => rep.fail(format!("hits / complement: {other:?}")),
    }
    rep
}

/// `î_i·α_i` is the same for every axis orbit.
pub fn ellipsoid_ratio() -> SuiteReport {
    let mut rep = SuiteReport::new("ellipsoid_ratio");
    for (alphas, mode) in [("1,sqrt2", Mode::Convex), ("1,sqrt2", Mode::Quadratic), ("1,sqrt2,sqrt3", Mode::Convex)] {
        rep.cases += 1;
        let run = || -> Result<bool> {
            let spec = EllipsoidSpec::parse(alphas, mode)?;
            let mut prods = Vec::new();
            for i in 0..spec.n() {
                let o = orbit_data(&spec, i)?;
                prods.push(&mean_index(&o.data) * &spec.alphas[i].to_real());
            }
            let tol = Real::Rational(Rational::new(1, 10i128.pow(30)));
            Ok(prods.windows(2).all(|w| (&w[0] - &w[1]).abs().cmp_real(&tol).is_lt()))
        };
        match run() {
            Ok(true) => {}
            other => rep.fail(format!("{alphas} ({mode:?}): {other:?}")),
        }
    }
    rep
}

/// All suites; `quick` shrinks the randomized ones.
pub fn run_all(seed: u64, quick: bool) -> Vec<SuiteReport> {
    let (cases, paths) = if quick { (100, 10) } else { (500, 50) };
    vec![
        formula_equivalence(seed, cases, 200),
        nullity_realization(seed, cases),
        oracle_agreement(seed, paths, if quick { 8 } else { 20 }),
        splitting_table(),
        sign_symmetry(if quick { 100_000 } else { 1_000_000 }),
        ellipsoid_ratio(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_valid_and_seeded() {
        let mut a = rng_for(7, 1);
        let mut b = rng_for(7, 1);
        for _ in 0..50 {
            let d = random_decomposition(&mut a, 5);
            assert!(d.check().is_ok());
            assert_eq!(d, random_decomposition(&mut b, 5));
        }
        let mut r = rng_for(3, 3);
        for _ in 0..50 {
            let blocks = random_blocks(&mut r, 3);
            assert!(block_decomposition(&blocks).check().is_ok());
        }
    }

    #[test]
    fn small_suites_pass() {
        for rep in [formula_equivalence(1, 20, 30), nullity_realization(1, 20), oracle_agreement(1, 3, 4), ellipsoid_ratio()] {
            assert!(rep.passed(), "{rep:?}");
        }
    }
}
