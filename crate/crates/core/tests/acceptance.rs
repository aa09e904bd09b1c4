//! End-to-end acceptance checks, one test per criterion.
//!
//! Each test prints a single `PASS`/`FAIL` line with its measurements before asserting.

use std::time::{Duration, Instant};

use indexjump::ellipsoid::{orbit_data, run_pipeline, EllipsoidSpec, Mode, PipelineParams};
use indexjump::iteration::{
    c_of_m, i_value, index_iterate, index_iterate_via_splitting, mean_index, nullity_iterate, s_plus_one, PathIndexData,
};
use indexjump::jump::{
    build_jump_vector, chi_of, default_m, largest_irrational_family, mean_ratio_classify, search_n, theorem211_report,
    varrho, CoordKind, JumpSolution, JumpVector, SearchOutcome, SearchParams,
};
use indexjump::numeric::{set_precision, Rational, Real};
use indexjump::oracle::{cz_index, iterate_path, BlockPath, OracleOptions};
use indexjump::selftest::{
    block_decomposition, estimate_row, golden_fixture, random_blocks, random_decomposition, splitting_table_rows,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(criterion: u32, name: &str, ok: bool, detail: impl std::fmt::Display) {
    println!("criterion {criterion} [{name}]: {} ({detail})", if ok { "PASS" } else { "FAIL" });
}

fn within(elapsed: Duration, secs: u64) -> bool {
    elapsed <= Duration::from_secs(secs)
}

fn ellipsoid_paths() -> Vec<PathIndexData> {
    let spec = EllipsoidSpec::parse("1,sqrt2", Mode::Convex).unwrap();
    (0..spec.n()).map(|i| orbit_data(&spec, i).unwrap().data).collect()
}

fn ellipsoid_search(workers: usize) -> (JumpVector, SearchParams, SearchOutcome, Vec<PathIndexData>) {
    let paths = ellipsoid_paths();
    let m = default_m(&paths).unwrap();
    let v = build_jump_vector(&paths, m, m).unwrap();
    let params = SearchParams { workers, ..SearchParams::with_defaults(&v, &paths, 1_000_000).unwrap() };
    let out = search_n(&v, None, &paths, &params).unwrap();
    (v, params, out, paths)
}

#[test]
fn c1_formula_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a2b);
    let (mut compared, mut irrational, mut bad) = (0u64, 0u64, Vec::new());
    for c in 0..500 {
        let d = random_decomposition(&mut rng, 5);
        irrational += u64::from(d.thetas.iter().any(|t| !t.is_rational()));
        let data = PathIndexData::new(d, rng.gen_range(-5..=10));
        for m in 1..=200 {
            compared += 1;
            let (a, b) = (index_iterate(&data, m).unwrap(), index_iterate_via_splitting(&data, m).unwrap());
            if a != b {
                bad.push(format!("case {c}, m = {m}: {a} vs {b}"));
            }
        }
    }
    let t = start.elapsed();
    let ok = bad.is_empty() && within(t, 10) && irrational > 0;
    report(1, "formula equivalence", ok, format!("{compared} pairs, {irrational} with irrational angles, {} mismatches, {t:.2?}", bad.len()));
    assert!(bad.is_empty(), "{:?}", &bad[..bad.len().min(5)]);
    assert!(irrational > 0);
    assert!(within(t, 10), "took {t:?}");
}

#[test]
fn c2_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x2c3d);
    let opts = OracleOptions::default();
    let one = Complex64::new(1.0, 0.0);
    let (mut combos, mut bad) = (0u32, Vec::new());
    for c in 0..8 {
        let blocks = random_blocks(&mut rng, 3);
        let decomp = block_decomposition(&blocks);
        let gens: Vec<BlockPath> = blocks.iter().map(|(b, _)| b.clone()).collect();
        let path = BlockPath::sample(&gens, 1.0).unwrap();
        let data = PathIndexData::new(decomp, cz_index(&path, one, &opts).unwrap().index);
        for m in 1..=20u32 {
            combos += 1;
            let o = cz_index(&iterate_path(&path, m).unwrap(), one, &opts).unwrap();
            let (i, nu) = (index_iterate(&data, u64::from(m)).unwrap(), nullity_iterate(&data, u64::from(m)).unwrap());
            if o.index != i || o.nullity != nu as usize {
                bad.push(format!("case {c}, m = {m}: oracle ({}, {}) vs ({i}, {nu}) for {gens:?}", o.index, o.nullity));
            }
        }
    }
    let t = start.elapsed();
    let ok = bad.is_empty() && combos >= 50 && within(t, 60);
    report(2, "oracle equivalence", ok, format!("{combos} path/m combinations, {} mismatches, {t:.2?}", bad.len()));
    assert!(bad.is_empty(), "{:?}", &bad[..bad.len().min(5)]);
    assert!(combos >= 50);
    assert!(within(t, 60), "took {t:?}");
}

#[test]
fn c3_splitting_recovery() {
    let rows = splitting_table_rows().unwrap();
    let mut bad = Vec::new();
    for r in &rows {
        match estimate_row(r) {
            Ok(s) if s == r.expected => {}
            other => bad.push(format!("{}: {other:?} vs {:?}", r.label, r.expected)),
        }
    }
    report(3, "splitting recovery", bad.is_empty(), format!("{} rows, {} mismatches", rows.len(), bad.len()));
    assert!(bad.is_empty(), "{bad:?}");
}

/// `{N·c}` lies within `ε` of the vertex `χ`.
fn on_vertex(c: &Real, n: u64, chi: u8, eps: &Real) -> bool {
    let f = c.frac_mul(i128::from(n));
    match chi {
        0 => f.cmp_real(eps).is_lt(),
        _ => (&Real::int(1) - &f).cmp_real(eps).is_lt(),
    }
}

/// The angle window for irrational angles, exact integrality for rational ones.
fn angle_ok(x: &Real, mk: u64, delta: &Real) -> bool {
    if x.is_rational() {
        return x.is_integer_mul(i128::from(mk));
    }
    let f = x.frac_mul(i128::from(mk));
    let g = &Real::int(1) - &f;
    let near = if f.cmp_real(&g).is_lt() { f } else { g };
    near.cmp_real(delta).is_lt()
}

fn gate_failures(sol: &JumpSolution, v: &JumpVector, params: &SearchParams, paths: &[PathIndexData]) -> Vec<String> {
    let mut bad = Vec::new();
    for (k, data) in paths.iter().enumerate() {
        let lhs = i_value(data, sol.m[k]).unwrap();
        if lhs != sol.n as i64 + i64::from(sol.delta[k]) {
            bad.push(format!("N = {}: I({k}, {}) = {lhs} vs N + Δ = {}", sol.n, sol.m[k], sol.n as i64 + i64::from(sol.delta[k])));
        }
    }
    for (j, (c, kind)) in v.coords.iter().zip(&v.kinds).enumerate() {
        if !on_vertex(c, sol.n, sol.chi.0[j], &params.epsilon) {
            bad.push(format!("N = {}: coordinate {j} off vertex", sol.n));
        }
        if let CoordKind::Angle { path, angle_over_pi } = kind {
            if !angle_ok(angle_over_pi, sol.m[*path], &params.delta) {
                bad.push(format!("N = {}: angle window for path {path}", sol.n));
            }
        }
    }
    bad
}

#[test]
fn c4_identity_gate() {
    let start = Instant::now();
    let (v, params, out, paths) = ellipsoid_search(0);
    let t = start.elapsed();
    let bad: Vec<String> = out.solutions.iter().flat_map(|s| gate_failures(s, &v, &params, &paths)).collect();
    let ok = !out.solutions.is_empty() && bad.is_empty() && within(t, 120);
    report(4, "identity gate", ok, format!("{} solutions, {} gate failures, {t:.2?}", out.solutions.len(), bad.len()));
    assert!(!out.solutions.is_empty());
    assert!(bad.is_empty(), "{:?}", &bad[..bad.len().min(5)]);
    assert!(within(t, 120), "took {t:?}");
}

#[test]
fn c5_ellipsoid_ratio() {
    set_precision(50).unwrap();
    let paths = ellipsoid_paths();
    let ratio = &mean_index(&paths[0]) / &mean_index(&paths[1]);
    let defect = (&ratio - &Real::sqrt_int(2)).abs();
    let tol = Real::Rational(Rational::new(1, 10i128.pow(30)));
    let ok = defect.cmp_real(&tol).is_lt() && !ratio.is_rational();
    report(5, "ellipsoid mean-index ratio", ok, format!("î₁/î₂ = {ratio}, |î₁/î₂ − √2| = {:e}", defect.to_f64()));
    assert!(ok);
}

#[test]
fn c6_theorem_consequences() {
    let (_, _, out, paths) = ellipsoid_search(0);
    let n = 2;
    let mut bad = Vec::new();
    let mut assigned = 0;
    for sol in &out.solutions {
        let rep = theorem211_report(sol, &paths, n).unwrap();
        if !rep.passed() || !rep.all_assigned || !rep.ordering_ok || !rep.monotone_ok {
            bad.push(format!("N = {}: {:?}", sol.n, rep.issues));
        }
        let mut chis = Vec::new();
        for a in &rep.assignments {
            let Some(k) = a.path else { continue };
            assigned += 1;
            let d = &paths[k].decomp;
            let expect = 2 * (sol.n as i64 + i64::from(sol.delta[k])) - i64::from(s_plus_one(d) + c_of_m(d));
            let got = index_iterate(&paths[k], 2 * sol.m[k]).unwrap();
            if got != expect {
                bad.push(format!("N = {}, s = {}: i(2m) = {got} vs {expect}", sol.n, a.s));
            }
            chis.push(sol.chi.0[k]);
        }
        if chis.windows(2).any(|w| w[1] > w[0]) {
            bad.push(format!("N = {}: χ not monotone in s: {chis:?}", sol.n));
        }
    }
    let ok = !out.solutions.is_empty() && bad.is_empty();
    report(6, "theorem consequences", ok, format!("{} solutions, {assigned} assignments, {} failures", out.solutions.len(), bad.len()));
    assert!(ok, "{:?}", &bad[..bad.len().min(5)]);
}

#[test]
fn c7_sign_symmetry() {
    let g = golden_fixture();
    let paths = std::slice::from_ref(&g);
    let v = build_jump_vector(paths, 1, 1).unwrap();
    let params = SearchParams::with_defaults(&v, paths, 1_000_000).unwrap();
    let (a, b) = (chi_of(&[1.0, -1.0]), chi_of(&[-1.0, 1.0]));
    let ha = search_n(&v, Some(&a), paths, &params).unwrap();
    let hb = search_n(&v, Some(&b), paths, &params).unwrap();
    let complementary = a.complement() == b;
    let ok = !ha.solutions.is_empty() && !hb.solutions.is_empty() && complementary;
    report(
        7,
        "sign symmetry",
        ok,
        format!("χ(a) = {a}: {} hits, χ(−a) = {b}: {} hits, complementary = {complementary}", ha.solutions.len(), hb.solutions.len()),
    );
    assert!(ok);
}

#[test]
fn c8_varrho_bound() {
    let mut lines = Vec::new();
    let mut ok = true;
    for alphas in ["1,sqrt2", "1,sqrt2,sqrt3", "1,sqrt2,sqrt3,sqrt5"] {
        let spec = EllipsoidSpec::parse(alphas, Mode::Convex).unwrap();
        let n = spec.n() as u32;
        let paths: Vec<PathIndexData> = (0..spec.n()).map(|i| orbit_data(&spec, i).unwrap().data).collect();
        let rho = varrho(&paths, n).unwrap();
        let family = largest_irrational_family(&mean_ratio_classify(&paths, 1_000_000));
        let bound = i64::from(n / 2 + 1);
        let params = PipelineParams { n_max: 1000, ..PipelineParams::default() };
        let counts = run_pipeline(&spec, &params).unwrap().counts;
        let this = rho >= bound && family.len() as i64 >= rho && counts.varrho == rho && counts.irrational_claim;
        ok &= this;
        lines.push(format!("n = {n}: ϱ = {rho} ≥ {bound}, family {}", family.len()));
    }
    report(8, "varrho bound", ok, lines.join("; "));
    assert!(ok);
}

#[test]
fn c9_determinism() {
    let runs: Vec<String> = [1, 4, 8]
        .into_iter()
        .map(|w| {
            let (_, _, out, _) = ellipsoid_search(w);
            serde_json::to_string(&out).unwrap()
        })
        .collect();
    let ok = runs.windows(2).all(|w| w[0] == w[1]);
    report(9, "determinism", ok, format!("{} bytes per run, workers 1/4/8", runs[0].len()));
    assert!(ok);
}
