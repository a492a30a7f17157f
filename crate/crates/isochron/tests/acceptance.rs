//! Acceptance gate: one test per shipped claim, each printing a PASS line
//! with its runtime when it holds (run with `--nocapture` to see them).
//! Randomized cases are seeded through the ISOCHRON_SEED environment
//! variable (fixed default) so failures reproduce.

use std::path::Path;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use isochron::expr::parse_scalar;
use isochron::format::SystemFile;
use isochron::gauss::GaussianRational;
use isochron::manifold::{compute_manifold, manifold_residual, reduce_on_manifold};
use isochron::nfengine::{compute_f, compute_g, constants_report, residual_f, residual_g};
use isochron::numverify::{loglog_slope, scan, NumSystem};
use isochron::oracle::{dense_solve, SeriesTarget};
use isochron::params::ParamSet;
use isochron::scalar::Scalar;
use isochron::sysmodel::{ComplexSystemSpec, RealSystemSpec, TermMap};

fn fixture(name: &str) -> SystemFile {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name);
    SystemFile::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn moon_rand_complex() -> ComplexSystemSpec {
    fixture("moon_rand.json").into_system().unwrap().complexified()
}

fn moon_rand_real() -> RealSystemSpec {
    match fixture("moon_rand.json").into_system().unwrap() {
        isochron::format::LoadedSystem::Real(s) => s,
        _ => unreachable!(),
    }
}

fn quad_complex() -> ComplexSystemSpec {
    fixture("quad_complex.json").into_system().unwrap().complexified()
}

fn rng_for(tag: u64) -> ChaCha8Rng {
    let seed = std::env::var("ISOCHRON_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0x1505_u64);
    ChaCha8Rng::seed_from_u64(seed ^ tag)
}

fn small_rational(rng: &mut ChaCha8Rng) -> GaussianRational {
    let num = rng.gen_range(-3i64..=3);
    let den = rng.gen_range(1i64..=3);
    GaussianRational::from_ratio(num, den)
}

fn nonzero_rational(rng: &mut ChaCha8Rng) -> GaussianRational {
    loop {
        let v = small_rational(rng);
        if !v.is_zero() {
            return v;
        }
    }
}

/// A random parameter-free complex spec with Gaussian-rational
/// coefficients: quadratic or cubic, full 3D or a planar system (no
/// u-coupling) embedded in 3D. Supports are kept sparse (a few unit
/// Gaussian coefficients per equation): exact coefficients of the
/// normal-form series grow roughly geometrically in bit size with the
/// density of the spec, and dense draws make the suite's runtime
/// unbounded in practice while testing nothing extra.
fn random_numeric_spec(rng: &mut ChaCha8Rng, cubic: bool, three_d: bool) -> ComplexSystemSpec {
    let ps = ParamSet::empty();
    let max_degree = if cubic { 3 } else { 2 };
    let terms_per_eq = if cubic { 3 } else { 2 };
    let mut keys = Vec::new();
    for k in 0..=max_degree {
        for j in 0..=(max_degree - k) {
            for l in 0..=(max_degree - k - j) {
                if k + j + l >= 2 && (three_d || l == 0) {
                    keys.push((k, j, l));
                }
            }
        }
    }
    let one = GaussianRational::one();
    let i = GaussianRational::i();
    let units = [
        one.clone(),
        i.clone(),
        &GaussianRational::zero() - &one,
        &GaussianRational::zero() - &i,
    ];
    let pick = |rng: &mut ChaCha8Rng| -> TermMap {
        let mut out = TermMap::new();
        for _ in 0..terms_per_eq {
            let key = keys[rng.gen_range(0..keys.len())];
            let c = units[rng.gen_range(0..units.len())].clone();
            out.insert(key, Scalar::from_gauss(&ps, c));
        }
        out
    };
    let z_terms = pick(rng);
    let w_terms = pick(rng);
    let u_terms = if three_d { pick(rng) } else { TermMap::new() };
    ComplexSystemSpec {
        params: ps.clone(),
        d: Scalar::from_gauss(&ps, GaussianRational::from_int(rng.gen_range(1..=3))),
        z_terms,
        w_terms,
        u_terms,
        max_degree,
    }
}

/// A random numeric assignment with a sparse support: up to two
/// parameters get a random Gaussian unit, the rest are zeroed
/// (declared-nonzero parameters always get ±1). Exact evaluation
/// through m = 8 needs the sparsity — the bit size of the series
/// coefficients grows geometrically with the number of interacting
/// nonlinear terms, and dense assignments are intractable at that
/// order.
fn assign_sparse_numeric(
    spec: &ComplexSystemSpec,
    rng: &mut ChaCha8Rng,
) -> ComplexSystemSpec {
    let empty = ParamSet::empty();
    let n = spec.params.len();
    let mut keep = vec![false; n];
    for _ in 0..2 {
        keep[rng.gen_range(0..n)] = true;
    }
    let sign = |rng: &mut ChaCha8Rng| if rng.gen_bool(0.5) { 1 } else { -1 };
    let values: Vec<Scalar> = (0..n)
        .map(|idx| {
            let desc = spec.params.descriptor(idx);
            let v = if desc.declared_real {
                if desc.declared_nonzero || keep[idx] {
                    GaussianRational::from_int(sign(rng))
                } else {
                    GaussianRational::zero()
                }
            } else if keep[idx] {
                let unit = GaussianRational::from_int(sign(rng));
                if rng.gen_bool(0.5) {
                    &GaussianRational::i() * &unit
                } else {
                    unit
                }
            } else {
                GaussianRational::zero()
            };
            Scalar::from_gauss(&empty, v)
        })
        .collect();
    spec.substitute_params(&empty, &values).unwrap()
}

fn all_zero(constants: &[Scalar]) -> bool {
    constants.iter().all(Scalar::is_zero)
}

fn pass(n: u32, what: &str, started: Instant) {
    println!(
        "criterion {n}: PASS — {what} ({:.2}s)",
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_01_moon_rand_first_constants() {
    let started = Instant::now();
    let spec = moon_rand_complex();
    let ps = &spec.params;
    let (_, p) = compute_f(&spec, 1).unwrap();
    let (_, q) = compute_g(&spec, 1).unwrap();
    let expected_p = parse_scalar(
        "(c0*(3*c1+c3) - i*(4*c1+c0*c2+4*c3)) / (8*c0*(c0-2*i))",
        ps,
    )
    .unwrap();
    let expected_q = parse_scalar(
        "-(c0*(3*c1+c3) + i*(4*c1+c0*c2+4*c3)) / (8*c0*(c0+2*i))",
        ps,
    )
    .unwrap();
    assert_eq!(p[0], expected_p);
    assert_eq!(q[0], expected_q);
    assert!(started.elapsed().as_secs() < 5, "over the 5 s budget");
    pass(1, "Moon–Rand p'_1, q'_1 match the published expressions", started);
}

#[test]
fn criterion_02_moon_rand_second_constants_on_locus() {
    let started = Instant::now();
    let spec = moon_rand_complex();
    let chain = vec![vec![
        ("c1".to_string(), "c0*c2/8".to_string()),
        ("c3".to_string(), "-3*c0*c2/8".to_string()),
    ]];
    let report = constants_report(&spec, 2, &chain).unwrap();
    let ps = ParamSet::new(vec![
        isochron::params::ParamDescriptor::real_nonzero("c0"),
        isochron::params::ParamDescriptor::real("c2"),
    ])
    .unwrap();
    assert!(report.records[0].p.is_zero());
    assert!(report.records[0].q.is_zero());
    let expected_p = parse_scalar("-3*(c0+2*i)*c2^2 / (1024*(c0-2*i))", &ps).unwrap();
    let expected_q = parse_scalar("3*(c0-2*i)*c2^2 / (1024*(c0+2*i))", &ps).unwrap();
    assert_eq!(report.records[1].p, expected_p);
    assert_eq!(report.records[1].q, expected_q);
    assert!(started.elapsed().as_secs() < 30, "over the 30 s budget");
    pass(2, "Moon–Rand p'_2, q'_2 on the p'_1 = 0 locus match", started);
}

#[test]
fn criterion_03_moon_rand_vanishing_tail() {
    let started = Instant::now();
    let spec = moon_rand_complex();
    let chain = vec![vec![
        ("c1".to_string(), "0".to_string()),
        ("c2".to_string(), "0".to_string()),
        ("c3".to_string(), "0".to_string()),
    ]];
    let report = constants_report(&spec, 10, &chain).unwrap();
    for rec in &report.records {
        assert!(rec.p.is_zero(), "p'_{} nonzero", rec.m);
        assert!(rec.q.is_zero(), "q'_{} nonzero", rec.m);
    }
    assert!(started.elapsed().as_secs() < 600, "over the 10 min budget");
    pass(3, "Moon–Rand c1=c2=c3=0: p'_m = q'_m = 0 symbolically, m ≤ 10", started);
}

#[test]
#[ignore = "stretch run; no time bound"]
fn criterion_03_stretch_vanishing_tail_to_twenty() {
    let started = Instant::now();
    let spec = moon_rand_complex();
    let chain = vec![vec![
        ("c1".to_string(), "0".to_string()),
        ("c2".to_string(), "0".to_string()),
        ("c3".to_string(), "0".to_string()),
    ]];
    let report = constants_report(&spec, 20, &chain).unwrap();
    for rec in &report.records {
        assert!(rec.p.is_zero() && rec.q.is_zero(), "order {} nonzero", rec.m);
    }
    pass(3, "stretch: vanishing tail holds through m = 20", started);
}

fn quad_conditions() -> [Vec<(String, String)>; 4] {
    let step = |pairs: &[(&str, &str)]| -> Vec<(String, String)> {
        pairs
            .iter()
            .map(|(n, e)| (n.to_string(), e.to_string()))
            .collect()
    };
    [
        step(&[("b1", "0"), ("b2", "0")]),
        step(&[("a1", "0"), ("a2", "0")]),
        step(&[("b1", "0"), ("a2", "0")]),
        step(&[("a2", "-a1"), ("b1", "-b2")]),
    ]
}

#[test]
fn criterion_04_quadratic_system_constants_and_conditions() {
    let started = Instant::now();
    let spec = quad_complex();
    let ps = &spec.params;
    let (_, p) = compute_f(&spec, 1).unwrap();
    let (_, q) = compute_g(&spec, 1).unwrap();
    assert_eq!(p[0], parse_scalar("-b1*(a1+a2)", ps).unwrap());
    assert_eq!(q[0], parse_scalar("a2*(b1+b2)", ps).unwrap());

    let mut rng = rng_for(4);
    for (idx, condition) in quad_conditions().into_iter().enumerate() {
        // symbolically through m = 4
        let report = constants_report(&spec, 4, &[condition.clone()]).unwrap();
        for rec in &report.records {
            assert!(
                rec.p.is_zero() && rec.q.is_zero(),
                "condition ({}) order {} nonzero symbolically",
                idx + 1,
                rec.m
            );
        }
        // exact evaluation at random Gaussian-rational points through m = 8
        let (reduced, _) =
            isochron::nfengine::apply_subs_chain(&spec, &[condition]).unwrap();
        for _ in 0..10 {
            let numeric = assign_sparse_numeric(&reduced, &mut rng);
            let (_, p) = compute_f(&numeric, 8).unwrap();
            let (_, q) = compute_g(&numeric, 8).unwrap();
            assert!(all_zero(&p) && all_zero(&q), "condition ({}) numeric", idx + 1);
        }
    }
    assert!(started.elapsed().as_secs() < 600, "over the 10 min budget");
    pass(4, "quadratic system: p'_1, q'_1 exact; conditions (i)–(iv) vanish", started);
}

#[test]
fn criterion_05_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = rng_for(5);
    for case in 0..40 {
        let cubic = case % 2 == 0;
        let three_d = case % 4 < 2;
        let spec = random_numeric_spec(&mut rng, cubic, three_d);
        let (tf, p) = compute_f(&spec, 4).unwrap();
        let (of, op, _) = dense_solve(&spec, 4, SeriesTarget::F).unwrap();
        assert_eq!(p, op, "case {case}: f-constants differ");
        assert_eq!(tf.series.coeffs, of.series.coeffs, "case {case}: f-tables differ");
        let (tg, q) = compute_g(&spec, 4).unwrap();
        let (og, oq, _) = dense_solve(&spec, 4, SeriesTarget::G).unwrap();
        assert_eq!(q, oq, "case {case}: g-constants differ");
        assert_eq!(tg.series.coeffs, og.series.coeffs, "case {case}: g-tables differ");
    }
    assert!(started.elapsed().as_secs() < 300, "over the 5 min budget");
    pass(5, "engine and dense oracle agree on 40 random numeric specs, M = 4", started);
}

/// Direct-3D and manifold-reduced-2D constants are compared through the
/// first non-vanishing order: that is the exact content of the reduction
/// theorem (each constant is only claimed equal while every earlier one
/// vanishes; beyond that point the two computations normalize different
/// series and genuinely diverge).
fn assert_prefix_equal(a: &[Scalar], b: &[Scalar], what: &str) {
    for (m, (x, y)) in a.iter().zip(b).enumerate() {
        assert_eq!(x, y, "{what}: order {} differs", m + 1);
        if !x.is_zero() {
            return;
        }
    }
}

#[test]
fn criterion_06_reduction_consistency() {
    let started = Instant::now();
    let mut rng = rng_for(6);
    let mut checked = 0;
    while checked < 10 {
        let spec = random_numeric_spec(&mut rng, checked % 2 == 0, true);
        if spec.u_terms.is_empty() {
            continue;
        }
        let h = compute_manifold(&spec, 7).unwrap();
        assert!(manifold_residual(&spec, &h).is_zero());
        let reduced = reduce_on_manifold(&spec, &h).embed_complex();
        let (_, p3) = compute_f(&spec, 3).unwrap();
        let (_, p2) = compute_f(&reduced, 3).unwrap();
        assert_prefix_equal(&p3, &p2, "p");
        let (_, q3) = compute_g(&spec, 3).unwrap();
        let (_, q2) = compute_g(&reduced, 3).unwrap();
        assert_prefix_equal(&q3, &q2, "q");
        checked += 1;
    }
    // the Moon–Rand p'_1 = 0 locus exercises agreement through m = 2
    let empty = ParamSet::empty();
    let values: Vec<Scalar> = ["2", "1/4", "1", "-3/4"]
        .iter()
        .map(|t| parse_scalar(t, &empty).unwrap())
        .collect();
    let spec = moon_rand_complex().substitute_params(&empty, &values).unwrap();
    let h = compute_manifold(&spec, 7).unwrap();
    let reduced = reduce_on_manifold(&spec, &h).embed_complex();
    let (_, p3) = compute_f(&spec, 3).unwrap();
    let (_, p2) = compute_f(&reduced, 3).unwrap();
    assert!(p3[0].is_zero() && !p3[1].is_zero());
    assert_prefix_equal(&p3, &p2, "locus p");
    pass(6, "3D constants equal manifold-reduced 2D constants (through the first non-vanishing order)", started);
}

#[test]
fn criterion_07_residual_identities() {
    let started = Instant::now();
    let mut runs = 0;

    let mut check = |spec: &ComplexSystemSpec, m: u32| {
        let (tf, p) = compute_f(spec, m).unwrap();
        assert!(residual_f(spec, &tf, &p).is_zero(), "f-residual nonzero");
        let (tg, q) = compute_g(spec, m).unwrap();
        assert!(residual_g(spec, &tg, &q).is_zero(), "g-residual nonzero");
        runs += 2;
    };

    check(&moon_rand_complex(), 2);
    check(&quad_complex(), 1);
    let mut rng = rng_for(7);
    for case in 0..8 {
        let spec = random_numeric_spec(&mut rng, case % 2 == 0, case % 3 != 0);
        check(&spec, 3);
    }
    assert!(runs >= 20, "only {runs} runs checked");
    pass(7, "defining identities hold (zero residual) across all engine runs", started);
}

fn moon_rand_numeric(vals: [&str; 4]) -> RealSystemSpec {
    let empty = ParamSet::empty();
    let values: Vec<Scalar> = vals
        .iter()
        .map(|t| parse_scalar(t, &empty).unwrap())
        .collect();
    moon_rand_real().substitute_params(&empty, &values).unwrap()
}

#[test]
fn criterion_08_numeric_isochronicity() {
    let started = Instant::now();
    let two_pi = 2.0 * std::f64::consts::PI;
    let tol = 1e-12;

    // Moon–Rand with the u-equation linear: motion on u = 0 is a rotation
    let spec = moon_rand_numeric(["1", "0", "0", "0"]);
    let sys = NumSystem::new(&spec, &[]).unwrap();
    for amplitude in [0.05, 0.1] {
        let result = scan(&sys, &[amplitude], 6, tol).unwrap();
        let point = &result.points[0];
        let mut prev = 0.0;
        for &t in &point.return_times {
            assert!((t - prev - two_pi).abs() < 1e-9, "gap off at amplitude {amplitude}");
            prev = t;
        }
    }

    // quadratic system under condition (iv): a1=1, b1=-1, a2=-1, b2=1,
    // c1=c2=0, r=1, a3=1, b3=-1, c3=0 — satisfies the reality conditions
    let empty = ParamSet::empty();
    let vals = ["1", "1", "-1", "0", "-1", "1", "0", "1", "-1", "0"]; // r,a1,b1,c1,a2,b2,c2,a3,b3,c3
    let values: Vec<Scalar> = vals
        .iter()
        .map(|t| parse_scalar(t, &empty).unwrap())
        .collect();
    let quad = quad_complex()
        .substitute_params(&empty, &values)
        .unwrap()
        .realify(1)
        .unwrap();
    let sys = NumSystem::new(&quad, &[]).unwrap();
    for amplitude in [0.05, 0.1] {
        let result = scan(&sys, &[amplitude], 6, tol).unwrap();
        assert!(
            result.points[0].deviation < 1e-7,
            "quad condition (iv) deviation {}",
            result.points[0].deviation
        );
    }

    // generic Moon–Rand: first constant nonzero, deviation visible
    let spec = moon_rand_numeric(["1", "1", "1", "1"]);
    let complex = spec.complexify();
    let h = compute_manifold(&complex, 3).unwrap();
    let sys = NumSystem::new(&spec, &[]).unwrap().with_manifold(&h, &[]).unwrap();
    let result = scan(&sys, &[0.1], 8, tol).unwrap();
    assert!(
        result.points[0].deviation > 1e-4,
        "generic deviation only {}",
        result.points[0].deviation
    );
    pass(8, "numeric period measurements match the constants' predictions", started);
}

#[test]
fn criterion_09_scaling_exponent() {
    let started = Instant::now();
    // p'_1 = 0, p'_2 ≠ 0 locus: c1 = c0c2/8, c3 = -3c0c2/8 at c0 = c2 = 1
    let spec = moon_rand_numeric(["1", "1/8", "1", "-3/8"]);
    let complex = spec.complexify();
    let h = compute_manifold(&complex, 4).unwrap();
    let sys = NumSystem::new(&spec, &[]).unwrap().with_manifold(&h, &[]).unwrap();
    let result = scan(&sys, &[0.02, 0.04, 0.08], 8, 1e-13).unwrap();
    let slope = loglog_slope(&result);
    assert!(
        (slope - 4.0).abs() <= 0.5,
        "log-log slope {slope}, expected 4 ± 0.5 (deviations: {:?})",
        result.points.iter().map(|p| p.deviation).collect::<Vec<_>>()
    );
    pass(9, "period-deviation scaling exponent is 4 ± 0.5 on the p'_1 = 0 locus", started);
}

#[test]
fn criterion_10_conjugation_property() {
    let started = Instant::now();
    let mut rng = rng_for(10);

    // Moon–Rand: evaluate the symbolic constants at random real points
    let spec = moon_rand_complex();
    let (_, p) = compute_f(&spec, 2).unwrap();
    let (_, q) = compute_g(&spec, 2).unwrap();
    for _ in 0..20 {
        let point = [
            nonzero_rational(&mut rng),
            small_rational(&mut rng),
            small_rational(&mut rng),
            small_rational(&mut rng),
        ];
        for (pm, qm) in p.iter().zip(&q) {
            let pv = pm.eval(&point).unwrap();
            let qv = qm.eval(&point).unwrap();
            assert_eq!(qv, -&pv.conj(), "Moon–Rand conjugation fails at {point:?}");
        }
    }

    // quadratic family: real assignments on the reality locus
    // a2 = b1, b2 = a1, c2 = c1, b3 = -a3, c3 = 0
    let quad = quad_complex();
    let empty = ParamSet::empty();
    for _ in 0..20 {
        let r = nonzero_rational(&mut rng);
        let a1 = small_rational(&mut rng);
        let b1 = small_rational(&mut rng);
        let c1 = small_rational(&mut rng);
        let a3 = small_rational(&mut rng);
        let values: Vec<Scalar> = [
            r,
            a1.clone(),
            b1.clone(),
            c1.clone(),
            b1,
            a1,
            c1,
            a3.clone(),
            -&a3,
            GaussianRational::zero(),
        ]
        .into_iter()
        .map(|v| Scalar::from_gauss(&empty, v))
        .collect();
        let numeric = quad.substitute_params(&empty, &values).unwrap();
        numeric.realify(1).expect("reality locus");
        let (_, p) = compute_f(&numeric, 2).unwrap();
        let (_, q) = compute_g(&numeric, 2).unwrap();
        for (pm, qm) in p.iter().zip(&q) {
            let pv = pm.eval(&[]).unwrap();
            let qv = qm.eval(&[]).unwrap();
            assert_eq!(qv, -&pv.conj(), "quad conjugation fails");
        }
    }
    pass(10, "q'_m = -conj(p'_m) at 20 random real evaluations, both fixtures", started);
}
