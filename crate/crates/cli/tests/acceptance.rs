//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured numbers (visible under `--nocapture`).

use caplab_core::bodies::{self, BodyOracle, PProductSpec};
use caplab_core::ehz::{self, SolverOptions};
use caplab_core::exponent::PExponent;
use caplab_core::gh;
use caplab_core::seqcomb::{self, CapacitySequence};
use caplab_core::systolic::{self, BodyData};
use caplab_core::toric::ToricProfile;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

/// Exhaustive composition stream, written independently of the library
/// iterator: all v ∈ N^n with Σv = k.
fn brute_compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut v = vec![0usize; n];
    fn rec(v: &mut Vec<usize>, idx: usize, left: usize, out: &mut Vec<Vec<usize>>) {
        if idx + 1 == v.len() {
            v[idx] = left;
            out.push(v.clone());
            return;
        }
        for c in 0..=left {
            v[idx] = c;
            rec(v, idx + 1, left - c, out);
        }
    }
    rec(&mut v, 0, k, &mut out);
    out
}

#[test]
fn criterion_01_gh_convex_vs_brute_force() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut checked = 0usize;
    for instance in 0..50 {
        let n = 1 + instance % 3;
        let integer_weighted = instance % 2 == 0;
        let weights: Vec<f64> = (0..n)
            .map(|_| {
                if integer_weighted {
                    rng.gen_range(1..=5) as f64
                } else {
                    0.3 + 2.7 * rng.gen::<f64>()
                }
            })
            .collect();
        let as_box = instance % 4 >= 2;
        let profile = if as_box {
            ToricProfile::box_profile(&weights).unwrap()
        } else {
            ToricProfile::simplex(&weights).unwrap()
        };
        for k in 1..=12 {
            let computed = gh::capacity_convex(&profile, k).unwrap();
            // Independent oracle: plain enumeration with the closed-form
            // support written inline.
            let oracle = brute_compositions(n, k)
                .into_iter()
                .map(|v| {
                    if as_box {
                        v.iter().zip(&weights).map(|(vi, ai)| ai * *vi as f64).sum::<f64>()
                    } else {
                        v.iter()
                            .zip(&weights)
                            .map(|(vi, ai)| ai * *vi as f64)
                            .fold(0.0_f64, f64::max)
                    }
                })
                .fold(f64::INFINITY, f64::min);
            if integer_weighted {
                assert_eq!(computed, oracle, "instance {instance} k={k}");
            } else {
                assert!(
                    (computed - oracle).abs() <= 1e-9 * oracle.max(1.0),
                    "instance {instance} k={k}: {computed} vs {oracle}"
                );
            }
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "criterion 01 PASS: GH convex formula matched brute force on {checked} instances in {elapsed:?}"
    );
}

#[test]
fn criterion_02_gh_p_product_identity() {
    let start = Instant::now();
    let simplex_a = ToricProfile::simplex(&[1.0, 2.0]).unwrap();
    let simplex_b = ToricProfile::simplex(&[1.5, 1.0]).unwrap();
    let box_a = ToricProfile::box_profile(&[1.0, 1.5]).unwrap();
    let box_b = ToricProfile::box_profile(&[2.0]).unwrap();
    let convex_pairs = [
        (&simplex_a, &simplex_b),
        (&simplex_a, &box_b),
        (&box_a, &simplex_b),
        (&box_a, &box_b),
    ];
    let mut worst_convex: f64 = 0.0;
    for (left, right) in convex_pairs {
        for p in [
            PExponent::Finite(2.0),
            PExponent::Finite(2.5),
            PExponent::Finite(3.0),
            PExponent::Finite(4.0),
            PExponent::Infinity,
        ] {
            let report = gh::verify_p_product(left, right, p, 12, 1e-9).unwrap();
            assert!(report.all_passed(), "convex p={p}: {}", report.to_table());
            worst_convex = worst_convex.max(report.outcomes[0].computed);
        }
    }
    let concave_pairs = [
        (&simplex_a, &ToricProfile::simplex(&[1.5]).unwrap()),
        (&ToricProfile::simplex(&[1.0]).unwrap(), &simplex_b),
    ];
    let mut worst_concave: f64 = 0.0;
    for (left, right) in concave_pairs {
        for p in [
            PExponent::Finite(1.0),
            PExponent::Finite(1.25),
            PExponent::Finite(1.5),
            PExponent::Finite(2.0),
        ] {
            let report = gh::verify_p_product(left, right, p, 12, 1e-7).unwrap();
            assert!(report.all_passed(), "concave p={p}: {}", report.to_table());
            worst_concave = worst_concave.max(report.outcomes[0].computed);
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!(
        "criterion 02 PASS: product identity, max deviation convex {worst_convex:.2e} (tol 1e-9), \
         concave {worst_concave:.2e} (tol 1e-7), in {elapsed:?}"
    );
}

fn solve(body: &BodyOracle, seed: u64) -> f64 {
    let options = SolverOptions { samples: 1 << 9, restarts: 12, seed, ..SolverOptions::default() };
    ehz::clarke_dual_solve(body, &options).expect("solver converges").capacity
}

#[test]
fn criterion_03_clarke_solver_vs_closed_forms() {
    let start = Instant::now();
    let e11 = BodyOracle::ellipsoid(&[1.0, 1.0]).unwrap();
    let e22 = BodyOracle::ellipsoid(&[2.0, 2.0]).unwrap();
    let cases: Vec<(&str, BodyOracle, f64)> = vec![
        ("E(1,2)", BodyOracle::ellipsoid(&[1.0, 2.0]).unwrap(), 1.0),
        (
            "E(1,1) x_1.5 E(1,1)",
            PProductSpec::new(PExponent::Finite(1.5), vec![e11.clone(), e11.clone()])
                .unwrap()
                .to_body(),
            2.0_f64.powf(-1.0 / 3.0),
        ),
        (
            "E(1,1) x_3 E(2,2)",
            PProductSpec::new(PExponent::Finite(3.0), vec![e11, e22]).unwrap().to_body(),
            1.0,
        ),
    ];
    let mut summary = Vec::new();
    for (name, body, expected) in cases {
        // The closed-form branch values double as the oracle.
        let branch = body.kind().closed_form_ehz().unwrap();
        assert!((branch - expected).abs() < 1e-12);
        let estimate = solve(&body, 303);
        let deviation = (estimate - expected).abs() / expected;
        assert!(deviation < 0.02, "{name}: {estimate} vs {expected}");
        summary.push(format!("{name}: {estimate:.6} vs {expected:.6}"));
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}");
    println!("criterion 03 PASS: {} in {elapsed:?}", summary.join("; "));
}

#[test]
fn criterion_04_solver_calibration() {
    let mut summary = Vec::new();
    for area in [0.5, 1.0, 3.0] {
        let estimate = solve(&BodyOracle::ball(2, area).unwrap(), 404);
        assert!(
            (estimate - area).abs() / area < 0.01,
            "disc of area {area}: {estimate}"
        );
        summary.push(format!("disc {area}: {estimate:.6}"));
    }
    let estimate = solve(&BodyOracle::ball(4, 1.0).unwrap(), 405);
    assert!((estimate - 1.0).abs() < 0.01, "B^4[1]: {estimate}");
    summary.push(format!("B^4[1]: {estimate:.6}"));
    println!("criterion 04 PASS: {}", summary.join("; "));
}

#[test]
fn criterion_05_systolic_p_product_inequality() {
    let lefts = [
        BodyData::new(1.0, 0.5, 2).unwrap(),  // B^4[1]
        BodyData::new(1.0, 1.0, 2).unwrap(),  // E(1,2)
        BodyData::new(1.0, 2.0, 2).unwrap(),  // P(1,2)
    ];
    let p_grid = [
        PExponent::Finite(1.0),
        PExponent::Finite(1.5),
        PExponent::Finite(2.0),
        PExponent::Finite(2.5),
        PExponent::Finite(4.0),
        PExponent::Infinity,
    ];
    let mut configs = 0usize;
    for left in &lefts {
        for ratio in [1.0, 2.0] {
            let cap = left.capacity * ratio;
            for right in [
                BodyData::new(cap, cap, 1).unwrap(),
                BodyData::new(cap, cap.powi(3) / 6.0, 3).unwrap(),
            ] {
                for p in p_grid {
                    let cmp = systolic::p_product_systolic_check(left, &right, p).unwrap();
                    assert!(
                        cmp.relative_gap >= -1e-12,
                        "inequality violated at p={p}, ratio={ratio}: {cmp:?}"
                    );
                    let expect_equality = p == PExponent::Finite(2.0) && ratio == 1.0;
                    if expect_equality {
                        assert!(cmp.relative_gap.abs() <= 1e-12, "p=2 equal caps: {cmp:?}");
                    } else {
                        assert!(cmp.relative_gap > 1e-12, "should be strict at p={p}: {cmp:?}");
                    }
                    configs += 1;
                }
            }
        }
    }
    println!(
        "criterion 05 PASS: systolic inequality over {configs} configurations, equality exactly at p=2 with equal capacities"
    );
}

#[test]
fn criterion_06_free_sum_ratio() {
    let value = systolic::free_sum_ratio(2);
    let expected = (2.0 / 3.0) * 5.0_f64.powf(1.0 / 3.0);
    assert!((value - expected).abs() <= 1e-10);
    assert!(value > 1.0);
    let mut worst: f64 = 0.0;
    for n in 1..=6 {
        let rebuilt = systolic::free_sum_ratio_first_principles(n).unwrap();
        worst = worst.max((systolic::free_sum_ratio(n) - rebuilt).abs());
    }
    assert!(worst <= 1e-10, "first-principles deviation {worst}");
    println!(
        "criterion 06 PASS: free-sum ratio(2) = {value:.10} > 1, first-principles deviation {worst:.2e}"
    );
}

#[test]
fn criterion_07_g_function_audit() {
    let mut worst_half: f64 = 0.0;
    let mut worst_g1 = f64::NEG_INFINITY;
    let mut min_second = f64::INFINITY;
    for n in 1..=8 {
        for m in 1..=8 {
            worst_half = worst_half.max((systolic::g_function(0.5, n, m) - 1.0).abs());
            let g1 = systolic::g_function(1.0, n, m);
            assert!(g1 < 1.0, "g(1) at n={n}, m={m}: {g1}");
            worst_g1 = worst_g1.max(g1);
            let audit = systolic::g_logconvexity_audit(n, m, 501);
            assert!(audit.all_passed(), "n={n} m={m}: {}", audit.to_table());
            min_second = min_second.min(audit.outcomes[0].computed);
        }
    }
    assert!(worst_half <= 1e-12);
    println!(
        "criterion 07 PASS: |g(1/2)-1| <= {worst_half:.2e}, max g(1) = {worst_g1:.6} < 1, \
         min second difference {min_second:.2e} > 0"
    );
}

#[test]
fn criterion_08_c_infinity_limits() {
    let start = Instant::now();
    let e12 = ToricProfile::simplex(&[1.0, 2.0]).unwrap();
    let est_e = gh::c_infinity_estimate(|k| gh::capacity_convex(&e12, k), 2000).unwrap();
    assert!((est_e.estimate - 2.0 / 3.0).abs() < 1e-2, "{est_e:?}");
    let p12 = ToricProfile::box_profile(&[1.0, 2.0]).unwrap();
    let est_p = gh::c_infinity_estimate(|k| gh::capacity_convex(&p12, k), 2000).unwrap();
    assert!((est_p.estimate - 1.0).abs() < 1e-2, "{est_p:?}");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!(
        "criterion 08 PASS: c^k/k at k=2000: E(1,2) -> {:.6} (limit 2/3), P(1,2) -> {:.6} (limit 1), in {elapsed:?}",
        est_e.estimate, est_p.estimate
    );
}

#[test]
fn criterion_09_minmax_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    for instance in 0..1000 {
        let make = |rng: &mut ChaCha8Rng, label: &str| {
            let mut acc = 0.0;
            let values: Vec<f64> = (0..16)
                .map(|_| {
                    acc += rng.gen::<f64>() + 1e-3;
                    acc
                })
                .collect();
            CapacitySequence::new(label, values).unwrap()
        };
        let s1 = make(&mut rng, "a");
        let s2 = make(&mut rng, "b");
        let report = seqcomb::minmax_identity_audit(&s1, &s2, 10).unwrap();
        assert!(report.all_passed(), "instance {instance}: {}", report.to_table());
        assert_eq!(report.outcomes[0].computed, 0.0, "instance {instance} not exact");
    }
    println!("criterion 09 PASS: three-way min-max identity exact on 1000 random sequence pairs");
}

#[test]
fn criterion_10_lemma_calculus_grid() {
    let grid_points = 1_000_000usize;
    let mut worst: f64 = 0.0;
    for q in [1.0, 1.5, 2.0, 3.0, 6.0] {
        let powers: Vec<(f64, f64)> = (0..=grid_points)
            .map(|i| {
                let x = i as f64 / grid_points as f64;
                (x.powf(q / 2.0), (1.0 - x).powf(q / 2.0))
            })
            .collect();
        for a in [0.5, 1.0, 2.0] {
            for b in [0.5, 1.0, 2.0] {
                let formula = seqcomb::lemma_calculus_min(a, b, q).unwrap();
                let mut grid_min = f64::INFINITY;
                for (xa, xb) in &powers {
                    grid_min = grid_min.min(a * xa + b * xb);
                }
                let dev = (formula - grid_min).abs();
                assert!(dev <= 1e-6, "a={a} b={b} q={q}: formula {formula} vs grid {grid_min}");
                worst = worst.max(dev);
            }
        }
    }
    println!("criterion 10 PASS: closed form within {worst:.2e} of the 1e6-point grid search");
}

#[test]
fn criterion_11_ball_decomposition_audit() {
    let discs =
        CapacitySequence::new("disc", (1..=8).map(|k| k as f64).collect::<Vec<_>>()).unwrap();
    let p4 = seqcomb::ball_decomposition_audit(&discs, &discs, PExponent::Finite(4.0), 1, 1, 1.0)
        .unwrap();
    assert!(p4.consistent_with_theorem, "p=4 must flag an inconsistency");
    let at3 = p4.mismatches.iter().find(|mm| mm.k == 3).expect("k=3 must be flagged");
    assert!((at3.formula - 5.0_f64.sqrt()).abs() < 1e-12);
    assert!((at3.ball - 2.0).abs() < 1e-12);
    let p2 = seqcomb::ball_decomposition_audit(&discs, &discs, PExponent::Finite(2.0), 1, 1, 1.0)
        .unwrap();
    assert!(p2.mismatches.is_empty(), "p=2 disc x disc must be consistent for k <= 8");
    println!(
        "criterion 11 PASS: p=4 audit flags k=3 witness ({:.6} vs {}), p=2 consistent through k=8",
        at3.formula, at3.ball
    );
}

#[test]
fn criterion_12_volumes_exact_vs_monte_carlo() {
    // p=1 square free-sum is exactly 2.
    let seg = BodyOracle::box_body(&[1.0]).unwrap();
    let cross = PProductSpec::new(PExponent::Finite(1.0), vec![seg.clone(), seg]).unwrap();
    assert_eq!(cross.volume_exact().unwrap(), 2.0);
    // Ten seeded random product configurations, exact vs Monte Carlo.
    let mut rng = ChaCha8Rng::seed_from_u64(1212);
    let mut worst_sigma: f64 = 0.0;
    for instance in 0..10 {
        let factor = |rng: &mut ChaCha8Rng| -> BodyOracle {
            match rng.gen_range(0..3) {
                0 => BodyOracle::ball(2, 0.5 + 2.0 * rng.gen::<f64>()).unwrap(),
                1 => BodyOracle::ellipsoid(&[0.5 + rng.gen::<f64>(), 0.5 + rng.gen::<f64>()])
                    .unwrap(),
                _ => BodyOracle::box_body(&[0.5 + rng.gen::<f64>(), 0.5 + rng.gen::<f64>()])
                    .unwrap(),
            }
        };
        let p = match instance % 5 {
            0 => PExponent::Finite(1.0),
            1 => PExponent::Finite(1.5),
            2 => PExponent::Finite(2.0),
            3 => PExponent::Finite(3.0),
            _ => PExponent::Infinity,
        };
        let spec = PProductSpec::new(p, vec![factor(&mut rng), factor(&mut rng)]).unwrap();
        let exact = spec.volume_exact().unwrap();
        let estimate = bodies::volume_monte_carlo(&spec.to_body(), 1_000_000, 7000 + instance);
        let sigmas = (estimate.value - exact).abs() / estimate.std_error;
        assert!(
            sigmas <= 4.0,
            "instance {instance} (p={p}): exact {exact}, estimate {estimate:?} ({sigmas:.2} sigma)"
        );
        worst_sigma = worst_sigma.max(sigmas);
    }
    println!(
        "criterion 12 PASS: free sum of squares exactly 2; 10 product volumes within {worst_sigma:.2} sigma of Monte Carlo"
    );
}

#[test]
fn criterion_13_verify_is_byte_deterministic() {
    let run = || {
        let out = std::process::Command::new(env!("CARGO_BIN_EXE_caplab"))
            .args(["verify", "--seed", "42", "--format", "json"])
            .output()
            .expect("binary runs");
        assert_eq!(
            out.status.code(),
            Some(0),
            "verify failed: {}",
            String::from_utf8_lossy(&out.stdout)
        );
        out.stdout
    };
    let first = run();
    let second = run();
    assert_eq!(first, second, "verify --seed 42 must be byte-identical across runs");
    println!(
        "criterion 13 PASS: two runs of `verify --seed 42` produced byte-identical {}-byte JSON reports",
        first.len()
    );
}
