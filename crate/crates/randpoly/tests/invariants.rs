//! Cross-module invariant suites that are too heavy for unit tests:
//! product soundness at scale, contour counts against located roots, and
//! symmetric-function certificates.

use num_complex::Complex64;
use num_traits::Zero;
use randpoly::intpoly::{self, MonicIntPoly};
use randpoly::rng::TrialRng;
use randpoly::roots;

fn random_poly(rng: &mut TrialRng, degree: usize, height: i64) -> MonicIntPoly {
    let coeffs: Vec<i64> = (0..degree).map(|_| rng.int_in(-height, height)).collect();
    MonicIntPoly::from_i64(&coeffs).unwrap()
}

#[test]
fn products_never_reported_irreducible() {
    let mut rng = TrialRng::substream(0x50FD, 0);
    for trial in 0..10_000u64 {
        let dg = 1 + (trial % 4) as usize;
        let dh = 1 + rng.below(4) as usize;
        let g = random_poly(&mut rng, dg, 1000);
        let h = random_poly(&mut rng, dh, 1000);
        let f = g.mul(&h);
        let (irr, fac) = intpoly::is_irreducible_exact(&f)
            .unwrap_or_else(|e| panic!("precision failure on {f}: {e}"));
        assert!(!irr, "product {g} * {h} reported irreducible");
        assert_eq!(fac.product(), f, "witness does not reconstruct {f}");
    }
}

#[test]
fn contour_counts_match_located_roots() {
    let mut rng = TrialRng::substream(0xD15C0, 0);
    let mut done = 0u64;
    while done < 500 {
        let d = 2 + rng.below(9) as usize; // degree 2..10
        let f = random_poly(&mut rng, d, 100);
        if f.constant_coeff().is_zero() {
            continue;
        }
        let rs = roots::find_roots(&f, 1e-12).unwrap();
        let center = Complex64::new(
            rng.int_in(-8, 8) as f64 / 4.0,
            rng.int_in(-8, 8) as f64 / 4.0,
        );
        let radius = 0.5 + rng.below(40) as f64 / 10.0;
        // Disks through a root are rejected by contract; pick another.
        let counted = match roots::count_roots_in_disk_auto(&f, center, radius) {
            Ok(n) => n,
            Err(roots::RootsError::ContourTooClose) => continue,
            Err(e) => panic!("contour failure on {f}: {e}"),
        };
        let located = rs
            .roots()
            .iter()
            .filter(|r| (*r - center).norm() < radius)
            .count() as i64;
        assert_eq!(counted, located, "disk count mismatch on {f}");
        done += 1;
    }
}

#[test]
fn full_cauchy_disk_contains_all_roots() {
    let mut rng = TrialRng::substream(0xD15C1, 0);
    for _ in 0..100 {
        let d = 1 + rng.below(8) as usize;
        let f = random_poly(&mut rng, d, 50);
        let n = roots::count_roots_in_disk_auto(&f, Complex64::zero(), f.cauchy_bound()).unwrap();
        assert_eq!(n, d as i64);
    }
}

#[test]
fn symmetric_functions_certify_root_sets() {
    let mut rng = TrialRng::substream(0x5E55, 0);
    let mut worst_rel = 0.0f64;
    for _ in 0..500 {
        let d = 2 + rng.below(7) as usize;
        let f = random_poly(&mut rng, d, 100);
        let rs = roots::find_roots(&f, 1e-12).unwrap();
        let sum: Complex64 = rs.roots().iter().sum();
        let prod: Complex64 = rs.roots().iter().product();
        let tol = (10.0 * rs.residual_bound() * (1.0 + f.cauchy_bound().powi(d as i32)))
            .max(1e-9 * f.cauchy_bound());
        let coeffs = f.coeffs_f64();
        let want_sum = Complex64::new(-coeffs[d - 1], 0.0);
        let sign = if d.is_multiple_of(2) { 1.0 } else { -1.0 };
        let want_prod = Complex64::new(sign * coeffs[0], 0.0);
        let sum_err = (sum - want_sum).norm();
        let prod_err = (prod - want_prod).norm();
        assert!(
            sum_err <= tol,
            "sum of roots off by {sum_err} (tol {tol}) on {f}"
        );
        assert!(
            prod_err <= tol,
            "product of roots off by {prod_err} (tol {tol}) on {f}"
        );
        worst_rel = worst_rel.max(prod_err / tol.max(1e-300));
    }
    println!("[invariants] worst product-residual ratio vs certificate: {worst_rel:.3}");
}

#[test]
fn sparse_constant_scan_still_decays() {
    // a_0 = n^2 values, other coefficients uniform: the 1/H decay
    // persists under the sparse constant-coefficient support.
    use randpoly::harness::{self, BoundSpec, ScanConfig, ScanFamily};
    let cfg = ScanConfig {
        schema_version: 1,
        family: ScanFamily::PolyConstant {
            degree: 3,
            poly: "0,0,1".into(),
        },
        h_values: vec![50, 200, 800],
        trials: 20_000,
        seed: 0x5CA2,
        bound: BoundSpec::default(),
        workers: 4,
        divisor_budget: 100_000,
    };
    let scan = harness::rate_decay_scan(&cfg).unwrap();
    let rates: Vec<f64> = scan.rows.iter().map(|r| r.rate).collect();
    println!("[invariants] sparse-constant scan rates: {rates:?}");
    assert!(rates.windows(2).all(|w| w[1] < w[0]), "rates {rates:?}");
}

#[test]
fn quadratic_scan_rate_times_h_logged() {
    // d = 2: rate*H grows slowly with H (the log-divisor effect);
    // displayed, not asserted.
    use randpoly::harness::{self, BoundSpec, ScanConfig, ScanFamily};
    let cfg = ScanConfig {
        schema_version: 1,
        family: ScanFamily::Classical { degree: 2 },
        h_values: vec![50, 200, 800],
        trials: 20_000,
        seed: 0x5CA3,
        bound: BoundSpec::default(),
        workers: 4,
        divisor_budget: 100_000,
    };
    let scan = harness::rate_decay_scan(&cfg).unwrap();
    for row in &scan.rows {
        println!(
            "[invariants] d=2 classical H={}: rate*H = {:.3}",
            row.h, row.rate_times_h
        );
    }
}

#[test]
fn chain_model_experiment_end_to_end() {
    // Dependent coefficients: a_1 = a_0 * t_1 + 1, a_2 = a_1^2 + t_2. The
    // harness must sample, test, and derive the markov bound with the
    // composed degree L^d, all deterministically.
    use randpoly::coeffmodels::{CoeffModel, SetSpec};
    use randpoly::harness::{self, BoundSpec, ExperimentConfig};
    let model = CoeffModel::DependentChain {
        constant_poly: "0,1".into(),
        h: 300,
        steps: vec!["x1*x2 + 1".into(), "x2^2 + x3".into()],
        t_sets: vec![
            SetSpec::Interval { lo: -300, hi: 300 },
            SetSpec::Interval { lo: -300, hi: 300 },
        ],
    };
    assert_eq!(model.compile().unwrap().pushforward_degree(), 8); // 2^3
    let cfg = ExperimentConfig {
        schema_version: 1,
        model,
        trials: 5_000,
        seed: 0xC8A1,
        bound: BoundSpec::default(),
        workers: 4,
        divisor_budget: 100_000,
        output_path: None,
    };
    let a = harness::run_experiment(&cfg).unwrap();
    let b = harness::run_experiment(&cfg).unwrap();
    assert_eq!(a.canonical_json(), b.canonical_json());
    assert_eq!(
        a.reducible_count + a.irreducible_count + a.error_count,
        5_000
    );
    assert_eq!(a.error_count, 0);
    assert_eq!(a.bound.inputs.l, Some(8.0));
    // Dependent chains keep the reducibility rate low as well.
    println!(
        "[invariants] chain model rate {:.5} (bound allowance {:.4}, vacuous {})",
        a.empirical_reducible_rate, a.allowance, a.bound.vacuous
    );
    assert!(a.empirical_reducible_rate < 0.05);
}

#[test]
fn multi_index_strata_structure() {
    // d = 4, I = {3, 2}: gcd(4, 3, 2) = 1. Three strata (sizes 2, 1, 1 by
    // magnitude order) and no pinned subset product.
    use num_bigint::BigInt;
    use randpoly::criterion;
    let base: Vec<BigInt> = [3i64, 1, 0, 0].iter().map(|&c| BigInt::from(c)).collect();
    let ladder = vec![BigInt::from(1_000_000i64), BigInt::from(1_000_000_000i64)];
    let rep = criterion::strata_magnitudes(&base, &[3, 2], &ladder, 100, 1e-12).unwrap();
    assert!(rep.gcd_ok);
    assert!(rep.persistent.is_empty());
    for rung in &rep.rungs {
        let total: usize = rung.strata.iter().map(|s| s.count).sum();
        assert_eq!(total, 4);
        assert_eq!(rung.observed.len(), 4);
        // Strata magnitudes are reported in ascending order.
        let preds: Vec<f64> = rung.strata.iter().map(|s| s.predicted).collect();
        assert!(preds.windows(2).all(|w| w[0] <= w[1]));
    }
    println!(
        "[invariants] multi-index strata deviations (top rung): {:?}",
        rep.rungs
            .last()
            .unwrap()
            .strata
            .iter()
            .map(|s| s.max_rel_deviation)
            .collect::<Vec<_>>()
    );
}

#[test]
fn zero_constant_reducibility_is_structural() {
    // a_0 = 0 must short-circuit: the witness is the factor x even for
    // coefficients far beyond what the numeric path could certify.
    let huge: Vec<i64> = vec![0, i64::MAX / 4, 0, i64::MAX / 8, 1];
    let f = MonicIntPoly::from_i64(&huge).unwrap();
    let (irr, fac) = intpoly::is_irreducible_exact(&f).unwrap();
    assert!(!irr);
    assert_eq!(fac.factors[0].to_string(), "0"); // the factor x
    assert_eq!(fac.product(), f);
}
