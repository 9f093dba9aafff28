mod common;

use common::*;
use mfglab::contraction::*;
use mfglab::model::LipschitzProfile;
use ndarray::{Array1, Array2};
use proptest::prelude::*;

fn quadratic_root(a: &Array2<f64>) -> f64 {
    let tr = a[[0, 0]] + a[[1, 1]];
    let det = a[[0, 0]] * a[[1, 1]] - a[[0, 1]] * a[[1, 0]];
    0.5 * (tr + (tr * tr - 4.0 * det).sqrt())
}

fn rho(m: &Array2<f64>) -> f64 {
    spectral_radius_power(m, POWER_TOL, POWER_MAX_ITER).unwrap().radius
}

#[test]
fn a_t_small_horizons() {
    let p = fig1a();
    let d = p.l1k1_over_rho();
    let a1 = build_a_t(&p, 1).unwrap();
    assert_eq!(a1.dim(), (1, 1));
    assert!((a1[[0, 0]] - d * p.beta).abs() < 1e-15);
    assert!((rho(&a1) - d * p.beta).abs() < 1e-12);

    let a2 = build_a_t(&p, 2).unwrap();
    let c = p.barl_k1_over_rho();
    let b = p.beta;
    let expect = [[c * b, d * b * b], [p.hat_k, d * b]];
    for i in 0..2 {
        for j in 0..2 {
            assert!((a2[[i, j]] - expect[i][j]).abs() < 1e-15);
        }
    }
    assert!((rho(&a2) - quadratic_root(&a2)).abs() < 1e-10);
    assert!((spectral_radius_detsearch(&p, 2, DET_TOL).unwrap() - quadratic_root(&a2)).abs() < 1e-10);
}

#[test]
fn b_t_examples() {
    let p = fig1a();
    let b1 = build_b_t(&p, 1).unwrap();
    assert_eq!(b1[[0, 1]], p.beta);
    assert!((b1[[1, 0]] - p.barl_k1_over_rho()).abs() < 1e-15);
    let expect = (p.beta * p.barl_k1_over_rho()).sqrt();
    assert!((rho(&b1) - expect).abs() < 1e-10);

    // without coupling B_T is strictly upper triangular
    let z = build_b_t(&zero_profile(), 7).unwrap();
    assert!(rho(&z) < 1e-10);
    let mut pw = z.clone();
    for _ in 0..7 {
        pw = pw.dot(&z);
    }
    assert!(pw.iter().all(|&v| v == 0.0));
}

#[test]
fn power_iteration_examples() {
    let m = Array2::from_shape_vec((2, 2), vec![2.0, 1.0, 1.0, 2.0]).unwrap();
    let r = spectral_radius_power(&m, 1e-13, 1000).unwrap();
    assert!((r.radius - 3.0).abs() < 1e-12);
    assert!(r.right.iter().all(|v| (v - 0.5).abs() < 1e-12));
    let r = spectral_radius_power(&Array2::zeros((4, 4)), 1e-13, 10).unwrap();
    assert_eq!(r.radius, 0.0);
    assert!(spectral_radius_power(&Array2::from_elem((2, 2), -1.0), 1e-13, 10).is_err());
    assert!(spectral_radius_power(&Array2::zeros((2, 3)), 1e-13, 10).is_err());
}

#[test]
fn detsearch_agrees_with_power_on_fig1a() {
    let p = fig1a();
    for t in (5..=50).step_by(5) {
        let a = rho(&build_a_t(&p, t).unwrap());
        let b = spectral_radius_detsearch(&p, t, DET_TOL).unwrap();
        assert!((a - b).abs() < 1e-8, "T = {t}: {a} vs {b}");
    }
    assert!(spectral_radius_detsearch(&zero_profile(), 5, DET_TOL).is_err());
}

#[test]
fn row_sum_bound_examples() {
    assert_eq!(gershgorin_bound(&zero_profile(), 10), 0.0);
    assert_eq!(horizon_independent_bound(&zero_profile()), 0.0);
    let hib = horizon_independent_bound(&separation_profile());
    assert!((hib - 1.199).abs() < 1e-3, "{hib}");
    assert!((horizon_independent_bound(&fig1a()) - 1.0).abs() < 1e-12);
    assert!((horizon_independent_bound(&fig1b()) - 1.0).abs() < 1e-12);
}

#[test]
fn asymptotic_examples() {
    let r = separation_profile();
    assert!((limit_bound_at(&r).sqrt() - 0.873).abs() < 1e-3);
    // independent form: (√(hatK·β) + √((hatK − barK)·β))² with hatK = barK + K1·barL/ρ
    let p = fig1a();
    let hat = 0.2 + 0.08;
    let oracle = ((hat * 0.9f64).sqrt() + (0.08 * 0.9f64).sqrt()).powi(2);
    assert!((limit_bound_at(&p) - oracle).abs() < 1e-12);
    assert!((limit_bound_at(&p) - 0.5934).abs() < 1e-3);
    for t in [10, 50, 200] {
        let b = asymptotic_bounds_at(&p, t);
        if let (Some(lo), Some(hi)) = (b.lower, b.upper) {
            assert!(lo <= hi && hi <= limit_bound_at(&p) + 1e-15);
        }
    }
    let b = asymptotic_bounds_at(&p, 1);
    assert!(b.lower.is_none());
}

#[test]
fn b_t_containment_on_fig1b() {
    let p = fig1b();
    for t in (20..=200).step_by(20) {
        let r = rho(&build_b_t(&p, t).unwrap());
        let b = bounds_bt(&p, t).unwrap();
        assert!(r <= b.upper + 1e-9, "T = {t}: {r} > {}", b.upper);
        if let Some(lo) = b.lower {
            assert!(lo <= r + 1e-9, "T = {t}: {lo} > {r}");
        }
    }
    let flat = LipschitzProfile::from_composite(1.0, 0.0, 0.1, 0.5, 0.8).unwrap();
    assert!((bounds_bt(&flat, 10).unwrap().upper - 0.4).abs() < 1e-15);
    assert!(bounds_bt(&separation_profile(), 10).is_ok());
    let loose = LipschitzProfile::from_composite(1.0, 0.1, 0.1, 1.2, 0.5).unwrap();
    assert!(bounds_bt(&loose, 10).is_err());
}

#[test]
fn perron_vectors_are_positive() {
    for p in [fig1a(), fig1b(), separation_profile()] {
        for t in [3, 20, 80] {
            let r = spectral_radius_power(&build_a_t(&p, t).unwrap(), POWER_TOL, POWER_MAX_ITER).unwrap();
            assert!(r.right.iter().all(|&v| v > 0.0), "T = {t}");
            assert!(r.left.iter().all(|&v| v > 0.0), "T = {t}");
            assert!(r.residual <= 1e-9 * r.radius.max(1.0), "T = {t}: residual {}", r.residual);
        }
    }
}

#[test]
fn perron_vector_solves_the_tridiagonal_problem() {
    for p in [fig1a(), fig1b()] {
        for t in [2, 5, 12, 30] {
            let r = spectral_radius_power(&build_a_t(&p, t).unwrap(), POWER_TOL, POWER_MAX_ITER).unwrap();
            let top = r.right.iter().cloned().fold(0.0, f64::max);
            let h = Array1::from(r.right.iter().map(|v| v / top).collect::<Vec<_>>());
            let tk = companion_tridiagonal(&p, t, r.radius).unwrap();
            let res = (tk.dot(&h) - &h * r.radius).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(res < 1e-8, "T = {t}: {res}");
            assert!(det_shifted(&p, t, r.radius).abs() < 1e-8);
        }
    }
}

#[test]
fn finite_without_infinite_contraction() {
    // barK = 1, hatK = 1.04, β = 0.1
    let p = LipschitzProfile::from_composite(1.0, 0.04, 0.01, 1.0, 0.1).unwrap();
    assert!((p.hat_k - 1.04).abs() < 1e-15);
    let q = check_prop_qwe(&p);
    let oracle = (1.04f64 * 0.1).sqrt() + (0.04f64 * 0.1).sqrt();
    assert!((q.rhs_value - oracle).abs() < 1e-15);
    assert!(q.rhs_holds && q.lhs_holds);
    assert!(check_assumption4(&p).is_some());
    assert!(!is_contractive_infinite(&p));
    assert!((infinite_radius(&p) - (1.0 + 0.04 / 0.9)).abs() < 1e-12);
    // direct evaluation of the finite-horizon condition: √0.1·(√1.04 + 0.2)
    let finite = 0.1f64.sqrt() * (1.04f64.sqrt() + 0.2);
    assert!((finite - 0.386).abs() < 1e-3);
    assert!((q.rhs_value - finite).abs() < 1e-12);
}

#[test]
fn assumption4_examples() {
    assert_eq!(check_assumption4(&zero_profile()), Some(1.0));
    assert_eq!(check_assumption4(&fig1a()), None);
    let eps = check_assumption4(&fig1b()).unwrap();
    let ratio = 0.65f64.sqrt() / (0.65f64.sqrt() + 0.35f64.sqrt());
    assert!((eps - (1.0 - ratio.ln() / 0.5f64.ln())).abs() < 1e-12);
    let slow = LipschitzProfile::from_composite(1.0, 0.3, 0.1, 0.1, 0.99).unwrap();
    assert_eq!(check_assumption4(&slow), None);
}

#[test]
fn report_checks_and_layout() {
    let rep = contraction_report(&fig1a(), &[5, 10, 20]).unwrap();
    assert_eq!(rep.rows.len(), 3);
    let csv = rep.to_csv();
    assert!(csv.starts_with("T,rho_power,rho_detsearch,gershgorin,asym_lower,asym_upper,rho_BT,bt_upper\n"));
    assert_eq!(csv.lines().count(), 4);
    assert!(contraction_report(&fig1a(), &[10, 5]).is_err());
    assert!(contraction_report(&fig1a(), &[]).is_err());
    let z = contraction_report(&zero_profile(), &[1, 4]).unwrap();
    assert!(z.rows.iter().all(|r| r.rho_power == 0.0 && r.rho_detsearch.is_none()));
}

/// Composite profiles with `L1 ≤ barL`, as for every profile derived from an
/// instance; the row-sum bound relies on it.
fn composite() -> impl Strategy<Value = LipschitzProfile> {
    (0.05f64..2.0, 0.0f64..0.5, 0.0f64..=1.0, 0.0f64..1.5, 0.0f64..0.999)
        .prop_map(|(k, l, f, bk, b)| LipschitzProfile::from_composite(k, l, f * k * l, bk, b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn radius_is_monotone_and_below_the_row_sum(p in composite()) {
        let mut prev = 0.0;
        for t in 1..=25 {
            let r = rho(&build_a_t(&p, t).unwrap());
            prop_assert!(r >= prev - 1e-10, "T = {}: {} < {}", t, r, prev);
            prop_assert!(r <= gershgorin_bound(&p, t) + 1e-9);
            prop_assert!(gershgorin_bound(&p, t) <= horizon_independent_bound(&p) + p.l1k1_over_rho() + 1e-12);
            prev = r;
        }
    }

    #[test]
    fn asymptotic_bounds_are_ordered(p in composite(), t in 1usize..400) {
        let b = asymptotic_bounds_at(&p, t);
        if let (Some(lo), Some(hi)) = (b.lower, b.upper) {
            prop_assert!(lo <= hi + 1e-15);
            prop_assert!(hi <= limit_bound_at(&p) + 1e-12);
        }
    }

    #[test]
    fn prop_qwe_sides_agree(p in composite()) {
        let q = check_prop_qwe(&p);
        // the two sides can disagree only by rounding at the boundary
        prop_assert!(q.equivalent || (q.lhs_value - 1.0).abs() < 1e-12);
    }
}
