mod common;

use common::*;
use mfglab::contraction::infinite_radius;
use mfglab::lab::*;
use mfglab::model::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn flag<'a>(s: &'a StudyResult, name: &str) -> &'a Flag {
    s.flag(name).unwrap_or_else(|| panic!("no flag {name}"))
}

fn values(s: &StudyResult, col: &str) -> Vec<f64> {
    s.column(col).unwrap().into_iter().map(|v| v.unwrap()).collect()
}

/// Every coupling constant is zero: constant costs and one `p0` row.
fn action_free(rng: &mut ChaCha8Rng) -> MfgInstance {
    let mut inst = decoupled(3, 2, rng);
    let row = random_prob(rng, 3);
    inst.p0 = vec![vec![row; 2]; 3];
    inst.c0 = vec![vec![0.3; 2]; 3];
    inst
}

#[test]
fn fig1_sweeps() {
    for p in [fig1a(), fig1b()] {
        let s = spectrum_sweep(&p, 5, 200, 5).unwrap();
        assert_eq!(s.columns, SPECTRUM_COLUMNS);
        assert_eq!(s.rows.len(), 40);
        for name in ["monotone", "gershgorin", "containment", "dual_agreement"] {
            assert!(flag(&s, name).pass, "{name}: {:?}", flag(&s, name));
        }
        assert!((s.diagnostics["horizon_independent_bound"].unwrap() - 1.0).abs() < 1e-12);
        let rho = values(&s, "rho_power");
        assert!(rho.last().unwrap() < &s.diagnostics["limit_bound"].unwrap());
    }
    let s = spectrum_sweep(&fig1a(), 5, 200, 5).unwrap();
    assert!((s.diagnostics["limit_bound"].unwrap() - 0.5934).abs() < 1e-3);
    assert!(spectrum_sweep(&fig1a(), 0, 10, 1).is_err());
    assert!(spectrum_sweep(&fig1a(), 10, 5, 1).is_err());
}

#[test]
fn zero_coupling_sweep_is_flat() {
    let s = spectrum_sweep(&zero_profile(), 1, 30, 1).unwrap();
    assert!(values(&s, "rho_power").iter().all(|&r| r == 0.0));
    assert!(s.column("rho_det").unwrap().iter().all(|v| v.is_none()));
    assert!(flag(&s, "dual_agreement").pass);
    assert_eq!(flag(&s, "dual_agreement").checked, 0);
}

#[test]
fn action_free_horizon_gaps_vanish() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let inst = action_free(&mut rng);
    let opts = HorizonStudyOptions::new(2, (5..=30).step_by(5).collect());
    let s = horizon_error_study(&inst, &opts).unwrap();
    assert!(values(&s, "gap").iter().all(|&g| g == 0.0));
    assert!(flag(&s, "final_gap").pass);
}

#[test]
fn horizon_study_on_a_generated_instance() {
    let inst = make_contractive_instance(4, 3, 7, Target::FiniteHorizon).unwrap();
    let mut opts = HorizonStudyOptions::new(1, (10..=60).step_by(5).collect());
    opts.t_ref = Some(90);
    let s = horizon_error_study(&inst, &opts).unwrap();
    assert!(flag(&s, "decay_slope").pass);
    assert!(flag(&s, "final_gap").pass);
    assert!(*values(&s, "gap").last().unwrap() <= 1e-6);
    assert!(values(&s, "rho_AT").iter().all(|&r| r < 1.0));

    // with shorter horizons there is enough signal above the floor to fit
    let mut opts = HorizonStudyOptions::new(1, (4..=60).step_by(2).collect());
    opts.t_ref = Some(90);
    let s = horizon_error_study(&inst, &opts).unwrap();
    assert!(s.diagnostics["fit_points"].unwrap() >= 2.0);
    assert!(s.diagnostics["log_gap_slope"].unwrap() < 0.0);
    assert!(flag(&s, "tail_monotone").pass);
}

#[test]
fn horizon_study_validation() {
    let inst = make_contractive_instance(4, 3, 1, Target::FiniteHorizon).unwrap();
    let mut opts = HorizonStudyOptions::new(10, vec![10, 20]);
    assert!(horizon_error_study(&inst, &opts).is_err());
    opts.t_probes = vec![1];
    opts.t_ref = Some(30);
    assert!(horizon_error_study(&inst, &opts).is_err());
    opts.t_list = vec![20, 10];
    opts.t_ref = None;
    assert!(horizon_error_study(&inst, &opts).is_err());
    assert_eq!(default_t_ref(60), 110);
}

#[test]
fn multi_probe_columns() {
    let inst = make_contractive_instance(4, 3, 1, Target::FiniteHorizon).unwrap();
    let mut opts = HorizonStudyOptions::new(1, (6..=20).step_by(2).collect());
    opts.t_probes = vec![1, 3];
    let s = horizon_error_study(&inst, &opts).unwrap();
    assert_eq!(s.columns, ["T", "rho_AT", "gap_t1", "envelope_t1", "gap_t3", "envelope_t3"]);
    assert!(s.flag("final_gap_t3").is_some());
    assert!(s.flag("cross_probe_envelope").is_some());
}

#[test]
fn envelope_formula() {
    let p = fig1b();
    let e = horizon_envelope(&p, 0.5, 2, 10, 0.25).unwrap();
    let phi = (p.hat_k / (0.5 * p.beta)).sqrt();
    let oracle = phi * phi / 2.0 * 21.0 * p.beta.powf(2.5);
    assert!((e - oracle).abs() <= 1e-12 * oracle);
    assert!(horizon_envelope(&p, 0.5, 0, 10, 0.25).is_none());
    assert!(!in_bound_scope(&fig1a(), 2));
}

#[test]
fn single_state_stationary_gaps_vanish() {
    let one = ProbVector::dirac(1, 0);
    let inst = MfgInstance::new(
        1,
        2,
        0.5,
        1.0,
        0.0,
        vec![vec![0.0, 0.4]],
        vec![vec![vec![0.1]; 2]],
        vec![vec![one.clone(); 2]],
        vec![vec![vec![one.clone()]; 2]],
        one,
    )
    .unwrap();
    let s = stationary_gap_study(&inst, 20, 1e-12).unwrap();
    assert!(values(&s, "gap_mu").iter().all(|&g| g == 0.0));
    assert!(flag(&s, "rate").pass);
}

#[test]
fn stationary_rate_holds() {
    for seed in [1, 3] {
        let inst = make_contractive_instance(4, 3, seed, Target::InfiniteHorizon).unwrap();
        let c = infinite_radius(&compute_lipschitz_profile(&inst).unwrap());
        let s = stationary_gap_study(&inst, 120, 1e-12).unwrap();
        assert_eq!(s.columns, STATIONARY_COLUMNS);
        assert_eq!(s.rows.len(), 121);
        for name in ["rate", "q_bound", "step_ratio", "tail_interior"] {
            assert!(flag(&s, name).pass, "seed {seed} {name}: {:?}", flag(&s, name));
        }
        assert!(s.diagnostics["max_step_ratio"].is_none_or(|r| r <= c));
    }
}

#[test]
fn stationary_study_rejects_noncontractive() {
    let inst = congestion(0.02);
    let err = stationary_gap_study(&inst, 40, 1e-10).unwrap_err();
    assert_eq!(err.exit_code(), 4);
    assert!(err.to_string().contains("infinite radius"));
}

fn perturbed_c0(inst: &MfgInstance, seed: u64, size: f64) -> MfgInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c0 = inst.c0.iter().map(|r| r.iter().map(|v| v + rng.gen_range(-size..size)).collect()).collect();
    inst.with_c0(c0).unwrap()
}

#[test]
fn identical_games_have_no_perturbation() {
    let inst = make_contractive_instance(4, 3, 1, Target::InfiniteHorizon).unwrap();
    let s = perturbation_study(&inst, &inst, 30, 1e-6).unwrap();
    assert_eq!(s.diagnostics["eps_fin"], Some(0.0));
    assert_eq!(s.diagnostics["eps_stat"], Some(0.0));
    assert!(flag(&s, "three_epsilon").pass);
}

#[test]
fn initial_measure_does_not_move_the_stationary_game() {
    let inst = make_contractive_instance(4, 3, 1, Target::InfiniteHorizon).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let b = inst.with_mu0(random_prob(&mut rng, 4)).unwrap();
    let s = perturbation_study(&inst, &b, 30, 1e-6).unwrap();
    // zero up to the fixed-point error of two solves stopped at solver_tol
    let c = infinite_radius(&compute_lipschitz_profile(&inst).unwrap());
    let solver_tol = s.parameters["solver_tol"];
    assert!(s.diagnostics["eps_stat"].unwrap() <= 2.0 * solver_tol / (1.0 - c));
    assert!(s.diagnostics["eps_fin"].unwrap() > 0.0);
}

#[test]
fn cost_perturbation_stays_within_three_epsilon() {
    let inst = make_contractive_instance(4, 3, 1, Target::InfiniteHorizon).unwrap();
    let b = perturbed_c0(&inst, 5, 1e-3);
    let s = perturbation_study(&inst, &b, 60, 1e-6).unwrap();
    assert!(flag(&s, "three_epsilon").pass, "{:?}", s.diagnostics);
    assert_eq!(s.columns, PERTURBATION_COLUMNS);
    let small = make_contractive_instance(3, 3, 1, Target::InfiniteHorizon).unwrap();
    assert!(perturbation_study(&inst, &small, 10, 1e-6).is_err());
}

#[test]
fn joint_tv_examples() {
    let mu = ProbVector::new(vec![0.5, 0.5]).unwrap();
    let pi = vec![ProbVector::dirac(2, 0), ProbVector::dirac(2, 1)];
    let pi2 = vec![ProbVector::dirac(2, 1), ProbVector::dirac(2, 1)];
    assert_eq!(joint_tv(&mu, &pi, &mu, &pi), 0.0);
    assert!((joint_tv(&mu, &pi, &mu, &pi2) - 0.5).abs() < 1e-15);
}

#[test]
fn results_are_deterministic_and_round_trip() {
    let inst = make_contractive_instance(4, 3, 1, Target::FiniteHorizon).unwrap();
    let opts = HorizonStudyOptions::new(1, (6..=20).step_by(2).collect());
    let a = horizon_error_study(&inst, &opts).unwrap();
    let b = horizon_error_study(&inst, &opts).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert!(a.to_csv().starts_with("T,rho_AT,gap,envelope\n6,"));
    let back = StudyResult::from_json(&a.to_json().unwrap()).unwrap();
    assert_eq!(back.to_csv(), a.to_csv());

    let dir = tempfile::tempdir().unwrap();
    a.write(dir.path(), "horizon").unwrap();
    let csv = std::fs::read_to_string(dir.path().join("horizon.csv")).unwrap();
    assert_eq!(csv, a.to_csv());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("horizon.json")).unwrap()).unwrap();
    assert_eq!(summary["kind"], "horizon-error");
}

#[test]
fn thread_count_does_not_change_results() {
    let a = spectrum_sweep(&fig1b(), 5, 60, 5).unwrap();
    let b = with_pool(|| spectrum_sweep(&fig1b(), 5, 60, 5)).unwrap().unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
}

#[test]
fn slope_fit() {
    assert!((ls_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap() - 2.0).abs() < 1e-12);
    assert!(ls_slope(&[1.0], &[1.0]).is_none());
}
