mod common;

use boussinesq::analysis::*;
use boussinesq::noise::*;
use boussinesq::scheme::*;
use boussinesq::spectral::*;
use boussinesq::Error;
use common::*;

fn synthetic(steps: usize, seed: u64, max_sq_error: f64, grad: f64) -> ErrorReport {
    ErrorReport {
        seed,
        steps,
        horizon: 1.0,
        err_u_sq: vec![0.0; steps + 1],
        err_theta_sq: vec![0.0; steps + 1],
        grad_err_sq: vec![0.0; steps + 1],
        max_sq_error,
        gradient_error_sum: grad,
        localized: true,
        threshold: f64::INFINITY,
    }
}

#[test]
fn exact_power_law_recovers_its_exponent() {
    let mut reports = Vec::new();
    for n in [16, 32, 64, 128, 256] {
        for s in 0..3 {
            reports.push(synthetic(n, s, 3.7 / n as f64, 0.0));
        }
    }
    let rate = estimate_strong_rate(&reports, true).unwrap();
    assert!((rate.fit.slope - 1.0).abs() < 1e-12);
    assert!((rate.fit.r_squared - 1.0).abs() < 1e-12);
    assert!((rate.fit.intercept - 3.7f64.ln()).abs() < 1e-12);

    let flat: Vec<_> = [16, 32, 64].iter().map(|&n| synthetic(n, 0, 0.25, 0.0)).collect();
    assert_eq!(estimate_strong_rate(&flat, true).unwrap().fit.slope, 0.0);
}

#[test]
fn strong_rate_rejects_levels_without_localized_samples() {
    let mut reports: Vec<_> = [16, 32, 64]
        .iter()
        .map(|&n| synthetic(n, 0, 1.0 / n as f64, 0.0))
        .collect();
    reports[1].localized = false;
    assert!(matches!(estimate_strong_rate(&reports, true), Err(Error::Analysis(_))));
    assert!(estimate_strong_rate(&reports, false).is_ok());
}

#[test]
fn probability_extremes() {
    let zeros: Vec<_> = [32, 64, 128].iter().map(|&n| synthetic(n, 0, 0.0, 0.0)).collect();
    assert!(estimate_probability_rate(&zeros, 0.8)
        .unwrap()
        .iter()
        .all(|p| p.p_hat == 0.0));
    let ones: Vec<_> = [32, 64, 128].iter().map(|&n| synthetic(n, 0, 1.0, 0.0)).collect();
    assert!(estimate_probability_rate(&ones, 0.8)
        .unwrap()
        .iter()
        .all(|p| p.p_hat == 1.0));
    assert!(estimate_probability_rate(&ones, 1.0).is_err());
}

fn linear_model(grid: TorusGrid, steps: usize) -> Model {
    let mut m = model(grid, 0.4, 0.25, 1.0, steps, "additive", 0.0);
    m.scheme.linear = true;
    m
}

fn zero_noise(steps: usize) -> NoisePair {
    let cov = CovarianceSpec::default();
    let z = |s| WienerPath::from_parts(5, s, 1.0, cov.eigenvalues(), vec![0.0; steps * cov.count()]).unwrap();
    NoisePair {
        velocity: z(stream::VELOCITY),
        temperature: z(stream::TEMPERATURE),
    }
}

#[test]
fn two_mesh_heat_errors_match_closed_form() {
    let grid = TorusGrid::standard(16).unwrap();
    let (n_ref, n) = (64, 8);
    let noise = zero_noise(n_ref);
    // u0 = (0, a cos(2x)), theta0 = b sin(y): both eigenfunctions, and the
    // buoyancy (0, theta) is a gradient, so the equations decouple
    let (a, b) = (0.9, 1.3);
    let u0 = vector(grid, ScalarField::zeros(grid), {
        let mut f = ScalarField::zeros(grid);
        f.set_coeff(2, 0, Complex64::new(0.5 * a, 0.0));
        f.set_coeff(-2, 0, Complex64::new(0.5 * a, 0.0));
        f
    });
    let mut theta0 = ScalarField::zeros(grid);
    theta0.set_coeff(0, 1, Complex64::new(0.0, -0.5 * b));
    theta0.set_coeff(0, -1, Complex64::new(0.0, 0.5 * b));
    let init = SchemeState::new(u0, theta0);
    let reference = Solver::new(linear_model(grid, n_ref))
        .run_trajectory(init.clone(), &noise, n_ref, Some(1))
        .unwrap();
    let coarse = Solver::new(linear_model(grid, n))
        .run_trajectory(init, &noise, n, Some(1))
        .unwrap();
    let report = compute_errors(&coarse, &reference, LocalizationConfig::unbounded()).unwrap();

    let area = grid.length().powi(2);
    let (hc, hf) = (1.0 / n as f64, 1.0 / n_ref as f64);
    let r = (n_ref / n) as i32;
    let mut max = 0.0_f64;
    let mut grad = 0.0;
    for j in 0..=n {
        let ju = j as i32;
        // ||a cos(2x)||^2 = a^2 L^2 / 2, gradient weight |k|^2
        let du = (1.0 + hc * 0.4 * 4.0).powi(-ju) - (1.0 + hf * 0.4 * 4.0).powi(-ju * r);
        let dt = (1.0 + hc * 0.25).powi(-ju) - (1.0 + hf * 0.25).powi(-ju * r);
        let eu = a * a * area / 2.0 * du * du;
        let et = b * b * area / 2.0 * dt * dt;
        assert!((report.err_u_sq[j] - eu).abs() <= 1e-10 * eu.max(1e-3), "u at {j}");
        assert!(
            (report.err_theta_sq[j] - et).abs() <= 1e-10 * et.max(1e-3),
            "theta at {j}"
        );
        max = max.max(eu + et);
        if j > 0 {
            grad += hc * (4.0 * eu + et);
        }
    }
    assert!((report.max_sq_error - max).abs() <= 1e-10 * max);
    assert!((report.gradient_error_sum - grad).abs() <= 1e-10 * grad);
    assert_eq!(
        report.cumulative_gradient_sum().last().copied().unwrap(),
        report.gradient_error_sum
    );
}

fn noisy_pair(grid: TorusGrid, n_ref: usize, n: usize, seed: u64) -> (Trajectory, Trajectory) {
    let m = model(grid, 0.2, 0.2, 1.0, n_ref, "mode_projection", 0.5);
    let cov = m.velocity_noise.covariance.clone();
    let noise = NoisePair::sample(&cov, &cov, n_ref, 1.0, seed).unwrap();
    let init = SchemeState::new(rand_vector(grid, seed), rand_scalar(grid, seed + 1));
    let mut s = Solver::new(m);
    let reference = s.run_trajectory(init.clone(), &noise, n_ref, Some(n_ref / n)).unwrap();
    let coarse = s.run_trajectory(init, &noise, n, Some(1)).unwrap();
    (coarse, reference)
}

#[test]
fn self_coupling_gives_exact_zeros() {
    let grid = TorusGrid::standard(16).unwrap();
    let (_, reference) = noisy_pair(grid, 32, 32, 3);
    let r = compute_errors(&reference, &reference, LocalizationConfig::unbounded()).unwrap();
    assert!(r
        .err_u_sq
        .iter()
        .chain(&r.err_theta_sq)
        .chain(&r.grad_err_sq)
        .all(|&e| e == 0.0));
    assert_eq!(r.max_sq_error, 0.0);
    assert!(r.localized);
}

#[test]
fn localization_is_monotone_in_the_threshold() {
    let grid = TorusGrid::standard(16).unwrap();
    let (coarse, reference) = noisy_pair(grid, 32, 8, 4);
    let sup = reference.stats.sup_v1_u.max(reference.stats.sup_h1_theta);
    let mut last = true;
    for m in [f64::INFINITY, 10.0 * sup, sup, 0.999 * sup, 0.1 * sup] {
        let loc = if m.is_finite() {
            LocalizationConfig::new(m).unwrap()
        } else {
            LocalizationConfig::unbounded()
        };
        let r = compute_errors(&coarse, &reference, loc).unwrap();
        assert!(last || !r.localized);
        last = r.localized;
        if m >= sup {
            assert!(r.localized);
        }
    }
    assert!(!last);
    assert_eq!(coarse.recorded[0], reference.recorded[0]);
}

#[test]
fn mismatched_inputs_are_rejected() {
    let grid = TorusGrid::standard(16).unwrap();
    let (coarse, reference) = noisy_pair(grid, 32, 8, 6);
    let (other, _) = noisy_pair(grid, 32, 8, 7);
    assert!(matches!(
        compute_errors(&other, &reference, LocalizationConfig::unbounded()),
        Err(Error::PathMismatch(7, 6))
    ));
    let mut bad = coarse.clone();
    bad.steps = 12;
    assert!(matches!(
        compute_errors(&bad, &reference, LocalizationConfig::unbounded()),
        Err(Error::MeshIncompatible { coarse: 12, fine: 32 })
    ));
}

fn scripted(grid: TorusGrid, steps: usize, amplitude: impl Fn(usize) -> f64) -> Trajectory {
    let recorded: Vec<SchemeState> = (0..=steps)
        .map(|l| {
            let mut s = SchemeState::new(
                vector(grid, ScalarField::zeros(grid), cos_x(grid, amplitude(l))),
                sin_x(grid, amplitude(l)),
            );
            s.step = l;
            s
        })
        .collect();
    Trajectory {
        seed: 0,
        steps,
        horizon: 1.0,
        stride: 1,
        final_state: recorded[steps].clone(),
        recorded,
        stats: TrajectoryStats::default(),
    }
}

#[test]
fn smooth_paths_have_increment_slope_two() {
    let grid = TorusGrid::standard(8).unwrap();
    let n = 512;
    let t = scripted(grid, n, |l| (-(l as f64) / n as f64).exp());
    let lags: Vec<usize> = (0..=5).map(|i| 1 << i).collect();
    let fit = estimate_increment_exponent(&[t], &lags).unwrap();
    assert!((fit.velocity.slope - 2.0).abs() < 0.02, "{}", fit.velocity.slope);
    assert!((fit.temperature.slope - 2.0).abs() < 0.02);
}

#[test]
fn brownian_surrogate_has_increment_slope_one() {
    let grid = TorusGrid::standard(8).unwrap();
    let n = 512;
    let ensemble: Vec<Trajectory> = (0..200)
        .map(|seed| {
            let cov = CovarianceSpec::finite(vec![1.0]).unwrap();
            let p = sample_path(&cov, n, 1.0, seed).unwrap();
            let mut b = vec![0.0];
            for l in 0..n {
                b.push(b[l] + p.increment(l, 0));
            }
            scripted(grid, n, |l| b[l])
        })
        .collect();
    let lags: Vec<usize> = (0..=5).map(|i| 1 << i).collect();
    let fit = estimate_increment_exponent(&ensemble, &lags).unwrap();
    assert!((fit.velocity.slope - 1.0).abs() < 0.05, "{}", fit.velocity.slope);
    assert!(estimate_increment_exponent(&ensemble, &[1, 2]).is_err());
    assert!(estimate_increment_exponent(&ensemble, &[1, 2, 256]).is_err());
}

#[test]
fn moments_of_a_single_path_are_its_functionals() {
    let stats = TrajectoryStats {
        sup_v0_u: 4.0,
        sup_h0_theta: 5.0,
        dissipation_u: 9.0,
        ..Default::default()
    };
    let rows = moment_table(&[(16, vec![stats.clone()])], &[2, 4]);
    let get = |order, f| rows.iter().find(|r| r.order == order && r.functional == f).unwrap();
    assert_eq!(get(2, Functional::SupV0Velocity).estimate, 4.0);
    assert_eq!(get(4, Functional::SupV0Velocity).estimate, 16.0);
    assert_eq!(get(2, Functional::SupEnergy).estimate, 9.0);
    assert_eq!(get(2, Functional::DissipationVelocity).estimate, 9.0);
    assert_eq!(get(2, Functional::SupV0Velocity).stderr, 0.0);
}

#[test]
fn zero_dynamics_moments_equal_initial_data() {
    let grid = TorusGrid::standard(16).unwrap();
    let mut m = model(grid, 1.0, 1.0, 1.0, 8, "additive", 0.0);
    m.scheme.nu = 1e-300;
    m.scheme.kappa = 1e-300;
    let mut solver = Solver::new(m);
    let init = SchemeState::new(VectorField::zeros(grid), rand_scalar(grid, 1));
    let t = solver.run_trajectory(init.clone(), &zero_noise(8), 8, None).unwrap();
    let rows = moment_table(&[(8, vec![t.stats])], &[2]);
    let sup = rows
        .iter()
        .find(|r| r.functional == Functional::SupH0Temperature)
        .unwrap();
    assert!((sup.estimate - norm_sq(&init.theta)).abs() <= 1e-12 * sup.estimate);
}

#[test]
fn log_rate_envelope_shape() {
    let e = log_rate_envelope(3, &[std::f64::consts::E]).unwrap();
    assert!((e[0] - 1.0).abs() < 1e-15);
    let ns = [16.0, 32.0, 64.0, 128.0];
    let v = log_rate_envelope(3, &ns).unwrap();
    assert!(v.windows(2).all(|w| w[1] < w[0]));
    let measured: Vec<f64> = v.iter().map(|x| 2.5 * x).collect();
    assert!((fit_log_rate_constant(3, &ns, &measured).unwrap() - 2.5).abs() < 1e-12);
}

#[test]
fn gagliardo_nirenberg_constant_is_not_exceeded() {
    let grid = TorusGrid::standard(16).unwrap();
    let est = estimate_gn_constant(grid, 1000, 1).unwrap();
    assert!(est.constant.is_finite() && est.constant > 0.0);
    let fresh = estimate_gn_constant(grid, 1000, 2).unwrap();
    assert!(fresh.constant <= est.constant, "{} > {}", fresh.constant, est.constant);
    let rc = RateConstants::new(0.9, 0.1, est.constant, 0.2, 0.2).unwrap();
    assert!(rc.coupling(2.0) > rc.coupling(1.0));
}
