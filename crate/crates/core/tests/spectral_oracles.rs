mod common;

use std::f64::consts::PI;

use boussinesq::spectral::*;
use common::*;
use proptest::prelude::*;

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn roundtrip_of_random_smooth_field() {
    let grid = TorusGrid::new(32, 5.0).unwrap();
    // smooth field: band-limited below Nyquist, sampled on the grid
    let f = rand_scalar(grid, 1);
    let samples = to_physical(&f).unwrap();
    let back = to_physical(&to_spectral(&samples, grid).unwrap()).unwrap();
    let scale = samples.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let err = samples
        .iter()
        .zip(&back)
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(err <= 1e-12 * scale, "round trip error {err}");
    assert!(to_spectral(&samples, grid).unwrap().hermitian_defect() == 0.0);
}

#[test]
fn vector_roundtrip() {
    let grid = TorusGrid::standard(16).unwrap();
    let u = rand_vector(grid, 4);
    let [a, b] = vector_to_physical(&u).unwrap();
    let back = vector_to_spectral(&a, &b, grid).unwrap();
    assert!(back.difference(&u).max_abs() < 1e-15);
}

#[test]
fn cosine_norm_matches_quadrature() {
    // ||cos(2 pi x / L)||^2 = int cos^2 = L^2 / 2, checked by a fine Riemann
    // sum (exact for trigonometric polynomials of low degree).
    for length in [2.0 * PI, 1.0, 7.5] {
        let grid = TorusGrid::new(16, length).unwrap();
        let f = cos_x(grid, 1.0);
        let m = 64;
        let dx = length / m as f64;
        let quad: f64 = (0..m)
            .map(|a| (2.0 * PI * a as f64 * dx / length).cos().powi(2))
            .sum::<f64>()
            * dx
            * length;
        assert!(rel_err(norm_sq(&f), quad) < 1e-13);
        assert!(rel_err(norm_sq(&f), length * length / 2.0) < 1e-14);
    }
}

#[test]
fn fractional_power_inverse_roundtrip() {
    let grid = TorusGrid::new(32, 3.0).unwrap();
    let u = rand_vector(grid, 2);
    let up = apply_fractional_power(&u, OperatorTag::Stokes, 1.0).unwrap();
    let back = apply_fractional_power(&up, OperatorTag::Stokes, -1.0).unwrap();
    assert!(back.difference(&u).max_abs() <= 1e-12 * u.max_abs());
}

#[test]
fn resolvent_then_forward_operator() {
    let grid = TorusGrid::standard(32).unwrap();
    let theta = rand_scalar(grid, 3);
    let lambda = 0.37;
    let r = resolvent(&theta, lambda, OperatorTag::Laplacian).unwrap();
    let mut forward = r.clone();
    forward.add_scaled(
        lambda,
        &apply_fractional_power(&r, OperatorTag::Laplacian, 1.0).unwrap(),
    );
    assert!(forward.difference(&theta).max_abs() <= 1e-12 * theta.max_abs());
}

#[test]
fn leray_output_is_divergence_free() {
    let grid = TorusGrid::standard(32).unwrap();
    let mut rng_field = rand_scalar(grid, 5);
    // a gradient plus a solenoidal part
    let phi = rand_scalar(grid, 6);
    let grad = vector(
        grid,
        ScalarField::from_coeffs(grid, derivative(phi.coeffs(), &grid, 0)).unwrap(),
        ScalarField::from_coeffs(grid, derivative(phi.coeffs(), &grid, 1)).unwrap(),
    );
    assert!(grad.divergence_defect() > 0.1);
    let p = leray_project(&grad);
    assert!(p.max_abs() < 1e-15 * grad.max_abs().max(1.0));
    rng_field.coeffs_mut()[0] = Complex64::new(0.0, 0.0);
    let mixed = vector(grid, rng_field, phi);
    assert!(leray_project(&mixed).divergence_defect() <= 1e-12);
}

fn field_strategy(seed_range: std::ops::Range<u64>) -> impl Strategy<Value = u64> {
    seed_range
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn leray_is_idempotent_and_self_adjoint(s1 in field_strategy(0..10_000), s2 in field_strategy(10_000..20_000)) {
        let grid = TorusGrid::new(16, 4.0).unwrap();
        // non-solenoidal inputs: two independent components
        let f = vector(grid, rand_scalar(grid, s1), rand_scalar(grid, s1 + 1));
        let g = vector(grid, rand_scalar(grid, s2), rand_scalar(grid, s2 + 1));
        let pf = leray_project(&f);
        let pg = leray_project(&g);
        prop_assert!(leray_project(&pf).difference(&pf).max_abs() <= 1e-15);
        let lhs = inner_product(&pf, &g).unwrap();
        let rhs = inner_product(&f, &pg).unwrap();
        let scale = norm_sq(&f).sqrt() * norm_sq(&g).sqrt();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale);
    }

    #[test]
    fn fractional_powers_compose(seed in 0u64..100_000, s1 in -1.5f64..1.5, s2 in -1.5f64..1.5) {
        let grid = TorusGrid::standard(16).unwrap();
        let f = rand_scalar(grid, seed);
        let a = apply_fractional_power(&apply_fractional_power(&f, OperatorTag::Laplacian, s1).unwrap(), OperatorTag::Laplacian, s2).unwrap();
        let b = apply_fractional_power(&f, OperatorTag::Laplacian, s1 + s2).unwrap();
        let scale = b.max_abs().max(a.max_abs());
        prop_assert!(a.difference(&b).max_abs() <= 1e-10 * scale);
    }

    #[test]
    fn parseval_matches_grid_quadrature(seed in 0u64..100_000, length in 0.5f64..10.0) {
        let grid = TorusGrid::new(16, length).unwrap();
        let f = rand_scalar(grid, seed);
        let samples = to_physical(&f).unwrap();
        let k = grid.modes() as f64;
        let quad: f64 = samples.iter().map(|x| x * x).sum::<f64>() * length * length / (k * k);
        prop_assert!(rel_err(sobolev_norm_sq(&f, 0.0), quad) <= 1e-10);
    }

    #[test]
    fn mode_scaling_of_sobolev_norms(n1 in -5i64..=5, n2 in -5i64..=5, s in 0.0f64..3.0) {
        prop_assume!(n1 != 0 || n2 != 0);
        let grid = TorusGrid::new(16, 3.0).unwrap();
        let mut f = ScalarField::zeros(grid);
        f.set_coeff(n1, n2, Complex64::new(0.3, 0.1));
        f.set_coeff(-n1, -n2, Complex64::new(0.3, -0.1));
        let k = (grid.wavenumber(n1).powi(2) + grid.wavenumber(n2).powi(2)).sqrt();
        prop_assert!(rel_err(sobolev_norm(&f, s), k.powf(s) * sobolev_norm(&f, 0.0)) < 1e-12);
    }
}
