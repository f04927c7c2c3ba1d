mod common;

use boussinesq::noise::*;
use boussinesq::spectral::*;
use common::*;
use nalgebra::DMatrix;

#[test]
fn increment_variance_matches_h_q() {
    let cov = CovarianceSpec::power_law(2.0, 6).unwrap();
    let (horizon, steps, draws) = (0.5, 4, 100_000usize);
    let h = horizon / steps as f64;
    let mut sums = vec![0.0; cov.count()];
    for seed in 0..(draws / steps) as u64 {
        let p = sample_path(&cov, steps, horizon, seed).unwrap();
        for l in 0..steps {
            for (j, s) in sums.iter_mut().enumerate() {
                *s += p.increment(l, j).powi(2);
            }
        }
    }
    for (j, s) in sums.iter().enumerate() {
        let want = h * cov.eigenvalue(j);
        let var = s / draws as f64;
        let se = want * (2.0 / draws as f64).sqrt();
        assert!((var - want).abs() <= 3.0 * se, "mode {j}: {var} vs {want} (se {se})");
    }
}

#[test]
fn shipped_presets_certify_at_ten_thousand_samples() {
    let grid = TorusGrid::standard(16).unwrap();
    let cov = CovarianceSpec::default();
    for kind in [FieldKind::Vector, FieldKind::Scalar] {
        let basis = ModeBasis::new(grid, kind, cov.count()).unwrap();
        for name in DiffusionSpec::PRESETS {
            let spec = DiffusionSpec::preset(name, 0.5, &basis).unwrap();
            let report = match kind {
                FieldKind::Vector => verify_growth_lipschitz::<VectorField>(&spec, &basis, 10_000, 1).unwrap(),
                FieldKind::Scalar => verify_growth_lipschitz::<ScalarField>(&spec, &basis, 10_000, 1).unwrap(),
            };
            assert!(report.passed(), "{name} on {} noise: {report:?}", kind.name());
        }
    }
}

/// `||G(u)||` computed as the largest singular value of the matrix whose
/// columns are the images `G(u) zeta_j`, with no use of the diagonal
/// structure.
fn operator_norm_by_svd<F: SpectralField>(spec: &DiffusionSpec, basis: &ModeBasis, u: &F, s: f64) -> f64 {
    let grid = *basis.grid();
    let j = basis.len();
    let mut columns = Vec::new();
    for m in 0..j {
        let mut e = vec![0.0; j];
        e[m] = 1.0;
        let img = apply_diffusion(spec, basis, u, &e).unwrap();
        let img = apply_fractional_power(&img, OperatorTag::Laplacian, 0.5 * s)
            .or_else(|_| apply_fractional_power(&img, OperatorTag::Stokes, 0.5 * s))
            .unwrap();
        let col: Vec<f64> = img
            .components()
            .iter()
            .flatten()
            .flat_map(|c| [c.re * grid.length(), c.im * grid.length()])
            .collect();
        columns.push(col);
    }
    let rows = columns[0].len();
    let m = DMatrix::from_fn(rows, j, |r, c| columns[c][r]);
    let sv = m.singular_values();
    sv.max().powi(2)
}

#[test]
fn diagonal_operator_norms_agree_with_svd() {
    let grid = TorusGrid::new(16, 4.0).unwrap();
    let cov = CovarianceSpec::power_law(2.0, 20).unwrap();
    let basis = ModeBasis::new(grid, FieldKind::Vector, cov.count()).unwrap();
    for name in DiffusionSpec::PRESETS {
        let spec = DiffusionSpec::preset(name, 0.8, &basis).unwrap();
        for seed in 0..5 {
            let u = rand_vector(grid, seed).scaled(0.3 + seed as f64);
            let l2 = spec.operator_norm_sq(&basis, &u, NormLevel::L2).unwrap();
            let h1 = spec.operator_norm_sq(&basis, &u, NormLevel::H1).unwrap();
            let l2_svd = operator_norm_by_svd(&spec, &basis, &u, 0.0);
            let h1_svd = operator_norm_by_svd(&spec, &basis, &u, 1.0);
            assert!(
                (l2 - l2_svd).abs() <= 1e-10 * l2_svd.max(1e-300),
                "{name}: {l2} vs {l2_svd}"
            );
            assert!(
                (h1 - h1_svd).abs() <= 1e-10 * h1_svd.max(1e-300),
                "{name}: {h1} vs {h1_svd}"
            );
        }
    }
}

#[test]
fn velocity_noise_is_divergence_free() {
    let grid = TorusGrid::standard(32).unwrap();
    let cov = CovarianceSpec::default();
    let basis = ModeBasis::new(grid, FieldKind::Vector, cov.count()).unwrap();
    let spec = DiffusionSpec::preset("mode_projection", 1.0, &basis).unwrap();
    let p = sample_path(&cov, 1, 1.0, 4).unwrap();
    let g = apply_diffusion(&spec, &basis, &rand_vector(grid, 3), p.increments()).unwrap();
    assert!(g.divergence_defect() < 1e-12);
    assert!(g.max_abs() > 0.0);
}

#[test]
fn coarse_meshes_are_functions_of_the_finest_path() {
    let cov = CovarianceSpec::default();
    let p = sample_path(&cov, 1024, 1.0, 17).unwrap();
    let q = sample_path(&cov, 1024, 1.0, 17).unwrap();
    for n in [1, 4, 16, 64, 256, 1024] {
        assert_eq!(p.aggregate_increments(n).unwrap(), q.aggregate_increments(n).unwrap());
    }
    let c32 = p.aggregate_increments(32).unwrap();
    let c16 = p.aggregate_increments(16).unwrap();
    for l in 0..16 {
        for j in 0..cov.count() {
            assert_eq!(c16.row(l)[j], c32.row(2 * l)[j] + c32.row(2 * l + 1)[j]);
        }
    }
    assert!(p.aggregate_increments(48).is_err());
}
