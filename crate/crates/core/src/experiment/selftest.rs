//! Identity suite: algebraic identities of the discrete operators,
//! coefficient certification and per-step energy balances.

use std::time::Instant;

use serde::Serialize;

use crate::noise::{seeded_rng, verify_growth_lipschitz, CovarianceSpec, DiffusionSpec, ModeBasis, NoisePair};
use crate::nonlinear::AdvectionWorkspace;
use crate::random::{random_field, RandomFieldSpec};
use crate::scheme::{Model, NoiseModel, SchemeConfig, SchemeState, Solver};
use crate::spectral::{
    apply_fractional_power, inner_product, leray_project, norm_sq, resolvent, sobolev_norm, Complex64, FieldKind,
    OperatorTag, ScalarField, SpectralField, TorusGrid, VectorField,
};
use crate::Result;

#[derive(Debug, Clone, Serialize)]
pub struct SelfCheck {
    pub name: &'static str,
    /// Worst observed value (relative defect, or empirical/declared ratio).
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub grid: usize,
    pub samples: usize,
    pub checks: Vec<SelfCheck>,
    pub elapsed_seconds: f64,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &'static str, value: f64, tolerance: f64) -> SelfCheck {
    SelfCheck {
        name,
        value,
        tolerance,
        passed: value <= tolerance,
    }
}

fn field<F: SpectralField>(grid: TorusGrid, seed: u64) -> F {
    random_field(grid, &RandomFieldSpec::band_limited(&grid), &mut seeded_rng(seed, 5))
}

/// `(u.grad) v` by direct double sum over the retained modes.
pub fn direct_convective(u: &VectorField, v: &VectorField) -> VectorField {
    let grid = *u.grid();
    let c = grid.cutoff() as i64;
    let mut out = VectorField::zeros(grid);
    for comp in 0..2 {
        for k1 in -c..=c {
            for k2 in -c..=c {
                let mut acc = Complex64::new(0.0, 0.0);
                for p1 in -c..=c {
                    for p2 in -c..=c {
                        let (q1, q2) = (k1 - p1, k2 - p2);
                        if q1.abs() > c || q2.abs() > c {
                            continue;
                        }
                        let dv = v.coeff(comp, q1, q2);
                        let grad = u.coeff(0, p1, p2) * grid.wavenumber(q1) + u.coeff(1, p1, p2) * grid.wavenumber(q2);
                        acc += grad * dv * Complex64::new(0.0, 1.0);
                    }
                }
                out.set_coeff(comp, k1, k2, acc);
            }
        }
    }
    out
}

/// Runs the suite on a `modes x modes` grid with `samples` random fields.
pub fn run_selftest(modes: usize, samples: usize) -> Result<SelftestReport> {
    let start = Instant::now();
    let grid = TorusGrid::standard(modes)?;
    let mut ws = AdvectionWorkspace::new(grid);
    let (mut div, mut buvv, mut buau, mut scalar, mut semigroup, mut resolv) =
        (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for i in 0..samples as u64 {
        let raw = VectorField::from_components(grid, field(grid, 10 * i), field(grid, 10 * i + 1))?;
        div = div.max(leray_project(&raw).divergence_defect());

        let u: VectorField = field(grid, 10 * i + 2);
        let v: VectorField = field(grid, 10 * i + 3);
        let theta: ScalarField = field(grid, 10 * i + 4);
        let (u1, v1) = (sobolev_norm(&u, 1.0), sobolev_norm(&v, 1.0));
        buvv = buvv.max(ws.trilinear_b(&u, &v, &v)?.abs() / (u1 * v1 * v1));
        let au = apply_fractional_power(&u, OperatorTag::Stokes, 1.0)?;
        buau = buau.max(inner_product(&ws.advect_vector(&u, &u)?, &au)?.abs() / sobolev_norm(&u, 2.0).powi(3));
        let t1 = sobolev_norm(&theta, 1.0);
        scalar = scalar.max(ws.pairing_scalar(&u, &theta, &theta)?.abs() / (u1 * t1 * t1));

        let (s1, s2) = (0.3 + 0.01 * i as f64, -0.8);
        let lhs = apply_fractional_power(
            &apply_fractional_power(&u, OperatorTag::Stokes, s1)?,
            OperatorTag::Stokes,
            s2,
        )?;
        let rhs = apply_fractional_power(&u, OperatorTag::Stokes, s1 + s2)?;
        semigroup = semigroup.max((norm_sq(&lhs.difference(&rhs)) / norm_sq(&rhs)).sqrt());

        let lambda = 0.05 * (1 + i) as f64;
        let r = resolvent(&theta, lambda, OperatorTag::Laplacian)?;
        let mut back = r.clone();
        back.add_scaled(lambda, &apply_fractional_power(&r, OperatorTag::Laplacian, 1.0)?);
        resolv = resolv.max((norm_sq(&back.difference(&theta)) / norm_sq(&theta)).sqrt());
    }

    let small = TorusGrid::standard(8)?;
    let mut small_ws = AdvectionWorkspace::new(small);
    let mut brute = 0.0_f64;
    for i in 0..8u64 {
        let u: VectorField = field(small, 1000 + i);
        let v = VectorField::from_components(small, field(small, 2000 + i), field(small, 3000 + i))?;
        brute = brute.max(
            small_ws
                .convective(&u, &v)?
                .difference(&direct_convective(&u, &v))
                .max_abs(),
        );
    }

    let cert_grid = TorusGrid::standard(16)?;
    let cov = CovarianceSpec::default();
    let mut cert = 0.0_f64;
    let mut cert_passed = true;
    for kind in [FieldKind::Vector, FieldKind::Scalar] {
        let basis = ModeBasis::new(cert_grid, kind, cov.count())?;
        for name in DiffusionSpec::PRESETS {
            let spec = DiffusionSpec::preset(name, 0.5, &basis)?;
            let report = match kind {
                FieldKind::Vector => verify_growth_lipschitz::<VectorField>(&spec, &basis, 1000, 1)?,
                FieldKind::Scalar => verify_growth_lipschitz::<ScalarField>(&spec, &basis, 1000, 1)?,
            };
            cert_passed &= report.passed();
            for c in &report.checks {
                if c.declared > 0.0 {
                    cert = cert.max(c.empirical / c.declared);
                } else if c.empirical > 0.0 {
                    cert = f64::INFINITY;
                }
            }
        }
    }

    let steps = 16;
    let model = {
        let noise = |kind| -> Result<NoiseModel> {
            let basis = ModeBasis::new(grid, kind, cov.count())?;
            NoiseModel::new(
                grid,
                kind,
                cov.clone(),
                DiffusionSpec::preset("mode_projection", 0.5, &basis)?,
            )
        };
        Model::new(
            SchemeConfig::new(grid, 0.2, 0.2, 0.5, steps)?,
            noise(FieldKind::Vector)?,
            noise(FieldKind::Scalar)?,
        )?
    };
    let tol = model.scheme.picard_tol;
    let noise = NoisePair::sample(&cov, &cov, steps, 0.5, 1)?;
    let init = SchemeState::new(field(grid, 9001), field(grid, 9002));
    let t = Solver::new(model).run_trajectory(init, &noise, steps, None)?;
    let (ru, rt) = t.stats.max_energy_residual();

    let mut checks = vec![
        check("divergence after Leray projection", div, 1e-12),
        check("b(u,v,v)", buvv, 1e-10),
        check("<B(u,u),Au>", buau, 1e-10),
        check("<(u.grad)theta,theta>", scalar, 1e-10),
        check("fractional power semigroup", semigroup, 1e-10),
        check("resolvent round trip", resolv, 1e-10),
        check("pseudospectral vs direct convolution (8x8)", brute, 1e-12),
        check("velocity energy identity / tol", ru / tol, 10.0),
        check("temperature energy identity / tol", rt / tol, 10.0),
    ];
    let mut c = check("diffusion presets empirical/declared", cert, 1.0 + 1e-12);
    c.passed &= cert_passed;
    checks.push(c);
    Ok(SelftestReport {
        grid: modes,
        samples,
        checks,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}
