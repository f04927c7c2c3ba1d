use crate::error::{Error, Result};
use crate::noise::{apply_diffusion, NoisePair};
use crate::nonlinear::{dealias, AdvectionWorkspace};
use crate::spectral::{
    gradient_pairing, inner_product_unchecked, leray_project, norm_sq, resolvent, sobolev_norm_sq, OperatorTag,
    ScalarField, SpectralField, VectorField,
};

use super::config::Model;
use super::state::{SchemeState, TrajectoryStats};

/// Explicit right-hand-side pieces of one step.
#[derive(Debug, Clone)]
pub struct Forcing {
    /// `Pi(theta^{l-1} v2)`
    pub buoyancy: VectorField,
    /// `G(u^{l-1}) dW`
    pub noise_u: VectorField,
    /// `G~(theta^{l-1}) dW~`
    pub noise_theta: ScalarField,
}

/// Signed defects of the discrete energy identities, with the magnitude of
/// the terms they balance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyResidual {
    pub velocity: f64,
    pub temperature: f64,
    pub velocity_scale: f64,
    pub temperature_scale: f64,
}

impl EnergyResidual {
    /// `(|defect_u| / scale_u, |defect_theta| / scale_theta)`.
    pub fn relative(&self) -> (f64, f64) {
        (
            self.velocity.abs() / self.velocity_scale,
            self.temperature.abs() / self.temperature_scale,
        )
    }
}

/// Defect of
/// `1/2[|u^l|^2 - |u^{l-1}|^2 + |u^l - u^{l-1}|^2] + h nu |A^{1/2} u^l|^2
///   = h (Pi theta^{l-1} v2, u^l) + (G(u^{l-1}) dW, u^l)`
/// and of its temperature analogue.
pub fn energy_residual(
    prev: &SchemeState,
    next: &SchemeState,
    forcing: &Forcing,
    h: f64,
    nu: f64,
    kappa: f64,
) -> EnergyResidual {
    let (velocity, velocity_scale) = {
        let a = norm_sq(&next.u);
        let b = norm_sq(&prev.u);
        let c = norm_sq(&next.u.difference(&prev.u));
        let d = h * nu * sobolev_norm_sq(&next.u, 1.0);
        let e = h * inner_product_unchecked(&forcing.buoyancy, &next.u);
        let f = inner_product_unchecked(&forcing.noise_u, &next.u);
        (
            0.5 * (a - b + c) + d - e - f,
            1.0 + 0.5 * (a + b + c) + d + e.abs() + f.abs(),
        )
    };
    let (temperature, temperature_scale) = {
        let a = norm_sq(&next.theta);
        let b = norm_sq(&prev.theta);
        let c = norm_sq(&next.theta.difference(&prev.theta));
        let d = h * kappa * sobolev_norm_sq(&next.theta, 1.0);
        let f = inner_product_unchecked(&forcing.noise_theta, &next.theta);
        (0.5 * (a - b + c) + d - f, 1.0 + 0.5 * (a + b + c) + d + f.abs())
    };
    EnergyResidual {
        velocity,
        temperature,
        velocity_scale,
        temperature_scale,
    }
}

/// Fully implicit Euler stepper. Owns its FFT workspace, so one per worker.
#[derive(Debug)]
pub struct Solver {
    model: Model,
    ws: AdvectionWorkspace,
}

/// Output of [`Solver::run_trajectory`].
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub seed: u64,
    pub steps: usize,
    pub horizon: f64,
    /// States are recorded at `l = 0, stride, 2 stride, ...`.
    pub stride: usize,
    pub recorded: Vec<SchemeState>,
    pub final_state: SchemeState,
    pub stats: TrajectoryStats,
}

impl Trajectory {
    /// State at grid index `l` of this mesh, if recorded.
    pub fn state_at(&self, l: usize) -> Option<&SchemeState> {
        if !l.is_multiple_of(self.stride) {
            return None;
        }
        self.recorded.get(l / self.stride)
    }
}

impl Solver {
    pub fn new(model: Model) -> Self {
        let ws = AdvectionWorkspace::new(*model.grid());
        Self { model, ws }
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn workspace(&mut self) -> &mut AdvectionWorkspace {
        &mut self.ws
    }

    pub fn forcing(&self, prev: &SchemeState, dw: &[f64], dw_theta: &[f64]) -> Result<Forcing> {
        let grid = *self.model.grid();
        let mut lifted = VectorField::zeros(grid);
        lifted.components_mut()[1].copy_from_slice(prev.theta.coeffs());
        let vn = &self.model.velocity_noise;
        let tn = &self.model.temperature_noise;
        Ok(Forcing {
            buoyancy: leray_project(&lifted),
            noise_u: apply_diffusion(&vn.diffusion, &vn.basis, &prev.u, dw)?,
            noise_theta: apply_diffusion(&tn.diffusion, &tn.basis, &prev.theta, dw_theta)?,
        })
    }

    /// One step from `prev` with step size `h`, returning the new state and
    /// the explicit forcing it used.
    pub fn step_with_forcing(
        &mut self,
        prev: &SchemeState,
        h: f64,
        dw: &[f64],
        dw_theta: &[f64],
    ) -> Result<(SchemeState, Forcing)> {
        let forcing = self.forcing(prev, dw, dw_theta)?;
        let step = prev.step + 1;
        let (u, iu) = self.solve_velocity(prev, &forcing, h, step)?;
        let (theta, it) = self.solve_temperature(prev, &forcing, h, step)?;
        Ok((
            SchemeState {
                step,
                u,
                theta,
                picard_iters: (iu, it),
            },
            forcing,
        ))
    }

    pub fn step(&mut self, prev: &SchemeState, h: f64, dw: &[f64], dw_theta: &[f64]) -> Result<SchemeState> {
        Ok(self.step_with_forcing(prev, h, dw, dw_theta)?.0)
    }

    /// Picard iteration `u <- (I + h nu A)^{-1}[rhs - h B(u, u)]` from `u^{l-1}`.
    fn solve_velocity(&mut self, prev: &SchemeState, f: &Forcing, h: f64, step: usize) -> Result<(VectorField, usize)> {
        let cfg = &self.model.scheme;
        let mut rhs = prev.u.clone();
        rhs.add_scaled(h, &f.buoyancy);
        rhs.add_scaled(1.0, &f.noise_u);
        let rhs = dealias(&rhs);
        let lambda = h * cfg.nu;
        if cfg.linear {
            return Ok((resolvent(&rhs, lambda, OperatorTag::Stokes)?, 1));
        }
        let (tol, max_iter) = (cfg.picard_tol, cfg.picard_max_iter);
        let mut current = prev.u.clone();
        let mut trace = Vec::new();
        for iter in 1..=max_iter {
            let b = self.ws.advect_vector(&current, &current)?;
            let mut r = rhs.clone();
            r.add_scaled(-h, &b);
            let next = resolvent(&r, lambda, OperatorTag::Stokes)?;
            let update = norm_sq(&next.difference(&current)).sqrt();
            let size = norm_sq(&next).sqrt();
            trace.push(update / (1.0 + size));
            if !update.is_finite() {
                break;
            }
            current = next;
            if update <= tol * (1.0 + size) {
                return Ok((current, iter));
            }
        }
        Err(Error::PicardDiverged { step, trace })
    }

    /// Same iteration for `theta + h kappa Ã theta + h (u^{l-1}.grad) theta = rhs`;
    /// the advecting velocity is frozen at `u^{l-1}`.
    fn solve_temperature(
        &mut self,
        prev: &SchemeState,
        f: &Forcing,
        h: f64,
        step: usize,
    ) -> Result<(ScalarField, usize)> {
        let cfg = &self.model.scheme;
        let mut rhs = prev.theta.clone();
        rhs.add_scaled(1.0, &f.noise_theta);
        let rhs = dealias(&rhs);
        let lambda = h * cfg.kappa;
        if cfg.linear {
            return Ok((resolvent(&rhs, lambda, OperatorTag::Laplacian)?, 1));
        }
        let (tol, max_iter) = (cfg.picard_tol, cfg.picard_max_iter);
        self.ws.prepare_velocity(&prev.u)?;
        let mut current = prev.theta.clone();
        let mut trace = Vec::new();
        for iter in 1..=max_iter {
            let adv = self.ws.advect_prepared(&current)?;
            let mut r = rhs.clone();
            r.add_scaled(-h, &adv);
            let next = resolvent(&r, lambda, OperatorTag::Laplacian)?;
            let update = norm_sq(&next.difference(&current)).sqrt();
            let size = norm_sq(&next).sqrt();
            trace.push(update / (1.0 + size));
            if !update.is_finite() {
                break;
            }
            current = next;
            if update <= tol * (1.0 + size) {
                return Ok((current, iter));
            }
        }
        Err(Error::PicardDiverged { step, trace })
    }

    /// Residuals of both step equations at a candidate state, in the
    /// `L^2` norm: `u + h nu A u + h B(u,u) - rhs` and the temperature analogue.
    pub fn equation_residuals(
        &mut self,
        prev: &SchemeState,
        next: &SchemeState,
        f: &Forcing,
        h: f64,
    ) -> Result<(f64, f64)> {
        let cfg = self.model.scheme.clone();
        let mut ru = next.u.clone();
        ru.add_scaled(
            h * cfg.nu,
            &crate::spectral::apply_fractional_power(&next.u, OperatorTag::Stokes, 1.0)?,
        );
        if !cfg.linear {
            ru.add_scaled(h, &self.ws.advect_vector(&next.u, &next.u)?);
        }
        ru.add_scaled(-1.0, &prev.u);
        ru.add_scaled(-h, &f.buoyancy);
        ru.add_scaled(-1.0, &f.noise_u);
        let mut rt = next.theta.clone();
        rt.add_scaled(
            h * cfg.kappa,
            &crate::spectral::apply_fractional_power(&next.theta, OperatorTag::Laplacian, 1.0)?,
        );
        if !cfg.linear {
            rt.add_scaled(h, &self.ws.advect_scalar(&prev.u, &next.theta)?);
        }
        rt.add_scaled(-1.0, &prev.theta);
        rt.add_scaled(-1.0, &f.noise_theta);
        Ok((norm_sq(&dealias(&ru)).sqrt(), norm_sq(&dealias(&rt)).sqrt()))
    }

    /// Run `steps` steps driven by `noise` aggregated to this mesh.
    /// States are recorded every `record_stride` steps (`None`: only the
    /// initial and final state are kept).
    pub fn run_trajectory(
        &mut self,
        initial: SchemeState,
        noise: &NoisePair,
        steps: usize,
        record_stride: Option<usize>,
    ) -> Result<Trajectory> {
        self.run_observed(initial, noise, steps, record_stride, |_, _| {})
    }

    /// As [`run_trajectory`](Self::run_trajectory), calling `observe` with
    /// every state (including the initial one).
    pub fn run_observed(
        &mut self,
        initial: SchemeState,
        noise: &NoisePair,
        steps: usize,
        record_stride: Option<usize>,
        observe: impl FnMut(usize, &SchemeState),
    ) -> Result<Trajectory> {
        let stats = TrajectoryStats::default();
        self.resume_observed(initial, stats, noise, steps, record_stride, observe)
    }

    /// Continue from `state` (at index `state.step` of the mesh with
    /// `steps` intervals) with previously accumulated `stats`.
    pub fn resume_observed(
        &mut self,
        initial: SchemeState,
        stats: TrajectoryStats,
        noise: &NoisePair,
        steps: usize,
        record_stride: Option<usize>,
        observe: impl FnMut(usize, &SchemeState),
    ) -> Result<Trajectory> {
        self.advance(initial, stats, noise, steps, steps, record_stride, observe)
    }

    /// As [`resume_observed`](Self::resume_observed) but stops after step
    /// `until` (the returned final state then sits mid-trajectory).
    #[allow(clippy::too_many_arguments)]
    pub fn advance(
        &mut self,
        initial: SchemeState,
        mut stats: TrajectoryStats,
        noise: &NoisePair,
        steps: usize,
        until: usize,
        record_stride: Option<usize>,
        mut observe: impl FnMut(usize, &SchemeState),
    ) -> Result<Trajectory> {
        if until > steps || initial.step > until {
            return Err(Error::InvalidArgument(format!(
                "cannot advance from step {} to {until} on a mesh of {steps} steps",
                initial.step
            )));
        }
        if noise.velocity.steps() != noise.temperature.steps() {
            return Err(Error::InvalidArgument(
                "velocity and temperature paths differ in length".into(),
            ));
        }
        let dw = noise.velocity.aggregate_increments(steps)?;
        let dwt = noise.temperature.aggregate_increments(steps)?;
        let h = noise.horizon() / steps as f64;
        let stride = record_stride.unwrap_or(steps).max(1);
        let (nu, kappa) = (self.model.scheme.nu, self.model.scheme.kappa);

        let start = initial.step;
        if start == 0 {
            stats = TrajectoryStats::default();
            track_sup(&mut stats, &initial);
        }
        observe(start, &initial);
        let mut recorded = Vec::new();
        if start.is_multiple_of(stride) {
            recorded.push(initial.clone());
        }
        let mut state = initial;
        for l in start..until {
            let (next, forcing) = self.step_with_forcing(&state, h, dw.row(l), dwt.row(l))?;
            let audit = energy_residual(&state, &next, &forcing, h, nu, kappa);
            stats.energy_residuals.push(audit.relative());
            stats.picard_iters.push(next.picard_iters);
            stats.dissipation_u += h * gradient_pairing(&next.u, &next.u);
            stats.dissipation_theta += h * gradient_pairing(&next.theta, &next.theta);
            track_sup(&mut stats, &next);
            stats.steps = next.step;
            observe(next.step, &next);
            if next.step % stride == 0 {
                recorded.push(next.clone());
            }
            state = next;
        }
        Ok(Trajectory {
            seed: noise.seed(),
            steps,
            horizon: noise.horizon(),
            stride,
            recorded,
            final_state: state,
            stats,
        })
    }
}

fn track_sup(stats: &mut TrajectoryStats, s: &SchemeState) {
    stats.sup_v0_u = stats.sup_v0_u.max(norm_sq(&s.u));
    stats.sup_v1_u = stats.sup_v1_u.max(sobolev_norm_sq(&s.u, 1.0));
    stats.sup_h0_theta = stats.sup_h0_theta.max(norm_sq(&s.theta));
    stats.sup_h1_theta = stats.sup_h1_theta.max(sobolev_norm_sq(&s.theta, 1.0));
}
