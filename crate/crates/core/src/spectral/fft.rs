use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Square 2D complex FFT on an `n x n` row-major buffer.
///
/// Owns its plans and scratch; one per worker.
pub struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2").field("n", &self.n).finish()
    }
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        Self {
            n,
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Physical samples to coefficients, normalized so that
    /// `f(x) = sum_k c(k) e^{i k.x}`.
    pub fn forward(&mut self, buf: &mut [Complex64]) {
        let plan = Arc::clone(&self.forward);
        self.transform(&*plan, buf);
        let norm = 1.0 / (self.n * self.n) as f64;
        for z in buf.iter_mut() {
            *z *= norm;
        }
    }

    /// Coefficients to physical samples (unnormalized inverse).
    pub fn inverse(&mut self, buf: &mut [Complex64]) {
        let plan = Arc::clone(&self.inverse);
        self.transform(&*plan, buf);
    }

    fn transform(&mut self, plan: &dyn Fft<f64>, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.n * self.n);
        plan.process_with_scratch(buf, &mut self.scratch);
        transpose_in_place(buf, self.n);
        plan.process_with_scratch(buf, &mut self.scratch);
        transpose_in_place(buf, self.n);
    }
}

fn transpose_in_place(buf: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}
