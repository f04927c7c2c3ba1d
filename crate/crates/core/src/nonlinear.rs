//! Dealiased pseudospectral evaluation of the advection terms.
//!
//! Inputs are truncated to the 2/3-rule band, products are formed on a
//! padded grid of size `P > 3c`, and the result is truncated back. On that
//! grid the quadratic products are exact convolutions, so the skew
//! symmetry identities hold to round-off.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{inner_product, leray_project, zero, Fft2, ScalarField, SpectralField, TorusGrid, VectorField};

/// Per-worker scratch for the pseudospectral products. Not shareable.
#[derive(Debug)]
pub struct AdvectionWorkspace {
    grid: TorusGrid,
    pad: usize,
    fft: Fft2,
    velocity: Vec<Complex64>,
    grad_a: Vec<Complex64>,
    grad_b: Vec<Complex64>,
    product: Vec<Complex64>,
}

impl AdvectionWorkspace {
    pub fn new(grid: TorusGrid) -> Self {
        let pad = padded_size(grid.cutoff());
        let z = vec![zero(); pad * pad];
        Self {
            grid,
            pad,
            fft: Fft2::new(pad),
            velocity: z.clone(),
            grad_a: z.clone(),
            grad_b: z.clone(),
            product: z,
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    /// Side of the padded product grid.
    pub fn padded_size(&self) -> usize {
        self.pad
    }

    fn check(&self, g: &TorusGrid) -> Result<()> {
        if g == &self.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `(u.grad) v` without projection.
    pub fn convective(&mut self, u: &VectorField, v: &VectorField) -> Result<VectorField> {
        self.check(u.grid())?;
        self.check(v.grid())?;
        self.load_velocity(u);
        let [v1, v2] = v.components() else { unreachable!() };
        let (grid, pad) = (self.grid, self.pad);
        pack_gradient(&grid, pad, v1, &mut self.grad_a);
        pack_gradient(&grid, pad, v2, &mut self.grad_b);
        self.fft.inverse(&mut self.grad_a);
        self.fft.inverse(&mut self.grad_b);
        for i in 0..pad * pad {
            let (u1, u2) = (self.velocity[i].re, self.velocity[i].im);
            let a = self.grad_a[i];
            let b = self.grad_b[i];
            let w1 = u1 * a.re + u2 * a.im;
            let w2 = u1 * b.re + u2 * b.im;
            self.product[i] = Complex64::new(w1, w2);
        }
        self.fft.forward(&mut self.product);
        let mut out = VectorField::zeros(grid);
        {
            let [o1, o2] = out.components_mut() else { unreachable!() };
            unpack_pair(&grid, pad, &self.product, o1, o2);
        }
        Ok(out)
    }

    /// `B(u, v) = Pi[(u.grad) v]`.
    pub fn advect_vector(&mut self, u: &VectorField, v: &VectorField) -> Result<VectorField> {
        Ok(leray_project(&self.convective(u, v)?))
    }

    /// Cache the physical advecting velocity for repeated
    /// [`advect_prepared`](Self::advect_prepared) calls.
    pub fn prepare_velocity(&mut self, u: &VectorField) -> Result<()> {
        self.check(u.grid())?;
        self.load_velocity(u);
        Ok(())
    }

    /// `(u.grad) theta` with `u` from the last `prepare_velocity`.
    pub fn advect_prepared(&mut self, theta: &ScalarField) -> Result<ScalarField> {
        self.check(theta.grid())?;
        let (grid, pad) = (self.grid, self.pad);
        pack_gradient(&grid, pad, theta.coeffs(), &mut self.grad_a);
        self.fft.inverse(&mut self.grad_a);
        for i in 0..pad * pad {
            let v = self.velocity[i];
            let a = self.grad_a[i];
            self.product[i] = Complex64::new(v.re * a.re + v.im * a.im, 0.0);
        }
        self.fft.forward(&mut self.product);
        let mut out = ScalarField::zeros(grid);
        unpack_real(&grid, pad, &self.product, out.coeffs_mut());
        Ok(out)
    }

    /// `(u.grad) theta = sum_i u_i d_i theta`.
    pub fn advect_scalar(&mut self, u: &VectorField, theta: &ScalarField) -> Result<ScalarField> {
        self.prepare_velocity(u)?;
        self.advect_prepared(theta)
    }

    /// `b(u1, u2, u3) = ((u1.grad) u2, u3)`.
    pub fn trilinear_b(&mut self, u1: &VectorField, u2: &VectorField, u3: &VectorField) -> Result<f64> {
        let c = self.convective(u1, u2)?;
        inner_product(&c, u3)
    }

    /// `((u.grad) theta1, theta2)`.
    pub fn pairing_scalar(&mut self, u: &VectorField, t1: &ScalarField, t2: &ScalarField) -> Result<f64> {
        let a = self.advect_scalar(u, t1)?;
        inner_product(&a, t2)
    }

    /// `|u|^2` on a grid fine enough (`> 4c`) for the square to be exact,
    /// used for `L^4` norms. Returns `||u||_{L^4}`.
    pub fn lebesgue4_norm(&self, u: &VectorField) -> Result<f64> {
        self.check(u.grid())?;
        let c = self.grid.cutoff();
        let pad = (4 * c + 2) & !1;
        let mut fft = Fft2::new(pad);
        let mut vel = vec![zero(); pad * pad];
        let [a, b] = u.components() else { unreachable!() };
        scatter(
            &self.grid,
            pad,
            a,
            b,
            |_, _| (Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)),
            &mut vel,
        );
        fft.inverse(&mut vel);
        let mut sq: Vec<Complex64> = vel.iter().map(|z| Complex64::new(z.norm_sqr(), 0.0)).collect();
        fft.forward(&mut sq);
        // ||u||_4^4 = || |u|^2 ||_2^2 = L^2 sum |c|^2
        let area = self.grid.length() * self.grid.length();
        let fourth: f64 = area * sq.iter().map(|z| z.norm_sqr()).sum::<f64>();
        Ok(fourth.powf(0.25))
    }

    fn load_velocity(&mut self, u: &VectorField) {
        let [a, b] = u.components() else { unreachable!() };
        scatter(
            &self.grid,
            self.pad,
            a,
            b,
            |_, _| (Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)),
            &mut self.velocity,
        );
        self.fft.inverse(&mut self.velocity);
    }
}

/// Zero every coefficient outside the retained band `max(|n1|,|n2|) <= c`.
pub fn dealias<F: SpectralField>(f: &F) -> F {
    let grid = *f.grid();
    let k = grid.modes();
    let mut out = f.clone();
    for comp in out.components_mut() {
        for i1 in 0..k {
            let keep1 = grid.is_retained(i1);
            for i2 in 0..k {
                if !(keep1 && grid.is_retained(i2)) {
                    comp[i1 * k + i2] = zero();
                }
            }
        }
    }
    out
}

/// Whether every coefficient outside the retained band is zero.
pub fn is_band_limited<F: SpectralField>(f: &F) -> bool {
    let grid = *f.grid();
    let k = grid.modes();
    f.components().iter().all(|comp| {
        (0..grid.len()).all(|idx| (grid.is_retained(idx / k) && grid.is_retained(idx % k)) || comp[idx] == zero())
    })
}

fn padded_size(cutoff: usize) -> usize {
    ((3 * cutoff + 2) & !1).max(4)
}

/// Write `wa(k) a(k) + wb(k) b(k)` for retained modes into the padded buffer.
fn scatter(
    grid: &TorusGrid,
    pad: usize,
    a: &[Complex64],
    b: &[Complex64],
    weights: impl Fn(i64, i64) -> (Complex64, Complex64),
    dst: &mut [Complex64],
) {
    dst.iter_mut().for_each(|z| *z = zero());
    let c = grid.cutoff() as i64;
    let k = grid.modes();
    for n1 in -c..=c {
        let src_row = grid.slot_of(n1) * k;
        let dst_row = n1.rem_euclid(pad as i64) as usize * pad;
        for n2 in -c..=c {
            let s = src_row + grid.slot_of(n2);
            let d = dst_row + n2.rem_euclid(pad as i64) as usize;
            let (wa, wb) = weights(n1, n2);
            dst[d] = wa * a[s] + wb * b[s];
        }
    }
}

/// Pack `d1 f + i d2 f` so one inverse FFT yields both partial derivatives.
fn pack_gradient(grid: &TorusGrid, pad: usize, f: &[Complex64], dst: &mut [Complex64]) {
    scatter(
        grid,
        pad,
        f,
        f,
        |n1, n2| {
            let k1 = grid.wavenumber(n1);
            let k2 = grid.wavenumber(n2);
            // i k1 and i * (i k2)
            (Complex64::new(0.0, k1), Complex64::new(-k2, 0.0))
        },
        dst,
    );
}

/// Split the transform of `p + i q` (p, q real) into the retained
/// coefficients of `p` and `q`.
fn unpack_pair(grid: &TorusGrid, pad: usize, z: &[Complex64], p: &mut [Complex64], q: &mut [Complex64]) {
    let c = grid.cutoff() as i64;
    let k = grid.modes();
    let half_i = Complex64::new(0.0, -0.5);
    for n1 in -c..=c {
        for n2 in -c..=c {
            let here = z[n1.rem_euclid(pad as i64) as usize * pad + n2.rem_euclid(pad as i64) as usize];
            let there = z[(-n1).rem_euclid(pad as i64) as usize * pad + (-n2).rem_euclid(pad as i64) as usize].conj();
            let dst = grid.slot_of(n1) * k + grid.slot_of(n2);
            p[dst] = (here + there) * 0.5;
            q[dst] = (here - there) * half_i;
        }
    }
}

fn unpack_real(grid: &TorusGrid, pad: usize, z: &[Complex64], p: &mut [Complex64]) {
    let c = grid.cutoff() as i64;
    let k = grid.modes();
    for n1 in -c..=c {
        for n2 in -c..=c {
            let here = z[n1.rem_euclid(pad as i64) as usize * pad + n2.rem_euclid(pad as i64) as usize];
            let there = z[(-n1).rem_euclid(pad as i64) as usize * pad + (-n2).rem_euclid(pad as i64) as usize].conj();
            p[grid.slot_of(n1) * k + grid.slot_of(n2)] = (here + there) * 0.5;
        }
    }
}
