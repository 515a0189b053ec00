//! Fourier differentiation, the Helmholtz operator and its two inverses,
//! dealiasing, and off-grid trigonometric interpolation on the periodic box
//! [-L, L).

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::ModelError;

/// Six-point Gauss–Legendre rule on [0, 1].
const GL_NODES: [f64; 6] = [
    0.033_765_242_898_423_99,
    0.169_395_306_766_867_74,
    0.380_690_406_958_401_56,
    0.619_309_593_041_598_44,
    0.830_604_693_233_132_3,
    0.966_234_757_101_576,
];
const GL_WEIGHTS: [f64; 6] = [
    0.085_662_246_189_585_17,
    0.180_380_786_524_069_3,
    0.233_956_967_286_345_52,
    0.233_956_967_286_345_52,
    0.180_380_786_524_069_3,
    0.085_662_246_189_585_17,
];

/// Shared spectral machinery for one grid.
///
/// Immutable after construction; transforms allocate their own scratch, so a
/// single workspace can be shared across worker threads.
pub struct SpectralWorkspace {
    n: usize,
    half_length: f64,
    dx: f64,
    /// Signed wavenumbers `pi j / L`, FFT layout.
    wavenumbers: Vec<f64>,
    /// `1 + k^2`.
    helmholtz_symbol: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Periodized Green kernel sampled for the quadrature convolution:
    /// `green_table[d][q]` = g(d*dx - t_q*dx) for cell offset d and
    /// Gauss node q.
    green_table: Vec<[f64; 6]>,
    pub tolerance: f64,
}

impl SpectralWorkspace {
    pub fn new(half_length: f64, n: usize) -> Result<SpectralWorkspace, ModelError> {
        if !(half_length > 0.0) || !half_length.is_finite() {
            return Err(ModelError::NonPositiveLength(half_length));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(ModelError::BadGridSize(n));
        }
        let dx = 2.0 * half_length / n as f64;
        let base = std::f64::consts::PI / half_length;
        let wavenumbers: Vec<f64> = (0..n)
            .map(|j| {
                let s = if j <= n / 2 { j as isize } else { j as isize - n as isize };
                base * s as f64
            })
            .collect();
        let helmholtz_symbol = wavenumbers.iter().map(|k| 1.0 + k * k).collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);

        // g(s) = cosh(|s| - L) / (2 sinh L) on [-L, L], extended 2L-periodic.
        let sinh2 = 2.0 * half_length.sinh();
        let green = |s: f64| {
            let mut r = s.rem_euclid(2.0 * half_length);
            if r > half_length {
                r = 2.0 * half_length - r;
            }
            (r - half_length).cosh() / sinh2
        };
        let green_table = (0..n)
            .map(|d| {
                let mut row = [0.0; 6];
                for (q, t) in GL_NODES.iter().enumerate() {
                    row[q] = green(d as f64 * dx - t * dx);
                }
                row
            })
            .collect();

        Ok(SpectralWorkspace {
            n,
            half_length,
            dx,
            wavenumbers,
            helmholtz_symbol,
            forward,
            inverse,
            green_table,
            tolerance: 1e-12,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn dx_spacing(&self) -> f64 {
        self.dx
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    fn check_len(&self, f: &[f64]) -> Result<(), ModelError> {
        if f.len() != self.n {
            return Err(ModelError::LengthMismatch {
                got: f.len(),
                want: self.n,
            });
        }
        Ok(())
    }

    /// Forward transform of real samples (unnormalized, FFT layout).
    pub fn spectrum(&self, f: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    fn to_physical(&self, mut buf: Vec<Complex64>) -> Vec<f64> {
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }

    fn apply_symbol(
        &self,
        f: &[f64],
        sym: impl Fn(usize) -> Complex64,
    ) -> Result<Vec<f64>, ModelError> {
        self.check_len(f)?;
        let mut buf = self.spectrum(f);
        for (j, c) in buf.iter_mut().enumerate() {
            *c *= sym(j);
        }
        Ok(self.to_physical(buf))
    }

    /// Zero-mean spectral antiderivative: inverts `d/dx` on the mean-free
    /// part and drops the mean and Nyquist modes.
    pub fn antiderivative(&self, f: &[f64]) -> Result<Vec<f64>, ModelError> {
        let nyq = self.n / 2;
        self.apply_symbol(f, |j| {
            if j == 0 || j == nyq {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, -1.0 / self.wavenumbers[j])
            }
        })
    }

    /// Spectral derivative; the Nyquist mode's derivative is zeroed.
    pub fn dx(&self, f: &[f64]) -> Result<Vec<f64>, ModelError> {
        let nyq = self.n / 2;
        self.apply_symbol(f, |j| {
            if j == nyq {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, self.wavenumbers[j])
            }
        })
    }

    /// `m = (1 - d^2/dx^2) u`, multiplication by `1 + k^2`.
    pub fn helmholtz_apply(&self, u: &[f64]) -> Result<Vec<f64>, ModelError> {
        self.apply_symbol(u, |j| Complex64::new(self.helmholtz_symbol[j], 0.0))
    }

    /// `u = (1 - d^2/dx^2)^{-1} m`, division by `1 + k^2`.
    pub fn helmholtz_invert(&self, m: &[f64]) -> Result<Vec<f64>, ModelError> {
        self.apply_symbol(m, |j| Complex64::new(1.0 / self.helmholtz_symbol[j], 0.0))
    }

    /// Zeroes every mode above the 2/3-rule cutoff.
    pub fn dealias(&self, f: &[f64]) -> Result<Vec<f64>, ModelError> {
        self.check_len(f)?;
        let cutoff = self.n / 3;
        let mut buf = self.spectrum(f);
        for (j, c) in buf.iter_mut().enumerate() {
            let s = if j <= self.n / 2 { j } else { self.n - j };
            if s > cutoff {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        Ok(self.to_physical(buf))
    }

    /// `(e^{-|x|}/2) * m` by direct quadrature against the periodized
    /// kernel: per-cell Gauss–Legendre nodes with 6-point Lagrange
    /// interpolation of `m`.  Independent of the FFT route; the kernel kink
    /// always falls on a cell boundary, so each cell integrand is smooth.
    pub fn green_convolve(&self, m: &[f64]) -> Result<Vec<f64>, ModelError> {
        self.check_len(m)?;
        let n = self.n;
        // interpolated samples of m at the Gauss nodes of every cell
        let mut cell_vals = vec![[0.0_f64; 6]; n];
        let mut lag = [[0.0_f64; 6]; 6]; // lag[q][r]: weight of node (c-2+r)
        for (q, &t) in GL_NODES.iter().enumerate() {
            for r in 0..6 {
                let xr = r as f64 - 2.0;
                let mut w = 1.0;
                for jj in 0..6 {
                    if jj == r {
                        continue;
                    }
                    let xj = jj as f64 - 2.0;
                    w *= (t - xj) / (xr - xj);
                }
                lag[q][r] = w;
            }
        }
        for c in 0..n {
            for q in 0..6 {
                let mut acc = 0.0;
                for r in 0..6 {
                    let idx = (c + n + r - 2) % n;
                    acc += lag[q][r] * m[idx];
                }
                cell_vals[c][q] = acc;
            }
        }
        let mut out = vec![0.0; n];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for c in 0..n {
                let d = (i + n - c) % n;
                let g = &self.green_table[d];
                let v = &cell_vals[c];
                for q in 0..6 {
                    acc += GL_WEIGHTS[q] * g[q] * v[q];
                }
            }
            *o = acc * self.dx;
        }
        Ok(out)
    }

    /// Trigonometric interpolant of a sample vector, for off-grid
    /// evaluation along characteristics.
    pub fn interpolant(&self, f: &[f64]) -> Result<TrigInterpolant, ModelError> {
        self.check_len(f)?;
        let coeffs = self.spectrum(f);
        Ok(TrigInterpolant {
            coeffs,
            wavenumbers: self.wavenumbers.clone(),
            n: self.n,
            half_length: self.half_length,
        })
    }
}

/// Evaluates the trigonometric interpolant and its derivative at arbitrary
/// points.
pub struct TrigInterpolant {
    coeffs: Vec<Complex64>,
    wavenumbers: Vec<f64>,
    n: usize,
    half_length: f64,
}

impl TrigInterpolant {
    fn sum(&self, x: f64, deriv: bool) -> f64 {
        let nyq = self.n / 2;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, c) in self.coeffs.iter().enumerate() {
            let k = self.wavenumbers[j];
            // Nyquist handled as cosine (split symmetric pair); its
            // derivative contribution is zero by the same convention as dx.
            let phase = Complex64::new(0.0, k * (x + self.half_length)).exp();
            let term = if j == nyq {
                if deriv {
                    Complex64::new(0.0, 0.0)
                } else {
                    c * (k * (x + self.half_length)).cos()
                }
            } else if deriv {
                c * phase * Complex64::new(0.0, k)
            } else {
                c * phase
            };
            acc += term;
        }
        acc.re / self.n as f64
    }

    pub fn value(&self, x: f64) -> f64 {
        self.sum(x, false)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.sum(x, true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(ws: &SpectralWorkspace) -> Vec<f64> {
        (0..ws.n())
            .map(|j| -ws.half_length() + j as f64 * ws.dx_spacing())
            .collect()
    }

    fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn construction_guards() {
        assert!(SpectralWorkspace::new(-1.0, 64).is_err());
        assert!(SpectralWorkspace::new(10.0, 100).is_err());
        assert!(SpectralWorkspace::new(10.0, 8).is_err());
        assert!(SpectralWorkspace::new(10.0, 64).is_ok());
    }

    #[test]
    fn dx_of_fundamental_sine() {
        let ws = SpectralWorkspace::new(20.0, 256).unwrap();
        let k0 = std::f64::consts::PI / 20.0;
        let x = grid(&ws);
        let f: Vec<f64> = x.iter().map(|&x| (k0 * x).sin()).collect();
        let expect: Vec<f64> = x.iter().map(|&x| k0 * (k0 * x).cos()).collect();
        assert!(max_abs_diff(&ws.dx(&f).unwrap(), &expect) < 1e-12);
    }

    #[test]
    fn dx_of_constant_is_zero() {
        let ws = SpectralWorkspace::new(5.0, 64).unwrap();
        let f = vec![3.5; 64];
        let d = ws.dx(&f).unwrap();
        assert!(d.iter().all(|&v| v.abs() < 1e-13));
    }

    #[test]
    fn second_derivative_matches_symbol() {
        let ws = SpectralWorkspace::new(10.0, 128).unwrap();
        // band-limited pseudo-random field
        let x = grid(&ws);
        let k0 = std::f64::consts::PI / 10.0;
        let f: Vec<f64> = x
            .iter()
            .map(|&x| {
                (1..8)
                    .map(|m| ((m * m) as f64).sin() * (m as f64 * k0 * x + m as f64).cos())
                    .sum()
            })
            .collect();
        let dd = ws.dx(&ws.dx(&f).unwrap()).unwrap();
        // second derivative via -k^2 symbol directly
        let mut buf = ws.spectrum(&f);
        for (j, c) in buf.iter_mut().enumerate() {
            let k = ws.wavenumbers()[j];
            *c *= Complex64::new(-k * k, 0.0);
        }
        let expect = ws.to_physical(buf);
        assert!(max_abs_diff(&dd, &expect) < 1e-10);
    }

    #[test]
    fn helmholtz_eigenfunction() {
        let ws = SpectralWorkspace::new(10.0, 128).unwrap();
        let k = 4.0 * std::f64::consts::PI / 10.0;
        let x = grid(&ws);
        let u: Vec<f64> = x.iter().map(|&x| (k * x).cos()).collect();
        let m = ws.helmholtz_apply(&u).unwrap();
        let expect: Vec<f64> = u.iter().map(|&v| (1.0 + k * k) * v).collect();
        assert!(max_abs_diff(&m, &expect) < 1e-11);
        let back = ws.helmholtz_invert(&m).unwrap();
        assert!(max_abs_diff(&back, &u) < 1e-12);
    }

    #[test]
    fn helmholtz_on_constant() {
        let ws = SpectralWorkspace::new(10.0, 64).unwrap();
        let u = vec![1.0; 64];
        let m = ws.helmholtz_apply(&u).unwrap();
        assert!(max_abs_diff(&m, &u) < 1e-13);
    }

    #[test]
    fn helmholtz_round_trip_random() {
        use rand::{Rng, SeedableRng};
        let ws = SpectralWorkspace::new(15.0, 256).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let u: Vec<f64> = (0..256).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let back = ws.helmholtz_invert(&ws.helmholtz_apply(&u).unwrap()).unwrap();
        let scale = u.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
        assert!(max_abs_diff(&back, &u) < 1e-12 * (1.0 + scale));
    }

    #[test]
    fn green_convolve_matches_spectral_inverse() {
        let ws = SpectralWorkspace::new(20.0, 1024).unwrap();
        let x = grid(&ws);
        let u: Vec<f64> = x.iter().map(|&x| (-x * x).exp()).collect();
        let m = ws.helmholtz_apply(&u).unwrap();
        let via_kernel = ws.green_convolve(&m).unwrap();
        let via_symbol = ws.helmholtz_invert(&m).unwrap();
        assert!(
            max_abs_diff(&via_kernel, &via_symbol) < 1e-8,
            "max diff {}",
            max_abs_diff(&via_kernel, &via_symbol)
        );
    }

    #[test]
    fn green_kernel_mass() {
        let ws = SpectralWorkspace::new(20.0, 256).unwrap();
        let m = vec![1.0; 256];
        let u = ws.green_convolve(&m).unwrap();
        for v in u {
            assert!((v - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn green_convolve_preserves_symmetry_and_positivity() {
        let ws = SpectralWorkspace::new(20.0, 256).unwrap();
        let x = grid(&ws);
        let m: Vec<f64> = x.iter().map(|&x| (-x * x / 2.0).exp()).collect();
        let u = ws.green_convolve(&m).unwrap();
        let n = x.len();
        for j in 1..n {
            // node j and node n-j are mirror images (node 0 sits at -L)
            assert!((u[j] - u[n - j]).abs() < 1e-10);
        }
        assert!(u.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn peakon_kernel_identity() {
        // a narrow normalized bump convolves to the kernel itself
        let ws = SpectralWorkspace::new(25.0, 4096).unwrap();
        let x = grid(&ws);
        let w = 0.02;
        let norm = 1.0 / (w * (std::f64::consts::PI).sqrt());
        let m: Vec<f64> = x.iter().map(|&x| norm * (-x * x / (w * w)).exp()).collect();
        let u = ws.green_convolve(&m).unwrap();
        // compare away from the bump
        for (j, &xj) in x.iter().enumerate() {
            if xj.abs() > 1.0 && xj.abs() < 20.0 {
                let kernel = (-xj.abs()).exp() / 2.0;
                assert!(
                    (u[j] - kernel).abs() < 1e-4 * (1.0 + kernel),
                    "x={xj}, u={}, kernel={kernel}",
                    u[j]
                );
            }
        }
    }

    #[test]
    fn dealias_preserves_low_modes() {
        let ws = SpectralWorkspace::new(10.0, 128).unwrap();
        let x = grid(&ws);
        let k0 = std::f64::consts::PI / 10.0;
        // modes up to 42 = 128/3 survive
        let f: Vec<f64> = x.iter().map(|&x| (10.0 * k0 * x).cos() + 0.3).collect();
        let g = ws.dealias(&f).unwrap();
        assert!(max_abs_diff(&f, &g) < 1e-12);
        // Nyquist is annihilated
        let nyq: Vec<f64> = (0..128).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let z = ws.dealias(&nyq).unwrap();
        assert!(z.iter().all(|&v| v.abs() < 1e-13));
    }

    #[test]
    fn dealias_matches_padded_product() {
        // product of two fields band-limited below half the cutoff equals
        // its own dealiased projection computed on a double grid
        let coarse = SpectralWorkspace::new(10.0, 128).unwrap();
        let fine = SpectralWorkspace::new(10.0, 256).unwrap();
        let k0 = std::f64::consts::PI / 10.0;
        let xc = grid(&coarse);
        let xf = grid(&fine);
        let fa = |x: f64| (3.0 * k0 * x).cos() + 0.5 * (7.0 * k0 * x).sin();
        let fb = |x: f64| (5.0 * k0 * x).sin() - 0.25 * (11.0 * k0 * x).cos();
        let prod_c: Vec<f64> = xc.iter().map(|&x| fa(x) * fb(x)).collect();
        let deal = coarse.dealias(&prod_c).unwrap();
        // exact product on the fine grid, projected to coarse modes
        let prod_f: Vec<f64> = xf.iter().map(|&x| fa(x) * fb(x)).collect();
        let mut spec = fine.spectrum(&prod_f);
        for (j, c) in spec.iter_mut().enumerate() {
            let s = if j <= 128 { j } else { 256 - j };
            if s > 128 / 3 {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        let proj = fine.to_physical(spec);
        // compare at shared nodes (every other fine node)
        let shared: Vec<f64> = (0..128).map(|j| proj[2 * j]).collect();
        assert!(max_abs_diff(&deal, &shared) < 1e-11);
    }

    #[test]
    fn interpolant_reproduces_nodes_and_derivative() {
        let ws = SpectralWorkspace::new(10.0, 128).unwrap();
        let x = grid(&ws);
        let k = 3.0 * std::f64::consts::PI / 10.0;
        let f: Vec<f64> = x.iter().map(|&x| (k * x).sin()).collect();
        let it = ws.interpolant(&f).unwrap();
        for (j, &xj) in x.iter().enumerate().step_by(7) {
            assert!((it.value(xj) - f[j]).abs() < 1e-11);
        }
        // off-grid points
        for &p in &[0.123, -4.56, 7.89] {
            assert!((it.value(p) - (k * p).sin()).abs() < 1e-11);
            assert!((it.derivative(p) - k * (k * p).cos()).abs() < 1e-10);
        }
    }
}
