//! Phase-space (Husimi-type) distribution grids
//! `|<beta| e^{-i H t} |alpha>|^M` over the complex beta plane, the circle
//! section linking them to G(x, t), and a completeness-based truncation
//! check.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::glauber::{cross_corr_single, TruncationSpec, XGrid};

/// Rectangular region and resolution in the beta plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub n_re: usize,
    pub n_im: usize,
}

impl GridSpec {
    /// Square grid `[-half, half]^2` with `n` nodes per axis.
    pub fn centered(half_width: f64, n: usize) -> Self {
        Self {
            re_min: -half_width,
            re_max: half_width,
            im_min: -half_width,
            im_max: half_width,
            n_re: n,
            n_im: n,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.re_max > self.re_min) || !(self.im_max > self.im_min) {
            return Err(Error::InvalidInput("phase-space extent is empty"));
        }
        if self.n_re < 2 || self.n_im < 2 {
            return Err(Error::InvalidInput(
                "phase-space grid needs at least 2 nodes per axis",
            ));
        }
        Ok(())
    }

    /// Largest |beta| reachable inside the region (attained at a corner).
    pub fn max_abs(&self) -> f64 {
        let re = self.re_min.abs().max(self.re_max.abs());
        let im = self.im_min.abs().max(self.im_max.abs());
        (re * re + im * im).sqrt()
    }

    /// Inclusive node coordinate along the real axis.
    pub fn re_node(&self, j: usize) -> f64 {
        self.re_min + (self.re_max - self.re_min) * j as f64 / (self.n_re - 1) as f64
    }

    /// Inclusive node coordinate along the imaginary axis.
    pub fn im_node(&self, i: usize) -> f64 {
        self.im_min + (self.im_max - self.im_min) * i as f64 / (self.n_im - 1) as f64
    }
}

/// Distribution values on a [`GridSpec`], row-major with the imaginary axis
/// as the row index.
#[derive(Debug, Clone)]
pub struct PhaseGrid {
    pub spec: GridSpec,
    pub values: Vec<f64>,
}

impl PhaseGrid {
    pub fn value(&self, i_im: usize, j_re: usize) -> f64 {
        self.values[i_im * self.spec.n_re + j_re]
    }

    pub fn beta(&self, i_im: usize, j_re: usize) -> Complex64 {
        Complex64::new(self.spec.re_node(j_re), self.spec.im_node(i_im))
    }

    /// Location and value of the global maximum (first occurrence in
    /// row-major order on ties).
    pub fn argmax(&self) -> (Complex64, f64) {
        let mut best = (0usize, 0usize, f64::MIN);
        for i in 0..self.spec.n_im {
            for j in 0..self.spec.n_re {
                let v = self.value(i, j);
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        (self.beta(best.0, best.1), best.2)
    }
}

/// The plotted quantity `|<beta| e^{-i H t} |alpha>|^M` on a beta grid.
///
/// Values lie in [0, 1]; the distribution is deliberately not normalized by
/// 1/pi (that factor appears only in [`husimi_norm_check`]).
pub fn distribution_grid(
    alpha: Complex64,
    theta: f64,
    m: u32,
    spec: &GridSpec,
    trunc: &TruncationSpec,
) -> Result<PhaseGrid> {
    spec.validate()?;
    if m == 0 {
        return Err(Error::InvalidInput("distribution grid needs M >= 1"));
    }
    trunc.validate(alpha.norm() * spec.max_abs())?;
    let mut values = Vec::with_capacity(spec.n_re * spec.n_im);
    for i in 0..spec.n_im {
        for j in 0..spec.n_re {
            let beta = Complex64::new(spec.re_node(j), spec.im_node(i));
            let c = cross_corr_single(beta, alpha, theta, trunc)?;
            values.push(c.norm().powi(m as i32));
        }
    }
    Ok(PhaseGrid { spec: *spec, values })
}

/// |G(x, theta)| sampled along the circle beta = sqrt(lambda) e^{-i 2 pi x}:
/// the section of the phase-space distribution that the Fourier relation
/// integrates over. Matches `|g_of_x|` from [`crate::glauber`] by
/// construction (the two are computed through different code paths).
pub fn circle_section(
    sqrt_lambda: f64,
    theta: f64,
    m: u32,
    grid: &XGrid,
    trunc: &TruncationSpec,
) -> Result<Vec<f64>> {
    if !(sqrt_lambda >= 0.0) {
        return Err(Error::InvalidInput("circle radius must be >= 0"));
    }
    let alpha = Complex64::new(sqrt_lambda, 0.0);
    let mut out = Vec::with_capacity(grid.len());
    for x in grid.iter() {
        let beta = Complex64::from_polar(sqrt_lambda, -core::f64::consts::TAU * x);
        let c = cross_corr_single(beta, alpha, theta, trunc)?;
        out.push(c.norm().powi(m as i32));
    }
    Ok(out)
}

/// Completeness check of the truncated evolution: the midpoint quadrature of
/// `(1/pi) |<beta|psi(theta)>|^2` over a region covering `|beta| <= |alpha| + 6`
/// must return 1 (unitarity plus coherent-state completeness). Returns the
/// quadrature value; deviations measure truncation and grid-resolution
/// error.
pub fn husimi_norm_check(
    alpha: Complex64,
    theta: f64,
    spec: &GridSpec,
    trunc: &TruncationSpec,
) -> Result<f64> {
    spec.validate()?;
    let needed = alpha.norm() + 6.0;
    if spec.re_min > -needed
        || spec.re_max < needed
        || spec.im_min > -needed
        || spec.im_max < needed
    {
        return Err(Error::InvalidInput(
            "norm-check grid must cover |beta| <= |alpha| + 6",
        ));
    }
    trunc.validate(alpha.norm() * spec.max_abs())?;
    let dx = (spec.re_max - spec.re_min) / spec.n_re as f64;
    let dy = (spec.im_max - spec.im_min) / spec.n_im as f64;
    let mut total = 0.0;
    for i in 0..spec.n_im {
        let im = spec.im_min + (i as f64 + 0.5) * dy;
        for j in 0..spec.n_re {
            let re = spec.re_min + (j as f64 + 0.5) * dx;
            let c = cross_corr_single(Complex64::new(re, im), alpha, theta, trunc)?;
            total += c.norm_sqr();
        }
    }
    Ok(total * dx * dy / core::f64::consts::PI)
}
