//! Scaled complex polynomials and the convolution kernels behind the
//! generating-function coefficient extraction.
//!
//! Coefficients are kept O(1) by factoring the running magnitude into a
//! separate `log_scale`; products renormalize after every multiply so that a
//! chain of M convolutions never drifts out of double range.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

/// Which convolution kernel multiplies two coefficient slices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConvolutionBackend {
    /// Schoolbook O(D^2) product.
    Direct,
    /// Radix-2 FFT product, O(D log D).
    Fft,
    /// Cost-model pick between the two; deterministic for a given pair of
    /// operand sizes and truncation.
    #[default]
    Auto,
}

/// Degree-indexed complex coefficients `0..=degree` with a factored-out log
/// magnitude: the represented polynomial is `e^{log_scale} * sum c_k x^k`.
#[derive(Debug, Clone)]
pub struct ScaledPolynomial {
    coeffs: Vec<Complex64>,
    log_scale: f64,
}

impl ScaledPolynomial {
    /// Wrap raw coefficients and renormalize so the largest stored
    /// coefficient magnitude is 1.
    pub fn new(coeffs: Vec<Complex64>, log_scale: f64) -> Self {
        let mut p = Self { coeffs, log_scale };
        if p.coeffs.is_empty() {
            p.coeffs.push(Complex64::new(0.0, 0.0));
        }
        p.renormalize();
        p
    }

    /// The multiplicative identity.
    pub fn one() -> Self {
        Self {
            coeffs: vec![Complex64::new(1.0, 0.0)],
            log_scale: 0.0,
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    /// Coefficient of `x^k` including the scale factor, as
    /// `(scaled_coefficient, log_scale)`; the true value is
    /// `scaled_coefficient * e^{log_scale}`.
    pub fn coeff_scaled(&self, k: usize) -> (Complex64, f64) {
        let c = self
            .coeffs
            .get(k)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0));
        (c, self.log_scale)
    }

    fn renormalize(&mut self) {
        let max = self
            .coeffs
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        if max > 0.0 && max.is_finite() {
            let inv = max.recip();
            for c in &mut self.coeffs {
                *c *= inv;
            }
            self.log_scale += max.ln();
        }
    }
}

/// Truncated product of two scaled polynomials to degree `d_max`.
pub fn convolve(
    a: &ScaledPolynomial,
    b: &ScaledPolynomial,
    d_max: usize,
    backend: ConvolutionBackend,
) -> ScaledPolynomial {
    let out_len = (a.coeffs.len() + b.coeffs.len() - 1).min(d_max + 1);
    let raw = convolve_raw(&a.coeffs, &b.coeffs, out_len, backend);
    ScaledPolynomial::new(raw, a.log_scale + b.log_scale)
}

/// `f^m` by exponentiation-by-squaring, truncating to `d_max` at every step
/// (exact for all retained degrees) and renormalizing after each multiply.
pub fn power_product(
    f: &ScaledPolynomial,
    m: u32,
    d_max: usize,
    backend: ConvolutionBackend,
) -> ScaledPolynomial {
    if m == 0 {
        return ScaledPolynomial::one();
    }
    let mut result: Option<ScaledPolynomial> = None;
    let mut base = f.clone();
    let mut exp = m;
    loop {
        if exp & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => convolve(&r, &base, d_max, backend),
            });
        }
        exp >>= 1;
        if exp == 0 {
            break;
        }
        base = convolve(&base, &base, d_max, backend);
    }
    result.expect("m >= 1")
}

fn convolve_raw(
    a: &[Complex64],
    b: &[Complex64],
    out_len: usize,
    backend: ConvolutionBackend,
) -> Vec<Complex64> {
    let use_fft = match backend {
        ConvolutionBackend::Direct => false,
        ConvolutionBackend::Fft => true,
        ConvolutionBackend::Auto => {
            let full = a.len() + b.len() - 1;
            let n = full.next_power_of_two();
            let direct_cost = out_len.min(full) * a.len().min(b.len());
            let fft_cost = 6 * n * n.trailing_zeros() as usize;
            direct_cost > fft_cost
        }
    };
    if use_fft {
        convolve_fft(a, b, out_len)
    } else {
        convolve_direct(a, b, out_len)
    }
}

fn convolve_direct(a: &[Complex64], b: &[Complex64], out_len: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); out_len];
    for (i, &ai) in a.iter().enumerate() {
        if i >= out_len {
            break;
        }
        let j_max = (out_len - i).min(b.len());
        for (j, &bj) in b[..j_max].iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

fn convolve_fft(a: &[Complex64], b: &[Complex64], out_len: usize) -> Vec<Complex64> {
    // single rounding policy: transform length is the next power of two
    // holding the full (untruncated) linear convolution
    let full = a.len() + b.len() - 1;
    let n = full.next_power_of_two();
    let mut fa = vec![Complex64::new(0.0, 0.0); n];
    let mut fb = vec![Complex64::new(0.0, 0.0); n];
    fa[..a.len()].copy_from_slice(a);
    fb[..b.len()].copy_from_slice(b);
    fft_in_place(&mut fa, false);
    fft_in_place(&mut fb, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    fft_in_place(&mut fa, true);
    let scale = 1.0 / n as f64;
    fa.truncate(out_len.min(full));
    for x in &mut fa {
        *x *= scale;
    }
    fa.resize(out_len, Complex64::new(0.0, 0.0));
    fa
}

/// Iterative radix-2 Cooley-Tukey transform; `inverse` flips the twiddle
/// sign but leaves the 1/n scale to the caller.
fn fft_in_place(data: &mut [Complex64], inverse: bool) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    // bit-reversal permutation
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            data.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let ang = sign * core::f64::consts::TAU / len as f64;
        let wlen = Complex64::from_polar(1.0, ang);
        let mut start = 0;
        while start < n {
            let mut w = Complex64::new(1.0, 0.0);
            for k in 0..len / 2 {
                let u = data[start + k];
                let v = data[start + k + len / 2] * w;
                data[start + k] = u + v;
                data[start + k + len / 2] = u - v;
                w *= wlen;
            }
            start += len;
        }
        len <<= 1;
    }
}
