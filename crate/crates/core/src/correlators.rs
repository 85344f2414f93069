//! Closed-form two-point correlation functions <a_i^+ a_j>(theta) for both
//! coherent-state families and their shared thermodynamic limit.
//!
//! The site indices are 0-based. All correlators obey the conjugate symmetry
//! `tpcf(i, j, theta) = conj(tpcf(j, i, theta))` and are 2*pi-periodic in
//! theta = U t; the equal-site value is time independent.

#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::states::{GcsState, MmgsState};

/// Two-point correlator of an MMGS under the deep-lattice Hamiltonian.
///
/// For i != j:
/// `alpha_i^* alpha_j exp[|alpha_i|^2 (e^{i theta} - 1)] exp[|alpha_j|^2 (e^{-i theta} - 1)]`;
/// for i = j the occupation `|alpha_i|^2`, constant in time.
pub fn tpcf_mmgs(state: &MmgsState, theta: f64, i: usize, j: usize) -> Result<Complex64> {
    let alpha = state.alpha();
    if i >= alpha.len() || j >= alpha.len() {
        return Err(Error::InvalidInput("site index out of range"));
    }
    if i == j {
        return Ok(Complex64::new(alpha[i].norm_sqr(), 0.0));
    }
    let rot_p = Complex64::from_polar(1.0, theta) - 1.0;
    let rot_m = Complex64::from_polar(1.0, -theta) - 1.0;
    Ok(alpha[i].conj()
        * alpha[j]
        * (alpha[i].norm_sqr() * rot_p).exp()
        * (alpha[j].norm_sqr() * rot_m).exp())
}

/// Two-point correlator of a GCS under the deep-lattice Hamiltonian.
///
/// The number operator imprints a phase on one mode's amplitude, so for
/// i != j the value is
/// `S xi_i^* xi_j (|xi_i|^2 e^{i theta} + |xi_j|^2 e^{-i theta} + sum_{k != i,j} |xi_k|^2)^{S-1}`.
/// The complex power is taken by exponentiation-by-squaring to keep branch
/// continuity in theta. For i = j the value is `S |xi_i|^2`; S = 0 gives the
/// vacuum value 0.
pub fn tpcf_gcs(state: &GcsState, theta: f64, i: usize, j: usize) -> Result<Complex64> {
    let xi = state.xi();
    if i >= xi.len() || j >= xi.len() {
        return Err(Error::InvalidInput("site index out of range"));
    }
    let s = state.s();
    if s == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if i == j {
        return Ok(Complex64::new(s as f64 * xi[i].norm_sqr(), 0.0));
    }
    let mut base = xi[i].norm_sqr() * Complex64::from_polar(1.0, theta)
        + xi[j].norm_sqr() * Complex64::from_polar(1.0, -theta);
    for (k, z) in xi.iter().enumerate() {
        if k != i && k != j {
            base += z.norm_sqr();
        }
    }
    Ok(s as f64 * xi[i].conj() * xi[j] * base.powu(s - 1))
}

/// Thermodynamic-limit correlator at filling factor lambda:
/// `lambda e^{lambda (-2 + 2 cos theta)}`, shared by both families.
pub fn tpcf_thermo(lambda: f64, theta: f64) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidInput("filling factor must be >= 0"));
    }
    Ok(lambda * (lambda * (-2.0 + 2.0 * theta.cos())).exp())
}

/// Distance of the homogeneous finite-size GCS correlator from its
/// thermodynamic limit at the same filling factor, `|tpcf_gcs - tpcf_thermo|`.
///
/// `lambda` must correspond to an integer mode count `M = S / lambda >= 2`
/// (the off-site formula assumes two distinct modes). The gap decays as
/// O(1/S) at fixed lambda.
pub fn thermo_gap(s: u32, lambda: f64, theta: f64) -> Result<f64> {
    if s == 0 {
        return Err(Error::InvalidInput("thermo_gap needs S >= 1"));
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidInput("filling factor must be > 0"));
    }
    let m_real = s as f64 / lambda;
    let m = m_real.round();
    if (m_real - m).abs() > 1e-9 || m < 2.0 {
        return Err(Error::InvalidInput(
            "lambda must give an integer mode count M = S/lambda >= 2",
        ));
    }
    let state = GcsState::homogeneous(s, m as u32)?;
    let finite = tpcf_gcs(&state, theta, 0, 1)?;
    let limit = tpcf_thermo(lambda, theta)?;
    Ok((finite - limit).norm())
}
