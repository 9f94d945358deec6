//! Mass-derivative representation of the scalar kernel.
//!
//! With r = √(λ+γ), every λ-derivative of sin(t r)/(i r) closes on a
//! spherical Bessel function:
//! (∂/∂λ)^s [sin(t r)/(i r)] = -i t (-t/(2r))^s j_s(t r).
//! The companion i∂_t of the same derivative is
//! (-t/(2r))^s [(2s+1) j_s(t r) - t r j_{s+1}(t r)].

use crate::error::{domain, ensure_forward, Error};
use crate::specfun::spherical_j_range;
use crate::{Result, C64};

/// Derivatives D_s and i∂_t D_s for s = 0..=smax, each multiplied by
/// scale^s so that large coupling powers can be folded in without overflow.
pub(crate) fn scaled_mass_derivatives(smax: usize, t: f64, r: f64, scale: f64) -> (Vec<C64>, Vec<C64>) {
    let z = t * r;
    let j = spherical_j_range(smax + 1, z);
    let step = -scale * t / (2.0 * r);
    let mut pow = 1.0;
    let mut d = Vec::with_capacity(smax + 1);
    let mut dt = Vec::with_capacity(smax + 1);
    for s in 0..=smax {
        d.push(C64::new(0.0, -t * pow * j[s]));
        dt.push(C64::new(pow * ((2 * s + 1) as f64 * j[s] - z * j[s + 1]), 0.0));
        pow *= step;
    }
    (d, dt)
}

/// Σ_s coeffs[s] (∂/∂λ)^s [sin(t√(λ+γ))/(i√(λ+γ))] at λ = λ0.
///
/// The last two retained terms must be below 1e-14 of the total, otherwise
/// the truncation is reported as unconverged.
pub fn operational_mass_apply(coeffs: &[C64], t: f64, gamma: f64, lambda0: f64) -> Result<C64> {
    ensure_forward(t)?;
    let r2 = lambda0 + gamma;
    if !(r2 > 0.0) {
        return domain(format!("λ0 + γ must be positive, got {r2}"));
    }
    if coeffs.is_empty() {
        return Ok(C64::new(0.0, 0.0));
    }
    let (d, _) = scaled_mass_derivatives(coeffs.len() - 1, t, r2.sqrt(), 1.0);
    let terms: Vec<C64> = coeffs.iter().zip(&d).map(|(c, v)| c * v).collect();
    let sum: C64 = terms.iter().sum();
    check_tail(&terms, sum, 1e-300)?;
    Ok(sum)
}

/// Kernel amplitudes are bounded by 1, so tails below this are immaterial.
pub(crate) const KERNEL_TAIL_FLOOR: f64 = 1e-20;

/// `floor` is an absolute tail size that always counts as converged.
pub(crate) fn check_tail(terms: &[C64], sum: C64, floor: f64) -> Result<()> {
    if terms.len() < 3 {
        return Ok(());
    }
    let tail = terms[terms.len() - 2..].iter().map(|v| v.norm()).fold(0.0, f64::max);
    if tail > 1e-14 * sum.norm() && tail > floor {
        return Err(Error::Accuracy(format!(
            "operational series not converged: tail {tail:.3e} against total {:.3e}",
            sum.norm()
        )));
    }
    Ok(())
}
