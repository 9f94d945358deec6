//! Retarded Klein-Gordon kernels used as continuum reference functions.

use crate::specfun::{bessel_j, bessel_y};
use crate::C64;
use std::f64::consts::PI;

/// 1+1 kernel 2μt/(π s) K₁(iμs), s = √(t² − x²), zero outside the cone.
///
/// K₁(iz) = −(π/2)(J₁(z) − iY₁(z)) for z > 0, so the kernel equals
/// −(μt/s)(J₁(μs) − iY₁(μs)); at μ = 0 the limit 2t/(iπs²) is returned.
pub fn kg_retarded_1p1(x: f64, t: f64, mu: f64) -> C64 {
    let t = t.abs();
    if t <= x.abs() {
        return C64::new(0.0, 0.0);
    }
    let s = (t * t - x * x).sqrt();
    let z = mu.abs() * s;
    if z == 0.0 {
        return C64::new(0.0, -2.0 * t / (PI * s * s));
    }
    -(mu.abs() * t / s) * C64::new(bessel_j(1, z), -bessel_y(1, z))
}

/// 2+1 kernel ((4i|t|)^{2/3} μ / (2πi s))^{3/2} K_{3/2}(iμs) with principal
/// branches, zero outside the cone.
pub fn kg_retarded_2p1(x: [f64; 2], t: f64, mu: f64) -> C64 {
    let t = t.abs();
    let r2 = x[0] * x[0] + x[1] * x[1];
    if t * t <= r2 || mu == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let s = (t * t - r2).sqrt();
    let i = C64::new(0.0, 1.0);
    let pre = ((4.0 * i * t).powf(2.0 / 3.0) * mu / (2.0 * PI * i * s)).powf(1.5);
    // K_{3/2}(z) = √(π/(2z)) e^{−z} (1 + 1/z)
    let z = i * mu * s;
    let k32 = (PI / (2.0 * z)).sqrt() * (-z).exp() * (1.0 + 1.0 / z);
    pre * k32
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KgDim {
    OnePlusOne,
    TwoPlusOne,
}

/// Kernel of the chosen dimension; `x` holds one or two spatial offsets.
pub fn kg_retarded(dim: KgDim, x: &[f64], t: f64, mu: f64) -> crate::Result<C64> {
    crate::error::ensure_forward(t)?;
    match (dim, x.len()) {
        (KgDim::OnePlusOne, 1) => Ok(kg_retarded_1p1(x[0], t, mu)),
        (KgDim::TwoPlusOne, 2) => Ok(kg_retarded_2p1([x[0], x[1]], t, mu)),
        _ => crate::error::domain(format!("{dim:?} needs {} spatial offsets, got {}", if dim == KgDim::OnePlusOne { 1 } else { 2 }, x.len())),
    }
}

/// Five-point second derivative, error O(h⁴).
fn d2(f: impl Fn(f64) -> C64, h: f64) -> C64 {
    (-f(2.0 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2.0 * h)) / (12.0 * h * h)
}

/// |(∂t² − ∇² + μ²)K| / |μ²K| at an interior point, by central differences
/// of step h.
pub fn kg_residual(dim: KgDim, x: &[f64], t: f64, mu: f64, h: f64) -> f64 {
    let k = |xx: &[f64], tt: f64| kg_retarded(dim, xx, tt, mu).unwrap_or_default();
    let mut r = d2(|e| k(x, t + e), h) + mu * mu * k(x, t);
    for axis in 0..x.len() {
        r -= d2(
            |e| {
                let mut y = x.to_vec();
                y[axis] += e;
                k(&y, t)
            },
            h,
        );
    }
    r.norm() / (mu * mu * k(x, t)).norm()
}
