//! Kernel density outside the analytic light cone.

use super::velocity::max_component_speed;
use crate::kernels::{density_from, KernelMethod, Propagator};
use crate::lattice::{LatticeSpec, SiteIndex, Window};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct LightConeReport {
    pub v_max: f64,
    /// v·t + 10(v·t)^{1/3} + 10, in sites (cells for the 2D lattices).
    pub radius: f64,
    /// Total |K|² at sup-norm offsets beyond `radius`.
    pub outside: f64,
    /// Total |K|² over the evaluated window.
    pub total: f64,
}

/// Density of the kernel column from the origin at time `t`, split at the
/// cone radius built from the top axis speed.
pub fn light_cone_check(spec: &LatticeSpec, t: f64, method: KernelMethod) -> Result<LightConeReport> {
    let kind = spec.kind;
    let v_max = max_component_speed(spec)?;
    let vt = v_max * t;
    let radius = vt + 10.0 * vt.cbrt() + 10.0;
    let source = SiteIndex::at(kind, 0, 0);
    let window = Window::centered(kind, radius.ceil() as i64 + 8);
    let prop = Propagator::new(*spec, t, method)?;
    let density = density_from(&prop, &source, &window)?;
    let mut outside = 0.0;
    let mut total = 0.0;
    for (s, p) in &density {
        total += p;
        if s.n1.abs().max(s.n2.abs()) as f64 > radius {
            outside += p;
        }
    }
    Ok(LightConeReport { v_max, radius, outside, total })
}
