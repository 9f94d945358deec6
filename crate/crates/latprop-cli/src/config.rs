//! Run configuration: a JSON file overlaid with command-line flags.

use crate::parse;
use crate::Failure;
use clap::Args;
use latprop::kernels::KernelMethod;
use latprop::lattice::{LatticeKind, LatticeSpec};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

/// Sample times; a newtype so clap takes the whole list as one value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TimeGrid(pub Vec<f64>);

fn time_grid(s: &str) -> Result<TimeGrid, String> {
    parse::time_grid(s).map(TimeGrid)
}

/// Every field is optional; unset fields fall back to the defaults listed
/// in the README. Flags given on the command line override the file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Lattice kind: monomer, dimer, square, square-rows, triangular, hexagonal.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice: Option<String>,
    /// Hopping Δ (default 1).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// On-site energy of sublattice A (default 0).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e1: Option<f64>,
    /// On-site energy of sublattice B (default 0).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e2: Option<f64>,
    /// Gap μ = (E1 − E2)/2, keeping E0 = (E1 + E2)/2.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    /// Kernel method (default depends on the lattice).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// Time grid: comma list or start:step:stop.
    #[arg(long, value_parser = time_grid)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<TimeGrid>,
    /// Half-width of windows and truncations, in cells.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<i64>,
    /// Site "n1[,n2][,A|B]".
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    /// Offset "d1[,d2]" of the target from the source.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dn: Option<String>,
    /// Occupations "site:count" separated by ';' (',' also separates on chains).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<String>,
    #[arg(long = "final", allow_hyphen_values = true)]
    #[serde(rename = "final", skip_serializing_if = "Option::is_none")]
    pub final_: Option<String>,
    /// boson (default) or fermion.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub statistics: Option<String>,
    /// Fermion formula: determinant (default) or product.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    /// json (default) or csv where supported.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    /// Tolerance override for the command's accuracy check.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Migration scenario: boson or fermion.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    /// Verification suite name (default all).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    /// Largest order for the C_q suite (default 12).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_q: Option<usize>,
    /// Series truncation order for honeycomb expansions.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_max: Option<usize>,
    /// Points per axis for quadrature kernels.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature_points: Option<usize>,
    /// Index of the distinguished inter-sublattice vector.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<usize>,
    /// Packet carrier in reduced coordinates "k1[,k2]".
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k0: Option<Vec<f64>>,
    /// Carrier offset from the conical point: "q" (dimer) or "q,θ°" (honeycomb).
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cone_offset: Option<Vec<f64>>,
    /// Packet width σ.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// Time samples for the transport fit (default 6).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Reject particle-number mismatches instead of reporting 0.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strict: Option<bool>,
    /// Compare the kernel with the truncated-lattice oracle.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check_oracle: Option<bool>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($f:ident),*) => { $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )* };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::usage(format!("bad config {}: {e}", path.display())))
    }

    /// Fields set in `top` replace those in `self`.
    pub fn overlay(mut self, top: &RunConfig) -> Self {
        overlay!(
            self, top, lattice, delta, e1, e2, mu, method, t, t_grid, half_width, source, target, dn, initial, final_,
            statistics, variant, output, format, tolerance, scenario, suite, max_q, q_max, quadrature_points, alpha1,
            k0, cone_offset, sigma, samples, strict, check_oracle
        );
        self
    }

    pub fn kind(&self) -> Result<LatticeKind, Failure> {
        self.lattice.as_deref().unwrap_or("monomer").parse().map_err(Failure::from)
    }

    pub fn spec(&self) -> Result<LatticeSpec, Failure> {
        let kind = self.kind()?;
        let delta = self.delta.unwrap_or(1.0);
        let (mut e1, mut e2) = (self.e1.unwrap_or(0.0), self.e2.unwrap_or(0.0));
        if let Some(mu) = self.mu {
            let e0 = 0.5 * (e1 + e2);
            e1 = e0 + mu;
            e2 = e0 - mu;
        }
        Ok(LatticeSpec::new(kind, delta, e1, e2)?)
    }

    pub fn method(&self, spec: &LatticeSpec) -> Result<KernelMethod, Failure> {
        match &self.method {
            Some(m) => Ok(m.parse()?),
            None => Ok(KernelMethod::default_for(spec)),
        }
    }

    pub fn time(&self) -> Result<f64, Failure> {
        self.t.ok_or_else(|| Failure::usage("--t is required"))
    }

    /// --t-grid if given, otherwise the single --t.
    pub fn times(&self) -> Result<Vec<f64>, Failure> {
        match &self.t_grid {
            Some(g) if !g.0.is_empty() => Ok(g.0.clone()),
            _ => Ok(vec![self.time()?]),
        }
    }

    pub fn flag(v: Option<bool>) -> bool {
        v.unwrap_or(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_lossless() {
        let c = RunConfig {
            lattice: Some("hexagonal".into()),
            delta: Some(0.1 + 0.2),
            mu: Some(-1.0 / 3.0),
            t_grid: Some(TimeGrid(vec![0.5, 1.0 / 7.0])),
            final_: Some("0:1".into()),
            strict: Some(true),
            ..Default::default()
        };
        let text = serde_json::to_string(&c).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn flags_override_file() {
        let file = RunConfig { lattice: Some("dimer".into()), t: Some(1.0), ..Default::default() };
        let flags = RunConfig { t: Some(2.0), ..Default::default() };
        let eff = file.overlay(&flags);
        assert_eq!(eff.lattice.as_deref(), Some("dimer"));
        assert_eq!(eff.t, Some(2.0));
    }

    #[test]
    fn mu_keeps_the_mean_energy() {
        let c = RunConfig { lattice: Some("dimer".into()), e1: Some(1.0), e2: Some(3.0), mu: Some(0.5), ..Default::default() };
        let s = c.spec().unwrap();
        assert_eq!((s.e1, s.e2), (2.5, 1.5));
    }
}
