//! Finite-N fidelity metric on the `(beta, h)` chart.
//!
//! Three independent routes are provided: connected fluctuations of `H` and
//! `S_z`, finite differences of the free energy, and the dense Bures
//! (Hubner) sum for very small systems.

pub mod bures;

pub use bures::{bures_dense, hubner_metric, MetricSplit, BURES_MAX_N};

use crate::error::{Error, Result};
use crate::numerics::{central_diff, mixed_diff, DiffMode, DiffSpec};
use crate::spectrum::ModelParams;
use crate::thermal::ThermalEnsemble;
use serde::Serialize;

/// Symmetric 2x2 tensor in the `(beta, h)` coordinate basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricTensor2 {
    pub g_bb: f64,
    pub g_bh: f64,
    pub g_hh: f64,
}

impl MetricTensor2 {
    pub const fn new(g_bb: f64, g_bh: f64, g_hh: f64) -> Self {
        Self { g_bb, g_bh, g_hh }
    }

    pub fn det(&self) -> f64 {
        self.g_bb * self.g_hh - self.g_bh * self.g_bh
    }

    /// Largest component magnitude.
    pub fn scale(&self) -> f64 {
        self.g_bb.abs().max(self.g_bh.abs()).max(self.g_hh.abs())
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self::new(self.g_bb * k, self.g_bh * k, self.g_hh * k)
    }

    pub fn components(&self) -> [f64; 3] {
        [self.g_bb, self.g_bh, self.g_hh]
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.g_bb + o.g_bb, self.g_bh + o.g_bh, self.g_hh + o.g_hh)
    }

    /// Largest componentwise difference divided by `max(scale, floor)`.
    pub fn rel_diff(&self, o: &Self, floor: f64) -> f64 {
        let s = self.scale().max(o.scale()).max(floor);
        self.components()
            .iter()
            .zip(o.components())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            / s
    }

    /// Positive semidefinite up to `tol * max(g_bb g_hh, 1)` in the determinant.
    pub fn is_psd(&self, tol: f64) -> bool {
        self.g_bb >= 0.0 && self.g_hh >= 0.0 && self.det() >= -tol * (self.g_bb * self.g_hh).max(1.0)
    }
}

/// `g_bb = Var(H)/4`, `g_hh = beta^2 Var(S_z)`, `g_bh = -(beta/2) Cov(H, S_z)`.
pub fn metric_fluctuations(params: ModelParams) -> Result<MetricTensor2> {
    Ok(from_ensemble(&ThermalEnsemble::new(params)?))
}

pub fn from_ensemble(ens: &ThermalEnsemble) -> MetricTensor2 {
    let m = ens.moments();
    let beta = ens.params().beta();
    MetricTensor2::new(m.var_h / 4.0, -0.5 * beta * m.cov_h_sz, beta * beta * m.var_sz)
}

/// Default step for [`metric_fd_free_energy`].
pub fn default_fd_step(beta: f64) -> f64 {
    1e-3 * beta.max(1.0)
}

/// Richardson disagreement above this (relative to the tensor scale) is rejected.
pub const FD_UNSTABLE_REL: f64 = 1e-4;

/// The metric from second derivatives of `ln Z_N`:
/// `g_bb = -(N/4) d^2(beta f)/d beta^2`, `g_hh = -(N beta/4) d^2 f/dh^2`,
/// `g_bh = -(N beta/4) d^2 f/(d beta dh)`.
pub fn metric_fd_free_energy(params: ModelParams, step: f64) -> Result<MetricTensor2> {
    let beta = params.beta();
    let h = params.h();
    let spec = DiffSpec::new(step, 1, DiffMode::Second)?;
    if beta - 2.0 * step <= 0.0 {
        return Err(Error::Domain(format!("step {step} too large for beta = {beta}: need beta - 2 step > 0")));
    }
    let ens = ThermalEnsemble::new(params)?;
    let psi = |b: f64, x: f64| ens.log_partition_ratio(b, x);

    let d2b = central_diff(|b| psi(b, h), beta, &spec)?;
    let d2h = central_diff(|x| psi(beta, x), h, &spec)?;
    let d1h = central_diff(|x| psi(beta, x), h, &spec.with_mode(DiffMode::First))?;
    let dbh = mixed_diff(psi, beta, h, &spec.with_mode(DiffMode::Mixed))?;

    let g = MetricTensor2::new(d2b.value / 4.0, (dbh.value - d1h.value / beta) / 4.0, d2h.value / 4.0);
    let err = [d2b.error, d2h.error, dbh.error, d1h.error.map(|e| e / beta)]
        .iter()
        .map(|e| e.unwrap_or(0.0) / 4.0)
        .fold(0.0, f64::max);
    let rel = err / g.scale().max(f64::MIN_POSITIVE);
    if rel > FD_UNSTABLE_REL {
        return Err(Error::Unstable { rel });
    }
    Ok(g)
}
