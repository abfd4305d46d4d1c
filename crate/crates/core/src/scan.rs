//! Grid drivers behind the `phase-diagram`, `metric-scan` and `converge`
//! subcommands, plus their CSV rendering.
//!
//! Points are evaluated in parallel and collected in grid order, so output
//! does not depend on the worker count.

use crate::error::{Error, Result};
use crate::limit::{classify, metric_limit, ricci_limit, LimitMetric, Phase, RicciMethod, Variant};
use crate::metric::MetricTensor2;
use crate::spectrum::ModelParams;
use crate::thermal::precise::{metric_per_spin, Component};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;

/// Inclusive linear range with `steps` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Range {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::InvalidParams(format!("range needs finite min < max, got [{min}, {max}]")));
        }
        if steps < 2 {
            return Err(Error::InvalidParams(format!("range needs at least 2 steps, got {steps}")));
        }
        Ok(Self { min, max, steps })
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            return self.max;
        }
        self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.steps).map(|i| self.value(i))
    }
}

/// A rectangular `(T, h)` grid, `T > 0` throughout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRequest {
    pub t: Range,
    pub h: Range,
}

impl ScanRequest {
    pub fn new(t: Range, h: Range) -> Result<Self> {
        if t.min <= 0.0 {
            return Err(Error::InvalidParams(format!("temperatures must be positive, got T_min = {}", t.min)));
        }
        Ok(Self { t, h })
    }

    /// Row-major points, `T` outer and `h` inner.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.t.values().flat_map(|t| self.h.values().map(move |h| (t, h))).collect()
    }
}

fn run_pool<I, T, F>(threads: usize, items: &[I], f: F) -> Result<Vec<T>>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Resource(format!("thread pool: {e}")))?;
    pool.install(|| items.par_iter().map(&f).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseRow {
    #[serde(rename = "T")]
    pub t: f64,
    pub h: f64,
    pub phase: Phase,
    pub mu_xy: f64,
    pub g_bb: f64,
    pub g_bh: f64,
    pub g_hh: f64,
    pub det: f64,
    /// `NaN` outside the ordered phase.
    pub ricci: f64,
}

fn tensor_or_nan(m: Option<LimitMetric>) -> (MetricTensor2, f64) {
    match m {
        Some(m) => (m.tensor, m.det()),
        None => (MetricTensor2::new(f64::NAN, f64::NAN, f64::NAN), f64::NAN),
    }
}

pub fn run_phase_diagram(req: &ScanRequest, threads: usize) -> Result<Vec<PhaseRow>> {
    run_pool(threads, &req.points(), |&(t, h)| {
        let beta = 1.0 / t;
        let p = classify(beta, h)?;
        let m = if p.phase == Phase::Boundary { None } else { Some(metric_limit(beta, h, Variant::Corrected)?) };
        let (g, det) = tensor_or_nan(m);
        let ricci = match p.phase {
            // cells hugging the boundary can have a stencil that leaves the phase
            Phase::Ordered => ricci_limit(beta, h, RicciMethod::ChristoffelFD).unwrap_or(f64::NAN),
            _ => f64::NAN,
        };
        Ok(PhaseRow { t, h, phase: p.phase, mu_xy: p.mu_xy, g_bb: g.g_bb, g_bh: g.g_bh, g_hh: g.g_hh, det, ricci })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricRow {
    #[serde(rename = "T")]
    pub t: f64,
    pub h: f64,
    pub phase: Phase,
    pub g_bb: f64,
    pub g_bh: f64,
    pub g_hh: f64,
    pub det: f64,
}

pub fn run_metric_scan(req: &ScanRequest, threads: usize) -> Result<Vec<MetricRow>> {
    run_pool(threads, &req.points(), |&(t, h)| {
        let beta = 1.0 / t;
        let p = classify(beta, h)?;
        let m = if p.phase == Phase::Boundary { None } else { Some(metric_limit(beta, h, Variant::Corrected)?) };
        let (g, det) = tensor_or_nan(m);
        Ok(MetricRow { t, h, phase: p.phase, g_bb: g.g_bb, g_bh: g.g_bh, g_hh: g.g_hh, det })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    #[serde(rename = "N")]
    pub n: u32,
    pub beta: f64,
    pub h: f64,
    pub g_bb: f64,
    pub g_bh: f64,
    pub g_hh: f64,
    pub det: f64,
    pub dev_bb_corrected: f64,
    pub dev_bh_corrected: f64,
    pub dev_hh_corrected: f64,
    pub dev_bb_printed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Name of the limit variant the finite-N `g_bb/N` approaches.
    pub matching_variant: String,
}

/// Per-spin finite-N metric for each `N`, with signed deviations from the
/// limit tensor. Deviations are formed in multiprecision.
pub fn run_convergence(ns: &[u32], beta: f64, h: f64, threads: usize) -> Result<ConvergenceReport> {
    if ns.is_empty() {
        return Err(Error::InvalidParams("empty N list".into()));
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParams("N list must be strictly ascending".into()));
    }
    for &n in ns {
        ModelParams::new(n, beta, h)?;
    }
    let limit = |v| metric_limit(beta, h, v).map(|m| m.tensor).ok();
    let corrected = limit(Variant::Corrected);
    let printed = limit(Variant::AsPrinted);
    let rows = run_pool(threads, ns, |&n| {
        let pm = metric_per_spin(ModelParams::new(n, beta, h)?)?;
        let g = pm.per_spin();
        let dev = |c, lim: Option<MetricTensor2>, pick: fn(&MetricTensor2) -> f64| {
            lim.map_or(f64::NAN, |l| pm.deviation(c, pick(&l)))
        };
        Ok(ConvergenceRow {
            n,
            beta,
            h,
            g_bb: g.g_bb,
            g_bh: g.g_bh,
            g_hh: g.g_hh,
            det: pm.det(),
            dev_bb_corrected: dev(Component::Bb, corrected, |l| l.g_bb),
            dev_bh_corrected: dev(Component::Bh, corrected, |l| l.g_bh),
            dev_hh_corrected: dev(Component::Hh, corrected, |l| l.g_hh),
            dev_bb_printed: dev(Component::Bb, printed, |l| l.g_bb),
        })
    })?;
    let last = rows.last().expect("non-empty");
    let matching_variant = match (corrected, printed) {
        (Some(c), Some(p)) if c == p => "both (variants coincide here)".to_string(),
        (Some(_), Some(_)) => {
            if last.dev_bb_corrected.abs() < last.dev_bb_printed.abs() {
                "corrected".to_string()
            } else {
                "printed".to_string()
            }
        }
        _ => "none (limit undefined on the phase boundary)".to_string(),
    };
    Ok(ConvergenceReport { rows, matching_variant })
}

/// Shortest round-trip rendering, in exponent form outside `[1e-5, 1e16)`;
/// `NaN` for undefined cells.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x.is_nan() {
        "NaN".to_string()
    } else if a == 0.0 || (1e-5..1e16).contains(&a) || a.is_infinite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub const PHASE_HEADER: &str = "T,h,phase,mu_xy,g_bb,g_bh,g_hh,det,ricci";
pub const METRIC_HEADER: &str = "T,h,phase,g_bb,g_bh,g_hh,det";
pub const CONVERGENCE_HEADER: &str =
    "N,beta,h,g_bb,g_bh,g_hh,det,dev_bb_corrected,dev_bh_corrected,dev_hh_corrected,dev_bb_printed";

pub fn phase_csv(rows: &[PhaseRow]) -> String {
    let mut s = String::from(PHASE_HEADER);
    s.push('\n');
    for r in rows {
        let cells = [r.mu_xy, r.g_bb, r.g_bh, r.g_hh, r.det, r.ricci].map(fmt_f64).join(",");
        let _ = writeln!(s, "{},{},{},{}", fmt_f64(r.t), fmt_f64(r.h), r.phase, cells);
    }
    s
}

pub fn metric_csv(rows: &[MetricRow]) -> String {
    let mut s = String::from(METRIC_HEADER);
    s.push('\n');
    for r in rows {
        let cells = [r.g_bb, r.g_bh, r.g_hh, r.det].map(fmt_f64).join(",");
        let _ = writeln!(s, "{},{},{},{}", fmt_f64(r.t), fmt_f64(r.h), r.phase, cells);
    }
    s
}

pub fn convergence_csv(rep: &ConvergenceReport) -> String {
    let mut s = String::from(CONVERGENCE_HEADER);
    s.push('\n');
    for r in &rep.rows {
        let cells = [
            r.beta,
            r.h,
            r.g_bb,
            r.g_bh,
            r.g_hh,
            r.det,
            r.dev_bb_corrected,
            r.dev_bh_corrected,
            r.dev_hh_corrected,
            r.dev_bb_printed,
        ]
        .map(fmt_f64)
        .join(",");
        let _ = writeln!(s, "{},{}", r.n, cells);
    }
    let _ = writeln!(s, "# matching variant: {}", rep.matching_variant);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_validation_and_endpoints() {
        assert!(Range::new(1.0, 1.0, 3).is_err());
        assert!(Range::new(2.0, 1.0, 3).is_err());
        assert!(Range::new(0.0, 1.0, 1).is_err());
        let r = Range::new(0.05, 1.5, 50).unwrap();
        assert_eq!(r.value(0), 0.05);
        assert_eq!(r.value(49), 1.5);
        assert!(ScanRequest::new(Range::new(0.0, 1.0, 2).unwrap(), r).is_err());
    }

    #[test]
    fn row_major_order() {
        let req = ScanRequest::new(Range::new(0.5, 1.0, 2).unwrap(), Range::new(0.0, 1.0, 3).unwrap()).unwrap();
        let p = req.points();
        assert_eq!(p, vec![(0.5, 0.0), (0.5, 0.5), (0.5, 1.0), (1.0, 0.0), (1.0, 0.5), (1.0, 1.0)]);
    }

    #[test]
    fn convergence_rejects_bad_lists() {
        assert!(run_convergence(&[], 2.0, 0.3, 1).is_err());
        assert!(run_convergence(&[10, 4], 2.0, 0.3, 1).is_err());
        assert!(matches!(run_convergence(&[4, 7], 2.0, 0.3, 1), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn csv_shapes() {
        let req = ScanRequest::new(Range::new(0.2, 1.4, 3).unwrap(), Range::new(0.0, 1.2, 4).unwrap()).unwrap();
        let csv = phase_csv(&run_phase_diagram(&req, 2).unwrap());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], PHASE_HEADER);
        assert_eq!(lines.len(), 13);
        assert!(lines[1..].iter().all(|l| l.split(',').count() == 9));
    }
}
