//! Comparison of closed-form variants against independent numerical oracles.
//!
//! Three groups of checks:
//! * ordered-phase `g_bb`: both variants against finite differences of the
//!   limit free energy, the finite-N trend, and the `T -> 0` behaviour
//! * the reduced 1D paramagnetic coefficient: both variants against the
//!   pullback of the 2D tensor and the single-spin Fisher-Rao metric
//! * the Ricci scalar: the three curvature methods side by side

use crate::error::Result;
use crate::limit::{
    critical_beta, metric_limit, metric_limit_numeric, paramagnetic_tensor, reduced_metric, ricci_limit, RicciMethod,
    Variant,
};
use crate::numerics::sech2;
use crate::spectrum::ModelParams;
use crate::thermal::precise::{metric_per_spin, Component};
use serde::Serialize;
use std::fmt;

/// Ordered-phase points used for the `g_bb` comparison.
pub const ORDERED_GRID: [(f64, f64); 10] = [
    (1.5, 0.0),
    (2.0, 0.0),
    (3.0, 0.0),
    (5.0, 0.0),
    (1.8, 0.4),
    (2.0, 0.3),
    (2.0, 0.5),
    (3.0, 0.8),
    (4.0, 0.9),
    (10.0, 0.2),
];

pub const ORACLE_REL_TOL: f64 = 1e-6;
pub const TREND_SIZES: [u32; 5] = [50, 100, 200, 400, 800];
pub const LOW_T_FIELD: f64 = 0.3;
pub const LOW_T_TEMPS: [f64; 4] = [0.2, 0.1, 0.05, 0.02];

#[derive(Debug, Clone, Serialize)]
pub struct VariantVerdict {
    pub variant: Variant,
    /// Largest relative deviation from the finite-difference oracle on the grid.
    pub max_rel_oracle: f64,
    pub matches_oracle: bool,
    /// `|g_bb^(N)/N - g_bb|` at `(beta, h) = (2, 0)` for each size in [`TREND_SIZES`].
    pub finite_n_gaps: Vec<f64>,
    pub matches_trend: bool,
    /// `g_bb` along `h = 0.3` at each temperature in [`LOW_T_TEMPS`].
    pub low_t_values: Vec<f64>,
    pub vanishes_at_low_t: bool,
}

impl VariantVerdict {
    pub fn passes(&self) -> bool {
        self.matches_oracle && self.matches_trend && self.vanishes_at_low_t
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GbbAudit {
    pub verdicts: Vec<VariantVerdict>,
    pub winner: Option<Variant>,
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

pub fn audit_gbb() -> Result<GbbAudit> {
    let oracle: Vec<f64> = ORDERED_GRID
        .iter()
        .map(|&(b, h)| metric_limit_numeric(b, h).map(|g| g.g_bb))
        .collect::<Result<_>>()?;
    let finite: Vec<_> = TREND_SIZES
        .iter()
        .map(|&n| metric_per_spin(ModelParams::new(n, 2.0, 0.0)?))
        .collect::<Result<_>>()?;
    let mut verdicts = Vec::new();
    for variant in [Variant::Corrected, Variant::AsPrinted] {
        let mut max_rel: f64 = 0.0;
        for (&(b, h), &o) in ORDERED_GRID.iter().zip(&oracle) {
            let g = metric_limit(b, h, variant)?.tensor.g_bb;
            max_rel = max_rel.max((g - o).abs() / o.abs());
        }
        let target = metric_limit(2.0, 0.0, variant)?.tensor.g_bb;
        let gaps: Vec<f64> = finite.iter().map(|m| m.deviation(Component::Bb, target).abs()).collect();
        let matches_trend = strictly_decreasing(&gaps) && gaps[gaps.len() - 1] < 0.01 * target.abs();
        let low_t: Vec<f64> = LOW_T_TEMPS
            .iter()
            .map(|&t| metric_limit(1.0 / t, LOW_T_FIELD, variant).map(|m| m.tensor.g_bb))
            .collect::<Result<_>>()?;
        let vanishes = strictly_decreasing(&low_t) && low_t[low_t.len() - 1] < 1e-12;
        verdicts.push(VariantVerdict {
            variant,
            max_rel_oracle: max_rel,
            matches_oracle: max_rel < ORACLE_REL_TOL,
            finite_n_gaps: gaps,
            matches_trend,
            low_t_values: low_t,
            vanishes_at_low_t: vanishes,
        });
    }
    let passing: Vec<Variant> = verdicts.iter().filter(|v| v.passes()).map(|v| v.variant).collect();
    let winner = if passing.len() == 1 { Some(passing[0]) } else { None };
    Ok(GbbAudit { verdicts, winner })
}

/// Single-spin Fisher-Rao metric `1/4 sum (dp)^2 / p` of the two-outcome
/// distribution `p = e^{+-hbar} / (2 cosh hbar)`.
pub fn single_spin_fisher_rao(hbar: f64) -> f64 {
    let c = 2.0 * hbar.cosh();
    let p = [hbar.exp() / c, (-hbar).exp() / c];
    let dp = 0.5 * sech2(hbar);
    0.25 * (dp * dp / p[0] + dp * dp / p[1])
}

/// Coefficient of `dhbar^2` obtained by pulling the paramagnetic 2D tensor
/// back along a curve through `(beta, hbar/beta)` on which only `h` varies.
pub fn pullback_coefficient(beta: f64, hbar: f64) -> f64 {
    // dhbar = beta dh along the curve
    paramagnetic_tensor(beta, hbar / beta).g_hh / (beta * beta)
}

pub const REDUCED_SAMPLE: [f64; 6] = [0.0, 0.3, 1.0, 2.0, 3.5, 6.0];
pub const REDUCED_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct ReducedAudit {
    /// Largest relative disagreement between pullback and Fisher-Rao oracle.
    pub oracle_disagreement: f64,
    pub oracles_agree: bool,
    pub corrected_max_rel: f64,
    pub printed_max_rel: f64,
    pub corrected_at_2: f64,
    pub printed_at_2: f64,
    pub winner: Option<Variant>,
}

pub fn audit_reduced() -> Result<ReducedAudit> {
    let mut disagree: f64 = 0.0;
    let mut worst = [0.0f64; 2];
    for &hb in &REDUCED_SAMPLE {
        let fr = single_spin_fisher_rao(hb);
        for beta in [0.5, 1.0, 2.0] {
            disagree = disagree.max((pullback_coefficient(beta, hb) - fr).abs() / fr);
        }
        for (k, v) in [Variant::Corrected, Variant::AsPrinted].into_iter().enumerate() {
            worst[k] = worst[k].max((reduced_metric(hb, v)?.coefficient - fr).abs() / fr);
        }
    }
    let oracles_agree = disagree < REDUCED_TOL;
    let ok = |w: f64| oracles_agree && w < REDUCED_TOL;
    let winner = match (ok(worst[0]), ok(worst[1])) {
        (true, false) => Some(Variant::Corrected),
        (false, true) => Some(Variant::AsPrinted),
        _ => None,
    };
    Ok(ReducedAudit {
        oracle_disagreement: disagree,
        oracles_agree,
        corrected_max_rel: worst[0],
        printed_max_rel: worst[1],
        corrected_at_2: reduced_metric(2.0, Variant::Corrected)?.coefficient,
        printed_at_2: reduced_metric(2.0, Variant::AsPrinted)?.coefficient,
        winner,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RicciSample {
    pub beta: f64,
    pub h: f64,
    pub christoffel: f64,
    pub orthogonal: f64,
    pub printed: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RicciAudit {
    pub samples: Vec<RicciSample>,
    pub max_rel_christoffel_orthogonal: f64,
    pub all_negative: bool,
    pub printed_sign_flipped: bool,
}

/// Ordered-phase sample points `T = f T_c(h)` for `h` in `{0, 0.2, 0.5}`.
pub fn ricci_sample_points() -> Result<Vec<(f64, f64)>> {
    let mut pts = Vec::new();
    for h in [0.0, 0.2, 0.5] {
        let tc = 1.0 / critical_beta(h)?;
        for frac in [0.9, 0.7, 0.5, 0.3] {
            if h == 0.5 && frac == 0.3 {
                continue;
            }
            pts.push((1.0 / (frac * tc), h));
        }
    }
    pts.push((10.0, 0.0));
    Ok(pts)
}

pub fn audit_ricci() -> Result<RicciAudit> {
    let mut samples = Vec::new();
    for (beta, h) in ricci_sample_points()? {
        samples.push(RicciSample {
            beta,
            h,
            christoffel: ricci_limit(beta, h, RicciMethod::ChristoffelFD)?,
            orthogonal: ricci_limit(beta, h, RicciMethod::OrthogonalClosedForm)?,
            printed: ricci_limit(beta, h, RicciMethod::AsPrinted)?,
        });
    }
    let max_rel = samples
        .iter()
        .map(|s| ((s.christoffel - s.orthogonal) / s.orthogonal).abs())
        .fold(0.0, f64::max);
    Ok(RicciAudit {
        max_rel_christoffel_orthogonal: max_rel,
        all_negative: samples.iter().all(|s| s.christoffel < 0.0),
        printed_sign_flipped: samples.iter().all(|s| s.printed > 0.0),
        samples,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub gbb: GbbAudit,
    pub reduced: ReducedAudit,
    pub ricci: RicciAudit,
}

pub fn run_audit() -> Result<AuditReport> {
    Ok(AuditReport { gbb: audit_gbb()?, reduced: audit_reduced()?, ricci: audit_ricci()? })
}

fn name(v: Option<Variant>) -> &'static str {
    match v {
        Some(Variant::Corrected) => "corrected",
        Some(Variant::AsPrinted) => "printed",
        None => "undecided",
    }
}

fn yn(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ordered-phase g_bb")?;
        writeln!(f, "  {:<10} {:>14} {:>8} {:>14} {:>8} {:>14} {:>8}", "variant", "oracle_rel", "match", "gap_N800", "trend", "g_bb(T=0.02)", "->0")?;
        for v in &self.gbb.verdicts {
            writeln!(
                f,
                "  {:<10} {:>14.3e} {:>8} {:>14.3e} {:>8} {:>14.3e} {:>8}",
                name(Some(v.variant)),
                v.max_rel_oracle,
                yn(v.matches_oracle),
                v.finite_n_gaps.last().copied().unwrap_or(f64::NAN),
                yn(v.matches_trend),
                v.low_t_values.last().copied().unwrap_or(f64::NAN),
                yn(v.vanishes_at_low_t),
            )?;
        }
        writeln!(f, "  verdict: {}", name(self.gbb.winner))?;
        writeln!(f)?;
        let r = &self.reduced;
        writeln!(f, "reduced paramagnetic coefficient")?;
        writeln!(f, "  pullback vs single-spin Fisher-Rao: max rel {:.3e} (agree: {})", r.oracle_disagreement, yn(r.oracles_agree))?;
        writeln!(f, "  {:<10} {:>14} {:>14}", "variant", "max_rel", "at hbar=2")?;
        writeln!(f, "  {:<10} {:>14.3e} {:>14.6}", "corrected", r.corrected_max_rel, r.corrected_at_2)?;
        writeln!(f, "  {:<10} {:>14.3e} {:>14.6}", "printed", r.printed_max_rel, r.printed_at_2)?;
        writeln!(f, "  verdict: {}", name(r.winner))?;
        writeln!(f)?;
        let q = &self.ricci;
        writeln!(f, "Ricci scalar (ordered phase)")?;
        writeln!(f, "  {:>10} {:>6} {:>14} {:>14} {:>14}", "beta", "h", "christoffel", "orthogonal", "printed")?;
        for s in &q.samples {
            writeln!(f, "  {:>10.5} {:>6} {:>14.6} {:>14.6} {:>14.6}", s.beta, s.h, s.christoffel, s.orthogonal, s.printed)?;
        }
        writeln!(f, "  christoffel vs orthogonal: max rel {:.3e}", q.max_rel_christoffel_orthogonal)?;
        writeln!(f, "  negative at every sample: {}", yn(q.all_negative))?;
        writeln!(f, "  printed formula has the opposite sign everywhere: {}", yn(q.printed_sign_flipped))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fisher_rao_oracle_examples() {
        assert!((single_spin_fisher_rao(0.0) - 0.25).abs() < 1e-15);
        assert!((single_spin_fisher_rao(2.0) - 0.017663).abs() < 1e-6);
        assert!((pullback_coefficient(0.7, 2.0) - single_spin_fisher_rao(2.0)).abs() < 1e-15);
    }

    #[test]
    fn sample_points_are_ordered() {
        for (beta, h) in ricci_sample_points().unwrap() {
            assert_eq!(crate::limit::classify(beta, h).unwrap().phase, crate::limit::Phase::Ordered);
        }
    }
}
