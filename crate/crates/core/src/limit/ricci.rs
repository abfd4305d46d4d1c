//! Scalar curvature of the limit metric in the ordered phase.

use super::{classify, metric_limit, Branch, OrderedBranch, Phase, Variant};
use crate::error::{Error, Result};
use crate::metric::MetricTensor2;
use crate::numerics::{central_diff, mixed_diff, DiffMode, DiffSpec};
use serde::Serialize;
use std::cell::RefCell;

pub const RICCI_DEFAULT_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RicciMethod {
    /// Christoffel symbols and Riemann tensor from nested central differences.
    ChristoffelFD,
    /// Gaussian curvature of a diagonal metric, with analytic derivatives.
    OrthogonalClosedForm,
    /// The closed formula exactly as printed, with `P = sqrt(beta)/2` and
    /// `Q = sqrt(mu dmu/dbeta)/2`; `h`-derivatives of `Q` by differences.
    AsPrinted,
}

type Sym2 = [[f64; 2]; 2];

fn sym(g: &MetricTensor2) -> Sym2 {
    [[g.g_bb, g.g_bh], [g.g_bh, g.g_hh]]
}

fn inverse(g: &Sym2) -> Result<Sym2> {
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    if det == 0.0 || !det.is_finite() {
        return Err(Error::Domain("metric is degenerate; curvature undefined".into()));
    }
    Ok([[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]])
}

/// Ricci scalar of a 2D metric field `g(x, y)` at `(x, y)`, with
/// `R = g^{bd} R^a_{bad}` and `R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb}
/// + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}`.
///
/// First and second derivatives of `g` are central differences with one
/// Richardson level; the derivative of `Gamma` is expanded analytically in
/// terms of them.
pub fn ricci_scalar_2d<F>(metric: F, x: f64, y: f64, step: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<MetricTensor2>,
{
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let comp = |i: usize, j: usize| {
        let metric = &metric;
        let failure = &failure;
        move |a: f64, b: f64| match metric(a, b) {
            Ok(g) => sym(&g)[i][j],
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let first = DiffSpec::new(step, 1, DiffMode::First)?;
    let second = first.with_mode(DiffMode::Second);
    let mixed = first.with_mode(DiffMode::Mixed);

    let g = sym(&metric(x, y)?);
    // dg[k][i][j] = d_k g_ij ; ddg[k][l][i][j] = d_k d_l g_ij
    let mut dg = [[[0.0; 2]; 2]; 2];
    let mut ddg = [[[[0.0; 2]; 2]; 2]; 2];
    for i in 0..2 {
        for j in i..2 {
            let c = comp(i, j);
            let vals = [
                central_diff(|a| c(a, y), x, &first)?.value,
                central_diff(|b| c(x, b), y, &first)?.value,
            ];
            let xx = central_diff(|a| c(a, y), x, &second)?.value;
            let yy = central_diff(|b| c(x, b), y, &second)?.value;
            let xy = mixed_diff(c, x, y, &mixed)?.value;
            for k in 0..2 {
                dg[k][i][j] = vals[k];
                dg[k][j][i] = vals[k];
            }
            for (k, l, v) in [(0, 0, xx), (1, 1, yy), (0, 1, xy), (1, 0, xy)] {
                ddg[k][l][i][j] = v;
                ddg[k][l][j][i] = v;
            }
        }
    }
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let gi = inverse(&g)?;

    // Christoffel symbols of the first kind, and their derivatives
    // c1[d][b][c] = 1/2 (d_b g_dc + d_c g_db - d_d g_bc)
    let mut c1 = [[[0.0; 2]; 2]; 2];
    let mut dc1 = [[[[0.0; 2]; 2]; 2]; 2];
    for d in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                c1[d][b][c] = 0.5 * (dg[b][d][c] + dg[c][d][b] - dg[d][b][c]);
                for e in 0..2 {
                    dc1[e][d][b][c] = 0.5 * (ddg[e][b][d][c] + ddg[e][c][d][b] - ddg[e][d][b][c]);
                }
            }
        }
    }
    // d_e g^{ad} = -g^{ap} d_e g_pq g^{qd}
    let mut dgi = [[[0.0; 2]; 2]; 2];
    for e in 0..2 {
        for a in 0..2 {
            for d in 0..2 {
                let mut s = 0.0;
                for p in 0..2 {
                    for q in 0..2 {
                        s -= gi[a][p] * dg[e][p][q] * gi[q][d];
                    }
                }
                dgi[e][a][d] = s;
            }
        }
    }
    let mut gam = [[[0.0; 2]; 2]; 2];
    let mut dgam = [[[[0.0; 2]; 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    gam[a][b][c] += gi[a][d] * c1[d][b][c];
                    for e in 0..2 {
                        dgam[e][a][b][c] += dgi[e][a][d] * c1[d][b][c] + gi[a][d] * dc1[e][d][b][c];
                    }
                }
            }
        }
    }
    // Ricci tensor R_bd = R^a_{bad}
    let mut ricci = [[0.0; 2]; 2];
    for b in 0..2 {
        for d in 0..2 {
            let mut s = 0.0;
            for a in 0..2 {
                s += dgam[a][a][d][b] - dgam[d][a][a][b];
                for (e, ge) in gam.iter().enumerate() {
                    s += gam[a][a][e] * ge[d][b] - gam[a][d][e] * ge[a][b];
                }
            }
            ricci[b][d] = s;
        }
    }
    let mut r = 0.0;
    for b in 0..2 {
        for d in 0..2 {
            r += gi[b][d] * ricci[b][d];
        }
    }
    Ok(r)
}

fn ordered_only(beta: f64, h: f64) -> Result<OrderedBranch> {
    let p = classify(beta, h)?;
    if p.phase != Phase::Ordered {
        return Err(Error::Domain(format!(
            "curvature is defined only in the ordered phase; ({beta}, {h}) is {}",
            p.phase
        )));
    }
    Ok(OrderedBranch::new(beta, p.r))
}

/// Ricci scalar of the per-spin limit metric (corrected variant) at an
/// ordered-phase point.
pub fn ricci_limit(beta: f64, h: f64, method: RicciMethod) -> Result<f64> {
    let br = ordered_only(beta, h)?;
    match method {
        RicciMethod::ChristoffelFD => ricci_scalar_2d(
            |b, x| {
                let m = metric_limit(b, x, Variant::Corrected)?;
                if m.branch != Branch::Ordered {
                    return Err(Error::Singular {
                        beta,
                        h,
                        reason: "difference stencil crosses the phase boundary".into(),
                    });
                }
                Ok(m.tensor)
            },
            beta,
            h,
            RICCI_DEFAULT_STEP,
        ),
        RicciMethod::OrthogonalClosedForm => Ok(orthogonal_closed_form(beta, &br)),
        RicciMethod::AsPrinted => as_printed(beta, h, &br),
    }
}

// ds^2 = E dbeta^2 + G dh^2 with E = E(beta), G = beta/4:
// K = -1/(2W) d_beta(G_beta / W), W = sqrt(E G), R = 2K.
fn orthogonal_closed_form(beta: f64, br: &OrderedBranch) -> f64 {
    let OrderedBranch { r, u, d, r_beta } = *br;
    let e = r * r * u / (4.0 * d);
    let g = beta / 4.0;
    let g_beta = 0.25;
    let u_beta = -2.0 * r * r_beta;
    let d_beta = -u + 2.0 * beta * r * r_beta;
    let e_beta = ((2.0 * r * r_beta * u + r * r * u_beta) * d - r * r * u * d_beta) / (4.0 * d * d);
    let w = (e * g).sqrt();
    let w_beta = (e_beta * g + e * g_beta) / (2.0 * w);
    // d_beta(G_beta / W) = -G_beta W_beta / W^2
    let k = -1.0 / (2.0 * w) * (-g_beta * w_beta / (w * w));
    2.0 * k
}

fn as_printed(beta: f64, h: f64, br: &OrderedBranch) -> Result<f64> {
    let p = beta.sqrt() / 2.0;
    let p_beta = 0.25 / beta.sqrt();
    let p_bb = -0.125 / beta.powf(1.5);
    let q_at = |x: f64| -> Result<f64> {
        let pt = classify(beta, x)?;
        if pt.phase != Phase::Ordered {
            return Err(Error::Singular { beta, h, reason: "difference stencil crosses the phase boundary".into() });
        }
        // mu dmu/dbeta = r dr/dbeta at fixed h
        let mu_beta = br.r * br.r_beta / pt.mu_xy;
        Ok((pt.mu_xy * mu_beta).sqrt() / 2.0)
    };
    let q = q_at(h)?;
    let spec = DiffSpec::new(RICCI_DEFAULT_STEP, 1, DiffMode::First)?;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let qf = |x: f64| {
        q_at(x).unwrap_or_else(|e| {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        })
    };
    let q_h = central_diff(qf, h, &spec)?.value;
    let q_hh = central_diff(qf, h, &spec.with_mode(DiffMode::Second))?.value;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(2.0 / (p * q) * (p_beta * q_h / (q * q) - p_bb / q - q_hh / p))
}
