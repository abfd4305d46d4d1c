//! Thermodynamic limit `N -> infinity`.
//!
//! The free energy per spin is `f = mu^2/2 - ln(2 cosh(beta r))/beta` with
//! `r = sqrt(mu^2 + h^2)`. In the ordered phase `r` solves `r = tanh(beta r)`,
//! which does not involve `h`; in the paramagnetic phase `mu = 0` and `r = |h|`.

mod ricci;

pub use ricci::{ricci_limit, ricci_scalar_2d, RicciMethod, RICCI_DEFAULT_STEP};

use crate::error::{Error, Result};
use crate::metric::MetricTensor2;
use crate::mp::{self, Ctx};
use crate::numerics::{find_root_with_derivative, ln_2cosh, richardson_table, sech2};
use astro_float::BigFloat;
use serde::Serialize;
use std::cell::RefCell;
use std::fmt;

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParams(format!("beta must be positive and finite, got {beta}")));
    }
    Ok(())
}

fn check_h(h: f64) -> Result<()> {
    if !h.is_finite() {
        return Err(Error::InvalidParams(format!("field must be finite, got {h}")));
    }
    Ok(())
}

/// Residual reached by the Newton polish of `r = tanh(beta r)`.
pub const ROOT_TOL: f64 = 1e-14;

/// Positive root of `r = tanh(beta r)`; `None` when `beta <= 1`.
pub fn solve_r(beta: f64) -> Result<Option<f64>> {
    check_beta(beta)?;
    if beta <= 1.0 {
        return Ok(None);
    }
    if beta.tanh() == 1.0 {
        return Ok(Some(1.0));
    }
    let f = |r: f64| (beta * r).tanh() - r;
    let df = |r: f64| beta * sech2(beta * r) - 1.0;
    // small-r expansion r^2 ~ 3 (beta - 1) / beta^3 places the root; start below it
    let mut a = (3.0 * (beta - 1.0) / beta.powi(3)).sqrt().min(0.5) / 2.0;
    while f(a) <= 0.0 {
        a /= 2.0;
        if a < f64::MIN_POSITIVE {
            return Err(Error::Domain(format!("no positive root bracket found for beta = {beta}")));
        }
    }
    find_root_with_derivative(f, df, a, 1.0, ROOT_TOL).map(Some)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Ordered,
    Paramagnetic,
    Boundary,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Ordered => "ordered",
            Phase::Paramagnetic => "paramagnetic",
            Phase::Boundary => "boundary",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint {
    pub beta: f64,
    pub h: f64,
    pub phase: Phase,
    pub mu_xy: f64,
    pub r: f64,
}

/// Tolerance for the boundary test `|h| = tanh(beta |h|)`, applied in the
/// relative form `|tanh(beta |h|)/|h| - 1|` (and `|beta - 1|` at `h = 0`).
pub const BOUNDARY_TOL: f64 = 1e-12;

pub fn on_boundary(beta: f64, h: f64) -> bool {
    let a = h.abs();
    if a == 0.0 {
        (beta - 1.0).abs() <= BOUNDARY_TOL
    } else {
        ((beta * a).tanh() / a - 1.0).abs() <= BOUNDARY_TOL
    }
}

pub fn classify(beta: f64, h: f64) -> Result<PhasePoint> {
    check_beta(beta)?;
    check_h(h)?;
    let a = h.abs();
    if on_boundary(beta, h) {
        return Ok(PhasePoint { beta, h, phase: Phase::Boundary, mu_xy: 0.0, r: a });
    }
    match solve_r(beta)? {
        Some(r) if r > a => {
            let mu = ((r - a) * (r + a)).sqrt();
            Ok(PhasePoint { beta, h, phase: Phase::Ordered, mu_xy: mu, r })
        }
        _ => Ok(PhasePoint { beta, h, phase: Phase::Paramagnetic, mu_xy: 0.0, r: a }),
    }
}

/// `beta_c(h) = artanh(|h|)/|h|`; 1 at `h = 0`, `+inf` at `|h| = 1`.
pub fn critical_beta(h: f64) -> Result<f64> {
    check_h(h)?;
    let a = h.abs();
    if a > 1.0 {
        return Err(Error::Domain(format!("no finite critical temperature for |h| = {a} > 1")));
    }
    if a == 1.0 {
        return Ok(f64::INFINITY);
    }
    if a == 0.0 {
        return Ok(1.0);
    }
    Ok(a.atanh() / a)
}

/// Free energy per spin.
pub fn free_energy_limit(beta: f64, h: f64) -> Result<f64> {
    let p = classify(beta, h)?;
    Ok(0.5 * p.mu_xy * p.mu_xy - ln_2cosh(beta * p.r) / beta)
}

/// `mu_z = -df/dh`: `h` in the ordered phase, `tanh(beta h)` otherwise.
pub fn magnetization_z(beta: f64, h: f64) -> Result<f64> {
    let p = classify(beta, h)?;
    Ok(match p.phase {
        Phase::Ordered => h,
        _ => (beta * h).tanh(),
    })
}

/// Which form of the ordered-phase `g_bb` and the reduced 1D coefficient to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Variant {
    /// Derived from the free energy along the self-consistent solution.
    #[serde(rename = "corrected")]
    Corrected,
    /// `r^2 (1 + r^2) / (4 d)` for `g_bb` and `1 / (4 cosh hbar)` for the
    /// reduced coefficient; kept for the audit.
    #[serde(rename = "printed")]
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Ordered,
    Paramagnetic,
}

/// Per-spin limit metric `lim g / N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitMetric {
    pub tensor: MetricTensor2,
    pub branch: Branch,
    /// Rank-one tensor (paramagnetic branch).
    pub degenerate: bool,
}

impl LimitMetric {
    /// Exactly zero for the degenerate branch.
    pub fn det(&self) -> f64 {
        if self.degenerate {
            0.0
        } else {
            self.tensor.det()
        }
    }
}

/// Quantities of the ordered branch that depend on `beta` only.
#[derive(Debug, Clone, Copy)]
pub(crate) struct OrderedBranch {
    pub r: f64,
    /// `sech^2(beta r)`, equal to `1 - r^2` on the solution.
    pub u: f64,
    /// `1 - beta u`.
    pub d: f64,
    /// `dr/dbeta = r u / d`.
    pub r_beta: f64,
}

impl OrderedBranch {
    pub fn new(beta: f64, r: f64) -> Self {
        let u = sech2(beta * r);
        let d = 1.0 - beta * u;
        Self { r, u, d, r_beta: r * u / d }
    }

    pub fn g_bb(&self, variant: Variant) -> f64 {
        let r2 = self.r * self.r;
        match variant {
            Variant::Corrected => r2 * self.u / (4.0 * self.d),
            Variant::AsPrinted => r2 * (1.0 + r2) / (4.0 * self.d),
        }
    }
}

pub fn paramagnetic_tensor(beta: f64, h: f64) -> MetricTensor2 {
    let s = 0.25 * sech2(beta * h);
    MetricTensor2::new(s * h * h, s * h * beta, s * beta * beta)
}

pub fn metric_limit(beta: f64, h: f64, variant: Variant) -> Result<LimitMetric> {
    let p = classify(beta, h)?;
    match p.phase {
        Phase::Boundary => Err(Error::Singular {
            beta,
            h,
            reason: "the limit metric is discontinuous across the phase boundary".into(),
        }),
        Phase::Ordered => {
            let br = OrderedBranch::new(beta, p.r);
            Ok(LimitMetric {
                tensor: MetricTensor2::new(br.g_bb(variant), 0.0, beta / 4.0),
                branch: Branch::Ordered,
                degenerate: false,
            })
        }
        Phase::Paramagnetic => Ok(LimitMetric {
            tensor: paramagnetic_tensor(beta, h),
            branch: Branch::Paramagnetic,
            degenerate: true,
        }),
    }
}

pub const NUMERIC_LIMIT_STEP: f64 = 1e-2;
pub const NUMERIC_LIMIT_LEVELS: u8 = 2;

/// Variant-free limit metric from second differences of `beta f` along the
/// self-consistent solution. The stencil is shrunk until it stays inside
/// one phase; `beta f` and the difference quotients are formed at 512 bits.
pub fn metric_limit_numeric(beta: f64, h: f64) -> Result<MetricTensor2> {
    let centre = classify(beta, h)?;
    if centre.phase == Phase::Boundary {
        return Err(Error::Singular { beta, h, reason: "no one-sided derivative at the boundary".into() });
    }
    let mut step = NUMERIC_LIMIT_STEP.min(beta / 4.0);
    let same_phase = |s: f64| -> Result<bool> {
        for (db, dh) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            if classify(beta + db * s, h + dh * s)?.phase != centre.phase {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let mut tries = 0;
    while !same_phase(step)? {
        step /= 2.0;
        tries += 1;
        if tries > 20 {
            return Err(Error::Singular { beta, h, reason: "too close to the phase boundary for a stencil".into() });
        }
    }
    let ctx = RefCell::new(Ctx::new()?);
    let failure = RefCell::new(None);
    let (bf, hf) = (mp::f(beta), mp::f(h));
    // stencil abscissae are formed at full precision so that rounding of
    // beta + s does not leak into the quotients
    let phi = |db: i64, dh: i64, s: &BigFloat| -> BigFloat {
        let b = mp::add(&bf, &mp::mul(&mp::int(db), s));
        let x = mp::add(&hf, &mp::mul(&mp::int(dh), s));
        match phi_mp(&mut ctx.borrow_mut(), &b, &x, centre.phase) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                mp::int(0)
            }
        }
    };
    let p0 = phi(0, 0, &mp::int(0));
    let quotients = |s: f64| -> [f64; 3] {
        let sf = mp::f(s);
        let s2 = mp::mul(&sf, &sf);
        let second = |plus: BigFloat, minus: BigFloat| {
            mp::div(&mp::add(&mp::sub(&plus, &mp::mul(&mp::int(2), &p0)), &minus), &s2)
        };
        let d2b = second(phi(1, 0, &sf), phi(-1, 0, &sf));
        let (hp, hm) = (phi(0, 1, &sf), phi(0, -1, &sf));
        let d1h = mp::div(&mp::sub(&hp, &hm), &mp::mul(&mp::int(2), &sf));
        let d2h = second(hp, hm);
        let cross = mp::add(&mp::sub(&mp::sub(&phi(1, 1, &sf), &phi(1, -1, &sf)), &phi(-1, 1, &sf)), &phi(-1, -1, &sf));
        let dbh = mp::div(&cross, &mp::mul(&mp::int(4), &s2));
        let bh = mp::sub(&dbh, &mp::div(&d1h, &bf));
        [mp::to_f64(&d2b), mp::to_f64(&bh), mp::to_f64(&d2h)]
    };
    let rows: Vec<[f64; 3]> = (0..=NUMERIC_LIMIT_LEVELS).map(|k| quotients(step / f64::from(1u32 << k))).collect();
    let g = [0, 1, 2].map(|i| -richardson_table(&rows.iter().map(|r| r[i]).collect::<Vec<_>>()).value / 4.0);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(MetricTensor2::new(g[0], g[1], g[2]))
}

/// `beta f` at 512 bits for a point known to lie inside `phase`.
fn phi_mp(ctx: &mut Ctx, b: &BigFloat, h: &BigFloat, phase: Phase) -> Result<BigFloat> {
    let h2 = mp::mul(h, h);
    if phase != Phase::Ordered {
        let bh = mp::mul(b, h);
        let bh = if bh.is_negative() { bh.neg() } else { bh };
        return Ok(ctx.ln_2cosh(&bh).neg());
    }
    let beta = mp::to_f64(b);
    let seed = solve_r(beta)?.ok_or_else(|| Error::Domain(format!("no ordered solution at beta = {beta}")))?;
    let one = mp::int(1);
    let mut r = mp::f(seed);
    for _ in 0..6 {
        let t = ctx.tanh(&mp::mul(b, &r));
        let slope = mp::sub(&one, &mp::mul(b, &mp::sub(&one, &mp::mul(&t, &t))));
        r = mp::sub(&r, &mp::div(&mp::sub(&r, &t), &slope));
    }
    let mu2 = mp::sub(&mp::mul(&r, &r), &h2);
    Ok(mp::sub(&mp::div(&mp::mul(b, &mu2), &mp::int(2)), &ctx.ln_2cosh(&mp::mul(b, &r))))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedMetric1D {
    pub hbar: f64,
    pub coefficient: f64,
}

/// Coefficient of `dhbar^2` for paramagnetic states, `hbar = beta h`.
pub fn reduced_metric(hbar: f64, variant: Variant) -> Result<ReducedMetric1D> {
    check_h(hbar)?;
    let coefficient = match variant {
        Variant::Corrected => 0.25 * sech2(hbar),
        Variant::AsPrinted => 0.25 / hbar.cosh(),
    };
    Ok(ReducedMetric1D { hbar, coefficient })
}
