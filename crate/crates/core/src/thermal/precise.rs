//! Multiprecision moments for the convergence study.
//!
//! In the ordered phase `g_hh / N` approaches its limit faster than double
//! precision can resolve, so the deviations are formed here at 512 bits and
//! only rounded to `f64` at the end.
//!
//! The Gibbs weight factorises as `d_S A_S B_M`, so every sector sum reduces
//! to prefix sums `P_k(S) = sum_{|M| <= S} B_M M^k` for `k = 0..=4`, which
//! keeps the cost linear in `N` rather than quadratic.

use crate::error::Result;
use crate::metric::MetricTensor2;
use crate::spectrum::ModelParams;
use crate::mp::{add, div, f, int, mul, sub, to_f64, Ctx};
use astro_float::BigFloat;

/// Per-spin metric `g / N` with components held at 512 bits.
#[derive(Debug, Clone)]
pub struct PreciseMetric {
    params: ModelParams,
    g_bb: BigFloat,
    g_bh: BigFloat,
    g_hh: BigFloat,
}

/// Component selector for [`PreciseMetric::deviation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Bb,
    Bh,
    Hh,
}

impl PreciseMetric {
    pub fn params(&self) -> ModelParams {
        self.params
    }

    /// The per-spin tensor rounded to double precision.
    pub fn per_spin(&self) -> MetricTensor2 {
        MetricTensor2::new(to_f64(&self.g_bb), to_f64(&self.g_bh), to_f64(&self.g_hh))
    }

    /// `g_c / N - target`, formed before rounding.
    pub fn deviation(&self, c: Component, target: f64) -> f64 {
        let g = match c {
            Component::Bb => &self.g_bb,
            Component::Bh => &self.g_bh,
            Component::Hh => &self.g_hh,
        };
        to_f64(&sub(g, &f(target)))
    }

    /// `det(g / N)` formed before rounding.
    pub fn det(&self) -> f64 {
        to_f64(&sub(&mul(&self.g_bb, &self.g_hh), &mul(&self.g_bh, &self.g_bh)))
    }
}

/// Fluctuation-formula metric per spin, evaluated in multiprecision.
pub fn metric_per_spin(params: ModelParams) -> Result<PreciseMetric> {
    let mut ctx = Ctx::new()?;
    let n = params.n();
    let half = i64::from(n / 2);
    let nb = int(i64::from(n));
    let beta = f(params.beta());
    let h = f(params.h());
    let b = div(&int(2), &nb);
    let two_h = mul(&int(2), &h);

    // B_M for M = -N/2 ..= N/2
    let b_m: Vec<BigFloat> = (-half..=half)
        .map(|m| {
            let quad = div(&int(2 * m * m), &nb);
            let lin = mul(&two_h, &int(m));
            ctx.exp(&mul(&beta, &sub(&lin, &quad)))
        })
        .collect();
    let bm = |m: i64| &b_m[(m + half) as usize];

    // C(N, k) for k = N/2 - S, descending from k = N/2 as S increases
    let mut binom = vec![int(1); n as usize / 2 + 1];
    for k in 0..n as usize / 2 {
        binom[k + 1] = div(&mul(&binom[k], &int(i64::from(n) - k as i64)), &int(k as i64 + 1));
    }

    let zero = int(0);
    let mut p = [bm(0).clone(), zero.clone(), zero.clone(), zero.clone(), zero.clone()];
    let (mut z, mut se, mut se2, mut sm, mut sm2, mut sem) =
        (zero.clone(), zero.clone(), zero.clone(), zero.clone(), zero.clone(), zero.clone());
    let h2x4 = mul(&int(4), &mul(&h, &h));
    let b2 = mul(&b, &b);
    for s in 0..=half {
        if s > 0 {
            let (up, dn) = (bm(s), bm(-s));
            let mut pw = int(1);
            let sb = int(s);
            for (k, pk) in p.iter_mut().enumerate() {
                let term = if k % 2 == 0 { add(up, dn) } else { sub(up, dn) };
                *pk = add(pk, &mul(&term, &pw));
                pw = mul(&pw, &sb);
            }
        }
        let k = (half - s) as usize;
        let d = div(&mul(&binom[k], &int(2 * s + 1)), &int(half + s + 1));
        let x = s * (s + 1) - half;
        let a = div(&int(-2 * x), &nb);
        let c = mul(&d, &ctx.exp(&mul(&beta, &div(&int(2 * x), &nb))));

        // E = a + b M^2 - 2 h M
        let e1 = sub(&add(&mul(&a, &p[0]), &mul(&b, &p[2])), &mul(&two_h, &p[1]));
        let mut e2 = add(&mul(&mul(&a, &a), &p[0]), &mul(&b2, &p[4]));
        e2 = add(&e2, &mul(&h2x4, &p[2]));
        e2 = add(&e2, &mul(&mul(&int(2), &mul(&a, &b)), &p[2]));
        e2 = sub(&e2, &mul(&mul(&int(2), &mul(&a, &two_h)), &p[1]));
        e2 = sub(&e2, &mul(&mul(&int(2), &mul(&b, &two_h)), &p[3]));
        let em = sub(&add(&mul(&a, &p[1]), &mul(&b, &p[3])), &mul(&two_h, &p[2]));

        z = add(&z, &mul(&c, &p[0]));
        se = add(&se, &mul(&c, &e1));
        se2 = add(&se2, &mul(&c, &e2));
        sm = add(&sm, &mul(&c, &p[1]));
        sm2 = add(&sm2, &mul(&c, &p[2]));
        sem = add(&sem, &mul(&c, &em));
    }
    let mean_e = div(&se, &z);
    let mean_m = div(&sm, &z);
    let var_e = sub(&div(&se2, &z), &mul(&mean_e, &mean_e));
    let var_m = sub(&div(&sm2, &z), &mul(&mean_m, &mean_m));
    let cov = sub(&div(&sem, &z), &mul(&mean_e, &mean_m));

    let g_bb = div(&var_e, &mul(&int(4), &nb));
    let g_hh = div(&mul(&mul(&beta, &beta), &var_m), &nb);
    let g_bh = div(&mul(&beta, &cov), &mul(&int(-2), &nb));
    Ok(PreciseMetric { params, g_bb, g_bh, g_hh })
}
