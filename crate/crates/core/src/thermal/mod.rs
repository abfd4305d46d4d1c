//! Canonical ensemble at finite N.
//!
//! Weights are held as logs, `ln d_S - beta E_SM - ln Z`, since `d_S` grows
//! like `2^N / N` and `beta E` spans a range of order `N`.

pub mod precise;

use crate::error::Result;
use crate::numerics::logsumexp_unchecked;
use crate::spectrum::{level, multiplicity, ModelParams};
use serde::Serialize;

/// First and second connected moments of `H` and `S_z` in the Gibbs state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalMoments {
    pub mean_h: f64,
    pub var_h: f64,
    pub mean_sz: f64,
    pub var_sz: f64,
    pub cov_h_sz: f64,
}

/// Gibbs state of one `(N, beta, h)`, immutable after construction.
///
/// Internally the ensemble is built at `|h|`; odd quantities pick up the sign
/// of `h`, which makes every even quantity exactly even in `h`.
#[derive(Debug, Clone)]
pub struct ThermalEnsemble {
    params: ModelParams,
    log_z: f64,
    sign: f64,
    sectors: Vec<(u32, usize)>,
    m: Vec<i64>,
    energy: Vec<f64>,
    log_weight: Vec<f64>,
}

impl ThermalEnsemble {
    pub fn new(params: ModelParams) -> Result<Self> {
        let n = params.n();
        let beta = params.beta();
        let a = params.h().abs();
        let sign = if params.h() < 0.0 { -1.0 } else { 1.0 };
        let levels = ((n as usize / 2) + 1).pow(2);
        let mut sectors = Vec::with_capacity(n as usize / 2 + 1);
        let mut m = Vec::with_capacity(levels);
        let mut energy = Vec::with_capacity(levels);
        let mut log_weight = Vec::with_capacity(levels);
        for s in 0..=n / 2 {
            let ld = multiplicity(n, s)?.log;
            sectors.push((s, m.len()));
            let si = i64::from(s);
            for mm in -si..=si {
                let e = level(n, s, mm, a);
                m.push(mm);
                energy.push(e);
                log_weight.push(ld - beta * e);
            }
        }
        let log_z = logsumexp_unchecked(&log_weight);
        for w in &mut log_weight {
            *w -= log_z;
        }
        Ok(Self { params, log_z, sign, sectors, m, energy, log_weight })
    }

    pub fn params(&self) -> ModelParams {
        self.params
    }

    /// `ln Z_N`.
    pub fn log_partition(&self) -> f64 {
        self.log_z
    }

    /// `f_N = -ln Z_N / (N beta)`.
    pub fn free_energy_per_spin(&self) -> f64 {
        -self.log_z / (f64::from(self.params.n()) * self.params.beta())
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    /// `(S, M, E_SM, ln p_SM)` for every level, at the actual (signed) field.
    pub fn levels(&self) -> impl Iterator<Item = (u32, i64, f64, f64)> + '_ {
        self.sectors.iter().flat_map(move |&(s, off)| {
            (off..off + 2 * s as usize + 1).map(move |i| (s, self.signed_m(i), self.energy[i], self.log_weight[i]))
        })
    }

    fn signed_m(&self, i: usize) -> i64 {
        if self.sign < 0.0 {
            -self.m[i]
        } else {
            self.m[i]
        }
    }

    /// `ln p` summed over the whole spectrum (zero up to rounding).
    pub fn log_normalization(&self) -> f64 {
        logsumexp_unchecked(&self.log_weight)
    }

    /// Two-pass central moments. Odd quantities are accumulated over `+M/-M`
    /// pairs so that they vanish exactly at `h = 0`.
    pub fn moments(&self) -> ThermalMoments {
        let p: Vec<f64> = self.log_weight.iter().map(|w| w.exp()).collect();
        let mut mean_h = 0.0;
        let mut mean_m = 0.0;
        for &(s, off) in &self.sectors {
            let c = off + s as usize;
            let end = off + 2 * s as usize;
            mean_h += p[off..=end].iter().zip(&self.energy[off..=end]).map(|(w, e)| w * e).sum::<f64>();
            for k in 1..=s as usize {
                mean_m += k as f64 * (p[c + k] - p[c - k]);
            }
        }
        let mut var_h = 0.0;
        let mut var_m = 0.0;
        let mut cov = 0.0;
        for &(s, off) in &self.sectors {
            let c = off + s as usize;
            for ((w, e), m) in p[off..=off + 2 * s as usize].iter().zip(&self.energy[off..]).zip(&self.m[off..]) {
                let de = e - mean_h;
                let dm = *m as f64 - mean_m;
                var_h += w * de * de;
                var_m += w * dm * dm;
            }
            cov += p[c] * (self.energy[c] - mean_h) * -mean_m;
            for k in 1..=s as usize {
                let kf = k as f64;
                cov += p[c + k] * (self.energy[c + k] - mean_h) * (kf - mean_m)
                    + p[c - k] * (self.energy[c - k] - mean_h) * (-kf - mean_m);
            }
        }
        ThermalMoments {
            mean_h,
            var_h,
            mean_sz: self.sign * mean_m,
            var_sz: var_m,
            cov_h_sz: self.sign * cov,
        }
    }

    /// `ln Z(beta2, h2) - ln Z(beta, h)`, evaluated as a weighted sum over this
    /// ensemble so that nearby points do not suffer from cancellation in `ln Z`.
    pub fn log_partition_ratio(&self, beta2: f64, h2: f64) -> f64 {
        let beta = self.params.beta();
        let db = beta2 - beta;
        let dh = 2.0 * beta2 * (h2 - self.params.h());
        let terms: Vec<f64> = (0..self.m.len())
            .map(|i| self.log_weight[i] - db * self.energy[i] + dh * self.signed_m(i) as f64)
            .collect();
        logsumexp_unchecked(&terms)
    }
}

/// `ln Z_N(beta, h)`.
pub fn log_partition(params: ModelParams) -> Result<f64> {
    Ok(ThermalEnsemble::new(params)?.log_partition())
}

pub fn moments(params: ModelParams) -> Result<ThermalMoments> {
    Ok(ThermalEnsemble::new(params)?.moments())
}

/// `f_N = -ln Z_N / (N beta)`.
pub fn free_energy_per_spin_finite(params: ModelParams) -> Result<f64> {
    Ok(ThermalEnsemble::new(params)?.free_energy_per_spin())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ens(n: u32, beta: f64, h: f64) -> ThermalEnsemble {
        ThermalEnsemble::new(ModelParams::new(n, beta, h).unwrap()).unwrap()
    }

    #[test]
    fn two_spin_examples() {
        let e = ens(2, 1.0, 0.0);
        let z = 2.0 + 2.0 * 1f64.cosh();
        assert!((e.log_partition() - z.ln()).abs() < 1e-14);
        assert!((e.log_partition() - 1.62652).abs() < 1e-5);
        assert!((e.free_energy_per_spin() + 0.81326).abs() < 1e-5);
        let m = e.moments();
        assert_eq!(m.mean_sz, 0.0);
        assert_eq!(m.cov_h_sz, 0.0);
        assert!((m.var_sz - 2.0 / z).abs() < 1e-15);
        assert!((m.var_sz - 0.39322).abs() < 1e-5);
        let e1 = std::f64::consts::E;
        let var_h = (e1 + 1.0 / e1) / z - ((1.0 / e1 - e1) / z).powi(2);
        assert!((m.var_h - var_h).abs() < 1e-14);
    }

    #[test]
    fn infinite_temperature_limit() {
        for n in [2u32, 10, 100] {
            let e = ens(n, 1e-6, 0.0);
            let want = f64::from(n) * std::f64::consts::LN_2;
            assert!((e.log_partition() - want).abs() < 1e-4 * want);
            let f = e.free_energy_per_spin();
            assert!((f * 1e-6 + std::f64::consts::LN_2).abs() < 1e-5);
        }
    }

    #[test]
    fn kramers_evenness_is_exact() {
        for n in [2u32, 12, 100] {
            for h in [0.1, 0.55, 1.7] {
                let a = ens(n, 1.3, h);
                let b = ens(n, 1.3, -h);
                assert_eq!(a.free_energy_per_spin().to_bits(), b.free_energy_per_spin().to_bits());
                let (ma, mb) = (a.moments(), b.moments());
                assert_eq!(ma.mean_sz, -mb.mean_sz);
                assert_eq!(ma.cov_h_sz, -mb.cov_h_sz);
                assert_eq!(ma.var_h, mb.var_h);
                assert_eq!(ma.var_sz, mb.var_sz);
            }
        }
    }

    #[test]
    fn levels_carry_signed_m() {
        let a = ens(4, 1.0, -0.4);
        for (s, m, e, _) in a.levels() {
            assert_eq!(e, level(4, s, m, -0.4));
        }
        assert_eq!(a.len(), 9);
    }

    #[test]
    fn ratio_matches_direct() {
        let e = ens(40, 1.5, 0.3);
        for (b2, h2) in [(1.5, 0.3), (1.6, 0.25), (1.4, -0.3)] {
            let direct = ens(40, b2, h2).log_partition() - e.log_partition();
            assert!((e.log_partition_ratio(b2, h2) - direct).abs() < 1e-11);
        }
    }
}
