//! Spin-sector spectrum of the isotropic model.
//!
//! The Hamiltonian commutes with both the total spin and its z-projection, so
//! every eigenvalue is labelled by `(S, M)` and appears `d_S` times, where
//! `d_S` counts the spin-`S` multiplets in `N` spin-1/2 particles.

mod dense;

pub use dense::{dense_eigenvalues, dense_hamiltonian, DENSE_MAX_N};

use crate::error::{Error, Result};
use num_bigint::BigUint;
use serde::Serialize;

/// Largest `N` for which multiplicities are also returned as exact integers.
pub const EXACT_MULTIPLICITY_MAX_N: u32 = 64;

/// System size, inverse temperature and field of one thermal state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    n: u32,
    beta: f64,
    h: f64,
}

impl ModelParams {
    pub fn new(n: u32, beta: f64, h: f64) -> Result<Self> {
        check_n(n)?;
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParams(format!("beta must be positive and finite, got {beta}")));
        }
        if !h.is_finite() {
            return Err(Error::InvalidParams(format!("field must be finite, got {h}")));
        }
        Ok(Self { n, beta, h })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn h(&self) -> f64 {
        self.h
    }
}

pub(crate) fn check_n(n: u32) -> Result<()> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::InvalidParams(format!("N must be a positive even integer, got {n}")));
    }
    Ok(())
}

/// Natural log and (for small `N`) exact value of a sector multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct Multiplicity {
    pub log: f64,
    pub exact: Option<BigUint>,
}

fn ln_choose(n: u32, k: u32) -> f64 {
    let n = n as f64;
    let k = k as f64;
    libm::lgamma(n + 1.0) - libm::lgamma(k + 1.0) - libm::lgamma(n - k + 1.0)
}

fn choose_u128(n: u32, k: u32) -> u128 {
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    c
}

/// Number of spin-`S` multiplets among `N` spin-1/2 particles,
/// `d_S = C(N, N/2 - S) - C(N, N/2 - S - 1)`.
pub fn multiplicity(n: u32, s: u32) -> Result<Multiplicity> {
    check_n(n)?;
    if s > n / 2 {
        return Err(Error::Domain(format!("S = {s} outside 0..={} for N = {n}", n / 2)));
    }
    let k = n / 2 - s;
    if n <= EXACT_MULTIPLICITY_MAX_N {
        let lower = if k == 0 { 0 } else { choose_u128(n, k - 1) };
        let d = choose_u128(n, k) - lower;
        return Ok(Multiplicity { log: (d as f64).ln(), exact: Some(BigUint::from(d)) });
    }
    // d_S = C(N,k) (2S+1) / (N/2 + S + 1)
    let log = ln_choose(n, k) + f64::from(2 * s + 1).ln() - f64::from(n / 2 + s + 1).ln();
    Ok(Multiplicity { log, exact: None })
}

/// `E_SM = -(2/N)(S(S+1) - M^2 - N/2) - 2hM`.
pub fn energy_level(n: u32, s: u32, m: i64, h: f64) -> Result<f64> {
    check_n(n)?;
    if s > n / 2 || m.unsigned_abs() > u64::from(s) {
        return Err(Error::Domain(format!("need |M| <= S <= N/2, got N = {n}, S = {s}, M = {m}")));
    }
    Ok(level(n, s, m, h))
}

// The integer part is exact, so E(S, M, h) and E(S, -M, -h) agree bitwise.
#[inline]
pub(crate) fn level(n: u32, s: u32, m: i64, h: f64) -> f64 {
    let s = i64::from(s);
    let x = s * (s + 1) - m * m - i64::from(n / 2);
    -(2 * x) as f64 / f64::from(n) - 2.0 * h * m as f64
}

/// One spin sector: multiplicity and its `2S+1` levels ordered by `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorSpectrum {
    pub s: u32,
    pub log_multiplicity: f64,
    pub multiplicity_exact: Option<BigUint>,
    pub levels: Vec<(i64, f64)>,
}

pub fn sector(n: u32, s: u32, h: f64) -> Result<SectorSpectrum> {
    let d = multiplicity(n, s)?;
    let si = i64::from(s);
    let levels = (-si..=si).map(|m| (m, level(n, s, m, h))).collect();
    Ok(SectorSpectrum { s, log_multiplicity: d.log, multiplicity_exact: d.exact, levels })
}

/// All sectors `S = 0..=N/2`.
pub fn spectrum(n: u32, h: f64) -> Result<Vec<SectorSpectrum>> {
    check_n(n)?;
    (0..=n / 2).map(|s| sector(n, s, h)).collect()
}

/// The full eigenvalue multiset, each level repeated `d_S` times, sorted ascending.
///
/// Only sensible for small `N`; intended for comparison with [`dense_eigenvalues`].
pub fn sector_eigenvalues(n: u32, h: f64) -> Result<Vec<f64>> {
    if n > DENSE_MAX_N {
        return Err(Error::Resource(format!("expanded spectrum limited to N <= {DENSE_MAX_N}, got {n}")));
    }
    let mut out = Vec::with_capacity(1 << n);
    for sec in spectrum(n, h)? {
        let d = sec.multiplicity_exact.as_ref().and_then(|d| u64::try_from(d).ok()).unwrap_or(0) as usize;
        for &(_, e) in &sec.levels {
            out.extend(std::iter::repeat_n(e, d));
        }
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroundState {
    pub s0: u32,
    pub m0: i64,
    pub energy: f64,
    /// `h` sits exactly on a level crossing; `m0` is then the larger |M|.
    pub degenerate: bool,
}

fn crossing_field(n: u32, m: i64) -> f64 {
    (2 * m + 1) as f64 / f64::from(n)
}

/// Ground state in the maximal-spin sector. Negative fields are mapped
/// through the Kramers symmetry `(M, h) -> (-M, -h)`.
pub fn ground_state(n: u32, h: f64) -> Result<GroundState> {
    check_n(n)?;
    if !h.is_finite() {
        return Err(Error::InvalidParams(format!("field must be finite, got {h}")));
    }
    let s0 = n / 2;
    let smax = i64::from(s0);
    let a = h.abs();
    let (m, degenerate) = if a >= 1.0 {
        (smax, false)
    } else {
        let x = a * f64::from(n) / 2.0;
        let fl = x.floor() as i64;
        let hit = (fl - 1..=fl + 1).find(|&k| (0..smax).contains(&k) && crossing_field(n, k) == a);
        match hit {
            Some(k) => (k + 1, true),
            None => {
                let m = if x - x.floor() >= 0.5 { fl + 1 } else { fl };
                (m.min(smax), false)
            }
        }
    };
    let m0 = if h < 0.0 { -m } else { m };
    Ok(GroundState { s0, m0, energy: level(n, s0, m0, h), degenerate })
}

/// Fields `h >= 0` at which the ground-state `M` changes: `(2M+1)/N`, `M = 0..N/2`.
pub fn level_crossing_fields(n: u32) -> Result<Vec<f64>> {
    check_n(n)?;
    Ok((0..i64::from(n / 2)).map(|m| crossing_field(n, m)).collect())
}
