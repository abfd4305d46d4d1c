//! Numerical kernels shared by the thermal and geometric code.
//!
//! Everything here is deterministic: the same inputs always produce the
//! same bits, which the grid scans rely on for reproducible output.

use crate::error::{Error, Result};

/// Stable `ln(sum(exp(x_i)))` using a single max shift.
///
/// Entries may be `-inf` (zero weight). An all `-inf` input returns `-inf`.
pub fn logsumexp(log_terms: &[f64]) -> Result<f64> {
    if log_terms.is_empty() {
        return Err(Error::Domain("logsumexp of an empty list".into()));
    }
    Ok(logsumexp_unchecked(log_terms))
}

pub(crate) fn logsumexp_unchecked(log_terms: &[f64]) -> f64 {
    let max = log_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    if log_terms.len() == 1 {
        return log_terms[0];
    }
    let sum: f64 = log_terms.iter().map(|&x| (x - max).exp()).sum();
    max + sum.ln()
}

/// `ln(2 cosh x)` without overflow for large `|x|`.
pub fn ln_2cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p()
}

/// `sech^2 x`, accurate in the tails where `1 - tanh^2 x` underflows to zero.
pub fn sech2(x: f64) -> f64 {
    let e = (-2.0 * x.abs()).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

const BISECTION_WIDTH: f64 = 1e-10;
const MAX_NEWTON: usize = 5;

/// Root of `f` on a sign-changing bracket `[a, b]`.
///
/// Bisection narrows the bracket to ~1e-10, then Newton steps (with a
/// central-difference derivative) polish the root; any Newton step leaving
/// the bracket falls back to bisection. Returns `x` with `|f(x)| < tol`.
pub fn find_root<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let df = |x: f64| {
        let d = 1e-7 * x.abs().max(1.0);
        (f(x + d) - f(x - d)) / (2.0 * d)
    };
    find_root_with_derivative(&f, df, a, b, tol)
}

/// Same as [`find_root`] with an analytic derivative for the Newton phase.
pub fn find_root_with_derivative<F, D>(f: F, df: D, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!("root tolerance must be positive, got {tol}")));
    }
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let flo = f(lo);
    let fhi = f(hi);
    if flo.abs() < tol {
        return Ok(lo);
    }
    if fhi.abs() < tol {
        return Ok(hi);
    }
    if flo.is_nan() || fhi.is_nan() || flo * fhi >= 0.0 {
        return Err(Error::Bracket { a, b, fa: f(a), fb: f(b) });
    }
    // Orientation: f(lo) has sign `lo_sign` throughout.
    let lo_positive = flo > 0.0;
    let shrink = |lo: &mut f64, hi: &mut f64, x: f64, fx: f64| {
        if (fx > 0.0) == lo_positive {
            *lo = x;
        } else {
            *hi = x;
        }
    };

    while hi - lo > BISECTION_WIDTH * (1.0 + lo.abs().max(hi.abs())) {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() < tol {
            return Ok(mid);
        }
        shrink(&mut lo, &mut hi, mid, fm);
    }

    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_NEWTON {
        let fx = f(x);
        if fx.abs() < tol {
            return Ok(x);
        }
        shrink(&mut lo, &mut hi, x, fx);
        let step = fx / df(x);
        let next = x - step;
        x = if next.is_finite() && next > lo && next < hi { next } else { 0.5 * (lo + hi) };
    }

    // Newton stalled: finish by bisection down to adjacent floats.
    loop {
        let fx = f(x);
        if fx.abs() < tol {
            return Ok(x);
        }
        shrink(&mut lo, &mut hi, x, fx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(Error::Domain(format!(
                "root tolerance {tol:e} not reachable; best |f| = {:e} at {x}",
                fx.abs()
            )));
        }
        x = mid;
    }
}

/// Which derivative a [`DiffSpec`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffMode {
    First,
    Second,
    /// Cross partial `d^2 f / dx dy` of a two-argument function.
    Mixed,
}

/// Step size and Richardson depth for a central-difference derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffSpec {
    step: f64,
    richardson_levels: u8,
    mode: DiffMode,
}

impl DiffSpec {
    pub const MAX_LEVELS: u8 = 3;

    pub fn new(step: f64, richardson_levels: u8, mode: DiffMode) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Domain(format!("difference step must be positive and finite, got {step}")));
        }
        if richardson_levels > Self::MAX_LEVELS {
            return Err(Error::Domain(format!(
                "at most {} Richardson levels supported, got {richardson_levels}",
                Self::MAX_LEVELS
            )));
        }
        Ok(Self { step, richardson_levels, mode })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn richardson_levels(&self) -> u8 {
        self.richardson_levels
    }

    pub fn mode(&self) -> DiffMode {
        self.mode
    }

    pub fn with_mode(self, mode: DiffMode) -> Self {
        Self { mode, ..self }
    }
}

/// A derivative estimate and, when Richardson levels were used, the
/// difference between the two most refined diagonal tableau entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: Option<f64>,
}

impl Estimate {
    /// `error / max(|value|, floor)`; zero when no error estimate exists.
    pub fn relative_error(&self, floor: f64) -> f64 {
        match self.error {
            Some(e) => e / self.value.abs().max(floor),
            None => 0.0,
        }
    }
}

// All stencils here have error expansions in even powers of the step.
fn richardson<D>(base: D, step: f64, levels: u8) -> Estimate
where
    D: Fn(f64) -> f64,
{
    let samples: Vec<f64> = (0..=levels).map(|k| base(step / f64::from(1u32 << k))).collect();
    richardson_table(&samples)
}

/// Richardson extrapolation of estimates at steps `h, h/2, h/4, ...` whose
/// error expands in even powers of the step.
pub(crate) fn richardson_table(samples: &[f64]) -> Estimate {
    let levels = samples.len() - 1;
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(levels + 1);
    for (k, &s) in samples.iter().enumerate() {
        let mut row = Vec::with_capacity(k + 1);
        row.push(s);
        let mut factor = 1.0;
        for j in 1..=k {
            factor *= 4.0;
            let prev = table[k - 1][j - 1];
            let cur = row[j - 1];
            row.push(cur + (cur - prev) / (factor - 1.0));
        }
        table.push(row);
    }
    let value = table[levels][levels];
    let error = (levels > 0).then(|| (value - table[levels - 1][levels - 1]).abs());
    Estimate { value, error }
}

/// First or second derivative of `f` at `x` by central differences.
pub fn central_diff<F>(f: F, x: f64, spec: &DiffSpec) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    let est = match spec.mode {
        DiffMode::First => richardson(|h| (f(x + h) - f(x - h)) / (2.0 * h), spec.step, spec.richardson_levels),
        DiffMode::Second => {
            let f0 = f(x);
            richardson(|h| (f(x + h) - 2.0 * f0 + f(x - h)) / (h * h), spec.step, spec.richardson_levels)
        }
        DiffMode::Mixed => {
            return Err(Error::Domain("mixed partials need a two-argument function; use mixed_diff".into()))
        }
    };
    Ok(est)
}

/// Cross partial `d^2 f / dx dy` from the four-point cross stencil.
pub fn mixed_diff<F>(f: F, x: f64, y: f64, spec: &DiffSpec) -> Result<Estimate>
where
    F: Fn(f64, f64) -> f64,
{
    if spec.mode != DiffMode::Mixed {
        return Err(Error::Domain(format!("mixed_diff called with mode {:?}", spec.mode)));
    }
    Ok(richardson(
        |h| (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4.0 * h * h),
        spec.step,
        spec.richardson_levels,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    #[test]
    fn logsumexp_examples() {
        assert!((logsumexp(&[0.0, 0.0]).unwrap() - LN_2).abs() < 1e-15);
        let v = logsumexp(&[-1000.0, -1000.0]).unwrap();
        assert!((v - (-1000.0 + LN_2)).abs() < 1e-12);
        for x in [-1e300, -3.5, 0.0, 17.25, 1e300] {
            assert_eq!(logsumexp(&[x]).unwrap(), x);
        }
    }

    #[test]
    fn logsumexp_edge_cases() {
        assert!(matches!(logsumexp(&[]), Err(Error::Domain(_))));
        assert_eq!(logsumexp(&[f64::NEG_INFINITY, f64::NEG_INFINITY]).unwrap(), f64::NEG_INFINITY);
        assert_eq!(logsumexp(&[f64::NEG_INFINITY, 2.0]).unwrap(), 2.0);
    }

    #[test]
    fn root_examples() {
        // reference from an independent bisection (scipy brentq, xtol 1e-16)
        let r = find_root(|r| (2.0 * r).tanh() - r, 0.5, 0.999, 1e-14).unwrap();
        assert!((r - 0.957_504_024_077_268_9).abs() < 1e-12);

        let r = find_root(|x| x - 0.5, 0.0, 1.0, 1e-15).unwrap();
        assert!((r - 0.5).abs() < 1e-15);

        let r = find_root(|x| x * x - 2.0, 1.0, 2.0, 1e-14).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn root_requires_sign_change() {
        let err = find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(err, Error::Bracket { .. }));
    }

    #[test]
    fn root_accepts_reversed_bracket() {
        let r = find_root(|x| x.cos(), 3.0, 0.0, 1e-14).unwrap();
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-13);
    }

    #[test]
    fn derivative_examples() {
        let second = DiffSpec::new(1e-2, 1, DiffMode::Second).unwrap();
        let d = central_diff(f64::cosh, 1.0, &second).unwrap();
        assert!((d.value - 1f64.cosh()).abs() < 1e-8, "{d:?}");

        let first = DiffSpec::new(1e-2, 1, DiffMode::First).unwrap();
        let d = central_diff(f64::exp, 0.0, &first).unwrap();
        assert!((d.value - 1.0).abs() < 1e-10, "{d:?}");

        let mixed = DiffSpec::new(1e-1, 1, DiffMode::Mixed).unwrap();
        for (x, y) in [(0.3, -2.0), (5.0, 7.5), (-1.0, 0.0)] {
            let d = mixed_diff(|b, h| b * h, x, y, &mixed).unwrap();
            assert!((d.value - 1.0).abs() < 1e-9, "{d:?}");
        }
    }

    #[test]
    fn diffspec_validation() {
        assert!(DiffSpec::new(0.0, 1, DiffMode::First).is_err());
        assert!(DiffSpec::new(f64::NAN, 1, DiffMode::First).is_err());
        assert!(DiffSpec::new(1e-3, 4, DiffMode::First).is_err());
        let mixed = DiffSpec::new(1e-3, 1, DiffMode::Mixed).unwrap();
        assert!(central_diff(f64::exp, 0.0, &mixed).is_err());
        assert!(mixed_diff(|x, y| x * y, 0.0, 0.0, &mixed.with_mode(DiffMode::First)).is_err());
    }

    #[test]
    fn richardson_error_estimate_shrinks_with_step() {
        let coarse = DiffSpec::new(0.1, 1, DiffMode::Second).unwrap();
        let fine = DiffSpec::new(0.01, 1, DiffMode::Second).unwrap();
        let ec = central_diff(f64::exp, 0.5, &coarse).unwrap().error.unwrap();
        let ef = central_diff(f64::exp, 0.5, &fine).unwrap().error.unwrap();
        assert!(ef < ec / 50.0);
        let plain = DiffSpec::new(0.01, 0, DiffMode::Second).unwrap();
        assert!(central_diff(f64::exp, 0.5, &plain).unwrap().error.is_none());
    }

    #[test]
    fn helpers_match_naive_forms() {
        for x in [-3.0, -0.2, 0.0, 0.7, 4.0] {
            assert!((ln_2cosh(x) - (2.0 * f64::cosh(x)).ln()).abs() < 1e-14);
            assert!((sech2(x) - 1.0 / f64::cosh(x).powi(2)).abs() < 1e-15);
        }
        assert!((ln_2cosh(1000.0) - 1000.0).abs() < 1e-12);
        assert!(sech2(300.0) > 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn kernels_match_analytic_derivatives(x in -2.0f64..2.0) {
            let first = DiffSpec::new(1e-2, 1, DiffMode::First).unwrap();
            let second = first.with_mode(DiffMode::Second);
            let ln2cosh = |t: f64| (2.0 * t.cosh()).ln();
            type Case<'a> = (&'a dyn Fn(f64) -> f64, f64, f64);
            let cases: [Case; 3] = [
                (&f64::cosh, x.sinh(), x.cosh()),
                (&f64::exp, x.exp(), x.exp()),
                (&ln2cosh, x.tanh(), 1.0 - x.tanh().powi(2)),
            ];
            for (f, d1, d2) in cases {
                let a = central_diff(f, x, &first).unwrap().value;
                let b = central_diff(f, x, &second).unwrap().value;
                prop_assert!((a - d1).abs() < 1e-7);
                prop_assert!((b - d2).abs() < 1e-7);
            }
            let mixed = DiffSpec::new(1e-2, 1, DiffMode::Mixed).unwrap();
            let m = mixed_diff(|u, v| (u * v).exp(), x, 0.5, &mixed).unwrap().value;
            let exact = (x * 0.5).exp() * (1.0 + x * 0.5);
            prop_assert!((m - exact).abs() < 1e-7);
        }

        #[test]
        fn root_invariant_under_bracket_widening(lo in 0.0f64..1.0, hi in 2.0f64..10.0) {
            let base = find_root(|x| x * x - 2.0, 1.0, 2.0, 1e-14).unwrap();
            let wide = find_root(|x| x * x - 2.0, lo, hi, 1e-14).unwrap();
            prop_assert!((base - wide).abs() < 1e-14);
        }
    }
}
