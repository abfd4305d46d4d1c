//! 512-bit arithmetic helpers shared by the multiprecision paths.

use crate::error::{Error, Result};
use astro_float::{BigFloat, Consts, RoundingMode};

pub(crate) const PREC: usize = 512;
const RM: RoundingMode = RoundingMode::ToEven;

pub(crate) struct Ctx {
    cc: Consts,
}

impl Ctx {
    pub(crate) fn new() -> Result<Self> {
        Consts::new()
            .map(|cc| Self { cc })
            .map_err(|e| Error::Resource(format!("multiprecision constants: {e:?}")))
    }

    pub(crate) fn exp(&mut self, x: &BigFloat) -> BigFloat {
        x.exp(PREC, RM, &mut self.cc)
    }

    pub(crate) fn ln(&mut self, x: &BigFloat) -> BigFloat {
        x.ln(PREC, RM, &mut self.cc)
    }

    pub(crate) fn tanh(&mut self, x: &BigFloat) -> BigFloat {
        x.tanh(PREC, RM, &mut self.cc)
    }

    /// `ln(2 cosh x)` for `x >= 0`, as `x + ln(1 + e^{-2x})`.
    pub(crate) fn ln_2cosh(&mut self, x: &BigFloat) -> BigFloat {
        let e = self.exp(&mul(&int(-2), x));
        add(x, &self.ln(&add(&int(1), &e)))
    }
}

pub(crate) fn f(x: f64) -> BigFloat {
    BigFloat::from_f64(x, PREC)
}

pub(crate) fn int(x: i64) -> BigFloat {
    BigFloat::from_i64(x, PREC)
}

pub(crate) fn add(a: &BigFloat, b: &BigFloat) -> BigFloat {
    a.add(b, PREC, RM)
}

pub(crate) fn sub(a: &BigFloat, b: &BigFloat) -> BigFloat {
    a.sub(b, PREC, RM)
}

pub(crate) fn mul(a: &BigFloat, b: &BigFloat) -> BigFloat {
    a.mul(b, PREC, RM)
}

pub(crate) fn div(a: &BigFloat, b: &BigFloat) -> BigFloat {
    a.div(b, PREC, RM)
}

pub(crate) fn to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    format!("{x}").parse().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversion_roundtrips() {
        for x in [0.0, 1.0, -2.5e-30, 6.02e23, 0.1] {
            assert_eq!(to_f64(&f(x)), x);
        }
    }

    #[test]
    fn ln_2cosh_matches_double() {
        let mut ctx = Ctx::new().unwrap();
        for x in [0.0, 0.4, 3.0, 40.0] {
            let got = to_f64(&ctx.ln_2cosh(&f(x)));
            assert!((got - crate::numerics::ln_2cosh(x)).abs() < 1e-14 * got.max(1.0));
        }
    }
}
