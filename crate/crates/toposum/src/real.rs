//! Arbitrary-precision real numbers used for every inexact result.
//!
//! `Real` wraps an astro-float `BigFloat` together with the working precision
//! in bits. All arithmetic rounds to nearest-even at the larger precision of
//! the two operands; conversions from `Int` are exact and conversions from
//! `Rat` are correctly rounded. The default precision everywhere in the crate
//! is [`DEFAULT_PREC`] bits.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};

use crate::error::{Error, Result};
use crate::num::{Int, Rat};

/// Working precision, in bits, used when a caller does not choose one.
pub const DEFAULT_PREC: usize = 128;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> =
        RefCell::new(Consts::new().expect("constants cache allocation"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Euler's constant to 116 decimal digits, enough for 380-bit precision.
const EULER_GAMMA_DEC: &str = "5.7721566490153286060651209008240243104215933593992359880576723488486772677766467093694706329174674951463144724980708e-1";

#[derive(Clone, Debug)]
pub struct Real {
    f: BigFloat,
    prec: usize,
}

impl Real {
    fn wrap(f: BigFloat, prec: usize) -> Self {
        Real { f, prec }
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn zero(prec: usize) -> Self {
        Real::wrap(BigFloat::from_i64(0, prec), prec)
    }

    pub fn from_i64(n: i64, prec: usize) -> Self {
        Real::wrap(BigFloat::from_i64(n, prec), prec)
    }

    pub fn from_f64(x: f64, prec: usize) -> Self {
        Real::wrap(BigFloat::from_f64(x, prec), prec)
    }

    /// Exact conversion. The result keeps every bit of `n` even past `prec`;
    /// later arithmetic rounds at `prec` as usual.
    pub fn from_int(n: &Int, prec: usize) -> Self {
        let (sign, digits) = n.to_u64_digits();
        if digits.is_empty() {
            return Real::zero(prec);
        }
        let s = match sign {
            num_bigint::Sign::Minus => Sign::Neg,
            _ => Sign::Pos,
        };
        let e = (digits.len() * 64) as i32;
        let f = BigFloat::from_words(&digits, s, e);
        Real::wrap(f, prec)
    }

    /// Correctly rounded conversion of an exact rational.
    pub fn from_rat(r: &Rat, prec: usize) -> Self {
        let num = Real::from_int(r.numer(), prec);
        let den = Real::from_int(r.denom(), prec);
        Real::wrap(num.f.div(&den.f, prec, RM), prec)
    }

    /// Parses a decimal literal such as `"2.5"` or `"3.1e-4"`.
    pub fn parse_dec(s: &str, prec: usize) -> Result<Self> {
        let f = with_consts(|cc| BigFloat::parse(s, Radix::Dec, prec, RM, cc));
        if f.is_nan() {
            return Err(Error::InvalidInput(format!("not a decimal number: {s:?}")));
        }
        Ok(Real::wrap(f, prec))
    }

    pub fn pi(prec: usize) -> Self {
        Real::wrap(with_consts(|cc| cc.pi(prec, RM)), prec)
    }

    pub fn euler_gamma(prec: usize) -> Result<Self> {
        if prec > 380 {
            return Err(Error::InvalidInput(format!(
                "euler_gamma constant stores 116 digits, insufficient for {prec} bits"
            )));
        }
        Real::parse_dec(EULER_GAMMA_DEC, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.f.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.f.is_nan() && !self.f.is_inf()
    }

    /// -1, 0, or 1.
    pub fn signum(&self) -> i32 {
        if self.f.is_zero() {
            0
        } else if self.f.is_negative() {
            -1
        } else {
            1
        }
    }

    pub fn abs(&self) -> Self {
        Real::wrap(self.f.abs(), self.prec)
    }

    pub fn recip(&self) -> Self {
        Real::from_i64(1, self.prec) / self
    }

    pub fn sqrt(&self) -> Self {
        Real::wrap(self.f.sqrt(self.prec, RM), self.prec)
    }

    pub fn exp(&self) -> Self {
        Real::wrap(with_consts(|cc| self.f.exp(self.prec, RM, cc)), self.prec)
    }

    pub fn ln(&self) -> Self {
        Real::wrap(with_consts(|cc| self.f.ln(self.prec, RM, cc)), self.prec)
    }

    pub fn sin(&self) -> Self {
        Real::wrap(with_consts(|cc| self.f.sin(self.prec, RM, cc)), self.prec)
    }

    pub fn cos(&self) -> Self {
        Real::wrap(with_consts(|cc| self.f.cos(self.prec, RM, cc)), self.prec)
    }

    pub fn sinh(&self) -> Self {
        Real::wrap(with_consts(|cc| self.f.sinh(self.prec, RM, cc)), self.prec)
    }

    pub fn cosh(&self) -> Self {
        Real::wrap(with_consts(|cc| self.f.cosh(self.prec, RM, cc)), self.prec)
    }

    pub fn tanh(&self) -> Self {
        Real::wrap(with_consts(|cc| self.f.tanh(self.prec, RM, cc)), self.prec)
    }

    pub fn asin(&self) -> Self {
        Real::wrap(with_consts(|cc| self.f.asin(self.prec, RM, cc)), self.prec)
    }

    pub fn atan(&self) -> Self {
        Real::wrap(with_consts(|cc| self.f.atan(self.prec, RM, cc)), self.prec)
    }

    pub fn asinh(&self) -> Self {
        Real::wrap(with_consts(|cc| self.f.asinh(self.prec, RM, cc)), self.prec)
    }

    pub fn atanh(&self) -> Self {
        Real::wrap(with_consts(|cc| self.f.atanh(self.prec, RM, cc)), self.prec)
    }

    /// Rounds to `prec` bits, discarding any extra exact bits carried along.
    pub fn rounded(&self, prec: usize) -> Self {
        let mut f = self.f.clone();
        f.set_precision(prec, RM).expect("set_precision");
        Real::wrap(f, prec)
    }

    /// Nearest f64, for control-flow decisions only.
    pub fn to_f64(&self) -> f64 {
        if self.f.is_zero() {
            return 0.0;
        }
        let mut f = self.f.clone();
        if f.set_precision(64, RM).is_err() {
            return f64::NAN;
        }
        let s = with_consts(|cc| f.format(Radix::Dec, RM, cc)).unwrap_or_default();
        s.parse::<f64>().unwrap_or(f64::NAN)
    }

    /// Decimal string carrying the full stored precision.
    pub fn to_decimal_string(&self) -> String {
        with_consts(|cc| self.f.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "nan".into())
    }

    /// `2^e` as a crude magnitude floor/ceiling helper for error bounds.
    pub fn pow2(e: i32, prec: usize) -> Self {
        let mut f = BigFloat::from_i64(1, prec);
        f.set_exponent(1 + e);
        Real::wrap(f, prec)
    }

    fn bin(&self, rhs: &Real, op: fn(&BigFloat, &BigFloat, usize, RoundingMode) -> BigFloat) -> Real {
        let p = self.prec.max(rhs.prec);
        Real::wrap(op(&self.f, &rhs.f, p, RM), p)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.write_str(&self.to_decimal_string())
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let d = self.f.cmp(&other.f)?;
        Some(d.cmp(&0))
    }
}

macro_rules! real_binop {
    ($trait:ident, $method:ident, $bf:ident) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                self.bin(rhs, |a, b, p, rm| a.$bf(b, p, rm))
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

real_binop!(Add, add, add);
real_binop!(Sub, sub, sub);
real_binop!(Mul, mul, mul);
real_binop!(Div, div, div);

impl AddAssign<&Real> for Real {
    fn add_assign(&mut self, rhs: &Real) {
        *self = &*self + rhs;
    }
}

impl AddAssign<Real> for Real {
    fn add_assign(&mut self, rhs: Real) {
        *self += &rhs;
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::wrap(self.f.clone().neg(), self.prec)
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        -&self
    }
}

/// Folds `x` into `(-period/2, period/2]` by subtracting whole periods.
/// Only a few periods of drift are expected; the loop is bounded.
pub fn fold_mod(x: &Real, period: &Real) -> Real {
    let half = period / Real::from_i64(2, period.prec());
    let mut y = x.clone();
    for _ in 0..16 {
        if y > half {
            y = y - period;
        } else if y <= -&half {
            y = y + period;
        } else {
            break;
        }
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, rat};

    fn close(a: &Real, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol
    }

    #[test]
    fn int_conversion_is_exact() {
        let n = Int::from(u64::MAX) * int(12345) + int(678);
        let x = Real::from_int(&n, 128);
        let back = x.to_decimal_string();
        assert!(back.starts_with("2.27725055589944414687853"), "{back}");
        let diff = &x - &Real::from_int(&(n.clone() - int(1)), 128);
        assert_eq!(diff.to_f64(), 1.0);
    }

    #[test]
    fn rat_conversion_rounds_to_nearest() {
        let x = Real::from_rat(&rat(1, 3), 128);
        assert!(close(&x, 1.0 / 3.0, 1e-15));
        let three = Real::from_i64(3, 128);
        let err = (&x * &three - Real::from_i64(1, 128)).abs();
        assert!(err < Real::pow2(-126, 128), "residual {err}");
    }

    #[test]
    fn pi_and_trig_agree() {
        let pi = Real::pi(128);
        assert!(close(&pi, std::f64::consts::PI, 1e-15));
        let half = Real::from_rat(&rat(1, 2), 128);
        let x = half.atanh();
        assert!(close(&x, 0.549306144334054846, 1e-15));
    }

    #[test]
    fn gamma_constant_parses() {
        let g = Real::euler_gamma(256).unwrap();
        assert!(close(&g, 0.5772156649015329, 1e-15));
        assert!(Real::euler_gamma(512).is_err());
    }

    #[test]
    fn fold_wraps_into_half_open_interval() {
        let pi = Real::pi(128);
        let two_pi = &pi + &pi;
        let x = &two_pi + &Real::from_f64(0.25, 128);
        let folded = fold_mod(&x, &two_pi);
        assert!(close(&folded, 0.25, 1e-30));
        let y = fold_mod(&two_pi, &two_pi);
        assert!(y.abs() < Real::pow2(-100, 128));
    }

    #[test]
    fn pow2_sets_magnitude() {
        assert_eq!(Real::pow2(-3, 64).to_f64(), 0.125);
        assert_eq!(Real::pow2(10, 64).to_f64(), 1024.0);
    }
}
