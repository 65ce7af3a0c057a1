//! Scalar abstraction shared by the linear algebra, the Parry measure and the
//! biased golden-ratio chain.
//!
//! The exact pipeline runs on [`Rational`]; `f64`/`f32` instances exist for
//! quick numeric sweeps (plot curves, sanity checks) and use a relative
//! tolerance in place of an exact zero test.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational numbers.
pub type Rational = BigRational;

pub trait Scalar: Clone + Debug + PartialOrd + Num + Neg<Output = Self> + Send + Sync {
    /// `num / den`; `den` must be nonzero.
    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_rational(r: &Rational) -> Self;

    fn to_f64(&self) -> f64;

    /// Zero test used for pivoting and invariant checks. Exact types compare
    /// with zero; floating types compare against a small tolerance.
    fn is_negligible(&self) -> bool;

    /// True for types whose arithmetic is exact.
    const EXACT: bool;

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_negligible()
    }

    fn powi(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for Rational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    const EXACT: bool = true;

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn powi(&self, exp: u32) -> Self {
        num_traits::pow(self.clone(), exp as usize)
    }
}

macro_rules! impl_float_scalar {
    ($t:ty, $tol:expr) => {
        impl Scalar for $t {
            fn from_ratio(num: i64, den: i64) -> Self {
                (num as f64 / den as f64) as $t
            }

            fn from_rational(r: &Rational) -> Self {
                rational_to_f64(r) as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn is_negligible(&self) -> bool {
                self.abs() <= $tol
            }

            const EXACT: bool = false;

            fn powi(&self, exp: u32) -> Self {
                <$t>::powi(*self, exp as i32)
            }
        }
    };
}

impl_float_scalar!(f64, 1e-12);
impl_float_scalar!(f32, 1e-5);

/// Nearest-ish `f64` for a big rational, robust to huge numerators and
/// denominators.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = 60 - (nb - db);
    let scaled = if shift >= 0 {
        (r.numer() << shift as usize) / r.denom()
    } else {
        r.numer() / (r.denom() << (-shift) as usize)
    };
    scaled.to_f64().unwrap_or(0.0) * 2f64.powi(-shift as i32)
}

/// Rational from a decimal or fraction literal such as `7/10`, `0.7`, `-3`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int_abs = int.trim_start_matches(['-', '+']);
        let int_part: BigInt = if int_abs.is_empty() { BigInt::zero() } else { int_abs.parse().ok()? };
        if !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let frac_part: BigInt = if frac.is_empty() { BigInt::zero() } else { frac.parse().ok()? };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mag = BigRational::new(int_part * &scale + frac_part, scale);
        return Some(if neg { -mag } else { mag });
    }
    let n: BigInt = s.parse().ok()?;
    Some(BigRational::from_integer(n))
}

/// `num/den` string, or a bare integer when the denominator is one.
pub fn rational_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal with `sig` significant digits.
pub fn decimal_string(x: f64, sig: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i64;
    if !(-5..=20).contains(&mag) {
        return format!("{:.*e}", sig.max(1) - 1, x);
    }
    let decimals = (sig as i64 - 1 - mag).max(0) as usize;
    format!("{:.*}", decimals, x)
}

/// Exact rational rounded to `sig` significant decimal digits.
pub fn rational_decimal(r: &Rational, sig: usize) -> String {
    if r.is_zero() {
        return "0".into();
    }
    let sig = sig.max(1) as i64;
    let mag = ln_abs(r) / std::f64::consts::LN_10;
    let mut mag = mag.floor() as i64;
    // Correct the estimate against the exact value.
    let ten = BigInt::from(10);
    let pow10 = |k: i64| -> Rational {
        if k >= 0 {
            BigRational::from_integer(num_traits::pow(ten.clone(), k as usize))
        } else {
            BigRational::new(BigInt::one(), num_traits::pow(ten.clone(), (-k) as usize))
        }
    };
    let a = r.abs();
    while a >= pow10(mag + 1) {
        mag += 1;
    }
    while a < pow10(mag) {
        mag -= 1;
    }
    let mut places = sig - 1 - mag;
    let mut n = (r * pow10(places)).round().to_integer();
    if n.abs() >= num_traits::pow(ten.clone(), sig as usize) {
        places -= 1;
        n = (r * pow10(places)).round().to_integer();
    }
    if places <= 0 {
        return (n * num_traits::pow(ten, (-places) as usize)).to_string();
    }
    let neg = n.is_negative();
    let digits = n.abs().to_string();
    let places = places as usize;
    let padded = if digits.len() <= places { format!("{}{}", "0".repeat(places + 1 - digits.len()), digits) } else { digits };
    let (int, frac) = padded.split_at(padded.len() - places);
    format!("{}{int}.{frac}", if neg { "-" } else { "" })
}

fn ln_abs(r: &Rational) -> f64 {
    let shift = |n: &BigInt| -> f64 {
        let b = n.bits() as i64;
        let s = (b - 60).max(0);
        (n.abs() >> s as usize).to_f64().unwrap_or(1.0).ln() + s as f64 * std::f64::consts::LN_2
    };
    shift(r.numer()) - shift(r.denom())
}
