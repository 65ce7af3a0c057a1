//! Exact arithmetic in Q(β) for β the positive root of
//! `x^n - a_1 x^{n-1} - ... - a_n`.
//!
//! Elements are kept in canonical form modulo the minimal polynomial of β, so
//! equality and hashing are structural. Signs are decided by evaluating the
//! representative on a dyadic enclosure of β that is refined on demand and
//! cached inside the field.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{self, IntPoly};
use crate::scalar::{decimal_string, Rational};

/// Finest β enclosure kept in the cache, in bits.
const MAX_PRECISION_BITS: u64 = 1 << 22;
/// Precision of the stored `beta_interval` (width 2^-64 < 1e-12 β).
const INTERVAL_BITS: u64 = 64;
/// Zero threshold (in bits) used when the minimal polynomial is unknown.
const APPROX_ZERO_BITS: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn from_ordering(o: Ordering) -> Self {
        match o {
            Ordering::Less => Sign::Negative,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Positive,
        }
    }

    pub fn to_ordering(self) -> Ordering {
        match self {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        }
    }
}

struct FieldInner {
    digits: Vec<u32>,
    poly: IntPoly,
    modulus: IntPoly,
    exact: bool,
    floor: u32,
    approx: f64,
    beta_interval: (BigInt, u64),
    finest: Mutex<(BigInt, u64)>,
}

/// The number field Q(β) together with an isolating enclosure of β.
#[derive(Clone)]
pub struct BetaField(Arc<FieldInner>);

impl fmt::Debug for BetaField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BetaField")
            .field("digits", &self.0.digits)
            .field("beta", &self.0.approx)
            .field("exact", &self.0.exact)
            .finish()
    }
}

impl PartialEq for BetaField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.digits == other.0.digits
    }
}

impl Eq for BetaField {}

/// Builds Q(β) from the digits `a_1, ..., a_n` of `1 = a_1/β + ... + a_n/β^n`.
///
/// Whether the digits really are the greedy expansion of 1 is checked
/// separately by [`crate::beta_maps::validate_greedy_expansion_of_one`].
pub fn field_from_digits(digits: &[u32]) -> Result<BetaField> {
    if digits.len() < 2 || digits.contains(&0) {
        return Err(Error::RejectedDigits(digits.to_vec()));
    }
    let n = digits.len();
    let mut p: IntPoly = vec![BigInt::zero(); n + 1];
    p[n] = BigInt::one();
    for (j, &a) in digits.iter().enumerate() {
        // a_{j+1} multiplies x^{n-j-1}
        p[n - j - 1] = -BigInt::from(a);
    }
    // One sign change, so exactly one positive root (Descartes); β is simple.
    debug_assert_eq!(poly::sign_changes(&p), 1);
    if poly::sign_changes(&p) != 1 {
        return Err(Error::RejectedDigits(digits.to_vec()));
    }
    // Integer bracket: p(k) <= 0 < p(k+1).
    let mut k = BigInt::one();
    while poly::sign_at_dyadic(&p, &(&k + 1), 0) != Ordering::Greater {
        k += 1;
    }
    let m = poly::refine_root(&p, &k, 0, INTERVAL_BITS);
    let approx = dyadic_to_f64(&m, INTERVAL_BITS);
    let floor = floor_from_enclosure(&p, &m, INTERVAL_BITS);

    let (modulus, exact) = match poly::factor_containing(&p, approx) {
        Some(f) => (f, true),
        None => (p.clone(), false),
    };
    Ok(BetaField(Arc::new(FieldInner {
        digits: digits.to_vec(),
        poly: p,
        modulus,
        exact,
        floor,
        approx,
        beta_interval: (m.clone(), INTERVAL_BITS),
        finest: Mutex::new((m, INTERVAL_BITS)),
    })))
}

fn floor_from_enclosure(p: &[BigInt], m: &BigInt, e: u64) -> u32 {
    // β in [m/2^e, (m+1)/2^e]; if an integer lies inside, decide exactly.
    let lo = m >> (e as usize);
    let candidate = &lo + 1;
    let scaled = &candidate << (e as usize);
    if scaled <= m + 1 && poly::sign_at_dyadic(p, &candidate, 0) != Ordering::Greater {
        // p(candidate) <= 0 means β >= candidate
        return candidate.to_u32().unwrap_or(u32::MAX);
    }
    lo.to_u32().unwrap_or(u32::MAX)
}

impl BetaField {
    pub fn digits(&self) -> &[u32] {
        &self.0.digits
    }

    /// `x^n - a_1 x^{n-1} - ... - a_n`, ascending coefficients.
    pub fn poly(&self) -> &[BigInt] {
        &self.0.poly
    }

    /// Irreducible factor of [`Self::poly`] vanishing at β (equal to `poly`
    /// in approximate mode).
    pub fn min_poly(&self) -> &[BigInt] {
        &self.0.modulus
    }

    /// False when factorisation failed and zero tests fall back to a
    /// 2^-256 interval threshold.
    pub fn is_exact(&self) -> bool {
        self.0.exact
    }

    pub fn degree(&self) -> usize {
        self.0.digits.len()
    }

    /// Degree of Q(β) over Q (the length of element representatives).
    pub fn ext_degree(&self) -> usize {
        poly::degree(&self.0.modulus)
    }

    /// ⌊β⌋
    pub fn floor(&self) -> u32 {
        self.0.floor
    }

    /// ⌈β⌉ = ⌊β⌋ + 1 for non-integer β.
    pub fn ceil(&self) -> u32 {
        self.0.floor + 1
    }

    pub fn approx(&self) -> f64 {
        self.0.approx
    }

    pub fn ln_beta(&self) -> f64 {
        self.0.approx.ln()
    }

    /// Rational isolating interval of β of width 2^-64.
    pub fn beta_interval(&self) -> (Rational, Rational) {
        let (m, e) = &self.0.beta_interval;
        let den = BigInt::one() << (*e as usize);
        (
            BigRational::new(m.clone(), den.clone()),
            BigRational::new(m + 1, den),
        )
    }

    pub fn is_golden(&self) -> bool {
        self.0.digits == [1, 1]
    }

    /// `m` with β ∈ [m/2^e, (m+1)/2^e].
    fn enclosure(&self, e: u64) -> Result<BigInt> {
        if e > MAX_PRECISION_BITS {
            return Err(Error::PrecisionExhausted { bits: e });
        }
        let mut guard = self.0.finest.lock().expect("enclosure cache poisoned");
        if guard.1 < e {
            let target = e.max(2 * guard.1);
            let m = poly::refine_root(&self.0.poly, &guard.0, guard.1, target);
            *guard = (m, target);
        }
        Ok(&guard.0 >> ((guard.1 - e) as usize))
    }

    fn same(&self, other: &BetaField) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.digits == other.0.digits
    }

    pub fn zero(&self) -> FieldElt {
        FieldElt::from_int(self, 0)
    }

    pub fn one(&self) -> FieldElt {
        FieldElt::from_int(self, 1)
    }

    pub fn beta(&self) -> FieldElt {
        FieldElt::from_coeffs(self, &[Rational::zero(), Rational::one()])
    }

    pub fn int(&self, k: i64) -> FieldElt {
        FieldElt::from_int(self, k)
    }

    pub fn rational(&self, r: &Rational) -> FieldElt {
        FieldElt::from_rational(self, r)
    }
}

/// An element of Q(β): `(num_0 + num_1 β + ... ) / den` in canonical form.
#[derive(Clone)]
pub struct FieldElt {
    num: Vec<BigInt>,
    den: BigInt,
    field: BetaField,
}

impl PartialEq for FieldElt {
    fn eq(&self, other: &Self) -> bool {
        self.field.same(&other.field) && self.den == other.den && self.num == other.num
    }
}

impl Eq for FieldElt {}

impl Hash for FieldElt {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl fmt::Debug for FieldElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElt(")?;
        for (i, c) in self.coeffs().iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})b^{}", c, i)?;
        }
        write!(f, " ≈ {})", self.to_f64())
    }
}

impl fmt::Display for FieldElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", decimal_string(self.to_f64(), 12))
    }
}

impl FieldElt {
    pub fn field(&self) -> &BetaField {
        &self.field
    }

    pub fn from_int(field: &BetaField, k: i64) -> FieldElt {
        FieldElt::from_rational(field, &Rational::from_integer(BigInt::from(k)))
    }

    pub fn from_rational(field: &BetaField, r: &Rational) -> FieldElt {
        FieldElt::from_coeffs(field, std::slice::from_ref(r))
    }

    /// `sum coeffs[i] β^i`, reduced modulo the minimal polynomial.
    pub fn from_coeffs(field: &BetaField, coeffs: &[Rational]) -> FieldElt {
        let den = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num: Vec<BigInt> = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        FieldElt::from_parts(field, num, den)
    }

    fn from_parts(field: &BetaField, num: Vec<BigInt>, den: BigInt) -> FieldElt {
        let d = field.ext_degree();
        let reduced = if num.len() > d {
            let (_, r) = poly::div_rem_monic(&num, &field.0.modulus);
            r
        } else {
            num
        };
        let mut num = reduced;
        num.resize(d, BigInt::zero());
        let mut e = FieldElt { num, den, field: field.clone() };
        e.normalize();
        e
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -self.den.clone();
            for c in self.num.iter_mut() {
                *c = -c.clone();
            }
        }
        if self.num.iter().all(|c| c.is_zero()) {
            self.den = BigInt::one();
            return;
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_one() {
            self.den /= &g;
            for c in self.num.iter_mut() {
                *c /= &g;
            }
        }
    }

    /// Rational coefficients in the power basis `1, β, β^2, ...`.
    pub fn coeffs(&self) -> Vec<Rational> {
        self.num.iter().map(|c| BigRational::new(c.clone(), self.den.clone())).collect()
    }

    pub fn is_structurally_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    /// The value is a rational number (all higher coefficients vanish).
    pub fn as_rational(&self) -> Option<Rational> {
        if self.num.iter().skip(1).all(|c| c.is_zero()) {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    fn check(&self, other: &FieldElt) -> Result<()> {
        if self.field.same(&other.field) {
            Ok(())
        } else {
            Err(Error::MixedFields)
        }
    }

    pub fn checked_add(&self, other: &FieldElt) -> Result<FieldElt> {
        self.check(other)?;
        Ok(self.add_unchecked(other, false))
    }

    pub fn checked_sub(&self, other: &FieldElt) -> Result<FieldElt> {
        self.check(other)?;
        Ok(self.add_unchecked(other, true))
    }

    pub fn checked_mul(&self, other: &FieldElt) -> Result<FieldElt> {
        self.check(other)?;
        let prod = poly::mul(&self.num, &other.num);
        Ok(FieldElt::from_parts(&self.field, prod, &self.den * &other.den))
    }

    fn add_unchecked(&self, other: &FieldElt, negate: bool) -> FieldElt {
        let (num, den) = if self.den == other.den {
            let num = self
                .num
                .iter()
                .zip(&other.num)
                .map(|(a, b)| if negate { a - b } else { a + b })
                .collect();
            (num, self.den.clone())
        } else {
            let num = self
                .num
                .iter()
                .zip(&other.num)
                .map(|(a, b)| {
                    let l = a * &other.den;
                    let r = b * &self.den;
                    if negate {
                        l - r
                    } else {
                        l + r
                    }
                })
                .collect();
            (num, &self.den * &other.den)
        };
        let mut e = FieldElt { num, den, field: self.field.clone() };
        e.normalize();
        e
    }

    pub fn scale_int(&self, k: i64) -> FieldElt {
        let k = BigInt::from(k);
        let mut e = FieldElt {
            num: self.num.iter().map(|c| c * &k).collect(),
            den: self.den.clone(),
            field: self.field.clone(),
        };
        e.normalize();
        e
    }

    pub fn scale_rational(&self, r: &Rational) -> FieldElt {
        let mut e = FieldElt {
            num: self.num.iter().map(|c| c * r.numer()).collect(),
            den: &self.den * r.denom(),
            field: self.field.clone(),
        };
        e.normalize();
        e
    }

    pub fn neg(&self) -> FieldElt {
        FieldElt {
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
            field: self.field.clone(),
        }
    }

    /// `self + k` for an integer `k`.
    pub fn add_int(&self, k: i64) -> FieldElt {
        let mut num = self.num.clone();
        num[0] += &self.den * BigInt::from(k);
        let mut e = FieldElt { num, den: self.den.clone(), field: self.field.clone() };
        e.normalize();
        e
    }

    /// `β · self`, a shift followed by one reduction step.
    pub fn mul_beta(&self) -> FieldElt {
        let mut num = Vec::with_capacity(self.num.len() + 1);
        num.push(BigInt::zero());
        num.extend(self.num.iter().cloned());
        FieldElt::from_parts(&self.field, num, self.den.clone())
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in Q[x].
    pub fn inv(&self) -> Result<FieldElt> {
        if self.is_structurally_zero() {
            return Err(Error::NotInvertible("zero".into()));
        }
        let a: Vec<Rational> = self.coeffs();
        let m: Vec<Rational> =
            self.field.0.modulus.iter().map(|c| Rational::from_integer(c.clone())).collect();
        let (g, s) = ext_gcd(&a, &m);
        if g.len() != 1 || g[0].is_zero() {
            return Err(Error::NotInvertible("element shares a factor with the modulus".into()));
        }
        let inv_g = Rational::one() / &g[0];
        let s: Vec<Rational> = s.iter().map(|c| c * &inv_g).collect();
        Ok(FieldElt::from_coeffs(&self.field, &s))
    }

    pub fn checked_div(&self, other: &FieldElt) -> Result<FieldElt> {
        self.checked_mul(&other.inv()?)
    }

    fn max_bits(&self) -> u64 {
        self.num.iter().map(|c| c.bits()).max().unwrap_or(0)
    }

    /// Integer bounds `[lo, hi]` such that the value lies in
    /// `[lo, hi] / (den · 2^{e (d-1)})`.
    fn eval_bounds(&self, e: u64) -> Result<(BigInt, BigInt)> {
        let m = self.field.enclosure(e)?;
        let m1 = &m + 1;
        let d = self.num.len();
        let eu = e as usize;
        let horner = |m: &BigInt, positive: bool| -> BigInt {
            let mut acc = BigInt::zero();
            for i in (0..d).rev() {
                let c = &self.num[i];
                let term = if positive == c.is_positive() && !c.is_zero() { c.abs() } else { BigInt::zero() };
                acc = acc * m + (term << (eu * (d - 1 - i)));
            }
            acc
        };
        let pos_lo = horner(&m, true);
        let pos_hi = horner(&m1, true);
        let neg_lo = horner(&m, false);
        let neg_hi = horner(&m1, false);
        Ok((&pos_lo - &neg_hi, &pos_hi - &neg_lo))
    }

    fn scale_bits(&self, e: u64) -> u64 {
        e * (self.num.len() as u64 - 1)
    }

    /// Sign of the value at β.
    pub fn sign(&self) -> Result<Sign> {
        if self.is_structurally_zero() {
            return Ok(Sign::Zero);
        }
        if self.num.len() == 1 || self.num.iter().skip(1).all(|c| c.is_zero()) {
            return Ok(Sign::from_ordering(self.num[0].sign_cmp()));
        }
        let mut e = self.max_bits() + 64;
        loop {
            let (lo, hi) = self.eval_bounds(e)?;
            if lo.is_positive() {
                return Ok(Sign::Positive);
            }
            if hi.is_negative() {
                return Ok(Sign::Negative);
            }
            if !self.field.is_exact() && e >= self.max_bits() + APPROX_ZERO_BITS {
                // Interval of width < 2^-256 around zero.
                return Ok(Sign::Zero);
            }
            if e >= MAX_PRECISION_BITS {
                return Err(Error::PrecisionExhausted { bits: e });
            }
            e = (e * 2).min(MAX_PRECISION_BITS);
        }
    }

    pub fn is_zero(&self) -> Result<bool> {
        Ok(self.sign()? == Sign::Zero)
    }

    /// Exact comparison of the values at β.
    pub fn cmp_value(&self, other: &FieldElt) -> Result<Ordering> {
        Ok(self.checked_sub(other)?.sign()?.to_ordering())
    }

    /// Outward-rounded `f64` enclosure of the value.
    pub fn enclose(&self) -> Result<(f64, f64)> {
        if let Some(r) = self.as_rational() {
            return Ok((
                ratio_to_f64_dir(r.numer(), r.denom(), false),
                ratio_to_f64_dir(r.numer(), r.denom(), true),
            ));
        }
        self.enclose_with(64)
    }

    /// Outward `f64` enclosure with β known to `extra_bits` bits beyond the
    /// size of the coefficients; larger values give nested, narrower results.
    pub fn enclose_with(&self, extra_bits: u64) -> Result<(f64, f64)> {
        let e = self.max_bits() + extra_bits;
        let (lo, hi) = self.eval_bounds(e)?;
        let scale = &self.den << (self.scale_bits(e) as usize);
        Ok((ratio_to_f64_dir(&lo, &scale, false), ratio_to_f64_dir(&hi, &scale, true)))
    }

    /// Rational enclosure of the value; each extra bit roughly halves its width.
    pub fn enclose_rational(&self, extra_bits: u64) -> Result<(Rational, Rational)> {
        if let Some(r) = self.as_rational() {
            return Ok((r.clone(), r));
        }
        let e = self.max_bits() + extra_bits;
        let (lo, hi) = self.eval_bounds(e)?;
        let scale = &self.den << (self.scale_bits(e) as usize);
        Ok((BigRational::new(lo, scale.clone()), BigRational::new(hi, scale)))
    }

    /// Decimal string with `sig` significant digits. The last digit may be
    /// off by one when the value sits on a rounding boundary.
    pub fn to_decimal(&self, sig: usize) -> Result<String> {
        let bits = (sig as f64 * std::f64::consts::LOG2_10).ceil() as u64 + 24;
        let (lo, hi) = self.enclose_rational(bits)?;
        let mid = (lo + hi) / BigRational::from_integer(BigInt::from(2));
        Ok(crate::scalar::rational_decimal(&mid, sig))
    }

    pub fn to_f64(&self) -> f64 {
        match self.enclose() {
            Ok((lo, hi)) => 0.5 * (lo + hi),
            Err(_) => f64::NAN,
        }
    }
}

trait SignCmp {
    fn sign_cmp(&self) -> Ordering;
}

impl SignCmp for BigInt {
    fn sign_cmp(&self) -> Ordering {
        self.cmp(&BigInt::zero())
    }
}

fn dyadic_to_f64(m: &BigInt, e: u64) -> f64 {
    ratio_to_f64_dir(m, &(BigInt::one() << (e as usize)), false)
}

/// `n / d` rounded down (`up = false`) or up; `d > 0`.
pub(crate) fn ratio_to_f64_dir(n: &BigInt, d: &BigInt, up: bool) -> f64 {
    if n.is_zero() {
        return 0.0;
    }
    let neg = n.is_negative();
    let a = n.abs();
    let s: i64 = 52 - (a.bits() as i64 - d.bits() as i64);
    let (q, exact) = if s >= 0 {
        let (q, r) = (&a << (s as usize)).div_rem(d);
        (q, r.is_zero())
    } else {
        let (q, r) = a.div_rem(&(d << ((-s) as usize)));
        (q, r.is_zero())
    };
    let qf = q.to_f64().expect("53-bit quotient");
    // |n/d| in [q, q+1] * 2^-s
    let (mag_lo, mag_hi) = (qf, if exact { qf } else { qf + 1.0 });
    let scale = |x: f64| x * pow2(-s);
    if neg {
        if up {
            -scale(mag_lo)
        } else {
            -scale(mag_hi)
        }
    } else if up {
        scale(mag_hi)
    } else {
        scale(mag_lo)
    }
}

fn pow2(k: i64) -> f64 {
    let k = k.clamp(-1074, 1023) as i32;
    if k >= -1022 {
        2f64.powi(k)
    } else {
        2f64.powi(-1022) * 2f64.powi(k + 1022)
    }
}

/// Extended Euclid in Q[x]; returns `(g, s)` with `s·a ≡ g (mod m)`.
fn ext_gcd(a: &[Rational], m: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    fn trim_r(mut p: Vec<Rational>) -> Vec<Rational> {
        while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
            p.pop();
        }
        p
    }
    fn deg(p: &[Rational]) -> usize {
        p.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }
    fn is_zero_poly(p: &[Rational]) -> bool {
        p.iter().all(|c| c.is_zero())
    }
    fn div_rem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        let db = deg(b);
        let mut r = a.to_vec();
        let da = deg(a);
        if da < db || is_zero_poly(a) {
            return (vec![Rational::zero()], trim_r(r));
        }
        let mut q = vec![Rational::zero(); da - db + 1];
        for i in (db..=da).rev() {
            if r[i].is_zero() {
                continue;
            }
            let c = &r[i] / &b[db];
            for j in 0..=db {
                let t = &c * &b[j];
                r[i - db + j] -= t;
            }
            q[i - db] = c;
        }
        r.truncate(db.max(1));
        (trim_r(q), trim_r(r))
    }
    fn mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        trim_r(out)
    }
    fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let n = a.len().max(b.len());
        let mut out = vec![Rational::zero(); n];
        for (i, x) in a.iter().enumerate() {
            out[i] += x;
        }
        for (i, y) in b.iter().enumerate() {
            out[i] -= y;
        }
        trim_r(out)
    }
    let (mut r0, mut r1) = (trim_r(a.to_vec()), trim_r(m.to_vec()));
    let (mut s0, mut s1) = (vec![Rational::one()], vec![Rational::zero()]);
    while !is_zero_poly(&r1) {
        let (q, r) = div_rem(&r0, &r1);
        let s2 = sub(&s0, &mul(&q, &s1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
    }
    (r0, s0)
}

impl std::ops::Add for &FieldElt {
    type Output = FieldElt;
    /// Panics when the operands live in different fields; see
    /// [`FieldElt::checked_add`].
    fn add(self, rhs: &FieldElt) -> FieldElt {
        self.checked_add(rhs).expect("mixed fields")
    }
}

impl std::ops::Sub for &FieldElt {
    type Output = FieldElt;
    fn sub(self, rhs: &FieldElt) -> FieldElt {
        self.checked_sub(rhs).expect("mixed fields")
    }
}

impl std::ops::Mul for &FieldElt {
    type Output = FieldElt;
    fn mul(self, rhs: &FieldElt) -> FieldElt {
        self.checked_mul(rhs).expect("mixed fields")
    }
}

impl std::ops::Neg for &FieldElt {
    type Output = FieldElt;
    fn neg(self) -> FieldElt {
        FieldElt::neg(self)
    }
}

/// Enclosure of one Galois conjugate of β.
#[derive(Debug, Clone, Serialize)]
pub struct Conjugate {
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
    /// Certified radius: the conjugate lies within this distance of `re + i im`.
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PisotReport {
    pub pisot: bool,
    pub conjugates: Vec<Conjugate>,
}

/// Default safety margin below modulus 1 for a certified Pisot verdict.
pub const EPS_ROOT: f64 = 1e-9;

/// Decides whether β is a Pisot number: every conjugate (root of the minimal
/// polynomial other than β) must lie strictly inside the unit circle.
pub fn is_pisot(field: &BetaField) -> Result<PisotReport> {
    is_pisot_with(field, EPS_ROOT)
}

pub fn is_pisot_with(field: &BetaField, eps_root: f64) -> Result<PisotReport> {
    let mp = field.min_poly();
    let d = poly::degree(mp);
    if d <= 1 {
        return Ok(PisotReport { pisot: true, conjugates: Vec::new() });
    }
    let coeffs = poly::to_f64(mp)
        .ok_or_else(|| Error::Inconclusive("minimal polynomial coefficients exceed f64 range".into()))?;
    let roots = poly::complex_roots(&coeffs);
    let radii = poly::inclusion_radii(&coeffs, &roots);
    let beta = field.approx();
    let bi = (0..d)
        .min_by(|&a, &b| (roots[a] - beta).norm().total_cmp(&(roots[b] - beta).norm()))
        .expect("nonempty roots");
    let disjoint = |i: usize, j: usize| (roots[i] - roots[j]).norm() > radii[i] + radii[j];
    if (0..d).any(|j| j != bi && !disjoint(bi, j)) {
        return Err(Error::Inconclusive("beta not isolated from its conjugates".into()));
    }
    let others: Vec<usize> = (0..d).filter(|&i| i != bi).collect();
    // Connected components of the remaining disks.
    let mut comp = vec![usize::MAX; d];
    let mut ncomp = 0;
    for &i in &others {
        if comp[i] != usize::MAX {
            continue;
        }
        let mut stack = vec![i];
        comp[i] = ncomp;
        while let Some(a) = stack.pop() {
            for &b in &others {
                if comp[b] == usize::MAX && !disjoint(a, b) {
                    comp[b] = ncomp;
                    stack.push(b);
                }
            }
        }
        ncomp += 1;
    }
    let mut all_inside = true;
    let mut some_outside = false;
    for c in 0..ncomp {
        let members: Vec<usize> = others.iter().copied().filter(|&i| comp[i] == c).collect();
        let hi = members.iter().map(|&i| roots[i].norm() + radii[i]).fold(0.0, f64::max);
        let lo = members.iter().map(|&i| roots[i].norm() - radii[i]).fold(f64::INFINITY, f64::min);
        if hi < 1.0 - eps_root {
            continue;
        }
        all_inside = false;
        if lo >= 1.0 {
            some_outside = true;
        }
    }
    let conjugates = others
        .iter()
        .map(|&i| Conjugate { re: roots[i].re, im: roots[i].im, modulus: roots[i].norm(), radius: radii[i] })
        .collect();
    if some_outside {
        Ok(PisotReport { pisot: false, conjugates })
    } else if all_inside {
        Ok(PisotReport { pisot: true, conjugates })
    } else {
        Err(Error::Inconclusive(format!("digits {:?}", field.digits())))
    }
}
