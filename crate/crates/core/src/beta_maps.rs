//! The maps `T_k x = βx - k`, the greedy and lazy transformations, the
//! switch regions `S_k` and the random transformation `K`.
//!
//! The domain is `[0, ⌊β⌋/(β-1)]`. With `c = ⌊β⌋/(β(β-1))` it splits as
//!
//! ```text
//! E_0 = [0, 1/β)   S_k = [k/β, c + (k-1)/β]   E_k = (c + (k-1)/β, (k+1)/β)
//! E_⌊β⌋ = (c + (⌊β⌋-1)/β, ⌊β⌋/(β-1)]
//! ```
//!
//! S-intervals are closed and E-intervals take the remaining points.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numberfield::{BetaField, FieldElt, Sign};
use crate::omega::{Omega, OmegaCursor};
use crate::scalar::decimal_string;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum RegionKind {
    E,
    S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Region {
    pub kind: RegionKind,
    pub index: u32,
}

impl Region {
    pub fn e(index: u32) -> Self {
        Region { kind: RegionKind::E, index }
    }

    pub fn s(index: u32) -> Self {
        Region { kind: RegionKind::S, index }
    }

    pub fn is_switch(&self) -> bool {
        self.kind == RegionKind::S
    }

    /// Region of `⌊β⌋/(β-1) - x` given the region of `x`.
    pub fn mirror(&self, floor: u32) -> Region {
        match self.kind {
            RegionKind::E => Region::e(floor - self.index),
            RegionKind::S => Region::s(floor + 1 - self.index),
        }
    }

    /// Digits whose map keeps a point of this region inside the domain.
    pub fn digits(&self) -> Digits {
        match self.kind {
            RegionKind::E => Digits::One(self.index),
            RegionKind::S => Digits::Two(self.index - 1, self.index),
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            RegionKind::E => write!(f, "E{}", self.index),
            RegionKind::S => write!(f, "S{}", self.index),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Digits {
    One(u32),
    /// Lazy digit first, greedy digit second.
    Two(u32, u32),
}

impl Digits {
    pub fn as_vec(&self) -> Vec<u32> {
        match *self {
            Digits::One(a) => vec![a],
            Digits::Two(a, b) => vec![a, b],
        }
    }

    pub fn count(&self) -> usize {
        match self {
            Digits::One(_) => 1,
            Digits::Two(..) => 2,
        }
    }
}

/// A field element together with an outward `f64` enclosure, so most
/// comparisons never touch big integers.
#[derive(Debug, Clone)]
pub(crate) struct Marked {
    pub elt: FieldElt,
    lo: f64,
    hi: f64,
}

impl Marked {
    pub fn new(elt: FieldElt) -> Result<Self> {
        let (lo, hi) = elt.enclose()?;
        Ok(Marked { elt, lo, hi })
    }

    pub fn cmp(&self, other: &Marked) -> Result<Ordering> {
        if self.hi < other.lo {
            Ok(Ordering::Less)
        } else if self.lo > other.hi {
            Ok(Ordering::Greater)
        } else {
            self.elt.cmp_value(&other.elt)
        }
    }
}

/// Checks that iterating the greedy map from 1 reproduces `digits` and
/// terminates in 0 after exactly `n` steps.
pub fn validate_greedy_expansion_of_one(field: &BetaField) -> Result<bool> {
    let mut x = field.one();
    let mut found = Vec::with_capacity(field.degree());
    for _ in 0..field.degree() {
        let d = greedy_digit(field, &x)?;
        found.push(d);
        x = t_map(d, &x);
    }
    if found == field.digits() && x.is_zero()? {
        Ok(true)
    } else {
        Err(Error::NotGreedy { digits: field.digits().to_vec(), found })
    }
}

/// `min(⌊βx⌋, ⌊β⌋)` for `x >= 0`.
fn greedy_digit(field: &BetaField, x: &FieldElt) -> Result<u32> {
    let y = x.mul_beta();
    let top = field.floor();
    let est = y.to_f64();
    let mut k = if est.is_finite() { est.floor().clamp(0.0, top as f64) as u32 } else { 0 };
    while k > 0 && y.add_int(-(k as i64)).sign()? == Sign::Negative {
        k -= 1;
    }
    while k < top && y.add_int(-(k as i64 + 1)).sign()? != Sign::Negative {
        k += 1;
    }
    Ok(k)
}

/// `T_k x = βx - k`, exactly. Range checking is the caller's job.
pub fn t_map(k: u32, x: &FieldElt) -> FieldElt {
    x.mul_beta().add_int(-(k as i64))
}

/// The interval geometry of one generalised multinacci number.
#[derive(Debug, Clone)]
pub struct BetaMaps {
    field: BetaField,
    zero: Marked,
    top: Marked,
    inv_beta: FieldElt,
    c: FieldElt,
    /// `(k/β, c + (k-1)/β)` for `k = 1..=⌊β⌋`.
    switches: Vec<(Marked, Marked)>,
}

impl BetaMaps {
    /// Validates the digits as a greedy expansion of 1 and precomputes the
    /// region boundaries.
    pub fn new(field: &BetaField) -> Result<Self> {
        validate_greedy_expansion_of_one(field)?;
        let floor = field.floor();
        let b = field.beta();
        let bm1 = b.add_int(-1);
        let inv_beta = b.inv()?;
        let top = field.int(floor as i64).checked_div(&bm1)?;
        let c = top.checked_mul(&inv_beta)?;
        let mut switches = Vec::with_capacity(floor as usize);
        for k in 1..=floor {
            let left = inv_beta.scale_int(k as i64);
            let right = &c + &inv_beta.scale_int(k as i64 - 1);
            switches.push((Marked::new(left)?, Marked::new(right)?));
        }
        let maps = BetaMaps {
            field: field.clone(),
            zero: Marked::new(field.zero())?,
            top: Marked::new(top)?,
            inv_beta,
            c,
            switches,
        };
        maps.check_layout()?;
        Ok(maps)
    }

    fn check_layout(&self) -> Result<()> {
        let mut prev = &self.zero;
        for (l, r) in &self.switches {
            if prev.cmp(l)? != Ordering::Less || l.cmp(r)? != Ordering::Less {
                return Err(Error::InvalidModel("region boundaries out of order".into()));
            }
            prev = r;
        }
        if prev.cmp(&self.top)? != Ordering::Less {
            return Err(Error::InvalidModel("last switch region reaches the right endpoint".into()));
        }
        Ok(())
    }

    pub fn field(&self) -> &BetaField {
        &self.field
    }

    pub fn floor(&self) -> u32 {
        self.field.floor()
    }

    /// Right endpoint `⌊β⌋/(β-1)`.
    pub fn top(&self) -> &FieldElt {
        &self.top.elt
    }

    pub fn inv_beta(&self) -> &FieldElt {
        &self.inv_beta
    }

    /// `⌊β⌋/(β(β-1))`, the right end of `S_1`.
    pub fn c(&self) -> &FieldElt {
        &self.c
    }

    /// `(k/β, c + (k-1)/β)`, the closed switch region `S_k`.
    pub fn switch_region(&self, k: u32) -> (&FieldElt, &FieldElt) {
        let (l, r) = &self.switches[k as usize - 1];
        (&l.elt, &r.elt)
    }

    pub fn mirror(&self, x: &FieldElt) -> FieldElt {
        &self.top.elt - x
    }

    pub fn contains(&self, x: &FieldElt) -> Result<bool> {
        let m = Marked::new(x.clone())?;
        Ok(m.cmp(&self.zero)? != Ordering::Less && m.cmp(&self.top)? != Ordering::Greater)
    }

    pub fn classify(&self, x: &FieldElt) -> Result<Region> {
        self.classify_marked(&Marked::new(x.clone())?)
    }

    pub(crate) fn classify_marked(&self, x: &Marked) -> Result<Region> {
        if x.cmp(&self.zero)? == Ordering::Less || x.cmp(&self.top)? == Ordering::Greater {
            return Err(Error::OutOfDomain);
        }
        for (k, (l, r)) in self.switches.iter().enumerate() {
            if x.cmp(l)? == Ordering::Less {
                return Ok(Region::e(k as u32));
            }
            if x.cmp(r)? != Ordering::Greater {
                return Ok(Region::s(k as u32 + 1));
            }
        }
        Ok(Region::e(self.floor()))
    }

    /// Greedy digit and image: the largest digit keeping `T_k x >= 0`.
    pub fn greedy_step(&self, x: &FieldElt) -> Result<(u32, FieldElt)> {
        let k = match self.classify(x)? {
            Region { kind: RegionKind::E, index } | Region { kind: RegionKind::S, index } => index,
        };
        Ok((k, t_map(k, x)))
    }

    /// Lazy digit and image: the smallest digit keeping `T_k x` in the domain.
    pub fn lazy_step(&self, x: &FieldElt) -> Result<(u32, FieldElt)> {
        let k = match self.classify(x)? {
            Region { kind: RegionKind::E, index } => index,
            Region { kind: RegionKind::S, index } => index - 1,
        };
        Ok((k, t_map(k, x)))
    }

    /// One step of `K`: outside S the map is forced, inside `S_k` the next
    /// ω symbol picks digit `k - 1 + ω_1`.
    pub fn k_step(&self, state: &mut RandomState) -> Result<DigitRecord> {
        let region = self.classify(&state.x)?;
        let b = match region.kind {
            RegionKind::E => region.index,
            RegionKind::S => region.index - 1 + state.omega.next_symbol()? as u32,
        };
        state.x = t_map(b, &state.x);
        state.steps += 1;
        Ok(DigitRecord { b, region, alpha: None })
    }

    /// `b_1 ... b_k` of `φ(ω, x)`.
    pub fn phi_prefix(&self, state: &mut RandomState, k: usize) -> Result<Vec<u32>> {
        (0..k).map(|_| self.k_step(state).map(|r| r.b)).collect()
    }

    /// Orbit trace rows; `x` is printed with `sig` significant digits.
    pub fn trace(&self, state: &mut RandomState, k: usize, sig: usize) -> Result<Vec<OrbitRow>> {
        let mut rows = Vec::with_capacity(k);
        for step in 0..k {
            let x = decimal_string(state.x.to_f64(), sig);
            let rec = self.k_step(state)?;
            rows.push(OrbitRow {
                step,
                x,
                region: rec.region.to_string(),
                digit: rec.b,
                omega_consumed: state.omega_consumed(),
            });
        }
        Ok(rows)
    }
}

/// A point of `Ω × [0, ⌊β⌋/(β-1)]` under iteration of `K`.
#[derive(Debug, Clone)]
pub struct RandomState {
    pub x: FieldElt,
    pub omega: OmegaCursor,
    steps: usize,
}

impl RandomState {
    pub fn new(omega: Omega, x: FieldElt) -> Self {
        RandomState { x, omega: OmegaCursor::new(omega), steps: 0 }
    }

    pub fn omega_consumed(&self) -> usize {
        self.omega.used()
    }

    /// Number of `K` steps taken.
    pub fn steps(&self) -> usize {
        self.steps
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DigitRecord {
    pub b: u32,
    pub region: Region,
    /// Partition cell (0-based), filled in by the Markov model.
    pub alpha: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitRow {
    pub step: usize,
    pub x: String,
    pub region: String,
    pub digit: u32,
    pub omega_consumed: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::field_from_digits;
    use crate::scalar::Rational;
    use num_bigint::BigInt;

    fn golden() -> BetaMaps {
        BetaMaps::new(&field_from_digits(&[1, 1]).unwrap()).unwrap()
    }

    fn q(f: &BetaField, n: i64, d: i64) -> FieldElt {
        f.rational(&Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    #[test]
    fn golden_regions() {
        let m = golden();
        let f = m.field().clone();
        assert_eq!(m.classify(&q(&f, 1, 2)).unwrap(), Region::e(0));
        assert_eq!(m.classify(m.inv_beta()).unwrap(), Region::s(1));
        assert_eq!(m.classify(&f.one()).unwrap(), Region::s(1));
        assert_eq!(m.classify(&f.beta()).unwrap(), Region::e(1));
        assert_eq!(m.classify(&f.zero()).unwrap(), Region::e(0));
        assert_eq!(m.classify(&f.int(2)), Err(Error::OutOfDomain));
        assert_eq!(m.classify(&f.int(-1)), Err(Error::OutOfDomain));
        assert_eq!(m.c(), &f.one());
    }

    #[test]
    fn maps() {
        let m = golden();
        let f = m.field().clone();
        assert_eq!(t_map(1, &f.one()), m.inv_beta().clone());
        assert_eq!(t_map(0, &f.zero()), f.zero());
        assert_eq!(t_map(1, &f.beta()), f.beta());
        assert_eq!(m.greedy_step(&f.one()).unwrap(), (1, m.inv_beta().clone()));
        assert_eq!(m.lazy_step(&f.one()).unwrap(), (0, f.beta()));
        assert_eq!(m.greedy_step(&f.zero()).unwrap(), (0, f.zero()));
    }

    #[test]
    fn greedy_validation() {
        for d in [vec![1, 1], vec![1, 1, 1], vec![2, 1], vec![3, 1], vec![2, 2, 1]] {
            assert!(validate_greedy_expansion_of_one(&field_from_digits(&d).unwrap()).unwrap(), "{d:?}");
        }
        let err = validate_greedy_expansion_of_one(&field_from_digits(&[1, 2]).unwrap()).unwrap_err();
        assert_eq!(err, Error::NotGreedy { digits: vec![1, 2], found: vec![2, 0] });
        // 1 = 1/β + 2/β^2 needs a_1 >= a_2 for greedy; (1,3) gives β with β^2 = β + 3
        assert!(validate_greedy_expansion_of_one(&field_from_digits(&[1, 3]).unwrap()).is_err());
    }

    #[test]
    fn k_step_examples() {
        let m = golden();
        let f = m.field().clone();
        let mut st = RandomState::new(Omega::constant(1), q(&f, 7, 10));
        let rec = m.k_step(&mut st).unwrap();
        assert_eq!(rec.b, 1);
        assert_eq!(rec.region, Region::s(1));
        assert_eq!(st.omega_consumed(), 1);
        assert!((st.x.to_f64() - (0.7 * 1.618033988749895 - 1.0)).abs() < 1e-12);

        let mut st = RandomState::new(Omega::constant(0), q(&f, 1, 2));
        let rec = m.k_step(&mut st).unwrap();
        assert_eq!((rec.b, st.omega_consumed()), (0, 0));
        assert!((st.x.to_f64() - 0.809016994374947).abs() < 1e-12);
    }

    #[test]
    fn phi_prefix_examples() {
        let m = golden();
        let f = m.field().clone();
        let mut st = RandomState::new(Omega::seeded(1), f.zero());
        assert_eq!(m.phi_prefix(&mut st, 5).unwrap(), [0, 0, 0, 0, 0]);
        // 1 -> 1/β (digit 1) -> 0 (digit 1) -> 0
        let mut st = RandomState::new(Omega::constant(1), f.one());
        assert_eq!(m.phi_prefix(&mut st, 3).unwrap(), [1, 1, 0]);
        // 1 -> β (digit 0) -> β (digit 1) -> β
        let mut st = RandomState::new(Omega::constant(0), f.one());
        assert_eq!(m.phi_prefix(&mut st, 3).unwrap(), [0, 1, 1]);
    }

    #[test]
    fn finite_omega_runs_out() {
        let m = golden();
        let f = m.field().clone();
        let mut st = RandomState::new(Omega::finite(&[]), f.one());
        assert_eq!(m.k_step(&mut st), Err(Error::OmegaExhausted(0)));
    }

    #[test]
    fn two_switch_regions() {
        let f = field_from_digits(&[2, 1]).unwrap();
        let m = BetaMaps::new(&f).unwrap();
        assert_eq!(m.floor(), 2);
        let (l, r) = m.switch_region(2);
        assert_eq!(m.classify(l).unwrap(), Region::s(2));
        assert_eq!(m.classify(r).unwrap(), Region::s(2));
        assert_eq!(m.classify(m.top()).unwrap(), Region::e(2));
    }
}
