#![allow(dead_code)]

use betadim::beta_maps::BetaMaps;
use betadim::{FieldElt, Rational};
use num_bigint::BigInt;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `(n0 + n1 β)/d` shifted by a multiple of the right endpoint into the
/// domain. `None` when rounding leaves it just outside.
pub fn point(maps: &BetaMaps, n0: i64, n1: i64, d: i64) -> Option<FieldElt> {
    let f = maps.field();
    let x = (&f.int(n0) + &f.beta().scale_int(n1)).scale_rational(&q(1, d));
    let top = maps.top();
    let shift = (x.to_f64() / top.to_f64()).floor() as i64;
    let y = &x - &top.scale_int(shift);
    maps.contains(&y).ok().filter(|&ok| ok).map(|_| y)
}
