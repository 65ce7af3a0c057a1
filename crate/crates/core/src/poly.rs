//! Integer polynomial helpers. Coefficients are stored in ascending order
//! (`c[i]` multiplies `x^i`).

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type IntPoly = Vec<BigInt>;

pub fn degree(p: &[BigInt]) -> usize {
    p.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

pub fn trim(mut p: IntPoly) -> IntPoly {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

/// Sign of `p(m / 2^e)`.
pub fn sign_at_dyadic(p: &[BigInt], m: &BigInt, e: u64) -> Ordering {
    // p(m/2^e) * 2^(e*deg) = sum c_i m^i 2^(e (deg - i)), evaluated by Horner.
    let d = degree(p);
    let mut acc = p[d].clone();
    for i in (0..d).rev() {
        acc = acc * m + (&p[i] << (e as usize * (d - i)));
    }
    acc.sign_ord()
}

trait SignOrd {
    fn sign_ord(&self) -> Ordering;
}

impl SignOrd for BigInt {
    fn sign_ord(&self) -> Ordering {
        if self.is_zero() {
            Ordering::Equal
        } else if self.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

/// Number of sign changes in the coefficient sequence (Descartes).
pub fn sign_changes(p: &[BigInt]) -> usize {
    let signs: Vec<bool> = p.iter().filter(|c| !c.is_zero()).map(|c| c.is_positive()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Division by a monic divisor; returns `(quotient, remainder)`.
pub fn div_rem_monic(a: &[BigInt], b: &[BigInt]) -> (IntPoly, IntPoly) {
    let db = degree(b);
    assert!(b[db].is_one(), "divisor must be monic");
    let mut r: IntPoly = a.to_vec();
    let da = degree(a);
    if da < db {
        return (vec![BigInt::zero()], trim(r));
    }
    let mut q = vec![BigInt::zero(); da - db + 1];
    for i in (db..=da).rev() {
        let c = r[i].clone();
        if c.is_zero() {
            continue;
        }
        q[i - db] = c.clone();
        for j in 0..=db {
            r[i - db + j] -= &c * &b[j];
        }
    }
    r.truncate(db.max(1));
    (trim(q), trim(r))
}

pub fn mul(a: &[BigInt], b: &[BigInt]) -> IntPoly {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

pub fn to_f64(p: &[BigInt]) -> Option<Vec<f64>> {
    p.iter()
        .map(|c| {
            let v = c.to_f64()?;
            (v.abs() < 9.0e15).then_some(v)
        })
        .collect()
}

fn eval_complex(p: &[f64], z: Complex64) -> (Complex64, Complex64) {
    // value and derivative
    let mut v = Complex64::new(0.0, 0.0);
    let mut dv = Complex64::new(0.0, 0.0);
    for &c in p.iter().rev() {
        dv = dv * z + v;
        v = v * z + c;
    }
    (v, dv)
}

/// All complex roots of a polynomial with `f64` coefficients (Aberth–Ehrlich
/// iteration followed by Newton polishing).
pub fn complex_roots(p: &[f64]) -> Vec<Complex64> {
    let d = p.iter().rposition(|c| *c != 0.0).unwrap_or(0);
    if d == 0 {
        return Vec::new();
    }
    let lead = p[d];
    let monic: Vec<f64> = p[..=d].iter().map(|c| c / lead).collect();
    // Cauchy bound for the initial circle.
    let radius = 1.0 + monic[..d].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / d as f64 + 0.4;
            Complex64::from_polar(radius * 0.9, theta)
        })
        .collect();
    for _ in 0..2000 {
        let mut max_step = 0.0f64;
        for i in 0..d {
            let (v, dv) = eval_complex(&monic, z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dv;
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..d {
                if j != i {
                    sum += (z[i] - z[j]).inv();
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (v, dv) = eval_complex(&monic, *zi);
            if dv.norm() == 0.0 {
                break;
            }
            let step = v / dv;
            if step.is_finite() {
                *zi -= step;
            }
        }
    }
    z
}

/// Inclusion radii for approximate roots `z` of a monic polynomial: every
/// root lies in the union of the disks `D(z_i, r_i)`, and a connected
/// component made of `m` disks holds exactly `m` roots. The radii are
/// `deg * |p(z_i)| / |prod_{j != i}(z_i - z_j)|`, padded for rounding in the
/// evaluation.
pub fn inclusion_radii(monic: &[f64], z: &[Complex64]) -> Vec<f64> {
    let d = z.len();
    let u = f64::EPSILON;
    z.iter()
        .enumerate()
        .map(|(i, &zi)| {
            let (v, _) = eval_complex(monic, zi);
            let zn = zi.norm();
            let mut bound = 0.0;
            let mut pow = 1.0;
            for c in monic {
                bound += c.abs() * pow;
                pow *= zn;
            }
            let eval_err = 4.0 * (2 * d + 2) as f64 * u * bound;
            let mut prod = 1.0;
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    prod *= (zi - zj).norm();
                }
            }
            let denom = prod * (1.0 - 8.0 * d as f64 * u);
            if denom <= 0.0 {
                return f64::INFINITY;
            }
            (d as f64 * (v.norm() + eval_err) / denom) * 1.01 + 4.0 * u * zn
        })
        .collect()
}

/// Smallest monic integer factor of `p` having the real root near
/// `beta_approx` as a root. Candidate factors are products of subsets of the
/// numerically computed roots, rounded to integers and verified by exact
/// division. Returns `None` when no candidate verifies (the caller then falls
/// back to `p` itself).
pub fn factor_containing(p: &[BigInt], beta_approx: f64) -> Option<IntPoly> {
    let d = degree(p);
    if d <= 1 {
        return Some(trim(p.to_vec()));
    }
    if d > 22 {
        return None;
    }
    let pf = to_f64(p)?;
    let roots = complex_roots(&pf);
    let bi = roots
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - beta_approx).norm().total_cmp(&(b.1 - beta_approx).norm()))?
        .0;
    let others: Vec<usize> = (0..d).filter(|&i| i != bi).collect();
    let mut subsets: Vec<u32> = (0..(1u32 << others.len())).collect();
    subsets.sort_by_key(|m| m.count_ones());
    for mask in subsets {
        let size = mask.count_ones() as usize + 1;
        if size == d {
            return Some(trim(p.to_vec()));
        }
        let mut prod = vec![Complex64::new(1.0, 0.0)];
        let mut chosen = vec![roots[bi]];
        for (k, &idx) in others.iter().enumerate() {
            if mask & (1 << k) != 0 {
                chosen.push(roots[idx]);
            }
        }
        for r in &chosen {
            let mut next = vec![Complex64::new(0.0, 0.0); prod.len() + 1];
            for (i, c) in prod.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            prod = next;
        }
        if prod.iter().any(|c| c.im.abs() > 1e-6 || (c.re - c.re.round()).abs() > 1e-6) {
            continue;
        }
        let cand: IntPoly = prod.iter().map(|c| BigInt::from(c.re.round() as i64)).collect();
        let (_, rem) = div_rem_monic(p, &cand);
        if rem.iter().all(|c| c.is_zero()) {
            return Some(cand);
        }
    }
    None
}

/// Refines a dyadic enclosure `[m/2^e, (m+1)/2^e]` of the unique positive root
/// of `p` (negative below the root, positive above) to precision `target`.
pub fn refine_root(p: &[BigInt], m: &BigInt, e: u64, target: u64) -> BigInt {
    let mut m = m.clone();
    let mut e = e;
    while e < target {
        // Newton step at doubled precision, then repair by at most a few ulps.
        let new_e = (2 * e).min(target).max(e + 1);
        let shift = (new_e - e) as usize;
        let mut x = (&m << shift) + (BigInt::one() << (shift.saturating_sub(1)));
        if let Some(next) = newton_fixed(p, &x, new_e) {
            x = next;
        }
        // Ensure p(x/2^E) < 0 < p((x+1)/2^E).
        let mut guard = 0;
        loop {
            let lo = sign_at_dyadic(p, &x, new_e);
            let hi = sign_at_dyadic(p, &(&x + 1), new_e);
            if lo != Ordering::Greater && hi == Ordering::Greater {
                break;
            }
            if lo == Ordering::Greater {
                x -= 1;
            } else {
                x += 1;
            }
            guard += 1;
            if guard > 64 {
                // Newton wandered; fall back to plain bisection from the old enclosure.
                x = bisect(p, &m, e, new_e);
                break;
            }
        }
        m = x;
        e = new_e;
    }
    m
}

fn newton_fixed(p: &[BigInt], x: &BigInt, e: u64) -> Option<BigInt> {
    let d = degree(p);
    let eu = e as usize;
    // value scaled by 2^(e d), derivative scaled by 2^(e (d-1))
    let mut v = p[d].clone();
    for i in (0..d).rev() {
        v = v * x + (&p[i] << (eu * (d - i)));
    }
    let mut dv = &p[d] * BigInt::from(d);
    for i in (1..d).rev() {
        dv = dv * x + ((&p[i] * BigInt::from(i)) << (eu * (d - i)));
    }
    if dv.is_zero() {
        return None;
    }
    // x_new = x - v / dv, where v/dv is already scaled by 2^e.
    let (q, _) = v.div_mod_floor(&dv);
    Some(x - q)
}

fn bisect(p: &[BigInt], m: &BigInt, e: u64, target: u64) -> BigInt {
    let mut m = m.clone();
    let mut e = e;
    while e < target {
        let mid = (&m << 1usize) + 1;
        e += 1;
        if sign_at_dyadic(p, &mid, e) == Ordering::Greater {
            m <<= 1usize;
        } else {
            m = mid;
        }
    }
    m
}
