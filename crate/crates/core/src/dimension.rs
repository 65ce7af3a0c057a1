//! Local dimensions of the maximal-entropy measure ν of `K` and of the
//! Bernoulli convolution μ.
//!
//! Limits (limsup/liminf) are never computed; every report carries the
//! finite horizons its proxies were taken at.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::beta_maps::{t_map, BetaMaps, Digits, Marked, RandomState, RegionKind};
use crate::error::{Error, Result};
use crate::markov::MarkovModel;
use crate::numberfield::{is_pisot, BetaField, FieldElt};
use crate::omega::Omega;
use crate::scalar::{rational_to_f64, Rational};

/// Largest horizon for branch counting (`N_k <= 2^k` must fit in `u128`).
pub const MAX_BRANCH_DEPTH: usize = 120;
/// Largest horizon for exhaustive enumeration of ω words.
pub const MAX_OMEGA_DEPTH: usize = 16;

fn pow2(e: usize) -> Rational {
    Rational::from_integer(BigInt::one() << e)
}

fn pow_int(b: u32, e: usize) -> Rational {
    Rational::from_integer(num_traits::pow(BigInt::from(b), e))
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitSample {
    pub omega_seed: Option<u64>,
    pub k: usize,
    /// `M_1, ..., M_k`.
    pub m: Vec<u32>,
    /// `α_1, ..., α_k` (0-based cells).
    pub alpha: Vec<usize>,
    pub ratio: f64,
}

/// `M_j`: the number of S-visits among the first `j` iterates of `K`.
pub fn m_count(model: &MarkovModel, state: &mut RandomState, k: usize) -> Result<OrbitSample> {
    let alpha = model.alpha_code(state, k)?;
    let mut m = Vec::with_capacity(k);
    let mut acc = 0u32;
    for &a in &alpha {
        acc += model.is_s(a) as u32;
        m.push(acc);
    }
    let ratio = if k == 0 { 0.0 } else { acc as f64 / k as f64 };
    Ok(OrbitSample { omega_seed: None, k, m, alpha, ratio })
}

/// The closed form `⌈β⌉^{-(k-1)} v_{α_k} 2^{-(k-M_k)} μ(C_1)` for the
/// ν-measure of the ρ-ball of radius `β^{-k}`.
///
/// This is the expression the local dimension formula is built on. Up to the
/// constant factor `μ(C_1)` and a factor 2 at S-states it agrees with
/// [`nu_cylinder_mass`], which is the exact measure of the ball and the
/// one that is additive under refinement.
pub fn nu_ball_measure(model: &MarkovModel, state: &mut RandomState, k: usize) -> Result<Rational> {
    let alpha = model.alpha_code(state, k)?;
    Ok(nu_ball_from_code(model, &alpha))
}

/// [`nu_ball_measure`] for a given α-code.
pub fn nu_ball_from_code(model: &MarkovModel, alpha: &[usize]) -> Rational {
    let k = alpha.len();
    let m_k = alpha.iter().filter(|&&a| model.is_s(a)).count();
    let last = *alpha.last().expect("k >= 1");
    &model.v()[last] / pow_int(model.ceil(), k - 1) / pow2(k - m_k) * model.mu_c1()
}

/// ν-measure of the set of `(ω', x')` sharing `α_1..α_k` and `ω_1..ω_k`:
/// `⌈β⌉^{-(k-1)} v_{α_k} 2^{-(k-M_{k-1})}`.
pub fn nu_cylinder_mass(model: &MarkovModel, alpha: &[usize]) -> Rational {
    let k = alpha.len();
    let m_prev = alpha[..k - 1].iter().filter(|&&a| model.is_s(a)).count();
    let last = *alpha.last().expect("k >= 1");
    &model.v()[last] / pow_int(model.ceil(), k - 1) / pow2(k - m_prev)
}

/// Finite-k local dimension proxy, or `Infinite` when the orbit meets F.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LocalDim {
    Finite { k: usize, value: f64 },
    /// The ball is countable and has measure 0.
    Infinite { hit_step: usize },
}

/// `log ν(B) / log β^{-k}` using [`nu_ball_measure`].
pub fn nu_local_dim_proxy(model: &MarkovModel, state: &mut RandomState, k: usize) -> Result<LocalDim> {
    match nu_ball_measure(model, state, k) {
        Ok(m) => Ok(LocalDim::Finite { k, value: log_ratio(&m, k, model.field().ln_beta()) }),
        Err(Error::HitF { step }) => Ok(LocalDim::Infinite { hit_step: step }),
        Err(e) => Err(e),
    }
}

/// `log m / log β^{-k}` for a positive rational `m`.
pub fn log_ratio(m: &Rational, k: usize, ln_beta: f64) -> f64 {
    ln_rational(m) / (-(k as f64) * ln_beta)
}

fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits() as i64;
    if bits < 1000 {
        return rational_to_f64(&Rational::from_integer(n.clone())).ln();
    }
    let shift = bits - 60;
    let top: BigInt = n >> (shift as usize);
    rational_to_f64(&Rational::from_integer(top)).ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn ln_rational(r: &Rational) -> f64 {
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Rho,
    RhoBar,
}

#[derive(Debug, Clone, Serialize)]
pub struct DimensionReport {
    pub metric: Metric,
    pub lower: f64,
    pub upper: f64,
    /// A.e. value (for μ only when β is Pisot and γ is supplied).
    pub ae_value: Option<f64>,
    /// Local dimension at points with a unique expansion.
    pub unique_value: Option<f64>,
    /// Horizons the finite proxies were read at.
    pub horizons: Vec<usize>,
}

fn check_ratio(name: &str, r: f64, lo: f64, hi: f64) -> Result<()> {
    if r.is_finite() && r >= lo - 1e-12 && r <= hi + 1e-12 {
        Ok(())
    } else {
        Err(Error::RatioOutOfRange(format!("{name} = {r} not in [{lo}, {hi}]")))
    }
}

/// ν bounds from proxies of `limsup M_k/k` and `liminf M_k/k`:
/// `log⌈β⌉/logβ + (log2/logβ)(1 - ratio)`.
pub fn nu_dim_bounds(limsup: f64, liminf: f64, field: &BetaField) -> Result<DimensionReport> {
    check_ratio("limsup proxy", limsup, 0.0, 1.0)?;
    check_ratio("liminf proxy", liminf, 0.0, limsup)?;
    Ok(DimensionReport {
        metric: Metric::Rho,
        lower: nu_pointwise(limsup, field),
        upper: nu_pointwise(liminf, field),
        ae_value: None,
        unique_value: Some(nu_unique_dimension(field)),
        horizons: Vec::new(),
    })
}

fn nu_pointwise(ratio: f64, field: &BetaField) -> f64 {
    let lb = field.ln_beta();
    (field.ceil() as f64).ln() / lb + std::f64::consts::LN_2 / lb * (1.0 - ratio)
}

/// `(log⌈β⌉ + log 2)/logβ`.
pub fn nu_unique_dimension(field: &BetaField) -> f64 {
    ((field.ceil() as f64).ln() + std::f64::consts::LN_2) / field.ln_beta()
}

/// The ν-a.e. local dimension `log⌈β⌉/logβ + (log2/logβ)(1 - μ(S))`.
///
/// For the golden ratio this is `5 log2 / (3 logβ) ≈ 2.40070`; the
/// expression `5 log2 / (6 logβ)` sometimes quoted for this case drops a
/// factor 2 and is not what the formula gives.
pub fn nu_ae_dimension(model: &MarkovModel) -> f64 {
    nu_pointwise(rational_to_f64(&model.mu_s()), model.field())
}

/// `log⌈β⌉/logβ`, the μ local dimension where `N_k ≡ 1`.
pub fn mu_unique_dimension(field: &BetaField) -> f64 {
    (field.ceil() as f64).ln() / field.ln_beta()
}

/// Outcome of following the forced orbit of `x` outside S.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UniqueStatus {
    /// Iterate `step` is the endpoint 0 or `⌊β⌋/(β-1)`; both are points of
    /// F with a unique expansion.
    HitF { step: usize },
    /// The orbit became periodic without entering S.
    Unique { period_start: usize },
    /// Iterate `step` lies in S.
    NotUniqueAt { step: usize },
    /// No S-visit within the horizon; uniqueness is undecided.
    UniqueUpTo { k: usize },
}

impl UniqueStatus {
    pub fn is_unique(&self) -> Option<bool> {
        match self {
            UniqueStatus::HitF { .. } | UniqueStatus::Unique { .. } => Some(true),
            UniqueStatus::NotUniqueAt { .. } => Some(false),
            UniqueStatus::UniqueUpTo { .. } => None,
        }
    }
}

pub fn is_unique_expansion(maps: &BetaMaps, x: &FieldElt, k_max: usize) -> Result<UniqueStatus> {
    let zero = maps.field().zero();
    let mut seen = HashMap::new();
    let mut y = x.clone();
    for step in 0..k_max {
        if y == zero || &y == maps.top() {
            return Ok(UniqueStatus::HitF { step });
        }
        if let Some(&first) = seen.get(&y) {
            return Ok(UniqueStatus::Unique { period_start: first });
        }
        let region = maps.classify(&y)?;
        if region.kind == RegionKind::S {
            return Ok(UniqueStatus::NotUniqueAt { step });
        }
        seen.insert(y.clone(), step);
        y = t_map(region.index, &y);
    }
    Ok(UniqueStatus::UniqueUpTo { k: k_max })
}

/// A distinct remainder at one level of the branch tree.
#[derive(Debug, Clone)]
pub struct BranchNode {
    pub point: FieldElt,
    /// Number of digit prefixes reaching this remainder.
    pub mult: u128,
    /// `s_hist[m]`: prefixes among them with `m` S-visits.
    pub s_hist: Vec<u128>,
    pub digits: Digits,
}

/// All admissible digit prefixes of `x` up to depth `k`, with prefixes
/// ending in the same remainder merged.
#[derive(Debug, Clone)]
pub struct BranchTree {
    pub root: FieldElt,
    /// `levels[j]`: remainders after `j` digits (`levels[0]` is the root).
    pub levels: Vec<Vec<BranchNode>>,
}

impl BranchTree {
    /// `N_1, ..., N_k`.
    pub fn n(&self) -> Vec<u128> {
        self.levels[1..].iter().map(|l| l.iter().map(|n| n.mult).sum()).collect()
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// Prefixes of length `j` by number of S-visits.
    pub fn s_histogram(&self, j: usize) -> Vec<u128> {
        let mut out = vec![0u128; j + 1];
        for node in &self.levels[j] {
            for (m, c) in node.s_hist.iter().enumerate() {
                out[m] += c;
            }
        }
        out
    }
}

pub fn count_branches(maps: &BetaMaps, x: &FieldElt, k: usize) -> Result<BranchTree> {
    if k > MAX_BRANCH_DEPTH {
        return Err(Error::HorizonTooLarge { k, max: MAX_BRANCH_DEPTH });
    }
    let root_marked = Marked::new(x.clone())?;
    let region = maps.classify_marked(&root_marked)?;
    let mut levels = vec![vec![BranchNode { point: x.clone(), mult: 1, s_hist: vec![1], digits: region.digits() }]];
    for j in 0..k {
        let mut next: Vec<BranchNode> = Vec::new();
        let mut index: HashMap<FieldElt, usize> = HashMap::new();
        for node in &levels[j] {
            let is_s = node.digits.count() == 2;
            for d in node.digits.as_vec() {
                let y = t_map(d, &node.point);
                match index.get(&y) {
                    Some(&i) => {
                        let n = &mut next[i];
                        n.mult += node.mult;
                        for (m, c) in node.s_hist.iter().enumerate() {
                            n.s_hist[m + is_s as usize] += c;
                        }
                    }
                    None => {
                        let digits = maps.classify(&y)?.digits();
                        let mut s_hist = vec![0u128; j + 2];
                        for (m, c) in node.s_hist.iter().enumerate() {
                            s_hist[m + is_s as usize] += c;
                        }
                        index.insert(y.clone(), next.len());
                        next.push(BranchNode { point: y, mult: node.mult, s_hist, digits });
                    }
                }
            }
        }
        levels.push(next);
    }
    Ok(BranchTree { root: x.clone(), levels })
}

/// `N_j = Σ_ω 2^{M_j(ω,x)} 2^{-k}` for `j = 1..k`, by running `K` on every
/// word `ω ∈ {0,1}^k` separately.
pub fn omega_average_sequence(maps: &BetaMaps, x: &FieldElt, k: usize) -> Result<Vec<Rational>> {
    if k > MAX_OMEGA_DEPTH {
        return Err(Error::HorizonTooLarge { k, max: MAX_OMEGA_DEPTH });
    }
    maps.classify(x)?;
    let sums = (0u32..1 << k)
        .into_par_iter()
        .map(|w| -> Result<Vec<u128>> {
            let bits: Vec<u8> = (0..k).map(|i| ((w >> i) & 1) as u8).collect();
            let mut state = RandomState::new(Omega::finite(&bits), x.clone());
            let mut out = Vec::with_capacity(k);
            for _ in 0..k {
                maps.k_step(&mut state)?;
                out.push(1u128 << state.omega_consumed());
            }
            Ok(out)
        })
        .try_reduce(
            || vec![0u128; k],
            |a, b| Ok(a.iter().zip(&b).map(|(x, y)| x + y).collect()),
        )?;
    let den = pow2(k);
    Ok(sums.into_iter().map(|s| Rational::from_integer(BigInt::from(s)) / &den).collect())
}

/// Exhaustive `∫ 2^{M_k(ω,x)} dm(ω)`.
pub fn nk_via_omega_average(maps: &BetaMaps, x: &FieldElt, k: usize) -> Result<Rational> {
    if k == 0 {
        return Ok(Rational::one());
    }
    Ok(omega_average_sequence(maps, x, k)?.pop().expect("k >= 1"))
}

/// Mean with standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub n: usize,
    pub mean: f64,
    pub std_err: f64,
    pub min: f64,
    pub max: f64,
}

/// Welford accumulator; `merge` is associative so partial results from
/// parallel workers combine in any grouping.
#[derive(Debug, Clone, Copy)]
pub struct Accumulator {
    n: usize,
    mean: f64,
    m2: f64,
    min: f64,
    max: f64,
}

impl Default for Accumulator {
    fn default() -> Self {
        Accumulator { n: 0, mean: 0.0, m2: 0.0, min: f64::INFINITY, max: f64::NEG_INFINITY }
    }
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
        self.min = self.min.min(x);
        self.max = self.max.max(x);
    }

    pub fn merge(self, other: Accumulator) -> Accumulator {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let mean = self.mean + d * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + d * d * (self.n as f64 * other.n as f64) / n as f64;
        Accumulator { n, mean, m2, min: self.min.min(other.min), max: self.max.max(other.max) }
    }

    pub fn estimate(&self) -> Estimate {
        let var = if self.n > 1 { self.m2 / (self.n - 1) as f64 } else { 0.0 };
        Estimate { n: self.n, mean: self.mean, std_err: (var / self.n.max(1) as f64).sqrt(), min: self.min, max: self.max }
    }
}

impl FromIterator<f64> for Accumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut a = Accumulator::default();
        for x in iter {
            a.push(x);
        }
        a
    }
}

/// Monte-Carlo estimate of `∫ 2^{M_k(ω,x)} dm(ω)`.
pub fn nk_omega_monte_carlo(maps: &BetaMaps, x: &FieldElt, k: usize, samples: usize, seed: u64) -> Result<Estimate> {
    let vals = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let mut state = RandomState::new(Omega::split(seed, i as u64), x.clone());
            for _ in 0..k {
                maps.k_step(&mut state)?;
            }
            Ok((state.omega_consumed() as f64).exp2())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(vals.into_iter().collect::<Accumulator>().estimate())
}

/// `M_j/j` along one ν-distributed orbit of length `k`, read at the
/// checkpoints `marks` (each `<= k`).
///
/// ν corresponds to i.i.d. uniform digits, so the orbit is generated
/// backwards from random digits: `x_j = (b_{j+1} + x_{j+1})/β`, truncated
/// where `β^{-T} < 2^{-60}`. Points within `1e-9` of a region boundary are
/// reclassified exactly from the truncated expansion.
pub fn nu_orbit_ratios(maps: &BetaMaps, k: usize, marks: &[usize], rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let beta = maps.field().approx();
    let tail = (60.0 * std::f64::consts::LN_2 / beta.ln()).ceil() as usize + 1;
    let n = k + tail;
    let floor = maps.floor();
    let digits: Vec<u32> = (0..n).map(|_| rng.random_range(0..=floor)).collect();
    let bounds: Vec<(f64, f64)> = (1..=floor)
        .map(|kk| {
            let (l, r) = maps.switch_region(kk);
            (l.to_f64(), r.to_f64())
        })
        .collect();
    let mut in_s = vec![false; k];
    let mut x = 0.0f64;
    for j in (0..n).rev() {
        x = (digits[j] as f64 + x) / beta;
        if j < k {
            let near = bounds.iter().any(|&(l, r)| (x - l).abs() < 1e-9 || (x - r).abs() < 1e-9);
            in_s[j] = if near {
                let exact = exact_from_digits(maps.field(), &digits[j..]);
                maps.classify(&exact)?.is_switch()
            } else {
                bounds.iter().any(|&(l, r)| l <= x && x <= r)
            };
        }
    }
    let mut out = Vec::with_capacity(marks.len());
    let mut count = 0usize;
    let mut next = 0;
    let mut sorted: Vec<(usize, usize)> = marks.iter().copied().enumerate().map(|(i, m)| (m, i)).collect();
    sorted.sort_unstable();
    out.resize(marks.len(), 0.0);
    for (j, &s) in in_s.iter().enumerate() {
        count += s as usize;
        while next < sorted.len() && sorted[next].0 == j + 1 {
            out[sorted[next].1] = count as f64 / (j + 1) as f64;
            next += 1;
        }
    }
    Ok(out)
}

fn exact_from_digits(field: &BetaField, digits: &[u32]) -> FieldElt {
    let inv = field.beta().inv().expect("beta invertible");
    let mut x = field.zero();
    for &d in digits.iter().rev() {
        x = &(x.add_int(d as i64)) * &inv;
    }
    x
}

/// Mean of `M_k/k` over `samples` ν-random orbits.
pub fn nu_monte_carlo(maps: &BetaMaps, k: usize, samples: usize, seed: u64) -> Result<Estimate> {
    let vals = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            nu_orbit_ratios(maps, k, &[k], &mut rng).map(|v| v[0])
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(vals.into_iter().collect::<Accumulator>().estimate())
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaEstimate {
    pub k: usize,
    /// Statistics of `log N_k / k` over the sampled points.
    pub estimate: Estimate,
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaReport {
    pub samples: usize,
    pub seed: u64,
    pub estimates: Vec<GammaEstimate>,
    /// `None` when the Pisot test was inconclusive.
    pub pisot: Option<bool>,
    /// False for non-Pisot β: `log N_k / k` need not converge a.e.
    pub ae_guarantee: bool,
    pub trend: Trend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Decreasing,
    Increasing,
    Mixed,
}

/// Uniform point `U · ⌊β⌋/(β-1)` with `U` a random 128-bit dyadic.
pub fn lebesgue_point(maps: &BetaMaps, rng: &mut ChaCha8Rng) -> FieldElt {
    let u: u128 = rng.random();
    let r = Rational::new(BigInt::from(u), BigInt::one() << 128);
    maps.top().scale_rational(&r)
}

/// Statistics of `log N_k / k` at Lebesgue-random points.
pub fn estimate_gamma(maps: &BetaMaps, samples: usize, k_list: &[usize], seed: u64) -> Result<GammaReport> {
    let k_max = k_list.iter().copied().max().unwrap_or(0);
    if k_list.contains(&0) {
        return Err(Error::HorizonTooLarge { k: 0, max: MAX_BRANCH_DEPTH });
    }
    let per_sample = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<Vec<f64>> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let x = lebesgue_point(maps, &mut rng);
            let n = count_branches(maps, &x, k_max)?.n();
            Ok(k_list.iter().map(|&k| (n[k - 1] as f64).ln() / k as f64).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let estimates: Vec<GammaEstimate> = k_list
        .iter()
        .enumerate()
        .map(|(i, &k)| GammaEstimate { k, estimate: per_sample.iter().map(|v| v[i]).collect::<Accumulator>().estimate() })
        .collect();
    let means: Vec<f64> = estimates.iter().map(|e| e.estimate.mean).collect();
    let trend = if means.windows(2).all(|w| w[1] <= w[0]) {
        Trend::Decreasing
    } else if means.windows(2).all(|w| w[1] >= w[0]) {
        Trend::Increasing
    } else {
        Trend::Mixed
    };
    let pisot = is_pisot(maps.field()).ok().map(|r| r.pisot);
    Ok(GammaReport { samples, seed, estimates, pisot, ae_guarantee: pisot == Some(true), trend })
}

/// μ bounds from the proxies `log N_k / k` at the given horizons:
/// `(log⌈β⌉ - proxy)/logβ`, with the larger proxy giving the lower bound.
/// With `gamma` and a Pisot β the a.e. value `(log⌈β⌉ - γ)/logβ` is added.
pub fn mu_dim_bounds(
    field: &BetaField,
    n: &[u128],
    horizons: &[usize],
    gamma: Option<f64>,
) -> Result<DimensionReport> {
    let ln2 = std::f64::consts::LN_2;
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for &k in horizons {
        let nk = *n.get(k.wrapping_sub(1)).ok_or(Error::HorizonTooLarge { k, max: n.len() })?;
        let proxy = (nk as f64).ln() / k as f64;
        check_ratio(&format!("log N_{k}/{k}"), proxy, 0.0, ln2)?;
        hi = hi.max(proxy);
        lo = lo.min(proxy);
    }
    if horizons.is_empty() {
        return Err(Error::RatioOutOfRange("no horizons given".into()));
    }
    let lb = field.ln_beta();
    let lc = (field.ceil() as f64).ln();
    let pisot = is_pisot(field).map(|r| r.pisot).unwrap_or(false);
    let ae_value = match gamma {
        Some(g) if pisot => {
            check_ratio("gamma", g, 0.0, ln2)?;
            Some((lc - g) / lb)
        }
        _ => None,
    };
    Ok(DimensionReport {
        metric: Metric::RhoBar,
        lower: (lc - hi) / lb,
        upper: (lc - lo) / lb,
        ae_value,
        unique_value: Some(mu_unique_dimension(field)),
        horizons: horizons.to_vec(),
    })
}

/// `⌈β⌉^{-(k-1)} μ(C_1) Σ_p v_{α_k(p)}`, summed over the admissible digit
/// prefixes `p` of length `k`.
pub fn mu_ball_measure(model: &MarkovModel, x: &FieldElt, k: usize) -> Result<Rational> {
    Ok(mu_ball_with_count(model, x, k)?.0)
}

/// The μ-ball measure together with `N_k`.
pub fn mu_ball_with_count(model: &MarkovModel, x: &FieldElt, k: usize) -> Result<(Rational, u128)> {
    if k == 0 {
        return Err(Error::HorizonTooLarge { k, max: MAX_BRANCH_DEPTH });
    }
    let tree = count_branches(model.maps(), x, k - 1)?;
    for (j, level) in tree.levels.iter().enumerate() {
        for node in level {
            if model.cell_of(&node.point)?.is_none() {
                return Err(Error::HitF { step: j + 1 });
            }
        }
    }
    let mut sum = Rational::zero();
    let mut count = 0u128;
    for node in &tree.levels[k - 1] {
        let cell = model.cell_of(&node.point)?.expect("checked above");
        let paths = node.mult * node.digits.count() as u128;
        count += paths;
        sum += &model.v()[cell] * Rational::from_integer(BigInt::from(paths));
    }
    Ok((sum * model.mu_c1() / pow_int(model.ceil(), k - 1), count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::field_from_digits;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn golden() -> MarkovModel {
        MarkovModel::from_digits(&[1, 1]).unwrap()
    }

    #[test]
    fn m_count_first_step() {
        let m = golden();
        let f = m.field().clone();
        let mut st = RandomState::new(Omega::constant(1), f.rational(&q(7, 10)));
        assert_eq!(m_count(&m, &mut st, 1).unwrap().m, [1]);
    }

    #[test]
    fn ball_closed_form() {
        let m = golden();
        // k = 2, one S-visit
        assert_eq!(nu_ball_from_code(&m, &[0, 1]), q(1, 36));
        // k = 3, no S-visit
        assert_eq!(nu_ball_from_code(&m, &[0, 0, 0]), q(1, 288));
    }

    #[test]
    fn degenerate_point() {
        let m = golden();
        let f = m.field().clone();
        let mut st = RandomState::new(Omega::periodic(&[1, 0]), f.one());
        assert_eq!(nu_local_dim_proxy(&m, &mut st, 5).unwrap(), LocalDim::Infinite { hit_step: 1 });
    }

    #[test]
    fn golden_dimension_values() {
        let m = golden();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let l2 = 2f64.ln();
        assert!((nu_ae_dimension(&m) - 5.0 * l2 / (3.0 * phi.ln())).abs() < 1e-12);
        let r = nu_dim_bounds(0.0, 0.0, m.field()).unwrap();
        assert!((r.lower - 2.0 * l2 / phi.ln()).abs() < 1e-12);
        assert_eq!(r.lower, r.upper);
        let r = nu_dim_bounds(1.0, 0.0, m.field()).unwrap();
        assert!((r.lower - l2 / phi.ln()).abs() < 1e-12);
        assert!(nu_dim_bounds(0.2, 0.5, m.field()).is_err());
        assert!((mu_unique_dimension(m.field()) - 1.4404200904125567).abs() < 1e-12);
    }

    #[test]
    fn uniqueness() {
        let m = golden();
        let f = m.field().clone();
        let maps = m.maps();
        assert_eq!(is_unique_expansion(maps, &f.zero(), 10).unwrap(), UniqueStatus::HitF { step: 0 });
        assert_eq!(is_unique_expansion(maps, &f.beta(), 10).unwrap(), UniqueStatus::HitF { step: 0 });
        assert_eq!(
            is_unique_expansion(maps, &f.rational(&q(7, 10)), 10).unwrap(),
            UniqueStatus::NotUniqueAt { step: 0 }
        );
    }

    #[test]
    fn branch_counts() {
        let m = golden();
        let f = m.field().clone();
        let t = count_branches(m.maps(), &f.one(), 4).unwrap();
        assert_eq!(&t.n()[..2], &[2, 3]);
        let t0 = count_branches(m.maps(), &f.zero(), 10).unwrap();
        assert!(t0.n().iter().all(|&n| n == 1));
        let half = f.rational(&q(1, 2));
        let n = count_branches(m.maps(), &half, 12).unwrap().n();
        let avg = omega_average_sequence(m.maps(), &half, 12).unwrap();
        for (a, b) in n.iter().zip(&avg) {
            assert_eq!(Rational::from_integer(BigInt::from(*a)), *b);
        }
        assert_eq!(nk_via_omega_average(m.maps(), &f.one(), 2).unwrap(), q(3, 1));
    }

    #[test]
    fn histogram_totals() {
        let m = golden();
        let x = m.field().rational(&q(2, 7));
        let t = count_branches(m.maps(), &x, 10).unwrap();
        for j in 1..=10 {
            assert_eq!(t.s_histogram(j).iter().sum::<u128>(), t.n()[j - 1]);
        }
    }

    #[test]
    fn mu_ball_examples() {
        let m = golden();
        let f = m.field().clone();
        assert_eq!(mu_ball_measure(&m, &f.zero(), 3).unwrap(), q(1, 36));
        assert_eq!(mu_ball_measure(&m, &f.one(), 3), Err(Error::HitF { step: 1 }));
    }

    #[test]
    fn accumulator_merge() {
        let xs = [1.0, 2.0, 4.0, 8.0, 3.0];
        let all: Accumulator = xs.iter().copied().collect();
        let a: Accumulator = xs[..2].iter().copied().collect();
        let b: Accumulator = xs[2..].iter().copied().collect();
        let m = a.merge(b);
        assert!((all.estimate().mean - m.estimate().mean).abs() < 1e-12);
        assert!((all.estimate().std_err - m.estimate().std_err).abs() < 1e-12);
    }

    #[test]
    fn nu_sampler_short_run() {
        let m = golden();
        let est = nu_monte_carlo(m.maps(), 2000, 16, 5).unwrap();
        assert!((est.mean - 1.0 / 3.0).abs() < 0.05, "{est:?}");
    }

    #[test]
    fn mu_bounds_for_unique_sequence() {
        let f = field_from_digits(&[1, 1]).unwrap();
        let r = mu_dim_bounds(&f, &[1; 12], &[4, 8, 12], None).unwrap();
        assert!((r.lower - mu_unique_dimension(&f)).abs() < 1e-12);
        assert_eq!(r.lower, r.upper);
    }
}
