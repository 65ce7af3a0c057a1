//! The golden ratio with a biased coin: ω symbols are 0 with probability
//! `p`. The Markov chain on the three cells `(e0, s, e1)` with matrix `P_p`
//! codes the lifted measure, and the map ψ recovers ω from the cell
//! sequence.

use rayon::prelude::*;
use serde::Serialize;

use crate::beta_maps::{BetaMaps, RandomState};
use crate::dimension::{DimensionReport, Metric};
use crate::error::{Error, Result};
use crate::linalg::{vec_mat, Matrix};
use crate::markov::MarkovModel;
use crate::numberfield::{BetaField, FieldElt};
use crate::omega::Omega;
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum YState {
    E0,
    S,
    E1,
}

impl YState {
    pub const ALL: [YState; 3] = [YState::E0, YState::S, YState::E1];

    pub fn index(self) -> usize {
        match self {
            YState::E0 => 0,
            YState::S => 1,
            YState::E1 => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<YState> {
        YState::ALL.get(i).copied()
    }

    /// `e_i` for a binary symbol `i`.
    pub fn e(i: u8) -> YState {
        if i == 0 {
            YState::E0
        } else {
            YState::E1
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymModel<T> {
    p: T,
    pm: Matrix<T>,
    u: Vec<T>,
}

impl<T: Scalar> AsymModel<T> {
    pub fn new(p: T) -> Result<Self> {
        if p <= T::zero() || p >= T::one() {
            return Err(Error::DegenerateP);
        }
        let q = T::one() - p.clone();
        let den = p.clone() * p.clone() - p.clone() + T::one();
        let u = vec![
            p.clone() * p.clone() / den.clone(),
            p.clone() * q.clone() / den.clone(),
            q.clone() * q.clone() / den,
        ];
        Ok(Self::from_parts(p, u))
    }

    /// A model with an arbitrary initial vector `u`, for negative controls.
    pub fn from_parts(p: T, u: Vec<T>) -> Self {
        let q = T::one() - p.clone();
        let z = T::zero();
        let pm = vec![
            vec![p.clone(), q.clone(), z.clone()],
            vec![p.clone(), z.clone(), q.clone()],
            vec![z, p.clone(), q],
        ];
        AsymModel { p, pm, u }
    }

    /// Rejects fields other than the golden ratio.
    pub fn for_field(field: &BetaField, p: T) -> Result<Self> {
        if !field.is_golden() {
            return Err(Error::NotGolden);
        }
        Self::new(p)
    }

    pub fn p(&self) -> &T {
        &self.p
    }

    pub fn transition(&self) -> &Matrix<T> {
        &self.pm
    }

    /// `(u_e0, u_s, u_e1)`.
    pub fn u(&self) -> &[T] {
        &self.u
    }

    pub fn is_stationary(&self) -> bool {
        vec_mat(&self.u, &self.pm).iter().zip(&self.u).all(|(a, b)| a.approx_eq(b))
    }

    /// `Q_p([j_1 ... j_k]) = u_{j_1} p_{j_1 j_2} ... p_{j_{k-1} j_k}`.
    pub fn q_p(&self, word: &[YState]) -> T {
        let Some(first) = word.first() else { return T::one() };
        word.windows(2)
            .fold(self.u[first.index()].clone(), |acc, w| acc * self.pm[w[0].index()][w[1].index()].clone())
    }

    /// `m_p([i_1 ... i_k]) = p^{#0} (1-p)^{#1}`.
    pub fn binary_mass(&self, bits: &[u8]) -> T {
        let ones = bits.iter().filter(|&&b| b == 1).count() as u32;
        let zeros = bits.len() as u32 - ones;
        self.p.powi(zeros) * (T::one() - self.p.clone()).powi(ones)
    }

    /// Exhaustive check of `m_p = Q_p ∘ ψ^{-1}` on all binary cylinders of
    /// length `1..=k_max`.
    pub fn verify_pushforward(&self, k_max: usize) -> Result<PushforwardReport> {
        const MAX: usize = 14;
        if k_max > MAX {
            return Err(Error::HorizonTooLarge { k: k_max, max: MAX });
        }
        let mut checked = 0usize;
        for k in 1..=k_max {
            let failure = (0u32..1 << k).into_par_iter().find_first(|&w| {
                let bits: Vec<u8> = (0..k).map(|i| ((w >> (k - 1 - i)) & 1) as u8).collect();
                let (a, b) = psi_preimage(&bits).expect("nonempty word");
                !(self.q_p(&a) + self.q_p(&b)).approx_eq(&self.binary_mass(&bits))
            });
            if let Some(w) = failure {
                let bits = (0..k).map(|i| ((w >> (k - 1 - i)) & 1) as u8).collect();
                return Ok(PushforwardReport { checked_to: k - 1, cylinders: checked, failure: Some(bits) });
            }
            checked += 1 << k;
        }
        Ok(PushforwardReport { checked_to: k_max, cylinders: checked, failure: None })
    }
}

pub type ExactAsymModel = AsymModel<Rational>;
pub type AsymModelF64 = AsymModel<f64>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PushforwardReport {
    /// Every cylinder up to this length matched.
    pub checked_to: usize,
    pub cylinders: usize,
    /// First mismatching binary word.
    pub failure: Option<Vec<u8>>,
}

impl PushforwardReport {
    pub fn success(&self) -> bool {
        self.failure.is_none()
    }
}

/// ψ on a finite word: symbol `j` is emitted for every position with a
/// successor, so a word of length `n` gives `n - 1` bits.
pub fn psi_apply(y: &[YState]) -> Result<Vec<u8>> {
    if y.last() == Some(&YState::S) {
        return Err(Error::MalformedWord("word ends in s".into()));
    }
    y.windows(2)
        .map(|w| match (w[0], w[1]) {
            (YState::E0, _) => Ok(0),
            (YState::E1, _) => Ok(1),
            (YState::S, YState::E1) => Ok(0),
            (YState::S, YState::E0) => Ok(1),
            (YState::S, YState::S) => Err(Error::MalformedWord("s followed by s".into())),
        })
        .collect()
}

/// The two Y-cylinders whose union is `ψ^{-1}[i_1 ... i_k]`: one of length
/// `k` ending in `e_{i_k}`, one of length `k + 1` ending in `s e_{1-i_k}`.
pub fn psi_preimage(bits: &[u8]) -> Result<(Vec<YState>, Vec<YState>)> {
    let (&last, rest) = bits.split_last().ok_or_else(|| Error::MalformedWord("empty word".into()))?;
    let mut a = vec![YState::e(last)];
    let mut b = vec![YState::S, YState::e(1 - last)];
    let mut next = last;
    for &i in rest.iter().rev() {
        for w in [&mut a, &mut b] {
            let head = if i == next || w[0] == YState::S { YState::e(i) } else { YState::S };
            w.insert(0, head);
        }
        next = i;
    }
    Ok((a, b))
}

fn cell_state(model: &MarkovModel, cell: usize) -> YState {
    if model.is_s(cell) {
        YState::S
    } else if cell == 0 {
        YState::E0
    } else {
        YState::E1
    }
}

/// `Q_p([α_1..α_k]) p^{(k-M_k) - Σ_{i>M_k} ω_i} (1-p)^{Σ_{i>M_k} ω_i} u_{e_{1-ω_k}}`.
pub fn asym_ball_measure(
    asym: &ExactAsymModel,
    model: &MarkovModel,
    state: &mut RandomState,
    k: usize,
) -> Result<Rational> {
    if !model.field().is_golden() {
        return Err(Error::NotGolden);
    }
    let alpha = model.alpha_code(state, k)?;
    let word: Vec<YState> = alpha.iter().map(|&c| cell_state(model, c)).collect();
    let m = word.iter().filter(|&&y| y == YState::S).count();
    let mut sigma = 0u32;
    for i in m + 1..=k {
        sigma += state.omega.symbol(i)? as u32;
    }
    let w_k = state.omega.symbol(k)?;
    let p = asym.p().clone();
    let q = Rational::from_integer(1.into()) - &p;
    Ok(asym.q_p(&word)
        * p.powi((k - m) as u32 - sigma)
        * q.powi(sigma)
        * asym.u()[YState::e(1 - w_k).index()].clone())
}

/// `H(p) = -p log p - (1-p) log(1-p)`.
pub fn entropy(p: f64) -> f64 {
    let q = 1.0 - p;
    -(p * p.ln()) - q * q.ln()
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::DegenerateP)
    }
}

fn ln_golden() -> f64 {
    ((1.0 + 5f64.sqrt()) / 2.0).ln()
}

/// `H(p)/logβ · (2 - ratio)`.
pub fn asym_pointwise(p: f64, ratio: f64) -> Result<f64> {
    check_p(p)?;
    if !(0.0..=1.0).contains(&ratio) {
        return Err(Error::RatioOutOfRange(format!("ratio = {ratio}")));
    }
    Ok(entropy(p) / ln_golden() * (2.0 - ratio))
}

/// The a.e. value: [`asym_pointwise`] at `u_s = p(1-p)/(p²-p+1)`.
pub fn asym_ae_dimension<T: Scalar>(asym: &AsymModel<T>) -> f64 {
    let p = asym.p().to_f64();
    asym_pointwise(p, asym.u()[1].to_f64()).expect("model has 0 < p < 1")
}

/// `(-log p / logβ, -log(1-p) / logβ)`: the local dimensions at 0 and β.
pub fn endpoint_dims(p: f64) -> Result<(f64, f64)> {
    check_p(p)?;
    let lb = ln_golden();
    Ok((-p.ln() / lb, -(1.0 - p).ln() / lb))
}

/// `-(log max(p,1-p) + γ)/logβ <= d <= -(log min(p,1-p) + γ)/logβ`.
pub fn asym_mu_bounds(p: f64, gamma: f64) -> Result<DimensionReport> {
    check_p(p)?;
    if !(0.0..=std::f64::consts::LN_2 + 1e-12).contains(&gamma) {
        return Err(Error::RatioOutOfRange(format!("gamma = {gamma}")));
    }
    let lb = ln_golden();
    let (hi, lo) = (p.max(1.0 - p), p.min(1.0 - p));
    Ok(DimensionReport {
        metric: Metric::RhoBar,
        lower: -(hi.ln() + gamma) / lb,
        upper: -(lo.ln() + gamma) / lb,
        ae_value: None,
        unique_value: None,
        horizons: Vec::new(),
    })
}

/// `Σ_ω p^{(k-M_k) - Σ_{i>M_k} ω_i} (1-p)^{Σ_{i>M_k} ω_i}` over all
/// `ω ∈ {0,1}^k`; equals `N_k(x)` for every `p`.
pub fn weighted_branch_count(maps: &BetaMaps, x: &FieldElt, k: usize, p: &Rational) -> Result<Rational> {
    const MAX: usize = 14;
    if !maps.field().is_golden() {
        return Err(Error::NotGolden);
    }
    if k > MAX {
        return Err(Error::HorizonTooLarge { k, max: MAX });
    }
    let zero = Rational::from_integer(0.into());
    if *p <= zero || *p >= Rational::from_integer(1.into()) {
        return Err(Error::DegenerateP);
    }
    let q = Rational::from_integer(1.into()) - p;
    (0u32..1 << k)
        .into_par_iter()
        .map(|w| -> Result<Rational> {
            let bits: Vec<u8> = (0..k).map(|i| ((w >> i) & 1) as u8).collect();
            let mut state = RandomState::new(Omega::finite(&bits), x.clone());
            for _ in 0..k {
                maps.k_step(&mut state)?;
            }
            let m = state.omega_consumed();
            let sigma: u32 = bits[m..].iter().map(|&b| b as u32).sum();
            Ok(p.powi((k - m) as u32 - sigma) * q.powi(sigma))
        })
        .try_reduce(|| zero.clone(), |a, b| Ok(a + b))
}
