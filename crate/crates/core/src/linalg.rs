//! Dense linear algebra over any [`Scalar`], and the Parry measure.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Matrix<T> = Vec<Vec<T>>;

/// Basis of the right null space of `m`, by Gauss-Jordan elimination.
///
/// Exact scalars pivot on the first nonzero entry; floating scalars use
/// partial pivoting and treat negligible entries as zero.
pub fn kernel<T: Scalar>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut a: Matrix<T> = m.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let pick = if T::EXACT {
            (r..rows).find(|&i| !a[i][c].is_negligible())
        } else {
            (r..rows)
                .filter(|&i| !a[i][c].is_negligible())
                .max_by(|&i, &j| a[i][c].abs_val().partial_cmp(&a[j][c].abs_val()).expect("NaN pivot"))
        };
        let Some(p) = pick else { continue };
        a.swap(r, p);
        let inv = T::one() / a[r][c].clone();
        for x in a[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_negligible() {
                let f = a[i][c].clone();
                let pivot_row = a[r].clone();
                for (x, pv) in a[i].iter_mut().zip(pivot_row) {
                    *x = x.clone() - pv * f.clone();
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![T::zero(); cols];
            v[f] = T::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[row][f].clone();
            }
            v
        })
        .collect()
}

pub fn mat_vec<T: Scalar>(m: &[Vec<T>], v: &[T]) -> Vec<T> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
        .collect()
}

pub fn vec_mat<T: Scalar>(v: &[T], m: &[Vec<T>]) -> Vec<T> {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols)
        .map(|j| v.iter().zip(m).fold(T::zero(), |acc, (a, row)| acc + a.clone() * row[j].clone()))
        .collect()
}

/// The Markov measure of maximal entropy on the subshift given by a 0/1
/// matrix whose Perron eigenvalue is the integer `eigenvalue`.
#[derive(Debug, Clone, PartialEq)]
pub struct Parry<T> {
    pub eigenvalue: u32,
    /// Right eigenvector, normalised to sum 1.
    pub v: Vec<T>,
    /// `p_ij = a_ij v_j / (λ v_i)`.
    pub p: Matrix<T>,
}

impl<T: Scalar> Parry<T> {
    pub fn from_adjacency(a: &[Vec<u8>], eigenvalue: u32) -> Result<Self> {
        let n = a.len();
        let lam = T::from_ratio(eigenvalue as i64, 1);
        let shifted: Matrix<T> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let e = T::from_ratio(a[i][j] as i64, 1);
                        if i == j {
                            e - lam.clone()
                        } else {
                            e
                        }
                    })
                    .collect()
            })
            .collect();
        let ker = kernel(&shifted);
        if ker.len() != 1 {
            return Err(Error::EigenvalueMismatch { eigenvalue, dim: ker.len() });
        }
        let mut v = ker.into_iter().next().expect("one kernel vector");
        let total = v.iter().fold(T::zero(), |acc, x| acc + x.clone());
        if total.is_negligible() {
            return Err(Error::InvalidModel("eigenvector sums to zero".into()));
        }
        for x in v.iter_mut() {
            *x = x.clone() / total.clone();
        }
        if v.iter().any(|x| *x <= T::zero() || x.is_negligible()) {
            return Err(Error::InvalidModel("eigenvector is not strictly positive".into()));
        }
        let p = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if a[i][j] == 1 {
                            v[j].clone() / (lam.clone() * v[i].clone())
                        } else {
                            T::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Parry { eigenvalue, v, p })
    }

    /// `Q([j_1 ... j_m]) = v_{j_m} / λ^{m-1}`, zero for inadmissible words.
    pub fn cylinder(&self, a: &[Vec<u8>], path: &[usize]) -> T {
        let Some(&last) = path.last() else { return T::one() };
        if path.windows(2).any(|w| a[w[0]][w[1]] == 0) {
            return T::zero();
        }
        let lam = T::from_ratio(self.eigenvalue as i64, 1);
        self.v[last].clone() / lam.powi(path.len() as u32 - 1)
    }

    /// `-Σ_i v_i Σ_j p_ij log p_ij`, in `f64`.
    pub fn entropy(&self) -> f64 {
        self.v
            .iter()
            .zip(&self.p)
            .map(|(vi, row)| {
                let h: f64 = row
                    .iter()
                    .map(|p| p.to_f64())
                    .filter(|&p| p > 0.0)
                    .map(|p| -p * p.ln())
                    .sum();
                vi.to_f64() * h
            })
            .sum()
    }
}
