//! The finite set F, the Markov partition it induces, the adjacency matrix
//! and the Parry measure of maximal entropy.
//!
//! Cells are numbered from 0 in this API; reports print them from 1.

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::beta_maps::{t_map, BetaMaps, DigitRecord, Marked, RandomState, Region};
use crate::error::{Error, Result};
use crate::linalg::{mat_vec, vec_mat, Parry};
use crate::numberfield::{BetaField, FieldElt};
use crate::scalar::Rational;

pub const DEFAULT_CLOSURE_CAP: usize = 10_000;

/// Closure of the seed points under every `T_k` that keeps them in the
/// closed domain, sorted increasingly.
pub fn orbit_closure_f(maps: &BetaMaps, cap: usize) -> Result<Vec<FieldElt>> {
    let field = maps.field();
    let floor = maps.floor() as i64;
    let inv = maps.inv_beta();
    let c = maps.c();
    let top = maps.top();
    let mut seeds = vec![field.zero(), top.clone(), field.one(), top.add_int(-1)];
    for k in 0..=floor {
        seeds.push(inv.scale_int(k));
        seeds.push(c + &inv.scale_int(k));
    }
    let mut seen: HashSet<FieldElt> = HashSet::new();
    let mut queue = VecDeque::new();
    for s in seeds {
        if maps.contains(&s)? && seen.insert(s.clone()) {
            queue.push_back(s);
        }
    }
    while let Some(y) = queue.pop_front() {
        for k in 0..=floor as u32 {
            let z = t_map(k, &y);
            if !seen.contains(&z) && maps.contains(&z)? {
                if seen.len() >= cap {
                    return Err(Error::ClosureExceededCap(cap));
                }
                seen.insert(z.clone());
                queue.push_back(z);
            }
        }
    }
    let mut marked = seen.into_iter().map(Marked::new).collect::<Result<Vec<_>>>()?;
    sort_marked(&mut marked)?;
    Ok(marked.into_iter().map(|m| m.elt).collect())
}

fn sort_marked(v: &mut [Marked]) -> Result<()> {
    let mut err = None;
    v.sort_by(|a, b| match a.cmp(b) {
        Ok(o) => o,
        Err(e) => {
            err.get_or_insert(e);
            Ordering::Equal
        }
    });
    err.map_or(Ok(()), Err)
}

/// Regions of the open cells `(F_j, F_{j+1})` and the indices of the
/// S-cells. Fails if some `S_k` is not exactly one cell.
pub fn build_partition(maps: &BetaMaps, f: &[FieldElt]) -> Result<(Vec<Region>, Vec<usize>)> {
    let half = Rational::new(1.into(), 2.into());
    let cells: Vec<Region> = f
        .windows(2)
        .map(|w| maps.classify(&(&w[0] + &w[1]).scale_rational(&half)))
        .collect::<Result<_>>()?;
    for k in 1..=maps.floor() {
        let (l, r) = maps.switch_region(k);
        let whole = f.windows(2).any(|w| &w[0] == l && &w[1] == r);
        if !whole {
            return Err(Error::P3Violation(k));
        }
    }
    let s = cells.iter().enumerate().filter(|(_, r)| r.is_switch()).map(|(j, _)| j).collect();
    Ok((cells, s))
}

/// `a_ij = 1` iff some admissible map sends cell `i` over all of cell `j`.
pub fn adjacency(f: &[FieldElt], cells: &[Region]) -> Result<Vec<Vec<u8>>> {
    let marked = f.iter().cloned().map(Marked::new).collect::<Result<Vec<_>>>()?;
    let l = cells.len();
    let mut a = vec![vec![0u8; l]; l];
    for (i, region) in cells.iter().enumerate() {
        for d in region.digits().as_vec() {
            let lo = Marked::new(t_map(d, &f[i]))?;
            let hi = Marked::new(t_map(d, &f[i + 1]))?;
            for j in 0..l {
                let left_in = marked[j].cmp(&lo)? != Ordering::Less;
                let right_in = marked[j + 1].cmp(&hi)? != Ordering::Greater;
                if left_in && right_in {
                    a[i][j] = 1;
                } else {
                    let meets = marked[j].cmp(&hi)? == Ordering::Less
                        && marked[j + 1].cmp(&lo)? == Ordering::Greater;
                    if meets {
                        return Err(Error::PartialOverlap { from: i + 1, to: j + 1 });
                    }
                }
            }
        }
    }
    Ok(a)
}

/// Where a point sits relative to F.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Cell(usize),
    /// Exactly the point `F_j`.
    OnF(usize),
}

#[derive(Debug, Clone)]
pub struct MarkovModel {
    maps: BetaMaps,
    f: Vec<FieldElt>,
    marked: Vec<Marked>,
    cells: Vec<Region>,
    s: Vec<usize>,
    a: Vec<Vec<u8>>,
    parry: Parry<Rational>,
}

impl MarkovModel {
    pub fn build(field: &BetaField) -> Result<Self> {
        Self::build_with_cap(field, DEFAULT_CLOSURE_CAP)
    }

    pub fn from_digits(digits: &[u32]) -> Result<Self> {
        Self::build(&crate::numberfield::field_from_digits(digits)?)
    }

    pub fn build_with_cap(field: &BetaField, cap: usize) -> Result<Self> {
        let maps = BetaMaps::new(field)?;
        let f = orbit_closure_f(&maps, cap)?;
        let (cells, s) = build_partition(&maps, &f)?;
        let a = adjacency(&f, &cells)?;
        let parry = Parry::from_adjacency(&a, field.ceil())?;
        let marked = f.iter().cloned().map(Marked::new).collect::<Result<Vec<_>>>()?;
        Ok(MarkovModel { maps, f, marked, cells, s, a, parry })
    }

    pub fn maps(&self) -> &BetaMaps {
        &self.maps
    }

    pub fn field(&self) -> &BetaField {
        self.maps.field()
    }

    /// The sorted set F.
    pub fn f(&self) -> &[FieldElt] {
        &self.f
    }

    /// Number of cells `L = |F| - 1`.
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Region] {
        &self.cells
    }

    /// Indices of the S-cells.
    pub fn s(&self) -> &[usize] {
        &self.s
    }

    pub fn is_s(&self, j: usize) -> bool {
        self.cells[j].is_switch()
    }

    pub fn a(&self) -> &[Vec<u8>] {
        &self.a
    }

    pub fn parry(&self) -> &Parry<Rational> {
        &self.parry
    }

    pub fn v(&self) -> &[Rational] {
        &self.parry.v
    }

    pub fn p(&self) -> &[Vec<Rational>] {
        &self.parry.p
    }

    pub fn ceil(&self) -> u32 {
        self.parry.eigenvalue
    }

    /// `Q([j_1 ... j_m])`.
    pub fn cylinder_q(&self, path: &[usize]) -> Rational {
        self.parry.cylinder(&self.a, path)
    }

    /// `(μ(S), μ(C_1))`.
    pub fn state_measures(&self) -> (Rational, Rational) {
        let mu_s = self.s.iter().fold(Rational::from_integer(0.into()), |acc, &j| acc + &self.parry.v[j]);
        (mu_s, self.parry.v[0].clone())
    }

    pub fn mu_s(&self) -> Rational {
        self.state_measures().0
    }

    pub fn mu_c1(&self) -> Rational {
        self.parry.v[0].clone()
    }

    pub fn locate(&self, x: &FieldElt) -> Result<Location> {
        self.locate_marked(&Marked::new(x.clone())?)
    }

    pub(crate) fn locate_marked(&self, x: &Marked) -> Result<Location> {
        let last = self.marked.len() - 1;
        if x.cmp(&self.marked[0])? == Ordering::Less || x.cmp(&self.marked[last])? == Ordering::Greater {
            return Err(Error::OutOfDomain);
        }
        // Invariant: F_lo <= x <= F_hi.
        let (mut lo, mut hi) = (0, last);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            match x.cmp(&self.marked[mid])? {
                Ordering::Less => hi = mid,
                Ordering::Equal => return Ok(Location::OnF(mid)),
                Ordering::Greater => lo = mid,
            }
        }
        if x.cmp(&self.marked[lo])? == Ordering::Equal {
            Ok(Location::OnF(lo))
        } else if x.cmp(&self.marked[hi])? == Ordering::Equal {
            Ok(Location::OnF(hi))
        } else {
            Ok(Location::Cell(lo))
        }
    }

    /// Cell of `x`, with the endpoints 0 and `⌊β⌋/(β-1)` assigned to the
    /// first and last cell. Any other point of F gives `None`.
    pub fn cell_of(&self, x: &FieldElt) -> Result<Option<usize>> {
        Ok(match self.locate(x)? {
            Location::Cell(j) => Some(j),
            Location::OnF(0) => Some(0),
            Location::OnF(j) if j == self.f.len() - 1 => Some(self.len() - 1),
            Location::OnF(_) => None,
        })
    }

    /// `k` steps of `K` with the α-code filled in. `HitF { step }` reports
    /// the 1-based index of the first iterate equal to an interior point
    /// of F.
    pub fn run(&self, state: &mut RandomState, k: usize) -> Result<Vec<DigitRecord>> {
        let mut out = Vec::with_capacity(k);
        for step in 1..=k {
            let cell = self.cell_of(&state.x)?.ok_or(Error::HitF { step })?;
            let mut rec = self.maps.k_step(state)?;
            debug_assert_eq!(rec.region.is_switch(), self.is_s(cell));
            rec.alpha = Some(cell);
            out.push(rec);
        }
        Ok(out)
    }

    /// `α_1 ... α_k` (0-based cell indices).
    pub fn alpha_code(&self, state: &mut RandomState, k: usize) -> Result<Vec<usize>> {
        Ok(self.run(state, k)?.into_iter().map(|r| r.alpha.expect("filled by run")).collect())
    }

    /// Checks the structural properties of the model. Q-additivity is
    /// tested on `samples` random admissible words drawn with `seed`.
    pub fn validate(&self, samples: usize, seed: u64) -> Validation {
        let l = self.len();
        let v = &self.parry.v;
        let p = &self.parry.p;
        let zero = Rational::from_integer(0.into());
        let one = Rational::from_integer(1.into());
        let lam = Rational::from_integer(self.ceil().into());
        let a_q: Vec<Vec<Rational>> =
            self.a.iter().map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect()).collect();
        let mut checks = Vec::new();
        let mut push = |name: &str, passed: bool, detail: String| {
            checks.push(Check { name: name.to_string(), passed, detail });
        };

        let p3 = (1..=self.maps.floor()).all(|k| {
            let (lft, rgt) = self.maps.switch_region(k);
            self.f.windows(2).any(|w| &w[0] == lft && &w[1] == rgt)
        }) && self.s.len() == self.maps.floor() as usize;
        push("p3", p3, format!("{} S-cells for floor(beta) = {}", self.s.len(), self.maps.floor()));

        let p5 = self.s.iter().all(|&i| (0..l).all(|j| self.a[i][j] == u8::from(j == 0 || j == l - 1)));
        push("p5", p5, "S rows of A are e_1 + e_L".into());

        let av = mat_vec(&a_q, v);
        let eig = av.iter().zip(v).all(|(x, y)| *x == &lam * y);
        push("eigenvector", eig, format!("A v = {} v", self.ceil()));

        let sum = v.iter().fold(zero.clone(), |acc, x| acc + x);
        push("normalised", sum == one && v.iter().all(|x| *x > zero), "sum v = 1, v > 0".into());

        let stoch = p.iter().all(|row| row.iter().fold(zero.clone(), |acc, x| acc + x) == one)
            && (0..l).all(|i| (0..l).all(|j| (p[i][j] > zero) == (self.a[i][j] == 1)));
        push("row_stochastic", stoch, "rows of P sum to 1, support of P = support of A".into());

        let vp = vec_mat(v, p);
        push("stationary", vp == *v, "v P = v".into());

        let mirror = (0..l).all(|i| (0..l).all(|j| self.a[i][j] == self.a[l - 1 - i][l - 1 - j]));
        push("mirror_symmetry", mirror, "a_ij = a_(L+1-i)(L+1-j)".into());

        let (ok, detail) = self.check_additivity(samples, seed);
        push("q_additivity", ok, detail);

        Validation { checks }
    }

    fn check_additivity(&self, samples: usize, seed: u64) -> (bool, String) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = self.len();
        for n in 0..samples {
            let len = rng.random_range(1..=6);
            let mut w = vec![rng.random_range(0..l)];
            while w.len() < len {
                let last = *w.last().expect("nonempty");
                let succ: Vec<usize> = (0..l).filter(|&j| self.a[last][j] == 1).collect();
                w.push(succ[rng.random_range(0..succ.len())]);
            }
            let parent = self.cylinder_q(&w);
            let children = (0..l).fold(Rational::from_integer(0.into()), |acc, j| {
                let mut c = w.clone();
                c.push(j);
                acc + self.cylinder_q(&c)
            });
            if parent != children {
                return (false, format!("word {} {:?}", n, w));
            }
        }
        (true, format!("{samples} random admissible words"))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Validation {
    pub checks: Vec<Check>,
}

impl Validation {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}
