//! Derivatives of `exp(T(J))` at `J = 0` for a quadratic exponent `T`.
//!
//! A derivative of order `|ν|` is a sum over complete pairings of the
//! derivative indices; each pair `(i, j)` contributes the second derivative
//! `T[i, j]`. Pairings are enumerated once per multiset of pairs as
//! lexicographically ordered strings and weighted by their multiplicity.

use std::cmp::Ordering;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_traits::One;

use crate::mode_splitting::{GammaSet, SqueezeKernel};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    L,
    R,
}

/// A derivative variable: `j_{m,σ}` for split modes or `J_k` for full modes.
///
/// Ordering: all left split modes, then right split modes, then full modes,
/// each by mode number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DerivIndex {
    Split { side: Side, mode: usize },
    Full { mode: usize },
}

impl DerivIndex {
    fn key(&self) -> (u8, usize) {
        match *self {
            DerivIndex::Split { side: Side::L, mode } => (0, mode),
            DerivIndex::Split { side: Side::R, mode } => (1, mode),
            DerivIndex::Full { mode } => (2, mode),
        }
    }

    pub fn mode(&self) -> usize {
        match *self {
            DerivIndex::Split { mode, .. } | DerivIndex::Full { mode } => mode,
        }
    }
}

impl PartialOrd for DerivIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DerivIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl std::fmt::Display for DerivIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DerivIndex::Split { side: Side::L, mode } => write!(f, "jL{mode}"),
            DerivIndex::Split { side: Side::R, mode } => write!(f, "jR{mode}"),
            DerivIndex::Full { mode } => write!(f, "J{mode}"),
        }
    }
}

/// Multi-index `ν`: distinct sorted indices with multiplicities `n_i ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivativeSpec {
    entries: Vec<(DerivIndex, u32)>,
}

impl DerivativeSpec {
    /// Merges repeated indices, drops zero multiplicities and sorts.
    pub fn new(entries: impl IntoIterator<Item = (DerivIndex, u32)>) -> Self {
        let mut v: Vec<(DerivIndex, u32)> = entries.into_iter().filter(|e| e.1 > 0).collect();
        v.sort_by_key(|a| a.0);
        let mut merged: Vec<(DerivIndex, u32)> = Vec::with_capacity(v.len());
        for (i, n) in v {
            match merged.last_mut() {
                Some(last) if last.0 == i => last.1 += n,
                _ => merged.push((i, n)),
            }
        }
        Self { entries: merged }
    }

    pub fn entries(&self) -> &[(DerivIndex, u32)] {
        &self.entries
    }

    /// `|ν| = Σ n_i`.
    pub fn order(&self) -> u32 {
        self.entries.iter().map(|e| e.1).sum()
    }
}

/// One lexicographically ordered pairing; each pair carries its power `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairString {
    pub pairs: Vec<((DerivIndex, DerivIndex), u32)>,
}

impl PairString {
    fn label(&self) -> String {
        let mut out = String::new();
        for ((a, b), p) in &self.pairs {
            if !out.is_empty() {
                out.push(' ');
            }
            let _ = write!(out, "({a},{b})");
            if *p > 1 {
                let _ = write!(out, "^{p}");
            }
        }
        out
    }
}

/// All lexicographically ordered complete pairings of `ν`, in emission order.
///
/// Odd `|ν|` admits no pairing and yields an empty list.
pub fn enumerate_pairings(nu: &DerivativeSpec) -> Vec<PairString> {
    let idx: Vec<DerivIndex> = nu.entries.iter().map(|e| e.0).collect();
    let mut residual: Vec<u32> = nu.entries.iter().map(|e| e.1).collect();
    let mut out = Vec::new();
    if nu.order() % 2 == 1 {
        return out;
    }
    let mut path: Vec<(usize, usize)> = Vec::new();
    enumerate_rec(&mut residual, &mut path, &mut |p| {
        let mut pairs: Vec<((DerivIndex, DerivIndex), u32)> = Vec::new();
        for &(a, b) in p {
            let pair = (idx[a], idx[b]);
            match pairs.last_mut() {
                Some(last) if last.0 == pair => last.1 += 1,
                _ => pairs.push((pair, 1)),
            }
        }
        out.push(PairString { pairs });
    });
    out
}

/// Candidate partners for the smallest index with residual left; the returned
/// range's lower bound enforces `pair ≥ last pair`.
#[inline]
fn next_choices(residual: &[u32], last: Option<(usize, usize)>) -> Option<(usize, usize)> {
    let i = residual.iter().position(|&r| r > 0)?;
    let lo = match last {
        Some((a, b)) if a == i => b,
        _ => i,
    };
    Some((i, lo))
}

fn enumerate_rec(residual: &mut [u32], path: &mut Vec<(usize, usize)>, emit: &mut impl FnMut(&[(usize, usize)])) {
    let Some((i, lo)) = next_choices(residual, path.last().copied()) else {
        emit(path);
        return;
    };
    for j in lo..residual.len() {
        let need_two = j == i;
        if (need_two && residual[i] < 2) || residual[j] == 0 {
            continue;
        }
        residual[i] -= 1;
        residual[j] -= 1;
        path.push((i, j));
        enumerate_rec(residual, path, emit);
        path.pop();
        residual[i] += 1;
        residual[j] += 1;
    }
}

fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// `c = Π n_i! / (2^{N_diag} Π p!)`, with `N_diag` the diagonal pair slots counted with their powers.
pub fn multiplicity(nu: &DerivativeSpec, s: &PairString) -> BigUint {
    let num = nu.entries.iter().fold(BigUint::one(), |acc, e| acc * factorial(e.1));
    let n_diag: u32 = s.pairs.iter().filter(|((a, b), _)| a == b).map(|(_, p)| *p).sum();
    let den = s.pairs.iter().fold(BigUint::one() << n_diag as usize, |acc, (_, p)| acc * factorial(*p));
    num / den
}

/// CSV listing `string_id, pairs, c_k` for debugging small `ν`.
pub fn pairings_csv(nu: &DerivativeSpec) -> String {
    let mut out = String::from("string_id,pairs,c_k\n");
    for (k, s) in enumerate_pairings(nu).iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", k + 1, s.label(), multiplicity(nu, s));
    }
    out
}

/// Pair values `T[i, j]` for every pair of derivative variables of one cut.
///
/// Global positions: left split modes, right split modes, then full modes.
#[derive(Clone, Debug)]
pub struct TContext {
    s_left: usize,
    s_right: usize,
    s_full: usize,
    table: DMatrix<f64>,
}

impl TContext {
    pub fn new(gammas: &GammaSet, kernel: &SqueezeKernel) -> Result<Self> {
        let (sl, sr, sf) = (gammas.s_left(), gammas.s_right(), gammas.s_full());
        let ns = sl + sr;
        if kernel.chi.shape() != (ns, ns) || ns != sf {
            return Err(Error::Dimension(format!(
                "χ is {:?} but the γ blocks need {ns}×{ns} with s_F = {sf}",
                kernel.chi.shape()
            )));
        }
        let mut u = DMatrix::zeros(sf, ns);
        let mut w = DMatrix::zeros(sf, ns);
        u.columns_mut(0, sl).copy_from(&gammas.gp_l);
        u.columns_mut(sl, sr).copy_from(&gammas.gp_r);
        w.columns_mut(0, sl).copy_from(&gammas.gm_l);
        w.columns_mut(sl, sr).copy_from(&gammas.gm_r);
        Ok(Self::from_blocks(&u, &w, &kernel.chi, sl))
    }

    /// Builds the table from `u = [γ^{+,L} γ^{+,R}]`, `w = [γ^{-,L} γ^{-,R}]` and `χ`.
    pub fn from_blocks(u: &DMatrix<f64>, w: &DMatrix<f64>, chi: &DMatrix<f64>, s_left: usize) -> Self {
        let ns = chi.nrows();
        let sf = u.nrows();
        let s = chi + chi.transpose();
        let ws = w * &s;
        let split_full = u - &ws;
        let full_full = (u * w.transpose() + w * u.transpose()) * 0.5 - &ws * w.transpose();
        let n = ns + sf;
        let mut table = DMatrix::zeros(n, n);
        table.view_mut((0, 0), (ns, ns)).copy_from(&(-&s));
        table.view_mut((ns, 0), (sf, ns)).copy_from(&split_full);
        table.view_mut((0, ns), (ns, sf)).copy_from(&split_full.transpose());
        table.view_mut((ns, ns), (sf, sf)).copy_from(&full_full);
        Self { s_left, s_right: ns - s_left, s_full: sf, table }
    }

    pub fn s_left(&self) -> usize {
        self.s_left
    }
    pub fn s_right(&self) -> usize {
        self.s_right
    }
    pub fn s_full(&self) -> usize {
        self.s_full
    }

    /// Full symmetric table of pair values over global positions.
    pub fn table(&self) -> &DMatrix<f64> {
        &self.table
    }

    pub fn position(&self, i: &DerivIndex) -> Option<usize> {
        let (base, count, mode) = match *i {
            DerivIndex::Split { side: Side::L, mode } => (0, self.s_left, mode),
            DerivIndex::Split { side: Side::R, mode } => (self.s_left, self.s_right, mode),
            DerivIndex::Full { mode } => (self.s_left + self.s_right, self.s_full, mode),
        };
        (mode >= 1 && mode <= count).then(|| base + mode - 1)
    }
}

/// Second derivative `∂²T/∂J_i∂J_j` at zero. Panics on indices outside the context.
pub fn t_pair_value(i: &DerivIndex, j: &DerivIndex, ctx: &TContext) -> f64 {
    let a = ctx.position(i).expect("derivative index outside the context");
    let b = ctx.position(j).expect("derivative index outside the context");
    ctx.table[(a, b)]
}

/// Weighted tree sum `Σ_strings Π T^p / (2^{N_diag} Π p!)` over a compact pair table.
///
/// Multiplying by `Π n_i!` gives the derivative. Children are summed locally,
/// so the accumulation is a pairwise summation along the tree.
pub(crate) fn tree_sum(residual: &mut [u32], vals: &[f64], n: usize, last: Option<(usize, usize)>, run: u32) -> f64 {
    let Some((i, lo)) = next_choices(residual, last) else {
        return 1.0;
    };
    let mut total = 0.0;
    for j in lo..n {
        if (j == i && residual[i] < 2) || residual[j] == 0 {
            continue;
        }
        let t = vals[i * n + j];
        if t == 0.0 {
            continue;
        }
        let same = last == Some((i, j));
        let r = if same { run + 1 } else { 1 };
        let mut w = t / r as f64;
        if i == j {
            w *= 0.5;
        }
        residual[i] -= 1;
        residual[j] -= 1;
        total += w * tree_sum(residual, vals, n, Some((i, j)), r);
        residual[i] += 1;
        residual[j] += 1;
    }
    total
}

fn factorial_f64(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `∂^ν exp(T)|_{J=0} = Σ'_k c_k Π_l T^{p_kl}`.
pub fn evaluate_derivative(nu: &DerivativeSpec, ctx: &TContext) -> f64 {
    if nu.order() % 2 == 1 {
        return 0.0;
    }
    if nu.entries.is_empty() {
        return 1.0;
    }
    let pos: Vec<usize> = nu
        .entries
        .iter()
        .map(|e| ctx.position(&e.0).expect("derivative index outside the context"))
        .collect();
    let n = pos.len();
    let vals: Vec<f64> = (0..n * n).map(|x| ctx.table[(pos[x / n], pos[x % n])]).collect();
    let mut residual: Vec<u32> = nu.entries.iter().map(|e| e.1).collect();
    let pref: f64 = nu.entries.iter().map(|e| factorial_f64(e.1)).product();
    pref * tree_sum(&mut residual, &vals, n, None, 0)
}
