//! Truncated bosonic Fock bases.
//!
//! Two mode families occur. Full-interval modes `A_k` carry frequency index
//! `k`, Neumann split modes `a_m` carry `m - 1/2`. Weighted levels are stored
//! doubled (`2 Σ w_k n_k`) so that both families use exact integer arithmetic.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// Frequency convention of a mode family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModeFamily {
    /// Weights `w_k = k` (full interval, or Dirichlet split intervals).
    FullInteger,
    /// Weights `w_m = m - 1/2` (Neumann split intervals).
    HalfInteger,
}

impl ModeFamily {
    /// Twice the weight of mode `k` (1-based).
    #[inline]
    pub fn weight2(self, k: usize) -> u32 {
        match self {
            ModeFamily::FullInteger => 2 * k as u32,
            ModeFamily::HalfInteger => 2 * k as u32 - 1,
        }
    }
}

/// Occupation numbers `n_1, n_2, ...` of a single Fock state.
///
/// Trailing zeros are stripped on construction, so equal states compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeOccupation {
    occupations: Vec<u32>,
    family: ModeFamily,
}

impl ModeOccupation {
    pub fn new(mut occupations: Vec<u32>, family: ModeFamily) -> Self {
        while occupations.last() == Some(&0) {
            occupations.pop();
        }
        Self { occupations, family }
    }

    pub fn vacuum(family: ModeFamily) -> Self {
        Self { occupations: Vec::new(), family }
    }

    /// Occupations indexed from mode 1 (`occupations()[0]` is `n_1`).
    pub fn occupations(&self) -> &[u32] {
        &self.occupations
    }

    pub fn family(&self) -> ModeFamily {
        self.family
    }

    /// Occupation of mode `k` (1-based), zero beyond the stored range.
    #[inline]
    pub fn get(&self, k: usize) -> u32 {
        self.occupations.get(k - 1).copied().unwrap_or(0)
    }

    /// Highest mode with non-zero occupation, 0 for the vacuum.
    pub fn max_mode(&self) -> usize {
        self.occupations.len()
    }

    /// Total number of quanta `Σ n_k`.
    pub fn total(&self) -> u32 {
        self.occupations.iter().sum()
    }

    /// `2 Σ w_k n_k`.
    pub fn level2(&self) -> u32 {
        self.occupations
            .iter()
            .enumerate()
            .map(|(i, &n)| self.family.weight2(i + 1) * n)
            .sum()
    }

    /// Weighted level `Σ w_k n_k`.
    pub fn level(&self) -> f64 {
        self.level2() as f64 / 2.0
    }

    /// Copy with occupation of mode `k` shifted by `delta`, `None` if it would go negative.
    pub fn shifted(&self, k: usize, delta: i32) -> Option<Self> {
        let current = self.get(k) as i64 + delta as i64;
        if current < 0 {
            return None;
        }
        let mut occ = self.occupations.clone();
        if occ.len() < k {
            occ.resize(k, 0);
        }
        occ[k - 1] = current as u32;
        Some(Self::new(occ, self.family))
    }

    /// `mode:count` pairs separated by spaces; empty for the vacuum.
    pub fn label(&self) -> String {
        let mut out = String::new();
        for (i, &n) in self.occupations.iter().enumerate() {
            if n > 0 {
                if !out.is_empty() {
                    out.push(' ');
                }
                let _ = write!(out, "{}:{}", i + 1, n);
            }
        }
        out
    }
}

/// Ordered truncated basis together with its inverse index.
#[derive(Clone, Debug)]
pub struct BasisTable {
    states: Vec<ModeOccupation>,
    index: HashMap<ModeOccupation, usize>,
    family: ModeFamily,
    cutoff2: u32,
    mode_count: usize,
}

impl BasisTable {
    /// All states of `family` whose weighted level does not exceed the weight
    /// of a single quantum in mode `mode_count`.
    pub fn enumerate(family: ModeFamily, mode_count: usize) -> Self {
        let cutoff2 = if mode_count == 0 { 0 } else { family.weight2(mode_count) };
        Self::with_cutoff(family, mode_count, cutoff2)
    }

    /// All states over modes `1..=mode_count` with doubled level `≤ cutoff2`.
    pub fn with_cutoff(family: ModeFamily, mode_count: usize, cutoff2: u32) -> Self {
        let mut states = Vec::new();
        let mut current = vec![0u32; mode_count];
        fill(family, &mut current, 0, cutoff2, &mut states);
        states.sort_by(|a, b| a.level2().cmp(&b.level2()).then_with(|| a.occupations.cmp(&b.occupations)));
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Self { states, index, family, cutoff2, mode_count }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[ModeOccupation] {
        &self.states
    }

    pub fn state(&self, ordinal: usize) -> &ModeOccupation {
        &self.states[ordinal]
    }

    pub fn index_of(&self, state: &ModeOccupation) -> Option<usize> {
        if state.family != self.family {
            return None;
        }
        self.index.get(state).copied()
    }

    pub fn family(&self) -> ModeFamily {
        self.family
    }

    /// Largest mode kept, `s`.
    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    /// Dimensionless cutoff on the weighted level.
    pub fn cutoff(&self) -> f64 {
        self.cutoff2 as f64 / 2.0
    }

    pub fn cutoff2(&self) -> u32 {
        self.cutoff2
    }

    /// CSV dump with columns `ordinal, level, occupations`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("ordinal,level,occupations\n");
        for (i, s) in self.states.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", i, s.level(), s.label());
        }
        out
    }
}

fn fill(family: ModeFamily, current: &mut [u32], pos: usize, remaining2: u32, out: &mut Vec<ModeOccupation>) {
    if pos == current.len() {
        out.push(ModeOccupation::new(current.to_vec(), family));
        return;
    }
    let w = family.weight2(pos + 1);
    let mut n = 0;
    while n * w <= remaining2 {
        current[pos] = n;
        fill(family, current, pos + 1, remaining2 - n * w, out);
        n += 1;
    }
    current[pos] = 0;
}

/// Full-interval basis with `Σ k n_k ≤ s_F`.
pub fn enumerate_full_basis(s_full: usize) -> BasisTable {
    BasisTable::enumerate(ModeFamily::FullInteger, s_full)
}

/// Neumann split-interval basis with `Σ (m - 1/2) n_m ≤ s - 1/2`.
pub fn enumerate_half_mode_basis(s: usize) -> BasisTable {
    BasisTable::enumerate(ModeFamily::HalfInteger, s)
}

/// Row-major tensor product of a left and a right basis.
#[derive(Clone, Debug)]
pub struct ProductBasis {
    pub left: BasisTable,
    pub right: BasisTable,
}

impl ProductBasis {
    pub fn dim(&self) -> usize {
        self.left.dim() * self.right.dim()
    }

    #[inline]
    pub fn ordinal(&self, left: usize, right: usize) -> usize {
        left * self.right.dim() + right
    }

    #[inline]
    pub fn split(&self, ordinal: usize) -> (usize, usize) {
        (ordinal / self.right.dim(), ordinal % self.right.dim())
    }
}

pub fn product_basis(left: BasisTable, right: BasisTable) -> crate::Result<ProductBasis> {
    if left.family() != right.family() {
        return Err(crate::Error::Config(
            "left and right split bases must use the same mode family".into(),
        ));
    }
    Ok(ProductBasis { left, right })
}
