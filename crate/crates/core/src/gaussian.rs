//! Covariance-matrix entropies of free Klein-Gordon states on a Dirichlet lattice.
//!
//! Sites sit at `x_n = n a`, `n = 1..=K`, `a = L/(K+1)`, and modes keep the
//! relativistic dispersion `ε_k = √((kπ/L)² + m²)`. The canonical lattice pairs are
//! `√a φ(x_n)`, `√a π(x_n)`, so `Q = a⟨φφ⟩` and `P = a⟨ππ⟩`.

use std::f64::consts::PI;
use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::linalg::sorted_eigen;
use crate::{Error, Result};

/// Symplectic eigenvalues below `½ − UNPHYSICAL_TOL` are rejected.
pub const UNPHYSICAL_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    pub k: usize,
    pub length: f64,
}

impl LatticeConfig {
    pub fn new(k: usize, length: f64) -> Result<Self> {
        if k == 0 || !(length > 0.0) {
            return Err(Error::Config(format!("lattice needs K ≥ 1 and L > 0, got K={k}, L={length}")));
        }
        Ok(Self { k, length })
    }

    /// Lattice spacing `L/(K+1)`.
    pub fn a(&self) -> f64 {
        self.length / (self.k + 1) as f64
    }

    /// Number of sites in `[0, ℓ]`; the effective cut then sits half way to the next site.
    pub fn sites_below(&self, ell: f64) -> usize {
        (((ell / self.a()) + 1e-9).floor() as usize).min(self.k)
    }

    /// Effective cut position `(j + ½) a` of a block of `j` sites.
    pub fn effective_cut(&self, sites: usize) -> f64 {
        (sites as f64 + 0.5) * self.a()
    }

    pub fn energy(&self, k: usize, m: f64) -> f64 {
        let p = k as f64 * PI / self.length;
        (p * p + m * m).sqrt()
    }

    /// Orthogonal sine transform `S_{nk} = √(2/(K+1)) sin(π n k/(K+1))`.
    fn sine_transform(&self) -> DMatrix<f64> {
        let n1 = (self.k + 1) as f64;
        DMatrix::from_fn(self.k, self.k, |n, k| (2.0 / n1).sqrt() * (PI * ((n + 1) * (k + 1)) as f64 / n1).sin())
    }
}

/// `Γ = [[Q, R], [Rᵀ, P]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix {
    pub q: DMatrix<f64>,
    pub p: DMatrix<f64>,
    pub r: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn sites(&self) -> usize {
        self.q.nrows()
    }

    pub fn gamma(&self) -> DMatrix<f64> {
        let n = self.sites();
        let mut g = DMatrix::zeros(2 * n, 2 * n);
        g.view_mut((0, 0), (n, n)).copy_from(&self.q);
        g.view_mut((0, n), (n, n)).copy_from(&self.r);
        g.view_mut((n, 0), (n, n)).copy_from(&self.r.transpose());
        g.view_mut((n, n), (n, n)).copy_from(&self.p);
        g
    }

    fn has_cross_block(&self) -> bool {
        self.r.iter().any(|&x| x != 0.0)
    }
}

fn coth_factor(e: f64, t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        1.0 / (e / (2.0 * t)).tanh()
    }
}

/// Mode-space second moments `(⟨φ_k²⟩, ⟨π_k²⟩, ⟨½{φ_k, π_k}⟩)` of a thermal state.
fn thermal_modes(m: f64, t: f64, cfg: &LatticeConfig) -> Vec<(f64, f64, f64)> {
    (1..=cfg.k)
        .map(|k| {
            let e = cfg.energy(k, m);
            let c = coth_factor(e, t);
            (c / (2.0 * e), e * c / 2.0, 0.0)
        })
        .collect()
}

fn to_position(modes: &[(f64, f64, f64)], cfg: &LatticeConfig) -> CovarianceMatrix {
    let s = cfg.sine_transform();
    let conj = |f: &dyn Fn(&(f64, f64, f64)) -> f64| {
        let d = DVector::from_iterator(modes.len(), modes.iter().map(f));
        let m = &s * DMatrix::from_diagonal(&d) * s.transpose();
        (&m + m.transpose()) * 0.5
    };
    CovarianceMatrix { q: conj(&|x| x.0), p: conj(&|x| x.1), r: conj(&|x| x.2) }
}

pub fn thermal_covariance(m: f64, t: f64, cfg: &LatticeConfig) -> Result<CovarianceMatrix> {
    if !(m >= 0.0) || !(t >= 0.0) {
        return Err(Error::Config(format!("need m ≥ 0 and T ≥ 0, got m={m}, T={t}")));
    }
    Ok(to_position(&thermal_modes(m, t, cfg), cfg))
}

/// Thermal state of mass `m0` at `T0`, evolved for time `t` with mass `m`.
pub fn quench_covariance(m0: f64, t0: f64, m: f64, t: f64, cfg: &LatticeConfig) -> Result<CovarianceMatrix> {
    if !(m >= 0.0 && m0 >= 0.0 && t0 >= 0.0) {
        return Err(Error::Config(format!("need m0, T0, m ≥ 0, got m0={m0}, T0={t0}, m={m}")));
    }
    let start = thermal_modes(m0, t0, cfg);
    let modes: Vec<(f64, f64, f64)> = start
        .iter()
        .enumerate()
        .map(|(i, &(xx, pp, xp))| {
            let e = cfg.energy(i + 1, m);
            let (s, c) = (e * t).sin_cos();
            // φ(t) = c φ + (s/ε) π,  π(t) = −ε s φ + c π
            let xx_t = c * c * xx + (s / e).powi(2) * pp + 2.0 * c * s / e * xp;
            let pp_t = (e * s).powi(2) * xx + c * c * pp - 2.0 * e * s * c * xp;
            let xp_t = -e * s * c * xx + c * s / e * pp + (c * c - s * s) * xp;
            (xx_t, pp_t, xp_t)
        })
        .collect();
    Ok(to_position(&modes, cfg))
}

/// Principal submatrices over a contiguous block of sites.
pub fn reduce_covariance(g: &CovarianceMatrix, sites: Range<usize>) -> Result<CovarianceMatrix> {
    if sites.is_empty() || sites.end > g.sites() {
        return Err(Error::Config(format!("invalid site range {sites:?} for {} sites", g.sites())));
    }
    let (o, n) = (sites.start, sites.len());
    Ok(CovarianceMatrix {
        q: g.q.view((o, o), (n, n)).into_owned(),
        p: g.p.view((o, o), (n, n)).into_owned(),
        r: g.r.view((o, o), (n, n)).into_owned(),
    })
}

fn sqrt_psd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (e, v) = sorted_eigen(m);
    if !e.is_empty() && e[0] <= 0.0 {
        return Err(Error::Unphysical { value: e[0] });
    }
    let d = DMatrix::from_diagonal(&e.map(f64::sqrt));
    Ok(&v * d * v.transpose())
}

/// Positive symplectic eigenvalues, ascending.
///
/// With `R = 0` they are `√eig(Q^{1/2} P Q^{1/2})`. Otherwise the antisymmetric
/// `Γ^{1/2} J Γ^{1/2}` has singular values `γ_k`, each twice.
pub fn symplectic_spectrum(g: &CovarianceMatrix) -> Result<Vec<f64>> {
    let n = g.sites();
    let mut out: Vec<f64> = if !g.has_cross_block() {
        let qh = sqrt_psd(&g.q)?;
        let m = &qh * &g.p * &qh;
        let (e, _) = sorted_eigen(&((&m + m.transpose()) * 0.5));
        e.iter().map(|x| x.max(0.0).sqrt()).collect()
    } else {
        let gh = sqrt_psd(&g.gamma())?;
        let mut j = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            j[(i, n + i)] = 1.0;
            j[(n + i, i)] = -1.0;
        }
        let a = &gh * j * &gh;
        let mut sv: Vec<f64> = a.singular_values().iter().cloned().collect();
        sv.sort_by(|x, y| x.partial_cmp(y).unwrap());
        sv.chunks(2).map(|c| 0.5 * (c[0] + c[c.len() - 1])).collect()
    };
    out.sort_by(|x, y| x.partial_cmp(y).unwrap());
    if let Some(&low) = out.first() {
        if low < 0.5 - UNPHYSICAL_TOL {
            return Err(Error::Unphysical { value: low });
        }
    }
    Ok(out)
}

fn entropy_terms(gammas: &[f64]) -> impl Iterator<Item = (f64, f64)> + '_ {
    gammas.iter().map(|&g| (g.max(0.5) + 0.5, (g - 0.5).max(0.0)))
}

pub fn vn_from_symplectic(gammas: &[f64]) -> f64 {
    entropy_terms(gammas)
        .map(|(plus, minus)| plus * plus.ln() - if minus > 0.0 { minus * minus.ln() } else { 0.0 })
        .sum()
}

pub fn renyi_from_symplectic(gammas: &[f64], alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || alpha == 1.0 {
        return Err(Error::Parameter(format!("Rényi index must be positive and not 1, got {alpha}")));
    }
    let s: f64 = entropy_terms(gammas).map(|(plus, minus)| (plus.powf(alpha) - minus.powf(alpha)).ln()).sum();
    Ok(s / (alpha - 1.0))
}

pub fn gaussian_vn(g: &CovarianceMatrix) -> Result<f64> {
    Ok(vn_from_symplectic(&symplectic_spectrum(g)?))
}

pub fn gaussian_renyi(g: &CovarianceMatrix, alpha: f64) -> Result<f64> {
    renyi_from_symplectic(&symplectic_spectrum(g)?, alpha)
}

/// Entropy of the block `[0, ℓ]`; returns `(effective ℓ, S)`.
pub fn block_entropy(g: &CovarianceMatrix, cfg: &LatticeConfig, ell: f64) -> Result<(f64, f64)> {
    let j = cfg.sites_below(ell);
    if j == 0 || j >= cfg.k {
        return Err(Error::Config(format!("cut {ell} leaves an empty block on the {} sites", cfg.k)));
    }
    Ok((cfg.effective_cut(j), gaussian_vn(&reduce_covariance(g, 0..j)?)?))
}
