//! Truncated Hamiltonians in the massless full-interval Fock basis.
//!
//! Field convention: `φ(x) = Σ_k (2/√k)(A_k + A_k†) sin(kπx/L)`, free part
//! `(1/8π)∫((∂_tφ)² + (∂_xφ)²)`, so `H_0 = (π/L)(Σ k n_k − 1/24)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fock_basis::{BasisTable, ModeFamily};
use crate::special::{gamma_checked, recip_beta};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    MasslessFb,
    MassiveFb,
    SineGordon,
}

/// Physical parameters of one model. Unused fields are ignored.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub model: ModelKind,
    #[serde(default = "unit_length")]
    pub length: f64,
    /// Boson mass for the massive free boson.
    #[serde(default)]
    pub m: f64,
    /// sine-Gordon `λ`, with `Δ = β²/8π = 1/(1+λ)`.
    #[serde(default)]
    pub lambda: f64,
    /// Soliton mass `M`.
    #[serde(default)]
    pub m_soliton: f64,
}

fn unit_length() -> f64 {
    1.0
}

impl ModelParams {
    pub fn massless(length: f64) -> Self {
        Self { model: ModelKind::MasslessFb, length, m: 0.0, lambda: 0.0, m_soliton: 0.0 }
    }

    pub fn massive(length: f64, m: f64) -> Self {
        Self { model: ModelKind::MassiveFb, length, m, lambda: 0.0, m_soliton: 0.0 }
    }

    pub fn sine_gordon(length: f64, lambda: f64, m_soliton: f64) -> Self {
        Self { model: ModelKind::SineGordon, length, m: 0.0, lambda, m_soliton }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::Config(format!("length must be positive, got {}", self.length)));
        }
        match self.model {
            ModelKind::MasslessFb => Ok(()),
            ModelKind::MassiveFb => {
                if !(self.m.is_finite() && self.m >= 0.0) {
                    Err(Error::Config(format!("boson mass must be non-negative, got {}", self.m)))
                } else {
                    Ok(())
                }
            }
            ModelKind::SineGordon => {
                if !(self.lambda.is_finite() && self.lambda > 1.0) {
                    Err(Error::Config(format!("sine-Gordon needs lambda > 1, got {}", self.lambda)))
                } else if !(self.m_soliton.is_finite() && self.m_soliton >= 0.0) {
                    Err(Error::Config(format!("soliton mass must be non-negative, got {}", self.m_soliton)))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// `Δ = 1/(1+λ)`.
    pub fn delta(&self) -> f64 {
        1.0 / (1.0 + self.lambda)
    }

    /// Vertex charge `q = β/√(4π)`, so that `q² = 2Δ`.
    pub fn charge(&self) -> f64 {
        (2.0 * self.delta()).sqrt()
    }
}

#[derive(Clone, Debug)]
pub struct HamiltonianMatrix {
    pub h: DMatrix<f64>,
    pub params: ModelParams,
}

impl HamiltonianMatrix {
    pub fn dim(&self) -> usize {
        self.h.nrows()
    }
}

fn require_full(basis: &BasisTable) -> Result<()> {
    if basis.family() != ModeFamily::FullInteger {
        return Err(Error::Config("model Hamiltonians live in the full-interval basis".into()));
    }
    Ok(())
}

fn free_diagonal(basis: &BasisTable, length: f64) -> Vec<f64> {
    basis
        .states()
        .iter()
        .map(|s| (PI / length) * (s.level2() as f64 / 2.0 - 1.0 / 24.0))
        .collect()
}

pub fn h_massless(basis: &BasisTable, length: f64) -> Result<HamiltonianMatrix> {
    require_full(basis)?;
    let params = ModelParams::massless(length);
    params.validate()?;
    let h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(free_diagonal(basis, length)));
    Ok(HamiltonianMatrix { h, params })
}

pub fn h_massive(basis: &BasisTable, length: f64, m: f64) -> Result<HamiltonianMatrix> {
    require_full(basis)?;
    let params = ModelParams::massive(length, m);
    params.validate()?;
    let mut h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(free_diagonal(basis, length)));
    if m == 0.0 {
        return Ok(HamiltonianMatrix { h, params });
    }
    let mass = m * m * length * length / (PI * PI);
    let scale = PI / length;
    for (i, s) in basis.states().iter().enumerate() {
        for k in 1..=s.max_mode() {
            let n = s.get(k) as f64;
            h[(i, i)] += scale * mass / (2.0 * k as f64) * n;
        }
        // n_k → n_k + 2 couplings; the transposed entry fills the other branch.
        for k in 1..=basis.mode_count() {
            let Some(up) = s.shifted(k, 2) else { continue };
            let Some(j) = basis.index_of(&up) else { continue };
            let n = s.get(k) as f64;
            let v = scale * mass / (4.0 * k as f64) * ((n + 1.0) * (n + 2.0)).sqrt();
            h[(j, i)] += v;
            h[(i, j)] += v;
        }
    }
    Ok(HamiltonianMatrix { h, params })
}

/// Where the vertex operator is evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VertexEval {
    /// `∫_0^L dx`.
    Integrated,
    /// A single point `x ∈ (0, L)`.
    At(f64),
}

/// Coefficients of one mode's factor `⟨n'| e^{c A†} e^{c A} |n⟩` as a
/// polynomial in `s` with `c = i s`, after removing the phase `i^{|n'−n|}`:
/// `Σ_j a_j s^{2j+|δ|}` with `a_j` built by running products.
fn mode_coefficients(n: u32, np: u32) -> Vec<f64> {
    let (lo, hi) = if np >= n { (n, np) } else { (np, n) };
    let delta = hi - lo;
    // j counts annihilations on the lower state; the other side takes j + δ.
    let mut a0 = 1.0;
    for i in 0..delta {
        a0 *= ((hi - i) as f64).sqrt() / (i + 1) as f64;
    }
    let mut out = Vec::with_capacity(lo as usize + 1);
    let mut a = a0;
    for j in 0..=lo {
        out.push(a);
        if j < lo {
            let num = (((lo - j) * (hi - j - delta)) as f64).sqrt();
            a *= -num / (((j + 1) * (j + 1 + delta)) as f64);
        }
    }
    out
}

fn eval_mode(coef: &[f64], delta: u32, s: f64) -> f64 {
    let s2 = s * s;
    let mut acc = 0.0;
    for c in coef.iter().rev() {
        acc = acc * s2 + c;
    }
    acc * s.powi(delta as i32)
}

/// Moments `μ_K = ∫_0^π [2 sin u]^{−q²} e^{iKu} du` from the Beta-function identity.
fn sine_moment(q2: f64, k: i64) -> Result<(f64, f64)> {
    let kf = k as f64;
    let rb = recip_beta(0.5 * (2.0 - q2 + kf), 0.5 * (2.0 - q2 - kf))
        .ok_or_else(|| Error::Parameter(format!("Beta-function pole at q² = {q2}, k = {k}")))?;
    let mag = PI * rb / (1.0 - q2);
    // e^{iπK/2}, exact.
    let (s, c) = match k.rem_euclid(4) {
        0 => (0.0, 1.0),
        1 => (1.0, 0.0),
        2 => (0.0, -1.0),
        _ => (-1.0, 0.0),
    };
    Ok((mag * c, mag * s))
}

/// Matrix of `½∫(V_q + V_{−q})`, i.e. of the normal-ordered `cos(qφ)` with its
/// short-distance factor, in the given basis.
///
/// The cosine kills entries with odd `Σ|n'_k − n_k|`. The integral of the
/// trigonometric polynomial in `θ = πx/L` is exact: it is sampled on an
/// equispaced grid fine enough to avoid aliasing and contracted with weights
/// obtained from the exact moments.
pub fn vertex_matrix(basis: &BasisTable, q: f64, eval: VertexEval, length: f64) -> Result<DMatrix<f64>> {
    require_full(basis)?;
    let q2 = q * q;
    let n_modes = basis.mode_count();
    let max_level = basis.states().iter().map(|s| s.level2() / 2).max().unwrap_or(0) as usize;

    let (thetas, weights): (Vec<f64>, Vec<f64>) = match eval {
        VertexEval::Integrated => {
            if q2 >= 1.0 {
                return Err(Error::Parameter(format!(
                    "integrated vertex diverges for q² = {q2} ≥ 1"
                )));
            }
            let d = 2 * max_level as i64;
            let n = (2 * d + 1) as usize;
            let moments: Vec<(f64, f64)> = (-d..=d).map(|k| sine_moment(q2, k)).collect::<Result<_>>()?;
            let thetas: Vec<f64> = (0..n).map(|t| 2.0 * PI * t as f64 / n as f64).collect();
            let weights = thetas
                .iter()
                .map(|&th| {
                    let mut w = 0.0;
                    for (idx, &(re, im)) in moments.iter().enumerate() {
                        let k = (idx as i64 - d) as f64;
                        // Re(μ_K e^{−iKθ})
                        w += re * (k * th).cos() + im * (k * th).sin();
                    }
                    w / n as f64 * length / PI
                })
                .collect();
            (thetas, weights)
        }
        VertexEval::At(x) => {
            if !(x > 0.0 && x < length) {
                return Err(Error::Parameter(format!("vertex position {x} outside (0, {length})")));
            }
            let th = PI * x / length;
            (vec![th], vec![(2.0 * th.sin()).powf(-q2)])
        }
    };

    // Mode factors sampled on the grid: table[k][n][n'] → values over θ.
    let max_occ: Vec<u32> = (1..=n_modes)
        .map(|k| basis.states().iter().map(|s| s.get(k)).max().unwrap_or(0))
        .collect();
    let table: Vec<Vec<Vec<Vec<f64>>>> = (1..=n_modes)
        .map(|k| {
            let s_vals: Vec<f64> =
                thetas.iter().map(|&th| 2.0 * q * (k as f64 * th).sin() / (k as f64).sqrt()).collect();
            let top = max_occ[k - 1];
            (0..=top)
                .map(|n| {
                    (0..=top)
                        .map(|np| {
                            let c = mode_coefficients(n, np);
                            let d = n.abs_diff(np);
                            s_vals.iter().map(|&s| eval_mode(&c, d, s)).collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let dim = basis.dim();
    let states = basis.states();
    let cols: Vec<Vec<f64>> = (0..dim)
        .into_par_iter()
        .map(|c| {
            let sc = &states[c];
            let mut col = vec![0.0; c + 1];
            let mut buf = vec![0.0; thetas.len()];
            for (r, sr) in states.iter().enumerate().take(c + 1) {
                let top = sr.max_mode().max(sc.max_mode());
                let spread: u32 = (1..=top).map(|k| sc.get(k).abs_diff(sr.get(k))).sum();
                if !spread.is_multiple_of(2) {
                    continue;
                }
                buf.copy_from_slice(&weights);
                for k in 1..=top {
                    let (n, np) = (sc.get(k), sr.get(k));
                    if n == 0 && np == 0 {
                        continue;
                    }
                    let vals = &table[k - 1][n as usize][np as usize];
                    for (b, v) in buf.iter_mut().zip(vals) {
                        *b *= v;
                    }
                }
                // i^{Σ|δ_k|} with an even exponent.
                let sign = if (spread / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
                col[r] = sign * buf.iter().sum::<f64>();
            }
            col
        })
        .collect();
    let mut out = DMatrix::zeros(dim, dim);
    for (c, col) in cols.iter().enumerate() {
        for (r, &v) in col.iter().enumerate() {
            out[(r, c)] = v;
            out[(c, r)] = v;
        }
    }
    Ok(out)
}

/// Coupling-mass ratio relating the cosine coupling to the soliton mass:
/// `κ = Γ(Δ)/(πΓ(1−Δ)) [√π Γ(1/(2−2Δ)) / (2Γ(Δ/(2−2Δ)))]^{2−2Δ}`.
pub fn kappa(delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter(format!("kappa needs 0 < Δ < 1, got {delta}")));
    }
    let g = |x: f64| gamma_checked(x).ok_or_else(|| Error::Parameter(format!("Γ pole at {x}")));
    let e = 2.0 - 2.0 * delta;
    let ratio = g(delta)? / g(1.0 - delta)?;
    let inner = PI.sqrt() * g(1.0 / e)? / (2.0 * g(delta / e)?);
    Ok(ratio / PI * inner.powf(e))
}

/// `m_n = 2M sin(nπ/2λ)`.
pub fn breather_mass(n: u32, lambda: f64, m_soliton: f64) -> Result<f64> {
    if n < 1 || (n as f64) > lambda.floor() {
        return Err(Error::Parameter(format!("breather index {n} outside 1..={}", lambda.floor())));
    }
    Ok(2.0 * m_soliton * (n as f64 * PI / (2.0 * lambda)).sin())
}

pub fn h_sine_gordon(basis: &BasisTable, p: &ModelParams) -> Result<HamiltonianMatrix> {
    if p.model != ModelKind::SineGordon {
        return Err(Error::Config("h_sine_gordon needs sine-Gordon parameters".into()));
    }
    p.validate()?;
    let mut h = h_massless(basis, p.length)?.h;
    if p.m_soliton > 0.0 {
        let delta = p.delta();
        let q = p.charge();
        let coupling = kappa(delta)? * p.m_soliton.powf(2.0 - 2.0 * delta);
        let v = vertex_matrix(basis, q, VertexEval::Integrated, p.length)?;
        // ∫(V_1 + V_{−1}) is twice the cosine matrix.
        // (π/L)^{q²} converts the vertex from the plane coordinate z to x.
        h -= v * (2.0 * coupling * (PI / p.length).powf(q * q));
    }
    Ok(HamiltonianMatrix { h, params: *p })
}

/// Dispatch on the model kind.
pub fn build_hamiltonian(basis: &BasisTable, p: &ModelParams) -> Result<HamiltonianMatrix> {
    p.validate()?;
    match p.model {
        ModelKind::MasslessFb => h_massless(basis, p.length),
        ModelKind::MassiveFb => h_massive(basis, p.length, p.m),
        ModelKind::SineGordon => h_sine_gordon(basis, p),
    }
}
