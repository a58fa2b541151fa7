//! Ground, thermal and quenched states in the full basis.
//!
//! A density matrix is stored as an ensemble `ρ = Σ_i w_i |v_i⟩⟨v_i|`. Pure and
//! low-rank states stay cheap, and the split map `U` acts on the vectors only.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::ht_models::HamiltonianMatrix;
use crate::linalg::{max_abs, sorted_eigen};
use crate::{Error, Result};

/// Eigenvalues below this relative size are treated as zero when a Hermitian
/// matrix is turned into an ensemble.
pub const EIGEN_FLOOR: f64 = 1e-12;
const NEGATIVE_TOLERANCE: f64 = 1e-10;
/// Boltzmann weights below this fraction of the largest are dropped.
const WEIGHT_CUTOFF: f64 = 1e-18;

/// Column vectors of an ensemble, real on equilibrium paths.
#[derive(Clone, Debug, PartialEq)]
pub enum Amplitudes {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

impl Amplitudes {
    pub fn nrows(&self) -> usize {
        match self {
            Amplitudes::Real(m) => m.nrows(),
            Amplitudes::Complex(m) => m.nrows(),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            Amplitudes::Real(m) => m.ncols(),
            Amplitudes::Complex(m) => m.ncols(),
        }
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        match self {
            Amplitudes::Real(m) => m.map(|x| Complex64::new(x, 0.0)),
            Amplitudes::Complex(m) => m.clone(),
        }
    }

    /// `Vᴴ V`.
    fn gram(&self) -> DMatrix<Complex64> {
        match self {
            Amplitudes::Real(m) => (m.transpose() * m).map(|x| Complex64::new(x, 0.0)),
            Amplitudes::Complex(m) => m.adjoint() * m,
        }
    }

    fn column_norms2(&self) -> Vec<f64> {
        match self {
            Amplitudes::Real(m) => m.column_iter().map(|c| c.norm_squared()).collect(),
            Amplitudes::Complex(m) => m.column_iter().map(|c| c.norm_squared()).collect(),
        }
    }
}

/// `ρ = Σ_i w_i |v_i⟩⟨v_i|` with `w_i ≥ 0`. The vectors need not be orthogonal.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    pub weights: DVector<f64>,
    pub vectors: Amplitudes,
    /// Set when the vectors are orthonormal, so the weights are the spectrum.
    pub orthonormal: bool,
    /// Names the basis the state lives in, e.g. `full:14` or `product:7|7`.
    pub basis_tag: String,
}

impl DensityMatrix {
    pub fn pure_real(v: DVector<f64>, basis_tag: impl Into<String>) -> Self {
        let n = v.norm();
        let n = if n > 0.0 { n } else { 1.0 };
        let dim = v.len();
        Self {
            weights: DVector::from_element(1, 1.0),
            vectors: Amplitudes::Real(DMatrix::from_column_slice(dim, 1, (v / n).as_slice())),
            orthonormal: true,
            basis_tag: basis_tag.into(),
        }
    }

    pub fn pure(v: DVector<Complex64>, basis_tag: impl Into<String>) -> Self {
        let n = v.norm();
        let n = if n > 0.0 { n } else { 1.0 };
        let dim = v.len();
        Self {
            weights: DVector::from_element(1, 1.0),
            vectors: Amplitudes::Complex(DMatrix::from_column_slice(dim, 1, (v.unscale(n)).as_slice())),
            orthonormal: true,
            basis_tag: basis_tag.into(),
        }
    }

    /// Ensemble with arbitrary (not necessarily orthonormal) vectors.
    pub fn from_ensemble(weights: DVector<f64>, vectors: Amplitudes, basis_tag: impl Into<String>) -> Result<Self> {
        if weights.len() != vectors.ncols() {
            return Err(Error::Dimension(format!(
                "{} weights for {} vectors",
                weights.len(),
                vectors.ncols()
            )));
        }
        if let Some(w) = weights.iter().find(|&&w| !(w >= 0.0)) {
            return Err(Error::NegativeSpectrum { value: *w });
        }
        Ok(Self { weights, vectors, orthonormal: false, basis_tag: basis_tag.into() })
    }

    /// Eigen-decomposes a Hermitian matrix; small negative eigenvalues are clamped.
    pub fn from_hermitian(m: &DMatrix<Complex64>, basis_tag: impl Into<String>) -> Result<Self> {
        let (e, v) = sorted_eigen(m);
        let (w, keep) = filter_spectrum(&e)?;
        let v = DMatrix::from_columns(&keep.iter().map(|&i| v.column(i)).collect::<Vec<_>>());
        let v = if v.ncols() == 0 { DMatrix::zeros(m.nrows(), 0) } else { v };
        Ok(Self { weights: w, vectors: Amplitudes::Complex(v), orthonormal: true, basis_tag: basis_tag.into() })
    }

    pub fn from_symmetric(m: &DMatrix<f64>, basis_tag: impl Into<String>) -> Result<Self> {
        let (e, v) = sorted_eigen(m);
        let (w, keep) = filter_spectrum(&e)?;
        let v = DMatrix::from_columns(&keep.iter().map(|&i| v.column(i)).collect::<Vec<_>>());
        let v = if v.ncols() == 0 { DMatrix::zeros(m.nrows(), 0) } else { v };
        Ok(Self { weights: w, vectors: Amplitudes::Real(v), orthonormal: true, basis_tag: basis_tag.into() })
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    /// Number of ensemble members.
    pub fn terms(&self) -> usize {
        self.weights.len()
    }

    pub fn is_real(&self) -> bool {
        matches!(self.vectors, Amplitudes::Real(_))
    }

    pub fn trace(&self) -> f64 {
        self.vectors.column_norms2().iter().zip(self.weights.iter()).map(|(n, w)| n * w).sum()
    }

    /// Dense `ρ`.
    pub fn rho(&self) -> DMatrix<Complex64> {
        let v = self.vectors.to_complex();
        let mut scaled = v.clone();
        for (j, w) in self.weights.iter().enumerate() {
            scaled.column_mut(j).scale_mut(*w);
        }
        scaled * v.adjoint()
    }

    /// Dense real `ρ`, if the amplitudes are real.
    pub fn rho_real(&self) -> Option<DMatrix<f64>> {
        match &self.vectors {
            Amplitudes::Real(v) => {
                let mut scaled = v.clone();
                for (j, w) in self.weights.iter().enumerate() {
                    scaled.column_mut(j).scale_mut(*w);
                }
                Some(scaled * v.transpose())
            }
            Amplitudes::Complex(_) => None,
        }
    }

    /// `√w_i √w_j ⟨v_i|v_j⟩`, whose nonzero spectrum equals that of `ρ`.
    fn weighted_gram(&self) -> DMatrix<Complex64> {
        let mut g = self.vectors.gram();
        let s: Vec<f64> = self.weights.iter().map(|w| w.sqrt()).collect();
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                g[(i, j)] *= s[i] * s[j];
            }
        }
        g
    }

    /// Eigenvalues of `ρ` (unnormalized if the trace is not 1), descending.
    /// Uses the ensemble Gram matrix or `ρ` itself, whichever is smaller.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut out: Vec<f64> = if self.orthonormal {
            self.weights.iter().cloned().collect()
        } else if self.terms() <= self.dim() {
            match &self.vectors {
                Amplitudes::Real(_) => {
                    let g = self.weighted_gram().map(|z| z.re);
                    sorted_eigen(&g).0.iter().cloned().collect()
                }
                Amplitudes::Complex(_) => sorted_eigen(&self.weighted_gram()).0.iter().cloned().collect(),
            }
        } else if let Some(r) = self.rho_real() {
            sorted_eigen(&r).0.iter().cloned().collect()
        } else {
            sorted_eigen(&self.rho()).0.iter().cloned().collect()
        };
        out.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        out
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        if self.orthonormal {
            return self.weights.iter().map(|w| w * w).sum();
        }
        let g = self.weighted_gram();
        g.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `Tr(ρ H)`.
    pub fn expectation(&self, h: &DMatrix<f64>) -> f64 {
        let mut acc = 0.0;
        match &self.vectors {
            Amplitudes::Real(v) => {
                let hv = h * v;
                for j in 0..v.ncols() {
                    acc += self.weights[j] * v.column(j).dot(&hv.column(j));
                }
            }
            Amplitudes::Complex(v) => {
                let hv = h.map(|x| Complex64::new(x, 0.0)) * v;
                for j in 0..v.ncols() {
                    acc += self.weights[j] * v.column(j).dotc(&hv.column(j)).re;
                }
            }
        }
        acc
    }

    /// Rescales the weights to unit trace and returns the previous trace.
    pub fn normalize(&mut self) -> f64 {
        let t = self.trace();
        if t > 0.0 {
            self.weights.unscale_mut(t);
        }
        t
    }
}

fn filter_spectrum(e: &DVector<f64>) -> Result<(DVector<f64>, Vec<usize>)> {
    let scale = e.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(f64::MIN_POSITIVE);
    if let Some(&min) = e.iter().find(|&&x| x < -NEGATIVE_TOLERANCE * scale.max(1.0)) {
        return Err(Error::NegativeSpectrum { value: min });
    }
    let keep: Vec<usize> = (0..e.len()).rev().filter(|&i| e[i] > EIGEN_FLOOR * scale).collect();
    Ok((DVector::from_iterator(keep.len(), keep.iter().map(|&i| e[i])), keep))
}

/// Eigen-decomposition `H = E Λ Eᵀ`, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl SpectralDecomposition {
    pub fn new(h: &DMatrix<f64>) -> Result<Self> {
        if h.nrows() != h.ncols() {
            return Err(Error::Dimension(format!("Hamiltonian is {}x{}", h.nrows(), h.ncols())));
        }
        let sym = (h + h.transpose()) * 0.5;
        let (eigenvalues, eigenvectors) = sorted_eigen(&sym);
        Ok(Self { eigenvalues, eigenvectors })
    }

    /// `max|H − EΛEᵀ|`.
    pub fn residual(&self, h: &DMatrix<f64>) -> f64 {
        let rec = &self.eigenvectors * DMatrix::from_diagonal(&self.eigenvalues) * self.eigenvectors.transpose();
        max_abs(&(rec - h))
    }

    pub fn gap(&self) -> f64 {
        if self.eigenvalues.len() < 2 {
            f64::INFINITY
        } else {
            self.eigenvalues[1] - self.eigenvalues[0]
        }
    }
}

/// Lowest eigenvector of a Hamiltonian, with its energy and the gap above it.
#[derive(Clone, Debug)]
pub struct GroundState {
    pub rho: DensityMatrix,
    pub energy: f64,
    pub gap: f64,
    /// True if the gap is below `1e-10` times the spectral scale; the first
    /// eigenvector is still returned.
    pub degenerate: bool,
}

pub fn full_tag(h: &HamiltonianMatrix) -> String {
    format!("full:{}", h.dim())
}

pub fn ground_state_from(spec: &SpectralDecomposition, basis_tag: &str) -> GroundState {
    let e = &spec.eigenvalues;
    let scale = e.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1.0);
    let gap = spec.gap();
    GroundState {
        rho: DensityMatrix::pure_real(spec.eigenvectors.column(0).into_owned(), basis_tag),
        energy: e[0],
        gap,
        degenerate: gap < 1e-10 * scale,
    }
}

pub fn ground_state(h: &HamiltonianMatrix) -> Result<GroundState> {
    let spec = SpectralDecomposition::new(&h.h)?;
    Ok(ground_state_from(&spec, &full_tag(h)))
}

/// Boltzmann state from an existing decomposition, weights shifted by `E_0`.
pub fn thermal_state_from(spec: &SpectralDecomposition, t: f64, basis_tag: &str) -> Result<DensityMatrix> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Parameter(format!("temperature must be positive, got {t}")));
    }
    let e0 = spec.eigenvalues[0];
    let raw: Vec<f64> = spec.eigenvalues.iter().map(|e| (-(e - e0) / t).exp()).collect();
    let keep: Vec<usize> = (0..raw.len()).filter(|&i| raw[i] > WEIGHT_CUTOFF).collect();
    let z: f64 = keep.iter().map(|&i| raw[i]).sum();
    let weights = DVector::from_iterator(keep.len(), keep.iter().map(|&i| raw[i] / z));
    let vectors = DMatrix::from_columns(&keep.iter().map(|&i| spec.eigenvectors.column(i)).collect::<Vec<_>>());
    Ok(DensityMatrix { weights, vectors: Amplitudes::Real(vectors), orthonormal: true, basis_tag: basis_tag.into() })
}

pub fn thermal_state(h: &HamiltonianMatrix, t: f64) -> Result<DensityMatrix> {
    let spec = SpectralDecomposition::new(&h.h)?;
    thermal_state_from(&spec, t, &full_tag(h))
}

/// Evolves every ensemble vector with `e^{−iHt}` using one decomposition.
pub fn quench_evolve_with(
    rho0: &DensityMatrix,
    spec: &SpectralDecomposition,
    times: &[f64],
) -> Result<Vec<DensityMatrix>> {
    let dim = spec.eigenvalues.len();
    if rho0.dim() != dim {
        return Err(Error::Dimension(format!("state of dimension {} vs Hamiltonian {dim}", rho0.dim())));
    }
    let e = spec.eigenvectors.map(|x| Complex64::new(x, 0.0));
    // Coefficients in the eigenbasis, computed once.
    let coeffs = e.transpose() * rho0.vectors.to_complex();
    Ok(times
        .par_iter()
        .map(|&t| {
            let mut c = coeffs.clone();
            for (r, mut row) in c.row_iter_mut().enumerate() {
                let phase = Complex64::from_polar(1.0, -spec.eigenvalues[r] * t);
                for z in row.iter_mut() {
                    *z *= phase;
                }
            }
            DensityMatrix {
                weights: rho0.weights.clone(),
                vectors: Amplitudes::Complex(&e * c),
                orthonormal: rho0.orthonormal,
                basis_tag: rho0.basis_tag.clone(),
            }
        })
        .collect())
}

pub fn quench_evolve(rho0: &DensityMatrix, h_post: &HamiltonianMatrix, times: &[f64]) -> Result<Vec<DensityMatrix>> {
    let spec = SpectralDecomposition::new(&h_post.h)?;
    quench_evolve_with(rho0, &spec, times)
}
