//! Split densities, reduced states, entropies and spectra of entropy series.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::fock_basis::ProductBasis;
use crate::linalg::sorted_eigen;
use crate::overlap::{SplitIsometry, SplitTransform};
use crate::states::{Amplitudes, DensityMatrix, EIGEN_FLOOR};
use crate::{Error, Result};

/// Eigenvalues below `-NEGATIVE_LIMIT` signal a broken transform.
pub const NEGATIVE_LIMIT: f64 = 1e-8;
/// Largest product dimension for which the mixed-state negativity is computed.
pub const NEGATIVITY_MAX_DIM: usize = 2000;
/// Raw trace below which a split density is flagged.
pub const LOW_TRACE: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Keep {
    Left,
    Right,
}

/// `ρ_LR` together with the trace it had before normalization.
#[derive(Clone, Debug)]
pub struct SplitDensity {
    pub rho: DensityMatrix,
    pub raw_trace: f64,
    /// Raw trace below [`LOW_TRACE`]: the truncation is too coarse for this state.
    pub low_trace: bool,
}

/// `ρ_LR = U ρ Uᵀ`, trace-normalized. In the ensemble form this maps each
/// vector through `U`, which keeps the result Hermitian by construction.
pub fn split_density(rho: &DensityMatrix, iso: &SplitIsometry) -> Result<SplitDensity> {
    if rho.dim() != iso.u.ncols() {
        return Err(Error::Dimension(format!(
            "state of dimension {} but U_T has {} columns",
            rho.dim(),
            iso.u.ncols()
        )));
    }
    let vectors = match &rho.vectors {
        Amplitudes::Real(v) => Amplitudes::Real(&iso.u * v),
        Amplitudes::Complex(v) => {
            // Real and imaginary parts separately keep the product real-valued.
            let re = &iso.u * v.map(|z| z.re);
            let im = &iso.u * v.map(|z| z.im);
            Amplitudes::Complex(re.zip_map(&im, Complex64::new))
        }
    };
    let tag = format!("product:{}", iso.u.nrows());
    let mut out = DensityMatrix::from_ensemble(rho.weights.clone(), vectors, tag)?;
    let raw_trace = out.normalize();
    Ok(SplitDensity { rho: out, raw_trace, low_trace: raw_trace < LOW_TRACE })
}

/// Reduced state over one factor of a `d_L ⊗ d_R` space with row-major ordinals.
pub fn partial_trace_dims(rho: &DensityMatrix, keep: Keep, dl: usize, dr: usize) -> Result<DensityMatrix> {
    if rho.dim() != dl * dr {
        return Err(Error::Dimension(format!("state of dimension {} is not {dl}x{dr}", rho.dim())));
    }
    let tag = match keep {
        Keep::Left => format!("left:{dl}"),
        Keep::Right => format!("right:{dr}"),
    };
    match &rho.vectors {
        Amplitudes::Real(v) => {
            let d = if keep == Keep::Left { dl } else { dr };
            let mut red = DMatrix::<f64>::zeros(d, d);
            for (j, w) in rho.weights.iter().enumerate() {
                // Column-major view of the row-major coefficients is Ψᵀ (d_R × d_L).
                let m = DMatrix::from_column_slice(dr, dl, v.column(j).as_slice());
                match keep {
                    Keep::Left => red.gemm_tr(*w, &m, &m, 1.0),
                    Keep::Right => red.gemm(*w, &m, &m.transpose(), 1.0),
                }
            }
            DensityMatrix::from_symmetric(&((&red + red.transpose()) * 0.5), tag)
        }
        Amplitudes::Complex(v) => {
            let d = if keep == Keep::Left { dl } else { dr };
            let mut red = DMatrix::<Complex64>::zeros(d, d);
            let one = Complex64::new(1.0, 0.0);
            for (j, w) in rho.weights.iter().enumerate() {
                let m = DMatrix::from_column_slice(dr, dl, v.column(j).as_slice());
                let w = Complex64::new(*w, 0.0);
                match keep {
                    // ρ_L = conj(Σ w Mᴴ M)
                    Keep::Left => red.gemm_ad(w, &m, &m, one),
                    Keep::Right => red.gemm(w, &m, &m.adjoint(), one),
                }
            }
            if keep == Keep::Left {
                red = red.map(|z| z.conj());
            }
            DensityMatrix::from_hermitian(&((&red + red.adjoint()) * Complex64::new(0.5, 0.0)), tag)
        }
    }
}

pub fn partial_trace(rho: &DensityMatrix, keep: Keep, prod: &ProductBasis) -> Result<DensityMatrix> {
    partial_trace_dims(rho, keep, prod.left.dim(), prod.right.dim())
}

/// Clamps tiny negatives, rejects large ones and normalizes to unit sum.
fn clean_spectrum(spec: &[f64]) -> Result<Vec<f64>> {
    if let Some(&bad) = spec.iter().find(|&&x| x < -NEGATIVE_LIMIT) {
        return Err(Error::NegativeSpectrum { value: bad });
    }
    let total: f64 = spec.iter().filter(|&&x| x > 0.0).sum();
    if total <= 0.0 {
        return Err(Error::NegativeSpectrum { value: total });
    }
    Ok(spec.iter().map(|&x| if x > 0.0 { x / total } else { 0.0 }).collect())
}

pub fn vn_from_spectrum(spec: &[f64]) -> Result<f64> {
    let p = clean_spectrum(spec)?;
    Ok(-p.iter().filter(|&&x| x > EIGEN_FLOOR).map(|&x| x * x.ln()).sum::<f64>())
}

pub fn renyi_from_spectrum(spec: &[f64], alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || alpha == 1.0 || !alpha.is_finite() {
        return Err(Error::Parameter(format!("Rényi index must be positive and not 1, got {alpha}")));
    }
    let p = clean_spectrum(spec)?;
    let s: f64 = p.iter().filter(|&&x| x > EIGEN_FLOOR).map(|&x| x.powf(alpha)).sum();
    Ok(s.ln() / (1.0 - alpha))
}

/// `−Tr ρ ln ρ` in nats.
pub fn von_neumann(rho: &DensityMatrix) -> Result<f64> {
    vn_from_spectrum(&rho.spectrum())
}

pub fn renyi(rho: &DensityMatrix, alpha: f64) -> Result<f64> {
    renyi_from_spectrum(&rho.spectrum(), alpha)
}

/// `ln ‖ρ^{T_R}‖₁` on a `d_L ⊗ d_R` space.
///
/// Pure states use the Schmidt form, `2 ln Σ √λ_i`. Mixed states build the
/// partial transpose densely, which is limited to [`NEGATIVITY_MAX_DIM`];
/// beyond it the result is `NaN`.
pub fn log_negativity_dims(rho: &DensityMatrix, dl: usize, dr: usize) -> Result<f64> {
    let pure = rho.terms() == 1;
    if pure {
        let red = partial_trace_dims(rho, Keep::Left, dl, dr)?;
        let p = clean_spectrum(&red.spectrum())?;
        let s: f64 = p.iter().map(|x| x.sqrt()).sum();
        return Ok(2.0 * s.ln());
    }
    let d = dl * dr;
    if d > NEGATIVITY_MAX_DIM {
        return Ok(f64::NAN);
    }
    let tr = rho.trace();
    let pt_index = |i: usize, j: usize| {
        let (l, r) = (i / dr, i % dr);
        let (lp, rp) = (j / dr, j % dr);
        (l * dr + rp, lp * dr + r)
    };
    let norm: f64 = match rho.rho_real() {
        Some(m) => {
            let pt = DMatrix::from_fn(d, d, |i, j| m[pt_index(i, j)]);
            let (e, _) = sorted_eigen(&pt);
            e.iter().map(|x| x.abs()).sum()
        }
        None => {
            let m = rho.rho();
            let pt = DMatrix::from_fn(d, d, |i, j| m[pt_index(i, j)]);
            let (e, _) = sorted_eigen(&pt);
            e.iter().map(|x| x.abs()).sum()
        }
    };
    Ok((norm / tr).ln())
}

pub fn log_negativity(rho: &DensityMatrix, prod: &ProductBasis) -> Result<f64> {
    log_negativity_dims(rho, prod.left.dim(), prod.right.dim())
}

/// `H_A = −ln ρ_A` on the support of `ρ_A`.
#[derive(Clone, Debug)]
pub struct EntanglementHamiltonian {
    pub h: DMatrix<Complex64>,
    /// Eigenvalues of `H_A`, ascending, over the whole space.
    pub levels: Vec<f64>,
    /// Set if some eigenvalues of `ρ_A` fell below the floor and were replaced.
    pub rank_deficient: bool,
}

/// `−ln ρ_A`, with eigenvalues of `ρ_A` below the floor mapped to `fill`
/// (default `ln(1/ε)`).
pub fn entanglement_hamiltonian(rho: &DensityMatrix, fill: Option<f64>) -> Result<EntanglementHamiltonian> {
    let fill = fill.unwrap_or(-EIGEN_FLOOR.ln());
    let dense = rho.rho();
    let tr = rho.trace();
    let (e, v) = sorted_eigen(&(dense.unscale(tr)));
    if let Some(&bad) = e.iter().find(|&&x| x < -NEGATIVE_LIMIT) {
        return Err(Error::NegativeSpectrum { value: bad });
    }
    let mut rank_deficient = false;
    let levels: Vec<f64> = e
        .iter()
        .map(|&x| {
            if x > EIGEN_FLOOR {
                -x.ln()
            } else {
                rank_deficient = true;
                fill
            }
        })
        .collect();
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        levels.len(),
        levels.iter().map(|&x| Complex64::new(x, 0.0)),
    ));
    let h = &v * d * v.adjoint();
    let mut levels = levels;
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(EntanglementHamiltonian { h, levels, rank_deficient })
}

/// One-sided amplitude spectrum `(ω_j, A_j)` of a uniformly sampled series
/// after mean subtraction, with `ω_j = 2πj/(NΔt)` for `j = 0..=N/2`.
pub fn fourier_spectrum(series: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    let n = series.len();
    if n < 2 {
        return Err(Error::Parameter("a spectrum needs at least two samples".into()));
    }
    let dt = (series[n - 1].0 - series[0].0) / (n - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::Parameter("time grid must be increasing".into()));
    }
    for (i, w) in series.windows(2).enumerate() {
        if ((w[1].0 - w[0].0) - dt).abs() > 1e-9 * dt {
            return Err(Error::Parameter(format!("non-uniform time grid at sample {}", i + 1)));
        }
    }
    let mean = series.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let mut buf: Vec<Complex64> = series.iter().map(|p| Complex64::new(p.1 - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    Ok((0..=n / 2)
        .map(|j| {
            let edge = j == 0 || (n.is_multiple_of(2) && j == n / 2);
            let amp = buf[j].norm() / n as f64 * if edge { 1.0 } else { 2.0 };
            (2.0 * std::f64::consts::PI * j as f64 / (n as f64 * dt), amp)
        })
        .collect())
}

/// Largest amplitude at `ω > 0`, as `(bin, ω, amplitude)`.
pub fn dominant_peak(spectrum: &[(f64, f64)]) -> Option<(usize, f64, f64)> {
    spectrum
        .iter()
        .enumerate()
        .skip(1)
        .max_by(|a, b| a.1 .1.partial_cmp(&b.1 .1).unwrap_or(std::cmp::Ordering::Equal))
        .map(|(j, &(w, a))| (j, w, a))
}

/// All entanglement measures of one state at one cut.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyRecord {
    pub cut_position: f64,
    /// Entanglement entropy of the left block.
    pub s_vn: f64,
    /// `(α, S^{(α)})` of the left block.
    pub s_renyi: Vec<(f64, f64)>,
    pub s_l: f64,
    pub s_r: f64,
    pub s_lr: f64,
    pub mutual_information: f64,
    pub log_negativity: f64,
    pub iso_defect: f64,
    /// Trace of `ρ_LR` before normalization.
    pub raw_trace: f64,
}

/// Runs a full-basis state through the split at one cut.
pub fn entropy_record(
    rho: &DensityMatrix,
    transform: &SplitTransform,
    alphas: &[f64],
    negativity: bool,
) -> Result<EntropyRecord> {
    let split = split_density(rho, &transform.isometry)?;
    let prod = &transform.product;
    let left = partial_trace(&split.rho, Keep::Left, prod)?;
    let right = partial_trace(&split.rho, Keep::Right, prod)?;
    let s_l = von_neumann(&left)?;
    let s_r = von_neumann(&right)?;
    let s_lr = if split.rho.terms() == 1 { 0.0 } else { von_neumann(&split.rho)? };
    let left_spec = left.spectrum();
    let s_renyi = alphas
        .iter()
        .map(|&a| renyi_from_spectrum(&left_spec, a).map(|s| (a, s)))
        .collect::<Result<Vec<_>>>()?;
    let log_negativity = if negativity { log_negativity(&split.rho, prod)? } else { f64::NAN };
    Ok(EntropyRecord {
        cut_position: transform.isometry.cut.ratio(),
        s_vn: s_l,
        s_renyi,
        s_l,
        s_r,
        s_lr,
        mutual_information: s_l + s_r - s_lr,
        log_negativity,
        iso_defect: transform.isometry.iso_defect,
        raw_trace: split.raw_trace,
    })
}
