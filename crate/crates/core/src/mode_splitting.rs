//! Splitting full-interval modes into left/right subinterval modes.
//!
//! The full interval `[0, L]` carries Dirichlet modes `sin(p_k x)` with
//! `p_k = kπ/L`. The cut at `ℓ` splits it into `[0, ℓ]` and `[ℓ, L]`, each with
//! Dirichlet conditions at the outer edge and either Neumann or Dirichlet
//! conditions at the cut. The four overlap blocks `γ^{±,L/R}` form the
//! Bogoliubov matrix `M = [[u, v], [v, u]]`, exactly symplectic only without
//! truncation.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::fock_basis::{product_basis, BasisTable, ModeFamily, ProductBasis};
use crate::linalg::{condition_number, max_abs};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Neumann,
    Dirichlet,
}

/// How the `s_F` full modes are shared between the two sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// `s_L = s_R = s_F / 2` regardless of the cut.
    ConstantCount,
    /// `s_L ≈ (ℓ/L) s_F`, matching mode densities on both sides.
    ConstantDensity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rounding {
    Floor,
    Round,
}

/// Geometry and truncation of one cut.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutConfig {
    pub length: f64,
    pub ell: f64,
    /// `ℓ/L` as an exact fraction `(num, den)` when known; enables exact
    /// resonance and zero detection.
    pub fraction: Option<(u64, u64)>,
    pub s_full: usize,
    pub cut_bc: BoundaryCondition,
    pub scheme: Scheme,
    pub rounding: Rounding,
}

impl CutConfig {
    /// Cut at `ℓ = L·num/den`.
    pub fn at_fraction(length: f64, num: u64, den: u64, s_full: usize, cut_bc: BoundaryCondition) -> Result<Self> {
        if den == 0 || num == 0 || num >= den {
            return Err(Error::Config(format!("cut fraction {num}/{den} must lie strictly inside (0, 1)")));
        }
        let g = gcd(num, den);
        let cfg = Self {
            length,
            ell: length * num as f64 / den as f64,
            fraction: Some((num / g, den / g)),
            s_full,
            cut_bc,
            scheme: Scheme::ConstantDensity,
            rounding: Rounding::Round,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Cut at an arbitrary position; resonances are detected with a relative tolerance.
    pub fn at_position(length: f64, ell: f64, s_full: usize, cut_bc: BoundaryCondition) -> Result<Self> {
        let cfg = Self {
            length,
            ell,
            fraction: None,
            s_full,
            cut_bc,
            scheme: Scheme::ConstantDensity,
            rounding: Rounding::Round,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_scheme(mut self, scheme: Scheme, rounding: Rounding) -> Self {
        self.scheme = scheme;
        self.rounding = rounding;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::Config(format!("system length {} must be positive", self.length)));
        }
        if !(self.ell > 0.0 && self.ell < self.length) {
            return Err(Error::Config(format!("cut position {} outside (0, {})", self.ell, self.length)));
        }
        if self.s_full < 2 {
            return Err(Error::Config(format!("s_F = {} but at least 2 modes are needed", self.s_full)));
        }
        Ok(())
    }

    /// `ℓ/L` as a float.
    pub fn ratio(&self) -> f64 {
        match self.fraction {
            Some((n, d)) => n as f64 / d as f64,
            None => self.ell / self.length,
        }
    }

    /// Mode family used by the split bases.
    pub fn split_family(&self) -> ModeFamily {
        match self.cut_bc {
            BoundaryCondition::Neumann => ModeFamily::HalfInteger,
            BoundaryCondition::Dirichlet => ModeFamily::FullInteger,
        }
    }

    /// True when `ℓ/L = n/s_F` for an integer `n`.
    pub fn is_commensurate(&self) -> bool {
        match self.fraction {
            Some((n, d)) => (n * self.s_full as u64).is_multiple_of(d),
            None => {
                let x = self.ratio() * self.s_full as f64;
                (x - x.round()).abs() < 1e-9
            }
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Split mode counts `(s_L, s_R)` with `s_L + s_R = s_F`.
pub fn allocate_modes(cut: &CutConfig) -> Result<(usize, usize)> {
    cut.validate()?;
    let s = cut.s_full;
    let s_left = match cut.scheme {
        Scheme::ConstantCount => {
            if !s.is_multiple_of(2) {
                return Err(Error::Config(format!("constant-count scheme needs even s_F, got {s}")));
            }
            s / 2
        }
        Scheme::ConstantDensity => match cut.fraction {
            Some((n, d)) => {
                let scaled = n * s as u64;
                match cut.rounding {
                    Rounding::Floor => (scaled / d) as usize,
                    Rounding::Round => ((2 * scaled + d) / (2 * d)) as usize,
                }
            }
            None => {
                let x = cut.ratio() * s as f64;
                match cut.rounding {
                    Rounding::Floor => (x + 1e-9).floor() as usize,
                    Rounding::Round => x.round() as usize,
                }
            }
        },
    };
    if s_left == 0 || s_left >= s {
        return Err(Error::Config(format!(
            "cut at ℓ/L = {:.6} leaves an empty side with s_F = {s}",
            cut.ratio()
        )));
    }
    Ok((s_left, s - s_left))
}

/// Truncated product basis of the two subintervals for this cut.
pub fn split_product_basis(cut: &CutConfig) -> Result<ProductBasis> {
    let (sl, sr) = allocate_modes(cut)?;
    let fam = cut.split_family();
    product_basis(BasisTable::enumerate(fam, sl), BasisTable::enumerate(fam, sr))
}

/// The four overlap blocks. Rows are full modes `k = 1..s_F`, columns split modes.
#[derive(Clone, Debug)]
pub struct GammaSet {
    pub gp_l: DMatrix<f64>,
    pub gm_l: DMatrix<f64>,
    pub gp_r: DMatrix<f64>,
    pub gm_r: DMatrix<f64>,
}

impl GammaSet {
    pub fn s_full(&self) -> usize {
        self.gp_l.nrows()
    }
    pub fn s_left(&self) -> usize {
        self.gp_l.ncols()
    }
    pub fn s_right(&self) -> usize {
        self.gp_r.ncols()
    }

    /// CSV dump with columns `block, k, m, value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("block,k,m,value\n");
        for (name, b) in [("gp_L", &self.gp_l), ("gm_L", &self.gm_l), ("gp_R", &self.gp_r), ("gm_R", &self.gm_r)] {
            for k in 0..b.nrows() {
                for m in 0..b.ncols() {
                    let _ = writeln!(out, "{},{},{},{:.17e}", name, k + 1, m + 1, b[(k, m)]);
                }
            }
        }
        out
    }
}

/// `cos(π a / b)` with exact zeros and signs at multiples of `π/2`.
pub(crate) fn cos_pi_frac(a: u64, b: u64) -> f64 {
    let r = a % (2 * b);
    if r == 0 {
        1.0
    } else if r == b {
        -1.0
    } else if 2 * r == b || 2 * r == 3 * b {
        0.0
    } else {
        (PI * r as f64 / b as f64).cos()
    }
}

/// `sin(π a / b)` with exact zeros and signs at multiples of `π/2`.
pub(crate) fn sin_pi_frac(a: u64, b: u64) -> f64 {
    let r = a % (2 * b);
    if r == 0 || r == b {
        0.0
    } else if 2 * r == b {
        1.0
    } else if 2 * r == 3 * b {
        -1.0
    } else {
        (PI * r as f64 / b as f64).sin()
    }
}

#[inline]
fn sign(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

struct Geometry {
    length: f64,
    ell: f64,
    ell_r: f64,
    fraction: Option<(u64, u64)>,
}

impl Geometry {
    fn new(cut: &CutConfig) -> Self {
        let (ell, ell_r) = match cut.fraction {
            Some((n, d)) => (cut.length * n as f64 / d as f64, cut.length * (d - n) as f64 / d as f64),
            None => (cut.ell, cut.length - cut.ell),
        };
        Self { length: cut.length, ell, ell_r, fraction: cut.fraction }
    }

    fn cos_pl(&self, k: usize) -> f64 {
        match self.fraction {
            Some((n, d)) => cos_pi_frac(k as u64 * n, d),
            None => (k as f64 * PI * self.ell / self.length).cos(),
        }
    }

    fn sin_pl(&self, k: usize) -> f64 {
        match self.fraction {
            Some((n, d)) => sin_pi_frac(k as u64 * n, d),
            None => (k as f64 * PI * self.ell / self.length).sin(),
        }
    }

    /// Resonance `p_k = q` where `q = (2m - 1)π/(2 side)` (half) or `mπ/side` (integer).
    fn resonant(&self, k: usize, m: usize, half: bool, right: bool, p: f64, q: f64) -> bool {
        match self.fraction {
            Some((n, d)) => {
                let side = if right { d - n } else { n } as u128;
                let (k, m, d) = (k as u128, m as u128, d as u128);
                if half {
                    2 * k * side == (2 * m - 1) * d
                } else {
                    k * side == m * d
                }
            }
            None => ((p - q) / p).abs() < 1e-12,
        }
    }
}

/// Overlap blocks for a Neumann condition at the cut.
pub fn gamma_neumann(cut: &CutConfig) -> Result<GammaSet> {
    if cut.cut_bc != BoundaryCondition::Neumann {
        return Err(Error::Config("gamma_neumann called with a Dirichlet cut".into()));
    }
    let (sl, sr) = allocate_modes(cut)?;
    let g = Geometry::new(cut);
    let s = cut.s_full;
    let (len, ell, ellr) = (g.length, g.ell, g.ell_r);
    let mut out = GammaSet {
        gp_l: DMatrix::zeros(s, sl),
        gm_l: DMatrix::zeros(s, sl),
        gp_r: DMatrix::zeros(s, sr),
        gm_r: DMatrix::zeros(s, sr),
    };
    for k in 1..=s {
        let p = k as f64 * PI / len;
        let c = g.cos_pl(k);
        for m in 1..=sl {
            let q = (m as f64 - 0.5) * PI / ell;
            let pre = sign(m) * p.sqrt() * c / ((len * ell).sqrt() * q.sqrt());
            out.gp_l[(k - 1, m - 1)] = if g.resonant(k, m, true, false, p, q) {
                (ell / len).sqrt()
            } else {
                pre / (p - q)
            };
            out.gm_l[(k - 1, m - 1)] = pre / (p + q);
        }
        for m in 1..=sr {
            let q = (m as f64 - 0.5) * PI / ellr;
            let pre = sign(m + 1) * p.sqrt() * c / ((len * ellr).sqrt() * q.sqrt());
            out.gp_r[(k - 1, m - 1)] = if g.resonant(k, m, true, true, p, q) {
                sign(k + 1) * (ellr / len).sqrt()
            } else {
                pre / (p - q)
            };
            out.gm_r[(k - 1, m - 1)] = pre / (p + q);
        }
    }
    Ok(out)
}

/// Overlap blocks for a Dirichlet condition at the cut.
pub fn gamma_dirichlet(cut: &CutConfig) -> Result<GammaSet> {
    if cut.cut_bc != BoundaryCondition::Dirichlet {
        return Err(Error::Config("gamma_dirichlet called with a Neumann cut".into()));
    }
    let (sl, sr) = allocate_modes(cut)?;
    let g = Geometry::new(cut);
    let s = cut.s_full;
    let (len, ell, ellr) = (g.length, g.ell, g.ell_r);
    let mut out = GammaSet {
        gp_l: DMatrix::zeros(s, sl),
        gm_l: DMatrix::zeros(s, sl),
        gp_r: DMatrix::zeros(s, sr),
        gm_r: DMatrix::zeros(s, sr),
    };
    for k in 1..=s {
        let p = k as f64 * PI / len;
        let sn = g.sin_pl(k);
        for m in 1..=sl {
            let q = m as f64 * PI / ell;
            let pre = sign(m) * sn * q.sqrt() / ((len * ell).sqrt() * p.sqrt());
            out.gp_l[(k - 1, m - 1)] = if g.resonant(k, m, false, false, p, q) {
                (ell / len).sqrt()
            } else {
                pre / (p - q)
            };
            out.gm_l[(k - 1, m - 1)] = pre / (p + q);
        }
        for m in 1..=sr {
            let q = m as f64 * PI / ellr;
            let pre = -sn * q.sqrt() / ((len * ellr).sqrt() * p.sqrt());
            out.gp_r[(k - 1, m - 1)] = if g.resonant(k, m, false, true, p, q) {
                g.cos_pl(k) * (ellr / len).sqrt()
            } else {
                pre / (p - q)
            };
            out.gm_r[(k - 1, m - 1)] = pre / (p + q);
        }
    }
    Ok(out)
}

/// Overlap blocks for whichever boundary condition the cut carries.
pub fn gamma(cut: &CutConfig) -> Result<GammaSet> {
    match cut.cut_bc {
        BoundaryCondition::Neumann => gamma_neumann(cut),
        BoundaryCondition::Dirichlet => gamma_dirichlet(cut),
    }
}

/// `M = [[u, v], [v, u]]` with `u = [γ^{+,L} γ^{+,R}]`, `v = [γ^{-,L} γ^{-,R}]`.
#[derive(Clone, Debug)]
pub struct BogoliubovMatrix {
    pub m: DMatrix<f64>,
    pub s_left: usize,
    pub s_right: usize,
}

impl BogoliubovMatrix {
    pub fn s_full(&self) -> usize {
        self.m.nrows() / 2
    }

    pub fn u(&self) -> DMatrix<f64> {
        let s = self.s_full();
        self.m.view((0, 0), (s, s)).into_owned()
    }

    pub fn v(&self) -> DMatrix<f64> {
        let s = self.s_full();
        self.m.view((0, s), (s, s)).into_owned()
    }

    /// Rebuild the γ blocks from `u` and `v`.
    pub fn gammas(&self) -> GammaSet {
        let (u, v) = (self.u(), self.v());
        GammaSet {
            gp_l: u.columns(0, self.s_left).into_owned(),
            gp_r: u.columns(self.s_left, self.s_right).into_owned(),
            gm_l: v.columns(0, self.s_left).into_owned(),
            gm_r: v.columns(self.s_left, self.s_right).into_owned(),
        }
    }
}

pub fn assemble_m(g: &GammaSet) -> Result<BogoliubovMatrix> {
    let s = g.s_full();
    let (sl, sr) = (g.s_left(), g.s_right());
    let shapes_ok = g.gm_l.shape() == (s, sl)
        && g.gp_r.nrows() == s
        && g.gm_r.shape() == (s, sr)
        && sl + sr == s;
    if !shapes_ok {
        return Err(Error::Dimension(format!(
            "γ blocks {:?} {:?} {:?} {:?} do not form a square Bogoliubov matrix",
            g.gp_l.shape(),
            g.gm_l.shape(),
            g.gp_r.shape(),
            g.gm_r.shape()
        )));
    }
    let mut m = DMatrix::zeros(2 * s, 2 * s);
    for (block, r0, c0) in [(&g.gp_l, 0, 0), (&g.gp_r, 0, sl), (&g.gm_l, 0, s), (&g.gm_r, 0, s + sl)] {
        m.view_mut((r0, c0), block.shape()).copy_from(block);
        m.view_mut((r0 + s, (c0 + s) % (2 * s)), block.shape()).copy_from(block);
    }
    Ok(BogoliubovMatrix { m, s_left: sl, s_right: sr })
}

fn k_metric(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(2 * n, 2 * n, |i, j| if i != j { 0.0 } else if i < n { 1.0 } else { -1.0 })
}

/// `(max|M K Mᵀ - K|, max|Mᵀ K M - K|)` with `K = diag(1, .., 1, -1, .., -1)`.
pub fn symplectic_deviation(m: &DMatrix<f64>) -> (f64, f64) {
    let n = m.nrows() / 2;
    let k = k_metric(n);
    let full = m * &k * m.transpose() - &k;
    let split = m.transpose() * &k * m - &k;
    (max_abs(&full), max_abs(&split))
}

/// `χ = ½ u⁻¹ v`.
#[derive(Clone, Debug)]
pub struct SqueezeKernel {
    pub chi: DMatrix<f64>,
    pub u_condition: f64,
}

/// Condition estimates above this are treated as a singular `u`.
pub const SINGULAR_CONDITION: f64 = 1e13;

pub fn squeeze_kernel(bm: &BogoliubovMatrix) -> Result<SqueezeKernel> {
    let (u, v) = (bm.u(), bm.v());
    let u_condition = condition_number(&u);
    if !(u_condition < SINGULAR_CONDITION) {
        return Err(Error::SingularU { condition: u_condition });
    }
    let x = u.lu().solve(&v).ok_or(Error::SingularU { condition: u_condition })?;
    let chi = x * 0.5;
    if chi.iter().any(|c| !c.is_finite()) {
        return Err(Error::SingularU { condition: u_condition });
    }
    Ok(SqueezeKernel { chi, u_condition })
}

/// Per-cut diagnostics record.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CutDiagnostics {
    pub d_full: f64,
    pub d_split: f64,
    pub u_condition: f64,
}

/// Everything downstream needs about one cut.
#[derive(Clone, Debug)]
pub struct SplitSetup {
    pub cut: CutConfig,
    pub gammas: GammaSet,
    pub bogoliubov: BogoliubovMatrix,
    pub kernel: SqueezeKernel,
    pub diagnostics: CutDiagnostics,
}

pub fn prepare_split(cut: &CutConfig) -> Result<SplitSetup> {
    let gammas = gamma(cut)?;
    let bogoliubov = assemble_m(&gammas)?;
    let (d_full, d_split) = symplectic_deviation(&bogoliubov.m);
    let kernel = squeeze_kernel(&bogoliubov)?;
    let diagnostics = CutDiagnostics { d_full, d_split, u_condition: kernel.u_condition };
    Ok(SplitSetup { cut: cut.clone(), gammas, bogoliubov, kernel, diagnostics })
}
