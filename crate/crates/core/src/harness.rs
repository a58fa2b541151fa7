//! Batch driver: JSON run configurations, cached pipelines and CSV output.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::cache::{content_key, Cache};
use crate::entanglement::{dominant_peak, entropy_record, fourier_spectrum, EntropyRecord};
use crate::fock_basis::{enumerate_full_basis, BasisTable};
use crate::gaussian::{
    gaussian_renyi, gaussian_vn, quench_covariance, reduce_covariance, thermal_covariance, CovarianceMatrix,
    LatticeConfig,
};
use crate::ht_models::{build_hamiltonian, HamiltonianMatrix, ModelKind, ModelParams};
use crate::mode_splitting::{prepare_split, split_product_basis, BoundaryCondition, CutConfig, CutDiagnostics, Rounding, Scheme};
use crate::overlap::{build_u_t, OverlapMethod, OverlapOptions, SplitIsometry, SplitTransform, DEFAULT_BUDGET};
use crate::pairing::TContext;
use crate::states::{
    full_tag, ground_state_from, quench_evolve_with, thermal_state_from, DensityMatrix, SpectralDecomposition,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Spectrum,
    EntropyProfile,
    Thermal,
    Quench,
    Oracle,
    Fourier,
}

/// Which engine produces a time series for `fourier`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Ht,
    Oracle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuenchSpec {
    pub pre: ModelParams,
    pub post: ModelParams,
    pub t_max: f64,
    /// Number of intervals; the grid has `steps + 1` points from 0.
    pub steps: usize,
    /// Temperature of the pre-quench state, 0 for its ground state.
    #[serde(default)]
    pub t0: f64,
    #[serde(default = "half")]
    pub cut: [u64; 2],
}

impl QuenchSpec {
    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|i| self.t_max * i as f64 / self.steps as f64).collect()
    }
}

fn half() -> [u64; 2] {
    [1, 2]
}
fn neumann() -> BoundaryCondition {
    BoundaryCondition::Neumann
}
fn density() -> Scheme {
    Scheme::ConstantDensity
}
fn round() -> Rounding {
    Rounding::Round
}
fn default_alphas() -> Vec<f64> {
    vec![2.0]
}
fn default_budget() -> u32 {
    DEFAULT_BUDGET
}
fn default_sites() -> usize {
    200
}
fn yes() -> bool {
    true
}
fn massless() -> ModelParams {
    ModelParams::massless(1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default = "massless")]
    pub model: ModelParams,
    pub s_full: usize,
    /// Cut fractions `[n, d]`; all interior `n/s_F` when absent.
    #[serde(default)]
    pub cuts: Option<Vec<[u64; 2]>>,
    #[serde(default = "neumann")]
    pub cut_bc: BoundaryCondition,
    #[serde(default = "density")]
    pub scheme: Scheme,
    #[serde(default = "round")]
    pub rounding: Rounding,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default)]
    pub quench: Option<QuenchSpec>,
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub cache: Option<PathBuf>,
    #[serde(default)]
    pub shift_align: bool,
    #[serde(default)]
    pub allow_incommensurate: bool,
    #[serde(default = "default_budget")]
    pub budget: u32,
    #[serde(default = "default_overlap")]
    pub overlap: OverlapMethod,
    /// Lattice sites of the Gaussian oracle.
    #[serde(default = "default_sites")]
    pub oracle_sites: usize,
    #[serde(default = "yes")]
    pub negativity: bool,
    #[serde(default)]
    pub fourier_source: Method,
}

fn default_overlap() -> OverlapMethod {
    OverlapMethod::Recurrence
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.s_full < 2 {
            return Err(Error::Config(format!("s_full must be at least 2, got {}", self.s_full)));
        }
        self.model.validate()?;
        if let Some(q) = &self.quench {
            q.pre.validate()?;
            q.post.validate()?;
            if q.pre.length != q.post.length {
                return Err(Error::Config("pre- and post-quench lengths differ".into()));
            }
            if !(q.t_max > 0.0) || q.steps == 0 {
                return Err(Error::Config("quench needs t_max > 0 and steps ≥ 1".into()));
            }
        }
        if matches!(self.command, Command::Quench | Command::Fourier) && self.quench.is_none() {
            return Err(Error::Config(format!("command {:?} needs a quench block", self.command)));
        }
        if self.command == Command::Thermal && !(self.temperature > 0.0) {
            return Err(Error::Config("thermal needs temperature > 0".into()));
        }
        if self.alphas.iter().any(|&a| !(a > 0.0) || a == 1.0) {
            return Err(Error::Config("Rényi indices must be positive and differ from 1".into()));
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        match &self.quench {
            Some(q) if matches!(self.command, Command::Quench | Command::Fourier) => q.post.length,
            _ => self.model.length,
        }
    }

    pub fn options(&self) -> OverlapOptions {
        OverlapOptions { method: self.overlap, budget: self.budget }
    }

    pub fn cut_fractions(&self) -> Vec<(u64, u64)> {
        match &self.cuts {
            Some(c) => c.iter().map(|f| (f[0], f[1])).collect(),
            None => (1..self.s_full as u64).map(|n| (n, self.s_full as u64)).collect(),
        }
    }
}

/// Second series shifted so both coincide at `anchor`: `b + (a(anchor) − b(anchor))`.
pub fn shift_align(a: &[(f64, f64)], b: &[(f64, f64)], anchor: f64) -> Result<Vec<(f64, f64)>> {
    let find = |s: &[(f64, f64)]| {
        s.iter()
            .find(|p| (p.0 - anchor).abs() <= 1e-12 * anchor.abs().max(1.0))
            .map(|p| p.1)
            .ok_or_else(|| Error::Config(format!("series has no point at the anchor {anchor}")))
    };
    let shift = find(a)? - find(b)?;
    Ok(b.iter().map(|&(x, y)| (x, y + shift)).collect())
}

/// Largest pointwise `|a − b|` over the abscissas both series share.
pub fn max_abs_difference(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    a.iter()
        .filter_map(|&(x, y)| b.iter().find(|p| (p.0 - x).abs() < 1e-12).map(|p| (y - p.1).abs()))
        .fold(0.0, f64::max)
}

/// Side record stored next to a cached `U_T`.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct IsometryMeta {
    iso_defect: f64,
    vacuum_factor: f64,
    diagnostics: CutDiagnostics,
}

#[derive(Serialize)]
struct IsometryKey<'a> {
    version: u32,
    cut: &'a CutConfig,
    full_cutoff2: u32,
    method: OverlapMethod,
}

#[derive(Serialize)]
struct HamiltonianKey<'a> {
    version: u32,
    params: &'a ModelParams,
    s_full: usize,
}

/// Shared state of one run: the full basis, options and the optional cache.
pub struct Pipeline {
    pub full: BasisTable,
    pub s_full: usize,
    pub cut_bc: BoundaryCondition,
    pub scheme: Scheme,
    pub rounding: Rounding,
    pub options: OverlapOptions,
    pub allow_incommensurate: bool,
    pub cache: Option<Cache>,
    /// Warnings collected along the way.
    pub notes: Vec<String>,
}

impl Pipeline {
    pub fn new(s_full: usize, cut_bc: BoundaryCondition) -> Self {
        Self {
            full: enumerate_full_basis(s_full),
            s_full,
            cut_bc,
            scheme: Scheme::ConstantDensity,
            rounding: Rounding::Round,
            options: OverlapOptions::default(),
            allow_incommensurate: false,
            cache: None,
            notes: Vec::new(),
        }
    }

    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        let mut p = Self::new(cfg.s_full, cfg.cut_bc);
        p.scheme = cfg.scheme;
        p.rounding = cfg.rounding;
        p.options = cfg.options();
        p.allow_incommensurate = cfg.allow_incommensurate;
        p.cache = cfg.cache.as_ref().map(Cache::open).transpose()?;
        Ok(p)
    }

    pub fn cut(&mut self, length: f64, (n, d): (u64, u64)) -> Result<CutConfig> {
        let cut = CutConfig::at_fraction(length, n, d, self.s_full, self.cut_bc)?.with_scheme(self.scheme, self.rounding);
        if self.scheme == Scheme::ConstantDensity && !cut.is_commensurate() {
            if !self.allow_incommensurate {
                return Err(Error::Config(format!(
                    "cut {n}/{d} is not commensurate with s_F = {}; pass --allow-incommensurate to override",
                    self.s_full
                )));
            }
            self.notes.push(format!(
                "warning: cut {n}/{d} is incommensurate with s_F = {}; mode densities differ across the cut",
                self.s_full
            ));
        }
        Ok(cut)
    }

    pub fn transform(&mut self, cut: &CutConfig) -> Result<SplitTransform> {
        let product = split_product_basis(cut)?;
        let key = content_key(&IsometryKey {
            version: 1,
            cut,
            full_cutoff2: self.full.cutoff2(),
            method: self.options.method,
        })?;
        if let Some(cache) = &self.cache {
            if let Some((u, meta)) = cache.load::<IsometryMeta>("ut", &key)? {
                if u.shape() == (product.dim(), self.full.dim()) {
                    let isometry = SplitIsometry {
                        u,
                        cut: cut.clone(),
                        iso_defect: meta.iso_defect,
                        vacuum_factor: meta.vacuum_factor,
                    };
                    return Ok(SplitTransform { isometry, product, diagnostics: meta.diagnostics });
                }
            }
        }
        let setup = prepare_split(cut)?;
        let ctx = TContext::new(&setup.gammas, &setup.kernel)?;
        let isometry = build_u_t(&self.full, &product, &ctx, cut, self.options)?;
        if let Some(cache) = &self.cache {
            let meta = IsometryMeta {
                iso_defect: isometry.iso_defect,
                vacuum_factor: isometry.vacuum_factor,
                diagnostics: setup.diagnostics.clone(),
            };
            cache.store("ut", &key, &isometry.u, &meta)?;
        }
        Ok(SplitTransform { isometry, product, diagnostics: setup.diagnostics })
    }

    pub fn hamiltonian(&self, params: &ModelParams) -> Result<HamiltonianMatrix> {
        let key = content_key(&HamiltonianKey { version: 1, params, s_full: self.s_full })?;
        if let Some(cache) = &self.cache {
            if let Some((h, p)) = cache.load::<ModelParams>("h", &key)? {
                if h.nrows() == self.full.dim() && p == *params {
                    return Ok(HamiltonianMatrix { h, params: p });
                }
            }
        }
        let h = build_hamiltonian(&self.full, params)?;
        if let Some(cache) = &self.cache {
            cache.store("h", &key, &h.h, params)?;
        }
        Ok(h)
    }

    pub fn spectral(&self, params: &ModelParams) -> Result<(HamiltonianMatrix, SpectralDecomposition)> {
        let h = self.hamiltonian(params)?;
        let s = SpectralDecomposition::new(&h.h)?;
        Ok((h, s))
    }

    /// Ground state (`t = 0`) or thermal state of a model.
    pub fn state(&self, params: &ModelParams, t: f64) -> Result<DensityMatrix> {
        let (h, spec) = self.spectral(params)?;
        if t > 0.0 {
            thermal_state_from(&spec, t, &full_tag(&h))
        } else {
            let g = ground_state_from(&spec, &full_tag(&h));
            Ok(g.rho)
        }
    }

    /// Entropy records of several states for every cut, `out[state][cut]`.
    pub fn profiles(
        &mut self,
        states: &[DensityMatrix],
        length: f64,
        cuts: &[(u64, u64)],
        alphas: &[f64],
        negativity: bool,
    ) -> Result<Vec<Vec<EntropyRecord>>> {
        let mut out = vec![Vec::with_capacity(cuts.len()); states.len()];
        for &f in cuts {
            let cut = self.cut(length, f)?;
            let t = self.transform(&cut)?;
            for (i, rho) in states.iter().enumerate() {
                let rec = entropy_record(rho, &t, alphas, negativity)?;
                if rec.raw_trace < crate::entanglement::LOW_TRACE {
                    self.notes.push(format!(
                        "warning: trace of ρ_LR before normalization is {:.3} at cut {}/{}",
                        rec.raw_trace, f.0, f.1
                    ));
                }
                out[i].push(rec);
            }
        }
        Ok(out)
    }

    /// `(t, S_vN, iso_defect)` of the left block after a sudden quench.
    pub fn quench_series(&mut self, q: &QuenchSpec) -> Result<Vec<(f64, f64, f64)>> {
        let rho0 = self.state(&q.pre, q.t0)?;
        let (_, spec) = self.spectral(&q.post)?;
        let times = q.times();
        let states = quench_evolve_with(&rho0, &spec, &times)?;
        let cut = self.cut(q.post.length, (q.cut[0], q.cut[1]))?;
        let t = self.transform(&cut)?;
        states
            .iter()
            .zip(&times)
            .map(|(rho, &time)| {
                let r = entropy_record(rho, &t, &[], false)?;
                Ok((time, r.s_vn, r.iso_defect))
            })
            .collect()
    }
}

/// Klein-Gordon mass of a free model, for the Gaussian oracle.
pub fn oracle_mass(p: &ModelParams) -> Result<f64> {
    match p.model {
        ModelKind::MasslessFb => Ok(0.0),
        ModelKind::MassiveFb => Ok(p.m),
        ModelKind::SineGordon => Err(Error::Config("the Gaussian oracle covers free models only".into())),
    }
}

/// Gaussian entropy record at a cut fraction.
pub fn oracle_record(g: &CovarianceMatrix, cfg: &LatticeConfig, fraction: f64, alphas: &[f64]) -> Result<EntropyRecord> {
    let j = cfg.sites_below(fraction * cfg.length);
    if j == 0 || j >= cfg.k {
        return Err(Error::Config(format!("cut {fraction} leaves an empty block on {} sites", cfg.k)));
    }
    let left = reduce_covariance(g, 0..j)?;
    let s_l = gaussian_vn(&left)?;
    let s_r = gaussian_vn(&reduce_covariance(g, j..cfg.k)?)?;
    let s_lr = gaussian_vn(g)?;
    let s_renyi = alphas
        .iter()
        .map(|&a| gaussian_renyi(&left, a).map(|s| (a, s)))
        .collect::<Result<Vec<_>>>()?;
    Ok(EntropyRecord {
        cut_position: fraction,
        s_vn: s_l,
        s_renyi,
        s_l,
        s_r,
        s_lr,
        mutual_information: s_l + s_r - s_lr,
        log_negativity: f64::NAN,
        iso_defect: 0.0,
        raw_trace: 1.0,
    })
}

pub fn oracle_profile(m: f64, t: f64, cfg: &LatticeConfig, fractions: &[f64], alphas: &[f64]) -> Result<Vec<EntropyRecord>> {
    let g = thermal_covariance(m, t, cfg)?;
    fractions.iter().map(|&f| oracle_record(&g, cfg, f, alphas)).collect()
}

pub fn oracle_quench_series(m0: f64, t0: f64, m: f64, cfg: &LatticeConfig, fraction: f64, times: &[f64]) -> Result<Vec<(f64, f64)>> {
    times
        .iter()
        .map(|&t| {
            let g = quench_covariance(m0, t0, m, t, cfg)?;
            Ok((t, oracle_record(&g, cfg, fraction, &[])?.s_vn))
        })
        .collect()
}

/// Full 17-significant-digit formatting.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:.16e}")
    }
}

fn alpha_label(a: f64) -> String {
    let s = format!("{a}");
    s.replace('.', "p")
}

pub fn profile_csv(records: &[EntropyRecord], alphas: &[f64], method: Option<&str>) -> String {
    let mut out = String::from("cut_fraction,S_vN");
    for a in alphas {
        write!(out, ",S_renyi_{}", alpha_label(*a)).unwrap();
    }
    out.push_str(",mutual_info,log_negativity,iso_defect");
    if method.is_some() {
        out.push_str(",method");
    }
    out.push('\n');
    for r in records {
        write!(out, "{},{}", fmt_f64(r.cut_position), fmt_f64(r.s_vn)).unwrap();
        for a in alphas {
            let v = r.s_renyi.iter().find(|p| p.0 == *a).map(|p| p.1).unwrap_or(f64::NAN);
            write!(out, ",{}", fmt_f64(v)).unwrap();
        }
        write!(out, ",{},{},{}", fmt_f64(r.mutual_information), fmt_f64(r.log_negativity), fmt_f64(r.iso_defect)).unwrap();
        if let Some(m) = method {
            write!(out, ",{m}").unwrap();
        }
        out.push('\n');
    }
    out
}

fn series_csv(rows: &[(f64, f64, f64)], method: Option<&str>) -> String {
    let mut out = String::from("t,S_vN,iso_defect");
    if method.is_some() {
        out.push_str(",method");
    }
    out.push('\n');
    for &(t, s, d) in rows {
        write!(out, "{},{},{}", fmt_f64(t), fmt_f64(s), fmt_f64(d)).unwrap();
        if let Some(m) = method {
            write!(out, ",{m}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// CSV body plus single-line diagnostics for stderr.
#[derive(Clone, Debug, Default)]
pub struct RunOutput {
    pub csv: String,
    pub diagnostics: Vec<String>,
}

fn fractions_f64(fr: &[(u64, u64)]) -> Vec<f64> {
    fr.iter().map(|&(n, d)| n as f64 / d as f64).collect()
}

/// Executes one configuration and returns its CSV.
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let mut p = Pipeline::from_config(cfg)?;
    let mut diagnostics = Vec::new();
    let csv = match cfg.command {
        Command::Spectrum => {
            let (_, spec) = p.spectral(&cfg.model)?;
            let e0 = spec.eigenvalues[0];
            let mut out = String::from("index,energy,gap\n");
            for (i, e) in spec.eigenvalues.iter().enumerate() {
                writeln!(out, "{i},{},{}", fmt_f64(*e), fmt_f64(e - e0)).unwrap();
            }
            out
        }
        Command::EntropyProfile | Command::Thermal => {
            let t = if cfg.command == Command::Thermal { cfg.temperature } else { 0.0 };
            let rho = p.state(&cfg.model, t)?;
            let recs = p.profiles(&[rho], cfg.model.length, &cfg.cut_fractions(), &cfg.alphas, cfg.negativity)?;
            profile_csv(&recs[0], &cfg.alphas, None)
        }
        Command::Quench => series_csv(&p.quench_series(cfg.quench.as_ref().expect("validated"))?, None),
        Command::Oracle => {
            let lattice = LatticeConfig::new(cfg.oracle_sites, cfg.length())?;
            match &cfg.quench {
                Some(q) => {
                    let series = oracle_quench_series(
                        oracle_mass(&q.pre)?,
                        q.t0,
                        oracle_mass(&q.post)?,
                        &lattice,
                        q.cut[0] as f64 / q.cut[1] as f64,
                        &q.times(),
                    )?;
                    let series = if cfg.shift_align {
                        let ht: Vec<(f64, f64)> = p.quench_series(q)?.iter().map(|r| (r.0, r.1)).collect();
                        let aligned = shift_align(&ht, &series, 0.0)?;
                        diagnostics.push(format!("max_abs_difference={}", fmt_f64(max_abs_difference(&ht, &aligned))));
                        aligned
                    } else {
                        series
                    };
                    let rows: Vec<(f64, f64, f64)> = series.iter().map(|&(t, s)| (t, s, 0.0)).collect();
                    series_csv(&rows, Some("oracle"))
                }
                None => {
                    let fr = cfg.cut_fractions();
                    let mut recs =
                        oracle_profile(oracle_mass(&cfg.model)?, cfg.temperature, &lattice, &fractions_f64(&fr), &cfg.alphas)?;
                    if cfg.shift_align {
                        let rho = p.state(&cfg.model, cfg.temperature)?;
                        let ht = p.profiles(&[rho], cfg.model.length, &fr, &cfg.alphas, false)?.remove(0);
                        let a: Vec<(f64, f64)> = ht.iter().map(|r| (r.cut_position, r.s_vn)).collect();
                        let b: Vec<(f64, f64)> = recs.iter().map(|r| (r.cut_position, r.s_vn)).collect();
                        let aligned = shift_align(&a, &b, 0.5)?;
                        let shift = aligned[0].1 - b[0].1;
                        for r in recs.iter_mut() {
                            r.s_vn += shift;
                            r.s_l += shift;
                        }
                        diagnostics.push(format!("max_abs_difference={}", fmt_f64(max_abs_difference(&a, &aligned))));
                        // Each Rényi column gets its own constant.
                        for (i, _) in cfg.alphas.iter().enumerate() {
                            let a: Vec<(f64, f64)> = ht.iter().map(|r| (r.cut_position, r.s_renyi[i].1)).collect();
                            let b: Vec<(f64, f64)> = recs.iter().map(|r| (r.cut_position, r.s_renyi[i].1)).collect();
                            let shift = shift_align(&a, &b, 0.5)?[0].1 - b[0].1;
                            for r in recs.iter_mut() {
                                r.s_renyi[i].1 += shift;
                            }
                        }
                    }
                    profile_csv(&recs, &cfg.alphas, Some("oracle"))
                }
            }
        }
        Command::Fourier => {
            let q = cfg.quench.as_ref().expect("validated");
            let series: Vec<(f64, f64)> = match cfg.fourier_source {
                Method::Ht => p.quench_series(q)?.iter().map(|r| (r.0, r.1)).collect(),
                Method::Oracle => {
                    let lattice = LatticeConfig::new(cfg.oracle_sites, q.post.length)?;
                    oracle_quench_series(
                        oracle_mass(&q.pre)?,
                        q.t0,
                        oracle_mass(&q.post)?,
                        &lattice,
                        q.cut[0] as f64 / q.cut[1] as f64,
                        &q.times(),
                    )?
                }
            };
            let spec = fourier_spectrum(&series)?;
            if let Some((bin, w, a)) = dominant_peak(&spec) {
                diagnostics.push(format!("dominant_peak bin={bin} omega={} amplitude={}", fmt_f64(w), fmt_f64(a)));
            }
            let mut out = String::from("omega,amplitude\n");
            for (w, a) in spec {
                writeln!(out, "{},{}", fmt_f64(w), fmt_f64(a)).unwrap();
            }
            out
        }
    };
    let mut all = p.notes;
    all.extend(diagnostics);
    Ok(RunOutput { csv, diagnostics: all })
}
