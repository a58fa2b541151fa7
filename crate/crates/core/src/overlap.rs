//! The overlap matrix `U_T` between the full Fock basis and the split product basis.
//!
//! Entry `⟨n_L, n_R | n_F⟩` is a derivative of the generating functional
//! `exp(T)` divided by `Π √(n!)`. Two evaluation paths exist: the pairing tree
//! per element, and a Wick recurrence that fills the matrix column by column.
//! The recurrence uses previously computed entries:
//! `√n_k E(s, f) = Σ_b T_kb √s_b E(s−e_b, f−e_k) + Σ_p T_kp √(f−e_k)_p E(s, f−e_k−e_p)`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fock_basis::{BasisTable, ModeOccupation, ProductBasis};
use crate::linalg::max_abs;
use crate::mode_splitting::{prepare_split, split_product_basis, CutConfig, CutDiagnostics};
use crate::pairing::{evaluate_derivative, DerivIndex, DerivativeSpec, Side, TContext};
use crate::{Error, Result};

/// Default cap on `|ν|` for the tree path.
pub const DEFAULT_BUDGET: u32 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OverlapMethod {
    /// Column recurrence, linear in the number of entries.
    Recurrence,
    /// Lexicographic pairing tree per entry, bounded by the budget.
    Tree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapOptions {
    pub method: OverlapMethod,
    /// Largest `|ν|` the tree path may evaluate.
    pub budget: u32,
}

impl Default for OverlapOptions {
    fn default() -> Self {
        Self { method: OverlapMethod::Recurrence, budget: DEFAULT_BUDGET }
    }
}

/// `U_T` with rows in the product basis and columns in the full basis.
#[derive(Clone, Debug)]
pub struct SplitIsometry {
    pub u: DMatrix<f64>,
    pub cut: CutConfig,
    /// `max|UᵀU − 1|`.
    pub iso_defect: f64,
    /// `⟨0,0|0_F⟩`, the common factor applied to every entry.
    pub vacuum_factor: f64,
}

/// Multi-index for the overlap `⟨n_L, n_R | n_F⟩`.
pub fn derivative_spec(n_l: &ModeOccupation, n_r: &ModeOccupation, n_f: &ModeOccupation) -> DerivativeSpec {
    let side = |occ: &ModeOccupation, s: Side| {
        occ.occupations()
            .iter()
            .enumerate()
            .map(move |(i, &n)| (DerivIndex::Split { side: s, mode: i + 1 }, n))
            .collect::<Vec<_>>()
    };
    let full = n_f.occupations().iter().enumerate().map(|(i, &n)| (DerivIndex::Full { mode: i + 1 }, n));
    DerivativeSpec::new(side(n_l, Side::L).into_iter().chain(side(n_r, Side::R)).chain(full))
}

fn sqrt_factorials(occ: &ModeOccupation) -> f64 {
    occ.occupations().iter().map(|&n| (1..=n).map(|k| (k as f64).sqrt()).product::<f64>()).product()
}

/// Relative overlap `∂^ν exp(T)|₀ / Π√(n!)`, so that `⟨0,0|0⟩ = 1`.
pub fn matrix_element(n_l: &ModeOccupation, n_r: &ModeOccupation, n_f: &ModeOccupation, ctx: &TContext) -> f64 {
    if (n_l.total() + n_r.total() + n_f.total()) % 2 == 1 {
        return 0.0;
    }
    let nu = derivative_spec(n_l, n_r, n_f);
    let norm = sqrt_factorials(n_l) * sqrt_factorials(n_r) * sqrt_factorials(n_f);
    evaluate_derivative(&nu, ctx) / norm
}

/// [`matrix_element`] with the `|ν|` budget enforced.
pub fn matrix_element_budgeted(
    n_l: &ModeOccupation,
    n_r: &ModeOccupation,
    n_f: &ModeOccupation,
    ctx: &TContext,
    budget: u32,
) -> Result<f64> {
    let order = n_l.total() + n_r.total() + n_f.total();
    if order % 2 == 1 {
        return Ok(0.0);
    }
    if order > budget {
        return Err(Error::Budget { order, budget });
    }
    Ok(matrix_element(n_l, n_r, n_f, ctx))
}

/// `⟨0,0|0_F⟩ = det(1 − S²)^{1/4}` with `S = χ + χᵀ`, the norm of the squeezed vacuum
/// `exp(−½ a†S a†)|0,0⟩`. For an exactly symplectic `M` this is `|det u|^{−1/2}`.
pub fn vacuum_factor(ctx: &TContext) -> Result<f64> {
    let ns = ctx.s_left() + ctx.s_right();
    let s = -ctx.table().view((0, 0), (ns, ns)).into_owned();
    let eig = s.symmetric_eigenvalues();
    let mut log = 0.0;
    for &l in eig.iter() {
        if l.abs() >= 1.0 {
            return Err(Error::NonNormalizable { value: l });
        }
        log += 0.25 * (1.0 - l * l).ln();
    }
    Ok(log.exp())
}

const NONE: u32 = u32::MAX;

/// `lower[i * modes + (m-1)]` = ordinal of `state_i − e_m`, or `NONE`.
fn lowering_table(b: &BasisTable, modes: usize) -> Vec<u32> {
    let mut out = vec![NONE; b.dim() * modes];
    for (i, s) in b.states().iter().enumerate() {
        for m in 1..=modes {
            if let Some(t) = s.shifted(m, -1) {
                if let Some(j) = b.index_of(&t) {
                    out[i * modes + m - 1] = j as u32;
                }
            }
        }
    }
    out
}

fn check_dims(full: &BasisTable, prod: &ProductBasis, ctx: &TContext) -> Result<()> {
    let ok = full.mode_count() <= ctx.s_full()
        && prod.left.mode_count() <= ctx.s_left()
        && prod.right.mode_count() <= ctx.s_right();
    if ok {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "bases with ({}, {}, {}) modes exceed the context ({}, {}, {})",
            full.mode_count(),
            prod.left.mode_count(),
            prod.right.mode_count(),
            ctx.s_full(),
            ctx.s_left(),
            ctx.s_right()
        )))
    }
}

fn build_recurrence(full: &BasisTable, prod: &ProductBasis, ctx: &TContext) -> DMatrix<f64> {
    let (sl, sr, sf) = (prod.left.mode_count(), prod.right.mode_count(), full.mode_count());
    let (dl, dr, df) = (prod.left.dim(), prod.right.dim(), full.dim());
    let rows = dl * dr;
    let t = ctx.table();
    let (cl, cs) = (ctx.s_left(), ctx.s_left() + ctx.s_right());
    let low_l = lowering_table(&prod.left, sl);
    let low_r = lowering_table(&prod.right, sr);
    let low_f = lowering_table(full, sf);
    let tot_l: Vec<u32> = prod.left.states().iter().map(|s| s.total()).collect();
    let tot_r: Vec<u32> = prod.right.states().iter().map(|s| s.total()).collect();
    let occ = |b: &BasisTable, i: usize, m: usize| b.state(i).get(m) as f64;

    let mut data = vec![0.0f64; rows * df];

    // Vacuum column: rows in order of increasing split level so that lowered rows are ready.
    let mut order: Vec<usize> = (0..rows).collect();
    order.sort_by_key(|&o| {
        let (l, r) = prod.split(o);
        (prod.left.state(l).level2() + prod.right.state(r).level2(), o)
    });
    for &o in &order {
        let (l, r) = prod.split(o);
        if (tot_l[l] + tot_r[r]) % 2 == 1 {
            continue;
        }
        if o == 0 {
            data[0] = 1.0;
            continue;
        }
        // Remove one quantum of the first occupied split mode (global position a).
        let (a, l1, r1, na) = match prod.left.state(l).occupations().iter().position(|&n| n > 0) {
            Some(m) => (m, low_l[l * sl + m] as usize, r, occ(&prod.left, l, m + 1)),
            None => {
                let m = prod.right.state(r).occupations().iter().position(|&n| n > 0).expect("non-vacuum row");
                (cl + m, l, low_r[r * sr + m] as usize, occ(&prod.right, r, m + 1))
            }
        };
        let mut acc = 0.0;
        for m in 0..sl {
            let nb = occ(&prod.left, l1, m + 1);
            if nb > 0.0 {
                let lo = low_l[l1 * sl + m] as usize;
                acc += t[(a, m)] * nb.sqrt() * data[prod.ordinal(lo, r1)];
            }
        }
        for m in 0..sr {
            let nb = occ(&prod.right, r1, m + 1);
            if nb > 0.0 {
                let ro = low_r[r1 * sr + m] as usize;
                acc += t[(a, cl + m)] * nb.sqrt() * data[prod.ordinal(l1, ro)];
            }
        }
        data[o] = acc / na.sqrt();
    }

    for c in 1..df {
        let f = full.state(c);
        let k = f.occupations().iter().position(|&n| n > 0).expect("non-vacuum column");
        let nk = f.get(k + 1) as f64;
        let c1 = low_f[c * sf + k] as usize;
        let f1 = full.state(c1);
        let tot_f = f.total();
        let kk = cs + k;
        // Full-full terms: (p, f1 − e_p) with weight T_kp √(f1_p).
        let ff: Vec<(f64, usize)> = (0..sf)
            .filter(|&p| f1.get(p + 1) > 0)
            .map(|p| (t[(kk, cs + p)] * (f1.get(p + 1) as f64).sqrt(), low_f[c1 * sf + p] as usize))
            .collect();
        let (done, rest) = data.split_at_mut(c * rows);
        let col = &mut rest[..rows];
        col.par_iter_mut().enumerate().for_each(|(o, out)| {
            let (l, r) = prod.split(o);
            if (tot_l[l] + tot_r[r] + tot_f) % 2 == 1 {
                return;
            }
            let prev = &done[c1 * rows..(c1 + 1) * rows];
            let mut acc = 0.0;
            let ls = prod.left.state(l).occupations();
            for (m, &n) in ls.iter().enumerate() {
                if n > 0 {
                    let lo = low_l[l * sl + m] as usize;
                    acc += t[(kk, m)] * (n as f64).sqrt() * prev[lo * dr + r];
                }
            }
            let rs = prod.right.state(r).occupations();
            for (m, &n) in rs.iter().enumerate() {
                if n > 0 {
                    let ro = low_r[r * sr + m] as usize;
                    acc += t[(kk, cl + m)] * (n as f64).sqrt() * prev[l * dr + ro];
                }
            }
            for &(w, c2) in &ff {
                acc += w * done[c2 * rows + o];
            }
            *out = acc / nk.sqrt();
        });
    }
    DMatrix::from_vec(rows, df, data)
}

fn build_tree(full: &BasisTable, prod: &ProductBasis, ctx: &TContext, budget: u32) -> Result<DMatrix<f64>> {
    let rows = prod.dim();
    let cols: Vec<Vec<f64>> = (0..full.dim())
        .into_par_iter()
        .map(|c| {
            let f = full.state(c);
            (0..rows)
                .map(|o| {
                    let (l, r) = prod.split(o);
                    matrix_element_budgeted(prod.left.state(l), prod.right.state(r), f, ctx, budget)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_fn(rows, full.dim(), |o, c| cols[c][o]))
}

/// Fill `U_T` and record its isometry defect.
pub fn build_u_t(
    full: &BasisTable,
    prod: &ProductBasis,
    ctx: &TContext,
    cut: &CutConfig,
    opts: OverlapOptions,
) -> Result<SplitIsometry> {
    check_dims(full, prod, ctx)?;
    let vacuum = vacuum_factor(ctx)?;
    let mut u = match opts.method {
        OverlapMethod::Recurrence => build_recurrence(full, prod, ctx),
        OverlapMethod::Tree => build_tree(full, prod, ctx, opts.budget)?,
    };
    u *= vacuum;
    if u.iter().any(|x| !x.is_finite()) {
        return Err(Error::Parameter("non-finite overlap entry".into()));
    }
    let gram = u.tr_mul(&u);
    let iso_defect = max_abs(&(gram - DMatrix::identity(full.dim(), full.dim())));
    Ok(SplitIsometry { u, cut: cut.clone(), iso_defect, vacuum_factor: vacuum })
}

/// Everything needed to move states of one cut from the full to the split basis.
#[derive(Clone, Debug)]
pub struct SplitTransform {
    pub isometry: SplitIsometry,
    pub product: ProductBasis,
    pub diagnostics: CutDiagnostics,
}

/// Split setup, bases and `U_T` for one cut with the full basis of `s_F` modes.
pub fn split_transform(cut: &CutConfig, full: &BasisTable, opts: OverlapOptions) -> Result<SplitTransform> {
    let setup = prepare_split(cut)?;
    let ctx = TContext::new(&setup.gammas, &setup.kernel)?;
    let product = split_product_basis(cut)?;
    let isometry = build_u_t(full, &product, &ctx, cut, opts)?;
    Ok(SplitTransform { isometry, product, diagnostics: setup.diagnostics })
}
