//! Independent reference computations for the acceptance suite.

#![allow(dead_code)]

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;

/// One result line per criterion, written past the test harness's output capture.
pub fn report(n: u32, pass: bool, title: &str, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "criterion {n:>2} [{tag}] {title}: {detail}");
}

/// Adaptive Simpson integration to absolute tolerance `tol`.
///
/// The first six bisections are unconditional: oscillatory integrands can
/// vanish at all three points of a coarse panel.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    const FORCED: u32 = 6;
    #[allow(clippy::too_many_arguments)]
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || (depth <= 50 - FORCED && delta.abs() <= 15.0 * tol) {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `(γ⁺, γ⁻)` of full mode `k` against split mode `m`, from the overlap of the
/// mode functions on the subinterval. `neumann` selects the condition at the cut.
pub fn projection_gamma(k: usize, m: usize, length: f64, ell: f64, neumann: bool, right: bool) -> (f64, f64) {
    let side = if right { length - ell } else { ell };
    let p = k as f64 * PI / length;
    let q = if neumann { (m as f64 - 0.5) * PI / side } else { m as f64 * PI / side };
    let overlap = if right {
        if neumann {
            adaptive_simpson(&|x: f64| (q * (length - x)).sin() * (p * x).sin(), ell, length, 1e-14)
        } else {
            adaptive_simpson(&|x: f64| (q * (x - ell)).sin() * (p * x).sin(), ell, length, 1e-14)
        }
    } else {
        adaptive_simpson(&|x: f64| (q * x).sin() * (p * x).sin(), 0.0, ell, 1e-14)
    };
    let pre = overlap / (length * side).sqrt();
    (pre * ((p / q).sqrt() + (q / p).sqrt()), pre * ((p / q).sqrt() - (q / p).sqrt()))
}

type Poly = HashMap<Vec<u32>, f64>;

fn poly_mul(a: &Poly, b: &Poly, cap: &[u32]) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        'inner: for (eb, cb) in b {
            let mut e = Vec::with_capacity(ea.len());
            for i in 0..ea.len() {
                let s = ea[i] + eb[i];
                if s > cap[i] {
                    continue 'inner;
                }
                e.push(s);
            }
            *out.entry(e).or_insert(0.0) += ca * cb;
        }
    }
    out
}

/// `∂^ν exp(½ Jᵀ A J)` at `J = 0` by expanding the exponential as a truncated power series.
pub fn derivative_by_series(a: &[Vec<f64>], nu: &[u32]) -> f64 {
    let n = nu.len();
    let order: u32 = nu.iter().sum();
    if order % 2 == 1 {
        return 0.0;
    }
    let mut t = Poly::new();
    for i in 0..n {
        for j in i..n {
            let mut e = vec![0u32; n];
            e[i] += 1;
            e[j] += 1;
            let c = if i == j { 0.5 * a[i][i] } else { a[i][j] };
            *t.entry(e).or_insert(0.0) += c;
        }
    }
    // Only T^{|ν|/2}/(|ν|/2)! reaches total degree |ν|.
    let half = order / 2;
    let mut acc: Poly = [(vec![0u32; n], 1.0)].into_iter().collect();
    for r in 1..=half {
        acc = poly_mul(&acc, &t, nu);
        for v in acc.values_mut() {
            *v /= r as f64;
        }
    }
    let coeff = acc.get(nu).copied().unwrap_or(0.0);
    let fact: f64 = nu.iter().map(|&k| (1..=k).map(|x| x as f64).product::<f64>()).product();
    coeff * fact
}

/// Ordinary least squares `y ≈ slope·x + intercept` with the coefficient of determination.
pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let (sx, sy) = (x.iter().sum::<f64>(), y.iter().sum::<f64>());
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let mean = sy / n;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    (slope, intercept, 1.0 - ss_res / ss_tot)
}

/// Direct O(N²) DFT of the mean-subtracted series: `(ω_j, 2|X_j|/N)` for `j ≤ N/2`.
pub fn naive_dft(series: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let n = series.len();
    let dt = series[1].0 - series[0].0;
    let mean = series.iter().map(|p| p.1).sum::<f64>() / n as f64;
    (0..=n / 2)
        .map(|j| {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, &(_, y)) in series.iter().enumerate() {
                let phase = -2.0 * PI * (j * t) as f64 / n as f64;
                re += (y - mean) * phase.cos();
                im += (y - mean) * phase.sin();
            }
            (2.0 * PI * j as f64 / (n as f64 * dt), 2.0 * (re * re + im * im).sqrt() / n as f64)
        })
        .collect()
}

/// Bin of the largest amplitude, excluding the zero frequency.
pub fn peak_bin(spectrum: &[(f64, f64)]) -> usize {
    (1..spectrum.len()).max_by(|&a, &b| spectrum[a].1.total_cmp(&spectrum[b].1)).unwrap()
}
