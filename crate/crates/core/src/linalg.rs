//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{ComplexField, DMatrix, DVector, RealField};
use num_traits::Zero;

/// Largest absolute entry, 0 for an empty matrix.
pub fn max_abs<T: ComplexField>(m: &DMatrix<T>) -> T::RealField {
    m.iter()
        .map(|x| x.clone().abs())
        .fold(T::RealField::zero(), |a, b| if b > a { b } else { a })
}

/// Eigen-decomposition of a symmetric (or Hermitian) matrix with ascending
/// eigenvalues. Each eigenvector is phased so that its largest-modulus
/// component is real and positive, which makes the output deterministic.
pub fn sorted_eigen<T: ComplexField>(m: &DMatrix<T>) -> (DVector<T::RealField>, DMatrix<T>)
where
    T::RealField: RealField,
{
    let n = m.nrows();
    if n == 0 {
        return (DVector::zeros(0), DMatrix::zeros(0, 0));
    }
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i].clone()));
    let mut vectors = DMatrix::<T>::zeros(n, n);
    for (c, &i) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(i);
        let mut best = 0;
        let mut best_mod = T::RealField::zero();
        for r in 0..n {
            let v = col[r].clone().modulus();
            // Prefer the first index among near-equal moduli so the choice is stable.
            if v > best_mod.clone() * nalgebra::convert::<f64, T::RealField>(1.0 + 1e-9) {
                best_mod = v;
                best = r;
            }
        }
        let phase = if best_mod > T::RealField::zero() {
            col[best].clone().conjugate().unscale(best_mod)
        } else {
            T::one()
        };
        for r in 0..n {
            vectors[(r, c)] = col[r].clone() * phase.clone();
        }
    }
    (values, vectors)
}

/// Ratio of the extreme singular values, infinite for a singular matrix.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 1.0;
    }
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Ordinary least-squares line through `(x, y)`: returns `(slope, intercept, r²)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}
