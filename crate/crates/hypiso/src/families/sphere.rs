//! Hyperspherical coordinates on `S^{m-1} ⊂ R^m`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Parameter ranges of the `m-1` angles: `[0, π]` for all but the last, `[0, 2π]` for the last.
pub(crate) fn angle_ranges(m: usize) -> Vec<(f64, f64)> {
    let pi = std::f64::consts::PI;
    (0..m.saturating_sub(1))
        .map(|i| {
            if i + 2 == m {
                (0.0, 2.0 * pi)
            } else {
                (0.0, pi)
            }
        })
        .collect()
}

/// Unit vector `ω(a)` and its `m × (m-1)` derivative. Component `i < m-1` is
/// `sin a_0 ⋯ sin a_{i-1} cos a_i`; the last is the product of all sines.
pub(crate) fn hypersphere(angles: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
    let d = angles.len();
    let m = d + 1;
    let (s, c): (Vec<f64>, Vec<f64>) = angles.iter().map(|a| a.sin_cos()).unzip();
    let prod_sin_except = |upto: usize, skip: Option<usize>| -> f64 {
        (0..upto)
            .filter(|j| Some(*j) != skip)
            .map(|j| s[j])
            .product()
    };
    let mut w = DVector::zeros(m);
    let mut dw = DMatrix::zeros(m, d);
    for i in 0..m {
        if i < d {
            w[i] = prod_sin_except(i, None) * c[i];
            for l in 0..=i {
                dw[(i, l)] = if l < i {
                    prod_sin_except(i, Some(l)) * c[l] * c[i]
                } else {
                    -prod_sin_except(i, None) * s[i]
                };
            }
        } else {
            w[i] = prod_sin_except(d, None);
            for l in 0..d {
                dw[(i, l)] = prod_sin_except(d, Some(l)) * c[l];
            }
        }
    }
    (w, dw)
}

/// `count` orthonormal vectors orthogonal to the unit vectors in `given`,
/// completed from the standard basis by Gram–Schmidt.
pub(crate) fn orthonormal_complement(
    given: &[DVector<f64>],
    n: usize,
    count: usize,
) -> Result<Vec<DVector<f64>>> {
    let mut basis: Vec<DVector<f64>> = given.to_vec();
    let mut out = Vec::with_capacity(count);
    for i in 0..n {
        if out.len() == count {
            break;
        }
        let mut v = DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 });
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dot(&v);
                v -= b * proj;
            }
        }
        let nrm = v.norm();
        if nrm > 1e-8 {
            v /= nrm;
            basis.push(v.clone());
            out.push(v);
        }
    }
    if out.len() < count {
        return Err(Error::domain(format!(
            "cannot find {count} orthonormal directions in R^{n}"
        )));
    }
    Ok(out)
}
