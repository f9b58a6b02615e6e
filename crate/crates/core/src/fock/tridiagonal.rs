//! Lowest eigenpairs of a real symmetric tridiagonal matrix by Sturm bisection and
//! inverse iteration.

/// Number of eigenvalues strictly below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64, tiny: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let coupling = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] / q };
        q = diag[i] - x - coupling;
        if q == 0.0 {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..diag.len() {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + off.get(i).map_or(0.0, |v| v.abs());
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (lo, hi)
}

/// `k`-th smallest eigenvalue (0-based).
fn bisect(diag: &[f64], off: &[f64], k: usize, bounds: (f64, f64), tiny: f64) -> f64 {
    let (mut lo, mut hi) = bounds;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid, tiny) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves `(T − shift) x = b` in place by Gaussian elimination with partial pivoting.
fn solve_shifted(diag: &[f64], off: &[f64], shift: f64, b: &mut [f64], tiny: f64) {
    let n = diag.len();
    let mut d: Vec<f64> = diag.iter().map(|v| v - shift).collect();
    let mut dl = off.to_vec();
    let mut du = off.to_vec();
    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
            dl[i] = 0.0;
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 2 < n {
                dl[i] = du[i + 1];
                du[i + 1] = -fact * dl[i];
            } else {
                dl[i] = 0.0;
            }
            du[i] = temp;
            let t = b[i];
            b[i] = b[i + 1];
            b[i + 1] = t - fact * b[i + 1];
        }
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }
    b[n - 1] /= d[n - 1];
    if n > 1 {
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - du[i] * b[i + 1] - dl[i] * b[i + 2]) / d[i];
    }
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

/// The `count` smallest eigenvalues with unit eigenvectors, ascending.
///
/// `off[i]` couples rows `i` and `i + 1`.
pub(crate) fn lowest_eigenpairs(diag: &[f64], off: &[f64], count: usize) -> Vec<(f64, Vec<f64>)> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n, "off-diagonal must have length n - 1");
    let bounds = gershgorin(diag, off);
    let scale = bounds.0.abs().max(bounds.1.abs()).max(1.0);
    let tiny = f64::EPSILON * scale * 1e-3;
    (0..count.min(n))
        .map(|k| {
            let value = bisect(diag, off, k, bounds, tiny);
            // Deterministic, non-special start vector.
            let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_75).fract()).collect();
            for _ in 0..3 {
                solve_shifted(diag, off, value, &mut v, tiny);
                normalize(&mut v);
            }
            (value, v)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, SymmetricEigen};

    fn dense(diag: &[f64], off: &[f64]) -> DMatrix<f64> {
        let n = diag.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = off[i];
                m[(i + 1, i)] = off[i];
            }
        }
        m
    }

    #[test]
    fn matches_dense_solver() {
        let diag: Vec<f64> = (0..40).map(|i| (i as f64) + if i % 2 == 0 { -7.0 } else { 7.0 }).collect();
        let off: Vec<f64> = (0..39).map(|i| 1.7 * ((i + 1) as f64).sqrt()).collect();
        let m = dense(&diag, &off);
        let eig = SymmetricEigen::new(m.clone());
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        for (k, (val, vec)) in lowest_eigenpairs(&diag, &off, 5).into_iter().enumerate() {
            assert!((val - vals[k]).abs() < 1e-11, "{k}: {val} vs {}", vals[k]);
            let v = nalgebra::DVector::from_vec(vec);
            assert!((&m * &v - &v * val).amax() < 1e-10);
        }
    }

    #[test]
    fn single_element() {
        let r = lowest_eigenpairs(&[3.0], &[], 1);
        assert_eq!(r[0].1, vec![1.0]);
        assert!((r[0].0 - 3.0).abs() < 1e-14);
    }
}
