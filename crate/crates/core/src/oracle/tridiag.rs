//! Symmetric tridiagonal pencils `A − λ·diag(w)` with a constant
//! off-diagonal, as produced by the three-point Laplacian on a uniform grid.

/// Number of eigenvalues of the pencil (A, diag(w)) strictly below `lambda`
/// (Sylvester inertia of the LDLᵀ factorisation of A − λW).
pub fn count_below(diag: &[f64], off: f64, weight: &[f64], lambda: f64) -> usize {
    let off2 = off * off;
    let mut count = 0;
    let mut q = 1.0;
    for (i, (&d, &w)) in diag.iter().zip(weight).enumerate() {
        q = if i == 0 { d - lambda * w } else { d - lambda * w - off2 / q };
        if q == 0.0 {
            q = -f64::MIN_POSITIVE;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Solves T·x = b for a general tridiagonal T with constant sub/super
/// diagonal `off`, by Gaussian elimination with partial pivoting.
/// Returns `None` if a zero pivot is met.
pub fn solve(diag: &[f64], off: f64, rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    assert_eq!(rhs.len(), n);
    if n == 0 {
        return Some(Vec::new());
    }
    let mut d = diag.to_vec();
    let mut b = rhs.to_vec();
    let mut du = vec![off; n.saturating_sub(1)];
    // lower diagonal; after a row swap it holds the second superdiagonal
    let mut dl = vec![off; n.saturating_sub(1)];

    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                return None;
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
            let tb = b[i];
            b[i] = b[i + 1];
            b[i + 1] = tb - fact * b[i + 1];
        }
    }
    if d[n - 1] == 0.0 {
        return None;
    }
    b[n - 1] /= d[n - 1];
    if n > 1 {
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - du[i] * b[i + 1] - dl[i] * b[i + 2]) / d[i];
    }
    Some(b)
}

/// y = T·x for the same storage scheme.
pub fn apply(diag: &[f64], off: f64, x: &[f64]) -> Vec<f64> {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut y = diag[i] * x[i];
            if i > 0 {
                y += off * x[i - 1];
            }
            if i + 1 < n {
                y += off * x[i + 1];
            }
            y
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_roundtrip_indefinite() {
        // diagonal entries of both signs force row interchanges
        let diag: Vec<f64> = (0..50).map(|i| ((i as f64) * 0.7).sin() * 0.3).collect();
        let x: Vec<f64> = (0..50).map(|i| 1.0 + (i as f64).cos()).collect();
        let b = apply(&diag, 1.0, &x);
        let got = solve(&diag, 1.0, &b).unwrap();
        for (g, e) in got.iter().zip(&x) {
            assert!((g - e).abs() < 1e-10, "{g} vs {e}");
        }
    }

    #[test]
    fn solve_small_sizes() {
        assert_eq!(solve(&[2.0], 1.0, &[4.0]).unwrap(), vec![2.0]);
        let x = solve(&[2.0, 3.0], 1.0, &[3.0, 4.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
        assert!(solve(&[0.0], 1.0, &[1.0]).is_none());
    }

    #[test]
    fn sturm_count_matches_known_spectrum() {
        // 1D Dirichlet Laplacian: eigenvalues 2 − 2cos(kπ/(n+1))
        let n = 40;
        let diag = vec![2.0; n];
        let w = vec![1.0; n];
        for k in 1..=n {
            let lam = 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert_eq!(count_below(&diag, -1.0, &w, lam - 1e-9), k - 1);
            assert_eq!(count_below(&diag, -1.0, &w, lam + 1e-9), k);
        }
    }
}
