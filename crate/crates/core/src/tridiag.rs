//! Thomas algorithm for tridiagonal systems.

use crate::error::{Error, Result};

/// Solves `A x = d` for tridiagonal `A` with sub-diagonal `a` (`a[0]` unused),
/// diagonal `b` and super-diagonal `c` (`c[n-1]` unused). No pivoting, so `A`
/// should be diagonally dominant.
pub fn solve(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    assert!(a.len() == n && b.len() == n && c.len() == n);
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    if b[0] == 0.0 {
        return Err(Error::Singular);
    }
    cp[0] = c[0] / b[0];
    dp[0] = d[0] / b[0];
    for i in 1..n {
        let den = b[i] - a[i] * cp[i - 1];
        if den == 0.0 || !den.is_finite() {
            return Err(Error::Singular);
        }
        cp[i] = c[i] / den;
        dp[i] = (d[i] - a[i] * dp[i - 1]) / den;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    Ok(x)
}
