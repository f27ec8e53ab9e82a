//! Sturm sequence counts and bisection for symmetric tridiagonal matrices.

/// Pivots smaller than this are replaced before dividing.
const PIVMIN: f64 = 1e-290;

/// Number of eigenvalues of the tridiagonal matrix `(diag, off)` strictly
/// below `lambda`, from the signs of the `LDLᵀ` pivots of `T - λ`.
pub fn count_below(diag: &[f64], off: &[f64], lambda: f64) -> usize {
    let n = diag.len();
    if n == 0 {
        return 0;
    }
    let mut count = 0;
    let mut q = diag[0] - lambda;
    for i in 1..n {
        if q <= 0.0 {
            // a zero pivot is a singular leading minor; treat it as negative
            count += 1;
            if q > -PIVMIN {
                q = -PIVMIN;
            }
        } else if q < PIVMIN {
            q = PIVMIN;
        }
        q = (diag[i] - lambda) - off[i - 1] * off[i - 1] / q;
    }
    if q < 0.0 {
        count += 1;
    }
    count
}

/// Gershgorin interval of a tridiagonal matrix.
pub fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    (lo, hi)
}

/// The `index`-th smallest eigenvalue (0-based), bisected to width `tol`
/// or until the bracket can no longer shrink when `tol <= 0`.
pub fn bisect_eigenvalue(diag: &[f64], off: &[f64], index: usize, tol: f64) -> f64 {
    let (g_lo, g_hi) = gershgorin(diag, off);
    let pad = 1e-12 * (g_hi - g_lo).abs().max(1.0);
    let (mut lo, mut hi) = (g_lo - pad, g_hi + pad);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= tol {
            break;
        }
        if count_below(diag, off, mid) > index {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
