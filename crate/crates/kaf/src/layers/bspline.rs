use crate::error::{Error, Result};

/// Open-uniform (clamped) knot vector for `g` grid segments of a degree-`k`
/// B-spline basis on `range`: boundary knots repeated `k + 1` times with
/// `g - 1` uniform interior knots, `g + 2k + 1` knots total, supporting
/// `g + k` basis functions.
pub fn open_uniform_knots(g: usize, k: usize, range: (f64, f64)) -> Result<Vec<f64>> {
    let (lo, hi) = range;
    if g < 1 || k < 1 {
        return Err(Error::Param(format!("spline needs g >= 1 and k >= 1, got g={g} k={k}")));
    }
    if !(lo < hi) {
        return Err(Error::Param(format!("grid range must satisfy lo < hi, got [{lo}, {hi}]")));
    }
    let mut knots = Vec::with_capacity(g + 2 * k + 1);
    for _ in 0..=k {
        knots.push(lo);
    }
    for i in 1..g {
        knots.push(lo + (hi - lo) * i as f64 / g as f64);
    }
    for _ in 0..=k {
        knots.push(hi);
    }
    Ok(knots)
}

/// Number of basis functions supported by `knots` for degree `k`.
pub fn basis_count(knots: &[f64], k: usize) -> usize {
    knots.len() - k - 1
}

/// Iterative Cox-de Boor triangle up to `degree`, on an input already clamped
/// into the knot range. Returns the degree-`degree` row (length
/// `knots.len() - degree - 1`) and, when `degree >= 1`, the degree-`degree-1`
/// row needed for derivatives.
fn cox_de_boor(x: f64, knots: &[f64], degree: usize) -> (Vec<f64>, Vec<f64>) {
    let lo = knots[0];
    let hi = knots[knots.len() - 1];
    // Degree-0 indicators over half-open intervals [t_i, t_{i+1}); the very
    // last non-degenerate interval is closed so x == hi is covered.
    let mut row: Vec<f64> = (0..knots.len() - 1)
        .map(|i| {
            let in_half_open = knots[i] <= x && x < knots[i + 1];
            let at_right_end = x == hi && knots[i] < knots[i + 1] && knots[i + 1] == hi;
            if in_half_open || at_right_end {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    debug_assert!(lo <= x && x <= hi);
    let mut prev = row.clone();
    for d in 1..=degree {
        prev = row.clone();
        let len = knots.len() - d - 1;
        let mut next = vec![0.0; len];
        for (i, slot) in next.iter_mut().enumerate() {
            let den_l = knots[i + d] - knots[i];
            let den_r = knots[i + d + 1] - knots[i + 1];
            let mut v = 0.0;
            if den_l > 0.0 {
                v += (x - knots[i]) / den_l * row[i];
            }
            if den_r > 0.0 {
                v += (knots[i + d + 1] - x) / den_r * row[i + 1];
            }
            *slot = v;
        }
        row = next;
    }
    (row, prev)
}

/// Degree-`k` B-spline basis values at `x`. Inputs outside the knot range are
/// clamped to the boundary (constant extrapolation). The returned vector has
/// `basis_count(knots, k)` entries and sums to 1.
pub fn bspline_basis(x: f64, knots: &[f64], k: usize) -> Vec<f64> {
    let xc = x.clamp(knots[0], knots[knots.len() - 1]);
    cox_de_boor(xc, knots, k).0
}

/// Basis values and their derivatives with respect to `x`:
/// `B'_{i,k}(x) = k * [B_{i,k-1}/(t_{i+k}-t_i) - B_{i+1,k-1}/(t_{i+k+1}-t_{i+1})]`.
/// For clamped (out-of-range) inputs the extrapolation is constant, so the
/// derivative is zero.
pub fn bspline_basis_deriv(x: f64, knots: &[f64], k: usize) -> (Vec<f64>, Vec<f64>) {
    let lo = knots[0];
    let hi = knots[knots.len() - 1];
    let clamped = x < lo || x > hi;
    let xc = x.clamp(lo, hi);
    let (basis, lower) = cox_de_boor(xc, knots, k);
    let mut deriv = vec![0.0; basis.len()];
    if !clamped && k >= 1 {
        for (i, d) in deriv.iter_mut().enumerate() {
            let den_l = knots[i + k] - knots[i];
            let den_r = knots[i + k + 1] - knots[i + 1];
            let mut v = 0.0;
            if den_l > 0.0 {
                v += lower[i] / den_l;
            }
            if den_r > 0.0 {
                v -= lower[i + 1] / den_r;
            }
            *d = k as f64 * v;
        }
    }
    (basis, deriv)
}
