//! Numeric tolerances shared by the bound checks.

/// Relative tolerance for every bound comparison.
pub const REL_TOL: f64 = 1e-9;

/// `lhs <= rhs` up to a relative slack of [`REL_TOL`] (absolute near zero).
pub fn approx_le(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + REL_TOL * rhs.abs().max(1.0)
}

/// `|lhs - rhs|` within `tol` relative to the larger magnitude (absolute near zero).
pub fn approx_eq(lhs: f64, rhs: f64, tol: f64) -> bool {
    (lhs - rhs).abs() <= tol * lhs.abs().max(rhs.abs()).max(1.0)
}
