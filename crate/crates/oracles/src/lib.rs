//! Reference computations for the verification suites: numerically inverted
//! Jacobians, Richardson-extrapolated differentiation, manufactured-solution
//! sources, the closed-form slider pressure, and low-discrepancy sampling.
//!
//! Nothing here shares a differentiation or integration path with the code
//! it checks: charts are differenced directly, Jacobians are inverted by
//! elimination, and the slider profile comes from exact antiderivatives.

use thinfilm_core::chart::SurfaceChart;
use thinfilm_core::math::Vec3;

/// Richardson-extrapolated central difference of a scalar function
/// (three levels, leading error O(step^6)).
pub fn richardson_d1(f: impl Fn(f64) -> f64, x: f64, step: f64) -> f64 {
    let central = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let d1 = central(step);
    let d2 = central(step / 2.0);
    let d3 = central(step / 4.0);
    let r1 = (4.0 * d2 - d1) / 3.0;
    let r2 = (4.0 * d3 - d2) / 3.0;
    (16.0 * r2 - r1) / 15.0
}

/// Richardson-extrapolated second derivative.
pub fn richardson_d2(f: impl Fn(f64) -> f64, x: f64, step: f64) -> f64 {
    let central = |h: f64| (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    let d1 = central(step);
    let d2 = central(step / 2.0);
    let d3 = central(step / 4.0);
    let r1 = (4.0 * d2 - d1) / 3.0;
    let r2 = (4.0 * d3 - d2) / 3.0;
    (16.0 * r2 - r1) / 15.0
}

/// Default step for Richardson differentiation of O(1)-scaled functions.
pub const RICHARDSON_STEP: f64 = 5e-3;

/// Deterministic Halton sequence in `[0, 1)^dim` (bases 2, 3, 5, 7).
pub fn halton(index: usize, dim: usize) -> Vec<f64> {
    const BASES: [usize; 4] = [2, 3, 5, 7];
    (0..dim)
        .map(|d| {
            let base = BASES[d % BASES.len()];
            let mut i = index + 1;
            let mut f = 1.0;
            let mut r = 0.0;
            while i > 0 {
                f /= base as f64;
                r += f * (i % base) as f64;
                i /= base;
            }
            r
        })
        .collect()
}

/// Gaussian elimination with partial pivoting for small dense systems.
pub fn solve_dense(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().cloned().collect();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[r][col].abs() > m[piv][col].abs() {
                piv = r;
            }
        }
        if !(m[piv][col].abs() > 1e-300) {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in col + 1..n {
            let factor = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= factor * m[col][c];
            }
            rhs[r] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut s = rhs[col];
        for c in col + 1..n {
            s -= m[col][c] * x[c];
        }
        x[col] = s / m[col][col];
    }
    Some(x)
}

pub mod jacobian;
pub mod mms;
pub mod rng;
pub mod slider;

pub use jacobian::{decompose_in_basis, numeric_inverse_jacobian, JacobianOracleError};
pub use mms::{reynolds_source, shallow_sources, ManufacturedShallow, ShallowModelParams};
pub use rng::SplitMix64;
pub use slider::closed_form_slider;

/// Unit normal of a chart computed directly from the tangent cross product;
/// shared entry point for the oracle-side differentiation helpers.
pub fn oracle_normal(chart: &dyn SurfaceChart, xi1: f64, xi2: f64, t: f64) -> Vec3 {
    let jet = chart.jet(xi1, xi2, t);
    let w = jet.d1[0].cross(jet.d1[1]);
    w.scale(1.0 / w.norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_matches_analytic_derivative() {
        let d = richardson_d1(|x| (3.0 * x).sin(), 0.4, RICHARDSON_STEP);
        let want = 3.0 * (3.0 * 0.4f64).cos();
        assert!((d - want).abs() < 1e-11);

        let d2 = richardson_d2(|x| (3.0 * x).sin(), 0.4, RICHARDSON_STEP);
        let want2 = -9.0 * (3.0 * 0.4f64).sin();
        assert!((d2 - want2).abs() < 1e-9);
    }

    #[test]
    fn halton_is_in_unit_cube_and_deterministic() {
        for k in 0..50 {
            let p = halton(k, 4);
            assert_eq!(p, halton(k, 4));
            assert!(p.iter().all(|v| (0.0..1.0).contains(v)));
        }
        assert_ne!(halton(3, 2), halton(4, 2));
    }
}
