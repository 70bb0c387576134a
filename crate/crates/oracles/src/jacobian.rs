//! Numerically inverted change-of-variable Jacobian.
//!
//! The forward Jacobian entries are built from chart calls and oracle-side
//! Richardson differentiation of the normalized normal (no shared chain-rule
//! code with the geometry module), then inverted by Gaussian elimination.

use crate::{oracle_normal, richardson_d1, solve_dense, RICHARDSON_STEP};
use thinfilm_core::chart::SurfaceChart;
use thinfilm_core::math::Vec3;

#[derive(Debug, Clone, PartialEq)]
pub enum JacobianOracleError {
    Singular,
}

/// Gap data the oracle needs at the evaluation point.
#[derive(Clone, Copy, Debug)]
pub struct OracleGap {
    pub h: f64,
    pub h_t: f64,
    pub h_x: [f64; 2],
}

fn normal_derivative(chart: &dyn SurfaceChart, xi: [f64; 2], t: f64, axis: usize) -> Vec3 {
    let component = |pick: fn(Vec3) -> f64| {
        let at = |s: f64| match axis {
            0 => pick(oracle_normal(chart, s, xi[1], t)),
            1 => pick(oracle_normal(chart, xi[0], s, t)),
            _ => pick(oracle_normal(chart, xi[0], xi[1], s)),
        };
        let center = match axis {
            0 => xi[0],
            1 => xi[1],
            _ => t,
        };
        richardson_d1(at, center, RICHARDSON_STEP)
    };
    Vec3::new(component(|v| v.x), component(|v| v.y), component(|v| v.z))
}

/// Builds the exact 4x4 forward Jacobian of the change of variable from
/// chart evaluations and oracle-side differentiation, inverts the spatial
/// block numerically, and completes the time column.
pub fn numeric_inverse_jacobian(
    chart: &dyn SurfaceChart,
    xi: [f64; 2],
    xi3: f64,
    t: f64,
    eps: f64,
    gap: OracleGap,
) -> Result<[[f64; 4]; 4], JacobianOracleError> {
    let jet = chart.jet(xi[0], xi[1], t);
    let a3 = oracle_normal(chart, xi[0], xi[1], t);
    let da3 = [
        normal_derivative(chart, xi, t, 0),
        normal_derivative(chart, xi, t, 1),
    ];
    let a3_t = normal_derivative(chart, xi, t, 2);

    let col = |v: Vec3| [v.x, v.y, v.z];
    let spatial_cols = [
        col(jet.d1[0] + a3.scale(eps * xi3 * gap.h_x[0]) + da3[0].scale(eps * xi3 * gap.h)),
        col(jet.d1[1] + a3.scale(eps * xi3 * gap.h_x[1]) + da3[1].scale(eps * xi3 * gap.h)),
        col(a3.scale(eps * gap.h)),
    ];
    let time_col = col(jet.dt + a3.scale(eps * xi3 * gap.h_t) + a3_t.scale(eps * xi3 * gap.h));

    // Spatial block: rows are x-components, columns the xi-derivatives.
    let a: Vec<Vec<f64>> = (0..3)
        .map(|r| (0..3).map(|c| spatial_cols[c][r]).collect())
        .collect();

    let mut inv = [[0.0; 4]; 4];
    for unit in 0..3 {
        let mut rhs = vec![0.0; 3];
        rhs[unit] = 1.0;
        let x = solve_dense(&a, &rhs).ok_or(JacobianOracleError::Singular)?;
        for row in 0..3 {
            inv[row][unit] = x[row];
        }
    }
    for row in 0..3 {
        inv[row][3] =
            -(inv[row][0] * time_col[0] + inv[row][1] * time_col[1] + inv[row][2] * time_col[2]);
    }
    inv[3][3] = 1.0;
    Ok(inv)
}

/// Decomposes a spatial row vector in the (non-orthogonal) chart basis,
/// returning `(alpha, beta, gamma)` with `r = alpha a1 + beta a2 + gamma a3`.
pub fn decompose_in_basis(
    chart: &dyn SurfaceChart,
    xi: [f64; 2],
    t: f64,
    row: [f64; 3],
) -> Option<[f64; 3]> {
    let jet = chart.jet(xi[0], xi[1], t);
    let a3 = oracle_normal(chart, xi[0], xi[1], t);
    let basis = [jet.d1[0], jet.d1[1], a3];
    let a: Vec<Vec<f64>> = (0..3)
        .map(|r| (0..3).map(|c| basis[c].component(r)).collect())
        .collect();
    let x = solve_dense(&a, &row)?;
    Some([x[0], x[1], x[2]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use thinfilm_core::chart::{Plane, TranslatingPlane};

    #[test]
    fn plane_inverse_is_diagonal() {
        let gap = OracleGap {
            h: 1.0,
            h_t: 0.0,
            h_x: [0.0, 0.0],
        };
        let inv = numeric_inverse_jacobian(&Plane, [0.3, 0.4], 0.5, 0.0, 0.1, gap).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let want = match (r, c) {
                    (0, 0) | (1, 1) | (3, 3) => 1.0,
                    (2, 2) => 10.0,
                    _ => 0.0,
                };
                assert!(
                    (inv[r][c] - want).abs() < 1e-10,
                    "inv[{r}][{c}] = {}",
                    inv[r][c]
                );
            }
        }
    }

    #[test]
    fn translating_plane_time_entry() {
        let gap = OracleGap {
            h: 1.0,
            h_t: 0.0,
            h_x: [0.0, 0.0],
        };
        let c = 0.8;
        let eps = 0.05;
        let inv = numeric_inverse_jacobian(
            &TranslatingPlane { speed: c },
            [0.2, 0.9],
            0.7,
            0.1,
            eps,
            gap,
        )
        .unwrap();
        assert!((inv[2][3] + c / eps).abs() < 1e-9);
    }

    #[test]
    fn near_degenerate_chart_is_singular() {
        use thinfilm_core::chart::{ChartJet, SurfaceChart};
        struct Collapsed;
        impl SurfaceChart for Collapsed {
            fn jet(&self, xi1: f64, _xi2: f64, _t: f64) -> ChartJet {
                ChartJet {
                    x: Vec3::new(xi1, xi1, 0.0),
                    d1: [Vec3::new(1.0, 1.0, 0.0), Vec3::new(1.0, 1.0, 0.0)],
                    ..Default::default()
                }
            }
        }
        let gap = OracleGap {
            h: 1.0,
            h_t: 0.0,
            h_x: [0.0, 0.0],
        };
        assert!(numeric_inverse_jacobian(&Collapsed, [0.0, 0.0], 0.5, 0.0, 0.1, gap).is_err());
    }
}
