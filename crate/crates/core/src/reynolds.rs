//! Pressure-driven thin-film model: assembly and solution of the
//! generalized Reynolds equation on a curved moving surface, plus the
//! through-gap velocity reconstruction.
//!
//! The pressure solves
//!
//! ```text
//! div( (h^3 / sqrt(A0)) M grad p ) / sqrt(A0)
//!   = 12 mu dh/dt + 12 mu (h A1 / A0) (dX/dt . a3)
//!     - 6 mu grad h . (W - V) + (6 mu h / sqrt(A0)) div( sqrt(A0) (W + V) )
//! ```
//!
//! with `M = [[G, -F], [-F, E]]`, discretized in conservative flux form with
//! arithmetic face averages (diagonal part) and the 4-corner stencil for the
//! off-diagonal `M` entries. On a flat chart the operator reduces
//! node-for-node to the classical `div(h^3 grad p)` assembly.

use crate::error::{Error, Result};
use crate::gap::GapTables;
use crate::geometry::{covariant_divergence, GeometryTables};
use crate::grid::{BoundaryKind, Field, FieldTag, Grid};
use crate::math::FloatExt;
use crate::sparse::{bicgstab, Csr, CsrBuilder, SolveStats};

use alloc::vec;
use alloc::vec::Vec;

/// Data of one lubrication solve at a fixed time instant.
#[derive(Clone, Debug)]
pub struct LubricationProblem {
    pub mu: f64,
    /// Tangential velocity of the lower surface, components (V1, V2).
    pub lower_velocity: (Field, Field),
    /// Tangential velocity of the upper surface, components (W1, W2).
    pub upper_velocity: (Field, Field),
    /// Dirichlet pressure data; only edge values are consumed.
    pub boundary_pressure: Field,
}

/// Assembled linear system for the leading-order pressure.
pub struct ReynoldsSystem {
    pub matrix: Csr,
    pub rhs: Vec<f64>,
}

fn wrap(idx: isize, n: usize, periodic: bool) -> Option<usize> {
    if idx >= 0 && (idx as usize) < n {
        Some(idx as usize)
    } else if periodic {
        Some(((idx % n as isize + n as isize) % n as isize) as usize)
    } else {
        None
    }
}

/// Discretizes the generalized operator; rows at Dirichlet nodes pin the
/// boundary pressure. Fails without any Dirichlet edge (the operator is
/// singular up to a constant).
///
/// Rows carry the negated flux divergence so the assembled diagonal shares
/// the sign of the Dirichlet identity rows; the right-hand side is negated
/// to match in [`system_with_rhs`].
pub fn assemble_operator(grid: &Grid, geom: &GeometryTables, gap: &GapTables) -> Result<Csr> {
    if !grid.has_dirichlet_edge() {
        return Err(Error::SingularSystem);
    }
    let (n1, n2) = (grid.n1, grid.n2);
    let (dx1, dx2) = (grid.dx1(), grid.dx2());
    let per1 = grid.bc1 == BoundaryKind::Periodic;
    let per2 = grid.bc2 == BoundaryKind::Periodic;

    // Flux coefficients h^3 M / sqrt(A0) per node.
    let mut c11 = vec![0.0; grid.len()];
    let mut c12 = vec![0.0; grid.len()];
    let mut c22 = vec![0.0; grid.len()];
    for idx in 0..grid.len() {
        let s = &geom.samples[idx];
        let h3 = gap.h.data[idx].powi(3);
        c11[idx] = h3 * s.forms.G / s.sqrt_area0;
        c12[idx] = -h3 * s.forms.F / s.sqrt_area0;
        c22[idx] = h3 * s.forms.E / s.sqrt_area0;
    }

    let mut builder = CsrBuilder::new(grid.len());
    for j in 0..n2 {
        for i in 0..n1 {
            let row = grid.idx(i, j);
            if grid.on_dirichlet_edge(i, j) {
                builder.add(row, row, 1.0);
                continue;
            }
            let scale = -1.0 / geom.samples[row].sqrt_area0;
            let at = |di: isize, dj: isize| -> usize {
                let ii = wrap(i as isize + di, n1, per1).expect("interior stencil in range");
                let jj = wrap(j as isize + dj, n2, per2).expect("interior stencil in range");
                grid.idx(ii, jj)
            };

            // d/dxi1 ( c11 dp/dxi1 ), arithmetic face averages.
            let c_e = 0.5 * (c11[row] + c11[at(1, 0)]);
            let c_w = 0.5 * (c11[row] + c11[at(-1, 0)]);
            let f1 = scale / (dx1 * dx1);
            builder.add(row, at(1, 0), c_e * f1);
            builder.add(row, at(-1, 0), c_w * f1);
            builder.add(row, row, -(c_e + c_w) * f1);

            // d/dxi2 ( c22 dp/dxi2 ).
            let c_n = 0.5 * (c22[row] + c22[at(0, 1)]);
            let c_s = 0.5 * (c22[row] + c22[at(0, -1)]);
            let f2 = scale / (dx2 * dx2);
            builder.add(row, at(0, 1), c_n * f2);
            builder.add(row, at(0, -1), c_s * f2);
            builder.add(row, row, -(c_n + c_s) * f2);

            // d/dxi1 ( c12 dp/dxi2 ): face-averaged coefficient times the
            // 4-corner derivative at each xi1 face.
            let fc = scale / (4.0 * dx1 * dx2);
            let c12_e = 0.5 * (c12[row] + c12[at(1, 0)]);
            let c12_w = 0.5 * (c12[row] + c12[at(-1, 0)]);
            builder.add(row, at(0, 1), c12_e * fc);
            builder.add(row, at(1, 1), c12_e * fc);
            builder.add(row, at(0, -1), -c12_e * fc);
            builder.add(row, at(1, -1), -c12_e * fc);
            builder.add(row, at(0, 1), -c12_w * fc);
            builder.add(row, at(-1, 1), -c12_w * fc);
            builder.add(row, at(0, -1), c12_w * fc);
            builder.add(row, at(-1, -1), c12_w * fc);

            // d/dxi2 ( c12 dp/dxi1 ).
            let c21_n = 0.5 * (c12[row] + c12[at(0, 1)]);
            let c21_s = 0.5 * (c12[row] + c12[at(0, -1)]);
            builder.add(row, at(1, 0), c21_n * fc);
            builder.add(row, at(1, 1), c21_n * fc);
            builder.add(row, at(-1, 0), -c21_n * fc);
            builder.add(row, at(-1, 1), -c21_n * fc);
            builder.add(row, at(1, 0), -c21_s * fc);
            builder.add(row, at(1, -1), -c21_s * fc);
            builder.add(row, at(-1, 0), c21_s * fc);
            builder.add(row, at(-1, -1), c21_s * fc);
        }
    }
    Ok(builder.build())
}

/// The physical right-hand side of the generalized equation.
pub fn reynolds_rhs(
    problem: &LubricationProblem,
    grid: &Grid,
    geom: &GeometryTables,
    gap: &GapTables,
) -> Field {
    let mu = problem.mu;
    let (v1, v2) = &problem.lower_velocity;
    let (w1, w2) = &problem.upper_velocity;
    let sqrt_a0 = geom.field(grid, |s| s.sqrt_area0);
    let sum1 = w1.zip(v1, |a, b| a + b);
    let sum2 = w2.zip(v2, |a, b| a + b);
    let cov_div = covariant_divergence(grid, &sum1, &sum2, &sqrt_a0);

    let mut rhs = Field::zeros(grid);
    rhs.tag = FieldTag::Coefficient;
    for idx in 0..grid.len() {
        let s = &geom.samples[idx];
        let h = gap.h.data[idx];
        let slip1 = w1.data[idx] - v1.data[idx];
        let slip2 = w2.data[idx] - v2.data[idx];
        rhs.data[idx] = 12.0 * mu * gap.h_t.data[idx]
            + 12.0 * mu * h * s.area1 / s.area0 * s.normal_velocity
            - 6.0 * mu * (gap.h_x1.data[idx] * slip1 + gap.h_x2.data[idx] * slip2)
            + 6.0 * mu * h * cov_div.data[idx];
    }
    rhs
}

/// Couples the operator with a right-hand-side field and the Dirichlet data.
/// Interior entries are negated to match the operator sign convention.
pub fn system_with_rhs(
    matrix: Csr,
    rhs_field: &Field,
    boundary_pressure: &Field,
    grid: &Grid,
) -> ReynoldsSystem {
    let mut rhs = vec![0.0; grid.len()];
    for j in 0..grid.n2 {
        for i in 0..grid.n1 {
            let idx = grid.idx(i, j);
            rhs[idx] = if grid.on_dirichlet_edge(i, j) {
                boundary_pressure.data[idx]
            } else {
                -rhs_field.data[idx]
            };
        }
    }
    ReynoldsSystem { matrix, rhs }
}

/// Full assembly of the generalized Reynolds system.
pub fn assemble_reynolds(
    problem: &LubricationProblem,
    grid: &Grid,
    geom: &GeometryTables,
    gap: &GapTables,
) -> Result<ReynoldsSystem> {
    let matrix = assemble_operator(grid, geom, gap)?;
    let rhs = reynolds_rhs(problem, grid, geom, gap);
    Ok(system_with_rhs(
        matrix,
        &rhs,
        &problem.boundary_pressure,
        grid,
    ))
}

/// Iterative solve of the assembled system to relative residual `tol`.
pub fn solve_pressure(
    system: &ReynoldsSystem,
    grid: &Grid,
    tol: f64,
    max_iter: usize,
) -> Result<(Field, SolveStats)> {
    let (x, stats) = bicgstab(&system.matrix, &system.rhs, tol, max_iter)?;
    let mut p = Field::zeros(grid);
    p.data = x;
    p.tag = FieldTag::Pressure;
    Ok((p, stats))
}

/// Solved pressure plus everything needed to evaluate the through-gap
/// velocity profile at any `xi3` in `[0, 1]`.
#[derive(Clone, Debug)]
pub struct LubricationSolution {
    pub pressure: Field,
    pub grad_p: (Field, Field),
    /// Anisotropy matrix entries per node: `M = [[G, -F], [-F, E]]`.
    pub m_g: Field,
    pub m_f: Field,
    pub m_e: Field,
    pub area0: Field,
    pub gap_h: Field,
    pub mu: f64,
    /// Quadratic profile coefficients `h^2/(2 mu A0) (M grad p)_i`.
    pub poiseuille: (Field, Field),
    pub lower_velocity: (Field, Field),
    pub upper_velocity: (Field, Field),
    /// Normal fluid velocity `dX/dt . a3`, constant across the gap.
    pub normal_velocity: Field,
    pub stats: SolveStats,
}

/// Builds the evaluable velocity profile from the solved pressure.
pub fn reconstruct_velocity(
    problem: &LubricationProblem,
    grid: &Grid,
    geom: &GeometryTables,
    gap: &GapTables,
    pressure: Field,
    stats: SolveStats,
) -> LubricationSolution {
    let grad_p = grid.gradient(&pressure);
    let mut pois1 = Field::zeros(grid);
    let mut pois2 = Field::zeros(grid);
    for idx in 0..grid.len() {
        let s = &geom.samples[idx];
        let h = gap.h.data[idx];
        let common = h * h / (2.0 * problem.mu * s.area0);
        pois1.data[idx] =
            common * (s.forms.G * grad_p.0.data[idx] - s.forms.F * grad_p.1.data[idx]);
        pois2.data[idx] =
            common * (s.forms.E * grad_p.1.data[idx] - s.forms.F * grad_p.0.data[idx]);
    }
    LubricationSolution {
        grad_p,
        m_g: geom.field(grid, |s| s.forms.G),
        m_f: geom.field(grid, |s| s.forms.F),
        m_e: geom.field(grid, |s| s.forms.E),
        area0: geom.field(grid, |s| s.area0),
        gap_h: gap.h.clone(),
        mu: problem.mu,
        poiseuille: (pois1, pois2),
        lower_velocity: problem.lower_velocity.clone(),
        upper_velocity: problem.upper_velocity.clone(),
        normal_velocity: geom.field(grid, |s| s.normal_velocity),
        pressure,
        stats,
    }
}

impl LubricationSolution {
    /// Velocity components `(u1, u2, u3)` at node `idx` and height `xi3`.
    ///
    /// The profile is exactly `V` at `xi3 = 0` and `W` at `xi3 = 1`.
    pub fn velocity(&self, idx: usize, xi3: f64) -> [f64; 3] {
        let shape = xi3 * xi3 - xi3;
        let v1 = self.lower_velocity.0.data[idx];
        let v2 = self.lower_velocity.1.data[idx];
        let w1 = self.upper_velocity.0.data[idx];
        let w2 = self.upper_velocity.1.data[idx];
        [
            self.poiseuille.0.data[idx] * shape + xi3 * (w1 - v1) + v1,
            self.poiseuille.1.data[idx] * shape + xi3 * (w2 - v2) + v2,
            self.normal_velocity.data[idx],
        ]
    }

    /// Second `xi3`-derivative of the tangential profile (constant in `xi3`).
    pub fn profile_curvature(&self, idx: usize) -> [f64; 2] {
        [
            2.0 * self.poiseuille.0.data[idx],
            2.0 * self.poiseuille.1.data[idx],
        ]
    }
}

/// One-shot driver: assemble, solve, reconstruct.
pub fn solve_lubrication(
    problem: &LubricationProblem,
    grid: &Grid,
    geom: &GeometryTables,
    gap: &GapTables,
    tol: f64,
    max_iter: usize,
) -> Result<LubricationSolution> {
    let system = assemble_reynolds(problem, grid, geom, gap)?;
    let (pressure, stats) = solve_pressure(&system, grid, tol, max_iter)?;
    Ok(reconstruct_velocity(
        problem, grid, geom, gap, pressure, stats,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Plane;
    use crate::gap::GapTables;

    fn flat_setup(
        n1: usize,
        n2: usize,
        bc1: BoundaryKind,
        bc2: BoundaryKind,
        h: impl Fn(f64, f64) -> f64,
    ) -> (Grid, GeometryTables, GapTables) {
        let grid = Grid::new(n1, n2, (0.0, 1.0), (0.0, 1.0), bc1, bc2).unwrap();
        let geom = GeometryTables::build(&Plane, &grid, 0.0).unwrap();
        let gap =
            GapTables::from_functions(&grid, 0.0, |x, y, _| h(x, y), |_, _, _| 0.0, 1e-9).unwrap();
        (grid, geom, gap)
    }

    fn still_problem(grid: &Grid) -> LubricationProblem {
        LubricationProblem {
            mu: 1.0,
            lower_velocity: (Field::zeros(grid), Field::zeros(grid)),
            upper_velocity: (Field::zeros(grid), Field::zeros(grid)),
            boundary_pressure: Field::zeros(grid),
        }
    }

    #[test]
    fn all_periodic_grid_is_rejected() {
        let (grid, geom, gap) = flat_setup(
            8,
            8,
            BoundaryKind::Periodic,
            BoundaryKind::Periodic,
            |_, _| 1.0,
        );
        assert!(matches!(
            assemble_operator(&grid, &geom, &gap),
            Err(Error::SingularSystem)
        ));
    }

    #[test]
    fn uniform_gap_at_rest_gives_zero_pressure() {
        let (grid, geom, gap) = flat_setup(
            12,
            9,
            BoundaryKind::Dirichlet,
            BoundaryKind::Dirichlet,
            |_, _| 1.0,
        );
        let problem = still_problem(&grid);
        let sol = solve_lubrication(&problem, &grid, &geom, &gap, 1e-12, 10_000).unwrap();
        assert!(sol.pressure.max_abs() < 1e-12);
    }

    #[test]
    fn constant_boundary_pressure_with_zero_rhs() {
        let (grid, geom, gap) = flat_setup(
            10,
            10,
            BoundaryKind::Dirichlet,
            BoundaryKind::Dirichlet,
            |_, _| 2.0,
        );
        let mut problem = still_problem(&grid);
        problem.boundary_pressure = Field::from_fn(&grid, |_, _| 5.5);
        let sol = solve_lubrication(&problem, &grid, &geom, &gap, 1e-12, 10_000).unwrap();
        for v in &sol.pressure.data {
            assert!((v - 5.5).abs() < 1e-9, "{v}");
        }
    }

    #[test]
    fn flat_interior_assembly_is_symmetric() {
        let (grid, geom, gap) = flat_setup(
            9,
            9,
            BoundaryKind::Dirichlet,
            BoundaryKind::Dirichlet,
            |x, y| 1.0 + 0.3 * x + 0.2 * y * y,
        );
        let a = assemble_operator(&grid, &geom, &gap).unwrap();
        for j in 1..grid.n2 - 1 {
            for i in 1..grid.n1 - 1 {
                let r = grid.idx(i, j);
                for k in a.indptr[r]..a.indptr[r + 1] {
                    let c = a.indices[k];
                    let (ci, cj) = (c % grid.n1, c / grid.n1);
                    if grid.on_dirichlet_edge(ci, cj) {
                        continue;
                    }
                    assert!((a.values[k] - a.get(c, r)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn couette_profile_without_pressure_gradient() {
        let (grid, geom, gap) = flat_setup(
            10,
            10,
            BoundaryKind::Dirichlet,
            BoundaryKind::Dirichlet,
            |_, _| 1.0,
        );
        let mut problem = still_problem(&grid);
        problem.lower_velocity.0 = Field::from_fn(&grid, |_, _| 1.0);
        problem.upper_velocity.0 = Field::from_fn(&grid, |_, _| 3.0);
        // grad p = 0: pure Couette, linear between V and W.
        let sol = reconstruct_velocity(
            &problem,
            &grid,
            &geom,
            &gap,
            Field::zeros(&grid),
            SolveStats {
                iterations: 0,
                residual: 0.0,
                converged: true,
            },
        );
        let u = sol.velocity(grid.idx(4, 4), 0.25);
        assert!((u[0] - 1.5).abs() < 1e-14);
        assert!(u[1].abs() < 1e-14);
        assert!(u[2].abs() < 1e-14);
    }

    #[test]
    fn poiseuille_extremum_under_constant_gradient() {
        // Flat chart, V = W = 0, dp/dxi1 = P: extremum h^2 |P| / (8 mu) at
        // the mid-plane.
        let (grid, geom, gap) = flat_setup(
            16,
            8,
            BoundaryKind::Dirichlet,
            BoundaryKind::Dirichlet,
            |_, _| 1.0,
        );
        let problem = still_problem(&grid);
        let p_slope = 3.0;
        let pressure = Field::from_fn(&grid, |x, _| p_slope * x);
        let sol = reconstruct_velocity(
            &problem,
            &grid,
            &geom,
            &gap,
            pressure,
            SolveStats {
                iterations: 0,
                residual: 0.0,
                converged: true,
            },
        );
        let idx = grid.idx(8, 4);
        let u_mid = sol.velocity(idx, 0.5);
        assert!((u_mid[0].abs() - p_slope / 8.0).abs() < 1e-10);
        // Ends pinned to the wall velocities.
        assert_eq!(sol.velocity(idx, 0.0)[0], 0.0);
        assert_eq!(sol.velocity(idx, 1.0)[0], 0.0);
    }
}
