//! Pointwise differential geometry of the lower bounding surface and the
//! change-of-variable coefficients between the physical thin domain and the
//! reference slab.
//!
//! Everything here is exact pointwise algebra on chart jets: the local basis
//! `{a1, a2, a3}`, first and second fundamental forms, the area expansion
//! `A(eps) = A0 + eps xi3 h A1 + (eps xi3 h)^2 A2`, curvatures, the inverse
//! Jacobian assembled from the `alpha/beta/gamma` coefficients, and the
//! power-series expansion of those coefficients in `eps`.

use crate::chart::SurfaceChart;
use crate::error::{Error, Result};
use crate::gap::GapJet;
use crate::grid::{Field, Grid};
use crate::math::{solve3, FloatExt, Vec3};

use alloc::vec::Vec;

/// Relative regularity margin: the chart is degenerate when
/// `|a1 x a2| <= DELTA_REG * max(E, G)`.
pub const DELTA_REG: f64 = 1e-8;

/// Default truncation order of the inverse-coefficient series. The models
/// only consume orders 0 and 1; order 2 supports the truncation-order check.
pub const DEFAULT_SERIES_ORDER: usize = 2;

/// First fundamental form `E, F, G` and second fundamental form `e, f, g`.
#[allow(non_snake_case)]
#[derive(Clone, Copy, Debug, Default)]
pub struct FundamentalForms {
    pub E: f64,
    pub F: f64,
    pub G: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
}

/// Curvature scalars derived from the area expansion coefficients.
#[derive(Clone, Copy, Debug)]
pub struct Curvatures {
    pub gauss: f64,
    pub mean: f64,
    pub kappa_max: f64,
    pub kappa_min: f64,
}

/// Every pointwise geometric quantity needed by the coefficient families and
/// both reduced models, evaluated at one `(xi1, xi2, t)`.
#[derive(Clone, Debug)]
pub struct GeometrySample {
    pub xi: [f64; 2],
    pub t: f64,
    /// Tangent basis `a1 = dX/dxi1`, `a2 = dX/dxi2` and unit normal `a3`.
    pub a1: Vec3,
    pub a2: Vec3,
    pub a3: Vec3,
    pub forms: FundamentalForms,
    /// Area expansion coefficients `A0 = EG - F^2`, `A1 = -eG - gE + 2fF`,
    /// `A2 = eg - f^2`.
    pub area0: f64,
    pub area1: f64,
    pub area2: f64,
    pub sqrt_area0: f64,
    /// d A0 / d xi_l
    pub darea0: [f64; 2],
    pub curv: Curvatures,
    /// Leading inverse-Jacobian coefficients for the tangential rows,
    /// `alpha0 = [G, -F] / A0`, `beta0 = [-F, E] / A0`.
    pub alpha0: [f64; 2],
    pub beta0: [f64; 2],
    /// d alpha0[l] / d xi_m and d beta0[l] / d xi_m.
    pub dalpha0: [[f64; 2]; 2],
    pub dbeta0: [[f64; 2]; 2],
    /// d a_k / d xi_l (`da[k][l]`, k = 0..3 for a1, a2, a3).
    pub da: [[Vec3; 2]; 3],
    /// d^2 a_k / d xi_l d xi_m, symmetric pairs indexed by l + m.
    pub dda: [[Vec3; 3]; 3],
    /// d a_k / dt.
    pub a_t: [Vec3; 3],
    /// Surface velocity dX/dt.
    pub velocity: Vec3,
    /// Normal surface speed `dX/dt . a3`.
    pub normal_velocity: f64,
    /// d/d xi_l of the normal surface speed.
    pub d_normal_velocity: [f64; 2],
}

/// Basis vectors at a point; errors when the chart degenerates there.
pub fn basis_at(chart: &dyn SurfaceChart, xi: [f64; 2], t: f64) -> Result<(Vec3, Vec3, Vec3)> {
    let s = GeometrySample::at(chart, xi, t)?;
    Ok((s.a1, s.a2, s.a3))
}

/// Both fundamental forms at a point.
pub fn fundamental_forms(
    chart: &dyn SurfaceChart,
    xi: [f64; 2],
    t: f64,
) -> Result<FundamentalForms> {
    Ok(GeometrySample::at(chart, xi, t)?.forms)
}

/// `(A0, A1, A2)` from the fundamental forms.
pub fn area_coefficients(forms: &FundamentalForms) -> (f64, f64, f64) {
    let a0 = forms.E * forms.G - forms.F * forms.F;
    let a1 = -forms.e * forms.G - forms.g * forms.E + 2.0 * forms.f * forms.F;
    let a2 = forms.e * forms.g - forms.f * forms.f;
    (a0, a1, a2)
}

/// The quadratic area expansion `A(eps) = A0 + eps xi3 h A1 + (eps xi3 h)^2 A2`.
///
/// The expansion is exact: it reproduces the Jacobian determinant factor at
/// any `(eps, xi3, h)`, not merely asymptotically.
pub fn area_series(area: (f64, f64, f64), eps: f64, xi3: f64, h: f64) -> f64 {
    let x = eps * xi3 * h;
    area.0 + x * area.1 + x * x * area.2
}

/// Gaussian, mean and principal curvatures from the area coefficients.
///
/// The principal curvatures solve `A0 k^2 + A1 k + A2 = 0`; a discriminant
/// below `-tol` (relative) signals inconsistent inputs.
pub fn curvatures(area0: f64, area1: f64, area2: f64) -> Result<Curvatures> {
    let gauss = area2 / area0;
    let mean = -area1 / (2.0 * area0);
    let disc = area1 * area1 - 4.0 * area0 * area2;
    let scale = (area1 * area1)
        .max((4.0 * area0 * area2).abs())
        .max(f64::MIN_POSITIVE);
    if disc < -1e-10 * scale {
        return Err(Error::NumericalInconsistency {
            what: "principal-curvature discriminant",
            value: disc,
        });
    }
    let root = disc.max(0.0).sqrt();
    let kappa_max = (-area1 + root) / (2.0 * area0);
    let kappa_min = (-area1 - root) / (2.0 * area0);
    Ok(Curvatures {
        gauss,
        mean,
        kappa_max,
        kappa_min,
    })
}

impl GeometrySample {
    /// Evaluates the full sample from the chart jet at `(xi, t)`.
    pub fn at(chart: &dyn SurfaceChart, xi: [f64; 2], t: f64) -> Result<Self> {
        let jet = chart.jet(xi[0], xi[1], t);
        let a1 = jet.d1[0];
        let a2 = jet.d1[1];

        #[allow(non_snake_case)]
        let (E, F, G) = (a1.dot(a1), a1.dot(a2), a2.dot(a2));
        let w = a1.cross(a2);
        let n = w.norm();
        if n <= DELTA_REG * E.max(G) {
            return Err(Error::DegenerateChart { xi, t });
        }
        let a3 = w.scale(1.0 / n);

        // Second fundamental form via a3 . d2X, avoiding derivatives of the
        // normalized normal.
        let forms = FundamentalForms {
            E,
            F,
            G,
            e: a3.dot(jet.d2_at(0, 0)),
            f: a3.dot(jet.d2_at(0, 1)),
            g: a3.dot(jet.d2_at(1, 1)),
        };
        let (area0, area1, area2) = area_coefficients(&forms);
        let sqrt_area0 = area0.sqrt();
        let curv = curvatures(area0, area1, area2)?;

        // Derivatives of w = a1 x a2 and of the unit normal a3 = w / |w|.
        let mut w_l = [Vec3::ZERO; 2];
        for l in 0..2 {
            w_l[l] = jet.d2_at(0, l).cross(a2) + a1.cross(jet.d2_at(1, l));
        }
        let n_l = [w.dot(w_l[0]) / n, w.dot(w_l[1]) / n];
        let mut da3 = [Vec3::ZERO; 2];
        for l in 0..2 {
            da3[l] = w_l[l].scale(1.0 / n) - w.scale(n_l[l] / (n * n));
        }

        let mut dda3 = [Vec3::ZERO; 3];
        for (lm, (l, m)) in [(0usize, 0usize), (0, 1), (1, 1)]
            .iter()
            .copied()
            .enumerate()
        {
            let w_lm = jet.d3_at(0, l, m).cross(a2)
                + jet.d2_at(0, l).cross(jet.d2_at(1, m))
                + jet.d2_at(0, m).cross(jet.d2_at(1, l))
                + a1.cross(jet.d3_at(1, l, m));
            let n_lm = (w_l[m].dot(w_l[l]) + w.dot(w_lm) - n_l[l] * n_l[m]) / n;
            dda3[lm] = w_lm.scale(1.0 / n)
                - (w_l[l].scale(n_l[m]) + w_l[m].scale(n_l[l])).scale(1.0 / (n * n))
                - w.scale(n_lm / (n * n))
                + w.scale(2.0 * n_l[l] * n_l[m] / (n * n * n));
        }

        let da = [
            [jet.d2_at(0, 0), jet.d2_at(0, 1)],
            [jet.d2_at(1, 0), jet.d2_at(1, 1)],
            da3,
        ];
        let dda = [
            [jet.d3_at(0, 0, 0), jet.d3_at(0, 0, 1), jet.d3_at(0, 1, 1)],
            [jet.d3_at(1, 0, 0), jet.d3_at(1, 0, 1), jet.d3_at(1, 1, 1)],
            dda3,
        ];

        // Time derivatives of the basis.
        let w_t = jet.dt_d1[0].cross(a2) + a1.cross(jet.dt_d1[1]);
        let a3_t = w_t.scale(1.0 / n) - w.scale(w.dot(w_t) / (n * n * n));
        let a_t = [jet.dt_d1[0], jet.dt_d1[1], a3_t];

        // Metric derivatives feeding d(alpha0)/dxi and d(A0)/dxi.
        let mut darea0 = [0.0; 2];
        let mut dalpha0 = [[0.0; 2]; 2];
        let mut dbeta0 = [[0.0; 2]; 2];
        for m in 0..2 {
            let e_m = 2.0 * a1.dot(jet.d2_at(0, m));
            let f_m = jet.d2_at(0, m).dot(a2) + a1.dot(jet.d2_at(1, m));
            let g_m = 2.0 * a2.dot(jet.d2_at(1, m));
            let a0_m = e_m * G + E * g_m - 2.0 * F * f_m;
            darea0[m] = a0_m;
            dalpha0[0][m] = (g_m * area0 - G * a0_m) / (area0 * area0);
            dalpha0[1][m] = -(f_m * area0 - F * a0_m) / (area0 * area0);
            dbeta0[0][m] = dalpha0[1][m];
            dbeta0[1][m] = (e_m * area0 - E * a0_m) / (area0 * area0);
        }

        let velocity = jet.dt;
        let normal_velocity = velocity.dot(a3);
        let d_normal_velocity = [
            jet.dt_d1[0].dot(a3) + velocity.dot(da3[0]),
            jet.dt_d1[1].dot(a3) + velocity.dot(da3[1]),
        ];

        Ok(GeometrySample {
            xi,
            t,
            a1,
            a2,
            a3,
            forms,
            area0,
            area1,
            area2,
            sqrt_area0,
            darea0,
            curv,
            alpha0: [forms.G / area0, -forms.F / area0],
            beta0: [-forms.F / area0, forms.E / area0],
            dalpha0,
            dbeta0,
            da,
            dda,
            a_t,
            velocity,
            normal_velocity,
            d_normal_velocity,
        })
    }

    /// Basis vector by one-based index.
    pub fn basis(&self, k: usize) -> Vec3 {
        match k {
            0 => self.a1,
            1 => self.a2,
            _ => self.a3,
        }
    }

    /// Expands the inverse-Jacobian coefficients in powers of `eps` up to
    /// `order`, for the gap point `(h, grad_h)`.
    pub fn inversion_series(&self, h: f64, grad_h: [f64; 2], order: usize) -> InversionSeries {
        let f = &self.forms;
        let (a0, c1, c2) = (self.area0, self.area1, self.area2);
        let mut alpha = [Vec::new(), Vec::new(), Vec::new()];
        let mut beta = [Vec::new(), Vec::new(), Vec::new()];

        alpha[0].push(f.G / a0);
        alpha[1].push(-f.F / a0);
        alpha[2].push((grad_h[1] * f.F - grad_h[0] * f.G) / a0);
        beta[0].push(-f.F / a0);
        beta[1].push(f.E / a0);
        beta[2].push((grad_h[0] * f.F - grad_h[1] * f.E) / a0);

        if order >= 1 {
            alpha[0].push(-(f.g + alpha[0][0] * c1) / a0);
            alpha[1].push((f.f - alpha[1][0] * c1) / a0);
            alpha[2].push((-grad_h[1] * f.f + grad_h[0] * f.g - alpha[2][0] * c1) / a0);
            beta[0].push(alpha[1][1]);
            beta[1].push(-(f.e + beta[1][0] * c1) / a0);
            beta[2].push((-grad_h[0] * f.f + grad_h[1] * f.e - beta[2][0] * c1) / a0);
        }
        for n in 2..=order {
            for i in 0..3 {
                let next = -(alpha[i][n - 2] * c2 + alpha[i][n - 1] * c1) / a0;
                alpha[i].push(next);
                let next = -(beta[i][n - 2] * c2 + beta[i][n - 1] * c1) / a0;
                beta[i].push(next);
            }
        }
        InversionSeries { alpha, beta, h }
    }

    /// Exact inverse-Jacobian coefficients at finite `eps`, together with the
    /// series prefactor data. Rows: `dxi_i/dx = alpha_i a1 + beta_i a2 +
    /// gamma_i a3`.
    pub fn inverse_coefficients(&self, gap: &GapJet, eps: f64, xi3: f64) -> InverseCoefficients {
        let f = &self.forms;
        let x = eps * xi3 * gap.h;
        let a_eps = area_series((self.area0, self.area1, self.area2), eps, xi3, gap.h);
        let alpha1 = (f.G - x * f.g) / a_eps;
        let beta1 = -(f.F - x * f.f) / a_eps;
        let alpha2 = beta1;
        let beta2 = (f.E - x * f.e) / a_eps;
        let alpha3 = -(xi3 / gap.h) * (alpha1 * gap.h_x[0] + alpha2 * gap.h_x[1]);
        let beta3 = -(xi3 / gap.h) * (beta1 * gap.h_x[0] + beta2 * gap.h_x[1]);
        InverseCoefficients {
            alpha: [alpha1, alpha2, alpha3],
            beta: [beta1, beta2, beta3],
            gamma: [0.0, 0.0, 1.0 / (eps * gap.h)],
        }
    }

    /// Exact 4x4 Jacobian of the change of variable (last row is the trivial
    /// time row).
    pub fn jacobian_forward(&self, gap: &GapJet, eps: f64, xi3: f64) -> [[f64; 4]; 4] {
        let mut j = [[0.0; 4]; 4];
        for (col, vec) in [
            self.a1
                + self.a3.scale(eps * xi3 * gap.h_x[0])
                + self.da[2][0].scale(eps * xi3 * gap.h),
            self.a2
                + self.a3.scale(eps * xi3 * gap.h_x[1])
                + self.da[2][1].scale(eps * xi3 * gap.h),
            self.a3.scale(eps * gap.h),
            self.velocity
                + self.a3.scale(eps * xi3 * gap.h_t)
                + self.a_t[2].scale(eps * xi3 * gap.h),
        ]
        .iter()
        .enumerate()
        {
            j[0][col] = vec.x;
            j[1][col] = vec.y;
            j[2][col] = vec.z;
        }
        j[3][3] = 1.0;
        j
    }

    /// Closed-form 4x4 inverse Jacobian assembled from the alpha/beta/gamma
    /// coefficients and the time-column entries.
    pub fn jacobian_inverse_closed(&self, gap: &GapJet, eps: f64, xi3: f64) -> [[f64; 4]; 4] {
        let c = self.inverse_coefficients(gap, eps, xi3);
        let drift = self.velocity + self.a_t[2].scale(eps * xi3 * gap.h);
        let mut inv = [[0.0; 4]; 4];
        for i in 0..3 {
            let tangential = self.a1.scale(c.alpha[i]) + self.a2.scale(c.beta[i]);
            let row = tangential + self.a3.scale(c.gamma[i]);
            inv[i][0] = row.x;
            inv[i][1] = row.y;
            inv[i][2] = row.z;
            inv[i][3] = -tangential.dot(drift);
        }
        inv[2][3] -= self.a3.dot(self.velocity) / (eps * gap.h) + xi3 * gap.h_t / gap.h;
        inv[3][3] = 1.0;
        inv
    }

    /// Closed-form inverse together with a numerically inverted Jacobian as a
    /// self-check oracle.
    pub fn jacobian_inverse_direct(
        &self,
        gap: &GapJet,
        eps: f64,
        xi3: f64,
    ) -> Result<([[f64; 4]; 4], [[f64; 4]; 4])> {
        let closed = self.jacobian_inverse_closed(gap, eps, xi3);
        let fwd = self.jacobian_forward(gap, eps, xi3);
        let spatial = [
            [fwd[0][0], fwd[0][1], fwd[0][2]],
            [fwd[1][0], fwd[1][1], fwd[1][2]],
            [fwd[2][0], fwd[2][1], fwd[2][2]],
        ];
        let mut numeric = [[0.0; 4]; 4];
        for col in 0..3 {
            let mut rhs = [0.0; 3];
            rhs[col] = 1.0;
            let sol = solve3(spatial, rhs, 1e-300).ok_or(Error::SingularJacobian)?;
            for row in 0..3 {
                numeric[row][col] = sol[row];
            }
        }
        let vt = [fwd[0][3], fwd[1][3], fwd[2][3]];
        for row in 0..3 {
            numeric[row][3] =
                -(numeric[row][0] * vt[0] + numeric[row][1] * vt[1] + numeric[row][2] * vt[2]);
        }
        numeric[3][3] = 1.0;
        Ok((closed, numeric))
    }
}

/// Exact inverse-Jacobian coefficients at finite `eps`.
#[derive(Clone, Copy, Debug)]
pub struct InverseCoefficients {
    pub alpha: [f64; 3],
    pub beta: [f64; 3],
    pub gamma: [f64; 3],
}

/// Power-series coefficients `alpha_i^n`, `beta_i^n` of the inverse-Jacobian
/// rows; the third row carries the `xi3/h` prefactor.
#[derive(Clone, Debug)]
pub struct InversionSeries {
    pub alpha: [Vec<f64>; 3],
    pub beta: [Vec<f64>; 3],
    h: f64,
}

impl InversionSeries {
    pub fn order(&self) -> usize {
        self.alpha[0].len() - 1
    }

    fn sum(coeffs: &[f64], n_max: usize, x: f64) -> f64 {
        let mut acc = 0.0;
        let mut xp = 1.0;
        for c in coeffs.iter().take(n_max + 1) {
            acc += c * xp;
            xp *= x;
        }
        acc
    }

    /// Truncated series value of `alpha_i` (zero-based `i`) at `(eps, xi3)`.
    pub fn alpha_truncated(&self, i: usize, n_max: usize, eps: f64, xi3: f64) -> f64 {
        let x = eps * xi3 * self.h;
        let s = Self::sum(&self.alpha[i], n_max, x);
        if i == 2 {
            s * xi3 / self.h
        } else {
            s
        }
    }

    pub fn beta_truncated(&self, i: usize, n_max: usize, eps: f64, xi3: f64) -> f64 {
        let x = eps * xi3 * self.h;
        let s = Self::sum(&self.beta[i], n_max, x);
        if i == 2 {
            s * xi3 / self.h
        } else {
            s
        }
    }
}

/// Per-node geometry samples over a grid at one time. Immutable after
/// construction and shareable across threads.
#[derive(Clone, Debug)]
pub struct GeometryTables {
    pub samples: Vec<GeometrySample>,
    pub t: f64,
}

impl GeometryTables {
    pub fn build(chart: &dyn SurfaceChart, grid: &Grid, t: f64) -> Result<Self> {
        let mut samples = Vec::with_capacity(grid.len());
        for j in 0..grid.n2 {
            for i in 0..grid.n1 {
                samples.push(GeometrySample::at(chart, [grid.xi1(i), grid.xi2(j)], t)?);
            }
        }
        Ok(GeometryTables { samples, t })
    }

    /// Assembles rows built elsewhere (e.g. by a threaded driver); the
    /// caller guarantees row-major order.
    pub fn from_samples(samples: Vec<GeometrySample>, t: f64) -> Self {
        GeometryTables { samples, t }
    }

    pub fn field(&self, grid: &Grid, f: impl Fn(&GeometrySample) -> f64) -> Field {
        let mut out = Field::zeros(grid);
        for (o, s) in out.data.iter_mut().zip(self.samples.iter()) {
            *o = f(s);
        }
        out.time = self.t;
        out
    }
}

/// Covariant divergence `div(sqrt(A0) w) / sqrt(A0)` discretized with the
/// compact product form.
pub fn covariant_divergence(grid: &Grid, w1: &Field, w2: &Field, sqrt_area0: &Field) -> Field {
    let s1 = w1.zip(sqrt_area0, |a, b| a * b);
    let s2 = w2.zip(sqrt_area0, |a, b| a * b);
    let div = grid.divergence(&s1, &s2);
    div.zip(sqrt_area0, |d, s| d / s)
}

/// The same covariant divergence through the expanded identity
/// `div(w) + grad(A0) . w / (2 A0)` with analytic `grad(A0)`; differs from
/// [`covariant_divergence`] by the discretization commutator, O(dx^2).
pub fn covariant_divergence_expanded(
    grid: &Grid,
    w1: &Field,
    w2: &Field,
    area0: &Field,
    darea0_1: &Field,
    darea0_2: &Field,
) -> Field {
    let mut out = grid.divergence(w1, w2);
    for idx in 0..out.data.len() {
        out.data[idx] += (darea0_1.data[idx] * w1.data[idx] + darea0_2.data[idx] * w2.data[idx])
            / (2.0 * area0.data[idx]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{Cylinder, Paraboloid, Plane, Sphere, SurfaceChart, TranslatingPlane};
    use crate::grid::BoundaryKind;

    fn flat_gap() -> GapJet {
        GapJet {
            h: 1.0,
            h_t: 0.0,
            h_x: [0.0, 0.0],
            h_tx: [0.0, 0.0],
        }
    }

    #[test]
    fn plane_basis_is_identity_frame() {
        let (a1, a2, a3) = basis_at(&Plane, [0.3, -0.7], 0.0).unwrap();
        assert_eq!(a1, Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(a2, Vec3::new(0.0, 1.0, 0.0));
        assert_eq!(a3, Vec3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn cylinder_basis_matches_hand_differentiation() {
        let xi1 = 1.1;
        let (a1, a2, a3) = basis_at(&Cylinder { radius: 1.0 }, [xi1, 0.4], 0.0).unwrap();
        assert!((a1 - Vec3::new(-xi1.sin(), xi1.cos(), 0.0)).norm() < 1e-14);
        assert!((a2 - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-14);
        assert!((a3 - Vec3::new(xi1.cos(), xi1.sin(), 0.0)).norm() < 1e-14);
    }

    struct DegenerateChart;
    impl SurfaceChart for DegenerateChart {
        fn jet(&self, xi1: f64, _xi2: f64, _t: f64) -> crate::chart::ChartJet {
            crate::chart::ChartJet {
                x: Vec3::new(xi1, xi1, 0.0),
                d1: [Vec3::new(1.0, 1.0, 0.0), Vec3::new(1.0, 1.0, 0.0)],
                ..Default::default()
            }
        }
    }

    #[test]
    fn parallel_tangents_are_rejected() {
        assert!(matches!(
            basis_at(&DegenerateChart, [0.1, 0.2], 0.0),
            Err(Error::DegenerateChart { .. })
        ));
    }

    #[test]
    fn fundamental_forms_on_reference_charts() {
        let plane = fundamental_forms(&Plane, [0.2, 0.9], 0.0).unwrap();
        assert_eq!(
            (plane.E, plane.F, plane.G, plane.e, plane.f, plane.g),
            (1.0, 0.0, 1.0, 0.0, 0.0, 0.0)
        );

        let cyl = fundamental_forms(&Cylinder { radius: 1.0 }, [0.7, 0.1], 0.0).unwrap();
        assert!((cyl.E - 1.0).abs() < 1e-14);
        assert!(cyl.F.abs() < 1e-14);
        assert!((cyl.G - 1.0).abs() < 1e-14);
        assert!((cyl.e + 1.0).abs() < 1e-14);
        assert!(cyl.f.abs() < 1e-14);
        assert!(cyl.g.abs() < 1e-14);

        // Sphere of radius R: E = R^2, F = 0, G = R^2 sin^2(xi1).
        let r = 2.0;
        let xi1 = 0.8;
        let sph = fundamental_forms(&Sphere { radius: r }, [xi1, 2.0], 0.0).unwrap();
        assert!((sph.E - r * r).abs() < 1e-12);
        assert!(sph.F.abs() < 1e-12);
        assert!((sph.G - r * r * xi1.sin().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn area_coefficients_on_reference_charts() {
        let plane = fundamental_forms(&Plane, [0.0, 0.0], 0.0).unwrap();
        assert_eq!(area_coefficients(&plane), (1.0, 0.0, 0.0));

        let cyl = fundamental_forms(&Cylinder { radius: 1.0 }, [0.3, 0.0], 0.0).unwrap();
        let (a0, a1, a2) = area_coefficients(&cyl);
        assert!((a0 - 1.0).abs() < 1e-14);
        assert!((a1 - 1.0).abs() < 1e-14);
        assert!(a2.abs() < 1e-14);

        // Sphere R = 2 at the equator: forms are E = G = 4, e = g = -2, so
        // direct substitution gives A0 = 16, A1 = 16, A2 = 4.
        let sph = fundamental_forms(
            &Sphere { radius: 2.0 },
            [core::f64::consts::FRAC_PI_2, 1.0],
            0.0,
        )
        .unwrap();
        let (a0, a1, a2) = area_coefficients(&sph);
        assert!((sph.e + 2.0).abs() < 1e-12);
        assert!((sph.g + 2.0).abs() < 1e-12);
        assert!((a0 - 16.0).abs() < 1e-11);
        assert!((a1 - 16.0).abs() < 1e-11);
        assert!((a2 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn curvatures_on_reference_charts() {
        let c = curvatures(1.0, 0.0, 0.0).unwrap();
        assert_eq!(
            (c.gauss, c.mean, c.kappa_max, c.kappa_min),
            (0.0, 0.0, 0.0, 0.0)
        );

        // Unit cylinder: roots of k^2 + k = 0.
        let c = curvatures(1.0, 1.0, 0.0).unwrap();
        assert!((c.gauss).abs() < 1e-14);
        assert!((c.mean + 0.5).abs() < 1e-14);
        assert!((c.kappa_max - 0.0).abs() < 1e-14);
        assert!((c.kappa_min + 1.0).abs() < 1e-14);

        // Sphere R = 2 from its own area coefficients.
        let sph = fundamental_forms(&Sphere { radius: 2.0 }, [0.9, 0.4], 0.0).unwrap();
        let (a0, a1, a2) = area_coefficients(&sph);
        let c = curvatures(a0, a1, a2).unwrap();
        assert!((c.gauss - 0.25).abs() < 1e-12);
        // Umbilic double root: the discriminant is zero only up to rounding,
        // so the split roots carry a sqrt-of-noise error.
        assert!((c.kappa_max + 0.5).abs() < 3e-6);
        assert!((c.kappa_min + 0.5).abs() < 3e-6);
    }

    #[test]
    fn curvature_rejects_inconsistent_inputs() {
        assert!(matches!(
            curvatures(1.0, 0.0, 1.0),
            Err(Error::NumericalInconsistency { .. })
        ));
    }

    #[test]
    fn inversion_series_on_plane_is_trivial() {
        let s = GeometrySample::at(&Plane, [0.5, 0.5], 0.0).unwrap();
        let ser = s.inversion_series(1.0, [0.0, 0.0], 3);
        assert_eq!(ser.alpha[0][0], 1.0);
        assert_eq!(ser.beta[1][0], 1.0);
        assert_eq!(ser.alpha[1][0], 0.0);
        for n in 1..=3 {
            for i in 0..3 {
                assert_eq!(ser.alpha[i][n], 0.0);
                assert_eq!(ser.beta[i][n], 0.0);
            }
        }
    }

    #[test]
    fn inversion_series_recurrence_on_cylinder() {
        // (A0, A1, A2) = (1, 1, 0), g = 0 gives alpha1 = (1, -1, 1, -1, ...).
        let s = GeometrySample::at(&Cylinder { radius: 1.0 }, [0.2, 0.3], 0.0).unwrap();
        let ser = s.inversion_series(1.0, [0.0, 0.0], 2);
        assert!((ser.alpha[0][0] - 1.0).abs() < 1e-14);
        assert!((ser.alpha[0][1] + 1.0).abs() < 1e-14);
        assert!((ser.alpha[0][2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn alpha2_equals_beta1_for_all_orders() {
        let s = GeometrySample::at(&Paraboloid { a: 0.8, b: -0.4 }, [0.3, -0.2], 0.0).unwrap();
        let ser = s.inversion_series(1.3, [0.2, -0.1], 4);
        for n in 0..=4 {
            assert_eq!(ser.alpha[1][n], ser.beta[0][n]);
        }
    }

    #[test]
    fn plane_jacobian_inverse_is_diagonal() {
        let s = GeometrySample::at(&Plane, [0.5, 0.5], 0.0).unwrap();
        let gap = flat_gap();
        let (closed, numeric) = s.jacobian_inverse_direct(&gap, 0.1, 0.5).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let expect = match (r, c) {
                    (0, 0) | (1, 1) | (3, 3) => 1.0,
                    (2, 2) => 1.0 / (0.1 * 1.0),
                    _ => 0.0,
                };
                assert!((closed[r][c] - expect).abs() < 1e-12, "closed[{r}][{c}]");
                assert!((numeric[r][c] - expect).abs() < 1e-12, "numeric[{r}][{c}]");
            }
        }
    }

    #[test]
    fn translating_plane_time_column() {
        let c = 0.7;
        let s = GeometrySample::at(&TranslatingPlane { speed: c }, [0.1, 0.9], 0.3).unwrap();
        let gap = flat_gap();
        let eps = 0.05;
        let inv = s.jacobian_inverse_closed(&gap, eps, 0.4);
        assert!((inv[2][3] + c / (eps * 1.0)).abs() < 1e-12);
        assert!(inv[0][3].abs() < 1e-14);
        assert!(inv[1][3].abs() < 1e-14);
    }

    #[test]
    fn covariant_divergence_on_plane() {
        let grid = Grid::new(
            17,
            13,
            (0.0, 1.0),
            (0.0, 1.0),
            BoundaryKind::Dirichlet,
            BoundaryKind::Dirichlet,
        )
        .unwrap();
        let ones = Field::from_fn(&grid, |_, _| 1.0);
        let w1 = Field::from_fn(&grid, |_, _| 2.5);
        let w2 = Field::from_fn(&grid, |_, _| -1.5);
        let div = covariant_divergence(&grid, &w1, &w2, &ones);
        assert!(div.data.iter().all(|v| v.abs() < 1e-13));

        let w1 = Field::from_fn(&grid, |x, _| x);
        let w2 = Field::from_fn(&grid, |_, y| y);
        let div = covariant_divergence(&grid, &w1, &w2, &ones);
        assert!(div.data.iter().all(|v| (v - 2.0).abs() < 1e-12));
    }
}
