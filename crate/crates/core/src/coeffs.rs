//! Coefficient families of the depth-averaged momentum equation.
//!
//! [`SurfaceCoeffs`] collects the families that depend only on the surface
//! parametrization; [`GapCoeffs`] the ones that also involve the gap field,
//! the friction closure and the body force. All are pointwise pure functions
//! of a [`GeometrySample`] and a [`GapJet`].

use crate::gap::GapJet;
use crate::geometry::GeometrySample;
use crate::math::Vec3;

/// Families depending only on the parametrization.
///
/// Index convention is zero-based throughout: `i, l, m` range over the two
/// tangential directions and `k` over the three basis vectors.
#[derive(Clone, Debug, Default)]
pub struct SurfaceCoeffs {
    /// Metric-weighted second-form contractions `b[i][l]`.
    pub b: [[f64; 2]; 2],
    /// Tangential surface-velocity projections `c[l]`.
    pub c: [f64; 2],
    /// Basis-derivative projections `h[i][l][k]`.
    pub h: [[[f64; 3]; 2]; 2],
    /// Normal-twist scalar entering the upper-surface traction expansion.
    pub i: f64,
    /// Inverse-metric rows `j[l][m]` multiplying second derivatives.
    pub j: [[f64; 2]; 2],
    /// Divergence-of-dual-basis contraction `d[l]`, shared by several
    /// families below.
    pub d: [f64; 2],
    /// First-derivative coupling `l[k][l][i]`.
    pub l: [[[f64; 2]; 2]; 3],
    /// Basis time-derivative projections `q[i][k]`.
    pub q: [[f64; 3]; 2],
    /// Advection-like zero-order coupling `r[i][k]`.
    pub r: [[f64; 2]; 2],
    /// Zero-order viscous coupling `s[i][k]`.
    pub s: [[f64; 2]; 2],
}

impl SurfaceCoeffs {
    pub fn at(gs: &GeometrySample) -> Self {
        let fr = &gs.forms;
        let (alpha0, beta0) = (gs.alpha0, gs.beta0);
        let vn = gs.normal_velocity;

        let b = [
            [fr.G * fr.e - fr.F * fr.f, fr.G * fr.f - fr.F * fr.g],
            [fr.E * fr.f - fr.F * fr.e, fr.E * fr.g - fr.F * fr.f],
        ];

        let mut c = [0.0; 2];
        for l in 0..2 {
            c[l] = alpha0[l] * gs.a1.dot(gs.velocity) + beta0[l] * gs.a2.dot(gs.velocity);
        }

        let mut h = [[[0.0; 3]; 2]; 2];
        for i in 0..2 {
            for l in 0..2 {
                for k in 0..3 {
                    h[i][l][k] =
                        alpha0[i] * gs.a1.dot(gs.da[k][l]) + beta0[i] * gs.a2.dot(gs.da[k][l]);
                }
            }
        }

        let cross_sum = gs.a1.cross(gs.da[2][1]) + gs.da[2][0].cross(gs.a2);
        let i_scalar = cross_sum.dot(gs.a3);

        let mut j = [[0.0; 2]; 2];
        for l in 0..2 {
            j[l][0] = alpha0[l];
            j[l][1] = beta0[l];
        }

        let mut d = [0.0; 2];
        for l in 0..2 {
            d[l] = gs.dalpha0[l][0]
                + gs.dbeta0[l][1]
                + alpha0[l] * (h[0][0][0] + h[1][1][0])
                + beta0[l] * (h[0][0][1] + h[1][1][1]);
        }

        let mut lc = [[[0.0; 2]; 2]; 3];
        for k in 0..3 {
            for l in 0..2 {
                for i in 0..2 {
                    let diag = if k == i { d[l] } else { 0.0 };
                    let mut sum = 0.0;
                    for m in 0..2 {
                        sum += h[i][m][k] * j[l][m];
                    }
                    lc[k][l][i] = diag + 2.0 * sum;
                }
            }
        }

        let mut q = [[0.0; 3]; 2];
        for i in 0..2 {
            for k in 0..3 {
                let mut drag = 0.0;
                for l in 0..2 {
                    drag += h[i][l][k] * c[l];
                }
                q[i][k] = alpha0[i] * gs.a1.dot(gs.a_t[k]) + beta0[i] * gs.a2.dot(gs.a_t[k]) - drag;
            }
        }

        let mut r = [[0.0; 2]; 2];
        for i in 0..2 {
            for k in 0..2 {
                r[i][k] = q[i][k] + h[i][k][2] * vn;
            }
        }

        let mut s = [[0.0; 2]; 2];
        let twist = (i_scalar * gs.sqrt_area0 - gs.area1) / gs.area0;
        for i in 0..2 {
            for k in 0..2 {
                let t1 = twist
                    * (alpha0[i] * gs.da[k][0].dot(gs.a3) + beta0[i] * gs.da[k][1].dot(gs.a3));
                let mut t2 = 0.0;
                for m in 0..2 {
                    for l in 0..2 {
                        t2 += (alpha0[i] * gs.a1.dot(gs.dda[k][l + m])
                            + beta0[i] * gs.a2.dot(gs.dda[k][l + m]))
                            * j[l][m];
                    }
                }
                let mut t3 = 0.0;
                for l in 0..2 {
                    t3 += d[l] * h[i][l][k];
                }
                let t4 = -cross_sum.dot(gs.da[k][0].scale(alpha0[i]) + gs.da[k][1].scale(beta0[i]))
                    / gs.sqrt_area0;
                s[i][k] = t1 + t2 + t3 + t4;
            }
        }

        SurfaceCoeffs {
            b,
            c,
            h,
            i: i_scalar,
            j,
            d,
            l: lc,
            q,
            r,
            s,
        }
    }

    /// The inverse-metric rows written as the quadratic contraction instead
    /// of the Kronecker form; both expressions must agree.
    pub fn j_quadratic(gs: &GeometrySample) -> [[f64; 2]; 2] {
        let fr = &gs.forms;
        let mut out = [[0.0; 2]; 2];
        for l in 0..2 {
            for m in 0..2 {
                out[l][m] = gs.alpha0[l] * gs.alpha0[m] * fr.E
                    + (gs.beta0[l] * gs.alpha0[m] + gs.alpha0[l] * gs.beta0[m]) * fr.F
                    + gs.beta0[l] * gs.beta0[m] * fr.G;
            }
        }
        out
    }
}

/// Leading-order friction closure `f_R = rho0 c_r1 |u| u` evaluated with the
/// zeroth-order velocity.
#[derive(Clone, Copy, Debug, Default)]
pub struct FrictionSpec {
    pub c_r1: f64,
}

impl FrictionSpec {
    pub fn leading_force(&self, rho0: f64, u0: Vec3) -> Vec3 {
        u0.scale(rho0 * self.c_r1 * u0.norm())
    }
}

/// Families depending on both the parametrization and the gap.
#[derive(Clone, Debug, Default)]
pub struct GapCoeffs {
    /// Body force plus wall-friction contribution `f[i]`.
    pub f: [f64; 2],
    /// Normal-vector expansion direction of the upper surface.
    pub eta: Vec3,
    /// Gap-gradient coupling to first derivatives, `psi[i][k][l]`.
    pub psi: [[[f64; 2]; 2]; 2],
    /// Gap-gradient coupling to zero-order terms, `chi[i][k]`.
    pub chi: [[f64; 3]; 2],
    /// Gap/time curvature coupling.
    pub kappa: [f64; 2],
    /// `kappa` corrected by the gap-rate gradient.
    pub kappa_hat: [f64; 2],
}

impl GapCoeffs {
    /// Evaluates the gap families. `friction_lower`/`friction_upper` are the
    /// leading friction forces on the two walls, `body_force` the local-basis
    /// components of the external force density, `s0` the orientation sign.
    #[allow(clippy::too_many_arguments)]
    pub fn at(
        gs: &GeometrySample,
        sc: &SurfaceCoeffs,
        gap: &GapJet,
        friction_lower: Vec3,
        friction_upper: Vec3,
        body_force: [f64; 2],
        rho0: f64,
        s0: f64,
    ) -> Self {
        let (alpha0, beta0) = (gs.alpha0, gs.beta0);
        let h = gap.h;
        let cross_sum = gs.a1.cross(gs.da[2][1]) + gs.da[2][0].cross(gs.a2);
        let a3xa2 = gs.a3.cross(gs.a2);
        let a1xa3 = gs.a1.cross(gs.a3);

        let eta = a1xa3.scale(gap.h_x[1])
            + gs.a1.cross(gs.da[2][1]).scale(h)
            + a3xa2.scale(gap.h_x[0])
            + gs.da[2][0].cross(gs.a2).scale(h);

        let mut psi = [[[0.0; 2]; 2]; 2];
        for i in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let diag = if i == k {
                        alpha0[l] * gap.h_x[0] + beta0[l] * gap.h_x[1]
                    } else {
                        0.0
                    };
                    let pick = if i == 0 { alpha0[l] } else { beta0[l] };
                    psi[i][k][l] = (diag + gap.h_x[k] * pick) / h;
                }
            }
        }

        let mut chi = [[0.0; 3]; 2];
        for i in 0..2 {
            for k in 0..3 {
                let da_mix = gs.da[k][0].scale(alpha0[i]) + gs.da[k][1].scale(beta0[i]);
                let mut s1 = 0.0;
                let mut s2 = 0.0;
                for l in 0..2 {
                    s1 += sc.h[i][l][k] * alpha0[l];
                    s2 += sc.h[i][l][k] * beta0[l];
                }
                chi[i][k] = (gap.h_x[0] * (s1 - a3xa2.dot(da_mix) / gs.sqrt_area0)
                    + gap.h_x[1] * (s2 - a1xa3.dot(da_mix) / gs.sqrt_area0))
                    / h;
            }
        }

        let vn = gs.normal_velocity;
        let ratio = gs.area1 / gs.area0;
        let mut kappa = [0.0; 2];
        for i in 0..2 {
            let pick = [alpha0[i], beta0[i]];
            let time_term = -(pick[0] * gap.dt_h_hx(0) + pick[1] * gap.dt_h_hx(1)) / (h * h);
            let drift_term = gs.d_normal_velocity[0] * (sc.l[2][0][i] - ratio * pick[0])
                + gs.d_normal_velocity[1] * (sc.l[2][1][i] - ratio * pick[1]);
            let mut second = 0.0;
            for m in 0..2 {
                for l in 0..2 {
                    second += (pick[0] * gs.a1.dot(gs.dda[2][l + m])
                        + pick[1] * gs.a2.dot(gs.dda[2][l + m]))
                        * sc.j[l][m];
                }
            }
            let mut first = 0.0;
            for l in 0..2 {
                first += sc.d[l] * sc.h[i][l][2];
            }
            let tail = -cross_sum.dot(gs.da[2][0].scale(pick[0]) + gs.da[2][1].scale(pick[1]))
                / gs.sqrt_area0;
            kappa[i] = time_term + drift_term + vn * (chi[i][2] + second + first + tail);
        }

        let mut kappa_hat = [0.0; 2];
        for i in 0..2 {
            kappa_hat[i] = kappa[i] - (alpha0[i] * gap.dx_rate(0) + beta0[i] * gap.dx_rate(1));
        }

        let friction_sum = friction_lower + friction_upper;
        let mut f = [0.0; 2];
        for i in 0..2 {
            let dual = gs.a1.scale(alpha0[i]) + gs.a2.scale(beta0[i]);
            f[i] = body_force[i] + s0 / (rho0 * h) * friction_sum.dot(dual);
        }

        GapCoeffs {
            f,
            eta,
            psi,
            chi,
            kappa,
            kappa_hat,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{Cylinder, Paraboloid, Plane, TranslatingPlane};
    use crate::geometry::GeometrySample;

    fn flat_gap() -> GapJet {
        GapJet {
            h: 1.0,
            h_t: 0.0,
            h_x: [0.0, 0.0],
            h_tx: [0.0, 0.0],
        }
    }

    #[test]
    fn static_plane_families_vanish() {
        let gs = GeometrySample::at(&Plane, [0.4, 0.6], 0.0).unwrap();
        let sc = SurfaceCoeffs::at(&gs);
        for i in 0..2 {
            assert_eq!(sc.c[i], 0.0);
            assert_eq!(sc.d[i], 0.0);
            for l in 0..2 {
                assert_eq!(sc.b[i][l], 0.0);
                assert_eq!(sc.r[i][l], 0.0);
                assert_eq!(sc.s[i][l], 0.0);
                for k in 0..3 {
                    assert_eq!(sc.h[i][l][k], 0.0);
                    assert_eq!(sc.l[k][l][i], 0.0);
                }
            }
            for k in 0..3 {
                assert_eq!(sc.q[i][k], 0.0);
            }
        }
        assert_eq!(sc.i, 0.0);
        // The inverse-metric rows reduce to the identity, not zero.
        assert_eq!(sc.j, [[1.0, 0.0], [0.0, 1.0]]);
    }

    #[test]
    fn cylinder_b11_and_h113() {
        // B11 = Ge - Ff = -1 on the unit cylinder. The normal column of H
        // projects d a3 / d xi, whose tangential dot products are the
        // negated second form, so H[1][1][3] = -B11 / A0 = +1.
        let gs = GeometrySample::at(&Cylinder { radius: 1.0 }, [0.9, 0.2], 0.0).unwrap();
        let sc = SurfaceCoeffs::at(&gs);
        assert!((sc.b[0][0] + 1.0).abs() < 1e-13);
        assert!((sc.h[0][0][2] - 1.0).abs() < 1e-13);
        assert!((sc.h[0][0][2] + sc.b[0][0] / gs.area0).abs() < 1e-13);
    }

    #[test]
    fn translating_plane_has_no_tangential_drift() {
        let gs = GeometrySample::at(&TranslatingPlane { speed: 2.0 }, [0.1, 0.3], 0.5).unwrap();
        let sc = SurfaceCoeffs::at(&gs);
        assert_eq!(sc.c, [0.0, 0.0]);
        assert_eq!(sc.q, [[0.0; 3]; 2]);
    }

    #[test]
    fn h_relation_on_curved_chart() {
        // Closed-form cross-relation between the normal column of H and B.
        let gs = GeometrySample::at(&Paraboloid { a: 0.7, b: -0.3 }, [0.35, -0.2], 0.0).unwrap();
        let sc = SurfaceCoeffs::at(&gs);
        for i in 0..2 {
            for l in 0..2 {
                assert!(
                    (sc.h[i][l][2] * gs.area0 + sc.b[i][l]).abs() < 1e-12,
                    "H[{i}][{l}][3] A0 != -B[{i}][{l}]"
                );
            }
        }
    }

    #[test]
    fn static_uniform_gap_families_vanish_on_plane() {
        let gs = GeometrySample::at(&Plane, [0.2, 0.2], 0.0).unwrap();
        let sc = SurfaceCoeffs::at(&gs);
        let gc = GapCoeffs::at(
            &gs,
            &sc,
            &flat_gap(),
            Vec3::ZERO,
            Vec3::ZERO,
            [0.0, 0.0],
            1.0,
            1.0,
        );
        assert_eq!(gc.f, [0.0, 0.0]);
        assert_eq!(gc.eta, Vec3::ZERO);
        assert_eq!(gc.psi, [[[0.0; 2]; 2]; 2]);
        assert_eq!(gc.chi, [[0.0; 3]; 2]);
        assert_eq!(gc.kappa, [0.0, 0.0]);
        assert_eq!(gc.kappa_hat, [0.0, 0.0]);
    }

    #[test]
    fn psi_matches_hand_substitution_on_plane() {
        // h = 1 + 0.1 xi1 at xi1 = 0: psi[1][1][1] = 2 h_x1 / h = 0.2 / h.
        let gs = GeometrySample::at(&Plane, [0.0, 0.0], 0.0).unwrap();
        let sc = SurfaceCoeffs::at(&gs);
        let gap = GapJet {
            h: 1.0,
            h_t: 0.0,
            h_x: [0.1, 0.0],
            h_tx: [0.0, 0.0],
        };
        let gc = GapCoeffs::at(&gs, &sc, &gap, Vec3::ZERO, Vec3::ZERO, [0.0, 0.0], 1.0, 1.0);
        assert!((gc.psi[0][0][0] - 0.2).abs() < 1e-14);
    }

    #[test]
    fn psi_depends_only_on_relative_gradient() {
        let gs = GeometrySample::at(&Paraboloid { a: 0.5, b: 0.2 }, [0.3, 0.1], 0.0).unwrap();
        let sc = SurfaceCoeffs::at(&gs);
        let gap = GapJet {
            h: 0.8,
            h_t: 0.0,
            h_x: [0.2, -0.3],
            h_tx: [0.0, 0.0],
        };
        let lam = 3.7;
        let scaled = GapJet {
            h: lam * 0.8,
            h_t: 0.0,
            h_x: [lam * 0.2, lam * -0.3],
            h_tx: [0.0, 0.0],
        };
        let g1 = GapCoeffs::at(&gs, &sc, &gap, Vec3::ZERO, Vec3::ZERO, [0.0, 0.0], 1.0, 1.0);
        let g2 = GapCoeffs::at(
            &gs,
            &sc,
            &scaled,
            Vec3::ZERO,
            Vec3::ZERO,
            [0.0, 0.0],
            1.0,
            1.0,
        );
        for i in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    assert!((g1.psi[i][k][l] - g2.psi[i][k][l]).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn friction_closure_magnitude() {
        let spec = FrictionSpec { c_r1: 0.25 };
        let force = spec.leading_force(2.0, Vec3::new(3.0, 4.0, 0.0));
        // rho0 c |u| u with |u| = 5.
        assert!((force - Vec3::new(7.5, 10.0, 0.0)).norm() < 1e-12);
    }
}
