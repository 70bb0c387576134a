//! Parametric charts of the lower bounding surface.
//!
//! A chart supplies the map `X(xi1, xi2, t)` together with every partial
//! derivative the downstream coefficient algebra consumes: spatial
//! derivatives to third order, the surface velocity, and the mixed
//! time-space derivatives. Built-in charts provide these analytically; the
//! [`FdChart`] wrapper differentiates a position-only chart with centered
//! differences for callers that accept the accuracy loss.

use crate::math::{FloatExt, Vec3};

/// All chart derivatives at one parameter point.
///
/// Symmetric derivative families are stored once:
/// `d2[i + j]` holds d²X/dxi_i dxi_j and `d3[i + j + k]` holds
/// d³X/dxi_i dxi_j dxi_k for zero-based directions.
#[derive(Clone, Copy, Debug, Default)]
pub struct ChartJet {
    pub x: Vec3,
    /// dX/dxi_i
    pub d1: [Vec3; 2],
    /// d²X/dxi_i dxi_j, indexed by i + j
    pub d2: [Vec3; 3],
    /// d³X/dxi_i dxi_j dxi_k, indexed by i + j + k
    pub d3: [Vec3; 4],
    /// dX/dt
    pub dt: Vec3,
    /// d²X/dt dxi_i
    pub dt_d1: [Vec3; 2],
}

impl ChartJet {
    #[inline]
    pub fn d2_at(&self, i: usize, j: usize) -> Vec3 {
        self.d2[i + j]
    }

    #[inline]
    pub fn d3_at(&self, i: usize, j: usize, k: usize) -> Vec3 {
        self.d3[i + j + k]
    }
}

/// Parameter rectangle the chart is meant to be evaluated on.
#[derive(Clone, Copy, Debug)]
pub struct ChartDomain {
    pub xi1: (f64, f64),
    pub xi2: (f64, f64),
}

impl ChartDomain {
    pub const UNIT: ChartDomain = ChartDomain {
        xi1: (0.0, 1.0),
        xi2: (0.0, 1.0),
    };
}

/// A time-dependent parametric surface, C3 in the parameters and C1 in time.
pub trait SurfaceChart {
    fn jet(&self, xi1: f64, xi2: f64, t: f64) -> ChartJet;

    /// Natural parameter rectangle (a config may restrict or override it).
    fn domain(&self) -> ChartDomain {
        ChartDomain::UNIT
    }

    /// True when every jet component is independent of `t`, which lets the
    /// solvers cache geometry tables across time steps.
    fn time_invariant(&self) -> bool {
        false
    }
}

/// The identity chart `X = (xi1, xi2, 0)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Plane;

impl SurfaceChart for Plane {
    fn jet(&self, xi1: f64, xi2: f64, _t: f64) -> ChartJet {
        ChartJet {
            x: Vec3::new(xi1, xi2, 0.0),
            d1: [Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)],
            ..ChartJet::default()
        }
    }

    fn time_invariant(&self) -> bool {
        true
    }
}

/// `X = (R cos xi1, R sin xi1, xi2)`, axis along z.
#[derive(Clone, Copy, Debug)]
pub struct Cylinder {
    pub radius: f64,
}

impl SurfaceChart for Cylinder {
    fn jet(&self, xi1: f64, xi2: f64, _t: f64) -> ChartJet {
        let r = self.radius;
        let (s, c) = (xi1.sin(), xi1.cos());
        let radial = Vec3::new(c, s, 0.0);
        let tangent = Vec3::new(-s, c, 0.0);
        ChartJet {
            x: Vec3::new(r * c, r * s, xi2),
            d1: [tangent * r, Vec3::new(0.0, 0.0, 1.0)],
            d2: [radial * -r, Vec3::ZERO, Vec3::ZERO],
            d3: [tangent * -r, Vec3::ZERO, Vec3::ZERO, Vec3::ZERO],
            ..ChartJet::default()
        }
    }

    fn domain(&self) -> ChartDomain {
        ChartDomain {
            xi1: (0.0, core::f64::consts::TAU),
            xi2: (0.0, 1.0),
        }
    }

    fn time_invariant(&self) -> bool {
        true
    }
}

/// `X = R (sin xi1 cos xi2, sin xi1 sin xi2, cos xi1)`; regular away from the
/// poles.
#[derive(Clone, Copy, Debug)]
pub struct Sphere {
    pub radius: f64,
}

impl SurfaceChart for Sphere {
    fn jet(&self, xi1: f64, xi2: f64, _t: f64) -> ChartJet {
        let r = self.radius;
        let (s1, c1) = (xi1.sin(), xi1.cos());
        let (s2, c2) = (xi2.sin(), xi2.cos());
        let u = Vec3::new(s1 * c2, s1 * s2, c1);
        let u1 = Vec3::new(c1 * c2, c1 * s2, -s1);
        let u2 = Vec3::new(-s1 * s2, s1 * c2, 0.0);
        let u11 = -u;
        let u12 = Vec3::new(-c1 * s2, c1 * c2, 0.0);
        let u22 = Vec3::new(-s1 * c2, -s1 * s2, 0.0);
        let d111 = -u1;
        let d112 = -u2;
        let d122 = Vec3::new(-c1 * c2, -c1 * s2, 0.0);
        let d222 = Vec3::new(s1 * s2, -s1 * c2, 0.0);
        ChartJet {
            x: u * r,
            d1: [u1 * r, u2 * r],
            d2: [u11 * r, u12 * r, u22 * r],
            d3: [d111 * r, d112 * r, d122 * r, d222 * r],
            ..ChartJet::default()
        }
    }

    fn domain(&self) -> ChartDomain {
        ChartDomain {
            xi1: (0.4, core::f64::consts::PI - 0.4),
            xi2: (0.0, core::f64::consts::TAU),
        }
    }

    fn time_invariant(&self) -> bool {
        true
    }
}

/// `X = (xi1, xi2, a xi1^2 + b xi2^2)`.
#[derive(Clone, Copy, Debug)]
pub struct Paraboloid {
    pub a: f64,
    pub b: f64,
}

impl SurfaceChart for Paraboloid {
    fn jet(&self, xi1: f64, xi2: f64, _t: f64) -> ChartJet {
        ChartJet {
            x: Vec3::new(xi1, xi2, self.a * xi1 * xi1 + self.b * xi2 * xi2),
            d1: [
                Vec3::new(1.0, 0.0, 2.0 * self.a * xi1),
                Vec3::new(0.0, 1.0, 2.0 * self.b * xi2),
            ],
            d2: [
                Vec3::new(0.0, 0.0, 2.0 * self.a),
                Vec3::ZERO,
                Vec3::new(0.0, 0.0, 2.0 * self.b),
            ],
            ..ChartJet::default()
        }
    }

    fn domain(&self) -> ChartDomain {
        ChartDomain {
            xi1: (-1.0, 1.0),
            xi2: (-1.0, 1.0),
        }
    }

    fn time_invariant(&self) -> bool {
        true
    }
}

/// A flat chart translating rigidly along its normal: `X = (xi1, xi2, c t)`.
#[derive(Clone, Copy, Debug)]
pub struct TranslatingPlane {
    pub speed: f64,
}

impl SurfaceChart for TranslatingPlane {
    fn jet(&self, xi1: f64, xi2: f64, t: f64) -> ChartJet {
        ChartJet {
            x: Vec3::new(xi1, xi2, self.speed * t),
            d1: [Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)],
            dt: Vec3::new(0.0, 0.0, self.speed),
            ..ChartJet::default()
        }
    }

    // The jet is constant in t apart from the position itself, which no
    // geometric quantity consumes.
    fn time_invariant(&self) -> bool {
        true
    }
}

/// A chart that only knows positions; see [`FdChart`].
pub trait PointChart {
    fn position(&self, xi1: f64, xi2: f64, t: f64) -> Vec3;
    fn domain(&self) -> ChartDomain {
        ChartDomain::UNIT
    }
}

/// Finite-difference fallback for position-only charts.
///
/// First derivatives use the 5-point centered stencil with step
/// `cbrt(machine epsilon) * scale`. Higher derivatives need larger steps to
/// stay above the rounding floor (`eps/h^2` for second, `eps/h^3` for third
/// order), so those stencils use `eps^(1/6)` and `eps^(1/5)` steps. Accuracy
/// is far below the analytic charts; this wrapper is opt-in.
pub struct FdChart<C: PointChart> {
    pub inner: C,
    step1_xi: f64,
    step1_t: f64,
    step2: f64,
    step3: f64,
}

impl<C: PointChart> FdChart<C> {
    pub fn new(inner: C, coordinate_scale: f64, time_scale: f64) -> Self {
        let eps = f64::EPSILON;
        FdChart {
            inner,
            step1_xi: eps.powf(1.0 / 3.0) * coordinate_scale,
            step1_t: eps.powf(1.0 / 3.0) * time_scale,
            step2: eps.powf(1.0 / 6.0) * coordinate_scale,
            step3: eps.powf(1.0 / 5.0) * coordinate_scale,
        }
    }

    fn pos(&self, p: [f64; 3]) -> Vec3 {
        self.inner.position(p[0], p[1], p[2])
    }

    /// 5-point centered first derivative along `axis` with step `h`.
    fn diff1_step(&self, p: [f64; 3], axis: usize, h: f64) -> Vec3 {
        let at = |off: f64| {
            let mut q = p;
            q[axis] += off;
            self.pos(q)
        };
        let f_m2 = at(-2.0 * h);
        let f_m1 = at(-h);
        let f_p1 = at(h);
        let f_p2 = at(2.0 * h);
        (f_m2 - f_p2 + (f_p1 - f_m1) * 8.0).scale(1.0 / (12.0 * h))
    }

    fn diff1(&self, p: [f64; 3], axis: usize) -> Vec3 {
        let h = if axis == 2 {
            self.step1_t
        } else {
            self.step1_xi
        };
        self.diff1_step(p, axis, h)
    }

    /// Second derivative: 5-point pure stencil on one axis, nested 5-point
    /// first derivatives for mixed pairs.
    fn diff2(&self, p: [f64; 3], axis_a: usize, axis_b: usize) -> Vec3 {
        let h = self.step2;
        if axis_a == axis_b {
            let at = |off: f64| {
                let mut q = p;
                q[axis_a] += off;
                self.pos(q)
            };
            let f_m2 = at(-2.0 * h);
            let f_m1 = at(-h);
            let f_0 = self.pos(p);
            let f_p1 = at(h);
            let f_p2 = at(2.0 * h);
            (-(f_m2 + f_p2) + (f_m1 + f_p1) * 16.0 - f_0 * 30.0).scale(1.0 / (12.0 * h * h))
        } else {
            let shift = |off: f64| {
                let mut q = p;
                q[axis_a] += off;
                self.diff1_step(q, axis_b, h)
            };
            let f_m2 = shift(-2.0 * h);
            let f_m1 = shift(-h);
            let f_p1 = shift(h);
            let f_p2 = shift(2.0 * h);
            (f_m2 - f_p2 + (f_p1 - f_m1) * 8.0).scale(1.0 / (12.0 * h))
        }
    }

    fn diff3(&self, p: [f64; 3], a: usize, b: usize, c: usize) -> Vec3 {
        let h = self.step3;
        if a == b && b == c {
            // Centered 5-point third derivative, O(h^2).
            let at = |off: f64| {
                let mut q = p;
                q[a] += off;
                self.pos(q)
            };
            let f_m2 = at(-2.0 * h);
            let f_m1 = at(-h);
            let f_p1 = at(h);
            let f_p2 = at(2.0 * h);
            (f_p2 - f_m2 + (f_m1 - f_p1) * 2.0).scale(1.0 / (2.0 * h * h * h))
        } else {
            // Outer centered difference of an inner second derivative.
            let shift = |off: f64| {
                let mut q = p;
                q[a] += off;
                self.diff2(q, b, c)
            };
            (shift(h) - shift(-h)).scale(1.0 / (2.0 * h))
        }
    }
}

impl<C: PointChart> SurfaceChart for FdChart<C> {
    fn jet(&self, xi1: f64, xi2: f64, t: f64) -> ChartJet {
        let p = [xi1, xi2, t];
        ChartJet {
            x: self.pos(p),
            d1: [self.diff1(p, 0), self.diff1(p, 1)],
            d2: [
                self.diff2(p, 0, 0),
                self.diff2(p, 0, 1),
                self.diff2(p, 1, 1),
            ],
            d3: [
                self.diff3(p, 0, 0, 0),
                self.diff3(p, 0, 0, 1),
                self.diff3(p, 0, 1, 1),
                self.diff3(p, 1, 1, 1),
            ],
            dt: self.diff1(p, 2),
            dt_d1: [self.diff2(p, 2, 0), self.diff2(p, 2, 1)],
        }
    }

    fn domain(&self) -> ChartDomain {
        self.inner.domain()
    }
}
