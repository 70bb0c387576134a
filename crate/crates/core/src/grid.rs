//! Structured rectangular grid over the parameter domain, node fields, and
//! the second-order finite-difference stencils shared by both solvers.
//!
//! Interior derivatives are centered; Dirichlet edges use one-sided
//! second-order stencils; periodic edges wrap. Periodic directions exclude
//! the duplicate endpoint, so `dx = span / n`; Dirichlet directions include
//! both endpoints with `dx = span / (n - 1)`.

use crate::error::{Error, Result};

use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryKind {
    Dirichlet,
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Xi1,
    Xi2,
}

/// What a field stores; carried along for serialization labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FieldTag {
    Pressure,
    Gap,
    VelocityComponent,
    #[default]
    Coefficient,
}

#[derive(Clone, Copy, Debug)]
pub struct Grid {
    pub n1: usize,
    pub n2: usize,
    pub xi1_range: (f64, f64),
    pub xi2_range: (f64, f64),
    pub bc1: BoundaryKind,
    pub bc2: BoundaryKind,
}

impl Grid {
    pub fn new(
        n1: usize,
        n2: usize,
        xi1_range: (f64, f64),
        xi2_range: (f64, f64),
        bc1: BoundaryKind,
        bc2: BoundaryKind,
    ) -> Result<Self> {
        if n1 < 3 || n2 < 3 {
            return Err(Error::InvalidGrid("need at least 3 nodes per direction"));
        }
        if !(xi1_range.1 > xi1_range.0) || !(xi2_range.1 > xi2_range.0) {
            return Err(Error::InvalidGrid("empty parameter range"));
        }
        Ok(Grid {
            n1,
            n2,
            xi1_range,
            xi2_range,
            bc1,
            bc2,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    #[inline]
    pub fn dx1(&self) -> f64 {
        let span = self.xi1_range.1 - self.xi1_range.0;
        match self.bc1 {
            BoundaryKind::Periodic => span / self.n1 as f64,
            BoundaryKind::Dirichlet => span / (self.n1 - 1) as f64,
        }
    }

    #[inline]
    pub fn dx2(&self) -> f64 {
        let span = self.xi2_range.1 - self.xi2_range.0;
        match self.bc2 {
            BoundaryKind::Periodic => span / self.n2 as f64,
            BoundaryKind::Dirichlet => span / (self.n2 - 1) as f64,
        }
    }

    #[inline]
    pub fn xi1(&self, i: usize) -> f64 {
        self.xi1_range.0 + i as f64 * self.dx1()
    }

    #[inline]
    pub fn xi2(&self, j: usize) -> f64 {
        self.xi2_range.0 + j as f64 * self.dx2()
    }

    /// Row-major index with `xi1` contiguous.
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.n1 + i
    }

    /// True on a Dirichlet edge node (periodic directions have no edges).
    #[inline]
    pub fn on_dirichlet_edge(&self, i: usize, j: usize) -> bool {
        (self.bc1 == BoundaryKind::Dirichlet && (i == 0 || i == self.n1 - 1))
            || (self.bc2 == BoundaryKind::Dirichlet && (j == 0 || j == self.n2 - 1))
    }

    pub fn has_dirichlet_edge(&self) -> bool {
        self.bc1 == BoundaryKind::Dirichlet || self.bc2 == BoundaryKind::Dirichlet
    }

    /// First derivative along `axis`: centered interior, one-sided 3-point
    /// second-order at Dirichlet edges, wrap-around at periodic edges.
    pub fn deriv1(&self, field: &Field, axis: Axis) -> Field {
        self.apply_1d(field, axis, |line, out, dx, periodic| {
            let n = line.len();
            let inv2 = 1.0 / (2.0 * dx);
            if periodic {
                for k in 0..n {
                    let km = (k + n - 1) % n;
                    let kp = (k + 1) % n;
                    out[k] = (line[kp] - line[km]) * inv2;
                }
            } else {
                out[0] = (-3.0 * line[0] + 4.0 * line[1] - line[2]) * inv2;
                for k in 1..n - 1 {
                    out[k] = (line[k + 1] - line[k - 1]) * inv2;
                }
                out[n - 1] = (3.0 * line[n - 1] - 4.0 * line[n - 2] + line[n - 3]) * inv2;
            }
        })
    }

    /// Second derivative along `axis`: centered interior, one-sided 4-point
    /// second-order at Dirichlet edges.
    pub fn deriv2(&self, field: &Field, axis: Axis) -> Field {
        self.apply_1d(field, axis, |line, out, dx, periodic| {
            let n = line.len();
            let inv = 1.0 / (dx * dx);
            if periodic {
                for k in 0..n {
                    let km = (k + n - 1) % n;
                    let kp = (k + 1) % n;
                    out[k] = (line[kp] - 2.0 * line[k] + line[km]) * inv;
                }
            } else if n == 3 {
                // Too short for the 4-point edge stencil; the quadratic
                // through all three nodes fixes f'' everywhere.
                let v = (line[2] - 2.0 * line[1] + line[0]) * inv;
                out.copy_from_slice(&[v, v, v]);
            } else {
                out[0] = (2.0 * line[0] - 5.0 * line[1] + 4.0 * line[2] - line[3]) * inv;
                for k in 1..n - 1 {
                    out[k] = (line[k + 1] - 2.0 * line[k] + line[k - 1]) * inv;
                }
                out[n - 1] =
                    (2.0 * line[n - 1] - 5.0 * line[n - 2] + 4.0 * line[n - 3] - line[n - 4]) * inv;
            }
        })
    }

    /// Mixed derivative as the composition `d/dxi1 (d/dxi2 f)`; the interior
    /// reduces to the standard 4-corner product stencil.
    pub fn cross_deriv(&self, field: &Field) -> Field {
        let d2 = self.deriv1(field, Axis::Xi2);
        self.deriv1(&d2, Axis::Xi1)
    }

    pub fn gradient(&self, field: &Field) -> (Field, Field) {
        (self.deriv1(field, Axis::Xi1), self.deriv1(field, Axis::Xi2))
    }

    pub fn divergence(&self, w1: &Field, w2: &Field) -> Field {
        let d1 = self.deriv1(w1, Axis::Xi1);
        let d2 = self.deriv1(w2, Axis::Xi2);
        d1.zip(&d2, |a, b| a + b)
    }

    /// All three second derivatives `(f_11, f_12, f_22)`.
    pub fn second_derivatives(&self, field: &Field) -> (Field, Field, Field) {
        (
            self.deriv2(field, Axis::Xi1),
            self.cross_deriv(field),
            self.deriv2(field, Axis::Xi2),
        )
    }

    fn apply_1d(
        &self,
        field: &Field,
        axis: Axis,
        kernel: impl Fn(&[f64], &mut [f64], f64, bool),
    ) -> Field {
        let mut out = Field::zeros_like(field);
        match axis {
            Axis::Xi1 => {
                let periodic = self.bc1 == BoundaryKind::Periodic;
                let dx = self.dx1();
                let mut line = vec![0.0; self.n1];
                let mut dline = vec![0.0; self.n1];
                for j in 0..self.n2 {
                    for i in 0..self.n1 {
                        line[i] = field.data[self.idx(i, j)];
                    }
                    kernel(&line, &mut dline, dx, periodic);
                    for i in 0..self.n1 {
                        out.data[self.idx(i, j)] = dline[i];
                    }
                }
            }
            Axis::Xi2 => {
                let periodic = self.bc2 == BoundaryKind::Periodic;
                let dx = self.dx2();
                let mut line = vec![0.0; self.n2];
                let mut dline = vec![0.0; self.n2];
                for i in 0..self.n1 {
                    for j in 0..self.n2 {
                        line[j] = field.data[self.idx(i, j)];
                    }
                    kernel(&line, &mut dline, dx, periodic);
                    for j in 0..self.n2 {
                        out.data[self.idx(i, j)] = dline[j];
                    }
                }
            }
        }
        out
    }

    /// Trapezoidal quadrature weights (all-one in periodic directions).
    pub fn quadrature_weight(&self, i: usize, j: usize) -> f64 {
        let w1 = if self.bc1 == BoundaryKind::Dirichlet && (i == 0 || i == self.n1 - 1) {
            0.5
        } else {
            1.0
        };
        let w2 = if self.bc2 == BoundaryKind::Dirichlet && (j == 0 || j == self.n2 - 1) {
            0.5
        } else {
            1.0
        };
        w1 * w2 * self.dx1() * self.dx2()
    }
}

/// Scalar node values over a grid.
#[derive(Clone, Debug)]
pub struct Field {
    pub data: Vec<f64>,
    pub n1: usize,
    pub n2: usize,
    pub time: f64,
    pub tag: FieldTag,
}

impl Field {
    pub fn zeros(grid: &Grid) -> Self {
        Field {
            data: vec![0.0; grid.len()],
            n1: grid.n1,
            n2: grid.n2,
            time: 0.0,
            tag: FieldTag::default(),
        }
    }

    pub fn zeros_like(other: &Field) -> Self {
        Field {
            data: vec![0.0; other.data.len()],
            n1: other.n1,
            n2: other.n2,
            time: other.time,
            tag: other.tag,
        }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut out = Field::zeros(grid);
        for j in 0..grid.n2 {
            for i in 0..grid.n1 {
                out.data[grid.idx(i, j)] = f(grid.xi1(i), grid.xi2(j));
            }
        }
        out
    }

    /// Ingests raw values, rejecting NaN/Inf.
    pub fn ingest(grid: &Grid, data: Vec<f64>, tag: FieldTag, time: f64) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::InvalidGrid("field length does not match grid"));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteField);
        }
        Ok(Field {
            data,
            n1: grid.n1,
            n2: grid.n2,
            time,
            tag,
        })
    }

    pub fn zip(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Field {
        let mut out = Field::zeros_like(self);
        for (o, (a, b)) in out
            .data
            .iter_mut()
            .zip(self.data.iter().zip(other.data.iter()))
        {
            *o = f(*a, *b);
        }
        out
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        let mut out = Field::zeros_like(self);
        for (o, a) in out.data.iter_mut().zip(self.data.iter()) {
            *o = f(*a);
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}
