//! The gap field `h(xi1, xi2, t)` separating the two surfaces, with the
//! derivative data the coefficient families consume.

use crate::error::{Error, Result};
use crate::grid::{Field, FieldTag, Grid};

/// Gap data at one point: value, time derivative, spatial gradient and the
/// mixed time-space derivatives.
#[derive(Clone, Copy, Debug)]
pub struct GapJet {
    pub h: f64,
    pub h_t: f64,
    pub h_x: [f64; 2],
    pub h_tx: [f64; 2],
}

impl GapJet {
    /// `d/dt (h dh/dxi_l)`, the combination entering the curvature-time
    /// coupling coefficient.
    #[inline]
    pub fn dt_h_hx(&self, l: usize) -> f64 {
        self.h_t * self.h_x[l] + self.h * self.h_tx[l]
    }

    /// `d/dxi_l ((2/h) dh/dt)`.
    #[inline]
    pub fn dx_rate(&self, l: usize) -> f64 {
        2.0 * (self.h_tx[l] * self.h - self.h_t * self.h_x[l]) / (self.h * self.h)
    }
}

/// Gap value and derivative fields sampled on a grid.
///
/// Spatial and mixed derivatives are formed with the grid stencils, so a gap
/// built from a state field stays consistent with the discretization order.
#[derive(Clone, Debug)]
pub struct GapTables {
    pub h: Field,
    pub h_t: Field,
    pub h_x1: Field,
    pub h_x2: Field,
    pub h_tx1: Field,
    pub h_tx2: Field,
    pub floor: f64,
}

impl GapTables {
    /// Builds the tables from a gap field and its time derivative, taking
    /// spatial derivatives discretely. Errors when the gap dips below the
    /// positive floor.
    pub fn from_fields(grid: &Grid, h: Field, h_t: Field, floor: f64) -> Result<Self> {
        if let Some(&bad) = h.data.iter().find(|v| !v.is_finite() || **v < floor) {
            return Err(Error::GapTooSmall { h: bad, floor });
        }
        let (h_x1, h_x2) = grid.gradient(&h);
        let (h_tx1, h_tx2) = grid.gradient(&h_t);
        Ok(GapTables {
            h,
            h_t,
            h_x1,
            h_x2,
            h_tx1,
            h_tx2,
            floor,
        })
    }

    /// Samples analytic callbacks for the gap and its time derivative.
    pub fn from_functions(
        grid: &Grid,
        t: f64,
        h: impl Fn(f64, f64, f64) -> f64,
        h_t: impl Fn(f64, f64, f64) -> f64,
        floor: f64,
    ) -> Result<Self> {
        let mut hf = Field::from_fn(grid, |x1, x2| h(x1, x2, t));
        let mut ht = Field::from_fn(grid, |x1, x2| h_t(x1, x2, t));
        hf.tag = FieldTag::Gap;
        hf.time = t;
        ht.tag = FieldTag::Gap;
        ht.time = t;
        Self::from_fields(grid, hf, ht, floor)
    }

    #[inline]
    pub fn jet(&self, idx: usize) -> GapJet {
        GapJet {
            h: self.h.data[idx],
            h_t: self.h_t.data[idx],
            h_x: [self.h_x1.data[idx], self.h_x2.data[idx]],
            h_tx: [self.h_tx1.data[idx], self.h_tx2.data[idx]],
        }
    }
}
