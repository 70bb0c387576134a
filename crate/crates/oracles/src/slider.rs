//! Closed-form pressure of the one-dimensional slider bearing.
//!
//! For a flat chart with a gap linear in `xi1`, the pressure solves
//! `(h^3 p')' = 6 mu s h'` with `p(0) = p(1) = 0`. Integrating once gives
//! `h^3 p' = 6 mu s h + q`; for linear `h` both antiderivatives are
//! elementary and the flux constant `q` follows from the boundary values.

/// Evaluable exact slider pressure profile on `xi1 in [0, 1]`.
#[derive(Clone, Copy, Debug)]
pub struct SliderPressure {
    h0: f64,
    slope: f64,
    mu_s: f64,
    flux: f64,
    offset: f64,
}

/// Builds the exact profile for `h(xi1) = h0 + (h1 - h0) xi1`.
pub fn closed_form_slider(h0: f64, h1: f64, s: f64, mu: f64) -> SliderPressure {
    let slope = h1 - h0;
    let mu_s = 6.0 * mu * s;
    if slope.abs() < 1e-300 || mu_s == 0.0 {
        // Parallel plates or no sliding: p' = 0 with zero boundary values.
        return SliderPressure {
            h0,
            slope,
            mu_s: 0.0,
            flux: -mu_s * h0,
            offset: 0.0,
        };
    }
    // p(x) = mu_s I1(x) + q I2(x) + c with
    // I1 = -1 / (slope h), I2 = -1 / (2 slope h^2).
    let i1 = |h: f64| -1.0 / (slope * h);
    let i2 = |h: f64| -1.0 / (2.0 * slope * h * h);
    // p(0) = 0 and p(1) = 0:
    //   mu_s (I1(h1) - I1(h0)) + q (I2(h1) - I2(h0)) = 0
    let flux = -mu_s * (i1(h1) - i1(h0)) / (i2(h1) - i2(h0));
    let offset = -(mu_s * i1(h0) + flux * i2(h0));
    SliderPressure {
        h0,
        slope,
        mu_s,
        flux,
        offset,
    }
}

impl SliderPressure {
    pub fn gap(&self, x: f64) -> f64 {
        self.h0 + self.slope * x
    }

    pub fn pressure(&self, x: f64) -> f64 {
        if self.mu_s == 0.0 {
            return 0.0;
        }
        let h = self.gap(x);
        let i1 = -1.0 / (self.slope * h);
        let i2 = -1.0 / (2.0 * self.slope * h * h);
        self.mu_s * i1 + self.flux * i2 + self.offset
    }

    /// The constant Reynolds flux `h^3 p' - 6 mu s h`.
    pub fn flux_constant(&self) -> f64 {
        self.flux
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_plates_and_no_slide_give_zero() {
        let p = closed_form_slider(1.5, 1.5, 1.0, 1.0);
        assert_eq!(p.pressure(0.3), 0.0);
        let p = closed_form_slider(2.0, 1.0, 0.0, 1.0);
        assert_eq!(p.pressure(0.7), 0.0);
    }

    #[test]
    fn reference_slider_profile() {
        // h = 2 - xi1, s = 1, mu = 1: hand integration gives
        // p = 6/h - 4/h^2 - 2 with peak 0.25 at h = 4/3.
        let p = closed_form_slider(2.0, 1.0, 1.0, 1.0);
        for x in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let h = 2.0 - x;
            let want = 6.0 / h - 4.0 / (h * h) - 2.0;
            assert!((p.pressure(x) - want).abs() < 1e-12, "x = {x}");
        }
        assert!((p.pressure(2.0 / 3.0) - 0.25).abs() < 1e-12);
        assert_eq!(p.pressure(0.0), 0.0);
        assert_eq!(p.pressure(1.0), 0.0);
        // Converging gap builds positive pressure with an interior peak.
        assert!(p.pressure(0.5) > 0.0);
    }

    #[test]
    fn satisfies_the_ode_by_differencing() {
        let p = closed_form_slider(2.0, 1.0, 1.0, 1.0);
        let d = 1e-5;
        for x in [0.2, 0.5, 0.8] {
            let h = p.gap(x);
            let dp = (p.pressure(x + d) - p.pressure(x - d)) / (2.0 * d);
            let lhs = h * h * h * dp;
            let rhs = 6.0 * h + p.flux_constant();
            assert!((lhs - rhs).abs() < 1e-5, "x = {x}: {lhs} vs {rhs}");
        }
    }
}
