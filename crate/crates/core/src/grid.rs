//! Uniform 1-D grids and non-negative functions sampled on them.
//!
//! [`GridFunction`] is the universal carrier in this crate: error densities,
//! smoothed approximants, and rearrangements all live on a uniform grid and
//! are integrated by the composite trapezoidal rule. Trapezoid (rather than
//! Simpson) is deliberate: it is exact on the piecewise-linear test densities
//! (uniform plateaus, triangles) that several analytic cross-checks rely on,
//! provided breakpoints fall on or halfway between samples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack when deciding whether a shift is a whole number of grid steps.
const LATTICE_EPS: f64 = 1e-9;

/// A uniform grid on `[x_min, x_max]` with `n >= 2` samples.
///
/// Sample abscissae are `x_min + i * delta` with `delta = (x_max - x_min) / (n - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::NonFinite("grid endpoints must be finite".into()));
        }
        if x_min >= x_max {
            return Err(Error::InvalidParameter(format!(
                "grid requires x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid requires at least 2 samples, got {n}"
            )));
        }
        Ok(Self { x_min, x_max, n })
    }

    /// Grid symmetric about zero: `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn span(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn delta(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    /// Abscissa of sample `i`.
    pub fn x(&self, i: usize) -> f64 {
        debug_assert!(i < self.n);
        self.x_min + i as f64 * self.delta()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }

    /// If `shift` is a whole number of grid steps (within rounding), the step count.
    pub fn lattice_steps(&self, shift: f64) -> Option<i64> {
        let ratio = shift / self.delta();
        let k = ratio.round();
        if (ratio - k).abs() <= LATTICE_EPS * ratio.abs().max(1.0) {
            Some(k as i64)
        } else {
            None
        }
    }
}

/// A non-negative function sampled on a [`Grid`].
///
/// Construction validates that all values are finite and non-negative; every
/// operation afterwards can assume a well-formed input.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "grid has {} samples but {} values were given",
                grid.len(),
                values.len()
            )));
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("value[{i}] = {v}")));
            }
            if v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "values must be non-negative, value[{i}] = {v}"
                )));
            }
        }
        Ok(Self { grid, values })
    }

    /// Sample `f` at every grid point. `f` must be non-negative and finite on the grid.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.points().map(f).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Linear interpolation between neighbouring samples; zero outside the support.
    pub fn value_at(&self, x: f64) -> f64 {
        let g = &self.grid;
        if x < g.x_min() || x > g.x_max() {
            return 0.0;
        }
        let t = (x - g.x_min()) / g.delta();
        let i = t.floor() as usize;
        if i + 1 >= g.len() {
            return self.values[g.len() - 1];
        }
        let frac = t - i as f64;
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }

    /// Composite trapezoidal approximation of the integral over the grid.
    pub fn integrate(&self) -> f64 {
        self.integrate_with(|_, v| v)
    }

    /// Trapezoidal integral of `f(x_i, v_i)` over the grid.
    ///
    /// The raw samples are summed first and scaled by `delta` at the end, which
    /// keeps rounding independent of the grid's absolute position.
    pub fn integrate_with(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        let g = &self.grid;
        let n = g.len();
        let mut sum = 0.5 * (f(g.x(0), self.values[0]) + f(g.x(n - 1), self.values[n - 1]));
        for i in 1..n - 1 {
            sum += f(g.x(i), self.values[i]);
        }
        sum * g.delta()
    }

    /// Trapezoidal approximation of the integral of `f(x)^alpha`, with `0^alpha = 0`.
    pub fn power_integral(&self, alpha: f64) -> Result<f64> {
        check_power_order(alpha)?;
        Ok(self.integrate_with(|_, v| v.powf(alpha)))
    }

    /// Resample `x -> f(x + delta_shift)` onto the same grid.
    ///
    /// Shifts that are a whole number of grid steps move samples by index so
    /// values survive bit-for-bit; otherwise neighbouring samples are linearly
    /// interpolated. Points that map outside the support become zero.
    pub fn shift_resample(&self, delta_shift: f64) -> Result<GridFunction> {
        if !delta_shift.is_finite() {
            return Err(Error::NonFinite(format!("shift = {delta_shift}")));
        }
        if delta_shift.abs() >= self.grid.span() {
            return Err(Error::InvalidParameter(format!(
                "shift {delta_shift} exceeds the grid span {}",
                self.grid.span()
            )));
        }
        let n = self.grid.len();
        let values = if let Some(k) = self.grid.lattice_steps(delta_shift) {
            (0..n)
                .map(|i| {
                    let j = i as i64 + k;
                    if j < 0 || j >= n as i64 {
                        0.0
                    } else {
                        self.values[j as usize]
                    }
                })
                .collect()
        } else {
            self.grid
                .points()
                .map(|x| self.value_at(x + delta_shift))
                .collect()
        };
        GridFunction::new(self.grid, values)
    }

    /// `L1` distance to another function on the same grid (trapezoidal).
    pub fn l1_distance(&self, other: &GridFunction) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::InvalidParameter(
                "l1_distance requires both functions on the same grid".into(),
            ));
        }
        let g = &self.grid;
        let n = g.len();
        let d = |i: usize| (self.values[i] - other.values[i]).abs();
        let mut sum = 0.5 * (d(0) + d(n - 1));
        for i in 1..n - 1 {
            sum += d(i);
        }
        Ok(sum * g.delta())
    }
}

/// Validate the order of a power integral.
pub(crate) fn check_power_order(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "power integral requires alpha > 0, got {alpha}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn unit_plateau() -> GridFunction {
        // height 1 on [0, 1]
        let grid = Grid::new(0.0, 1.0, 101).unwrap();
        GridFunction::from_fn(grid, |_| 1.0).unwrap()
    }

    #[test]
    fn grid_rejects_bad_arguments() {
        assert!(Grid::new(1.0, 0.0, 10).is_err());
        assert!(Grid::new(0.0, 1.0, 1).is_err());
        assert!(Grid::new(f64::NAN, 1.0, 10).is_err());
    }

    #[test]
    fn grid_abscissae_are_affine_in_index() {
        let g = Grid::new(-2.0, 2.0, 9).unwrap();
        assert_eq!(g.delta(), 0.5);
        assert_eq!(g.x(0), -2.0);
        assert_eq!(g.x(4), 0.0);
        assert_eq!(g.x(8), 2.0);
    }

    #[test]
    fn rejects_negative_and_non_finite_values() {
        let g = Grid::new(0.0, 1.0, 3).unwrap();
        assert!(GridFunction::new(g, vec![0.0, -1.0, 0.0]).is_err());
        assert!(GridFunction::new(g, vec![0.0, f64::NAN, 0.0]).is_err());
        assert!(GridFunction::new(g, vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn integrate_constant_one_is_exact() {
        assert_eq!(unit_plateau().integrate(), 1.0);
    }

    #[test]
    fn integrate_zero_function() {
        let g = Grid::new(-1.0, 1.0, 33).unwrap();
        let f = GridFunction::from_fn(g, |_| 0.0).unwrap();
        assert_eq!(f.integrate(), 0.0);
    }

    #[test]
    fn integrate_standard_normal_mass() {
        // Oracle: the closed-form CDF gives mass 1 - 2*Phi(-10) = 1 - 3e-23.
        let g = Grid::new(-10.0, 10.0, 16385).unwrap();
        let f = GridFunction::from_fn(g, |x| {
            (-(x * x) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt()
        })
        .unwrap();
        assert_abs_diff_eq!(f.integrate(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn power_integral_unit_plateau_is_one_for_any_order() {
        let f = unit_plateau();
        for alpha in [0.25, 0.5, 1.0, 2.0, 3.7] {
            assert_eq!(f.power_integral(alpha).unwrap(), 1.0);
        }
    }

    #[test]
    fn power_integral_half_height_plateau() {
        // height 1/2 on length 2: integral of (1/2)^2 over length 2 = 0.5
        let g = Grid::new(0.0, 2.0, 201).unwrap();
        let f = GridFunction::from_fn(g, |_| 0.5).unwrap();
        assert_abs_diff_eq!(f.power_integral(2.0).unwrap(), 0.5, epsilon = 1e-15);
        // alpha = 1/2: 2 * (1/2)^(1/2)
        assert_abs_diff_eq!(
            f.power_integral(0.5).unwrap(),
            2.0 * 0.5f64.sqrt(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn power_integral_standard_normal_alpha_two() {
        // Closed form: V_alpha(N(0,1)) = (2 pi)^((1-alpha)/2) / sqrt(alpha);
        // at alpha = 2 this is 1/(2 sqrt(pi)), cross-checked by quadrature.
        let g = Grid::new(-10.0, 10.0, 16385).unwrap();
        let f = GridFunction::from_fn(g, |x| {
            (-(x * x) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt()
        })
        .unwrap();
        assert_abs_diff_eq!(
            f.power_integral(2.0).unwrap(),
            0.282_094_791_773_878_14,
            epsilon = 1e-6
        );
    }

    #[test]
    fn power_integral_rejects_bad_alpha() {
        let f = unit_plateau();
        assert!(f.power_integral(0.0).is_err());
        assert!(f.power_integral(-1.0).is_err());
        assert!(f.power_integral(f64::NAN).is_err());
    }

    #[test]
    fn shift_by_zero_is_identity() {
        let g = Grid::new(-1.0, 1.0, 65).unwrap();
        let f = GridFunction::from_fn(g, |x| (1.0 - x.abs()).max(0.0)).unwrap();
        assert_eq!(f.shift_resample(0.0).unwrap().values(), f.values());
    }

    #[test]
    fn lattice_shift_moves_indices_and_zero_fills() {
        let g = Grid::new(0.0, 1.0, 5).unwrap();
        let f = GridFunction::new(g, vec![1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let shifted = f.shift_resample(2.0 * g.delta()).unwrap();
        assert_eq!(shifted.values(), &[3.0, 4.0, 5.0, 0.0, 0.0]);
        let back = f.shift_resample(-g.delta()).unwrap();
        assert_eq!(back.values(), &[0.0, 1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn non_lattice_shift_matches_analytic_triangle() {
        // triangle with peak at 0; shifting by +0.5 relocates the peak to -0.5
        let g = Grid::new(-4.0, 4.0, 4097).unwrap();
        let tri = |x: f64| (1.0 - x.abs()).max(0.0);
        let f = GridFunction::from_fn(g, tri).unwrap();
        let shift = 0.5 + 0.25 * g.delta(); // deliberately off-lattice
        let shifted = f.shift_resample(shift).unwrap();
        for (i, x) in g.points().enumerate() {
            // interior points: piecewise-linear interpolation of a piecewise-linear
            // function between lattice points is exact away from the kink cells
            let expected = tri(x + shift);
            assert!(
                (shifted.values()[i] - expected).abs() <= g.delta(),
                "x={x} got {} want {expected}",
                shifted.values()[i]
            );
        }
        let peak_idx = shifted
            .values()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert!((g.x(peak_idx) - (-0.5)).abs() <= g.delta());
    }

    #[test]
    fn lattice_aligned_triangle_shift_is_exact() {
        let g = Grid::new(-4.0, 4.0, 4097).unwrap();
        let tri = |x: f64| (1.0 - x.abs()).max(0.0);
        let f = GridFunction::from_fn(g, tri).unwrap();
        let shift = 256.0 * g.delta(); // = 0.5 exactly on this grid
        let shifted = f.shift_resample(shift).unwrap();
        for (i, x) in g.points().enumerate() {
            assert_abs_diff_eq!(shifted.values()[i], tri(x + shift), epsilon = 1e-12);
        }
    }

    #[test]
    fn power_integral_invariant_under_lattice_shift() {
        // compact support: the boundary samples are exactly zero, so no mass
        // is clipped and the shifted sum reuses the same floats in order
        let g = Grid::new(-8.0, 8.0, 2049).unwrap();
        let f = GridFunction::from_fn(g, |x| (1.0 - x.abs()).max(0.0)).unwrap();
        let shifted = f.shift_resample(37.0 * g.delta()).unwrap();
        for alpha in [0.5, 2.0, 3.0] {
            assert_eq!(
                f.power_integral(alpha).unwrap(),
                shifted.power_integral(alpha).unwrap()
            );
        }
    }

    #[test]
    fn shift_wider_than_span_is_rejected() {
        let f = unit_plateau();
        assert!(f.shift_resample(1.5).is_err());
    }

    #[test]
    fn refinement_error_shrinks_quadratically() {
        // quadratic bump with off-lattice feet so the trapezoid error is O(delta^2)
        let bump = |x: f64| (1.0 - x * x).max(0.0);
        let exact = 4.0 / 3.0;
        let err = |n: usize| {
            let g = Grid::new(-2.0 + 0.31 * 4.0 / (n - 1) as f64, 2.0, n).unwrap();
            (GridFunction::from_fn(g, bump).unwrap().integrate() - exact).abs()
        };
        let e1 = err(2001);
        let e2 = err(4001);
        assert!(e1 > 0.0 && e2 > 0.0);
        let ratio = e1 / e2;
        assert!(
            (2.0..8.0).contains(&ratio),
            "expected ~4x error reduction per halving, got {ratio}"
        );
    }

    #[test]
    fn value_at_interpolates_and_clamps() {
        let g = Grid::new(0.0, 1.0, 3).unwrap();
        let f = GridFunction::new(g, vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(f.value_at(0.25), 0.5);
        assert_eq!(f.value_at(1.0), 0.0);
        assert_eq!(f.value_at(-0.1), 0.0);
        assert_eq!(f.value_at(1.1), 0.0);
    }
}
