//! Conditionally symmetric and unimodal (CSUM) conditional densities with
//! finite discrete observation weights, and the error mixtures they induce.
//!
//! A family holds `k` weighted conditional densities `p(x|y_i)`. Choosing an
//! estimator value per observation is a shift assignment `g = (g_1, ..., g_k)`;
//! the error density is the weighted mixture of the shifted conditionals
//! sampled on the family grid. Parametric shapes are evaluated analytically at
//! shifted arguments, so no interpolation error enters the mixture; tabulated
//! shapes fall back to linear interpolation.

use statrs::function::erf;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};

/// Mass a component may place outside the shift-adequate part of the grid.
pub const SUPPORT_ADEQUACY_EPS: f64 = 1e-8;

/// Slack when checking shift admissibility against `s_max`.
const SHIFT_EPS: f64 = 1e-9;

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// The analytic CSUM shape kinds.
///
/// Every kind is symmetric about its location and non-increasing away from it,
/// so the conditional mean, median, and mode coincide at the location.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeKind {
    Gaussian,
    Laplace,
    Uniform,
    Triangular,
}

/// An analytic CSUM density.
///
/// Scale conventions: `Gaussian` uses the standard deviation, `Laplace` the
/// diversity parameter `b`, `Uniform` the full support width (support
/// `[loc - scale/2, loc + scale/2]`, height `1/scale`), and `Triangular` the
/// support radius (support `[loc - scale, loc + scale]`, peak `1/scale`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsumShape {
    pub kind: ShapeKind,
    pub location: f64,
    pub scale: f64,
}

impl CsumShape {
    pub fn new(kind: ShapeKind, location: f64, scale: f64) -> Result<Self> {
        if !location.is_finite() || !scale.is_finite() {
            return Err(Error::NonFinite(format!(
                "shape parameters must be finite, got location {location}, scale {scale}"
            )));
        }
        if scale <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "shape scale must be positive, got {scale}"
            )));
        }
        Ok(Self {
            kind,
            location,
            scale,
        })
    }

    pub fn gaussian(location: f64, scale: f64) -> Result<Self> {
        Self::new(ShapeKind::Gaussian, location, scale)
    }

    pub fn laplace(location: f64, scale: f64) -> Result<Self> {
        Self::new(ShapeKind::Laplace, location, scale)
    }

    pub fn uniform(location: f64, scale: f64) -> Result<Self> {
        Self::new(ShapeKind::Uniform, location, scale)
    }

    pub fn triangular(location: f64, scale: f64) -> Result<Self> {
        Self::new(ShapeKind::Triangular, location, scale)
    }

    /// Density at `x`. Symmetry about the location is bit-exact because the
    /// evaluation goes through `|x - location|`.
    ///
    /// The uniform takes the value `h/2` exactly at its support edges; with
    /// edges on grid points this keeps trapezoidal mass exact.
    pub fn density(&self, x: f64) -> f64 {
        let t = (x - self.location).abs();
        self.density_centered(t)
    }

    /// Density at distance `t >= 0` from the location.
    fn density_centered(&self, t: f64) -> f64 {
        let s = self.scale;
        match self.kind {
            ShapeKind::Gaussian => (-(t * t) / (2.0 * s * s)).exp() / (s * SQRT_2PI),
            ShapeKind::Laplace => (-t / s).exp() / (2.0 * s),
            ShapeKind::Uniform => {
                let half = 0.5 * s;
                if t < half {
                    1.0 / s
                } else if t == half {
                    0.5 / s
                } else {
                    0.0
                }
            }
            ShapeKind::Triangular => {
                if t >= s {
                    0.0
                } else {
                    (1.0 - t / s) / s
                }
            }
        }
    }

    pub fn peak(&self) -> f64 {
        self.density_centered(0.0)
    }

    /// Mass on `[0, t]` of the density recentred at zero (half-line CDF).
    fn centered_mass_to(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        let s = self.scale;
        match self.kind {
            ShapeKind::Gaussian => 0.5 * erf::erf(t / (s * std::f64::consts::SQRT_2)),
            ShapeKind::Laplace => 0.5 * (1.0 - (-t / s).exp()),
            ShapeKind::Uniform => t.min(0.5 * s) / s,
            ShapeKind::Triangular => {
                let t = t.min(s);
                (t - t * t / (2.0 * s)) / s
            }
        }
    }

    /// Mass of the recentred density on `[u, v]`, `0 <= u <= v`.
    pub fn centered_mass(&self, u: f64, v: f64) -> f64 {
        self.centered_mass_to(v) - self.centered_mass_to(u)
    }

    /// Mass outside `[location - r, location + r]`.
    pub fn tail_mass_beyond(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 1.0;
        }
        let s = self.scale;
        match self.kind {
            ShapeKind::Gaussian => erf::erfc(r / (s * std::f64::consts::SQRT_2)),
            ShapeKind::Laplace => (-r / s).exp(),
            ShapeKind::Uniform => {
                if r >= 0.5 * s {
                    0.0
                } else {
                    1.0 - 2.0 * r / s
                }
            }
            ShapeKind::Triangular => {
                if r >= s {
                    0.0
                } else {
                    (1.0 - r / s).powi(2)
                }
            }
        }
    }

    /// Radius `r` with `tail_mass_beyond(r) < eps`.
    pub fn tail_radius(&self, eps: f64) -> f64 {
        let s = self.scale;
        match self.kind {
            ShapeKind::Gaussian => s * std::f64::consts::SQRT_2 * erf::erfc_inv(eps) * 1.01,
            ShapeKind::Laplace => s * (1.0 / eps).ln() * 1.01,
            ShapeKind::Uniform => 0.5 * s,
            ShapeKind::Triangular => s,
        }
    }

    /// Largest `t` with `density(location + t) > level` (zero when the peak
    /// does not exceed `level`).
    fn clip_radius(&self, level: f64) -> f64 {
        if self.peak() <= level {
            return 0.0;
        }
        let s = self.scale;
        match self.kind {
            ShapeKind::Gaussian => s * (-2.0 * (level * s * SQRT_2PI).ln()).sqrt(),
            ShapeKind::Laplace => -s * (2.0 * s * level).ln(),
            ShapeKind::Uniform => 0.5 * s,
            ShapeKind::Triangular => s * (1.0 - s * level),
        }
    }

    /// Exact integral of `min(level, density)` over `[u, v]` in recentred
    /// coordinates, `0 <= u <= v`.
    pub fn clipped_centered_mass(&self, level: f64, u: f64, v: f64) -> f64 {
        debug_assert!(level > 0.0 && 0.0 <= u && u <= v);
        let t = self.clip_radius(level);
        if t <= u {
            self.centered_mass(u, v)
        } else if t >= v {
            level * (v - u)
        } else {
            level * (t - u) + self.centered_mass(t, v)
        }
    }
}

/// A density given by its samples on a grid, accepted for counterexample
/// exploration. Whether it is actually CSUM is detected at load time and
/// recorded, not enforced.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedShape {
    values: GridFunction,
    location: f64,
    csum: bool,
}

impl TabulatedShape {
    /// Build from samples. `location` is the declared symmetry centre; when
    /// absent it is detected as the grid median of the density.
    pub fn new(values: GridFunction, location: Option<f64>) -> Result<Self> {
        let total = values.integrate();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidParameter(format!(
                "tabulated density must integrate to 1, got {total}"
            )));
        }
        let location = match location {
            Some(c) => c,
            None => {
                // snap to the nearest sample: the interpolated median drifts by
                // the truncated tail mass, which would spoil symmetry probes
                let g = values.grid();
                let c = grid_median(&values)?;
                let i = ((c - g.x_min()) / g.delta()).round();
                g.x_min() + i * g.delta()
            }
        };
        let csum = is_grid_csum(&values, location);
        Ok(Self {
            values,
            location,
            csum,
        })
    }

    pub fn location(&self) -> f64 {
        self.location
    }

    pub fn is_csum(&self) -> bool {
        self.csum
    }

    pub fn samples(&self) -> &GridFunction {
        &self.values
    }

    pub fn density(&self, x: f64) -> f64 {
        self.values.value_at(x)
    }

    pub fn peak(&self) -> f64 {
        self.values.values().iter().cloned().fold(0.0, f64::max)
    }

    pub fn tail_mass_beyond(&self, r: f64) -> f64 {
        self.values.integrate_with(|x, v| {
            if (x - self.location).abs() > r {
                v
            } else {
                0.0
            }
        })
    }

    /// Exact integral of `min(level, density)` over `[u, v]` in recentred
    /// coordinates: the piecewise-linear interpolant is clipped segment by
    /// segment, so no sub-grid quadrature error enters.
    pub fn clipped_centered_mass(&self, level: f64, u: f64, v: f64) -> f64 {
        // average of the two half-line windows; for a symmetric table both
        // sides agree and this symmetrizes load-time rounding
        0.5 * (pl_clipped_integral(&self.values, level, self.location + u, self.location + v)
            + pl_clipped_integral(&self.values, level, self.location - v, self.location - u))
    }
}

/// Median of a grid density via its cumulative trapezoid.
fn grid_median(f: &GridFunction) -> Result<f64> {
    let g = f.grid();
    let v = f.values();
    let total = f.integrate();
    if total <= 0.0 {
        return Err(Error::InvalidParameter(
            "cannot locate the median of a zero density".into(),
        ));
    }
    let half = 0.5 * total;
    let mut acc = 0.0;
    for i in 1..g.len() {
        let step = 0.5 * (v[i - 1] + v[i]) * g.delta();
        if acc + step >= half {
            let frac = if step > 0.0 { (half - acc) / step } else { 0.0 };
            return Ok(g.x(i - 1) + frac * g.delta());
        }
        acc += step;
    }
    Ok(g.x_max())
}

/// Symmetry about `center` plus unimodality, both within a small slack.
fn is_grid_csum(f: &GridFunction, center: f64) -> bool {
    let g = f.grid();
    let peak = f.values().iter().cloned().fold(0.0, f64::max);
    let tol = 1e-6 * peak.max(1e-300);
    let half_span = (center - g.x_min()).min(g.x_max() - center);
    let steps = (half_span / g.delta()).floor() as usize;
    let mut prev = f.value_at(center);
    for j in 1..=steps {
        let t = j as f64 * g.delta();
        let right = f.value_at(center + t);
        let left = f.value_at(center - t);
        if (right - left).abs() > tol {
            return false;
        }
        if right > prev + tol {
            return false;
        }
        prev = right;
    }
    true
}

/// Exact integral of `min(level, f)` over `[lo, hi]` for the piecewise-linear
/// interpolant of `f` (zero outside the grid).
fn pl_clipped_integral(f: &GridFunction, level: f64, lo: f64, hi: f64) -> f64 {
    let g = f.grid();
    let a = lo.max(g.x_min());
    let b = hi.min(g.x_max());
    if a >= b {
        return 0.0;
    }
    let mut total = 0.0;
    let start = ((a - g.x_min()) / g.delta()).floor() as usize;
    let mut left = a;
    let mut i = start;
    while left < b && i + 1 < g.len() {
        let right = (g.x(i + 1)).min(b);
        if right > left {
            let va = f.value_at(left).min(level);
            let vb = f.value_at(right).min(level);
            // the clipped segment is linear unless the segment crosses `level`
            let raw_a = f.value_at(left);
            let raw_b = f.value_at(right);
            if (raw_a - level) * (raw_b - level) < 0.0 {
                let t = (level - raw_a) / (raw_b - raw_a);
                let xc = left + t * (right - left);
                total += 0.5 * (va + level) * (xc - left);
                total += 0.5 * (level + vb) * (right - xc);
            } else {
                total += 0.5 * (va + vb) * (right - left);
            }
        }
        left = right;
        i += 1;
    }
    total
}

/// One conditional density, either analytic or tabulated.
#[derive(Debug, Clone, PartialEq)]
pub enum ComponentShape {
    Analytic(CsumShape),
    Tabulated(TabulatedShape),
}

impl ComponentShape {
    pub fn density(&self, x: f64) -> f64 {
        match self {
            Self::Analytic(s) => s.density(x),
            Self::Tabulated(t) => t.density(x),
        }
    }

    pub fn location(&self) -> f64 {
        match self {
            Self::Analytic(s) => s.location,
            Self::Tabulated(t) => t.location(),
        }
    }

    pub fn scale(&self) -> Option<f64> {
        match self {
            Self::Analytic(s) => Some(s.scale),
            Self::Tabulated(_) => None,
        }
    }

    pub fn peak(&self) -> f64 {
        match self {
            Self::Analytic(s) => s.peak(),
            Self::Tabulated(t) => t.peak(),
        }
    }

    pub fn is_csum(&self) -> bool {
        match self {
            Self::Analytic(_) => true,
            Self::Tabulated(t) => t.is_csum(),
        }
    }

    pub fn tail_mass_beyond(&self, r: f64) -> f64 {
        match self {
            Self::Analytic(s) => s.tail_mass_beyond(r),
            Self::Tabulated(t) => t.tail_mass_beyond(r),
        }
    }

    /// Integral of `min(level, recentred density)` over `[u, v]`, `0 <= u <= v`.
    pub fn clipped_centered_mass(&self, level: f64, u: f64, v: f64) -> f64 {
        match self {
            Self::Analytic(s) => s.clipped_centered_mass(level, u, v),
            Self::Tabulated(t) => t.clipped_centered_mass(level, u, v),
        }
    }
}

/// A weighted conditional density.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub weight: f64,
    pub shape: ComponentShape,
}

/// The estimator: one shift per observation value.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftAssignment(Vec<f64>);

impl ShiftAssignment {
    pub fn new(shifts: Vec<f64>) -> Result<Self> {
        if shifts.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFinite("shift assignment contains NaN/inf".into()));
        }
        Ok(Self(shifts))
    }

    pub fn shifts(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Add the same constant to every shift.
    pub fn translated(&self, c: f64) -> Self {
        Self(self.0.iter().map(|s| s + c).collect())
    }

    /// Replace shift `i` with `value`.
    pub fn with_shift(&self, i: usize, value: f64) -> Self {
        let mut s = self.0.clone();
        s[i] = value;
        Self(s)
    }
}

/// A finite CSUM family: weighted conditional densities plus the grid on which
/// error mixtures are sampled.
#[derive(Debug, Clone, PartialEq)]
pub struct CsumFamily {
    grid: Grid,
    components: Vec<Component>,
    s_max: f64,
}

impl CsumFamily {
    /// Validates weights (positive, summing to one within 1e-9, then exactly
    /// renormalized) and support adequacy: every component must keep its mass
    /// inside the grid under any admissible displacement, up to
    /// [`SUPPORT_ADEQUACY_EPS`].
    ///
    /// `s_max` bounds the displacement of each shift from the component
    /// location; it defaults to a quarter of the grid span.
    pub fn new(
        grid: Grid,
        components: Vec<(f64, ComponentShape)>,
        s_max: Option<f64>,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Config("a family needs at least one component".into()));
        }
        let s_max = s_max.unwrap_or(grid.span() / 4.0);
        if !(s_max > 0.0 && s_max.is_finite()) {
            return Err(Error::Config(format!("s_max must be positive, got {s_max}")));
        }
        let weight_sum: f64 = components.iter().map(|(w, _)| w).sum();
        if components.iter().any(|(w, _)| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::Config("component weights must be positive".into()));
        }
        if (weight_sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "component weights must sum to 1, got {weight_sum}"
            )));
        }
        let reach = (-grid.x_min()).min(grid.x_max()) - s_max;
        if reach <= 0.0 {
            return Err(Error::Config(format!(
                "s_max = {s_max} leaves no room on the grid [{}, {}]",
                grid.x_min(),
                grid.x_max()
            )));
        }
        for (i, (_, shape)) in components.iter().enumerate() {
            let tail = shape.tail_mass_beyond(reach);
            if tail >= SUPPORT_ADEQUACY_EPS {
                return Err(Error::Config(format!(
                    "component {i} keeps mass {tail:.3e} outside the shift-adequate grid \
                     (radius {reach}); widen the grid or reduce s_max"
                )));
            }
        }
        let components = components
            .into_iter()
            .map(|(w, shape)| Component {
                weight: w / weight_sum,
                shape,
            })
            .collect();
        Ok(Self {
            grid,
            components,
            s_max,
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn locations(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.shape.location()).collect()
    }

    /// True when every component is CSUM (analytic shapes always are).
    pub fn is_csum(&self) -> bool {
        self.components.iter().all(|c| c.shape.is_csum())
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.components.len() {
            return Err(Error::InvalidParameter(format!(
                "component index {i} out of range (k = {})",
                self.components.len()
            )));
        }
        Ok(())
    }

    /// Conditional density of component `i` at `x`.
    pub fn eval_conditional(&self, i: usize, x: f64) -> Result<f64> {
        self.check_index(i)?;
        Ok(self.components[i].shape.density(x))
    }

    /// Conditional `(mean, median, mode)`; CSUM forces all three to coincide
    /// at the location.
    pub fn conditional_stats(&self, i: usize) -> Result<(f64, f64, f64)> {
        self.check_index(i)?;
        let c = self.components[i].shape.location();
        Ok((c, c, c))
    }

    /// Check that `g` has the right arity and every displacement from the
    /// component location stays within `s_max`.
    pub fn validate_shifts(&self, g: &ShiftAssignment) -> Result<()> {
        if g.len() != self.k() {
            return Err(Error::InvalidParameter(format!(
                "shift assignment has {} entries for a family of {} components",
                g.len(),
                self.k()
            )));
        }
        for (i, (s, c)) in g.shifts().iter().zip(self.components.iter()).enumerate() {
            let d = (s - c.shape.location()).abs();
            if d > self.s_max * (1.0 + SHIFT_EPS) + SHIFT_EPS {
                return Err(Error::InvalidParameter(format!(
                    "shift {i} displaces its component by {d}, beyond s_max = {}",
                    self.s_max
                )));
            }
        }
        Ok(())
    }

    /// Error density `x -> sum_i w_i p(x + g_i | y_i)` sampled on the family grid.
    pub fn mixture_error_pdf(&self, g: &ShiftAssignment) -> Result<GridFunction> {
        self.validate_shifts(g)?;
        let values = self
            .grid
            .points()
            .map(|x| {
                self.components
                    .iter()
                    .zip(g.shifts())
                    .map(|(c, s)| c.weight * c.shape.density(x + s))
                    .sum()
            })
            .collect();
        GridFunction::new(self.grid, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid() -> Grid {
        // delta = 1/128: dyadic, and it divides the uniform widths used below
        Grid::symmetric(16.0, 4097).unwrap()
    }

    #[test]
    fn analytic_density_spot_values() {
        let u = CsumShape::uniform(0.0, 1.0).unwrap();
        assert_eq!(u.density(0.0), 1.0);
        let g = CsumShape::gaussian(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(g.density(0.0), 0.398_942_280_401_432_7, epsilon = 1e-15);
        let t = CsumShape::triangular(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(t.density(0.5), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn shapes_are_symmetric_and_unimodal_on_the_grid() {
        // centred at zero the reflection is exact in floats, so symmetry is
        // bit-exact; at generic locations the argument rounding costs an ulp
        for s in [
            CsumShape::gaussian(0.0, 1.3).unwrap(),
            CsumShape::laplace(0.0, 0.6).unwrap(),
            CsumShape::uniform(0.0, 2.0).unwrap(),
            CsumShape::triangular(0.0, 1.5).unwrap(),
        ] {
            let mut prev = s.density(0.0);
            for j in 1..200 {
                let t = j as f64 * 0.01;
                let right = s.density(t);
                let left = s.density(-t);
                assert_eq!(right, left, "symmetry must be exact for {s:?} at t={t}");
                assert!(right <= prev, "density must be non-increasing in |x - loc|");
                prev = right;
            }
        }
        for s in [
            CsumShape::gaussian(0.75, 1.3).unwrap(),
            CsumShape::laplace(-0.5, 0.6).unwrap(),
        ] {
            for j in 1..200 {
                let t = j as f64 * 0.01;
                let (right, left) = (s.density(s.location + t), s.density(s.location - t));
                assert_abs_diff_eq!(right, left, epsilon = 1e-13 * right.max(1e-300));
            }
        }
    }

    #[test]
    fn scale_must_be_positive() {
        assert!(CsumShape::gaussian(0.0, 0.0).is_err());
        assert!(CsumShape::laplace(0.0, -1.0).is_err());
    }

    #[test]
    fn conditional_stats_coincide() {
        let fam = CsumFamily::new(
            grid(),
            vec![
                (0.5, ComponentShape::Analytic(CsumShape::gaussian(2.5, 1.0).unwrap())),
                (0.5, ComponentShape::Analytic(CsumShape::uniform(-1.0, 0.5).unwrap())),
            ],
            None,
        )
        .unwrap();
        assert_eq!(fam.conditional_stats(0).unwrap(), (2.5, 2.5, 2.5));
        assert_eq!(fam.conditional_stats(1).unwrap(), (-1.0, -1.0, -1.0));
        assert!(fam.conditional_stats(2).is_err());
        assert!(fam.eval_conditional(9, 0.0).is_err());
    }

    #[test]
    fn weights_must_sum_to_one() {
        let comp = |w| {
            (
                w,
                ComponentShape::Analytic(CsumShape::gaussian(0.0, 1.0).unwrap()),
            )
        };
        assert!(CsumFamily::new(grid(), vec![comp(0.5), comp(0.6)], None).is_err());
        assert!(CsumFamily::new(grid(), vec![comp(0.5), comp(0.5)], None).is_ok());
    }

    #[test]
    fn support_adequacy_is_enforced() {
        // sigma = 2.5 with s_max = 4 leaves ~1.5e-6 beyond the reachable part
        let wide = CsumShape::gaussian(0.0, 2.5).unwrap();
        let res = CsumFamily::new(
            grid(),
            vec![(1.0, ComponentShape::Analytic(wide))],
            Some(4.0),
        );
        assert!(res.is_err());
        // sigma = 0.5 fits comfortably
        let narrow = CsumShape::gaussian(0.0, 0.5).unwrap();
        assert!(CsumFamily::new(
            grid(),
            vec![(1.0, ComponentShape::Analytic(narrow))],
            Some(4.0)
        )
        .is_ok());
    }

    #[test]
    fn single_component_median_shift_recentres() {
        let fam = CsumFamily::new(
            grid(),
            vec![(
                1.0,
                ComponentShape::Analytic(CsumShape::gaussian(1.5, 1.0).unwrap()),
            )],
            None,
        )
        .unwrap();
        let g = ShiftAssignment::new(vec![1.5]).unwrap();
        let p = fam.mixture_error_pdf(&g).unwrap();
        // recentred at zero: grid median of the mixture is ~0
        let median = grid_median(&p).unwrap();
        assert_abs_diff_eq!(median, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(p.integrate(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn aligned_uniforms_superpose_to_unit_plateau() {
        let fam = CsumFamily::new(
            grid(),
            vec![
                (0.5, ComponentShape::Analytic(CsumShape::uniform(0.0, 1.0).unwrap())),
                (0.5, ComponentShape::Analytic(CsumShape::uniform(2.0, 1.0).unwrap())),
            ],
            None,
        )
        .unwrap();
        let g = ShiftAssignment::new(vec![0.0, 2.0]).unwrap();
        let p = fam.mixture_error_pdf(&g).unwrap();
        assert_eq!(p.value_at(0.0), 1.0);
        assert_eq!(p.value_at(0.4), 1.0);
        assert_eq!(p.value_at(0.75), 0.0);
        assert_abs_diff_eq!(p.integrate(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn displaced_uniform_mixture_is_two_level() {
        let fam = CsumFamily::new(
            grid(),
            vec![
                (0.5, ComponentShape::Analytic(CsumShape::uniform(0.0, 1.0).unwrap())),
                (0.5, ComponentShape::Analytic(CsumShape::uniform(0.0, 1.0).unwrap())),
            ],
            None,
        )
        .unwrap();
        // second component displaced by 0.5: levels {1 on [0, 1/2], 1/2 on the flanks}
        let g = ShiftAssignment::new(vec![0.0, -0.5]).unwrap();
        let p = fam.mixture_error_pdf(&g).unwrap();
        assert_eq!(p.value_at(0.25), 1.0);
        assert_eq!(p.value_at(-0.25), 0.5);
        assert_eq!(p.value_at(0.75), 0.5);
        assert_abs_diff_eq!(p.integrate(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mass_is_conserved_under_admissible_shifts() {
        // kinks cost O(delta^2 |slope jump|) of trapezoid mass, so a 1e-6
        // check on a Laplace with b = 1/2 needs a step around 1e-3
        let fine = Grid::symmetric(16.0, 32001).unwrap();
        let fam = CsumFamily::new(
            fine,
            vec![
                (0.3, ComponentShape::Analytic(CsumShape::laplace(0.5, 0.5).unwrap())),
                (0.7, ComponentShape::Analytic(CsumShape::triangular(-0.25, 1.5).unwrap())),
            ],
            Some(2.0),
        )
        .unwrap();
        for d in [-1.7, -0.33, 0.0, 0.41, 1.9] {
            let g = ShiftAssignment::new(vec![0.5 + d, -0.25 - d * 0.5]).unwrap();
            let p = fam.mixture_error_pdf(&g).unwrap();
            assert_abs_diff_eq!(p.integrate(), 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn excessive_shift_is_rejected() {
        let fam = CsumFamily::new(
            grid(),
            vec![(
                1.0,
                ComponentShape::Analytic(CsumShape::gaussian(0.0, 0.5).unwrap()),
            )],
            Some(2.0),
        )
        .unwrap();
        let g = ShiftAssignment::new(vec![2.5]).unwrap();
        assert!(fam.mixture_error_pdf(&g).is_err());
        assert!(fam
            .mixture_error_pdf(&ShiftAssignment::new(vec![0.0, 0.0]).unwrap())
            .is_err());
    }

    #[test]
    fn global_translation_moves_the_mixture() {
        let fam = CsumFamily::new(
            grid(),
            vec![
                (0.5, ComponentShape::Analytic(CsumShape::gaussian(0.0, 1.0).unwrap())),
                (0.5, ComponentShape::Analytic(CsumShape::laplace(1.0, 0.5).unwrap())),
            ],
            Some(3.0),
        )
        .unwrap();
        let g = ShiftAssignment::new(vec![0.0, 1.0]).unwrap();
        let c = 8.0 * fam.grid().delta();
        let p = fam.mixture_error_pdf(&g).unwrap();
        let q = fam.mixture_error_pdf(&g.translated(c)).unwrap();
        // adding c to every shift translates the error density by -c
        for x in fam.grid().points().skip(8) {
            assert_abs_diff_eq!(q.value_at(x - c), p.value_at(x), epsilon = 1e-9);
        }
        // translation-invariant functionals agree
        assert_abs_diff_eq!(
            p.power_integral(2.0).unwrap(),
            q.power_integral(2.0).unwrap(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn tabulated_median_and_csum_detection() {
        let g = Grid::symmetric(6.0, 2049).unwrap();
        // symmetric unimodal table centred at 0.75
        let uni = GridFunction::from_fn(g, |x| {
            let t: f64 = x - 0.75;
            (-(t * t) / 2.0).exp() / SQRT_2PI
        })
        .unwrap();
        let tab = TabulatedShape::new(uni, None).unwrap();
        assert!(tab.is_csum());
        assert!((tab.location() - 0.75).abs() <= g.delta());

        // symmetric but bimodal: flagged non-CSUM
        let bimodal = GridFunction::from_fn(g, |x| {
            let a: f64 = x - 1.5;
            let b: f64 = x + 1.5;
            0.5 * ((-(a * a) / 0.5).exp() + (-(b * b) / 0.5).exp()) / (0.5 * std::f64::consts::PI).sqrt()
        })
        .unwrap();
        let tab = TabulatedShape::new(bimodal, None).unwrap();
        assert!(!tab.is_csum());
        assert!(tab.location().abs() <= 2.0 * g.delta());
    }

    #[test]
    fn clipped_mass_matches_plain_mass_when_level_is_high() {
        let s = CsumShape::gaussian(0.0, 1.0).unwrap();
        let a = s.clipped_centered_mass(10.0, 0.1, 0.7);
        let b = s.centered_mass(0.1, 0.7);
        assert_abs_diff_eq!(a, b, epsilon = 1e-15);
    }

    #[test]
    fn clipped_mass_truncates_the_peak() {
        // uniform of height 2: clipping at level 1 halves the plateau mass
        let s = CsumShape::uniform(0.0, 0.5).unwrap();
        assert_eq!(s.peak(), 2.0);
        let m = s.clipped_centered_mass(1.0, 0.0, 0.25);
        assert_abs_diff_eq!(m, 0.25, epsilon = 1e-15);
    }
}

