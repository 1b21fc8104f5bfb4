//! Decreasing rearrangement of grid functions and the comparison inequalities
//! built on it.
//!
//! On a uniform grid the rearrangement is literally a sort: Lebesgue measure
//! becomes counting measure times the grid step, so sorting the samples in
//! non-increasing order produces the rearranged function at abscissae
//! `0, delta, 2*delta, ...`. Every integral of a function of the samples is
//! then preserved exactly, not approximately.

use crate::error::{Error, Result};
use crate::grid::{check_power_order, Grid, GridFunction};

/// Slack for the majorization and mixed-power checks.
pub const CHECK_TOL: f64 = 1e-9;

/// A non-increasing rearrangement of a grid function, sampled at
/// `0, delta, 2*delta, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rearranged {
    source_grid: Grid,
    values: Vec<f64>,
}

impl Rearranged {
    pub fn source_grid(&self) -> Grid {
        self.source_grid
    }

    pub fn delta(&self) -> f64 {
        self.source_grid.delta()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Total mass `sum_i m_i * delta`.
    pub fn total(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.delta()
    }

    /// `integral_0^{x0} m(x) dx`: full cells plus a linearly prorated
    /// fraction of the boundary cell, so the result is continuous in `x0`.
    pub fn head_integral(&self, x0: f64) -> Result<f64> {
        if !(x0 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "head integral requires x0 >= 0, got {x0}"
            )));
        }
        let delta = self.delta();
        let k = ((x0 / delta).floor() as usize).min(self.values.len());
        let mut sum: f64 = self.values[..k].iter().sum::<f64>() * delta;
        if k < self.values.len() {
            let frac = x0 - k as f64 * delta;
            sum += frac.min(delta) * self.values[k];
        }
        Ok(sum)
    }
}

/// Measure of the super-level set `{x : h(x) >= z}`, discretized as the
/// sample count times the grid step.
pub fn level_measure(h: &GridFunction, z: f64) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "level measure requires z >= 0, got {z}"
        )));
    }
    let count = h.values().iter().filter(|&&v| v >= z).count();
    Ok(count as f64 * h.grid().delta())
}

/// Sort the samples in non-increasing order. Ties keep their source order
/// (the sort is stable), which fixes the layout without affecting any integral.
pub fn decreasing_rearrangement(h: &GridFunction) -> Rearranged {
    let mut values = h.values().to_vec();
    values.sort_by(|a, b| b.total_cmp(a));
    Rearranged {
        source_grid: h.grid(),
        values,
    }
}

/// Both sides of the equimeasurability identity for `G(x) = x^alpha`:
/// the power sum of the source samples and of the rearranged samples.
///
/// Floating-point addition is not permutation-invariant, so both sums are
/// evaluated in the same canonical (non-increasing) order; the pair is then
/// equal bit for bit whenever the rearrangement is exactly a permutation.
pub fn equimeasure_check(h: &GridFunction, alpha: f64) -> Result<(f64, f64)> {
    check_power_order(alpha)?;
    let m = decreasing_rearrangement(h);
    let mut sorted = h.values().to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let delta = h.grid().delta();
    let lhs = sorted.iter().map(|v| v.powf(alpha)).sum::<f64>() * delta;
    let rhs = m.values.iter().map(|v| v.powf(alpha)).sum::<f64>() * delta;
    Ok((lhs, rhs))
}

/// Outcome of the total-mass and head-dominance comparison between the
/// rearranged baseline mixture and a rearranged shifted mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorizationReport {
    /// Total mass of the baseline rearrangement.
    pub total_baseline: f64,
    /// Total mass of the shifted rearrangement.
    pub total_shifted: f64,
    /// Largest head-integral excess of the shifted over the baseline
    /// rearrangement across all grid prefixes (positive = violation).
    pub max_head_excess: f64,
    pub pass: bool,
}

/// Compare a baseline rearrangement `m0` (median-aligned mixture) against a
/// shifted one `mg`: totals must agree and every head integral of `mg` must
/// be dominated by the corresponding head integral of `m0`.
pub fn majorization_check(m0: &Rearranged, mg: &Rearranged) -> Result<MajorizationReport> {
    check_same_layout(m0, mg)?;
    let delta = m0.delta();
    let mut acc0 = 0.0;
    let mut accg = 0.0;
    let mut max_excess = f64::NEG_INFINITY;
    for (v0, vg) in m0.values.iter().zip(&mg.values) {
        acc0 += v0;
        accg += vg;
        let excess = (accg - acc0) * delta;
        if excess > max_excess {
            max_excess = excess;
        }
    }
    let total_baseline = acc0 * delta;
    let total_shifted = accg * delta;
    let pass =
        (total_baseline - total_shifted).abs() <= CHECK_TOL && max_excess <= CHECK_TOL;
    Ok(MajorizationReport {
        total_baseline,
        total_shifted,
        max_head_excess: max_excess,
        pass,
    })
}

/// Outcome of the mixed-power head and tail bounds at a single split point.
#[derive(Debug, Clone, PartialEq)]
pub struct HolderReport {
    /// Integer part of the order: the `n` with `n < alpha <= n + 1`.
    pub order_floor: u32,
    /// `head(m0) - head(mixed)`; non-negative when the head bound holds.
    pub head_slack: f64,
    /// `tail(mg) - tail(mixed)`; non-negative when the tail bound holds.
    pub tail_slack: f64,
    pub pass: bool,
}

/// Check the two mixed-power comparisons that interpolate between the shifted
/// and baseline rearrangements: with `theta = alpha - n`,
/// `integral_0^{x0} mg^theta m0^(1-theta) <= integral_0^{x0} m0` and the
/// complementary tail is bounded by the tail of `mg`.
pub fn holder_chain_check(
    m0: &Rearranged,
    mg: &Rearranged,
    alpha: f64,
    x0: f64,
) -> Result<HolderReport> {
    check_power_order(alpha)?;
    check_same_layout(m0, mg)?;
    if !(x0 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "split point must be non-negative, got {x0}"
        )));
    }
    // n < alpha <= n+1, so integer orders land on the closed upper end
    let n = (alpha.ceil() - 1.0).max(0.0);
    let theta = alpha - n;
    let delta = m0.delta();

    let mixed: Vec<f64> = m0
        .values
        .iter()
        .zip(&mg.values)
        .map(|(v0, vg)| vg.powf(theta) * v0.powf(1.0 - theta))
        .collect();

    let head = |vals: &[f64]| -> f64 {
        let k = ((x0 / delta).floor() as usize).min(vals.len());
        let mut sum: f64 = vals[..k].iter().sum::<f64>() * delta;
        if k < vals.len() {
            sum += (x0 - k as f64 * delta).min(delta) * vals[k];
        }
        sum
    };
    let total = |vals: &[f64]| vals.iter().sum::<f64>() * delta;

    let head_mixed = head(&mixed);
    let head_0 = head(&m0.values);
    let tail_mixed = total(&mixed) - head_mixed;
    let tail_g = total(&mg.values) - head(&mg.values);

    let head_slack = head_0 - head_mixed;
    let tail_slack = tail_g - tail_mixed;
    Ok(HolderReport {
        order_floor: n as u32,
        head_slack,
        tail_slack,
        pass: head_slack >= -CHECK_TOL && tail_slack >= -CHECK_TOL,
    })
}

/// [`holder_chain_check`] over many split points at once: the mixed-power
/// sequence and its prefix sums are computed a single time.
pub fn holder_chain_profile(
    m0: &Rearranged,
    mg: &Rearranged,
    alpha: f64,
    splits: &[f64],
) -> Result<Vec<HolderReport>> {
    check_power_order(alpha)?;
    check_same_layout(m0, mg)?;
    let n = (alpha.ceil() - 1.0).max(0.0);
    let theta = alpha - n;
    let delta = m0.delta();
    let len = m0.len();

    // prefix[i] = sum of the first i values
    let prefix = |vals: &[f64]| -> Vec<f64> {
        let mut acc = Vec::with_capacity(len + 1);
        let mut sum = 0.0;
        acc.push(0.0);
        for v in vals {
            sum += v;
            acc.push(sum);
        }
        acc
    };
    let mixed: Vec<f64> = m0
        .values
        .iter()
        .zip(&mg.values)
        .map(|(v0, vg)| vg.powf(theta) * v0.powf(1.0 - theta))
        .collect();
    let pm = prefix(&mixed);
    let p0 = prefix(&m0.values);
    let pg = prefix(&mg.values);
    let head = |p: &[f64], vals: &[f64], x0: f64| -> f64 {
        let k = ((x0 / delta).floor() as usize).min(len);
        let mut sum = p[k] * delta;
        if k < len {
            sum += (x0 - k as f64 * delta).min(delta) * vals[k];
        }
        sum
    };

    splits
        .iter()
        .map(|&x0| {
            if !(x0 >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "split point must be non-negative, got {x0}"
                )));
            }
            let head_mixed = head(&pm, &mixed, x0);
            let head_slack = head(&p0, &m0.values, x0) - head_mixed;
            let tail_mixed = pm[len] * delta - head_mixed;
            let tail_g = pg[len] * delta - head(&pg, &mg.values, x0);
            let tail_slack = tail_g - tail_mixed;
            Ok(HolderReport {
                order_floor: n as u32,
                head_slack,
                tail_slack,
                pass: head_slack >= -CHECK_TOL && tail_slack >= -CHECK_TOL,
            })
        })
        .collect()
}

fn check_same_layout(a: &Rearranged, b: &Rearranged) -> Result<()> {
    if a.len() != b.len() || (a.delta() - b.delta()).abs() > 1e-15 * a.delta() {
        return Err(Error::InvalidParameter(
            "rearrangements must come from the same grid".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn triangle() -> GridFunction {
        let g = Grid::symmetric(1.0, 2001).unwrap();
        GridFunction::from_fn(g, |x| (1.0 - x.abs()).max(0.0)).unwrap()
    }

    /// Staircase pair with equal totals: {1 on length 1} vs
    /// {1 on length 1/2, 1/2 on length 1}, built by sample index so each
    /// level holds exactly the intended measure.
    fn two_level_pair() -> (Rearranged, Rearranged) {
        let g = Grid::new(0.0, 1.5, 301).unwrap(); // delta = 0.005
        let aligned: Vec<f64> = (0..301).map(|i| if i < 200 { 1.0 } else { 0.0 }).collect();
        let displaced: Vec<f64> = (0..301)
            .map(|i| {
                if i < 100 {
                    1.0
                } else if i < 300 {
                    0.5
                } else {
                    0.0
                }
            })
            .collect();
        (
            decreasing_rearrangement(&GridFunction::new(g, aligned).unwrap()),
            decreasing_rearrangement(&GridFunction::new(g, displaced).unwrap()),
        )
    }

    #[test]
    fn level_measure_spot_values() {
        let t = triangle();
        let d = t.grid().delta();
        assert!((level_measure(&t, 0.5).unwrap() - 1.0).abs() <= 1.5 * d);
        assert_eq!(
            level_measure(&t, 0.0).unwrap(),
            t.grid().len() as f64 * d
        );
        assert_eq!(level_measure(&t, 1.5).unwrap(), 0.0);
        assert!(level_measure(&t, -0.1).is_err());
    }

    #[test]
    fn rearranging_a_non_increasing_function_is_identity() {
        let g = Grid::new(0.0, 1.0, 101).unwrap();
        let f = GridFunction::from_fn(g, |x| (1.0 - x) * (1.0 - x)).unwrap();
        let m = decreasing_rearrangement(&f);
        assert_eq!(m.values(), f.values());
    }

    #[test]
    fn rearranged_triangle_matches_analytic_form() {
        // for a symmetric unimodal h the rearrangement is x -> h(x/2)
        let t = triangle();
        let m = decreasing_rearrangement(&t);
        let d = m.delta();
        for (j, &v) in m.values().iter().enumerate() {
            let x = j as f64 * d;
            let expected = (1.0 - x / 2.0).max(0.0);
            assert!(
                (v - expected).abs() <= d,
                "j={j}: got {v}, want {expected}"
            );
        }
        assert_eq!(m.values()[0], 1.0); // m(0) = sup h
    }

    #[test]
    fn rearrangement_is_non_increasing_and_idempotent() {
        let g = Grid::symmetric(3.0, 1024).unwrap();
        let f = GridFunction::from_fn(g, |x| (x.sin().abs() + 0.1) * (-x * x / 4.0).exp())
            .unwrap();
        let m = decreasing_rearrangement(&f);
        assert!(m.values().windows(2).all(|w| w[0] >= w[1]));
        let as_fn = GridFunction::new(g, m.values().to_vec()).unwrap();
        let again = decreasing_rearrangement(&as_fn);
        assert_eq!(m.values(), again.values());
    }

    #[test]
    fn equimeasure_pairs_are_bit_identical() {
        let g = Grid::symmetric(2.0, 777).unwrap();
        let f = GridFunction::from_fn(g, |x| (2.0 - x).abs().sin().powi(2) + 0.01).unwrap();
        for alpha in [0.5, 1.0, 2.0, 3.0, 3.7] {
            let (lhs, rhs) = equimeasure_check(&f, alpha).unwrap();
            assert_eq!(lhs.to_bits(), rhs.to_bits(), "alpha = {alpha}");
        }
    }

    #[test]
    fn equimeasure_triangle_alpha_two() {
        let (lhs, rhs) = equimeasure_check(&triangle(), 2.0).unwrap();
        assert_eq!(lhs, rhs);
        // integral of (1-|x|)^2 over [-1,1] = 2/3
        assert_abs_diff_eq!(lhs, 2.0 / 3.0, epsilon = 1e-3);
    }

    #[test]
    fn equimeasure_two_level_alpha_two() {
        let g = Grid::new(0.0, 1.5, 300).unwrap(); // levels switch mid-cell
        let f = GridFunction::from_fn(g, |x| if x < 0.5 { 1.0 } else { 0.5 }).unwrap();
        let (lhs, rhs) = equimeasure_check(&f, 2.0).unwrap();
        assert_eq!(lhs, rhs);
        // 0.5 * 1 + 1.0 * 0.25 = 0.75 up to the half-weightless end cells
        assert_abs_diff_eq!(lhs, 0.75, epsilon = 5e-3);
    }

    #[test]
    fn head_integral_endpoints_and_staircase() {
        let (_, mg) = two_level_pair();
        assert_eq!(mg.head_integral(0.0).unwrap(), 0.0);
        let full = mg.head_integral(1e9).unwrap();
        assert_abs_diff_eq!(full, mg.total(), epsilon = 1e-12);
        // top 0.5 at height 1 plus 0.5 at height 1/2
        assert_abs_diff_eq!(mg.head_integral(1.0).unwrap(), 0.75, epsilon = 5e-3);
        assert!(mg.head_integral(-1.0).is_err());
    }

    #[test]
    fn head_integral_is_continuous_in_x0() {
        let (m0, _) = two_level_pair();
        let d = m0.delta();
        let mut prev = m0.head_integral(0.0).unwrap();
        let mut x = 0.1 * d;
        while x < 1.6 {
            let h = m0.head_integral(x).unwrap();
            assert!(h >= prev - 1e-15);
            assert!(h - prev <= 0.11 * d + 1e-12, "jump at x0 = {x}");
            prev = h;
            x += 0.1 * d;
        }
    }

    #[test]
    fn majorization_of_identical_inputs_is_tight() {
        let (m0, _) = two_level_pair();
        let r = majorization_check(&m0, &m0).unwrap();
        assert!(r.pass);
        assert_eq!(r.max_head_excess, 0.0);
        assert_eq!(r.total_baseline, r.total_shifted);
    }

    #[test]
    fn majorization_two_level_staircases() {
        let (m0, mg) = two_level_pair();
        let r = majorization_check(&m0, &mg).unwrap();
        assert!(r.pass, "{r:?}");
        assert_abs_diff_eq!(r.total_baseline, 1.0, epsilon = 5e-3);
        assert_abs_diff_eq!(r.total_baseline, r.total_shifted, epsilon = 1e-12);
        // at x0 = 1: head(mg) = 0.75 <= head(m0) = 1.0
        assert!(mg.head_integral(1.0).unwrap() <= m0.head_integral(1.0).unwrap());
    }

    #[test]
    fn holder_chain_degenerate_equality() {
        let (m0, _) = two_level_pair();
        for alpha in [0.5, 1.5, 2.0, 3.0, 3.7] {
            for x0 in [0.0, 0.3, 0.75, 1.5] {
                let r = holder_chain_check(&m0, &m0, alpha, x0).unwrap();
                assert!(r.pass, "alpha={alpha} x0={x0}: {r:?}");
            }
        }
    }

    #[test]
    fn holder_chain_two_level_pair() {
        let (m0, mg) = two_level_pair();
        let r2 = holder_chain_check(&m0, &mg, 2.0, 0.5).unwrap();
        assert_eq!(r2.order_floor, 1);
        assert!(r2.pass, "{r2:?}");
        let rhalf = holder_chain_check(&m0, &mg, 0.5, 0.75).unwrap();
        assert_eq!(rhalf.order_floor, 0);
        assert!(rhalf.pass, "{rhalf:?}");
        let r3 = holder_chain_check(&m0, &mg, 3.0, 1.0).unwrap();
        assert_eq!(r3.order_floor, 2);
        assert!(r3.pass, "{r3:?}");
    }

    #[test]
    fn order_floor_brackets_alpha() {
        let (m0, mg) = two_level_pair();
        for (alpha, n) in [(0.25, 0), (1.0, 0), (1.5, 1), (2.0, 1), (3.0, 2), (3.7, 3)] {
            let r = holder_chain_check(&m0, &mg, alpha, 0.4).unwrap();
            assert_eq!(r.order_floor, n, "alpha = {alpha}");
        }
    }

    #[test]
    fn profile_agrees_with_single_point_checks() {
        let (m0, mg) = two_level_pair();
        let splits = [0.0, 0.21, 0.5, 0.77, 1.0, 1.5];
        for alpha in [0.5, 2.0, 3.7] {
            let profile = holder_chain_profile(&m0, &mg, alpha, &splits).unwrap();
            for (x0, prof) in splits.iter().zip(profile) {
                let single = holder_chain_check(&m0, &mg, alpha, *x0).unwrap();
                assert_abs_diff_eq!(prof.head_slack, single.head_slack, epsilon = 1e-12);
                assert_abs_diff_eq!(prof.tail_slack, single.tail_slack, epsilon = 1e-12);
                assert_eq!(prof.pass, single.pass);
            }
        }
    }

    #[test]
    fn mismatched_layouts_are_rejected() {
        let (m0, _) = two_level_pair();
        let other = decreasing_rearrangement(
            &GridFunction::from_fn(Grid::new(0.0, 1.0, 11).unwrap(), |_| 1.0).unwrap(),
        );
        assert!(majorization_check(&m0, &other).is_err());
        assert!(holder_chain_check(&m0, &other, 2.0, 0.1).is_err());
    }
}
