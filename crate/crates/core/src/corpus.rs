//! The built-in family corpus used by the acceptance suite and the runner's
//! `self-test` subcommand.
//!
//! Every family keeps heterogeneous scales and locations, covers all four
//! analytic shape kinds across the corpus, and is placed on a grid wide
//! enough that perturbations of two scale units per component stay support
//! adequate. The grid step divides every per-component sweep step
//! (`0.1 * scale`), so candidate mixtures sample their components on a common
//! lattice and the rearrangement comparisons hold to rounding precision.

use crate::densities::{ComponentShape, CsumFamily, CsumShape};
use crate::error::Result;
use crate::grid::{Grid, GridFunction};

/// Corpus grid step; divides `0.1 * scale` for every corpus scale.
pub const CORPUS_DELTA: f64 = 0.025;

/// Orders for the extremality sweep.
pub const SWEEP_ALPHAS: [f64; 6] = [0.25, 0.5, 0.75, 1.5, 2.0, 3.0];

/// Orders for the rearrangement comparisons (adds a fractional order above 3).
pub const REARRANGE_ALPHAS: [f64; 7] = [0.25, 0.5, 0.75, 1.5, 2.0, 3.0, 3.7];

/// A named corpus family with its per-component scales.
#[derive(Debug, Clone)]
pub struct CorpusFamily {
    pub name: &'static str,
    pub family: CsumFamily,
    pub scales: Vec<f64>,
}

impl CorpusFamily {
    /// Sweep steps of a tenth of a scale unit per component.
    pub fn sweep_steps(&self) -> Vec<f64> {
        self.scales.iter().map(|s| 0.1 * s).collect()
    }

    pub fn min_scale(&self) -> f64 {
        self.scales.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

fn build(name: &'static str, comps: Vec<(f64, CsumShape)>) -> Result<CorpusFamily> {
    let scales: Vec<f64> = comps.iter().map(|(_, s)| s.scale).collect();
    let max_scale = scales.iter().cloned().fold(0.0, f64::max);
    let s_max = 2.0 * max_scale + 0.5;
    let tail = comps
        .iter()
        .map(|(_, s)| s.tail_radius(1e-9))
        .fold(0.0, f64::max);
    let cells = ((s_max + tail) / CORPUS_DELTA).ceil() as usize;
    let half = cells as f64 * CORPUS_DELTA;
    let grid = Grid::symmetric(half, 2 * cells + 1)?;
    let family = CsumFamily::new(
        grid,
        comps
            .into_iter()
            .map(|(w, s)| (w, ComponentShape::Analytic(s)))
            .collect(),
        Some(s_max),
    )?;
    Ok(CorpusFamily {
        name,
        family,
        scales,
    })
}

/// The CSUM corpus: seven pair/triple families drawn from all four shapes.
pub fn csum_corpus() -> Vec<CorpusFamily> {
    let fams = vec![
        build(
            "gauss-pair",
            vec![
                (0.5, CsumShape::gaussian(-1.0, 1.0).unwrap()),
                (0.5, CsumShape::gaussian(2.0, 0.5).unwrap()),
            ],
        ),
        build(
            "laplace-pair",
            vec![
                (0.3, CsumShape::laplace(0.5, 0.75).unwrap()),
                (0.7, CsumShape::laplace(-1.5, 1.0).unwrap()),
            ],
        ),
        build(
            "uniform-pair",
            vec![
                (0.5, CsumShape::uniform(0.0, 1.0).unwrap()),
                (0.5, CsumShape::uniform(1.0, 2.0).unwrap()),
            ],
        ),
        build(
            "triangle-pair",
            vec![
                (0.4, CsumShape::triangular(-0.5, 1.0).unwrap()),
                (0.6, CsumShape::triangular(1.0, 1.5).unwrap()),
            ],
        ),
        build(
            "mixed-triple",
            vec![
                (0.25, CsumShape::gaussian(0.0, 1.0).unwrap()),
                (0.35, CsumShape::laplace(1.0, 0.5).unwrap()),
                (0.4, CsumShape::uniform(-1.0, 1.0).unwrap()),
            ],
        ),
        build(
            "tri-gauss",
            vec![
                (0.5, CsumShape::triangular(0.25, 2.0).unwrap()),
                (0.5, CsumShape::gaussian(-2.0, 0.75).unwrap()),
            ],
        ),
        build(
            "gauss-triple",
            vec![
                (0.2, CsumShape::gaussian(0.0, 1.0).unwrap()),
                (0.5, CsumShape::gaussian(1.5, 1.5).unwrap()),
                (0.3, CsumShape::gaussian(-0.75, 0.5).unwrap()),
            ],
        ),
    ];
    fams.into_iter()
        .map(|f| f.expect("corpus families are statically valid"))
        .collect()
}

/// Two unit uniforms with every mixture breakpoint halfway between samples,
/// where plateau potentials are exact: the reference family for the analytic
/// overlap gaps.
pub fn offset_unit_uniform_pair() -> CsumFamily {
    let delta = 1.0 / 512.0;
    let grid = Grid::new(-4.0 + delta / 2.0, 4.0 + delta / 2.0, 4097).unwrap();
    CsumFamily::new(
        grid,
        vec![
            (
                0.5,
                ComponentShape::Analytic(CsumShape::uniform(0.0, 1.0).unwrap()),
            ),
            (
                0.5,
                ComponentShape::Analytic(CsumShape::uniform(1.5, 1.0).unwrap()),
            ),
        ],
        Some(2.0),
    )
    .unwrap()
}

/// Width-2 uniform (height 1/2) with mid-cell breakpoints: its level-`n`
/// truncation loses exactly `1/(2n)` of mass.
pub fn offset_wide_uniform() -> CsumFamily {
    let delta = 1.0 / 512.0;
    let grid = Grid::new(-5.0 + delta / 2.0, 5.0 + delta / 2.0, 5121).unwrap();
    CsumFamily::new(
        grid,
        vec![(
            1.0,
            ComponentShape::Analytic(CsumShape::uniform(0.0, 2.0).unwrap()),
        )],
        Some(2.0),
    )
    .unwrap()
}

/// A standard-normal-like density with the given sigma on an adequate grid.
pub fn gaussian_density(sigma: f64, n: usize) -> GridFunction {
    let grid = Grid::symmetric(14.0 * sigma, n).unwrap();
    GridFunction::from_fn(grid, |x| {
        (-(x * x) / (2.0 * sigma * sigma)).exp()
            / (sigma * (2.0 * std::f64::consts::PI).sqrt())
    })
    .unwrap()
}

/// A deliberately bimodal (symmetric, non-unimodal) tabulated family for
/// exploratory sweeps outside the CSUM hypotheses.
pub fn bimodal_tabulated_family() -> Result<CsumFamily> {
    use crate::densities::TabulatedShape;
    let grid = Grid::symmetric(12.0, 1921)?;
    let spread = 1.5;
    let sig = 0.5;
    let norm = 2.0 * sig * (2.0 * std::f64::consts::PI).sqrt();
    let values = GridFunction::from_fn(grid, |x| {
        let a = (x - spread) / sig;
        let b = (x + spread) / sig;
        ((-0.5 * a * a).exp() + (-0.5 * b * b).exp()) / norm
    })?;
    let tab = TabulatedShape::new(values, None)?;
    CsumFamily::new(
        grid,
        vec![
            (
                0.5,
                ComponentShape::Analytic(CsumShape::gaussian(0.0, 1.0).unwrap()),
            ),
            (0.5, ComponentShape::Tabulated(tab)),
        ],
        Some(3.0),
    )
}
