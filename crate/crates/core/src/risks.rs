//! The risk menu: moment risks (MSE, MAD, 0-1 loss) and entropy risks
//! (Shannon error entropy, Renyi error entropy, information potential), each
//! evaluated as a functional of a grid-sampled error density.
//!
//! All logarithms are natural. The conventions `0 * log 0 = 0` and
//! `0^alpha = 0` apply throughout.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{check_power_order, GridFunction};

/// Orders this close to 1 are rejected: `1/(1 - alpha)` loses all precision
/// there, and the Shannon functional is the right tool instead.
pub const ALPHA_GUARD_BAND: f64 = 1e-6;

/// A risk functional identifier, with the order parameter where one is needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RiskSpec {
    Mse,
    Mad,
    ZeroOne,
    ShannonEe,
    RenyiEe { alpha: f64 },
    InfoPotential { alpha: f64 },
}

impl RiskSpec {
    pub fn renyi(alpha: f64) -> Result<Self> {
        check_entropy_order(alpha)?;
        Ok(Self::RenyiEe { alpha })
    }

    pub fn info_potential(alpha: f64) -> Result<Self> {
        check_entropy_order(alpha)?;
        Ok(Self::InfoPotential { alpha })
    }

    pub fn alpha(&self) -> Option<f64> {
        match self {
            Self::RenyiEe { alpha } | Self::InfoPotential { alpha } => Some(*alpha),
            _ => None,
        }
    }

    /// Entropy-type risks do not change when the error density is translated.
    pub fn translation_invariant(&self) -> bool {
        matches!(
            self,
            Self::ShannonEe | Self::RenyiEe { .. } | Self::InfoPotential { .. }
        )
    }

    /// Shift search direction: every risk is minimized except the information
    /// potential with `alpha > 1`, which is maximized.
    pub fn maximize(&self) -> bool {
        matches!(self, Self::InfoPotential { alpha } if *alpha > 1.0)
    }

    /// Evaluate this risk on an error density.
    pub fn evaluate(&self, p: &GridFunction) -> Result<f64> {
        match self {
            Self::Mse => Ok(mse_risk(p)),
            Self::Mad => Ok(mad_risk(p)),
            Self::ZeroOne => Ok(zero_one_risk(p)),
            Self::ShannonEe => Ok(shannon_ee(p)),
            Self::RenyiEe { alpha } => renyi_ee(p, *alpha),
            Self::InfoPotential { alpha } => information_potential(p, *alpha),
        }
    }
}

impl fmt::Display for RiskSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Mse => write!(f, "mse"),
            Self::Mad => write!(f, "mad"),
            Self::ZeroOne => write!(f, "zero-one"),
            Self::ShannonEe => write!(f, "shannon"),
            Self::RenyiEe { alpha } => write!(f, "renyi:{alpha}"),
            Self::InfoPotential { alpha } => write!(f, "ip:{alpha}"),
        }
    }
}

impl FromStr for RiskSpec {
    type Err = Error;

    /// Accepts `mse | mad | zero-one | shannon | renyi:<alpha> | ip:<alpha>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "mse" => return Ok(Self::Mse),
            "mad" => return Ok(Self::Mad),
            "zero-one" => return Ok(Self::ZeroOne),
            "shannon" => return Ok(Self::ShannonEe),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("renyi:") {
            let alpha = parse_alpha(rest)?;
            return Self::renyi(alpha);
        }
        if let Some(rest) = s.strip_prefix("ip:") {
            let alpha = parse_alpha(rest)?;
            return Self::info_potential(alpha);
        }
        Err(Error::Config(format!(
            "unknown risk '{s}' (expected mse | mad | zero-one | shannon | renyi:<alpha> | ip:<alpha>)"
        )))
    }
}

fn parse_alpha(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::Config(format!("cannot parse alpha from '{s}'")))
}

/// Validate an entropy order: positive, finite, and outside the guard band
/// around 1.
pub fn check_entropy_order(alpha: f64) -> Result<()> {
    check_power_order(alpha)?;
    if (alpha - 1.0).abs() <= ALPHA_GUARD_BAND {
        return Err(Error::InvalidParameter(format!(
            "alpha = {alpha} is too close to 1; use the Shannon risk instead"
        )));
    }
    Ok(())
}

/// Second moment of the error: `integral of x^2 p(x)`.
pub fn mse_risk(p: &GridFunction) -> f64 {
    p.integrate_with(|x, v| x * x * v)
}

/// First absolute moment: `integral of |x| p(x)`.
pub fn mad_risk(p: &GridFunction) -> f64 {
    p.integrate_with(|x, v| x.abs() * v)
}

/// Mean 0-1 loss for a continuous error: `1 - p(0)`, with the density at the
/// origin linearly interpolated. Minimizing it maximizes the error density at
/// zero.
pub fn zero_one_risk(p: &GridFunction) -> f64 {
    1.0 - p.value_at(0.0)
}

/// Shannon differential entropy of the error, in nats.
pub fn shannon_ee(p: &GridFunction) -> f64 {
    p.integrate_with(|_, v| if v > 0.0 { -v * v.ln() } else { 0.0 })
}

/// The order-`alpha` information potential: `integral of p^alpha`.
pub fn information_potential(p: &GridFunction, alpha: f64) -> Result<f64> {
    check_entropy_order(alpha)?;
    p.power_integral(alpha)
}

/// Renyi entropy of order `alpha`: `log(information potential) / (1 - alpha)`.
pub fn renyi_ee(p: &GridFunction, alpha: f64) -> Result<f64> {
    let v = information_potential(p, alpha)?;
    if v <= 0.0 {
        return Err(Error::Numerical(format!(
            "information potential is {v}; its logarithm is undefined"
        )));
    }
    Ok(v.ln() / (1.0 - alpha))
}
