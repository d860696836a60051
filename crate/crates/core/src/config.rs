//! Numeric defaults shared by the library entry points and the CLI.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Environment variable overriding the default density constant.
pub const DENSITY_CONSTANT_ENV: &str = "KOROBOV_QMC_CP";

/// Default `c_P`: the largest `1/n` below the band density minimum, which
/// sits at `M = 10` (ratio `log(10)/10 ~ 0.2303`).
pub const DEFAULT_DENSITY_CONSTANT: f64 = 0.2;

pub const DEFAULT_BOX_RADIUS: u64 = 50;

pub const DEFAULT_CALIBRATION_RANGE: u64 = 100_000;

/// Defaults echoed into every report the CLI writes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Defaults {
    pub c_p: f64,
    #[serde(rename = "K")]
    pub box_radius: u64,
    pub m_max: u64,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults {
            c_p: DEFAULT_DENSITY_CONSTANT,
            box_radius: DEFAULT_BOX_RADIUS,
            m_max: DEFAULT_CALIBRATION_RANGE,
        }
    }
}

impl Defaults {
    /// Built-in defaults with `c_P` taken from [`DENSITY_CONSTANT_ENV`] when set.
    pub fn from_env() -> Result<Self> {
        let mut defaults = Defaults::default();
        if let Ok(raw) = std::env::var(DENSITY_CONSTANT_ENV) {
            defaults.c_p = parse_density_constant(&raw)?;
        }
        Ok(defaults)
    }
}

pub fn parse_density_constant(raw: &str) -> Result<f64> {
    let c: f64 = raw
        .trim()
        .parse()
        .map_err(|_| crate::Error::Domain(format!("cannot parse density constant {raw:?}")))?;
    if !(c > 0.0 && c < 1.0) {
        return domain(format!("density constant must lie in (0, 1), got {c}"));
    }
    Ok(c)
}
