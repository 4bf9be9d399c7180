//! JSON run configurations. Seeds are required wherever randomness is used.

use std::path::Path;

use anyhow::{bail, Context};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use stit_core::{CompactSet, Direction, DirectionalMeasure, Point, Polygon};

pub fn load<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    Point,
    UnitSegment,
    UnitSquare,
    /// Regular 64-gon of circumradius 1 centred at the origin.
    Disc64,
}

/// A query set: a builtin shape or explicit convex pieces.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetSpec {
    Builtin { builtin: Builtin },
    Explicit(CompactSet),
}

impl SetSpec {
    pub fn resolve(&self) -> CompactSet {
        match self {
            SetSpec::Builtin { builtin } => match builtin {
                Builtin::Point => CompactSet::point(Point::origin()),
                Builtin::UnitSegment => Polygon::segment(Point::origin(), Point::new(1.0, 0.0)).into(),
                Builtin::UnitSquare => Polygon::unit_square().into(),
                Builtin::Disc64 => Polygon::regular(64, Point::origin(), 1.0).into(),
            },
            SetSpec::Explicit(k) => k.clone(),
        }
    }
}

fn default_directions() -> usize {
    16
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureConfig {
    pub measure: DirectionalMeasure,
    pub set: SetSpec,
    /// Number of equally spaced directions on which ζ is reported.
    #[serde(default = "default_directions")]
    pub directions: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub measure: DirectionalMeasure,
    pub window: Polygon,
    pub time: f64,
    pub seed: u64,
    #[serde(default)]
    pub retain_lineage: bool,
}

fn default_query_id() -> String {
    "query".into()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacityConfig {
    pub measure: DirectionalMeasure,
    pub set: SetSpec,
    pub time: f64,
    pub n: u64,
    pub seed: u64,
    /// Defaults to the hull of the set dilated by 10% of its diameter.
    #[serde(default)]
    pub window: Option<Polygon>,
    #[serde(default = "default_query_id")]
    pub query_id: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixingConfig {
    pub measure: DirectionalMeasure,
    /// Both default to the unit segment centred at the origin, perpendicular to the drift.
    #[serde(default)]
    pub a_set: Option<SetSpec>,
    #[serde(default)]
    pub b_set: Option<SetSpec>,
    pub direction_radians: f64,
    #[serde(default)]
    pub distances: Option<Vec<f64>>,
    pub time: f64,
    #[serde(default)]
    pub mc_n: Option<u64>,
    pub seed: u64,
}

impl MixingConfig {
    pub fn to_sweep(&self) -> stit_core::mixing::SweepConfig {
        let direction = Direction::from_angle(self.direction_radians);
        let mut cfg =
            stit_core::mixing::SweepConfig::default_segments(self.measure.clone(), direction, self.time, self.seed);
        if let Some(a) = &self.a_set {
            cfg.a_set = a.resolve();
        }
        if let Some(b) = &self.b_set {
            cfg.b_set = b.resolve();
        }
        if let Some(d) = &self.distances {
            cfg.distances = d.clone();
        }
        cfg.mc_n = self.mc_n;
        cfg
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterateConfig {
    pub measure: DirectionalMeasure,
    pub set: SetSpec,
    /// Time of the outer tessellation.
    pub time: f64,
    /// Time of the copies nested in each of its cells.
    pub extra_time: f64,
    pub n: u64,
    pub seed: u64,
    #[serde(default)]
    pub window: Option<Polygon>,
}

pub fn check_count(n: u64) -> anyhow::Result<u64> {
    if n == 0 {
        bail!("sample count n must be >= 1");
    }
    Ok(n)
}
