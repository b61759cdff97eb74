//! Table-driven model of the Powercast RF harvesters.
//!
//! Each [`HarvestCurve`] is a list of measured knots (distance in feet,
//! harvested power, charging current, recharge time). Between knots power and
//! current are interpolated log-linearly; past the last knot nothing is
//! harvested.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const METERS_PER_FOOT: f64 = 0.3048;

/// Allowed deviation of `current × recharge_time` from its per-curve mean.
pub const CHARGE_CONSTANCY_TOLERANCE: f64 = 0.10;

const EMBEDDED_CURVES: &str = include_str!("../data/powercast_curves.txt");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarvestError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown receiver {0:?} (expected P2110 or P1110)")]
    UnknownReceiver(String),
    #[error("unknown antenna {0:?} (expected dipole or patch)")]
    UnknownAntenna(String),
    #[error("curve {0}: needs at least 2 knots, got {1}")]
    TooFewKnots(CurveId, usize),
    #[error("curve {id}: distance column not strictly increasing at knot {index}")]
    NonMonotoneDistance { id: CurveId, index: usize },
    #[error("curve {id}: {column} column has the wrong trend at knot {index}")]
    NonMonotoneColumn {
        id: CurveId,
        column: &'static str,
        index: usize,
    },
    #[error("curve {id}: knot {index} has a negative or non-finite value")]
    InvalidValue { id: CurveId, index: usize },
    #[error("curve {id}: current x recharge time deviates {deviation:.3} from the curve mean")]
    InconsistentCharge { id: CurveId, deviation: f64 },
    #[error("duplicate curve {0}")]
    DuplicateCurve(CurveId),
    #[error("no harvest: charging current is zero")]
    NoHarvest,
    #[error("{0} must be a non-negative finite number")]
    InvalidArgument(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Receiver {
    P2110,
    P1110,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Antenna {
    Dipole,
    Patch,
}

impl FromStr for Receiver {
    type Err = HarvestError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "P2110" => Ok(Self::P2110),
            "P1110" => Ok(Self::P1110),
            _ => Err(HarvestError::UnknownReceiver(s.to_string())),
        }
    }
}

impl FromStr for Antenna {
    type Err = HarvestError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dipole" => Ok(Self::Dipole),
            "patch" => Ok(Self::Patch),
            _ => Err(HarvestError::UnknownAntenna(s.to_string())),
        }
    }
}

impl fmt::Display for Receiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::P2110 => "P2110",
            Self::P1110 => "P1110",
        })
    }
}

impl fmt::Display for Antenna {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Dipole => "dipole",
            Self::Patch => "patch",
        })
    }
}

/// Receiver/antenna pair identifying a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CurveId {
    pub receiver: Receiver,
    pub antenna: Antenna,
}

impl CurveId {
    pub const ALL: [CurveId; 4] = [
        CurveId {
            receiver: Receiver::P2110,
            antenna: Antenna::Dipole,
        },
        CurveId {
            receiver: Receiver::P2110,
            antenna: Antenna::Patch,
        },
        CurveId {
            receiver: Receiver::P1110,
            antenna: Antenna::Dipole,
        },
        CurveId {
            receiver: Receiver::P1110,
            antenna: Antenna::Patch,
        },
    ];

    pub fn new(receiver: Receiver, antenna: Antenna) -> Self {
        Self { receiver, antenna }
    }
}

impl fmt::Display for CurveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.receiver, self.antenna)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Knot {
    pub distance_ft: f64,
    pub power_uw: f64,
    pub current_ua: f64,
    pub recharge_h: f64,
}

/// Harvested power and charging current at some distance.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Harvest {
    pub power_uw: f64,
    pub current_ua: f64,
}

impl Harvest {
    pub const NONE: Harvest = Harvest {
        power_uw: 0.0,
        current_ua: 0.0,
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarvestCurve {
    pub id: CurveId,
    knots: Vec<Knot>,
}

impl HarvestCurve {
    /// Builds a curve, enforcing the monotonicity and constant-charge structure
    /// of the measured tables.
    pub fn new(id: CurveId, knots: Vec<Knot>) -> Result<Self, HarvestError> {
        if knots.len() < 2 {
            return Err(HarvestError::TooFewKnots(id, knots.len()));
        }
        for (index, k) in knots.iter().enumerate() {
            let vals = [k.distance_ft, k.power_uw, k.current_ua, k.recharge_h];
            if vals.iter().any(|v| !v.is_finite() || *v < 0.0) || k.distance_ft == 0.0 {
                return Err(HarvestError::InvalidValue { id, index });
            }
        }
        for (i, w) in knots.windows(2).enumerate() {
            let (a, b) = (&w[0], &w[1]);
            let index = i + 1;
            if b.distance_ft <= a.distance_ft {
                return Err(HarvestError::NonMonotoneDistance { id, index });
            }
            if b.power_uw > a.power_uw {
                return Err(HarvestError::NonMonotoneColumn {
                    id,
                    column: "power",
                    index,
                });
            }
            if b.current_ua > a.current_ua {
                return Err(HarvestError::NonMonotoneColumn {
                    id,
                    column: "current",
                    index,
                });
            }
            if b.recharge_h < a.recharge_h {
                return Err(HarvestError::NonMonotoneColumn {
                    id,
                    column: "recharge time",
                    index,
                });
            }
        }
        let curve = Self { id, knots };
        let deviation = curve.charge_deviation();
        if deviation > CHARGE_CONSTANCY_TOLERANCE {
            return Err(HarvestError::InconsistentCharge { id, deviation });
        }
        Ok(curve)
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    pub fn max_distance_ft(&self) -> f64 {
        self.knots[self.knots.len() - 1].distance_ft
    }

    /// `current × recharge_time` per knot, in mAh.
    pub fn implied_charges_mah(&self) -> Vec<f64> {
        self.knots
            .iter()
            .map(|k| k.current_ua * k.recharge_h / 1000.0)
            .collect()
    }

    /// Largest relative deviation of the implied charge from its mean.
    pub fn charge_deviation(&self) -> f64 {
        let q = self.implied_charges_mah();
        let mean = q.iter().sum::<f64>() / q.len() as f64;
        if mean == 0.0 {
            return 0.0;
        }
        q.iter()
            .map(|v| ((v - mean) / mean).abs())
            .fold(0.0, f64::max)
    }

    /// Harvest at `distance_ft`: exact at knots, log-linear between them,
    /// clamped before the first knot and zero past the last.
    pub fn harvest_at(&self, distance_ft: f64) -> Harvest {
        let first = &self.knots[0];
        if !(distance_ft > first.distance_ft) {
            return Harvest {
                power_uw: first.power_uw,
                current_ua: first.current_ua,
            };
        }
        if distance_ft > self.max_distance_ft() {
            return Harvest::NONE;
        }
        let hi = self.knots.partition_point(|k| k.distance_ft < distance_ft);
        let b = &self.knots[hi];
        if b.distance_ft == distance_ft {
            return Harvest {
                power_uw: b.power_uw,
                current_ua: b.current_ua,
            };
        }
        let a = &self.knots[hi - 1];
        let t = (distance_ft - a.distance_ft) / (b.distance_ft - a.distance_ft);
        Harvest {
            power_uw: log_lerp(a.power_uw, b.power_uw, t),
            current_ua: log_lerp(a.current_ua, b.current_ua, t),
        }
    }

    pub fn harvest_at_meters(&self, distance_m: f64) -> Harvest {
        self.harvest_at(distance_m / METERS_PER_FOOT)
    }
}

fn log_lerp(a: f64, b: f64, t: f64) -> f64 {
    if a > 0.0 && b > 0.0 {
        (a.ln() + t * (b.ln() - a.ln())).exp()
    } else {
        a + t * (b - a)
    }
}

/// Parses curve tables.
///
/// ```text
/// curve: P2110 dipole
/// distance_ft,power_uW,current_uA,recharge_h
/// 2,3687,3073,22.08
/// ```
///
/// Blank lines and `#` comments are ignored. Several blocks may follow each
/// other; each starts with a `curve:` tag line and a header row.
pub fn load_curves(text: &str) -> Result<Vec<HarvestCurve>, HarvestError> {
    const HEADER: [&str; 4] = ["distance_ft", "power_uw", "current_ua", "recharge_h"];

    let mut blocks: Vec<(CurveId, Vec<Knot>)> = Vec::new();
    let mut expect_header = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| HarvestError::Parse {
            line: line_no,
            message,
        };
        if let Some(tag) = line.strip_prefix("curve:") {
            let mut parts = tag.split_whitespace();
            let (Some(r), Some(a), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(err(format!(
                    "expected `curve: <receiver> <antenna>`, got {line:?}"
                )));
            };
            let id = CurveId::new(r.parse()?, a.parse()?);
            if blocks.iter().any(|(b, _)| *b == id) {
                return Err(HarvestError::DuplicateCurve(id));
            }
            blocks.push((id, Vec::new()));
            expect_header = true;
            continue;
        }
        let Some((_, knots)) = blocks.last_mut() else {
            return Err(err("data before the first `curve:` tag".into()));
        };
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if expect_header {
            let lower: Vec<String> = cells.iter().map(|c| c.to_ascii_lowercase()).collect();
            if lower != HEADER {
                return Err(err(format!("expected header `{}`", HEADER.join(","))));
            }
            expect_header = false;
            continue;
        }
        if cells.len() != 4 {
            return Err(err(format!("expected 4 columns, got {}", cells.len())));
        }
        let mut v = [0.0; 4];
        for (slot, cell) in v.iter_mut().zip(&cells) {
            *slot = cell
                .parse()
                .map_err(|_| err(format!("not a number: {cell:?}")))?;
        }
        knots.push(Knot {
            distance_ft: v[0],
            power_uw: v[1],
            current_ua: v[2],
            recharge_h: v[3],
        });
    }
    blocks
        .into_iter()
        .map(|(id, knots)| HarvestCurve::new(id, knots))
        .collect()
}

/// The four built-in measured curves.
pub fn embedded_curves() -> Vec<HarvestCurve> {
    load_curves(EMBEDDED_CURVES).expect("embedded curve table is valid")
}

pub fn embedded_curve(id: CurveId) -> HarvestCurve {
    embedded_curves()
        .into_iter()
        .find(|c| c.id == id)
        .expect("all four pairs are embedded")
}

/// Hours needed to put back `drawn_mah` at `charging_current_ua`.
pub fn recharge_time(drawn_mah: f64, charging_current_ua: f64) -> Result<f64, HarvestError> {
    if !drawn_mah.is_finite() || drawn_mah < 0.0 {
        return Err(HarvestError::InvalidArgument("drawn charge"));
    }
    if !charging_current_ua.is_finite() || charging_current_ua < 0.0 {
        return Err(HarvestError::InvalidArgument("charging current"));
    }
    if charging_current_ua == 0.0 {
        return Err(HarvestError::NoHarvest);
    }
    Ok(drawn_mah / (charging_current_ua / 1000.0))
}

/// A placed RF transmitter feeding nodes through a harvest curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarvestSource {
    /// (x, y) in metres.
    pub position: (f64, f64),
    pub curve: HarvestCurve,
    pub enabled: bool,
}

impl HarvestSource {
    pub fn harvest_for(&self, point: (f64, f64)) -> Harvest {
        if !self.enabled {
            return Harvest::NONE;
        }
        let d = ((point.0 - self.position.0).powi(2) + (point.1 - self.position.1).powi(2)).sqrt();
        self.curve.harvest_at_meters(d)
    }
}
