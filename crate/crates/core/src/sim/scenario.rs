use serde::{Deserialize, Serialize};

use super::SimError;
use crate::energy::{Battery, ConsumptionProfile};
use crate::harvester::{
    embedded_curve, Antenna, CurveId, HarvestCurve, HarvestError, HarvestSource, Knot, Receiver,
};
use crate::routing::{ProtocolKind, ProtocolParams};
use crate::types::{NodeId, SimTime};

/// A powered RF transmitter placed in the field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarvestConfig {
    pub receiver: Receiver,
    pub antenna: Antenna,
    /// (x, y) in metres.
    pub position: (f64, f64),
    /// Measured knots replacing the built-in curve for this pair.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub knots: Option<Vec<Knot>>,
}

impl HarvestConfig {
    /// Source using the built-in curve of `receiver`/`antenna`.
    pub fn new(receiver: Receiver, antenna: Antenna, position: (f64, f64)) -> Self {
        Self {
            receiver,
            antenna,
            position,
            knots: None,
        }
    }

    pub fn curve(&self) -> Result<HarvestCurve, HarvestError> {
        let id = CurveId::new(self.receiver, self.antenna);
        match &self.knots {
            Some(knots) => HarvestCurve::new(id, knots.clone()),
            None => Ok(embedded_curve(id)),
        }
    }

    pub fn source(&self) -> Result<HarvestSource, HarvestError> {
        Ok(HarvestSource {
            position: self.position,
            curve: self.curve()?,
            enabled: true,
        })
    }
}

/// Everything one simulation run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Scenario {
    pub seed: u64,
    pub node_count: usize,
    /// Deployment area (width, height) in metres.
    pub area_m: (f64, f64),
    /// Unit-disk radio range in metres.
    pub radio_range_m: f64,
    pub data_rate_bps: u64,
    /// Size of one raw message in bits.
    pub packet_size_bits: u64,
    /// Routing header; the only part an overhearing ant-protocol node listens to.
    pub header_bits: u64,
    /// Size of ant and route-discovery frames in bits.
    pub control_bits: u64,
    pub cbr_interval_s: f64,
    /// When false no messages are generated and no ants are launched.
    pub traffic: bool,
    pub duration_s: f64,
    pub sample_interval_s: f64,
    pub harvest_tick_s: f64,
    pub protocol: ProtocolKind,
    pub consumption: ConsumptionProfile<f64>,
    pub battery: Battery<f64>,
    pub harvesting: Option<HarvestConfig>,
    pub protocol_params: ProtocolParams<f64>,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            seed: 1,
            node_count: 10,
            area_m: (200.0, 200.0),
            radio_range_m: 100.0,
            data_rate_bps: 250_000,
            packet_size_bits: 1_000_000,
            header_bits: 64,
            control_bits: 256,
            cbr_interval_s: 60.0,
            traffic: true,
            duration_s: 3600.0,
            sample_interval_s: 60.0,
            harvest_tick_s: 1.0,
            protocol: ProtocolKind::Ieeabr,
            consumption: ConsumptionProfile::waspmote(),
            battery: Battery::waspmote(),
            harvesting: None,
            protocol_params: ProtocolParams::default(),
        }
    }
}

impl Scenario {
    /// Standard deployment area for a node count.
    pub fn area_for(node_count: usize) -> (f64, f64) {
        match node_count {
            0..=10 => (200.0, 200.0),
            11..=20 => (300.0, 300.0),
            21..=30 => (400.0, 400.0),
            31..=49 => (500.0, 500.0),
            _ => (600.0, 600.0),
        }
    }

    pub fn sink(&self) -> NodeId {
        NodeId::from(self.node_count - 1)
    }

    pub fn duration(&self) -> SimTime {
        SimTime::from_secs_f64(self.duration_s)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::InvalidScenario(m.to_string()));
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if self.node_count < 2 {
            return bad("node_count must be at least 2");
        }
        if u32::try_from(self.node_count).is_err() {
            return bad("node_count too large");
        }
        if !pos(self.area_m.0) || !pos(self.area_m.1) {
            return bad("area_m must be positive");
        }
        if !pos(self.radio_range_m) {
            return bad("radio_range_m must be positive");
        }
        if self.data_rate_bps == 0 {
            return bad("data_rate_bps must be positive");
        }
        if self.packet_size_bits == 0 || self.header_bits == 0 || self.control_bits == 0 {
            return bad("packet_size_bits, header_bits and control_bits must be positive");
        }
        if !pos(self.duration_s) {
            return bad("duration_s must be positive");
        }
        if !pos(self.cbr_interval_s) {
            return bad("cbr_interval_s must be positive");
        }
        if !pos(self.sample_interval_s) {
            return bad("sample_interval_s must be positive");
        }
        if !pos(self.harvest_tick_s) {
            return bad("harvest_tick_s must be positive");
        }
        if let Some(h) = &self.harvesting {
            if !h.position.0.is_finite() || !h.position.1.is_finite() {
                return bad("harvesting.position must be finite");
            }
            h.curve()?;
        }
        self.consumption.validate()?;
        self.battery.validate()?;
        self.protocol_params.validate()?;
        Ok(())
    }
}
