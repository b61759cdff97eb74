//! Discrete-event simulator for RF-energy-harvesting wireless sensor networks
//! running ant-based energy-aware routing.
//!
//! The numeric modules ([`rf_link`], [`energy`], [`routing`]) are generic
//! over [`Scalar`]; the aliases below fix them to `f64`, which is what the
//! simulator uses.

// Validation uses `!(x > 0)` on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod energy;
pub mod harvester;
pub mod rf_link;
pub mod routing;
pub mod scalar;
pub mod sim;
pub mod types;

pub use harvester::{Antenna, CurveId, Harvest, HarvestCurve, HarvestSource, Receiver};
pub use routing::ProtocolKind;
pub use scalar::Scalar;
pub use types::{NodeId, SimTime};

pub type AntennaGain = rf_link::AntennaGain<f64>;
pub type LinkBudget = rf_link::LinkBudget<f64>;
pub type Battery = energy::Battery<f64>;
pub type ConsumptionProfile = energy::ConsumptionProfile<f64>;
pub type RoutingTable = routing::RoutingTable<f64>;
pub type ProtocolParams = routing::ProtocolParams<f64>;
pub type ForwardAnt = routing::ForwardAnt<f64>;
pub type BackwardAnt = routing::BackwardAnt<f64>;
pub type AntNode = routing::AntNode<f64>;
