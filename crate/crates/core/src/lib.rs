//! Motion planning through gadgets: gadget models, networks, simulation
//! checking, planarity, door-universality compilation and a catalog of
//! verified constructions.

pub mod catalog;
pub mod classify;
pub mod cli;
pub mod compiler;
pub mod dot;
pub mod embedding;
pub mod format;
pub mod gadget;
pub mod lts;
pub mod network;
pub mod packed;
pub mod planarity;
pub mod simulation;

pub use gadget::{Gadget, RawGadget};
pub use network::{build_network, Network, NetworkBuilder, NetworkSpec};
