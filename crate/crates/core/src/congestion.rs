//! Per-layer capacity/demand bookkeeping shared by the staircase and grid graphs.
//!
//! Congestion of an edge on a layer is `p = u / r` (demand over capacity) and
//! its routing weight is `length / (1 - p)`. Demand never exceeds capacity.

use crate::layers::Layer;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CongestionError {
    #[error("edge saturated on layer {layer} (u={demand}, r={capacity})")]
    EdgeSaturated {
        layer: Layer,
        demand: f64,
        capacity: f64,
    },
    #[error("demand {demand} + {increment} would exceed capacity {capacity} on layer {layer}")]
    OverflowRejected {
        layer: Layer,
        demand: f64,
        increment: f64,
        capacity: f64,
    },
    #[error("pitch must be positive")]
    ZeroPitch,
}

/// Demand charged per net on each resource it occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DemandMode {
    #[default]
    Plain,
    /// Edge-placement-error aware: each wire occupies 1.5 tracks.
    Epe,
}

impl DemandMode {
    pub fn increment(self) -> f64 {
        match self {
            DemandMode::Plain => 1.0,
            DemandMode::Epe => 1.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerUsage {
    pub layer: Layer,
    pub capacity: f64,
    pub demand: f64,
}

impl LayerUsage {
    pub fn new(layer: Layer, capacity: f64) -> Self {
        Self {
            layer,
            capacity,
            demand: 0.0,
        }
    }

    /// `u / r`; zero-capacity layers report 1.
    pub fn congestion(&self) -> f64 {
        if self.capacity <= 0.0 {
            1.0
        } else {
            self.demand / self.capacity
        }
    }

    pub fn admits(&self, increment: f64) -> bool {
        self.demand + increment <= self.capacity
    }
}

/// `length / (1 - p)` for the given layer state.
pub fn edge_weight(length: f64, usage: &LayerUsage) -> Result<f64, CongestionError> {
    let p = usage.congestion();
    if usage.capacity <= 0.0 || p >= 1.0 {
        return Err(CongestionError::EdgeSaturated {
            layer: usage.layer,
            demand: usage.demand,
            capacity: usage.capacity,
        });
    }
    Ok(length / (1.0 - p))
}

pub fn update_demand(usage: &mut LayerUsage, mode: DemandMode) -> Result<(), CongestionError> {
    let inc = mode.increment();
    if !usage.admits(inc) {
        return Err(CongestionError::OverflowRejected {
            layer: usage.layer,
            demand: usage.demand,
            increment: inc,
            capacity: usage.capacity,
        });
    }
    usage.demand += inc;
    Ok(())
}

/// Capacity and demand of one edge, one entry per usable layer in ascending order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EdgeState {
    pub layers: Vec<LayerUsage>,
}

impl EdgeState {
    pub fn layer(&self, layer: Layer) -> Option<&LayerUsage> {
        self.layers.iter().find(|u| u.layer == layer)
    }

    pub fn layer_mut(&mut self, layer: Layer) -> Option<&mut LayerUsage> {
        self.layers.iter_mut().find(|u| u.layer == layer)
    }
}

/// Identifies a capacity-bearing edge in either base graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeRef {
    Staircase(u32),
    Grid(u32),
}

impl fmt::Display for EdgeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeRef::Staircase(i) => write!(f, "s{i}"),
            EdgeRef::Grid(i) => write!(f, "g{i}"),
        }
    }
}

/// An edge on a specific layer: the unit of demand accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Resource {
    pub edge: EdgeRef,
    pub layer: Layer,
}
