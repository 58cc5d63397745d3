//! Early global routing for mosaic floorplans.
//!
//! Lower metal layers route along block boundaries through a junction graph;
//! upper layers route over the blocks through a coarse bin grid. Each net is
//! searched on a per-net graph that connects both.

pub mod congestion;
pub mod floorplan;
pub mod geom;
pub mod grid;
pub mod hybrid;
pub mod io;
pub mod layers;
pub mod metrics;
pub mod router;
pub mod search;
pub mod staircase;
pub mod testkit;
