//! File formats, generators, reports and the run driver.

pub mod bookshelf;
pub mod config;
pub mod document;
pub mod generate;
pub mod report;
pub mod svg;

pub use config::{run, RunConfig, RunError, RunOutput};
pub use document::{parse_floorplan, DocumentError, FloorplanDocument};
pub use generate::generate_mosaic;
