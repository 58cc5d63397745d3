//! Metal layer stack with preferred directions and the staircase/grid split.

use crate::geom::Orientation;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Metal layer index, starting at 1.
pub type Layer = u8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LayerError {
    #[error("layer count {0} must be even and at least 2")]
    BadMax(u8),
    #[error("split layer {split} must lie in 2..={max}")]
    BadSplit { split: u8, max: u8 },
}

/// Layers `1..=split` route through block-boundary channels; layers
/// `split+1..=max` route over the blocks. Odd layers run horizontally, even
/// layers vertically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerStack {
    max: Layer,
    split: Layer,
}

impl LayerStack {
    pub fn new(max: Layer, split: Layer) -> Result<Self, LayerError> {
        if max < 2 || !max.is_multiple_of(2) {
            return Err(LayerError::BadMax(max));
        }
        if split < 2 || split > max {
            return Err(LayerError::BadSplit { split, max });
        }
        Ok(Self { max, split })
    }

    pub fn max(&self) -> Layer {
        self.max
    }

    pub fn split(&self) -> Layer {
        self.split
    }

    pub fn direction(layer: Layer) -> Orientation {
        if layer % 2 == 1 {
            Orientation::Horizontal
        } else {
            Orientation::Vertical
        }
    }

    pub fn staircase_layers(&self) -> impl Iterator<Item = Layer> {
        1..=self.split
    }

    pub fn grid_layers(&self) -> impl Iterator<Item = Layer> {
        self.split + 1..=self.max
    }

    pub fn has_grid_layers(&self) -> bool {
        self.split < self.max
    }

    pub fn staircase_layers_for(&self, o: Orientation) -> impl Iterator<Item = Layer> {
        self.staircase_layers().filter(move |&l| Self::direction(l) == o)
    }

    pub fn grid_layers_for(&self, o: Orientation) -> impl Iterator<Item = Layer> {
        self.grid_layers().filter(move |&l| Self::direction(l) == o)
    }

    /// Lowest staircase layer carrying orientation `o` (M1 or M2).
    pub fn lowest_staircase(&self, o: Orientation) -> Layer {
        match o {
            Orientation::Horizontal => 1,
            Orientation::Vertical => 2,
        }
    }
}

impl Default for LayerStack {
    fn default() -> Self {
        Self { max: 8, split: 2 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_partition_the_stack() {
        let s = LayerStack::new(8, 2).unwrap();
        assert_eq!(s.staircase_layers().collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(s.grid_layers().collect::<Vec<_>>(), vec![3, 4, 5, 6, 7, 8]);
        assert_eq!(
            s.grid_layers_for(Orientation::Horizontal).collect::<Vec<_>>(),
            vec![3, 5, 7]
        );
        let full = LayerStack::new(8, 8).unwrap();
        assert!(!full.has_grid_layers());
        assert_eq!(full.staircase_layers_for(Orientation::Vertical).count(), 4);
    }

    #[test]
    fn rejects_bad_configs() {
        assert_eq!(LayerStack::new(7, 2), Err(LayerError::BadMax(7)));
        assert!(LayerStack::new(8, 1).is_err());
        assert!(LayerStack::new(8, 9).is_err());
    }
}
