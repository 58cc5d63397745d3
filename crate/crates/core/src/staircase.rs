//! Junction graph over T-junctions: block-boundary channel routing on the
//! lower layer group.

use crate::congestion::{CongestionError, EdgeState, LayerUsage};
use crate::floorplan::{extract_junctions, BlockId, Floorplan, FloorplanError, JunctionId, TJunction};
use crate::geom::{Coord, Orientation, Point};
use crate::layers::LayerStack;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StaircaseError {
    #[error(transparent)]
    Floorplan(#[from] FloorplanError),
    #[error(transparent)]
    Capacity(#[from] CongestionError),
    #[error("wall endpoint {0} is not a junction")]
    DanglingWall(Point),
}

/// A wall piece between two adjacent junctions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaircaseSegment {
    pub id: u32,
    pub ends: [JunctionId; 2],
    pub a: Point,
    pub b: Point,
    pub orientation: Orientation,
    pub length: Coord,
    /// The two blocks on either side of the wall.
    pub blocks: [BlockId; 2],
    pub state: EdgeState,
}

impl StaircaseSegment {
    pub fn other_end(&self, j: JunctionId) -> JunctionId {
        if self.ends[0] == j {
            self.ends[1]
        } else {
            self.ends[0]
        }
    }
}

/// Track capacity of a segment: `floor(length / pitch)`.
pub fn segment_capacity(length: Coord, pitch: Coord) -> Result<u64, CongestionError> {
    if pitch <= 0 {
        return Err(CongestionError::ZeroPitch);
    }
    Ok((length.max(0) / pitch) as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JunctionGraph {
    pub junctions: Vec<TJunction>,
    pub segments: Vec<StaircaseSegment>,
    /// Segment ids incident to each junction.
    pub incident: Vec<Vec<u32>>,
    /// Junctions lying on each block's outline.
    pub block_junctions: Vec<Vec<JunctionId>>,
    /// Blocks whose outline passes through each junction.
    pub junction_blocks: Vec<Vec<BlockId>>,
}

impl JunctionGraph {
    pub fn junction(&self, id: JunctionId) -> &TJunction {
        &self.junctions[id.index()]
    }

    pub fn vertex_count(&self) -> usize {
        self.junctions.len()
    }

    pub fn edge_count(&self) -> usize {
        self.segments.len()
    }

    /// Replaces the capacity of `segment` on `layer`. Returns false if the
    /// segment does not carry that layer.
    pub fn set_capacity(&mut self, segment: u32, layer: u8, capacity: f64) -> bool {
        match self
            .segments
            .get_mut(segment as usize)
            .and_then(|s| s.state.layer_mut(layer))
        {
            Some(u) => {
                u.capacity = capacity;
                true
            }
            None => false,
        }
    }
}

/// Builds the junction graph. Walls on the die outline are not routing edges.
pub fn build_junction_graph(
    fp: &Floorplan,
    pitch: Coord,
    layers: &LayerStack,
) -> Result<JunctionGraph, StaircaseError> {
    if pitch <= 0 {
        return Err(CongestionError::ZeroPitch.into());
    }
    let junctions = extract_junctions(fp)?;
    let index: BTreeMap<Point, JunctionId> = junctions.iter().map(|j| (j.location, j.id)).collect();

    // Junction coordinates along each vertical (x) and horizontal (y) line.
    let mut by_x: BTreeMap<Coord, Vec<Coord>> = BTreeMap::new();
    let mut by_y: BTreeMap<Coord, Vec<Coord>> = BTreeMap::new();
    for j in &junctions {
        by_x.entry(j.location.x).or_default().push(j.location.y);
        by_y.entry(j.location.y).or_default().push(j.location.x);
    }
    for v in by_x.values_mut().chain(by_y.values_mut()) {
        v.sort_unstable();
    }

    let die = fp.die;
    let mut pieces: BTreeMap<(Point, Point), Vec<BlockId>> = BTreeMap::new();
    for block in &fp.blocks {
        for (lo, hi, _) in block.outline.sides() {
            let vertical = lo.x == hi.x;
            let on_die = if vertical {
                lo.x == die.x_lo || lo.x == die.x_hi
            } else {
                lo.y == die.y_lo || lo.y == die.y_hi
            };
            if on_die {
                continue;
            }
            let (line, from, to, coords) = if vertical {
                (lo.x, lo.y, hi.y, by_x.get(&lo.x))
            } else {
                (lo.y, lo.x, hi.x, by_y.get(&lo.y))
            };
            let coords = coords.map(Vec::as_slice).unwrap_or(&[]);
            let start = coords.partition_point(|&c| c < from);
            let end = coords.partition_point(|&c| c <= to);
            let on_side = &coords[start..end];
            let point = |c: Coord| if vertical { Point::new(line, c) } else { Point::new(c, line) };
            if on_side.first() != Some(&from) {
                return Err(StaircaseError::DanglingWall(point(from)));
            }
            if on_side.last() != Some(&to) {
                return Err(StaircaseError::DanglingWall(point(to)));
            }
            for w in on_side.windows(2) {
                pieces.entry((point(w[0]), point(w[1]))).or_default().push(block.id);
            }
        }
    }

    let mut segments = Vec::with_capacity(pieces.len());
    let mut incident = vec![Vec::new(); junctions.len()];
    let mut block_junctions = vec![Vec::new(); fp.blocks.len()];
    let mut junction_blocks = vec![Vec::new(); junctions.len()];
    for ((a, b), mut blocks) in pieces {
        blocks.sort();
        blocks.dedup();
        let sides: [BlockId; 2] = match blocks.as_slice() {
            &[x, y] => [x, y],
            _ => {
                return Err(StaircaseError::Floorplan(FloorplanError::NonMosaicFloorplan(
                    format!("wall {a}-{b} borders {} block(s)", blocks.len()),
                )))
            }
        };
        let orientation = if a.x == b.x {
            Orientation::Vertical
        } else {
            Orientation::Horizontal
        };
        let length = a.manhattan(b);
        let cap = segment_capacity(length, pitch)? as f64;
        let state = EdgeState {
            layers: layers
                .staircase_layers_for(orientation)
                .map(|l| LayerUsage::new(l, cap))
                .collect(),
        };
        let id = segments.len() as u32;
        let ends = [index[&a], index[&b]];
        for &j in &ends {
            incident[j.index()].push(id);
            for &blk in &sides {
                block_junctions[blk.index()].push(j);
                junction_blocks[j.index()].push(blk);
            }
        }
        segments.push(StaircaseSegment {
            id,
            ends,
            a,
            b,
            orientation,
            length,
            blocks: sides,
            state,
        });
    }
    for v in block_junctions.iter_mut() {
        v.sort();
        v.dedup();
    }
    for v in junction_blocks.iter_mut() {
        v.sort();
        v.dedup();
    }

    Ok(JunctionGraph {
        junctions,
        segments,
        incident,
        block_junctions,
        junction_blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::fixtures::{block, two_blocks};
    use crate::geom::Rect;

    #[test]
    fn capacity_examples() {
        assert_eq!(segment_capacity(100, 10).unwrap(), 10);
        assert_eq!(segment_capacity(95, 10).unwrap(), 9);
        assert_eq!(segment_capacity(5, 10).unwrap(), 0);
        assert_eq!(segment_capacity(5, 0), Err(CongestionError::ZeroPitch));
    }

    #[test]
    fn two_blocks_give_one_vertical_edge() {
        let g = build_junction_graph(&two_blocks(), 10, &LayerStack::default()).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
        let s = &g.segments[0];
        assert_eq!(s.orientation, Orientation::Vertical);
        assert_eq!(s.length, 60);
        // Vertical walls live on M2 only in the default split.
        assert_eq!(s.state.layers.len(), 1);
        assert_eq!(s.state.layers[0].layer, 2);
        assert_eq!(s.state.layers[0].capacity, 6.0);
        assert_eq!(g.block_junctions[0], vec![JunctionId(0), JunctionId(1)]);
    }

    #[test]
    fn single_block_graph_is_empty() {
        let fp = Floorplan::new(
            Rect::new(0, 0, 10, 10).unwrap(),
            vec![block("a", (0, 0, 10, 10))],
            vec![],
        )
        .unwrap();
        let g = build_junction_graph(&fp, 1, &LayerStack::default()).unwrap();
        assert_eq!(g.vertex_count(), 0);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn t_shape_splits_the_through_wall() {
        // Left block spans full height; right column cut horizontally.
        let fp = Floorplan::new(
            Rect::new(0, 0, 100, 100).unwrap(),
            vec![
                block("l", (0, 0, 50, 100)),
                block("rb", (50, 0, 100, 40)),
                block("rt", (50, 40, 100, 100)),
            ],
            vec![],
        )
        .unwrap();
        let g = build_junction_graph(&fp, 10, &LayerStack::new(8, 8).unwrap()).unwrap();
        assert_eq!(g.vertex_count(), 4);
        // x=50 wall split at y=40 into two pieces, plus the horizontal cut.
        assert_eq!(g.edge_count(), 3);
        let horizontal: Vec<_> = g
            .segments
            .iter()
            .filter(|s| s.orientation == Orientation::Horizontal)
            .collect();
        assert_eq!(horizontal.len(), 1);
        assert_eq!(horizontal[0].length, 50);
        let layers: Vec<u8> = horizontal[0].state.layers.iter().map(|u| u.layer).collect();
        assert_eq!(layers, vec![1, 3, 5, 7]);
    }

    #[test]
    fn zero_pitch_is_rejected() {
        assert!(matches!(
            build_junction_graph(&two_blocks(), 0, &LayerStack::default()),
            Err(StaircaseError::Capacity(CongestionError::ZeroPitch))
        ));
    }
}
