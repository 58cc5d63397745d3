//! Floorplan data model: blocks, pins, nets, and T-junction extraction.

use crate::geom::{bounding_box, Coord, Dir, Point, Rect};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BlockId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NetId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct JunctionId(pub u32);

impl BlockId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl NetId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl JunctionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockKind {
    HardMacro,
    SoftBlock,
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlockKind::HardMacro => "hard",
            BlockKind::SoftBlock => "soft",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub id: BlockId,
    pub name: String,
    pub outline: Rect,
    pub kind: BlockKind,
    /// Highest metal layer consumed by the block's internal routing.
    pub reserved_up_to: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pin {
    pub net: NetId,
    pub block: BlockId,
    pub location: Point,
    /// Metal layer of the pin shape, 1 or 2.
    pub layer: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Net {
    pub id: NetId,
    pub name: String,
    pub pins: Vec<Pin>,
}

impl Net {
    pub fn degree(&self) -> usize {
        self.pins.len()
    }

    pub fn pin_points(&self) -> impl Iterator<Item = Point> + '_ {
        self.pins.iter().map(|p| p.location)
    }
}

/// Half-perimeter of the pins' bounding box.
pub fn hpwl(net: &Net) -> Coord {
    bounding_box(net.pin_points())
        .map(|(lo, hi)| (hi.x - lo.x) + (hi.y - lo.y))
        .unwrap_or(0)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FloorplanError {
    #[error("block {0} has an invalid reserved layer {1} (must be at least 2)")]
    ReservedLayer(String, u8),
    #[error("pin of net {net} references unknown block index {block}")]
    UnknownBlock { net: String, block: u32 },
    #[error("net {0} has fewer than two distinct pins")]
    DegenerateNet(String),
    #[error("pin of net {0} sits on layer {1}; pins must be on layer 1 or 2")]
    PinLayer(String, u8),
    #[error("floorplan is not a mosaic: {0}")]
    NonMosaicFloorplan(String),
    #[error("four-way wall crossing at {0}")]
    DegenerateCross(Point),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Floorplan {
    pub die: Rect,
    pub blocks: Vec<Block>,
    pub nets: Vec<Net>,
}

impl Floorplan {
    /// Assembles a floorplan, re-numbering ids to positions and removing duplicate
    /// pins (same block and location) within each net.
    pub fn new(die: Rect, mut blocks: Vec<Block>, mut nets: Vec<Net>) -> Result<Self, FloorplanError> {
        for (i, b) in blocks.iter_mut().enumerate() {
            b.id = BlockId(i as u32);
            if b.reserved_up_to < 2 {
                return Err(FloorplanError::ReservedLayer(b.name.clone(), b.reserved_up_to));
            }
        }
        for (i, net) in nets.iter_mut().enumerate() {
            net.id = NetId(i as u32);
            let mut seen = BTreeSet::new();
            net.pins.retain(|p| seen.insert((p.block, p.location)));
            for pin in &mut net.pins {
                pin.net = net.id;
                if pin.block.index() >= blocks.len() {
                    return Err(FloorplanError::UnknownBlock {
                        net: net.name.clone(),
                        block: pin.block.0,
                    });
                }
                if !(1..=2).contains(&pin.layer) {
                    return Err(FloorplanError::PinLayer(net.name.clone(), pin.layer));
                }
            }
            if net.pins.len() < 2 {
                return Err(FloorplanError::DegenerateNet(net.name.clone()));
            }
        }
        Ok(Self { die, blocks, nets })
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, id: BlockId) -> &Block {
        &self.blocks[id.index()]
    }
}

/// Outcome of [`validate_mosaic`]. The floorplan passes iff every list is empty
/// and the coverage gap is zero.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MosaicReport {
    pub outside_die: Vec<BlockId>,
    /// Die area minus total block area.
    pub coverage_gap: i128,
    pub overlaps: Vec<(BlockId, BlockId)>,
    pub crossings: Vec<Point>,
    /// `(net, pin index)` of pins that are not inside their owner block.
    pub pins_outside: Vec<(NetId, usize)>,
}

impl MosaicReport {
    pub fn passes(&self) -> bool {
        self.is_tiling() && self.crossings.is_empty() && self.pins_outside.is_empty()
    }

    /// Blocks tile the die exactly (crossings and pins aside).
    pub fn is_tiling(&self) -> bool {
        self.outside_die.is_empty() && self.coverage_gap == 0 && self.overlaps.is_empty()
    }

    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        if !self.outside_die.is_empty() {
            parts.push(format!("{} block(s) outside the die", self.outside_die.len()));
        }
        if self.coverage_gap != 0 {
            parts.push(format!("coverage gap {}", self.coverage_gap));
        }
        for (a, b) in &self.overlaps {
            parts.push(format!("blocks {} and {} overlap", a.0, b.0));
        }
        for p in &self.crossings {
            parts.push(format!("four-way crossing at {p}"));
        }
        for (n, i) in &self.pins_outside {
            parts.push(format!("pin {i} of net {} outside its block", n.0));
        }
        if parts.is_empty() {
            "ok".to_string()
        } else {
            parts.join("; ")
        }
    }
}

fn corner_counts(blocks: &[Block]) -> HashMap<Point, u8> {
    let mut counts: HashMap<Point, u8> = HashMap::with_capacity(blocks.len() * 4);
    for b in blocks {
        for c in b.outline.corners() {
            *counts.entry(c).or_default() += 1;
        }
    }
    counts
}

pub fn validate_mosaic(fp: &Floorplan) -> MosaicReport {
    let mut report = MosaicReport::default();
    let mut covered: i128 = 0;
    for b in &fp.blocks {
        if !fp.die.contains_rect(&b.outline) {
            report.outside_die.push(b.id);
        }
        covered += b.outline.area();
    }
    report.coverage_gap = fp.die.area() - covered;

    // Sweep over x to find overlapping pairs.
    let mut order: Vec<usize> = (0..fp.blocks.len()).collect();
    order.sort_by_key(|&i| (fp.blocks[i].outline.x_lo, i));
    for (k, &i) in order.iter().enumerate() {
        let ri = fp.blocks[i].outline;
        for &j in &order[k + 1..] {
            let rj = fp.blocks[j].outline;
            if rj.x_lo >= ri.x_hi {
                break;
            }
            if ri.interiors_overlap(&rj) {
                report.overlaps.push((BlockId(i.min(j) as u32), BlockId(i.max(j) as u32)));
            }
        }
    }
    report.overlaps.sort();

    let mut crossings: Vec<Point> = corner_counts(&fp.blocks)
        .into_iter()
        .filter(|&(_, c)| c >= 4)
        .map(|(p, _)| p)
        .collect();
    crossings.sort();
    report.crossings = crossings;

    for net in &fp.nets {
        for (i, pin) in net.pins.iter().enumerate() {
            let inside = fp
                .blocks
                .get(pin.block.index())
                .is_some_and(|b| b.outline.contains(pin.location));
            if !inside {
                report.pins_outside.push((net.id, i));
            }
        }
    }
    report
}

/// A point where exactly three wall segments meet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TJunction {
    pub id: JunctionId,
    pub location: Point,
    pub arms: [Dir; 3],
}

/// All T-junctions of a mosaic floorplan, ordered by location.
///
/// Die-boundary points where an interior wall meets the die edge count as
/// junctions; die corners do not.
pub fn extract_junctions(fp: &Floorplan) -> Result<Vec<TJunction>, FloorplanError> {
    let report = validate_mosaic(fp);
    if !report.is_tiling() {
        return Err(FloorplanError::NonMosaicFloorplan(report.describe()));
    }
    if let Some(&p) = report.crossings.first() {
        return Err(FloorplanError::DegenerateCross(p));
    }

    let die_corners = fp.die.corners();
    let mut arms: BTreeMap<Point, u8> = BTreeMap::new();
    let mut corner_hits: HashMap<Point, u8> = HashMap::new();
    for b in &fp.blocks {
        for c in b.outline.corners() {
            *corner_hits.entry(c).or_default() += 1;
            let [h, v] = b.outline.corner_arms(c).expect("corner");
            *arms.entry(c).or_default() |= h.bit() | v.bit();
        }
    }

    let mut out = Vec::new();
    for (p, mask) in arms {
        if die_corners.contains(&p) || corner_hits[&p] != 2 {
            continue;
        }
        let dirs: Vec<Dir> = Dir::ALL.into_iter().filter(|d| mask & d.bit() != 0).collect();
        let arms: [Dir; 3] = dirs.try_into().map_err(|_| {
            FloorplanError::NonMosaicFloorplan(format!("malformed wall meeting at {p}"))
        })?;
        out.push(TJunction {
            id: JunctionId(out.len() as u32),
            location: p,
            arms,
        });
    }
    Ok(out)
}

/// Direction for [`order_nets`] on the (degree, HPWL) key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum NetOrder {
    #[default]
    Ascending,
    Descending,
}

/// Routing order: by degree, then HPWL, then net id (always ascending).
pub fn order_nets(nets: &[Net], order: NetOrder) -> Vec<NetId> {
    let mut keyed: Vec<(usize, Coord, NetId)> =
        nets.iter().map(|n| (n.degree(), hpwl(n), n.id)).collect();
    keyed.sort_by(|a, b| {
        let primary = (a.0, a.1).cmp(&(b.0, b.1));
        let primary = match order {
            NetOrder::Ascending => primary,
            NetOrder::Descending => primary.reverse(),
        };
        primary.then(a.2.cmp(&b.2))
    });
    keyed.into_iter().map(|k| k.2).collect()
}
