//! Per-net hybrid routing graph.
//!
//! The shared base graphs (junction graph and bin grid) live in
//! [`RoutingGraphs`]; a net's [`Hgsrg`] adds only its pins and the connector
//! edges between pins, junctions and bins. [`SearchView`] exposes the union as
//! a layer-aware search graph under the current demand state.

use crate::congestion::{edge_weight, EdgeRef, EdgeState, LayerUsage, Resource};
use crate::floorplan::{BlockId, Floorplan, JunctionId, Net, NetId, Pin};
use crate::geom::{Coord, Dir, Orientation, Point, Rect};
use crate::grid::{build_grid_graph, compute_grid_capacities, grid_dimension, GridCapMode, GridError, GridGraph};
use crate::layers::{Layer, LayerStack};
use crate::search::{Arc, SearchGraph};
use crate::staircase::{build_junction_graph, JunctionGraph, StaircaseError};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum HybridError {
    #[error("pin {pin} of net {net:?} sits on block {block:?}, which has no junction")]
    IsolatedPin { net: NetId, pin: usize, block: BlockId },
    #[error(transparent)]
    Staircase(#[from] StaircaseError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Base graphs shared by all nets, plus lookup tables derived from them.
#[derive(Debug, Clone)]
pub struct RoutingGraphs {
    pub layers: LayerStack,
    pub junctions: JunctionGraph,
    /// Absent when no layer lies above the split.
    pub grid: Option<GridGraph>,
    /// Grid dimension for this floorplan, also when no grid is built.
    pub m: u32,
    pub die: Rect,
    pub junction_bin: Vec<u32>,
    pub bin_junctions: Vec<Vec<JunctionId>>,
    /// Highest reserved layer of the blocks meeting at each junction.
    pub junction_floor: Vec<Layer>,
    pub block_floor: Vec<Layer>,
}

impl RoutingGraphs {
    pub fn build(
        fp: &Floorplan,
        pitch: Coord,
        layers: LayerStack,
        cap_mode: GridCapMode,
    ) -> Result<Self, HybridError> {
        let junctions = build_junction_graph(fp, pitch, &layers)?;
        let m = grid_dimension(fp.block_count());
        let block_floor: Vec<Layer> = fp.blocks.iter().map(|b| b.reserved_up_to).collect();
        let junction_floor = junctions
            .junction_blocks
            .iter()
            .map(|bs| bs.iter().map(|b| block_floor[b.index()]).max().unwrap_or(0))
            .collect();
        let mut grid = None;
        let mut junction_bin = Vec::new();
        let mut bin_junctions = Vec::new();
        if layers.has_grid_layers() {
            let mut g = build_grid_graph(m, fp.die)?;
            compute_grid_capacities(&mut g, &fp.nets, &fp.blocks, &layers, cap_mode);
            bin_junctions = vec![Vec::new(); g.bins.len()];
            for j in &junctions.junctions {
                let b = g.bin_of(j.location);
                junction_bin.push(b);
                bin_junctions[b as usize].push(j.id);
            }
            grid = Some(g);
        }
        Ok(Self {
            layers,
            junctions,
            grid,
            m,
            die: fp.die,
            junction_bin,
            bin_junctions,
            junction_floor,
            block_floor,
        })
    }

    pub fn junction_count(&self) -> usize {
        self.junctions.vertex_count()
    }

    pub fn bin_count(&self) -> usize {
        self.grid.as_ref().map_or(0, |g| g.bins.len())
    }

    pub fn edge_state(&self, edge: EdgeRef) -> Option<&EdgeState> {
        match edge {
            EdgeRef::Staircase(i) => self.junctions.segments.get(i as usize).map(|s| &s.state),
            EdgeRef::Grid(i) => self.grid.as_ref()?.edges.get(i as usize).map(|e| &e.state),
        }
    }

    pub fn usage(&self, r: Resource) -> Option<&LayerUsage> {
        self.edge_state(r.edge)?.layer(r.layer)
    }

    pub fn usage_mut(&mut self, r: Resource) -> Option<&mut LayerUsage> {
        let state = match r.edge {
            EdgeRef::Staircase(i) => &mut self.junctions.segments.get_mut(i as usize)?.state,
            EdgeRef::Grid(i) => &mut self.grid.as_mut()?.edges.get_mut(i as usize)?.state,
        };
        state.layer_mut(r.layer)
    }

    /// All capacity-bearing edges with their layer states.
    pub fn edges(&self) -> impl Iterator<Item = (EdgeRef, &EdgeState)> {
        let s = self
            .junctions
            .segments
            .iter()
            .map(|s| (EdgeRef::Staircase(s.id), &s.state));
        let g = self
            .grid
            .iter()
            .flat_map(|g| g.edges.iter().map(|e| (EdgeRef::Grid(e.id), &e.state)));
        s.chain(g)
    }

    /// Default via penalty: half the mean bin side.
    pub fn default_via_penalty(&self) -> f64 {
        (self.die.width() + self.die.height()) as f64 / (2.0 * self.m as f64) / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConnectorKind {
    PinJunction,
    PinBin,
    JunctionBin,
}

/// A vertex of a net's routing graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Vertex {
    Junction(JunctionId),
    Bin(u32),
    /// Index into the net's pin list.
    Pin(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectorEdge {
    pub kind: ConnectorKind,
    pub from: Vertex,
    pub to: Vertex,
    pub a: Point,
    pub b: Point,
    pub length: Coord,
    /// Layer-group crossings implied by traversal (0 or 1).
    pub crossings: u32,
}

fn owner_junctions(
    net: &Net,
    gj: &JunctionGraph,
) -> Result<Vec<Vec<JunctionId>>, HybridError> {
    net.pins
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let js = &gj.block_junctions[p.block.index()];
            if js.is_empty() {
                Err(HybridError::IsolatedPin {
                    net: net.id,
                    pin: i,
                    block: p.block,
                })
            } else {
                Ok(js.clone())
            }
        })
        .collect()
}

/// Each pin to every junction on its owner block's outline.
pub fn pin_junction_edges(net: &Net, gj: &JunctionGraph) -> Result<Vec<ConnectorEdge>, HybridError> {
    let owners = owner_junctions(net, gj)?;
    let mut out = Vec::new();
    for (i, (pin, js)) in net.pins.iter().zip(owners).enumerate() {
        for j in js {
            let q = gj.junction(j).location;
            out.push(ConnectorEdge {
                kind: ConnectorKind::PinJunction,
                from: Vertex::Pin(i as u32),
                to: Vertex::Junction(j),
                a: pin.location,
                b: q,
                length: pin.location.manhattan(q),
                crossings: 0,
            });
        }
    }
    Ok(out)
}

/// One pin-bin edge per pin and one junction-bin edge per junction, each to
/// the center of the containing bin.
pub fn vertical_connector_edges(net: &Net, gj: &JunctionGraph, gg: &GridGraph) -> Vec<ConnectorEdge> {
    let mut out = Vec::new();
    for (i, pin) in net.pins.iter().enumerate() {
        let b = gg.bin_of(pin.location);
        let c = gg.bin(b).center;
        out.push(ConnectorEdge {
            kind: ConnectorKind::PinBin,
            from: Vertex::Pin(i as u32),
            to: Vertex::Bin(b),
            a: pin.location,
            b: c,
            length: pin.location.manhattan(c),
            crossings: 1,
        });
    }
    for j in &gj.junctions {
        let b = gg.bin_of(j.location);
        let c = gg.bin(b).center;
        out.push(ConnectorEdge {
            kind: ConnectorKind::JunctionBin,
            from: Vertex::Junction(j.id),
            to: Vertex::Bin(b),
            a: j.location,
            b: c,
            length: j.location.manhattan(c),
            crossings: 1,
        });
    }
    out
}

/// The per-net additions: pins and connector tables. Base graphs are borrowed
/// at search time, never copied.
#[derive(Debug, Clone, PartialEq)]
pub struct Hgsrg {
    pub net: NetId,
    pub pins: Vec<Pin>,
    pub pin_junctions: Vec<Vec<JunctionId>>,
    pub junction_pins: BTreeMap<JunctionId, Vec<u32>>,
    /// Containing bin of each pin; empty without a grid.
    pub pin_bin: Vec<u32>,
    pub bin_pins: BTreeMap<u32, Vec<u32>>,
    pub pin_floor: Vec<Layer>,
    junctions: usize,
    bins: usize,
}

pub fn build_hgsrg(net: &Net, base: &RoutingGraphs) -> Result<Hgsrg, HybridError> {
    let pin_junctions = owner_junctions(net, &base.junctions)?;
    let mut junction_pins: BTreeMap<JunctionId, Vec<u32>> = BTreeMap::new();
    for (i, js) in pin_junctions.iter().enumerate() {
        for &j in js {
            junction_pins.entry(j).or_default().push(i as u32);
        }
    }
    let mut pin_bin = Vec::new();
    let mut bin_pins: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    if let Some(g) = &base.grid {
        for (i, p) in net.pins.iter().enumerate() {
            let b = g.bin_of(p.location);
            pin_bin.push(b);
            bin_pins.entry(b).or_default().push(i as u32);
        }
    }
    Ok(Hgsrg {
        net: net.id,
        pins: net.pins.clone(),
        pin_junctions,
        junction_pins,
        pin_bin,
        bin_pins,
        pin_floor: net.pins.iter().map(|p| base.block_floor[p.block.index()]).collect(),
        junctions: base.junction_count(),
        bins: base.bin_count(),
    })
}

impl Hgsrg {
    pub fn vertex_count(&self) -> usize {
        self.junctions + self.bins + self.pins.len()
    }

    pub fn vertex_id(&self, v: Vertex) -> u32 {
        match v {
            Vertex::Junction(j) => j.0,
            Vertex::Bin(b) => self.junctions as u32 + b,
            Vertex::Pin(p) => (self.junctions + self.bins) as u32 + p,
        }
    }

    pub fn vertex(&self, id: u32) -> Vertex {
        let id = id as usize;
        if id < self.junctions {
            Vertex::Junction(JunctionId(id as u32))
        } else if id < self.junctions + self.bins {
            Vertex::Bin((id - self.junctions) as u32)
        } else {
            Vertex::Pin((id - self.junctions - self.bins) as u32)
        }
    }

    pub fn connector_count(&self, base: &RoutingGraphs) -> usize {
        let pj: usize = self.pin_junctions.iter().map(Vec::len).sum();
        let vertical = if base.grid.is_some() {
            self.pins.len() + base.junction_count()
        } else {
            0
        };
        pj + vertical
    }

    /// `|E_j| + |E_g| + |connectors|`.
    pub fn edge_count(&self, base: &RoutingGraphs) -> usize {
        base.junctions.edge_count()
            + base.grid.as_ref().map_or(0, |g| g.edge_count())
            + self.connector_count(base)
    }
}

/// An L-shaped wire from `from` to `to` with at most one bend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LShape {
    pub from: Point,
    pub to: Point,
    pub h_first: bool,
    pub h_layer: Layer,
    pub v_layer: Layer,
}

impl LShape {
    pub fn corner(&self) -> Point {
        if self.h_first {
            Point::new(self.to.x, self.from.y)
        } else {
            Point::new(self.from.x, self.to.y)
        }
    }

    /// Non-degenerate legs in travel order.
    pub fn legs(&self) -> impl Iterator<Item = (Point, Point, Layer)> {
        let c = self.corner();
        let (first, second) = if self.h_first {
            (self.h_layer, self.v_layer)
        } else {
            (self.v_layer, self.h_layer)
        };
        [(self.from, c, first), (c, self.to, second)]
            .into_iter()
            .filter(|(a, b, _)| a != b)
    }

    fn first_layer(&self) -> Option<Layer> {
        self.legs().next().map(|l| l.2)
    }

    fn last_layer(&self) -> Option<Layer> {
        self.legs().last().map(|l| l.2)
    }

    /// Via cuts at the corner.
    fn cuts(&self) -> u32 {
        if self.legs().count() == 2 {
            self.h_layer.abs_diff(self.v_layer) as u32
        } else {
            0
        }
    }
}

/// One arc of a net's routing graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Hop {
    Staircase {
        segment: u32,
        layer: Layer,
        from: Point,
        to: Point,
    },
    Grid {
        edge: u32,
        layer: Layer,
        from_bin: u32,
        to_bin: u32,
    },
    PinJunction {
        shape: LShape,
    },
    /// From a pin or junction up to its bin center.
    Up {
        shape: LShape,
        bin: u32,
        reserve: [Option<Resource>; 2],
    },
    /// From a bin center down to a pin or junction in it.
    Down {
        shape: LShape,
        bin: u32,
        reserve: [Option<Resource>; 2],
    },
}

/// Demand-related inputs to one search.
#[derive(Debug, Clone, Default)]
pub struct SearchContext {
    /// Resources this net already occupies: reusable at no extra demand.
    pub held: BTreeSet<Resource>,
    /// Resources the search may not use.
    pub excluded: BTreeSet<Resource>,
    pub increment: f64,
    /// Confine intermediate vertices to this box.
    pub bbox: Option<Rect>,
}

impl SearchContext {
    fn usable(&self, r: Resource, u: &LayerUsage) -> bool {
        u.capacity > 0.0
            && !self.excluded.contains(&r)
            && (self.held.contains(&r) || u.admits(self.increment))
    }

    /// Weight of using `r` with congestion measured without this net's own demand.
    fn weight(&self, r: Resource, length: f64, u: &LayerUsage) -> f64 {
        let mut own = *u;
        if self.held.contains(&r) {
            own.demand = (own.demand - self.increment).max(0.0);
        }
        edge_weight(length, &own).unwrap_or(f64::INFINITY)
    }

    /// Lowest usable layer of an edge and its weight.
    pub fn pick_layer(&self, edge: EdgeRef, state: &EdgeState, length: Coord) -> Option<(Layer, f64)> {
        state.layers.iter().find_map(|u| {
            let r = Resource {
                edge,
                layer: u.layer,
            };
            if !self.usable(r, u) {
                return None;
            }
            let w = self.weight(r, length as f64, u);
            w.is_finite().then_some((u.layer, w))
        })
    }
}

/// Side of the bin an L leg heads toward, per orientation.
pub fn local_sides(entity: Point, center: Point) -> (Option<Dir>, Option<Dir>) {
    let h = match entity.x.cmp(&center.x) {
        std::cmp::Ordering::Less => Some(Dir::West),
        std::cmp::Ordering::Greater => Some(Dir::East),
        std::cmp::Ordering::Equal => None,
    };
    let v = match entity.y.cmp(&center.y) {
        std::cmp::Ordering::Greater => Some(Dir::North),
        std::cmp::Ordering::Less => Some(Dir::South),
        std::cmp::Ordering::Equal => None,
    };
    (h, v)
}

/// Lowest over-the-block layer for a local leg of orientation `o` heading to
/// `side`, above `floor`, whose boundary edge admits the reservation.
pub fn local_leg_layer(
    base: &RoutingGraphs,
    bin: u32,
    o: Orientation,
    side: Dir,
    floor: Layer,
    ctx: &SearchContext,
) -> Option<(Layer, Option<Resource>)> {
    let g = base.grid.as_ref()?;
    // A side with no provisioned capacity is treated like the die outline.
    let edge = g
        .edge_on_side(bin, side)
        .filter(|&e| g.edges[e as usize].state.layers.iter().any(|u| u.capacity > 0.0));
    base.layers
        .grid_layers_for(o)
        .filter(|&l| l > floor)
        .find_map(|l| match edge {
            None => Some((l, None)),
            Some(e) => {
                let r = Resource {
                    edge: EdgeRef::Grid(e),
                    layer: l,
                };
                let u = g.edges[e as usize].state.layer(l)?;
                ctx.usable(r, u).then_some((l, Some(r)))
            }
        })
}

/// Candidate local L-shapes from `entity` to the bin center with their reservations.
pub fn local_shapes(
    base: &RoutingGraphs,
    entity: Point,
    bin: u32,
    floor: Layer,
    ctx: &SearchContext,
) -> Vec<(LShape, [Option<Resource>; 2])> {
    let Some(g) = base.grid.as_ref() else {
        return Vec::new();
    };
    let center = g.bin(bin).center;
    let (hs, vs) = local_sides(entity, center);
    let h = match hs {
        Some(side) => match local_leg_layer(base, bin, Orientation::Horizontal, side, floor, ctx) {
            Some(x) => Some(x),
            None => return Vec::new(),
        },
        None => None,
    };
    let v = match vs {
        Some(side) => match local_leg_layer(base, bin, Orientation::Vertical, side, floor, ctx) {
            Some(x) => Some(x),
            None => return Vec::new(),
        },
        None => None,
    };
    let shape = |h_first| LShape {
        from: entity,
        to: center,
        h_first,
        h_layer: h.map_or(0, |x| x.0),
        v_layer: v.map_or(0, |x| x.0),
    };
    let reserve = [h.and_then(|x| x.1), v.and_then(|x| x.1)];
    if h.is_some() && v.is_some() {
        vec![(shape(true), reserve), (shape(false), reserve)]
    } else {
        vec![(shape(h.is_some()), reserve)]
    }
}

/// A net's routing graph under a demand state.
pub struct SearchView<'a> {
    pub base: &'a RoutingGraphs,
    pub net: &'a Hgsrg,
    pub ctx: &'a SearchContext,
}

impl SearchView<'_> {
    fn inside(&self, v: Vertex) -> bool {
        let Some(bb) = self.ctx.bbox else {
            return true;
        };
        match v {
            Vertex::Pin(_) => true,
            Vertex::Junction(j) => bb.contains(self.base.junctions.junction(j).location),
            Vertex::Bin(b) => {
                let r = self.base.grid.as_ref().map(|g| g.bin(b).rect);
                r.is_some_and(|r| {
                    r.x_lo <= bb.x_hi && bb.x_lo <= r.x_hi && r.y_lo <= bb.y_hi && bb.y_lo <= r.y_hi
                })
            }
        }
    }

    fn push(&self, out: &mut Vec<Arc<Hop>>, to: Vertex, arc: Arc<Hop>) {
        if self.inside(to) {
            out.push(Arc {
                to: self.net.vertex_id(to),
                ..arc
            });
        }
    }

    fn pin_junction_arcs(&self, pin: u32, j: JunctionId, toward_pin: bool, out: &mut Vec<Arc<Hop>>) {
        let p = &self.net.pins[pin as usize];
        let q = self.base.junctions.junction(j).location;
        let (from, to, target) = if toward_pin {
            (q, p.location, Vertex::Pin(pin))
        } else {
            (p.location, q, Vertex::Junction(j))
        };
        let h_layer = self.base.layers.lowest_staircase(Orientation::Horizontal);
        let v_layer = self.base.layers.lowest_staircase(Orientation::Vertical);
        let variants: &[bool] = if from.x != to.x && from.y != to.y {
            &[true, false]
        } else {
            &[from.y == to.y]
        };
        for &h_first in variants {
            let shape = LShape {
                from,
                to,
                h_first,
                h_layer,
                v_layer,
            };
            let (enter, leave, vias) = match (shape.first_layer(), shape.last_layer()) {
                (Some(first), Some(last)) if toward_pin => {
                    (first, p.layer, shape.cuts() + last.abs_diff(p.layer) as u32)
                }
                (Some(first), Some(last)) => (first, last, shape.cuts()),
                _ => (p.layer, p.layer, 0),
            };
            self.push(
                out,
                target,
                Arc {
                    to: 0,
                    weight: from.manhattan(to) as f64,
                    enter: Some(enter),
                    leave: Some(leave),
                    vias,
                    tag: Hop::PinJunction { shape },
                },
            );
        }
    }

    fn entity_floor(&self, v: Vertex) -> (Point, Layer) {
        match v {
            Vertex::Pin(p) => (
                self.net.pins[p as usize].location,
                self.net.pin_floor[p as usize],
            ),
            Vertex::Junction(j) => (
                self.base.junctions.junction(j).location,
                self.base.junction_floor[j.index()],
            ),
            Vertex::Bin(_) => unreachable!("bins are not entities"),
        }
    }

    fn up_arcs(&self, entity: Vertex, bin: u32, out: &mut Vec<Arc<Hop>>) {
        let (p, floor) = self.entity_floor(entity);
        for (shape, reserve) in local_shapes(self.base, p, bin, floor, self.ctx) {
            self.push(
                out,
                Vertex::Bin(bin),
                Arc {
                    to: 0,
                    weight: p.manhattan(shape.to) as f64,
                    enter: shape.first_layer(),
                    leave: shape.last_layer(),
                    vias: shape.cuts(),
                    tag: Hop::Up {
                        shape,
                        bin,
                        reserve,
                    },
                },
            );
        }
    }

    fn down_arcs(&self, bin: u32, entity: Vertex, out: &mut Vec<Arc<Hop>>) {
        let (p, floor) = self.entity_floor(entity);
        let pin_layer = match entity {
            Vertex::Pin(i) => Some(self.net.pins[i as usize].layer),
            _ => None,
        };
        for (up, reserve) in local_shapes(self.base, p, bin, floor, self.ctx) {
            let shape = LShape {
                from: up.to,
                to: up.from,
                h_first: !up.h_first,
                ..up
            };
            // Landing on a pin descends to the pin layer inside the arc.
            let (enter, leave, vias) = match (pin_layer, shape.last_layer()) {
                (Some(pl), Some(last)) => (shape.first_layer(), Some(pl), shape.cuts() + last.abs_diff(pl) as u32),
                (Some(pl), None) => (Some(pl), Some(pl), 0),
                (None, last) => (shape.first_layer(), last, shape.cuts()),
            };
            self.push(
                out,
                entity,
                Arc {
                    to: 0,
                    weight: p.manhattan(shape.from) as f64,
                    enter,
                    leave,
                    vias,
                    tag: Hop::Down {
                        shape,
                        bin,
                        reserve,
                    },
                },
            );
        }
    }
}

impl SearchGraph for SearchView<'_> {
    type Tag = Hop;

    fn vertex_count(&self) -> usize {
        self.net.vertex_count()
    }

    fn max_layer(&self) -> Layer {
        self.base.layers.max()
    }

    fn arcs(&self, v: u32, out: &mut Vec<Arc<Hop>>) {
        let base = self.base;
        match self.net.vertex(v) {
            Vertex::Junction(j) => {
                let here = base.junctions.junction(j).location;
                for &s in &base.junctions.incident[j.index()] {
                    let seg = &base.junctions.segments[s as usize];
                    let Some((layer, w)) = self.ctx.pick_layer(EdgeRef::Staircase(s), &seg.state, seg.length)
                    else {
                        continue;
                    };
                    let other = seg.other_end(j);
                    self.push(
                        out,
                        Vertex::Junction(other),
                        Arc {
                            to: 0,
                            weight: w,
                            enter: Some(layer),
                            leave: Some(layer),
                            vias: 0,
                            tag: Hop::Staircase {
                                segment: s,
                                layer,
                                from: here,
                                to: base.junctions.junction(other).location,
                            },
                        },
                    );
                }
                if base.grid.is_some() {
                    self.up_arcs(Vertex::Junction(j), base.junction_bin[j.index()], out);
                }
                if let Some(pins) = self.net.junction_pins.get(&j) {
                    for &p in pins {
                        self.pin_junction_arcs(p, j, true, out);
                    }
                }
            }
            Vertex::Bin(b) => {
                let g = base.grid.as_ref().expect("bin vertex without grid");
                for side in Dir::ALL {
                    let Some(e) = g.edge_on_side(b, side) else {
                        continue;
                    };
                    let edge = &g.edges[e as usize];
                    let Some((layer, w)) = self.ctx.pick_layer(EdgeRef::Grid(e), &edge.state, edge.length) else {
                        continue;
                    };
                    let other = if edge.bins[0] == b { edge.bins[1] } else { edge.bins[0] };
                    self.push(
                        out,
                        Vertex::Bin(other),
                        Arc {
                            to: 0,
                            weight: w,
                            enter: Some(layer),
                            leave: Some(layer),
                            vias: 0,
                            tag: Hop::Grid {
                                edge: e,
                                layer,
                                from_bin: b,
                                to_bin: other,
                            },
                        },
                    );
                }
                for &j in &base.bin_junctions[b as usize] {
                    self.down_arcs(b, Vertex::Junction(j), out);
                }
                if let Some(pins) = self.net.bin_pins.get(&b) {
                    for &p in pins {
                        self.down_arcs(b, Vertex::Pin(p), out);
                    }
                }
            }
            Vertex::Pin(p) => {
                for &j in &self.net.pin_junctions[p as usize] {
                    self.pin_junction_arcs(p, j, false, out);
                }
                if base.grid.is_some() {
                    self.up_arcs(Vertex::Pin(p), self.net.pin_bin[p as usize], out);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congestion::DemandMode;
    use crate::floorplan::fixtures::two_blocks;
    use crate::search::{shortest_path, LayerState};

    fn graphs(layers: LayerStack) -> (Floorplan, RoutingGraphs) {
        let fp = two_blocks();
        let base = RoutingGraphs::build(&fp, 10, layers, GridCapMode::Replicate).unwrap();
        (fp, base)
    }

    #[test]
    fn two_block_counts() {
        let (fp, base) = graphs(LayerStack::default());
        let net = &fp.nets[0];
        let h = build_hgsrg(net, &base).unwrap();
        // 2 junctions + m^2 bins (m = 2) + 2 pins.
        assert_eq!(h.vertex_count(), 2 + 4 + 2);
        let pj = pin_junction_edges(net, &base.junctions).unwrap();
        assert_eq!(pj.len(), 4);
        let vc = vertical_connector_edges(net, &base.junctions, base.grid.as_ref().unwrap());
        assert_eq!(vc.len(), 2 + 2);
        assert_eq!(h.edge_count(&base), 1 + 4 + pj.len() + vc.len());
        assert_eq!(build_hgsrg(net, &base).unwrap(), h);
    }

    #[test]
    fn no_grid_above_full_split() {
        let (fp, base) = graphs(LayerStack::new(8, 8).unwrap());
        assert!(base.grid.is_none());
        let h = build_hgsrg(&fp.nets[0], &base).unwrap();
        assert_eq!(h.vertex_count(), 4);
    }

    #[test]
    fn vertex_ids_round_trip() {
        let (fp, base) = graphs(LayerStack::default());
        let h = build_hgsrg(&fp.nets[0], &base).unwrap();
        for id in 0..h.vertex_count() as u32 {
            assert_eq!(h.vertex_id(h.vertex(id)), id);
        }
    }

    #[test]
    fn lshape_legs_and_corner() {
        let s = LShape {
            from: Point::new(0, 0),
            to: Point::new(5, 3),
            h_first: true,
            h_layer: 3,
            v_layer: 4,
        };
        assert_eq!(s.corner(), Point::new(5, 0));
        assert_eq!(s.legs().count(), 2);
        assert_eq!(s.cuts(), 1);
        assert_eq!(LShape { v_layer: 6, ..s }.cuts(), 3);
        let flat = LShape { to: Point::new(5, 0), ..s };
        assert_eq!(flat.legs().collect::<Vec<_>>(), vec![(Point::new(0, 0), Point::new(5, 0), 3)]);
        assert_eq!(flat.cuts(), 0);
    }

    #[test]
    fn local_sides_follow_quadrant() {
        let c = Point::new(10, 10);
        assert_eq!(local_sides(Point::new(5, 15), c), (Some(Dir::West), Some(Dir::North)));
        assert_eq!(local_sides(c, c), (None, None));
    }

    #[test]
    fn staircase_route_between_two_blocks() {
        let (fp, base) = graphs(LayerStack::new(8, 8).unwrap());
        let h = build_hgsrg(&fp.nets[0], &base).unwrap();
        let ctx = SearchContext {
            increment: DemandMode::Plain.increment(),
            ..Default::default()
        };
        let view = SearchView {
            base: &base,
            net: &h,
            ctx: &ctx,
        };
        let src = h.vertex_id(Vertex::Pin(0));
        let dst = h.vertex_id(Vertex::Pin(1));
        let p = shortest_path(&view, src, LayerState::At(1), dst, 0.0).unwrap();
        // Pins (20,30),(70,30), junctions (40,0),(40,60): 20+30 then 30+30.
        assert_eq!(p.cost, 110.0);
        assert_eq!(p.vertices.len(), 3);
    }
}
