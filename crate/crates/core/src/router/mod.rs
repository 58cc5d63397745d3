//! Net-by-net routing over the hybrid graph with demand admission and commit.

mod decompose;
mod steiner;

pub use decompose::{decompose_multi_terminal, mst_length, mst_pairs};
pub use steiner::{branch_points, identify_steiner_points, merge_segments, SteinerTree};

use crate::congestion::{update_demand, DemandMode, EdgeRef, Resource};
use crate::floorplan::{hpwl, order_nets, Floorplan, Net, NetId, NetOrder};
use crate::geom::{bounding_box, Coord, Dir, Point, Rect, Segment};
use crate::grid::GridCapMode;
use crate::hybrid::{build_hgsrg, local_shapes, Hgsrg, HybridError, Hop, RoutingGraphs, SearchContext, SearchView, Vertex};
use crate::layers::{Layer, LayerError, LayerStack};
use crate::metrics::{CongestionSnapshot, RoutingResult};
use crate::search::{shortest_path, LayerState, Path};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::time::Instant;
use thiserror::Error;

/// Re-searches allowed per pair after a rejected assignment or commit.
const MAX_RESEARCH: usize = 8;

#[derive(Debug, Error, PartialEq)]
pub enum RouterError {
    #[error("no admissible path for net {0:?}")]
    Unroutable(NetId),
    #[error("local route in bin {bin} cannot reserve boundary capacity")]
    LocalOverflow { bin: u32 },
    #[error("resource {}@M{} cannot take the demand", .0.edge, .0.layer)]
    AssignmentFailed(Resource),
    #[error("capacity override names unknown edge layer {}@M{}", .0.edge, .0.layer)]
    UnknownOverride(Resource),
    #[error(transparent)]
    Graph(#[from] HybridError),
    #[error(transparent)]
    Layers(#[from] LayerError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentKind {
    Staircase,
    Grid,
    /// Pin to junction, on the two lowest layers.
    Connector,
    /// Inside a bin, between a pin or junction and the bin center.
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteSegment {
    pub seg: Segment,
    pub layer: Layer,
    pub kind: SegmentKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Via {
    pub at: Point,
    pub lo: Layer,
    pub hi: Layer,
}

impl Via {
    /// Adjacent-layer cuts in the stack.
    pub fn cuts(&self) -> usize {
        (self.hi - self.lo) as usize
    }
}

/// One routed terminal pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub net: NetId,
    pub from: Point,
    pub to: Point,
    pub segments: Vec<RouteSegment>,
    pub vias: Vec<Via>,
    /// Search cost of the path.
    pub cost: f64,
    /// Edge layers charged by this route, sorted.
    pub resources: Vec<Resource>,
}

impl Route {
    pub fn length(&self) -> Coord {
        self.segments.iter().map(|s| s.seg.length()).sum()
    }

    pub fn via_count(&self) -> usize {
        self.vias.iter().map(Via::cuts).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RouteMode {
    #[default]
    Hybrid,
    /// All layers route through block-boundary channels.
    StaircaseOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityOverride {
    pub edge: EdgeRef,
    pub layer: Layer,
    pub capacity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouterConfig {
    pub mode: RouteMode,
    pub max_layers: Layer,
    pub split: Layer,
    pub demand: DemandMode,
    /// Track pitch; derived from block size when absent.
    pub pitch: Option<Coord>,
    /// Cost of one via in length units; half a bin side when absent.
    pub via_penalty: Option<f64>,
    pub net_order: NetOrder,
    pub grid_cap_mode: GridCapMode,
    /// Keep searches inside the net's bounding box grown by one bin.
    pub confine_to_bbox: bool,
    pub capacity_overrides: Vec<CapacityOverride>,
}

impl Default for RouterConfig {
    fn default() -> Self {
        Self {
            mode: RouteMode::Hybrid,
            max_layers: 8,
            split: 2,
            demand: DemandMode::Plain,
            pitch: None,
            via_penalty: None,
            net_order: NetOrder::Ascending,
            grid_cap_mode: GridCapMode::Replicate,
            confine_to_bbox: false,
            capacity_overrides: Vec::new(),
        }
    }
}

impl RouterConfig {
    pub fn layer_stack(&self) -> Result<LayerStack, LayerError> {
        match self.mode {
            RouteMode::Hybrid => LayerStack::new(self.max_layers, self.split),
            RouteMode::StaircaseOnly => LayerStack::new(self.max_layers, self.max_layers),
        }
    }
}

/// Default track pitch: a tenth of the mean block side.
pub fn default_pitch(fp: &Floorplan) -> Coord {
    let mean_area = fp.die.area() as f64 / fp.block_count().max(1) as f64;
    ((mean_area.sqrt() / 10.0) as Coord).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetStatus {
    Routed,
    Unrouted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetRoute {
    pub net: NetId,
    pub name: String,
    pub degree: usize,
    pub hpwl: Coord,
    pub status: NetStatus,
    pub pairs: Vec<Route>,
    pub tree: Option<SteinerTree>,
}

impl NetRoute {
    pub fn length(&self) -> Coord {
        self.tree.as_ref().map_or(0, |t| t.length)
    }

    pub fn vias(&self) -> usize {
        self.tree.as_ref().map_or(0, |t| t.vias.iter().map(Via::cuts).sum())
    }

    pub fn max_layer(&self) -> Layer {
        self.tree.as_ref().map_or(0, |t| {
            let s = t.segments.iter().map(|s| s.layer).max().unwrap_or(0);
            let v = t.vias.iter().map(|v| v.hi).max().unwrap_or(0);
            s.max(v)
        })
    }
}

/// Counters kept across nets.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RoutingState {
    pub routed: usize,
    pub unrouted: usize,
    pub demand: DemandMode,
}

impl RoutingState {
    pub fn attempted(&self) -> usize {
        self.routed + self.unrouted
    }

    /// Routed share of attempted nets; 1 when nothing was attempted.
    pub fn completion(&self) -> f64 {
        match self.attempted() {
            0 => 1.0,
            n => self.routed as f64 / n as f64,
        }
    }
}

/// A local L from `entity` to the center of `bin` on the over-the-block
/// layers. The boundary edge on `global_side` is shared with the global
/// route, so it is not reserved again.
pub fn local_route(
    base: &RoutingGraphs,
    entity: Point,
    floor: Layer,
    bin: u32,
    global_side: Option<Dir>,
    ctx: &SearchContext,
) -> Result<(Vec<RouteSegment>, Vec<Resource>), RouterError> {
    let g = base.grid.as_ref().ok_or(RouterError::LocalOverflow { bin })?;
    if g.bin(bin).center == entity {
        return Ok((Vec::new(), Vec::new()));
    }
    let shared = global_side.and_then(|s| g.edge_on_side(bin, s)).map(EdgeRef::Grid);
    let (shape, reserve) = local_shapes(base, entity, bin, floor, ctx)
        .into_iter()
        .next()
        .ok_or(RouterError::LocalOverflow { bin })?;
    let segs = shape
        .legs()
        .map(|(a, b, layer)| RouteSegment {
            seg: Segment::new(a, b).expect("leg is axis-parallel"),
            layer,
            kind: SegmentKind::Local,
        })
        .collect();
    let res = reserve
        .into_iter()
        .flatten()
        .filter(|r| Some(r.edge) != shared)
        .collect();
    Ok((segs, res))
}

fn grid_edge(hop: Option<&crate::search::Arc<Hop>>) -> Option<EdgeRef> {
    match hop.map(|a| a.tag) {
        Some(Hop::Grid { edge, .. }) => Some(EdgeRef::Grid(edge)),
        _ => None,
    }
}

/// Turns a searched path into layered wires, vias and charged resources.
/// Fails with the first resource that can no longer take this net's demand.
pub fn assign_layers(
    path: &Path<Hop>,
    base: &RoutingGraphs,
    net: &Hgsrg,
    src: u32,
    dst: u32,
    ctx: &SearchContext,
) -> Result<Route, RouterError> {
    let src_pin = &net.pins[src as usize];
    let dst_pin = &net.pins[dst as usize];
    let mut segments = Vec::new();
    let mut resources = BTreeSet::new();
    let leg = |a: Point, b: Point, layer: Layer, kind| RouteSegment {
        seg: Segment::new(a, b).expect("axis-parallel wire"),
        layer,
        kind,
    };
    for (i, arc) in path.arcs.iter().enumerate() {
        match arc.tag {
            Hop::Staircase {
                segment,
                layer,
                from,
                to,
            } => {
                segments.push(leg(from, to, layer, SegmentKind::Staircase));
                resources.insert(Resource {
                    edge: EdgeRef::Staircase(segment),
                    layer,
                });
            }
            Hop::Grid {
                edge,
                layer,
                from_bin,
                to_bin,
            } => {
                let g = base.grid.as_ref().expect("grid hop without grid");
                segments.push(leg(g.bin(from_bin).center, g.bin(to_bin).center, layer, SegmentKind::Grid));
                resources.insert(Resource {
                    edge: EdgeRef::Grid(edge),
                    layer,
                });
            }
            Hop::PinJunction { shape } => {
                segments.extend(shape.legs().map(|(a, b, l)| leg(a, b, l, SegmentKind::Connector)));
            }
            Hop::Up { shape, reserve, .. } | Hop::Down { shape, reserve, .. } => {
                let shared = if matches!(arc.tag, Hop::Up { .. }) {
                    grid_edge(path.arcs.get(i + 1))
                } else {
                    grid_edge(i.checked_sub(1).and_then(|k| path.arcs.get(k)))
                };
                segments.extend(shape.legs().map(|(a, b, l)| leg(a, b, l, SegmentKind::Local)));
                resources.extend(reserve.into_iter().flatten().filter(|r| Some(r.edge) != shared));
            }
        }
    }

    for &r in &resources {
        let ok = !ctx.excluded.contains(&r)
            && base
                .usage(r)
                .is_some_and(|u| ctx.held.contains(&r) || u.admits(ctx.increment));
        if !ok {
            return Err(RouterError::AssignmentFailed(r));
        }
    }

    // A via wherever consecutive wires (pins included) change layer.
    let mut vias = Vec::new();
    let mut layer = src_pin.layer;
    let mut at = src_pin.location;
    let mut switch = |at: Point, from: Layer, to: Layer| {
        if from != to {
            vias.push(Via {
                at,
                lo: from.min(to),
                hi: from.max(to),
            });
        }
    };
    for s in &segments {
        let (a, b) = oriented(s.seg, at);
        switch(a, layer, s.layer);
        layer = s.layer;
        at = b;
    }
    switch(dst_pin.location, layer, dst_pin.layer);

    Ok(Route {
        net: net.net,
        from: src_pin.location,
        to: dst_pin.location,
        segments,
        vias,
        cost: path.cost,
        resources: resources.into_iter().collect(),
    })
}

/// Endpoints of `s` with the one nearer `at` first.
fn oriented(s: Segment, at: Point) -> (Point, Point) {
    if s.b == at {
        (s.b, s.a)
    } else {
        (s.a, s.b)
    }
}

/// Shortest admissible route between two pins of a net. Demand is not charged.
pub fn route_two_pin(
    base: &RoutingGraphs,
    net: &Hgsrg,
    src: u32,
    dst: u32,
    ctx: &SearchContext,
    via_penalty: f64,
) -> Result<Route, RouterError> {
    let view = SearchView { base, net, ctx };
    let start = LayerState::At(net.pins[src as usize].layer);
    let path = shortest_path(
        &view,
        net.vertex_id(Vertex::Pin(src)),
        start,
        net.vertex_id(Vertex::Pin(dst)),
        via_penalty,
    )
    .ok_or(RouterError::Unroutable(net.net))?;
    assign_layers(&path, base, net, src, dst, ctx)
}

/// Charges `route`'s resources not yet held by the net. All-or-nothing.
pub fn commit(
    base: &mut RoutingGraphs,
    route: &Route,
    held: &mut BTreeSet<Resource>,
    mode: DemandMode,
) -> Result<(), RouterError> {
    let fresh: Vec<Resource> = route.resources.iter().copied().filter(|r| !held.contains(r)).collect();
    for &r in &fresh {
        let ok = base.usage(r).is_some_and(|u| u.admits(mode.increment()));
        if !ok {
            return Err(RouterError::AssignmentFailed(r));
        }
    }
    for r in fresh {
        let u = base.usage_mut(r).expect("checked above");
        update_demand(u, mode).expect("checked above");
        held.insert(r);
    }
    Ok(())
}

/// Releases every resource held by a net.
pub fn rollback(base: &mut RoutingGraphs, held: &BTreeSet<Resource>, mode: DemandMode) {
    for &r in held {
        if let Some(u) = base.usage_mut(r) {
            u.demand = (u.demand - mode.increment()).max(0.0);
        }
    }
}

fn search_box(base: &RoutingGraphs, net: &Net) -> Option<Rect> {
    let (lo, hi) = bounding_box(net.pin_points())?;
    let grow = ((base.die.width() + base.die.height()) / (2 * base.m as Coord)).max(1);
    Some(Rect {
        x_lo: (lo.x - grow).max(base.die.x_lo),
        y_lo: (lo.y - grow).max(base.die.y_lo),
        x_hi: (hi.x + grow).min(base.die.x_hi),
        y_hi: (hi.y + grow).min(base.die.y_hi),
    })
}

/// Routes all pairs of one net, committing as it goes. On any failure the
/// net's demand is released and the net is reported unrouted.
pub fn route_net(base: &mut RoutingGraphs, net: &Net, config: &RouterConfig, via_penalty: f64) -> NetRoute {
    let mut out = NetRoute {
        net: net.id,
        name: net.name.clone(),
        degree: net.degree(),
        hpwl: hpwl(net),
        status: NetStatus::Unrouted,
        pairs: Vec::new(),
        tree: None,
    };
    let Ok(hg) = build_hgsrg(net, base) else {
        return out;
    };
    let mut ctx = SearchContext {
        increment: config.demand.increment(),
        bbox: if config.confine_to_bbox { search_box(base, net) } else { None },
        ..Default::default()
    };
    let mut failed = false;
    'pairs: for (i, j) in decompose_multi_terminal(net) {
        ctx.excluded.clear();
        for _ in 0..=MAX_RESEARCH {
            let attempt = route_two_pin(base, &hg, i as u32, j as u32, &ctx, via_penalty)
                .and_then(|r| commit(base, &r, &mut ctx.held, config.demand).map(|_| r));
            match attempt {
                Ok(r) => {
                    out.pairs.push(r);
                    continue 'pairs;
                }
                Err(RouterError::AssignmentFailed(r)) => {
                    ctx.excluded.insert(r);
                }
                Err(_) => break,
            }
        }
        failed = true;
        break;
    }
    if failed {
        rollback(base, &ctx.held, config.demand);
        out.pairs.clear();
        return out;
    }
    out.status = NetStatus::Routed;
    out.tree = Some(identify_steiner_points(net.pin_points().collect(), &out.pairs));
    out
}

/// Builds the graphs for `fp` under `config` with overrides applied.
pub fn prepare(fp: &Floorplan, config: &RouterConfig) -> Result<RoutingGraphs, RouterError> {
    let layers = config.layer_stack()?;
    let pitch = config.pitch.unwrap_or_else(|| default_pitch(fp));
    let mut base = RoutingGraphs::build(fp, pitch, layers, config.grid_cap_mode)?;
    for o in &config.capacity_overrides {
        let r = Resource {
            edge: o.edge,
            layer: o.layer,
        };
        base.usage_mut(r).ok_or(RouterError::UnknownOverride(r))?.capacity = o.capacity;
    }
    Ok(base)
}

/// Routes every net of `fp` in the configured order.
pub fn route_all(fp: &Floorplan, config: &RouterConfig) -> Result<RoutingResult, RouterError> {
    route_all_with_graphs(fp, config).map(|(r, _)| r)
}

/// [`route_all`], also returning the graphs with their final demand.
pub fn route_all_with_graphs(
    fp: &Floorplan,
    config: &RouterConfig,
) -> Result<(RoutingResult, RoutingGraphs), RouterError> {
    let started = Instant::now();
    let mut base = prepare(fp, config)?;
    let via_penalty = config.via_penalty.unwrap_or_else(|| base.default_via_penalty());
    let mut state = RoutingState {
        demand: config.demand,
        ..Default::default()
    };
    let mut nets: Vec<Option<NetRoute>> = vec![None; fp.nets.len()];
    for id in order_nets(&fp.nets, config.net_order) {
        let r = route_net(&mut base, &fp.nets[id.index()], config, via_penalty);
        match r.status {
            NetStatus::Routed => state.routed += 1,
            NetStatus::Unrouted => state.unrouted += 1,
        }
        nets[id.index()] = Some(r);
    }
    let nets: Vec<NetRoute> = nets.into_iter().map(|n| n.expect("every net attempted")).collect();
    let snapshot = CongestionSnapshot::from_graphs(&base);
    let result = RoutingResult::new(nets, state, snapshot, started.elapsed().as_secs_f64());
    Ok((result, base))
}
