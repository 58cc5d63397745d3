#![allow(dead_code)]

use hgr_core::congestion::EdgeRef;
use hgr_core::floorplan::{Block, BlockId, BlockKind, Floorplan, Net, NetId, Pin};
use hgr_core::geom::{Point, Rect};
use hgr_core::hybrid::{build_hgsrg, Hop, SearchContext, SearchView, Vertex};
use hgr_core::io::generate_mosaic;
use hgr_core::layers::Layer;
use hgr_core::router::{prepare, CapacityOverride, RouterConfig};
use hgr_core::search::{Fragment, LayerState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn instance(n: usize, k: usize, seed: u64) -> Floorplan {
    generate_mosaic(n, k, seed).to_floorplan().expect("generated documents are valid")
}

fn block(i: u32, r: (i64, i64, i64, i64)) -> Block {
    Block {
        id: BlockId(i),
        name: format!("b{i}"),
        outline: Rect::new(r.0, r.1, r.2, r.3).unwrap(),
        kind: BlockKind::SoftBlock,
        reserved_up_to: 2,
    }
}

/// Four blocks where every route from `b0` to `b3` crosses the wall
/// (40,30)-(70,30); `nets` such nets.
pub fn funnel(nets: usize) -> Floorplan {
    let blocks = vec![
        block(0, (0, 0, 40, 60)),
        block(1, (40, 0, 100, 30)),
        block(2, (40, 30, 70, 60)),
        block(3, (70, 30, 100, 60)),
    ];
    let nets = (0..nets as u32)
        .map(|i| {
            let pin = |b: u32, p: Point| Pin {
                net: NetId(i),
                block: BlockId(b),
                location: p,
                layer: 1,
            };
            Net {
                id: NetId(i),
                name: format!("n{i}"),
                pins: vec![pin(0, Point::new(20, 30)), pin(3, Point::new(85, 45))],
            }
        })
        .collect();
    Floorplan::new(Rect::new(0, 0, 100, 60).unwrap(), blocks, nets).unwrap()
}

/// Override pinning the funnel's bottleneck wall to `capacity` tracks on M1.
pub fn funnel_override(fp: &Floorplan, config: &RouterConfig, capacity: f64) -> CapacityOverride {
    let base = prepare(fp, config).unwrap();
    let seg = base
        .junctions
        .segments
        .iter()
        .find(|s| (s.a, s.b) == (Point::new(40, 30), Point::new(70, 30)))
        .expect("bottleneck wall");
    CapacityOverride {
        edge: EdgeRef::Staircase(seg.id),
        layer: 1,
        capacity,
    }
}

pub struct FragmentCase {
    pub fragment: Fragment<Hop>,
    pub src: u32,
    pub dst: u32,
    pub start: LayerState,
    pub via_penalty: f64,
}

/// A ≤12-vertex piece of a real per-net routing graph under random demand.
pub fn fragment_case(seed: u64) -> FragmentCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=12);
    let fp = instance(n, 1, seed);
    let config = RouterConfig {
        split: if rng.random_bool(0.2) { 8 } else { 2 },
        ..Default::default()
    };
    let mut base = prepare(&fp, &config).unwrap();
    let mut states: Vec<_> = base.junctions.segments.iter_mut().map(|s| &mut s.state).collect();
    if let Some(g) = base.grid.as_mut() {
        states.extend(g.edges.iter_mut().map(|e| &mut e.state));
    }
    for st in states {
        for u in &mut st.layers {
            u.demand = (rng.random::<f64>() * (u.capacity + 1.0)).floor().min(u.capacity);
        }
    }
    let net = &fp.nets[0];
    let hg = build_hgsrg(net, &base).unwrap();
    let ctx = SearchContext {
        increment: 1.0,
        ..Default::default()
    };
    let view = SearchView {
        base: &base,
        net: &hg,
        ctx: &ctx,
    };
    let root = hg.vertex_id(Vertex::Pin(0));
    let fragment = Fragment::around(&view, root, 12);
    let len = fragment.arcs.len() as u32;
    let dst = rng.random_range(0..len);
    let start = match rng.random_range(0..3) {
        0 => LayerState::Any,
        _ => LayerState::At(rng.random_range(1..=config.max_layers) as Layer),
    };
    let via_penalty = [0.0, base.default_via_penalty(), rng.random_range(0.0..200.0)][rng.random_range(0..3)];
    FragmentCase {
        fragment,
        src: 0,
        dst,
        start,
        via_penalty,
    }
}
