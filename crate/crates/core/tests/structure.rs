mod common;

use common::instance;
use hgr_core::floorplan::validate_mosaic;
use hgr_core::geom::Point;
use hgr_core::hybrid::{build_hgsrg, pin_junction_edges, vertical_connector_edges, Vertex};
use hgr_core::router::{prepare, RouterConfig};
use hgr_core::testkit::{
    boundary_counts_by_scan, bin_by_scan, grid_side_by_search, junctions_on_outline, wall_scan,
};
use proptest::prelude::*;

fn check_structure(n: usize, k: usize, seed: u64) -> Result<(), TestCaseError> {
    let fp = instance(n, k, seed);
    prop_assert!(validate_mosaic(&fp).passes());
    let base = prepare(&fp, &RouterConfig::default()).unwrap();
    let scan = wall_scan(&fp);

    let junctions: Vec<Point> = base.junctions.junctions.iter().map(|j| j.location).collect();
    prop_assert_eq!(junctions.len(), 2 * n - 2);
    let mut sorted = junctions.clone();
    sorted.sort();
    prop_assert_eq!(&sorted, &scan.junctions);
    let segments: Vec<(Point, Point)> = base.junctions.segments.iter().map(|s| (s.a, s.b)).collect();
    let mut sorted = segments.clone();
    sorted.sort();
    prop_assert_eq!(sorted, scan.segments);

    let g = base.grid.as_ref().expect("grid layers above the split");
    let m = grid_side_by_search(n) as usize;
    prop_assert_eq!(g.m as usize, m);
    prop_assert_eq!(g.vertex_count(), m * m);
    prop_assert_eq!(g.edge_count(), 2 * m * (m - 1));
    for &p in junctions.iter().chain(fp.nets.iter().flat_map(|n| n.pins.iter().map(|p| &p.location))) {
        prop_assert_eq!(Some(g.bin_of(p)), bin_by_scan(g, p), "{:?}", p);
    }
    let counts = boundary_counts_by_scan(g, &fp.nets);
    prop_assert_eq!(&g.boundary_net_counts(&fp.nets), &counts);
    for (e, c) in g.edges.iter().zip(&counts) {
        prop_assert_eq!(e.base_capacity, *c);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graphs_match_brute_force_scans(n in 2usize..=60, k in 0usize..=40, seed in any::<u64>()) {
        check_structure(n, k, seed)?;
    }
}

#[test]
fn ten_block_seed_42() {
    check_structure(10, 20, 42).unwrap();
    let fp = instance(10, 20, 42);
    let base = prepare(&fp, &RouterConfig::default()).unwrap();
    assert_eq!(base.junctions.vertex_count(), 18);
    assert_eq!(base.junctions.edge_count(), wall_scan(&fp).segments.len());
}

#[test]
fn single_block_has_nothing_to_scan() {
    let fp = instance(1, 0, 3);
    let s = wall_scan(&fp);
    assert!(s.junctions.is_empty() && s.segments.is_empty());
}

#[test]
fn pin_connectors_reach_every_outline_junction() {
    let fp = instance(10, 20, 7);
    let base = prepare(&fp, &RouterConfig::default()).unwrap();
    let all: Vec<Point> = base.junctions.junctions.iter().map(|j| j.location).collect();
    for net in &fp.nets {
        let edges = pin_junction_edges(net, &base.junctions).unwrap();
        for (i, pin) in net.pins.iter().enumerate() {
            let mut got: Vec<Point> = edges.iter().filter(|e| e.from == Vertex::Pin(i as u32)).map(|e| e.b).collect();
            got.sort();
            let mut want = junctions_on_outline(&all, fp.block(pin.block).outline);
            want.sort();
            assert_eq!(got, want);
        }
    }
}

#[test]
fn four_pin_connector_count() {
    let fp = instance(10, 40, 11);
    let net = fp.nets.iter().find(|n| n.degree() == 4).expect("a 4-pin net");
    let base = prepare(&fp, &RouterConfig::default()).unwrap();
    let g = base.grid.as_ref().unwrap();
    let all: Vec<Point> = base.junctions.junctions.iter().map(|j| j.location).collect();
    let pin_junction: usize = net
        .pins
        .iter()
        .map(|p| junctions_on_outline(&all, fp.block(p.block).outline).len())
        .sum();
    let expected = pin_junction + net.degree() + all.len();
    let hg = build_hgsrg(net, &base).unwrap();
    assert_eq!(hg.connector_count(&base), expected);
    assert_eq!(
        pin_junction_edges(net, &base.junctions).unwrap().len() + vertical_connector_edges(net, &base.junctions, g).len(),
        expected
    );
}
