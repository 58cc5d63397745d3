//! Merging a net's pair routes into one tree.

use super::{RouteSegment, Via};
use crate::geom::{Coord, Dir, Orientation, Point, Segment};
use crate::layers::Layer;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SteinerTree {
    pub terminals: Vec<Point>,
    /// Points where three or more wire arms meet in the plane.
    pub steiner_points: Vec<Point>,
    /// Merged wires: collinear same-layer pieces that touch become one.
    pub segments: Vec<RouteSegment>,
    /// Distinct via records.
    pub vias: Vec<Via>,
    pub length: Coord,
}

fn line_key(s: &Segment) -> (Orientation, Coord, Coord, Coord) {
    match s.orientation() {
        Orientation::Horizontal => (Orientation::Horizontal, s.a.y, s.a.x, s.b.x),
        Orientation::Vertical => (Orientation::Vertical, s.a.x, s.a.y, s.b.y),
    }
}

fn on_line(o: Orientation, line: Coord, t: Coord) -> Point {
    match o {
        Orientation::Horizontal => Point::new(t, line),
        Orientation::Vertical => Point::new(line, t),
    }
}

/// Union of closed intervals, touching ones joined.
fn merge_intervals<T: Copy + Ord>(mut v: Vec<(Coord, Coord, T)>) -> Vec<(Coord, Coord, T)> {
    v.sort_unstable();
    let mut out: Vec<(Coord, Coord, T)> = Vec::with_capacity(v.len());
    for (lo, hi, tag) in v {
        match out.last_mut() {
            Some(last) if lo <= last.1 => {
                last.1 = last.1.max(hi);
                last.2 = last.2.min(tag);
            }
            _ => out.push((lo, hi, tag)),
        }
    }
    out
}

/// Collinear same-layer segments merged; result ordered by (layer, orientation, line, start).
pub fn merge_segments<'a>(segs: impl IntoIterator<Item = &'a RouteSegment>) -> Vec<RouteSegment> {
    let mut groups: BTreeMap<(Layer, Orientation, Coord), Vec<_>> = BTreeMap::new();
    for s in segs {
        let (o, line, lo, hi) = line_key(&s.seg);
        groups.entry((s.layer, o, line)).or_default().push((lo, hi, s.kind));
    }
    let mut out = Vec::new();
    for ((layer, o, line), v) in groups {
        for (lo, hi, kind) in merge_intervals(v) {
            out.push(RouteSegment {
                seg: Segment::new(on_line(o, line, lo), on_line(o, line, hi)).expect("axis-parallel"),
                layer,
                kind,
            });
        }
    }
    out
}

type Spans = Vec<(Coord, Coord, ())>;

/// Planar degree-3+ points of a set of wires.
pub fn branch_points(segs: &[RouteSegment]) -> Vec<Point> {
    let mut lines: BTreeMap<(Orientation, Coord), Spans> = BTreeMap::new();
    for s in segs {
        let (o, line, lo, hi) = line_key(&s.seg);
        lines.entry((o, line)).or_default().push((lo, hi, ()));
    }
    let lines: BTreeMap<_, _> = lines.into_iter().map(|(k, v)| (k, merge_intervals(v))).collect();
    let mut candidates = BTreeSet::new();
    for s in segs {
        candidates.insert(s.seg.a);
        candidates.insert(s.seg.b);
    }
    let arms_on = |o: Orientation, line: Coord, t: Coord, lo_dir: Dir, hi_dir: Dir| -> u8 {
        let mut mask = 0;
        if let Some(v) = lines.get(&(o, line)) {
            for &(lo, hi, ()) in v {
                if lo <= t && t <= hi {
                    if lo < t {
                        mask |= lo_dir.bit();
                    }
                    if t < hi {
                        mask |= hi_dir.bit();
                    }
                }
            }
        }
        mask
    };
    candidates
        .into_iter()
        .filter(|p| {
            let mask = arms_on(Orientation::Horizontal, p.y, p.x, Dir::West, Dir::East)
                | arms_on(Orientation::Vertical, p.x, p.y, Dir::South, Dir::North);
            mask.count_ones() >= 3
        })
        .collect()
}

/// Unions via stacks at each point, so a shared cut is counted once.
pub fn merge_vias(vias: impl IntoIterator<Item = Via>) -> Vec<Via> {
    let sorted: BTreeSet<Via> = vias.into_iter().filter(|v| v.hi > v.lo).collect();
    let mut out: Vec<Via> = Vec::new();
    for v in sorted {
        match out.last_mut() {
            Some(last) if last.at == v.at && v.lo <= last.hi => last.hi = last.hi.max(v.hi),
            _ => out.push(v),
        }
    }
    out
}

/// Merges pair routes, counting shared wire once, and finds the branch points.
pub fn identify_steiner_points<'a>(
    terminals: Vec<Point>,
    routes: impl IntoIterator<Item = &'a super::Route>,
) -> SteinerTree {
    let routes: Vec<&super::Route> = routes.into_iter().collect();
    let segments = merge_segments(routes.iter().flat_map(|r| r.segments.iter()));
    let vias = merge_vias(routes.iter().flat_map(|r| r.vias.iter().copied()));
    let length = segments.iter().map(|s| s.seg.length()).sum();
    SteinerTree {
        terminals,
        steiner_points: branch_points(&segments),
        segments,
        vias,
        length,
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Route, SegmentKind};

    #[test]
    fn via_stacks_union_per_point() {
        let at = |x| Point::new(x, 0);
        let v = |x, lo, hi| Via { at: at(x), lo, hi };
        let m = merge_vias([v(0, 1, 3), v(0, 3, 4), v(0, 2, 3), v(5, 1, 2), v(5, 3, 4)]);
        assert_eq!(m, vec![v(0, 1, 4), v(5, 1, 2), v(5, 3, 4)]);
        assert_eq!(m.iter().map(Via::cuts).sum::<usize>(), 5);
    }
    use super::*;
    use crate::floorplan::NetId;

    fn seg(a: (Coord, Coord), b: (Coord, Coord), layer: Layer) -> RouteSegment {
        RouteSegment {
            seg: Segment::new(Point::new(a.0, a.1), Point::new(b.0, b.1)).unwrap(),
            layer,
            kind: SegmentKind::Staircase,
        }
    }

    fn route(segments: Vec<RouteSegment>) -> Route {
        Route {
            net: NetId(0),
            from: segments[0].seg.a,
            to: segments[segments.len() - 1].seg.b,
            segments,
            vias: vec![],
            cost: 0.0,
            resources: vec![],
        }
    }

    #[test]
    fn t_shape() {
        let r1 = route(vec![seg((0, 0), (10, 0), 1)]);
        let r2 = route(vec![seg((5, 0), (5, 8), 1)]);
        let t = identify_steiner_points(vec![], [&r1, &r2]);
        assert_eq!(t.length, 18);
        assert_eq!(t.steiner_points, vec![Point::new(5, 0)]);
    }

    #[test]
    fn overlap_counted_once() {
        let r1 = route(vec![seg((0, 0), (10, 0), 1)]);
        let r2 = route(vec![seg((4, 0), (14, 0), 1)]);
        let t = identify_steiner_points(vec![], [&r1, &r2]);
        assert_eq!(t.length, 14);
        assert_eq!(t.segments.len(), 1);
        assert!(t.steiner_points.is_empty());
    }

    #[test]
    fn different_layers_stay_apart() {
        let r1 = route(vec![seg((0, 0), (10, 0), 1)]);
        let r2 = route(vec![seg((0, 0), (10, 0), 3)]);
        let t = identify_steiner_points(vec![], [&r1, &r2]);
        assert_eq!(t.length, 20);
    }

    #[test]
    fn disjoint_routes_sum() {
        let r1 = route(vec![seg((0, 0), (10, 0), 1)]);
        let r2 = route(vec![seg((10, 0), (10, 5), 2)]);
        let t = identify_steiner_points(vec![], [&r1, &r2]);
        assert_eq!(t.length, 15);
        assert!(t.steiner_points.is_empty());
    }
}
