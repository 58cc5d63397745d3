//! Brute-force oracles for checking the router's graph builders and searches.
//!
//! Everything here is exponential or quadratic on purpose and shares no code
//! path with the production modules beyond the plain data types.

use crate::floorplan::{Floorplan, Net};
use crate::geom::{Coord, Point, Rect};
use crate::grid::GridGraph;
use crate::layers::Layer;
use crate::search::Fragment;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, HashSet};
use thiserror::Error;

/// Relative tolerance for comparing float costs computed along different paths.
pub const REL_TOL: f64 = 1e-9;

pub fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= REL_TOL * a.abs().max(b.abs())
}

pub const TINY_MAX_VERTICES: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct TinyArc {
    pub from: u32,
    pub to: u32,
    pub weight: f64,
    pub enter: Option<Layer>,
    pub leave: Option<Layer>,
    pub vias: u32,
}

/// A directed graph small enough to enumerate every simple path.
///
/// Enumeration over simple paths matches a layer-state search only when each
/// arc carries at least `|enter - leave|` internal vias; [`TinyGraph::random`]
/// and the router's own arcs both respect that.
#[derive(Debug, Clone, Default)]
pub struct TinyGraph {
    pub vertices: usize,
    pub arcs: Vec<TinyArc>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Exhaustive {
    pub cost: f64,
    /// Every simple path within [`REL_TOL`] of the minimum, as vertex lists.
    pub paths: Vec<Vec<u32>>,
}

impl TinyGraph {
    pub fn new(vertices: usize) -> Self {
        assert!(vertices <= TINY_MAX_VERTICES, "{vertices} vertices is too many to enumerate");
        Self {
            vertices,
            arcs: Vec::new(),
        }
    }

    pub fn arc(&mut self, from: u32, to: u32, weight: f64, enter: Option<Layer>, leave: Option<Layer>, vias: u32) {
        self.arcs.push(TinyArc {
            from,
            to,
            weight,
            enter,
            leave,
            vias,
        });
    }

    /// Both directions on one layer, no vias.
    pub fn wire(&mut self, a: u32, b: u32, weight: f64, layer: Layer) {
        self.arc(a, b, weight, Some(layer), Some(layer), 0);
        self.arc(b, a, weight, Some(layer), Some(layer), 0);
    }

    pub fn from_fragment<T>(f: &Fragment<T>) -> Self {
        let mut g = Self::new(f.arcs.len());
        for (v, out) in f.arcs.iter().enumerate() {
            for a in out {
                g.arc(v as u32, a.to, a.weight, a.enter, a.leave, a.vias);
            }
        }
        g
    }

    /// Random multigraph on `vertices` vertices with layers `1..=max_layer`.
    pub fn random(seed: u64, vertices: usize, max_layer: Layer) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = Self::new(vertices);
        if vertices < 2 {
            return g;
        }
        let count = rng.random_range(vertices..=3 * vertices);
        for _ in 0..count {
            let a = rng.random_range(0..vertices as u32);
            let mut b = rng.random_range(0..vertices as u32 - 1);
            if b >= a {
                b += 1;
            }
            let weight = rng.random_range(0..100) as f64 / 4.0;
            match rng.random_range(0..4) {
                0 => g.arc(a, b, weight, None, None, 0),
                1 => {
                    let (e, l) = (rng.random_range(1..=max_layer), rng.random_range(1..=max_layer));
                    let extra = rng.random_range(0..2);
                    g.arc(a, b, weight, Some(e), Some(l), e.abs_diff(l) as u32 + extra);
                }
                _ => g.wire(a, b, weight, rng.random_range(1..=max_layer)),
            }
        }
        g
    }

    /// Cost of following `arcs` in order, starting on `start` (`None`: no layer yet).
    pub fn path_cost(&self, arcs: &[usize], start: Option<Layer>, via_penalty: f64) -> f64 {
        let mut layer = start;
        let mut total = 0.0;
        for &i in arcs {
            let a = &self.arcs[i];
            let switch = match (layer, a.enter) {
                (Some(cur), Some(e)) => cur.abs_diff(e) as u32,
                _ => 0,
            };
            total += a.weight + via_penalty * (a.vias + switch) as f64;
            if a.leave.is_some() {
                layer = a.leave;
            }
        }
        total
    }
}

struct Walk<'a> {
    g: &'a TinyGraph,
    t: u32,
    start: Option<Layer>,
    lambda: f64,
    visited: Vec<bool>,
    arcs: Vec<usize>,
    verts: Vec<u32>,
    found: Vec<(f64, Vec<u32>)>,
}

impl Walk<'_> {
    fn extend(&mut self) {
        let at = *self.verts.last().expect("non-empty");
        for (i, a) in self.g.arcs.iter().enumerate() {
            if a.from != at || self.visited[a.to as usize] {
                continue;
            }
            self.arcs.push(i);
            self.verts.push(a.to);
            if a.to == self.t {
                let cost = self.g.path_cost(&self.arcs, self.start, self.lambda);
                self.found.push((cost, self.verts.clone()));
            } else {
                self.visited[a.to as usize] = true;
                self.extend();
                self.visited[a.to as usize] = false;
            }
            self.arcs.pop();
            self.verts.pop();
        }
    }
}

/// Minimum cost over all simple `s`→`t` paths, or `None` if `t` is unreachable.
pub fn exhaustive_shortest_path(
    g: &TinyGraph,
    s: u32,
    t: u32,
    start: Option<Layer>,
    via_penalty: f64,
) -> Option<Exhaustive> {
    if s == t {
        return Some(Exhaustive {
            cost: 0.0,
            paths: vec![vec![s]],
        });
    }
    let mut walk = Walk {
        g,
        t,
        start,
        lambda: via_penalty,
        visited: vec![false; g.vertices],
        arcs: Vec::new(),
        verts: vec![s],
        found: Vec::new(),
    };
    walk.visited[s as usize] = true;
    walk.extend();
    let found = walk.found;
    let cost = found.iter().map(|f| f.0).fold(f64::INFINITY, f64::min);
    if !cost.is_finite() {
        return None;
    }
    let mut paths: Vec<Vec<u32>> = found.into_iter().filter(|f| close(f.0, cost)).map(|f| f.1).collect();
    paths.sort();
    paths.dedup();
    Some(Exhaustive { cost, paths })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{0} pins is beyond the exhaustive Steiner oracle (at most 4)")]
    TooManyPins(usize),
}

/// Exact rectilinear Steiner tree length for up to four pins.
///
/// Solves the Steiner problem on the Hanan grid by subset dynamic programming
/// over terminal sets; grid distances are Manhattan.
pub fn exhaustive_rsmt(pins: &[Point]) -> Result<Coord, OracleError> {
    if pins.len() > 4 {
        return Err(OracleError::TooManyPins(pins.len()));
    }
    if pins.len() < 2 {
        return Ok(0);
    }
    let xs: BTreeSet<Coord> = pins.iter().map(|p| p.x).collect();
    let ys: BTreeSet<Coord> = pins.iter().map(|p| p.y).collect();
    let grid: Vec<Point> = xs.iter().flat_map(|&x| ys.iter().map(move |&y| Point::new(x, y))).collect();
    let d = |a: Point, b: Point| (a.x - b.x).abs() + (a.y - b.y).abs();
    let k = pins.len();
    let full = (1usize << k) - 1;
    let mut dp = vec![vec![Coord::MAX; grid.len()]; full + 1];
    for (i, &p) in pins.iter().enumerate() {
        for (v, &q) in grid.iter().enumerate() {
            dp[1 << i][v] = d(p, q);
        }
    }
    for mask in 1..=full {
        if mask.count_ones() < 2 {
            continue;
        }
        let mut joined = vec![Coord::MAX; grid.len()];
        for (v, slot) in joined.iter_mut().enumerate() {
            let mut sub = (mask - 1) & mask;
            while sub > 0 {
                let (a, b) = (dp[sub][v], dp[mask ^ sub][v]);
                if a < Coord::MAX && b < Coord::MAX {
                    *slot = (*slot).min(a + b);
                }
                sub = (sub - 1) & mask;
            }
        }
        for v in 0..grid.len() {
            dp[mask][v] = (0..grid.len())
                .filter(|&u| joined[u] < Coord::MAX)
                .map(|u| joined[u] + d(grid[u], grid[v]))
                .min()
                .unwrap_or(Coord::MAX);
        }
    }
    let first = grid.iter().position(|&q| q == pins[0]).expect("pin on its own grid");
    Ok(dp[full][first])
}

/// Junctions and junction-to-junction wall pieces found by pairwise block scan.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WallScan {
    pub junctions: Vec<Point>,
    /// Endpoints ordered low to high, list sorted.
    pub segments: Vec<(Point, Point)>,
}

fn closed_contains(r: &Rect, p: Point) -> bool {
    r.x_lo <= p.x && p.x <= r.x_hi && r.y_lo <= p.y && p.y <= r.y_hi
}

/// Ground truth for the junction graph of a mosaic floorplan.
///
/// A block corner is a junction when it is not a die corner and is touched by
/// three blocks (interior) or two (on the die edge). A wall is any stretch two
/// blocks share, so die-outline walls never appear.
pub fn wall_scan(fp: &Floorplan) -> WallScan {
    let die = fp.die;
    let rects: Vec<Rect> = fp.blocks.iter().map(|b| b.outline).collect();
    let mut corners = BTreeSet::new();
    for r in &rects {
        for p in [
            Point::new(r.x_lo, r.y_lo),
            Point::new(r.x_hi, r.y_lo),
            Point::new(r.x_lo, r.y_hi),
            Point::new(r.x_hi, r.y_hi),
        ] {
            corners.insert(p);
        }
    }
    let junctions: Vec<Point> = corners
        .into_iter()
        .filter(|&p| {
            let on_x = p.x == die.x_lo || p.x == die.x_hi;
            let on_y = p.y == die.y_lo || p.y == die.y_hi;
            if on_x && on_y {
                return false;
            }
            let touching = rects.iter().filter(|r| closed_contains(r, p)).count();
            touching == if on_x || on_y { 2 } else { 3 }
        })
        .collect();

    let mut segments = BTreeSet::new();
    for (i, a) in rects.iter().enumerate() {
        for b in &rects[i + 1..] {
            // (line is vertical, line coordinate, span)
            let mut shared = Vec::new();
            if a.x_hi == b.x_lo || b.x_hi == a.x_lo {
                let x = if a.x_hi == b.x_lo { a.x_hi } else { a.x_lo };
                shared.push((true, x, a.y_lo.max(b.y_lo), a.y_hi.min(b.y_hi)));
            }
            if a.y_hi == b.y_lo || b.y_hi == a.y_lo {
                let y = if a.y_hi == b.y_lo { a.y_hi } else { a.y_lo };
                shared.push((false, y, a.x_lo.max(b.x_lo), a.x_hi.min(b.x_hi)));
            }
            for (vertical, line, lo, hi) in shared {
                if lo >= hi {
                    continue;
                }
                let at = |c: Coord| if vertical { Point::new(line, c) } else { Point::new(c, line) };
                let mut cuts: Vec<Coord> = junctions
                    .iter()
                    .filter(|j| if vertical { j.x == line } else { j.y == line })
                    .map(|j| if vertical { j.y } else { j.x })
                    .filter(|&c| lo < c && c < hi)
                    .collect();
                cuts.push(lo);
                cuts.push(hi);
                cuts.sort_unstable();
                for w in cuts.windows(2) {
                    segments.insert((at(w[0]), at(w[1])));
                }
            }
        }
    }
    WallScan {
        junctions,
        segments: segments.into_iter().collect(),
    }
}

/// Junctions lying on the closed outline of `r`.
pub fn junctions_on_outline(junctions: &[Point], r: Rect) -> Vec<Point> {
    junctions
        .iter()
        .copied()
        .filter(|&p| closed_contains(&r, p) && (p.x == r.x_lo || p.x == r.x_hi || p.y == r.y_lo || p.y == r.y_hi))
        .collect()
}

/// First bin, in id order, whose closed rectangle holds `p`.
pub fn bin_by_scan(g: &GridGraph, p: Point) -> Option<u32> {
    g.bins.iter().find(|b| closed_contains(&b.rect, p)).map(|b| b.id)
}

/// Per grid edge, the nets whose pin bounding box touches the edge's boundary.
pub fn boundary_counts_by_scan(g: &GridGraph, nets: &[Net]) -> Vec<u32> {
    let boxes: Vec<Rect> = nets
        .iter()
        .filter(|n| !n.pins.is_empty())
        .map(|n| {
            let mut r = Rect {
                x_lo: Coord::MAX,
                y_lo: Coord::MAX,
                x_hi: Coord::MIN,
                y_hi: Coord::MIN,
            };
            for p in &n.pins {
                let q = p.location;
                r.x_lo = r.x_lo.min(q.x);
                r.y_lo = r.y_lo.min(q.y);
                r.x_hi = r.x_hi.max(q.x);
                r.y_hi = r.y_hi.max(q.y);
            }
            r
        })
        .collect();
    g.edges
        .iter()
        .map(|e| {
            let s = e.boundary;
            let (x0, x1) = (s.a.x.min(s.b.x), s.a.x.max(s.b.x));
            let (y0, y1) = (s.a.y.min(s.b.y), s.a.y.max(s.b.y));
            boxes
                .iter()
                .filter(|r| r.x_lo <= x1 && x0 <= r.x_hi && r.y_lo <= y1 && y0 <= r.y_hi)
                .count() as u32
        })
        .collect()
}

/// Smallest m with m² ≥ 2n − 2, at least 1.
pub fn grid_side_by_search(blocks: usize) -> u32 {
    let target = (2 * blocks).saturating_sub(2);
    (1..).find(|m: &usize| m * m >= target).expect("unbounded search") as u32
}

/// Covered length of axis-parallel segments, by marking unit steps.
pub fn union_length_by_raster(segments: &[(Point, Point)]) -> Coord {
    let mut steps: HashSet<(bool, Coord, Coord)> = HashSet::new();
    for &(a, b) in segments {
        if a.x == b.x {
            for y in a.y.min(b.y)..a.y.max(b.y) {
                steps.insert((true, a.x, y));
            }
        } else {
            assert_eq!(a.y, b.y, "segment {a:?}-{b:?} is not axis-parallel");
            for x in a.x.min(b.x)..a.x.max(b.x) {
                steps.insert((false, a.y, x));
            }
        }
    }
    steps.len() as Coord
}

/// Mean of the `k` largest values.
pub fn top_mean_by_sort(values: &[f64], k: usize) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    let k = k.min(v.len()).max(1);
    v[..k].iter().sum::<f64>() / k as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::fixtures::two_blocks;

    #[test]
    fn same_vertex_is_free() {
        let g = TinyGraph::new(3);
        assert_eq!(exhaustive_shortest_path(&g, 1, 1, None, 5.0).unwrap().cost, 0.0);
    }

    #[test]
    fn triangle_prefers_two_hops() {
        let mut g = TinyGraph::new(3);
        g.wire(0, 1, 1.0, 1);
        g.wire(1, 2, 1.0, 1);
        g.wire(0, 2, 3.0, 1);
        let r = exhaustive_shortest_path(&g, 0, 2, None, 0.0).unwrap();
        assert_eq!(r.cost, 2.0);
        assert_eq!(r.paths, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn layer_switches_are_charged() {
        let mut g = TinyGraph::new(3);
        g.wire(0, 1, 1.0, 1);
        g.wire(1, 2, 1.0, 4);
        // 2 + 3 cuts at 0.5.
        assert_eq!(exhaustive_shortest_path(&g, 0, 2, Some(1), 0.5).unwrap().cost, 3.5);
        assert!(exhaustive_shortest_path(&g, 2, 0, Some(1), 0.5).is_some());
        let mut one_way = TinyGraph::new(2);
        one_way.arc(0, 1, 1.0, None, None, 0);
        assert!(exhaustive_shortest_path(&one_way, 1, 0, None, 0.0).is_none());
    }

    #[test]
    fn rsmt_examples() {
        let p = |x, y| Point::new(x, y);
        assert_eq!(exhaustive_rsmt(&[p(0, 0), p(3, 4)]), Ok(7));
        assert_eq!(exhaustive_rsmt(&[p(0, 0), p(4, 0), p(2, 3)]), Ok(7));
        assert_eq!(exhaustive_rsmt(&[p(0, 0), p(1, 0), p(0, 1), p(1, 1)]), Ok(3));
        assert_eq!(exhaustive_rsmt(&[p(0, 0); 5]), Err(OracleError::TooManyPins(5)));
        // Plus-shaped: one Steiner point in the middle.
        assert_eq!(exhaustive_rsmt(&[p(0, 2), p(4, 2), p(2, 0), p(2, 4)]), Ok(8));
    }

    #[test]
    fn two_block_scan() {
        let s = wall_scan(&two_blocks());
        assert_eq!(s.junctions.len(), 2);
        assert_eq!(s.segments.len(), 1);
    }

    #[test]
    fn grid_side_examples() {
        assert_eq!(grid_side_by_search(1), 1);
        assert_eq!(grid_side_by_search(5), 3);
        assert_eq!(grid_side_by_search(10), 5);
    }

    #[test]
    fn raster_union() {
        let p = |x, y| Point::new(x, y);
        assert_eq!(union_length_by_raster(&[(p(0, 0), p(5, 0)), (p(3, 0), p(8, 0)), (p(0, 0), p(0, 2))]), 10);
    }
}
