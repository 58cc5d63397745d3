//! The m-by-m bin grid used for over-the-block routing on the upper layers.

use crate::congestion::{EdgeState, LayerUsage};
use crate::floorplan::{Block, Net};
use crate::geom::{bounding_box, Coord, Dir, Orientation, Point, Rect, Segment};
use crate::layers::{Layer, LayerStack};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GridError {
    #[error("die {die} is too small for a {m}x{m} grid")]
    DieTooSmall { die: Rect, m: u32 },
}

/// `ceil(sqrt(2n - 2))`, at least 1.
pub fn grid_dimension(blocks: usize) -> u32 {
    let t = (2 * blocks).saturating_sub(2) as u64;
    let mut m = (t as f64).sqrt() as u64;
    while m * m < t {
        m += 1;
    }
    while m > 0 && (m - 1) * (m - 1) >= t {
        m -= 1;
    }
    m.max(1) as u32
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bin {
    pub id: u32,
    pub row: u32,
    pub col: u32,
    pub rect: Rect,
    pub center: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridEdge {
    pub id: u32,
    /// Lower bin first (left or bottom).
    pub bins: [u32; 2],
    /// Direction of wires crossing the shared boundary.
    pub orientation: Orientation,
    pub boundary: Segment,
    /// Center-to-center distance.
    pub length: Coord,
    /// Highest reserved layer among blocks under the boundary; layers above it are usable.
    pub floor: Layer,
    /// Number of nets whose bounding box meets the boundary.
    pub base_capacity: u32,
    pub state: EdgeState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum GridCapMode {
    /// Every usable layer gets the full base capacity.
    #[default]
    Replicate,
    /// The base capacity is split evenly across usable layers.
    Divide,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridGraph {
    pub m: u32,
    pub die: Rect,
    /// Vertical grid lines `x_0..=x_m`.
    pub xs: Vec<Coord>,
    /// Horizontal grid lines `y_0..=y_m`.
    pub ys: Vec<Coord>,
    pub bins: Vec<Bin>,
    pub edges: Vec<GridEdge>,
    /// Edge on each side of a bin, indexed by `Dir as usize`.
    pub bin_edges: Vec<[Option<u32>; 4]>,
}

fn grid_lines(lo: Coord, hi: Coord, m: u32) -> Vec<Coord> {
    let step = (hi - lo) / m as Coord;
    let mut v: Vec<Coord> = (0..m as Coord).map(|i| lo + i * step).collect();
    v.push(hi);
    v
}

/// Lays out `m*m` bins over the die (row-major ids, row 0 at the bottom) and the
/// `2m(m-1)` edges between side-sharing bins. The last row and column absorb the
/// integer remainder.
pub fn build_grid_graph(m: u32, die: Rect) -> Result<GridGraph, GridError> {
    let m = m.max(1);
    if (die.width() as u64) < m as u64 || (die.height() as u64) < m as u64 {
        return Err(GridError::DieTooSmall { die, m });
    }
    let xs = grid_lines(die.x_lo, die.x_hi, m);
    let ys = grid_lines(die.y_lo, die.y_hi, m);
    let mut bins = Vec::with_capacity((m * m) as usize);
    for row in 0..m {
        for col in 0..m {
            let rect = Rect::new(
                xs[col as usize],
                ys[row as usize],
                xs[col as usize + 1],
                ys[row as usize + 1],
            )
            .expect("non-empty bin");
            bins.push(Bin {
                id: row * m + col,
                row,
                col,
                rect,
                center: rect.center(),
            });
        }
    }

    let mut edges = Vec::with_capacity((2 * m * (m - 1)) as usize);
    let mut bin_edges = vec![[None; 4]; bins.len()];
    let mut push = |a: u32, b: u32, orientation: Orientation, bins: &[Bin]| {
        let (ra, rb) = (&bins[a as usize], &bins[b as usize]);
        let boundary = match orientation {
            Orientation::Horizontal => Segment::new(
                Point::new(ra.rect.x_hi, ra.rect.y_lo),
                Point::new(ra.rect.x_hi, ra.rect.y_hi),
            ),
            Orientation::Vertical => Segment::new(
                Point::new(ra.rect.x_lo, ra.rect.y_hi),
                Point::new(ra.rect.x_hi, ra.rect.y_hi),
            ),
        }
        .expect("axis-parallel boundary");
        let id = edges.len() as u32;
        let (fwd, back) = match orientation {
            Orientation::Horizontal => (Dir::East, Dir::West),
            Orientation::Vertical => (Dir::North, Dir::South),
        };
        bin_edges[a as usize][fwd as usize] = Some(id);
        bin_edges[b as usize][back as usize] = Some(id);
        edges.push(GridEdge {
            id,
            bins: [a, b],
            orientation,
            boundary,
            length: ra.center.manhattan(rb.center),
            floor: 0,
            base_capacity: 0,
            state: EdgeState::default(),
        });
    };
    for row in 0..m {
        for col in 0..m {
            let id = row * m + col;
            if col + 1 < m {
                push(id, id + 1, Orientation::Horizontal, &bins);
            }
            if row + 1 < m {
                push(id, id + m, Orientation::Vertical, &bins);
            }
        }
    }

    Ok(GridGraph {
        m,
        die,
        xs,
        ys,
        bins,
        edges,
        bin_edges,
    })
}

impl GridGraph {
    pub fn vertex_count(&self) -> usize {
        self.bins.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    fn index_on(lines: &[Coord], v: Coord) -> usize {
        // First cell whose upper line is >= v; ties go to the lower cell.
        let m = lines.len() - 1;
        lines[1..].partition_point(|&l| l < v).min(m - 1)
    }

    /// The bin containing `p`; points on a shared border go to the lowest (row, col).
    pub fn bin_of(&self, p: Point) -> u32 {
        let col = Self::index_on(&self.xs, p.x);
        let row = Self::index_on(&self.ys, p.y);
        (row * self.m as usize + col) as u32
    }

    pub fn bin(&self, id: u32) -> &Bin {
        &self.bins[id as usize]
    }

    pub fn edge_on_side(&self, bin: u32, side: Dir) -> Option<u32> {
        self.bin_edges[bin as usize][side as usize]
    }

    /// Boundary lines `lines[i]` (interior only) falling in `[lo, hi]`, as the
    /// cell index on their low side.
    fn interior_lines_within(lines: &[Coord], lo: Coord, hi: Coord) -> std::ops::Range<usize> {
        let interior = &lines[1..lines.len() - 1];
        let start = interior.partition_point(|&l| l < lo);
        let end = interior.partition_point(|&l| l <= hi);
        start..end.max(start)
    }

    /// Cells whose closed span meets `[lo, hi]`.
    fn cells_meeting(lines: &[Coord], lo: Coord, hi: Coord) -> std::ops::Range<usize> {
        let m = lines.len() - 1;
        let start = lines[1..].partition_point(|&l| l < lo);
        let end = lines[..m].partition_point(|&l| l <= hi);
        start..end.max(start)
    }

    /// Cells whose span overlaps `(lo, hi)` with positive length.
    fn cells_overlapping(lines: &[Coord], lo: Coord, hi: Coord) -> std::ops::Range<usize> {
        let m = lines.len() - 1;
        let start = lines[1..].partition_point(|&l| l <= lo);
        let end = lines[..m].partition_point(|&l| l < hi);
        start..end.max(start)
    }

    fn edge_between(&self, row: usize, col: usize, o: Orientation) -> Option<u32> {
        let id = row * self.m as usize + col;
        let side = match o {
            Orientation::Horizontal => Dir::East,
            Orientation::Vertical => Dir::North,
        };
        self.bin_edges[id][side as usize]
    }

    /// For each edge, the number of nets whose pin bounding box meets the
    /// edge's shared boundary (closed intersection).
    pub fn boundary_net_counts(&self, nets: &[Net]) -> Vec<u32> {
        let mut counts = vec![0u32; self.edges.len()];
        for net in nets {
            let Some((lo, hi)) = bounding_box(net.pin_points()) else {
                continue;
            };
            // Vertical boundaries (horizontal edges) at x = xs[c+1].
            for c in Self::interior_lines_within(&self.xs, lo.x, hi.x) {
                for r in Self::cells_meeting(&self.ys, lo.y, hi.y) {
                    if let Some(e) = self.edge_between(r, c, Orientation::Horizontal) {
                        counts[e as usize] += 1;
                    }
                }
            }
            for r in Self::interior_lines_within(&self.ys, lo.y, hi.y) {
                for c in Self::cells_meeting(&self.xs, lo.x, hi.x) {
                    if let Some(e) = self.edge_between(r, c, Orientation::Vertical) {
                        counts[e as usize] += 1;
                    }
                }
            }
        }
        counts
    }

    /// Highest `reserved_up_to` among blocks that run along each edge's boundary.
    pub fn boundary_floors(&self, blocks: &[Block]) -> Vec<Layer> {
        let mut floors = vec![0; self.edges.len()];
        for b in blocks {
            let r = b.outline;
            for c in Self::interior_lines_within(&self.xs, r.x_lo, r.x_hi) {
                for row in Self::cells_overlapping(&self.ys, r.y_lo, r.y_hi) {
                    if let Some(e) = self.edge_between(row, c, Orientation::Horizontal) {
                        floors[e as usize] = floors[e as usize].max(b.reserved_up_to);
                    }
                }
            }
            for row in Self::interior_lines_within(&self.ys, r.y_lo, r.y_hi) {
                for c in Self::cells_overlapping(&self.xs, r.x_lo, r.x_hi) {
                    if let Some(e) = self.edge_between(row, c, Orientation::Vertical) {
                        floors[e as usize] = floors[e as usize].max(b.reserved_up_to);
                    }
                }
            }
        }
        floors
    }

    pub fn set_capacity(&mut self, edge: u32, layer: Layer, capacity: f64) -> bool {
        match self
            .edges
            .get_mut(edge as usize)
            .and_then(|e| e.state.layer_mut(layer))
        {
            Some(u) => {
                u.capacity = capacity;
                true
            }
            None => false,
        }
    }
}

/// Sets base capacities from net bounding boxes and distributes them over the
/// over-the-block layers each edge may use. Runs once, before routing.
pub fn compute_grid_capacities(
    g: &mut GridGraph,
    nets: &[Net],
    blocks: &[Block],
    layers: &LayerStack,
    mode: GridCapMode,
) {
    let counts = g.boundary_net_counts(nets);
    let floors = g.boundary_floors(blocks);
    for (e, (count, floor)) in g.edges.iter_mut().zip(counts.into_iter().zip(floors)) {
        e.base_capacity = count;
        e.floor = floor;
        let usable: Vec<Layer> = layers
            .grid_layers_for(e.orientation)
            .filter(|&l| l > floor)
            .collect();
        let per_layer = match mode {
            GridCapMode::Replicate => count as f64,
            GridCapMode::Divide if usable.is_empty() => 0.0,
            GridCapMode::Divide => count as f64 / usable.len() as f64,
        };
        e.state = EdgeState {
            layers: usable.into_iter().map(|l| LayerUsage::new(l, per_layer)).collect(),
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::fixtures::{block, net_at};

    fn die() -> Rect {
        Rect::new(0, 0, 90, 90).unwrap()
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(grid_dimension(5), 3);
        assert_eq!(grid_dimension(2254), 68);
        assert_eq!(grid_dimension(1), 1);
        assert_eq!(grid_dimension(2), 2);
        assert_eq!(grid_dimension(3), 2);
    }

    #[test]
    fn counts_follow_closed_forms() {
        for (m, v, e) in [(3, 9, 12), (1, 1, 0), (68, 4624, 9112)] {
            let g = build_grid_graph(m, Rect::new(0, 0, 1000, 1000).unwrap()).unwrap();
            assert_eq!(g.vertex_count(), v);
            assert_eq!(g.edge_count(), e);
        }
    }

    #[test]
    fn remainder_goes_to_last_bin() {
        let g = build_grid_graph(3, Rect::new(0, 0, 100, 10).unwrap()).unwrap();
        assert_eq!(g.xs, vec![0, 33, 66, 100]);
        let area: i128 = g.bins.iter().map(|b| b.rect.area()).sum();
        assert_eq!(area, 1000);
    }

    #[test]
    fn border_points_go_to_lower_bin() {
        let g = build_grid_graph(3, die()).unwrap();
        assert_eq!(g.bin_of(Point::new(30, 30)), 0);
        assert_eq!(g.bin_of(Point::new(31, 30)), 1);
        assert_eq!(g.bin_of(Point::new(90, 90)), 8);
        assert_eq!(g.bin_of(Point::new(0, 61)), 6);
    }

    #[test]
    fn side_edges_are_linked() {
        let g = build_grid_graph(3, die()).unwrap();
        let center = 4;
        for side in Dir::ALL {
            let e = g.edge_on_side(center, side).unwrap();
            assert!(g.edges[e as usize].bins.contains(&center));
        }
        assert_eq!(g.edge_on_side(0, Dir::West), None);
        assert_eq!(g.edge_on_side(0, Dir::South), None);
    }

    #[test]
    fn die_wide_net_counts_everywhere() {
        let g = build_grid_graph(3, die()).unwrap();
        let net = net_at("n", &[(0, Point::new(0, 0)), (0, Point::new(90, 90))]);
        assert!(g.boundary_net_counts(&[net]).iter().all(|&c| c == 1));
    }

    #[test]
    fn net_inside_one_bin_counts_nowhere() {
        let g = build_grid_graph(3, die()).unwrap();
        let net = net_at("n", &[(0, Point::new(40, 40)), (0, Point::new(50, 50))]);
        assert!(g.boundary_net_counts(&[net]).iter().all(|&c| c == 0));
    }

    #[test]
    fn capacities_respect_block_reservations() {
        let mut g = build_grid_graph(2, Rect::new(0, 0, 100, 100).unwrap()).unwrap();
        let mut left = block("l", (0, 0, 50, 100));
        left.reserved_up_to = 4;
        let right = block("r", (50, 0, 100, 100));
        let net = net_at("n", &[(0, Point::new(0, 0)), (1, Point::new(100, 100))]);
        compute_grid_capacities(
            &mut g,
            &[net],
            &[left, right],
            &LayerStack::default(),
            GridCapMode::Replicate,
        );
        // Horizontal edges sit on x=50, along both blocks: floor 4.
        let h = g.edges.iter().find(|e| e.orientation == Orientation::Horizontal).unwrap();
        assert_eq!(h.floor, 4);
        let ls: Vec<Layer> = h.state.layers.iter().map(|u| u.layer).collect();
        assert_eq!(ls, vec![5, 7]);
        // The vertical edge over the left block (x in 0..50) is blocked up to 4.
        let v_left = g.edges.iter().find(|e| e.orientation == Orientation::Vertical && e.bins == [0, 2]).unwrap();
        assert_eq!(v_left.state.layers.iter().map(|u| u.layer).collect::<Vec<_>>(), vec![6, 8]);
        let v_right = g.edges.iter().find(|e| e.bins == [1, 3]).unwrap();
        assert_eq!(v_right.state.layers.iter().map(|u| u.layer).collect::<Vec<_>>(), vec![4, 6, 8]);
        assert!(v_right.state.layers.iter().all(|u| u.capacity == 1.0));

        compute_grid_capacities(
            &mut g,
            &[net_at("n", &[(0, Point::new(0, 0)), (1, Point::new(100, 100))])],
            &[block("l", (0, 0, 50, 100)), block("r", (50, 0, 100, 100))],
            &LayerStack::default(),
            GridCapMode::Divide,
        );
        let v_right = g.edges.iter().find(|e| e.bins == [1, 3]).unwrap();
        assert!(v_right.state.layers.iter().all(|u| (u.capacity - 1.0 / 3.0).abs() < 1e-12));
    }
}
