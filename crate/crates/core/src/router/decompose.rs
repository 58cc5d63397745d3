//! Multi-terminal nets are routed as the edges of a rectilinear MST over their pins.

use crate::floorplan::Net;
use crate::geom::{Coord, Point};

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Kruskal MST on Manhattan distance over `points`. Pairs come back in
/// construction order; ties break on (weight, i, j).
pub fn mst_pairs(points: &[Point]) -> Vec<(usize, usize)> {
    let n = points.len();
    let mut cand: Vec<(Coord, usize, usize)> = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            cand.push((points[i].manhattan(points[j]), i, j));
        }
    }
    cand.sort_unstable();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    for (_, i, j) in cand {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a] = b;
            out.push((i, j));
            if out.len() + 1 == n {
                break;
            }
        }
    }
    out
}

/// Pin-index pairs to route for `net`: one pair for two pins, MST edges otherwise.
pub fn decompose_multi_terminal(net: &Net) -> Vec<(usize, usize)> {
    let pts: Vec<Point> = net.pin_points().collect();
    mst_pairs(&pts)
}

pub fn mst_length(points: &[Point]) -> Coord {
    mst_pairs(points)
        .into_iter()
        .map(|(i, j)| points[i].manhattan(points[j]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collinear_chain() {
        let pts = [Point::new(0, 0), Point::new(5, 0), Point::new(9, 0)];
        assert_eq!(mst_pairs(&pts), vec![(1, 2), (0, 1)]);
    }

    #[test]
    fn unit_square_tie_break_is_fixed() {
        let pts = [Point::new(0, 0), Point::new(1, 0), Point::new(0, 1), Point::new(1, 1)];
        let pairs = mst_pairs(&pts);
        assert_eq!(pairs, vec![(0, 1), (0, 2), (1, 3)]);
        assert_eq!(mst_length(&pts), 3);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(mst_pairs(&[]).is_empty());
        assert!(mst_pairs(&[Point::new(1, 1)]).is_empty());
        assert_eq!(mst_pairs(&[Point::new(0, 0), Point::new(3, 4)]), vec![(0, 1)]);
    }
}
