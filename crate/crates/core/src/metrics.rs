//! Reported quantities: totals, completion, congestion averages and
//! Steiner-normalized wirelength.

use crate::congestion::EdgeRef;
use crate::floorplan::NetId;
use crate::geom::{Coord, Point};
use crate::hybrid::RoutingGraphs;
use crate::layers::Layer;
use crate::router::{mst_length, NetRoute, NetStatus, RoutingState};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("congestion snapshot has no capacity-bearing edges")]
    EmptySnapshot,
    #[error("percentage {0} outside (0, 100]")]
    BadPercent(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeCongestion {
    pub edge: EdgeRef,
    pub layer: Layer,
    pub p: f64,
}

/// Congestion of every edge layer with positive capacity, both graphs pooled.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CongestionSnapshot {
    pub entries: Vec<EdgeCongestion>,
}

impl CongestionSnapshot {
    pub fn from_graphs(base: &RoutingGraphs) -> Self {
        let entries = base
            .edges()
            .flat_map(|(edge, st)| {
                st.layers.iter().filter(|u| u.capacity > 0.0).map(move |u| EdgeCongestion {
                    edge,
                    layer: u.layer,
                    p: u.congestion(),
                })
            })
            .collect();
        Self { entries }
    }

    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Self {
        Self {
            entries: values
                .into_iter()
                .enumerate()
                .map(|(i, p)| EdgeCongestion {
                    edge: EdgeRef::Staircase(i as u32),
                    layer: 1,
                    p,
                })
                .collect(),
        }
    }

    pub fn max(&self) -> f64 {
        self.entries.iter().map(|e| e.p).fold(0.0, f64::max)
    }
}

/// The x values averaged by [`wace4`].
pub const WACE_PERCENTS: [f64; 4] = [0.5, 1.0, 2.0, 5.0];

/// Number of entries in the worst `x` percent of `n`, at least one.
pub fn worst_count(x: f64, n: usize) -> usize {
    // x carries at most three decimals; scale to integers before the ceiling.
    let scaled = (x * 1000.0).round() as u128 * n as u128;
    scaled.div_ceil(100_000).max(1) as usize
}

/// Mean congestion of the worst `x` percent of edge layers; ties by edge id.
pub fn ace(x: f64, snap: &CongestionSnapshot) -> Result<f64, MetricsError> {
    if !(x > 0.0 && x <= 100.0) {
        return Err(MetricsError::BadPercent(x));
    }
    if snap.entries.is_empty() {
        return Err(MetricsError::EmptySnapshot);
    }
    let mut v: Vec<&EdgeCongestion> = snap.entries.iter().collect();
    v.sort_by(|a, b| {
        b.p.total_cmp(&a.p)
            .then(a.edge.cmp(&b.edge))
            .then(a.layer.cmp(&b.layer))
    });
    let k = worst_count(x, v.len()).min(v.len());
    Ok(v[..k].iter().map(|e| e.p).sum::<f64>() / k as f64)
}

pub fn wace4(snap: &CongestionSnapshot) -> Result<f64, MetricsError> {
    let mut sum = 0.0;
    for x in WACE_PERCENTS {
        sum += ace(x, snap)?;
    }
    Ok(sum / 4.0)
}

fn dedup(points: &[Point]) -> Vec<Point> {
    let mut v = points.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Rectilinear Steiner minimal tree length for at most four distinct points:
/// the best MST over the terminals plus up to two Hanan-grid points.
pub fn rsmt_small(points: &[Point]) -> Option<Coord> {
    let pts = dedup(points);
    match pts.len() {
        0 | 1 => return Some(0),
        2 => return Some(pts[0].manhattan(pts[1])),
        3 | 4 => {}
        _ => return None,
    }
    let mut xs: Vec<Coord> = pts.iter().map(|p| p.x).collect();
    let mut ys: Vec<Coord> = pts.iter().map(|p| p.y).collect();
    xs.sort_unstable();
    xs.dedup();
    ys.sort_unstable();
    ys.dedup();
    let hanan: Vec<Point> = xs
        .iter()
        .flat_map(|&x| ys.iter().map(move |&y| Point::new(x, y)))
        .filter(|p| !pts.contains(p))
        .collect();
    let mut best = mst_length(&pts);
    let mut buf = pts.clone();
    for (i, &a) in hanan.iter().enumerate() {
        buf.push(a);
        best = best.min(mst_length(&buf));
        if pts.len() == 4 {
            for &b in &hanan[i + 1..] {
                buf.push(b);
                best = best.min(mst_length(&buf));
                buf.pop();
            }
        }
        buf.pop();
    }
    Some(best)
}

/// Steiner lower bound and whether it is exact (RSMT for four or fewer
/// distinct pins, rectilinear MST otherwise).
pub fn steiner_bound(points: &[Point]) -> (Coord, bool) {
    match rsmt_small(points) {
        Some(l) => (l, true),
        None => (mst_length(&dedup(points)), false),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedLength {
    /// (net, routed / bound, bound is exact) for routed nets with a positive bound.
    pub per_net: Vec<(NetId, f64, bool)>,
    pub mean: f64,
    /// Mean over nets with an exact bound.
    pub exact_mean: f64,
}

pub fn normalized_length(result: &RoutingResult) -> NormalizedLength {
    let mut per_net = Vec::new();
    for n in result.nets.iter().filter(|n| n.status == NetStatus::Routed) {
        let Some(tree) = &n.tree else { continue };
        let (bound, exact) = steiner_bound(&tree.terminals);
        if bound > 0 {
            per_net.push((n.net, n.length() as f64 / bound as f64, exact));
        }
    }
    let mean_of = |it: &mut dyn Iterator<Item = f64>| {
        let (s, c) = it.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
        if c == 0 {
            0.0
        } else {
            s / c as f64
        }
    };
    let mean = mean_of(&mut per_net.iter().map(|e| e.1));
    let exact_mean = mean_of(&mut per_net.iter().filter(|e| e.2).map(|e| e.1));
    NormalizedLength {
        per_net,
        mean,
        exact_mean,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingResult {
    /// Per net, in net id order.
    pub nets: Vec<NetRoute>,
    pub routed: usize,
    pub unrouted: usize,
    pub completion: f64,
    pub total_length: Coord,
    pub total_vias: usize,
    /// Highest layer carrying a wire or via; 0 when nothing routed.
    pub layers_used: Layer,
    pub snapshot: CongestionSnapshot,
    pub cpu_seconds: f64,
}

impl RoutingResult {
    pub fn new(nets: Vec<NetRoute>, state: RoutingState, snapshot: CongestionSnapshot, cpu_seconds: f64) -> Self {
        let routed = nets.iter().filter(|n| n.status == NetStatus::Routed);
        let total_length = routed.clone().map(NetRoute::length).sum();
        let total_vias = routed.clone().map(NetRoute::vias).sum();
        let layers_used = routed.map(NetRoute::max_layer).max().unwrap_or(0);
        Self {
            nets,
            routed: state.routed,
            unrouted: state.unrouted,
            completion: state.completion(),
            total_length,
            total_vias,
            layers_used,
            snapshot,
            cpu_seconds,
        }
    }

    pub fn ace(&self, x: f64) -> Option<f64> {
        ace(x, &self.snapshot).ok()
    }

    pub fn wace4(&self) -> Option<f64> {
        wace4(&self.snapshot).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ace_examples() {
        let uniform = CongestionSnapshot::from_values([0.5; 10]);
        for x in WACE_PERCENTS {
            assert_eq!(ace(x, &uniform).unwrap(), 0.5);
        }
        let top = CongestionSnapshot::from_values([1.0, 0.0, 0.0, 0.0]);
        assert_eq!(ace(25.0, &top).unwrap(), 1.0);
        assert_eq!(ace(100.0, &top).unwrap(), 0.25);
    }

    #[test]
    fn wace4_examples() {
        assert!((wace4(&CongestionSnapshot::from_values([0.3; 50])).unwrap() - 0.3).abs() < 1e-12);
        assert_eq!(wace4(&CongestionSnapshot::from_values([0.7])).unwrap(), 0.7);
        assert_eq!(wace4(&CongestionSnapshot::default()), Err(MetricsError::EmptySnapshot));
    }

    #[test]
    fn bad_percent() {
        let s = CongestionSnapshot::from_values([0.1]);
        assert!(ace(0.0, &s).is_err());
        assert!(ace(101.0, &s).is_err());
    }

    #[test]
    fn worst_counts_round_up() {
        assert_eq!(worst_count(2.0, 200), 4);
        assert_eq!(worst_count(1.0, 300), 3);
        assert_eq!(worst_count(0.5, 10), 1);
        assert_eq!(worst_count(5.0, 41), 3);
    }

    #[test]
    fn rsmt_examples() {
        let sq = [Point::new(0, 0), Point::new(1, 0), Point::new(0, 1), Point::new(1, 1)];
        assert_eq!(rsmt_small(&sq), Some(3));
        let cross = [Point::new(0, 5), Point::new(10, 5), Point::new(5, 0), Point::new(5, 10)];
        assert_eq!(rsmt_small(&cross), Some(20));
        assert_eq!(rsmt_small(&[Point::new(0, 0), Point::new(3, 4)]), Some(7));
        let three = [Point::new(0, 0), Point::new(10, 2), Point::new(4, 8)];
        assert_eq!(rsmt_small(&three), Some(18));
        assert_eq!(steiner_bound(&sq), (3, true));
    }
}
