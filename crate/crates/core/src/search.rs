//! Layer-aware shortest paths.
//!
//! A search graph is a set of directed arcs, each tagged with the layer it is
//! entered on and the layer it leaves on. Path cost is the sum of arc weights
//! plus `via_penalty` per via cut. A switch from layer `a` to layer `b` takes
//! `|a - b|` cuts, both inside an arc (`vias`) and between the layer a vertex
//! was reached on and the entry layer of the next arc.

use crate::layers::Layer;
use std::cmp::Ordering;
use std::collections::hash_map::Entry as Slot;
use std::collections::{BinaryHeap, HashMap};

/// Layer the route currently occupies at a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LayerState {
    At(Layer),
    /// No layer yet; the first arc enters for free.
    Any,
}

impl LayerState {
    fn slot(self) -> usize {
        match self {
            LayerState::Any => 0,
            LayerState::At(l) => l as usize,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arc<T> {
    pub to: u32,
    pub weight: f64,
    /// Layer of the first wire piece; `None` for an arc without wires.
    pub enter: Option<Layer>,
    /// Layer of the last wire piece; `None` keeps the current layer.
    pub leave: Option<Layer>,
    /// Via cuts inside the arc.
    pub vias: u32,
    pub tag: T,
}

impl<T> Arc<T> {
    /// Cost of taking this arc from `state` and the state it leaves behind.
    pub fn step(&self, state: LayerState, via_penalty: f64) -> (f64, LayerState) {
        let switch = match (state, self.enter) {
            (LayerState::At(cur), Some(e)) => cur.abs_diff(e) as u32,
            _ => 0,
        };
        (
            self.weight + via_penalty * (self.vias + switch) as f64,
            self.leave.map_or(state, LayerState::At),
        )
    }
}

pub trait SearchGraph {
    type Tag: Clone;
    fn vertex_count(&self) -> usize;
    /// Highest layer index any arc may carry.
    fn max_layer(&self) -> Layer;
    /// Appends the arcs leaving `v` to `out`.
    fn arcs(&self, v: u32, out: &mut Vec<Arc<Self::Tag>>);
}

#[derive(Debug, Clone, PartialEq)]
pub struct Path<T> {
    pub cost: f64,
    /// Visited vertices, source first.
    pub vertices: Vec<u32>,
    pub arcs: Vec<Arc<T>>,
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    cost: f64,
    vertex: u32,
    slot: u32,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on cost, then lowest vertex, then lowest layer slot.
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.vertex.cmp(&self.vertex))
            .then_with(|| other.slot.cmp(&self.slot))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Minimum-cost path from `src` (starting on `start`) to any layer state of `dst`.
///
/// All arc weights must be finite and non-negative.
pub fn shortest_path<G: SearchGraph>(
    g: &G,
    src: u32,
    start: LayerState,
    dst: u32,
    via_penalty: f64,
) -> Option<Path<G::Tag>> {
    if src == dst {
        return Some(Path {
            cost: 0.0,
            vertices: vec![src],
            arcs: Vec::new(),
        });
    }
    let slots = g.max_layer() as usize + 1;
    let n = g.vertex_count() * slots;
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    // Predecessor state and the arc taken from it (index into `arena`).
    let mut pred: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut arena: Vec<Arc<G::Tag>> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut scratch = Vec::new();

    let s0 = src as usize * slots + start.slot();
    dist[s0] = 0.0;
    heap.push(Entry {
        cost: 0.0,
        vertex: src,
        slot: start.slot() as u32,
    });

    let mut goal = None;
    while let Some(Entry { cost, vertex, slot }) = heap.pop() {
        let idx = vertex as usize * slots + slot as usize;
        if done[idx] {
            continue;
        }
        done[idx] = true;
        if vertex == dst {
            goal = Some(idx);
            break;
        }
        let state = if slot == 0 {
            LayerState::Any
        } else {
            LayerState::At(slot as Layer)
        };
        scratch.clear();
        g.arcs(vertex, &mut scratch);
        for arc in scratch.drain(..) {
            debug_assert!(arc.weight.is_finite() && arc.weight >= 0.0);
            let (step, next) = arc.step(state, via_penalty);
            let nidx = arc.to as usize * slots + next.slot();
            let cand = cost + step;
            if !done[nidx] && cand < dist[nidx] {
                dist[nidx] = cand;
                let to = arc.to;
                arena.push(arc);
                pred[nidx] = Some((idx, arena.len() - 1));
                heap.push(Entry {
                    cost: cand,
                    vertex: to,
                    slot: next.slot() as u32,
                });
            }
        }
    }

    let goal = goal?;
    let mut arcs = Vec::new();
    let mut vertices = vec![dst];
    let mut cur = goal;
    while let Some((prev, a)) = pred[cur] {
        arcs.push(arena[a].clone());
        vertices.push((prev / slots) as u32);
        cur = prev;
    }
    arcs.reverse();
    vertices.reverse();
    Some(Path {
        cost: dist[goal],
        vertices,
        arcs,
    })
}

/// A small materialized search graph, e.g. a vertex-induced piece of a larger one.
#[derive(Debug, Clone)]
pub struct Fragment<T> {
    /// Original vertex id of each fragment vertex.
    pub origin: Vec<u32>,
    pub max_layer: Layer,
    pub arcs: Vec<Vec<Arc<T>>>,
}

impl<T: Clone> Fragment<T> {
    /// Breadth-first collection of at most `limit` vertices reachable from
    /// `root`, keeping only arcs between collected vertices.
    pub fn around<G: SearchGraph<Tag = T>>(g: &G, root: u32, limit: usize) -> Self {
        let mut origin = vec![root];
        let mut local = HashMap::new();
        local.insert(root, 0u32);
        let mut scratch = Vec::new();
        let mut head = 0;
        while head < origin.len() && origin.len() < limit {
            scratch.clear();
            g.arcs(origin[head], &mut scratch);
            for a in &scratch {
                if origin.len() >= limit {
                    break;
                }
                if let Slot::Vacant(slot) = local.entry(a.to) {
                    slot.insert(origin.len() as u32);
                    origin.push(a.to);
                }
            }
            head += 1;
        }
        let arcs = origin
            .iter()
            .map(|&v| {
                scratch.clear();
                g.arcs(v, &mut scratch);
                scratch
                    .iter()
                    .filter_map(|a| {
                        local.get(&a.to).map(|&to| Arc {
                            to,
                            ..a.clone()
                        })
                    })
                    .collect()
            })
            .collect();
        Self {
            origin,
            max_layer: g.max_layer(),
            arcs,
        }
    }
}

impl<T: Clone> SearchGraph for Fragment<T> {
    type Tag = T;

    fn vertex_count(&self) -> usize {
        self.arcs.len()
    }

    fn max_layer(&self) -> Layer {
        self.max_layer
    }

    fn arcs(&self, v: u32, out: &mut Vec<Arc<T>>) {
        out.extend(self.arcs[v as usize].iter().cloned());
    }
}
