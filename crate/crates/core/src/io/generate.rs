//! Seeded random mosaic floorplans with local multi-pin nets.

use super::document::{BlockSpec, FloorplanDocument, NetSpec, PinSpec, VERSION};
use crate::floorplan::BlockKind;
use crate::geom::{Coord, Point, Rect};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use std::collections::HashMap;

/// Mean of the Poisson part of the net degree (degree = 2 + Poisson).
const EXTRA_PINS_MEAN: f64 = 2.4;
const BLOCK_SIDE: Coord = 1000;
/// Shortest wall piece a cut may create next to an existing corner.
const MIN_WALL: Coord = BLOCK_SIDE / 5;

fn corner_add(corners: &mut HashMap<Point, u8>, r: &Rect, delta: i8) {
    for c in r.corners() {
        let e = corners.entry(c).or_default();
        *e = (*e as i8 + delta) as u8;
    }
}

/// Splits `r` at `at` along `vertical`; `None` if either part is empty.
fn split(r: &Rect, vertical: bool, at: Coord) -> Option<(Rect, Rect)> {
    if vertical {
        Some((Rect::new(r.x_lo, r.y_lo, at, r.y_hi)?, Rect::new(at, r.y_lo, r.x_hi, r.y_hi)?))
    } else {
        Some((Rect::new(r.x_lo, r.y_lo, r.x_hi, at)?, Rect::new(r.x_lo, at, r.x_hi, r.y_hi)?))
    }
}

/// Guillotine slicing of a square die into `n` blocks. Cut positions whose
/// endpoints land on or within [`MIN_WALL`] of an existing corner are
/// redrawn, so no four blocks meet at a point and no wall piece is tiny.
pub fn slice_die(n: usize, rng: &mut ChaCha8Rng) -> (Rect, Vec<Rect>) {
    let side = BLOCK_SIDE * (n.max(1) as f64).sqrt().ceil() as Coord;
    let die = Rect::new(0, 0, side, side).expect("positive die");
    let mut rects = vec![die];
    let mut corners = HashMap::new();
    corner_add(&mut corners, &die, 1);
    let mut stuck = false;
    while rects.len() < n {
        // Largest block first (ties to the earliest); any block after a failed cut.
        let idx = if stuck {
            rng.random_range(0..rects.len())
        } else {
            rects
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.area().cmp(&b.1.area()).then(b.0.cmp(&a.0)))
                .expect("non-empty")
                .0
        };
        let r = rects[idx];
        let vertical = match r.width().cmp(&r.height()) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => rng.random_bool(0.5),
        };
        let (lo, len) = if vertical { (r.x_lo, r.width()) } else { (r.y_lo, r.height()) };
        let mut cut = None;
        for _ in 0..64 {
            let at = lo + (len as f64 * rng.random_range(0.3..0.7)).round() as Coord;
            let ends = if vertical {
                [Point::new(at, r.y_lo), Point::new(at, r.y_hi)]
            } else {
                [Point::new(r.x_lo, at), Point::new(r.x_hi, at)]
            };
            let near = |e: &Point| {
                corners.iter().any(|(c, &k)| {
                    k > 0
                        && if vertical {
                            c.y == e.y && (c.x - e.x).abs() < MIN_WALL
                        } else {
                            c.x == e.x && (c.y - e.y).abs() < MIN_WALL
                        }
                })
            };
            if ends.iter().any(near) {
                continue;
            }
            if let Some(parts) = split(&r, vertical, at) {
                cut = Some(parts);
                break;
            }
        }
        let Some((a, b)) = cut else {
            stuck = true;
            continue;
        };
        stuck = false;
        corner_add(&mut corners, &r, -1);
        corner_add(&mut corners, &a, 1);
        corner_add(&mut corners, &b, 1);
        rects[idx] = a;
        rects.push(b);
    }
    // Row-major order from the bottom-left keeps names stable and readable.
    rects.sort_by_key(|r| (r.y_lo, r.x_lo));
    (die, rects)
}

/// An `n`-block mosaic with `k` nets. Net degree is 2 plus a Poisson draw;
/// pins go to distinct blocks drawn uniformly over the die, at block centers.
pub fn generate_mosaic(n: usize, k: usize, seed: u64) -> FloorplanDocument {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (die, rects) = slice_die(n, &mut rng);
    let blocks: Vec<BlockSpec> = rects
        .iter()
        .enumerate()
        .map(|(i, r)| BlockSpec {
            name: format!("b{i}"),
            kind: if rng.random_bool(0.3) {
                BlockKind::HardMacro
            } else {
                BlockKind::SoftBlock
            },
            rect: *r,
            reserved_up_to: 2,
        })
        .collect();
    let mut nets = Vec::with_capacity(k);
    if blocks.len() >= 2 {
        let extra = Poisson::new(EXTRA_PINS_MEAN).expect("positive mean");
        for i in 0..k {
            let degree = (2 + extra.sample(&mut rng) as usize).min(blocks.len());
            let mut chosen = sample(&mut rng, blocks.len(), degree).into_vec();
            chosen.sort_unstable();
            nets.push(NetSpec {
                name: format!("n{i}"),
                pins: chosen
                    .into_iter()
                    .map(|b| PinSpec {
                        block: blocks[b].name.clone(),
                        at: None,
                        layer: None,
                    })
                    .collect(),
            });
        }
    }
    FloorplanDocument {
        version: VERSION,
        die,
        blocks,
        nets,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::{extract_junctions, validate_mosaic};

    #[test]
    fn single_block_fills_die() {
        let doc = generate_mosaic(1, 5, 0);
        assert_eq!(doc.blocks.len(), 1);
        assert_eq!(doc.blocks[0].rect, doc.die);
        assert!(doc.nets.is_empty());
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(generate_mosaic(10, 20, 7), generate_mosaic(10, 20, 7));
        assert_ne!(generate_mosaic(10, 20, 7), generate_mosaic(10, 20, 8));
    }

    #[test]
    fn hundred_blocks_form_a_mosaic() {
        let fp = generate_mosaic(100, 50, 3).to_floorplan().unwrap();
        assert!(validate_mosaic(&fp).passes());
        assert_eq!(extract_junctions(&fp).unwrap().len(), 198);
    }

    #[test]
    fn mean_degree_is_near_four() {
        let doc = generate_mosaic(60, 2000, 11);
        let mean = doc.nets.iter().map(|n| n.pins.len()).sum::<usize>() as f64 / doc.nets.len() as f64;
        assert!((4.0..5.0).contains(&mean), "{mean}");
    }
}
