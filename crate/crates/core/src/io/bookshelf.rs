//! Best-effort import of bookshelf-style `.blocks` / `.nets` / `.pl` files.
//!
//! Placed floorplans usually contain whitespace, so the blocks are re-tiled:
//! the die is bisected recursively, splitting the blocks by center coordinate
//! and the area by their area ratio. Relative placement survives; exact
//! shapes do not. Terminals are dropped and pins sit at block centers.

use super::document::{BlockSpec, FloorplanDocument, NetSpec, PinSpec, VERSION};
use crate::floorplan::BlockKind;
use crate::geom::{Coord, Point, Rect};
use std::collections::{HashMap, HashSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BookshelfError {
    #[error("{file}:{line}: {message}")]
    Parse {
        file: &'static str,
        line: usize,
        message: String,
    },
    #[error("no blocks")]
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawBlock {
    pub name: String,
    pub hard: bool,
    pub area: f64,
    /// Outline width/height when known (hard blocks).
    pub size: Option<(f64, f64)>,
}

fn err(file: &'static str, line: usize, message: impl Into<String>) -> BookshelfError {
    BookshelfError::Parse {
        file,
        line,
        message: message.into(),
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        let skip = l.is_empty() || l.starts_with("UCSC") || l.starts_with("UCLA");
        (!skip).then_some((i + 1, l))
    })
}

fn is_header(l: &str) -> bool {
    l.starts_with("Num") && l.contains(':')
}

fn parse_points(s: &str) -> Vec<(f64, f64)> {
    let cleaned: String = s.chars().map(|c| if "(),".contains(c) { ' ' } else { c }).collect();
    let nums: Vec<f64> = cleaned.split_whitespace().filter_map(|t| t.parse().ok()).collect();
    nums.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}

/// Returns blocks in file order; terminals are skipped.
pub fn parse_blocks(text: &str) -> Result<Vec<RawBlock>, BookshelfError> {
    let mut out = Vec::new();
    for (ln, l) in content_lines(text) {
        if is_header(l) {
            continue;
        }
        let mut it = l.split_whitespace();
        let name = it.next().expect("non-empty line").to_string();
        let kind = it.next().ok_or_else(|| err("blocks", ln, "missing block type"))?;
        match kind.to_ascii_lowercase().as_str() {
            "terminal" => {}
            "softrectangular" => {
                let area: f64 = it
                    .next()
                    .and_then(|a| a.parse().ok())
                    .ok_or_else(|| err("blocks", ln, "soft block needs an area"))?;
                out.push(RawBlock {
                    name,
                    hard: false,
                    area,
                    size: None,
                });
            }
            "hardrectilinear" => {
                let rest: Vec<&str> = it.collect();
                let pts = parse_points(&rest[1.min(rest.len())..].join(" "));
                if pts.len() < 3 {
                    return Err(err("blocks", ln, "hard block needs its vertices"));
                }
                let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
                let w = xs.iter().cloned().fold(f64::MIN, f64::max) - xs.iter().cloned().fold(f64::MAX, f64::min);
                let h = ys.iter().cloned().fold(f64::MIN, f64::max) - ys.iter().cloned().fold(f64::MAX, f64::min);
                if w <= 0.0 || h <= 0.0 {
                    return Err(err("blocks", ln, "degenerate outline"));
                }
                out.push(RawBlock {
                    name,
                    hard: true,
                    area: w * h,
                    size: Some((w, h)),
                });
            }
            other => return Err(err("blocks", ln, format!("unknown block type {other:?}"))),
        }
    }
    Ok(out)
}

/// Lower-left placement per name.
pub fn parse_pl(text: &str) -> Result<HashMap<String, (f64, f64)>, BookshelfError> {
    let mut out = HashMap::new();
    for (ln, l) in content_lines(text) {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() < 3 {
            return Err(err("pl", ln, "expected NAME X Y"));
        }
        let (Ok(x), Ok(y)) = (f[1].parse(), f[2].parse()) else {
            return Err(err("pl", ln, "bad coordinate"));
        };
        out.insert(f[0].to_string(), (x, y));
    }
    Ok(out)
}

/// Nets as (name, block names); unnamed nets get `net<i>`.
pub fn parse_nets(text: &str) -> Result<Vec<(String, Vec<String>)>, BookshelfError> {
    let mut out: Vec<(String, Vec<String>)> = Vec::new();
    let mut remaining = 0usize;
    for (ln, l) in content_lines(text) {
        if l.starts_with("NetDegree") {
            if remaining > 0 {
                return Err(err("nets", ln, "previous net is short of pins"));
            }
            let after = l.split_once(':').map(|x| x.1).unwrap_or("");
            let mut f = after.split_whitespace();
            remaining = f
                .next()
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| err("nets", ln, "bad net degree"))?;
            let name = f.next().map_or_else(|| format!("net{}", out.len()), str::to_string);
            out.push((name, Vec::new()));
        } else if is_header(l) {
            continue;
        } else {
            let Some(net) = out.last_mut().filter(|_| remaining > 0) else {
                return Err(err("nets", ln, "pin outside a net"));
            };
            net.1.push(l.split_whitespace().next().expect("non-empty line").to_string());
            remaining -= 1;
        }
    }
    if remaining > 0 {
        return Err(err("nets", usize::MAX, "last net is short of pins"));
    }
    Ok(out)
}

/// Preferred shortest wall piece next to an existing corner.
const MIN_WALL: Coord = 200;

struct Tiler {
    corners: HashSet<Point>,
    out: Vec<Rect>,
}

impl Tiler {
    fn add(&mut self, r: Rect) {
        self.corners.extend(r.corners());
    }

    /// `items` are (index, center, area); `out[index]` receives the tile.
    fn tile(&mut self, r: Rect, mut items: Vec<(usize, (f64, f64), f64)>) {
        if items.len() == 1 {
            self.out[items[0].0] = r;
            return;
        }
        let vertical = r.width() >= r.height();
        let key = |c: (f64, f64)| if vertical { (c.0, c.1) } else { (c.1, c.0) };
        items.sort_by(|a, b| key(a.1).partial_cmp(&key(b.1)).unwrap().then(a.0.cmp(&b.0)));
        let right = items.split_off(items.len() / 2);
        let area_lo: f64 = items.iter().map(|i| i.2).sum();
        let area_hi: f64 = right.iter().map(|i| i.2).sum();
        let ratio = (area_lo / (area_lo + area_hi)).clamp(0.2, 0.8);
        let (lo, len) = if vertical { (r.x_lo, r.width()) } else { (r.y_lo, r.height()) };
        let ideal = lo + (len as f64 * ratio).round() as Coord;
        // Keep cut ends clear of existing corners: ideally by `MIN_WALL`,
        // at least by one unit so no 4-way crossing forms.
        let ends = |at: Coord| {
            if vertical {
                [Point::new(at, r.y_lo), Point::new(at, r.y_hi)]
            } else {
                [Point::new(r.x_lo, at), Point::new(r.x_hi, at)]
            }
        };
        let clear = |at: Coord, gap: Coord| {
            at > lo
                && at < lo + len
                && ends(at).iter().all(|e| {
                    !self.corners.iter().any(|c| {
                        let (same, d) = if vertical { (c.y == e.y, c.x - e.x) } else { (c.x == e.x, c.y - e.y) };
                        same && d.abs() < gap
                    })
                })
        };
        let search = |gap| (0..len).flat_map(|d| [ideal + d, ideal - d]).find(|&at| clear(at, gap));
        let at = search(MIN_WALL)
            .or_else(|| search(1))
            .expect("die is large enough to place every cut");
        let (a, b) = if vertical {
            (
                Rect::new(r.x_lo, r.y_lo, at, r.y_hi).expect("non-empty"),
                Rect::new(at, r.y_lo, r.x_hi, r.y_hi).expect("non-empty"),
            )
        } else {
            (
                Rect::new(r.x_lo, r.y_lo, r.x_hi, at).expect("non-empty"),
                Rect::new(r.x_lo, at, r.x_hi, r.y_hi).expect("non-empty"),
            )
        };
        self.add(a);
        self.add(b);
        self.tile(a, items);
        self.tile(b, right);
    }
}

/// Builds a mosaic document from parsed bookshelf data.
pub fn convert(
    blocks: &[RawBlock],
    nets: &[(String, Vec<String>)],
    placement: Option<&HashMap<String, (f64, f64)>>,
) -> Result<FloorplanDocument, BookshelfError> {
    if blocks.is_empty() {
        return Err(BookshelfError::Empty);
    }
    let n = blocks.len();
    let side = 1000 * (n as f64).sqrt().ceil() as Coord;
    let die = Rect::new(0, 0, side, side).expect("positive die");
    let items: Vec<(usize, (f64, f64), f64)> = blocks
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let (w, h) = b.size.unwrap_or_else(|| (b.area.sqrt(), b.area.sqrt()));
            let center = match placement.and_then(|p| p.get(&b.name)) {
                Some(&(x, y)) => (x + w / 2.0, y + h / 2.0),
                None => (i as f64, 0.0),
            };
            (i, center, b.area.max(f64::MIN_POSITIVE))
        })
        .collect();
    let mut t = Tiler {
        corners: HashSet::new(),
        out: vec![die; n],
    };
    t.add(die);
    t.tile(die, items);
    let specs: Vec<BlockSpec> = blocks
        .iter()
        .zip(t.out)
        .map(|(b, rect)| BlockSpec {
            name: b.name.clone(),
            kind: if b.hard {
                BlockKind::HardMacro
            } else {
                BlockKind::SoftBlock
            },
            rect,
            reserved_up_to: 2,
        })
        .collect();
    let known: HashSet<&str> = blocks.iter().map(|b| b.name.as_str()).collect();
    let mut net_specs = Vec::new();
    for (name, pins) in nets {
        let mut seen = HashSet::new();
        let pins: Vec<PinSpec> = pins
            .iter()
            .filter(|p| known.contains(p.as_str()) && seen.insert(p.as_str()))
            .map(|p| PinSpec {
                block: p.clone(),
                at: None,
                layer: None,
            })
            .collect();
        if pins.len() >= 2 {
            net_specs.push(NetSpec {
                name: name.clone(),
                pins,
            });
        }
    }
    Ok(FloorplanDocument {
        version: VERSION,
        die,
        blocks: specs,
        nets: net_specs,
    })
}
