//! Line-oriented floorplan documents.
//!
//! ```text
//! hgr-floorplan 1
//! die 0 0 2000 1000
//! block a soft 0 0 1000 1000 2
//! block b hard 1000 0 2000 1000 2
//! net n0 a b@1500,400:2
//! ```
//!
//! A pin is `BLOCK[@X,Y][:LAYER]`; it defaults to the block center on layer 1.
//! `#` starts a comment.

use crate::floorplan::{validate_mosaic, Block, BlockId, BlockKind, Floorplan, Net, NetId, Pin};
use crate::geom::{Coord, Point, Rect};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use thiserror::Error;

pub const HEADER: &str = "hgr-floorplan";
pub const VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DocumentError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid floorplan: {}", .0.join("; "))]
    Validation(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSpec {
    pub name: String,
    pub kind: BlockKind,
    pub rect: Rect,
    pub reserved_up_to: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PinSpec {
    pub block: String,
    pub at: Option<Point>,
    pub layer: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetSpec {
    pub name: String,
    pub pins: Vec<PinSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FloorplanDocument {
    pub version: u32,
    pub die: Rect,
    pub blocks: Vec<BlockSpec>,
    pub nets: Vec<NetSpec>,
}

struct Cursor<'a> {
    line: usize,
    tokens: Vec<(usize, &'a str)>,
    next: usize,
}

impl<'a> Cursor<'a> {
    fn new(line: usize, text: &'a str) -> Self {
        let mut tokens = Vec::new();
        let mut start = None;
        for (i, ch) in text.char_indices() {
            match (ch.is_whitespace(), start) {
                (true, Some(s)) => {
                    tokens.push((s, &text[s..i]));
                    start = None;
                }
                (false, None) => start = Some(i),
                _ => {}
            }
        }
        if let Some(s) = start {
            tokens.push((s, &text[s..]));
        }
        Self {
            line,
            tokens,
            next: 0,
        }
    }

    fn err_at(&self, col: usize, message: impl Into<String>) -> DocumentError {
        DocumentError::Parse {
            line: self.line,
            column: col + 1,
            message: message.into(),
        }
    }

    fn end_col(&self) -> usize {
        self.tokens.last().map_or(0, |(c, t)| c + t.len())
    }

    fn word(&mut self, what: &str) -> Result<(usize, &'a str), DocumentError> {
        let t = self
            .tokens
            .get(self.next)
            .copied()
            .ok_or_else(|| self.err_at(self.end_col(), format!("expected {what}")))?;
        self.next += 1;
        Ok(t)
    }

    fn number<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, DocumentError> {
        let (col, t) = self.word(what)?;
        t.parse()
            .map_err(|_| self.err_at(col, format!("expected {what}, found `{t}`")))
    }

    fn rest(&mut self) -> Vec<(usize, &'a str)> {
        let r = self.tokens[self.next..].to_vec();
        self.next = self.tokens.len();
        r
    }

    fn finish(&self) -> Result<(), DocumentError> {
        match self.tokens.get(self.next) {
            Some(&(col, t)) => Err(self.err_at(col, format!("unexpected `{t}`"))),
            None => Ok(()),
        }
    }
}

fn parse_rect(c: &mut Cursor) -> Result<Rect, DocumentError> {
    let col = c.tokens.get(c.next).map_or(c.end_col(), |t| t.0);
    let x0: Coord = c.number("x0")?;
    let y0: Coord = c.number("y0")?;
    let x1: Coord = c.number("x1")?;
    let y1: Coord = c.number("y1")?;
    Rect::new(x0, y0, x1, y1).ok_or_else(|| c.err_at(col, "rectangle must have x0 < x1 and y0 < y1"))
}

fn parse_pin(c: &Cursor, col: usize, tok: &str) -> Result<PinSpec, DocumentError> {
    let bad = |m: &str| c.err_at(col, format!("{m} in pin `{tok}`"));
    let (body, layer) = match tok.rsplit_once(':') {
        Some((b, l)) => (b, Some(l.parse::<u8>().map_err(|_| bad("bad layer"))?)),
        None => (tok, None),
    };
    let (block, at) = match body.split_once('@') {
        Some((b, xy)) => {
            let (x, y) = xy.split_once(',').ok_or_else(|| bad("expected X,Y"))?;
            let x = x.parse().map_err(|_| bad("bad x"))?;
            let y = y.parse().map_err(|_| bad("bad y"))?;
            (b, Some(Point::new(x, y)))
        }
        None => (body, None),
    };
    if block.is_empty() {
        return Err(bad("missing block name"));
    }
    Ok(PinSpec {
        block: block.to_string(),
        at,
        layer,
    })
}

/// Parses the document syntax; semantic checks happen in [`FloorplanDocument::to_floorplan`].
pub fn parse_document(text: &str) -> Result<FloorplanDocument, DocumentError> {
    let mut version = None;
    let mut die = None;
    let mut blocks = Vec::new();
    let mut nets = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let mut c = Cursor::new(i + 1, content);
        if c.tokens.is_empty() {
            continue;
        }
        let (col, kw) = c.word("keyword")?;
        if version.is_none() {
            if kw != HEADER {
                return Err(c.err_at(col, format!("expected `{HEADER} {VERSION}` header")));
            }
            let (vcol, v) = c.word("version")?;
            if v != VERSION.to_string() {
                return Err(c.err_at(vcol, format!("unsupported version `{v}`")));
            }
            c.finish()?;
            version = Some(VERSION);
            continue;
        }
        match kw {
            "die" => {
                if die.is_some() {
                    return Err(c.err_at(col, "duplicate die line"));
                }
                die = Some(parse_rect(&mut c)?);
            }
            "block" => {
                let (_, name) = c.word("block name")?;
                let (kcol, kind) = c.word("block kind")?;
                let kind = match kind {
                    "hard" => BlockKind::HardMacro,
                    "soft" => BlockKind::SoftBlock,
                    other => return Err(c.err_at(kcol, format!("unknown block kind `{other}`"))),
                };
                let rect = parse_rect(&mut c)?;
                let reserved_up_to = c.number("reserved layer")?;
                blocks.push(BlockSpec {
                    name: name.to_string(),
                    kind,
                    rect,
                    reserved_up_to,
                });
            }
            "net" => {
                let (_, name) = c.word("net name")?;
                let pins = c
                    .rest()
                    .into_iter()
                    .map(|(pcol, t)| parse_pin(&c, pcol, t))
                    .collect::<Result<Vec<_>, _>>()?;
                nets.push(NetSpec {
                    name: name.to_string(),
                    pins,
                });
            }
            other => return Err(c.err_at(col, format!("unknown keyword `{other}`"))),
        }
        c.finish()?;
    }
    let eof = |m: &str| DocumentError::Parse {
        line: text.lines().count().max(1),
        column: 1,
        message: m.to_string(),
    };
    let version = version.ok_or_else(|| eof("missing header"))?;
    let die = die.ok_or_else(|| eof("missing die line"))?;
    Ok(FloorplanDocument {
        version,
        die,
        blocks,
        nets,
    })
}

impl FloorplanDocument {
    /// Resolves names and pin defaults and validates; lists every violation found.
    pub fn to_floorplan(&self) -> Result<Floorplan, DocumentError> {
        let mut problems = Vec::new();
        let mut index = BTreeMap::new();
        for (i, b) in self.blocks.iter().enumerate() {
            if index.insert(b.name.as_str(), i).is_some() {
                problems.push(format!("duplicate block name {}", b.name));
            }
            if b.reserved_up_to < 2 {
                problems.push(format!("block {} reserves up to layer {} (minimum 2)", b.name, b.reserved_up_to));
            }
        }
        let blocks: Vec<Block> = self
            .blocks
            .iter()
            .enumerate()
            .map(|(i, b)| Block {
                id: BlockId(i as u32),
                name: b.name.clone(),
                outline: b.rect,
                kind: b.kind,
                reserved_up_to: b.reserved_up_to,
            })
            .collect();
        let mut names = BTreeSet::new();
        let mut nets = Vec::new();
        for (ni, n) in self.nets.iter().enumerate() {
            if !names.insert(n.name.as_str()) {
                problems.push(format!("duplicate net name {}", n.name));
            }
            let mut pins = Vec::new();
            for p in &n.pins {
                let Some(&bi) = index.get(p.block.as_str()) else {
                    problems.push(format!("net {} references unknown block {}", n.name, p.block));
                    continue;
                };
                let layer = p.layer.unwrap_or(1);
                if !(1..=2).contains(&layer) {
                    problems.push(format!("net {} has a pin on layer {layer} (pins use layer 1 or 2)", n.name));
                }
                pins.push(Pin {
                    net: NetId(ni as u32),
                    block: BlockId(bi as u32),
                    location: p.at.unwrap_or_else(|| blocks[bi].outline.center()),
                    layer,
                });
            }
            let distinct: BTreeSet<_> = pins.iter().map(|p| (p.block, p.location)).collect();
            if distinct.len() < 2 {
                problems.push(format!("net {} has fewer than two distinct pins", n.name));
            }
            nets.push(Net {
                id: NetId(ni as u32),
                name: n.name.clone(),
                pins,
            });
        }
        if !problems.is_empty() {
            return Err(DocumentError::Validation(problems));
        }
        let fp = Floorplan::new(self.die, blocks, nets).map_err(|e| DocumentError::Validation(vec![e.to_string()]))?;
        let report = validate_mosaic(&fp);
        if !report.passes() {
            let mut v: Vec<String> = Vec::new();
            for id in &report.outside_die {
                v.push(format!("block {} lies outside the die", fp.block(*id).name));
            }
            if report.coverage_gap != 0 {
                v.push(format!("blocks leave {} units of die area uncovered", report.coverage_gap));
            }
            for (a, b) in &report.overlaps {
                v.push(format!("blocks {} and {} overlap", fp.block(*a).name, fp.block(*b).name));
            }
            for p in &report.crossings {
                v.push(format!("four-way wall crossing at {p}"));
            }
            for (n, i) in &report.pins_outside {
                v.push(format!("pin {i} of net {} lies outside its block", fp.nets[n.index()].name));
            }
            return Err(DocumentError::Validation(v));
        }
        Ok(fp)
    }

    /// Document describing `fp`; pins at their block center on layer 1 are written bare.
    pub fn from_floorplan(fp: &Floorplan) -> Self {
        Self {
            version: VERSION,
            die: fp.die,
            blocks: fp
                .blocks
                .iter()
                .map(|b| BlockSpec {
                    name: b.name.clone(),
                    kind: b.kind,
                    rect: b.outline,
                    reserved_up_to: b.reserved_up_to,
                })
                .collect(),
            nets: fp
                .nets
                .iter()
                .map(|n| NetSpec {
                    name: n.name.clone(),
                    pins: n
                        .pins
                        .iter()
                        .map(|p| {
                            let block = fp.block(p.block);
                            PinSpec {
                                block: block.name.clone(),
                                at: (p.location != block.outline.center()).then_some(p.location),
                                layer: (p.layer != 1).then_some(p.layer),
                            }
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let r = |r: &Rect| format!("{} {} {} {}", r.x_lo, r.y_lo, r.x_hi, r.y_hi);
        let _ = writeln!(s, "{HEADER} {}", self.version);
        let _ = writeln!(s, "die {}", r(&self.die));
        for b in &self.blocks {
            let _ = writeln!(s, "block {} {} {} {}", b.name, b.kind, r(&b.rect), b.reserved_up_to);
        }
        for n in &self.nets {
            s.push_str("net ");
            s.push_str(&n.name);
            for p in &n.pins {
                s.push(' ');
                s.push_str(&p.block);
                if let Some(at) = p.at {
                    let _ = write!(s, "@{},{}", at.x, at.y);
                }
                if let Some(l) = p.layer {
                    let _ = write!(s, ":{l}");
                }
            }
            s.push('\n');
        }
        s
    }
}

pub fn parse_floorplan(text: &str) -> Result<Floorplan, DocumentError> {
    parse_document(text)?.to_floorplan()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = "hgr-floorplan 1\n# two blocks\ndie 0 0 100 60\nblock a soft 0 0 40 60 2\nblock b hard 40 0 100 60 2\nnet n0 a b@70,30:2\n";

    #[test]
    fn parses_two_blocks() {
        let fp = parse_floorplan(TWO).unwrap();
        assert_eq!(fp.block_count(), 2);
        assert_eq!(fp.nets[0].pins[0].location, Point::new(20, 30));
        assert_eq!(fp.nets[0].pins[1].layer, 2);
        assert_eq!(crate::floorplan::extract_junctions(&fp).unwrap().len(), 2);
    }

    #[test]
    fn round_trips() {
        let doc = parse_document(TWO).unwrap();
        let again = parse_document(&doc.serialize()).unwrap();
        assert_eq!(doc, again);
        let fp = doc.to_floorplan().unwrap();
        let back = FloorplanDocument::from_floorplan(&fp);
        assert_eq!(back.to_floorplan().unwrap(), fp);
        assert!(back.serialize().ends_with("net n0 a b:2\n"));
    }

    #[test]
    fn unknown_block_names_the_net() {
        let text = TWO.replace("net n0 a b@70,30:2", "net n0 a zz");
        match parse_floorplan(&text) {
            Err(DocumentError::Validation(v)) => {
                assert!(v.iter().any(|m| m.contains("n0") && m.contains("zz")), "{v:?}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_position() {
        let text = TWO.replace("block b hard", "block b squishy");
        assert_eq!(
            parse_document(&text),
            Err(DocumentError::Parse {
                line: 5,
                column: 9,
                message: "unknown block kind `squishy`".into()
            })
        );
        assert!(matches!(
            parse_document("die 0 0 1 1\n"),
            Err(DocumentError::Parse { line: 1, column: 1, .. })
        ));
        assert!(matches!(
            parse_document("hgr-floorplan 1\ndie 0 0 5\n"),
            Err(DocumentError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn lists_all_violations() {
        let text = "hgr-floorplan 1\ndie 0 0 100 60\nblock a soft 0 0 40 60 2\nblock b soft 50 0 100 60 2\n";
        match parse_floorplan(text) {
            Err(DocumentError::Validation(v)) => assert!(v[0].contains("uncovered")),
            other => panic!("{other:?}"),
        }
        let text = "hgr-floorplan 1\ndie 0 0 100 60\nblock a soft 0 0 40 60 1\nblock a soft 40 0 100 60 2\nnet x a\n";
        match parse_floorplan(text) {
            Err(DocumentError::Validation(v)) => assert_eq!(v.len(), 3, "{v:?}"),
            other => panic!("{other:?}"),
        }
    }
}
