//! Integer planar geometry: points, rectangles and axis directions.
//!
//! All coordinates are database units. Every predicate here is exact.

use serde::{Deserialize, Serialize};
use std::fmt;

pub type Coord = i64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: Coord,
    pub y: Coord,
}

impl Point {
    pub const fn new(x: Coord, y: Coord) -> Self {
        Self { x, y }
    }

    pub fn manhattan(self, other: Point) -> Coord {
        (self.x - other.x).abs() + (self.y - other.y).abs()
    }

    pub fn step(self, dir: Dir) -> Point {
        let (dx, dy) = dir.delta();
        Point::new(self.x + dx, self.y + dy)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Axis orientation of a wire or wall.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

impl Orientation {
    pub fn flip(self) -> Self {
        match self {
            Orientation::Horizontal => Orientation::Vertical,
            Orientation::Vertical => Orientation::Horizontal,
        }
    }
}

/// One of the four compass directions. `North` is +y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dir {
    East,
    North,
    West,
    South,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::East, Dir::North, Dir::West, Dir::South];

    pub fn delta(self) -> (Coord, Coord) {
        match self {
            Dir::East => (1, 0),
            Dir::North => (0, 1),
            Dir::West => (-1, 0),
            Dir::South => (0, -1),
        }
    }

    pub fn orientation(self) -> Orientation {
        match self {
            Dir::East | Dir::West => Orientation::Horizontal,
            Dir::North | Dir::South => Orientation::Vertical,
        }
    }

    pub fn opposite(self) -> Dir {
        match self {
            Dir::East => Dir::West,
            Dir::North => Dir::South,
            Dir::West => Dir::East,
            Dir::South => Dir::North,
        }
    }

    pub fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x_lo: Coord,
    pub y_lo: Coord,
    pub x_hi: Coord,
    pub y_hi: Coord,
}

impl Rect {
    /// Builds a rectangle, returning `None` unless `x_lo < x_hi` and `y_lo < y_hi`.
    pub fn new(x_lo: Coord, y_lo: Coord, x_hi: Coord, y_hi: Coord) -> Option<Self> {
        (x_lo < x_hi && y_lo < y_hi).then_some(Self {
            x_lo,
            y_lo,
            x_hi,
            y_hi,
        })
    }

    pub fn width(&self) -> Coord {
        self.x_hi - self.x_lo
    }

    pub fn height(&self) -> Coord {
        self.y_hi - self.y_lo
    }

    pub fn area(&self) -> i128 {
        self.width() as i128 * self.height() as i128
    }

    /// Center rounded toward negative infinity.
    pub fn center(&self) -> Point {
        Point::new(
            (self.x_lo + self.x_hi).div_euclid(2),
            (self.y_lo + self.y_hi).div_euclid(2),
        )
    }

    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.x_lo, self.y_lo),
            Point::new(self.x_hi, self.y_lo),
            Point::new(self.x_lo, self.y_hi),
            Point::new(self.x_hi, self.y_hi),
        ]
    }

    /// Closed containment (boundary counts as inside).
    pub fn contains(&self, p: Point) -> bool {
        self.x_lo <= p.x && p.x <= self.x_hi && self.y_lo <= p.y && p.y <= self.y_hi
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        self.x_lo <= other.x_lo
            && other.x_hi <= self.x_hi
            && self.y_lo <= other.y_lo
            && other.y_hi <= self.y_hi
    }

    pub fn on_boundary(&self, p: Point) -> bool {
        self.contains(p)
            && (p.x == self.x_lo || p.x == self.x_hi || p.y == self.y_lo || p.y == self.y_hi)
    }

    /// True when the open interiors intersect.
    pub fn interiors_overlap(&self, other: &Rect) -> bool {
        self.x_lo < other.x_hi
            && other.x_lo < self.x_hi
            && self.y_lo < other.y_hi
            && other.y_lo < self.y_hi
    }

    /// The four sides as `(from, to, outward direction)`, endpoints ordered low to high.
    pub fn sides(&self) -> [(Point, Point, Dir); 4] {
        let [ll, lr, ul, ur] = self.corners();
        [
            (ll, lr, Dir::South),
            (ul, ur, Dir::North),
            (ll, ul, Dir::West),
            (lr, ur, Dir::East),
        ]
    }

    /// Directions of the two block edges that leave corner `p`, or `None` if `p`
    /// is not a corner.
    pub fn corner_arms(&self, p: Point) -> Option<[Dir; 2]> {
        let h = if p.x == self.x_lo {
            Dir::East
        } else if p.x == self.x_hi {
            Dir::West
        } else {
            return None;
        };
        let v = if p.y == self.y_lo {
            Dir::North
        } else if p.y == self.y_hi {
            Dir::South
        } else {
            return None;
        };
        Some([h, v])
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]x[{}, {}]",
            self.x_lo, self.x_hi, self.y_lo, self.y_hi
        )
    }
}

/// Axis-parallel segment with endpoints ordered so that `a <= b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    /// Returns `None` for diagonal input. Zero-length segments are allowed.
    pub fn new(p: Point, q: Point) -> Option<Self> {
        if p.x != q.x && p.y != q.y {
            return None;
        }
        let (a, b) = if p <= q { (p, q) } else { (q, p) };
        Some(Self { a, b })
    }

    pub fn length(&self) -> Coord {
        self.a.manhattan(self.b)
    }

    /// Orientation of a non-degenerate segment; degenerate ones report `Horizontal`.
    pub fn orientation(&self) -> Orientation {
        if self.a.x == self.b.x && self.a.y != self.b.y {
            Orientation::Vertical
        } else {
            Orientation::Horizontal
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.a.x.min(self.b.x) <= p.x
            && p.x <= self.a.x.max(self.b.x)
            && self.a.y.min(self.b.y) <= p.y
            && p.y <= self.a.y.max(self.b.y)
    }

    /// Closed intersection test against a rectangle.
    pub fn touches_rect(&self, r: &Rect) -> bool {
        self.a.x <= r.x_hi && r.x_lo <= self.b.x && self.a.y <= r.y_hi && r.y_lo <= self.b.y
    }
}

/// Bounding box of a non-empty point set as `(lo, hi)` corners; may be degenerate.
pub fn bounding_box(points: impl IntoIterator<Item = Point>) -> Option<(Point, Point)> {
    let mut it = points.into_iter();
    let first = it.next()?;
    Some(it.fold((first, first), |(lo, hi), p| {
        (
            Point::new(lo.x.min(p.x), lo.y.min(p.y)),
            Point::new(hi.x.max(p.x), hi.y.max(p.y)),
        )
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rect_rejects_degenerate() {
        assert!(Rect::new(0, 0, 0, 5).is_none());
        assert!(Rect::new(3, 0, 1, 5).is_none());
        assert!(Rect::new(0, 0, 1, 1).is_some());
    }

    #[test]
    fn corner_arms_point_inward() {
        let r = Rect::new(0, 0, 10, 10).unwrap();
        assert_eq!(r.corner_arms(Point::new(0, 0)), Some([Dir::East, Dir::North]));
        assert_eq!(r.corner_arms(Point::new(10, 10)), Some([Dir::West, Dir::South]));
        assert_eq!(r.corner_arms(Point::new(5, 0)), None);
    }

    #[test]
    fn segment_orders_endpoints() {
        let s = Segment::new(Point::new(5, 2), Point::new(1, 2)).unwrap();
        assert_eq!(s.a, Point::new(1, 2));
        assert_eq!(s.length(), 4);
        assert!(Segment::new(Point::new(0, 0), Point::new(1, 1)).is_none());
    }

    #[test]
    fn bbox_of_points() {
        let bb = bounding_box([Point::new(1, 1), Point::new(5, 2), Point::new(3, 9)]).unwrap();
        assert_eq!(bb, (Point::new(1, 1), Point::new(5, 9)));
    }
}
