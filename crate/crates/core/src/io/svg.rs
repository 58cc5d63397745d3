//! Static SVG overlays: one congestion heatmap per layer and a route drawing.

use crate::congestion::EdgeRef;
use crate::floorplan::Floorplan;
use crate::geom::{Point, Segment};
use crate::hybrid::RoutingGraphs;
use crate::layers::Layer;
use crate::metrics::RoutingResult;
use std::fmt::Write as _;
use std::path::Path;

const WIDTH: f64 = 800.0;
const PAD: f64 = 10.0;
const LAYER_COLORS: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

struct Canvas {
    x0: f64,
    y1: f64,
    scale: f64,
    height: f64,
    body: String,
}

impl Canvas {
    fn new(fp: &Floorplan) -> Self {
        let die = fp.die;
        let scale = (WIDTH - 2.0 * PAD) / die.width().max(1) as f64;
        let mut c = Self {
            x0: die.x_lo as f64,
            y1: die.y_hi as f64,
            scale,
            height: die.height() as f64 * scale + 2.0 * PAD,
            body: String::new(),
        };
        for b in &fp.blocks {
            let (x, y) = c.map(Point::new(b.outline.x_lo, b.outline.y_hi));
            let _ = writeln!(
                c.body,
                r##"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="#f4f4f4" stroke="#999" stroke-width="0.5"><title>{}</title></rect>"##,
                b.outline.width() as f64 * scale,
                b.outline.height() as f64 * scale,
                b.name
            );
        }
        c
    }

    /// Flips y so the die's bottom edge is at the bottom of the image.
    fn map(&self, p: Point) -> (f64, f64) {
        (
            PAD + (p.x as f64 - self.x0) * self.scale,
            PAD + (self.y1 - p.y as f64) * self.scale,
        )
    }

    fn line(&mut self, s: Segment, color: &str, width: f64, title: &str) {
        let (x1, y1) = self.map(s.a);
        let (x2, y2) = self.map(s.b);
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{color}" stroke-width="{width}" stroke-linecap="round"><title>{title}</title></line>"#
        );
    }

    fn finish(self, caption: &str) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{:.2}\" viewBox=\"0 0 {WIDTH} {:.2}\">\n<desc>{caption}</desc>\n{}</svg>\n",
            self.height, self.height, self.body
        )
    }
}

/// Green at p = 0 through yellow to red at p = 1.
fn heat(p: f64) -> String {
    let hue = 120.0 * (1.0 - p.clamp(0.0, 1.0));
    format!("hsl({hue:.0},85%,45%)")
}

fn edge_geometry(base: &RoutingGraphs, e: EdgeRef) -> Option<Segment> {
    match e {
        EdgeRef::Staircase(i) => {
            let s = base.junctions.segments.get(i as usize)?;
            Segment::new(s.a, s.b)
        }
        EdgeRef::Grid(i) => Some(base.grid.as_ref()?.edges.get(i as usize)?.boundary),
    }
}

/// Edges with capacity on `layer`, stroked by congestion.
pub fn congestion_svg(fp: &Floorplan, base: &RoutingGraphs, layer: Layer) -> String {
    let mut c = Canvas::new(fp);
    for (e, st) in base.edges() {
        let Some(u) = st.layer(layer).filter(|u| u.capacity > 0.0) else {
            continue;
        };
        let Some(seg) = edge_geometry(base, e) else { continue };
        let title = format!("{e:?} M{layer} u={} r={}", u.demand, u.capacity);
        c.line(seg, &heat(u.congestion()), 3.0, &title);
    }
    c.finish(&format!("congestion M{layer}"))
}

/// Routed wires colored by layer, Steiner points as dots.
pub fn routes_svg(fp: &Floorplan, result: &RoutingResult) -> String {
    let mut c = Canvas::new(fp);
    for n in &result.nets {
        let Some(t) = &n.tree else { continue };
        for s in &t.segments {
            let color = LAYER_COLORS[(s.layer as usize + LAYER_COLORS.len() - 1) % LAYER_COLORS.len()];
            c.line(s.seg, color, 1.5, &format!("{} M{}", n.name, s.layer));
        }
        for p in &t.steiner_points {
            let (x, y) = c.map(*p);
            let _ = writeln!(c.body, r##"<circle cx="{x:.2}" cy="{y:.2}" r="2" fill="#000"/>"##);
        }
    }
    c.finish("routes")
}

/// Writes `congestion_M<L>.svg` for every layer plus `routes.svg` into `dir`.
pub fn write_all(dir: &Path, fp: &Floorplan, base: &RoutingGraphs, result: &RoutingResult) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for layer in 1..=base.layers.max() {
        std::fs::write(dir.join(format!("congestion_M{layer}.svg")), congestion_svg(fp, base, layer))?;
    }
    std::fs::write(dir.join("routes.svg"), routes_svg(fp, result))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::fixtures::two_blocks;
    use crate::router::{route_all_with_graphs, RouterConfig};

    #[test]
    fn heat_endpoints() {
        assert_eq!(heat(0.0), "hsl(120,85%,45%)");
        assert_eq!(heat(1.0), "hsl(0,85%,45%)");
    }

    #[test]
    fn draws_the_cut_wall() {
        let fp = two_blocks();
        let (r, g) = route_all_with_graphs(&fp, &RouterConfig::default()).unwrap();
        let svg = congestion_svg(&fp, &g, 2);
        assert!(svg.starts_with("<svg"));
        // The single interior wall is vertical, so it carries capacity on M2.
        assert_eq!(svg.matches("<line").count(), g.junctions.segments.len() + g.grid.as_ref().map_or(0, |gg| {
            gg.edges.iter().filter(|e| e.state.layer(2).is_some_and(|u| u.capacity > 0.0)).count()
        }));
        assert!(routes_svg(&fp, &r).contains("n0 M"));
    }
}
