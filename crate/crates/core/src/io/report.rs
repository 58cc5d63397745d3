//! CSV, JSON and comparison reports. Output is byte-stable for a given result;
//! wall time is printed only on request.

use crate::metrics::{RoutingResult, WACE_PERCENTS};
use crate::router::{NetStatus, RouteSegment, SegmentKind, Via};
use crate::geom::Point;
use serde::Serialize;
use std::fmt::Write as _;

pub const CSV_HEADER: &str = "net_id,degree,hpwl,routed_length,vias,status";

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.6}"))
}

fn status_name(s: NetStatus) -> &'static str {
    match s {
        NetStatus::Routed => "routed",
        NetStatus::Unrouted => "unrouted",
    }
}

/// Summary metrics in report order.
pub fn summary_rows(r: &RoutingResult, timing: bool) -> Vec<(String, String)> {
    let mut rows = vec![
        ("total_length".to_string(), r.total_length.to_string()),
        ("total_vias".to_string(), r.total_vias.to_string()),
        ("completion".to_string(), format!("{:.6}", r.completion)),
        ("layers_used".to_string(), r.layers_used.to_string()),
    ];
    for x in WACE_PERCENTS {
        rows.push((format!("ace_{x}"), fmt_opt(r.ace(x))));
    }
    rows.push(("wace4".to_string(), fmt_opt(r.wace4())));
    rows.push((
        "cpu_seconds".to_string(),
        if timing {
            format!("{:.3}", r.cpu_seconds)
        } else {
            "NA".to_string()
        },
    ));
    rows
}

/// Per-net rows, a blank line, then `metric,value` summary rows.
pub fn write_csv(r: &RoutingResult, timing: bool) -> String {
    let mut s = String::new();
    s.push_str(CSV_HEADER);
    s.push('\n');
    for n in &r.nets {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            n.name,
            n.degree,
            n.hpwl,
            n.length(),
            n.vias(),
            status_name(n.status)
        );
    }
    s.push_str("\nmetric,value\n");
    for (k, v) in summary_rows(r, timing) {
        let _ = writeln!(s, "{k},{v}");
    }
    s
}

#[derive(Serialize)]
struct JsonWire {
    from: Point,
    to: Point,
    layer: u8,
    kind: SegmentKind,
}

impl From<&RouteSegment> for JsonWire {
    fn from(s: &RouteSegment) -> Self {
        Self {
            from: s.seg.a,
            to: s.seg.b,
            layer: s.layer,
            kind: s.kind,
        }
    }
}

#[derive(Serialize)]
struct JsonNet<'a> {
    id: u32,
    name: &'a str,
    degree: usize,
    hpwl: i64,
    status: NetStatus,
    length: i64,
    vias: usize,
    steiner_points: &'a [Point],
    wires: Vec<JsonWire>,
    via_list: &'a [Via],
}

#[derive(Serialize)]
struct JsonReport<'a, C: Serialize> {
    config: &'a C,
    summary: Vec<(String, String)>,
    routed: usize,
    unrouted: usize,
    nets: Vec<JsonNet<'a>>,
}

/// Full result dump with per-net wires; `config` is embedded verbatim.
pub fn write_json<C: Serialize>(r: &RoutingResult, config: &C, timing: bool) -> String {
    let nets = r
        .nets
        .iter()
        .map(|n| {
            let (sp, wires, vias): (&[Point], Vec<JsonWire>, &[Via]) = match &n.tree {
                Some(t) => (&t.steiner_points, t.segments.iter().map(JsonWire::from).collect(), &t.vias),
                None => (&[], Vec::new(), &[]),
            };
            JsonNet {
                id: n.net.0,
                name: &n.name,
                degree: n.degree,
                hpwl: n.hpwl,
                status: n.status,
                length: n.length(),
                vias: n.vias(),
                steiner_points: sp,
                wires,
                via_list: vias,
            }
        })
        .collect();
    let report = JsonReport {
        config,
        summary: summary_rows(r, timing),
        routed: r.routed,
        unrouted: r.unrouted,
        nets,
    };
    let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub metric: &'static str,
    pub hybrid: f64,
    pub staircase_only: f64,
}

impl CompareRow {
    pub fn delta(&self) -> f64 {
        self.hybrid - self.staircase_only
    }
}

/// Paired totals of a hybrid and a staircase-only run on the same input.
pub fn compare_rows(hybrid: &RoutingResult, staircase: &RoutingResult) -> Vec<CompareRow> {
    let row = |metric, f: &dyn Fn(&RoutingResult) -> f64| CompareRow {
        metric,
        hybrid: f(hybrid),
        staircase_only: f(staircase),
    };
    vec![
        row("total_length", &|r| r.total_length as f64),
        row("total_vias", &|r| r.total_vias as f64),
        row("wace4", &|r| r.wace4().unwrap_or(0.0)),
        row("layers_used", &|r| r.layers_used as f64),
        row("completion", &|r| r.completion),
    ]
}

pub fn write_compare(rows: &[CompareRow]) -> String {
    let mut s = String::from("metric,hybrid,staircase_only,delta\n");
    for r in rows {
        let num = |v: f64| {
            if v.fract() == 0.0 && v.abs() < 1e15 {
                format!("{}", v as i64)
            } else {
                format!("{v:.6}")
            }
        };
        let _ = writeln!(
            s,
            "{},{},{},{}",
            r.metric,
            num(r.hybrid),
            num(r.staircase_only),
            num(r.delta())
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::fixtures::two_blocks;
    use crate::router::{route_all, RouterConfig};

    #[test]
    fn csv_layout() {
        let r = route_all(&two_blocks(), &RouterConfig::default()).unwrap();
        let csv = write_csv(&r, false);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("n0,2,50,"));
        assert!(lines[1].ends_with(",routed"));
        assert_eq!(lines[2], "");
        assert_eq!(lines[3], "metric,value");
        let keys: Vec<&str> = lines[4..].iter().map(|l| l.split(',').next().unwrap()).collect();
        assert_eq!(
            keys,
            vec![
                "total_length", "total_vias", "completion", "layers_used", "ace_0.5", "ace_1", "ace_2", "ace_5",
                "wace4", "cpu_seconds"
            ]
        );
        assert_eq!(lines.last().unwrap(), &"cpu_seconds,NA");
    }

    #[test]
    fn compare_deltas_subtract() {
        let a = route_all(&two_blocks(), &RouterConfig::default()).unwrap();
        let rows = compare_rows(&a, &a);
        assert!(rows.iter().all(|r| r.delta() == 0.0));
        assert!(write_compare(&rows).starts_with("metric,hybrid,staircase_only,delta\ntotal_length,"));
    }
}
