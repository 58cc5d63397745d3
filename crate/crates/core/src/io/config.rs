//! Run configuration and the parse, route, report pipeline.

use super::document::{parse_document, DocumentError};
use super::report::{compare_rows, write_compare, write_csv, write_json};
use super::svg;
use crate::congestion::EdgeRef;
use crate::floorplan::Floorplan;
use crate::hybrid::RoutingGraphs;
use crate::metrics::RoutingResult;
use crate::router::{route_all_with_graphs, CapacityOverride, RouteMode, RouterConfig, RouterError};
use serde::Serialize;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Document {
        path: PathBuf,
        source: DocumentError,
    },
    #[error(transparent)]
    Router(#[from] RouterError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub input: PathBuf,
    pub router: RouterConfig,
    /// Route in both modes and emit a paired delta table.
    pub compare: bool,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    /// Report wall time; off by default so output is byte-stable.
    pub timing: bool,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>) -> Self {
        Self {
            input: input.into(),
            router: RouterConfig::default(),
            compare: false,
            csv: None,
            json: None,
            svg: None,
            timing: false,
        }
    }

    pub fn validate(&self) -> Result<(), RunError> {
        self.router
            .layer_stack()
            .map_err(|e| RunError::Config(e.to_string()))?;
        if self.router.pitch.is_some_and(|p| p <= 0) {
            return Err(RunError::Config("pitch must be positive".into()));
        }
        if self.router.via_penalty.is_some_and(|v| !(v >= 0.0 && v.is_finite())) {
            return Err(RunError::Config("via penalty must be finite and non-negative".into()));
        }
        Ok(())
    }
}

/// Parses `s<seg>:<layer>=<cap>` (staircase) or `g<edge>:<layer>=<cap>` (grid).
pub fn parse_capacity_override(s: &str) -> Result<CapacityOverride, String> {
    let bad = || format!("expected s<id>:<layer>=<capacity> or g<id>:<layer>=<capacity>, got {s:?}");
    let (lhs, cap) = s.split_once('=').ok_or_else(bad)?;
    let (edge, layer) = lhs.split_once(':').ok_or_else(bad)?;
    let id = |t: &str| t.parse::<u32>().map_err(|_| bad());
    let edge = match edge.split_at_checked(1) {
        Some(("s", n)) => EdgeRef::Staircase(id(n)?),
        Some(("g", n)) => EdgeRef::Grid(id(n)?),
        _ => return Err(bad()),
    };
    let capacity: f64 = cap.parse().map_err(|_| bad())?;
    if !(capacity >= 0.0 && capacity.is_finite()) {
        return Err(bad());
    }
    Ok(CapacityOverride {
        edge,
        layer: layer.parse().map_err(|_| bad())?,
        capacity,
    })
}

/// Upper bound on concurrent jobs: `HGR_THREADS`, else the core count.
pub fn thread_limit() -> usize {
    std::env::var("HGR_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs `f` over `jobs` on at most [`thread_limit`] threads; results keep job order.
pub fn run_jobs<J: Sync, R: Send>(jobs: &[J], f: impl Fn(&J) -> R + Sync) -> Vec<R> {
    let threads = thread_limit().min(jobs.len()).max(1);
    if threads == 1 {
        return jobs.iter().map(&f).collect();
    }
    let chunk = jobs.len().div_ceil(threads);
    std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .chunks(chunk)
            .map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<R>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("routing job panicked"))
            .collect()
    })
}

pub fn load_floorplan(path: &Path) -> Result<Floorplan, RunError> {
    let text = std::fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let doc_err = |source| RunError::Document {
        path: path.to_path_buf(),
        source,
    };
    parse_document(&text).map_err(doc_err)?.to_floorplan().map_err(doc_err)
}

fn write_file(path: &Path, text: &str) -> Result<(), RunError> {
    std::fs::write(path, text).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// `out.csv` with tag `hybrid` becomes `out.hybrid.csv`.
fn tagged(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{tag}"),
    };
    path.with_file_name(name)
}

/// What a run produced; `stdout` is what the CLI prints.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub stdout: String,
    pub results: Vec<(RouteMode, RoutingResult)>,
}

fn mode_name(m: RouteMode) -> &'static str {
    match m {
        RouteMode::Hybrid => "hybrid",
        RouteMode::StaircaseOnly => "staircase-only",
    }
}

fn emit(
    cfg: &RunConfig,
    router: &RouterConfig,
    fp: &Floorplan,
    result: &RoutingResult,
    graphs: &RoutingGraphs,
    tag: Option<&str>,
) -> Result<(), RunError> {
    let path_for = |p: &Path| tag.map_or_else(|| p.to_path_buf(), |t| tagged(p, t));
    if let Some(p) = &cfg.csv {
        write_file(&path_for(p), &write_csv(result, cfg.timing))?;
    }
    if let Some(p) = &cfg.json {
        write_file(&path_for(p), &write_json(result, router, cfg.timing))?;
    }
    if let Some(dir) = &cfg.svg {
        let dir = tag.map_or_else(|| dir.clone(), |t| dir.join(t));
        svg::write_all(&dir, fp, graphs, result).map_err(|source| RunError::Io { path: dir, source })?;
    }
    Ok(())
}

/// Parses the input, routes it and writes every requested report.
///
/// Single mode: the CSV goes to `--csv` or, when absent, to `stdout`.
/// Compare mode: each mode's reports are written with a `.hybrid` /
/// `.staircase-only` tag; the delta table replaces the plain CSV.
pub fn run(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    cfg.validate()?;
    let fp = load_floorplan(&cfg.input)?;
    if !cfg.compare {
        let (result, graphs) = route_all_with_graphs(&fp, &cfg.router)?;
        emit(cfg, &cfg.router, &fp, &result, &graphs, None)?;
        let stdout = if cfg.csv.is_none() {
            write_csv(&result, cfg.timing)
        } else {
            String::new()
        };
        return Ok(RunOutput {
            stdout,
            results: vec![(cfg.router.mode, result)],
        });
    }
    let jobs: Vec<RouterConfig> = [RouteMode::Hybrid, RouteMode::StaircaseOnly]
        .into_iter()
        .map(|mode| RouterConfig {
            mode,
            ..cfg.router.clone()
        })
        .collect();
    let runs = run_jobs(&jobs, |rc| route_all_with_graphs(&fp, rc));
    let mut results = Vec::new();
    for (rc, run) in jobs.iter().zip(runs) {
        let (result, graphs) = run?;
        emit(cfg, rc, &fp, &result, &graphs, Some(mode_name(rc.mode)))?;
        results.push((rc.mode, result));
    }
    let table = write_compare(&compare_rows(&results[0].1, &results[1].1));
    let stdout = match &cfg.csv {
        Some(p) => {
            write_file(p, &table)?;
            String::new()
        }
        None => table,
    };
    Ok(RunOutput { stdout, results })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layers::Layer;

    #[test]
    fn override_syntax() {
        let o = parse_capacity_override("s3:2=6").unwrap();
        assert_eq!((o.edge, o.layer, o.capacity), (EdgeRef::Staircase(3), 2 as Layer, 6.0));
        assert_eq!(parse_capacity_override("g10:5=1.5").unwrap().edge, EdgeRef::Grid(10));
        for bad in ["x3:2=6", "s3=6", "s3:2", "s:2=1", "s1:2=-1"] {
            assert!(parse_capacity_override(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn tagged_paths() {
        assert_eq!(tagged(Path::new("d/out.csv"), "hybrid"), PathBuf::from("d/out.hybrid.csv"));
        assert_eq!(tagged(Path::new("out"), "x"), PathBuf::from("out.x"));
    }

    #[test]
    fn jobs_keep_order() {
        let v: Vec<u32> = (0..17).collect();
        assert_eq!(run_jobs(&v, |x| x * 2), v.iter().map(|x| x * 2).collect::<Vec<_>>());
    }

    #[test]
    fn rejects_odd_layer_count() {
        let mut c = RunConfig::new("x");
        c.router.max_layers = 7;
        assert!(matches!(c.validate(), Err(RunError::Config(_))));
    }
}
