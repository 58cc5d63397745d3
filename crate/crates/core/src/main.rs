use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use hgr_core::floorplan::NetOrder;
use hgr_core::grid::GridCapMode;
use hgr_core::congestion::DemandMode;
use hgr_core::io::bookshelf;
use hgr_core::io::config::parse_capacity_override;
use hgr_core::io::{generate_mosaic, run, RunConfig};
use hgr_core::router::{CapacityOverride, RouteMode, RouterConfig};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hgr", version, about = "Early global router for mosaic floorplans")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Hybrid,
    StaircaseOnly,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Asc,
    Desc,
}

#[derive(Clone, Copy, ValueEnum)]
enum CapMode {
    Replicate,
    Divide,
}

#[derive(Subcommand)]
enum Command {
    /// Route a floorplan and report congestion, length and vias.
    Route {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "hybrid")]
        mode: Mode,
        /// Number of metal layers (even).
        #[arg(long, default_value_t = 8)]
        layers: u8,
        /// Highest layer routed through block-boundary channels.
        #[arg(long, default_value_t = 2)]
        split: u8,
        /// Charge 1.5 tracks per wire.
        #[arg(long)]
        epe: bool,
        /// Track pitch in database units.
        #[arg(long)]
        pitch: Option<i64>,
        /// Cost of one via in length units.
        #[arg(long)]
        via_penalty: Option<f64>,
        #[arg(long, value_enum, default_value = "asc")]
        net_order: Order,
        #[arg(long, value_enum, default_value = "replicate")]
        grid_cap_mode: CapMode,
        /// Search only inside each net's bounding box grown by one bin.
        #[arg(long)]
        confine: bool,
        /// Override one edge-layer capacity: s<seg>:<layer>=<cap> or g<edge>:<layer>=<cap>.
        #[arg(long = "cap", value_parser = parse_capacity_override)]
        caps: Vec<CapacityOverride>,
        /// Route in both modes and print a delta table.
        #[arg(long)]
        compare: bool,
        /// Directory for congestion and route SVGs.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Include wall time in reports.
        #[arg(long)]
        timing: bool,
    },
    /// Write a random mosaic floorplan.
    Gen {
        #[arg(long)]
        blocks: usize,
        #[arg(long)]
        nets: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert bookshelf .blocks/.nets[/.pl] files into a floorplan document.
    Convert {
        #[arg(long)]
        blocks: PathBuf,
        #[arg(long)]
        nets: PathBuf,
        #[arg(long)]
        pl: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Route {
            input,
            mode,
            layers,
            split,
            epe,
            pitch,
            via_penalty,
            net_order,
            grid_cap_mode,
            confine,
            caps,
            compare,
            svg,
            csv,
            json,
            timing,
        } => {
            let cfg = RunConfig {
                input,
                router: RouterConfig {
                    mode: match mode {
                        Mode::Hybrid => RouteMode::Hybrid,
                        Mode::StaircaseOnly => RouteMode::StaircaseOnly,
                    },
                    max_layers: layers,
                    split,
                    demand: if epe { DemandMode::Epe } else { DemandMode::Plain },
                    pitch,
                    via_penalty,
                    net_order: match net_order {
                        Order::Asc => NetOrder::Ascending,
                        Order::Desc => NetOrder::Descending,
                    },
                    grid_cap_mode: match grid_cap_mode {
                        CapMode::Replicate => GridCapMode::Replicate,
                        CapMode::Divide => GridCapMode::Divide,
                    },
                    confine_to_bbox: confine,
                    capacity_overrides: caps,
                },
                compare,
                csv,
                json,
                svg,
                timing,
            };
            let out = run(&cfg)?;
            std::io::stdout().write_all(out.stdout.as_bytes())?;
        }
        Command::Gen { blocks, nets, seed, out } => {
            anyhow::ensure!(blocks >= 1, "--blocks must be at least 1");
            let doc = generate_mosaic(blocks, nets, seed);
            std::fs::write(&out, doc.serialize()).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Convert { blocks, nets, pl, out } => {
            let b = bookshelf::parse_blocks(&read(&blocks)?)?;
            let n = bookshelf::parse_nets(&read(&nets)?)?;
            let p = pl.as_ref().map(read).transpose()?.map(|t| bookshelf::parse_pl(&t)).transpose()?;
            let doc = bookshelf::convert(&b, &n, p.as_ref())?;
            std::fs::write(&out, doc.serialize()).with_context(|| format!("writing {}", out.display()))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hgr: {e:#}");
            ExitCode::FAILURE
        }
    }
}
