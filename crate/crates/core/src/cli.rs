//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage errors and rejected parameters,
//! 2 when a computation fails.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::export;
use crate::map_core::{MapInstance, Precision};
use crate::orbit::{DEFAULT_MAX_PERIOD, DEFAULT_SAMPLES, DEFAULT_TRANSIENT};
use crate::periodic;
use crate::render::{self, RenderSpec};
use crate::rotation;
use crate::scan::{self, BifurcationScan, SeedRole};

#[derive(Parser, Debug)]
#[command(
    name = "eosmap",
    version,
    about = "Bifurcation diagrams and periodic windows of EOS and logistic maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep the parameter and write the bifurcation diagram.
    Scan(ScanCmd),
    /// Graph of the n-th iterate at one parameter.
    Graph(GraphCmd),
    /// Periodic windows of a sweep, with rotation type and hopping metric.
    Windows(WindowsCmd),
    /// Continue a periodic point across a parameter interval.
    Track(TrackCmd),
    /// Rotational type of the attracting orbit of a given period.
    Classify(ClassifyCmd),
    /// Attractor jumps seen by one seed.
    Jumps(JumpsCmd),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FamilyArg {
    Eos,
    Logistic,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum PrecisionArg {
    Double,
    Compensated,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Double => Precision::Double,
            PrecisionArg::Compensated => Precision::Compensated,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SeedArg {
    Left,
    Right,
    Critical,
}

#[derive(Args, Debug)]
struct MapArgs {
    #[arg(long, value_enum, default_value = "eos")]
    family: FamilyArg,
    /// Steepness of the EOS map.
    #[arg(long, default_value_t = 100.0)]
    a: f64,
    #[arg(long, value_enum, default_value = "double")]
    precision: PrecisionArg,
}

impl MapArgs {
    /// Map at parameter `p` (`b` for EOS, `r` for logistic).
    fn at(&self, p: f64) -> Result<MapInstance> {
        let m = match self.family {
            FamilyArg::Eos => MapInstance::eos(self.a, p)?,
            FamilyArg::Logistic => MapInstance::logistic(p)?,
        };
        Ok(m.with_precision(self.precision.into()))
    }
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    map: MapArgs,
    #[arg(
        long,
        visible_alias = "r-min",
        default_value_t = 0.0,
        allow_negative_numbers = true
    )]
    b_min: f64,
    #[arg(
        long,
        visible_alias = "r-max",
        default_value_t = 0.5,
        allow_negative_numbers = true
    )]
    b_max: f64,
    /// Number of parameter grid columns.
    #[arg(long, default_value_t = 2000)]
    params: usize,
    #[arg(long, default_value_t = DEFAULT_TRANSIENT)]
    transient: usize,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
}

impl SweepArgs {
    fn run(&self) -> Result<BifurcationScan> {
        let base = self.map.at(self.valid_base())?;
        scan::sweep_map(
            &base,
            (self.b_min, self.b_max),
            self.params,
            self.transient,
            self.samples,
        )
    }

    /// A parameter accepted by the family, used only to build the base map;
    /// the range itself is validated by the sweep.
    fn valid_base(&self) -> f64 {
        match self.map.family {
            FamilyArg::Eos => self.b_min.clamp(0.0, 1.0),
            FamilyArg::Logistic => self.b_max.clamp(f64::MIN_POSITIVE, 4.0),
        }
    }
}

#[derive(Args, Debug)]
struct ScanCmd {
    #[command(flatten)]
    sweep: SweepArgs,
    /// Scan CSV destination; standard output when omitted.
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// P6 image destination.
    #[arg(long)]
    out_img: Option<PathBuf>,
    /// Image width; defaults to one pixel per grid column.
    #[arg(long)]
    width: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    height: usize,
    /// Draw the first seed in olive instead of yellow.
    #[arg(long)]
    olive: bool,
    /// Vertical axis as `min,max`.
    #[arg(long, value_parser = parse_interval, allow_hyphen_values = true)]
    y_range: Option<(f64, f64)>,
}

#[derive(Args, Debug)]
struct GraphCmd {
    #[command(flatten)]
    map: MapArgs,
    /// Parameter (`r` for the logistic family).
    #[arg(long, visible_alias = "r", allow_negative_numbers = true)]
    b: f64,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    resolution: usize,
    /// Graph CSV destination; standard output when omitted.
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_img: Option<PathBuf>,
    /// Side of the square image.
    #[arg(long, default_value_t = render::GRAPH_IMAGE_SIZE)]
    size: usize,
}

#[derive(Args, Debug)]
struct WindowsCmd {
    #[command(flatten)]
    sweep: SweepArgs,
    #[arg(long, default_value_t = DEFAULT_MAX_PERIOD)]
    max_period: usize,
    /// Skip the continuation-based hopping measurement.
    #[arg(long)]
    no_hopping: bool,
    #[arg(long)]
    out_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TrackCmd {
    #[command(flatten)]
    map: MapArgs,
    #[arg(long)]
    period: usize,
    #[arg(long, visible_alias = "r-min", allow_negative_numbers = true)]
    b_min: f64,
    #[arg(long, visible_alias = "r-max", allow_negative_numbers = true)]
    b_max: f64,
    #[arg(long, default_value_t = scan::REPORT_STEPS)]
    steps: usize,
    /// Rank of the tracked point within the sorted orbit.
    #[arg(long, default_value_t = 0)]
    track_index: usize,
    #[arg(long)]
    out_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ClassifyCmd {
    #[command(flatten)]
    map: MapArgs,
    #[arg(long, visible_alias = "r", allow_negative_numbers = true)]
    b: f64,
    #[arg(long)]
    period: usize,
}

#[derive(Args, Debug)]
struct JumpsCmd {
    #[command(flatten)]
    sweep: SweepArgs,
    #[arg(long, value_enum, default_value = "right")]
    seed: SeedArg,
    #[arg(long)]
    out_csv: Option<PathBuf>,
}

fn parse_interval(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected min,max")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    if lo < hi {
        Ok((lo, hi))
    } else {
        Err("min must be below max".into())
    }
}

/// Parses `args` (program name first) and runs the command, writing tables
/// to standard output and diagnostics to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return 0;
        }
        Err(e) => {
            let msg = e.to_string();
            let line = msg.lines().next().unwrap_or("usage error");
            let _ = writeln!(err, "{line}");
            return 1;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_) | Error::InvalidRange(_) | Error::SeedOutOfDomain { .. } => 1,
        _ => 2,
    }
}

/// Writes through `f` to the file at `path`, or to `out` when there is none.
fn emit(
    path: Option<&Path>,
    out: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => f(out),
    }
}

fn write_image(path: &Path, img: &render::Pixmap) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    img.write_p6(&mut w)?;
    w.flush()?;
    Ok(())
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Scan(c) => {
            let scan = c.sweep.run()?;
            emit(c.out_csv.as_deref(), out, |w| {
                export::write_scan_csv(&scan, w)
            })?;
            if let Some(path) = &c.out_img {
                let mut spec = RenderSpec::for_scan(&scan, c.height);
                if let Some(w) = c.width {
                    spec.width = w;
                }
                if let Some(y) = c.y_range {
                    spec.y_axis = y;
                }
                if c.olive {
                    spec = spec.with_olive();
                }
                write_image(path, &render::render_scan(&scan, &spec)?)?;
            }
            Ok(())
        }
        Command::Graph(c) => {
            let m = c.map.at(c.b)?;
            let g = render::render_iterate_graph_sized(&m, c.n, c.resolution, c.size)?;
            emit(c.out_csv.as_deref(), out, |w| {
                export::write_graph_csv(&g.rows, w)
            })?;
            if let Some(path) = &c.out_img {
                write_image(path, &g.image)?;
            }
            Ok(())
        }
        Command::Windows(c) => {
            let scan = c.sweep.run()?;
            let mut windows = scan::find_windows(&scan, c.max_period)?;
            if !c.no_hopping {
                // windows too narrow to continue keep empty hopping fields
                for w in &mut windows {
                    if let Ok(rep) = scan::window_report(&scan.base, w) {
                        *w = rep;
                    }
                }
            }
            emit(c.out_csv.as_deref(), out, |w| {
                export::write_windows_csv(&windows, w)
            })
        }
        Command::Track(c) => {
            let base = c.map.at(0.5 * (c.b_min + c.b_max))?;
            let branch = periodic::continue_branch_from(
                &base,
                (c.b_min, c.b_max),
                c.period,
                c.track_index,
                c.steps,
            )?;
            emit(c.out_csv.as_deref(), out, |w| {
                export::write_branch_csv(&branch, w)
            })
        }
        Command::Classify(c) => {
            let m = c.map.at(c.b)?;
            if c.period == 0 {
                return Err(Error::InvalidParameter("period must be at least 1".into()));
            }
            let orb = periodic::find_attracting_orbit(&m, c.period, DEFAULT_TRANSIENT).ok_or(
                Error::SeedOrbitNotFound {
                    period: c.period,
                    b: c.b,
                },
            )?;
            let class = rotation::classify(&m, &orb)?;
            let rot = class
                .rotation_number
                .map(|q| q.to_string())
                .unwrap_or_else(|| "-".into());
            let points: Vec<String> = orb.points.iter().map(|x| x.to_string()).collect();
            writeln!(out, "kind: {}", class.kind)?;
            writeln!(out, "rotation_number: {rot}")?;
            writeln!(out, "laps: {:?}", class.lap_histogram)?;
            writeln!(out, "touches_critical: {}", class.touches_critical)?;
            writeln!(out, "multiplier: {}", orb.multiplier)?;
            writeln!(out, "points: {}", points.join(" "))?;
            Ok(())
        }
        Command::Jumps(c) => {
            let scan = c.sweep.run()?;
            let role = match c.seed {
                SeedArg::Left => SeedRole::Left,
                SeedArg::Right => SeedRole::Right,
                SeedArg::Critical => SeedRole::Critical,
            };
            let idx = scan.seeds.iter().position(|&s| s == role).ok_or_else(|| {
                Error::InvalidParameter(format!("no {} seed for this family", role.as_str()))
            })?;
            let jumps = scan::find_jumps_detailed(&scan, idx)?;
            emit(c.out_csv.as_deref(), out, |w| {
                writeln!(w, "b_left,b_right,gap")?;
                for j in &jumps {
                    writeln!(w, "{},{},{}", j.b_left, j.b_right, j.gap)?;
                }
                Ok(())
            })
        }
    }
}
