//! `projbill`: experiments on projective billiards from the command line.
//!
//! Exit codes: 0 success, 1 a checked property failed, 2 invalid input,
//! 3 numerical failure.

mod commands;
mod input;
mod output;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
}

impl From<projbill::Error> for CliError {
    fn from(e: projbill::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "projbill", version, about = "Projective billiards: caustics, orbits, polygon reflectivity and invariants")]
pub struct Cli {
    #[command(flatten)]
    pub config: Config,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every command.
#[derive(Debug, Clone, Args)]
pub struct Config {
    /// Output directory for CSV/JSON/SVG files.
    #[arg(long, global = true, env = "PROJBILL_OUT", default_value = "projbill-out")]
    pub out: PathBuf,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// File formats to write.
    #[arg(long, global = true, value_delimiter = ',', default_value = "csv,json,svg")]
    pub format: Vec<Format>,
    /// Tolerance for incidence and harmonicity checks.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub geom_tol: f64,
    /// Tolerance for orbit closure.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub closure_tol: f64,
    /// Distance below which polynomial roots are merged.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub dedup_tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact caustic polynomial of n-periodic orbits in x²/a + y²/b = 1.
    Caustics {
        #[arg(short = 'n')]
        n: u32,
        /// Semi-axis parameter, exact as p/q.
        #[arg(short = 'a', allow_hyphen_values = true)]
        a: String,
        #[arg(short = 'b', allow_hyphen_values = true)]
        b: String,
        /// Run Poncelet closure for every real root.
        #[arg(long)]
        check_poncelet: bool,
        /// Compare with the closed forms (n = 3, 4).
        #[arg(long)]
        closed_form: bool,
        /// Start points per Poncelet check.
        #[arg(long, default_value_t = 10)]
        starts: usize,
    },
    /// Iterate a billiard described by a JSON scene.
    Orbit {
        scene: PathBuf,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        /// First point, BOUNDARY:PARAM[,PARAM].
        #[arg(long, value_parser = input::parse_point)]
        start: Option<projbill::scene::PointSpec>,
        /// Second point of the first chord.
        #[arg(long, value_parser = input::parse_point)]
        next: Option<projbill::scene::PointSpec>,
    },
    /// Random-orbit closure sweep for polygon billiards.
    Polygon {
        kind: PolygonChoice,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Half the vertex count of the regular polygon.
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Vertex count of the odd polygon.
        #[arg(long, default_value_t = 5)]
        n: usize,
        /// Custom vertices, "x,y;x,y;...".
        #[arg(long, value_parser = input::parse_vertices)]
        vertices: Option<::std::vec::Vec<[f64; 2]>>,
        /// Custom center (cp-odd-n), "x,y".
        #[arg(long, value_parser = input::parse_xy)]
        center: Option<[f64; 2]>,
    },
    /// Circumcenters of the 3-periodic orbits of an ellipse.
    Circumcenters {
        #[arg(short = 'a', default_value_t = 2.0)]
        a: f64,
        #[arg(short = 'b', default_value_t = 1.0)]
        b: f64,
        #[arg(short = 'N', default_value_t = 200)]
        count: usize,
    },
    /// Tangency parameters of orbit chords along a metric billiard in an ellipse or ellipsoid.
    Chasles {
        #[arg(long, value_parser = input::parse_signature)]
        signature: Option<(usize, usize)>,
        #[arg(short = 'a', default_value_t = 2.0)]
        a: f64,
        #[arg(short = 'b', default_value_t = 1.0)]
        b: f64,
        /// Third axis: switches to an ellipsoid.
        #[arg(short = 'c')]
        c: Option<f64>,
        #[arg(long, default_value_t = 50)]
        bounces: usize,
        #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
        phase: f64,
        #[arg(long, default_value_t = 0.4, allow_hyphen_values = true)]
        tilt: f64,
    },
    /// Hyperplanes permitted by random tangent directions on an ellipsoid.
    Permitted {
        #[arg(long, value_parser = input::parse_axes, default_value = "3,2,1")]
        ellipsoid: ::std::vec::Vec<f64>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, value_parser = input::parse_signature)]
        signature: Option<(usize, usize)>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolygonChoice {
    RightSpherical,
    CpQuadrilateral,
    #[value(name = "cp-regular-2m")]
    CpRegular2m,
    CpOddN,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = &cli.config;
    if [cfg.geom_tol, cfg.closure_tol, cfg.dedup_tol].iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
        eprintln!("error: tolerances must be positive");
        return ExitCode::from(2);
    }
    let (name, result) = commands::run(&cli);
    match result.and_then(|mut o| o.emit(name, &cfg.out, &cfg.format).map(|t| (t, o.violations))) {
        Ok((text, violations)) => {
            // A closed pipe on stdout is not an error worth reporting.
            let _ = writeln!(std::io::stdout(), "{text}");
            if violations.is_empty() {
                ExitCode::SUCCESS
            } else {
                for v in &violations {
                    eprintln!("violation: {v}");
                }
                ExitCode::from(1)
            }
        }
        Err(CliError::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(3)
        }
    }
}
