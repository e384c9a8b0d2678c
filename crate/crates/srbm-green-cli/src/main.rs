use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use srbm_green::dim1::Dim1Params;
use srbm_green::montecarlo::BoxGrid;
use srbm_green::Complex64 as C64;
use srbm_green_cli::commands::{self, Dim1Query, McTarget, Transform};
use srbm_green_cli::validate::run_validate;
use srbm_green_cli::{parse_config, parse_reals, CliError, RunConfig};

/// Green's functions of reflected Brownian motion in the quadrant.
#[derive(Debug, Parser)]
#[command(name = "srbm-green", version)]
struct Cli {
    /// Run configuration (key = value); defaults describe the canonical instance.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write CSV here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Existence, recurrence regime and convergence domains.
    Classify,
    /// Branch points, intersection points and the hyperbola vertex.
    Kernel,
    /// Quadrature grid on the lower half of the hyperbola.
    Curve,
    /// Gluing function and derivative at `re,im`.
    Glue {
        #[arg(allow_hyphen_values = true)]
        theta2: String,
    },
    /// Face-1 transform at `re,im`.
    Psi1 {
        #[arg(allow_hyphen_values = true)]
        theta2: String,
    },
    /// Face-2 transform at `re,im`.
    Psi2 {
        #[arg(allow_hyphen_values = true)]
        theta1: String,
    },
    /// Interior transform at `re1,im1,re2,im2`.
    Psi {
        #[arg(allow_hyphen_values = true)]
        theta: String,
    },
    /// Monte Carlo estimate of a transform or an occupation histogram.
    Mc {
        /// Interior point `re1,im1,re2,im2`.
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["face", "histogram"])]
        interior: Option<String>,
        /// Face index (1 or 2) followed by the point: `i,re,im`.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "histogram")]
        face: Option<String>,
        /// Box `x0,x1,y0,y1,nx,ny`.
        #[arg(long)]
        histogram: Option<String>,
    },
    /// One-dimensional reflected Brownian motion, closed forms.
    Dim1 {
        #[arg(long, default_value_t = 1.0)]
        sigma2: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = 0.0)]
        x0: f64,
        /// Green's function at this level.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "theta")]
        x: Option<f64>,
        /// Transform at `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<String>,
    },
    /// Invariant battery; exits nonzero if any check fails.
    Validate {
        /// Also run the Monte Carlo comparisons.
        #[arg(long)]
        with_mc: bool,
    },
    /// Face-1 transform along the segment between two points.
    PlotData {
        /// `re,im` of the first point.
        #[arg(allow_hyphen_values = true)]
        from: String,
        /// `re,im` of the last point.
        #[arg(allow_hyphen_values = true)]
        to: String,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
}

fn complex(s: &str) -> Result<C64, CliError> {
    let v = parse_reals(s, 2)?;
    Ok(C64::new(v[0], v[1]))
}

fn pair(s: &str) -> Result<(C64, C64), CliError> {
    let v = parse_reals(s, 4)?;
    Ok((C64::new(v[0], v[1]), C64::new(v[2], v[3])))
}

fn count(x: f64) -> Result<usize, CliError> {
    if x >= 1.0 && x.fract() == 0.0 {
        Ok(x as usize)
    } else {
        Err(CliError::Argument(format!("{x} is not a positive integer")))
    }
}

fn mc_target(interior: Option<String>, face: Option<String>, histogram: Option<String>) -> Result<McTarget, CliError> {
    if let Some(s) = interior {
        let (a, b) = pair(&s)?;
        return Ok(McTarget::Interior(a, b));
    }
    if let Some(s) = face {
        let v = parse_reals(&s, 3)?;
        let i = count(v[0]).ok().filter(|i| *i <= 2).ok_or_else(|| CliError::Argument("face must be 1 or 2".into()))?;
        return Ok(McTarget::Face(i, C64::new(v[1], v[2])));
    }
    if let Some(s) = histogram {
        let v = parse_reals(&s, 6)?;
        let grid = BoxGrid { x0: v[0], x1: v[1], y0: v[2], y1: v[3], nx: count(v[4])?, ny: count(v[5])? };
        return Ok(McTarget::Histogram(grid));
    }
    Err(CliError::Argument("one of --interior, --face or --histogram is required".into()))
}

fn run(cli: Cli) -> Result<(String, bool), CliError> {
    let cfg = match &cli.config {
        Some(path) => parse_config(&std::fs::read_to_string(path)?)?,
        None => RunConfig::default(),
    };
    let out = match cli.command {
        Command::Classify => commands::classify_cmd(&cfg)?,
        Command::Kernel => commands::kernel_cmd(&cfg)?,
        Command::Curve => commands::curve_cmd(&cfg)?,
        Command::Glue { theta2 } => commands::glue_cmd(&cfg, complex(&theta2)?)?,
        Command::Psi1 { theta2 } => commands::psi_cmd(&cfg, Transform::Face1, complex(&theta2)?, C64::new(0.0, 0.0))?,
        Command::Psi2 { theta1 } => commands::psi_cmd(&cfg, Transform::Face2, complex(&theta1)?, C64::new(0.0, 0.0))?,
        Command::Psi { theta } => {
            let (a, b) = pair(&theta)?;
            commands::psi_cmd(&cfg, Transform::Interior, a, b)?
        }
        Command::Mc { interior, face, histogram } => commands::mc_cmd(&cfg, mc_target(interior, face, histogram)?)?,
        Command::Dim1 { sigma2, mu, x0, x, theta } => {
            let q = Dim1Params::new(sigma2, mu, x0)?;
            let query = match (x, theta) {
                (Some(x), _) => Dim1Query::Green(x),
                (None, Some(t)) => Dim1Query::Transform(complex(&t)?),
                (None, None) => return Err(CliError::Argument("one of --x or --theta is required".into())),
            };
            commands::dim1_cmd(&cfg, &q, query)?
        }
        Command::Validate { with_mc } => {
            let report = run_validate(&cfg, with_mc)?;
            return Ok((report.render(&cfg)?, report.failed()));
        }
        Command::PlotData { from, to, points } => commands::plot_data_cmd(&cfg, complex(&from)?, complex(&to)?, points)?,
    };
    Ok((out, false))
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("SRBM_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Ignored if a pool already exists; the cap is advisory.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let cli = Cli::parse();
    let target = cli.output.clone();
    match run(cli) {
        Ok((text, failed)) => {
            let written = match target {
                Some(path) => std::fs::write(path, &text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
