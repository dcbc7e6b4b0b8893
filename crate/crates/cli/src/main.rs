//! `dirichlet-lab`: norms, approximants, dilation sweeps and
//! non-cyclicity certificates from the command line.

mod io;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dirichlet_lab::approximant::{self, decay_sweep, fit_decay, running_slopes};
use dirichlet_lab::capacity::{
    cauchy_convergence_verdict, cauchy_norm_terms, moments, noncyclicity_certificate, riesz_energy,
    CertificateOptions, EnergyScheme, SphereMeasure,
};
use dirichlet_lab::diagonal::beta_of_alpha;
use dirichlet_lab::dilation::{self, boundedness_verdict};
use dirichlet_lab::norms::{self, mc_integral_norm};
use dirichlet_lab::series::model_polynomial;
use dirichlet_lab::{CoeffSeries, ModelPolynomialSpec, SpaceParams};
use serde_json::json;

use crate::io::{num, opt, parse_range, CliError, CliResult, Format, Sink};

#[derive(Debug, Parser)]
#[command(name = "dirichlet-lab", version, about = "Numerical experiments in Dirichlet-type spaces on the unit ball of C^n")]
#[command(after_help = "Set DIRICHLET_LAB_THREADS to cap the worker threads.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Squared norm ‖f‖²_α of a polynomial.
    Norm {
        #[command(flatten)]
        space: Space,
        #[command(flatten)]
        func: Func,
        /// Also estimate the integral seminorm with this many ball samples (-1 < α < 1).
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Out,
    },
    /// Optimal polynomial approximant to 1/f of one order.
    Approximant {
        #[command(flatten)]
        space: Space,
        #[command(flatten)]
        func: Func,
        /// Per-variable degree bound N.
        #[arg(long)]
        order: u32,
        #[command(flatten)]
        out: Out,
    },
    /// dist² of the optimal approximants over a range of orders.
    Decay {
        #[command(flatten)]
        space: Space,
        #[command(flatten)]
        func: Func,
        /// Inclusive order range a:b.
        #[arg(long, value_parser = parse_range, default_value = "0:10")]
        orders: (u32, u32),
        #[command(flatten)]
        out: Out,
    },
    /// ‖p/p_r‖²_α for the model polynomial over a grid of radii.
    Dilate {
        #[command(flatten)]
        space: Space,
        /// Model polynomial 1 − m^{m/2} z_1⋯z_m.
        #[arg(long = "model-m")]
        model_m: usize,
        /// Comma-separated radii in [0, 1), ascending.
        #[arg(long, value_delimiter = ',', default_value = "0.9,0.99,0.999,0.9999")]
        r_grid: Vec<f64>,
        /// Relative tolerance of the series tail.
        #[arg(long, default_value = "1e-13")]
        tol: f64,
        #[command(flatten)]
        out: Out,
    },
    /// Terms and convergence verdict of the Cauchy-transform norm series.
    Cauchy {
        #[command(flatten)]
        space: Space,
        #[command(flatten)]
        measure: Measure,
        /// Number K of series terms.
        #[arg(long, default_value_t = 4000)]
        terms: u32,
        #[command(flatten)]
        out: Out,
    },
    /// Riesz α-energy of a boundary measure.
    Energy {
        #[command(flatten)]
        space: Space,
        #[command(flatten)]
        measure: Measure,
        /// Use Monte Carlo with this many pairs instead of the torus grid.
        #[arg(long)]
        samples: Option<usize>,
        /// Points of the coarsest torus grid.
        #[arg(long, default_value_t = 1024)]
        grid_points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Out,
    },
    /// Non-cyclicity certificate for f from a measure on its zero set.
    Certificate {
        #[command(flatten)]
        space: Space,
        #[command(flatten)]
        func: Func,
        /// Measure JSON; defaults to the model torus when --model-m is given.
        #[arg(long)]
        measure: Option<PathBuf>,
        #[arg(long, default_value_t = 4000)]
        terms: u32,
        #[command(flatten)]
        out: Out,
    },
    /// Run the built-in invariant checks.
    Verify {
        /// Smaller sample sizes and ranges.
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct Space {
    /// Dimension n of the ball.
    #[arg(long)]
    n: usize,
    /// Space parameter α.
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Func {
    /// Polynomial as series JSON.
    #[arg(long)]
    poly: Option<PathBuf>,
    /// Use the model polynomial 1 − m^{m/2} z_1⋯z_m.
    #[arg(long = "model-m")]
    model_m: Option<usize>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Measure {
    /// Measure JSON.
    #[arg(long)]
    measure: Option<PathBuf>,
    /// Use the model torus of 1 − m^{m/2} z_1⋯z_m.
    #[arg(long = "model-m")]
    model_m: Option<usize>,
}

#[derive(Debug, Args)]
struct Out {
    /// Write here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Tables default to CSV and verdicts to JSON.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl Func {
    fn load(&self, n: usize) -> CliResult<CoeffSeries> {
        match (&self.poly, self.model_m) {
            (Some(p), _) => {
                let f = io::load_poly(p)?;
                if f.dim() != n {
                    return Err(CliError::Parse(format!("polynomial has dimension {}, --n is {n}", f.dim())));
                }
                Ok(f)
            }
            (None, Some(m)) => Ok(model_polynomial(&ModelPolynomialSpec::new(n, m)?)),
            (None, None) => unreachable!("clap requires one source"),
        }
    }
}

impl Measure {
    fn load(&self, n: usize) -> CliResult<SphereMeasure> {
        let mu = match (&self.measure, self.model_m) {
            (Some(p), _) => io::load_measure(p)?,
            (None, Some(m)) => SphereMeasure::model_torus(n, m)?,
            (None, None) => unreachable!("clap requires one source"),
        };
        if mu.dim() != n {
            return Err(CliError::Parse(format!("measure has dimension {}, --n is {n}", mu.dim())));
        }
        Ok(mu)
    }
}

fn params(space: &Space) -> CliResult<SpaceParams> {
    Ok(SpaceParams::new(space.n, space.alpha)?)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Norm {
            space,
            func,
            samples,
            seed,
            out,
        } => {
            let p = params(&space)?;
            let f = func.load(p.n)?;
            let report = norms::norm_sq(&p, &f)?;
            let mc = samples.map(|s| mc_integral_norm(&p, &f, s, seed)).transpose()?;
            let mut sink = Sink::open(out.output.as_deref())?;
            match out.format {
                None => sink.line(&num(report.value))?,
                Some(Format::Csv) => {
                    let mut header = vec!["norm_sq"];
                    let mut row = vec![num(report.value)];
                    if let Some(e) = &mc {
                        header.extend(["integral_seminorm_sq", "std_err"]);
                        row.extend([num(e.mean[0]), num(e.std_err[0])]);
                    }
                    sink.csv(&header, &[row])?
                }
                Some(Format::Json) => sink.json(&json!({
                    "n": p.n,
                    "alpha": p.alpha,
                    "norm": report,
                    "integral_seminorm_sq": mc.as_ref().map(|e| json!({"mean": e.mean[0], "std_err": e.std_err[0], "samples": e.samples})),
                }))?,
            }
            sink.finish()
        }
        Command::Approximant {
            space,
            func,
            order,
            out,
        } => {
            let p = params(&space)?;
            let f = func.load(p.n)?;
            let r = approximant::solve(&p, &f, order)?;
            let mut sink = Sink::open(out.output.as_deref())?;
            match out.format {
                Some(Format::Csv) => {
                    let rows: Vec<Vec<String>> = r
                        .coeffs
                        .iter()
                        .map(|(k, c)| vec![k.to_string(), num(c.re), num(c.im)])
                        .collect();
                    sink.csv(&["k", "re", "im"], &rows)?;
                    eprintln!("dist_sq = {}", r.dist_sq);
                }
                _ => sink.line(&r.to_json())?,
            }
            sink.finish()
        }
        Command::Decay {
            space,
            func,
            orders,
            out,
        } => {
            let p = params(&space)?;
            let f = func.load(p.n)?;
            let list: Vec<u32> = (orders.0..=orders.1).collect();
            let rows = decay_sweep(&p, &f, &list)?;
            // β for the model diagonal; for a general f the power-law fit uses β = α − n + 1
            let m = func.model_m.unwrap_or(1);
            let beta = beta_of_alpha(p.alpha, p.n, m);
            let fit = if rows.len() >= 3 { Some(fit_decay(&rows, beta)?) } else { None };
            let slopes = running_slopes(&rows);
            let mut sink = Sink::open(out.output.as_deref())?;
            match out.format {
                Some(Format::Json) => sink.json(&json!({"beta": beta, "rows": rows, "fit": fit}))?,
                _ => {
                    let table: Vec<Vec<String>> = rows
                        .iter()
                        .zip(&slopes)
                        .map(|(r, s)| vec![r.order.to_string(), num(r.dist_sq), opt(*s)])
                        .collect();
                    sink.csv(&["N", "dist_sq", "fitted_running_slope"], &table)?;
                    if let Some(fit) = &fit {
                        eprintln!("fit: {}", serde_json::to_string(fit).expect("fit serializes"));
                    }
                }
            }
            sink.finish()
        }
        Command::Dilate {
            space,
            model_m,
            r_grid,
            tol,
            out,
        } => {
            let spec = ModelPolynomialSpec::new(space.n, model_m)?;
            let s = dilation::sweep(&spec, space.alpha, &r_grid, tol)?;
            let verdict = boundedness_verdict(&s).ok();
            let mut sink = Sink::open(out.output.as_deref())?;
            match out.format {
                Some(Format::Json) => sink.json(&json!({"sweep": s, "threshold": spec.threshold(), "boundedness": verdict}))?,
                _ => {
                    let table: Vec<Vec<String>> = s
                        .r_grid
                        .iter()
                        .zip(&s.norms)
                        .map(|(r, v)| vec![num(*r), num(1.0 - r), num(*v)])
                        .collect();
                    sink.csv(&["r", "one_minus_r", "norm_sq"], &table)?;
                    match &verdict {
                        Some(v) => eprintln!("{:?}: {}", v.verdict, v.note),
                        None => eprintln!("slope {:.4} (grid too short for a verdict)", s.fitted_exponent),
                    }
                }
            }
            sink.finish()
        }
        Command::Cauchy {
            space,
            measure,
            terms,
            out,
        } => {
            let mu = measure.load(space.n)?;
            let table = moments(&mu, terms)?;
            let t = cauchy_norm_terms(&table, space.n, space.alpha, terms)?;
            let verdict = cauchy_convergence_verdict(&t, None)?;
            let mut sink = Sink::open(out.output.as_deref())?;
            match out.format {
                Some(Format::Csv) => {
                    let rows: Vec<Vec<String>> =
                        t.iter().enumerate().map(|(k, v)| vec![k.to_string(), num(*v)]).collect();
                    sink.csv(&["k", "term"], &rows)?;
                    eprintln!("{verdict:?}");
                }
                _ => sink.json(&json!({"alpha": space.alpha, "terms": terms, "verdict": verdict}))?,
            }
            sink.finish()
        }
        Command::Energy {
            space,
            measure,
            samples,
            grid_points,
            seed,
            out,
        } => {
            let mu = measure.load(space.n)?;
            let scheme = match (samples, &mu) {
                (Some(_), _) | (None, SphereMeasure::PointCloud { .. }) => EnergyScheme::MonteCarlo {
                    samples: samples.unwrap_or(0),
                    seed,
                },
                (None, _) => EnergyScheme::TorusGrid {
                    base_points: grid_points,
                    refinements: 2,
                },
            };
            let e = riesz_energy(&mu, space.alpha, scheme)?;
            let mut sink = Sink::open(out.output.as_deref())?;
            match out.format {
                Some(Format::Csv) => {
                    let rows: Vec<Vec<String>> =
                        e.levels.iter().map(|l| vec![l.points.to_string(), num(l.value)]).collect();
                    sink.csv(&["points", "energy"], &rows)?;
                    eprintln!("{:?}", e.status);
                }
                _ => sink.json(&e)?,
            }
            sink.finish()
        }
        Command::Certificate {
            space,
            func,
            measure,
            terms,
            out,
        } => {
            let f = func.load(space.n)?;
            let mu = match (&measure, func.model_m) {
                (Some(path), _) => io::load_measure(path)?,
                (None, Some(m)) => SphereMeasure::model_torus(space.n, m)?,
                (None, None) => return Err(CliError::Parse("--poly needs --measure".into())),
            };
            let opts = CertificateOptions {
                cauchy_terms: terms,
                ..Default::default()
            };
            let r = noncyclicity_certificate(&f, &mu, space.alpha, &opts)?;
            let mut sink = Sink::open(out.output.as_deref())?;
            sink.line(&r.to_json())?;
            sink.finish()
        }
        Command::Verify { quick, seed } => {
            let failed = verify::run(quick, seed);
            if failed > 0 {
                return Err(CliError::Verify { failed });
            }
            Ok(())
        }
    }
}

fn init_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("DIRICHLET_LAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = v
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Parse(format!("DIRICHLET_LAB_THREADS={v} is not a positive integer")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Parse(e.to_string()))?;
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_threads().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
