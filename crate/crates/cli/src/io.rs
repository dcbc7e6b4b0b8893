use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use dirichlet_lab::capacity::SphereMeasure;
use dirichlet_lab::CoeffSeries;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Numeric(#[from] dirichlet_lab::Error),
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: io::Error },
    #[error("{failed} verification check(s) failed")]
    Verify { failed: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Parse(_) => 2,
            Self::Numeric(_) | Self::Output { .. } => 3,
            Self::Verify { .. } => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))
}

pub fn load_poly(path: &Path) -> CliResult<CoeffSeries> {
    CoeffSeries::from_json(&read(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn load_measure(path: &Path) -> CliResult<SphereMeasure> {
    SphereMeasure::from_json(&read(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

/// `a:b` inclusive.
pub fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once(':').ok_or("expected a:b")?;
    let a: u32 = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
    let b: u32 = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
    if a > b {
        return Err(format!("empty range {a}:{b}"));
    }
    Ok((a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Stdout or a file; everything is buffered and flushed on `finish`.
pub struct Sink {
    path: Option<PathBuf>,
    out: Box<dyn Write>,
}

impl Sink {
    pub fn open(path: Option<&Path>) -> CliResult<Self> {
        let out: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::Output {
                path: p.display().to_string(),
                source: e,
            })?)),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Self {
            path: path.map(Path::to_path_buf),
            out,
        })
    }

    fn err(&self, source: io::Error) -> CliError {
        CliError::Output {
            path: self.path.as_ref().map_or("stdout".into(), |p| p.display().to_string()),
            source,
        }
    }

    pub fn line(&mut self, s: &str) -> CliResult<()> {
        writeln!(self.out, "{s}").map_err(|e| self.err(e))
    }

    pub fn json<T: Serialize>(&mut self, value: &T) -> CliResult<()> {
        let text = serde_json::to_string_pretty(value).expect("output serializes");
        self.line(&text)
    }

    /// Header plus rows; floats use the shortest round-trip form.
    pub fn csv(&mut self, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).expect("in-memory csv");
        for r in rows {
            w.write_record(r).expect("in-memory csv");
        }
        let bytes = w.into_inner().expect("in-memory csv");
        self.out.write_all(&bytes).map_err(|e| self.err(e))
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.out.flush().map_err(|e| self.err(e))
    }
}

pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}
