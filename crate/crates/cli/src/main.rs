//! `sullivan`: homology tables, verification suites and class certificates
//! for spaces of Sullivan diagrams.

mod classes;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sullivan_core::complex::cache::{load_or_build, CacheOutcome};
use sullivan_core::complex::{BuildOptions, DEFAULT_BUDGET};
use sullivan_core::verify::VerifyError;
use sullivan_core::{build_complex, ChainComplex, ComplexError, Component, Flavor, HomologyError, OpsError};

#[derive(Parser)]
#[command(name = "sullivan", version, about = "Integral homology of spaces of Sullivan diagrams")]
struct Cli {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-degree Betti numbers and torsion of one component.
    Homology(RunSpec),
    /// Structural checks on one component; exits 5 if any check fails.
    Verify(RunSpec),
    /// Builds a named class and certifies its stated properties.
    Classes(classes::ClassSpec),
}

#[derive(Args, Clone)]
struct RunSpec {
    #[arg(long, value_parser = parse_flavor)]
    flavor: Flavor,
    #[arg(short = 'g', default_value_t = 0)]
    genus: usize,
    #[arg(short = 'm')]
    leaves: usize,
    /// Stop enumerating above this degree.
    #[arg(long)]
    max_degree: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Read and write built complexes here.
    #[arg(long, env = "SULLIVAN_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Abort once enumeration exceeds this many cells.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget_cells: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    /// One line, `Z,0,C2,…`.
    Row,
}

fn parse_flavor(s: &str) -> Result<Flavor, String> {
    s.parse().map_err(|e: sullivan_core::DiagramError| e.to_string())
}

/// An error with its exit code.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_VALIDATION: u8 = 4;
pub const EXIT_VERIFICATION: u8 = 5;
pub const EXIT_CACHE: u8 = 6;
const EXIT_INTERNAL: u8 = 1;

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Failure::new(EXIT_VALIDATION, message)
    }
}

impl From<ComplexError> for Failure {
    fn from(e: ComplexError) -> Self {
        let code = match e {
            ComplexError::Budget { .. } => EXIT_BUDGET,
            ComplexError::Cache(_) => EXIT_CACHE,
            ComplexError::Diagram(_) => EXIT_VALIDATION,
            ComplexError::Closure { .. } | ComplexError::NotChainComplex(_) => EXIT_INTERNAL,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<HomologyError> for Failure {
    fn from(e: HomologyError) -> Self {
        match e {
            HomologyError::Complex(c) => c.into(),
            e => Failure::new(EXIT_INTERNAL, e.to_string()),
        }
    }
}

impl From<OpsError> for Failure {
    fn from(e: OpsError) -> Self {
        match e {
            OpsError::Complex(c) => c.into(),
            e => Failure::validation(e.to_string()),
        }
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Complex(c) => c.into(),
            VerifyError::Homology(h) => h.into(),
            VerifyError::Ops(o) => o.into(),
            VerifyError::Morse(m) => Failure::new(EXIT_INTERNAL, m.to_string()),
        }
    }
}

impl RunSpec {
    fn component(&self) -> Result<Component, Failure> {
        if self.leaves == 0 {
            return Err(Failure::validation("-m must be at least 1"));
        }
        Ok(Component::new(self.flavor, self.genus, self.leaves))
    }

    fn options(&self) -> BuildOptions {
        BuildOptions { max_degree: self.max_degree, budget: self.budget_cells }
    }

    /// Builds the component, going through the cache when one is configured.
    fn complex(&self) -> Result<ChainComplex, Failure> {
        let c = self.component()?;
        match &self.cache_dir {
            Some(dir) => {
                let (cx, outcome) = load_or_build(dir, c, self.options())?;
                if outcome == CacheOutcome::Hit {
                    eprintln!("cache hit: {}", dir.display());
                }
                Ok(cx)
            }
            None => Ok(build_complex(c, self.options())?),
        }
    }
}

/// Output text and the names of failed checks.
pub struct Report {
    pub text: String,
    pub failed: Vec<String>,
}

impl Report {
    pub fn ok(text: String) -> Self {
        Report { text, failed: Vec::new() }
    }
}

fn run(cli: Cli) -> Result<Report, Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::validation(format!("--threads: {e}")))?;
    }
    match cli.command {
        Command::Homology(spec) => {
            let c = spec.complex()?;
            let h = sullivan_core::homology(&c)?;
            Ok(Report::ok(output::homology_table(&c, &h, spec.format)))
        }
        Command::Verify(spec) => {
            let c = spec.complex()?;
            let checks = output::verify_checks(&c, &spec.options())?;
            let failed = checks.iter().filter(|k| !k.pass).map(|k| k.name.clone()).collect();
            Ok(Report { text: output::checks(&c, &checks, spec.format), failed })
        }
        Command::Classes(spec) => classes::run(&spec),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(report) => {
            print!("{}", report.text);
            if report.failed.is_empty() {
                ExitCode::SUCCESS
            } else {
                eprintln!("failed: {}", report.failed.join(", "));
                ExitCode::from(EXIT_VERIFICATION)
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
