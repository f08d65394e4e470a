mod body;
mod commands;
mod output;
mod parse;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mongefoil_core::Error as CoreError;

#[derive(Debug, Parser)]
#[command(name = "mongefoil", version, about = "Extremal disks, Robin functions and extremal functions of real convex bodies")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Newton stopping tolerance for leaf inversion.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Seed for randomized sampling (foliate, verify).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Exit with status 3 when any row fails.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Worker threads for batch evaluation (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Normalize the body to unit size before solving; results are reported
    /// in the original coordinates.
    #[arg(long, global = true)]
    pub rescale: bool,
    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extremal leaf for one direction at infinity (JSON).
    Extremal {
        body: PathBuf,
        /// Direction as "re,im re,im".
        #[arg(long, allow_hyphen_values = true)]
        dir: String,
        /// Use this center instead of the barycenter of the center set ("x,y,...").
        #[arg(long, allow_hyphen_values = true)]
        center: Option<String>,
    },
    /// Extremal function at points (CSV).
    Vk {
        body: PathBuf,
        /// A point as "re,im re,im"; repeatable.
        #[arg(long, allow_hyphen_values = true)]
        point: Vec<String>,
        /// File with one point per line.
        #[arg(long)]
        points: Option<PathBuf>,
        /// Grid such as "re1=-3:3:61,im1=0,re2=-3:3:61,im2=0.5".
        #[arg(long)]
        grid: Option<String>,
    },
    /// Robin function and boundary scale of directions (CSV).
    Robin {
        body: PathBuf,
        /// A direction as "re,im re,im"; repeatable.
        #[arg(long, allow_hyphen_values = true)]
        dir: Vec<String>,
        /// File with one direction per line.
        #[arg(long)]
        dirs: Option<PathBuf>,
    },
    /// Robin function on the complex plane s e1 + t e2 (CSV).
    IndicatrixSlice {
        body: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        e1: String,
        #[arg(long, allow_hyphen_values = true)]
        e2: String,
        /// Range "lo:hi:n" for s.
        #[arg(long, default_value = "-1:1:41", allow_hyphen_values = true)]
        s: String,
        /// Range "lo:hi:n" for t.
        #[arg(long, default_value = "-1:1:41", allow_hyphen_values = true)]
        t: String,
    },
    /// Difference body (K - K) / 2 (body JSON).
    Symmetrize { body: PathBuf },
    /// Sample barycentric leaves for seeded directions (JSON array).
    Foliate {
        body: PathBuf,
        #[arg(long, default_value_t = 16)]
        count: usize,
    },
    /// Run invariant checks; exit 0 iff all pass (JSON report).
    Verify {
        body: PathBuf,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Lp,
    Extremal,
    Robin,
    Vk,
    Foliation,
    All,
}

/// What a command produced and how the process should exit.
pub struct Outcome {
    pub text: String,
    pub code: u8,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<CoreError>()) {
        Some(CoreError::LpStatus(_) | CoreError::Convergence { .. }) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("MONGEFOIL_LOG", "warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = commands::run(&cli).and_then(|out| {
        match &cli.global.output {
            Some(path) => std::fs::write(path, &out.text)?,
            None => std::io::stdout().write_all(out.text.as_bytes())?,
        }
        Ok(out.code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
