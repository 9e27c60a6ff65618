use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zptower_cli::commands::{
    cmd_compute, cmd_export, cmd_fit, cmd_info, cmd_scan, cmd_verify, error_exit_code, ExportFormat, FitInput, Outcome,
};
use zptower_cli::compute::{ComputeOptions, DataDir};

#[derive(Debug, Parser)]
#[command(name = "zptower", version, about = "Cartier operator kernels on Z_p-towers of curves")]
struct Args {
    /// Results store and caches.
    #[arg(long, env = "ZPTOWER_DATA", default_value = "zptower-data", global = true)]
    data_dir: PathBuf,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ramification breaks, genera and closed forms.
    Info {
        spec: PathBuf,
        #[arg(long, default_value_t = 4)]
        levels: usize,
        #[arg(long)]
        json: bool,
    },
    /// Cartier matrices and kernel dimensions of V^r.
    Compute {
        spec: PathBuf,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        #[arg(long, default_value_t = 1)]
        powers: usize,
        #[arg(long)]
        force: bool,
        #[arg(long)]
        json: bool,
    },
    /// Exact fit of stored (or given) kernel dimensions.
    Fit {
        /// Spec whose stored results are fitted.
        #[arg(required_unless_present = "values")]
        spec: Option<PathBuf>,
        /// Comma-separated a^(r) for levels 1, 2, ...
        #[arg(long, value_delimiter = ',', requires_all = ["p", "d"])]
        values: Option<Vec<i64>>,
        #[arg(long)]
        p: Option<u32>,
        #[arg(long)]
        d: Option<u64>,
        #[arg(long, default_value_t = 1)]
        power: u32,
        #[arg(long)]
        json: bool,
    },
    /// Compute every *.toml spec in a directory.
    Scan {
        dir: PathBuf,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        #[arg(long, default_value_t = 1)]
        powers: usize,
        #[arg(long)]
        force: bool,
    },
    /// Recompute bundled reference values.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
    },
    /// Dump the latest stored records.
    Export {
        #[arg(long, value_enum, default_value = "csv")]
        format: ExportFormat,
        #[arg(long)]
        spec_hash: Option<String>,
    },
}

fn run(args: Args) -> anyhow::Result<Outcome> {
    let data = DataDir::new(&args.data_dir);
    let mut out = io::stdout().lock();
    match args.cmd {
        Command::Info { spec, levels, json } => cmd_info(&spec, levels, json, &mut out),
        Command::Compute { spec, levels, powers, force, json } => {
            cmd_compute(&spec, &ComputeOptions { levels, powers, force }, &data, json, &mut out)
        }
        Command::Fit { spec, values, p, d, power, json } => {
            if power == 0 {
                anyhow::bail!("--power must be at least 1");
            }
            let input = match (values, spec) {
                (Some(values), _) => FitInput::Values { values, p: p.unwrap_or(2), d: d.unwrap_or(1) },
                (None, Some(path)) => FitInput::Spec(path),
                (None, None) => unreachable!("clap requires one of them"),
            };
            cmd_fit(input, power, &data, json, &mut out)
        }
        Command::Scan { dir, levels, powers, force } => {
            cmd_scan(&dir, &ComputeOptions { levels, powers, force }, &data, &mut out)
        }
        Command::Verify { suite } => cmd_verify(&suite, &mut out),
        Command::Export { format, spec_hash } => cmd_export(format, spec_hash.as_deref(), &data, &mut out),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Mismatch) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(error_exit_code(&e))
        }
    }
}
