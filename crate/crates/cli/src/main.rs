use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use coexist::engine::Policy;
use coexist_cli::{cmd_report, cmd_run, cmd_validate, parse_f64_list, parse_policies, parse_seeds, Failure, RateSelection, ReportSpec, RunSpec};

/// Proactive PRB blanking against LEO satellite interference.
///
/// Exit codes: 0 success, 2 scenario or usage error, 3 I/O error,
/// 4 internal invariant violated.
#[derive(Parser)]
#[command(name = "coexist", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the policy × seed × utilization grid and write CSV results.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        // fully qualified Vec: one flag value parses into the whole list
        /// Comma-separated subset of proposed,epa.
        #[arg(long, default_value = "proposed,epa", value_parser = parse_policies)]
        policy: ::std::vec::Vec<Policy>,
        /// Inclusive range (1..20) or comma list.
        #[arg(long, default_value = "1", value_parser = parse_seeds)]
        seeds: ::std::vec::Vec<u64>,
        /// Override the scenario's utilization grid (comma list).
        #[arg(long, value_parser = parse_f64_list)]
        utilization: Option<::std::vec::Vec<f64>>,
        /// Utilizations that get sum-rate evaluation: all, max, none or a list.
        #[arg(long, default_value = "all")]
        rate_utilization: RateSelection,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads.
        #[arg(long, env = coexist_cli::WORKERS_ENV)]
        workers: Option<usize>,
    },
    /// Summarise one or more result directories into tables and SVG plots.
    Report {
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
        /// Output directory (default: <first dir>/report).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Utilization whose sum rates are reported (default: the largest evaluated).
        #[arg(long)]
        utilization: Option<f64>,
    },
    /// Check a scenario file and list every default it relies on.
    Validate { path: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            scenario,
            policy,
            seeds,
            utilization,
            rate_utilization,
            out,
            workers,
        } => {
            let spec = RunSpec {
                scenario,
                policies: policy,
                seeds,
                utilizations: utilization,
                rates: rate_utilization,
                out,
                workers: workers.unwrap_or_else(coexist_cli::default_workers),
            };
            cmd_run(&spec).map(|m| {
                let rows: Vec<String> = m.files.iter().map(|f| format!("{} ({} rows)", f.name, f.rows)).collect();
                println!("wrote {}: {}", spec.out.display(), rows.join(", "));
            })
        }
        Command::Report { dirs, out, utilization } => {
            let spec = ReportSpec {
                out: out.unwrap_or_else(|| dirs[0].join("report")),
                dirs,
                utilization,
            };
            cmd_report(&spec).map(|r| print!("{}", r.render()))
        }
        Command::Validate { path } => cmd_validate(&path).map(|s| print!("{s}")),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report_failure(e),
    }
}

fn report_failure(e: Failure) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}
