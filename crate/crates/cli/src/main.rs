use std::path::{Path, PathBuf};
use std::process::ExitCode;

use boettcher_cli::{parse_config, run_command, Command, Outcome, Overrides, Report, Status};
use boettcher_core::numeric::{parse_rational, Rational};
use clap::Parser;

#[derive(Debug, Parser)]
#[command(name = "boettcher", version, about = "Böttcher coordinates for polynomial correspondences")]
struct Args {
    command: Command,
    #[arg(long)]
    config: Option<PathBuf>,
    /// JSON report path; CSV tables go next to it with a `.csv` extension.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = rational)]
    weight: Option<Rational>,
    #[arg(long)]
    prime: Option<u64>,
    #[arg(long)]
    prec: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    levels: Option<u32>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    e: Option<u64>,
    #[arg(long)]
    d: Option<u64>,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    alpha0: Option<Rational>,
    #[arg(long)]
    steps: Option<usize>,
    /// Extra seeded random correspondences checked by `verify-formal`.
    #[arg(long)]
    batch: Option<usize>,
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn write_outputs(out: Option<&Path>, report: &Report, csv: Option<&str>) -> std::io::Result<()> {
    let json = report.to_json_string();
    match out {
        Some(path) => {
            std::fs::write(path, json)?;
            if let Some(csv) = csv {
                std::fs::write(path.with_extension("csv"), csv)?;
            }
        }
        None => print!("{json}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(Status::Error.exit_code() as u8);
        }
    };
    let flags = Overrides {
        prime: args.prime,
        weight: args.weight.clone(),
        prec: args.prec,
        seed: args.seed,
        levels: args.levels,
        jobs: args.jobs,
        e: args.e,
        d: args.d,
        alpha0: args.alpha0.clone(),
        steps: args.steps,
        batch: args.batch,
    };
    let text = match &args.config {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(t) => t,
            Err(e) => {
                let outcome = Outcome::failure("io_error", format!("{}: {e}", p.display()));
                return finish(&args, Report::new(Some(args.command), None, &outcome), None);
            }
        },
        None => String::new(),
    };
    let resolved = parse_config(&text).and_then(|c| c.resolve(args.command, &flags));
    let (report, csv) = match resolved {
        Ok(config) => {
            let outcome = run_command(args.command, &config);
            (Report::new(Some(args.command), Some(config), &outcome), outcome.csv)
        }
        Err(e) => {
            let outcome = Outcome::failure(e.code(), e.to_string());
            (Report::new(Some(args.command), None, &outcome), None)
        }
    };
    finish(&args, report, csv.as_deref())
}

fn finish(args: &Args, report: Report, csv: Option<&str>) -> ExitCode {
    if let Some(err) = &report.error {
        eprintln!("{}: {}", err.code, err.message);
    }
    let code = report.exit_code;
    if let Err(e) = write_outputs(args.out.as_deref(), &report, csv) {
        eprintln!("io_error: {e}");
        return ExitCode::from(Status::Error.exit_code() as u8);
    }
    ExitCode::from(code as u8)
}
