//! `cubecar`: run inequality checks on the discrete cube and the CAR algebra.

mod config;
mod output;

use std::io::Write;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use cubecar::par::Execution;
use cubecar::spectral::{constant_k_alpha, constant_k_beta};
use cubecar::verify::{riesz_table, Report, Request, Verifier, THEOREM_IDS};

use config::{Flags, Format, RunConfig};

fn ids_help() -> String {
    let mut s = String::from("Theorem ids:\n");
    for (id, what) in THEOREM_IDS {
        s.push_str(&format!("  {id:<18} {what}\n"));
    }
    s.push_str("\nExit status: 0 when no check fails, 1 when a check fails, 2 on usage, input or I/O errors.");
    s
}

fn theorem_id(s: &str) -> Result<String, String> {
    if THEOREM_IDS.iter().any(|(id, _)| *id == s) {
        Ok(s.to_string())
    } else {
        Err(format!("unknown theorem id `{s}`; see --help for the list"))
    }
}

#[derive(Parser)]
#[command(name = "cubecar", version, about = "Numerical checks of dimension-free inequalities on the cube and the CAR algebra", after_help = ids_help())]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one check and print its report.
    #[command(after_help = ids_help())]
    Verify {
        #[arg(value_parser = theorem_id)]
        theorem: String,
        #[command(flatten)]
        flags: Flags,
    },
    /// Tabulate the constants K_alpha and k_beta.
    Constants {
        /// Exponents alpha in (0, 1/2), comma separated.
        #[arg(long, value_delimiter = ',')]
        alpha: Vec<f64>,
        /// Exponents beta > 1/2, comma separated.
        #[arg(long, value_delimiter = ',')]
        beta: Vec<f64>,
        #[arg(long, default_value = "text")]
        format: String,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Run several checks with shared settings.
    #[command(after_help = ids_help())]
    Sweep {
        /// Theorem ids, comma separated; all of them when omitted.
        #[arg(long, value_delimiter = ',', value_parser = theorem_id)]
        theorems: Vec<String>,
        #[command(flatten)]
        flags: Flags,
    },
    /// Growth of the gradient to Lap^beta ratio along Riesz products.
    Riesz {
        #[command(flatten)]
        flags: Flags,
    },
}

fn verifier(cfg: &RunConfig) -> Verifier {
    Verifier {
        c: cfg.c,
        exec: if cfg.sequential { Execution::Sequential } else { Execution::Parallel },
        alpha: cfg.alpha,
        slack: cfg.slack,
        ..Verifier::default()
    }
}

fn emit(text: &str, out: Option<&std::path::Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn status(reports: &[Report]) -> ExitCode {
    if reports.iter().any(Report::fails_run) {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Verify { theorem, flags } => {
            let cfg = flags.resolve()?;
            let report = verifier(&cfg).run(&cfg.request(&theorem))?;
            let reports = [report];
            emit(&output::reports(&reports, cfg.format)?, cfg.out.as_deref())?;
            Ok(status(&reports))
        }
        Command::Constants { alpha, beta, format, out } => {
            let format = Format::parse(&format)?;
            let (alpha, beta) = if alpha.is_empty() && beta.is_empty() { (vec![0.25], vec![0.75]) } else { (alpha, beta) };
            let mut rows = Vec::new();
            for a in alpha {
                rows.push(("K_alpha", a, constant_k_alpha(a)?));
            }
            for b in beta {
                rows.push(("k_beta", b, constant_k_beta(b)?));
            }
            emit(&output::constants(&rows, format)?, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { theorems, flags } => {
            let cfg = flags.resolve()?;
            let ids: Vec<String> = if theorems.is_empty() {
                THEOREM_IDS.iter().map(|(id, _)| id.to_string()).collect()
            } else {
                theorems
            };
            let v = verifier(&cfg);
            let mut reports = Vec::new();
            let mut errors = Vec::new();
            for id in &ids {
                match v.run(&cfg.request(id)) {
                    Ok(r) => reports.push(r),
                    Err(e) => errors.push(format!("{id}: {e}")),
                }
            }
            emit(&output::reports(&reports, cfg.format)?, cfg.out.as_deref())?;
            if !errors.is_empty() {
                bail!("{} check(s) could not run:\n  {}", errors.len(), errors.join("\n  "));
            }
            Ok(status(&reports))
        }
        Command::Riesz { flags } => {
            let cfg = flags.resolve()?;
            let mut req: Request = cfg.request("riesz");
            req.space = cubecar::norms::FunctionSpace::lp(cfg.p)?;
            let report = verifier(&cfg).run(&req)?;
            let text = match cfg.format {
                Format::Text => output::riesz_text(&riesz_table(cfg.n_max, cfg.p, cfg.beta)?, &report),
                f => output::reports(std::slice::from_ref(&report), f)?,
            };
            emit(&text, cfg.out.as_deref())?;
            Ok(status(&[report]))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
