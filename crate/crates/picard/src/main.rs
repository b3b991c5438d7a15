use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use picard::{parse_suites, RunConfig, DEFAULT_SEED, SUPPORTED_D};

#[derive(Parser)]
#[command(
    name = "picard",
    version,
    about = "Exact verification of generators, cosets, stabilizers and sphere coverage for the sister Picard groups"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run verification suites and write a report.
    Verify {
        /// Fields to check (repeat or comma-separate); default all.
        #[arg(long = "d", value_delimiter = ',')]
        ds: Vec<u32>,
        /// membership, cosets, stabilizer, relators, spheres, coverage or all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 40)]
        resolution: usize,
        #[arg(long, default_value_t = DEFAULT_SEED, value_parser = parse_seed)]
        seed: u64,
        /// Treat discrepancies as failures.
        #[arg(long)]
        strict: bool,
        /// Samples per star-union cell.
        #[arg(long, default_value_t = 20_000)]
        union_samples: usize,
        /// Words per coset corpus.
        #[arg(long, default_value_t = 500)]
        corpus_size: usize,
        /// Report path; stdout when absent.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Also write a text summary here.
        #[arg(long)]
        summary: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Write spheres, prisms, cells and coverage samples as JSON.
    ExportGeometry {
        #[arg(long = "d")]
        d: u32,
        #[arg(long, short)]
        out: PathBuf,
        /// Grid resolution for the coverage summary; 0 skips it.
        #[arg(long, default_value_t = 40)]
        resolution: usize,
    },
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let r = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(h) => u64::from_str_radix(h, 16),
        None => s.parse(),
    };
    r.map_err(|e| e.to_string())
}

fn write_out(path: Option<&PathBuf>, body: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn execute(cmd: Cmd) -> Result<i32> {
    match cmd {
        Cmd::Verify { ds, suite, resolution, seed, strict, union_samples, corpus_size, out, summary, format } => {
            let cfg = RunConfig {
                ds: if ds.is_empty() { SUPPORTED_D.to_vec() } else { ds },
                suites: parse_suites(&suite)?,
                resolution,
                seed,
                strict,
                union_samples,
                corpus_size,
                ..RunConfig::default()
            };
            let report = picard::run(&cfg)?;
            let body = match format {
                Format::Json => picard::to_json(&report)?,
                Format::Text => picard::to_text(&report),
            };
            write_out(out.as_ref(), &body)?;
            if let Some(p) = summary {
                write_out(Some(&p), &picard::to_text(&report))?;
            }
            let s = report.summary;
            eprintln!("{} claims: {} pass, {} fail, {} discrepancy", s.total(), s.pass, s.fail, s.discrepancy);
            Ok(report.exit_code())
        }
        Cmd::ExportGeometry { d, out, resolution } => {
            if !SUPPORTED_D.contains(&d) {
                anyhow::bail!("unsupported d = {d}; expected one of 2, 7, 11");
            }
            let g = picard::export_geometry(d, resolution)?;
            let mut body = serde_json::to_string_pretty(&g)?;
            body.push('\n');
            write_out(Some(&out), &body)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.cmd) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
