use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lean_pet::config::{ProtocolKind, RunConfig, SweepAxis};
use lean_pet::output::{format_number, write_atomic, Provenance};
use lean_pet::protocols::{self, Report};
use lean_pet::scaling::compute_small_signal_groups;
use lean_pet::Error;

#[derive(Parser)]
#[command(name = "lean-pet", version, about = "Lean porous electrode model: analytic solutions, reference solver and fitting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the protocol selected in the config.
    Run {
        config: PathBuf,
        /// Override a config value: `key=value` or `section.key=value`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Output directory (overrides run.output).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Analytic-vs-reference RMSE over a grid of C-rate, σ_s and c_l,ref.
    Sweep {
        config: PathBuf,
        /// Sweep axis `name=v1,v2,...` with name rate, solid_conductivity or
        /// electrolyte_concentration. Defaults to the [sweep] section.
        #[arg(long = "axis", value_name = "NAME=VALUES")]
        axes: Vec<String>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print the dimensionless groups of a config.
    Groups {
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Check a config without running anything.
    Validate {
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Numerical { .. } | Error::OutOfRange { .. } | Error::DisjointRanges => 3,
        _ => 2,
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("LEANPET_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("LEANPET_THREADS must be a positive integer, got '{raw}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn write_report(config: &RunConfig, dir: &Path, report: &Report) -> lean_pet::Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let provenance = Provenance::new(&config.text, config.seed);
    for artifact in &report.artifacts {
        let path = dir.join(&artifact.file_name);
        write_atomic(&path, &artifact.table.render(&provenance))?;
        println!("wrote {}", path.display());
    }
    let mut summary = provenance.comment_line();
    summary.push('\n');
    summary.push_str(&format!("protocol: {}\n", config.protocol.name()));
    for line in &report.summary {
        summary.push_str(line);
        summary.push('\n');
    }
    let path = dir.join("summary.txt");
    write_atomic(&path, &summary)?;
    print!("{}", summary.split_once('\n').map_or("", |(_, rest)| rest));
    Ok(())
}

fn run(cli: Cli) -> lean_pet::Result<()> {
    match cli.command {
        Command::Run { config, overrides, output } => {
            let cfg = RunConfig::load(&config, &overrides)?;
            let report = protocols::execute(&cfg)?;
            write_report(&cfg, output.as_deref().unwrap_or(&cfg.output), &report)
        }
        Command::Sweep {
            config,
            axes,
            overrides,
            output,
        } => {
            let mut cfg = RunConfig::load(&config, &overrides)?;
            cfg.protocol = ProtocolKind::Sweep;
            let axes = if axes.is_empty() {
                cfg.sweep.clone()
            } else {
                let parsed = axes.iter().map(|a| SweepAxis::parse(a)).collect::<lean_pet::Result<Vec<_>>>()?;
                if parsed.len() > 3 {
                    return Err(Error::InvalidParameter {
                        name: "axis",
                        reason: "at most three axes".into(),
                    });
                }
                parsed
            };
            let report = protocols::sweep(&cfg, &axes)?;
            write_report(&cfg, output.as_deref().unwrap_or(&cfg.output), &report)
        }
        Command::Groups { config, overrides } => {
            let cfg = RunConfig::load(&config, &overrides)?;
            let mut rates = cfg.discharge.rates.clone();
            if rates.is_empty() {
                rates.push(1.0);
            }
            println!("{:>8} {:>16} {:>16} {:>16} {:>16} {:>16} {:>16} {:>16}", "rate", "Da", "Da_p", "Da_w", "Da_w_sigma", "Da_w_kappa", "Da_c", "tau_l");
            for rate in rates {
                let g = protocols::groups_at(&cfg, rate)?;
                println!(
                    "{:>8} {:>16} {:>16} {:>16} {:>16} {:>16} {:>16} {:>16}",
                    format!("{rate}C"),
                    format_number(g.da),
                    format_number(g.da_p),
                    format_number(g.da_w),
                    format_number(g.da_w_sigma),
                    format_number(g.da_w_kappa),
                    format_number(g.da_c),
                    format_number(g.tau_l)
                );
            }
            let s = compute_small_signal_groups(&cfg.cell, cfg.kinetics.j0)?;
            println!(
                "small-signal (t_p = 1 s): Da_w = {} Da_p = {} Da_c = {}",
                format_number(s.da_w),
                format_number(s.da_p),
                format_number(s.da_c)
            );
            Ok(())
        }
        Command::Validate { config, overrides } => {
            let cfg = RunConfig::load(&config, &overrides)?;
            println!("{}: ok (protocol {})", config.display(), cfg.protocol.name());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
