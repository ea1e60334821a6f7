use std::path::PathBuf;

use clap::{Parser, Subcommand};
use vibes_core::psych::{import_session, session_to_json};
use vibes_core::stats::Link;

use crate::commands::{self, ObserverChoice, SimulateOptions};
use crate::config::WorkbenchConfig;
use crate::error::Result;

#[derive(Debug, Parser)]
#[command(name = "vibes", version, about = "Vibrotactile texture workbench")]
pub struct Cli {
    /// Workbench TOML config; defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_link(s: &str) -> std::result::Result<Link, String> {
    s.parse().map_err(|e: vibes_core::Error| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a simulated 2AFC session and write its log.
    Simulate {
        #[arg(long, value_enum, default_value = "analytic")]
        observer: ObserverChoice,
        #[arg(long, value_parser = parse_link, default_value = "logit")]
        link: Link,
        #[arg(long, default_value_t = -2.326, allow_hyphen_values = true)]
        beta0: f64,
        #[arg(long, default_value_t = 0.01701, allow_hyphen_values = true)]
        beta1: f64,
        #[arg(long, default_value_t = 0.3)]
        sigma: f64,
        /// Observer seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        plan_seed: Option<u64>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        participant: Option<String>,
        #[arg(long, default_value = "")]
        condition: String,
        /// Session log path; stdout when omitted.
        #[arg(long)]
        trials_out: Option<PathBuf>,
    },
    /// Fit a psychometric function to a session log.
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_parser = parse_link, default_value = "logit")]
        link: Link,
        /// Bootstrap resamples; 0 skips the confidence intervals.
        #[arg(long)]
        bootstrap: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit every session log in a directory, per session and pooled.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_parser = parse_link, default_value = "logit")]
        link: Link,
        #[arg(long)]
        bootstrap: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Synthesize the stimulus library.
    Textures {
        #[arg(long, value_delimiter = ',', default_value = "P60,P80,P120,P220,P1000")]
        grits: Vec<String>,
        #[arg(long, default_value_t = 2)]
        per_grit: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve the HTTP session API.
    Serve {
        #[arg(long)]
        port: Option<u16>,
    },
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => commands::write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let mut cfg = WorkbenchConfig::load_or_default(cli.config.as_deref())?;
    match cli.command {
        Command::Simulate {
            observer,
            link,
            beta0,
            beta1,
            sigma,
            seed,
            plan_seed,
            reps,
            participant,
            condition,
            trials_out,
        } => {
            let defaults = SimulateOptions::from_config(&cfg);
            let opts = SimulateOptions {
                observer,
                link,
                beta0,
                beta1,
                sigma,
                seed: seed.unwrap_or(defaults.seed),
                plan_seed: plan_seed.unwrap_or(defaults.plan_seed),
                reps: reps.unwrap_or(defaults.reps),
                participant,
                condition,
            };
            let log = commands::simulate(&cfg, &opts)?;
            emit(trials_out.as_ref(), &session_to_json(&log))
        }
        Command::Fit {
            input,
            link,
            bootstrap,
            seed,
            out,
        } => {
            let log = crate::error::with_path(&input, import_session(&input))?;
            let report = commands::fit_log(
                &log,
                link,
                bootstrap.unwrap_or(cfg.bootstrap_resamples),
                seed.unwrap_or(cfg.seeds.bootstrap),
            )?;
            emit(out.as_ref(), &commands::to_json(&report))
        }
        Command::Report {
            input,
            out,
            link,
            bootstrap,
            seed,
        } => {
            let report = commands::build_report(
                &input,
                link,
                bootstrap.unwrap_or(cfg.bootstrap_resamples),
                seed.unwrap_or(cfg.seeds.bootstrap),
            )?;
            commands::write_text(&out, &commands::to_json(&report))
        }
        Command::Textures {
            grits,
            per_grit,
            out,
        } => {
            let manifest = commands::write_textures(&cfg, &grits, per_grit, &out)?;
            eprintln!("wrote {} stimuli to {}", manifest.len(), out.display());
            Ok(())
        }
        Command::Serve { port } => {
            if let Some(p) = port {
                cfg.service.port = p;
            }
            let rt = tokio::runtime::Runtime::new()
                .map_err(|e| crate::error::WorkbenchError::io(std::path::Path::new("tokio"), e))?;
            eprintln!("listening on port {}", cfg.service.port);
            rt.block_on(crate::service::serve(&cfg))
        }
    }
}
