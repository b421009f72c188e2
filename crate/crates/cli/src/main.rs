// Copyright 2026 The afqw Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::path::PathBuf;
use std::process::ExitCode;

use afqw_cli::commands;
use afqw_cli::config::{RunConfig, SuperpositionMode};
use afqw_cli::error::{CliError, Result};
use afqw_cli::verify::{self, VerifyOptions};
use afqw_core::catalog::PointLabel;
use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "afqw", version, about = "Flux-controlled anomalous Floquet quantum walk")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// JSON run configuration; missing fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for the data-parallel sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Topological phase map over (M, φ).
    PhaseMap {
        #[arg(long)]
        n_m: Option<usize>,
        #[arg(long)]
        n_phi: Option<usize>,
        #[arg(long)]
        n_k: Option<usize>,
    },
    /// Open-chain quasienergies and edge-mode profiles.
    ObcSpectrum {
        #[arg(long)]
        point: Option<PointLabel>,
        #[arg(long)]
        cells: Option<usize>,
    },
    /// Edge-population dynamics and sector labels.
    EdgeDynamics {
        #[arg(long, value_delimiter = ',')]
        points: Option<Vec<PointLabel>>,
        #[arg(long)]
        cells: Option<usize>,
        #[arg(long)]
        m_max: Option<usize>,
        #[arg(long, value_parser = parse_mode)]
        superposition: Option<SuperpositionMode>,
    },
    /// Mean chiral displacement in both frames.
    Mcd {
        #[arg(long, value_delimiter = ',')]
        points: Option<Vec<PointLabel>>,
        #[arg(long)]
        cells: Option<usize>,
        #[arg(long)]
        m_max: Option<usize>,
    },
    /// Return probabilities at the two critical benchmarks.
    CriticalBenchmark {
        #[arg(long)]
        cells: Option<usize>,
        #[arg(long)]
        m_max: Option<usize>,
    },
    /// Run the acceptance suite.
    Verify {
        #[arg(long)]
        fast: bool,
        #[arg(long, hide = true)]
        flip_sigma_y: bool,
    },
}

fn parse_mode(s: &str) -> std::result::Result<SuperpositionMode, String> {
    match s {
        "auto" => Ok(SuperpositionMode::Auto),
        "required" => Ok(SuperpositionMode::Required),
        "off" => Ok(SuperpositionMode::Off),
        _ => Err(format!("unknown superposition mode {s:?} (auto, required, off)")),
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

#[cfg(feature = "parallel")]
fn configure_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(_threads: Option<usize>) -> Result<()> {
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.global.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    set(&mut cfg.out, cli.global.out);
    if cli.global.threads.is_some() {
        cfg.threads = cli.global.threads;
    }
    if cfg.threads == Some(0) {
        return Err(CliError::Config("--threads must be at least 1".into()));
    }
    configure_threads(cfg.threads)?;

    let files = match cli.command {
        Command::PhaseMap { n_m, n_phi, n_k } => {
            set(&mut cfg.phase_map.n_m, n_m);
            set(&mut cfg.phase_map.n_phi, n_phi);
            set(&mut cfg.phase_map.n_k, n_k);
            commands::cmd_phase_map(&cfg)?
        }
        Command::ObcSpectrum { point, cells } => {
            set(&mut cfg.open.point, point);
            set(&mut cfg.open.cells, cells);
            commands::cmd_obc_spectrum(&cfg)?
        }
        Command::EdgeDynamics { points, cells, m_max, superposition } => {
            set(&mut cfg.edge_dynamics.points, points);
            set(&mut cfg.open.cells, cells);
            set(&mut cfg.edge_dynamics.m_max, m_max);
            set(&mut cfg.edge_dynamics.superposition, superposition);
            commands::cmd_edge_dynamics(&cfg)?
        }
        Command::Mcd { points, cells, m_max } => {
            set(&mut cfg.bulk.points, points);
            set(&mut cfg.bulk.cells, cells);
            if m_max.is_some() {
                cfg.bulk.m_max = m_max;
            }
            commands::cmd_mcd(&cfg)?
        }
        Command::CriticalBenchmark { cells, m_max } => {
            set(&mut cfg.bulk.cells, cells);
            if let Some(m) = m_max {
                cfg.critical.m_max = m;
                cfg.critical.m_hi = m;
            }
            commands::cmd_critical_benchmark(&cfg)?
        }
        Command::Verify { fast, flip_sigma_y } => {
            let opts = VerifyOptions { fast, flip_sigma_y, ..VerifyOptions::default() };
            verify::cmd_verify(&cfg, &opts)?;
            return Ok(());
        }
    };
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("afqw: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
