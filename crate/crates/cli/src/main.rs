use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use randpoly_cli::commands::{
    cmd_alpha, cmd_chambers, cmd_density, cmd_moivre, cmd_pi, cmd_tau, CommandOutput,
};
use randpoly_cli::config::{ExperimentConfig, WORKERS_ENV};
use randpoly_cli::verify::{self, Level};

/// Experiments on the graphs of random ±1-polytopes.
#[derive(Parser)]
#[command(name = "randpoly", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` config file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Samples per estimate.
    #[arg(long, global = true)]
    samples: Option<u64>,
    /// Worker threads (0 = all CPUs).
    #[arg(long, global = true, env = WORKERS_ENV)]
    workers: Option<usize>,
    /// Output CSV path (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Extra parameter, `key=value`; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Expected graph density at n = base^d.
    Density {
        #[arg(long)]
        d: Option<String>,
        #[arg(long)]
        bases: Option<String>,
        /// nearest, floor, ceil or outward.
        #[arg(long)]
        rounding: Option<String>,
    },
    /// Long-edge survival probability tau(k, m).
    Tau {
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        m: Option<String>,
        #[arg(long)]
        ratios: Option<String>,
        /// auto, exact or mc.
        #[arg(long)]
        method: Option<String>,
    },
    /// Antipodal-free conditional alpha(k, m).
    Alpha {
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        m: Option<String>,
        /// auto, exact, mc, chambers or chambers_exact.
        #[arg(long)]
        method: Option<String>,
    },
    /// Edge probability pi(d, n), optionally per distance k.
    Pi {
        #[arg(long)]
        d: Option<String>,
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        k: Option<String>,
        /// mc, semianalytic or exact.
        #[arg(long)]
        method: Option<String>,
    },
    /// Chamber counts of central arrangements against the Harding bound.
    Chambers {
        /// random, planar or plus.
        #[arg(long)]
        source: Option<String>,
        #[arg(long)]
        r: Option<String>,
        #[arg(long)]
        m: Option<String>,
        #[arg(long)]
        configs: Option<String>,
    },
    /// Binomial tail ratio against its normal limit.
    Moivre {
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        mu: Option<String>,
    },
    /// Run the identity and bound checks.
    Verify {
        #[arg(long, default_value = "quick")]
        level: Level,
    },
}

impl Command {
    fn params(&self) -> Vec<(&'static str, &Option<String>)> {
        match self {
            Command::Density { d, bases, rounding } => {
                vec![("d", d), ("bases", bases), ("rounding", rounding)]
            }
            Command::Tau {
                k,
                m,
                ratios,
                method,
            } => vec![("k", k), ("m", m), ("ratios", ratios), ("method", method)],
            Command::Alpha { k, m, method } => vec![("k", k), ("m", m), ("method", method)],
            Command::Pi { d, n, k, method } => {
                vec![("d", d), ("n", n), ("k", k), ("method", method)]
            }
            Command::Chambers {
                source,
                r,
                m,
                configs,
            } => {
                vec![("source", source), ("r", r), ("m", m), ("configs", configs)]
            }
            Command::Moivre { q, mu } => vec![("q", q), ("mu", mu)],
            Command::Verify { .. } => vec![],
        }
    }
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig> {
    let c = &cli.common;
    let mut cfg = match &c.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = c.seed {
        cfg.seed = seed;
    }
    if let Some(samples) = c.samples {
        cfg.set("samples", &samples.to_string())?;
    }
    if let Some(w) = c.workers {
        cfg.set("workers", &w.to_string())?;
    }
    if let Some(out) = &c.out {
        cfg.out = Some(out.clone());
    }
    for kv in &c.set {
        let (k, v) = kv
            .split_once('=')
            .with_context(|| format!("--set expects KEY=VALUE, got '{kv}'"))?;
        cfg.set(k.trim(), v.trim())?;
    }
    for (key, value) in cli.command.params() {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = build_config(&cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.resolved_workers()?)
        .build()?;
    if let Command::Verify { level } = cli.command {
        let results = pool.install(|| verify::run(level, cfg.seed))?;
        let mut all = true;
        for r in &results {
            println!("{}", r.line());
            all &= r.passed;
        }
        println!(
            "{} of {} checks passed",
            results.iter().filter(|r| r.passed).count(),
            results.len()
        );
        return Ok(all);
    }
    let output: CommandOutput = pool.install(|| match &cli.command {
        Command::Density { .. } => cmd_density(&cfg),
        Command::Tau { .. } => cmd_tau(&cfg),
        Command::Alpha { .. } => cmd_alpha(&cfg),
        Command::Pi { .. } => cmd_pi(&cfg),
        Command::Chambers { .. } => cmd_chambers(&cfg),
        Command::Moivre { .. } => cmd_moivre(&cfg),
        Command::Verify { .. } => unreachable!(),
    })?;
    for notice in &output.notices {
        eprintln!("{notice}");
    }
    match &cfg.out {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            output.table.write(&mut w)?;
            w.flush()?;
        }
        None => output.table.write(io::stdout().lock())?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
