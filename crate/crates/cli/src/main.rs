use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use skillscape_cli::report::cp_lines;
use skillscape_cli::{Pipeline, PipelineConfig, PipelineError, RunSummary, Stage};
use skillscape_core::econometrics::{generate_synthetic, SynthConfig};

#[derive(Parser)]
#[command(
    name = "skillscape",
    version,
    about = "Economic complexity metrics and city growth regressions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Pipeline configuration (TOML)
    #[arg(long, global = true, env = "SKILLSCAPE_CONFIG", default_value = "skillscape.toml")]
    config: PathBuf,

    /// Output directory; overrides the configuration
    #[arg(long, global = true, env = "SKILLSCAPE_OUT_DIR")]
    out: Option<PathBuf>,

    /// Worker threads (defaults to the number of cores)
    #[arg(long, global = true, env = "SKILLSCAPE_THREADS")]
    threads: Option<usize>,

    /// Log level (error, warn, info, debug, trace)
    #[arg(long, global = true, default_value = "warn")]
    log_level: String,
}

#[derive(Subcommand)]
enum Command {
    /// Run the whole pipeline
    Run,
    /// Delineate cities from the commuting table
    Delineate {
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        pop_floor: Option<f64>,
    },
    /// Industry and city complexity
    Complexity {
        /// eig or reflections
        #[arg(long)]
        method: Option<String>,
        /// Score one year instead of the pooled panel
        #[arg(long)]
        year: Option<i32>,
    },
    /// Relatedness, density and complexity potential
    Potential {
        /// Only write densities for this year
        #[arg(long)]
        year: Option<i32>,
        /// Keep negative relatedness in the density weights
        #[arg(long)]
        no_clip: bool,
    },
    /// Regression tables
    Regress {
        #[command(subcommand)]
        model: Model,
        #[command(flatten)]
        opts: RegressOpts,
    },
    /// Firm-level entropy and wage regressions
    Firmstats,
    /// Diversity and complexity scaling with city size
    Scaling {
        #[arg(long)]
        year: Option<i32>,
    },
    /// Write a synthetic input bundle
    Synth {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Generator settings (TOML); defaults otherwise
        #[arg(long)]
        synth_config: Option<PathBuf>,
    },
    /// Summarize a finished run
    Report,
}

#[derive(Subcommand)]
enum Model {
    /// Growth regressions. Columns: 1 lagged rate; 2 adds lagged CP;
    /// 3 adds supply (shift-share) and demand (government spending) shocks;
    /// 4 adds their interactions with CP
    Table5 {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        spec: Option<u8>,
    },
    /// Robustness regressions. Columns: 1 lagged rate with institutional and
    /// education quality; 2 adds lagged CP; 3 is table5 column 3 plus both
    Table6 {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        spec: Option<u8>,
    },
    /// Employment elasticity to population as a function of complexity
    Elasticity,
}

#[derive(Args)]
struct RegressOpts {
    /// Add city fixed effects to the growth regressions
    #[arg(long, global = true)]
    city_fe: bool,
    /// Classical instead of HC1 standard errors
    #[arg(long, global = true)]
    classical: bool,
}

fn load_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg = PipelineConfig::load(&cli.config)?;
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    Ok(cfg)
}

fn print_summary(s: &RunSummary) {
    println!("executed: {}", s.executed.join(", "));
    println!("cached: {}", s.cached.join(", "));
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    if let Command::Synth { seed, synth_config } = &cli.command {
        let mut sc = match synth_config {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                toml::from_str::<SynthConfig>(&text).map_err(|e| PipelineError::Config(e.to_string()))?
            }
            None => SynthConfig::default(),
        };
        sc.seed = *seed;
        let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("synthetic"));
        let bundle = generate_synthetic(&sc).map_err(PipelineError::from)?;
        bundle.write_to(&out).map_err(PipelineError::from)?;
        println!("wrote synthetic bundle (seed {seed}) to {}", out.display());
        return Ok(());
    }

    let mut cfg = load_config(&cli)?;
    let targets = match cli.command {
        Command::Run => vec![Stage::Report],
        Command::Delineate { threshold, pop_floor } => {
            if let Some(t) = threshold {
                cfg.delineation.threshold = t;
            }
            if let Some(f) = pop_floor {
                cfg.delineation.pop_floor = f;
            }
            vec![Stage::Delineate]
        }
        Command::Complexity { method, year } => {
            if let Some(m) = method {
                cfg.complexity.method = m;
            }
            cfg.complexity.year = year.or(cfg.complexity.year);
            vec![Stage::Complexity]
        }
        Command::Potential { year, no_clip } => {
            cfg.relatedness.density_year = year.or(cfg.relatedness.density_year);
            if no_clip {
                cfg.relatedness.clip_negative = false;
            }
            vec![Stage::Potential]
        }
        Command::Regress { model, opts } => {
            cfg.regressions.city_fe |= opts.city_fe;
            if opts.classical {
                cfg.regressions.se = "classical".into();
            }
            match model {
                Model::Table5 { spec } => {
                    if let Some(s) = spec {
                        cfg.regressions.table5 = vec![s];
                    }
                    vec![Stage::Table5]
                }
                Model::Table6 { spec } => {
                    if let Some(s) = spec {
                        cfg.regressions.table6 = vec![s];
                    }
                    vec![Stage::Table6]
                }
                Model::Elasticity => vec![Stage::Elasticity],
            }
        }
        Command::Firmstats => vec![Stage::Firmstats],
        Command::Scaling { year } => {
            cfg.scaling.year = year.or(cfg.scaling.year);
            vec![Stage::Scaling]
        }
        Command::Report => vec![Stage::Report],
        Command::Synth { .. } => unreachable!("handled above"),
    };
    let pipeline = Pipeline::new(cfg)?;
    let summary = pipeline.run(&targets)?;
    print_summary(&summary);
    if targets.contains(&Stage::Report) {
        for l in cp_lines(&pipeline) {
            println!("{l}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new().parse_filters(&cli.log_level).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = e.downcast_ref::<PipelineError>().map(|p| p.kind()).unwrap_or("runtime");
            eprintln!("{}", json!({ "error": kind, "message": format!("{e:#}") }));
            ExitCode::FAILURE
        }
    }
}
