use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stmeta::Mode;
use stmeta_cli::{
    load_schedules, run_figures, run_pattern, run_synthesize, run_verify, CliError, Overrides, RunConfig, VerifyOptions,
};

#[derive(Parser)]
#[command(name = "stmeta", version, about = "Space-time-coded metasurface beam synthesis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON run configuration; missing fields take defaults.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Scan elevation in degrees.
    #[arg(long, value_name = "DEG", allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    /// Chebyshev sidelobe target in dB (negative).
    #[arg(long, value_name = "DB", allow_hyphen_values = true)]
    sll: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Write schedules.json and fpga_table.txt.
    Synthesize(Common),
    /// Write pattern_cut.csv and metrics.json.
    Pattern {
        #[command(flatten)]
        common: Common,
        /// Reuse a schedules.json instead of synthesizing.
        #[arg(long, value_name = "PATH", conflicts_with_all = ["config", "theta", "mode", "sll"])]
        schedules: Option<PathBuf>,
    },
    /// Check analytic harmonics against the time-domain oracle.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, hide = true)]
        inject_sign_bug: bool,
    },
    /// Write cuts for 0/15/30/45 degrees in every mode, plus an index.
    Figures(Common),
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: stmeta::Error| e.to_string())
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            theta_deg: self.theta,
            mode: self.mode,
            sll_db: self.sll,
            seed: self.seed,
            out_dir: self.out.clone(),
        }
    }

    fn load(&self) -> Result<RunConfig, CliError> {
        RunConfig::load(self.config.as_deref(), &self.overrides())
    }
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Synthesize(common) => report(&run_synthesize(&common.load()?)?),
        Command::Pattern { common, schedules } => {
            let (cfg, set) = match schedules {
                Some(path) => {
                    let (mut cfg, set) = load_schedules(&path)?;
                    cfg.apply(&common.overrides());
                    (cfg, Some(set))
                }
                None => (common.load()?, None),
            };
            let (outcome, paths) = run_pattern(&cfg, set.as_ref())?;
            report(&paths);
            let m = outcome.metrics;
            println!(
                "sll {:.2} dB, hpbw {:.2} deg, pointing {:.2} deg, directivity {:.2} dBi",
                m.sll_db, m.hpbw_deg, m.pointing_deg, m.directivity_dbi
            );
        }
        Command::Verify {
            common,
            inject_sign_bug,
        } => {
            let (rep, paths) = run_verify(&common.load()?, VerifyOptions { inject_sign_bug })?;
            report(&paths);
            for w in &rep.warnings {
                eprintln!("warning: {w}");
            }
            println!(
                "oracle max error {:.3e} (limit {:.0e}), route max error {:.3e} (limit {:.0e}): {}",
                rep.max_oracle_error,
                rep.oracle_threshold,
                rep.route_max_relative_error,
                rep.route_threshold,
                if rep.pass { "pass" } else { "FAIL" }
            );
            return Ok(rep.pass);
        }
        Command::Figures(common) => report(&run_figures(&common.load()?)?.1),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
