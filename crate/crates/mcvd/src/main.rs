use clap::{Parser, Subcommand};
use std::path::PathBuf;

/// Analytical performance and Monte-Carlo validation of diffusive molecular
/// communication with an absorbing spherical receiver and Poisson-field
/// interferers.
#[derive(Parser)]
#[command(name = "mcvd", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run an experiment described by a flat JSON config
    Run {
        /// Path to the config file
        config: PathBuf,
        /// Override the config's RNG seed
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's output path
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the config's Monte-Carlo realization count
        #[arg(long)]
        realizations: Option<usize>,
    },
    /// Compare an analytic sweep CSV against a Monte-Carlo sweep CSV
    Compare {
        /// CSV with a `pe` column (analytic side)
        analytic: PathBuf,
        /// CSV with `pe` and `se_pe` columns (Monte-Carlo side)
        mc: PathBuf,
    },
    /// Figure-preset utilities
    Presets {
        #[command(subcommand)]
        cmd: PresetsCmd,
    },
}

#[derive(Subcommand)]
enum PresetsCmd {
    /// List the available figure presets
    List,
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Run {
            config,
            seed,
            out,
            realizations,
        } => mcvd::cli::run(
            &config,
            &mcvd::cli::Overrides {
                seed,
                out,
                realizations,
            },
        ),
        Cmd::Compare { analytic, mc } => mcvd::cli::compare(&analytic, &mc),
        Cmd::Presets {
            cmd: PresetsCmd::List,
        } => {
            print!("{}", mcvd::cli::presets_list());
            mcvd::cli::EXIT_OK
        }
    };
    std::process::exit(code);
}
