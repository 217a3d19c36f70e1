use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use metacouple_cli::{cmd_channel, cmd_impedance, cmd_sweep, cmd_validate, RunOptions, SweepParam};

#[derive(Parser)]
#[command(
    name = "metacouple",
    version,
    about = "Mutual impedances and end-to-end channels for thin-wire surfaces"
)]
struct Cli {
    /// Output directory (overrides `output.dir` in the config; default ".").
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Relative tolerance for quadrature fallbacks and the validation oracle.
    #[arg(long, global = true)]
    oracle_tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Param {
    Spacing,
    Frequency,
    #[value(name = "n_elements", alias = "n-elements")]
    NElements,
}

#[derive(Subcommand)]
enum Command {
    /// Write Z_SS, z_RS, z_ST and z_RT.
    Impedance { config: PathBuf },
    /// Evaluate (and optionally optimize) the end-to-end channel.
    Channel { config: PathBuf },
    /// Sweep one parameter and tabulate the channel.
    Sweep {
        config: PathBuf,
        #[arg(long, value_enum)]
        param: Param,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long)]
        points: usize,
    },
    /// Compare the closed form against quadrature on random pairs.
    Validate {
        config: PathBuf,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let opts = RunOptions {
        out_dir: cli.out,
        oracle_tol: cli.oracle_tol,
    };
    let result = match cli.command {
        Command::Impedance { config } => cmd_impedance(&config, &opts),
        Command::Channel { config } => cmd_channel(&config, &opts),
        Command::Sweep {
            config,
            param,
            from,
            to,
            points,
        } => {
            let param = match param {
                Param::Spacing => SweepParam::Spacing,
                Param::Frequency => SweepParam::Frequency,
                Param::NElements => SweepParam::NElements,
            };
            cmd_sweep(&config, param, from, to, points, &opts)
        }
        Command::Validate {
            config,
            samples,
            seed,
        } => cmd_validate(&config, samples, seed, &opts),
    };
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
