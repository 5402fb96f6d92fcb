use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hexgrid_core::PoolMode;

use hexgrid_cli::{commands, experiment, CliError};

#[derive(Parser)]
#[command(name = "hexgrid", version, about = "Convolution, pooling, and training on hexagonally sampled images")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Max,
    Avg,
}

impl From<Mode> for PoolMode {
    fn from(m: Mode) -> PoolMode {
        match m {
            Mode::Max => PoolMode::Max,
            Mode::Avg => PoolMode::Avg,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Convolve a hexcsv image with a kernel file or `debug:<n>`.
    Convolve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        kernel: String,
        #[arg(long, default_value_t = 1)]
        stride: usize,
        #[arg(long)]
        output: PathBuf,
    },
    /// Pool a hexcsv image over hexagonal neighborhoods.
    Pool {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        size: u32,
        #[arg(long, default_value_t = 1)]
        stride: usize,
        #[arg(long)]
        output: PathBuf,
    },
    /// Render symmetric shapes before and after an all-ones convolution.
    DemoShapes {
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the three models over seeded iterations and write curves.
    Experiment {
        #[arg(long, default_value_t = 10)]
        iterations: usize,
        #[arg(long, default_value_t = experiment::DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare analytic gradients against finite differences.
    Gradcheck {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Time the decomposed engine against the brute-force reference.
    Bench {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Convolve {
            input,
            kernel,
            stride,
            output,
        } => commands::convolve(&input, &kernel, stride, &output),
        Cmd::Pool {
            input,
            mode,
            size,
            stride,
            output,
        } => commands::pool(&input, mode.into(), size, stride, &output),
        Cmd::DemoShapes { out } => commands::demo_shapes(&out),
        Cmd::Experiment {
            iterations,
            seed,
            out,
        } => experiment::run(iterations, seed, &out).map(|_| ()),
        Cmd::Gradcheck { seed } => commands::gradcheck(seed),
        Cmd::Bench { seed } => commands::bench(seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
