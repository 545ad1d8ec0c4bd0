use std::path::PathBuf;
use std::process::ExitCode;

use angular_qudit::commands::{self, Outcome};
use angular_qudit::presets::{preset, PRESET_NAMES};
use angular_qudit::{CliError, CliResult, FileFormat, Scenario};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "angular-qudit",
    version,
    about = "Angular two-photon interference simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// Scenario JSON file.
    #[arg(long, conflicts_with = "preset")]
    scenario: Option<PathBuf>,
    /// Built-in scenario; `list` prints the names.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum)]
    format: Option<FileFormat>,
}

#[derive(Subcommand)]
enum Command {
    /// Coincidence-rate fringes over (l_s, l_i).
    Simulate(#[command(flatten)] Source),
    /// Certified lower bound on the logarithmic negativity.
    Witness {
        #[command(flatten)]
        source: Source,
        /// Seed for random measurement sets.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Pathway density matrices as JSON (and CSV parts).
    ExportDensity(#[command(flatten)] Source),
    /// Slit count limit of a spatial light modulator.
    SlmCapacity {
        /// Aperture diameter in pixels.
        #[arg(long, default_value_t = 2643.0)]
        pixels: f64,
        /// Pixel pitch in micrometers.
        #[arg(long, default_value_t = 3.74)]
        pixel_size: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FileFormat>,
    },
    /// Re-check a certificate file without the solver.
    VerifyCertificate {
        certificate: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
    },
}

fn load(source: &Source) -> CliResult<Option<Scenario>> {
    match (&source.scenario, &source.preset) {
        (Some(path), None) => Ok(Some(Scenario::load(path)?)),
        (None, Some(name)) if name == "list" => {
            for name in PRESET_NAMES {
                println!("{name}");
            }
            Ok(None)
        }
        (None, Some(name)) => preset(name).map(Some).ok_or_else(|| {
            CliError::validation(format!("`preset`: unknown preset {name:?}; try --preset list"))
        }),
        _ => Err(CliError::validation(
            "give exactly one of --scenario and --preset",
        )),
    }
}

fn run(cli: Cli) -> CliResult<Outcome> {
    match cli.command {
        Command::Simulate(src) => match load(&src)? {
            Some(s) => commands::simulate(&s, &src.out, src.format),
            None => Ok(Outcome::default()),
        },
        Command::ExportDensity(src) => match load(&src)? {
            Some(s) => commands::export_density(&s, &src.out, src.format),
            None => Ok(Outcome::default()),
        },
        Command::Witness { source, seed } => match load(&source)? {
            Some(s) => commands::witness(&s, &source.out, seed),
            None => Ok(Outcome::default()),
        },
        Command::SlmCapacity {
            pixels,
            pixel_size,
            out,
            format,
        } => commands::slm_capacity_report(pixels, pixel_size, out.as_deref(), format),
        Command::VerifyCertificate {
            certificate,
            tolerance,
        } => commands::verify_certificate_file(&certificate, tolerance),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(outcome) => {
            for line in &outcome.report {
                println!("{line}");
            }
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
