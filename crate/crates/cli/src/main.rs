use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mirrorkit::pipeline::{self, Command, OutputFormat, RunConfig};

#[derive(Parser)]
#[command(name = "mirrorkit", version, about = "Transposition mirrors of Calabi-Yau complete intersections")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct StageArgs {
    /// Input system as a JSON file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "json", value_parser = parse_format)]
    format: OutputFormat,
    /// Series order for Poincaré expansions.
    #[arg(long, default_value_t = 8)]
    order: usize,
    /// Treat failed sufficient-condition flags as errors.
    #[arg(long)]
    strict: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check shape, weights, Calabi-Yau condition and nonsingularity.
    Validate(StageArgs),
    Weights(StageArgs),
    /// Cayley matrix and its inverse.
    Cayley(StageArgs),
    Transpose(StageArgs),
    /// Mellin linear forms and Gamma-product identities.
    Mellin(StageArgs),
    Horn(StageArgs),
    Poincare(StageArgs),
    /// Nef-partition data and dual vertices.
    Nef(StageArgs),
    /// Full chain with a consolidated report.
    Verify(StageArgs),
    /// Print the m-th member of the two-block family as JSON input.
    Family {
        #[arg(long)]
        m: usize,
    },
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Validate(a) => (Command::Validate, a),
        Cmd::Weights(a) => (Command::Weights, a),
        Cmd::Cayley(a) => (Command::Cayley, a),
        Cmd::Transpose(a) => (Command::Transpose, a),
        Cmd::Mellin(a) => (Command::Mellin, a),
        Cmd::Horn(a) => (Command::Horn, a),
        Cmd::Poincare(a) => (Command::Poincare, a),
        Cmd::Nef(a) => (Command::Nef, a),
        Cmd::Verify(a) => (Command::Verify, a),
        Cmd::Family { m } => {
            return match pipeline::generate_family(m) {
                Ok(spec) => {
                    println!("{}", spec.to_json());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(pipeline::exit_code_for(&e) as u8)
                }
            };
        }
    };
    let config = RunConfig { command, input: args.input, format: args.format, order: args.order, strict: args.strict };
    let outcome = pipeline::run(&config);
    print!("{}", outcome.output);
    ExitCode::from(outcome.exit_code as u8)
}
