use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use derivekit::{run_session, EmitMode, SessionConfig, EXIT_OK, EXIT_PARSE};

#[derive(Parser)]
#[command(name = "derivekit", version, about = "Derive constructors, induction schemes and subterm relations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the declarations and derivation commands of a `.ind` file.
    Run {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = EmitMode::Pretty)]
        emit: EmitMode,
        /// Skip kernel checking of derived definitions.
        #[arg(long)]
        no_check: bool,
        /// Omit hypotheses for nested recursive arguments.
        #[arg(long)]
        no_nested: bool,
        /// Abstract every argument of a constructor's result, parameters included.
        #[arg(long)]
        full_spine: bool,
        #[arg(short = 'o', value_name = "PATH")]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_PARSE } else { EXIT_OK } as u8);
        }
    };
    let Command::Run {
        file,
        emit,
        no_check,
        no_nested,
        full_spine,
        output,
    } = cli.command;
    let cfg = SessionConfig {
        input_path: file,
        emit,
        check: !no_check,
        output_path: output,
        no_nested,
        full_spine,
    };
    ExitCode::from(run_session(&cfg) as u8)
}
