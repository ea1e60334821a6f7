use clap::Parser;

fn main() -> std::process::ExitCode {
    match vibes_workbench::cli::run(vibes_workbench::cli::Cli::parse()) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::ExitCode::FAILURE
        }
    }
}
