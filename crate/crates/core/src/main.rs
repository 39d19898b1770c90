use clap::Parser;
use pas_core::cli::{run, Cli};
use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PAS_OPT_LOG", "warn"))
        .format_timestamp(None)
        .init();
    ExitCode::from(run(Cli::parse()))
}
