use std::process::ExitCode;

use clap::Parser;

mod commands;

use commands::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("CANTOR_SPECTRA_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let resource = e.chain().any(|c| {
                c.downcast_ref::<cantor_spectra::Error>().is_some_and(|e| e.is_resource())
            });
            ExitCode::from(if resource { 2 } else { 1 })
        }
    }
}
