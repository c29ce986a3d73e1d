use std::process::ExitCode;

use clap::Parser;
use symcap_cli::{output, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = std::env::var("WORKBENCH_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0);
    if let Some(n) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: could not cap threads: {e}");
        }
    }
    let result = run(&cli).and_then(|o| output::emit(&o, cli.global.out.as_deref()).map(|_| o.pass));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("symcap: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
