use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use umbilic_lab::{run, Command};

#[derive(Parser)]
#[command(name = "umbilic-lab", version, about = "Umbilics and lines of curvature of Monge surfaces")]
struct Args {
    command: Command,
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; 0 lets the runtime decide.
    #[arg(long, env = "UMBILIC_LAB_THREADS", default_value_t = 0)]
    threads: usize,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(args.threads).build_global() {
            eprintln!("umbilic-lab: thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    match run(args.command, &args.scenario, &args.out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("umbilic-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
