use std::process::ExitCode;

use clap::Parser;
use pls_precoding::cli::{execute, summary, Args};

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(run) => {
            print!("{}", summary(&run.result));
            println!("manifest: {}", run.manifest_path.display());
            for path in &run.manifest.outputs {
                println!("wrote {}", path.display());
            }
            if run.result.all_cells_produced() {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: some (scheme, phi) cells produced no value");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
