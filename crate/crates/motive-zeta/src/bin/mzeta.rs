//! `mzeta`: exact zeta and L-function computations from the command line.

use clap::Parser;
use motive_zeta::cmd::{render_pretty, run, Cli};

fn main() {
    let cli = Cli::parse();

    #[cfg(feature = "parallel")]
    if let Some(jobs) = cli.jobs {
        // Thread count only affects wall time; results are deterministic.
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .ok();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = cli.jobs;

    match run(&cli.command) {
        Ok(value) => {
            if cli.pretty {
                print!("{}", render_pretty(&value));
            } else {
                println!("{value}");
            }
        }
        Err(err) => {
            let code = err.exit_code();
            if cli.error_json {
                let mut m = serde_json::Map::new();
                m.insert("code".into(), serde_json::Value::from(code));
                m.insert("kind".into(), serde_json::Value::from(err.kind()));
                m.insert("message".into(), serde_json::Value::from(err.to_string()));
                println!("{}", serde_json::Value::Object(m));
            } else {
                eprintln!("error: {err}");
            }
            std::process::exit(code);
        }
    }
}
