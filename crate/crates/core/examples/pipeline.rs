//! Every CLI stage in order into a temporary directory, then the verdict table.
//!
//! ```text
//! cargo run --release --example pipeline [-- OUT_DIR]
//! ```

use bn6::cli_report::config::RunConfig;
use bn6::cli_report::{run_stage, Command};

fn main() {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| std::env::temp_dir().join("bn6-pipeline").display().to_string());
    let cfg = RunConfig {
        output_dir: out.into(),
        ..RunConfig::default()
    };
    for cmd in Command::ALL {
        let t = std::time::Instant::now();
        let status = match run_stage(cmd, &cfg) {
            Ok(code) => format!("exit {code}"),
            Err(e) => e.to_string(),
        };
        println!("{:<14} {:>7.1}s  {status}", cmd.name(), t.elapsed().as_secs_f64());
    }
    let table = std::fs::read_to_string(cfg.output_dir.join("report.txt")).unwrap_or_default();
    println!("\n{table}");
}
