//! The batch layer as a library: parse a config, run both solvers into an
//! output directory, apply the transform, and verify the stored artifacts —
//! the same pipeline the `mfg` binary drives from the command line.
//!
//! ```bash
//! cargo run --release --example batch_pipeline
//! ```

use mfg_hopfcole::cli::{cmd_solve, cmd_sweep, cmd_transform, cmd_verify, Direction, Which};
use mfg_hopfcole::config::InstanceConfig;

const CONFIG: &str = r#"
[domain]
kind = "interval"
a = 0.0
b = 1.0

[hamiltonian]
nu = 1.0
r = 2.0
h0 = 1.0

[coupling]
kind = "linear-plus-potential"
coefficient = 1.0
potential = "sin(2*pi*x)"

[solver]
n = 129
"#;

fn main() -> mfg_hopfcole::Result<()> {
    let cfg = InstanceConfig::parse_str(CONFIG)?;
    let out = std::env::temp_dir().join("mfg-batch-pipeline");
    let _ = std::fs::remove_dir_all(&out);

    cmd_solve(&cfg, Which::Coupled, &out)?;
    cmd_solve(&cfg, Which::Rlaplace, &out)?;
    cmd_transform(&cfg, Direction::Forward, &out, None)?;
    cmd_transform(&cfg, Direction::Inverse, &out, None)?;
    let all_pass = cmd_verify(&cfg, &out)?;
    cmd_sweep(&cfg, &[33, 65, 129], &out)?;

    println!("\nartifacts in {}:", out.display());
    let mut names: Vec<_> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    for name in names {
        println!("  {name}");
    }
    println!("verification passed: {all_pass}");
    Ok(())
}
