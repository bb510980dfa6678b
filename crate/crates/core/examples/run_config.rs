//! Driving a full run from a TOML configuration, as the binary does.

use curvplateau::cli::{parse_config, run, RunOptions, REPORT_FILE};

const CONFIG: &str = r#"
command = "verify"
model = "hyperbolic"
function = { kind = "gauss", n = 2 }
domain = { shape = "disk", radius = 1.0, nodes = 41 }
kappa = { kind = "constant", value = 0.5 }
boundary = { kind = "constant", value = 0.02 }
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = parse_config(CONFIG)?;
    let out = std::env::temp_dir().join("curvplateau-run-config");
    let outcome = run(&cfg, &RunOptions { out_dir: out.clone(), quiet: true });
    println!("exit code {} files {:?}", outcome.exit_code, outcome.files);
    print!("{}", std::fs::read_to_string(out.join(REPORT_FILE))?);
    Ok(())
}
