//! Driving the report layer from a TOML configuration, as the `hypiso`
//! binary does. Writes into a directory under the system temp dir.

use hypiso::report::{run_command, RunConfig};

const CONFIG: &str = r#"
seed = 1
verdicts = ["LinearIsop", "ClassicalIsop", "ReverseTG", "Monotonicity", "VolumeLowerBound"]

[family]
kind = "cap"
k = 2
n = 3
theta = 0.7853981633974483

[measure]
grid_size = 20

[sweep]
thetas = [0.5235987755982988, 1.5707963267948966]
"#;

fn main() -> hypiso::Result<()> {
    let mut config = RunConfig::from_toml(CONFIG)?;
    config.out_dir = std::env::temp_dir().join("hypiso-run-config-example");
    for command in ["sweep-theta", "verify-all"] {
        let written = run_command(command, &config)?;
        println!("{command}: exit code {}", written.outcome.exit_code());
        for f in written.files {
            println!("  {}", f.display());
        }
    }
    let csv = std::fs::read_to_string(config.out_dir.join("sweep.csv"))?;
    print!("{csv}");
    Ok(())
}
