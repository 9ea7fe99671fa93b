//! A density sweep built from a config string, written as CSV to stdout.

use hwbeam::scenario::{cmd_sweep, write_sweep_csv, ScenarioConfig};

const CONFIG: &str = r#"
[highway]
length_km = 5

[densities]
lambda_block_per_km = 0.1

[codebook]
beamwidth_deg = 10

[run]
realizations = 500
seed = 11
deployment = "double"

[sweep]
parameter = "lambda_b"
values = [4, 8, 12, 16]
outputs = ["bsn", "hon", "tcr"]
"#;

fn main() -> hwbeam::Result<()> {
    let cfg = ScenarioConfig::from_toml(CONFIG)?;
    let rows = cmd_sweep(&cfg)?;
    write_sweep_csv(std::io::stdout().lock(), &rows)
}
