//! A full verification campaign from a configuration, printed as text.

use elliptic_center::verify::{run, RunConfig};

fn main() -> elliptic_center::Result<()> {
    let cfg = RunConfig::from_toml_str(
        r#"
n = 2
seed = 7
samples = 10
cherednik_variant = "both"
"#,
    )?;
    let report = run(&cfg)?;
    print!("{}", report.to_text());
    println!("exit status would be {}", report.exit_status());
    Ok(())
}
