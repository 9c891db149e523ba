//! Drive a command from configuration text, as the `bclab` binary does.

use bclab::report::{parse_config, run};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::temp_dir().join("bclab-run-config");
    let text = format!(
        "# Euler and Lagrange, then verify the saved report\ncommand = solve\nmasses = 1, 1, 1\neta = 0\nn_starts = 500\nformats = json, csv, svg\noutput_dir = {}\n",
        out.display()
    );
    let cfg = parse_config(&text)?;
    print!("{}", cfg.to_canonical_text());
    let (code, report) = run(&cfg);
    let summary = serde_json::to_value(report?)?["payload"]["solve"]["summary"].clone();
    println!("solve exit {code}: {summary}");

    let verify = parse_config(&format!("command = verify\ninput = {}\noutput_dir = {}\n", out.join("solve.json").display(), out.display()))?;
    let (code, _) = run(&verify);
    println!("verify exit {code}; files in {}", out.display());
    Ok(())
}
