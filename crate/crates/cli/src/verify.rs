use adelion::verify::parse_selection;
use clap::Args;

use crate::{CliError, CliResult};

#[derive(Args)]
pub struct VerifyArgs {
    /// all, td, ring, conorm, isometry, density, counterexample or splitting.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

pub fn run(args: VerifyArgs, json: bool) -> CliResult<()> {
    let suites = parse_selection(&args.suite).map_err(|e| CliError::Usage(e.to_string()))?;
    let reports: Vec<_> = suites.iter().map(|s| s.run(args.seed)).collect();
    if json {
        println!("{}", serde_json::to_string_pretty(&reports).expect("reports serialize"));
    } else {
        for r in &reports {
            print!("{r}");
        }
    }
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.suite.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("failing suites: {}", failed.join(", "))))
    }
}
