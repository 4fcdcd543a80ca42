//! The `validate` subcommand: run the property suite, print one line per
//! property, write the consistency table on the full tier.

use std::path::Path;

use robust_bvs_core::oracle_validation::write_consistency_tsv;
use robust_bvs_core::validation::{run_validation, Tier};

use crate::errors::{CliError, CliResult};

pub fn run_validate_command(tier: &str, consistency_out: &Path) -> CliResult<()> {
    let tier = match tier {
        "fast" => Tier::Fast,
        "full" => Tier::Full,
        other => {
            return Err(CliError::Config(format!("unknown tier '{other}' (expected fast or full)")))
        }
    };
    let report = run_validation(tier);
    for check in &report.checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!("{status}  {:<32}  {}", check.name, check.detail);
    }
    if let Some(rows) = &report.consistency_table {
        let mut file = std::fs::File::create(consistency_out)?;
        write_consistency_tsv(rows, &mut file)?;
        eprintln!("wrote consistency table to {}", consistency_out.display());
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(CliError::Validation(format!(
            "{failed} of {} properties failed",
            report.checks.len()
        )));
    }
    eprintln!("all {} properties passed", report.checks.len());
    Ok(())
}
