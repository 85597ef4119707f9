//! `selftest`: the embedded oracle suite.

use pseudolidar::selftest::{run_all, SelftestProfile};

use crate::CliError;

pub fn run(quick: bool) -> Result<(), CliError> {
    let profile = if quick {
        SelftestProfile::Quick
    } else {
        SelftestProfile::Full
    };
    let outcomes = run_all(profile);
    let mut failed = 0;
    for outcome in &outcomes {
        println!(
            "{} {:<24} {}",
            if outcome.passed { "PASS" } else { "FAIL" },
            outcome.name,
            outcome.detail
        );
        if !outcome.passed {
            failed += 1;
        }
    }
    println!(
        "selftest: {}/{} checks passed",
        outcomes.len() - failed,
        outcomes.len()
    );
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Config(anyhow::anyhow!("{failed} selftest check(s) failed")))
    }
}
