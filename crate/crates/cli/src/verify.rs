use persprox::oracle::OracleConfig;
use persprox::verify::{run_all, CatalogEntry, VerifyConfig};
use persprox::SolverConfig;

use crate::{EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED};

pub fn run(solver: &SolverConfig, samples: usize, seed: u64, entries: &[CatalogEntry], grid_step: f64) -> u8 {
    let cfg = VerifyConfig {
        samples,
        seed,
        solver: *solver,
        oracle: OracleConfig {
            nu_step: grid_step,
            ..OracleConfig::default()
        },
        ..VerifyConfig::default()
    };
    let reports = match run_all(entries, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    for r in &reports {
        println!("{} {r}", if r.ok() { "ok  " } else { "FAIL" });
    }
    let failed = reports.iter().filter(|r| !r.ok()).count();
    if failed == 0 {
        println!(
            "all {} suite runs passed (samples {samples}, seed {seed})",
            reports.len()
        );
        EXIT_OK
    } else {
        println!(
            "{failed} of {} suite runs failed (samples {samples}, seed {seed})",
            reports.len()
        );
        EXIT_VERIFY_FAILED
    }
}
