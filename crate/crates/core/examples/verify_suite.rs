//! Runs one verification suite and prints its verdicts.

use hypolab::suites::{self, SuiteConfig};

fn main() -> hypolab::Result<()> {
    let cfg = SuiteConfig::with_seed(1);
    for rep in [suites::relation(&cfg)?, suites::diameter(&cfg, 100)?, suites::lichnerowicz(1, 5)?] {
        println!("{} ({})", rep.suite, rep.anchor);
        for v in &rep.verdicts {
            println!("  [{}] {}: {:e}", if v.passed { "pass" } else { "FAIL" }, v.name, v.measured);
        }
    }
    Ok(())
}
