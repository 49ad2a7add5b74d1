//! Runs every acceptance criterion once and prints one pass/fail line each.
//! Time budgets are enforced inside each entry. Lines go straight to stderr so
//! they show without `--nocapture`.

use std::io::Write;

use hyperseq::replicate::{run_criterion, CRITERIA, TOTAL_BUDGET_SECONDS};

#[test]
fn acceptance_criteria() {
    let mut failed = Vec::new();
    let mut total = 0.0;
    let _ = writeln!(std::io::stderr());
    for n in 1..=CRITERIA {
        let e = run_criterion(n);
        total += e.wall_seconds;
        let _ = writeln!(
            std::io::stderr(),
            "[{}] {:>2} {} ({:.2}s / {:.0}s): {}",
            if e.passed { "PASS" } else { "FAIL" },
            e.criterion,
            e.claim,
            e.wall_seconds,
            e.budget_seconds,
            e.verdict
        );
        if !e.passed {
            failed.push(e.claim);
        }
    }
    let _ = writeln!(std::io::stderr(), "total {total:.1}s / {TOTAL_BUDGET_SECONDS:.0}s");
    assert!(total <= TOTAL_BUDGET_SECONDS, "over the total budget");
    assert!(failed.is_empty(), "failed: {failed:?}");
}
