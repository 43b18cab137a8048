//! Full experiment battery, one check per criterion, with a pass/fail line
//! printed for each.

use wbv::run_suite;

#[test]
fn acceptance_battery() {
    let report = run_suite();
    assert_eq!(report.results.len(), 12);
    for r in &report.results {
        println!(
            "criterion {:2} [{}] {} — {} ({} ms)",
            r.id,
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.details,
            r.runtime_ms
        );
    }
    let failed: Vec<_> = report
        .results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("criterion {}: {}", r.id, r.details))
        .collect();
    assert!(report.passed, "failing criteria:\n{}", failed.join("\n"));
}
