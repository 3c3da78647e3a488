//! Acceptance suite: runs every criterion at the stated tolerances and
//! prints one pass/fail line per criterion. Run with
//! `cargo test --test acceptance -- --nocapture` for the lines.

use klbessel::acceptance::{run_all, Profile};

#[test]
fn acceptance_criteria() {
    let summary = run_all(Profile::Full);
    for c in &summary.criteria {
        println!("{}", c.line());
    }
    let failed: Vec<_> = summary.criteria.iter().filter(|c| !c.pass).collect();
    assert!(
        failed.is_empty(),
        "failing criteria: {:?}",
        failed.iter().map(|c| (c.id, &c.detail)).collect::<Vec<_>>()
    );
}
