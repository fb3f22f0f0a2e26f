//! Runs the invariant suite that backs `boost verify`.
//!
//! cargo run --release --example verify_invariants

fn main() {
    let mut failed = 0;
    for check in agnostic_boost::verify::run_all() {
        println!(
            "{} {}: {}",
            if check.passed { "ok  " } else { "FAIL" },
            check.name,
            check.detail
        );
        failed += usize::from(!check.passed);
    }
    std::process::exit(i32::from(failed > 0));
}
