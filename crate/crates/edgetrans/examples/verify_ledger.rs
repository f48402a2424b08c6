//! Verify every inclusion record in the shipped ledger.
use edgetrans::catalog::{catalog, verify_inclusion};
use std::time::Instant;

fn main() {
    let mut failures = 0;
    for rec in catalog().ledger() {
        let t = Instant::now();
        let rep = verify_inclusion(rec).expect("classes exist");
        if !rep.passed() {
            failures += 1;
        }
        println!("{}  ({:.2?})", rep, t.elapsed());
        if let Some((_, w)) = &rep.failure {
            println!("    witness: {}", w);
        }
    }
    println!("{} records, {} failures", catalog().ledger().len(), failures);
}
