//! Numbered acceptance criteria. Each prints one pass/fail line.

use std::time::{Duration, Instant};

use zhukit::verify::{run_all, run_criterion};

const SEED: u64 = 0;

fn criterion(id: u32, bound_secs: u64) -> bool {
    let start = Instant::now();
    let c = run_criterion(id, SEED).unwrap_or_else(|e| panic!("criterion {id} errored: {e}"));
    let elapsed = start.elapsed();
    let within = elapsed <= Duration::from_secs(bound_secs);
    let verdict = if c.passed && within { "PASS" } else { "FAIL" };
    println!(
        "criterion {id:>2} {verdict} {} ({} instances, {} skipped, {:.2}s of {bound_secs}s){}",
        c.name,
        c.instances,
        c.skipped,
        elapsed.as_secs_f64(),
        c.witness.as_deref().map(|w| format!(" witness: {w}")).unwrap_or_default()
    );
    c.passed && within
}

fn determinism() -> bool {
    let start = Instant::now();
    let first = run_all(SEED).expect("first run");
    let second = run_all(SEED).expect("second run");
    let a = serde_json::to_string_pretty(&first.to_json()).expect("json");
    let b = serde_json::to_string_pretty(&second.to_json()).expect("json");
    let same = a == b && first.to_csv() == second.to_csv();
    println!(
        "criterion 13 {} determinism ({} bytes, {:.2}s)",
        if same { "PASS" } else { "FAIL" },
        a.len(),
        start.elapsed().as_secs_f64()
    );
    same
}

const BOUNDS: [(u32, u64); 12] = [
    (1, 5),
    (2, 60),
    (3, 60),
    (4, 30),
    (5, 120),
    (6, 30),
    (7, 30),
    (8, 10),
    (9, 30),
    (10, 120),
    (11, 60),
    (12, 30),
];

fn main() {
    let mut failed: Vec<u32> = BOUNDS.iter().filter(|(id, b)| !criterion(*id, *b)).map(|(id, _)| *id).collect();
    if !determinism() {
        failed.push(13);
    }
    if failed.is_empty() {
        println!("acceptance: all 13 criteria passed");
    } else {
        println!("acceptance: failed {failed:?}");
        std::process::exit(1);
    }
}
