//! Runs every verification suite at its acceptance size and time limit,
//! printing one line per criterion, then checks that reruns are
//! byte-identical.

use std::time::{Duration, Instant};

use growthlab::budget::Budget;
use growthlab::report::{Report, Verdict};
use growthlab::suites::{run_suite, DEFAULT_SEED};

const CRITERIA: &[(&str, &str, u64)] = &[
    ("transfer", "measure transfers to asymptotic density", 10),
    ("positive", "positive lower bound on residual measure", 30),
    ("ll", "slalom lattice laws below height 4", 60),
    ("kappa", "intersection number by LP and sequences", 60),
    ("cl2", "large subfamilies inside a class", 60),
    ("bell-measure", "Bell measure identities", 20),
    ("bell-iso", "iso condition: both deciders and the sweep agree", 120),
    ("bell-positivity", "strict positivity on the Bell algebra", 60),
    ("diagonal", "diagonal escape from listed slaloms", 5),
];

fn run(name: &str) -> (Report, Duration) {
    let start = Instant::now();
    let report = run_suite(name, DEFAULT_SEED, &Budget::default()).unwrap_or_else(|e| panic!("{name}: {e}"));
    (report, start.elapsed())
}

fn main() {
    let mut failures = Vec::new();
    let mut reports = Vec::new();
    for (i, &(name, title, limit)) in CRITERIA.iter().enumerate() {
        let (report, elapsed) = run(name);
        let in_time = elapsed <= Duration::from_secs(limit);
        let ok = report.verdict == Verdict::Pass && in_time;
        println!(
            "{} {:>2} {name}: {title} ({:.1}s, limit {limit}s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64()
        );
        if !ok {
            for c in report.checks.iter().filter(|c| c.verdict != Verdict::Pass) {
                println!("       {} {}: {:?}", c.verdict.as_str(), c.name, c.values);
            }
            failures.push(name);
        }
        reports.push((name, report.to_json()));
    }

    let mut differing = Vec::new();
    for (name, first) in &reports {
        if run(name).0.to_json() != *first {
            differing.push(*name);
        }
    }
    let ok = differing.is_empty();
    println!(
        "{} 10 determinism: reruns give byte-identical reports{}",
        if ok { "PASS" } else { "FAIL" },
        if ok { String::new() } else { format!(" (differs: {differing:?})") }
    );
    if !ok {
        failures.push("determinism");
    }
    if !failures.is_empty() {
        eprintln!("failed criteria: {failures:?}");
        std::process::exit(1);
    }
}
