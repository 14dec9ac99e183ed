//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Exits nonzero when a criterion fails that is not listed in
//! `KNOWN_FAILURES`, or when a listed one starts passing.

use std::time::{Duration, Instant};

use sepsys::gallery::{self, CHAIN_NAMES, MAX_DEPTH};
use sepsys::suites::{run_on_system, run_suite, SuiteParams, SuiteResult};

/// Criteria that fail for reasons documented in the README.
const KNOWN_FAILURES: &[(u32, &str)] = &[(
    3,
    "iterated-minus: the pruned-projection identity fails when a star projects onto an inverse pair \
     containing a small element (e.g. chain seed 7, star {0,1,2|3,4; 3|0,1,2,4}, levels 0 < 1)",
)];

const TRANSFER_SUITES: [&str; 10] = [
    "nested-lift",
    "small-lift",
    "lift-nontrivial",
    "lift-order",
    "sanitize-star",
    "lift-splitting-star",
    "project-splitting-star",
    "iterated-minus",
    "closure-of-splitting-star",
    "lift-splitting-star-to-limit",
];

type Criterion = (u32, &'static str, Box<dyn FnOnce() -> Outcome>);

struct Outcome {
    ok: bool,
    detail: String,
}

fn suite(name: &str, seed: u64, count: usize, size: usize) -> SuiteResult {
    run_suite(name, SuiteParams { seed, count, size }).expect("suite exists and size is in range")
}

fn summary(r: &SuiteResult) -> String {
    format!("{} instances, {} checks, {} violations", r.instances, r.checks, r.violations.len())
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let took = start.elapsed();
    out.detail = format!("{} [{:.2}s]", out.detail, took.as_secs_f64());
    if let Some(limit) = limit {
        if took > limit {
            out.ok = false;
            out.detail.push_str(&format!(" exceeds {}s", limit.as_secs()));
        }
    }
    out
}

fn tree_bijection() -> Outcome {
    let r = suite("tree-bijection", 0, 200, 8);
    Outcome { ok: r.passed() && r.instances == 200, detail: summary(&r) }
}

fn extension() -> Outcome {
    let mut instances = 0;
    let mut parts = vec![];
    let mut ok = true;
    for (size, count) in [(1, 400), (2, 400), (3, 400), (5, 500)] {
        let r = suite("extension-lemma", 0, count, size);
        instances += r.instances;
        ok &= r.passed();
        parts.push(format!("size {size}: {}", summary(&r)));
    }
    Outcome { ok: ok && instances >= 1500, detail: parts.join("; ") }
}

fn transfer() -> Outcome {
    let mut failing = vec![];
    let mut checks = 0;
    for name in TRANSFER_SUITES {
        let r = suite(name, 0, 200, 10);
        checks += r.checks;
        if !r.passed() {
            failing.push(format!("{name}: {} violations", r.violations.len()));
        }
    }
    let detail = if failing.is_empty() { format!("10 suites, {checks} checks") } else { failing.join("; ") };
    Outcome { ok: failing.is_empty(), detail }
}

fn compactness() -> Outcome {
    let r = suite("compactness", 0, 100, 12);
    Outcome { ok: r.passed() && r.instances == 100, detail: summary(&r) }
}

fn certificate(c: Result<gallery::Certificate, gallery::GalleryError>) -> Outcome {
    match c {
        Ok(c) if c.passed() => Outcome { ok: true, detail: format!("{} checks", c.checks.len()) },
        Ok(c) => Outcome { ok: false, detail: format!("failed: {}", c.failures().join(", ")) },
        Err(e) => Outcome { ok: false, detail: e.to_string() },
    }
}

fn splittingnotclosed2() -> Outcome {
    let mut failed = vec![];
    for depth in 3..=10 {
        match gallery::splittingnotclosed2_certificate(depth) {
            Ok(c) if c.passed() => {}
            Ok(c) => failed.push(format!("depth {depth}: {}", c.failures().join(", "))),
            Err(e) => failed.push(format!("depth {depth}: {e}")),
        }
    }
    let detail = if failed.is_empty() { "depths 3..=10".into() } else { failed.join("; ") };
    Outcome { ok: failed.is_empty(), detail }
}

fn dichotomy() -> Outcome {
    let r = suite("greatest-dichotomy", 0, 600, 6);
    let mut ok = r.passed();
    let mut detail = summary(&r);
    let mut truncations = 0;
    for name in CHAIN_NAMES {
        for depth in 2..=MAX_DEPTH {
            let Ok(is) = gallery::gen(name, depth) else { continue };
            if is.limit().system().separations().len() > 6 {
                continue;
            }
            truncations += 1;
            let t = run_on_system("greatest-dichotomy", &is).expect("suite takes input");
            if !t.passed() {
                ok = false;
                detail.push_str(&format!("; {name} depth {depth}: {} violations", t.violations.len()));
            }
        }
    }
    detail.push_str(&format!("; {truncations} example truncations"));
    Outcome { ok, detail }
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        (1, "tree orientations biject with nodes", Box::new(|| timed(Some(Duration::from_secs(10)), tree_bijection))),
        (2, "extension agrees with brute force", Box::new(|| timed(None, extension))),
        (3, "transfer suites have zero violations", Box::new(|| timed(None, transfer))),
        (4, "compactness construction", Box::new(|| timed(Some(Duration::from_secs(60)), compactness))),
        (5, "trivialproj certificate at depth 12", Box::new(|| timed(None, || certificate(gallery::trivialproj_certificate(12))))),
        (
            6,
            "splittingnotclosed certificate at depth 10",
            Box::new(|| timed(None, || certificate(gallery::splittingnotclosed_certificate(10)))),
        ),
        (7, "splittingnotclosed2 certificates", Box::new(|| timed(None, splittingnotclosed2))),
        (8, "ray certificate at depth 10", Box::new(|| timed(None, || certificate(gallery::ray_certificate(10))))),
        (9, "greatest-element dichotomy", Box::new(|| timed(None, dichotomy))),
    ];
    let mut unexpected = 0;
    for (n, what, run) in criteria {
        let out = run();
        let known = KNOWN_FAILURES.iter().find(|(k, _)| *k == n);
        println!("{} {n}: {what}: {}", if out.ok { "PASS" } else { "FAIL" }, out.detail);
        match (out.ok, known) {
            (false, Some((_, why))) => println!("  known failure: {why}"),
            (false, None) => unexpected += 1,
            (true, Some(_)) => {
                println!("  listed as a known failure but passed; update KNOWN_FAILURES");
                unexpected += 1;
            }
            (true, None) => {}
        }
    }
    if unexpected > 0 {
        std::process::exit(1);
    }
}
