//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! The process exits 0 once every criterion has been evaluated, red or green;
//! a panic while evaluating exits nonzero. Failing criteria print their
//! witnesses and the analysis gathered by the checks.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use gtbcd::action::{AlgMatrix, Representation};
use gtbcd::algebra::{Family, GeneratorId};
use gtbcd::numeric::{rat, AlgebraicValue, Rational};
use gtbcd::oracle::weyl_dim;
use gtbcd::pattern::enumerate;
use gtbcd::verify::{
    acceptance_grid, check_commutators_of, check_dimension_of, run_suite, CaseResult, CheckId, GridEntry, Status,
    Suite, VerificationReport, DEFAULT_TOLERANCE, MAX_BRACKET_DIM,
};

struct Verdict {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

fn suite(check: CheckId, grid: &[GridEntry]) -> (VerificationReport, Duration) {
    let start = Instant::now();
    let r = run_suite(Suite::One(check), grid, DEFAULT_TOLERANCE);
    (r, start.elapsed())
}

fn describe(c: &CaseResult) -> String {
    let param = if c.parameter.is_empty() { String::new() } else { format!(" {}", c.parameter) };
    format!(
        "{} [{}]{}: {:?}, witness {}, residual {:?}",
        c.label,
        c.hw.join(","),
        param,
        c.status,
        c.witness.as_deref().unwrap_or("none"),
        c.residual
    )
}

fn from_report(report: &VerificationReport, what: &str) -> Verdict {
    let failed: Vec<&CaseResult> = report.failures().collect();
    Verdict {
        pass: failed.is_empty() && !report.cases.is_empty(),
        summary: format!("{what}: {}/{} cases pass", report.cases.len() - failed.len(), report.cases.len()),
        details: failed.iter().map(|c| describe(c)).collect(),
    }
}

fn criterion_1(grid: &[GridEntry]) -> Verdict {
    let (report, elapsed) = suite(CheckId::Dimension, grid);
    let mut v = from_report(&report, "pattern count equals Weyl dimension");
    let in_time = elapsed < Duration::from_secs(10);
    v.pass &= in_time;
    v.summary.push_str(&format!(", {:.3} s (limit 10 s)", elapsed.as_secs_f64()));
    v
}

fn criterion_2(grid: &[GridEntry]) -> Verdict {
    from_report(&suite(CheckId::Weights, grid).0, "pattern weights equal Freudenthal multiplicities")
}

fn criterion_3(grid: &[GridEntry]) -> Verdict {
    let (report, _) = suite(CheckId::Commutators, grid);
    let covered = grid
        .iter()
        .filter(|e| weyl_dim(&e.label, &e.hw).is_ok_and(|d| d <= MAX_BRACKET_DIM))
        .count();
    let mut v = from_report(&report, "exact brackets on all generator pairs");
    v.pass &= report.cases.len() == covered;
    v
}

fn criterion_4(grid: &[GridEntry]) -> Verdict {
    let (report, _) = suite(CheckId::Casimir, grid);
    let mut v = from_report(&report, "Casimir is the oracle scalar");
    for (family, expected) in [(Family::B, "4"), (Family::C, "5")] {
        let spot = report
            .cases
            .iter()
            .find(|c| c.label == format!("{family}2") && c.hw == ["1", "0"]);
        let seen = spot.and_then(|c| c.notes.iter().find_map(|n| n.strip_prefix("eigenvalue ")));
        let ok = spot.is_some_and(|c| c.status == Status::Pass) && seen == Some(expected);
        v.pass &= ok;
        v.summary.push_str(&format!(", {family}2 [1,0] eigenvalue {}", seen.unwrap_or("missing")));
    }
    v
}

fn criterion_5(grid: &[GridEntry]) -> Verdict {
    let (report, _) = suite(CheckId::GlEquivalence, grid);
    let mut v = from_report(&report, "reduced elements agree with the gl3 kernel up to basis choice");
    for c in &report.cases {
        v.details.push(format!("{} [{}]: {}", c.label, c.hw.join(","), c.notes.join("; ")));
    }
    for (k, val) in &report.metadata {
        if k.starts_with("gl_equivalence") {
            v.details.push(format!("{k}: {val}"));
        }
    }
    v
}

fn criterion_6(grid: &[GridEntry]) -> Verdict {
    let (report, _) = suite(CheckId::WignerEckart, grid);
    let mut v = from_report(&report, "F(-1,-2) factors as reduced element times Wigner coefficient");
    let families: Vec<&str> = report.cases.iter().map(|c| c.label.as_str()).collect();
    v.pass &= ["B3", "C3", "D3"].iter().all(|f| families.contains(f));
    v
}

fn criterion_7(grid: &[GridEntry]) -> Verdict {
    let (report, _) = suite(CheckId::Wigner, grid);
    let mut v = from_report(&report, "intertwiners exact and matching the null-space oracle");
    for f in ["B3", "C3", "D3"] {
        v.pass &= report.cases.iter().any(|c| c.label == f);
    }
    let rank2: Vec<&GridEntry> = grid.iter().filter(|e| e.label.rank == 2).collect();
    v.pass &= rank2
        .iter()
        .all(|e| report.cases.iter().any(|c| c.label == e.label.to_string()));
    v
}

fn criterion_8(grid: &[GridEntry]) -> Verdict {
    let (report, _) = suite(CheckId::MaximalElement, grid);
    let mut v = from_report(&report, "maximal-pattern elements equal reduced elements on B2");
    let compared: usize = report
        .cases
        .iter()
        .filter_map(|c| c.notes.first()?.split_whitespace().next()?.parse::<usize>().ok())
        .sum();
    v.pass &= compared > 0;
    v.summary.push_str(&format!(", {compared} summand pairs compared"));
    v
}

/// Every single-entry `+1` corruption of every operator of a few modules,
/// and one interlacing violation per grid module.
fn criterion_9(grid: &[GridEntry]) -> Verdict {
    let mut details = Vec::new();
    let mut corruptions = 0;
    let mut caught = 0;
    for e in grid.iter().filter(|e| e.label.rank == 2 && e.hw.components() == [rat(1), rat(0)]) {
        let rep = Representation::new(e.label, e.hw.components()).expect("grid module builds");
        let ops: BTreeMap<GeneratorId, AlgMatrix> =
            rep.all_operators().expect("operators").into_iter().map(|(g, m)| (g, (*m).clone())).collect();
        assert_eq!(check_commutators_of(&e.label, e.hw.components(), &ops).status, Status::Pass);
        let n = rep.dim();
        for g in ops.keys() {
            for r in 0..n {
                for c in 0..n {
                    let mut bad = ops.clone();
                    bad.get_mut(g).expect("present").add_to(r, c, &AlgebraicValue::one());
                    corruptions += 1;
                    if check_commutators_of(&e.label, e.hw.components(), &bad).status == Status::Fail {
                        caught += 1;
                    } else {
                        details.push(format!("{} [1,0]: {g} entry ({r}, {c}) +1 not detected", e.label));
                    }
                }
            }
        }
    }
    let mut violations = 0;
    let mut flagged = 0;
    for e in grid {
        let mut patterns = enumerate(&e.label, &e.hw).expect("grid enumerates");
        let top: Rational = e.hw.components()[0].clone() + rat(1);
        let last = patterns[0].levels.last_mut().expect("rank ≥ 1");
        if last.primed.is_empty() {
            last.row[0] = top;
        } else {
            last.primed[0] = top;
        }
        violations += 1;
        let c = check_dimension_of(&e.label, &e.hw, &patterns);
        if c.status == Status::Fail {
            flagged += 1;
        } else {
            details.push(format!("{} [{}]: interlacing violation not detected", c.label, c.hw.join(",")));
        }
    }
    Verdict {
        pass: corruptions > 0 && caught == corruptions && flagged == violations,
        summary: format!(
            "{caught}/{corruptions} operator corruptions fail the bracket suite, {flagged}/{violations} interlacing violations fail the dimension suite"
        ),
        details,
    }
}

type Criterion = fn(&[GridEntry]) -> Verdict;

fn main() {
    let grid = acceptance_grid();
    let criteria: [(u8, Criterion); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut red = 0;
    for (k, run) in criteria {
        let v = run(&grid);
        println!("criterion {k}: {} ({})", if v.pass { "PASS" } else { "FAIL" }, v.summary);
        if !v.pass {
            red += 1;
        }
        for d in &v.details {
            println!("    {d}");
        }
    }
    println!("acceptance: {}/9 criteria pass", 9 - red);
}
