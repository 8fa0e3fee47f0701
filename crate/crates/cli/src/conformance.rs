//! Conformance run over the bundled example problems.
//!
//! Each bundled instance has a known landscape: the multipliers and notion
//! flags at the origin, the stationary points inside `[-0.5, 1.5]^2`, and
//! for the regularization family the KKT points and the path limit. This
//! module re-derives all of them and prints one ok/FAIL line per check.

use std::process::ExitCode;

use snostat_core::regularization;
use snostat_core::report::{classify_point, StationarityReport};
use snostat_core::{gallery, morse, SnoProblem, Tolerances};

const BOX: [(f64, f64); 2] = [(-0.5, 1.5), (-0.5, 1.5)];

struct Summary {
    passed: usize,
    failed: usize,
}

impl Summary {
    fn record(&mut self, name: &str, outcome: Result<(), String>) {
        match outcome {
            Ok(()) => {
                self.passed += 1;
                println!("ok   {name}");
            }
            Err(detail) => {
                self.failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
}

pub fn run() -> ExitCode {
    let tols = Tolerances::default();
    let mut summary = Summary { passed: 0, failed: 0 };

    let origin_cases: [(&str, SnoProblem, (f64, f64), Flags); 6] = [
        (
            "regular saddle: origin is T-only with multipliers (-2,-2)",
            gallery::regular_saddle(),
            (-2.0, -2.0),
            Flags { nhat: false, n: false, t: true, regular: true, singular: false },
        ),
        (
            "singular saddle I: origin is N-but-not-Nhat with multipliers (-1,0)",
            gallery::singular_saddle_i(),
            (-1.0, 0.0),
            Flags { nhat: false, n: true, t: true, regular: false, singular: true },
        ),
        (
            "singular saddle II: origin is N-but-not-Nhat with multipliers (-1,0)",
            gallery::singular_saddle_ii(),
            (-1.0, 0.0),
            Flags { nhat: false, n: true, t: true, regular: false, singular: true },
        ),
        (
            "second-order saddle: origin is Nhat with multipliers (0,0), no first-order saddle",
            gallery::second_order_saddle(),
            (0.0, 0.0),
            Flags { nhat: true, n: true, t: true, regular: false, singular: false },
        ),
        (
            "not-first-order saddle: origin is Nhat with multipliers (1,0)",
            gallery::not_first_order_saddle(),
            (1.0, 0.0),
            Flags { nhat: true, n: true, t: true, regular: false, singular: false },
        ),
        (
            "non-T-stationary: origin is Nbar-only with multipliers (1,-1)",
            gallery::non_t_stationary(),
            (1.0, -1.0),
            Flags { nhat: false, n: false, t: false, regular: false, singular: false },
        ),
    ];
    for (name, problem, lambda, flags) in origin_cases {
        summary.record(name, check_origin(&problem, lambda, flags, &tols));
    }

    summary.record(
        "regular saddle: scan finds exactly (0,0), (1,0), (0,1)",
        check_scan(&gallery::regular_saddle(), &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], &tols),
    );
    summary.record(
        "singular saddle I: scan finds exactly (0,0), (1,0), (0,1)",
        check_scan(&gallery::singular_saddle_i(), &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], &tols),
    );
    summary.record(
        "singular saddle II: scan finds exactly (0,0), (1,0), (0,1)",
        check_scan(&gallery::singular_saddle_ii(), &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], &tols),
    );
    summary.record(
        "non-T-stationary: T-filtered scan keeps exactly (1,0), (0,1)",
        check_t_filtered_scan(&gallery::non_t_stationary(), &[[1.0, 0.0], [0.0, 1.0]], &tols),
    );

    summary.record("relaxation family: KKT enumeration and path limit", check_scholtes(&tols));

    println!("{} checks passed, {} failed", summary.passed, summary.failed);
    if summary.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

struct Flags {
    nhat: bool,
    n: bool,
    t: bool,
    regular: bool,
    singular: bool,
}

fn check_origin(
    problem: &SnoProblem,
    lambda: (f64, f64),
    flags: Flags,
    tols: &Tolerances,
) -> Result<(), String> {
    let report =
        classify_point(problem, &[0.0, 0.0], tols).map_err(|e| e.to_string())?;
    let got1 = report.multipliers[0].lambda1.ok_or("missing lambda1")?;
    let got2 = report.multipliers[0].lambda2.ok_or("missing lambda2")?;
    if (got1 - lambda.0).abs() > 1e-9 || (got2 - lambda.1).abs() > 1e-9 {
        return Err(format!("multipliers ({got1}, {got2}), expected {lambda:?}"));
    }
    let mismatch = |name: &str, got: bool, want: bool| {
        if got == want {
            None
        } else {
            Some(format!("{name} = {got}, expected {want}"))
        }
    };
    let checks = [
        mismatch("Nhat", report.flags.nhat, flags.nhat),
        mismatch("N", report.flags.n, flags.n),
        mismatch("T", report.flags.t, flags.t),
        mismatch("regular saddle", report.saddle.is_regular, flags.regular),
        mismatch("singular saddle", report.saddle.is_singular, flags.singular),
        mismatch("Nbar", report.flags.nbar, true),
    ];
    let problems: Vec<String> = checks.into_iter().flatten().collect();
    if problems.is_empty() {
        Ok(())
    } else {
        Err(problems.join("; "))
    }
}

fn scan_these(
    problem: &SnoProblem,
    tols: &Tolerances,
) -> Result<Vec<StationarityReport>, String> {
    let scan = morse::stratified_scan(problem, &BOX, 8, tols).map_err(|e| e.to_string())?;
    Ok(scan.reports)
}

fn match_points(got: &[Vec<f64>], want: &[[f64; 2]]) -> Result<(), String> {
    if got.len() != want.len() {
        return Err(format!("{} points, expected {}: {got:?}", got.len(), want.len()));
    }
    for w in want {
        if !got
            .iter()
            .any(|g| (g[0] - w[0]).abs() <= 1e-8 && (g[1] - w[1]).abs() <= 1e-8)
        {
            return Err(format!("missing point {w:?} in {got:?}"));
        }
    }
    Ok(())
}

fn check_scan(
    problem: &SnoProblem,
    want: &[[f64; 2]],
    tols: &Tolerances,
) -> Result<(), String> {
    let reports = scan_these(problem, tols)?;
    let points: Vec<Vec<f64>> = reports.iter().map(|r| r.point.clone()).collect();
    match_points(&points, want)
}

fn check_t_filtered_scan(
    problem: &SnoProblem,
    want: &[[f64; 2]],
    tols: &Tolerances,
) -> Result<(), String> {
    let reports = scan_these(problem, tols)?;
    let points: Vec<Vec<f64>> = reports
        .iter()
        .filter(|r| r.flags.t)
        .map(|r| r.point.clone())
        .collect();
    match_points(&points, want)
}

fn check_scholtes(tols: &Tolerances) -> Result<(), String> {
    let problem = gallery::regular_saddle();
    let t = 0.01;
    let nlp = regularization::build_nlp_t(&problem, t).map_err(|e| e.to_string())?;
    let kkt = regularization::kkt_points_at(&nlp, &BOX, 8, tols).map_err(|e| e.to_string())?;
    let s = (1.0f64 - 4.0 * t).sqrt();
    let expected = [
        [t.sqrt(), t.sqrt()],
        [(1.0 + s) / 2.0, (1.0 - s) / 2.0],
        [(1.0 - s) / 2.0, (1.0 + s) / 2.0],
    ];
    let got: Vec<Vec<f64>> = kkt.iter().map(|k| k.x.clone()).collect();
    match_points(&got, &expected)?;

    let path = regularization::path_follow(&problem, &[0.1, 0.1], t, 0.1, 6, tols)
        .map_err(|e| e.to_string())?;
    if !path.completed {
        return Err("path stopped early".into());
    }
    if path.limit.iter().any(|v| v.abs() > 1e-3) {
        return Err(format!("limit {:?} not within 1e-3 of the origin", path.limit));
    }
    let report = path.limit_report.as_ref().ok_or("missing limit report")?;
    if !(report.flags.t && !report.flags.n && !report.flags.nhat) {
        return Err(format!(
            "limit flags T={} N={} Nhat={}, expected T only",
            report.flags.t, report.flags.n, report.flags.nhat
        ));
    }
    Ok(())
}
