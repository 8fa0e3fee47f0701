//! Command-line front end: load a problem file, then classify a point, scan
//! a box for stationary points, follow a regularization path, or profile
//! lower level sets. Exit codes: 0 success, 2 input error, 3 infeasible
//! point, 4 constraint-qualification failure, 5 unsupported feature.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use snostat_core::error::Error;
use snostat_core::levelset::LevelProfile;
use snostat_core::morse::{ScanResult, Verdict};
use snostat_core::regularization::ScholtesPath;
use snostat_core::report::StationarityReport;
use snostat_core::stationarity::SaddleIndexKind;
use snostat_core::{levelset, morse, regularization, report, SnoProblem, Tolerances};

mod conformance;

#[derive(Parser)]
#[command(
    name = "snostat",
    about = "Stationarity classification for complementarity, vanishing, orthogonality, \
             switching, and disjunctive constraints",
    arg_required_else_help = true
)]
struct Cli {
    /// Run the bundled example problems and print a conformance summary.
    #[arg(long, exclusive = true)]
    paper_examples: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a feasible point against the stationarity notions.
    Classify(ClassifyArgs),
    /// Enumerate and classify stationary points inside a box.
    Scan(ScanArgs),
    /// Follow the relaxation path t0 * theta^k for complementarity cones.
    Regularize(RegularizeArgs),
    /// Sweep lower-level-set component counts on a 2-D instance.
    Levelsets(LevelsetsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Args)]
struct CommonArgs {
    /// Problem file (JSON: n, cone, objective, constraints).
    #[arg(long)]
    problem: PathBuf,
    /// Output format.
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Write the output to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Activity tolerance: a component is active when |F| <= this.
    #[arg(long)]
    tol_activity: Option<f64>,
    /// Multiplier zero tolerance for the sign tables.
    #[arg(long)]
    tol_zero: Option<f64>,
    /// Relative eigenvalue tolerance for the quadratic index.
    #[arg(long)]
    tol_eig: Option<f64>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Point to classify, comma-separated: "v1,v2,...".
    #[arg(long, allow_hyphen_values = true)]
    point: String,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Search box, per-axis ranges: "lo1,hi1;lo2,hi2;...".
    #[arg(long, name = "box", allow_hyphen_values = true)]
    box_: String,
    /// Newton seeds per axis.
    #[arg(long, default_value_t = 8)]
    seeds: usize,
}

#[derive(Args)]
struct RegularizeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Start point near a KKT point of the relaxed problem at t0.
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    /// Initial relaxation parameter.
    #[arg(long, default_value_t = 0.01)]
    t0: f64,
    /// Geometric reduction factor in (0, 1).
    #[arg(long, default_value_t = 0.1)]
    theta: f64,
    /// Number of reduction steps.
    #[arg(long, default_value_t = 6)]
    steps: usize,
}

#[derive(Args)]
struct LevelsetsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Grid box: "lo1,hi1;lo2,hi2".
    #[arg(long, name = "box", allow_hyphen_values = true)]
    box_: String,
    /// Grid cells per axis (at least 16).
    #[arg(long, default_value_t = 400)]
    resolution: usize,
    /// Level sweep: "amin,amax,steps".
    #[arg(long, allow_hyphen_values = true)]
    levels: String,
    /// Cells within this multiple of the spacing of the feasible set count
    /// as feasible.
    #[arg(long, default_value_t = 1.5)]
    feas_scale: f64,
    /// Newton seeds per axis for the cross-referencing scan.
    #[arg(long, default_value_t = 8)]
    seeds: usize,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::Infeasible { .. } => 3,
            Error::LicqFailure { .. } => 4,
            Error::UnsupportedCone { .. } | Error::UnsupportedDimension { .. } => 5,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.paper_examples {
        return conformance::run();
    }
    let Some(command) = cli.command else {
        eprintln!("error: a subcommand or --paper-examples is required");
        return ExitCode::from(2);
    };
    let outcome = match command {
        Command::Classify(args) => cmd_classify(args),
        Command::Scan(args) => cmd_scan(args),
        Command::Regularize(args) => cmd_regularize(args),
        Command::Levelsets(args) => cmd_levelsets(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn load_problem(path: &Path) -> Result<SnoProblem, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    Ok(SnoProblem::from_json(&text)?)
}

fn tolerances(common: &CommonArgs) -> Result<Tolerances, Failure> {
    fn positive(name: &str, v: f64) -> Result<f64, Failure> {
        if v > 0.0 {
            Ok(v)
        } else {
            Err(Failure::input(format!("{name} must be positive, got {v}")))
        }
    }
    let mut tols = Tolerances::default();
    if let Some(v) = common.tol_activity {
        tols.activity = positive("--tol-activity", v)?;
    }
    if let Some(v) = common.tol_zero {
        tols.zero = positive("--tol-zero", v)?;
    }
    if let Some(v) = common.tol_eig {
        tols.eig_rel = positive("--tol-eig", v)?;
    }
    Ok(tols)
}

fn parse_point(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|_| Failure::input(format!("bad coordinate '{c}' in --point")))
        })
        .collect()
}

fn parse_box(text: &str) -> Result<Vec<(f64, f64)>, Failure> {
    text.split(';')
        .map(|axis| {
            let parts: Vec<&str> = axis.split(',').collect();
            if parts.len() != 2 {
                return Err(Failure::input(format!("bad box axis '{axis}', want 'lo,hi'")));
            }
            let lo = parts[0]
                .trim()
                .parse::<f64>()
                .map_err(|_| Failure::input(format!("bad bound '{}'", parts[0])))?;
            let hi = parts[1]
                .trim()
                .parse::<f64>()
                .map_err(|_| Failure::input(format!("bad bound '{}'", parts[1])))?;
            if !(lo < hi) {
                return Err(Failure::input(format!("box axis '{axis}' needs lo < hi")));
            }
            Ok((lo, hi))
        })
        .collect()
}

fn parse_levels(text: &str) -> Result<(f64, f64, usize), Failure> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(Failure::input("--levels wants 'amin,amax,steps'"));
    }
    let amin = parts[0]
        .trim()
        .parse::<f64>()
        .map_err(|_| Failure::input("bad amin in --levels"))?;
    let amax = parts[1]
        .trim()
        .parse::<f64>()
        .map_err(|_| Failure::input("bad amax in --levels"))?;
    let steps = parts[2]
        .trim()
        .parse::<usize>()
        .map_err(|_| Failure::input("bad step count in --levels"))?;
    Ok((amin, amax, steps))
}

fn planar_box(bounds: &[(f64, f64)]) -> Result<[(f64, f64); 2], Failure> {
    match bounds {
        [a, b] => Ok([*a, *b]),
        other => Err(Failure::input(format!("expected a 2-D box, got {} axes", other.len()))),
    }
}

fn emit(common: &CommonArgs, rendered: String) -> Result<(), Failure> {
    match &common.out {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

fn cmd_classify(args: ClassifyArgs) -> Result<(), Failure> {
    let problem = load_problem(&args.common.problem)?;
    let tols = tolerances(&args.common)?;
    let point = parse_point(&args.point)?;
    if point.len() != problem.n() {
        return Err(Failure::input(format!(
            "point has {} coordinates, problem dimension is {}",
            point.len(),
            problem.n()
        )));
    }
    let report = report::classify_point(&problem, &point, &tols)?;
    let rendered = match args.common.format {
        Format::Table => render_report(&report, &tols),
        Format::Json => to_json_text(&report.to_json()),
        Format::Csv => return Err(Failure::input("classify has no CSV form")),
    };
    emit(&args.common, rendered)
}

fn cmd_scan(args: ScanArgs) -> Result<(), Failure> {
    let problem = load_problem(&args.common.problem)?;
    let tols = tolerances(&args.common)?;
    let bounds = parse_box(&args.box_)?;
    let scan = morse::stratified_scan(&problem, &bounds, args.seeds, &tols)?;
    let rendered = match args.common.format {
        Format::Table => render_scan(&scan),
        Format::Json => to_json_text(&scan_json(&scan)),
        Format::Csv => return Err(Failure::input("scan has no CSV form")),
    };
    emit(&args.common, rendered)
}

fn cmd_regularize(args: RegularizeArgs) -> Result<(), Failure> {
    let problem = load_problem(&args.common.problem)?;
    let tols = tolerances(&args.common)?;
    let start = parse_point(&args.point)?;
    if start.len() != problem.n() {
        return Err(Failure::input("start point dimension mismatch"));
    }
    if !(args.t0 > 0.0) {
        return Err(Failure::input(format!("--t0 must be positive, got {}", args.t0)));
    }
    let path = regularization::path_follow(
        &problem,
        &start,
        args.t0,
        args.theta,
        args.steps,
        &tols,
    )?;
    let rendered = match args.common.format {
        Format::Table => render_path(&path),
        Format::Json => to_json_text(&path.to_json()),
        Format::Csv => return Err(Failure::input("regularize has no CSV form")),
    };
    emit(&args.common, rendered)
}

fn cmd_levelsets(args: LevelsetsArgs) -> Result<(), Failure> {
    let problem = load_problem(&args.common.problem)?;
    let tols = tolerances(&args.common)?;
    let bounds = planar_box(&parse_box(&args.box_)?)?;
    let (amin, amax, steps) = parse_levels(&args.levels)?;
    let profile = levelset::sweep(
        &problem,
        &bounds,
        args.resolution,
        amin,
        amax,
        steps,
        args.feas_scale,
        args.seeds,
        &tols,
    )?;
    let rendered = match args.common.format {
        Format::Table => render_profile(&profile),
        Format::Csv => profile.to_csv(),
        Format::Json => to_json_text(
            &serde_json::to_value(&profile).expect("profile serialization cannot fail"),
        ),
    };
    emit(&args.common, rendered)
}

fn to_json_text(value: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("json rendering cannot fail");
    text.push('\n');
    text
}

// ---------------------------------------------------------------------------
// Table rendering.
// ---------------------------------------------------------------------------

/// Short float form for tables: roundoff-level values print as 0.
fn fmt_f(v: f64) -> String {
    if v == 0.0 || v.abs() < 5e-13 {
        return "0".to_string();
    }
    if v.abs() >= 1e-4 && v.abs() < 1e7 {
        let mut s = format!("{v:.8}");
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
        s
    } else {
        format!("{v:e}")
    }
}

fn fmt_point(p: &[f64]) -> String {
    let coords: Vec<String> = p.iter().map(|v| fmt_f(*v)).collect();
    format!("({})", coords.join(", "))
}

fn yesno(v: bool) -> &'static str {
    if v {
        "yes"
    } else {
        "no"
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::NondegenerateLocalMin => "nondegenerate local minimizer",
        Verdict::NondegenerateSaddle => "nondegenerate saddle",
        Verdict::Degenerate => "degenerate",
        Verdict::NotTStationary => "not T-stationary",
    }
}

fn saddle_name(k: SaddleIndexKind) -> &'static str {
    match k {
        SaddleIndexKind::NotSaddleIndex => "-",
        SaddleIndexKind::SingularSaddleIndex => "singular",
        SaddleIndexKind::RegularSaddleIndex => "regular",
    }
}

fn saddle_summary(r: &StationarityReport) -> &'static str {
    if !r.saddle.is_first_order_saddle {
        "-"
    } else if r.saddle.is_singular && r.saddle.is_regular {
        "singular+regular"
    } else if r.saddle.is_singular {
        "singular"
    } else {
        "regular"
    }
}

fn render_report(r: &StationarityReport, tols: &Tolerances) -> String {
    let mut out = String::new();
    out.push_str(&format!("point:        {}\n", fmt_point(&r.point)));
    out.push_str(&format!("objective:    {}\n", fmt_f(r.objective)));
    out.push_str(&format!("feasible:     yes (tol {:e})\n", tols.activity));
    out.push_str(&format!(
        "LICQ:         {} (rank {}, active {}, sigma_min {})\n",
        yesno(r.licq.holds),
        r.licq.rank,
        r.licq.active,
        if r.licq.smallest_singular_value.is_finite() {
            fmt_f(r.licq.smallest_singular_value)
        } else {
            "-".to_string()
        }
    ));
    out.push_str(&format!("residual:     {:e}\n", r.residual));
    out.push_str("multipliers:\n");
    for (i, m) in r.multipliers.iter().enumerate() {
        let fmt_opt =
            |v: Option<f64>| v.map(fmt_f).unwrap_or_else(|| "-".to_string());
        out.push_str(&format!(
            "  {:>3}  lambda1 {:>12}  lambda2 {:>12}\n",
            i + 1,
            fmt_opt(m.lambda1),
            fmt_opt(m.lambda2)
        ));
    }
    // Implication-chain order, then the equation-level and Clarke flags.
    out.push_str("stationarity:\n");
    out.push_str(&format!("  Nhat (Frechet):   {}\n", yesno(r.flags.nhat)));
    out.push_str(&format!("  N (limiting):     {}\n", yesno(r.flags.n)));
    out.push_str(&format!("  T (topological):  {}\n", yesno(r.flags.t)));
    out.push_str(&format!("  Nbar (Clarke):    {}\n", yesno(r.flags.nbar)));
    out.push_str(&format!("  W (equation):     {}\n", yesno(r.flags.w)));
    if let Some(c) = r.flags.c {
        out.push_str(&format!("  C (subdifferential): {}\n", yesno(c)));
    }
    out.push_str("saddle:\n");
    for (i, k) in r.saddle.per_index.iter().enumerate() {
        out.push_str(&format!("  constraint {:>2}: {}\n", i + 1, saddle_name(*k)));
    }
    out.push_str(&format!(
        "  first-order saddle: {} (singular {}, regular {})\n",
        yesno(r.saddle.is_first_order_saddle),
        yesno(r.saddle.is_singular),
        yesno(r.saddle.is_regular)
    ));
    out.push_str(&format!("indices:      QI {}, BI {}, TI {}\n", r.qi, r.bi, r.ti));
    out.push_str(&format!(
        "nondegeneracy: ND1 {}, ND2 {}, ND3 {}\n",
        yesno(r.nd.nd1),
        yesno(r.nd.nd2),
        yesno(r.nd.nd3)
    ));
    out.push_str(&format!("verdict:      {}\n", verdict_name(r.verdict)));
    out
}

fn render_scan(scan: &ScanResult) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "stationary points: {} (seeds tried {}, dropped {})\n",
        scan.reports.len(),
        scan.seeds_tried,
        scan.seeds_dropped
    ));
    if scan.reports.is_empty() {
        return out;
    }
    out.push_str(&format!(
        "{:>3}  {:<24} {:>12}  {:>4} {:>4} {:>4} {:>4}  {:<16} {:>2} {:>2} {:>2}  {}\n",
        "#", "point", "f", "Nhat", "N", "T", "Nbar", "saddle", "QI", "BI", "TI", "verdict"
    ));
    for (k, r) in scan.reports.iter().enumerate() {
        out.push_str(&format!(
            "{:>3}  {:<24} {:>12}  {:>4} {:>4} {:>4} {:>4}  {:<16} {:>2} {:>2} {:>2}  {}\n",
            k + 1,
            fmt_point(&r.point),
            fmt_f(r.objective),
            yesno(r.flags.nhat),
            yesno(r.flags.n),
            yesno(r.flags.t),
            yesno(r.flags.nbar),
            saddle_summary(r),
            r.qi,
            r.bi,
            r.ti,
            verdict_name(r.verdict)
        ));
    }
    out
}

/// The machine-readable scan form is a bare array of per-point reports;
/// seed bookkeeping appears only in the human-readable table.
fn scan_json(scan: &ScanResult) -> serde_json::Value {
    serde_json::Value::Array(scan.reports.iter().map(|r| r.to_json()).collect())
}

fn render_path(path: &ScholtesPath) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "relaxation path: {} states, {}\n",
        path.states.len(),
        if path.completed { "completed" } else { "stopped early (Newton divergence)" }
    ));
    out.push_str(&format!("{:>3}  {:>12}  {:<28} {:>12}\n", "k", "t", "x", "kkt residual"));
    for (k, s) in path.states.iter().enumerate() {
        out.push_str(&format!(
            "{:>3}  {:>12}  {:<28} {:>12.3e}\n",
            k,
            format!("{:.4e}", s.t),
            fmt_point(&s.x),
            s.kkt_residual
        ));
    }
    out.push_str(&format!("limit: {}\n", fmt_point(&path.limit)));
    match &path.limit_report {
        Some(r) => {
            out.push_str(&format!(
                "limit classification: Nhat {}, N {}, T {}, Nbar {}; {}\n",
                yesno(r.flags.nhat),
                yesno(r.flags.n),
                yesno(r.flags.t),
                yesno(r.flags.nbar),
                verdict_name(r.verdict)
            ));
        }
        None => out.push_str("limit classification: unavailable\n"),
    }
    out
}

fn render_profile(profile: &LevelProfile) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "level profile: resolution {}, box [{}, {}] x [{}, {}], feas scale {}\n",
        profile.resolution,
        fmt_f(profile.bounds[0].0),
        fmt_f(profile.bounds[0].1),
        fmt_f(profile.bounds[1].0),
        fmt_f(profile.bounds[1].1),
        profile.feas_scale
    ));
    out.push_str(&format!("{:>12}  {:>10}  {:>14}\n", "a", "components", "feasible_cells"));
    for e in &profile.entries {
        out.push_str(&format!(
            "{:>12}  {:>10}  {:>14}\n",
            fmt_f(e.a),
            e.components,
            e.feasible_cells
        ));
    }
    if profile.change_levels.is_empty() {
        out.push_str("no component-count changes in the sweep range\n");
    } else {
        out.push_str("change levels:\n");
        for m in &profile.matches {
            match m.nearest_value {
                Some(v) => out.push_str(&format!(
                    "  {} (nearest T-stationary value {}, gap {})\n",
                    fmt_f(m.change_level),
                    fmt_f(v),
                    fmt_f(m.gap)
                )),
                None => out.push_str(&format!(
                    "  {} (no T-stationary value found by the scan)\n",
                    fmt_f(m.change_level)
                )),
            }
        }
    }
    out
}
