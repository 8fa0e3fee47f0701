//! Second-order analysis: Lagrangian Hessians on the tangent space,
//! quadratic/biactive/T-indices, nondegeneracy, and a stratified scan that
//! enumerates the stationary candidates of a desk-scale instance.
//!
//! The Lagrange function is `L = f − Σ (λ1_i F1_i + λ2_i F2_i)` over the
//! locally binding components with their multipliers. Its Hessian restricted
//! to the tangent space of the active equalities drives the quadratic index
//! QI (number of negative eigenvalues); the biactive index BI counts the
//! "fully signed" biactive pairs per cone; their sum TI decides between a
//! local minimizer (TI = 0) and a saddle at nondegenerate points.
//!
//! Tangent-space convention for mixed activity patterns: biactive
//! constraints contribute both gradient rows, reduced equality branches one
//! row, and reduced inequality branches one row only when their multiplier
//! is nonzero — a weakly active inequality does not constrain the tangent
//! space for index counting.

use serde::Serialize;

use crate::error::Result;
use crate::linalg::{self, Mat};
use crate::newton;
use crate::problem::{ActivePattern, ActivityStatus, ConeKind, SnoProblem};
use crate::report::{self, StationarityReport};
use crate::stationarity::{self, MultiplierSet, ReducedBranch};
use crate::tol::Tolerances;

/// Hessian of the Lagrange function at `x`:
/// `D²f(x) − Σ λ1_i D²F1_i(x) + λ2_i D²F2_i(x)` over components carrying a
/// multiplier. With no multipliers this is just the objective Hessian.
pub fn lagrangian_hessian(p: &SnoProblem, x: &[f64], ms: &MultiplierSet) -> Result<Mat> {
    let n = p.n();
    let mut h = p.objective().hessian_at(n, x)?;
    for (i, pair) in p.pairs().iter().enumerate() {
        if let Some(l1) = ms.lambda1[i] {
            if l1 != 0.0 {
                let hf = pair.f1.hessian_at(n, x)?;
                for r in 0..n {
                    for c in 0..n {
                        h[(r, c)] -= l1 * hf[(r, c)];
                    }
                }
            }
        }
        if let Some(l2) = ms.lambda2[i] {
            if l2 != 0.0 {
                let hf = pair.f2.hessian_at(n, x)?;
                for r in 0..n {
                    for c in 0..n {
                        h[(r, c)] -= l2 * hf[(r, c)];
                    }
                }
            }
        }
    }
    Ok(h)
}

/// Gradient rows that pin the tangent space at `x` under the activity
/// pattern (see the module doc for the mixed-pattern convention).
fn tangent_rows(
    p: &SnoProblem,
    x: &[f64],
    pattern: &ActivePattern,
    ms: &MultiplierSet,
    tols: &Tolerances,
) -> Result<Mat> {
    let n = p.n();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, pair) in p.pairs().iter().enumerate() {
        match pattern.statuses[i] {
            ActivityStatus::Biactive => {
                rows.push(pair.f1.gradient_at(n, x)?);
                rows.push(pair.f2.gradient_at(n, x)?);
            }
            ActivityStatus::FirstActive => {
                let branch = stationarity::reduced_branch(p.cone(), false, pattern.values[i].1);
                let strongly = branch == ReducedBranch::Equality
                    || !tols.is_zero(ms.lambda1[i].unwrap_or(0.0));
                if strongly {
                    rows.push(pair.f1.gradient_at(n, x)?);
                }
            }
            ActivityStatus::SecondActive => {
                let branch = stationarity::reduced_branch(p.cone(), true, pattern.values[i].0);
                let strongly = branch == ReducedBranch::Equality
                    || !tols.is_zero(ms.lambda2[i].unwrap_or(0.0));
                if strongly {
                    rows.push(pair.f2.gradient_at(n, x)?);
                }
            }
            ActivityStatus::Inactive => {}
        }
    }
    Ok(if rows.is_empty() { Mat::zeros(0, n) } else { Mat::from_rows(&rows) })
}

/// Orthonormal basis of the tangent space at `x`.
pub fn tangent_basis(
    p: &SnoProblem,
    x: &[f64],
    pattern: &ActivePattern,
    ms: &MultiplierSet,
    tols: &Tolerances,
) -> Result<Mat> {
    let rows = tangent_rows(p, x, pattern, ms, tols)?;
    let ns = linalg::null_space(&rows, tols.sigma_threshold(1.0));
    Ok(ns.basis)
}

/// Lagrangian Hessian, tangent basis, and the restricted Hessian with its
/// eigenvalues, bundled for reporting.
#[derive(Debug, Clone)]
pub struct LagrangeData {
    pub hessian_l: Mat,
    pub tangent_basis: Mat,
    pub restricted_hessian: Mat,
    /// Ascending eigenvalues of the restricted Hessian.
    pub eigenvalues: Vec<f64>,
}

pub fn lagrange_data(
    p: &SnoProblem,
    x: &[f64],
    pattern: &ActivePattern,
    ms: &MultiplierSet,
    tols: &Tolerances,
) -> Result<LagrangeData> {
    let hessian_l = lagrangian_hessian(p, x, ms)?;
    let basis = tangent_basis(p, x, pattern, ms, tols)?;
    let restricted = basis.congruence(&hessian_l);
    let (eigenvalues, _) = linalg::sym_eigen(&restricted);
    Ok(LagrangeData { hessian_l, tangent_basis: basis, restricted_hessian: restricted, eigenvalues })
}

/// Quadratic index and the ND3 nonsingularity flag from the restricted
/// Hessian eigenvalues. An empty tangent space gives `QI = 0` with ND3 true.
pub fn quadratic_index(eigenvalues: &[f64], tols: &Tolerances) -> (usize, bool) {
    if eigenvalues.is_empty() {
        return (0, true);
    }
    let max_abs = eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let threshold = tols.eig_threshold(max_abs);
    let qi = eigenvalues.iter().filter(|&&v| v < -threshold).count();
    let min_abs = eigenvalues.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    (qi, min_abs > threshold)
}

/// Biactive index: for complementarity constraints the number of negative
/// biactive pairs, for the other cones the number of biactive pairs with
/// both multipliers nonzero.
pub fn biactive_index(
    ms: &MultiplierSet,
    pattern: &ActivePattern,
    cone: ConeKind,
    tols: &Tolerances,
) -> usize {
    pattern
        .biactive()
        .into_iter()
        .filter(|&i| {
            let (l1, l2) = ms.biactive_pair(i);
            match cone {
                ConeKind::Complementarity => tols.is_neg(l1) && tols.is_neg(l2),
                _ => !tols.is_zero(l1) && !tols.is_zero(l2),
            }
        })
        .count()
}

/// ND1 (constraint qualification), ND2 (no vanishing biactive multiplier),
/// ND3 (nonsingular restricted Hessian).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NdFlags {
    pub nd1: bool,
    pub nd2: bool,
    pub nd3: bool,
}

impl NdFlags {
    pub fn all(&self) -> bool {
        self.nd1 && self.nd2 && self.nd3
    }
}

pub fn nondegeneracy(
    licq_holds: bool,
    ms: &MultiplierSet,
    pattern: &ActivePattern,
    nd3: bool,
    tols: &Tolerances,
) -> NdFlags {
    let nd2 = pattern.biactive().into_iter().all(|i| {
        let (l1, l2) = ms.biactive_pair(i);
        !tols.is_zero(l1) && !tols.is_zero(l2)
    });
    NdFlags { nd1: licq_holds, nd2, nd3 }
}

/// Morse-theoretic verdict for a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    NondegenerateLocalMin,
    NondegenerateSaddle,
    Degenerate,
    NotTStationary,
}

/// Index and nondegeneracy summary. `ti == qi + bi` always holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MorseReport {
    #[serde(rename = "QI")]
    pub qi: usize,
    #[serde(rename = "BI")]
    pub bi: usize,
    #[serde(rename = "TI")]
    pub ti: usize,
    #[serde(flatten)]
    pub nd: NdFlags,
    pub verdict: Verdict,
}

pub fn morse_verdict(t_stationary: bool, nd: NdFlags, qi: usize, bi: usize) -> MorseReport {
    let ti = qi + bi;
    let verdict = if !t_stationary {
        Verdict::NotTStationary
    } else if nd.all() {
        if ti == 0 {
            Verdict::NondegenerateLocalMin
        } else {
            Verdict::NondegenerateSaddle
        }
    } else {
        Verdict::Degenerate
    };
    MorseReport { qi, bi, ti, nd, verdict }
}

/// Scan outcome: classified stationary candidates, deduplicated and sorted
/// lexicographically by coordinates, plus seed bookkeeping.
#[derive(Debug, Clone)]
pub struct ScanResult {
    pub reports: Vec<StationarityReport>,
    pub seeds_tried: usize,
    pub seeds_dropped: usize,
}

impl ScanResult {
    /// Points of the scan, in reporting order.
    pub fn points(&self) -> Vec<Vec<f64>> {
        self.reports.iter().map(|r| r.point.clone()).collect()
    }

    /// Only the T-stationary entries.
    pub fn t_stationary(&self) -> Vec<&StationarityReport> {
        self.reports.iter().filter(|r| r.flags.t).collect()
    }
}

/// Branch choice per constraint in the stratified enumeration.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Branch {
    None,
    First,
    Second,
    Both,
}

const BRANCHES: [Branch; 4] = [Branch::None, Branch::First, Branch::Second, Branch::Both];

/// Enumerate candidate stationary points of `p` inside `bounds`.
///
/// Every branch pattern over the constraints (each constraint pinned to
/// `F1 = 0`, `F2 = 0`, both, or neither) yields a square system of the
/// pattern equalities plus the stationarity equation restricted to the
/// pattern's multipliers. Newton runs from a uniform seed grid; converged
/// solutions are kept when they lie in the box, are feasible, satisfy the
/// constraint qualification, and are W-stationary. Survivors are
/// deduplicated by `tols.dedupe_radius` in the max norm and classified.
pub fn stratified_scan(
    p: &SnoProblem,
    bounds: &[(f64, f64)],
    seeds_per_axis: usize,
    tols: &Tolerances,
) -> Result<ScanResult> {
    let n = p.n();
    if bounds.len() != n {
        return Err(crate::error::Error::invalid(format!(
            "box has {} axes for dimension {n}",
            bounds.len()
        )));
    }
    if bounds.iter().any(|(lo, hi)| lo >= hi) {
        return Err(crate::error::Error::invalid("box bounds must satisfy lo < hi"));
    }
    if seeds_per_axis < 2 {
        return Err(crate::error::Error::invalid("seeds_per_axis must be at least 2"));
    }
    let m = p.m();
    let seeds = seed_grid(bounds, seeds_per_axis);
    let mut accepted: Vec<Vec<f64>> = Vec::new();
    let mut seeds_tried = 0usize;
    let mut seeds_dropped = 0usize;

    let mut pattern = vec![Branch::None; m];
    for code in 0..4usize.pow(m as u32) {
        let mut c = code;
        for slot in pattern.iter_mut() {
            *slot = BRANCHES[c % 4];
            c /= 4;
        }
        let components = pattern_components(&pattern);
        for seed in &seeds {
            seeds_tried += 1;
            match solve_pattern(p, &components, seed, tols) {
                Some(x) => {
                    if !inside(&x, bounds, 1e-9) {
                        seeds_dropped += 1;
                        continue;
                    }
                    let keep = (|| -> Result<bool> {
                        if !p.feasible(&x, tols.activity)? {
                            return Ok(false);
                        }
                        if !stationarity::licq(p, &x, tols)?.holds {
                            return Ok(false);
                        }
                        let ms = stationarity::solve_multipliers(p, &x, tols)?;
                        Ok(ms.residual <= tols.w_residual)
                    })()
                    .unwrap_or(false);
                    if keep {
                        accepted.push(x);
                    } else {
                        seeds_dropped += 1;
                    }
                }
                None => seeds_dropped += 1,
            }
        }
    }

    accepted.sort_by(|a, b| quantized_lex(a, b, tols.dedupe_radius));
    let mut kept: Vec<Vec<f64>> = Vec::new();
    for x in accepted {
        let dup = kept.iter().any(|y| {
            x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max)
                <= tols.dedupe_radius
        });
        if !dup {
            kept.push(x);
        }
    }

    let reports = kept
        .into_iter()
        .map(|x| report::classify_point(p, &x, tols))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult { reports, seeds_tried, seeds_dropped })
}

/// Lexicographic order on coordinates quantized to multiples of `q`, with
/// the raw coordinates as a tiebreak. Quantization keeps roundoff-level
/// signs (say -1e-32 versus 0) from scrambling the reporting order of
/// well-separated points, and the composition is a total order, unlike a
/// tolerance-based comparison.
pub(crate) fn quantized_lex(a: &[f64], b: &[f64], q: f64) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let (qx, qy) = ((x / q).round(), (y / q).round());
        if qx != qy {
            return qx.partial_cmp(&qy).unwrap();
        }
    }
    a.partial_cmp(b).unwrap()
}

pub(crate) fn seed_grid(bounds: &[(f64, f64)], per_axis: usize) -> Vec<Vec<f64>> {
    let n = bounds.len();
    let total = per_axis.pow(n as u32);
    let mut seeds = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rem = idx;
        let mut point = Vec::with_capacity(n);
        for (lo, hi) in bounds {
            let i = rem % per_axis;
            rem /= per_axis;
            point.push(lo + (hi - lo) * i as f64 / (per_axis - 1) as f64);
        }
        seeds.push(point);
    }
    seeds
}

pub(crate) fn inside(x: &[f64], bounds: &[(f64, f64)], slack: f64) -> bool {
    x.iter().zip(bounds).all(|(v, (lo, hi))| *v >= lo - slack && *v <= hi + slack)
}

/// Components `(constraint, is_second)` pinned to zero by the pattern.
fn pattern_components(pattern: &[Branch]) -> Vec<(usize, bool)> {
    let mut comps = Vec::new();
    for (i, b) in pattern.iter().enumerate() {
        if matches!(b, Branch::First | Branch::Both) {
            comps.push((i, false));
        }
        if matches!(b, Branch::Second | Branch::Both) {
            comps.push((i, true));
        }
    }
    comps
}

/// Newton-solve the stratified system for one pattern from one seed.
/// Unknowns are `x` followed by one multiplier per pinned component;
/// equations are the stationarity equation and the pinned values.
/// Also used to polish regularization-path limits onto the feasible set.
pub(crate) fn solve_pattern(
    p: &SnoProblem,
    components: &[(usize, bool)],
    seed: &[f64],
    tols: &Tolerances,
) -> Option<Vec<f64>> {
    let n = p.n();
    let k = components.len();
    let comp_expr = |i: usize, second: bool| {
        let pair = &p.pairs()[i];
        if second {
            &pair.f2
        } else {
            &pair.f1
        }
    };
    let residual = |z: &[f64]| -> Vec<f64> {
        let x = &z[..n];
        let mut r = match p.objective().gradient_at(n, x) {
            Ok(g) => g,
            Err(_) => return vec![f64::NAN; n + k],
        };
        for (c, &(i, second)) in components.iter().enumerate() {
            let lambda = z[n + c];
            match comp_expr(i, second).gradient_at(n, x) {
                Ok(g) => {
                    for (rj, gj) in r.iter_mut().zip(&g) {
                        *rj -= lambda * gj;
                    }
                }
                Err(_) => return vec![f64::NAN; n + k],
            }
        }
        for &(i, second) in components {
            match comp_expr(i, second).eval(x) {
                Ok(v) => r.push(v),
                Err(_) => return vec![f64::NAN; n + k],
            }
        }
        r
    };
    let jacobian = |z: &[f64]| -> Mat {
        let x = &z[..n];
        let mut j = Mat::zeros(n + k, n + k);
        let hf = match p.objective().hessian_at(n, x) {
            Ok(h) => h,
            Err(_) => return j,
        };
        for r in 0..n {
            for c in 0..n {
                j[(r, c)] = hf[(r, c)];
            }
        }
        for (c, &(i, second)) in components.iter().enumerate() {
            let lambda = z[n + c];
            let e = comp_expr(i, second);
            let (Ok(h), Ok(g)) = (e.hessian_at(n, x), e.gradient_at(n, x)) else {
                return j;
            };
            for r in 0..n {
                for cc in 0..n {
                    j[(r, cc)] -= lambda * h[(r, cc)];
                }
                j[(r, n + c)] = -g[r];
                j[(n + c, r)] = g[r];
            }
        }
        j
    };
    let mut z0 = seed.to_vec();
    z0.extend(std::iter::repeat(0.0).take(k));
    let result = newton::solve(&z0, residual, jacobian, tols);
    if result.converged && result.residual_norm <= tols.newton_residual {
        Some(result.z[..n].to_vec())
    } else {
        None
    }
}
