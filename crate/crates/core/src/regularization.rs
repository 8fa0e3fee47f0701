//! Regularization of complementarity constraints and path following.
//!
//! The complementarity cone is relaxed to
//! `K(t) = { a : a1*a2 <= t, a1 >= 0, a2 >= 0 }` for `t > 0`, turning the
//! instance into an ordinary NLP with three inequality constraints per
//! pair: `t - F1*F2 >= 0`, `F1 >= 0`, `F2 >= 0`. KKT points of the NLP are
//! found by enumerating active subsets and Newton-solving the equality KKT
//! system of each; a path follower then drives `t` to zero geometrically
//! and classifies the limit against the original problem, where the KKT
//! points converge to T-stationary points (and in general only to those —
//! limits may be regular first-order saddles that no stronger notion keeps).
//!
//! Only the complementarity cone has this relaxation here; the other cones
//! are rejected as unsupported.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::linalg::{self, Mat};
use crate::morse::{self, inside, quantized_lex, seed_grid};
use crate::newton;
use crate::problem::{ConeKind, SnoProblem};
use crate::report::{self, StationarityReport};
use crate::tol::Tolerances;

/// The NLP obtained by relaxing the complementarity cone at parameter `t`.
pub struct ScholtesNlp {
    n: usize,
    t: f64,
    objective: Expr,
    /// Inequality constraints `g_j(x) >= 0`, three per constraint pair in
    /// the order: relaxed product, first component, second component.
    constraints: Vec<Expr>,
}

/// Assemble the relaxed NLP. Errors on non-complementarity cones and on
/// `t <= 0`.
pub fn build_nlp_t(p: &SnoProblem, t: f64) -> Result<ScholtesNlp> {
    if p.cone() != ConeKind::Complementarity {
        return Err(Error::UnsupportedCone { op: "regularization", cone: p.cone() });
    }
    if !(t > 0.0) {
        return Err(Error::invalid(format!("regularization parameter must be positive, got {t}")));
    }
    let mut constraints = Vec::with_capacity(3 * p.m());
    for pair in p.pairs() {
        constraints.push(Expr::sub(
            Expr::constant(t),
            Expr::mul(pair.f1.clone(), pair.f2.clone()),
        ));
        constraints.push(pair.f1.clone());
        constraints.push(pair.f2.clone());
    }
    Ok(ScholtesNlp { n: p.n(), t, objective: p.objective().clone(), constraints })
}

impl ScholtesNlp {
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    pub fn constraint(&self, j: usize) -> &Expr {
        &self.constraints[j]
    }

    fn constraint_values(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.constraints.iter().map(|g| g.eval(x)).collect()
    }

    /// Worst KKT violation at `(x, μ)`: stationarity, complementarity
    /// products, primal feasibility, and multiplier sign, all folded into a
    /// single max.
    pub fn kkt_residual(&self, x: &[f64], mu: &[f64]) -> Result<f64> {
        let mut grad = self.objective.gradient_at(self.n, x)?;
        for (g, &m) in self.constraints.iter().zip(mu) {
            if m != 0.0 {
                let gg = g.gradient_at(self.n, x)?;
                for (a, b) in grad.iter_mut().zip(&gg) {
                    *a -= m * b;
                }
            }
        }
        let mut worst = linalg::norm_inf(&grad);
        for (g, &m) in self.constraints.iter().zip(mu) {
            let v = g.eval(x)?;
            worst = worst.max((m * v).abs());
            worst = worst.max((-v).max(0.0));
            worst = worst.max((-m).max(0.0));
        }
        Ok(worst)
    }
}

/// One KKT point of the relaxed NLP: the point, the full multiplier vector
/// (zeros on inactive constraints), and the active subset.
#[derive(Debug, Clone)]
pub struct KktPoint {
    pub x: Vec<f64>,
    pub multipliers: Vec<f64>,
    pub active: Vec<usize>,
}

/// Enumerate the KKT points of the relaxed NLP inside `bounds` by solving
/// the equality KKT system of every active subset from a seed grid and
/// filtering by primal feasibility and multiplier signs. The subset count
/// `2^constraints` is capped at 4096.
pub fn kkt_points_at(
    nlp: &ScholtesNlp,
    bounds: &[(f64, f64)],
    seeds_per_axis: usize,
    tols: &Tolerances,
) -> Result<Vec<KktPoint>> {
    let c = nlp.constraints.len();
    let cap = 4096usize;
    let subsets = 1usize.checked_shl(c as u32).unwrap_or(usize::MAX);
    if subsets > cap {
        return Err(Error::ActiveSetCap { needed: subsets, cap });
    }
    if bounds.len() != nlp.n {
        return Err(Error::invalid("box dimension mismatch"));
    }
    if seeds_per_axis < 2 {
        return Err(Error::invalid("seeds_per_axis must be at least 2"));
    }
    let seeds = seed_grid(bounds, seeds_per_axis);
    // At parameters where two KKT branches collide the root doubles and the
    // attainable Newton accuracy degrades to roughly the cube root of
    // machine epsilon. A larger iteration budget lets at least the
    // symmetric seeds grind close to such roots; candidates are then
    // clustered at a radius above the accuracy floor and each cluster
    // reports its best-converged member.
    let mut tols = *tols;
    tols.newton_max_iter = tols.newton_max_iter.max(200);
    let tols = &tols;
    let cluster_radius = tols.dedupe_radius.max(1e-4);
    let mut found: Vec<(Vec<f64>, Vec<f64>, Vec<usize>, f64)> = Vec::new();
    for mask in 0..subsets {
        let active: Vec<usize> = (0..c).filter(|j| mask & (1 << j) != 0).collect();
        if active.len() > nlp.n {
            // More tight constraints than variables cannot be regular.
            continue;
        }
        for seed in &seeds {
            let mu0 = vec![1.0; active.len()];
            if let Some((x, mu_active, newton_res)) =
                solve_active_kkt(nlp, &active, seed, &mu0, true, tols)
            {
                if !inside(&x, bounds, 1e-9) {
                    continue;
                }
                if !accept_kkt(nlp, &active, &x, &mu_active, tols) {
                    continue;
                }
                let mut mu_full = vec![0.0; c];
                for (&j, &m) in active.iter().zip(&mu_active) {
                    mu_full[j] = m;
                }
                found.push((x, mu_full, active.clone(), newton_res));
            }
        }
    }
    found.sort_by(|a, b| quantized_lex(&a.0, &b.0, tols.dedupe_radius));
    let mut clusters: Vec<(Vec<f64>, Vec<f64>, Vec<usize>, f64)> = Vec::new();
    for (x, mu, active, res) in found {
        let near = clusters.iter_mut().find(|k| {
            x.iter().zip(&k.0).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max)
                <= cluster_radius
        });
        match near {
            Some(k) if res < k.3 => *k = (x, mu, active, res),
            Some(_) => {}
            None => clusters.push((x, mu, active, res)),
        }
    }
    clusters.sort_by(|a, b| quantized_lex(&a.0, &b.0, tols.dedupe_radius));
    Ok(clusters
        .into_iter()
        .map(|(x, multipliers, active, _)| KktPoint { x, multipliers, active })
        .collect())
}

fn accept_kkt(
    nlp: &ScholtesNlp,
    active: &[usize],
    x: &[f64],
    mu_active: &[f64],
    tols: &Tolerances,
) -> bool {
    if mu_active.iter().any(|&m| m < -tols.zero) {
        return false;
    }
    let Ok(values) = nlp.constraint_values(x) else { return false };
    for (j, v) in values.iter().enumerate() {
        if !active.contains(&j) && *v < -tols.activity {
            return false;
        }
    }
    true
}

/// Newton on the equality KKT system of one active subset: stationarity
/// plus `g_j(x) = 0` for the chosen `j`. Cold starts (enumeration) use the
/// damped solver; warm starts (path corrections) use plain Newton, whose
/// natural iterates may pass through transiently larger residuals.
fn solve_active_kkt(
    nlp: &ScholtesNlp,
    active: &[usize],
    x0: &[f64],
    mu0: &[f64],
    damped: bool,
    tols: &Tolerances,
) -> Option<(Vec<f64>, Vec<f64>, f64)> {
    let n = nlp.n;
    let k = active.len();
    let residual = |z: &[f64]| -> Vec<f64> {
        let x = &z[..n];
        let mut r = match nlp.objective.gradient_at(n, x) {
            Ok(g) => g,
            Err(_) => return vec![f64::NAN; n + k],
        };
        for (c, &j) in active.iter().enumerate() {
            match nlp.constraints[j].gradient_at(n, x) {
                Ok(g) => {
                    for (rr, gg) in r.iter_mut().zip(&g) {
                        *rr -= z[n + c] * gg;
                    }
                }
                Err(_) => return vec![f64::NAN; n + k],
            }
        }
        for &j in active {
            match nlp.constraints[j].eval(x) {
                Ok(v) => r.push(v),
                Err(_) => return vec![f64::NAN; n + k],
            }
        }
        r
    };
    let jacobian = |z: &[f64]| -> Mat {
        let x = &z[..n];
        let mut jmat = Mat::zeros(n + k, n + k);
        let Ok(hf) = nlp.objective.hessian_at(n, x) else { return jmat };
        for r in 0..n {
            for c in 0..n {
                jmat[(r, c)] = hf[(r, c)];
            }
        }
        for (c, &j) in active.iter().enumerate() {
            let e = &nlp.constraints[j];
            let (Ok(h), Ok(g)) = (e.hessian_at(n, x), e.gradient_at(n, x)) else {
                return jmat;
            };
            for r in 0..n {
                for cc in 0..n {
                    jmat[(r, cc)] -= z[n + c] * h[(r, cc)];
                }
                jmat[(r, n + c)] = -g[r];
                jmat[(n + c, r)] = g[r];
            }
        }
        jmat
    };
    let mut z0 = x0.to_vec();
    z0.extend_from_slice(mu0);
    let result = if damped {
        newton::solve(&z0, residual, jacobian, tols)
    } else {
        newton::solve_plain(&z0, residual, jacobian, tols)
    };
    if result.converged && result.residual_norm <= tols.newton_residual {
        Some((result.z[..n].to_vec(), result.z[n..].to_vec(), result.residual_norm))
    } else {
        None
    }
}

/// One accepted state along the path.
#[derive(Debug, Clone)]
pub struct PathState {
    pub t: f64,
    pub x: Vec<f64>,
    pub multipliers: Vec<f64>,
    pub kkt_residual: f64,
}

/// Result of following the regularization path `t_k = t0 * theta^k`.
#[derive(Debug, Clone)]
pub struct ScholtesPath {
    pub schedule: Vec<f64>,
    pub states: Vec<PathState>,
    /// False when Newton diverged at some step; `states` then holds the
    /// part of the path that was completed.
    pub completed: bool,
    /// The stationary point of the original problem the path converges to:
    /// the final iterate polished onto its active branch when that Newton
    /// polish succeeds, otherwise the raw final iterate.
    pub limit: Vec<f64>,
    /// Classification of `limit` against the original problem.
    pub limit_report: Option<StationarityReport>,
}

impl ScholtesPath {
    /// JSON form: an array of `{t, x, residual}` records; the final record
    /// also carries the limit and its report.
    pub fn to_json(&self) -> serde_json::Value {
        let mut records: Vec<serde_json::Value> = self
            .states
            .iter()
            .map(|s| {
                serde_json::json!({
                    "t": s.t,
                    "x": s.x,
                    "residual": s.kkt_residual,
                })
            })
            .collect();
        if let Some(last) = records.last_mut() {
            last["limit"] = serde_json::json!(self.limit);
            last["completed"] = serde_json::json!(self.completed);
            if let Some(report) = &self.limit_report {
                last["report"] = report.to_json();
            }
        }
        serde_json::Value::Array(records)
    }
}

/// Follow the path from a point near a KKT point of the NLP at `t0`.
///
/// Each step shrinks `t` by `theta` and re-solves with the inherited active
/// set, dropping constraints whose multipliers went negative and adding
/// violated ones (at most 5 such pivots per step). `steps == 0` records the
/// state at `t0` only.
pub fn path_follow(
    p: &SnoProblem,
    start: &[f64],
    t0: f64,
    theta: f64,
    steps: usize,
    tols: &Tolerances,
) -> Result<ScholtesPath> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::invalid(format!("theta must lie in (0,1), got {theta}")));
    }
    if start.len() != p.n() {
        return Err(Error::invalid("start point dimension mismatch"));
    }
    let mut schedule = vec![t0];
    for k in 1..=steps {
        schedule.push(t0 * theta.powi(k as i32));
    }

    let mut states: Vec<PathState> = Vec::new();
    let mut completed = true;
    // Initial active set from the constraint values at the start point.
    let nlp0 = build_nlp_t(p, t0)?;
    let g0 = nlp0.constraint_values(start)?;
    let mut active: Vec<usize> = g0
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() <= 1e-6)
        .map(|(j, _)| j)
        .collect();
    let mut x = start.to_vec();
    let mut mu_by_constraint = vec![0.0; nlp0.constraint_count()];

    for &t in &schedule {
        let nlp = build_nlp_t(p, t)?;
        match solve_with_pivoting(&nlp, &mut active, &x, &mu_by_constraint, tols) {
            Some((xs, mu_full)) => {
                let kkt = nlp.kkt_residual(&xs, &mu_full)?;
                x = xs;
                mu_by_constraint = mu_full;
                states.push(PathState { t, x: x.clone(), multipliers: mu_by_constraint.clone(), kkt_residual: kkt });
            }
            None => {
                completed = false;
                break;
            }
        }
    }

    let (limit, limit_report) = match states.last() {
        Some(last) => classify_limit(p, &last.x, last.t, tols)?,
        None => (start.to_vec(), None),
    };
    Ok(ScholtesPath { schedule, states, completed, limit, limit_report })
}

/// Solve at one `t` with active-set revalidation.
fn solve_with_pivoting(
    nlp: &ScholtesNlp,
    active: &mut Vec<usize>,
    x0: &[f64],
    mu_prev: &[f64],
    tols: &Tolerances,
) -> Option<(Vec<f64>, Vec<f64>)> {
    let c = nlp.constraint_count();
    for _pivot in 0..=5 {
        let mu0: Vec<f64> = active.iter().map(|&j| mu_prev[j].max(0.0)).collect();
        let (x, mu_active, _) = solve_active_kkt(nlp, active, x0, &mu0, false, tols)?;
        // Drop constraints with negative multipliers, add violated ones.
        let mut next: Vec<usize> = active
            .iter()
            .zip(&mu_active)
            .filter(|(_, &m)| m >= -tols.zero)
            .map(|(&j, _)| j)
            .collect();
        let values = nlp.constraint_values(&x).ok()?;
        for (j, v) in values.iter().enumerate() {
            if !next.contains(&j) && *v < -tols.activity.max(1e-10) {
                next.push(j);
            }
        }
        next.sort_unstable();
        if next == *active {
            let mut mu_full = vec![0.0; c];
            for (&j, &m) in active.iter().zip(&mu_active) {
                mu_full[j] = m;
            }
            return Some((x, mu_full));
        }
        *active = next;
    }
    None
}

/// Classify the path limit against the original problem. The final iterate
/// sits on the relaxed boundary at distance O(sqrt(t)) from the limiting
/// stationary point, so the near-active components are detected at scale
/// `2*sqrt(t)` and the point is Newton-polished onto that branch; when the
/// polish fails, the raw iterate is classified with the activity tolerance
/// widened to the same scale.
fn classify_limit(
    p: &SnoProblem,
    x: &[f64],
    t: f64,
    tols: &Tolerances,
) -> Result<(Vec<f64>, Option<StationarityReport>)> {
    let scale = tols.activity.max(2.0 * t.sqrt());
    let mut components: Vec<(usize, bool)> = Vec::new();
    for (i, pair) in p.pairs().iter().enumerate() {
        if pair.f1.eval(x)?.abs() <= scale {
            components.push((i, false));
        }
        if pair.f2.eval(x)?.abs() <= scale {
            components.push((i, true));
        }
    }
    let polish_radius = 10.0 * t.sqrt() + tols.dedupe_radius;
    if let Some(polished) = morse::solve_pattern(p, &components, x, tols) {
        let moved =
            x.iter().zip(&polished).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max);
        if moved <= polish_radius {
            if let Ok(report) = report::classify_point(p, &polished, tols) {
                return Ok((polished, Some(report)));
            }
        }
    }
    let mut wide = *tols;
    wide.activity = scale;
    let report = report::classify_point(p, x, &wide).ok();
    Ok((x.to_vec(), report))
}
