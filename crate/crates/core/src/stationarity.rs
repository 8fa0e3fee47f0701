//! Stationarity classification.
//!
//! At a feasible point the classifiers proceed in three steps: check the
//! constraint qualification (linear independence of all active component
//! gradients), solve the stationarity equation
//! `∇f(x) = Σ λ1_i ∇F1_i(x) + λ2_i ∇F2_i(x)` for the unique least-squares
//! multipliers, and then read the per-cone sign tables. The notions form a
//! chain: Fréchet implies limiting implies T implies Clarke, and W (the
//! equation alone, no sign restrictions) is weakest of all.
//!
//! Constraints that are active but not biactive reduce locally to a smooth
//! equality or inequality; the reduction branch per cone is encoded in
//! [`reduced_branch`]. Equality branches impose no sign condition, while
//! inequality branches impose the usual KKT sign on their multiplier, for
//! every notion alike.
//!
//! A hierarchy note on the vanishing cone: its limiting/Fréchet tables
//! differ from the disjunctive ones even though parts of the literature
//! conflate the two; here the disjunctive tables are
//! `λ1 ≥ 0 ∧ λ2 ≥ 0` (Clarke), `λ1λ2 = 0` plus nonnegativity (limiting),
//! and both zero (Fréchet), whereas the vanishing cone constrains `λ2 ≤ 0`
//! throughout.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Qr};
use crate::problem::{ActivePattern, ActivityStatus, ConeKind, SnoProblem};
use crate::tol::Tolerances;

/// Local reduction of an active, non-biactive constraint component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReducedBranch {
    /// Reduces to `F = 0`; the multiplier is unrestricted.
    Equality,
    /// Reduces to `F >= 0`; the multiplier must satisfy `λ >= 0`.
    IneqNonneg,
    /// Reduces to `F <= 0`; the multiplier must satisfy `λ <= 0`.
    IneqNonpos,
}

/// Reduction branch for a non-biactive active component. `second` selects
/// `F2`; `other` is the value of the constraint's other component.
pub fn reduced_branch(cone: ConeKind, second: bool, other: f64) -> ReducedBranch {
    use ConeKind::*;
    use ReducedBranch::*;
    match (cone, second) {
        // (0, +) pins F1 = 0 for every cone that keeps the constraint
        // active there; (±/+, 0) pins F2 = 0 likewise.
        (Complementarity, false) | (Orthogonality, false) | (Switching, false) => Equality,
        (Complementarity, true) | (Orthogonality, true) | (Switching, true) => Equality,
        (Vanishing, false) => {
            if other > 0.0 {
                Equality
            } else {
                IneqNonneg
            }
        }
        (Vanishing, true) => IneqNonpos,
        (Disjunctive, false) => IneqNonneg,
        (Disjunctive, true) => IneqNonneg,
    }
}

/// Outcome of the constraint-qualification check.
#[derive(Debug, Clone)]
pub struct LicqReport {
    pub holds: bool,
    /// Rows are the gradients of all active component functions at `x`.
    pub active_gradients: Mat,
    pub rank: usize,
    /// Smallest singular value of the stacked gradients; infinite when no
    /// component is active.
    pub smallest_singular_value: f64,
}

/// Multipliers of the active components at a point. `lambda1[i]` /
/// `lambda2[i]` are present exactly when the component carries a multiplier
/// under the local reduction; inactive components have `None`, not zero.
#[derive(Debug, Clone)]
pub struct MultiplierSet {
    pub lambda1: Vec<Option<f64>>,
    pub lambda2: Vec<Option<f64>>,
    /// `‖∇f(x) − Σ λ·∇F(x)‖₂`.
    pub residual: f64,
}

impl MultiplierSet {
    /// Biactive pair at constraint `i`; both entries present by definition.
    pub fn biactive_pair(&self, i: usize) -> (f64, f64) {
        (self.lambda1[i].unwrap_or(0.0), self.lambda2[i].unwrap_or(0.0))
    }
}

/// Stationarity flags for the five notions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NotionFlags {
    /// Stationarity equation holds (residual below tolerance); no sign
    /// conditions.
    #[serde(rename = "W")]
    pub w: bool,
    /// Fréchet-normal-cone stationarity.
    #[serde(rename = "Nhat")]
    pub frechet_hat: bool,
    /// Limiting (Mordukhovich) stationarity.
    #[serde(rename = "N")]
    pub limiting: bool,
    /// Clarke-normal-cone stationarity.
    #[serde(rename = "Nbar")]
    pub clarke_bar: bool,
    /// Topologically relevant stationarity.
    #[serde(rename = "T")]
    pub t_stationary: bool,
}

impl NotionFlags {
    pub const ALL_FALSE: NotionFlags = NotionFlags {
        w: false,
        frechet_hat: false,
        limiting: false,
        clarke_bar: false,
        t_stationary: false,
    };
}

/// Per-constraint saddle label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SaddleIndexKind {
    NotSaddleIndex,
    /// Saddle sign condition holds with exactly one vanishing multiplier.
    SingularSaddleIndex,
    /// Saddle sign condition holds with both multipliers nonzero.
    RegularSaddleIndex,
}

/// First-order saddle taxonomy of a T-stationary point. A point may be both
/// singular and regular when different constraints witness each.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SaddleClass {
    #[serde(rename = "perIndex")]
    pub per_index: Vec<SaddleIndexKind>,
    #[serde(rename = "firstOrder")]
    pub is_first_order_saddle: bool,
    #[serde(rename = "singular")]
    pub is_singular: bool,
    #[serde(rename = "regular")]
    pub is_regular: bool,
}

impl SaddleClass {
    fn none(m: usize) -> SaddleClass {
        SaddleClass {
            per_index: vec![SaddleIndexKind::NotSaddleIndex; m],
            is_first_order_saddle: false,
            is_singular: false,
            is_regular: false,
        }
    }
}

/// Gradient rows of all active component functions, in constraint order
/// with `F1` before `F2`. Rows follow component activity `|F| <= tol`, which
/// is what the constraint qualification quantifies over (a disjunctive
/// constraint that binds nowhere locally still contributes its vanishing
/// component here).
fn active_gradient_rows(
    p: &SnoProblem,
    x: &[f64],
    pattern: &ActivePattern,
) -> Result<(Mat, Vec<(usize, bool)>)> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (i, pair) in p.pairs().iter().enumerate() {
        if pattern.component_active(i, false) {
            rows.push(pair.f1.gradient_at(p.n(), x)?);
            labels.push((i, false));
        }
        if pattern.component_active(i, true) {
            rows.push(pair.f2.gradient_at(p.n(), x)?);
            labels.push((i, true));
        }
    }
    let mat = if rows.is_empty() { Mat::zeros(0, p.n()) } else { Mat::from_rows(&rows) };
    Ok((mat, labels))
}

/// Check the constraint qualification at a feasible point: the gradients of
/// all active component functions must be linearly independent.
pub fn licq(p: &SnoProblem, x: &[f64], tols: &Tolerances) -> Result<LicqReport> {
    let pattern = p.active_pattern(x, tols.activity)?;
    let (grads, _) = active_gradient_rows(p, x, &pattern)?;
    if grads.rows() == 0 {
        return Ok(LicqReport {
            holds: true,
            active_gradients: grads,
            rank: 0,
            smallest_singular_value: f64::INFINITY,
        });
    }
    let svd = linalg::row_space_svd(&grads, 0.0);
    let sigma_max = svd.sigma.first().copied().unwrap_or(0.0);
    let threshold = tols.sigma_threshold(sigma_max);
    let rank = svd.sigma.iter().filter(|&&s| s > threshold).count();
    let smallest = svd.sigma.last().copied().unwrap_or(f64::INFINITY);
    Ok(LicqReport {
        holds: rank == grads.rows() && grads.rows() <= p.n(),
        active_gradients: grads,
        rank,
        smallest_singular_value: smallest,
    })
}

/// Solve the stationarity equation for the multipliers of the locally
/// binding components. Requires the constraint qualification; with it the
/// least-squares solution is unique. Components that are inactive under the
/// local reduction carry no multiplier.
pub fn solve_multipliers(p: &SnoProblem, x: &[f64], tols: &Tolerances) -> Result<MultiplierSet> {
    let report = licq(p, x, tols)?;
    if !report.holds {
        return Err(Error::LicqFailure {
            rank: report.rank,
            active: report.active_gradients.rows(),
        });
    }
    let pattern = p.active_pattern(x, tols.activity)?;
    solve_multipliers_with(p, x, &pattern, tols)
}

pub(crate) fn solve_multipliers_with(
    p: &SnoProblem,
    x: &[f64],
    pattern: &ActivePattern,
    _tols: &Tolerances,
) -> Result<MultiplierSet> {
    let n = p.n();
    let grad_f = p.objective().gradient_at(n, x)?;
    let mut cols: Vec<Vec<f64>> = Vec::new();
    let mut slots: Vec<(usize, bool)> = Vec::new();
    for (i, pair) in p.pairs().iter().enumerate() {
        let status = pattern.statuses[i];
        let take_first = matches!(status, ActivityStatus::Biactive | ActivityStatus::FirstActive);
        let take_second =
            matches!(status, ActivityStatus::Biactive | ActivityStatus::SecondActive);
        if take_first {
            cols.push(pair.f1.gradient_at(n, x)?);
            slots.push((i, false));
        }
        if take_second {
            cols.push(pair.f2.gradient_at(n, x)?);
            slots.push((i, true));
        }
    }
    let m = p.m();
    let mut lambda1 = vec![None; m];
    let mut lambda2 = vec![None; m];
    if cols.is_empty() {
        return Ok(MultiplierSet { lambda1, lambda2, residual: linalg::norm2(&grad_f) });
    }
    let a = Mat::from_cols(&cols);
    let solution = Qr::new(&a).solve(&grad_f).ok_or(Error::LicqFailure {
        rank: 0,
        active: cols.len(),
    })?;
    let fitted = a.matvec(&solution);
    let residual =
        linalg::norm2(&grad_f.iter().zip(&fitted).map(|(g, h)| g - h).collect::<Vec<_>>());
    for (value, (i, second)) in solution.into_iter().zip(slots) {
        if second {
            lambda2[i] = Some(value);
        } else {
            lambda1[i] = Some(value);
        }
    }
    Ok(MultiplierSet { lambda1, lambda2, residual })
}

/// Sign condition on a biactive multiplier pair for one notion.
fn biactive_ok(notion: Notion, cone: ConeKind, pair: (f64, f64), t: &Tolerances) -> bool {
    let (l1, l2) = pair;
    // Product sign tests use componentwise zero classification, not a
    // tolerance on the product itself.
    let product_zero = t.is_zero(l1) || t.is_zero(l2);
    let product_nonneg = !(t.is_pos(l1) && t.is_neg(l2)) && !(t.is_neg(l1) && t.is_pos(l2));
    match (notion, cone) {
        (Notion::Frechet, ConeKind::Complementarity) => t.nonneg(l1) && t.nonneg(l2),
        (Notion::Frechet, ConeKind::Vanishing) => t.nonneg(l1) && t.is_zero(l2),
        (Notion::Frechet, ConeKind::Orthogonality) => t.is_zero(l1) && t.nonneg(l2),
        (Notion::Frechet, ConeKind::Switching) | (Notion::Frechet, ConeKind::Disjunctive) => {
            t.is_zero(l1) && t.is_zero(l2)
        }

        (Notion::Limiting, ConeKind::Complementarity) => {
            (t.is_pos(l1) && t.is_pos(l2)) || product_zero
        }
        (Notion::Limiting, ConeKind::Vanishing) => product_zero && t.nonpos(l2),
        (Notion::Limiting, ConeKind::Orthogonality)
        | (Notion::Limiting, ConeKind::Switching) => product_zero,
        (Notion::Limiting, ConeKind::Disjunctive) => {
            product_zero && t.nonneg(l1) && t.nonneg(l2)
        }

        (Notion::Clarke, ConeKind::Complementarity)
        | (Notion::Clarke, ConeKind::Orthogonality)
        | (Notion::Clarke, ConeKind::Switching) => true,
        (Notion::Clarke, ConeKind::Vanishing) => t.nonpos(l2),
        (Notion::Clarke, ConeKind::Disjunctive) => t.nonneg(l1) && t.nonneg(l2),

        (Notion::Topological, ConeKind::Complementarity) => product_nonneg,
        (Notion::Topological, ConeKind::Vanishing) => product_nonneg && t.nonpos(l2),
        (Notion::Topological, ConeKind::Orthogonality) => t.is_zero(l1) || t.nonpos(l2),
        (Notion::Topological, ConeKind::Switching) => true,
        (Notion::Topological, ConeKind::Disjunctive) => t.nonneg(l1) && t.nonneg(l2),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Notion {
    Frechet,
    Limiting,
    Clarke,
    Topological,
}

/// Sign condition on the multiplier of a reduced (non-biactive) component.
/// The same condition applies to every notion.
fn reduced_ok(branch: ReducedBranch, lambda: f64, t: &Tolerances) -> bool {
    match branch {
        ReducedBranch::Equality => true,
        ReducedBranch::IneqNonneg => t.nonneg(lambda),
        ReducedBranch::IneqNonpos => t.nonpos(lambda),
    }
}

/// Classify a multiplier set against the five notions.
pub fn classify_notions(
    ms: &MultiplierSet,
    pattern: &ActivePattern,
    cone: ConeKind,
    tols: &Tolerances,
) -> NotionFlags {
    if ms.residual > tols.w_residual {
        return NotionFlags::ALL_FALSE;
    }
    let mut flags = [true; 4]; // Frechet, Limiting, Clarke, Topological
    let notions =
        [Notion::Frechet, Notion::Limiting, Notion::Clarke, Notion::Topological];
    for (i, status) in pattern.statuses.iter().enumerate() {
        match status {
            ActivityStatus::Biactive => {
                let pair = ms.biactive_pair(i);
                for (k, notion) in notions.iter().enumerate() {
                    flags[k] &= biactive_ok(*notion, cone, pair, tols);
                }
            }
            ActivityStatus::FirstActive => {
                let branch = reduced_branch(cone, false, pattern.values[i].1);
                let ok = reduced_ok(branch, ms.lambda1[i].unwrap_or(0.0), tols);
                for f in flags.iter_mut() {
                    *f &= ok;
                }
            }
            ActivityStatus::SecondActive => {
                let branch = reduced_branch(cone, true, pattern.values[i].0);
                let ok = reduced_ok(branch, ms.lambda2[i].unwrap_or(0.0), tols);
                for f in flags.iter_mut() {
                    *f &= ok;
                }
            }
            ActivityStatus::Inactive => {}
        }
    }
    NotionFlags {
        w: true,
        frechet_hat: flags[0],
        limiting: flags[1],
        clarke_bar: flags[2],
        t_stationary: flags[3],
    }
}

/// Saddle sign condition for one biactive pair.
fn saddle_sign_ok(cone: ConeKind, pair: (f64, f64), t: &Tolerances) -> bool {
    let (l1, l2) = pair;
    let not_both_zero = !(t.is_zero(l1) && t.is_zero(l2));
    let sign_ok = match cone {
        ConeKind::Complementarity | ConeKind::Vanishing => t.nonpos(l1) && t.nonpos(l2),
        ConeKind::Orthogonality => t.nonpos(l2),
        ConeKind::Switching => true,
        ConeKind::Disjunctive => t.nonneg(l1) && t.nonneg(l2),
    };
    sign_ok && not_both_zero
}

/// Classify the first-order saddle structure. Only T-stationary points can
/// be saddles of first order; `t_stationary` gates the whole classification.
/// A witnessing constraint must itself satisfy the saddle sign condition —
/// membership in the biactive set alone is not enough.
pub fn classify_saddle(
    ms: &MultiplierSet,
    pattern: &ActivePattern,
    cone: ConeKind,
    t_stationary: bool,
    tols: &Tolerances,
) -> SaddleClass {
    let m = pattern.statuses.len();
    if !t_stationary {
        return SaddleClass::none(m);
    }
    let mut per_index = vec![SaddleIndexKind::NotSaddleIndex; m];
    for i in 0..m {
        if pattern.statuses[i] != ActivityStatus::Biactive {
            continue;
        }
        let pair = ms.biactive_pair(i);
        if !saddle_sign_ok(cone, pair, tols) {
            continue;
        }
        let zeros =
            usize::from(tols.is_zero(pair.0)) + usize::from(tols.is_zero(pair.1));
        per_index[i] = if zeros == 1 {
            SaddleIndexKind::SingularSaddleIndex
        } else {
            SaddleIndexKind::RegularSaddleIndex
        };
    }
    let is_singular = per_index.iter().any(|k| *k == SaddleIndexKind::SingularSaddleIndex);
    let is_regular = per_index.iter().any(|k| *k == SaddleIndexKind::RegularSaddleIndex);
    SaddleClass {
        per_index,
        is_first_order_saddle: is_singular || is_regular,
        is_singular,
        is_regular,
    }
}

/// Clarke-style necessary-condition check via the convex-combination
/// representation of `min{F1,F2}` (complementarity) or `max{F1,F2}`
/// (disjunctive). Only these two cones admit such a representation; the
/// result always agrees with the T flag.
pub fn c_stationarity_check(
    cone: ConeKind,
    ms: &MultiplierSet,
    pattern: &ActivePattern,
    tols: &Tolerances,
) -> Result<bool> {
    match cone {
        ConeKind::Complementarity | ConeKind::Disjunctive => {}
        other => {
            return Err(Error::UnsupportedCone { op: "C-stationarity", cone: other });
        }
    }
    if ms.residual > tols.w_residual {
        return Ok(false);
    }
    let mut ok = true;
    for &i in pattern.biactive().iter() {
        let (l1, l2) = ms.biactive_pair(i);
        ok &= match cone {
            // Same sign: the convex combination weights can be chosen.
            ConeKind::Complementarity => {
                !(tols.is_pos(l1) && tols.is_neg(l2)) && !(tols.is_neg(l1) && tols.is_pos(l2))
            }
            ConeKind::Disjunctive => tols.nonneg(l1) && tols.nonneg(l2),
            _ => unreachable!(),
        };
    }
    // Reduced components impose the same conditions as for the notions.
    for (i, status) in pattern.statuses.iter().enumerate() {
        match status {
            ActivityStatus::FirstActive => {
                let branch = reduced_branch(cone, false, pattern.values[i].1);
                ok &= reduced_ok(branch, ms.lambda1[i].unwrap_or(0.0), tols);
            }
            ActivityStatus::SecondActive => {
                let branch = reduced_branch(cone, true, pattern.values[i].0);
                ok &= reduced_ok(branch, ms.lambda2[i].unwrap_or(0.0), tols);
            }
            _ => {}
        }
    }
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::SnoProblem;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn single_biactive(l1: f64, l2: f64) -> (MultiplierSet, ActivePattern) {
        let ms = MultiplierSet {
            lambda1: vec![Some(l1)],
            lambda2: vec![Some(l2)],
            residual: 0.0,
        };
        let pattern = ActivePattern {
            statuses: vec![ActivityStatus::Biactive],
            values: vec![(0.0, 0.0)],
            tol: 1e-8,
        };
        (ms, pattern)
    }

    fn flags(cone: ConeKind, l1: f64, l2: f64) -> NotionFlags {
        let (ms, pattern) = single_biactive(l1, l2);
        classify_notions(&ms, &pattern, cone, &tols())
    }

    fn saddle(cone: ConeKind, l1: f64, l2: f64) -> SaddleClass {
        let (ms, pattern) = single_biactive(l1, l2);
        let t = flags(cone, l1, l2).t_stationary;
        classify_saddle(&ms, &pattern, cone, t, &tols())
    }

    #[test]
    fn licq_identity_gradients() {
        let p = SnoProblem::from_strings(2, "x1", &[("x1", "x2")], ConeKind::Switching).unwrap();
        let r = licq(&p, &[0.0, 0.0], &tols()).unwrap();
        assert!(r.holds);
        assert_eq!(r.rank, 2);
        assert!((r.smallest_singular_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn licq_collinear_gradients_fail() {
        let p =
            SnoProblem::from_strings(2, "x1", &[("x1", "2*x1")], ConeKind::Switching).unwrap();
        let r = licq(&p, &[0.0, 0.0], &tols()).unwrap();
        assert!(!r.holds);
        assert_eq!(r.rank, 1);
        assert!(solve_multipliers(&p, &[0.0, 0.0], &tols()).is_err());
    }

    #[test]
    fn licq_on_paper_example() {
        let p = SnoProblem::from_strings(
            2,
            "-x1 + 0.5*x1^2 - x2^2 + 0.5*x2^4",
            &[("x1", "x2")],
            ConeKind::Complementarity,
        )
        .unwrap();
        assert!(licq(&p, &[0.0, 0.0], &tols()).unwrap().holds);
    }

    #[test]
    fn multipliers_of_the_three_reference_points() {
        let cases: [(&str, (f64, f64)); 3] = [
            ("(x1-1)^2 + (x2-1)^2", (-2.0, -2.0)),
            ("-x1 + 0.5*x1^2 - x2^2 + 0.5*x2^4", (-1.0, 0.0)),
            ("x1 - 0.5*x1^2 - x2 + 0.5*x2^2", (1.0, -1.0)),
        ];
        for (objective, expected) in cases {
            let p = SnoProblem::from_strings(
                2,
                objective,
                &[("x1", "x2")],
                ConeKind::Complementarity,
            )
            .unwrap();
            let ms = solve_multipliers(&p, &[0.0, 0.0], &tols()).unwrap();
            let (l1, l2) = ms.biactive_pair(0);
            assert!((l1 - expected.0).abs() <= 1e-12, "{objective}: l1={l1}");
            assert!((l2 - expected.1).abs() <= 1e-12, "{objective}: l2={l2}");
            assert!(ms.residual <= 1e-12);
        }
    }

    #[test]
    fn multipliers_absent_for_inactive_components() {
        let p = SnoProblem::from_strings(
            2,
            "(x1-1)^2 + (x2-1)^2",
            &[("x1", "x2")],
            ConeKind::Complementarity,
        )
        .unwrap();
        let ms = solve_multipliers(&p, &[1.0, 0.0], &tols()).unwrap();
        assert_eq!(ms.lambda1[0], None);
        assert!((ms.lambda2[0].unwrap() + 2.0).abs() <= 1e-12);
        assert!(ms.residual <= 1e-12);
    }

    #[test]
    fn notion_tables_complementarity() {
        let f = flags(ConeKind::Complementarity, -2.0, -2.0);
        assert!(!f.frechet_hat && !f.limiting && f.t_stationary && f.clarke_bar);

        let f = flags(ConeKind::Complementarity, -1.0, 0.0);
        assert!(!f.frechet_hat && f.limiting && f.t_stationary);

        let f = flags(ConeKind::Complementarity, 1.0, -1.0);
        assert!(!f.t_stationary && f.clarke_bar && !f.limiting && !f.frechet_hat);

        let f = flags(ConeKind::Complementarity, 1.0, 2.0);
        assert!(f.frechet_hat && f.limiting && f.t_stationary && f.clarke_bar);
    }

    #[test]
    fn notion_tables_switching() {
        let f = flags(ConeKind::Switching, 3.0, 0.0);
        assert!(!f.frechet_hat && f.limiting && f.t_stationary);
        let f = flags(ConeKind::Switching, 3.0, -1.0);
        assert!(!f.limiting && f.t_stationary && f.clarke_bar);
        let f = flags(ConeKind::Switching, 0.0, 0.0);
        assert!(f.frechet_hat);
    }

    #[test]
    fn notion_tables_vanishing() {
        // (λ1 >= 0, λ2 = 0) is the Fréchet region.
        assert!(flags(ConeKind::Vanishing, 2.0, 0.0).frechet_hat);
        assert!(flags(ConeKind::Vanishing, 2.0, 0.0).clarke_bar);
        // λ2 > 0 kills everything below W.
        let f = flags(ConeKind::Vanishing, 0.0, 1.0);
        assert!(f.w && !f.frechet_hat && !f.limiting && !f.t_stationary && !f.clarke_bar);
        // (−1, −1): Clarke and T hold, limiting does not.
        let f = flags(ConeKind::Vanishing, -1.0, -1.0);
        assert!(!f.limiting && f.t_stationary && f.clarke_bar);
    }

    #[test]
    fn notion_tables_orthogonality_and_disjunctive() {
        let f = flags(ConeKind::Orthogonality, 0.0, 5.0);
        assert!(f.frechet_hat && f.limiting && f.t_stationary && f.clarke_bar);
        let f = flags(ConeKind::Orthogonality, 3.0, -1.0);
        assert!(!f.limiting && f.t_stationary);

        let f = flags(ConeKind::Disjunctive, 1.0, 1.0);
        assert!(!f.frechet_hat && !f.limiting && f.t_stationary && f.clarke_bar);
        let f = flags(ConeKind::Disjunctive, 1.0, 0.0);
        assert!(!f.frechet_hat && f.limiting && f.t_stationary);
        let f = flags(ConeKind::Disjunctive, -1.0, 0.0);
        assert!(!f.t_stationary && !f.clarke_bar);
    }

    #[test]
    fn saddle_taxonomy_reference_pairs() {
        let s = saddle(ConeKind::Complementarity, -2.0, -2.0);
        assert_eq!(s.per_index, vec![SaddleIndexKind::RegularSaddleIndex]);
        assert!(s.is_first_order_saddle && s.is_regular && !s.is_singular);

        let s = saddle(ConeKind::Complementarity, -1.0, 0.0);
        assert_eq!(s.per_index, vec![SaddleIndexKind::SingularSaddleIndex]);
        assert!(s.is_first_order_saddle && s.is_singular && !s.is_regular);

        let s = saddle(ConeKind::Complementarity, 1.0, 0.0);
        assert_eq!(s.per_index, vec![SaddleIndexKind::NotSaddleIndex]);
        assert!(!s.is_first_order_saddle);

        let s = saddle(ConeKind::Complementarity, 0.0, 0.0);
        assert!(!s.is_first_order_saddle);
    }

    #[test]
    fn saddle_requires_t_stationarity() {
        // (1, -1) satisfies no saddle condition and is not T-stationary;
        // the gate alone must force NotSaddleIndex.
        let (ms, pattern) = single_biactive(-1.0, -1.0);
        let s = classify_saddle(&ms, &pattern, ConeKind::Complementarity, false, &tols());
        assert!(!s.is_first_order_saddle);
        assert_eq!(s.per_index, vec![SaddleIndexKind::NotSaddleIndex]);
    }

    #[test]
    fn mixed_singular_and_regular_witnesses() {
        let ms = MultiplierSet {
            lambda1: vec![Some(-1.0), Some(-2.0)],
            lambda2: vec![Some(0.0), Some(-3.0)],
            residual: 0.0,
        };
        let pattern = ActivePattern {
            statuses: vec![ActivityStatus::Biactive; 2],
            values: vec![(0.0, 0.0); 2],
            tol: 1e-8,
        };
        let f = classify_notions(&ms, &pattern, ConeKind::Complementarity, &tols());
        assert!(f.t_stationary);
        let s = classify_saddle(&ms, &pattern, ConeKind::Complementarity, true, &tols());
        assert!(s.is_singular && s.is_regular && s.is_first_order_saddle);
    }

    #[test]
    fn c_check_matches_t_flag() {
        for (l1, l2) in [(-2.0, -2.0), (1.0, -1.0), (0.0, 3.0), (2.0, 2.0)] {
            let (ms, pattern) = single_biactive(l1, l2);
            let t = classify_notions(&ms, &pattern, ConeKind::Complementarity, &tols())
                .t_stationary;
            let c =
                c_stationarity_check(ConeKind::Complementarity, &ms, &pattern, &tols()).unwrap();
            assert_eq!(c, t, "({l1},{l2})");
        }
        let (ms, pattern) = single_biactive(1.0, 0.0);
        assert!(c_stationarity_check(ConeKind::Disjunctive, &ms, &pattern, &tols()).unwrap());
        assert!(matches!(
            c_stationarity_check(ConeKind::Vanishing, &ms, &pattern, &tols()),
            Err(Error::UnsupportedCone { .. })
        ));
    }

    #[test]
    fn reduced_inequality_signs_gate_the_notions() {
        // Disjunctive constraint with F1 = 0, F2 < 0 reduces to F1 >= 0 and
        // needs λ1 >= 0.
        let p = SnoProblem::from_strings(
            2,
            "x1 + (x2+1)^2",
            &[("x1", "x2")],
            ConeKind::Disjunctive,
        )
        .unwrap();
        let x = [0.0, -1.0];
        let ms = solve_multipliers(&p, &x, &tols()).unwrap();
        assert!((ms.lambda1[0].unwrap() - 1.0).abs() < 1e-12);
        let pattern = p.active_pattern(&x, 1e-8).unwrap();
        let f = classify_notions(&ms, &pattern, ConeKind::Disjunctive, &tols());
        assert!(f.w && f.frechet_hat && f.t_stationary);

        // Flip the objective: λ1 = -1 violates the reduced sign.
        let p = SnoProblem::from_strings(
            2,
            "-x1 + (x2+1)^2",
            &[("x1", "x2")],
            ConeKind::Disjunctive,
        )
        .unwrap();
        let ms = solve_multipliers(&p, &x, &tols()).unwrap();
        let pattern = p.active_pattern(&x, 1e-8).unwrap();
        let f = classify_notions(&ms, &pattern, ConeKind::Disjunctive, &tols());
        assert!(f.w && !f.frechet_hat && !f.t_stationary && !f.clarke_bar);
    }

    #[test]
    fn w_flag_requires_small_residual() {
        let p = SnoProblem::from_strings(
            2,
            "(x1-1)^2 + (x2-1)^2",
            &[("x1", "x2")],
            ConeKind::Complementarity,
        )
        .unwrap();
        // (0.5, 0) is feasible but not stationary: ∇f has a nonzero first
        // component with only the second axis active.
        let ms = solve_multipliers(&p, &[0.5, 0.0], &tols()).unwrap();
        assert!(ms.residual > 0.5);
        let pattern = p.active_pattern(&[0.5, 0.0], 1e-8).unwrap();
        let f = classify_notions(&ms, &pattern, ConeKind::Complementarity, &tols());
        assert_eq!(f, NotionFlags::ALL_FALSE);
    }
}
