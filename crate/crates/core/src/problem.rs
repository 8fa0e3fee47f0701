//! SNO problem instances and their constraint-cone geometry.
//!
//! A problem is `min f(x)` subject to `(F1_i(x), F2_i(x)) ∈ K` for
//! `i = 1..m`, where `K` is one of five planar cones. This module decides
//! cone membership, projects onto each cone in closed form, evaluates
//! feasibility, and derives the active/biactive structure at a point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{self, Expr};

/// The five supported nonsmooth constraint cones.
///
/// * `Complementarity`: `a1*a2 = 0, a1 >= 0, a2 >= 0`
/// * `Vanishing`: `a1 >= 0, a1*a2 <= 0`
/// * `Orthogonality`: `a1*a2 = 0, a2 >= 0`
/// * `Switching`: `a1*a2 = 0`
/// * `Disjunctive`: `a1 >= 0 or a2 >= 0`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConeKind {
    Complementarity,
    Vanishing,
    Orthogonality,
    Switching,
    Disjunctive,
}

impl ConeKind {
    pub const ALL: [ConeKind; 5] = [
        ConeKind::Complementarity,
        ConeKind::Vanishing,
        ConeKind::Orthogonality,
        ConeKind::Switching,
        ConeKind::Disjunctive,
    ];

    /// Membership test with slack `tol`: product equalities as
    /// `|a1*a2| <= tol` (one-sided for the vanishing cone), inequalities as
    /// `a >= -tol`.
    pub fn contains(self, a: (f64, f64), tol: f64) -> bool {
        let (a1, a2) = a;
        match self {
            ConeKind::Complementarity => (a1 * a2).abs() <= tol && a1 >= -tol && a2 >= -tol,
            ConeKind::Vanishing => a1 >= -tol && a1 * a2 <= tol,
            ConeKind::Orthogonality => (a1 * a2).abs() <= tol && a2 >= -tol,
            ConeKind::Switching => (a1 * a2).abs() <= tol,
            ConeKind::Disjunctive => a1 >= -tol || a2 >= -tol,
        }
    }

    /// Euclidean projection onto the cone. Ties between equally distant
    /// candidates prefer the candidate with the larger maximum coordinate,
    /// then the candidate lying on the first axis, so results are
    /// deterministic across platforms.
    pub fn project(self, a: (f64, f64)) -> (f64, f64) {
        let (a1, a2) = a;
        let candidates: Vec<(f64, f64)> = match self {
            // On-axis pieces: first axis means a2 = 0.
            ConeKind::Complementarity => vec![(a1.max(0.0), 0.0), (0.0, a2.max(0.0))],
            ConeKind::Vanishing => {
                // Union of the closed fourth quadrant and the vertical axis.
                vec![(a1.max(0.0), a2.min(0.0)), (0.0, a2)]
            }
            ConeKind::Orthogonality => vec![(a1, 0.0), (0.0, a2.max(0.0))],
            ConeKind::Switching => vec![(a1, 0.0), (0.0, a2)],
            ConeKind::Disjunctive => {
                if a1 >= 0.0 || a2 >= 0.0 {
                    return a;
                }
                // Nearest boundary of the complement of the open third
                // quadrant.
                vec![(a1, 0.0), (0.0, a2)]
            }
        };
        let dist2 = |c: &(f64, f64)| (c.0 - a1).powi(2) + (c.1 - a2).powi(2);
        let mut best = candidates[0];
        for c in &candidates[1..] {
            let (dc, db) = (dist2(c), dist2(&best));
            if dc < db {
                best = *c;
            } else if dc == db {
                let (mc, mb) = (c.0.max(c.1), best.0.max(best.1));
                if mc > mb || (mc == mb && c.1 == 0.0 && best.1 != 0.0) {
                    best = *c;
                }
            }
        }
        best
    }

    /// Euclidean distance from `a` to the cone.
    pub fn distance(self, a: (f64, f64)) -> f64 {
        let p = self.project(a);
        f64::hypot(a.0 - p.0, a.1 - p.1)
    }
}

/// One constraint pair `(F1, F2)`.
#[derive(Debug, Clone)]
pub struct ConstraintPair {
    pub f1: Expr,
    pub f2: Expr,
}

/// A structured nonsmooth optimization instance. Immutable once built.
#[derive(Debug, Clone)]
pub struct SnoProblem {
    n: usize,
    objective: Expr,
    pairs: Vec<ConstraintPair>,
    cone: ConeKind,
}

/// On-disk problem schema.
#[derive(Serialize, Deserialize)]
struct ProblemFile {
    n: usize,
    cone: ConeKind,
    objective: String,
    constraints: Vec<ConstraintStrings>,
}

#[derive(Serialize, Deserialize)]
struct ConstraintStrings {
    #[serde(rename = "F1")]
    f1: String,
    #[serde(rename = "F2")]
    f2: String,
}

impl SnoProblem {
    pub fn new(
        n: usize,
        objective: Expr,
        pairs: Vec<ConstraintPair>,
        cone: ConeKind,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if pairs.is_empty() {
            return Err(Error::invalid("at least one constraint pair is required"));
        }
        let check = |e: &Expr, what: &str| -> Result<()> {
            let mv = e.max_var();
            if mv > n {
                return Err(Error::invalid(format!(
                    "{what} uses x{mv} but the declared dimension is {n}"
                )));
            }
            Ok(())
        };
        check(&objective, "objective")?;
        for (i, pair) in pairs.iter().enumerate() {
            check(&pair.f1, &format!("constraint {} F1", i + 1))?;
            check(&pair.f2, &format!("constraint {} F2", i + 1))?;
        }
        Ok(SnoProblem { n, objective, pairs, cone })
    }

    /// Build from expression strings.
    pub fn from_strings(
        n: usize,
        objective: &str,
        pairs: &[(&str, &str)],
        cone: ConeKind,
    ) -> Result<Self> {
        let objective = expr::parse(objective, n)?;
        let parsed = pairs
            .iter()
            .map(|(f1, f2)| {
                Ok(ConstraintPair { f1: expr::parse(f1, n)?, f2: expr::parse(f2, n)? })
            })
            .collect::<Result<Vec<_>>>()?;
        SnoProblem::new(n, objective, parsed, cone)
    }

    /// Parse the JSON problem schema.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ProblemFile = serde_json::from_str(text)
            .map_err(|e| Error::invalid(format!("problem file: {e}")))?;
        let pairs: Vec<(&str, &str)> =
            file.constraints.iter().map(|c| (c.f1.as_str(), c.f2.as_str())).collect();
        SnoProblem::from_strings(file.n, &file.objective, &pairs, file.cone)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.pairs.len()
    }

    pub fn cone(&self) -> ConeKind {
        self.cone
    }

    pub fn objective(&self) -> &Expr {
        &self.objective
    }

    pub fn pairs(&self) -> &[ConstraintPair] {
        &self.pairs
    }

    /// Evaluate all constraint pairs at `x`.
    pub fn pair_values(&self, x: &[f64]) -> Result<Vec<(f64, f64)>> {
        self.pairs.iter().map(|p| Ok((p.f1.eval(x)?, p.f2.eval(x)?))).collect()
    }

    /// True when every pair lies in the cone within `tol`.
    pub fn feasible(&self, x: &[f64], tol: f64) -> Result<bool> {
        for pair in self.pair_values(x)? {
            if !self.cone.contains(pair, tol) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Largest distance-to-cone over the constraint images; an equivalent
    /// feasibility measure used by the level-set grids.
    pub fn infeasibility(&self, x: &[f64]) -> Result<f64> {
        let mut worst = 0.0f64;
        for pair in self.pair_values(x)? {
            worst = worst.max(self.cone.distance(pair));
        }
        Ok(worst)
    }

    /// Index of the first violated constraint, if any.
    pub fn first_violation(&self, x: &[f64], tol: f64) -> Result<Option<usize>> {
        for (i, pair) in self.pair_values(x)?.into_iter().enumerate() {
            if !self.cone.contains(pair, tol) {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// Active/biactive structure of a feasible point.
    pub fn active_pattern(&self, x: &[f64], tol: f64) -> Result<ActivePattern> {
        if let Some(violated) = self.first_violation(x, tol)? {
            return Err(Error::Infeasible { constraint: violated + 1, tol });
        }
        let values = self.pair_values(x)?;
        let statuses: Vec<ActivityStatus> = values
            .iter()
            .map(|&(f1, f2)| {
                let a1 = f1.abs() <= tol;
                let a2 = f2.abs() <= tol;
                match (a1, a2) {
                    (true, true) => ActivityStatus::Biactive,
                    (true, false) => {
                        // A disjunctive constraint with the other component
                        // strictly positive holds on a neighborhood, so it
                        // binds nowhere locally.
                        if self.cone == ConeKind::Disjunctive && f2 > -tol {
                            ActivityStatus::Inactive
                        } else {
                            ActivityStatus::FirstActive
                        }
                    }
                    (false, true) => {
                        if self.cone == ConeKind::Disjunctive && f1 > -tol {
                            ActivityStatus::Inactive
                        } else {
                            ActivityStatus::SecondActive
                        }
                    }
                    (false, false) => ActivityStatus::Inactive,
                }
            })
            .collect();
        Ok(ActivePattern { statuses, values, tol })
    }
}

/// Per-constraint activity at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivityStatus {
    /// Both components vanish.
    Biactive,
    /// Only `F1` vanishes (and the constraint binds locally).
    FirstActive,
    /// Only `F2` vanishes (and the constraint binds locally).
    SecondActive,
    /// The constraint imposes nothing on a neighborhood.
    Inactive,
}

/// Activity structure of a feasible point: statuses, the evaluated pair
/// values, and the tolerance they were derived with.
#[derive(Debug, Clone)]
pub struct ActivePattern {
    pub statuses: Vec<ActivityStatus>,
    pub values: Vec<(f64, f64)>,
    pub tol: f64,
}

impl ActivePattern {
    /// Biactive index set (0-based constraint indices).
    pub fn biactive(&self) -> Vec<usize> {
        self.statuses
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == ActivityStatus::Biactive)
            .map(|(i, _)| i)
            .collect()
    }

    /// Component activity irrespective of local reduction: true when
    /// `|F_k(x)| <= tol`. This is what the constraint qualification sees.
    pub fn component_active(&self, i: usize, second: bool) -> bool {
        let (f1, f2) = self.values[i];
        if second {
            f2.abs() <= self.tol
        } else {
            f1.abs() <= self.tol
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn regular_saddle() -> SnoProblem {
        SnoProblem::from_strings(
            2,
            "(x1-1)^2 + (x2-1)^2",
            &[("x1", "x2")],
            ConeKind::Complementarity,
        )
        .unwrap()
    }

    #[test]
    fn membership_basics() {
        let t = 1e-9;
        for cone in ConeKind::ALL {
            assert!(cone.contains((0.0, 0.0), t), "{cone:?} must contain the origin");
        }
        assert!(!ConeKind::Complementarity.contains((1.0, 1.0), t));
        assert!(ConeKind::Disjunctive.contains((-1.0, 2.0), t));
        assert!(!ConeKind::Disjunctive.contains((-1.0, -2.0), t));
        assert!(ConeKind::Vanishing.contains((2.0, -3.0), t));
        assert!(!ConeKind::Vanishing.contains((-1.0, 0.0), t));
        assert!(ConeKind::Orthogonality.contains((-2.0, 0.0), t));
        assert!(!ConeKind::Orthogonality.contains((0.0, -2.0), t));
        assert!(ConeKind::Switching.contains((0.0, -2.0), t));
    }

    #[test]
    fn projection_examples() {
        assert_eq!(ConeKind::Complementarity.project((2.0, 1.0)), (2.0, 0.0));
        assert_eq!(ConeKind::Switching.project((1.0, 1.0)), (1.0, 0.0));
        assert_eq!(ConeKind::Disjunctive.project((-1.0, -2.0)), (0.0, -2.0));
        assert_eq!(ConeKind::Complementarity.project((-1.0, -2.0)), (0.0, 0.0));
        assert_eq!(ConeKind::Vanishing.project((-1.0, 2.0)), (0.0, 2.0));
        assert_eq!(ConeKind::Orthogonality.project((-1.0, -1.0)), (-1.0, 0.0));
    }

    #[test]
    fn projection_is_identity_on_members() {
        let samples = [
            (0.0, 0.0),
            (2.0, 0.0),
            (0.0, 3.0),
            (1.5, -2.0),
            (-4.0, 0.0),
            (0.0, -1.0),
            (-3.0, 5.0),
        ];
        for cone in ConeKind::ALL {
            for &a in &samples {
                if cone.contains(a, 0.0) {
                    assert_eq!(cone.project(a), a, "{cone:?} {a:?}");
                }
            }
        }
    }

    #[test]
    fn projection_lands_in_cone_and_beats_sampling() {
        // Deterministic low-discrepancy sweep plus a random-ish lattice of
        // cone points as a distance oracle.
        for cone in ConeKind::ALL {
            let mut k = 0u64;
            for _ in 0..2_000 {
                k = k.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let a1 = ((k >> 11) as f64 / (1u64 << 53) as f64) * 8.0 - 4.0;
                k = k.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let a2 = ((k >> 11) as f64 / (1u64 << 53) as f64) * 8.0 - 4.0;
                let p = cone.project((a1, a2));
                assert!(cone.contains(p, 1e-12), "{cone:?}: {p:?} not in cone");
                let d = f64::hypot(a1 - p.0, a2 - p.1);
                // No sampled cone point may be strictly closer.
                for i in 0..200 {
                    let s = -4.0 + 8.0 * (i as f64) / 199.0;
                    for q in [(s.max(0.0), 0.0), (0.0, s.max(0.0)), (s, 0.0), (0.0, s), (s.max(0.0), -s.abs())] {
                        if cone.contains(q, 0.0) {
                            let dq = f64::hypot(a1 - q.0, a2 - q.1);
                            assert!(dq + 1e-9 >= d, "{cone:?}: {q:?} beats projection of ({a1},{a2})");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn feasibility_of_paper_style_points() {
        let p = regular_saddle();
        assert!(p.feasible(&[1.0, 0.0], 1e-9).unwrap());
        assert!(p.feasible(&[0.0, 0.0], 1e-9).unwrap());
        assert!(!p.feasible(&[0.5, 0.5], 1e-9).unwrap());
    }

    #[test]
    fn feasibility_monotone_in_tol() {
        let p = regular_saddle();
        let x = [1e-5, 1e-5];
        assert!(!p.feasible(&x, 1e-12).unwrap());
        assert!(p.feasible(&x, 1e-8).unwrap());
        assert!(p.feasible(&x, 1e-4).unwrap());
    }

    #[test]
    fn active_pattern_statuses() {
        let p = regular_saddle();
        let pat = p.active_pattern(&[0.0, 0.0], 1e-8).unwrap();
        assert_eq!(pat.statuses, vec![ActivityStatus::Biactive]);
        assert_eq!(pat.biactive(), vec![0]);

        let pat = p.active_pattern(&[1.0, 0.0], 1e-8).unwrap();
        assert_eq!(pat.statuses, vec![ActivityStatus::SecondActive]);
        assert!(pat.biactive().is_empty());

        assert!(matches!(
            p.active_pattern(&[0.5, 0.5], 1e-8),
            Err(Error::Infeasible { constraint: 1, .. })
        ));
    }

    #[test]
    fn disjunctive_local_inactivity() {
        let p = SnoProblem::from_strings(2, "x1 + x2", &[("x1", "x2")], ConeKind::Disjunctive)
            .unwrap();
        let pat = p.active_pattern(&[0.0, 1.0], 1e-8).unwrap();
        assert_eq!(pat.statuses, vec![ActivityStatus::Inactive]);
        // Both components zero stays biactive.
        let pat = p.active_pattern(&[0.0, 0.0], 1e-8).unwrap();
        assert_eq!(pat.statuses, vec![ActivityStatus::Biactive]);
        // First component zero with the second strictly negative binds.
        let pat = p.active_pattern(&[0.0, -1.0], 1e-8).unwrap();
        assert_eq!(pat.statuses, vec![ActivityStatus::FirstActive]);
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{
            "n": 2,
            "cone": "complementarity",
            "objective": "(x1-1)^2 + (x2-1)^2",
            "constraints": [{"F1": "x1", "F2": "x2"}]
        }"#;
        let p = SnoProblem::from_json(text).unwrap();
        assert_eq!(p.n(), 2);
        assert_eq!(p.m(), 1);
        assert_eq!(p.cone(), ConeKind::Complementarity);
        assert!(p.feasible(&[0.0, 0.0], 1e-9).unwrap());
    }

    #[test]
    fn json_rejects_bad_input() {
        assert!(SnoProblem::from_json("{}").is_err());
        let no_constraints = r#"{"n": 2, "cone": "switching", "objective": "x1", "constraints": []}"#;
        assert!(SnoProblem::from_json(no_constraints).is_err());
        let bad_cone = r#"{"n": 2, "cone": "mystery", "objective": "x1",
                           "constraints": [{"F1": "x1", "F2": "x2"}]}"#;
        assert!(SnoProblem::from_json(bad_cone).is_err());
    }
}
