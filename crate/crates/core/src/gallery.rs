//! Bundled example problems.
//!
//! All instances are two-dimensional complementarity problems over the pair
//! `(x1, x2)`; they differ only in the objective and are named for the kind
//! of point sitting at the origin. Each has exactly three stationary points
//! in the box `[-0.5, 1.5]^2` (five for the perturbed variant).

use crate::problem::{ConeKind, SnoProblem};

fn mpcc(objective: &str) -> SnoProblem {
    SnoProblem::from_strings(2, objective, &[("x1", "x2")], ConeKind::Complementarity)
        .expect("bundled problem must parse")
}

/// Origin is a regular first-order saddle (multipliers -2, -2) connecting
/// the two minimizers (1,0) and (0,1).
pub fn regular_saddle() -> SnoProblem {
    mpcc("(x1-1)^2 + (x2-1)^2")
}

/// Origin is a singular first-order saddle (multipliers -1, 0); both (1,0)
/// and (0,1) are minimizers.
pub fn singular_saddle_i() -> SnoProblem {
    mpcc("-x1 + 0.5*x1^2 - x2^2 + 0.5*x2^4")
}

/// Origin is a singular first-order saddle (multipliers -1, 0); (1,0) is a
/// minimizer and (0,1) a maximizer.
pub fn singular_saddle_ii() -> SnoProblem {
    mpcc("-x1 + 0.5*x1^2 + x2^2 - 0.5*x2^4")
}

/// Linear tilt of [`singular_saddle_ii`] in the second coordinate. For small
/// `eps > 0` the origin becomes a regular saddle with multipliers
/// `(-1, -eps)` and new axis points appear at the positive roots of
/// `-eps + 2s - 2s^3 = 0`.
pub fn singular_saddle_ii_perturbed(eps: f64) -> SnoProblem {
    mpcc(&format!("-x1 + 0.5*x1^2 - {eps}*x2 + x2^2 - 0.5*x2^4"))
}

/// Origin has multipliers (0, 0): a saddle of second order, not of first
/// order.
pub fn second_order_saddle() -> SnoProblem {
    mpcc("-x1^2 + 0.5*x1^4 - x2^2 + 0.5*x2^4")
}

/// Origin has multipliers (1, 0): Fréchet-stationary and not a first-order
/// saddle, although it connects the minimizer (0,1) with the maximizer (1,0).
pub fn not_first_order_saddle() -> SnoProblem {
    mpcc("x1 - 0.5*x1^2 - x2^2 + 0.5*x2^4")
}

/// Companion with the same multipliers (1, 0) at the origin, which here is a
/// local minimizer between two maximizers.
pub fn not_first_order_saddle_companion() -> SnoProblem {
    mpcc("x1 - 0.5*x1^2 + x2^2 - 0.5*x2^4")
}

/// Origin admits only the sign-mixed multipliers (1, -1), so it is
/// Clarke-stationary but not T-stationary.
pub fn non_t_stationary() -> SnoProblem {
    mpcc("x1 - 0.5*x1^2 - x2 + 0.5*x2^2")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_bundled_problems_are_feasible_at_origin() {
        let problems = [
            regular_saddle(),
            singular_saddle_i(),
            singular_saddle_ii(),
            singular_saddle_ii_perturbed(0.05),
            second_order_saddle(),
            not_first_order_saddle(),
            not_first_order_saddle_companion(),
            non_t_stationary(),
        ];
        for p in &problems {
            assert!(p.feasible(&[0.0, 0.0], 1e-9).unwrap());
            assert_eq!(p.m(), 1);
        }
    }

    #[test]
    fn perturbation_embeds_eps_exactly() {
        let p = singular_saddle_ii_perturbed(0.05);
        // f(0, 1) = -0.05 + 1 - 0.5
        let v = p.objective().eval(&[0.0, 1.0]).unwrap();
        assert!((v - 0.45).abs() < 1e-15);
    }
}
