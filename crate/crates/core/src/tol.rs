//! Numerical tolerances shared across the crate.
//!
//! Every threshold used by the classifiers is collected here so that a single
//! configuration travels through an entire run. The defaults are sized for
//! desk-scale polynomial instances whose stationary points and multipliers
//! are O(1) rationals at rational coordinates.

/// Tolerance bundle. Construct with [`Tolerances::default`] and override
/// fields as needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Activity test: a component is active when `|F(x)| <= activity`.
    /// Product-type cone memberships use the same bound on `|F1*F2|`.
    pub activity: f64,
    /// Multiplier zero test: `λ` counts as zero when `|λ| <= zero`.
    /// Strict inequalities (`λ > 0`) mean `λ > zero`.
    pub zero: f64,
    /// W-stationarity threshold on the stationarity residual norm.
    pub w_residual: f64,
    /// Relative rank threshold: a singular value counts as nonzero when it
    /// exceeds `sigma_rel * max(σ_max, 1)`.
    pub sigma_rel: f64,
    /// Relative eigenvalue threshold for the quadratic index and ND3:
    /// effective tolerance is `eig_rel * max(max|λ|, 1)`.
    pub eig_rel: f64,
    /// Newton iteration cap for stratified and KKT solves.
    pub newton_max_iter: usize,
    /// Newton step-size convergence tolerance.
    pub newton_step: f64,
    /// Newton residual convergence tolerance.
    pub newton_residual: f64,
    /// Scan deduplication radius in the max norm.
    pub dedupe_radius: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            activity: 1e-8,
            zero: 1e-9,
            w_residual: 1e-8,
            sigma_rel: 1e-10,
            eig_rel: 1e-8,
            newton_max_iter: 50,
            newton_step: 1e-12,
            newton_residual: 1e-10,
            dedupe_radius: 1e-6,
        }
    }
}

impl Tolerances {
    /// Effective singular-value threshold given the largest singular value.
    pub fn sigma_threshold(&self, sigma_max: f64) -> f64 {
        self.sigma_rel * sigma_max.max(1.0)
    }

    /// Effective eigenvalue threshold given the largest eigenvalue magnitude.
    pub fn eig_threshold(&self, eig_max_abs: f64) -> f64 {
        self.eig_rel * eig_max_abs.max(1.0)
    }

    /// Multiplier sign predicates under the zero tolerance.
    pub fn is_zero(&self, v: f64) -> bool {
        v.abs() <= self.zero
    }

    pub fn is_pos(&self, v: f64) -> bool {
        v > self.zero
    }

    pub fn is_neg(&self, v: f64) -> bool {
        v < -self.zero
    }

    /// Non-strict `v >= 0` under the zero tolerance.
    pub fn nonneg(&self, v: f64) -> bool {
        !self.is_neg(v)
    }

    /// Non-strict `v <= 0` under the zero tolerance.
    pub fn nonpos(&self, v: f64) -> bool {
        !self.is_pos(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_predicates_partition() {
        let t = Tolerances::default();
        for v in [-1.0, -1e-9, -1e-10, 0.0, 1e-10, 1e-9, 1.0] {
            let classes =
                [t.is_neg(v), t.is_zero(v), t.is_pos(v)].iter().filter(|&&b| b).count();
            assert_eq!(classes, 1, "v={v}");
        }
        assert!(t.nonneg(0.0) && t.nonneg(1e-12) && t.nonneg(-1e-12));
        assert!(!t.nonneg(-1.0));
    }

    #[test]
    fn thresholds_floor_at_one() {
        let t = Tolerances::default();
        assert_eq!(t.sigma_threshold(0.5), 1e-10);
        assert_eq!(t.sigma_threshold(100.0), 1e-8);
        assert_eq!(t.eig_threshold(0.0), 1e-8);
        assert_eq!(t.eig_threshold(10.0), 1e-7);
    }
}
