//! Full per-point classification report and its JSON shape.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::morse::{self, NdFlags, Verdict};
use crate::problem::{ConeKind, SnoProblem};
use crate::stationarity::{self, NotionFlags, SaddleClass};
use crate::tol::Tolerances;

/// Stationarity flags in report form. `c` is present only for the
/// complementarity and disjunctive cones, where the Clarke-subdifferential
/// route applies; it always agrees with `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReportFlags {
    #[serde(rename = "W")]
    pub w: bool,
    #[serde(rename = "Nhat")]
    pub nhat: bool,
    #[serde(rename = "N")]
    pub n: bool,
    #[serde(rename = "Nbar")]
    pub nbar: bool,
    #[serde(rename = "T")]
    pub t: bool,
    #[serde(rename = "C")]
    pub c: Option<bool>,
}

impl ReportFlags {
    fn new(flags: NotionFlags, c: Option<bool>) -> Self {
        ReportFlags {
            w: flags.w,
            nhat: flags.frechet_hat,
            n: flags.limiting,
            nbar: flags.clarke_bar,
            t: flags.t_stationary,
            c,
        }
    }
}

/// Multipliers of one constraint; `None` marks a component that carries no
/// multiplier at this point (inactive, or inactive under the local
/// reduction).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MultiplierPair {
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
}

/// Constraint-qualification summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LicqSummary {
    pub holds: bool,
    pub rank: usize,
    /// Number of active component functions.
    pub active: usize,
    /// Smallest singular value of the stacked active gradients; serialized
    /// as null when no component is active.
    pub smallest_singular_value: f64,
}

/// Everything the classifiers know about one feasible point.
#[derive(Debug, Clone, Serialize)]
pub struct StationarityReport {
    pub point: Vec<f64>,
    /// Objective value at the point.
    pub objective: f64,
    /// Norm of the stationarity residual.
    pub residual: f64,
    pub licq: LicqSummary,
    pub multipliers: Vec<MultiplierPair>,
    pub flags: ReportFlags,
    pub saddle: SaddleClass,
    #[serde(rename = "QI")]
    pub qi: usize,
    #[serde(rename = "BI")]
    pub bi: usize,
    #[serde(rename = "TI")]
    pub ti: usize,
    pub nd: NdFlags,
    pub verdict: Verdict,
}

impl StationarityReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serialization cannot fail")
    }
}

/// Classify a feasible point of `p`: feasibility and the constraint
/// qualification are checked, the multipliers solved, and the notion flags,
/// saddle taxonomy, indices, and Morse verdict assembled.
///
/// Errors: [`Error::Infeasible`] when the point is outside the feasible set
/// at `tols.activity`, [`Error::LicqFailure`] when active gradients are
/// dependent (multipliers would not be unique).
pub fn classify_point(
    p: &SnoProblem,
    x: &[f64],
    tols: &Tolerances,
) -> Result<StationarityReport> {
    let pattern = p.active_pattern(x, tols.activity)?;
    let licq = stationarity::licq(p, x, tols)?;
    if !licq.holds {
        return Err(Error::LicqFailure { rank: licq.rank, active: licq.active_gradients.rows() });
    }
    let ms = stationarity::solve_multipliers_with(p, x, &pattern, tols)?;
    let flags = stationarity::classify_notions(&ms, &pattern, p.cone(), tols);
    let c = match p.cone() {
        ConeKind::Complementarity | ConeKind::Disjunctive => {
            Some(stationarity::c_stationarity_check(p.cone(), &ms, &pattern, tols)?)
        }
        _ => None,
    };
    let saddle = stationarity::classify_saddle(&ms, &pattern, p.cone(), flags.t_stationary, tols);
    let lag = morse::lagrange_data(p, x, &pattern, &ms, tols)?;
    let (qi, nd3) = morse::quadratic_index(&lag.eigenvalues, tols);
    let bi = morse::biactive_index(&ms, &pattern, p.cone(), tols);
    let nd = morse::nondegeneracy(licq.holds, &ms, &pattern, nd3, tols);
    let morse_report = morse::morse_verdict(flags.t_stationary, nd, qi, bi);
    let multipliers = (0..p.m())
        .map(|i| MultiplierPair { lambda1: ms.lambda1[i], lambda2: ms.lambda2[i] })
        .collect();
    Ok(StationarityReport {
        point: x.to_vec(),
        objective: p.objective().eval(x)?,
        residual: ms.residual,
        licq: LicqSummary {
            holds: licq.holds,
            rank: licq.rank,
            active: licq.active_gradients.rows(),
            smallest_singular_value: licq.smallest_singular_value,
        },
        multipliers,
        flags: ReportFlags::new(flags, c),
        saddle,
        qi,
        bi,
        ti: morse_report.ti,
        nd,
        verdict: morse_report.verdict,
    })
}
