//! Connected-component profiles of lower level sets on 2-D instances.
//!
//! The feasible set of a cone-constrained instance is typically a union of
//! curves with zero area, so an exact membership grid would be empty. A
//! cell of spacing `h` counts as feasible when the constraint image at its
//! center lies within `feas_scale * h` of the cone — distance to the cone
//! is a usable proxy for distance to the feasible set at desk scale under
//! the constraint qualification. Marked cells (feasible and `f <= a`) are
//! merged by union-find over 8-connectivity; the axis unions of these cones
//! pass through the origin corner diagonally once thickened, and
//! 8-connectivity keeps that corner from splitting spuriously.
//!
//! Component counts are a heuristic shadow of the exact level-set topology;
//! stability under grid refinement is the practical guard and is exercised
//! by the test suite.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::morse;
use crate::problem::SnoProblem;
use crate::tol::Tolerances;

/// Sweep of level values against component counts.
#[derive(Debug, Clone, Serialize)]
pub struct LevelProfile {
    pub bounds: [(f64, f64); 2],
    pub resolution: usize,
    pub feas_scale: f64,
    pub entries: Vec<LevelEntry>,
    /// Midpoints between consecutive sweep levels with differing counts.
    pub change_levels: Vec<f64>,
    /// Cross-reference of each change level against the objective values of
    /// the T-stationary points found by the scan.
    pub matches: Vec<ChangeMatch>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LevelEntry {
    pub a: f64,
    pub components: usize,
    pub feasible_cells: usize,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChangeMatch {
    pub change_level: f64,
    /// Nearest T-stationary objective value, absent when the scan found no
    /// T-stationary point.
    pub nearest_value: Option<f64>,
    pub gap: f64,
}

impl LevelProfile {
    /// CSV with one row per sweep level.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("a,components,feasible_cells\n");
        for e in &self.entries {
            out.push_str(&format!("{},{},{}\n", e.a, e.components, e.feasible_cells));
        }
        out
    }

    /// Companion JSON: change levels and their matches.
    pub fn changes_json(&self) -> serde_json::Value {
        serde_json::json!({
            "change_levels": self.change_levels,
            "matches": self.matches,
        })
    }
}

fn require_planar(p: &SnoProblem) -> Result<()> {
    if p.n() != 2 {
        return Err(Error::UnsupportedDimension { op: "level-set analysis", n: p.n() });
    }
    Ok(())
}

fn validate_grid(bounds: &[(f64, f64); 2], resolution: usize) -> Result<f64> {
    if resolution < 16 {
        return Err(Error::invalid(format!("resolution must be at least 16, got {resolution}")));
    }
    for (lo, hi) in bounds {
        if !(lo < hi) {
            return Err(Error::invalid("box bounds must satisfy lo < hi"));
        }
    }
    let hx = (bounds[0].1 - bounds[0].0) / resolution as f64;
    let hy = (bounds[1].1 - bounds[1].0) / resolution as f64;
    Ok(hx.max(hy))
}

/// Per-cell objective values and feasibility mask, computed once per grid.
struct GridCache {
    resolution: usize,
    objective: Vec<f64>,
    feasible: Vec<bool>,
}

fn grid_cache(
    p: &SnoProblem,
    bounds: &[(f64, f64); 2],
    resolution: usize,
    feas_scale: f64,
) -> Result<GridCache> {
    let h = validate_grid(bounds, resolution)?;
    let margin = feas_scale * h;
    let hx = (bounds[0].1 - bounds[0].0) / resolution as f64;
    let hy = (bounds[1].1 - bounds[1].0) / resolution as f64;
    let mut objective = Vec::with_capacity(resolution * resolution);
    let mut feasible = Vec::with_capacity(resolution * resolution);
    for j in 0..resolution {
        let y = bounds[1].0 + (j as f64 + 0.5) * hy;
        for i in 0..resolution {
            let x = bounds[0].0 + (i as f64 + 0.5) * hx;
            let c = [x, y];
            objective.push(p.objective().eval(&c)?);
            feasible.push(p.infeasibility(&c)? <= margin);
        }
    }
    Ok(GridCache { resolution, objective, feasible })
}

impl GridCache {
    /// Count 8-connected components of the marked mask at level `a`.
    fn components_at(&self, a: f64) -> (usize, usize) {
        let r = self.resolution;
        let marked: Vec<bool> = self
            .objective
            .iter()
            .zip(&self.feasible)
            .map(|(f, feas)| *feas && *f <= a)
            .collect();
        let cells = marked.iter().filter(|m| **m).count();
        let mut dsu = DisjointSet::new(r * r);
        for j in 0..r {
            for i in 0..r {
                let idx = j * r + i;
                if !marked[idx] {
                    continue;
                }
                // Union with already-visited neighbors (W, NW, N, NE).
                let neighbors: [(isize, isize); 4] = [(-1, 0), (-1, -1), (0, -1), (1, -1)];
                for (di, dj) in neighbors {
                    let (ni, nj) = (i as isize + di, j as isize + dj);
                    if ni < 0 || nj < 0 || ni >= r as isize || nj >= r as isize {
                        continue;
                    }
                    let nidx = nj as usize * r + ni as usize;
                    if marked[nidx] {
                        dsu.union(idx, nidx);
                    }
                }
            }
        }
        let mut roots = Vec::new();
        for (idx, m) in marked.iter().enumerate() {
            if *m {
                let root = dsu.find(idx);
                if !roots.contains(&root) {
                    roots.push(root);
                }
            }
        }
        (roots.len(), cells)
    }
}

/// Component count and marked-cell count of the lower level set at `a`.
pub fn grid_components(
    p: &SnoProblem,
    bounds: &[(f64, f64); 2],
    resolution: usize,
    a: f64,
    feas_scale: f64,
) -> Result<(usize, usize)> {
    require_planar(p)?;
    let cache = grid_cache(p, bounds, resolution, feas_scale)?;
    Ok(cache.components_at(a))
}

/// Sweep `steps` uniform levels over `[a_min, a_max]`, recording component
/// counts, the change levels, and their distance to the T-stationary
/// objective values found by a stratified scan over the same box.
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    p: &SnoProblem,
    bounds: &[(f64, f64); 2],
    resolution: usize,
    a_min: f64,
    a_max: f64,
    steps: usize,
    feas_scale: f64,
    seeds_per_axis: usize,
    tols: &Tolerances,
) -> Result<LevelProfile> {
    require_planar(p)?;
    if !(a_min < a_max) {
        return Err(Error::invalid("level range must satisfy a_min < a_max"));
    }
    if steps < 2 {
        return Err(Error::invalid("at least two sweep steps are required"));
    }
    let cache = grid_cache(p, bounds, resolution, feas_scale)?;
    let mut entries = Vec::with_capacity(steps);
    for k in 0..steps {
        let a = a_min + (a_max - a_min) * k as f64 / (steps - 1) as f64;
        let (components, feasible_cells) = cache.components_at(a);
        entries.push(LevelEntry { a, components, feasible_cells });
    }
    let mut change_levels = Vec::new();
    for w in entries.windows(2) {
        if w[0].components != w[1].components {
            change_levels.push(0.5 * (w[0].a + w[1].a));
        }
    }

    let scan = morse::stratified_scan(p, bounds, seeds_per_axis, tols)?;
    let t_values: Vec<f64> = scan.t_stationary().iter().map(|r| r.objective).collect();
    let matches = change_levels
        .iter()
        .map(|&level| {
            let nearest = t_values
                .iter()
                .copied()
                .min_by(|a, b| (a - level).abs().partial_cmp(&(b - level).abs()).unwrap());
            ChangeMatch {
                change_level: level,
                nearest_value: nearest,
                gap: nearest.map_or(f64::INFINITY, |v| (v - level).abs()),
            }
        })
        .collect();
    Ok(LevelProfile {
        bounds: *bounds,
        resolution,
        feas_scale,
        entries,
        change_levels,
        matches,
    })
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet { parent: (0..n).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut node: usize) -> usize {
        let mut root = node;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[node] != node {
            let next = self.parent[node];
            self.parent[node] = root;
            node = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let mut ra = self.find(a);
        let mut rb = self.find(b);
        if ra == rb {
            return;
        }
        if self.rank[ra] < self.rank[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        if self.rank[ra] == self.rank[rb] {
            self.rank[ra] = self.rank[ra].saturating_add(1);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    const BOX: [(f64, f64); 2] = [(-0.5, 1.5), (-0.5, 1.5)];

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn component_counts_bracket_the_saddle_levels() {
        let p = gallery::regular_saddle();
        // Minimum value on the feasible set is 1; the arcs merge at 2.
        let (c, cells) = grid_components(&p, &BOX, 400, 1.5, 1.5).unwrap();
        assert_eq!(c, 2);
        assert!(cells > 0);
        let (c, _) = grid_components(&p, &BOX, 400, 2.5, 1.5).unwrap();
        assert_eq!(c, 1);
        let (c, cells) = grid_components(&p, &BOX, 400, 0.5, 1.5).unwrap();
        assert_eq!(c, 0);
        assert_eq!(cells, 0);
    }

    #[test]
    fn sweep_finds_birth_and_merge_levels() {
        let p = gallery::regular_saddle();
        let profile = sweep(&p, &BOX, 200, 0.5, 2.5, 21, 1.5, 8, &tols()).unwrap();
        assert_eq!(profile.entries.len(), 21);
        assert_eq!(profile.change_levels.len(), 2);
        // Births at level 1, merge at level 2; change levels sit within one
        // sweep step (0.1) of those values.
        assert!((profile.change_levels[0] - 1.0).abs() <= 0.1);
        assert!((profile.change_levels[1] - 2.0).abs() <= 0.1);
        for m in &profile.matches {
            assert!(m.gap <= 0.1, "{m:?}");
        }
    }

    #[test]
    fn singular_profile_merges_at_origin_level() {
        let p = gallery::singular_saddle_i();
        let profile = sweep(&p, &BOX, 200, -0.75, 0.25, 21, 1.5, 8, &tols()).unwrap();
        // Two minima at f = -0.5, merge through the origin at f = 0.
        let births: Vec<f64> =
            profile.change_levels.iter().copied().filter(|l| *l < -0.2).collect();
        assert!(!births.is_empty());
        let merges: Vec<f64> =
            profile.change_levels.iter().copied().filter(|l| *l > -0.2).collect();
        assert_eq!(merges.len(), 1);
        assert!((merges[0] - 0.0).abs() <= 0.05, "{merges:?}");
    }

    #[test]
    fn empty_feasible_box_gives_zero_counts() {
        let p = gallery::regular_saddle();
        let shifted = [(2.0, 3.0), (2.0, 3.0)];
        let (c, cells) = grid_components(&p, &shifted, 32, 100.0, 1.5).unwrap();
        assert_eq!((c, cells), (0, 0));
    }

    #[test]
    fn validation_errors() {
        let p = gallery::regular_saddle();
        assert!(grid_components(&p, &BOX, 8, 1.0, 1.5).is_err());
        let p3 = SnoProblem::from_strings(
            3,
            "x1 + x2 + x3",
            &[("x1", "x2")],
            crate::problem::ConeKind::Switching,
        )
        .unwrap();
        assert!(matches!(
            grid_components(&p3, &BOX, 32, 1.0, 1.5),
            Err(Error::UnsupportedDimension { .. })
        ));
        assert!(sweep(&p, &BOX, 32, 2.0, 1.0, 5, 1.5, 8, &tols()).is_err());
        assert!(sweep(&p, &BOX, 32, 1.0, 2.0, 1, 1.5, 8, &tols()).is_err());
    }

    #[test]
    fn counts_stable_under_refinement() {
        let p = gallery::regular_saddle();
        for a in [1.5, 2.5] {
            let (c200, _) = grid_components(&p, &BOX, 200, a, 1.5).unwrap();
            let (c400, _) = grid_components(&p, &BOX, 400, a, 1.5).unwrap();
            assert_eq!(c200, c400, "a = {a}");
        }
    }
}
