//! Boundary-data exhaustion u_j → u on a fixed domain, and binned asymptotics.

use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::profile::ProfileFns;
use crate::report::{median, AsymptoticsReport, BinRow, ReportRow};

use super::grid::Field2D;
use super::solve::{solve_dirichlet, BoundaryData, FdOptions, FdProblem, SolveStats};

#[derive(Debug, Clone, Serialize)]
pub struct ExhaustDiagnostics {
    pub j_schedule: Vec<f64>,
    pub centre_values: Vec<f64>,
    /// min over nodes of u_{j_{m+1}} − u_{j_m}.
    pub min_increments: Vec<f64>,
    /// max over nodes of u_{j_{m+1}} − u_{j_m}.
    pub max_increments: Vec<f64>,
    /// |u_{j_m} − u_{j_{m−1}}| / |u_{j_{m−1}} − u_{j_{m−2}}| in max norm over d ≥ 0.2·diam.
    pub cauchy_ratios: Vec<f64>,
    pub monotone: bool,
    pub stats: Vec<SolveStats>,
}

#[derive(Debug, Clone)]
pub struct Exhaustion {
    /// Solutions for each j, in schedule order; the last is the limit estimate.
    pub levels: Vec<Field2D>,
    pub diagnostics: ExhaustDiagnostics,
}

impl Exhaustion {
    pub fn limit(&self) -> &Field2D {
        self.levels.last().expect("at least three levels")
    }
}

pub fn exhaust(prob: &FdProblem, grid: &Field2D, j_schedule: &[f64], opts: &FdOptions) -> Result<Exhaustion> {
    if j_schedule.len() < 3 || j_schedule.windows(2).any(|w| !(w[1] > w[0])) {
        return param("exhaustion needs a strictly increasing schedule of at least 3 values");
    }
    let centre = grid.centre();
    let deep: Vec<usize> = grid.interior_nodes().filter(|&p| grid.dist[p] >= 0.2 * prob.domain.diameter()).collect();
    let mut levels: Vec<Field2D> = Vec::with_capacity(j_schedule.len());
    let mut stats = Vec::new();
    for &j in j_schedule {
        let initial = levels.last().map(|f| {
            f.values.iter().map(|v| if v.is_nan() { j } else { *v }).collect::<Vec<f64>>()
        });
        match solve_dirichlet(prob, &BoundaryData::Constant(j), grid, initial.as_deref(), opts) {
            Ok((field, st)) => {
                levels.push(field);
                stats.push(st);
            }
            Err(e) => {
                return Err(Error::ExhaustionFailure {
                    completed: j_schedule[..levels.len()].to_vec(),
                    centre_values: levels.iter().map(|f| f.values[centre]).collect(),
                    source: Box::new(e),
                })
            }
        }
    }
    let mut min_increments = Vec::new();
    let mut max_increments = Vec::new();
    let mut deep_norms = Vec::new();
    for pair in levels.windows(2) {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in grid.interior_nodes() {
            let d = pair[1].values[p] - pair[0].values[p];
            lo = lo.min(d);
            hi = hi.max(d);
        }
        min_increments.push(lo);
        max_increments.push(hi);
        deep_norms.push(deep.iter().map(|&p| (pair[1].values[p] - pair[0].values[p]).abs()).fold(0.0, f64::max));
    }
    let cauchy_ratios = deep_norms.windows(2).map(|w| w[1] / w[0]).collect();
    let monotone = min_increments.iter().all(|&d| d >= -1e-8);
    let diagnostics = ExhaustDiagnostics {
        j_schedule: j_schedule.to_vec(),
        centre_values: levels.iter().map(|f| f.values[centre]).collect(),
        min_increments,
        max_increments,
        cauchy_ratios,
        monotone,
        stats,
    };
    Ok(Exhaustion { levels, diagnostics })
}

/// Geometric distance bins [d₀2ⁱ, d₀2ⁱ⁺¹) with d₀ = 0.005 up to `d_max`.
pub fn default_bins(d_max: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut lo = 0.005;
    while 2.0 * lo <= d_max * (1.0 + 1e-12) {
        out.push((lo, 2.0 * lo));
        lo *= 2.0;
    }
    out
}

/// Per-bin ratio statistics of u/φ(ξM(d)) over collar nodes.
///
/// With `previous` (the solution for the preceding boundary value) bins whose
/// median ratio moved by more than 1% are flagged as truncated.
pub fn asymptotics_report_2d(
    field: &Field2D,
    previous: Option<&Field2D>,
    p: &ProfileFns,
    xi: f64,
    bins: &[(f64, f64)],
) -> Result<AsymptoticsReport> {
    if !(xi > 0.0) || bins.is_empty() {
        return param("report needs xi > 0 and at least one bin");
    }
    let mut rows = Vec::new();
    let mut out_bins = Vec::new();
    let mut empty = Vec::new();
    for &(lo, hi) in bins {
        let mut ratios = Vec::new();
        let mut prev_ratios = Vec::new();
        for q in field.interior_nodes() {
            let d = field.dist[q];
            if !(d >= lo && d < hi) {
                continue;
            }
            let predicted = p.predicted_profile(xi, d)?;
            let u = field.values[q];
            rows.push(ReportRow { d, u, predicted, ratio: u / predicted });
            ratios.push(u / predicted);
            if let Some(prev) = previous {
                prev_ratios.push(prev.values[q] / predicted);
            }
        }
        if ratios.is_empty() {
            empty.push((lo, hi));
            continue;
        }
        let med = median(&ratios);
        let truncated = !prev_ratios.is_empty() && (med - median(&prev_ratios)).abs() > 0.01 * med.abs();
        out_bins.push(BinRow {
            d_lo: lo,
            d_hi: hi,
            count: ratios.len(),
            min_ratio: ratios.iter().copied().fold(f64::INFINITY, f64::min),
            median_ratio: med,
            max_ratio: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            truncated,
        });
    }
    rows.sort_by(|a, b| a.d.total_cmp(&b.d).then(a.u.total_cmp(&b.u)));
    if !empty.is_empty() {
        return Err(Error::ReportTruncated { reason: format!("empty collar bins {empty:?}"), rows });
    }
    Ok(AsymptoticsReport { xi, rows, bins: out_bins })
}
