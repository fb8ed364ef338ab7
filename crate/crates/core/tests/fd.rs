mod common;

use common::{quartic_torsion_error, torsion_error, truncated_liouville_error};
use hessian_blowup::fd::{
    asymptotics_report_2d, build_grid, default_bins, exhaust, solve_dirichlet, BoundaryData, DomainSpec2D, FdOptions,
    FdProblem,
};
use hessian_blowup::profile::{NonlinearitySpec, ProfileFns, WeightSpec};

#[test]
fn torsion_problem_is_reproduced() {
    let e = torsion_error(1.0 / 64.0);
    assert!(e <= 3e-4, "{e}");
}

#[test]
fn quartic_torsion_second_order() {
    let errs: Vec<f64> = [1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0].iter().map(|&h| quartic_torsion_error(h)).collect();
    let orders = [(errs[0] / errs[1]).log2(), (errs[1] / errs[2]).log2()];
    assert!(orders.iter().all(|p| *p >= 1.9), "{errs:?} {orders:?}");
}

// The singular data make h ≥ 1/64 pre-asymptotic (order ≈ 1.75), so the
// order is read off the two finest grids.
#[test]
fn truncated_liouville_second_order() {
    let errs: Vec<f64> = [1.0 / 128.0, 1.0 / 256.0].iter().map(|&h| truncated_liouville_error(h)).collect();
    assert!(errs[0] <= 1e-3, "{errs:?}");
    let p = (errs[0] / errs[1]).log2();
    assert!(p >= 1.9, "{errs:?} order {p}");
}

#[test]
fn comparison_in_boundary_data() {
    let dom = DomainSpec2D::ellipse(1.2, 1.0).unwrap();
    let prob = FdProblem::new(dom, NonlinearitySpec::power(3.0).unwrap(), WeightSpec::unit());
    let grid = build_grid(&dom, 1.0 / 32.0).unwrap();
    let opts = FdOptions::default();
    let (u1, _) = solve_dirichlet(&prob, &BoundaryData::Constant(1.0), &grid, None, &opts).unwrap();
    let (u2, _) = solve_dirichlet(&prob, &BoundaryData::Constant(2.0), &grid, None, &opts).unwrap();
    for p in grid.interior_nodes() {
        assert!(u1.values[p] <= u2.values[p] + 1e-8);
        assert!(u2.values[p] <= 2.0 + 1e-8);
    }
}

#[test]
fn solve_is_deterministic() {
    let dom = DomainSpec2D::disk(1.0).unwrap();
    let prob = FdProblem::new(dom, NonlinearitySpec::exponential(2.0).unwrap(), WeightSpec::unit());
    let grid = build_grid(&dom, 1.0 / 16.0).unwrap();
    let run = || solve_dirichlet(&prob, &BoundaryData::Constant(3.0), &grid, None, &FdOptions::default()).unwrap().0;
    let (a, b) = (run(), run());
    assert!(a.values.iter().zip(&b.values).all(|(x, y)| x.to_bits() == y.to_bits()));
}

#[test]
fn liouville_exhaustion() {
    let dom = DomainSpec2D::disk(1.0).unwrap();
    let prob = FdProblem::new(dom, NonlinearitySpec::exponential(2.0).unwrap(), WeightSpec::unit());
    let grid = build_grid(&dom, 1.0 / 64.0).unwrap();
    let ex = exhaust(&prob, &grid, &[4.0, 6.0, 8.0, 10.0], &FdOptions::default()).unwrap();
    let d = &ex.diagnostics;
    assert!(d.monotone, "{:?}", d.min_increments);
    let c = &d.centre_values;
    assert!((c[3] - c[2]).abs() < (c[2] - c[1]).abs(), "{c:?}");
    assert!(d.cauchy_ratios.iter().all(|r| *r < 1.0), "{:?}", d.cauchy_ratios);

    let pf = ProfileFns::new(&NonlinearitySpec::exponential(2.0).unwrap(), 1, WeightSpec::unit()).unwrap();
    let rep = asymptotics_report_2d(ex.limit(), Some(&ex.levels[2]), &pf, 1.0, &default_bins(0.32)).unwrap();
    let bin = rep.bins.iter().find(|b| b.d_lo == 0.02).unwrap();
    assert!((bin.median_ratio - 1.0).abs() < 0.1, "{bin:?}");
}

#[test]
fn exhaustion_limit_at_centre() {
    let dom = DomainSpec2D::disk(1.0).unwrap();
    let prob = FdProblem::new(dom, NonlinearitySpec::exponential(2.0).unwrap(), WeightSpec::unit());
    let grid = build_grid(&dom, 1.0 / 128.0).unwrap();
    let ex = exhaust(&prob, &grid, &[4.0, 8.0, 12.0], &FdOptions::default()).unwrap();
    let centre = ex.limit().values[grid.centre()];
    assert!((centre - 2f64.ln()).abs() <= 5e-3);
}

// The exact ratio is 1 + O(κd/|ln d|) > 1 at every finite d, so the reliable
// bins sit just above 1 rather than straddling it.
#[test]
fn ellipse_reliable_bin_near_one() {
    let dom = DomainSpec2D::ellipse(1.2, 1.0).unwrap();
    let prob = FdProblem::new(dom, NonlinearitySpec::exponential(2.0).unwrap(), WeightSpec::unit());
    let grid = build_grid(&dom, 1.0 / 64.0).unwrap();
    let ex = exhaust(&prob, &grid, &[4.0, 6.0, 8.0, 10.0], &FdOptions::default()).unwrap();
    let pf = ProfileFns::new(&NonlinearitySpec::exponential(2.0).unwrap(), 1, WeightSpec::unit()).unwrap();
    let rep = asymptotics_report_2d(ex.limit(), Some(&ex.levels[2]), &pf, 1.0, &default_bins(0.32)).unwrap();
    let deepest = rep.bins.iter().find(|b| !b.truncated).unwrap();
    assert!(deepest.min_ratio >= 0.99 && deepest.max_ratio <= 1.1, "{deepest:?}");
    assert!((deepest.median_ratio - 1.0).abs() < 0.1, "{deepest:?}");
}

#[test]
fn small_boundary_data_is_flagged() {
    let dom = DomainSpec2D::disk(1.0).unwrap();
    let prob = FdProblem::new(dom, NonlinearitySpec::exponential(2.0).unwrap(), WeightSpec::unit());
    let grid = build_grid(&dom, 1.0 / 32.0).unwrap();
    let ex = exhaust(&prob, &grid, &[1.0, 1.5, 2.0], &FdOptions::default()).unwrap();
    let pf = ProfileFns::new(&NonlinearitySpec::exponential(2.0).unwrap(), 1, WeightSpec::unit()).unwrap();
    let rep = asymptotics_report_2d(ex.limit(), Some(&ex.levels[1]), &pf, 1.0, &default_bins(0.32)).unwrap();
    assert!(rep.bins.iter().any(|b| b.truncated && b.median_ratio < 1.0));
}
