use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use gwsr::angular::{mu_gw_angular, mu_mink_angular};
use gwsr::emission::{peak_delta_gamma, EmissionCurve, Peak, ScalingReport};
use gwsr::io::CsvTable;
use gwsr::kernels::GwKernel;
use gwsr::oracle::{highprec_eta, run_suite, Suite};
use gwsr::shape_factor::{eta, sweep, SweepGrid};
use gwsr::{make_array, GwSignal, ShapeFactors};

#[test]
fn full_suite_passes() {
    for r in run_suite(Suite::All, 1e-8).unwrap() {
        assert!(r.pass, "{}", r.to_json_line());
    }
}

#[test]
fn eta_small_array_matches_extended_precision() {
    let g = make_array(5, 1.0).unwrap();
    let got = eta(&g, &GwKernel::new(1e-2, 1e-4).unwrap());
    let want = highprec_eta(5, 1.0, 1e-2).unwrap();
    assert!((got - want).abs() <= 1e-10 * want.abs(), "{got} vs {want}");
}

#[test]
fn sweep_single_cell_matches_direct_call() {
    let grid = sweep(&[300], &[0.37], 1e-3, 1e-4).unwrap();
    let sf =
        ShapeFactors::compute(&make_array(300, 0.37).unwrap(), &GwSignal::new(1e-21, 1e-3).unwrap(), 1e-4).unwrap();
    let c = grid.cell(0, 0);
    assert_eq!(c.mu_m_n, sf.mu_mink * 300.0);
    assert_eq!(c.eta, sf.eta);
}

#[test]
fn tables_round_trip_losslessly() {
    let grid = sweep(&[10, 1000], &[0.1, 0.5, 1.0], 1e-2, 1e-4).unwrap();
    let back = SweepGrid::from_table(&CsvTable::parse(&grid.to_table().to_csv()).unwrap()).unwrap();
    assert_eq!(back, grid);

    let sf = ShapeFactors::from_parts(0.0, 499.5, 1e-21, 1000);
    let curve = EmissionCurve::from_shape(1000, &sf, 0.8 * PI, 6.0, 33).unwrap();
    let back = EmissionCurve::from_table(&CsvTable::parse(&curve.to_table().to_csv()).unwrap()).unwrap();
    assert_eq!(back, curve);

    let peaks: Vec<Peak> = [1e3, 1e4, 1e5].iter().map(|&n| Peak { t: 0.35, value: n * n * 1e-20 }).collect();
    let rep = ScalingReport::from_peaks(vec![1000, 10_000, 100_000], &peaks);
    let back = ScalingReport::from_table(&CsvTable::parse(&rep.to_table().to_csv()).unwrap()).unwrap();
    assert_eq!(back, rep);
}

#[test]
fn eta_plateaus_beyond_cutoff() {
    // past the cutoff the kernel oscillates, so eta moves by far less than N
    let w = 1e-2;
    let k = GwKernel::new(w, 1e-4).unwrap();
    let e1 = eta(&make_array(2000, 1.0).unwrap(), &k);
    let e2 = eta(&make_array(4000, 1.0).unwrap(), &k);
    assert!((e2 - e1).abs() < 0.05 * e1.abs(), "{e1} {e2}");
}

#[test]
fn angular_density_is_symmetric_and_directional() {
    let g = make_array(10, 1.0).unwrap();
    for phi in [0.3, 1.1] {
        let a = mu_mink_angular(phi, &g, 1e-10).unwrap();
        let b = mu_mink_angular(PI - phi, &g, 1e-10).unwrap();
        assert!((a - b).abs() < 1e-10);
        let a = mu_gw_angular(phi, &g, 1e-2, 1e-10).unwrap();
        let b = mu_gw_angular(-phi, &g, 1e-2, 1e-10).unwrap();
        assert!((a - b).abs() < 1e-10);
    }
    assert!(mu_gw_angular(FRAC_PI_4, &g, 1e-2, 1e-10).unwrap().abs() < 1e-10);
    assert!(mu_gw_angular(0.0, &g, 1e-2, 1e-10).unwrap() > mu_gw_angular(FRAC_PI_2, &g, 1e-2, 1e-10).unwrap());
}

#[test]
fn imprint_peaks_early() {
    let sf = ShapeFactors::from_parts(0.0, 4.9e7, 1e-21, 100_000_000);
    let p = peak_delta_gamma(100_000_000, &sf, 0.8 * PI, 6.0).unwrap();
    assert!(p.t > 0.2 && p.t < 0.5);
    assert!(p.value > 0.0);
}
