//! Named validation suites. Each returns one [`ToleranceReport`] per identity;
//! tolerances other than the quadrature target are fixed here.

use std::f64::consts::{PI, TAU};
use std::str::FromStr;

use super::{
    brute_pair_sum, default_j2_samples, default_sinc_samples, highprec_delta_gamma, highprec_f_tilde,
    highprec_gw_kernel, verify_j2_identity, verify_sinc_identity, weyl, ToleranceReport,
};
use crate::angular::{dirichlet_u, mu_gw_angular, mu_mink_angular, trapezoid_periodic};
use crate::emission::{excitation, gamma_jet, gamma_total, ode_rhs_excited};
use crate::error::{invalid, Error, Result};
use crate::geometry::ArrayGeometry;
use crate::kernels::{f_gw_exact, f_gw_series, f_mink, f_tilde, GwKernel, PhaseReducer};
use crate::shape_factor::{eta, mu_mink, pair_sum};

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const SILVER: f64 = 0.414_213_562_373_095_1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Kernels,
    Quadrature,
    PairSums,
    Emission,
    Angular,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "kernels" => Suite::Kernels,
            "quadrature" => Suite::Quadrature,
            "pair-sums" => Suite::PairSums,
            "emission" => Suite::Emission,
            "angular" => Suite::Angular,
            "all" => Suite::All,
            other => {
                return Err(invalid(format!(
                    "unknown suite {other:?} (expected kernels, quadrature, pair-sums, emission, angular or all)"
                )))
            }
        })
    }
}

/// Runs `suite`; `quad_tol` is the tolerance for the two integral identities.
pub fn run_suite(suite: Suite, quad_tol: f64) -> Result<Vec<ToleranceReport>> {
    if !(quad_tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {quad_tol}")));
    }
    let mut out = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Kernels {
        out.extend(kernel_reports());
    }
    if all || suite == Suite::Quadrature {
        out.push(verify_sinc_identity(&default_sinc_samples(), quad_tol));
        out.push(verify_j2_identity(&default_j2_samples(), quad_tol));
    }
    if all || suite == Suite::PairSums {
        out.extend(pair_sum_reports()?);
    }
    if all || suite == Suite::Emission {
        out.extend(emission_reports()?);
    }
    if all || suite == Suite::Angular {
        out.extend(angular_reports()?);
    }
    Ok(out)
}

fn kernel_reports() -> Vec<ToleranceReport> {
    let mut exact = Vec::new();
    for w in [1e-1, 1e-2, 1e-3] {
        for beta in [1.0, 0.37] {
            let k = GwKernel::new(w, w).expect("valid kernel");
            let r = PhaseReducer::new(beta);
            for m in [1u64, 3, 10, 100, 1000] {
                let got = k.eval_lattice(&r, m).value;
                let want = highprec_gw_kernel(m, beta, w);
                exact.push((format!("w={w:e} beta={beta} m={m}"), (got - want).abs() / want.abs().max(w)));
            }
        }
    }
    let overlap = [1.0, TAU, 50.0].map(|x| {
        let (s, e) = (f_gw_series(x, 1e-3).value, f_gw_exact(x, 1e-3).value);
        (format!("x={x}"), (s - e).abs() / e.abs())
    });
    let tilde = [1e-6, 1e-4, 1e-2, 0.5, 0.999, 1.001, 3.0, 40.0].map(|x| {
        let want = highprec_f_tilde(x);
        (format!("x={x:e}"), (f_tilde(x) - want).abs() / want.abs())
    });
    vec![
        ToleranceReport::from_errors("gw_kernel_exact_vs_extended", exact, 1e-10),
        ToleranceReport::from_errors("gw_kernel_series_vs_exact", overlap, 1e-5),
        ToleranceReport::from_errors("f_tilde_vs_extended", tilde, 1e-13),
    ]
}

fn pair_sum_reports() -> Result<Vec<ToleranceReport>> {
    let mut errors = Vec::new();
    for k in 1..=20 {
        let n = 2 + (1998.0 * weyl(k, GOLDEN)) as u64;
        let beta = 0.05 + 0.9 * weyl(k, SILVER);
        let g = ArrayGeometry::new(n, beta)?;
        let r = g.reducer();
        let kernel = |m: u64| f_mink(r.phase(m));
        let fast = pair_sum(&g, kernel);
        let slow = brute_pair_sum(&g, kernel)?;
        errors.push((format!("N={n} beta={beta}"), (fast - slow).abs() / slow.abs()));
    }
    Ok(vec![ToleranceReport::from_errors("toeplitz_vs_brute", errors, 1e-12)])
}

/// `dE/dt` by a five-point stencil, with `E = W + N/2`.
pub(crate) fn excitation_rate_fd(t: f64, n: u64, mu: f64, theta0: f64) -> Result<f64> {
    let h = 1e-3 / (1.0 + (mu * n as f64).abs());
    let e = |dt: f64| excitation(t + dt, n, mu, theta0);
    Ok((e(-2.0 * h)? - 8.0 * e(-h)? + 8.0 * e(h)? - e(2.0 * h)?) / (12.0 * h))
}

/// Deterministic admissible `(t, N, mu, theta0)` points.
pub(crate) fn emission_points(count: usize) -> Vec<(f64, u64, f64, f64)> {
    (1..=count)
        .map(|k| {
            let t = 0.05 + 5.9 * weyl(k, GOLDEN);
            let n = 2 + (998.0 * weyl(k, SILVER)) as u64;
            let s = -0.9 + 5.9 * weyl(k, 0.7548776662466927);
            let theta0 = 0.05 + 3.0 * weyl(k, 0.5698402909980532);
            (t, n, s / n as f64, theta0)
        })
        .collect()
}

fn emission_reports() -> Result<Vec<ToleranceReport>> {
    let points = emission_points(100);
    let mut rate = Vec::new();
    let mut ode = Vec::new();
    for &(t, n, mu, th) in &points {
        let g = gamma_total(t, n, mu, th)?;
        let label = format!("t={t} N={n} mu={mu:e} theta0={th}");
        rate.push((label.clone(), (g + excitation_rate_fd(t, n, mu, th)?).abs() / g));
        let e = excitation(t, n, mu, th)?;
        ode.push((label, (ode_rhs_excited(e, n, mu) + g).abs() / g));
    }
    let th = 0.8 * PI;
    let (n, mu) = (1000u64, 1e-9);
    let pairs: Vec<(f64, f64, f64)> = (0..=24)
        .map(|i| {
            let t = 0.25 * i as f64;
            let first = mu * gamma_jet(t, n, 0.0, th)?.d;
            Ok((t, first, highprec_delta_gamma(t, n, mu, th)?))
        })
        .collect::<Result<_>>()?;
    // The imprint changes sign near t = 1.5, where no first-order value can
    // match pointwise; across the curve the error is measured against its peak.
    let peak = pairs.iter().map(|p| p.2.abs()).fold(0.0, f64::max);
    let jet_curve = pairs.iter().map(|&(t, a, b)| (format!("t={t}"), (a - b).abs() / peak)).collect::<Vec<_>>();
    let jet_point = {
        let t = 0.5;
        let first = mu * gamma_jet(t, n, 0.0, th)?.d;
        let reference = highprec_delta_gamma(t, n, mu, th)?;
        vec![(format!("t={t}"), (first - reference).abs() / reference.abs())]
    };
    Ok(vec![
        ToleranceReport::from_errors("rate_equals_minus_dw_dt", rate, 1e-8),
        ToleranceReport::from_errors("ode_residual", ode, 1e-9),
        ToleranceReport::from_errors("jet_vs_extended_subtraction", jet_point, 1e-4),
        ToleranceReport::from_errors("jet_vs_extended_subtraction_curve", jet_curve, 1e-4),
    ])
}

fn angular_reports() -> Result<Vec<ToleranceReport>> {
    let mut dirichlet = Vec::new();
    for k in 1..=40 {
        let n = 1 + (20.0 * weyl(k, GOLDEN)) as u64;
        let beta = 0.1 + 1.9 * weyl(k, SILVER);
        let phi = TAU * weyl(k, 0.7548776662466927);
        let kb = weyl(k, 0.5698402909980532);
        let a2 = TAU * beta * kb * phi.cos();
        let mut explicit = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    explicit += (a2 * (i as f64 - j as f64)).cos();
                }
            }
        }
        let got = dirichlet_u(phi, kb, n, beta);
        dirichlet.push((format!("N={n} beta={beta} phi={phi} k={kb}"), (got - explicit).abs() / (n * n) as f64));
    }

    let geom = ArrayGeometry::new(10, 1.0)?;
    let w = 1e-2;
    let samples = 256;
    let phis: Vec<f64> = (0..samples).map(|k| TAU * k as f64 / samples as f64).collect();
    let mm: Vec<f64> = phis.iter().map(|&p| mu_mink_angular(p, &geom, 1e-10)).collect::<Result<_>>()?;
    let mg: Vec<f64> = phis.iter().map(|&p| mu_gw_angular(p, &geom, w, 1e-10)).collect::<Result<_>>()?;
    let lattice_m = mu_mink(&geom);
    let lattice_g = eta(&geom, &GwKernel::new(w, 1e-4)?) / geom.n_atoms() as f64;
    let closure_m = vec![("N=10 beta=1".to_string(), (trapezoid_periodic(&mm) - lattice_m).abs())];
    let closure_g =
        vec![("N=10 beta=1 w=1e-2".to_string(), (trapezoid_periodic(&mg) - lattice_g).abs() / lattice_g.abs())];
    Ok(vec![
        ToleranceReport::from_errors("dirichlet_vs_explicit_sum", dirichlet, 1e-10),
        ToleranceReport::from_errors("angular_closure_minkowski", closure_m, 1e-6),
        ToleranceReport::from_errors("angular_closure_gw", closure_g, 1e-6),
    ])
}
