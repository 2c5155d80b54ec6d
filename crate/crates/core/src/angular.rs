//! Azimuthal distribution of collectively emitted photons in the plane
//! transverse to the GW.
//!
//! The lattice sum over atoms collapses to the Dirichlet kernel
//! `u = sin^2(N a) / sin^2(a) - N`, `a = pi beta k cos(phi)`, where `k` is the
//! transverse wavenumber in units of `omega0`. The square-root endpoint
//! singularity of each `k` integral is removed by `k = a sin(chi)`, after which
//! a composite Gauss-Legendre rule handles the `O(N beta)` oscillations.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::emission::excitation;
use crate::error::{invalid, Error, Result};
use crate::geometry::{check_omega_bar, ArrayGeometry, GwSignal};
use crate::io::{fmt_num, CsvTable};
use crate::shape_factor::ShapeFactors;

pub const DEFAULT_QUAD_TOL: f64 = 1e-8;
pub const DEFAULT_PHI_SAMPLES: usize = 256;
/// Gauss-Legendre points per panel.
const GL_ORDER: usize = 10;
/// Panel doublings tried before reporting non-convergence.
const MAX_DOUBLINGS: u32 = 8;

/// `n`-point Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss-Legendre integral of `f` over `[a, b]` with `panels` panels.
pub fn composite_gauss(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, rule: &[(f64, f64)]) -> f64 {
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let part: f64 = rule.iter().map(|&(x, w)| w * f(mid + 0.5 * h * x)).sum();
        sum += 0.5 * h * part;
    }
    sum
}

/// `sin^2(N a) / sin^2(a) - N` with `a = pi beta k cos(phi)`.
pub fn dirichlet_u(phi: f64, k_bar: f64, n: u64, beta: f64) -> f64 {
    dirichlet_ratio(PI * beta * k_bar * phi.cos(), n) - n as f64
}

/// `sin^2(N a) / sin^2(a)`, which is `pi`-periodic in `a`.
fn dirichlet_ratio(a: f64, n: u64) -> f64 {
    let nf = n as f64;
    let r = a - PI * (a / PI).round();
    if r.abs() < 1e-6 {
        nf * nf * (1.0 - (nf * nf - 1.0) * r * r / 3.0)
    } else {
        let q = (nf * r).sin() / r.sin();
        q * q
    }
}

fn base_panels(n: u64, beta: f64, scale: f64) -> usize {
    16usize.max(4 * (n as f64 * beta * scale).ceil() as usize)
}

/// Integrates `2 a^2 sin(chi) g(a sin chi)` over `chi in [0, pi/2]`, doubling
/// the panel count until two successive results agree to `tol` after
/// multiplying by `scale`.
fn self_converged(g: impl Fn(f64) -> f64, n: u64, beta: f64, a: f64, scale: f64, tol: f64) -> Result<f64> {
    let rule = gauss_legendre(GL_ORDER);
    let integrand = |chi: f64| chi.sin() * g(a * chi.sin());
    let mut panels = base_panels(n, beta, a);
    let mut prev = composite_gauss(integrand, 0.0, FRAC_PI_2, panels, &rule);
    let mut diff = f64::INFINITY;
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let next = composite_gauss(integrand, 0.0, FRAC_PI_2, panels, &rule);
        diff = (next - prev).abs() * scale;
        prev = next;
        if diff <= tol {
            return Ok(prev);
        }
    }
    Err(Error::QuadratureNotConverged { achieved: diff, target: tol })
}

/// `mu_M(phi) = (1 / (2 pi N^2)) int_0^1 dk k u(phi, k) / sqrt(1 - k^2)`.
pub fn mu_mink_angular(phi: f64, geom: &ArrayGeometry, tol: f64) -> Result<f64> {
    let (n, beta) = (geom.n_atoms(), geom.beta());
    let scale = 1.0 / (TAU * (n * n) as f64);
    let integral = self_converged(|k| dirichlet_u(phi, k, n, beta), n, beta, 1.0, scale, tol)?;
    Ok(scale * integral)
}

/// `mu_GW(phi) / h_plus`, the difference of the two frequency-shifted
/// branches `(1 +- w)`. The difference costs about `log10(1/w)` digits.
pub fn mu_gw_angular(phi: f64, geom: &ArrayGeometry, omega_bar: f64, tol: f64) -> Result<f64> {
    check_omega_bar(omega_bar)?;
    let (n, beta) = (geom.n_atoms(), geom.beta());
    let c2 = (2.0 * phi).cos();
    let scale = 1.0 / (16.0 * PI * omega_bar * (n * n) as f64);
    let branch = |a: f64| -> Result<f64> {
        let i = self_converged(|k| c2 * dirichlet_u(phi, k, n, beta), n, beta, a, 2.0 * a * a * scale, tol / 2.0)?;
        Ok(2.0 * a * a * i)
    };
    Ok(scale * (branch(1.0 + omega_bar)? - branch(1.0 - omega_bar)?))
}

/// `Gamma(t, phi) / gamma0 = mu(phi)(N^2/4 - W^2) + (W + N/2) / (2 pi)`,
/// where `W` follows the array-wide shape factor `mu_total`.
pub fn gamma_angular(t: f64, n: u64, mu_phi: f64, mu_total: f64, theta0: f64) -> Result<f64> {
    let e = excitation(t, n, mu_total, theta0)?;
    // N^2/4 - W^2 = (W + N/2)(N/2 - W)
    Ok(mu_phi * e * (n as f64 - e) + e / TAU)
}

/// Periodic trapezoid rule over `[0, 2 pi)` for equally spaced samples.
pub fn trapezoid_periodic(values: &[f64]) -> f64 {
    TAU * values.iter().sum::<f64>() / values.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularProfile {
    pub phis: Vec<f64>,
    pub mu_m_phi: Vec<f64>,
    /// `mu_GW(phi) N / h_plus`.
    pub eta_phi: Vec<f64>,
    pub gamma_phi: Vec<f64>,
    /// Time at which `gamma_phi` is evaluated, in `1/gamma0`.
    pub t: f64,
}

pub const ANGULAR_HEADER: [&str; 4] = ["phi", "muM_phi", "eta_phi", "gamma_phi_over_gamma0"];

impl AngularProfile {
    pub fn mu_mink_total(&self) -> f64 {
        trapezoid_periodic(&self.mu_m_phi)
    }

    pub fn eta_total(&self) -> f64 {
        trapezoid_periodic(&self.eta_phi)
    }

    pub fn gamma_total(&self) -> f64 {
        trapezoid_periodic(&self.gamma_phi)
    }

    pub fn to_table(&self) -> CsvTable {
        let rows = (0..self.phis.len())
            .map(|i| {
                vec![
                    fmt_num(self.phis[i]),
                    fmt_num(self.mu_m_phi[i]),
                    fmt_num(self.eta_phi[i]),
                    fmt_num(self.gamma_phi[i]),
                ]
            })
            .collect();
        CsvTable::new(&ANGULAR_HEADER, rows)
    }
}

/// Densities on `phi_samples` equally spaced azimuths.
pub fn angular_profile(
    geom: &ArrayGeometry,
    signal: &GwSignal,
    theta0: f64,
    t: f64,
    phi_samples: usize,
    tol: f64,
    series_threshold: f64,
) -> Result<AngularProfile> {
    if phi_samples < 4 {
        return Err(invalid(format!("need at least four azimuth samples, got {phi_samples}")));
    }
    let n = geom.n_atoms();
    let sf = ShapeFactors::compute(geom, signal, series_threshold)?;
    let phis: Vec<f64> = (0..phi_samples).map(|k| TAU * k as f64 / phi_samples as f64).collect();
    let rows = phis
        .par_iter()
        .map(|&phi| -> Result<(f64, f64, f64)> {
            let mm = mu_mink_angular(phi, geom, tol)?;
            let mg = mu_gw_angular(phi, geom, signal.omega_bar(), tol)?;
            let g = gamma_angular(t, n, mm + signal.h_plus() * mg, sf.mu_total, theta0)?;
            Ok((mm, mg * n as f64, g))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AngularProfile {
        phis,
        mu_m_phi: rows.iter().map(|r| r.0).collect(),
        eta_phi: rows.iter().map(|r| r.1).collect(),
        gamma_phi: rows.iter().map(|r| r.2).collect(),
        t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre(10);
        let wsum: f64 = rule.iter().map(|r| r.1).sum();
        assert!((wsum - 2.0).abs() < 1e-14);
        let x18: f64 = rule.iter().map(|&(x, w)| w * x.powi(18)).sum();
        assert!((x18 - 2.0 / 19.0).abs() < 1e-14);
    }

    #[test]
    fn dirichlet_limits() {
        assert_eq!(dirichlet_u(0.3, 0.0, 7, 0.4), 42.0);
        assert!((dirichlet_u(FRAC_PI_2, 0.8, 7, 0.4) - 42.0).abs() < 1e-9);
        // exact multiple of pi in the argument
        assert!((dirichlet_u(0.0, 1.0, 7, 1.0) - 42.0).abs() < 1e-9);
    }

    #[test]
    fn dirichlet_is_continuous_through_the_switch() {
        let n = 9;
        for r in [0.999e-6, 1.001e-6] {
            let q = ((n as f64 * r).sin() / r.sin()).powi(2);
            assert!((dirichlet_ratio(r, n) - q).abs() < 1e-9);
        }
    }

    #[test]
    fn single_atom_has_no_angular_cooperation() {
        let g = ArrayGeometry::with_single(1, 1.0).unwrap();
        assert_eq!(mu_mink_angular(0.4, &g, 1e-8).unwrap(), 0.0);
    }

    #[test]
    fn gw_density_vanishes_on_diagonal() {
        let g = ArrayGeometry::new(10, 1.0).unwrap();
        assert!(mu_gw_angular(PI / 4.0, &g, 1e-2, 1e-8).unwrap().abs() < 1e-8);
    }
}
