//! Independent references for every closed form in the crate: Bessel
//! quadrature of the transverse-mode integrals, explicit double sums over
//! pairs and extended-precision arithmetic.

mod bessel;
mod highprec;
mod quad;
mod suite;

pub use bessel::{bessel_j, j0, j1, j2};
pub use highprec::{
    highprec_delta_gamma, highprec_eta, highprec_f_tilde, highprec_gw_kernel, HIGHPREC_PAIR_LIMIT, PRECISION_BITS,
};
pub use quad::adaptive_simpson;
pub use suite::{run_suite, Suite};

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::kernels::{f_mink, f_tilde};
use crate::summation::Neumaier;

/// Largest `N` for the O(N^2) reference sum.
pub const BRUTE_FORCE_LIMIT: u64 = 5000;

/// Outcome of checking one identity over a set of samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToleranceReport {
    pub identity: String,
    pub max_rel_err: f64,
    pub samples: usize,
    pub pass: bool,
    /// Parameter of the worst sample, reported only on failure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_sample: Option<String>,
}

impl ToleranceReport {
    /// Builds a report from `(sample label, error)` pairs. A NaN error fails.
    pub fn from_errors(identity: &str, errors: impl IntoIterator<Item = (String, f64)>, tol: f64) -> Self {
        let mut worst: Option<(String, f64)> = None;
        let mut samples = 0;
        for (label, err) in errors {
            samples += 1;
            let err = if err.is_nan() { f64::INFINITY } else { err };
            if worst.as_ref().is_none_or(|w| err > w.1) {
                worst = Some((label, err));
            }
        }
        let max_rel_err = worst.as_ref().map_or(0.0, |w| w.1);
        let pass = samples > 0 && max_rel_err <= tol;
        ToleranceReport {
            identity: identity.to_string(),
            max_rel_err,
            samples,
            pass,
            worst_sample: if pass { None } else { worst.map(|w| w.0) },
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report is plain data")
    }
}

/// `int_0^1 dk k J0(k y) / sqrt(1 - k^2)` with `k = sin(chi)`.
pub fn sinc_integral(y: f64, tol: f64) -> f64 {
    let pieces = 8usize.max(y.ceil() as usize);
    adaptive_simpson(&|chi: f64| chi.sin() * j0(y * chi.sin()), 0.0, FRAC_PI_2, tol, pieces)
}

/// `int_0^a dk k (2a / sqrt(a^2 - k^2)) J2(k dx)` with `k = a sin(chi)`.
pub fn j2_integral(a: f64, dx: f64, tol: f64) -> f64 {
    let y = a * dx;
    let pieces = 8usize.max(y.ceil() as usize);
    2.0 * a
        * a
        * adaptive_simpson(&|chi: f64| chi.sin() * j2(y * chi.sin()), 0.0, FRAC_PI_2, tol / (2.0 * a * a), pieces)
}

/// Magnitude scale of `sin(y)/y`, used to normalise errors near its zeros.
fn sinc_envelope(y: f64) -> f64 {
    1f64.min(1.0 / y)
}

/// Magnitude scale of `f~(y)`: `y^2/6` near the origin, `2/y` far out.
fn tilde_envelope(y: f64) -> f64 {
    (y * y / 6.0).min(2.0 / y)
}

/// Checks the transverse-mode integral of `J0` against `sin(y)/y` at each
/// `y = omega0 dx`. Errors are relative to the kernel envelope `min(1, 1/y)`.
pub fn verify_sinc_identity(samples: &[f64], tol: f64) -> ToleranceReport {
    let errors = samples.iter().map(|&y| {
        let env = sinc_envelope(y);
        let got = sinc_integral(y, 1e-3 * tol * env);
        (format!("omega0*dx = {y:e}"), (got - f_mink(y)).abs() / env)
    });
    ToleranceReport::from_errors("sinc", errors.collect::<Vec<_>>(), tol)
}

/// Checks the `J2` integral against `a^2 f~(a dx)` for each `(a, dx)`.
pub fn verify_j2_identity(samples: &[(f64, f64)], tol: f64) -> ToleranceReport {
    let errors = samples.iter().map(|&(a, dx)| {
        let env = a * a * tilde_envelope(a * dx);
        let got = j2_integral(a, dx, 1e-3 * tol * env);
        (format!("a = {a:e}, dx = {dx:e}"), (got - a * a * f_tilde(a * dx)).abs() / env)
    });
    ToleranceReport::from_errors("j2", errors.collect::<Vec<_>>(), tol)
}

/// `count` log-spaced points in `[lo, hi]`.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

/// Fractional parts of `k * alpha`: a deterministic, evenly spread sequence.
pub fn weyl(k: usize, alpha: f64) -> f64 {
    (k as f64 * alpha).fract()
}

pub fn default_sinc_samples() -> Vec<f64> {
    log_spaced(1e-2, 1e3, 50)
}

/// 50 pairs with `a` spread over `[0.5, 2]` and `dx` log-spaced in `[1e-2, 5e2]`.
pub fn default_j2_samples() -> Vec<(f64, f64)> {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    log_spaced(1e-2, 5e2, 50).into_iter().enumerate().map(|(k, dx)| (0.5 + 1.5 * weyl(k + 1, golden), dx)).collect()
}

/// `sum_{i != j} K(|i - j|)` as an explicit double loop.
pub fn brute_pair_sum(geom: &ArrayGeometry, kernel: impl Fn(u64) -> f64) -> Result<f64> {
    let n = geom.n_atoms();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::BudgetExceeded { n, limit: BRUTE_FORCE_LIMIT });
    }
    let mut acc = Neumaier::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc.add(kernel(i.abs_diff(j)));
            }
        }
    }
    Ok(acc.total())
}
