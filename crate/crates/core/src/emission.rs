//! Collective decay of `N` identical two-level atoms in the mean-field
//! closed form, in units where `gamma0 = 1`.
//!
//! With `s = mu N`, `c = cos theta0` and `e = exp(-t (s + 1))`:
//!
//! ```text
//! A = (1 + c) s + 2,   D = A + (1 - c) s e
//! W + N/2 = N (1 - c)(s + 1) e / D
//! Gamma   = N (1 - c)(s + 1)^2 A e / D^2  = -dW/dt
//! ```
//!
//! The GW imprint is a first-order effect in `mu_GW`, far below what a
//! double-precision subtraction `Gamma(mu) - Gamma(0)` can resolve, so it is
//! taken from a dual-number derivative instead.

use std::ops::{Add, Div, Mul, Neg, Sub};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{check_theta0, ArrayGeometry, GwSignal};
use crate::io::{fmt_num, parse_num, CsvTable};
use crate::shape_factor::ShapeFactors;

/// Above this `|mu_GW N|` the first-order imprint stops dominating.
pub const PERTURBATIVE_LIMIT: f64 = 1e-3;
/// Coarse grid used before golden-section refinement of a peak.
pub const PEAK_COARSE_SAMPLES: usize = 512;
/// Final bracket width of the peak search, in `1/gamma0`.
pub const PEAK_TIME_RESOLUTION: f64 = 1e-4;
pub const DEFAULT_T_MAX: f64 = 6.0;

/// First-order jet `v + d * eps` with `eps^2 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub v: f64,
    pub d: f64,
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        Jet { v, d: 0.0 }
    }

    pub fn variable(v: f64) -> Self {
        Jet { v, d: 1.0 }
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        Jet { v: e, d: e * self.d }
    }

    pub fn powi(self, n: i32) -> Self {
        Jet { v: self.v.powi(n), d: n as f64 * self.v.powi(n - 1) * self.d }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet { v: self.v + o.v, d: self.d + o.d }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet { v: self.v - o.v, d: self.d - o.d }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet { v: self.v * o.v, d: self.d * o.v + self.v * o.d }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        let v = self.v / o.v;
        Jet { v, d: (self.d - v * o.d) / o.v }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet { v: -self.v, d: -self.d }
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, o: f64) -> Jet {
        Jet { v: self.v + o, d: self.d }
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, o: f64) -> Jet {
        Jet { v: self.v * o, d: self.d * o }
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        o * self
    }
}

/// `(1 - cos theta0, 1 + cos theta0)` without cancellation near the ends.
fn one_minus_plus_cos(theta0: f64) -> (f64, f64) {
    let (s, c) = (0.5 * theta0).sin_cos();
    (2.0 * s * s, 2.0 * c * c)
}

fn check(t: f64, mu_n: f64, theta0: f64) -> Result<()> {
    check_theta0(theta0)?;
    if !t.is_finite() {
        return Err(invalid(format!("time must be finite, got {t}")));
    }
    if !(mu_n > -1.0) {
        return Err(Error::PoleInClosedForm { mu_n });
    }
    Ok(())
}

/// Excited population `W + N/2` and rate `Gamma` as jets in `s = mu N`.
fn closed_form(t: f64, n: f64, s: Jet, theta0: f64) -> (Jet, Jet) {
    let (omc, opc) = one_minus_plus_cos(theta0);
    let k = s + 1.0;
    let e = (k * -t).exp();
    let a = opc * s + 2.0;
    let d = a + omc * s * e;
    let excited = (n * omc) * k * e / d;
    let gamma = (n * omc) * k * k * a * e / (d * d);
    (excited, gamma)
}

/// `W(t) = <J_z>`, from `-N cos(theta0)/2` at `t = 0` down to `-N/2`.
pub fn energy_w(t: f64, n: u64, mu: f64, theta0: f64) -> Result<f64> {
    Ok(excitation(t, n, mu, theta0)? - 0.5 * n as f64)
}

/// `W(t) + N/2`, free of the cancellation in `W` at late times.
pub fn excitation(t: f64, n: u64, mu: f64, theta0: f64) -> Result<f64> {
    let nf = n as f64;
    check(t, mu * nf, theta0)?;
    Ok(closed_form(t, nf, Jet::constant(mu * nf), theta0).0.v)
}

/// Total emission rate `Gamma / gamma0`.
pub fn gamma_total(t: f64, n: u64, mu: f64, theta0: f64) -> Result<f64> {
    let nf = n as f64;
    check(t, mu * nf, theta0)?;
    Ok(closed_form(t, nf, Jet::constant(mu * nf), theta0).1.v)
}

/// `dGamma/dmu` alongside `Gamma` at shape factor `mu`.
pub fn gamma_jet(t: f64, n: u64, mu: f64, theta0: f64) -> Result<Jet> {
    let nf = n as f64;
    check(t, mu * nf, theta0)?;
    let s = Jet { v: mu * nf, d: nf };
    Ok(closed_form(t, nf, s, theta0).1)
}

/// `(N/2)(1 - cos theta0) e^{-t}`.
pub fn gamma_inc(t: f64, n: u64, theta0: f64) -> Result<f64> {
    check_theta0(theta0)?;
    let (omc, _) = one_minus_plus_cos(theta0);
    Ok(0.5 * n as f64 * omc * (-t).exp())
}

/// `dW/dt = (s/N)(W + N/2)(W - N/2) - (W + N/2)`, the mean-field equation of
/// motion, at the given `W`.
pub fn ode_rhs(w: f64, n: u64, mu: f64) -> f64 {
    ode_rhs_excited(w + 0.5 * n as f64, n, mu)
}

/// The same right-hand side written in the excited population `E = W + N/2`,
/// which avoids the cancellation in `W + N/2` once the array has decayed.
pub fn ode_rhs_excited(e: f64, n: u64, mu: f64) -> f64 {
    mu * e * (e - n as f64) - e
}

fn warn_if_large(mu_gw_n: f64) {
    if mu_gw_n.abs() > PERTURBATIVE_LIMIT {
        log::warn!(
            "|mu_GW N| = {:e} exceeds {PERTURBATIVE_LIMIT:e}; the first-order imprint is no longer dominant",
            mu_gw_n.abs()
        );
    }
}

/// GW imprint `Delta Gamma / gamma0` on an array with no Minkowski
/// cooperation (`mu_M = 0`), to first order in `h_plus`.
pub fn delta_gamma(t: f64, n: u64, eta: f64, h_plus: f64, theta0: f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("an array needs at least one atom"));
    }
    let mu_gw = eta * h_plus / n as f64;
    warn_if_large(eta * h_plus);
    Ok(mu_gw * gamma_jet(t, n, 0.0, theta0)?.d)
}

/// `Gamma(mu_M + mu_GW) - Gamma_inc`, split as the Minkowski difference plus
/// the first-order GW term taken at `mu_M`.
pub fn delta_gamma_general(t: f64, n: u64, mu_mink: f64, mu_gw: f64, theta0: f64) -> Result<f64> {
    let jet = gamma_jet(t, n, mu_mink, theta0)?;
    warn_if_large(mu_gw * n as f64);
    let base = if mu_mink == 0.0 { 0.0 } else { jet.v - gamma_inc(t, n, theta0)? };
    Ok(base + mu_gw * jet.d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmissionCurve {
    pub times: Vec<f64>,
    pub gamma: Vec<f64>,
    pub gamma_inc: Vec<f64>,
    pub delta_gamma: Vec<f64>,
}

pub const EMISSION_HEADER: [&str; 4] = ["t_gamma0", "Gamma_over_gamma0", "Gamma_inc_over_gamma0", "dGamma_over_gamma0"];

impl EmissionCurve {
    /// Curve for an array whose shape factors are already known.
    pub fn from_shape(n: u64, sf: &ShapeFactors, theta0: f64, t_max: f64, samples: usize) -> Result<Self> {
        if samples < 2 {
            return Err(invalid(format!("need at least two samples, got {samples}")));
        }
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(invalid(format!("t_max must be positive, got {t_max}")));
        }
        let mut curve = EmissionCurve {
            times: Vec::with_capacity(samples),
            gamma: Vec::with_capacity(samples),
            gamma_inc: Vec::with_capacity(samples),
            delta_gamma: Vec::with_capacity(samples),
        };
        for i in 0..samples {
            let t = t_max * i as f64 / (samples - 1) as f64;
            curve.times.push(t);
            curve.gamma.push(gamma_total(t, n, sf.mu_total, theta0)?);
            curve.gamma_inc.push(gamma_inc(t, n, theta0)?);
            curve.delta_gamma.push(delta_gamma_general(t, n, sf.mu_mink, sf.mu_gw, theta0)?);
        }
        Ok(curve)
    }

    pub fn to_table(&self) -> CsvTable {
        let rows = (0..self.times.len())
            .map(|i| {
                vec![
                    fmt_num(self.times[i]),
                    fmt_num(self.gamma[i]),
                    fmt_num(self.gamma_inc[i]),
                    fmt_num(self.delta_gamma[i]),
                ]
            })
            .collect();
        CsvTable::new(&EMISSION_HEADER, rows)
    }

    pub fn from_table(table: &CsvTable) -> Result<Self> {
        table.expect_header(&EMISSION_HEADER)?;
        Ok(EmissionCurve {
            times: table.column(EMISSION_HEADER[0])?,
            gamma: table.column(EMISSION_HEADER[1])?,
            gamma_inc: table.column(EMISSION_HEADER[2])?,
            delta_gamma: table.column(EMISSION_HEADER[3])?,
        })
    }
}

/// Uniform-grid emission curve for a configuration.
#[allow(clippy::too_many_arguments)]
pub fn sample_curve(
    geom: &ArrayGeometry,
    signal: &GwSignal,
    theta0: f64,
    t_max: f64,
    samples: usize,
    series_threshold: f64,
) -> Result<EmissionCurve> {
    let sf = ShapeFactors::compute(geom, signal, series_threshold)?;
    EmissionCurve::from_shape(geom.n_atoms(), &sf, theta0, t_max, samples)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub t: f64,
    /// Signed `Delta Gamma / gamma0` at the maximum of its magnitude.
    pub value: f64,
}

/// Maximum of `|f|` on `(0, t_max]`: coarse grid, then golden section.
pub fn peak_of(f: impl Fn(f64) -> Result<f64>, t_max: f64) -> Result<Peak> {
    let h = t_max / PEAK_COARSE_SAMPLES as f64;
    let mut best = (0usize, f64::NEG_INFINITY);
    for i in 1..=PEAK_COARSE_SAMPLES {
        let v = f(i as f64 * h)?.abs();
        if v > best.1 {
            best = (i, v);
        }
    }
    let (mut a, mut b) = ((best.0 as f64 - 1.0) * h, ((best.0 + 1) as f64 * h).min(t_max));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?.abs(), f(d)?.abs());
    while b - a > PEAK_TIME_RESOLUTION {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?.abs();
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?.abs();
        }
    }
    let mut t = 0.5 * (a + b);
    let mut value = f(t)?;
    // keep the coarse winner if refinement slid onto an endpoint plateau
    let coarse_t = best.0 as f64 * h;
    let coarse = f(coarse_t)?;
    if coarse.abs() > value.abs() {
        t = coarse_t;
        value = coarse;
    }
    Ok(Peak { t, value })
}

pub fn peak_delta_gamma(n: u64, sf: &ShapeFactors, theta0: f64, t_max: f64) -> Result<Peak> {
    peak_of(|t| delta_gamma_general(t, n, sf.mu_mink, sf.mu_gw, theta0), t_max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub n_values: Vec<u64>,
    /// Peak `|Delta Gamma| / gamma0` per `N`.
    pub peak_values: Vec<f64>,
    pub peak_times: Vec<f64>,
    /// Least-squares slope of `log peak` against `log N`; `None` with fewer
    /// than two positive peaks.
    pub fitted_exponent: Option<f64>,
    /// RMS residual of the fit in natural-log units.
    pub fit_residual: Option<f64>,
}

pub const SCALING_HEADER: [&str; 3] = ["N", "peak_dGamma_over_gamma0", "t_peak_gamma0"];

#[derive(Serialize, Deserialize)]
struct ScalingFooter {
    exponent: Option<f64>,
    fit_residual: Option<f64>,
}

impl ScalingReport {
    pub fn from_peaks(n_values: Vec<u64>, peaks: &[Peak]) -> Self {
        let peak_values: Vec<f64> = peaks.iter().map(|p| p.value.abs()).collect();
        let points: Vec<(f64, f64)> = n_values
            .iter()
            .zip(&peak_values)
            .filter(|(&n, &p)| n > 0 && p > 0.0)
            .map(|(&n, &p)| ((n as f64).ln(), p.ln()))
            .collect();
        let (fitted_exponent, fit_residual) = match fit_line(&points) {
            Some((slope, rms)) => (Some(slope), Some(rms)),
            None => (None, None),
        };
        ScalingReport {
            n_values,
            peak_values,
            peak_times: peaks.iter().map(|p| p.t).collect(),
            fitted_exponent,
            fit_residual,
        }
    }

    pub fn to_table(&self) -> CsvTable {
        let rows = (0..self.n_values.len())
            .map(|i| vec![fmt_num(self.n_values[i] as f64), fmt_num(self.peak_values[i]), fmt_num(self.peak_times[i])])
            .collect();
        let footer = ScalingFooter { exponent: self.fitted_exponent, fit_residual: self.fit_residual };
        CsvTable::new(&SCALING_HEADER, rows).with_footer(serde_json::to_string(&footer).expect("footer is plain data"))
    }

    pub fn from_table(table: &CsvTable) -> Result<Self> {
        table.expect_header(&SCALING_HEADER)?;
        let footer: ScalingFooter = match &table.footer {
            Some(f) => serde_json::from_str(f).map_err(|e| invalid(format!("bad scaling footer: {e}")))?,
            None => return Err(invalid("scaling table has no footer")),
        };
        let n_values = table.rows.iter().map(|r| parse_num(&r[0]).map(|x| x as u64)).collect::<Result<Vec<_>>>()?;
        Ok(ScalingReport {
            n_values,
            peak_values: table.column(SCALING_HEADER[1])?,
            peak_times: table.column(SCALING_HEADER[2])?,
            fitted_exponent: footer.exponent,
            fit_residual: footer.fit_residual,
        })
    }
}

/// Least-squares slope and RMS residual.
fn fit_line(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = points.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    Some((slope, (rss / n).sqrt()))
}

/// Peak imprint for each `N` and the log-log slope across them.
pub fn peak_scan(
    n_values: &[u64],
    beta: f64,
    signal: &GwSignal,
    theta0: f64,
    t_max: f64,
    series_threshold: f64,
) -> Result<ScalingReport> {
    if n_values.is_empty() {
        return Err(invalid("peak scan needs at least one N"));
    }
    let peaks = n_values
        .par_iter()
        .map(|&n| {
            let geom = ArrayGeometry::with_single(n, beta)?;
            let sf = ShapeFactors::compute(&geom, signal, series_threshold)?;
            peak_delta_gamma(n, &sf, theta0, t_max)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScalingReport::from_peaks(n_values.to_vec(), &peaks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const TH: f64 = 0.8 * PI;

    #[test]
    fn initial_and_limits() {
        let w0 = energy_w(0.0, 10, 0.05, TH).unwrap();
        assert!((w0 + 10.0 * TH.cos() / 2.0).abs() < 1e-13);
        let w = energy_w(1.3, 10, 0.0, TH).unwrap();
        let want = -5.0 + 5.0 * (1.0 - TH.cos()) * (-1.3f64).exp();
        assert!((w - want).abs() < 1e-13);
        assert!((energy_w(80.0, 10, 0.05, TH).unwrap() + 5.0).abs() < 1e-12);
    }

    #[test]
    fn pole_rejected() {
        assert!(matches!(gamma_total(0.1, 10, -0.1, TH), Err(Error::PoleInClosedForm { .. })));
        assert!(gamma_total(0.1, 10, -0.099, TH).is_ok());
        assert!(gamma_total(0.1, 10, 0.0, PI).is_err());
    }

    #[test]
    fn rates() {
        assert_eq!(gamma_total(0.7, 10, 0.3, 0.0).unwrap(), 0.0);
        assert!((gamma_inc(0.0, 10, TH).unwrap() - 9.045084971874736).abs() < 1e-12);
        assert!((gamma_inc(1.0, 1, PI / 2.0).unwrap() - 0.5 / std::f64::consts::E).abs() < 1e-16);
        let g = gamma_total(0.4, 50, 0.0, TH).unwrap();
        assert!((g - gamma_inc(0.4, 50, TH).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn jet_derivative_matches_difference_quotient() {
        let (n, mu, t) = (100, 0.02, 0.6);
        let jet = gamma_jet(t, n, mu, TH).unwrap();
        let h = 1e-6;
        let fd = (gamma_total(t, n, mu + h, TH).unwrap() - gamma_total(t, n, mu - h, TH).unwrap()) / (2.0 * h);
        assert!((jet.d - fd).abs() < 1e-6 * fd.abs());
    }

    #[test]
    fn imprint_is_linear_in_strain() {
        let a = delta_gamma(0.3, 1000, 499.5, 1e-21, TH).unwrap();
        let b = delta_gamma(0.3, 1000, 499.5, 2e-21, TH).unwrap();
        assert_eq!(b, 2.0 * a);
        assert_eq!(delta_gamma(0.3, 1000, 499.5, 0.0, TH).unwrap(), 0.0);
    }

    #[test]
    fn peak_near_third_of_lifetime() {
        let sf = ShapeFactors::from_parts(0.0, 499.5, 1e-21, 1000);
        let p = peak_delta_gamma(1000, &sf, TH, DEFAULT_T_MAX).unwrap();
        assert!(p.t > 0.2 && p.t < 0.5, "{p:?}");
        assert!(p.value > 0.0);
    }

    #[test]
    fn fit_recovers_slope() {
        let pts: Vec<(f64, f64)> = (1..5).map(|k| (k as f64, 2.0 * k as f64 + 1.0)).collect();
        let (slope, rms) = fit_line(&pts).unwrap();
        assert!((slope - 2.0).abs() < 1e-14 && rms < 1e-14);
        assert!(fit_line(&pts[..1]).is_none());
    }
}
