//! Shape factors `mu_M`, `mu_GW` and the GW cooperation number `eta`.
//!
//! On an evenly spaced line the double sum over ordered pairs depends only on
//! the separation, so `sum_{i != j} K(|i - j|) = 2 sum_{m=1}^{N-1} (N - m) K(m)`
//! and every shape factor is an O(N) sum.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{check_omega_bar, ArrayGeometry, GwSignal};
use crate::io::{fmt_num, parse_num, CsvTable};
use crate::kernels::{f_gw_series, f_mink, GwKernel, PhaseReducer};
use crate::summation::chunked_sum;

/// `sum_{i != j} K(|i - j|)` via the Toeplitz reduction.
pub fn pair_sum<K>(geom: &ArrayGeometry, kernel: K) -> f64
where
    K: Fn(u64) -> f64 + Sync,
{
    let n = geom.n_atoms();
    2.0 * chunked_sum(1, n, |m| (n - m) as f64 * kernel(m))
}

/// `mu_M = (1/N^2) sum_{i != j} sinc(x_ij)`.
pub fn mu_mink(geom: &ArrayGeometry) -> f64 {
    let reducer = geom.reducer();
    let n = geom.n_atoms() as f64;
    pair_sum(geom, |m| f_mink(reducer.phase(m))) / (n * n)
}

/// `eta = -(1 / (8 w N)) sum_{i != j} g(x_ij, w)` with the crossover-aware kernel.
pub fn eta(geom: &ArrayGeometry, kernel: &GwKernel) -> f64 {
    let reducer = geom.reducer();
    let w = kernel.omega_bar();
    let n = geom.n_atoms() as f64;
    -pair_sum(geom, |m| kernel.value_lattice(&reducer, m)) / (8.0 * w * n)
}

/// Upper bound on the kernel error propagated into [`eta`].
pub fn eta_error_bound(geom: &ArrayGeometry, kernel: &GwKernel) -> f64 {
    let reducer = geom.reducer();
    let w = kernel.omega_bar();
    let n = geom.n_atoms() as f64;
    pair_sum(geom, |m| kernel.eval_lattice(&reducer, m).est_error) / (8.0 * w * n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeFactors {
    pub mu_mink: f64,
    pub mu_gw: f64,
    /// `mu_GW N / h_plus`; independent of the strain.
    pub eta: f64,
    pub mu_total: f64,
}

impl ShapeFactors {
    pub fn compute(geom: &ArrayGeometry, signal: &GwSignal, series_threshold: f64) -> Result<Self> {
        let kernel = GwKernel::new(signal.omega_bar(), series_threshold)?;
        let mu_mink = mu_mink(geom);
        let eta = eta(geom, &kernel);
        Ok(Self::from_parts(mu_mink, eta, signal.h_plus(), geom.n_atoms()))
    }

    pub fn from_parts(mu_mink: f64, eta: f64, h_plus: f64, n_atoms: u64) -> Self {
        let mu_gw = eta * h_plus / n_atoms as f64;
        ShapeFactors { mu_mink, mu_gw, eta, mu_total: mu_mink + mu_gw }
    }
}

/// How [`eta_max`] locates the cooperation cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EtaMaxMethod {
    /// First separation where `-g(x_j)` changes sign relative to `j = 1`.
    #[default]
    Scan,
    /// Root of the two-term series envelope, refined locally.
    Envelope,
    /// Separation maximising the running sum of `-g(x_j)`.
    CumulativeMax,
}

impl std::str::FromStr for EtaMaxMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scan" => Ok(EtaMaxMethod::Scan),
            "envelope" => Ok(EtaMaxMethod::Envelope),
            "cumulative-max" | "cumulative" => Ok(EtaMaxMethod::CumulativeMax),
            other => Err(crate::error::invalid(format!(
                "unknown eta-max method {other:?} (expected scan, envelope or cumulative-max)"
            ))),
        }
    }
}

/// Separations scanned one by one before the scan switches to geometric strides.
pub const LINEAR_SCAN_LIMIT: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaMaxOptions {
    pub method: EtaMaxMethod,
    /// Largest separation the scan methods may visit.
    pub ceiling: u64,
    pub series_threshold: f64,
}

impl Default for EtaMaxOptions {
    fn default() -> Self {
        EtaMaxOptions {
            method: EtaMaxMethod::Scan,
            ceiling: 10_000_000_000_000,
            series_threshold: crate::kernels::DEFAULT_SERIES_THRESHOLD,
        }
    }
}

/// Root of `|f~'| = w^2 |f~'''|` using the large-`x` envelopes `4` and `(2/3) x^2`.
pub fn envelope_root(beta: f64, omega_bar: f64) -> f64 {
    6f64.sqrt() / (2.0 * std::f64::consts::PI * beta * omega_bar)
}

pub fn eta_max(beta: f64, omega_bar: f64, method: EtaMaxMethod) -> Result<u64> {
    eta_max_with(beta, omega_bar, &EtaMaxOptions { method, ..Default::default() })
}

pub fn eta_max_with(beta: f64, omega_bar: f64, opts: &EtaMaxOptions) -> Result<u64> {
    check_omega_bar(omega_bar)?;
    ArrayGeometry::new(2, beta)?;
    let reducer = PhaseReducer::new(beta);
    match opts.method {
        EtaMaxMethod::Scan => {
            let kernel = GwKernel::new(omega_bar, opts.series_threshold)?;
            scan_flip(|j| kernel.eval_lattice(&reducer, j).value, opts.ceiling)
        }
        EtaMaxMethod::Envelope => Ok(envelope_refined(&reducer, beta, omega_bar)),
        EtaMaxMethod::CumulativeMax => {
            let kernel = GwKernel::new(omega_bar, opts.series_threshold)?;
            cumulative_max(|j| -kernel.eval_lattice(&reducer, j).value, beta, omega_bar, opts.ceiling)
        }
    }
}

fn scan_flip(g: impl Fn(u64) -> f64, ceiling: u64) -> Result<u64> {
    let v1 = g(1);
    let flipped = |j: u64| g(j) * v1 <= 0.0;
    let linear_end = ceiling.min(LINEAR_SCAN_LIMIT);
    if let Some(j) = (2..=linear_end).find(|&j| flipped(j)) {
        return Ok(j);
    }
    // geometric bracketing past the linear window, then bisection; assumes
    // the sign is constant before the first flip, as for integer spacing
    let mut lo = linear_end;
    while lo < ceiling {
        let hi = lo.saturating_mul(2).min(ceiling);
        if flipped(hi) {
            return Ok(bisect(lo, hi, flipped));
        }
        lo = hi;
    }
    Err(Error::ScanBudgetExceeded { ceiling })
}

/// Smallest `j` in `(lo, hi]` with `pred(j)`, given `!pred(lo)` and `pred(hi)`.
fn bisect(mut lo: u64, mut hi: u64, pred: impl Fn(u64) -> bool) -> u64 {
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn envelope_refined(reducer: &PhaseReducer, beta: f64, omega_bar: f64) -> u64 {
    let root = envelope_root(beta, omega_bar);
    let guess = root.ceil().max(1.0) as u64;
    let g = |j: u64| f_gw_series(reducer.phase(j), omega_bar).value;
    let v1 = g(1);
    let flipped = |j: u64| g(j) * v1 <= 0.0;
    let lo = (guess / 2).max(1);
    let hi = guess.saturating_mul(2);
    if flipped(lo) || !flipped(hi) {
        return guess;
    }
    // bisection can land on a later crossing when the sign oscillates;
    // step back while the previous separation is also flipped
    let mut j = bisect(lo, hi, flipped);
    let mut steps = 0;
    while j > lo + 1 && flipped(j - 1) && steps < 64 {
        j -= 1;
        steps += 1;
    }
    j
}

fn cumulative_max(term: impl Fn(u64) -> f64, beta: f64, omega_bar: f64, ceiling: u64) -> Result<u64> {
    let horizon = (4.0 * envelope_root(beta, omega_bar)).ceil().max(2.0);
    let end = (horizon as u64).min(ceiling);
    if end > LINEAR_SCAN_LIMIT {
        return Err(Error::ScanBudgetExceeded { ceiling: LINEAR_SCAN_LIMIT });
    }
    let (mut best, mut best_j, mut running) = (f64::NEG_INFINITY, 1, 0.0);
    for j in 1..=end {
        running += term(j);
        if running > best {
            best = running;
            best_j = j;
        }
    }
    Ok(best_j)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub n: u64,
    pub beta: f64,
    pub mu_m_n: f64,
    pub eta: f64,
}

/// Rectangular `(N, beta)` grid, row-major with `N` as the row index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub n_values: Vec<u64>,
    pub beta_values: Vec<f64>,
    pub cells: Vec<SweepCell>,
}

pub const SWEEP_HEADER: [&str; 4] = ["N", "beta", "muM_N", "eta"];

impl SweepGrid {
    pub fn cell(&self, row: usize, col: usize) -> &SweepCell {
        &self.cells[row * self.beta_values.len() + col]
    }

    pub fn to_table(&self) -> CsvTable {
        let rows = self
            .cells
            .iter()
            .map(|c| vec![fmt_num(c.n as f64), fmt_num(c.beta), fmt_num(c.mu_m_n), fmt_num(c.eta)])
            .collect();
        CsvTable::new(&SWEEP_HEADER, rows)
    }

    pub fn from_table(table: &CsvTable) -> Result<Self> {
        table.expect_header(&SWEEP_HEADER)?;
        let mut cells = Vec::with_capacity(table.rows.len());
        for row in &table.rows {
            cells.push(SweepCell {
                n: parse_num(&row[0])? as u64,
                beta: parse_num(&row[1])?,
                mu_m_n: parse_num(&row[2])?,
                eta: parse_num(&row[3])?,
            });
        }
        let mut n_values: Vec<u64> = Vec::new();
        let mut beta_values: Vec<f64> = Vec::new();
        for c in &cells {
            if n_values.last() != Some(&c.n) {
                n_values.push(c.n);
            }
            if n_values.len() == 1 {
                beta_values.push(c.beta);
            }
        }
        if n_values.len() * beta_values.len() != cells.len() {
            return Err(crate::error::invalid("sweep table is not rectangular"));
        }
        Ok(SweepGrid { n_values, beta_values, cells })
    }
}

/// `(mu_M N, eta)` over every `(N, beta)` pair.
pub fn sweep(n_values: &[u64], beta_values: &[f64], omega_bar: f64, series_threshold: f64) -> Result<SweepGrid> {
    if n_values.is_empty() || beta_values.is_empty() {
        return Err(crate::error::invalid("sweep needs at least one N and one beta"));
    }
    let kernel = GwKernel::new(omega_bar, series_threshold)?;
    let mut coords = Vec::with_capacity(n_values.len() * beta_values.len());
    for &n in n_values {
        for &beta in beta_values {
            coords.push(ArrayGeometry::with_single(n, beta)?);
        }
    }
    let cells = coords
        .par_iter()
        .map(|g| SweepCell {
            n: g.n_atoms(),
            beta: g.beta(),
            mu_m_n: mu_mink(g) * g.n_atoms() as f64,
            eta: eta(g, &kernel),
        })
        .collect();
    Ok(SweepGrid { n_values: n_values.to_vec(), beta_values: beta_values.to_vec(), cells })
}

/// Spacing where `mu_M N` first falls below `level` when `beta` increases
/// from zero, located on a 0.001 grid and refined by bisection.
pub fn superradiance_boundary(n_atoms: u64, level: f64) -> Result<f64> {
    let value = |beta: f64| -> Result<f64> {
        let g = ArrayGeometry::new(n_atoms, beta)?;
        Ok(mu_mink(&g) * n_atoms as f64)
    };
    let step = 1e-3;
    let mut prev = step;
    if value(prev)? < level {
        return Err(crate::error::invalid(format!("mu_M N is below {level} already at beta = {step}")));
    }
    for k in 2..=2000 {
        let beta = k as f64 * step;
        if value(beta)? < level {
            let (mut lo, mut hi) = (prev, beta);
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                if value(mid)? < level {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(hi);
        }
        prev = beta;
    }
    Err(crate::error::invalid(format!("mu_M N stays above {level} for beta <= 2")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_sum_small_cases() {
        let g = ArrayGeometry::new(2, 1.0).unwrap();
        assert_eq!(pair_sum(&g, |_| 1.0), 2.0);
        let g = ArrayGeometry::new(5, 1.0).unwrap();
        assert_eq!(pair_sum(&g, |m| m as f64), 40.0);
    }

    #[test]
    fn integer_spacing_nulls_minkowski() {
        for n in [2, 10, 1000] {
            assert_eq!(mu_mink(&ArrayGeometry::new(n, 1.0).unwrap()), 0.0);
            assert_eq!(mu_mink(&ArrayGeometry::new(n, 3.0).unwrap()), 0.0);
        }
        assert_eq!(mu_mink(&ArrayGeometry::new(2, 0.5).unwrap()), 0.0);
    }

    #[test]
    fn eta_small_omega_is_half_pairs() {
        // g = -4w at integer spacing far below the flip, so eta = (N-1)/2
        let g = ArrayGeometry::new(1000, 1.0).unwrap();
        let k = GwKernel::with_default_threshold(1e-12).unwrap();
        let e = eta(&g, &k);
        assert!((e - 499.5).abs() < 1e-6, "{e}");
    }

    #[test]
    fn envelope_orders() {
        assert_eq!(eta_max(1.0, 1e-2, EtaMaxMethod::Envelope).unwrap(), 39);
        let j8 = eta_max(1.0, 1e-8, EtaMaxMethod::Envelope).unwrap();
        assert!((3.8e7..4.0e7).contains(&(j8 as f64)), "{j8}");
    }

    #[test]
    fn scan_at_desk_scale_finds_exact_flip() {
        // exact kernel at integer spacing flips where sin(2 pi w j) does
        // (j = 50 is an exact zero, so rounding decides between 50 and 51)
        let j = eta_max(1.0, 1e-2, EtaMaxMethod::Scan).unwrap();
        assert!((50..=51).contains(&j), "{j}");
    }

    #[test]
    fn scan_budget() {
        let opts = EtaMaxOptions { ceiling: 1000, ..Default::default() };
        assert!(matches!(eta_max_with(1.0, 1e-8, &opts), Err(Error::ScanBudgetExceeded { ceiling: 1000 })));
    }

    #[test]
    fn cumulative_max_sits_before_flip() {
        let j = eta_max(1.0, 1e-2, EtaMaxMethod::CumulativeMax).unwrap();
        assert!((49..=50).contains(&j), "{j}");
    }

    #[test]
    fn method_names() {
        assert_eq!("envelope".parse::<EtaMaxMethod>().unwrap(), EtaMaxMethod::Envelope);
        assert!("argmax".parse::<EtaMaxMethod>().is_err());
    }
}
