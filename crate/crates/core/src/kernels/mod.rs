//! Pair kernels: the Minkowski `sinc`, the auxiliary `f~` and the GW kernel
//! `g(x, w) = (1+w)^2 f~((1+w)x) - (1-w)^2 f~((1-w)x)` with its odd series in `w`.
//!
//! Every function takes a [`Phase`] so that lattice callers can hand over an
//! exactly reduced argument; plain `f64` converts via `Into`.

mod phase;

pub use phase::{rational_approximation, reduced_phase, sin_cos_turns, Phase, PhaseReducer, ReductionMethod};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::check_omega_bar;

/// Below this `omega_bar` the dispatcher switches from the exact difference
/// to the series.
pub const DEFAULT_SERIES_THRESHOLD: f64 = 1e-4;

/// Below this `|x|` the trigonometric closed forms of `f~` and `f~'` lose
/// digits to cancellation and the Taylor series takes over.
const SMALL_X: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelMethod {
    ExactDifference,
    Series,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEval {
    pub value: f64,
    pub method: KernelMethod,
    /// Bound on `|value - true value|`.
    pub est_error: f64,
}

/// `sin x / x`, equal to 1 at the origin.
pub fn f_mink(x: impl Into<Phase>) -> f64 {
    let x = x.into();
    if x.value() == 0.0 {
        1.0
    } else {
        x.sin() / x.value()
    }
}

/// `(4 - 4 cos x - 2 x sin x) / x^2`.
pub fn f_tilde(x: impl Into<Phase>) -> f64 {
    let x = x.into();
    let v = x.value();
    if v.abs() < SMALL_X {
        // sum_{n>=2} (-1)^n 4(n-1) x^(2n-2) / (2n)!
        let v2 = v * v;
        let mut term = v2 / 24.0; // x^2 / 4!
        let mut sum = 0.0;
        let mut n = 2u32;
        loop {
            let contrib = 4.0 * (n - 1) as f64 * term;
            sum += contrib;
            if contrib.abs() <= f64::EPSILON * 1e-2 * sum.abs() {
                break sum;
            }
            term *= -v2 / ((2 * n + 1) * (2 * n + 2)) as f64;
            n += 1;
        }
    } else {
        (4.0 - 4.0 * x.cos() - 2.0 * v * x.sin()) / (v * v)
    }
}

/// First series coefficient `4 cos x - 4 sin x / x`.
pub fn f_tilde_1(x: impl Into<Phase>) -> f64 {
    let x = x.into();
    let v = x.value();
    if v.abs() < SMALL_X {
        // 4 sum_{n>=1} (-1)^n 2n x^(2n) / (2n+1)!
        let v2 = v * v;
        let mut term = -v2 / 6.0; // -x^2 / 3!
        let mut sum = 0.0;
        let mut n = 1u32;
        loop {
            let contrib = 8.0 * n as f64 * term;
            sum += contrib;
            if contrib.abs() <= f64::EPSILON * 1e-2 * sum.abs() || v == 0.0 {
                break sum;
            }
            term *= -v2 / ((2 * n + 2) * (2 * n + 3)) as f64;
            n += 1;
        }
    } else {
        4.0 * x.cos() - 4.0 * x.sin() / v
    }
}

/// The even coefficient, identically zero.
pub fn f_tilde_2(_x: impl Into<Phase>) -> f64 {
    0.0
}

/// Third series coefficient `-(2/3) x (sin x + x cos x)`.
pub fn f_tilde_3(x: impl Into<Phase>) -> f64 {
    let x = x.into();
    let v = x.value();
    -(2.0 / 3.0) * v * (x.sin() + v * x.cos())
}

/// Exact branch difference from the two shifted phases `(1 +- w) x`.
fn gw_from_branches(plus: Phase, minus: Phase, omega_bar: f64) -> KernelEval {
    let a = (1.0 + omega_bar).powi(2) * f_tilde(plus);
    let b = (1.0 - omega_bar).powi(2) * f_tilde(minus);
    KernelEval {
        value: a - b,
        method: KernelMethod::ExactDifference,
        est_error: 16.0 * f64::EPSILON * (a.abs() + b.abs()),
    }
}

/// `g(x, w)` by direct subtraction. The result is correct but carries only
/// about `16 - log10(1/w)` significant digits; use [`GwKernel`] for a checked
/// dispatch.
pub fn f_gw_exact(x: impl Into<Phase>, omega_bar: f64) -> KernelEval {
    let x = x.into().abs();
    gw_from_branches(x.scaled(omega_bar), x.scaled(-omega_bar), omega_bar)
}

/// Truncation order of the odd series in `omega_bar`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SeriesOrder {
    First,
    #[default]
    Third,
}

/// `-(w f~'(x) + w^3 f~'''(x))`, the Taylor expansion of `g` in `w`.
///
/// The minus sign follows from differentiating the branch difference: with
/// `G(a) = a^2 f~(a x)`, `g = G(1+w) - G(1-w)` and `G'(1) = -f~'`.
pub fn f_gw_series(x: impl Into<Phase>, omega_bar: f64) -> KernelEval {
    f_gw_series_order(x, omega_bar, SeriesOrder::Third)
}

pub fn f_gw_series_order(x: impl Into<Phase>, omega_bar: f64, order: SeriesOrder) -> KernelEval {
    let x = x.into().abs();
    let v = x.value();
    let w = omega_bar;
    let first = w * f_tilde_1(x);
    // Lagrange remainder of the odd part, bounded with |sin|, |cos| <= 1
    let (value, est_error) = match order {
        SeriesOrder::First => {
            let g3 = 2.0 * v + 2.0 * (1.0 + w) * v * v;
            (-first, 2.0 * w.powi(3) / 6.0 * g3)
        }
        SeriesOrder::Third => {
            let g5 = 6.0 * v.powi(3) + 2.0 * (1.0 + w) * v.powi(4);
            (-(first + w.powi(3) * f_tilde_3(x)), 2.0 * w.powi(5) / 120.0 * g5)
        }
    };
    KernelEval { value, method: KernelMethod::Series, est_error: est_error + 4.0 * f64::EPSILON * value.abs() }
}

/// Crossover-aware GW kernel: series below `series_threshold`, exact
/// difference at and above it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GwKernel {
    omega_bar: f64,
    series_threshold: f64,
}

impl GwKernel {
    pub fn new(omega_bar: f64, series_threshold: f64) -> Result<Self> {
        check_omega_bar(omega_bar)?;
        if !(series_threshold > 0.0) {
            return Err(crate::error::invalid(format!("series threshold must be positive, got {series_threshold}")));
        }
        Ok(GwKernel { omega_bar, series_threshold })
    }

    pub fn with_default_threshold(omega_bar: f64) -> Result<Self> {
        Self::new(omega_bar, DEFAULT_SERIES_THRESHOLD)
    }

    pub fn omega_bar(&self) -> f64 {
        self.omega_bar
    }

    pub fn method(&self) -> KernelMethod {
        if self.omega_bar < self.series_threshold {
            KernelMethod::Series
        } else {
            KernelMethod::ExactDifference
        }
    }

    pub fn eval(&self, x: impl Into<Phase>) -> KernelEval {
        match self.method() {
            KernelMethod::Series => f_gw_series(x, self.omega_bar),
            KernelMethod::ExactDifference => f_gw_exact(x, self.omega_bar),
        }
    }

    /// Kernel at lattice separation `m`, with both shifted phases reduced
    /// from the integer separation rather than from a rounded `x_m`.
    #[inline]
    pub fn eval_lattice(&self, reducer: &PhaseReducer, m: u64) -> KernelEval {
        match self.method() {
            KernelMethod::Series => f_gw_series(reducer.phase(m), self.omega_bar),
            KernelMethod::ExactDifference => {
                gw_from_branches(reducer.scaled(m, self.omega_bar), reducer.scaled(m, -self.omega_bar), self.omega_bar)
            }
        }
    }

    /// Value of [`GwKernel::eval_lattice`] without the error estimate.
    #[inline]
    pub fn value_lattice(&self, reducer: &PhaseReducer, m: u64) -> f64 {
        match self.method() {
            KernelMethod::Series => {
                let x = reducer.phase(m);
                let w = self.omega_bar;
                -(w * f_tilde_1(x) + w.powi(3) * f_tilde_3(x))
            }
            KernelMethod::ExactDifference => self.eval_lattice(reducer, m).value,
        }
    }

    /// Exact difference forced regardless of the threshold; fails when the
    /// cancellation would exceed the configured budget.
    pub fn exact_checked(&self, x: impl Into<Phase>) -> Result<KernelEval> {
        if self.omega_bar < self.series_threshold {
            return Err(Error::PrecisionLoss { omega_bar: self.omega_bar, threshold: self.series_threshold });
        }
        Ok(f_gw_exact(x, self.omega_bar))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn mink_values() {
        assert_eq!(f_mink(0.0), 1.0);
        assert!(close(f_mink(PI / 2.0), 2.0 / PI, 1e-15));
        let r = PhaseReducer::new(1.0);
        for m in [1, 2, 1000, 1_000_000_007] {
            assert_eq!(f_mink(r.phase(m)), 0.0);
        }
    }

    #[test]
    fn tilde_values() {
        assert_eq!(f_tilde(0.0), 0.0);
        assert_eq!(f_tilde(PhaseReducer::new(1.0).phase(1)), 0.0);
        assert!(close(f_tilde(PI), 8.0 / (PI * PI), 1e-14));
        assert!(close(f_tilde(1e-4), 1e-8 / 6.0 - 1e-16 / 90.0, 1e-15));
    }

    #[test]
    fn tilde_branches_meet_at_switch() {
        for x in [0.999_999_999, 1.0, 1.000_000_001] {
            let p = Phase::new(x);
            let direct = (4.0 - 4.0 * p.cos() - 2.0 * x * p.sin()) / (x * x);
            assert!(close(f_tilde(x), direct, 1e-12));
            let d1 = 4.0 * p.cos() - 4.0 * p.sin() / x;
            assert!(close(f_tilde_1(x), d1, 1e-12));
        }
    }

    #[test]
    fn series_coefficients() {
        let two_pi = PhaseReducer::new(1.0).phase(1);
        assert_eq!(f_tilde_1(two_pi), 4.0);
        assert!(close(f_tilde_3(two_pi), -8.0 * PI * PI / 3.0, 1e-15));
        let s = f_gw_series(two_pi, 0.1);
        assert!(close(s.value, -(0.4 - 1e-3 * 8.0 * PI * PI / 3.0), 1e-14));
        let pi = PhaseReducer::new(0.5).phase(1);
        assert_eq!(f_tilde_1(pi), -4.0);
        assert!(close(f_tilde_3(pi), 2.0 * PI * PI / 3.0, 1e-15));
    }

    #[test]
    fn exact_and_series_agree() {
        let e = f_gw_exact(2.0 * PI, 0.1).value;
        let s = f_gw_series(2.0 * PI, 0.1).value;
        assert!(close(s, e, 1e-2), "{s} vs {e}");
        for x in [1.0, 2.0 * PI, 50.0] {
            let e = f_gw_exact(x, 1e-3).value;
            let s = f_gw_series(x, 1e-3).value;
            assert!(close(s, e, 1e-5), "x={x}: {s} vs {e}");
        }
    }

    #[test]
    fn series_error_bound_holds() {
        for x in [0.5, 3.0, 20.0, 200.0] {
            for w in [1e-1, 1e-2, 1e-3] {
                let e = f_gw_exact(x, w);
                let s = f_gw_series(x, w);
                assert!((e.value - s.value).abs() <= s.est_error + e.est_error, "x={x} w={w}");
            }
        }
    }

    #[test]
    fn dispatch() {
        let k = GwKernel::with_default_threshold(1e-8).unwrap();
        assert_eq!(k.method(), KernelMethod::Series);
        assert!(matches!(k.exact_checked(1.0), Err(Error::PrecisionLoss { .. })));
        let k = GwKernel::with_default_threshold(1e-2).unwrap();
        assert_eq!(k.eval(3.0).method, KernelMethod::ExactDifference);
        assert!(GwKernel::with_default_threshold(1.0).is_err());
    }

    #[test]
    fn lattice_exact_matches_closed_form_at_integer_spacing() {
        // at beta = 1, g(2 pi j) = -4 sin(2 pi w j) / (2 pi j)
        let w = 1e-2;
        let k = GwKernel::with_default_threshold(w).unwrap();
        let r = PhaseReducer::new(1.0);
        for j in [1u64, 7, 49, 51, 10_000] {
            let got = k.eval_lattice(&r, j).value;
            let jf = j as f64;
            let want = -4.0 * (2.0 * PI * w * jf).sin() / (2.0 * PI * jf);
            assert!((got - want).abs() < 1e-12 * (1.0 + want.abs()), "j={j}: {got} vs {want}");
        }
    }

    #[test]
    fn value_path_matches_full_evaluation() {
        for w in [1e-12, 1e-6, 1e-2] {
            let k = GwKernel::with_default_threshold(w).unwrap();
            for beta in [1.0, 0.25, 0.3711] {
                let r = PhaseReducer::new(beta);
                for m in [1u64, 2, 17, 123_456] {
                    assert_eq!(k.value_lattice(&r, m), k.eval_lattice(&r, m).value);
                }
            }
        }
    }
}
