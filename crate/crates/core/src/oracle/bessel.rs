//! Bessel functions of the first kind, orders 0 to 2, built from scratch:
//! power series near the origin, Miller's backward recurrence at moderate
//! argument and the Hankel asymptotic expansion far out.

use std::f64::consts::PI;

use crate::error::{invalid, Result};

const SERIES_LIMIT: f64 = 8.0;
const ASYMPTOTIC_LIMIT: f64 = 25.0;

/// `J_order(x)` for `order` in `{0, 1, 2}` and `x >= 0`.
pub fn bessel_j(order: u32, x: f64) -> Result<f64> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(invalid(format!("Bessel argument must be finite and nonnegative, got {x}")));
    }
    match order {
        0 => Ok(j0(x)),
        1 => Ok(j1(x)),
        2 => Ok(j2(x)),
        _ => Err(invalid(format!("only orders 0, 1 and 2 are implemented, got {order}"))),
    }
}

pub fn j0(x: f64) -> f64 {
    if x < SERIES_LIMIT {
        series(0, x)
    } else if x < ASYMPTOTIC_LIMIT {
        miller(x).0
    } else {
        hankel(0, x)
    }
}

pub fn j1(x: f64) -> f64 {
    if x < SERIES_LIMIT {
        series(1, x)
    } else if x < ASYMPTOTIC_LIMIT {
        miller(x).1
    } else {
        hankel(1, x)
    }
}

pub fn j2(x: f64) -> f64 {
    if x < SERIES_LIMIT {
        series(2, x)
    } else if x < ASYMPTOTIC_LIMIT {
        miller(x).2
    } else {
        2.0 * j1(x) / x - j0(x)
    }
}

/// `sum_k (-1)^k (x/2)^(2k+n) / (k! (k+n)!)`.
fn series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = (1..=n).fold(1.0, |acc, k| acc * half / k as f64);
    let mut sum = term;
    let q = -half * half;
    for k in 1..200 {
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// `(J0, J1, J2)` by downward recurrence normalised with
/// `J0 + 2 sum_k J_{2k} = 1`.
fn miller(x: f64) -> (f64, f64, f64) {
    let start = 2 * ((x as usize + 40) / 2);
    let (mut above, mut cur) = (0.0f64, 1e-300f64);
    let mut norm = 0.0;
    let mut vals = [0.0; 3];
    for k in (1..=start).rev() {
        let below = 2.0 * k as f64 / x * cur - above;
        above = cur;
        cur = below;
        let order = k - 1;
        if order <= 2 {
            vals[order] = cur;
        }
        if order % 2 == 0 && order > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            above *= 1e-250;
            cur *= 1e-250;
            norm *= 1e-250;
            vals.iter_mut().for_each(|v| *v *= 1e-250);
        }
    }
    norm += vals[0];
    (vals[0] / norm, vals[1] / norm, vals[2] / norm)
}

/// `sqrt(2/(pi x)) (P cos chi - Q sin chi)`, `chi = x - n pi/2 - pi/4`.
fn hankel(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n * n) as f64;
    let z = 8.0 * x;
    let (mut p, mut q) = (1.0, 0.0);
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * z);
        if term.abs() > prev {
            break;
        }
        prev = term.abs();
        // terms alternate P, Q, P, Q with sign pattern +Q, -P, -Q, +P
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (n as f64 * 0.5 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin() {
        assert_eq!(j0(0.0), 1.0);
        assert_eq!(j2(0.0), 0.0);
        assert!(bessel_j(3, 1.0).is_err());
        assert!(bessel_j(0, -1.0).is_err());
    }

    #[test]
    fn reference_values() {
        // tabulated values (Abramowitz & Stegun, 15 digits)
        let cases = [
            (0, 1.0, 0.765197686557966),
            (1, 1.0, 0.440050585744934),
            (2, 1.0, 0.114903484931901),
            (0, 10.0, -0.245935764451348),
            (1, 10.0, 0.043472746168862),
            (2, 10.0, 0.254630313685121),
            (0, 30.0, -0.086367983581040),
            (2, 30.0, 0.078451246073265),
        ];
        for (n, x, want) in cases {
            let got = bessel_j(n, x).unwrap();
            assert!((got - want).abs() < 1e-13, "J{n}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn regimes_agree_at_boundaries() {
        for x in [SERIES_LIMIT, ASYMPTOTIC_LIMIT] {
            let m = miller(x);
            assert!((series(0, x) - m.0).abs() < 1e-12 || x > 10.0);
            if x >= ASYMPTOTIC_LIMIT {
                assert!((hankel(0, x) - m.0).abs() < 1e-13);
                assert!((hankel(1, x) - m.1).abs() < 1e-13);
            } else {
                assert!((series(2, x) - m.2).abs() < 1e-12);
            }
        }
    }
}
