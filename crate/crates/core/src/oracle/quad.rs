//! Adaptive Simpson quadrature, deliberately a different rule family from the
//! Gauss-Legendre panels of the angular module.

const MAX_DEPTH: u32 = 30;
/// Relative accuracy below which integrand rounding noise dominates.
const NOISE_FLOOR: f64 = 1e-14;

/// `int_a^b f` to absolute tolerance `tol`, starting from `pieces` equal
/// subintervals so oscillatory integrands are resolved from the outset.
/// Tolerances tighter than the integrand's rounding noise are raised to it.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, pieces: usize) -> f64 {
    let pieces = pieces.max(1);
    let h = (b - a) / pieces as f64;
    let starts: Vec<[f64; 6]> = (0..pieces)
        .map(|i| {
            let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (flo, fhi, fmid) = (f(lo), f(hi), f(0.5 * (lo + hi)));
            [lo, hi, flo, fmid, fhi, (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)]
        })
        .collect();
    let magnitude: f64 =
        starts.iter().map(|s| (s[1] - s[0]) / 6.0 * (s[2].abs() + 4.0 * s[3].abs() + s[4].abs())).sum();
    let tol_piece = tol.max(NOISE_FLOOR * magnitude) / pieces as f64;
    starts
        .iter()
        .map(|&[lo, hi, flo, fmid, fhi, whole]| recurse(f, lo, hi, flo, fmid, fhi, whole, tol_piece, MAX_DEPTH))
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_smooth_and_oscillatory() {
        let s = adaptive_simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-13, 1);
        assert!((s - (1f64.exp() - 1.0)).abs() < 1e-12);
        let s = adaptive_simpson(&|x: f64| (50.0 * x).cos(), 0.0, 2.0, 1e-13, 32);
        assert!((s - (100f64).sin() / 50.0).abs() < 1e-12);
    }

    #[test]
    fn unreachable_tolerance_terminates() {
        let s = adaptive_simpson(&|x: f64| x.sin(), 0.0, 3.0, 1e-300, 4);
        assert!((s - (1.0 - 3f64.cos())).abs() < 1e-13);
    }
}
