//! 256-bit (about 77 decimal digits) reference evaluations. Arbitrary
//! precision arithmetic comes from `astro-float`; the formulas are transcribed
//! independently of the double-precision code paths.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};

use crate::error::{Error, Result};

/// Working precision in bits.
pub const PRECISION_BITS: usize = 256;
/// Largest array for which the high-precision pair sum is attempted.
pub const HIGHPREC_PAIR_LIMIT: u64 = 200;

const RM: RoundingMode = RoundingMode::ToEven;
const P: usize = PRECISION_BITS;

/// Thin arithmetic context around a constants cache.
struct Hp {
    cc: Consts,
}

impl Hp {
    fn new() -> Self {
        Hp { cc: Consts::new().expect("allocating the constants cache") }
    }

    fn num(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, P)
    }

    fn int(&self, x: u64) -> BigFloat {
        BigFloat::from_u64(x, P)
    }

    fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, P, RM)
    }

    fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, P, RM)
    }

    fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, P, RM)
    }

    fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, P, RM)
    }

    fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(P, RM, &mut self.cc)
    }

    fn sin(&mut self, a: &BigFloat) -> BigFloat {
        a.sin(P, RM, &mut self.cc)
    }

    fn cos(&mut self, a: &BigFloat) -> BigFloat {
        a.cos(P, RM, &mut self.cc)
    }

    fn pi(&mut self) -> BigFloat {
        self.cc.pi(P, RM)
    }

    /// Nearest `f64`, through a decimal string with more digits than needed.
    fn nearest_f64(&mut self, a: &BigFloat) -> f64 {
        if a.is_zero() {
            return 0.0;
        }
        let text = a.format(Radix::Dec, RM, &mut self.cc).expect("formatting a finite value");
        text.parse::<f64>().unwrap_or_else(|_| panic!("unparseable high-precision value {text}"))
    }
}

/// `Gamma(t; mu) / gamma0` in extended precision.
fn gamma_hp(hp: &mut Hp, t: f64, n: u64, mu: f64, theta0: f64) -> BigFloat {
    let one = hp.num(1.0);
    let two = hp.num(2.0);
    let nb = hp.int(n);
    let c = hp.cos(&hp.num(theta0));
    let omc = hp.sub(&one, &c);
    let opc = hp.add(&one, &c);
    let s = hp.mul(&hp.num(mu), &nb);
    let k = hp.add(&s, &one);
    let e = hp.exp(&hp.mul(&hp.num(-t), &k));
    let a = hp.add(&hp.mul(&opc, &s), &two);
    let d = hp.add(&a, &hp.mul(&hp.mul(&omc, &s), &e));
    let num = hp.mul(&hp.mul(&hp.mul(&nb, &omc), &hp.mul(&k, &k)), &hp.mul(&a, &e));
    hp.div(&num, &hp.mul(&d, &d))
}

/// `Gamma(mu) - Gamma(0)` computed entirely in 256-bit arithmetic and
/// rounded once at the end.
pub fn highprec_delta_gamma(t: f64, n: u64, mu: f64, theta0: f64) -> Result<f64> {
    if !(mu * n as f64 > -1.0) {
        return Err(Error::PoleInClosedForm { mu_n: mu * n as f64 });
    }
    if mu == 0.0 {
        return Ok(0.0);
    }
    let mut hp = Hp::new();
    let with = gamma_hp(&mut hp, t, n, mu, theta0);
    let without = gamma_hp(&mut hp, t, n, 0.0, theta0);
    let diff = hp.sub(&with, &without);
    Ok(hp.nearest_f64(&diff))
}

/// `a^2 f~(a x)` with `x = 2 pi beta m`.
fn branch_hp(hp: &mut Hp, x: &BigFloat, a: &BigFloat) -> BigFloat {
    let ax = hp.mul(a, x);
    let four = hp.num(4.0);
    let (s, c) = (hp.sin(&ax), hp.cos(&ax));
    let top = hp.sub(&hp.sub(&four, &hp.mul(&four, &c)), &hp.mul(&hp.mul(&hp.num(2.0), &ax), &s));
    hp.div(&top, &hp.mul(x, x))
}

fn lattice_phase_hp(hp: &mut Hp, m: u64, beta: f64) -> BigFloat {
    let pi = hp.pi();
    let two_pi = hp.mul(&hp.num(2.0), &pi);
    hp.mul(&hp.mul(&two_pi, &hp.num(beta)), &hp.int(m))
}

fn gw_kernel_hp(hp: &mut Hp, m: u64, beta: f64, omega_bar: f64) -> BigFloat {
    if m == 0 {
        return hp.num(0.0);
    }
    let x = lattice_phase_hp(hp, m, beta);
    let w = hp.num(omega_bar);
    let one = hp.num(1.0);
    let plus = branch_hp(hp, &x, &hp.add(&one, &w));
    let minus = branch_hp(hp, &x, &hp.sub(&one, &w));
    hp.sub(&plus, &minus)
}

/// `g(2 pi beta m, w)` evaluated as the exact branch difference at 256 bits.
pub fn highprec_gw_kernel(m: u64, beta: f64, omega_bar: f64) -> f64 {
    let mut hp = Hp::new();
    let g = gw_kernel_hp(&mut hp, m, beta, omega_bar);
    hp.nearest_f64(&g)
}

/// `f~(x)` at 256 bits.
pub fn highprec_f_tilde(x: f64) -> f64 {
    let mut hp = Hp::new();
    let xb = hp.num(x);
    let one = hp.num(1.0);
    let v = branch_hp(&mut hp, &xb, &one);
    hp.nearest_f64(&v)
}

/// `eta` from the explicit double sum over ordered pairs, every kernel
/// evaluated and accumulated at 256 bits.
pub fn highprec_eta(n: u64, beta: f64, omega_bar: f64) -> Result<f64> {
    if n > HIGHPREC_PAIR_LIMIT {
        return Err(Error::BudgetExceeded { n, limit: HIGHPREC_PAIR_LIMIT });
    }
    let mut hp = Hp::new();
    let kernels: Vec<BigFloat> = (0..n).map(|m| gw_kernel_hp(&mut hp, m, beta, omega_bar)).collect();
    let mut sum = hp.num(0.0);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum = hp.add(&sum, &kernels[i.abs_diff(j) as usize]);
            }
        }
    }
    let denom = hp.mul(&hp.num(-8.0 * omega_bar), &hp.int(n));
    let eta = hp.div(&sum, &denom);
    Ok(hp.nearest_f64(&eta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversion_round_trips() {
        let mut hp = Hp::new();
        for x in [1.0, -2.5e-300, 1.0 / 3.0, 6.02e23] {
            assert_eq!(hp.nearest_f64(&hp.num(x)), x);
        }
        let pi = hp.pi();
        assert_eq!(hp.nearest_f64(&pi), std::f64::consts::PI);
    }

    #[test]
    fn small_x_tilde() {
        let v = highprec_f_tilde(1e-4);
        assert!((v - (1e-8 / 6.0 - 1e-16 / 90.0)).abs() < 1e-24);
    }

    #[test]
    fn zero_strain_difference() {
        assert_eq!(highprec_delta_gamma(0.5, 1000, 0.0, 2.5).unwrap(), 0.0);
    }
}
