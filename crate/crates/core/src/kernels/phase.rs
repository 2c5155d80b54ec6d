//! Pair phases `(1 + delta) * 2*pi*beta*m` with the integer number of turns
//! removed before any trigonometric evaluation.
//!
//! Rational spacing ratios `beta = p/q` are reduced exactly in integer
//! arithmetic. Other ratios go through a double-double product once the
//! direct `f64` route would lose more than ~1e-12 of phase.

use std::f64::consts::{FRAC_PI_2, TAU};

/// Largest denominator tried when recognising `beta` as a rational number.
const MAX_DENOMINATOR: u64 = 1 << 20;
/// Denominators up to this size get a precomputed sin/cos table.
const TABLE_LIMIT: u64 = 1 << 14;
/// Beyond this many turns the plain `f64` product can misplace the phase by
/// more than 1e-12 rad.
const DIRECT_TURNS_BUDGET: f64 = 256.0;

/// A phase together with its trigonometric values evaluated on the reduced
/// argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase {
    value: f64,
    residual: f64,
    sin: f64,
    cos: f64,
}

impl Phase {
    /// Phase from a plain number; the platform `sin_cos` does the reduction.
    pub fn new(value: f64) -> Self {
        let (sin, cos) = value.sin_cos();
        let residual = value - TAU * (value / TAU).round();
        Phase { value, residual, sin, cos }
    }

    /// Phase whose fractional number of turns is known independently of
    /// `value`. `turns` may be any real; only its fractional part is used.
    pub fn from_turns(value: f64, turns: f64) -> Self {
        let frac = turns - turns.round();
        let (sin, cos) = sin_cos_turns(frac);
        Phase { value, residual: TAU * frac, sin, cos }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// Equivalent angle in `[-pi, pi]`.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn sin(&self) -> f64 {
        self.sin
    }

    pub fn cos(&self) -> f64 {
        self.cos
    }

    /// The phase `(1 + delta) * self`.
    pub fn scaled(&self, delta: f64) -> Phase {
        let extra = delta * self.value;
        let turns = (self.residual + extra) / TAU;
        Phase::from_turns((1.0 + delta) * self.value, turns)
    }

    pub fn abs(&self) -> Phase {
        if self.value < 0.0 {
            Phase { value: -self.value, residual: -self.residual, sin: -self.sin, cos: self.cos }
        } else {
            *self
        }
    }
}

impl From<f64> for Phase {
    fn from(value: f64) -> Self {
        Phase::new(value)
    }
}

/// `(sin, cos)` of `2*pi*frac` for `frac` in `[-1/2, 1/2]`, exact at every
/// multiple of a quarter turn.
pub fn sin_cos_turns(frac: f64) -> (f64, f64) {
    let quarters = 4.0 * frac;
    let k = quarters.round();
    let r = quarters - k;
    let (s, c) = if r == 0.0 { (0.0, 1.0) } else { (r * FRAC_PI_2).sin_cos() };
    match (k as i64).rem_euclid(4) {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionMethod {
    /// `beta = p/q`; whole turns removed with integer arithmetic.
    ExactRational,
    /// Plain `f64` product, inside the precision budget.
    Direct,
    /// Double-double product and fractional part.
    DoubleDouble,
}

/// Reduces lattice phases for one spacing ratio.
#[derive(Debug, Clone)]
pub struct PhaseReducer {
    beta: f64,
    ratio: Option<(u64, u64)>,
    /// `(sin, cos, residual)` for each remainder `p m mod q`.
    table: Option<Vec<(f64, f64, f64)>>,
}

impl PhaseReducer {
    pub fn new(beta: f64) -> Self {
        let ratio = rational_approximation(beta);
        let table = match ratio {
            Some((_, q)) if q <= TABLE_LIMIT => {
                let entry = |r: u64| {
                    let frac = centered(r as f64 / q as f64);
                    let (sin, cos) = sin_cos_turns(frac);
                    (sin, cos, TAU * frac)
                };
                Some((0..q).map(entry).collect())
            }
            _ => None,
        };
        PhaseReducer { beta, ratio, table }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `beta` as `(p, q)` when it is exactly a ratio of small integers.
    pub fn ratio(&self) -> Option<(u64, u64)> {
        self.ratio
    }

    pub fn method(&self, m: u64, delta: f64) -> ReductionMethod {
        if self.ratio.is_some() {
            ReductionMethod::ExactRational
        } else if (self.beta * m as f64 * (1.0 + delta)).abs() < DIRECT_TURNS_BUDGET {
            ReductionMethod::Direct
        } else {
            ReductionMethod::DoubleDouble
        }
    }

    /// `x_m = 2*pi*beta*m`.
    #[inline]
    pub fn phase(&self, m: u64) -> Phase {
        if let (Some((p, q)), Some(table)) = (self.ratio, &self.table) {
            let r = match (q, p.checked_mul(m)) {
                (1, _) => 0,
                (_, Some(k)) => k % q,
                (_, None) => ((p as u128 * m as u128) % q as u128) as u64,
            };
            let (sin, cos, residual) = table[r as usize];
            return Phase { value: TAU * self.beta * m as f64, residual, sin, cos };
        }
        self.scaled(m, 0.0)
    }

    /// `(1 + delta) * 2*pi*beta*m`.
    pub fn scaled(&self, m: u64, delta: f64) -> Phase {
        let value = TAU * self.beta * m as f64 * (1.0 + delta);
        let turns = match self.method(m, delta) {
            ReductionMethod::ExactRational => {
                let (p, q) = self.ratio.expect("rational method implies a ratio");
                let k = p as u128 * m as u128;
                let base = (k % q as u128) as f64 / q as f64;
                if delta == 0.0 {
                    base
                } else {
                    // delta * k / q in double-double, then its fractional part
                    let kd = Dd::from_u128(k);
                    let shifted = kd.mul_f64(delta).div_f64(q as f64);
                    base + shifted.fract()
                }
            }
            ReductionMethod::Direct => self.beta * m as f64 * (1.0 + delta),
            ReductionMethod::DoubleDouble => {
                let bm = Dd::two_prod(self.beta, m as f64);
                let total = bm.add(bm.mul_f64(delta));
                total.fract()
            }
        };
        Phase::from_turns(value, turns)
    }
}

/// Reduced phase of `(1 + scale_offset) * 2*pi*beta*m`.
pub fn reduced_phase(m: u64, beta: f64, scale_offset: f64) -> Phase {
    PhaseReducer::new(beta).scaled(m, scale_offset)
}

fn centered(frac: f64) -> f64 {
    if frac > 0.5 {
        frac - 1.0
    } else {
        frac
    }
}

/// `Some((p, q))` when `p as f64 / q as f64 == beta` for some `q <= 2^20`.
pub fn rational_approximation(beta: f64) -> Option<(u64, u64)> {
    if !(beta.is_finite() && beta > 0.0) || beta > 1e6 {
        return None;
    }
    // continued-fraction convergents
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut x = beta;
    for _ in 0..64 {
        let a = x.floor();
        if a > u64::MAX as f64 / 4.0 {
            return None;
        }
        let a = a as u64;
        let p2 = a.checked_mul(p1)?.checked_add(p0)?;
        let q2 = a.checked_mul(q1)?.checked_add(q0)?;
        if q2 > MAX_DENOMINATOR {
            return None;
        }
        if p2 as f64 / q2 as f64 == beta {
            return Some((p2, q2));
        }
        let rest = x - a as f64;
        if rest <= 0.0 {
            return None;
        }
        x = 1.0 / rest;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    None
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn two_prod(a: f64, b: f64) -> Dd {
        let hi = a * b;
        Dd { hi, lo: a.mul_add(b, -hi) }
    }

    fn quick_two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        Dd { hi: s, lo: b - (s - a) }
    }

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        Dd { hi: s, lo: (a - (s - bb)) + (b - bb) }
    }

    fn from_u128(k: u128) -> Dd {
        let hi = k as f64;
        let lo = if hi >= 2f64.powi(127) { 0.0 } else { (k as i128 - hi as i128) as f64 };
        Dd::quick_two_sum(hi, lo)
    }

    fn add(self, other: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, other.hi);
        Dd::quick_two_sum(s.hi, s.lo + self.lo + other.lo)
    }

    fn mul_f64(self, b: f64) -> Dd {
        let p = Dd::two_prod(self.hi, b);
        Dd::quick_two_sum(p.hi, p.lo + self.lo * b)
    }

    fn div_f64(self, b: f64) -> Dd {
        let q1 = self.hi / b;
        let p = Dd::two_prod(q1, b);
        let r = (self.hi - p.hi - p.lo + self.lo) / b;
        Dd::quick_two_sum(q1, r)
    }

    /// Fractional part in `[0, 1)` rounded to `f64`.
    fn fract(self) -> f64 {
        let fh = self.hi - self.hi.floor();
        let t = fh + self.lo;
        t - t.floor()
    }
}
