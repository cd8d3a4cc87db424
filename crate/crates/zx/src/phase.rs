//! Spider phases as rational multiples of pi, with a floating escape hatch.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

/// A phase angle. `Exact(r)` means `r * pi` with `r` kept in `[0, 2)`;
/// `Real(x)` is an angle in radians in `(-pi, pi]`, left untouched when
/// already in range so negation is an exact involution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Phase {
    Exact(Rational64),
    Real(f64),
}

impl Phase {
    pub fn zero() -> Self {
        Phase::Exact(Rational64::zero())
    }

    pub fn pi() -> Self {
        Phase::Exact(Rational64::one())
    }

    /// `(num/den) * pi`, reduced mod 2pi.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "phase denominator must be nonzero");
        Phase::Exact(Rational64::new(num, den)).normalized()
    }

    pub fn from_rational(r: Rational64) -> Self {
        Phase::Exact(r).normalized()
    }

    pub fn real(radians: f64) -> Self {
        Phase::Real(radians).normalized()
    }

    fn normalized(self) -> Self {
        match self {
            Phase::Exact(r) => {
                let two = Rational64::from_integer(2);
                let mut r = r % two;
                if r.is_negative() {
                    r += two;
                }
                Phase::Exact(r)
            }
            Phase::Real(x) if x > -PI && x <= PI => Phase::Real(x),
            Phase::Real(x) => {
                let y = x.rem_euclid(2.0 * PI);
                Phase::Real(if y > PI { y - 2.0 * PI } else { y })
            }
        }
    }

    pub fn to_radians(self) -> f64 {
        match self {
            Phase::Exact(r) => *r.numer() as f64 / *r.denom() as f64 * PI,
            Phase::Real(x) => x,
        }
    }

    /// Rational multiple of pi, if exact.
    pub fn to_rational(self) -> Option<Rational64> {
        match self {
            Phase::Exact(r) => Some(r),
            Phase::Real(_) => None,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Phase::Exact(_))
    }

    pub fn is_zero(self) -> bool {
        match self {
            Phase::Exact(r) => r.is_zero(),
            Phase::Real(_) => false,
        }
    }

    /// 0 or pi.
    pub fn is_pauli(self) -> bool {
        match self {
            Phase::Exact(r) => r.is_integer(),
            Phase::Real(_) => false,
        }
    }

    /// pi/2 or 3pi/2.
    pub fn is_proper_clifford(self) -> bool {
        match self {
            Phase::Exact(r) => *r.denom() == 2,
            Phase::Real(_) => false,
        }
    }

    /// Any multiple of pi/2.
    pub fn is_clifford(self) -> bool {
        self.is_pauli() || self.is_proper_clifford()
    }

    /// Odd multiple of pi/4, i.e. a T-like phase.
    pub fn is_t_like(self) -> bool {
        match self {
            Phase::Exact(r) => *r.denom() == 4,
            Phase::Real(_) => false,
        }
    }

    /// `e^{i phase}`.
    pub fn exp_i(self) -> num_complex::Complex64 {
        match self {
            Phase::Exact(r) if 4 % *r.denom() == 0 => {
                // keep the common cases free of rounding noise
                let eighths = (r * Rational64::from_integer(4)).to_integer();
                let s = std::f64::consts::FRAC_1_SQRT_2;
                use num_complex::Complex64 as C;
                match eighths.rem_euclid(8) {
                    0 => C::new(1.0, 0.0),
                    1 => C::new(s, s),
                    2 => C::new(0.0, 1.0),
                    3 => C::new(-s, s),
                    4 => C::new(-1.0, 0.0),
                    5 => C::new(-s, -s),
                    6 => C::new(0.0, -1.0),
                    _ => C::new(s, -s),
                }
            }
            p => num_complex::Complex64::from_polar(1.0, p.to_radians()),
        }
    }

    pub fn approx_eq(self, other: Phase, tol: f64) -> bool {
        let d = (self - other).to_radians();
        d.min(2.0 * PI - d).abs() <= tol
    }

    /// Multiply by an integer.
    pub fn scale(self, k: i64) -> Phase {
        match self {
            Phase::Exact(r) => Phase::from_rational(r * Rational64::from_integer(k)),
            Phase::Real(x) => Phase::real(x * k as f64),
        }
    }
}

impl Default for Phase {
    fn default() -> Self {
        Phase::zero()
    }
}

impl Add for Phase {
    type Output = Phase;
    fn add(self, rhs: Phase) -> Phase {
        match (self, rhs) {
            (Phase::Exact(a), Phase::Exact(b)) => Phase::from_rational(a + b),
            (a, b) => Phase::real(a.to_radians() + b.to_radians()),
        }
    }
}

impl AddAssign for Phase {
    fn add_assign(&mut self, rhs: Phase) {
        *self = *self + rhs;
    }
}

impl Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        match self {
            Phase::Exact(a) => Phase::from_rational(-a),
            Phase::Real(x) => Phase::real(-x),
        }
    }
}

impl Sub for Phase {
    type Output = Phase;
    fn sub(self, rhs: Phase) -> Phase {
        self + (-rhs)
    }
}

impl From<Rational64> for Phase {
    fn from(r: Rational64) -> Self {
        Phase::from_rational(r)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::Exact(r) if r.is_zero() => write!(f, "0"),
            Phase::Exact(r) => {
                let (n, d) = (*r.numer(), *r.denom());
                match (n, d) {
                    (1, 1) => write!(f, "pi"),
                    (n, 1) => write!(f, "{n}pi"),
                    (1, d) => write!(f, "pi/{d}"),
                    (n, d) => write!(f, "{n}pi/{d}"),
                }
            }
            Phase::Real(x) => write!(f, "{x}"),
        }
    }
}
