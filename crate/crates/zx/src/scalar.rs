//! Global scalar factor of a diagram.

use std::fmt;
use std::ops::{Mul, MulAssign};

use num_complex::Complex64;

use crate::phase::Phase;

/// Complex factor with an explicit zero flag, so that a diagram known to
/// vanish stays zero instead of drifting through rounding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scalar {
    value: Complex64,
    is_zero: bool,
}

impl Scalar {
    pub fn one() -> Self {
        Scalar { value: Complex64::new(1.0, 0.0), is_zero: false }
    }

    pub fn zero() -> Self {
        Scalar { value: Complex64::new(0.0, 0.0), is_zero: true }
    }

    pub fn from_complex(c: Complex64) -> Self {
        if c.norm() == 0.0 {
            Scalar::zero()
        } else {
            Scalar { value: c, is_zero: false }
        }
    }

    /// `sqrt(2)^k`.
    pub fn sqrt2_pow(k: i32) -> Self {
        let mut v = 2f64.powi(k.div_euclid(2));
        if k.rem_euclid(2) == 1 {
            v *= std::f64::consts::SQRT_2;
        }
        Scalar::from_complex(Complex64::new(v, 0.0))
    }

    pub fn phase(p: Phase) -> Self {
        Scalar::from_complex(p.exp_i())
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.is_zero
    }

    pub fn conj(&self) -> Self {
        Scalar { value: self.value.conj(), is_zero: self.is_zero }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::one()
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        if self.is_zero || rhs.is_zero {
            Scalar::zero()
        } else {
            Scalar::from_complex(self.value * rhs.value)
        }
    }
}

impl Mul<Complex64> for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Complex64) -> Scalar {
        self * Scalar::from_complex(rhs)
    }
}

impl MulAssign for Scalar {
    fn mul_assign(&mut self, rhs: Scalar) {
        *self = *self * rhs;
    }
}

impl MulAssign<Complex64> for Scalar {
    fn mul_assign(&mut self, rhs: Complex64) {
        *self = *self * rhs;
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero {
            write!(f, "0")
        } else {
            write!(f, "{}", self.value)
        }
    }
}
