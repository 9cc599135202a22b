//! Field abstraction shared by the exact and floating linear algebra.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::Rational;

/// A scalar that Gaussian elimination can work over.
///
/// Exact fields report zero exactly; floating types treat anything below a
/// relative threshold as zero. `try_recip` returns `None` for elements that
/// are nonzero but not invertible in the implementation (this happens for
/// parameter-valued expressions whose inverse is not a Laurent monomial).
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
    fn try_recip(&self) -> Option<Self>;

    fn negligible(&self) -> bool {
        self.is_zero()
    }

    /// Preference score used when choosing among admissible pivots; larger wins.
    fn pivot_weight(&self) -> f64 {
        0.0
    }
}

impl Scalar for Rational {
    fn try_recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
}

macro_rules! float_scalar {
    ($t:ty, $eps:expr) => {
        impl Scalar for $t {
            fn try_recip(&self) -> Option<Self> {
                if self.negligible() {
                    None
                } else {
                    Some(1.0 / *self)
                }
            }

            fn negligible(&self) -> bool {
                self.abs() < $eps
            }

            fn pivot_weight(&self) -> f64 {
                self.abs() as f64
            }
        }
    };
}

float_scalar!(f64, 1e-12);
float_scalar!(f32, 1e-5);

/// Converts an exact rational to a float of any precision.
pub fn rational_to_float<T: num_traits::Float>(q: &Rational) -> T {
    use num_traits::ToPrimitive;
    let v = q.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    });
    T::from(v).unwrap_or_else(T::nan)
}

/// Best rational approximation with bounded denominator, used for CLI input.
pub fn float_to_rational(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn is_negative(q: &Rational) -> bool {
    q.is_negative()
}
