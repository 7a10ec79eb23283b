//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Real floating point type the toolkit is generic over: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in target float type")
    }

    /// A tolerance that is `nominal` for double precision and never tighter than
    /// `eps_multiple` units of roundoff for the actual type.
    fn tol(nominal: f64, eps_multiple: f64) -> Self {
        Self::lit(nominal).max(Self::epsilon() * Self::lit(eps_multiple))
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

pub fn is_finite_c<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Unit-modulus phase of `z`; `1` for zero input.
pub fn unit_phase<T: Real>(z: Complex<T>) -> Complex<T> {
    let n = z.norm();
    if n > T::zero() && n.is_finite() {
        z / n
    } else {
        Complex::new(T::one(), T::zero())
    }
}

/// Lexicographic order on (re, im) used wherever a deterministic level order is needed.
pub fn cmp_re_im<T: Real>(a: &Complex<T>, b: &Complex<T>) -> std::cmp::Ordering {
    a.re.partial_cmp(&b.re)
        .unwrap_or(std::cmp::Ordering::Equal)
        .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
}
