//! Arithmetic abstraction used by the 1-d heat series so that the same code
//! runs in `f64`, double-double, and multiprecision.

use std::ops::{Add, Div, Mul, Sub};

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

use super::dd::Dd;

pub type Big = FBig<HalfEven, 2>;

pub trait Scalar:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
    type Prec: Copy;

    fn from_f64(x: f64, prec: Self::Prec) -> Self;
    fn exp(&self) -> Self;
    fn to_f64(&self) -> f64;
    /// Unit roundoff of the representation.
    fn unit_roundoff(prec: Self::Prec) -> f64;
}

impl Scalar for f64 {
    type Prec = ();

    fn from_f64(x: f64, _: ()) -> Self {
        x
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn unit_roundoff(_: ()) -> f64 {
        f64::EPSILON / 2.0
    }
}

impl Scalar for Dd {
    type Prec = ();

    fn from_f64(x: f64, _: ()) -> Self {
        Dd::from_f64(x)
    }

    fn exp(&self) -> Self {
        // Evaluated at 160 bits and rounded back to a double-double.
        let big = Mp::from_dd(*self, 160).exp();
        big.to_dd()
    }

    fn to_f64(&self) -> f64 {
        Dd::to_f64(*self)
    }

    fn unit_roundoff(_: ()) -> f64 {
        Dd::EPSILON
    }
}

/// Binary multiprecision float with an explicit working precision in bits.
#[derive(Clone, Debug)]
pub struct Mp(Big);

impl Mp {
    pub fn new(x: f64, bits: usize) -> Self {
        let v = Big::try_from(x).unwrap_or(Big::ZERO);
        Mp(v.with_precision(bits).value())
    }

    pub fn from_dd(x: Dd, bits: usize) -> Self {
        Mp::new(x.hi(), bits) + Mp::new(x.lo(), bits)
    }

    pub fn to_dd(&self) -> Dd {
        let hi = self.0.to_f64().value();
        if !hi.is_finite() {
            return Dd::from_f64(hi);
        }
        let rest = self.0.clone() - Big::try_from(hi).unwrap_or(Big::ZERO);
        Dd::from_parts(hi, rest.to_f64().value())
    }

    pub fn precision(&self) -> usize {
        self.0.precision()
    }
}

impl Add for Mp {
    type Output = Mp;
    fn add(self, rhs: Mp) -> Mp {
        Mp(self.0 + rhs.0)
    }
}

impl Sub for Mp {
    type Output = Mp;
    fn sub(self, rhs: Mp) -> Mp {
        Mp(self.0 - rhs.0)
    }
}

impl Mul for Mp {
    type Output = Mp;
    fn mul(self, rhs: Mp) -> Mp {
        Mp(self.0 * rhs.0)
    }
}

impl Div for Mp {
    type Output = Mp;
    fn div(self, rhs: Mp) -> Mp {
        Mp(self.0 / rhs.0)
    }
}

impl Scalar for Mp {
    type Prec = usize;

    fn from_f64(x: f64, bits: usize) -> Self {
        Mp::new(x, bits)
    }
    fn exp(&self) -> Self {
        Mp(self.0.exp())
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }
    fn unit_roundoff(bits: usize) -> f64 {
        2f64.powi(-(bits as i32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dd_exp_matches_multiprecision() {
        for &x in &[-0.1, -0.6, -2.5, -13.0, -0.0375, 3.25] {
            let dd = <Dd as Scalar>::exp(&Dd::from(x));
            let reference = Mp::new(x, 300).exp();
            let diff = (Mp::from_dd(dd, 300) - reference.clone()) / reference;
            assert!(diff.to_f64().abs() < 4.0 * Dd::EPSILON, "x={x}: {}", diff.to_f64());
        }
    }

    #[test]
    fn mp_keeps_requested_precision() {
        let a = Mp::new(1.0, 256) / Mp::new(3.0, 256);
        assert_eq!(a.precision(), 256);
        let back = a * Mp::new(3.0, 256) - Mp::new(1.0, 256);
        assert!(back.to_f64().abs() < 1e-70);
    }
}
