//! Rational functions in one variable, kept in reduced form with a monic denominator.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::poly::Poly;
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator in rational function");
        if num.is_zero() {
            return RatFunc {
                num: Poly::zero(),
                den: Poly::one(),
            };
        }
        let g = num.gcd(&den);
        let (num, den) = if g.degree() > Some(0) {
            (num.div_exact(&g), den.div_exact(&g))
        } else {
            (num, den)
        };
        let c = den.leading().inv();
        RatFunc {
            num: num.scale(&c),
            den: den.scale(&c),
        }
    }

    pub fn zero() -> Self {
        RatFunc {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        RatFunc::from_poly(Poly::one())
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn constant(c: Scalar) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn x() -> Self {
        RatFunc::from_poly(Poly::x())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "division by zero rational function");
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn derivative(&self) -> Self {
        // (n/d)' = (n'd - nd')/d^2
        RatFunc::new(
            &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative()),
            &self.den * &self.den,
        )
    }

    /// Order of vanishing at `x = x0`: multiplicity in the numerator minus
    /// multiplicity in the denominator. Panics on the zero function.
    pub fn order_at(&self, x0: &Scalar) -> i64 {
        assert!(!self.is_zero(), "zero function has no finite order");
        let lin = Poly::new(vec![-x0, Scalar::one()]);
        self.num.factor_multiplicity(&lin) as i64 - self.den.factor_multiplicity(&lin) as i64
    }

    /// Order with respect to the squarefree polynomial `p`.
    pub fn order_at_poly(&self, p: &Poly) -> i64 {
        assert!(!self.is_zero(), "zero function has no finite order");
        self.num.factor_multiplicity(p) as i64 - self.den.factor_multiplicity(p) as i64
    }

    pub fn eval(&self, x: &Scalar) -> Option<Scalar> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}
impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &-rhs
    }
}
impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}
impl Div for &RatFunc {
    type Output = RatFunc;
    fn div(self, rhs: &RatFunc) -> RatFunc {
        self * &rhs.inv()
    }
}
impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}
impl Add for RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: RatFunc) -> RatFunc {
        &self + &rhs
    }
}
impl Sub for RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: RatFunc) -> RatFunc {
        &self - &rhs
    }
}
impl Mul for RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: RatFunc) -> RatFunc {
        &self * &rhs
    }
}
impl Div for RatFunc {
    type Output = RatFunc;
    fn div(self, rhs: RatFunc) -> RatFunc {
        &self / &rhs
    }
}
impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_is_canonical() {
        let a = RatFunc::new(Poly::from_ints(&[-1, 0, 1]), Poly::from_ints(&[-2, 2]));
        // (x^2-1)/(2x-2) = (x+1)/2
        assert_eq!(a.num(), &Poly::new(vec![Scalar::ratio(1, 2), Scalar::ratio(1, 2)]));
        assert_eq!(a.den(), &Poly::one());
    }

    #[test]
    fn order_at_pole_and_zero() {
        let a = RatFunc::new(Poly::from_ints(&[0, 0, 1]), Poly::from_ints(&[-1, 1]));
        assert_eq!(a.order_at(&Scalar::zero()), 2);
        assert_eq!(a.order_at(&Scalar::one()), -1);
        assert_eq!(a.order_at(&Scalar::from_int(5)), 0);
    }
}
