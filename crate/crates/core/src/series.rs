//! Truncated Laurent series with exact rational coefficients.
//!
//! A series knows the coefficients of `t^k` for `vmin <= k < prec`; everything
//! at or beyond `prec` is unknown. All arithmetic tracks precision soundly.

use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    vmin: i64,
    /// coefficient of t^(vmin + k) at index k; length = prec - vmin
    coeffs: Vec<Scalar>,
    prec: i64,
}

impl Series {
    pub fn new(vmin: i64, mut coeffs: Vec<Scalar>, prec: i64) -> Self {
        let want = (prec - vmin).max(0) as usize;
        coeffs.resize(want, Scalar::zero());
        Series { vmin, coeffs, prec }
    }

    /// Zero to the given precision.
    pub fn zero(prec: i64) -> Self {
        Series::new(prec, vec![], prec)
    }

    pub fn constant(c: Scalar, prec: i64) -> Self {
        Series::new(0, vec![c], prec)
    }

    /// The monomial `c * t^k`.
    pub fn monomial(c: Scalar, k: i64, prec: i64) -> Self {
        Series::new(k, vec![c], prec)
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn vmin(&self) -> i64 {
        self.vmin
    }

    /// Term-by-term derivative in `t`; precision drops by one.
    pub fn derivative(&self) -> Series {
        let prec = self.prec - 1;
        let coeffs = (0..(prec - (self.vmin - 1)).max(0))
            .map(|k| {
                let e = self.vmin + k;
                self.coeff(e) * Scalar::from_int(e)
            })
            .collect();
        Series::new(self.vmin - 1, coeffs, prec)
    }

    pub fn coeff(&self, k: i64) -> Scalar {
        if k < self.vmin || k >= self.prec {
            return Scalar::zero();
        }
        self.coeffs[(k - self.vmin) as usize].clone()
    }

    /// Order of the first nonzero known coefficient, or `None` if the series is
    /// zero to its precision.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| self.vmin + i as i64)
    }

    pub fn is_zero_to_prec(&self) -> bool {
        self.valuation().is_none()
    }

    pub fn truncate(&self, prec: i64) -> Series {
        let prec = prec.min(self.prec);
        Series::new(self.vmin.min(prec), self.coeffs.clone(), prec)
    }

    pub fn shift(&self, k: i64) -> Series {
        Series::new(self.vmin + k, self.coeffs.clone(), self.prec + k)
    }

    pub fn neg(&self) -> Series {
        Series::new(self.vmin, self.coeffs.iter().map(|c| -c).collect(), self.prec)
    }

    pub fn scale(&self, c: &Scalar) -> Series {
        Series::new(self.vmin, self.coeffs.iter().map(|a| a * c).collect(), self.prec)
    }

    pub fn add(&self, rhs: &Series) -> Series {
        let prec = self.prec.min(rhs.prec);
        let vmin = self.vmin.min(rhs.vmin).min(prec);
        let mut coeffs = vec![Scalar::zero(); (prec - vmin) as usize];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let e = vmin + k as i64;
            *c = self.coeff(e) + rhs.coeff(e);
        }
        Series::new(vmin, coeffs, prec)
    }

    pub fn sub(&self, rhs: &Series) -> Series {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Series) -> Series {
        // unknown tails enter at self.prec + rhs.vmin and rhs.prec + self.vmin
        let prec = (self.prec + rhs.vmin).min(rhs.prec + self.vmin);
        let vmin = self.vmin + rhs.vmin;
        let mut coeffs = vec![Scalar::zero(); (prec - vmin).max(0) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                let e = (i + j) as i64;
                if e < prec - vmin {
                    coeffs[e as usize] += a * b;
                }
            }
        }
        Series::new(vmin, coeffs, prec)
    }

    /// Multiplicative inverse. Panics if the series is zero to its precision.
    pub fn inv(&self) -> Series {
        let v = self
            .valuation()
            .expect("cannot invert a series that vanishes to working precision");
        // u = c * t^v * (1 + w), inv = c^-1 t^-v * (1 + w)^-1
        let rel_prec = self.prec - v; // known terms of (1 + w)
        let c = self.coeff(v);
        let cinv = c.inv();
        let mut unit = vec![Scalar::zero(); rel_prec as usize];
        for (k, u) in unit.iter_mut().enumerate() {
            *u = self.coeff(v + k as i64) * &cinv;
        }
        // invert the unit power series by the standard recursion
        let mut inv_unit = vec![Scalar::zero(); rel_prec as usize];
        inv_unit[0] = Scalar::one();
        for k in 1..rel_prec as usize {
            let mut acc = Scalar::zero();
            for j in 0..k {
                acc += &inv_unit[j] * &unit[k - j];
            }
            inv_unit[k] = -acc;
        }
        let coeffs = inv_unit.into_iter().map(|a| a * &cinv).collect();
        Series::new(-v, coeffs, -v + rel_prec)
    }

    pub fn div(&self, rhs: &Series) -> Series {
        self.mul(&rhs.inv())
    }

    /// Square root with prescribed leading coefficient `lead` (which must square
    /// to the series' leading coefficient; the valuation must be even).
    pub fn sqrt_with_lead(&self, lead: &Scalar) -> Series {
        let v = self.valuation().expect("sqrt of zero series");
        assert!(v % 2 == 0, "sqrt needs even valuation");
        let c = self.coeff(v);
        assert_eq!(lead * lead, c, "leading coefficient is not the prescribed square");
        let rel_prec = (self.prec - v) as usize;
        // normalize to 1 + w
        let cinv = c.inv();
        let mut unit = vec![Scalar::zero(); rel_prec];
        for (k, u) in unit.iter_mut().enumerate() {
            *u = self.coeff(v + k as i64) * &cinv;
        }
        // s with s^2 = unit, s0 = 1, via s_k = (unit_k - sum_{0<j<k} s_j s_{k-j}) / 2
        let mut s = vec![Scalar::zero(); rel_prec];
        s[0] = Scalar::one();
        let half = Scalar::ratio(1, 2);
        for k in 1..rel_prec {
            let mut acc = unit[k].clone();
            for j in 1..k {
                acc -= &s[j] * &s[k - j];
            }
            s[k] = acc * &half;
        }
        let coeffs = s.into_iter().map(|a| a * lead).collect();
        Series::new(v / 2, coeffs, v / 2 + rel_prec as i64)
    }

    /// Evaluate a polynomial at this series (Horner).
    pub fn eval_poly(&self, p: &Poly, prec: i64) -> Series {
        let mut acc = Series::zero(prec);
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self).add(&Series::constant(c.clone(), prec));
        }
        acc
    }

    /// Evaluate a rational function at this series.
    pub fn eval_ratfunc(&self, r: &RatFunc, prec: i64) -> Series {
        let num = self.eval_poly(r.num(), prec);
        let den = self.eval_poly(r.den(), prec);
        num.div(&den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn inverse_of_geometric() {
        // 1 - t has inverse 1 + t + t^2 + ...
        let a = Series::new(0, vec![s(1), s(-1)], 5);
        let inv = a.inv();
        for k in 0..5 {
            assert_eq!(inv.coeff(k), s(1));
        }
        assert_eq!(a.mul(&inv).coeff(0), s(1));
    }

    #[test]
    fn sqrt_squares_back() {
        // 4 + 4t + t^2 = (2 + t)^2
        let a = Series::new(0, vec![s(4), s(4), s(1)], 6);
        let r = a.sqrt_with_lead(&s(2));
        assert_eq!(r.coeff(0), s(2));
        assert_eq!(r.coeff(1), s(1));
        assert!(r.mul(&r).sub(&a).is_zero_to_prec());
        // the other branch
        let rneg = a.sqrt_with_lead(&s(-2));
        assert_eq!(rneg.coeff(0), s(-2));
    }

    #[test]
    fn laurent_precision_tracking() {
        let a = Series::monomial(s(1), -2, 3); // t^-2 known to t^3
        let b = Series::monomial(s(1), 1, 10); // t
        let prod = a.mul(&b);
        assert_eq!(prod.coeff(-1), s(1));
        assert_eq!(prod.prec(), 4.min(8));
    }

    #[test]
    fn ratfunc_expansion() {
        // 1/(1 - t) at t
        let t = Series::monomial(s(1), 1, 6);
        let r = RatFunc::new(Poly::from_ints(&[1]), Poly::from_ints(&[1, -1]));
        let e = t.eval_ratfunc(&r, 6);
        for k in 0..5 {
            assert_eq!(e.coeff(k), s(1), "coeff {k}");
        }
    }
}
