//! Exponent and weight bookkeeping for rank 2 quasi-parabolic data: the trace
//! relation on local exponents, the non-resonance test, parabolic degrees,
//! the rank 1 destabilization margin, and the moduli dimension counts.

use serde::{Deserialize, Serialize};

use crate::cech::{h0_pairing_map, CechOneClass, Cover, LineBundleData};
use crate::curve::CurveModel;
use crate::divisor::{ClosedPoint, Divisor};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Local exponent pairs (nu+_i, nu-_i) of a lambda-connection of degree d.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentData {
    pub nu: Vec<(Scalar, Scalar)>,
    pub lambda: Scalar,
    pub degree: i64,
}

impl ExponentData {
    pub fn new(nu: Vec<(Scalar, Scalar)>, lambda: Scalar, degree: i64) -> Self {
        ExponentData { nu, lambda, degree }
    }

    pub fn n(&self) -> usize {
        self.nu.len()
    }

    /// Residues of the trace connection at the marked points.
    pub fn trace(&self) -> Vec<Scalar> {
        self.nu.iter().map(|(p, m)| p + m).collect()
    }

    pub fn sum_minus(&self) -> Scalar {
        let mut s = Scalar::zero();
        for (_, m) in &self.nu {
            s += m.clone();
        }
        s
    }
}

/// Exact trace relation: the exponent sums must balance the degree.
pub fn fuchs_check(e: &ExponentData) -> bool {
    let mut sum = Scalar::zero();
    for (p, m) in &e.nu {
        sum += p + m;
    }
    sum == -(&e.lambda * &Scalar::from_int(e.degree))
}

/// True iff every one of the 2^n sign choices gives a non-integral exponent
/// sum. A connection with such exponents has no invariant sub line bundle,
/// hence is stable for every weight.
pub fn resonance_check(e: &ExponentData) -> Result<bool> {
    if !e.lambda.is_one() {
        return Err(Error::Precondition(
            "resonance test applies to unit lambda only".into(),
        ));
    }
    let n = e.n();
    for mask in 0u64..(1u64 << n) {
        let mut sum = Scalar::zero();
        for (i, (p, m)) in e.nu.iter().enumerate() {
            sum += if mask >> i & 1 == 0 { p.clone() } else { m.clone() };
        }
        if sum.is_integer() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Weight pairs (alpha1_i, alpha2_i) at the marked points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Weights {
    pub alpha: Vec<(Scalar, Scalar)>,
}

impl Weights {
    pub fn new(alpha: Vec<(Scalar, Scalar)>) -> Result<Self> {
        for (a1, a2) in &alpha {
            if !(a1.is_positive() && a1 < a2 && a2 < &Scalar::one()) {
                return Err(Error::Precondition(
                    "weights must satisfy 0 < alpha1 < alpha2 < 1".into(),
                ));
            }
        }
        Ok(Weights { alpha })
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    /// w_i = alpha2_i - alpha1_i.
    pub fn gaps(&self) -> Vec<Scalar> {
        self.alpha.iter().map(|(a1, a2)| a2 - a1).collect()
    }

    pub fn gap_sum(&self) -> Scalar {
        let mut s = Scalar::zero();
        for g in self.gaps() {
            s += g;
        }
        s
    }

    /// The stability criteria used here assume the total gap stays below 1.
    pub fn is_small(&self) -> bool {
        self.gap_sum() < Scalar::one()
    }
}

/// Per marked point: does the candidate sub line bundle's fiber meet the
/// distinguished flag line.
pub type FlagIncidence = Vec<bool>;

/// Parabolic degree. For a rank 1 sub of a rank 2 parabolic bundle the flag
/// dichotomy picks alpha2 where the fiber lies in the flag line and alpha1
/// otherwise; for the full bundle both weights contribute at every point.
pub fn parabolic_degree(deg_f: i64, inc: &FlagIncidence, w: &Weights, rank1: bool) -> Result<Scalar> {
    if rank1 && inc.len() != w.n() {
        return Err(Error::DimensionMismatch(
            "flag incidence and weight lengths differ".into(),
        ));
    }
    let mut d = Scalar::from_int(deg_f);
    for (i, (a1, a2)) in w.alpha.iter().enumerate() {
        if rank1 {
            d += if inc[i] { a2.clone() } else { a1.clone() };
        } else {
            d += a1 + a2;
        }
    }
    Ok(d)
}

/// Margin of the rank 1 destabilization inequality for a candidate sub of
/// degree deg_f: positive means the candidate respects stability, negative
/// means it destabilizes, zero witnesses strict semistability.
pub fn stability_margin(deg_e: i64, deg_f: i64, inc: &FlagIncidence, w: &Weights) -> Scalar {
    let mut m = Scalar::from_int(deg_e - 2 * deg_f);
    for (i, g) in w.gaps().iter().enumerate() {
        if inc[i] {
            m -= g.clone();
        } else {
            m += g.clone();
        }
    }
    m
}

/// A rank 2 bundle in normal form: extension of O(A) by O, glued by the
/// overlap cocycle bprime which vanishes along the marked points. The flag at
/// each marked point is the second frame vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParabolicBundleData {
    pub bundle: LineBundleData,
    pub bprime: CechOneClass,
    pub marked_points: Vec<ClosedPoint>,
}

impl ParabolicBundleData {
    pub fn new(
        curve: &CurveModel,
        bundle: LineBundleData,
        cocycle: crate::ffe::Ffe,
        marked_points: Vec<ClosedPoint>,
    ) -> Result<Self> {
        bundle.validate(curve)?;
        let mut w = bundle.a.neg();
        for t in &marked_points {
            curve.check_point(t)?;
            if t.degree() != 1 || t.is_weierstrass() || t.is_infinity() {
                return Err(Error::InvalidPoint(format!(
                    "marked point {t} must be rational, affine and unramified"
                )));
            }
            if bundle.cover.b.contains(t) || bundle.cover.bp.contains(t) {
                return Err(Error::Precondition(format!(
                    "marked point {t} must lie on the chart overlap"
                )));
            }
            w = w.sub(&Divisor::point(t.clone()));
        }
        let bprime = CechOneClass::new(curve, &bundle.cover, w, cocycle)?;
        Ok(ParabolicBundleData { bundle, bprime, marked_points })
    }

    pub fn marked_divisor(&self) -> Divisor {
        let mut d = Divisor::zero();
        for t in &self.marked_points {
            d = d.add(&Divisor::point(t.clone()));
        }
        d
    }

    /// The cocycle class with the marked-point vanishing forgotten, in
    /// H^1(O(-A)).
    pub fn forget_marked(&self, curve: &CurveModel, cover: &Cover) -> Result<CechOneClass> {
        self.bprime.forget_twist(curve, cover, self.bundle.a.neg())
    }
}

/// The extension glued from bprime has a one dimensional space of global
/// sections exactly when the cup-product map against the class is invertible.
pub fn v0_membership(curve: &CurveModel, pb: &ParabolicBundleData) -> Result<bool> {
    let cover = &pb.bundle.cover;
    let b = pb.forget_marked(curve, cover)?;
    Ok(h0_pairing_map(curve, cover, &pb.bundle.a, &b)?.is_invertible())
}

/// Dimensions of the four moduli spaces attached to genus g with n marked
/// points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuliDimensions {
    pub parabolic_bundles: i64,
    pub fixed_determinant_bundles: i64,
    pub parabolic_connections: i64,
    pub fixed_trace_connections: i64,
}

pub fn moduli_dimensions(g: i64, n: i64) -> ModuliDimensions {
    ModuliDimensions {
        parabolic_bundles: 4 * g + n - 3,
        fixed_determinant_bundles: 3 * g + n - 3,
        parabolic_connections: 8 * g + 2 * n - 6,
        fixed_trace_connections: 6 * g + 2 * n - 6,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(p: i64, q: i64) -> Scalar {
        Scalar::ratio(p, q)
    }

    fn exps(nu: &[(i64, i64, i64, i64)], lambda: i64, d: i64) -> ExponentData {
        ExponentData::new(
            nu.iter().map(|&(a, b, c, e)| (sc(a, b), sc(c, e))).collect(),
            Scalar::from_int(lambda),
            d,
        )
    }

    #[test]
    fn fuchs_examples() {
        assert!(fuchs_check(&exps(&[(1, 2, -3, 2), (-1, 1, -1, 1)], 1, 3)));
        assert!(fuchs_check(&exps(&[(5, 7, -5, 7)], 0, 3)));
        assert!(!fuchs_check(&exps(&[(0, 1, 0, 1), (0, 1, 0, 1)], 1, 3)));
    }

    #[test]
    fn resonance_examples() {
        assert!(resonance_check(&exps(&[(1, 2, -3, 2), (-1, 1, -1, 1)], 1, 3)).unwrap());
        assert!(!resonance_check(&exps(&[(0, 1, -1, 1), (-1, 1, -1, 1)], 1, 3)).unwrap());
        // the (+,+) choice sums to 0 here
        assert!(!resonance_check(&exps(&[(1, 3, -4, 3), (-1, 3, -5, 3)], 1, 3)).unwrap());
        assert!(resonance_check(&exps(&[(1, 3, -4, 3), (-1, 4, -7, 4)], 1, 3)).unwrap());
        assert!(resonance_check(&exps(&[(-1, 1, -2, 1)], 0, 3)).is_err());
    }

    #[test]
    fn parabolic_degree_dichotomy() {
        let w = Weights::new(vec![(sc(1, 10), sc(2, 10)), (sc(1, 10), sc(2, 10))]).unwrap();
        assert_eq!(parabolic_degree(1, &vec![false, false], &w, true).unwrap(), sc(6, 5));
        assert_eq!(parabolic_degree(1, &vec![true, true], &w, true).unwrap(), sc(7, 5));
        assert_eq!(parabolic_degree(3, &vec![], &w, false).unwrap(), sc(18, 5));
        assert!(Weights::new(vec![(sc(1, 10), sc(1, 10))]).is_err());
    }

    #[test]
    fn margin_examples_and_parity() {
        let w = Weights::new(vec![(sc(1, 2), sc(3, 5)), (sc(1, 4), sc(7, 20))]).unwrap();
        assert_eq!(stability_margin(3, 1, &vec![false, false], &w), sc(6, 5));
        assert_eq!(stability_margin(3, 2, &vec![true, true], &w), sc(-6, 5));
        // odd total degree with small weights never gives an exact tie
        assert!(w.is_small());
        for degf in -5..=5 {
            for mask in 0..4usize {
                let inc = vec![mask & 1 != 0, mask & 2 != 0];
                assert!(!stability_margin(3, degf, &inc, &w).is_zero());
            }
        }
    }

    #[test]
    fn dimension_table() {
        let d = moduli_dimensions(2, 2);
        assert_eq!(
            (d.parabolic_bundles, d.fixed_determinant_bundles, d.parabolic_connections, d.fixed_trace_connections),
            (7, 5, 14, 10)
        );
        let d = moduli_dimensions(2, 1);
        assert_eq!(
            (d.parabolic_bundles, d.fixed_determinant_bundles, d.parabolic_connections, d.fixed_trace_connections),
            (6, 4, 12, 8)
        );
        for g in 1..=5 {
            for n in 1..=6 {
                let d = moduli_dimensions(g, n);
                assert_eq!(
                    d.fixed_determinant_bundles + (3 * g - 3 + n),
                    d.fixed_trace_connections
                );
            }
        }
    }
}
