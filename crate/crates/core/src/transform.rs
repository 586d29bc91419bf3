//! Elementary transformations and the point twist at the level of exponent
//! and degree data, plus the local residue-frame model at one marked point.

use crate::error::{Error, Result};
use crate::parabolic::ExponentData;
use crate::scalar::Scalar;

fn require_unit_lambda(e: &ExponentData) -> Result<()> {
    if !e.lambda.is_one() {
        return Err(Error::Precondition(
            "elementary transformations are defined for unit lambda".into(),
        ));
    }
    Ok(())
}

fn check_index(e: &ExponentData, i: usize) -> Result<()> {
    if i >= e.n() {
        return Err(Error::DimensionMismatch(format!(
            "marked point index {i} out of range for n = {}",
            e.n()
        )));
    }
    Ok(())
}

/// Down transformation at point i: (nu+, nu-) becomes (nu- + 1, nu+), the
/// degree drops by one.
pub fn elm_minus_exponents(e: &ExponentData, i: usize) -> Result<ExponentData> {
    require_unit_lambda(e)?;
    check_index(e, i)?;
    let mut out = e.clone();
    let (p, m) = out.nu[i].clone();
    out.nu[i] = (&m + &Scalar::one(), p);
    out.degree -= 1;
    Ok(out)
}

/// Up transformation at point i: (nu+, nu-) becomes (nu-, nu+ - 1), the
/// degree rises by one.
pub fn elm_plus_exponents(e: &ExponentData, i: usize) -> Result<ExponentData> {
    require_unit_lambda(e)?;
    check_index(e, i)?;
    let mut out = e.clone();
    let (p, m) = out.nu[i].clone();
    out.nu[i] = (m, &p - &Scalar::one());
    out.degree += 1;
    Ok(out)
}

/// Twist by the point i on rank 2: both exponents drop by one, the degree
/// rises by two.
pub fn twist_exponents(e: &ExponentData, i: usize) -> Result<ExponentData> {
    require_unit_lambda(e)?;
    check_index(e, i)?;
    let mut out = e.clone();
    let (p, m) = out.nu[i].clone();
    out.nu[i] = (&p - &Scalar::one(), &m - &Scalar::one());
    out.degree += 2;
    Ok(out)
}

/// Residue matrix at one marked point in an adapted frame: lower triangular,
/// the flag line is the second frame vector and carries the upper exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalModel {
    pub diag: (Scalar, Scalar),
    pub lower_left: Scalar,
}

impl LocalModel {
    /// Diagonal order is (nu-, nu+); the flag eigenvalue sits last.
    pub fn new(diag: (Scalar, Scalar), lower_left: Scalar) -> Self {
        LocalModel { diag, lower_left }
    }

    pub fn eigenvalues(&self) -> (Scalar, Scalar) {
        self.diag.clone()
    }
}

/// Frame computation behind the down transformation: in the new lattice the
/// frame swaps roles and the flag eigenvalue becomes nu- + 1. The lower left
/// entry rides along, so triangularity is preserved.
pub fn elm_minus_local(m: &LocalModel, nu: &(Scalar, Scalar)) -> Result<(LocalModel, (Scalar, Scalar))> {
    let (p, mi) = nu;
    if m.diag.0 != *mi || m.diag.1 != *p {
        return Err(Error::Precondition(
            "residue diagonal disagrees with the declared exponents".into(),
        ));
    }
    let new_nu = (&m.diag.0 + &Scalar::one(), m.diag.1.clone());
    let out = LocalModel::new((new_nu.1.clone(), new_nu.0.clone()), m.lower_left.clone());
    Ok((out, new_nu))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exps(nu: &[(i64, i64)], d: i64) -> ExponentData {
        ExponentData::new(
            nu.iter().map(|&(p, m)| (Scalar::from_int(p), Scalar::from_int(m))).collect(),
            Scalar::one(),
            d,
        )
    }

    #[test]
    fn minus_example() {
        let e = exps(&[(0, -1), (-1, -1)], 3);
        let out = elm_minus_exponents(&e, 0).unwrap();
        assert_eq!(out.nu[0], (Scalar::zero(), Scalar::zero()));
        assert_eq!(out.nu[1], e.nu[1]);
        assert_eq!(out.degree, 2);
        assert!(crate::parabolic::fuchs_check(&out));
    }

    #[test]
    fn plus_example_and_inverses() {
        let e = exps(&[(0, 0)], 2);
        let out = elm_plus_exponents(&e, 0).unwrap();
        assert_eq!(out.nu[0], (Scalar::zero(), -Scalar::one()));
        assert_eq!(out.degree, 3);
        assert_eq!(elm_minus_exponents(&out, 0).unwrap(), e);
        assert_eq!(elm_plus_exponents(&elm_minus_exponents(&e, 0).unwrap(), 0).unwrap(), e);
    }

    #[test]
    fn twist_and_composite_identity() {
        let e = ExponentData::new(
            vec![(Scalar::ratio(1, 2), Scalar::ratio(-7, 2))],
            Scalar::one(),
            3,
        );
        assert!(crate::parabolic::fuchs_check(&e));
        let t = twist_exponents(&e, 0).unwrap();
        assert_eq!(t.nu[0], (Scalar::ratio(-1, 2), Scalar::ratio(-9, 2)));
        assert_eq!(t.degree, 5);
        // plus factors through the twist
        assert_eq!(
            elm_plus_exponents(&e, 0).unwrap(),
            elm_minus_exponents(&twist_exponents(&e, 0).unwrap(), 0).unwrap()
        );
        assert!(crate::parabolic::fuchs_check(&t));
    }

    #[test]
    fn lambda_zero_is_rejected() {
        let mut e = exps(&[(0, -3)], 3);
        e.lambda = Scalar::zero();
        assert!(elm_minus_exponents(&e, 0).is_err());
        assert!(twist_exponents(&e, 0).is_err());
    }

    #[test]
    fn local_model_tracks_spectrum() {
        let nu = (Scalar::ratio(1, 2), Scalar::ratio(-3, 2));
        let m = LocalModel::new((nu.1.clone(), nu.0.clone()), Scalar::from_int(7));
        let (m2, nu2) = elm_minus_local(&m, &nu).unwrap();
        assert_eq!(nu2, (Scalar::ratio(-1, 2), Scalar::ratio(1, 2)));
        assert_eq!(m2.diag, (nu2.1.clone(), nu2.0.clone()));
        assert_eq!(m2.lower_left, Scalar::from_int(7));
        // double application agrees with the exponent bookkeeping
        let e = ExponentData::new(vec![nu.clone()], Scalar::one(), 3);
        let twice = elm_minus_exponents(&elm_minus_exponents(&e, 0).unwrap(), 0).unwrap();
        let (_, nu3) = elm_minus_local(&m2, &nu2).unwrap();
        assert_eq!(twice.nu[0], nu3);
        // wrong diagonal is refused
        assert!(elm_minus_local(&m, &nu2).is_err());
    }
}
