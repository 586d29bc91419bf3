//! The constructive inverse: from a twisted differential and a normal-form
//! bundle cocycle, produce the unique scaled connection with the prescribed
//! trace, then normalize the scale to recover the actual inverse of the pair
//! of projection maps.

use crate::cech::{residue_functional, split_cocycle, Cover, PivotPolicy};
use crate::connection::{
    prescribed_residue_form, validate_connection, ChartMatrix, ConnectionData, LineConnectionData,
    ValidationReport,
};
use crate::curve::CurveModel;
use crate::error::{Error, Result};
use crate::ffe::{canonical_divisor, pole_divisor, valuation, DifferentialForm, Ffe};
use crate::linalg::{solve_linear_with_order, Matrix};
use crate::parabolic::{fuchs_check, v0_membership, ExponentData, ParabolicBundleData};
use crate::rr::rr_space_basis;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default)]
pub struct ReconstructOptions {
    pub pivots: PivotPolicy,
}

#[derive(Clone, Debug)]
pub struct ReconstructionResult {
    pub lambda: Scalar,
    pub connection: ConnectionData,
    pub zeta: DifferentialForm,
    pub certificates: ValidationReport,
}

/// True iff the pairing of the section against the cocycle class vanishes,
/// the degenerate locus of the inversion. Projectively well defined.
pub fn sigma_test(curve: &CurveModel, cover: &Cover, gamma: &Ffe, cocycle: &Ffe) -> Result<bool> {
    let omega = DifferentialForm::new(gamma.mul(cocycle, curve));
    Ok(residue_functional(curve, cover, &omega)?.is_zero())
}

fn check_gamma(curve: &CurveModel, pb: &ParabolicBundleData, gamma: &Ffe) -> Result<()> {
    if gamma.is_zero() {
        return Err(Error::Precondition("gamma must be nonzero".into()));
    }
    let allowance = pb
        .bundle
        .a
        .add(&canonical_divisor(curve))
        .add(&pb.marked_divisor());
    let cover = &pb.bundle.cover;
    let mut hints: Vec<_> = cover.b.iter().chain(&cover.bp).cloned().collect();
    hints.extend(pb.marked_points.iter().cloned());
    let poles = pole_divisor(curve, gamma, &hints)?;
    let mut ok = poles.add(&allowance).iter().all(|(p, m)| m >= 0 || allowance.mult(p) < 0);
    for (p, m) in allowance.iter() {
        if m < 0 && (poles.mult(p) != 0 || valuation(curve, gamma, p)? + m < 0) {
            ok = false;
        }
    }
    if !ok {
        return Err(Error::Precondition(
            "gamma is not a global section of the twisted differentials".into(),
        ));
    }
    Ok(())
}

/// Builds the unique pair (lambda, connection) with the given projections
/// and trace lambda times the line connection. Follows the four-step
/// elimination: the gamma slot is forced, the alpha slot comes from a scaled
/// residue-reference splitting which also fixes lambda, the delta slot is
/// forced by the trace, and the beta slot comes from a final splitting after
/// a global 1-form correction makes it solvable.
pub fn reconstruct(
    curve: &CurveModel,
    gamma: &Ffe,
    pb: &ParabolicBundleData,
    nu: &ExponentData,
    lc: &LineConnectionData,
    opts: ReconstructOptions,
) -> Result<ReconstructionResult> {
    let lb = &pb.bundle;
    let cover = &lb.cover;
    if nu.n() != pb.marked_points.len() {
        return Err(Error::DimensionMismatch(
            "one exponent pair per marked point".into(),
        ));
    }
    if !nu.lambda.is_one() || nu.degree != lb.a.degree() || !fuchs_check(nu) {
        return Err(Error::Precondition(
            "exponents must satisfy the unit-scale degree relation for A".into(),
        ));
    }
    let sum_minus = nu.sum_minus();
    if sum_minus.is_zero() {
        return Err(Error::UnsupportedRegime(
            "vanishing lower exponent sum; the reference class degenerates".into(),
        ));
    }
    check_gamma(curve, pb, gamma)?;
    if !v0_membership(curve, pb)? {
        return Err(Error::Precondition(
            "bundle cocycle lies outside the locus with a unique section".into(),
        ));
    }
    let k_div = canonical_divisor(curve);

    // reference forms with residues nu- at the marked points, balanced by a
    // pole hidden on the opposite chart
    let mut targets0 = vec![];
    let mut targets1 = vec![];
    for (t, (_, m)) in pb.marked_points.iter().zip(&nu.nu) {
        targets0.push((t.clone(), m.clone()));
        targets1.push((t.clone(), m.clone()));
    }
    targets0.push((cover.b[0].clone(), -sum_minus.clone()));
    targets1.push((cover.bp[0].clone(), -sum_minus.clone()));
    let alpha0_ref = prescribed_residue_form(curve, &targets0)?;
    let alpha1_ref = prescribed_residue_form(curve, &targets1)?;
    let ref_cocycle = alpha0_ref.sub(&alpha1_ref);

    // lambda is the ratio of the two functional values
    let bb = &pb.bprime.cocycle;
    let num = residue_functional(curve, cover, &DifferentialForm::new(bb.mul(gamma, curve)))?;
    let den = residue_functional(curve, cover, &DifferentialForm::new(ref_cocycle.clone()))?;
    if den.is_zero() {
        return Err(Error::Internal(
            "reference cocycle pairs to zero despite nonzero exponent sum".into(),
        ));
    }
    let lambda = &num / &den;

    // split the residue-free part of the alpha cocycle
    let q_alpha = bb.mul(gamma, curve).sub(&ref_cocycle.scale(&lambda));
    let (at0, at1) = split_cocycle(curve, cover, &k_div, &q_alpha, opts.pivots)?;
    let mut alpha0 = alpha0_ref.scale(&lambda).add(&at0);
    let mut alpha1 = alpha1_ref.scale(&lambda).add(&at1);

    // trace forces the delta slot
    let mut delta0 = lc.omega0.scale(&lambda).sub(&alpha0);
    let mut delta1 = lc.omega1.scale(&lambda).sub(&alpha1);

    // the beta cocycle, corrected by the unique global 1-form making it split
    let bp01 = bb.mul(&lb.triv1, curve);
    let c1_dbp = bp01.derivative(curve).mul(&lb.triv1.inv(curve)?, curve);
    let r01 = c1_dbp
        .scale(&lambda)
        .add(&bb.mul(&alpha0.sub(&delta1), curve))
        .neg();
    let w4 = k_div.sub(&lb.a);
    let holo = rr_space_basis(curve, &k_div)?;
    let duals = rr_space_basis(curve, &k_div.sub(&w4))?;
    let coords = |q: &Ffe| -> Result<Vec<Scalar>> {
        let mut v = vec![];
        for s in &duals {
            v.push(residue_functional(
                curve,
                cover,
                &DifferentialForm::new(q.mul(s, curve)),
            )?);
        }
        Ok(v)
    };
    let two = Scalar::from_int(2);
    let mut rows = vec![vec![Scalar::zero(); holo.len()]; duals.len()];
    for (j, wj) in holo.iter().enumerate() {
        let col = coords(&bb.mul(wj, curve).scale(&two))?;
        for (i, v) in col.into_iter().enumerate() {
            rows[i][j] = v;
        }
    }
    let rhs = coords(&r01)?;
    let order: Vec<usize> = (0..holo.len()).collect();
    let sol = solve_linear_with_order(&Matrix::from_rows(rows), &rhs, &order)?;
    let x = sol.particular.ok_or_else(|| {
        Error::Internal("the cup map against the cocycle failed to be onto".into())
    })?;
    let mut zeta = Ffe::zero();
    for (wj, c) in holo.iter().zip(&x) {
        if !c.is_zero() {
            zeta = zeta.add(&wj.scale(c));
        }
    }
    alpha0 = alpha0.add(&zeta);
    alpha1 = alpha1.add(&zeta);
    delta0 = delta0.sub(&zeta);
    delta1 = delta1.sub(&zeta);
    let r_corr = r01.sub(&bb.mul(&zeta, curve).scale(&two));
    let (bt0, bt1) = split_cocycle(curve, cover, &w4, &r_corr, opts.pivots)?;
    let beta0 = bt0.mul(&lb.triv0, curve);
    let beta1 = bt1.mul(&lb.triv1, curve);

    let gamma0 = gamma.mul(&lb.triv0.inv(curve)?, curve);
    let gamma1 = gamma.mul(&lb.triv1.inv(curve)?, curve);

    let connection = ConnectionData {
        pb: pb.clone(),
        a0: ChartMatrix { alpha: alpha0, beta: beta0, gamma: gamma0, delta: delta0 },
        a1: ChartMatrix { alpha: alpha1, beta: beta1, gamma: gamma1, delta: delta1 },
        lambda: lambda.clone(),
        exponents: nu.clone(),
    };
    let certificates = validate_connection(curve, &connection, lc)?;
    if !certificates.pass() {
        return Err(Error::Internal(format!(
            "reconstructed connection failed validation: {:?}",
            certificates.failures()
        )));
    }
    Ok(ReconstructionResult {
        lambda,
        connection,
        zeta: DifferentialForm::new(zeta),
        certificates,
    })
}

/// Inverts the projection pair: rescales the section representative so the
/// reconstruction lands at unit scale, the actual connection with those
/// projections.
pub fn invert_app_bun(
    curve: &CurveModel,
    gamma: &Ffe,
    pb: &ParabolicBundleData,
    nu: &ExponentData,
    lc: &LineConnectionData,
    opts: ReconstructOptions,
) -> Result<ReconstructionResult> {
    if sigma_test(curve, &pb.bundle.cover, gamma, &pb.bprime.cocycle)? {
        return Err(Error::SigmaLocus(
            "section pairs to zero against the cocycle".into(),
        ));
    }
    let first = reconstruct(curve, gamma, pb, nu, lc, opts)?;
    debug_assert!(!first.lambda.is_zero());
    let rescaled = gamma.scale(&first.lambda.inv());
    let out = reconstruct(curve, &rescaled, pb, nu, lc, opts)?;
    if !out.lambda.is_one() {
        return Err(Error::Internal("rescaled run did not land at unit scale".into()));
    }
    Ok(out)
}
