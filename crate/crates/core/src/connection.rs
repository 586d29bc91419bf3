//! Chart-level data of rank 2 logarithmic lambda-connections in the adapted
//! frames of the normal form, together with the trace connection on the
//! determinant line and the two projection maps.
//!
//! Differential forms are carried as function field elements h meaning h dx.
//! A section written f_k in the chart-k frame is the rational object
//! f_k * triv_k.

use crate::cech::{Cover, LineBundleData};
use crate::curve::CurveModel;
use crate::divisor::{ClosedPoint, Divisor};
use crate::error::{Error, Result};
use crate::ffe::{canonical_divisor, residue, DifferentialForm, Ffe};
use crate::linalg::{solve_linear, Matrix};
use crate::parabolic::{ExponentData, ParabolicBundleData};
use crate::rr::rr_space_basis;
use crate::scalar::Scalar;

/// Connection on the determinant line O(A), kept both as one rational form
/// (in the generic trivialization) and as the two chart frame forms.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LineConnectionData {
    pub eta: Ffe,
    pub omega0: Ffe,
    pub omega1: Ffe,
}

impl LineConnectionData {
    pub fn omega(&self, k: usize) -> &Ffe {
        if k == 0 {
            &self.omega0
        } else {
            &self.omega1
        }
    }
}

pub fn dlog(curve: &CurveModel, e: &Ffe) -> Result<Ffe> {
    Ok(e.derivative(curve).mul(&e.inv(curve)?, curve))
}

/// Builds the trace connection: a rational differential eta with simple poles
/// of residue trace_residues[i] at the marked points, residue mult_A(P) at
/// the support of A (cancelling the frame logarithmic derivatives on each
/// chart), and no other poles. The residue theorem forces the residue sums to
/// balance deg A.
pub fn build_line_connection(
    curve: &CurveModel,
    lb: &LineBundleData,
    marked: &[ClosedPoint],
    trace_residues: &[Scalar],
) -> Result<LineConnectionData> {
    if marked.len() != trace_residues.len() {
        return Err(Error::DimensionMismatch(
            "one trace residue per marked point".into(),
        ));
    }
    let mut targets: Vec<(ClosedPoint, Scalar)> = vec![];
    let mut total = Scalar::zero();
    for (t, r) in marked.iter().zip(trace_residues) {
        targets.push((t.clone(), r.clone()));
        total += r.clone();
    }
    for (p, m) in lb.a.iter() {
        targets.push((p.clone(), Scalar::from_int(m * p.degree() as i64)));
        total += Scalar::from_int(m * p.degree() as i64);
    }
    if !total.is_zero() {
        return Err(Error::Precondition(
            "trace residues violate the residue balance for deg A".into(),
        ));
    }
    let eta = prescribed_residue_form(curve, &targets)?;
    let omega0 = eta.add(&dlog(curve, &lb.triv0)?);
    let omega1 = eta.add(&dlog(curve, &lb.triv1)?);
    Ok(LineConnectionData { eta, omega0, omega1 })
}

/// Differential with simple poles of the given trace residues at the given
/// closed points and no other poles. Requires the residues to sum to zero;
/// the canonical solve makes the output deterministic.
pub fn prescribed_residue_form(
    curve: &CurveModel,
    targets: &[(ClosedPoint, Scalar)],
) -> Result<Ffe> {
    let mut pole_div = canonical_divisor(curve);
    for (p, _) in targets {
        pole_div = pole_div.add(&Divisor::point(p.clone()));
    }
    let basis = rr_space_basis(curve, &pole_div)?;
    let mut rows = vec![];
    let mut rhs = vec![];
    for (p, r) in targets {
        let mut row = vec![];
        for u in &basis {
            row.push(residue(curve, &DifferentialForm::new(u.clone()), p)?);
        }
        rows.push(row);
        rhs.push(r.clone());
    }
    let sol = solve_linear(&Matrix::from_rows(rows), &rhs)?;
    let x = sol.particular.ok_or_else(|| {
        Error::Internal("residue interpolation is solvable when residues balance".into())
    })?;
    let mut eta = Ffe::zero();
    for (u, c) in basis.iter().zip(&x) {
        if !c.is_zero() {
            eta = eta.add(&u.scale(c));
        }
    }
    Ok(eta)
}

/// The four form entries of the connection matrix on one chart, rows
/// (alpha beta; gamma delta).
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ChartMatrix {
    pub alpha: Ffe,
    pub beta: Ffe,
    pub gamma: Ffe,
    pub delta: Ffe,
}

impl ChartMatrix {
    pub fn entries(&self) -> [(&'static str, &Ffe); 4] {
        [
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("gamma", &self.gamma),
            ("delta", &self.delta),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ConnectionData {
    pub pb: ParabolicBundleData,
    pub a0: ChartMatrix,
    pub a1: ChartMatrix,
    pub lambda: Scalar,
    pub exponents: ExponentData,
}

/// One named identity check.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ValidationItem {
    pub name: String,
    pub ok: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ValidationReport {
    pub items: Vec<ValidationItem>,
}

impl ValidationReport {
    fn push(&mut self, name: impl Into<String>, ok: bool) {
        self.items.push(ValidationItem { name: name.into(), ok });
    }

    pub fn pass(&self) -> bool {
        self.items.iter().all(|i| i.ok)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.items.iter().filter(|i| !i.ok).map(|i| i.name.as_str()).collect()
    }
}

fn chart_points(cover: &Cover, k: usize) -> &[ClosedPoint] {
    if k == 0 {
        &cover.b
    } else {
        &cover.bp
    }
}

/// Entry h dx is a logarithmic form on chart k: div(h) + K + D >= 0 away
/// from the removed points of that chart.
fn log_form_on_chart(
    curve: &CurveModel,
    cover: &Cover,
    marked_div: &Divisor,
    h: &Ffe,
    k: usize,
) -> Result<bool> {
    if h.is_zero() {
        return Ok(true);
    }
    let allowed = canonical_divisor(curve).add(marked_div);
    let mut hints: Vec<_> = cover.b.iter().chain(&cover.bp).cloned().collect();
    hints.extend(marked_div.iter().map(|(p, _)| p.clone()));
    let poles = crate::ffe::pole_divisor(curve, h, &hints)?;
    for (p, m) in poles.iter() {
        if m + allowed.mult(p) < 0 && !chart_points(cover, k).contains(p) {
            return Ok(false);
        }
    }
    // points the allowance itself forbids need a zero of matching order
    for (p, m) in allowed.iter() {
        if m < 0 && poles.mult(p) == 0 && !chart_points(cover, k).contains(p)
            && crate::ffe::valuation(curve, h, p)? + m < 0
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks all the overlap identities, the residue normal form at each marked
/// point in both charts, the trace identity against the line connection, and
/// the pole bounds of every entry.
pub fn validate_connection(
    curve: &CurveModel,
    c: &ConnectionData,
    lc: &LineConnectionData,
) -> Result<ValidationReport> {
    let mut rep = ValidationReport::default();
    let lb = &c.pb.bundle;
    let cover = &lb.cover;
    let bb = &c.pb.bprime.cocycle;
    let bp01 = bb.mul(&lb.triv1, curve);
    let lam = &c.lambda;

    // overlap identity, gamma slot
    let g_glob0 = c.a0.gamma.mul(&lb.triv0, curve);
    let g_glob1 = c.a1.gamma.mul(&lb.triv1, curve);
    rep.push("overlap gamma", g_glob0.sub(&g_glob1).is_zero());

    // overlap identity, alpha slot
    let bg = bp01.mul(&c.a1.gamma, curve);
    rep.push("overlap alpha", c.a0.alpha.sub(&c.a1.alpha).sub(&bg).is_zero());

    // overlap identity, delta slot
    let c01 = lb.transition(curve)?;
    let dl = dlog(curve, &c01)?;
    let want = bg.neg().sub(&dl.scale(lam));
    rep.push("overlap delta", c.a0.delta.sub(&c.a1.delta).sub(&want).is_zero());

    // overlap identity, beta slot
    let lhs = c.a0.beta.mul(&lb.triv0.inv(curve)?, curve).sub(&c.a1.beta.mul(&lb.triv1.inv(curve)?, curve));
    let dbp = bp01.derivative(curve);
    let rhs = dbp
        .mul(&lb.triv1.inv(curve)?, curve)
        .scale(lam)
        .add(&bb.mul(&c.a0.alpha.sub(&c.a1.delta), curve))
        .neg();
    rep.push("overlap beta", lhs.sub(&rhs).is_zero());

    // residue normal form at every marked point, both charts
    for (i, t) in c.pb.marked_points.iter().enumerate() {
        let (nu_p, nu_m) = &c.exponents.nu[i];
        for (k, m) in [(0usize, &c.a0), (1usize, &c.a1)] {
            let ra = residue(curve, &DifferentialForm::new(m.alpha.clone()), t)?;
            let rb = residue(curve, &DifferentialForm::new(m.beta.clone()), t)?;
            let rd = residue(curve, &DifferentialForm::new(m.delta.clone()), t)?;
            rep.push(format!("residue alpha chart {k} point {i}"), ra == lam * nu_m);
            rep.push(format!("residue beta chart {k} point {i}"), rb.is_zero());
            rep.push(format!("residue delta chart {k} point {i}"), rd == lam * nu_p);
        }
    }

    // trace identity on both charts
    for (k, m) in [(0usize, &c.a0), (1usize, &c.a1)] {
        let tr = m.alpha.add(&m.delta);
        rep.push(format!("trace chart {k}"), tr.sub(&lc.omega(k).scale(lam)).is_zero());
    }

    // logarithmic pole bounds for every entry on its chart
    let md = c.pb.marked_divisor();
    for (k, m) in [(0usize, &c.a0), (1usize, &c.a1)] {
        for (name, h) in m.entries() {
            rep.push(
                format!("log poles {name} chart {k}"),
                log_form_on_chart(curve, cover, &md, h, k)?,
            );
        }
    }
    Ok(rep)
}

/// Residue eigenvalues at marked point i in the flag order (nu+, nu-),
/// scaled by lambda. The flag line is the second frame vector, so its
/// eigenvalue is the delta-slot residue.
pub fn local_exponents(curve: &CurveModel, c: &ConnectionData, i: usize) -> Result<(Scalar, Scalar)> {
    let t = c.pb.marked_points.get(i).ok_or_else(|| {
        Error::DimensionMismatch(format!("marked point index {i} out of range"))
    })?;
    let rb = residue(curve, &DifferentialForm::new(c.a0.beta.clone()), t)?;
    if !rb.is_zero() {
        return Err(Error::Precondition(
            "residue matrix is not lower triangular in the adapted frame".into(),
        ));
    }
    let ra = residue(curve, &DifferentialForm::new(c.a0.alpha.clone()), t)?;
    let rd = residue(curve, &DifferentialForm::new(c.a0.delta.clone()), t)?;
    Ok((rd, ra))
}

/// The apparent-singularity section: the gamma slot read off as a global
/// section of O(A) tensor the twisted differentials. Defined whenever the
/// lambda is a unit and the section is nonzero.
pub fn app_map(curve: &CurveModel, c: &ConnectionData) -> Result<Ffe> {
    if c.lambda.is_zero() {
        return Err(Error::UndefinedApp("lambda vanishes".into()));
    }
    let s = c.a0.gamma.mul(&c.pb.bundle.triv0, curve);
    if s.is_zero() {
        return Err(Error::UndefinedApp("gamma slot vanishes identically".into()));
    }
    Ok(s)
}

/// The forgetful projection onto the underlying quasi-parabolic bundle.
pub fn bun_map(c: &ConnectionData) -> ParabolicBundleData {
    c.pb.clone()
}

/// Projective equality of two nonzero sections.
pub fn projectively_equal(a: &Ffe, b: &Ffe) -> bool {
    if a.is_zero() || b.is_zero() {
        return a.is_zero() && b.is_zero();
    }
    // a = mu b for the ratio mu fixed by the first nonzero coefficient pair
    let (pa, pb_, da) = a.clear_denominators();
    let (qa, qb, db) = b.clear_denominators();
    // cross multiply: a*db vs b*da with a single scalar
    let l1 = &pa * &db;
    let l2 = &pb_ * &db;
    let r1 = &qa * &da;
    let r2 = &qb * &da;
    let mu = if !r1.is_zero() {
        match (l1.coeff(r1.deg_or_zero()), r1.leading()) {
            (n, d) => &n / &d,
        }
    } else if !r2.is_zero() {
        &l2.coeff(r2.deg_or_zero()) / &r2.leading()
    } else {
        return false;
    };
    l1 == r1.scale(&mu) && l2 == r2.scale(&mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech::Cover;
    use crate::poly::Poly;
    use crate::ratfunc::RatFunc;

    fn cstar() -> CurveModel {
        CurveModel::from_ints(&[1, -1, 0, 0, 0, 1]).unwrap()
    }

    fn pt(x: i64, y: i64) -> ClosedPoint {
        ClosedPoint::affine(Scalar::from_int(x), Scalar::from_int(y))
    }

    fn fixture(c: &CurveModel) -> LineBundleData {
        let q2 = ClosedPoint::Split {
            p: Poly::from_ints(&[1, 0, 1]),
            branch: Poly::from_ints(&[-1]),
        };
        let cover = Cover::new(
            vec![pt(0, -1)],
            vec![pt(1, -1), pt(-1, -1), q2, ClosedPoint::infinity(0)],
        );
        let yp1 = Ffe::new(RatFunc::one(), RatFunc::one());
        let i = yp1.inv(c).unwrap();
        LineBundleData {
            a: Divisor::from_entries(vec![(pt(0, -1), 3)]),
            cover,
            triv0: Ffe::one(),
            triv1: i.mul(&i, c).mul(&i, c),
        }
    }

    #[test]
    fn line_connection_residues_and_compatibility() {
        let c = cstar();
        let lb = fixture(&c);
        let t1 = pt(0, 1);
        let lc = build_line_connection(&c, &lb, &[t1.clone()], &[Scalar::from_int(-3)]).unwrap();
        let eta = DifferentialForm::new(lc.eta.clone());
        assert_eq!(residue(&c, &eta, &t1).unwrap(), Scalar::from_int(-3));
        assert_eq!(residue(&c, &eta, &pt(0, -1)).unwrap(), Scalar::from_int(3));
        // omega1 is regular at the A-point, which lives on chart 1
        let w1 = DifferentialForm::new(lc.omega1.clone());
        assert_eq!(residue(&c, &w1, &pt(0, -1)).unwrap(), Scalar::zero());
        // compatibility: omega1 - omega0 = dlog c01
        let c01 = lb.transition(&c).unwrap();
        let diff = lc.omega1.sub(&lc.omega0);
        assert!(diff.sub(&dlog(&c, &c01).unwrap()).is_zero());
        // eta has no poles away from the prescribed points
        let d = crate::ffe::principal_divisor(&c, &lc.eta)
            .unwrap()
            .add(&canonical_divisor(&c));
        for (p, m) in d.iter() {
            if m < 0 {
                assert!(
                    *p == t1 || *p == pt(0, -1),
                    "unexpected pole at {p}"
                );
                assert_eq!(m, -1);
            }
        }
    }

    #[test]
    fn line_connection_rejects_unbalanced_residues() {
        let c = cstar();
        let lb = fixture(&c);
        let err = build_line_connection(&c, &lb, &[pt(0, 1)], &[Scalar::from_int(-2)]);
        assert!(err.is_err());
    }

    #[test]
    fn two_marked_points_split_the_trace() {
        let c = cstar();
        let lb = fixture(&c);
        let ts = [pt(0, 1), pt(1, 1)];
        let rs = [Scalar::from_int(-1), Scalar::from_int(-2)];
        let lc = build_line_connection(&c, &lb, &ts, &rs).unwrap();
        let eta = DifferentialForm::new(lc.eta.clone());
        assert_eq!(residue(&c, &eta, &ts[0]).unwrap(), rs[0]);
        assert_eq!(residue(&c, &eta, &ts[1]).unwrap(), rs[1]);
    }

    #[test]
    fn projective_equality() {
        let c = cstar();
        let x = Ffe::x();
        let y = Ffe::y();
        let s = x.add(&y.scale(&Scalar::from_int(2)));
        assert!(projectively_equal(&s, &s.scale(&Scalar::ratio(-7, 3))));
        assert!(!projectively_equal(&s, &x));
        let _ = c;
    }
}
