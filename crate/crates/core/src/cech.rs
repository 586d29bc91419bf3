//! Cech cohomology for the two-chart cover `U0 = C \ B'`, `U1 = C \ B`.
//!
//! Sections on `U0` may only have poles along `B`, sections on `U1` along
//! `B'`. A class in `H^1(O(W))` is represented by an overlap function; its
//! coordinates are residues against the Serre-dual space `L(K - W)`, summed
//! over `B`. Splitting a trivial class is a linear solve over monomial
//! coefficients, pinned canonically by echelon-reducing away the global
//! sections.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::curve::CurveModel;
use crate::divisor::{ClosedPoint, Divisor};
use crate::error::{Error, Result};
use crate::ffe::{canonical_divisor, residue, DifferentialForm, Ffe};
use crate::linalg::{rref_rows, solve_linear, solve_linear_with_order, Matrix};
use crate::poly::Poly;
use crate::rr::rr_space_basis;
use crate::scalar::Scalar;

/// The two point sets cut out of the curve by the charts.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Cover {
    pub b: Vec<ClosedPoint>,
    pub bp: Vec<ClosedPoint>,
}

impl Cover {
    pub fn new(b: Vec<ClosedPoint>, bp: Vec<ClosedPoint>) -> Self {
        Cover { b, bp }
    }

    pub fn validate(&self, curve: &CurveModel) -> Result<()> {
        if self.b.is_empty() || self.bp.is_empty() {
            return Err(Error::Precondition("both chart complements must be nonempty".into()));
        }
        for p in self.b.iter().chain(&self.bp) {
            curve.check_point(p)?;
        }
        for p in &self.b {
            if self.bp.contains(p) {
                return Err(Error::Precondition(format!("{p} lies in both chart complements")));
            }
        }
        Ok(())
    }

    pub fn b_divisor(&self) -> Divisor {
        Divisor::from_entries(self.b.iter().map(|p| (p.clone(), 1)).collect())
    }

    pub fn bp_divisor(&self) -> Divisor {
        Divisor::from_entries(self.bp.iter().map(|p| (p.clone(), 1)).collect())
    }
}

/// `O(A)` with explicit rational sections trivializing it on each chart.
/// `frame(k) = 1/trivk` is the transition data: a section written as `h` in
/// the chart-k frame is the rational object `h * frame(k)^-1`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LineBundleData {
    pub a: Divisor,
    pub cover: Cover,
    pub triv0: Ffe,
    pub triv1: Ffe,
}

impl LineBundleData {
    pub fn validate(&self, curve: &CurveModel) -> Result<()> {
        self.cover.validate(curve)?;
        let sides = [(&self.triv0, &self.cover.b), (&self.triv1, &self.cover.bp)];
        for (t, side) in sides {
            let d = crate::ffe::principal_divisor(curve, t)?.add(&self.a);
            for (p, m) in d.iter() {
                if m != 0 && !side.contains(p) {
                    return Err(Error::BundleMismatch(format!(
                        "trivializing section is not a unit at {p} on its chart"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The frame function for chart k, with div(frame) - A = 0 there.
    pub fn frame(&self, curve: &CurveModel, k: usize) -> Result<Ffe> {
        let t = if k == 0 { &self.triv0 } else { &self.triv1 };
        t.inv(curve)
    }

    /// Transition c01 = frame0/frame1 = triv1/triv0, a unit on the overlap.
    pub fn transition(&self, curve: &CurveModel) -> Result<Ffe> {
        Ok(self.triv1.mul(&self.triv0.inv(curve)?, curve))
    }
}

/// A class in `H^1(O(w))` carried by an overlap value together with its
/// coordinates against the canonical basis of the Serre dual.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CechOneClass {
    pub w: Divisor,
    pub cocycle: Ffe,
    pub functional: Vec<Scalar>,
}

impl CechOneClass {
    pub fn new(curve: &CurveModel, cover: &Cover, w: Divisor, cocycle: Ffe) -> Result<Self> {
        if !cocycle.is_zero() {
            let hints: Vec<_> = cover.b.iter().chain(&cover.bp).cloned().collect();
            let dq = crate::ffe::pole_divisor(curve, &cocycle, &hints)?;
            for (p, mult) in dq.iter() {
                if mult + w.mult(p) < 0 && !cover.b.contains(p) && !cover.bp.contains(p) {
                    return Err(Error::Precondition(format!(
                        "cocycle has a pole at {p} on the chart overlap"
                    )));
                }
            }
        }
        let functional = serre_coords(curve, cover, &w, &cocycle)?;
        Ok(CechOneClass { w, cocycle, functional })
    }

    pub fn is_zero_class(&self) -> bool {
        self.functional.iter().all(|c| c.is_zero())
    }

    /// The same cocycle viewed in a larger bundle `O(w')`, `w' >= w`.
    pub fn forget_twist(
        &self,
        curve: &CurveModel,
        cover: &Cover,
        w_new: Divisor,
    ) -> Result<CechOneClass> {
        if !w_new.sub(&self.w).is_effective() {
            return Err(Error::BundleMismatch(
                "forgetting a twist requires enlarging the divisor".into(),
            ));
        }
        CechOneClass::new(curve, cover, w_new, self.cocycle.clone())
    }
}

/// Cup product of a global section of `O(-w) tensor Omega^1` with a class in
/// `H^1(O(w))`, through the residue normalization of `H^1(Omega^1)`.
pub fn cup_pair(
    curve: &CurveModel,
    cover: &Cover,
    s: &Ffe,
    b: &CechOneClass,
) -> Result<Scalar> {
    let omega = DifferentialForm::new(s.mul(&b.cocycle, curve));
    residue_functional(curve, cover, &omega)
}

/// Matrix of the cup-product map `H^0(O(A)) -> H^1(O)` against a class in
/// `H^1(O(-A))`, in the canonical bases. Entry (j, i) pairs the i-th basis
/// section with the j-th Serre-dual differential.
pub fn h0_pairing_map(
    curve: &CurveModel,
    cover: &Cover,
    a: &Divisor,
    b: &CechOneClass,
) -> Result<Matrix> {
    let sections = rr_space_basis(curve, a)?;
    let mut cols = vec![];
    for u in &sections {
        cols.push(serre_coords(curve, cover, &Divisor::zero(), &u.mul(&b.cocycle, curve))?);
    }
    let nrows = cols.first().map_or(0, |c| c.len());
    let mut m = Matrix::zero(nrows, cols.len());
    for (i, col) in cols.iter().enumerate() {
        for (j, v) in col.iter().enumerate() {
            m[(j, i)] = v.clone();
        }
    }
    Ok(m)
}

/// Column pivot policy for the linear solves; a seeded shuffle witnesses that
/// canonical outputs do not depend on the elimination order.
#[derive(Clone, Copy, Debug, Default)]
pub struct PivotPolicy {
    pub shuffle_seed: Option<u64>,
}

impl PivotPolicy {
    fn order(&self, ncols: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..ncols).collect();
        if let Some(seed) = self.shuffle_seed {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            order.shuffle(&mut rng);
        }
        order
    }
}

/// Linear system `sum_i x_i cols_i = rhs` over monomial coefficients after
/// clearing denominators.
pub fn ffe_linear_system(cols: &[Ffe], rhs: &Ffe) -> (Matrix, Vec<Scalar>) {
    let mut den = Poly::one();
    for e in cols.iter().chain(std::iter::once(rhs)) {
        den = den.lcm(e.a.den()).lcm(e.b.den());
    }
    let scaled = |e: &Ffe| -> (Poly, Poly) {
        (
            e.a.num() * &den.div_exact(e.a.den()),
            e.b.num() * &den.div_exact(e.b.den()),
        )
    };
    let parts: Vec<(Poly, Poly)> = cols.iter().map(|e| scaled(e)).collect();
    let (ra, rb) = scaled(rhs);
    let da = parts
        .iter()
        .map(|(a, _)| a.deg_or_zero())
        .chain(std::iter::once(ra.deg_or_zero()))
        .max()
        .unwrap();
    let db = parts
        .iter()
        .map(|(_, b)| b.deg_or_zero())
        .chain(std::iter::once(rb.deg_or_zero()))
        .max()
        .unwrap();
    let nrows = (da + 1) + (db + 1);
    let mut m = Matrix::zero(nrows, cols.len());
    for (j, (pa, pb)) in parts.iter().enumerate() {
        for i in 0..=da {
            m[(i, j)] = pa.coeff(i);
        }
        for i in 0..=db {
            m[(da + 1 + i, j)] = pb.coeff(i);
        }
    }
    let mut rhs_vec = vec![Scalar::zero(); nrows];
    for i in 0..=da {
        rhs_vec[i] = ra.coeff(i);
    }
    for i in 0..=db {
        rhs_vec[da + 1 + i] = rb.coeff(i);
    }
    (m, rhs_vec)
}

/// Expresses `e` in the given basis, if possible.
pub fn coordinates_in_basis(basis: &[Ffe], e: &Ffe) -> Option<Vec<Scalar>> {
    let (m, rhs) = ffe_linear_system(basis, e);
    solve_linear(&m, &rhs).ok()?.particular
}

/// Sum of trace residues of `omega` over the points of `B` (the functional
/// implementing Serre duality for overlap classes).
pub fn residue_functional(curve: &CurveModel, cover: &Cover, omega: &DifferentialForm) -> Result<Scalar> {
    let mut sum = Scalar::zero();
    for p in &cover.b {
        sum += residue(curve, omega, p)?;
    }
    Ok(sum)
}

/// Coordinates of the class of the overlap function `q` in `H^1(O(W))`
/// against the canonical basis of the Serre dual `L(K - W)`.
pub fn serre_coords(curve: &CurveModel, cover: &Cover, w: &Divisor, q: &Ffe) -> Result<Vec<Scalar>> {
    let dual = rr_space_basis(curve, &canonical_divisor(curve).sub(w))?;
    let mut coords = vec![];
    for s in &dual {
        let omega = DifferentialForm::new(q.mul(s, curve));
        coords.push(residue_functional(curve, cover, &omega)?);
    }
    Ok(coords)
}

pub fn class_is_zero(curve: &CurveModel, cover: &Cover, w: &Divisor, q: &Ffe) -> Result<bool> {
    Ok(serre_coords(curve, cover, w, q)?.iter().all(|c| c.is_zero()))
}

/// Overlap representatives of a basis of `H^1(O(W))`, normalized so that the
/// residue coordinate matrix against `L(K - W)` is the identity.
pub fn h1_basis(curve: &CurveModel, cover: &Cover, w: &Divisor) -> Result<Vec<Ffe>> {
    let dual = rr_space_basis(curve, &canonical_divisor(curve).sub(w))?;
    let h = dual.len();
    if h == 0 {
        return Ok(vec![]);
    }
    // pole allowances at the cover points start at w(P)^+ + m so negative
    // twists do not starve the candidate space of honest classes
    let mut offset = Divisor::zero();
    for p in cover.b.iter().chain(&cover.bp) {
        offset = offset.add(&Divisor::point(p.clone()).scale(1 + (-w.mult(p)).max(0)));
    }
    let base = w.add(&offset);
    let both = cover.b_divisor().add(&cover.bp_divisor());
    let mut m = 0i64;
    let cap = 4 * curve.genus() as i64 + 8;
    while m <= cap {
        let cands = rr_space_basis(curve, &base.add(&both.scale(m)))?;
        let mut rows = vec![];
        for s in &dual {
            let mut row = vec![];
            for q in &cands {
                let omega = DifferentialForm::new(q.mul(s, curve));
                row.push(residue_functional(curve, cover, &omega)?);
            }
            rows.push(row);
        }
        let coord = Matrix::from_rows(rows);
        if coord.rank() == h {
            let mut basis = vec![];
            for j in 0..h {
                let mut e = vec![Scalar::zero(); h];
                e[j] = Scalar::one();
                let sol = solve_linear(&coord, &e)?;
                let x = sol.particular.ok_or_else(|| {
                    Error::Internal("full-rank coordinate matrix failed to solve".into())
                })?;
                let mut q = Ffe::zero();
                for (i, c) in x.iter().enumerate() {
                    if !c.is_zero() {
                        q = q.add(&cands[i].scale(c));
                    }
                }
                basis.push(q);
            }
            return Ok(basis);
        }
        m += 1;
    }
    Err(Error::Internal("overlap candidates never reached full H^1 rank".into()))
}

/// Splits a cohomologically trivial overlap function: returns `(g0, g1)` with
/// `q = g0 - g1`, `g0` with poles only along `B` (plus the twist), `g1` only
/// along `B'`. The representative is pinned by reducing `g0` modulo the global
/// sections `L(W)`, so it is independent of pivot order.
pub fn split_cocycle(
    curve: &CurveModel,
    cover: &Cover,
    w: &Divisor,
    q: &Ffe,
    pivots: PivotPolicy,
) -> Result<(Ffe, Ffe)> {
    if q.is_zero() {
        return Ok((Ffe::zero(), Ffe::zero()));
    }
    if !class_is_zero(curve, cover, w, q)? {
        return Err(Error::Precondition(
            "cocycle class is nonzero; it does not split".into(),
        ));
    }
    let hints: Vec<_> = cover.b.iter().chain(&cover.bp).cloned().collect();
    let dq = crate::ffe::pole_divisor(curve, q, &hints)?;
    let mut d0 = w.clone();
    let mut d1 = w.clone();
    for (p, mult) in dq.iter() {
        let excess = -(mult + w.mult(p));
        if excess <= 0 {
            continue;
        }
        if cover.b.contains(p) {
            d0 = d0.add(&Divisor::point(p.clone()).scale(excess));
        } else if cover.bp.contains(p) {
            d1 = d1.add(&Divisor::point(p.clone()).scale(excess));
        } else {
            return Err(Error::Precondition(format!(
                "cocycle has a pole at {p} on the chart overlap"
            )));
        }
    }
    for slack in 0..=(2 * curve.genus() as i64 + 2) {
        let s0 = rr_space_basis(curve, &d0.add(&cover.b_divisor().scale(slack)))?;
        let s1 = rr_space_basis(curve, &d1.add(&cover.bp_divisor().scale(slack)))?;
        let n0 = s0.len();
        let mut cols: Vec<Ffe> = s0.clone();
        cols.extend(s1.iter().map(|e| e.neg()));
        let (mat, rhs) = ffe_linear_system(&cols, q);
        let sol = solve_linear_with_order(&mat, &rhs, &pivots.order(cols.len()))?;
        if let Some(x) = sol.particular {
            let combine = |basis: &[Ffe], coeffs: &[Scalar]| {
                let mut e = Ffe::zero();
                for (b, c) in basis.iter().zip(coeffs) {
                    if !c.is_zero() {
                        e = e.add(&b.scale(c));
                    }
                }
                e
            };
            let g0 = combine(&s0, &x[..n0]);
            let g1 = combine(&s1, &x[n0..]);
            // canonical pinning: remove the global-section component of g0
            let glob = rr_space_basis(curve, w)?;
            let (g0, g1) = if glob.is_empty() {
                (g0, g1)
            } else {
                let mut grows = vec![];
                for ge in &glob {
                    let coords = coordinates_in_basis(&s0, ge).ok_or_else(|| {
                        Error::Internal("global section missing from chart space".into())
                    })?;
                    grows.push(coords);
                }
                let (reduced, pcols) = rref_rows(grows);
                let mut x0: Vec<Scalar> = x[..n0].to_vec();
                let mut corr = Ffe::zero();
                for (row, &pc) in reduced.iter().zip(&pcols) {
                    let c = x0[pc].clone();
                    if c.is_zero() {
                        continue;
                    }
                    for (i, r) in row.iter().enumerate() {
                        x0[i] = &x0[i] - &(&c * r);
                    }
                    corr = corr.add(&combine(&s0, row).scale(&c));
                }
                (combine(&s0, &x0), g1.sub(&corr))
            };
            debug_assert!(g0.sub(&g1).sub(q).is_zero(), "split identity failed");
            return Ok((g0, g1));
        }
    }
    Err(Error::Internal("cocycle split solve stayed inconsistent".into()))
}

#[cfg(test)]
mod tests {
    use crate::ratfunc::RatFunc;
    use super::*;

    fn cstar() -> CurveModel {
        CurveModel::from_ints(&[1, -1, 0, 0, 0, 1]).unwrap()
    }

    fn pt(x: i64, y: i64) -> ClosedPoint {
        ClosedPoint::affine(Scalar::from_int(x), Scalar::from_int(y))
    }

    fn std_cover() -> Cover {
        let q2 = ClosedPoint::Split {
            p: Poly::from_ints(&[1, 0, 1]),
            branch: Poly::from_ints(&[-1]),
        };
        Cover::new(
            vec![pt(0, -1)],
            vec![pt(1, -1), pt(-1, -1), q2, ClosedPoint::infinity(0)],
        )
    }

    #[test]
    fn cover_is_valid() {
        std_cover().validate(&cstar()).unwrap();
    }

    #[test]
    fn coboundaries_have_zero_class() {
        let c = cstar();
        let cover = std_cover();
        // a chart-0 section: poles at B only
        let d0 = cover.b_divisor().scale(4);
        for e in rr_space_basis(&c, &d0).unwrap() {
            assert!(class_is_zero(&c, &cover, &Divisor::zero(), &e).unwrap());
        }
        // a chart-1 section: poles at B' only
        let d1 = cover.bp_divisor().scale(3);
        for e in rr_space_basis(&c, &d1).unwrap() {
            assert!(class_is_zero(&c, &cover, &Divisor::zero(), &e).unwrap());
        }
    }

    #[test]
    fn h1_of_structure_sheaf() {
        let c = cstar();
        let cover = std_cover();
        let basis = h1_basis(&c, &cover, &Divisor::zero()).unwrap();
        assert_eq!(basis.len(), 2);
        // coordinates come out as the identity by construction
        for (j, q) in basis.iter().enumerate() {
            let coords = serre_coords(&c, &cover, &Divisor::zero(), q).unwrap();
            for (i, co) in coords.iter().enumerate() {
                let want = if i == j { Scalar::one() } else { Scalar::zero() };
                assert_eq!(*co, want);
            }
        }
    }

    #[test]
    fn split_recovers_cocycle() {
        let c = cstar();
        let cover = std_cover();
        let w = Divisor::zero();
        // q = u0 - u1 splits by construction
        let u0 = &rr_space_basis(&c, &cover.b_divisor().scale(4)).unwrap()[1];
        let u1 = &rr_space_basis(&c, &cover.bp_divisor().scale(2)).unwrap()[1];
        let q = u0.sub(u1);
        let (g0, g1) = split_cocycle(&c, &cover, &w, &q, PivotPolicy::default()).unwrap();
        assert_eq!(g0.sub(&g1), q);
        // the parts only have poles on their own side
        let d0 = crate::ffe::principal_divisor(&c, &g0).unwrap();
        for (p, m) in d0.iter() {
            if m < 0 {
                assert!(cover.b.contains(p), "g0 pole at {p}");
            }
        }
        let d1 = crate::ffe::principal_divisor(&c, &g1).unwrap();
        for (p, m) in d1.iter() {
            if m < 0 {
                assert!(cover.bp.contains(p), "g1 pole at {p}");
            }
        }
    }

    #[test]
    fn split_is_pivot_invariant() {
        let c = cstar();
        let cover = std_cover();
        let w = Divisor::from_entries(vec![(pt(0, -1), 1)]);
        let u0 = &rr_space_basis(&c, &cover.b_divisor().scale(3)).unwrap()[1];
        let u1 = &rr_space_basis(&c, &cover.bp_divisor().scale(2)).unwrap()[0];
        let q = u0.sub(u1);
        let base = split_cocycle(&c, &cover, &w, &q, PivotPolicy::default()).unwrap();
        for seed in 0..4u64 {
            let alt = split_cocycle(&c, &cover, &w, &q, PivotPolicy { shuffle_seed: Some(seed) }).unwrap();
            assert_eq!(alt, base, "seed {seed}");
        }
    }

    fn std_bundle(c: &CurveModel) -> LineBundleData {
        // div(y+1) = (0,-1) + (1,-1) + (-1,-1) + [x^2+1, y=-1] - 5*inf
        let a = Divisor::from_entries(vec![(pt(0, -1), 3)]);
        let yp1 = Ffe::new(RatFunc::one(), RatFunc::one());
        let i = yp1.inv(c).unwrap();
        let triv1 = i.mul(&i, c).mul(&i, c);
        LineBundleData {
            a,
            cover: std_cover(),
            triv0: Ffe::one(),
            triv1,
        }
    }

    #[test]
    fn bundle_fixture_validates() {
        let c = cstar();
        let lb = std_bundle(&c);
        lb.validate(&c).unwrap();
        // transition is a unit off B and B'
        let d = crate::ffe::principal_divisor(&c, &lb.transition(&c).unwrap()).unwrap();
        for (p, m) in d.iter() {
            if m != 0 {
                assert!(lb.cover.b.contains(p) || lb.cover.bp.contains(p));
            }
        }
    }

    #[test]
    fn cup_pair_kills_coboundaries() {
        let c = cstar();
        let cover = std_cover();
        let lb = std_bundle(&c);
        let minus_a = lb.a.neg();
        // sections of O(A) tensor Omega^1 pair against H^1(O(-A))
        let duals = rr_space_basis(&c, &lb.a.add(&canonical_divisor(&c))).unwrap();
        assert_eq!(duals.len(), 4);
        let cob = rr_space_basis(&c, &minus_a.add(&cover.b_divisor().scale(5))).unwrap();
        for e in &cob {
            let b = CechOneClass::new(&c, &cover, minus_a.clone(), e.clone()).unwrap();
            assert!(b.is_zero_class());
            for s in &duals {
                assert!(cup_pair(&c, &cover, s, &b).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn generic_pairing_map_is_invertible() {
        let c = cstar();
        let cover = std_cover();
        let lb = std_bundle(&c);
        let minus_a = lb.a.neg();
        let reps = h1_basis(&c, &cover, &minus_a).unwrap();
        assert_eq!(reps.len(), 4);
        let mut q = Ffe::zero();
        for (i, r) in reps.iter().enumerate() {
            q = q.add(&r.scale(&Scalar::from_int(i as i64 + 1)));
        }
        let b = CechOneClass::new(&c, &cover, minus_a, q).unwrap();
        let m = h0_pairing_map(&c, &cover, &lb.a, &b).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (2, 2));
        assert!(m.is_invertible());
        let zero = CechOneClass::new(&c, &cover, lb.a.neg(), Ffe::zero()).unwrap();
        assert!(!h0_pairing_map(&c, &cover, &lb.a, &zero).unwrap().is_invertible());
    }

    #[test]
    fn nonzero_class_refuses_to_split() {
        let c = cstar();
        let cover = std_cover();
        let basis = h1_basis(&c, &cover, &Divisor::zero()).unwrap();
        let err = split_cocycle(&c, &cover, &Divisor::zero(), &basis[0], PivotPolicy::default());
        assert!(err.is_err());
    }
}
