//! Function field elements `a(x) + b(x) y` and differentials `h dx`.
//!
//! Valuations at affine points and orbits reduce to polynomial divisibility
//! against a Hensel lift of the branch, so no floating precision is involved.
//! Series expansions are only consulted at infinity on even models.

use crate::curve::{inv_mod, sqrt_mod_power, trace_residues_x, refine_by, CurveModel};
use crate::divisor::{ClosedPoint, Divisor};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::scalar::Scalar;
use crate::series::Series;

/// Element `a(x) + b(x) y` of the function field of `y^2 = f(x)`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Ffe {
    pub a: RatFunc,
    pub b: RatFunc,
}

impl Ffe {
    pub fn new(a: RatFunc, b: RatFunc) -> Self {
        Ffe { a, b }
    }

    pub fn zero() -> Self {
        Ffe::new(RatFunc::zero(), RatFunc::zero())
    }

    pub fn one() -> Self {
        Ffe::new(RatFunc::one(), RatFunc::zero())
    }

    pub fn constant(c: Scalar) -> Self {
        Ffe::new(RatFunc::constant(c), RatFunc::zero())
    }

    pub fn x() -> Self {
        Ffe::new(RatFunc::x(), RatFunc::zero())
    }

    pub fn y() -> Self {
        Ffe::new(RatFunc::zero(), RatFunc::one())
    }

    pub fn from_x_part(a: RatFunc) -> Self {
        Ffe::new(a, RatFunc::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn add(&self, rhs: &Ffe) -> Ffe {
        Ffe::new(&self.a + &rhs.a, &self.b + &rhs.b)
    }

    pub fn sub(&self, rhs: &Ffe) -> Ffe {
        Ffe::new(&self.a - &rhs.a, &self.b - &rhs.b)
    }

    pub fn neg(&self) -> Ffe {
        Ffe::new(-&self.a, -&self.b)
    }

    pub fn scale(&self, c: &Scalar) -> Ffe {
        let cf = RatFunc::constant(c.clone());
        Ffe::new(&self.a * &cf, &self.b * &cf)
    }

    pub fn scale_ratfunc(&self, c: &RatFunc) -> Ffe {
        Ffe::new(&self.a * c, &self.b * c)
    }

    /// Image under the hyperelliptic involution `y -> -y`.
    pub fn conj(&self) -> Ffe {
        Ffe::new(self.a.clone(), -&self.b)
    }

    /// Norm to the rational function field: `a^2 - b^2 f`.
    pub fn norm(&self, curve: &CurveModel) -> RatFunc {
        &(&self.a * &self.a) - &(&(&self.b * &self.b) * &RatFunc::from_poly(curve.f().clone()))
    }

    pub fn mul(&self, rhs: &Ffe, curve: &CurveModel) -> Ffe {
        let f = RatFunc::from_poly(curve.f().clone());
        Ffe::new(
            &(&self.a * &rhs.a) + &(&(&self.b * &rhs.b) * &f),
            &(&self.a * &rhs.b) + &(&self.b * &rhs.a),
        )
    }

    pub fn inv(&self, curve: &CurveModel) -> Result<Ffe> {
        let n = self.norm(curve);
        if n.is_zero() {
            return Err(Error::ZeroElement("zero function field element"));
        }
        let ninv = n.inv();
        Ok(Ffe::new(&self.a * &ninv, &(-&self.b) * &ninv))
    }

    /// Derivative with respect to `x`, using `y' = f'/(2y) = f' y / (2f)`.
    pub fn derivative(&self, curve: &CurveModel) -> Ffe {
        let f = RatFunc::from_poly(curve.f().clone());
        let df = RatFunc::from_poly(curve.f().derivative());
        let half = RatFunc::constant(Scalar::ratio(1, 2));
        Ffe::new(
            self.a.derivative(),
            &self.b.derivative() + &(&(&(&self.b * &df) * &half) / &f),
        )
    }

    /// Clears denominators: returns `(pa, pb, d)` with `self = (pa + pb y)/d`,
    /// `d` monic.
    pub fn clear_denominators(&self) -> (Poly, Poly, Poly) {
        let d = self.a.den().lcm(self.b.den());
        let pa = self.a.num() * &d.div_exact(self.a.den());
        let pb = self.b.num() * &d.div_exact(self.b.den());
        (pa, pb, d)
    }

    /// Expansion in the local chart of a rational point.
    pub fn expand_at(&self, curve: &CurveModel, p: &ClosedPoint, prec: i64) -> Result<Series> {
        let chart = curve.local_chart(p, prec + 8)?;
        Ok(chart.expand(&self.a, &self.b, prec))
    }
}

impl std::fmt::Display for Ffe {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "({}) y", self.b)
        } else {
            write!(f, "{} + ({}) y", self.a, self.b)
        }
    }
}

/// Order of the pure-x function `q` at a closed point (zero orders only; the
/// infinity part is handled by the callers via degrees).
fn x_poly_order_at(q: &Poly, p: &ClosedPoint) -> i64 {
    match p {
        ClosedPoint::Affine { x, y } => {
            let lin = Poly::new(vec![-x, Scalar::one()]);
            let ord = q.factor_multiplicity(&lin) as i64;
            if y.is_zero() { 2 * ord } else { ord }
        }
        ClosedPoint::Ramified { p } => 2 * q.factor_multiplicity(p) as i64,
        ClosedPoint::Split { p, .. } | ClosedPoint::Fiber { p } => q.factor_multiplicity(p) as i64,
        ClosedPoint::Infinity { .. } => unreachable!("handled by degree bookkeeping"),
    }
}

/// Base polynomial and branch data of a point lying over a finite place.
fn branch_data(p: &ClosedPoint) -> Option<(Poly, Option<Poly>)> {
    match p {
        ClosedPoint::Affine { x, y } => {
            let lin = Poly::new(vec![-x, Scalar::one()]);
            if y.is_zero() {
                Some((lin, None))
            } else {
                Some((lin, Some(Poly::constant(y.clone()))))
            }
        }
        ClosedPoint::Ramified { p } => Some((p.clone(), None)),
        ClosedPoint::Split { p, branch } => Some((p.clone(), Some(branch.clone()))),
        ClosedPoint::Fiber { p } => Some((p.clone(), None)),
        ClosedPoint::Infinity { .. } => None,
    }
}

/// Valuation of `e` at the closed point `point`. For a `Fiber` the point is
/// assumed inert (no rational branch), where `v = min(v(a), v(b y))` is exact.
pub fn valuation(curve: &CurveModel, e: &Ffe, point: &ClosedPoint) -> Result<i64> {
    if e.is_zero() {
        return Err(Error::ZeroElement("zero function field element"));
    }
    let (pa, pb, den) = e.clear_denominators();
    let g = curve.genus() as i64;

    if let ClosedPoint::Infinity { branch } = point {
        if curve.is_odd_model() {
            let va = pa.degree().map(|d| -2 * d as i64);
            let vb = pb.degree().map(|d| -2 * d as i64 - (2 * g + 1));
            let v = [va, vb].into_iter().flatten().min().unwrap();
            return Ok(v + 2 * den.deg_or_zero() as i64);
        }
        // even model: series at the branch, with a window from the norm degree
        let vn = -(e.norm(curve).num().deg_or_zero() as i64 - e.norm(curve).den().deg_or_zero() as i64);
        let lower = [
            pa.degree().map(|d| -(d as i64)),
            pb.degree().map(|d| -(d as i64) - (g + 1)),
        ]
        .into_iter()
        .flatten()
        .min()
        .unwrap()
            - den.deg_or_zero() as i64;
        let upper = vn - lower;
        let s = e.expand_at(curve, &ClosedPoint::infinity(*branch), upper + 1)?;
        return s
            .valuation()
            .ok_or_else(|| Error::Internal("valuation window missed at infinity".into()));
    }

    let vden = x_poly_order_at(&den, point);
    let (base, branch) = branch_data(point).expect("finite point");
    let v_num = match (point, branch) {
        (ClosedPoint::Fiber { .. }, _) => {
            let oa = if pa.is_zero() { None } else { Some(pa.factor_multiplicity(&base) as i64) };
            let ob = if pb.is_zero() { None } else { Some(pb.factor_multiplicity(&base) as i64) };
            [oa, ob].into_iter().flatten().min().unwrap()
        }
        (_, None) => {
            // Weierstrass: v(y) = 1, no cancellation across parities
            let oa = if pa.is_zero() { None } else { Some(2 * pa.factor_multiplicity(&base) as i64) };
            let ob = if pb.is_zero() { None } else { Some(2 * pb.factor_multiplicity(&base) as i64 + 1) };
            [oa, ob].into_iter().flatten().min().unwrap()
        }
        (_, Some(r0)) => {
            if pb.is_zero() {
                pa.factor_multiplicity(&base) as i64
            } else {
                let n = Ffe::new(RatFunc::from_poly(pa.clone()), RatFunc::from_poly(pb.clone()))
                    .norm(curve);
                let k = n.num().factor_multiplicity(&base);
                let m = k + 1;
                let r = sqrt_mod_power(curve.f(), &base, &r0, m)?;
                let u = &pa + &(&pb * &r);
                let v = if u.is_zero() { m } else { u.factor_multiplicity(&base).min(m) };
                if v > k {
                    return Err(Error::Internal("branch valuation exceeded norm bound".into()));
                }
                v as i64
            }
        }
    };
    Ok(v_num - vden)
}

/// Differential form `h dx` with `h` in the function field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferentialForm {
    pub h: Ffe,
}

impl DifferentialForm {
    pub fn new(h: Ffe) -> Self {
        DifferentialForm { h }
    }

    pub fn zero() -> Self {
        DifferentialForm::new(Ffe::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.h.is_zero()
    }

    pub fn add(&self, rhs: &DifferentialForm) -> DifferentialForm {
        DifferentialForm::new(self.h.add(&rhs.h))
    }

    pub fn sub(&self, rhs: &DifferentialForm) -> DifferentialForm {
        DifferentialForm::new(self.h.sub(&rhs.h))
    }

    pub fn scale(&self, c: &Scalar) -> DifferentialForm {
        DifferentialForm::new(self.h.scale(c))
    }

    /// The divisor of the form, `div(h) + div(dx)`.
    pub fn divisor(&self, curve: &CurveModel) -> Result<Divisor> {
        Ok(principal_divisor(curve, &self.h)?.add(&canonical_divisor(curve)))
    }
}

/// Trace residue of `h dx` at a closed point.
///
/// At Weierstrass clusters only the x-part contributes (with the ramification
/// factor 2); at a fiber the two sheets cancel the y-part; at a split orbit the
/// branch is substituted to enough Hensel precision.
pub fn residue(curve: &CurveModel, omega: &DifferentialForm, point: &ClosedPoint) -> Result<Scalar> {
    let h = &omega.h;
    if h.is_zero() {
        return Ok(Scalar::zero());
    }
    match point {
        ClosedPoint::Infinity { .. } => {
            let mut prec = 4i64;
            loop {
                let chart = curve.local_chart(point, prec)?;
                let s = chart.expand(&h.a, &h.b, prec).mul(&chart.dx_dt);
                if s.prec() >= 0 {
                    return Ok(s.coeff(-1));
                }
                prec *= 2;
                if prec > 1 << 20 {
                    return Err(Error::Internal("runaway precision in residue at infinity".into()));
                }
            }
        }
        ClosedPoint::Affine { x, y } if y.is_zero() => {
            let lin = Poly::new(vec![-x, Scalar::one()]);
            Ok(trace_residues_x(&h.a, &lin) * Scalar::from_int(2))
        }
        ClosedPoint::Ramified { p } | ClosedPoint::Fiber { p } => {
            Ok(trace_residues_x(&h.a, p) * Scalar::from_int(2))
        }
        ClosedPoint::Affine { .. } | ClosedPoint::Split { .. } => {
            let (base, branch) = branch_data(point).unwrap();
            let r0 = branch.unwrap();
            if h.b.is_zero() {
                return Ok(trace_residues_x(&h.a, &base));
            }
            let m = h.a.den().factor_multiplicity(&base).max(h.b.den().factor_multiplicity(&base)) + 2;
            let r = sqrt_mod_power(curve.f(), &base, &r0, m)?;
            let g = &h.a + &(&h.b * &RatFunc::from_poly(r));
            Ok(trace_residues_x(&g, &base))
        }
    }
}

/// Principal divisor of a pure-x polynomial viewed on the curve.
fn divisor_of_x_poly(curve: &CurveModel, q: &Poly) -> Divisor {
    let mut div = Divisor::zero();
    let deg_q = q.deg_or_zero() as i64;
    if deg_q == 0 {
        return div;
    }
    for (p, k) in q.squarefree_decomposition() {
        let k = k as i64;
        let mut rest = p.clone();
        for (x0, _) in p.rational_roots() {
            let lin = Poly::new(vec![-&x0, Scalar::one()]);
            rest = rest.div_exact(&lin);
            let fx0 = curve.f().eval(&x0);
            if fx0.is_zero() {
                div.add_point(ClosedPoint::affine(x0, Scalar::zero()), 2 * k);
            } else if let Some(y0) = fx0.sqrt_exact() {
                div.add_point(ClosedPoint::affine(x0.clone(), y0.clone()), k);
                div.add_point(ClosedPoint::affine(x0, -y0), k);
            } else {
                div.add_point(ClosedPoint::Fiber { p: lin }, k);
            }
        }
        if rest.degree().map_or(false, |d| d > 0) {
            let pf = rest.gcd(curve.f());
            if pf.degree().map_or(false, |d| d > 0) {
                div.add_point(ClosedPoint::Ramified { p: pf.clone() }, 2 * k);
                rest = rest.div_exact(&pf).monic();
            }
            if rest.degree().map_or(false, |d| d > 0) {
                div.add_point(ClosedPoint::Fiber { p: rest }, k);
            }
        }
    }
    if curve.is_odd_model() {
        div.add_point(ClosedPoint::infinity(0), -2 * deg_q);
    } else {
        div.add_point(ClosedPoint::infinity(0), -deg_q);
        div.add_point(ClosedPoint::infinity(1), -deg_q);
    }
    div
}

/// Finite part of `div(pa + pb y)` for coprime polynomials with `pb != 0`.
fn divisor_of_primitive(curve: &CurveModel, pa: &Poly, pb: &Poly) -> Result<Divisor> {
    let mut div = Divisor::zero();
    let f = curve.f();
    let n = &(pa * pa) - &(&(pb * pb) * f);
    debug_assert!(!n.is_zero());
    for (q, k) in n.squarefree_decomposition() {
        let k = k as i64;
        let q_ram = q.gcd(f);
        let q_un = q.div_exact(&q_ram).monic();
        if q_ram.degree().map_or(false, |d| d > 0) {
            // constant vanishing orders of pa and pb on each refined part
            for (part_a, oa) in refine_by(&q_ram, pa) {
                for (part, ob) in refine_by(&part_a, pb) {
                    let va = if pa.is_zero() { i64::MAX } else { 2 * oa as i64 };
                    let vb = if pb.is_zero() { i64::MAX } else { 2 * ob as i64 + 1 };
                    let v = va.min(vb);
                    let mut rest = part.clone();
                    for (x0, _) in part.rational_roots() {
                        let lin = Poly::new(vec![-&x0, Scalar::one()]);
                        rest = rest.div_exact(&lin);
                        div.add_point(ClosedPoint::affine(x0, Scalar::zero()), v);
                    }
                    if rest.degree().map_or(false, |d| d > 0) {
                        div.add_point(ClosedPoint::Ramified { p: rest }, v);
                    }
                }
            }
        }
        if q_un.degree().map_or(false, |d| d > 0) {
            let binv = inv_mod(pb, &q_un)?;
            let r1 = (&(&(-pa) * &binv)).rem(&q_un);
            let m = k as usize + 1;
            let r = sqrt_mod_power(f, &q_un, &r1, m)?;
            let u = pa + &(pb * &r);
            for (part, vp) in refine_by(&q_un, &u) {
                let vplus = vp as i64;
                if vplus > k {
                    return Err(Error::Internal("branch order exceeded cluster multiplicity".into()));
                }
                let vminus = k - vplus;
                // peel rational roots off the part so rational points stay in
                // their canonical affine form
                let mut rest = part.clone();
                for (x0, _) in part.rational_roots() {
                    let lin = Poly::new(vec![-&x0, Scalar::one()]);
                    rest = rest.div_exact(&lin);
                    let y0 = r1.eval(&x0);
                    div.add_point(ClosedPoint::affine(x0.clone(), y0.clone()), vplus);
                    div.add_point(ClosedPoint::affine(x0, -y0), vminus);
                }
                if rest.degree().map_or(false, |d| d > 0) {
                    let rp = r1.rem(&rest);
                    div.add_point(ClosedPoint::Split { p: rest.clone(), branch: rp.clone() }, vplus);
                    let rneg = (-&rp).rem(&rest);
                    div.add_point(ClosedPoint::Split { p: rest, branch: rneg }, vminus);
                }
            }
        }
    }
    // infinity
    let g = curve.genus() as i64;
    if curve.is_odd_model() {
        let va = pa.degree().map(|d| -2 * d as i64);
        let vb = pb.degree().map(|d| -2 * d as i64 - (2 * g + 1));
        let v = [va, vb].into_iter().flatten().min().unwrap();
        div.add_point(ClosedPoint::infinity(0), v);
    } else {
        let e = Ffe::new(RatFunc::from_poly(pa.clone()), RatFunc::from_poly(pb.clone()));
        for br in 0..2u8 {
            let v = valuation(curve, &e, &ClosedPoint::infinity(br))?;
            div.add_point(ClosedPoint::infinity(br), v);
        }
    }
    Ok(div)
}

/// The divisor of zeros and poles of a nonzero function field element.
pub fn principal_divisor(curve: &CurveModel, e: &Ffe) -> Result<Divisor> {
    if e.is_zero() {
        return Err(Error::ZeroElement("zero function field element"));
    }
    let (pa, pb, den) = e.clear_denominators();
    let div = if pb.is_zero() {
        divisor_of_x_poly(curve, &pa)
    } else {
        let c = pa.gcd(&pb);
        let content = if c.degree().map_or(false, |d| d > 0) {
            divisor_of_x_poly(curve, &c)
        } else {
            Divisor::zero()
        };
        let (pa1, pb1) = if c.degree().map_or(false, |d| d > 0) {
            (pa.div_exact(&c), pb.div_exact(&c))
        } else {
            (pa, pb)
        };
        content.add(&divisor_of_primitive(curve, &pa1, &pb1)?)
    };
    let out = div.sub(&divisor_of_x_poly(curve, &den)).normalize_fibers();
    debug_assert_eq!(out.degree(), 0, "principal divisor of {e} has nonzero degree");
    Ok(out)
}

/// Negative part of `div(e)`, stored with negative multiplicities. Poles sit
/// only over the zeros of the cleared denominator and at infinity, so this
/// stays cheap on elements whose numerators have huge coefficients (where
/// `principal_divisor` would stall factoring the norm). Points in `hints`
/// are probed by direct valuation; denominator factors not under a hint fall
/// back to the generic fiber decomposition (branches of a split fiber that
/// is in no hint come out merged, which is fine for pole-bound checks).
pub fn pole_divisor(curve: &CurveModel, e: &Ffe, hints: &[ClosedPoint]) -> Result<Divisor> {
    if e.is_zero() {
        return Err(Error::ZeroElement("zero function field element"));
    }
    let (_, _, den) = e.clear_denominators();
    let mut pts: Vec<ClosedPoint> = vec![];
    let mut rest = den.monic();
    for h in hints {
        if let Some((base, _)) = branch_data(h) {
            let mut took = false;
            while rest.factor_multiplicity(&base) > 0 {
                rest = rest.div_exact(&base).monic();
                took = true;
            }
            if took {
                pts.push(h.clone());
                // the conjugate branch shares the base factor
                match h {
                    ClosedPoint::Affine { x, y } if !y.is_zero() => {
                        pts.push(ClosedPoint::affine(x.clone(), -y));
                    }
                    ClosedPoint::Split { p, branch } => {
                        let neg = (&Poly::zero() - branch).rem(p);
                        pts.push(ClosedPoint::Split { p: p.clone(), branch: neg });
                    }
                    _ => {}
                }
            }
        }
    }
    if rest.degree().map_or(false, |d| d > 0) {
        pts.extend(divisor_of_x_poly(curve, &rest).iter().map(|(p, _)| p.clone()));
    }
    pts.push(ClosedPoint::infinity(0));
    if !curve.is_odd_model() {
        pts.push(ClosedPoint::infinity(1));
    }
    let mut d = Divisor::zero();
    let mut seen: Vec<ClosedPoint> = vec![];
    for p in pts {
        if seen.contains(&p) {
            continue;
        }
        seen.push(p.clone());
        let v = valuation(curve, e, &p)?;
        if v < 0 {
            d.add_point(p, v);
        }
    }
    Ok(d)
}

/// Divisor of the differential `dx`: the Weierstrass locus minus poles at
/// infinity; its degree is `2g - 2`.
pub fn canonical_divisor(curve: &CurveModel) -> Divisor {
    let mut div = Divisor::zero();
    let mut rest = curve.f().monic();
    for (x0, _) in curve.f().rational_roots() {
        let lin = Poly::new(vec![-&x0, Scalar::one()]);
        rest = rest.div_exact(&lin);
        div.add_point(ClosedPoint::affine(x0, Scalar::zero()), 1);
    }
    if rest.degree().map_or(false, |d| d > 0) {
        div.add_point(ClosedPoint::Ramified { p: rest }, 1);
    }
    if curve.is_odd_model() {
        div.add_point(ClosedPoint::infinity(0), -3);
    } else {
        div.add_point(ClosedPoint::infinity(0), -2);
        div.add_point(ClosedPoint::infinity(1), -2);
    }
    debug_assert_eq!(div.degree(), 2 * curve.genus() as i64 - 2);
    div
}
