//! Dense univariate polynomials over the rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// A polynomial in one variable, stored dense with the constant term first.
/// No trailing zero coefficients; the zero polynomial has an empty list.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `c * x^k`.
    pub fn monomial(c: Scalar, k: usize) -> Self {
        let mut coeffs = vec![Scalar::zero(); k];
        coeffs.push(c);
        Poly::new(coeffs)
    }

    pub fn x() -> Self {
        Poly::monomial(Scalar::one(), 1)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Scalar::from_int(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg_or_zero(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn leading(&self) -> Scalar {
        self.coeffs.last().cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * &Scalar::from_int(i as i64))
                .collect(),
        )
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.leading().inv())
    }

    pub fn pow(&self, mut e: usize) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Euclidean division: returns `(quotient, remainder)`.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.degree().unwrap();
        let lead_inv = d.leading().inv();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![
            Scalar::zero();
            self.coeffs.len().saturating_sub(dd)
        ];
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let q = rem.last().unwrap() * &lead_inv;
            if !q.is_zero() {
                for (i, c) in d.coeffs.iter().enumerate() {
                    let v = &rem[k + i] - &(c * &q);
                    rem[k + i] = v;
                }
            }
            quot[k] = q;
            rem.pop();
        }
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.divrem(d).1
    }

    /// Exact division; panics if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Poly {
        let (q, r) = self.divrem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Rescales by a rational so the coefficients are coprime integers with a
    /// positive leading one.
    fn primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut den = BigInt::from(1);
        for c in &self.coeffs {
            let g = num_integer::Integer::gcd(&den, c.denom());
            den = &den / g * c.denom();
        }
        let mut content = BigInt::zero();
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        for v in &ints {
            content = num_integer::Integer::gcd(&content, v);
        }
        if ints.last().unwrap().is_negative() {
            content = -content;
        }
        Poly::new(
            ints.iter()
                .map(|v| Scalar::from_big(num_rational::BigRational::from_integer(v / &content)))
                .collect(),
        )
    }

    /// `(p, c)` with `self = c * p` and `p` primitive; `c = 1` for zero.
    fn primitive_with_factor(&self) -> (Poly, Scalar) {
        if self.is_zero() {
            return (Poly::zero(), Scalar::one());
        }
        let p = self.primitive();
        let c = &self.leading() / &p.leading();
        (p, c)
    }

    /// Coefficients as coprime integers (lowest degree first).
    fn int_coeffs(&self) -> Vec<BigInt> {
        let p = self.primitive();
        p.coeffs.iter().map(|c| c.numer().clone()).collect()
    }

    /// Monic greatest common divisor; `gcd(p, 0) = monic(p)`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        let a = self.int_coeffs();
        let b = other.int_coeffs();
        if a.len() == 1 || b.len() == 1 {
            return Poly::one();
        }
        // modular gcd with CRT lifting; the inputs here routinely carry
        // coefficients with thousands of bits while the gcd itself stays
        // small, so remainder sequences over the integers are a dead end
        if let Some(g) = modular_gcd(&a, &b) {
            return g;
        }
        // every prime was unlucky; integer primitive remainder sequence
        let (mut a, mut b) = (a, b);
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_empty() {
            let r = int_prem_primitive(&a, &b);
            a = std::mem::replace(&mut b, r);
        }
        int_to_poly(&a).monic()
    }

    /// Extended gcd: returns `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn xgcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            // renormalize each remainder so coefficients stay small; the
            // cofactors pick up the inverse factor to keep Bezout exact
            let (rp, c) = r.primitive_with_factor();
            let ci = c.inv();
            r0 = std::mem::replace(&mut r1, rp);
            let s = (&s0 - &(&q * &s1)).scale(&ci);
            s0 = std::mem::replace(&mut s1, s);
            let t = (&t0 - &(&q * &t1)).scale(&ci);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (Poly::zero(), Poly::zero(), Poly::zero());
        }
        let c = r0.leading().inv();
        (r0.scale(&c), s0.scale(&c), t0.scale(&c))
    }

    pub fn lcm(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let g = self.gcd(other);
        (self * other).div_exact(&g).monic()
    }

    pub fn is_squarefree(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        self.gcd(&self.derivative()).degree() == Some(0)
    }

    /// Multiplicity of `p` as a factor of `self` (`self` nonzero).
    pub fn factor_multiplicity(&self, p: &Poly) -> usize {
        assert!(!self.is_zero() && p.degree().map_or(false, |d| d > 0));
        let mut m = 0;
        let mut cur = self.clone();
        loop {
            let (q, r) = cur.divrem(p);
            if !r.is_zero() {
                return m;
            }
            m += 1;
            cur = q;
        }
    }

    /// All rational roots with multiplicities, found via the rational root theorem.
    pub fn rational_roots(&self) -> Vec<(Scalar, usize)> {
        if self.is_zero() {
            return vec![];
        }
        // clear denominators to an integer polynomial
        let mut den = BigInt::from(1);
        for c in &self.coeffs {
            let g = num_integer::Integer::gcd(&den, c.denom());
            den = &den / g * c.denom();
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        let mut poly = ints;
        // strip powers of x
        let mut roots = vec![];
        let zero_mult = poly.iter().take_while(|c| c.is_zero()).count();
        if zero_mult > 0 {
            roots.push((Scalar::zero(), zero_mult));
            poly.drain(..zero_mult);
        }
        if poly.len() <= 1 {
            return roots;
        }
        let a0 = poly[0].abs();
        let an = poly.last().unwrap().abs();
        let mut candidates = vec![];
        for p in divisors(&a0) {
            for q in divisors(&an) {
                for sign in [1i64, -1] {
                    let r = Scalar::from_big(num_rational::BigRational::new(
                        &p * BigInt::from(sign),
                        q.clone(),
                    ));
                    if !candidates.contains(&r) {
                        candidates.push(r);
                    }
                }
            }
        }
        let self_nz = Poly::new(poly.iter().map(|c| Scalar::from_big(c.clone().into())).collect());
        for r in candidates {
            if self_nz.eval(&r).is_zero() {
                let lin = Poly::new(vec![-&r, Scalar::one()]);
                let m = self_nz.factor_multiplicity(&lin);
                roots.push((r, m));
            }
        }
        roots
    }

    /// Squarefree part `self / gcd(self, self')`, made monic.
    pub fn squarefree_part(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let g = self.gcd(&self.derivative());
        self.div_exact(&g).monic()
    }

    /// Squarefree decomposition: pairs `(p_k, k)` with `self = lc * prod p_k^k`,
    /// the `p_k` monic, squarefree, pairwise coprime (Yun's algorithm).
    pub fn squarefree_decomposition(&self) -> Vec<(Poly, usize)> {
        if self.degree().map_or(true, |d| d == 0) {
            return vec![];
        }
        let f = self.monic();
        let df = f.derivative();
        let a = f.gcd(&df);
        let mut b = f.div_exact(&a);
        let mut c = df.div_exact(&a);
        let mut out = vec![];
        let mut k = 1;
        loop {
            let d = &c - &b.derivative();
            if d.is_zero() {
                if b.degree().map_or(false, |deg| deg > 0) {
                    out.push((b.monic(), k));
                }
                break;
            }
            let p = b.gcd(&d);
            if p.degree().map_or(false, |deg| deg > 0) {
                out.push((p.clone(), k));
            }
            b = b.div_exact(&p);
            c = d.div_exact(&p);
            if b.degree() == Some(0) {
                break;
            }
            k += 1;
        }
        out
    }
}

fn int_to_poly(coeffs: &[BigInt]) -> Poly {
    Poly::new(
        coeffs
            .iter()
            .map(|v| Scalar::from_big(num_rational::BigRational::from_integer(v.clone())))
            .collect(),
    )
}

const GCD_PRIMES: [u64; 10] = [
    2147483647, 2147483629, 2147483587, 2147483579, 2147483563, 2147483549, 2147483543, 2147483497,
    2147483489, 2147483477,
];

fn mod_reduce(v: &BigInt, p: u64) -> u64 {
    use num_traits::ToPrimitive;
    num_integer::Integer::mod_floor(v, &BigInt::from(p))
        .to_u64()
        .unwrap()
}

/// Inverse mod a prime `p < 2^31`, `a` nonzero mod `p`.
fn mod_inv(a: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// Monic gcd of `a` and `b` over `F_p`; `None` when a leading coefficient
/// vanishes mod `p`.
fn gcd_mod_p(a0: &[BigInt], b0: &[BigInt], p: u64) -> Option<Vec<u64>> {
    let red = |c: &[BigInt]| c.iter().map(|x| mod_reduce(x, p)).collect::<Vec<u64>>();
    let mut a = red(a0);
    let mut b = red(b0);
    if a.last() == Some(&0) || b.last() == Some(&0) {
        return None;
    }
    while !b.is_empty() {
        let inv = mod_inv(*b.last().unwrap(), p);
        while a.len() >= b.len() {
            let shift = a.len() - b.len();
            let q = a.pop().unwrap() * inv % p;
            for (i, c) in b[..b.len() - 1].iter().enumerate() {
                a[shift + i] = (a[shift + i] + p - q * c % p) % p;
            }
            while a.last() == Some(&0) {
                a.pop();
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    let inv = mod_inv(*a.last().unwrap(), p);
    for c in a.iter_mut() {
        *c = *c * inv % p;
    }
    Some(a)
}

/// Gcd of two nonconstant integer polynomials by CRT over word-size primes.
/// Each residue gcd is normalized by `gcd(lc a, lc b)` so the lifts agree;
/// a candidate that is stable across primes and divides both inputs is the
/// answer. `None` when the prime list runs out.
fn modular_gcd(a: &[BigInt], b: &[BigInt]) -> Option<Poly> {
    let g_lc = num_integer::Integer::gcd(a.last().unwrap(), b.last().unwrap());
    let mut best = usize::MAX;
    let mut modulus = BigInt::from(1);
    let mut cand: Vec<BigInt> = vec![];
    for p in GCD_PRIMES {
        let Some(gm) = gcd_mod_p(a, b, p) else { continue };
        if gm.len() == 1 {
            return Some(Poly::one());
        }
        if gm.len() > best {
            continue;
        }
        if gm.len() < best {
            best = gm.len();
            modulus = BigInt::from(1);
        }
        let pb = BigInt::from(p);
        let scale = mod_reduce(&g_lc, p);
        let stable = if modulus == BigInt::from(1) {
            cand = gm
                .iter()
                .map(|c| symmetric(BigInt::from(c * scale % p), &pb))
                .collect();
            modulus = pb;
            false
        } else {
            let minv = mod_inv(mod_reduce(&modulus, p), p);
            let mut changed = false;
            for (v, c) in cand.iter_mut().zip(&gm) {
                let target = c * scale % p;
                let delta = (target + p - mod_reduce(v, p)) % p * minv % p;
                if delta != 0 {
                    *v += &modulus * BigInt::from(delta);
                    changed = true;
                }
            }
            modulus *= &pb;
            if changed {
                for v in cand.iter_mut() {
                    *v = symmetric(v.clone(), &modulus);
                }
            }
            !changed
        };
        if stable {
            let g = int_to_poly(&cand);
            if self_rem_is_zero(a, &g) && self_rem_is_zero(b, &g) {
                return Some(g.monic());
            }
        }
    }
    None
}

/// Representative of `v mod m` in `(-m/2, m/2]`.
fn symmetric(v: BigInt, m: &BigInt) -> BigInt {
    let mut r = num_integer::Integer::mod_floor(&v, m);
    if &r * 2 > *m {
        r -= m;
    }
    r
}

fn self_rem_is_zero(a: &[BigInt], g: &Poly) -> bool {
    int_to_poly(a).rem(g).is_zero()
}

/// Pseudo-remainder of integer polynomials, divided by its content.
/// Expects `deg a >= deg b`, `b` nonzero; lowest degree first, no leading zeros.
fn int_prem_primitive(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let lb = b.last().unwrap();
    let mut r = a.to_vec();
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let top = r.pop().unwrap();
        for v in r.iter_mut() {
            *v *= lb;
        }
        for (i, c) in b[..b.len() - 1].iter().enumerate() {
            r[shift + i] -= &top * c;
        }
        while r.last().map_or(false, Zero::is_zero) {
            r.pop();
        }
    }
    let mut content = BigInt::zero();
    for v in &r {
        content = num_integer::Integer::gcd(&content, v);
    }
    if !content.is_zero() {
        if r.last().unwrap().is_negative() {
            content = -content;
        }
        for v in r.iter_mut() {
            *v /= &content;
        }
    }
    r
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    if n.is_zero() {
        return vec![BigInt::from(1)];
    }
    let mut out = vec![];
    let mut d = BigInt::from(1);
    // trial division is fine at the scale of test coefficients
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            out.push(d.clone());
            let other = n / &d;
            if other != d {
                out.push(other);
            }
        }
        d += 1;
    }
    out
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 if c.is_one() => write!(f, "x")?,
                1 => write!(f, "{c}*x")?,
                _ if c.is_one() => write!(f, "x^{i}")?,
                _ => write!(f, "{c}*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}
impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}
impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}
impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}
impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}
impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}
impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}
impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}
