//! Closed points and divisors on a hyperelliptic curve `y^2 = f(x)`.
//!
//! Points are closed points over the rationals. Beyond rational affine points
//! and points at infinity we keep three orbit flavors: ramification orbits
//! (conjugate Weierstrass points above an irrational factor of `f`), split
//! orbits (a Galois orbit singled out by a branch `y = r(x) mod p`), and inert
//! fibers (the full, branch-symmetric set of points above a factor coprime to
//! `f`). A fiber of degree-1 base is the classical inert point with
//! non-square `f(x0)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::poly::Poly;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClosedPoint {
    /// Rational affine point `(x0, y0)` with `y0^2 = f(x0)`; Weierstrass iff `y0 = 0`.
    Affine { x: Scalar, y: Scalar },
    /// Point at infinity. Odd models have the single branch `0`; even models
    /// have branches `0` and `1` distinguished by the sign of `y / x^(g+1)`.
    Infinity { branch: u8 },
    /// Conjugate Weierstrass points above a monic irrational factor `p | f`.
    Ramified { p: Poly },
    /// The Galois orbit above monic `p` (coprime to `f`) picked out by the
    /// branch `y equiv r(x) mod p`, with `r^2 equiv f mod p`, `deg r < deg p`.
    Split { p: Poly, branch: Poly },
    /// All points above the monic squarefree `p` (coprime to `f`), assumed
    /// branch-symmetric; the degree counts both sheets.
    Fiber { p: Poly },
}

impl ClosedPoint {
    pub fn affine(x: Scalar, y: Scalar) -> Self {
        ClosedPoint::Affine { x, y }
    }

    pub fn infinity(branch: u8) -> Self {
        ClosedPoint::Infinity { branch }
    }

    /// Residue degree of the closed point over the rationals.
    pub fn degree(&self) -> i64 {
        match self {
            ClosedPoint::Affine { .. } | ClosedPoint::Infinity { .. } => 1,
            ClosedPoint::Ramified { p } | ClosedPoint::Split { p, .. } => {
                p.degree().expect("orbit polynomial is nonconstant") as i64
            }
            ClosedPoint::Fiber { p } => 2 * p.degree().expect("fiber polynomial is nonconstant") as i64,
        }
    }

    pub fn is_weierstrass(&self) -> bool {
        matches!(self, ClosedPoint::Affine { y, .. } if y.is_zero())
            || matches!(self, ClosedPoint::Ramified { .. })
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ClosedPoint::Infinity { .. })
    }

    /// Ramification index of the hyperelliptic double cover at this point
    /// (2 at Weierstrass points and at odd-model infinity, else 1).
    pub fn hyperelliptic_ram_index(&self, odd_model: bool) -> i64 {
        if self.is_weierstrass() {
            2
        } else if self.is_infinity() && odd_model {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for ClosedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosedPoint::Affine { x, y } => write!(f, "({x}, {y})"),
            ClosedPoint::Infinity { branch } => write!(f, "inf[{branch}]"),
            ClosedPoint::Ramified { p } => write!(f, "ram({p})"),
            ClosedPoint::Split { p, branch } => write!(f, "orbit({p}; y = {branch})"),
            ClosedPoint::Fiber { p } => write!(f, "fiber({p})"),
        }
    }
}

// serialized forms: {"x": "...", "y": "..."}, {"inf": k}, {"ram": [..]},
// {"orbit": [..], "branch": [..]}, {"fiber": [..]}
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PointRepr {
    Affine { x: Scalar, y: Scalar },
    Infinity { inf: u8 },
    Split { orbit: Poly, branch: Poly },
    Ramified { ram: Poly },
    Fiber { fiber: Poly },
}

impl Serialize for ClosedPoint {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let repr = match self.clone() {
            ClosedPoint::Affine { x, y } => PointRepr::Affine { x, y },
            ClosedPoint::Infinity { branch } => PointRepr::Infinity { inf: branch },
            ClosedPoint::Ramified { p } => PointRepr::Ramified { ram: p },
            ClosedPoint::Split { p, branch } => PointRepr::Split { orbit: p, branch },
            ClosedPoint::Fiber { p } => PointRepr::Fiber { fiber: p },
        };
        repr.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ClosedPoint {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        Ok(match PointRepr::deserialize(de)? {
            PointRepr::Affine { x, y } => ClosedPoint::Affine { x, y },
            PointRepr::Infinity { inf } => ClosedPoint::Infinity { branch: inf },
            PointRepr::Ramified { ram } => ClosedPoint::Ramified { p: ram },
            PointRepr::Split { orbit, branch } => ClosedPoint::Split { p: orbit, branch },
            PointRepr::Fiber { fiber } => ClosedPoint::Fiber { p: fiber },
        })
    }
}

/// Formal integer combination of closed points. Zero multiplicities are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Divisor {
    coeffs: BTreeMap<ClosedPoint, i64>,
}

// serialized as the entry list [[point, mult], ...] in canonical point order
impl Serialize for Divisor {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let entries: Vec<(&ClosedPoint, &i64)> = self.coeffs.iter().collect();
        entries.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Divisor {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let entries = Vec::<(ClosedPoint, i64)>::deserialize(de)?;
        Ok(Divisor::from_entries(entries))
    }
}

impl Divisor {
    pub fn zero() -> Self {
        Divisor::default()
    }

    pub fn point(p: ClosedPoint) -> Self {
        Divisor::from_entries(vec![(p, 1)])
    }

    pub fn from_entries(entries: Vec<(ClosedPoint, i64)>) -> Self {
        let mut d = Divisor::zero();
        for (p, m) in entries {
            d.add_point(p, m);
        }
        d
    }

    pub fn add_point(&mut self, p: ClosedPoint, mult: i64) {
        if mult == 0 {
            return;
        }
        let entry = self.coeffs.entry(p).or_insert(0);
        *entry += mult;
        if *entry == 0 {
            let zeroed: Vec<_> = self
                .coeffs
                .iter()
                .filter(|(_, &m)| m == 0)
                .map(|(p, _)| p.clone())
                .collect();
            for p in zeroed {
                self.coeffs.remove(&p);
            }
        }
    }

    pub fn mult(&self, p: &ClosedPoint) -> i64 {
        self.coeffs.get(p).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ClosedPoint, i64)> {
        self.coeffs.iter().map(|(p, &m)| (p, m))
    }

    pub fn support(&self) -> Vec<ClosedPoint> {
        self.coeffs.keys().cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, weighted by residue degrees of the closed points.
    pub fn degree(&self) -> i64 {
        self.iter().map(|(p, m)| m * p.degree()).sum()
    }

    pub fn is_effective(&self) -> bool {
        self.iter().all(|(_, m)| m >= 0)
    }

    pub fn neg(&self) -> Divisor {
        Divisor {
            coeffs: self.coeffs.iter().map(|(p, m)| (p.clone(), -m)).collect(),
        }
    }

    pub fn add(&self, rhs: &Divisor) -> Divisor {
        let mut out = self.clone();
        for (p, m) in rhs.iter() {
            out.add_point(p.clone(), m);
        }
        out
    }

    pub fn sub(&self, rhs: &Divisor) -> Divisor {
        self.add(&rhs.neg())
    }

    pub fn scale(&self, k: i64) -> Divisor {
        if k == 0 {
            return Divisor::zero();
        }
        Divisor {
            coeffs: self.coeffs.iter().map(|(p, m)| (p.clone(), m * k)).collect(),
        }
    }

    /// Rewrites every fiber whose base also carries a split-orbit entry as the
    /// sum of the two branches, so mixed representations compare correctly.
    pub fn normalize_fibers(&self) -> Divisor {
        let mut out = Divisor::zero();
        for (pt, m) in self.iter() {
            if let ClosedPoint::Fiber { p } = pt {
                let hint = self.coeffs.keys().find_map(|q| match q {
                    ClosedPoint::Split { p: base, branch } if base == p => Some(branch.clone()),
                    _ => None,
                });
                if let Some(branch) = hint {
                    let neg = (&Poly::zero() - &branch).rem(p);
                    out.add_point(ClosedPoint::Split { p: p.clone(), branch }, m);
                    out.add_point(ClosedPoint::Split { p: p.clone(), branch: neg }, m);
                    continue;
                }
            }
            out.add_point(pt.clone(), m);
        }
        out
    }

    /// Pointwise positive part (the polar divisor of `-self` is `self.neg().pos_part()`).
    pub fn pos_part(&self) -> Divisor {
        Divisor {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(_, &m)| m > 0)
                .map(|(p, &m)| (p.clone(), m))
                .collect(),
        }
    }

    pub fn neg_part(&self) -> Divisor {
        self.neg().pos_part()
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (p, m) in self.iter() {
            if first {
                if m == 1 {
                    write!(f, "{p}")?;
                } else {
                    write!(f, "{m}*{p}")?;
                }
                first = false;
            } else if m == 1 {
                write!(f, " + {p}")?;
            } else if m == -1 {
                write!(f, " - {p}")?;
            } else if m > 0 {
                write!(f, " + {m}*{p}")?;
            } else {
                write!(f, " - {}*{p}", -m)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: i64, y: i64) -> ClosedPoint {
        ClosedPoint::affine(Scalar::from_int(x), Scalar::from_int(y))
    }

    #[test]
    fn arithmetic_and_degree() {
        let d = Divisor::from_entries(vec![(pt(0, -1), 3), (ClosedPoint::infinity(0), -3)]);
        assert_eq!(d.degree(), 0);
        let e = d.add(&d.neg());
        assert!(e.is_zero());
        let fiber = ClosedPoint::Fiber { p: Poly::from_ints(&[1, 0, 1]) };
        assert_eq!(fiber.degree(), 4);
        let split = ClosedPoint::Split {
            p: Poly::from_ints(&[1, 0, 1]),
            branch: Poly::from_ints(&[-1]),
        };
        assert_eq!(split.degree(), 2);
    }

    #[test]
    fn zero_entries_are_dropped() {
        let mut d = Divisor::zero();
        d.add_point(pt(1, 1), 2);
        d.add_point(pt(1, 1), -2);
        assert!(d.is_zero());
        assert_eq!(d.support().len(), 0);
    }

    #[test]
    fn point_serialization() {
        let p = pt(0, -1);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"x":"0","y":"-1"}"#);
        let back: ClosedPoint = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let inf = ClosedPoint::infinity(0);
        assert_eq!(serde_json::to_string(&inf).unwrap(), r#"{"inf":0}"#);
        let split = ClosedPoint::Split {
            p: Poly::from_ints(&[1, 0, 1]),
            branch: Poly::from_ints(&[-1]),
        };
        let s2 = serde_json::to_string(&split).unwrap();
        let back2: ClosedPoint = serde_json::from_str(&s2).unwrap();
        assert_eq!(back2, split);
    }
}
