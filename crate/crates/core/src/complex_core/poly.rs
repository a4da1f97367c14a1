//! Multivariate polynomials with complex coefficients in Wirtinger variables.
//!
//! Every variable, including the conjugate ones, is an independent symbol, so
//! `derivative` is the formal partial derivative of Wirtinger calculus.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Variable families. The order here is the variable order used for the
/// graded lexicographic term order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    /// Holomorphic target variables z^a.
    Z,
    /// Conjugates of the z's.
    ZBar,
    /// Twistor coordinates w^i (only used by general systems, no conjugate).
    W,
    /// Domain coordinates q^i.
    Q,
    /// Conjugated domain coordinates.
    QBar,
}

impl VarKind {
    fn prefix(self) -> &'static str {
        match self {
            VarKind::Z => "z",
            VarKind::ZBar => "zb",
            VarKind::W => "w",
            VarKind::Q => "q",
            VarKind::QBar => "qb",
        }
    }
}

/// A variable id. `index` is zero based; names are one based (`q1` is `Var::q(0)`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub kind: VarKind,
    pub index: usize,
}

impl Var {
    pub const fn new(kind: VarKind, index: usize) -> Self {
        Var { kind, index }
    }
    pub const fn z(index: usize) -> Self {
        Var::new(VarKind::Z, index)
    }
    pub const fn zbar(index: usize) -> Self {
        Var::new(VarKind::ZBar, index)
    }
    pub const fn w(index: usize) -> Self {
        Var::new(VarKind::W, index)
    }
    pub const fn q(index: usize) -> Self {
        Var::new(VarKind::Q, index)
    }
    pub const fn qbar(index: usize) -> Self {
        Var::new(VarKind::QBar, index)
    }

    pub fn conjugate(self) -> Option<Var> {
        let kind = match self.kind {
            VarKind::Z => VarKind::ZBar,
            VarKind::ZBar => VarKind::Z,
            VarKind::Q => VarKind::QBar,
            VarKind::QBar => VarKind::Q,
            VarKind::W => return None,
        };
        Some(Var::new(kind, self.index))
    }

    pub fn is_conjugate(self) -> bool {
        matches!(self.kind, VarKind::ZBar | VarKind::QBar)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.prefix(), self.index + 1)
    }
}

impl FromStr for Var {
    type Err = Error;

    fn from_str(s: &str) -> Result<Var> {
        let split = s
            .find(|c: char| c.is_ascii_digit())
            .ok_or_else(|| Error::BadVariableName(s.to_string()))?;
        let (prefix, digits) = s.split_at(split);
        let kind = match prefix {
            "z" => VarKind::Z,
            "zb" => VarKind::ZBar,
            "w" => VarKind::W,
            "q" => VarKind::Q,
            "qb" => VarKind::QBar,
            _ => return Err(Error::BadVariableName(s.to_string())),
        };
        let n: usize = digits
            .parse()
            .map_err(|_| Error::BadVariableName(s.to_string()))?;
        if n == 0 {
            return Err(Error::BadVariableName(s.to_string()));
        }
        Ok(Var::new(kind, n - 1))
    }
}

/// Sorted `(variable, exponent)` pairs with no zero exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_pairs<I: IntoIterator<Item = (Var, u32)>>(pairs: I) -> Self {
        let mut acc: BTreeMap<Var, u32> = BTreeMap::new();
        for (v, e) in pairs {
            *acc.entry(v).or_insert(0) += e;
        }
        Monomial(acc.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(&v))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn pairs(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i], other.0[j]);
            match a.0.cmp(&b.0) {
                Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `(e, m / v)` where `e` is the exponent of `v`, or `None` if `v` is absent.
    fn lower(&self, v: Var) -> Option<(u32, Monomial)> {
        let pos = self.0.iter().position(|&(w, _)| w == v)?;
        let e = self.0[pos].1;
        let mut rest = self.0.clone();
        if e == 1 {
            rest.remove(pos);
        } else {
            rest[pos].1 -= 1;
        }
        Some((e, Monomial(rest)))
    }

    fn map_vars(&self, f: impl Fn(Var) -> Var) -> Monomial {
        Monomial::from_pairs(self.0.iter().map(|&(v, e)| (f(v), e)))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic order.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.0.iter().zip(&other.0) {
            if a.0 != b.0 {
                // the monomial carrying the earlier variable is lexicographically larger
                return if a.0 < b.0 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                };
            }
            if a.1 != b.1 {
                return a.1.cmp(&b.1);
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (n, (v, e)) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Anything that can supply values for variables.
pub trait VarSource {
    fn value(&self, v: Var) -> Option<C64>;
}

impl VarSource for BTreeMap<Var, C64> {
    fn value(&self, v: Var) -> Option<C64> {
        self.get(&v).copied()
    }
}

impl VarSource for HashMap<Var, C64> {
    fn value(&self, v: Var) -> Option<C64> {
        self.get(&v).copied()
    }
}

/// A point `(q, z, w)`; conjugate variables are read off as conjugates.
#[derive(Clone, Copy, Debug, Default)]
pub struct QzPoint<'a> {
    pub q: &'a [C64],
    pub z: &'a [C64],
    pub w: &'a [C64],
}

impl<'a> QzPoint<'a> {
    pub fn new(q: &'a [C64], z: &'a [C64]) -> Self {
        QzPoint { q, z, w: &[] }
    }
    pub fn q_only(q: &'a [C64]) -> Self {
        QzPoint { q, z: &[], w: &[] }
    }
    pub fn z_only(z: &'a [C64]) -> Self {
        QzPoint { q: &[], z, w: &[] }
    }
}

impl VarSource for QzPoint<'_> {
    fn value(&self, v: Var) -> Option<C64> {
        match v.kind {
            VarKind::Z => self.z.get(v.index).copied(),
            VarKind::ZBar => self.z.get(v.index).map(|c| c.conj()),
            VarKind::W => self.w.get(v.index).copied(),
            VarKind::Q => self.q.get(v.index).copied(),
            VarKind::QBar => self.q.get(v.index).map(|c| c.conj()),
        }
    }
}

/// Polynomial over C in a declared set of variables.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyRepr", into = "PolyRepr")]
pub struct ComplexPoly {
    vars: BTreeSet<Var>,
    terms: BTreeMap<Monomial, C64>,
}

impl ComplexPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C64) -> Self {
        let mut p = Self::zero();
        if c != C64::new(0.0, 0.0) {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn real(x: f64) -> Self {
        Self::constant(C64::new(x, 0.0))
    }

    pub fn var(v: Var) -> Self {
        let mut p = Self::zero();
        p.vars.insert(v);
        p.terms.insert(Monomial::var(v), C64::new(1.0, 0.0));
        p
    }

    pub fn z(i: usize) -> Self {
        Self::var(Var::z(i))
    }
    pub fn q(i: usize) -> Self {
        Self::var(Var::q(i))
    }
    pub fn qbar(i: usize) -> Self {
        Self::var(Var::qbar(i))
    }
    pub fn w(i: usize) -> Self {
        Self::var(Var::w(i))
    }

    /// Builds a polynomial from terms; repeated monomials are summed.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, C64)>>(terms: I) -> Result<Self> {
        let mut p = Self::zero();
        for (mono, c) in terms {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::NonFiniteCoefficient);
            }
            p.vars.extend(mono.0.iter().map(|&(v, _)| v));
            *p.terms.entry(mono).or_insert(C64::new(0.0, 0.0)) += c;
        }
        p.prune();
        Ok(p)
    }

    /// Adds variables to the declared set without changing the value.
    pub fn declare<I: IntoIterator<Item = Var>>(mut self, vars: I) -> Self {
        self.vars.extend(vars);
        self
    }

    pub fn declared_vars(&self) -> &BTreeSet<Var> {
        &self.vars
    }

    /// Variables that actually occur in some term.
    pub fn support(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|&(v, _)| v))
            .collect()
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Terms with the leading (largest) monomial first.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C64)> {
        self.terms.iter().rev()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> C64 {
        self.terms.get(m).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// No conjugate variables occur.
    pub fn is_holomorphic(&self) -> bool {
        self.support().iter().all(|v| !v.is_conjugate())
    }

    /// True when every variable that occurs satisfies `pred`.
    pub fn only_uses(&self, pred: impl Fn(Var) -> bool) -> bool {
        self.support().into_iter().all(pred)
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| *c != C64::new(0.0, 0.0));
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut p = self.clone();
        for v in p.terms.values_mut() {
            *v *= c;
        }
        p.prune();
        p
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::real(1.0).declare(self.vars.iter().copied());
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative; zero if `v` does not occur.
    pub fn derivative(&self, v: Var) -> Self {
        let mut out = ComplexPoly {
            vars: self.vars.clone(),
            terms: BTreeMap::new(),
        };
        for (m, c) in &self.terms {
            if let Some((e, rest)) = m.lower(v) {
                *out.terms.entry(rest).or_insert(C64::new(0.0, 0.0)) += c * e as f64;
            }
        }
        out.prune();
        out
    }

    /// Derivative with respect to a declared variable.
    pub fn wirtinger_derive(&self, v: Var) -> Result<Self> {
        if !self.vars.contains(&v) {
            return Err(Error::UnknownVariable(v.to_string()));
        }
        Ok(self.derivative(v))
    }

    /// Conjugate polynomial: coefficients conjugated, every variable swapped
    /// with its conjugate.
    pub fn conjugate(&self) -> Result<Self> {
        let mut vars = BTreeSet::new();
        for v in &self.vars {
            vars.insert(
                v.conjugate()
                    .ok_or_else(|| Error::MissingConjugateDeclaration(v.to_string()))?,
            );
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.map_vars(|v| v.conjugate().unwrap()), c.conj()))
            .collect();
        Ok(ComplexPoly { vars, terms })
    }

    pub fn eval(&self, src: &impl VarSource) -> Result<C64> {
        let mut cache: Vec<(Var, C64)> = Vec::new();
        let mut total = C64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = *c;
            for &(v, e) in &m.0 {
                let x = match cache.iter().find(|(w, _)| *w == v) {
                    Some(&(_, x)) => x,
                    None => {
                        let x = src
                            .value(v)
                            .ok_or_else(|| Error::MissingVariable(v.to_string()))?;
                        cache.push((v, x));
                        x
                    }
                };
                t *= if e == 1 { x } else { x.powu(e) };
            }
            total += t;
        }
        Ok(total)
    }

    /// Replaces the given variables by polynomials.
    pub fn substitute(&self, map: &BTreeMap<Var, ComplexPoly>) -> Self {
        let mut vars: BTreeSet<Var> = self
            .vars
            .iter()
            .filter(|v| !map.contains_key(v))
            .copied()
            .collect();
        for (v, p) in map {
            if self.vars.contains(v) {
                vars.extend(p.vars.iter().copied());
            }
        }
        let mut out = ComplexPoly {
            vars,
            terms: BTreeMap::new(),
        };
        for (m, c) in &self.terms {
            let mut kept = Vec::new();
            let mut factor = ComplexPoly::constant(*c);
            for &(v, e) in &m.0 {
                match map.get(&v) {
                    Some(p) => factor = &factor * &p.pow(e),
                    None => kept.push((v, e)),
                }
            }
            for (km, kc) in factor.terms {
                let mono = km.mul(&Monomial(kept.clone()));
                *out.terms.entry(mono).or_insert(C64::new(0.0, 0.0)) += kc;
            }
        }
        out.prune();
        out
    }

    /// Renames variables (e.g. z -> q). The map must be injective on the
    /// declared set.
    pub fn rename(&self, f: impl Fn(Var) -> Var) -> Self {
        ComplexPoly {
            vars: self.vars.iter().map(|&v| f(v)).collect(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.map_vars(&f), *c))
                .collect(),
        }
    }
}

impl fmt::Display for ComplexPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let coef = if c.im == 0.0 {
                format!("{}", c.re)
            } else {
                format!("({}{:+}i)", c.re, c.im)
            };
            if m.is_one() {
                write!(f, "{coef}")?;
            } else if *c == C64::new(1.0, 0.0) {
                write!(f, "{m}")?;
            } else {
                write!(f, "{coef}*{m}")?;
            }
        }
        Ok(())
    }
}

fn add_polys(a: &ComplexPoly, b: &ComplexPoly, sign: f64) -> ComplexPoly {
    let mut out = a.clone();
    out.vars.extend(b.vars.iter().copied());
    for (m, c) in &b.terms {
        *out.terms.entry(m.clone()).or_insert(C64::new(0.0, 0.0)) += c * sign;
    }
    out.prune();
    out
}

fn mul_polys(a: &ComplexPoly, b: &ComplexPoly) -> ComplexPoly {
    let mut out = ComplexPoly {
        vars: a.vars.union(&b.vars).copied().collect(),
        terms: BTreeMap::new(),
    };
    for (ma, ca) in &a.terms {
        for (mb, cb) in &b.terms {
            *out.terms.entry(ma.mul(mb)).or_insert(C64::new(0.0, 0.0)) += ca * cb;
        }
    }
    out.prune();
    out
}

macro_rules! poly_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&ComplexPoly> for &ComplexPoly {
            type Output = ComplexPoly;
            fn $method(self, rhs: &ComplexPoly) -> ComplexPoly {
                $body(self, rhs)
            }
        }
        impl $tr<ComplexPoly> for ComplexPoly {
            type Output = ComplexPoly;
            fn $method(self, rhs: ComplexPoly) -> ComplexPoly {
                $body(&self, &rhs)
            }
        }
        impl $tr<&ComplexPoly> for ComplexPoly {
            type Output = ComplexPoly;
            fn $method(self, rhs: &ComplexPoly) -> ComplexPoly {
                $body(&self, rhs)
            }
        }
        impl $tr<ComplexPoly> for &ComplexPoly {
            type Output = ComplexPoly;
            fn $method(self, rhs: ComplexPoly) -> ComplexPoly {
                $body(self, &rhs)
            }
        }
    };
}

poly_binop!(Add, add, |a, b| add_polys(a, b, 1.0));
poly_binop!(Sub, sub, |a, b| add_polys(a, b, -1.0));
poly_binop!(Mul, mul, mul_polys);

impl Neg for ComplexPoly {
    type Output = ComplexPoly;
    fn neg(self) -> ComplexPoly {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Neg for &ComplexPoly {
    type Output = ComplexPoly;
    fn neg(self) -> ComplexPoly {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul<ComplexPoly> for f64 {
    type Output = ComplexPoly;
    fn mul(self, rhs: ComplexPoly) -> ComplexPoly {
        rhs.scale(C64::new(self, 0.0))
    }
}

impl Mul<ComplexPoly> for C64 {
    type Output = ComplexPoly;
    fn mul(self, rhs: ComplexPoly) -> ComplexPoly {
        rhs.scale(self)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct PolyRepr {
    vars: Vec<String>,
    terms: Vec<TermRepr>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct TermRepr {
    exp: Vec<u32>,
    coef: [f64; 2],
}

impl From<ComplexPoly> for PolyRepr {
    fn from(p: ComplexPoly) -> Self {
        let vars: Vec<Var> = p.vars.iter().copied().collect();
        let terms = p
            .terms()
            .map(|(m, c)| TermRepr {
                exp: vars.iter().map(|&v| m.exponent(v)).collect(),
                coef: [c.re, c.im],
            })
            .collect();
        PolyRepr {
            vars: vars.iter().map(Var::to_string).collect(),
            terms,
        }
    }
}

impl TryFrom<PolyRepr> for ComplexPoly {
    type Error = Error;

    fn try_from(r: PolyRepr) -> Result<Self> {
        let vars: Vec<Var> = r
            .vars
            .iter()
            .map(|s| s.parse())
            .collect::<Result<_>>()?;
        let declared: BTreeSet<Var> = vars.iter().copied().collect();
        if declared.len() != vars.len() {
            return Err(Error::Parse("repeated variable in \"vars\"".into()));
        }
        let mut terms = Vec::with_capacity(r.terms.len());
        for t in r.terms {
            if t.exp.len() != vars.len() {
                return Err(Error::Parse(format!(
                    "exponent array has length {}, expected {}",
                    t.exp.len(),
                    vars.len()
                )));
            }
            let mono = Monomial::from_pairs(vars.iter().copied().zip(t.exp));
            terms.push((mono, C64::new(t.coef[0], t.coef[1])));
        }
        Ok(ComplexPoly::from_terms(terms)?.declare(declared))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eval_product() {
        let p = ComplexPoly::q(0) * ComplexPoly::qbar(1);
        let mut a = BTreeMap::new();
        a.insert(Var::q(0), c(1.0, 1.0));
        a.insert(Var::qbar(1), c(2.0, 0.0));
        assert_eq!(p.eval(&a).unwrap(), c(2.0, 2.0));
        assert_eq!(ComplexPoly::zero().eval(&a).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn missing_variable() {
        let p = ComplexPoly::q(0) * ComplexPoly::q(2);
        let mut a = BTreeMap::new();
        a.insert(Var::q(0), c(1.0, 0.0));
        assert_eq!(p.eval(&a), Err(Error::MissingVariable("q3".into())));
    }

    #[test]
    fn qz_point_conjugates() {
        let q = [c(1.0, 2.0)];
        let z = [c(0.0, -3.0)];
        let pt = QzPoint::new(&q, &z);
        assert_eq!(pt.value(Var::qbar(0)), Some(c(1.0, -2.0)));
        assert_eq!(pt.value(Var::zbar(0)), Some(c(0.0, 3.0)));
        assert_eq!(pt.value(Var::z(1)), None);
    }

    #[test]
    fn derivatives() {
        let p = ComplexPoly::q(0) * ComplexPoly::qbar(0);
        assert_eq!(p.wirtinger_derive(Var::q(0)).unwrap(), ComplexPoly::qbar(0).declare([Var::q(0)]));
        let cube = ComplexPoly::z(0).pow(3);
        assert_eq!(
            cube.derivative(Var::z(0)),
            3.0 * ComplexPoly::z(0).pow(2)
        );
        assert_eq!(
            cube.wirtinger_derive(Var::q(0)),
            Err(Error::UnknownVariable("q1".into()))
        );
    }

    #[test]
    fn w_coordinate_has_no_q2_dependence() {
        // w1 = q1 - mu1 qb2 - mu2 qb3 with mu in z only
        let w1 = ComplexPoly::q(0)
            - ComplexPoly::z(0) * ComplexPoly::qbar(1)
            - ComplexPoly::z(1) * ComplexPoly::qbar(2);
        let w1 = w1.declare([Var::q(1)]);
        assert!(w1.wirtinger_derive(Var::q(1)).unwrap().is_zero());
    }

    #[test]
    fn conjugation() {
        assert_eq!(ComplexPoly::q(0).conjugate().unwrap(), ComplexPoly::qbar(0));
        let p = C64::i() * (ComplexPoly::q(0) * ComplexPoly::q(1));
        let expect = c(0.0, -1.0) * (ComplexPoly::qbar(0) * ComplexPoly::qbar(1));
        assert_eq!(p.conjugate().unwrap(), expect);
        assert_eq!(
            ComplexPoly::w(0).conjugate(),
            Err(Error::MissingConjugateDeclaration("w1".into()))
        );
    }

    #[test]
    fn grlex_order() {
        let x = Monomial::var(Var::z(0));
        let y = Monomial::var(Var::z(1));
        let x2 = Monomial::from_pairs([(Var::z(0), 2)]);
        let xy = Monomial::from_pairs([(Var::z(0), 1), (Var::z(1), 1)]);
        let y2 = Monomial::from_pairs([(Var::z(1), 2)]);
        assert!(Monomial::one() < y);
        assert!(y < x);
        assert!(x < y2);
        assert!(y2 < xy);
        assert!(xy < x2);
    }

    #[test]
    fn substitute_and_rename() {
        // (z1)^2 with z1 -> q1 + qb1
        let p = ComplexPoly::z(0).pow(2);
        let mut map = BTreeMap::new();
        map.insert(Var::z(0), ComplexPoly::q(0) + ComplexPoly::qbar(0));
        let s = p.substitute(&map);
        let expect = ComplexPoly::q(0).pow(2)
            + 2.0 * (ComplexPoly::q(0) * ComplexPoly::qbar(0))
            + ComplexPoly::qbar(0).pow(2);
        assert_eq!(s, expect);
        assert!(!s.declared_vars().contains(&Var::z(0)));
        let r = ComplexPoly::z(1).rename(|v| Var::q(v.index));
        assert_eq!(r, ComplexPoly::q(1));
    }

    #[test]
    fn json_round_trip() {
        let p = c(1.5, -2.0) * (ComplexPoly::z(0) * ComplexPoly::qbar(2)) - ComplexPoly::real(3.0);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(
            s,
            r#"{"vars":["z1","qb3"],"terms":[{"exp":[1,1],"coef":[1.5,-2.0]},{"exp":[0,0],"coef":[-3.0,0.0]}]}"#
        );
        let back: ComplexPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn json_rejects_bad_input() {
        let bad = r#"{"vars":["z1"],"terms":[{"exp":[1,2],"coef":[1,0]}]}"#;
        assert!(serde_json::from_str::<ComplexPoly>(bad).is_err());
        let bad = r#"{"vars":["x1"],"terms":[]}"#;
        assert!(serde_json::from_str::<ComplexPoly>(bad).is_err());
    }

    #[test]
    fn var_names() {
        for name in ["z1", "zb2", "w3", "q10", "qb4"] {
            assert_eq!(name.parse::<Var>().unwrap().to_string(), name);
        }
        assert!("q0".parse::<Var>().is_err());
        assert!("y1".parse::<Var>().is_err());
    }
}
