//! Sparse polynomials in x, y, z.
//!
//! `Poly<C>` is generic over the coefficient ring; [`MultiPoly`] (integer
//! coefficients) is the type curves and systems are written in, and
//! [`QPoly`] (rational coefficients) is used as scratch space when building
//! coordinate changes. Terms are kept in a `BTreeMap` keyed by monomial in
//! graded lexicographic order with x > y > z, so the last entry is the
//! leading term.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{common_denominator, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Var {
    X,
    Y,
    Z,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::X, Var::Y, Var::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> char {
        ['x', 'y', 'z'][self.index()]
    }
}

/// Exponent triple `(ex, ey, ez)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub [u32; 3]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0, 0, 0]);

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial([self.0[0] + other.0[0], self.0[1] + other.0[1], self.0[2] + other.0[2]])
    }

    pub fn divide(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = [0u32; 3];
        for i in 0..3 {
            out[i] = self.0[i].checked_sub(other.0[i])?;
        }
        Some(Monomial(out))
    }

    pub fn var(v: Var, e: u32) -> Monomial {
        let mut m = [0; 3];
        m[v.index()] = e;
        Monomial(m)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Coefficient rings usable in [`Poly`].
pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + From<BigInt>
{
    fn to_rational(&self) -> Rational;
}

impl Coeff for BigInt {
    fn to_rational(&self) -> Rational {
        Rational::from_integer(self.clone())
    }
}

impl Coeff for Rational {
    fn to_rational(&self) -> Rational {
        self.clone()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly<C> {
    terms: BTreeMap<Monomial, C>,
}

/// Integer-coefficient polynomial in x, y, z.
pub type MultiPoly = Poly<BigInt>;
/// Rational-coefficient polynomial in x, y, z.
pub type QPoly = Poly<Rational>;

impl<C: Coeff> Default for Poly<C> {
    fn default() -> Self {
        Poly { terms: BTreeMap::new() }
    }
}

impl<C: Coeff> Poly<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        Self::term(Monomial::ONE, c)
    }

    pub fn term(m: Monomial, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn var(v: Var) -> Self {
        Self::term(Monomial::var(v, 1), C::one())
    }

    pub fn from_terms(iter: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = existing.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| *m == Monomial::ONE)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&Monomial::ONE)
    }

    /// Total degree; zero for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.0[v.index()]).max().unwrap_or(0)
    }

    pub fn uses(&self, v: Var) -> bool {
        self.degree_in(v) > 0
    }

    pub fn variables(&self) -> Vec<Var> {
        Var::ALL.into_iter().filter(|v| self.uses(*v)).collect()
    }

    pub fn leading(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, a)| (*m, a.clone() * c.clone())))
    }

    pub fn mul_monomial(&self, mono: &Monomial) -> Self {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.mul(mono), c.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Formal partial derivative (not canonicalized).
    pub fn derivative(&self, v: Var) -> Self {
        let i = v.index();
        Self::from_terms(self.terms.iter().filter(|(m, _)| m.0[i] > 0).map(|(m, c)| {
            let mut e = m.0;
            let k = e[i];
            e[i] -= 1;
            (Monomial(e), c.clone() * C::from(BigInt::from(k)))
        }))
    }

    /// Coefficients with respect to `v`, indexed by power of `v`.
    pub fn coefficients_in(&self, v: Var) -> Vec<Self> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![Self::zero(); if self.is_zero() { 0 } else { d + 1 }];
        for (m, c) in &self.terms {
            let mut e = m.0;
            let k = e[v.index()] as usize;
            e[v.index()] = 0;
            out[k].add_term(Monomial(e), c.clone());
        }
        out
    }

    pub fn from_coefficients_in(v: Var, coeffs: &[Self]) -> Self {
        let mut out = Self::zero();
        for (k, c) in coeffs.iter().enumerate() {
            for (m, a) in &c.terms {
                out.add_term(m.mul(&Monomial::var(v, k as u32)), a.clone());
            }
        }
        out
    }

    /// Substitute `images[i]` for the i-th variable.
    pub fn compose(&self, images: &[Self; 3]) -> Self {
        let mut cache: [Vec<Self>; 3] = Default::default();
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut t = Self::constant(c.clone());
            for i in 0..3 {
                let e = m.0[i] as usize;
                if e == 0 {
                    continue;
                }
                while cache[i].len() <= e {
                    let next = match cache[i].last() {
                        None => Self::one(),
                        Some(p) => p * &images[i],
                    };
                    cache[i].push(next);
                }
                t = &t * &cache[i][e];
            }
            out = &out + &t;
        }
        out
    }

    /// Swap the roles of two variables.
    pub fn swap_vars(&self, a: Var, b: Var) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| {
            let mut e = m.0;
            e.swap(a.index(), b.index());
            (Monomial(e), c.clone())
        }))
    }

    pub fn to_qpoly(&self) -> QPoly {
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, c.to_rational())).collect() }
    }

    /// Exact value at a full assignment.
    pub fn eval(&self, at: &[Rational; 3]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.to_rational();
            for i in 0..3 {
                if m.0[i] > 0 {
                    t *= num_traits::pow(at[i].clone(), m.0[i] as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitute rational values for some variables, keeping the rest.
    pub fn eval_partial(&self, at: &[Option<Rational>; 3]) -> QPoly {
        let mut out = QPoly::zero();
        for (m, c) in &self.terms {
            let mut t = c.to_rational();
            let mut e = m.0;
            for i in 0..3 {
                if let Some(v) = &at[i] {
                    t *= num_traits::pow(v.clone(), e[i] as usize);
                    e[i] = 0;
                }
            }
            out.add_term(Monomial(e), t);
        }
        out
    }
}

impl<C: Coeff> Add for &Poly<C> {
    type Output = Poly<C>;
    fn add(self, rhs: &Poly<C>) -> Poly<C> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl<C: Coeff> Sub for &Poly<C> {
    type Output = Poly<C>;
    fn sub(self, rhs: &Poly<C>) -> Poly<C> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl<C: Coeff> Mul for &Poly<C> {
    type Output = Poly<C>;
    fn mul(self, rhs: &Poly<C>) -> Poly<C> {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<C: Coeff> Neg for &Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect() }
    }
}

macro_rules! forward_owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl<C: Coeff> $tr for Poly<C> {
            type Output = Poly<C>;
            fn $f(self, rhs: Poly<C>) -> Poly<C> {
                (&self).$f(&rhs)
            }
        }
    )*};
}
forward_owned_ops!(Add add, Sub sub, Mul mul);

impl QPoly {
    /// Multiply through by the least common denominator.
    pub fn clear_denominators(&self) -> (MultiPoly, BigInt) {
        let den = common_denominator(self.terms.values());
        let den_q = Rational::from_integer(den.clone());
        let p = MultiPoly::from_terms(self.terms.iter().map(|(m, c)| (*m, (c * &den_q).to_integer())));
        (p, den)
    }
}

/// Result of [`MultiPoly::evaluate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evaluated {
    Value(Rational),
    Poly(MultiPoly),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("polynomial has degree zero in {0:?}")]
    DegreeZero(Var),
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
}

impl MultiPoly {
    pub fn int(c: i64) -> Self {
        Self::constant(BigInt::from(c))
    }

    /// gcd of the coefficients (non-negative, zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn primitive(&self) -> Self {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, c / &g)).collect() }
    }

    /// Content one with a positive leading coefficient.
    pub fn canonical(&self) -> Self {
        let p = self.primitive();
        match p.leading() {
            Some((_, c)) if c.is_negative() => -&p,
            _ => p,
        }
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonical()
    }

    /// Partial derivative in canonical form.
    pub fn partial_derivative(&self, v: Var) -> Self {
        self.derivative(v).canonical()
    }

    /// Substitute rational values; a full assignment gives a value, otherwise
    /// the denominators are cleared by the least positive integer that makes
    /// the result integral.
    pub fn evaluate(&self, at: &[Option<Rational>; 3]) -> Evaluated {
        let q = self.eval_partial(at);
        let free = Var::ALL.iter().any(|v| at[v.index()].is_none() && q.uses(*v));
        if !free {
            Evaluated::Value(q.constant_term())
        } else {
            Evaluated::Poly(q.clear_denominators().0)
        }
    }

    /// `f` with `v = value`, scaled by `den(value)^deg_v(f)` to stay integral.
    pub fn specialize(&self, v: Var, value: &Rational) -> MultiPoly {
        let mut at: [Option<Rational>; 3] = [None, None, None];
        at[v.index()] = Some(value.clone());
        let q = self.eval_partial(&at);
        let scale = Rational::from_integer(num_traits::pow(value.denom().clone(), self.degree_in(v) as usize));
        MultiPoly::from_terms(q.terms.iter().map(|(m, c)| (*m, (c * &scale).to_integer())))
    }

    /// Dense coefficients (lowest first) when `self` only involves `v`.
    pub fn to_univariate(&self, v: Var) -> Option<Vec<BigInt>> {
        if Var::ALL.iter().any(|w| *w != v && self.uses(*w)) {
            return None;
        }
        let d = self.degree_in(v) as usize;
        let mut out = vec![BigInt::zero(); d + 1];
        for (m, c) in &self.terms {
            out[m.0[v.index()] as usize] = c.clone();
        }
        Some(out)
    }

    pub fn from_univariate(v: Var, coeffs: &[BigInt]) -> Self {
        Self::from_terms(coeffs.iter().enumerate().map(|(k, c)| (Monomial::var(v, k as u32), c.clone())))
    }

    /// Exact quotient, `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &MultiPoly) -> Option<MultiPoly> {
        let (lm, lc) = divisor.leading()?;
        let (lm, lc) = (*lm, lc.clone());
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero();
        while let Some((rm, rc)) = rem.leading() {
            let m = rm.divide(&lm)?;
            let (c, r) = rc.div_rem(&lc);
            if !r.is_zero() {
                return None;
            }
            let t = MultiPoly::term(m, c);
            rem = &rem - &(&t * divisor);
            quot.add_term(*t.terms.keys().next().unwrap(), t.terms.values().next().unwrap().clone());
        }
        Some(quot)
    }

    /// Resultant with respect to `v`: determinant of the Sylvester matrix
    /// whose first `deg_v(g)` rows hold the shifted coefficients of `self`.
    pub fn resultant(&self, other: &MultiPoly, v: Var) -> Result<MultiPoly, PolyError> {
        let m = self.degree_in(v) as usize;
        let n = other.degree_in(v) as usize;
        if m == 0 || self.is_zero() {
            return Err(PolyError::DegreeZero(v));
        }
        if n == 0 || other.is_zero() {
            return Err(PolyError::DegreeZero(v));
        }
        let a = self.coefficients_in(v);
        let b = other.coefficients_in(v);
        let size = m + n;
        let mut mat = vec![vec![MultiPoly::zero(); size]; size];
        for i in 0..n {
            for k in 0..=m {
                mat[i][i + k] = a[m - k].clone();
            }
        }
        for i in 0..m {
            for k in 0..=n {
                mat[n + i][i + k] = b[n - k].clone();
            }
        }
        Ok(determinant(mat))
    }

    /// Content of `self` viewed as a polynomial in `v`.
    pub fn content_in(&self, v: Var) -> MultiPoly {
        let mut g = MultiPoly::zero();
        for c in self.coefficients_in(v) {
            if c.is_zero() {
                continue;
            }
            g = gcd(&g, &c);
            if g.is_constant() && g.constant_term().is_one() {
                break;
            }
        }
        g
    }

    /// Rewrites `self` so that all terms reach total degree `deg(self)`,
    /// introducing a homogenizing variable.
    pub fn homogenize(&self, new_var_count: usize) -> Homogeneous {
        assert!(new_var_count == 3 || new_var_count == 4, "homogenize into 3 or 4 variables");
        if new_var_count == 3 {
            assert!(!self.uses(Var::Z), "three-variable homogenization needs a polynomial in x, y");
        }
        let d = self.total_degree();
        let w = new_var_count - 1;
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut e = [0u32; 4];
            e[..3].copy_from_slice(&m.0);
            e[w] = d - m.degree();
            terms.insert(HMonomial(e), c.clone());
        }
        Homogeneous { nvars: new_var_count, degree: d, terms }
    }
}

fn is_unit(p: &MultiPoly) -> bool {
    p.is_constant() && p.constant_term().abs().is_one()
}

/// Bareiss fraction-free determinant over the integer polynomials.
pub fn determinant(mut mat: Vec<Vec<MultiPoly>>) -> MultiPoly {
    let n = mat.len();
    if n == 0 {
        return MultiPoly::one();
    }
    let mut negate = false;
    let mut prev = MultiPoly::one();
    for k in 0..n - 1 {
        if mat[k][k].is_zero() {
            match (k + 1..n).find(|&i| !mat[i][k].is_zero()) {
                Some(i) => {
                    mat.swap(k, i);
                    negate = !negate;
                }
                None => return MultiPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&mat[i][j] * &mat[k][k]) - &(&mat[i][k] * &mat[k][j]);
                mat[i][j] = if is_unit(&prev) {
                    if prev.constant_term().is_one() {
                        num
                    } else {
                        -&num
                    }
                } else {
                    num.div_exact(&prev).expect("Bareiss division is exact")
                };
            }
        }
        prev = mat[k][k].clone();
    }
    let d = mat[n - 1][n - 1].clone();
    if negate {
        -&d
    } else {
        d
    }
}

fn main_var(a: &MultiPoly, b: &MultiPoly) -> Option<Var> {
    Var::ALL.into_iter().rev().find(|v| a.uses(*v) || b.uses(*v))
}

/// Pseudo-remainder of `a` by `b` with respect to `v`.
pub fn pseudo_remainder(a: &MultiPoly, b: &MultiPoly, v: Var) -> MultiPoly {
    let db = b.degree_in(v);
    let lb = b.coefficients_in(v).pop().unwrap_or_default();
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lr = r.coefficients_in(v).pop().unwrap();
        let shift = MultiPoly::term(Monomial::var(v, dr - db), BigInt::one());
        r = &(&r * &lb) - &(&(&lr * &shift) * b);
    }
    r
}

/// Greatest common divisor over the integers, canonical up to sign
/// (positive leading coefficient). `gcd(0, 0) = 0`.
pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_zero() {
        return b.canonical_sign();
    }
    if b.is_zero() {
        return a.canonical_sign();
    }
    let v = match main_var(a, b) {
        None => return MultiPoly::constant(a.constant_term().gcd(&b.constant_term())),
        Some(v) => v,
    };
    if !a.uses(v) {
        return gcd(a, &b.content_in(v));
    }
    if !b.uses(v) {
        return gcd(&a.content_in(v), b);
    }
    let ca = a.content_in(v);
    let cb = b.content_in(v);
    let c = gcd(&ca, &cb);
    let mut r0 = a.div_exact(&ca).expect("content divides");
    let mut r1 = b.div_exact(&cb).expect("content divides");
    if r0.degree_in(v) < r1.degree_in(v) {
        std::mem::swap(&mut r0, &mut r1);
    }
    let g = loop {
        let r = pseudo_remainder(&r0, &r1, v);
        if r.is_zero() {
            break r1;
        }
        if !r.uses(v) {
            break MultiPoly::one();
        }
        r0 = r1;
        let cr = r.content_in(v);
        r1 = r.div_exact(&cr).expect("content divides");
    };
    let cg = g.content_in(v);
    let pg = g.div_exact(&cg).expect("content divides");
    (&c * &pg).canonical_sign()
}

impl MultiPoly {
    /// Same polynomial with positive leading coefficient (content kept).
    pub fn canonical_sign(&self) -> MultiPoly {
        match self.leading() {
            Some((_, c)) if c.is_negative() => -self,
            _ => self.clone(),
        }
    }

    /// Factors by multiplicity with respect to `v` (Yun), content in `v`
    /// excluded. Returns `(factor, multiplicity)` pairs with nonconstant factors.
    pub fn squarefree_factors_in(&self, v: Var) -> Vec<(MultiPoly, u32)> {
        let cont = self.content_in(v);
        let prim = self.div_exact(&cont).expect("content divides");
        let mut out = Vec::new();
        if !prim.uses(v) {
            return out;
        }
        let d = prim.derivative(v);
        let a0 = gcd(&prim, &d);
        let mut b = prim.div_exact(&a0).expect("gcd divides");
        let mut c = d.div_exact(&a0).expect("gcd divides");
        let mut dd = &c - &b.derivative(v);
        let mut i = 1;
        while b.uses(v) {
            let a = gcd(&b, &dd);
            if a.uses(v) {
                out.push((a.canonical(), i));
            }
            let nb = b.div_exact(&a).expect("gcd divides");
            c = dd.div_exact(&a).expect("gcd divides");
            dd = &c - &nb.derivative(v);
            b = nb;
            i += 1;
        }
        out
    }
}

/// Exponents of x, y, z, w (three-variable forms leave the last slot unused
/// and keep w in the third).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HMonomial(pub [u32; 4]);

impl Ord for HMonomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let d = |m: &HMonomial| m.0.iter().sum::<u32>();
        d(self).cmp(&d(other)).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for HMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A homogeneous form in 3 variables (x, y, w) or 4 variables (x, y, z, w).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homogeneous {
    pub nvars: usize,
    pub degree: u32,
    pub terms: BTreeMap<HMonomial, BigInt>,
}

impl Homogeneous {
    fn names(&self) -> &'static [char] {
        if self.nvars == 3 {
            &['x', 'y', 'w']
        } else {
            &['x', 'y', 'z', 'w']
        }
    }

    /// Set the homogenizing variable to 1.
    pub fn dehomogenize(&self) -> MultiPoly {
        self.chart(self.nvars - 1)
    }

    /// Set variable `index` to 1 and rename the remaining ones, in order, to
    /// x, y (and z).
    pub fn chart(&self, index: usize) -> MultiPoly {
        let mut p = MultiPoly::zero();
        for (m, c) in &self.terms {
            let mut e = [0u32; 3];
            let mut k = 0;
            for i in 0..self.nvars {
                if i == index {
                    continue;
                }
                e[k] = m.0[i];
                k += 1;
            }
            p.add_term(Monomial(e), c.clone());
        }
        p
    }

    pub fn eval(&self, at: &[BigInt]) -> BigInt {
        assert_eq!(at.len(), self.nvars);
        let mut acc = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..self.nvars {
                t *= num_traits::pow(at[i].clone(), m.0[i] as usize);
            }
            acc += t;
        }
        acc
    }
}

impl fmt::Display for Homogeneous {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.names();
        let terms: Vec<(Vec<(char, u32)>, &BigInt)> =
            self.terms.iter().rev().map(|(m, c)| ((0..self.nvars).map(|i| (names[i], m.0[i])).collect(), c)).collect();
        write_terms(f, &terms)
    }
}

fn write_terms(f: &mut fmt::Formatter<'_>, terms: &[(Vec<(char, u32)>, &BigInt)]) -> fmt::Result {
    if terms.is_empty() {
        return write!(f, "0");
    }
    for (k, (vars, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        if k == 0 {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, "{}", if neg { " - " } else { " + " })?;
        }
        let a = c.abs();
        let is_const = vars.iter().all(|(_, e)| *e == 0);
        if is_const || !a.is_one() {
            write!(f, "{a}")?;
        }
        for (name, e) in vars {
            match e {
                0 => {}
                1 => write!(f, "{name}")?,
                _ => write!(f, "{name}^{e}")?,
            }
        }
    }
    Ok(())
}

/// Canonical text form: descending graded-lex terms, `^` exponents, no `*`.
impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(Vec<(char, u32)>, &BigInt)> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| (Var::ALL.iter().map(|v| (v.name(), m.0[v.index()])).collect(), c))
            .collect();
        write_terms(f, &terms)
    }
}

impl Serialize for MultiPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_raw(&s).map_err(serde::de::Error::custom)
    }
}

impl FromStr for MultiPoly {
    type Err = PolyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_polynomial(s)
    }
}

/// Parse and canonicalize.
pub fn parse_polynomial(text: &str) -> Result<MultiPoly, PolyError> {
    Ok(parse_raw(text)?.canonical())
}

/// Parse without canonicalizing.
///
/// Grammar: optionally signed terms over x, y, z joined by `+`/`-`; each
/// term is a product of integers and `var^exp` factors with optional `*`
/// between factors. Whitespace is ignored.
pub fn parse_raw(text: &str) -> Result<MultiPoly, PolyError> {
    let toks: Vec<(usize, char)> = text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
    let mut p = Parser { toks: &toks, pos: 0, end: text.len() };
    p.expression()
}

struct Parser<'a> {
    toks: &'a [(usize, char)],
    pos: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.toks.get(self.pos).map(|t| t.1)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.end)
    }

    fn err<T>(&self, message: &str) -> Result<T, PolyError> {
        Err(PolyError::Parse { position: self.offset(), message: message.to_string() })
    }

    fn expression(&mut self) -> Result<MultiPoly, PolyError> {
        if self.toks.is_empty() {
            return self.err("empty input");
        }
        let mut acc = MultiPoly::zero();
        let mut first = true;
        while self.pos < self.toks.len() {
            let mut negative = false;
            match self.peek() {
                Some('+') => self.pos += 1,
                Some('-') => {
                    negative = true;
                    self.pos += 1
                }
                _ if first => {}
                _ => return self.err("expected '+' or '-'"),
            }
            first = false;
            let t = self.term()?;
            acc = if negative { &acc - &t } else { &acc + &t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly, PolyError> {
        let mut coeff = BigInt::one();
        let mut mono = Monomial::ONE;
        let mut factors = 0;
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() => coeff *= self.integer()?,
                Some(c @ ('x' | 'y' | 'z')) => {
                    self.pos += 1;
                    let v = match c {
                        'x' => Var::X,
                        'y' => Var::Y,
                        _ => Var::Z,
                    };
                    let mut e = 1u32;
                    if self.peek() == Some('^') {
                        self.pos += 1;
                        match self.peek() {
                            Some(d) if d.is_ascii_digit() => {}
                            _ => return self.err("expected exponent after '^'"),
                        }
                        let at = self.offset();
                        e = self
                            .integer()?
                            .try_into()
                            .map_err(|_| PolyError::Parse { position: at, message: "exponent too large".into() })?;
                    }
                    mono = mono.mul(&Monomial::var(v, e));
                }
                _ => {
                    if factors == 0 {
                        return self.err("expected a coefficient or variable");
                    }
                    return Ok(MultiPoly::term(mono, coeff));
                }
            }
            factors += 1;
            if self.peek() == Some('*') {
                self.pos += 1;
                match self.peek() {
                    Some(c) if c.is_ascii_digit() || matches!(c, 'x' | 'y' | 'z') => {}
                    _ => return self.err("expected a factor after '*'"),
                }
            }
        }
    }

    fn integer(&mut self) -> Result<BigInt, PolyError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let s: String = self.toks[start..self.pos].iter().map(|t| t.1).collect();
        s.parse().map_err(|_| PolyError::Parse { position: self.toks[start].0, message: "bad integer".into() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn p(s: &str) -> MultiPoly {
        parse_raw(s).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let f = p("x^2 + y^2 - 2");
        assert_eq!(f.evaluate(&[Some(int(1)), Some(int(1)), None]), Evaluated::Value(int(0)));
        assert_eq!(f.evaluate(&[Some(rat(1, 2)), Some(rat(1, 2)), None]), Evaluated::Value(rat(-3, 2)));
        let g = p("x^3y + y");
        assert_eq!(g.evaluate(&[Some(int(2)), None, None]), Evaluated::Poly(p("9y")));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(p("x^2+y^2-2").partial_derivative(Var::X), p("x"));
        assert_eq!(p("x^3y+y").partial_derivative(Var::Y), p("x^3+1"));
        assert!(p("x^2+y^2-2").partial_derivative(Var::Z).is_zero());
    }

    #[test]
    fn resultant_examples() {
        let r = p("y^2 - x").resultant(&p("y - 1"), Var::Y).unwrap();
        assert_eq!(r, p("1 - x"));
        assert_eq!(r.canonical(), p("x - 1"));
        assert_eq!(p("y^2+1").resultant(&p("y^2-1"), Var::Y).unwrap(), p("4"));
        let f = p("x*y^2 + y - 3");
        assert!(f.resultant(&f, Var::Y).unwrap().is_zero());
        assert_eq!(p("x^2").resultant(&p("y"), Var::Y), Err(PolyError::DegreeZero(Var::Y)));
    }

    #[test]
    fn homogenize_examples() {
        assert_eq!(p("x^2 + y - 1").homogenize(3).to_string(), "x^2 + yw - w^2");
        assert_eq!(p("y^2 - x^3 - 1").homogenize(3).to_string(), "-x^3 + y^2w - w^3");
        let c = p("5").homogenize(3);
        assert_eq!((c.degree, c.to_string()), (0, "5".to_string()));
        assert_eq!(p("x^2 + y - 1").homogenize(3).dehomogenize(), p("x^2 + y - 1"));
        assert_eq!(p("xz - 1").homogenize(4).to_string(), "xz - w^2");
    }

    #[test]
    fn serialization_is_canonical() {
        let f = parse_polynomial("-2 + y^2 + x^2").unwrap();
        assert_eq!(f.to_string(), "x^2 + y^2 - 2");
        assert_eq!(parse_polynomial("2x^3y - 4y").unwrap().to_string(), "x^3y - 2y");
        assert_eq!(parse_polynomial("-x + 3").unwrap().to_string(), "x - 3");
        assert_eq!(parse_polynomial("2*x*y + 2xy").unwrap().to_string(), "xy");
    }

    #[test]
    fn parse_errors() {
        match parse_polynomial("x**2") {
            Err(PolyError::Parse { position, .. }) => assert_eq!(position, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_polynomial("").is_err());
        assert!(parse_polynomial("x^").is_err());
        assert!(parse_polynomial("x + + y").is_err());
        assert!(parse_polynomial("x w").is_err());
    }

    #[test]
    fn exact_division_and_gcd() {
        let a = p("x^2 - y^2");
        let b = p("x - y");
        assert_eq!(a.div_exact(&b), Some(p("x + y")));
        assert_eq!(a.div_exact(&p("x - 2y")), None);
        let f = &p("x*y + 3") * &p("x^2 - y + 1");
        let g = &p("x*y + 3") * &p("y^3 + x");
        assert_eq!(gcd(&f, &g), p("xy + 3"));
        assert_eq!(gcd(&p("6x + 6"), &p("4x + 4")), p("2x + 2"));
    }

    #[test]
    fn squarefree_factors() {
        let f = &p("x*y + 1").pow(2) * &p("y - x^2");
        let fs = f.squarefree_factors_in(Var::Y);
        assert_eq!(fs, vec![(p("x^2 - y"), 1), (p("xy + 1"), 2)]);
    }

    #[test]
    fn determinant_small() {
        let m = vec![vec![p("x"), p("1"), p("0")], vec![p("0"), p("y"), p("1")], vec![p("1"), p("0"), p("x")]];
        // x*(y*x - 0) - 1*(0 - 1) + 0 = x^2 y + 1
        assert_eq!(determinant(m), p("x^2y + 1"));
    }
}
