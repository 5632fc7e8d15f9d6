//! Dense univariate polynomials, coefficients stored lowest degree first.
//!
//! Two flavours are used throughout the crate: integer coefficient vectors
//! (`&[BigInt]`) for root extraction, and rational coefficient vectors
//! (`UPoly`) for gcd computations over the field of fractions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::Rational;

/// Rational univariate polynomial, lowest degree first, no trailing zeros.
pub type UPoly = Vec<Rational>;

pub fn trim(p: &mut UPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn from_ints(c: &[BigInt]) -> UPoly {
    let mut p: UPoly = c.iter().map(|a| Rational::from_integer(a.clone())).collect();
    trim(&mut p);
    p
}

/// Degree, with `None` for the zero polynomial.
pub fn degree(p: &UPoly) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

pub fn add(a: &UPoly, b: &UPoly) -> UPoly {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(Rational::zero);
        let y = b.get(i).cloned().unwrap_or_else(Rational::zero);
        out.push(x + y);
    }
    trim(&mut out);
    out
}

pub fn sub(a: &UPoly, b: &UPoly) -> UPoly {
    let neg: UPoly = b.iter().map(|c| -c.clone()).collect();
    add(a, &neg)
}

pub fn mul(a: &UPoly, b: &UPoly) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

pub fn derivative(p: &UPoly) -> UPoly {
    let mut out: UPoly =
        p.iter().enumerate().skip(1).map(|(i, c)| c * Rational::from_integer(BigInt::from(i))).collect();
    trim(&mut out);
    out
}

/// Quotient and remainder; panics on division by the zero polynomial.
pub fn divrem(a: &UPoly, b: &UPoly) -> (UPoly, UPoly) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = a.clone();
    trim(&mut r);
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead_inv = Rational::one() / b[db].clone();
    let mut q = vec![Rational::zero(); r.len() - db];
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let c = r.last().unwrap() * &lead_inv;
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] -= &c * bj;
        }
        q[shift] = c;
        r.pop();
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

pub fn rem(a: &UPoly, b: &UPoly) -> UPoly {
    divrem(a, b).1
}

pub fn monic(p: &UPoly) -> UPoly {
    match p.last() {
        None => Vec::new(),
        Some(l) => {
            let inv = Rational::one() / l.clone();
            p.iter().map(|c| c * &inv).collect()
        }
    }
}

/// Monic gcd over the rationals (zero if both inputs are zero).
pub fn gcd(a: &UPoly, b: &UPoly) -> UPoly {
    let mut x = a.clone();
    let mut y = b.clone();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y);
        x = y;
        y = r;
    }
    monic(&x)
}

pub fn eval(p: &UPoly, at: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in p.iter().rev() {
        acc = acc * at + c;
    }
    acc
}

/// Squarefree part `p / gcd(p, p')`, monic.
pub fn squarefree(p: &UPoly) -> UPoly {
    let g = gcd(p, &derivative(p));
    if g.len() <= 1 {
        return monic(p);
    }
    monic(&divrem(p, &g).0)
}

/// Scale to a primitive integer polynomial with positive leading coefficient.
pub fn to_primitive_ints(p: &UPoly) -> Vec<BigInt> {
    if p.is_empty() {
        return Vec::new();
    }
    let mut den = BigInt::one();
    for c in p {
        den = den.lcm(c.denom());
    }
    let mut ints: Vec<BigInt> = p.iter().map(|c| (c * Rational::from_integer(den.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for c in &ints {
        g = g.gcd(c);
    }
    if ints.last().unwrap().is_negative() {
        g = -g;
    }
    for c in ints.iter_mut() {
        *c = &*c / &g;
    }
    ints
}

pub fn eval_int(p: &[BigInt], at: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in p.iter().rev() {
        acc = acc * at + c;
    }
    acc
}
