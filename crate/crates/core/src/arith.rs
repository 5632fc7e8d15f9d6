//! Exact rationals, the height function, height-ordered enumeration and
//! rational root extraction.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::upoly;

/// Exact rational number in lowest terms with a positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("all coefficients are zero")]
    ZeroPolynomial,
}

/// Height of a rational `p/q` in lowest terms: `max(|p|, q)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Height(pub BigInt);

impl Serialize for Height {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl Height {
    pub fn value(&self) -> &BigInt {
        &self.0
    }

    /// Saturating conversion for loop bounds.
    pub fn as_u64(&self) -> u64 {
        self.0.to_u64().unwrap_or(u64::MAX)
    }
}

impl From<u64> for Height {
    fn from(v: u64) -> Self {
        Height(BigInt::from(v))
    }
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn height(q: &Rational) -> Height {
    // BigRational keeps 0 as 0/1, so max(0, 1) = 1 falls out.
    let n = q.numer().abs();
    let d = q.denom().clone();
    Height(if n > d { n } else { d })
}

/// All rationals of height exactly `h`, in ascending numeric order.
pub fn rationals_of_height(h: u64) -> Vec<Rational> {
    let mut out = Vec::new();
    if h == 0 {
        return out;
    }
    if h == 1 {
        return vec![int(-1), int(0), int(1)];
    }
    let hb = BigInt::from(h);
    // |p| = h, q < h with gcd(h, q) = 1
    for q in 1..h {
        if h.gcd(&q) == 1 {
            let qb = BigInt::from(q);
            out.push(Rational::new_raw(hb.clone(), qb.clone()));
            out.push(Rational::new_raw(-hb.clone(), qb));
        }
    }
    // q = h, |p| < h with gcd(p, h) = 1
    for p in 1..h {
        if h.gcd(&p) == 1 {
            let pb = BigInt::from(p);
            out.push(Rational::new_raw(pb.clone(), hb.clone()));
            out.push(Rational::new_raw(-pb, hb.clone()));
        }
    }
    out.sort();
    out
}

/// Every rational of height at most `bound`, ordered by height and then by value.
pub fn enumerate_rationals(bound: u64) -> Vec<Rational> {
    (1..=bound).flat_map(rationals_of_height).collect()
}

/// Rational roots of an integer polynomial given highest degree first.
///
/// The result is sorted ascending and duplicate-free.
pub fn rational_roots(coeffs: &[BigInt]) -> Result<Vec<Rational>, ArithError> {
    let mut low_first: Vec<BigInt> = coeffs.iter().rev().cloned().collect();
    while low_first.last().is_some_and(|c| c.is_zero()) {
        low_first.pop();
    }
    if low_first.is_empty() {
        return Err(ArithError::ZeroPolynomial);
    }
    Ok(rational_roots_low(&low_first))
}

/// Same as [`rational_roots`] with coefficients lowest degree first.
pub fn rational_roots_low(p: &[BigInt]) -> Vec<Rational> {
    let mut p: Vec<BigInt> = p.to_vec();
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    let mut roots = Vec::new();
    let zeros = p.iter().take_while(|c| c.is_zero()).count();
    if zeros > 0 {
        roots.push(Rational::zero());
        p.drain(..zeros);
    }
    if p.len() >= 2 {
        let sqf = upoly::to_primitive_ints(&upoly::squarefree(&upoly::from_ints(&p)));
        roots.extend(nonzero_roots_squarefree(&sqf));
    }
    roots.sort();
    roots.dedup();
    roots
}

/// Rational roots of a squarefree primitive integer polynomial (lowest first).
///
/// A root `r` has `lead * r` integral, so we look for integer roots of the
/// monic transform `lead^(n-1) P(s / lead)` by lifting simple roots modulo a
/// prime and testing the balanced lift exactly.
fn nonzero_roots_squarefree(p: &[BigInt]) -> Vec<Rational> {
    let n = p.len() - 1;
    let lead = p[n].clone();
    if n == 1 {
        return vec![Rational::new(-p[0].clone(), lead)];
    }
    let mut t: Vec<BigInt> = Vec::with_capacity(n + 1);
    let mut scale = BigInt::one();
    // t_i = p_i * lead^(n-1-i), built from the top down
    let mut scaled = vec![BigInt::zero(); n + 1];
    scaled[n] = BigInt::one();
    for i in (0..n).rev() {
        scaled[i] = &p[i] * &scale;
        scale *= &lead;
    }
    t.extend(scaled);
    let bound = t.iter().map(|c| c.abs()).max().unwrap() + BigInt::one();
    let dt: Vec<BigInt> = t.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();

    let (prime, residues) = choose_prime(&t, &dt);
    let pb = BigInt::from(prime);
    let mut out = Vec::new();
    for r0 in residues {
        let mut r = BigInt::from(r0);
        let mut modulus = pb.clone();
        let two_bound = &bound * 2;
        while modulus <= two_bound {
            modulus = &modulus * &modulus;
            let fr = upoly::eval_int(&t, &r).mod_floor(&modulus);
            let dfr = upoly::eval_int(&dt, &r).mod_floor(&modulus);
            let inv = mod_inverse(&dfr, &modulus).expect("simple root stays invertible");
            r = (r - fr * inv).mod_floor(&modulus);
        }
        let half = &modulus / 2;
        let s = if r > half { r - &modulus } else { r };
        if upoly::eval_int(&t, &s).is_zero() {
            out.push(Rational::new(s, lead.clone()));
        }
    }
    out
}

/// First prime for which every root of `t` modulo the prime is simple.
fn choose_prime(t: &[BigInt], dt: &[BigInt]) -> (u64, Vec<u64>) {
    let mut candidate = 101u64;
    loop {
        if is_prime(candidate) {
            let pb = BigInt::from(candidate);
            let tm: Vec<u64> = t.iter().map(|c| c.mod_floor(&pb).to_u64().unwrap()).collect();
            let dm: Vec<u64> = dt.iter().map(|c| c.mod_floor(&pb).to_u64().unwrap()).collect();
            // the monic transform keeps its degree mod p
            let mut roots = Vec::new();
            let mut ok = true;
            for r in 0..candidate {
                if eval_mod(&tm, r, candidate) == 0 {
                    if eval_mod(&dm, r, candidate) == 0 {
                        ok = false;
                        break;
                    }
                    roots.push(r);
                }
            }
            if ok {
                return (candidate, roots);
            }
        }
        candidate += 2;
    }
}

fn eval_mod(p: &[u64], x: u64, m: u64) -> u64 {
    let mut acc: u128 = 0;
    for c in p.iter().rev() {
        acc = (acc * x as u128 + *c as u128) % m as u128;
    }
    acc as u64
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Integer square root for non-negative inputs.
pub fn isqrt(n: &BigInt) -> BigInt {
    n.sqrt()
}

/// `Some(r)` when `q` is the square of the rational `r >= 0`.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(qs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    qs.into_iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn height_examples() {
        assert_eq!(height(&int(0)), Height::from(1));
        assert_eq!(height(&rat(3, 2)), Height::from(3));
        assert_eq!(height(&rat(-5, 3)), Height::from(5));
    }

    #[test]
    fn enumerate_small_bounds() {
        assert_eq!(enumerate_rationals(1), vec![int(-1), int(0), int(1)]);
        assert_eq!(enumerate_rationals(2), vec![int(-1), int(0), int(1), int(-2), rat(-1, 2), rat(1, 2), int(2)]);
    }

    #[test]
    fn root_examples() {
        assert_eq!(rational_roots(&ints(&[2, -1, -1])).unwrap(), vec![rat(-1, 2), int(1)]);
        assert!(rational_roots(&ints(&[1, 0, 1])).unwrap().is_empty());
        assert_eq!(rational_roots(&ints(&[1, 0, -1, 0])).unwrap(), vec![int(-1), int(0), int(1)]);
        assert_eq!(rational_roots(&ints(&[0, 0])), Err(ArithError::ZeroPolynomial));
    }

    #[test]
    fn repeated_and_large_roots() {
        // (3x - 7)^2 (x + 1000003)
        let p = ints(&[9, 9000027 - 42, 49 - 42 * 1000003, 49 * 1000003]);
        assert_eq!(rational_roots(&p).unwrap(), vec![int(-1000003), rat(7, 3)]);
        // constant polynomial has no roots
        assert!(rational_roots(&ints(&[5])).unwrap().is_empty());
    }

    #[test]
    fn rational_sqrt_checks() {
        assert_eq!(rational_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rational_sqrt(&rat(2, 1)), None);
        assert_eq!(rational_sqrt(&rat(-1, 1)), None);
    }
}
