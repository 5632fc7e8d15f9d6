//! Reference implementations used to check the library from the outside.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use ratcurve::arith::{enumerate_rationals, height, Height, Rational};
use ratcurve::poly::MultiPoly;

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            out.push(&n / &d);
        }
        d += 1;
    }
    out.sort();
    out.dedup();
    out
}

/// Rational roots by the rational root theorem: try every `±p/q` with
/// `p | a0` and `q | an`. Coefficients lowest degree first.
pub fn divisor_roots(coeffs: &[BigInt]) -> Vec<Rational> {
    let mut c = coeffs.to_vec();
    while c.last().is_some_and(|k| k.is_zero()) {
        c.pop();
    }
    if c.len() <= 1 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let shift = c.iter().position(|k| !k.is_zero()).unwrap();
    if shift > 0 {
        out.push(Rational::zero());
    }
    let c = &c[shift..];
    let eval =
        |r: &Rational| c.iter().rev().fold(Rational::zero(), |acc, k| acc * r + Rational::from_integer(k.clone()));
    for p in divisors(&c[0]) {
        for q in divisors(c.last().unwrap()) {
            for s in [p.clone(), -p.clone()] {
                let r = Rational::new(s, q.clone());
                if eval(&r).is_zero() {
                    out.push(r);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn squarefree_part(n: &BigInt) -> BigInt {
    let sign = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    let mut m = n.abs();
    let mut out = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        let mut e = 0;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        if e % 2 == 1 {
            out *= &p;
        }
        p += 1;
    }
    sign * out * m
}

fn is_square_mod(n: &BigInt, m: &BigInt) -> bool {
    let m = m.abs();
    if m.is_one() {
        return true;
    }
    let r = n.mod_floor(&m);
    let mut x = BigInt::zero();
    while x < m {
        if (&x * &x).mod_floor(&m) == r {
            return true;
        }
        x += 1;
    }
    false
}

/// Legendre's criterion for `a X^2 + b Y^2 + c Z^2 = 0` having a nonzero
/// integer solution, after reducing to squarefree pairwise coprime form.
pub fn legendre_solvable(a: i64, b: i64, c: i64) -> bool {
    let mut k = [BigInt::from(a), BigInt::from(b), BigInt::from(c)];
    loop {
        for v in k.iter_mut() {
            *v = squarefree_part(v);
        }
        let mut changed = false;
        for (i, j, l) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
            let g = k[i].gcd(&k[j]);
            if !g.is_one() {
                k[i] = &k[i] / &g;
                k[j] = &k[j] / &g;
                k[l] = &k[l] * &g;
                changed = true;
                break;
            }
        }
        if !changed {
            break;
        }
    }
    let [a, b, c] = k;
    let signs = [a.is_positive(), b.is_positive(), c.is_positive()];
    if signs.iter().all(|s| *s) || signs.iter().all(|s| !*s) {
        return false;
    }
    is_square_mod(&(-&b * &c), &a) && is_square_mod(&(-&c * &a), &b) && is_square_mod(&(-&a * &b), &c)
}

/// Whether `a x^2 + b y^2 = c` has a rational point, for positive inputs.
pub fn conic_has_point(a: i64, b: i64, c: i64) -> bool {
    legendre_solvable(a, b, -c)
}

/// Every rational tuple with entries of height at most `bound` satisfying
/// all equations, by direct substitution.
pub fn brute_force_solutions(equations: &[MultiPoly], nvars: usize, bound: u64) -> Vec<Vec<Rational>> {
    let values = enumerate_rationals(bound);
    let mut out = Vec::new();
    let mut idx = vec![0usize; nvars];
    loop {
        let mut at = [Rational::zero(), Rational::zero(), Rational::zero()];
        for (i, k) in idx.iter().enumerate() {
            at[i] = values[*k].clone();
        }
        if equations.iter().all(|e| e.eval(&at).is_zero()) {
            out.push(at[..nvars].to_vec());
        }
        let mut i = 0;
        loop {
            if i == nvars {
                out.sort();
                return out;
            }
            idx[i] += 1;
            if idx[i] < values.len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

pub fn tuple_height(t: &[Rational]) -> Height {
    t.iter().map(height).max().unwrap_or_else(|| Height::from(1))
}
