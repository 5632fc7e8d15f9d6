//! Conics `a x^2 + b y^2 = c`: one point from the decider, all points by
//! sweeping lines through it.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{enumerate_rationals, height, Height, Rational};
use crate::curve::{AffinePoint, PlaneCurve};
use crate::oracle::{conic_coefficients, conic_witness};
use crate::poly::{Monomial, MultiPoly, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Genus0Error {
    #[error("coefficients must be positive")]
    NonPositive,
    #[error("base point {0} is not on the conic")]
    BaseNotOnConic(Box<AffinePoint>),
    #[error("equation is not of the form a x^2 + b y^2 - c with a, b, c > 0")]
    NotAConic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conic {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl Conic {
    pub fn new(a: BigInt, b: BigInt, c: BigInt) -> Result<Self, Genus0Error> {
        if a.is_positive() && b.is_positive() && c.is_positive() {
            Ok(Conic { a, b, c })
        } else {
            Err(Genus0Error::NonPositive)
        }
    }

    pub fn from_small(a: u64, b: u64, c: u64) -> Result<Self, Genus0Error> {
        Self::new(a.into(), b.into(), c.into())
    }

    pub fn from_curve(curve: &PlaneCurve) -> Result<Self, Genus0Error> {
        let (a, b, c) = conic_coefficients(&curve.f).ok_or(Genus0Error::NotAConic)?;
        Conic::new(a, b, c)
    }

    pub fn polynomial(&self) -> MultiPoly {
        MultiPoly::from_terms([
            (Monomial::var(Var::X, 2), self.a.clone()),
            (Monomial::var(Var::Y, 2), self.b.clone()),
            (Monomial::ONE, -self.c.clone()),
        ])
    }

    pub fn curve(&self) -> PlaneCurve {
        PlaneCurve::unchecked(self.polynomial()).expect("conic is a plane curve")
    }

    pub fn contains(&self, p: &AffinePoint) -> bool {
        let a = Rational::from_integer(self.a.clone());
        let b = Rational::from_integer(self.b.clone());
        a * &p.x * &p.x + b * &p.y * &p.y == Rational::from_integer(self.c.clone())
    }
}

/// The point with least `(|Z|, |X|, |Y|)` on `a X^2 + b Y^2 = c Z^2`, or
/// `None` when the conic has no rational point.
pub fn find_conic_point(q: &Conic) -> Option<AffinePoint> {
    conic_witness(&q.a, &q.b, &q.c).map(|(x, y)| AffinePoint::new(x, y))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepParametrization {
    #[serde(skip)]
    pub conic: Conic,
    pub base_point: AffinePoint,
}

impl SweepParametrization {
    pub fn new(conic: Conic, base_point: AffinePoint) -> Result<Self, Genus0Error> {
        if !conic.contains(&base_point) {
            return Err(Genus0Error::BaseNotOnConic(Box::new(base_point)));
        }
        Ok(SweepParametrization { conic, base_point })
    }
}

/// Second intersection of the line through the base point with slope `t`.
pub fn sweep_point(p: &SweepParametrization, t: &Rational) -> AffinePoint {
    let a = Rational::from_integer(p.conic.a.clone());
    let b = Rational::from_integer(p.conic.b.clone());
    let (x0, y0) = (&p.base_point.x, &p.base_point.y);
    // a x^2 + b (y0 + t (x - x0))^2 = c; the roots in x sum to -2bt(y0 - t x0) / (a + b t^2)
    let sum = -(Rational::from_integer(2.into()) * &b * t * (y0 - t * x0)) / (a + b * t * t);
    let x1 = sum - x0;
    let y1 = y0 + t * (&x1 - x0);
    AffinePoint::new(x1, y1)
}

/// Largest `s` with `s^2 | n`.
fn square_part_root(n: &BigInt) -> BigInt {
    let mut s = BigInt::one();
    let mut m = n.abs();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        while (&m % (&p * &p)).is_zero() {
            m /= &p * &p;
            s *= &p;
        }
        while (&m % &p).is_zero() {
            m /= &p;
        }
        p += 1;
    }
    s
}

/// Slope height that reaches every point of height at most `bound`.
///
/// Writing points as `(X/Z, Y/Z)` with a common denominator, the coordinates
/// of a point of height `H` are at most `H m` in absolute value, where `m^2`
/// is the largest square dividing `a` or `b`. A slope between two such
/// points is `(Y1 Z0 - Y0 Z1) / (X1 Z0 - X0 Z1)`, so its height is at most
/// `2 H0 H m^2`. We never go below `2 bound^2`.
pub fn slope_budget(q: &Conic, base: &AffinePoint, bound: u64) -> u64 {
    let m = square_part_root(&q.a).max(square_part_root(&q.b));
    let h0 = height(&base.x).max(height(&base.y)).0;
    let proved = BigInt::from(2) * h0 * BigInt::from(bound) * &m * &m;
    let floor = 2 * bound * bound;
    proved.to_u64().unwrap_or(u64::MAX).max(floor)
}

/// Every point of height at most `bound`, generated from `base`.
pub fn sweep_enumerate(q: &Conic, base: &AffinePoint, bound: u64) -> Result<Vec<AffinePoint>, Genus0Error> {
    let param = SweepParametrization::new(q.clone(), base.clone())?;
    let hb = Height::from(bound);
    let mut out = BTreeSet::new();
    let mut keep = |p: AffinePoint| {
        if p.height() <= hb {
            out.insert(p);
        }
    };
    keep(base.clone());
    keep(AffinePoint::new(base.x.clone(), -base.y.clone()));
    let budget = slope_budget(q, base, bound);
    match SmallSweep::new(q, base, budget, bound) {
        Some(small) => small.run(&mut keep),
        None => {
            for t in enumerate_rationals(budget) {
                keep(sweep_point(&param, &t));
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// The sweep in machine integers, used when every intermediate fits.
struct SmallSweep {
    a: i128,
    b: i128,
    x0: i128,
    y0: i128,
    z0: i128,
    budget: i128,
    bound: i128,
}

impl SmallSweep {
    fn new(q: &Conic, base: &AffinePoint, budget: u64, bound: u64) -> Option<Self> {
        let z0 = base.x.denom().lcm(base.y.denom());
        let x0 = base.x.numer() * (&z0 / base.x.denom());
        let y0 = base.y.numer() * (&z0 / base.y.denom());
        let small = |v: &BigInt| v.to_i128().filter(|k| k.abs() < 1 << 20);
        let s = SmallSweep {
            a: small(&q.a)?,
            b: small(&q.b)?,
            x0: small(&x0)?,
            y0: small(&y0)?,
            z0: small(&z0)?,
            budget: i128::from(budget).min(1 << 20),
            bound: bound.into(),
        };
        (i128::from(budget) == s.budget).then_some(s)
    }

    fn run(&self, keep: &mut impl FnMut(AffinePoint)) {
        let (a, b, x0, y0, z0) = (self.a, self.b, self.x0, self.y0, self.z0);
        for n in 1..=self.budget {
            for m in -self.budget..=self.budget {
                if m.gcd(&n) != 1 {
                    continue;
                }
                // second intersection with the line through the base point in direction (n, m)
                let d = a * n * n + b * m * m;
                let k = 2 * (a * x0 * n + b * y0 * m);
                let xn = x0 * d - k * n;
                let yn = y0 * d - k * m;
                let den = z0 * d;
                let gx = xn.gcd(&den);
                let gy = yn.gcd(&den);
                let (hx, hy) = ((xn / gx).abs().max((den / gx).abs()), (yn / gy).abs().max((den / gy).abs()));
                if hx <= self.bound && hy <= self.bound {
                    keep(AffinePoint::new(
                        Rational::new(BigInt::from(xn), BigInt::from(den)),
                        Rational::new(BigInt::from(yn), BigInt::from(den)),
                    ));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn param(a: u64, b: u64, c: u64, x: Rational, y: Rational) -> SweepParametrization {
        SweepParametrization::new(Conic::from_small(a, b, c).unwrap(), AffinePoint::new(x, y)).unwrap()
    }

    #[test]
    fn find_point_examples() {
        assert_eq!(find_conic_point(&Conic::from_small(1, 1, 2).unwrap()), Some(AffinePoint::new(int(1), int(1))));
        assert_eq!(find_conic_point(&Conic::from_small(1, 1, 5).unwrap()), Some(AffinePoint::new(int(1), int(2))));
        assert_eq!(find_conic_point(&Conic::from_small(1, 1, 3).unwrap()), None);
    }

    #[test]
    fn sweep_point_examples() {
        let p = param(1, 1, 2, int(1), int(1));
        assert_eq!(sweep_point(&p, &int(0)), AffinePoint::new(int(-1), int(1)));
        assert_eq!(sweep_point(&p, &int(1)), AffinePoint::new(int(-1), int(-1)));
        assert_eq!(sweep_point(&p, &rat(-1, 2)), AffinePoint::new(rat(1, 5), rat(7, 5)));
    }

    #[test]
    fn sweep_enumerate_examples() {
        let q = Conic::from_small(1, 1, 2).unwrap();
        let base = AffinePoint::new(int(1), int(1));
        assert_eq!(sweep_enumerate(&q, &base, 1).unwrap().len(), 4);
        assert_eq!(sweep_enumerate(&q, &base, 7).unwrap(), q.curve().enumerate_points(7));
        let r = Conic::from_small(2, 3, 5).unwrap();
        assert_eq!(sweep_enumerate(&r, &base, 1).unwrap(), r.curve().enumerate_points(1));
        let off = AffinePoint::new(int(1), int(2));
        assert_eq!(sweep_enumerate(&q, &off, 3), Err(Genus0Error::BaseNotOnConic(Box::new(off.clone()))));
    }

    #[test]
    fn integer_sweep_matches_rational_sweep() {
        for (a, b, c, base) in
            [(1, 1, 2, AffinePoint::new(int(1), int(1))), (3, 5, 8, AffinePoint::new(int(1), int(-1)))]
        {
            let q = Conic::from_small(a, b, c).unwrap();
            let p = SweepParametrization::new(q.clone(), base.clone()).unwrap();
            let mut fast = BTreeSet::new();
            SmallSweep::new(&q, &base, 25, 6).unwrap().run(&mut |pt| {
                if pt.height() <= Height::from(6) {
                    fast.insert(pt);
                }
            });
            let slow: BTreeSet<AffinePoint> = enumerate_rationals(25)
                .iter()
                .map(|t| sweep_point(&p, t))
                .filter(|pt| pt.height() <= Height::from(6))
                .collect();
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn budget_uses_square_parts() {
        let q = Conic::from_small(12, 1, 13).unwrap();
        // 12 = 2^2 * 3 so m = 2
        assert_eq!(slope_budget(&q, &AffinePoint::new(int(1), int(1)), 1), 8);
        assert_eq!(slope_budget(&q, &AffinePoint::new(rat(1, 10), int(1)), 3), 2 * 10 * 3 * 4);
        // the quadratic floor wins for large bounds
        assert_eq!(slope_budget(&q, &AffinePoint::new(int(1), int(1)), 100), 20000);
    }
}
