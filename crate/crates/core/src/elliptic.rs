//! Elliptic curves: reduction of plane cubics to `y^2 = x^3 + A x + B`,
//! the chord-tangent group law and Nagell-Lutz torsion.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::{common_denominator, isqrt, rational_roots_low, Rational};
use crate::curve::{AffinePoint, PlaneCurve};
use crate::poly::{gcd, Monomial, MultiPoly, QPoly, Var};

/// Largest order a rational torsion point can have.
pub const MAZUR_BOUND: u32 = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EllipticError {
    #[error("the cubic is singular")]
    SingularCubic,
    #[error("unsupported genus-1 model: {0}")]
    Unsupported(String),
    #[error("point {0} is not on the curve")]
    PointNotOnCurve(Box<AffinePoint>),
}

/// `y^2 = x^3 + A x + B` with nonzero discriminant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeierstrassCurve {
    pub a: BigInt,
    pub b: BigInt,
}

impl WeierstrassCurve {
    pub fn new(a: BigInt, b: BigInt) -> Result<Self, EllipticError> {
        let w = WeierstrassCurve { a, b };
        if w.disc().is_zero() {
            Err(EllipticError::SingularCubic)
        } else {
            Ok(w)
        }
    }

    pub fn from_small(a: i64, b: i64) -> Result<Self, EllipticError> {
        Self::new(a.into(), b.into())
    }

    /// `-16 (4 A^3 + 27 B^2)`.
    pub fn disc(&self) -> BigInt {
        BigInt::from(-16) * self.nagell_lutz_quantity()
    }

    /// `4 A^3 + 27 B^2`.
    pub fn nagell_lutz_quantity(&self) -> BigInt {
        BigInt::from(4) * &self.a * &self.a * &self.a + BigInt::from(27) * &self.b * &self.b
    }

    /// `y^2 - x^3 - A x - B` as a plane curve.
    pub fn polynomial(&self) -> MultiPoly {
        MultiPoly::from_terms([
            (Monomial::var(Var::Y, 2), BigInt::one()),
            (Monomial::var(Var::X, 3), -BigInt::one()),
            (Monomial::var(Var::X, 1), -self.a.clone()),
            (Monomial::ONE, -self.b.clone()),
        ])
    }

    pub fn curve(&self) -> PlaneCurve {
        PlaneCurve::unchecked(self.polynomial()).expect("Weierstrass model is a plane cubic")
    }

    pub fn contains(&self, p: &ECPoint) -> bool {
        match p {
            ECPoint::Infinity => true,
            ECPoint::Affine(x, y) => y * y == x * x * x + self.a_q() * x + self.b_q(),
        }
    }

    fn a_q(&self) -> Rational {
        Rational::from_integer(self.a.clone())
    }

    fn b_q(&self) -> Rational {
        Rational::from_integer(self.b.clone())
    }
}

impl Serialize for WeierstrassCurve {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("WeierstrassCurve", 3)?;
        st.serialize_field("a", &self.a.to_string())?;
        st.serialize_field("b", &self.b.to_string())?;
        st.serialize_field("disc", &self.disc().to_string())?;
        st.end()
    }
}

impl fmt::Display for WeierstrassCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^2 = x^3")?;
        let sign = |k: &BigInt| if k.is_negative() { "-" } else { "+" };
        match self.a.abs() {
            k if k.is_zero() => {}
            k if k.is_one() => write!(f, " {} x", sign(&self.a))?,
            k => write!(f, " {} {k}x", sign(&self.a))?,
        }
        if !self.b.is_zero() {
            write!(f, " {} {}", sign(&self.b), self.b.abs())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ECPoint {
    Infinity,
    Affine(Rational, Rational),
}

impl ECPoint {
    pub fn affine(x: Rational, y: Rational) -> Self {
        ECPoint::Affine(x, y)
    }

    pub fn neg(&self) -> Self {
        match self {
            ECPoint::Infinity => ECPoint::Infinity,
            ECPoint::Affine(x, y) => ECPoint::Affine(x.clone(), -y.clone()),
        }
    }

    pub fn to_affine(&self) -> Option<AffinePoint> {
        match self {
            ECPoint::Infinity => None,
            ECPoint::Affine(x, y) => Some(AffinePoint::new(x.clone(), y.clone())),
        }
    }
}

impl fmt::Display for ECPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ECPoint::Infinity => write!(f, "O"),
            ECPoint::Affine(x, y) => write!(f, "({x}, {y})"),
        }
    }
}

pub fn ec_add(w: &WeierstrassCurve, p: &ECPoint, q: &ECPoint) -> ECPoint {
    let (x1, y1, x2, y2) = match (p, q) {
        (ECPoint::Infinity, _) => return q.clone(),
        (_, ECPoint::Infinity) => return p.clone(),
        (ECPoint::Affine(x1, y1), ECPoint::Affine(x2, y2)) => (x1, y1, x2, y2),
    };
    let slope = if x1 == x2 {
        if (y1 + y2).is_zero() {
            return ECPoint::Infinity;
        }
        let three = Rational::from_integer(3.into());
        (three * x1 * x1 + w.a_q()) / (y1 + y1)
    } else {
        (y2 - y1) / (x2 - x1)
    };
    let x3 = &slope * &slope - x1 - x2;
    let y3 = slope * (x1 - &x3) - y1;
    ECPoint::Affine(x3, y3)
}

pub fn ec_mul(w: &WeierstrassCurve, n: u32, p: &ECPoint) -> ECPoint {
    let mut acc = ECPoint::Infinity;
    for _ in 0..n {
        acc = ec_add(w, &acc, p);
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Order {
    Finite(u32),
    Infinite,
}

/// Least `n <= 12` with `n P = O`, else infinite order.
pub fn order_of_point(w: &WeierstrassCurve, p: &ECPoint) -> Order {
    let mut acc = p.clone();
    for n in 1..=MAZUR_BOUND {
        if acc == ECPoint::Infinity {
            return Order::Finite(n);
        }
        acc = ec_add(w, &acc, p);
    }
    Order::Infinite
}

/// Affine torsion points, sorted.
pub fn nagell_lutz_torsion(w: &WeierstrassCurve) -> Vec<ECPoint> {
    let d = w.nagell_lutz_quantity().abs();
    let mut candidates = Vec::new();
    let roots_at = |y2: &BigInt| {
        // integer roots of x^3 + A x + (B - y^2)
        let coeffs = vec![&w.b - y2, w.a.clone(), BigInt::zero(), BigInt::one()];
        rational_roots_low(&coeffs).into_iter().filter(|r| r.is_integer()).collect::<Vec<_>>()
    };
    for x in roots_at(&BigInt::zero()) {
        candidates.push(ECPoint::Affine(x, Rational::zero()));
    }
    let top = isqrt(&d);
    let mut y = BigInt::one();
    while y <= top {
        let y2 = &y * &y;
        if (&d % &y2).is_zero() {
            for x in roots_at(&y2) {
                let yq = Rational::from_integer(y.clone());
                candidates.push(ECPoint::Affine(x.clone(), yq.clone()));
                candidates.push(ECPoint::Affine(x, -yq));
            }
        }
        y += 1;
    }
    let mut out: Vec<ECPoint> =
        candidates.into_iter().filter(|p| matches!(order_of_point(w, p), Order::Finite(_))).collect();
    out.sort();
    out.dedup();
    out
}

/// Ratio of integer polynomials in x, y, kept with no common factor and a
/// positive leading coefficient in the denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFn {
    pub num: MultiPoly,
    pub den: MultiPoly,
}

impl RatFn {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFn { num, den: MultiPoly::one() };
        }
        let g = gcd(&num, &den);
        let (mut num, mut den) = (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"));
        let c = num.content().gcd(&den.content());
        if !c.is_one() {
            num = MultiPoly::from_terms(num.terms().map(|(m, k)| (*m, k / &c)));
            den = MultiPoly::from_terms(den.terms().map(|(m, k)| (*m, k / &c)));
        }
        if den.leading().is_some_and(|(_, k)| k.is_negative()) {
            num = -&num;
            den = -&den;
        }
        RatFn { num, den }
    }

    pub fn from_q(num: &QPoly, den: &QPoly) -> Self {
        let (n, dn) = num.clear_denominators();
        let (d, dd) = den.clear_denominators();
        RatFn::new(n.scale(&dd), d.scale(&dn))
    }

    pub fn poly(p: &QPoly) -> Self {
        RatFn::from_q(p, &QPoly::one())
    }

    pub fn var(v: Var) -> Self {
        RatFn { num: MultiPoly::var(v), den: MultiPoly::one() }
    }

    pub fn eval(&self, p: &AffinePoint) -> Option<Rational> {
        let d = self.den.eval(&p.coords());
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(&p.coords()) / d)
        }
    }

    /// `self(f1, f2)`.
    pub fn compose(&self, inner: &RatMap) -> RatFn {
        let (n, nx, ny) = substitute(&self.num, inner);
        let (d, dx, dy) = substitute(&self.den, inner);
        let mut num = n;
        let mut den = d;
        // self.num(F) = n / (d1^nx d2^ny), self.den(F) = d / (d1^dx d2^dy)
        for (p, e_num, e_den) in [(&inner.0.den, nx, dx), (&inner.1.den, ny, dy)] {
            if e_den > e_num {
                num = &num * &p.pow(e_den - e_num);
            } else if e_num > e_den {
                den = &den * &p.pow(e_num - e_den);
            }
        }
        RatFn::new(num, den)
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() && self.den.constant_term().is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl Serialize for RatFn {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `P(n1/d1, n2/d2) * d1^deg_x(P) * d2^deg_y(P)`, with those exponents.
fn substitute(p: &MultiPoly, inner: &RatMap) -> (MultiPoly, u32, u32) {
    let dx = p.degree_in(Var::X);
    let dy = p.degree_in(Var::Y);
    let powers = |q: &MultiPoly, n: u32| {
        let mut v = vec![MultiPoly::one()];
        for i in 1..=n as usize {
            v.push(&v[i - 1] * q);
        }
        v
    };
    let (n1, d1) = (powers(&inner.0.num, dx), powers(&inner.0.den, dx));
    let (n2, d2) = (powers(&inner.1.num, dy), powers(&inner.1.den, dy));
    let mut out = MultiPoly::zero();
    for (m, c) in p.terms() {
        let (i, j) = (m.0[0] as usize, m.0[1] as usize);
        let t = &(&(&n1[i] * &d1[dx as usize - i]) * &n2[j]) * &d2[dy as usize - j];
        out = &out + &t.scale(c);
    }
    (out, dx, dy)
}

/// A pair of rational functions `(x, y) -> (F1, F2)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RatMap(pub RatFn, pub RatFn);

impl RatMap {
    pub fn identity() -> Self {
        RatMap(RatFn::var(Var::X), RatFn::var(Var::Y))
    }

    /// `self after inner`.
    pub fn compose(&self, inner: &RatMap) -> RatMap {
        RatMap(self.0.compose(inner), self.1.compose(inner))
    }

    pub fn apply(&self, p: &AffinePoint) -> Option<AffinePoint> {
        Some(AffinePoint::new(self.0.eval(p)?, self.1.eval(p)?))
    }

    /// Conditions `den = 0` where the map is undefined.
    pub fn exceptional(&self) -> Vec<MultiPoly> {
        let mut out: Vec<MultiPoly> =
            [&self.0.den, &self.1.den].into_iter().filter(|d| !d.is_constant()).cloned().collect();
        out.dedup();
        out
    }
}

/// Forward map from the source curve to the model and its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BirationalMapPair {
    pub forward: RatMap,
    pub backward: RatMap,
}

impl BirationalMapPair {
    pub fn forward_exceptional(&self) -> Vec<MultiPoly> {
        self.forward.exceptional()
    }

    pub fn backward_exceptional(&self) -> Vec<MultiPoly> {
        self.backward.exceptional()
    }

    /// `backward(forward(p))`, or `None` where either map is undefined.
    pub fn round_trip(&self, p: &AffinePoint) -> Option<AffinePoint> {
        self.backward.apply(&self.forward.apply(p)?)
    }
}

impl Serialize for BirationalMapPair {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let strs = |v: Vec<MultiPoly>| v.iter().map(|p| format!("{p} = 0")).collect::<Vec<_>>();
        let mut st = s.serialize_struct("BirationalMapPair", 4)?;
        st.serialize_field("forward", &self.forward)?;
        st.serialize_field("backward", &self.backward)?;
        st.serialize_field("forward_exceptional", &strs(self.forward_exceptional()))?;
        st.serialize_field("backward_exceptional", &strs(self.backward_exceptional()))?;
        st.end()
    }
}

fn qvar(v: Var) -> QPoly {
    QPoly::var(v)
}

fn qc(c: Rational) -> QPoly {
    QPoly::constant(c)
}

fn qi(c: i64) -> Rational {
    Rational::from_integer(c.into())
}

/// Univariate coefficients (lowest first) of a polynomial in x only.
fn uni(p: &QPoly) -> Vec<Rational> {
    let d = p.degree_in(Var::X) as usize;
    let mut out = vec![Rational::zero(); d + 1];
    for (m, c) in p.terms() {
        out[m.0[0] as usize] = c.clone();
    }
    out
}

fn from_uni(c: &[Rational]) -> QPoly {
    QPoly::from_terms(c.iter().enumerate().map(|(i, k)| (Monomial::var(Var::X, i as u32), k.clone())))
}

const SHAPE: [[u32; 2]; 7] = [[0, 2], [1, 1], [0, 1], [3, 0], [2, 0], [1, 0], [0, 0]];

fn is_weierstrass_shaped(f: &QPoly) -> bool {
    f.terms().all(|(m, _)| m.0[2] == 0 && SHAPE.contains(&[m.0[0], m.0[1]]))
        && !f.coeff(&Monomial::var(Var::Y, 2)).is_zero()
        && !f.coeff(&Monomial::var(Var::X, 3)).is_zero()
}

/// Largest `d` with `d^4 | A` and `d^6 | B`.
fn minimal_scale(a: &BigInt, b: &BigInt) -> BigInt {
    let mut n = if a.is_zero() {
        b.abs()
    } else if b.is_zero() {
        a.abs()
    } else {
        a.gcd(b)
    };
    let mut d = BigInt::one();
    let mut p = BigInt::from(2);
    let (mut a, mut b) = (a.clone(), b.clone());
    while &p * &p <= n {
        if (&n % &p).is_zero() {
            let (p4, p6) = (p.pow(4), p.pow(6));
            while (&a % &p4).is_zero() && (&b % &p6).is_zero() && !(a.is_zero() && b.is_zero()) {
                a /= &p4;
                b /= &p6;
                d *= &p;
            }
            while (&n % &p).is_zero() {
                n /= &p;
            }
        }
        p += 1;
    }
    if n > BigInt::one() {
        let (p4, p6) = (n.pow(4), n.pow(6));
        while (&a % &p4).is_zero() && (&b % &p6).is_zero() {
            a /= &p4;
            b /= &p6;
            d *= &n;
        }
    }
    d
}

/// Reduce `beta y^2 + L(x) y + P(x)` (rational coefficients) to an integral
/// minimal short model. Returns `(A, B, forward, backward)`.
fn shape_route(f: &QPoly) -> (BigInt, BigInt, RatMap, RatMap) {
    let f = if f.coeff(&Monomial::var(Var::Y, 2)).is_negative() { -f } else { f.clone() };
    let beta = f.coeff(&Monomial::var(Var::Y, 2));
    let l = from_uni(&[f.coeff(&Monomial::var(Var::Y, 1)), f.coeff(&Monomial([1, 1, 0]))]);
    let p = from_uni(&(0..4).map(|i| f.coeff(&Monomial::var(Var::X, i))).collect::<Vec<_>>());
    let r = uni(&(&(&l * &l) - &p.scale(&(qi(4) * &beta))));
    let kappa = r[3].clone();
    let (r2, r1, r0) = (r[2].clone(), r[1].clone(), r[0].clone());
    let s = &r1 * &kappa;
    let t = &r0 * &kappa * &kappa;
    let a1 = &s - &r2 * &r2 / qi(3);
    let b1 = &t - &s * &r2 / qi(3) + qi(2) * &r2 * &r2 * &r2 / qi(27);
    let u = common_denominator([&a1, &b1]);
    let uq = Rational::from_integer(u.clone());
    let a_int = (&a1 * uq.pow(4)).to_integer();
    let b_int = (&b1 * uq.pow(6)).to_integer();
    let d = minimal_scale(&a_int, &b_int);
    let lam = uq / Rational::from_integer(d.clone());
    let a = (&a1 * lam.pow(4)).to_integer();
    let b = (&b1 * lam.pow(6)).to_integer();
    // forward: X = lam^2 (kappa x + r2/3), Y = lam^3 kappa (2 beta y + L(x))
    let (x, y) = (qvar(Var::X), qvar(Var::Y));
    let fx = (&x.scale(&kappa) + &qc(&r2 / qi(3))).scale(&lam.pow(2));
    let fy = (&y.scale(&(qi(2) * &beta)) + &l).scale(&(&kappa * lam.pow(3)));
    let forward = RatMap(RatFn::poly(&fx), RatFn::poly(&fy));
    // backward: x = (X / lam^2 - r2/3) / kappa, y = (Y / (lam^3 kappa) - L(x)) / (2 beta)
    let bx = (&x.scale(&(Rational::one() / lam.pow(2))) - &qc(&r2 / qi(3))).scale(&(Rational::one() / &kappa));
    let l_at_bx = l.compose(&[bx.clone(), QPoly::zero(), QPoly::zero()]);
    let by =
        (&y.scale(&(Rational::one() / (lam.pow(3) * &kappa))) - &l_at_bx).scale(&(Rational::one() / (qi(2) * beta)));
    let backward = RatMap(RatFn::poly(&bx), RatFn::poly(&by));
    (a, b, forward, backward)
}

/// Reduce a nonsingular plane cubic with a rational point to a short
/// Weierstrass model, with maps both ways.
pub fn cubic_to_weierstrass(
    c: &PlaneCurve,
    p: &AffinePoint,
) -> Result<(WeierstrassCurve, BirationalMapPair), EllipticError> {
    if c.degree() != 3 {
        return Err(EllipticError::Unsupported(format!("degree {} curve", c.degree())));
    }
    if !c.contains(p) {
        return Err(EllipticError::PointNotOnCurve(Box::new(p.clone())));
    }
    let fq = c.f.to_qpoly();
    if is_weierstrass_shaped(&fq) {
        let (a, b, forward, backward) = shape_route(&fq);
        let w = WeierstrassCurve::new(a, b)?;
        return Ok((w, BirationalMapPair { forward, backward }));
    }
    match c.is_smooth_projective() {
        Ok(true) => {}
        Ok(false) => return Err(EllipticError::SingularCubic),
        Err(_) => return Err(EllipticError::Unsupported("smoothness undecided".into())),
    }
    let (to_quartic, from_quartic, delta) = tangent_chart(&c.f, p);
    let (x, y) = (qvar(Var::X), qvar(Var::Y));
    let q = delta[0].clone();
    let (fwd2, bwd2, model) = if q.is_zero() {
        // flex: t = 1/w, s = r/w^2 turns s^2 = delta(t) into r^2 = cubic(w)
        let one = QPoly::one();
        let fwd = RatMap(RatFn::from_q(&one, &x), RatFn::from_q(&y, &(&x * &x)));
        let bwd = fwd.clone();
        let mut model = &y * &y;
        for (i, k) in delta.iter().enumerate() {
            model = &model - &QPoly::term(Monomial::var(Var::X, 4 - i as u32), k.clone());
        }
        (fwd, bwd, model)
    } else {
        quartic_to_weierstrass(&delta)
    };
    let (a, b, fwd3, bwd3) = shape_route(&model);
    let w = WeierstrassCurve::new(a, b)?;
    let forward = fwd3.compose(&fwd2.compose(&to_quartic));
    let backward = from_quartic.compose(&bwd2.compose(&bwd3));
    Ok((w, BirationalMapPair { forward, backward }))
}

/// Lines through `p` with direction `a + t b`, `a` tangent at `p`. Returns
/// maps between the curve and `(t, s)` on `s^2 = delta(t)`, and the
/// coefficients of `delta` (lowest first, padded to degree 4).
fn tangent_chart(f: &MultiPoly, p: &AffinePoint) -> (RatMap, RatMap, Vec<Rational>) {
    let fq = f.to_qpoly();
    let grad_x = fq.derivative(Var::X).eval(&p.coords());
    let grad_y = fq.derivative(Var::Y).eval(&p.coords());
    let (ax, ay) = (-grad_y, grad_x);
    let (bx, by) = if ay.is_zero() { (Rational::zero(), Rational::one()) } else { (Rational::one(), Rational::zero()) };
    let (x, y) = (qvar(Var::X), qvar(Var::Y));
    // f(p + lam (a + t b)) with t in the x slot and lam in the y slot
    let dir_x = &qc(ax.clone()) + &x.scale(&bx);
    let dir_y = &qc(ay.clone()) + &x.scale(&by);
    let img_x = &qc(p.x.clone()) + &(&y * &dir_x);
    let img_y = &qc(p.y.clone()) + &(&y * &dir_y);
    let g = fq.compose(&[img_x, img_y, QPoly::zero()]);
    let cs = g.coefficients_in(Var::Y);
    let coef = |i: usize| cs.get(i).cloned().unwrap_or_default();
    let (c1, c2, c3) = (coef(1), coef(2), coef(3));
    let delta_poly = &(&c2 * &c2) - &(&c1 * &c3).scale(&qi(4));
    let mut delta = uni(&delta_poly);
    delta.resize(5, Rational::zero());

    // curve -> (t, lam) -> (t, s) with s = 2 c3(t) lam + c2(t)
    let (lam, t) = if ay.is_zero() {
        let lam = RatFn::poly(&(&x - &qc(p.x.clone())).scale(&(Rational::one() / &ax)));
        let t = RatFn::from_q(&(&y - &qc(p.y.clone())).scale(&ax), &(&x - &qc(p.x.clone())));
        (lam, t)
    } else {
        let lam = RatFn::poly(&(&y - &qc(p.y.clone())).scale(&(Rational::one() / &ay)));
        let num = &(&x - &qc(p.x.clone())).scale(&ay) - &(&y - &qc(p.y.clone())).scale(&ax);
        let t = RatFn::from_q(&num, &(&y - &qc(p.y.clone())));
        (lam, t)
    };
    let s_poly = &(&c3 * &y).scale(&qi(2)) + &c2;
    let t_lam = RatMap(t.clone(), lam);
    let to_quartic = RatMap(t, RatFn::poly(&s_poly).compose(&t_lam));

    // (t, s) -> curve with lam = -2 c1(t) / (s + c2(t))
    let lam_back = RatFn::from_q(&c1.scale(&qi(-2)), &(&y + &c2));
    let back_x = &qc(p.x.clone()) + &(&y * &dir_x);
    let back_y = &qc(p.y.clone()) + &(&y * &dir_y);
    let inner = RatMap(RatFn::var(Var::X), lam_back);
    let from_quartic = RatMap(RatFn::poly(&back_x).compose(&inner), RatFn::poly(&back_y).compose(&inner));
    (to_quartic, from_quartic, delta)
}

/// `v^2 = a u^4 + b u^3 + c u^2 + d u + q^2` with `q != 0` to
/// `Y^2 + a1 XY + a3 Y = X^3 + a2 X^2 + a4 X + a6`.
fn quartic_to_weierstrass(delta: &[Rational]) -> (RatMap, RatMap, QPoly) {
    let (q2, d, c, b, a) = (&delta[0], &delta[1], &delta[2], &delta[3], &delta[4]);
    let q = crate::arith::rational_sqrt(q2).expect("constant term is a square");
    let (u, v) = (qvar(Var::X), qvar(Var::Y));
    let two_q = &q * qi(2);
    let d2_over_2q = d * d / &two_q;
    // X = (2q(v + q) + d u) / u^2
    let xn = &(&v + &qc(q.clone())).scale(&two_q) + &u.scale(d);
    let fx = RatFn::from_q(&xn, &(&u * &u));
    // Y = (4q^2 (v + q) + 2q (d u + c u^2) - (d^2/2q) u^2) / u^3
    let yn = &(&(&v + &qc(q.clone())).scale(&(qi(4) * q2)) + &(&u.scale(d) + &(&u * &u).scale(c)).scale(&two_q))
        - &(&u * &u).scale(&d2_over_2q);
    let fy = RatFn::from_q(&yn, &(&(&u * &u) * &u));
    let forward = RatMap(fx, fy);
    // u = (2q (X + c) - d^2/2q) / Y, v = -q + u (u X - d) / 2q
    let (xl, yl) = (qvar(Var::X), qvar(Var::Y));
    let un = &(&xl + &qc(c.clone())).scale(&two_q) - &qc(d2_over_2q.clone());
    let bu = RatFn::from_q(&un, &yl);
    // v as a polynomial in (U, X) held in (x, y) slots
    let v_poly = &qc(-q.clone()) + &(&u * &(&(&u * &v) - &qc(d.clone()))).scale(&(Rational::one() / &two_q));
    let bv = RatFn::poly(&v_poly).compose(&RatMap(bu.clone(), RatFn::var(Var::X)));
    let backward = RatMap(bu, bv);
    let a1 = d / &q;
    let a2 = c - d * d / (qi(4) * q2);
    let a3 = &two_q * b;
    let a4 = -(qi(4) * q2 * a);
    let a6 = &a2 * &a4;
    let x3 = &(&xl * &xl) * &xl;
    let lhs = &(&(&yl * &yl) + &(&xl * &yl).scale(&a1)) + &yl.scale(&a3);
    let rhs = &(&(&x3 + &(&xl * &xl).scale(&a2)) + &xl.scale(&a4)) + &qc(a6);
    (forward, backward, &lhs - &rhs)
}
