//! Removing finitely many x-fibers from a curve.
//!
//! The curve `f = 0` minus the points with `g(x) = 0` is the space curve
//! `{f = 0, g(x) z = 1}`. It is projected from a rational point of the plane
//! at infinity back to a plane curve `h = 0`, on which the removed points
//! have gone to infinity.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::{rational_roots_low, Height, Rational};
use crate::curve::{AffinePoint, PlaneCurve};
use crate::poly::{gcd, MultiPoly, Var};
use crate::upoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExciseError {
    #[error("x = {0} is listed twice")]
    DuplicateExcisionValue(Rational),
    #[error("f({0}, y) vanishes identically")]
    VerticalFiber(Rational),
    #[error("no certified projection center of height <= {0}")]
    BudgetExhausted(u64),
    #[error("resultant vanishes identically for this center")]
    DegenerateElimination,
    #[error("point {0} has {1} rational preimages")]
    CertificateViolation(Box<AffinePoint>, usize),
    #[error("point {0} has no rational preimage")]
    NoRationalPreimage(Box<AffinePoint>),
    #[error("point {0} is not on the eliminant")]
    NotOnEliminant(Box<AffinePoint>),
}

/// `{f(x, y) = 0, g(x) z - 1 = 0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceSystem {
    pub f: MultiPoly,
    pub g: MultiPoly,
    pub excised_x: Vec<Rational>,
}

impl Serialize for SpaceSystem {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SpaceSystem", 3)?;
        st.serialize_field("f", &self.f)?;
        st.serialize_field("g", &self.g)?;
        let xs: Vec<String> = self.excised_x.iter().map(|x| x.to_string()).collect();
        st.serialize_field("excised_x", &xs)?;
        st.end()
    }
}

impl SpaceSystem {
    pub fn aux(&self) -> MultiPoly {
        &(&self.g * &MultiPoly::var(Var::Z)) - &MultiPoly::one()
    }

    pub fn equations(&self) -> [MultiPoly; 2] {
        [self.f.clone(), self.aux()]
    }

    pub fn g_at(&self, x: &Rational) -> Rational {
        self.g.eval(&[x.clone(), Rational::zero(), Rational::zero()])
    }

    /// `(x, y) -> (x, y, 1/g(x))`, undefined on the excised fibers.
    pub fn embed(&self, p: &AffinePoint) -> Option<[Rational; 3]> {
        let gx = self.g_at(&p.x);
        if gx.is_zero() {
            None
        } else {
            Some([p.x.clone(), p.y.clone(), Rational::one() / gx])
        }
    }

    pub fn contains(&self, q: &[Rational; 3]) -> bool {
        self.f.eval(q).is_zero() && self.aux().eval(q).is_zero()
    }
}

pub fn build_excision_system(c: &PlaneCurve, xs: &[Rational]) -> Result<SpaceSystem, ExciseError> {
    let mut seen = BTreeSet::new();
    let mut g = MultiPoly::one();
    for p in xs {
        if !seen.insert(p.clone()) {
            return Err(ExciseError::DuplicateExcisionValue(p.clone()));
        }
        if c.f.specialize(Var::X, p).is_zero() {
            return Err(ExciseError::VerticalFiber(p.clone()));
        }
        let lin = MultiPoly::from_univariate(Var::X, &[-p.numer().clone(), p.denom().clone()]);
        g = &g * &lin;
    }
    Ok(SpaceSystem { f: c.f.clone(), g: g.canonical(), excised_x: xs.to_vec() })
}

/// A point `(c0 : c1 : c2 : 0)` of the plane at infinity, primitive, with
/// first nonzero coordinate positive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ProjectionCenter(pub [i64; 3]);

impl ProjectionCenter {
    pub fn height(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    /// Candidates of height exactly `h`, in lexicographic order.
    pub fn of_height(h: u64) -> Vec<ProjectionCenter> {
        let h = h as i64;
        let mut out = Vec::new();
        for a in -h..=h {
            for b in -h..=h {
                for c in -h..=h {
                    let v = [a, b, c];
                    let first = v.iter().find(|x| **x != 0);
                    if first.is_none_or(|f| *f < 0) {
                        continue;
                    }
                    if v.iter().map(|x| x.abs()).max() != Some(h) {
                        continue;
                    }
                    if v.iter().fold(0i64, |g, x| g.gcd(x)) != 1 {
                        continue;
                    }
                    out.push(ProjectionCenter(v));
                }
            }
        }
        out
    }

    /// Unimodular `N` with `N c = (0, 0, 1)`.
    pub fn coordinate_matrix(&self) -> [[i64; 3]; 3] {
        let [d0, d1, d2] = self.0;
        if d0 == 0 && d1 == 0 {
            return [[1, 0, 0], [0, 1, 0], [0, 0, d2]];
        }
        let e = d0.extended_gcd(&d1);
        let (g1, s, t) = if e.gcd < 0 { (-e.gcd, -e.x, -e.y) } else { (e.gcd, e.x, e.y) };
        let (a, b) = (d0 / g1, d1 / g1);
        let e2 = g1.extended_gcd(&d2);
        let (s2, t2) = if e2.gcd < 0 { (-e2.x, -e2.y) } else { (e2.x, e2.y) };
        let mut n1 = [-b, a, 0];
        let mut n2 = [-d2 * s, -d2 * t, g1];
        if n1.iter().find(|x| **x != 0).is_some_and(|x| *x < 0) {
            n1 = n1.map(|x| -x);
            n2 = n2.map(|x| -x);
        }
        [n1, n2, [s2 * s, s2 * t, t2]]
    }
}

impl std::fmt::Display for ProjectionCenter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}:{}:{}:0)", self.0[0], self.0[1], self.0[2])
    }
}

fn det3(m: &[[i64; 3]; 3]) -> i64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Inverse of a unimodular integer matrix.
fn inverse3(m: &[[i64; 3]; 3]) -> [[i64; 3]; 3] {
    let d = det3(m);
    assert!(d == 1 || d == -1, "coordinate change must be unimodular");
    let mut inv = [[0i64; 3]; 3];
    for (i, row) in inv.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            *entry = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) * d;
        }
    }
    inv
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmpiricalCertificate {
    pub check_height: Height,
    pub injective_on_checked: bool,
    pub no_extra_rationals_up_to_height: bool,
    pub degree_of_h: u32,
    pub points_projected: usize,
    pub points_pulled_back: usize,
}

impl EmpiricalCertificate {
    pub fn certified(&self) -> bool {
        self.injective_on_checked && self.no_extra_rationals_up_to_height
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExcisionRecord {
    pub source: SpaceSystem,
    pub center: ProjectionCenter,
    /// `N`: new coordinates `(u, v, t) = N (x, y, z)`; `w` is fixed.
    pub coordinate_change: [[i64; 3]; 3],
    pub inverse: [[i64; 3]; 3],
    pub h: MultiPoly,
    pub certificate: EmpiricalCertificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Pullback {
    Point(AffinePoint),
    AtInfinity,
}

impl ExcisionRecord {
    /// The 4x4 change of coordinates on `(x : y : z : w)`.
    pub fn coordinate_change_4x4(&self) -> [[i64; 4]; 4] {
        let mut m = [[0i64; 4]; 4];
        for i in 0..3 {
            m[i][..3].copy_from_slice(&self.coordinate_change[i]);
        }
        m[3][3] = 1;
        m
    }

    pub fn curve(&self) -> PlaneCurve {
        PlaneCurve::unchecked(self.h.clone()).expect("eliminant is a nonconstant plane polynomial")
    }

    /// Image in the plane of a point of the source curve off the excised fibers.
    pub fn project(&self, p: &AffinePoint) -> Option<AffinePoint> {
        let q = self.source.embed(p)?;
        let [u, v, _] = apply(&self.coordinate_change, &q);
        Some(AffinePoint::new(u, v))
    }

    pub fn pullback_point(&self, q: &AffinePoint) -> Result<Pullback, ExciseError> {
        if !self.h.eval(&q.coords()).is_zero() {
            return Err(ExciseError::NotOnEliminant(Box::new(q.clone())));
        }
        let (fu, gu) = transformed(&self.source, &self.inverse);
        let at = [Some(q.x.clone()), Some(q.y.clone()), None];
        let a = fu.eval_partial(&at).clear_denominators().0;
        let b = gu.eval_partial(&at).clear_denominators().0;
        let ua = upoly::from_ints(&a.to_univariate(Var::Z).unwrap());
        let ub = upoly::from_ints(&b.to_univariate(Var::Z).unwrap());
        let common = upoly::gcd(&ua, &ub);
        let roots = if common.is_empty() { Vec::new() } else { rational_roots_low(&upoly::to_primitive_ints(&common)) };
        let mut pre = Vec::new();
        for t in roots {
            let pt = apply(&self.inverse, &[q.x.clone(), q.y.clone(), t]);
            if self.source.contains(&pt) {
                pre.push(AffinePoint::new(pt[0].clone(), pt[1].clone()));
            }
        }
        pre.sort();
        pre.dedup();
        match pre.len() {
            1 => Ok(Pullback::Point(pre.pop().unwrap())),
            0 => {
                let deg_f = fu.degree_in(Var::Z) as usize;
                let deg_g = gu.degree_in(Var::Z) as usize;
                if ua.len() <= deg_f && ub.len() <= deg_g {
                    Ok(Pullback::AtInfinity)
                } else {
                    Err(ExciseError::NoRationalPreimage(Box::new(q.clone())))
                }
            }
            n => Err(ExciseError::CertificateViolation(Box::new(q.clone()), n)),
        }
    }
}

fn apply(m: &[[i64; 3]; 3], p: &[Rational; 3]) -> [Rational; 3] {
    [0, 1, 2]
        .map(|i| (0..3).fold(Rational::zero(), |acc, j| acc + Rational::from_integer(BigInt::from(m[i][j])) * &p[j]))
}

/// `f` and `g z - 1` rewritten in `(u, v, t)`, held in the x, y, z slots.
fn transformed(s: &SpaceSystem, inverse: &[[i64; 3]; 3]) -> (MultiPoly, MultiPoly) {
    let lin = |row: &[i64; 3]| {
        let mut p = MultiPoly::zero();
        for (v, c) in Var::ALL.iter().zip(row) {
            if *c != 0 {
                p = &p + &MultiPoly::var(*v).scale(&BigInt::from(*c));
            }
        }
        p
    };
    let images = [lin(&inverse[0]), lin(&inverse[1]), lin(&inverse[2])];
    (s.f.compose(&images), s.aux().compose(&images))
}

/// Whether `c` may lie on the closure of the space curve at infinity.
///
/// Points at infinity of the closure come from `x` or `y` growing (giving
/// `(X : Y : 0)` with `f_d(X, Y) = 0`, or `(0 : 1 : 0)`), or from `x`
/// approaching a root of `g` (giving `(0 : 0 : 1)`, or `(0 : a : b)` when
/// `f` also has a vertical asymptote there). The test is conservative.
pub fn on_closure_superset(s: &SpaceSystem, c: &ProjectionCenter) -> bool {
    let [c0, c1, c2] = c.0;
    if c2 == 0 {
        let d = s.f.total_degree();
        let top = MultiPoly::from_terms(s.f.terms().filter(|(m, _)| m.degree() == d).map(|(m, k)| (*m, k.clone())));
        let at = [Rational::from_integer(c0.into()), Rational::from_integer(c1.into()), Rational::zero()];
        return top.eval(&at).is_zero() || (c0 == 0 && !leading_y(&s.f).is_constant());
    }
    if s.g.is_constant() || c0 != 0 {
        return false;
    }
    if c1 == 0 {
        return true;
    }
    !gcd(&leading_y(&s.f), &s.g).is_constant()
}

fn leading_y(f: &MultiPoly) -> MultiPoly {
    f.coefficients_in(Var::Y).pop().unwrap_or_default()
}

/// Eliminant of the projection from `center`, without certification.
pub fn eliminate(s: &SpaceSystem, center: &ProjectionCenter) -> Result<MultiPoly, ExciseError> {
    let n = center.coordinate_matrix();
    let (fu, gu) = transformed(s, &inverse3(&n));
    let raw = match (fu.uses(Var::Z), gu.uses(Var::Z)) {
        (true, true) => fu.resultant(&gu, Var::Z).expect("both involve t"),
        (false, true) => fu.clone(),
        (true, false) => gu.clone(),
        (false, false) => return Err(ExciseError::DegenerateElimination),
    };
    if raw.is_zero() || raw.is_constant() {
        return Err(ExciseError::DegenerateElimination);
    }
    let mut r = raw.canonical();
    // components where both leading coefficients in t vanish are artifacts
    let lf = fu.coefficients_in(Var::Z).pop().unwrap_or_default();
    let lg = gu.coefficients_in(Var::Z).pop().unwrap_or_default();
    let both = gcd(&lf, &lg);
    if fu.uses(Var::Z) && gu.uses(Var::Z) && !both.is_constant() {
        loop {
            let d = gcd(&r, &both);
            if d.is_constant() {
                break;
            }
            r = r.div_exact(&d).expect("gcd divides");
        }
    }
    let rep = gcd(&r, &gcd(&r.derivative(Var::X), &r.derivative(Var::Y)));
    if !rep.is_constant() {
        r = r.div_exact(&rep).expect("gcd divides");
    }
    let r = r.canonical();
    if r.is_constant() {
        return Err(ExciseError::DegenerateElimination);
    }
    Ok(r)
}

/// Certify the projection from `center` by checking injectivity on the
/// points of the source of height at most `check_height`, and that every
/// point of `h` of that height pulls back.
pub fn certify(
    s: &SpaceSystem,
    center: &ProjectionCenter,
    h: MultiPoly,
    source_points: &[AffinePoint],
    check_height: u64,
) -> ExcisionRecord {
    let n = center.coordinate_matrix();
    let mut rec = ExcisionRecord {
        source: s.clone(),
        center: center.clone(),
        coordinate_change: n,
        inverse: inverse3(&n),
        certificate: EmpiricalCertificate {
            check_height: Height::from(check_height),
            injective_on_checked: false,
            no_extra_rationals_up_to_height: false,
            degree_of_h: h.total_degree(),
            points_projected: 0,
            points_pulled_back: 0,
        },
        h,
    };
    let mut images = BTreeSet::new();
    let mut injective = true;
    for p in source_points {
        if let Some(q) = rec.project(p) {
            if !rec.h.eval(&q.coords()).is_zero() || !images.insert(q) {
                injective = false;
                break;
            }
        }
    }
    rec.certificate.points_projected = images.len();
    rec.certificate.injective_on_checked = injective;
    if !injective {
        return rec;
    }
    let mut pulled = 0;
    let mut complete = true;
    for q in rec.curve().enumerate_points(check_height) {
        match rec.pullback_point(&q) {
            Ok(_) => pulled += 1,
            Err(_) => {
                complete = false;
                break;
            }
        }
    }
    rec.certificate.points_pulled_back = pulled;
    rec.certificate.no_extra_rationals_up_to_height = complete;
    rec
}

/// First center, in height order, whose projection certifies.
pub fn find_projection_center(
    s: &SpaceSystem,
    search_height: u64,
    check_height: u64,
) -> Result<ExcisionRecord, ExciseError> {
    let source = PlaneCurve::unchecked(s.f.clone()).expect("source is a plane curve");
    let points = source.enumerate_points(check_height);
    for hgt in 1..=search_height {
        for c in ProjectionCenter::of_height(hgt) {
            if on_closure_superset(s, &c) {
                continue;
            }
            let Ok(h) = eliminate(s, &c) else { continue };
            let rec = certify(s, &c, h, &points, check_height);
            if rec.certificate.certified() {
                return Ok(rec);
            }
        }
    }
    Err(ExciseError::BudgetExhausted(search_height))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::poly::parse_polynomial;

    fn curve(s: &str) -> PlaneCurve {
        PlaneCurve::new(parse_polynomial(s).unwrap()).unwrap()
    }

    #[test]
    fn build_examples() {
        let c = curve("x^2 + y^2 - 2");
        let s = build_excision_system(&c, &[int(1)]).unwrap();
        assert_eq!(s.aux().to_string(), "xz - z - 1");
        let s0 = build_excision_system(&c, &[]).unwrap();
        assert_eq!(s0.aux().to_string(), "z - 1");
        assert_eq!(build_excision_system(&c, &[int(1), int(1)]), Err(ExciseError::DuplicateExcisionValue(int(1))));
        let hyper = curve("y^2 - x^6 - 1");
        assert_eq!(build_excision_system(&hyper, &[int(0)]).unwrap().aux().to_string(), "xz - 1");
        let s = build_excision_system(&c, &[rat(1, 5)]).unwrap();
        assert_eq!(s.g.to_string(), "5x - 1");
    }

    #[test]
    fn coordinate_matrices_are_unimodular() {
        for h in 1..=3 {
            for c in ProjectionCenter::of_height(h) {
                let n = c.coordinate_matrix();
                assert_eq!(det3(&n).abs(), 1, "{c}");
                let img: Vec<i64> = (0..3).map(|i| (0..3).map(|j| n[i][j] * c.0[j]).sum()).collect();
                assert_eq!(img, vec![0, 0, 1], "{c}");
                let inv = inverse3(&n);
                for i in 0..3 {
                    for j in 0..3 {
                        let e: i64 = (0..3).map(|k| n[i][k] * inv[k][j]).sum();
                        assert_eq!(e, i64::from(i == j));
                    }
                }
            }
        }
    }

    #[test]
    fn center_order() {
        let first: Vec<[i64; 3]> = ProjectionCenter::of_height(1).into_iter().take(4).map(|c| c.0).collect();
        assert_eq!(first, vec![[0, 0, 1], [0, 1, -1], [0, 1, 0], [0, 1, 1]]);
    }

    #[test]
    fn conic_excision_certifies() {
        let c = curve("x^2 + y^2 - 2");
        let s = build_excision_system(&c, &[int(1)]).unwrap();
        assert!(on_closure_superset(&s, &ProjectionCenter([0, 0, 1])));
        let rec = find_projection_center(&s, 3, 10).unwrap();
        assert!(rec.center.height() <= 3);
        assert!(rec.certificate.certified());
        assert!(rec.h.total_degree() <= 4);
        let p = AffinePoint::new(int(-1), int(1));
        let q = rec.project(&p).unwrap();
        assert_eq!(rec.pullback_point(&q), Ok(Pullback::Point(p)));
        let off = AffinePoint::new(int(5), int(5));
        assert_eq!(rec.pullback_point(&off), Err(ExciseError::NotOnEliminant(Box::new(off.clone()))));
    }

    #[test]
    fn identity_excision_preserves_count() {
        let c = curve("x^2 + y^2 - 2");
        let s = build_excision_system(&c, &[]).unwrap();
        let rec = find_projection_center(&s, 3, 10).unwrap();
        assert_eq!(rec.curve().enumerate_points(10).len(), c.enumerate_points(10).len());
    }
}
