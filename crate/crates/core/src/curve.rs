//! Plane curves `f(x, y) = 0`: smoothness, genus, fibers and point search.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::{enumerate_rationals, height, rational_roots_low, rationals_of_height, Height, Rational};
use crate::poly::{gcd, MultiPoly, Var};
use crate::upoly::{self, UPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("curve equation must be a nonconstant polynomial in x and y")]
    NotAPlaneCurve,
    #[error("equation is visibly reducible: {0}")]
    Reducible(String),
    #[error("smoothness check inconclusive: eliminants vanish identically")]
    Inconclusive,
    #[error("genus unavailable: {0}; supply a genus override")]
    GenusUnavailable(String),
    #[error("f({0}, y) vanishes identically")]
    VerticalComponent(Rational),
}

/// A rational point `(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffinePoint {
    pub x: Rational,
    pub y: Rational,
}

impl AffinePoint {
    pub fn new(x: Rational, y: Rational) -> Self {
        AffinePoint { x, y }
    }

    pub fn height(&self) -> Height {
        height(&self.x).max(height(&self.y))
    }

    pub fn coords(&self) -> [Rational; 3] {
        [self.x.clone(), self.y.clone(), Rational::zero()]
    }
}

/// Points are ordered by height, then x, then y.
impl Ord for AffinePoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.height().cmp(&other.height()).then_with(|| self.x.cmp(&other.x)).then_with(|| self.y.cmp(&other.y))
    }
}

impl PartialOrd for AffinePoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for AffinePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Serialize for AffinePoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.x.to_string(), self.y.to_string()].serialize(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum SolutionSetKind {
    Empty,
    NonemptyFinite,
    Infinite,
}

/// Which rational solution sets are possible for a given genus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trichotomy {
    pub possibilities: Vec<SolutionSetKind>,
}

impl Trichotomy {
    pub fn contains(&self, k: SolutionSetKind) -> bool {
        self.possibilities.contains(&k)
    }

    pub fn describe(&self) -> &'static str {
        use SolutionSetKind::*;
        match self.possibilities.as_slice() {
            [Empty, Infinite] => "empty or infinite",
            [Empty, NonemptyFinite, Infinite] => "empty, non-empty finite, or infinite",
            [Empty, NonemptyFinite] => "empty, or non-empty finite",
            _ => "unclassified",
        }
    }
}

pub fn classify(genus: u32) -> Trichotomy {
    use SolutionSetKind::*;
    let possibilities = match genus {
        0 => vec![Empty, Infinite],
        1 => vec![Empty, NonemptyFinite, Infinite],
        _ => vec![Empty, NonemptyFinite],
    };
    Trichotomy { possibilities }
}

/// The equation `f(x, y) = 0`, with `f` canonical and assumed irreducible
/// over the complex numbers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlaneCurve {
    pub f: MultiPoly,
    pub genus_override: Option<u32>,
}

impl PlaneCurve {
    /// Canonicalizes `f` and runs cheap reducibility checks.
    pub fn new(f: MultiPoly) -> Result<Self, CurveError> {
        let c = Self::unchecked(f)?;
        c.sanity_check()?;
        Ok(c)
    }

    /// Canonicalizes without the reducibility checks; used for eliminants
    /// produced internally.
    pub fn unchecked(f: MultiPoly) -> Result<Self, CurveError> {
        let f = f.canonical();
        if f.is_constant() || f.uses(Var::Z) {
            return Err(CurveError::NotAPlaneCurve);
        }
        Ok(PlaneCurve { f, genus_override: None })
    }

    pub fn with_genus(mut self, genus: Option<u32>) -> Self {
        self.genus_override = genus;
        self
    }

    pub fn degree(&self) -> u32 {
        self.f.total_degree()
    }

    fn sanity_check(&self) -> Result<(), CurveError> {
        let f = &self.f;
        if f.num_terms() > 1 {
            for v in [Var::X, Var::Y] {
                if f.terms().all(|(m, _)| m.0[v.index()] > 0) {
                    return Err(CurveError::Reducible(format!("{} divides the equation", v.name())));
                }
            }
        }
        for (v, other) in [(Var::Y, Var::X), (Var::X, Var::Y)] {
            if f.uses(v) {
                let c = f.content_in(v);
                if c.uses(other) {
                    return Err(CurveError::Reducible(format!("factor {c} free of {}", v.name())));
                }
                let g = gcd(f, &f.derivative(v));
                if g.uses(v) {
                    return Err(CurveError::Reducible(format!("repeated factor {}", g.canonical())));
                }
            }
        }
        Ok(())
    }

    /// Whether the projective closure is nonsingular over the complex numbers.
    pub fn is_smooth_projective(&self) -> Result<bool, CurveError> {
        let hom = self.f.homogenize(3);
        for chart in [2, 0, 1] {
            if has_singular_point(&hom.chart(chart))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn genus(&self) -> Result<u32, CurveError> {
        if let Some(g) = self.genus_override {
            return Ok(g);
        }
        match self.is_smooth_projective() {
            Ok(true) => {
                let d = self.degree();
                Ok(d.saturating_sub(1) * d.saturating_sub(2) / 2)
            }
            Ok(false) => Err(CurveError::GenusUnavailable("projective closure is singular".into())),
            Err(_) => Err(CurveError::GenusUnavailable("smoothness check was inconclusive".into())),
        }
    }

    pub fn contains(&self, p: &AffinePoint) -> bool {
        self.f.eval(&p.coords()).is_zero()
    }

    /// All rational y with `f(p, y) = 0`, ascending.
    pub fn fiber_solutions(&self, p: &Rational) -> Result<Vec<Rational>, CurveError> {
        let g = self.f.specialize(Var::X, p);
        if g.is_zero() {
            return Err(CurveError::VerticalComponent(p.clone()));
        }
        let coeffs = g.to_univariate(Var::Y).expect("specialization leaves only y");
        Ok(rational_roots_low(&coeffs))
    }

    /// Points with `max(height(x), height(y)) <= bound`, sorted by height.
    pub fn enumerate_points(&self, bound: u64) -> Vec<AffinePoint> {
        let b = Height::from(bound);
        let mut out = Vec::new();
        for x in enumerate_rationals(bound) {
            if let Ok(ys) = self.fiber_solutions(&x) {
                for y in ys {
                    if height(&y) <= b {
                        out.push(AffinePoint::new(x.clone(), y));
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// The smallest point (by height, then x, then y) of height at most
    /// `max_height`, searching in increasing height.
    pub fn first_point(&self, max_height: u64) -> Option<AffinePoint> {
        let mut fibers: Vec<AffinePoint> = Vec::new();
        for b in 1..=max_height {
            for x in rationals_of_height(b) {
                if let Ok(ys) = self.fiber_solutions(&x) {
                    fibers.extend(ys.into_iter().map(|y| AffinePoint::new(x.clone(), y)));
                }
            }
            let hb = Height::from(b);
            if let Some(p) = fibers.iter().filter(|p| p.height() <= hb).min() {
                return Some(p.clone());
            }
        }
        None
    }
}

impl fmt::Display for PlaneCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = 0", self.f)
    }
}

/// Whether `p(a, b)` (a in the x slot, b in the y slot) has a complex zero
/// where both partial derivatives vanish.
fn has_singular_point(p: &MultiPoly) -> Result<bool, CurveError> {
    let polys: Vec<MultiPoly> =
        [p.clone(), p.derivative(Var::X), p.derivative(Var::Y)].into_iter().filter(|q| !q.is_zero()).collect();
    common_complex_zero(&polys)
}

/// Whether polynomials in x, y have a common zero in C^2.
///
/// One variable is eliminated by pairwise resultants to get a univariate
/// modulus whose roots contain every projected common zero; the remaining
/// variable is then handled by a gcd over Q[u]/(m) that splits the modulus
/// whenever a leading coefficient turns out to be a zero divisor.
pub(crate) fn common_complex_zero(polys: &[MultiPoly]) -> Result<bool, CurveError> {
    if polys.iter().any(|q| q.is_constant() && !q.is_zero()) {
        return Ok(false);
    }
    let polys: Vec<&MultiPoly> = polys.iter().filter(|q| !q.is_zero()).collect();
    if polys.is_empty() {
        return Ok(true);
    }
    for (elim, keep) in [(Var::Y, Var::X), (Var::X, Var::Y)] {
        let mut eliminants: Vec<UPoly> = Vec::new();
        for (i, a) in polys.iter().enumerate() {
            if !a.uses(elim) {
                eliminants.push(upoly::from_ints(&a.to_univariate(keep).unwrap()));
                continue;
            }
            for b in polys.iter().skip(i + 1) {
                if b.uses(elim) {
                    let r = a.resultant(b, elim).expect("both involve the eliminated variable");
                    if !r.is_zero() {
                        eliminants.push(upoly::from_ints(&r.to_univariate(keep).unwrap()));
                    }
                }
            }
        }
        if eliminants.is_empty() {
            continue;
        }
        let mut m = eliminants[0].clone();
        for e in &eliminants[1..] {
            m = upoly::gcd(&m, e);
        }
        if m.len() <= 1 {
            return Ok(false);
        }
        let m = upoly::squarefree(&m);
        let kpolys: Vec<KPoly> = polys.iter().map(|q| to_kpoly(q, elim, keep)).collect();
        return Ok(common_root_mod(&m, kpolys));
    }
    Err(CurveError::Inconclusive)
}

/// Polynomial in one variable with coefficients in Q[u], lowest first.
type KPoly = Vec<UPoly>;

fn to_kpoly(p: &MultiPoly, main: Var, coeff_var: Var) -> KPoly {
    p.coefficients_in(main)
        .into_iter()
        .map(|c| upoly::from_ints(&c.to_univariate(coeff_var).expect("bivariate input")))
        .collect()
}

fn xgcd(a: &UPoly, b: &UPoly) -> (UPoly, UPoly) {
    // returns (g, s) with s*a = g mod b, g monic
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1): (UPoly, UPoly) = (vec![Rational::one()], Vec::new());
    while !r1.is_empty() {
        let (q, r) = upoly::divrem(&r0, &r1);
        let s2 = upoly::sub(&s0, &upoly::mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    let lead = r0.last().cloned().unwrap_or_else(Rational::one);
    let inv = Rational::one() / lead;
    (r0.iter().map(|c| c * &inv).collect(), s0.iter().map(|c| c * &inv).collect())
}

fn common_root_mod(m: &UPoly, polys: Vec<KPoly>) -> bool {
    let mut polys: Vec<KPoly> = polys
        .into_iter()
        .map(|p| {
            let mut q: KPoly = p.iter().map(|c| upoly::rem(c, m)).collect();
            while q.last().is_some_and(|c| c.is_empty()) {
                q.pop();
            }
            q
        })
        .collect();
    loop {
        for i in 0..polys.len() {
            while let Some(lead) = polys[i].last() {
                let g = upoly::gcd(lead, m);
                if g.len() <= 1 {
                    break;
                }
                if g.len() == m.len() {
                    polys[i].pop();
                    while polys[i].last().is_some_and(|c| c.is_empty()) {
                        polys[i].pop();
                    }
                    continue;
                }
                let other = upoly::divrem(m, &g).0;
                return common_root_mod(&g, polys.clone()) || common_root_mod(&other, polys);
            }
        }
        polys.retain(|p| !p.is_empty());
        if polys.is_empty() {
            return true;
        }
        if polys.iter().any(|p| p.len() == 1) {
            return false;
        }
        if polys.len() == 1 {
            return true;
        }
        polys.sort_by_key(|p| std::cmp::Reverse(p.len()));
        let b = polys.pop().unwrap();
        let a = polys.remove(0);
        let inv = xgcd(b.last().unwrap(), m).1;
        let mut r = a;
        while r.len() >= b.len() {
            let shift = r.len() - b.len();
            let c = upoly::rem(&upoly::mul(r.last().unwrap(), &inv), m);
            for (j, bj) in b.iter().enumerate() {
                r[shift + j] = upoly::rem(&upoly::sub(&r[shift + j], &upoly::mul(&c, bj)), m);
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_empty()) {
                r.pop();
            }
        }
        polys.push(b);
        polys.push(r);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::poly::parse_polynomial;

    fn curve(s: &str) -> PlaneCurve {
        PlaneCurve::new(parse_polynomial(s).unwrap()).unwrap()
    }

    fn pt(x: Rational, y: Rational) -> AffinePoint {
        AffinePoint::new(x, y)
    }

    #[test]
    fn smoothness_examples() {
        assert_eq!(curve("x^2 + y^2 - 2").is_smooth_projective(), Ok(true));
        assert_eq!(curve("y^2 - x^3").is_smooth_projective(), Ok(false));
        assert_eq!(curve("y^2 - x^3 - 1").is_smooth_projective(), Ok(true));
        assert_eq!(curve("x^4 + y^4 - 17").is_smooth_projective(), Ok(true));
        // node at the origin
        assert_eq!(curve("y^2 - x^3 - x^2").is_smooth_projective(), Ok(false));
        // singular only at infinity
        assert_eq!(curve("y^2 - x^6 - 1").is_smooth_projective(), Ok(false));
    }

    #[test]
    fn irrational_singular_points() {
        // y^2 = (x^2 - 2)^2 (x + 1): nodes at (+-sqrt 2, 0)
        let f = parse_polynomial("y^2 - x^5 - x^4 + 4x^3 + 4x^2 - 4x - 4").unwrap();
        assert!(has_singular_point(&f).unwrap());
        // y^2 = (x^2 - 2)(x + 1)(x - 3) is smooth in the affine plane
        let g = parse_polynomial("y^2 - x^4 + 2x^3 + 5x^2 - 4x - 6").unwrap();
        assert!(!has_singular_point(&g).unwrap());
    }

    #[test]
    fn genus_examples() {
        assert_eq!(curve("x^2 + y^2 - 2").genus(), Ok(0));
        assert_eq!(curve("y^2 - x^3 - 1").genus(), Ok(1));
        assert_eq!(curve("x^4 + y^4 - 17").genus(), Ok(3));
        assert_eq!(curve("x - 2y + 1").genus(), Ok(0));
        let hyper = curve("y^2 - x^6 - 1");
        assert!(matches!(hyper.genus(), Err(CurveError::GenusUnavailable(_))));
        assert_eq!(hyper.with_genus(Some(2)).genus(), Ok(2));
    }

    #[test]
    fn classify_examples() {
        use SolutionSetKind::*;
        assert_eq!(classify(0).possibilities, vec![Empty, Infinite]);
        assert_eq!(classify(1).possibilities, vec![Empty, NonemptyFinite, Infinite]);
        assert_eq!(classify(3).possibilities, vec![Empty, NonemptyFinite]);
        assert_eq!(classify(3).describe(), "empty, or non-empty finite");
    }

    #[test]
    fn fiber_examples() {
        let c = curve("x^2 + y^2 - 2");
        assert_eq!(c.fiber_solutions(&int(1)).unwrap(), vec![int(-1), int(1)]);
        assert!(c.fiber_solutions(&int(0)).unwrap().is_empty());
        assert_eq!(curve("x^4 + y^4 - 17").fiber_solutions(&int(2)).unwrap(), vec![int(-1), int(1)]);
        let line = curve("x - 3");
        assert_eq!(line.fiber_solutions(&int(3)), Err(CurveError::VerticalComponent(int(3))));
    }

    #[test]
    fn enumerate_examples() {
        let c = curve("x^2 + y^2 - 2");
        let units = vec![pt(int(-1), int(-1)), pt(int(-1), int(1)), pt(int(1), int(-1)), pt(int(1), int(1))];
        assert_eq!(c.enumerate_points(1), units);
        let b7 = c.enumerate_points(7);
        assert_eq!(b7.len(), 12);
        for s in [-1, 1] {
            for t in [-1, 1] {
                assert!(b7.contains(&pt(rat(s, 5), rat(7 * t, 5))));
                assert!(b7.contains(&pt(rat(7 * s, 5), rat(t, 5))));
            }
        }
        let q = curve("x^4 + y^4 - 17").enumerate_points(2);
        assert_eq!(q.len(), 8);
        assert_eq!(c.first_point(5), Some(pt(int(-1), int(-1))));
        assert_eq!(curve("x^2 + y^2 - 3").first_point(6), None);
    }

    #[test]
    fn reducible_inputs_rejected() {
        assert!(matches!(PlaneCurve::new(parse_polynomial("x^2 y + x").unwrap()), Err(CurveError::Reducible(_))));
        assert!(matches!(
            PlaneCurve::new(parse_polynomial("x^2 y^2 - 2 x y + 1").unwrap()),
            Err(CurveError::Reducible(_))
        ));
        assert!(matches!(
            PlaneCurve::new(parse_polynomial("x^2 y - y + x^2 - 1").unwrap()),
            Err(CurveError::Reducible(_))
        ));
        assert_eq!(PlaneCurve::new(parse_polynomial("7").unwrap()), Err(CurveError::NotAPlaneCurve));
    }
}
