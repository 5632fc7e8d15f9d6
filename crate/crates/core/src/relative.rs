//! Algorithms relative to an existence oracle: the full solution set for
//! genus at least 2, the finiteness decision for genus 1, and the conic case.

use serde::Serialize;
use thiserror::Error;

use crate::arith::Rational;
use crate::curve::{AffinePoint, CurveError, PlaneCurve};
use crate::elliptic::{
    cubic_to_weierstrass, nagell_lutz_torsion, BirationalMapPair, ECPoint, EllipticError, WeierstrassCurve,
};
use crate::excise::{build_excision_system, find_projection_center, ExcisionRecord, Pullback};
use crate::genus0::{find_conic_point, Conic, SweepParametrization};
use crate::oracle::{decide, ConicOracle, ExistenceOracle, QueryLog, Verdict};
use crate::zerodim::PolySystem;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelativeError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
    #[error("limit `{0}` must be at least 1")]
    InvalidLimit(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RunLimits {
    pub max_rounds: u32,
    pub max_search_height: u64,
    pub max_degree: u32,
    /// Projection centers are tried up to this height.
    pub center_height: u64,
    /// Height up to which each projection is certified.
    pub check_height: u64,
}

impl Default for RunLimits {
    fn default() -> Self {
        RunLimits { max_rounds: 8, max_search_height: 30, max_degree: 40, center_height: 3, check_height: 10 }
    }
}

impl RunLimits {
    pub fn validate(&self) -> Result<(), RelativeError> {
        let checks = [
            ("max_rounds", self.max_rounds as u64),
            ("max_search_height", self.max_search_height),
            ("max_degree", self.max_degree as u64),
            ("center_height", self.center_height),
            ("check_height", self.check_height),
        ];
        match checks.iter().find(|(_, v)| *v == 0) {
            Some((name, _)) => Err(RelativeError::InvalidLimit(name)),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Finiteness {
    Finite,
    Infinite,
}

/// The switch from the input cubic to its Weierstrass model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelSwitch {
    pub base_point: AffinePoint,
    pub model: WeierstrassCurve,
    pub maps: BirationalMapPair,
    pub torsion: Vec<String>,
    pub excised_x: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Outcome {
    FullSet { points: Vec<AffinePoint> },
    Finiteness { verdict: Finiteness, model: Option<Box<ModelSwitch>> },
    Genus0 { exists: bool, parametrization: Option<SweepParametrization> },
    Aborted { reason: String, partial: Vec<AffinePoint> },
}

impl Outcome {
    pub fn is_aborted(&self) -> bool {
        matches!(self, Outcome::Aborted { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolutionReport {
    pub original_curve: PlaneCurve,
    pub genus: u32,
    pub outcome: Outcome,
    pub excision_chain: Vec<ExcisionRecord>,
    pub log: QueryLog,
}

fn single(c: &PlaneCurve) -> PolySystem {
    PolySystem::from_equations(vec![c.f.clone()]).expect("plane curve has a variable")
}

/// Map a point of the last curve in `chain` back to the original curve.
/// `None` when it is the image of a point at infinity.
fn pull_back_chain(chain: &[ExcisionRecord], p: &AffinePoint) -> Result<Option<AffinePoint>, String> {
    let mut q = p.clone();
    for rec in chain.iter().rev() {
        match rec.pullback_point(&q) {
            Ok(Pullback::Point(r)) => q = r,
            Ok(Pullback::AtInfinity) => return Ok(None),
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok(Some(q))
}

/// All rational points of a curve of genus at least 2, relative to `oracle`.
pub fn solve_all_high_genus(
    c: &PlaneCurve,
    oracle: &dyn ExistenceOracle,
    limits: &RunLimits,
) -> Result<SolutionReport, RelativeError> {
    limits.validate()?;
    let genus = c.genus()?;
    if genus < 2 {
        return Err(RelativeError::UnsupportedShape(format!("genus {genus} is below 2")));
    }
    let mut log = QueryLog::default();
    let mut chain: Vec<ExcisionRecord> = Vec::new();
    let mut points: Vec<AffinePoint> = Vec::new();
    let mut current = c.clone();
    let mut round = 0usize;
    let outcome = loop {
        let abort = |reason: String, points: &Vec<AffinePoint>| {
            let mut partial = points.clone();
            partial.sort();
            Outcome::Aborted { reason, partial }
        };
        let ans = decide(oracle, &single(&current), &mut log, round);
        match ans.verdict {
            Verdict::No => {
                points.sort();
                break Outcome::FullSet { points };
            }
            Verdict::Unknown => break abort(format!("oracle gave no answer in round {round}"), &points),
            Verdict::Yes => {}
        }
        if round as u32 >= limits.max_rounds {
            break abort(format!("round limit {} reached", limits.max_rounds), &points);
        }
        let Some(p) = current.first_point(limits.max_search_height) else {
            break abort(format!("no point of height at most {} found", limits.max_search_height), &points);
        };
        let ys = current.fiber_solutions(&p.x).expect("fiber of a found point is finite");
        let mut failed = None;
        for y in ys {
            match pull_back_chain(&chain, &AffinePoint::new(p.x.clone(), y)) {
                Ok(Some(q)) => points.push(q),
                Ok(None) => {}
                Err(e) => failed = Some(e),
            }
        }
        if let Some(e) = failed {
            break abort(e, &points);
        }
        let rec = match build_excision_system(&current, std::slice::from_ref(&p.x))
            .and_then(|s| find_projection_center(&s, limits.center_height, limits.check_height))
        {
            Ok(r) => r,
            Err(e) => break abort(e.to_string(), &points),
        };
        if rec.h.total_degree() > limits.max_degree {
            break abort(
                format!("excised curve has degree {} above {}", rec.h.total_degree(), limits.max_degree),
                &points,
            );
        }
        current = rec.curve().with_genus(Some(genus));
        chain.push(rec);
        round += 1;
    };
    Ok(SolutionReport { original_curve: c.clone(), genus, outcome, excision_chain: chain, log })
}

/// Whether a genus-1 curve has finitely many rational points, relative to
/// `oracle`.
pub fn decide_finiteness_genus1(
    c: &PlaneCurve,
    oracle: &dyn ExistenceOracle,
    limits: &RunLimits,
) -> Result<SolutionReport, RelativeError> {
    limits.validate()?;
    let genus = c.genus()?;
    if genus != 1 {
        return Err(RelativeError::UnsupportedShape(format!("genus {genus} is not 1")));
    }
    let mut log = QueryLog::default();
    let mut chain = Vec::new();
    let report =
        |outcome, log, chain| SolutionReport { original_curve: c.clone(), genus, outcome, excision_chain: chain, log };
    let aborted = |reason: String| Outcome::Aborted { reason, partial: Vec::new() };
    let ans = decide(oracle, &single(c), &mut log, 0);
    match ans.verdict {
        Verdict::No => return Ok(report(Outcome::Finiteness { verdict: Finiteness::Finite, model: None }, log, chain)),
        Verdict::Unknown => return Ok(report(aborted("oracle gave no answer on the input".into()), log, chain)),
        Verdict::Yes => {}
    }
    let witness = ans
        .witness
        .filter(|w| w.len() == 2)
        .map(|w| AffinePoint::new(w[0].clone(), w[1].clone()))
        .filter(|p| c.contains(p));
    let Some(p) = c.first_point(limits.max_search_height).or(witness) else {
        let reason = format!("no point of height at most {} found", limits.max_search_height);
        return Ok(report(aborted(reason), log, chain));
    };
    let (model, maps) = cubic_to_weierstrass(c, &p)?;
    let torsion = nagell_lutz_torsion(&model);
    let mut xs: Vec<Rational> = torsion
        .iter()
        .filter_map(|t| match t {
            ECPoint::Affine(x, _) => Some(x.clone()),
            ECPoint::Infinity => None,
        })
        .collect();
    xs.sort();
    xs.dedup();
    let switch = ModelSwitch {
        base_point: p,
        model: model.clone(),
        maps,
        torsion: torsion.iter().map(|t| t.to_string()).collect(),
        excised_x: xs.iter().map(|x| x.to_string()).collect(),
    };
    let rec = match build_excision_system(&model.curve(), &xs)
        .and_then(|s| find_projection_center(&s, limits.center_height, limits.check_height))
    {
        Ok(r) => r,
        Err(e) => return Ok(report(aborted(e.to_string()), log, chain)),
    };
    let excised = single(&rec.curve());
    chain.push(rec);
    let ans = decide(oracle, &excised, &mut log, 1);
    let verdict = match ans.verdict {
        Verdict::Yes => Finiteness::Infinite,
        Verdict::No => Finiteness::Finite,
        Verdict::Unknown => {
            return Ok(report(aborted("oracle gave no answer on the torsion-free model".into()), log, chain))
        }
    };
    Ok(report(Outcome::Finiteness { verdict, model: Some(Box::new(switch)) }, log, chain))
}

/// Route by genus: conics to the exact decider, genus 1 to the finiteness
/// decision, higher genus to the full solver.
pub fn dispatch(
    c: &PlaneCurve,
    oracle: &dyn ExistenceOracle,
    limits: &RunLimits,
) -> Result<SolutionReport, RelativeError> {
    limits.validate()?;
    match c.genus()? {
        0 => {
            let q = Conic::from_curve(c).map_err(|e| RelativeError::UnsupportedShape(e.to_string()))?;
            let mut log = QueryLog::default();
            let ans = decide(&ConicOracle, &single(c), &mut log, 0);
            let exists = ans.verdict == Verdict::Yes;
            let parametrization = if exists {
                find_conic_point(&q)
                    .map(|p| SweepParametrization::new(q.clone(), p).expect("witness lies on the conic"))
            } else {
                None
            };
            let outcome = Outcome::Genus0 { exists, parametrization };
            Ok(SolutionReport { original_curve: c.clone(), genus: 0, outcome, excision_chain: Vec::new(), log })
        }
        1 => decide_finiteness_genus1(c, oracle, limits),
        _ => solve_all_high_genus(c, oracle, limits),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use crate::oracle::{load_corpus, TableOracle};
    use crate::poly::parse_polynomial;

    fn curve(s: &str) -> PlaneCurve {
        PlaneCurve::new(parse_polynomial(s).unwrap()).unwrap()
    }

    fn table(text: &str) -> TableOracle {
        TableOracle { corpus: load_corpus(text).unwrap(), source: "inline".into() }
    }

    #[test]
    fn oracle_no_gives_empty_set() {
        let c = curve("x^4 + y^4 - 3");
        let r = solve_all_high_genus(&c, &table("x^4 + y^4 - 3 | no"), &RunLimits::default()).unwrap();
        assert_eq!(r.outcome, Outcome::FullSet { points: vec![] });
        assert_eq!(r.log.len(), 1);
    }

    #[test]
    fn genus1_oracle_no_is_finite() {
        let c = curve("y^2 - x^3 - 5");
        let r = decide_finiteness_genus1(&c, &table("y^2 - x^3 - 5 | no"), &RunLimits::default()).unwrap();
        assert_eq!(r.outcome, Outcome::Finiteness { verdict: Finiteness::Finite, model: None });
    }

    #[test]
    fn unknown_aborts() {
        let c = curve("x^4 + y^4 - 17");
        let r = solve_all_high_genus(&c, &table(""), &RunLimits::default()).unwrap();
        assert!(r.outcome.is_aborted());
    }

    #[test]
    fn conic_dispatch() {
        let c = curve("x^2 + y^2 - 2");
        let r = dispatch(&c, &table(""), &RunLimits::default()).unwrap();
        let Outcome::Genus0 { exists: true, parametrization: Some(p) } = r.outcome else { panic!() };
        assert_eq!(p.base_point, AffinePoint::new(int(1), int(1)));
        let line = curve("x^2 + y - 2");
        assert!(matches!(dispatch(&line, &table(""), &RunLimits::default()), Err(RelativeError::UnsupportedShape(_))));
    }

    #[test]
    fn curated_runs() {
        let o = TableOracle::curated();
        let l = RunLimits::default();
        let r = decide_finiteness_genus1(&curve("y^2 - x^3 - 1"), &o, &l).unwrap();
        assert!(matches!(r.outcome, Outcome::Finiteness { verdict: Finiteness::Finite, .. }));
        assert_eq!(r.log.len(), 2);
        let r = decide_finiteness_genus1(&curve("y^2 - x^3 + 2"), &o, &l).unwrap();
        assert!(matches!(r.outcome, Outcome::Finiteness { verdict: Finiteness::Infinite, .. }));
        let c = curve("y^2 - x^6 - 1").with_genus(Some(2));
        let r = solve_all_high_genus(&c, &o, &l).unwrap();
        assert_eq!(
            r.outcome,
            Outcome::FullSet { points: vec![AffinePoint::new(int(0), int(-1)), AffinePoint::new(int(0), int(1))] }
        );
        assert_eq!(r.log.len(), 2);
        assert_eq!(r.log.last().unwrap().verdict, Verdict::No);
    }

    #[test]
    fn limits_validated() {
        let l = RunLimits { max_rounds: 0, ..RunLimits::default() };
        assert_eq!(l.validate(), Err(RelativeError::InvalidLimit("max_rounds")));
    }
}
