//! Existence oracles: bounded search, a corpus table, and an exact decider
//! for conics `a x^2 + b y^2 = c`.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::{enumerate_rationals, height, rational_roots_low, Height, Rational};
use crate::poly::{parse_polynomial, Monomial, MultiPoly, Var};
use crate::upoly;
use crate::zerodim::PolySystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleAnswer {
    pub verdict: Verdict,
    /// Coordinates in the order of the queried system's variables.
    pub witness: Option<Vec<Rational>>,
    pub provenance: String,
}

impl OracleAnswer {
    fn unknown(provenance: impl Into<String>) -> Self {
        OracleAnswer { verdict: Verdict::Unknown, witness: None, provenance: provenance.into() }
    }
}

impl Serialize for OracleAnswer {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("OracleAnswer", 3)?;
        st.serialize_field("verdict", &self.verdict)?;
        let w: Option<Vec<String>> = self.witness.as_ref().map(|w| w.iter().map(|q| q.to_string()).collect());
        st.serialize_field("witness", &w)?;
        st.serialize_field("provenance", &self.provenance)?;
        st.end()
    }
}

/// Sorted canonical polynomial strings joined by `;`.
pub fn canonical_key(equations: &[MultiPoly]) -> String {
    let mut parts: Vec<String> = equations.iter().map(|e| e.canonical().to_string()).collect();
    parts.sort();
    parts.dedup();
    parts.join(";")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QueryRecord {
    pub key: String,
    pub verdict: Verdict,
    pub round: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct QueryLog {
    pub entries: Vec<QueryRecord>,
}

impl QueryLog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn last(&self) -> Option<&QueryRecord> {
        self.entries.last()
    }
}

pub trait ExistenceOracle {
    fn describe(&self) -> String;

    fn answer(&self, system: &PolySystem) -> OracleAnswer;
}

/// Ask `oracle` about `system`, recording the query.
pub fn decide(oracle: &dyn ExistenceOracle, system: &PolySystem, log: &mut QueryLog, round: usize) -> OracleAnswer {
    let ans = oracle.answer(system);
    log.entries.push(QueryRecord { key: canonical_key(&system.equations), verdict: ans.verdict, round });
    ans
}

/// Exhaustive search over tuples of height at most `bound`. Never says No.
#[derive(Debug, Clone)]
pub struct BoundedSearchOracle {
    pub bound: u64,
}

type CoordKey = (Height, Rational, bool);

/// Order within one coordinate: height, then absolute value, then sign.
fn coord_key(q: &Rational) -> CoordKey {
    (height(q), q.abs(), q.is_negative())
}

impl BoundedSearchOracle {
    /// The first solution in scan order, if any.
    pub fn search(&self, system: &PolySystem) -> Option<Vec<Rational>> {
        let vars = &system.variables;
        let (&last, prefix) = vars.split_last()?;
        let values = enumerate_rationals(self.bound);
        let hb = Height::from(self.bound);
        let mut best: Option<(Height, Vec<CoordKey>, Vec<Rational>)> = None;
        let mut idx = vec![0usize; prefix.len()];
        loop {
            let mut at: [Option<Rational>; 3] = [None, None, None];
            for (v, i) in prefix.iter().zip(&idx) {
                at[v.index()] = Some(values[*i].clone());
            }
            for y in fiber(&system.equations, last, &at, &values) {
                if height(&y) > hb {
                    continue;
                }
                let mut a = at.clone();
                a[last.index()] = Some(y);
                let tuple: Vec<Rational> = vars.iter().map(|v| a[v.index()].clone().unwrap()).collect();
                let keys: Vec<_> = tuple.iter().map(coord_key).collect();
                let top = keys.iter().map(|k| k.0.clone()).max().unwrap();
                let cand = (top, keys, tuple);
                if best.as_ref().is_none_or(|b| (&cand.0, &cand.1) < (&b.0, &b.1)) {
                    best = Some(cand);
                }
            }
            // odometer over the prefix
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] < values.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
        best.map(|b| b.2)
    }
}

/// Values of `v` solving every equation once the other variables are fixed.
fn fiber(eqs: &[MultiPoly], v: Var, at: &[Option<Rational>; 3], scan: &[Rational]) -> Vec<Rational> {
    let mut g: upoly::UPoly = Vec::new();
    for e in eqs {
        let (q, _) = e.eval_partial(at).clear_denominators();
        g = upoly::gcd(&g, &upoly::from_ints(&q.to_univariate(v).unwrap()));
        if g.len() == 1 {
            return Vec::new();
        }
    }
    if g.is_empty() {
        return scan.to_vec();
    }
    rational_roots_low(&upoly::to_primitive_ints(&g))
}

impl ExistenceOracle for BoundedSearchOracle {
    fn describe(&self) -> String {
        format!("search:{}", self.bound)
    }

    fn answer(&self, system: &PolySystem) -> OracleAnswer {
        match self.search(system) {
            Some(w) => OracleAnswer { verdict: Verdict::Yes, witness: Some(w), provenance: self.describe() },
            None => OracleAnswer::unknown(self.describe()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub answer: bool,
    pub known_points: Vec<Vec<Rational>>,
    pub note: String,
    pub line: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OracleCorpus {
    pub entries: BTreeMap<String, CorpusEntry>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("line {line}: listed point {point} does not satisfy the system")]
    WitnessMismatch { line: usize, point: String },
    #[error("line {line}: key {key} already defined on line {first}")]
    DuplicateKey { line: usize, first: usize, key: String },
    #[error("cannot read corpus: {0}")]
    Io(String),
}

impl OracleCorpus {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, equations: &[MultiPoly]) -> Option<&CorpusEntry> {
        self.entries.get(&canonical_key(equations))
    }
}

pub fn load_corpus_file(path: &Path) -> Result<OracleCorpus, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(|e| CorpusError::Io(format!("{}: {e}", path.display())))?;
    load_corpus(&text)
}

/// Parse corpus text: `key | yes/no | (n/d,n/d),... | note` per line,
/// `#` comments and blank lines ignored.
pub fn load_corpus(text: &str) -> Result<OracleCorpus, CorpusError> {
    let mut corpus = OracleCorpus::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let perr = |message: String| CorpusError::ParseError { line, message };
        let fields: Vec<&str> = trimmed.splitn(4, '|').map(str::trim).collect();
        if fields.len() < 2 {
            return Err(perr("expected at least `key | answer`".into()));
        }
        let mut equations = Vec::new();
        for part in fields[0].split(';') {
            equations.push(parse_polynomial(part).map_err(|e| perr(format!("bad polynomial `{part}`: {e}")))?);
        }
        let answer = match fields[1] {
            "yes" => true,
            "no" => false,
            other => return Err(perr(format!("answer must be yes or no, got `{other}`"))),
        };
        let known_points = match fields.get(2) {
            Some(w) => parse_points(w).map_err(perr)?,
            None => Vec::new(),
        };
        for p in &known_points {
            if p.len() > 3 || !equations.iter().all(|e| e.eval(&pad(p)).is_zero()) {
                let shown: Vec<String> = p.iter().map(|q| q.to_string()).collect();
                return Err(CorpusError::WitnessMismatch { line, point: format!("({})", shown.join(",")) });
            }
        }
        let key = canonical_key(&equations);
        if let Some(prev) = corpus.entries.get(&key) {
            return Err(CorpusError::DuplicateKey { line, first: prev.line, key });
        }
        let note = fields.get(3).map(|s| s.to_string()).unwrap_or_default();
        corpus.entries.insert(key, CorpusEntry { answer, known_points, note, line });
    }
    Ok(corpus)
}

fn pad(p: &[Rational]) -> [Rational; 3] {
    [0, 1, 2].map(|i| p.get(i).cloned().unwrap_or_else(Rational::zero))
}

fn parse_points(text: &str) -> Result<Vec<Vec<Rational>>, String> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        rest = rest.trim_start_matches(|c: char| c == ',' || c.is_whitespace());
        if rest.is_empty() {
            break;
        }
        if !rest.starts_with('(') {
            return Err(format!("expected `(` in point list `{text}`"));
        }
        let close = rest.find(')').ok_or_else(|| format!("unclosed point in `{text}`"))?;
        let mut coords = Vec::new();
        for c in rest[1..close].split(',') {
            coords.push(Rational::from_str(c.trim()).map_err(|_| format!("bad rational `{}`", c.trim()))?);
        }
        out.push(coords);
        rest = &rest[close + 1..];
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct TableOracle {
    pub corpus: OracleCorpus,
    pub source: String,
}

/// Answers for the worked examples shipped with the crate.
pub const CURATED_CORPUS: &str = include_str!("../data/curated_corpus.txt");

impl TableOracle {
    pub fn curated() -> Self {
        TableOracle { corpus: load_corpus(CURATED_CORPUS).expect("curated corpus parses"), source: "curated".into() }
    }
}

impl ExistenceOracle for TableOracle {
    fn describe(&self) -> String {
        format!("table:{}", self.source)
    }

    fn answer(&self, system: &PolySystem) -> OracleAnswer {
        let Some(entry) = self.corpus.get(&system.equations) else {
            return OracleAnswer::unknown(format!("{} (no entry)", self.describe()));
        };
        let provenance = format!("{} line {}", self.describe(), entry.line);
        if !entry.answer {
            return OracleAnswer { verdict: Verdict::No, witness: None, provenance };
        }
        let witness = entry.known_points.first().map(|p| {
            let full = pad(p);
            system.variables.iter().map(|v| full[v.index()].clone()).collect()
        });
        OracleAnswer { verdict: Verdict::Yes, witness, provenance }
    }
}

/// Exact decider for single equations `a x^2 + b y^2 - c` with `a, b, c > 0`.
#[derive(Debug, Clone, Default)]
pub struct ConicOracle;

/// `(a, b, c)` when `f = a x^2 + b y^2 - c` with positive integers.
pub fn conic_coefficients(f: &MultiPoly) -> Option<(BigInt, BigInt, BigInt)> {
    if f.num_terms() != 3 {
        return None;
    }
    let a = f.coeff(&Monomial::var(Var::X, 2));
    let b = f.coeff(&Monomial::var(Var::Y, 2));
    let c = -f.coeff(&Monomial::ONE);
    if a.is_positive() && b.is_positive() && c.is_positive() {
        Some((a, b, c))
    } else {
        None
    }
}

impl ExistenceOracle for ConicOracle {
    fn describe(&self) -> String {
        "conic".into()
    }

    fn answer(&self, system: &PolySystem) -> OracleAnswer {
        let shape = match system.equations.as_slice() {
            [f] => conic_coefficients(&f.canonical()),
            _ => None,
        };
        let Some((a, b, c)) = shape else {
            return OracleAnswer::unknown("conic (not of the form a x^2 + b y^2 - c)");
        };
        match conic_witness(&a, &b, &c) {
            None => OracleAnswer { verdict: Verdict::No, witness: None, provenance: self.describe() },
            Some((x, y)) => {
                let witness = system
                    .variables
                    .iter()
                    .map(|v| match v {
                        Var::X => x.clone(),
                        Var::Y => y.clone(),
                        Var::Z => Rational::zero(),
                    })
                    .collect();
                OracleAnswer { verdict: Verdict::Yes, witness: Some(witness), provenance: self.describe() }
            }
        }
    }
}

/// Whether `a x^2 + b y^2 = c` has a rational solution.
pub fn conic_solvable(a: &BigInt, b: &BigInt, c: &BigInt) -> bool {
    normalized_solution(a, b, c).is_some()
}

/// Ternary form `A X^2 + B Y^2 + C Z^2` reduced to squarefree, pairwise
/// coprime coefficients, with the scalings needed to map solutions back.
struct Normalized {
    coeffs: [BigInt; 3],
    /// A solution `V` of the reduced form gives `V_i / scale_i` for the original.
    scale: [Rational; 3],
}

fn squarefree_decompose(n: &BigInt) -> (BigInt, BigInt) {
    // n = core * s^2 with core squarefree; trial division is fine at desk scale
    let mut core = BigInt::one();
    let mut s = BigInt::one();
    let mut m = n.abs();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        let mut e = 0;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        if e % 2 == 1 {
            core *= &p;
        }
        for _ in 0..e / 2 {
            s *= &p;
        }
        p += 1;
    }
    core *= m;
    if n.is_negative() {
        core = -core;
    }
    (core, s)
}

fn normalize(a: &BigInt, b: &BigInt, c: &BigInt) -> Normalized {
    let mut k = [a.clone(), b.clone(), -c.clone()];
    let mut scale = [Rational::one(), Rational::one(), Rational::one()];
    loop {
        let g = k[0].gcd(&k[1]).gcd(&k[2]);
        if !g.is_one() {
            for x in k.iter_mut() {
                *x = &*x / &g;
            }
        }
        let mut changed = false;
        for i in 0..3 {
            let (core, s) = squarefree_decompose(&k[i]);
            if !s.is_one() {
                // k X^2 = core (s X)^2
                k[i] = core;
                scale[i] *= Rational::from_integer(s);
                changed = true;
            }
        }
        for (i, j, l) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
            let p = k[i].gcd(&k[j]);
            if !p.is_one() {
                // p | k_l V_l^2 with p coprime to k_l, so V_l = p V_l'
                k[i] = &k[i] / &p;
                k[j] = &k[j] / &p;
                k[l] = &k[l] * &p;
                scale[l] /= Rational::from_integer(p);
                changed = true;
            }
        }
        if !changed {
            return Normalized { coeffs: k, scale };
        }
    }
}

/// Nontrivial integer solution of the reduced form inside the Holzer box
/// `|X| <= sqrt|BC|`, `|Y| <= sqrt|AC|`, `|Z| <= sqrt|AB|`.
fn holzer_search(k: &[BigInt; 3]) -> Option<[BigInt; 3]> {
    let bound = |i: usize, j: usize| (&k[i] * &k[j]).abs().sqrt();
    let (bx, bz) = (bound(1, 2), bound(0, 1));
    let mut z = BigInt::zero();
    while z <= bz {
        let mut x = BigInt::zero();
        while x <= bx {
            if !(x.is_zero() && z.is_zero()) {
                let rest = -(&k[0] * &x * &x + &k[2] * &z * &z);
                if (&rest % &k[1]).is_zero() {
                    let y2 = &rest / &k[1];
                    if !y2.is_negative() {
                        let y = y2.sqrt();
                        if &y * &y == y2 {
                            return Some([x, y, z]);
                        }
                    }
                }
            }
            x += 1;
        }
        z += 1;
    }
    None
}

/// Integer `(X, Y, Z)` with `a X^2 + b Y^2 = c Z^2`, nontrivial, from the
/// reduced form.
fn normalized_solution(a: &BigInt, b: &BigInt, c: &BigInt) -> Option<[BigInt; 3]> {
    let n = normalize(a, b, c);
    let v = holzer_search(&n.coeffs)?;
    let q: Vec<Rational> = (0..3).map(|i| Rational::from_integer(v[i].clone()) / &n.scale[i]).collect();
    let den = q.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let ints: Vec<BigInt> = q.iter().map(|r| (r * Rational::from_integer(den.clone())).to_integer()).collect();
    Some([ints[0].clone(), ints[1].clone(), ints[2].clone()])
}

/// The affine point `(X/Z, Y/Z)` of `a x^2 + b y^2 = c` with least
/// `(|Z|, |X|, |Y|)`, positive signs preferred.
pub fn conic_witness(a: &BigInt, b: &BigInt, c: &BigInt) -> Option<(Rational, Rational)> {
    let known = normalized_solution(a, b, c)?;
    // a, b > 0 forces Z != 0 on any nontrivial solution
    let zmax = known[2].abs();
    let mut z = BigInt::one();
    while z <= zmax {
        let lim = (c * &z * &z / a).sqrt();
        let mut x = BigInt::zero();
        while x <= lim {
            let rest = c * &z * &z - a * &x * &x;
            if (&rest % b).is_zero() {
                let y2 = &rest / b;
                let y = y2.sqrt();
                if &y * &y == y2 {
                    return Some((Rational::new(x, z.clone()), Rational::new(y, z)));
                }
            }
            x += 1;
        }
        z += 1;
    }
    unreachable!("the mapped solution lies inside the scanned range")
}

/// Small helper for callers holding machine integers.
pub fn conic_solvable_u64(a: u64, b: u64, c: u64) -> bool {
    conic_solvable(&BigInt::from(a), &BigInt::from(b), &BigInt::from(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn system(s: &[&str]) -> PolySystem {
        PolySystem::from_equations(s.iter().map(|p| parse_polynomial(p).unwrap()).collect()).unwrap()
    }

    #[test]
    fn bounded_search_examples() {
        let mut log = QueryLog::default();
        let ans = decide(&BoundedSearchOracle { bound: 2 }, &system(&["x^2 + y^2 - 2"]), &mut log, 0);
        assert_eq!(ans.verdict, Verdict::Yes);
        assert_eq!(ans.witness, Some(vec![int(1), int(1)]));
        let ans = decide(&BoundedSearchOracle { bound: 5 }, &system(&["x^2 + y^2 - 3"]), &mut log, 1);
        assert_eq!(ans.verdict, Verdict::Unknown);
        assert_eq!(log.len(), 2);
        assert_eq!(log.entries[1].key, "x^2 + y^2 - 3");
    }

    #[test]
    fn table_examples() {
        let corpus = load_corpus("# comment\nx^2+y^2-3 | no | | local obstruction at 3\n").unwrap();
        assert_eq!(corpus.len(), 1);
        let t = TableOracle { corpus, source: "inline".into() };
        assert_eq!(t.answer(&system(&["x^2 + y^2 - 3"])).verdict, Verdict::No);
        assert_eq!(t.answer(&system(&["x^2 + y^2 - 5"])).verdict, Verdict::Unknown);
    }

    #[test]
    fn corpus_errors() {
        let ok = load_corpus("x^2 + y^2 - 2 | yes | (1,1), (-1/5,7/5) | unit circle scaled").unwrap();
        assert_eq!(ok.len(), 1);
        assert!(matches!(
            load_corpus("x^2 + y^2 - 2 | yes | (1,2)"),
            Err(CorpusError::WitnessMismatch { line: 1, .. })
        ));
        assert!(matches!(
            load_corpus("x^2+y^2-2 | yes\n\n2 - y^2 - x^2 | no"),
            Err(CorpusError::DuplicateKey { line: 3, first: 1, .. })
        ));
        assert!(matches!(load_corpus("x^2 | maybe"), Err(CorpusError::ParseError { line: 1, .. })));
        assert!(matches!(load_corpus("x**2 | yes"), Err(CorpusError::ParseError { line: 1, .. })));
    }

    #[test]
    fn conic_examples() {
        assert!(conic_solvable_u64(1, 1, 2));
        assert!(!conic_solvable_u64(1, 1, 3));
        assert!(conic_solvable_u64(2, 3, 5));
        assert!(conic_solvable_u64(1, 1, 25));
        assert!(!conic_solvable_u64(3, 3, 1));
        let one = BigInt::one();
        assert_eq!(conic_witness(&one, &one, &BigInt::from(5)), Some((int(1), int(2))));
        assert_eq!(conic_witness(&one, &one, &BigInt::from(2)), Some((int(1), int(1))));
        let mut log = QueryLog::default();
        assert_eq!(decide(&ConicOracle, &system(&["x^2 + y^2 - 3"]), &mut log, 0).verdict, Verdict::No);
        assert_eq!(decide(&ConicOracle, &system(&["x^2 - y^2 - 3"]), &mut log, 0).verdict, Verdict::Unknown);
    }
}
