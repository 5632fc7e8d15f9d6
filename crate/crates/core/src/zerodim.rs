//! Rational solutions of polynomial systems with finitely many complex
//! solutions, by resultant elimination and back-substitution.

use num_traits::Zero;
use thiserror::Error;

use crate::arith::{rational_roots_low, Rational};
use crate::poly::{MultiPoly, Var};
use crate::upoly::{self, UPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZeroDimError {
    #[error("every elimination order degenerates; the system does not look zero-dimensional")]
    NotZeroDimensional,
    #[error("equation {0} uses an undeclared variable")]
    UndeclaredVariable(usize),
    #[error("a system needs at least one equation and one variable")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySystem {
    pub equations: Vec<MultiPoly>,
    pub variables: Vec<Var>,
}

/// Marker for an elimination order whose cascade vanished identically.
struct Degenerate;

type Assignment = [Option<Rational>; 3];

impl PolySystem {
    pub fn new(equations: Vec<MultiPoly>, variables: Vec<Var>) -> Result<Self, ZeroDimError> {
        if equations.is_empty() || variables.is_empty() {
            return Err(ZeroDimError::Empty);
        }
        for (i, e) in equations.iter().enumerate() {
            if e.variables().iter().any(|v| !variables.contains(v)) {
                return Err(ZeroDimError::UndeclaredVariable(i));
            }
        }
        Ok(PolySystem { equations, variables })
    }

    /// Variables taken from the equations, in x, y, z order.
    pub fn from_equations(equations: Vec<MultiPoly>) -> Result<Self, ZeroDimError> {
        let variables: Vec<Var> = Var::ALL.into_iter().filter(|v| equations.iter().any(|e| e.uses(*v))).collect();
        Self::new(equations, variables)
    }

    /// All rational solutions, each listed in the declared variable order,
    /// sorted lexicographically.
    pub fn rational_solutions(&self) -> Result<Vec<Vec<Rational>>, ZeroDimError> {
        for order in orders(&self.variables) {
            if let Ok(sols) = solve(&self.equations, &order, [None, None, None]) {
                let mut out: Vec<Vec<Rational>> = sols
                    .into_iter()
                    .filter(|a| self.equations.iter().all(|e| e.eval(&full(a)).is_zero()))
                    .map(|a| self.variables.iter().map(|v| a[v.index()].clone().unwrap()).collect())
                    .collect();
                out.sort();
                out.dedup();
                return Ok(out);
            }
        }
        Err(ZeroDimError::NotZeroDimensional)
    }
}

fn full(a: &Assignment) -> [Rational; 3] {
    [0, 1, 2].map(|i| a[i].clone().unwrap_or_else(Rational::zero))
}

/// The declared order first, then the remaining permutations.
fn orders(vars: &[Var]) -> Vec<Vec<Var>> {
    let mut all = Vec::new();
    permutations(&mut vars.to_vec(), 0, &mut all);
    all.retain(|p| p != vars);
    all.insert(0, vars.to_vec());
    all
}

fn permutations(v: &mut [Var], k: usize, out: &mut Vec<Vec<Var>>) {
    if k == v.len() {
        out.push(v.to_vec());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, out);
        v.swap(k, i);
    }
}

/// Solve for `vars` (already substituted values live in `fixed`). The last
/// variable of `vars` is eliminated first and recovered last.
fn solve(eqs: &[MultiPoly], vars: &[Var], fixed: Assignment) -> Result<Vec<Assignment>, Degenerate> {
    let eqs: Vec<&MultiPoly> = eqs.iter().filter(|e| !e.is_zero()).collect();
    if eqs.iter().any(|e| e.is_constant()) {
        return Ok(Vec::new());
    }
    let (&last, rest) = vars.split_last().expect("at least one variable");
    let partials = if rest.is_empty() {
        vec![fixed]
    } else {
        let mut elim: Vec<MultiPoly> = Vec::new();
        for (i, a) in eqs.iter().enumerate() {
            if !a.uses(last) {
                elim.push((*a).clone());
                continue;
            }
            for b in eqs.iter().skip(i + 1).filter(|b| b.uses(last)) {
                let r = a.resultant(b, last).expect("both involve the variable").canonical();
                if !r.is_zero() {
                    elim.push(r);
                }
            }
        }
        if elim.is_empty() {
            return Err(Degenerate);
        }
        solve(&elim, rest, fixed)?
    };
    let mut out = Vec::new();
    for part in partials {
        for root in fiber_roots(&eqs, last, &part)? {
            let mut a = part.clone();
            a[last.index()] = Some(root);
            out.push(a);
        }
    }
    Ok(out)
}

/// Rational values of `v` that are common roots of every equation after
/// substituting `part`.
fn fiber_roots(eqs: &[&MultiPoly], v: Var, part: &Assignment) -> Result<Vec<Rational>, Degenerate> {
    let mut g: UPoly = Vec::new();
    for e in eqs {
        let q = e.eval_partial(part);
        let (ints, _) = q.clear_denominators();
        let u = upoly::from_ints(&ints.to_univariate(v).expect("only v remains free"));
        g = upoly::gcd(&g, &u);
        if g.len() == 1 {
            return Ok(Vec::new());
        }
    }
    if g.is_empty() {
        return Err(Degenerate);
    }
    Ok(rational_roots_low(&upoly::to_primitive_ints(&g)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use crate::poly::parse_polynomial;

    fn sys(eqs: &[&str], vars: &[Var]) -> PolySystem {
        PolySystem::new(eqs.iter().map(|s| parse_polynomial(s).unwrap()).collect(), vars.to_vec()).unwrap()
    }

    #[test]
    fn examples() {
        let s = sys(&["x^2 + y^2 - 2", "x - y"], &[Var::X, Var::Y]);
        assert_eq!(s.rational_solutions().unwrap(), vec![vec![int(-1), int(-1)], vec![int(1), int(1)]]);
        let s = sys(&["x^2 - 2", "y - x"], &[Var::X, Var::Y]);
        assert!(s.rational_solutions().unwrap().is_empty());
        let s = sys(&["x^2 + y^2 - 2", "xz - z - 1"], &[Var::X, Var::Y, Var::Z]);
        assert_eq!(s.rational_solutions(), Err(ZeroDimError::NotZeroDimensional));
    }

    #[test]
    fn three_variables() {
        let s = sys(&["x + y + z - 3", "x y z - 1", "x^2 + y^2 + z^2 - 3"], &[Var::X, Var::Y, Var::Z]);
        assert_eq!(s.rational_solutions().unwrap(), vec![vec![int(1), int(1), int(1)]]);
    }

    #[test]
    fn undeclared_variable() {
        let e = PolySystem::new(vec![parse_polynomial("x + z").unwrap()], vec![Var::X]);
        assert_eq!(e, Err(ZeroDimError::UndeclaredVariable(0)));
    }

    #[test]
    fn univariate_system() {
        let s = sys(&["x^3 - x", "x^2 - x"], &[Var::X]);
        assert_eq!(s.rational_solutions().unwrap(), vec![vec![int(0)], vec![int(1)]]);
    }
}
