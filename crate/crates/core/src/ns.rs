//! No-signaling bounds via exact linear programming.

use std::collections::{HashMap, HashSet};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::behavior::{Behavior, Space};
use crate::error::Result;
use crate::inequality::SymmetricInequality;
use crate::lp::{simplex_max, LinearProgram, Relation};
use crate::scenario::Scenario;

type Q = BigRational;

/// Which no-signaling LP to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NsFormulation {
    /// One variable per `p(a|x)`.
    Full,
    /// One variable per party-permutation orbit of `(a, x)`; exact for
    /// symmetric objectives because symmetrizing an optimal no-signaling
    /// behavior keeps it feasible and optimal.
    #[default]
    Symmetric,
}

/// Maximum of the Bell expression over the no-signaling polytope.
pub fn nosignaling_bound(ineq: &SymmetricInequality) -> Result<Q> {
    nosignaling_bound_with(ineq, NsFormulation::default())
}

pub fn nosignaling_bound_with(ineq: &SymmetricInequality, f: NsFormulation) -> Result<Q> {
    match f {
        NsFormulation::Full => nosignaling_full(ineq).map(|(v, _)| v),
        NsFormulation::Symmetric => {
            let lp = symmetric_lp(ineq);
            Ok(simplex_max(&lp)?.optimum)
        }
    }
}

/// Hypercube bound of a full-body expression: `sum |c_mu| * mult(mu)`.
pub fn l1_bound(ineq: &SymmetricInequality) -> Q {
    ineq.coeffs()
        .iter()
        .map(|(mu, c)| c.abs() * Q::from_integer(mu.multiplicity().into()))
        .sum()
}

fn sign_of(a: usize, n: usize, active: &[bool]) -> i64 {
    let mut s = 1;
    for k in 0..n {
        if active[k] && a >> (n - 1 - k) & 1 == 1 {
            s = -s;
        }
    }
    s
}

/// Objective over `(x_index, a)` pairs: each expanded tuple contributes
/// its correlator, with trivial settings filled by setting 1 (any filling
/// gives the same value on no-signaling behaviors).
fn objective_terms(ineq: &SymmetricInequality) -> Vec<(usize, usize, Q)> {
    let s = ineq.scenario();
    let n = s.parties();
    let mut out = Vec::new();
    for (t, d) in ineq.expression_terms() {
        let active: Vec<bool> = t.iter().map(|&x| x != 0).collect();
        let filled: Vec<u8> = t.iter().map(|&x| if x == 0 { 1 } else { x }).collect();
        let xi = s.full_body_index(&filled);
        for a in 0..1usize << n {
            out.push((xi, a, &d * Q::from_integer(sign_of(a, n, &active).into())));
        }
    }
    out
}

/// Full LP; returns the optimum and an optimal behavior.
pub fn nosignaling_full(ineq: &SymmetricInequality) -> Result<(Q, Behavior)> {
    let s = *ineq.scenario();
    let lp = full_lp(&s, &objective_terms(ineq));
    let sol = simplex_max(&lp)?;
    let b = Behavior::new(s, Space::Probability, sol.x.clone())?;
    Ok((sol.optimum, b))
}

fn full_lp(s: &Scenario, terms: &[(usize, usize, Q)]) -> LinearProgram {
    let n = s.parties();
    let m = s.settings();
    let na = 1usize << n;
    let nv = s.full_body_dim() * na;
    let mut c = vec![Q::zero(); nv];
    for (xi, a, v) in terms {
        c[xi * na + a] += v;
    }
    let mut lp = LinearProgram::new(c);
    for xi in 0..s.full_body_dim() {
        let mut row = vec![Q::zero(); nv];
        for a in 0..na {
            row[xi * na + a] = Q::one();
        }
        lp.add(row, Relation::Eq, Q::one());
    }
    // marginal of the other parties must not depend on party k's setting
    for k in 0..n {
        for xi in 0..s.full_body_dim() {
            let x = s.full_body_tuple(xi);
            if x[k] != 1 {
                continue;
            }
            for alt in 2..=m as u8 {
                let mut y = x.clone();
                y[k] = alt;
                let yi = s.full_body_index(&y);
                for rest in 0..na {
                    if rest >> (n - 1 - k) & 1 == 1 {
                        continue;
                    }
                    let mut row = vec![Q::zero(); nv];
                    for ak in 0..2usize {
                        let a = rest | ak << (n - 1 - k);
                        row[xi * na + a] += Q::one();
                        row[yi * na + a] -= Q::one();
                    }
                    lp.add(row, Relation::Eq, Q::zero());
                }
            }
        }
    }
    lp
}

/// Party-symmetrized LP over orbits of `(a, x)`.
pub fn symmetric_lp(ineq: &SymmetricInequality) -> LinearProgram {
    let s = ineq.scenario();
    let n = s.parties();
    let m = s.settings();
    let na = 1usize << n;
    let key = |x: &[u8], a: usize| -> Vec<u8> {
        let mut v: Vec<u8> = (0..n).map(|k| (x[k] - 1) * 2 + (a >> (n - 1 - k) & 1) as u8).collect();
        v.sort_unstable();
        v
    };
    let mut index: HashMap<Vec<u8>, usize> = HashMap::new();
    let tuples = s.full_body_tuples();
    for x in &tuples {
        for a in 0..na {
            let l = index.len();
            index.entry(key(x, a)).or_insert(l);
        }
    }
    let nv = index.len();
    let mut c = vec![Q::zero(); nv];
    for (xi, a, v) in objective_terms(ineq) {
        c[index[&key(&tuples[xi], a)]] += v;
    }
    let mut lp = LinearProgram::new(c);
    let mut seen: HashSet<Vec<Q>> = HashSet::new();
    let mut push = |lp: &mut LinearProgram, row: Vec<Q>, rhs: Q| {
        if row.iter().all(|v| v.is_zero()) {
            return;
        }
        let mut norm = row.clone();
        if let Some(first) = norm.iter().find(|v| !v.is_zero()).cloned() {
            if first.is_negative() && rhs.is_zero() {
                norm.iter_mut().for_each(|v| *v = -v.clone());
            }
        }
        if seen.insert(norm) {
            lp.add(row, Relation::Eq, rhs);
        }
    };
    for x in &tuples {
        let mut row = vec![Q::zero(); nv];
        for a in 0..na {
            row[index[&key(x, a)]] += Q::one();
        }
        push(&mut lp, row, Q::one());
    }
    let k = n - 1;
    for x in &tuples {
        if x[k] != 1 {
            continue;
        }
        for alt in 2..=m as u8 {
            let mut y = x.clone();
            y[k] = alt;
            for rest in (0..na).step_by(2) {
                let mut row = vec![Q::zero(); nv];
                for ak in 0..2 {
                    row[index[&key(x, rest | ak)]] += Q::one();
                    row[index[&key(&y, rest | ak)]] -= Q::one();
                }
                push(&mut lp, row, Q::zero());
            }
        }
    }
    lp
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Q {
        Q::from_integer(v.into())
    }

    #[test]
    fn svetlichny_ns_is_eight() {
        let s = Scenario::new(3, 2).unwrap();
        let svet = SymmetricInequality::from_levels(s, 4, &[1, -1, -1, 1]).unwrap();
        assert_eq!(l1_bound(&svet), q(8));
        assert_eq!(nosignaling_bound_with(&svet, NsFormulation::Full).unwrap(), q(8));
        assert_eq!(nosignaling_bound_with(&svet, NsFormulation::Symmetric).unwrap(), q(8));
    }

    #[test]
    fn full_solution_is_no_signaling() {
        let s = Scenario::new(2, 2).unwrap();
        let chsh = SymmetricInequality::from_levels(s, 2, &[-1, -1, 1]).unwrap();
        let (v, b) = nosignaling_full(&chsh).unwrap();
        assert_eq!(v, q(4));
        let conv = crate::MarginalConvention::PartnerFirst;
        let other = crate::MarginalConvention::UniformAverage;
        for t in [[1u8, 0], [2, 0], [0, 1], [0, 2]] {
            assert_eq!(b.correlator(&t, conv).unwrap(), b.correlator(&t, other).unwrap());
        }
    }

    #[test]
    fn symmetric_variable_count() {
        let s = Scenario::new(5, 2).unwrap();
        let f = SymmetricInequality::from_levels(s, 16, &[-1, 1, 1, -1, -1, 1]).unwrap();
        assert_eq!(symmetric_lp(&f).num_vars(), 56);
    }
}
