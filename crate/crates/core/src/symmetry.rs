use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::inequality::SymmetricInequality;
use crate::scenario::{Multiset, Scenario};

/// Relabelings used to identify equivalent symmetric inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymmetryGroup {
    /// Permute setting labels globally (for two settings: the 1<->2 swap).
    pub setting_permutations: bool,
    /// Flip the outcome of any one setting on all parties.
    pub outcome_flips: bool,
    /// Negate every full-body correlator (a one-party global outcome flip);
    /// only applied to inequalities without marginal terms.
    pub negation: bool,
}

impl Default for SymmetryGroup {
    fn default() -> Self {
        SymmetryGroup { setting_permutations: true, outcome_flips: true, negation: true }
    }
}

impl SymmetryGroup {
    pub fn trivial() -> Self {
        SymmetryGroup { setting_permutations: false, outcome_flips: false, negation: false }
    }

    /// All group elements acting on inequalities of `scenario`.
    pub fn elements(&self, scenario: &Scenario, marginals: bool) -> Vec<Relabeling> {
        let m = scenario.settings();
        let perms: Vec<Vec<u8>> = if self.setting_permutations {
            permutations(m)
        } else {
            vec![(0..=m as u8).collect()]
        };
        let flip_sets: Vec<u32> = if self.outcome_flips { (0..1u32 << m).collect() } else { vec![0] };
        let negs: &[bool] = if self.negation && !marginals { &[false, true] } else { &[false] };
        let mut out = Vec::new();
        for p in &perms {
            for &f in &flip_sets {
                for &neg in negs {
                    out.push(Relabeling { perm: p.clone(), flips: f, negate: neg });
                }
            }
        }
        out
    }

    /// Lexicographically minimal orbit representative.
    pub fn canonicalize(&self, ineq: &SymmetricInequality) -> SymmetricInequality {
        self.canonicalize_with_witness(ineq).0
    }

    /// Canonical form together with a group element mapping `ineq` to it.
    pub fn canonicalize_with_witness(&self, ineq: &SymmetricInequality) -> (SymmetricInequality, Relabeling) {
        let s = ineq.scenario();
        let marg = ineq.has_marginals();
        let order = s.multisets(marg);
        let mut best: Option<(Vec<BigRational>, SymmetricInequality, Relabeling)> = None;
        for g in self.elements(s, marg) {
            let img = g.apply(ineq);
            let key: Vec<BigRational> = order.iter().map(|mu| img.coeff(mu)).collect();
            if best.as_ref().is_none_or(|(k, _, _)| key < *k) {
                best = Some((key, img, g));
            }
        }
        let (_, i, g) = best.expect("group has the identity");
        (i, g)
    }

    /// Number of distinct images of `ineq`.
    pub fn orbit_size(&self, ineq: &SymmetricInequality) -> usize {
        let mut imgs: Vec<SymmetricInequality> = self
            .elements(ineq.scenario(), ineq.has_marginals())
            .iter()
            .map(|g| g.apply(ineq))
            .collect();
        imgs.sort_by_key(|a| a.to_text());
        imgs.dedup();
        imgs.len()
    }
}

/// One relabeling: `perm[s]` is the new label of setting `s` (0 fixed),
/// `flips` has bit `s` set when setting `s` has its outcomes flipped.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Relabeling {
    pub perm: Vec<u8>,
    pub flips: u32,
    pub negate: bool,
}

impl Relabeling {
    pub fn identity(m: usize) -> Self {
        Relabeling { perm: (0..=m as u8).collect(), flips: 0, negate: false }
    }

    pub fn apply(&self, ineq: &SymmetricInequality) -> SymmetricInequality {
        let coeffs = ineq.coeffs().iter().map(|(mu, c)| {
            let mut neg = self.negate;
            let mapped: Vec<u8> = mu
                .0
                .iter()
                .map(|&x| {
                    if x != 0 && self.flips >> x & 1 == 1 {
                        neg = !neg;
                    }
                    self.perm[x as usize]
                })
                .collect();
            let c = if neg { -c.clone() } else { c.clone() };
            (Multiset::from_tuple(&mapped), c)
        });
        SymmetricInequality::new(*ineq.scenario(), ineq.constant().clone(), coeffs)
            .expect("relabeling preserves well-formedness")
    }

    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        if self.perm.windows(2).any(|w| w[1] != w[0] + 1) {
            let p: Vec<String> = self.perm[1..].iter().map(|x| x.to_string()).collect();
            parts.push(format!("settings->[{}]", p.join(",")));
        }
        for s in 1..32 {
            if self.flips >> s & 1 == 1 {
                parts.push(format!("flip{s}"));
            }
        }
        if self.negate {
            parts.push("negate".into());
        }
        if parts.is_empty() {
            "identity".into()
        } else {
            parts.join("+")
        }
    }
}

fn permutations(m: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur: Vec<u8> = (1..=m as u8).collect();
    fn rec(k: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if k == cur.len() {
            let mut p = vec![0u8];
            p.extend_from_slice(cur);
            out.push(p);
            return;
        }
        for i in k..cur.len() {
            cur.swap(k, i);
            rec(k + 1, cur, out);
            cur.swap(k, i);
        }
    }
    rec(0, &mut cur, &mut out);
    out.sort();
    out
}

/// True when the normal is supported on a single multiset.
pub fn is_single_term(ineq: &SymmetricInequality) -> bool {
    ineq.coeffs().values().filter(|c| !c.is_zero()).count() <= 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_orders() {
        let s2 = Scenario::new(4, 2).unwrap();
        assert_eq!(SymmetryGroup::default().elements(&s2, false).len(), 16);
        let s3 = Scenario::new(3, 3).unwrap();
        assert_eq!(SymmetryGroup::default().elements(&s3, true).len(), 6 * 8);
    }

    #[test]
    fn svetlichny_flip_twin() {
        let s = Scenario::new(3, 2).unwrap();
        let svet = SymmetricInequality::from_levels(s, 4, &[1, -1, -1, 1]).unwrap();
        // flipping setting 2 multiplies level l by (-1)^l
        let flipped = SymmetricInequality::from_levels(s, 4, &[1, 1, -1, -1]).unwrap();
        let g = SymmetryGroup::default();
        assert_ne!(svet, flipped);
        assert_eq!(g.canonicalize(&svet), g.canonicalize(&flipped));
        assert_ne!(SymmetryGroup::trivial().canonicalize(&svet), SymmetryGroup::trivial().canonicalize(&flipped));
        let c = g.canonicalize(&svet);
        assert_eq!(g.canonicalize(&c), c);
    }
}
