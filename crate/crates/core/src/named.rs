//! Inequalities referred to by name, in `c0 + sum c (mu) >= 0` form.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::family::family_inequality;
use crate::inequality::SymmetricInequality;
use crate::models::CardinalityTuple;
use crate::scenario::Scenario;

fn parse(n: usize, m: usize, text: &str) -> SymmetricInequality {
    SymmetricInequality::parse_text(Scenario::new(n, m).expect("valid scenario"), text).expect("well-formed literal")
}

/// `A1B1 + A1B2 + A2B1 - A2B2 <= 2`.
pub fn chsh() -> SymmetricInequality {
    parse(2, 2, "+2 - (11) - (12) + (22)")
}

/// `(112) + (122) - (111) - (222) <= 4`.
pub fn svetlichny() -> SymmetricInequality {
    parse(3, 2, "+4 + (111) - (112) - (122) + (222)")
}

/// Three-party Mermin: `(112) - (222) <= 2`.
pub fn mermin3() -> SymmetricInequality {
    parse(3, 2, "+2 - (112) + (222)")
}

pub fn mermin4() -> SymmetricInequality {
    parse(4, 2, "+4 - (1111) - (1112) + (1122) + (1222) - (2222)")
}

pub fn mermin5() -> SymmetricInequality {
    parse(5, 2, "+4 - (11112) + (11222) - (22222)")
}

pub fn svetlichny5() -> SymmetricInequality {
    parse(5, 2, "+8 + (11111) + (11112) - (11122) - (11222) + (12222) + (22222)")
}

/// Generalization of the Svetlichny inequality to three settings that
/// reduces to it when every third setting is trivial.
pub fn f1() -> SymmetricInequality {
    parse(3, 3, "+13 - (100) + (111) - (211) - (221) + (222) -2 (300) + (310) - (330) - (331)")
}

/// Generalization that reduces to the Svetlichny inequality when every
/// third setting copies the first.
pub fn f2() -> SymmetricInequality {
    parse(3, 3, "+12 + (122) - (123) - (133) +3 (222) +2 (223) - (233)")
}

/// Most noise-robust inequality reported for a model, with its threshold.
#[derive(Debug, Clone)]
pub struct BestEntry {
    pub h: CardinalityTuple,
    pub inequality: SymmetricInequality,
    pub threshold: f64,
}

fn entry(h: &str, ineq: SymmetricInequality, threshold: f64) -> BestEntry {
    BestEntry { h: h.parse().expect("valid tuple"), inequality: ineq, threshold }
}

/// Reported best inequalities and white-noise thresholds for `n` = 4 or 5.
pub fn best_per_model(n: usize) -> Result<Vec<BestEntry>> {
    let f = |n| family_inequality(n).and_then(|f| f.to_symmetric());
    match n {
        4 => Ok(vec![
            entry("1,1,1,1", mermin4(), 0.645),
            entry("2,1,1", parse(4, 2, "+4 - (1112) + (1222)"), 0.493),
            entry("2,2", f(4)?, 0.291),
            entry("3,1", parse(4, 2, "+8 + (1111) - (1112) - (1122) + (1222) + (2222)"), 0.291),
        ]),
        5 => Ok(vec![
            entry("1,1,1,1,1", mermin5(), 0.743),
            entry("2,1,1,1", svetlichny5(), 0.645),
            entry("2,2,1", parse(5, 2, "+8 - (11112) + (11222) - (22222)"), 0.493),
            entry("3,1,1", parse(5, 2, "+8 - (11112) + (11222) - (22222)"), 0.493),
            entry("3,2", parse(5, 2, "+40 + (11112) +2 (11122) -3 (11222) -4 (12222) +5 (22222)"), 0.291),
            entry(
                "4,1",
                parse(5, 2, "+16 - (11111) + (11112) + (11122) - (11222) - (12222) + (22222)"),
                0.291,
            ),
        ]),
        _ => Err(Error::InvalidScenario(format!("no reported table for n = {n}"))),
    }
}

/// A two-party expression `c0 + sum c [X y] >= 0` in which the first party
/// may have more than two settings.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TwoPartyForm {
    pub constant: BigRational,
    pub terms: BTreeMap<(u8, u8), BigRational>,
}

impl TwoPartyForm {
    fn from_ints(constant: i64, terms: &[((u8, u8), i64)]) -> Self {
        let q = |v: i64| BigRational::from_integer(v.into());
        TwoPartyForm { constant: q(constant), terms: terms.iter().map(|&(k, v)| (k, q(v))).collect() }
    }

    /// Termwise sum; zero coefficients are dropped.
    pub fn add(&self, other: &TwoPartyForm) -> TwoPartyForm {
        let mut terms = self.terms.clone();
        for (k, v) in &other.terms {
            *terms.entry(*k).or_insert_with(BigRational::zero) += v;
        }
        terms.retain(|_, v| !v.is_zero());
        TwoPartyForm { constant: &self.constant + &other.constant, terms }
    }

    /// Smallest value over deterministic local strategies (`+-1` per
    /// setting of each party); nonnegative means the form is a valid
    /// local inequality, zero means it is tight.
    pub fn local_minimum(&self) -> BigRational {
        let xs: Vec<u8> = self.terms.keys().map(|k| k.0).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        let ys: Vec<u8> = self.terms.keys().map(|k| k.1).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        let sign = |set: &[u8], bits: u32, v: u8| {
            let i = set.iter().position(|&s| s == v).expect("setting in list");
            if bits >> i & 1 == 1 { -1 } else { 1 }
        };
        let mut best: Option<BigRational> = None;
        for a in 0..1u32 << xs.len() {
            for b in 0..1u32 << ys.len() {
                let v: BigRational = self.constant.clone()
                    + self
                        .terms
                        .iter()
                        .map(|(&(x, y), c)| c * BigRational::from_integer((sign(&xs, a, x) * sign(&ys, b, y)).into()))
                        .sum::<BigRational>();
                if best.as_ref().is_none_or(|m| v < *m) {
                    best = Some(v);
                }
            }
        }
        best.unwrap_or_else(|| self.constant.clone())
    }
}

/// Treats parties A and B of a three-party, two-setting full-body
/// inequality as one party with setting `X = 2(a-1) + b`.
pub fn merge_first_two(ineq: &SymmetricInequality) -> Result<TwoPartyForm> {
    let s = ineq.scenario();
    if s.parties() != 3 || s.settings() != 2 || ineq.has_marginals() {
        return Err(Error::ScenarioMismatch("merging needs a full-body 3-party, 2-setting inequality".into()));
    }
    let mut terms = BTreeMap::new();
    for (t, c) in ineq.expand_symmetric() {
        let x = 2 * (t[0] - 1) + t[1];
        *terms.entry((x, t[2])).or_insert_with(BigRational::zero) += c;
    }
    terms.retain(|_, v: &mut BigRational| !v.is_zero());
    Ok(TwoPartyForm { constant: ineq.constant().clone(), terms })
}

/// The two CHSH inequalities whose sum is the merged Svetlichny form:
/// `2 - [12] - [21] - [22] + [11] >= 0` and `2 - [31] + [42] - [41] - [32] >= 0`.
pub fn svetlichny_chsh_pair() -> [TwoPartyForm; 2] {
    [
        TwoPartyForm::from_ints(2, &[((1, 2), -1), ((2, 1), -1), ((2, 2), -1), ((1, 1), 1)]),
        TwoPartyForm::from_ints(2, &[((3, 1), -1), ((4, 2), 1), ((4, 1), -1), ((3, 2), -1)]),
    ]
}

/// True when the merged Svetlichny form equals the sum of the two CHSH
/// forms coefficient by coefficient and each CHSH form is tight and valid
/// for local strategies.
pub fn svetlichny_is_two_chsh() -> Result<bool> {
    let merged = merge_first_two(&svetlichny())?;
    let [a, b] = svetlichny_chsh_pair();
    let tight = |f: &TwoPartyForm| f.local_minimum().is_zero();
    Ok(merged == a.add(&b) && tight(&a) && tight(&b) && !merged.local_minimum().is_negative())
}

/// Looks up a named inequality (`chsh`, `svetlichny`, `mermin3`, `mermin4`,
/// `mermin5`, `svetlichny5`, `f1`, `f2`, or `F<n>`).
pub fn by_name(name: &str) -> Result<SymmetricInequality> {
    let lower = name.to_ascii_lowercase();
    match lower.as_str() {
        "chsh" => Ok(chsh()),
        "svetlichny" | "svet" => Ok(svetlichny()),
        "mermin3" => Ok(mermin3()),
        "mermin4" => Ok(mermin4()),
        "mermin5" => Ok(mermin5()),
        "svetlichny5" => Ok(svetlichny5()),
        "f1" => Ok(f1()),
        "f2" => Ok(f2()),
        _ => {
            if let Some(n) = lower.strip_prefix('f').and_then(|r| r.parse::<usize>().ok()) {
                return family_inequality(n)?.to_symmetric();
            }
            Err(Error::Parse(format!("unknown inequality name '{name}'")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::HybridModel;
    use crate::ns::nosignaling_bound;
    use num_rational::BigRational;

    #[test]
    fn svetlichny_bounds() {
        let s = svetlichny();
        let local = HybridModel::full_body(*s.scenario(), "1,1,1".parse().unwrap()).unwrap();
        let bi = HybridModel::full_body(*s.scenario(), "2,1".parse().unwrap()).unwrap();
        assert_eq!(local.classical_bound(&s).unwrap(), BigRational::from_integer(4.into()));
        assert_eq!(bi.classical_bound(&s).unwrap(), BigRational::from_integer(4.into()));
        assert_eq!(nosignaling_bound(&s).unwrap(), BigRational::from_integer(8.into()));
    }

    #[test]
    fn svetlichny_splits_into_chsh() {
        let merged = merge_first_two(&svetlichny()).unwrap();
        assert_eq!(merged.terms.len(), 8);
        assert!(svetlichny_is_two_chsh().unwrap());
        // a different regrouping sign breaks the identity
        let [a, b] = svetlichny_chsh_pair();
        let mut wrong = b.clone();
        wrong.terms.insert((4, 2), BigRational::from_integer((-1).into()));
        assert_ne!(merged, a.add(&wrong));
        assert!(merge_first_two(&mermin4()).is_err());
    }

    #[test]
    fn names_resolve() {
        assert_eq!(by_name("F4").unwrap(), family_inequality(4).unwrap().to_symmetric().unwrap());
        assert_eq!(by_name("svetlichny").unwrap().to_text(), "+4 + (111) - (112) - (122) + (222)");
        assert!(by_name("nope").is_err());
        assert_eq!(best_per_model(5).unwrap().len(), 6);
    }
}
