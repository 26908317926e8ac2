use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::behavior::{Behavior, Space};
use crate::error::{Error, Result};
use crate::scenario::{Multiset, Scenario};

/// How a marginal term is read off a behavior given in probability space
/// (or off a signaling cell strategy): average over the unspecified partner
/// settings, or fix them to setting 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum MarginalConvention {
    #[default]
    UniformAverage,
    PartnerFirst,
}

/// A party-permutation symmetric Bell inequality `c0 + sum_mu c_mu (mu) >= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymmetricInequality {
    scenario: Scenario,
    constant: BigRational,
    coeffs: BTreeMap<Multiset, BigRational>,
}

pub(crate) fn q(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

impl SymmetricInequality {
    /// Builds and normalizes to coprime integers (positive scaling only).
    pub fn new(
        scenario: Scenario,
        constant: BigRational,
        coeffs: impl IntoIterator<Item = (Multiset, BigRational)>,
    ) -> Result<Self> {
        let mut map: BTreeMap<Multiset, BigRational> = BTreeMap::new();
        for (mu, c) in coeffs {
            if mu.0.len() != scenario.parties() {
                return Err(Error::DimensionMismatch { expected: scenario.parties(), got: mu.0.len() });
            }
            if mu.0.iter().any(|&x| x as usize > scenario.settings()) {
                return Err(Error::ScenarioMismatch(format!("multiset {mu} uses undefined setting")));
            }
            let mu = Multiset::from_tuple(&mu.0);
            if mu.0.iter().all(|&x| x == 0) {
                return Err(Error::ScenarioMismatch("all-trivial multiset".into()));
            }
            *map.entry(mu).or_insert_with(BigRational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        let mut ineq = SymmetricInequality { scenario, constant, coeffs: map };
        ineq.normalize();
        Ok(ineq)
    }

    /// From the bound form `sum_mu d_mu (mu) <= bound`.
    pub fn from_bound_form(
        scenario: Scenario,
        expr: impl IntoIterator<Item = (Multiset, BigRational)>,
        bound: BigRational,
    ) -> Result<Self> {
        Self::new(scenario, bound, expr.into_iter().map(|(m, d)| (m, -d)))
    }

    /// Two-setting full-body inequality from coefficients indexed by the
    /// number `l` of parties using setting 2.
    pub fn from_levels(scenario: Scenario, constant: i64, levels: &[i64]) -> Result<Self> {
        let n = scenario.parties();
        if scenario.settings() != 2 || levels.len() != n + 1 {
            return Err(Error::DimensionMismatch { expected: n + 1, got: levels.len() });
        }
        let coeffs = levels.iter().enumerate().map(|(l, &c)| (level_multiset(n, l), q(c)));
        Self::new(scenario, q(constant), coeffs)
    }

    fn normalize(&mut self) {
        let mut lcm = BigInt::one();
        for c in self.coeffs.values().chain(std::iter::once(&self.constant)) {
            lcm = lcm.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for c in self.coeffs.values().chain(std::iter::once(&self.constant)) {
            let v = c.numer() * (&lcm / c.denom());
            g = g.gcd(&v);
        }
        if g.is_zero() {
            return;
        }
        let scale = BigRational::new(lcm, g);
        self.constant = &self.constant * &scale;
        for c in self.coeffs.values_mut() {
            *c = &*c * &scale;
        }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn constant(&self) -> &BigRational {
        &self.constant
    }

    pub fn coeffs(&self) -> &BTreeMap<Multiset, BigRational> {
        &self.coeffs
    }

    pub fn coeff(&self, mu: &Multiset) -> BigRational {
        self.coeffs.get(mu).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn has_marginals(&self) -> bool {
        self.coeffs.keys().any(|m| m.has_marginal())
    }

    /// Level coefficients `c_l` for two-setting full-body inequalities.
    pub fn levels(&self) -> Vec<BigRational> {
        let n = self.scenario.parties();
        (0..=n).map(|l| self.coeff(&level_multiset(n, l))).collect()
    }

    /// The Bell expression `d = -c` whose maximum the constant bounds.
    pub fn expression(&self) -> Vec<(Multiset, BigRational)> {
        self.coeffs.iter().map(|(m, c)| (m.clone(), -c.clone())).collect()
    }

    /// Same expression with a different constant (renormalized).
    pub fn with_constant(&self, constant: BigRational) -> SymmetricInequality {
        let mut out = SymmetricInequality {
            scenario: self.scenario,
            constant,
            coeffs: self.coeffs.clone(),
        };
        out.normalize();
        out
    }

    /// Expands every multiset to all of its distinct orderings.
    pub fn expand_symmetric(&self) -> Vec<(Vec<u8>, BigRational)> {
        let mut out = Vec::new();
        for (mu, c) in &self.coeffs {
            for t in mu.permutations() {
                out.push((t, c.clone()));
            }
        }
        out
    }

    /// Expanded tuples of the Bell expression `-c`.
    pub fn expression_terms(&self) -> Vec<(Vec<u8>, BigRational)> {
        self.expand_symmetric().into_iter().map(|(t, c)| (t, -c)).collect()
    }

    /// Dense coefficient vector over the index set of `space`.
    pub fn dense(&self, space: Space) -> Result<Vec<BigRational>> {
        let s = &self.scenario;
        let mut v = vec![BigRational::zero(); space.dim(s)];
        for (t, c) in self.expand_symmetric() {
            let idx = match space {
                Space::FullCorrelation => {
                    if t.contains(&0) {
                        return Err(Error::ScenarioMismatch("marginal term in full-body space".into()));
                    }
                    s.full_body_index(&t)
                }
                Space::WithMarginals => s.marginal_index(&t),
                Space::Probability => {
                    return Err(Error::ScenarioMismatch("no dense form in probability space".into()))
                }
            };
            v[idx] = c;
        }
        Ok(v)
    }

    /// `c0 + sum c * corr`; nonnegative values certify non-violation.
    pub fn evaluate(&self, b: &Behavior, conv: MarginalConvention) -> Result<BigRational> {
        if b.scenario() != &self.scenario {
            return Err(Error::DimensionMismatch {
                expected: self.scenario.full_body_dim(),
                got: b.scenario().full_body_dim(),
            });
        }
        let mut acc = self.constant.clone();
        for (t, c) in self.expand_symmetric() {
            acc += c * b.correlator(&t, conv)?;
        }
        Ok(acc)
    }

    /// Compact text rendering, e.g. `+16 - (1112) -2 (1122)`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&signed(&self.constant, true));
        for (mu, c) in &self.coeffs {
            s.push(' ');
            s.push_str(&signed(c, false));
            s.push_str(&format!("{mu}"));
        }
        s
    }

    /// Parses the text format produced by [`to_text`](Self::to_text); a
    /// unicode minus sign is accepted.
    pub fn parse_text(scenario: Scenario, text: &str) -> Result<Self> {
        let text = text.replace('\u{2212}', "-");
        let toks: Vec<&str> = text.split_whitespace().collect();
        let mut constant = BigRational::zero();
        let mut coeffs = Vec::new();
        let mut pending: Option<BigRational> = None;
        for tok in toks {
            if let Some(rest) = tok.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
                let mu: Result<Vec<u8>> = rest
                    .chars()
                    .map(|ch| {
                        ch.to_digit(10)
                            .map(|d| d as u8)
                            .ok_or_else(|| Error::Parse(format!("bad multiset {tok}")))
                    })
                    .collect();
                coeffs.push((Multiset(mu?), pending.take().unwrap_or_else(BigRational::one)));
                continue;
            }
            // a number glued to a multiset, e.g. "+3(1222)" or "-(1112)"
            let (num, ms) = match tok.find('(') {
                Some(i) => (&tok[..i], Some(&tok[i..])),
                None => (tok, None),
            };
            let val = parse_signed(num)?;
            match ms {
                Some(ms) => {
                    let inner = ms
                        .strip_prefix('(')
                        .and_then(|r| r.strip_suffix(')'))
                        .ok_or_else(|| Error::Parse(format!("bad term {tok}")))?;
                    let mu: Result<Vec<u8>> = inner
                        .chars()
                        .map(|ch| {
                            ch.to_digit(10)
                                .map(|d| d as u8)
                                .ok_or_else(|| Error::Parse(format!("bad multiset {tok}")))
                        })
                        .collect();
                    coeffs.push((Multiset(mu?), val));
                }
                None => {
                    if let Some(p) = pending.take() {
                        // a bare number followed by another bare number: the first was the constant
                        constant += p;
                    }
                    pending = Some(val);
                }
            }
        }
        if let Some(p) = pending {
            constant += p;
        }
        Self::new(scenario, constant, coeffs)
    }

    pub fn to_record(&self) -> InequalityRecord {
        InequalityRecord {
            n: self.scenario.parties(),
            m: self.scenario.settings(),
            constant: self.constant.to_string(),
            coeffs: self
                .coeffs
                .iter()
                .map(|(mu, c)| CoeffRecord { multiset: mu.0.clone(), c: c.to_string() })
                .collect(),
            text: Some(self.to_text()),
            bounds: None,
            model: None,
        }
    }

    pub fn from_record(r: &InequalityRecord) -> Result<Self> {
        let s = Scenario::new(r.n, r.m)?;
        let constant = parse_rational(&r.constant)?;
        let coeffs: Result<Vec<_>> = r
            .coeffs
            .iter()
            .map(|c| Ok((Multiset(c.multiset.clone()), parse_rational(&c.c)?)))
            .collect();
        Self::new(s, constant, coeffs?)
    }
}

impl fmt::Display for SymmetricInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// Multiset with `n - l` ones followed by `l` twos.
pub fn level_multiset(n: usize, l: usize) -> Multiset {
    let mut v = vec![1u8; n - l];
    v.extend(std::iter::repeat(2u8).take(l));
    Multiset(v)
}

fn signed(c: &BigRational, constant: bool) -> String {
    let sign = if c.is_negative() { "-" } else { "+" };
    let a = c.abs();
    if constant {
        format!("{sign}{a}")
    } else if a.is_one() {
        format!("{sign} ")
    } else {
        format!("{sign}{a} ")
    }
}

fn parse_signed(tok: &str) -> Result<BigRational> {
    match tok {
        "+" | "" => Ok(BigRational::one()),
        "-" => Ok(-BigRational::one()),
        _ => {
            let (neg, body) = match tok.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, tok.strip_prefix('+').unwrap_or(tok)),
            };
            let v = if body.is_empty() { BigRational::one() } else { parse_rational(body)? };
            Ok(if neg { -v } else { v })
        }
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    s.trim().parse::<BigRational>().map_err(|_| Error::Parse(format!("bad rational '{s}'")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffRecord {
    pub multiset: Vec<u8>,
    pub c: String,
}

/// Bounds attached to a stored inequality.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundsRecord {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classical: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nosignaling: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quantum_lb: Option<f64>,
}

/// JSON form of an inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityRecord {
    pub n: usize,
    pub m: usize,
    pub constant: String,
    pub coeffs: Vec<CoeffRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn svet() -> SymmetricInequality {
        let s = Scenario::new(3, 2).unwrap();
        SymmetricInequality::from_levels(s, 4, &[1, -1, -1, 1]).unwrap()
    }

    #[test]
    fn normalization_is_primitive() {
        let s = Scenario::new(3, 2).unwrap();
        let a = SymmetricInequality::from_levels(s, 8, &[2, -2, -2, 2]).unwrap();
        assert_eq!(a, svet());
        let half = SymmetricInequality::new(
            s,
            BigRational::new(1.into(), 2.into()),
            vec![(Multiset(vec![1, 1, 1]), BigRational::new(1.into(), 4.into()))],
        )
        .unwrap();
        assert_eq!(half.constant(), &q(2));
        assert_eq!(half.coeff(&Multiset(vec![1, 1, 1])), q(1));
    }

    #[test]
    fn expansion_sizes() {
        let s = Scenario::new(4, 2).unwrap();
        let i = SymmetricInequality::from_levels(s, 0, &[0, 1, 1, 0, 0]).unwrap();
        let e = i.expand_symmetric();
        assert_eq!(e.len(), 4 + 6);
        let mut t1112: Vec<Vec<u8>> = e
            .iter()
            .filter(|(t, _)| t.iter().filter(|&&x| x == 2).count() == 1)
            .map(|(t, _)| t.clone())
            .collect();
        t1112.sort();
        assert_eq!(t1112, vec![vec![1, 1, 1, 2], vec![1, 1, 2, 1], vec![1, 2, 1, 1], vec![2, 1, 1, 1]]);
    }

    #[test]
    fn evaluate_examples() {
        let s = Scenario::new(3, 2).unwrap();
        let i = svet();
        let conv = MarginalConvention::UniformAverage;
        assert_eq!(i.evaluate(&Behavior::from_sign_bits(s, 0), conv).unwrap(), q(0));
        // corr(111) = corr(222) = -1, the rest +1
        let bits = 1u64 | 1 << 7;
        assert_eq!(i.evaluate(&Behavior::from_sign_bits(s, bits), conv).unwrap(), q(-4));
        let z = Behavior::zeros(s, Space::FullCorrelation);
        assert_eq!(i.evaluate(&z, conv).unwrap(), q(4));
    }

    #[test]
    fn minimum_over_hypercube_is_minus_four() {
        let s = Scenario::new(3, 2).unwrap();
        let i = svet();
        let min = (0u64..256)
            .map(|b| i.evaluate(&Behavior::from_sign_bits(s, b), MarginalConvention::UniformAverage).unwrap())
            .min()
            .unwrap();
        assert_eq!(min, q(-4));
    }

    #[test]
    fn text_round_trip() {
        let s = Scenario::new(4, 2).unwrap();
        let t = "+16 - (1112) -2 (1122) +3 (1222) +4 (2222)";
        let i = SymmetricInequality::parse_text(s, t).unwrap();
        assert_eq!(i.to_text(), t);
        let u = SymmetricInequality::parse_text(s, "+16 \u{2212} (1112) \u{2212}2 (1122) +3 (1222) +4 (2222)").unwrap();
        assert_eq!(i, u);
        let rec = i.to_record();
        let js = serde_json::to_string(&rec).unwrap();
        let back: InequalityRecord = serde_json::from_str(&js).unwrap();
        assert_eq!(SymmetricInequality::from_record(&back).unwrap(), i);
    }

    #[test]
    fn marginal_text() {
        let s = Scenario::new(3, 3).unwrap();
        let f1 = SymmetricInequality::parse_text(
            s,
            "+13 - (001) + (111) - (112) - (122) + (222) -2 (003) + (013) - (033) - (133)",
        )
        .unwrap();
        assert!(f1.has_marginals());
        assert_eq!(f1.constant(), &q(13));
    }
}
