use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inequality::MarginalConvention;
use crate::scenario::Scenario;

/// Coordinate system of a behavior vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Space {
    /// Full-body correlators, indexed by tuples in `{1..m}^n`.
    FullCorrelation,
    /// All correlators including marginals (setting 0 = trivial).
    WithMarginals,
    /// Probabilities `p(a|x)`, indexed by `x_index * 2^n + a_bits`.
    Probability,
}

impl Space {
    pub fn dim(&self, s: &Scenario) -> usize {
        match self {
            Space::FullCorrelation => s.full_body_dim(),
            Space::WithMarginals => s.marginal_dim(),
            Space::Probability => s.full_body_dim() << s.parties(),
        }
    }
}

/// A behavior with exact rational entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Behavior {
    scenario: Scenario,
    space: Space,
    entries: Vec<BigRational>,
}

impl Behavior {
    pub fn zeros(scenario: Scenario, space: Space) -> Self {
        Behavior { scenario, space, entries: vec![BigRational::zero(); space.dim(&scenario)] }
    }

    /// Builds a behavior and checks the box / normalization invariants.
    pub fn new(scenario: Scenario, space: Space, entries: Vec<BigRational>) -> Result<Self> {
        let dim = space.dim(&scenario);
        if entries.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: entries.len() });
        }
        let b = Behavior { scenario, space, entries };
        b.check()?;
        Ok(b)
    }

    /// Correlator-space behavior from integer entries divided by `scale`.
    pub fn from_scaled(scenario: Scenario, space: Space, row: &[i64], scale: i64) -> Result<Self> {
        let entries = row
            .iter()
            .map(|&v| BigRational::new(v.into(), scale.into()))
            .collect();
        Behavior::new(scenario, space, entries)
    }

    /// Full-body ±1 behavior from packed sign bits (bit set = -1).
    pub fn from_sign_bits(scenario: Scenario, bits: u64) -> Self {
        let entries = (0..scenario.full_body_dim())
            .map(|i| {
                if bits >> i & 1 == 1 {
                    -BigRational::one()
                } else {
                    BigRational::one()
                }
            })
            .collect();
        Behavior { scenario, space: Space::FullCorrelation, entries }
    }

    fn check(&self) -> Result<()> {
        match self.space {
            Space::Probability => {
                let blk = 1usize << self.scenario.parties();
                for chunk in self.entries.chunks(blk) {
                    if chunk.iter().any(|p| p.is_negative()) {
                        return Err(Error::Parse("negative probability".into()));
                    }
                    let s: BigRational = chunk.iter().cloned().sum();
                    if !s.is_one() {
                        return Err(Error::Parse("probabilities not normalized".into()));
                    }
                }
            }
            _ => {
                if self.entries.iter().any(|e| e.abs() > BigRational::one()) {
                    return Err(Error::Parse("correlator outside [-1,1]".into()));
                }
            }
        }
        Ok(())
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.entries
    }

    /// Correlator for a setting tuple (entries 0 mark trivial settings).
    pub fn correlator(&self, t: &[u8], conv: MarginalConvention) -> Result<BigRational> {
        let s = &self.scenario;
        if t.len() != s.parties() {
            return Err(Error::DimensionMismatch { expected: s.parties(), got: t.len() });
        }
        if t.iter().all(|&x| x == 0) {
            return Ok(BigRational::one());
        }
        let marginal = t.contains(&0);
        match self.space {
            Space::FullCorrelation => {
                if marginal {
                    return Err(Error::ScenarioMismatch(
                        "marginal term requested from a full-body behavior".into(),
                    ));
                }
                Ok(self.entries[s.full_body_index(t)].clone())
            }
            Space::WithMarginals => Ok(self.entries[s.marginal_index(t)].clone()),
            Space::Probability => {
                // fill trivial slots with concrete settings, summing outcomes out
                let free: Vec<usize> = (0..t.len()).filter(|&k| t[k] == 0).collect();
                let fills: Vec<Vec<u8>> = match conv {
                    MarginalConvention::PartnerFirst => vec![vec![1; free.len()]],
                    MarginalConvention::UniformAverage => {
                        let m = s.settings();
                        (0..m.pow(free.len() as u32))
                            .map(|mut c| {
                                (0..free.len())
                                    .map(|_| {
                                        let v = (c % m) as u8 + 1;
                                        c /= m;
                                        v
                                    })
                                    .collect()
                            })
                            .collect()
                    }
                };
                let n = s.parties();
                let mut total = BigRational::zero();
                for fill in &fills {
                    let mut x = t.to_vec();
                    for (slot, &v) in free.iter().zip(fill) {
                        x[*slot] = v;
                    }
                    let base = s.full_body_index(&x) << n;
                    for a in 0..(1usize << n) {
                        let mut neg = false;
                        for k in 0..n {
                            if t[k] != 0 && a >> (n - 1 - k) & 1 == 1 {
                                neg = !neg;
                            }
                        }
                        let p = &self.entries[base + a];
                        if neg {
                            total -= p;
                        } else {
                            total += p;
                        }
                    }
                }
                Ok(total / BigRational::from_integer((fills.len() as i64).into()))
            }
        }
    }

    /// `alpha * self + (1 - alpha) * other`.
    pub fn convex_combination(&self, alpha: &BigRational, other: &Behavior) -> Result<Behavior> {
        if self.scenario != other.scenario || self.space != other.space {
            return Err(Error::ScenarioMismatch("convex combination of unlike behaviors".into()));
        }
        let beta = BigRational::one() - alpha;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| alpha * a + &beta * b)
            .collect();
        Ok(Behavior { scenario: self.scenario, space: self.space, entries })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn sign_bits_round_trip() {
        let s = Scenario::new(3, 2).unwrap();
        let b = Behavior::from_sign_bits(s, 0b1000_0001);
        let c = b.correlator(&[1, 1, 1], MarginalConvention::UniformAverage).unwrap();
        assert_eq!(c, q(-1, 1));
        let c = b.correlator(&[1, 1, 2], MarginalConvention::UniformAverage).unwrap();
        assert_eq!(c, q(1, 1));
    }

    #[test]
    fn box_invariant_enforced() {
        let s = Scenario::new(2, 2).unwrap();
        let e = vec![q(2, 1), q(0, 1), q(0, 1), q(0, 1)];
        assert!(Behavior::new(s, Space::FullCorrelation, e).is_err());
    }

    #[test]
    fn probability_correlators() {
        // PR box: a*b = -1 iff x=y=2
        let s = Scenario::new(2, 2).unwrap();
        let mut e = vec![q(0, 1); 16];
        for x in 0..4usize {
            let t = s.full_body_tuple(x);
            let anti = t == vec![2, 2];
            for a in 0..4usize {
                let same = (a >> 1 & 1) == (a & 1);
                if same != anti {
                    e[x * 4 + a] = q(1, 2);
                }
            }
        }
        let b = Behavior::new(s, Space::Probability, e).unwrap();
        let conv = MarginalConvention::UniformAverage;
        assert_eq!(b.correlator(&[1, 1], conv).unwrap(), q(1, 1));
        assert_eq!(b.correlator(&[2, 2], conv).unwrap(), q(-1, 1));
        assert_eq!(b.correlator(&[1, 0], conv).unwrap(), q(0, 1));
    }
}
