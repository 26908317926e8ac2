//! Qubit quantum bounds: Bell operators, seesaw lower bounds, and noise
//! robustness against white noise on the GHZ state.

pub mod noise;
pub mod pauli;
pub mod seesaw;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inequality::SymmetricInequality;
use pauli::{c, from_pauli, kron_all, sigma, Op, C};

pub use noise::{critical_interval, violation_at, CriticalInterval, NoisyGhz, RobustnessOptions};
pub use seesaw::{seesaw_max, SeesawOptions, SeesawResult};

/// Quantum state: pure vector or density operator.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Pure(DVector<C>),
    Mixed(Op),
}

impl State {
    pub fn density(&self) -> Op {
        match self {
            State::Pure(v) => v * v.adjoint(),
            State::Mixed(r) => r.clone(),
        }
    }
}

/// Per-party dichotomic observables (Pauli coordinates, settings 1..m)
/// together with a state.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumConfig {
    pub n: usize,
    /// `observables[k][x-1]` is party `k`'s setting `x`.
    pub observables: Vec<Vec<[f64; 4]>>,
    pub state: State,
}

impl QuantumConfig {
    /// Checks `O = O^dagger`, `O^2 = I` (1e-10) and the state's trace and
    /// positivity.
    pub fn validate(&self) -> Result<()> {
        for (k, obs) in self.observables.iter().enumerate() {
            for (x, u) in obs.iter().enumerate() {
                let o = from_pauli(u);
                if (o - o.adjoint()).norm() > 1e-10 || (o * o - nalgebra::Matrix2::identity()).norm() > 1e-10 {
                    return Err(Error::QuantumCheck(format!("observable of party {k}, setting {} is not ±1-valued", x + 1)));
                }
            }
        }
        let rho = self.state.density();
        let d = 1usize << self.n;
        if rho.nrows() != d {
            return Err(Error::DimensionMismatch { expected: d, got: rho.nrows() });
        }
        if (rho.trace() - c(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::QuantumCheck("state trace is not 1".into()));
        }
        let eig = rho.clone().symmetric_eigen();
        if eig.eigenvalues.iter().any(|&l| l < -1e-10) {
            return Err(Error::QuantumCheck("state is not positive semidefinite".into()));
        }
        Ok(())
    }

    /// `Tr(rho B)` for the Bell operator of `ineq`'s expression.
    pub fn expectation(&self, ineq: &SymmetricInequality) -> Result<f64> {
        let b = bell_operator(ineq, self)?;
        Ok((self.state.density() * b).trace().re)
    }

    pub fn to_record(&self) -> ConfigRecord {
        let amplitudes = match &self.state {
            State::Pure(v) => Some(v.iter().map(|z| [z.re, z.im]).collect()),
            State::Mixed(_) => None,
        };
        ConfigRecord { settings: self.observables.clone(), amplitudes }
    }
}

/// Serializable summary of a configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigRecord {
    /// Pauli coordinates `[I, X, Y, Z]` per party and setting.
    pub settings: Vec<Vec<[f64; 4]>>,
    /// Computational-basis amplitudes `[re, im]` of a pure state.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
}

/// Bell operator of the expression `-c`: the sum over expanded tuples of
/// `d * O_{x_1} x ... x O_{x_n}` (identity for setting 0).
pub fn bell_operator(ineq: &SymmetricInequality, cfg: &QuantumConfig) -> Result<Op> {
    let n = ineq.scenario().parties();
    if cfg.n != n || cfg.observables.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: cfg.observables.len() });
    }
    let d = 1usize << n;
    let mut b = DMatrix::zeros(d, d);
    for (t, coef) in ineq.expression_terms() {
        let mut fs = Vec::with_capacity(n);
        for (k, &x) in t.iter().enumerate() {
            if x == 0 {
                fs.push(sigma(0));
            } else {
                let u = cfg
                    .observables[k]
                    .get(x as usize - 1)
                    .ok_or(Error::DimensionMismatch { expected: x as usize, got: cfg.observables[k].len() })?;
                fs.push(from_pauli(u));
            }
        }
        let f = num_traits::ToPrimitive::to_f64(&coef).unwrap_or(0.0);
        b += kron_all(&fs) * c(f, 0.0);
    }
    Ok(b)
}

/// Largest eigenvalue and eigenvector of a Hermitian operator.
pub fn top_eigen(op: &Op) -> (f64, DVector<C>) {
    let eig = op.clone().symmetric_eigen();
    let (i, &l) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite eigenvalues"))
        .expect("nonempty spectrum");
    (l, eig.eigenvectors.column(i).into_owned())
}

/// `(|0..0> + |1..1>)/sqrt 2`.
pub fn ghz(n: usize) -> DVector<C> {
    let mut v = DVector::zeros(1 << n);
    let a = 1.0 / 2f64.sqrt();
    v[0] = c(a, 0.0);
    v[(1 << n) - 1] = c(a, 0.0);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Scenario;

    #[test]
    fn svetlichny_operator_at_known_settings() {
        // A1=X, A2=Y on every party with a phase-rotated GHZ reaches 4 sqrt 2
        let s = Scenario::new(3, 2).unwrap();
        let svet = SymmetricInequality::from_levels(s, 4, &[1, -1, -1, 1]).unwrap();
        let r = 1.0 / 2f64.sqrt();
        let a1 = [0.0, r, r, 0.0];
        let a2 = [0.0, r, -r, 0.0];
        let cfg = QuantumConfig { n: 3, observables: vec![vec![a1, a2]; 3], state: State::Pure(ghz(3)) };
        let b = bell_operator(&svet, &cfg).unwrap();
        let (l, _) = top_eigen(&b);
        assert!((l - 4.0 * 2f64.sqrt()).abs() < 1e-9, "{l}");
        let zero = SymmetricInequality::from_levels(s, 1, &[0, 0, 0, 0]).unwrap();
        assert!(bell_operator(&zero, &cfg).unwrap().norm() < 1e-15);
    }
}
