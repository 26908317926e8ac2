//! White-noise robustness: `rho_n(p) = (1-p)|GHZ><GHZ| + p I/2^n` and the
//! critical-interval scan over `p`.

use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::pauli::{pauli_tensor_pure, Op};
use super::seesaw::{fixed_state_run, random_observables, Evaluator, Expr, SeesawOptions};
use super::{ghz, State};
use crate::error::{Error, Result};
use crate::inequality::SymmetricInequality;

/// GHZ state mixed with white noise of weight `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyGhz {
    pub n: usize,
    pub p: f64,
}

impl NoisyGhz {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::QuantumCheck(format!("noise weight {p} outside [0,1]")));
        }
        Ok(NoisyGhz { n, p })
    }

    pub fn density(&self) -> Op {
        let g = ghz(self.n);
        let d = 1usize << self.n;
        let pure = &g * g.adjoint();
        pure * super::pauli::c(1.0 - self.p, 0.0) + Op::identity(d, d) * super::pauli::c(self.p / d as f64, 0.0)
    }

    pub fn state(&self) -> State {
        State::Mixed(self.density())
    }

    /// Pauli tensor: white noise only survives on the identity string.
    pub fn tensor(&self) -> Vec<f64> {
        let mut t: Vec<f64> = pauli_tensor_pure(&ghz(self.n), self.n).iter().map(|v| v * (1.0 - self.p)).collect();
        t[0] = 1.0;
        t
    }
}

/// Parameters of the critical-interval scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustnessOptions {
    pub grid: usize,
    pub threshold: f64,
    pub width: f64,
    pub max_rounds: usize,
    pub seesaw: SeesawOptions,
}

impl Default for RobustnessOptions {
    fn default() -> Self {
        RobustnessOptions { grid: 21, threshold: 1e-6, width: 1e-4, max_rounds: 64, seesaw: SeesawOptions::default() }
    }
}

/// Bracket `[p0, p1]` of the noise level where violation stops, or
/// `Empty` when the noiseless GHZ state shows no violation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CriticalInterval {
    Empty,
    Interval { p0: f64, p1: f64 },
}

impl CriticalInterval {
    pub fn midpoint(&self) -> Option<f64> {
        match self {
            CriticalInterval::Empty => None,
            CriticalInterval::Interval { p0, p1 } => Some((p0 + p1) / 2.0),
        }
    }

    pub fn contains(&self, p: f64, tol: f64) -> bool {
        match self {
            CriticalInterval::Empty => false,
            CriticalInterval::Interval { p0, p1 } => p >= p0 - tol && p <= p1 + tol,
        }
    }
}

/// Scan result: the interval plus the noiseless violation and settings.
#[derive(Debug, Clone)]
pub struct RobustnessReport {
    pub interval: CriticalInterval,
    /// Best expression value on the pure GHZ state.
    pub ghz_value: f64,
    pub settings: Vec<Vec<[f64; 4]>>,
    pub grid_points: usize,
}

fn constant(ineq: &SymmetricInequality) -> f64 {
    ineq.constant().to_f64().unwrap_or(f64::NAN)
}

/// Seesaw over observables at fixed `rho_n(p)`; returns the largest
/// violation `max <B> - c0` found and its settings. `warm` seeds one extra
/// run.
fn violation_with(
    ineq: &SymmetricInequality,
    p: f64,
    opts: &SeesawOptions,
    warm: Option<&[Vec<[f64; 4]>]>,
) -> Result<(f64, Vec<Vec<[f64; 4]>>)> {
    let s = ineq.scenario();
    let (n, m) = (s.parties(), s.settings());
    let ev = Evaluator::new(Expr::new(ineq), &NoisyGhz::new(n, p)?.tensor());
    let c0 = constant(ineq);
    let mut best: Option<(f64, Vec<Vec<[f64; 4]>>)> = None;
    let mut starts: Vec<Vec<Vec<[f64; 4]>>> = Vec::new();
    if let Some(w) = warm {
        starts.push(w.to_vec());
    }
    for r in 0..opts.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(r as u64));
        starts.push(random_observables(n, m, &mut rng));
    }
    for mut u in starts {
        let (v, _, _, _) = fixed_state_run(&ev, &mut u, opts);
        if best.as_ref().is_none_or(|b| v - c0 > b.0) {
            best = Some((v - c0, u));
        }
    }
    Ok(best.expect("at least one start"))
}

/// Largest violation `max <B> - c0` found at noise `p` (positive = violated).
pub fn violation_at(ineq: &SymmetricInequality, p: f64, opts: &SeesawOptions) -> Result<f64> {
    violation_with(ineq, p, opts, None).map(|(v, _)| v)
}

fn is_convex(ps: &[f64], vs: &[f64]) -> bool {
    (1..vs.len().saturating_sub(1)).all(|i| {
        let (h1, h2) = (ps[i] - ps[i - 1], ps[i + 1] - ps[i]);
        // second divided difference, scaled
        let dd = (vs[i + 1] - vs[i]) / h2 - (vs[i] - vs[i - 1]) / h1;
        dd >= -1e-6 * (1.0 + vs[i].abs()) / h1.min(h2)
    })
}

/// Grid scan: evaluate the violation on an equidistant grid,
/// bracket the last violated and first non-violated point, then refine
/// the bracket until it is narrower than `opts.width`.
pub fn critical_interval(ineq: &SymmetricInequality, opts: &RobustnessOptions) -> Result<RobustnessReport> {
    if opts.grid < 3 {
        return Err(Error::QuantumCheck("grid size must be at least 3".into()));
    }
    let (v0, u0) = violation_with(ineq, 0.0, &opts.seesaw, None)?;
    let c0 = constant(ineq);
    let ghz_value = v0 + c0;
    if v0 <= opts.threshold {
        return Ok(RobustnessReport { interval: CriticalInterval::Empty, ghz_value, settings: u0, grid_points: 1 });
    }
    // later grid points warm-start from the noiseless optimum, plus a few
    // fresh restarts
    let light = SeesawOptions { restarts: opts.seesaw.restarts.clamp(1, 3), ..opts.seesaw };
    let mut warm = u0.clone();
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut evaluated = 1;
    for _round in 0..opts.max_rounds {
        let ps: Vec<f64> = (0..opts.grid).map(|i| lo + (hi - lo) * i as f64 / (opts.grid - 1) as f64).collect();
        let mut vs = Vec::with_capacity(ps.len());
        for &p in &ps {
            let (v, u) = violation_with(ineq, p, &light, Some(&warm))?;
            if p == 0.0 && v >= v0 {
                warm = u;
            }
            vs.push(v);
        }
        evaluated += ps.len();
        let mut attempt = light;
        let mut tries = 0;
        while !is_convex(&ps, &vs) && tries < 2 {
            attempt.restarts *= 2;
            attempt.seed = attempt.seed.wrapping_add(1000);
            for (i, &p) in ps.iter().enumerate() {
                let (v, _) = violation_with(ineq, p, &attempt, Some(&warm))?;
                vs[i] = vs[i].max(v);
            }
            evaluated += ps.len();
            tries += 1;
        }
        let Some(i0) = (0..ps.len()).rev().find(|&i| vs[i] > opts.threshold) else {
            // refinement lost the violation at lo; keep the bracket
            break;
        };
        let i1 = (i0 + 1..ps.len()).find(|&i| vs[i] <= opts.threshold);
        match i1 {
            None => {
                // violated on the whole bracket, including hi = 1
                lo = ps[i0];
                break;
            }
            Some(i1) => {
                lo = ps[i0];
                hi = ps[i1];
            }
        }
        if hi - lo < opts.width {
            break;
        }
    }
    Ok(RobustnessReport {
        interval: CriticalInterval::Interval { p0: lo, p1: hi },
        ghz_value,
        settings: warm,
        grid_points: evaluated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Scenario;

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

        /// Full-body values scale by `1 - p` at fixed settings.
        #[test]
        fn noise_scales_full_body_values(
            levels in proptest::collection::vec(-4i64..=4, 5),
            p in 0.0f64..=1.0,
            seed in 0u64..1000,
        ) {
            use rand::SeedableRng;
            use super::super::seesaw::{random_observables, Evaluator, Expr};
            proptest::prop_assume!(levels.iter().any(|&c| c != 0));
            let ineq = SymmetricInequality::from_levels(Scenario::new(4, 2).unwrap(), 40, &levels).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let u = random_observables(4, 2, &mut rng);
            let pure = Evaluator::new(Expr::new(&ineq), &NoisyGhz::new(4, 0.0).unwrap().tensor()).value(&u);
            let noisy = Evaluator::new(Expr::new(&ineq), &NoisyGhz::new(4, p).unwrap().tensor()).value(&u);
            proptest::prop_assert!((noisy - (1.0 - p) * pure).abs() < 1e-9 * (1.0 + pure.abs()));
        }
    }

    #[test]
    fn noisy_ghz_trace() {
        let g = NoisyGhz::new(3, 0.3).unwrap();
        let rho = g.density();
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        let t = super::super::pauli::pauli_tensor_density(&rho, 3);
        for (a, b) in t.iter().zip(g.tensor()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(NoisyGhz::new(3, 1.5).is_err());
    }

    #[test]
    fn fully_mixed_is_local() {
        let s = Scenario::new(3, 2).unwrap();
        let svet = SymmetricInequality::from_levels(s, 4, &[1, -1, -1, 1]).unwrap();
        let v = violation_at(&svet, 1.0, &SeesawOptions { restarts: 2, ..Default::default() }).unwrap();
        // only deterministic (+-I) observables matter; the local bound is 4
        assert!(v.abs() < 1e-9, "{v}");
    }
}
