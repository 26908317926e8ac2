//! Seesaw maximization: cycle through parties, replacing each observable
//! by the spectral sign of its effective operator; optionally update the
//! state to the top eigenvector of the Bell operator after each sweep.

use nalgebra::DVector;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::pauli::{pauli_tensor_pure, sign_observable, C};
use super::{bell_operator, top_eigen, QuantumConfig, State};
use crate::error::{Error, Result};
use crate::inequality::SymmetricInequality;

/// Seesaw parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeesawOptions {
    pub restarts: usize,
    pub max_sweeps: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SeesawOptions {
    fn default() -> Self {
        SeesawOptions { restarts: 20, max_sweeps: 500, tol: 1e-9, seed: 0x5EE5A4 }
    }
}

/// Best value found and the configuration achieving it.
#[derive(Debug, Clone)]
pub struct SeesawResult {
    pub value: f64,
    pub config: QuantumConfig,
    pub sweeps: usize,
    pub converged: bool,
    /// False if any single update lowered the value beyond round-off.
    pub monotone: bool,
}

const DEGENERATE: f64 = 1e-12;

/// Dense expression coefficients over `{0..m}^n` (base `m+1`).
pub(crate) struct Expr {
    pub n: usize,
    pub m: usize,
    pub d: Vec<f64>,
}

impl Expr {
    pub fn new(ineq: &SymmetricInequality) -> Self {
        let s = ineq.scenario();
        let (n, m) = (s.parties(), s.settings());
        let base = m + 1;
        let mut d = vec![0.0; base.pow(n as u32)];
        for (t, c) in ineq.expression_terms() {
            let idx = t.iter().fold(0, |acc, &x| acc * base + x as usize);
            d[idx] += c.to_f64().unwrap_or(0.0);
        }
        Expr { n, m, d }
    }
}

/// Moves party `k`'s axis of a `4^n` tensor to the end.
fn permute_last(t: &[f64], n: usize, k: usize) -> Vec<f64> {
    if k == n - 1 {
        return t.to_vec();
    }
    let mut out = vec![0.0; t.len()];
    for (idx, &v) in t.iter().enumerate() {
        let mut digits = vec![0usize; n];
        let mut r = idx;
        for q in (0..n).rev() {
            digits[q] = r % 4;
            r /= 4;
        }
        let ak = digits.remove(k);
        digits.push(ak);
        let j = digits.iter().fold(0, |acc, &x| acc * 4 + x);
        out[j] = v;
    }
    out
}

/// Fixed-state evaluator built on the Pauli correlation tensor.
pub(crate) struct Evaluator {
    pub expr: Expr,
    // tensor with party k's axis last, for every k
    perm: Vec<Vec<f64>>,
}

impl Evaluator {
    pub fn new(expr: Expr, tensor: &[f64]) -> Self {
        let n = expr.n;
        let perm = (0..n).map(|k| permute_last(tensor, n, k)).collect();
        Evaluator { expr, perm }
    }

    /// Effective 4-vectors `h_x` (x = 0..m) of party `k`; the Bell value is
    /// `sum_x u_x . h_x` with `u_0 = (1,0,0,0)`.
    pub fn effective(&self, k: usize, u: &[Vec<[f64; 4]>]) -> Vec<[f64; 4]> {
        let n = self.expr.n;
        let s = self.expr.m + 1;
        // contract every other party with its setting vectors (identity first)
        let mut cur = self.perm[k].clone();
        let mut p = 1usize;
        let others: Vec<usize> = (0..n).filter(|&j| j != k).collect();
        for (step, &j) in others.iter().enumerate() {
            let r = 4usize.pow((n - 1 - step) as u32);
            let mut next = vec![0.0; p * s * r];
            let vecs: Vec<[f64; 4]> = std::iter::once([1.0, 0.0, 0.0, 0.0]).chain(u[j].iter().copied()).collect();
            for pi in 0..p {
                for (si, v) in vecs.iter().enumerate() {
                    let dst = &mut next[(pi * s + si) * r..(pi * s + si + 1) * r];
                    for a in 0..4 {
                        let w = v[a];
                        if w == 0.0 {
                            continue;
                        }
                        let src = &cur[(pi * 4 + a) * r..(pi * 4 + a + 1) * r];
                        for (dv, sv) in dst.iter_mut().zip(src) {
                            *dv += w * sv;
                        }
                    }
                }
            }
            cur = next;
            p *= s;
        }
        // cur: [s^(n-1)][4], other parties' settings in increasing party order
        let mut h = vec![[0.0; 4]; s];
        for rest in 0..p {
            let mut digits = vec![0usize; n - 1];
            let mut r = rest;
            for q in (0..n - 1).rev() {
                digits[q] = r % s;
                r /= s;
            }
            for (x, hx) in h.iter_mut().enumerate() {
                let mut full = digits.clone();
                full.insert(k, x);
                let idx = full.iter().fold(0, |acc, &v| acc * s + v);
                let coef = self.expr.d[idx];
                if coef != 0.0 {
                    for a in 0..4 {
                        hx[a] += coef * cur[rest * 4 + a];
                    }
                }
            }
        }
        h
    }

    pub fn value(&self, u: &[Vec<[f64; 4]>]) -> f64 {
        let h = self.effective(0, u);
        value_from(&h, &u[0])
    }
}

fn value_from(h: &[[f64; 4]], u: &[[f64; 4]]) -> f64 {
    let mut v: f64 = h[0][0];
    for (x, ux) in u.iter().enumerate() {
        v += (0..4).map(|a| ux[a] * h[x + 1][a]).sum::<f64>();
    }
    v
}

pub(crate) fn random_observables(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<[f64; 4]>> {
    (0..n)
        .map(|_| {
            (0..m)
                .map(|_| {
                    let h = [rng.gen_range(-0.5..0.5), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                    sign_observable(&h, DEGENERATE)
                })
                .collect()
        })
        .collect()
}

/// One fixed-state seesaw run from `u`: returns the final value, sweeps
/// used, whether the per-sweep gain fell below `tol`, and monotonicity.
pub(crate) fn fixed_state_run(ev: &Evaluator, u: &mut [Vec<[f64; 4]>], opts: &SeesawOptions) -> (f64, usize, bool, bool) {
    let n = ev.expr.n;
    let mut last = ev.value(u);
    let mut monotone = true;
    for sweep in 1..=opts.max_sweeps {
        let start = last;
        for k in 0..n {
            let h = ev.effective(k, u);
            for x in 0..ev.expr.m {
                u[k][x] = sign_observable(&h[x + 1], DEGENERATE);
            }
            let v = value_from(&h, &u[k]);
            if v < last - 1e-9 * (1.0 + last.abs()) {
                monotone = false;
            }
            last = v;
        }
        if last - start < opts.tol {
            return (last, sweep, true, monotone);
        }
    }
    (last, opts.max_sweeps, false, monotone)
}

/// Lower bound on the quantum maximum of `ineq`'s expression `-c`.
///
/// With `state = Some(rho)` the state stays fixed; otherwise the state is
/// set to the top eigenvector of the Bell operator after every sweep.
pub fn seesaw_max(ineq: &SymmetricInequality, state: Option<&State>, opts: &SeesawOptions) -> Result<SeesawResult> {
    if opts.restarts == 0 {
        return Err(Error::QuantumCheck("restarts must be at least 1".into()));
    }
    let n = ineq.scenario().parties();
    let m = ineq.scenario().settings();
    let mut best: Option<SeesawResult> = None;
    for r in 0..opts.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(r as u64));
        let mut u = random_observables(n, m, &mut rng);
        let res = match state {
            Some(st) => {
                let tensor = match st {
                    State::Pure(v) => pauli_tensor_pure(v, n),
                    State::Mixed(rho) => super::pauli::pauli_tensor_density(rho, n),
                };
                let ev = Evaluator::new(Expr::new(ineq), &tensor);
                let (value, sweeps, conv, mono) = fixed_state_run(&ev, &mut u, opts);
                SeesawResult {
                    value,
                    config: QuantumConfig { n, observables: u, state: st.clone() },
                    sweeps,
                    converged: conv,
                    monotone: mono,
                }
            }
            None => free_state_run(ineq, u, opts)?,
        };
        if best.as_ref().is_none_or(|b| res.value > b.value) {
            best = Some(res);
        }
    }
    let best = best.expect("at least one restart");
    if !best.converged {
        return Err(Error::NoConvergence { sweeps: best.sweeps, last: best.value });
    }
    Ok(best)
}

fn free_state_run(ineq: &SymmetricInequality, mut u: Vec<Vec<[f64; 4]>>, opts: &SeesawOptions) -> Result<SeesawResult> {
    let n = ineq.scenario().parties();
    let mut monotone = true;
    let mut psi: DVector<C> = DVector::zeros(1 << n);
    let mut last = f64::NEG_INFINITY;
    for sweep in 1..=opts.max_sweeps {
        let cfg = QuantumConfig { n, observables: u.clone(), state: State::Pure(psi.clone()) };
        let (lmax, vec) = top_eigen(&bell_operator(ineq, &cfg)?);
        if lmax < last - 1e-9 * (1.0 + last.abs()) {
            monotone = false;
        }
        psi = vec;
        let tensor = pauli_tensor_pure(&psi, n);
        let ev = Evaluator::new(Expr::new(ineq), &tensor);
        let mut v = lmax;
        for k in 0..n {
            let h = ev.effective(k, &u);
            for x in 0..ev.expr.m {
                u[k][x] = sign_observable(&h[x + 1], DEGENERATE);
            }
            let nv = value_from(&h, &u[k]);
            if nv < v - 1e-9 * (1.0 + v.abs()) {
                monotone = false;
            }
            v = nv;
        }
        if sweep >= 2 && (v - last).abs() < opts.tol {
            return Ok(SeesawResult {
                value: v,
                config: QuantumConfig { n, observables: u, state: State::Pure(psi) },
                sweeps: sweep,
                converged: true,
                monotone,
            });
        }
        last = v;
    }
    Ok(SeesawResult {
        value: last,
        config: QuantumConfig { n, observables: u, state: State::Pure(psi) },
        sweeps: opts.max_sweeps,
        converged: false,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::ghz;
    use crate::scenario::Scenario;

    #[test]
    fn evaluator_matches_operator() {
        let s = Scenario::new(3, 2).unwrap();
        let ineq = SymmetricInequality::from_levels(s, 4, &[1, -1, -2, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_observables(3, 2, &mut rng);
        let psi = ghz(3);
        let ev = Evaluator::new(Expr::new(&ineq), &pauli_tensor_pure(&psi, 3));
        let cfg = QuantumConfig { n: 3, observables: u.clone(), state: State::Pure(psi) };
        let direct = cfg.expectation(&ineq).unwrap();
        assert!((ev.value(&u) - direct).abs() < 1e-10);
        for k in 0..3 {
            let h = ev.effective(k, &u);
            assert!((value_from(&h, &u[k]) - direct).abs() < 1e-10);
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

        #[test]
        fn fixed_state_sweeps_never_decrease(
            levels in proptest::collection::vec(-4i64..=4, 4),
            seed in 0u64..1000,
        ) {
            let s = Scenario::new(3, 2).unwrap();
            proptest::prop_assume!(levels.iter().any(|&c| c != 0));
            let ineq = SymmetricInequality::from_levels(s, 20, &levels).unwrap();
            let ev = Evaluator::new(Expr::new(&ineq), &pauli_tensor_pure(&ghz(3), 3));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut u = random_observables(3, 2, &mut rng);
            let start = ev.value(&u);
            let opts = SeesawOptions { restarts: 1, max_sweeps: 50, tol: 1e-12, seed };
            let (end, _, _, monotone) = fixed_state_run(&ev, &mut u, &opts);
            proptest::prop_assert!(monotone);
            proptest::prop_assert!(end >= start - 1e-9 * (1.0 + start.abs()));
            proptest::prop_assert!((ev.value(&u) - end).abs() < 1e-8 * (1.0 + end.abs()));
        }
    }
}
