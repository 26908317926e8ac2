//! The `F_n` family of two-setting full-body inequalities: classical bounds
//! over two-cell hybrid models via the gamma reduction, the `m = 2`
//! sign-flip argument, quantum values and maximally violating states.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::inequality::{level_multiset, q, SymmetricInequality};
use crate::quantum::pauli::{c, string_operator, Op, C};
use crate::quantum::{bell_operator, top_eigen, QuantumConfig, State};
use crate::scenario::{binomial, Scenario};

/// Largest party count for the exhaustive gamma search.
pub const GAMMA_CAP: usize = 24;
/// Largest party count for dense quantum computations.
pub const QUANTUM_CAP: usize = 8;

/// `F_n = sum_l c_l (1..1 2..2) <= n 2^(n-2)` with `l` twos and
/// `c_l = (-1)^(1 + ceil(l/2)) l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyInequality {
    pub n: usize,
    /// `coeffs[l - 1] = c_l`.
    pub coeffs: Vec<i64>,
    pub bound: i64,
}

/// `(-1)^(1 + ceil(l/2))`.
fn level_sign(l: usize) -> i64 {
    if (1 + l.div_ceil(2)) % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn family_inequality(n: usize) -> Result<FamilyInequality> {
    if n < 3 {
        return Err(Error::InvalidScenario(format!("F_n needs n >= 3, got {n}")));
    }
    if n > 62 {
        return Err(Error::CapExceeded(format!("F_n bound overflows for n = {n}")));
    }
    let coeffs = (1..=n).map(|l| level_sign(l) * l as i64).collect();
    Ok(FamilyInequality { n, coeffs, bound: n as i64 * (1i64 << (n - 2)) })
}

impl FamilyInequality {
    pub fn coefficient(&self, l: usize) -> i64 {
        if l == 0 {
            0
        } else {
            self.coeffs[l - 1]
        }
    }

    pub fn to_symmetric(&self) -> Result<SymmetricInequality> {
        let s = Scenario::new(self.n, 2)?;
        let expr = (1..=self.n).map(|l| (level_multiset(self.n, l), q(self.coefficient(l))));
        SymmetricInequality::from_bound_form(s, expr, q(self.bound))
    }
}

fn check_km(k: usize, m: usize) -> Result<()> {
    if k == 0 || m == 0 {
        return Err(Error::InvalidCardinality(format!("cells must be nonempty, got ({k},{m})")));
    }
    if k + m > GAMMA_CAP {
        return Err(Error::CapExceeded(format!("gamma search limited to {GAMMA_CAP} parties")));
    }
    Ok(())
}

/// Coefficient matrix `A_ij = (-1)^(1+ceil((i+j)/2)) (i+j) C(k,i) C(m,j)`.
fn gamma_matrix(k: usize, m: usize) -> Vec<Vec<i128>> {
    (0..=k)
        .map(|i| {
            (0..=m)
                .map(|j| {
                    let l = i + j;
                    (level_sign(l) * l as i64) as i128 * binomial(k as u64, i as u64) as i128 * binomial(m as u64, j as u64) as i128
                })
                .collect()
        })
        .collect()
}

/// Maximum of `sum_ij A_ij g_i h_j` over `g in {+-1}^(k+1)`, `h in {+-1}^(m+1)`.
///
/// For fixed `h` the best `g_i` is the sign of row `i` times `h`, so the
/// search runs over the smaller vector only; every assignment is covered.
pub fn gamma_bound(k: usize, m: usize) -> Result<i128> {
    check_km(k, m)?;
    let a = gamma_matrix(k, m);
    let (rows, cols) = if k >= m { (a, m + 1) } else { (transpose(&a), k + 1) };
    let mut best = i128::MIN;
    for mask in 0u64..1 << cols {
        let v: i128 = rows
            .iter()
            .map(|r| r.iter().enumerate().map(|(j, &x)| if mask >> j & 1 == 1 { -x } else { x }).sum::<i128>().abs())
            .sum();
        best = best.max(v);
    }
    Ok(best)
}

/// Plain enumeration over both sign vectors; reference for small sizes.
pub fn gamma_bound_exhaustive(k: usize, m: usize) -> Result<i128> {
    check_km(k, m)?;
    if k + m > 16 {
        return Err(Error::CapExceeded("plain gamma enumeration limited to 16 parties".into()));
    }
    let a = gamma_matrix(k, m);
    let mut best = i128::MIN;
    for g in 0u64..1 << (k + 1) {
        for h in 0u64..1 << (m + 1) {
            let mut v = 0i128;
            for (i, row) in a.iter().enumerate() {
                for (j, &x) in row.iter().enumerate() {
                    let s = (g >> i ^ h >> j) & 1;
                    v += if s == 1 { -x } else { x };
                }
            }
            best = best.max(v);
        }
    }
    Ok(best)
}

fn transpose(a: &[Vec<i128>]) -> Vec<Vec<i128>> {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// Value of the explicit assignment `g_i = (-1)^floor(i/2)`,
/// `h_j = (-1)^floor(j/2)`, written as `sum_ij M_ij` of the proof matrix.
pub fn achievability_check(k: usize, m: usize) -> Result<i128> {
    check_km(k, m)?;
    Ok(ProofMatrix::new(k, m).total())
}

/// `M_ij = (-1)^((i+1)(j+1)) (i+j) C(k,i) C(m,j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofMatrix {
    pub k: usize,
    pub m: usize,
    pub entries: Vec<Vec<i128>>,
}

impl ProofMatrix {
    pub fn new(k: usize, m: usize) -> Self {
        let entries = (0..=k)
            .map(|i| {
                (0..=m)
                    .map(|j| {
                        let s = if ((i + 1) * (j + 1)) % 2 == 0 { 1 } else { -1 };
                        s * (i + j) as i128 * binomial(k as u64, i as u64) as i128 * binomial(m as u64, j as u64) as i128
                    })
                    .collect()
            })
            .collect();
        ProofMatrix { k, m, entries }
    }

    pub fn total(&self) -> i128 {
        self.entries.iter().flatten().sum()
    }
}

/// Checks the `m = 2` argument: the row identity `M_i1 = |M_i0| + |M_i2|`,
/// vanishing sums of columns 0 and 2, and that no combination of row and
/// column sign flips beats the unflipped sum.
pub fn m2_proof_check(k: usize) -> Result<bool> {
    if k == 0 || k > 20 {
        return Err(Error::CapExceeded(format!("m2 proof check supports 1 <= k <= 20, got {k}")));
    }
    let pm = ProofMatrix::new(k, 2);
    let m = &pm.entries;
    if m.iter().any(|r| r[1] != r[0].abs() + r[2].abs()) {
        return Ok(false);
    }
    if m.iter().map(|r| r[0]).sum::<i128>() != 0 || m.iter().map(|r| r[2]).sum::<i128>() != 0 {
        return Ok(false);
    }
    let total = pm.total();
    let n = k + 2;
    if total != n as i128 * (1i128 << (n - 2)) {
        return Ok(false);
    }
    // the global flip (all rows and all columns) is the identity, so fixing
    // column 0 unflipped covers every pattern once
    for cols in 0u32..4 {
        let cs = [1i128, if cols & 1 == 1 { -1 } else { 1 }, if cols & 2 == 2 { -1 } else { 1 }];
        let row_vals: Vec<i128> = m.iter().map(|r| (0..3).map(|j| cs[j] * r[j]).sum()).collect();
        for rows in 0u64..1 << (k + 1) {
            let v: i128 = row_vals.iter().enumerate().map(|(i, &x)| if rows >> i & 1 == 1 { -x } else { x }).sum();
            if v > total {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Quantum value of `F_n` with setting 1 = `sigma_x` and setting 2 =
/// `sigma_z` on every party: top eigenvalue and eigenvector.
pub fn family_quantum(n: usize) -> Result<(f64, DVector<C>)> {
    if n > QUANTUM_CAP {
        return Err(Error::CapExceeded(format!("dense quantum computations limited to {QUANTUM_CAP} parties")));
    }
    let ineq = family_inequality(n)?.to_symmetric()?;
    let cfg = xz_config(n);
    Ok(top_eigen(&bell_operator(&ineq, &cfg)?))
}

pub fn xz_config(n: usize) -> QuantumConfig {
    let x = [0.0, 1.0, 0.0, 0.0];
    let z = [0.0, 0.0, 0.0, 1.0];
    QuantumConfig { n, observables: vec![vec![x, z]; n], state: State::Pure(DVector::zeros(1 << n)) }
}

/// `sqrt 2 n 2^(n-2)`.
pub fn family_quantum_value(n: usize) -> f64 {
    2f64.sqrt() * n as f64 * 2f64.powi(n as i32 - 2)
}

/// Pauli-string coefficients of the maximally violating state: index per
/// party in `0..4` (I, X, Y, Z), coefficient in units of `2^-n`.
pub fn optimal_state_terms(n: usize) -> Vec<(Vec<usize>, f64)> {
    let s = 1.0 / 2f64.sqrt();
    let mut terms = Vec::new();
    // identity and even Y strings, all placements
    for y in (0..=n).step_by(2) {
        for pos in placements(n, y) {
            terms.push((pos.iter().map(|&b| if b { 2 } else { 0 }).collect(), 1.0));
        }
    }
    // X^j Z^(n-j) strings, signed like the F_n coefficient of n - j twos
    for j in 0..=n {
        let sign = level_sign(n - j) as f64;
        for pos in placements(n, j) {
            terms.push((pos.iter().map(|&b| if b { 1 } else { 3 }).collect(), sign * s));
        }
    }
    terms
}

/// All boolean vectors of length `n` with exactly `k` trues.
fn placements(n: usize, k: usize) -> Vec<Vec<bool>> {
    (0u32..1 << n)
        .filter(|v| v.count_ones() as usize == k)
        .map(|v| (0..n).map(|i| v >> (n - 1 - i) & 1 == 1).collect())
        .collect()
}

/// The state assembled from [`optimal_state_terms`], after checking trace,
/// Hermiticity, positivity, purity and the Bell value.
#[derive(Debug, Clone)]
pub struct OptimalState {
    pub n: usize,
    pub rho: Op,
    pub trace: f64,
    pub purity: f64,
    pub bell_value: f64,
    /// `<psi|rho|psi>` for the top eigenvector of the Bell operator.
    pub overlap: f64,
}

pub fn optimal_state(n: usize) -> Result<OptimalState> {
    if !(3..=QUANTUM_CAP).contains(&n) {
        return Err(Error::CapExceeded(format!("optimal states built for 3 <= n <= {QUANTUM_CAP}")));
    }
    let d = 1usize << n;
    let mut rho = Op::zeros(d, d);
    let unit = 1.0 / d as f64;
    for (a, coef) in optimal_state_terms(n) {
        rho += string_operator(&a) * c(coef * unit, 0.0);
    }
    let trace = rho.trace().re;
    if (trace - 1.0).abs() > 1e-12 || rho.trace().im.abs() > 1e-12 {
        return Err(Error::QuantumCheck(format!("state trace {trace} != 1")));
    }
    if (&rho - rho.adjoint()).norm() > 1e-12 {
        return Err(Error::QuantumCheck("state is not Hermitian".into()));
    }
    let eig = rho.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l < -1e-10) {
        return Err(Error::QuantumCheck("state is not positive semidefinite".into()));
    }
    let purity = (&rho * &rho).trace().re;
    if (purity - 1.0).abs() > 1e-10 {
        return Err(Error::QuantumCheck(format!("state purity {purity} != 1")));
    }
    let ineq = family_inequality(n)?.to_symmetric()?;
    let b = bell_operator(&ineq, &xz_config(n))?;
    let bell_value = (&rho * &b).trace().re;
    if (bell_value - family_quantum_value(n)).abs() > 1e-8 {
        return Err(Error::QuantumCheck(format!("Bell value {bell_value} != {}", family_quantum_value(n))));
    }
    let (_, psi) = top_eigen(&b);
    let overlap = (psi.adjoint() * &rho * &psi)[(0, 0)].re;
    Ok(OptimalState { n, rho, trace, purity, bell_value, overlap })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_family_members() {
        let f3 = family_inequality(3).unwrap();
        assert_eq!(f3.coeffs, vec![1, 2, -3]);
        assert_eq!(f3.bound, 6);
        assert_eq!(f3.to_symmetric().unwrap().to_text(), "+6 - (112) -2 (122) +3 (222)");
        let f4 = family_inequality(4).unwrap();
        assert_eq!(f4.to_symmetric().unwrap().to_text(), "+16 - (1112) -2 (1122) +3 (1222) +4 (2222)");
        assert_eq!(family_inequality(5).unwrap().bound, 40);
        assert!(family_inequality(2).is_err());
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_bound(2, 2).unwrap(), 16);
        assert_eq!(gamma_bound(3, 2).unwrap(), 40);
        assert!(gamma_bound(3, 1).unwrap() > 16);
        assert_eq!(achievability_check(2, 2).unwrap(), 16);
        assert_eq!(achievability_check(3, 2).unwrap(), 40);
        // the closed form needs two cells of size >= 2; at (1,1) the sum is 4
        assert_eq!(achievability_check(1, 1).unwrap(), 4);
    }

    #[test]
    fn reduced_search_matches_plain() {
        for n in 2..=9 {
            for k in 1..n {
                assert_eq!(gamma_bound(k, n - k).unwrap(), gamma_bound_exhaustive(k, n - k).unwrap(), "({k},{})", n - k);
            }
        }
    }

    #[test]
    fn proof_matrix_k2() {
        let pm = ProofMatrix::new(2, 2);
        assert_eq!(pm.entries, vec![vec![0, 2, -2], vec![2, 8, 6], vec![-2, 6, -4]]);
        assert!(m2_proof_check(2).unwrap());
        assert!(m2_proof_check(3).unwrap());
    }

    #[test]
    fn optimal_state_n3_terms() {
        let st = optimal_state(3).unwrap();
        assert!((st.bell_value - 6.0 * 2f64.sqrt()).abs() < 1e-9);
        assert!((st.overlap - 1.0).abs() < 1e-8);
        assert_eq!(optimal_state_terms(3).len(), 12);
    }
}
