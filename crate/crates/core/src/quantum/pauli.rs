//! Qubit operators in the Pauli basis.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;

pub type C = Complex64;
pub type Op = DMatrix<C>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// `sigma_0 = I`, then X, Y, Z.
pub fn sigma(a: usize) -> Matrix2<C> {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match a {
        0 => Matrix2::new(o, z, z, o),
        1 => Matrix2::new(z, o, o, z),
        2 => Matrix2::new(z, -i, i, z),
        3 => Matrix2::new(o, z, z, -o),
        _ => panic!("pauli index {a} out of range"),
    }
}

/// `sum_a u_a sigma_a` for a real 4-vector `u`.
pub fn from_pauli(u: &[f64; 4]) -> Matrix2<C> {
    (0..4).fold(Matrix2::zeros(), |acc, a| acc + sigma(a) * c(u[a], 0.0))
}

/// Real Pauli coordinates of a Hermitian 2x2 matrix.
pub fn to_pauli(m: &Matrix2<C>) -> [f64; 4] {
    let mut u = [0.0; 4];
    for (a, v) in u.iter_mut().enumerate() {
        *v = (sigma(a) * m).trace().re / 2.0;
    }
    u
}

/// The ±1-valued spectral sign of `h0 I + h.sigma`, with zero
/// eigenvalues (within `eps`) resolved to +1.
pub fn sign_observable(h: &[f64; 4], eps: f64) -> [f64; 4] {
    let r = (h[1] * h[1] + h[2] * h[2] + h[3] * h[3]).sqrt();
    let sgn = |x: f64| if x < -eps { -1.0 } else { 1.0 };
    let sp = sgn(h[0] + r);
    let sm = sgn(h[0] - r);
    let a0 = (sp + sm) / 2.0;
    let b = (sp - sm) / 2.0;
    if b == 0.0 || r == 0.0 {
        return [a0, 0.0, 0.0, 0.0];
    }
    [a0, b * h[1] / r, b * h[2] / r, b * h[3] / r]
}

/// Kronecker product of 2x2 factors (party 0 most significant).
pub fn kron_all(fs: &[Matrix2<C>]) -> Op {
    let mut out = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for f in fs {
        let d = out.nrows();
        let mut next = DMatrix::zeros(2 * d, 2 * d);
        for i in 0..d {
            for j in 0..d {
                let v = out[(i, j)];
                if v == c(0.0, 0.0) {
                    continue;
                }
                for a in 0..2 {
                    for b in 0..2 {
                        next[(2 * i + a, 2 * j + b)] = v * f[(a, b)];
                    }
                }
            }
        }
        out = next;
    }
    out
}

/// Action of the Pauli string `a` on basis state `j`: returns the image
/// index and phase.
fn apply_string(a: &[usize], j: usize) -> (usize, C) {
    let n = a.len();
    let mut k = j;
    let mut ph = c(1.0, 0.0);
    for (q, &p) in a.iter().enumerate() {
        let bit = j >> (n - 1 - q) & 1;
        match p {
            0 => {}
            1 => k ^= 1 << (n - 1 - q),
            2 => {
                k ^= 1 << (n - 1 - q);
                ph *= if bit == 0 { c(0.0, 1.0) } else { c(0.0, -1.0) };
            }
            3 => {
                if bit == 1 {
                    ph = -ph;
                }
            }
            _ => unreachable!(),
        }
    }
    (k, ph)
}

fn digits4(mut idx: usize, n: usize) -> Vec<usize> {
    let mut a = vec![0; n];
    for q in (0..n).rev() {
        a[q] = idx % 4;
        idx /= 4;
    }
    a
}

/// Correlation tensor `T[a] = Tr(rho sigma_a1 x ... x sigma_an)`.
pub fn pauli_tensor_density(rho: &Op, n: usize) -> Vec<f64> {
    let d = 1usize << n;
    (0..1usize << (2 * n))
        .map(|idx| {
            let a = digits4(idx, n);
            let mut acc = c(0.0, 0.0);
            for j in 0..d {
                // P|j> = ph |k>, so <j|rho P|j> = rho[j,k] ph
                let (k, ph) = apply_string(&a, j);
                acc += rho[(j, k)] * ph;
            }
            acc.re
        })
        .collect()
}

/// Correlation tensor of a pure state.
pub fn pauli_tensor_pure(psi: &DVector<C>, n: usize) -> Vec<f64> {
    let d = 1usize << n;
    (0..1usize << (2 * n))
        .map(|idx| {
            let a = digits4(idx, n);
            let mut acc = c(0.0, 0.0);
            for j in 0..d {
                let (k, ph) = apply_string(&a, j);
                acc += psi[k].conj() * ph * psi[j];
            }
            acc.re
        })
        .collect()
}

/// Dense operator of a Pauli string.
pub fn string_operator(a: &[usize]) -> Op {
    let n = a.len();
    let d = 1usize << n;
    let mut m = DMatrix::zeros(d, d);
    for j in 0..d {
        let (k, ph) = apply_string(a, j);
        m[(k, j)] = ph;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_round_trip() {
        let u = [0.1, -0.3, 0.5, 0.7];
        let back = to_pauli(&from_pauli(&u));
        for a in 0..4 {
            assert!((u[a] - back[a]).abs() < 1e-14);
        }
    }

    #[test]
    fn sign_is_involution() {
        for h in [[0.2, 1.0, -2.0, 0.5], [3.0, 0.1, 0.1, 0.1], [-3.0, 0.0, 1.0, 0.0], [0.0; 4], [1.0, 1.0, 0.0, 0.0]] {
            let o = from_pauli(&sign_observable(&h, 1e-12));
            let sq = o * o;
            assert!((sq - Matrix2::identity()).norm() < 1e-12);
            assert!((o - o.adjoint()).norm() < 1e-14);
        }
        // degenerate zero eigenvalue resolves to +1
        assert_eq!(sign_observable(&[0.0; 4], 1e-12), [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn string_matches_kron() {
        let a = [2, 1, 3];
        let k = kron_all(&[sigma(2), sigma(1), sigma(3)]);
        assert!((string_operator(&a) - k).norm() < 1e-14);
    }

    #[test]
    fn tensor_of_ghz() {
        let n = 3;
        let mut psi = DVector::zeros(8);
        psi[0] = c(1.0 / 2f64.sqrt(), 0.0);
        psi[7] = c(1.0 / 2f64.sqrt(), 0.0);
        let t = pauli_tensor_pure(&psi, n);
        assert!((t[0] - 1.0).abs() < 1e-12);
        // XXX -> 1, XYY -> -1, ZZ1 -> 1
        let idx = |a: [usize; 3]| a[0] * 16 + a[1] * 4 + a[2];
        assert!((t[idx([1, 1, 1])] - 1.0).abs() < 1e-12);
        assert!((t[idx([1, 2, 2])] + 1.0).abs() < 1e-12);
        assert!((t[idx([3, 3, 0])] - 1.0).abs() < 1e-12);
        let rho = &psi * psi.adjoint();
        let t2 = pauli_tensor_density(&rho, n);
        for (x, y) in t.iter().zip(&t2) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
