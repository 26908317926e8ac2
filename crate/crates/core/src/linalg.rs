//! Exact integer linear algebra for rank certificates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

const P: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn to_mod(v: i64) -> u64 {
    let r = v.rem_euclid(P as i64);
    r as u64
}

/// Incremental rank over GF(2^61 - 1). An independent set mod p is
/// independent over the rationals, so "full rank" answers are exact.
#[derive(Debug, Clone)]
pub struct ModpRank {
    dim: usize,
    // reduced rows with their pivot columns; pivot entry normalized to 1
    rows: Vec<(usize, Vec<u64>)>,
}

impl ModpRank {
    pub fn new(dim: usize) -> Self {
        ModpRank { dim, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds a row; returns true when it increases the rank.
    pub fn insert(&mut self, row: &[i64]) -> bool {
        debug_assert_eq!(row.len(), self.dim);
        let mut v: Vec<u64> = row.iter().map(|&x| to_mod(x)).collect();
        for (piv, r) in &self.rows {
            let f = v[*piv];
            if f != 0 {
                for j in 0..self.dim {
                    if r[j] != 0 {
                        v[j] = (v[j] + P - mulmod(f, r[j])) % P;
                    }
                }
            }
        }
        match v.iter().position(|&x| x != 0) {
            None => false,
            Some(piv) => {
                let inv = powmod(v[piv], P - 2);
                for x in v.iter_mut() {
                    *x = mulmod(*x, inv);
                }
                self.rows.push((piv, v));
                true
            }
        }
    }
}

/// Exact rank of an integer matrix (fraction-free elimination).
pub fn rank(rows: &[Vec<i64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut a: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    rank_big(&mut a)
}

pub fn rank_big(a: &mut [Vec<BigInt>]) -> usize {
    let nrows = a.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = a[0].len();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in r + 1..nrows {
            if a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            let g = a[r][c].clone();
            let mut gcd = BigInt::zero();
            for j in c..ncols {
                let v = &a[i][j] * &g - &a[r][j] * &f;
                gcd = gcd.gcd(&v);
                a[i][j] = v;
            }
            if !gcd.is_zero() && !gcd.is_one() {
                for j in c..ncols {
                    a[i][j] = &a[i][j] / &gcd;
                }
            }
        }
        r += 1;
    }
    r
}

/// Integer basis of the right nullspace `{x : A x = 0}`.
pub fn nullspace(rows: &[Vec<i64>], ncols: usize) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == a.len() {
            break;
        }
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for j in 0..ncols {
            a[r][j] = &a[r][j] * &inv;
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..ncols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::new();
    for &fcol in &free {
        let mut x = vec![BigRational::zero(); ncols];
        x[fcol] = BigRational::one();
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = -a[i][fcol].clone();
        }
        basis.push(primitive(&x));
    }
    basis
}

/// Solves the square system `A x = b` exactly; `None` if `A` is singular.
pub fn solve_square(a: &[Vec<i64>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut row: Vec<BigRational> = r.iter().map(|&x| BigRational::from_integer(x.into())).collect();
            row.push(bi.clone());
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let inv = m[c][c].recip();
        for v in m[c].iter_mut() {
            *v = &*v * &inv;
        }
        let prow = m[c].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == c || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&prow).skip(c) {
                *x -= &f * y;
            }
        }
    }
    Some(m.into_iter().map(|mut r| r.pop().expect("augmented column")).collect())
}

/// Scales a rational vector to coprime integers.
pub fn primitive(x: &[BigRational]) -> Vec<BigInt> {
    let mut l = BigInt::one();
    for v in x {
        l = l.lcm(v.denom());
    }
    let ints: Vec<BigInt> = x.iter().map(|v| v.numer() * (&l / v.denom())).collect();
    let mut g = BigInt::zero();
    for v in &ints {
        g = g.gcd(v);
    }
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|v| v / &g).collect()
}

/// Divides an i128 vector by the gcd of its entries.
pub fn reduce_i128(v: &mut [i128]) {
    let mut g: i128 = 0;
    for &x in v.iter() {
        g = g.gcd(&x.abs());
    }
    if g > 1 {
        for x in v.iter_mut() {
            *x /= g;
        }
    }
}

pub fn dot_big(a: &[BigInt], b: &[i64]) -> BigInt {
    a.iter().zip(b).map(|(x, &y)| x * y).sum()
}

/// Exact rank of a (possibly large) row set, with early exit once
/// `target` is reached. Returns the rank and indices of a basis.
pub fn certified_rank(rows: impl Iterator<Item = Vec<i64>> + Clone, dim: usize, target: usize) -> (usize, Vec<usize>) {
    let mut mp = ModpRank::new(dim);
    let mut basis_idx = Vec::new();
    let mut basis_rows = Vec::new();
    for (i, r) in rows.clone().enumerate() {
        if mp.insert(&r) {
            basis_idx.push(i);
            basis_rows.push(r);
            if mp.rank() >= target {
                return (mp.rank(), basis_idx);
            }
        }
    }
    // mod-p rank can undercount; confirm against the exact nullspace
    loop {
        let ns = nullspace(&basis_rows, dim);
        let mut extra = None;
        for (i, r) in rows.clone().enumerate() {
            if ns.iter().any(|z| !dot_big(z, &r).is_zero()) {
                extra = Some((i, r));
                break;
            }
        }
        match extra {
            None => return (basis_rows.len(), basis_idx),
            Some((i, r)) => {
                basis_idx.push(i);
                basis_rows.push(r);
                if basis_rows.len() >= target {
                    return (basis_rows.len(), basis_idx);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_solve() {
        let q = |v: i64| BigRational::from_integer(v.into());
        let x = solve_square(&[vec![2, 1], vec![1, 3]], &[q(3), q(5)]).unwrap();
        assert_eq!(x, vec![BigRational::new(4.into(), 5.into()), BigRational::new(7.into(), 5.into())]);
        assert!(solve_square(&[vec![1, 2], vec![2, 4]], &[q(1), q(2)]).is_none());
    }

    #[test]
    fn ranks() {
        assert_eq!(rank(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rank(&[vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 0]]), 2);
        assert_eq!(rank(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]), 3);
    }

    #[test]
    fn modp_agrees() {
        let rows = vec![vec![1, -1, 1, -1], vec![1, 1, 1, 1], vec![2, 0, 2, 0], vec![0, 1, 0, -1]];
        let mut mp = ModpRank::new(4);
        for r in &rows {
            mp.insert(r);
        }
        assert_eq!(mp.rank(), rank(&rows));
    }

    #[test]
    fn nullspace_is_orthogonal() {
        let rows = vec![vec![1, 2, 3, 4], vec![2, 4, 6, 9]];
        let ns = nullspace(&rows, 4);
        assert_eq!(ns.len(), 2);
        for z in &ns {
            for r in &rows {
                assert!(dot_big(z, r).is_zero());
            }
        }
    }

    #[test]
    fn certified_rank_full_scan() {
        let rows = vec![vec![1, 1, 0], vec![2, 2, 0], vec![0, 0, 1], vec![1, 1, 1]];
        let (r, idx) = certified_rank(rows.clone().into_iter(), 3, 3);
        assert_eq!(r, 2);
        assert_eq!(idx.len(), 2);
    }
}
