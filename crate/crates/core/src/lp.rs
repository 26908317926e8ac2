//! Linear programming: dense two-phase primal simplex with a Bland's-rule
//! fallback against cycling, run exactly over rationals or in `f64`.

use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};

type Q = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Q>,
    pub rel: Relation,
    pub rhs: Q,
}

/// Variable bounds; `None` means unbounded on that side.
#[derive(Debug, Clone, PartialEq)]
pub struct VarBound {
    pub lower: Option<Q>,
    pub upper: Option<Q>,
}

impl VarBound {
    pub fn nonnegative() -> Self {
        VarBound { lower: Some(Q::zero()), upper: None }
    }

    pub fn free() -> Self {
        VarBound { lower: None, upper: None }
    }

    pub fn range(lo: Q, hi: Q) -> Self {
        VarBound { lower: Some(lo), upper: Some(hi) }
    }
}

/// `max c.x` subject to rows and variable bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<Q>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<VarBound>,
}

/// Optimal solution with its dual certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub optimum: Q,
    pub x: Vec<Q>,
    /// One multiplier per original constraint row.
    pub duals: Vec<Q>,
    pub pivots: usize,
}

impl LinearProgram {
    /// Nonnegative variables, no rows.
    pub fn new(objective: Vec<Q>) -> Self {
        let n = objective.len();
        LinearProgram { objective, constraints: Vec::new(), bounds: vec![VarBound::nonnegative(); n] }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<Q>, rel: Relation, rhs: Q) {
        self.constraints.push(Constraint { coeffs, rel, rhs });
    }

    fn check(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.bounds.len() });
        }
        for c in &self.constraints {
            if c.coeffs.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: c.coeffs.len() });
            }
        }
        Ok(())
    }

    /// True when `x` satisfies every row and bound exactly.
    pub fn is_feasible(&self, x: &[Q]) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        for (v, b) in x.iter().zip(&self.bounds) {
            if b.lower.as_ref().is_some_and(|l| v < l) || b.upper.as_ref().is_some_and(|u| v > u) {
                return false;
            }
        }
        self.constraints.iter().all(|c| {
            let lhs: Q = c.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
            match c.rel {
                Relation::Le => lhs <= c.rhs,
                Relation::Eq => lhs == c.rhs,
                Relation::Ge => lhs >= c.rhs,
            }
        })
    }

    pub fn value(&self, x: &[Q]) -> Q {
        self.objective.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Plain-text export:
    ///
    /// ```text
    /// vars <n>
    /// max <c_1> ... <c_n>
    /// row <a_1> ... <a_n> <= | = | >= <b>
    /// bound <j> <lo|-inf> <hi|inf>
    /// end
    /// ```
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let join = |v: &[Q]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let _ = writeln!(s, "vars {}", self.num_vars());
        let _ = writeln!(s, "max {}", join(&self.objective));
        for c in &self.constraints {
            let rel = match c.rel {
                Relation::Le => "<=",
                Relation::Eq => "=",
                Relation::Ge => ">=",
            };
            let _ = writeln!(s, "row {} {rel} {}", join(&c.coeffs), c.rhs);
        }
        for (j, b) in self.bounds.iter().enumerate() {
            let lo = b.lower.as_ref().map_or("-inf".to_string(), |v| v.to_string());
            let hi = b.upper.as_ref().map_or("inf".to_string(), |v| v.to_string());
            let _ = writeln!(s, "bound {j} {lo} {hi}");
        }
        s.push_str("end\n");
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let parse = |t: &str| crate::inequality::parse_rational(t);
        let mut lp: Option<LinearProgram> = None;
        let mut n = 0;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0] {
                "vars" => n = toks.get(1).and_then(|t| t.parse().ok()).ok_or_else(|| Error::Parse(line.into()))?,
                "max" => {
                    let c: Result<Vec<Q>> = toks[1..].iter().map(|t| parse(t)).collect();
                    let c = c?;
                    if c.len() != n {
                        return Err(Error::DimensionMismatch { expected: n, got: c.len() });
                    }
                    lp = Some(LinearProgram::new(c));
                }
                "row" => {
                    let lp = lp.as_mut().ok_or_else(|| Error::Parse("row before max".into()))?;
                    if toks.len() != n + 3 {
                        return Err(Error::Parse(line.into()));
                    }
                    let a: Result<Vec<Q>> = toks[1..=n].iter().map(|t| parse(t)).collect();
                    let rel = match toks[n + 1] {
                        "<=" => Relation::Le,
                        "=" => Relation::Eq,
                        ">=" => Relation::Ge,
                        _ => return Err(Error::Parse(line.into())),
                    };
                    lp.add(a?, rel, parse(toks[n + 2])?);
                }
                "bound" => {
                    let lp = lp.as_mut().ok_or_else(|| Error::Parse("bound before max".into()))?;
                    let j: usize = toks.get(1).and_then(|t| t.parse().ok()).ok_or_else(|| Error::Parse(line.into()))?;
                    if j >= n || toks.len() != 4 {
                        return Err(Error::Parse(line.into()));
                    }
                    let lo = if toks[2] == "-inf" { None } else { Some(parse(toks[2])?) };
                    let hi = if toks[3] == "inf" { None } else { Some(parse(toks[3])?) };
                    lp.bounds[j] = VarBound { lower: lo, upper: hi };
                }
                "end" => break,
                _ => return Err(Error::Parse(line.into())),
            }
        }
        lp.ok_or_else(|| Error::Parse("missing objective".into()))
    }
}

/// Scalar arithmetic used by the tableau. Rationals compare exactly;
/// floats treat anything within `EPS` of zero as zero.
mod field {
    use std::cmp::Ordering;

    use num_traits::{One, Signed, ToPrimitive, Zero};

    use super::Q;

    pub trait Field: Clone {
        fn zero() -> Self;
        fn one() -> Self;
        fn from_q(q: &Q) -> Self;
        fn is_zero(&self) -> bool;
        fn is_positive(&self) -> bool;
        fn is_negative(&self) -> bool;
        fn neg(&self) -> Self;
        fn recip(&self) -> Self;
        fn mul(&self, o: &Self) -> Self;
        fn div(&self, o: &Self) -> Self;
        fn add_assign(&mut self, o: &Self);
        /// `self -= f * p`
        fn sub_mul(&mut self, f: &Self, p: &Self);
        fn compare(&self, o: &Self) -> Ordering;
        /// Large enough to pivot on.
        fn is_pivot(&self) -> bool {
            self.is_positive()
        }
        /// Phase-one residual that proves infeasibility.
        fn is_infeasibility(&self) -> bool {
            self.is_positive()
        }
    }

    impl Field for Q {
        fn zero() -> Self {
            Zero::zero()
        }
        fn one() -> Self {
            One::one()
        }
        fn from_q(q: &Q) -> Self {
            q.clone()
        }
        fn is_zero(&self) -> bool {
            Zero::is_zero(self)
        }
        fn is_positive(&self) -> bool {
            Signed::is_positive(self)
        }
        fn is_negative(&self) -> bool {
            Signed::is_negative(self)
        }
        fn neg(&self) -> Self {
            -self
        }
        fn recip(&self) -> Self {
            Q::recip(self)
        }
        fn mul(&self, o: &Self) -> Self {
            self * o
        }
        fn div(&self, o: &Self) -> Self {
            self / o
        }
        fn add_assign(&mut self, o: &Self) {
            *self += o;
        }
        fn sub_mul(&mut self, f: &Self, p: &Self) {
            *self -= f * p;
        }
        fn compare(&self, o: &Self) -> Ordering {
            self.cmp(o)
        }
    }

    const EPS: f64 = 1e-9;

    impl Field for f64 {
        fn zero() -> Self {
            0.0
        }
        fn one() -> Self {
            1.0
        }
        fn from_q(q: &Q) -> Self {
            q.to_f64().unwrap_or(f64::NAN)
        }
        fn is_zero(&self) -> bool {
            self.abs() <= EPS
        }
        fn is_positive(&self) -> bool {
            *self > EPS
        }
        fn is_negative(&self) -> bool {
            *self < -EPS
        }
        fn neg(&self) -> Self {
            -self
        }
        fn recip(&self) -> Self {
            1.0 / self
        }
        fn mul(&self, o: &Self) -> Self {
            self * o
        }
        fn div(&self, o: &Self) -> Self {
            self / o
        }
        fn add_assign(&mut self, o: &Self) {
            *self += o;
        }
        fn sub_mul(&mut self, f: &Self, p: &Self) {
            *self -= f * p;
            if self.abs() < 1e-13 {
                *self = 0.0;
            }
        }
        fn compare(&self, o: &Self) -> Ordering {
            if (self - o).abs() <= EPS {
                Ordering::Equal
            } else {
                self.total_cmp(o)
            }
        }
        fn is_pivot(&self) -> bool {
            *self > 1e-7
        }
        fn is_infeasibility(&self) -> bool {
            *self > 1e-6
        }
    }
}


/// How an original variable maps to standard-form columns.
#[derive(Debug, Clone)]
enum VarMap<F> {
    Shift { col: usize, lo: F },
    Mirror { col: usize, hi: F },
    Split { pos: usize, neg: usize },
}

/// Floating-point optimum, used to locate the active rows quickly before
/// an exact re-solve.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatSolution {
    pub optimum: f64,
    pub x: Vec<f64>,
    pub duals: Vec<f64>,
    pub pivots: usize,
}

/// Maximizes `lp` exactly; infeasible and unbounded problems are errors.
pub fn simplex_max(lp: &LinearProgram) -> Result<Solution> {
    let (x, duals, pivots) = solve::<Q>(lp)?;
    let optimum = lp.value(&x);
    debug_assert!(lp.is_feasible(&x));
    Ok(Solution { optimum, x, duals, pivots })
}

/// Same algorithm in `f64` with a `1e-9` zero tolerance. Much faster, but
/// the answer is only approximate.
pub fn simplex_max_f64(lp: &LinearProgram) -> Result<FloatSolution> {
    let (x, duals, pivots) = solve::<f64>(lp)?;
    let optimum = lp.objective.iter().zip(&x).map(|(c, v)| <f64 as field::Field>::from_q(c) * v).sum();
    Ok(FloatSolution { optimum, x, duals, pivots })
}

#[allow(clippy::type_complexity)]
fn solve<F: field::Field>(lp: &LinearProgram) -> Result<(Vec<F>, Vec<F>, usize)> {
    lp.check()?;
    let n = lp.num_vars();
    // standard form columns
    let mut maps: Vec<VarMap<F>> = Vec::with_capacity(n);
    let mut ncol = 0;
    let mut extra_rows: Vec<(usize, F)> = Vec::new();
    for b in &lp.bounds {
        match (&b.lower, &b.upper) {
            (Some(lo), hi) => {
                if let Some(hi) = hi {
                    if hi < lo {
                        return Err(Error::Infeasible);
                    }
                    extra_rows.push((ncol, F::from_q(&(hi - lo))));
                }
                maps.push(VarMap::Shift { col: ncol, lo: F::from_q(lo) });
                ncol += 1;
            }
            (None, Some(hi)) => {
                maps.push(VarMap::Mirror { col: ncol, hi: F::from_q(hi) });
                ncol += 1;
            }
            (None, None) => {
                maps.push(VarMap::Split { pos: ncol, neg: ncol + 1 });
                ncol += 2;
            }
        }
    }
    let nstruct = ncol;
    // rows in terms of structural columns: (coeffs, rel, rhs, original row index)
    let mut rows: Vec<(Vec<F>, Relation, F, Option<usize>)> = Vec::new();
    for (ri, c) in lp.constraints.iter().enumerate() {
        let mut a = vec![F::zero(); nstruct];
        let mut rhs = F::from_q(&c.rhs);
        for (j, coef) in c.coeffs.iter().enumerate() {
            if Zero::is_zero(coef) {
                continue;
            }
            let coef = F::from_q(coef);
            match &maps[j] {
                VarMap::Shift { col, lo } => {
                    a[*col].add_assign(&coef);
                    rhs.sub_mul(&coef, lo);
                }
                VarMap::Mirror { col, hi } => {
                    a[*col].add_assign(&coef.neg());
                    rhs.sub_mul(&coef, hi);
                }
                VarMap::Split { pos, neg } => {
                    a[*pos].add_assign(&coef);
                    a[*neg].add_assign(&coef.neg());
                }
            }
        }
        rows.push((a, c.rel, rhs, Some(ri)));
    }
    for (col, ub) in extra_rows {
        let mut a = vec![F::zero(); nstruct];
        a[col] = F::one();
        rows.push((a, Relation::Le, ub, None));
    }
    let mut cost = vec![F::zero(); nstruct];
    for (j, coef) in lp.objective.iter().enumerate() {
        let coef = F::from_q(coef);
        match &maps[j] {
            VarMap::Shift { col, .. } => cost[*col].add_assign(&coef),
            VarMap::Mirror { col, .. } => cost[*col].add_assign(&coef.neg()),
            VarMap::Split { pos, neg } => {
                cost[*pos].add_assign(&coef);
                cost[*neg].add_assign(&coef.neg());
            }
        }
    }

    // normalize rhs >= 0, then add slack / surplus / artificial columns
    let m = rows.len();
    let mut flipped = vec![false; m];
    for (i, r) in rows.iter_mut().enumerate() {
        if r.2.is_negative() {
            flipped[i] = true;
            r.0.iter_mut().for_each(|v| *v = v.neg());
            r.2 = r.2.neg();
            r.1 = match r.1 {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }
    let nslack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let nart = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let total = nstruct + nslack + nart;
    let mut t: Vec<Vec<F>> = Vec::with_capacity(m);
    let mut basis = vec![0usize; m];
    // identity column of each row (slack for <=, artificial otherwise)
    let mut unit_col = vec![0usize; m];
    let mut is_art = vec![false; total];
    let (mut sc, mut ac) = (nstruct, nstruct + nslack);
    for (i, r) in rows.iter().enumerate() {
        let mut row = r.0.clone();
        row.resize(total + 1, F::zero());
        match r.1 {
            Relation::Le => {
                row[sc] = F::one();
                basis[i] = sc;
                unit_col[i] = sc;
                sc += 1;
            }
            Relation::Ge => {
                row[sc] = F::one().neg();
                sc += 1;
                row[ac] = F::one();
                basis[i] = ac;
                unit_col[i] = ac;
                is_art[ac] = true;
                ac += 1;
            }
            Relation::Eq => {
                row[ac] = F::one();
                basis[i] = ac;
                unit_col[i] = ac;
                is_art[ac] = true;
                ac += 1;
            }
        }
        row[total] = r.2.clone();
        t.push(row);
    }
    let mut pivots = 0;
    let mut active = vec![true; m];

    if nart > 0 {
        // phase 1: maximize -sum(artificials)
        let c1: Vec<F> = (0..total).map(|j| if is_art[j] { F::one().neg() } else { F::zero() }).collect();
        run(&mut t, &mut basis, &c1, &|_| true, &active, &mut pivots)?;
        let mut infeas = F::zero();
        for i in (0..m).filter(|&i| is_art[basis[i]]) {
            infeas.add_assign(&t[i][total]);
        }
        if infeas.is_infeasibility() {
            return Err(Error::Infeasible);
        }
        // drive zero-level artificials out of the basis
        for i in 0..m {
            if !is_art[basis[i]] {
                continue;
            }
            match (0..total).find(|&j| !is_art[j] && !t[i][j].is_zero()) {
                Some(j) => {
                    pivot(&mut t, &mut basis, i, j);
                    pivots += 1;
                }
                None => active[i] = false,
            }
        }
    }
    let mut c2 = cost.clone();
    c2.resize(total, F::zero());
    run(&mut t, &mut basis, &c2, &|j| !is_art[j], &active, &mut pivots)?;

    let mut xs = vec![F::zero(); total];
    for i in 0..m {
        if active[i] {
            xs[basis[i]] = t[i][total].clone();
        }
    }
    let x: Vec<F> = maps
        .iter()
        .map(|mp| match mp {
            VarMap::Shift { col, lo } => {
                let mut v = lo.clone();
                v.add_assign(&xs[*col]);
                v
            }
            VarMap::Mirror { col, hi } => {
                let mut v = hi.clone();
                v.add_assign(&xs[*col].neg());
                v
            }
            VarMap::Split { pos, neg } => {
                let mut v = xs[*pos].clone();
                v.add_assign(&xs[*neg].neg());
                v
            }
        })
        .collect();
    // duals y_i = c_B B^{-1} e_i, read through each row's identity column
    let mut duals = vec![F::zero(); lp.constraints.len()];
    for (i, r) in rows.iter().enumerate() {
        let Some(orig) = r.3 else { continue };
        let col = unit_col[i];
        let mut y = F::zero();
        for k in (0..m).filter(|&k| active[k]) {
            y.add_assign(&c2[basis[k]].mul(&t[k][col]));
        }
        duals[orig] = if flipped[i] { y.neg() } else { y };
    }
    Ok((x, duals, pivots))
}

fn pivot<F: field::Field>(t: &mut [Vec<F>], basis: &mut [usize], r: usize, c: usize) {
    let inv = t[r][c].recip();
    for v in t[r].iter_mut() {
        if !v.is_zero() {
            *v = v.mul(&inv);
        } else {
            *v = F::zero();
        }
    }
    t[r][c] = F::one();
    let prow = t[r].clone();
    let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for &j in &nz {
            row[j].sub_mul(&f, &prow[j]);
        }
        row[c] = F::zero();
    }
    basis[r] = c;
}

/// Primal simplex on the tableau for `max c.x`: largest reduced cost
/// first, switching to Bland's rule for good after a run of degenerate
/// pivots so that cycling is impossible.
fn run<F: field::Field>(
    t: &mut Vec<Vec<F>>,
    basis: &mut [usize],
    c: &[F],
    allowed: &dyn Fn(usize) -> bool,
    active: &[bool],
    pivots: &mut usize,
) -> Result<()> {
    const DEGENERATE_STREAK: usize = 50;
    let m = t.len();
    let total = c.len();
    // reduced-cost row d_j = c_j - c_B B^-1 A_j, kept up to date by pivoting
    let mut z: Vec<F> = c.to_vec();
    z.push(F::zero());
    for i in 0..m {
        let cb = &c[basis[i]];
        if !active[i] || cb.is_zero() {
            continue;
        }
        for (zj, tij) in z.iter_mut().zip(&t[i]) {
            if !tij.is_zero() {
                zj.sub_mul(cb, tij);
            }
        }
    }
    t.push(z);
    let mut bland = false;
    let mut streak = 0;
    let result = loop {
        let mut is_basic = vec![false; total];
        for i in 0..m {
            if active[i] {
                is_basic[basis[i]] = true;
            }
        }
        let z = &t[m];
        let candidates = (0..total).filter(|&j| allowed(j) && !is_basic[j] && z[j].is_positive());
        let enter =
            if bland { candidates.min() } else { candidates.max_by(|&a, &b| z[a].compare(&z[b]).then(b.cmp(&a))) };
        let Some(j) = enter else { break Ok(()) };
        let mut leave: Option<(usize, F)> = None;
        for i in 0..m {
            if !active[i] || !t[i][j].is_pivot() {
                continue;
            }
            let ratio = t[i][total].div(&t[i][j]);
            // ties: smallest basis index under Bland, else the largest pivot
            let better = match &leave {
                None => true,
                Some((li, lr)) => match ratio.compare(lr) {
                    std::cmp::Ordering::Less => true,
                    std::cmp::Ordering::Equal if bland => basis[i] < basis[*li],
                    std::cmp::Ordering::Equal => t[i][j].compare(&t[*li][j]).is_gt(),
                    std::cmp::Ordering::Greater => false,
                },
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let Some((i, ratio)) = leave else { break Err(Error::Unbounded) };
        if ratio.is_zero() {
            streak += 1;
            if streak >= DEGENERATE_STREAK {
                bland = true;
            }
        } else {
            streak = 0;
        }
        pivot(t, basis, i, j);
        *pivots += 1;
    };
    t.pop();
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Q {
        Q::from_integer(v.into())
    }

    #[test]
    fn one_variable() {
        let mut lp = LinearProgram::new(vec![q(1)]);
        lp.bounds[0] = VarBound::free();
        lp.add(vec![q(1)], Relation::Le, q(3));
        assert_eq!(simplex_max(&lp).unwrap().optimum, q(3));
    }

    #[test]
    fn simplex_triangle() {
        let mut lp = LinearProgram::new(vec![q(1), q(1)]);
        lp.add(vec![q(1), q(1)], Relation::Le, q(1));
        let s = simplex_max(&lp).unwrap();
        assert_eq!(s.optimum, q(1));
        assert_eq!(s.duals, vec![q(1)]);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(vec![q(1)]);
        lp.add(vec![q(1)], Relation::Ge, q(2));
        lp.add(vec![q(1)], Relation::Le, q(1));
        assert_eq!(simplex_max(&lp), Err(Error::Infeasible));
        let mut lp = LinearProgram::new(vec![q(1), q(0)]);
        lp.add(vec![q(1), q(-1)], Relation::Le, q(1));
        lp.bounds[1] = VarBound::free();
        assert_eq!(simplex_max(&lp), Err(Error::Unbounded));
    }

    #[test]
    fn equalities_and_bounds() {
        // max x - y, x + y = 2, -1 <= y <= 5, x <= 1.5
        let mut lp = LinearProgram::new(vec![q(1), q(-1)]);
        lp.bounds = vec![VarBound { lower: None, upper: Some(Q::new(3.into(), 2.into())) }, VarBound::range(q(-1), q(5))];
        lp.add(vec![q(1), q(1)], Relation::Eq, q(2));
        let s = simplex_max(&lp).unwrap();
        assert_eq!(s.optimum, q(1));
        assert!(lp.is_feasible(&s.x));
    }

    #[test]
    fn text_round_trip() {
        let mut lp = LinearProgram::new(vec![q(1), q(2)]);
        lp.add(vec![q(1), q(1)], Relation::Le, q(4));
        lp.bounds[1] = VarBound::free();
        lp.add(vec![q(0), q(1)], Relation::Le, q(1));
        let back = LinearProgram::from_text(&lp.to_text()).unwrap();
        assert_eq!(back, lp);
        assert_eq!(simplex_max(&back).unwrap().optimum, q(5));
    }

    #[test]
    fn degenerate_cycle_example() {
        // Beale's classic cycling LP; Bland's rule must terminate
        let f = |a: i64, b: i64| Q::new(a.into(), b.into());
        let mut lp = LinearProgram::new(vec![f(3, 4), f(-150, 1), f(1, 50), f(-6, 1)]);
        lp.add(vec![f(1, 4), f(-60, 1), f(-1, 25), f(9, 1)], Relation::Le, q(0));
        lp.add(vec![f(1, 2), f(-90, 1), f(-1, 50), f(3, 1)], Relation::Le, q(0));
        lp.add(vec![q(0), q(0), q(1), q(0)], Relation::Le, q(1));
        let s = simplex_max(&lp).unwrap();
        assert_eq!(s.optimum, f(1, 20));
    }
}
