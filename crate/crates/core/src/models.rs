//! Hybrid models: partitions of the parties into cells, deterministic cell
//! strategies that may signal inside a cell, and their extremal behaviors.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::behavior::{Behavior, Space};
use crate::error::{Error, Result};
use crate::inequality::{MarginalConvention, SymmetricInequality};
use crate::scenario::Scenario;

/// Default cap on strategy products enumerated per partition.
pub const DEFAULT_STRATEGY_CAP: u64 = 1 << 26;
/// Cap on materialized (deduplicated) vertices of a general model.
pub const MATERIALIZE_CAP: usize = 1 << 22;

/// Sorted cell sizes of a partition, e.g. `(2,2,1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CardinalityTuple(Vec<usize>);

impl CardinalityTuple {
    pub fn new(mut h: Vec<usize>) -> Result<Self> {
        if h.is_empty() || h.contains(&0) {
            return Err(Error::InvalidCardinality(format!("{h:?}")));
        }
        h.sort_unstable_by(|a, b| b.cmp(a));
        Ok(CardinalityTuple(h))
    }

    pub fn sizes(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// All cardinality tuples of `n` in reverse lexicographic order, from
    /// `(n)` down to `(1,...,1)`.
    pub fn all(n: usize) -> Vec<CardinalityTuple> {
        fn rec(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<CardinalityTuple>) {
            if rem == 0 {
                out.push(CardinalityTuple(cur.clone()));
                return;
            }
            for k in (1..=rem.min(max)).rev() {
                cur.push(k);
                rec(rem - k, k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, &mut Vec::new(), &mut out);
        out
    }

    /// True when every cell of `self` fits inside a cell of `other`,
    /// i.e. `M_self` is contained in `M_other`.
    pub fn refines(&self, other: &CardinalityTuple) -> bool {
        // bin packing by exhaustive search; tuples are tiny
        fn place(items: &[usize], bins: &mut [usize]) -> bool {
            match items.split_first() {
                None => true,
                Some((&x, rest)) => {
                    for i in 0..bins.len() {
                        if bins[i] >= x {
                            bins[i] -= x;
                            if place(rest, bins) {
                                bins[i] += x;
                                return true;
                            }
                            bins[i] += x;
                        }
                    }
                    false
                }
            }
        }
        self.total() == other.total() && place(&self.0, &mut other.0.clone())
    }
}

impl FromStr for CardinalityTuple {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let h: std::result::Result<Vec<usize>, _> = t.split(',').map(|x| x.trim().parse()).collect();
        let h = h.map_err(|_| Error::InvalidCardinality(s.to_string()))?;
        let sorted = CardinalityTuple::new(h.clone())?;
        if sorted.0 != h {
            return Err(Error::InvalidCardinality(format!("{s} is not nonincreasing")));
        }
        Ok(sorted)
    }
}

impl fmt::Display for CardinalityTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", p.join(","))
    }
}

/// A set partition of the parties `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    pub cells: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(n: usize, cells: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for c in &cells {
            if c.is_empty() {
                return Err(Error::InvalidCardinality("empty cell".into()));
            }
            for &p in c {
                if p >= n || seen[p] {
                    return Err(Error::InvalidCardinality(format!("bad party {p}")));
                }
                seen[p] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidCardinality("cells do not cover all parties".into()));
        }
        Ok(Partition { cells })
    }

    pub fn cardinality(&self) -> CardinalityTuple {
        CardinalityTuple::new(self.cells.iter().map(|c| c.len()).collect()).expect("nonempty cells")
    }
}

/// All set partitions of `0..n` whose sorted cell sizes equal `h`.
pub fn partitions_of_type(n: usize, h: &CardinalityTuple) -> Result<Vec<Partition>> {
    if h.total() != n {
        return Err(Error::InvalidCardinality(format!("{h} does not sum to {n}")));
    }
    let mut out = Vec::new();
    let mut assign = vec![0usize; n];
    fn rec(k: usize, nblocks: usize, assign: &mut [usize], h: &CardinalityTuple, out: &mut Vec<Partition>) {
        let n = assign.len();
        if nblocks > h.0.len() {
            return;
        }
        if k == n {
            let mut cells = vec![Vec::new(); nblocks];
            for (p, &b) in assign.iter().enumerate() {
                cells[b].push(p);
            }
            let mut sizes: Vec<usize> = cells.iter().map(|c| c.len()).collect();
            sizes.sort_unstable_by(|a, b| b.cmp(a));
            if sizes == h.0 {
                out.push(Partition { cells });
            }
            return;
        }
        for b in 0..=nblocks {
            assign[k] = b;
            rec(k + 1, nblocks.max(b + 1), assign, h, out);
        }
    }
    rec(0, 0, &mut assign, h, &mut out);
    Ok(out)
}

/// Deduplicated extremal behaviors of a model.
#[derive(Debug, Clone, PartialEq)]
pub enum Extremals {
    /// Two-setting-style full-body ±1 vectors packed into bits (set = -1).
    Signs(Vec<u64>),
    /// Integer rows; the behavior is `row / scale`.
    Scaled { scale: i64, rows: Vec<Vec<i64>> },
}

impl Extremals {
    pub fn len(&self) -> usize {
        match self {
            Extremals::Signs(v) => v.len(),
            Extremals::Scaled { rows, .. } => rows.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The hybrid model `M_h`: convex hull of all cell-deterministic
/// strategies over partitions of type `h`.
#[derive(Debug, Clone)]
pub struct HybridModel {
    scenario: Scenario,
    h: CardinalityTuple,
    space: Space,
    convention: MarginalConvention,
    extremals: Extremals,
}

impl HybridModel {
    /// Full-body model with the default cap.
    pub fn full_body(scenario: Scenario, h: CardinalityTuple) -> Result<Self> {
        Self::enumerate(scenario, h, Space::FullCorrelation, MarginalConvention::default(), DEFAULT_STRATEGY_CAP)
    }

    pub fn enumerate(
        scenario: Scenario,
        h: CardinalityTuple,
        space: Space,
        convention: MarginalConvention,
        cap: u64,
    ) -> Result<Self> {
        let extremals = match space {
            Space::FullCorrelation if scenario.full_body_dim() <= 64 => {
                Extremals::Signs(enumerate_signs(&scenario, &h, cap)?)
            }
            Space::Probability => {
                return Err(Error::ScenarioMismatch("models are enumerated in correlator space".into()))
            }
            _ => {
                let mut set: HashSet<Vec<i64>> = HashSet::new();
                let mut overflow = false;
                let scale = for_each_vertex(&scenario, &h, space, convention, cap, |row| {
                    if set.len() < MATERIALIZE_CAP {
                        set.insert(row.to_vec());
                    } else if !set.contains(row) {
                        overflow = true;
                    }
                })?;
                if overflow {
                    return Err(Error::CapExceeded(format!(
                        "more than {MATERIALIZE_CAP} distinct vertices; stream instead"
                    )));
                }
                let mut rows: Vec<Vec<i64>> = set.into_iter().collect();
                rows.sort_unstable();
                Extremals::Scaled { scale, rows }
            }
        };
        Ok(HybridModel { scenario, h, space, convention, extremals })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn cardinality(&self) -> &CardinalityTuple {
        &self.h
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn convention(&self) -> MarginalConvention {
        self.convention
    }

    pub fn extremals(&self) -> &Extremals {
        &self.extremals
    }

    pub fn len(&self) -> usize {
        self.extremals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.extremals.is_empty()
    }

    /// Extremal behaviors as exact [`Behavior`] values.
    pub fn behaviors(&self) -> Vec<Behavior> {
        match &self.extremals {
            Extremals::Signs(v) => v.iter().map(|&b| Behavior::from_sign_bits(self.scenario, b)).collect(),
            Extremals::Scaled { scale, rows } => rows
                .iter()
                .map(|r| Behavior::from_scaled(self.scenario, self.space, r, *scale).expect("vertex in box"))
                .collect(),
        }
    }

    /// Integer rows (scaled) regardless of storage.
    pub fn rows(&self) -> (i64, Vec<Vec<i64>>) {
        match &self.extremals {
            Extremals::Signs(v) => {
                let d = self.scenario.full_body_dim();
                (1, v.iter().map(|&b| signs_to_row(b, d)).collect())
            }
            Extremals::Scaled { scale, rows } => (*scale, rows.clone()),
        }
    }

    /// Tight classical bound: the maximum of the Bell expression `-c` over
    /// all extremal behaviors.
    pub fn classical_bound(&self, ineq: &SymmetricInequality) -> Result<BigRational> {
        self.best_vertex(ineq).map(|(v, _)| v)
    }

    /// Maximum of the expression and the index of a maximizing vertex.
    pub fn best_vertex(&self, ineq: &SymmetricInequality) -> Result<(BigRational, usize)> {
        if ineq.scenario() != &self.scenario {
            return Err(Error::ScenarioMismatch(format!("{} vs {}", ineq.scenario(), self.scenario)));
        }
        if self.is_empty() {
            return Err(Error::EmptyModel);
        }
        let d = integer_expression(ineq, self.space)?;
        let (scale, best, arg) = match &self.extremals {
            Extremals::Signs(v) => {
                let total: i64 = d.iter().sum();
                let mut best = i64::MIN;
                let mut arg = 0;
                for (i, &bits) in v.iter().enumerate() {
                    let mut neg = 0i64;
                    let mut b = bits;
                    while b != 0 {
                        let j = b.trailing_zeros() as usize;
                        neg += d[j];
                        b &= b - 1;
                    }
                    let val = total - 2 * neg;
                    if val > best {
                        best = val;
                        arg = i;
                    }
                }
                (1, best, arg)
            }
            Extremals::Scaled { scale, rows } => {
                let mut best = i64::MIN;
                let mut arg = 0;
                for (i, r) in rows.iter().enumerate() {
                    let val: i64 = r.iter().zip(&d).map(|(a, b)| a * b).sum();
                    if val > best {
                        best = val;
                        arg = i;
                    }
                }
                (*scale, best, arg)
            }
        };
        Ok((BigRational::new(best.into(), scale.into()), arg))
    }

    /// Indices of vertices on which `ineq` (with its constant) is tight.
    pub fn saturating(&self, ineq: &SymmetricInequality) -> Result<Vec<usize>> {
        let d = integer_expression(ineq, self.space)?;
        let c0 = ineq.constant();
        let (scale, rows) = self.rows();
        let target = c0 * BigRational::from_integer(scale.into());
        if !target.is_integer() {
            return Ok(Vec::new());
        }
        let t = target.to_integer().to_i64().ok_or(Error::Overflow)?;
        Ok(rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.iter().zip(&d).map(|(a, b)| a * b).sum::<i64>() == t)
            .map(|(i, _)| i)
            .collect())
    }
}

/// Bell expression `-c` as integers over the index set of `space`
/// (normalized inequalities have integer coefficients).
pub fn integer_expression(ineq: &SymmetricInequality, space: Space) -> Result<Vec<i64>> {
    ineq.dense(space)?
        .iter()
        .map(|c| {
            if !c.is_integer() {
                return Err(Error::Parse("non-integer coefficient".into()));
            }
            (-c.to_integer()).to_i64().ok_or(Error::Overflow)
        })
        .collect()
}

pub fn signs_to_row(bits: u64, d: usize) -> Vec<i64> {
    (0..d).map(|i| if bits >> i & 1 == 1 { -1 } else { 1 }).collect()
}

/// Packed full-body vertices: each cell applies an arbitrary ±1 function
/// of its own settings; the correlator is the product over cells.
fn enumerate_signs(s: &Scenario, h: &CardinalityTuple, cap: u64) -> Result<Vec<u64>> {
    let n = s.parties();
    let m = s.settings();
    debug_assert!(s.full_body_dim() <= 64, "packed rows need one bit per tuple");
    let tuples = s.full_body_tuples();
    let mut set: HashSet<u64> = HashSet::new();
    for part in partitions_of_type(n, h)? {
        // masks[c][f] = tuples where cell function f of cell c is -1
        let mut masks: Vec<Vec<u64>> = Vec::new();
        let mut total: u64 = 1;
        for cell in &part.cells {
            let inputs = m.pow(cell.len() as u32);
            if inputs >= 40 {
                return Err(Error::CapExceeded(format!("cell of size {} has 2^{inputs} functions", cell.len())));
            }
            let nf = 1u64 << inputs;
            total = total.saturating_mul(nf);
            if total > cap {
                return Err(Error::CapExceeded(format!("{total} strategy products exceed cap {cap}")));
            }
            let local: Vec<usize> = tuples
                .iter()
                .map(|t| cell.iter().fold(0, |acc, &p| acc * m + (t[p] as usize - 1)))
                .collect();
            let mut by_input = vec![0u64; inputs];
            for (i, &l) in local.iter().enumerate() {
                by_input[l] |= 1 << i;
            }
            let mut fm = vec![0u64; nf as usize];
            for f in 1..nf as usize {
                let low = f.trailing_zeros() as usize;
                fm[f] = fm[f & (f - 1)] ^ by_input[low];
            }
            masks.push(fm);
        }
        fn rec(k: usize, acc: u64, masks: &[Vec<u64>], set: &mut HashSet<u64>) {
            if k == masks.len() {
                set.insert(acc);
                return;
            }
            for &mk in &masks[k] {
                rec(k + 1, acc ^ mk, masks, set);
            }
        }
        // fix the sign freedom of the last cell against the others: the
        // complement f -> !f flips a global sign, still enumerated fully
        rec(0, 0, &masks, &mut set);
    }
    let mut v: Vec<u64> = set.into_iter().collect();
    v.sort_unstable();
    Ok(v)
}

/// Streams every cell-deterministic strategy of every partition of type
/// `h` as an integer row (the behavior times the returned scale).
///
/// In the space with marginals each party of a cell outputs a ±1 function
/// of the cell's joint settings; a marginal term leaving some cell partners
/// unmeasured is read with `conv`.
pub fn for_each_vertex(
    s: &Scenario,
    h: &CardinalityTuple,
    space: Space,
    conv: MarginalConvention,
    cap: u64,
    mut f: impl FnMut(&[i64]),
) -> Result<i64> {
    let n = s.parties();
    let m = s.settings();
    let marg = match space {
        Space::FullCorrelation => false,
        Space::WithMarginals => true,
        Space::Probability => {
            return Err(Error::ScenarioMismatch("models are enumerated in correlator space".into()))
        }
    };
    let tuples = if marg { s.marginal_tuples() } else { s.full_body_tuples() };
    let scale_of = |size: usize| -> i64 {
        match (marg, conv) {
            (true, MarginalConvention::UniformAverage) => (m as i64).pow(size as u32 - 1),
            _ => 1,
        }
    };
    let mut global_scale = 1i64;
    for &c in h.sizes() {
        global_scale *= scale_of(c);
    }
    for part in partitions_of_type(n, h)? {
        // per cell: table of scaled cell values over the cell's sub-tuples
        let mut tables: Vec<Vec<Vec<i64>>> = Vec::new();
        let mut total: u64 = 1;
        let mut locals: Vec<Vec<usize>> = Vec::new();
        for cell in &part.cells {
            let sz = cell.len();
            let base = if marg { m + 1 } else { m };
            let nsub = base.pow(sz as u32);
            let tab = cell_table(sz, m, marg, conv, scale_of(sz))?;
            total = total.saturating_mul(tab.len() as u64);
            if total > cap {
                return Err(Error::CapExceeded(format!("{total} strategy products exceed cap {cap}")));
            }
            let local: Vec<usize> = tuples
                .iter()
                .map(|t| {
                    cell.iter().fold(0, |acc, &p| {
                        acc * base + if marg { t[p] as usize } else { t[p] as usize - 1 }
                    })
                })
                .collect();
            debug_assert!(local.iter().all(|&l| l < nsub));
            tables.push(tab);
            locals.push(local);
        }
        let d = tuples.len();
        let mut row = vec![0i64; d];
        let mut idx = vec![0usize; tables.len()];
        loop {
            for (j, r) in row.iter_mut().enumerate() {
                let mut v = 1i64;
                for c in 0..tables.len() {
                    v *= tables[c][idx[c]][locals[c][j]];
                }
                *r = v;
            }
            f(&row);
            // odometer
            let mut k = 0;
            loop {
                if k == idx.len() {
                    break;
                }
                idx[k] += 1;
                if idx[k] < tables[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
    }
    Ok(global_scale)
}

/// Scaled values of one cell over its sub-tuples, for every strategy.
fn cell_table(size: usize, m: usize, marg: bool, conv: MarginalConvention, scale: i64) -> Result<Vec<Vec<i64>>> {
    let inputs = m.pow(size as u32);
    if !marg {
        if inputs > 24 {
            return Err(Error::CapExceeded(format!("cell with 2^{inputs} functions")));
        }
        return Ok((0..1usize << inputs)
            .map(|f| (0..inputs).map(|y| if f >> y & 1 == 1 { -1 } else { 1 }).collect())
            .collect());
    }
    let bits = size * inputs;
    if bits > 26 {
        return Err(Error::CapExceeded(format!("cell with 2^{bits} output assignments")));
    }
    let base = m + 1;
    let nsub = base.pow(size as u32);
    let subs: Vec<Vec<usize>> = (0..nsub)
        .map(|mut z| {
            let mut t = vec![0; size];
            for k in (0..size).rev() {
                t[k] = z % base;
                z /= base;
            }
            t
        })
        .collect();
    let mut out = Vec::with_capacity(1 << bits);
    for strat in 0u64..1 << bits {
        // output of party k on joint input y (digits 0..m-1): bit k*inputs + y
        let out_bit = |k: usize, y: usize| -> i64 { if strat >> (k * inputs + y) & 1 == 1 { -1 } else { 1 } };
        let vals: Vec<i64> = subs
            .iter()
            .map(|z| {
                let active: Vec<usize> = (0..size).filter(|&k| z[k] != 0).collect();
                if active.is_empty() {
                    return scale;
                }
                let free: Vec<usize> = (0..size).filter(|&k| z[k] == 0).collect();
                let fills: Vec<Vec<usize>> = match conv {
                    MarginalConvention::PartnerFirst => vec![vec![1; free.len()]],
                    MarginalConvention::UniformAverage => (0..m.pow(free.len() as u32))
                        .map(|mut c| {
                            (0..free.len())
                                .map(|_| {
                                    let v = c % m + 1;
                                    c /= m;
                                    v
                                })
                                .collect()
                        })
                        .collect(),
                };
                let mut sum = 0i64;
                for fill in &fills {
                    let mut x = z.clone();
                    for (slot, &v) in free.iter().zip(fill) {
                        x[*slot] = v;
                    }
                    let y = x.iter().fold(0, |acc, &v| acc * m + (v - 1));
                    sum += active.iter().map(|&k| out_bit(k, y)).product::<i64>();
                }
                sum * (scale / fills.len() as i64)
            })
            .collect();
        out.push(vals);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(s: &str) -> CardinalityTuple {
        s.parse().unwrap()
    }

    #[test]
    fn partition_counts() {
        assert_eq!(partitions_of_type(3, &h("2,1")).unwrap().len(), 3);
        assert_eq!(partitions_of_type(4, &h("2,2")).unwrap().len(), 3);
        assert_eq!(partitions_of_type(5, &h("2,2,1")).unwrap().len(), 15);
        assert_eq!(partitions_of_type(5, &h("1,1,1,1,1")).unwrap().len(), 1);
        assert!(partitions_of_type(5, &h("2,2")).is_err());
    }

    #[test]
    fn cardinality_parsing() {
        assert_eq!(h("(2,2,1)").sizes(), &[2, 2, 1]);
        assert!("1,2".parse::<CardinalityTuple>().is_err());
        assert_eq!(CardinalityTuple::all(4).len(), 5);
        assert!(h("2,1,1").refines(&h("3,1")));
        assert!(h("2,1,1").refines(&h("2,2")));
        assert!(!h("2,2").refines(&h("3,1")));
    }

    #[test]
    fn small_vertex_counts() {
        let s3 = Scenario::new(3, 2).unwrap();
        assert_eq!(HybridModel::full_body(s3, h("1,1,1")).unwrap().len(), 16);
        let s4 = Scenario::new(4, 2).unwrap();
        assert_eq!(HybridModel::full_body(s4, h("1,1,1,1")).unwrap().len(), 32);
    }

    #[test]
    fn per_partition_count_21() {
        // one partition AB|C: 2^4 * 2^2 products, halved by the common sign flip
        let s3 = Scenario::new(3, 2).unwrap();
        let part = Partition::new(3, vec![vec![0, 1], vec![2]]).unwrap();
        assert_eq!(part.cardinality(), h("2,1"));
        let mut set = HashSet::new();
        for f in 0u32..16 {
            for g in 0u32..4 {
                let row: Vec<i64> = s3
                    .full_body_tuples()
                    .iter()
                    .map(|t| {
                        let y = (t[0] as u32 - 1) * 2 + (t[1] as u32 - 1);
                        let a = if f >> y & 1 == 1 { -1 } else { 1 };
                        let b = if g >> (t[2] - 1) & 1 == 1 { -1 } else { 1 };
                        a * b
                    })
                    .collect();
                set.insert(row);
            }
        }
        assert_eq!(set.len(), 32);
    }

    #[test]
    fn streaming_matches_packed() {
        let s = Scenario::new(3, 2).unwrap();
        let packed = HybridModel::full_body(s, h("2,1")).unwrap();
        let mut set = HashSet::new();
        for_each_vertex(&s, &h("2,1"), Space::FullCorrelation, MarginalConvention::UniformAverage, 1 << 20, |r| {
            set.insert(r.to_vec());
        })
        .unwrap();
        let (_, rows) = packed.rows();
        let other: HashSet<Vec<i64>> = rows.into_iter().collect();
        assert_eq!(set, other);
    }

    #[test]
    fn svetlichny_bounds() {
        let s = Scenario::new(3, 2).unwrap();
        let svet = SymmetricInequality::from_levels(s, 4, &[1, -1, -1, 1]).unwrap();
        let four = BigRational::from_integer(4.into());
        for t in ["2,1", "1,1,1"] {
            let model = HybridModel::full_body(s, h(t)).unwrap();
            assert_eq!(model.classical_bound(&svet).unwrap(), four);
        }
        let one = HybridModel::full_body(s, h("3")).unwrap();
        assert_eq!(one.classical_bound(&svet).unwrap(), BigRational::from_integer(8.into()));
    }

    #[test]
    fn marginal_vertices_in_box() {
        let s = Scenario::new(3, 2).unwrap();
        let model = HybridModel::enumerate(
            s,
            h("2,1"),
            Space::WithMarginals,
            MarginalConvention::UniformAverage,
            DEFAULT_STRATEGY_CAP,
        )
        .unwrap();
        let (scale, rows) = model.rows();
        assert_eq!(scale, 2);
        assert!(rows.iter().all(|r| r.len() == 26 && r.iter().all(|v| v.abs() <= 2)));
        // local deterministic vertices (2^6) are among them
        let local = HybridModel::enumerate(
            s,
            h("1,1,1"),
            Space::WithMarginals,
            MarginalConvention::UniformAverage,
            DEFAULT_STRATEGY_CAP,
        )
        .unwrap();
        assert_eq!(local.len(), 64);
        let all: HashSet<Vec<i64>> = rows.into_iter().collect();
        for r in local.rows().1 {
            let scaled: Vec<i64> = r.iter().map(|v| v * 2).collect();
            assert!(all.contains(&scaled));
        }
    }
}
