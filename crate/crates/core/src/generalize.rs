//! Generalizing an inequality to more settings: extension rules, extended
//! behaviors, symbolic reduction, and the linear program that searches for
//! generalizations valid on a hybrid model.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::behavior::{Behavior, Space};
use crate::cpt::Projection;
use crate::error::{Error, Result};
use crate::linalg::{certified_rank, solve_square, ModpRank};
use crate::inequality::{q, MarginalConvention, SymmetricInequality};
use crate::lp::{simplex_max, simplex_max_f64, FloatSolution, LinearProgram, Relation, VarBound};
use crate::models::{for_each_vertex, CardinalityTuple, HybridModel, DEFAULT_STRATEGY_CAP};
use crate::scenario::{Multiset, Scenario};

type Q = BigRational;

/// What an added setting does in the smaller scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Extension {
    /// Deterministic outcome +1.
    Trivial,
    /// Same measurement as an existing setting, outcomes optionally swapped.
    CopyOf { setting: u8, flip: bool },
}

/// Per-party choice for every setting of the target scenario that the base
/// scenario lacks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtensionRule {
    base: Scenario,
    target: Scenario,
    /// `map[k][x - m1 - 1]` for added setting `x` of party `k`.
    map: Vec<Vec<Extension>>,
}

fn party_letter(k: usize) -> char {
    (b'A' + k as u8) as char
}

fn parse_party_setting(s: &str) -> Result<(usize, u8)> {
    let s = s.trim();
    let mut chars = s.chars();
    let p = chars.next().ok_or_else(|| Error::InvalidRule("empty term".into()))?;
    if !p.is_ascii_uppercase() {
        return Err(Error::InvalidRule(format!("expected party letter in '{s}'")));
    }
    let x: u8 = chars.as_str().parse().map_err(|_| Error::InvalidRule(format!("bad setting in '{s}'")))?;
    Ok(((p as u8 - b'A') as usize, x))
}

impl ExtensionRule {
    pub fn new(base: Scenario, target: Scenario, map: Vec<Vec<Extension>>) -> Result<Self> {
        let (n, m1, m2) = (base.parties(), base.settings(), target.settings());
        if target.parties() != n || m2 <= m1 {
            return Err(Error::InvalidRule(format!("target {target} does not add settings to {base}")));
        }
        if map.len() != n || map.iter().any(|v| v.len() != m2 - m1) {
            return Err(Error::InvalidRule("every added setting of every party must be mapped".into()));
        }
        for e in map.iter().flatten() {
            if let Extension::CopyOf { setting, .. } = e {
                if *setting == 0 || *setting as usize > m1 {
                    return Err(Error::InvalidRule(format!("copy of undefined setting {setting}")));
                }
            }
        }
        Ok(ExtensionRule { base, target, map })
    }

    /// Every added setting trivial.
    pub fn trivial(base: Scenario, target: Scenario) -> Result<Self> {
        let k = target.settings().saturating_sub(base.settings());
        Self::new(base, target, vec![vec![Extension::Trivial; k]; base.parties()])
    }

    /// Every added setting a copy of `setting`.
    pub fn copy_of(base: Scenario, target: Scenario, setting: u8, flip: bool) -> Result<Self> {
        let k = target.settings().saturating_sub(base.settings());
        Self::new(base, target, vec![vec![Extension::CopyOf { setting, flip }; k]; base.parties()])
    }

    /// Parses `"A3=1,B3=1,C3=1"`, `"A3=A1,B3=B1,C3=C1"` or `"A3=-A1,..."`.
    pub fn parse(base: Scenario, target: Scenario, text: &str) -> Result<Self> {
        let (n, m1, m2) = (base.parties(), base.settings(), target.settings());
        if m2 <= m1 {
            return Err(Error::InvalidRule(format!("target {target} does not add settings to {base}")));
        }
        let mut map: Vec<Vec<Option<Extension>>> = vec![vec![None; m2 - m1]; n];
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (lhs, rhs) = item.split_once('=').ok_or_else(|| Error::InvalidRule(format!("missing '=' in '{item}'")))?;
            let (k, x) = parse_party_setting(lhs)?;
            if k >= n || (x as usize) <= m1 || x as usize > m2 {
                return Err(Error::InvalidRule(format!("'{lhs}' is not an added setting")));
            }
            let rhs = rhs.trim();
            let ext = if rhs == "1" || rhs == "+1" {
                Extension::Trivial
            } else {
                let (flip, body) = match rhs.strip_prefix('-') {
                    Some(b) => (true, b),
                    None => (false, rhs.strip_prefix('+').unwrap_or(rhs)),
                };
                let (k2, y) = parse_party_setting(body)?;
                if k2 != k {
                    return Err(Error::InvalidRule(format!("'{item}' copies another party's setting")));
                }
                Extension::CopyOf { setting: y, flip }
            };
            let slot = &mut map[k][x as usize - m1 - 1];
            if slot.is_some() {
                return Err(Error::InvalidRule(format!("'{lhs}' assigned twice")));
            }
            *slot = Some(ext);
        }
        let mut full = Vec::with_capacity(n);
        for (k, v) in map.into_iter().enumerate() {
            let mut row = Vec::with_capacity(v.len());
            for (i, e) in v.into_iter().enumerate() {
                row.push(e.ok_or_else(|| {
                    Error::InvalidRule(format!("{}{} not mapped", party_letter(k), m1 + 1 + i))
                })?);
            }
            full.push(row);
        }
        Self::new(base, target, full)
    }

    pub fn base(&self) -> &Scenario {
        &self.base
    }

    pub fn target(&self) -> &Scenario {
        &self.target
    }

    /// Setting of party `k` in the base scenario (0 = not measured) and
    /// sign for target setting `x`.
    pub fn substitute(&self, k: usize, x: u8) -> (u8, i64) {
        let m1 = self.base.settings() as u8;
        if x <= m1 {
            return (x, 1);
        }
        match self.map[k][(x - m1 - 1) as usize] {
            Extension::Trivial => (0, 1),
            Extension::CopyOf { setting, flip } => (setting, if flip { -1 } else { 1 }),
        }
    }

    /// Base tuple and sign of a target tuple.
    pub fn map_tuple(&self, t: &[u8]) -> (Vec<u8>, i64) {
        let mut sign = 1;
        let out = t
            .iter()
            .enumerate()
            .map(|(k, &x)| {
                let (y, s) = self.substitute(k, x);
                sign *= s;
                y
            })
            .collect();
        (out, sign)
    }

    /// Observables of the target scenario induced by base observables
    /// (Pauli coordinates): identity for trivial settings.
    pub fn extend_observables(&self, obs: &[Vec<[f64; 4]>]) -> Vec<Vec<[f64; 4]>> {
        let m2 = self.target.settings() as u8;
        obs.iter()
            .enumerate()
            .map(|(k, o)| {
                (1..=m2)
                    .map(|x| match self.substitute(k, x) {
                        (0, _) => [1.0, 0.0, 0.0, 0.0],
                        (y, s) => o[y as usize - 1].map(|v| v * s as f64),
                    })
                    .collect()
            })
            .collect()
    }
}

impl fmt::Display for ExtensionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m1 = self.base.settings();
        let mut parts = Vec::new();
        for (k, v) in self.map.iter().enumerate() {
            for (i, e) in v.iter().enumerate() {
                let lhs = format!("{}{}", party_letter(k), m1 + 1 + i);
                parts.push(match e {
                    Extension::Trivial => format!("{lhs}=1"),
                    Extension::CopyOf { setting, flip } => {
                        format!("{lhs}={}{}{}", if *flip { "-" } else { "" }, party_letter(k), setting)
                    }
                });
            }
        }
        write!(f, "{}", parts.join(","))
    }
}

/// Target-scenario behavior obtained by substituting the rule.
pub fn extend_behavior(b1: &Behavior, rule: &ExtensionRule) -> Result<Behavior> {
    if b1.space() != Space::WithMarginals {
        return Err(Error::ScenarioMismatch("extension needs a behavior with marginals".into()));
    }
    if b1.scenario() != rule.base() {
        return Err(Error::ScenarioMismatch(format!("behavior on {}, rule from {}", b1.scenario(), rule.base())));
    }
    let s1 = *rule.base();
    let entries = rule
        .target()
        .marginal_tuples()
        .iter()
        .map(|t| {
            let (u, sign) = rule.map_tuple(t);
            if u.iter().all(|&x| x == 0) {
                q(sign)
            } else {
                &b1.entries()[s1.marginal_index(&u)] * q(sign)
            }
        })
        .collect();
    Behavior::new(*rule.target(), Space::WithMarginals, entries)
}

/// Same as [`extend_behavior`] on an integer row scaled by `scale`.
pub fn extend_row(row: &[i64], scale: i64, rule: &ExtensionRule) -> Vec<i64> {
    let s1 = *rule.base();
    rule.target()
        .marginal_tuples()
        .iter()
        .map(|t| {
            let (u, sign) = rule.map_tuple(t);
            if u.iter().all(|&x| x == 0) {
                sign * scale
            } else {
                sign * row[s1.marginal_index(&u)]
            }
        })
        .collect()
}

/// Substitutes the rule into `b2` and collects terms in the base scenario.
/// Fails when the result is not party-symmetric (asymmetric rules).
pub fn reduce_inequality(b2: &SymmetricInequality, rule: &ExtensionRule) -> Result<SymmetricInequality> {
    if b2.scenario() != rule.target() {
        return Err(Error::ScenarioMismatch(format!("inequality on {}, rule to {}", b2.scenario(), rule.target())));
    }
    let mut constant = b2.constant().clone();
    let mut terms: BTreeMap<Vec<u8>, Q> = BTreeMap::new();
    for (t, c) in b2.expand_symmetric() {
        let (u, sign) = rule.map_tuple(&t);
        let v = c * q(sign);
        if u.iter().all(|&x| x == 0) {
            constant += v;
        } else {
            *terms.entry(u).or_insert_with(Q::zero) += v;
        }
    }
    let mut coeffs = Vec::new();
    let mut seen: HashSet<Multiset> = HashSet::new();
    for t in terms.keys() {
        let mu = Multiset::from_tuple(t);
        if !seen.insert(mu.clone()) {
            continue;
        }
        let c = terms[t].clone();
        for p in mu.permutations() {
            if terms.get(&p).cloned().unwrap_or_else(Q::zero) != c {
                return Err(Error::InvalidRule("reduction is not symmetric under party permutations".into()));
            }
        }
        coeffs.push((mu, c));
    }
    SymmetricInequality::new(*rule.base(), constant, coeffs)
}

/// Extremal behaviors of `model` on which `b1` is tight.
pub fn saturating_behaviors(b1: &SymmetricInequality, model: &HybridModel) -> Result<Vec<Behavior>> {
    let idx = model.saturating(b1)?;
    if idx.is_empty() {
        return Err(Error::NoSaturation);
    }
    let (scale, rows) = model.rows();
    idx.iter()
        .map(|&i| Behavior::from_scaled(*model.scenario(), model.space(), &rows[i], scale))
        .collect()
}

/// Distinct symmetric projections of every vertex of a hybrid model in the
/// space with marginals, streamed so that large models fit in memory.
#[derive(Debug, Clone)]
pub struct TargetModel {
    pub scenario: Scenario,
    pub h: CardinalityTuple,
    pub convention: MarginalConvention,
    pub projection: Projection,
    pub scale: i64,
    /// Multiset sums (without the homogenizing coordinate).
    pub points: Vec<Vec<i64>>,
    pub vertices: u64,
}

impl TargetModel {
    pub fn build(scenario: Scenario, h: CardinalityTuple, convention: MarginalConvention) -> Result<Self> {
        let projection = Projection::new(scenario, true);
        let mut set: HashSet<Vec<i64>> = HashSet::new();
        let mut vertices = 0u64;
        let scale = for_each_vertex(&scenario, &h, Space::WithMarginals, convention, DEFAULT_STRATEGY_CAP, |row| {
            vertices += 1;
            let p = projection.project_row(row, 0);
            set.insert(p[1..].to_vec());
        })?;
        let mut points: Vec<Vec<i64>> = set.into_iter().collect();
        points.sort_unstable();
        Ok(TargetModel { scenario, h, convention, projection, scale, points, vertices })
    }

    pub fn multisets(&self) -> &[Multiset] {
        self.projection.multisets()
    }

    fn expression_vector(&self, ineq: &SymmetricInequality) -> Result<Vec<i64>> {
        self.multisets()
            .iter()
            .map(|m| {
                let c = -ineq.coeff(m);
                if !c.is_integer() {
                    return Err(Error::Parse("non-integer coefficient".into()));
                }
                c.to_integer().to_i64().ok_or(Error::Overflow)
            })
            .collect()
    }

    /// Maximum of the Bell expression `-c` over every vertex of the model.
    pub fn classical_bound(&self, ineq: &SymmetricInequality) -> Result<Q> {
        if ineq.scenario() != &self.scenario {
            return Err(Error::ScenarioMismatch(format!("{} vs {}", ineq.scenario(), self.scenario)));
        }
        let d = self.expression_vector(ineq)?;
        let best = self
            .points
            .iter()
            .map(|p| p.iter().zip(&d).map(|(a, b)| *a as i128 * *b as i128).sum::<i128>())
            .max()
            .ok_or(Error::EmptyModel)?;
        Ok(Q::new(BigInt::from(best), BigInt::from(self.scale)))
    }

    /// Largest `<b, p> / scale` and the indices of the `k` most violated
    /// points above `limit`.
    fn separate(&self, b: &[Q], limit: &Q, k: usize) -> (Q, Vec<usize>) {
        let mut l = BigInt::one();
        for v in b {
            l = l.lcm(v.denom());
        }
        let ib: Vec<i128> = b.iter().map(|v| (v.numer() * (&l / v.denom())).to_i128().expect("bounded LP solution")).collect();
        let vals: Vec<i128> = self
            .points
            .iter()
            .map(|p| p.iter().zip(&ib).map(|(a, b)| *a as i128 * b).sum())
            .collect();
        let denom = Q::from_integer(l * self.scale);
        let best = vals.iter().copied().max().unwrap_or(i128::MIN);
        let mut order: Vec<usize> = (0..vals.len()).filter(|&i| Q::from_integer(vals[i].into()) / &denom > *limit).collect();
        order.sort_by(|&a, &b| vals[b].cmp(&vals[a]));
        order.truncate(k);
        (Q::from_integer(best.into()) / denom, order)
    }

    /// Indices of the `k` points most violating `<b, p> <= scale` in
    /// floating point (relative tolerance `1e-9`).
    fn separate_f64(&self, b: &[f64], k: usize) -> Vec<usize> {
        let s = self.scale as f64;
        let mut viol: Vec<(f64, usize)> = self
            .points
            .iter()
            .enumerate()
            .filter_map(|(i, p)| {
                let v: f64 = p.iter().zip(b).map(|(a, x)| *a as f64 * x).sum();
                (v > s + 1e-9 * (1.0 + s)).then_some((v, i))
            })
            .collect();
        viol.sort_by(|a, b| b.0.total_cmp(&a.0));
        viol.into_iter().take(k).map(|(_, i)| i).collect()
    }
}

/// Base inequality, rule and target model of a generalization search, with
/// the extended saturating points precomputed.
#[derive(Debug, Clone)]
pub struct Generalizer {
    pub base: SymmetricInequality,
    pub rule: ExtensionRule,
    pub target: TargetModel,
    /// Independent homogenized projections `(scale; s_mu)` of the extended
    /// saturating behaviors; they span all the others.
    pub equalities: Vec<Vec<i64>>,
    pub saturating: usize,
}

/// One LP run.
#[derive(Debug, Clone)]
pub struct GeneralizationResult {
    pub inequality: SymmetricInequality,
    pub objective: Q,
    pub rounds: usize,
    /// Vertex constraints added during this run.
    pub cuts: usize,
    pub box_limit: i64,
}

impl Generalizer {
    /// Saturating behaviors of `base` are taken on the base-scenario model
    /// with the same cardinality tuple as the target model.
    pub fn new(base: SymmetricInequality, rule: ExtensionRule, h: CardinalityTuple, conv: MarginalConvention) -> Result<Self> {
        let target = TargetModel::build(*rule.target(), h, conv)?;
        Self::with_target(base, rule, target)
    }

    /// Reuses an already built target model (its `h` and convention apply).
    pub fn with_target(base: SymmetricInequality, rule: ExtensionRule, target: TargetModel) -> Result<Self> {
        if base.scenario() != rule.base() {
            return Err(Error::ScenarioMismatch(format!("base on {}, rule from {}", base.scenario(), rule.base())));
        }
        if target.scenario != *rule.target() {
            return Err(Error::ScenarioMismatch(format!("target model on {}, rule into {}", target.scenario, rule.target())));
        }
        let base_model =
            HybridModel::enumerate(*rule.base(), target.h.clone(), Space::WithMarginals, target.convention, DEFAULT_STRATEGY_CAP)?;
        let idx = base_model.saturating(&base)?;
        if idx.is_empty() {
            return Err(Error::NoSaturation);
        }
        let (scale1, rows) = base_model.rows();
        let mut set: HashSet<Vec<i64>> = HashSet::new();
        for &i in &idx {
            let ext = extend_row(&rows[i], scale1, &rule);
            set.insert(target.projection.project_row(&ext, scale1));
        }
        let mut all: Vec<Vec<i64>> = set.into_iter().collect();
        all.sort_unstable();
        // keep an independent subset; the system is consistent by construction
        let width = all.first().map_or(0, Vec::len);
        let (_, basis) = certified_rank(all.iter().cloned(), width, width);
        let equalities = basis.into_iter().map(|i| all[i].clone()).collect();
        Ok(Generalizer { base, rule, target, equalities, saturating: idx.len() })
    }

    pub fn dim(&self) -> usize {
        self.target.multisets().len()
    }

    /// Uniform integer direction in `[-10, 10]^dim`.
    pub fn random_direction(&self, seed: u64) -> Vec<i64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..self.dim()).map(|_| rng.gen_range(-10..=10)).collect()
    }

    /// `max <r, b>` over expressions `b` with `<p, b> = 1` on extended
    /// saturating points and `<p, b> <= 1` on the model, solved exactly with
    /// lazily added vertex constraints inside the box `|b_mu| <= M`.
    pub fn solve(&self, direction: &[i64]) -> Result<GeneralizationResult> {
        self.solve_with_pool(direction, &mut Vec::new())
    }

    /// As [`Generalizer::solve`], starting from and extending a pool of
    /// vertex constraints shared between runs.
    ///
    /// Cuts are found with a floating-point LP. The reported optimum is
    /// exact: either a basis read off the float solution passes exact
    /// primal and dual checks, or an exact LP over the nearly tight cuts is
    /// solved and re-checked against every vertex.
    pub fn solve_with_pool(&self, direction: &[i64], pool: &mut Vec<usize>) -> Result<GeneralizationResult> {
        let dim = self.dim();
        if direction.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: direction.len() });
        }
        let start = pool.len();
        let mut in_pool: HashSet<usize> = pool.iter().copied().collect();
        let mut rounds = 0;
        let mut box_limit = 8i64;
        loop {
            let (x, optimum) = self.solve_boxed(direction, box_limit, pool, &mut in_pool, &mut rounds)?;
            let on_box = x.iter().any(|v| v.abs() == q(box_limit));
            if on_box && box_limit < 1 << 20 {
                box_limit *= 4;
                continue;
            }
            let expr = self.target.multisets().iter().cloned().zip(x);
            let inequality = SymmetricInequality::from_bound_form(self.target.scenario, expr, Q::one())?;
            return Ok(GeneralizationResult { inequality, objective: optimum, rounds, cuts: pool.len() - start, box_limit });
        }
    }

    /// Constraint rows `(a, rhs, is_equality)`: equalities, then the box
    /// `+-b_j <= limit`, then the pooled cuts.
    fn rows(&self, limit: i64, cuts: &[usize]) -> Vec<(Vec<i64>, i64, bool)> {
        let dim = self.dim();
        let mut rows: Vec<(Vec<i64>, i64, bool)> =
            self.equalities.iter().map(|e| (e[1..].to_vec(), e[0], true)).collect();
        for sign in [1, -1] {
            for j in 0..dim {
                let mut a = vec![0; dim];
                a[j] = sign;
                rows.push((a, limit, false));
            }
        }
        rows.extend(cuts.iter().map(|&c| (self.target.points[c].clone(), self.target.scale, false)));
        rows
    }

    fn solve_boxed(
        &self,
        direction: &[i64],
        limit: i64,
        pool: &mut Vec<usize>,
        in_pool: &mut HashSet<usize>,
        rounds: &mut usize,
    ) -> Result<(Vec<Q>, Q)> {
        const PER_ROUND: usize = 16;
        const MAX_ROUNDS: usize = 10_000;
        let dim = self.dim();
        let to_lp = |rows: &[(Vec<i64>, i64, bool)]| {
            let mut lp = LinearProgram::new(direction.iter().map(|&r| q(r)).collect());
            lp.bounds = vec![VarBound::free(); dim];
            for (a, b, eq) in rows {
                lp.add(a.iter().map(|&v| q(v)).collect(), if *eq { Relation::Eq } else { Relation::Le }, q(*b));
            }
            lp
        };
        // floating-point cutting planes
        let mut float = None;
        loop {
            *rounds += 1;
            if *rounds > MAX_ROUNDS {
                return Err(Error::NoConvergence { sweeps: *rounds, last: f64::NAN });
            }
            // a float failure only costs speed: the exact stage takes over
            let Ok(sol) = simplex_max_f64(&to_lp(&self.rows(limit, pool))) else { break };
            let viol = self.target.separate_f64(&sol.x, PER_ROUND);
            let fresh: Vec<usize> = viol.into_iter().filter(|c| in_pool.insert(*c)).collect();
            if fresh.is_empty() {
                float = Some(sol);
                break;
            }
            pool.extend(fresh);
        }
        let rows = self.rows(limit, pool);
        if let Some(sol) = &float {
            if let Some(found) = self.certify(direction, &rows, sol) {
                return Ok(found);
            }
        }
        // exact re-solve over the rows that are (nearly) tight
        let mut active: Vec<(Vec<i64>, i64, bool)> = match &float {
            Some(sol) => rows
                .into_iter()
                .filter(|(a, b, eq)| {
                    let v: f64 = a.iter().zip(&sol.x).map(|(a, x)| *a as f64 * x).sum();
                    *eq || v >= *b as f64 - 1e-6 * (1.0 + (*b as f64).abs())
                })
                .collect(),
            None => rows,
        };
        // the box keeps the restricted problem bounded
        active.extend(self.rows(limit, &[]).into_iter().filter(|r| !r.2));
        loop {
            *rounds += 1;
            let sol = simplex_max(&to_lp(&active))?;
            let (best, viol) = self.target.separate(&sol.x, &Q::one(), PER_ROUND);
            if best <= Q::one() {
                return Ok((sol.x, sol.optimum));
            }
            for c in viol {
                active.push((self.target.points[c].clone(), self.target.scale, false));
                if in_pool.insert(c) {
                    pool.push(c);
                }
            }
            if *rounds > MAX_ROUNDS {
                return Err(Error::NoConvergence { sweeps: *rounds, last: f64::NAN });
            }
        }
    }

    /// Exact check of a float optimum. Picks independent tight rows, those
    /// with positive multipliers first, solves them as equations and
    /// accepts the point if it is feasible for every vertex and the
    /// objective is a nonnegative combination of the chosen inequalities.
    fn certify(&self, direction: &[i64], rows: &[(Vec<i64>, i64, bool)], sol: &FloatSolution) -> Option<(Vec<Q>, Q)> {
        let dim = self.dim();
        let slack = |(a, b, _): &(Vec<i64>, i64, bool)| {
            *b as f64 - a.iter().zip(&sol.x).map(|(a, x)| *a as f64 * x).sum::<f64>()
        };
        let mut order: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].2).collect();
        let mut tight: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i].2 && slack(&rows[i]).abs() < 1e-7).collect();
        tight.sort_by(|&a, &b| sol.duals[b].total_cmp(&sol.duals[a]));
        order.extend(tight);
        let mut rank = ModpRank::new(dim);
        let basis: Vec<usize> = order.into_iter().filter(|&i| rank.rank() < dim && rank.insert(&rows[i].0)).collect();
        if basis.len() < dim {
            return None;
        }
        let a: Vec<Vec<i64>> = basis.iter().map(|&i| rows[i].0.clone()).collect();
        let rhs: Vec<Q> = basis.iter().map(|&i| q(rows[i].1)).collect();
        let x = solve_square(&a, &rhs)?;
        let at: Vec<Vec<i64>> = (0..dim).map(|j| a.iter().map(|r| r[j]).collect()).collect();
        let y = solve_square(&at, &direction.iter().map(|&c| q(c)).collect::<Vec<_>>())?;
        if basis.iter().zip(&y).any(|(&i, yi)| !rows[i].2 && yi.is_negative()) {
            return None;
        }
        let feasible = rows.iter().take(self.equalities.len() + 2 * dim).all(|(a, b, eq)| {
            let v: Q = a.iter().zip(&x).map(|(a, x)| q(*a) * x).sum();
            if *eq { v == q(*b) } else { v <= q(*b) }
        });
        if !feasible || self.target.separate(&x, &Q::one(), 0).0 > Q::one() {
            return None;
        }
        let optimum = direction.iter().zip(&x).map(|(c, x)| q(*c) * x).sum();
        Some((x, optimum))
    }
}

/// Convenience wrapper: one LP run for a seeded random direction.
pub fn generalization_lp(g: &Generalizer, seed: u64) -> Result<GeneralizationResult> {
    g.solve(&g.random_direction(seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: usize, m: usize) -> Scenario {
        Scenario::new(n, m).unwrap()
    }

    #[test]
    fn rule_parsing_round_trip() {
        let r = ExtensionRule::parse(s(3, 2), s(3, 3), "A3=1,B3=1,C3=1").unwrap();
        assert_eq!(r, ExtensionRule::trivial(s(3, 2), s(3, 3)).unwrap());
        let c = ExtensionRule::parse(s(3, 2), s(3, 3), "A3=A1, B3=B1, C3=-C1").unwrap();
        assert_eq!(c.to_string(), "A3=A1,B3=B1,C3=-C1");
        assert_eq!(c.map_tuple(&[3, 3, 3]), (vec![1, 1, 1], -1));
        assert!(ExtensionRule::parse(s(3, 2), s(3, 3), "A3=1,B3=1").is_err());
        assert!(ExtensionRule::parse(s(3, 2), s(3, 3), "A3=B1,B3=1,C3=1").is_err());
        assert!(ExtensionRule::parse(s(3, 2), s(3, 3), "A3=A3,B3=1,C3=1").is_err());
    }

    #[test]
    fn trivial_party_drops_out() {
        // a 2-setting behavior on three parties where C is read as trivial
        // through a 3rd setting: <A1 B2 C3> = <A1 B2>
        let base = s(3, 2);
        let rule = ExtensionRule::trivial(base, s(3, 3)).unwrap();
        let entries: Vec<Q> = (0..base.marginal_dim()).map(|i| Q::new(((i % 5) as i64 - 2).into(), 3.into())).collect();
        let b1 = Behavior::new(base, Space::WithMarginals, entries).unwrap();
        let b2 = extend_behavior(&b1, &rule).unwrap();
        let t = rule.target();
        assert_eq!(b2.entries()[t.marginal_index(&[1, 2, 3])], b1.entries()[base.marginal_index(&[1, 2, 0])]);
        assert_eq!(b2.entries()[t.marginal_index(&[3, 3, 3])], Q::one());
    }
}
