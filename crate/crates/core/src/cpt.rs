//! Cone projection: project model vertices onto the party-symmetric
//! subspace, enumerate the facets of the projected cone by double
//! description, and lift-check candidates against the full cone.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inequality::SymmetricInequality;
use crate::linalg::{self, certified_rank};
use crate::models::{CardinalityTuple, Extremals, HybridModel};
use crate::scenario::{Multiset, Scenario};
use crate::symmetry::{is_single_term, SymmetryGroup};

/// A polyhedral cone given by integer generators (homogenizing coordinate
/// first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cone {
    dim: usize,
    rays: Vec<Vec<i64>>,
}

impl Cone {
    pub fn new(dim: usize, rays: Vec<Vec<i64>>) -> Result<Self> {
        let mut out = Vec::with_capacity(rays.len());
        for r in rays {
            if r.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: r.len() });
            }
            if r.iter().all(|&x| x == 0) {
                return Err(Error::Parse("zero ray".into()));
            }
            let mut w: Vec<i128> = r.iter().map(|&x| x as i128).collect();
            linalg::reduce_i128(&mut w);
            out.push(w.into_iter().map(|x| x as i64).collect());
        }
        Ok(Cone { dim, rays: out })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }
}

/// A facet normal `a` (with `a . r >= 0` on every ray) and the rays it
/// saturates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetCandidate {
    pub normal: Vec<i64>,
    pub saturating: Vec<usize>,
}

/// Linear map from correlator space onto multiset sums.
#[derive(Debug, Clone)]
pub struct Projection {
    scenario: Scenario,
    multisets: Vec<Multiset>,
    tuple_class: Vec<usize>,
    masks: Vec<u64>,
}

impl Projection {
    /// Projection of the full-body space (`marginals = false`) or the space
    /// with marginals.
    pub fn new(scenario: Scenario, marginals: bool) -> Self {
        let multisets = scenario.multisets(marginals);
        let pos: HashMap<Multiset, usize> = multisets.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let tuples = if marginals { scenario.marginal_tuples() } else { scenario.full_body_tuples() };
        let tuple_class: Vec<usize> = tuples.iter().map(|t| pos[&Multiset::from_tuple(t)]).collect();
        let mut masks = vec![0u64; multisets.len()];
        if tuples.len() <= 64 {
            for (i, &c) in tuple_class.iter().enumerate() {
                masks[c] |= 1 << i;
            }
        }
        Projection { scenario, multisets, tuple_class, masks }
    }

    pub fn multisets(&self) -> &[Multiset] {
        &self.multisets
    }

    pub fn tuple_class(&self) -> &[usize] {
        &self.tuple_class
    }

    /// Homogenized projection `(scale; s_mu)` of an integer row.
    pub fn project_row(&self, row: &[i64], scale: i64) -> Vec<i64> {
        let mut out = vec![0i64; self.multisets.len() + 1];
        out[0] = scale;
        for (v, &c) in row.iter().zip(&self.tuple_class) {
            out[c + 1] += v;
        }
        out
    }

    /// Homogenized projection of a packed sign vector.
    pub fn project_signs(&self, bits: u64) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.masks.len() + 1);
        out.push(1);
        for &mk in &self.masks {
            out.push(mk.count_ones() as i64 - 2 * (bits & mk).count_ones() as i64);
        }
        out
    }

    /// Symmetric inequality `a0 + sum a_mu (mu) >= 0` from a projected normal.
    pub fn inequality(&self, normal: &[i64]) -> Result<SymmetricInequality> {
        SymmetricInequality::new(
            self.scenario,
            BigRational::from_integer(normal[0].into()),
            self.multisets
                .iter()
                .zip(&normal[1..])
                .map(|(m, &c)| (m.clone(), BigRational::from_integer(c.into()))),
        )
    }

    /// Normal of `ineq` in homogenized projected coordinates.
    pub fn normal_of(&self, ineq: &SymmetricInequality) -> Result<Vec<i64>> {
        use num_traits::ToPrimitive;
        let to = |c: &BigRational| -> Result<i64> {
            if !c.is_integer() {
                return Err(Error::Parse("non-integer coefficient".into()));
            }
            c.to_integer().to_i64().ok_or(Error::Overflow)
        };
        let mut v = vec![to(ineq.constant())?];
        for m in &self.multisets {
            v.push(to(&ineq.coeff(m))?);
        }
        Ok(v)
    }

    /// Full-space normal `(a0; a_{class(x)})` of a projected normal.
    pub fn lift_normal(&self, normal: &[i64]) -> Vec<i64> {
        let mut v = vec![normal[0]];
        v.extend(self.tuple_class.iter().map(|&c| normal[c + 1]));
        v
    }
}

/// Projected model: distinct projected points plus the full vertices
/// behind each point.
#[derive(Debug, Clone)]
pub struct ProjectedModel {
    pub projection: Projection,
    pub points: Vec<Vec<i64>>,
    /// For each point, indices into the model's extremal list.
    pub preimages: Vec<Vec<usize>>,
}

/// Projects every extremal behavior and merges duplicates.
pub fn project_symmetric(model: &HybridModel) -> ProjectedModel {
    let marg = model.space() == crate::behavior::Space::WithMarginals;
    let projection = Projection::new(*model.scenario(), marg);
    let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
    let mut points = Vec::new();
    let mut preimages: Vec<Vec<usize>> = Vec::new();
    let mut push = |p: Vec<i64>, i: usize| {
        let k = *index.entry(p.clone()).or_insert_with(|| {
            points.push(p);
            preimages.push(Vec::new());
            points.len() - 1
        });
        preimages[k].push(i);
    };
    match model.extremals() {
        Extremals::Signs(v) => {
            for (i, &b) in v.iter().enumerate() {
                push(projection.project_signs(b), i);
            }
        }
        Extremals::Scaled { scale, rows } => {
            for (i, r) in rows.iter().enumerate() {
                push(projection.project_row(r, *scale), i);
            }
        }
    }
    ProjectedModel { projection, points, preimages }
}

fn dot(a: &[i128], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x * y as i128).sum()
}

#[derive(Clone)]
struct DdRay {
    a: Vec<i128>,
    zeros: Vec<u64>,
}

/// Facets of a full-dimensional pointed cone by the double description
/// method: the extreme rays of `{a : a . r >= 0 for all rays r}`.
///
/// Rays are inserted in lexicographic order; adjacency is decided by the
/// combinatorial test (no third ray's zero set contains the common zero set).
pub fn dd_facets(cone: &Cone) -> Result<Vec<FacetCandidate>> {
    let d = cone.dim;
    let r = linalg::rank(cone.rays());
    if r < d {
        return Err(Error::NotFullDimensional { rank: r, dim: d });
    }
    let mut order: Vec<usize> = (0..cone.rays.len()).collect();
    order.sort_by(|&i, &j| cone.rays[i].cmp(&cone.rays[j]));
    order.dedup_by(|a, b| cone.rays[*a] == cone.rays[*b]);
    let rows: Vec<&Vec<i64>> = order.iter().map(|&i| &cone.rays[i]).collect();
    let words = rows.len().div_ceil(64);

    // initial simplicial cone from the first d independent constraints
    let mut mp = linalg::ModpRank::new(d);
    let mut basis: Vec<usize> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if mp.insert(row) {
            basis.push(i);
            if basis.len() == d {
                break;
            }
        }
    }
    if basis.len() < d {
        // mod-p deficiency: fall back to an exact greedy basis
        basis.clear();
        let mut chosen: Vec<Vec<i64>> = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            chosen.push((*row).clone());
            if linalg::rank(&chosen) == chosen.len() {
                basis.push(i);
                if basis.len() == d {
                    break;
                }
            } else {
                chosen.pop();
            }
        }
    }
    // ray k of the initial cone: nullspace of the basis rows minus row k
    let mut rays: Vec<DdRay> = Vec::new();
    for k in 0..d {
        let others: Vec<Vec<i64>> = basis.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, &b)| rows[b].clone()).collect();
        let ns = linalg::nullspace(&others, d);
        debug_assert_eq!(ns.len(), 1);
        let mut a: Vec<i128> = ns[0]
            .iter()
            .map(|x| i128::try_from(x).map_err(|_| Error::Overflow))
            .collect::<Result<_>>()?;
        if dot(&a, rows[basis[k]]) < 0 {
            a.iter_mut().for_each(|x| *x = -*x);
        }
        let mut zeros = vec![0u64; words];
        for (j, &b) in basis.iter().enumerate() {
            if j != k {
                zeros[b / 64] |= 1 << (b % 64);
            }
        }
        rays.push(DdRay { a, zeros });
    }
    let in_basis: Vec<bool> = (0..rows.len()).map(|i| basis.contains(&i)).collect();

    for (i, row) in rows.iter().enumerate() {
        if in_basis[i] {
            continue;
        }
        let vals: Vec<i128> = rays.iter().map(|r| dot(&r.a, row)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| vals[k] > 0).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k] < 0).collect();
        if neg.is_empty() {
            for (k, r) in rays.iter_mut().enumerate() {
                if vals[k] == 0 {
                    r.zeros[i / 64] |= 1 << (i % 64);
                }
            }
            continue;
        }
        let mut next: Vec<DdRay> = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common: Vec<u64> = rays[p].zeros.iter().zip(&rays[q].zeros).map(|(x, y)| x & y).collect();
                let cnt: u32 = common.iter().map(|w| w.count_ones()).sum();
                if (cnt as usize) + 2 < d {
                    continue;
                }
                let blocked = rays.iter().enumerate().any(|(k, r)| {
                    k != p && k != q && r.zeros.iter().zip(&common).all(|(z, c)| z & c == *c)
                });
                if blocked {
                    continue;
                }
                let (vp, vq) = (vals[p], -vals[q]);
                let mut a = Vec::with_capacity(d);
                for t in 0..d {
                    let x = vp
                        .checked_mul(rays[q].a[t])
                        .and_then(|u| vq.checked_mul(rays[p].a[t]).and_then(|w| u.checked_add(w)))
                        .ok_or(Error::Overflow)?;
                    a.push(x);
                }
                linalg::reduce_i128(&mut a);
                let mut zeros = common;
                zeros[i / 64] |= 1 << (i % 64);
                next.push(DdRay { a, zeros });
            }
        }
        for (k, mut r) in rays.into_iter().enumerate() {
            if vals[k] > 0 {
                next.push(r);
            } else if vals[k] == 0 {
                r.zeros[i / 64] |= 1 << (i % 64);
                next.push(r);
            }
        }
        rays = next;
    }

    let mut out = Vec::with_capacity(rays.len());
    for r in rays {
        let normal: Vec<i64> = r.a.iter().map(|&x| i64::try_from(x).map_err(|_| Error::Overflow)).collect::<Result<_>>()?;
        let saturating: Vec<usize> = (0..cone.rays.len())
            .filter(|&k| cone.rays[k].iter().zip(&normal).map(|(x, y)| x * y).sum::<i64>() == 0)
            .collect();
        out.push(FacetCandidate { normal, saturating });
    }
    out.sort_by(|a, b| a.normal.cmp(&b.normal));
    Ok(out)
}

/// Rank of the saturating rays of `normal` among `rays`.
pub fn saturation_rank(normal: &[i64], rays: &[Vec<i64>]) -> usize {
    let sat: Vec<Vec<i64>> = rays
        .iter()
        .filter(|r| r.iter().zip(normal).map(|(x, y)| x * y).sum::<i64>() == 0)
        .cloned()
        .collect();
    linalg::rank(&sat)
}

/// Result of lifting a projected facet to the full cone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftResult {
    /// Rank reached by the saturating full-space rays (capped at d-1).
    pub rank: usize,
    /// `d - 1` for the full cone.
    pub target: usize,
    /// Indices (into the model's extremal list) of independent saturating
    /// vertices certifying the rank.
    pub certificate: Vec<usize>,
}

impl LiftResult {
    pub fn is_facet(&self) -> bool {
        self.rank == self.target
    }
}

/// Lift check: rank of the full-space rays saturating the lifted normal.
pub fn lift_check(candidate: &FacetCandidate, pm: &ProjectedModel, model: &HybridModel) -> LiftResult {
    let full_dim = 1 + pm.projection.tuple_class().len();
    let target = full_dim - 1;
    let (scale, rows) = match model.extremals() {
        Extremals::Signs(_) => (1, None),
        Extremals::Scaled { scale, rows } => (*scale, Some(rows)),
    };
    let sat_vertices: Vec<usize> = pm
        .points
        .iter()
        .enumerate()
        .filter(|(_, p)| p.iter().zip(&candidate.normal).map(|(x, y)| x * y).sum::<i64>() == 0)
        .flat_map(|(k, _)| pm.preimages[k].iter().copied())
        .collect();
    let dtup = pm.projection.tuple_class().len();
    let make_row = |i: usize| -> Vec<i64> {
        let mut v = vec![scale];
        match (model.extremals(), rows) {
            (Extremals::Signs(s), _) => {
                let b = s[i];
                v.extend((0..dtup).map(|j| if b >> j & 1 == 1 { -1 } else { 1 }));
            }
            (_, Some(rows)) => v.extend_from_slice(&rows[i]),
            _ => unreachable!(),
        }
        v
    };
    let iter = sat_vertices.iter().map(|&i| make_row(i));
    let (rank, basis) = certified_rank(iter, full_dim, target);
    LiftResult { rank, target, certificate: basis.iter().map(|&k| sat_vertices[k]).collect() }
}

/// One equivalence class of symmetric facet inequalities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    /// Canonical representative (classical bound folded into the constant).
    #[serde(skip)]
    pub inequality: Option<SymmetricInequality>,
    pub text: String,
    /// Number of projected facets in this class.
    pub class_size: usize,
    /// Rank of saturating projected points (facet certificate: n+1).
    pub projected_rank: usize,
    pub projected_target: usize,
    pub lift: LiftResult,
}

impl CatalogEntry {
    pub fn ineq(&self) -> &SymmetricInequality {
        self.inequality.as_ref().expect("catalog entries carry their inequality")
    }
}

/// Facet catalog of one model.
#[derive(Debug, Clone)]
pub struct Catalog {
    pub scenario: Scenario,
    pub h: CardinalityTuple,
    pub vertices: usize,
    pub projected_points: usize,
    pub raw_facets: usize,
    pub trivial_facets: usize,
    pub entries: Vec<CatalogEntry>,
}

/// Full pipeline: vertices, projection, double description, lift check,
/// canonicalization; single-term (hypercube) facets are dropped.
pub fn enumerate_facets(scenario: Scenario, h: &CardinalityTuple, group: &SymmetryGroup) -> Result<Catalog> {
    let model = HybridModel::full_body(scenario, h.clone())?;
    catalog_from_model(&model, group)
}

pub fn catalog_from_model(model: &HybridModel, group: &SymmetryGroup) -> Result<Catalog> {
    let pm = project_symmetric(model);
    let dim = pm.points[0].len();
    let cone = Cone::new(dim, pm.points.clone())?;
    let facets = dd_facets(&cone)?;
    let mut classes: BTreeMap<Vec<i64>, (SymmetricInequality, usize, Vec<i64>)> = BTreeMap::new();
    let mut trivial = 0;
    for f in &facets {
        let ineq = pm.projection.inequality(&f.normal)?;
        if is_single_term(&ineq) {
            trivial += 1;
            continue;
        }
        let canon = group.canonicalize(&ineq);
        let key = pm.projection.normal_of(&canon)?;
        classes.entry(key).and_modify(|e| e.1 += 1).or_insert((canon, 1, f.normal.clone()));
    }
    let mut entries = Vec::new();
    for (key, (canon, count, _)) in classes {
        let cand = FacetCandidate {
            saturating: (0..pm.points.len())
                .filter(|&k| pm.points[k].iter().zip(&key).map(|(x, y)| x * y).sum::<i64>() == 0)
                .collect(),
            normal: key.clone(),
        };
        let projected_rank = saturation_rank(&key, &pm.points);
        let lift = lift_check(&cand, &pm, model);
        entries.push(CatalogEntry {
            text: canon.to_text(),
            inequality: Some(canon),
            class_size: count,
            projected_rank,
            projected_target: dim - 1,
            lift,
        });
    }
    Ok(Catalog {
        scenario: *model.scenario(),
        h: model.cardinality().clone(),
        vertices: model.len(),
        projected_points: pm.points.len(),
        raw_facets: facets.len(),
        trivial_facets: trivial,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[FacetCandidate]) -> Vec<Vec<i64>> {
        let mut s: Vec<Vec<i64>> = v.iter().map(|f| f.normal.clone()).collect();
        s.sort();
        s
    }

    #[test]
    fn tiny_cones() {
        let c = Cone::new(2, vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(set(&dd_facets(&c).unwrap()), vec![vec![0, 1], vec![1, 0]]);
        let c = Cone::new(3, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(dd_facets(&c).unwrap().len(), 3);
        let flat = Cone::new(3, vec![vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        assert!(matches!(dd_facets(&flat), Err(Error::NotFullDimensional { rank: 2, dim: 3 })));
    }

    #[test]
    fn square_pyramid() {
        // cone over a square: 4 facets, not simplicial
        let c = Cone::new(3, vec![vec![1, 1, 1], vec![1, -1, 1], vec![1, 1, -1], vec![1, -1, -1]]).unwrap();
        let f = dd_facets(&c).unwrap();
        assert_eq!(f.len(), 4);
        for cand in &f {
            assert_eq!(cand.saturating.len(), 2);
        }
    }

    #[test]
    fn cube_facets() {
        // homogenized 3-cube: 6 facets, each saturated by 4 vertices
        let mut rays = Vec::new();
        for b in 0..8 {
            rays.push(vec![1, if b & 1 == 1 { 1 } else { -1 }, if b & 2 == 2 { 1 } else { -1 }, if b & 4 == 4 { 1 } else { -1 }]);
        }
        let f = dd_facets(&Cone::new(4, rays).unwrap()).unwrap();
        assert_eq!(f.len(), 6);
        assert!(f.iter().all(|c| c.saturating.len() == 4));
    }

    #[test]
    fn projection_of_all_plus() {
        let s = Scenario::new(4, 2).unwrap();
        let p = Projection::new(s, false);
        assert_eq!(p.multisets().len(), 5);
        assert_eq!(p.project_signs(0), vec![1, 1, 4, 6, 4, 1]);
    }
}
