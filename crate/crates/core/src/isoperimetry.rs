//! Minimal fillings of cycles, the expander filling pipeline on dual
//! complexes, homological Dehn profiles, and dimension-0 witnesses in towers.

use std::collections::VecDeque;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cochain::{codifferential, differential, Chain, Cochain, CochainFile, FactorSolver, SparseMap};
use crate::complex::CellComplex;
use crate::duality::DualStructure;
use crate::error::{Error, Result};
use crate::expansion::{random_cochain, subgroup_distance, Algorithm, Lambda, Subgroup};
use crate::group::{CoefficientGroup, Element};
use crate::metric::CofaceGraph;
use crate::search::{min_weight_preimages, Budget, Limits, MapAccum, Preimages, Z2MapAccum};

/// Kernels up to this size are enumerated outright.
const KERNEL_ENUMERATION_LIMIT: u128 = 1 << 20;

/// A filling `q` with `d q = p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filling {
    pub q: Chain,
    pub norm: usize,
    /// `false` when the search budget ran out and `norm` is only an upper bound.
    pub exact: bool,
}

/// Weight and entries of a filling, or the spent budget on overrun.
type Search = std::result::Result<Option<(usize, Vec<(usize, Element)>)>, u64>;

fn key_and_search<A: crate::search::Accumulator>(
    acc: &A,
    group: &CoefficientGroup,
    x: &CellComplex,
    p: &Chain,
    q0: &Chain,
    budget: &mut Budget,
) -> Search {
    let k = p.degree();
    let upper = q0.hamming_norm();
    let target = acc.key_of(q0.iter());
    // components of a minimal filling all touch a coface of supp p
    let seeds: Vec<usize> = {
        let mut s: Vec<usize> = p
            .support()
            .iter()
            .flat_map(|&t| x.cofaces(k, t).iter().map(|&(c, _)| c))
            .collect();
        s.sort_unstable();
        s.dedup();
        s
    };
    let dist = face_graph_distances(x, k + 1, group, &seeds);
    for w in 1..upper {
        let ball: Vec<usize> = (0..x.count(k + 1))
            .filter(|&c| dist[c].is_some_and(|d| d < w))
            .collect();
        if let Preimages::Found { weight, solutions, .. } =
            min_weight_preimages(acc, group, &ball, &target, w, w, 1, budget)?
        {
            return Ok(Some((weight, solutions[0].pairs().collect())));
        }
    }
    Ok(None)
}

/// BFS distances between `d`-cells adjacent through a shared `(d-1)`-face whose
/// coefficients the group does not annihilate.
fn face_graph_distances(x: &CellComplex, d: usize, group: &CoefficientGroup, seeds: &[usize]) -> Vec<Option<usize>> {
    let mut dist = vec![None; x.count(d)];
    let mut queue = VecDeque::new();
    for &s in seeds {
        if dist[s].is_none() {
            dist[s] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let du = dist[u].expect("queued");
        for &(f, a) in x.faces(d, u) {
            if group.annihilates(a) {
                continue;
            }
            for &(v, b) in x.cofaces(d - 1, f) {
                if !group.annihilates(b) && dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
    }
    dist
}

/// Minimum Hamming-norm chain `q` with `d q = p`.
pub fn min_filling(x: &CellComplex, p: &Chain, limits: &Limits) -> Result<Filling> {
    if !p.belongs_to(x) {
        return Err(Error::ComplexMismatch);
    }
    let k = p.degree();
    let group = p.group().clone();
    if !differential(x, p)?.is_zero() {
        return Err(Error::NotACycle);
    }
    if k + 1 > x.dim() {
        return if p.is_zero() {
            Err(Error::DegreeOutOfRange {
                degree: k + 1,
                top: x.dim(),
            })
        } else {
            Err(Error::NotABoundary)
        };
    }
    let solver = FactorSolver::new(SparseMap::differential(x, k + 1), &group);
    let q0 = solver.solve(&p.to_dense(x.count(k))).ok_or(Error::NotABoundary)?;
    let gens = solver.kernel_generators();
    let kernel: u128 = gens
        .iter()
        .map(|g| g.1 as u128)
        .try_fold(1u128, |a, o| a.checked_mul(o))
        .unwrap_or(u128::MAX);

    let q = if kernel <= KERNEL_ENUMERATION_LIMIT {
        let best = enumerate_coset(&group, &q0, &gens);
        Filling {
            norm: best.iter().filter(|v| !v.is_zero()).count(),
            q: Cochain::from_dense(x, k + 1, &group, &best),
            exact: true,
        }
    } else {
        let start = Cochain::from_dense(x, k + 1, &group, &q0);
        let upper = start.hamming_norm();
        let mut budget = Budget::new(limits.node_budget);
        let map = SparseMap::differential(x, k + 1);
        let found = match group.is_z2().then(|| Z2MapAccum::new(map)).flatten() {
            Some(acc) => key_and_search(&acc, &group, x, p, &start, &mut budget),
            None => key_and_search(&MapAccum::new(map, &group), &group, x, p, &start, &mut budget),
        };
        match found {
            Ok(Some((norm, pairs))) => Filling {
                q: Cochain::from_values(x, k + 1, &group, pairs)?,
                norm,
                exact: true,
            },
            Ok(None) => Filling {
                q: start,
                norm: upper,
                exact: true,
            },
            Err(_) => Filling {
                q: start,
                norm: upper,
                exact: false,
            },
        }
    };
    if differential(x, &q.q)? != *p {
        return Err(Error::CertificateViolated(
            "filling does not have the requested boundary".into(),
        ));
    }
    Ok(q)
}

/// Minimum of `q0 + ker` by (weight, support, values). Steps an odometer over
/// the kernel generators, adding one generator per digit change.
fn enumerate_coset(group: &CoefficientGroup, q0: &[Element], gens: &[(Vec<Element>, u64)]) -> Vec<Element> {
    let gens: Vec<&(Vec<Element>, u64)> = gens.iter().filter(|g| g.1 > 1).collect();
    let mut cur = q0.to_vec();
    let mut weight = cur.iter().filter(|v| !v.is_zero()).count();
    let mut best = cur.clone();
    let mut best_weight = weight;
    let mut digits = vec![0u64; gens.len()];
    let key = |v: &[Element]| -> Vec<(usize, u32)> {
        v.iter()
            .enumerate()
            .filter(|(_, e)| !e.is_zero())
            .map(|(i, e)| (i, e.code()))
            .collect()
    };
    loop {
        let mut i = gens.len();
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            for (slot, &g) in cur.iter_mut().zip(&gens[i].0) {
                if !g.is_zero() {
                    let was = !slot.is_zero();
                    *slot = group.add(*slot, g);
                    match (was, !slot.is_zero()) {
                        (true, false) => weight -= 1,
                        (false, true) => weight += 1,
                        _ => {}
                    }
                }
            }
            digits[i] += 1;
            if digits[i] < gens[i].1 {
                break;
            }
            digits[i] = 0;
        }
        if weight < best_weight || (weight == best_weight && key(&cur) < key(&best)) {
            best.clone_from(&cur);
            best_weight = weight;
        }
    }
}

/// Norms and intermediate cochains of one expander filling run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FillingCertificate {
    pub lambda: Lambda,
    pub p_norm: usize,
    pub r_norm: usize,
    pub c_norm: usize,
    pub z_norm: usize,
    pub z_prime: CochainFile,
    pub q_norm: usize,
    pub boundary_matches: bool,
    pub bound_holds: bool,
    pub r_equals_c: bool,
    pub p_equals_z: bool,
}

impl FillingCertificate {
    pub fn holds(&self) -> bool {
        self.boundary_matches && self.bound_holds && self.r_equals_c && self.p_equals_z
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpanderFilling {
    pub q: Chain,
    pub r: Chain,
    pub certificate: FillingCertificate,
}

/// Fills a dual 1-boundary `p` through the primal cochain complex: any filling
/// `r`, its dual cochain `c`, a nearest `(n-2)`-cocycle `z'` to `c`, and
/// `q` dual to `c - z'`. `lambda` is the cocycle expansion constant of the
/// primal complex in degree `n-2`. Fails with `CertificateViolated` when a
/// bookkeeping identity or `|q| <= |p| / lambda` does not hold.
pub fn expander_filling(ds: &DualStructure, lambda: Lambda, p: &Chain, limits: &Limits) -> Result<ExpanderFilling> {
    let dual = ds.dual();
    let primal = ds.primal();
    if p.degree() != 1 || ds.dim() < 2 {
        return Err(Error::BadParameters(
            "expander filling takes a 1-chain on the dual of a manifold of dimension >= 2".into(),
        ));
    }
    if lambda.is_zero() {
        return Err(Error::BadParameters("lambda must be positive".into()));
    }
    let z_of_p = ds.chain_to_cochain(p)?;
    if !differential(dual, p)?.is_zero() {
        return Err(Error::NotACycle);
    }
    let group = p.group().clone();
    let solver = FactorSolver::new(SparseMap::differential(dual, 2), &group);
    let r_dense = solver.solve(&p.to_dense(dual.count(1))).ok_or(Error::NotABoundary)?;
    let r = Cochain::from_dense(dual, 2, &group, &r_dense);
    let c = ds.chain_to_cochain(&r)?;
    let z = codifferential(primal, &c)?;
    let near = subgroup_distance(primal, &c, Subgroup::Cocycles, Algorithm::BranchAndBound, limits)?;
    let z_prime = near.minimizers[0].clone();
    let q = ds.cochain_to_chain(&c.sub(&z_prime)?)?;
    let certificate = FillingCertificate {
        lambda,
        p_norm: p.hamming_norm(),
        r_norm: r.hamming_norm(),
        c_norm: c.hamming_norm(),
        z_norm: z.hamming_norm(),
        z_prime: z_prime.to_file(),
        q_norm: q.hamming_norm(),
        boundary_matches: differential(dual, &q)? == *p,
        bound_holds: lambda.bounds(p.hamming_norm(), q.hamming_norm()),
        r_equals_c: r.hamming_norm() == c.hamming_norm(),
        p_equals_z: z == z_of_p && p.hamming_norm() == z.hamming_norm(),
    };
    if !certificate.holds() {
        return Err(Error::CertificateViolated(format!("{certificate:?}")));
    }
    Ok(ExpanderFilling { q, r, certificate })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DehnRecord {
    pub cycle_id: usize,
    pub p_norm: usize,
    pub q_norm: usize,
    pub exact: bool,
    pub q: CochainFile,
}

impl DehnRecord {
    pub fn ratio(&self) -> Option<Ratio<u64>> {
        (self.p_norm > 0).then(|| Ratio::new(self.q_norm as u64, self.p_norm as u64))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DehnProfile {
    pub records: Vec<DehnRecord>,
    /// `max |q| / |p|` over records with `p != 0`; `None` when there are none.
    #[serde(serialize_with = "ser_ratio")]
    pub kappa: Option<Ratio<u64>>,
    pub exact: bool,
}

fn ser_ratio<S: serde::Serializer>(r: &Option<Ratio<u64>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&format!("{}/{}", r.numer(), r.denom())),
        None => s.serialize_none(),
    }
}

pub const DEHN_CSV_HEADER: &str = "cycle_id,p_norm,q_norm,exact,ratio";

impl DehnProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(DEHN_CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let ratio = r
                .ratio()
                .map_or(String::new(), |x| format!("{}/{}", x.numer(), x.denom()));
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.cycle_id, r.p_norm, r.q_norm, r.exact, ratio
            ));
        }
        out
    }
}

fn dehn_record(x: &CellComplex, i: usize, p: &Chain, limits: &Limits) -> Result<DehnRecord> {
    let f = if p.is_zero() {
        Filling {
            q: Cochain::zero(x, (p.degree() + 1).min(x.dim()), p.group()),
            norm: 0,
            exact: true,
        }
    } else {
        min_filling(x, p, limits)?
    };
    Ok(DehnRecord {
        cycle_id: i,
        p_norm: p.hamming_norm(),
        q_norm: f.norm,
        exact: f.exact,
        q: f.q.to_file(),
    })
}

/// Profile of minimal fillings for the given `k`-cycles, computed in parallel
/// and reported in input order.
pub fn dehn_profile(x: &CellComplex, cycles: &[Chain], limits: &Limits) -> Result<DehnProfile> {
    let records: Vec<DehnRecord> = if limits.workers > 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(limits.workers)
            .build()
            .map_err(|e| Error::BadParameters(e.to_string()))?
            .install(|| {
                cycles
                    .par_iter()
                    .enumerate()
                    .map(|(i, p)| dehn_record(x, i, p, limits))
                    .collect::<Result<_>>()
            })?
    } else {
        cycles
            .iter()
            .enumerate()
            .map(|(i, p)| dehn_record(x, i, p, limits))
            .collect::<Result<_>>()?
    };
    let kappa = records.iter().filter_map(DehnRecord::ratio).max();
    let exact = records.iter().all(|r| r.exact);
    Ok(DehnProfile { records, kappa, exact })
}

/// `count` random `k`-boundaries `d s` of sparse `(k+1)`-chains `s`, seeded.
pub fn sample_boundaries(
    x: &CellComplex,
    group: &CoefficientGroup,
    k: usize,
    count: usize,
    density: f64,
    seed: u64,
) -> Result<Vec<Chain>> {
    if k + 1 > x.dim() {
        return Err(Error::DegreeOutOfRange {
            degree: k + 1,
            top: x.dim(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut s = random_cochain(x, k + 1, group, density, &mut rng);
            if s.is_zero() {
                let cell = rng.gen_range(0..x.count(k + 1));
                s = Cochain::indicator(x, k + 1, group, &[cell])?;
            }
            differential(x, &s)
        })
        .collect()
}

/// A 0-cycle of norm 2 whose minimal filling exceeds `1 / kappa`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZeroDimWitness {
    pub level: usize,
    pub complex: String,
    pub u: usize,
    pub v: usize,
    pub distance: usize,
    pub p: CochainFile,
    pub p_norm: usize,
    pub filling_norm: usize,
    pub filling: CochainFile,
    pub threshold: String,
}

/// Scans `levels` from the shallowest for a graph diameter exceeding
/// `1 / kappa`, takes the lexicographically first farthest vertex pair
/// `(u, v)`, and certifies the minimal filling of `v - u`.
pub fn zero_dim_witness(
    levels: &[CellComplex],
    kappa: Ratio<u64>,
    group: &CoefficientGroup,
    limits: &Limits,
) -> Result<ZeroDimWitness> {
    if *kappa.numer() == 0 {
        return Err(Error::BadParameters("kappa must be positive".into()));
    }
    let threshold = format!("{}/{}", kappa.denom(), kappa.numer());
    let mut max_diameter = 0;
    for (level, x) in levels.iter().enumerate() {
        let graph = CofaceGraph::new(x, 0, group);
        let mut far: Option<(usize, usize, usize)> = None;
        for u in 0..x.count(0) {
            let dist = graph.distances_from(&[u]);
            for (v, d) in dist.iter().enumerate().skip(u + 1) {
                if let Some(d) = *d {
                    if far.is_none_or(|(fd, _, _)| d > fd) {
                        far = Some((d, u, v));
                    }
                }
            }
        }
        let Some((distance, u, v)) = far else { continue };
        max_diameter = max_diameter.max(distance);
        // distance > 1 / kappa
        if (distance as u128) * (*kappa.numer() as u128) <= *kappa.denom() as u128 {
            continue;
        }
        let p = Cochain::from_values(x, 0, group, [(v, group.one()), (u, group.neg(group.one()))])?;
        let f = min_filling(x, &p, limits)?;
        if !f.exact || (f.norm as u128) * (*kappa.numer() as u128) <= *kappa.denom() as u128 {
            return Err(Error::CertificateViolated(format!(
                "filling of norm {} between vertices at distance {distance} does not exceed {threshold}",
                f.norm
            )));
        }
        return Ok(ZeroDimWitness {
            level,
            complex: x.name().to_string(),
            u,
            v,
            distance,
            p_norm: p.hamming_norm(),
            p: p.to_file(),
            filling_norm: f.norm,
            filling: f.q.to_file(),
            threshold,
        });
    }
    Err(Error::TowerTooShallow {
        max_diameter,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::Tower;
    use crate::duality::dual_complex;
    use crate::expansion::expansion_constant;
    use crate::expansion::Variant;
    use crate::generators::{cycle, simplex_boundary};

    #[test]
    fn triangle_boundary_fills_with_one_triangle() {
        let s2 = simplex_boundary(3).unwrap();
        let z2 = CoefficientGroup::z2();
        let t = Cochain::indicator(&s2, 2, &z2, &[0]).unwrap();
        let p = differential(&s2, &t).unwrap();
        let f = min_filling(&s2, &p, &Limits::default()).unwrap();
        assert_eq!((f.norm, f.exact), (1, true));
        assert_eq!(f.q, t);
        let zero = Cochain::zero(&s2, 1, &z2);
        assert_eq!(min_filling(&s2, &zero, &Limits::default()).unwrap().norm, 0);
    }

    #[test]
    fn homology_is_reported() {
        let c4 = cycle(4).unwrap();
        let z2 = CoefficientGroup::z2();
        let all = Cochain::indicator(&c4, 1, &z2, &[0, 1, 2, 3]).unwrap();
        assert_eq!(
            min_filling(&c4, &all, &Limits::default()).unwrap_err(),
            Error::NotABoundary
        );
        let one = Cochain::indicator(&c4, 0, &z2, &[0]).unwrap();
        assert_eq!(
            min_filling(&c4, &one, &Limits::default()).unwrap_err(),
            Error::NotABoundary
        );
        let edge = Cochain::indicator(&c4, 1, &z2, &[0]).unwrap();
        assert_eq!(
            min_filling(&c4, &edge, &Limits::default()).unwrap_err(),
            Error::NotACycle
        );
    }

    #[test]
    fn antipodal_fill_is_half_girth() {
        let z2 = CoefficientGroup::z2();
        for m in [6, 12, 18] {
            let c = cycle(m).unwrap();
            let p = Cochain::indicator(&c, 0, &z2, &[0, m / 2]).unwrap();
            assert_eq!(min_filling(&c, &p, &Limits::default()).unwrap().norm, m / 2);
        }
    }

    #[test]
    fn search_path_matches_enumeration() {
        let c = cycle(10).unwrap();
        let z3 = CoefficientGroup::cyclic(3).unwrap();
        let p = Cochain::from_values(&c, 0, &z3, [(1, z3.one()), (4, z3.neg(z3.one()))]).unwrap();
        let x = min_filling(&c, &p, &Limits::default()).unwrap();
        let gens = FactorSolver::new(SparseMap::differential(&c, 1), &z3).kernel_generators();
        assert_eq!(gens.len(), 1);
        // the long way round as the starting filling
        let long = Cochain::from_values(&c, 1, &z3, (4..10).chain(0..1).map(|e| (e, z3.one()))).unwrap();
        assert_eq!(differential(&c, &long).unwrap(), p);
        let mut budget = Budget::new(1 << 20);
        let acc = MapAccum::new(SparseMap::differential(&c, 1), &z3);
        let (w, pairs) = key_and_search(&acc, &z3, &c, &p, &long, &mut budget).unwrap().unwrap();
        assert_eq!((x.norm, w), (3, 3));
        assert_eq!(Cochain::from_values(&c, 1, &z3, pairs).unwrap(), x.q);
    }

    #[test]
    fn expander_filling_on_the_three_sphere() {
        let s3 = simplex_boundary(4).unwrap();
        let ds = dual_complex(&s3).unwrap();
        let z2 = CoefficientGroup::z2();
        let lambda = expansion_constant(&s3, 1, &z2, Variant::Cocycle, &Limits::default())
            .unwrap()
            .lambda;
        let face = Cochain::indicator(ds.dual(), 2, &z2, &[3]).unwrap();
        let p = differential(ds.dual(), &face).unwrap();
        let out = expander_filling(&ds, lambda, &p, &Limits::default()).unwrap();
        assert!(out.certificate.holds());
        assert_eq!(differential(ds.dual(), &out.q).unwrap(), p);
        let zero = Cochain::zero(ds.dual(), 1, &z2);
        assert_eq!(
            expander_filling(&ds, lambda, &zero, &Limits::default())
                .unwrap()
                .certificate
                .q_norm,
            0
        );
    }

    #[test]
    fn dehn_profile_of_the_two_sphere() {
        let s2 = simplex_boundary(3).unwrap();
        let z2 = CoefficientGroup::z2();
        let cycles = sample_boundaries(&s2, &z2, 1, 20, 0.4, 7).unwrap();
        let prof = dehn_profile(&s2, &cycles, &Limits::default()).unwrap();
        assert_eq!(prof.records.len(), 20);
        assert!(prof.kappa.is_some_and(|k| k <= Ratio::from_integer(1)));
        let zeros = vec![Cochain::zero(&s2, 1, &z2); 3];
        let prof = dehn_profile(&s2, &zeros, &Limits::default()).unwrap();
        assert_eq!(prof.kappa, None);
        assert!(prof.to_csv().starts_with(DEHN_CSV_HEADER));
    }

    #[test]
    fn witness_in_the_cycle_tower() {
        let tower = Tower::cyclic_chain(&cycle(3).unwrap(), &[4, 2]).unwrap();
        let mut levels: Vec<CellComplex> = tower.levels.iter().map(|m| m.base.clone()).collect();
        levels.push(tower.top.clone());
        let z2 = CoefficientGroup::z2();
        let w = zero_dim_witness(&levels, Ratio::new(1, 5), &z2, &Limits::default()).unwrap();
        assert_eq!((w.level, w.distance, w.filling_norm, w.p_norm), (1, 6, 6, 2));
        assert!(zero_dim_witness(&levels, Ratio::new(1, 1), &z2, &Limits::default()).is_ok());
        assert_eq!(
            zero_dim_witness(&levels, Ratio::new(1, 100), &z2, &Limits::default()).unwrap_err(),
            Error::TowerTooShallow {
                max_diameter: 12,
                threshold: "100/1".into()
            }
        );
    }
}
