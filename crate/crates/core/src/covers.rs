//! Finite covers from permutation monodromy, covering maps, towers, and the
//! lifting experiment for cocycle expansion.
//!
//! A cover of a connected base is specified by a spanning tree of the
//! 1-skeleton and a permutation of the fiber `{0, .., k-1}` on every non-tree
//! edge. The lift of a vertex `v` at fiber index `i` is the total vertex
//! `v * k + i`; the lift of an edge is labelled by the fiber index at its
//! source; the lift of a higher cell is labelled by the fiber index at the
//! smallest vertex of its closure. A cell `s` lifted at `i` has index `s * k + i`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cochain::{codifferential, Cochain};
use crate::complex::{build_complex, CellComplex, Incidence};
use crate::error::{Error, Result};
use crate::expansion::{expansion_auto, subgroup_distance, Algorithm, Lambda, Subgroup, Variant};
use crate::group::{CoefficientGroup, Element};
use crate::metric::CofaceGraph;
use crate::search::Limits;

/// Monodromy data. Edges absent from `perms` carry the identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonodromySpec {
    pub base: String,
    pub fiber: usize,
    pub tree_edges: Vec<usize>,
    #[serde(default)]
    pub perms: BTreeMap<usize, Vec<usize>>,
}

impl MonodromySpec {
    fn perm(&self, edge: usize) -> Option<&[usize]> {
        self.perms.get(&edge).map(Vec::as_slice)
    }

    fn apply(&self, edge: usize, i: usize) -> usize {
        self.perm(edge).map_or(i, |p| p[i])
    }

    fn apply_inverse(&self, edge: usize, j: usize) -> usize {
        match self.perm(edge) {
            Some(p) => p.iter().position(|&x| x == j).expect("validated permutation"),
            None => j,
        }
    }
}

/// Breadth-first spanning tree of the 1-skeleton from vertex 0: the first edge
/// reaching each vertex, scanning cofaces in order.
pub fn spanning_tree(base: &CellComplex) -> Result<Vec<usize>> {
    let v = base.count(0);
    if v == 0 {
        return Err(Error::Disconnected);
    }
    let mut seen = vec![false; v];
    let mut tree = Vec::new();
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(x) = queue.pop_front() {
        if base.dim() == 0 {
            break;
        }
        for &(e, _) in base.cofaces(0, x) {
            for &(y, _) in base.faces(1, e) {
                if !seen[y] {
                    seen[y] = true;
                    tree.push(e);
                    queue.push_back(y);
                }
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Disconnected);
    }
    tree.sort_unstable();
    Ok(tree)
}

fn check_tree(base: &CellComplex, tree: &[usize]) -> Result<()> {
    let v = base.count(0);
    let mut parent: Vec<usize> = (0..v).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    let unique: BTreeSet<usize> = tree.iter().copied().collect();
    if unique.len() != tree.len() {
        return Err(Error::NotSpanningTree("repeated edge".into()));
    }
    for &e in tree {
        base.check_cell(1, e)
            .map_err(|_| Error::NotSpanningTree(format!("edge {e} does not exist")))?;
        let (a, b) = base.edge_endpoints(e)?;
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return Err(Error::NotSpanningTree(format!("edge {e} closes a cycle")));
        }
        parent[ra] = rb;
    }
    if tree.len() + 1 != v {
        return Err(Error::NotSpanningTree(format!("{} edges for {v} vertices", tree.len())));
    }
    Ok(())
}

/// Checks connectivity, the spanning tree, the permutations, and that every
/// 2-cell boundary walk has trivial holonomy.
pub fn validate_monodromy(base: &CellComplex, spec: &MonodromySpec) -> Result<()> {
    spanning_tree(base)?;
    check_tree(base, &spec.tree_edges)?;
    let k = spec.fiber;
    if k == 0 {
        return Err(Error::BadMonodromy("fiber size must be positive".into()));
    }
    let tree: BTreeSet<usize> = spec.tree_edges.iter().copied().collect();
    for (&e, p) in &spec.perms {
        if e >= base.count(1) {
            return Err(Error::BadMonodromy(format!("edge {e} does not exist")));
        }
        if tree.contains(&e) {
            return Err(Error::BadMonodromy(format!("tree edge {e} carries a permutation")));
        }
        let mut sorted = p.clone();
        sorted.sort_unstable();
        if sorted != (0..k).collect::<Vec<_>>() {
            return Err(Error::BadMonodromy(format!(
                "edge {e}: {p:?} is not a permutation of 0..{k}"
            )));
        }
    }
    if base.dim() < 2 {
        return Ok(());
    }
    for cell in 0..base.count(2) {
        for walk in boundary_walks(base, cell)? {
            let perm: Vec<usize> = (0..k)
                .map(|i| {
                    walk.iter().fold(i, |x, &(e, forward)| {
                        if forward {
                            spec.apply(e, x)
                        } else {
                            spec.apply_inverse(e, x)
                        }
                    })
                })
                .collect();
            if perm.iter().enumerate().any(|(i, &x)| i != x) {
                return Err(Error::RelatorNotTrivial {
                    cell,
                    permutation: perm,
                });
            }
        }
    }
    Ok(())
}

/// The boundary of a 2-cell as closed walks of `(edge, forward)` steps.
fn boundary_walks(base: &CellComplex, cell: usize) -> Result<Vec<Vec<(usize, bool)>>> {
    let mut arcs = Vec::new();
    for &(e, c) in base.faces(2, cell) {
        if c.abs() != 1 {
            return Err(Error::BadMonodromy(format!(
                "2-cell {cell} has incidence {c} on edge {e}"
            )));
        }
        let (s, t) = base.edge_endpoints(e)?;
        arcs.push(if c > 0 { (e, true, s, t) } else { (e, false, t, s) });
    }
    let mut used = vec![false; arcs.len()];
    let mut walks = Vec::new();
    while let Some(first) = used.iter().position(|u| !u) {
        used[first] = true;
        let (e, f, start, mut at) = arcs[first];
        let mut walk = vec![(e, f)];
        while at != start {
            let next = (0..arcs.len())
                .find(|&j| !used[j] && arcs[j].2 == at)
                .ok_or_else(|| Error::BadMonodromy(format!("boundary of 2-cell {cell} is not a closed walk")))?;
            used[next] = true;
            walk.push((arcs[next].0, arcs[next].1));
            at = arcs[next].3;
        }
        walks.push(walk);
    }
    Ok(walks)
}

/// A cellular covering map `total -> base`, verified on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringMap {
    pub total: CellComplex,
    pub base: CellComplex,
    pub fiber: usize,
    projection: Vec<Vec<usize>>,
}

impl CoveringMap {
    /// Verifies that `projection` commutes with incidence, that every base cell
    /// has exactly `fiber` preimages, and that cofaces map bijectively.
    pub fn new(total: CellComplex, base: CellComplex, projection: Vec<Vec<usize>>) -> Result<Self> {
        let bad = |m: String| Error::NotACovering(m);
        if total.dim() != base.dim() || projection.len() != total.dim() + 1 {
            return Err(bad("dimensions differ".into()));
        }
        let fiber = if base.count(0) == 0 {
            0
        } else {
            total.count(0) / base.count(0)
        };
        for k in 0..=base.dim() {
            if projection[k].len() != total.count(k) {
                return Err(bad(format!("projection of {k}-cells has the wrong length")));
            }
            let mut hits = vec![0usize; base.count(k)];
            for &b in &projection[k] {
                if b >= base.count(k) {
                    return Err(bad(format!("{k}-cell image {b} out of range")));
                }
                hits[b] += 1;
            }
            if let Some(b) = hits.iter().position(|&h| h != fiber) {
                return Err(bad(format!("{k}-cell {b} has {} preimages, expected {fiber}", hits[b])));
            }
        }
        let image = |k: usize, list: &[(usize, i64)]| -> Vec<(usize, i64)> {
            let mut v: Vec<_> = list.iter().map(|&(c, x)| (projection[k][c], x)).collect();
            v.sort_unstable();
            v
        };
        for k in 0..=base.dim() {
            for s in 0..total.count(k) {
                let b = projection[k][s];
                if k > 0 && image(k - 1, total.faces(k, s)) != base.faces(k, b) {
                    return Err(bad(format!("faces of {k}-cell {s} do not project onto faces of {b}")));
                }
                if k < base.dim() && image(k + 1, total.cofaces(k, s)) != base.cofaces(k, b) {
                    return Err(bad(format!("cofaces of {k}-cell {s} do not map bijectively")));
                }
            }
        }
        Ok(CoveringMap {
            total,
            base,
            fiber,
            projection,
        })
    }

    pub fn project(&self, k: usize, cell: usize) -> usize {
        self.projection[k][cell]
    }

    pub fn projection(&self, k: usize) -> &[usize] {
        &self.projection[k]
    }

    /// `other ∘ self` for `self: X -> Y` and `other: Y -> Z`.
    pub fn then(&self, other: &CoveringMap) -> Result<CoveringMap> {
        if self.base != other.total {
            return Err(Error::ComplexMismatch);
        }
        let projection = self
            .projection
            .iter()
            .enumerate()
            .map(|(k, p)| p.iter().map(|&c| other.projection[k][c]).collect())
            .collect();
        CoveringMap::new(self.total.clone(), other.base.clone(), projection)
    }

    /// Cells `a < b` of `region` in degree `n` with the same image.
    pub fn collisions(&self, n: usize, region: &[usize]) -> Vec<(usize, usize)> {
        let mut first: HashMap<usize, usize> = HashMap::new();
        let mut out = Vec::new();
        let mut cells: Vec<usize> = region.to_vec();
        cells.sort_unstable();
        cells.dedup();
        for c in cells {
            if let Some(&a) = first.get(&self.projection[n][c]) {
                out.push((a, c));
            } else {
                first.insert(self.projection[n][c], c);
            }
        }
        out
    }
}

/// Builds the cover described by `spec`.
pub fn build_cover(base: &CellComplex, spec: &MonodromySpec) -> Result<CoveringMap> {
    validate_monodromy(base, spec)?;
    let k = spec.fiber;
    let top = base.dim();
    let sets = base.vertex_sets();
    let mut counts = vec![0; top + 1];
    let mut incidence: Vec<Vec<Incidence>> = vec![Vec::new(); top + 1];
    let mut projection: Vec<Vec<usize>> = vec![Vec::new(); top + 1];
    for d in 0..=top {
        counts[d] = base.count(d) * k;
        projection[d] = (0..counts[d]).map(|c| c / k).collect();
    }
    let anchor = |d: usize, cell: usize| -> Result<usize> {
        match d {
            0 => Ok(cell),
            1 => Ok(base.edge_endpoints(cell)?.0),
            _ => Ok(sets[d][cell][0]),
        }
    };
    if top >= 1 {
        for e in 0..base.count(1) {
            let (s, t) = base.edge_endpoints(e)?;
            for i in 0..k {
                let j = spec.apply(e, i);
                incidence[1].push(
                    base.faces(1, e)
                        .iter()
                        .map(|&(f, c)| (if f == s { s * k + i } else { t * k + j }, c))
                        .collect(),
                );
            }
        }
    }
    for d in 2..=top {
        for cell in 0..base.count(d) {
            let edges = closure_edges(base, d, cell);
            let a = sets[d][cell][0];
            for i in 0..k {
                let labels = transport(base, spec, &edges, a, i)
                    .ok_or_else(|| Error::BadMonodromy(format!("{d}-cell {cell} does not lift consistently")))?;
                let mut faces = Vec::new();
                for &(f, c) in base.faces(d, cell) {
                    let b = anchor(d - 1, f)?;
                    faces.push((f * k + labels[&b], c));
                }
                incidence[d].push(faces);
            }
        }
    }
    let name = format!("cover({},{k})", base.name());
    let total = build_complex(name, counts, incidence)?;
    CoveringMap::new(total, base.clone(), projection)
}

/// Edges in the closure of a cell.
fn closure_edges(base: &CellComplex, d: usize, cell: usize) -> Vec<usize> {
    let mut level: BTreeSet<usize> = BTreeSet::from([cell]);
    for k in (2..=d).rev() {
        level = level
            .iter()
            .flat_map(|&c| base.faces(k, c).iter().map(|&(f, _)| f))
            .collect();
    }
    level.into_iter().collect()
}

/// Fiber labels of the closure vertices reached from `(a, i)` along `edges`,
/// or `None` if two paths disagree.
fn transport(
    base: &CellComplex,
    spec: &MonodromySpec,
    edges: &[usize],
    a: usize,
    i: usize,
) -> Option<HashMap<usize, usize>> {
    let mut labels = HashMap::from([(a, i)]);
    let ends: Vec<(usize, usize, usize)> = edges
        .iter()
        .map(|&e| {
            let (s, t) = base.edge_endpoints(e).expect("simple edge");
            (e, s, t)
        })
        .collect();
    let mut changed = true;
    while changed {
        changed = false;
        for &(e, s, t) in &ends {
            match (labels.get(&s).copied(), labels.get(&t).copied()) {
                (Some(x), None) => {
                    labels.insert(t, spec.apply(e, x));
                    changed = true;
                }
                (None, Some(y)) => {
                    labels.insert(s, spec.apply_inverse(e, y));
                    changed = true;
                }
                _ => {}
            }
        }
    }
    for &(e, s, t) in &ends {
        if labels.get(&t) != Some(&spec.apply(e, *labels.get(&s)?)) {
            return None;
        }
    }
    Some(labels)
}

/// Cyclic cover of degree `k`: shift by one on `edge`, identity elsewhere.
/// `edge` must lie outside the breadth-first spanning tree.
pub fn cyclic_monodromy(base: &CellComplex, k: usize, edge: usize) -> Result<MonodromySpec> {
    let tree = spanning_tree(base)?;
    if tree.contains(&edge) {
        return Err(Error::BadMonodromy(format!("edge {edge} is a tree edge")));
    }
    let mut perms = BTreeMap::new();
    if k > 1 {
        perms.insert(edge, (0..k).map(|i| (i + 1) % k).collect());
    }
    Ok(MonodromySpec {
        base: base.name().to_string(),
        fiber: k,
        tree_edges: tree,
        perms,
    })
}

/// Mixed-radix encoding of `Z_{f_1} x ... x Z_{f_r}`, first factor most significant.
fn fiber_code(factors: &[usize], x: &[i64]) -> usize {
    factors
        .iter()
        .zip(x)
        .fold(0, |acc, (&f, &v)| acc * f + v.rem_euclid(f as i64) as usize)
}

fn fiber_decode(factors: &[usize], mut code: usize) -> Vec<i64> {
    let mut out = vec![0; factors.len()];
    for (j, &f) in factors.iter().enumerate().rev() {
        out[j] = (code % f) as i64;
        code /= f;
    }
    out
}

/// Abelian cover with fiber `prod Z_{f_j}` and translation monodromy from an
/// integer 1-cocycle given by per-edge vectors. The cocycle is first
/// gauge-fixed to vanish on the spanning tree.
pub fn abelian_monodromy(base: &CellComplex, factors: &[usize], periods: &[Vec<i64>]) -> Result<MonodromySpec> {
    if periods.len() != base.count(1) || periods.iter().any(|p| p.len() != factors.len()) {
        return Err(Error::BadMonodromy("one period vector per edge is required".into()));
    }
    let tree = spanning_tree(base)?;
    // potential along the tree
    let v = base.count(0);
    let mut phi: Vec<Option<Vec<i64>>> = vec![None; v];
    phi[0] = Some(vec![0; factors.len()]);
    let mut changed = true;
    while changed {
        changed = false;
        for &e in &tree {
            let (s, t) = base.edge_endpoints(e)?;
            match (phi[s].clone(), phi[t].clone()) {
                (Some(a), None) => {
                    phi[t] = Some(a.iter().zip(&periods[e]).map(|(x, p)| x + p).collect());
                    changed = true;
                }
                (None, Some(b)) => {
                    phi[s] = Some(b.iter().zip(&periods[e]).map(|(x, p)| x - p).collect());
                    changed = true;
                }
                _ => {}
            }
        }
    }
    let phi: Vec<Vec<i64>> = phi.into_iter().map(|p| p.expect("tree spans")).collect();
    let size: usize = factors.iter().product();
    let tree_set: BTreeSet<usize> = tree.iter().copied().collect();
    let mut perms = BTreeMap::new();
    for e in 0..base.count(1) {
        if tree_set.contains(&e) {
            continue;
        }
        let (s, t) = base.edge_endpoints(e)?;
        let shift: Vec<i64> = (0..factors.len())
            .map(|j| periods[e][j] + phi[s][j] - phi[t][j])
            .collect();
        let perm: Vec<usize> = (0..size)
            .map(|code| {
                let x = fiber_decode(factors, code);
                let y: Vec<i64> = x.iter().zip(&shift).map(|(a, b)| a + b).collect();
                fiber_code(factors, &y)
            })
            .collect();
        if perm.iter().enumerate().any(|(i, &p)| i != p) {
            perms.insert(e, perm);
        }
    }
    Ok(MonodromySpec {
        base: base.name().to_string(),
        fiber: size,
        tree_edges: tree,
        perms,
    })
}

/// Reduction map between abelian covers of the same base built by
/// [`abelian_monodromy`] from the same periods, with fibers `big` and `small`
/// where each `small[j]` divides `big[j]`.
pub fn abelian_reduction(
    total: &CoveringMap,
    big: &[usize],
    target: &CoveringMap,
    small: &[usize],
) -> Result<CoveringMap> {
    if total.base != target.base || big.len() != small.len() || big.iter().zip(small).any(|(b, s)| b % s != 0) {
        return Err(Error::BadParameters("fibers are not compatible".into()));
    }
    let kb: usize = big.iter().product();
    let ks: usize = small.iter().product();
    let projection = (0..=total.total.dim())
        .map(|d| {
            (0..total.total.count(d))
                .map(|c| {
                    let (cell, code) = (c / kb, c % kb);
                    cell * ks + fiber_code(small, &fiber_decode(big, code))
                })
                .collect()
        })
        .collect();
    CoveringMap::new(total.total.clone(), target.total.clone(), projection)
}

fn torus_periods(torus: &CellComplex, which: &[usize]) -> Vec<Vec<i64>> {
    crate::generators::torus2_periods(torus)
        .into_iter()
        .map(|p| which.iter().map(|&j| p[j]).collect())
        .collect()
}

/// The `k x k` abelian cover of the 7-vertex torus (fiber `Z_k x Z_k`).
pub fn torus2_cover(k: usize) -> Result<CoveringMap> {
    let t = crate::generators::torus2();
    let spec = abelian_monodromy(&t, &[k, k], &torus_periods(&t, &[0, 1]))?;
    let mut map = build_cover(&t, &spec)?;
    map.total = map.total.with_name(format!("torus2_cover{k}x{k}"));
    Ok(map)
}

/// The cyclic `k`-fold cover of the 7-vertex torus unwrapping the first period.
pub fn torus2_cyclic_cover(k: usize) -> Result<CoveringMap> {
    let t = crate::generators::torus2();
    let spec = abelian_monodromy(&t, &[k], &torus_periods(&t, &[0]))?;
    let mut map = build_cover(&t, &spec)?;
    map.total = map.total.with_name(format!("torus2_cyclic{k}"));
    Ok(map)
}

/// A finite stand-in for a residual tower: the deepest complex `top` together
/// with covering maps from it onto each level, shallowest level first.
#[derive(Debug, Clone)]
pub struct Tower {
    pub top: CellComplex,
    pub levels: Vec<CoveringMap>,
}

impl Tower {
    /// Builds a chain `X_0 <- X_1 <- ...` by repeated cyclic covers; `base` is
    /// `X_0` and each factor is the degree of the next step. The last level is
    /// the top.
    pub fn cyclic_chain(base: &CellComplex, degrees: &[usize]) -> Result<Tower> {
        let mut steps: Vec<CoveringMap> = Vec::new();
        let mut current = base.clone();
        for &k in degrees {
            let tree = spanning_tree(&current)?;
            let edge = (0..current.count(1))
                .rev()
                .find(|e| !tree.contains(e))
                .ok_or_else(|| Error::BadParameters("level has no non-tree edge".into()))?;
            let map = build_cover(&current, &cyclic_monodromy(&current, k, edge)?)?;
            current = map.total.clone();
            steps.push(map);
        }
        let top = current;
        // maps from the top onto each proper level
        let mut levels = Vec::new();
        for i in 0..steps.len() {
            let mut map = steps[steps.len() - 1].clone();
            for step in steps[i..steps.len() - 1].iter().rev() {
                map = map.then(step)?;
            }
            levels.push(map);
        }
        Ok(Tower { top, levels })
    }

    /// Tower of `k x k` torus covers for the given `ks`, all dominated by the
    /// `top_k x top_k` cover; every `k` must divide `top_k`.
    pub fn torus(ks: &[usize], top_k: usize) -> Result<Tower> {
        let top = torus2_cover(top_k)?;
        let mut levels = Vec::new();
        for &k in ks {
            let target = torus2_cover(k)?;
            levels.push(abelian_reduction(&top, &[top_k, top_k], &target, &[k, k])?);
        }
        Ok(Tower { top: top.total, levels })
    }

    pub fn level_names(&self) -> Vec<String> {
        self.levels.iter().map(|m| m.base.name().to_string()).collect()
    }
}

/// Pushes a cochain forward along a map that is injective on `region`
/// (which must contain the support).
pub fn project_cochain(map: &CoveringMap, c: &Cochain, region: &[usize]) -> Result<Cochain> {
    if !c.belongs_to(&map.total) {
        return Err(Error::ComplexMismatch);
    }
    let n = c.degree();
    let mut region: Vec<usize> = region.to_vec();
    region.extend(c.support());
    let clashes = map.collisions(n, &region);
    if !clashes.is_empty() {
        return Err(Error::NotInjectiveOnRegion(clashes));
    }
    Cochain::from_values(&map.base, n, c.group(), c.iter().map(|(s, v)| (map.project(n, s), v)))
}

/// Pulls `z` back to the unique preimages of its support inside `region`.
pub fn lift_cochain(map: &CoveringMap, z: &Cochain, region: &[usize]) -> Result<Cochain> {
    let n = z.degree();
    let clashes = map.collisions(n, region);
    if !clashes.is_empty() {
        return Err(Error::NotInjectiveOnRegion(clashes));
    }
    let inverse: HashMap<usize, usize> = region.iter().map(|&s| (map.project(n, s), s)).collect();
    let mut values = Vec::new();
    for (b, v) in z.iter() {
        let s = inverse
            .get(&b)
            .ok_or_else(|| Error::BadParameters(format!("cell {b} has no preimage in the region")))?;
        values.push((*s, v));
    }
    Cochain::from_values(&map.total, n, z.group(), values)
}

/// How a lifting experiment was carried out at a level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftMode {
    /// The `(R/lambda + 1)`-neighbourhood of `supp c` maps injectively.
    Radius,
    /// Only the 1-neighbourhood of `supp c ∪ supp z` maps injectively; the
    /// lifted cochain is verified directly.
    Local,
    /// `c = 0`.
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelAttempt {
    pub level: usize,
    pub name: String,
    pub lambda: Option<Lambda>,
    /// `floor(R / lambda) + 1`.
    pub required_radius: Option<usize>,
    pub radius_injective: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LiftOutcome {
    Lifted {
        level: usize,
        mode: LiftMode,
        /// `d(c', z')` on the level.
        base_distance: usize,
        /// `d(c, z)` on the top.
        distance: usize,
        z_support: Vec<usize>,
        z_is_cocycle: bool,
        inequality_holds: bool,
    },
    NoInjectiveLevel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiftingReport {
    pub top: String,
    pub n: usize,
    pub coeff: CoefficientGroup,
    pub c_support: Vec<usize>,
    /// `R = |d* c|`.
    pub r: usize,
    pub attempts: Vec<LevelAttempt>,
    pub outcome: LiftOutcome,
}

impl LiftingReport {
    /// Lifted, `z` a cocycle, distances equal, inequality holds; or trivially true.
    pub fn holds(&self) -> bool {
        matches!(
            self.outcome,
            LiftOutcome::Lifted {
                z_is_cocycle: true,
                inequality_holds: true,
                base_distance,
                distance,
                ..
            } if base_distance == distance
        )
    }
}

fn required_radius(r: usize, lambda: &Lambda) -> Option<usize> {
    match lambda {
        Lambda::Finite(l) if *l.numer() > 0 => {
            let q = Ratio::new(r as u64, 1) / *l;
            Some((q.to_integer() + 1) as usize)
        }
        _ => None,
    }
}

/// Runs the lifting argument for cocycle expansion between the top of a tower
/// and its levels. `lambdas[i]` is the exact cocycle-expansion constant of
/// level `i` in degree `n`, or `None` if unknown (the level is skipped).
pub fn lifting_experiment(
    tower: &Tower,
    c: &Cochain,
    lambdas: &[Option<Lambda>],
    limits: &Limits,
) -> Result<LiftingReport> {
    if !c.belongs_to(&tower.top) {
        return Err(Error::ComplexMismatch);
    }
    if lambdas.len() != tower.levels.len() {
        return Err(Error::BadParameters("one lambda per level is required".into()));
    }
    let n = c.degree();
    let group = c.group().clone();
    let top = &tower.top;
    let r = codifferential(top, c)?.hamming_norm();
    let supp = c.support();
    let mut report = LiftingReport {
        top: top.name().to_string(),
        n,
        coeff: group.clone(),
        c_support: supp.clone(),
        r,
        attempts: Vec::new(),
        outcome: LiftOutcome::NoInjectiveLevel,
    };
    if c.is_zero() {
        report.outcome = LiftOutcome::Lifted {
            level: 0,
            mode: LiftMode::Trivial,
            base_distance: 0,
            distance: 0,
            z_support: Vec::new(),
            z_is_cocycle: true,
            inequality_holds: true,
        };
        return Ok(report);
    }
    let graph = CofaceGraph::new(top, n, &group);
    let dist = graph.distances_from(&supp);
    let ball = |radius: usize| -> Vec<usize> {
        (0..top.count(n))
            .filter(|&x| dist[x].is_some_and(|d| d <= radius))
            .collect()
    };
    for (i, (map, lambda)) in tower.levels.iter().zip(lambdas).enumerate() {
        let radius = lambda.as_ref().and_then(|l| required_radius(r, l));
        let injective = radius.is_some_and(|rad| map.collisions(n, &ball(rad)).is_empty());
        report.attempts.push(LevelAttempt {
            level: i,
            name: map.base.name().to_string(),
            lambda: *lambda,
            required_radius: radius,
            radius_injective: injective,
        });
    }
    // the radius condition at the shallowest level possible, then local checks
    let order: Vec<(usize, LiftMode)> = report
        .attempts
        .iter()
        .filter(|a| a.radius_injective)
        .map(|a| (a.level, LiftMode::Radius))
        .chain(
            report
                .attempts
                .iter()
                .filter(|a| a.lambda.is_some_and(|l| !l.is_zero() && l != Lambda::Infinite))
                .map(|a| (a.level, LiftMode::Local)),
        )
        .collect();
    for (i, mode) in order {
        let map = &tower.levels[i];
        let lambda = lambdas[i].expect("filtered");
        let Ok(c_base) = project_cochain(map, c, &supp) else {
            continue;
        };
        if codifferential(&map.base, &c_base)?.hamming_norm() != r {
            continue;
        }
        let near = subgroup_distance(
            &map.base,
            &c_base,
            Subgroup::Cocycles,
            Algorithm::BranchAndBound,
            limits,
        )?;
        let z_base = &near.minimizers[0];
        let region = match mode {
            LiftMode::Radius => ball(report.attempts[i].required_radius.expect("radius mode")),
            _ => ball(near.distance),
        };
        // every cell of supp z' needs exactly one preimage in the region
        let mut pre: HashMap<usize, Vec<usize>> = HashMap::new();
        for &s in &region {
            pre.entry(map.project(n, s)).or_default().push(s);
        }
        if z_base.support().iter().any(|b| pre.get(b).map_or(0, Vec::len) != 1) {
            continue;
        }
        let values: Vec<_> = z_base.iter().map(|(b, v)| (pre[&b][0], v)).collect();
        let z = Cochain::from_values(top, n, &group, values)?;
        if mode == LiftMode::Local {
            let mut core = supp.clone();
            core.extend(z.support());
            if !map.collisions(n, &graph.neighbourhood(&core, 1)?).is_empty() {
                continue;
            }
        }
        let z_is_cocycle = codifferential(top, &z)?.is_zero();
        let distance = c.hamming_distance(&z)?;
        let inequality_holds = lambda.bounds(r, distance);
        if z_is_cocycle && distance == near.distance && !inequality_holds {
            return Err(Error::CertificateViolated(format!(
                "level {i}: |d*c| = {r} < {lambda} * {distance}"
            )));
        }
        if !z_is_cocycle || distance != near.distance {
            if mode == LiftMode::Radius {
                return Err(Error::CertificateViolated(format!(
                    "level {i}: lift through an injective neighbourhood is not a nearest cocycle"
                )));
            }
            continue;
        }
        report.outcome = LiftOutcome::Lifted {
            level: i,
            mode,
            base_distance: near.distance,
            distance,
            z_support: z.support(),
            z_is_cocycle,
            inequality_holds,
        };
        return Ok(report);
    }
    Ok(report)
}

/// Largest `r` such that the `r`-ball around `cell` maps injectively, capped at `max_r`.
pub fn injectivity_radius(map: &CoveringMap, n: usize, group: &CoefficientGroup, cell: usize, max_r: usize) -> usize {
    let graph = CofaceGraph::new(&map.total, n, group);
    let dist = graph.distances_from(&[cell]);
    let mut best = 0;
    for r in 0..=max_r {
        let ball: Vec<usize> = (0..map.total.count(n))
            .filter(|&x| dist[x].is_some_and(|d| d <= r))
            .collect();
        if map.collisions(n, &ball).is_empty() {
            best = r;
        } else {
            break;
        }
    }
    best
}

/// Exact cocycle expansion constants of each level in degree `n`; `None`
/// where the enumeration exceeds the limits.
pub fn level_lambdas(
    tower: &Tower,
    n: usize,
    group: &CoefficientGroup,
    limits: &Limits,
) -> Result<Vec<Option<Lambda>>> {
    tower
        .levels
        .iter()
        .map(|m| match expansion_auto(&m.base, n, group, Variant::Cocycle, limits) {
            Ok(r) => Ok(Some(r.lambda)),
            Err(Error::TableTooLarge { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

/// A random nonzero cochain supported in the `radius`-ball around a random cell.
pub fn random_local_cochain<R: Rng>(
    x: &CellComplex,
    n: usize,
    group: &CoefficientGroup,
    radius: usize,
    rng: &mut R,
) -> Result<Cochain> {
    let graph = CofaceGraph::new(x, n, group);
    let centre = rng.gen_range(0..x.count(n));
    let ball = graph.neighbourhood(&[centre], radius)?;
    let nonzero: Vec<Element> = group.nonzero_elements().collect();
    loop {
        let mut values: Vec<(usize, Element)> = Vec::new();
        for &c in &ball {
            if rng.gen_bool(0.5) {
                values.push((c, nonzero[rng.gen_range(0..nonzero.len())]));
            }
        }
        if !values.is_empty() {
            return Cochain::from_values(x, n, group, values);
        }
    }
}

/// `count` cochains from [`random_local_cochain`] with a seeded generator.
pub fn sample_local_cochains(
    x: &CellComplex,
    n: usize,
    group: &CoefficientGroup,
    radius: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<Cochain>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_local_cochain(x, n, group, radius, &mut rng))
        .collect()
}
