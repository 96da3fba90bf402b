//! Weight-ordered coset-leader enumeration.
//!
//! All exact minimizations in this crate reduce to the same problem: given a
//! group homomorphism `phi` from the cochains on a set of cells, find the
//! minimum-weight vectors with a prescribed image. An [`Accumulator`] maintains
//! `phi(e)` incrementally while `e` is enumerated in order of increasing weight,
//! supports in lexicographic order, and values in code order within a support.
//! The first vector seen with a given image is its coset leader.

use std::collections::HashMap;
use std::hash::Hash;

use rayon::prelude::*;

use crate::cochain::SparseMap;
use crate::error::{Error, Result};
use crate::group::{CoefficientGroup, Element};
use crate::linalg::Diagonalization;

/// Incrementally maintained image of a vector under a homomorphism.
pub trait Accumulator: Sync {
    type Key: Clone + Eq + Hash + Send + Sync;

    fn zero(&self) -> Self::Key;

    /// Updates `key` for changing the value on `cell` from `old` to `new`.
    fn apply(&self, key: &mut Self::Key, cell: usize, old: Element, new: Element);

    /// Numerator weight associated with a key (Hamming norm of the image).
    fn weight(&self, key: &Self::Key) -> usize;

    fn key_of(&self, values: impl IntoIterator<Item = (usize, Element)>) -> Self::Key {
        let mut k = self.zero();
        for (c, v) in values {
            self.apply(&mut k, c, Element::ZERO, v);
        }
        k
    }
}

/// Image under an integer sparse map, for any coefficient group.
pub struct MapAccum {
    group: CoefficientGroup,
    codomain: usize,
    columns: Vec<Vec<(usize, i64)>>,
}

impl MapAccum {
    pub fn new(map: SparseMap<'_>, group: &CoefficientGroup) -> Self {
        MapAccum {
            group: group.clone(),
            codomain: map.codomain,
            columns: map.columns.to_vec(),
        }
    }
}

impl Accumulator for MapAccum {
    type Key = Box<[u16]>;

    fn zero(&self) -> Self::Key {
        vec![0u16; self.codomain].into_boxed_slice()
    }

    #[inline]
    fn apply(&self, key: &mut Self::Key, cell: usize, old: Element, new: Element) {
        let g = &self.group;
        for &(t, k) in &self.columns[cell] {
            let cur = Element(key[t] as u32);
            let next = g.add(g.sub(cur, g.scale(k, old)), g.scale(k, new));
            key[t] = next.0 as u16;
        }
    }

    fn weight(&self, key: &Self::Key) -> usize {
        key.iter().filter(|&&v| v != 0).count()
    }
}

/// Bit-packed image over Z_2 for codomains of at most 128 cells.
pub struct Z2MapAccum {
    columns: Vec<u128>,
}

impl Z2MapAccum {
    pub fn new(map: SparseMap<'_>) -> Option<Self> {
        if map.codomain > 128 {
            return None;
        }
        let columns = map
            .columns
            .iter()
            .map(|col| {
                col.iter()
                    .filter(|(_, k)| k % 2 != 0)
                    .fold(0u128, |acc, (t, _)| acc ^ (1u128 << t))
            })
            .collect();
        Some(Z2MapAccum { columns })
    }
}

impl Accumulator for Z2MapAccum {
    type Key = u128;

    fn zero(&self) -> u128 {
        0
    }

    #[inline]
    fn apply(&self, key: &mut u128, cell: usize, old: Element, new: Element) {
        if old != new {
            *key ^= self.columns[cell];
        }
    }

    fn weight(&self, key: &u128) -> usize {
        key.count_ones() as usize
    }
}

/// Class of a vector modulo the image of a map, through the obstruction
/// functionals of a diagonalization per cyclic factor. Two vectors have equal
/// keys iff their difference lies in the image.
pub struct QuotientAccum {
    group: CoefficientGroup,
    slots: usize,
    /// per cell: (slot, factor, coefficient, modulus)
    columns: Vec<Vec<(usize, usize, i64, u32)>>,
}

impl QuotientAccum {
    /// Quotient of the codomain of `map` by its image.
    pub fn new(map: SparseMap<'_>, group: &CoefficientGroup) -> Self {
        let cells = map.codomain;
        let mut columns = vec![Vec::new(); cells];
        let mut slots = 0;
        for (f, &m) in group.factors().iter().enumerate() {
            let d = Diagonalization::new(&map.mod_matrix(m));
            for (row, modulus) in d.obstructions() {
                for (cell, &coef) in row.iter().enumerate() {
                    if coef != 0 {
                        columns[cell].push((slots, f, coef, modulus));
                    }
                }
                slots += 1;
            }
        }
        QuotientAccum {
            group: group.clone(),
            slots,
            columns,
        }
    }

    /// Quotient of all cochains by the trivial subgroup (the identity class map).
    pub fn trivial(cells: usize, group: &CoefficientGroup) -> Self {
        let mut columns = vec![Vec::new(); cells];
        let mut slots = 0;
        for (f, &m) in group.factors().iter().enumerate() {
            for (cell, col) in columns.iter_mut().enumerate() {
                col.push((f * cells + cell, f, 1, m));
            }
            slots += cells;
        }
        QuotientAccum {
            group: group.clone(),
            slots,
            columns,
        }
    }
}

impl Accumulator for QuotientAccum {
    type Key = Box<[u16]>;

    fn zero(&self) -> Self::Key {
        vec![0u16; self.slots].into_boxed_slice()
    }

    #[inline]
    fn apply(&self, key: &mut Self::Key, cell: usize, old: Element, new: Element) {
        for &(slot, f, coef, modulus) in &self.columns[cell] {
            let delta = self.group.component(new, f) as i64 - self.group.component(old, f) as i64;
            key[slot] = (key[slot] as i64 + coef * delta).rem_euclid(modulus as i64) as u16;
        }
    }

    fn weight(&self, _key: &Self::Key) -> usize {
        0
    }
}

/// Class key from `A`, numerator weight from `B`.
pub struct Pair<A, B>(pub A, pub B);

impl<A: Accumulator, B: Accumulator> Accumulator for Pair<A, B> {
    type Key = (A::Key, B::Key);

    fn zero(&self) -> Self::Key {
        (self.0.zero(), self.1.zero())
    }

    #[inline]
    fn apply(&self, key: &mut Self::Key, cell: usize, old: Element, new: Element) {
        self.0.apply(&mut key.0, cell, old, new);
        self.1.apply(&mut key.1, cell, old, new);
    }

    fn weight(&self, key: &Self::Key) -> usize {
        self.1.weight(&key.1)
    }
}

/// A sparse vector given by sorted support and matching values.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SparseVec {
    pub support: Vec<usize>,
    pub values: Vec<Element>,
}

impl SparseVec {
    pub fn weight(&self) -> usize {
        self.support.len()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, Element)> + '_ {
        self.support.iter().copied().zip(self.values.iter().copied())
    }
}

/// Resource limits shared by the searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum `|A|^(cells)` for a full table.
    pub table_limit: u64,
    /// Maximum number of enumerated vectors for bounded searches.
    pub node_budget: u64,
    /// Worker threads for table construction; results never depend on it.
    pub workers: usize,
    /// Maximum number of minimizers reported.
    pub cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            table_limit: 1 << 22,
            node_budget: 1 << 28,
            workers: 1,
            cap: 64,
        }
    }
}

/// `|A|^cells`, saturating.
pub fn space_size(group: &CoefficientGroup, cells: usize) -> u128 {
    let q = group.order() as u128;
    let mut s: u128 = 1;
    for _ in 0..cells {
        s = s.saturating_mul(q);
    }
    s
}

pub fn check_table_size(group: &CoefficientGroup, cells: usize, limits: &Limits) -> Result<()> {
    let size = space_size(group, cells);
    if size > limits.table_limit as u128 {
        return Err(Error::TableTooLarge {
            size_desc: format!("|{}|^{cells}", group),
            limit: limits.table_limit,
        });
    }
    Ok(())
}

/// Visits every vector of exactly `weight` nonzero entries whose support lies
/// in `cells` and whose first support cell is `cells[first]`. Returns the number
/// of vectors visited, or `None` if `visit` asked to stop.
fn visit_weight_with_first<A, F>(
    acc: &A,
    group: &CoefficientGroup,
    cells: &[usize],
    weight: usize,
    first: usize,
    visit: &mut F,
) -> Option<u64>
where
    A: Accumulator,
    F: FnMut(&[usize], &[Element], &A::Key) -> bool,
{
    let q = group.order();
    let one = Element(1);
    let mut support = Vec::with_capacity(weight);
    let mut values = Vec::with_capacity(weight);
    let mut key = acc.zero();
    let mut count = 0u64;

    fn leaf<A: Accumulator, F: FnMut(&[usize], &[Element], &A::Key) -> bool>(
        acc: &A,
        q: u32,
        support: &[usize],
        values: &mut [Element],
        key: &mut A::Key,
        count: &mut u64,
        visit: &mut F,
    ) -> bool {
        loop {
            *count += 1;
            if !visit(support, values, key) {
                return false;
            }
            // odometer, last position fastest
            let mut pos = values.len();
            loop {
                if pos == 0 {
                    // wrapped around: every position is back at 1
                    return true;
                }
                pos -= 1;
                let old = values[pos];
                let new = if old.0 + 1 < q { Element(old.0 + 1) } else { Element(1) };
                acc.apply(key, support[pos], old, new);
                values[pos] = new;
                if new.0 != 1 {
                    break;
                }
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn rec<A: Accumulator, F: FnMut(&[usize], &[Element], &A::Key) -> bool>(
        acc: &A,
        q: u32,
        cells: &[usize],
        start: usize,
        weight: usize,
        support: &mut Vec<usize>,
        values: &mut Vec<Element>,
        key: &mut A::Key,
        count: &mut u64,
        visit: &mut F,
    ) -> bool {
        if support.len() == weight {
            return leaf(acc, q, support, values, key, count, visit);
        }
        let need = weight - support.len();
        for i in start..cells.len() {
            if cells.len() - i < need {
                break;
            }
            let c = cells[i];
            acc.apply(key, c, Element::ZERO, Element(1));
            support.push(c);
            values.push(Element(1));
            let go = rec(acc, q, cells, i + 1, weight, support, values, key, count, visit);
            support.pop();
            values.pop();
            acc.apply(key, c, Element(1), Element::ZERO);
            if !go {
                return false;
            }
        }
        true
    }

    if weight == 0 {
        count += 1;
        return visit(&support, &values, &key).then_some(count);
    }
    let c = cells[first];
    acc.apply(&mut key, c, Element::ZERO, one);
    support.push(c);
    values.push(one);
    let go = rec(
        acc,
        q,
        cells,
        first + 1,
        weight,
        &mut support,
        &mut values,
        &mut key,
        &mut count,
        visit,
    );
    go.then_some(count)
}

/// Node counter for bounded searches.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub limit: u64,
    pub used: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }
}

/// Outcome of a bounded minimum-weight preimage search.
#[derive(Debug, Clone)]
pub enum Preimages {
    /// Minimum weight and the lexicographically first solutions at that weight
    /// (at most `cap`), plus whether the list is complete.
    Found {
        weight: usize,
        solutions: Vec<SparseVec>,
        complete: bool,
    },
    /// No solution with support in the allowed cells up to the maximum weight.
    None,
}

/// Smallest-weight vectors `e` with support in `cells` and `acc(e) == target`,
/// searching weights `min_weight..=max_weight`.
#[allow(clippy::too_many_arguments)]
pub fn min_weight_preimages<A: Accumulator>(
    acc: &A,
    group: &CoefficientGroup,
    cells: &[usize],
    target: &A::Key,
    min_weight: usize,
    max_weight: usize,
    cap: usize,
    budget: &mut Budget,
) -> std::result::Result<Preimages, u64> {
    for w in min_weight..=max_weight.min(cells.len()) {
        let mut sols = Vec::new();
        let mut complete = true;
        let firsts = if w == 0 { 1 } else { cells.len() + 1 - w };
        for first in 0..firsts {
            let mut over = false;
            let mut visit = |s: &[usize], v: &[Element], k: &A::Key| {
                budget.used += 1;
                if budget.used > budget.limit {
                    over = true;
                    return false;
                }
                if k == target {
                    if sols.len() < cap {
                        sols.push(SparseVec {
                            support: s.to_vec(),
                            values: v.to_vec(),
                        });
                    } else {
                        complete = false;
                        return false;
                    }
                }
                true
            };
            let finished = visit_weight_with_first(acc, group, cells, w, first, &mut visit);
            if over {
                return Err(budget.used);
            }
            if finished.is_none() {
                break;
            }
        }
        if !sols.is_empty() {
            return Ok(Preimages::Found {
                weight: w,
                solutions: sols,
                complete,
            });
        }
    }
    Ok(Preimages::None)
}

/// Best ratio seen so far: numerator weight over leader weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioWitness {
    pub numerator: usize,
    pub denominator: usize,
    pub leader: SparseVec,
}

impl RatioWitness {
    fn better_than(&self, other: &RatioWitness) -> bool {
        (self.numerator as u128) * (other.denominator as u128) < (other.numerator as u128) * (self.denominator as u128)
    }
}

/// Coset-leader table: every class key reachable, with its leader weight.
pub struct LeaderTable<K> {
    pub weights: HashMap<K, u32>,
    /// Minimum of `weight(key) / leader weight` over classes with positive leader weight.
    pub best: Option<RatioWitness>,
    /// Number of vectors enumerated.
    pub visited: u64,
}

/// Enumerates vectors in weight order until `class_count` distinct keys have
/// been seen (or the whole space is exhausted).
pub fn build_leader_table<A: Accumulator>(
    acc: &A,
    group: &CoefficientGroup,
    cells: usize,
    class_count: u128,
    limits: &Limits,
) -> Result<LeaderTable<A::Key>> {
    check_table_size(group, cells, limits)?;
    let all: Vec<usize> = (0..cells).collect();
    let mut weights: HashMap<A::Key, u32> = HashMap::new();
    weights.insert(acc.zero(), 0);
    let mut best: Option<RatioWitness> = None;
    let mut visited = 1u64;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(limits.workers.max(1))
        .build()
        .map_err(|e| Error::BadParameters(e.to_string()))?;

    for w in 1..=cells {
        if weights.len() as u128 >= class_count {
            break;
        }
        let seen = &weights;
        let task = |first: usize| {
            let mut local: HashMap<A::Key, ()> = HashMap::new();
            let mut order: Vec<A::Key> = Vec::new();
            let mut local_best: Option<RatioWitness> = None;
            let mut visit = |s: &[usize], v: &[Element], k: &A::Key| {
                if !seen.contains_key(k) && !local.contains_key(k) {
                    local.insert(k.clone(), ());
                    order.push(k.clone());
                    let cand = RatioWitness {
                        numerator: acc.weight(k),
                        denominator: s.len(),
                        leader: SparseVec {
                            support: s.to_vec(),
                            values: v.to_vec(),
                        },
                    };
                    if local_best.as_ref().is_none_or(|b| cand.better_than(b)) {
                        local_best = Some(cand);
                    }
                }
                true
            };
            let n = visit_weight_with_first(acc, group, &all, w, first, &mut visit).unwrap_or(0);
            (order, local_best, n)
        };
        let firsts: Vec<usize> = (0..=cells - w).collect();
        let results: Vec<_> = if limits.workers <= 1 {
            firsts.into_iter().map(task).collect()
        } else {
            pool.install(|| firsts.into_par_iter().map(task).collect())
        };
        for (keys, local_best, n) in results {
            visited += n;
            for k in keys {
                weights.entry(k).or_insert(w as u32);
            }
            if let Some(c) = local_best {
                if best.as_ref().is_none_or(|b| c.better_than(b)) {
                    best = Some(c);
                }
            }
        }
    }
    Ok(LeaderTable { weights, best, visited })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::cycle;

    #[test]
    fn enumeration_order_and_counts() {
        let z3 = CoefficientGroup::cyclic(3).unwrap();
        let acc = QuotientAccum::trivial(3, &z3);
        let cells = [0, 1, 2];
        let mut seen = Vec::new();
        for first in 0..2 {
            visit_weight_with_first(
                &acc,
                &z3,
                &cells,
                2,
                first,
                &mut |s: &[usize], v: &[Element], _k: &_| {
                    seen.push((s.to_vec(), v.iter().map(|e| e.0).collect::<Vec<_>>()));
                    true
                },
            );
        }
        // 3 supports x 4 value pairs
        assert_eq!(seen.len(), 12);
        let mut sorted = seen.clone();
        sorted.sort();
        assert_eq!(seen, sorted);
    }

    #[test]
    fn cycle_leader_table_over_z2() {
        let c6 = cycle(6).unwrap();
        let z2 = CoefficientGroup::z2();
        let map = SparseMap::codifferential(&c6, 0);
        let acc = Z2MapAccum::new(map).unwrap();
        // image of d* on vertices of a connected graph has index 2
        let table = build_leader_table(&acc, &z2, 6, 32, &Limits::default()).unwrap();
        assert_eq!(table.weights.len(), 32);
        let best = table.best.unwrap();
        assert_eq!((best.numerator, best.denominator), (2, 3));
        assert_eq!(best.leader.support, vec![0, 1, 2]);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let c8 = cycle(8).unwrap();
        let z3 = CoefficientGroup::cyclic(3).unwrap();
        let acc = MapAccum::new(SparseMap::codifferential(&c8, 0), &z3);
        let one = build_leader_table(&acc, &z3, 8, 3u128.pow(7), &Limits::default()).unwrap();
        let four = build_leader_table(
            &acc,
            &z3,
            8,
            3u128.pow(7),
            &Limits {
                workers: 4,
                ..Limits::default()
            },
        )
        .unwrap();
        assert_eq!(one.best, four.best);
        assert_eq!(one.weights, four.weights);
    }

    #[test]
    fn quotient_keys_detect_image() {
        let c4 = cycle(4).unwrap();
        let z4 = CoefficientGroup::cyclic(4).unwrap();
        // B^1 of the square: class key of an edge indicator is nonzero
        let acc = QuotientAccum::new(SparseMap::codifferential(&c4, 0), &z4);
        let e = acc.key_of([(0usize, Element(1))]);
        assert_ne!(e, acc.zero());
        // d*(1_{v0}) is in the image
        let d: Vec<(usize, Element)> = c4
            .cofaces(0, 0)
            .iter()
            .map(|&(s, k)| (s, z4.scale(k, Element(1))))
            .collect();
        assert_eq!(acc.key_of(d), acc.zero());
    }

    #[test]
    fn budget_is_enforced() {
        let c8 = cycle(8).unwrap();
        let z2 = CoefficientGroup::z2();
        let acc = Z2MapAccum::new(SparseMap::codifferential(&c8, 0)).unwrap();
        let cells: Vec<usize> = (0..8).collect();
        let target = acc.key_of([(0, Element(1)), (4, Element(1))]);
        let mut budget = Budget::new(5);
        assert!(min_weight_preimages(&acc, &z2, &cells, &target, 0, 8, 4, &mut budget).is_err());
        let mut budget = Budget::new(1_000);
        match min_weight_preimages(&acc, &z2, &cells, &target, 0, 8, 4, &mut budget).unwrap() {
            Preimages::Found { weight, solutions, .. } => {
                assert_eq!(weight, 2);
                assert_eq!(solutions[0].support, vec![0, 4]);
            }
            Preimages::None => panic!("expected a solution"),
        }
    }
}
