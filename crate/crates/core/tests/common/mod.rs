//! Brute-force oracles shared by the integration tests. Each works straight
//! from the incidence lists and enumerates whole cochain spaces, so it only
//! scales to tiny complexes.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};

use cobound::generators::{cycle, random_lm, rp2, simplex_boundary, simplex_skeleton, sphere, torus2, torus3};
use cobound::{CellComplex, Cochain, CoefficientGroup, Element};
use num_rational::Ratio;

/// Every generator family at test scale.
pub fn generator_zoo() -> Vec<CellComplex> {
    let mut out = Vec::new();
    for m in 3..=8 {
        out.push(cycle(m).unwrap());
    }
    for (m, k) in [(3, 1), (4, 1), (5, 1), (4, 2), (5, 2)] {
        out.push(simplex_skeleton(m, k).unwrap());
    }
    for m in 2..=4 {
        out.push(simplex_boundary(m).unwrap());
    }
    for n in 1..=3 {
        out.push(sphere(n).unwrap());
    }
    out.push(torus2());
    out.push(torus3().unwrap());
    out.push(rp2());
    out.push(random_lm(7, 2, 0.5, 1).unwrap());
    out.push(random_lm(6, 3, 0.4, 2).unwrap());
    out
}

pub fn elements(g: &CoefficientGroup) -> Vec<Element> {
    g.elements().collect()
}

/// `(d* c)(t) = sum over faces s of t of [t:s] c(s)`.
pub fn codiff(x: &CellComplex, n: usize, g: &CoefficientGroup, c: &[Element]) -> Vec<Element> {
    (0..x.count(n + 1))
        .map(|t| {
            x.faces(n + 1, t)
                .iter()
                .fold(Element::default(), |acc, &(s, k)| g.add(acc, g.scale(k, c[s])))
        })
        .collect()
}

/// `(d q)(s) = sum over cofaces t of s of [t:s] q(t)`, for a `k`-chain `q`.
pub fn diff(x: &CellComplex, k: usize, g: &CoefficientGroup, q: &[Element]) -> Vec<Element> {
    let mut out = vec![Element::default(); x.count(k - 1)];
    for (t, &v) in q.iter().enumerate() {
        for &(s, c) in x.faces(k, t) {
            out[s] = g.add(out[s], g.scale(c, v));
        }
    }
    out
}

pub fn weight(v: &[Element]) -> usize {
    v.iter().filter(|e| !e.is_zero()).count()
}

pub fn sub(g: &CoefficientGroup, a: &[Element], b: &[Element]) -> Vec<Element> {
    a.iter().zip(b).map(|(&x, &y)| g.sub(x, y)).collect()
}

/// All `|A|^len` vectors, in odometer order.
pub fn all_vectors(g: &CoefficientGroup, len: usize) -> Vec<Vec<Element>> {
    let el = elements(g);
    let q = el.len();
    let total = q.pow(len as u32);
    (0..total)
        .map(|mut i| {
            (0..len)
                .map(|_| {
                    let e = el[i % q];
                    i /= q;
                    e
                })
                .collect()
        })
        .collect()
}

/// `Z^n` by filtering every cochain.
pub fn cocycles(x: &CellComplex, n: usize, g: &CoefficientGroup) -> Vec<Vec<Element>> {
    all_vectors(g, x.count(n))
        .into_iter()
        .filter(|c| n == x.dim() || weight(&codiff(x, n, g, c)) == 0)
        .collect()
}

/// `B^n` as the image of every `(n-1)`-cochain.
pub fn coboundaries(x: &CellComplex, n: usize, g: &CoefficientGroup) -> Vec<Vec<Element>> {
    if n == 0 {
        return vec![vec![Element::default(); x.count(0)]];
    }
    let set: HashSet<Vec<Element>> = all_vectors(g, x.count(n - 1))
        .iter()
        .map(|b| codiff(x, n - 1, g, b))
        .collect();
    let mut v: Vec<_> = set.into_iter().collect();
    v.sort();
    v
}

pub fn distance_to(g: &CoefficientGroup, c: &[Element], subgroup: &[Vec<Element>]) -> usize {
    subgroup.iter().map(|s| weight(&sub(g, c, s))).min().unwrap()
}

/// Expansion constant by scanning every cochain; `None` means infinite.
/// Cocycle distances use `c + Z^n = {c' : d* c' = d* c}`, so the distance of
/// `c` is the least weight among all cochains sharing its coboundary.
pub fn lambda(x: &CellComplex, n: usize, g: &CoefficientGroup, coboundary: bool) -> Option<Ratio<u64>> {
    let all = all_vectors(g, x.count(n));
    let syndrome = |c: &Vec<Element>| if n == x.dim() { Vec::new() } else { codiff(x, n, g, c) };
    let distances: Vec<usize> = if coboundary && n > 0 {
        let b = coboundaries(x, n, g);
        all.iter().map(|c| distance_to(g, c, &b)).collect()
    } else {
        let mut least: HashMap<Vec<Element>, usize> = HashMap::new();
        for c in &all {
            let w = least.entry(syndrome(c)).or_insert(usize::MAX);
            *w = (*w).min(weight(c));
        }
        all.iter().map(|c| least[&syndrome(c)]).collect()
    };
    let mut best: Option<Ratio<u64>> = None;
    for (c, &d) in all.iter().zip(&distances) {
        if d == 0 {
            continue;
        }
        let r = Ratio::new(weight(&syndrome(c)) as u64, d as u64);
        if best.is_none_or(|b| r < b) {
            best = Some(r);
        }
    }
    best
}

/// Minimal weight of a `(k+1)`-chain with boundary `p`, or `None` if there is none.
pub fn min_filling(x: &CellComplex, k: usize, g: &CoefficientGroup, p: &[Element]) -> Option<usize> {
    all_vectors(g, x.count(k + 1))
        .iter()
        .filter(|q| diff(x, k + 1, g, q) == p)
        .map(|q| weight(q))
        .min()
}

/// Coboundary-metric distances: two `n`-cells are adjacent when the
/// coboundaries of their indicator cochains share a cell.
pub fn coface_distances(x: &CellComplex, n: usize, g: &CoefficientGroup, source: usize) -> Vec<Option<usize>> {
    let cells = x.count(n);
    let supports: Vec<HashSet<usize>> = (0..cells)
        .map(|a| {
            let mut ind = vec![Element::default(); cells];
            ind[a] = g.one();
            if n == x.dim() {
                return HashSet::new();
            }
            let d = codiff(x, n, g, &ind);
            (0..d.len()).filter(|&t| !d[t].is_zero()).collect()
        })
        .collect();
    let mut dist = vec![None; cells];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(a) = queue.pop_front() {
        for b in 0..cells {
            if b != a && dist[b].is_none() && !supports[a].is_disjoint(&supports[b]) {
                dist[b] = Some(dist[a].unwrap() + 1);
                queue.push_back(b);
            }
        }
    }
    dist
}

pub fn dense(c: &Cochain, len: usize) -> Vec<Element> {
    c.to_dense(len)
}
