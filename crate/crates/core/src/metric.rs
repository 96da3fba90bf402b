//! The coboundary metric on the `n`-cells of a complex.
//!
//! Two distinct `n`-cells are adjacent when the coboundaries of their
//! indicators share a cell, i.e. they have a common `(n+1)`-coface whose
//! incidence coefficients are not annihilated by the coefficient group.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::complex::CellComplex;
use crate::error::{Error, Result};
use crate::group::CoefficientGroup;

/// Adjacency graph of the coboundary metric in one degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CofaceGraph {
    degree: usize,
    adjacency: Vec<Vec<usize>>,
}

impl CofaceGraph {
    pub fn new(complex: &CellComplex, degree: usize, group: &CoefficientGroup) -> Self {
        let cells = complex.count(degree);
        let mut adjacency = vec![BTreeSet::new(); cells];
        if degree < complex.dim() {
            for s in 0..complex.count(degree + 1) {
                let faces: Vec<usize> = complex
                    .faces(degree + 1, s)
                    .iter()
                    .filter(|&&(_, k)| !group.annihilates(k))
                    .map(|&(t, _)| t)
                    .collect();
                for (i, &a) in faces.iter().enumerate() {
                    for &b in &faces[i + 1..] {
                        adjacency[a].insert(b);
                        adjacency[b].insert(a);
                    }
                }
            }
        }
        CofaceGraph {
            degree,
            adjacency: adjacency.into_iter().map(|s| s.into_iter().collect()).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbours(&self, cell: usize) -> &[usize] {
        &self.adjacency[cell]
    }

    fn check(&self, cell: usize) -> Result<()> {
        if cell < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownCell { dim: self.degree, cell })
        }
    }

    /// Edges `a < b` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
    }

    /// BFS distances from a set of sources; `None` means unreachable.
    pub fn distances_from(&self, sources: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u].expect("queued cells have a distance");
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Coboundary distance; `None` when the cells lie in different components.
    pub fn distance(&self, a: usize, b: usize) -> Result<Option<usize>> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.distances_from(&[a])[b])
    }

    /// All cells within distance `r` of `seeds`, sorted.
    pub fn neighbourhood(&self, seeds: &[usize], r: usize) -> Result<Vec<usize>> {
        for &s in seeds {
            self.check(s)?;
        }
        Ok(self
            .distances_from(seeds)
            .iter()
            .enumerate()
            .filter(|(_, d)| d.is_some_and(|d| d <= r))
            .map(|(c, _)| c)
            .collect())
    }

    /// Connected components of the subgraph induced on `cells`. Each component
    /// is sorted and components are ordered by their smallest cell.
    pub fn components(&self, cells: &[usize]) -> Result<Vec<Vec<usize>>> {
        for &c in cells {
            self.check(c)?;
        }
        let inside: BTreeSet<usize> = cells.iter().copied().collect();
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in &inside {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = vec![start];
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for &v in &self.adjacency[u] {
                    if inside.contains(&v) && seen.insert(v) {
                        comp.push(v);
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        Ok(out)
    }

    /// Plain-text edge list: a `# coface graph` header line, then one `a b` per line.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("# coface graph degree={} cells={}\n", self.degree, self.len());
        for (a, b) in self.edges() {
            writeln!(s, "{a} {b}").expect("writing to a String");
        }
        s
    }
}

pub fn coface_graph(complex: &CellComplex, n: usize, group: &CoefficientGroup) -> CofaceGraph {
    CofaceGraph::new(complex, n, group)
}

pub fn coboundary_distance(
    complex: &CellComplex,
    n: usize,
    group: &CoefficientGroup,
    a: usize,
    b: usize,
) -> Result<Option<usize>> {
    CofaceGraph::new(complex, n, group).distance(a, b)
}

pub fn coboundary_components(
    complex: &CellComplex,
    n: usize,
    group: &CoefficientGroup,
    cells: &[usize],
) -> Result<Vec<Vec<usize>>> {
    CofaceGraph::new(complex, n, group).components(cells)
}

pub fn metric_neighbourhood(
    complex: &CellComplex,
    n: usize,
    group: &CoefficientGroup,
    seeds: &[usize],
    r: usize,
) -> Result<Vec<usize>> {
    CofaceGraph::new(complex, n, group).neighbourhood(seeds, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_complex;
    use crate::generators::{cycle, simplex_boundary};

    #[test]
    fn tetrahedron_edges() {
        let s2 = simplex_boundary(3).unwrap();
        let z2 = CoefficientGroup::z2();
        let g = coface_graph(&s2, 1, &z2);
        // each edge lies in two triangles and shares one with each of 4 others
        assert!((0..6).all(|e| g.neighbours(e).len() == 4));
        let one = metric_neighbourhood(&s2, 1, &z2, &[0], 1).unwrap();
        assert_eq!(one.len(), 5);
        assert_eq!(
            coboundary_components(&s2, 1, &z2, &(0..6).collect::<Vec<_>>())
                .unwrap()
                .len(),
            1
        );
        assert_eq!(metric_neighbourhood(&s2, 1, &z2, &[2], 0).unwrap(), vec![2]);
    }

    #[test]
    fn top_degree_is_edgeless() {
        let s2 = simplex_boundary(3).unwrap();
        let z2 = CoefficientGroup::z2();
        let g = coface_graph(&s2, 2, &z2);
        assert_eq!(g.edges().count(), 0);
        assert_eq!(g.distance(0, 1).unwrap(), None);
        assert_eq!(g.distance(3, 3).unwrap(), Some(0));
        assert_eq!(
            g.components(&[0, 1, 2, 3]).unwrap(),
            vec![vec![0], vec![1], vec![2], vec![3]]
        );
        assert!(g.components(&[]).unwrap().is_empty());
    }

    #[test]
    fn degree_zero_is_the_graph() {
        let c4 = cycle(4).unwrap();
        let g = coface_graph(&c4, 0, &CoefficientGroup::z2());
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 3), (1, 2), (2, 3)]);
        assert_eq!(g.distance(0, 2).unwrap(), Some(2));
        assert_eq!(g.distance(0, 9).unwrap_err().kind(), "UnknownCell");
    }

    #[test]
    fn annihilated_coefficients_do_not_connect() {
        // two loops at one vertex and a 2-cell running twice around the first
        let x = build_complex(
            "wedge",
            vec![1, 2, 1],
            vec![vec![], vec![vec![], vec![]], vec![vec![(0, 2), (1, 1)]]],
        )
        .unwrap();
        let z2 = CoefficientGroup::z2();
        let z3 = CoefficientGroup::cyclic(3).unwrap();
        assert!(coface_graph(&x, 1, &z2).neighbours(0).is_empty());
        assert_eq!(coface_graph(&x, 1, &z3).neighbours(0), &[1]);
    }
}
