//! Finite graded cell complexes with integer incidence coefficients.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};

/// `(face index, coefficient)` pairs of one cell, sorted by face index.
pub type Incidence = Vec<(usize, i64)>;

/// A validated finite cell complex.
///
/// Cells are dense indices per dimension. `faces[k][s]` lists the `(k-1)`-faces
/// of the `k`-cell `s`; `cofaces[k][t]` is the transposed relation.
#[derive(Debug, Clone)]
pub struct CellComplex {
    name: String,
    counts: Vec<usize>,
    faces: Vec<Vec<Incidence>>,
    cofaces: Vec<Vec<Incidence>>,
    names: Option<Vec<Vec<String>>>,
    fingerprint: u64,
}

impl PartialEq for CellComplex {
    fn eq(&self, other: &Self) -> bool {
        self.counts == other.counts && self.faces == other.faces
    }
}

impl Eq for CellComplex {}

/// Validates incidence data and builds a complex.
///
/// `incidence[k]` holds the face lists of the `k`-cells; `incidence[0]` must be
/// empty or a list of empty lists.
pub fn build_complex(
    name: impl Into<String>,
    counts: Vec<usize>,
    mut incidence: Vec<Vec<Incidence>>,
) -> Result<CellComplex> {
    if counts.is_empty() {
        return Err(Error::Malformed("a complex needs at least dimension 0".into()));
    }
    let top = counts.len() - 1;
    if incidence.len() > counts.len() {
        return Err(Error::Malformed(format!(
            "incidence given for dimension {} but the complex has dimension {top}",
            incidence.len() - 1
        )));
    }
    incidence.resize_with(counts.len(), Vec::new);
    if incidence[0].iter().any(|f| !f.is_empty()) {
        return Err(Error::Malformed("vertices cannot have faces".into()));
    }
    incidence[0] = vec![Vec::new(); counts[0]];

    for k in 1..=top {
        if incidence[k].len() != counts[k] {
            return Err(Error::Malformed(format!(
                "dimension {k}: {} incidence lists for {} cells",
                incidence[k].len(),
                counts[k]
            )));
        }
        for (cell, list) in incidence[k].iter_mut().enumerate() {
            for &(face, coeff) in list.iter() {
                if face >= counts[k - 1] {
                    return Err(Error::DanglingFace { dim: k, cell, face });
                }
                if coeff == 0 {
                    return Err(Error::ZeroCoefficient { dim: k, cell });
                }
            }
            list.sort_unstable();
            if list.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::Malformed(format!("{k}-cell {cell} lists a face twice")));
            }
        }
    }

    for k in 2..=top {
        for (cell, list) in incidence[k].iter().enumerate() {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for &(mid, c1) in list {
                for &(low, c2) in &incidence[k - 1][mid] {
                    *acc.entry(low).or_insert(0) += c1 * c2;
                }
            }
            if let Some((&face, &total)) = acc.iter().find(|(_, &v)| v != 0) {
                return Err(Error::BoundaryNotSquareZero {
                    dim: k,
                    cell,
                    face,
                    total,
                });
            }
        }
    }

    let mut cofaces: Vec<Vec<Incidence>> = counts.iter().map(|&c| vec![Vec::new(); c]).collect();
    for k in 1..=top {
        for (cell, list) in incidence[k].iter().enumerate() {
            for &(face, coeff) in list {
                cofaces[k - 1][face].push((cell, coeff));
            }
        }
    }

    let mut hasher = DefaultHasher::new();
    counts.hash(&mut hasher);
    incidence.hash(&mut hasher);
    let fingerprint = hasher.finish();

    Ok(CellComplex {
        name: name.into(),
        counts,
        faces: incidence,
        cofaces,
        names: None,
        fingerprint,
    })
}

/// Builds a complex from externally labelled cells.
#[derive(Debug, Default)]
pub struct ComplexBuilder {
    name: String,
    labels: Vec<Vec<String>>,
    index: Vec<HashMap<String, usize>>,
    faces: Vec<Vec<Vec<(String, i64)>>>,
}

impl ComplexBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        ComplexBuilder {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn cell(mut self, dim: usize, label: &str, faces: &[(&str, i64)]) -> Result<Self> {
        while self.labels.len() <= dim {
            self.labels.push(Vec::new());
            self.index.push(HashMap::new());
            self.faces.push(Vec::new());
        }
        if self.index[dim].contains_key(label) {
            return Err(Error::DuplicateId {
                dim,
                id: label.to_string(),
            });
        }
        self.index[dim].insert(label.to_string(), self.labels[dim].len());
        self.labels[dim].push(label.to_string());
        self.faces[dim].push(faces.iter().map(|(l, c)| (l.to_string(), *c)).collect());
        Ok(self)
    }

    pub fn build(self) -> Result<CellComplex> {
        let counts: Vec<usize> = self.labels.iter().map(Vec::len).collect();
        let mut incidence = vec![Vec::new()];
        for k in 1..counts.len() {
            let mut lists = Vec::with_capacity(counts[k]);
            for (cell, faces) in self.faces[k].iter().enumerate() {
                let mut list = Vec::with_capacity(faces.len());
                for (label, coeff) in faces {
                    let face = *self.index[k - 1].get(label).ok_or(Error::DanglingFace {
                        dim: k,
                        cell,
                        face: usize::MAX,
                    })?;
                    list.push((face, *coeff));
                }
                lists.push(list);
            }
            incidence.push(lists);
        }
        if counts.is_empty() {
            return Err(Error::Malformed("empty complex".into()));
        }
        let mut complex = build_complex(self.name, counts, incidence)?;
        complex.names = Some(self.labels);
        Ok(complex)
    }
}

impl CellComplex {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Top dimension.
    pub fn dim(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Number of `k`-cells; zero above the top dimension.
    pub fn count(&self, k: usize) -> usize {
        self.counts.get(k).copied().unwrap_or(0)
    }

    pub fn faces(&self, k: usize, cell: usize) -> &[(usize, i64)] {
        &self.faces[k][cell]
    }

    pub fn cofaces(&self, k: usize, cell: usize) -> &[(usize, i64)] {
        &self.cofaces[k][cell]
    }

    /// All coface lists of the `k`-cells.
    pub fn coface_lists(&self, k: usize) -> &[Incidence] {
        &self.cofaces[k]
    }

    /// All face lists of the `k`-cells.
    pub fn incidence(&self, k: usize) -> &[Incidence] {
        &self.faces[k]
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn label(&self, k: usize, cell: usize) -> Option<&str> {
        self.names.as_ref().map(|n| n[k][cell].as_str())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    pub fn check_cell(&self, k: usize, cell: usize) -> Result<()> {
        if cell < self.count(k) {
            Ok(())
        } else {
            Err(Error::UnknownCell { dim: k, cell })
        }
    }

    /// Sorted vertex sets of the closures of all cells, by dimension.
    pub fn vertex_sets(&self) -> Vec<Vec<Vec<usize>>> {
        let mut sets: Vec<Vec<Vec<usize>>> = Vec::with_capacity(self.counts.len());
        sets.push((0..self.counts[0]).map(|v| vec![v]).collect());
        for k in 1..self.counts.len() {
            let level = self.faces[k]
                .iter()
                .map(|list| {
                    let mut vs: Vec<usize> = list.iter().flat_map(|&(f, _)| sets[k - 1][f].iter().copied()).collect();
                    vs.sort_unstable();
                    vs.dedup();
                    vs
                })
                .collect();
            sets.push(level);
        }
        sets
    }

    /// Checks that every `k`-cell is a `k`-simplex determined by its vertices and
    /// returns the vertex sets.
    pub fn simplices(&self) -> Result<Vec<Vec<Vec<usize>>>> {
        let sets = self.vertex_sets();
        for (k, level) in sets.iter().enumerate() {
            let mut seen = HashMap::new();
            for (cell, vs) in level.iter().enumerate() {
                if vs.len() != k + 1 || self.faces[k].get(cell).map_or(0, Vec::len) != if k == 0 { 0 } else { k + 1 } {
                    return Err(Error::NotSimplicial(format!("{k}-cell {cell} is not a simplex")));
                }
                if let Some(other) = seen.insert(vs.clone(), cell) {
                    return Err(Error::NotSimplicial(format!(
                        "{k}-cells {other} and {cell} share the vertex set {vs:?}"
                    )));
                }
            }
        }
        Ok(sets)
    }

    /// Endpoints of an edge as `(source, target)`: the face with coefficient -1 is
    /// the source when exactly one face is negative, otherwise listing order.
    pub fn edge_endpoints(&self, edge: usize) -> Result<(usize, usize)> {
        let f = &self.faces[1][edge];
        if f.len() != 2 {
            return Err(Error::Malformed(format!(
                "edge {edge} does not have two distinct endpoints"
            )));
        }
        Ok(match (f[0].1 < 0, f[1].1 < 0) {
            (false, true) => (f[1].0, f[0].0),
            _ => (f[0].0, f[1].0),
        })
    }

    /// Disjoint union; cells of `other` are numbered after those of `self`.
    pub fn disjoint_union(&self, other: &CellComplex, name: impl Into<String>) -> Result<CellComplex> {
        let top = self.dim().max(other.dim());
        let mut counts = vec![0; top + 1];
        let mut incidence: Vec<Vec<Incidence>> = vec![Vec::new(); top + 1];
        for k in 0..=top {
            counts[k] = self.count(k) + other.count(k);
            if k == 0 {
                continue;
            }
            if k <= self.dim() {
                incidence[k].extend(self.faces[k].iter().cloned());
            }
            if k <= other.dim() {
                let shift = self.count(k - 1);
                incidence[k].extend(
                    other.faces[k]
                        .iter()
                        .map(|l| l.iter().map(|&(f, c)| (f + shift, c)).collect()),
                );
            }
        }
        build_complex(name, counts, incidence)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tetra_boundary() -> CellComplex {
        crate::generators::simplex_boundary(3).unwrap()
    }

    #[test]
    fn sphere_as_tetrahedron_boundary_is_valid() {
        let s2 = tetra_boundary();
        assert_eq!(s2.counts(), &[4, 6, 4]);
        assert_eq!(s2.euler_characteristic(), 2);
    }

    #[test]
    fn single_vertex_is_valid() {
        let pt = build_complex("pt", vec![1], vec![]).unwrap();
        assert_eq!(pt.dim(), 0);
        assert_eq!(pt.count(1), 0);
    }

    #[test]
    fn mismatched_signs_are_rejected() {
        // Two vertices, one edge with both coefficients +1, and a disk glued once along it.
        let err = build_complex(
            "bad",
            vec![2, 1, 1],
            vec![vec![], vec![vec![(0, 1), (1, 1)]], vec![vec![(0, 1)]]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::BoundaryNotSquareZero { dim: 2, cell: 0, .. }));
    }

    #[test]
    fn dangling_and_zero_coefficients() {
        let err = build_complex("d", vec![1, 1], vec![vec![], vec![vec![(3, 1)]]]).unwrap_err();
        assert_eq!(
            err,
            Error::DanglingFace {
                dim: 1,
                cell: 0,
                face: 3
            }
        );
        let err = build_complex("z", vec![2, 1], vec![vec![], vec![vec![(0, 0), (1, 1)]]]).unwrap_err();
        assert_eq!(err, Error::ZeroCoefficient { dim: 1, cell: 0 });
    }

    #[test]
    fn labelled_builder_detects_duplicates() {
        let err = ComplexBuilder::new("x")
            .cell(0, "a", &[])
            .unwrap()
            .cell(0, "a", &[])
            .unwrap_err();
        assert!(matches!(err, Error::DuplicateId { dim: 0, .. }));

        let seg = ComplexBuilder::new("seg")
            .cell(0, "a", &[])
            .unwrap()
            .cell(0, "b", &[])
            .unwrap()
            .cell(1, "ab", &[("a", -1), ("b", 1)])
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(seg.label(1, 0), Some("ab"));
        assert_eq!(seg.edge_endpoints(0).unwrap(), (0, 1));
    }

    #[test]
    fn simplicial_vertex_sets() {
        let s2 = tetra_boundary();
        let sets = s2.simplices().unwrap();
        assert_eq!(sets[2].len(), 4);
        assert!(sets[2].iter().all(|t| t.len() == 3));
        let cyc = crate::generators::cycle(3).unwrap();
        assert!(cyc.simplices().is_ok());
    }
}
