//! Sparse cochains (and chains) over a finite abelian group, the differential
//! and codifferential, and cocycle/coboundary classification.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::complex::{CellComplex, Incidence};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};
use crate::group::{CoefficientGroup, Element};
use crate::linalg::{Diagonalization, ModMatrix};

/// A sparse assignment of nonzero group elements to the `degree`-cells of a
/// complex. Zeros are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cochain {
    complex: u64,
    degree: usize,
    group: CoefficientGroup,
    values: BTreeMap<usize, Element>,
}

/// Chains use the same representation; only the role differs.
pub type Chain = Cochain;

impl Cochain {
    pub fn zero(complex: &CellComplex, degree: usize, group: &CoefficientGroup) -> Self {
        Cochain {
            complex: complex.fingerprint(),
            degree,
            group: group.clone(),
            values: BTreeMap::new(),
        }
    }

    /// Builds a cochain from `(cell, value)` pairs. Repeated cells are summed.
    pub fn from_values(
        complex: &CellComplex,
        degree: usize,
        group: &CoefficientGroup,
        values: impl IntoIterator<Item = (usize, Element)>,
    ) -> Result<Self> {
        if degree > complex.dim() {
            return Err(Error::DegreeOutOfRange {
                degree,
                top: complex.dim(),
            });
        }
        let mut c = Self::zero(complex, degree, group);
        for (cell, v) in values {
            complex.check_cell(degree, cell)?;
            if v.code() >= group.order() {
                return Err(Error::BadCoefficients(format!(
                    "element code {} out of range",
                    v.code()
                )));
            }
            c.add_at(cell, v);
        }
        Ok(c)
    }

    /// Value `one()` on each listed cell.
    pub fn indicator(complex: &CellComplex, degree: usize, group: &CoefficientGroup, cells: &[usize]) -> Result<Self> {
        let one = group.one();
        Self::from_values(complex, degree, group, cells.iter().map(|&c| (c, one)))
    }

    pub fn from_dense(complex: &CellComplex, degree: usize, group: &CoefficientGroup, dense: &[Element]) -> Self {
        debug_assert_eq!(dense.len(), complex.count(degree));
        Cochain {
            complex: complex.fingerprint(),
            degree,
            group: group.clone(),
            values: dense
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, *v))
                .collect(),
        }
    }

    pub fn to_dense(&self, len: usize) -> Vec<Element> {
        let mut d = vec![Element::ZERO; len];
        for (&i, &v) in &self.values {
            d[i] = v;
        }
        d
    }

    pub(crate) fn add_at(&mut self, cell: usize, v: Element) {
        if v.is_zero() {
            return;
        }
        let cur = self.values.get(&cell).copied().unwrap_or(Element::ZERO);
        let s = self.group.add(cur, v);
        if s.is_zero() {
            self.values.remove(&cell);
        } else {
            self.values.insert(cell, s);
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn group(&self) -> &CoefficientGroup {
        &self.group
    }

    pub fn complex_fingerprint(&self) -> u64 {
        self.complex
    }

    pub fn get(&self, cell: usize) -> Element {
        self.values.get(&cell).copied().unwrap_or(Element::ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Element)> + '_ {
        self.values.iter().map(|(&c, &v)| (c, v))
    }

    /// Support cells in increasing order.
    pub fn support(&self) -> Vec<usize> {
        self.values.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Cardinality of the support.
    pub fn hamming_norm(&self) -> usize {
        self.values.len()
    }

    pub fn belongs_to(&self, complex: &CellComplex) -> bool {
        self.complex == complex.fingerprint()
    }

    fn check_compatible(&self, other: &Cochain) -> Result<()> {
        if self.complex != other.complex || self.degree != other.degree || self.group != other.group {
            return Err(Error::ComplexMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (c, v) in other.iter() {
            out.add_at(c, v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Cochain {
        self.scale(-1)
    }

    pub fn scale(&self, k: i64) -> Cochain {
        let mut out = Cochain {
            values: BTreeMap::new(),
            ..self.clone()
        };
        for (c, v) in self.iter() {
            out.add_at(c, self.group.scale(k, v));
        }
        out
    }

    pub fn hamming_distance(&self, other: &Cochain) -> Result<usize> {
        Ok(self.sub(other)?.hamming_norm())
    }

    /// Reinterprets this cochain as living on another complex with the same
    /// cells in this degree.
    pub(crate) fn rehome(&self, complex: &CellComplex, degree: usize) -> Cochain {
        Cochain {
            complex: complex.fingerprint(),
            degree,
            group: self.group.clone(),
            values: self.values.clone(),
        }
    }

    pub fn to_z2_bits(&self, len: usize) -> BitVec {
        BitVec::from_indices(len, self.values.keys().copied())
    }

    /// Serializable form with residues.
    pub fn to_file(&self) -> CochainFile {
        CochainFile {
            degree: self.degree,
            coeff: self.group.descriptor(),
            values: self.iter().map(|(c, v)| (c, self.group.residues(v))).collect(),
        }
    }

    pub fn from_file(complex: &CellComplex, file: &CochainFile) -> Result<Cochain> {
        let group: CoefficientGroup = file.coeff.parse()?;
        let values = file
            .values
            .iter()
            .map(|(c, r)| Ok((*c, group.element(r)?)))
            .collect::<Result<Vec<_>>>()?;
        Cochain::from_values(complex, file.degree, &group, values)
    }
}

/// On-disk cochain: `{ "degree", "coeff", "values": [[cell, [residues]]] }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CochainFile {
    pub degree: usize,
    pub coeff: String,
    pub values: Vec<(usize, Vec<u32>)>,
}

/// A group homomorphism between cochain spaces given by integer columns.
#[derive(Debug, Clone, Copy)]
pub struct SparseMap<'a> {
    pub codomain: usize,
    pub columns: &'a [Incidence],
}

impl<'a> SparseMap<'a> {
    /// d* : C^k -> C^{k+1}.
    pub fn codifferential(complex: &'a CellComplex, k: usize) -> Self {
        SparseMap {
            codomain: complex.count(k + 1),
            columns: columns_or_empty(complex, k, true),
        }
    }

    /// d : C_k -> C_{k-1}.
    pub fn differential(complex: &'a CellComplex, k: usize) -> Self {
        SparseMap {
            codomain: if k == 0 { 0 } else { complex.count(k - 1) },
            columns: columns_or_empty(complex, k, false),
        }
    }

    pub fn domain(&self) -> usize {
        self.columns.len()
    }

    pub fn apply_dense(&self, group: &CoefficientGroup, x: &[Element]) -> Vec<Element> {
        let mut out = vec![Element::ZERO; self.codomain];
        for (j, &v) in x.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            for &(t, k) in &self.columns[j] {
                out[t] = group.add(out[t], group.scale(k, v));
            }
        }
        out
    }

    /// Dense integer matrix reduced mod `m` (rows = codomain).
    pub fn mod_matrix(&self, m: u32) -> ModMatrix {
        let mut a = ModMatrix::zeros(m, self.codomain, self.domain());
        for (j, col) in self.columns.iter().enumerate() {
            for &(t, k) in col {
                a.add_to(t, j, k);
            }
        }
        a
    }

    /// Columns with odd coefficients, as a GF(2) matrix.
    pub fn bit_matrix(&self) -> BitMatrix {
        BitMatrix::from_columns(
            self.codomain,
            self.columns
                .iter()
                .map(|col| BitVec::from_indices(self.codomain, col.iter().filter(|(_, k)| k % 2 != 0).map(|(t, _)| *t)))
                .collect(),
        )
    }
}

fn columns_or_empty(complex: &CellComplex, k: usize, co: bool) -> &[Incidence] {
    if k > complex.dim() {
        &[]
    } else if co {
        complex.coface_lists(k)
    } else {
        complex.incidence(k)
    }
}

fn check_cochain(complex: &CellComplex, c: &Cochain) -> Result<()> {
    if !c.belongs_to(complex) {
        return Err(Error::ComplexMismatch);
    }
    if c.degree > complex.dim() {
        return Err(Error::DegreeOutOfRange {
            degree: c.degree,
            top: complex.dim(),
        });
    }
    Ok(())
}

/// `(d* c)(s) = sum over faces t of s of coeff(s, t) c(t)`.
pub fn codifferential(complex: &CellComplex, c: &Cochain) -> Result<Cochain> {
    check_cochain(complex, c)?;
    let k = c.degree;
    let mut out = Cochain::zero(complex, k + 1, &c.group);
    if k == complex.dim() {
        return Ok(out);
    }
    for (t, v) in c.iter() {
        for &(s, coeff) in complex.cofaces(k, t) {
            out.add_at(s, c.group.scale(coeff, v));
        }
    }
    Ok(out)
}

/// Boundary of a chain. The boundary of a 0-chain is the empty chain in degree 0
/// by convention (there is nothing below).
pub fn differential(complex: &CellComplex, q: &Chain) -> Result<Chain> {
    check_cochain(complex, q)?;
    let k = q.degree;
    if k == 0 {
        return Ok(Cochain::zero(complex, 0, &q.group));
    }
    let mut out = Cochain::zero(complex, k - 1, &q.group);
    for (s, v) in q.iter() {
        for &(t, coeff) in complex.faces(k, s) {
            out.add_at(t, q.group.scale(coeff, v));
        }
    }
    Ok(out)
}

/// Bit-packed d* over Z_2.
pub fn codifferential_z2(complex: &CellComplex, degree: usize, c: &BitVec) -> BitVec {
    SparseMap::codifferential(complex, degree).bit_matrix().mul(c)
}

/// Solves linear systems `M x = y` over every cyclic factor of a group.
#[derive(Debug, Clone)]
pub struct FactorSolver {
    group: CoefficientGroup,
    diags: Vec<Diagonalization>,
}

impl FactorSolver {
    pub fn new(map: SparseMap<'_>, group: &CoefficientGroup) -> Self {
        FactorSolver {
            group: group.clone(),
            diags: group
                .factors()
                .iter()
                .map(|&m| Diagonalization::new(&map.mod_matrix(m)))
                .collect(),
        }
    }

    /// Some dense preimage of `y`, or `None`.
    pub fn solve(&self, y: &[Element]) -> Option<Vec<Element>> {
        let cols = self.diags.first().map_or(0, |d| d.cols);
        let mut x = vec![Element::ZERO; cols];
        for (j, d) in self.diags.iter().enumerate() {
            let rhs: Vec<i64> = y.iter().map(|&e| self.group.component(e, j) as i64).collect();
            let sol = d.solve(&rhs)?;
            for (xi, s) in x.iter_mut().zip(sol) {
                *xi = self.group.with_component(*xi, j, s as u32);
            }
        }
        Some(x)
    }

    /// Size of the image as a product of cyclic orders (all factors together).
    pub fn image_orders(&self) -> Vec<u64> {
        self.diags.iter().flat_map(|d| d.image_orders()).collect()
    }

    /// Generators of the kernel (dense, with additive order), across all factors.
    pub fn kernel_generators(&self) -> Vec<(Vec<Element>, u64)> {
        let mut gens = Vec::new();
        for (j, d) in self.diags.iter().enumerate() {
            for (g, order) in d.kernel_generators() {
                let v = g
                    .iter()
                    .map(|&r| self.group.with_component(Element::ZERO, j, r as u32))
                    .collect();
                gens.push((v, order));
            }
        }
        gens
    }

    /// log2 of the kernel size, for budgeting.
    pub fn kernel_log2(&self) -> f64 {
        self.kernel_generators().iter().map(|(_, o)| (*o as f64).log2()).sum()
    }
}

/// Outcome of [`classify_cochain`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CochainClass {
    Coboundary,
    Cocycle,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub class: CochainClass,
    /// `d* c == 0`. True whenever `class` is `Coboundary`.
    pub is_cocycle: bool,
    /// A `b` with `d* b = c` (absent in degree 0, where only zero is a coboundary).
    pub witness: Option<Cochain>,
}

/// Decides membership of `c` in Z^k and B^k.
pub fn classify_cochain(complex: &CellComplex, c: &Cochain) -> Result<Classification> {
    let dc = codifferential(complex, c)?;
    let is_cocycle = dc.is_zero();
    if !is_cocycle {
        return Ok(Classification {
            class: CochainClass::Neither,
            is_cocycle,
            witness: None,
        });
    }
    let k = c.degree;
    if k == 0 {
        let class = if c.is_zero() {
            CochainClass::Coboundary
        } else {
            CochainClass::Cocycle
        };
        return Ok(Classification {
            class,
            is_cocycle,
            witness: None,
        });
    }
    let solver = FactorSolver::new(SparseMap::codifferential(complex, k - 1), &c.group);
    match solver.solve(&c.to_dense(complex.count(k))) {
        Some(b) => Ok(Classification {
            class: CochainClass::Coboundary,
            is_cocycle,
            witness: Some(Cochain::from_dense(complex, k - 1, &c.group, &b)),
        }),
        None => Ok(Classification {
            class: CochainClass::Cocycle,
            is_cocycle,
            witness: None,
        }),
    }
}

/// Orders of the cyclic summands of H^k as a count: |Z^k| / |B^k|.
pub fn cohomology_order(complex: &CellComplex, k: usize, group: &CoefficientGroup) -> u128 {
    let z = cocycle_count(complex, k, group);
    let b = coboundary_count(complex, k, group);
    z / b
}

/// |Z^k| = |C^k| / |im d*_k|, as an exact integer when it fits.
pub fn cocycle_count(complex: &CellComplex, k: usize, group: &CoefficientGroup) -> u128 {
    let solver = FactorSolver::new(SparseMap::codifferential(complex, k), group);
    solver.kernel_generators().iter().map(|(_, o)| *o as u128).product()
}

/// |B^k| = |im d*_{k-1}|; B^0 is trivial.
pub fn coboundary_count(complex: &CellComplex, k: usize, group: &CoefficientGroup) -> u128 {
    if k == 0 {
        return 1;
    }
    let solver = FactorSolver::new(SparseMap::codifferential(complex, k - 1), group);
    solver.image_orders().iter().map(|&o| o as u128).product()
}
