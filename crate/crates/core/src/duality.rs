//! Dual cell structure of a closed triangulated manifold and the
//! norm-preserving duality transfer between dual chains and primal cochains.
//!
//! The dual cell of a `k`-simplex `s` is an `(n-k)`-cell with the same index.
//! Its faces are the duals of the `(k+1)`-simplices containing `s`, with the
//! primal incidence coefficients, so the dual boundary in degree `n-k` is the
//! transpose of the primal boundary in degree `k+1`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::cochain::{Chain, Cochain};
use crate::complex::{build_complex, CellComplex, Incidence};
use crate::error::{Error, Result};

/// A closed triangulated `n`-manifold together with its dual complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualStructure {
    primal: CellComplex,
    dual: CellComplex,
    simplices: Vec<Vec<Vec<usize>>>,
}

/// One row of the bijection table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualCell {
    pub primal_dim: usize,
    pub simplex: usize,
    pub vertices: Vec<usize>,
    pub dual_dim: usize,
    pub dual_cell: usize,
}

/// Checks the closed-manifold conditions: the complex is simplicial and pure,
/// every `(n-1)`-simplex lies in exactly two `n`-simplices, and for `n >= 2`
/// every vertex link is connected.
pub fn check_closed_manifold(x: &CellComplex) -> Result<Vec<Vec<Vec<usize>>>> {
    let simplices = x.simplices()?;
    let n = x.dim();
    if n == 0 {
        return Ok(simplices);
    }
    for k in 0..n {
        for s in 0..x.count(k) {
            let count = x.cofaces(k, s).len();
            if (k == n - 1 && count != 2) || count == 0 {
                return Err(Error::NotClosedManifold {
                    dim: k,
                    simplex: s,
                    count,
                });
            }
        }
    }
    if n >= 2 {
        // link of v: the faces opposite v in simplices containing v; connected
        // iff the link edges (from triangles at v) join all link vertices
        for v in 0..x.count(0) {
            let link_vertices: Vec<usize> = x
                .cofaces(0, v)
                .iter()
                .map(|&(e, _)| {
                    simplices[1][e]
                        .iter()
                        .copied()
                        .find(|&u| u != v)
                        .expect("edge has two vertices")
                })
                .collect();
            let mut parent: BTreeMap<usize, usize> = link_vertices.iter().map(|&u| (u, u)).collect();
            fn find(p: &mut BTreeMap<usize, usize>, x: usize) -> usize {
                let mut r = x;
                while p[&r] != r {
                    r = p[&r];
                }
                r
            }
            let triangles: BTreeSet<usize> = x
                .cofaces(0, v)
                .iter()
                .flat_map(|&(e, _)| x.cofaces(1, e).iter().map(|&(t, _)| t))
                .collect();
            for t in triangles {
                let others: Vec<usize> = simplices[2][t].iter().copied().filter(|&u| u != v).collect();
                let (a, b) = (find(&mut parent, others[0]), find(&mut parent, others[1]));
                parent.insert(a, b);
            }
            let roots: BTreeSet<usize> = link_vertices.iter().map(|&u| find(&mut parent, u)).collect();
            if roots.len() > 1 {
                return Err(Error::DisconnectedLink { vertex: v });
            }
        }
    }
    Ok(simplices)
}

/// Builds the dual complex of a closed triangulated manifold.
pub fn dual_complex(x: &CellComplex) -> Result<DualStructure> {
    let simplices = check_closed_manifold(x)?;
    let n = x.dim();
    let counts: Vec<usize> = (0..=n).map(|j| x.count(n - j)).collect();
    let mut incidence: Vec<Vec<Incidence>> = vec![Vec::new(); n + 1];
    for j in 1..=n {
        incidence[j] = x.coface_lists(n - j).to_vec();
    }
    let dual = build_complex(format!("dual({})", x.name()), counts, incidence)?;
    Ok(DualStructure {
        primal: x.clone(),
        dual,
        simplices,
    })
}

impl DualStructure {
    pub fn primal(&self) -> &CellComplex {
        &self.primal
    }

    pub fn dual(&self) -> &CellComplex {
        &self.dual
    }

    /// Manifold dimension.
    pub fn dim(&self) -> usize {
        self.primal.dim()
    }

    /// `(dual_dim, dual_cell)` for a primal `k`-simplex.
    pub fn dual_of(&self, k: usize, simplex: usize) -> Result<(usize, usize)> {
        self.primal.check_cell(k, simplex)?;
        Ok((self.dim() - k, simplex))
    }

    pub fn table(&self) -> Vec<DualCell> {
        let n = self.dim();
        (0..=n)
            .flat_map(|k| {
                (0..self.primal.count(k)).map(move |s| DualCell {
                    primal_dim: k,
                    simplex: s,
                    vertices: self.simplices[k][s].clone(),
                    dual_dim: n - k,
                    dual_cell: s,
                })
            })
            .collect()
    }

    /// Dual `j`-chain to primal `(n-j)`-cochain.
    pub fn chain_to_cochain(&self, x: &Chain) -> Result<Cochain> {
        require_z2(x)?;
        if !x.belongs_to(&self.dual) {
            return Err(Error::ComplexMismatch);
        }
        Ok(x.rehome(&self.primal, self.dim() - x.degree()))
    }

    /// Primal `k`-cochain to dual `(n-k)`-chain.
    pub fn cochain_to_chain(&self, c: &Cochain) -> Result<Chain> {
        require_z2(c)?;
        if !c.belongs_to(&self.primal) {
            return Err(Error::ComplexMismatch);
        }
        Ok(c.rehome(&self.dual, self.dim() - c.degree()))
    }
}

fn require_z2(x: &Cochain) -> Result<()> {
    if x.group().is_z2() {
        Ok(())
    } else {
        Err(Error::CoefficientNotSupported(format!(
            "duality transfer needs Z2 coefficients, got {}",
            x.group().descriptor()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::{codifferential, differential};
    use crate::generators::{cycle, from_simplices, simplex_boundary, torus2};
    use crate::group::CoefficientGroup;

    #[test]
    fn sphere_counts_swap() {
        let ds = dual_complex(&simplex_boundary(3).unwrap()).unwrap();
        assert_eq!(ds.dual().counts(), &[4, 6, 4]);
        let ds = dual_complex(&simplex_boundary(4).unwrap()).unwrap();
        assert_eq!(ds.dual().counts(), &[5, 10, 10, 5]);
    }

    #[test]
    fn transpose_identity() {
        let x = torus2();
        let ds = dual_complex(&x).unwrap();
        for j in 1..=2 {
            for cell in 0..ds.dual().count(j) {
                assert_eq!(ds.dual().faces(j, cell), x.cofaces(2 - j, cell));
            }
        }
    }

    #[test]
    fn vertex_dual() {
        let ds = dual_complex(&simplex_boundary(3).unwrap()).unwrap();
        let z2 = CoefficientGroup::z2();
        let x = Cochain::indicator(ds.dual(), 2, &z2, &[1]).unwrap();
        let c = ds.chain_to_cochain(&x).unwrap();
        assert_eq!((c.degree(), c.support()), (0, vec![1]));
        assert_eq!(ds.cochain_to_chain(&c).unwrap(), x);
        let zero = Cochain::zero(ds.dual(), 1, &z2);
        assert!(ds.chain_to_cochain(&zero).unwrap().is_zero());
    }

    #[test]
    fn dual_cycle_is_a_cocycle() {
        let ds = dual_complex(&simplex_boundary(4).unwrap()).unwrap();
        let z2 = CoefficientGroup::z2();
        let face = Cochain::indicator(ds.dual(), 2, &z2, &[0]).unwrap();
        let p = differential(ds.dual(), &face).unwrap();
        assert_eq!(p.hamming_norm(), 3);
        let z = ds.chain_to_cochain(&p).unwrap();
        assert_eq!((z.degree(), z.hamming_norm()), (2, 3));
        assert!(codifferential(ds.primal(), &z).unwrap().is_zero());
    }

    #[test]
    fn non_manifolds_are_rejected() {
        let book = from_simplices("book", &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 1, 4]]).unwrap();
        assert!(matches!(
            dual_complex(&book).unwrap_err(),
            Error::NotClosedManifold { dim: 1, count: 3, .. }
        ));
        // two tetrahedron boundaries glued at a vertex
        let mut tris = Vec::new();
        for base in [0usize, 3] {
            let vs = [0, base + 1, base + 2, base + 3];
            for skip in 0..4 {
                tris.push(
                    vs.iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, &v)| v)
                        .collect(),
                );
            }
        }
        let pinched = from_simplices("pinched", &tris).unwrap();
        assert_eq!(
            dual_complex(&pinched).unwrap_err(),
            Error::DisconnectedLink { vertex: 0 }
        );
    }

    #[test]
    fn non_z2_is_gated() {
        let ds = dual_complex(&cycle(5).unwrap()).unwrap();
        let z3 = CoefficientGroup::cyclic(3).unwrap();
        let c = Cochain::indicator(ds.primal(), 0, &z3, &[0]).unwrap();
        assert_eq!(ds.cochain_to_chain(&c).unwrap_err().kind(), "CoefficientNotSupported");
    }
}
