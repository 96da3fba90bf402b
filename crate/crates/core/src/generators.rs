//! Canonical example complexes.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{build_complex, CellComplex, Incidence};
use crate::error::{Error, Result};
use crate::io::ComplexFile;

/// A generator family with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Cycle {
        m: usize,
    },
    SimplexSkeleton {
        m: usize,
        k: usize,
    },
    SimplexBoundary {
        m: usize,
    },
    Torus2,
    Torus3,
    Rp2,
    Sphere {
        n: usize,
    },
    RandomLm {
        m: usize,
        k: usize,
        density: f64,
        seed: u64,
    },
}

impl GeneratorSpec {
    /// Parses `family` plus positional parameters, e.g. `cycle 6` or `random_lm 8 2 0.5 7`.
    pub fn from_args(family: &str, params: &[String]) -> Result<Self> {
        fn num<T: std::str::FromStr>(params: &[String], i: usize, what: &str) -> Result<T> {
            params
                .get(i)
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| Error::BadParameters(format!("missing or invalid parameter {what}")))
        }
        let spec = match family {
            "cycle" => GeneratorSpec::Cycle {
                m: num(params, 0, "m")?,
            },
            "simplex_skeleton" => GeneratorSpec::SimplexSkeleton {
                m: num(params, 0, "m")?,
                k: num(params, 1, "k")?,
            },
            "simplex_boundary" => GeneratorSpec::SimplexBoundary {
                m: num(params, 0, "m")?,
            },
            "torus2" => GeneratorSpec::Torus2,
            "torus3" => GeneratorSpec::Torus3,
            "rp2" => GeneratorSpec::Rp2,
            "sphere" => GeneratorSpec::Sphere {
                n: num(params, 0, "n")?,
            },
            "random_lm" => GeneratorSpec::RandomLm {
                m: num(params, 0, "m")?,
                k: num(params, 1, "k")?,
                density: num(params, 2, "density")?,
                seed: num(params, 3, "seed")?,
            },
            other => return Err(Error::BadParameters(format!("unknown generator family {other:?}"))),
        };
        Ok(spec)
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<CellComplex> {
    match *spec {
        GeneratorSpec::Cycle { m } => cycle(m),
        GeneratorSpec::SimplexSkeleton { m, k } => simplex_skeleton(m, k),
        GeneratorSpec::SimplexBoundary { m } => simplex_boundary(m),
        GeneratorSpec::Torus2 => Ok(torus2()),
        GeneratorSpec::Torus3 => torus3(),
        GeneratorSpec::Rp2 => Ok(rp2()),
        GeneratorSpec::Sphere { n } => sphere(n),
        GeneratorSpec::RandomLm { m, k, density, seed } => random_lm(m, k, density, seed),
    }
}

/// Simplicial complex generated by the given simplices (closed under faces).
/// Simplices in each dimension are numbered in lexicographic order of their
/// sorted vertex lists, and `face_i = omit v_i` carries sign `(-1)^i`.
pub fn from_simplices(name: impl Into<String>, facets: &[Vec<usize>]) -> Result<CellComplex> {
    let mut levels: Vec<BTreeSet<Vec<usize>>> = Vec::new();
    for f in facets {
        let mut f = f.clone();
        f.sort_unstable();
        f.dedup();
        if f.is_empty() {
            return Err(Error::BadParameters("empty simplex".into()));
        }
        for sub in subsets(&f) {
            let d = sub.len() - 1;
            while levels.len() <= d {
                levels.push(BTreeSet::new());
            }
            levels[d].insert(sub);
        }
    }
    if levels.is_empty() {
        return Err(Error::BadParameters("no simplices".into()));
    }
    let lists: Vec<Vec<Vec<usize>>> = levels.into_iter().map(|s| s.into_iter().collect()).collect();
    let counts = lists.iter().map(Vec::len).collect();
    let mut incidence: Vec<Vec<Incidence>> = vec![Vec::new()];
    for k in 1..lists.len() {
        let level = lists[k]
            .iter()
            .map(|s| {
                (0..s.len())
                    .map(|i| {
                        let mut face = s.clone();
                        face.remove(i);
                        let idx = lists[k - 1].binary_search(&face).expect("closed under faces");
                        (idx, if i % 2 == 0 { 1 } else { -1 })
                    })
                    .collect()
            })
            .collect();
        incidence.push(level);
    }
    build_complex(name, counts, incidence)
}

fn subsets(s: &[usize]) -> Vec<Vec<usize>> {
    let n = s.len();
    (1u64..(1 << n))
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).map(|i| s[i]).collect())
        .collect()
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            if n - v < k - cur.len() {
                break;
            }
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// The cycle graph on `m >= 3` vertices; edge `i` joins `i` and `i + 1 mod m`.
pub fn cycle(m: usize) -> Result<CellComplex> {
    if m < 3 {
        return Err(Error::BadParameters(format!("cycle needs m >= 3, got {m}")));
    }
    let edges = (0..m)
        .map(|i| {
            let j = (i + 1) % m;
            let mut e = vec![(i, -1), (j, 1)];
            e.sort_unstable();
            e
        })
        .collect();
    build_complex(format!("cycle({m})"), vec![m, m], vec![Vec::new(), edges])
}

/// The `k`-skeleton of the `m`-simplex (`m + 1` vertices).
pub fn simplex_skeleton(m: usize, k: usize) -> Result<CellComplex> {
    if m == 0 || k > m - 1 {
        return Err(Error::BadParameters(format!(
            "simplex_skeleton needs k <= m - 1, got m={m}, k={k}"
        )));
    }
    let facets = k_subsets(m + 1, k + 1);
    Ok(from_simplices("", &facets)?.with_name(format!("simplex_skeleton({m},{k})")))
}

/// Boundary of the `m`-simplex, a triangulated `(m-1)`-sphere.
pub fn simplex_boundary(m: usize) -> Result<CellComplex> {
    if m < 2 {
        return Err(Error::BadParameters(format!("simplex_boundary needs m >= 2, got {m}")));
    }
    Ok(simplex_skeleton(m, m - 1)?.with_name(format!("simplex_boundary({m})")))
}

/// The `n`-sphere as the boundary of the `(n+1)`-simplex, for `1 <= n <= 3`.
pub fn sphere(n: usize) -> Result<CellComplex> {
    if !(1..=3).contains(&n) {
        return Err(Error::BadParameters(format!("sphere dimension must be 1..=3, got {n}")));
    }
    Ok(simplex_boundary(n + 1)?.with_name(format!("sphere({n})")))
}

/// Triangles of the 7-vertex torus: `{i, i+1, i+3}` and `{i, i+2, i+3}` mod 7.
fn torus2_triangles() -> Vec<Vec<usize>> {
    (0..7)
        .flat_map(|i| [vec![i, (i + 1) % 7, (i + 3) % 7], vec![i, (i + 2) % 7, (i + 3) % 7]])
        .collect()
}

/// The vertex-minimal 7-vertex torus (21 edges, 14 triangles). Its 1-skeleton is K7.
pub fn torus2() -> CellComplex {
    from_simplices("torus2", &torus2_triangles()).expect("fixed triangulation is valid")
}

/// Integer periods of the edges of [`torus2`].
///
/// The torus is the triangular lattice Z^2 modulo the index-7 sublattice
/// `L = {(a, b) : a + 3b = 0 mod 7}`, with vertex `i` at lattice point `(i, 0)`.
/// Each edge, oriented from lower to higher vertex index, gets the lattice
/// vector by which it fails to close up, written in the basis `u = (7, 0)`,
/// `w = (-3, 1)` of `L`. The result is an integer 1-cocycle with values in
/// `Z^2 = pi_1(T^2)`, and any quotient `Z^2 -> Z_a x Z_b` defines an abelian cover.
pub fn torus2_periods(torus: &CellComplex) -> Vec<[i64; 2]> {
    let step = |d: usize| -> (i64, i64) {
        match d {
            1 => (1, 0),
            2 => (-1, 1),
            3 => (0, 1),
            _ => unreachable!(),
        }
    };
    let holonomy = |from: usize, d: usize| -> [i64; 2] {
        let to = (from + d) % 7;
        let (vx, vy) = step(d);
        let (lx, ly) = (from as i64 + vx - to as i64, vy);
        // (lx, ly) = alpha * (7, 0) + beta * (-3, 1)
        let beta = ly;
        let alpha = (lx + 3 * beta) / 7;
        debug_assert_eq!(alpha * 7 - 3 * beta, lx);
        [alpha, beta]
    };
    (0..torus.count(1))
        .map(|e| {
            let (a, b) = torus.edge_endpoints(e).expect("simplicial edge");
            let (lo, hi) = (a.min(b), a.max(b));
            let sign = if (a, b) == (lo, hi) { 1 } else { -1 };
            let d = (hi - lo) % 7;
            let p = if (1..=3).contains(&d) {
                holonomy(lo, d)
            } else {
                let h = holonomy(hi, 7 - d);
                [-h[0], -h[1]]
            };
            [sign * p[0], sign * p[1]]
        })
        .collect()
}

/// The 6-vertex real projective plane (hemi-icosahedron).
pub fn rp2() -> CellComplex {
    let tris = [
        [1, 2, 3],
        [1, 3, 4],
        [1, 4, 5],
        [1, 5, 6],
        [1, 6, 2],
        [2, 3, 5],
        [3, 4, 6],
        [4, 5, 2],
        [5, 6, 3],
        [6, 2, 4],
    ];
    let facets: Vec<Vec<usize>> = tris.iter().map(|t| t.iter().map(|v| v - 1).collect()).collect();
    from_simplices("rp2", &facets).expect("fixed triangulation is valid")
}

const TORUS3_JSON: &str = include_str!("../data/torus3.json");

/// A 27-vertex triangulation of the 3-torus, shipped as a data file: the
/// 3x3x3 periodic cube grid with every cube cut into the 6 tetrahedra
/// `p, p+e_a, p+e_a+e_b, p+e_1+e_2+e_3` (Freudenthal subdivision).
pub fn torus3() -> Result<CellComplex> {
    let file: ComplexFile = serde_json::from_str(TORUS3_JSON).map_err(|e| Error::Format(e.to_string()))?;
    file.to_complex()
}

/// Linial–Meshulam style random complex: the full `(k-1)`-skeleton on `m`
/// vertices plus each `k`-simplex independently with probability `density`.
/// Uses a counter-based ChaCha stream so output is reproducible everywhere.
pub fn random_lm(m: usize, k: usize, density: f64, seed: u64) -> Result<CellComplex> {
    if k == 0 || k >= m || !(0.0..=1.0).contains(&density) {
        return Err(Error::BadParameters(format!(
            "random_lm needs 1 <= k < m and density in [0, 1]; got m={m}, k={k}, density={density}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut facets = k_subsets(m, k);
    for s in k_subsets(m, k + 1) {
        if rng.gen_bool(density) {
            facets.push(s);
        }
    }
    Ok(from_simplices("", &facets)?.with_name(format!("random_lm({m},{k},{density},{seed})")))
}
