//! Linear algebra over Z_m for arbitrary m >= 2.
//!
//! Z_m is not a field when m is composite, so plain Gaussian elimination is not
//! enough. [`Diagonalization`] reduces a matrix to diagonal form `P A Q = D` with
//! `P`, `Q` invertible over Z_m using unimodular 2x2 row and column moves built
//! from the extended Euclidean algorithm. This is a Smith-type normal form without
//! the divisibility chain, which is all that solving and counting need.

use num_integer::Integer;

/// Dense matrix with entries in `0..m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModMatrix {
    pub modulus: u32,
    pub rows: usize,
    pub cols: usize,
    data: Vec<i64>,
}

impl ModMatrix {
    pub fn zeros(modulus: u32, rows: usize, cols: usize) -> Self {
        ModMatrix {
            modulus,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(modulus: u32, n: usize) -> Self {
        let mut m = Self::zeros(modulus, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        let m = self.modulus as i64;
        self.data[r * self.cols + c] = v.rem_euclid(m);
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: i64) {
        let cur = self.get(r, c);
        self.set(r, c, cur + v);
    }

    pub fn mul_vec(&self, x: &[i64]) -> Vec<i64> {
        let m = self.modulus as i64;
        (0..self.rows)
            .map(|r| {
                let row = &self.data[r * self.cols..(r + 1) * self.cols];
                row.iter()
                    .zip(x)
                    .fold(0i64, |acc, (&a, &b)| (acc + a * b.rem_euclid(m)) % m)
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// rows (a, b) <- (s a + u b, v a + w b)
    fn mix_rows(&mut self, a: usize, b: usize, [s, u, v, w]: [i64; 4]) {
        let m = self.modulus as i64;
        for c in 0..self.cols {
            let (x, y) = (self.get(a, c), self.get(b, c));
            if x == 0 && y == 0 {
                continue;
            }
            self.data[a * self.cols + c] = (s * x + u * y).rem_euclid(m);
            self.data[b * self.cols + c] = (v * x + w * y).rem_euclid(m);
        }
    }

    /// cols (a, b) <- (s a + u b, v a + w b)
    fn mix_cols(&mut self, a: usize, b: usize, [s, u, v, w]: [i64; 4]) {
        let m = self.modulus as i64;
        for r in 0..self.rows {
            let (x, y) = (self.get(r, a), self.get(r, b));
            if x == 0 && y == 0 {
                continue;
            }
            self.data[r * self.cols + a] = (s * x + u * y).rem_euclid(m);
            self.data[r * self.cols + b] = (v * x + w * y).rem_euclid(m);
        }
    }
}

/// Coefficients of a determinant-one move sending `(a, b)` to `(gcd, 0)`.
fn euclid_move(a: i64, b: i64) -> [i64; 4] {
    if a != 0 && b % a == 0 {
        // leaves the pivot line untouched
        return [1, 0, -b / a, 1];
    }
    let e = a.extended_gcd(&b);
    let g = e.gcd;
    [e.x, e.y, -b / g, a / g]
}

/// `P A Q = D` over Z_m.
#[derive(Debug, Clone)]
pub struct Diagonalization {
    pub modulus: u32,
    pub rows: usize,
    pub cols: usize,
    /// Nonzero diagonal entries `D[i][i]`, `i < rank`.
    pub diagonal: Vec<i64>,
    p: ModMatrix,
    q: ModMatrix,
}

impl Diagonalization {
    pub fn new(a: &ModMatrix) -> Self {
        let m = a.modulus as i64;
        let mut d = a.clone();
        let mut p = ModMatrix::identity(a.modulus, a.rows);
        let mut q = ModMatrix::identity(a.modulus, a.cols);
        let mut diagonal = Vec::new();
        let limit = a.rows.min(a.cols);

        for t in 0..limit {
            // Pivot generating the largest ideal: smallest gcd with m.
            let mut best: Option<(i64, usize, usize)> = None;
            'search: for r in t..d.rows {
                for c in t..d.cols {
                    let v = d.get(r, c);
                    if v != 0 {
                        let g = v.gcd(&m);
                        if best.is_none_or(|(bg, _, _)| g < bg) {
                            best = Some((g, r, c));
                            if g == 1 {
                                break 'search;
                            }
                        }
                    }
                }
            }
            let Some((_, pr, pc)) = best else { break };
            d.swap_rows(t, pr);
            p.swap_rows(t, pr);
            d.swap_cols(t, pc);
            q.swap_cols(t, pc);

            loop {
                let mut dirty = false;
                for r in t + 1..d.rows {
                    let b = d.get(r, t);
                    if b == 0 {
                        continue;
                    }
                    let mv = euclid_move(d.get(t, t), b);
                    d.mix_rows(t, r, mv);
                    p.mix_rows(t, r, mv);
                }
                for c in t + 1..d.cols {
                    let b = d.get(t, c);
                    if b == 0 {
                        continue;
                    }
                    let mv = euclid_move(d.get(t, t), b);
                    d.mix_cols(t, c, mv);
                    q.mix_cols(t, c, mv);
                }
                for r in t + 1..d.rows {
                    if d.get(r, t) != 0 {
                        dirty = true;
                        break;
                    }
                }
                if !dirty {
                    break;
                }
            }
            let pivot = d.get(t, t);
            if pivot == 0 {
                break;
            }
            diagonal.push(pivot);
        }

        Diagonalization {
            modulus: a.modulus,
            rows: a.rows,
            cols: a.cols,
            diagonal,
            p,
            q,
        }
    }

    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }

    /// log-free size of the image `A (Z_m^cols)`, as a product of cyclic orders.
    pub fn image_orders(&self) -> Vec<u64> {
        let m = self.modulus as i64;
        self.diagonal.iter().map(|d| (m / d.gcd(&m)) as u64).collect()
    }

    /// Some `x` with `A x = y`, or `None` when `y` is outside the image.
    pub fn solve(&self, y: &[i64]) -> Option<Vec<i64>> {
        assert_eq!(y.len(), self.rows);
        let m = self.modulus as i64;
        let w = self.p.mul_vec(y);
        let mut v = vec![0i64; self.cols];
        for (i, &wi) in w.iter().enumerate() {
            if i < self.rank() {
                let di = self.diagonal[i];
                let g = di.gcd(&m);
                if wi % g != 0 {
                    return None;
                }
                let mg = m / g;
                let inv = mod_inverse((di / g).rem_euclid(mg), mg);
                v[i] = ((wi / g) * inv).rem_euclid(mg);
            } else if wi != 0 {
                return None;
            }
        }
        Some(self.q.mul_vec(&v))
    }

    /// Linear functionals `(row, modulus)` that vanish exactly on the image:
    /// `y` is in the image iff `row . y = 0 mod modulus` for every pair.
    pub fn obstructions(&self) -> Vec<(Vec<i64>, u32)> {
        let m = self.modulus as i64;
        let mut out = Vec::new();
        for i in 0..self.rows {
            let modulus = if i < self.rank() { self.diagonal[i].gcd(&m) } else { m };
            if modulus == 1 {
                continue;
            }
            let row = (0..self.rows).map(|c| self.p.get(i, c) % modulus).collect();
            out.push((row, modulus as u32));
        }
        out
    }

    /// Generators of the kernel together with their additive orders. The kernel
    /// is their internal direct sum.
    pub fn kernel_generators(&self) -> Vec<(Vec<i64>, u64)> {
        let m = self.modulus as i64;
        let mut gens = Vec::new();
        for j in 0..self.cols {
            let (scale, order) = if j < self.rank() {
                let g = self.diagonal[j].gcd(&m);
                if g == 1 {
                    continue;
                }
                (m / g, g)
            } else {
                (1, m)
            };
            let mut e = vec![0i64; self.cols];
            e[j] = scale;
            gens.push((self.q.mul_vec(&e), order as u64));
        }
        gens
    }
}

fn mod_inverse(a: i64, m: i64) -> i64 {
    if m == 1 {
        return 0;
    }
    let e = a.extended_gcd(&m);
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn from_rows(m: u32, rows: &[&[i64]]) -> ModMatrix {
        let mut a = ModMatrix::zeros(m, rows.len(), rows[0].len());
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                a.set(r, c, v);
            }
        }
        a
    }

    #[test]
    fn composite_modulus_solving() {
        // 2x = 1 has no solution mod 4, 2x = 2 does.
        let a = from_rows(4, &[&[2]]);
        let d = Diagonalization::new(&a);
        assert!(d.solve(&[1]).is_none());
        let x = d.solve(&[2]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![2]);
        assert_eq!(d.image_orders(), vec![2]);
        let ker = d.kernel_generators();
        assert_eq!(ker.len(), 1);
        assert_eq!(ker[0].1, 2);
    }

    #[test]
    fn rank_over_z2() {
        let a = from_rows(2, &[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]);
        let d = Diagonalization::new(&a);
        assert_eq!(d.rank(), 2);
        assert!(d.solve(&[1, 1, 0]).is_some());
        assert!(d.solve(&[1, 0, 0]).is_none());
    }

    proptest! {
        #[test]
        fn solve_agrees_with_brute_force(
            m in 2u32..7,
            entries in proptest::collection::vec(0i64..6, 6),
            target in proptest::collection::vec(0i64..6, 3),
        ) {
            let mut a = ModMatrix::zeros(m, 3, 2);
            for (i, v) in entries.iter().enumerate() {
                a.set(i / 2, i % 2, *v);
            }
            let y: Vec<i64> = target.iter().map(|v| v.rem_euclid(m as i64)).collect();
            let d = Diagonalization::new(&a);
            let mut brute = false;
            let mut image = std::collections::HashSet::new();
            let mut kernel = 0u64;
            for x0 in 0..m as i64 {
                for x1 in 0..m as i64 {
                    let ax = a.mul_vec(&[x0, x1]);
                    if ax == y { brute = true; }
                    if ax.iter().all(|&v| v == 0) { kernel += 1; }
                    image.insert(ax);
                }
            }
            match d.solve(&y) {
                Some(x) => prop_assert_eq!(a.mul_vec(&x), y.clone()),
                None => prop_assert!(!brute),
            }
            prop_assert_eq!(d.image_orders().iter().product::<u64>(), image.len() as u64);
            let gens = d.kernel_generators();
            prop_assert_eq!(gens.iter().map(|g| g.1).product::<u64>(), kernel);
            let in_image = |v: &Vec<i64>| d.obstructions().iter().all(|(row, md)| {
                row.iter().zip(v).map(|(a, b)| a * b).sum::<i64>().rem_euclid(*md as i64) == 0
            });
            prop_assert_eq!(in_image(&y), brute);
            for (g, _) in gens {
                prop_assert!(a.mul_vec(&g).iter().all(|&v| v == 0));
            }
        }
    }
}
