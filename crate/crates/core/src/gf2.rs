//! Bit-packed vectors and matrices over GF(2).

/// A fixed-length bit vector packed into 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_indices(len: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in idx {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        if self.get(i) != bit {
            self.flip(i);
        }
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    #[inline]
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }
}

/// A GF(2) matrix stored by columns, so that `M x` is the xor of the columns
/// selected by `x`.
#[derive(Debug, Clone)]
pub struct BitMatrix {
    rows: usize,
    columns: Vec<BitVec>,
}

impl BitMatrix {
    pub fn from_columns(rows: usize, columns: Vec<BitVec>) -> Self {
        debug_assert!(columns.iter().all(|c| c.len() == rows));
        BitMatrix { rows, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &BitVec {
        &self.columns[j]
    }

    pub fn mul(&self, x: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.rows);
        for j in x.ones() {
            out.xor_assign(&self.columns[j]);
        }
        out
    }

    /// Rank via elimination on a copy of the columns.
    pub fn rank(&self) -> usize {
        let mut basis: Vec<(usize, BitVec)> = Vec::new();
        for col in &self.columns {
            let mut v = col.clone();
            for (pivot, b) in &basis {
                if v.get(*pivot) {
                    v.xor_assign(b);
                }
            }
            let lead = v.ones().next();
            if let Some(p) = lead {
                for (_, b) in basis.iter_mut() {
                    if b.get(p) {
                        b.xor_assign(&v);
                    }
                }
                basis.push((p, v));
            }
        }
        basis.len()
    }
}
