use std::fmt;
use std::ops::Range;

/// Dense boolean matrix, rows packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        BitMatrix { rows, cols, words, data: vec![0; rows * words] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::new(n, n);
        for i in 0..n {
            m.set(i, i);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize) {
        self.data[i * self.words + j / 64] |= 1 << (j % 64);
    }

    pub fn unset(&mut self, i: usize, j: usize) {
        self.data[i * self.words + j / 64] &= !(1 << (j % 64));
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.words..(i + 1) * self.words]
    }

    fn or_rows(&mut self, dst: usize, src: usize) {
        let w = self.words;
        if dst == src {
            return;
        }
        let (d, s) = if dst < src {
            let (a, b) = self.data.split_at_mut(src * w);
            (&mut a[dst * w..(dst + 1) * w], &b[..w])
        } else {
            let (a, b) = self.data.split_at_mut(dst * w);
            (&mut b[..w], &a[src * w..(src + 1) * w])
        };
        for (x, y) in d.iter_mut().zip(s) {
            *x |= *y;
        }
    }

    pub fn union_with(&mut self, other: &BitMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x |= *y;
        }
    }

    pub fn union(&self, other: &BitMatrix) -> BitMatrix {
        let mut m = self.clone();
        m.union_with(other);
        m
    }

    pub fn intersect(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for (x, y) in m.data.iter_mut().zip(&other.data) {
            *x &= *y;
        }
        m
    }

    /// Boolean product `self * other`.
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = BitMatrix::new(self.rows, other.cols);
        for i in 0..self.rows {
            for (wi, &word) in self.row(i).iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let k = wi * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let src = other.row(k);
                    let dst = &mut out.data[i * out.words..(i + 1) * out.words];
                    for (x, y) in dst.iter_mut().zip(src) {
                        *x |= *y;
                    }
                }
            }
        }
        out
    }

    /// Reflexive-transitive closure of a square matrix.
    pub fn star(&self) -> BitMatrix {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        for i in 0..self.rows {
            m.set(i, i);
        }
        for k in 0..self.rows {
            for i in 0..self.rows {
                if m.get(i, k) {
                    m.or_rows(i, k);
                }
            }
        }
        m
    }

    pub fn is_subset(&self, other: &BitMatrix) -> bool {
        self.data.iter().zip(&other.data).all(|(x, y)| x & !y == 0)
    }

    pub fn is_empty(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|x| x.count_ones() as usize).sum()
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::new(self.cols, self.rows);
        for (i, j) in self.ones() {
            t.set(j, i);
        }
        t
    }

    pub fn submatrix(&self, rows: Range<usize>, cols: Range<usize>) -> BitMatrix {
        let mut m = BitMatrix::new(rows.len(), cols.len());
        for (a, i) in rows.clone().enumerate() {
            for (b, j) in cols.clone().enumerate() {
                if self.get(i, j) {
                    m.set(a, b);
                }
            }
        }
        m
    }

    /// Set entries in row-major order.
    pub fn ones(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.rows).flat_map(move |i| {
            self.row(i).iter().enumerate().flat_map(move |(wi, &word)| {
                let mut bits = word;
                std::iter::from_fn(move || {
                    if bits == 0 {
                        return None;
                    }
                    let j = wi * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some((i, j))
                })
            })
        })
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: String = (0..self.cols).map(|j| if self.get(i, j) { '1' } else { '.' }).collect();
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn from_bits(n: usize, bits: &[bool]) -> BitMatrix {
        let mut m = BitMatrix::new(n, n);
        for (k, &b) in bits.iter().enumerate() {
            if b {
                m.set(k / n, k % n);
            }
        }
        m
    }

    fn naive_mul(a: &BitMatrix, b: &BitMatrix) -> BitMatrix {
        let mut c = BitMatrix::new(a.rows(), b.cols());
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                if (0..a.cols()).any(|k| a.get(i, k) && b.get(k, j)) {
                    c.set(i, j);
                }
            }
        }
        c
    }

    proptest! {
        #[test]
        fn product_matches_naive(n in 1usize..80, seed in prop::collection::vec(any::<bool>(), 6400 * 2)) {
            let a = from_bits(n, &seed[..n * n]);
            let b = from_bits(n, &seed[6400..6400 + n * n]);
            prop_assert_eq!(a.mul(&b), naive_mul(&a, &b));
        }

        #[test]
        fn star_is_closed(n in 1usize..40, seed in prop::collection::vec(prop::bool::weighted(0.05), 1600)) {
            let a = from_bits(n, &seed[..n * n]);
            let s = a.star();
            prop_assert!(a.is_subset(&s));
            prop_assert!(BitMatrix::identity(n).is_subset(&s));
            prop_assert_eq!(s.mul(&s), s.clone());
        }
    }

    #[test]
    fn ones_and_transpose() {
        let mut m = BitMatrix::new(2, 70);
        m.set(0, 69);
        m.set(1, 3);
        assert_eq!(m.ones().collect::<Vec<_>>(), [(0, 69), (1, 3)]);
        assert!(m.transpose().get(69, 0));
        assert_eq!(m.count_ones(), 2);
        m.unset(0, 69);
        assert_eq!(m.count_ones(), 1);
    }
}
