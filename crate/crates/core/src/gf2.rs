//! Bit-packed dense matrices over GF(2).

/// Number of 64-bit words needed to hold `bits` bits.
#[inline]
pub fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

#[inline]
pub fn get_bit(words: &[u64], i: usize) -> bool {
    (words[i >> 6] >> (i & 63)) & 1 == 1
}

#[inline]
pub fn set_bit(words: &mut [u64], i: usize, value: bool) {
    let mask = 1u64 << (i & 63);
    if value {
        words[i >> 6] |= mask;
    } else {
        words[i >> 6] &= !mask;
    }
}

/// Row-major bit matrix; each row occupies `stride` words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols).max(1);
        BitMatrix { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        get_bit(self.row(r), c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        let s = self.stride;
        set_bit(&mut self.data[r * s..(r + 1) * s], c, value)
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [u64] {
        let s = self.stride;
        &mut self.data[r * s..(r + 1) * s]
    }

    /// Rank by in-place Gaussian elimination.
    pub fn rank_in_place(&mut self) -> usize {
        let mut rank = 0;
        let stride = self.stride;
        let cap = self.rows.min(self.cols);
        for col in 0..self.cols {
            if rank == cap {
                break;
            }
            let w = col >> 6;
            let mask = 1u64 << (col & 63);
            let Some(pivot) = (rank..self.rows).find(|&r| self.data[r * stride + w] & mask != 0) else {
                continue;
            };
            if pivot != rank {
                for k in 0..stride {
                    self.data.swap(pivot * stride + k, rank * stride + k);
                }
            }
            for r in rank + 1..self.rows {
                if self.data[r * stride + w] & mask != 0 {
                    // only words from `w` on can be nonzero in the pivot row
                    for k in w..stride {
                        let v = self.data[rank * stride + k];
                        self.data[r * stride + k] ^= v;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn rank(&self) -> usize {
        self.clone().rank_in_place()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_rank(rows: &[Vec<bool>]) -> usize {
        // Rank over GF(2) via brute-force span growth.
        let mut basis: Vec<Vec<bool>> = Vec::new();
        let mut span: std::collections::HashSet<Vec<bool>> = std::collections::HashSet::new();
        let cols = rows.first().map_or(0, |r| r.len());
        span.insert(vec![false; cols]);
        for r in rows {
            if !span.contains(r) {
                basis.push(r.clone());
                let old: Vec<Vec<bool>> = span.iter().cloned().collect();
                for v in old {
                    span.insert(v.iter().zip(r).map(|(a, b)| a ^ b).collect());
                }
            }
        }
        basis.len()
    }

    #[test]
    fn identity_has_full_rank() {
        let mut m = BitMatrix::zeros(70, 70);
        for i in 0..70 {
            m.set(i, i, true);
        }
        assert_eq!(m.rank(), 70);
    }

    proptest! {
        #[test]
        fn rank_matches_span_enumeration(bits in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 9), 1..8)) {
            let mut m = BitMatrix::zeros(bits.len(), 9);
            for (r, row) in bits.iter().enumerate() {
                for (c, &b) in row.iter().enumerate() {
                    m.set(r, c, b);
                }
            }
            prop_assert_eq!(m.rank(), naive_rank(&bits));
        }
    }
}
