use rand::seq::SliceRandom;
use rand::Rng;

use crate::{Error, Result};

/// Element of the symmetric group `S_Q`, stored by its images of `0..Q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let q = images.len();
        let mut seen = vec![false; q];
        for &v in &images {
            if v >= q || seen[v] {
                return Err(Error::InvalidParameter(format!("{images:?} is not a permutation")));
            }
            seen[v] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(q: usize) -> Self {
        Permutation { images: (0..q).collect() }
    }

    /// The cycle `0 → 1 → … → n−1 → 0` on the first `n` of `q` elements.
    pub fn cycle(q: usize, n: usize) -> Result<Self> {
        if n > q {
            return Err(Error::InvalidParameter(format!("cycle length {n} exceeds degree {q}")));
        }
        let mut images: Vec<usize> = (0..q).collect();
        for (i, img) in images.iter_mut().enumerate().take(n) {
            *img = (i + 1) % n;
        }
        Ok(Permutation { images })
    }

    pub fn transposition(q: usize, a: usize, b: usize) -> Result<Self> {
        if a >= q || b >= q || a == b {
            return Err(Error::InvalidParameter(format!("bad transposition ({a} {b}) in S_{q}")));
        }
        let mut images: Vec<usize> = (0..q).collect();
        images.swap(a, b);
        Ok(Permutation { images })
    }

    /// `k` disjoint `n`-cycles on consecutive blocks, identity on the rest:
    /// the boundary permutation for the `n`-th Renyi entropy with `k` copies.
    pub fn swap_boundary(q: usize, n: usize, k: usize) -> Result<Self> {
        if n * k > q || n == 0 {
            return Err(Error::InvalidParameter(format!("{k} cycles of length {n} do not fit in S_{q}")));
        }
        let mut images: Vec<usize> = (0..q).collect();
        for c in 0..k {
            for i in 0..n {
                images[c * n + i] = c * n + (i + 1) % n;
            }
        }
        Ok(Permutation { images })
    }

    pub fn random<R: Rng + ?Sized>(q: usize, rng: &mut R) -> Self {
        let mut images: Vec<usize> = (0..q).collect();
        images.shuffle(rng);
        Permutation { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// `self ∘ other`, i.e. `other` acts first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Permutation { images: other.images.iter().map(|&i| self.images[i]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v] = i;
        }
        Permutation { images }
    }

    /// `self⁻¹ ∘ other`.
    pub fn left_divide(&self, other: &Permutation) -> Permutation {
        self.inverse().compose(other)
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// Cycle lengths in weakly decreasing order.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let q = self.degree();
        let mut seen = vec![false; q];
        let mut out = vec![];
        for start in 0..q {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i];
                len += 1;
            }
            out.push(len);
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    /// Number of cycles, fixed points included.
    pub fn cycle_count(&self) -> usize {
        self.cycle_lengths().len()
    }

    /// Position in the lexicographic order of `S_Q` (Lehmer code).
    pub fn rank(&self) -> usize {
        let q = self.degree();
        let mut rank = 0;
        let mut used = vec![false; q];
        for (pos, &v) in self.images.iter().enumerate() {
            let smaller = (0..v).filter(|&u| !used[u]).count();
            rank = rank * (q - pos) + smaller;
            used[v] = true;
        }
        rank
    }
}

/// All of `S_Q` in lexicographic order, so `all(q)[g.rank()] == g`.
pub fn all_permutations(q: usize) -> Vec<Permutation> {
    let mut out = vec![];
    let mut cur: Vec<usize> = (0..q).collect();
    loop {
        out.push(Permutation { images: cur.clone() });
        // next lexicographic permutation
        let Some(i) = (1..q).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..q).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

pub fn factorial(q: usize) -> usize {
    (1..=q).product()
}
