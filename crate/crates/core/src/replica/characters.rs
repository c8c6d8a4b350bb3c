use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::One;

use crate::{Error, Result};

/// Integer partition `λ ⊢ Q` with weakly decreasing positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(format!("{parts:?} is not a partition")));
        }
        Ok(Partition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Cells `(i, j)` of the Young diagram, zero-based row and column.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parts.iter().enumerate().flat_map(|(i, &len)| (0..len).map(move |j| (i, j)))
    }

    fn conjugate_parts(&self) -> Vec<usize> {
        let cols = self.parts.first().copied().unwrap_or(0);
        (0..cols).map(|j| self.parts.iter().filter(|&&p| p > j).count()).collect()
    }

    /// Dimension of the irreducible representation via the hook-length
    /// formula.
    pub fn hook_dimension(&self) -> BigInt {
        let conj = self.conjugate_parts();
        let mut hooks = BigInt::one();
        for (i, j) in self.cells() {
            hooks *= self.parts[i] - j + conj[j] - i - 1;
        }
        let fact: BigInt = (1..=self.size()).map(BigInt::from).product();
        fact / hooks
    }

    /// Size of the conjugacy class with this cycle type.
    pub fn class_size(&self) -> BigInt {
        let fact: BigInt = (1..=self.size()).map(BigInt::from).product();
        let mut denom = BigInt::one();
        let mut i = 0;
        while i < self.parts.len() {
            let len = self.parts[i];
            let mult = self.parts[i..].iter().take_while(|&&p| p == len).count();
            denom *= BigInt::from(len).pow(mult as u32);
            denom *= (1..=mult).map(BigInt::from).product::<BigInt>();
            i += mult;
        }
        fact / denom
    }
}

/// All partitions of `q`, in reverse lexicographic order (`(q)` first).
pub fn partitions(q: usize) -> Vec<Partition> {
    fn rec(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition { parts: cur.clone() });
            return;
        }
        for part in (1..=rem.min(max)).rev() {
            cur.push(part);
            rec(rem - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = vec![];
    rec(q, q, &mut vec![], &mut out);
    out
}

/// Memoised Murnaghan–Nakayama evaluation of irreducible characters.
#[derive(Default)]
pub struct CharacterCache {
    memo: HashMap<(Vec<usize>, Vec<usize>), i64>,
}

impl CharacterCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// `χ_λ` on the class of cycle type `μ`.
    pub fn character(&mut self, lambda: &Partition, mu: &Partition) -> Result<i64> {
        if lambda.size() != mu.size() {
            return Err(Error::PartitionSizeMismatch(lambda.size(), mu.size()));
        }
        Ok(self.mn(&lambda.parts, &mu.parts))
    }

    fn mn(&mut self, lambda: &[usize], mu: &[usize]) -> i64 {
        let Some((&r, rest)) = mu.split_first() else {
            return 1;
        };
        let key = (lambda.to_vec(), mu.to_vec());
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        // beta-set: distinct first-column hook lengths
        let k = lambda.len();
        let beta: Vec<usize> = lambda.iter().enumerate().map(|(i, &l)| l + k - 1 - i).collect();
        let mut total = 0;
        for (i, &b) in beta.iter().enumerate() {
            if b < r || beta.contains(&(b - r)) {
                continue;
            }
            let target = b - r;
            let crossed = beta.iter().filter(|&&c| c > target && c < b).count();
            let sign = if crossed % 2 == 0 { 1 } else { -1 };
            let mut nb = beta.clone();
            nb[i] = target;
            nb.sort_unstable_by(|a, b| b.cmp(a));
            let shape: Vec<usize> =
                nb.iter().enumerate().map(|(j, &v)| v - (k - 1 - j)).filter(|&p| p > 0).collect();
            total += sign * self.mn(&shape, rest);
        }
        self.memo.insert(key, total);
        total
    }
}

/// `χ_λ(μ)` with a fresh cache.
pub fn character(lambda: &Partition, mu: &Partition) -> Result<i64> {
    CharacterCache::new().character(lambda, mu)
}
