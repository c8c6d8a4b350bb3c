use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use super::characters::{partitions, CharacterCache, Partition};
use super::perm::{all_permutations, Permutation};
use crate::{Error, Result};

/// Largest replica number for which tables are built.
pub const MAX_Q: usize = 8;
/// Largest replica number for the full Gram-matrix cross-check.
pub const MAX_GRAM_Q: usize = 5;

/// Exact Weingarten function `Wg_D` on `S_Q`, keyed by cycle type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeingartenTable {
    q: usize,
    dim: BigInt,
    values: BTreeMap<Partition, BigRational>,
}

impl WeingartenTable {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn dim(&self) -> &BigInt {
        &self.dim
    }

    pub fn values(&self) -> &BTreeMap<Partition, BigRational> {
        &self.values
    }

    pub fn by_cycle_type(&self, mu: &Partition) -> Option<&BigRational> {
        self.values.get(mu)
    }

    pub fn get(&self, g: &Permutation) -> &BigRational {
        let mu = Partition::new(g.cycle_lengths()).expect("cycle lengths form a partition");
        &self.values[&mu]
    }
}

fn check_args(q: usize, dim: u64) -> Result<()> {
    if q == 0 || q > MAX_Q {
        return Err(Error::GuardExceeded(format!("Q = {q} outside 1..={MAX_Q}")));
    }
    if dim < q as u64 {
        return Err(Error::SingularDimension { dim, q });
    }
    Ok(())
}

fn rat(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

/// `Wg_D(g) = (1/Q!) Σ_λ χ_λ(e) χ_λ(g) / Π_{(i,j)∈λ} (D − i + j)`.
pub fn weingarten_from_characters(q: usize, dim: u64) -> Result<WeingartenTable> {
    check_args(q, dim)?;
    let d = BigInt::from(dim);
    let lambdas = partitions(q);
    let identity = Partition::new(vec![1; q])?;
    let mut cache = CharacterCache::new();
    let fact: BigInt = (1..=q).map(BigInt::from).product();
    let mut values = BTreeMap::new();
    for mu in partitions(q) {
        let mut sum = BigRational::zero();
        for lam in &lambdas {
            let content: BigInt = lam.cells().map(|(i, j)| &d + BigInt::from(j) - BigInt::from(i)).product();
            let num = BigInt::from(cache.character(lam, &identity)?) * cache.character(lam, &mu)?;
            sum += BigRational::new(num, content);
        }
        values.insert(mu, sum / rat(fact.clone()));
    }
    Ok(WeingartenTable { q, dim: d, values })
}

/// Solves `Σ_τ D^{C(σ τ⁻¹)} w(τ) = δ_{σ,e}` over all of `S_Q` by exact
/// Gaussian elimination on the `Q!×Q!` Gram matrix, then reads the
/// solution off by cycle type (failing if it is not a class function).
pub fn weingarten_from_gram(q: usize, dim: u64) -> Result<WeingartenTable> {
    check_args(q, dim)?;
    if q > MAX_GRAM_Q {
        return Err(Error::GuardExceeded(format!("Gram inversion limited to Q <= {MAX_GRAM_Q}")));
    }
    let perms = all_permutations(q);
    let n = perms.len();
    let d = BigInt::from(dim);
    let powers: Vec<BigRational> = (0..=q).map(|c| rat(Pow::pow(&d, c as u32))).collect();
    let mut a: Vec<Vec<BigRational>> = perms
        .iter()
        .map(|s| perms.iter().map(|t| powers[s.compose(&t.inverse()).cycle_count()].clone()).collect())
        .collect();
    let mut b: Vec<BigRational> = perms.iter().map(|s| if s.is_identity() { BigRational::one() } else { BigRational::zero() }).collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(Error::SingularDimension { dim, q })?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = BigRational::one() / &a[col][col];
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &inv;
            let (top, bottom) = if r < col { a.split_at_mut(col) } else { a.split_at_mut(r) };
            let (pivot_row, row) = if r < col { (&bottom[0], &mut top[r]) } else { (&top[col], &mut bottom[0]) };
            for c in col..n {
                if !pivot_row[c].is_zero() {
                    row[c] -= &f * &pivot_row[c];
                }
            }
            let delta = &f * &b[col];
            b[r] -= delta;
        }
    }
    let mut values: BTreeMap<Partition, BigRational> = BTreeMap::new();
    for (i, g) in perms.iter().enumerate() {
        let w = &b[i] / &a[i][i];
        let mu = Partition::new(g.cycle_lengths())?;
        match values.get(&mu) {
            Some(prev) if *prev != w => {
                return Err(Error::Degenerate(format!("Gram solution is not a class function at {mu:?}")));
            }
            Some(_) => {}
            None => {
                values.insert(mu, w);
            }
        }
    }
    Ok(WeingartenTable { q, dim: d, values })
}

/// Table from the character formula; for `Q ≤ 5` it is also derived from the
/// Gram matrix and the two must agree exactly.
pub fn weingarten_table(q: usize, dim: u64) -> Result<WeingartenTable> {
    let table = weingarten_from_characters(q, dim)?;
    if q <= MAX_GRAM_Q {
        let gram = weingarten_from_gram(q, dim)?;
        if gram != table {
            return Err(Error::Degenerate(format!("character and Gram routes disagree at Q={q}, D={dim}")));
        }
    }
    Ok(table)
}

/// Residual of `Σ_{g₁} Wg(g₁⁻¹g₂) D^{C(g₁)} = δ_{g₂,e}` for every `g₂`;
/// returns the `g₂` at which it fails, if any.
pub fn orthogonality_violation(table: &WeingartenTable) -> Option<Permutation> {
    let perms = all_permutations(table.q);
    let powers: Vec<BigRational> = (0..=table.q).map(|c| rat(Pow::pow(&table.dim, c as u32))).collect();
    perms.iter().find(|g2| {
        let s: BigRational = perms.iter().map(|g1| table.get(&g1.left_divide(g2)) * &powers[g1.cycle_count()]).sum();
        let want = if g2.is_identity() { BigRational::one() } else { BigRational::zero() };
        s != want
    }).cloned()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn q1_and_q2_closed_forms() {
        for dim in [1u64, 2, 4, 9] {
            let t = weingarten_table(1, dim).unwrap();
            assert_eq!(t.get(&Permutation::identity(1)), &r(1, dim as i64));
        }
        for dim in [2i64, 4, 9, 25] {
            let t = weingarten_table(2, dim as u64).unwrap();
            assert_eq!(t.get(&Permutation::identity(2)), &r(1, dim * dim - 1));
            assert_eq!(t.get(&Permutation::transposition(2, 0, 1).unwrap()), &r(-1, dim * (dim * dim - 1)));
        }
    }

    #[test]
    fn q3_identity_value() {
        let d = 4i64;
        let t = weingarten_table(3, d as u64).unwrap();
        assert_eq!(t.get(&Permutation::identity(3)), &r(d * d - 2, d * (d * d - 1) * (d * d - 4)));
    }

    #[test]
    fn guards() {
        assert_eq!(weingarten_table(3, 2), Err(Error::SingularDimension { dim: 2, q: 3 }));
        assert!(matches!(weingarten_table(9, 100), Err(Error::GuardExceeded(_))));
        assert!(matches!(weingarten_from_gram(6, 100), Err(Error::GuardExceeded(_))));
    }

    #[test]
    fn both_routes_agree_and_orthogonality_holds() {
        for q in 1..=4 {
            for dim in [4u64, 9, 25] {
                let t = weingarten_table(q, dim).unwrap();
                assert_eq!(orthogonality_violation(&t), None);
            }
        }
    }

    #[test]
    fn larger_tables_satisfy_orthogonality() {
        for q in [6, 7] {
            let t = weingarten_from_characters(q, 49).unwrap();
            assert_eq!(t.values().len(), partitions(q).len());
            if q == 6 {
                assert_eq!(orthogonality_violation(&t), None);
            }
        }
    }
}
