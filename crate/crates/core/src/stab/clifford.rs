use std::sync::OnceLock;

use rand::Rng;

use super::pauli::{mul_into, Pauli, PauliString};
use crate::{Error, Result};

/// Order of the two-qubit Clifford group modulo global phase.
pub const TWO_QUBIT_CLIFFORD_COUNT: usize = 11_520;

/// One- or two-qubit Clifford unitary, stored as its conjugation tableau:
/// the signed images of `X_0, Z_0[, X_1, Z_1]`.
///
/// A lookup table maps each of the `4^arity` local Pauli patterns (bit layout
/// `x_0 | z_0 << 1 | x_1 << 2 | z_1 << 3`) to its signed image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordGate {
    arity: usize,
    images: Vec<PauliString>,
    table: Vec<(u8, bool)>,
}

#[inline]
fn nibble_of(p: &PauliString) -> u8 {
    let mut v = 0u8;
    for site in 0..p.len() {
        let (x, z) = p.get(site).bits();
        v |= (x as u8) << (2 * site);
        v |= (z as u8) << (2 * site + 1);
    }
    v
}

fn pauli_of(n: usize, v: u8, negative: bool) -> PauliString {
    let paulis: Vec<Pauli> = (0..n)
        .map(|s| Pauli::from_bits(v >> (2 * s) & 1 == 1, v >> (2 * s + 1) & 1 == 1))
        .collect();
    PauliString::from_paulis(&paulis, negative)
}

/// Symplectic form on packed local patterns.
#[inline]
fn omega(u: u8, v: u8) -> bool {
    let (ux, uz) = (u & 0b0101, (u >> 1) & 0b0101);
    let (vx, vz) = (v & 0b0101, (v >> 1) & 0b0101);
    ((ux & vz) ^ (uz & vx)).count_ones() % 2 == 1
}

impl CliffordGate {
    /// Builds a gate from the signed images of `X_0, Z_0, X_1, Z_1` (in that
    /// order). The images must reproduce the canonical commutation relations.
    pub fn from_images(images: Vec<PauliString>) -> Result<Self> {
        let arity = images.len() / 2;
        if !(arity == 1 || arity == 2) || images.len() != 2 * arity {
            return Err(Error::InvalidParameter(format!(
                "expected 2 or 4 generator images, got {}",
                images.len()
            )));
        }
        if images.iter().any(|p| p.len() != arity) {
            return Err(Error::InvalidParameter("image acts on the wrong number of qubits".into()));
        }
        for i in 0..images.len() {
            for j in 0..images.len() {
                // X_k and Z_k anticommute; everything else commutes.
                let expect_anti = i != j && i / 2 == j / 2;
                if images[i].commutes_with(&images[j]) == expect_anti {
                    return Err(Error::InvalidParameter(
                        "images violate the symplectic condition".into(),
                    ));
                }
            }
        }
        let table = (0..1u8 << (2 * arity)).map(|pattern| Self::conjugate_pattern(&images, pattern)).collect();
        Ok(CliffordGate { arity, images, table })
    }

    /// Signed image of the Hermitian local Pauli with bit pattern `pattern`.
    fn conjugate_pattern(images: &[PauliString], pattern: u8) -> (u8, bool) {
        let arity = images.len() / 2;
        let mut acc = PauliString::identity(arity);
        // Y = i X Z on each site.
        let mut ipow: u32 = (0..arity)
            .map(|s| ((pattern >> (2 * s)) & (pattern >> (2 * s + 1)) & 1) as u32)
            .sum();
        for (k, img) in images.iter().enumerate() {
            if pattern >> k & 1 == 1 {
                ipow += 2 * img.is_negative() as u32;
                ipow += mul_into(&mut acc.x, &mut acc.z, &img.x, &img.z);
            }
        }
        debug_assert_eq!(ipow % 2, 0, "image of a Hermitian Pauli must be Hermitian");
        (nibble_of(&acc), ipow % 4 == 2)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Signed images of `X_0, Z_0[, X_1, Z_1]`.
    pub fn images(&self) -> &[PauliString] {
        &self.images
    }

    /// Conjugation `U P U^dagger` of a local Pauli pattern.
    #[inline]
    pub(crate) fn lookup(&self, pattern: u8) -> (u8, bool) {
        self.table[pattern as usize]
    }

    /// Conjugates a Pauli string acting on the gate's own qubits.
    pub fn conjugate(&self, p: &PauliString) -> Result<PauliString> {
        if p.len() != self.arity {
            return Err(Error::LengthMismatch { expected: self.arity, got: p.len() });
        }
        let (bits, neg) = self.lookup(nibble_of(p));
        Ok(pauli_of(self.arity, bits, neg ^ p.is_negative()))
    }

    pub fn identity(arity: usize) -> Self {
        let images = (0..arity)
            .flat_map(|s| [PauliString::single(arity, s, Pauli::X), PauliString::single(arity, s, Pauli::Z)])
            .collect();
        Self::from_images(images).expect("identity tableau is symplectic")
    }

    fn parse_images(images: &[&str]) -> Self {
        Self::from_images(images.iter().map(|s| s.parse().unwrap()).collect())
            .expect("standard gate tableau is symplectic")
    }

    pub fn hadamard() -> Self {
        Self::parse_images(&["+Z", "+X"])
    }

    /// Phase gate `S = diag(1, i)`.
    pub fn phase() -> Self {
        Self::parse_images(&["+Y", "+Z"])
    }

    pub fn pauli_x() -> Self {
        Self::parse_images(&["+X", "-Z"])
    }

    /// CNOT with control on the first site.
    pub fn cnot() -> Self {
        Self::parse_images(&["+XX", "+ZI", "+IX", "+ZZ"])
    }

    pub fn cz() -> Self {
        Self::parse_images(&["+XZ", "+ZI", "+ZX", "+IZ"])
    }

    pub fn swap() -> Self {
        Self::parse_images(&["+IX", "+IZ", "+XI", "+ZI"])
    }

    /// Inverse gate, read off the lookup table.
    pub fn inverse(&self) -> Self {
        let gens: Vec<u8> = (0..2 * self.arity).map(|k| 1u8 << k).collect();
        let images = gens
            .iter()
            .map(|&g| {
                let (pattern, (_, neg)) = self
                    .table
                    .iter()
                    .enumerate()
                    .find(|(_, (bits, _))| *bits == g)
                    .expect("Clifford conjugation is a bijection");
                pauli_of(self.arity, pattern as u8, *neg)
            })
            .collect();
        Self::from_images(images).expect("inverse of a Clifford is Clifford")
    }

    /// Composite gate `other ∘ self` (apply `self` first).
    pub fn then(&self, other: &CliffordGate) -> Result<Self> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch { arity: self.arity, sites: other.arity });
        }
        // Heisenberg images compose as U2 U1 P U1† U2†.
        let images = self.images.iter().map(|img| other.conjugate(img)).collect::<Result<Vec<_>>>()?;
        Self::from_images(images)
    }

    /// Canonical key identifying the group element modulo global phase:
    /// image patterns and signs packed into an integer.
    pub fn canonical_key(&self) -> u32 {
        self.images.iter().enumerate().fold(0u32, |key, (k, img)| {
            key | (nibble_of(img) as u32) << (4 * k) | (img.is_negative() as u32) << (16 + k)
        })
    }

    /// Exactly uniform sample from the two-qubit Clifford group.
    ///
    /// The images of `X_0, Z_0, X_1, Z_1` are drawn in turn, each uniformly
    /// among the Pauli patterns compatible with the symplectic constraints set
    /// by the earlier choices (15 · 8 · 3 · 2 = 720 symplectic maps), followed
    /// by four independent uniform signs.
    pub fn sample_two_qubit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut chosen: [u8; 4] = [0; 4];
        for k in 0..4 {
            let candidates: Vec<u8> = (1u8..16)
                .filter(|&v| {
                    (0..k).all(|j| {
                        // partner of X_i is Z_i (index ^ 1)
                        let want_anti = j == (k ^ 1);
                        omega(chosen[j], v) == want_anti
                    })
                })
                .filter(|&v| k != 2 || !Self::in_span(&chosen[..2], v))
                .collect();
            chosen[k] = candidates[rng.gen_range(0..candidates.len())];
        }
        let signs: u8 = rng.gen_range(0..16);
        let images = chosen.iter().enumerate().map(|(k, &v)| pauli_of(2, v, signs >> k & 1 == 1)).collect();
        Self::from_images(images).expect("sampled tableau is symplectic")
    }

    fn in_span(basis: &[u8], v: u8) -> bool {
        (0u8..1 << basis.len()).any(|mask| {
            basis.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).fold(0u8, |a, (_, &b)| a ^ b) == v
        })
    }
}

/// Uniform two-qubit Clifford drawn by index from the enumerated group.
///
/// Exactly uniform like [`CliffordGate::sample_two_qubit`] but avoids rebuilding
/// the tableau; this is the sampler used by the circuit ensembles.
pub fn random_two_qubit_clifford<R: Rng + ?Sized>(rng: &mut R) -> &'static CliffordGate {
    static GROUP: OnceLock<Vec<CliffordGate>> = OnceLock::new();
    let group = GROUP.get_or_init(enumerate_two_qubit_cliffords);
    &group[rng.gen_range(0..group.len())]
}

/// All 11 520 two-qubit Cliffords (modulo phase), enumerated by tableau.
pub fn enumerate_two_qubit_cliffords() -> Vec<CliffordGate> {
    let mut out = Vec::with_capacity(TWO_QUBIT_CLIFFORD_COUNT);
    for x0 in 1u8..16 {
        for z0 in (1u8..16).filter(|&v| omega(x0, v)) {
            for x1 in (1u8..16).filter(|&v| !omega(x0, v) && !omega(z0, v)) {
                for z1 in (1u8..16).filter(|&v| !omega(x0, v) && !omega(z0, v) && omega(x1, v)) {
                    for signs in 0u8..16 {
                        let images = [x0, z0, x1, z1]
                            .iter()
                            .enumerate()
                            .map(|(k, &v)| pauli_of(2, v, signs >> k & 1 == 1))
                            .collect();
                        out.push(CliffordGate::from_images(images).expect("enumerated tableau is symplectic"));
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use std::collections::HashSet;

    #[test]
    fn enumeration_has_group_order() {
        let all = enumerate_two_qubit_cliffords();
        assert_eq!(all.len(), TWO_QUBIT_CLIFFORD_COUNT);
        let keys: HashSet<u32> = all.iter().map(|g| g.canonical_key()).collect();
        assert_eq!(keys.len(), TWO_QUBIT_CLIFFORD_COUNT);
    }

    #[test]
    fn inverse_undoes_gate() {
        let mut rng = stream(11, 0);
        for _ in 0..200 {
            let g = CliffordGate::sample_two_qubit(&mut rng);
            let id = g.then(&g.inverse()).unwrap();
            assert_eq!(id, CliffordGate::identity(2));
        }
    }

    #[test]
    fn sampled_images_are_hermitian_and_symplectic() {
        let mut rng = stream(5, 1);
        for _ in 0..100 {
            let g = CliffordGate::sample_two_qubit(&mut rng);
            let xi = g.conjugate(&"XI".parse().unwrap()).unwrap();
            assert!(!xi.is_identity());
            assert!(!xi.commutes_with(&g.conjugate(&"ZI".parse().unwrap()).unwrap()));
        }
    }

    #[test]
    fn identical_seeds_give_identical_gates() {
        let a = CliffordGate::sample_two_qubit(&mut stream(99, 7));
        let b = CliffordGate::sample_two_qubit(&mut stream(99, 7));
        assert_eq!(a, b);
    }

    #[test]
    fn conjugation_tables() {
        let h = CliffordGate::hadamard();
        assert_eq!(h.conjugate(&"Y".parse().unwrap()).unwrap().to_string(), "-Y");
        let s = CliffordGate::phase();
        assert_eq!(s.conjugate(&"Y".parse().unwrap()).unwrap().to_string(), "-X");
        let cx = CliffordGate::cnot();
        assert_eq!(cx.conjugate(&"IZ".parse().unwrap()).unwrap().to_string(), "+ZZ");
        assert_eq!(cx.conjugate(&"YI".parse().unwrap()).unwrap().to_string(), "+YX");
    }
}
