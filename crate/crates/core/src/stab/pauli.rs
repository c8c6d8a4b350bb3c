use std::fmt;
use std::str::FromStr;

use crate::gf2::{get_bit, set_bit, words_for};
use crate::{Error, Result};

/// Single-site Pauli operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Power of `i` picked up when multiplying the Hermitian strings with bits
/// `(x1, z1)` and `(x2, z2)`; the first operand is overwritten with the
/// product bits. Returns the exponent mod 4.
#[inline]
pub(crate) fn mul_into(x1: &mut [u64], z1: &mut [u64], x2: &[u64], z2: &[u64]) -> u32 {
    let mut plus = 0u32;
    let mut minus = 0u32;
    for k in 0..x1.len() {
        let (a, b, c, d) = (x1[k], z1[k], x2[k], z2[k]);
        let y1 = a & b;
        let xo = a & !b;
        let zo = !a & b;
        plus += ((y1 & d & !c) | (xo & c & d) | (zo & c & !d)).count_ones();
        minus += ((y1 & c & !d) | (xo & !c & d) | (zo & c & d)).count_ones();
        x1[k] = a ^ c;
        z1[k] = b ^ d;
    }
    (plus + 4 * x1.len() as u32 * 64 - minus) % 4
}

/// Symplectic inner product of two bit-packed strings.
#[inline]
pub(crate) fn anticommutes(x1: &[u64], z1: &[u64], x2: &[u64], z2: &[u64]) -> bool {
    let mut acc = 0u64;
    for k in 0..x1.len() {
        acc ^= (x1[k] & z2[k]) ^ (z1[k] & x2[k]);
    }
    acc.count_ones() % 2 == 1
}

/// Hermitian n-qubit Pauli string with a sign, in binary-symplectic form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    pub(crate) x: Vec<u64>,
    pub(crate) z: Vec<u64>,
    negative: bool,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        debug_assert!(n >= 1, "Pauli strings act on at least one qubit");
        let w = words_for(n);
        PauliString { n, x: vec![0; w], z: vec![0; w], negative: false }
    }

    pub fn single(n: usize, site: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n);
        s.set(site, p);
        s
    }

    /// `Z_i Z_j` on `n` qubits.
    pub fn zz(n: usize, i: usize, j: usize) -> Self {
        let mut s = Self::single(n, i, Pauli::Z);
        s.set(j, Pauli::Z);
        s
    }

    pub fn from_paulis(paulis: &[Pauli], negative: bool) -> Self {
        let mut s = Self::identity(paulis.len());
        for (i, &p) in paulis.iter().enumerate() {
            s.set(i, p);
        }
        s.negative = negative;
        s
    }

    pub(crate) fn from_words(n: usize, x: Vec<u64>, z: Vec<u64>, negative: bool) -> Self {
        PauliString { n, x, z, negative }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, site: usize) -> Pauli {
        Pauli::from_bits(get_bit(&self.x, site), get_bit(&self.z, site))
    }

    pub fn set(&mut self, site: usize, p: Pauli) {
        let (x, z) = p.bits();
        set_bit(&mut self.x, site, x);
        set_bit(&mut self.z, site, z);
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// +1 or -1.
    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn set_negative(&mut self, negative: bool) {
        self.negative = negative;
    }

    pub fn negated(&self) -> Self {
        let mut s = self.clone();
        s.negative = !s.negative;
        s
    }

    /// True if every site carries the identity (sign is ignored).
    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    /// Rightmost site carrying a non-identity Pauli.
    pub fn right_end(&self) -> Option<usize> {
        for k in (0..self.x.len()).rev() {
            let w = self.x[k] | self.z[k];
            if w != 0 {
                return Some(k * 64 + 63 - w.leading_zeros() as usize);
            }
        }
        None
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        !anticommutes(&self.x, &self.z, &other.x, &other.z)
    }

    /// Product `self * other`, defined when the two strings commute (so the
    /// product is again Hermitian).
    pub fn try_mul(&self, other: &PauliString) -> Result<PauliString> {
        if self.n != other.n {
            return Err(Error::LengthMismatch { expected: self.n, got: other.n });
        }
        if !self.commutes_with(other) {
            return Err(Error::InvalidParameter(
                "product of anticommuting strings is not Hermitian".into(),
            ));
        }
        let mut out = self.clone();
        let ipow = mul_into(&mut out.x, &mut out.z, &other.x, &other.z)
            + 2 * self.negative as u32
            + 2 * other.negative as u32;
        debug_assert_eq!(ipow % 2, 0);
        out.negative = ipow % 4 == 2;
        Ok(out)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.negative { "-" } else { "+" })?;
        for i in 0..self.n {
            write!(f, "{}", self.get(i).symbol())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses strings such as `"+XZI"`, `"-YY"` or `"ZZ"`.
    fn from_str(s: &str) -> Result<Self> {
        let (negative, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let paulis = body
            .chars()
            .map(|c| match c {
                'I' | '_' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::InvalidParameter(format!("bad Pauli symbol {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if paulis.is_empty() {
            return Err(Error::InvalidParameter("empty Pauli string".into()));
        }
        Ok(Self::from_paulis(&paulis, negative))
    }
}
