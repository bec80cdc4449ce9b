use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("dimension mismatch: {left} vs {right}")]
pub struct DimensionError {
    pub left: usize,
    pub right: usize,
}

/// Fixed-width binary feature vector, packed into 64-bit words.
///
/// Bit `j` corresponds to registry index `j`. Unused high bits of the last
/// word are always zero, so word-wise XOR + popcount is an exact Hamming
/// distance.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MechanismVector {
    dim: usize,
    words: Vec<u64>,
}

impl MechanismVector {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, words: vec![0; dim.div_ceil(64)] }
    }

    /// Builds a vector with the given indices set. Panics on out-of-range
    /// indices.
    pub fn from_indices<I: IntoIterator<Item = usize>>(dim: usize, indices: I) -> Self {
        let mut v = Self::zeros(dim);
        for j in indices {
            v.set(j, true);
        }
        v
    }

    /// Parses a `0`/`1` string where the first character is index 0.
    pub fn from_bit_str(bits: &str) -> Option<Self> {
        let mut v = Self::zeros(bits.chars().count());
        for (j, c) in bits.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(j, true),
                _ => return None,
            }
        }
        Some(v)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, j: usize) -> bool {
        assert!(j < self.dim, "bit {j} out of range for dimension {}", self.dim);
        self.words[j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, j: usize, on: bool) {
        assert!(j < self.dim, "bit {j} out of range for dimension {}", self.dim);
        let mask = 1u64 << (j % 64);
        if on {
            self.words[j / 64] |= mask;
        } else {
            self.words[j / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, j: usize) {
        assert!(j < self.dim, "bit {j} out of range for dimension {}", self.dim);
        self.words[j / 64] ^= 1u64 << (j % 64);
    }

    /// Copy of `self` with bit `j` flipped.
    pub fn flipped(&self, j: usize) -> Self {
        let mut v = self.clone();
        v.flip(j);
        v
    }

    pub fn popcount(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Indices of set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    pub fn hamming(&self, other: &Self) -> Result<u32, DimensionError> {
        if self.dim != other.dim {
            return Err(DimensionError { left: self.dim, right: other.dim });
        }
        Ok(self.hamming_unchecked(other))
    }

    /// Hamming distance without the dimension check. Callers guarantee equal
    /// dimensions (e.g. vectors from one `RecordSet`).
    #[inline]
    pub fn hamming_unchecked(&self, other: &Self) -> u32 {
        debug_assert_eq!(self.dim, other.dim);
        self.words.iter().zip(&other.words).map(|(a, b)| (a ^ b).count_ones()).sum()
    }

    /// `0`/`1` string, index 0 first.
    pub fn to_bit_string(&self) -> String {
        (0..self.dim).map(|j| if self.get(j) { '1' } else { '0' }).collect()
    }

    /// Compact stable identifier: lowercase hex of the packed words, most
    /// significant word first.
    pub fn to_hex(&self) -> String {
        let width = self.dim.div_ceil(4).max(1);
        let mut s = String::new();
        for w in self.words.iter().rev() {
            s.push_str(&format!("{w:016x}"));
        }
        let start = s.len().saturating_sub(width);
        s[start..].to_string()
    }
}

impl fmt::Debug for MechanismVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MechanismVector({})", self.to_bit_string())
    }
}

/// Free-function form of [`MechanismVector::hamming`].
pub fn hamming(a: &MechanismVector, b: &MechanismVector) -> Result<u32, DimensionError> {
    a.hamming(b)
}
