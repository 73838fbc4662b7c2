use std::fmt;
use std::str::FromStr;

use super::FingerprintError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FpKind {
    Ecfp,
    Rdkfp,
}

impl FpKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FpKind::Ecfp => "ecfp",
            FpKind::Rdkfp => "rdkfp",
        }
    }
}

impl fmt::Display for FpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FpKind {
    type Err = FingerprintError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ecfp" => Ok(FpKind::Ecfp),
            "rdkfp" => Ok(FpKind::Rdkfp),
            other => Err(FingerprintError::UnknownKind(other.to_string())),
        }
    }
}

/// Fixed-length bit vector. Bit `b` lives in word `b / 64` at position
/// `b % 64`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitFingerprint {
    words: Vec<u64>,
    nbits: usize,
    kind: FpKind,
}

impl BitFingerprint {
    /// All-zero vector. `nbits` must be a positive multiple of 8.
    pub fn new(nbits: usize, kind: FpKind) -> Result<Self, FingerprintError> {
        if nbits == 0 || !nbits.is_multiple_of(8) {
            return Err(FingerprintError::BadLength(nbits));
        }
        Ok(BitFingerprint {
            words: vec![0; nbits.div_ceil(64)],
            nbits,
            kind,
        })
    }

    pub fn from_bits(nbits: usize, kind: FpKind, bits: impl IntoIterator<Item = usize>) -> Result<Self, FingerprintError> {
        let mut fp = Self::new(nbits, kind)?;
        for b in bits {
            if b >= nbits {
                return Err(FingerprintError::BitOutOfRange { bit: b, nbits });
            }
            fp.set(b);
        }
        Ok(fp)
    }

    pub fn nbits(&self) -> usize {
        self.nbits
    }

    pub fn kind(&self) -> FpKind {
        self.kind
    }

    /// Sets bit `b % nbits`.
    pub fn set(&mut self, b: usize) {
        let b = b % self.nbits;
        self.words[b / 64] |= 1 << (b % 64);
    }

    /// Sets the bit selected by a 64-bit code (`code mod nbits`).
    pub fn set_code(&mut self, code: u64) {
        self.set((code % self.nbits as u64) as usize);
    }

    pub fn get(&self, b: usize) -> bool {
        b < self.nbits && self.words[b / 64] >> (b % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones(&self) -> Vec<usize> {
        (0..self.nbits).filter(|&b| self.get(b)).collect()
    }

    pub fn is_subset_of(&self, other: &BitFingerprint) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    fn bytes(&self) -> Vec<u8> {
        let mut out: Vec<u8> = self.words.iter().flat_map(|w| w.to_le_bytes()).collect();
        out.truncate(self.nbits / 8);
        out
    }

    /// Lowercase hex; byte k holds bits 8k..8k+7, least significant first.
    pub fn to_hex(&self) -> String {
        hex::encode(self.bytes())
    }

    pub fn from_hex(text: &str, kind: FpKind) -> Result<Self, FingerprintError> {
        let bytes = hex::decode(text).map_err(|_| FingerprintError::BadHex)?;
        let mut fp = Self::new(bytes.len() * 8, kind)?;
        for (k, byte) in bytes.iter().enumerate() {
            fp.words[k / 8] |= u64::from(*byte) << (8 * (k % 8));
        }
        Ok(fp)
    }
}

/// |a ∧ b| / |a ∨ b|, with 0/0 defined as 0.
pub fn tanimoto(a: &BitFingerprint, b: &BitFingerprint) -> Result<f64, FingerprintError> {
    if a.kind != b.kind {
        return Err(FingerprintError::KindMismatch(a.kind, b.kind));
    }
    if a.nbits != b.nbits {
        return Err(FingerprintError::LengthMismatch(a.nbits, b.nbits));
    }
    let (mut inter, mut union) = (0u32, 0u32);
    for (x, y) in a.words.iter().zip(&b.words) {
        inter += (x & y).count_ones();
        union += (x | y).count_ones();
    }
    Ok(if union == 0 { 0.0 } else { f64::from(inter) / f64::from(union) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(bits: &[usize]) -> BitFingerprint {
        BitFingerprint::from_bits(64, FpKind::Ecfp, bits.iter().copied()).unwrap()
    }

    #[test]
    fn tanimoto_examples() {
        let x = fp(&[1, 5]);
        assert_eq!(tanimoto(&x, &x).unwrap(), 1.0);
        assert_eq!(tanimoto(&fp(&[1]), &fp(&[2])).unwrap(), 0.0);
        assert_eq!(tanimoto(&fp(&[1, 2]), &fp(&[2, 3])).unwrap(), 1.0 / 3.0);
        assert_eq!(tanimoto(&fp(&[]), &fp(&[])).unwrap(), 0.0);
    }

    #[test]
    fn mismatches() {
        let a = fp(&[1]);
        let b = BitFingerprint::from_bits(64, FpKind::Rdkfp, [1]).unwrap();
        let c = BitFingerprint::from_bits(128, FpKind::Ecfp, [1]).unwrap();
        assert!(matches!(tanimoto(&a, &b), Err(FingerprintError::KindMismatch(..))));
        assert!(matches!(tanimoto(&a, &c), Err(FingerprintError::LengthMismatch(64, 128))));
    }

    #[test]
    fn hex_layout() {
        let f = BitFingerprint::from_bits(16, FpKind::Ecfp, [0, 9, 15]).unwrap();
        assert_eq!(f.to_hex(), "0182");
        assert_eq!(BitFingerprint::from_hex("0182", FpKind::Ecfp).unwrap(), f);
        let big = fp(&[0, 63]);
        assert_eq!(BitFingerprint::from_hex(&big.to_hex(), FpKind::Ecfp).unwrap(), big);
        assert!(BitFingerprint::new(12, FpKind::Ecfp).is_err());
    }
}
