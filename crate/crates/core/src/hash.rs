//! FNV-1a 64-bit hashing.
//!
//! Every hash that influences output bytes (fingerprint bits, derived RNG
//! seeds, smoke-check embeddings) goes through this function so results are
//! reproducible by any other implementation of the same byte layouts.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// Incremental FNV-1a 64 hasher.
#[derive(Debug, Clone, Copy)]
pub struct Fnv1a(u64);

impl Default for Fnv1a {
    fn default() -> Self {
        Fnv1a(FNV_OFFSET)
    }
}

impl Fnv1a {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn write(&mut self, bytes: &[u8]) -> &mut Self {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(FNV_PRIME);
        }
        self
    }

    pub fn write_u8(&mut self, v: u8) -> &mut Self {
        self.write(&[v])
    }

    pub fn write_u16(&mut self, v: u16) -> &mut Self {
        self.write(&v.to_le_bytes())
    }

    pub fn write_u32(&mut self, v: u32) -> &mut Self {
        self.write(&v.to_le_bytes())
    }

    pub fn write_u64(&mut self, v: u64) -> &mut Self {
        self.write(&v.to_le_bytes())
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}

/// One-shot FNV-1a 64 over a byte slice.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    Fnv1a::new().write(bytes).finish()
}

/// Stable hash of a `(record id, strategy name)` pair, used to derive
/// per-record RNG streams. Layout: id bytes, 0x1F, name bytes.
pub fn stable_pair_hash(id: &str, name: &str) -> u64 {
    Fnv1a::new()
        .write(id.as_bytes())
        .write_u8(0x1f)
        .write(name.as_bytes())
        .finish()
}

/// Seed for the stream of `(id, name)` under a run-level seed.
pub fn derive_seed(seed: u64, id: &str, name: &str) -> u64 {
    seed ^ stable_pair_hash(id, name)
}
