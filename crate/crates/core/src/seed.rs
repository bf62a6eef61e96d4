//! Deterministic seed derivation.
//!
//! A single root seed fans out into independent streams by hashing the parent
//! seed together with a label. The derivation is SHA-256 over
//! `parent.to_le_bytes() || label bytes`, truncated to the first eight bytes
//! read little-endian. It is stable across platforms, thread counts and
//! crate versions, which is what makes sweep output byte-reproducible.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Concrete generator used everywhere a [`Seed`] is expanded.
pub type SimRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self) -> SimRng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Child seed for a named purpose, e.g. `"graph"` or a canonical cell key.
    pub fn derive(self, label: &str) -> Seed {
        self.derive_bytes(label.as_bytes())
    }

    /// Child seed for the `index`-th replicate or trial.
    pub fn child(self, index: u64) -> Seed {
        let mut buf = [0u8; 9];
        buf[0] = b'#';
        buf[1..].copy_from_slice(&index.to_le_bytes());
        self.derive_bytes(&buf)
    }

    fn derive_bytes(self, label: &[u8]) -> Seed {
        let mut hasher = Sha256::new();
        hasher.update(self.0.to_le_bytes());
        hasher.update(label);
        let digest = hasher.finalize();
        let mut head = [0u8; 8];
        head.copy_from_slice(&digest[..8]);
        Seed(u64::from_le_bytes(head))
    }
}

impl From<u64> for Seed {
    fn from(value: u64) -> Self {
        Seed(value)
    }
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_seed_same_stream() {
        let a: Vec<u64> = Seed(7).rng().random_iter().take(16).collect();
        let b: Vec<u64> = Seed(7).rng().random_iter().take(16).collect();
        assert_eq!(a, b);
    }

    /// Values computed independently with Python's hashlib.
    #[test]
    fn derivation_matches_reference_vectors() {
        assert_eq!(Seed(1).derive("network"), Seed(10165900044141033240));
        assert_eq!(Seed(0).derive("graph"), Seed(1080583108138259378));
        assert_eq!(Seed(42).child(3), Seed(1296112083337999595));
    }

    #[test]
    fn labels_and_indices_separate_streams() {
        let root = Seed(1);
        assert_ne!(root.derive("graph"), root.derive("shock"));
        assert_ne!(root.child(0), root.child(1));
        assert_ne!(root.child(0), root);
    }
}
