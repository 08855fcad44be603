use sha2::{Digest, Sha256};

use super::hash::{BinaryHash, HASH_BYTES};

/// SHA-256 over the 12 packed hash bytes, truncated to the first 96 bits of the digest.
///
/// Equal inputs map to equal outputs; any difference in the input scrambles the output.
pub fn sha_block(h: &BinaryHash) -> BinaryHash {
    let digest = Sha256::digest(h.bytes());
    let mut out = [0u8; HASH_BYTES];
    out.copy_from_slice(&digest[..HASH_BYTES]);
    BinaryHash::from_bytes(out)
}
