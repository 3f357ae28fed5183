//! Named, counter-indexed random substreams.
//!
//! Every random draw in the crate comes from `substream(seed, name, index)`.
//! Work is cut into fixed-size chunks whose index selects the ChaCha stream,
//! so results never depend on how many threads process the chunks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Samples per work chunk. Part of the reproducibility contract: changing it
/// changes every Monte Carlo result.
pub const CHUNK: usize = 8192;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Independent generator for chunk `index` of the stream called `name`.
pub fn substream(seed: u64, name: &str, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&fnv1a(name.as_bytes()).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// `(chunk index, chunk length)` pairs covering `total` items.
pub fn chunks(total: usize) -> Vec<(u64, usize)> {
    (0..total.div_ceil(CHUNK))
        .map(|c| (c as u64, CHUNK.min(total - c * CHUNK)))
        .collect()
}
