//! Seeded random streams.
//!
//! All randomness goes through ChaCha8, a counter-based generator whose
//! output is identical on every platform. A stream is addressed by
//! `(seed, purpose, index)`: the seed selects the key, and purpose and
//! index select the 64-bit ChaCha stream id. Simulated rows use their row
//! number as index, so a scene does not depend on how rows are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for. Separate purposes never share a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Speckle = 1,
    Backscatter = 2,
    Targets = 3,
    Calibration = 4,
    Fallback = 5,
    Experiment = 6,
}

/// Returns the generator for `(seed, purpose, index)`.
pub fn substream(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((purpose as u64) << 48) ^ index);
    rng
}
