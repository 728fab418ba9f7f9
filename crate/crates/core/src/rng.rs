//! Counter-based random streams.
//!
//! Every trajectory gets its own ChaCha key derived from `(seed, index)`;
//! within a trajectory, waiting times, kernel choices and move noise read
//! from distinct ChaCha streams of that key.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Substream {
    Waiting = 0,
    Kernel = 1,
    Noise = 2,
}

/// One ChaCha stream of the trajectory `(seed, index)`.
pub fn substream(seed: u64, index: u64, which: Substream) -> ChaCha8Rng {
    keyed(seed, index, which as u64)
}

/// Stream number `stream` of the key `(seed, index)`. Numbers 0 to 2 are the
/// [`Substream`]s; diagnostics use higher numbers for auxiliary draws.
pub fn keyed(seed: u64, index: u64, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&index.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

/// Maps `f` over `0..n` on the available cores; results keep index order.
pub fn par_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let threads = std::thread::available_parallelism().map_or(1, |p| p.get()).min(n.max(1));
    if threads <= 1 {
        return (0..n).map(f).collect();
    }
    let chunk = n.div_ceil(threads);
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|k| s.spawn(move || (k * chunk..((k + 1) * chunk).min(n)).map(f).collect::<Vec<T>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// The three substreams of one trajectory.
#[derive(Debug, Clone)]
pub struct Streams {
    pub waiting: ChaCha8Rng,
    pub kernel: ChaCha8Rng,
    pub noise: ChaCha8Rng,
}

impl Streams {
    pub fn new(seed: u64, index: u64) -> Self {
        Self {
            waiting: substream(seed, index, Substream::Waiting),
            kernel: substream(seed, index, Substream::Kernel),
            noise: substream(seed, index, Substream::Noise),
        }
    }
}
