use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Channel index reserved for permutation sampling in feedback strategies.
pub const PERMUTATION_CHANNEL: u32 = u32::MAX;

/// Counter-based noise: every `(seed, stream, channel)` triple owns an
/// independent ChaCha8 stream, so trajectories can run in any order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NoiseSource {
    pub seed: u64,
    pub stream: u64,
}

impl NoiseSource {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Generator for one channel of this stream.
    pub fn rng(&self, channel: u32) -> ChaCha8Rng {
        let mut state = self.seed ^ splitmix64(&mut (u64::from(channel) ^ 0x6a09_e667_f3bc_c908));
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.stream);
        rng
    }

    pub fn wiener(&self, channel: u32) -> WienerStream {
        WienerStream {
            rng: self.rng(channel),
        }
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Wiener increments `dW ~ N(0, dt)` for a single channel.
#[derive(Debug, Clone)]
pub struct WienerStream {
    rng: ChaCha8Rng,
}

impl WienerStream {
    pub fn increment(&mut self, dt: f64) -> f64 {
        let z: f64 = self.rng.sample(StandardNormal);
        z * dt.sqrt()
    }
}

/// One [`WienerStream`] per measurement channel.
#[derive(Debug, Clone)]
pub struct WienerNoise {
    streams: Vec<WienerStream>,
}

impl WienerNoise {
    pub fn new(source: &NoiseSource, channels: usize) -> Self {
        Self {
            streams: (0..channels as u32).map(|ch| source.wiener(ch)).collect(),
        }
    }

    pub fn channels(&self) -> usize {
        self.streams.len()
    }

    pub fn fill(&mut self, dt: f64, out: &mut [f64]) {
        for (w, s) in out.iter_mut().zip(&mut self.streams) {
            *w = s.increment(dt);
        }
    }
}
