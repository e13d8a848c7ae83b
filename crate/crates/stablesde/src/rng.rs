//! Reproducible random streams.
//!
//! Every Monte Carlo path draws from its own ChaCha8 stream keyed by
//! `(seed, path_index)`, so a run gives identical results whatever the worker
//! count or scheduling order.

use rand::distr::Open01;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

/// Counter-based random stream for one path.
#[derive(Debug, Clone)]
pub struct RandomState {
    inner: ChaCha8Rng,
}

impl RandomState {
    /// Stream number `stream` of the generator keyed by `seed`.
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner }
    }

    /// Uniform draw on the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.inner.sample(Open01)
    }

    /// Standard exponential draw.
    pub fn exp1(&mut self) -> f64 {
        self.inner.sample(Exp1)
    }

    /// Standard normal draw.
    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }
}

impl RngCore for RandomState {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
