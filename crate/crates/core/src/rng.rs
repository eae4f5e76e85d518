// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Seeded random source shared by every stochastic routine.
//!
//! The generator is ChaCha with 8 rounds (`rand_chacha::ChaCha8Rng`), whose
//! output stream is fixed by its specification and therefore identical across
//! platforms. [`RandomSource::ALGORITHM`] names the stream version so result
//! files can record it.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic 64-bit seeded generator.
#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RandomSource {
    pub const ALGORITHM: &'static str = "chacha8-v1";

    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child stream, a pure function of `(seed, stream)`.
    ///
    /// Used to hand each stage of a pipeline its own generator so that adding
    /// draws to one stage never shifts the draws of another.
    pub fn fork(&self, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(self.seed);
        inner.set_stream(stream.wrapping_add(1));
        Self {
            seed: self.seed,
            inner,
        }
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = RandomSource::new(42);
        let mut b = RandomSource::new(42);
        let xs: Vec<u64> = (0..16).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..16).map(|_| b.next_u64()).collect();
        assert_eq!(xs, ys);
    }

    #[test]
    fn pinned_first_draw() {
        // Guards against silent generator changes between dependency upgrades.
        let mut a = RandomSource::new(0);
        let first = a.next_u64();
        assert_eq!(first, 13080132717333068652);
        let mut b = RandomSource::new(0);
        assert_eq!(first, b.next_u64());
        assert_ne!(RandomSource::new(1).next_u64(), first);
    }

    #[test]
    fn forks_are_distinct_and_reproducible() {
        let root = RandomSource::new(7);
        let mut f1 = root.fork(1);
        let mut f2 = root.fork(2);
        let mut f1b = root.fork(1);
        let a = f1.next_u64();
        assert_eq!(a, f1b.next_u64());
        assert_ne!(a, f2.next_u64());
    }
}
