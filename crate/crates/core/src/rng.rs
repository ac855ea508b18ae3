//! Reproducible random streams.
//!
//! A stream is addressed by `(master seed, stream index)`; simulation uses the
//! replicate number as the index. Each term of the path decomposition draws
//! from its own component stream, so adding jumps never perturbs the Gaussian
//! draws and vice versa. The generator is ChaCha20 (portable, platform
//! independent output); all transforms of uniforms are written out here so
//! golden values only depend on this file.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

/// Component ids of the decomposition.
pub mod component {
    pub const GAUSSIAN: u64 = 0;
    pub const LARGE_JUMPS: u64 = 1;
    pub const SMALL_JUMPS: u64 = 2;
}

/// Address of one reproducible stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub index: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64, index: u64) -> Self {
        Self { seed, index }
    }

    /// The stream itself.
    pub fn generator(&self) -> StreamRng {
        StreamRng::from_key(self.seed, self.index)
    }

    /// Independent sub-stream for one component.
    pub fn component(&self, id: u64) -> StreamRng {
        let key = splitmix64(self.seed ^ splitmix64(id.wrapping_add(0x5bd1_e995)));
        StreamRng::from_key(key, self.index)
    }
}

/// Source of uniforms in the open interval (0, 1), plus the transforms
/// built on them.
pub trait UniformSource {
    fn uniform(&mut self) -> f64;

    /// `Exp(rate)` by inversion, `−ln U / rate`.
    fn exponential(&mut self, rate: f64) -> f64 {
        -self.uniform().ln() / rate
    }

    /// Standard normal by Box–Muller (cosine branch).
    fn normal(&mut self) -> f64 {
        let r = (-2.0 * self.uniform().ln()).sqrt();
        let theta = std::f64::consts::TAU * self.uniform();
        r * theta.cos()
    }
}

/// ChaCha20 stream with a cached Box–Muller spare.
#[derive(Debug, Clone)]
pub struct StreamRng {
    inner: ChaCha20Rng,
    spare: Option<f64>,
}

impl StreamRng {
    fn from_key(key: u64, stream: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(key);
        inner.set_stream(stream);
        Self { inner, spare: None }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
}

impl UniformSource for StreamRng {
    /// `((bits >> 11) + ½) · 2⁻⁵³`, never 0 or 1.
    fn uniform(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let r = (-2.0 * self.uniform().ln()).sqrt();
        let theta = std::f64::consts::TAU * self.uniform();
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

/// Replays a fixed list of uniforms cyclically. For tests and golden values.
#[derive(Debug, Clone)]
pub struct FixedUniforms {
    values: Vec<f64>,
    next: usize,
}

impl FixedUniforms {
    pub fn new(values: Vec<f64>) -> Self {
        assert!(!values.is_empty(), "need at least one uniform");
        assert!(values.iter().all(|&u| u > 0.0 && u < 1.0));
        Self { values, next: 0 }
    }
}

impl UniformSource for FixedUniforms {
    fn uniform(&mut self) -> f64 {
        let u = self.values[self.next % self.values.len()];
        self.next += 1;
        u
    }
}

impl<S: UniformSource + ?Sized> UniformSource for &mut S {
    fn uniform(&mut self) -> f64 {
        (**self).uniform()
    }

    fn exponential(&mut self, rate: f64) -> f64 {
        (**self).exponential(rate)
    }

    fn normal(&mut self) -> f64 {
        (**self).normal()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_address_same_sequence() {
        let mut a = RngStream::new(7, 3).generator();
        let mut b = RngStream::new(7, 3).generator();
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn distinct_addresses_differ() {
        let x = RngStream::new(7, 3).generator().next_u64();
        assert_ne!(x, RngStream::new(7, 4).generator().next_u64());
        assert_ne!(x, RngStream::new(8, 3).generator().next_u64());
        let s = RngStream::new(7, 3);
        let g = s.component(component::GAUSSIAN).next_u64();
        assert_ne!(g, s.component(component::LARGE_JUMPS).next_u64());
        assert_ne!(g, s.component(component::SMALL_JUMPS).next_u64());
    }

    #[test]
    fn uniforms_are_open_and_centered() {
        let mut r = RngStream::new(1, 0).generator();
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let u = r.uniform();
            assert!(u > 0.0 && u < 1.0);
            sum += u;
        }
        let mean = sum / n as f64;
        assert!((mean - 0.5).abs() < 4.0 * (1.0f64 / 12.0 / n as f64).sqrt());
    }

    #[test]
    fn normal_moments() {
        let mut r = RngStream::new(2, 0).generator();
        let n = 200_000;
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let z = r.normal();
            s1 += z;
            s2 += z * z;
        }
        let nf = n as f64;
        assert!((s1 / nf).abs() < 4.0 / nf.sqrt());
        assert!((s2 / nf - 1.0).abs() < 4.0 * (2.0 / nf).sqrt());
    }

    #[test]
    fn exponential_from_fixed_half() {
        let mut f = FixedUniforms::new(vec![0.5]);
        assert_eq!(f.exponential(1.0), std::f64::consts::LN_2);
    }
}
