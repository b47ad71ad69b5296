//! Counter-based deterministic randomness.
//!
//! Every random number is a pure function of `(seed, stream, counter)`, so
//! trials can run in any order — serial, parallel, or resumed — and still
//! produce identical values. Gaussians come from Box–Muller applied to the
//! counter stream, one pair of uniforms per pair of indices.

/// SplitMix64 finalizer.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stateless counter hash over `(seed, stream, counter)`.
#[inline]
pub fn counter_u64(seed: u64, stream: u64, counter: u64) -> u64 {
    mix64(mix64(mix64(seed) ^ stream) ^ counter)
}

/// Maps 64 random bits to the open interval (0, 1).
#[inline]
pub fn bits_to_unit(bits: u64) -> f64 {
    // 53 bits, offset by half an ulp so 0 and 1 are unreachable.
    ((bits >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
}

/// Standard normal value at position `index` of stream `(seed, stream)`.
///
/// Indices `2m` and `2m+1` share one Box–Muller draw (cos and sin branch),
/// so the value at an index never depends on evaluation order.
pub fn gaussian_at(seed: u64, stream: u64, index: u64) -> f64 {
    let base = index & !1;
    let u1 = bits_to_unit(counter_u64(seed, stream, base));
    let u2 = bits_to_unit(counter_u64(seed, stream, base | 1));
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    if index & 1 == 0 {
        r * theta.cos()
    } else {
        r * theta.sin()
    }
}

/// Sequential convenience wrapper over the counter stream.
#[derive(Clone, Debug)]
pub struct CounterRng {
    seed: u64,
    stream: u64,
    counter: u64,
    gauss_index: u64,
}

impl CounterRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        CounterRng {
            seed,
            stream,
            counter: 0,
            gauss_index: 0,
        }
    }

    /// Derives a sub-stream key; used to key trials by e.g. `(d, k, trial)`.
    pub fn substream(seed: u64, parts: &[u64]) -> u64 {
        let mut acc = mix64(seed);
        for &p in parts {
            acc = mix64(acc ^ p);
        }
        acc
    }

    pub fn next_u64(&mut self) -> u64 {
        // Uniform draws and gaussian draws use disjoint counter halves.
        let v = counter_u64(self.seed, self.stream, self.counter);
        self.counter += 1;
        v
    }

    /// Uniform in (0, 1).
    pub fn next_f64(&mut self) -> f64 {
        bits_to_unit(self.next_u64())
    }

    /// Uniform integer in `0..n`.
    pub fn next_below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        (self.next_u64() % n as u64) as usize
    }

    pub fn next_gaussian(&mut self) -> f64 {
        let v = gaussian_at(
            self.seed,
            self.stream ^ 0x5bd1_e995_9bd1_e995,
            self.gauss_index,
        );
        self.gauss_index += 1;
        v
    }

    /// Samples a size-`k` subset of `0..n` without replacement (Floyd).
    pub fn subset(&mut self, n: usize, k: usize) -> Vec<usize> {
        debug_assert!(k <= n);
        let mut chosen: Vec<usize> = Vec::with_capacity(k);
        for j in n - k..n {
            let t = self.next_below(j + 1);
            if chosen.contains(&t) {
                chosen.push(j);
            } else {
                chosen.push(t);
            }
        }
        chosen.sort_unstable();
        chosen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counter_is_order_independent() {
        let a = gaussian_at(5, 9, 100);
        let _ = gaussian_at(5, 9, 3); // interleave other draws
        let b = gaussian_at(5, 9, 100);
        assert_eq!(a, b);
    }

    #[test]
    fn streams_differ() {
        let a: Vec<u64> = (0..8).map(|i| counter_u64(1, 0, i)).collect();
        let b: Vec<u64> = (0..8).map(|i| counter_u64(1, 1, i)).collect();
        assert_ne!(a, b);
    }

    #[test]
    fn gaussian_moments_are_sane() {
        let n = 100_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for i in 0..n {
            let g = gaussian_at(123, 7, i);
            sum += g;
            sumsq += g * g;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn subsets_are_valid_and_deterministic() {
        let mut r1 = CounterRng::new(9, 4);
        let mut r2 = CounterRng::new(9, 4);
        for _ in 0..50 {
            let s1 = r1.subset(10, 4);
            let s2 = r2.subset(10, 4);
            assert_eq!(s1, s2);
            assert_eq!(s1.len(), 4);
            assert!(s1.windows(2).all(|w| w[0] < w[1]));
            assert!(s1.iter().all(|&v| v < 10));
        }
    }
}
