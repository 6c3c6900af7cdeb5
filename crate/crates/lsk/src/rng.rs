//! Deterministic, splittable randomness. Every random structure in the
//! library is derived from a (master_seed, stream_id) pair through a
//! counter-based generator, so streams can be built in any order and in
//! parallel with identical results.

use crate::linalg::DenseVector;

/// Identifies one independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self { master_seed, stream_id }
    }

    /// Derive a child stream. Children with distinct tags are independent
    /// of each other and of the parent.
    pub fn child(&self, tag: u64) -> SeedSpec {
        SeedSpec {
            master_seed: self.master_seed,
            stream_id: mix64(self.stream_id ^ tag.wrapping_mul(0x2545f4914f6cdd1d)),
        }
    }
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// splitmix64 finalizer.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Counter-based generator: value at counter c is a pure function of
/// (master_seed, stream_id, c). Random access, no mutable state.
#[derive(Debug, Clone, Copy)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    pub fn new(seed: &SeedSpec) -> Self {
        let key = mix64(mix64(seed.master_seed ^ 0x243f_6a88_85a3_08d3) ^ seed.stream_id);
        Self { key }
    }

    #[inline]
    pub fn at(&self, counter: u64) -> u64 {
        mix64(self.key.wrapping_add(counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform in (0, 1], 53-bit resolution. Never returns 0, so logs
    /// in Box-Muller stay finite.
    #[inline]
    pub fn unit_at(&self, counter: u64) -> f64 {
        (((self.at(counter) >> 11) + 1) as f64) * (1.0 / 9007199254740992.0)
    }

    /// Uniform index in [0, n) via the multiply-shift reduction.
    #[inline]
    pub fn index_at(&self, counter: u64, n: usize) -> usize {
        ((self.at(counter) as u128 * n as u128) >> 64) as usize
    }

    #[inline]
    pub fn sign_at(&self, counter: u64) -> f64 {
        if self.at(counter) & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Standard normal via Box-Muller; consumes counters 2i and 2i+1.
    #[inline]
    pub fn gaussian_at(&self, i: u64) -> f64 {
        let u1 = self.unit_at(2 * i);
        let u2 = self.unit_at(2 * i + 1);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

/// Sequential convenience wrapper over CounterRng.
#[derive(Debug, Clone)]
pub struct StreamRng {
    rng: CounterRng,
    counter: u64,
}

impl StreamRng {
    pub fn new(seed: &SeedSpec) -> Self {
        Self { rng: CounterRng::new(seed), counter: 0 }
    }

    pub fn next_u64(&mut self) -> u64 {
        let v = self.rng.at(self.counter);
        self.counter += 1;
        v
    }

    pub fn next_unit(&mut self) -> f64 {
        let v = self.rng.unit_at(self.counter);
        self.counter += 1;
        v
    }

    pub fn next_index(&mut self, n: usize) -> usize {
        let v = self.rng.index_at(self.counter, n);
        self.counter += 1;
        v
    }

    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = self.rng.unit_at(self.counter);
        let u2 = self.rng.unit_at(self.counter + 1);
        self.counter += 2;
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

/// Vector of independent Rademacher signs.
pub fn rademacher_vector(seed: &SeedSpec, n: usize) -> DenseVector {
    let rng = CounterRng::new(seed);
    DenseVector::new((0..n as u64).map(|i| rng.sign_at(i)).collect())
}

const MERSENNE_61: u64 = (1 << 61) - 1;

#[inline]
fn mod61(x: u128) -> u64 {
    let lo = (x & MERSENNE_61 as u128) as u64;
    let hi = (x >> 61) as u64;
    let mut s = lo + hi;
    if s >= MERSENNE_61 {
        s -= MERSENNE_61;
    }
    s
}

#[inline]
fn mulmod61(a: u64, b: u64) -> u64 {
    mod61(a as u128 * b as u128)
}

/// Degree-3 polynomial hash over GF(2^61 - 1); evaluations at any four
/// distinct points are jointly uniform.
#[derive(Debug, Clone, Copy)]
pub struct FourWiseHash {
    coefficients: [u64; 4],
}

impl FourWiseHash {
    /// Draw coefficients uniformly from the field.
    pub fn draw(seed: &SeedSpec) -> Self {
        let rng = CounterRng::new(seed);
        let mut coefficients = [0u64; 4];
        let mut counter = 0u64;
        for c in coefficients.iter_mut() {
            // Rejection sampling onto [0, p) keeps the draw uniform.
            loop {
                let v = rng.at(counter) >> 3; // 61 bits
                counter += 1;
                if v < MERSENNE_61 {
                    *c = v;
                    break;
                }
            }
        }
        Self { coefficients }
    }

    /// Evaluate the polynomial at point j (field element).
    pub fn eval(&self, j: u64) -> u64 {
        let x = j % MERSENNE_61;
        let mut acc = self.coefficients[3];
        for k in (0..3).rev() {
            acc = mod61(mulmod61(acc, x) as u128 + self.coefficients[k] as u128);
        }
        acc
    }

    /// Sign from the low-order bit of the field element.
    pub fn sign(&self, j: u64) -> f64 {
        if self.eval(j) & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// m row indices drawn i.i.d. uniform on [0, n), with replacement.
pub fn sample_rows(seed: &SeedSpec, m: usize, n: usize) -> Vec<usize> {
    let rng = CounterRng::new(seed);
    (0..m as u64).map(|k| rng.index_at(k, n)).collect()
}
