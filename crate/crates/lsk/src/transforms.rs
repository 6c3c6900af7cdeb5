//! Fast kernels: in-place Walsh-Hadamard transform, circulant
//! matrix-vector products via an internal radix-2 FFT, and power-of-two
//! padding. Everything here is unnormalized; scaling lives in the sketch
//! layer.

use crate::error::{Error, Result};
use crate::linalg::DenseVector;

/// In-place unnormalized Walsh-Hadamard transform.
/// H_2 = [[1,1],[1,-1]], H_{2n} = H_2 (x) H_n.
pub fn fwht_inplace(v: &mut DenseVector) -> Result<()> {
    let data = v.as_mut_slice();
    let n = data.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    fwht_slice(data);
    Ok(())
}

#[inline]
pub(crate) fn fwht_slice(data: &mut [f64]) {
    let n = data.len();
    let mut h = 1;
    while h < n {
        let stride = h * 2;
        let mut base = 0;
        while base < n {
            for i in base..base + h {
                let a = data[i];
                let b = data[i + h];
                data[i] = a + b;
                data[i + h] = a - b;
            }
            base += stride;
        }
        h = stride;
    }
}

/// Sign of the unnormalized Hadamard matrix entry H[i][j] (0-based),
/// computed directly from the bit pattern. Serves as the dense reference
/// path, independent of the butterfly kernel.
#[inline]
pub fn hadamard_entry(i: usize, j: usize) -> f64 {
    if (i & j).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Iterative radix-2 complex FFT, in place. `invert` gives the inverse
/// transform including the 1/n scaling.
pub(crate) fn fft_inplace(re: &mut [f64], im: &mut [f64], invert: bool) {
    let n = re.len();
    debug_assert!(n.is_power_of_two());
    debug_assert_eq!(n, im.len());
    // Bit reversal permutation.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            re.swap(i, j);
            im.swap(i, j);
        }
    }
    let sign = if invert { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let ang = sign * std::f64::consts::TAU / len as f64;
        let (wr, wi) = (ang.cos(), ang.sin());
        let mut base = 0;
        while base < n {
            let mut cr = 1.0;
            let mut ci = 0.0;
            for k in 0..len / 2 {
                let i0 = base + k;
                let i1 = base + k + len / 2;
                let tr = re[i1] * cr - im[i1] * ci;
                let ti = re[i1] * ci + im[i1] * cr;
                re[i1] = re[i0] - tr;
                im[i1] = im[i0] - ti;
                re[i0] += tr;
                im[i0] += ti;
                let ncr = cr * wr - ci * wi;
                ci = cr * wi + ci * wr;
                cr = ncr;
            }
            base += len;
        }
        len <<= 1;
    }
    if invert {
        let inv = 1.0 / n as f64;
        for x in re.iter_mut() {
            *x *= inv;
        }
        for x in im.iter_mut() {
            *x *= inv;
        }
    }
}

/// Generator of a circulant matrix G whose first ROW is `gen` and whose
/// rows rotate one position to the right, i.e. G[i][j] = gen[(j - i) mod n].
/// The FFT path convolves against the first COLUMN, whose spectrum is
/// cached at construction when n is a power of two.
#[derive(Debug, Clone)]
pub struct CirculantGenerator {
    gen: DenseVector,
    // FFT of the first column, present only for power-of-two n.
    spectrum: Option<(Vec<f64>, Vec<f64>)>,
}

impl CirculantGenerator {
    /// Rademacher generator (entries must be +-1).
    pub fn new(gen: DenseVector) -> Result<Self> {
        if let Some(i) = gen.as_slice().iter().position(|&x| x != 1.0 && x != -1.0) {
            return Err(Error::BadParameters(format!("circulant generator entry {i} is not +-1")));
        }
        Ok(Self::from_real(gen))
    }

    /// Arbitrary real generator; used by reference oracles and tests.
    pub fn from_real(gen: DenseVector) -> Self {
        let spectrum = if gen.len().is_power_of_two() {
            let col = Self::first_column_of(&gen);
            let mut re = col;
            let mut im = vec![0.0; re.len()];
            fft_inplace(&mut re, &mut im, false);
            Some((re, im))
        } else {
            None
        };
        Self { gen, spectrum }
    }

    pub fn len(&self) -> usize {
        self.gen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gen.is_empty()
    }

    pub fn gen(&self) -> &DenseVector {
        &self.gen
    }

    /// G[i][j] for the fixed row-rotation orientation.
    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let n = self.gen.len();
        self.gen[(j + n - i % n) % n]
    }

    fn first_column_of(gen: &DenseVector) -> Vec<f64> {
        let n = gen.len();
        (0..n).map(|i| gen[(n - i) % n]).collect()
    }

    /// G v via FFT circular convolution; matches the dense product.
    pub fn apply(&self, v: &DenseVector) -> Result<DenseVector> {
        let n = self.gen.len();
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: v.len() });
        }
        if let Some((sr, si)) = &self.spectrum {
            let mut re = v.as_slice().to_vec();
            let mut im = vec![0.0; n];
            fft_inplace(&mut re, &mut im, false);
            for i in 0..n {
                let (a, b) = (re[i], im[i]);
                re[i] = a * sr[i] - b * si[i];
                im[i] = a * si[i] + b * sr[i];
            }
            fft_inplace(&mut re, &mut im, true);
            Ok(DenseVector::new(re))
        } else {
            // Non-power-of-two n: circular convolution through a zero-padded
            // linear convolution, folding the tail back.
            let col = Self::first_column_of(&self.gen);
            let l = (2 * n - 1).next_power_of_two();
            let mut ar = vec![0.0; l];
            let mut ai = vec![0.0; l];
            let mut br = vec![0.0; l];
            let mut bi = vec![0.0; l];
            ar[..n].copy_from_slice(&col);
            br[..n].copy_from_slice(v.as_slice());
            fft_inplace(&mut ar, &mut ai, false);
            fft_inplace(&mut br, &mut bi, false);
            for i in 0..l {
                let (a, b) = (ar[i], ai[i]);
                ar[i] = a * br[i] - b * bi[i];
                ai[i] = a * bi[i] + b * br[i];
            }
            fft_inplace(&mut ar, &mut ai, true);
            let mut out = vec![0.0; n];
            for i in 0..n {
                out[i] = ar[i] + if i + n < 2 * n - 1 { ar[i + n] } else { 0.0 };
            }
            Ok(DenseVector::new(out))
        }
    }
}

/// Free-function form of the circulant product.
pub fn circulant_apply(c: &CirculantGenerator, v: &DenseVector) -> Result<DenseVector> {
    c.apply(v)
}

/// Zero-pad to the next power of two; a no-op for power-of-two lengths.
pub fn pad_pow2(v: &DenseVector) -> DenseVector {
    let n = v.len().max(1);
    let target = n.next_power_of_two();
    let mut data = v.as_slice().to_vec();
    data.resize(target, 0.0);
    DenseVector::new(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{rademacher_vector, CounterRng, SeedSpec};

    #[test]
    fn fwht_first_column() {
        let mut v = DenseVector::new(vec![1.0, 0.0]);
        fwht_inplace(&mut v).unwrap();
        assert_eq!(v.as_slice(), &[1.0, 1.0]);
    }

    #[test]
    fn fwht_row_sums() {
        let mut v = DenseVector::new(vec![1.0, 1.0]);
        fwht_inplace(&mut v).unwrap();
        assert_eq!(v.as_slice(), &[2.0, 0.0]);
    }

    #[test]
    fn fwht_order_four() {
        let mut v = DenseVector::new(vec![1.0, 2.0, 3.0, 4.0]);
        fwht_inplace(&mut v).unwrap();
        assert_eq!(v.as_slice(), &[10.0, -2.0, -4.0, 0.0]);
    }

    #[test]
    fn fwht_rejects_non_pow2() {
        let mut v = DenseVector::new(vec![1.0; 3]);
        assert!(matches!(fwht_inplace(&mut v), Err(Error::NotPowerOfTwo(3))));
    }

    #[test]
    fn fwht_involution() {
        let rng = CounterRng::new(&SeedSpec::new(3, 0));
        let n = 256;
        let orig = DenseVector::new((0..n).map(|i| rng.gaussian_at(i as u64)).collect());
        let mut v = orig.clone();
        fwht_inplace(&mut v).unwrap();
        fwht_inplace(&mut v).unwrap();
        for i in 0..n {
            assert!((v[i] - n as f64 * orig[i]).abs() <= 1e-10 * n as f64 * orig.norm());
        }
    }

    #[test]
    fn fwht_matches_entry_formula() {
        // Symmetry H^T = H and the dense entry oracle, exhaustive at n = 64.
        let n = 64;
        for i in 0..n {
            let mut e = DenseVector::zeros(n);
            e[i] = 1.0;
            fwht_inplace(&mut e).unwrap();
            for j in 0..n {
                assert_eq!(e[j], hadamard_entry(j, i));
                assert_eq!(hadamard_entry(i, j), hadamard_entry(j, i));
            }
        }
    }

    #[test]
    fn circulant_all_ones_column() {
        let g = CirculantGenerator::from_real(DenseVector::new(vec![1.0, 1.0, 1.0]));
        let out = g.apply(&DenseVector::new(vec![1.0, 0.0, 0.0])).unwrap();
        for i in 0..3 {
            assert!((out[i] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn circulant_first_column() {
        let g = CirculantGenerator::from_real(DenseVector::new(vec![1.0, 2.0, 3.0]));
        let out = g.apply(&DenseVector::new(vec![1.0, 0.0, 0.0])).unwrap();
        let expect = [1.0, 3.0, 2.0];
        for i in 0..3 {
            assert!((out[i] - expect[i]).abs() < 1e-12, "{:?}", out);
        }
    }

    fn dense_circulant_apply(g: &CirculantGenerator, v: &DenseVector) -> DenseVector {
        let n = g.len();
        let mut out = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                out[i] += g.entry(i, j) * v[j];
            }
        }
        DenseVector::new(out)
    }

    #[test]
    fn circulant_matches_dense_oracle() {
        let n = 256;
        let gen = rademacher_vector(&SeedSpec::new(17, 0), n);
        let g = CirculantGenerator::new(gen).unwrap();
        let rng = CounterRng::new(&SeedSpec::new(17, 1));
        let v = DenseVector::new((0..n).map(|i| rng.gaussian_at(i as u64)).collect());
        let fast = g.apply(&v).unwrap();
        let dense = dense_circulant_apply(&g, &v);
        let scale = dense.norm().max(1.0);
        for i in 0..n {
            assert!((fast[i] - dense[i]).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn circulant_shift_equivariance() {
        // Shifting v cyclically by one shifts Gv cyclically by one.
        for n in [4usize, 8, 16, 32] {
            let gen = rademacher_vector(&SeedSpec::new(23, n as u64), n);
            let g = CirculantGenerator::new(gen).unwrap();
            let rng = CounterRng::new(&SeedSpec::new(23, 100 + n as u64));
            let v = DenseVector::new((0..n).map(|i| rng.gaussian_at(i as u64)).collect());
            let shifted = DenseVector::new((0..n).map(|i| v[(i + n - 1) % n]).collect());
            let gv = g.apply(&v).unwrap();
            let gshift = g.apply(&shifted).unwrap();
            for i in 0..n {
                assert!((gshift[i] - gv[(i + n - 1) % n]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn circulant_rejects_bad_generator() {
        assert!(CirculantGenerator::new(DenseVector::new(vec![1.0, 0.5])).is_err());
    }

    #[test]
    fn circulant_dimension_mismatch() {
        let g = CirculantGenerator::from_real(DenseVector::new(vec![1.0, -1.0]));
        assert!(g.apply(&DenseVector::zeros(3)).is_err());
    }

    #[test]
    fn pad_pow2_cases() {
        let v4 = DenseVector::new(vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(pad_pow2(&v4).len(), 4);
        let v3 = DenseVector::new(vec![1.0, 2.0, 3.0]);
        let p = pad_pow2(&v3);
        assert_eq!(p.len(), 4);
        assert_eq!(p[3], 0.0);
        assert!((p.norm() - v3.norm()).abs() <= 1e-15 * v3.norm());
    }

    #[test]
    fn fast_paths_match_dense_across_sizes() {
        let mut n = 2usize;
        while n <= 1024 {
            for seed in 0..4u64 {
                let gen = rademacher_vector(&SeedSpec::new(seed, n as u64), n);
                let g = CirculantGenerator::new(gen).unwrap();
                let rng = CounterRng::new(&SeedSpec::new(seed + 50, n as u64));
                let v = DenseVector::new((0..n).map(|i| rng.gaussian_at(i as u64)).collect());
                let fast = g.apply(&v).unwrap();
                let dense = dense_circulant_apply(&g, &v);
                let scale = dense.norm().max(1.0);
                for i in 0..n {
                    assert!((fast[i] - dense[i]).abs() <= 1e-10 * scale, "n={n} seed={seed}");
                }
            }
            n *= 2;
        }
    }
}
