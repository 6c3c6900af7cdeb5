//! The six dense sketch families behind one interface: construction,
//! fast application, dense materialization (the reference path), and
//! theory-driven row-count recommendation.
//!
//! The fast paths run through the butterfly/FFT kernels in `transforms`;
//! `dense_entry` computes every matrix entry directly from the defining
//! structure (bit-pattern Hadamard signs, rotated generators, hash
//! evaluations), so the two routes are independent implementations of the
//! same operator.

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, DenseVector};
use crate::rng::{rademacher_vector, sample_rows, CounterRng, FourWiseHash, SeedSpec};
use crate::transforms::{fwht_slice, hadamard_entry, CirculantGenerator};

const MATERIALIZE_GUARD: usize = 1 << 26;

const TAG_ROWS: u64 = 0x524f5753;
const TAG_DIAG1: u64 = 0x44494131;
const TAG_DIAG2: u64 = 0x44494132;
const TAG_GEN1: u64 = 0x47454e31;
const TAG_GEN2: u64 = 0x47454e32;
const TAG_HASH: u64 = 0x48415348;
const TAG_GAUSS: u64 = 0x47415553;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SketchKind {
    Gaussian,
    Ams,
    Srht,
    Srct,
    TensorSrht,
    TensorSrct,
}

impl SketchKind {
    pub const ALL: [SketchKind; 6] = [
        SketchKind::Gaussian,
        SketchKind::Ams,
        SketchKind::Srht,
        SketchKind::Srct,
        SketchKind::TensorSrht,
        SketchKind::TensorSrct,
    ];

    pub fn is_tensor(&self) -> bool {
        matches!(self, SketchKind::TensorSrht | SketchKind::TensorSrct)
    }

    /// Kinds whose transform requires a power-of-two dimension.
    pub fn needs_pow2(&self) -> bool {
        !matches!(self, SketchKind::Gaussian | SketchKind::Ams)
    }

    pub fn name(&self) -> &'static str {
        match self {
            SketchKind::Gaussian => "gaussian",
            SketchKind::Ams => "ams",
            SketchKind::Srht => "srht",
            SketchKind::Srct => "srct",
            SketchKind::TensorSrht => "tensorsrht",
            SketchKind::TensorSrct => "tensorsrct",
        }
    }
}

impl std::str::FromStr for SketchKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(SketchKind::Gaussian),
            "ams" => Ok(SketchKind::Ams),
            "srht" => Ok(SketchKind::Srht),
            "srct" => Ok(SketchKind::Srct),
            "tensorsrht" => Ok(SketchKind::TensorSrht),
            "tensorsrct" => Ok(SketchKind::TensorSrct),
            other => Err(Error::BadParameters(format!("unknown sketch kind '{other}'"))),
        }
    }
}

impl std::fmt::Display for SketchKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Sketch kind plus dimensions and seed. For tensor kinds `n` is the
/// per-factor dimension; the effective input dimension is n^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SketchConfig {
    pub kind: SketchKind,
    pub m: usize,
    pub n: usize,
    pub seed: SeedSpec,
}

impl SketchConfig {
    pub fn new(kind: SketchKind, m: usize, n: usize, seed: SeedSpec) -> Self {
        Self { kind, m, n, seed }
    }

    pub fn effective_input_dim(&self) -> usize {
        if self.kind.is_tensor() {
            self.n * self.n
        } else {
            self.n
        }
    }
}

/// A realized sketch: immutable fast-apply state drawn from disjoint
/// streams of the config seed.
#[derive(Debug, Clone)]
pub struct Sketch {
    config: SketchConfig,
    sampled_rows: Vec<usize>,
    sign_diagonals: Vec<DenseVector>,
    circulant_gens: Vec<CirculantGenerator>,
    hash_family: Vec<FourWiseHash>,
    gaussian_rng: Option<CounterRng>,
}

/// Realize a sketch from its configuration. Deterministic per seed.
pub fn build_sketch(config: &SketchConfig) -> Result<Sketch> {
    if config.m == 0 {
        return Err(Error::BadParameters("sketch requires m >= 1".into()));
    }
    if config.n == 0 {
        return Err(Error::BadParameters("sketch requires n >= 1".into()));
    }
    if config.kind.needs_pow2() && !config.n.is_power_of_two() {
        return Err(Error::BadDimension(format!(
            "{} requires power-of-two n, got {}",
            config.kind, config.n
        )));
    }
    let seed = config.seed;
    let n = config.n;
    let n_eff = config.effective_input_dim();
    let mut sampled_rows = Vec::new();
    let mut sign_diagonals = Vec::new();
    let mut circulant_gens = Vec::new();
    let mut hash_family = Vec::new();
    let mut gaussian_rng = None;
    match config.kind {
        SketchKind::Gaussian => {
            gaussian_rng = Some(CounterRng::new(&seed.child(TAG_GAUSS)));
        }
        SketchKind::Ams => {
            let base = seed.child(TAG_HASH);
            hash_family = (0..config.m).map(|k| FourWiseHash::draw(&base.child(k as u64))).collect();
        }
        SketchKind::Srht => {
            sampled_rows = sample_rows(&seed.child(TAG_ROWS), config.m, n_eff);
            sign_diagonals.push(rademacher_vector(&seed.child(TAG_DIAG1), n));
        }
        SketchKind::Srct => {
            sampled_rows = sample_rows(&seed.child(TAG_ROWS), config.m, n_eff);
            sign_diagonals.push(rademacher_vector(&seed.child(TAG_DIAG1), n));
            circulant_gens.push(CirculantGenerator::new(rademacher_vector(&seed.child(TAG_GEN1), n))?);
        }
        SketchKind::TensorSrht => {
            sampled_rows = sample_rows(&seed.child(TAG_ROWS), config.m, n_eff);
            sign_diagonals.push(rademacher_vector(&seed.child(TAG_DIAG1), n));
            sign_diagonals.push(rademacher_vector(&seed.child(TAG_DIAG2), n));
        }
        SketchKind::TensorSrct => {
            sampled_rows = sample_rows(&seed.child(TAG_ROWS), config.m, n_eff);
            sign_diagonals.push(rademacher_vector(&seed.child(TAG_DIAG1), n));
            sign_diagonals.push(rademacher_vector(&seed.child(TAG_DIAG2), n));
            // Two independent generators, one per tensor factor.
            circulant_gens.push(CirculantGenerator::new(rademacher_vector(&seed.child(TAG_GEN1), n))?);
            circulant_gens.push(CirculantGenerator::new(rademacher_vector(&seed.child(TAG_GEN2), n))?);
        }
    }
    Ok(Sketch { config: *config, sampled_rows, sign_diagonals, circulant_gens, hash_family, gaussian_rng })
}

impl Sketch {
    pub fn config(&self) -> &SketchConfig {
        &self.config
    }

    pub fn kind(&self) -> SketchKind {
        self.config.kind
    }

    pub fn rows(&self) -> usize {
        self.config.m
    }

    pub fn effective_input_dim(&self) -> usize {
        self.config.effective_input_dim()
    }

    /// Sampled flat row index for output row k, split into factor indices
    /// for tensor kinds.
    #[inline]
    fn decode_row(&self, k: usize) -> (usize, usize) {
        let flat = self.sampled_rows[k];
        let n = self.config.n;
        (flat / n, flat % n)
    }

    /// Entry S[k][j] computed directly from the defining structure.
    /// This is the dense reference path; the fast application never
    /// calls it.
    pub fn dense_entry(&self, k: usize, j: usize) -> f64 {
        let m = self.config.m;
        let n = self.config.n;
        let inv = 1.0 / (m as f64).sqrt();
        match self.config.kind {
            SketchKind::Gaussian => {
                let rng = self.gaussian_rng.as_ref().unwrap();
                rng.gaussian_at((k * self.effective_input_dim() + j) as u64) * inv
            }
            SketchKind::Ams => self.hash_family[k].sign(j as u64) * inv,
            SketchKind::Srht => {
                let r = self.sampled_rows[k];
                hadamard_entry(r, j) * self.sign_diagonals[0][j] * inv
            }
            SketchKind::Srct => {
                let r = self.sampled_rows[k];
                self.circulant_gens[0].entry(r, j) * self.sign_diagonals[0][j] * inv
            }
            SketchKind::TensorSrht => {
                let (i1, i2) = self.decode_row(k);
                let (j1, j2) = (j / n, j % n);
                hadamard_entry(i1, j1)
                    * self.sign_diagonals[0][j1]
                    * hadamard_entry(i2, j2)
                    * self.sign_diagonals[1][j2]
                    * inv
            }
            SketchKind::TensorSrct => {
                let (i1, i2) = self.decode_row(k);
                let (j1, j2) = (j / n, j % n);
                self.circulant_gens[0].entry(i1, j1)
                    * self.sign_diagonals[0][j1]
                    * self.circulant_gens[1].entry(i2, j2)
                    * self.sign_diagonals[1][j2]
                    * inv
            }
        }
    }

    /// S v through the dense entry formulas, streaming one row at a time.
    /// Reference path for tests and the tensor-kind slow path; O(m n).
    pub fn dense_apply(&self, v: &DenseVector) -> Result<DenseVector> {
        let n_eff = self.effective_input_dim();
        if v.len() != n_eff {
            return Err(Error::DimensionMismatch { expected: n_eff, got: v.len() });
        }
        let mut out = vec![0.0; self.config.m];
        for (k, o) in out.iter_mut().enumerate() {
            let mut s = 0.0;
            for j in 0..n_eff {
                s += self.dense_entry(k, j) * v[j];
            }
            *o = s;
        }
        Ok(DenseVector::new(out))
    }

    /// Apply the sketch to a vector of the effective input dimension.
    /// O(n log n) for the transform kinds; tensor kinds take a
    /// materialized length-n^2 vector and use the dense slow path.
    pub fn apply_vec(&self, v: &DenseVector) -> Result<DenseVector> {
        let n_eff = self.effective_input_dim();
        if v.len() != n_eff {
            return Err(Error::DimensionMismatch { expected: n_eff, got: v.len() });
        }
        let m = self.config.m;
        let inv = 1.0 / (m as f64).sqrt();
        match self.config.kind {
            SketchKind::Gaussian | SketchKind::Ams | SketchKind::TensorSrht | SketchKind::TensorSrct => {
                self.dense_apply(v)
            }
            SketchKind::Srht => {
                let mut t: Vec<f64> =
                    v.as_slice().iter().zip(self.sign_diagonals[0].as_slice()).map(|(x, s)| x * s).collect();
                fwht_slice(&mut t);
                Ok(DenseVector::new(self.sampled_rows.iter().map(|&r| t[r] * inv).collect()))
            }
            SketchKind::Srct => {
                let t = DenseVector::new(
                    v.as_slice().iter().zip(self.sign_diagonals[0].as_slice()).map(|(x, s)| x * s).collect(),
                );
                let t = self.circulant_gens[0].apply(&t)?;
                Ok(DenseVector::new(self.sampled_rows.iter().map(|&r| t[r] * inv).collect()))
            }
        }
    }

    /// S A, column by column.
    pub fn apply_mat(&self, a: &DenseMatrix) -> Result<DenseMatrix> {
        let n_eff = self.effective_input_dim();
        if a.rows() != n_eff {
            return Err(Error::DimensionMismatch { expected: n_eff, got: a.rows() });
        }
        let mut out = DenseMatrix::zeros(self.config.m, a.cols());
        for j in 0..a.cols() {
            let col = self.apply_vec(&a.column_vec(j))?;
            out.col_mut(j).copy_from_slice(col.as_slice());
        }
        Ok(out)
    }

    /// S (x (x) y) without materializing the tensor: transform each factor
    /// once, then read off sampled coordinate products. O(n log n + m).
    pub fn apply_tensor(&self, x: &DenseVector, y: &DenseVector) -> Result<DenseVector> {
        if !self.config.kind.is_tensor() {
            return Err(Error::WrongKind(self.config.kind.to_string()));
        }
        let n = self.config.n;
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: x.len() });
        }
        if y.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: y.len() });
        }
        let u = self.transform_factor(x, 0)?;
        let w = self.transform_factor(y, 1)?;
        let inv = 1.0 / (self.config.m as f64).sqrt();
        let out = (0..self.config.m)
            .map(|k| {
                let (i1, i2) = self.decode_row(k);
                u[i1] * w[i2] * inv
            })
            .collect();
        Ok(DenseVector::new(out))
    }

    /// Transform D_f v with the kind's fast kernel (factor f in {0, 1}).
    fn transform_factor(&self, v: &DenseVector, factor: usize) -> Result<DenseVector> {
        let signed: Vec<f64> =
            v.as_slice().iter().zip(self.sign_diagonals[factor].as_slice()).map(|(x, s)| x * s).collect();
        match self.config.kind {
            SketchKind::TensorSrht => {
                let mut t = signed;
                fwht_slice(&mut t);
                Ok(DenseVector::new(t))
            }
            SketchKind::TensorSrct => self.circulant_gens[factor].apply(&DenseVector::new(signed)),
            _ => unreachable!(),
        }
    }

    /// Explicit m x n_eff matrix built from the dense entry formulas.
    pub fn materialize(&self) -> Result<DenseMatrix> {
        let n_eff = self.effective_input_dim();
        let entries = self.config.m.saturating_mul(n_eff);
        if entries > MATERIALIZE_GUARD {
            return Err(Error::TooLarge(entries, MATERIALIZE_GUARD));
        }
        Ok(DenseMatrix::from_fn(self.config.m, n_eff, |k, j| self.dense_entry(k, j)))
    }
}

/// Row-count recommendation evaluated from the asymptotic formulas with a
/// user constant `c`, clamped to [d+1, n_input].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RowRecommendation {
    pub m: usize,
    pub clamped: bool,
}

/// Recommended sketch rows for target distortion eps and failure
/// probability delta. `n` is the effective input dimension (pass n^2 for
/// tensor kinds); natural logarithms throughout.
pub fn recommend_m(
    kind: SketchKind,
    eps: f64,
    delta: f64,
    n: usize,
    d: usize,
    c: f64,
) -> Result<RowRecommendation> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::BadParameters(format!("eps must be in (0, 1], got {eps}")));
    }
    if !(delta > 0.0 && delta < 0.1) {
        return Err(Error::BadParameters(format!("delta must be in (0, 0.1), got {delta}")));
    }
    if !(c > 0.0) {
        return Err(Error::BadParameters(format!("c must be positive, got {c}")));
    }
    if d == 0 || n == 0 {
        return Err(Error::BadParameters("n and d must be positive".into()));
    }
    let l = (n as f64 / delta).ln();
    let df = d as f64;
    let raw = match kind {
        SketchKind::Gaussian | SketchKind::Ams | SketchKind::Srht => eps.powi(-2) * df * l.powi(3),
        SketchKind::TensorSrht => eps.powi(-2) * df * df * l.powi(3),
        SketchKind::Srct => eps.powi(-2) * df * df * l.powi(2),
        SketchKind::TensorSrct => eps.powi(-2) * df.powi(4) * l.powi(3),
    };
    let ideal = (c * raw).ceil() as usize;
    let lo = d + 1;
    let hi = n.max(lo);
    let m = ideal.clamp(lo, hi);
    Ok(RowRecommendation { m, clamped: m != ideal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::tensor_vec;
    use crate::rng::CounterRng;

    fn gaussian_vec(len: usize, seed: u64) -> DenseVector {
        let rng = CounterRng::new(&SeedSpec::new(seed, 900));
        DenseVector::new((0..len).map(|i| rng.gaussian_at(i as u64)).collect())
    }

    fn cfg(kind: SketchKind, m: usize, n: usize, seed: u64) -> SketchConfig {
        SketchConfig::new(kind, m, n, SeedSpec::new(seed, 0))
    }

    #[test]
    fn build_deterministic() {
        for kind in SketchKind::ALL {
            let c = cfg(kind, 8, 16, 3);
            let a = build_sketch(&c).unwrap().materialize().unwrap();
            let b = build_sketch(&c).unwrap().materialize().unwrap();
            assert_eq!(a, b, "{kind}");
        }
    }

    #[test]
    fn srht_rows_are_dense_signs() {
        let s = build_sketch(&cfg(SketchKind::Srht, 16, 16, 5)).unwrap();
        let m = s.materialize().unwrap();
        let mag = 1.0 / (16.0_f64).sqrt();
        for k in 0..16 {
            for j in 0..16 {
                assert!((m.get(k, j).abs() - mag).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn gaussian_entry_variance() {
        let s = build_sketch(&cfg(SketchKind::Gaussian, 256, 64, 9)).unwrap();
        let m = s.materialize().unwrap();
        let var = m.data().iter().map(|x| x * x).sum::<f64>() / m.data().len() as f64;
        assert!((var - 1.0 / 256.0).abs() < 0.1 / 256.0, "var {var}");
    }

    #[test]
    fn apply_vec_zero_and_homogeneous() {
        for kind in [SketchKind::Gaussian, SketchKind::Ams, SketchKind::Srht, SketchKind::Srct] {
            let s = build_sketch(&cfg(kind, 16, 64, 7)).unwrap();
            let zero = s.apply_vec(&DenseVector::zeros(64)).unwrap();
            assert!(zero.max_abs() == 0.0);
            let v = gaussian_vec(64, 8);
            let sv = s.apply_vec(&v).unwrap();
            let ssv = s.apply_vec(&v.scale(2.5)).unwrap();
            for i in 0..16 {
                assert!((ssv[i] - 2.5 * sv[i]).abs() <= 1e-12 * sv.norm().max(1.0));
            }
        }
    }

    #[test]
    fn fast_apply_matches_dense_oracle() {
        for kind in [SketchKind::Srht, SketchKind::Srct] {
            let s = build_sketch(&cfg(kind, 64, 256, 13)).unwrap();
            let v = gaussian_vec(256, 14);
            let fast = s.apply_vec(&v).unwrap();
            let mat = s.materialize().unwrap();
            let dense = mat.matvec(&v).unwrap();
            let scale = dense.norm().max(1.0);
            for i in 0..64 {
                assert!((fast[i] - dense[i]).abs() <= 1e-10 * scale, "{kind}");
            }
        }
    }

    #[test]
    fn apply_mat_consistent_with_columns() {
        let s = build_sketch(&cfg(SketchKind::Srht, 32, 512, 17)).unwrap();
        let a = DenseMatrix::from_fn(512, 8, |i, j| {
            CounterRng::new(&SeedSpec::new(18, j as u64)).gaussian_at(i as u64)
        });
        let sa = s.apply_mat(&a).unwrap();
        for j in 0..8 {
            let col = s.apply_vec(&a.column_vec(j)).unwrap();
            for i in 0..32 {
                assert_eq!(sa.get(i, j), col[i]);
            }
        }
        // (SA)x = S(Ax)
        let x = gaussian_vec(8, 19);
        let lhs = sa.matvec(&x).unwrap();
        let rhs = s.apply_vec(&a.matvec(&x).unwrap()).unwrap();
        let scale = rhs.norm().max(1.0);
        for i in 0..32 {
            assert!((lhs[i] - rhs[i]).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn tensor_apply_matches_dense_oracle() {
        for kind in [SketchKind::TensorSrht, SketchKind::TensorSrct] {
            let s = build_sketch(&cfg(kind, 128, 64, 23)).unwrap();
            let x = gaussian_vec(64, 24);
            let y = gaussian_vec(64, 25);
            let fast = s.apply_tensor(&x, &y).unwrap();
            let z = tensor_vec(&x, &y).unwrap();
            let dense = s.materialize().unwrap().matvec(&z).unwrap();
            let scale = dense.norm().max(1.0);
            for i in 0..128 {
                assert!((fast[i] - dense[i]).abs() <= 1e-10 * scale, "{kind}");
            }
            // Slow path agrees too.
            let slow = s.apply_vec(&z).unwrap();
            for i in 0..128 {
                assert!((fast[i] - slow[i]).abs() <= 1e-10 * scale, "{kind} slow");
            }
        }
    }

    #[test]
    fn tensor_apply_bilinear_and_zero() {
        let s = build_sketch(&cfg(SketchKind::TensorSrht, 32, 16, 29)).unwrap();
        let x = gaussian_vec(16, 30);
        let y = gaussian_vec(16, 31);
        let zero = s.apply_tensor(&DenseVector::zeros(16), &y).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
        let base = s.apply_tensor(&x, &y).unwrap();
        let scaled = s.apply_tensor(&x.scale(3.0), &y).unwrap();
        for i in 0..32 {
            assert!((scaled[i] - 3.0 * base[i]).abs() <= 1e-12 * base.norm().max(1.0));
        }
    }

    #[test]
    fn tensor_apply_wrong_kind() {
        let s = build_sketch(&cfg(SketchKind::Srht, 8, 16, 1)).unwrap();
        let v = gaussian_vec(16, 2);
        assert!(matches!(s.apply_tensor(&v, &v), Err(Error::WrongKind(_))));
    }

    #[test]
    fn unit_columns_srht_srct() {
        for kind in [SketchKind::Srht, SketchKind::Srct] {
            let s = build_sketch(&cfg(kind, 24, 64, 33)).unwrap();
            let m = s.materialize().unwrap();
            for j in 0..64 {
                let norm2: f64 = m.col(j).iter().map(|x| x * x).sum();
                assert!((norm2 - 1.0).abs() <= 1e-12, "{kind} col {j}: {norm2}");
            }
        }
    }

    #[test]
    fn ams_entries_are_signs() {
        let s = build_sketch(&cfg(SketchKind::Ams, 16, 32, 37)).unwrap();
        let m = s.materialize().unwrap();
        let mag = 1.0 / 4.0;
        for v in m.data() {
            assert!((v.abs() - mag).abs() < 1e-15);
        }
    }

    #[test]
    fn build_rejects_non_pow2() {
        assert!(matches!(build_sketch(&cfg(SketchKind::Srht, 4, 12, 1)), Err(Error::BadDimension(_))));
        assert!(build_sketch(&cfg(SketchKind::Gaussian, 4, 12, 1)).is_ok());
    }

    #[test]
    fn recommend_m_formula_value() {
        // Independent evaluation of the stated formula.
        let eps = 1.0;
        let delta = 0.05;
        let n = 1usize << 16;
        let d = 4;
        let expected = (4.0 * ((n as f64) / delta).ln().powi(3)).ceil() as usize;
        let rec = recommend_m(SketchKind::Srht, eps, delta, n, d, 1.0).unwrap();
        assert_eq!(rec.m, expected.clamp(5, n));
        assert!(!rec.clamped);
    }

    #[test]
    fn recommend_m_scalings() {
        let n = 1usize << 20;
        let base = recommend_m(SketchKind::Srht, 0.5, 0.01, n, 4, 1e-3).unwrap();
        let double_d = recommend_m(SketchKind::Srht, 0.5, 0.01, n, 8, 1e-3).unwrap();
        // Linear in d (pre-clamp; c keeps everything inside the window).
        assert!((double_d.m as f64 / base.m as f64 - 2.0).abs() < 0.01);
        let half_eps = recommend_m(SketchKind::Srht, 0.25, 0.01, n, 4, 1e-3).unwrap();
        assert!((half_eps.m as f64 / base.m as f64 - 4.0).abs() < 0.01);
    }

    #[test]
    fn recommend_m_clamps() {
        let rec = recommend_m(SketchKind::Srht, 0.5, 0.01, 64, 4, 1.0).unwrap();
        assert_eq!(rec.m, 64);
        assert!(rec.clamped);
        let rec_lo = recommend_m(SketchKind::Srht, 1.0, 0.05, 1 << 20, 4, 1e-9).unwrap();
        assert_eq!(rec_lo.m, 5);
        assert!(rec_lo.clamped);
    }

    #[test]
    fn recommend_m_bad_parameters() {
        assert!(recommend_m(SketchKind::Srht, 0.0, 0.05, 64, 4, 1.0).is_err());
        assert!(recommend_m(SketchKind::Srht, 0.5, 0.5, 64, 4, 1.0).is_err());
        assert!(recommend_m(SketchKind::Srht, 0.5, 0.05, 64, 4, -1.0).is_err());
    }
}
