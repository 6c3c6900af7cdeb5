//! Sketch-and-solve least squares, plain and degree-2 Kronecker.
//! Residual norms are always reported against the original (unsketched)
//! system.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::linalg::{
    back_substitute, householder_qr, solve_ls_exact, svd_small, DenseMatrix, DenseVector,
    RANK_TOL,
};
use crate::sketch::{build_sketch, SketchConfig};

const KRON_DSQ_CAP: usize = 4096;

/// A plain n x d system or a Kronecker system (A1 (x) A2) x ~ b1 (x) b2.
#[derive(Debug, Clone)]
pub enum RegressionProblem {
    Plain { a: DenseMatrix, b: DenseVector },
    Kronecker { a1: DenseMatrix, a2: DenseMatrix, b1: DenseVector, b2: DenseVector },
}

impl RegressionProblem {
    pub fn plain(a: DenseMatrix, b: DenseVector) -> Result<Self> {
        if b.len() != a.rows() {
            return Err(Error::DimensionMismatch { expected: a.rows(), got: b.len() });
        }
        Ok(RegressionProblem::Plain { a, b })
    }

    pub fn kronecker(a1: DenseMatrix, a2: DenseMatrix, b1: DenseVector, b2: DenseVector) -> Result<Self> {
        if b1.len() != a1.rows() {
            return Err(Error::DimensionMismatch { expected: a1.rows(), got: b1.len() });
        }
        if b2.len() != a2.rows() {
            return Err(Error::DimensionMismatch { expected: a2.rows(), got: b2.len() });
        }
        let dsq = a1.cols() * a2.cols();
        if dsq > KRON_DSQ_CAP {
            return Err(Error::TooLarge(dsq, KRON_DSQ_CAP));
        }
        Ok(RegressionProblem::Kronecker { a1, a2, b1, b2 })
    }
}

#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct SolveStats {
    pub m: usize,
    pub wall_time_secs: f64,
    pub clamped: bool,
}

#[derive(Debug, Clone)]
pub struct RegressionSolution {
    pub x: DenseVector,
    pub residual_norm: f64,
    pub sketch_used: Option<SketchConfig>,
    pub stats: SolveStats,
}

/// Exact solve of a plain problem.
pub fn solve_plain_exact(p: &RegressionProblem) -> Result<RegressionSolution> {
    let start = Instant::now();
    let RegressionProblem::Plain { a, b } = p else {
        return Err(Error::WrongKind("kronecker problem passed to plain solver".into()));
    };
    let x = solve_ls_exact(a, b)?;
    let residual_norm = a.matvec(&x)?.sub(b)?.norm();
    Ok(RegressionSolution {
        x,
        residual_norm,
        sketch_used: None,
        stats: SolveStats { m: a.rows(), wall_time_secs: start.elapsed().as_secs_f64(), clamped: false },
    })
}

/// Solve the m x d system min ||SA x - Sb|| by QR, erroring if SA is
/// numerically rank deficient.
fn solve_sketched_system(sa: &DenseMatrix, sb: &DenseVector) -> Result<DenseVector> {
    let svd = svd_small(sa)?;
    let smax = svd.sigma[0];
    let smin = svd.sigma[sa.cols() - 1];
    if smax == 0.0 || smin / smax <= RANK_TOL {
        return Err(Error::RankDeficient(if smax == 0.0 { 0.0 } else { smin / smax }));
    }
    let (q, r) = householder_qr(sa)?;
    back_substitute(&r, &q.matvec_t(sb)?)
}

/// Sketch-and-solve for a plain problem. For transform kinds the rows of
/// A and b are zero padded up to cfg.n (a power of two); padding adds
/// zero rows so the solution and residual are unchanged.
pub fn solve_plain_sketched(p: &RegressionProblem, cfg: &SketchConfig) -> Result<RegressionSolution> {
    let start = Instant::now();
    let RegressionProblem::Plain { a, b } = p else {
        return Err(Error::WrongKind("kronecker problem passed to plain solver".into()));
    };
    if cfg.kind.is_tensor() {
        return Err(Error::WrongKind(format!("{} cannot sketch a plain system", cfg.kind)));
    }
    if cfg.m < a.cols() + 1 {
        return Err(Error::BadParameters(format!("m = {} below d + 1 = {}", cfg.m, a.cols() + 1)));
    }
    let expected_n =
        if cfg.kind.needs_pow2() { a.rows().next_power_of_two() } else { a.rows() };
    if cfg.n != expected_n {
        return Err(Error::BadDimension(format!(
            "config n = {} does not match (padded) row count {expected_n}",
            cfg.n
        )));
    }
    let sketch = build_sketch(cfg)?;
    let (sa, sb) = if cfg.n != a.rows() {
        (sketch.apply_mat(&a.pad_rows(cfg.n)?)?, sketch.apply_vec(&b.pad(cfg.n)?)?)
    } else {
        (sketch.apply_mat(a)?, sketch.apply_vec(b)?)
    };
    let x = solve_sketched_system(&sa, &sb)?;
    let residual_norm = a.matvec(&x)?.sub(b)?.norm();
    Ok(RegressionSolution {
        x,
        residual_norm,
        sketch_used: Some(*cfg),
        stats: SolveStats { m: cfg.m, wall_time_secs: start.elapsed().as_secs_f64(), clamped: false },
    })
}

/// Sketch-and-solve for a Kronecker problem with a tensor sketch: each
/// column of S(A1 (x) A2) comes from one apply_tensor call, never
/// materializing the n^2 x d^2 system.
pub fn solve_kron_sketched(p: &RegressionProblem, cfg: &SketchConfig) -> Result<RegressionSolution> {
    let start = Instant::now();
    let RegressionProblem::Kronecker { a1, a2, b1, b2 } = p else {
        return Err(Error::WrongKind("plain problem passed to kronecker solver".into()));
    };
    if !cfg.kind.is_tensor() {
        return Err(Error::WrongKind(format!("{} cannot sketch a kronecker system", cfg.kind)));
    }
    if a1.rows() != a2.rows() {
        return Err(Error::DimensionMismatch { expected: a1.rows(), got: a2.rows() });
    }
    let expected_n = a1.rows().next_power_of_two();
    if cfg.n != expected_n {
        return Err(Error::BadDimension(format!(
            "config n = {} does not match (padded) factor row count {expected_n}",
            cfg.n
        )));
    }
    let dsq = a1.cols() * a2.cols();
    if cfg.m < dsq + 1 {
        return Err(Error::BadParameters(format!("m = {} below d^2 + 1 = {}", cfg.m, dsq + 1)));
    }
    let sketch = build_sketch(cfg)?;
    let (pa1, pa2) = (a1.pad_rows(cfg.n)?, a2.pad_rows(cfg.n)?);
    let (pb1, pb2) = (b1.pad(cfg.n)?, b2.pad(cfg.n)?);
    let mut sa = DenseMatrix::zeros(cfg.m, dsq);
    for j1 in 0..a1.cols() {
        let c1 = pa1.column_vec(j1);
        for j2 in 0..a2.cols() {
            let col = sketch.apply_tensor(&c1, &pa2.column_vec(j2))?;
            sa.col_mut(j1 * a2.cols() + j2).copy_from_slice(col.as_slice());
        }
    }
    let sb = sketch.apply_tensor(&pb1, &pb2)?;
    let x = solve_sketched_system(&sa, &sb)?;
    // Residual against the original Kronecker system, computed factorwise:
    // (A1 (x) A2) x reshapes to A1 X A2^T with X the d1 x d2 unfolding.
    let residual_norm = kron_residual_norm(a1, a2, b1, b2, &x)?;
    Ok(RegressionSolution {
        x,
        residual_norm,
        sketch_used: Some(*cfg),
        stats: SolveStats { m: cfg.m, wall_time_secs: start.elapsed().as_secs_f64(), clamped: false },
    })
}

fn kron_residual_norm(
    a1: &DenseMatrix,
    a2: &DenseMatrix,
    b1: &DenseVector,
    b2: &DenseVector,
    x: &DenseVector,
) -> Result<f64> {
    let (d1, d2) = (a1.cols(), a2.cols());
    if x.len() != d1 * d2 {
        return Err(Error::DimensionMismatch { expected: d1 * d2, got: x.len() });
    }
    // X[j1][j2] = x[j1*d2 + j2]; (A1 (x) A2) x = vec(A1 X A2^T) row-block order.
    let xm = DenseMatrix::from_fn(d1, d2, |j1, j2| x[j1 * d2 + j2]);
    let a1x = a1.matmul(&xm)?; // n1 x d2
    let mut sum = 0.0;
    for i1 in 0..a1.rows() {
        for i2 in 0..a2.rows() {
            let mut v = 0.0;
            for j2 in 0..d2 {
                v += a1x.get(i1, j2) * a2.get(i2, j2);
            }
            let r = v - b1[i1] * b2[i2];
            sum += r * r;
        }
    }
    Ok(sum.sqrt())
}

/// |<a, x*> - <a, x'>|.
pub fn linf_deviation(a: &DenseVector, x_star: &DenseVector, x_prime: &DenseVector) -> Result<f64> {
    if a.len() != x_star.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: x_star.len() });
    }
    if a.len() != x_prime.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: x_prime.len() });
    }
    Ok((a.dot(x_star)? - a.dot(x_prime)?).abs())
}
