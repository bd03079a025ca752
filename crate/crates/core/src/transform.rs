//! Discrete Tchebichef polynomials and exact orthonormal block transforms.
//!
//! The polynomials `t_k[n]` are generated by the three-term recursion seeded
//! with `t_0[n] = 1` and `t_1[n] = 2n - N + 1`. Row `k` of the DTT matrix is
//! `t_k[n] / sqrt(rho(k, N))`, where `rho(k, N)` is the squared norm of the
//! row. All values are integers for the sizes used in block coding, so the
//! recursion is exact in double precision up to `N = 16` or so and accurate to
//! a few ulps beyond.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, mismatch, Result};
use crate::matrix::SquareMatrix;

/// Largest supported transform length. Beyond it the integer recursion
/// loses precision (orthonormality error 7e-10 at 32, 1e-4 at 48).
pub const MAX_SIZE: usize = 24;

/// Transform-domain coefficients `M[p, q]` of an N×N block.
pub type CoeffBlock = SquareMatrix;

fn check_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_SIZE {
        return Err(domain(format!("transform size {n} outside 1..={MAX_SIZE}")));
    }
    Ok(())
}

/// Table of unnormalized discrete Tchebichef polynomials, entry `(k, n)` = `t_k[n]`.
#[derive(Debug, Clone)]
pub struct TchebichefBasis {
    values: SquareMatrix,
}

impl TchebichefBasis {
    pub fn new(size: usize) -> Result<Self> {
        check_size(size)?;
        let big_n = size as f64;
        let mut values = SquareMatrix::zeros(size);
        for n in 0..size {
            values[(0, n)] = 1.0;
            if size > 1 {
                values[(1, n)] = 2.0 * n as f64 - big_n + 1.0;
            }
        }
        for k in 2..size {
            let kf = k as f64;
            let prev_gap = (k - 1) as f64;
            for n in 0..size {
                let lead = (2.0 * kf - 1.0) * values[(1, n)] * values[(k - 1, n)];
                let tail = prev_gap * (big_n * big_n - prev_gap * prev_gap) * values[(k - 2, n)];
                values[(k, n)] = (lead - tail) / kf;
            }
        }
        Ok(Self { values })
    }

    pub fn size(&self) -> usize {
        self.values.size()
    }

    pub fn get(&self, k: usize, n: usize) -> f64 {
        self.values[(k, n)]
    }

    pub fn values(&self) -> &SquareMatrix {
        &self.values
    }
}

/// `t_k[n]` for an N-point basis.
pub fn tcheb_poly(k: usize, n: usize, size: usize) -> Result<f64> {
    check_size(size)?;
    if k >= size || n >= size {
        return Err(domain(format!(
            "polynomial index (k={k}, n={n}) outside 0..{size}"
        )));
    }
    let big_n = size as f64;
    let t1 = 2.0 * n as f64 - big_n + 1.0;
    let (mut older, mut old) = (1.0, t1);
    if k == 0 {
        return Ok(older);
    }
    for j in 2..=k {
        let jf = j as f64;
        let gap = (j - 1) as f64;
        let next = ((2.0 * jf - 1.0) * t1 * old - gap * (big_n * big_n - gap * gap) * older) / jf;
        older = old;
        old = next;
    }
    Ok(old)
}

/// Squared norm of polynomial row `k`: `(N+k)! / ((2k+1)·(N-k-1)!)`.
///
/// Evaluated as the running product `(N-k)(N-k+1)…(N+k)` over `2k+1`.
pub fn rho(k: usize, size: usize) -> Result<f64> {
    check_size(size)?;
    if k >= size {
        return Err(domain(format!("order {k} must be below size {size}")));
    }
    let product: f64 = ((size - k)..=(size + k)).map(|j| j as f64).product();
    Ok(product / (2 * k + 1) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformKind {
    ExactDtt,
    ExactDct,
    Approximation,
}

/// Real N×N analysis matrix; rows are basis vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformMatrix {
    kind: TransformKind,
    matrix: SquareMatrix,
}

impl TransformMatrix {
    pub fn new(kind: TransformKind, matrix: SquareMatrix) -> Self {
        Self { kind, matrix }
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.matrix.size()
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.matrix
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.matrix[(r, c)]
    }
}

/// Orthonormal N-point DTT matrix.
pub fn dtt_matrix(size: usize) -> Result<TransformMatrix> {
    let basis = TchebichefBasis::new(size)?;
    let norms: Vec<f64> = (0..size)
        .map(|k| rho(k, size).map(f64::sqrt))
        .collect::<Result<_>>()?;
    Ok(TransformMatrix::new(
        TransformKind::ExactDtt,
        SquareMatrix::from_fn(size, |k, n| basis.get(k, n) / norms[k]),
    ))
}

/// Orthonormal DCT-II matrix.
pub fn dct_matrix(size: usize) -> Result<TransformMatrix> {
    check_size(size)?;
    let nf = size as f64;
    Ok(TransformMatrix::new(
        TransformKind::ExactDct,
        SquareMatrix::from_fn(size, |k, n| {
            let scale = if k == 0 {
                (1.0 / nf).sqrt()
            } else {
                (2.0 / nf).sqrt()
            };
            scale * (PI * (2 * n + 1) as f64 * k as f64 / (2.0 * nf)).cos()
        }),
    ))
}

/// Separable 2-D transform of square blocks.
pub trait BlockTransform {
    fn size(&self) -> usize;

    /// `T · block · Tᵀ`.
    fn forward_2d(&self, block: &SquareMatrix) -> Result<CoeffBlock>;

    /// Reconstruction from coefficients. Exact transforms return the true
    /// inverse `Tᵀ · M · T`; approximations may use a near inverse.
    fn inverse_2d(&self, coeffs: &CoeffBlock) -> Result<SquareMatrix>;
}

pub(crate) fn check_block(expected: usize, block: &SquareMatrix) -> Result<()> {
    if block.size() != expected {
        return Err(mismatch(
            format!("{expected}x{expected} block"),
            format!("{0}x{0} block", block.size()),
        ));
    }
    Ok(())
}

impl BlockTransform for TransformMatrix {
    fn size(&self) -> usize {
        self.matrix.size()
    }

    fn forward_2d(&self, block: &SquareMatrix) -> Result<CoeffBlock> {
        check_block(self.size(), block)?;
        self.matrix.mul(block)?.mul(&self.matrix.transpose())
    }

    fn inverse_2d(&self, coeffs: &CoeffBlock) -> Result<SquareMatrix> {
        check_block(self.size(), coeffs)?;
        self.matrix.transpose().mul(coeffs)?.mul(&self.matrix)
    }
}

pub fn apply_2d<T: BlockTransform + ?Sized>(t: &T, block: &SquareMatrix) -> Result<CoeffBlock> {
    t.forward_2d(block)
}

pub fn inverse_2d<T: BlockTransform + ?Sized>(t: &T, coeffs: &CoeffBlock) -> Result<SquareMatrix> {
    t.inverse_2d(coeffs)
}

/// `max |(A·Aᵀ − I)_{ij}|`.
pub fn orthonormality_error(a: &SquareMatrix) -> f64 {
    let gram = a.mul(&a.transpose()).expect("square");
    gram.sub(&SquareMatrix::identity(a.size()))
        .expect("same size")
        .max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Pochhammer rising factorial `(a)_k`.
    fn pochhammer(a: f64, k: usize) -> f64 {
        (0..k).map(|i| a + i as f64).product()
    }

    /// Closed form `t_k[n] = (1-N)_k · 3F2(-k, -n, 1+k; 1, 1-N; 1)`; the series
    /// terminates at `j = k`.
    fn hypergeometric_oracle(k: usize, n: usize, size: usize) -> f64 {
        let (kf, nf, bn) = (k as f64, n as f64, size as f64);
        let series: f64 = (0..=k)
            .map(|j| {
                let num = pochhammer(-kf, j) * pochhammer(-nf, j) * pochhammer(1.0 + kf, j);
                let den = pochhammer(1.0, j) * pochhammer(1.0 - bn, j) * pochhammer(1.0, j);
                num / den
            })
            .sum();
        pochhammer(1.0 - bn, k) * series
    }

    #[test]
    fn recursion_matches_closed_form() {
        for size in 1..=8 {
            for k in 0..size {
                for n in 0..size {
                    let rec = tcheb_poly(k, n, size).unwrap();
                    let closed = hypergeometric_oracle(k, n, size);
                    assert!(
                        (rec - closed).abs() <= 1e-9 * closed.abs().max(1.0),
                        "N={size} k={k} n={n}: {rec} vs {closed}"
                    );
                }
            }
        }
    }

    #[test]
    fn polynomial_examples() {
        assert_eq!(tcheb_poly(0, 3, 8).unwrap(), 1.0);
        assert_eq!(tcheb_poly(1, 0, 8).unwrap(), -7.0);
        assert_eq!(tcheb_poly(2, 0, 4).unwrap(), 6.0);
        assert!(tcheb_poly(8, 0, 8).is_err());
        assert!(tcheb_poly(0, 8, 8).is_err());
    }

    #[test]
    fn basis_table_agrees_with_pointwise_recursion() {
        let basis = TchebichefBasis::new(8).unwrap();
        for k in 0..8 {
            for n in 0..8 {
                assert_eq!(basis.get(k, n), tcheb_poly(k, n, 8).unwrap());
            }
        }
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(0, 4).unwrap(), 4.0);
        assert_eq!(rho(1, 8).unwrap(), 168.0);
        assert_eq!(rho(0, 1).unwrap(), 1.0);
        assert!(rho(4, 4).is_err());
        assert!(rho(23, 24).unwrap().is_finite());
    }

    #[test]
    fn basis_is_orthogonal_with_rho_norms() {
        for size in [2, 4, 8, 16] {
            let b = TchebichefBasis::new(size).unwrap();
            for i in 0..size {
                for j in 0..size {
                    let dot: f64 = (0..size).map(|n| b.get(i, n) * b.get(j, n)).sum();
                    let scale = (rho(i, size).unwrap() * rho(j, size).unwrap()).sqrt();
                    let expect = if i == j { scale } else { 0.0 };
                    assert!((dot - expect).abs() <= 1e-9 * scale, "N={size} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn two_point_dtt() {
        let t = dtt_matrix(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [[h, h], [-h, h]];
        for r in 0..2 {
            for c in 0..2 {
                assert!((t.get(r, c) - expect[r][c]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn exact_matrices_are_orthonormal() {
        for size in 1..=16 {
            assert!(orthonormality_error(dtt_matrix(size).unwrap().matrix()) < 1e-10);
            assert!(orthonormality_error(dct_matrix(size).unwrap().matrix()) < 1e-12);
        }
    }

    #[test]
    fn dct_dc_row() {
        let c = dct_matrix(8).unwrap();
        for n in 0..8 {
            assert!((c.get(0, n) - 1.0 / 8f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn unsupported_sizes() {
        assert!(dtt_matrix(0).is_err());
        assert!(dtt_matrix(MAX_SIZE + 1).is_err());
        assert!(dtt_matrix(MAX_SIZE).is_ok());
    }

    #[test]
    fn constant_block_is_pure_dc() {
        let t = dtt_matrix(8).unwrap();
        let block = SquareMatrix::from_fn(8, |_, _| 128.0);
        let m = apply_2d(&t, &block).unwrap();
        assert!((m[(0, 0)] - 1024.0).abs() < 1e-9);
        for p in 0..8 {
            for q in 0..8 {
                if (p, q) != (0, 0) {
                    assert!(m[(p, q)].abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn block_size_mismatch() {
        let t = dtt_matrix(8).unwrap();
        assert!(apply_2d(&t, &SquareMatrix::zeros(4)).is_err());
        assert!(inverse_2d(&t, &SquareMatrix::zeros(4)).is_err());
    }
}
