//! Parametric multiplierless DTT approximations.
//!
//! A member of the family is obtained by normalizing every DTT row so that its
//! largest magnitude is one, scaling by `alpha`, and rounding half away from
//! zero. For `0 < alpha < 5/2` every entry lands in `{0, ±1, ±2}`. Rows whose
//! entries share a common factor (for example the all-twos DC row) are reduced
//! to their primitive integer form; the factor moves into the scaling
//! diagonal, so the scaled approximation is unchanged.

use serde::Serialize;

use crate::error::{domain, mismatch, Error, Result};
use crate::matrix::{IntMatrix, SquareMatrix};
use crate::transform::{
    check_block, dtt_matrix, BlockTransform, CoeffBlock, TchebichefBasis, TransformKind,
    TransformMatrix,
};

/// Sizes for which the parametric family is defined.
pub const FAMILY_SIZES: [usize; 2] = [4, 8];

/// Open upper bound on the scaling parameter.
pub const ALPHA_MAX: f64 = 2.5;

/// Round half away from zero: `sign(x)·⌊|x| + 1/2⌋`.
pub fn rounding(x: f64) -> i64 {
    (x.signum() * (x.abs() + 0.5).floor()) as i64
}

fn check_family_size(size: usize) -> Result<()> {
    if !FAMILY_SIZES.contains(&size) {
        return Err(domain(format!(
            "parametric family defined for N in {FAMILY_SIZES:?}, got {size}"
        )));
    }
    Ok(())
}

/// Diagonal of the row normalizer `D_N`: `1 / max_n |T_N[k, n]|`.
pub fn row_normalizer(size: usize) -> Result<Vec<f64>> {
    check_family_size(size)?;
    let t = dtt_matrix(size)?;
    Ok((0..size)
        .map(|k| {
            let peak = t.matrix().row(k).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            1.0 / peak
        })
        .collect())
}

/// Integer N×N matrix with entries in `{0, ±1, ±2}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LowComplexityMatrix(IntMatrix);

impl LowComplexityMatrix {
    pub fn new(m: IntMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(mismatch(
                format!("{0}x{0}", m.nrows()),
                format!("{}x{}", m.nrows(), m.ncols()),
            ));
        }
        if let Some(bad) = (0..m.nrows())
            .flat_map(|r| m.row(r).to_vec())
            .find(|v| v.abs() > 2)
        {
            return Err(domain(format!("entry {bad} outside {{0, ±1, ±2}}")));
        }
        Ok(Self(m))
    }

    pub fn from_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::new(IntMatrix::from_rows(rows)?)
    }

    pub fn identity(size: usize) -> Self {
        Self(IntMatrix::from_fn(size, size, |r, c| i64::from(r == c)))
    }

    pub fn size(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.0[(r, c)]
    }

    pub fn as_int(&self) -> &IntMatrix {
        &self.0
    }

    pub fn row(&self, r: usize) -> &[i64] {
        self.0.row(r)
    }

    /// True when some row is all zeros; such a matrix has no scaled form.
    pub fn is_degenerate(&self) -> bool {
        (0..self.size()).any(|r| self.row(r).iter().all(|&v| v == 0))
    }

    /// `T · Tᵀ`, exact.
    pub fn gram(&self) -> IntMatrix {
        self.0.mul(&self.0.transpose()).expect("square")
    }

    /// Squared Euclidean norm of each row.
    pub fn row_energies(&self) -> Vec<i64> {
        (0..self.size())
            .map(|r| self.row(r).iter().map(|v| v * v).sum())
            .collect()
    }

    pub fn to_real(&self) -> SquareMatrix {
        self.0.to_real().expect("square")
    }

    /// Divides each nonzero row by the gcd of its entries.
    pub fn reduce_rows(&self) -> Self {
        let n = self.size();
        let divisors: Vec<i64> = (0..n)
            .map(|r| self.row(r).iter().fold(0, |g, &v| gcd(g, v.abs())).max(1))
            .collect();
        Self(IntMatrix::from_fn(n, n, |r, c| {
            self.get(r, c) / divisors[r]
        }))
    }
}

impl Serialize for LowComplexityMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The rounding family for one transform size with `D_N · T_N` precomputed.
#[derive(Debug, Clone)]
pub struct ParametricFamily {
    size: usize,
    normalized: SquareMatrix,
}

impl ParametricFamily {
    pub fn new(size: usize) -> Result<Self> {
        check_family_size(size)?;
        // Each row of D_N·T_N is t_k[n] / max_n |t_k[n]|; dividing the integer
        // polynomial values directly rounds once instead of three times.
        let basis = TchebichefBasis::new(size)?;
        let normalized = SquareMatrix::from_fn(size, |k, n| {
            let peak = basis
                .values()
                .row(k)
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()));
            basis.get(k, n) / peak
        });
        Ok(Self { size, normalized })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `D_N · T_N`.
    pub fn normalized(&self) -> &SquareMatrix {
        &self.normalized
    }

    fn check_alpha(alpha: f64) -> Result<()> {
        if !(alpha > 0.0 && alpha < ALPHA_MAX) {
            return Err(domain(format!("alpha {alpha} outside (0, 5/2)")));
        }
        Ok(())
    }

    /// `round(alpha · D_N · T_N)` before row reduction.
    pub fn rounded(&self, alpha: f64) -> Result<LowComplexityMatrix> {
        Self::check_alpha(alpha)?;
        let n = self.size;
        LowComplexityMatrix::new(IntMatrix::from_fn(n, n, |r, c| {
            rounding(alpha * self.normalized[(r, c)])
        }))
    }

    /// Family member at `alpha` in primitive-row form.
    pub fn at(&self, alpha: f64) -> Result<LowComplexityMatrix> {
        Ok(self.rounded(alpha)?.reduce_rows())
    }
}

/// `T_N(alpha)`; may be degenerate (all-zero rows) for small `alpha`.
pub fn parametric_matrix(size: usize, alpha: f64) -> Result<LowComplexityMatrix> {
    ParametricFamily::new(size)?.at(alpha)
}

/// Diagonal of `S = sqrt(ediag(T·Tᵀ))⁻¹`.
pub fn scaling_diagonal(core: &LowComplexityMatrix) -> Result<Vec<f64>> {
    core.row_energies()
        .into_iter()
        .enumerate()
        .map(|(k, e)| {
            if e == 0 {
                Err(Error::Degenerate(format!("row {k} is all zeros")))
            } else {
                Ok(1.0 / (e as f64).sqrt())
            }
        })
        .collect()
}

/// True iff `T·Tᵀ` is exactly diagonal.
pub fn orthogonality_check(core: &LowComplexityMatrix) -> bool {
    let g = core.gram();
    (0..g.nrows()).all(|r| (0..g.ncols()).all(|c| r == c || g[(r, c)] == 0))
}

/// How an approximation maps coefficients back to samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InversePolicy {
    /// `T̂ᵀ`: the transposed integer core with the forward scaling.
    #[default]
    Transpose,
    /// `T*ᵀ · diag(8, 3, 3, 5, 3, 7/2, 3, 5/2)⁻¹`, 8-point only. Its
    /// residual `max |G·T̂₈* − I|` is about 0.29, twice that of the
    /// transpose; kept for experimentation.
    DiagonalCorrection,
}

/// Diagonal of the 8-point near-inverse correction.
pub const CORRECTION_DIAGONAL: [f64; 8] = [8.0, 3.0, 3.0, 5.0, 3.0, 3.5, 3.0, 2.5];

/// `T̂ = S · T`: an integer core plus its row-normalizing diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledApproximation {
    core: LowComplexityMatrix,
    energies: Vec<i64>,
    scaling: Vec<f64>,
    inverse: InversePolicy,
}

impl ScaledApproximation {
    pub fn new(core: LowComplexityMatrix) -> Result<Self> {
        let scaling = scaling_diagonal(&core)?;
        Ok(Self {
            energies: core.row_energies(),
            core,
            scaling,
            inverse: InversePolicy::Transpose,
        })
    }

    /// `T̂_N(alpha)`.
    pub fn at(size: usize, alpha: f64) -> Result<Self> {
        Self::new(parametric_matrix(size, alpha)?)
    }

    /// The selected approximations, `alpha = 2`.
    pub fn optimal(size: usize) -> Result<Self> {
        Self::at(size, 2.0)
    }

    pub fn with_inverse_policy(mut self, policy: InversePolicy) -> Result<Self> {
        if policy == InversePolicy::DiagonalCorrection && self.size() != 8 {
            return Err(domain("diagonal correction exists only for N = 8"));
        }
        self.inverse = policy;
        Ok(self)
    }

    pub fn inverse_policy(&self) -> InversePolicy {
        self.inverse
    }

    pub fn size(&self) -> usize {
        self.core.size()
    }

    pub fn core(&self) -> &LowComplexityMatrix {
        &self.core
    }

    pub fn scaling(&self) -> &[f64] {
        &self.scaling
    }

    /// `ediag(T·Tᵀ)`, the integer squared row norms of the core.
    pub fn row_energies(&self) -> &[i64] {
        &self.energies
    }

    /// `sqrt(e_i · e_j)`: the divisor that turns core-domain coefficient
    /// `(i, j)` into scaled-domain coefficient `(i, j)`. Exact whenever the
    /// product is a perfect square.
    pub fn outer_scale_divisor(&self, i: usize, j: usize) -> f64 {
        ((self.energies[i] * self.energies[j]) as f64).sqrt()
    }

    /// Dense real form `S · T`.
    pub fn dense(&self) -> TransformMatrix {
        let n = self.size();
        TransformMatrix::new(
            TransformKind::Approximation,
            SquareMatrix::from_fn(n, |r, c| self.scaling[r] * self.core.get(r, c) as f64),
        )
    }

    /// Matrix `G` used for reconstruction, `x ≈ G · X`.
    pub fn inverse_matrix(&self) -> SquareMatrix {
        match self.inverse {
            InversePolicy::Transpose => self.dense().matrix().transpose(),
            InversePolicy::DiagonalCorrection => {
                let n = self.size();
                SquareMatrix::from_fn(n, |r, c| {
                    self.core.get(c, r) as f64 / CORRECTION_DIAGONAL[c]
                })
            }
        }
    }
}

impl BlockTransform for ScaledApproximation {
    fn size(&self) -> usize {
        self.core.size()
    }

    /// Integer core on both sides, then the outer product of the scaling.
    fn forward_2d(&self, block: &SquareMatrix) -> Result<CoeffBlock> {
        let n = self.size();
        check_block(n, block)?;
        let core = self.core.to_real();
        let mut m = core.mul(block)?.mul(&core.transpose())?;
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] /= self.outer_scale_divisor(i, j);
            }
        }
        Ok(m)
    }

    fn inverse_2d(&self, coeffs: &CoeffBlock) -> Result<SquareMatrix> {
        let n = self.size();
        check_block(n, coeffs)?;
        match self.inverse {
            InversePolicy::Transpose => {
                let core = self.core.to_real();
                let mut scaled = coeffs.clone();
                for i in 0..n {
                    for j in 0..n {
                        scaled[(i, j)] /= self.outer_scale_divisor(i, j);
                    }
                }
                core.transpose().mul(&scaled)?.mul(&core)
            }
            InversePolicy::DiagonalCorrection => {
                let g = self.inverse_matrix();
                g.mul(coeffs)?.mul(&g.transpose())
            }
        }
    }
}
