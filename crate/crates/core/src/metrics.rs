//! Coding and proximity figures of merit for block transforms.
//!
//! Coding measures use a first-order Markov source with unit variance and
//! correlation `rho` (0.95 unless stated otherwise). For a possibly
//! non-orthogonal analysis matrix `H` with inverse `G`:
//!
//! * coding gain: `10·log10 Π_k (A_k·B_k)^(-1/N)` with `A_k = (H·R·Hᵀ)_kk`
//!   and `B_k` the squared norm of row `k` of `G`;
//! * transform efficiency: diagonal share of the absolute mass of `H·R·G`.
//!
//! Both collapse to the classic orthogonal definitions when `G = Hᵀ`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::approx::ScaledApproximation;
use crate::error::{domain, mismatch, Error, Result};
use crate::matrix::SquareMatrix;
use crate::transform::{dtt_matrix, TransformMatrix};

/// Correlation used throughout unless overridden.
pub const DEFAULT_CORRELATION: f64 = 0.95;

/// Quasi-orthogonality threshold on the deviation from diagonality, `1 - 2/√5`.
pub fn quasi_orthogonality_threshold() -> f64 {
    1.0 - 2.0 / 5f64.sqrt()
}

/// Stationary first-order Markov source: covariance `rho^|i-j|`.
#[derive(Debug, Clone)]
pub struct MarkovModel {
    rho: f64,
    covariance: DMatrix<f64>,
}

impl MarkovModel {
    pub fn new(size: usize, rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(domain(format!("correlation {rho} outside (0, 1)")));
        }
        if size == 0 {
            return Err(domain("covariance size must be positive"));
        }
        let covariance = DMatrix::from_fn(size, size, |i, j| rho.powi((i as i32 - j as i32).abs()));
        Ok(Self { rho, covariance })
    }

    pub fn size(&self) -> usize {
        self.covariance.nrows()
    }

    pub fn correlation(&self) -> f64 {
        self.rho
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    fn check(&self, h: &TransformMatrix) -> Result<()> {
        if h.size() != self.size() {
            return Err(mismatch(
                format!("{}-point model", h.size()),
                format!("{}-point model", self.size()),
            ));
        }
        Ok(())
    }
}

/// Covariance matrix of [`MarkovModel`].
pub fn markov_covariance(size: usize, rho: f64) -> Result<SquareMatrix> {
    SquareMatrix::from_nalgebra(MarkovModel::new(size, rho)?.covariance())
}

fn inverse(h: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    h.clone().try_inverse().ok_or(Error::Singular)
}

/// Unified coding gain in dB.
pub fn coding_gain(h: &TransformMatrix, model: &MarkovModel) -> Result<f64> {
    model.check(h)?;
    let hm = h.matrix().to_nalgebra();
    let g = inverse(&hm)?;
    let coeff_cov = &hm * model.covariance() * hm.transpose();
    let n = h.size() as f64;
    let log_sum: f64 = (0..h.size())
        .map(|k| {
            let a = coeff_cov[(k, k)];
            let b = g.row(k).norm_squared();
            (a * b).log10()
        })
        .sum();
    Ok(-10.0 * log_sum / n)
}

/// Transform efficiency in percent.
pub fn transform_efficiency(h: &TransformMatrix, model: &MarkovModel) -> Result<f64> {
    model.check(h)?;
    let hm = h.matrix().to_nalgebra();
    let g = inverse(&hm)?;
    let ry = &hm * model.covariance() * g;
    let diag: f64 = ry.diagonal().iter().map(|v| v.abs()).sum();
    let total: f64 = ry.iter().map(|v| v.abs()).sum();
    Ok(100.0 * diag / total)
}

fn check_same(exact: &TransformMatrix, approx: &TransformMatrix) -> Result<()> {
    if exact.size() != approx.size() {
        return Err(mismatch(exact.size(), approx.size()));
    }
    Ok(())
}

/// `(1/N)·trace((T − T̂)·R·(T − T̂)ᵀ)`.
pub fn mse_similarity(
    exact: &TransformMatrix,
    approx: &TransformMatrix,
    model: &MarkovModel,
) -> Result<f64> {
    check_same(exact, approx)?;
    model.check(exact)?;
    let diff = exact.matrix().sub(approx.matrix())?.to_nalgebra();
    let e = &diff * model.covariance() * diff.transpose();
    Ok(e.trace() / exact.size() as f64)
}

/// Total energy error `π·‖T − T̂‖²_F`.
pub fn total_energy_error(exact: &TransformMatrix, approx: &TransformMatrix) -> Result<f64> {
    check_same(exact, approx)?;
    let f = exact.matrix().sub(approx.matrix())?.frobenius();
    Ok(std::f64::consts::PI * f * f)
}

/// Transform distortion in percent, `(1 − (1/N)·Σ_k [(T·T̂ᵀ)_kk]²)·100`.
pub fn transform_distortion(exact: &TransformMatrix, approx: &TransformMatrix) -> Result<f64> {
    check_same(exact, approx)?;
    let cross = exact.matrix().mul(&approx.matrix().transpose())?;
    let energy: f64 = cross.diagonal().iter().map(|d| d * d).sum();
    Ok((1.0 - energy / exact.size() as f64) * 100.0)
}

/// `1 − ‖ediag(A)‖_F / ‖A‖_F`.
pub fn deviation_from_diagonality(a: &SquareMatrix) -> Result<f64> {
    let total = a.frobenius();
    if total == 0.0 {
        return Err(domain("deviation from diagonality of the zero matrix"));
    }
    let diag = a.diagonal().iter().map(|d| d * d).sum::<f64>().sqrt();
    Ok(1.0 - diag / total)
}

/// Table-style figures of merit for one transform against the exact DTT.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsReport {
    pub coding_gain_db: f64,
    pub transform_efficiency: f64,
    pub mse: f64,
    pub total_energy_error: f64,
    pub transform_distortion_pct: f64,
    pub deviation_from_diagonality: f64,
}

impl MetricsReport {
    /// Evaluates `h` against `reference`. The deviation from diagonality is
    /// taken on `H·Hᵀ`, which for a scaled approximation does not depend on
    /// how common factors are split between core and scaling.
    pub fn evaluate(
        h: &TransformMatrix,
        reference: &TransformMatrix,
        model: &MarkovModel,
    ) -> Result<Self> {
        let gram = h.matrix().mul(&h.matrix().transpose())?;
        Ok(Self {
            coding_gain_db: coding_gain(h, model)?,
            transform_efficiency: transform_efficiency(h, model)?,
            mse: mse_similarity(reference, h, model)?,
            total_energy_error: total_energy_error(reference, h)?,
            transform_distortion_pct: transform_distortion(reference, h)?,
            deviation_from_diagonality: deviation_from_diagonality(&gram)?,
        })
    }

    /// Report for a scaled approximation against the exact DTT of its size.
    pub fn for_approximation(approx: &ScaledApproximation, rho: f64) -> Result<Self> {
        let model = MarkovModel::new(approx.size(), rho)?;
        Self::evaluate(&approx.dense(), &dtt_matrix(approx.size())?, &model)
    }

    /// Report for any analysis matrix against the exact DTT of its size.
    pub fn for_transform(h: &TransformMatrix, rho: f64) -> Result<Self> {
        let model = MarkovModel::new(h.size(), rho)?;
        Self::evaluate(h, &dtt_matrix(h.size())?, &model)
    }
}

/// Karhunen–Loève basis of the model: eigenvectors as rows.
pub fn klt_matrix(model: &MarkovModel) -> TransformMatrix {
    let eig = SymmetricEigen::new(model.covariance().clone());
    let rows = eig.eigenvectors.transpose();
    TransformMatrix::new(
        crate::transform::TransformKind::Approximation,
        SquareMatrix::from_nalgebra(&rows).expect("square"),
    )
}
