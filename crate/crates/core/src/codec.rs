//! JPEG-style still-image harness: 8×8 blocks, separable transform, scalar
//! quantization with the quality-factor law, reconstruction and SSIM scoring.
//! There is no entropy coder; the count of nonzero quantized coefficients
//! stands in for rate.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::approx::{rounding, ScaledApproximation};
use crate::error::{domain, Error, Result};
use crate::exec::Execution;
use crate::fast::{fast_forward_8x8, T8_ROW_ENERGIES};
use crate::image::GrayImage;
use crate::matrix::SquareMatrix;
use crate::ssim::ssim_with;
use crate::transform::{dct_matrix, dtt_matrix, BlockTransform, CoeffBlock, TransformMatrix};

/// Default luminance quantization table (QF = 50).
pub const BASE_TABLE: [[u16; 8]; 8] = [
    [16, 11, 10, 16, 24, 40, 51, 61],
    [12, 12, 14, 19, 26, 58, 60, 55],
    [14, 13, 16, 24, 40, 57, 69, 56],
    [14, 17, 22, 29, 51, 84, 80, 62],
    [18, 22, 37, 56, 68, 109, 103, 77],
    [24, 35, 55, 64, 81, 104, 113, 92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103, 99],
];

/// Quality factors of the standard sweep: 10, 15, …, 90.
pub fn default_qf_sweep() -> Vec<u8> {
    (10..=90).step_by(5).collect()
}

pub type QuantizedBlock = [[i32; 8]; 8];
pub type PixelBlock = [[u8; 8]; 8];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuantTable {
    pub qf: u8,
    pub s_factor: u32,
    pub table: [[u16; 8]; 8],
}

/// `Q = ⌊(S·Q₀ + 50)/100⌋` with `S = 5000/QF` below 50 and `200 − 2·QF`
/// otherwise; entries are clamped to at least 1.
pub fn quant_table(qf: u8) -> Result<QuantTable> {
    if !(1..=99).contains(&qf) {
        return Err(domain(format!("quality factor {qf} outside 1..=99")));
    }
    let q = u32::from(qf);
    let s = if q < 50 { 5000 / q } else { 200 - 2 * q };
    let table = BASE_TABLE.map(|row| row.map(|b| ((s * u32::from(b) + 50) / 100).max(1) as u16));
    Ok(QuantTable {
        qf,
        s_factor: s,
        table,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TransformId {
    #[serde(rename = "exact-dtt8")]
    ExactDtt8,
    #[serde(rename = "approx-dtt8")]
    ApproxDtt8,
    #[serde(rename = "exact-dct8")]
    ExactDct8,
}

impl TransformId {
    pub const ALL: [TransformId; 3] = [
        TransformId::ExactDtt8,
        TransformId::ApproxDtt8,
        TransformId::ExactDct8,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TransformId::ExactDtt8 => "exact-dtt8",
            TransformId::ApproxDtt8 => "approx-dtt8",
            TransformId::ExactDct8 => "exact-dct8",
        }
    }
}

impl fmt::Display for TransformId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TransformId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TransformId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| domain(format!("unknown transform {s:?}")))
    }
}

#[derive(Debug, Clone)]
enum Kernel {
    Dense(TransformMatrix),
    Scaled(ScaledApproximation),
}

/// An 8-point block transform usable by the codec.
#[derive(Debug, Clone)]
pub struct CodecTransform {
    id: TransformId,
    kernel: Kernel,
}

impl CodecTransform {
    pub fn new(id: TransformId) -> Result<Self> {
        let kernel = match id {
            TransformId::ExactDtt8 => Kernel::Dense(dtt_matrix(8)?),
            TransformId::ExactDct8 => Kernel::Dense(dct_matrix(8)?),
            TransformId::ApproxDtt8 => Kernel::Scaled(ScaledApproximation::optimal(8)?),
        };
        Ok(Self { id, kernel })
    }

    pub fn id(&self) -> TransformId {
        self.id
    }
}

impl BlockTransform for CodecTransform {
    fn size(&self) -> usize {
        8
    }

    fn forward_2d(&self, block: &SquareMatrix) -> Result<CoeffBlock> {
        match &self.kernel {
            Kernel::Dense(t) => t.forward_2d(block),
            Kernel::Scaled(t) => t.forward_2d(block),
        }
    }

    fn inverse_2d(&self, coeffs: &CoeffBlock) -> Result<SquareMatrix> {
        match &self.kernel {
            Kernel::Dense(t) => t.inverse_2d(coeffs),
            Kernel::Scaled(t) => t.inverse_2d(coeffs),
        }
    }
}

/// `J = round(M ⊘ Q)` with `M = T · block · Tᵀ`.
pub fn encode_block<T: BlockTransform + ?Sized>(
    block: &SquareMatrix,
    t: &T,
    q: &QuantTable,
) -> Result<QuantizedBlock> {
    let m = t.forward_2d(block)?;
    Ok(std::array::from_fn(|r| {
        std::array::from_fn(|c| rounding(m[(r, c)] / f64::from(q.table[r][c])) as i32)
    }))
}

/// Dequantize `J ⊙ Q`, inverse transform, round and clamp to 8 bits.
pub fn decode_block<T: BlockTransform + ?Sized>(
    j: &QuantizedBlock,
    t: &T,
    q: &QuantTable,
) -> Result<PixelBlock> {
    let m = SquareMatrix::from_fn(8, |r, c| f64::from(j[r][c]) * f64::from(q.table[r][c]));
    let f = t.inverse_2d(&m)?;
    Ok(std::array::from_fn(|r| {
        std::array::from_fn(|c| f[(r, c)].round().clamp(0.0, 255.0) as u8)
    }))
}

/// Quantizer for the integer `T₈*` core with the approximation's diagonal
/// scaling folded into the step sizes: step `(i, j)` is `Q_ij · sqrt(e_i·e_j)`.
#[derive(Debug, Clone)]
pub struct AbsorbedQuantizer {
    steps: [[f64; 8]; 8],
}

impl AbsorbedQuantizer {
    pub fn new(q: &QuantTable) -> Self {
        let e = T8_ROW_ENERGIES;
        Self {
            steps: std::array::from_fn(|i| {
                std::array::from_fn(|j| f64::from(q.table[i][j]) * ((e[i] * e[j]) as f64).sqrt())
            }),
        }
    }

    pub fn steps(&self) -> &[[f64; 8]; 8] {
        &self.steps
    }

    /// Multiplierless path: fast integer transform, then scaled quantizer.
    pub fn encode(&self, block: &PixelBlock) -> QuantizedBlock {
        let coeffs = fast_forward_8x8(&block.map(|r| r.map(i64::from)));
        std::array::from_fn(|i| {
            std::array::from_fn(|j| rounding(coeffs[i][j] as f64 / self.steps[i][j]) as i32)
        })
    }
}

#[derive(Debug, Clone)]
pub struct QuantizedImage {
    pub blocks_x: usize,
    pub blocks_y: usize,
    pub blocks: Vec<QuantizedBlock>,
    pub quant: QuantTable,
    pub transform: TransformId,
}

impl QuantizedImage {
    pub fn nonzero_coeffs(&self) -> usize {
        self.blocks
            .iter()
            .flat_map(|b| b.iter().flatten())
            .filter(|&&v| v != 0)
            .count()
    }
}

fn block_grid(img: &GrayImage) -> Result<(usize, usize)> {
    if !img.width().is_multiple_of(8) || !img.height().is_multiple_of(8) {
        return Err(domain(format!(
            "image dimensions {}x{} are not multiples of 8",
            img.width(),
            img.height()
        )));
    }
    Ok((img.width() / 8, img.height() / 8))
}

pub fn quantize_image(
    img: &GrayImage,
    q: &QuantTable,
    t: &CodecTransform,
    exec: Execution,
) -> Result<QuantizedImage> {
    let (bx, by) = block_grid(img)?;
    let blocks = exec
        .map_range(bx * by, |i| encode_block(&img.block(i % bx, i / bx), t, q))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(QuantizedImage {
        blocks_x: bx,
        blocks_y: by,
        blocks,
        quant: q.clone(),
        transform: t.id(),
    })
}

pub fn reconstruct(
    qimg: &QuantizedImage,
    t: &CodecTransform,
    exec: Execution,
) -> Result<GrayImage> {
    let pixels = exec
        .map_slice(&qimg.blocks, |j| decode_block(j, t, &qimg.quant))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    GrayImage::from_blocks(qimg.blocks_x, qimg.blocks_y, &pixels)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompressionReport {
    pub transform: TransformId,
    pub qf: u8,
    pub width: usize,
    pub height: usize,
    pub blocks: usize,
    pub ssim: f64,
    pub nonzero_coeffs: usize,
}

pub fn compress_image(
    img: &GrayImage,
    qf: u8,
    t: &CodecTransform,
    exec: Execution,
) -> Result<(GrayImage, CompressionReport)> {
    let q = quant_table(qf)?;
    let qimg = quantize_image(img, &q, t, exec)?;
    let out = reconstruct(&qimg, t, exec)?;
    let report = CompressionReport {
        transform: t.id(),
        qf,
        width: img.width(),
        height: img.height(),
        blocks: qimg.blocks.len(),
        ssim: ssim_with(img, &out, exec)?,
        nonzero_coeffs: qimg.nonzero_coeffs(),
    };
    Ok((out, report))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    pub transform: TransformId,
    pub qf: u8,
    pub mean_ssim: f64,
    pub mean_nonzero_coeffs: f64,
}

/// Mean SSIM and mean nonzero count over the corpus for every
/// `(transform, qf)` pair, transforms outermost.
pub fn quality_curve(
    corpus: &[GrayImage],
    qfs: &[u8],
    transforms: &[TransformId],
    exec: Execution,
) -> Result<Vec<CurveRow>> {
    if corpus.is_empty() {
        return Err(Error::Empty("image corpus"));
    }
    if qfs.is_empty() || transforms.is_empty() {
        return Err(Error::Empty("quality factor or transform list"));
    }
    let kernels = transforms
        .iter()
        .map(|&id| CodecTransform::new(id))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize, usize)> = (0..kernels.len())
        .flat_map(|t| (0..qfs.len()).flat_map(move |q| (0..corpus.len()).map(move |i| (t, q, i))))
        .collect();
    let reports = exec
        .map_slice(&jobs, |&(t, q, i)| {
            compress_image(&corpus[i], qfs[q], &kernels[t], Execution::Sequential).map(|r| r.1)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let n = corpus.len() as f64;
    Ok(reports
        .chunks(corpus.len())
        .map(|group| CurveRow {
            transform: group[0].transform,
            qf: group[0].qf,
            mean_ssim: group.iter().map(|r| r.ssim).sum::<f64>() / n,
            mean_nonzero_coeffs: group.iter().map(|r| r.nonzero_coeffs as f64).sum::<f64>() / n,
        })
        .collect())
}

pub const CURVE_HEADER: &str = "transform,qf,mean_ssim,mean_nonzero_coeffs";

pub fn curve_csv(rows: &[CurveRow], precision: Option<usize>) -> String {
    let fmt = |v: f64| match precision {
        Some(p) => format!("{v:.p$}"),
        None => format!("{v}"),
    };
    let mut out = String::from(CURVE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.transform,
            r.qf,
            fmt(r.mean_ssim),
            fmt(r.mean_nonzero_coeffs)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gray(v: f64) -> SquareMatrix {
        SquareMatrix::from_fn(8, |_, _| v)
    }

    #[test]
    fn table_examples() {
        assert_eq!(quant_table(50).unwrap().table, BASE_TABLE);
        assert_eq!(quant_table(10).unwrap().table[0][0], 80);
        assert_eq!(quant_table(90).unwrap().table[0][0], 3);
        assert_eq!(quant_table(99).unwrap().table[0][0], 1);
        assert!(quant_table(0).is_err());
        assert!(quant_table(100).is_err());
    }

    #[test]
    fn tables_monotone_and_positive() {
        let tables: Vec<_> = (1..=99).map(|q| quant_table(q).unwrap()).collect();
        for pair in tables.windows(2) {
            for r in 0..8 {
                for c in 0..8 {
                    assert!(pair[1].table[r][c] <= pair[0].table[r][c]);
                    assert!(pair[1].table[r][c] >= 1);
                }
            }
        }
    }

    #[test]
    fn constant_block_encodes_to_dc() {
        let t = CodecTransform::new(TransformId::ExactDtt8).unwrap();
        let q = quant_table(50).unwrap();
        let j = encode_block(&gray(128.0), &t, &q).unwrap();
        assert_eq!(j[0][0], 64);
        assert_eq!(j.iter().flatten().filter(|&&v| v != 0).count(), 1);
        let back = decode_block(&j, &t, &q).unwrap();
        assert!(back.iter().flatten().all(|&v| v.abs_diff(128) <= 1));
    }

    #[test]
    fn zero_block_and_zero_coefficients() {
        for id in TransformId::ALL {
            let t = CodecTransform::new(id).unwrap();
            let q = quant_table(30).unwrap();
            let j = encode_block(&gray(0.0), &t, &q).unwrap();
            assert_eq!(j, [[0; 8]; 8]);
            assert_eq!(decode_block(&[[0; 8]; 8], &t, &q).unwrap(), [[0; 8]; 8]);
        }
    }

    #[test]
    fn unit_steps_reconstruct_within_one_level() {
        let t = CodecTransform::new(TransformId::ExactDtt8).unwrap();
        let q = QuantTable {
            qf: 0,
            s_factor: 0,
            table: [[1; 8]; 8],
        };
        let block = SquareMatrix::from_fn(8, |r, c| ((r * 37 + c * 91) % 256) as f64);
        let back = decode_block(&encode_block(&block, &t, &q).unwrap(), &t, &q).unwrap();
        for r in 0..8 {
            for c in 0..8 {
                assert!((back[r][c] as f64 - block[(r, c)]).abs() <= 1.0);
            }
        }
    }

    #[test]
    fn transform_ids_parse() {
        for id in TransformId::ALL {
            assert_eq!(id.as_str().parse::<TransformId>().unwrap(), id);
        }
        assert!("jpeg".parse::<TransformId>().is_err());
    }

    #[test]
    fn odd_dimensions_rejected() {
        let img = GrayImage::from_fn(12, 16, |_, _| 0);
        let t = CodecTransform::new(TransformId::ExactDtt8).unwrap();
        assert!(compress_image(&img, 50, &t, Execution::Sequential).is_err());
    }

    #[test]
    fn empty_corpus_rejected() {
        assert!(matches!(
            quality_curve(&[], &[50], &[TransformId::ExactDtt8], Execution::Sequential),
            Err(Error::Empty(_))
        ));
    }

    #[test]
    fn absorbed_steps_for_dc() {
        let a = AbsorbedQuantizer::new(&quant_table(50).unwrap());
        assert_eq!(a.steps()[0][0], 16.0 * 8.0);
        assert_eq!(a.steps()[1][2], 14.0 * 12.0);
    }

    #[test]
    fn curve_csv_layout() {
        let rows = vec![CurveRow {
            transform: TransformId::ApproxDtt8,
            qf: 15,
            mean_ssim: 0.5,
            mean_nonzero_coeffs: 12.25,
        }];
        assert_eq!(
            curve_csv(&rows, None),
            "transform,qf,mean_ssim,mean_nonzero_coeffs\napprox-dtt8,15,0.5,12.25\n"
        );
        assert!(curve_csv(&rows, Some(2)).ends_with("approx-dtt8,15,0.50,12.25\n"));
    }
}
