//! Mean structural similarity over an 11×11 Gaussian window (σ = 1.5),
//! evaluated on the valid region only.

use crate::error::{mismatch, Error, Result};
use crate::exec::Execution;
use crate::image::GrayImage;

const WINDOW: usize = 11;
const SIGMA: f64 = 1.5;
const C1: f64 = (0.01 * 255.0) * (0.01 * 255.0);
const C2: f64 = (0.03 * 255.0) * (0.03 * 255.0);

fn kernel() -> [f64; WINDOW] {
    let half = (WINDOW / 2) as f64;
    let raw: [f64; WINDOW] =
        std::array::from_fn(|i| (-((i as f64 - half).powi(2)) / (2.0 * SIGMA * SIGMA)).exp());
    let total: f64 = raw.iter().sum();
    raw.map(|v| v / total)
}

pub fn ssim(reference: &GrayImage, test: &GrayImage) -> Result<f64> {
    ssim_with(reference, test, Execution::Parallel)
}

pub fn ssim_with(reference: &GrayImage, test: &GrayImage, exec: Execution) -> Result<f64> {
    let (w, h) = (reference.width(), reference.height());
    if (test.width(), test.height()) != (w, h) {
        return Err(mismatch(
            format!("{w}x{h}"),
            format!("{}x{}", test.width(), test.height()),
        ));
    }
    if w < WINDOW || h < WINDOW {
        return Err(Error::Format(format!(
            "SSIM needs at least {WINDOW}x{WINDOW} pixels"
        )));
    }
    let k = kernel();
    let out_w = w - WINDOW + 1;
    let out_h = h - WINDOW + 1;

    // Horizontal pass: per input row, filtered x, y, x², y², xy.
    let horizontal: Vec<[Vec<f64>; 5]> = exec.map_range(h, |y| {
        let mut rows: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; out_w]);
        for ox in 0..out_w {
            let mut acc = [0.0; 5];
            for (t, &wt) in k.iter().enumerate() {
                let a = reference.get(ox + t, y) as f64;
                let b = test.get(ox + t, y) as f64;
                acc[0] += wt * a;
                acc[1] += wt * b;
                acc[2] += wt * a * a;
                acc[3] += wt * b * b;
                acc[4] += wt * a * b;
            }
            for (row, v) in rows.iter_mut().zip(acc) {
                row[ox] = v;
            }
        }
        rows
    });

    let row_sums: Vec<f64> = exec.map_range(out_h, |oy| {
        let mut sum = 0.0;
        for ox in 0..out_w {
            let mut acc = [0.0; 5];
            for (t, &wt) in k.iter().enumerate() {
                let src = &horizontal[oy + t];
                for (a, s) in acc.iter_mut().zip(src.iter()) {
                    *a += wt * s[ox];
                }
            }
            let [mu_x, mu_y, xx, yy, xy] = acc;
            let var_x = xx - mu_x * mu_x;
            let var_y = yy - mu_y * mu_y;
            let cov = xy - mu_x * mu_y;
            sum += ((2.0 * mu_x * mu_y + C1) * (2.0 * cov + C2))
                / ((mu_x * mu_x + mu_y * mu_y + C1) * (var_x + var_y + C2));
        }
        sum
    });
    Ok(row_sums.iter().sum::<f64>() / (out_w * out_h) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn textured(w: usize, h: usize) -> GrayImage {
        GrayImage::from_fn(w, h, |x, y| {
            let v = 128.0
                + 60.0 * ((x as f64) * 0.3).sin()
                + 50.0 * ((y as f64) * 0.17 + x as f64 * 0.05).cos();
            v.clamp(0.0, 255.0) as u8
        })
    }

    #[test]
    fn kernel_is_normalized_and_symmetric() {
        let k = kernel();
        assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        for i in 0..WINDOW {
            assert_eq!(k[i], k[WINDOW - 1 - i]);
        }
    }

    #[test]
    fn identical_images_score_one() {
        let img = textured(64, 48);
        assert!((ssim(&img, &img).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inverted_image_scores_low() {
        let img = textured(64, 64);
        let inv = GrayImage::from_fn(64, 64, |x, y| 255 - img.get(x, y));
        assert!(ssim(&img, &inv).unwrap() < 0.3);
    }

    #[test]
    fn offset_penalized() {
        let img = textured(64, 64);
        let shifted = GrayImage::from_fn(64, 64, |x, y| img.get(x, y).saturating_add(10));
        let s = ssim(&img, &shifted).unwrap();
        assert!(s > 0.0 && s < 1.0, "{s}");
    }

    #[test]
    fn size_checks() {
        let a = textured(32, 32);
        let b = textured(32, 16);
        assert!(ssim(&a, &b).is_err());
        let tiny = textured(8, 8);
        assert!(ssim(&tiny, &tiny).is_err());
    }

    #[test]
    fn execution_mode_does_not_change_result() {
        let a = textured(96, 80);
        let b = GrayImage::from_fn(96, 80, |x, y| a.get(x, y) ^ ((x * y) as u8 & 7));
        let s = ssim_with(&a, &b, Execution::Sequential).unwrap();
        let p = ssim_with(&a, &b, Execution::Parallel).unwrap();
        assert_eq!(s.to_bits(), p.to_bits());
    }
}
