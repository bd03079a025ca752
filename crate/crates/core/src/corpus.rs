//! Deterministic synthetic test images.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::image::GrayImage;

pub const CORPUS_SIZE: usize = 512;
const NOISE_SEED: u64 = 0x7c4e_b1c5;

/// Diagonal ramp from black (top left) to white (bottom right).
pub fn gradient(size: usize) -> GrayImage {
    let span = (2 * (size - 1)).max(1) as f64;
    GrayImage::from_fn(size, size, |x, y| {
        ((x + y) as f64 * 255.0 / span).round() as u8
    })
}

/// Circular zone plate whose local frequency reaches Nyquist at the edges.
pub fn zone_plate(size: usize) -> GrayImage {
    let c = (size as f64 - 1.0) / 2.0;
    GrayImage::from_fn(size, size, |x, y| {
        let r2 = (x as f64 - c).powi(2) + (y as f64 - c).powi(2);
        (127.5 + 127.5 * (PI * r2 / size as f64).cos())
            .round()
            .clamp(0.0, 255.0) as u8
    })
}

/// Uniform white noise from a fixed seed.
pub fn noise(size: usize) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(NOISE_SEED);
    let pixels = (0..size * size).map(|_| rng.gen::<u8>()).collect();
    GrayImage::new(size, size, pixels).expect("size matches")
}

/// The bundled corpus: gradient, zone plate and noise at 512×512.
pub fn synthetic_corpus() -> Vec<(&'static str, GrayImage)> {
    vec![
        ("gradient", gradient(CORPUS_SIZE)),
        ("zone-plate", zone_plate(CORPUS_SIZE)),
        ("noise", noise(CORPUS_SIZE)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_deterministic() {
        assert_eq!(noise(64), noise(64));
        let c = synthetic_corpus();
        assert_eq!(c.len(), 3);
        assert!(c
            .iter()
            .all(|(_, img)| img.width() == 512 && img.height() == 512));
    }

    #[test]
    fn gradient_spans_full_range() {
        let g = gradient(64);
        assert_eq!(g.get(0, 0), 0);
        assert_eq!(g.get(63, 63), 255);
    }
}
