use proptest::prelude::*;

use tchebi::codec::{quantize_image, reconstruct, AbsorbedQuantizer};
use tchebi::corpus::synthetic_corpus;
use tchebi::{
    compress_image, decode_block, encode_block, quant_table, ssim, CodecTransform, Execution,
    GrayImage, TransformId,
};

fn corpus() -> Vec<GrayImage> {
    synthetic_corpus().into_iter().map(|(_, img)| img).collect()
}

#[test]
fn near_lossless_at_qf_99() {
    for id in [TransformId::ExactDtt8, TransformId::ExactDct8] {
        let t = CodecTransform::new(id).unwrap();
        for img in corpus() {
            let (_, report) = compress_image(&img, 99, &t, Execution::Parallel).unwrap();
            assert!(report.ssim >= 0.99, "{id}: {}", report.ssim);
        }
    }
}

#[test]
fn approximation_improves_with_quality() {
    let t = CodecTransform::new(TransformId::ApproxDtt8).unwrap();
    for img in corpus() {
        let (_, low) = compress_image(&img, 20, &t, Execution::Parallel).unwrap();
        let (_, high) = compress_image(&img, 99, &t, Execution::Parallel).unwrap();
        assert!(high.ssim > low.ssim && high.ssim > 0.9, "{}", high.ssim);
    }
}

#[test]
fn reconstruction_is_deterministic() {
    let img = &corpus()[1];
    let t = CodecTransform::new(TransformId::ApproxDtt8).unwrap();
    let q = quant_table(30).unwrap();
    let a = quantize_image(img, &q, &t, Execution::Sequential).unwrap();
    let b = quantize_image(img, &q, &t, Execution::Parallel).unwrap();
    assert_eq!(a.blocks, b.blocks);
    let ra = reconstruct(&a, &t, Execution::Sequential).unwrap();
    let rb = reconstruct(&b, &t, Execution::Parallel).unwrap();
    assert_eq!(ra, rb);
    assert!(ssim(img, &ra).unwrap() > 0.5);
}

#[test]
fn pgm_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zone.pgm");
    let img = &corpus()[1];
    img.save(&path).unwrap();
    assert_eq!(&GrayImage::load(&path).unwrap(), img);
}

#[test]
fn sizes_not_multiple_of_eight_rejected() {
    let img = GrayImage::from_fn(20, 16, |x, _| x as u8);
    let t = CodecTransform::new(TransformId::ExactDtt8).unwrap();
    assert!(compress_image(&img, 50, &t, Execution::Sequential).is_err());
}

fn pixel_block() -> impl Strategy<Value = [[u8; 8]; 8]> {
    prop::array::uniform8(prop::array::uniform8(any::<u8>()))
}

proptest! {
    #[test]
    fn absorbed_quantizer_matches_dense_path(block in pixel_block(), qf in 1u8..100) {
        let q = quant_table(qf).unwrap();
        let t = CodecTransform::new(TransformId::ApproxDtt8).unwrap();
        let img = GrayImage::from_blocks(1, 1, &[block]).unwrap();
        let dense = encode_block(&img.block(0, 0), &t, &q).unwrap();
        prop_assert_eq!(dense, AbsorbedQuantizer::new(&q).encode(&block));
    }

    #[test]
    fn fine_quantization_round_trips_closely(block in pixel_block()) {
        let q = quant_table(99).unwrap();
        let t = CodecTransform::new(TransformId::ExactDtt8).unwrap();
        let img = GrayImage::from_blocks(1, 1, &[block]).unwrap();
        let j = encode_block(&img.block(0, 0), &t, &q).unwrap();
        let back = decode_block(&j, &t, &q).unwrap();
        for r in 0..8 {
            for c in 0..8 {
                prop_assert!((i32::from(back[r][c]) - i32::from(block[r][c])).abs() <= 4);
            }
        }
    }
}
