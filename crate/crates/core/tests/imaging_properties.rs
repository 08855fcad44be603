use phlab_core::imaging::{combine, decode_image, encode_ppm, interpolate, ssim};
use phlab_core::Image;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn image_pair(max_side: usize) -> impl Strategy<Value = (Image, Image)> {
    (1..=max_side, 1..=max_side, prop_oneof![Just(1usize), Just(3usize)]).prop_flat_map(|(w, h, c)| {
        let n = w * h * c;
        (
            prop::collection::vec(0.0..=1.0f64, n),
            prop::collection::vec(0.0..=1.0f64, n),
        )
            .prop_map(move |(a, b)| (Image::new(w, h, c, a).unwrap(), Image::new(w, h, c, b).unwrap()))
    })
}

proptest! {
    #[test]
    fn interpolation_is_pixelwise_affine((x1, x2) in image_pair(6), alpha in 0.0..=1.0f64) {
        let mixed = interpolate(&x1, &x2, alpha).unwrap();
        for ((m, a), b) in mixed.data().iter().zip(x1.data()).zip(x2.data()) {
            prop_assert!((m - (alpha * a + (1.0 - alpha) * b)).abs() <= 1e-12);
        }
    }

    #[test]
    fn two_term_combination_matches_interpolation((x1, x2) in image_pair(6), alpha in 0.0..=1.0f64) {
        let a = interpolate(&x1, &x2, alpha).unwrap();
        let b = combine(&[x1, x2], &[alpha, 1.0 - alpha]).unwrap();
        for (u, v) in a.data().iter().zip(b.data()) {
            prop_assert!((u - v).abs() <= 1e-12);
        }
    }

    #[test]
    fn ssim_is_symmetric((x, y) in image_pair(8)) {
        let (a, b) = (ssim(&x, &y).unwrap(), ssim(&y, &x).unwrap());
        prop_assert!((a - b).abs() <= 1e-12);
    }
}

#[test]
fn ssim_stays_in_range_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10_000 {
        let (w, h) = (rng.random_range(1..=8), rng.random_range(1..=8));
        let c = if rng.random_bool(0.5) { 1 } else { 3 };
        // Mix of noise, constants, and saturated extremes.
        let draw = |rng: &mut ChaCha8Rng| -> Image {
            let mode = rng.random_range(0..3);
            let data = (0..w * h * c)
                .map(|_| match mode {
                    0 => rng.random::<f64>(),
                    1 => 0.5,
                    _ => f64::from(u8::from(rng.random_bool(0.5))),
                })
                .collect();
            Image::new(w, h, c, data).unwrap()
        };
        let (x, y) = (draw(&mut rng), draw(&mut rng));
        let s = ssim(&x, &y).unwrap();
        assert!((-1.0..=1.0).contains(&s), "ssim {s} out of range");
        assert!((ssim(&x, &x).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn canonical_pnm_round_trips_byte_for_byte() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..200 {
        let (w, h) = (rng.random_range(1..=20), rng.random_range(1..=20));
        let (magic, c) = if i % 2 == 0 { ("P6", 3) } else { ("P5", 1) };
        let mut bytes = format!("{magic}\n{w} {h}\n255\n").into_bytes();
        bytes.extend((0..w * h * c).map(|_| rng.random::<u8>()));
        let img = decode_image(&bytes).unwrap();
        assert_eq!(img.shape(), (w, h, c));
        assert_eq!(encode_ppm(&img), bytes);
    }
}
