use phlab_core::attacks::{
    baseline_max_similarity, evade, extract_class, genetic_near_collision, CountingOracle,
    ExtractionConfig, GeneticConfig,
};
use phlab_core::datasets::{generate_synthetic, NoiseSampler, SyntheticSpec};
use phlab_core::experiments::{run_averaged_sweep, run_uniformity};
use phlab_core::pipeline::{sha_block, HASH_BITS, HASH_BYTES};
use phlab_core::rng::sample_rng;
use phlab_core::{
    hamming_similarity, BinaryHash, Defense, EmbedderKind, Image, Pipeline, PipelineConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pipeline(embedder: EmbedderKind, defense: Defense) -> Pipeline {
    Pipeline::new(PipelineConfig::from_seed(5).with_embedder(embedder).with_defense(defense)).unwrap()
}

fn small_synthetic(per_class: usize) -> phlab_core::datasets::LabeledDataset {
    generate_synthetic(&SyntheticSpec {
        per_class,
        ..Default::default()
    })
}

#[test]
fn sha_block_avalanches_on_single_bit_flips() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let trials = 1000;
    let total: f64 = (0..trials)
        .map(|_| {
            let h = BinaryHash::from_bytes(rng.random::<[u8; HASH_BYTES]>());
            let flipped = h.flip(rng.random_range(0..HASH_BITS));
            hamming_similarity(&sha_block(&h), &sha_block(&flipped))
        })
        .sum();
    let mean = total / trials as f64;
    assert!((0.45..=0.55).contains(&mean), "mean similarity {mean}");
}

#[test]
fn defended_hash_is_a_function_of_the_input() {
    let p = pipeline(EmbedderKind::TanhSurrogate, Defense::ShaAtTheEnd);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let a = phlab_core::datasets::noise_image(32, 32, 3, &mut rng);
        let b = Image::new(32, 32, 3, a.data().to_vec()).unwrap();
        assert_eq!(p.hash_image(&a).unwrap(), p.hash_image(&b).unwrap());
    }
}

#[test]
fn linear_surrogate_mid_sweep_stays_above_chance() {
    let ds = small_synthetic(10);
    let p = pipeline(EmbedderKind::LinearSurrogate, Defense::None);
    let report = run_averaged_sweep(&ds, 20, 21, &p, 4).unwrap();
    for metric in ["sim_to_x1_mid", "sim_to_x2_mid"] {
        let mean = report.aggregate(metric).unwrap().mean;
        assert!(mean > 0.55, "{metric} {mean}");
    }
}

/// Expected maximum of `n` independent Binomial(bits, 1/2) draws, divided by `bits`.
fn expected_max_uniform_similarity(n: usize, bits: usize) -> f64 {
    let mut pmf = vec![0.0f64; bits + 1];
    pmf[0] = 0.5f64.powi(bits as i32);
    for k in 1..=bits {
        pmf[k] = pmf[k - 1] * (bits - k + 1) as f64 / k as f64;
    }
    let mut cdf = 0.0;
    let mut prev = 0.0;
    let mut expected = 0.0;
    for (k, p) in pmf.iter().enumerate() {
        cdf += p;
        let at_most = cdf.min(1.0).powi(n as i32);
        expected += k as f64 * (at_most - prev);
        prev = at_most;
    }
    expected / bits as f64
}

#[test]
fn analytic_baseline_oracle_is_sane() {
    assert!((expected_max_uniform_similarity(1, 96) - 0.5).abs() < 1e-12);
    let mut last = 0.5;
    for n in [2, 10, 100, 1000] {
        let e = expected_max_uniform_similarity(n, 96);
        assert!(e > last);
        last = e;
    }
}

#[test]
fn baseline_matches_max_of_binomials_under_sha() {
    // SHA outputs behave like uniform bits, so each query is an independent binomial draw.
    let oracle = pipeline(EmbedderKind::TanhSurrogate, Defense::ShaAtTheEnd);
    let n = 250;
    let targets = 60;
    let total: f64 = (0..targets)
        .map(|t| {
            let mut rng = sample_rng(31, t);
            let target = BinaryHash::from_bytes(rng.random());
            let mut sampler = NoiseSampler::new(32, 32, 3, rng);
            baseline_max_similarity(&target, || sampler.sample(), n, &oracle).unwrap()
        })
        .sum();
    let mean = total / targets as f64;
    let expected = expected_max_uniform_similarity(n, HASH_BITS);
    assert!(mean > 0.5 && mean < 0.75, "baseline {mean}");
    assert!((mean - expected).abs() <= 0.015, "baseline {mean} vs analytic {expected}");
}

#[test]
fn ci_half_width_shrinks_with_root_n() {
    let p = pipeline(EmbedderKind::TanhSurrogate, Defense::None);
    let small = run_uniformity(500, (16, 16, 3), &p, 1).unwrap();
    let large = run_uniformity(1000, (16, 16, 3), &p, 2).unwrap();
    let ratio = large.aggregate("similarity").unwrap().ci95 / small.aggregate("similarity").unwrap().ci95;
    assert!((0.65..=0.75).contains(&ratio), "ratio {ratio}");
}

#[test]
fn attacks_run_against_an_opaque_closure() {
    let inner = pipeline(EmbedderKind::TanhSurrogate, Defense::None);
    let opaque = |img: &Image| inner.hash_image(img).unwrap();
    let counted = CountingOracle::new(&opaque);
    let ds = small_synthetic(4);

    let ev = evade(&ds.images[0], &ds.images[5], &counted, 0.01).unwrap();
    assert_eq!(counted.queries(), ev.queries);

    let cfg = GeneticConfig {
        iterations: 3,
        ..Default::default()
    };
    let target = opaque(&ds.images[1]);
    let before = counted.queries();
    let out = genetic_near_collision(&target, &ds.images, &counted, &cfg).unwrap();
    assert_eq!(counted.queries() - before, out.queries);
    assert_eq!(out.trajectory.len(), 4);
    assert!(out.trajectory.windows(2).all(|w| w[0] <= w[1]));

    let before = counted.queries();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut sampler = || phlab_core::datasets::noise_image(32, 32, 3, &mut rng);
    baseline_max_similarity(&target, &mut sampler, 7, &counted).unwrap();
    assert_eq!(counted.queries() - before, 7);

    let hashes: Vec<_> = ds.images.iter().map(&opaque).collect();
    let out = extract_class(&hashes[2], &hashes, &ds.labels, &ExtractionConfig::default()).unwrap();
    assert_eq!(out.support.len(), ds.class_count());
    assert!((out.weights.as_slice().iter().map(|w| w.abs()).sum::<f64>() - 1.0).abs() < 1e-9);
}
