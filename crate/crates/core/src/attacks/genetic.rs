//! Genetic search over interpolation weights for near-collisions.
//!
//! Individuals are weight vectors `p` over a fixed image database; an
//! individual's fitness is the Hamming similarity between the hash of
//! `I_p = Σ p_i x_i` and the target. New individuals come from two operators,
//! both followed by renormalization to `Σ|p_i| = 1`:
//!
//! * crossover: `r = α p + (1 - α) q` with `α ~ U[0, 1]`
//! * mutation: `r_m = p_m + α` with `α ~ U[-range, range]`, other entries unchanged
//!
//! Survivors are the fittest individuals (truncation selection); the
//! population shrinks geometrically from `population_start` towards
//! `population_end`. All randomness is drawn on the calling thread, so results
//! do not depend on how fitness evaluation is parallelized.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{AttackError, HashOracle, InterpolationWeights};
use crate::imaging::{combine, Image};
use crate::pipeline::{BinaryHash, HASH_BITS};
use crate::rng::stream_rng;

/// Nonzero entries per initial individual (fewer if the database is smaller).
pub const INITIAL_SUPPORT: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneticConfig {
    pub population_start: usize,
    pub population_end: usize,
    pub decay_rate: f64,
    pub iterations: usize,
    pub children_per_iter: usize,
    pub mutation_range: f64,
    pub rng_seed: u64,
}

impl Default for GeneticConfig {
    fn default() -> Self {
        Self {
            population_start: 100,
            population_end: 10,
            decay_rate: 0.97,
            iterations: 50,
            children_per_iter: 20,
            mutation_range: 0.05,
            rng_seed: 42,
        }
    }
}

impl GeneticConfig {
    pub fn validate(&self) -> Result<(), AttackError> {
        if self.population_end == 0 || self.population_end > self.population_start {
            return Err(AttackError::Config(format!(
                "population must shrink from {} to a positive {}",
                self.population_start, self.population_end
            )));
        }
        if !(self.decay_rate > 0.0 && self.decay_rate < 1.0) {
            return Err(AttackError::Config(format!(
                "decay rate {} must lie in (0, 1)",
                self.decay_rate
            )));
        }
        if !(self.mutation_range > 0.0 && self.mutation_range.is_finite()) {
            return Err(AttackError::Config("mutation range must be positive".into()));
        }
        Ok(())
    }

    /// `max(end, round(start · decay^g))`.
    pub fn population_size(&self, generation: usize) -> usize {
        let size = (self.population_start as f64 * self.decay_rate.powi(generation as i32)).round();
        (size as usize).max(self.population_end)
    }

    /// Oracle queries spent by a full run (initial population plus all children).
    pub fn query_budget(&self) -> usize {
        self.population_start + self.iterations * self.children_per_iter
    }
}

#[derive(Debug, Clone)]
pub struct Individual {
    pub weights: InterpolationWeights,
    pub fitness: f64,
}

#[derive(Debug, Clone)]
pub struct GeneticOutcome {
    pub weights: InterpolationWeights,
    pub image: Image,
    pub fitness: f64,
    /// Best fitness seen so far: entry 0 after the initial population, entry
    /// `g` after generation `g`.
    pub trajectory: Vec<f64>,
    pub queries: usize,
}

/// Fitness in the signed view: `(1 + s·t / 96) / 2`, the fraction of matching bits.
pub fn signed_fitness(hash: &BinaryHash, target: &[f64; HASH_BITS]) -> f64 {
    let dot: f64 = hash.signed().iter().zip(target).map(|(a, b)| a * b).sum();
    // (96 + dot) / 2 is the integer match count; dividing last keeps this
    // bit-identical to `hamming_similarity`.
    (HASH_BITS as f64 + dot) / 2.0 / HASH_BITS as f64
}

/// Random individuals with `min(5, k)` nonzero entries at distinct random
/// indices, values uniform in `[-1, 1]`, renormalized.
pub fn initial_population(k: usize, size: usize, rng: &mut ChaCha8Rng) -> Vec<InterpolationWeights> {
    let support = INITIAL_SUPPORT.min(k);
    (0..size)
        .map(|_| loop {
            let mut p = vec![0.0; k];
            for i in sample(rng, k, support) {
                p[i] = rng.random_range(-1.0..=1.0);
            }
            if let Some(w) = InterpolationWeights::normalized(p) {
                break w;
            }
        })
        .collect()
}

/// `α p + (1 - α) q`, renormalized. `None` when the mix cancels to zero.
pub fn crossover(p: &InterpolationWeights, q: &InterpolationWeights, alpha: f64) -> Option<InterpolationWeights> {
    let r = p
        .as_slice()
        .iter()
        .zip(q.as_slice())
        .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
        .collect();
    InterpolationWeights::normalized(r)
}

/// Adds `delta` to entry `m`, renormalized. `None` when the result is zero.
pub fn mutate(p: &InterpolationWeights, m: usize, delta: f64) -> Option<InterpolationWeights> {
    let mut r = p.as_slice().to_vec();
    r[m] += delta;
    InterpolationWeights::normalized(r)
}

fn evaluate<O: HashOracle + ?Sized>(
    candidates: Vec<InterpolationWeights>,
    database: &[Image],
    target: &[f64; HASH_BITS],
    oracle: &O,
) -> Result<Vec<Individual>, AttackError> {
    candidates
        .into_par_iter()
        .map(|weights| {
            let img = combine(database, weights.as_slice())?;
            let fitness = signed_fitness(&oracle.query(&img)?, target);
            Ok(Individual { weights, fitness })
        })
        .collect()
}

fn breed(
    population: &[Individual],
    k: usize,
    cfg: &GeneticConfig,
    rng: &mut ChaCha8Rng,
) -> InterpolationWeights {
    let pick = |rng: &mut ChaCha8Rng| &population[rng.random_range(0..population.len())].weights;
    if rng.random_bool(0.5) {
        let p = pick(rng);
        let q = pick(rng);
        let alpha = rng.random_range(0.0..=1.0);
        crossover(p, q, alpha).unwrap_or_else(|| p.clone())
    } else {
        let p = pick(rng);
        let m = rng.random_range(0..k);
        let delta = rng.random_range(-cfg.mutation_range..=cfg.mutation_range);
        mutate(p, m, delta).unwrap_or_else(|| p.clone())
    }
}

/// Searches interpolations of `database` for an image whose hash is close to
/// `target`. Returns the best individual ever evaluated.
pub fn genetic_near_collision<O: HashOracle + ?Sized>(
    target: &BinaryHash,
    database: &[Image],
    oracle: &O,
    cfg: &GeneticConfig,
) -> Result<GeneticOutcome, AttackError> {
    cfg.validate()?;
    if database.is_empty() {
        return Err(AttackError::Config("empty image database".into()));
    }
    for img in &database[1..] {
        database[0].check_same_shape(img)?;
    }
    let k = database.len();
    let signed_target = target.signed();
    let mut rng = stream_rng(cfg.rng_seed, 0x4741);

    let initial = initial_population(k, cfg.population_size(0), &mut rng);
    let mut queries = initial.len();
    let mut population = evaluate(initial, database, &signed_target, oracle)?;
    sort_by_fitness(&mut population);
    let mut best = population[0].clone();
    let mut trajectory = vec![best.fitness];

    for generation in 1..=cfg.iterations {
        let children: Vec<InterpolationWeights> = (0..cfg.children_per_iter)
            .map(|_| breed(&population, k, cfg, &mut rng))
            .collect();
        debug_assert!(children
            .iter()
            .all(|c| c.as_slice().iter().all(|v| v.abs() <= 1.0)));
        queries += children.len();
        population.extend(evaluate(children, database, &signed_target, oracle)?);
        sort_by_fitness(&mut population);
        population.truncate(cfg.population_size(generation));
        if population[0].fitness > best.fitness {
            best = population[0].clone();
        }
        trajectory.push(best.fitness);
    }

    let image = combine(database, best.weights.as_slice())?;
    Ok(GeneticOutcome {
        weights: best.weights,
        image,
        fitness: best.fitness,
        trajectory,
        queries,
    })
}

/// Stable descending sort; ties keep incumbents ahead of newcomers.
fn sort_by_fitness(population: &mut [Individual]) {
    population.sort_by(|a, b| b.fitness.total_cmp(&a.fitness));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{hamming_similarity, Pipeline, PipelineConfig};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng as _};

    fn noise(seed: u64) -> Image {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Image::from_fn(16, 16, 3, |_, _, _| rng.random::<f64>()).unwrap()
    }

    fn small_pipeline() -> Pipeline {
        Pipeline::new(
            PipelineConfig::from_seed(5).with_preprocess(crate::imaging::PreprocessSpec::new(16, 16, false)),
        )
        .unwrap()
    }

    #[test]
    fn population_schedule() {
        let cfg = GeneticConfig::default();
        assert_eq!(cfg.population_size(0), 100);
        assert_eq!(cfg.population_size(1), 97);
        assert_eq!(cfg.population_size(50), 22);
        assert_eq!(cfg.population_size(200), 10);
        assert_eq!(cfg.query_budget(), 1100);
    }

    #[test]
    fn config_validation() {
        let bad = GeneticConfig { population_end: 200, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = GeneticConfig { decay_rate: 1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        assert!(GeneticConfig::default().validate().is_ok());
    }

    #[test]
    fn signed_fitness_is_hamming_similarity() {
        let a = BinaryHash::from_bytes([0x0f; 12]);
        let b = BinaryHash::from_bytes([0x3c; 12]);
        assert!((signed_fitness(&a, &b.signed()) - hamming_similarity(&a, &b)).abs() < 1e-15);
    }

    #[test]
    fn one_hot_member_reaches_full_fitness() {
        let p = small_pipeline();
        let db: Vec<Image> = (0..6).map(noise).collect();
        let target = p.hash_image(&db[2]).unwrap();
        let one_hot = InterpolationWeights::one_hot(6, 2);
        let img = combine(&db, one_hot.as_slice()).unwrap();
        assert_eq!(signed_fitness(&p.hash_image(&img).unwrap(), &target.signed()), 1.0);
    }

    #[test]
    fn zero_iterations_returns_best_initial_individual() {
        let p = small_pipeline();
        let db: Vec<Image> = (0..8).map(noise).collect();
        let target = p.hash_image(&noise(99)).unwrap();
        let cfg = GeneticConfig { iterations: 0, population_start: 30, ..Default::default() };
        let out = genetic_near_collision(&target, &db, &p, &cfg).unwrap();
        assert_eq!(out.queries, 30);
        assert_eq!(out.trajectory.len(), 1);

        // Re-draw the same seeded initial population and score it directly.
        let mut rng = stream_rng(cfg.rng_seed, 0x4741);
        let fits: Vec<f64> = initial_population(8, 30, &mut rng)
            .iter()
            .map(|w| {
                let img = combine(&db, w.as_slice()).unwrap();
                hamming_similarity(&p.hash_image(&img).unwrap(), &target)
            })
            .collect();
        let max = fits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mean = fits.iter().sum::<f64>() / fits.len() as f64;
        assert_eq!(out.fitness, max);
        assert!(out.fitness >= mean);
    }

    #[test]
    fn trajectory_is_non_decreasing() {
        let p = small_pipeline();
        let db: Vec<Image> = (0..10).map(noise).collect();
        let target = p.hash_image(&noise(77)).unwrap();
        let cfg = GeneticConfig { iterations: 15, population_start: 20, ..Default::default() };
        let out = genetic_near_collision(&target, &db, &p, &cfg).unwrap();
        assert_eq!(out.trajectory.len(), 16);
        assert!(out.trajectory.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(*out.trajectory.last().unwrap(), out.fitness);
        assert_eq!(out.queries, 20 + 15 * 20);
        let rehash = p.hash_image(&out.image).unwrap();
        assert_eq!(hamming_similarity(&rehash, &target), out.fitness);
    }

    #[test]
    fn crossover_of_opposites_can_cancel() {
        let p = InterpolationWeights::new(vec![0.5, -0.5]).unwrap();
        let q = InterpolationWeights::new(vec![-0.5, 0.5]).unwrap();
        assert!(crossover(&p, &q, 0.5).is_none());
    }

    fn weights_strategy(k: usize) -> impl Strategy<Value = InterpolationWeights> {
        prop::collection::vec(-1.0f64..1.0, k)
            .prop_filter_map("nonzero", InterpolationWeights::normalized)
    }

    proptest! {
        #[test]
        fn operators_preserve_weight_invariants(
            p in weights_strategy(7),
            q in weights_strategy(7),
            alpha in 0.0f64..=1.0,
            m in 0usize..7,
            delta in -0.05f64..=0.05,
        ) {
            for child in [crossover(&p, &q, alpha), mutate(&p, m, delta)].into_iter().flatten() {
                let l1: f64 = child.as_slice().iter().map(|v| v.abs()).sum();
                prop_assert!((l1 - 1.0).abs() <= 1e-9);
                prop_assert!(child.as_slice().iter().all(|v| (-1.0..=1.0).contains(v)));
            }
        }

        #[test]
        fn initial_individuals_are_sparse_and_normalized(seed in any::<u64>(), k in 1usize..12) {
            let mut rng = stream_rng(seed, 1);
            for w in initial_population(k, 10, &mut rng) {
                prop_assert!(w.nonzero() <= INITIAL_SUPPORT.min(k));
                let l1: f64 = w.as_slice().iter().map(|v| v.abs()).sum();
                prop_assert!((l1 - 1.0).abs() <= 1e-9);
            }
        }
    }
}
