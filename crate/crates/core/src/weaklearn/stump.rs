use crate::domain::{Hypothesis, Label, LabeledExample};
use crate::error::{invalid, Result};
use crate::rng::RngStream;

use super::StatWeakLearner;

/// Empirical risk minimization over signed stumps `x -> s * sign(x - theta)`,
/// `theta` in `grid`, `s` in `{+1, -1}`.
///
/// Returns the maximizer of sample correlation and its correlation. Ties go
/// to the smallest threshold, then to `s = +1`. The stump at the `j`-th
/// smallest threshold has id `2j` (`s = +1`) or `2j + 1` (`s = -1`).
pub fn stump_erm(sample: &[LabeledExample], grid: &[f64]) -> Result<(Hypothesis, f64)> {
    if sample.is_empty() {
        return invalid("stump ERM needs a non-empty sample");
    }
    if grid.is_empty() {
        return invalid("stump ERM needs a non-empty threshold grid");
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return invalid("thresholds must be finite");
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);

    let mut best: Option<(i64, usize, Label)> = None;
    for (j, &theta) in sorted.iter().enumerate() {
        let score: i64 = sample
            .iter()
            .map(|e| {
                let side = if e.x.value() >= theta { 1 } else { -1 };
                (side * e.y.value()) as i64
            })
            .sum();
        for (s, polarity) in [(score, Label::Plus), (-score, Label::Minus)] {
            if best.is_none_or(|(b, _, _)| s > b) {
                best = Some((s, j, polarity));
            }
        }
    }
    let (score, j, polarity) = best.expect("grid is non-empty");
    let id = 2 * j as u32 + u32::from(polarity == Label::Minus);
    Ok((
        Hypothesis::stump(id, sorted[j], polarity),
        score as f64 / sample.len() as f64,
    ))
}

/// With probability `gamma` the ERM stump, otherwise a constant hypothesis
/// with a uniformly random sign (ids `2|grid|` for `+1`, `2|grid| + 1` for `-1`).
pub fn stump_erm_train(
    sample: &[LabeledExample],
    grid: &[f64],
    gamma: f64,
    rng: &mut RngStream,
) -> Result<Hypothesis> {
    if sample.is_empty() || grid.is_empty() {
        return invalid("stump training needs a non-empty sample and grid");
    }
    if rng.bernoulli(gamma) {
        Ok(stump_erm(sample, grid)?.0)
    } else {
        let base = 2 * grid.len() as u32;
        Ok(if rng.bernoulli(0.5) {
            Hypothesis::constant(base, Label::Plus)
        } else {
            Hypothesis::constant(base + 1, Label::Minus)
        })
    }
}

/// `sqrt(2 ln(2 |grid|) / m0)`: uniform deviation of stump correlations
/// estimated from `m0` examples (Hoeffding plus a union bound).
pub fn hoeffding_epsilon0(grid_len: usize, m0: usize) -> f64 {
    (2.0 * (2.0 * grid_len as f64).ln() / m0 as f64).sqrt()
}

/// `gamma`-diluted stump ERM as a statistical weak learner.
#[derive(Debug, Clone)]
pub struct StumpLearner {
    grid: Vec<f64>,
    gamma: f64,
    sample_size: usize,
    epsilon0: f64,
    rng: RngStream,
}

impl StumpLearner {
    /// Declares `epsilon0` from [`hoeffding_epsilon0`].
    pub fn new(grid: Vec<f64>, gamma: f64, sample_size: usize, rng: RngStream) -> Result<Self> {
        if grid.is_empty() {
            return invalid("stump learner needs a non-empty grid");
        }
        if sample_size == 0 {
            return invalid("weak-learner sample size must be positive");
        }
        if !(0.0..=1.0).contains(&gamma) {
            return invalid(format!("dilution must lie in [0, 1], got {gamma}"));
        }
        let epsilon0 = hoeffding_epsilon0(grid.len(), sample_size);
        Ok(Self {
            grid,
            gamma,
            sample_size,
            epsilon0,
            rng,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }
}

impl StatWeakLearner for StumpLearner {
    fn advantage(&self) -> f64 {
        self.gamma
    }

    fn epsilon0(&self) -> f64 {
        self.epsilon0
    }

    fn sample_size(&self) -> usize {
        self.sample_size
    }

    fn train(&mut self, sample: &[LabeledExample]) -> Result<Hypothesis> {
        stump_erm_train(sample, &self.grid, self.gamma, &mut self.rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{correlation, threshold_grid, Instance};

    fn ex(x: f64, y: Label) -> LabeledExample {
        LabeledExample::new(Instance::new(x).unwrap(), y)
    }

    fn sample_cor(h: &Hypothesis, s: &[LabeledExample]) -> f64 {
        let p: Vec<Label> = s.iter().map(|e| h.predict(e.x)).collect();
        let y: Vec<Label> = s.iter().map(|e| e.y).collect();
        correlation(&p, &y).unwrap()
    }

    fn noisy_sample(m: usize, noise: f64, seed: u64) -> Vec<LabeledExample> {
        let mut rng = RngStream::new(seed, 0);
        (0..m)
            .map(|_| {
                let x = rng.uniform();
                let y = Label::sign_of(x - 0.5);
                ex(x, if rng.bernoulli(noise) { y.flip() } else { y })
            })
            .collect()
    }

    #[test]
    fn realizable_erm_is_perfect() {
        let s = noisy_sample(200, 0.0, 1);
        let mut rng = RngStream::new(0, 0);
        let h = stump_erm_train(&s, &threshold_grid(32), 1.0, &mut rng).unwrap();
        assert_eq!(sample_cor(&h, &s), 1.0);
    }

    #[test]
    fn all_positive_labels_pick_the_lowest_threshold() {
        let s: Vec<_> = [0.1, 0.4, 0.9]
            .iter()
            .map(|&x| ex(x, Label::Plus))
            .collect();
        let (h, c) = stump_erm(&s, &[0.5, 0.0, 0.25]).unwrap();
        assert_eq!(c, 1.0);
        assert_eq!(
            h.rule,
            crate::domain::Rule::Stump {
                threshold: 0.0,
                polarity: Label::Plus
            }
        );
    }

    #[test]
    fn empty_inputs_are_rejected() {
        let mut rng = RngStream::new(0, 0);
        assert!(stump_erm_train(&[], &[0.5], 1.0, &mut rng).is_err());
        assert!(stump_erm_train(&[ex(0.1, Label::Plus)], &[], 1.0, &mut rng).is_err());
    }

    #[test]
    fn erm_matches_exhaustive_search() {
        let mut rng = RngStream::new(31, 0);
        for _ in 0..500 {
            let m = 1 + rng.index(12);
            let g = 1 + rng.index(8);
            let s: Vec<_> = (0..m)
                .map(|_| ex(rng.uniform(), Label::from_bool(rng.bernoulli(0.5))))
                .collect();
            let grid: Vec<f64> = (0..g).map(|_| rng.uniform()).collect();
            let (_, c) = stump_erm(&s, &grid).unwrap();
            let brute = grid
                .iter()
                .flat_map(|&t| {
                    [Label::Plus, Label::Minus]
                        .into_iter()
                        .map(move |p| Hypothesis::stump(0, t, p))
                })
                .map(|h| sample_cor(&h, &s))
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((c - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn diluted_stump_keeps_a_gamma_fraction_of_the_edge() {
        let s = noisy_sample(200, 0.15, 5);
        let grid = threshold_grid(32);
        let best = stump_erm(&s, &grid).unwrap().1;
        let mut rng = RngStream::new(8, 1);
        let trials = 10_000;
        let mean = (0..trials)
            .map(|_| sample_cor(&stump_erm_train(&s, &grid, 0.4, &mut rng).unwrap(), &s))
            .sum::<f64>()
            / trials as f64;
        assert!(mean >= 0.4 * best - 0.02, "mean {mean} best {best}");
    }

    #[test]
    fn declared_epsilon0_covers_subsampled_erm() {
        // E over m0-subsamples of cor_S(W(S')) >= gamma * max cor_S - eps0
        let m0 = 50;
        let gamma = 0.4;
        let grid = threshold_grid(32);
        let eps0 = hoeffding_epsilon0(grid.len(), m0);
        for (noise, seed) in [(0.0, 1), (0.15, 2), (0.4, 3), (0.5, 4)] {
            let s = noisy_sample(400, noise, seed);
            let best = stump_erm(&s, &grid).unwrap().1;
            let mut learner =
                StumpLearner::new(grid.clone(), gamma, m0, RngStream::new(seed, 1)).unwrap();
            let mut draw = RngStream::new(seed, 2);
            let trials = 4000;
            let cors: Vec<f64> = (0..trials)
                .map(|_| {
                    let sub: Vec<_> = (0..m0).map(|_| s[draw.index(s.len())]).collect();
                    sample_cor(&learner.train(&sub).unwrap(), &s)
                })
                .collect();
            let mean = cors.iter().sum::<f64>() / trials as f64;
            let sd = (cors.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (trials as f64 - 1.0))
                .sqrt();
            assert!(
                mean + 4.0 * sd / (trials as f64).sqrt() >= gamma * best - eps0,
                "noise {noise}: mean {mean}, floor {}",
                gamma * best - eps0
            );
        }
    }

    #[test]
    fn hoeffding_value() {
        let e = hoeffding_epsilon0(32, 50);
        assert!((e - (2.0 * 64f64.ln() / 50.0).sqrt()).abs() < 1e-15);
    }
}
