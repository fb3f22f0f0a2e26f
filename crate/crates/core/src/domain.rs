//! Labels, instances, hypotheses and the randomized majority vote.

use std::collections::HashSet;
use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::rng::RngStream;

/// A binary label in `{-1, +1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(i8)]
pub enum Label {
    Minus = -1,
    Plus = 1,
}

impl Label {
    /// `sign(v)` with the convention `sign(0) = +1`.
    pub fn sign_of(v: f64) -> Label {
        if v >= 0.0 {
            Label::Plus
        } else {
            Label::Minus
        }
    }

    pub fn from_bool(plus: bool) -> Label {
        if plus {
            Label::Plus
        } else {
            Label::Minus
        }
    }

    pub fn value(self) -> i32 {
        self as i32
    }

    pub fn as_f64(self) -> f64 {
        self as i8 as f64
    }

    pub fn flip(self) -> Label {
        match self {
            Label::Plus => Label::Minus,
            Label::Minus => Label::Plus,
        }
    }
}

impl std::ops::Mul for Label {
    type Output = Label;

    fn mul(self, rhs: Label) -> Label {
        Label::from_bool(self == rhs)
    }
}

impl TryFrom<i64> for Label {
    type Error = Error;

    fn try_from(v: i64) -> Result<Label> {
        match v {
            1 => Ok(Label::Plus),
            -1 => Ok(Label::Minus),
            other => invalid(format!("label must be -1 or +1, got {other}")),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Plus => f.write_str("+1"),
            Label::Minus => f.write_str("-1"),
        }
    }
}

/// A point of the (scalar) instance space.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Instance(f64);

impl Instance {
    pub fn new(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return invalid(format!("instance must be finite, got {x}"));
        }
        Ok(Instance(x))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabeledExample {
    pub x: Instance,
    pub y: Label,
}

impl LabeledExample {
    pub fn new(x: Instance, y: Label) -> Self {
        Self { x, y }
    }
}

/// An oblivious, fully materialized example stream.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabeledSequence {
    examples: Vec<LabeledExample>,
}

impl LabeledSequence {
    pub fn new(examples: Vec<LabeledExample>) -> Self {
        Self { examples }
    }

    pub fn examples(&self) -> &[LabeledExample] {
        &self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.examples.iter().map(|e| e.y).collect()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, LabeledExample> {
        self.examples.iter()
    }
}

impl From<Vec<LabeledExample>> for LabeledSequence {
    fn from(examples: Vec<LabeledExample>) -> Self {
        Self::new(examples)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HypothesisId(pub u32);

/// The decision rule of a [`Hypothesis`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rule {
    Constant(Label),
    /// `x -> polarity * sign(x - threshold)`.
    Stump {
        threshold: f64,
        polarity: Label,
    },
}

/// A deterministic `{-1, +1}` predictor over instances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hypothesis {
    pub id: HypothesisId,
    pub rule: Rule,
}

impl Hypothesis {
    pub fn constant(id: u32, label: Label) -> Self {
        Self {
            id: HypothesisId(id),
            rule: Rule::Constant(label),
        }
    }

    pub fn stump(id: u32, threshold: f64, polarity: Label) -> Self {
        Self {
            id: HypothesisId(id),
            rule: Rule::Stump {
                threshold,
                polarity,
            },
        }
    }

    #[inline]
    pub fn predict(&self, x: Instance) -> Label {
        match self.rule {
            Rule::Constant(label) => label,
            Rule::Stump {
                threshold,
                polarity,
            } => {
                if x.0 >= threshold {
                    polarity
                } else {
                    polarity.flip()
                }
            }
        }
    }
}

/// A finite, non-empty reference class of experts with unique ids.
#[derive(Debug, Clone)]
pub struct ExpertPool {
    members: Vec<Hypothesis>,
}

impl ExpertPool {
    pub fn new(members: Vec<Hypothesis>) -> Result<Self> {
        if members.is_empty() {
            return invalid("expert pool must be non-empty");
        }
        let mut seen = HashSet::with_capacity(members.len());
        for h in &members {
            if !seen.insert(h.id) {
                return invalid(format!("duplicate hypothesis id {}", h.id.0));
            }
        }
        Ok(Self { members })
    }

    /// Signed stumps on the grid `{j / grid : j = 0..grid}`, both polarities:
    /// `2 * grid` experts, stump `(j, +1)` has id `2j` and `(j, -1)` has id `2j + 1`.
    pub fn thresholds(grid: usize) -> Result<Self> {
        if grid == 0 {
            return invalid("threshold grid must be non-empty");
        }
        let members = threshold_grid(grid)
            .into_iter()
            .enumerate()
            .flat_map(|(j, theta)| {
                [
                    Hypothesis::stump(2 * j as u32, theta, Label::Plus),
                    Hypothesis::stump(2 * j as u32 + 1, theta, Label::Minus),
                ]
            })
            .collect();
        Self::new(members)
    }

    /// The two constant experts, `+1` (id 0) and `-1` (id 1).
    pub fn constants() -> Self {
        Self {
            members: vec![
                Hypothesis::constant(0, Label::Plus),
                Hypothesis::constant(1, Label::Minus),
            ],
        }
    }

    pub fn members(&self) -> &[Hypothesis] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn get(&self, k: usize) -> &Hypothesis {
        &self.members[k]
    }
}

/// `{j / n : j = 0..n}`.
pub fn threshold_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| j as f64 / n as f64).collect()
}

/// The randomized majority vote: `sign(z)` when `|z| >= 1`, otherwise `+1`
/// with probability `(1 + z) / 2`. Consumes one draw only in the random branch.
pub fn vote_project(z: f64, rng: &mut RngStream) -> Result<Label> {
    if !z.is_finite() {
        return invalid(format!("vote score must be finite, got {z}"));
    }
    if z.abs() >= 1.0 {
        return Ok(Label::sign_of(z));
    }
    Ok(Label::from_bool(rng.bernoulli((1.0 + z) / 2.0)))
}

/// `E[vote_project(z)] = clamp(z, -1, 1)`.
pub fn vote_expectation(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return invalid(format!("vote score must be finite, got {z}"));
    }
    Ok(z.clamp(-1.0, 1.0))
}

/// Mean of `prediction * label` over the uniform empirical distribution.
pub fn correlation(predictions: &[Label], labels: &[Label]) -> Result<f64> {
    if predictions.len() != labels.len() {
        return invalid(format!(
            "length mismatch: {} predictions, {} labels",
            predictions.len(),
            labels.len()
        ));
    }
    if labels.is_empty() {
        return invalid("correlation of an empty sample");
    }
    let sum: i64 = predictions
        .iter()
        .zip(labels)
        .map(|(&p, &y)| (p.value() * y.value()) as i64)
        .sum();
    Ok(sum as f64 / labels.len() as f64)
}

/// Total gain `sum_t h(x_t) y_t` of a single hypothesis.
pub fn gain(h: &Hypothesis, seq: &LabeledSequence) -> f64 {
    seq.iter()
        .map(|e| (h.predict(e.x).value() * e.y.value()) as i64)
        .sum::<i64>() as f64
}

/// The best expert in hindsight and its gain. Ties go to the smallest id.
pub fn best_in_hindsight<'p>(
    pool: &'p ExpertPool,
    seq: &LabeledSequence,
) -> Result<(&'p Hypothesis, f64)> {
    if seq.is_empty() {
        return invalid("best-in-hindsight over an empty sequence");
    }
    let mut best: Option<(&Hypothesis, f64)> = None;
    for h in pool.members() {
        let g = gain(h, seq);
        best = match best {
            Some((b, bg)) if bg > g || (bg == g && b.id < h.id) => Some((b, bg)),
            _ => Some((h, g)),
        };
    }
    Ok(best.expect("pool is non-empty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq_from(xs: &[f64], ys: &[i64]) -> LabeledSequence {
        xs.iter()
            .zip(ys)
            .map(|(&x, &y)| {
                LabeledExample::new(Instance::new(x).unwrap(), Label::try_from(y).unwrap())
            })
            .collect::<Vec<_>>()
            .into()
    }

    #[test]
    fn label_arithmetic() {
        assert_eq!(Label::Plus * Label::Minus, Label::Minus);
        assert_eq!(Label::Minus * Label::Minus, Label::Plus);
        assert_eq!(Label::sign_of(0.0), Label::Plus);
        assert!(Label::try_from(0).is_err());
    }

    #[test]
    fn vote_outside_unit_interval_is_deterministic() {
        let mut rng = RngStream::new(0, 0);
        assert_eq!(vote_project(1.5, &mut rng).unwrap(), Label::Plus);
        assert_eq!(vote_project(-1.0, &mut rng).unwrap(), Label::Minus);
        assert_eq!(vote_project(1.0, &mut rng).unwrap(), Label::Plus);
        assert_eq!(rng.draws(), 0);
        vote_project(0.2, &mut rng).unwrap();
        assert_eq!(rng.draws(), 1);
    }

    #[test]
    fn vote_rejects_non_finite() {
        let mut rng = RngStream::new(0, 0);
        assert!(vote_project(f64::NAN, &mut rng).is_err());
        assert!(vote_project(f64::INFINITY, &mut rng).is_err());
        assert!(vote_expectation(f64::NAN).is_err());
    }

    #[test]
    fn vote_half_mean() {
        let mut rng = RngStream::new(11, 3);
        let n = 100_000;
        let sum: i64 = (0..n)
            .map(|_| vote_project(0.5, &mut rng).unwrap().value() as i64)
            .sum();
        let mean = sum as f64 / n as f64;
        assert!((mean - 0.5).abs() <= 0.0064, "mean {mean}");
    }

    #[test]
    fn vote_zero_is_fair() {
        let mut rng = RngStream::new(5, 9);
        let n = 100_000;
        let plus = (0..n)
            .filter(|_| vote_project(0.0, &mut rng).unwrap() == Label::Plus)
            .count();
        let frac = plus as f64 / n as f64;
        assert!((frac - 0.5).abs() <= 4.0 * (0.25f64 / n as f64).sqrt());
    }

    #[test]
    fn vote_expectation_examples() {
        assert_eq!(vote_expectation(0.3).unwrap(), 0.3);
        assert_eq!(vote_expectation(-7.0).unwrap(), -1.0);
        assert_eq!(vote_expectation(1.0).unwrap(), 1.0);
    }

    #[test]
    fn correlation_examples() {
        use Label::*;
        assert_eq!(correlation(&[Plus, Plus], &[Plus, Plus]).unwrap(), 1.0);
        assert_eq!(correlation(&[Plus, Minus], &[Plus, Plus]).unwrap(), 0.0);
        assert_eq!(
            correlation(&[Minus, Minus, Minus, Plus], &[Plus, Plus, Plus, Plus]).unwrap(),
            -0.5
        );
        assert!(correlation(&[Plus], &[Plus, Plus]).is_err());
        assert!(correlation(&[], &[]).is_err());
    }

    #[test]
    fn best_constant_expert() {
        let pool = ExpertPool::constants();
        let seq = seq_from(&[0.1; 10], &[1; 10]);
        let (h, g) = best_in_hindsight(&pool, &seq).unwrap();
        assert_eq!(h.id, HypothesisId(0));
        assert_eq!(g, 10.0);

        let ys: Vec<i64> = (0..10).map(|t| if t % 2 == 0 { 1 } else { -1 }).collect();
        let seq = seq_from(&[0.1; 10], &ys);
        let (h, g) = best_in_hindsight(&pool, &seq).unwrap();
        assert_eq!(g, 0.0);
        assert_eq!(h.id, HypothesisId(0));
    }

    #[test]
    fn best_threshold_matches_independent_scan() {
        let pool = ExpertPool::thresholds(16).unwrap();
        assert_eq!(pool.len(), 32);
        let mut rng = RngStream::new(77, 1);
        let examples: Vec<LabeledExample> = (0..500)
            .map(|_| {
                let x = rng.uniform();
                let clean = if x >= 0.5 { 1 } else { -1 };
                let y = if rng.bernoulli(0.2) { -clean } else { clean };
                LabeledExample::new(Instance::new(x).unwrap(), Label::try_from(y).unwrap())
            })
            .collect();
        let seq = LabeledSequence::new(examples.clone());
        let (h, g) = best_in_hindsight(&pool, &seq).unwrap();

        // scan over (threshold, polarity) pairs without going through Hypothesis
        let mut best = (i64::MIN, u32::MAX);
        for j in 0..16u32 {
            let theta = j as f64 / 16.0;
            for (k, s) in [(0u32, 1i64), (1, -1)] {
                let total: i64 = examples
                    .iter()
                    .map(|e| {
                        let side = if e.x.value() >= theta { 1 } else { -1 };
                        s * side * e.y.value() as i64
                    })
                    .sum();
                let id = 2 * j + k;
                if total > best.0 || (total == best.0 && id < best.1) {
                    best = (total, id);
                }
            }
        }
        assert_eq!(g, best.0 as f64);
        assert_eq!(h.id.0, best.1);
    }

    #[test]
    fn pool_rejects_duplicates_and_empty() {
        assert!(ExpertPool::new(vec![]).is_err());
        assert!(ExpertPool::new(vec![
            Hypothesis::constant(3, Label::Plus),
            Hypothesis::constant(3, Label::Minus)
        ])
        .is_err());
    }

    #[test]
    fn loss_is_dominated_by_its_corner_value() {
        // for all h*y in {-1,+1} and p in [-1,1]: p (hy - 1) >= hy - 1
        for hy in [-1.0f64, 1.0] {
            for k in 0..=200 {
                let p = -1.0 + k as f64 * 0.01;
                assert!(p * (hy - 1.0) >= hy - 1.0 - 1e-15);
            }
        }
    }

    #[test]
    fn vote_projection_has_a_binary_witness() {
        // exists p* in {0, 1}: p* (h y - 1) <= E[vote(h)] y - 1
        for k in 0..=240 {
            let h = -3.0 + k as f64 * 0.025;
            for y in [-1.0f64, 1.0] {
                let rhs = vote_expectation(h).unwrap() * y - 1.0;
                let ok = [0.0f64, 1.0]
                    .iter()
                    .any(|&p| p * (h * y - 1.0) <= rhs + 1e-12);
                assert!(ok, "h={h} y={y}");
            }
        }
    }

    proptest! {
        #[test]
        fn vote_range(z in -1e6f64..1e6, seed in any::<u64>()) {
            let mut rng = RngStream::new(seed, 0);
            let l = vote_project(z, &mut rng).unwrap();
            prop_assert!(l == Label::Plus || l == Label::Minus);
        }

        #[test]
        fn vote_deterministic_per_stream(z in -1.0f64..1.0, seed in any::<u64>(), stream in any::<u64>()) {
            let mut a = RngStream::new(seed, stream);
            let mut b = RngStream::new(seed, stream);
            for _ in 0..16 {
                prop_assert_eq!(vote_project(z, &mut a).unwrap(), vote_project(z, &mut b).unwrap());
            }
        }

        #[test]
        fn correlation_bounded(bits in proptest::collection::vec((any::<bool>(), any::<bool>()), 1..200)) {
            let p: Vec<Label> = bits.iter().map(|b| Label::from_bool(b.0)).collect();
            let y: Vec<Label> = bits.iter().map(|b| Label::from_bool(b.1)).collect();
            let c = correlation(&p, &y).unwrap();
            prop_assert!((-1.0..=1.0).contains(&c));
        }
    }
}
