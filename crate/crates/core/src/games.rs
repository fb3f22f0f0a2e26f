//! Approximate zero-sum game solving with an improper best-response oracle.
//!
//! Player A (minimizer) plays from a box with an OCO algorithm; player B
//! (maximizer) answers each play with an oracle response from an enlarged
//! set `K_B' = {q >= 0, sum(q) <= scale}` containing the simplex `K_B`.
//! The average of B's responses is certified against the value of the game
//! over proper strategies.

use crate::error::{invalid, Error, Result};
use crate::oco::{dot, ogd_regret_bound, BoxDomain, OcoFactory, OnlineConvexOptimizer};
use crate::rng::RngStream;

const SIMPLEX_TOLERANCE: f64 = 1e-9;

/// `g(p, q) = p^T A q + b^T q` with `p` in a box and `q` in the simplex.
/// The offset `b` lets a row player's mixed strategy be embedded as a box
/// coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGame {
    rows: Vec<Vec<f64>>,
    offset: Vec<f64>,
    player_a: BoxDomain,
    improper_scale: f64,
}

impl MatrixGame {
    pub fn new(rows: Vec<Vec<f64>>, player_a: BoxDomain) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        Self::with_offset(rows, vec![0.0; n], player_a)
    }

    pub fn with_offset(rows: Vec<Vec<f64>>, offset: Vec<f64>, player_a: BoxDomain) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return invalid("payoff matrix must be non-empty");
        }
        let n = rows[0].len();
        if rows.iter().any(|r| r.len() != n) {
            return invalid("payoff matrix rows must have equal length");
        }
        if rows.iter().flatten().chain(&offset).any(|v| !v.is_finite()) {
            return invalid("payoff entries must be finite");
        }
        if offset.len() != n {
            return invalid("offset length must equal the number of columns");
        }
        if player_a.dim() != rows.len() {
            return invalid(format!(
                "player A box has dimension {}, matrix has {} rows",
                player_a.dim(),
                rows.len()
            ));
        }
        Ok(Self {
            rows,
            offset,
            player_a,
            improper_scale: 1.0,
        })
    }

    /// Matching pennies with A's mixed strategy written as `p in [-1, 1]`:
    /// `g(p, q) = p (q_1 - q_2)`, value 0.
    pub fn matching_pennies() -> Self {
        Self::new(
            vec![vec![1.0, -1.0]],
            BoxDomain::cube(-1.0, 1.0, 1).expect("static"),
        )
        .expect("static")
    }

    /// A two-row matrix game with the row player's mixed strategy
    /// `(p, 1 - p)`, `p in [0, 1]`.
    pub fn two_row_mixed(matrix: [Vec<f64>; 2]) -> Result<Self> {
        let [top, bottom] = matrix;
        if top.len() != bottom.len() {
            return invalid("rows must have equal length");
        }
        let diff = top.iter().zip(&bottom).map(|(a, b)| a - b).collect();
        Self::with_offset(vec![diff], bottom, BoxDomain::cube(0.0, 1.0, 1)?)
    }

    /// Sets the improper scale `s >= 1` of `K_B' = {q >= 0, sum(q) <= s}`.
    pub fn with_improper_scale(mut self, scale: f64) -> Result<Self> {
        if !(scale >= 1.0 && scale.is_finite()) {
            return invalid(format!("improper scale must be >= 1, got {scale}"));
        }
        self.improper_scale = scale;
        Ok(self)
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.offset.len()
    }

    pub fn player_a(&self) -> &BoxDomain {
        &self.player_a
    }

    pub fn improper_scale(&self) -> f64 {
        self.improper_scale
    }

    pub fn payoff(&self, p: &[f64], q: &[f64]) -> f64 {
        dot(p, &self.apply(q)) + dot(&self.offset, q)
    }

    /// `A q`: the gradient of the payoff in `p`.
    pub fn apply(&self, q: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| dot(r, q)).collect()
    }

    /// `A^T p + b`: the payoff of each pure column against `p`.
    pub fn column_payoffs(&self, p: &[f64]) -> Vec<f64> {
        (0..self.cols())
            .map(|j| {
                self.offset[j]
                    + self
                        .rows
                        .iter()
                        .zip(p)
                        .map(|(r, pi)| r[j] * pi)
                        .sum::<f64>()
            })
            .collect()
    }

    /// `min_{p in K_A} g(p, q)`, exact (attained at a corner of the box).
    pub fn min_payoff(&self, q: &[f64]) -> f64 {
        self.player_a.min_linear(&self.apply(q)) + dot(&self.offset, q)
    }

    /// Largest gradient norm over `K_B'`: `scale * max_j ||A e_j||_2`.
    pub fn grad_bound(&self) -> f64 {
        let max_col = (0..self.cols())
            .map(|j| self.rows.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        (self.improper_scale * max_col).max(f64::MIN_POSITIVE)
    }

    /// `max_{p in K_A} ||A^T p + b||_inf`, the Lipschitz constant of
    /// `q -> min_p g(p, q)` with respect to `||.||_1`.
    pub fn lipschitz(&self) -> f64 {
        let radius: Vec<f64> = self
            .player_a
            .lower()
            .iter()
            .zip(self.player_a.upper())
            .map(|(l, u)| l.abs().max(u.abs()))
            .collect();
        (0..self.cols())
            .map(|j| {
                self.offset[j].abs()
                    + self
                        .rows
                        .iter()
                        .zip(&radius)
                        .map(|(r, rad)| r[j].abs() * rad)
                        .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Whether `q` lies in `K_B'`.
    pub fn in_improper_set(&self, q: &[f64]) -> bool {
        q.len() == self.cols()
            && q.iter().all(|v| v.is_finite() && *v >= -SIMPLEX_TOLERANCE)
            && q.iter().sum::<f64>() <= self.improper_scale + SIMPLEX_TOLERANCE
    }
}

/// Parses whitespace-separated, row-major text: one matrix row per line.
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| {
                    Error::Parse(format!("line {}: `{tok}` is not a number", lineno + 1))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("matrix file contains no rows".into()));
    }
    if rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(Error::Parse("matrix rows have different lengths".into()));
    }
    Ok(rows)
}

/// Index of the column maximizing `(A^T p + b)_j`, smallest on ties.
pub fn best_response_index(game: &MatrixGame, p: &[f64]) -> usize {
    let payoffs = game.column_payoffs(p);
    let mut best = 0;
    for (j, v) in payoffs.iter().enumerate() {
        if *v > payoffs[best] {
            best = j;
        }
    }
    best
}

/// The vertex `e_j` of the simplex that best responds to `p`.
pub fn exact_best_response(game: &MatrixGame, p: &[f64]) -> Vec<f64> {
    let mut q = vec![0.0; game.cols()];
    q[best_response_index(game, p)] = 1.0;
    q
}

/// Player B's oracle.
pub trait ImproperOracle {
    fn respond(&mut self, game: &MatrixGame, p: &[f64]) -> Vec<f64>;

    /// The additive slack `eps0` of the oracle's guarantee.
    fn epsilon0(&self) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    ExactBestResponse,
    /// Half of the time shifts mass `min(1, 2 eps0 / gap)` onto the worst
    /// column, so the expected shortfall is at most `eps0`.
    EpsilonNoisy,
}

/// A concrete oracle: exact or noisy best response, scaled up to the
/// improper set when that only increases the payoff.
#[derive(Debug, Clone)]
pub struct OracleSpec {
    pub kind: OracleKind,
    pub epsilon0: f64,
    rng: RngStream,
}

impl OracleSpec {
    pub fn exact() -> Self {
        Self {
            kind: OracleKind::ExactBestResponse,
            epsilon0: 0.0,
            rng: RngStream::new(0, 0),
        }
    }

    pub fn noisy(epsilon0: f64, rng: RngStream) -> Result<Self> {
        if !(epsilon0 >= 0.0 && epsilon0.is_finite()) {
            return invalid(format!("eps0 must be >= 0, got {epsilon0}"));
        }
        Ok(Self {
            kind: OracleKind::EpsilonNoisy,
            epsilon0,
            rng,
        })
    }
}

impl ImproperOracle for OracleSpec {
    fn respond(&mut self, game: &MatrixGame, p: &[f64]) -> Vec<f64> {
        let payoffs = game.column_payoffs(p);
        let best = best_response_index(game, p);
        let mut q = vec![0.0; game.cols()];
        q[best] = 1.0;
        if self.kind == OracleKind::EpsilonNoisy && self.rng.bernoulli(0.5) {
            let worst = (0..payoffs.len())
                .min_by(|&a, &b| payoffs[a].total_cmp(&payoffs[b]))
                .expect("non-empty");
            let gap = payoffs[best] - payoffs[worst];
            if gap > 0.0 {
                let shift = (2.0 * self.epsilon0 / gap).min(1.0);
                q[best] -= shift;
                q[worst] += shift;
            }
        }
        let value = dot(&payoffs, &q);
        if value > 0.0 && game.improper_scale() > 1.0 {
            for v in &mut q {
                *v *= game.improper_scale();
            }
        }
        q
    }

    fn epsilon0(&self) -> f64 {
        self.epsilon0
    }
}

#[derive(Debug, Clone)]
pub struct GameSolution {
    /// `(1/T) sum_t q_t`.
    pub q_bar: Vec<f64>,
    pub p_plays: Vec<Vec<f64>>,
    pub q_plays: Vec<Vec<f64>>,
    /// `min_{p in K_A} g(p, q_bar)`.
    pub min_payoff: f64,
    pub oco_regret: f64,
    /// `R_A(T)` certified by the optimizer.
    pub oco_regret_bound: f64,
    pub rounds: usize,
}

/// Plays `rounds` rounds: A's OCO play, B's oracle response, and the linear
/// loss `p -> g(p, q_t)` fed back to A.
pub fn solve_improper_game<O: ImproperOracle, F: OcoFactory>(
    game: &MatrixGame,
    oracle: &mut O,
    oco: &F,
    rounds: usize,
) -> Result<GameSolution> {
    if rounds == 0 {
        return invalid("a game needs at least one round");
    }
    let domain = game.player_a().clone();
    let initial = domain.center();
    let mut player = oco.build(domain, rounds, game.grad_bound(), initial)?;
    let mut q_sum = vec![0.0; game.cols()];
    let mut p_plays = Vec::with_capacity(rounds);
    let mut q_plays = Vec::with_capacity(rounds);
    for t in 1..=rounds {
        let p = player.next()?.to_vec();
        let q = oracle.respond(game, &p);
        if !game.in_improper_set(&q) {
            return Err(Error::ContractViolation(format!(
                "round {t}: response {q:?} lies outside the improper strategy set"
            )));
        }
        player.update_coeff(&game.apply(&q))?;
        for (s, v) in q_sum.iter_mut().zip(&q) {
            *s += v;
        }
        p_plays.push(p);
        q_plays.push(q);
    }
    let q_bar: Vec<f64> = q_sum.iter().map(|s| s / rounds as f64).collect();
    Ok(GameSolution {
        min_payoff: game.min_payoff(&q_bar),
        q_bar,
        p_plays,
        q_plays,
        oco_regret: player.regret(),
        oco_regret_bound: player.regret_bound(),
        rounds,
    })
}

/// A lower estimate of the game value from a simplex grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridValue {
    /// `max` over grid points `q` of `min_p g(p, q)`; never exceeds the true value.
    pub value: f64,
    /// The true value lies in `[value, value + error_bound]`.
    pub error_bound: f64,
    pub argmax: Vec<f64>,
}

/// Evaluates `min_p g(p, q)` (exactly) at every point of the simplex grid
/// with spacing `1 / resolution`. Limited to games of at most 4 x 4.
pub fn game_value_grid(game: &MatrixGame, resolution: usize) -> Result<GridValue> {
    if game.rows() > 4 || game.cols() > 4 {
        return Err(Error::UnsupportedSize(format!(
            "grid value oracle supports at most 4 x 4 games, got {} x {}",
            game.rows(),
            game.cols()
        )));
    }
    if resolution < 11 {
        return invalid(format!("grid resolution must be >= 11, got {resolution}"));
    }
    let n = game.cols();
    let mut best = GridValue {
        value: f64::NEG_INFINITY,
        error_bound: game.lipschitz() * n as f64 / resolution as f64,
        argmax: Vec::new(),
    };
    let mut counts = vec![0usize; n];
    let mut q = vec![0.0; n];
    visit_compositions(&mut counts, 0, resolution, &mut |c| {
        for (v, k) in q.iter_mut().zip(c) {
            *v = *k as f64 / resolution as f64;
        }
        let v = game.min_payoff(&q);
        if v > best.value {
            best.value = v;
            best.argmax = q.clone();
        }
    });
    Ok(best)
}

fn visit_compositions(counts: &mut [usize], at: usize, left: usize, f: &mut dyn FnMut(&[usize])) {
    if at + 1 == counts.len() {
        counts[at] = left;
        f(counts);
        return;
    }
    for k in 0..=left {
        counts[at] = k;
        visit_compositions(counts, at + 1, left - k, f);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub min_payoff: f64,
    pub value_estimate: f64,
    pub grid_error: f64,
    /// `R_A(T) / T`.
    pub oco_term: f64,
    pub epsilon0: f64,
    /// `value_estimate - oco_term - epsilon0 - grid_error`.
    pub threshold: f64,
    pub margin: f64,
    pub passed: bool,
}

/// Checks `min_p g(p, q_bar) >= value - R_A(T)/T - eps0 - grid_error`.
pub fn certify_solution(
    game: &MatrixGame,
    q_bar: &[f64],
    rounds: usize,
    epsilon0: f64,
    value: &GridValue,
) -> Certificate {
    let oco_term =
        ogd_regret_bound(game.grad_bound(), game.player_a().diameter(), rounds) / rounds as f64;
    let min_payoff = game.min_payoff(q_bar);
    let threshold = value.value - oco_term - epsilon0 - value.error_bound;
    Certificate {
        min_payoff,
        value_estimate: value.value,
        grid_error: value.error_bound,
        oco_term,
        epsilon0,
        threshold,
        margin: min_payoff - threshold,
        passed: min_payoff >= threshold,
    }
}

/// A game with entries uniform in `[-1, 1]` and `K_A = [-1, 1]^m`.
pub fn random_game(m: usize, n: usize, rng: &mut RngStream) -> Result<MatrixGame> {
    let rows = (0..m)
        .map(|_| (0..n).map(|_| 2.0 * rng.uniform() - 1.0).collect())
        .collect();
    MatrixGame::new(rows, BoxDomain::cube(-1.0, 1.0, m)?)
}
