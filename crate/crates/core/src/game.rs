//! Finite normal-form games.
//!
//! Players are numbered `0..N`. Player `i` has strategies `0..=d_i`, where
//! strategy 0 is the base strategy that payoff differences are measured
//! against. Pure profiles are linearised player-0-fastest:
//!
//! ```text
//! outcome = j_0 + (d_0 + 1) * (j_1 + (d_1 + 1) * (j_2 + ...))
//! ```
//!
//! Payoff tables store all outcomes of player 0, then all outcomes of
//! player 1, and so on.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Number of players and strategies per player.
///
/// `dims[i]` is the number of strategies of player `i` minus one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GameFormat {
    dims: Vec<usize>,
}

impl GameFormat {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::TooFewPlayers(dims.len()));
        }
        if let Some(player) = dims.iter().position(|&d| d == 0) {
            return Err(Error::TrivialPlayer(player));
        }
        Ok(Self { dims })
    }

    /// Builds a format from the number of pure strategies of each player.
    pub fn from_strategy_counts(counts: &[usize]) -> Result<Self> {
        if let Some(player) = counts.iter().position(|&c| c < 2) {
            return Err(Error::TrivialPlayer(player));
        }
        Self::new(counts.iter().map(|c| c - 1).collect())
    }

    pub fn players(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, player: usize) -> usize {
        self.dims[player]
    }

    /// Number of pure strategies of `player`.
    pub fn strategies(&self, player: usize) -> usize {
        self.dims[player] + 1
    }

    /// Sum of all `d_i`: the number of unknowns of the equilibrium system.
    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn outcome_count(&self) -> usize {
        self.dims.iter().map(|d| d + 1).product()
    }

    /// Position of the non-base strategy `strategy` of `player` among all
    /// `D` non-base strategies, player-major. Zero-based.
    pub fn flat_index(&self, player: usize, strategy: usize) -> Result<usize> {
        if player >= self.players() {
            return Err(Error::PlayerOutOfRange(player));
        }
        if strategy == 0 || strategy > self.dims[player] {
            return Err(Error::StrategyOutOfRange { player, strategy });
        }
        Ok(self.dims[..player].iter().sum::<usize>() + strategy - 1)
    }

    /// Inverse of [`flat_index`](Self::flat_index).
    pub fn unflatten(&self, index: usize) -> Option<(usize, usize)> {
        let mut rest = index;
        for (player, &d) in self.dims.iter().enumerate() {
            if rest < d {
                return Some((player, rest + 1));
            }
            rest -= d;
        }
        None
    }

    /// Player owning each of the `D` flat indices.
    pub fn block_of(&self, index: usize) -> Option<usize> {
        self.unflatten(index).map(|(p, _)| p)
    }

    pub fn outcome_index(&self, profile: &[usize]) -> usize {
        debug_assert_eq!(profile.len(), self.players());
        profile
            .iter()
            .zip(&self.dims)
            .rev()
            .fold(0, |acc, (&j, &d)| acc * (d + 1) + j)
    }

    pub fn outcome(&self, mut index: usize) -> Vec<usize> {
        self.dims
            .iter()
            .map(|&d| {
                let j = index % (d + 1);
                index /= d + 1;
                j
            })
            .collect()
    }

    /// All pure profiles in storage order.
    pub fn outcomes(&self) -> Outcomes {
        Outcomes::new(self.dims.iter().map(|d| d + 1).collect())
    }
}

/// Written `(N;n_1,...,n_N)` with `n_i` the strategy count of player `i`.
impl fmt::Display for GameFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.players())?;
        for (i, d) in self.dims.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", d + 1)?;
        }
        f.write_str(")")
    }
}

/// Odometer over a product of ranges `0..sizes[0] x 0..sizes[1] x ...`,
/// first coordinate fastest.
#[derive(Debug, Clone)]
pub struct Outcomes {
    sizes: Vec<usize>,
    current: Option<Vec<usize>>,
}

impl Outcomes {
    pub fn new(sizes: Vec<usize>) -> Self {
        let current = if sizes.iter().all(|&s| s > 0) {
            Some(vec![0; sizes.len()])
        } else {
            None
        };
        Self { sizes, current }
    }
}

impl Iterator for Outcomes {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().unwrap();
        let mut k = 0;
        loop {
            if k == cur.len() {
                self.current = None;
                break;
            }
            cur[k] += 1;
            if cur[k] < self.sizes[k] {
                break;
            }
            cur[k] = 0;
            k += 1;
        }
        Some(out)
    }
}

/// A game: a format plus a payoff for every player at every pure profile.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    format: GameFormat,
    payoffs: Vec<f64>,
}

impl Game {
    /// `payoffs` holds `N * outcome_count` values, player-major.
    pub fn new(format: GameFormat, payoffs: Vec<f64>) -> Result<Self> {
        let outcomes = format.outcome_count();
        let expected = outcomes * format.players();
        if payoffs.len() != expected {
            return Err(Error::PayoffCount {
                expected,
                got: payoffs.len(),
            });
        }
        if let Some(pos) = payoffs.iter().position(|u| !u.is_finite()) {
            return Err(Error::NonFinitePayoff {
                player: pos / outcomes,
                outcome: pos % outcomes,
            });
        }
        Ok(Self { format, payoffs })
    }

    /// Builds a game by calling `payoff(player, profile)` for every entry.
    pub fn from_fn(format: GameFormat, mut payoff: impl FnMut(usize, &[usize]) -> f64) -> Result<Self> {
        let mut payoffs = Vec::with_capacity(format.players() * format.outcome_count());
        for player in 0..format.players() {
            for profile in format.outcomes() {
                payoffs.push(payoff(player, &profile));
            }
        }
        Self::new(format, payoffs)
    }

    pub fn format(&self) -> &GameFormat {
        &self.format
    }

    pub fn payoffs(&self) -> &[f64] {
        &self.payoffs
    }

    pub fn payoff(&self, player: usize, outcome: usize) -> f64 {
        self.payoffs[player * self.format.outcome_count() + outcome]
    }

    pub fn payoff_at(&self, player: usize, profile: &[usize]) -> f64 {
        self.payoff(player, self.format.outcome_index(profile))
    }

    /// Expected payoff of `player` under a mixed profile, by multilinearity.
    pub fn expected_payoff(&self, player: usize, profile: &MixedProfile) -> Result<f64> {
        self.check_player(player)?;
        profile.check_format(&self.format)?;
        Ok(self.contract(player, profile, None))
    }

    /// Expected payoff of `player` when playing pure `strategy` against the
    /// opponents' mixed strategies in `profile`.
    pub fn payoff_against(&self, player: usize, strategy: usize, profile: &MixedProfile) -> Result<f64> {
        self.check_player(player)?;
        if strategy > self.format.dim(player) {
            return Err(Error::StrategyOutOfRange { player, strategy });
        }
        profile.check_format(&self.format)?;
        Ok(self.contract(player, profile, Some(strategy)))
    }

    fn check_player(&self, player: usize) -> Result<()> {
        if player >= self.format.players() {
            Err(Error::PlayerOutOfRange(player))
        } else {
            Ok(())
        }
    }

    fn contract(&self, player: usize, profile: &MixedProfile, fixed: Option<usize>) -> f64 {
        let base = player * self.format.outcome_count();
        let mut total = 0.0;
        for (idx, outcome) in self.format.outcomes().enumerate() {
            let mut weight = 1.0;
            for (k, &j) in outcome.iter().enumerate() {
                if k == player {
                    if let Some(s) = fixed {
                        if j != s {
                            weight = 0.0;
                            break;
                        }
                        continue;
                    }
                }
                weight *= profile.prob(k, j);
                if weight == 0.0 {
                    break;
                }
            }
            if weight != 0.0 {
                total += weight * self.payoffs[base + idx];
            }
        }
        total
    }

    /// Payoff differences against each player's base strategy.
    pub fn payoff_differences(&self) -> PayoffDifferenceTensor {
        let n = self.format.outcome_count();
        let mut values = vec![0.0; self.payoffs.len()];
        for player in 0..self.format.players() {
            for (idx, mut outcome) in self.format.outcomes().enumerate() {
                if outcome[player] == 0 {
                    continue;
                }
                let here = self.payoffs[player * n + idx];
                outcome[player] = 0;
                let base = self.payoffs[player * n + self.format.outcome_index(&outcome)];
                values[player * n + idx] = here - base;
            }
        }
        PayoffDifferenceTensor {
            format: self.format.clone(),
            values,
        }
    }
}

/// `u_i(s) - u_i(s with player i switched to strategy 0)` for every player
/// and outcome; zero wherever player `i` already plays strategy 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffDifferenceTensor {
    format: GameFormat,
    values: Vec<f64>,
}

impl PayoffDifferenceTensor {
    pub fn format(&self) -> &GameFormat {
        &self.format
    }

    pub fn get(&self, player: usize, profile: &[usize]) -> f64 {
        self.values[player * self.format.outcome_count() + self.format.outcome_index(profile)]
    }

    pub fn player_values(&self, player: usize) -> &[f64] {
        let n = self.format.outcome_count();
        &self.values[player * n..(player + 1) * n]
    }
}

/// One probability vector per player. Entries are not required to be
/// nonnegative so that quasi-equilibria can be represented.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedProfile {
    strategies: Vec<Vec<f64>>,
}

impl MixedProfile {
    pub fn new(strategies: Vec<Vec<f64>>) -> Self {
        Self { strategies }
    }

    pub fn pure(format: &GameFormat, profile: &[usize]) -> Self {
        let strategies = (0..format.players())
            .map(|i| {
                let mut v = vec![0.0; format.strategies(i)];
                v[profile[i]] = 1.0;
                v
            })
            .collect();
        Self { strategies }
    }

    pub fn uniform(format: &GameFormat) -> Self {
        let strategies = (0..format.players())
            .map(|i| {
                let n = format.strategies(i);
                vec![1.0 / n as f64; n]
            })
            .collect();
        Self { strategies }
    }

    /// Rebuilds a full profile from the non-base coordinates of every
    /// player, filling in `sigma_i0 = 1 - sum_j sigma_ij`.
    pub fn from_reduced(format: &GameFormat, coords: &[f64]) -> Result<Self> {
        if coords.len() != format.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: format.total_dim(),
                got: coords.len(),
            });
        }
        let mut offset = 0;
        let strategies = format
            .dims()
            .iter()
            .map(|&d| {
                let tail = &coords[offset..offset + d];
                offset += d;
                let mut v = Vec::with_capacity(d + 1);
                v.push(1.0 - tail.iter().sum::<f64>());
                v.extend_from_slice(tail);
                v
            })
            .collect();
        Ok(Self { strategies })
    }

    pub fn players(&self) -> usize {
        self.strategies.len()
    }

    pub fn player(&self, i: usize) -> &[f64] {
        &self.strategies[i]
    }

    pub fn prob(&self, player: usize, strategy: usize) -> f64 {
        self.strategies[player][strategy]
    }

    pub fn strategies(&self) -> &[Vec<f64>] {
        &self.strategies
    }

    pub fn set(&mut self, player: usize, strategy: usize, value: f64) {
        self.strategies[player][strategy] = value;
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        self.strategies
            .iter()
            .all(|v| (v.iter().sum::<f64>() - 1.0).abs() <= tol)
    }

    /// Largest coordinate-wise distance to `other` (infinite when shapes differ).
    pub fn max_distance(&self, other: &MixedProfile) -> f64 {
        if self.strategies.len() != other.strategies.len() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for (a, b) in self.strategies.iter().zip(&other.strategies) {
            if a.len() != b.len() {
                return f64::INFINITY;
            }
            for (x, y) in a.iter().zip(b) {
                worst = worst.max((x - y).abs());
            }
        }
        worst
    }

    pub(crate) fn check_format(&self, format: &GameFormat) -> Result<()> {
        if self.strategies.len() != format.players() {
            return Err(Error::DimensionMismatch {
                expected: format.players(),
                got: self.strategies.len(),
            });
        }
        for (i, v) in self.strategies.iter().enumerate() {
            if v.len() != format.strategies(i) {
                return Err(Error::DimensionMismatch {
                    expected: format.strategies(i),
                    got: v.len(),
                });
            }
        }
        Ok(())
    }
}
