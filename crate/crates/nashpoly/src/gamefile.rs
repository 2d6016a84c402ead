//! JSON game files.
//!
//! ```json
//! {
//!   "players": 2,
//!   "strategies": [2, 2],
//!   "payoffs": [[1, 0, 0, 1], [0, 1, 1, 0]],
//!   "labels": [["H", "T"], ["H", "T"]]
//! }
//! ```
//!
//! `payoffs` holds one list per player, each indexed by pure profile with
//! player 0's strategy varying fastest. A single flat list of all players'
//! lists concatenated is accepted too.

use nashpoly_core::{Game, GameFormat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Payoffs {
    PerPlayer(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub players: usize,
    pub strategies: Vec<usize>,
    pub payoffs: Payoffs,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Vec<String>>>,
}

impl GameFile {
    pub fn from_game(game: &Game) -> Self {
        let format = game.format();
        let outcomes = format.outcome_count();
        Self {
            players: format.players(),
            strategies: (0..format.players()).map(|p| format.strategies(p)).collect(),
            payoffs: Payoffs::PerPlayer(game.payoffs().chunks(outcomes).map(<[f64]>::to_vec).collect()),
            labels: None,
        }
    }

    pub fn to_game(&self) -> Result<Game> {
        if self.strategies.len() != self.players {
            return Err(Error::GameFile(format!(
                "{} players but {} strategy counts",
                self.players,
                self.strategies.len()
            )));
        }
        let format = GameFormat::from_strategy_counts(&self.strategies)?;
        if let Some(labels) = &self.labels {
            let fits = labels.len() == self.players
                && labels.iter().zip(&self.strategies).all(|(l, &s)| l.len() == s);
            if !fits {
                return Err(Error::GameFile("labels do not match the strategy counts".into()));
            }
        }
        let payoffs = match &self.payoffs {
            Payoffs::Flat(v) => v.clone(),
            Payoffs::PerPlayer(lists) => {
                if lists.len() != self.players {
                    return Err(Error::GameFile(format!(
                        "{} players but {} payoff lists",
                        self.players,
                        lists.len()
                    )));
                }
                let outcomes = format.outcome_count();
                if let Some((p, l)) = lists.iter().enumerate().find(|(_, l)| l.len() != outcomes) {
                    return Err(Error::GameFile(format!(
                        "player {} has {} payoffs, expected {outcomes}",
                        p + 1,
                        l.len()
                    )));
                }
                lists.concat()
            }
        };
        Ok(Game::new(format, payoffs)?)
    }

    /// Label of a strategy, defaulting to its 0-based number.
    pub fn label(&self, player: usize, strategy: usize) -> String {
        self.labels
            .as_ref()
            .and_then(|l| l.get(player))
            .and_then(|l| l.get(strategy))
            .cloned()
            .unwrap_or_else(|| strategy.to_string())
    }
}

pub fn parse_game(text: &str) -> Result<GameFile> {
    Ok(serde_json::from_str(text)?)
}

pub fn render_game(file: &GameFile) -> Result<String> {
    Ok(serde_json::to_string_pretty(file)?)
}
