use std::fmt;

use thiserror::Error;

/// One broken invariant found while validating a game description.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum Violation {
    #[error("game declares no players")]
    NoPlayers,
    #[error("game declares {0} players; at most 64 are supported")]
    TooManyPlayers(usize),
    #[error("reference to unknown node {0}")]
    UnknownNode(String),
    #[error("node {node} names unknown player {player}")]
    UnknownPlayer { node: String, player: usize },
    #[error("cycle detected at node {0}")]
    CycleDetected(String),
    #[error("node {0} has more than one parent")]
    MultipleParents(String),
    #[error("node {0} is not reachable from the root")]
    UnreachableNode(String),
    #[error("node {0}: {1}")]
    MalformedNode(String, String),
    #[error("decision node {0} has no actions")]
    NoActions(String),
    #[error("node {node} repeats action label {label:?}")]
    DuplicateActionLabel { node: String, label: String },
    #[error("terminal {node} has {found} payoffs, expected {expected}")]
    PayoffLengthMismatch { node: String, expected: usize, found: usize },
    #[error("terminal {0} has a non-finite payoff")]
    NonFinitePayoff(String),
    #[error("information set {0} mixes different action labels")]
    InfoSetActionMismatch(String),
    #[error("information set {0} mixes different players")]
    InfoSetPlayerMismatch(String),
    #[error("information set {0} violates perfect recall")]
    PerfectRecall(String),
    #[error("node {0} appears in more than one information set")]
    InfoSetOverlap(String),
    #[error("chance node {0} is not the root")]
    ChanceOffRoot(String),
    #[error("chance probabilities must be nonnegative and sum to 1")]
    BadChanceDistribution,
    #[error("feasible coalition {0} has no utility over every terminal")]
    MissingCoalitionUtility(String),
    #[error("invalid coalition utility: {0}")]
    BadUtility(String),
    #[error("invalid synergy entry: {0}")]
    BadSynergy(String),
}

/// All violations found in one game description.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationError(pub Vec<Violation>);

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid game")?;
        for v in &self.0 {
            write!(f, "\n  - {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationError {}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("coalition {0} is not feasible")]
    InfeasibleCoalition(String),
    #[error("node {0} does not root a subgame")]
    NotASubgameRoot(String),
    #[error("player {0} is not part of the game")]
    UnknownPlayer(usize),
}
