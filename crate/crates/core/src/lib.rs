//! Recursive backward induction for coalitional extensive-form games.
//!
//! A game is a finite tree whose players may form coalitions. At every
//! node the solver compares the noncooperative solution with the solutions
//! of the supergames in which the mover joins a feasible coalition, and
//! adopts a coalition only when every member strictly gains.

pub mod io;
pub mod model;
pub mod noncoop;
pub mod oracle;
pub mod random;
pub mod ri;

pub use io::{parse_game, validate_game};
pub use model::{Coalition, Game, NodeId, Outcome, Partition, Player};
