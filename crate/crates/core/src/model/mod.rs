//! The game model: trees, coalitions, partitions and utilities.

mod coalition;
mod error;
mod outcome;
mod tree;
mod utility;
mod view;

pub use coalition::{Coalition, Partition, Player, MAX_PLAYERS};
pub use error::{ModelError, ValidationError, Violation};
pub(crate) use outcome::{approx_eq, strictly_greater};
pub use outcome::{format_payoffs, format_value, Outcome, EPS};
pub use tree::{Action, GameTree, InfoSet, InfoSetId, Node, NodeId, NodeKind, Subtree, TreeParts};
pub use utility::{Combinator, Feasibility, Synergy, UtilitySystem};
pub use view::{Game, SupergameView};
