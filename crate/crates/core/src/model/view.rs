use std::cmp::Ordering;

use super::coalition::{Coalition, Partition, Player};
use super::error::ModelError;
use super::outcome::{approx_eq, Outcome};
use super::tree::{GameTree, NodeId};
use super::utility::UtilitySystem;

/// A validated coalitional game: the tree plus its utility system.
#[derive(Clone, Debug)]
pub struct Game {
    pub tree: GameTree,
    pub utility: UtilitySystem,
}

impl Game {
    pub fn player_count(&self) -> usize {
        self.tree.player_count()
    }

    /// The game seen with every player acting alone.
    pub fn standalone(&self) -> SupergameView<'_> {
        SupergameView { game: self, partition: Partition::singletons(self.player_count()) }
    }

    /// The same game with only singleton coalitions feasible.
    pub fn noncooperative(&self) -> Game {
        Game { tree: self.tree.clone(), utility: self.utility.restricted_to_singletons() }
    }
}

/// The game re-indexed so the blocks of a partition act as players.
///
/// The tree is shared untouched; only ownership of decision nodes and the
/// utility used to evaluate them change.
#[derive(Clone, Debug)]
pub struct SupergameView<'g> {
    pub game: &'g Game,
    pub partition: Partition,
}

impl<'g> SupergameView<'g> {
    /// `Γ_{P_C}`: only `c` merged. Singletons give the standalone view.
    pub fn build_supergame(game: &'g Game, c: Coalition) -> Result<Self, ModelError> {
        if !game.utility.is_feasible(c) {
            return Err(ModelError::InfeasibleCoalition(format!("{c:?}")));
        }
        Ok(SupergameView { game, partition: Partition::merged(game.player_count(), c) })
    }

    pub fn with_partition(game: &'g Game, partition: Partition) -> Self {
        SupergameView { game, partition }
    }

    pub fn tree(&self) -> &'g GameTree {
        &self.game.tree
    }

    pub fn utility(&self) -> &'g UtilitySystem {
        &self.game.utility
    }

    /// The players of the view: the blocks of its partition.
    pub fn effective_players(&self) -> &[Coalition] {
        self.partition.blocks()
    }

    pub fn player_count(&self) -> usize {
        self.partition.len()
    }

    pub fn merged_player_of(&self, p: Player) -> Coalition {
        self.partition.block_of(p)
    }

    /// The effective player moving at `x`; `None` at terminals and chance.
    pub fn owner(&self, x: NodeId) -> Option<Coalition> {
        self.tree().node(x).player().map(|p| self.partition.block_of(p))
    }

    /// Expected `u_i(· | P)` of a base player under this view's partition.
    pub fn individual_value(&self, i: Player, outcome: &Outcome) -> f64 {
        let tree = self.tree();
        let u = self.utility();
        outcome.expect(|z| u.individual_utility(i, z, &self.partition, tree))
    }

    /// The utility an effective player maximizes: `u_i(· | P)` for a
    /// singleton, `u_B` for a merged block.
    pub fn player_value(&self, block: Coalition, outcome: &Outcome) -> f64 {
        if block.is_singleton() {
            return self.individual_value(block.min_member(), outcome);
        }
        let tree = self.tree();
        let u = self.utility();
        outcome.expect(|z| u.coalition_utility_unchecked(block, z, tree))
    }

    /// Members' individual values, ascending.
    pub fn leximin_profile(&self, block: Coalition, outcome: &Outcome) -> Vec<f64> {
        let mut v: Vec<f64> = block.members().map(|i| self.individual_value(i, outcome)).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// How `block` ranks outcome `a` against `b`: by its own utility, then
    /// by the leximin order of its members' values. `Equal` leaves the
    /// decision to declaration order.
    pub fn compare_for(&self, block: Coalition, a: &Outcome, b: &Outcome) -> Ordering {
        let (va, vb) = (self.player_value(block, a), self.player_value(block, b));
        if !approx_eq(va, vb) {
            return va.total_cmp(&vb);
        }
        if block.is_singleton() {
            return Ordering::Equal;
        }
        for (x, y) in self.leximin_profile(block, a).into_iter().zip(self.leximin_profile(block, b)) {
            if !approx_eq(x, y) {
                return x.total_cmp(&y);
            }
        }
        Ordering::Equal
    }
}
