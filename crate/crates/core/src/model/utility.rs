use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::coalition::{Coalition, Partition, Player};
use super::error::{ModelError, Violation};
use super::tree::{GameTree, NodeId};

/// How a coalition aggregates its members' payoffs at a terminal.
#[derive(Clone, Debug, PartialEq)]
pub enum Combinator {
    Min,
    Sum,
    /// One weight per base player; members' payoffs are weighted and summed.
    Weighted(Vec<f64>),
}

impl Combinator {
    fn apply(&self, c: Coalition, payoffs: &[f64]) -> f64 {
        match self {
            Combinator::Min => c.members().map(|p| payoffs[p.0]).fold(f64::INFINITY, f64::min),
            Combinator::Sum => c.members().map(|p| payoffs[p.0]).sum(),
            Combinator::Weighted(w) => c.members().map(|p| w[p.0] * payoffs[p.0]).sum(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Feasibility {
    /// Every nonempty subset of the players.
    All,
    /// Singletons plus the listed coalitions.
    Listed(BTreeSet<Coalition>),
}

/// An override of `u_i(z | P)`: applies when the block of `player` in `P`
/// equals `block`.
#[derive(Clone, Debug, PartialEq)]
pub struct Synergy {
    pub player: Player,
    pub block: Coalition,
    pub terminal: NodeId,
    pub value: f64,
}

/// Feasible coalitions and their utility functions.
#[derive(Clone, Debug)]
pub struct UtilitySystem {
    players: usize,
    feasibility: Feasibility,
    combinator: Option<Combinator>,
    tables: BTreeMap<Coalition, BTreeMap<NodeId, f64>>,
    synergies: HashMap<(Player, Coalition, NodeId), f64>,
    synergy_list: Vec<Synergy>,
}

impl UtilitySystem {
    /// All coalitions feasible, all valued by `combinator`.
    pub fn with_combinator(players: usize, combinator: Combinator) -> Self {
        UtilitySystem {
            players,
            feasibility: Feasibility::All,
            combinator: Some(combinator),
            tables: BTreeMap::new(),
            synergies: HashMap::new(),
            synergy_list: Vec::new(),
        }
    }

    /// The noncooperative reduction: only singletons are feasible.
    pub fn singletons_only(players: usize) -> Self {
        UtilitySystem {
            players,
            feasibility: Feasibility::Listed(BTreeSet::new()),
            combinator: None,
            tables: BTreeMap::new(),
            synergies: HashMap::new(),
            synergy_list: Vec::new(),
        }
    }

    /// Validating constructor. Every feasible non-singleton coalition must be
    /// valued by a table covering all terminals or by the default combinator.
    pub fn new(
        tree: &GameTree,
        feasibility: Feasibility,
        combinator: Option<Combinator>,
        tables: BTreeMap<Coalition, BTreeMap<NodeId, f64>>,
        synergies: Vec<Synergy>,
    ) -> Result<Self, Vec<Violation>> {
        let n = tree.player_count();
        let grand = Coalition::grand(n);
        let mut violations = Vec::new();

        if let Some(Combinator::Weighted(w)) = &combinator {
            if w.len() != n {
                violations.push(Violation::BadUtility(format!("{} weights given for {n} players", w.len())));
            }
        }
        if let Feasibility::Listed(list) = &feasibility {
            for c in list {
                if !c.is_subset_of(grand) {
                    violations.push(Violation::BadUtility(format!("feasible coalition {c:?} names unknown players")));
                }
            }
        }
        let terminals: Vec<NodeId> = tree.terminals().collect();
        for (c, table) in &tables {
            if !c.is_subset_of(grand) {
                violations.push(Violation::BadUtility(format!("table for {c:?} names unknown players")));
            }
            for z in table.keys() {
                if !tree.node(*z).is_terminal() {
                    violations.push(Violation::BadUtility(format!(
                        "table for {c:?} values non-terminal {}",
                        tree.node(*z).name
                    )));
                }
            }
        }

        let system = UtilitySystem {
            players: n,
            feasibility,
            combinator,
            tables,
            synergies: HashMap::new(),
            synergy_list: Vec::new(),
        };
        if violations.is_empty() && system.combinator.is_none() {
            for c in system.feasible_non_singletons() {
                let complete = system.tables.get(&c).is_some_and(|t| terminals.iter().all(|z| t.contains_key(z)));
                if !complete {
                    violations.push(Violation::MissingCoalitionUtility(format!("{c:?}")));
                }
            }
        }

        let mut system = system;
        for s in synergies {
            if s.player.0 >= n || !s.block.contains(s.player) || !s.block.is_subset_of(grand) {
                violations.push(Violation::BadSynergy(format!("player {} with block {:?}", s.player, s.block)));
                continue;
            }
            if !tree.node(s.terminal).is_terminal() {
                violations.push(Violation::BadSynergy(format!("{} is not a terminal", tree.node(s.terminal).name)));
                continue;
            }
            system.synergies.insert((s.player, s.block, s.terminal), s.value);
            system.synergy_list.push(s);
        }

        if violations.is_empty() {
            Ok(system)
        } else {
            Err(violations)
        }
    }

    pub fn player_count(&self) -> usize {
        self.players
    }

    pub fn feasibility(&self) -> &Feasibility {
        &self.feasibility
    }

    pub fn combinator(&self) -> Option<&Combinator> {
        self.combinator.as_ref()
    }

    pub fn tables(&self) -> &BTreeMap<Coalition, BTreeMap<NodeId, f64>> {
        &self.tables
    }

    pub fn synergies(&self) -> &[Synergy] {
        &self.synergy_list
    }

    pub fn is_feasible(&self, c: Coalition) -> bool {
        if c.is_empty() || !c.is_subset_of(Coalition::grand(self.players)) {
            return false;
        }
        match &self.feasibility {
            Feasibility::All => true,
            Feasibility::Listed(list) => c.is_singleton() || list.contains(&c),
        }
    }

    fn feasible_non_singletons(&self) -> Vec<Coalition> {
        match &self.feasibility {
            Feasibility::All => {
                let grand = Coalition::grand(self.players).bits();
                let mut out: Vec<Coalition> = (1..=grand)
                    .filter(|b| b & grand == *b && b.count_ones() > 1)
                    .filter_map(|b| Coalition::from_players((0..64).filter(|i| b & (1 << i) != 0).map(Player)))
                    .collect();
                out.sort();
                out
            }
            Feasibility::Listed(list) => list.iter().copied().filter(|c| !c.is_singleton()).collect(),
        }
    }

    /// `F_i`: feasible coalitions containing `i`, in canonical order.
    pub fn feasible_coalitions_containing(&self, i: Player) -> Vec<Coalition> {
        let mut out = vec![Coalition::singleton(i)];
        out.extend(self.feasible_non_singletons().into_iter().filter(|c| c.contains(i)));
        out.sort();
        out
    }

    /// `u_C(z)`.
    pub fn coalition_utility(&self, c: Coalition, z: NodeId, tree: &GameTree) -> Result<f64, ModelError> {
        if !self.is_feasible(c) {
            return Err(ModelError::InfeasibleCoalition(format!("{c:?}")));
        }
        Ok(self.coalition_utility_unchecked(c, z, tree))
    }

    /// `u_C(z)` without the feasibility check; callers guarantee `c` is a
    /// block of a feasible partition.
    pub(crate) fn coalition_utility_unchecked(&self, c: Coalition, z: NodeId, tree: &GameTree) -> f64 {
        let payoffs = tree.payoffs(z);
        if c.is_singleton() {
            return payoffs[c.min_member().0];
        }
        if let Some(v) = self.tables.get(&c).and_then(|t| t.get(&z)) {
            return *v;
        }
        self.combinator.as_ref().expect("validated: every feasible coalition is valued").apply(c, payoffs)
    }

    /// `u_i(z | P)`.
    pub fn individual_utility(&self, i: Player, z: NodeId, partition: &Partition, tree: &GameTree) -> f64 {
        if !self.synergies.is_empty() {
            let block = partition.block_of(i);
            if let Some(v) = self.synergies.get(&(i, block, z)) {
                return *v;
            }
        }
        tree.payoffs(z)[i.0]
    }

    /// The same system with every non-singleton coalition made infeasible.
    pub fn restricted_to_singletons(&self) -> Self {
        UtilitySystem {
            synergies: self.synergies.clone(),
            synergy_list: self.synergy_list.clone(),
            ..Self::singletons_only(self.players)
        }
    }
}
