//! Brute-force reference implementations used to cross-check the solvers.
//!
//! Nothing here calls into the solver modules: backward induction is found
//! by exhaustive search over pure profiles, and recursive induction is run
//! literally, without memoization, on explicitly merged player lists.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::io::spec::serialize_game;
use crate::io::GameSpec;
use crate::model::{format_payoffs, Coalition, Game, GameTree, NodeId, Outcome, Partition, Player, SupergameView};
use crate::noncoop::{Choice, LocalSolution, Move, SolveError, StrategyProfile};

const TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    /// Largest tree `oracle_solve` accepts.
    pub max_nodes: usize,
    pub max_players: usize,
    /// Largest number of pure profiles `oracle_bi` enumerates.
    pub max_profiles: u128,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_nodes: 15, max_players: 3, max_profiles: 1_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum OracleError {
    #[error("game too large for the oracle: {what} is {size}, limit {limit}")]
    TooLarge { what: &'static str, size: u128, limit: u128 },
    #[error("the oracle handles perfect-information games without chance only")]
    Unsupported,
    #[error("solver failed: {0}")]
    Solver(#[from] SolveError),
}

/// Where the solver and the oracle first disagree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Divergence {
    pub node: String,
    pub kind: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub digest: String,
    pub solver_outcome: Vec<f64>,
    pub oracle_outcome: Vec<f64>,
    pub solver_partition: String,
    pub oracle_partition: String,
    #[serde(rename = "match")]
    pub matched: bool,
    pub divergence: Option<Divergence>,
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "game: {}", self.digest)?;
        writeln!(f, "solver: {} [{}]", format_payoffs(&self.solver_outcome), self.solver_partition)?;
        writeln!(f, "oracle: {} [{}]", format_payoffs(&self.oracle_outcome), self.oracle_partition)?;
        write!(f, "match: {}", self.matched)?;
        if let Some(d) = &self.divergence {
            write!(f, "\nfirst divergence: {} ({})", d.node, d.kind)?;
        }
        Ok(())
    }
}

fn require_simple(tree: &GameTree) -> Result<(), OracleError> {
    let chance = tree.nodes().iter().any(|n| n.is_chance());
    if chance || !tree.is_perfect_information() {
        return Err(OracleError::Unsupported);
    }
    Ok(())
}

/// How effective player `block` ranks terminal `a` against `b` under
/// `partition`: own utility, then members' values in leximin order.
fn rank(game: &Game, block: Coalition, partition: &Partition, a: NodeId, b: NodeId) -> Ordering {
    let tree = &game.tree;
    let u = &game.utility;
    let own = |z: NodeId| {
        if block.is_singleton() {
            u.individual_utility(block.min_member(), z, partition, tree)
        } else {
            u.coalition_utility(block, z, tree).expect("blocks of feasible partitions are feasible")
        }
    };
    let (va, vb) = (own(a), own(b));
    if (va - vb).abs() > TOL {
        return if va > vb { Ordering::Greater } else { Ordering::Less };
    }
    let sorted = |z: NodeId| {
        let mut v: Vec<f64> = block.members().map(|i| u.individual_utility(i, z, partition, tree)).collect();
        v.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
        v
    };
    for (x, y) in sorted(a).into_iter().zip(sorted(b)) {
        if (x - y).abs() > TOL {
            return if x > y { Ordering::Greater } else { Ordering::Less };
        }
    }
    Ordering::Equal
}

fn follow(tree: &GameTree, actions: &BTreeMap<NodeId, usize>, mut x: NodeId) -> NodeId {
    while !tree.node(x).is_terminal() {
        x = tree.node(x).actions()[actions[&x]].child;
    }
    x
}

/// Backward induction by exhaustive search: the pure profile in which every
/// mover's action is the first best one given the play that follows it.
pub fn oracle_bi(view: &SupergameView, limits: &OracleLimits) -> Result<LocalSolution, OracleError> {
    let game = view.game;
    let tree = &game.tree;
    require_simple(tree)?;
    let decisions: Vec<NodeId> = tree.nodes().iter().filter(|n| n.player().is_some()).map(|n| n.id).collect();
    let radices: Vec<usize> = decisions.iter().map(|&x| tree.node(x).actions().len()).collect();
    let total = radices.iter().fold(1u128, |acc, &r| acc.saturating_mul(r as u128));
    if total > limits.max_profiles {
        return Err(OracleError::TooLarge { what: "pure profile count", size: total, limit: limits.max_profiles });
    }

    let mut digits = vec![0usize; decisions.len()];
    loop {
        let actions: BTreeMap<NodeId, usize> = decisions.iter().copied().zip(digits.iter().copied()).collect();
        let locally_optimal = decisions.iter().all(|&y| {
            let owner = view.partition.block_of(tree.node(y).player().expect("decision"));
            let outcomes: Vec<NodeId> =
                tree.node(y).actions().iter().map(|a| follow(tree, &actions, a.child)).collect();
            let chosen = actions[&y];
            outcomes.iter().enumerate().all(|(a, &z)| match a.cmp(&chosen) {
                Ordering::Less => rank(game, owner, &view.partition, outcomes[chosen], z) == Ordering::Greater,
                Ordering::Equal => true,
                Ordering::Greater => rank(game, owner, &view.partition, z, outcomes[chosen]) != Ordering::Greater,
            })
        });
        if locally_optimal {
            let mut profile = StrategyProfile::new();
            let mut partitions = BTreeMap::new();
            for &y in &decisions {
                let owner = view.partition.block_of(tree.node(y).player().expect("decision"));
                let h = tree.node(y).info_set().expect("decision");
                profile.insert(h, Move { owner, choice: Choice::Pure(actions[&y]) });
                partitions.insert(y, view.partition.clone());
            }
            let z = follow(tree, &actions, tree.root());
            return Ok(LocalSolution { root: tree.root(), profile, partitions, outcome: Outcome::pure(z) });
        }
        // Advance the odometer.
        let mut i = digits.len();
        loop {
            if i == 0 {
                unreachable!("the tie policy makes exactly one profile locally optimal");
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < radices[i] {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// Effective players as explicit member lists (0-based), sorted.
type Players = Vec<Vec<usize>>;

fn normalize(mut players: Players) -> Players {
    for p in &mut players {
        p.sort_unstable();
    }
    players.sort();
    players
}

fn to_partition(n: usize, players: &Players) -> Partition {
    let blocks =
        players.iter().map(|m| Coalition::from_players(m.iter().map(|&i| Player(i))).expect("nonempty")).collect();
    Partition::from_blocks(n, blocks).expect("player lists cover every base player once")
}

fn to_coalition(members: &[usize]) -> Coalition {
    Coalition::from_players(members.iter().map(|&i| Player(i))).expect("nonempty")
}

#[derive(Clone, Debug)]
struct Literal {
    terminal: NodeId,
    actions: BTreeMap<NodeId, usize>,
    partitions: BTreeMap<NodeId, Players>,
}

struct Point {
    members: Vec<usize>,
    value: f64,
    block: Vec<usize>,
    solution: Literal,
}

fn literal_ri(game: &Game, x: NodeId, players: &Players) -> Literal {
    let tree = &game.tree;
    let n = tree.player_count();
    let node = tree.node(x);
    let Some(mover) = node.player() else {
        return Literal { terminal: x, actions: BTreeMap::new(), partitions: BTreeMap::new() };
    };
    let partition = to_partition(n, players);
    let k = players.iter().position(|m| m.contains(&mover.index())).expect("every player is covered");
    let owner = to_coalition(&players[k]);

    // Index point: the mover's best response to the solved children.
    let children: Vec<Literal> = node.actions().iter().map(|a| literal_ri(game, a.child, players)).collect();
    let mut best = 0;
    for a in 1..children.len() {
        if rank(game, owner, &partition, children[a].terminal, children[best].terminal) == Ordering::Greater {
            best = a;
        }
    }
    let mut index =
        Literal { terminal: children[best].terminal, actions: BTreeMap::new(), partitions: BTreeMap::new() };
    for child in &children {
        index.actions.extend(child.actions.iter().map(|(y, a)| (*y, *a)));
        index.partitions.extend(child.partitions.iter().map(|(y, p)| (*y, p.clone())));
    }
    index.actions.insert(x, best);
    index.partitions.insert(x, players.clone());

    let value_for = |sol: &Literal| {
        let part = to_partition(n, &sol.partitions[&x]);
        if owner.is_singleton() {
            game.utility.individual_utility(owner.min_member(), sol.terminal, &part, tree)
        } else {
            game.utility.coalition_utility(owner, sol.terminal, tree).expect("feasible")
        }
    };
    let mut points = vec![Point {
        members: players[k].clone(),
        value: value_for(&index),
        block: players[k].clone(),
        solution: index,
    }];

    // Supergames: the mover's player merged with every nonempty set of others.
    let others: Vec<usize> = (0..players.len()).filter(|&j| j != k).collect();
    let mut supers = Vec::new();
    for mask in 1u32..(1u32 << others.len()) {
        let chosen: Vec<usize> =
            others.iter().enumerate().filter(|(b, _)| mask & (1 << b) != 0).map(|(_, &j)| j).collect();
        let mut members = players[k].clone();
        for &j in &chosen {
            members.extend(players[j].iter().copied());
        }
        members.sort_unstable();
        if !game.utility.is_feasible(to_coalition(&members)) {
            continue;
        }
        let mut merged: Players = players
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k && !chosen.contains(j))
            .map(|(_, m)| m.clone())
            .collect();
        merged.push(members.clone());
        let merged = normalize(merged);
        let solution = literal_ri(game, x, &merged);
        let block = solution.partitions[&x]
            .iter()
            .find(|b| members.iter().all(|i| b.contains(i)))
            .expect("partitions only coarsen")
            .clone();
        supers.push(Point { value: value_for(&solution), members, block, solution });
    }
    supers.sort_by(|a, b| {
        let by_value = if (a.value - b.value).abs() <= TOL {
            Ordering::Equal
        } else {
            a.value.partial_cmp(&b.value).expect("finite")
        };
        by_value.then(a.members.len().cmp(&b.members.len())).then(a.members.cmp(&b.members))
    });
    points.extend(supers);

    // Individual rationality chain.
    let mut accepted = 0;
    for j in 1..points.len() {
        let cand = &points[j];
        let acc = &points[accepted];
        let cand_part = to_partition(n, &cand.solution.partitions[&x]);
        let acc_part = to_partition(n, &acc.solution.partitions[&x]);
        let all_improve = cand.block.iter().all(|&i| {
            let new = game.utility.individual_utility(Player(i), cand.solution.terminal, &cand_part, tree);
            let old = game.utility.individual_utility(Player(i), acc.solution.terminal, &acc_part, tree);
            new > old + TOL
        });
        if all_improve {
            accepted = j;
        }
    }
    points.swap_remove(accepted).solution
}

/// Recursive induction computed literally from its definition.
pub fn oracle_solve(game: &Game, limits: &OracleLimits) -> Result<(LocalSolution, Partition), OracleError> {
    let tree = &game.tree;
    require_simple(tree)?;
    if tree.len() > limits.max_nodes {
        return Err(OracleError::TooLarge {
            what: "node count",
            size: tree.len() as u128,
            limit: limits.max_nodes as u128,
        });
    }
    if tree.player_count() > limits.max_players {
        return Err(OracleError::TooLarge {
            what: "player count",
            size: tree.player_count() as u128,
            limit: limits.max_players as u128,
        });
    }
    Ok(oracle_solution_at(game, tree.root()))
}

fn oracle_solution_at(game: &Game, x: NodeId) -> (LocalSolution, Partition) {
    let tree = &game.tree;
    let n = tree.player_count();
    let singletons: Players = (0..n).map(|i| vec![i]).collect();
    let lit = literal_ri(game, x, &singletons);
    let mut profile = StrategyProfile::new();
    let mut partitions = BTreeMap::new();
    for (y, a) in &lit.actions {
        let part = to_partition(n, &lit.partitions[y]);
        let owner = part.block_of(tree.node(*y).player().expect("decision"));
        profile.insert(tree.node(*y).info_set().expect("decision"), Move { owner, choice: Choice::Pure(*a) });
        partitions.insert(*y, part);
    }
    let root_partition = partitions.get(&x).cloned().unwrap_or_else(|| Partition::singletons(n));
    (LocalSolution { root: x, profile, partitions, outcome: Outcome::pure(lit.terminal) }, root_partition)
}

/// FNV-1a over the canonical game text.
pub fn game_digest(game: &Game) -> String {
    let text = serialize_game(&GameSpec::from_game(game));
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    format!("{h:016x}")
}

/// A solver under test: the root outcome and root partition.
pub type SolverFn<'a> = dyn Fn(&Game) -> Result<(Vec<f64>, Partition), SolveError> + 'a;

/// Runs recursive induction and the oracle and compares root outcome and
/// partition. On a mismatch, locates the first subgame (bottom-up) whose
/// standalone solutions differ.
pub fn equivalence_check(game: &Game, limits: &OracleLimits) -> Result<OracleReport, OracleError> {
    let profile = crate::ri::solve_ri(game)?;
    let tree = &game.tree;
    let solver = |_: &Game| {
        let part = profile.root_partition().cloned().unwrap_or_else(|| Partition::singletons(tree.player_count()));
        Ok((profile.root_entry.payoffs(tree), part))
    };
    let mut report = equivalence_check_with(game, limits, &solver)?;
    if !report.matched {
        for x in tree.bottom_up_order().into_iter().filter(|&x| !tree.node(x).is_terminal()) {
            let (oracle, oracle_part) = oracle_solution_at(game, x);
            let entry = profile.entry(x, x).expect("every decision node roots a subgame");
            let kind = if entry.outcome != oracle.outcome {
                "outcome"
            } else if entry.root_partition() != Some(&oracle_part) {
                "partition"
            } else {
                continue;
            };
            report.divergence = Some(Divergence { node: tree.node(x).name.clone(), kind: kind.into() });
            break;
        }
    }
    Ok(report)
}

/// [`equivalence_check`] against an arbitrary solver; a divergence is
/// reported at the root.
pub fn equivalence_check_with(
    game: &Game,
    limits: &OracleLimits,
    solver: &SolverFn,
) -> Result<OracleReport, OracleError> {
    let (oracle, oracle_part) = oracle_solve(game, limits)?;
    let (solver_outcome, solver_part) = solver(game)?;
    let oracle_outcome = oracle.payoffs(&game.tree);
    let same_outcome = solver_outcome == oracle_outcome;
    let matched = same_outcome && solver_part == oracle_part;
    let divergence = (!matched).then(|| Divergence {
        node: game.tree.node(game.tree.root()).name.clone(),
        kind: if same_outcome { "partition" } else { "outcome" }.into(),
    });
    Ok(OracleReport {
        digest: game_digest(game),
        solver_outcome,
        oracle_outcome,
        solver_partition: solver_part.to_string(),
        oracle_partition: oracle_part.to_string(),
        matched,
        divergence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::fixtures;

    fn c(members: &[usize]) -> Coalition {
        Coalition::from_players(members.iter().map(|&m| Player(m - 1))).unwrap()
    }

    #[test]
    fn oracle_bi_on_fixtures() {
        let limits = OracleLimits::default();
        let game = fixtures::abortion();
        assert_eq!(oracle_bi(&game.standalone(), &limits).unwrap().payoffs(&game.tree), vec![3.0, 2.0, 1.0]);
        let game = fixtures::example2();
        assert_eq!(oracle_bi(&game.standalone(), &limits).unwrap().payoffs(&game.tree), vec![5.0, 5.0, 3.0]);
    }

    #[test]
    fn oracle_bi_single_node() {
        let text = r#"{"format_version":1,"players":["a"],"root":"r",
            "nodes":{"r":{"player":1,"actions":{"x":"z1","y":"z2"}},"z1":{"payoffs":[1]},"z2":{"payoffs":[4]}}}"#;
        let game = crate::io::validate_game(&crate::io::parse_game(text).unwrap()).unwrap();
        let sol = oracle_bi(&game.standalone(), &OracleLimits::default()).unwrap();
        assert_eq!(sol.payoffs(&game.tree), vec![4.0]);
    }

    #[test]
    fn oracle_bi_guards_size() {
        let limits = OracleLimits { max_profiles: 10, ..OracleLimits::default() };
        let game = fixtures::example2();
        assert!(matches!(oracle_bi(&game.standalone(), &limits), Err(OracleError::TooLarge { .. })));
        let game = fixtures::prisoners_dilemma();
        assert_eq!(oracle_bi(&game.standalone(), &OracleLimits::default()), Err(OracleError::Unsupported));
    }

    #[test]
    fn oracle_solve_on_fixtures() {
        let limits = OracleLimits::default();
        let game = fixtures::example2();
        let (sol, part) = oracle_solve(&game, &limits).unwrap();
        assert_eq!(sol.payoffs(&game.tree), vec![6.0, 3.0, 5.0]);
        assert_eq!(part, Partition::merged(3, c(&[1, 3])));
        let game = fixtures::example2_modified();
        let (sol, part) = oracle_solve(&game, &limits).unwrap();
        assert_eq!(sol.payoffs(&game.tree), vec![5.0, 5.0, 3.0]);
        assert_eq!(part, Partition::merged(3, c(&[1, 2])));
        let game = fixtures::abortion();
        let (sol, part) = oracle_solve(&game, &limits).unwrap();
        assert_eq!(sol.payoffs(&game.tree), vec![2.0, 4.0, 3.0]);
        assert_eq!(part, Partition::singletons(3));
    }

    #[test]
    fn singleton_oracle_equals_oracle_bi() {
        let limits = OracleLimits::default();
        for game in [fixtures::abortion(), fixtures::example2(), fixtures::example2_modified()] {
            let game = game.noncooperative();
            let (sol, _) = oracle_solve(&game, &limits).unwrap();
            assert_eq!(sol.outcome, oracle_bi(&game.standalone(), &limits).unwrap().outcome);
        }
    }

    #[test]
    fn fixtures_match() {
        for game in [fixtures::abortion(), fixtures::example2(), fixtures::example2_modified()] {
            let report = equivalence_check(&game, &OracleLimits::default()).unwrap();
            assert!(report.matched, "{report}");
            assert_eq!(report.divergence, None);
        }
    }

    #[test]
    fn corrupted_solver_is_caught() {
        let game = fixtures::example2();
        let stub = |g: &Game| {
            let z = g.tree.node_by_name("z1").unwrap();
            Ok((g.tree.payoffs(z).to_vec(), Partition::singletons(3)))
        };
        let report = equivalence_check_with(&game, &OracleLimits::default(), &stub).unwrap();
        assert!(!report.matched);
        assert_eq!(report.divergence, Some(Divergence { node: "x7".into(), kind: "outcome".into() }));
        let stub = |g: &Game| Ok((vec![6.0, 3.0, 5.0], Partition::singletons(g.player_count())));
        let report = equivalence_check_with(&game, &OracleLimits::default(), &stub).unwrap();
        assert_eq!(report.divergence.unwrap().kind, "partition");
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(game_digest(&fixtures::example2()), game_digest(&fixtures::example2()));
        assert_ne!(game_digest(&fixtures::example2()), game_digest(&fixtures::example2_modified()));
    }
}
