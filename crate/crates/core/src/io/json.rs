//! Deterministic JSON for solutions. Nodes are referred to by name and
//! players by their 1-based number.

use serde::Serialize;

use crate::io::trace::summary_bracket;
use crate::model::{Coalition, Game, GameTree, Partition};
use crate::noncoop::{Choice, LocalSolution};
use crate::ri::SolutionProfile;

#[derive(Serialize)]
struct MoveJson {
    node: String,
    player: usize,
    owner: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    action: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mixed: Option<Vec<(String, f64)>>,
}

#[derive(Serialize)]
struct SolutionJson {
    root: String,
    outcome: Vec<f64>,
    terminals: Vec<(String, f64)>,
    summary: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    partition: Option<Vec<Vec<usize>>>,
    moves: Vec<MoveJson>,
}

#[derive(Serialize)]
struct EntryJson {
    context: String,
    subgame: String,
    solution: SolutionJson,
}

#[derive(Serialize)]
struct StepJson {
    node: String,
    context: Vec<Vec<usize>>,
    kind: String,
    coalition: Vec<usize>,
    block: Vec<usize>,
    outcome: Vec<f64>,
    values: Vec<f64>,
    active_value: f64,
    reason: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    agent: Option<usize>,
}

#[derive(Serialize)]
struct ProfileJson {
    players: Vec<String>,
    root: SolutionJson,
    entries: Vec<EntryJson>,
    trace: Vec<StepJson>,
}

fn coalition(c: Coalition) -> Vec<usize> {
    c.members().map(|p| p.number()).collect()
}

fn partition(p: &Partition) -> Vec<Vec<usize>> {
    p.blocks().iter().map(|b| coalition(*b)).collect()
}

fn solution(tree: &GameTree, sol: &LocalSolution) -> SolutionJson {
    let mut moves = Vec::new();
    for x in tree.level_order(sol.root) {
        let node = tree.node(x);
        let (Some(player), Some(h)) = (node.player(), node.info_set()) else { continue };
        let Some(m) = sol.profile.get(h) else { continue };
        let (action, mixed) = match &m.choice {
            Choice::Pure(a) => (Some(node.actions()[*a].label.clone()), None),
            Choice::Mixed(p) => {
                (None, Some(node.actions().iter().zip(p).map(|(a, q)| (a.label.clone(), *q)).collect()))
            }
        };
        let owner = sol.partitions.get(&x).map_or(Coalition::singleton(player), |p| p.block_of(player));
        moves.push(MoveJson {
            node: node.name.clone(),
            player: player.number(),
            owner: coalition(owner),
            action,
            mixed,
        });
    }
    SolutionJson {
        root: tree.node(sol.root).name.clone(),
        outcome: sol.payoffs(tree),
        terminals: sol.outcome.support().iter().map(|(z, p)| (tree.node(*z).name.clone(), *p)).collect(),
        summary: summary_bracket(tree, sol),
        partition: sol.root_partition().map(partition),
        moves,
    }
}

/// The root solution, every `(context, subgame)` entry in node order, and
/// the full step trace.
pub fn profile_json(game: &Game, profile: &SolutionProfile) -> String {
    let tree = &game.tree;
    let doc = ProfileJson {
        players: tree.players().to_vec(),
        root: solution(tree, &profile.root_entry),
        entries: profile
            .entries
            .iter()
            .map(|((h, g), sol)| EntryJson {
                context: tree.node(*h).name.clone(),
                subgame: tree.node(*g).name.clone(),
                solution: solution(tree, sol),
            })
            .collect(),
        trace: profile
            .trace
            .iter()
            .map(|s| StepJson {
                node: tree.node(s.node).name.clone(),
                context: partition(&s.context),
                kind: s.kind.to_string(),
                coalition: coalition(s.coalition),
                block: coalition(s.block),
                outcome: s.outcome.clone(),
                values: s.values.clone(),
                active_value: s.active_value,
                reason: s.reason.clone(),
                agent: s.agent.map(|a| a.number()),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("plain data serializes")
}

/// Pretty JSON for any serializable value.
pub fn to_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

/// A single solution, e.g. the backward-induction baseline.
pub fn solution_json(game: &Game, sol: &LocalSolution) -> String {
    serde_json::to_string_pretty(&solution(&game.tree, sol)).expect("plain data serializes")
}
