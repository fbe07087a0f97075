//! Seeded random perfect-information games for property tests and the
//! `oracle-check --random` workflow.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::io::spec::{CoalitionSpec, GameSpec, NodeSpec, OrderedMap, FORMAT_VERSION};
use crate::io::validate_game;
use crate::model::Game;

#[derive(Clone, Debug, PartialEq)]
pub struct RandomGameConfig {
    /// Players are drawn from `1..=max_players`.
    pub max_players: usize,
    /// Longest root-to-terminal path, in moves.
    pub max_depth: usize,
    pub max_nodes: usize,
    /// Actions per decision node are drawn from `2..=max_actions`.
    pub max_actions: usize,
    /// When false only singleton coalitions are feasible.
    pub coalitions: bool,
}

impl Default for RandomGameConfig {
    fn default() -> Self {
        RandomGameConfig { max_players: 3, max_depth: 4, max_nodes: 15, max_actions: 3, coalitions: true }
    }
}

/// A random game. Each player's payoffs are distinct across terminals, so
/// no singleton comparison ever ties. Coalitions use the `min` combinator.
pub fn random_game(seed: u64, config: &RandomGameConfig) -> Game {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let players = rng.random_range(1..=config.max_players.max(1));
    let max_nodes = config.max_nodes.max(3);

    // Grow the tree breadth-first within the node budget.
    struct Proto {
        player: usize,
        children: Vec<usize>,
        depth: usize,
    }
    let mut nodes = vec![Proto { player: 0, children: Vec::new(), depth: 0 }];
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        let depth = nodes[x].depth;
        let remaining = max_nodes - nodes.len();
        let wants_children = x == 0 || (depth < config.max_depth && rng.random_bool(0.6));
        if !wants_children || remaining < 2 || depth >= config.max_depth {
            continue;
        }
        let k = rng.random_range(2..=config.max_actions.max(2)).min(remaining);
        nodes[x].player = rng.random_range(1..=players);
        for _ in 0..k {
            let id = nodes.len();
            nodes.push(Proto { player: 0, children: Vec::new(), depth: depth + 1 });
            nodes[x].children.push(id);
            queue.push_back(id);
        }
    }

    let terminals: Vec<usize> = (0..nodes.len()).filter(|&x| nodes[x].children.is_empty()).collect();
    let mut payoffs = vec![vec![0.0; players]; nodes.len()];
    let columns: Vec<Vec<usize>> = (0..players)
        .map(|_| {
            let mut values: Vec<usize> = (1..=terminals.len()).collect();
            values.shuffle(&mut rng);
            values
        })
        .collect();
    for (k, &z) in terminals.iter().enumerate() {
        payoffs[z] = columns.iter().map(|c| c[k] as f64).collect();
    }

    let names: Vec<String> = (0..nodes.len())
        .map(|x| if nodes[x].children.is_empty() { format!("z{x}") } else { format!("x{x}") })
        .collect();
    let specs = nodes
        .iter()
        .enumerate()
        .map(|(x, proto)| {
            let spec = if proto.children.is_empty() {
                NodeSpec { payoffs: Some(payoffs[x].clone()), ..NodeSpec::default() }
            } else {
                let actions =
                    proto.children.iter().enumerate().map(|(k, c)| (format!("a{x}_{k}"), names[*c].clone())).collect();
                NodeSpec { player: Some(proto.player), actions: Some(OrderedMap(actions)), payoffs: None }
            };
            (names[x].clone(), spec)
        })
        .collect();

    let mut coalitions = CoalitionSpec::default();
    if !config.coalitions {
        coalitions.feasible = crate::io::spec::FeasibleSpec::Listed(Vec::new());
    }
    let spec = GameSpec {
        format_version: FORMAT_VERSION,
        players: (1..=players).map(|p| p.to_string()).collect(),
        root: names[0].clone(),
        nodes: OrderedMap(specs),
        chance: None,
        info_sets: None,
        coalitions,
        synergies: Vec::new(),
    };
    validate_game(&spec).expect("generated games are valid")
}
