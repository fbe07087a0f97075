//! Conversion between the file format and the validated game model.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::spec::{
    CoalitionSpec, CombinatorName, FeasibleSpec, GameSpec, NodeSpec, OrderedMap, SynergySpec, UtilitySpec,
    FORMAT_VERSION,
};
use crate::model::{
    Action, Coalition, Combinator, Feasibility, Game, GameTree, InfoSet, InfoSetId, Node, NodeId, NodeKind, Player,
    Synergy, TreeParts, UtilitySystem, ValidationError, Violation,
};

/// Checks every structural invariant and builds the game.
///
/// All violations found are reported together.
pub fn validate_game(spec: &GameSpec) -> Result<Game, ValidationError> {
    let mut violations = Vec::new();
    let n = spec.players.len();

    let ids: HashMap<&str, NodeId> = spec.nodes.keys().enumerate().map(|(k, name)| (name, NodeId(k))).collect();
    let lookup = |name: &str, violations: &mut Vec<Violation>| -> Option<NodeId> {
        let id = ids.get(name).copied();
        if id.is_none() {
            violations.push(Violation::UnknownNode(name.to_string()));
        }
        id
    };

    let root = match lookup(&spec.root, &mut violations) {
        Some(r) => r,
        None => return Err(ValidationError(violations)),
    };

    // Information sets: declared ones first, then one per remaining node.
    let mut info_of: HashMap<NodeId, InfoSetId> = HashMap::new();
    let mut info_sets: Vec<InfoSet> = Vec::new();
    if let Some(declared) = &spec.info_sets {
        for (name, members) in declared.iter() {
            let id = InfoSetId(info_sets.len());
            let mut nodes = Vec::new();
            for m in members {
                let Some(x) = lookup(m, &mut violations) else { continue };
                if info_of.insert(x, id).is_some() || nodes.contains(&x) {
                    violations.push(Violation::InfoSetOverlap(m.clone()));
                    continue;
                }
                nodes.push(x);
            }
            if nodes.is_empty() {
                violations.push(Violation::MalformedNode(name.to_string(), "empty information set".into()));
                continue;
            }
            let player = spec.nodes.0[nodes[0].0].1.player.unwrap_or(0);
            info_sets.push(InfoSet { id, name: name.to_string(), player: Player(player.wrapping_sub(1)), nodes });
        }
    }

    let mut nodes = Vec::with_capacity(spec.nodes.len());
    for (k, (name, ns)) in spec.nodes.0.iter().enumerate() {
        let id = NodeId(k);
        let kind = match (&ns.actions, &ns.payoffs) {
            (Some(_), Some(_)) => {
                violations.push(Violation::MalformedNode(name.clone(), "has both actions and payoffs".into()));
                continue;
            }
            (None, None) => {
                violations.push(Violation::MalformedNode(name.clone(), "has neither actions nor payoffs".into()));
                continue;
            }
            (None, Some(payoffs)) => {
                if ns.player.is_some() {
                    violations.push(Violation::MalformedNode(name.clone(), "terminal names a player".into()));
                }
                NodeKind::Terminal { payoffs: payoffs.clone() }
            }
            (Some(acts), None) => {
                let mut actions = Vec::with_capacity(acts.len());
                for (label, child) in acts.iter() {
                    if let Some(c) = lookup(child, &mut violations) {
                        actions.push(Action { label: label.to_string(), child: c });
                    }
                }
                match ns.player {
                    Some(p) => {
                        if p == 0 || p > n {
                            violations.push(Violation::UnknownPlayer { node: name.clone(), player: p });
                            continue;
                        }
                        let info_set = *info_of.entry(id).or_insert_with(|| {
                            let h = InfoSetId(info_sets.len());
                            info_sets.push(InfoSet {
                                id: h,
                                name: name.clone(),
                                player: Player(p - 1),
                                nodes: vec![id],
                            });
                            h
                        });
                        NodeKind::Decision { player: Player(p - 1), info_set, actions }
                    }
                    None => match &spec.chance {
                        Some(probs) if id == root => {
                            let mut probabilities = Vec::with_capacity(actions.len());
                            for (_, child) in acts.iter() {
                                match probs.get(child) {
                                    Some(p) => probabilities.push(*p),
                                    None => violations.push(Violation::BadChanceDistribution),
                                }
                            }
                            if probs.len() != acts.len() {
                                violations.push(Violation::BadChanceDistribution);
                            }
                            NodeKind::Chance { actions, probabilities }
                        }
                        Some(_) => {
                            violations.push(Violation::ChanceOffRoot(name.clone()));
                            continue;
                        }
                        None => {
                            violations
                                .push(Violation::MalformedNode(name.clone(), "decision node names no player".into()));
                            continue;
                        }
                    },
                }
            }
        };
        nodes.push(Node { id, name: name.clone(), kind });
    }
    if spec.chance.is_some() && !nodes.iter().any(|x| x.id == root && x.is_chance()) {
        violations.push(Violation::BadChanceDistribution);
    }
    for h in &info_sets {
        if h.nodes.iter().any(|x| spec.nodes.0[x.0].1.actions.is_none() || spec.nodes.0[x.0].1.player.is_none()) {
            violations.push(Violation::InfoSetPlayerMismatch(h.name.clone()));
        }
    }
    if !violations.is_empty() {
        return Err(ValidationError(violations));
    }

    let tree = GameTree::build(TreeParts { players: spec.players.clone(), nodes, root, info_sets })
        .map_err(ValidationError)?;
    let utility = build_utility(&tree, &spec.coalitions, &spec.synergies, &ids).map_err(ValidationError)?;
    Ok(Game { tree, utility })
}

fn parse_coalition(members: &[usize], n: usize, violations: &mut Vec<Violation>) -> Option<Coalition> {
    if members.is_empty() || members.iter().any(|&m| m == 0 || m > n) {
        violations.push(Violation::BadUtility(format!("coalition {members:?} is empty or names unknown players")));
        return None;
    }
    Coalition::from_players(members.iter().map(|&m| Player(m - 1)))
}

fn coalition_key(key: &str, n: usize, violations: &mut Vec<Violation>) -> Option<Coalition> {
    let members: Result<Vec<usize>, _> = key.split(',').map(|s| s.trim().parse::<usize>()).collect();
    match members {
        Ok(m) => parse_coalition(&m, n, violations),
        Err(_) => {
            violations.push(Violation::BadUtility(format!("malformed coalition key {key:?}")));
            None
        }
    }
}

fn build_utility(
    tree: &GameTree,
    spec: &CoalitionSpec,
    synergies: &[SynergySpec],
    ids: &HashMap<&str, NodeId>,
) -> Result<UtilitySystem, Vec<Violation>> {
    let n = tree.player_count();
    let mut violations = Vec::new();

    let feasibility = match &spec.feasible {
        FeasibleSpec::All => Feasibility::All,
        FeasibleSpec::Listed(list) => Feasibility::Listed(
            list.iter().filter_map(|m| parse_coalition(m, n, &mut violations)).collect::<BTreeSet<_>>(),
        ),
    };

    let combinator = match (spec.utility.combinator, &spec.utility.weights) {
        (Some(CombinatorName::Min), None) => Some(Combinator::Min),
        (Some(CombinatorName::Sum), None) => Some(Combinator::Sum),
        (Some(CombinatorName::Weighted), Some(w)) => Some(Combinator::Weighted(w.clone())),
        (Some(CombinatorName::Weighted), None) => {
            violations.push(Violation::BadUtility("weighted combinator needs weights".into()));
            None
        }
        (_, Some(_)) => {
            violations.push(Violation::BadUtility("weights given without the weighted combinator".into()));
            None
        }
        (None, None) => None,
    };

    let mut tables = BTreeMap::new();
    if let Some(table) = &spec.utility.table {
        for (key, values) in table.iter() {
            let Some(c) = coalition_key(key, n, &mut violations) else { continue };
            let mut row = BTreeMap::new();
            for (z, v) in values.iter() {
                match ids.get(z) {
                    Some(&id) if v.is_finite() => {
                        row.insert(id, *v);
                    }
                    Some(_) => violations.push(Violation::BadUtility(format!("non-finite value for {key} at {z}"))),
                    None => violations.push(Violation::UnknownNode(z.to_string())),
                }
            }
            tables.insert(c, row);
        }
    }

    let mut syn = Vec::new();
    for s in synergies {
        let Some(block) = parse_coalition(&s.block, n, &mut violations) else { continue };
        if s.player == 0 || s.player > n {
            violations.push(Violation::BadSynergy(format!("unknown player {}", s.player)));
            continue;
        }
        let Some(&terminal) = ids.get(s.terminal.as_str()) else {
            violations.push(Violation::UnknownNode(s.terminal.clone()));
            continue;
        };
        if !s.value.is_finite() {
            violations.push(Violation::BadSynergy(format!("non-finite value at {}", s.terminal)));
            continue;
        }
        syn.push(Synergy { player: Player(s.player - 1), block, terminal, value: s.value });
    }

    if !violations.is_empty() {
        return Err(violations);
    }
    UtilitySystem::new(tree, feasibility, combinator, tables, syn)
}

fn members(c: Coalition) -> Vec<usize> {
    c.members().map(Player::number).collect()
}

fn key_of(c: Coalition) -> String {
    members(c).iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",")
}

impl GameSpec {
    /// The file form of a validated game. Parsing and validating the result
    /// gives back an equal game.
    pub fn from_game(game: &Game) -> GameSpec {
        let tree = &game.tree;
        let name = |x: NodeId| tree.node(x).name.clone();
        let nodes = tree
            .nodes()
            .iter()
            .map(|node| {
                let ns = match &node.kind {
                    NodeKind::Terminal { payoffs } => {
                        NodeSpec { payoffs: Some(payoffs.clone()), ..NodeSpec::default() }
                    }
                    NodeKind::Decision { player, actions, .. } => NodeSpec {
                        player: Some(player.number()),
                        actions: Some(OrderedMap(actions.iter().map(|a| (a.label.clone(), name(a.child))).collect())),
                        payoffs: None,
                    },
                    NodeKind::Chance { actions, .. } => NodeSpec {
                        actions: Some(OrderedMap(actions.iter().map(|a| (a.label.clone(), name(a.child))).collect())),
                        ..NodeSpec::default()
                    },
                };
                (node.name.clone(), ns)
            })
            .collect();

        let chance = match &tree.node(tree.root()).kind {
            NodeKind::Chance { actions, probabilities } => {
                Some(OrderedMap(actions.iter().zip(probabilities).map(|(a, p)| (name(a.child), *p)).collect()))
            }
            _ => None,
        };
        let declared: Vec<(String, Vec<String>)> = tree
            .info_sets()
            .iter()
            .filter(|h| !h.is_singleton())
            .map(|h| (h.name.clone(), h.nodes.iter().map(|&x| name(x)).collect()))
            .collect();

        let u = &game.utility;
        let feasible = match u.feasibility() {
            Feasibility::All => FeasibleSpec::All,
            Feasibility::Listed(list) => FeasibleSpec::Listed(list.iter().map(|&c| members(c)).collect()),
        };
        let (combinator, weights) = match u.combinator() {
            Some(Combinator::Min) => (Some(CombinatorName::Min), None),
            Some(Combinator::Sum) => (Some(CombinatorName::Sum), None),
            Some(Combinator::Weighted(w)) => (Some(CombinatorName::Weighted), Some(w.clone())),
            None => (None, None),
        };
        let table = (!u.tables().is_empty()).then(|| {
            OrderedMap(
                u.tables()
                    .iter()
                    .map(|(&c, row)| (key_of(c), OrderedMap(row.iter().map(|(&z, &v)| (name(z), v)).collect())))
                    .collect(),
            )
        });
        let synergies = u
            .synergies()
            .iter()
            .map(|s| SynergySpec {
                player: s.player.number(),
                block: members(s.block),
                terminal: name(s.terminal),
                value: s.value,
            })
            .collect();

        GameSpec {
            format_version: FORMAT_VERSION,
            players: tree.players().to_vec(),
            root: name(tree.root()),
            nodes: OrderedMap(nodes),
            chance,
            info_sets: (!declared.is_empty()).then_some(OrderedMap(declared)),
            coalitions: CoalitionSpec { feasible, utility: UtilitySpec { combinator, weights, table } },
            synergies,
        }
    }
}
