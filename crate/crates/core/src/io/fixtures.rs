//! Bundled example games and small generated families used by tests and
//! the command-line tool.

use super::spec::{parse_game, CoalitionSpec, GameSpec, NodeSpec, OrderedMap, FORMAT_VERSION};
use super::validate::validate_game;
use crate::model::Game;

pub const ABORTION: &str = include_str!("../../../../fixtures/abortion.game");
pub const EXAMPLE2: &str = include_str!("../../../../fixtures/example2.game");
pub const EXAMPLE2_MODIFIED: &str = include_str!("../../../../fixtures/example2-modified.game");
pub const PRISONERS_DILEMMA: &str = include_str!("../../../../fixtures/prisoners-dilemma.game");
pub const MATCHING_PENNIES: &str = include_str!("../../../../fixtures/matching-pennies.game");

/// Bundled fixtures by file name.
pub const BUNDLED: [(&str, &str); 5] = [
    ("abortion.game", ABORTION),
    ("example2.game", EXAMPLE2),
    ("example2-modified.game", EXAMPLE2_MODIFIED),
    ("prisoners-dilemma.game", PRISONERS_DILEMMA),
    ("matching-pennies.game", MATCHING_PENNIES),
];

fn load(text: &str) -> Game {
    validate_game(&parse_game(text).expect("bundled fixture parses")).expect("bundled fixture is valid")
}

/// Three-player abortion game: government, individual, clinic.
pub fn abortion() -> Game {
    load(ABORTION)
}

/// Three-player, depth-three binary tree with eight terminals.
pub fn example2() -> Game {
    load(EXAMPLE2)
}

/// [`example2`] with the payoff after `R, c, i` changed to `(3, 4, 3)`.
pub fn example2_modified() -> Game {
    load(EXAMPLE2_MODIFIED)
}

fn decision(player: usize, actions: &[(&str, &str)]) -> NodeSpec {
    NodeSpec {
        player: Some(player),
        actions: Some(OrderedMap(actions.iter().map(|(a, c)| (a.to_string(), c.to_string())).collect())),
        payoffs: None,
    }
}

fn terminal(payoffs: &[f64]) -> NodeSpec {
    NodeSpec { payoffs: Some(payoffs.to_vec()), ..NodeSpec::default() }
}

fn spec(players: usize, root: &str, nodes: Vec<(String, NodeSpec)>) -> GameSpec {
    GameSpec {
        format_version: FORMAT_VERSION,
        players: (1..=players).map(|p| p.to_string()).collect(),
        root: root.to_string(),
        nodes: OrderedMap(nodes),
        chance: None,
        info_sets: None,
        coalitions: CoalitionSpec::default(),
        synergies: Vec::new(),
    }
}

/// `n` players moving in turn along a spine. At each node the mover either
/// stops (`s`) or continues (`c`); continuing past the last mover ends play.
pub fn chain_game(n: usize) -> Game {
    let mut nodes = Vec::new();
    for k in 1..=n {
        let next = if k == n { "end".to_string() } else { format!("v{}", k + 1) };
        let stop = format!("s{k}");
        nodes.push((format!("v{k}"), decision(k, &[("s", &stop), ("c", &next)])));
        let payoffs: Vec<f64> = (1..=n).map(|i| ((i * 7 + k * 3) % (n + 3)) as f64).collect();
        nodes.push((stop, terminal(&payoffs)));
    }
    let payoffs: Vec<f64> = (1..=n).map(|i| ((i * 5 + 1) % (n + 2)) as f64).collect();
    nodes.push(("end".to_string(), terminal(&payoffs)));
    validate_game(&spec(n, "v1", nodes)).expect("chain game is valid")
}

/// Simultaneous prisoner's dilemma: player 2 does not observe player 1.
pub fn prisoners_dilemma() -> Game {
    load(PRISONERS_DILEMMA)
}

/// Player 1 may opt out for `(-0.5, 0.5)` or play matching pennies, where
/// player 2 does not observe player 1's coin.
pub fn matching_pennies() -> Game {
    load(MATCHING_PENNIES)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abortion_shape() {
        let g = abortion();
        assert_eq!(g.player_count(), 3);
        assert_eq!(g.tree.terminals().count(), 6);
        assert_eq!(g.utility.combinator(), Some(&crate::model::Combinator::Min));
    }

    #[test]
    fn example2_payoffs() {
        let g = example2();
        let payoffs: Vec<Vec<f64>> = g.tree.terminals().map(|z| g.tree.payoffs(z).to_vec()).collect();
        let expected = [
            [5.0, 5.0, 3.0],
            [2.0, 2.0, 1.0],
            [4.0, 4.0, 5.0],
            [1.0, 6.0, 4.0],
            [3.0, 1.0, 2.0],
            [2.0, 2.0, 6.0],
            [1.0, 1.0, 6.0],
            [6.0, 3.0, 5.0],
        ];
        assert_eq!(payoffs, expected.map(|p| p.to_vec()).to_vec());
    }

    #[test]
    fn generated_games_are_valid() {
        for n in 1..=8 {
            let g = chain_game(n);
            assert_eq!(g.player_count(), n);
            assert_eq!(g.tree.terminals().count(), n + 1);
        }
        assert!(!prisoners_dilemma().tree.is_perfect_information());
        let mp = matching_pennies();
        let s = mp.tree.node_by_name("s").unwrap();
        assert!(mp.tree.is_subgame_root(s));
        assert!(!mp.tree.is_subgame_root(mp.tree.node_by_name("th").unwrap()));
    }
}
