//! Browser bindings. Every export takes game text and returns a JSON
//! document; failures are reported as `{"error": "..."}`.

use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

use coalitional::io::fixtures::BUNDLED;
use coalitional::io::trace::baseline;
use coalitional::io::{
    parse_game, render_solution, render_trace, serialize_game, summary_bracket, validate_game, GameSpec, Verbosity,
};
use coalitional::model::{Game, GameTree, NodeKind};
use coalitional::noncoop::LocalSolution;
use coalitional::oracle::{equivalence_check, OracleLimits};
use coalitional::random::{random_game, RandomGameConfig};
use coalitional::ri::solve;

#[derive(Serialize)]
struct NodeView {
    id: usize,
    name: String,
    x: f64,
    depth: usize,
    /// Mover's name, `chance`, or empty for terminals.
    mover: String,
    payoffs: Option<Vec<f64>>,
    /// Members of the mover's block when it is a coalition.
    block: Option<Vec<usize>>,
}

#[derive(Serialize)]
struct EdgeView {
    from: usize,
    to: usize,
    label: String,
    /// `dashed`, `bold`, or `idle` for actions not taken.
    style: &'static str,
}

#[derive(Serialize)]
struct SolutionView {
    outcome: Vec<f64>,
    partition: String,
    summary: String,
    nodes: Vec<NodeView>,
    edges: Vec<EdgeView>,
}

fn load(text: &str) -> Result<Game, String> {
    let spec = parse_game(text).map_err(|e| e.to_string())?;
    validate_game(&spec).map_err(|e| e.to_string())
}

/// Leaves spaced one unit apart left to right; parents centered above
/// their children.
fn layout(tree: &GameTree) -> Vec<f64> {
    let mut x = vec![0.0; tree.len()];
    let mut next = 0.0;
    fn place(tree: &GameTree, id: coalitional::NodeId, x: &mut [f64], next: &mut f64) {
        let children: Vec<_> = tree.node(id).actions().iter().map(|a| a.child).collect();
        if children.is_empty() {
            x[id.0] = *next;
            *next += 1.0;
            return;
        }
        for &c in &children {
            place(tree, c, x, next);
        }
        x[id.0] = children.iter().map(|c| x[c.0]).sum::<f64>() / children.len() as f64;
    }
    place(tree, tree.root(), &mut x, &mut next);
    x
}

fn view(game: &Game, sol: &LocalSolution) -> SolutionView {
    let tree = &game.tree;
    let x = layout(tree);
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for node in tree.nodes() {
        let block = node
            .player()
            .and_then(|p| sol.partitions.get(&node.id).map(|part| part.block_of(p)))
            .filter(|b| !b.is_singleton());
        let mover = match &node.kind {
            NodeKind::Decision { player, .. } => tree.players()[player.index()].clone(),
            NodeKind::Chance { .. } => "chance".into(),
            NodeKind::Terminal { .. } => String::new(),
        };
        nodes.push(NodeView {
            id: node.id.0,
            name: node.name.clone(),
            x: x[node.id.0],
            depth: tree.depth(node.id),
            mover,
            payoffs: node.payoffs().map(<[f64]>::to_vec),
            block: block.map(|b| b.members().map(|p| p.number()).collect()),
        });
        let chosen = node.info_set().and_then(|h| sol.profile.get(h));
        for (k, a) in node.actions().iter().enumerate() {
            let style = match chosen.map(|m| m.choice.probability(k)) {
                Some(q) if q > 0.0 && block.is_some() => "bold",
                Some(q) if q > 0.0 => "dashed",
                _ => "idle",
            };
            edges.push(EdgeView { from: node.id.0, to: a.child.0, label: a.label.clone(), style });
        }
    }
    SolutionView {
        outcome: sol.payoffs(tree),
        partition: sol.root_partition().map(|p| p.to_string()).unwrap_or_else(|| "chance".into()),
        summary: summary_bracket(tree, sol),
        nodes,
        edges,
    }
}

/// Recursive induction and the noncooperative baseline side by side, with
/// the trace and the complete solution listing.
pub fn analyze_json(text: &str) -> String {
    let result = (|| -> Result<serde_json::Value, String> {
        let game = load(text)?;
        let profile = solve(&game).map_err(|e| e.to_string())?;
        let bi = baseline(&game).map_err(|e| e.to_string())?;
        Ok(json!({
            "players": game.tree.players(),
            "ri": view(&game, &profile.root_entry),
            "bi": view(&game, &bi),
            "trace": render_trace(&game, &profile, Verbosity::Summary),
            "solution": render_solution(&game, &profile),
        }))
    })();
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

/// Solver against the brute-force oracle.
pub fn oracle_check_json(text: &str) -> String {
    let result =
        load(text).and_then(|game| equivalence_check(&game, &OracleLimits::default()).map_err(|e| e.to_string()));
    match result {
        Ok(report) => serde_json::to_string(&report).expect("plain data serializes"),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

/// A random three-player game in the file format.
pub fn random_game_text(seed: u32) -> String {
    let game = random_game(u64::from(seed), &RandomGameConfig::default());
    serialize_game(&GameSpec::from_game(&game))
}

/// Names of the bundled fixtures.
pub fn fixture_names() -> Vec<String> {
    BUNDLED.iter().map(|(name, _)| name.to_string()).collect()
}

/// Text of a bundled fixture, or an empty string.
pub fn fixture_text(name: &str) -> String {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| t.to_string()).unwrap_or_default()
}

#[wasm_bindgen]
pub fn analyze(text: &str) -> String {
    analyze_json(text)
}

#[wasm_bindgen]
pub fn oracle_check(text: &str) -> String {
    oracle_check_json(text)
}

#[wasm_bindgen]
pub fn random_game_spec(seed: u32) -> String {
    random_game_text(seed)
}

#[wasm_bindgen]
pub fn fixtures() -> String {
    json!(fixture_names()).to_string()
}

#[wasm_bindgen]
pub fn fixture(name: &str) -> String {
    fixture_text(name)
}
