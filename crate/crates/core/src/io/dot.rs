//! Graphviz export. Chosen actions of players acting alone are dashed,
//! those of coalitions bold; coalition-owned nodes carry the block as an
//! external label.

use std::fmt::Write;

use crate::model::{format_payoffs, format_value, Coalition, GameTree, NodeKind};
use crate::noncoop::LocalSolution;
use crate::ri::SolutionProfile;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n"))
}

fn members(c: Coalition) -> String {
    c.members().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
}

/// DOT text for `tree`, styled by the adopted root solution when a profile
/// is given.
pub fn export_dot(tree: &GameTree, profile: Option<&SolutionProfile>) -> String {
    export_solution_dot(tree, profile.map(|p| &p.root_entry))
}

/// DOT text for `tree` styled by an arbitrary solution.
pub fn export_solution_dot(tree: &GameTree, sol: Option<&LocalSolution>) -> String {
    let mut out = String::from(
        "digraph game {\n  rankdir=TB;\n  node [fontname=\"Helvetica\"];\n  edge [fontname=\"Helvetica\"];\n",
    );
    for node in tree.nodes() {
        let id = node.id.0;
        let _ = match &node.kind {
            NodeKind::Terminal { payoffs } => {
                writeln!(out, "  n{id} [shape=plaintext, label={}];", quote(&format_payoffs(payoffs)))
            }
            NodeKind::Chance { .. } => writeln!(out, "  n{id} [shape=diamond, label={}];", quote(&node.name)),
            NodeKind::Decision { player, .. } => {
                let name = &tree.players()[player.index()];
                let label = quote(&format!("{}\n{}", node.name, name));
                let block = sol.and_then(|s| s.partitions.get(&node.id)).map(|p| p.block_of(*player));
                match block {
                    Some(b) if !b.is_singleton() => {
                        writeln!(out, "  n{id} [shape=circle, label={label}, xlabel={}];", quote(&members(b)))
                    }
                    _ => writeln!(out, "  n{id} [shape=circle, label={label}];"),
                }
            }
        };
    }
    for node in tree.nodes() {
        let id = node.id.0;
        let probabilities = match &node.kind {
            NodeKind::Chance { probabilities, .. } => Some(probabilities),
            _ => None,
        };
        let chosen = node.info_set().and_then(|h| sol.and_then(|s| s.profile.get(h)));
        let block =
            node.player().and_then(|p| sol.and_then(|s| s.partitions.get(&node.id)).map(|part| part.block_of(p)));
        for (k, a) in node.actions().iter().enumerate() {
            let mut label = a.label.clone();
            if let Some(ps) = probabilities {
                label = format!("{label} ({})", format_value(ps[k]));
            }
            let mut attrs = Vec::new();
            match chosen.map(|m| m.choice.probability(k)) {
                Some(q) if q > 0.0 => {
                    if q < 1.0 {
                        label = format!("{label} ({})", format_value(q));
                    }
                    match block {
                        Some(b) if !b.is_singleton() => attrs.push("style=bold, penwidth=2.5".to_string()),
                        _ => attrs.push("style=dashed".to_string()),
                    }
                }
                Some(_) => attrs.push("arrowhead=none".to_string()),
                None => {}
            }
            attrs.insert(0, format!("label={}", quote(&label)));
            let _ = writeln!(out, "  n{id} -> n{} [{}];", a.child.0, attrs.join(", "));
        }
    }
    for set in tree.info_sets().iter().filter(|h| !h.is_singleton()) {
        let ids: Vec<String> = set.nodes.iter().map(|x| format!("n{}", x.0)).collect();
        let _ = writeln!(out, "  {{ rank=same; {}; }}", ids.join("; "));
        for pair in set.nodes.windows(2) {
            let _ = writeln!(
                out,
                "  n{} -> n{} [style=dotted, dir=none, constraint=false, label={}];",
                pair[0].0,
                pair[1].0,
                quote(&set.name)
            );
        }
    }
    out.push_str("}\n");
    out
}
