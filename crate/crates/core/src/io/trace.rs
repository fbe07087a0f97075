//! Text renderings of solutions: the bracket summary, the step trace and
//! the nested listing of every entry of a solution profile.
//!
//! The bracket summary of a solution over some decision nodes lists, per
//! player in order of first appearance, the actions chosen at those nodes
//! (breadth-first, left to right), then the blocks those players belong to:
//!
//! ```text
//! [{R},{a,d},{e,g,j,l}; {1,3},2]
//! ```

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::model::{format_payoffs, format_value, Coalition, Game, GameTree, NodeId, Partition, Player};
use crate::noncoop::{backward_induction, spne_in_subgame, Choice, LocalSolution};
use crate::ri::{SolutionProfile, SolveStep, StepKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verbosity {
    /// Steps of the views in which every player starts alone.
    Summary,
    /// Every step, including those of nested supergames.
    Full,
}

fn choice_label(tree: &GameTree, x: NodeId, choice: &Choice) -> String {
    let actions = tree.node(x).actions();
    match choice {
        Choice::Pure(a) => actions[*a].label.clone(),
        Choice::Mixed(p) => {
            let parts: Vec<String> = actions
                .iter()
                .zip(p)
                .filter(|(_, q)| **q > 0.0)
                .map(|(a, q)| format!("{} {}", a.label, format_value(*q)))
                .collect();
            format!("({})", parts.join("|"))
        }
    }
}

/// Bracket notation for `sol` over `nodes`, which are taken in the order
/// given. Nodes without a move in `sol` are skipped.
pub fn bracket(tree: &GameTree, sol: &LocalSolution, nodes: &[NodeId]) -> String {
    let mut groups: Vec<(Player, NodeId, Vec<String>)> = Vec::new();
    for &x in nodes {
        let (Some(player), Some(h)) = (tree.node(x).player(), tree.node(x).info_set()) else { continue };
        let Some(m) = sol.profile.get(h) else { continue };
        let label = choice_label(tree, x, &m.choice);
        match groups.iter_mut().find(|(p, _, _)| *p == player) {
            Some((_, _, labels)) => labels.push(label),
            None => groups.push((player, x, vec![label])),
        }
    }
    let mut blocks: Vec<Coalition> = Vec::new();
    for (player, first, _) in &groups {
        let block = sol.partitions.get(first).map_or(Coalition::singleton(*player), |p| p.block_of(*player));
        if !blocks.contains(&block) {
            blocks.push(block);
        }
    }
    let actions: Vec<String> = groups.iter().map(|(_, _, labels)| format!("{{{}}}", labels.join(","))).collect();
    let blocks: Vec<String> = blocks.iter().map(|b| b.to_string()).collect();
    format!("[{}; {}]", actions.join(","), blocks.join(","))
}

/// Bracket notation over every decision node of `sol`'s subtree.
pub fn summary_bracket(tree: &GameTree, sol: &LocalSolution) -> String {
    bracket(tree, sol, &tree.level_order(sol.root))
}

/// The noncooperative baseline: backward induction, or a subgame-perfect
/// equilibrium when information is imperfect.
pub fn baseline(game: &Game) -> Result<LocalSolution, crate::noncoop::SolveError> {
    let view = game.standalone();
    if game.tree.is_perfect_information() {
        backward_induction(&view)
    } else {
        spne_in_subgame(&view, game.tree.root())
    }
}

fn player_name(p: Player) -> String {
    format!("P{}", p.number())
}

fn step_line(out: &mut String, step: &SolveStep) {
    let payoffs = format_payoffs(&step.outcome);
    let value = format_value(step.active_value);
    let c = step.coalition.to_string();
    let _ = match step.kind {
        StepKind::IndexPoint => writeln!(out, "    index      {c:<9} {payoffs}  value {value}"),
        StepKind::SupergameSolved => {
            let idle = if step.reason.ends_with("idle-members") { "  (idle members)" } else { "" };
            writeln!(out, "    supergame  {c:<9} {payoffs}  value {value}  block {}{idle}", step.block)
        }
        StepKind::IrAccepted => {
            writeln!(out, "    accept     {c:<9} {payoffs}  every agent of {} improves", step.block)
        }
        StepKind::IrRejected => {
            let agent = step.agent.map(player_name).unwrap_or_default();
            writeln!(out, "    reject     {c:<9} {payoffs}  {agent} does not improve")
        }
        StepKind::Adopted => writeln!(out, "    adopted    {c:<9} {payoffs}  value {value}"),
    };
}

/// The solve, step by step, preceded by the noncooperative baseline.
pub fn render_trace(game: &Game, profile: &SolutionProfile, verbosity: Verbosity) -> String {
    let tree = &game.tree;
    let singletons = Partition::singletons(game.player_count());
    let mut out = String::new();
    match baseline(game) {
        Ok(b) => {
            let _ = writeln!(out, "baseline   {}  {}", format_payoffs(&b.payoffs(tree)), summary_bracket(tree, &b));
        }
        Err(e) => {
            let _ = writeln!(out, "baseline   unavailable: {e}");
        }
    }
    let mut current: Option<(NodeId, &Partition)> = None;
    for step in &profile.trace {
        if verbosity == Verbosity::Summary && step.context != singletons {
            continue;
        }
        if current != Some((step.node, &step.context)) {
            current = Some((step.node, &step.context));
            let node = tree.node(step.node);
            let mover = node.player().map(player_name).unwrap_or_else(|| "chance".into());
            let _ = write!(out, "node {} ({mover})", node.name);
            if step.context != singletons {
                let _ = write!(out, " in {}", step.context);
            }
            out.push('\n');
        }
        step_line(&mut out, step);
        if step.kind == StepKind::Adopted && step.context == singletons {
            if let Some(entry) = profile.entry(step.node, step.node) {
                let _ = writeln!(out, "    solution   {}", summary_bracket(tree, entry));
            }
        }
    }
    out
}

/// Decision nodes strictly below `h`, grouped by depth.
fn levels_below(tree: &GameTree, h: NodeId) -> Vec<Vec<NodeId>> {
    let mut levels: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
    for x in tree.level_order(h).into_iter().skip(1) {
        if !tree.node(x).is_terminal() && tree.node(x).player().is_some() {
            levels.entry(tree.depth(x)).or_default().push(x);
        }
    }
    levels.into_values().collect()
}

fn span(tree: &GameTree, nodes: &[NodeId]) -> String {
    match nodes {
        [only] => format!("Node {}", tree.node(*only).name),
        [first, .., last] => format!("Nodes {} to {}", tree.node(*first).name, tree.node(*last).name),
        [] => String::new(),
    }
}

fn is_preterminal(tree: &GameTree, x: NodeId) -> bool {
    tree.node(x).player().is_some() && tree.node(x).actions().iter().all(|a| tree.node(a.child).is_terminal())
}

fn edge_into(tree: &GameTree, x: NodeId) -> String {
    match tree.parent(x) {
        Some(p) => {
            let label = tree.node(p).actions().iter().find(|a| a.child == x).map(|a| a.label.as_str()).unwrap_or("");
            format!(" (after {label})")
        }
        None => " (root)".into(),
    }
}

/// The complete solution, one section per context node `h` (every player
/// initially alone at `h`), listing the entries `(h, g)` for the subgames
/// `g` below it: children that are not last movers get their own
/// subsection, the remaining nodes are listed level by level. Last movers
/// are listed together in a final section.
pub fn render_solution(game: &Game, profile: &SolutionProfile) -> String {
    let tree = &game.tree;
    let mut out = String::new();
    let contexts: Vec<NodeId> =
        tree.bottom_up_order().into_iter().rev().filter(|&h| profile.entry(h, h).is_some()).collect();
    let (pre, upper): (Vec<NodeId>, Vec<NodeId>) = contexts.into_iter().partition(|&h| is_preterminal(tree, h));
    let mut k = 0;
    for &h in &upper {
        k += 1;
        let context = profile.entry(h, h).expect("listed contexts have entries");
        let _ = writeln!(
            out,
            "{k}. Node {}{}: {}",
            tree.node(h).name,
            edge_into(tree, h),
            format_payoffs(&context.payoffs(tree))
        );
        let _ = writeln!(out, "   - Node {}: {}", tree.node(h).name, summary_bracket(tree, context));
        let children: Vec<NodeId> = tree.node(h).actions().iter().map(|a| a.child).collect();
        let mut sections = Vec::new();
        for &c in children.iter().rev() {
            if tree.node(c).player().is_none() || is_preterminal(tree, c) {
                continue;
            }
            sections.push(c);
            let _ = writeln!(out, "   - Node {}{}:", tree.node(c).name, edge_into(tree, c));
            let _ =
                writeln!(out, "     - Node {}: {}", tree.node(c).name, bracket(tree, context, &tree.level_order(c)));
            for level in levels_below(tree, c) {
                let _ = writeln!(out, "     - {}: {}", span(tree, &level), bracket(tree, context, &level));
            }
        }
        for level in levels_below(tree, h) {
            let level: Vec<NodeId> = level.into_iter().filter(|x| !sections.contains(x)).collect();
            if !level.is_empty() {
                let _ = writeln!(out, "   - {}: {}", span(tree, &level), bracket(tree, context, &level));
            }
        }
    }
    if !pre.is_empty() {
        k += 1;
        let mut ordered = pre.clone();
        ordered.reverse();
        let mut combined = profile.entry(ordered[0], ordered[0]).expect("listed").clone();
        for &g in &ordered[1..] {
            let e = profile.entry(g, g).expect("listed");
            combined.profile.extend(&e.profile);
            combined.partitions.extend(e.partitions.iter().map(|(x, p)| (*x, p.clone())));
        }
        let _ = writeln!(out, "{k}. {} (last movers):", span(tree, &ordered));
        let _ = writeln!(out, "   - {}: {}", span(tree, &ordered), bracket(tree, &combined, &ordered));
    }
    out
}
