use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::coalition::Player;
use super::error::{ModelError, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct InfoSetId(pub usize);

#[derive(Clone, Debug, PartialEq)]
pub struct Action {
    pub label: String,
    pub child: NodeId,
}

#[derive(Clone, Debug, PartialEq)]
pub enum NodeKind {
    Decision {
        player: Player,
        info_set: InfoSetId,
        actions: Vec<Action>,
    },
    /// Nature's move; only allowed at the root.
    Chance {
        actions: Vec<Action>,
        probabilities: Vec<f64>,
    },
    Terminal {
        payoffs: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub name: String,
    pub kind: NodeKind,
}

impl Node {
    pub fn actions(&self) -> &[Action] {
        match &self.kind {
            NodeKind::Decision { actions, .. } | NodeKind::Chance { actions, .. } => actions,
            NodeKind::Terminal { .. } => &[],
        }
    }

    pub fn player(&self) -> Option<Player> {
        match self.kind {
            NodeKind::Decision { player, .. } => Some(player),
            _ => None,
        }
    }

    pub fn info_set(&self) -> Option<InfoSetId> {
        match self.kind {
            NodeKind::Decision { info_set, .. } => Some(info_set),
            _ => None,
        }
    }

    pub fn payoffs(&self) -> Option<&[f64]> {
        match &self.kind {
            NodeKind::Terminal { payoffs } => Some(payoffs),
            _ => None,
        }
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self.kind, NodeKind::Terminal { .. })
    }

    pub fn is_chance(&self) -> bool {
        matches!(self.kind, NodeKind::Chance { .. })
    }

    pub fn action_index(&self, label: &str) -> Option<usize> {
        self.actions().iter().position(|a| a.label == label)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InfoSet {
    pub id: InfoSetId,
    pub name: String,
    pub player: Player,
    pub nodes: Vec<NodeId>,
}

impl InfoSet {
    pub fn is_singleton(&self) -> bool {
        self.nodes.len() == 1
    }
}

/// Unvalidated pieces of a game tree, as produced by the file reader.
#[derive(Clone, Debug)]
pub struct TreeParts {
    pub players: Vec<String>,
    pub nodes: Vec<Node>,
    pub root: NodeId,
    pub info_sets: Vec<InfoSet>,
}

/// A finite rooted game tree with information sets.
///
/// Built only through [`GameTree::build`], which establishes the tree
/// invariants; afterwards the structure is immutable.
#[derive(Clone, Debug)]
pub struct GameTree {
    players: Vec<String>,
    nodes: Vec<Node>,
    root: NodeId,
    info_sets: Vec<InfoSet>,
    parent: Vec<Option<NodeId>>,
    depth: Vec<usize>,
    preorder: Vec<NodeId>,
    pre_index: Vec<usize>,
    subtree_end: Vec<usize>,
    subgame_root: Vec<bool>,
}

impl GameTree {
    pub fn build(parts: TreeParts) -> Result<GameTree, Vec<Violation>> {
        let TreeParts { players, nodes, root, info_sets } = parts;
        let n = players.len();
        let mut violations = Vec::new();

        if n == 0 {
            violations.push(Violation::NoPlayers);
        }
        if n > super::coalition::MAX_PLAYERS {
            violations.push(Violation::TooManyPlayers(n));
        }
        if root.0 >= nodes.len() {
            violations.push(Violation::UnknownNode(format!("#{}", root.0)));
            return Err(violations);
        }

        for node in &nodes {
            let mut labels: Vec<&str> = Vec::new();
            for a in node.actions() {
                if a.child.0 >= nodes.len() {
                    violations.push(Violation::UnknownNode(format!("child of {}", node.name)));
                }
                if labels.contains(&a.label.as_str()) {
                    violations
                        .push(Violation::DuplicateActionLabel { node: node.name.clone(), label: a.label.clone() });
                }
                labels.push(&a.label);
            }
            match &node.kind {
                NodeKind::Terminal { payoffs } => {
                    if payoffs.len() != n {
                        violations.push(Violation::PayoffLengthMismatch {
                            node: node.name.clone(),
                            expected: n,
                            found: payoffs.len(),
                        });
                    }
                    if payoffs.iter().any(|v| !v.is_finite()) {
                        violations.push(Violation::NonFinitePayoff(node.name.clone()));
                    }
                }
                NodeKind::Decision { player, actions, .. } => {
                    if actions.is_empty() {
                        violations.push(Violation::NoActions(node.name.clone()));
                    }
                    if player.0 >= n {
                        violations.push(Violation::UnknownPlayer { node: node.name.clone(), player: player.number() });
                    }
                }
                NodeKind::Chance { actions, probabilities } => {
                    if node.id != root {
                        violations.push(Violation::ChanceOffRoot(node.name.clone()));
                    }
                    let sum: f64 = probabilities.iter().sum();
                    if actions.is_empty()
                        || probabilities.len() != actions.len()
                        || probabilities.iter().any(|p| !p.is_finite() || *p < 0.0)
                        || (sum - 1.0).abs() > 1e-9
                    {
                        violations.push(Violation::BadChanceDistribution);
                    }
                }
            }
        }
        if !violations.is_empty() {
            return Err(violations);
        }

        // Depth-first walk from the root; a node reached twice is either a
        // cycle (it is on the current path) or a node with two parents.
        let mut parent = vec![None; nodes.len()];
        let mut depth = vec![0; nodes.len()];
        let mut visited = vec![false; nodes.len()];
        let mut on_path = vec![false; nodes.len()];
        let mut preorder = Vec::with_capacity(nodes.len());
        let mut stack: Vec<(NodeId, usize)> = vec![(root, 0)];
        visited[root.0] = true;
        on_path[root.0] = true;
        preorder.push(root);
        while let Some(top) = stack.last_mut() {
            let (x, next) = *top;
            let actions = nodes[x.0].actions();
            if next < actions.len() {
                top.1 += 1;
                let child = actions[next].child;
                if on_path[child.0] {
                    violations.push(Violation::CycleDetected(nodes[child.0].name.clone()));
                    continue;
                }
                if visited[child.0] {
                    violations.push(Violation::MultipleParents(nodes[child.0].name.clone()));
                    continue;
                }
                visited[child.0] = true;
                on_path[child.0] = true;
                parent[child.0] = Some(x);
                depth[child.0] = depth[x.0] + 1;
                preorder.push(child);
                stack.push((child, 0));
            } else {
                on_path[x.0] = false;
                stack.pop();
            }
        }
        for node in &nodes {
            if !visited[node.id.0] {
                violations.push(Violation::UnreachableNode(node.name.clone()));
            }
        }
        if !violations.is_empty() {
            return Err(violations);
        }

        let mut pre_index = vec![0; nodes.len()];
        for (k, x) in preorder.iter().enumerate() {
            pre_index[x.0] = k;
        }
        let mut subtree_end = vec![0; nodes.len()];
        for &x in preorder.iter().rev() {
            let end = nodes[x.0].actions().iter().map(|a| subtree_end[a.child.0]).max().unwrap_or(pre_index[x.0] + 1);
            subtree_end[x.0] = end;
        }

        for h in &info_sets {
            let first = &nodes[h.nodes[0].0];
            for &x in &h.nodes {
                let node = &nodes[x.0];
                if node.player() != Some(h.player) {
                    violations.push(Violation::InfoSetPlayerMismatch(h.name.clone()));
                }
                let same_labels = node.actions().len() == first.actions().len()
                    && node.actions().iter().zip(first.actions()).all(|(a, b)| a.label == b.label);
                if !same_labels {
                    violations.push(Violation::InfoSetActionMismatch(h.name.clone()));
                }
            }
        }

        let mut tree = GameTree {
            players,
            nodes,
            root,
            info_sets,
            parent,
            depth,
            preorder,
            pre_index,
            subtree_end,
            subgame_root: Vec::new(),
        };
        if violations.is_empty() {
            violations.extend(tree.perfect_recall_violations());
        }
        if !violations.is_empty() {
            return Err(violations);
        }
        tree.subgame_root = tree.nodes.iter().map(|node| tree.compute_subgame_root(node.id)).collect();
        Ok(tree)
    }

    /// The owner's own (information set, action) history on the path to `x`.
    fn own_history(&self, x: NodeId, player: Player) -> Vec<(InfoSetId, usize)> {
        let mut history = Vec::new();
        let mut cur = x;
        while let Some(p) = self.parent[cur.0] {
            let pnode = &self.nodes[p.0];
            if pnode.player() == Some(player) {
                let k = pnode.actions().iter().position(|a| a.child == cur).expect("child of parent");
                history.push((pnode.info_set().expect("decision node"), k));
            }
            cur = p;
        }
        history.reverse();
        history
    }

    fn perfect_recall_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for h in &self.info_sets {
            if h.nodes.len() < 2 {
                continue;
            }
            let reference = self.own_history(h.nodes[0], h.player);
            if h.nodes[1..].iter().any(|&x| self.own_history(x, h.player) != reference) {
                out.push(Violation::PerfectRecall(h.name.clone()));
            }
        }
        out
    }

    fn compute_subgame_root(&self, x: NodeId) -> bool {
        let node = &self.nodes[x.0];
        if let Some(h) = node.info_set() {
            if !self.info_sets[h.0].is_singleton() {
                return false;
            }
        }
        self.subtree(x).all(|y| match self.nodes[y.0].info_set() {
            Some(h) => self.info_sets[h.0].nodes.iter().all(|&z| self.is_descendant(z, x)),
            None => true,
        })
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn player_count(&self) -> usize {
        self.players.len()
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, x: NodeId) -> &Node {
        &self.nodes[x.0]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().find(|n| n.name == name).map(|n| n.id)
    }

    pub fn parent(&self, x: NodeId) -> Option<NodeId> {
        self.parent[x.0]
    }

    pub fn depth(&self, x: NodeId) -> usize {
        self.depth[x.0]
    }

    pub fn info_sets(&self) -> &[InfoSet] {
        &self.info_sets
    }

    pub fn info_set(&self, h: InfoSetId) -> &InfoSet {
        &self.info_sets[h.0]
    }

    pub fn payoffs(&self, z: NodeId) -> &[f64] {
        self.nodes[z.0].payoffs().expect("terminal node")
    }

    /// Probability distribution of Nature's move at the root, if any.
    pub fn chance_at_root(&self) -> Option<&[f64]> {
        match &self.nodes[self.root.0].kind {
            NodeKind::Chance { probabilities, .. } => Some(probabilities),
            _ => None,
        }
    }

    pub fn is_perfect_information(&self) -> bool {
        self.info_sets.iter().all(InfoSet::is_singleton)
    }

    /// `x` and every successor of `x`, in preorder.
    pub fn subtree(&self, x: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.preorder[self.pre_index[x.0]..self.subtree_end[x.0]].iter().copied()
    }

    pub fn subtree_size(&self, x: NodeId) -> usize {
        self.subtree_end[x.0] - self.pre_index[x.0]
    }

    /// True when `y` lies in the subtree rooted at `x` (including `x`).
    pub fn is_descendant(&self, y: NodeId, x: NodeId) -> bool {
        let k = self.pre_index[y.0];
        k >= self.pre_index[x.0] && k < self.subtree_end[x.0]
    }

    pub fn terminals(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.preorder.iter().copied().filter(|x| self.nodes[x.0].is_terminal())
    }

    /// Subtree of `x` in breadth-first order, children in declared order.
    pub fn level_order(&self, x: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut queue = VecDeque::from([x]);
        while let Some(y) = queue.pop_front() {
            out.push(y);
            queue.extend(self.nodes[y.0].actions().iter().map(|a| a.child));
        }
        out
    }

    /// Whether `x` roots a subgame: a singleton information set whose
    /// subtree does not cut through any information set. Terminals qualify.
    pub fn is_subgame_root(&self, x: NodeId) -> bool {
        self.subgame_root[x.0]
    }

    /// The largest subgame at `x`.
    pub fn subgame_at(&self, x: NodeId) -> Result<Subtree<'_>, ModelError> {
        if !self.is_subgame_root(x) {
            return Err(ModelError::NotASubgameRoot(self.nodes[x.0].name.clone()));
        }
        Ok(Subtree { tree: self, roots: vec![x] })
    }

    /// `T(h)`: the subtree whose root is the (possibly non-singleton) set `h`.
    pub fn subtree_at(&self, h: InfoSetId) -> Subtree<'_> {
        Subtree { tree: self, roots: self.info_sets[h.0].nodes.clone() }
    }

    /// `root(h)`: root of the smallest subgame containing `h`.
    pub fn root_of(&self, h: InfoSetId) -> NodeId {
        let mut x = self.info_sets[h.0].nodes[0];
        loop {
            if self.is_subgame_root(x) {
                return x;
            }
            x = self.parent[x.0].expect("the game root always roots a subgame");
        }
    }

    /// Nodes in bottom-up listing order: deepest level first, left to right
    /// within a level. The root comes last.
    pub fn bottom_up_order(&self) -> Vec<NodeId> {
        let mut order = self.level_order(self.root);
        order.sort_by_key(|x| std::cmp::Reverse(self.depth[x.0]));
        order
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A view over `T(h)` or a subgame: the listed roots and all their successors.
#[derive(Clone, Debug)]
pub struct Subtree<'a> {
    tree: &'a GameTree,
    roots: Vec<NodeId>,
}

impl<'a> Subtree<'a> {
    pub fn roots(&self) -> &[NodeId] {
        &self.roots
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.roots.iter().flat_map(move |&r| self.tree.subtree(r))
    }

    pub fn len(&self) -> usize {
        self.roots.iter().map(|&r| self.tree.subtree_size(r)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn terminals(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes().filter(move |&x| self.tree.node(x).is_terminal())
    }

    pub fn decision_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes().filter(move |&x| self.tree.node(x).player().is_some())
    }
}
