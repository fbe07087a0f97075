//! Noncooperative solution concepts over a fixed partition: backward
//! induction and subgame-perfect equilibria of imperfect-information games.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::model::{
    approx_eq, strictly_greater, Coalition, Game, GameTree, InfoSetId, ModelError, NodeId, NodeKind, Outcome,
    Partition, Player, SupergameView, EPS,
};

/// Upper bound on pure profiles enumerated in one contested subgame.
pub const MAX_REGION_PROFILES: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SolveError {
    #[error("backward induction needs perfect information; information set {0} has several nodes")]
    ImperfectInformation(String),
    #[error(
        "the subgame at {node} has no pure equilibrium among {players} effective players; \
         mixed equilibria are computed for two players only"
    )]
    MixedEquilibriumUnsupported { node: String, players: usize },
    #[error("support enumeration found no equilibrium in the subgame at {0}")]
    NoEquilibriumFound(String),
    #[error("chance branch {0} does not root a subgame")]
    ChanceBranchNotSubgame(String),
    #[error("the subgame at {node} has {profiles} pure profiles; the limit is {limit}")]
    RegionTooLarge { node: String, profiles: u128, limit: u128 },
    #[error("recursion measure failed to decrease at {0}")]
    Termination(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// The behavior at one information set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Choice {
    /// Index into the information set's actions.
    Pure(usize),
    /// One probability per action.
    Mixed(Vec<f64>),
}

impl Choice {
    pub fn probability(&self, action: usize) -> f64 {
        match self {
            Choice::Pure(a) => f64::from(u8::from(*a == action)),
            Choice::Mixed(p) => p.get(action).copied().unwrap_or(0.0),
        }
    }

    pub fn as_pure(&self) -> Option<usize> {
        match self {
            Choice::Pure(a) => Some(*a),
            Choice::Mixed(_) => None,
        }
    }

    /// Collapses a degenerate distribution to a pure choice.
    fn normalized(probs: Vec<f64>) -> Choice {
        match probs.iter().position(|p| approx_eq(*p, 1.0)) {
            Some(a) => Choice::Pure(a),
            None => Choice::Mixed(probs),
        }
    }
}

/// An information set's owner (the effective player) and its behavior.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Move {
    pub owner: Coalition,
    pub choice: Choice,
}

/// Behavior at every information set of a subtree.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StrategyProfile {
    moves: BTreeMap<InfoSetId, Move>,
}

impl StrategyProfile {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, h: InfoSetId, m: Move) {
        self.moves.insert(h, m);
    }

    pub fn get(&self, h: InfoSetId) -> Option<&Move> {
        self.moves.get(&h)
    }

    pub fn iter(&self) -> impl Iterator<Item = (InfoSetId, &Move)> {
        self.moves.iter().map(|(h, m)| (*h, m))
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn extend(&mut self, other: &StrategyProfile) {
        self.moves.extend(other.moves.iter().map(|(h, m)| (*h, m.clone())));
    }

    /// The pure action taken at `x`, if the move there is pure.
    pub fn action_at(&self, tree: &GameTree, x: NodeId) -> Option<usize> {
        self.get(tree.node(x).info_set()?)?.choice.as_pure()
    }

    /// Checks the profile's invariants against a tree: valid pure indices,
    /// probability vectors that are distributions over the right actions.
    pub fn is_well_formed(&self, tree: &GameTree) -> bool {
        self.moves.iter().all(|(h, m)| {
            let actions = tree.node(tree.info_set(*h).nodes[0]).actions().len();
            match &m.choice {
                Choice::Pure(a) => *a < actions,
                Choice::Mixed(p) => {
                    p.len() == actions && p.iter().all(|x| *x >= -EPS) && approx_eq(p.iter().sum::<f64>(), 1.0)
                }
            }
        })
    }

    /// The distribution over terminals reached by playing from `x`.
    /// `None` when a reachable information set has no move.
    pub fn play(&self, tree: &GameTree, x: NodeId) -> Option<Outcome> {
        let node = tree.node(x);
        match &node.kind {
            NodeKind::Terminal { .. } => Some(Outcome::pure(x)),
            NodeKind::Chance { actions, probabilities } => {
                let parts: Option<Vec<(f64, Outcome)>> =
                    actions.iter().zip(probabilities).map(|(a, p)| self.play(tree, a.child).map(|o| (*p, o))).collect();
                let parts = parts?;
                Some(Outcome::mix(parts.iter().map(|(p, o)| (*p, o))))
            }
            NodeKind::Decision { info_set, actions, .. } => match &self.get(*info_set)?.choice {
                Choice::Pure(a) => self.play(tree, actions.get(*a)?.child),
                Choice::Mixed(probs) => {
                    let mut parts = Vec::new();
                    for (a, p) in actions.iter().zip(probs) {
                        if *p > 0.0 {
                            parts.push((*p, self.play(tree, a.child)?));
                        }
                    }
                    Some(Outcome::mix(parts.iter().map(|(p, o)| (*p, o))))
                }
            },
        }
    }
}

/// A strategy profile over a subtree together with the partition in force
/// at each of its decision nodes, and the outcome it induces.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalSolution {
    pub root: NodeId,
    pub profile: StrategyProfile,
    pub partitions: BTreeMap<NodeId, Partition>,
    pub outcome: Outcome,
}

impl LocalSolution {
    fn terminal(z: NodeId) -> Self {
        LocalSolution {
            root: z,
            profile: StrategyProfile::new(),
            partitions: BTreeMap::new(),
            outcome: Outcome::pure(z),
        }
    }

    /// Expected payoff vector over base players.
    pub fn payoffs(&self, tree: &GameTree) -> Vec<f64> {
        self.outcome.payoffs(tree)
    }

    /// The partition at the subtree root; `None` at terminals and chance.
    pub fn root_partition(&self) -> Option<&Partition> {
        self.partitions.get(&self.root)
    }

    /// Expected `u_i`, each terminal valued under the partition in force at
    /// the top of the branch leading to it.
    pub fn individual_value(&self, game: &Game, i: Player) -> f64 {
        let tree = &game.tree;
        self.outcome.expect(|z| {
            let mut partition = None;
            let mut cur = z;
            while let Some(p) = tree.parent(cur) {
                if let Some(part) = self.partitions.get(&p) {
                    partition = Some(part);
                }
                if p == self.root {
                    break;
                }
                cur = p;
            }
            match partition {
                Some(part) => game.utility.individual_utility(i, z, part, tree),
                None => tree.payoffs(z)[i.index()],
            }
        })
    }

    /// The part of this solution inside the subgame rooted at `g`.
    pub fn restrict(&self, tree: &GameTree, g: NodeId) -> LocalSolution {
        let mut profile = StrategyProfile::new();
        for (h, m) in self.profile.iter() {
            if tree.is_descendant(tree.info_set(h).nodes[0], g) {
                profile.insert(h, m.clone());
            }
        }
        let partitions =
            self.partitions.iter().filter(|(x, _)| tree.is_descendant(**x, g)).map(|(x, p)| (*x, p.clone())).collect();
        let outcome = profile.play(tree, g).expect("restriction of a complete profile is complete");
        LocalSolution { root: g, profile, partitions, outcome }
    }
}

/// `argmax` over the children of `x` for the effective player owning `x`,
/// given the outcomes already fixed below each child. Ties go to the
/// earlier-declared action.
pub fn best_response_at(view: &SupergameView, x: NodeId, child_outcomes: &[Outcome]) -> (usize, f64) {
    let owner = view.owner(x).expect("best response at a decision node");
    let mut best = 0;
    for a in 1..child_outcomes.len() {
        if view.compare_for(owner, &child_outcomes[a], &child_outcomes[best]) == Ordering::Greater {
            best = a;
        }
    }
    (best, view.player_value(owner, &child_outcomes[best]))
}

/// Decision nodes of the subgame at `x` that lie above every proper
/// subgame, and the subgame roots (or terminals) just below them.
#[derive(Clone, Debug)]
pub(crate) struct Region {
    pub nodes: Vec<NodeId>,
    pub info_sets: Vec<InfoSetId>,
    pub frontier: Vec<NodeId>,
}

pub(crate) fn region(tree: &GameTree, x: NodeId) -> Region {
    let mut nodes = Vec::new();
    let mut info_sets = Vec::new();
    let mut frontier = Vec::new();
    let mut stack = vec![x];
    while let Some(y) = stack.pop() {
        nodes.push(y);
        let h = tree.node(y).info_set().expect("region nodes are decision nodes");
        if !info_sets.contains(&h) {
            info_sets.push(h);
        }
        for a in tree.node(y).actions().iter().rev() {
            if tree.is_subgame_root(a.child) {
                frontier.push(a.child);
            } else {
                stack.push(a.child);
            }
        }
    }
    frontier.sort_by_key(|f| tree.subtree(x).position(|y| y == *f));
    Region { nodes, info_sets, frontier }
}

/// The noncooperative play chosen inside a region.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct RegionSolution {
    pub choices: Vec<(InfoSetId, Coalition, Choice)>,
    pub outcome: Outcome,
}

/// An equilibrium of the region at `x` among the effective players owning
/// its information sets, with the play below the frontier fixed.
pub(crate) fn solve_region(
    view: &SupergameView,
    x: NodeId,
    frontier_outcome: &dyn Fn(NodeId) -> Outcome,
) -> Result<RegionSolution, SolveError> {
    let tree = view.tree();
    let node = tree.node(x);
    let h = node.info_set().expect("decision node");
    if tree.info_set(h).is_singleton() && node.actions().iter().all(|a| tree.is_subgame_root(a.child)) {
        let outcomes: Vec<Outcome> = node.actions().iter().map(|a| frontier_outcome(a.child)).collect();
        let (a, _) = best_response_at(view, x, &outcomes);
        let owner = view.owner(x).expect("decision node");
        return Ok(RegionSolution { choices: vec![(h, owner, Choice::Pure(a))], outcome: outcomes[a].clone() });
    }
    RegionGame::new(view, x, region(tree, x), frontier_outcome)?.solve()
}

/// The normal form of a region: pure strategies per effective player and
/// the frontier node reached by every pure profile.
struct RegionGame<'v, 'g> {
    view: &'v SupergameView<'g>,
    root: NodeId,
    region: Region,
    players: Vec<Coalition>,
    /// Information sets of each player, in order of first appearance.
    sets: Vec<Vec<InfoSetId>>,
    /// Reduced pure strategies: one action index per information set.
    strategies: Vec<Vec<Vec<usize>>>,
    outcomes: HashMap<NodeId, Outcome>,
}

impl<'v, 'g> RegionGame<'v, 'g> {
    fn new(
        view: &'v SupergameView<'g>,
        root: NodeId,
        region: Region,
        frontier_outcome: &dyn Fn(NodeId) -> Outcome,
    ) -> Result<Self, SolveError> {
        let tree = view.tree();
        let mut players: Vec<Coalition> = Vec::new();
        let mut sets: Vec<Vec<InfoSetId>> = Vec::new();
        for &h in &region.info_sets {
            let owner = view.partition.block_of(tree.info_set(h).player);
            match players.iter().position(|b| *b == owner) {
                Some(k) => sets[k].push(h),
                None => {
                    players.push(owner);
                    sets.push(vec![h]);
                }
            }
        }
        let mut order: Vec<usize> = (0..players.len()).collect();
        order.sort_by_key(|&k| players[k]);
        order.sort_by_key(|&k| players[k].min_member());
        let players: Vec<Coalition> = order.iter().map(|&k| players[k]).collect();
        let sets: Vec<Vec<InfoSetId>> = order.iter().map(|&k| sets[k].clone()).collect();

        let mut total: u128 = 1;
        for hs in &sets {
            for h in hs {
                total = total.saturating_mul(tree.node(tree.info_set(*h).nodes[0]).actions().len() as u128);
            }
        }
        if total > MAX_REGION_PROFILES {
            return Err(SolveError::RegionTooLarge {
                node: tree.node(root).name.clone(),
                profiles: total,
                limit: MAX_REGION_PROFILES,
            });
        }
        let outcomes = region.frontier.iter().map(|&f| (f, frontier_outcome(f))).collect();
        let full: Vec<Vec<Vec<usize>>> = sets
            .iter()
            .map(|hs| {
                let radices: Vec<usize> =
                    hs.iter().map(|h| tree.node(tree.info_set(*h).nodes[0]).actions().len()).collect();
                all_tuples(&radices)
            })
            .collect();
        let mut game = RegionGame { view, root, region, players, sets, strategies: full, outcomes };
        game.reduce();
        Ok(game)
    }

    /// The frontier node reached when each player plays the given strategy.
    fn reach(&self, profile: &[&[usize]]) -> NodeId {
        let tree = self.view.tree();
        let mut y = self.root;
        loop {
            let h = tree.node(y).info_set().expect("region node");
            let (k, pos) = self.locate(h);
            let child = tree.node(y).actions()[profile[k][pos]].child;
            if self.region.frontier.contains(&child) {
                return child;
            }
            y = child;
        }
    }

    fn locate(&self, h: InfoSetId) -> (usize, usize) {
        for (k, hs) in self.sets.iter().enumerate() {
            if let Some(pos) = hs.iter().position(|g| *g == h) {
                return (k, pos);
            }
        }
        unreachable!("every region information set has an owner")
    }

    /// All opponent profiles of player `k`, as strategy indices.
    fn opponent_profiles(&self, k: usize) -> Vec<Vec<usize>> {
        let radices: Vec<usize> =
            (0..self.players.len()).map(|j| if j == k { 1 } else { self.strategies[j].len() }).collect();
        all_tuples(&radices)
    }

    fn profile_of<'a>(&'a self, idx: &[usize]) -> Vec<&'a [usize]> {
        idx.iter().enumerate().map(|(j, &s)| self.strategies[j][s].as_slice()).collect()
    }

    /// Drops strategies that reach the same frontier node as an earlier one
    /// against every opponent profile.
    fn reduce(&mut self) {
        for k in 0..self.players.len() {
            let opponents = self.opponent_profiles(k);
            let mut seen: Vec<Vec<NodeId>> = Vec::new();
            let mut kept = Vec::new();
            for s in 0..self.strategies[k].len() {
                let signature: Vec<NodeId> = opponents
                    .iter()
                    .map(|o| {
                        let mut idx = o.clone();
                        idx[k] = s;
                        self.reach(&self.profile_of(&idx))
                    })
                    .collect();
                if !seen.contains(&signature) {
                    seen.push(signature);
                    kept.push(self.strategies[k][s].clone());
                }
            }
            self.strategies[k] = kept;
        }
    }

    fn outcome_at(&self, idx: &[usize]) -> &Outcome {
        &self.outcomes[&self.reach(&self.profile_of(idx))]
    }

    fn value(&self, k: usize, idx: &[usize]) -> f64 {
        self.view.player_value(self.players[k], self.outcome_at(idx))
    }

    fn solve(&self) -> Result<RegionSolution, SolveError> {
        let n = self.players.len();
        if n == 1 {
            let mut best = 0;
            for s in 1..self.strategies[0].len() {
                if self.view.compare_for(self.players[0], self.outcome_at(&[s]), self.outcome_at(&[best]))
                    == Ordering::Greater
                {
                    best = s;
                }
            }
            return Ok(self.pure_solution(&[best]));
        }

        let radices: Vec<usize> = self.strategies.iter().map(Vec::len).collect();
        for idx in all_tuples(&radices) {
            if self.is_pure_equilibrium(&idx) {
                return Ok(self.pure_solution(&idx));
            }
        }
        if n != 2 {
            return Err(SolveError::MixedEquilibriumUnsupported {
                node: self.view.tree().node(self.root).name.clone(),
                players: n,
            });
        }
        let (m, c) = (radices[0], radices[1]);
        let a = DMatrix::from_fn(m, c, |r, s| self.value(0, &[r, s]));
        let b = DMatrix::from_fn(m, c, |r, s| self.value(1, &[r, s]));
        match support_enumeration(&a, &b) {
            Some((x, y)) => Ok(self.mixed_solution(&[x, y])),
            None => Err(SolveError::NoEquilibriumFound(self.view.tree().node(self.root).name.clone())),
        }
    }

    fn is_pure_equilibrium(&self, idx: &[usize]) -> bool {
        (0..self.players.len()).all(|k| {
            let current = self.value(k, idx);
            (0..self.strategies[k].len()).all(|s| {
                let mut dev = idx.to_vec();
                dev[k] = s;
                !strictly_greater(self.value(k, &dev), current)
            })
        })
    }

    fn pure_solution(&self, idx: &[usize]) -> RegionSolution {
        let mut choices = Vec::new();
        for (k, hs) in self.sets.iter().enumerate() {
            for (pos, h) in hs.iter().enumerate() {
                choices.push((*h, self.players[k], Choice::Pure(self.strategies[k][idx[k]][pos])));
            }
        }
        choices.sort_by_key(|(h, _, _)| *h);
        RegionSolution { choices, outcome: self.outcome_at(idx).clone() }
    }

    fn mixed_solution(&self, mix: &[Vec<f64>]) -> RegionSolution {
        let tree = self.view.tree();
        let mut choices = Vec::new();
        for (k, hs) in self.sets.iter().enumerate() {
            for (pos, &h) in hs.iter().enumerate() {
                let actions = tree.node(tree.info_set(h).nodes[0]).actions().len();
                let own = self.own_path(k, h);
                let mut probs = vec![0.0; actions];
                let mut mass = 0.0;
                for (s, strategy) in self.strategies[k].iter().enumerate() {
                    let p = mix[k][s];
                    if p > 0.0 && own.iter().all(|&(g, a)| strategy[g] == a) {
                        probs[strategy[pos]] += p;
                        mass += p;
                    }
                }
                let choice = if mass > EPS {
                    Choice::normalized(probs.iter().map(|p| p / mass).collect())
                } else {
                    let s = mix[k].iter().position(|p| *p > 0.0).unwrap_or(0);
                    Choice::Pure(self.strategies[k][s][pos])
                };
                choices.push((h, self.players[k], choice));
            }
        }
        choices.sort_by_key(|(h, _, _)| *h);

        let radices: Vec<usize> = self.strategies.iter().map(Vec::len).collect();
        let parts: Vec<(f64, &Outcome)> = all_tuples(&radices)
            .into_iter()
            .map(|idx| (idx.iter().enumerate().map(|(k, &s)| mix[k][s]).product(), self.outcome_at(&idx)))
            .collect();
        RegionSolution { choices, outcome: Outcome::mix(parts) }
    }

    /// Player `k`'s own (set position, action) choices on the path from the
    /// region root to information set `h`.
    fn own_path(&self, k: usize, h: InfoSetId) -> Vec<(usize, usize)> {
        let tree = self.view.tree();
        let mut path = Vec::new();
        let mut cur = tree.info_set(h).nodes[0];
        while cur != self.root {
            let parent = tree.parent(cur).expect("region nodes descend from the region root");
            let ph = tree.node(parent).info_set().expect("region node");
            let (owner, pos) = self.locate(ph);
            if owner == k {
                let a = tree.node(parent).actions().iter().position(|a| a.child == cur).expect("child");
                path.push((pos, a));
            }
            cur = parent;
        }
        path
    }
}

/// Every tuple with `t[i] < radices[i]`, first coordinate most significant.
fn all_tuples(radices: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if radices.contains(&0) {
        return out;
    }
    let mut t = vec![0; radices.len()];
    loop {
        out.push(t.clone());
        let mut i = radices.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < radices[i] {
                break;
            }
            t[i] = 0;
        }
    }
}

/// `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut c: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(c.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if c[i] < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Solves `Σ_{c∈J} M[r][c] p_c = v` for `r ∈ I` with `Σ p = 1`.
fn indifference(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> Option<(Vec<f64>, f64)> {
    let k = cols.len();
    let mut sys = DMatrix::zeros(k + 1, k + 1);
    let mut rhs = DVector::zeros(k + 1);
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            sys[(i, j)] = m[(r, c)];
        }
        sys[(i, k)] = -1.0;
    }
    for j in 0..k {
        sys[(k, j)] = 1.0;
    }
    rhs[k] = 1.0;
    let sol = sys.lu().solve(&rhs)?;
    if sol.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some((sol.iter().take(k).copied().collect(), sol[k]))
}

/// A Nash equilibrium of the bimatrix game `(a, b)`: supports of equal size,
/// smallest first, row supports then column supports lexicographically.
pub fn support_enumeration(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<(Vec<f64>, Vec<f64>)> {
    let (m, n) = a.shape();
    let bt = b.transpose();
    for k in 1..=m.min(n) {
        for rows in combinations(m, k) {
            for cols in combinations(n, k) {
                let Some((y, v)) = indifference(a, &rows, &cols) else { continue };
                let Some((x, w)) = indifference(&bt, &cols, &rows) else { continue };
                if y.iter().chain(&x).any(|p| *p < -EPS) {
                    continue;
                }
                let mut ys = vec![0.0; n];
                for (j, &c) in cols.iter().enumerate() {
                    ys[c] = y[j].max(0.0);
                }
                let mut xs = vec![0.0; m];
                for (i, &r) in rows.iter().enumerate() {
                    xs[r] = x[i].max(0.0);
                }
                let row_ok = (0..m).all(|r| (0..n).map(|c| a[(r, c)] * ys[c]).sum::<f64>() <= v + EPS);
                let col_ok = (0..n).all(|c| (0..m).map(|r| b[(r, c)] * xs[r]).sum::<f64>() <= w + EPS);
                if row_ok && col_ok {
                    return Some((xs, ys));
                }
            }
        }
    }
    None
}

/// Noncooperative solver over a fixed partition, recursing over subgames.
fn solve_noncoop(view: &SupergameView, x: NodeId) -> Result<LocalSolution, SolveError> {
    let tree = view.tree();
    match &tree.node(x).kind {
        NodeKind::Terminal { .. } => Ok(LocalSolution::terminal(x)),
        NodeKind::Chance { actions, probabilities } => {
            let mut profile = StrategyProfile::new();
            let mut partitions = BTreeMap::new();
            let mut parts = Vec::new();
            for (a, p) in actions.iter().zip(probabilities) {
                if !tree.is_subgame_root(a.child) {
                    return Err(SolveError::ChanceBranchNotSubgame(tree.node(a.child).name.clone()));
                }
                let branch = solve_noncoop(view, a.child)?;
                profile.extend(&branch.profile);
                partitions.extend(branch.partitions);
                parts.push((*p, branch.outcome));
            }
            let outcome = Outcome::mix(parts.iter().map(|(p, o)| (*p, o)));
            Ok(LocalSolution { root: x, profile, partitions, outcome })
        }
        NodeKind::Decision { .. } => {
            let reg = region(tree, x);
            let mut below = HashMap::new();
            let mut profile = StrategyProfile::new();
            let mut partitions = BTreeMap::new();
            for &f in &reg.frontier {
                let sol = solve_noncoop(view, f)?;
                profile.extend(&sol.profile);
                partitions.extend(sol.partitions);
                below.insert(f, sol.outcome);
            }
            let local = solve_region(view, x, &|f| below[&f].clone())?;
            for (h, owner, choice) in local.choices {
                profile.insert(h, Move { owner, choice });
            }
            for &y in &reg.nodes {
                partitions.insert(y, view.partition.clone());
            }
            Ok(LocalSolution { root: x, profile, partitions, outcome: local.outcome })
        }
    }
}

/// Backward induction over the whole tree of a perfect-information view.
pub fn backward_induction(view: &SupergameView) -> Result<LocalSolution, SolveError> {
    let tree = view.tree();
    if let Some(h) = tree.info_sets().iter().find(|h| !h.is_singleton()) {
        return Err(SolveError::ImperfectInformation(h.name.clone()));
    }
    solve_noncoop(view, tree.root())
}

/// A subgame-perfect equilibrium of the subgame rooted at `g`.
pub fn spne_in_subgame(view: &SupergameView, g: NodeId) -> Result<LocalSolution, SolveError> {
    view.tree().subgame_at(g)?;
    solve_noncoop(view, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::fixtures;
    use crate::io::spec::parse_game;
    use crate::io::validate_game;
    use crate::model::Coalition;

    fn c(members: &[usize]) -> Coalition {
        Coalition::from_players(members.iter().map(|&m| Player(m - 1))).unwrap()
    }

    fn labels_on_path(game: &Game, sol: &LocalSolution) -> Vec<String> {
        let tree = &game.tree;
        let mut out = Vec::new();
        let mut x = sol.root;
        while let Some(a) = sol.profile.action_at(tree, x) {
            out.push(tree.node(x).actions()[a].label.clone());
            x = tree.node(x).actions()[a].child;
        }
        out
    }

    #[test]
    fn abortion_backward_induction() {
        let game = fixtures::abortion();
        let sol = backward_induction(&game.standalone()).unwrap();
        assert_eq!(sol.payoffs(&game.tree), vec![3.0, 2.0, 1.0]);
        assert_eq!(labels_on_path(&game, &sol), vec!["Illegal", "N"]);
        let clinic = game.tree.node_by_name("clinic_illegal").unwrap();
        assert_eq!(sol.profile.action_at(&game.tree, clinic), Some(0));
    }

    #[test]
    fn example2_backward_induction() {
        let game = fixtures::example2();
        let sol = backward_induction(&game.standalone()).unwrap();
        assert_eq!(sol.payoffs(&game.tree), vec![5.0, 5.0, 3.0]);
        assert!(sol.profile.is_well_formed(&game.tree));
        assert_eq!(sol.profile.len(), 7);
    }

    #[test]
    fn example2_supergame_13() {
        let game = fixtures::example2();
        let view = SupergameView::build_supergame(&game, c(&[1, 3])).unwrap();
        let sol = backward_induction(&view).unwrap();
        assert_eq!(sol.payoffs(&game.tree), vec![6.0, 3.0, 5.0]);
        assert_eq!(labels_on_path(&game, &sol), vec!["R", "d", "l"]);
        let x6 = game.tree.node_by_name("x6").unwrap();
        assert_eq!(sol.profile.get(game.tree.node(x6).info_set().unwrap()).unwrap().owner, c(&[2]));
    }

    #[test]
    fn best_response_at_x6() {
        let game = fixtures::example2();
        let view = game.standalone();
        let tree = &game.tree;
        let x6 = tree.node_by_name("x6").unwrap();
        let outcomes =
            [Outcome::pure(tree.node_by_name("z6").unwrap()), Outcome::pure(tree.node_by_name("z7").unwrap())];
        assert_eq!(best_response_at(&view, x6, &outcomes), (0, 2.0));
        assert_eq!(best_response_at(&view, x6, &outcomes[..1]), (0, 2.0));
        let tie = [outcomes[1].clone(), outcomes[1].clone()];
        assert_eq!(best_response_at(&view, x6, &tie).0, 0);
    }

    #[test]
    fn matching_pennies_mixes_evenly() {
        let game = fixtures::matching_pennies();
        let view = game.standalone();
        let s = game.tree.node_by_name("s").unwrap();
        let sol = spne_in_subgame(&view, s).unwrap();
        let payoffs = sol.payoffs(&game.tree);
        assert!(payoffs.iter().all(|v| v.abs() < 1e-9), "{payoffs:?}");
        for (_, m) in sol.profile.iter() {
            match &m.choice {
                Choice::Mixed(p) => assert!(p.iter().all(|x| (x - 0.5).abs() < 1e-9)),
                Choice::Pure(_) => panic!("expected mixing"),
            }
        }
        let whole = backward_induction(&view);
        assert!(matches!(whole, Err(SolveError::ImperfectInformation(_))));
        assert!(matches!(spne_in_subgame(&view, game.tree.node_by_name("th").unwrap()), Err(SolveError::Model(_))));
        let root = spne_in_subgame(&view, game.tree.root()).unwrap();
        assert_eq!(root.profile.action_at(&game.tree, game.tree.root()), Some(1));
        assert!(root.payoffs(&game.tree).iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn prisoners_dilemma_defects() {
        let game = fixtures::prisoners_dilemma();
        let sol = spne_in_subgame(&game.standalone(), game.tree.root()).unwrap();
        assert_eq!(sol.payoffs(&game.tree), vec![1.0, 1.0]);
    }

    fn simultaneous(payoffs: [[f64; 2]; 4]) -> Game {
        let text = format!(
            r#"{{"format_version":1,"players":["1","2"],"root":"r",
            "nodes":{{"r":{{"player":1,"actions":{{"A":"u","B":"v"}}}},
            "u":{{"player":2,"actions":{{"a":"z1","b":"z2"}}}},"v":{{"player":2,"actions":{{"a":"z3","b":"z4"}}}},
            "z1":{{"payoffs":{:?}}},"z2":{{"payoffs":{:?}}},"z3":{{"payoffs":{:?}}},"z4":{{"payoffs":{:?}}}}},
            "info_sets":{{"h":["u","v"]}}}}"#,
            payoffs[0], payoffs[1], payoffs[2], payoffs[3]
        );
        validate_game(&parse_game(&text).unwrap()).unwrap()
    }

    #[test]
    fn coordination_picks_first_pure_equilibrium() {
        let game = simultaneous([[2.0, 2.0], [0.0, 0.0], [0.0, 0.0], [1.0, 1.0]]);
        let sol = spne_in_subgame(&game.standalone(), game.tree.root()).unwrap();
        assert_eq!(sol.payoffs(&game.tree), vec![2.0, 2.0]);
        let game = simultaneous([[1.0, 1.0], [0.0, 0.0], [0.0, 0.0], [2.0, 2.0]]);
        let sol = spne_in_subgame(&game.standalone(), game.tree.root()).unwrap();
        assert_eq!(sol.payoffs(&game.tree), vec![1.0, 1.0]);
    }

    #[test]
    fn three_player_pennies_is_unsupported() {
        let mut nodes = vec![r#""r":{"player":1,"actions":{"H":"a","T":"b"}}"#.to_string()];
        let mut set2 = Vec::new();
        let mut set3 = Vec::new();
        for (p1, n2) in [("H", "a"), ("T", "b")] {
            set2.push(format!("\"{n2}\""));
            let mut acts = Vec::new();
            for p2 in ["H", "T"] {
                let n3 = format!("{n2}{p2}");
                set3.push(format!("\"{n3}\""));
                acts.push(format!("\"{p2}\":\"{n3}\""));
                let mut acts3 = Vec::new();
                for p3 in ["H", "T"] {
                    let z = format!("{n3}{p3}");
                    let m = if p1 == p2 { 1.0 } else { -1.0 };
                    nodes.push(format!("\"{z}\":{{\"payoffs\":[{m},{},0]}}", -m));
                    acts3.push(format!("\"{p3}\":\"{z}\""));
                }
                nodes.push(format!("\"{n3}\":{{\"player\":3,\"actions\":{{{}}}}}", acts3.join(",")));
            }
            nodes.push(format!("\"{n2}\":{{\"player\":2,\"actions\":{{{}}}}}", acts.join(",")));
        }
        let text = format!(
            r#"{{"format_version":1,"players":["1","2","3"],"root":"r","nodes":{{{}}},"info_sets":{{"h2":[{}],"h3":[{}]}}}}"#,
            nodes.join(","),
            set2.join(","),
            set3.join(",")
        );
        let game = validate_game(&parse_game(&text).unwrap()).unwrap();
        let err = spne_in_subgame(&game.standalone(), game.tree.root()).unwrap_err();
        assert!(matches!(err, SolveError::MixedEquilibriumUnsupported { players: 3, .. }), "{err:?}");
    }

    #[test]
    fn support_enumeration_on_known_games() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        let (x, y) = support_enumeration(&a, &(-&a)).unwrap();
        assert!(x.iter().chain(&y).all(|p| (p - 0.5).abs() < 1e-12));
        // Rock-paper-scissors: uniform.
        let a = DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 1.0, 1.0, 0.0, -1.0, -1.0, 1.0, 0.0]);
        let (x, y) = support_enumeration(&a, &(-&a)).unwrap();
        assert!(x.iter().chain(&y).all(|p| (p - 1.0 / 3.0).abs() < 1e-9));
        // Dominance: the pure equilibrium is found with support size one.
        let a = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 5.0, 1.0]);
        let (x, y) = support_enumeration(&a, &a.transpose()).unwrap();
        assert_eq!((x, y), (vec![0.0, 1.0], vec![0.0, 1.0]));
    }

    #[test]
    fn tuples_and_combinations() {
        assert_eq!(all_tuples(&[2, 3]).len(), 6);
        assert_eq!(all_tuples(&[2, 1])[1], vec![1, 0]);
        assert_eq!(all_tuples(&[]), vec![Vec::<usize>::new()]);
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn restriction_replays_outcome() {
        let game = fixtures::example2();
        let sol = backward_induction(&game.standalone()).unwrap();
        let x6 = game.tree.node_by_name("x6").unwrap();
        let sub = sol.restrict(&game.tree, x6);
        assert_eq!(sub.payoffs(&game.tree), vec![2.0, 2.0, 6.0]);
        assert_eq!(sub.profile.len(), 3);
        assert_eq!(sub.partitions.len(), 3);
        assert_eq!(sol.individual_value(&game, Player(0)), 5.0);
    }
}
