//! Recursive induction: at each subgame root the mover's noncooperative
//! choice is compared with the solutions of the supergames in which the
//! mover's block merges with others, and the greatest individually rational
//! point is adopted.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::model::{
    strictly_greater, Coalition, Game, GameTree, NodeId, NodeKind, Outcome, Partition, Player, SupergameView,
};
use crate::noncoop::{region, solve_region, Choice, LocalSolution, Move, SolveError, StrategyProfile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    IndexPoint,
    SupergameSolved,
    IrAccepted,
    IrRejected,
    Adopted,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepKind::IndexPoint => "index-point",
            StepKind::SupergameSolved => "supergame-solved",
            StepKind::IrAccepted => "ir-accepted",
            StepKind::IrRejected => "ir-rejected",
            StepKind::Adopted => "adopted",
        })
    }
}

/// One event of the solve, in the order it happened.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveStep {
    pub node: NodeId,
    /// Partition of the view being solved at `node`.
    pub context: Partition,
    pub kind: StepKind,
    pub coalition: Coalition,
    /// The block containing `coalition` in the point's partition.
    pub block: Coalition,
    /// Expected payoff vector over base players.
    pub outcome: Vec<f64>,
    /// Every base player's `u_i` under the point's partition.
    pub values: Vec<f64>,
    /// The active player's value of the point.
    pub active_value: f64,
    pub reason: String,
    /// The first agent that failed to improve, for rejections.
    pub agent: Option<Player>,
}

/// A candidate solution at a node: the mover's own choice (`index == 0`)
/// or the solution of a supergame.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReferencePoint {
    pub index: usize,
    /// `C_j`: the coalition whose supergame this is; the mover's block for
    /// the index point.
    pub coalition: Coalition,
    /// Partition of the view the point was solved in.
    pub source: Partition,
    /// Partition in force at the node under this point.
    pub partition: Partition,
    /// `C̄_j`: the block of `partition` containing `coalition`.
    pub block: Coalition,
    pub outcome: Outcome,
    pub active_value: f64,
}

#[derive(Clone, Debug)]
struct Entry {
    choices: Vec<(crate::model::InfoSetId, Coalition, Choice)>,
    index_outcome: Outcome,
    /// Partition at the node after adoption; its own entry adopts itself.
    adopted: Partition,
    outcome: Outcome,
    points: Vec<ReferencePoint>,
}

struct Engine<'g> {
    game: &'g Game,
    cooperative: bool,
    memo: HashMap<(NodeId, Partition), Entry>,
    trace: Vec<SolveStep>,
    measures: Vec<(usize, usize)>,
    /// Players moving somewhere in each subtree.
    acting: Vec<Coalition>,
}

impl<'g> Engine<'g> {
    fn new(game: &'g Game, cooperative: bool) -> Self {
        let tree = &game.tree;
        let mut acting = vec![Coalition::default(); tree.len()];
        for x in tree.bottom_up_order() {
            let node = tree.node(x);
            let mut c = node.player().map(Coalition::singleton).unwrap_or_default();
            for a in node.actions() {
                c = c.union(acting[a.child.0]);
            }
            acting[x.0] = c;
        }
        Engine { game, cooperative, memo: HashMap::new(), trace: Vec::new(), measures: Vec::new(), acting }
    }

    fn tree(&self) -> &'g GameTree {
        &self.game.tree
    }

    fn view(&self, p: &Partition) -> SupergameView<'g> {
        SupergameView::with_partition(self.game, p.clone())
    }

    fn step(&mut self, x: NodeId, context: &Partition, kind: StepKind, point: &ReferencePoint, reason: String) {
        let view = self.view(&point.partition);
        let values =
            (0..self.tree().player_count()).map(|i| view.individual_value(Player(i), &point.outcome)).collect();
        self.trace.push(SolveStep {
            node: x,
            context: context.clone(),
            kind,
            coalition: point.coalition,
            block: point.block,
            outcome: point.outcome.payoffs(self.tree()),
            values,
            active_value: point.active_value,
            reason,
            agent: None,
        });
    }

    /// The adopted outcome and partition of the view `p` at `x`.
    fn solve(&mut self, x: NodeId, p: &Partition) -> Result<(Outcome, Partition), SolveError> {
        if let Some(e) = self.memo.get(&(x, p.clone())) {
            return Ok((e.outcome.clone(), e.adopted.clone()));
        }
        let measure = (p.len(), self.tree().subtree_size(x));
        if let Some(&top) = self.measures.last() {
            if measure >= top {
                return Err(SolveError::Termination(self.tree().node(x).name.clone()));
            }
        }
        self.measures.push(measure);
        let result = self.solve_fresh(x, p);
        self.measures.pop();
        let entry = result?;
        let out = (entry.outcome.clone(), entry.adopted.clone());
        self.memo.insert((x, p.clone()), entry);
        Ok(out)
    }

    fn solve_fresh(&mut self, x: NodeId, p: &Partition) -> Result<Entry, SolveError> {
        let tree = self.tree();
        match &tree.node(x).kind {
            NodeKind::Terminal { .. } => Ok(Entry {
                choices: Vec::new(),
                index_outcome: Outcome::pure(x),
                adopted: p.clone(),
                outcome: Outcome::pure(x),
                points: Vec::new(),
            }),
            NodeKind::Chance { actions, probabilities } => {
                let mut parts = Vec::new();
                for (a, prob) in actions.iter().zip(probabilities) {
                    if !tree.is_subgame_root(a.child) {
                        return Err(SolveError::ChanceBranchNotSubgame(tree.node(a.child).name.clone()));
                    }
                    let (o, _) = self.solve(a.child, p)?;
                    parts.push((*prob, o));
                }
                let outcome = Outcome::mix(parts.iter().map(|(q, o)| (*q, o)));
                Ok(Entry {
                    choices: Vec::new(),
                    index_outcome: outcome.clone(),
                    adopted: p.clone(),
                    outcome,
                    points: Vec::new(),
                })
            }
            NodeKind::Decision { player, .. } => {
                let reg = region(tree, x);
                let mut below = HashMap::new();
                for &f in &reg.frontier {
                    let (o, _) = self.solve(f, p)?;
                    below.insert(f, o);
                }
                let view = self.view(p);
                let local = solve_region(&view, x, &|f| below[&f].clone())?;
                let owner = p.block_of(*player);
                let r0 = ReferencePoint {
                    index: 0,
                    coalition: owner,
                    source: p.clone(),
                    partition: p.clone(),
                    block: owner,
                    active_value: self.active_value(owner, &local.outcome, p),
                    outcome: local.outcome.clone(),
                };
                self.step(x, p, StepKind::IndexPoint, &r0, "best-response".into());
                let mut points = vec![r0];
                if self.cooperative {
                    self.supergame_points(x, p, owner, &mut points)?;
                }
                let adopted = self.ir_chain(x, p, &points);
                let point = &points[adopted];
                self.step(x, p, StepKind::Adopted, point, format!("point:{}", point.index));
                Ok(Entry {
                    choices: local.choices,
                    index_outcome: local.outcome,
                    adopted: point.partition.clone(),
                    outcome: point.outcome.clone(),
                    points,
                })
            }
        }
    }

    fn active_value(&self, owner: Coalition, outcome: &Outcome, partition: &Partition) -> f64 {
        self.view(partition).player_value(owner, outcome)
    }

    /// Supergames in which `owner` merges with one or more other blocks of
    /// `p` into a feasible coalition, solved and sorted by the owner's value.
    fn supergame_points(
        &mut self,
        x: NodeId,
        p: &Partition,
        owner: Coalition,
        points: &mut Vec<ReferencePoint>,
    ) -> Result<(), SolveError> {
        let others: Vec<Coalition> = p.blocks().iter().copied().filter(|b| *b != owner).collect();
        if others.len() >= 63 {
            return Err(SolveError::Termination(self.tree().node(x).name.clone()));
        }
        let mut candidates = Vec::new();
        for mask in 1u64..(1u64 << others.len()) {
            let c = others
                .iter()
                .enumerate()
                .filter(|(k, _)| mask & (1 << k) != 0)
                .fold(owner, |acc, (_, b)| acc.union(*b));
            if self.game.utility.is_feasible(c) {
                candidates.push(c);
            }
        }
        candidates.sort();

        let mut found = Vec::new();
        for c in candidates {
            let source = p.merge(c);
            let (outcome, partition) = self.solve(x, &source)?;
            let block = partition.block_containing(c).expect("adopted partitions only coarsen");
            let point = ReferencePoint {
                index: 0,
                coalition: c,
                source,
                active_value: self.active_value(owner, &outcome, &partition),
                partition,
                block,
                outcome,
            };
            let idle = !c.is_subset_of(self.acting[x.0]);
            let reason = if idle { "solved:idle-members" } else { "solved" };
            self.step(x, p, StepKind::SupergameSolved, &point, reason.into());
            found.push(point);
        }
        found.sort_by(|a, b| {
            quantize(a.active_value).total_cmp(&quantize(b.active_value)).then(a.coalition.cmp(&b.coalition))
        });
        for (k, mut point) in found.into_iter().enumerate() {
            point.index = k + 1;
            points.push(point);
        }
        Ok(())
    }

    /// Walks the ordered points, accepting each one that every agent of its
    /// block strictly prefers to the last accepted point. Returns the index
    /// of the last accepted point.
    fn ir_chain(&mut self, x: NodeId, context: &Partition, points: &[ReferencePoint]) -> usize {
        let mut accepted = 0;
        for j in 1..points.len() {
            let (cand, acc) = (&points[j], &points[accepted]);
            let failing = cand.block.members().find(|&i| {
                let new = self.view(&cand.partition).individual_value(i, &cand.outcome);
                let old = self.view(&acc.partition).individual_value(i, &acc.outcome);
                !strictly_greater(new, old)
            });
            match failing {
                None => {
                    self.step(x, context, StepKind::IrAccepted, cand, format!("improves-over:{}", acc.index));
                    accepted = j;
                }
                Some(agent) => {
                    self.step(x, context, StepKind::IrRejected, cand, format!("not-improving:{agent}"));
                    self.trace.last_mut().expect("just pushed").agent = Some(agent);
                }
            }
        }
        accepted
    }

    /// The solution of view `p` at `x` after adoption.
    fn materialize(&self, x: NodeId, p: &Partition) -> LocalSolution {
        let adopted = &self.memo[&(x, p.clone())].adopted;
        self.materialize_index(x, adopted)
    }

    /// The index point of view `p` at `x`, extended by the adopted
    /// solutions below.
    fn materialize_index(&self, x: NodeId, p: &Partition) -> LocalSolution {
        let tree = self.tree();
        let entry = &self.memo[&(x, p.clone())];
        let mut profile = StrategyProfile::new();
        let mut partitions = BTreeMap::new();
        match &tree.node(x).kind {
            NodeKind::Terminal { .. } => {}
            NodeKind::Chance { actions, .. } => {
                for a in actions {
                    let branch = self.materialize(a.child, p);
                    profile.extend(&branch.profile);
                    partitions.extend(branch.partitions);
                }
            }
            NodeKind::Decision { .. } => {
                let reg = region(tree, x);
                for &f in &reg.frontier {
                    let below = self.materialize(f, p);
                    profile.extend(&below.profile);
                    partitions.extend(below.partitions);
                }
                for (h, owner, choice) in &entry.choices {
                    profile.insert(*h, Move { owner: *owner, choice: choice.clone() });
                }
                for &y in &reg.nodes {
                    partitions.insert(y, p.clone());
                }
            }
        }
        LocalSolution { root: x, profile, partitions, outcome: entry.index_outcome.clone() }
    }
}

fn quantize(v: f64) -> f64 {
    (v * 1e9).round()
}

/// The full family of solutions produced by one solve.
#[derive(Clone, Debug)]
pub struct SolutionProfile {
    /// The adopted solution at the game root.
    pub root_entry: LocalSolution,
    /// `(h, g)`: the solution adopted at `h` (every player initially on
    /// their own), restricted to the subgame at `g`.
    pub entries: BTreeMap<(NodeId, NodeId), LocalSolution>,
    pub trace: Vec<SolveStep>,
    memo: HashMap<(NodeId, Partition), Entry>,
    players: usize,
}

impl SolutionProfile {
    fn from_engine(engine: Engine) -> Self {
        let tree = engine.tree();
        let singletons = Partition::singletons(tree.player_count());
        let root_entry = engine.materialize(tree.root(), &singletons);
        let mut entries = BTreeMap::new();
        let roots: Vec<NodeId> =
            tree.subtree(tree.root()).filter(|&x| tree.is_subgame_root(x) && !tree.node(x).is_terminal()).collect();
        for &h in &roots {
            let context = engine.materialize(h, &singletons);
            for &g in roots.iter().filter(|&&g| tree.is_descendant(g, h)) {
                let entry = if g == h { context.clone() } else { context.restrict(tree, g) };
                entries.insert((h, g), entry);
            }
        }
        SolutionProfile { root_entry, entries, trace: engine.trace, memo: engine.memo, players: tree.player_count() }
    }

    pub fn entry(&self, h: NodeId, g: NodeId) -> Option<&LocalSolution> {
        self.entries.get(&(h, g))
    }

    /// The partition adopted at the root; `None` for a chance root.
    pub fn root_partition(&self) -> Option<&Partition> {
        self.root_entry.root_partition()
    }

    /// Reference points considered at `x` when every player starts alone,
    /// in sequence order.
    pub fn reference_points(&self, x: NodeId) -> &[ReferencePoint] {
        self.memo.get(&(x, Partition::singletons(self.players))).map(|e| e.points.as_slice()).unwrap_or(&[])
    }

    /// Reference points at `x` in the view with partition `p`, if solved.
    pub fn reference_points_in(&self, x: NodeId, p: &Partition) -> Option<&[ReferencePoint]> {
        self.memo.get(&(x, p.clone())).map(|e| e.points.as_slice())
    }

    /// Number of (node, partition) views solved.
    pub fn views_solved(&self) -> usize {
        self.memo.len()
    }
}

fn run(game: &Game, cooperative: bool) -> Result<SolutionProfile, SolveError> {
    let mut engine = Engine::new(game, cooperative);
    let singletons = Partition::singletons(game.player_count());
    engine.solve(game.tree.root(), &singletons)?;
    Ok(SolutionProfile::from_engine(engine))
}

/// Recursive induction on a perfect-information game.
pub fn solve_ri(game: &Game) -> Result<SolutionProfile, SolveError> {
    if let Some(h) = game.tree.info_sets().iter().find(|h| !h.is_singleton()) {
        return Err(SolveError::ImperfectInformation(h.name.clone()));
    }
    run(game, true)
}

/// Recursive induction over subgames. Inside a subgame, information sets
/// above every proper subgame are played as an equilibrium of their normal
/// form; the subgame root's mover initiates the supergames.
pub fn solve_ri_imperfect(game: &Game) -> Result<SolutionProfile, SolveError> {
    run(game, true)
}

/// Recursive induction on any game, perfect information or not.
pub fn solve(game: &Game) -> Result<SolutionProfile, SolveError> {
    run(game, true)
}

/// The index point at `x` of the view with partition `p`: the mover's best
/// response given the adopted solutions below.
pub fn index_reference_point(game: &Game, x: NodeId, p: &Partition) -> Result<ReferencePoint, SolveError> {
    enumerate_reference_points(game, x, p).map(|mut points| points.swap_remove(0))
}

/// All reference points at `x` of the view with partition `p`, index point
/// first, supergames ordered by the mover's value then coalition order.
pub fn enumerate_reference_points(game: &Game, x: NodeId, p: &Partition) -> Result<Vec<ReferencePoint>, SolveError> {
    let mut engine = Engine::new(game, true);
    engine.solve(x, p)?;
    Ok(engine.memo[&(x, p.clone())].points.clone())
}

/// The last point of `points` accepted by the individual-rationality chain.
pub fn ir_chain(game: &Game, points: &[ReferencePoint]) -> ReferencePoint {
    let mut engine = Engine::new(game, true);
    let context = points[0].source.clone();
    let k = engine.ir_chain(NodeId(0), &context, points);
    points[k].clone()
}

/// Materializes the solution behind a reference point.
pub fn point_solution(game: &Game, x: NodeId, point: &ReferencePoint) -> Result<LocalSolution, SolveError> {
    let mut engine = Engine::new(game, true);
    engine.solve(x, &point.source)?;
    Ok(if point.index == 0 { engine.materialize_index(x, &point.source) } else { engine.materialize(x, &point.source) })
}

/// Probability-weighted combination of independently solved branches.
pub fn combine_chance_root(tree: &GameTree, branches: &[(f64, LocalSolution)]) -> LocalSolution {
    let mut profile = StrategyProfile::new();
    let mut partitions = BTreeMap::new();
    for (_, b) in branches {
        profile.extend(&b.profile);
        partitions.extend(b.partitions.iter().map(|(x, p)| (*x, p.clone())));
    }
    let outcome = Outcome::mix(branches.iter().map(|(p, b)| (*p, &b.outcome)));
    let root = match branches {
        [(_, only)] => only.root,
        _ => tree.root(),
    };
    LocalSolution { root, profile, partitions, outcome }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::fixtures;
    use crate::noncoop::backward_induction;

    fn c(members: &[usize]) -> Coalition {
        Coalition::from_players(members.iter().map(|&m| Player(m - 1))).unwrap()
    }

    fn node(game: &Game, name: &str) -> NodeId {
        game.tree.node_by_name(name).unwrap()
    }

    #[test]
    fn abortion_ri() {
        let game = fixtures::abortion();
        let sol = solve_ri(&game).unwrap();
        assert_eq!(sol.root_entry.payoffs(&game.tree), vec![2.0, 4.0, 3.0]);
        assert_eq!(sol.root_partition(), Some(&Partition::singletons(3)));
        let ill = node(&game, "ind_illegal");
        let entry = sol.entry(ill, ill).unwrap();
        assert_eq!(entry.root_partition(), Some(&Partition::merged(3, c(&[2, 3]))));
        assert_eq!(entry.payoffs(&game.tree), vec![1.0, 3.0, 2.0]);
        let legal = node(&game, "ind_legal");
        assert_eq!(sol.entry(legal, legal).unwrap().root_partition(), Some(&Partition::singletons(3)));
        let r0 = index_reference_point(&game, game.tree.root(), &Partition::singletons(3)).unwrap();
        assert_eq!(r0.outcome.payoffs(&game.tree), vec![2.0, 4.0, 3.0]);
    }

    #[test]
    fn example2_ri() {
        let game = fixtures::example2();
        let sol = solve_ri(&game).unwrap();
        assert_eq!(sol.root_entry.payoffs(&game.tree), vec![6.0, 3.0, 5.0]);
        assert_eq!(sol.root_partition(), Some(&Partition::merged(3, c(&[1, 3]))));
        let x5 = node(&game, "x5");
        assert_eq!(sol.entry(x5, x5).unwrap().payoffs(&game.tree), vec![1.0, 6.0, 4.0]);
        let x6 = node(&game, "x6");
        assert_eq!(sol.entry(x6, x6).unwrap().payoffs(&game.tree), vec![2.0, 2.0, 6.0]);

        let points = sol.reference_points(game.tree.root());
        let seq: Vec<(Coalition, Vec<f64>, f64)> =
            points.iter().map(|p| (p.coalition, p.outcome.payoffs(&game.tree), p.active_value)).collect();
        assert_eq!(
            seq,
            vec![
                (c(&[1]), vec![2.0, 2.0, 6.0], 2.0),
                (c(&[1, 2, 3]), vec![4.0, 4.0, 5.0], 4.0),
                (c(&[1, 2]), vec![5.0, 5.0, 3.0], 5.0),
                (c(&[1, 3]), vec![6.0, 3.0, 5.0], 6.0),
            ]
        );
        let best = ir_chain(&game, points);
        assert_eq!(best.coalition, c(&[1, 3]));
    }

    #[test]
    fn example2_x5_chain() {
        let game = fixtures::example2();
        let sol = solve_ri(&game).unwrap();
        let points = sol.reference_points(node(&game, "x5"));
        assert_eq!(points[0].outcome.payoffs(&game.tree), vec![5.0, 5.0, 3.0]);
        let best = ir_chain(&game, points);
        assert_eq!(best.coalition, c(&[2, 3]));
        assert_eq!(best.outcome.payoffs(&game.tree), vec![1.0, 6.0, 4.0]);
    }

    #[test]
    fn modified_example2_ri() {
        let game = fixtures::example2_modified();
        let sol = solve_ri(&game).unwrap();
        assert_eq!(sol.root_entry.payoffs(&game.tree), vec![5.0, 5.0, 3.0]);
        assert_eq!(sol.root_partition(), Some(&Partition::merged(3, c(&[1, 2]))));
        let rejected = sol
            .trace
            .iter()
            .find(|s| s.node == game.tree.root() && s.kind == StepKind::IrRejected && s.coalition == c(&[1, 3]))
            .expect("{1,3} is rejected at the root");
        assert_eq!(rejected.agent, Some(Player(0)));
    }

    #[test]
    fn singleton_reduction_on_fixtures() {
        for game in [fixtures::abortion(), fixtures::example2(), fixtures::example2_modified()] {
            let game = game.noncooperative();
            let sol = solve_ri(&game).unwrap();
            let bi = backward_induction(&game.standalone()).unwrap();
            assert_eq!(sol.root_entry.outcome, bi.outcome);
            assert_eq!(sol.root_entry.profile, bi.profile);
            assert!(sol.trace.iter().all(|s| s.kind == StepKind::IndexPoint || s.kind == StepKind::Adopted));
        }
    }

    #[test]
    fn prisoners_dilemma_forms_grand_coalition() {
        let game = fixtures::prisoners_dilemma();
        assert!(matches!(solve_ri(&game), Err(SolveError::ImperfectInformation(_))));
        let sol = solve_ri_imperfect(&game).unwrap();
        let points = sol.reference_points(game.tree.root());
        assert_eq!(points[0].outcome.payoffs(&game.tree), vec![1.0, 1.0]);
        assert_eq!(sol.root_entry.payoffs(&game.tree), vec![3.0, 3.0]);
        assert_eq!(sol.root_partition(), Some(&Partition::merged(2, Coalition::grand(2))));
    }

    #[test]
    fn matching_pennies_value() {
        let game = fixtures::matching_pennies();
        let sol = solve_ri_imperfect(&game).unwrap();
        let s = node(&game, "s");
        let entry = sol.entry(s, s).unwrap();
        assert!(entry.payoffs(&game.tree).iter().all(|v| v.abs() < 1e-9));
        assert_eq!(entry.root_partition(), Some(&Partition::singletons(2)));
        assert!(sol.root_entry.payoffs(&game.tree).iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn chance_root_combines_branches() {
        let text = r#"{"format_version":1,"players":["1","2"],"root":"n","chance":{"a":0.5,"b":0.5},
            "nodes":{"n":{"actions":{"left":"a","right":"b"}},
            "a":{"player":1,"actions":{"x":"z1","y":"z2"}},"z1":{"payoffs":[2,0]},"z2":{"payoffs":[1,1]},
            "b":{"player":2,"actions":{"x":"z3","y":"z4"}},"z3":{"payoffs":[0,2]},"z4":{"payoffs":[1,1]}},
            "coalitions":{"feasible":[]}}"#;
        let game = crate::io::validate_game(&crate::io::parse_game(text).unwrap()).unwrap();
        let sol = solve_ri(&game).unwrap();
        assert_eq!(sol.root_entry.payoffs(&game.tree), vec![1.0, 1.0]);
        assert_eq!(sol.root_partition(), None);
        let a = node(&game, "a");
        let b = node(&game, "b");
        let branches = [(0.5, sol.entry(a, a).unwrap().clone()), (0.5, sol.entry(b, b).unwrap().clone())];
        assert_eq!(combine_chance_root(&game.tree, &branches).outcome, sol.root_entry.outcome);
        let one = combine_chance_root(&game.tree, &[(1.0, branches[0].1.clone())]);
        assert_eq!(one, branches[0].1);
    }

    #[test]
    fn memoization_is_transparent() {
        for game in [fixtures::abortion(), fixtures::example2(), fixtures::example2_modified()] {
            let sol = solve_ri(&game).unwrap();
            for x in game.tree.subtree(game.tree.root()).filter(|&x| !game.tree.node(x).is_terminal()) {
                let mut fresh = Engine::new(&game, true);
                let p = Partition::singletons(3);
                let (outcome, adopted) = fresh.solve(x, &p).unwrap();
                assert_eq!(sol.entry(x, x).unwrap().outcome, outcome);
                assert_eq!(sol.entry(x, x).unwrap().root_partition(), Some(&adopted));
            }
        }
    }

    #[test]
    fn point_solutions_materialize() {
        let game = fixtures::example2();
        let root = game.tree.root();
        let points = enumerate_reference_points(&game, root, &Partition::singletons(3)).unwrap();
        for p in &points {
            let sol = point_solution(&game, root, p).unwrap();
            assert_eq!(sol.outcome, p.outcome);
            assert_eq!(sol.root_partition(), Some(&p.partition));
            assert_eq!(sol.profile.play(&game.tree, root), Some(p.outcome.clone()));
        }
    }
}
