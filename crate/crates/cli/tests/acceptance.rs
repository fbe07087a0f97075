//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use coalitional::io::fixtures;
use coalitional::model::{Coalition, Game, NodeId, Partition, Player};
use coalitional::noncoop::{backward_induction, spne_in_subgame, LocalSolution};
use coalitional::oracle::{equivalence_check, OracleLimits};
use coalitional::random::{random_game, RandomGameConfig};
use coalitional::ri::{solve, solve_ri, SolutionProfile, StepKind};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("../../fixtures");
    p.push(name);
    p.to_string_lossy().into_owned()
}

/// Runs the CLI in-process and returns (stdout, exit status).
fn cli(args: &[&str]) -> (String, i32) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["coalitional"];
    argv.extend_from_slice(args);
    let code = coalitional_cli::run(argv, &mut out, &mut err);
    let mut text = String::from_utf8(out).expect("utf-8 output");
    text.push_str(&String::from_utf8(err).expect("utf-8 errors"));
    (text, code)
}

/// Fastest of several in-process runs, so one cold start does not decide a
/// latency bound.
fn timed(args: &[&str]) -> (String, i32, Duration) {
    let mut best = Duration::MAX;
    let mut result = None;
    for _ in 0..5 {
        let start = Instant::now();
        let r = cli(args);
        best = best.min(start.elapsed());
        result = Some(r);
    }
    let (text, code) = result.expect("ran at least once");
    (text, code, best)
}

fn within(elapsed: Duration, limit_ms: u64) -> Result<String, String> {
    let ms = elapsed.as_secs_f64() * 1e3;
    if ms < limit_ms as f64 {
        Ok(format!("{ms:.2} ms < {limit_ms} ms"))
    } else {
        Err(format!("took {ms:.2} ms, limit {limit_ms} ms"))
    }
}

fn expect_line(text: &str, line: &str) -> Result<(), String> {
    if text.lines().any(|l| l == line) {
        Ok(())
    } else {
        Err(format!("missing line `{line}` in:\n{text}"))
    }
}

fn coalition(members: &[usize]) -> Coalition {
    Coalition::from_players(members.iter().map(|m| Player(m - 1))).expect("nonempty")
}

fn node(game: &Game, name: &str) -> NodeId {
    game.tree.node_by_name(name).unwrap_or_else(|| panic!("no node {name}"))
}

fn criterion_1() -> Check {
    let (text, code, elapsed) = timed(&["bi", &fixture("abortion.game")]);
    if code != 0 {
        return Err(format!("exit {code}: {text}"));
    }
    expect_line(&text, "outcome: (3, 2, 1)")?;
    expect_line(&text, "path: Illegal, N")?;
    Ok(format!("(3, 2, 1) via Illegal, N; {}", within(elapsed, 10)?))
}

fn criterion_2() -> Check {
    let (text, code, elapsed) = timed(&["solve", &fixture("abortion.game")]);
    if code != 0 {
        return Err(format!("exit {code}: {text}"));
    }
    expect_line(&text, "outcome: (2, 4, 3)")?;
    expect_line(&text, "partition: 1,2,3")?;
    let game = fixtures::abortion();
    let profile = solve_ri(&game).map_err(|e| e.to_string())?;
    let ind = node(&game, "ind_illegal");
    let entry = profile.entry(ind, ind).ok_or("no entry for the Illegal subgame")?;
    let block = entry.root_partition().map(|p| p.block_of(Player(1)));
    if block != Some(coalition(&[2, 3])) {
        return Err(format!("Illegal subgame entry has block {block:?}, expected {{2,3}}"));
    }
    if profile.root_partition() != Some(&Partition::singletons(3)) {
        return Err(format!("root partition {:?}", profile.root_partition()));
    }
    Ok(format!("(2, 4, 3), {{2,3}} after Illegal, no coalition at the root; {}", within(elapsed, 50)?))
}

/// Checks that `needles` occur in order, each matched against the lines
/// that follow the previous match. A needle is a node header prefix plus a
/// line predicate inside that node's block.
fn in_order(text: &str, needles: &[(&str, &str, &[&str])]) -> Result<(), String> {
    let lines: Vec<&str> = text.lines().collect();
    let mut cursor = 0;
    for (what, header, parts) in needles {
        let mut current_header = "";
        let mut found = None;
        for (k, line) in lines.iter().enumerate() {
            if !line.starts_with(' ') {
                current_header = line;
            }
            if k < cursor {
                continue;
            }
            if current_header.starts_with(header) && parts.iter().all(|p| line.contains(p)) {
                found = Some(k);
                break;
            }
        }
        match found {
            Some(k) => cursor = k + 1,
            None => return Err(format!("trace lacks, in order: {what}\n{text}")),
        }
    }
    Ok(())
}

fn criterion_3() -> Check {
    let (text, code, elapsed) = timed(&["solve", &fixture("example2.game")]);
    if code != 0 {
        return Err(format!("exit {code}: {text}"));
    }
    expect_line(&text, "outcome: (6, 3, 5)")?;
    expect_line(&text, "partition: {1,3},2")?;
    expect_line(&text, "summary: [{R},{a,d},{e,g,j,l}; {1,3},2]")?;
    in_order(
        &text,
        &[
            ("BI baseline (5, 5, 3)", "baseline", &["(5, 5, 3)"]),
            ("x5 adopts (1, 6, 4)", "node x5 (", &["adopted", "(1, 6, 4)"]),
            ("root index point (2, 2, 6)", "node x7 (", &["index", "(2, 2, 6)"]),
            ("grand coalition rejected by P3", "node x7 (", &["reject", "{1,2,3}", "P3 does not improve"]),
            ("{1,2} accepted at (5, 5, 3)", "node x7 (", &["accept", "{1,2}", "(5, 5, 3)"]),
            ("{1,3} accepted at (6, 3, 5)", "node x7 (", &["accept", "{1,3}", "(6, 3, 5)"]),
        ],
    )?;
    Ok(format!("(6, 3, 5), {{1,3}},2, summary and trace stages in order; {}", within(elapsed, 100)?))
}

fn criterion_4() -> Check {
    let (text, code, elapsed) = timed(&["solve", &fixture("example2-modified.game")]);
    if code != 0 {
        return Err(format!("exit {code}: {text}"));
    }
    expect_line(&text, "outcome: (5, 5, 3)")?;
    expect_line(&text, "partition: {1,2},3")?;
    expect_line(&text, "summary: [{L},{a,c},{e,g,j,k}; {1,2},3]")?;
    in_order(&text, &[("{1,3} rejected at the root", "node x7 (", &["reject", "{1,3}", "does not improve"])])?;
    Ok(format!("(5, 5, 3), {{1,2}},3, {{1,3}} rejected; {}", within(elapsed, 100)?))
}

fn criterion_5() -> Check {
    let (text, code) = cli(&["trace", &fixture("example2.game")]);
    if code != 0 {
        return Err(format!("exit {code}: {text}"));
    }
    let mut sections: Vec<(String, Vec<String>)> = Vec::new();
    for line in text.lines() {
        if line.starts_with(' ') {
            if let Some((_, body)) = sections.last_mut() {
                body.push(line.trim_start().trim_start_matches("- ").to_string());
            }
        } else {
            sections.push((line.to_string(), Vec::new()));
        }
    }
    let heads: Vec<&str> = sections.iter().map(|(h, _)| h.as_str()).collect();
    let mut failures = Vec::new();
    let order = ["1. Node x7", "2. Node x6", "3. Node x5", "4. Nodes x1 to x4"];
    if heads.len() != order.len() || heads.iter().zip(order).any(|(h, o)| !h.starts_with(o)) {
        failures.push(format!("sections {heads:?}"));
    }
    let section =
        |prefix: &str| sections.iter().find(|(h, _)| h.starts_with(prefix)).map(|(_, b)| b.clone()).unwrap_or_default();
    let checks = [
        ("1. Node x7", "Node x7: [{R},{a,d},{e,g,j,l}; {1,3},2]"),
        ("1. Node x7", "Node x6: [{d},{i,l}; 2,{1,3}]"),
        ("1. Node x7", "Node x5: [{a},{e,g}; 2,{1,3}]"),
        ("2. Node x6", "Node x6: [{c},{j,k}; 2,3]"),
        ("3. Node x5", "Node x5: [{b},{h}; {2,3}]"),
    ];
    for (prefix, line) in checks {
        let body = section(prefix);
        if !body.iter().any(|l| l == line) {
            let node = line.split(':').next().unwrap_or_default();
            let got = body.iter().find(|l| l.starts_with(&format!("{node}: "))).cloned().unwrap_or_default();
            failures.push(format!("in section `{prefix}` expected `{line}`, rendered `{got}`"));
        }
    }
    let standalone_x6 = section("2. Node x6").into_iter().find(|l| l.starts_with("Node x6: "));
    let in_context_x6 = section("1. Node x7").into_iter().find(|l| l.starts_with("Node x6: "));
    if standalone_x6.is_none() || standalone_x6 == in_context_x6 {
        failures.push("standalone and in-context x6 entries do not differ".into());
    }
    if failures.is_empty() {
        Ok("nested listing matches".into())
    } else {
        Err(failures.join("; "))
    }
}

fn on_path(game: &Game, sol: &LocalSolution) -> Vec<(NodeId, usize)> {
    let mut out = Vec::new();
    let mut x = sol.root;
    while let Some(a) = sol.profile.action_at(&game.tree, x) {
        out.push((x, a));
        x = game.tree.node(x).actions()[a].child;
    }
    out
}

fn criterion_6() -> Check {
    let start = Instant::now();
    let config = RandomGameConfig { max_players: 3, max_depth: 4, coalitions: false, ..RandomGameConfig::default() };
    let games = 1000;
    for seed in 0..games {
        let game = random_game(seed, &config);
        let ri = solve_ri(&game).map_err(|e| format!("seed {seed}: {e}"))?;
        let bi = backward_induction(&game.standalone()).map_err(|e| format!("seed {seed}: {e}"))?;
        if ri.root_entry.outcome != bi.outcome || on_path(&game, &ri.root_entry) != on_path(&game, &bi) {
            return Err(format!("seed {seed}: RI and BI differ"));
        }
    }
    Ok(format!("{games} games; {}", within(start.elapsed(), 60_000)?))
}

fn criterion_7() -> Check {
    let start = Instant::now();
    let config = RandomGameConfig { max_players: 3, max_nodes: 15, coalitions: true, ..RandomGameConfig::default() };
    let limits = OracleLimits::default();
    let games = 500;
    for k in 0..games {
        let seed = 1_000_000 + k;
        let game = random_game(seed, &config);
        let report = equivalence_check(&game, &limits).map_err(|e| format!("seed {seed}: {e}"))?;
        if !report.matched {
            return Err(format!("seed {seed}: {report}"));
        }
    }
    Ok(format!("{games} games; {}", within(start.elapsed(), 300_000)?))
}

/// Accepted points raise the active player's value and every agent of the
/// accepted block strictly gains over the previously accepted point.
fn ir_chain_holds(profile: &SolutionProfile) -> Result<usize, String> {
    let trace = &profile.trace;
    let mut chains = 0;
    for (i, start) in trace.iter().enumerate() {
        if start.kind != StepKind::IndexPoint {
            continue;
        }
        chains += 1;
        let same = |s: &&coalitional::ri::SolveStep| s.node == start.node && s.context == start.context;
        let mut accepted = start;
        for s in trace[i + 1..].iter().filter(same) {
            match s.kind {
                StepKind::IrAccepted => {
                    if s.active_value <= accepted.active_value + 1e-9 {
                        return Err(format!("value does not rise at {:?}", s.node));
                    }
                    if let Some(m) =
                        s.block.members().find(|m| s.values[m.index()] <= accepted.values[m.index()] + 1e-9)
                    {
                        return Err(format!("agent {m} does not gain at {:?}", s.node));
                    }
                    accepted = s;
                }
                StepKind::Adopted => {
                    if s.outcome != accepted.outcome || s.coalition != accepted.coalition {
                        return Err(format!("adopted point is not the last accepted one at {:?}", s.node));
                    }
                    break;
                }
                _ => {}
            }
        }
    }
    Ok(chains)
}

fn criterion_8() -> Check {
    let mut chains = 0;
    for (name, text) in fixtures::BUNDLED {
        let game = coalitional::validate_game(&coalitional::parse_game(text).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let profile = solve(&game).map_err(|e| format!("{name}: {e}"))?;
        chains += ir_chain_holds(&profile).map_err(|e| format!("{name}: {e}"))?;
    }
    let random = 500;
    for seed in 0..random {
        let game = random_game(2_000_000 + seed, &RandomGameConfig::default());
        let profile = solve_ri(&game).map_err(|e| format!("seed {seed}: {e}"))?;
        chains += ir_chain_holds(&profile).map_err(|e| format!("seed {seed}: {e}"))?;
    }
    Ok(format!("{} fixtures and {random} random games, {chains} chains", fixtures::BUNDLED.len()))
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9)
}

fn criterion_9() -> Check {
    // Prisoner's dilemma, checked against exhaustive 2x2 enumeration.
    let game = fixtures::prisoners_dilemma();
    let tree = &game.tree;
    let cell = |r: usize, c: usize| -> Vec<f64> {
        let second = tree.node(tree.root()).actions()[r].child;
        tree.payoffs(tree.node(second).actions()[c].child).to_vec()
    };
    let mut pure_ne = Vec::new();
    for r in 0..2 {
        for c in 0..2 {
            let u = cell(r, c);
            let row_ok = (0..2).all(|r2| cell(r2, c)[0] <= u[0]);
            let col_ok = (0..2).all(|c2| cell(r, c2)[1] <= u[1]);
            if row_ok && col_ok {
                pure_ne.push(u);
            }
        }
    }
    let grand_best = (0..4)
        .map(|k| cell(k / 2, k % 2))
        .max_by(|a, b| a[0].min(a[1]).total_cmp(&b[0].min(b[1])))
        .expect("four cells");
    if pure_ne.len() != 1 {
        return Err(format!("enumeration found {} pure equilibria", pure_ne.len()));
    }
    let profile = solve(&game).map_err(|e| e.to_string())?;
    let r0 = profile.reference_points(tree.root()).first().ok_or("no reference points at the root")?;
    let r0 = r0.outcome.payoffs(tree);
    if !close(&r0, &pure_ne[0]) || !close(&r0, &[1.0, 1.0]) {
        return Err(format!("r0 {r0:?}, enumeration {:?}", pure_ne[0]));
    }
    let adopted = profile.root_entry.payoffs(tree);
    if !close(&adopted, &grand_best) || !close(&adopted, &[3.0, 3.0]) {
        return Err(format!("adopted {adopted:?}, enumeration {grand_best:?}"));
    }
    if profile.root_partition() != Some(&Partition::merged(2, coalition(&[1, 2]))) {
        return Err(format!("root partition {:?}", profile.root_partition()));
    }

    // Matching pennies: closed-form 2x2 mixed equilibrium.
    let game = fixtures::matching_pennies();
    let tree = &game.tree;
    let s = node(&game, "s");
    let a = |r: usize, c: usize, p: usize| {
        let second = tree.node(s).actions()[r].child;
        tree.payoffs(tree.node(second).actions()[c].child)[p]
    };
    // Player 1 mixes so player 2 is indifferent, and vice versa.
    let p = (a(1, 1, 1) - a(1, 0, 1)) / (a(0, 0, 1) - a(0, 1, 1) - a(1, 0, 1) + a(1, 1, 1));
    let q = (a(1, 1, 0) - a(0, 1, 0)) / (a(0, 0, 0) - a(0, 1, 0) - a(1, 0, 0) + a(1, 1, 0));
    let value: Vec<f64> = (0..2)
        .map(|k| {
            p * q * a(0, 0, k)
                + p * (1.0 - q) * a(0, 1, k)
                + (1.0 - p) * q * a(1, 0, k)
                + (1.0 - p) * (1.0 - q) * a(1, 1, k)
        })
        .collect();
    let sol = spne_in_subgame(&game.standalone(), s).map_err(|e| e.to_string())?;
    let got = sol.payoffs(tree);
    let h1 = tree.node(s).info_set().expect("decision node");
    let h2 = tree.node(tree.node(s).actions()[0].child).info_set().expect("decision node");
    let p1 = sol.profile.get(h1).map(|m| m.choice.probability(0)).unwrap_or(f64::NAN);
    let p2 = sol.profile.get(h2).map(|m| m.choice.probability(0)).unwrap_or(f64::NAN);
    if !close(&got, &value) || !close(&got, &[0.0, 0.0]) || !close(&[p1, p2], &[p, q]) || !close(&[p, q], &[0.5, 0.5]) {
        return Err(format!("subgame value {got:?} with ({p1}, {p2}); closed form {value:?} with ({p}, {q})"));
    }
    let full = solve(&game).map_err(|e| e.to_string())?;
    let entry = full.entry(s, s).ok_or("no entry at s")?;
    if !close(&entry.payoffs(tree), &[0.0, 0.0]) {
        return Err(format!("RI value at s {:?}", entry.payoffs(tree)));
    }
    Ok("PD r0 (1, 1), adopted (3, 3) under {1,2}; pennies value (0, 0) at (1/2, 1/2)".into())
}

fn criterion_10() -> Check {
    let exe = env!("CARGO_BIN_EXE_coalitional");
    for (name, _) in fixtures::BUNDLED {
        let path = fixture(name);
        let run = || Command::new(exe).args(["solve", "--format", "json", &path]).output().map_err(|e| e.to_string());
        let (a, b) = (run()?, run()?);
        if !a.status.success() {
            return Err(format!("{name}: exit {:?}", a.status.code()));
        }
        if a.stdout != b.stdout || a.stdout.is_empty() {
            return Err(format!("{name}: outputs differ"));
        }
    }
    Ok(format!("{} fixtures byte-identical", fixtures::BUNDLED.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("abortion baseline", criterion_1),
        ("abortion recursive induction", criterion_2),
        ("example 2", criterion_3),
        ("modified example 2", criterion_4),
        ("complete-solution rendering", criterion_5),
        ("singleton reduction", criterion_6),
        ("oracle equivalence", criterion_7),
        ("IR-chain monotonicity and stability", criterion_8),
        ("imperfect-information desk check", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let msg =
                panic.downcast_ref::<String>().cloned().or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match result {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
