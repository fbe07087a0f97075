use serde::Serialize;

use super::tree::{GameTree, NodeId};

/// Values closer than this compare equal.
pub const EPS: f64 = 1e-9;

/// A probability distribution over terminal nodes. Pure play reaches a
/// single terminal with probability one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    support: Vec<(NodeId, f64)>,
}

impl Outcome {
    pub fn pure(z: NodeId) -> Self {
        Outcome { support: vec![(z, 1.0)] }
    }

    /// Weighted mixture of outcomes. Zero-weight parts are dropped.
    pub fn mix<'a, I: IntoIterator<Item = (f64, &'a Outcome)>>(parts: I) -> Self {
        let mut support: Vec<(NodeId, f64)> = Vec::new();
        for (w, o) in parts {
            if w <= 0.0 {
                continue;
            }
            for &(z, p) in &o.support {
                match support.iter_mut().find(|(y, _)| *y == z) {
                    Some(e) => e.1 += w * p,
                    None => support.push((z, w * p)),
                }
            }
        }
        support.sort_by_key(|(z, _)| *z);
        Outcome { support }
    }

    pub fn support(&self) -> &[(NodeId, f64)] {
        &self.support
    }

    /// The terminal reached, when play is pure.
    pub fn as_pure(&self) -> Option<NodeId> {
        match self.support.as_slice() {
            [(z, p)] if (p - 1.0).abs() <= EPS => Some(*z),
            _ => None,
        }
    }

    /// Expectation of a per-terminal quantity.
    pub fn expect(&self, mut f: impl FnMut(NodeId) -> f64) -> f64 {
        self.support.iter().map(|&(z, p)| p * f(z)).sum()
    }

    /// Expected payoff vector over base players.
    pub fn payoffs(&self, tree: &GameTree) -> Vec<f64> {
        let mut v = vec![0.0; tree.player_count()];
        for &(z, p) in &self.support {
            for (acc, x) in v.iter_mut().zip(tree.payoffs(z)) {
                *acc += p * x;
            }
        }
        v
    }
}

pub(crate) fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= EPS
}

/// `a` exceeds `b` by more than the comparison tolerance.
pub(crate) fn strictly_greater(a: f64, b: f64) -> bool {
    a > b + EPS
}

/// Formats a payoff: integers without a fractional part.
pub fn format_value(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        let rounded = (v * 1e9).round() / 1e9;
        format!("{rounded}")
    }
}

/// `(a, b, c)`.
pub fn format_payoffs(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format_value(*x)).collect();
    format!("({})", parts.join(", "))
}
