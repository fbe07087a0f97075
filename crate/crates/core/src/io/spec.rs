//! The game description format.
//!
//! A game file is a JSON document. Object order is significant: it fixes
//! the declared order of nodes and actions, and with it every tie-break.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "players": ["P1", "P2"],
//!   "root": "r",
//!   "nodes": {
//!     "r":  { "player": 1, "actions": { "L": "z1", "R": "z2" } },
//!     "z1": { "payoffs": [1, 0] },
//!     "z2": { "payoffs": [0, 1] }
//!   },
//!   "coalitions": { "feasible": "all", "utility": { "combinator": "min" } }
//! }
//! ```

use std::fmt;
use std::marker::PhantomData;

use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

/// A JSON object that keeps declaration order and rejects repeated keys.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OrderedMap<V>(pub Vec<(String, V)>);

impl<V> OrderedMap<V> {
    pub fn get(&self, key: &str) -> Option<&V> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn get_mut(&mut self, key: &str) -> Option<&mut V> {
        self.0.iter_mut().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &V)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|(k, _)| k.as_str())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<V: Serialize> Serialize for OrderedMap<V> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de, V: Deserialize<'de>> Deserialize<'de> for OrderedMap<V> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct OrderedVisitor<V>(PhantomData<V>);

        impl<'de, V: Deserialize<'de>> Visitor<'de> for OrderedVisitor<V> {
            type Value = OrderedMap<V>;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
                let mut entries: Vec<(String, V)> = Vec::new();
                while let Some(key) = access.next_key::<String>()? {
                    if entries.iter().any(|(k, _)| *k == key) {
                        return Err(de::Error::custom(format_args!("duplicate id `{key}`")));
                    }
                    let value = access.next_value()?;
                    entries.push((key, value));
                }
                Ok(OrderedMap(entries))
            }
        }

        d.deserialize_map(OrderedVisitor(PhantomData))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSpec {
    pub format_version: u32,
    pub players: Vec<String>,
    pub root: String,
    pub nodes: OrderedMap<NodeSpec>,
    /// Probability of each child of the root; makes the root a chance node.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chance: Option<OrderedMap<f64>>,
    /// Non-singleton information sets; unlisted decision nodes stand alone.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub info_sets: Option<OrderedMap<Vec<String>>>,
    #[serde(default)]
    pub coalitions: CoalitionSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub synergies: Vec<SynergySpec>,
}

/// Exactly one of `actions` and `payoffs` must be present.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub player: Option<usize>,
    /// Action label to child id, in declared order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actions: Option<OrderedMap<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payoffs: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoalitionSpec {
    #[serde(default)]
    pub feasible: FeasibleSpec,
    #[serde(default)]
    pub utility: UtilitySpec,
}

/// `"all"`, `"singletons"`, or a list of member lists.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum FeasibleSpec {
    #[default]
    All,
    Listed(Vec<Vec<usize>>),
}

impl Serialize for FeasibleSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            FeasibleSpec::All => s.serialize_str("all"),
            FeasibleSpec::Listed(list) => list.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for FeasibleSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Keyword(String),
            Listed(Vec<Vec<usize>>),
        }
        match Raw::deserialize(d)? {
            Raw::Keyword(k) if k == "all" => Ok(FeasibleSpec::All),
            Raw::Keyword(k) if k == "singletons" => Ok(FeasibleSpec::Listed(Vec::new())),
            Raw::Keyword(k) => Err(de::Error::custom(format_args!(
                "feasible must be \"all\", \"singletons\" or a list of coalitions, found {k:?}"
            ))),
            Raw::Listed(list) => Ok(FeasibleSpec::Listed(list)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CombinatorName {
    Min,
    Sum,
    Weighted,
}

/// Defaults to the `min` combinator when the whole object is omitted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilitySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub combinator: Option<CombinatorName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    /// Coalition key such as `"1,3"` to terminal id to value. Overrides the
    /// combinator where present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<OrderedMap<OrderedMap<f64>>>,
}

impl Default for UtilitySpec {
    fn default() -> Self {
        UtilitySpec { combinator: Some(CombinatorName::Min), weights: None, table: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynergySpec {
    pub player: usize,
    pub block: Vec<usize>,
    pub terminal: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unknown field at line {line}, column {column}: {message}")]
    UnknownField { line: usize, column: usize, message: String },
    #[error("duplicate id at line {line}, column {column}: {message}")]
    DuplicateId { line: usize, column: usize, message: String },
    #[error("unsupported format_version {0}")]
    UnsupportedVersion(u32),
}

impl ParseError {
    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            ParseError::Syntax { line, column, .. }
            | ParseError::UnknownField { line, column, .. }
            | ParseError::DuplicateId { line, column, .. } => Some((*line, *column)),
            ParseError::UnsupportedVersion(_) => None,
        }
    }
}

impl From<serde_json::Error> for ParseError {
    fn from(e: serde_json::Error) -> Self {
        let full = e.to_string();
        let message = match full.rsplit_once(" at line ") {
            Some((m, _)) => m.to_string(),
            None => full.clone(),
        };
        let (line, column) = (e.line(), e.column());
        if message.starts_with("unknown field") {
            ParseError::UnknownField { line, column, message }
        } else if message.starts_with("duplicate id") || message.starts_with("duplicate field") {
            ParseError::DuplicateId { line, column, message }
        } else {
            ParseError::Syntax { line, column, message }
        }
    }
}

/// Parses a game description. Reports the first error with its position.
pub fn parse_game(text: &str) -> Result<GameSpec, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Syntax { line: 1, column: 0, message: "empty input".into() });
    }
    let spec: GameSpec = serde_json::from_str(text)?;
    if spec.format_version != FORMAT_VERSION {
        return Err(ParseError::UnsupportedVersion(spec.format_version));
    }
    Ok(spec)
}

/// Canonical text form: pretty JSON with declared order preserved.
pub fn serialize_game(spec: &GameSpec) -> String {
    let mut out = serde_json::to_string_pretty(spec).expect("game specs always serialize");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_is_a_syntax_error() {
        assert!(matches!(parse_game(""), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_game("  \n"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse_game("{\n  \"format_version\": 1,\n  \"players\": [,]\n}").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn unknown_field_is_reported() {
        let text = r#"{"format_version":1,"players":["a"],"root":"z","nodes":{"z":{"payoffs":[0],"colour":1}}}"#;
        assert!(matches!(parse_game(text), Err(ParseError::UnknownField { .. })));
    }

    #[test]
    fn duplicate_node_id_is_reported() {
        let text =
            r#"{"format_version":1,"players":["a"],"root":"z","nodes":{"z":{"payoffs":[0]},"z":{"payoffs":[1]}}}"#;
        let err = parse_game(text).unwrap_err();
        assert!(matches!(err, ParseError::DuplicateId { line: 1, .. }), "{err:?}");
    }

    #[test]
    fn wrong_version_is_rejected() {
        let text = r#"{"format_version":7,"players":["a"],"root":"z","nodes":{"z":{"payoffs":[0]}}}"#;
        assert_eq!(parse_game(text), Err(ParseError::UnsupportedVersion(7)));
    }

    #[test]
    fn declared_order_survives() {
        let text = r#"{"format_version":1,"players":["a"],"root":"r",
            "nodes":{"r":{"player":1,"actions":{"zz":"b","aa":"a"}},"b":{"payoffs":[1]},"a":{"payoffs":[0]}}}"#;
        let spec = parse_game(text).unwrap();
        let labels: Vec<&str> = spec.nodes.get("r").unwrap().actions.as_ref().unwrap().keys().collect();
        assert_eq!(labels, vec!["zz", "aa"]);
        assert_eq!(spec.coalitions.utility.combinator, Some(CombinatorName::Min));
        assert_eq!(spec.coalitions.feasible, FeasibleSpec::All);
    }

    #[test]
    fn feasible_keywords() {
        let base =
            r#"{"format_version":1,"players":["a"],"root":"z","nodes":{"z":{"payoffs":[0]}},"coalitions":{"feasible":"#;
        let spec = parse_game(&format!("{base}\"singletons\"}}}}")).unwrap();
        assert_eq!(spec.coalitions.feasible, FeasibleSpec::Listed(vec![]));
        assert!(parse_game(&format!("{base}\"some\"}}}}")).is_err());
    }
}
