//! Reading, writing and rendering games and solutions.

pub mod dot;
pub mod fixtures;
pub mod json;
pub mod spec;
pub mod trace;
mod validate;

pub use dot::export_dot;
pub use json::profile_json;
pub use spec::{parse_game, serialize_game, GameSpec, ParseError};
pub use trace::{bracket, render_solution, render_trace, summary_bracket, Verbosity};
pub use validate::validate_game;
