//! Parser for the model's reply: three category lines followed by a
//! narration between `#` marks.
//!
//! ```text
//! - Moved object: <banana> now is in <Inventory>,  <axe> now is in <Main Hall>
//! - Blocked passages now available: None
//! - Your location changed: <Small room>
//! # You put the banana in your bag. #
//! ```
//!
//! The parser is lenient: labels are case-insensitive, the leading dash is
//! optional, categories may be repeated, and anything it does not recognise
//! is skipped. It only fails when nothing at all can be extracted.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{MoveItem, MovePlayer, TurnPlan, UnblockLocation};
use crate::world::strip_brackets;

const MOVED_LABEL: &str = "Moved object";
const UNBLOCKED_LABEL: &str = "Blocked passages now available";
const LOCATION_LABEL: &str = "Your location changed";
const NOW_IS_IN: &str = "now is in";
const NONE: &str = "None";

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ParsedMove {
    pub object: String,
    pub destination: String,
}

/// Structured content of one model reply.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ParsedResponse {
    pub moves: Vec<ParsedMove>,
    pub unblocked: Vec<String>,
    pub new_location: Option<String>,
    pub narration: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("reply contains no category line and no narration")]
    Garbled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Category {
    Moved,
    Unblocked,
    Location,
}

fn category_of(label: &str) -> Option<Category> {
    let label = label.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
    match label.as_str() {
        "moved object" | "moved objects" => Some(Category::Moved),
        "blocked passages now available" | "blocked passage now available" => {
            Some(Category::Unblocked)
        }
        "your location changed" => Some(Category::Location),
        _ => None,
    }
}

/// Byte offset of the first ASCII-case-insensitive occurrence of `needle`.
fn find_ignore_case(haystack: &str, needle: &str) -> Option<usize> {
    haystack.char_indices().map(|(i, _)| i).find(|&i| {
        haystack
            .get(i..i + needle.len())
            .is_some_and(|s| s.eq_ignore_ascii_case(needle))
    })
}

fn is_none(s: &str) -> bool {
    let s = strip_brackets(s);
    s.is_empty() || s.eq_ignore_ascii_case(NONE)
}

/// Splits the narration off the reply. Everything between the first and the
/// last `#` is narration; a lone `#` opens a narration that runs to the end.
fn split_narration(raw: &str) -> (String, Option<String>) {
    let Some(first) = raw.find('#') else {
        return (raw.to_string(), None);
    };
    let last = raw.rfind('#').unwrap_or(first);
    if last == first {
        return (raw[..first].to_string(), Some(raw[first + 1..].trim().to_string()));
    }
    let outside = format!("{}\n{}", &raw[..first], &raw[last + 1..]);
    (outside, Some(raw[first + 1..last].trim().to_string()))
}

fn parse_moves(payload: &str, out: &mut Vec<ParsedMove>) {
    // Bare objects without a destination ("<a>, <b> now is in <X>") share
    // the destination of the next complete entry.
    let mut pending: Vec<String> = Vec::new();
    for fragment in payload.split(',') {
        let fragment = fragment.trim();
        if is_none(fragment) {
            continue;
        }
        match find_ignore_case(fragment, NOW_IS_IN) {
            Some(at) => {
                let object = strip_brackets(&fragment[..at]).to_string();
                let destination = strip_brackets(&fragment[at + NOW_IS_IN.len()..]).to_string();
                if destination.is_empty() || is_none(&destination) {
                    pending.clear();
                    continue;
                }
                for obj in pending.drain(..) {
                    out.push(ParsedMove {
                        object: obj,
                        destination: destination.clone(),
                    });
                }
                if !object.is_empty() {
                    out.push(ParsedMove {
                        object,
                        destination,
                    });
                }
            }
            None => pending.push(strip_brackets(fragment).to_string()),
        }
    }
}

/// Parses a raw model reply.
pub fn parse_response(raw: &str) -> Result<ParsedResponse, ParseError> {
    let (outside, narration) = split_narration(raw);
    let mut parsed = ParsedResponse {
        narration,
        ..ParsedResponse::default()
    };
    let mut saw_category = false;

    for line in outside.lines() {
        let line = line.trim();
        let line = line
            .strip_prefix('-')
            .or_else(|| line.strip_prefix('*'))
            .unwrap_or(line)
            .trim_start();
        let Some((label, payload)) = line.split_once(':') else {
            continue;
        };
        let Some(category) = category_of(label) else {
            continue;
        };
        saw_category = true;
        match category {
            Category::Moved => parse_moves(payload, &mut parsed.moves),
            Category::Unblocked => parsed.unblocked.extend(
                payload
                    .split(',')
                    .filter(|s| !is_none(s))
                    .map(|s| strip_brackets(s).to_string()),
            ),
            Category::Location => {
                if !is_none(payload) && parsed.new_location.is_none() {
                    parsed.new_location = Some(strip_brackets(payload).to_string());
                }
            }
        }
    }

    if !saw_category && parsed.narration.is_none() {
        return Err(ParseError::Garbled);
    }
    Ok(parsed)
}

/// Canonical text form of a parsed reply; [`parse_response`] inverts it.
pub fn emit_response(p: &ParsedResponse) -> String {
    let or_none = |v: Vec<String>| {
        if v.is_empty() {
            NONE.to_string()
        } else {
            v.join(", ")
        }
    };
    let moves = or_none(
        p.moves
            .iter()
            .map(|m| format!("<{}> {NOW_IS_IN} <{}>", m.object, m.destination))
            .collect(),
    );
    let unblocked = or_none(p.unblocked.iter().map(|u| format!("<{u}>")).collect());
    let location = p
        .new_location
        .as_ref()
        .map_or_else(|| NONE.to_string(), |l| format!("<{l}>"));
    let mut text = format!(
        "- {MOVED_LABEL}: {moves}\n- {UNBLOCKED_LABEL}: {unblocked}\n- {LOCATION_LABEL}: {location}"
    );
    if let Some(n) = &p.narration {
        text.push_str(&format!("\n#{n}#"));
    }
    text
}

impl ParsedResponse {
    /// The transformations suggested by this reply. The narration is not
    /// part of the plan.
    pub fn to_plan(&self) -> TurnPlan {
        TurnPlan {
            moves: self
                .moves
                .iter()
                .map(|m| MoveItem {
                    item: m.object.clone(),
                    destination: m.destination.clone(),
                })
                .collect(),
            unblocks: self
                .unblocked
                .iter()
                .map(|t| UnblockLocation { target: t.clone() })
                .collect(),
            move_player: self
                .new_location
                .as_ref()
                .map(|t| MovePlayer { target: t.clone() }),
        }
    }
}

pub fn to_plan(p: &ParsedResponse) -> TurnPlan {
    p.to_plan()
}
