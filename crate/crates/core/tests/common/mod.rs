#![allow(dead_code)]

use std::path::PathBuf;

use worldshift_core::{ScenarioCatalog, World};

pub fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn scenario(id: &str) -> World {
    ScenarioCatalog::bundled()
        .get(id)
        .unwrap()
        .load_world()
        .unwrap()
}

/// Canonical three-category reply.
pub fn reply(moves: &[(&str, &str)], unblocked: &[&str], location: Option<&str>, narration: &str) -> String {
    let moves = if moves.is_empty() {
        "None".to_string()
    } else {
        moves
            .iter()
            .map(|(o, d)| format!("<{o}> now is in <{d}>"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let unblocked = if unblocked.is_empty() {
        "None".to_string()
    } else {
        unblocked.iter().map(|u| format!("<{u}>")).collect::<Vec<_>>().join(", ")
    };
    let location = location.map_or("None".to_string(), |l| format!("<{l}>"));
    format!(
        "- Moved object: {moves}\n- Blocked passages now available: {unblocked}\n- Your location changed: {location}\n# {narration} #"
    )
}
