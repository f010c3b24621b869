//! Declarative scenario documents (TOML), their validation, and the two
//! bundled scenarios.
//!
//! A scenario directory looks like:
//!
//! ```text
//! scenarios/<id>/scenario.toml     the document
//! scenarios/<id>/start.<locale>.txt golden render of the starting state
//! scenarios/<id>/script.toml       optional canned replies for the scripted backend
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::locale::Locale;
use crate::world::{
    BlockedPassage, Character, CharacterId, ComponentRef, Item, ItemId, Location, LocationId,
    Objective, Puzzle, PuzzleId, World, INVENTORY_KEYWORD,
};

/// Names that can never be used for components: `Inventory` is a
/// destination keyword and `None` is the empty marker of the reply format.
pub const RESERVED_NAMES: [&str; 2] = [INVENTORY_KEYWORD, "None"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub id: String,
    pub title: String,
    pub locale: Locale,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
    /// Short text shown to players before the first turn.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intro: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    PlayerAtLocation,
    PlayerHasItem,
    PlayerWithCharacter,
    ItemAtLocation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveDoc {
    pub kind: ObjectiveKind,
    pub subject: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockedDoc {
    pub to: String,
    pub by: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocationDoc {
    pub name: String,
    #[serde(default)]
    pub descriptions: Vec<String>,
    #[serde(default)]
    pub items: Vec<String>,
    #[serde(default)]
    pub connecting: Vec<String>,
    #[serde(default)]
    pub blocked: Vec<BlockedDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterDoc {
    pub name: String,
    #[serde(default)]
    pub descriptions: Vec<String>,
    pub location: String,
    #[serde(default)]
    pub inventory: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ItemDoc {
    pub name: String,
    #[serde(default)]
    pub descriptions: Vec<String>,
    pub gettable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PuzzleDoc {
    pub name: String,
    #[serde(default)]
    pub descriptions: Vec<String>,
    pub problem: String,
    pub answer: String,
}

/// Name-based description of a world state. Used both for authoring and for
/// the per-turn snapshots embedded in session logs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldDocument {
    /// Name of the character the player controls.
    pub player: String,
    pub objective: ObjectiveDoc,
    #[serde(default)]
    pub locations: Vec<LocationDoc>,
    #[serde(default)]
    pub characters: Vec<CharacterDoc>,
    #[serde(default)]
    pub items: Vec<ItemDoc>,
    #[serde(default)]
    pub puzzles: Vec<PuzzleDoc>,
    /// Obstacle items whose passage was unblocked.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub detached: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioDocument {
    pub metadata: Metadata,
    #[serde(flatten)]
    pub world: WorldDocument,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    SchemaViolation,
    DanglingReference,
    DuplicateName,
    CommaInName,
    ReservedName,
    Containment,
}

impl ViolationKind {
    pub fn code(self) -> &'static str {
        match self {
            ViolationKind::SchemaViolation => "schema-violation",
            ViolationKind::DanglingReference => "dangling-reference",
            ViolationKind::DuplicateName => "duplicate-name",
            ViolationKind::CommaInName => "comma-in-name",
            ViolationKind::ReservedName => "reserved-name",
            ViolationKind::Containment => "containment",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
}

impl Violation {
    fn new(kind: ViolationKind, message: impl Into<String>) -> Self {
        Violation {
            kind,
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.code(), self.message)
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("schema-violation: {0}")]
    Parse(String),
    #[error("invalid scenario: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl ScenarioDocument {
    pub fn from_toml_str(src: &str) -> Result<Self, ScenarioError> {
        toml::from_str(src).map_err(|e| ScenarioError::Parse(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("scenario documents always serialize")
    }

    pub fn from_world(metadata: Metadata, world: &World) -> Self {
        ScenarioDocument {
            metadata,
            world: WorldDocument::from_world(world),
        }
    }
}

/// Checks a document and reports every violation found.
pub fn validate_scenario(doc: &ScenarioDocument) -> Result<(), Vec<Violation>> {
    build_world(&doc.world).map(|_| ())
}

/// Builds the world described by a scenario document.
pub fn load_scenario(doc: &ScenarioDocument) -> Result<World, ScenarioError> {
    build_world(&doc.world).map_err(ScenarioError::Invalid)
}

impl WorldDocument {
    pub fn to_world(&self) -> Result<World, Vec<Violation>> {
        build_world(self)
    }

    pub fn from_world(world: &World) -> Self {
        let names = |ids: &[ItemId]| ids.iter().map(|&i| world.item(i).name.clone()).collect();
        let objective = match world.objective() {
            Objective::PlayerAtLocation(l) => ObjectiveDoc {
                kind: ObjectiveKind::PlayerAtLocation,
                subject: world.location(l).name.clone(),
                location: None,
            },
            Objective::PlayerHasItem(i) => ObjectiveDoc {
                kind: ObjectiveKind::PlayerHasItem,
                subject: world.item(i).name.clone(),
                location: None,
            },
            Objective::PlayerWithCharacter(c) => ObjectiveDoc {
                kind: ObjectiveKind::PlayerWithCharacter,
                subject: world.character(c).name.clone(),
                location: None,
            },
            Objective::ItemAtLocation { item, location } => ObjectiveDoc {
                kind: ObjectiveKind::ItemAtLocation,
                subject: world.item(item).name.clone(),
                location: Some(world.location(location).name.clone()),
            },
        };
        WorldDocument {
            player: world.player().name.clone(),
            objective,
            locations: world
                .locations()
                .iter()
                .map(|l| LocationDoc {
                    name: l.name.clone(),
                    descriptions: l.descriptions.clone(),
                    items: names(&l.items),
                    connecting: l
                        .connecting
                        .iter()
                        .map(|&c| world.location(c).name.clone())
                        .collect(),
                    blocked: l
                        .blocked
                        .iter()
                        .map(|b| BlockedDoc {
                            to: world.location(b.target).name.clone(),
                            by: world.name_of(b.obstacle).to_string(),
                        })
                        .collect(),
                })
                .collect(),
            characters: world
                .characters()
                .iter()
                .map(|c| CharacterDoc {
                    name: c.name.clone(),
                    descriptions: c.descriptions.clone(),
                    location: world.location(c.location).name.clone(),
                    inventory: names(&c.inventory),
                })
                .collect(),
            items: world
                .items()
                .iter()
                .map(|i| ItemDoc {
                    name: i.name.clone(),
                    descriptions: i.descriptions.clone(),
                    gettable: i.gettable,
                })
                .collect(),
            puzzles: world
                .puzzles()
                .iter()
                .map(|p| PuzzleDoc {
                    name: p.name.clone(),
                    descriptions: p.descriptions.clone(),
                    problem: p.problem.clone(),
                    answer: p.answer.clone(),
                })
                .collect(),
            detached: names(world.detached_items()),
        }
    }
}

fn check_name(name: &str, what: &str, out: &mut Vec<Violation>) {
    if name.trim().is_empty() {
        out.push(Violation::new(
            ViolationKind::SchemaViolation,
            format!("{what} with an empty name"),
        ));
        return;
    }
    if name.trim() != name {
        out.push(Violation::new(
            ViolationKind::SchemaViolation,
            format!("{what} '{name}' has surrounding whitespace"),
        ));
    }
    if name.contains(',') {
        out.push(Violation::new(
            ViolationKind::CommaInName,
            format!("{what} '{name}' contains a comma"),
        ));
    }
    if name.contains(['<', '>', '#', '\n', '\r']) {
        out.push(Violation::new(
            ViolationKind::SchemaViolation,
            format!("{what} '{name}' contains one of '<', '>', '#' or a line break"),
        ));
    }
    if RESERVED_NAMES.iter().any(|r| r.eq_ignore_ascii_case(name.trim())) {
        out.push(Violation::new(
            ViolationKind::ReservedName,
            format!("{what} '{name}' uses a reserved name"),
        ));
    }
}

fn build_world(doc: &WorldDocument) -> Result<World, Vec<Violation>> {
    use ViolationKind::*;
    let mut out = Vec::new();

    // Name table, first declaration wins on duplicates.
    let mut table: HashMap<String, ComponentRef> = HashMap::new();
    let mut declare = |name: &str, r: ComponentRef, what: &str, out: &mut Vec<Violation>| {
        check_name(name, what, out);
        let key = name.trim().to_lowercase();
        if key.is_empty() {
            return;
        }
        match table.entry(key) {
            std::collections::hash_map::Entry::Occupied(_) => out.push(Violation::new(
                DuplicateName,
                format!("name '{}' is declared more than once", name.trim()),
            )),
            std::collections::hash_map::Entry::Vacant(slot) => {
                slot.insert(r);
            }
        }
    };
    for (i, l) in doc.locations.iter().enumerate() {
        declare(&l.name, ComponentRef::Location(LocationId(i)), "location", &mut out);
    }
    for (i, c) in doc.characters.iter().enumerate() {
        declare(&c.name, ComponentRef::Character(CharacterId(i)), "character", &mut out);
    }
    for (i, it) in doc.items.iter().enumerate() {
        declare(&it.name, ComponentRef::Item(ItemId(i)), "item", &mut out);
    }
    for (i, p) in doc.puzzles.iter().enumerate() {
        declare(&p.name, ComponentRef::Puzzle(PuzzleId(i)), "puzzle", &mut out);
    }

    let lookup = |name: &str| table.get(&name.trim().to_lowercase()).copied();
    let dangling = |what: String, name: &str| {
        Violation::new(DanglingReference, format!("{what} refers to unknown '{name}'"))
    };
    let location_ref = |name: &str, ctx: String, out: &mut Vec<Violation>| match lookup(name) {
        Some(ComponentRef::Location(id)) => Some(id),
        Some(_) => {
            out.push(Violation::new(
                SchemaViolation,
                format!("{ctx}: '{name}' is not a location"),
            ));
            None
        }
        None => {
            out.push(dangling(ctx, name));
            None
        }
    };
    let item_ref = |name: &str, ctx: String, out: &mut Vec<Violation>| match lookup(name) {
        Some(ComponentRef::Item(id)) => Some(id),
        Some(_) => {
            out.push(Violation::new(
                SchemaViolation,
                format!("{ctx}: '{name}' is not an item"),
            ));
            None
        }
        None => {
            out.push(dangling(ctx, name));
            None
        }
    };

    let mut placements: Vec<Vec<String>> = vec![Vec::new(); doc.items.len()];

    let mut locations = Vec::with_capacity(doc.locations.len());
    for l in &doc.locations {
        let mut items = Vec::new();
        for name in &l.items {
            if let Some(id) = item_ref(name, format!("location '{}' items", l.name), &mut out) {
                placements[id.0].push(format!("location '{}'", l.name));
                items.push(id);
            }
        }
        let connecting = l
            .connecting
            .iter()
            .filter_map(|n| location_ref(n, format!("location '{}' connecting", l.name), &mut out))
            .collect();
        let mut blocked = Vec::new();
        for b in &l.blocked {
            let target = location_ref(&b.to, format!("location '{}' blocked", l.name), &mut out);
            let obstacle = match lookup(&b.by) {
                Some(r @ (ComponentRef::Item(_) | ComponentRef::Puzzle(_))) => Some(r),
                Some(_) => {
                    out.push(Violation::new(
                        SchemaViolation,
                        format!("obstacle '{}' on '{}' is not an item or a puzzle", b.by, l.name),
                    ));
                    None
                }
                None => {
                    out.push(dangling(format!("obstacle on '{}'", l.name), &b.by));
                    None
                }
            };
            if let (Some(target), Some(obstacle)) = (target, obstacle) {
                if let ComponentRef::Item(id) = obstacle {
                    placements[id.0].push(format!("obstacle '{}' -> '{}'", l.name, b.to));
                }
                blocked.push(BlockedPassage { target, obstacle });
            }
        }
        locations.push(Location {
            name: l.name.trim().to_string(),
            descriptions: l.descriptions.clone(),
            items,
            connecting,
            blocked,
        });
    }

    let mut characters = Vec::with_capacity(doc.characters.len());
    for c in &doc.characters {
        let location = location_ref(&c.location, format!("character '{}' location", c.name), &mut out);
        let mut inventory = Vec::new();
        for name in &c.inventory {
            if let Some(id) = item_ref(name, format!("character '{}' inventory", c.name), &mut out) {
                placements[id.0].push(format!("character '{}'", c.name));
                inventory.push(id);
            }
        }
        characters.push(Character {
            name: c.name.trim().to_string(),
            descriptions: c.descriptions.clone(),
            location: location.unwrap_or(LocationId(0)),
            inventory,
        });
    }

    let mut detached = Vec::new();
    for name in &doc.detached {
        if let Some(id) = item_ref(name, "detached pool".to_string(), &mut out) {
            placements[id.0].push("detached pool".to_string());
            detached.push(id);
        }
    }

    for (i, places) in placements.iter().enumerate() {
        let name = &doc.items[i].name;
        match places.len() {
            1 => {}
            0 => out.push(Violation::new(
                Containment,
                format!("item '{name}' is not placed anywhere"),
            )),
            _ => out.push(Violation::new(
                Containment,
                format!("item '{name}' is placed in several containers: {}", places.join(", ")),
            )),
        }
    }

    for p in &doc.puzzles {
        if p.problem.trim().is_empty() || p.answer.trim().is_empty() {
            out.push(Violation::new(
                SchemaViolation,
                format!("puzzle '{}' needs a problem and an answer", p.name),
            ));
        }
    }

    let player = match lookup(&doc.player) {
        Some(ComponentRef::Character(id)) => Some(id),
        Some(_) => {
            out.push(Violation::new(
                SchemaViolation,
                format!("player '{}' is not a character", doc.player),
            ));
            None
        }
        None => {
            out.push(dangling("player".to_string(), &doc.player));
            None
        }
    };

    let o = &doc.objective;
    let objective = match (o.kind, &o.location) {
        (ObjectiveKind::ItemAtLocation, Some(loc)) => {
            let item = item_ref(&o.subject, "objective subject".to_string(), &mut out);
            let location = location_ref(loc, "objective location".to_string(), &mut out);
            item.zip(location)
                .map(|(item, location)| Objective::ItemAtLocation { item, location })
        }
        (ObjectiveKind::ItemAtLocation, None) => {
            out.push(Violation::new(
                SchemaViolation,
                "objective item_at_location requires a location",
            ));
            None
        }
        (_, Some(_)) => {
            out.push(Violation::new(
                SchemaViolation,
                "only item_at_location objectives take a location",
            ));
            None
        }
        (ObjectiveKind::PlayerAtLocation, None) => {
            location_ref(&o.subject, "objective subject".to_string(), &mut out)
                .map(Objective::PlayerAtLocation)
        }
        (ObjectiveKind::PlayerHasItem, None) => {
            item_ref(&o.subject, "objective subject".to_string(), &mut out)
                .map(Objective::PlayerHasItem)
        }
        (ObjectiveKind::PlayerWithCharacter, None) => match lookup(&o.subject) {
            Some(ComponentRef::Character(id)) if Some(id) == player => {
                out.push(Violation::new(
                    SchemaViolation,
                    "objective character must not be the player",
                ));
                None
            }
            Some(ComponentRef::Character(id)) => Some(Objective::PlayerWithCharacter(id)),
            Some(_) => {
                out.push(Violation::new(
                    SchemaViolation,
                    format!("objective subject '{}' is not a character", o.subject),
                ));
                None
            }
            None => {
                out.push(dangling("objective subject".to_string(), &o.subject));
                None
            }
        },
    };

    let items = doc
        .items
        .iter()
        .map(|i| Item {
            name: i.name.trim().to_string(),
            descriptions: i.descriptions.clone(),
            gettable: i.gettable,
        })
        .collect();
    let puzzles = doc
        .puzzles
        .iter()
        .map(|p| Puzzle {
            name: p.name.trim().to_string(),
            descriptions: p.descriptions.clone(),
            problem: p.problem.clone(),
            answer: p.answer.clone(),
        })
        .collect();

    if !out.is_empty() {
        return Err(out);
    }
    let (Some(player), Some(objective)) = (player, objective) else {
        unreachable!("missing player or objective always records a violation")
    };
    World::assemble(locations, characters, player, items, puzzles, objective, detached).map_err(
        |msgs| {
            msgs.into_iter()
                .map(|m| Violation::new(SchemaViolation, m))
                .collect()
        },
    )
}

/// A scenario ready to play: its document, golden renders and optional
/// canned replies.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub document: ScenarioDocument,
    pub golden_renders: BTreeMap<Locale, String>,
    /// Raw TOML of a reply script for the scripted backend.
    pub script: Option<String>,
}

impl Scenario {
    pub fn id(&self) -> &str {
        &self.document.metadata.id
    }

    pub fn load_world(&self) -> Result<World, ScenarioError> {
        load_scenario(&self.document)
    }

    /// Reads `scenario.toml`, `start.<locale>.txt` and `script.toml` from a
    /// scenario directory.
    pub fn from_dir(dir: &Path) -> Result<Self, ScenarioError> {
        let read = |p: &Path| {
            fs::read_to_string(p).map_err(|source| ScenarioError::Io {
                path: p.display().to_string(),
                source,
            })
        };
        let document = ScenarioDocument::from_toml_str(&read(&dir.join("scenario.toml"))?)?;
        let mut golden_renders = BTreeMap::new();
        for locale in Locale::ALL {
            let p = dir.join(format!("start.{}.txt", locale.code()));
            if p.exists() {
                golden_renders.insert(locale, read(&p)?);
            }
        }
        let script_path = dir.join("script.toml");
        let script = if script_path.exists() {
            Some(read(&script_path)?)
        } else {
            None
        };
        Ok(Scenario {
            document,
            golden_renders,
            script,
        })
    }
}

/// The scenarios known to a process, keyed by id.
#[derive(Debug, Clone, Default)]
pub struct ScenarioCatalog {
    entries: BTreeMap<String, Scenario>,
}

impl ScenarioCatalog {
    /// The two scenarios shipped with the crate.
    pub fn bundled() -> Self {
        let mut catalog = ScenarioCatalog::default();
        for (doc, golden, script) in [
            (
                include_str!("../../../scenarios/scenario-a/scenario.toml"),
                include_str!("../../../scenarios/scenario-a/start.en.txt"),
                include_str!("../../../scenarios/scenario-a/script.toml"),
            ),
            (
                include_str!("../../../scenarios/scenario-b/scenario.toml"),
                include_str!("../../../scenarios/scenario-b/start.en.txt"),
                include_str!("../../../scenarios/scenario-b/script.toml"),
            ),
        ] {
            let document =
                ScenarioDocument::from_toml_str(doc).expect("bundled scenario must parse");
            catalog.insert(Scenario {
                document,
                golden_renders: BTreeMap::from([(Locale::En, golden.to_string())]),
                script: Some(script.to_string()),
            });
        }
        catalog
    }

    /// Loads every subdirectory of `root` that contains a `scenario.toml`.
    pub fn from_dir(root: &Path) -> Result<Self, ScenarioError> {
        let mut catalog = ScenarioCatalog::default();
        let entries = fs::read_dir(root).map_err(|source| ScenarioError::Io {
            path: root.display().to_string(),
            source,
        })?;
        let mut dirs: Vec<_> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.join("scenario.toml").is_file())
            .collect();
        dirs.sort();
        for dir in dirs {
            catalog.insert(Scenario::from_dir(&dir)?);
        }
        Ok(catalog)
    }

    pub fn insert(&mut self, scenario: Scenario) {
        self.entries.insert(scenario.id().to_string(), scenario);
    }

    pub fn get(&self, id: &str) -> Result<&Scenario, ScenarioError> {
        self.entries
            .get(id)
            .ok_or_else(|| ScenarioError::UnknownScenario(id.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Scenario> {
        self.entries.values()
    }
}
