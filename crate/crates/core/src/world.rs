//! Typed world state: locations, characters, items, puzzles and the
//! objective, plus the primitive queries and mutations everything else is
//! built on.
//!
//! Components refer to each other through index newtypes. Names are only
//! used at the edges (scenario documents and LLM output) and go through
//! [`World::resolve_name`].

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Reserved destination keyword naming the player's inventory.
pub const INVENTORY_KEYWORD: &str = "Inventory";

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub(crate) usize);

        impl $name {
            pub fn index(self) -> usize {
                self.0
            }
        }
    };
}

id_type!(
    /// Index of a [`Location`] in its world.
    LocationId
);
id_type!(
    /// Index of a [`Character`] in its world.
    CharacterId
);
id_type!(
    /// Index of an [`Item`] in the world's item registry.
    ItemId
);
id_type!(
    /// Index of a [`Puzzle`] in its world.
    PuzzleId
);

/// A resolved reference to any named thing in the world.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentRef {
    Location(LocationId),
    Character(CharacterId),
    Item(ItemId),
    Puzzle(PuzzleId),
    /// The player-inventory pseudo-container (`Inventory`).
    Inventory,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub name: String,
    pub descriptions: Vec<String>,
    pub gettable: bool,
}

/// A passage out of a location that cannot be used until unblocked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockedPassage {
    pub target: LocationId,
    /// Usually an item or a puzzle; never [`ComponentRef::Inventory`].
    pub obstacle: ComponentRef,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub name: String,
    pub descriptions: Vec<String>,
    pub items: Vec<ItemId>,
    pub connecting: Vec<LocationId>,
    pub blocked: Vec<BlockedPassage>,
}

impl Location {
    pub fn blocked_passage_to(&self, target: LocationId) -> Option<&BlockedPassage> {
        self.blocked.iter().find(|b| b.target == target)
    }

    pub fn connects_to(&self, target: LocationId) -> bool {
        self.connecting.contains(&target)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Character {
    pub name: String,
    pub descriptions: Vec<String>,
    pub location: LocationId,
    pub inventory: Vec<ItemId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Puzzle {
    pub name: String,
    pub descriptions: Vec<String>,
    pub problem: String,
    pub answer: String,
}

/// Completion criterion evaluated after every turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    PlayerAtLocation(LocationId),
    PlayerHasItem(ItemId),
    PlayerWithCharacter(CharacterId),
    ItemAtLocation { item: ItemId, location: LocationId },
}

/// Where an item currently lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Container {
    Location(LocationId),
    Character(CharacterId),
    /// The obstacle slot of the blocked passage `from -> to`.
    Obstacle { from: LocationId, to: LocationId },
    /// Obstacle items whose passage has been unblocked. They stay registered
    /// but are no longer reachable from anywhere.
    Detached,
}

/// A container that can receive an item through [`Mutation::MoveItem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Holder {
    Location(LocationId),
    Character(CharacterId),
}

impl From<Holder> for Container {
    fn from(h: Holder) -> Self {
        match h {
            Holder::Location(l) => Container::Location(l),
            Holder::Character(c) => Container::Character(c),
        }
    }
}

/// Structural mutations beneath the validated transformation layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    MoveItem { item: ItemId, to: Holder },
    Unblock { from: LocationId, to: LocationId },
    MovePlayer { to: LocationId },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorldError {
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("structural violation: {0}")]
    StructuralViolation(String),
}

/// Snapshot of what the player can perceive and reach right now.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayerContext {
    pub location: LocationId,
    pub reachable: Vec<LocationId>,
    pub blocked: Vec<BlockedPassage>,
    pub inventory: Vec<ItemId>,
    pub visible_items: Vec<ItemId>,
    pub visible_characters: Vec<CharacterId>,
}

/// The complete symbolic state of a fictional world.
///
/// Built through [`crate::scenario`]; every constructor path runs
/// [`World::invariant_violations`] before handing out a value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct World {
    pub(crate) locations: Vec<Location>,
    pub(crate) characters: Vec<Character>,
    pub(crate) player: CharacterId,
    pub(crate) items: Vec<Item>,
    pub(crate) puzzles: Vec<Puzzle>,
    pub(crate) objective: Objective,
    pub(crate) detached: Vec<ItemId>,
    pub(crate) names: HashMap<String, ComponentRef>,
}

/// Lowercased lookup key for a raw name: trims whitespace and strips one
/// layer of angle brackets.
pub fn normalize_name(raw: &str) -> String {
    strip_brackets(raw).to_lowercase()
}

/// Trims whitespace and removes one surrounding `<...>` pair, keeping case.
pub fn strip_brackets(raw: &str) -> &str {
    let t = raw.trim();
    match t.strip_prefix('<').and_then(|s| s.strip_suffix('>')) {
        Some(inner) => inner.trim(),
        None => t,
    }
}

impl World {
    /// Assembles a world from parts and checks every invariant.
    pub(crate) fn assemble(
        locations: Vec<Location>,
        characters: Vec<Character>,
        player: CharacterId,
        items: Vec<Item>,
        puzzles: Vec<Puzzle>,
        objective: Objective,
        detached: Vec<ItemId>,
    ) -> Result<World, Vec<String>> {
        let mut world = World {
            locations,
            characters,
            player,
            items,
            puzzles,
            objective,
            detached,
            names: HashMap::new(),
        };
        let mut violations = Vec::new();
        let mut names = HashMap::new();
        for (key, r) in world.all_components() {
            if key.is_empty() {
                violations.push("component with empty name".to_string());
                continue;
            }
            if names.insert(key.clone(), r).is_some() {
                violations.push(format!("duplicate name '{key}'"));
            }
        }
        world.names = names;
        violations.extend(world.invariant_violations());
        if violations.is_empty() {
            Ok(world)
        } else {
            Err(violations)
        }
    }

    fn all_components(&self) -> Vec<(String, ComponentRef)> {
        let locs = self
            .locations
            .iter()
            .enumerate()
            .map(|(i, l)| (l.name.to_lowercase(), ComponentRef::Location(LocationId(i))));
        let chars = self
            .characters
            .iter()
            .enumerate()
            .map(|(i, c)| (c.name.to_lowercase(), ComponentRef::Character(CharacterId(i))));
        let items = self
            .items
            .iter()
            .enumerate()
            .map(|(i, it)| (it.name.to_lowercase(), ComponentRef::Item(ItemId(i))));
        let puzzles = self
            .puzzles
            .iter()
            .enumerate()
            .map(|(i, p)| (p.name.to_lowercase(), ComponentRef::Puzzle(PuzzleId(i))));
        locs.chain(chars).chain(items).chain(puzzles).collect()
    }

    pub fn locations(&self) -> &[Location] {
        &self.locations
    }

    pub fn characters(&self) -> &[Character] {
        &self.characters
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn puzzles(&self) -> &[Puzzle] {
        &self.puzzles
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    pub fn detached_items(&self) -> &[ItemId] {
        &self.detached
    }

    pub fn location(&self, id: LocationId) -> &Location {
        &self.locations[id.0]
    }

    pub fn character(&self, id: CharacterId) -> &Character {
        &self.characters[id.0]
    }

    pub fn item(&self, id: ItemId) -> &Item {
        &self.items[id.0]
    }

    pub fn puzzle(&self, id: PuzzleId) -> &Puzzle {
        &self.puzzles[id.0]
    }

    pub fn player_id(&self) -> CharacterId {
        self.player
    }

    pub fn player(&self) -> &Character {
        &self.characters[self.player.0]
    }

    pub fn player_location(&self) -> LocationId {
        self.player().location
    }

    /// Canonical display name of a component.
    pub fn name_of(&self, r: ComponentRef) -> &str {
        match r {
            ComponentRef::Location(id) => &self.location(id).name,
            ComponentRef::Character(id) => &self.character(id).name,
            ComponentRef::Item(id) => &self.item(id).name,
            ComponentRef::Puzzle(id) => &self.puzzle(id).name,
            ComponentRef::Inventory => INVENTORY_KEYWORD,
        }
    }

    /// Resolves a raw name against canonical component names.
    ///
    /// Matching is case-insensitive and exact after [`normalize_name`];
    /// aliases mentioned in descriptions never match.
    pub fn resolve_name(&self, raw: &str) -> Option<ComponentRef> {
        let key = normalize_name(raw);
        if key.is_empty() {
            return None;
        }
        if key == INVENTORY_KEYWORD.to_lowercase() {
            return Some(ComponentRef::Inventory);
        }
        self.names.get(&key).copied()
    }

    pub fn find_location(&self, raw: &str) -> Option<LocationId> {
        match self.resolve_name(raw)? {
            ComponentRef::Location(id) => Some(id),
            _ => None,
        }
    }

    pub fn find_item(&self, raw: &str) -> Option<ItemId> {
        match self.resolve_name(raw)? {
            ComponentRef::Item(id) => Some(id),
            _ => None,
        }
    }

    pub fn find_character(&self, raw: &str) -> Option<CharacterId> {
        match self.resolve_name(raw)? {
            ComponentRef::Character(id) => Some(id),
            _ => None,
        }
    }

    fn containers_holding(&self, item: ItemId) -> Vec<Container> {
        let mut found = Vec::new();
        for (li, loc) in self.locations.iter().enumerate() {
            let from = LocationId(li);
            found.extend(
                loc.items
                    .iter()
                    .filter(|&&i| i == item)
                    .map(|_| Container::Location(from)),
            );
            found.extend(
                loc.blocked
                    .iter()
                    .filter(|b| b.obstacle == ComponentRef::Item(item))
                    .map(|b| Container::Obstacle { from, to: b.target }),
            );
        }
        for (ci, ch) in self.characters.iter().enumerate() {
            found.extend(
                ch.inventory
                    .iter()
                    .filter(|&&i| i == item)
                    .map(|_| Container::Character(CharacterId(ci))),
            );
        }
        found.extend(
            self.detached
                .iter()
                .filter(|&&i| i == item)
                .map(|_| Container::Detached),
        );
        found
    }

    /// The unique container of `item`.
    pub fn container_of(&self, item: ItemId) -> Result<Container, WorldError> {
        if item.0 >= self.items.len() {
            return Err(WorldError::Inconsistent(format!(
                "item index {} is not registered",
                item.0
            )));
        }
        let found = self.containers_holding(item);
        match found.as_slice() {
            [only] => Ok(*only),
            [] => Err(WorldError::Inconsistent(format!(
                "item '{}' has no container",
                self.item(item).name
            ))),
            _ => Err(WorldError::Inconsistent(format!(
                "item '{}' is in {} containers",
                self.item(item).name,
                found.len()
            ))),
        }
    }

    pub fn player_context(&self) -> PlayerContext {
        let here = self.player_location();
        let loc = self.location(here);
        PlayerContext {
            location: here,
            reachable: loc.connecting.clone(),
            blocked: loc.blocked.clone(),
            inventory: self.player().inventory.clone(),
            visible_items: loc.items.clone(),
            visible_characters: self.npcs_at(here).collect(),
        }
    }

    /// Non-player characters standing in `location`, in declaration order.
    pub fn npcs_at(&self, location: LocationId) -> impl Iterator<Item = CharacterId> + '_ {
        self.characters
            .iter()
            .enumerate()
            .filter(move |(i, c)| *i != self.player.0 && c.location == location)
            .map(|(i, _)| CharacterId(i))
    }

    /// Applies a structural mutation. On error the world is left untouched.
    pub fn mutate(&mut self, m: Mutation) -> Result<(), WorldError> {
        match m {
            Mutation::MoveItem { item, to } => {
                self.check_item(item)?;
                match to {
                    Holder::Location(l) => self.check_location(l)?,
                    Holder::Character(c) => self.check_character(c)?,
                }
                let from = self.container_of(item)?;
                if from == Container::from(to) {
                    return Ok(());
                }
                match from {
                    Container::Location(l) => self.locations[l.0].items.retain(|&i| i != item),
                    Container::Character(c) => {
                        self.characters[c.0].inventory.retain(|&i| i != item)
                    }
                    Container::Obstacle { from, to } => {
                        return Err(WorldError::StructuralViolation(format!(
                            "'{}' is the obstacle between '{}' and '{}'",
                            self.item(item).name,
                            self.location(from).name,
                            self.location(to).name
                        )))
                    }
                    Container::Detached => {
                        return Err(WorldError::StructuralViolation(format!(
                            "'{}' has been detached from the world",
                            self.item(item).name
                        )))
                    }
                }
                match to {
                    Holder::Location(l) => self.locations[l.0].items.push(item),
                    Holder::Character(c) => self.characters[c.0].inventory.push(item),
                }
                Ok(())
            }
            Mutation::Unblock { from, to } => {
                self.check_location(from)?;
                self.check_location(to)?;
                let loc = &self.locations[from.0];
                let pos = loc
                    .blocked
                    .iter()
                    .position(|b| b.target == to)
                    .ok_or_else(|| {
                        WorldError::StructuralViolation(format!(
                            "no blocked passage from '{}' to '{}'",
                            loc.name,
                            self.locations[to.0].name
                        ))
                    })?;
                let passage = self.locations[from.0].blocked.remove(pos);
                self.locations[from.0].connecting.push(to);
                if let ComponentRef::Item(obstacle) = passage.obstacle {
                    self.detached.push(obstacle);
                }
                Ok(())
            }
            Mutation::MovePlayer { to } => {
                self.check_location(to)?;
                let player = self.player.0;
                self.characters[player].location = to;
                Ok(())
            }
        }
    }

    fn check_item(&self, id: ItemId) -> Result<(), WorldError> {
        (id.0 < self.items.len())
            .then_some(())
            .ok_or_else(|| WorldError::StructuralViolation(format!("unknown item #{}", id.0)))
    }

    fn check_location(&self, id: LocationId) -> Result<(), WorldError> {
        (id.0 < self.locations.len())
            .then_some(())
            .ok_or_else(|| WorldError::StructuralViolation(format!("unknown location #{}", id.0)))
    }

    fn check_character(&self, id: CharacterId) -> Result<(), WorldError> {
        (id.0 < self.characters.len())
            .then_some(())
            .ok_or_else(|| WorldError::StructuralViolation(format!("unknown character #{}", id.0)))
    }

    /// Exhaustive scan of the structural invariants. Empty means healthy.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let n_loc = self.locations.len();
        let n_char = self.characters.len();
        let n_item = self.items.len();
        let n_puz = self.puzzles.len();
        // Only items and puzzles can block a passage.
        let ref_ok = |r: &ComponentRef| match *r {
            ComponentRef::Item(id) => id.0 < n_item,
            ComponentRef::Puzzle(id) => id.0 < n_puz,
            _ => false,
        };

        if self.player.0 >= n_char {
            v.push("player character does not exist".into());
            return v;
        }

        for (li, loc) in self.locations.iter().enumerate() {
            let here = LocationId(li);
            if loc.items.iter().any(|i| i.0 >= n_item)
                || loc.connecting.iter().any(|l| l.0 >= n_loc)
                || loc.blocked.iter().any(|b| b.target.0 >= n_loc || !ref_ok(&b.obstacle))
            {
                v.push(format!("location '{}' has a dangling reference", loc.name));
                continue;
            }
            if loc.connecting.contains(&here) || loc.blocked.iter().any(|b| b.target == here) {
                v.push(format!("location '{}' references itself", loc.name));
            }
            for (i, c) in loc.connecting.iter().enumerate() {
                if loc.connecting[..i].contains(c) {
                    v.push(format!(
                        "location '{}' lists '{}' twice as connecting",
                        loc.name, self.locations[c.0].name
                    ));
                }
                if loc.blocked.iter().any(|b| b.target == *c) {
                    v.push(format!(
                        "location '{}' lists '{}' as both connecting and blocked",
                        loc.name, self.locations[c.0].name
                    ));
                }
            }
            for (i, b) in loc.blocked.iter().enumerate() {
                if loc.blocked[..i].iter().any(|p| p.target == b.target) {
                    v.push(format!(
                        "location '{}' lists '{}' twice as blocked",
                        loc.name, self.locations[b.target.0].name
                    ));
                }
            }
        }
        for ch in &self.characters {
            if ch.location.0 >= n_loc || ch.inventory.iter().any(|i| i.0 >= n_item) {
                v.push(format!("character '{}' has a dangling reference", ch.name));
            }
        }
        if self.detached.iter().any(|i| i.0 >= n_item) {
            v.push("detached pool has a dangling reference".into());
        }
        for p in &self.puzzles {
            if p.problem.trim().is_empty() || p.answer.trim().is_empty() {
                v.push(format!("puzzle '{}' needs a problem and an answer", p.name));
            }
        }
        if !v.is_empty() {
            return v;
        }
        for i in 0..n_item {
            if let Err(e) = self.container_of(ItemId(i)) {
                v.push(e.to_string());
            }
        }
        let objective_ok = match self.objective {
            Objective::PlayerAtLocation(l) => l.0 < n_loc,
            Objective::PlayerHasItem(i) => i.0 < n_item,
            Objective::PlayerWithCharacter(c) => c.0 < n_char && c != self.player,
            Objective::ItemAtLocation { item, location } => item.0 < n_item && location.0 < n_loc,
        };
        if !objective_ok {
            v.push("objective references a missing or invalid component".into());
        }
        v
    }
}

impl fmt::Display for ComponentRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentRef::Location(id) => write!(f, "location#{}", id.0),
            ComponentRef::Character(id) => write!(f, "character#{}", id.0),
            ComponentRef::Item(id) => write!(f, "item#{}", id.0),
            ComponentRef::Puzzle(id) => write!(f, "puzzle#{}", id.0),
            ComponentRef::Inventory => f.write_str(INVENTORY_KEYWORD),
        }
    }
}
