//! Random worlds and plans, and a reference model of the engine stated
//! directly on names. Shared by the property suite and the acceptance run.

use proptest::prelude::*;

use worldshift_core::engine::{MoveItem, MovePlayer, UnblockLocation};
use worldshift_core::parser::ParsedMove;
use worldshift_core::scenario::{
    BlockedDoc, CharacterDoc, ItemDoc, LocationDoc, ObjectiveDoc, ObjectiveKind, PuzzleDoc,
    WorldDocument,
};
use worldshift_core::{ParsedResponse, Transformation, TurnPlan, World};

/// splitmix64, enough to turn one proptest seed into a whole world.
pub struct Rng(pub u64);

impl Rng {
    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }

    pub fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        &xs[self.below(xs.len())]
    }
}

pub const LOCATIONS: [&str; 4] = ["Hall", "Cellar", "Tower top", "Old mill"];
pub const CHARACTERS: [&str; 3] = ["Hero", "Mara", "Tobias"];
pub const ITEMS: [&str; 6] = ["Lamp", "Rope", "Coin", "Iron key", "Statue", "Boulder"];

#[allow(clippy::needless_range_loop)]
pub fn random_world(seed: u64) -> WorldDocument {
    let mut rng = Rng(seed);
    let nl = 1 + rng.below(LOCATIONS.len());
    let nc = 1 + rng.below(CHARACTERS.len());
    let ni = rng.below(ITEMS.len() + 1);

    let mut locations: Vec<LocationDoc> = LOCATIONS[..nl]
        .iter()
        .map(|n| LocationDoc {
            name: n.to_string(),
            descriptions: vec![format!("The {}.", n.to_lowercase())],
            items: vec![],
            connecting: vec![],
            blocked: vec![],
        })
        .collect();
    let mut passages: Vec<(usize, usize, Option<String>)> = Vec::new();
    for i in 0..nl {
        for j in 0..nl {
            if i == j {
                continue;
            }
            match rng.below(4) {
                2 => locations[i].connecting.push(LOCATIONS[j].to_string()),
                3 => passages.push((i, j, None)),
                _ => {}
            }
        }
    }

    let mut characters: Vec<CharacterDoc> = CHARACTERS[..nc]
        .iter()
        .map(|n| CharacterDoc {
            name: n.to_string(),
            descriptions: vec![],
            location: LOCATIONS[rng.below(nl)].to_string(),
            inventory: vec![],
        })
        .collect();

    let mut items = Vec::new();
    let mut detached = Vec::new();
    for name in &ITEMS[..ni] {
        items.push(ItemDoc {
            name: name.to_string(),
            descriptions: vec![],
            gettable: rng.below(3) != 0,
        });
        let free = passages.iter().position(|p| p.2.is_none());
        match (rng.below(5), free) {
            (2, _) => characters[rng.below(nc)].inventory.push(name.to_string()),
            (3, Some(p)) => passages[p].2 = Some(name.to_string()),
            (4, _) if rng.below(3) == 0 => detached.push(name.to_string()),
            _ => locations[rng.below(nl)].items.push(name.to_string()),
        }
    }

    let mut puzzles = Vec::new();
    for (k, (from, to, by)) in passages.into_iter().enumerate() {
        let by = by.unwrap_or_else(|| {
            let name = format!("Riddle {k}");
            puzzles.push(PuzzleDoc {
                name: name.clone(),
                descriptions: vec![],
                problem: "What has keys but opens no locks?".into(),
                answer: "A piano".into(),
            });
            name
        });
        locations[from].blocked.push(BlockedDoc {
            to: LOCATIONS[to].to_string(),
            by,
        });
    }

    let objective = match rng.below(4) {
        1 if ni > 0 => ObjectiveDoc {
            kind: ObjectiveKind::PlayerHasItem,
            subject: ITEMS[rng.below(ni)].into(),
            location: None,
        },
        2 if nc > 1 => ObjectiveDoc {
            kind: ObjectiveKind::PlayerWithCharacter,
            subject: CHARACTERS[1 + rng.below(nc - 1)].into(),
            location: None,
        },
        3 if ni > 0 => ObjectiveDoc {
            kind: ObjectiveKind::ItemAtLocation,
            subject: ITEMS[rng.below(ni)].into(),
            location: Some(LOCATIONS[rng.below(nl)].into()),
        },
        _ => ObjectiveDoc {
            kind: ObjectiveKind::PlayerAtLocation,
            subject: LOCATIONS[rng.below(nl)].into(),
            location: None,
        },
    };

    WorldDocument {
        player: CHARACTERS[0].into(),
        objective,
        locations,
        characters,
        items,
        puzzles,
        detached,
    }
}

/// Spelling variants the engine must accept or reject like the plain name.
pub fn perturb(rng: &mut Rng, name: &str) -> String {
    let cased = match rng.below(3) {
        0 => name.to_uppercase(),
        1 => name.to_lowercase(),
        _ => name.to_string(),
    };
    match rng.below(4) {
        0 => format!("<{cased}>"),
        1 => format!("  {cased} "),
        2 => format!("< {cased}>"),
        _ => cased,
    }
}

pub fn random_plan(seed: u64, doc: &WorldDocument) -> TurnPlan {
    let mut rng = Rng(seed);
    let locs: Vec<&str> = doc.locations.iter().map(|l| l.name.as_str()).collect();
    let mut holders: Vec<&str> = locs.clone();
    holders.extend(doc.characters.iter().map(|c| c.name.as_str()));
    holders.extend(["Inventory", "Inventory", "Riddle 0"]);
    let mut objects: Vec<&str> = doc.items.iter().map(|i| i.name.as_str()).collect();
    objects.extend(["Hojita", "Hall", ""]);
    let mut targets = locs.clone();
    targets.extend(["Hojita", "Lamp"]);

    let moves = (0..rng.below(4))
        .map(|_| {
            let item = *rng.pick(&objects);
            let dest = *rng.pick(&holders);
            MoveItem {
                item: perturb(&mut rng, item),
                destination: perturb(&mut rng, dest),
            }
        })
        .collect();
    let unblocks = (0..rng.below(3))
        .map(|_| {
            let t = *rng.pick(&targets);
            UnblockLocation {
                target: perturb(&mut rng, t),
            }
        })
        .collect();
    let move_player = (rng.below(2) == 0).then(|| {
        let t = *rng.pick(&targets);
        MovePlayer {
            target: perturb(&mut rng, t),
        }
    });
    TurnPlan {
        moves,
        unblocks,
        move_player,
    }
}

// Reference model: the same rules stated directly on names.

pub fn norm(raw: &str) -> String {
    let t = raw.trim();
    let t = match t.strip_prefix('<').and_then(|s| s.strip_suffix('>')) {
        Some(inner) => inner.trim(),
        None => t,
    };
    t.to_lowercase()
}

#[derive(Clone, Copy, PartialEq)]
pub enum Kind {
    Loc(usize),
    Char(usize),
    Item(usize),
    Puzzle,
    Inventory,
}

pub fn kind_of(doc: &WorldDocument, raw: &str) -> Option<Kind> {
    let key = norm(raw);
    if key.is_empty() {
        return None;
    }
    if key == "inventory" {
        return Some(Kind::Inventory);
    }
    let eq = |n: &String| norm(n) == key;
    if let Some(i) = doc.locations.iter().position(|l| eq(&l.name)) {
        return Some(Kind::Loc(i));
    }
    if let Some(i) = doc.characters.iter().position(|c| eq(&c.name)) {
        return Some(Kind::Char(i));
    }
    if let Some(i) = doc.items.iter().position(|it| eq(&it.name)) {
        return Some(Kind::Item(i));
    }
    doc.puzzles.iter().any(|p| eq(&p.name)).then_some(Kind::Puzzle)
}

pub fn loc_index(doc: &WorldDocument, name: &str) -> usize {
    doc.locations.iter().position(|l| l.name == name).unwrap()
}

pub fn reference_apply(doc: &mut WorldDocument, t: &Transformation) -> Result<(), &'static str> {
    let p = doc.characters.iter().position(|c| c.name == doc.player).unwrap();
    let here = loc_index(doc, &doc.characters[p].location);
    match t {
        Transformation::MoveItem { item, destination } => {
            let Some(Kind::Item(it)) = kind_of(doc, item) else {
                return Err("unknown-component");
            };
            let name = doc.items[it].name.clone();
            let dest = match kind_of(doc, destination) {
                Some(Kind::Inventory) => Kind::Char(p),
                Some(Kind::Loc(l)) if l == here => Kind::Loc(l),
                Some(Kind::Char(c)) if c == p || loc_index(doc, &doc.characters[c].location) == here => {
                    Kind::Char(c)
                }
                Some(Kind::Loc(_) | Kind::Char(_)) => return Err("destination-unreachable"),
                _ => return Err("unknown-component"),
            };
            let in_loc = doc.locations.iter().position(|l| l.items.contains(&name));
            let in_char = doc.characters.iter().position(|c| c.inventory.contains(&name));
            let source = match (in_loc, in_char) {
                (Some(l), _) if l == here => Kind::Loc(l),
                (_, Some(c)) if loc_index(doc, &doc.characters[c].location) == here => Kind::Char(c),
                _ => return Err("source-mismatch"),
            };
            if matches!(dest, Kind::Char(_)) && !doc.items[it].gettable {
                return Err("not-gettable");
            }
            if source == dest {
                return Ok(());
            }
            match source {
                Kind::Loc(l) => doc.locations[l].items.retain(|n| *n != name),
                Kind::Char(c) => doc.characters[c].inventory.retain(|n| *n != name),
                _ => unreachable!(),
            }
            match dest {
                Kind::Loc(l) => doc.locations[l].items.push(name),
                Kind::Char(c) => doc.characters[c].inventory.push(name),
                _ => unreachable!(),
            }
            Ok(())
        }
        Transformation::UnblockLocation { target } => {
            let Some(Kind::Loc(l)) = kind_of(doc, target) else {
                return Err("unknown-component");
            };
            let target = doc.locations[l].name.clone();
            let loc = &mut doc.locations[here];
            if loc.connecting.contains(&target) {
                return Err("already-reachable");
            }
            let Some(pos) = loc.blocked.iter().position(|b| b.to == target) else {
                return Err("not-blocked");
            };
            let passage = loc.blocked.remove(pos);
            loc.connecting.push(target);
            if doc.items.iter().any(|i| i.name == passage.by) {
                doc.detached.push(passage.by);
            }
            Ok(())
        }
        Transformation::MovePlayer { target } => {
            let Some(Kind::Loc(l)) = kind_of(doc, target) else {
                return Err("unknown-component");
            };
            let target = doc.locations[l].name.clone();
            if !doc.locations[here].connecting.contains(&target) {
                return Err("destination-unreachable");
            }
            doc.characters[p].location = target;
            Ok(())
        }
    }
}

/// Expected per-transformation outcomes, in move, unblock, relocate order.
pub fn reference_execute(
    doc: &mut WorldDocument,
    plan: &TurnPlan,
) -> Vec<(Transformation, Option<&'static str>)> {
    let mut order: Vec<Transformation> = Vec::new();
    order.extend(plan.moves.iter().map(|m| Transformation::MoveItem {
        item: m.item.clone(),
        destination: m.destination.clone(),
    }));
    order.extend(plan.unblocks.iter().map(|u| Transformation::UnblockLocation {
        target: u.target.clone(),
    }));
    order.extend(plan.move_player.iter().map(|m| Transformation::MovePlayer {
        target: m.target.clone(),
    }));
    order
        .into_iter()
        .map(|t| {
            let r = reference_apply(doc, &t).err();
            (t, r)
        })
        .collect()
}

pub fn world_of(doc: &WorldDocument) -> World {
    match doc.to_world() {
        Ok(w) => w,
        Err(v) => panic!("generator produced an invalid world: {v:?}\n{doc:#?}"),
    }
}

pub fn name() -> impl Strategy<Value = String> {
    "[A-Z][a-z]{0,6}( [a-z]{1,6}){0,2}"
        .prop_filter("reserved or connective", |s| {
            let l = s.to_lowercase();
            l != "none" && !l.contains("now is in")
        })
}

pub fn parsed_response() -> impl Strategy<Value = ParsedResponse> {
    (
        prop::collection::vec((name(), name()), 0..4),
        prop::collection::vec(name(), 0..3),
        prop::option::of(name()),
        prop::option::of("[A-Za-z][A-Za-z ,.!?']{0,40}[A-Za-z.!?]"),
    )
        .prop_map(|(moves, unblocked, new_location, narration)| ParsedResponse {
            moves: moves
                .into_iter()
                .map(|(object, destination)| ParsedMove { object, destination })
                .collect(),
            unblocked,
            new_location,
            narration,
        })
}

