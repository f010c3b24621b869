mod common;

use worldshift_core::scenario::{load_scenario, ScenarioDocument};
use worldshift_core::world::{ComponentRef, Container, Holder, Mutation};

#[test]
fn resolve_name_matches_canonical_names_only() {
    let w = common::scenario("scenario-a");
    let turtle = w.find_item("Turtle").unwrap();
    assert_eq!(w.resolve_name("<Turtle>"), Some(ComponentRef::Item(turtle)));
    assert_eq!(w.resolve_name("  < tUrTle >  "), Some(ComponentRef::Item(turtle)));
    // The alias appears in the turtle's description but is not a name.
    assert!(w.item(turtle).descriptions.iter().any(|d| d.contains("Hojita")));
    assert_eq!(w.resolve_name("Hojita"), None);
    assert_eq!(w.resolve_name(""), None);
    assert_eq!(w.resolve_name("<>"), None);
    assert_eq!(w.resolve_name("<Inventory>"), Some(ComponentRef::Inventory));
}

#[test]
fn distinct_components_never_share_a_normalized_name() {
    for id in ["scenario-a", "scenario-b"] {
        let w = common::scenario(id);
        let mut seen = std::collections::HashSet::new();
        let names = w
            .locations()
            .iter()
            .map(|l| &l.name)
            .chain(w.characters().iter().map(|c| &c.name))
            .chain(w.items().iter().map(|i| &i.name))
            .chain(w.puzzles().iter().map(|p| &p.name));
        for n in names {
            let r = w.resolve_name(n).unwrap();
            assert!(seen.insert(r), "{n} resolved to an already-seen component");
            assert_eq!(w.name_of(r), n.as_str());
        }
    }
}

#[test]
fn container_of_starting_items() {
    let a = common::scenario("scenario-a");
    let laura = a.find_character("Laura").unwrap();
    assert_eq!(
        a.container_of(a.find_item("Key").unwrap()),
        Ok(Container::Character(laura))
    );
    let kitchen = a.find_location("Kitchen").unwrap();
    let garden = a.find_location("Garden").unwrap();
    assert_eq!(
        a.container_of(a.find_item("Lock").unwrap()),
        Ok(Container::Obstacle {
            from: kitchen,
            to: garden
        })
    );

    let b = common::scenario("scenario-b");
    assert_eq!(
        b.container_of(b.find_item("Guitar").unwrap()),
        Ok(Container::Character(b.player_id()))
    );
}

fn two_rooms() -> worldshift_core::World {
    let doc = ScenarioDocument::from_toml_str(
        r#"
player = "Ana"
[metadata]
id = "two"
title = "Two rooms"
locale = "en"
[objective]
kind = "player_has_item"
subject = "Coin"
[[locations]]
name = "North"
connecting = ["South"]
[[locations]]
name = "South"
items = ["Coin"]
[[characters]]
name = "Ana"
location = "North"
[[items]]
name = "Coin"
gettable = true
"#,
    )
    .unwrap();
    load_scenario(&doc).unwrap()
}

#[test]
fn container_of_single_location_item() {
    let w = two_rooms();
    let south = w.find_location("South").unwrap();
    assert_eq!(
        w.container_of(w.find_item("Coin").unwrap()),
        Ok(Container::Location(south))
    );
}

#[test]
fn player_context_at_scenario_starts() {
    let a = common::scenario("scenario-a");
    let ctx = a.player_context();
    assert_eq!(a.location(ctx.location).name, "Art studio");
    assert_eq!(ctx.reachable, vec![a.find_location("Kitchen").unwrap()]);
    assert!(ctx.blocked.is_empty());
    assert!(ctx.inventory.is_empty());
    let visible: Vec<&str> = ctx.visible_items.iter().map(|&i| a.item(i).name.as_str()).collect();
    assert_eq!(visible, ["A grey hammer", "A green hammer"]);
    assert_eq!(ctx.visible_characters, vec![a.find_character("Laura").unwrap()]);

    let b = common::scenario("scenario-b");
    let ctx = b.player_context();
    assert!(ctx.reachable.is_empty());
    assert_eq!(ctx.blocked.len(), 1);
    assert_eq!(ctx.blocked[0].target, b.find_location("Silent zone").unwrap());
    assert_eq!(
        ctx.blocked[0].obstacle,
        ComponentRef::Item(b.find_item("Firewall").unwrap())
    );
    assert_eq!(ctx.inventory, vec![b.find_item("Guitar").unwrap()]);
    assert!(ctx.visible_characters.is_empty());
}

#[test]
fn player_context_of_isolated_location_is_empty() {
    let doc = ScenarioDocument::from_toml_str(
        r#"
player = "Solo"
[metadata]
id = "iso"
title = "Isolated"
locale = "en"
[objective]
kind = "player_at_location"
subject = "Room"
[[locations]]
name = "Room"
[[characters]]
name = "Solo"
location = "Room"
"#,
    )
    .unwrap();
    let w = load_scenario(&doc).unwrap();
    let ctx = w.player_context();
    assert!(ctx.reachable.is_empty());
    assert!(ctx.blocked.is_empty());
    assert!(ctx.visible_items.is_empty());
    assert!(ctx.visible_characters.is_empty());
}

#[test]
fn mutate_examples() {
    let mut w = common::scenario("scenario-a");
    let key = w.find_item("Key").unwrap();
    let player = w.player_id();
    w.mutate(Mutation::MoveItem {
        item: key,
        to: Holder::Character(player),
    })
    .unwrap();
    assert_eq!(w.container_of(key), Ok(Container::Character(player)));
    assert!(w.characters().iter().filter(|c| c.inventory.contains(&key)).count() == 1);

    let kitchen = w.find_location("Kitchen").unwrap();
    let garden = w.find_location("Garden").unwrap();
    w.mutate(Mutation::Unblock {
        from: kitchen,
        to: garden,
    })
    .unwrap();
    assert!(w.location(kitchen).blocked.is_empty());
    assert_eq!(w.location(kitchen).connecting.last(), Some(&garden));
    // The lock leaves the passage but stays registered.
    let lock = w.find_item("Lock").unwrap();
    assert_eq!(w.container_of(lock), Ok(Container::Detached));

    w.mutate(Mutation::MovePlayer { to: garden }).unwrap();
    assert_eq!(w.player_location(), garden);
    assert!(w.invariant_violations().is_empty());
}

#[test]
fn failed_mutation_leaves_world_identical() {
    let mut w = common::scenario("scenario-a");
    let before = w.clone();
    let studio = w.find_location("Art studio").unwrap();
    let garden = w.find_location("Garden").unwrap();
    assert!(w
        .mutate(Mutation::Unblock {
            from: studio,
            to: garden
        })
        .is_err());
    assert_eq!(w, before);

    // Obstacle items cannot be picked up structurally.
    let lock = w.find_item("Lock").unwrap();
    let err = w.mutate(Mutation::MoveItem {
        item: lock,
        to: Holder::Location(studio),
    });
    assert!(err.is_err());
    assert_eq!(w, before);
}
