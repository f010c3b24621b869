mod common;

use worldshift_core::engine::{MoveItem, MovePlayer, UnblockLocation};
use worldshift_core::world::{Holder, Mutation};
use worldshift_core::{
    execute_plan, validate, Engine, EngineOptions, Outcome, Rejection, Transformation, TurnPlan,
    World,
};

fn mi(item: &str, dest: &str) -> Transformation {
    Transformation::MoveItem {
        item: item.into(),
        destination: dest.into(),
    }
}

fn ul(target: &str) -> Transformation {
    Transformation::UnblockLocation {
        target: target.into(),
    }
}

fn pm(target: &str) -> Transformation {
    Transformation::MovePlayer {
        target: target.into(),
    }
}

fn goto(w: &mut World, name: &str) {
    let to = w.find_location(name).unwrap();
    w.mutate(Mutation::MovePlayer { to }).unwrap();
}

/// Scenario A with the Garden unlocked and the player standing in `at`.
fn unlocked_a(at: &str) -> World {
    let mut w = common::scenario("scenario-a");
    let kitchen = w.find_location("Kitchen").unwrap();
    let garden = w.find_location("Garden").unwrap();
    w.mutate(Mutation::Unblock {
        from: kitchen,
        to: garden,
    })
    .unwrap();
    goto(&mut w, at);
    w
}

#[test]
fn alias_names_are_rejected_as_unknown() {
    let w = common::scenario("scenario-a");
    assert_eq!(validate(&w, &mi("Hojita", "Kitchen")), Err(Rejection::UnknownComponent));
    assert_eq!(validate(&w, &mi("Key", "Nowhere")), Err(Rejection::UnknownComponent));
    assert_eq!(validate(&w, &pm("Hojita")), Err(Rejection::UnknownComponent));
}

#[test]
fn unblocking_a_reachable_location_is_rejected() {
    let w = common::scenario("scenario-a");
    assert_eq!(validate(&w, &ul("Kitchen")), Err(Rejection::AlreadyReachable));
    assert_eq!(validate(&w, &ul("Garden")), Err(Rejection::NotBlocked));
}

#[test]
fn taking_the_key_from_a_colocated_character() {
    let w = common::scenario("scenario-a");
    assert_eq!(validate(&w, &mi("Key", "Inventory")), Ok(()));
    assert_eq!(validate(&w, &mi("<Key>", "<Emma>")), Ok(()));
}

#[test]
fn move_item_consistency_checks() {
    let mut w = common::scenario("scenario-a");
    // Turtle is in the Garden, not here.
    assert_eq!(validate(&w, &mi("Turtle", "Inventory")), Err(Rejection::SourceMismatch));
    // Remote drop.
    assert_eq!(
        validate(&w, &mi("A grey hammer", "Kitchen")),
        Err(Rejection::DestinationUnreachable)
    );
    // Giving to the NPC standing here is fine.
    assert_eq!(validate(&w, &mi("A grey hammer", "Laura")), Ok(()));
    // Non-items as objects or destinations.
    assert_eq!(validate(&w, &mi("Laura", "Inventory")), Err(Rejection::UnknownComponent));
    assert_eq!(validate(&w, &mi("Key", "A grey hammer")), Err(Rejection::UnknownComponent));

    goto(&mut w, "Kitchen");
    // The lock is an obstacle, not a loose object.
    assert_eq!(validate(&w, &mi("Lock", "Inventory")), Err(Rejection::SourceMismatch));

    let b = common::scenario("scenario-b");
    assert_eq!(validate(&b, &mi("Pond", "Inventory")), Err(Rejection::NotGettable));
    assert_eq!(validate(&b, &mi("Guitar", "Clearing in the woods")), Ok(()));
}

#[test]
fn move_player_requires_an_open_passage() {
    let mut w = common::scenario("scenario-a");
    assert_eq!(validate(&w, &pm("Kitchen")), Ok(()));
    assert_eq!(validate(&w, &pm("Garden")), Err(Rejection::DestinationUnreachable));
    assert_eq!(validate(&w, &pm("Art studio")), Err(Rejection::DestinationUnreachable));
    goto(&mut w, "Kitchen");
    assert_eq!(validate(&w, &pm("Garden")), Err(Rejection::DestinationUnreachable));
}

#[test]
fn validation_is_pure() {
    let w = common::scenario("scenario-a");
    let before = w.clone();
    for t in [mi("Key", "Inventory"), ul("Garden"), pm("Kitchen"), mi("Hojita", "x")] {
        let _ = validate(&w, &t);
    }
    assert_eq!(w, before);
}

#[test]
fn unblock_runs_before_move_player() {
    let mut w = common::scenario("scenario-a");
    goto(&mut w, "Kitchen");
    let plan = TurnPlan {
        unblocks: vec![UnblockLocation {
            target: "Garden".into(),
        }],
        move_player: Some(MovePlayer {
            target: "Garden".into(),
        }),
        ..TurnPlan::default()
    };
    let reports = execute_plan(&mut w, &plan);
    assert_eq!(reports.len(), 2);
    assert!(reports.iter().all(|r| r.outcome == Outcome::Applied));
    assert_eq!(w.location(w.player_location()).name, "Garden");
}

#[test]
fn drop_before_moving_is_the_planning_failure() {
    let mut w = unlocked_a("Garden");
    let turtle = w.find_item("Turtle").unwrap();
    let player = w.player_id();
    w.mutate(Mutation::MoveItem {
        item: turtle,
        to: Holder::Character(player),
    })
    .unwrap();

    let plan = TurnPlan {
        moves: vec![MoveItem {
            item: "Turtle".into(),
            destination: "Kitchen".into(),
        }],
        move_player: Some(MovePlayer {
            target: "Kitchen".into(),
        }),
        ..TurnPlan::default()
    };
    let reports = execute_plan(&mut w, &plan);
    assert_eq!(reports[0].outcome, Outcome::Rejected);
    assert_eq!(reports[0].reason, Some(Rejection::DestinationUnreachable));
    assert_eq!(reports[1].outcome, Outcome::Applied);
    assert_eq!(w.location(w.player_location()).name, "Kitchen");
    // The turtle stayed with the player.
    assert_eq!(
        w.container_of(turtle),
        Ok(worldshift_core::world::Container::Character(player))
    );
}

#[test]
fn empty_plan_is_identity() {
    let mut w = common::scenario("scenario-b");
    let before = w.clone();
    assert!(execute_plan(&mut w, &TurnPlan::default()).is_empty());
    assert_eq!(w, before);
}

#[test]
fn rejection_does_not_abort_the_plan() {
    let mut w = common::scenario("scenario-a");
    let plan = TurnPlan {
        moves: vec![
            MoveItem {
                item: "Hojita".into(),
                destination: "Inventory".into(),
            },
            MoveItem {
                item: "Key".into(),
                destination: "Inventory".into(),
            },
        ],
        unblocks: vec![UnblockLocation {
            target: "Kitchen".into(),
        }],
        move_player: Some(MovePlayer {
            target: "Kitchen".into(),
        }),
    };
    let reports = execute_plan(&mut w, &plan);
    let outcomes: Vec<_> = reports.iter().map(|r| (r.transformation.code(), r.reason)).collect();
    assert_eq!(
        outcomes,
        [
            ("MI-t", Some(Rejection::UnknownComponent)),
            ("MI-t", None),
            ("UL-t", Some(Rejection::AlreadyReachable)),
            ("PM-t", None),
        ]
    );
}

#[test]
fn later_transformations_see_earlier_effects() {
    // Take the hammer, then hand it to Laura in the same turn.
    let mut w = common::scenario("scenario-a");
    let plan = TurnPlan {
        moves: vec![
            MoveItem {
                item: "A grey hammer".into(),
                destination: "Inventory".into(),
            },
            MoveItem {
                item: "A grey hammer".into(),
                destination: "Laura".into(),
            },
        ],
        ..TurnPlan::default()
    };
    let reports = execute_plan(&mut w, &plan);
    assert!(reports.iter().all(|r| r.is_applied()));
    let laura = w.find_character("Laura").unwrap();
    assert!(w.character(laura).inventory.contains(&w.find_item("A grey hammer").unwrap()));
}

#[test]
fn strict_puzzles_check_the_answer() {
    let mut w = common::scenario("scenario-b");
    let clearing = w.find_location("Clearing in the woods").unwrap();
    let zone = w.find_location("Silent zone").unwrap();
    w.mutate(Mutation::Unblock {
        from: clearing,
        to: zone,
    })
    .unwrap();
    goto(&mut w, "Silent zone");
    let plan = TurnPlan {
        unblocks: vec![UnblockLocation {
            target: "Cell".into(),
        }],
        ..TurnPlan::default()
    };

    let strict = Engine::new(EngineOptions {
        strict_puzzles: true,
    });
    let mut wrong = w.clone();
    let r = strict.execute(&mut wrong, &plan, "The answer is a shadow");
    assert_eq!(r[0].reason, Some(Rejection::PuzzleUnsolved));
    assert_eq!(wrong, w);

    let mut right = w.clone();
    let r = strict.execute(&mut right, &plan, "I say: FOOTSTEPS!");
    assert!(r[0].is_applied());

    // Default mode trusts the suggestion, even for a wrong answer.
    let mut lenient = w.clone();
    let r = Engine::default().execute(&mut lenient, &plan, "The answer is a shadow");
    assert!(r[0].is_applied());
}
