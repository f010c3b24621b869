//! The three world-state transformations, their consistency checks and the
//! fixed-order plan executor.
//!
//! A plan always runs every item move first, then every unblock, then the
//! single player move. Each transformation is validated against the world
//! as left by the ones before it, and a rejection only skips that one
//! transformation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::world::{ComponentRef, Container, Holder, Mutation, World};

/// A change suggested for symbolic execution. Names are raw, as parsed;
/// they are resolved during validation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Transformation {
    MoveItem { item: String, destination: String },
    UnblockLocation { target: String },
    MovePlayer { target: String },
}

impl Transformation {
    /// Short tag used in logs and the debug surface.
    pub fn code(&self) -> &'static str {
        match self {
            Transformation::MoveItem { .. } => "MI-t",
            Transformation::UnblockLocation { .. } => "UL-t",
            Transformation::MovePlayer { .. } => "PM-t",
        }
    }
}

impl fmt::Display for Transformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transformation::MoveItem { item, destination } => {
                write!(f, "MI-t <{item}> -> <{destination}>")
            }
            Transformation::UnblockLocation { target } => write!(f, "UL-t <{target}>"),
            Transformation::MovePlayer { target } => write!(f, "PM-t <{target}>"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MoveItem {
    pub item: String,
    pub destination: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct UnblockLocation {
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MovePlayer {
    pub target: String,
}

/// All transformations suggested for one turn, grouped by kind. The grouping
/// is the execution order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TurnPlan {
    pub moves: Vec<MoveItem>,
    pub unblocks: Vec<UnblockLocation>,
    pub move_player: Option<MovePlayer>,
}

impl TurnPlan {
    pub fn len(&self) -> usize {
        self.moves.len() + self.unblocks.len() + usize::from(self.move_player.is_some())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Transformations in execution order.
    pub fn transformations(&self) -> Vec<Transformation> {
        let moves = self.moves.iter().map(|m| Transformation::MoveItem {
            item: m.item.clone(),
            destination: m.destination.clone(),
        });
        let unblocks = self.unblocks.iter().map(|u| Transformation::UnblockLocation {
            target: u.target.clone(),
        });
        let player = self.move_player.iter().map(|p| Transformation::MovePlayer {
            target: p.target.clone(),
        });
        moves.chain(unblocks).chain(player).collect()
    }
}

/// Why a transformation was not executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rejection {
    UnknownComponent,
    NotGettable,
    SourceMismatch,
    DestinationUnreachable,
    NotBlocked,
    AlreadyReachable,
    StructuralViolation,
    /// Only produced with [`EngineOptions::strict_puzzles`].
    PuzzleUnsolved,
}

impl Rejection {
    pub fn code(self) -> &'static str {
        match self {
            Rejection::UnknownComponent => "unknown-component",
            Rejection::NotGettable => "not-gettable",
            Rejection::SourceMismatch => "source-mismatch",
            Rejection::DestinationUnreachable => "destination-unreachable",
            Rejection::NotBlocked => "not-blocked",
            Rejection::AlreadyReachable => "already-reachable",
            Rejection::StructuralViolation => "structural-violation",
            Rejection::PuzzleUnsolved => "puzzle-unsolved",
        }
    }
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Applied,
    Rejected,
}

/// Result of one transformation inside [`execute_plan`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApplicationReport {
    pub transformation: Transformation,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<Rejection>,
}

impl ApplicationReport {
    fn applied(t: Transformation) -> Self {
        ApplicationReport {
            transformation: t,
            outcome: Outcome::Applied,
            reason: None,
        }
    }

    fn rejected(t: Transformation, reason: Rejection) -> Self {
        ApplicationReport {
            transformation: t,
            outcome: Outcome::Rejected,
            reason: Some(reason),
        }
    }

    pub fn is_applied(&self) -> bool {
        self.outcome == Outcome::Applied
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EngineOptions {
    /// Require the player input to contain a puzzle's answer before a passage
    /// guarded by that puzzle can be unblocked. Off by default: the LLM's
    /// judgement of the answer stands.
    #[serde(default)]
    pub strict_puzzles: bool,
}

/// Checks a transformation against the current world and returns the
/// mutation it would perform.
pub fn plan_mutation(world: &World, t: &Transformation) -> Result<Mutation, Rejection> {
    let ctx = world.player_context();
    let here = ctx.location;
    match t {
        Transformation::MoveItem { item, destination } => {
            let item = world.find_item(item).ok_or(Rejection::UnknownComponent)?;
            let dest = world
                .resolve_name(destination)
                .ok_or(Rejection::UnknownComponent)?;
            let to = match dest {
                ComponentRef::Inventory => Holder::Character(world.player_id()),
                ComponentRef::Location(l) if l == here => Holder::Location(l),
                ComponentRef::Character(c) if c == world.player_id() => Holder::Character(c),
                ComponentRef::Character(c) if world.character(c).location == here => {
                    Holder::Character(c)
                }
                ComponentRef::Location(_) | ComponentRef::Character(_) => {
                    return Err(Rejection::DestinationUnreachable)
                }
                ComponentRef::Item(_) | ComponentRef::Puzzle(_) => {
                    return Err(Rejection::UnknownComponent)
                }
            };
            let source_ok = match world
                .container_of(item)
                .map_err(|_| Rejection::StructuralViolation)?
            {
                Container::Location(l) => l == here,
                Container::Character(c) => world.character(c).location == here,
                Container::Obstacle { .. } | Container::Detached => false,
            };
            if !source_ok {
                return Err(Rejection::SourceMismatch);
            }
            if matches!(to, Holder::Character(_)) && !world.item(item).gettable {
                return Err(Rejection::NotGettable);
            }
            Ok(Mutation::MoveItem { item, to })
        }
        Transformation::UnblockLocation { target } => {
            let target = world.find_location(target).ok_or(Rejection::UnknownComponent)?;
            let loc = world.location(here);
            if loc.connects_to(target) {
                Err(Rejection::AlreadyReachable)
            } else if loc.blocked_passage_to(target).is_some() {
                Ok(Mutation::Unblock {
                    from: here,
                    to: target,
                })
            } else {
                Err(Rejection::NotBlocked)
            }
        }
        Transformation::MovePlayer { target } => {
            let target = world.find_location(target).ok_or(Rejection::UnknownComponent)?;
            if world.location(here).connects_to(target) {
                Ok(Mutation::MovePlayer { to: target })
            } else {
                Err(Rejection::DestinationUnreachable)
            }
        }
    }
}

/// Pure consistency check of one transformation.
pub fn validate(world: &World, t: &Transformation) -> Result<(), Rejection> {
    plan_mutation(world, t).map(|_| ())
}

/// Executes a plan with default options.
pub fn execute_plan(world: &mut World, plan: &TurnPlan) -> Vec<ApplicationReport> {
    Engine::default().execute(world, plan, "")
}

/// Plan executor carrying the engine options.
#[derive(Debug, Clone, Copy, Default)]
pub struct Engine {
    pub options: EngineOptions,
}

impl Engine {
    pub fn new(options: EngineOptions) -> Self {
        Engine { options }
    }

    /// Validates and applies every transformation of `plan` in the fixed
    /// order. `player_input` is only consulted in strict-puzzle mode.
    pub fn execute(
        &self,
        world: &mut World,
        plan: &TurnPlan,
        player_input: &str,
    ) -> Vec<ApplicationReport> {
        plan.transformations()
            .into_iter()
            .map(|t| match self.check(world, &t, player_input) {
                Ok(m) => match world.mutate(m) {
                    Ok(()) => ApplicationReport::applied(t),
                    Err(_) => ApplicationReport::rejected(t, Rejection::StructuralViolation),
                },
                Err(reason) => ApplicationReport::rejected(t, reason),
            })
            .collect()
    }

    fn check(
        &self,
        world: &World,
        t: &Transformation,
        player_input: &str,
    ) -> Result<Mutation, Rejection> {
        let m = plan_mutation(world, t)?;
        if let (true, Mutation::Unblock { from, to }) = (self.options.strict_puzzles, m) {
            let passage = world
                .location(from)
                .blocked_passage_to(to)
                .ok_or(Rejection::StructuralViolation)?;
            if let ComponentRef::Puzzle(p) = passage.obstacle {
                let answer = world.puzzle(p).answer.trim().to_lowercase();
                if !player_input.to_lowercase().contains(&answer) {
                    return Err(Rejection::PuzzleUnsolved);
                }
            }
        }
        Ok(m)
    }
}
