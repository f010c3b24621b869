//! Interactive-storytelling engine where a language model suggests
//! pre-programmed world-state transformations and a symbolic world model
//! validates and executes them.
//!
//! The turn pipeline is
//! [`render_world`] → [`build_prompt`] → [`Backend::suggest`] →
//! [`parse_response`] → [`ParsedResponse::to_plan`] → [`execute_plan`] →
//! [`objective_satisfied`], driven by [`Session::play_turn`].

pub mod analysis;
pub mod engine;
pub mod gateway;
pub mod locale;
pub mod log;
pub mod parser;
pub mod render;
pub mod scenario;
pub mod session;
pub mod world;

pub use analysis::{annotate, report, ErrorCategory, ErrorTable, ErrorTag};
pub use engine::{
    execute_plan, validate, ApplicationReport, Engine, EngineOptions, Outcome, Rejection,
    Transformation, TurnPlan,
};
pub use gateway::{Backend, BackendConfig, BackendError, BackendKind, ScriptedBackend};
pub use locale::Locale;
pub use log::{LogError, SessionLog};
pub use parser::{emit_response, parse_response, to_plan, ParseError, ParsedResponse};
pub use render::{build_prompt, render_world, PromptPair, RenderedState};
pub use scenario::{
    load_scenario, validate_scenario, Scenario, ScenarioCatalog, ScenarioDocument, ScenarioError,
};
pub use session::{new_session, objective_satisfied, Session, SessionError, TurnRecord};
pub use world::World;
