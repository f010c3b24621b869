//! Per-session turn loop, objective detection and turn logging.
//!
//! Every turn runs the same pipeline: render the world, build the prompt,
//! ask the backend, parse the reply, execute the plan, check the objective.
//! Nothing but the world state carries over from one turn to the next.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::ErrorTag;
use crate::engine::{ApplicationReport, Engine, EngineOptions};
use crate::gateway::{Backend, BackendConfig, BackendError};
use crate::locale::Locale;
use crate::parser::{parse_response, ParsedResponse};
use crate::render::{build_prompt, render_world, PromptError, PromptPair};
use crate::scenario::{Scenario, ScenarioCatalog, ScenarioError, WorldDocument};
use crate::world::{Container, Objective, World};

pub const DEFAULT_TURN_CAP: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionStatus {
    Active,
    Completed,
}

/// Full audit of one turn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnRecord {
    pub index: u32,
    pub player_input: String,
    pub rendered_state: String,
    pub raw_reply: String,
    pub parsed: ParsedResponse,
    /// Set when the reply could not be parsed; `parsed` is then empty.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parse_error: Option<String>,
    pub reports: Vec<ApplicationReport>,
    pub narration: Option<String>,
    pub objective_met: bool,
    #[serde(default)]
    pub annotations: Vec<ErrorTag>,
    /// World state after this turn, for replay without a backend.
    pub world_after: WorldDocument,
}

#[derive(Debug, Error)]
pub enum SessionError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("backend configuration error: {0}")]
    BackendConfig(String),
    #[error("session already completed")]
    Completed,
    #[error("turn cap of {0} reached")]
    TurnCapReached(usize),
    #[error("empty player input")]
    EmptyInput,
    #[error(transparent)]
    Backend(BackendError),
}

impl SessionError {
    pub fn code(&self) -> &'static str {
        match self {
            SessionError::Scenario(ScenarioError::UnknownScenario(_)) => "unknown-scenario",
            SessionError::Scenario(_) => "invalid-scenario",
            SessionError::BackendConfig(_) => "backend-config-error",
            SessionError::Completed => "session-completed",
            SessionError::TurnCapReached(_) => "turn-cap-reached",
            SessionError::EmptyInput => "empty-input",
            SessionError::Backend(e) => e.code(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SessionOptions {
    pub turn_cap: usize,
    pub engine: EngineOptions,
}

impl Default for SessionOptions {
    fn default() -> Self {
        SessionOptions {
            turn_cap: DEFAULT_TURN_CAP,
            engine: EngineOptions::default(),
        }
    }
}

/// Whether the world satisfies its objective.
pub fn objective_satisfied(world: &World) -> bool {
    let player = world.player_id();
    let here = world.player_location();
    match world.objective() {
        Objective::PlayerAtLocation(l) => here == l,
        Objective::PlayerHasItem(i) => world.container_of(i) == Ok(Container::Character(player)),
        Objective::PlayerWithCharacter(c) => world.character(c).location == here,
        Objective::ItemAtLocation { item, location } => {
            world.container_of(item) == Ok(Container::Location(location))
        }
    }
}

/// One player's run through a scenario.
pub struct Session {
    id: String,
    scenario_id: String,
    locale: Locale,
    world: World,
    initial_world: WorldDocument,
    backend: Box<dyn Backend>,
    status: SessionStatus,
    log: Vec<TurnRecord>,
    options: SessionOptions,
    tester: Option<String>,
}

impl std::fmt::Debug for Session {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Session")
            .field("id", &self.id)
            .field("scenario_id", &self.scenario_id)
            .field("locale", &self.locale)
            .field("backend", &self.backend.label())
            .field("status", &self.status)
            .field("turns", &self.log.len())
            .finish()
    }
}

/// Creates a session for a catalog scenario and a backend configuration.
pub fn new_session(
    catalog: &ScenarioCatalog,
    scenario_id: &str,
    backend: &BackendConfig,
    locale: Locale,
) -> Result<Session, SessionError> {
    let scenario = catalog.get(scenario_id)?;
    let backend = backend
        .build(scenario.script.as_deref())
        .map_err(|e| SessionError::BackendConfig(e.to_string()))?;
    Session::new(scenario, backend, locale)
}

impl Session {
    pub fn new(
        scenario: &Scenario,
        backend: Box<dyn Backend>,
        locale: Locale,
    ) -> Result<Session, SessionError> {
        let world = scenario.load_world()?;
        Ok(Session {
            id: uuid::Uuid::new_v4().to_string(),
            scenario_id: scenario.id().to_string(),
            locale,
            initial_world: WorldDocument::from_world(&world),
            world,
            backend,
            status: SessionStatus::Active,
            log: Vec::new(),
            options: SessionOptions::default(),
            tester: None,
        })
    }

    pub fn with_options(mut self, options: SessionOptions) -> Self {
        self.options = options;
        self
    }

    /// Label of the person playing, used as the row name in error tables.
    pub fn with_tester(mut self, tester: impl Into<String>) -> Self {
        self.tester = Some(tester.into());
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn scenario_id(&self) -> &str {
        &self.scenario_id
    }

    pub fn locale(&self) -> Locale {
        self.locale
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn status(&self) -> SessionStatus {
        self.status
    }

    pub fn turns(&self) -> &[TurnRecord] {
        &self.log
    }

    pub fn backend_label(&self) -> String {
        self.backend.label()
    }

    /// The prompt the next turn would send for `input`.
    pub fn prompt_for(&self, input: &str) -> Result<PromptPair, SessionError> {
        let state = render_world(&self.world, self.locale);
        build_prompt(&state, input, self.locale).map_err(|e| match e {
            PromptError::EmptyInput => SessionError::EmptyInput,
        })
    }

    /// Plays one turn. Backend failures leave the world and the log as they
    /// were.
    pub fn play_turn(&mut self, input: &str) -> Result<&TurnRecord, SessionError> {
        if self.status == SessionStatus::Completed {
            return Err(SessionError::Completed);
        }
        if self.log.len() >= self.options.turn_cap {
            return Err(SessionError::TurnCapReached(self.options.turn_cap));
        }
        let prompt = self.prompt_for(input)?;
        let raw_reply = self.backend.suggest(&prompt).map_err(SessionError::Backend)?;
        let rendered_state = render_world(&self.world, self.locale).text;

        let (parsed, parse_error) = match parse_response(&raw_reply) {
            Ok(p) => (p, None),
            Err(e) => (ParsedResponse::default(), Some(e.to_string())),
        };
        let reports =
            Engine::new(self.options.engine).execute(&mut self.world, &parsed.to_plan(), input);
        let objective_met = objective_satisfied(&self.world);
        if objective_met {
            self.status = SessionStatus::Completed;
        }
        self.log.push(TurnRecord {
            index: self.log.len() as u32 + 1,
            player_input: input.to_string(),
            rendered_state,
            raw_reply,
            narration: parsed.narration.clone(),
            parsed,
            parse_error,
            reports,
            objective_met,
            annotations: Vec::new(),
            world_after: WorldDocument::from_world(&self.world),
        });
        Ok(self.log.last().expect("just pushed"))
    }

    pub fn export_log(&self) -> crate::log::SessionLog {
        crate::log::SessionLog {
            header: crate::log::LogHeader {
                schema_version: crate::log::SCHEMA_VERSION,
                session_id: self.id.clone(),
                scenario_id: self.scenario_id.clone(),
                locale: self.locale,
                backend: self.backend.label(),
                tester: self.tester.clone(),
                engine: self.options.engine,
                initial_world: self.initial_world.clone(),
            },
            turns: self.log.clone(),
        }
    }
}
