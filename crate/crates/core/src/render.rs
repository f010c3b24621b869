//! Text rendering of the world state and the two-message world-update
//! prompt.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::locale::Locale;
use crate::world::{ComponentRef, ItemId, LocationId, World};

const SYSTEM_EN: &str = include_str!("../templates/system.en.txt");
const SYSTEM_ES: &str = include_str!("../templates/system.es.txt");

struct Template {
    player_in: &'static str,
    from: &'static str,
    can_access: &'static str,
    blocked_to: &'static str,
    blocked_by: &'static str,
    inventory: &'static str,
    see_objects: &'static str,
    see_characters: &'static str,
    none: &'static str,
    description_header: &'static str,
    player_location: &'static str,
    characters: &'static str,
    player_label: &'static str,
    acting_as: &'static str,
    character_items: &'static str,
    objects: &'static str,
    user_before_input: &'static str,
    user_before_state: &'static str,
    system: &'static str,
}

const EN: Template = Template {
    player_in: "The player is in",
    from: "From",
    can_access: "the player can access:",
    blocked_to: "there are blocked passages to:",
    blocked_by: "blocked by",
    inventory: "The player has the following objects in the inventory:",
    see_objects: "The player can see the following objects:",
    see_characters: "The player can see the following characters:",
    none: "None",
    description_header: "Here is a description of each component.",
    player_location: "This is the player's location.",
    characters: "Characters:",
    player_label: "Player",
    acting_as: "The player is acting as",
    character_items: "This character has the following items:",
    objects: "Objects:",
    user_before_input: "Give the changes in the world following the specified format, after this player input \"",
    user_before_state: "\" on this world state: ",
    system: SYSTEM_EN,
};

const ES: Template = Template {
    player_in: "El jugador está en",
    from: "Desde",
    can_access: "el jugador puede acceder a:",
    blocked_to: "hay pasajes bloqueados hacia:",
    blocked_by: "bloqueado por",
    inventory: "El jugador tiene los siguientes objetos en el inventario:",
    see_objects: "El jugador puede ver los siguientes objetos:",
    see_characters: "El jugador puede ver los siguientes personajes:",
    none: "Ninguno",
    description_header: "Aquí hay una descripción de cada componente.",
    player_location: "Esta es la ubicación del jugador.",
    characters: "Personajes:",
    player_label: "Jugador",
    acting_as: "El jugador interpreta a",
    character_items: "Este personaje tiene los siguientes objetos:",
    objects: "Objetos:",
    user_before_input: "Indica los cambios en el mundo siguiendo el formato especificado, luego de esta entrada del jugador \"",
    user_before_state: "\" en este estado del mundo: ",
    system: SYSTEM_ES,
};

fn template(locale: Locale) -> &'static Template {
    match locale {
        Locale::En => &EN,
        Locale::Es => &ES,
    }
}

/// Textual rendering of a world state as shown to the LLM.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RenderedState {
    pub text: String,
}

impl AsRef<str> for RenderedState {
    fn as_ref(&self) -> &str {
        &self.text
    }
}

/// The two chat messages sent to the model every turn.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptPair {
    pub system_msg: String,
    pub user_msg: String,
    /// The player input embedded in `user_msg`. Not sent on the wire; kept
    /// so test doubles can react to it.
    pub player_input: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("empty player input")]
    EmptyInput,
}

/// The fixed storyteller instruction block for `locale`.
pub fn system_message(locale: Locale) -> &'static str {
    template(locale).system
}

fn bracket(name: &str) -> String {
    format!("<{name}>")
}

fn list_or_none<I: IntoIterator<Item = String>>(items: I, none: &str) -> String {
    let v: Vec<String> = items.into_iter().collect();
    if v.is_empty() {
        none.to_string()
    } else {
        v.join(", ")
    }
}

/// Joins a label with description fragments, one space apart.
fn described(head: String, fragments: &[String]) -> String {
    let mut line = head;
    for f in fragments {
        if !line.ends_with(' ') {
            line.push(' ');
        }
        line.push_str(f);
    }
    line
}

/// Renders the world from the player's point of view.
pub fn render_world(world: &World, locale: Locale) -> RenderedState {
    let t = template(locale);
    let ctx = world.player_context();
    let here = world.location(ctx.location);
    let loc_name = bracket(&here.name);
    let item_names = |ids: &[ItemId]| -> Vec<String> {
        ids.iter().map(|&i| bracket(&world.item(i).name)).collect()
    };
    let loc_names = |ids: &[LocationId]| -> Vec<String> {
        ids.iter().map(|&l| bracket(&world.location(l).name)).collect()
    };

    let mut lines = vec![
        format!("{} {loc_name}", t.player_in),
        format!(
            "{} {loc_name} {} {}",
            t.from,
            t.can_access,
            list_or_none(loc_names(&ctx.reachable), t.none)
        ),
        format!(
            "{} {loc_name} {} {}",
            t.from,
            t.blocked_to,
            list_or_none(
                ctx.blocked.iter().map(|b| format!(
                    "{} {} {}",
                    bracket(&world.location(b.target).name),
                    t.blocked_by,
                    bracket(world.name_of(b.obstacle))
                )),
                t.none
            )
        ),
        format!("{} {}", t.inventory, list_or_none(item_names(&ctx.inventory), t.none)),
        format!(
            "{} {}",
            t.see_objects,
            list_or_none(item_names(&ctx.visible_items), t.none)
        ),
        format!(
            "{} {}",
            t.see_characters,
            list_or_none(
                ctx.visible_characters
                    .iter()
                    .map(|&c| bracket(&world.character(c).name)),
                t.none
            )
        ),
        String::new(),
        t.description_header.to_string(),
        described(
            format!("{loc_name}: {}", t.player_location),
            &here.descriptions,
        ),
        t.characters.to_string(),
    ];

    let player = world.player();
    lines.push(described(
        format!(
            "- {}: {} {}.",
            bracket(t.player_label),
            t.acting_as,
            bracket(&player.name)
        ),
        &player.descriptions,
    ));
    for &c in &ctx.visible_characters {
        let npc = world.character(c);
        let mut fragments = npc.descriptions.clone();
        if !npc.inventory.is_empty() {
            fragments.push(format!(
                "{} {}",
                t.character_items,
                item_names(&npc.inventory).join(", ")
            ));
        }
        lines.push(described(format!("- {}: ", bracket(&npc.name)), &fragments));
    }

    lines.push(t.objects.to_string());
    let mut objects: Vec<ComponentRef> = ctx
        .visible_items
        .iter()
        .chain(
            ctx.visible_characters
                .iter()
                .flat_map(|&c| world.character(c).inventory.iter()),
        )
        .chain(ctx.inventory.iter())
        .map(|&i| ComponentRef::Item(i))
        .collect();
    objects.extend(ctx.blocked.iter().map(|b| b.obstacle));
    for r in objects {
        let fragments = match r {
            ComponentRef::Item(i) => world.item(i).descriptions.clone(),
            ComponentRef::Puzzle(p) => {
                let puzzle = world.puzzle(p);
                let mut f = puzzle.descriptions.clone();
                f.push(puzzle.problem.clone());
                f
            }
            ComponentRef::Location(l) => world.location(l).descriptions.clone(),
            ComponentRef::Character(c) => world.character(c).descriptions.clone(),
            ComponentRef::Inventory => Vec::new(),
        };
        let line = described(format!("- {}: ", bracket(world.name_of(r))), &fragments);
        lines.push(line.trim_end().to_string());
    }

    RenderedState {
        text: lines.join("\n"),
    }
}

/// Builds the world-update prompt for one turn.
pub fn build_prompt(
    state: &RenderedState,
    input: &str,
    locale: Locale,
) -> Result<PromptPair, PromptError> {
    if input.trim().is_empty() {
        return Err(PromptError::EmptyInput);
    }
    let t = template(locale);
    let user_msg = format!(
        "{}{input}{}{}",
        t.user_before_input, t.user_before_state, state.text
    );
    Ok(PromptPair {
        system_msg: t.system.to_string(),
        user_msg,
        player_input: input.to_string(),
    })
}
