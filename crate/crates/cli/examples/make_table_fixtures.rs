//! Regenerates the annotated logs under `tests/fixtures/tables`.
//!
//! Each log is a scripted playthrough tagged with one tester's error counts
//! from the two published error tables. The tags are spread over the turns
//! in column order.
//!
//!     cargo run -p worldshift-cli --example make_table_fixtures

use std::path::PathBuf;

use worldshift_core::{
    annotate, new_session, BackendConfig, ErrorCategory, Locale, ScenarioCatalog,
};

/// (tester, model, locale, [MI-t, PM-t, UL-t, Planning, Memory])
type Row = (&'static str, &'static str, Locale, [u32; 5]);

const SCENARIO_A: [Row; 8] = [
    ("TesterA", "Gemini", Locale::En, [0, 0, 0, 1, 0]),
    ("TesterB", "Gemini", Locale::En, [0, 0, 0, 1, 0]),
    ("TesterC", "Llama", Locale::En, [3, 1, 0, 0, 0]),
    ("TesterD", "Llama", Locale::En, [4, 1, 0, 2, 0]),
    ("TesterE", "Gemini", Locale::Es, [3, 0, 0, 2, 1]),
    ("TesterF", "Gemini", Locale::Es, [1, 0, 0, 0, 0]),
    ("TesterG", "Llama", Locale::Es, [4, 0, 1, 1, 0]),
    ("TesterH", "Llama", Locale::Es, [0, 0, 0, 0, 0]),
];

const SCENARIO_B: [Row; 8] = [
    ("TesterA", "Gemini", Locale::En, [0, 0, 1, 0, 0]),
    ("TesterB", "Gemini", Locale::En, [0, 0, 1, 0, 0]),
    ("TesterC", "Llama", Locale::En, [0, 0, 1, 0, 0]),
    ("TesterD", "Llama", Locale::En, [0, 0, 0, 0, 0]),
    ("TesterE", "Gemini", Locale::Es, [1, 1, 2, 0, 0]),
    ("TesterF", "Gemini", Locale::Es, [0, 2, 1, 0, 0]),
    ("TesterG", "Llama", Locale::Es, [0, 1, 0, 0, 0]),
    ("TesterH", "Llama", Locale::Es, [0, 1, 0, 0, 0]),
];

const KEY_PATH: [&str; 7] = [
    "ask Laura for the key",
    "go to the kitchen",
    "open the lock with the key",
    "go to the garden",
    "pick up the turtle",
    "go back to the kitchen",
    "put the turtle on the floor",
];

const WAVE_PATH: [&str; 5] = [
    "play the guitar to the flames",
    "I summon a wave to put out the fire",
    "walk into the silent zone",
    "the answer is footsteps",
    "enter the cell",
];

fn main() {
    let out = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/tables");
    let catalog = ScenarioCatalog::bundled();
    for (scenario, rows, inputs) in [
        ("scenario-a", &SCENARIO_A, &KEY_PATH[..]),
        ("scenario-b", &SCENARIO_B, &WAVE_PATH[..]),
    ] {
        let dir = out.join(scenario);
        std::fs::create_dir_all(&dir).unwrap();
        for (tester, model, locale, counts) in rows {
            let mut session = new_session(&catalog, scenario, &BackendConfig::scripted(), *locale)
                .unwrap()
                .with_tester(format!("{tester}/{model}"));
            for input in inputs {
                session.play_turn(input).unwrap();
            }
            let mut log = session.export_log();
            let turns = log.turns.len() as u32;
            let mut k = 0;
            for (category, &n) in ErrorCategory::ALL.iter().zip(counts) {
                for i in 0..n {
                    let turn = k % turns + 1;
                    let note = format!("{} #{}", category.column(), i + 1);
                    annotate(&mut log, turn, *category, &note, "fixture").unwrap();
                    k += 1;
                }
            }
            let path = dir.join(format!("{}.jsonl", tester.to_lowercase()));
            std::fs::write(&path, log.to_jsonl()).unwrap();
            println!("wrote {}", path.display());
        }
    }
}
