//! Scenarios shipped with the crate.

use super::config::{Overrides, Scenario};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct LibraryEntry {
    pub name: &'static str,
    pub json: &'static str,
}

impl LibraryEntry {
    pub fn load(&self, overrides: &Overrides) -> Result<Scenario> {
        Scenario::from_json_str(self.json, overrides).map_err(|e| e.in_scenario(self.name))
    }

    /// The `description` field, read without validating the rest.
    pub fn description(&self) -> String {
        serde_json::from_str::<serde_json::Value>(self.json)
            .ok()
            .and_then(|v| v.get("description")?.as_str().map(String::from))
            .unwrap_or_default()
    }
}

macro_rules! shipped {
    ($($name:literal),* $(,)?) => {
        &[$(LibraryEntry {
            name: $name,
            json: include_str!(concat!("../../../../scenarios/", $name, ".json")),
        }),*]
    };
}

static LIBRARY: &[LibraryEntry] = shipped![
    "fig2a",
    "fig2c",
    "fig2f",
    "fig3_sweep",
    "fig4_entanglement",
    "fig5a",
    "fig5b",
    "fig5c",
    "fig6a",
    "fig6b",
    "fig6c",
    "table1_matrix",
    "ladder_trace",
    "rwa_validation",
];

pub fn library() -> &'static [LibraryEntry] {
    LIBRARY
}

pub fn lookup(name: &str) -> Result<&'static LibraryEntry> {
    LIBRARY
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::config("name", format!("no shipped scenario `{name}`")))
}
