use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Deserialize;

use super::{Sample, TaskKind};
use crate::error::{Error, Result};

const PROMPTS_TOML: &str = include_str!("../../data/prompts.toml");

/// Versioned table of the fixed instruction sentence for each task.
#[derive(Debug, Clone, Deserialize)]
pub struct PromptTable {
    pub version: u32,
    instructions: BTreeMap<TaskKind, String>,
}

impl PromptTable {
    pub fn from_toml(text: &str) -> Result<Self> {
        let table: PromptTable = toml::from_str(text).map_err(|e| Error::DataFile {
            name: "prompts.toml".into(),
            message: e.to_string(),
        })?;
        if let Some(missing) = TaskKind::ALL.into_iter().find(|t| !table.instructions.contains_key(t)) {
            return Err(Error::DataFile {
                name: "prompts.toml".into(),
                message: format!("no instruction for {missing}"),
            });
        }
        Ok(table)
    }

    /// The table shipped with the crate.
    pub fn shipped() -> &'static PromptTable {
        static TABLE: OnceLock<PromptTable> = OnceLock::new();
        TABLE.get_or_init(|| PromptTable::from_toml(PROMPTS_TOML).expect("shipped prompts.toml is valid"))
    }

    pub fn instruction(&self, task: TaskKind) -> &str {
        &self.instructions[&task]
    }

    /// `[TASK: <name>]`, the input, then the task instruction, one per line.
    pub fn format(&self, sample: &Sample) -> String {
        format!(
            "[TASK: {}]\n{}\n{}",
            sample.task.as_str(),
            sample.input.trim(),
            self.instruction(sample.task)
        )
    }
}

/// Renders the prompt for `sample` with the shipped table. The target is never included.
pub fn format_instruction(sample: &Sample) -> String {
    PromptTable::shipped().format(sample)
}
