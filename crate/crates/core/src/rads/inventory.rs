use std::collections::HashMap;
use std::sync::OnceLock;

use serde::Deserialize;

use super::{squash, RadsCategory, RadsSystem, SeverityRank};
use crate::error::{Error, Result};

const INVENTORY_TOML: &str = include_str!("../../data/rads_inventory.toml");

#[derive(Debug, Clone, Deserialize)]
pub struct InventoryEntry {
    pub system: RadsSystem,
    pub code: String,
    pub rank: SeverityRank,
    #[serde(default)]
    pub aliases: Vec<String>,
}

impl InventoryEntry {
    pub fn category(&self) -> RadsCategory {
        RadsCategory {
            system: self.system,
            code: self.code.clone(),
            rank: self.rank,
        }
    }
}

#[derive(Debug, Deserialize)]
struct InventoryFile {
    version: u32,
    category: Vec<InventoryEntry>,
}

/// The versioned table of canonical categories and their code spellings.
#[derive(Debug, Clone)]
pub struct Inventory {
    pub version: u32,
    entries: Vec<InventoryEntry>,
    by_key: HashMap<(RadsSystem, String), usize>,
}

impl Inventory {
    pub fn from_toml(text: &str) -> Result<Self> {
        let bad = |message: String| Error::DataFile {
            name: "rads_inventory.toml".into(),
            message,
        };
        let file: InventoryFile = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        let mut by_key = HashMap::new();
        for (idx, entry) in file.category.iter().enumerate() {
            for spelling in std::iter::once(&entry.code).chain(&entry.aliases) {
                let key = (entry.system, squash(spelling));
                if let Some(prev) = by_key.insert(key, idx) {
                    if prev != idx {
                        return Err(bad(format!(
                            "{} spelling `{spelling}` maps to two categories",
                            entry.system
                        )));
                    }
                }
            }
        }
        Ok(Inventory {
            version: file.version,
            entries: file.category,
            by_key,
        })
    }

    pub fn shipped() -> &'static Inventory {
        static INV: OnceLock<Inventory> = OnceLock::new();
        INV.get_or_init(|| Inventory::from_toml(INVENTORY_TOML).expect("shipped inventory is valid"))
    }

    pub fn entries(&self) -> &[InventoryEntry] {
        &self.entries
    }

    /// Resolves a code spelling within `system`, ignoring case, spaces and hyphens.
    pub fn lookup(&self, system: RadsSystem, code: &str) -> Option<&InventoryEntry> {
        self.by_key
            .get(&(system, squash(code)))
            .map(|&i| &self.entries[i])
    }

    pub fn category(&self, system: RadsSystem, code: &str) -> Option<RadsCategory> {
        self.lookup(system, code).map(InventoryEntry::category)
    }
}
