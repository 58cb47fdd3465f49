//! The database of science texts games are played on.
//!
//! A corpus is a directory of TOML files, one entry per file, loaded in file
//! name order. Strategies an entry gives no reasons for use the reasons of
//! the rules configuration.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::PersistError;
use crate::config::{Reason, Taxonomy};
use crate::model::Strategy;
use crate::rng::GameRng;
use crate::text::TextDocument;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub license: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    id: String,
    title: String,
    sentences: Vec<String>,
    targets: Vec<usize>,
    provenance: Provenance,
    #[serde(default)]
    reasons: BTreeMap<Strategy, Vec<Reason>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusEntry {
    pub text: TextDocument,
    /// Reasons for all six strategies.
    pub reasons: Taxonomy,
    pub provenance: Provenance,
}

impl CorpusEntry {
    /// Parses one entry; `defaults` fills strategies the entry omits.
    pub fn parse(name: &str, source: &str, defaults: &Taxonomy) -> Result<CorpusEntry, PersistError> {
        let schema = |reason: String| PersistError::SchemaError {
            entry: name.to_string(),
            reason,
        };
        let raw: RawEntry = toml::from_str(source).map_err(|e| schema(e.to_string()))?;
        let text = TextDocument {
            id: raw.id,
            title: raw.title,
            sentences: raw.sentences,
            targets: raw.targets,
        };
        text.validate().map_err(schema)?;
        let mut reasons = defaults.clone();
        for (strategy, list) in raw.reasons {
            if list.is_empty() {
                return Err(schema(format!("empty reason list for {strategy}")));
            }
            reasons.0.insert(strategy, list);
        }
        let missing = reasons.missing();
        if !missing.is_empty() {
            return Err(schema(format!("no reasons for {missing:?}")));
        }
        Ok(CorpusEntry {
            text,
            reasons,
            provenance: raw.provenance,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    entries: Vec<CorpusEntry>,
}

impl Corpus {
    /// Loads every `*.toml` file of `dir`. Any invalid file fails the load.
    pub fn load(dir: &Path, defaults: &Taxonomy) -> Result<Corpus, PersistError> {
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .map_err(PersistError::io(dir))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "toml"))
            .collect();
        paths.sort();
        let mut entries = Vec::with_capacity(paths.len());
        for path in paths {
            let source = std::fs::read_to_string(&path).map_err(PersistError::io(&path))?;
            let name = path.file_name().unwrap_or_default().to_string_lossy();
            entries.push(CorpusEntry::parse(&name, &source, defaults)?);
        }
        Corpus::from_entries(entries)
    }

    pub fn from_entries(entries: Vec<CorpusEntry>) -> Result<Corpus, PersistError> {
        if entries.is_empty() {
            return Err(PersistError::EmptyCorpus);
        }
        for (i, e) in entries.iter().enumerate() {
            if entries[..i].iter().any(|o| o.text.id == e.text.id) {
                return Err(PersistError::SchemaError {
                    entry: e.text.id.clone(),
                    reason: "duplicate text id".into(),
                });
            }
        }
        Ok(Corpus { entries })
    }

    /// A corpus of bare texts using the default reasons.
    pub fn from_texts(texts: Vec<TextDocument>) -> Result<Corpus, PersistError> {
        let reasons = crate::config::RulesConfig::default().reasons;
        Corpus::from_entries(
            texts
                .into_iter()
                .map(|text| CorpusEntry {
                    text,
                    reasons: reasons.clone(),
                    provenance: Provenance::default(),
                })
                .collect(),
        )
    }

    pub fn entries(&self) -> &[CorpusEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&CorpusEntry> {
        self.entries.iter().find(|e| e.text.id == id)
    }

    /// Uniform choice of an entry.
    pub fn pick_random_entry(&self, rng: &mut GameRng) -> &CorpusEntry {
        &self.entries[rng.below(self.entries.len())]
    }

    pub fn pick_random_text(&self, rng: &mut GameRng) -> &TextDocument {
        &self.pick_random_entry(rng).text
    }
}
