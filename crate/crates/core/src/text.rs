use serde::{Deserialize, Serialize};

/// A science text with the sentences readers self-explain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextDocument {
    pub id: String,
    pub title: String,
    pub sentences: Vec<String>,
    /// 1-based sentence indices, strictly increasing.
    pub targets: Vec<usize>,
}

/// The part of a text players can see during one turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Reveal<'a> {
    /// Sentences 1 through the current target, inclusive.
    pub sentences: &'a [String],
    /// 1-based index of the sentence the reader explains.
    pub target: usize,
}

impl TextDocument {
    pub fn validate(&self) -> Result<(), String> {
        if self.sentences.is_empty() {
            return Err("text has no sentences".into());
        }
        if let Some(i) = self.sentences.iter().position(|s| s.trim().is_empty()) {
            return Err(format!("sentence {} is empty", i + 1));
        }
        if self.targets.is_empty() {
            return Err("text has no target sentences".into());
        }
        if self.targets[0] == 0 {
            return Err("target indices are 1-based".into());
        }
        if let Some(w) = self.targets.windows(2).find(|w| w[0] >= w[1]) {
            return Err(format!("targets must strictly increase ({} then {})", w[0], w[1]));
        }
        let last = *self.targets.last().unwrap();
        if last > self.sentences.len() {
            return Err(format!(
                "target {last} is past the last sentence ({})",
                self.sentences.len()
            ));
        }
        Ok(())
    }

    /// What is shown on the `cursor`-th reading of this text (0-based), or
    /// `None` once every target sentence has been used.
    pub fn reveal(&self, cursor: usize) -> Option<Reveal<'_>> {
        let target = *self.targets.get(cursor)?;
        Some(Reveal {
            sentences: &self.sentences[..target],
            target,
        })
    }
}
