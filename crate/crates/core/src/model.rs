//! Domain values shared by the rules engine and the wire protocol.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::{Taxonomy, OTHER_REASON};
use crate::error::GameError;

/// A player's position in the turn order. Seat 0 reads first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seat(pub usize);

impl Seat {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for Seat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "seat {}", self.0)
    }
}

/// The reading strategies a self-explanation can be classified under.
///
/// `Other` may be chosen when identifying a strategy but is never dealt as a
/// task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Strategy {
    Bridging,
    ComprehensionMonitoring,
    Elaboration,
    Paraphrasing,
    Prediction,
    Other,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Bridging,
        Strategy::ComprehensionMonitoring,
        Strategy::Elaboration,
        Strategy::Paraphrasing,
        Strategy::Prediction,
        Strategy::Other,
    ];

    /// Strategies that can appear on a task, in draw order.
    pub const ASSIGNABLE: [Strategy; 5] = [
        Strategy::Bridging,
        Strategy::ComprehensionMonitoring,
        Strategy::Elaboration,
        Strategy::Paraphrasing,
        Strategy::Prediction,
    ];

    pub fn is_assignable(self) -> bool {
        self != Strategy::Other
    }

    pub fn label(self) -> &'static str {
        match self {
            Strategy::Bridging => "Bridging",
            Strategy::ComprehensionMonitoring => "Comprehension Monitoring",
            Strategy::Elaboration => "Elaboration",
            Strategy::Paraphrasing => "Paraphrasing",
            Strategy::Prediction => "Prediction",
            Strategy::Other => "Other",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The reader's secret task for one turn.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskAssignment {
    pub strategy: Strategy,
    pub value: u32,
    pub strategy_rerolls: u32,
    pub value_rerolls: u32,
}

/// Half-open interval `[start, end)` of character offsets into a
/// self-explanation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    /// The highlighted text, if the interval lies inside `text`.
    pub fn slice<'a>(&self, text: &'a str) -> Option<&'a str> {
        if self.start > self.end {
            return None;
        }
        let mut offsets = text.char_indices().map(|(i, _)| i).chain(std::iter::once(text.len()));
        let start = offsets.nth(self.start)?;
        let end = if self.end == self.start {
            start
        } else {
            offsets.nth(self.end - self.start - 1)?
        };
        Some(&text[start..end])
    }
}

/// One player's strategy identification, built through the cascading menu:
/// strategy, then reasons, then a highlighted part of the self-explanation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Argument {
    pub strategy: Strategy,
    pub reasons: Vec<String>,
    pub span: Span,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freetext: Option<String>,
}

impl Argument {
    pub fn new(strategy: Strategy, reasons: &[&str], span: Span) -> Self {
        Argument {
            strategy,
            reasons: reasons.iter().map(|r| r.to_string()).collect(),
            span,
            freetext: None,
        }
    }

    pub fn with_freetext(mut self, text: impl Into<String>) -> Self {
        self.freetext = Some(text.into());
        self
    }

    fn mentions_other(&self) -> bool {
        self.strategy == Strategy::Other || self.reasons.iter().any(|r| r == OTHER_REASON)
    }

    /// Checks the argument against the reason taxonomy of its strategy and the
    /// self-explanation it refers to.
    pub fn validate(&self, taxonomy: &Taxonomy, self_explanation: &str) -> Result<(), GameError> {
        let invalid = |why: String| Err(GameError::InvalidArgument(why));
        if self.reasons.is_empty() {
            return invalid("at least one reason is required".into());
        }
        let allowed = taxonomy.reasons_for(self.strategy);
        for (i, reason) in self.reasons.iter().enumerate() {
            if !allowed.iter().any(|r| &r.code == reason) {
                return invalid(format!("reason {reason:?} is not offered for {}", self.strategy));
            }
            if self.reasons[..i].contains(reason) {
                return invalid(format!("reason {reason:?} listed twice"));
            }
        }
        if self.span.start > self.span.end {
            return invalid(format!(
                "span ends ({}) before it starts ({})",
                self.span.end, self.span.start
            ));
        }
        let len = self_explanation.chars().count();
        if self.span.end > len {
            return invalid(format!("span end {} is past the explanation length {len}", self.span.end));
        }
        let other = self.mentions_other();
        if self.span.is_empty() && !other {
            return invalid("a highlighted span is required".into());
        }
        match (&self.freetext, other) {
            (Some(t), true) if !t.trim().is_empty() => Ok(()),
            (_, true) => invalid("free text is required when Other is chosen".into()),
            (Some(_), false) => invalid("free text is only accepted with Other".into()),
            (None, false) => Ok(()),
        }
    }
}
