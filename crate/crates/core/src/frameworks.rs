//! Sentence frameworks: fixed keyword patterns with typed vacancies, and the
//! canonical sentence each one rewrites to.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::digestion::{DigestedWord, WordKind};
use crate::lexicon::Layer;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatternElem {
    /// Must equal the word's representative.
    Literal(String),
    /// Any word whose label equals `label`.
    Slot { index: usize, label: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OutputElem {
    Literal(String),
    /// Bound word. With `unwrap`, a data word is emitted as written instead of
    /// in its wrapped canonical form.
    SlotRef { index: usize, unwrap: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Framework {
    pub name: String,
    pub pattern: Vec<PatternElem>,
    pub output: Vec<OutputElem>,
    /// Allows a pattern made of slots only.
    pub pure_slot: bool,
}

impl Framework {
    pub fn literal_count(&self) -> usize {
        self.pattern
            .iter()
            .filter(|p| matches!(p, PatternElem::Literal(_)))
            .count()
    }

    pub fn slot_count(&self) -> usize {
        self.pattern.len() - self.literal_count()
    }

    fn matches(&self, words: &[DigestedWord]) -> Option<BTreeMap<usize, DigestedWord>> {
        if words.len() != self.pattern.len() {
            return None;
        }
        let mut bindings = BTreeMap::new();
        for (p, w) in self.pattern.iter().zip(words) {
            match p {
                PatternElem::Literal(lit) if *lit == w.representative => {}
                PatternElem::Slot { index, label } if *label == w.label => {
                    bindings.insert(*index, w.clone());
                }
                _ => return None,
            }
        }
        Some(bindings)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameworkMatch {
    pub name: String,
    /// Position of the framework in its layer.
    pub framework: usize,
    pub bindings: BTreeMap<usize, DigestedWord>,
    pub literal_count: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FrameworkError {
    #[error("framework '{framework}' refers to unbound slot {index}")]
    UnboundSlot { framework: String, index: usize },
}

/// Picks the framework matching `words` exactly, position by position.
/// The most literals wins; ties go to the earlier framework.
pub fn match_framework(layer: &Layer, words: &[DigestedWord]) -> Option<FrameworkMatch> {
    let mut best: Option<FrameworkMatch> = None;
    for (i, fw) in layer.frameworks.iter().enumerate() {
        let literals = fw.literal_count();
        if best.as_ref().is_some_and(|b| b.literal_count >= literals) {
            continue;
        }
        if let Some(bindings) = fw.matches(words) {
            best = Some(FrameworkMatch {
                name: fw.name.clone(),
                framework: i,
                bindings,
                literal_count: literals,
            });
        }
    }
    best
}

/// Writes out the canonical sentence for a match.
pub fn instantiate(fm: &FrameworkMatch, fw: &Framework) -> Result<String, FrameworkError> {
    let mut out = String::new();
    for o in &fw.output {
        match o {
            OutputElem::Literal(s) => out.push_str(s),
            OutputElem::SlotRef { index, unwrap } => {
                let w = fm.bindings.get(index).ok_or_else(|| FrameworkError::UnboundSlot {
                    framework: fw.name.clone(),
                    index: *index,
                })?;
                if *unwrap && w.kind == WordKind::Data {
                    out.push_str(&w.surface);
                } else {
                    out.push_str(&w.representative);
                }
            }
        }
    }
    Ok(out)
}
