//! Rulesets: layers of synonym classes, data-word recognizers and frameworks.

mod compiled;
mod index;
mod load;
mod validate;

use std::fmt;

use crate::frameworks::Framework;

pub use compiled::CompiledLayer;
pub use index::{IndexMatch, MatchIndex, Sym, NO_SYMBOL};
pub use load::{load_ruleset, LoadError};
pub use validate::{validate_ruleset, Diagnostic, DiagnosticKind, Severity};

/// A sequence of elements forming one word.
///
/// On the surface layer every element is a single character; on higher layers
/// every element is a representative produced by the layer below.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WordSeq(Vec<String>);

impl WordSeq {
    pub fn from_surface(text: &str) -> Self {
        WordSeq(text.chars().map(String::from).collect())
    }

    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        WordSeq(words.into_iter().map(Into::into).collect())
    }

    pub fn elements(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Concatenation of all elements.
    pub fn joined(&self) -> String {
        self.0.concat()
    }
}

impl fmt::Display for WordSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.0 {
            f.write_str(e)?;
        }
        Ok(())
    }
}

/// Index of a class inside its layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassId(pub u32);

impl ClassId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One tree of a symbolic forest: equivalent word sequences under one root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynonymClass {
    pub label: String,
    pub representative: WordSeq,
    pub members: Vec<WordSeq>,
    pub fold_ascii_case: bool,
    /// Whether the representative was given in the document rather than
    /// auto-selected.
    pub representative_explicit: bool,
}

impl SynonymClass {
    /// Builds a class whose representative is auto-selected: the shortest
    /// member, ties broken by code-point order.
    pub fn new(label: impl Into<String>, members: Vec<WordSeq>) -> Self {
        let representative = auto_representative(&members).unwrap_or_default();
        SynonymClass {
            label: label.into(),
            representative,
            members,
            fold_ascii_case: false,
            representative_explicit: false,
        }
    }

    pub fn with_fold(mut self, fold: bool) -> Self {
        self.fold_ascii_case = fold;
        self
    }
}

pub(crate) fn auto_representative(members: &[WordSeq]) -> Option<WordSeq> {
    members
        .iter()
        .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
        .cloned()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecognizerKind {
    Url,
    Integer,
    Pattern,
}

impl fmt::Display for RecognizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RecognizerKind::Url => "url",
            RecognizerKind::Integer => "integer",
            RecognizerKind::Pattern => "pattern",
        })
    }
}

/// Classifies data words into a named subclass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recognizer {
    pub label: String,
    pub kind: RecognizerKind,
    pub pattern: Option<String>,
    /// `(prefix, suffix)` placed around the matched surface.
    pub wrap: Option<(String, String)>,
}

impl Recognizer {
    pub fn canonical_surface(&self, matched: &str) -> String {
        match &self.wrap {
            Some((prefix, suffix)) => format!("{prefix}{matched}{suffix}"),
            None => matched.to_string(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Layer {
    pub id: u32,
    pub classes: Vec<SynonymClass>,
    pub recognizers: Vec<Recognizer>,
    pub frameworks: Vec<Framework>,
    /// Label of the classes whose words join simple sentences.
    pub connector_label: Option<String>,
}

impl Layer {
    /// The surface layer segments characters; all others segment words.
    pub fn is_surface(&self) -> bool {
        self.id == 1
    }

    pub fn class(&self, id: ClassId) -> Option<&SynonymClass> {
        self.classes.get(id.index())
    }

    pub fn class_by_representative(&self, rep: &str) -> Option<ClassId> {
        self.classes
            .iter()
            .position(|c| c.representative.joined() == rep)
            .map(|i| ClassId(i as u32))
    }

    pub fn framework(&self, name: &str) -> Option<&Framework> {
        self.frameworks.iter().find(|f| f.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ruleset {
    pub version: u32,
    pub dimension: Option<String>,
    pub layers: Vec<Layer>,
}

impl Ruleset {
    pub fn layer(&self, id: u32) -> Option<&Layer> {
        self.layers.iter().find(|l| l.id == id)
    }
}
