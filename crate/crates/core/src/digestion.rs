//! Maps tokens to `(representative, label)` tuples and lifts a layer's
//! output into the next layer's input.

use serde::ser::{SerializeTuple, Serializer};
use serde::Serialize;
use thiserror::Error;

use crate::lexicon::{CompiledLayer, WordSeq};
use crate::tokenizer::{ClassRef, LayerInput, Span, Token, TokenKind};

/// Label of words that no class or recognizer accounts for.
pub const UNKNOWN_LABEL: &str = "unknown";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WordKind {
    Keyword,
    Data,
    Unknown,
}

impl WordKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WordKind::Keyword => "keyword",
            WordKind::Data => "data",
            WordKind::Unknown => "unknown",
        }
    }
}

/// A digested word: the tuple a layer emits for each token.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigestedWord {
    pub representative: String,
    pub label: String,
    pub kind: WordKind,
    /// Character range in the original input.
    pub source_span: Span,
    pub layer: u32,
    /// Text as written, before any representative replacement or wrapping.
    pub surface: String,
}

impl Serialize for DigestedWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(3)?;
        t.serialize_element(&self.representative)?;
        t.serialize_element(&self.label)?;
        t.serialize_element(self.kind.as_str())?;
        t.end()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DigestError {
    #[error("token '{surface}' refers to class {class} which layer {layer} does not have")]
    MissingClass { surface: String, class: u32, layer: u32 },
    #[error("token '{surface}' refers to recognizer {index} which layer {layer} does not have")]
    MissingRecognizer { surface: String, index: usize, layer: u32 },
    #[error("token '{surface}' of kind {kind:?} cannot be digested")]
    NotAWord { surface: String, kind: TokenKind },
    #[error("token span {start}..{end} lies outside the layer input")]
    SpanOutOfRange { start: usize, end: usize },
}

/// Digests one token produced by segmenting `input` with `layer`.
pub fn digest(layer: &CompiledLayer, input: LayerInput<'_>, token: &Token) -> Result<DigestedWord, DigestError> {
    let id = layer.id();
    if token.span.end > input.len() || token.span.is_empty() {
        return Err(DigestError::SpanOutOfRange {
            start: token.span.start,
            end: token.span.end,
        });
    }
    let (source_span, surface) = match input {
        LayerInput::Surface(_) => (token.span, token.surface.clone()),
        LayerInput::Words(words) => {
            let covered = &words[token.span.start..token.span.end];
            (
                Span::new(covered[0].source_span.start, covered[covered.len() - 1].source_span.end),
                covered.iter().map(|w| w.surface.as_str()).collect(),
            )
        }
    };

    let word = |representative: String, label: String, kind: WordKind| DigestedWord {
        representative,
        label,
        kind,
        source_span,
        layer: id,
        surface: surface.clone(),
    };

    match (&token.class_ref, token.kind) {
        (_, TokenKind::Separator | TokenKind::Space) => Err(DigestError::NotAWord {
            surface: token.surface.clone(),
            kind: token.kind,
        }),
        (ClassRef::Carried, _) => match input {
            LayerInput::Words(words) => {
                let mut w = words[token.span.start].clone();
                w.layer = id;
                Ok(w)
            }
            LayerInput::Surface(_) => Err(DigestError::NotAWord {
                surface: token.surface.clone(),
                kind: token.kind,
            }),
        },
        (ClassRef::Class(class), _) => {
            let missing = || DigestError::MissingClass {
                surface: token.surface.clone(),
                class: class.0,
                layer: id,
            };
            let c = layer.layer.class(*class).ok_or_else(missing)?;
            let rep = layer.representative(*class).ok_or_else(missing)?;
            Ok(word(rep.to_string(), c.label.clone(), WordKind::Keyword))
        }
        (ClassRef::Recognizer(index), _) => {
            let r = layer.recognizers.get(*index).ok_or_else(|| DigestError::MissingRecognizer {
                surface: token.surface.clone(),
                index: *index,
                layer: id,
            })?;
            Ok(word(token.canonical_surface.clone(), r.label.clone(), WordKind::Data))
        }
        (ClassRef::None, _) => Ok(word(token.surface.clone(), UNKNOWN_LABEL.to_string(), WordKind::Unknown)),
    }
}

/// Digests every token in order. Callers drop separator and space tokens
/// first.
pub fn digest_sequence(
    layer: &CompiledLayer,
    input: LayerInput<'_>,
    tokens: &[Token],
) -> Result<Vec<DigestedWord>, DigestError> {
    tokens.iter().map(|t| digest(layer, input, t)).collect()
}

/// The next layer's view of a layer's output: one element per output word.
pub fn lift(sentence_outputs: &[DigestedWord]) -> WordSeq {
    WordSeq::from_words(sentence_outputs.iter().map(|w| w.representative.clone()))
}
