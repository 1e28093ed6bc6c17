//! End-to-end orchestration: split compound input into simple sentences and
//! run each one through every layer (segment, digest, framework, lift).

use serde::Serialize;
use thiserror::Error;

use crate::digestion::{digest_sequence, DigestError, DigestedWord, WordKind};
use crate::frameworks::{instantiate, match_framework, FrameworkError};
use crate::lexicon::{
    load_ruleset, validate_ruleset, CompiledLayer, Diagnostic, LoadError, Ruleset,
};
use crate::tokenizer::recognizer::PatternError;
use crate::tokenizer::{segment_surface, segment_words, ClassRef, LayerInput, Span, Token, TokenKind};

/// Joins the canonical forms of consecutive simple sentences.
pub const SENTENCE_JOINER: &str = "，";

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("ruleset has {} error(s)", .0.iter().filter(|d| d.is_error()).count())]
    Invalid(Vec<Diagnostic>),
    #[error("recognizer '{}': {}", .0.label, .0.message)]
    Pattern(#[from] PatternError),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("empty input")]
    EmptyInput,
    #[error("no content")]
    NoContent,
    #[error("no layer {0}")]
    NoLayer(u32),
    #[error(transparent)]
    Digest(#[from] DigestError),
    #[error(transparent)]
    Framework(#[from] FrameworkError),
}

/// What one layer did to one sentence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LayerRecord {
    pub id: u32,
    pub tokens: Vec<Token>,
    /// Tuples before any framework rewrite.
    pub digested: Vec<DigestedWord>,
    pub framework: Option<String>,
    pub canonical: String,
    /// Words handed to the next layer.
    #[serde(skip)]
    pub output: Vec<DigestedWord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SentenceTrace {
    /// Character span of the sentence content, without connectors and
    /// separators.
    #[serde(skip)]
    pub span: Span,
    pub layers: Vec<LayerRecord>,
}

impl SentenceTrace {
    pub fn canonical(&self) -> &str {
        self.layers.last().map_or("", |l| l.canonical.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParseTrace {
    pub input: String,
    pub canonical: String,
    pub unknown_count: usize,
    pub sentences: Vec<SentenceTrace>,
}

/// A compiled ruleset. Immutable once built, so one engine can serve
/// concurrent parses.
#[derive(Debug)]
pub struct Engine {
    pub version: u32,
    pub dimension: Option<String>,
    layers: Vec<CompiledLayer>,
    warnings: Vec<Diagnostic>,
}

/// How a word is written in canonical text. Data words appear as matched;
/// their wrapped form only exists inside the tuples.
fn render(words: &[DigestedWord]) -> String {
    words
        .iter()
        .map(|w| match w.kind {
            WordKind::Data => w.surface.as_str(),
            _ => w.representative.as_str(),
        })
        .collect()
}

impl Engine {
    pub fn new(rs: Ruleset) -> Result<Self, EngineError> {
        let (errors, warnings): (Vec<_>, Vec<_>) = validate_ruleset(&rs).into_iter().partition(|d| d.is_error());
        if !errors.is_empty() {
            return Err(EngineError::Invalid(errors));
        }
        let layers = rs
            .layers
            .into_iter()
            .map(CompiledLayer::compile)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Engine {
            version: rs.version,
            dimension: rs.dimension,
            layers,
            warnings,
        })
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, EngineError> {
        Engine::new(load_ruleset(bytes)?)
    }

    pub fn layers(&self) -> &[CompiledLayer] {
        &self.layers
    }

    pub fn layer(&self, id: u32) -> Option<&CompiledLayer> {
        self.layers.get((id as usize).checked_sub(1)?)
    }

    /// Validator warnings of the ruleset the engine was built from.
    pub fn warnings(&self) -> &[Diagnostic] {
        &self.warnings
    }

    /// Layer-1 tokens of the whole text.
    pub fn tokenize(&self, text: &str) -> Result<Vec<Token>, ParseError> {
        if text.trim().is_empty() {
            return Err(ParseError::EmptyInput);
        }
        let chars: Vec<char> = text.chars().collect();
        Ok(segment_surface(&self.layers[0], &chars))
    }

    fn is_break(&self, t: &Token) -> bool {
        match (t.kind, &t.class_ref) {
            (TokenKind::Separator, _) => true,
            (TokenKind::Keyword, ClassRef::Class(c)) => self.layers[0].is_connector(*c),
            _ => false,
        }
    }

    /// Groups layer-1 tokens into simple sentences. Each group holds the
    /// token index range it owns and its content span. Fillers and
    /// connectors belong to the sentence before them (or the first sentence),
    /// so the groups still cover every token.
    fn group(&self, tokens: &[Token]) -> Vec<(std::ops::Range<usize>, Span)> {
        let mut starts: Vec<(usize, Span)> = Vec::new();
        let mut open = false;
        for (i, t) in tokens.iter().enumerate() {
            if self.is_break(t) {
                open = false;
            } else if t.kind != TokenKind::Space {
                if open {
                    starts.last_mut().expect("open sentence").1.end = t.span.end;
                } else {
                    starts.push((i, t.span));
                    open = true;
                }
            }
        }
        let n = starts.len();
        (0..n)
            .map(|k| {
                let from = if k == 0 { 0 } else { starts[k].0 };
                let to = if k + 1 < n { starts[k + 1].0 } else { tokens.len() };
                (from..to, starts[k].1)
            })
            .collect()
    }

    /// Character spans of the simple sentences in `text`.
    pub fn split_sentences(&self, text: &str) -> Result<Vec<Span>, ParseError> {
        let tokens = self.tokenize(text)?;
        let groups = self.group(&tokens);
        if groups.is_empty() {
            return Err(ParseError::NoContent);
        }
        Ok(groups.into_iter().map(|(_, span)| span).collect())
    }

    /// Runs one simple sentence through layers 1..=`last`. The framework of
    /// layer `last` is skipped when `apply_last` is false.
    fn run_sentence(
        &self,
        chars: &[char],
        tokens: Vec<Token>,
        span: Span,
        last: usize,
        apply_last: bool,
    ) -> Result<SentenceTrace, ParseError> {
        let mut records: Vec<LayerRecord> = Vec::with_capacity(last);
        for (i, layer) in self.layers[..last].iter().enumerate() {
            let (tokens, digested) = match records.last() {
                None => {
                    let words: Vec<Token> = tokens.iter().filter(|t| !t.is_filler() && !self.is_break(t)).cloned().collect();
                    let digested = digest_sequence(layer, LayerInput::Surface(chars), &words)?;
                    (tokens.clone(), digested)
                }
                Some(prev) => {
                    let input = &prev.output;
                    let tokens = segment_words(layer, input);
                    let digested = digest_sequence(layer, LayerInput::Words(input), &tokens)?;
                    (tokens, digested)
                }
            };
            let hit = if apply_last || i + 1 < last {
                match_framework(&layer.layer, &digested)
            } else {
                None
            };
            let (framework, output) = match hit {
                Some(m) => {
                    let text = instantiate(&m, &layer.layer.frameworks[m.framework])?;
                    let first = digested.first().map_or(span, |w| w.source_span);
                    let end = digested.last().map_or(span, |w| w.source_span);
                    let word = DigestedWord {
                        representative: text,
                        label: m.name.clone(),
                        kind: WordKind::Keyword,
                        source_span: Span::new(first.start, end.end),
                        layer: layer.id(),
                        surface: digested.iter().map(|w| w.surface.as_str()).collect(),
                    };
                    (Some(m.name), vec![word])
                }
                None => (None, digested.clone()),
            };
            records.push(LayerRecord {
                id: layer.id(),
                tokens,
                digested,
                framework,
                canonical: render(&output),
                output,
            });
        }
        Ok(SentenceTrace { span, layers: records })
    }

    /// Full trace of `text`.
    pub fn parse(&self, text: &str) -> Result<ParseTrace, ParseError> {
        let chars: Vec<char> = text.chars().collect();
        let mut tokens = self.tokenize(text)?;
        let groups = self.group(&tokens);
        if groups.is_empty() {
            return Err(ParseError::NoContent);
        }
        let mut sentences = Vec::with_capacity(groups.len());
        // hand out owned token ranges back to front so nothing is copied twice
        let mut owned: Vec<(Vec<Token>, Span)> = Vec::with_capacity(groups.len());
        for (range, span) in groups.into_iter().rev() {
            owned.push((tokens.split_off(range.start), span));
        }
        for (toks, span) in owned.into_iter().rev() {
            sentences.push(self.run_sentence(&chars, toks, span, self.layers.len(), true)?);
        }
        let canonical = sentences
            .iter()
            .map(SentenceTrace::canonical)
            .collect::<Vec<_>>()
            .join(SENTENCE_JOINER);
        let unknown_count = sentences
            .iter()
            .flat_map(|s| &s.layers)
            .flat_map(|l| &l.tokens)
            .filter(|t| t.kind == TokenKind::Unknown && t.class_ref == ClassRef::None)
            .count();
        Ok(ParseTrace {
            input: text.to_string(),
            canonical,
            unknown_count,
            sentences,
        })
    }

    /// Canonical form of `text`.
    pub fn normalize(&self, text: &str) -> Result<String, ParseError> {
        Ok(self.parse(text)?.canonical)
    }

    /// Treats the whole text as one sentence and returns layer `layer`'s
    /// digested words, before that layer's framework is applied. Used to
    /// check slot fillers.
    pub fn digest_at(&self, text: &str, layer: u32) -> Result<Vec<DigestedWord>, ParseError> {
        if layer == 0 || layer as usize > self.layers.len() {
            return Err(ParseError::NoLayer(layer));
        }
        let tokens = self.tokenize(text)?;
        let chars: Vec<char> = text.chars().collect();
        let span = Span::new(0, chars.len());
        let mut trace = self.run_sentence(&chars, tokens, span, layer as usize, false)?;
        Ok(trace.layers.pop().map(|l| l.digested).unwrap_or_default())
    }
}
