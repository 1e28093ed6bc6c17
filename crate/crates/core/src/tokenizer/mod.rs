//! Keyword-first segmentation.
//!
//! The surface layer is segmented in three passes:
//!
//! 1. Greedy longest match against the layer's class members, left to right.
//!    The URL recognizer is consulted here too, so that a keyword hidden inside
//!    a URL cannot split it; the longer of the two wins.
//! 2. Every maximal span the first pass left unmatched is searched repeatedly
//!    for data words.
//! 3. What remains becomes separator, space, or unknown tokens.
//!
//! Higher layers only run the first pass over the previous layer's words.
//! Words no class of the layer claims are carried through unchanged.

pub mod recognizer;
pub mod url;

use serde::ser::{SerializeTuple, Serializer};
use serde::Serialize;
use thiserror::Error;

use crate::digestion::{DigestedWord, WordKind};
use crate::lexicon::{ClassId, CompiledLayer};
pub use recognizer::{RecognizerMatch, RecognizerSet};
pub use url::builtin_url_match;
use url::could_start_url;

/// Half-open range of element indices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }
}

impl Serialize for Span {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(2)?;
        t.serialize_element(&self.start)?;
        t.serialize_element(&self.end)?;
        t.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Keyword,
    Data,
    Unknown,
    /// Sentence break: `，。；、` or newline.
    Separator,
    /// Run of other whitespace; dropped before digestion.
    Space,
}

impl From<WordKind> for TokenKind {
    fn from(k: WordKind) -> Self {
        match k {
            WordKind::Keyword => TokenKind::Keyword,
            WordKind::Data => TokenKind::Data,
            WordKind::Unknown => TokenKind::Unknown,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassRef {
    None,
    Class(ClassId),
    /// Index of the recognizer in its layer.
    Recognizer(usize),
    /// Word from the layer below that no class of this layer claimed.
    Carried,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Token {
    pub surface: String,
    pub span: Span,
    pub kind: TokenKind,
    pub label: Option<String>,
    #[serde(skip)]
    pub class_ref: ClassRef,
    #[serde(skip)]
    pub canonical_surface: String,
}

impl Token {
    /// Separator and space tokens carry no meaning of their own.
    pub fn is_filler(&self) -> bool {
        matches!(self.kind, TokenKind::Separator | TokenKind::Space)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SegmentError {
    #[error("cannot segment an empty input")]
    EmptyInput,
}

pub fn is_separator(c: char) -> bool {
    matches!(c, '，' | '。' | '；' | '、' | '\n')
}

/// Input of one layer: characters on layer 1, words above it.
#[derive(Clone, Copy, Debug)]
pub enum LayerInput<'a> {
    Surface(&'a [char]),
    Words(&'a [DigestedWord]),
}

impl LayerInput<'_> {
    pub fn len(&self) -> usize {
        match self {
            LayerInput::Surface(t) => t.len(),
            LayerInput::Words(w) => w.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Segments one layer's input into tokens whose spans partition it.
pub fn segment(layer: &CompiledLayer, input: LayerInput<'_>) -> Result<Vec<Token>, SegmentError> {
    if input.is_empty() {
        return Err(SegmentError::EmptyInput);
    }
    Ok(match input {
        LayerInput::Surface(text) => segment_surface(layer, text),
        LayerInput::Words(words) => segment_words(layer, words),
    })
}

enum Piece {
    Keyword { span: Span, class: ClassId },
    Data { span: Span, recognizer: usize },
    Gap(Span),
}

fn keyword_pass(layer: &CompiledLayer, text: &[char]) -> Vec<Piece> {
    let index = &layer.index;
    let syms = index.encode_chars(text);
    let url = layer.recognizers.url_recognizer();
    let mut pieces = Vec::new();
    let mut gap_start: Option<usize> = None;
    let mut pos = 0;

    let flush = |pieces: &mut Vec<Piece>, gap_start: &mut Option<usize>, pos: usize| {
        if let Some(g) = gap_start.take() {
            pieces.push(Piece::Gap(Span::new(g, pos)));
        }
    };

    while pos < text.len() {
        let kw = if index.is_empty() { None } else { index.longest_match(&syms, pos) };
        let kw_len = kw.map_or(0, |m| m.len);
        let url_len = match url {
            Some(_) if could_start_url(text, pos) => builtin_url_match(&text[pos..]).unwrap_or(0),
            _ => 0,
        };
        if let (Some(recognizer), true) = (url, url_len > kw_len) {
            flush(&mut pieces, &mut gap_start, pos);
            pieces.push(Piece::Data {
                span: Span::new(pos, pos + url_len),
                recognizer,
            });
            pos += url_len;
        } else if let Some(m) = kw {
            flush(&mut pieces, &mut gap_start, pos);
            pieces.push(Piece::Keyword {
                span: Span::new(pos, pos + m.len),
                class: m.class,
            });
            pos += m.len;
        } else {
            gap_start.get_or_insert(pos);
            pos += 1;
        }
    }
    flush(&mut pieces, &mut gap_start, pos);
    pieces
}

fn surface_of(text: &[char], span: Span) -> String {
    text[span.start..span.end].iter().collect()
}

fn data_token(layer: &CompiledLayer, text: &[char], span: Span, recognizer: usize) -> Token {
    let surface = surface_of(text, span);
    let rec = layer
        .recognizers
        .get(recognizer)
        .expect("recognizer index comes from the same set");
    Token {
        canonical_surface: rec.canonical_surface(&surface),
        surface,
        span,
        kind: TokenKind::Data,
        label: Some(rec.label.clone()),
        class_ref: ClassRef::Recognizer(recognizer),
    }
}

/// Splits an unrecognized span into separators, whitespace runs and maximal
/// unknown runs.
fn residual_tokens(text: &[char], span: Span, out: &mut Vec<Token>) {
    #[derive(PartialEq)]
    enum Run {
        Space,
        Unknown,
    }
    let mut run: Option<(Run, usize)> = None;
    let close = |run: &mut Option<(Run, usize)>, end: usize, out: &mut Vec<Token>| {
        if let Some((kind, start)) = run.take() {
            let span = Span::new(start, end);
            let surface = surface_of(text, span);
            let (kind, label) = match kind {
                Run::Space => (TokenKind::Space, None),
                Run::Unknown => (TokenKind::Unknown, Some("unknown".to_string())),
            };
            out.push(Token {
                canonical_surface: surface.clone(),
                surface,
                span,
                kind,
                label,
                class_ref: ClassRef::None,
            });
        }
    };
    for (pos, &c) in text.iter().enumerate().take(span.end).skip(span.start) {
        if is_separator(c) {
            close(&mut run, pos, out);
            out.push(Token {
                surface: c.to_string(),
                canonical_surface: c.to_string(),
                span: Span::new(pos, pos + 1),
                kind: TokenKind::Separator,
                label: None,
                class_ref: ClassRef::None,
            });
            continue;
        }
        let kind = if c.is_whitespace() { Run::Space } else { Run::Unknown };
        if run.as_ref().is_some_and(|(k, _)| *k != kind) {
            close(&mut run, pos, out);
        }
        if run.is_none() {
            run = Some((kind, pos));
        }
    }
    close(&mut run, span.end, out);
}

/// Segments surface text. An empty input yields no tokens.
pub fn segment_surface(layer: &CompiledLayer, text: &[char]) -> Vec<Token> {
    let pieces = keyword_pass(layer, text);
    let mut scanner = (!layer.recognizers.is_empty()).then(|| layer.recognizers.scanner(text));
    let mut tokens = Vec::with_capacity(pieces.len());

    for piece in pieces {
        match piece {
            Piece::Keyword { span, class } => {
                let surface = surface_of(text, span);
                tokens.push(Token {
                    canonical_surface: surface.clone(),
                    surface,
                    span,
                    kind: TokenKind::Keyword,
                    label: layer.layer.class(class).map(|c| c.label.clone()),
                    class_ref: ClassRef::Class(class),
                });
            }
            Piece::Data { span, recognizer } => tokens.push(data_token(layer, text, span, recognizer)),
            Piece::Gap(gap) => {
                let mut cur = gap.start;
                if let Some(scanner) = scanner.as_mut() {
                    while let Some((rec, s, e)) = scanner.next_match(cur, gap.end) {
                        residual_tokens(text, Span::new(cur, s), &mut tokens);
                        tokens.push(data_token(layer, text, Span::new(s, e), rec));
                        cur = e;
                    }
                }
                residual_tokens(text, Span::new(cur, gap.end), &mut tokens);
            }
        }
    }
    tokens
}

/// Segments a word sequence from the layer below. Only keyword words can
/// take part in a match; everything else is carried.
pub fn segment_words(layer: &CompiledLayer, words: &[DigestedWord]) -> Vec<Token> {
    let index = &layer.index;
    let syms = index.encode_words(
        words
            .iter()
            .map(|w| (w.kind == WordKind::Keyword).then_some(w.representative.as_str())),
    );
    let mut tokens = Vec::with_capacity(words.len());
    let mut pos = 0;
    while pos < words.len() {
        let hit = if index.is_empty() { None } else { index.longest_match(&syms, pos) };
        match hit {
            Some(m) => {
                let surface: String = words[pos..pos + m.len]
                    .iter()
                    .map(|w| w.representative.as_str())
                    .collect();
                tokens.push(Token {
                    canonical_surface: surface.clone(),
                    surface,
                    span: Span::new(pos, pos + m.len),
                    kind: TokenKind::Keyword,
                    label: layer.layer.class(m.class).map(|c| c.label.clone()),
                    class_ref: ClassRef::Class(m.class),
                });
                pos += m.len;
            }
            None => {
                let w = &words[pos];
                tokens.push(Token {
                    surface: w.representative.clone(),
                    canonical_surface: w.representative.clone(),
                    span: Span::new(pos, pos + 1),
                    kind: w.kind.into(),
                    label: Some(w.label.clone()),
                    class_ref: ClassRef::Carried,
                });
                pos += 1;
            }
        }
    }
    tokens
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::{Layer, Recognizer, RecognizerKind, SynonymClass, WordSeq};

    fn layer(classes: &[(&str, &[&str])], recognizers: Vec<Recognizer>) -> CompiledLayer {
        CompiledLayer::compile(Layer {
            id: 1,
            classes: classes
                .iter()
                .map(|(label, ms)| SynonymClass::new(*label, ms.iter().map(|m| WordSeq::from_surface(m)).collect()))
                .collect(),
            recognizers,
            ..Layer::default()
        })
        .unwrap()
    }

    fn url_rec() -> Recognizer {
        Recognizer {
            label: "网址".into(),
            kind: RecognizerKind::Url,
            pattern: None,
            wrap: Some(("“".into(), "”".into())),
        }
    }

    fn chars(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    fn shape(tokens: &[Token]) -> Vec<(TokenKind, &str, (usize, usize))> {
        tokens
            .iter()
            .map(|t| (t.kind, t.surface.as_str(), (t.span.start, t.span.end)))
            .collect()
    }

    #[test]
    fn keyword_then_url() {
        let l = layer(&[("open-action", &["打开", "启动", "开启", "开"])], vec![url_rec()]);
        let toks = segment_surface(&l, &chars("打开www.baidu.com"));
        assert_eq!(
            shape(&toks),
            vec![
                (TokenKind::Keyword, "打开", (0, 2)),
                (TokenKind::Data, "www.baidu.com", (2, 15)),
            ]
        );
        assert_eq!(toks[1].canonical_surface, "“www.baidu.com”");
        assert_eq!(toks[1].label.as_deref(), Some("网址"));
    }

    #[test]
    fn url_beats_a_shorter_keyword_inside_it() {
        let l = layer(&[("k", &["www"])], vec![url_rec()]);
        let toks = segment_surface(&l, &chars("www.a.com"));
        assert_eq!(shape(&toks), vec![(TokenKind::Data, "www.a.com", (0, 9))]);
        let toks = segment_surface(&l, &chars("www"));
        assert_eq!(shape(&toks), vec![(TokenKind::Keyword, "www", (0, 3))]);
    }

    #[test]
    fn whole_input_is_one_keyword() {
        let l = layer(&[("", &["最大化"])], vec![]);
        let toks = segment_surface(&l, &chars("最大化"));
        assert_eq!(shape(&toks), vec![(TokenKind::Keyword, "最大化", (0, 3))]);
    }

    #[test]
    fn nothing_matches() {
        let l = layer(&[("", &["最大化"])], vec![]);
        let toks = segment_surface(&l, &chars("qqq"));
        assert_eq!(shape(&toks), vec![(TokenKind::Unknown, "qqq", (0, 3))]);
        assert_eq!(toks[0].class_ref, ClassRef::None);
    }

    #[test]
    fn separators_and_spaces() {
        let l = layer(&[("k", &["开"])], vec![]);
        let toks = segment_surface(&l, &chars("开 x，y\n"));
        assert_eq!(
            shape(&toks),
            vec![
                (TokenKind::Keyword, "开", (0, 1)),
                (TokenKind::Space, " ", (1, 2)),
                (TokenKind::Unknown, "x", (2, 3)),
                (TokenKind::Separator, "，", (3, 4)),
                (TokenKind::Unknown, "y", (4, 5)),
                (TokenKind::Separator, "\n", (5, 6)),
            ]
        );
    }

    #[test]
    fn data_pattern_may_span_a_separator_character() {
        let coord = Recognizer {
            label: "坐标".into(),
            kind: RecognizerKind::Pattern,
            pattern: Some(r"（\d+，\d+）".into()),
            wrap: None,
        };
        let l = layer(&[("click-action", &["双击"])], vec![coord]);
        let toks = segment_surface(&l, &chars("双击（19，16），"));
        assert_eq!(
            shape(&toks),
            vec![
                (TokenKind::Keyword, "双击", (0, 2)),
                (TokenKind::Data, "（19，16）", (2, 9)),
                (TokenKind::Separator, "，", (9, 10)),
            ]
        );
    }

    #[test]
    fn empty_input_is_rejected() {
        let l = layer(&[], vec![]);
        assert_eq!(segment(&l, LayerInput::Surface(&[])), Err(SegmentError::EmptyInput));
    }
}
