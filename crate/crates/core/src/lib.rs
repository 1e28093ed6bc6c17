//! Layered synonym-forest normalization for command-style text.
//!
//! A [`Ruleset`](lexicon::Ruleset) describes a stack of layers. Layer 1 works on
//! surface characters: it segments the input by greedy longest match against
//! synonym classes, recognizes data words (URLs, integers, user patterns) in
//! whatever the keyword pass left over, and maps every word to the tuple
//! `(representative, label)`. Each higher layer sees the previous layer's words
//! as its alphabet, applies its own classes, and may collapse a sentence into a
//! single canonical word through a sentence framework.
//!
//! ```
//! use hsf::Engine;
//!
//! let engine = Engine::from_json(hsf::DEMO_RULESET.as_bytes()).unwrap();
//! assert_eq!(engine.normalize("打开www.baidu.com").unwrap(), "开www.baidu.com");
//! ```

pub mod cli;
pub mod digestion;
pub mod frameworks;
pub mod generator;
pub mod lexicon;
pub mod pipeline;
pub mod stats;
pub mod tokenizer;

pub use digestion::{DigestedWord, WordKind};
pub use frameworks::{Framework, FrameworkMatch, OutputElem, PatternElem};
pub use generator::{enumerate_variants, round_trip_check, RoundTripReport, VariantSet};
pub use lexicon::{
    load_ruleset, validate_ruleset, ClassId, Diagnostic, Layer, MatchIndex, Recognizer,
    RecognizerKind, Ruleset, Severity, SynonymClass, WordSeq,
};
pub use pipeline::{Engine, EngineError, ParseError, ParseTrace};
pub use tokenizer::{Span, Token, TokenKind};

/// The bundled demo ruleset (command vocabulary for desktop automation).
pub const DEMO_RULESET: &str = include_str!("../data/demo.json");
