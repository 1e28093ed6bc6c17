use serde::Deserialize;
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use super::{auto_representative, Layer, Recognizer, RecognizerKind, Ruleset, SynonymClass, WordSeq};
use crate::frameworks::{Framework, OutputElem, PatternElem};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("malformed ruleset at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("no layers")]
    NoLayers,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RulesetDoc {
    version: u32,
    #[serde(default)]
    dimension: Option<String>,
    layers: Vec<LayerDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerDoc {
    id: u32,
    #[serde(default)]
    classes: Vec<ClassDoc>,
    #[serde(default)]
    recognizers: Vec<RecognizerDoc>,
    #[serde(default)]
    frameworks: Vec<FrameworkDoc>,
    #[serde(default)]
    connector_label: Option<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SeqDoc {
    Surface(String),
    Words(Vec<String>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassDoc {
    label: String,
    #[serde(default)]
    representative: Option<SeqDoc>,
    members: Vec<SeqDoc>,
    #[serde(default)]
    fold_ascii_case: bool,
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum KindDoc {
    Url,
    Integer,
    Pattern,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RecognizerDoc {
    label: String,
    kind: KindDoc,
    #[serde(default)]
    pattern: Option<String>,
    #[serde(default)]
    wrap: Option<(String, String)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SlotDoc {
    slot: usize,
    label: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RefDoc {
    #[serde(rename = "ref")]
    index: usize,
    #[serde(default)]
    unwrap: bool,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PatternDoc {
    Literal(String),
    Slot(SlotDoc),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OutputDoc {
    Literal(String),
    Ref(RefDoc),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FrameworkDoc {
    name: String,
    pattern: Vec<PatternDoc>,
    output: Vec<OutputDoc>,
    #[serde(default)]
    pure_slot: bool,
}

fn nfc(s: &str) -> String {
    s.nfc().collect()
}

/// Parses a UTF-8 JSON ruleset document.
///
/// All text is NFC-normalized; classes without a representative get the
/// shortest member (smallest code-point sequence on ties). Structural checks
/// beyond the schema are left to [`validate_ruleset`](super::validate_ruleset).
pub fn load_ruleset(bytes: &[u8]) -> Result<Ruleset, LoadError> {
    let text = std::str::from_utf8(bytes).map_err(|e| LoadError::Parse {
        line: 0,
        column: e.valid_up_to(),
        message: "ruleset is not valid UTF-8".into(),
    })?;
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: RulesetDoc = serde_path_to_error::deserialize(de).map_err(|err| {
        let path = err.path().to_string();
        let inner = err.into_inner();
        if inner.is_data() {
            LoadError::Schema {
                path,
                message: inner.to_string(),
            }
        } else {
            LoadError::Parse {
                line: inner.line(),
                column: inner.column(),
                message: inner.to_string(),
            }
        }
    })?;
    if doc.layers.is_empty() {
        return Err(LoadError::NoLayers);
    }

    let layers = doc
        .layers
        .into_iter()
        .enumerate()
        .map(|(li, l)| convert_layer(li, l))
        .collect::<Result<Vec<_>, _>>()?;

    Ok(Ruleset {
        version: doc.version,
        dimension: doc.dimension.as_deref().map(nfc),
        layers,
    })
}

fn convert_seq(surface_layer: bool, seq: SeqDoc, path: impl FnOnce() -> String) -> Result<WordSeq, LoadError> {
    match (surface_layer, seq) {
        (_, SeqDoc::Surface(s)) if surface_layer => Ok(WordSeq::from_surface(&nfc(&s))),
        // a bare string above layer 1 is a one-word sequence
        (_, SeqDoc::Surface(s)) => Ok(WordSeq::from_words([nfc(&s)])),
        (true, SeqDoc::Words(_)) => Err(LoadError::Schema {
            path: path(),
            message: "layer-1 members must be strings".into(),
        }),
        (false, SeqDoc::Words(ws)) => Ok(WordSeq::from_words(ws.iter().map(|w| nfc(w)))),
    }
}

fn convert_layer(li: usize, doc: LayerDoc) -> Result<Layer, LoadError> {
    let surface = li == 0;
    let mut classes = Vec::with_capacity(doc.classes.len());
    for (ci, c) in doc.classes.into_iter().enumerate() {
        let members = c
            .members
            .into_iter()
            .enumerate()
            .map(|(mi, m)| convert_seq(surface, m, || format!("layers[{li}].classes[{ci}].members[{mi}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let (representative, explicit) = match c.representative {
            Some(r) => (
                convert_seq(surface, r, || format!("layers[{li}].classes[{ci}].representative"))?,
                true,
            ),
            None => (auto_representative(&members).unwrap_or_default(), false),
        };
        classes.push(SynonymClass {
            label: nfc(&c.label),
            representative,
            members,
            fold_ascii_case: c.fold_ascii_case,
            representative_explicit: explicit,
        });
    }

    let recognizers = doc
        .recognizers
        .into_iter()
        .map(|r| Recognizer {
            label: nfc(&r.label),
            kind: match r.kind {
                KindDoc::Url => RecognizerKind::Url,
                KindDoc::Integer => RecognizerKind::Integer,
                KindDoc::Pattern => RecognizerKind::Pattern,
            },
            pattern: r.pattern.as_deref().map(nfc),
            wrap: r.wrap.map(|(p, s)| (nfc(&p), nfc(&s))),
        })
        .collect();

    let frameworks = doc
        .frameworks
        .into_iter()
        .map(|f| Framework {
            name: nfc(&f.name),
            pattern: f
                .pattern
                .into_iter()
                .map(|p| match p {
                    PatternDoc::Literal(s) => PatternElem::Literal(nfc(&s)),
                    PatternDoc::Slot(s) => PatternElem::Slot {
                        index: s.slot,
                        label: nfc(&s.label),
                    },
                })
                .collect(),
            output: f
                .output
                .into_iter()
                .map(|o| match o {
                    OutputDoc::Literal(s) => OutputElem::Literal(nfc(&s)),
                    OutputDoc::Ref(r) => OutputElem::SlotRef {
                        index: r.index,
                        unwrap: r.unwrap,
                    },
                })
                .collect(),
            pure_slot: f.pure_slot,
        })
        .collect();

    Ok(Layer {
        id: doc.id,
        classes,
        recognizers,
        frameworks,
        connector_label: doc.connector_label.as_deref().map(nfc),
    })
}
