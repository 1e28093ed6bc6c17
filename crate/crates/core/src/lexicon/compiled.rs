use std::mem::size_of;

use super::{ClassId, Layer, MatchIndex};
use crate::tokenizer::recognizer::{PatternError, RecognizerSet};

/// A validated layer together with its match index and compiled recognizers.
#[derive(Debug)]
pub struct CompiledLayer {
    pub layer: Layer,
    pub index: MatchIndex,
    pub recognizers: RecognizerSet,
    representatives: Vec<String>,
    connectors: Vec<bool>,
}

impl CompiledLayer {
    pub fn compile(layer: Layer) -> Result<Self, PatternError> {
        let index = MatchIndex::build(&layer);
        let recognizers = RecognizerSet::compile(&layer.recognizers)?;
        let representatives = layer.classes.iter().map(|c| c.representative.joined()).collect();
        let connectors = layer
            .classes
            .iter()
            .map(|c| layer.connector_label.as_deref() == Some(c.label.as_str()))
            .collect();
        Ok(CompiledLayer {
            layer,
            index,
            recognizers,
            representatives,
            connectors,
        })
    }

    pub fn id(&self) -> u32 {
        self.layer.id
    }

    pub fn representative(&self, class: ClassId) -> Option<&str> {
        self.representatives.get(class.index()).map(String::as_str)
    }

    pub fn is_connector(&self, class: ClassId) -> bool {
        self.connectors.get(class.index()).copied().unwrap_or(false)
    }

    /// Size-model estimate of everything this layer keeps resident.
    pub fn estimated_bytes(&self) -> usize {
        let s = |t: &str| size_of::<String>() + t.len();
        let classes: usize = self
            .layer
            .classes
            .iter()
            .map(|c| {
                s(&c.label)
                    + c.members
                        .iter()
                        .chain(std::iter::once(&c.representative))
                        .map(|m| size_of::<Vec<String>>() + m.elements().iter().map(|e| s(e)).sum::<usize>())
                        .sum::<usize>()
            })
            .sum();
        let frameworks: usize = self
            .layer
            .frameworks
            .iter()
            .map(|f| s(&f.name) + (f.pattern.len() + f.output.len()) * 2 * size_of::<String>())
            .sum();
        let reps: usize = self.representatives.iter().map(|r| s(r)).sum();
        size_of::<Self>()
            + classes
            + frameworks
            + reps
            + self.connectors.len()
            + self.index.estimated_bytes()
            + self.recognizers.estimated_bytes()
    }
}
