//! Model statistics and the benchmark behind `hsf stats` and `hsf bench`.
//!
//! Memory figures come from a size model (counted nodes and strings times
//! their in-memory widths), not from the operating system.

use std::mem::size_of;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::digestion::DigestedWord;
use crate::pipeline::{Engine, LayerRecord, ParseTrace};
use crate::tokenizer::Token;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LayerStats {
    pub id: u32,
    pub classes: usize,
    pub members: usize,
    pub recognizers: usize,
    pub frameworks: usize,
    pub index_nodes: usize,
    pub estimated_bytes: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RulesetStats {
    /// Size of the ruleset file, when it came from one.
    pub on_disk_bytes: Option<u64>,
    pub layers: Vec<LayerStats>,
    pub total_members: usize,
    pub estimated_resident_bytes: usize,
}

pub fn ruleset_stats(engine: &Engine, on_disk_bytes: Option<u64>) -> RulesetStats {
    let layers: Vec<LayerStats> = engine
        .layers()
        .iter()
        .map(|l| LayerStats {
            id: l.id(),
            classes: l.layer.classes.len(),
            members: l.layer.classes.iter().map(|c| c.members.len()).sum(),
            recognizers: l.layer.recognizers.len(),
            frameworks: l.layer.frameworks.len(),
            index_nodes: l.index.node_count(),
            estimated_bytes: l.estimated_bytes(),
        })
        .collect();
    RulesetStats {
        on_disk_bytes,
        total_members: layers.iter().map(|l| l.members).sum(),
        estimated_resident_bytes: engine_bytes(engine),
        layers,
    }
}

/// Size-model estimate of the compiled engine.
pub fn engine_bytes(engine: &Engine) -> usize {
    size_of::<Engine>() + engine.layers().iter().map(|l| l.estimated_bytes()).sum::<usize>()
}

fn string_bytes(s: &str) -> usize {
    size_of::<String>() + s.len()
}

fn token_bytes(t: &Token) -> usize {
    size_of::<Token>()
        + t.surface.len()
        + t.canonical_surface.len()
        + t.label.as_ref().map_or(0, |l| l.len())
}

fn word_bytes(w: &DigestedWord) -> usize {
    size_of::<DigestedWord>() + w.representative.len() + w.label.len() + w.surface.len()
}

fn record_bytes(r: &LayerRecord) -> usize {
    size_of::<LayerRecord>()
        + r.tokens.iter().map(token_bytes).sum::<usize>()
        + r.digested.iter().chain(&r.output).map(word_bytes).sum::<usize>()
        + r.framework.as_deref().map_or(0, string_bytes)
        + r.canonical.len()
}

/// Size-model estimate of a trace plus the character buffer used to build it.
pub fn trace_bytes(t: &ParseTrace) -> usize {
    size_of::<ParseTrace>()
        + t.input.len()
        + t.input.chars().count() * size_of::<char>()
        + t.canonical.len()
        + t.sentences
            .iter()
            .flat_map(|s| &s.layers)
            .map(record_bytes)
            .sum::<usize>()
}

/// Engine plus the trace of one parse: what must be resident while parsing.
pub fn working_set_bytes(engine: &Engine, t: &ParseTrace) -> usize {
    engine_bytes(engine) + trace_bytes(t)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BenchError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("line {line} normalized differently on repetition {repetition}")]
    Nondeterministic { line: usize, repetition: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub lines: usize,
    pub chars: usize,
    pub repetitions: usize,
    pub wall_seconds: f64,
    pub chars_per_second: f64,
    pub p50_micros: f64,
    pub p99_micros: f64,
    pub peak_working_set_bytes: usize,
}

fn outcome(engine: &Engine, line: &str) -> (String, usize) {
    match engine.parse(line) {
        Ok(t) => {
            let ws = working_set_bytes(engine, &t);
            (t.canonical, ws)
        }
        Err(e) => (format!("error: {e}"), engine_bytes(engine)),
    }
}

/// Nearest-rank percentile of sorted samples.
fn percentile(sorted: &[Duration], p: f64) -> Duration {
    let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Normalizes every non-blank line once as a reference, then `repetitions`
/// more times under the clock, checking every result against the reference.
pub fn bench(engine: &Engine, corpus: &str, repetitions: usize) -> Result<BenchReport, BenchError> {
    let lines: Vec<&str> = corpus.lines().filter(|l| !l.trim().is_empty()).collect();
    if lines.is_empty() {
        return Err(BenchError::EmptyCorpus);
    }
    let mut peak = 0;
    let reference: Vec<String> = lines
        .iter()
        .map(|l| {
            let (c, ws) = outcome(engine, l);
            peak = peak.max(ws);
            c
        })
        .collect();

    let repetitions = repetitions.max(1);
    let mut samples = Vec::with_capacity(lines.len() * repetitions);
    let start = Instant::now();
    for rep in 0..repetitions {
        for (i, l) in lines.iter().enumerate() {
            let t0 = Instant::now();
            let got = match engine.normalize(l) {
                Ok(c) => c,
                Err(e) => format!("error: {e}"),
            };
            samples.push(t0.elapsed());
            if got != reference[i] {
                return Err(BenchError::Nondeterministic {
                    line: i + 1,
                    repetition: rep + 1,
                });
            }
        }
    }
    let wall = start.elapsed().as_secs_f64();
    samples.sort();
    let chars: usize = lines.iter().map(|l| l.chars().count()).sum();
    Ok(BenchReport {
        lines: lines.len(),
        chars,
        repetitions,
        wall_seconds: wall,
        chars_per_second: (chars * repetitions) as f64 / wall.max(f64::EPSILON),
        p50_micros: percentile(&samples, 50.0).as_secs_f64() * 1e6,
        p99_micros: percentile(&samples, 99.0).as_secs_f64() * 1e6,
        peak_working_set_bytes: peak,
    })
}
