//! Runs the pipeline backwards: enumerates every surface form of a framework
//! by taking the cross product of the classes at each pattern position.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::frameworks::{instantiate, Framework, FrameworkMatch, PatternElem};
use crate::pipeline::{Engine, ParseError};

/// Default limit on the number of variants one enumeration may produce.
pub const DEFAULT_CAP: usize = 10_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenerateError {
    #[error("unknown framework '{0}'")]
    UnknownFramework(String),
    #[error("no surface supplied for slot {0}")]
    MissingSlot(usize),
    #[error("slot {index} expects a '{label}' word, but '{surface}' is not one")]
    SlotRejected {
        index: usize,
        label: String,
        surface: String,
    },
    #[error("literal '{0}' is not a representative in any layer")]
    UnknownLiteral(String),
    #[error("{count} variants exceed the cap of {cap}")]
    CapExceeded { count: u128, cap: usize },
    #[error("variant '{0}' is produced twice")]
    Duplicate(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VariantSet {
    pub framework: String,
    pub slots: BTreeMap<usize, String>,
    /// Canonical sentence the framework writes for these slots.
    pub instantiation: String,
    pub variants: Vec<String>,
    pub expected_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundTripFailure {
    pub variant: String,
    /// What the variant normalized to, or the parse error.
    pub got: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundTripReport {
    pub framework: String,
    pub expected: String,
    pub checked: usize,
    pub failures: Vec<RoundTripFailure>,
}

impl RoundTripReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Finds the framework called `name`, searching layers bottom-up.
fn find_framework<'a>(engine: &'a Engine, name: &str) -> Option<(u32, &'a Framework)> {
    engine
        .layers()
        .iter()
        .find_map(|l| l.layer.framework(name).map(|f| (l.id(), f)))
}

/// All surfaces of the class represented by `rep` at layer `layer` or the
/// nearest layer below that has it. Members keep their declared order.
fn expand(engine: &Engine, rep: &str, layer: u32, cap: usize) -> Result<Vec<String>, GenerateError> {
    for id in (1..=layer).rev() {
        let Some(l) = engine.layer(id) else { continue };
        let Some(class) = l.layer.class_by_representative(rep).and_then(|c| l.layer.class(c)) else {
            continue;
        };
        if id == 1 {
            return Ok(class.members.iter().map(|m| m.joined()).collect());
        }
        let mut out = Vec::new();
        for member in &class.members {
            let parts = member
                .elements()
                .iter()
                .map(|e| expand(engine, e, id - 1, cap))
                .collect::<Result<Vec<_>, _>>()?;
            out.extend(cross(&parts, cap)?);
            if out.len() > cap {
                return Err(GenerateError::CapExceeded {
                    count: out.len() as u128,
                    cap,
                });
            }
        }
        return Ok(out);
    }
    Err(GenerateError::UnknownLiteral(rep.to_string()))
}

/// Concatenations of one choice per position, first position varying slowest.
fn cross(parts: &[Vec<String>], cap: usize) -> Result<Vec<String>, GenerateError> {
    let count = parts
        .iter()
        .try_fold(1u128, |acc, p| acc.checked_mul(p.len() as u128))
        .unwrap_or(u128::MAX);
    if count > cap as u128 {
        return Err(GenerateError::CapExceeded { count, cap });
    }
    let mut out = vec![String::new()];
    for choices in parts {
        out = out
            .iter()
            .flat_map(|prefix| choices.iter().map(move |c| format!("{prefix}{c}")))
            .collect();
    }
    Ok(out)
}

/// Enumerates the surface variants of framework `name` with the default cap.
pub fn enumerate_variants(
    engine: &Engine,
    name: &str,
    slots: &BTreeMap<usize, String>,
) -> Result<VariantSet, GenerateError> {
    enumerate_variants_capped(engine, name, slots, DEFAULT_CAP)
}

pub fn enumerate_variants_capped(
    engine: &Engine,
    name: &str,
    slots: &BTreeMap<usize, String>,
    cap: usize,
) -> Result<VariantSet, GenerateError> {
    let (layer, fw) = find_framework(engine, name).ok_or_else(|| GenerateError::UnknownFramework(name.to_string()))?;

    let mut parts = Vec::with_capacity(fw.pattern.len());
    let mut bindings = BTreeMap::new();
    for elem in &fw.pattern {
        match elem {
            PatternElem::Literal(rep) => parts.push(expand(engine, rep, layer, cap)?),
            PatternElem::Slot { index, label } => {
                let surface = slots.get(index).ok_or(GenerateError::MissingSlot(*index))?;
                let rejected = || GenerateError::SlotRejected {
                    index: *index,
                    label: label.clone(),
                    surface: surface.clone(),
                };
                let words = engine.digest_at(surface, layer).map_err(|_| rejected())?;
                match words.as_slice() {
                    [w] if w.label == *label => {
                        bindings.insert(*index, w.clone());
                    }
                    _ => return Err(rejected()),
                }
                parts.push(vec![surface.clone()]);
            }
        }
    }

    let variants = cross(&parts, cap)?;
    let mut seen = HashSet::with_capacity(variants.len());
    for v in &variants {
        if !seen.insert(v.as_str()) {
            return Err(GenerateError::Duplicate(v.clone()));
        }
    }
    let m = FrameworkMatch {
        name: fw.name.clone(),
        framework: 0,
        literal_count: fw.literal_count(),
        bindings,
    };
    let instantiation = instantiate(&m, fw).expect("validated frameworks only reference their own slots");
    Ok(VariantSet {
        framework: fw.name.clone(),
        slots: slots.clone(),
        instantiation,
        expected_count: parts.iter().map(Vec::len).product(),
        variants,
    })
}

/// Normalizes every variant and lists those that miss the canonical form of
/// the framework instantiation.
pub fn round_trip_check(engine: &Engine, vs: &VariantSet) -> RoundTripReport {
    let expected = engine
        .normalize(&vs.instantiation)
        .unwrap_or_else(|_| vs.instantiation.clone());
    let failures = vs
        .variants
        .iter()
        .filter_map(|v| {
            let got = match engine.normalize(v) {
                Ok(c) => c,
                Err(e) => format!("error: {e}"),
            };
            (got != expected).then(|| RoundTripFailure {
                variant: v.clone(),
                got,
            })
        })
        .collect();
    RoundTripReport {
        framework: vs.framework.clone(),
        expected,
        checked: vs.variants.len(),
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEMO_RULESET;

    fn demo() -> Engine {
        Engine::from_json(DEMO_RULESET.as_bytes()).unwrap()
    }

    fn no_slots() -> BTreeMap<usize, String> {
        BTreeMap::new()
    }

    #[test]
    fn close_program_has_thirty_variants() {
        let e = demo();
        let vs = enumerate_variants(&e, "close-program", &no_slots()).unwrap();
        assert_eq!(vs.variants.len(), 30);
        assert_eq!(vs.expected_count, 30);
        assert_eq!(vs.variants[0], "关闭程序");
        assert_eq!(vs.instantiation, "关程序");
        let report = round_trip_check(&e, &vs);
        assert!(report.passed(), "{:?}", report.failures);
        assert_eq!(report.expected, "关程序");
    }

    #[test]
    fn singleton_framework_yields_its_canonical_sentence() {
        let e = demo();
        let vs = enumerate_variants(&e, "maximize", &no_slots()).unwrap();
        assert_eq!(vs.variants, ["最大化"]);
        assert!(round_trip_check(&e, &vs).passed());
    }

    #[test]
    fn open_url_with_fixed_surface() {
        let e = demo();
        let slots = BTreeMap::from([(0, "www.baidu.com".to_string())]);
        let vs = enumerate_variants(&e, "open-url", &slots).unwrap();
        assert_eq!(vs.variants, ["打开www.baidu.com", "启动www.baidu.com", "开启www.baidu.com", "开www.baidu.com"]);
        assert_eq!(vs.instantiation, "开www.baidu.com");
        assert!(round_trip_check(&e, &vs).passed());
    }

    #[test]
    fn errors() {
        let e = demo();
        assert_eq!(
            enumerate_variants(&e, "nope", &no_slots()),
            Err(GenerateError::UnknownFramework("nope".into()))
        );
        assert_eq!(enumerate_variants(&e, "open-url", &no_slots()), Err(GenerateError::MissingSlot(0)));
        let slots = BTreeMap::from([(0, "qqq".to_string())]);
        assert!(matches!(
            enumerate_variants(&e, "open-url", &slots),
            Err(GenerateError::SlotRejected { index: 0, .. })
        ));
        assert!(matches!(
            enumerate_variants_capped(&e, "close-program", &no_slots(), 10),
            Err(GenerateError::CapExceeded { .. })
        ));
    }
}
