use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use super::{Layer, RecognizerKind, Ruleset, WordSeq};
use crate::frameworks::{OutputElem, PatternElem};
use crate::tokenizer::recognizer::{check_pattern, RecognizerSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiagnosticKind {
    NonConsecutiveLayerIds,
    EmptyClass,
    EmptyMember,
    DuplicateMember,
    RepresentativeNotMember,
    RepresentativeNotShortest,
    BadPattern,
    UnknownSlotLabel,
    UnproducibleElement,
    KeywordDataOverlap,
    BadSlotReference,
    FrameworkWithoutLiteral,
    DuplicateFrameworkName,
    UnknownLiteral,
    UnknownConnectorLabel,
    RecognizerAboveSurface,
    ConnectorAboveSurface,
}

impl DiagnosticKind {
    pub fn name(self) -> &'static str {
        use DiagnosticKind::*;
        match self {
            NonConsecutiveLayerIds => "non-consecutive layer ids",
            EmptyClass => "empty class",
            EmptyMember => "empty member",
            DuplicateMember => "duplicate member",
            RepresentativeNotMember => "representative not in members",
            RepresentativeNotShortest => "representative not shortest",
            BadPattern => "bad pattern",
            UnknownSlotLabel => "unknown slot label",
            UnproducibleElement => "unproducible member element",
            KeywordDataOverlap => "keyword overlaps data word",
            BadSlotReference => "bad slot reference",
            FrameworkWithoutLiteral => "framework without literal",
            DuplicateFrameworkName => "duplicate framework name",
            UnknownLiteral => "unknown framework literal",
            UnknownConnectorLabel => "unknown connector label",
            RecognizerAboveSurface => "recognizer above layer 1",
            ConnectorAboveSurface => "connector above layer 1",
        }
    }

    pub fn severity(self) -> Severity {
        use DiagnosticKind::*;
        match self {
            RepresentativeNotShortest | UnknownLiteral | ConnectorAboveSurface => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for DiagnosticKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub kind: DiagnosticKind,
    pub location: String,
    pub message: String,
}

impl Diagnostic {
    fn new(kind: DiagnosticKind, location: String, message: String) -> Self {
        Diagnostic {
            severity: kind.severity(),
            kind,
            location,
            message,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}: {}: {}: {}", self.kind, self.location, self.message)
    }
}

/// Key under which two members are considered the same surface.
fn match_key(seq: &WordSeq, fold: bool) -> String {
    let s = seq.elements().join("\u{1f}");
    if fold {
        s.to_ascii_lowercase()
    } else {
        s
    }
}

/// Collects every problem in a loaded ruleset. An empty list means valid;
/// a ruleset with warnings only still builds.
pub fn validate_ruleset(rs: &Ruleset) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (pos, layer) in rs.layers.iter().enumerate() {
        if layer.id as usize != pos + 1 {
            out.push(Diagnostic::new(
                DiagnosticKind::NonConsecutiveLayerIds,
                format!("layers[{pos}].id"),
                format!("expected layer id {}, found {}", pos + 1, layer.id),
            ));
        }
    }

    let mut framework_names: HashMap<&str, String> = HashMap::new();
    for (li, layer) in rs.layers.iter().enumerate() {
        check_classes(li, layer, &mut out);
        check_recognizers(li, layer, &mut out);
        if li > 0 {
            check_producible(li, &rs.layers[li - 1], layer, &mut out);
        }
        check_connector(li, layer, &mut out);
        check_frameworks(li, &rs.layers[..=li], &mut framework_names, &mut out);
    }
    out
}

fn check_classes(li: usize, layer: &Layer, out: &mut Vec<Diagnostic>) {
    let surface = li == 0;
    // exact and folded keys of every member seen so far in this layer
    let mut exact: HashMap<String, (usize, bool)> = HashMap::new();
    let mut folded: HashMap<String, (usize, bool)> = HashMap::new();

    for (ci, class) in layer.classes.iter().enumerate() {
        let at = format!("layers[{li}].classes[{ci}]");
        let fold = class.fold_ascii_case && surface;
        if class.members.is_empty() {
            out.push(Diagnostic::new(
                DiagnosticKind::EmptyClass,
                at.clone(),
                format!("class '{}' has no members", class.label),
            ));
            continue;
        }
        for (mi, m) in class.members.iter().enumerate() {
            let m_at = format!("{at}.members[{mi}]");
            if m.is_empty() || m.elements().iter().any(|e| e.is_empty()) {
                out.push(Diagnostic::new(
                    DiagnosticKind::EmptyMember,
                    m_at,
                    format!("class '{}' contains an empty member", class.label),
                ));
                continue;
            }
            let ek = match_key(m, false);
            let fk = match_key(m, true);
            let clash = exact
                .get(&ek)
                .copied()
                .or_else(|| {
                    folded
                        .get(&fk)
                        .copied()
                        .filter(|&(_, other_fold)| fold || other_fold)
                });
            if let Some((other, _)) = clash {
                let where_ = if other == ci {
                    "twice in the same class".to_string()
                } else {
                    format!("also in class '{}' (classes[{other}])", layer.classes[other].label)
                };
                out.push(Diagnostic::new(
                    DiagnosticKind::DuplicateMember,
                    m_at,
                    format!("'{m}' appears {where_}"),
                ));
                continue;
            }
            exact.insert(ek, (ci, fold));
            folded.entry(fk).or_insert((ci, fold));
        }

        let rep = &class.representative;
        if !class.members.contains(rep) {
            out.push(Diagnostic::new(
                DiagnosticKind::RepresentativeNotMember,
                format!("{at}.representative"),
                format!("representative '{rep}' of class '{}' is not one of its members", class.label),
            ));
        } else if class.representative_explicit {
            if let Some(shorter) = class.members.iter().find(|m| m.len() < rep.len()) {
                out.push(Diagnostic::new(
                    DiagnosticKind::RepresentativeNotShortest,
                    format!("{at}.representative"),
                    format!("representative '{rep}' is longer than member '{shorter}'"),
                ));
            }
        }
    }
}

fn check_recognizers(li: usize, layer: &Layer, out: &mut Vec<Diagnostic>) {
    let mut all_compiled = true;
    for (ri, r) in layer.recognizers.iter().enumerate() {
        let at = format!("layers[{li}].recognizers[{ri}]");
        if li > 0 {
            out.push(Diagnostic::new(
                DiagnosticKind::RecognizerAboveSurface,
                at.clone(),
                format!("recognizer '{}' is declared on layer {}; recognizers read surface text only", r.label, layer.id),
            ));
        }
        let problem = match (r.kind, &r.pattern) {
            (RecognizerKind::Pattern, None) => Some("kind \"pattern\" requires a pattern".to_string()),
            (RecognizerKind::Pattern, Some(p)) => check_pattern(p).err(),
            (kind, Some(_)) => Some(format!("kind \"{kind}\" does not take a pattern")),
            (_, None) => None,
        };
        if let Some(msg) = problem {
            all_compiled = false;
            out.push(Diagnostic::new(
                DiagnosticKind::BadPattern,
                format!("{at}.pattern"),
                format!("recognizer '{}': {msg}", r.label),
            ));
        }
    }

    // a surface that is both a keyword and a data word has no defined precedence
    if li == 0 && all_compiled && !layer.recognizers.is_empty() {
        let Ok(set) = RecognizerSet::compile(&layer.recognizers) else {
            return;
        };
        for (ci, class) in layer.classes.iter().enumerate() {
            for (mi, m) in class.members.iter().enumerate() {
                if m.is_empty() {
                    continue;
                }
                let chars: Vec<char> = m.joined().chars().collect();
                if let Some(label) = set.full_match(&chars) {
                    out.push(Diagnostic::new(
                        DiagnosticKind::KeywordDataOverlap,
                        format!("layers[{li}].classes[{ci}].members[{mi}]"),
                        format!("keyword '{m}' is also recognized as data word '{label}'"),
                    ));
                }
            }
        }
    }
}

fn check_producible(li: usize, below: &Layer, layer: &Layer, out: &mut Vec<Diagnostic>) {
    let reps: HashSet<String> = below.classes.iter().map(|c| c.representative.joined()).collect();
    for (ci, class) in layer.classes.iter().enumerate() {
        for (mi, m) in class.members.iter().enumerate() {
            for e in m.elements() {
                if !e.is_empty() && !reps.contains(e) {
                    out.push(Diagnostic::new(
                        DiagnosticKind::UnproducibleElement,
                        format!("layers[{li}].classes[{ci}].members[{mi}]"),
                        format!("'{e}' is not a representative of layer {}", below.id),
                    ));
                }
            }
        }
    }
}

fn check_connector(li: usize, layer: &Layer, out: &mut Vec<Diagnostic>) {
    let Some(label) = &layer.connector_label else {
        return;
    };
    let at = format!("layers[{li}].connector_label");
    if li > 0 {
        out.push(Diagnostic::new(
            DiagnosticKind::ConnectorAboveSurface,
            at.clone(),
            "connectors are only consumed on layer 1".into(),
        ));
    }
    if !layer.classes.iter().any(|c| &c.label == label) {
        out.push(Diagnostic::new(
            DiagnosticKind::UnknownConnectorLabel,
            at,
            format!("no class carries connector label '{label}'"),
        ));
    }
}

fn check_frameworks<'a>(
    li: usize,
    upto: &'a [Layer],
    names: &mut HashMap<&'a str, String>,
    out: &mut Vec<Diagnostic>,
) {
    let layer = &upto[li];
    let mut labels: HashSet<&str> = HashSet::from(["unknown"]);
    let mut reps: HashSet<String> = HashSet::new();
    for (pos, l) in upto.iter().enumerate() {
        labels.extend(l.classes.iter().map(|c| c.label.as_str()));
        labels.extend(l.recognizers.iter().map(|r| r.label.as_str()));
        reps.extend(l.classes.iter().map(|c| c.representative.joined()));
        if pos < li {
            // collapsed sentences carry their framework name as label
            labels.extend(l.frameworks.iter().map(|f| f.name.as_str()));
        }
    }

    for (fi, fw) in layer.frameworks.iter().enumerate() {
        let at = format!("layers[{li}].frameworks[{fi}]");
        if let Some(prev) = names.insert(fw.name.as_str(), at.clone()) {
            out.push(Diagnostic::new(
                DiagnosticKind::DuplicateFrameworkName,
                at.clone(),
                format!("framework name '{}' already used at {prev}", fw.name),
            ));
        }
        if fw.pattern.is_empty() || fw.output.is_empty() {
            out.push(Diagnostic::new(
                DiagnosticKind::BadSlotReference,
                at.clone(),
                format!("framework '{}' needs a non-empty pattern and output", fw.name),
            ));
        }

        let mut slots = Vec::new();
        for (pi, p) in fw.pattern.iter().enumerate() {
            match p {
                PatternElem::Literal(lit) => {
                    if !reps.contains(lit) {
                        out.push(Diagnostic::new(
                            DiagnosticKind::UnknownLiteral,
                            format!("{at}.pattern[{pi}]"),
                            format!("literal '{lit}' is not a representative of layers 1..={}", layer.id),
                        ));
                    }
                }
                PatternElem::Slot { index, label } => {
                    slots.push(*index);
                    if !labels.contains(label.as_str()) {
                        out.push(Diagnostic::new(
                            DiagnosticKind::UnknownSlotLabel,
                            format!("{at}.pattern[{pi}]"),
                            format!("no recognizer or class is labeled '{label}'"),
                        ));
                    }
                }
            }
        }
        let mut sorted = slots.clone();
        sorted.sort_unstable();
        if sorted.iter().enumerate().any(|(i, &s)| i != s) {
            out.push(Diagnostic::new(
                DiagnosticKind::BadSlotReference,
                format!("{at}.pattern"),
                format!("slot indices {slots:?} are not unique and consecutive from 0"),
            ));
        }
        for (oi, o) in fw.output.iter().enumerate() {
            if let OutputElem::SlotRef { index, .. } = o {
                if !slots.contains(index) {
                    out.push(Diagnostic::new(
                        DiagnosticKind::BadSlotReference,
                        format!("{at}.output[{oi}]"),
                        format!("output refers to slot {index}, which the pattern does not declare"),
                    ));
                }
            }
        }
        if !fw.pure_slot && fw.literal_count() == 0 && !fw.pattern.is_empty() {
            out.push(Diagnostic::new(
                DiagnosticKind::FrameworkWithoutLiteral,
                format!("{at}.pattern"),
                format!("framework '{}' has only slots; set \"pure_slot\": true if intended", fw.name),
            ));
        }
    }
}
