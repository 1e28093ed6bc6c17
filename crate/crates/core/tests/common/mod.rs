#![allow(dead_code)]

use std::collections::BTreeMap;

use hsf::lexicon::CompiledLayer;
use hsf::{Engine, Layer, SynonymClass, WordSeq};
use serde_json::Value;

pub const CORPUS: &str = include_str!("../../data/demo_corpus.txt");

pub fn demo() -> Engine {
    Engine::from_json(hsf::DEMO_RULESET.as_bytes()).unwrap()
}

/// One demo engine per test binary, for property loops.
pub fn shared() -> &'static Engine {
    static ENGINE: std::sync::OnceLock<Engine> = std::sync::OnceLock::new();
    ENGINE.get_or_init(demo)
}

pub fn demo_value() -> Value {
    serde_json::from_str(hsf::DEMO_RULESET).unwrap()
}

/// Runs the command line in-process and returns (exit code, stdout, stderr).
pub fn run_cli(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("hsf").chain(args.iter().copied());
    let code = hsf::cli::run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// The six broken variants of the demo ruleset, each paired with the
/// diagnostic it must raise.
pub fn faulty_rulesets() -> Vec<(&'static str, Value)> {
    let mut out = Vec::new();

    let mut v = demo_value();
    v["layers"][0]["classes"][0]["members"]
        .as_array_mut()
        .unwrap()
        .push("启动".into());
    out.push(("duplicate member", v));

    let mut v = demo_value();
    v["layers"][0]["classes"][1]["representative"] = "关上".into();
    out.push(("representative not in members", v));

    let mut v = demo_value();
    v["layers"][0]["recognizers"][1]["pattern"] = "（(\\d+，\\d+）".into();
    out.push(("bad pattern", v));

    let mut v = demo_value();
    v["layers"][1]["frameworks"][0]["pattern"][1]["label"] = "网站".into();
    out.push(("unknown slot label", v));

    let mut v = demo_value();
    v["layers"][0]["classes"][2]["members"]
        .as_array_mut()
        .unwrap()
        .push("".into());
    out.push(("empty member", v));

    let mut v = demo_value();
    v["layers"][1]["id"] = 3.into();
    out.push(("non-consecutive layer ids", v));

    out
}

/// A surface-only layer over `members`, one class per entry.
pub fn lexicon_layer(classes: &[Vec<String>]) -> CompiledLayer {
    CompiledLayer::compile(Layer {
        id: 1,
        classes: classes
            .iter()
            .enumerate()
            .map(|(i, ms)| SynonymClass::new(format!("c{i}"), ms.iter().map(|m| WordSeq::from_surface(m)).collect()))
            .collect(),
        ..Layer::default()
    })
    .unwrap()
}

/// Brute-force greedy longest prefix: at every position try every member.
/// Returns (start, end, class) for each keyword match.
pub fn oracle_keywords(classes: &[Vec<String>], text: &[char]) -> Vec<(usize, usize, u32)> {
    let members: Vec<(Vec<char>, u32)> = classes
        .iter()
        .enumerate()
        .flat_map(|(i, ms)| ms.iter().map(move |m| (m.chars().collect(), i as u32)))
        .collect();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < text.len() {
        let best = members
            .iter()
            .filter(|(m, _)| text[pos..].starts_with(m))
            .max_by_key(|(m, _)| m.len());
        match best {
            Some((m, c)) => {
                out.push((pos, pos + m.len(), *c));
                pos += m.len();
            }
            None => pos += 1,
        }
    }
    out
}

/// Splits `members` into classes of the given sizes, in order.
pub fn into_classes(members: Vec<String>, sizes: &[usize]) -> Vec<Vec<String>> {
    let mut it = members.into_iter();
    let mut out = Vec::new();
    for &n in sizes {
        let c: Vec<String> = it.by_ref().take(n).collect();
        if c.is_empty() {
            break;
        }
        out.push(c);
    }
    out
}

/// Lines of the demo corpus with no unknown words.
pub fn known_corpus_lines(engine: &Engine) -> Vec<&'static str> {
    CORPUS
        .lines()
        .filter(|l| engine.parse(l).is_ok_and(|t| t.unknown_count == 0))
        .collect()
}

/// Characters that exercise keywords, data words, separators and spaces.
pub const MIXED_ALPHABET: &[char] = &[
    '打', '开', '关', '闭', '页', '面', '当', '前', '随', '后', '并', '等', '待', '秒', '双', '击', '（', '）', '，', '。', '、',
    '；', '\n', ' ', '\t', '1', '9', '7', 'w', '.', 'b', 'a', 'c', 'o', 'm', '/', ':', 'h', 't', 'p', 's', 'W', 'P', 'S', 'E',
    'n', 'e', 'r', 'q', '“', '”', '-',
];

pub fn slots(pairs: &[(usize, &str)]) -> BTreeMap<usize, String> {
    pairs.iter().map(|(i, s)| (*i, s.to_string())).collect()
}
