//! Data-word recognizers: built-in URL and integer matchers plus user patterns
//! in a restricted regular-expression dialect.

use std::mem::size_of;

use regex_automata::{meta::Regex, Anchored, Input, MatchKind};
use regex_syntax::ast::{self, Ast, GroupKind, RepetitionKind};
use thiserror::Error;

use super::url::{builtin_url_match, could_start_url};
use crate::lexicon::{Recognizer, RecognizerKind};

#[derive(Debug, Error)]
#[error("recognizer '{label}': {message}")]
pub struct PatternError {
    pub label: String,
    pub message: String,
}

/// Checks a pattern against the accepted dialect: literals, character
/// classes, `\d`, `+`, `*`, `?`, alternation and grouping. Anchors, counted
/// repetition, inline flags and backreferences are rejected, as is any
/// pattern that matches the empty string.
pub fn check_pattern(pattern: &str) -> Result<(), String> {
    let parsed = ast::parse::Parser::new()
        .parse(pattern)
        .map_err(|e| e.kind().to_string())?;
    check_ast(&parsed)?;
    let re = Regex::new(pattern).map_err(|e| e.to_string())?;
    if re.is_match("") {
        return Err("pattern matches the empty string".into());
    }
    Ok(())
}

fn check_ast(node: &Ast) -> Result<(), String> {
    match node {
        Ast::Empty(_)
        | Ast::Literal(_)
        | Ast::Dot(_)
        | Ast::ClassUnicode(_)
        | Ast::ClassPerl(_)
        | Ast::ClassBracketed(_) => Ok(()),
        Ast::Flags(_) => Err("inline flags are not supported".into()),
        Ast::Assertion(_) => Err("anchors and boundaries are not supported".into()),
        Ast::Repetition(rep) => match rep.op.kind {
            RepetitionKind::Range(_) => Err("counted repetition is not supported".into()),
            _ => check_ast(&rep.ast),
        },
        Ast::Group(group) => match &group.kind {
            GroupKind::NonCapturing(flags) if !flags.items.is_empty() => {
                Err("inline flags are not supported".into())
            }
            _ => check_ast(&group.ast),
        },
        Ast::Alternation(alt) => alt.asts.iter().try_for_each(check_ast),
        Ast::Concat(cat) => cat.asts.iter().try_for_each(check_ast),
    }
}

#[derive(Debug)]
enum Matcher {
    Url,
    Integer,
    Pattern { leftmost: Regex, longest: Regex },
}

#[derive(Debug)]
pub struct CompiledRecognizer {
    pub recognizer: Recognizer,
    matcher: Matcher,
}

/// A recognizer hit inside a span. Positions are character indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecognizerMatch {
    pub recognizer: usize,
    pub label: String,
    pub start: usize,
    pub len: usize,
    pub canonical_surface: String,
}

/// The recognizers of one layer, in ruleset order.
#[derive(Debug, Default)]
pub struct RecognizerSet {
    recognizers: Vec<CompiledRecognizer>,
}

impl RecognizerSet {
    pub fn compile(recognizers: &[Recognizer]) -> Result<Self, PatternError> {
        let compiled = recognizers
            .iter()
            .map(|r| {
                let err = |message: String| PatternError {
                    label: r.label.clone(),
                    message,
                };
                let matcher = match r.kind {
                    RecognizerKind::Url => Matcher::Url,
                    RecognizerKind::Integer => Matcher::Integer,
                    RecognizerKind::Pattern => {
                        let pattern = r.pattern.as_deref().ok_or_else(|| err("missing pattern".into()))?;
                        check_pattern(pattern).map_err(err)?;
                        let leftmost = Regex::new(pattern).map_err(|e| err(e.to_string()))?;
                        let longest = Regex::builder()
                            .configure(Regex::config().match_kind(MatchKind::All))
                            .build(pattern)
                            .map_err(|e| err(e.to_string()))?;
                        Matcher::Pattern { leftmost, longest }
                    }
                };
                Ok(CompiledRecognizer {
                    recognizer: r.clone(),
                    matcher,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RecognizerSet {
            recognizers: compiled,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.recognizers.is_empty()
    }

    pub fn len(&self) -> usize {
        self.recognizers.len()
    }

    pub fn get(&self, index: usize) -> Option<&Recognizer> {
        self.recognizers.get(index).map(|c| &c.recognizer)
    }

    /// First recognizer of kind `url`, consulted during the keyword pass.
    pub fn url_recognizer(&self) -> Option<usize> {
        self.recognizers
            .iter()
            .position(|c| matches!(c.matcher, Matcher::Url))
    }

    /// Earliest match in `span`; among recognizers matching at that position
    /// the longest wins, then the one declared first.
    pub fn recognize(&self, span: &[char]) -> Option<RecognizerMatch> {
        let mut scanner = self.scanner(span);
        scanner.next_match(0, span.len()).map(|(i, start, end)| {
            let matched: String = span[start..end].iter().collect();
            RecognizerMatch {
                recognizer: i,
                label: self.recognizers[i].recognizer.label.clone(),
                start,
                len: end - start,
                canonical_surface: self.recognizers[i].recognizer.canonical_surface(&matched),
            }
        })
    }

    /// Label of the first recognizer that matches all of `text`.
    pub fn full_match(&self, text: &[char]) -> Option<&str> {
        if text.is_empty() {
            return None;
        }
        let mut scanner = self.scanner(text);
        (0..self.recognizers.len())
            .find(|&i| scanner.longest_at(i, 0, text.len()) == Some(text.len()))
            .map(|i| self.recognizers[i].recognizer.label.as_str())
    }

    pub(crate) fn scanner<'a>(&'a self, text: &'a [char]) -> Scanner<'a> {
        let needs_hay = self
            .recognizers
            .iter()
            .any(|c| matches!(c.matcher, Matcher::Pattern { .. }));
        let (hay, byte_of) = if needs_hay {
            let mut hay = String::with_capacity(text.len() * 3);
            let mut byte_of = Vec::with_capacity(text.len() + 1);
            for &c in text {
                byte_of.push(hay.len());
                hay.push(c);
            }
            byte_of.push(hay.len());
            (hay, byte_of)
        } else {
            (String::new(), Vec::new())
        };
        Scanner {
            set: self,
            text,
            hay,
            byte_of,
            cache: vec![None; self.recognizers.len()],
        }
    }

    pub fn estimated_bytes(&self) -> usize {
        self.recognizers
            .iter()
            .map(|c| {
                let r = &c.recognizer;
                let strings = r.label.len()
                    + r.pattern.as_ref().map_or(0, String::len)
                    + r.wrap.as_ref().map_or(0, |(p, s)| p.len() + s.len())
                    + 4 * size_of::<String>();
                let automata = match &c.matcher {
                    Matcher::Pattern { leftmost, longest } => {
                        leftmost.memory_usage() + longest.memory_usage()
                    }
                    _ => 0,
                };
                size_of::<CompiledRecognizer>() + strings + automata
            })
            .sum()
    }
}

/// Last search of one recognizer: searched-from, searched-to, and the hit as
/// a character range.
type CachedSearch = (usize, usize, Option<(usize, usize)>);

/// Repeated earliest-match search over one text. Each recognizer's next hit is
/// cached so a span with many data words is scanned close to once.
pub(crate) struct Scanner<'a> {
    set: &'a RecognizerSet,
    text: &'a [char],
    hay: String,
    byte_of: Vec<usize>,
    cache: Vec<Option<CachedSearch>>,
}

impl Scanner<'_> {
    fn char_at_byte(&self, byte: usize) -> usize {
        self.byte_of.partition_point(|&b| b < byte)
    }

    /// Longest match of recognizer `i` starting exactly at `at`, not past `to`.
    fn longest_at(&mut self, i: usize, at: usize, to: usize) -> Option<usize> {
        let text = &self.text[..to];
        let len = match &self.set.recognizers[i].matcher {
            Matcher::Url => builtin_url_match(&text[at..]),
            Matcher::Integer => {
                let n = text[at..].iter().take_while(|c| c.is_ascii_digit()).count();
                (n > 0).then_some(n)
            }
            Matcher::Pattern { longest, .. } => {
                let input = Input::new(&self.hay)
                    .range(self.byte_of[at]..self.byte_of[to])
                    .anchored(Anchored::Yes);
                longest
                    .find(input)
                    .filter(|m| m.end() > m.start())
                    .map(|m| self.char_at_byte(m.end()) - at)
            }
        };
        len.filter(|&n| n > 0)
    }

    fn earliest(&mut self, i: usize, from: usize, to: usize) -> Option<(usize, usize)> {
        if let Some((f, t, hit)) = self.cache[i] {
            let still_valid = t == to
                && f <= from
                && match hit {
                    Some((s, _)) => s >= from,
                    None => true,
                };
            if still_valid {
                return hit;
            }
        }
        let hit = match &self.set.recognizers[i].matcher {
            Matcher::Url => (from..to)
                .filter(|&p| could_start_url(self.text, p))
                .find_map(|p| builtin_url_match(&self.text[p..to]).map(|n| (p, p + n))),
            Matcher::Integer => (from..to)
                .find(|&p| self.text[p].is_ascii_digit())
                .map(|p| {
                    let n = self.text[p..to].iter().take_while(|c| c.is_ascii_digit()).count();
                    (p, p + n)
                }),
            Matcher::Pattern { leftmost, .. } => {
                let input = Input::new(&self.hay).range(self.byte_of[from]..self.byte_of[to]);
                match leftmost.find(input) {
                    Some(m) => {
                        let start = self.char_at_byte(m.start());
                        self.longest_at(i, start, to).map(|n| (start, start + n))
                    }
                    None => None,
                }
            }
        };
        self.cache[i] = Some((from, to, hit));
        hit
    }

    /// `(recognizer, start, end)` of the earliest, longest, first-declared hit
    /// within `from..to`.
    pub(crate) fn next_match(&mut self, from: usize, to: usize) -> Option<(usize, usize, usize)> {
        let mut best: Option<(usize, usize, usize)> = None;
        for i in 0..self.set.recognizers.len() {
            if let Some((s, e)) = self.earliest(i, from, to) {
                let better = match best {
                    None => true,
                    Some((_, bs, be)) => s < bs || (s == bs && e > be),
                };
                if better {
                    best = Some((i, s, e));
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(label: &str, kind: RecognizerKind, pattern: Option<&str>, wrap: Option<(&str, &str)>) -> Recognizer {
        Recognizer {
            label: label.into(),
            kind,
            pattern: pattern.map(Into::into),
            wrap: wrap.map(|(p, s)| (p.into(), s.into())),
        }
    }

    fn chars(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    #[test]
    fn url_with_quotes() {
        let set = RecognizerSet::compile(&[rec("网址", RecognizerKind::Url, None, Some(("“", "”")))]).unwrap();
        let m = set.recognize(&chars("www.baidu.com")).unwrap();
        assert_eq!((m.label.as_str(), m.len, m.canonical_surface.as_str()), ("网址", 13, "“www.baidu.com”"));
    }

    #[test]
    fn integer_stops_at_non_digit() {
        let set = RecognizerSet::compile(&[rec("整数", RecognizerKind::Integer, None, None)]).unwrap();
        let m = set.recognize(&chars("7秒")).unwrap();
        assert_eq!((m.label.as_str(), m.start, m.len, m.canonical_surface.as_str()), ("整数", 0, 1, "7"));
    }

    #[test]
    fn coordinate_pattern() {
        let set = RecognizerSet::compile(&[
            rec("整数", RecognizerKind::Integer, None, None),
            rec("坐标", RecognizerKind::Pattern, Some(r"（\d+，\d+）"), None),
        ])
        .unwrap();
        let m = set.recognize(&chars("（19，16）")).unwrap();
        // seven code points: （ 1 9 ， 1 6 ）
        assert_eq!((m.label.as_str(), m.start, m.len), ("坐标", 0, 7));
        assert_eq!(m.canonical_surface, "（19，16）");
    }

    #[test]
    fn earliest_position_wins_over_longer_later_match() {
        let set = RecognizerSet::compile(&[
            rec("word", RecognizerKind::Pattern, Some("[a-z]+"), None),
            rec("n", RecognizerKind::Integer, None, None),
        ])
        .unwrap();
        let m = set.recognize(&chars("中7abcdef")).unwrap();
        assert_eq!((m.label.as_str(), m.start, m.len), ("n", 1, 1));
    }

    #[test]
    fn longest_alternative_at_a_position() {
        let set = RecognizerSet::compile(&[rec("p", RecognizerKind::Pattern, Some("a|ab|abc"), None)]).unwrap();
        assert_eq!(set.recognize(&chars("xabcd")).map(|m| (m.start, m.len)), Some((1, 3)));
    }

    #[test]
    fn declaration_order_breaks_ties() {
        let set = RecognizerSet::compile(&[
            rec("first", RecognizerKind::Pattern, Some("[0-9]+"), None),
            rec("second", RecognizerKind::Integer, None, None),
        ])
        .unwrap();
        assert_eq!(set.recognize(&chars("42")).unwrap().label, "first");
    }

    #[test]
    fn nothing_to_recognize() {
        let set = RecognizerSet::compile(&[rec("n", RecognizerKind::Integer, None, None)]).unwrap();
        assert_eq!(set.recognize(&chars("qqq")), None);
    }

    #[test]
    fn dialect() {
        for ok in [r"（\d+，\d+）", "[a-z]+(-[a-z]+)*", "(?:ab|cd)+x?", r"\w+\.txt"] {
            assert!(check_pattern(ok).is_ok(), "{ok}");
        }
        for bad in [r"\d{3}", "^a", r"a\b", "(?i)a", "(?i:a)", "a?", "(", r"(a)\1"] {
            assert!(check_pattern(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn scanner_reuses_cached_hits() {
        let set = RecognizerSet::compile(&[
            rec("n", RecognizerKind::Integer, None, None),
            rec("w", RecognizerKind::Pattern, Some("[a-z]+"), None),
        ])
        .unwrap();
        let text = chars("1 ab 22 cd");
        let mut sc = set.scanner(&text);
        let mut hits = Vec::new();
        let mut from = 0;
        while let Some((i, s, e)) = sc.next_match(from, text.len()) {
            hits.push((i, s, e));
            from = e;
        }
        assert_eq!(hits, vec![(0, 0, 1), (1, 2, 4), (0, 5, 7), (1, 8, 10)]);
    }
}
