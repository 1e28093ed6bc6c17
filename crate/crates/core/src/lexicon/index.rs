use std::collections::HashMap;
use std::mem::size_of;

use super::{ClassId, Layer, WordSeq};

/// Element of an encoded sequence. On the surface layer a symbol is the code
/// point; above it, an interned representative.
pub type Sym = u32;

/// Symbol for elements that can never start or continue a member.
pub const NO_SYMBOL: Sym = u32::MAX;

const ROOT: u32 = 0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Terminal {
    class: ClassId,
    folded: bool,
}

#[derive(Clone, Debug, Default)]
struct Node {
    // sorted by symbol
    children: Vec<(Sym, u32)>,
    terminal: Option<Terminal>,
}

#[derive(Clone, Debug)]
enum Symbols {
    Chars,
    Interned { ids: HashMap<String, Sym>, names: Vec<String> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexMatch {
    pub class: ClassId,
    pub len: usize,
}

/// Prefix tree over every member of every class in one layer.
///
/// Members of case-folding classes are stored ASCII-lowercased; a lookup walks
/// the exact path and the lowercased path side by side and accepts a terminal
/// reached on the lowercased path only if its class folds case.
#[derive(Clone, Debug)]
pub struct MatchIndex {
    nodes: Vec<Node>,
    symbols: Symbols,
    has_fold: bool,
}

fn fold_sym(s: Sym) -> Sym {
    if (b'A' as Sym..=b'Z' as Sym).contains(&s) {
        s + 32
    } else {
        s
    }
}

impl MatchIndex {
    pub fn build(layer: &Layer) -> Self {
        let mut index = MatchIndex {
            nodes: vec![Node::default()],
            symbols: if layer.is_surface() {
                Symbols::Chars
            } else {
                Symbols::Interned {
                    ids: HashMap::new(),
                    names: Vec::new(),
                }
            },
            has_fold: false,
        };
        for (ci, class) in layer.classes.iter().enumerate() {
            let folded = class.fold_ascii_case && layer.is_surface();
            index.has_fold |= folded;
            for member in &class.members {
                if member.is_empty() {
                    continue;
                }
                let mut syms = index.intern(member);
                if folded {
                    syms.iter_mut().for_each(|s| *s = fold_sym(*s));
                }
                index.insert(
                    &syms,
                    Terminal {
                        class: ClassId(ci as u32),
                        folded,
                    },
                );
            }
        }
        index
    }

    fn intern(&mut self, seq: &WordSeq) -> Vec<Sym> {
        match &mut self.symbols {
            Symbols::Chars => seq
                .elements()
                .iter()
                .flat_map(|e| e.chars())
                .map(|c| c as Sym)
                .collect(),
            Symbols::Interned { ids, names } => seq
                .elements()
                .iter()
                .map(|e| {
                    *ids.entry(e.clone()).or_insert_with(|| {
                        names.push(e.clone());
                        (names.len() - 1) as Sym
                    })
                })
                .collect(),
        }
    }

    fn insert(&mut self, syms: &[Sym], terminal: Terminal) {
        let mut node = ROOT;
        for &s in syms {
            node = match self.child(node, s) {
                Some(next) => next,
                None => {
                    let next = self.nodes.len() as u32;
                    self.nodes.push(Node::default());
                    let children = &mut self.nodes[node as usize].children;
                    let at = children.partition_point(|(k, _)| *k < s);
                    children.insert(at, (s, next));
                    next
                }
            };
        }
        // first writer wins; collisions are reported by the validator
        let slot = &mut self.nodes[node as usize].terminal;
        if slot.is_none() {
            *slot = Some(terminal);
        }
    }

    fn child(&self, node: u32, s: Sym) -> Option<u32> {
        let children = &self.nodes[node as usize].children;
        children
            .binary_search_by_key(&s, |(k, _)| *k)
            .ok()
            .map(|i| children[i].1)
    }

    /// Encodes surface text for [`longest_match`](Self::longest_match).
    pub fn encode_chars(&self, text: &[char]) -> Vec<Sym> {
        text.iter().map(|&c| c as Sym).collect()
    }

    /// Encodes a word sequence; `None` marks elements that must not match.
    pub fn encode_words<'a, I>(&self, words: I) -> Vec<Sym>
    where
        I: IntoIterator<Item = Option<&'a str>>,
    {
        words
            .into_iter()
            .map(|w| match (&self.symbols, w) {
                (Symbols::Chars, _) | (_, None) => NO_SYMBOL,
                (Symbols::Interned { ids, .. }, Some(w)) => {
                    ids.get(w).copied().unwrap_or(NO_SYMBOL)
                }
            })
            .collect()
    }

    pub fn encode(&self, seq: &WordSeq) -> Vec<Sym> {
        match self.symbols {
            Symbols::Chars => seq
                .elements()
                .iter()
                .flat_map(|e| e.chars())
                .map(|c| c as Sym)
                .collect(),
            Symbols::Interned { .. } => {
                self.encode_words(seq.elements().iter().map(|e| Some(e.as_str())))
            }
        }
    }

    /// Longest member that is a prefix of `seq[pos..]`.
    ///
    /// # Panics
    ///
    /// Panics if `pos >= seq.len()`.
    pub fn longest_match(&self, seq: &[Sym], pos: usize) -> Option<IndexMatch> {
        assert!(
            pos < seq.len(),
            "longest_match: position {pos} out of range for length {}",
            seq.len()
        );
        let mut best = None;
        let mut exact = Some(ROOT);
        let mut lowered = if self.has_fold { Some(ROOT) } else { None };
        for (k, &s) in seq[pos..].iter().enumerate() {
            if s == NO_SYMBOL {
                break;
            }
            exact = exact.and_then(|n| self.child(n, s));
            lowered = lowered.and_then(|n| self.child(n, fold_sym(s)));
            if exact.is_none() && lowered.is_none() {
                break;
            }
            let hit = exact
                .and_then(|n| self.nodes[n as usize].terminal)
                .or_else(|| {
                    lowered
                        .and_then(|n| self.nodes[n as usize].terminal)
                        .filter(|t| t.folded)
                });
            if let Some(t) = hit {
                best = Some(IndexMatch {
                    class: t.class,
                    len: k + 1,
                });
            }
        }
        best
    }

    /// Class of a complete member, if present.
    pub fn lookup(&self, seq: &WordSeq) -> Option<ClassId> {
        let syms = self.encode(seq);
        if syms.is_empty() {
            return None;
        }
        self.longest_match(&syms, 0)
            .filter(|m| m.len == syms.len())
            .map(|m| m.class)
    }

    /// Every stored member with its class, in tree order. Members of folding
    /// classes come back lowercased.
    pub fn entries(&self) -> Vec<(WordSeq, ClassId)> {
        let mut out = Vec::new();
        let mut stack = vec![(ROOT, Vec::<Sym>::new())];
        while let Some((node, path)) = stack.pop() {
            let n = &self.nodes[node as usize];
            if let Some(t) = n.terminal {
                out.push((self.decode(&path), t.class));
            }
            for &(s, child) in n.children.iter().rev() {
                let mut p = path.clone();
                p.push(s);
                stack.push((child, p));
            }
        }
        out
    }

    fn decode(&self, syms: &[Sym]) -> WordSeq {
        match &self.symbols {
            Symbols::Chars => WordSeq::from_words(
                syms.iter()
                    .map(|&s| char::from_u32(s).unwrap_or('\u{FFFD}').to_string()),
            ),
            Symbols::Interned { names, .. } => {
                WordSeq::from_words(syms.iter().map(|&s| names[s as usize].clone()))
            }
        }
    }

    /// Number of tree nodes, not counting the root.
    pub fn node_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.nodes[ROOT as usize].children.is_empty()
    }

    /// Size-model estimate of the heap held by this index.
    pub fn estimated_bytes(&self) -> usize {
        let nodes = self.nodes.len() * size_of::<Node>();
        let edges: usize = self
            .nodes
            .iter()
            .map(|n| n.children.capacity() * size_of::<(Sym, u32)>())
            .sum();
        let symbols = match &self.symbols {
            Symbols::Chars => 0,
            Symbols::Interned { names, .. } => names
                .iter()
                .map(|n| 2 * (n.len() + size_of::<String>()) + size_of::<Sym>())
                .sum(),
        };
        size_of::<Self>() + nodes + edges + symbols
    }
}
