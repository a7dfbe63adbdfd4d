//! Candidate structures and the exclusion rules that make a structure
//! allowable.
//!
//! If the product at `a` over `{b, c}` is minimal then, at `b`, no pair
//! containing `c` can be minimal; at `c`, no pair containing `b`; and at
//! every other node `i`, neither `{a, b}` nor `{a, c}`.

use alloc::vec::Vec;
use core::fmt;

use crate::matrixrep::chain_decomposition;
use crate::structure::{GromovStructure, NodeId, Pair, MIN_POINTS};

/// Largest point count the enumerator accepts.
pub const MAX_ENUMERATION_POINTS: usize = 8;

/// Pairs a node may not pick, as a list of `(node, pair)` entries.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExclusionSet {
    entries: Vec<(NodeId, Pair)>,
}

impl ExclusionSet {
    pub fn contains(&self, node: NodeId, pair: Pair) -> bool {
        self.entries.iter().any(|&(x, p)| x == node && p == pair)
    }

    pub fn entries(&self) -> &[(NodeId, Pair)] {
        &self.entries
    }

    pub fn forbidden_at(&self, node: NodeId) -> impl Iterator<Item = Pair> + '_ {
        self.entries.iter().filter(move |(x, _)| *x == node).map(|&(_, p)| p)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn extend(&mut self, other: &ExclusionSet) {
        for &(x, p) in &other.entries {
            if !self.contains(x, p) {
                self.entries.push((x, p));
            }
        }
    }
}

/// Everything forbidden once `owner` picks `pair` on `n` points.
pub fn exclusions_of(owner: NodeId, pair: Pair, n: usize) -> ExclusionSet {
    let (a, (b, c)) = (owner.index(), pair.indices());
    let mut entries = Vec::new();
    for (x, y) in [(b, c), (c, b)] {
        for i in (0..n).filter(|&i| i != x && i != y) {
            entries.push((NodeId::from_index(x), Pair::from_indices(y, i)));
        }
    }
    for i in (0..n).filter(|&i| i != a && i != b && i != c) {
        entries.push((NodeId::from_index(i), Pair::from_indices(a, b)));
        entries.push((NodeId::from_index(i), Pair::from_indices(a, c)));
    }
    ExclusionSet { entries }
}

/// A violated rule instance: `source` picking `source_pair` forbids `node`
/// from picking `pair`, which it does.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExclusionViolation {
    pub source: NodeId,
    pub source_pair: Pair,
    pub node: NodeId,
    pub pair: Pair,
}

impl fmt::Display for ExclusionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "exclusion rule violated at node {}: pick {} is excluded by node {} picking {}",
            self.node, self.pair, self.source, self.source_pair
        )
    }
}

/// First violated exclusion, scanning sources then targets in node order.
pub fn check_allowable(s: &GromovStructure) -> Result<(), ExclusionViolation> {
    let n = s.n();
    for source in s.nodes() {
        let source_pair = s.pick(source);
        let ex = exclusions_of(source, source_pair, n);
        for node in s.nodes() {
            let pair = s.pick(node);
            if ex.contains(node, pair) {
                return Err(ExclusionViolation { source, source_pair, node, pair });
            }
        }
    }
    Ok(())
}

pub fn is_allowable(s: &GromovStructure) -> bool {
    check_allowable(s).is_ok()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EnumerationMode {
    /// Every allowable structure, exactly once.
    Full,
    /// Only structures whose longest mutual-selection component is the
    /// path `1 - 2 - ... - k`. Covers every orbit; used as a cross-check.
    ChainSeeded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnsupportedN(pub usize);

impl fmt::Display for UnsupportedN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "enumeration supports {MIN_POINTS}..={MAX_ENUMERATION_POINTS} points, got {}", self.0)
    }
}

impl core::error::Error for UnsupportedN {}

type Mask = u32;

/// Depth-first search over picks, node by node, with incremental exclusion masks.
///
/// Pairs are numbered globally; `forbid[a][p]` holds, for every node, the
/// mask of pairs forbidden by `a` picking pair `p`.
#[derive(Clone, Debug)]
pub struct Enumerator {
    n: usize,
    mode: EnumerationMode,
    pairs: Vec<(u8, u8)>,
    /// Global pair ids available to each node (pairs not containing it).
    options: Vec<Vec<u8>>,
    forbid: Vec<Vec<[Mask; MAX_ENUMERATION_POINTS]>>,
}

/// Joint choice of the first two nodes' picks: the unit of parallel work.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subtree {
    first: u8,
    second: u8,
}

#[derive(Clone, Copy)]
struct Search {
    picks: [u8; MAX_ENUMERATION_POINTS],
    forbidden: [Mask; MAX_ENUMERATION_POINTS],
    required: [Mask; MAX_ENUMERATION_POINTS],
}

impl Enumerator {
    pub fn new(n: usize, mode: EnumerationMode) -> Result<Self, UnsupportedN> {
        if !(MIN_POINTS..=MAX_ENUMERATION_POINTS).contains(&n) {
            return Err(UnsupportedN(n));
        }
        let mut pairs = Vec::new();
        for j in 0..n {
            for k in j + 1..n {
                pairs.push((j as u8, k as u8));
            }
        }
        let pair_id = |j: usize, k: usize| {
            let (j, k) = if j < k { (j, k) } else { (k, j) };
            pairs.iter().position(|&p| p == (j as u8, k as u8)).unwrap()
        };
        let options = (0..n)
            .map(|a| {
                (0..pairs.len() as u8)
                    .filter(|&p| pairs[p as usize].0 as usize != a && pairs[p as usize].1 as usize != a)
                    .collect()
            })
            .collect();
        let forbid = (0..n)
            .map(|a| {
                (0..pairs.len())
                    .map(|p| {
                        let mut masks = [0; MAX_ENUMERATION_POINTS];
                        let (b, c) = pairs[p];
                        if b as usize == a || c as usize == a {
                            return masks;
                        }
                        for (x, pair) in exclusions_of(NodeId::from_index(a), Pair::from_indices(b as usize, c as usize), n).entries() {
                            let (j, k) = pair.indices();
                            masks[x.index()] |= 1 << pair_id(j, k);
                        }
                        masks
                    })
                    .collect()
            })
            .collect();
        Ok(Enumerator { n, mode, pairs, options, forbid })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> EnumerationMode {
        self.mode
    }

    /// Number of unpruned candidates, `C(n-1, 2)^n`.
    pub fn raw_candidates(&self) -> u64 {
        (self.options[0].len() as u64).pow(self.n as u32)
    }

    /// Feasible joint choices for nodes 1 and 2, in a fixed order.
    pub fn subtrees(&self) -> Vec<Subtree> {
        let mut out = Vec::new();
        for seed in self.seeds() {
            let root = self.root(seed);
            for &p0 in &self.options[0] {
                let Some(s1) = self.place(&root, 0, p0) else { continue };
                for &p1 in &self.options[1] {
                    if self.place(&s1, 1, p1).is_some() {
                        out.push(Subtree { first: p0, second: p1 });
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Calls `emit` with zero-based pick indices for every structure in the subtree.
    pub fn for_each_in_subtree<F: FnMut(&[(usize, usize)])>(&self, subtree: Subtree, mut emit: F) {
        let mut buf = [(0usize, 0usize); MAX_ENUMERATION_POINTS];
        for seed in self.seeds() {
            let root = self.root(seed);
            let Some(s1) = self.place(&root, 0, subtree.first) else { continue };
            let Some(s2) = self.place(&s1, 1, subtree.second) else { continue };
            self.descend(&s2, 2, &mut |search: &Search| {
                for (a, slot) in buf.iter_mut().enumerate().take(self.n) {
                    let (b, c) = self.pairs[search.picks[a] as usize];
                    *slot = (b as usize, c as usize);
                }
                let picks = &buf[..self.n];
                if self.mode == EnumerationMode::ChainSeeded && !self.matches_seed(picks, seed) {
                    return;
                }
                emit(picks);
            });
        }
    }

    /// Sequential walk over every subtree.
    pub fn for_each<F: FnMut(&[(usize, usize)])>(&self, mut emit: F) {
        for subtree in self.subtrees() {
            self.for_each_in_subtree(subtree, &mut emit);
        }
    }

    pub fn collect(&self) -> Vec<GromovStructure> {
        let mut out = Vec::new();
        self.for_each(|picks| out.push(GromovStructure::from_index_pairs(picks).expect("enumerated picks are valid")));
        out
    }

    /// Seed lengths: `[0]` for full mode, longest-component lengths `n..=1` otherwise.
    fn seeds(&self) -> Vec<usize> {
        match self.mode {
            EnumerationMode::Full => alloc::vec![0],
            EnumerationMode::ChainSeeded => (1..=self.n).rev().collect(),
        }
    }

    fn root(&self, seed: usize) -> Search {
        let mut required = [0; MAX_ENUMERATION_POINTS];
        for j in 1..seed {
            required[j - 1] |= 1 << j;
            required[j] |= 1 << (j - 1);
        }
        Search { picks: [0; MAX_ENUMERATION_POINTS], forbidden: [0; MAX_ENUMERATION_POINTS], required }
    }

    fn matches_seed(&self, picks: &[(usize, usize)], seed: usize) -> bool {
        let s = GromovStructure::from_index_pairs(picks).expect("valid picks");
        let decomposition = chain_decomposition(&s);
        let longest = decomposition.components().iter().map(|c| c.nodes.len()).max().unwrap_or(0);
        longest == seed
    }

    /// Fixes node `a` to pair `p` if that violates nothing so far.
    fn place(&self, search: &Search, a: usize, p: u8) -> Option<Search> {
        if search.forbidden[a] & (1 << p) != 0 {
            return None;
        }
        let (b, c) = self.pairs[p as usize];
        let members: Mask = (1 << b) | (1 << c);
        if search.required[a] & !members != 0 {
            return None;
        }
        let mut next = *search;
        next.picks[a] = p;
        let masks = &self.forbid[a][p as usize];
        for x in 0..self.n {
            next.forbidden[x] |= masks[x];
        }
        for x in 0..a {
            if next.forbidden[x] & (1 << next.picks[x]) != 0 {
                return None;
            }
        }
        Some(next)
    }

    fn descend<F: FnMut(&Search)>(&self, search: &Search, a: usize, emit: &mut F) {
        if a == self.n {
            emit(search);
            return;
        }
        for &p in &self.options[a] {
            if let Some(next) = self.place(search, a, p) {
                self.descend(&next, a + 1, emit);
            }
        }
    }
}

/// Every allowable structure (full mode) or every chain-seeded
/// representative, in deterministic order.
pub fn enumerate_allowable(n: usize, mode: EnumerationMode) -> Result<Vec<GromovStructure>, UnsupportedN> {
    Ok(Enumerator::new(n, mode)?.collect())
}
