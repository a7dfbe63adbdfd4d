//! Canonical forms under relabeling, and the invariant keys used to bucket
//! structures before canonicalizing them.
//!
//! The canonical form is the lexicographically smallest serialization over
//! the whole orbit. In that minimum, labels first appear (reading owner, then
//! pair, token by token) in increasing order: swapping a late small label with
//! an earlier large one would shrink the first token where they differ. The
//! search therefore only ever hands out the next free label, branching on
//! which unlabeled node becomes the next owner and on the order in which the
//! two members of a fresh pair are labeled, and cuts any branch whose prefix
//! already exceeds the best serialization found.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::matrixrep::{invariants_of, RoleCounts, TypeLabel};
use crate::structure::{GromovStructure, Permutation, MAX_POINTS};

/// Hashable bundle of permutation invariants. Equal for equivalent
/// structures; inequivalent structures may share a key.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InvariantKey {
    pub n: usize,
    pub type_label: TypeLabel,
    pub roles: RoleCounts,
    pub removed_edges: usize,
    pub rank: usize,
    pub trace_powers: Vec<u64>,
    pub irreducible: bool,
}

pub fn invariant_key(s: &GromovStructure) -> InvariantKey {
    let inv = invariants_of(s);
    InvariantKey {
        n: s.n(),
        type_label: inv.type_label,
        roles: inv.roles,
        removed_edges: inv.removed_edges,
        rank: inv.rank,
        trace_powers: inv.trace_powers,
        irreducible: inv.irreducible,
    }
}

/// Packed canonical serialization: byte `a` (from the most significant end)
/// holds `(b << 4) | c` for the zero-based pick `{b, c}` of node `a`, so
/// integer order equals token order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode(u128);

impl CanonicalCode {
    pub fn raw(self) -> u128 {
        self.0
    }
}

fn pack(tokens: &[(u8, u8)]) -> CanonicalCode {
    let mut code = 0u128;
    for (a, &(b, c)) in tokens.iter().enumerate() {
        code |= (((b << 4) | c) as u128) << (8 * (15 - a));
    }
    CanonicalCode(code)
}

/// The orbit minimum and one permutation mapping the input onto it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub structure: GromovStructure,
    pub permutation: Permutation,
    pub code: CanonicalCode,
}

impl CanonicalForm {
    pub fn text(&self) -> alloc::string::String {
        self.structure.serialize()
    }
}

const FREE: u8 = u8::MAX;

struct Search<'a> {
    n: usize,
    picks: &'a [(u8, u8)],
    label: [u8; MAX_POINTS],
    owner: [u8; MAX_POINTS],
    next: usize,
    tokens: [(u8, u8); MAX_POINTS],
    best: Option<([(u8, u8); MAX_POINTS], [u8; MAX_POINTS])>,
}

impl Search<'_> {
    fn run(&mut self, k: usize) {
        if k == self.n {
            self.best = Some((self.tokens, self.label));
            return;
        }
        if (self.owner[k]) == FREE {
            debug_assert_eq!(self.next, k);
            for x in 0..self.n {
                if self.label[x] == FREE {
                    self.assign(x);
                    self.place_token(k);
                    self.unassign(x);
                }
            }
        } else {
            self.place_token(k);
        }
    }

    fn assign(&mut self, x: usize) {
        self.label[x] = self.next as u8;
        self.owner[self.next] = x as u8;
        self.next += 1;
    }

    fn unassign(&mut self, x: usize) {
        self.next -= 1;
        self.owner[self.next] = FREE;
        self.label[x] = FREE;
    }

    fn place_token(&mut self, k: usize) {
        let x = self.owner[k] as usize;
        let (b, c) = self.picks[x];
        let (b, c) = (b as usize, c as usize);
        match (self.label[b] == FREE, self.label[c] == FREE) {
            (false, false) => self.emit(k),
            (true, false) | (false, true) => {
                let fresh = if self.label[b] == FREE { b } else { c };
                self.assign(fresh);
                self.emit(k);
                self.unassign(fresh);
            }
            (true, true) => {
                for (first, second) in [(b, c), (c, b)] {
                    self.assign(first);
                    self.assign(second);
                    self.emit(k);
                    self.unassign(second);
                    self.unassign(first);
                }
            }
        }
    }

    /// Extends the prefix by token `k` unless it can no longer beat `best`.
    /// `best` may have changed since the caller's prefix was compared, so the
    /// whole prefix is compared again.
    fn emit(&mut self, k: usize) {
        let x = self.owner[k] as usize;
        let (b, c) = self.picks[x];
        let (lb, lc) = (self.label[b as usize], self.label[c as usize]);
        self.tokens[k] = if lb < lc { (lb, lc) } else { (lc, lb) };
        if let Some((best, _)) = &self.best {
            let order = self.tokens[..=k].cmp(&best[..=k]);
            if order == Ordering::Greater || (order == Ordering::Equal && k + 1 == self.n) {
                return;
            }
        }
        self.run(k + 1);
    }
}

pub fn canonical_form(s: &GromovStructure) -> CanonicalForm {
    let n = s.n();
    let picks: Vec<(u8, u8)> = (0..n)
        .map(|a| {
            let (b, c) = s.pick_indices(a);
            (b as u8, c as u8)
        })
        .collect();
    let (tokens, label) = canonical_tokens(&picks);
    let images: Vec<usize> = label[..n].iter().map(|&l| l as usize).collect();
    let pairs: Vec<(usize, usize)> = tokens[..n].iter().map(|&(b, c)| (b as usize, c as usize)).collect();
    CanonicalForm {
        structure: GromovStructure::from_index_pairs(&pairs).expect("relabeling preserves validity"),
        permutation: Permutation::from_indices(&images),
        code: pack(&tokens[..n]),
    }
}

/// Canonical code straight from zero-based picks, without building a structure.
pub fn canonical_code(picks: &[(usize, usize)]) -> CanonicalCode {
    let compact: Vec<(u8, u8)> = picks.iter().map(|&(b, c)| (b as u8, c as u8)).collect();
    let (tokens, _) = canonical_tokens(&compact);
    pack(&tokens[..picks.len()])
}

fn canonical_tokens(picks: &[(u8, u8)]) -> ([(u8, u8); MAX_POINTS], [u8; MAX_POINTS]) {
    let n = picks.len();
    assert!(n <= MAX_POINTS);
    let mut search = Search {
        n,
        picks,
        label: [FREE; MAX_POINTS],
        owner: [FREE; MAX_POINTS],
        next: 0,
        tokens: [(0, 0); MAX_POINTS],
        best: None,
    };
    search.run(0);
    search.best.expect("at least one labeling")
}

/// Decodes a code produced for `n` points.
pub fn decode(code: CanonicalCode, n: usize) -> GromovStructure {
    let pairs: Vec<(usize, usize)> = (0..n)
        .map(|a| {
            let byte = (code.0 >> (8 * (15 - a))) as u8;
            ((byte >> 4) as usize, (byte & 0xF) as usize)
        })
        .collect();
    GromovStructure::from_index_pairs(&pairs).expect("code encodes a valid structure")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeMismatch {
    pub left: usize,
    pub right: usize,
}

impl fmt::Display for SizeMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot compare structures on {} and {} points", self.left, self.right)
    }
}

impl core::error::Error for SizeMismatch {}

/// Δ-equivalence: same canonical form. Mismatched invariant keys short-circuit.
pub fn equivalent(s1: &GromovStructure, s2: &GromovStructure) -> Result<bool, SizeMismatch> {
    if s1.n() != s2.n() {
        return Err(SizeMismatch { left: s1.n(), right: s2.n() });
    }
    if invariant_key(s1) != invariant_key(s2) {
        return Ok(false);
    }
    Ok(canonical_form(s1).code == canonical_form(s2).code)
}

/// Smallest serialization over all `n!` relabelings, by exhaustive search.
/// Reference implementation for tests and small `n`.
pub fn brute_force_canonical(s: &GromovStructure) -> GromovStructure {
    let n = s.n();
    let mut images: Vec<usize> = (0..n).collect();
    let mut best = s.apply_permutation(&Permutation::from_indices(&images)).unwrap();
    // Heap's algorithm.
    let mut c = alloc::vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                images.swap(0, i);
            } else {
                images.swap(c[i], i);
            }
            let candidate = s.apply_permutation(&Permutation::from_indices(&images)).unwrap();
            if candidate < best {
                best = candidate;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}
