//! Gromov product structures: the map sending every point to the pair of
//! points that realizes its minimal Gromov product.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

/// Largest point count accepted by any structure operation.
pub const MAX_POINTS: usize = 16;

/// Smallest point count for which a structure exists.
pub const MIN_POINTS: usize = 4;

/// A point label, `1..=n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u8);

impl NodeId {
    pub fn new(value: usize) -> Option<Self> {
        (1..=MAX_POINTS).contains(&value).then(|| NodeId(value as u8))
    }

    /// Builds the label of the zero-based position `index`.
    pub fn from_index(index: usize) -> Self {
        debug_assert!(index < MAX_POINTS);
        NodeId(index as u8 + 1)
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }

    /// Zero-based position of the node.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An unordered pair of distinct nodes, stored with the smaller label first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pair {
    lo: NodeId,
    hi: NodeId,
}

impl Pair {
    pub fn new(a: NodeId, b: NodeId) -> Option<Self> {
        match a.cmp(&b) {
            core::cmp::Ordering::Less => Some(Pair { lo: a, hi: b }),
            core::cmp::Ordering::Greater => Some(Pair { lo: b, hi: a }),
            core::cmp::Ordering::Equal => None,
        }
    }

    /// Pair from zero-based indices. Panics if they coincide.
    pub fn from_indices(a: usize, b: usize) -> Self {
        Pair::new(NodeId::from_index(a), NodeId::from_index(b)).expect("distinct indices")
    }

    pub fn lo(self) -> NodeId {
        self.lo
    }

    pub fn hi(self) -> NodeId {
        self.hi
    }

    pub fn indices(self) -> (usize, usize) {
        (self.lo.index(), self.hi.index())
    }

    pub fn contains(self, node: NodeId) -> bool {
        self.lo == node || self.hi == node
    }

    /// The element that is not `node`, if `node` belongs to the pair.
    pub fn other(self, node: NodeId) -> Option<NodeId> {
        if self.lo == node {
            Some(self.hi)
        } else if self.hi == node {
            Some(self.lo)
        } else {
            None
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.lo, self.hi)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StructureError {
    TooFewPoints(usize),
    TooManyPoints(usize),
    IndexOutOfRange { node: usize, value: usize },
    DuplicateNode(NodeId),
    MissingNode(NodeId),
    PairContainsOwner(NodeId),
    DegeneratePair(NodeId),
    LengthMismatch { expected: usize, found: usize },
    MalformedToken(String),
    WrongTokenCount { expected: usize, found: usize },
}

impl fmt::Display for StructureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructureError::TooFewPoints(n) => write!(f, "{n} points is below the minimum of {MIN_POINTS}"),
            StructureError::TooManyPoints(n) => write!(f, "{n} points exceeds the maximum of {MAX_POINTS}"),
            StructureError::IndexOutOfRange { node, value } => {
                write!(f, "index {value} out of range at node {node}")
            }
            StructureError::DuplicateNode(a) => write!(f, "node {a} picks more than one pair"),
            StructureError::MissingNode(a) => write!(f, "node {a} has no pick"),
            StructureError::PairContainsOwner(a) => write!(f, "node {a} picks a pair containing itself"),
            StructureError::DegeneratePair(a) => write!(f, "node {a} picks a pair with a repeated element"),
            StructureError::LengthMismatch { expected, found } => {
                write!(f, "expected length {expected}, found {found}")
            }
            StructureError::MalformedToken(t) => write!(f, "malformed token {t:?}"),
            StructureError::WrongTokenCount { expected, found } => {
                write!(f, "expected {expected} tokens, found {found}")
            }
        }
    }
}

impl core::error::Error for StructureError {}

/// A validated Gromov product structure on `n` points.
///
/// `pick(a)` is the unordered pair `{b, c}` at which the Gromov product at `a`
/// is minimal. Pairs never contain their owner.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GromovStructure {
    picks: Vec<Pair>,
}

fn check_point_count(n: usize) -> Result<(), StructureError> {
    if n < MIN_POINTS {
        Err(StructureError::TooFewPoints(n))
    } else if n > MAX_POINTS {
        Err(StructureError::TooManyPoints(n))
    } else {
        Ok(())
    }
}

impl GromovStructure {
    /// Validates `(owner, (b, c))` picks given with 1-based labels.
    pub fn new<I>(n: usize, picks: I) -> Result<Self, StructureError>
    where
        I: IntoIterator<Item = (usize, (usize, usize))>,
    {
        check_point_count(n)?;
        let mut slots: Vec<Option<Pair>> = alloc::vec![None; n];
        for (owner, (b, c)) in picks {
            if owner == 0 || owner > n {
                return Err(StructureError::IndexOutOfRange { node: owner, value: owner });
            }
            let a = NodeId::from_index(owner - 1);
            for v in [b, c] {
                if v == 0 || v > n {
                    return Err(StructureError::IndexOutOfRange { node: owner, value: v });
                }
            }
            if b == owner || c == owner {
                return Err(StructureError::PairContainsOwner(a));
            }
            let pair = Pair::new(NodeId::from_index(b - 1), NodeId::from_index(c - 1))
                .ok_or(StructureError::DegeneratePair(a))?;
            if slots[owner - 1].replace(pair).is_some() {
                return Err(StructureError::DuplicateNode(a));
            }
        }
        let picks = slots
            .into_iter()
            .enumerate()
            .map(|(i, p)| p.ok_or(StructureError::MissingNode(NodeId::from_index(i))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GromovStructure { picks })
    }

    /// Builds a structure from zero-based pick indices, one per node in order.
    pub fn from_index_pairs(pairs: &[(usize, usize)]) -> Result<Self, StructureError> {
        Self::new(pairs.len(), pairs.iter().enumerate().map(|(a, &(b, c))| (a + 1, (b + 1, c + 1))))
    }

    pub fn n(&self) -> usize {
        self.picks.len()
    }

    pub fn pick(&self, node: NodeId) -> Pair {
        self.picks[node.index()]
    }

    /// Zero-based indices of the pair picked by the zero-based node `a`.
    pub fn pick_indices(&self, a: usize) -> (usize, usize) {
        self.picks[a].indices()
    }

    pub fn picks(&self) -> &[Pair] {
        &self.picks
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.n()).map(NodeId::from_index)
    }

    /// Distinct pairs appearing as picks, sorted.
    pub fn image(&self) -> Vec<Pair> {
        let mut image = self.picks.clone();
        image.sort_unstable();
        image.dedup();
        image
    }

    /// Relabels node `a` as `p(a)`.
    pub fn apply_permutation(&self, p: &Permutation) -> Result<Self, StructureError> {
        if p.len() != self.n() {
            return Err(StructureError::LengthMismatch { expected: self.n(), found: p.len() });
        }
        let mut picks = self.picks.clone();
        for (a, pair) in self.picks.iter().enumerate() {
            let (b, c) = pair.indices();
            picks[p.image_index(a)] = Pair::from_indices(p.image_index(b), p.image_index(c));
        }
        Ok(GromovStructure { picks })
    }

    /// Compact `abc` notation for n ≤ 9, `a:b,c` tokens otherwise.
    pub fn serialize(&self) -> String {
        let mut out = String::with_capacity(4 * self.n());
        let compact = self.n() <= 9;
        for (a, pair) in self.picks.iter().enumerate() {
            if a > 0 {
                out.push_str(if compact { "," } else { " " });
            }
            if compact {
                out.push_str(&alloc::format!("{}{}{}", a + 1, pair.lo, pair.hi));
            } else {
                out.push_str(&alloc::format!("{}:{},{}", a + 1, pair.lo, pair.hi));
            }
        }
        out
    }

    /// Parses compact `abc` tokens separated by commas or whitespace, or
    /// long-form `a:b,c` tokens separated by whitespace or semicolons.
    pub fn parse(text: &str, n: usize) -> Result<Self, StructureError> {
        check_point_count(n)?;
        let mut picks = Vec::with_capacity(n);
        for chunk in text.split(|c: char| c.is_whitespace() || c == ';').filter(|s| !s.is_empty()) {
            if chunk.contains(':') {
                picks.push(parse_long_token(chunk)?);
            } else {
                for token in chunk.split(',').filter(|s| !s.is_empty()) {
                    if n > 9 {
                        return Err(StructureError::MalformedToken(token.to_string()));
                    }
                    picks.push(parse_compact_token(token)?);
                }
            }
        }
        if picks.len() != n {
            return Err(StructureError::WrongTokenCount { expected: n, found: picks.len() });
        }
        Self::new(n, picks)
    }
}

fn parse_compact_token(token: &str) -> Result<(usize, (usize, usize)), StructureError> {
    let bad = || StructureError::MalformedToken(token.to_string());
    let digits: Vec<usize> = token
        .chars()
        .map(|c| c.to_digit(10).map(|d| d as usize))
        .collect::<Option<_>>()
        .ok_or_else(bad)?;
    match digits[..] {
        [a, b, c] => Ok((a, (b, c))),
        _ => Err(bad()),
    }
}

fn parse_long_token(token: &str) -> Result<(usize, (usize, usize)), StructureError> {
    let bad = || StructureError::MalformedToken(token.to_string());
    let (owner, rest) = token.split_once(':').ok_or_else(bad)?;
    let (b, c) = rest.split_once(',').ok_or_else(bad)?;
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    Ok((num(owner)?, (num(b)?, num(c)?)))
}

impl fmt::Display for GromovStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

impl FromStr for GromovStructure {
    type Err = StructureError;

    /// Infers `n` from the number of tokens.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let count = s
            .split(|c: char| c.is_whitespace() || c == ';')
            .filter(|t| !t.is_empty())
            .map(|chunk| if chunk.contains(':') { 1 } else { chunk.split(',').filter(|t| !t.is_empty()).count() })
            .sum();
        Self::parse(s, count)
    }
}

/// A bijection on `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    /// `images[i]` is the 1-based image of node `i + 1`.
    pub fn new(images: &[usize]) -> Result<Self, StructureError> {
        let n = images.len();
        if n > MAX_POINTS {
            return Err(StructureError::TooManyPoints(n));
        }
        let mut seen = [false; MAX_POINTS];
        for (i, &v) in images.iter().enumerate() {
            if v == 0 || v > n {
                return Err(StructureError::IndexOutOfRange { node: i + 1, value: v });
            }
            if core::mem::replace(&mut seen[v - 1], true) {
                return Err(StructureError::DuplicateNode(NodeId::from_index(v - 1)));
            }
        }
        Ok(Permutation { images: images.iter().map(|&v| (v - 1) as u8).collect() })
    }

    /// From zero-based images. Panics if `images` is not a permutation.
    pub fn from_indices(images: &[usize]) -> Self {
        let one_based: Vec<usize> = images.iter().map(|&i| i + 1).collect();
        Self::new(&one_based).expect("valid permutation")
    }

    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n as u8).collect() }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, node: NodeId) -> NodeId {
        NodeId::from_index(self.image_index(node.index()))
    }

    pub fn image_index(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    /// 1-based images, in node order.
    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&v| v as usize + 1).collect()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = self.images.clone();
        for (i, &v) in self.images.iter().enumerate() {
            inv[v as usize] = i as u8;
        }
        Permutation { images: inv }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Self {
        assert_eq!(self.len(), other.len());
        Permutation { images: other.images.iter().map(|&v| self.images[v as usize]).collect() }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, v) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", v + 1)?;
        }
        f.write_str("]")
    }
}
