//! The 0/1 matrix of a structure and the permutation invariants read off it.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::structure::{GromovStructure, NodeId};

/// `g[i][j] = 1` iff node `j` belongs to the pair picked by node `i`;
/// `h` keeps the entries with `g[i][j] = g[j][i] = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StructureMatrix {
    n: usize,
    g: Vec<u8>,
    h: Vec<u8>,
}

impl StructureMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn g(&self, i: usize, j: usize) -> u8 {
        self.g[i * self.n + j]
    }

    pub fn h(&self, i: usize, j: usize) -> u8 {
        self.h[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        self.g.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn row_sums(&self) -> Vec<u32> {
        self.g.chunks(self.n).map(|r| r.iter().map(|&v| v as u32).sum()).collect()
    }

    /// Column sums of `h`: the mutual-selection degree of every node.
    pub fn h_degrees(&self) -> Vec<u32> {
        (0..self.n).map(|j| (0..self.n).map(|i| self.h(i, j) as u32).sum()).collect()
    }

    /// `tr(g^k)` for `k = 2..=n`.
    pub fn trace_powers(&self) -> Vec<u64> {
        let n = self.n;
        let base: Vec<u64> = self.g.iter().map(|&v| v as u64).collect();
        let mut power = base.clone();
        let mut out = Vec::with_capacity(n.saturating_sub(1));
        for _ in 2..=n {
            power = mat_mul(&power, &base, n);
            out.push((0..n).map(|i| power[i * n + i]).sum());
        }
        out
    }

    /// Rank over the rationals, by fraction-free elimination.
    pub fn rank(&self) -> usize {
        let n = self.n;
        let mut m: Vec<i128> = self.g.iter().map(|&v| v as i128).collect();
        let mut rank = 0;
        let mut prev = 1i128;
        for col in 0..n {
            let Some(pivot) = (rank..n).find(|&r| m[r * n + col] != 0) else { continue };
            if pivot != rank {
                for c in 0..n {
                    m.swap(pivot * n + c, rank * n + c);
                }
            }
            let p = m[rank * n + col];
            for r in rank + 1..n {
                let f = m[r * n + col];
                for c in 0..n {
                    m[r * n + c] = (p * m[r * n + c] - f * m[rank * n + c]) / prev;
                }
            }
            prev = p;
            rank += 1;
        }
        rank
    }

    /// Irreducibility from `Σ_{i=0..n} g^i`, with the count of columns of
    /// that sum having no zero entry.
    pub fn irreducibility(&self) -> Irreducibility {
        let n = self.n;
        // Only the zero pattern matters, so accumulate reachability in booleans.
        let step: Vec<bool> = self.g.iter().map(|&v| v != 0).collect();
        let mut reach: Vec<bool> = (0..n * n).map(|k| k / n == k % n).collect();
        let mut power = reach.clone();
        for _ in 1..=n {
            power = bool_mul(&power, &step, n);
            for (r, p) in reach.iter_mut().zip(&power) {
                *r |= *p;
            }
        }
        let full_columns = (0..n).filter(|&j| (0..n).all(|i| reach[i * n + j])).count();
        Irreducibility { irreducible: reach.iter().all(|&v| v), full_columns }
    }
}

fn mat_mul(a: &[u64], b: &[u64], n: usize) -> Vec<u64> {
    let mut out = alloc::vec![0u64; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

fn bool_mul(a: &[bool], b: &[bool], n: usize) -> Vec<bool> {
    let mut out = alloc::vec![false; n * n];
    for i in 0..n {
        for k in 0..n {
            if a[i * n + k] {
                for j in 0..n {
                    out[i * n + j] |= b[k * n + j];
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Irreducibility {
    pub irreducible: bool,
    /// Columns of `Σ g^i` without zero entries.
    pub full_columns: usize,
}

pub fn structure_matrix(s: &GromovStructure) -> StructureMatrix {
    let n = s.n();
    let mut g = alloc::vec![0u8; n * n];
    for a in 0..n {
        let (b, c) = s.pick_indices(a);
        g[a * n + b] = 1;
        g[a * n + c] = 1;
    }
    let mut h = alloc::vec![0u8; n * n];
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] = g[i * n + j] & g[j * n + i];
        }
    }
    StructureMatrix { n, g, h }
}

pub fn is_irreducible(m: &StructureMatrix) -> Irreducibility {
    m.irreducibility()
}

/// Whether the pick digraph `a -> picks(a)` is strongly connected.
pub fn is_strongly_connected(s: &GromovStructure) -> bool {
    let n = s.n();
    let reach_all = |forward: bool| {
        let mut seen = alloc::vec![false; n];
        let mut stack = alloc::vec![0usize];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for y in 0..n {
                let (b, c) = if forward { s.pick_indices(x) } else { s.pick_indices(y) };
                let edge = if forward { y == b || y == c } else { x == b || x == c };
                if edge && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.into_iter().all(|v| v)
    };
    reach_all(true) && reach_all(false)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ComponentKind {
    Cycle,
    Chain,
}

/// A connected component of the mutual-selection graph, nodes in path order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Component {
    pub kind: ComponentKind,
    pub nodes: Vec<NodeId>,
}

/// Node counts by mutual-selection degree 0, 1 and 2.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RoleCounts {
    pub isolated: usize,
    pub end: usize,
    pub interior: usize,
}

impl fmt::Display for RoleCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.isolated, self.end, self.interior)
    }
}

/// Component lengths and kinds, comparable with printed labels such as
/// `"4+1+1 (Cycle)"`, `"6+0 (Chain)"` or `"1×7"`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeLabel {
    /// Sorted by length descending, cycles before chains.
    parts: Vec<(usize, ComponentKind)>,
}

impl TypeLabel {
    pub fn lengths(&self) -> Vec<usize> {
        self.parts.iter().map(|p| p.0).collect()
    }

    pub fn has_cycle(&self) -> bool {
        self.parts.iter().any(|p| p.1 == ComponentKind::Cycle)
    }

    /// Matches a printed label: the multiset of lengths must agree, and an
    /// explicit `(Cycle)` / `(Chain)` suffix must agree with the kind of the
    /// longest component.
    pub fn matches(&self, printed: &str) -> bool {
        let Some((lengths, kind)) = parse_printed_label(printed) else { return false };
        if lengths != self.lengths() {
            return false;
        }
        match kind {
            Some(k) => self.parts.first().map(|p| p.1) == Some(k),
            None => true,
        }
    }
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (len, _)) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            write!(f, "{len}")?;
        }
        match self.parts.first() {
            Some((_, ComponentKind::Cycle)) => f.write_str(" (Cycle)"),
            Some((len, ComponentKind::Chain)) if *len >= 4 => f.write_str(" (Chain)"),
            _ => Ok(()),
        }
    }
}

/// Splits `"5+1 (Chain)"`, `"6+0 (Cycle)"`, `"2+1×5"` or `"1x7"` into sorted
/// lengths (zeros dropped) and an optional kind.
pub fn parse_printed_label(printed: &str) -> Option<(Vec<usize>, Option<ComponentKind>)> {
    let printed = printed.trim();
    let (body, kind) = match printed.find('(') {
        Some(pos) => {
            let tag = printed[pos..].trim_matches(|c| c == '(' || c == ')' || c == ' ').to_ascii_lowercase();
            let kind = match tag.as_str() {
                "cycle" => ComponentKind::Cycle,
                "chain" => ComponentKind::Chain,
                _ => return None,
            };
            (printed[..pos].trim(), Some(kind))
        }
        None => (printed, None),
    };
    let mut lengths = Vec::new();
    for term in body.split('+') {
        let term = term.trim();
        let (len, times) = match term.split_once(['×', 'x', '*']) {
            Some((l, t)) => (l.trim().parse::<usize>().ok()?, t.trim().parse::<usize>().ok()?),
            None => (term.parse::<usize>().ok()?, 1),
        };
        if len > 0 {
            lengths.extend(core::iter::repeat_n(len, times));
        }
    }
    lengths.sort_unstable_by(|a, b| b.cmp(a));
    Some((lengths, kind))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChainDecomposition {
    components: Vec<Component>,
    roles: RoleCounts,
}

impl ChainDecomposition {
    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn roles(&self) -> RoleCounts {
        self.roles
    }

    pub fn type_label(&self) -> TypeLabel {
        let mut parts: Vec<(usize, ComponentKind)> =
            self.components.iter().map(|c| (c.nodes.len(), c.kind)).collect();
        parts.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        TypeLabel { parts }
    }

    /// One line per component in the `∘—•—•—∘` style: filled dots are the
    /// component's nodes, hollow ends show the outer element of the end
    /// nodes' picks.
    pub fn diagram(&self, s: &GromovStructure) -> String {
        let mut out = String::new();
        for c in &self.components {
            let first = c.nodes[0];
            let last = *c.nodes.last().unwrap();
            let outer = |node: NodeId, inner: Option<NodeId>| {
                let p = s.pick(node);
                match inner {
                    Some(i) => p.other(i).unwrap_or(p.lo()),
                    None => p.lo(),
                }
            };
            let (left, right) = match (c.kind, c.nodes.len()) {
                (ComponentKind::Cycle, _) => (last, first),
                (_, 1) => (s.pick(first).lo(), s.pick(first).hi()),
                _ => (outer(first, Some(c.nodes[1])), outer(last, Some(c.nodes[c.nodes.len() - 2]))),
            };
            out.push_str(&alloc::format!("{left}∘"));
            for node in &c.nodes {
                out.push_str(&alloc::format!("—•{node}"));
            }
            out.push_str(&alloc::format!("—∘{right}"));
            if c.kind == ComponentKind::Cycle {
                out.push_str("  (cycle)");
            }
            out.push('\n');
        }
        out
    }
}

pub fn chain_decomposition(s: &GromovStructure) -> ChainDecomposition {
    let n = s.n();
    let picks_contains = |a: usize, b: usize| {
        let (x, y) = s.pick_indices(a);
        x == b || y == b
    };
    let mut adj: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
    for a in 0..n {
        for b in a + 1..n {
            if picks_contains(a, b) && picks_contains(b, a) {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }
    let mut roles = RoleCounts::default();
    for neighbours in &adj {
        match neighbours.len() {
            0 => roles.isolated += 1,
            1 => roles.end += 1,
            _ => roles.interior += 1,
        }
    }
    let mut seen = alloc::vec![false; n];
    let mut components = Vec::new();
    // Chains first, walked from their smaller end; every remaining node lies on a cycle.
    for start in 0..n {
        if seen[start] || adj[start].len() > 1 {
            continue;
        }
        components.push(Component { kind: ComponentKind::Chain, nodes: walk(&adj, start, &mut seen) });
    }
    for start in 0..n {
        if !seen[start] {
            components.push(Component { kind: ComponentKind::Cycle, nodes: walk(&adj, start, &mut seen) });
        }
    }
    components.sort_by(|a, b| b.nodes.len().cmp(&a.nodes.len()).then(a.kind.cmp(&b.kind)).then(a.nodes.cmp(&b.nodes)));
    ChainDecomposition { components, roles }
}

fn walk(adj: &[Vec<usize>], start: usize, seen: &mut [bool]) -> Vec<NodeId> {
    let mut nodes = alloc::vec![NodeId::from_index(start)];
    seen[start] = true;
    let mut current = start;
    loop {
        let next = adj[current].iter().copied().filter(|&y| !seen[y]).min();
        match next {
            Some(y) => {
                seen[y] = true;
                nodes.push(NodeId::from_index(y));
                current = y;
            }
            None => return nodes,
        }
    }
}

/// A proper subset closed under the pick map, with its restricted structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedSubset {
    /// Original labels, ascending; position `k` is relabeled `k + 1`.
    pub nodes: Vec<NodeId>,
    /// `None` when the subset is too small to carry a structure.
    pub restriction: Option<GromovStructure>,
}

/// All proper nonempty subsets `T` with `picks(a) ⊆ T` for every `a ∈ T`,
/// ordered by size, then by node set.
pub fn closed_subsets(s: &GromovStructure) -> Vec<ClosedSubset> {
    let n = s.n();
    let pick_mask: Vec<u32> = (0..n)
        .map(|a| {
            let (b, c) = s.pick_indices(a);
            (1u32 << b) | (1u32 << c)
        })
        .collect();
    let full = (1u32 << n) - 1;
    let mut masks: Vec<u32> = (1..full)
        .filter(|&t| (0..n).filter(|&a| t & (1 << a) != 0).all(|a| pick_mask[a] & !t == 0))
        .collect();
    masks.sort_by_key(|&t| (t.count_ones(), core::cmp::Reverse(t.reverse_bits())));
    masks
        .into_iter()
        .map(|t| {
            let members: Vec<usize> = (0..n).filter(|&a| t & (1 << a) != 0).collect();
            let position = |x: usize| members.iter().position(|&m| m == x).unwrap();
            let pairs: Vec<(usize, usize)> = members
                .iter()
                .map(|&a| {
                    let (b, c) = s.pick_indices(a);
                    (position(b), position(c))
                })
                .collect();
            ClosedSubset {
                nodes: members.iter().map(|&a| NodeId::from_index(a)).collect(),
                restriction: GromovStructure::from_index_pairs(&pairs).ok(),
            }
        })
        .collect()
}

/// Permutation-invariant data of a structure.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InvariantVector {
    pub trace_powers: Vec<u64>,
    pub rank: usize,
    /// Distinct pairs in the image of the pick map.
    pub removed_edges: usize,
    pub irreducible: bool,
    pub full_columns: usize,
    pub roles: RoleCounts,
    pub type_label: TypeLabel,
}

pub fn invariants(m: &StructureMatrix, s: &GromovStructure) -> InvariantVector {
    let irr = m.irreducibility();
    let chains = chain_decomposition(s);
    InvariantVector {
        trace_powers: m.trace_powers(),
        rank: m.rank(),
        removed_edges: s.image().len(),
        irreducible: irr.irreducible,
        full_columns: irr.full_columns,
        roles: chains.roles(),
        type_label: chains.type_label(),
    }
}

pub fn invariants_of(s: &GromovStructure) -> InvariantVector {
    invariants(&structure_matrix(s), s)
}
