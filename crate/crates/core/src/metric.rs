//! Distances, Gromov products and the structures they induce.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use crate::rational::{format_rational, int, parse_rational, Rational};
use crate::structure::{GromovStructure, NodeId, Pair, Permutation, StructureError, MAX_POINTS, MIN_POINTS};

/// Dense slot numbering for the Gromov products `(i, {j, k})` of `n` points.
///
/// Slots run over nodes `i` ascending, then pairs `j < k` (both ≠ `i`) in
/// lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorLayout {
    n: usize,
    index: Vec<u16>,
    slots: Vec<(u8, u8, u8)>,
}

const NO_SLOT: u16 = u16::MAX;

impl TensorLayout {
    pub fn new(n: usize) -> Self {
        assert!((3..=MAX_POINTS).contains(&n), "unsupported point count {n}");
        let mut index = alloc::vec![NO_SLOT; n * n * n];
        let mut slots = Vec::with_capacity(n * (n - 1) * (n - 2) / 2);
        for i in 0..n {
            for j in 0..n {
                for k in j + 1..n {
                    if j == i || k == i {
                        continue;
                    }
                    let slot = slots.len() as u16;
                    index[(i * n + j) * n + k] = slot;
                    index[(i * n + k) * n + j] = slot;
                    slots.push((i as u8, j as u8, k as u8));
                }
            }
        }
        TensorLayout { n, index, slots }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `n (n - 1) (n - 2) / 2`.
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Slot of the product at `i` over `{j, k}` (zero-based, all distinct).
    pub fn slot(&self, i: usize, j: usize, k: usize) -> usize {
        let s = self.index[(i * self.n + j) * self.n + k];
        debug_assert!(s != NO_SLOT, "({i}; {j}, {k}) is not a Gromov product slot");
        s as usize
    }

    /// `(i, j, k)` with `j < k` for a slot.
    pub fn triple(&self, slot: usize) -> (usize, usize, usize) {
        let (i, j, k) = self.slots[slot];
        (i as usize, j as usize, k as usize)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MetricError {
    Header { line: usize, message: String },
    Parse { line: usize, column: usize, token: String },
    RowLength { line: usize, expected: usize, found: usize },
    MissingRows { expected: usize, found: usize },
    NonZeroDiagonal { node: usize },
    Asymmetric { row: usize, column: usize },
    NonPositive { row: usize, column: usize },
    TooFewPoints(usize),
    NotAMetric(TriangleViolation),
    NotDeltaGeneric { node: NodeId, tied: Vec<Pair> },
    Structure(StructureError),
}

impl fmt::Display for MetricError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricError::Header { line, message } => write!(f, "line {line}: {message}"),
            MetricError::Parse { line, column, token } => {
                write!(f, "line {line}, column {column}: cannot parse {token:?} as a rational")
            }
            MetricError::RowLength { line, expected, found } => {
                write!(f, "line {line}: expected {expected} entries, found {found}")
            }
            MetricError::MissingRows { expected, found } => write!(f, "expected {expected} rows, found {found}"),
            MetricError::NonZeroDiagonal { node } => write!(f, "d({node},{node}) is not zero"),
            MetricError::Asymmetric { row, column } => write!(f, "d({row},{column}) != d({column},{row})"),
            MetricError::NonPositive { row, column } => write!(f, "d({row},{column}) is not positive"),
            MetricError::TooFewPoints(n) => write!(f, "{n} points is too few for a Gromov product structure"),
            MetricError::NotAMetric(v) => write!(f, "not a metric: {v}"),
            MetricError::NotDeltaGeneric { node, tied } => {
                write!(f, "not delta-generic: minimum at node {node} attained by")?;
                for p in tied {
                    write!(f, " {p}")?;
                }
                Ok(())
            }
            MetricError::Structure(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for MetricError {}

impl From<StructureError> for MetricError {
    fn from(e: StructureError) -> Self {
        MetricError::Structure(e)
    }
}

/// A triangle `(node; pair)` whose Gromov product is negative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleViolation {
    pub node: NodeId,
    pub pair: Pair,
    pub value: Rational,
}

impl fmt::Display for TriangleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gromov product at {} over {} is {}", self.node, self.pair, format_rational(&self.value))
    }
}

/// Symmetric matrix of exact positive distances with zero diagonal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<Rational>,
}

impl DistanceMatrix {
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, MetricError> {
        let n = rows.len();
        if n > MAX_POINTS {
            return Err(MetricError::Structure(StructureError::TooManyPoints(n)));
        }
        let mut d = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(MetricError::RowLength { line: i + 1, expected: n, found: row.len() });
            }
            d.extend(row);
        }
        let m = DistanceMatrix { n, d };
        m.validate()?;
        Ok(m)
    }

    pub fn from_integers(rows: &[&[i64]]) -> Result<Self, MetricError> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
    }

    /// Builds the matrix from a function on zero-based pairs `i < j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Result<Self, MetricError> {
        let mut d = alloc::vec![Rational::zero(); n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                d[i * n + j] = v.clone();
                d[j * n + i] = v;
            }
        }
        let m = DistanceMatrix { n, d };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<(), MetricError> {
        let n = self.n;
        for i in 0..n {
            if !self.d[i * n + i].is_zero() {
                return Err(MetricError::NonZeroDiagonal { node: i + 1 });
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                if self.d[i * n + j] != self.d[j * n + i] {
                    return Err(MetricError::Asymmetric { row: i + 1, column: j + 1 });
                }
                if !self.d[i * n + j].is_positive() {
                    return Err(MetricError::NonPositive { row: i + 1, column: j + 1 });
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Distance between zero-based points.
    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.d[i * self.n + j]
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        assert!(factor.is_positive(), "scale factor must be positive");
        DistanceMatrix { n: self.n, d: self.d.iter().map(|v| v * factor).collect() }
    }

    /// Relabels point `i` as `p(i)`.
    pub fn permuted(&self, p: &Permutation) -> Self {
        assert_eq!(p.len(), self.n);
        let n = self.n;
        let mut d = self.d.clone();
        for i in 0..n {
            for j in 0..n {
                d[p.image_index(i) * n + p.image_index(j)] = self.d[i * n + j].clone();
            }
        }
        DistanceMatrix { n, d }
    }

    /// Parses the plain-text format: first line `n`, then `n` rows of `n`
    /// whitespace-separated rationals or decimals. Blank lines and `#`
    /// comments are skipped.
    pub fn from_text(text: &str) -> Result<Self, MetricError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (header_line, header) =
            lines.next().ok_or(MetricError::Header { line: 1, message: "missing point count".to_string() })?;
        let n: usize = header.parse().map_err(|_| MetricError::Header {
            line: header_line,
            message: alloc::format!("expected a point count, found {header:?}"),
        })?;
        if n > MAX_POINTS {
            return Err(MetricError::Structure(StructureError::TooManyPoints(n)));
        }
        let mut rows = Vec::with_capacity(n);
        for (line, content) in lines {
            if rows.len() == n {
                return Err(MetricError::RowLength { line, expected: 0, found: content.split_whitespace().count() });
            }
            let row = content
                .split_whitespace()
                .enumerate()
                .map(|(c, tok)| {
                    parse_rational(tok).ok_or_else(|| MetricError::Parse { line, column: c + 1, token: tok.to_string() })
                })
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != n {
                return Err(MetricError::RowLength { line, expected: n, found: row.len() });
            }
            rows.push(row);
        }
        if rows.len() != n {
            return Err(MetricError::MissingRows { expected: n, found: rows.len() });
        }
        Self::from_rows(rows)
    }

    pub fn to_text(&self) -> String {
        let mut out = alloc::format!("{}\n", self.n);
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| format_rational(self.get(i, j))).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// First negative Gromov product, if any.
    pub fn check_metric(&self) -> Result<(), TriangleViolation> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                for k in j + 1..n {
                    if i == j || i == k {
                        continue;
                    }
                    let v = gromov_product(self, i, j, k);
                    if v.is_negative() {
                        return Err(TriangleViolation { node: NodeId::from_index(i), pair: Pair::from_indices(j, k), value: v });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_metric(&self) -> bool {
        self.check_metric().is_ok()
    }
}

fn gromov_product(d: &DistanceMatrix, i: usize, j: usize, k: usize) -> Rational {
    (d.get(i, j) + d.get(i, k) - d.get(j, k)) / int(2)
}

/// All Gromov products of a point set, one exact value per slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GromovTensor {
    layout: TensorLayout,
    values: Vec<Rational>,
}

impl GromovTensor {
    pub fn from_values(layout: TensorLayout, values: Vec<Rational>) -> Self {
        assert_eq!(layout.len(), values.len());
        GromovTensor { layout, values }
    }

    pub fn n(&self) -> usize {
        self.layout.n()
    }

    pub fn layout(&self) -> &TensorLayout {
        &self.layout
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Product at zero-based `i` over `{j, k}`.
    pub fn get(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.values[self.layout.slot(i, j, k)]
    }

    pub fn at(&self, node: NodeId, pair: Pair) -> &Rational {
        let (j, k) = pair.indices();
        self.get(node.index(), j, k)
    }

    pub fn get_mut(&mut self, i: usize, j: usize, k: usize) -> &mut Rational {
        let slot = self.layout.slot(i, j, k);
        &mut self.values[slot]
    }

    /// Distance recovered as `Δ(i,{j,k}) + Δ(j,{i,k})` with `k` the
    /// smallest index outside `{i, j}`.
    pub fn distance(&self, i: usize, j: usize) -> Rational {
        let k = (0..self.n()).find(|&k| k != i && k != j).expect("n >= 3");
        self.get(i, j, k) + self.get(j, i, k)
    }

    /// Distances recovered from the products. Fails if some recovered
    /// distance is not positive.
    pub fn to_distances(&self) -> Result<DistanceMatrix, MetricError> {
        DistanceMatrix::from_fn(self.n(), |i, j| self.distance(i, j))
    }

    /// Minimal products at `i` and the pairs attaining them.
    fn minima(&self, i: usize) -> (Rational, Vec<Pair>) {
        let n = self.n();
        let mut best: Option<Rational> = None;
        let mut tied = Vec::new();
        for j in 0..n {
            for k in j + 1..n {
                if j == i || k == i {
                    continue;
                }
                let v = self.get(i, j, k);
                match best.as_ref().map(|b| v.cmp(b)) {
                    None | Some(core::cmp::Ordering::Less) => {
                        best = Some(v.clone());
                        tied.clear();
                        tied.push(Pair::from_indices(j, k));
                    }
                    Some(core::cmp::Ordering::Equal) => tied.push(Pair::from_indices(j, k)),
                    Some(core::cmp::Ordering::Greater) => {}
                }
            }
        }
        (best.expect("n >= 3"), tied)
    }

    /// The structure picking, at every node, its unique minimal product.
    pub fn structure(&self) -> Result<GromovStructure, MetricError> {
        let n = self.n();
        if n < MIN_POINTS {
            return Err(MetricError::TooFewPoints(n));
        }
        let mut picks = Vec::with_capacity(n);
        for i in 0..n {
            let (_, tied) = self.minima(i);
            if tied.len() > 1 {
                return Err(MetricError::NotDeltaGeneric { node: NodeId::from_index(i), tied });
            }
            picks.push(tied[0].indices());
        }
        Ok(GromovStructure::from_index_pairs(&picks)?)
    }

    /// Checks the four-term relations between products at different nodes
    /// for every ordered quadruple of distinct nodes, and that
    /// `Δ(i,{j,k}) + Δ(j,{i,k})` does not depend on `k`.
    pub fn verify_identities(&self) -> Result<(), IdentityViolation> {
        let n = self.n();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for i in 0..n {
                        if a == b || a == c || a == i || b == c || b == i || c == i {
                            continue;
                        }
                        self.check_four_term(Relation::First, [a, b, c, i])?;
                        self.check_four_term(Relation::Second, [a, b, c, i])?;
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let d = self.distance(i, j);
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    if self.get(i, j, k) + self.get(j, i, k) != d {
                        return Err(IdentityViolation::Distance {
                            pair: Pair::from_indices(i, j),
                            witness: NodeId::from_index(k),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn check_four_term(&self, relation: Relation, [a, b, c, i]: [usize; 4]) -> Result<(), IdentityViolation> {
        // Each difference is `Δ(x,{y,z}) - Δ(x,{u,v})`, written as two (node, j, k) triples.
        let terms: [[(usize, usize, usize); 2]; 4] = match relation {
            Relation::First => [
                [(a, b, i), (a, b, c)],
                [(c, b, i), (c, a, i)],
                [(i, a, c), (i, b, c)],
                [(b, a, c), (b, a, i)],
            ],
            Relation::Second => [
                [(a, c, i), (a, b, c)],
                [(b, c, i), (b, a, i)],
                [(i, a, b), (i, b, c)],
                [(c, a, b), (c, a, i)],
            ],
        };
        let diff = |t: &[(usize, usize, usize); 2]| self.get(t[0].0, t[0].1, t[0].2) - self.get(t[1].0, t[1].1, t[1].2);
        let first = diff(&terms[0]);
        for (pos, t) in terms.iter().enumerate().skip(1) {
            if diff(t) != first {
                let to_term = |&(x, y, z): &(usize, usize, usize)| (NodeId::from_index(x), Pair::from_indices(y, z));
                return Err(IdentityViolation::FourTerm {
                    relation,
                    nodes: [a, b, c, i].map(NodeId::from_index),
                    lhs: terms[0].each_ref().map(to_term),
                    rhs: t.each_ref().map(to_term),
                    position: pos,
                });
            }
        }
        Ok(())
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        GromovTensor { layout: self.layout.clone(), values: self.values.iter().map(|v| v * factor).collect() }
    }
}

/// Which of the two four-term relations failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `Δabi − Δabc = Δcbi − Δcai = Δiac − Δibc = Δbac − Δbai`
    First,
    /// `Δaci − Δabc = Δbci − Δbai = Δiab − Δibc = Δcab − Δcai`
    Second,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IdentityViolation {
    FourTerm {
        relation: Relation,
        nodes: [NodeId; 4],
        lhs: [(NodeId, Pair); 2],
        rhs: [(NodeId, Pair); 2],
        position: usize,
    },
    Distance { pair: Pair, witness: NodeId },
}

impl IdentityViolation {
    /// The Gromov products involved in the failed equality.
    pub fn terms(&self) -> Vec<(NodeId, Pair)> {
        match self {
            IdentityViolation::FourTerm { lhs, rhs, .. } => lhs.iter().chain(rhs.iter()).copied().collect(),
            IdentityViolation::Distance { pair, witness } => {
                let (i, j) = (pair.lo(), pair.hi());
                let mut v = alloc::vec![
                    (i, Pair::new(j, *witness).unwrap()),
                    (j, Pair::new(i, *witness).unwrap()),
                ];
                // The reference witness is the smallest index outside the pair.
                let n0 = (1..).map(|v| NodeId::new(v).unwrap()).find(|k| !pair.contains(*k)).unwrap();
                v.push((i, Pair::new(j, n0).unwrap()));
                v.push((j, Pair::new(i, n0).unwrap()));
                v
            }
        }
    }
}

impl fmt::Display for IdentityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdentityViolation::FourTerm { relation, nodes, lhs, rhs, .. } => write!(
                f,
                "{:?} relation fails for (a,b,c,i) = ({},{},{},{}): Δ{}{} - Δ{}{} differs from Δ{}{} - Δ{}{}",
                relation, nodes[0], nodes[1], nodes[2], nodes[3],
                lhs[0].0, lhs[0].1, lhs[1].0, lhs[1].1, rhs[0].0, rhs[0].1, rhs[1].0, rhs[1].1
            ),
            IdentityViolation::Distance { pair, witness } => {
                write!(f, "distance {pair} recovered through node {witness} is inconsistent")
            }
        }
    }
}

pub fn gromov_products(d: &DistanceMatrix) -> GromovTensor {
    let layout = TensorLayout::new(d.n());
    let values = (0..layout.len())
        .map(|s| {
            let (i, j, k) = layout.triple(s);
            gromov_product(d, i, j, k)
        })
        .collect();
    GromovTensor { layout, values }
}

/// The Gromov product structure of a Δ-generic metric. Ties are exact.
pub fn structure_of_metric(d: &DistanceMatrix) -> Result<GromovStructure, MetricError> {
    if d.n() < MIN_POINTS {
        return Err(MetricError::TooFewPoints(d.n()));
    }
    d.check_metric().map_err(MetricError::NotAMetric)?;
    gromov_products(d).structure()
}

pub fn verify_gromov_identities(t: &GromovTensor) -> Result<(), IdentityViolation> {
    t.verify_identities()
}

/// Complete graph after the pendant-free reduction: every weight lowered by
/// the minimal products at both ends, and picked edges removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedGraph {
    n: usize,
    weights: Vec<Option<Rational>>,
    minimal_products: Vec<Rational>,
}

impl WeightedGraph {
    fn edge_index(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        a * self.n + b
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Weight of a surviving edge; `None` for removed edges.
    pub fn weight(&self, i: usize, j: usize) -> Option<&Rational> {
        self.weights[self.edge_index(i, j)].as_ref()
    }

    pub fn is_present(&self, i: usize, j: usize) -> bool {
        self.weight(i, j).is_some()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Pair, &Rational)> + '_ {
        (0..self.n).flat_map(move |i| {
            (i + 1..self.n).filter_map(move |j| self.weight(i, j).map(|w| (Pair::from_indices(i, j), w)))
        })
    }

    pub fn removed_edges(&self) -> Vec<Pair> {
        (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
            .filter(|&(i, j)| !self.is_present(i, j))
            .map(|(i, j)| Pair::from_indices(i, j))
            .collect()
    }

    /// Minimal Gromov product at zero-based node `i` in the original metric.
    pub fn minimal_product(&self, i: usize) -> &Rational {
        &self.minimal_products[i]
    }
}

pub fn pendant_free_reduction(d: &DistanceMatrix) -> Result<WeightedGraph, MetricError> {
    let s = structure_of_metric(d)?;
    let t = gromov_products(d);
    let n = d.n();
    let minimal_products: Vec<Rational> = (0..n)
        .map(|a| {
            let (b, c) = s.pick_indices(a);
            t.get(a, b, c).clone()
        })
        .collect();
    let mut weights = alloc::vec![None; n * n];
    for i in 0..n {
        for j in i + 1..n {
            weights[i * n + j] = Some(d.get(i, j) - &minimal_products[i] - &minimal_products[j]);
        }
    }
    for pair in s.picks() {
        let (b, c) = pair.indices();
        weights[b * n + c] = None;
    }
    Ok(WeightedGraph { n, weights, minimal_products })
}
