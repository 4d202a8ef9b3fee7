//! Integer and Klein-group flows over the canonical orientation.
//!
//! Every [`IntFlow`] is stored relative to the canonical orientation of the
//! graph it lives on (see [`crate::graph::Edge::tau`]). Reversing both
//! half-edges of an edge and negating its value describes the same flow, so a
//! single frame loses nothing.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use crate::error::{FlowError, ParseError};
use crate::graph::{EdgeId, End, SignedGraph, VertexId};
use crate::surgery::ContractionRecord;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntFlow {
    values: BTreeMap<EdgeId, i64>,
}

impl IntFlow {
    pub fn zero(g: &SignedGraph) -> IntFlow {
        IntFlow { values: g.edge_ids().map(|e| (e, 0)).collect() }
    }

    pub fn from_map(values: BTreeMap<EdgeId, i64>) -> IntFlow {
        IntFlow { values }
    }

    pub fn from_pairs(pairs: &[(usize, i64)]) -> IntFlow {
        IntFlow { values: pairs.iter().map(|&(e, v)| (EdgeId(e), v)).collect() }
    }

    pub fn get(&self, e: EdgeId) -> Option<i64> {
        self.values.get(&e).copied()
    }

    pub fn set(&mut self, e: EdgeId, value: i64) {
        self.values.insert(e, value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeId, i64)> + '_ {
        self.values.iter().map(|(&e, &v)| (e, v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> i64 {
        self.values.values().map(|v| v.abs()).max().unwrap_or(0)
    }

    /// Keeps only the listed edges.
    pub fn restricted(&self, keep: &BTreeSet<EdgeId>) -> IntFlow {
        IntFlow {
            values: self.values.iter().filter(|(e, _)| keep.contains(e)).map(|(&e, &v)| (e, v)).collect(),
        }
    }

    /// Extends with zeros so that every edge of `g` has a value.
    pub fn padded(&self, g: &SignedGraph) -> IntFlow {
        let mut values = self.values.clone();
        for e in g.edge_ids() {
            values.entry(e).or_insert(0);
        }
        IntFlow { values }
    }

    pub fn negated(&self) -> IntFlow {
        IntFlow { values: self.values.iter().map(|(&e, &v)| (e, -v)).collect() }
    }

    /// Merges flows on disjoint edge sets.
    pub fn union(parts: impl IntoIterator<Item = IntFlow>) -> IntFlow {
        let mut values = BTreeMap::new();
        for p in parts {
            values.extend(p.values);
        }
        IntFlow { values }
    }

    /// The key set must be exactly the edge set of `g`.
    pub fn check_domain(&self, g: &SignedGraph) -> Result<(), FlowError> {
        for e in g.edge_ids() {
            if !self.values.contains_key(&e) {
                return Err(FlowError::MissingEdge(e));
            }
        }
        for &e in self.values.keys() {
            if !g.contains_edge(e) {
                return Err(FlowError::ExtraEdge(e));
            }
        }
        Ok(())
    }
}

/// Why a labeling fails to be a (nowhere-zero) k-flow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlowViolation {
    ZeroValue(EdgeId),
    OutOfBound { edge: EdgeId, value: i64 },
    Conservation { vertex: VertexId, sum: i128 },
}

impl fmt::Display for FlowViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowViolation::ZeroValue(e) => write!(f, "edge {e} carries 0"),
            FlowViolation::OutOfBound { edge, value } => write!(f, "edge {edge} carries {value}, outside the bound"),
            FlowViolation::Conservation { vertex, sum } => write!(f, "vertex {vertex} has net outflow {sum}"),
        }
    }
}

/// Net outflow at each vertex: the sum of `tau(h) * f(e_h)` over `H(v)`.
pub fn boundary(g: &SignedGraph, f: &IntFlow) -> Result<Vec<i128>, FlowError> {
    let mut sums = vec![0i128; g.vertex_count()];
    for e in g.edges() {
        let value = f.get(e.id).ok_or(FlowError::MissingEdge(e.id))? as i128;
        sums[e.a.0] += e.tau(End::A) as i128 * value;
        sums[e.b.0] += e.tau(End::B) as i128 * value;
    }
    Ok(sums)
}

/// Full check reporting the first violation found (edges before vertices).
pub fn check_int_flow(g: &SignedGraph, f: &IntFlow, k: i64, require_nowhere_zero: bool) -> Result<Option<FlowViolation>, FlowError> {
    f.check_domain(g)?;
    for (e, v) in f.iter() {
        if require_nowhere_zero && v == 0 {
            return Ok(Some(FlowViolation::ZeroValue(e)));
        }
        if v.abs() >= k {
            return Ok(Some(FlowViolation::OutOfBound { edge: e, value: v }));
        }
    }
    for (i, sum) in boundary(g, f)?.into_iter().enumerate() {
        if sum != 0 {
            return Ok(Some(FlowViolation::Conservation { vertex: VertexId(i), sum }));
        }
    }
    Ok(None)
}

pub fn verify_int_flow(g: &SignedGraph, f: &IntFlow, k: i64, require_nowhere_zero: bool) -> Result<bool, FlowError> {
    Ok(check_int_flow(g, f, k, require_nowhere_zero)?.is_none())
}

/// True iff the labeling conserves at every vertex (no bound, zeros allowed).
pub fn conserves(g: &SignedGraph, f: &IntFlow) -> Result<bool, FlowError> {
    Ok(boundary(g, f)?.iter().all(|&s| s == 0))
}

/// `c1 * f + c2 * g` edge by edge.
pub fn combine(f: &IntFlow, g: &IntFlow, c1: i64, c2: i64) -> Result<IntFlow, FlowError> {
    if f.values.len() != g.values.len() || f.values.keys().zip(g.values.keys()).any(|(a, b)| a != b) {
        return Err(FlowError::GraphMismatch);
    }
    Ok(IntFlow {
        values: f.values.iter().map(|(&e, &v)| (e, c1 * v + c2 * g.values[&e])).collect(),
    })
}

/// Sum of `coefficient * flow` over the terms.
pub fn linear_combination(terms: &[(i64, &IntFlow)]) -> Result<IntFlow, FlowError> {
    let Some((first_c, first)) = terms.first() else {
        return Ok(IntFlow::default());
    };
    let mut acc = combine(first, first, *first_c, 0)?;
    for (c, f) in &terms[1..] {
        acc = combine(&acc, f, 1, *c)?;
    }
    Ok(acc)
}

pub fn support(f: &IntFlow) -> BTreeSet<EdgeId> {
    f.iter().filter(|&(_, v)| v != 0).map(|(e, _)| e).collect()
}

/// Edges with `|f(e)| = i`.
pub fn level_set(f: &IntFlow, i: i64) -> BTreeSet<EdgeId> {
    f.iter().filter(|&(_, v)| v.abs() == i).map(|(e, _)| e).collect()
}

/// Re-expresses `f` after switching at every vertex of `set`.
///
/// Switching reverses the half-edges at the switched vertex and keeps the
/// values; in the canonical frame this negates exactly the non-loop edges
/// whose A end was switched.
pub fn switch_flow(g: &SignedGraph, f: &IntFlow, set: &[VertexId]) -> IntFlow {
    let mut mark = vec![false; g.vertex_count()];
    for v in set {
        mark[v.0] ^= true;
    }
    IntFlow {
        values: f
            .iter()
            .map(|(e, v)| match g.edge(e) {
                Some(edge) if !edge.is_loop() && mark[edge.a.0] => (e, -v),
                _ => (e, v),
            })
            .collect(),
    }
}

/// The flow induced on `G/H` by a flow on `G`.
pub fn push_forward(record: &ContractionRecord, f: &IntFlow) -> Result<IntFlow, FlowError> {
    f.check_domain(&record.original)?;
    let switched = switch_flow(&record.original, f, &record.switched);
    let keep: BTreeSet<EdgeId> = record.surviving.iter().copied().collect();
    Ok(switched.restricted(&keep))
}

/// An element of the Klein four-group, stored as the bit pair `(x, y)`
/// packed as `2x + y`. The identity is `(0,0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Klein(u8);

impl Klein {
    pub const ZERO: Klein = Klein(0);
    /// `(0,1)`
    pub const E01: Klein = Klein(1);
    /// `(1,0)`
    pub const E10: Klein = Klein(2);
    /// `(1,1)`
    pub const E11: Klein = Klein(3);
    pub const NONZERO: [Klein; 3] = [Klein::E01, Klein::E10, Klein::E11];

    pub fn from_bits(x: u8, y: u8) -> Klein {
        Klein(((x & 1) << 1) | (y & 1))
    }

    pub fn bits(self) -> (u8, u8) {
        (self.0 >> 1, self.0 & 1)
    }

    pub fn code(self) -> u8 {
        self.0
    }

    pub fn from_code(code: u8) -> Option<Klein> {
        (code < 4).then_some(Klein(code))
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn add(self, other: Klein) -> Klein {
        Klein(self.0 ^ other.0)
    }
}

impl fmt::Display for Klein {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (x, y) = self.bits();
        write!(f, "({x},{y})")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Group {
    Z2,
    Z2xZ2,
}

/// A flow with values in a 2-torsion group. Orientation signs do not matter
/// there, and a loop adds its value twice, contributing the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupFlow {
    pub group: Group,
    values: BTreeMap<EdgeId, Klein>,
}

impl GroupFlow {
    pub fn new(group: Group, values: BTreeMap<EdgeId, Klein>) -> GroupFlow {
        GroupFlow { group, values }
    }

    pub fn get(&self, e: EdgeId) -> Option<Klein> {
        self.values.get(&e).copied()
    }

    pub fn set(&mut self, e: EdgeId, value: Klein) {
        self.values.insert(e, value);
    }

    pub fn remove(&mut self, e: EdgeId) -> Option<Klein> {
        self.values.remove(&e)
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeId, Klein)> + '_ {
        self.values.iter().map(|(&e, &v)| (e, v))
    }

    pub fn restricted(&self, keep: &BTreeSet<EdgeId>) -> GroupFlow {
        GroupFlow {
            group: self.group,
            values: self.values.iter().filter(|(e, _)| keep.contains(e)).map(|(&e, &v)| (e, v)).collect(),
        }
    }

    pub fn is_nowhere_zero(&self) -> bool {
        self.values.values().all(|v| !v.is_zero())
    }

    /// Conservation at every vertex and values inside the group.
    pub fn conserves(&self, g: &SignedGraph) -> Result<bool, FlowError> {
        let mut sums = vec![Klein::ZERO; g.vertex_count()];
        for e in g.edges() {
            let v = self.get(e.id).ok_or(FlowError::MissingEdge(e.id))?;
            if self.group == Group::Z2 && v.bits().0 != 0 {
                return Ok(false);
            }
            sums[e.a.0] = sums[e.a.0].add(v);
            sums[e.b.0] = sums[e.b.0].add(v);
        }
        Ok(self.values.len() == g.edge_count() && sums.iter().all(|s| s.is_zero()))
    }

    /// The edges carrying each nonzero value, in the order `(0,1)`, `(1,0)`, `(1,1)`.
    pub fn classes(&self) -> [BTreeSet<EdgeId>; 3] {
        let mut out: [BTreeSet<EdgeId>; 3] = Default::default();
        for (e, v) in self.iter() {
            if !v.is_zero() {
                out[v.code() as usize - 1].insert(e);
            }
        }
        out
    }
}

/// Reads `|f(e)|` in binary as a Klein element: `(bit 1, bit 0)`, so 1, 2, 3
/// map to `(0,1)`, `(1,0)`, `(1,1)`. Compares that pattern with `gf` on every
/// edge. Diagnostic only.
pub fn group_to_int_projection_check(gf: &GroupFlow, f: &IntFlow) -> Result<bool, FlowError> {
    if gf.values.len() != f.len() || gf.values.keys().any(|e| f.get(*e).is_none()) {
        return Err(FlowError::GraphMismatch);
    }
    Ok(gf.iter().all(|(e, value)| {
        let m = f.get(e).expect("checked").unsigned_abs();
        Klein::from_bits(((m >> 1) & 1) as u8, (m & 1) as u8) == value
    }))
}

/// A parsed flow file: the declared bound, the values and any orientation dump.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowFile {
    pub k: i64,
    pub flow: IntFlow,
    pub orientation: BTreeMap<EdgeId, (i64, i64)>,
}

/// Writes the flow file format: `flow k=<k>`, then `f <edge> <value>` lines,
/// optionally followed by the canonical orientation as `o <edge> <tauA> <tauB>`.
pub fn write_flow_file(f: &IntFlow, k: i64, orientation_of: Option<&SignedGraph>) -> String {
    let mut out = String::new();
    writeln!(out, "flow k={k}").unwrap();
    for (e, v) in f.iter() {
        writeln!(out, "f {e} {v}").unwrap();
    }
    if let Some(g) = orientation_of {
        for e in g.edges() {
            writeln!(out, "o {} {} {}", e.id, e.tau(End::A), e.tau(End::B)).unwrap();
        }
    }
    out
}

pub fn parse_flow_file(text: &str) -> Result<FlowFile, ParseError> {
    let mut k: Option<i64> = None;
    let mut values = BTreeMap::new();
    let mut orientation = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let int = |s: &str| s.parse::<i64>().map_err(|_| ParseError::new(line_no, format!("bad integer `{s}`")));
        let edge = |s: &str| s.parse::<usize>().map(EdgeId).map_err(|_| ParseError::new(line_no, format!("bad edge id `{s}`")));
        match fields[0] {
            "flow" => {
                if k.is_some() {
                    return Err(ParseError::new(line_no, "header declared twice"));
                }
                let spec = fields
                    .get(1)
                    .and_then(|s| s.strip_prefix("k="))
                    .filter(|_| fields.len() == 2)
                    .ok_or_else(|| ParseError::new(line_no, "expected `flow k=<k>`"))?;
                k = Some(int(spec)?);
            }
            "f" => {
                if k.is_none() {
                    return Err(ParseError::new(line_no, "value before `flow` header"));
                }
                if fields.len() != 3 {
                    return Err(ParseError::new(line_no, "expected `f <edge-id> <integer>`"));
                }
                let e = edge(fields[1])?;
                if values.insert(e, int(fields[2])?).is_some() {
                    return Err(ParseError::new(line_no, format!("edge {e} assigned twice")));
                }
            }
            "o" => {
                if fields.len() != 4 {
                    return Err(ParseError::new(line_no, "expected `o <edge-id> <tauA> <tauB>`"));
                }
                let e = edge(fields[1])?;
                let (ta, tb) = (int(fields[2])?, int(fields[3])?);
                if ta.abs() != 1 || tb.abs() != 1 {
                    return Err(ParseError::new(line_no, "orientation signs must be 1 or -1"));
                }
                orientation.insert(e, (ta, tb));
            }
            other => return Err(ParseError::new(line_no, format!("unknown directive `{other}`"))),
        }
    }
    let k = k.ok_or_else(|| ParseError::new(0, "missing `flow k=<k>` header"))?;
    Ok(FlowFile { k, flow: IntFlow::from_map(values), orientation })
}

impl FlowFile {
    /// Brings the values into the canonical frame of `g`, negating edges whose
    /// dumped orientation is the mirror image of the canonical one.
    pub fn canonical_flow(&self, g: &SignedGraph) -> Result<IntFlow, FlowError> {
        let mut out = self.flow.clone();
        for (&e, &(ta, tb)) in &self.orientation {
            let edge = g.try_edge(e)?;
            let canon = (edge.tau(End::A), edge.tau(End::B));
            if (ta, tb) == canon {
                continue;
            }
            if (-ta, -tb) == canon {
                if let Some(v) = out.get(e) {
                    out.set(e, -v);
                }
            } else {
                return Err(FlowError::GraphMismatch);
            }
        }
        Ok(out)
    }
}
