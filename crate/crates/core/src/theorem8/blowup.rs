use std::collections::{BTreeMap, BTreeSet};

use crate::error::{FlowError, GraphError, TheoremError};
use crate::flows::{push_forward, GroupFlow, IntFlow, Klein};
use crate::graph::{Edge, EdgeId, End, HalfEdge, Sign, SignedGraph, VertexId};
use crate::surgery::{contract, ContractionRecord};

/// Which value pattern a blow-up used on its circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlowUpCase {
    Case1Odd,
    Case1EvenZero,
    Case2,
}

impl BlowUpCase {
    pub fn label(self) -> &'static str {
        match self {
            BlowUpCase::Case1Odd => "case1-odd",
            BlowUpCase::Case1EvenZero => "case1-even-zero",
            BlowUpCase::Case2 => "case2",
        }
    }
}

/// Transcript of replacing one vertex by an all-positive circuit.
///
/// Indices are 0-based: circuit edge `i` joins `circuit_vertices[i]` and
/// `circuit_vertices[(i + 1) % k]`, and `circuit_vertices[i]` hosts
/// `half_edges[attachment[i]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowUpRecord {
    pub vertex: VertexId,
    pub circuit_vertices: Vec<VertexId>,
    pub circuit_edges: Vec<EdgeId>,
    /// The half-edges at the blown vertex in block order.
    pub half_edges: Vec<HalfEdge>,
    pub attachment: Vec<usize>,
    pub case: BlowUpCase,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    /// `relabel[j]` is the actual group value shown as `(0,1)`, `(1,0)`,
    /// `(1,1)` for `j = 0, 1, 2` when the pattern was applied.
    pub relabel: [Klein; 3],
}

impl BlowUpRecord {
    pub fn degree(&self) -> usize {
        self.half_edges.len()
    }

    pub fn circuit_edge_set(&self) -> BTreeSet<EdgeId> {
        self.circuit_edges.iter().copied().collect()
    }

    /// Contracts the blown circuit of `blown`.
    pub fn contract(&self, blown: &SignedGraph) -> Result<(SignedGraph, ContractionRecord), GraphError> {
        contract(blown, &self.circuit_edge_set())
    }

    /// The group flow with the circuit edges dropped.
    pub fn push_forward_group(&self, gf: &GroupFlow) -> GroupFlow {
        let keep: BTreeSet<EdgeId> = gf.iter().map(|(e, _)| e).filter(|e| !self.circuit_edges.contains(e)).collect();
        gf.restricted(&keep)
    }

    /// Pushes an integer flow on `blown` through the contraction of the circuit.
    pub fn push_forward_flow(&self, blown: &SignedGraph, f: &IntFlow) -> Result<IntFlow, FlowError> {
        let (_, rec) = self.contract(blown)?;
        push_forward(&rec, f)
    }
}

fn template_index(k: Klein) -> usize {
    k.code() as usize - 1
}

/// Circuit values for 1-based edge indices `1..=k` per the three patterns.
fn pattern(case: BlowUpCase, k: usize, a: usize, b: usize) -> Result<Vec<Klein>, TheoremError> {
    let mut vals: Vec<Option<Klein>> = vec![None; k + 1];
    let mut clash = false;
    let mut fill = |from: usize, to: usize, v: Klein| {
        let mut i = from;
        while i >= 1 && i <= to {
            clash |= vals[i].replace(v).is_some();
            i += 2;
        }
    };
    match case {
        BlowUpCase::Case1Odd => {
            fill(1, a + b - 1, Klein::E11);
            fill(2, a.saturating_sub(1), Klein::E10);
            fill(a + b + 1, k, Klein::E10);
            fill(a + 1, k - 1, Klein::E01);
        }
        BlowUpCase::Case1EvenZero if b == 0 => {
            fill(2, k, Klein::E11);
            fill(1, k - 1, Klein::E10);
        }
        BlowUpCase::Case1EvenZero => {
            fill(2, k, Klein::E11);
            fill(1, a - 1, Klein::E10);
            fill(a + 1, k - 1, Klein::E01);
        }
        BlowUpCase::Case2 => {
            fill(1, a + b - 1, Klein::E11);
            fill(2, a - 2, Klein::E10);
            fill(a + b, k, Klein::E10);
            fill(a, a + b - 2, Klein::E01);
            fill(a + b + 1, k - 1, Klein::E01);
        }
    }
    if clash || vals[1..].iter().any(Option::is_none) {
        return Err(TheoremError::Internal(format!("pattern {} does not tile the circuit", case.label())));
    }
    Ok(vals.into_iter().skip(1).map(|v| v.expect("filled")).collect())
}

/// 0-based attachment: entry `i` is the half-edge index hosted by `v_{i+1}`.
fn attachment(case: BlowUpCase, k: usize, a: usize, b: usize) -> Vec<usize> {
    if case != BlowUpCase::Case2 {
        return (0..k).collect();
    }
    (1..=k)
        .map(|i| {
            if i < a || i > a + b {
                i - 1
            } else if i < a + b {
                i
            } else {
                a - 1
            }
        })
        .collect()
}

/// Chooses the pattern and the relabeling of group values it is applied under.
fn choose_case(counts: [usize; 3]) -> Result<(BlowUpCase, [Klein; 3]), TheoremError> {
    let parity = counts[0] % 2;
    if counts.iter().any(|c| c % 2 != parity) {
        return Err(TheoremError::Internal(format!("value counts {counts:?} differ in parity")));
    }
    let identity = Klein::NONZERO;
    if parity == 1 {
        return Ok((BlowUpCase::Case1Odd, identity));
    }
    let zeros: Vec<usize> = (0..3).filter(|&i| counts[i] == 0).collect();
    let present: Vec<usize> = (0..3).filter(|&i| counts[i] != 0).collect();
    let order: Vec<usize> = match zeros.len() {
        0 => return Ok((BlowUpCase::Case2, identity)),
        // The absent value plays (1,1); the other two keep their order.
        1 => vec![present[0], present[1], zeros[0]],
        // The single present value plays (0,1).
        2 => vec![present[0], zeros[0], zeros[1]],
        _ => return Err(TheoremError::BlowUp("vertex carries no flow".into())),
    };
    Ok((BlowUpCase::Case1EvenZero, [identity[order[0]], identity[order[1]], identity[order[2]]]))
}

/// Replaces `v` (degree at least 4) by an all-positive circuit carrying a
/// nowhere-zero Klein-group flow that contracts back to `gf`.
pub fn blow_up_vertex(
    g: &SignedGraph,
    gf: &GroupFlow,
    v: VertexId,
) -> Result<(SignedGraph, GroupFlow, BlowUpRecord), TheoremError> {
    if !g.contains_vertex(v) {
        return Err(TheoremError::BlowUp(format!("no vertex {v}")));
    }
    let k = g.degree(v);
    if k < 4 {
        return Err(TheoremError::BlowUp(format!("vertex {v} has degree {k}")));
    }
    if g.edges().iter().any(|e| e.is_loop() && e.sign == Sign::Positive) {
        return Err(TheoremError::BlowUp("graph has a positive loop".into()));
    }
    if g.vertices().any(|u| g.degree(u) == 2) {
        return Err(TheoremError::BlowUp("graph has a vertex of degree 2".into()));
    }
    if !gf.is_nowhere_zero() || !gf.conserves(g)? {
        return Err(TheoremError::BlowUp("group flow is not a nowhere-zero flow".into()));
    }

    let value = |h: &HalfEdge| gf.get(h.edge).expect("conserving flow covers every edge");
    let mut counts = [0usize; 3];
    for h in g.half_edges(v) {
        counts[template_index(value(h))] += 1;
    }
    let (case, relabel) = choose_case(counts)?;
    let to_template = |x: Klein| relabel.iter().position(|&r| r == x).expect("nonzero value");
    let mut half_edges: Vec<HalfEdge> = g.half_edges(v).to_vec();
    half_edges.sort_by_key(|h| (to_template(value(h)), h.edge, h.end));
    let (a, b, c) = (counts[relabel[0].code() as usize - 1], counts[relabel[1].code() as usize - 1], counts[relabel[2].code() as usize - 1]);

    let template = pattern(case, k, a, b)?;
    let attach = attachment(case, k, a, b);
    let n = g.vertex_count();
    let circuit_vertices: Vec<VertexId> =
        std::iter::once(v).chain((0..k - 1).map(|i| VertexId(n + i))).collect();
    let first_id = g.next_edge_id().0;
    let circuit_edges: Vec<EdgeId> = (0..k).map(|i| EdgeId(first_id + i)).collect();

    let host: BTreeMap<HalfEdge, VertexId> =
        attach.iter().enumerate().map(|(i, &j)| (half_edges[j], circuit_vertices[i])).collect();
    let moved = |e: &Edge, end: End, old: VertexId| *host.get(&HalfEdge { edge: e.id, end }).unwrap_or(&old);
    let mut edges: Vec<Edge> = g.edges().iter().map(|e| Edge { a: moved(e, End::A, e.a), b: moved(e, End::B, e.b), ..*e }).collect();
    let mut values: BTreeMap<EdgeId, Klein> = gf.iter().collect();
    for i in 0..k {
        edges.push(Edge { id: circuit_edges[i], a: circuit_vertices[i], b: circuit_vertices[(i + 1) % k], sign: Sign::Positive });
        values.insert(circuit_edges[i], relabel[template_index(template[i])]);
    }
    let blown = SignedGraph::new(n + k - 1, edges)?;
    let new_flow = GroupFlow::new(gf.group, values);
    if !new_flow.is_nowhere_zero() || !new_flow.conserves(&blown)? {
        return Err(TheoremError::Internal(format!("blow-up of {v} broke the group flow")));
    }
    let record = BlowUpRecord { vertex: v, circuit_vertices, circuit_edges, half_edges, attachment: attach, case, a, b, c, relabel };
    let (back, _) = record.contract(&blown)?;
    if back != *g || record.push_forward_group(&new_flow) != *gf {
        return Err(TheoremError::Internal(format!("blow-up of {v} does not contract back")));
    }
    Ok((blown, new_flow, record))
}

/// Blows up maximum-degree vertices (least id first) until every
/// non-isolated vertex has degree 3.
pub fn expand_to_cubic(g: &SignedGraph, gf: &GroupFlow) -> Result<(SignedGraph, GroupFlow, Vec<BlowUpRecord>), TheoremError> {
    if let Some(v) = g.vertices().find(|&v| matches!(g.degree(v), 1 | 2)) {
        return Err(TheoremError::BlowUp(format!("vertex {v} has degree {}", g.degree(v))));
    }
    let mut cur = g.clone();
    let mut flow = gf.clone();
    let mut records = Vec::new();
    loop {
        let top = cur.vertices().max_by_key(|&v| (cur.degree(v), std::cmp::Reverse(v)));
        match top {
            Some(v) if cur.degree(v) > 3 => {
                let (next, next_flow, rec) = blow_up_vertex(&cur, &flow, v)?;
                cur = next;
                flow = next_flow;
                records.push(rec);
            }
            _ => break,
        }
    }
    Ok((cur, flow, records))
}
