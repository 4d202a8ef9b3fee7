//! Contraction of edge sets and the degree-2 / positive-loop preprocessing.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{FlowError, GraphError};
use crate::flows::IntFlow;
use crate::graph::{components_on, Edge, EdgeId, End, Sign, SignedGraph, VertexId};

/// Transcript of `G -> G/H`.
#[derive(Clone, Debug)]
pub struct ContractionRecord {
    pub original: SignedGraph,
    /// Vertex sets of the components of `H`, ordered by least vertex.
    pub components: Vec<Vec<VertexId>>,
    /// The vertex of `G/H` each component was identified into.
    pub new_vertices: Vec<VertexId>,
    /// Image of every vertex of `G`.
    pub vertex_map: Vec<VertexId>,
    /// Vertices switched (once each) before identification.
    pub switched: Vec<VertexId>,
    /// Edges that became positive loops and were dropped.
    pub removed_loops: Vec<EdgeId>,
    /// Edges of `G/H`; they keep their ids from `G`.
    pub surviving: Vec<EdgeId>,
}

impl ContractionRecord {
    /// The signature of `G` at contraction time.
    pub fn replay_signature(&self) -> BTreeMap<EdgeId, Sign> {
        self.original
            .switch_set(&self.switched)
            .expect("trail vertices belong to the original graph")
            .signature()
    }

    pub fn switched_graph(&self) -> SignedGraph {
        self.original
            .switch_set(&self.switched)
            .expect("trail vertices belong to the original graph")
    }
}

/// Contracts every component of the subgraph spanned by `h_edges`.
///
/// A spanning tree of each component is made positive by switching, the
/// component is identified into one vertex, and edges that end up as positive
/// loops are removed. Negative edges left inside an unbalanced component stay
/// as negative loops.
pub fn contract(g: &SignedGraph, h_edges: &BTreeSet<EdgeId>) -> Result<(SignedGraph, ContractionRecord), GraphError> {
    for &e in h_edges {
        g.try_edge(e)?;
    }
    let in_h = |e: &Edge| h_edges.contains(&e.id);
    let comps: Vec<Vec<VertexId>> = components_on(g, &in_h)
        .into_iter()
        .filter(|c| c.len() > 1 || g.half_edges(c[0]).iter().any(|h| h_edges.contains(&h.edge)))
        .collect();

    // Spanning-tree potentials inside each component.
    let mut mu = vec![Sign::Positive; g.vertex_count()];
    let mut group = vec![usize::MAX; g.vertex_count()];
    for (ci, comp) in comps.iter().enumerate() {
        for v in comp {
            group[v.0] = ci;
        }
        let root = comp[0];
        let mut seen = BTreeSet::from([root]);
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for e in g.incident_edges(x) {
                let edge = g.edge(e).expect("incident");
                if !h_edges.contains(&e) || edge.is_loop() {
                    continue;
                }
                let y = edge.other(x);
                if seen.insert(y) {
                    mu[y.0] = mu[x.0].times(edge.sign);
                    queue.push_back(y);
                }
            }
        }
    }
    let switched: Vec<VertexId> = g.vertices().filter(|v| mu[v.0].is_negative()).collect();
    let gs = g.switch_set(&switched)?;

    let mut vertex_map = vec![VertexId(usize::MAX); g.vertex_count()];
    let mut new_vertices = vec![VertexId(usize::MAX); comps.len()];
    let mut next = 0;
    for v in g.vertices() {
        let ci = group[v.0];
        if ci == usize::MAX {
            vertex_map[v.0] = VertexId(next);
            next += 1;
        } else if comps[ci][0] == v {
            new_vertices[ci] = VertexId(next);
            next += 1;
        }
    }
    for v in g.vertices() {
        let ci = group[v.0];
        if ci != usize::MAX {
            vertex_map[v.0] = new_vertices[ci];
        }
    }

    let mut removed_loops = Vec::new();
    let mut surviving = Vec::new();
    let mut edges = Vec::new();
    for e in gs.edges() {
        let a = vertex_map[e.a.0];
        let b = vertex_map[e.b.0];
        if a == b && e.sign == Sign::Positive {
            removed_loops.push(e.id);
        } else {
            surviving.push(e.id);
            edges.push(Edge { a, b, ..*e });
        }
    }
    let contracted = SignedGraph::new(next, edges)?;
    Ok((
        contracted,
        ContractionRecord {
            original: g.clone(),
            components: comps,
            new_vertices,
            vertex_map,
            switched,
            removed_loops,
            surviving,
        },
    ))
}

/// One step of [`suppress_preprocess`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SurgeryStep {
    RemovedPositiveLoop(Edge),
    /// The degree-2 vertex `middle` between `first` and `second` was replaced
    /// by `merged`, which runs from the far end of `first` (its A end) to the
    /// far end of `second`, with sign `first.sign * second.sign`.
    Merged { middle: VertexId, first: Edge, second: Edge, merged: Edge },
}

#[derive(Clone, Debug)]
pub struct SuppressRecord {
    pub original: SignedGraph,
    pub reduced: SignedGraph,
    pub steps: Vec<SurgeryStep>,
    /// Components of the reduced graph that are bare circuits, left intact.
    pub bare_circuits: Vec<Vec<EdgeId>>,
}

impl SuppressRecord {
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn merge_count(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, SurgeryStep::Merged { .. })).count()
    }
}

/// Removes positive loops and suppresses degree-2 vertices until neither
/// remains, except on components that are bare circuits. Suppressed vertices
/// stay in the vertex set as isolated vertices.
pub fn suppress_preprocess(g: &SignedGraph) -> (SignedGraph, SuppressRecord) {
    let mut current = g.clone();
    let mut steps = Vec::new();
    let mut fresh = g.next_edge_id().0;
    loop {
        let loops: Vec<Edge> = current
            .edges()
            .iter()
            .filter(|e| e.is_loop() && e.sign == Sign::Positive)
            .copied()
            .collect();
        if !loops.is_empty() {
            let drop: BTreeSet<EdgeId> = loops.iter().map(|e| e.id).collect();
            steps.extend(loops.into_iter().map(SurgeryStep::RemovedPositiveLoop));
            current = current.restrict(|e| !drop.contains(&e.id));
            continue;
        }
        let frozen = circuit_component_mask(&current);
        let candidate = current.vertices().find(|&v| {
            !frozen[v.0] && current.degree(v) == 2 && {
                let hs = current.half_edges(v);
                hs[0].edge != hs[1].edge
            }
        });
        let Some(middle) = candidate else { break };
        let mut pair = current.incident_edges(middle);
        pair.sort();
        let first = *current.edge(pair[0]).expect("incident");
        let second = *current.edge(pair[1]).expect("incident");
        let merged = Edge {
            id: EdgeId(fresh),
            a: first.other(middle),
            b: second.other(middle),
            sign: first.sign.times(second.sign),
        };
        let edges = current
            .edges()
            .iter()
            .filter(|e| e.id != first.id && e.id != second.id)
            .copied()
            .chain(std::iter::once(merged));
        current = SignedGraph::new(current.vertex_count(), edges).expect("merge keeps graph valid");
        fresh += 1;
        steps.push(SurgeryStep::Merged { middle, first, second, merged });
    }
    let frozen = circuit_component_mask(&current);
    let bare_circuits = current
        .component_vertices()
        .into_iter()
        .filter(|c| frozen[c[0].0])
        .map(|c| {
            let mut ids: Vec<EdgeId> = c.iter().flat_map(|&v| current.incident_edges(v)).collect();
            ids.sort();
            ids.dedup();
            ids
        })
        .collect();
    let record = SuppressRecord { original: g.clone(), reduced: current.clone(), steps, bare_circuits };
    (current, record)
}

/// Marks vertices lying in components that are circuits (every vertex of
/// degree two, at least one edge).
fn circuit_component_mask(g: &SignedGraph) -> Vec<bool> {
    let mut mask = vec![false; g.vertex_count()];
    for comp in g.component_vertices() {
        if comp.iter().all(|&v| g.degree(v) == 2) {
            for v in comp {
                mask[v.0] = true;
            }
        }
    }
    mask
}

/// Lifts a flow on the reduced graph back to the original graph. Bounds and
/// the nowhere-zero property carry over unchanged.
pub fn undo_suppress(record: &SuppressRecord, f: &IntFlow) -> Result<IntFlow, FlowError> {
    f.check_domain(&record.reduced)?;
    let mut values: BTreeMap<EdgeId, i64> = f.iter().collect();
    for step in record.steps.iter().rev() {
        match step {
            SurgeryStep::RemovedPositiveLoop(e) => {
                values.insert(e.id, 1);
            }
            SurgeryStep::Merged { middle, first, second, merged } => {
                let value = values.remove(&merged.id).ok_or(FlowError::MissingEdge(merged.id))?;
                let x_end = if first.a == *middle { End::B } else { End::A };
                let y_end = if second.a == *middle { End::B } else { End::A };
                values.insert(first.id, value * first.tau(x_end));
                values.insert(second.id, value * merged.tau(End::B) * second.tau(y_end));
            }
        }
    }
    let out = IntFlow::from_map(values);
    out.check_domain(&record.original)?;
    Ok(out)
}
