//! Signed multigraphs with half-edges, switching and balance.
//!
//! Vertices are the dense range `0..n`. Edge ids are stable integers that
//! survive switching, contraction, suppression and blow-up; every record in
//! the crate refers to edges by id, never by position.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use crate::error::GraphError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn is_negative(self) -> bool {
        self == Sign::Negative
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Positive => '+',
            Sign::Negative => '-',
        }
    }
}

/// Which end of an edge a half-edge sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum End {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfEdge {
    pub edge: EdgeId,
    pub end: End,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub a: VertexId,
    pub b: VertexId,
    pub sign: Sign,
}

impl Edge {
    pub fn new(id: usize, a: usize, b: usize, sign: Sign) -> Edge {
        Edge { id: EdgeId(id), a: VertexId(a), b: VertexId(b), sign }
    }

    pub fn is_loop(&self) -> bool {
        self.a == self.b
    }

    pub fn endpoint(&self, end: End) -> VertexId {
        match end {
            End::A => self.a,
            End::B => self.b,
        }
    }

    /// The endpoint opposite to `v` (for a loop, `v` itself).
    pub fn other(&self, v: VertexId) -> VertexId {
        if self.a == v {
            self.b
        } else {
            self.a
        }
    }

    /// Canonical orientation: the A half-edge points away from its vertex,
    /// the B half-edge gets `-sign`.
    pub fn tau(&self, end: End) -> i64 {
        match end {
            End::A => 1,
            End::B => -self.sign.value(),
        }
    }

    /// Sum of the canonical half-edge signs at `v` (loops contribute both ends).
    pub fn coefficient_at(&self, v: VertexId) -> i64 {
        let mut c = 0;
        if self.a == v {
            c += self.tau(End::A);
        }
        if self.b == v {
            c += self.tau(End::B);
        }
        c
    }
}

#[derive(Clone, Debug)]
pub struct SignedGraph {
    n: usize,
    edges: Vec<Edge>,
    incidence: Vec<Vec<HalfEdge>>,
}

impl PartialEq for SignedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl Eq for SignedGraph {}

impl SignedGraph {
    /// Builds a graph on vertices `0..n`. Edges may be given in any order;
    /// they are stored sorted by id.
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<SignedGraph, GraphError> {
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        edges.sort_by_key(|e| e.id);
        for w in edges.windows(2) {
            if w[0].id == w[1].id {
                return Err(GraphError::DuplicateEdge(w[0].id));
            }
        }
        for e in &edges {
            for v in [e.a, e.b] {
                if v.0 >= n {
                    return Err(GraphError::UnknownVertex(v));
                }
            }
        }
        let mut incidence = vec![Vec::new(); n];
        for e in &edges {
            incidence[e.a.0].push(HalfEdge { edge: e.id, end: End::A });
            incidence[e.b.0].push(HalfEdge { edge: e.id, end: End::B });
        }
        Ok(SignedGraph { n, edges, incidence })
    }

    /// Convenience constructor assigning ids `0..m` in the given order.
    pub fn from_triples(n: usize, triples: &[(usize, usize, Sign)]) -> Result<SignedGraph, GraphError> {
        SignedGraph::new(
            n,
            triples.iter().enumerate().map(|(i, &(a, b, s))| Edge::new(i, a, b, s)),
        )
    }

    /// All-positive graph with ids `0..m`.
    pub fn unsigned(n: usize, pairs: &[(usize, usize)]) -> Result<SignedGraph, GraphError> {
        SignedGraph::new(
            n,
            pairs
                .iter()
                .enumerate()
                .map(|(i, &(a, b))| Edge::new(i, a, b, Sign::Positive)),
        )
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.n).map(VertexId)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.iter().map(|e| e.id)
    }

    /// Position of an edge in [`SignedGraph::edges`].
    pub fn position(&self, id: EdgeId) -> Option<usize> {
        self.edges.binary_search_by_key(&id, |e| e.id).ok()
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.position(id).map(|i| &self.edges[i])
    }

    pub fn try_edge(&self, id: EdgeId) -> Result<&Edge, GraphError> {
        self.edge(id).ok_or(GraphError::UnknownEdge(id))
    }

    pub fn contains_edge(&self, id: EdgeId) -> bool {
        self.position(id).is_some()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        v.0 < self.n
    }

    /// The half-edges at `v`; a loop contributes both of its half-edges.
    pub fn half_edges(&self, v: VertexId) -> &[HalfEdge] {
        &self.incidence[v.0]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.incidence[v.0].len()
    }

    pub fn max_degree(&self) -> usize {
        self.incidence.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn endpoint(&self, h: HalfEdge) -> VertexId {
        self.edge(h.edge).expect("half-edge of a foreign edge").endpoint(h.end)
    }

    pub fn tau(&self, h: HalfEdge) -> i64 {
        self.edge(h.edge).expect("half-edge of a foreign edge").tau(h.end)
    }

    /// Distinct edges incident with `v`, ascending by id.
    pub fn incident_edges(&self, v: VertexId) -> Vec<EdgeId> {
        let mut ids: Vec<EdgeId> = self.incidence[v.0].iter().map(|h| h.edge).collect();
        ids.sort();
        ids.dedup();
        ids
    }

    pub fn next_edge_id(&self) -> EdgeId {
        EdgeId(self.edges.last().map_or(0, |e| e.id.0 + 1))
    }

    pub fn negative_count(&self) -> usize {
        self.edges.iter().filter(|e| e.sign.is_negative()).count()
    }

    /// Every vertex has degree exactly three.
    pub fn is_cubic(&self) -> bool {
        self.n > 0 && self.incidence.iter().all(|h| h.len() == 3)
    }

    pub fn signature(&self) -> BTreeMap<EdgeId, Sign> {
        self.edges.iter().map(|e| (e.id, e.sign)).collect()
    }

    /// Same underlying graph with every edge positive.
    pub fn all_positive(&self) -> SignedGraph {
        self.map_edges(|e| Edge { sign: Sign::Positive, ..*e })
    }

    pub fn with_signature(&self, sigma: &BTreeMap<EdgeId, Sign>) -> Result<SignedGraph, GraphError> {
        for e in &self.edges {
            if !sigma.contains_key(&e.id) {
                return Err(GraphError::MissingSign(e.id));
            }
        }
        Ok(self.map_edges(|e| Edge { sign: sigma[&e.id], ..*e }))
    }

    fn map_edges(&self, f: impl Fn(&Edge) -> Edge) -> SignedGraph {
        SignedGraph {
            n: self.n,
            edges: self.edges.iter().map(f).collect(),
            incidence: self.incidence.clone(),
        }
    }

    /// Spanning subgraph keeping only the edges accepted by `keep`.
    pub fn restrict(&self, keep: impl Fn(&Edge) -> bool) -> SignedGraph {
        SignedGraph::new(self.n, self.edges.iter().filter(|e| keep(e)).copied())
            .expect("subgraph of a valid graph")
    }

    /// Switch at `v`: every non-loop edge at `v` changes sign.
    pub fn switch_at(&self, v: VertexId) -> Result<SignedGraph, GraphError> {
        self.switch_set(&[v])
    }

    /// Switch at every vertex of `set` (each listed vertex once).
    pub fn switch_set(&self, set: &[VertexId]) -> Result<SignedGraph, GraphError> {
        let mut mark = vec![false; self.n];
        for &v in set {
            if !self.contains_vertex(v) {
                return Err(GraphError::UnknownVertex(v));
            }
            mark[v.0] ^= true;
        }
        Ok(self.map_edges(|e| {
            let flips = !e.is_loop() && (mark[e.a.0] != mark[e.b.0]);
            Edge { sign: if flips { e.sign.flip() } else { e.sign }, ..*e }
        }))
    }

    /// Switching potentials of a balanced graph: `mu(a) * mu(b) = sign(e)` for
    /// every non-loop edge. The BFS starts at the least vertex of each
    /// component and scans edges by id. Returns `None` when unbalanced.
    pub fn balance_potential(&self) -> Option<Vec<Sign>> {
        potential_on(self, &|_| true).ok()
    }

    pub fn is_balanced(&self) -> bool {
        self.balance_potential().is_some()
    }

    /// Vertices to switch at so that a balanced graph becomes all-positive.
    pub fn balancing_switches(&self) -> Option<Vec<VertexId>> {
        self.balance_potential().map(|mu| {
            mu.iter()
                .enumerate()
                .filter(|(_, s)| s.is_negative())
                .map(|(i, _)| VertexId(i))
                .collect()
        })
    }

    /// True iff `sigma2` is obtained from this signature by switching, i.e. the
    /// product signature is balanced.
    pub fn signatures_equivalent(&self, sigma2: &BTreeMap<EdgeId, Sign>) -> Result<bool, GraphError> {
        let mut product = BTreeMap::new();
        for e in &self.edges {
            let s2 = sigma2.get(&e.id).ok_or(GraphError::MissingSign(e.id))?;
            product.insert(e.id, e.sign.times(*s2));
        }
        Ok(self.with_signature(&product)?.is_balanced())
    }

    /// Connected components as vertex lists (ascending), ordered by least vertex.
    pub fn component_vertices(&self) -> Vec<Vec<VertexId>> {
        components_on(self, &|_| true)
    }

    pub fn is_connected(&self) -> bool {
        self.component_vertices().len() <= 1
    }

    /// Splits into components. Each part is renumbered `0..m` in the order of
    /// the original vertex ids and keeps the original edge ids.
    pub fn components(&self) -> Vec<Component> {
        let comps = self.component_vertices();
        let mut local = vec![0usize; self.n];
        let mut owner = vec![0usize; self.n];
        for (ci, vs) in comps.iter().enumerate() {
            for (i, v) in vs.iter().enumerate() {
                local[v.0] = i;
                owner[v.0] = ci;
            }
        }
        let mut buckets: Vec<Vec<Edge>> = vec![Vec::new(); comps.len()];
        for e in &self.edges {
            buckets[owner[e.a.0]].push(Edge {
                a: VertexId(local[e.a.0]),
                b: VertexId(local[e.b.0]),
                ..*e
            });
        }
        comps
            .into_iter()
            .zip(buckets)
            .map(|(vertices, edges)| Component {
                graph: SignedGraph::new(vertices.len(), edges).expect("component of a valid graph"),
                vertices,
            })
            .collect()
    }

    /// Drops isolated vertices, renumbering the rest in order.
    pub fn without_isolated(&self) -> (SignedGraph, Vec<VertexId>) {
        let kept: Vec<VertexId> = self.vertices().filter(|&v| self.degree(v) > 0).collect();
        let mut local = vec![usize::MAX; self.n];
        for (i, v) in kept.iter().enumerate() {
            local[v.0] = i;
        }
        let g = SignedGraph::new(
            kept.len(),
            self.edges.iter().map(|e| Edge {
                a: VertexId(local[e.a.0]),
                b: VertexId(local[e.b.0]),
                ..*e
            }),
        )
        .expect("renumbering preserves validity");
        (g, kept)
    }

    /// Bridges (non-loop edges whose removal disconnects their endpoints).
    pub fn bridges(&self) -> Vec<EdgeId> {
        let mut out = Vec::new();
        for e in &self.edges {
            if e.is_loop() {
                continue;
            }
            let id = e.id;
            let reach = reachable_on(self, e.a, &|x: &Edge| x.id != id);
            if !reach[e.b.0] {
                out.push(id);
            }
        }
        out
    }
}

/// A connected piece of a graph together with the original vertex ids.
#[derive(Clone, Debug)]
pub struct Component {
    pub graph: SignedGraph,
    pub vertices: Vec<VertexId>,
}

/// Balance potentials restricted to the edges accepted by `keep`.
/// On failure returns the edge closing an unbalanced circuit.
pub(crate) fn potential_on(g: &SignedGraph, keep: &dyn Fn(&Edge) -> bool) -> Result<Vec<Sign>, EdgeId> {
    let mut mu: Vec<Option<Sign>> = vec![None; g.vertex_count()];
    for root in g.vertices() {
        if mu[root.0].is_some() {
            continue;
        }
        mu[root.0] = Some(Sign::Positive);
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for e in g.incident_edges(x) {
                let edge = g.edge(e).expect("incident edge");
                if !keep(edge) {
                    continue;
                }
                if edge.is_loop() {
                    if edge.sign.is_negative() {
                        return Err(edge.id);
                    }
                    continue;
                }
                let y = edge.other(x);
                let want = mu[x.0].expect("visited").times(edge.sign);
                match mu[y.0] {
                    None => {
                        mu[y.0] = Some(want);
                        queue.push_back(y);
                    }
                    Some(s) if s != want => return Err(edge.id),
                    Some(_) => {}
                }
            }
        }
    }
    Ok(mu.into_iter().map(|s| s.expect("all visited")).collect())
}

pub(crate) fn reachable_on(g: &SignedGraph, start: VertexId, keep: &dyn Fn(&Edge) -> bool) -> Vec<bool> {
    let mut seen = vec![false; g.vertex_count()];
    seen[start.0] = true;
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for h in g.half_edges(x) {
            let edge = g.edge(h.edge).expect("incident edge");
            if !keep(edge) {
                continue;
            }
            let y = edge.other(x);
            if !seen[y.0] {
                seen[y.0] = true;
                stack.push(y);
            }
        }
    }
    seen
}

pub(crate) fn components_on(g: &SignedGraph, keep: &dyn Fn(&Edge) -> bool) -> Vec<Vec<VertexId>> {
    let mut seen = vec![false; g.vertex_count()];
    let mut out = Vec::new();
    for v in g.vertices() {
        if seen[v.0] {
            continue;
        }
        let reach = reachable_on(g, v, keep);
        let comp: Vec<VertexId> = g.vertices().filter(|u| reach[u.0]).collect();
        for u in &comp {
            seen[u.0] = true;
        }
        out.push(comp);
    }
    out
}

/// A ±1 label per half-edge with `tau(A) * tau(B) = -sign(e)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientation {
    tau: BTreeMap<HalfEdge, i64>,
}

impl Orientation {
    /// The fixed frame every integer flow in this crate is stored in.
    pub fn canonical(g: &SignedGraph) -> Orientation {
        let mut tau = BTreeMap::new();
        for e in g.edges() {
            tau.insert(HalfEdge { edge: e.id, end: End::A }, e.tau(End::A));
            tau.insert(HalfEdge { edge: e.id, end: End::B }, e.tau(End::B));
        }
        Orientation { tau }
    }

    pub fn from_map(tau: BTreeMap<HalfEdge, i64>) -> Orientation {
        Orientation { tau }
    }

    pub fn get(&self, h: HalfEdge) -> Option<i64> {
        self.tau.get(&h).copied()
    }

    /// Checks the bidirected identity on every edge of `g`.
    pub fn is_valid_for(&self, g: &SignedGraph) -> bool {
        g.edges().iter().all(|e| {
            let a = self.get(HalfEdge { edge: e.id, end: End::A });
            let b = self.get(HalfEdge { edge: e.id, end: End::B });
            match (a, b) {
                (Some(a), Some(b)) => (a == 1 || a == -1) && (b == 1 || b == -1) && a * b == -e.sign.value(),
                _ => false,
            }
        }) && self.tau.len() == 2 * g.edge_count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Sign::{Negative as N, Positive as P};

    fn triangle(signs: [Sign; 3]) -> SignedGraph {
        SignedGraph::from_triples(3, &[(0, 1, signs[0]), (1, 2, signs[1]), (2, 0, signs[2])]).unwrap()
    }

    #[test]
    fn switch_negates_edges_at_vertex() {
        let g = triangle([P, P, P]);
        let s = g.switch_at(VertexId(1)).unwrap();
        let signs: Vec<Sign> = s.edges().iter().map(|e| e.sign).collect();
        assert_eq!(signs, vec![N, N, P]);
    }

    #[test]
    fn switch_leaves_loops_alone() {
        let g = SignedGraph::from_triples(1, &[(0, 0, N)]).unwrap();
        assert_eq!(g.switch_at(VertexId(0)).unwrap(), g);
    }

    #[test]
    fn switching_twice_restores() {
        let g = SignedGraph::from_triples(4, &[(0, 1, N), (1, 2, P), (2, 3, P), (3, 0, P)]).unwrap();
        let back = g.switch_at(VertexId(0)).unwrap().switch_at(VertexId(0)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn switch_rejects_unknown_vertex() {
        let g = triangle([P, P, P]);
        assert_eq!(g.switch_at(VertexId(7)), Err(GraphError::UnknownVertex(VertexId(7))));
    }

    #[test]
    fn equivalence_examples() {
        let g = triangle([P, P, P]);
        assert!(g.signatures_equivalent(&g.signature()).unwrap());
        assert!(!g.signatures_equivalent(&triangle([N, P, P]).signature()).unwrap());
        assert!(g.signatures_equivalent(&triangle([N, N, P]).signature()).unwrap());
        let mut partial = g.signature();
        partial.remove(&EdgeId(2));
        assert_eq!(g.signatures_equivalent(&partial), Err(GraphError::MissingSign(EdgeId(2))));
    }

    #[test]
    fn balance_examples() {
        assert!(triangle([P, P, P]).is_balanced());
        assert!(!SignedGraph::from_triples(1, &[(0, 0, N)]).unwrap().is_balanced());
        let c4 = SignedGraph::from_triples(4, &[(0, 1, N), (1, 2, P), (2, 3, N), (3, 0, P)]).unwrap();
        assert!(c4.is_balanced());
        let c4_odd = SignedGraph::from_triples(4, &[(0, 1, N), (1, 2, P), (2, 3, P), (3, 0, P)]).unwrap();
        assert!(!c4_odd.is_balanced());
    }

    #[test]
    fn positive_loops_do_not_unbalance() {
        let g = SignedGraph::from_triples(2, &[(0, 0, P), (0, 1, N), (1, 0, N)]).unwrap();
        assert!(g.is_balanced());
    }

    #[test]
    fn balancing_switches_make_graph_positive() {
        let g = SignedGraph::from_triples(4, &[(0, 1, N), (1, 2, P), (2, 3, N), (3, 0, P)]).unwrap();
        let sw = g.balancing_switches().unwrap();
        let h = g.switch_set(&sw).unwrap();
        assert_eq!(h.negative_count(), 0);
    }

    #[test]
    fn canonical_orientation_is_valid() {
        let g = SignedGraph::from_triples(2, &[(0, 1, N), (0, 1, P), (1, 1, N), (0, 0, P)]).unwrap();
        assert!(Orientation::canonical(&g).is_valid_for(&g));
    }

    #[test]
    fn components_keep_edge_ids() {
        let g = SignedGraph::from_triples(5, &[(3, 4, P), (0, 1, N), (4, 3, P)]).unwrap();
        let parts = g.components();
        assert_eq!(parts.len(), 3);
        assert_eq!(parts[0].vertices, vec![VertexId(0), VertexId(1)]);
        assert_eq!(parts[0].graph.edge_ids().collect::<Vec<_>>(), vec![EdgeId(1)]);
        assert_eq!(parts[2].graph.edge_ids().collect::<Vec<_>>(), vec![EdgeId(0), EdgeId(2)]);
    }

    #[test]
    fn bridges_found() {
        let g = SignedGraph::from_triples(2, &[(0, 0, N), (0, 1, P), (1, 1, N)]).unwrap();
        assert_eq!(g.bridges(), vec![EdgeId(1)]);
    }

    #[test]
    fn rejects_bad_construction() {
        assert_eq!(
            SignedGraph::new(2, [Edge::new(0, 0, 2, P)]),
            Err(GraphError::UnknownVertex(VertexId(2)))
        );
        assert_eq!(
            SignedGraph::new(2, [Edge::new(0, 0, 1, P), Edge::new(0, 1, 0, P)]),
            Err(GraphError::DuplicateEdge(EdgeId(0)))
        );
    }
}
