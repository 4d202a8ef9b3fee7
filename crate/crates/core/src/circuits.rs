//! Circuits, signed-circuit certificates and flow-admissibility.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::{self, Write as _};

use crate::error::{AdmissibilityError, GraphError, ParseError};
use crate::graph::{potential_on, reachable_on, Edge, EdgeId, Sign, SignedGraph, VertexId};

/// A circuit as a cyclic sequence: `edges[i]` joins `vertices[i]` and
/// `vertices[i + 1]` (indices mod the length). A loop is a circuit of length 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl Circuit {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edge_set(&self) -> BTreeSet<EdgeId> {
        self.edges.iter().copied().collect()
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.vertices.iter().copied().collect()
    }

    pub fn sorted_edges(&self) -> Vec<EdgeId> {
        let mut v = self.edges.clone();
        v.sort();
        v
    }

    pub fn negative_count(&self, g: &SignedGraph) -> usize {
        self.edges.iter().filter(|&&e| g.edge(e).is_some_and(|x| x.sign.is_negative())).count()
    }

    pub fn is_balanced(&self, g: &SignedGraph) -> bool {
        self.negative_count(g).is_multiple_of(2)
    }

    /// Rotates so that the sequence starts at `v`.
    pub fn rotated_to(&self, v: VertexId) -> Option<Circuit> {
        let i = self.vertices.iter().position(|&x| x == v)?;
        let mut vertices = self.vertices.clone();
        let mut edges = self.edges.clone();
        vertices.rotate_left(i);
        edges.rotate_left(i);
        Some(Circuit { vertices, edges })
    }

    /// Rebuilds the cyclic sequence from an edge set, or `None` if the edges
    /// do not form a circuit of `g`.
    pub fn from_edges(g: &SignedGraph, edges: &[EdgeId]) -> Option<Circuit> {
        let set: BTreeSet<EdgeId> = edges.iter().copied().collect();
        if set.is_empty() || set.len() != edges.len() {
            return None;
        }
        let es: Vec<&Edge> = set.iter().map(|&e| g.edge(e)).collect::<Option<_>>()?;
        if es.len() == 1 {
            let e = es[0];
            return e.is_loop().then(|| Circuit { vertices: vec![e.a], edges: vec![e.id] });
        }
        if es.iter().any(|e| e.is_loop()) {
            return None;
        }
        let mut deg = std::collections::BTreeMap::new();
        for e in &es {
            *deg.entry(e.a).or_insert(0) += 1;
            *deg.entry(e.b).or_insert(0) += 1;
        }
        if deg.values().any(|&d| d != 2) {
            return None;
        }
        let start = es[0];
        let mut vertices = vec![start.a];
        let mut out = vec![start.id];
        let mut at = start.b;
        let mut used = BTreeSet::from([start.id]);
        while at != start.a {
            let next = es.iter().find(|e| !used.contains(&e.id) && (e.a == at || e.b == at))?;
            vertices.push(at);
            out.push(next.id);
            used.insert(next.id);
            at = next.other(at);
        }
        (used.len() == es.len()).then_some(Circuit { vertices, edges: out })
    }
}

/// A path: `edges[i]` joins `vertices[i]` and `vertices[i + 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl Path {
    pub fn start(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn end(&self) -> VertexId {
        *self.vertices.last().expect("nonempty path")
    }

    pub fn reversed(&self) -> Path {
        let mut vertices = self.vertices.clone();
        let mut edges = self.edges.clone();
        vertices.reverse();
        edges.reverse();
        Path { vertices, edges }
    }

    /// Concatenates `self` with a path starting where `self` ends.
    pub fn join(&self, other: &Path) -> Path {
        debug_assert_eq!(self.end(), other.start());
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices[1..]);
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Path { vertices, edges }
    }
}

/// Breadth-first shortest path from any vertex of `sources` to any vertex of
/// `targets`, using edges accepted by `usable` and avoiding `blocked`
/// vertices. Sources are seeded in ascending order and edges scanned by id.
pub fn shortest_path(
    g: &SignedGraph,
    sources: &BTreeSet<VertexId>,
    targets: &BTreeSet<VertexId>,
    usable: &dyn Fn(&Edge) -> bool,
    blocked: &[bool],
) -> Option<Path> {
    let n = g.vertex_count();
    let mut parent: Vec<Option<(VertexId, EdgeId)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &s in sources {
        if !seen[s.0] {
            seen[s.0] = true;
            queue.push_back(s);
        }
    }
    while let Some(x) = queue.pop_front() {
        if targets.contains(&x) {
            let mut vertices = vec![x];
            let mut edges = Vec::new();
            let mut at = x;
            while let Some((p, e)) = parent[at.0] {
                vertices.push(p);
                edges.push(e);
                at = p;
            }
            vertices.reverse();
            edges.reverse();
            return Some(Path { vertices, edges });
        }
        for e in g.incident_edges(x) {
            let edge = g.edge(e).expect("incident");
            if edge.is_loop() || !usable(edge) {
                continue;
            }
            let y = edge.other(x);
            if !seen[y.0] && !blocked[y.0] {
                seen[y.0] = true;
                parent[y.0] = Some((x, e));
                queue.push_back(y);
            }
        }
    }
    None
}

/// An unbalanced circuit, if any: the lexicographically least (by sorted
/// edge ids) among the fundamental circuits of a BFS spanning forest.
pub fn find_unbalanced_circuit(g: &SignedGraph) -> Option<Circuit> {
    let n = g.vertex_count();
    let mut parent: Vec<Option<(VertexId, EdgeId)>> = vec![None; n];
    let mut depth = vec![0usize; n];
    let mut mu = vec![Sign::Positive; n];
    let mut seen = vec![false; n];
    let mut tree = BTreeSet::new();
    for root in g.vertices() {
        if seen[root.0] {
            continue;
        }
        seen[root.0] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for e in g.incident_edges(x) {
                let edge = g.edge(e).expect("incident");
                let y = edge.other(x);
                if !seen[y.0] {
                    seen[y.0] = true;
                    parent[y.0] = Some((x, e));
                    depth[y.0] = depth[x.0] + 1;
                    mu[y.0] = mu[x.0].times(edge.sign);
                    tree.insert(e);
                    queue.push_back(y);
                }
            }
        }
    }
    let mut best: Option<Circuit> = None;
    for edge in g.edges() {
        if tree.contains(&edge.id) || mu[edge.a.0].times(mu[edge.b.0]) == edge.sign {
            continue;
        }
        let c = if edge.is_loop() {
            Circuit { vertices: vec![edge.a], edges: vec![edge.id] }
        } else {
            fundamental_circuit(edge, &parent, &depth)
        };
        if best.as_ref().is_none_or(|b| c.sorted_edges() < b.sorted_edges()) {
            best = Some(c);
        }
    }
    best
}

fn fundamental_circuit(edge: &Edge, parent: &[Option<(VertexId, EdgeId)>], depth: &[usize]) -> Circuit {
    let (mut x, mut y) = (edge.a, edge.b);
    let mut up_x = vec![];
    let mut up_y = vec![];
    while depth[x.0] > depth[y.0] {
        let (p, e) = parent[x.0].expect("non-root");
        up_x.push((x, e));
        x = p;
    }
    while depth[y.0] > depth[x.0] {
        let (p, e) = parent[y.0].expect("non-root");
        up_y.push((y, e));
        y = p;
    }
    while x != y {
        let (px, ex) = parent[x.0].expect("non-root");
        let (py, ey) = parent[y.0].expect("non-root");
        up_x.push((x, ex));
        up_y.push((y, ey));
        x = px;
        y = py;
    }
    let lca = x;
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for &(v, e) in &up_x {
        vertices.push(v);
        edges.push(e);
    }
    vertices.push(lca);
    for &(v, e) in up_y.iter().rev() {
        edges.push(e);
        vertices.push(v);
    }
    edges.push(edge.id);
    Circuit { vertices, edges }
}

/// Depth-first search over simple paths with parity pruning.
struct ParitySearch<'a> {
    g: &'a SignedGraph,
    usable: &'a dyn Fn(&Edge) -> bool,
    blocked: Vec<bool>,
    target: VertexId,
    want_odd: bool,
    first_only: bool,
}

impl ParitySearch<'_> {
    /// Region reachable from `x` over unblocked vertices. Returns whether the
    /// target is reachable and, if the region carries no unbalanced circuit
    /// of usable non-loop edges, the fixed parity of every `x`-target path.
    fn region(&self, x: VertexId) -> (bool, Option<bool>, Vec<Option<(VertexId, EdgeId)>>) {
        let n = self.g.vertex_count();
        let mut mu: Vec<Option<Sign>> = vec![None; n];
        let mut parent = vec![None; n];
        mu[x.0] = Some(Sign::Positive);
        let mut balanced = true;
        let mut queue = VecDeque::from([x]);
        while let Some(a) = queue.pop_front() {
            for e in self.g.incident_edges(a) {
                let edge = self.g.edge(e).expect("incident");
                if edge.is_loop() || !(self.usable)(edge) {
                    continue;
                }
                let b = edge.other(a);
                if self.blocked[b.0] && b != x {
                    continue;
                }
                let want = mu[a.0].expect("visited").times(edge.sign);
                match mu[b.0] {
                    None => {
                        mu[b.0] = Some(want);
                        parent[b.0] = Some((a, e));
                        if b != self.target {
                            queue.push_back(b);
                        }
                    }
                    Some(s) if s != want => balanced = false,
                    Some(_) => {}
                }
            }
        }
        let reached = mu[self.target.0].is_some();
        // Paths end at the target, so edges beyond it never matter; the BFS
        // above does not expand the target, which keeps the test sound.
        let parity = (reached && balanced).then(|| mu[self.target.0].expect("reached").is_negative());
        (reached, parity, parent)
    }

    fn run(
        &mut self,
        x: VertexId,
        odd: bool,
        vs: &mut Vec<VertexId>,
        es: &mut Vec<EdgeId>,
        out: &mut dyn FnMut(&[VertexId], &[EdgeId]) -> bool,
    ) -> bool {
        if x == self.target {
            return odd == self.want_odd && out(vs, es);
        }
        let (reached, parity, parent) = self.region(x);
        if !reached {
            return false;
        }
        if let Some(p) = parity {
            if (odd ^ p) != self.want_odd {
                return false;
            }
            if self.first_only {
                let mut tail = vec![];
                let mut at = self.target;
                while at != x {
                    let (p, e) = parent[at.0].expect("tree path");
                    tail.push((at, e));
                    at = p;
                }
                let (mut vs2, mut es2) = (vs.clone(), es.clone());
                for &(v, e) in tail.iter().rev() {
                    vs2.push(v);
                    es2.push(e);
                }
                return out(&vs2, &es2);
            }
        }
        for e in self.g.incident_edges(x) {
            let edge = self.g.edge(e).expect("incident");
            if edge.is_loop() || !(self.usable)(edge) {
                continue;
            }
            let y = edge.other(x);
            if self.blocked[y.0] {
                continue;
            }
            self.blocked[y.0] = true;
            vs.push(y);
            es.push(e);
            let stop = self.run(y, odd ^ edge.sign.is_negative(), vs, es, out);
            vs.pop();
            es.pop();
            self.blocked[y.0] = false;
            if stop {
                return true;
            }
        }
        false
    }
}

/// Calls `out` on circuits through the non-loop edge `e` whose negative count
/// has parity `odd`, using only usable edges and unblocked vertices. With
/// `first_only`, the region shortcut may skip enumeration. Stops when `out`
/// returns true, and returns whether it stopped.
fn circuits_through(
    g: &SignedGraph,
    e: &Edge,
    odd: bool,
    usable: &dyn Fn(&Edge) -> bool,
    blocked: &[bool],
    first_only: bool,
    out: &mut dyn FnMut(Circuit) -> bool,
) -> bool {
    let id = e.id;
    let rest = |x: &Edge| x.id != id && usable(x);
    let mut blocked = blocked.to_vec();
    blocked[e.b.0] = true;
    let mut search = ParitySearch {
        g,
        usable: &rest,
        blocked,
        target: e.a,
        want_odd: odd ^ e.sign.is_negative(),
        first_only,
    };
    let mut vs = vec![e.b];
    let mut es = vec![];
    search.run(e.b, false, &mut vs, &mut es, &mut |vs, es| {
        let mut edges = es.to_vec();
        edges.push(id);
        out(Circuit { vertices: vs.to_vec(), edges })
    })
}

/// An unbalanced circuit through `w` inside the region given by `usable` and
/// `blocked`. Negative loops are tried first, then edges at `w` by id.
fn odd_circuit_at(g: &SignedGraph, w: VertexId, usable: &dyn Fn(&Edge) -> bool, blocked: &[bool]) -> Option<Circuit> {
    let ids = g.incident_edges(w);
    for &e in &ids {
        let edge = g.edge(e).expect("incident");
        if edge.is_loop() && edge.sign.is_negative() && usable(edge) {
            return Some(Circuit { vertices: vec![w], edges: vec![e] });
        }
    }
    for &e in &ids {
        let edge = g.edge(e).expect("incident");
        if edge.is_loop() || !usable(edge) || blocked[edge.other(w).0] {
            continue;
        }
        let mut found = None;
        circuits_through(g, edge, true, usable, blocked, true, &mut |c| {
            found = Some(c);
            true
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CertKind {
    BalancedCircuit,
    ShortBarbell,
    LongBarbell,
}

impl CertKind {
    pub fn name(self) -> &'static str {
        match self {
            CertKind::BalancedCircuit => "balanced-circuit",
            CertKind::ShortBarbell => "short-barbell",
            CertKind::LongBarbell => "long-barbell",
        }
    }

    pub fn parse(s: &str) -> Option<CertKind> {
        match s {
            "balanced-circuit" => Some(CertKind::BalancedCircuit),
            "short-barbell" => Some(CertKind::ShortBarbell),
            "long-barbell" => Some(CertKind::LongBarbell),
            _ => None,
        }
    }
}

/// A signed circuit containing `covered`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedCircuitCert {
    pub kind: CertKind,
    pub circuit1: Vec<EdgeId>,
    pub circuit2: Vec<EdgeId>,
    pub path: Vec<EdgeId>,
    pub covered: EdgeId,
}

impl SignedCircuitCert {
    pub fn edges(&self) -> BTreeSet<EdgeId> {
        self.circuit1.iter().chain(&self.circuit2).chain(&self.path).copied().collect()
    }

    /// Checks every structural invariant of the certificate against `g`.
    pub fn validate(&self, g: &SignedGraph) -> Result<(), String> {
        let c1 = Circuit::from_edges(g, &self.circuit1).ok_or("circuit1 is not a circuit")?;
        if !self.edges().contains(&self.covered) {
            return Err(format!("covered edge {} is not in the certificate", self.covered));
        }
        match self.kind {
            CertKind::BalancedCircuit => {
                if !self.circuit2.is_empty() || !self.path.is_empty() {
                    return Err("balanced circuit with extra parts".into());
                }
                if !c1.is_balanced(g) {
                    return Err("circuit1 is unbalanced".into());
                }
            }
            CertKind::ShortBarbell | CertKind::LongBarbell => {
                let c2 = Circuit::from_edges(g, &self.circuit2).ok_or("circuit2 is not a circuit")?;
                if c1.is_balanced(g) || c2.is_balanced(g) {
                    return Err("barbell circuit is balanced".into());
                }
                if !c1.edge_set().is_disjoint(&c2.edge_set()) {
                    return Err("barbell circuits share an edge".into());
                }
                let common: Vec<VertexId> = c1.vertex_set().intersection(&c2.vertex_set()).copied().collect();
                if self.kind == CertKind::ShortBarbell {
                    if !self.path.is_empty() || common.len() != 1 {
                        return Err("short barbell circuits must meet in exactly one vertex".into());
                    }
                } else {
                    if !common.is_empty() {
                        return Err("long barbell circuits must be vertex-disjoint".into());
                    }
                    let p = path_from_edges(g, &self.path).ok_or("connector is not a path")?;
                    let (s, t) = (p.start(), p.end());
                    let (v1, v2) = (c1.vertex_set(), c2.vertex_set());
                    let ok_ends = (v1.contains(&s) && v2.contains(&t)) || (v1.contains(&t) && v2.contains(&s));
                    let inner_ok = p.vertices[1..p.vertices.len() - 1]
                        .iter()
                        .all(|v| !v1.contains(v) && !v2.contains(v));
                    if !ok_ends || !inner_ok {
                        return Err("connector must meet each circuit in exactly one end".into());
                    }
                    if !p.edges.iter().all(|e| !c1.edge_set().contains(e) && !c2.edge_set().contains(e)) {
                        return Err("connector shares an edge with a circuit".into());
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let list = |v: &[EdgeId]| v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ");
        let mut out = String::new();
        writeln!(out, "cert {}", self.kind.name()).unwrap();
        writeln!(out, "covered: {}", self.covered).unwrap();
        writeln!(out, "c1: {}", list(&self.circuit1)).unwrap();
        writeln!(out, "c2: {}", list(&self.circuit2)).unwrap();
        writeln!(out, "path: {}", list(&self.path)).unwrap();
        out
    }

    pub fn from_text(text: &str) -> Result<SignedCircuitCert, ParseError> {
        let mut kind = None;
        let mut covered = None;
        let mut lists: [Option<Vec<EdgeId>>; 3] = [None, None, None];
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(k) = line.strip_prefix("cert ") {
                kind = Some(CertKind::parse(k.trim()).ok_or_else(|| ParseError::new(line_no, format!("unknown kind `{k}`")))?);
                continue;
            }
            let (key, rest) = line.split_once(':').ok_or_else(|| ParseError::new(line_no, "expected `key: values`"))?;
            let ids = rest
                .split_whitespace()
                .map(|s| s.parse::<usize>().map(EdgeId))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| ParseError::new(line_no, "bad edge id"))?;
            match key {
                "covered" if ids.len() == 1 => covered = Some(ids[0]),
                "c1" => lists[0] = Some(ids),
                "c2" => lists[1] = Some(ids),
                "path" => lists[2] = Some(ids),
                _ => return Err(ParseError::new(line_no, format!("unexpected key `{key}`"))),
            }
        }
        let missing = |what: &str| ParseError::new(0, format!("missing {what}"));
        let [c1, c2, path] = lists;
        Ok(SignedCircuitCert {
            kind: kind.ok_or_else(|| missing("`cert` line"))?,
            covered: covered.ok_or_else(|| missing("`covered` line"))?,
            circuit1: c1.ok_or_else(|| missing("`c1` line"))?,
            circuit2: c2.unwrap_or_default(),
            path: path.unwrap_or_default(),
        })
    }
}

impl fmt::Display for SignedCircuitCert {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Rebuilds a simple path from its edge set.
pub fn path_from_edges(g: &SignedGraph, edges: &[EdgeId]) -> Option<Path> {
    let set: BTreeSet<EdgeId> = edges.iter().copied().collect();
    if set.is_empty() || set.len() != edges.len() {
        return None;
    }
    let es: Vec<&Edge> = set.iter().map(|&e| g.edge(e)).collect::<Option<_>>()?;
    if es.iter().any(|e| e.is_loop()) {
        return None;
    }
    let mut deg = std::collections::BTreeMap::new();
    for e in &es {
        *deg.entry(e.a).or_insert(0) += 1;
        *deg.entry(e.b).or_insert(0) += 1;
    }
    let ends: Vec<VertexId> = deg.iter().filter(|(_, &d)| d == 1).map(|(&v, _)| v).collect();
    if ends.len() != 2 || deg.values().any(|&d| d > 2) {
        return None;
    }
    let mut vertices = vec![ends[0]];
    let mut out = vec![];
    let mut used = BTreeSet::new();
    let mut at = ends[0];
    while at != ends[1] {
        let next = es.iter().find(|e| !used.contains(&e.id) && (e.a == at || e.b == at))?;
        used.insert(next.id);
        out.push(next.id);
        at = next.other(at);
        vertices.push(at);
    }
    (used.len() == es.len()).then_some(Path { vertices, edges: out })
}

/// Vertices of the component containing `start` after deleting the edges
/// rejected by `usable` and the `blocked` vertices.
fn region_vertices(g: &SignedGraph, start: VertexId, usable: &dyn Fn(&Edge) -> bool, blocked: &[bool]) -> BTreeSet<VertexId> {
    let keep = |e: &Edge| usable(e) && !blocked[e.a.0] && !blocked[e.b.0];
    let reach = reachable_on(g, start, &keep);
    g.vertices().filter(|v| reach[v.0]).collect()
}

fn barbell_with(g: &SignedGraph, e: EdgeId, c1: &Circuit, long: bool) -> Option<SignedCircuitCert> {
    let c1_edges = c1.edge_set();
    for &w in &c1.vertices {
        let mut blocked = vec![false; g.vertex_count()];
        for &v in &c1.vertices {
            if v != w {
                blocked[v.0] = true;
            }
        }
        let usable = |x: &Edge| !c1_edges.contains(&x.id);
        let short = odd_circuit_at(g, w, &usable, &blocked);
        if !long {
            if let Some(c2) = short {
                return Some(SignedCircuitCert {
                    kind: CertKind::ShortBarbell,
                    circuit1: c1.edges.clone(),
                    circuit2: c2.edges,
                    path: vec![],
                    covered: e,
                });
            }
            continue;
        }
        if short.is_some() {
            continue;
        }
        let region = region_vertices(g, w, &usable, &blocked);
        let k = g.restrict(|x| usable(x) && region.contains(&x.a) && region.contains(&x.b));
        let Some(c2) = find_unbalanced_circuit(&k) else { continue };
        let path = shortest_path(g, &BTreeSet::from([w]), &c2.vertex_set(), &usable, &blocked)?;
        return Some(SignedCircuitCert {
            kind: CertKind::LongBarbell,
            circuit1: c1.edges.clone(),
            circuit2: c2.edges,
            path: path.edges,
            covered: e,
        });
    }
    None
}

/// A signed circuit containing `e`: balanced circuits are preferred, then
/// short barbells, then long barbells.
pub fn signed_circuit_through(g: &SignedGraph, e: EdgeId) -> Result<Option<SignedCircuitCert>, GraphError> {
    let edge = *g.try_edge(e)?;
    let all = |_: &Edge| true;
    let none_blocked = vec![false; g.vertex_count()];
    if edge.is_loop() {
        if edge.sign == Sign::Positive {
            return Ok(Some(SignedCircuitCert {
                kind: CertKind::BalancedCircuit,
                circuit1: vec![e],
                circuit2: vec![],
                path: vec![],
                covered: e,
            }));
        }
        let c1 = Circuit { vertices: vec![edge.a], edges: vec![e] };
        return Ok(barbell_with(g, e, &c1, false).or_else(|| barbell_with(g, e, &c1, true)));
    }
    let without = |x: &Edge| x.id != e;
    let reach = reachable_on(g, edge.a, &without);
    if !reach[edge.b.0] {
        return Ok(bridge_barbell(g, &edge));
    }
    let mut balanced = None;
    circuits_through(g, &edge, false, &all, &none_blocked, true, &mut |c| {
        balanced = Some(c);
        true
    });
    if let Some(c) = balanced {
        return Ok(Some(SignedCircuitCert {
            kind: CertKind::BalancedCircuit,
            circuit1: c.edges,
            circuit2: vec![],
            path: vec![],
            covered: e,
        }));
    }
    let rest_balanced = potential_on(g, &|x: &Edge| x.id != e && reach[x.a.0]).is_ok();
    if rest_balanced {
        return Ok(None);
    }
    for long in [false, true] {
        let mut cert = None;
        circuits_through(g, &edge, true, &all, &none_blocked, false, &mut |c1| {
            cert = barbell_with(g, e, &c1, long);
            cert.is_some()
        });
        if cert.is_some() {
            return Ok(cert);
        }
    }
    Ok(None)
}

fn bridge_barbell(g: &SignedGraph, edge: &Edge) -> Option<SignedCircuitCert> {
    let id = edge.id;
    let without = |x: &Edge| x.id != id;
    let mut sides = Vec::new();
    for end in [edge.a, edge.b] {
        let reach = reachable_on(g, end, &without);
        let side = g.restrict(|x| x.id != id && reach[x.a.0]);
        let c = find_unbalanced_circuit(&side)?;
        let blocked = vec![false; g.vertex_count()];
        let p = shortest_path(&side, &c.vertex_set(), &BTreeSet::from([end]), &|_| true, &blocked)?;
        sides.push((c, p));
    }
    let (c2, p2) = sides.pop().expect("two sides");
    let (c1, p1) = sides.pop().expect("two sides");
    let mut path = p1.edges.clone();
    path.push(id);
    path.extend(p2.reversed().edges);
    Some(SignedCircuitCert {
        kind: CertKind::LongBarbell,
        circuit1: c1.edges,
        circuit2: c2.edges,
        path,
        covered: id,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    CircuitCover,
    Deletion,
    CrossCheck,
}

/// Admissibility by edge deletion, decided per component: a balanced
/// component must be bridgeless; an unbalanced one must leave only
/// unbalanced components after deleting any single edge.
pub fn admissible_by_deletion(g: &SignedGraph) -> bool {
    for comp in g.components() {
        let k = &comp.graph;
        if k.edge_count() == 0 {
            continue;
        }
        if k.is_balanced() {
            if !k.bridges().is_empty() {
                return false;
            }
            continue;
        }
        for e in k.edges() {
            let id = e.id;
            let rest = k.restrict(|x| x.id != id);
            if rest.components().iter().any(|c| c.graph.is_balanced()) {
                return false;
            }
        }
    }
    true
}

pub fn admissible_by_circuit_cover(g: &SignedGraph) -> bool {
    g.edge_ids().all(|e| signed_circuit_through(g, e).expect("own edge").is_some())
}

pub fn is_flow_admissible(g: &SignedGraph, method: Method) -> Result<bool, AdmissibilityError> {
    Ok(match method {
        Method::Deletion => admissible_by_deletion(g),
        Method::CircuitCover => admissible_by_circuit_cover(g),
        Method::CrossCheck => {
            let deletion = admissible_by_deletion(g);
            let circuit_cover = admissible_by_circuit_cover(g);
            if deletion != circuit_cover {
                return Err(AdmissibilityError::Mismatch { circuit_cover, deletion });
            }
            deletion
        }
    })
}

/// One certificate (or `None`) per edge, in id order.
pub fn certificates(g: &SignedGraph) -> Vec<(EdgeId, Option<SignedCircuitCert>)> {
    g.edge_ids().map(|e| (e, signed_circuit_through(g, e).expect("own edge"))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use Sign::{Negative as N, Positive as P};

    fn graph(n: usize, t: &[(usize, usize, Sign)]) -> SignedGraph {
        SignedGraph::from_triples(n, t).unwrap()
    }

    fn ids(v: &[usize]) -> Vec<EdgeId> {
        v.iter().map(|&i| EdgeId(i)).collect()
    }

    #[test]
    fn no_unbalanced_circuit_in_positive_graph() {
        let g = graph(3, &[(0, 1, P), (1, 2, P), (2, 0, P), (0, 0, P)]);
        assert_eq!(find_unbalanced_circuit(&g), None);
    }

    #[test]
    fn negative_loop_is_found() {
        let g = graph(2, &[(0, 1, P), (1, 1, N)]);
        let c = find_unbalanced_circuit(&g).unwrap();
        assert_eq!(c.edges, ids(&[1]));
        assert_eq!(c.vertices, vec![VertexId(1)]);
    }

    #[test]
    fn theta_graph_circuit_goes_through_the_negative_edge() {
        // Three internally disjoint 0-1 paths: direct, via 2, via 3; edge 0 negative.
        let g = graph(4, &[(0, 1, N), (0, 2, P), (2, 1, P), (0, 3, P), (3, 1, P)]);
        let c = find_unbalanced_circuit(&g).unwrap();
        assert!(c.edges.contains(&EdgeId(0)));
        assert!(!c.is_balanced(&g));
        assert_eq!(Circuit::from_edges(&g, &c.edges).unwrap().len(), c.len());
        // Independent check: of the three circuits of the theta graph, exactly
        // the two through edge 0 are unbalanced.
        let all = [ids(&[0, 1, 2]), ids(&[0, 3, 4]), ids(&[1, 2, 3, 4])];
        let odd: Vec<_> = all.iter().filter(|c| Circuit::from_edges(&g, c).unwrap().negative_count(&g) % 2 == 1).collect();
        assert_eq!(odd.len(), 2);
        assert!(odd.contains(&&c.sorted_edges()));
    }

    #[test]
    fn circuit_structure_is_consistent() {
        let g = graph(5, &[(0, 1, P), (1, 2, P), (2, 3, N), (3, 4, P), (4, 0, P), (1, 3, P)]);
        let c = find_unbalanced_circuit(&g).unwrap();
        for (i, &e) in c.edges.iter().enumerate() {
            let edge = g.edge(e).unwrap();
            let (x, y) = (c.vertices[i], c.vertices[(i + 1) % c.len()]);
            assert!((edge.a == x && edge.b == y) || (edge.a == y && edge.b == x));
        }
    }

    #[test]
    fn positive_triangle_edge_has_balanced_certificate() {
        let g = graph(3, &[(0, 1, P), (1, 2, P), (2, 0, P)]);
        let cert = signed_circuit_through(&g, EdgeId(0)).unwrap().unwrap();
        assert_eq!(cert.kind, CertKind::BalancedCircuit);
        assert_eq!(cert.edges().len(), 3);
        cert.validate(&g).unwrap();
    }

    #[test]
    fn two_negative_loops_form_short_barbell() {
        let g = graph(1, &[(0, 0, N), (0, 0, N)]);
        for e in 0..2 {
            let cert = signed_circuit_through(&g, EdgeId(e)).unwrap().unwrap();
            assert_eq!(cert.kind, CertKind::ShortBarbell);
            cert.validate(&g).unwrap();
        }
    }

    #[test]
    fn bridge_between_negative_loops_is_a_long_barbell() {
        let g = graph(2, &[(0, 0, N), (0, 1, P), (1, 1, N)]);
        let cert = signed_circuit_through(&g, EdgeId(1)).unwrap().unwrap();
        assert_eq!(cert.kind, CertKind::LongBarbell);
        assert_eq!(cert.path, ids(&[1]));
        cert.validate(&g).unwrap();
        let loop_cert = signed_circuit_through(&g, EdgeId(0)).unwrap().unwrap();
        assert_eq!(loop_cert.kind, CertKind::LongBarbell);
        loop_cert.validate(&g).unwrap();
        assert!(is_flow_admissible(&g, Method::CrossCheck).unwrap());
    }

    #[test]
    fn long_connector_through_bridge() {
        // Unbalanced triangles joined by a 3-edge path whose middle edge is a bridge.
        let g = graph(
            8,
            &[(0, 1, N), (1, 2, P), (2, 0, P), (2, 3, P), (3, 4, N), (4, 5, P), (5, 6, P), (6, 7, N), (7, 5, P)],
        );
        let cert = signed_circuit_through(&g, EdgeId(4)).unwrap().unwrap();
        assert_eq!(cert.kind, CertKind::LongBarbell);
        assert_eq!(cert.path.len(), 3);
        cert.validate(&g).unwrap();
        assert!(is_flow_admissible(&g, Method::CrossCheck).unwrap());
    }

    #[test]
    fn lone_unbalanced_circuit_is_inadmissible() {
        let g = graph(3, &[(0, 1, P), (1, 2, N), (2, 0, P)]);
        assert!(!is_flow_admissible(&g, Method::CrossCheck).unwrap());
        assert_eq!(signed_circuit_through(&g, EdgeId(0)).unwrap(), None);
    }

    #[test]
    fn positive_bridgeless_is_admissible() {
        let g = graph(4, &[(0, 1, P), (1, 2, P), (2, 3, P), (3, 0, P), (0, 2, P)]);
        assert!(is_flow_admissible(&g, Method::CrossCheck).unwrap());
        let with_bridge = graph(4, &[(0, 1, P), (1, 2, P), (2, 0, P), (2, 3, P), (3, 3, P)]);
        assert!(!is_flow_admissible(&with_bridge, Method::CrossCheck).unwrap());
    }

    #[test]
    fn invalid_certificates_are_rejected() {
        let g = graph(3, &[(0, 1, P), (1, 2, N), (2, 0, P)]);
        let bad = SignedCircuitCert {
            kind: CertKind::BalancedCircuit,
            circuit1: ids(&[0, 1, 2]),
            circuit2: vec![],
            path: vec![],
            covered: EdgeId(0),
        };
        assert!(bad.validate(&g).is_err());
        let not_circuit = SignedCircuitCert { circuit1: ids(&[0, 1]), ..bad.clone() };
        assert!(not_circuit.validate(&g).is_err());
    }

    #[test]
    fn certificate_text_round_trip() {
        let g = graph(2, &[(0, 0, N), (0, 1, P), (1, 1, N)]);
        let cert = signed_circuit_through(&g, EdgeId(1)).unwrap().unwrap();
        let text = cert.to_text();
        assert!(text.starts_with("cert long-barbell\n"));
        assert_eq!(SignedCircuitCert::from_text(&text).unwrap(), cert);
        assert!(SignedCircuitCert::from_text("cert odd\n").is_err());
    }

    #[test]
    fn switching_preserves_admissibility() {
        let g = graph(4, &[(0, 1, N), (1, 2, P), (2, 3, P), (3, 0, P), (0, 2, N), (1, 3, P)]);
        let base = is_flow_admissible(&g, Method::CrossCheck).unwrap();
        for v in g.vertices() {
            assert_eq!(is_flow_admissible(&g.switch_at(v).unwrap(), Method::CrossCheck).unwrap(), base);
        }
    }

    #[test]
    fn unknown_edge_is_an_error() {
        let g = graph(1, &[(0, 0, N)]);
        assert!(signed_circuit_through(&g, EdgeId(9)).is_err());
    }
}
