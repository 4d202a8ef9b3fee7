//! Constructive building blocks: 2-flows on eulerian graphs, 3-flows on
//! barbells, lifting a Z2-flow support to a 3-flow, extending a flow over a
//! contracted circuit, and the unbalanced-circuit cover 4-flow.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::circuits::{is_flow_admissible, path_from_edges, CertKind, Circuit, Method, SignedCircuitCert};
use crate::error::LemmaError;
use crate::flows::{conserves, level_set, support, switch_flow, verify_int_flow, GroupFlow, IntFlow};
use crate::graph::{potential_on, Edge, EdgeId, End, Sign, SignedGraph, VertexId};
use crate::oracle::{constrained_flow_search, shaped_flow_search, AllowedValues, SearchBudget, SearchOutcome, SearchShape};
use crate::surgery::contract;

/// The end of `e` a traversal leaves from when it departs `from`. Loops are
/// left through their A end.
fn departing_end(e: &Edge, from: VertexId) -> End {
    if e.a == from {
        End::A
    } else {
        End::B
    }
}

/// Assigns `±1` along a closed walk so that every pass through a vertex
/// cancels. `s` is the contribution of each edge at the vertex it departs
/// from; it is multiplied by the edge sign at every step. Returns the value
/// per edge and the final `s`, which equals `s0` exactly when the walk has an
/// even number of negative edges.
fn walk_values(g: &SignedGraph, walk: &[(EdgeId, VertexId)], s0: i64) -> (Vec<(EdgeId, i64)>, i64) {
    let mut s = s0;
    let mut out = Vec::with_capacity(walk.len());
    for &(e, from) in walk {
        let edge = g.edge(e).expect("walk edge");
        out.push((e, edge.tau(departing_end(edge, from)) * s));
        s *= edge.sign.value();
    }
    (out, s)
}

/// Closed eulerian walks (edge, departure vertex), one per component with edges.
fn euler_tours(g: &SignedGraph) -> Vec<Vec<(EdgeId, VertexId)>> {
    let mut used = vec![false; g.edge_count()];
    let mut ptr = vec![0usize; g.vertex_count()];
    let incident: Vec<Vec<EdgeId>> = g.vertices().map(|v| g.half_edges(v).iter().map(|h| h.edge).collect()).collect();
    let mut tours = Vec::new();
    for start in g.vertices() {
        if incident[start.0].iter().all(|e| used[g.position(*e).expect("edge")]) {
            continue;
        }
        let mut stack: Vec<(VertexId, Option<(EdgeId, VertexId)>)> = vec![(start, None)];
        let mut tour = Vec::new();
        while let Some(&(v, _)) = stack.last() {
            let mut next = None;
            while ptr[v.0] < incident[v.0].len() {
                let e = incident[v.0][ptr[v.0]];
                ptr[v.0] += 1;
                let pos = g.position(e).expect("edge");
                if !used[pos] {
                    used[pos] = true;
                    next = Some(e);
                    break;
                }
            }
            match next {
                Some(e) => {
                    let w = g.edge(e).expect("edge").other(v);
                    stack.push((w, Some((e, v))));
                }
                None => {
                    let (_, step) = stack.pop().expect("nonempty");
                    if let Some(step) = step {
                        tour.push(step);
                    }
                }
            }
        }
        tour.reverse();
        tours.push(tour);
    }
    tours
}

/// A nowhere-zero 2-flow, which exists exactly when every component is
/// eulerian with an even number of negative edges.
pub fn eulerian_2_flow(g: &SignedGraph) -> Option<IntFlow> {
    if g.vertices().any(|v| g.degree(v) % 2 == 1) {
        return None;
    }
    if g.components().iter().any(|c| c.graph.negative_count() % 2 == 1) {
        return None;
    }
    let mut values = BTreeMap::new();
    for tour in euler_tours(g) {
        let (vals, s) = walk_values(g, &tour, 1);
        debug_assert_eq!(s, 1);
        values.extend(vals);
    }
    let f = IntFlow::from_map(values);
    debug_assert!(verify_int_flow(g, &f, 2, true).unwrap_or(false));
    Some(f)
}

/// Values around a circuit read from `circuit.vertices[0]` with initial
/// contribution `s0`. An unbalanced circuit leaves a net `2 * s0` at its
/// first vertex; a balanced one conserves everywhere.
fn circuit_values(g: &SignedGraph, c: &Circuit, s0: i64) -> Vec<(EdgeId, i64)> {
    let walk: Vec<(EdgeId, VertexId)> = c.edges.iter().copied().zip(c.vertices.iter().copied()).collect();
    walk_values(g, &walk, s0).0
}

/// The 3-flow of a barbell certificate, on the certificate's edges.
pub fn barbell_flow_from_cert(g: &SignedGraph, cert: &SignedCircuitCert) -> Result<IntFlow, LemmaError> {
    cert.validate(g).map_err(LemmaError::Precondition)?;
    if cert.kind == CertKind::BalancedCircuit {
        return Err(LemmaError::Precondition("certificate is not a barbell".into()));
    }
    let c1 = Circuit::from_edges(g, &cert.circuit1).expect("validated");
    let c2 = Circuit::from_edges(g, &cert.circuit2).expect("validated");
    let mut values = Vec::new();
    if cert.kind == CertKind::ShortBarbell {
        let w = *c1.vertex_set().intersection(&c2.vertex_set()).next().expect("validated");
        values.extend(circuit_values(g, &c1.rotated_to(w).expect("on circuit"), 1));
        values.extend(circuit_values(g, &c2.rotated_to(w).expect("on circuit"), -1));
    } else {
        let mut p = path_from_edges(g, &cert.path).expect("validated");
        if !c1.vertex_set().contains(&p.start()) {
            p = p.reversed();
        }
        values.extend(circuit_values(g, &c1.rotated_to(p.start()).expect("on circuit"), 1));
        // The connector carries 2 and absorbs the 2 leaked by the first circuit.
        let walk: Vec<(EdgeId, VertexId)> = p.edges.iter().copied().zip(p.vertices.iter().copied()).collect();
        let (path_vals, t_end) = walk_values(g, &walk, -1);
        values.extend(path_vals.into_iter().map(|(e, x)| (e, 2 * x)));
        values.extend(circuit_values(g, &c2.rotated_to(p.end()).expect("on circuit"), t_end));
    }
    let f = IntFlow::from_map(values.into_iter().collect());
    let keep = cert.edges();
    let q = g.restrict(|e| keep.contains(&e.id));
    if !verify_int_flow(&q, &f, 3, true)? {
        return Err(LemmaError::Internal("barbell flow does not verify".into()));
    }
    Ok(f)
}

/// Reads the barbell structure off `q` (isolated vertices ignored) and
/// returns its nowhere-zero 3-flow.
pub fn barbell_3_flow(q: &SignedGraph) -> Result<IntFlow, LemmaError> {
    let cert = barbell_structure(q).ok_or_else(|| LemmaError::Precondition("graph is not a barbell".into()))?;
    barbell_flow_from_cert(q, &cert)
}

fn barbell_structure(q: &SignedGraph) -> Option<SignedCircuitCert> {
    let live: Vec<VertexId> = q.vertices().filter(|&v| q.degree(v) > 0).collect();
    if live.is_empty() || q.component_vertices().iter().filter(|c| q.degree(c[0]) > 0 || c.len() > 1).count() != 1 {
        return None;
    }
    let special: Vec<VertexId> = live.iter().copied().filter(|&v| q.degree(v) != 2).collect();
    let walk = |from: VertexId, first: EdgeId, stops: &[VertexId]| -> (Vec<EdgeId>, VertexId) {
        let mut edges = vec![first];
        let mut at = q.edge(first).expect("edge").other(from);
        while !stops.contains(&at) {
            let next = q.incident_edges(at).into_iter().find(|e| !edges.contains(e)).expect("degree two");
            edges.push(next);
            at = q.edge(next).expect("edge").other(at);
        }
        (edges, at)
    };
    let first_edge = |v: VertexId| q.incident_edges(v)[0];
    let rest = |taken: &[EdgeId]| -> Vec<EdgeId> { q.edge_ids().filter(|e| !taken.contains(e)).collect() };
    let cert = match special.as_slice() {
        [w] if q.degree(*w) == 4 => {
            let (c1, _) = walk(*w, first_edge(*w), &[*w]);
            SignedCircuitCert {
                kind: CertKind::ShortBarbell,
                circuit2: rest(&c1),
                covered: c1[0],
                circuit1: c1,
                path: vec![],
            }
        }
        [x, y] if q.degree(*x) == 3 && q.degree(*y) == 3 => {
            let mut c1 = None;
            let mut path = None;
            for e in q.incident_edges(*x) {
                if c1.as_ref().is_some_and(|c: &Vec<EdgeId>| c.contains(&e)) {
                    continue;
                }
                let (edges, end) = walk(*x, e, &[*x, *y]);
                if end == *x {
                    c1 = Some(edges);
                } else {
                    path = Some(edges);
                }
            }
            let (c1, path) = (c1?, path?);
            let mut taken = c1.clone();
            taken.extend(&path);
            SignedCircuitCert { kind: CertKind::LongBarbell, circuit2: rest(&taken), covered: c1[0], circuit1: c1, path }
        }
        _ => return None,
    };
    cert.validate(q).ok().map(|_| cert)
}

/// Checks that every vertex meets `s` an even number of times.
fn check_z2_support(g: &SignedGraph, s: &BTreeSet<EdgeId>) -> Result<(), LemmaError> {
    for &e in s {
        g.try_edge(e)?;
    }
    for v in g.vertices() {
        let d = g.half_edges(v).iter().filter(|h| s.contains(&h.edge)).count();
        if d % 2 == 1 {
            return Err(LemmaError::Precondition(format!("edge set has odd degree at vertex {v}")));
        }
    }
    Ok(())
}

/// A 3-flow with `|f| = 1` exactly on `s` and `|f| in {0, 2}` elsewhere.
///
/// Summing conservation over a component shows the negative edges of `s`
/// must be even in number there; when that fails the result is `None`. For a
/// 2-factor of a cubic graph the flow is built directly from a join in the
/// circuit graph; otherwise a constrained exact search decides.
pub fn z2_to_3_lift(g: &SignedGraph, s: &BTreeSet<EdgeId>, budget: &SearchBudget) -> Result<Option<IntFlow>, LemmaError> {
    check_z2_support(g, s)?;
    for comp in g.components() {
        let odd = comp.graph.edges().iter().filter(|e| s.contains(&e.id) && e.sign.is_negative()).count() % 2 == 1;
        if odd {
            return Ok(None);
        }
    }
    let spanning_two_factor = g.vertices().all(|v| g.half_edges(v).iter().filter(|h| s.contains(&h.edge)).count() == 2);
    let f = if g.is_cubic() && spanning_two_factor {
        lift_two_factor(g, s).ok_or_else(|| LemmaError::Internal("join construction failed".into()))?
    } else {
        let allowed: AllowedValues = g
            .edge_ids()
            .map(|e| (e, if s.contains(&e) { vec![1, -1] } else { vec![0, 2, -2] }))
            .collect();
        match constrained_flow_search(g, &allowed, budget, &mut |_| true)? {
            SearchOutcome::Found(f) => f,
            SearchOutcome::Absent => return Ok(None),
            SearchOutcome::BudgetExhausted => return Err(LemmaError::Budget),
        }
    };
    if !verify_int_flow(g, &f, 3, false)? || level_set(&f, 1) != *s {
        return Err(LemmaError::Internal("lifted flow does not verify".into()));
    }
    Ok(Some(f))
}

/// The join construction on a spanning 2-factor `s` of a cubic graph.
fn lift_two_factor(g: &SignedGraph, s: &BTreeSet<EdgeId>) -> Option<IntFlow> {
    let factor = g.restrict(|e| s.contains(&e.id));
    let circuits: Vec<Circuit> = factor
        .component_vertices()
        .into_iter()
        .map(|vs| {
            let mut es: Vec<EdgeId> = vs.iter().flat_map(|&v| factor.incident_edges(v)).collect();
            es.sort();
            es.dedup();
            Circuit::from_edges(g, &es).expect("2-regular component")
        })
        .collect();
    let mut owner = vec![usize::MAX; g.vertex_count()];
    for (i, c) in circuits.iter().enumerate() {
        for v in &c.vertices {
            owner[v.0] = i;
        }
    }
    // BFS forest of the circuit graph.
    let k = circuits.len();
    let mut parent: Vec<Option<EdgeId>> = vec![None; k];
    let mut seen = vec![false; k];
    let mut order = Vec::new();
    let mut roots = Vec::new();
    for r in 0..k {
        if seen[r] {
            continue;
        }
        seen[r] = true;
        roots.push(r);
        let mut queue = VecDeque::from([r]);
        while let Some(i) = queue.pop_front() {
            order.push(i);
            let mut out: Vec<EdgeId> = circuits[i].vertices.iter().flat_map(|&v| g.incident_edges(v)).collect();
            out.sort();
            out.dedup();
            for y in out {
                if s.contains(&y) {
                    continue;
                }
                let e = g.edge(y).expect("edge");
                let j = if owner[e.a.0] == i { owner[e.b.0] } else { owner[e.a.0] };
                if !seen[j] {
                    seen[j] = true;
                    parent[j] = Some(y);
                    queue.push_back(j);
                }
            }
        }
    }
    // Join of the unbalanced circuits inside the forest.
    let mut odd: Vec<bool> = circuits.iter().map(|c| !c.is_balanced(g)).collect();
    let mut join = BTreeSet::new();
    for &i in order.iter().rev() {
        if let Some(y) = parent[i] {
            if odd[i] {
                join.insert(y);
                odd[i] = false;
                let e = g.edge(y).expect("edge");
                let p = if owner[e.a.0] == i { owner[e.b.0] } else { owner[e.a.0] };
                odd[p] ^= true;
            }
        }
    }
    if roots.iter().any(|&r| odd[r]) {
        return None;
    }
    let join_at: BTreeMap<VertexId, EdgeId> = join
        .iter()
        .flat_map(|&y| {
            let e = g.edge(y).expect("edge");
            [(e.a, y), (e.b, y)]
        })
        .collect();
    // Per circuit with sign +1: values, and the contribution each join edge
    // must make at its end on the circuit.
    let mut values = BTreeMap::new();
    let mut need: BTreeMap<VertexId, i64> = BTreeMap::new();
    for c in &circuits {
        let l = c.len();
        let mut s_cur = 1i64;
        for j in 0..l {
            let edge = g.edge(c.edges[j]).expect("edge");
            values.insert(edge.id, edge.tau(departing_end(edge, c.vertices[j])) * s_cur);
            let arrive = c.vertices[(j + 1) % l];
            let sigma = edge.sign.value();
            if join_at.contains_key(&arrive) {
                need.insert(arrive, 2 * sigma * s_cur);
                s_cur *= -sigma;
            } else {
                s_cur *= sigma;
            }
        }
        if s_cur != 1 {
            return None;
        }
    }
    // Fix circuit signs along the forest so each join edge gets one value.
    let mut csign = vec![1i64; k];
    for &i in &order {
        let Some(y) = parent[i] else { continue };
        if !join.contains(&y) {
            continue;
        }
        let e = g.edge(y).expect("edge");
        let (pv, cv) = if owner[e.a.0] == i { (e.b, e.a) } else { (e.a, e.b) };
        let (pe, ce) = if owner[e.a.0] == i { (End::B, End::A) } else { (End::A, End::B) };
        let h = e.tau(pe) * csign[owner[pv.0]] * need[&pv];
        csign[i] = e.tau(ce) * h / need[&cv];
        values.insert(y, h);
    }
    for c in circuits.iter().enumerate() {
        for e in &c.1.edges {
            *values.get_mut(e).expect("circuit edge") *= csign[c.0];
        }
    }
    for e in g.edges() {
        values.entry(e.id).or_insert(0);
    }
    Some(IntFlow::from_map(values))
}

/// Extends a nowhere-zero k-flow of `g / c` over the circuit `c`.
///
/// Requirements: `c` is an all-positive chordless circuit of `g`, its
/// vertices have degree at most 3, `2 <= |delta(V(c))| <= 3`, `k >= 4`, and
/// `f` is a nowhere-zero k-flow on the contraction.
pub fn extend_flow_over_circuit(g: &SignedGraph, c: &Circuit, f: &IntFlow, k: i64) -> Result<IntFlow, LemmaError> {
    if k < 4 {
        return Err(LemmaError::Precondition(format!("bound {k} is below 4")));
    }
    let rebuilt = Circuit::from_edges(g, &c.edges).ok_or_else(|| LemmaError::Precondition("not a circuit".into()))?;
    if rebuilt.vertex_set() != c.vertex_set() || !consistent_sequence(g, c) {
        return Err(LemmaError::Precondition("circuit sequence does not match its edges".into()));
    }
    let vs = c.vertex_set();
    let es = c.edge_set();
    if c.edges.iter().any(|&e| g.edge(e).expect("edge").sign.is_negative()) {
        return Err(LemmaError::Precondition("circuit has a negative edge".into()));
    }
    if g.edges().iter().any(|e| !es.contains(&e.id) && vs.contains(&e.a) && vs.contains(&e.b)) {
        return Err(LemmaError::Precondition("circuit has a chord".into()));
    }
    if vs.iter().any(|&v| g.degree(v) > 3) {
        return Err(LemmaError::Precondition("circuit vertex of degree above 3".into()));
    }
    let boundary = g.edges().iter().filter(|e| vs.contains(&e.a) != vs.contains(&e.b)).count();
    if !(2..=3).contains(&boundary) {
        return Err(LemmaError::Precondition(format!("circuit has {boundary} boundary edges")));
    }
    let (gc, _) = contract(g, &es)?;
    if !verify_int_flow(&gc, f, k, true)? {
        return Err(LemmaError::Precondition("flow is not a nowhere-zero k-flow of the contraction".into()));
    }
    let out = extend_over(g, c, f, k)?;
    if !verify_int_flow(g, &out, k, true)? {
        return Err(LemmaError::Internal("extended flow does not verify".into()));
    }
    Ok(out)
}

fn consistent_sequence(g: &SignedGraph, c: &Circuit) -> bool {
    let l = c.len();
    c.vertices.len() == l
        && (0..l).all(|i| {
            let e = g.edge(c.edges[i]).expect("edge");
            let (x, y) = (c.vertices[i], c.vertices[(i + 1) % l]);
            (e.a == x && e.b == y) || (e.a == y && e.b == x)
        })
}

/// Fills in the circuit edges of an all-positive circuit. Values of other
/// edges come from `f`, with missing ones read as 0. Chords are allowed. The
/// free parameter is scanned in the order 1, -1, 2, -2, ...
pub(crate) fn extend_over(g: &SignedGraph, c: &Circuit, f: &IntFlow, k: i64) -> Result<IntFlow, LemmaError> {
    let es = c.edge_set();
    let value = |e: EdgeId| f.get(e).unwrap_or(0);
    let l = c.len();
    let mut prefix = Vec::with_capacity(l);
    let mut acc = 0i64;
    for &v in &c.vertices {
        let b: i64 = g
            .half_edges(v)
            .iter()
            .filter(|h| !es.contains(&h.edge))
            .map(|h| g.tau(*h) * value(h.edge))
            .sum();
        acc += b;
        prefix.push(acc);
    }
    if acc != 0 {
        return Err(LemmaError::Precondition("flow does not conserve at the contracted vertex".into()));
    }
    let t = (1..=2 * k + 2)
        .flat_map(|m| [m, -m])
        .find(|t| prefix.iter().all(|b| *t != *b && (t - b).abs() < k))
        .ok_or_else(|| LemmaError::Internal("no valid circuit parameter".into()))?;
    let mut out: BTreeMap<EdgeId, i64> = g.edge_ids().filter(|e| !es.contains(e)).map(|e| (e, value(e))).collect();
    for i in 0..l {
        let edge = g.edge(c.edges[i]).expect("edge");
        out.insert(edge.id, edge.tau(departing_end(edge, c.vertices[i])) * (t - prefix[i]));
    }
    Ok(IntFlow::from_map(out))
}

/// A 4-flow covering the unbalanced circuit `c`, with every vertex off `c`
/// of degree at most 3 in the support. `g` must be flow-admissible and
/// `g - E(c)` balanced.
pub fn hc_cover_4_flow(g: &SignedGraph, c: &Circuit, budget: &SearchBudget) -> Result<IntFlow, LemmaError> {
    if !is_flow_admissible(g, Method::Deletion)? {
        return Err(LemmaError::Precondition("graph is not flow-admissible".into()));
    }
    if Circuit::from_edges(g, &c.edges).is_none() || !consistent_sequence(g, c) {
        return Err(LemmaError::Precondition("not a circuit".into()));
    }
    if c.is_balanced(g) {
        return Err(LemmaError::Precondition("circuit is balanced".into()));
    }
    let es = c.edge_set();
    let mu = potential_on(g, &|e: &Edge| !es.contains(&e.id))
        .map_err(|_| LemmaError::Precondition("graph minus the circuit is unbalanced".into()))?;
    let switched: Vec<VertexId> = g.vertices().filter(|v| mu[v.0] == Sign::Negative).collect();
    let gs = g.switch_set(&switched)?;
    let on_c = c.vertex_set();
    let allowed: AllowedValues = gs
        .edge_ids()
        .map(|e| (e, if es.contains(&e) { vec![1, -1, 2, -2, 3, -3] } else { vec![0, 1, -1, 2, -2, 3, -3] }))
        .collect();
    // Deepen on the number of nonzero edges off the circuit.
    let off: BTreeSet<EdgeId> = gs.edge_ids().filter(|e| !es.contains(e)).collect();
    let mut shape = SearchShape {
        caps: gs.vertices().filter(|v| !on_c.contains(v)).map(|v| (v, 3)).collect(),
        first: c.edges.clone(),
        sparse: off.clone(),
        max_sparse: Some(0),
    };
    let fs = loop {
        match shaped_flow_search(&gs, &allowed, &shape, budget, &mut |_| true)? {
            SearchOutcome::Found(f) => break f,
            SearchOutcome::Absent if shape.max_sparse < Some(off.len()) => {
                shape.max_sparse = shape.max_sparse.map(|s| s + 1);
            }
            SearchOutcome::Absent => return Err(LemmaError::Internal("no covering 4-flow exists".into())),
            SearchOutcome::BudgetExhausted => return Err(LemmaError::Budget),
        }
    };
    let f = switch_flow(&gs, &fs, &switched);
    let supp = support(&f);
    if !verify_int_flow(g, &f, 4, false)? || !es.is_subset(&supp) || !support_degree_ok(g, &f, &on_c) {
        return Err(LemmaError::Internal("covering flow does not verify".into()));
    }
    Ok(f)
}

/// Every vertex outside `exempt` has degree at most 3 in the support.
pub fn support_degree_ok(g: &SignedGraph, f: &IntFlow, exempt: &BTreeSet<VertexId>) -> bool {
    g.vertices().filter(|v| !exempt.contains(v)).all(|v| {
        g.half_edges(v).iter().filter(|h| f.get(h.edge).unwrap_or(0) != 0).count() <= 3
    })
}

/// Converts a nowhere-zero Klein-group flow on a balanced graph into a
/// nowhere-zero integer 4-flow: each coordinate's support carries a 2-flow,
/// combined as `first + 2 * second`.
pub fn klein_to_4_flow(g: &SignedGraph, gf: &GroupFlow) -> Result<IntFlow, LemmaError> {
    let switched = g
        .balancing_switches()
        .ok_or_else(|| LemmaError::Precondition("graph is unbalanced".into()))?;
    let gp = g.switch_set(&switched)?;
    if !gf.conserves(&gp)? || !gf.is_nowhere_zero() {
        return Err(LemmaError::Precondition("group flow is not a nowhere-zero flow".into()));
    }
    let mut parts = Vec::new();
    for bit in [1u8, 0] {
        let s: BTreeSet<EdgeId> = gf
            .iter()
            .filter(|(_, v)| if bit == 1 { v.bits().1 == 1 } else { v.bits().0 == 1 })
            .map(|(e, _)| e)
            .collect();
        let sub = gp.restrict(|e| s.contains(&e.id));
        let phi = eulerian_2_flow(&sub).ok_or_else(|| LemmaError::Internal("coordinate support is not eulerian".into()))?;
        parts.push(phi.padded(&gp));
    }
    let fp = crate::flows::combine(&parts[0], &parts[1], 1, 2)?;
    let f = switch_flow(&gp, &fp, &switched);
    if !verify_int_flow(g, &f, 4, true)? {
        return Err(LemmaError::Internal("converted 4-flow does not verify".into()));
    }
    Ok(f)
}

/// True when `f` conserves and is nonzero on `edges`.
pub fn covers(g: &SignedGraph, f: &IntFlow, edges: &BTreeSet<EdgeId>) -> bool {
    conserves(g, f).unwrap_or(false) && edges.iter().all(|e| f.get(*e).unwrap_or(0) != 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{nz_k_flow_search, z2z2_nz_flow_search};
    use Sign::{Negative as N, Positive as P};

    fn graph(n: usize, t: &[(usize, usize, Sign)]) -> SignedGraph {
        SignedGraph::from_triples(n, t).unwrap()
    }

    fn set(v: &[usize]) -> BTreeSet<EdgeId> {
        v.iter().map(|&i| EdgeId(i)).collect()
    }

    fn budget() -> SearchBudget {
        SearchBudget::default()
    }

    #[test]
    fn positive_circuit_two_flow() {
        let g = graph(4, &[(0, 1, P), (1, 2, P), (2, 3, P), (3, 0, P)]);
        let f = eulerian_2_flow(&g).unwrap();
        assert!(f.iter().all(|(_, v)| v == 1));
    }

    #[test]
    fn one_negative_edge_blocks_two_flow() {
        let g = graph(3, &[(0, 1, P), (1, 2, N), (2, 0, P)]);
        assert_eq!(eulerian_2_flow(&g), None);
        assert!(nz_k_flow_search(&g, 2, None, &budget()).unwrap().is_absent());
    }

    #[test]
    fn figure_eight_two_flow() {
        let g = graph(5, &[(0, 1, P), (1, 2, P), (2, 0, P), (0, 3, P), (3, 4, P), (4, 0, P)]);
        let f = eulerian_2_flow(&g).unwrap();
        assert!(verify_int_flow(&g, &f, 2, true).unwrap());
        let mixed = graph(5, &[(0, 1, N), (1, 2, P), (2, 0, P), (0, 3, P), (3, 4, N), (4, 0, P), (2, 2, N), (4, 4, N)]);
        let f = eulerian_2_flow(&mixed).unwrap();
        assert!(verify_int_flow(&mixed, &f, 2, true).unwrap());
    }

    #[test]
    fn bouquet_barbell() {
        let q = graph(1, &[(0, 0, N), (0, 0, N)]);
        let f = barbell_3_flow(&q).unwrap();
        assert!(verify_int_flow(&q, &f, 3, true).unwrap());
        assert_eq!(f.get(EdgeId(0)).unwrap(), -f.get(EdgeId(1)).unwrap());
    }

    #[test]
    fn loops_joined_by_bridge() {
        let q = graph(2, &[(0, 0, N), (0, 1, P), (1, 1, N)]);
        let f = barbell_3_flow(&q).unwrap();
        assert_eq!(f.get(EdgeId(1)).unwrap().abs(), 2);
        assert_eq!(f.get(EdgeId(0)).unwrap().abs(), 1);
        assert!(nz_k_flow_search(&q, 3, None, &budget()).unwrap().is_found());
    }

    #[test]
    fn long_barbell_with_three_edge_connector() {
        let q = graph(
            8,
            &[(0, 1, N), (1, 2, P), (2, 0, P), (2, 3, N), (3, 4, P), (4, 5, N), (5, 6, P), (6, 7, P), (7, 5, N)],
        );
        let f = barbell_3_flow(&q).unwrap();
        for e in [3, 4, 5] {
            assert_eq!(f.get(EdgeId(e)).unwrap().abs(), 2);
        }
        for e in [0, 1, 2, 6, 7, 8] {
            assert_eq!(f.get(EdgeId(e)).unwrap().abs(), 1);
        }
    }

    #[test]
    fn non_barbell_is_rejected() {
        let q = graph(3, &[(0, 1, P), (1, 2, P), (2, 0, P)]);
        assert!(barbell_3_flow(&q).is_err());
        let two_balanced = graph(1, &[(0, 0, P), (0, 0, P)]);
        assert!(barbell_3_flow(&two_balanced).is_err());
    }

    fn k4() -> SignedGraph {
        graph(4, &[(0, 1, P), (0, 2, P), (0, 3, P), (1, 2, P), (1, 3, P), (2, 3, P)])
    }

    #[test]
    fn lift_of_circuit_is_its_two_flow() {
        let g = graph(3, &[(0, 1, P), (1, 2, P), (2, 0, P)]);
        let f = z2_to_3_lift(&g, &set(&[0, 1, 2]), &budget()).unwrap().unwrap();
        assert!(f.iter().all(|(_, v)| v.abs() == 1));
    }

    #[test]
    fn lift_on_cubic_two_factor_uses_twos_off_factor() {
        // K4: 2-factor {01,12,23,30} as edges 0,3,5,2 with two unbalanced triangles
        // would need a 2-factor of two circuits; use the prism instead.
        let prism = graph(
            6,
            &[(0, 1, N), (1, 2, P), (2, 0, P), (3, 4, N), (4, 5, P), (5, 3, P), (0, 3, P), (1, 4, P), (2, 5, P)],
        );
        let s = set(&[0, 1, 2, 3, 4, 5]);
        let f = z2_to_3_lift(&prism, &s, &budget()).unwrap().unwrap();
        assert_eq!(level_set(&f, 1), s);
        assert!(!level_set(&f, 2).is_empty());
        assert!(level_set(&f, 2).iter().all(|e| e.0 >= 6));
        assert!(verify_int_flow(&prism, &f, 3, false).unwrap());
    }

    #[test]
    fn lift_absent_for_odd_count() {
        let prism = graph(
            6,
            &[(0, 1, N), (1, 2, P), (2, 0, P), (3, 4, P), (4, 5, P), (5, 3, P), (0, 3, P), (1, 4, P), (2, 5, P)],
        );
        let s = set(&[0, 1, 2, 3, 4, 5]);
        assert_eq!(z2_to_3_lift(&prism, &s, &budget()).unwrap(), None);
        // Independent confirmation by exhaustive constrained search.
        let allowed: AllowedValues = prism
            .edge_ids()
            .map(|e| (e, if s.contains(&e) { vec![1, -1] } else { vec![0, 2, -2] }))
            .collect();
        assert!(constrained_flow_search(&prism, &allowed, &budget(), &mut |_| true).unwrap().is_absent());
    }

    #[test]
    fn lift_rejects_odd_degree_sets() {
        assert!(matches!(z2_to_3_lift(&k4(), &set(&[0]), &budget()), Err(LemmaError::Precondition(_))));
    }

    #[test]
    fn constructed_lift_matches_search_existence_on_k4_signatures() {
        let g = k4();
        // Hamiltonian circuit 0-1-3-2-0: edges 0 (01), 4 (13), 5 (23), 1 (02).
        let s = set(&[0, 4, 5, 1]);
        for mask in 0u32..64 {
            let sigma: BTreeMap<EdgeId, Sign> =
                (0..6).map(|i| (EdgeId(i), if mask >> i & 1 == 1 { N } else { P })).collect();
            let h = g.with_signature(&sigma).unwrap();
            let got = z2_to_3_lift(&h, &s, &budget()).unwrap();
            let allowed: AllowedValues =
                h.edge_ids().map(|e| (e, if s.contains(&e) { vec![1, -1] } else { vec![0, 2, -2] })).collect();
            let exists = constrained_flow_search(&h, &allowed, &budget(), &mut |_| true).unwrap().is_found();
            assert_eq!(got.is_some(), exists, "mask {mask}");
        }
    }

    fn theta_with_triangle() -> (SignedGraph, Circuit) {
        // Triangle 0-1-2 (edges 0,1,2) attached to vertices 3 and 4; 3 and 4 are
        // joined by two more edges so the contraction is a 3-edge theta.
        let g = graph(5, &[(0, 1, P), (1, 2, P), (2, 0, P), (0, 3, P), (1, 4, P), (3, 4, P), (4, 3, P)]);
        let c = Circuit::from_edges(&g, &[EdgeId(0), EdgeId(1), EdgeId(2)]).unwrap();
        (g, c)
    }

    #[test]
    fn extension_with_two_boundary_edges() {
        let (g, c) = theta_with_triangle();
        let (gc, _) = contract(&g, &c.edge_set()).unwrap();
        let f = nz_k_flow_search(&gc, 4, None, &budget()).unwrap().found().unwrap();
        let ext = extend_flow_over_circuit(&g, &c, &f, 4).unwrap();
        assert!(verify_int_flow(&g, &ext, 4, true).unwrap());
        for (e, v) in f.iter() {
            assert_eq!(ext.get(e), Some(v));
        }
    }

    #[test]
    fn extension_with_three_boundary_edges_scans_small_parameters() {
        // A 4-circuit whose vertices 0, 1, 2 each send one edge to a hub 4;
        // vertex 3 of the circuit has degree 2 and the hub has degree 3.
        let g = graph(5, &[(0, 1, P), (1, 2, P), (2, 3, P), (3, 0, P), (0, 4, P), (1, 4, P), (2, 4, P)]);
        let c = Circuit::from_edges(&g, &[EdgeId(0), EdgeId(1), EdgeId(2), EdgeId(3)]).unwrap();
        let (gc, rec) = contract(&g, &c.edge_set()).unwrap();
        let mut count = 0;
        let allowed = crate::oracle::allowed_values(&gc, 4, None).unwrap();
        constrained_flow_search(&gc, &allowed, &budget(), &mut |f| {
            let ext = extend_flow_over_circuit(&g, &c, f, 4).unwrap();
            assert!(verify_int_flow(&g, &ext, 4, true).unwrap());
            assert_eq!(&crate::flows::push_forward(&rec, &ext).unwrap(), f);
            count += 1;
            false
        })
        .unwrap();
        assert!(count > 0);
    }

    #[test]
    fn extension_preconditions() {
        // All boundary on one vertex: degree exceeds 3.
        let g = graph(3, &[(0, 1, P), (1, 0, P), (0, 2, P), (0, 2, P)]);
        let c = Circuit::from_edges(&g, &[EdgeId(0), EdgeId(1)]).unwrap();
        let (gc, _) = contract(&g, &c.edge_set()).unwrap();
        let f = nz_k_flow_search(&gc, 4, None, &budget()).unwrap().found().unwrap();
        assert!(matches!(extend_flow_over_circuit(&g, &c, &f, 4), Err(LemmaError::Precondition(_))));
        let (g2, c2) = theta_with_triangle();
        let (gc2, _) = contract(&g2, &c2.edge_set()).unwrap();
        let f2 = nz_k_flow_search(&gc2, 4, None, &budget()).unwrap().found().unwrap();
        assert!(matches!(extend_flow_over_circuit(&g2, &c2, &f2, 3), Err(LemmaError::Precondition(_))));
    }

    #[test]
    fn hc_cover_on_small_instance() {
        // Unbalanced triangle 0-1-2 and a hub 3 whose star is balanced.
        let g = graph(4, &[(0, 1, N), (1, 2, P), (2, 0, P), (0, 3, P), (1, 3, P), (2, 3, N)]);
        let c = Circuit::from_edges(&g, &[EdgeId(0), EdgeId(1), EdgeId(2)]).unwrap();
        let f = hc_cover_4_flow(&g, &c, &budget()).unwrap();
        assert!(verify_int_flow(&g, &f, 4, false).unwrap());
        assert!(c.edge_set().is_subset(&support(&f)));
    }

    #[test]
    fn hc_cover_respects_switching() {
        let g = graph(4, &[(0, 1, P), (1, 2, N), (2, 0, P), (0, 3, N), (1, 3, P), (2, 3, P)]);
        // g - {0,1,2} is a star, hence balanced.
        let c = Circuit::from_edges(&g, &[EdgeId(0), EdgeId(1), EdgeId(2)]).unwrap();
        let f = hc_cover_4_flow(&g, &c, &budget()).unwrap();
        assert!(verify_int_flow(&g, &f, 4, false).unwrap());
    }

    #[test]
    fn hc_cover_on_hamiltonian_cubic() {
        // Moebius ladder on 32 vertices: the rim is the circuit, the rungs are chords.
        let n = 32;
        let neg_rim = [0, 5, 11];
        let mut t: Vec<(usize, usize, Sign)> = (0..n).map(|i| (i, (i + 1) % n, if neg_rim.contains(&i) { N } else { P })).collect();
        t.extend((0..n / 2).map(|i| (i, i + n / 2, if i % 3 == 0 { N } else { P })));
        let g = graph(n, &t);
        let c = Circuit::from_edges(&g, &(0..n).map(EdgeId).collect::<Vec<_>>()).unwrap();
        let f = hc_cover_4_flow(&g, &c, &budget()).unwrap();
        assert!(verify_int_flow(&g, &f, 4, false).unwrap());
        assert!(c.edge_set().is_subset(&support(&f)));
        assert!(support_degree_ok(&g, &f, &c.vertex_set()));
    }

    #[test]
    fn hc_cover_rejects_inadmissible() {
        let g = graph(3, &[(0, 1, N), (1, 2, P), (2, 0, P)]);
        let c = Circuit::from_edges(&g, &[EdgeId(0), EdgeId(1), EdgeId(2)]).unwrap();
        assert!(matches!(hc_cover_4_flow(&g, &c, &budget()), Err(LemmaError::Precondition(_))));
    }

    #[test]
    fn klein_conversion_on_k4() {
        let g = k4().switch_at(VertexId(2)).unwrap();
        let gf = z2z2_nz_flow_search(&g, &budget()).unwrap().found().unwrap();
        let f = klein_to_4_flow(&g, &gf).unwrap();
        assert!(verify_int_flow(&g, &f, 4, true).unwrap());
    }
}
