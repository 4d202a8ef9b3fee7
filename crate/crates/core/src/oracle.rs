//! Exhaustive backtracking searches used as ground truth.
//!
//! Every search returns one of three outcomes. `Absent` is only claimed after
//! the search tree has been exhausted; running out of budget is reported as
//! `BudgetExhausted` instead.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::time::{Duration, Instant};

use crate::error::{GraphError, OracleError};
use crate::flows::{Group, GroupFlow, IntFlow, Klein};
use crate::graph::{EdgeId, SignedGraph, VertexId};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchBudget {
    /// Maximum number of search nodes.
    pub node_limit: u64,
    /// Wall-clock limit in seconds, ignored when `deterministic` is set.
    pub time_limit_secs: f64,
    /// Keep outcomes independent of timing.
    pub deterministic: bool,
}

impl Default for SearchBudget {
    fn default() -> SearchBudget {
        SearchBudget { node_limit: 50_000_000, time_limit_secs: 120.0, deterministic: true }
    }
}

impl SearchBudget {
    pub fn nodes(node_limit: u64) -> SearchBudget {
        SearchBudget { node_limit, ..SearchBudget::default() }
    }

    fn validate(&self) -> Result<(), OracleError> {
        if self.node_limit == 0 || !(self.time_limit_secs > 0.0) {
            return Err(OracleError::InvalidBudget);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome<T> {
    Found(T),
    Absent,
    BudgetExhausted,
}

impl<T> SearchOutcome<T> {
    pub fn found(self) -> Option<T> {
        match self {
            SearchOutcome::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }

    pub fn is_absent(&self) -> bool {
        matches!(self, SearchOutcome::Absent)
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, SearchOutcome::BudgetExhausted)
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> SearchOutcome<U> {
        match self {
            SearchOutcome::Found(t) => SearchOutcome::Found(f(t)),
            SearchOutcome::Absent => SearchOutcome::Absent,
            SearchOutcome::BudgetExhausted => SearchOutcome::BudgetExhausted,
        }
    }

    /// The word used on `result:` lines.
    pub fn label(&self) -> &'static str {
        match self {
            SearchOutcome::Found(_) => "found",
            SearchOutcome::Absent => "absent",
            SearchOutcome::BudgetExhausted => "budget",
        }
    }
}

/// Per-edge allowed values.
pub type AllowedValues = BTreeMap<EdgeId, Vec<i64>>;

struct Clock {
    nodes: u64,
    limit: u64,
    deadline: Option<Instant>,
}

impl Clock {
    fn new(budget: &SearchBudget) -> Clock {
        let deadline = (!budget.deterministic)
            .then(|| Instant::now() + Duration::from_secs_f64(budget.time_limit_secs.min(1e9)));
        Clock { nodes: 0, limit: budget.node_limit, deadline }
    }

    /// Counts one node; false once a limit is hit.
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.limit {
            return false;
        }
        match self.deadline {
            Some(d) if self.nodes.is_multiple_of(4096) => Instant::now() < d,
            _ => true,
        }
    }
}

enum Step {
    Stop,
    Continue,
    OutOfBudget,
}

/// Static branching order: descending endpoint degree sum, then the order in
/// which a BFS from the least vertex first meets each edge, then id.
fn branch_order(g: &SignedGraph) -> Vec<usize> {
    let m = g.edge_count();
    let mut seen_edge = vec![usize::MAX; m];
    let mut seen_vertex = vec![false; g.vertex_count()];
    let mut counter = 0;
    for root in g.vertices() {
        if seen_vertex[root.0] {
            continue;
        }
        seen_vertex[root.0] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for e in g.incident_edges(x) {
                let pos = g.position(e).expect("incident");
                if seen_edge[pos] == usize::MAX {
                    seen_edge[pos] = counter;
                    counter += 1;
                }
                let y = g.edges()[pos].other(x);
                if !seen_vertex[y.0] {
                    seen_vertex[y.0] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&i| {
        let e = &g.edges()[i];
        let degsum = g.degree(e.a) + g.degree(e.b);
        (std::cmp::Reverse(degsum), seen_edge[i], e.id)
    });
    order
}

fn value_order(values: &mut Vec<i64>) {
    values.sort_by_key(|&v| (v.abs(), v < 0));
    values.dedup();
}

struct IntSearch<'a> {
    g: &'a SignedGraph,
    allowed: Vec<Vec<i64>>,
    /// `(vertex, coefficient, min contribution, max contribution)` per edge,
    /// for each endpoint with a nonzero coefficient.
    terms: Vec<Vec<(usize, i64, i64, i64)>>,
    /// Edges with a nonzero coefficient at each vertex.
    at_vertex: Vec<Vec<usize>>,
    order: Vec<usize>,
    symmetric: bool,
    value: Vec<Option<i64>>,
    sum: Vec<i64>,
    open: Vec<usize>,
    rem_min: Vec<i64>,
    rem_max: Vec<i64>,
    /// Endpoint of each half-edge, per edge.
    ends: Vec<[usize; 2]>,
    /// Most nonzero half-edges allowed at each vertex.
    cap: Vec<usize>,
    nonzero: Vec<usize>,
    sparse: Vec<bool>,
    sparse_left: usize,
    clock: Clock,
}

impl<'a> IntSearch<'a> {
    fn new(g: &'a SignedGraph, allowed: Vec<Vec<i64>>, cap: Vec<usize>, order: Vec<usize>, budget: &SearchBudget) -> IntSearch<'a> {
        let n = g.vertex_count();
        let mut terms = vec![Vec::new(); g.edge_count()];
        let mut at_vertex = vec![Vec::new(); n];
        let mut open = vec![0usize; n];
        let mut rem_min = vec![0i64; n];
        let mut rem_max = vec![0i64; n];
        for (i, e) in g.edges().iter().enumerate() {
            let mut vs = vec![e.a];
            if e.b != e.a {
                vs.push(e.b);
            }
            for v in vs {
                let c = e.coefficient_at(v);
                if c == 0 {
                    continue;
                }
                let lo = allowed[i].iter().map(|x| c * x).min().expect("nonempty");
                let hi = allowed[i].iter().map(|x| c * x).max().expect("nonempty");
                terms[i].push((v.0, c, lo, hi));
                at_vertex[v.0].push(i);
                open[v.0] += 1;
                rem_min[v.0] += lo;
                rem_max[v.0] += hi;
            }
        }
        let symmetric = allowed.iter().all(|vals| vals.iter().all(|v| vals.contains(&-v)));
        IntSearch {
            g,
            order,
            value: vec![None; g.edge_count()],
            sum: vec![0; n],
            allowed,
            terms,
            at_vertex,
            open,
            rem_min,
            rem_max,
            ends: g.edges().iter().map(|e| [e.a.0, e.b.0]).collect(),
            nonzero: vec![0; n],
            sparse: vec![false; g.edge_count()],
            sparse_left: usize::MAX,
            cap,
            symmetric,
            clock: Clock::new(budget),
        }
    }

    fn assign(&mut self, i: usize, x: i64) -> bool {
        self.value[i] = Some(x);
        let mut ok = true;
        for &(v, c, lo, hi) in &self.terms[i] {
            self.sum[v] += c * x;
            self.open[v] -= 1;
            self.rem_min[v] -= lo;
            self.rem_max[v] -= hi;
            if self.sum[v] + self.rem_min[v] > 0 || self.sum[v] + self.rem_max[v] < 0 {
                ok = false;
            }
        }
        if x != 0 && self.sparse[i] {
            if self.sparse_left == 0 {
                ok = false;
            }
            self.sparse_left = self.sparse_left.wrapping_sub(1);
        }
        if x != 0 {
            for v in self.ends[i] {
                self.nonzero[v] += 1;
                if self.nonzero[v] > self.cap[v] {
                    ok = false;
                }
            }
        }
        // A saturated vertex takes no more flow, so it must already balance.
        for v in self.ends[i] {
            if self.nonzero[v] >= self.cap[v] && self.sum[v] != 0 {
                ok = false;
            }
        }
        ok
    }

    fn unassign(&mut self, i: usize) {
        let x = self.value[i].take().expect("assigned");
        for &(v, c, lo, hi) in &self.terms[i] {
            self.sum[v] -= c * x;
            self.open[v] += 1;
            self.rem_min[v] += lo;
            self.rem_max[v] += hi;
        }
        if x != 0 {
            for v in self.ends[i] {
                self.nonzero[v] -= 1;
            }
            if self.sparse[i] {
                self.sparse_left = self.sparse_left.wrapping_add(1);
            }
        }
    }

    /// A vertex with one open edge determines that edge's value.
    fn forced(&self) -> Option<(usize, Option<i64>)> {
        for v in 0..self.sum.len() {
            if self.open[v] != 1 {
                continue;
            }
            let i = *self.at_vertex[v].iter().find(|&&i| self.value[i].is_none()).expect("one open edge");
            let c = self.terms[i].iter().find(|t| t.0 == v).expect("term").1;
            let need = -self.sum[v];
            let x = (need % c == 0).then_some(need / c).filter(|x| self.allowed[i].contains(x));
            return Some((i, x));
        }
        None
    }

    fn run(&mut self, branched: bool, cursor: usize, visit: &mut dyn FnMut(&IntFlow) -> bool) -> Step {
        if !self.clock.tick() {
            return Step::OutOfBudget;
        }
        let (edge, candidates, next_cursor, branching) = match self.forced() {
            Some((_, None)) => return Step::Continue,
            Some((i, Some(x))) => (i, vec![x], cursor, false),
            None => {
                let mut c = cursor;
                while c < self.order.len() && self.value[self.order[c]].is_some() {
                    c += 1;
                }
                if c == self.order.len() {
                    let flow = IntFlow::from_map(
                        self.g
                            .edges()
                            .iter()
                            .zip(&self.value)
                            .map(|(e, v)| (e.id, v.expect("complete")))
                            .collect(),
                    );
                    return if visit(&flow) { Step::Stop } else { Step::Continue };
                }
                let i = self.order[c];
                let mut vals = self.allowed[i].clone();
                if self.symmetric && !branched {
                    vals.retain(|&x| x >= 0);
                }
                (i, vals, c + 1, true)
            }
        };
        for x in candidates {
            let ok = self.assign(edge, x);
            let step = if ok { self.run(branched || branching, next_cursor, visit) } else { Step::Continue };
            self.unassign(edge);
            match step {
                Step::Continue => {}
                other => return other,
            }
        }
        Step::Continue
    }
}

/// Exact search over per-edge value lists. Every list must be given; the
/// visitor sees each complete conserving assignment and returns true to
/// accept it.
pub fn constrained_flow_search(
    g: &SignedGraph,
    allowed: &AllowedValues,
    budget: &SearchBudget,
    visit: &mut dyn FnMut(&IntFlow) -> bool,
) -> Result<SearchOutcome<IntFlow>, OracleError> {
    shaped_flow_search(g, allowed, &SearchShape::default(), budget, visit)
}

/// Extra structure for [`shaped_flow_search`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchShape {
    /// Most half-edges with a nonzero value at a vertex (a loop counts twice).
    pub caps: BTreeMap<VertexId, usize>,
    /// Edges branched on first, in this order.
    pub first: Vec<EdgeId>,
    /// At most `max_sparse` edges of `sparse` may be nonzero.
    pub sparse: BTreeSet<EdgeId>,
    pub max_sparse: Option<usize>,
}

/// [`constrained_flow_search`] restricted by a [`SearchShape`].
pub fn shaped_flow_search(
    g: &SignedGraph,
    allowed: &AllowedValues,
    shape: &SearchShape,
    budget: &SearchBudget,
    visit: &mut dyn FnMut(&IntFlow) -> bool,
) -> Result<SearchOutcome<IntFlow>, OracleError> {
    budget.validate()?;
    let mut cap = vec![usize::MAX; g.vertex_count()];
    for (&v, &c) in &shape.caps {
        *cap.get_mut(v.0).ok_or(OracleError::Graph(GraphError::UnknownVertex(v)))? = c;
    }
    let first = &shape.first;
    let mut lists = Vec::with_capacity(g.edge_count());
    for e in g.edges() {
        let mut vals = allowed.get(&e.id).cloned().unwrap_or_default();
        value_order(&mut vals);
        if vals.is_empty() {
            return Err(OracleError::EmptyAllowedSet(e.id));
        }
        lists.push(vals);
    }
    let mut order = Vec::with_capacity(g.edge_count());
    for &e in first {
        let i = g.position(e).ok_or(OracleError::Graph(GraphError::UnknownEdge(e)))?;
        if !order.contains(&i) {
            order.push(i);
        }
    }
    order.extend(branch_order(g).into_iter().filter(|i| !first.contains(&g.edges()[*i].id)));
    let mut search = IntSearch::new(g, lists, cap, order, budget);
    search.sparse = g.edges().iter().map(|e| shape.sparse.contains(&e.id)).collect();
    search.sparse_left = shape.max_sparse.unwrap_or(usize::MAX);
    let mut found = None;
    let mut wrapped = |f: &IntFlow| {
        if visit(f) {
            found = Some(f.clone());
            true
        } else {
            false
        }
    };
    Ok(match search.run(false, 0, &mut wrapped) {
        Step::Stop => SearchOutcome::Found(found.expect("accepted flow")),
        Step::Continue => SearchOutcome::Absent,
        Step::OutOfBudget => SearchOutcome::BudgetExhausted,
    })
}

/// Builds the full value table: `constraints` where given (clipped to
/// `|x| < k`), `±{1..k-1}` elsewhere.
pub fn allowed_values(g: &SignedGraph, k: i64, constraints: Option<&AllowedValues>) -> Result<AllowedValues, OracleError> {
    if k < 2 {
        return Err(OracleError::InvalidBound(k));
    }
    let default: Vec<i64> = (1..k).flat_map(|x| [x, -x]).collect();
    let mut out = BTreeMap::new();
    for e in g.edge_ids() {
        let vals: Vec<i64> = match constraints.and_then(|c| c.get(&e)) {
            Some(vs) => vs.iter().copied().filter(|x| x.abs() < k).collect(),
            None => default.clone(),
        };
        if vals.is_empty() {
            return Err(OracleError::EmptyAllowedSet(e));
        }
        out.insert(e, vals);
    }
    Ok(out)
}

/// A nowhere-zero k-flow (or one respecting the given per-edge value lists).
pub fn nz_k_flow_search(
    g: &SignedGraph,
    k: i64,
    constraints: Option<&AllowedValues>,
    budget: &SearchBudget,
) -> Result<SearchOutcome<IntFlow>, OracleError> {
    let allowed = allowed_values(g, k, constraints)?;
    constrained_flow_search(g, &allowed, budget, &mut |_| true)
}

/// The least `k <= kmax` with a nowhere-zero k-flow.
pub fn flow_number(g: &SignedGraph, kmax: i64, budget: &SearchBudget) -> Result<SearchOutcome<i64>, OracleError> {
    if kmax < 2 {
        return Err(OracleError::InvalidBound(kmax));
    }
    for k in 2..=kmax {
        match nz_k_flow_search(g, k, None, budget)? {
            SearchOutcome::Found(_) => return Ok(SearchOutcome::Found(k)),
            SearchOutcome::BudgetExhausted => return Ok(SearchOutcome::BudgetExhausted),
            SearchOutcome::Absent => {}
        }
    }
    Ok(SearchOutcome::Absent)
}

/// A nowhere-zero Klein-group flow on the underlying graph. Signs are
/// ignored; loops are unconstrained and receive `(0,1)`.
pub fn z2z2_nz_flow_search(g: &SignedGraph, budget: &SearchBudget) -> Result<SearchOutcome<GroupFlow>, OracleError> {
    budget.validate()?;
    let m = g.edge_count();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count()];
    for (i, e) in g.edges().iter().enumerate() {
        if !e.is_loop() {
            incident[e.a.0].push(i);
            incident[e.b.0].push(i);
        }
    }
    let mut state = KleinSearch {
        order: branch_order(g).into_iter().filter(|&i| !g.edges()[i].is_loop()).collect(),
        ends: g.edges().iter().map(|e| [e.a.0, e.b.0]).collect(),
        value: vec![0u8; m],
        sum: vec![0u8; g.vertex_count()],
        open: incident.iter().map(Vec::len).collect(),
        incident,
        clock: Clock::new(budget),
    };
    let outcome = state.run(0, 0);
    Ok(match outcome {
        Step::Stop => {
            let values = g
                .edges()
                .iter()
                .zip(&state.value)
                .map(|(e, &v)| (e.id, if e.is_loop() { Klein::E01 } else { Klein::from_code(v).expect("code") }))
                .collect();
            SearchOutcome::Found(GroupFlow::new(Group::Z2xZ2, values))
        }
        Step::Continue => SearchOutcome::Absent,
        Step::OutOfBudget => SearchOutcome::BudgetExhausted,
    })
}

struct KleinSearch {
    order: Vec<usize>,
    ends: Vec<[usize; 2]>,
    incident: Vec<Vec<usize>>,
    value: Vec<u8>,
    sum: Vec<u8>,
    open: Vec<usize>,
    clock: Clock,
}

impl KleinSearch {
    fn set(&mut self, i: usize, x: u8) -> bool {
        self.value[i] = x;
        let mut ok = true;
        for v in self.ends[i] {
            self.sum[v] ^= x;
            self.open[v] -= 1;
            if self.open[v] == 0 && self.sum[v] != 0 {
                ok = false;
            }
        }
        ok
    }

    fn clear(&mut self, i: usize) {
        let x = std::mem::take(&mut self.value[i]);
        for v in self.ends[i] {
            self.sum[v] ^= x;
            self.open[v] += 1;
        }
    }

    /// `max_used` is the largest code assigned so far. The nonzero elements
    /// are interchangeable, so a free choice may introduce only the next
    /// unused code.
    fn run(&mut self, cursor: usize, max_used: u8) -> Step {
        if !self.clock.tick() {
            return Step::OutOfBudget;
        }
        let forced = (0..self.sum.len()).find(|&v| self.open[v] == 1).map(|v| {
            let i = *self.incident[v].iter().find(|&&i| self.value[i] == 0).expect("open edge");
            (i, self.sum[v])
        });
        let (edge, candidates, next_cursor): (usize, Vec<u8>, usize) = match forced {
            Some((_, 0)) => return Step::Continue,
            Some((i, x)) => (i, vec![x], cursor),
            None => {
                let mut c = cursor;
                while c < self.order.len() && self.value[self.order[c]] != 0 {
                    c += 1;
                }
                if c == self.order.len() {
                    return Step::Stop;
                }
                (self.order[c], (1..=(max_used + 1).min(3)).collect(), c + 1)
            }
        };
        for x in candidates {
            let ok = self.set(edge, x);
            let step = if ok { self.run(next_cursor, max_used.max(x)) } else { Step::Continue };
            match step {
                Step::Continue => self.clear(edge),
                other => return other,
            }
        }
        Step::Continue
    }
}

/// A proper 3-edge-coloring, colors `0`, `1`, `2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeColoring {
    pub color: BTreeMap<EdgeId, u8>,
}

impl EdgeColoring {
    pub fn from_classes(classes: &[BTreeSet<EdgeId>; 3]) -> EdgeColoring {
        let mut color = BTreeMap::new();
        for (c, class) in classes.iter().enumerate() {
            for &e in class {
                color.insert(e, c as u8);
            }
        }
        EdgeColoring { color }
    }

    pub fn class(&self, c: u8) -> BTreeSet<EdgeId> {
        self.color.iter().filter(|(_, &x)| x == c).map(|(&e, _)| e).collect()
    }

    pub fn classes(&self) -> [BTreeSet<EdgeId>; 3] {
        [self.class(0), self.class(1), self.class(2)]
    }

    /// Every edge colored, no loops, and distinct colors at every vertex.
    pub fn is_proper(&self, g: &SignedGraph) -> bool {
        if self.color.len() != g.edge_count() {
            return false;
        }
        g.vertices().all(|v| {
            let mut seen = [false; 3];
            g.half_edges(v).iter().all(|h| match self.color.get(&h.edge) {
                Some(&c) if c < 3 && !seen[c as usize] => {
                    seen[c as usize] = true;
                    true
                }
                _ => false,
            })
        })
    }
}

/// Backtracking over edges in id order with colors tried in order 0, 1, 2.
/// Colors are interchangeable, so a color is introduced only after all
/// smaller ones have appeared.
pub fn three_edge_coloring(g: &SignedGraph, budget: &SearchBudget) -> Result<SearchOutcome<EdgeColoring>, OracleError> {
    budget.validate()?;
    if !g.is_cubic() {
        return Err(OracleError::NotCubic);
    }
    if g.edges().iter().any(|e| e.is_loop()) {
        return Ok(SearchOutcome::Absent);
    }
    let m = g.edge_count();
    let mut used_at = vec![[false; 3]; g.vertex_count()];
    let mut color = vec![0u8; m];
    let mut clock = Clock::new(budget);

    fn go(
        i: usize,
        top: u8,
        g: &SignedGraph,
        used_at: &mut [[bool; 3]],
        color: &mut [u8],
        clock: &mut Clock,
    ) -> Step {
        if !clock.tick() {
            return Step::OutOfBudget;
        }
        if i == color.len() {
            return Step::Stop;
        }
        let e = g.edges()[i];
        for c in 0..=top.min(2) {
            let ci = c as usize;
            if used_at[e.a.0][ci] || used_at[e.b.0][ci] {
                continue;
            }
            used_at[e.a.0][ci] = true;
            used_at[e.b.0][ci] = true;
            color[i] = c;
            let step = go(i + 1, top.max(c + 1), g, used_at, color, clock);
            used_at[e.a.0][ci] = false;
            used_at[e.b.0][ci] = false;
            match step {
                Step::Continue => {}
                Step::Stop => return Step::Stop,
                Step::OutOfBudget => return Step::OutOfBudget,
            }
        }
        Step::Continue
    }

    Ok(match go(0, 0, g, &mut used_at, &mut color, &mut clock) {
        Step::Stop => SearchOutcome::Found(EdgeColoring {
            color: g.edge_ids().zip(color.iter().copied()).collect(),
        }),
        Step::Continue => SearchOutcome::Absent,
        Step::OutOfBudget => SearchOutcome::BudgetExhausted,
    })
}

/// A vertex list convenience for callers that want per-vertex color checks.
pub fn colors_at(g: &SignedGraph, coloring: &EdgeColoring, v: VertexId) -> Vec<u8> {
    g.half_edges(v).iter().filter_map(|h| coloring.color.get(&h.edge).copied()).collect()
}
