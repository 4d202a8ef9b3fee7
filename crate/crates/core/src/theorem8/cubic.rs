use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use crate::circuits::{find_unbalanced_circuit, is_flow_admissible, shortest_path, CertKind, Circuit, Method, SignedCircuitCert};
use crate::error::{FlowError, TheoremError};
use crate::flows::{linear_combination, support, switch_flow, verify_int_flow, IntFlow};
use crate::graph::{EdgeId, SignedGraph};
use crate::lemmas::{barbell_flow_from_cert, eulerian_2_flow, extend_over, hc_cover_4_flow, z2_to_3_lift};
use crate::oracle::{EdgeColoring, SearchBudget};
use crate::surgery::contract;

/// The case of the cubic construction a run passed through.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CasePath {
    Case1_1,
    Case1_2,
    Case2_1,
    Case2_2_1,
    Case2_2_2,
    Case2_3,
}

impl CasePath {
    pub fn label(self) -> &'static str {
        match self {
            CasePath::Case1_1 => "1.1",
            CasePath::Case1_2 => "1.2",
            CasePath::Case2_1 => "2.1",
            CasePath::Case2_2_1 => "2.2.1",
            CasePath::Case2_2_2 => "2.2.2",
            CasePath::Case2_3 => "2.3",
        }
    }
}

impl fmt::Display for CasePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Color classes named so that `r` and `b` have negative-edge counts of the
/// same parity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorClasses {
    pub r: BTreeSet<EdgeId>,
    pub b: BTreeSet<EdgeId>,
    pub y: BTreeSet<EdgeId>,
}

impl ColorClasses {
    fn rb(&self) -> BTreeSet<EdgeId> {
        self.r.union(&self.b).copied().collect()
    }

    fn ry(&self) -> BTreeSet<EdgeId> {
        self.r.union(&self.y).copied().collect()
    }
}

fn negatives(g: &SignedGraph, class: &BTreeSet<EdgeId>) -> usize {
    class.iter().filter(|e| g.edge(**e).is_some_and(|x| x.sign.is_negative())).count()
}

/// Picks the first pair of colors, in the order (0,1), (0,2), (1,2), whose
/// classes have equal negative-edge parity. Returns the renamed classes and
/// the original colors of R, B and Y.
pub fn classify_parity(g: &SignedGraph, coloring: &EdgeColoring) -> Result<(ColorClasses, [u8; 3]), TheoremError> {
    if !coloring.is_proper(g) {
        return Err(TheoremError::ImproperColoring);
    }
    let classes = coloring.classes();
    let parity: Vec<usize> = classes.iter().map(|c| negatives(g, c) % 2).collect();
    let (i, j, k) = [(0u8, 1u8, 2u8), (0, 2, 1), (1, 2, 0)]
        .into_iter()
        .find(|&(i, j, _)| parity[i as usize] == parity[j as usize])
        .expect("two of three parities agree");
    let pick = |c: u8| classes[c as usize].clone();
    Ok((ColorClasses { r: pick(i), b: pick(j), y: pick(k) }, [i, j, k]))
}

/// Replayable record of one run of [`cubic_8_flow`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicCaseTranscript {
    /// Original colors renamed to R, B and Y.
    pub names: [u8; 3],
    /// Negative edges in R, B and Y before any swap.
    pub negatives: [usize; 3],
    pub path: Vec<CasePath>,
    /// Circuits along which two colors were swapped, in order.
    pub swaps: Vec<Vec<EdgeId>>,
    pub c1: Option<Vec<EdgeId>>,
    pub c2: Option<Vec<EdgeId>>,
    /// The classes in use when the final flows were built.
    pub classes: ColorClasses,
    pub components: Vec<(String, IntFlow)>,
    pub coefficients: Vec<(i64, String)>,
}

impl CubicCaseTranscript {
    /// The case that produced the flow.
    pub fn final_case(&self) -> CasePath {
        *self.path.last().expect("at least one case")
    }

    /// Re-evaluates the recorded combination.
    pub fn replay(&self) -> Result<IntFlow, FlowError> {
        let terms: Vec<(i64, &IntFlow)> = self
            .coefficients
            .iter()
            .map(|(c, name)| {
                let f = self.components.iter().find(|(n, _)| n == name).map(|(_, f)| f);
                f.map(|f| (*c, f)).ok_or(FlowError::GraphMismatch)
            })
            .collect::<Result<_, _>>()?;
        linear_combination(&terms)
    }

    pub fn to_text(&self) -> String {
        let list = |v: &[EdgeId]| v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ");
        let set = |s: &BTreeSet<EdgeId>| list(&s.iter().copied().collect::<Vec<_>>());
        let mut out = String::new();
        let [r, b, y] = self.names;
        writeln!(out, "colors: R={r} B={b} Y={y}").unwrap();
        writeln!(out, "negatives: R={} B={} Y={}", self.negatives[0], self.negatives[1], self.negatives[2]).unwrap();
        let path: Vec<&str> = self.path.iter().map(|p| p.label()).collect();
        writeln!(out, "case: {}", path.join(" -> ")).unwrap();
        for s in &self.swaps {
            writeln!(out, "swap: {}", list(s)).unwrap();
        }
        if let Some(c) = &self.c1 {
            writeln!(out, "c1: {}", list(c)).unwrap();
        }
        if let Some(c) = &self.c2 {
            writeln!(out, "c2: {}", list(c)).unwrap();
        }
        writeln!(out, "R: {}", set(&self.classes.r)).unwrap();
        writeln!(out, "B: {}", set(&self.classes.b)).unwrap();
        writeln!(out, "Y: {}", set(&self.classes.y)).unwrap();
        for (name, f) in &self.components {
            let vals: Vec<String> = f.iter().map(|(e, v)| format!("{e}:{v}")).collect();
            writeln!(out, "{name}: {}", vals.join(" ")).unwrap();
        }
        let combo: Vec<String> = self.coefficients.iter().map(|(c, n)| format!("{c}*{n}")).collect();
        writeln!(out, "combination: {}", combo.join(" + ")).unwrap();
        out
    }
}

/// A nowhere-zero 8-flow on a connected, flow-admissible cubic signed graph
/// with a proper 3-edge-coloring, using the default search budget for the
/// one step that searches.
pub fn cubic_8_flow(g: &SignedGraph, coloring: &EdgeColoring) -> Result<(IntFlow, CubicCaseTranscript), TheoremError> {
    cubic_8_flow_with_budget(g, coloring, &SearchBudget::default())
}

pub fn cubic_8_flow_with_budget(
    g: &SignedGraph,
    coloring: &EdgeColoring,
    budget: &SearchBudget,
) -> Result<(IntFlow, CubicCaseTranscript), TheoremError> {
    if !g.is_cubic() {
        return Err(TheoremError::NotCubic);
    }
    if !coloring.is_proper(g) {
        return Err(TheoremError::ImproperColoring);
    }
    if !g.is_connected() {
        return Err(TheoremError::Disconnected);
    }
    if !is_flow_admissible(g, Method::Deletion)? {
        return Err(TheoremError::NotFlowAdmissible);
    }
    let (classes, names) = classify_parity(g, coloring)?;
    let mut t = CubicCaseTranscript {
        names,
        negatives: [negatives(g, &classes.r), negatives(g, &classes.b), negatives(g, &classes.y)],
        path: Vec::new(),
        swaps: Vec::new(),
        c1: None,
        c2: None,
        classes: classes.clone(),
        components: Vec::new(),
        coefficients: Vec::new(),
    };
    let f = Solver { g, budget, t: &mut t }.run(classes)?;
    if t.replay()? != f {
        return Err(TheoremError::Internal("transcript does not replay".into()));
    }
    Ok((f, t))
}

/// Circuits of a 2-regular spanning edge set, ordered by sorted edge ids.
fn two_factor_circuits(g: &SignedGraph, set: &BTreeSet<EdgeId>) -> Result<Vec<Circuit>, TheoremError> {
    let sub = g.restrict(|e| set.contains(&e.id));
    let mut out = Vec::new();
    for comp in sub.component_vertices() {
        let mut es: Vec<EdgeId> = comp.iter().flat_map(|&v| sub.incident_edges(v)).collect();
        es.sort();
        es.dedup();
        if es.is_empty() {
            continue;
        }
        out.push(Circuit::from_edges(g, &es).ok_or_else(|| TheoremError::Internal("2-factor component is not a circuit".into()))?);
    }
    out.sort_by_key(|c| c.sorted_edges());
    Ok(out)
}

fn sym_diff(a: &BTreeSet<EdgeId>, b: &BTreeSet<EdgeId>) -> BTreeSet<EdgeId> {
    a.symmetric_difference(b).copied().collect()
}

struct Solver<'a> {
    g: &'a SignedGraph,
    budget: &'a SearchBudget,
    t: &'a mut CubicCaseTranscript,
}

impl Solver<'_> {
    fn run(&mut self, cl: ColorClasses) -> Result<IntFlow, TheoremError> {
        let rb = two_factor_circuits(self.g, &cl.rb())?;
        if rb.iter().any(|c| !c.is_balanced(self.g)) {
            self.case1(cl)
        } else {
            self.case2(cl)
        }
    }

    fn lift(&self, set: &BTreeSet<EdgeId>) -> Result<IntFlow, TheoremError> {
        z2_to_3_lift(self.g, set, self.budget)?
            .ok_or_else(|| TheoremError::Internal("no 3-flow lift of a 2-factor".into()))
    }

    fn two_flow(&self, set: &BTreeSet<EdgeId>) -> Result<IntFlow, TheoremError> {
        let sub = self.g.restrict(|e| set.contains(&e.id));
        Ok(eulerian_2_flow(&sub)
            .ok_or_else(|| TheoremError::Internal("2-factor has no 2-flow".into()))?
            .padded(self.g))
    }

    fn finish(&mut self, parts: Vec<(&str, IntFlow)>, coefficients: &[(i64, &str)]) -> Result<IntFlow, TheoremError> {
        self.t.components = parts.into_iter().map(|(n, f)| (n.to_string(), f.padded(self.g))).collect();
        self.t.coefficients = coefficients.iter().map(|(c, n)| (*c, n.to_string())).collect();
        let f = self.t.replay()?;
        if !verify_int_flow(self.g, &f, 8, true)? {
            return Err(TheoremError::Internal(format!("case {} produced an invalid flow", self.t.final_case())));
        }
        Ok(f)
    }

    fn case1(&mut self, mut cl: ColorClasses) -> Result<IntFlow, TheoremError> {
        let g = self.g;
        let parity = |s: &BTreeSet<EdgeId>| negatives(g, s) % 2;
        if parity(&cl.y) != parity(&cl.r) {
            self.t.path.push(CasePath::Case1_2);
            let c = two_factor_circuits(g, &cl.rb())?
                .into_iter()
                .find(|c| !c.is_balanced(g))
                .ok_or_else(|| TheoremError::Internal("no unbalanced circuit to swap along".into()))?;
            let ce = c.edge_set();
            cl = ColorClasses { r: sym_diff(&cl.r, &ce), b: sym_diff(&cl.b, &ce), y: cl.y };
            self.t.swaps.push(c.sorted_edges());
            if parity(&cl.r) != parity(&cl.b) || parity(&cl.r) != parity(&cl.y) {
                return Err(TheoremError::Internal("swap did not equalize parities".into()));
            }
        }
        self.t.path.push(CasePath::Case1_1);
        self.t.classes = cl.clone();
        let f1 = self.lift(&cl.rb())?;
        let f2 = self.lift(&cl.ry())?;
        self.finish(vec![("f1", f1), ("f2", f2)], &[(1, "f1"), (3, "f2")])
    }

    fn case2(&mut self, cl: ColorClasses) -> Result<IntFlow, TheoremError> {
        self.t.classes = cl.clone();
        let f3 = self.two_flow(&cl.rb())?;
        let ry = two_factor_circuits(self.g, &cl.ry())?;
        let unbalanced: Vec<&Circuit> = ry.iter().filter(|c| !c.is_balanced(self.g)).collect();
        match unbalanced.len() {
            n if n % 2 == 0 => {
                self.t.path.push(CasePath::Case2_1);
                let f2 = self.lift(&cl.ry())?;
                self.finish(vec![("f3", f3), ("f2", f2)], &[(3, "f3"), (1, "f2")])
            }
            1 => {
                let c1 = unbalanced[0].clone();
                let balanced: Vec<Circuit> = ry.iter().filter(|c| c.is_balanced(self.g)).cloned().collect();
                self.case22(&cl, f3, c1, balanced)
            }
            _ => {
                let (c1, c2) = (unbalanced[0].clone(), unbalanced[1].clone());
                self.case23(cl, f3, c1, c2)
            }
        }
    }

    fn case22(&mut self, cl: &ColorClasses, f3: IntFlow, c1: Circuit, balanced: Vec<Circuit>) -> Result<IntFlow, TheoremError> {
        let g = self.g;
        self.t.c1 = Some(c1.sorted_edges());
        let contract_set: BTreeSet<EdgeId> = balanced.iter().flat_map(|c| c.edges.iter().copied()).collect();
        let (h, rec) = contract(g, &contract_set)?;
        let gs = rec.switched_graph();
        let c1h = Circuit::from_edges(&h, &c1.edges).ok_or_else(|| TheoremError::Internal("C1 lost in contraction".into()))?;
        let c1_set = c1.edge_set();
        let rest = h.restrict(|e| !c1_set.contains(&e.id));
        let (base, name, case) = match find_unbalanced_circuit(&rest) {
            Some(c2) => {
                self.t.c2 = Some(c2.sorted_edges());
                let block: BTreeSet<EdgeId> = c1_set.union(&c2.edge_set()).copied().collect();
                let p = shortest_path(&h, &c1h.vertex_set(), &c2.vertex_set(), &|e| !block.contains(&e.id), &vec![false; h.vertex_count()])
                    .ok_or_else(|| TheoremError::Internal("no connector between C1 and C'".into()))?;
                let cert = SignedCircuitCert {
                    kind: CertKind::LongBarbell,
                    circuit1: c1h.edges.clone(),
                    circuit2: c2.edges.clone(),
                    path: p.edges,
                    covered: c1h.edges[0],
                };
                (barbell_flow_from_cert(&h, &cert)?, "f4", CasePath::Case2_2_1)
            }
            None => (hc_cover_4_flow(&h, &c1h, self.budget)?, "f5", CasePath::Case2_2_2),
        };
        self.t.path.push(case);
        let mut cur = base.padded(&h);
        for c in &balanced {
            if c.edges.iter().any(|&e| gs.edge(e).expect("edge").sign.is_negative()) {
                return Err(TheoremError::Internal("contracted circuit is not all-positive".into()));
            }
            cur = extend_over(&gs, c, &cur, 4)?;
        }
        let fs = cur.padded(&gs);
        if !verify_int_flow(&gs, &fs, 4, false)? || !cl.ry().is_subset(&support(&fs)) {
            return Err(TheoremError::Internal("extended 4-flow does not cover RY".into()));
        }
        let f = switch_flow(&gs, &fs, &rec.switched);
        self.finish(vec![("f3", f3), (name, f)], &[(1, "f3"), (2, name)])
    }

    fn case23(&mut self, cl: ColorClasses, f3: IntFlow, c1: Circuit, c2: Circuit) -> Result<IntFlow, TheoremError> {
        self.t.path.push(CasePath::Case2_3);
        self.t.c1 = Some(c1.sorted_edges());
        self.t.c2 = Some(c2.sorted_edges());
        let mut flows = Vec::new();
        for c in [&c1, &c2] {
            let ce = c.edge_set();
            let (r2, y2) = (sym_diff(&cl.r, &ce), sym_diff(&cl.y, &ce));
            let by: BTreeSet<EdgeId> = cl.b.union(&y2).copied().collect();
            if two_factor_circuits(self.g, &by)?.iter().any(|x| !x.is_balanced(self.g)) {
                self.t.swaps.push(c.sorted_edges());
                return self.case1(ColorClasses { r: cl.b.clone(), b: y2, y: r2 });
            }
            flows.push(self.two_flow(&by)?);
        }
        let f7 = flows.pop().expect("two flows");
        let f6 = flows.pop().expect("two flows");
        self.finish(vec![("f3", f3), ("f6", f6), ("f7", f7)], &[(1, "f3"), (2, "f6"), (4, "f7")])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Sign;
    use crate::oracle::three_edge_coloring;
    use std::collections::BTreeMap;

    fn k4() -> SignedGraph {
        SignedGraph::unsigned(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    fn coloring(g: &SignedGraph) -> EdgeColoring {
        three_edge_coloring(g, &SearchBudget::default()).unwrap().found().unwrap()
    }

    fn signed(g: &SignedGraph, mask: u32) -> SignedGraph {
        let sigma: BTreeMap<EdgeId, Sign> = g
            .edge_ids()
            .enumerate()
            .map(|(i, e)| (e, if mask >> i & 1 == 1 { Sign::Negative } else { Sign::Positive }))
            .collect();
        g.with_signature(&sigma).unwrap()
    }

    #[test]
    fn parity_pairs() {
        let g = k4();
        let col = coloring(&g);
        let (_, names) = classify_parity(&g, &col).unwrap();
        assert_eq!(names, [0, 1, 2]);
        // One negative edge in color 1 only: colors 0 and 2 are the even pair.
        let e = *col.class(1).iter().next().unwrap();
        let h = signed(&g, 1 << e.0);
        assert_eq!(classify_parity(&h, &col).unwrap().1, [0, 2, 1]);
    }

    #[test]
    fn all_positive_k4_is_case_2_1() {
        let g = k4();
        let (f, t) = cubic_8_flow(&g, &coloring(&g)).unwrap();
        assert_eq!(t.final_case(), CasePath::Case2_1);
        assert!(f.max_abs() <= 5);
    }

    #[test]
    fn every_admissible_k4_signature() {
        let g = k4();
        let col = coloring(&g);
        let mut seen = BTreeSet::new();
        for mask in 0..64 {
            let h = signed(&g, mask);
            match cubic_8_flow(&h, &col) {
                Ok((f, t)) => {
                    assert!(verify_int_flow(&h, &f, 8, true).unwrap());
                    assert_eq!(t.replay().unwrap(), f);
                    seen.insert(t.final_case());
                }
                Err(TheoremError::NotFlowAdmissible) => {
                    assert!(!is_flow_admissible(&h, Method::CircuitCover).unwrap());
                }
                Err(e) => panic!("mask {mask}: {e}"),
            }
        }
        // Every admissible signature of K4 is switching equivalent to the
        // all-positive one or to a negative perfect matching; both keep all
        // three color classes even.
        assert_eq!(seen, BTreeSet::from([CasePath::Case2_1]));
    }

    fn cube() -> (SignedGraph, EdgeColoring) {
        // Vertices are 3-bit words; edges flip one bit and are colored by it.
        let mut pairs = Vec::new();
        let mut classes: [BTreeSet<EdgeId>; 3] = Default::default();
        for bit in 0..3 {
            for v in 0..8usize {
                if v >> bit & 1 == 0 {
                    classes[bit].insert(EdgeId(pairs.len()));
                    pairs.push((v, v | 1 << bit));
                }
            }
        }
        (SignedGraph::unsigned(8, &pairs).unwrap(), EdgeColoring::from_classes(&classes))
    }

    #[test]
    fn cube_signatures_reach_several_cases() {
        let (g, col) = cube();
        let mut seen = BTreeSet::new();
        for mask in 0..1u32 << 12 {
            let h = signed(&g, mask);
            match cubic_8_flow(&h, &col) {
                Ok((f, t)) => {
                    assert!(verify_int_flow(&h, &f, 8, true).unwrap());
                    let bound = if t.final_case() == CasePath::Case2_1 { 5 } else { 7 };
                    assert!(f.max_abs() <= bound, "mask {mask}");
                    seen.insert(t.final_case());
                }
                Err(TheoremError::NotFlowAdmissible) => {}
                Err(e) => panic!("mask {mask}: {e}"),
            }
        }
        for case in [CasePath::Case1_1, CasePath::Case2_1] {
            assert!(seen.contains(&case), "{case} missing from {seen:?}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = k4();
        let col = coloring(&g);
        let mut bad = col.clone();
        let first = *bad.color.keys().next().unwrap();
        let c = bad.color[&first];
        bad.color.insert(first, (c + 1) % 3);
        assert_eq!(cubic_8_flow(&g, &bad).unwrap_err(), TheoremError::ImproperColoring);
        let tri = SignedGraph::unsigned(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(cubic_8_flow(&tri, &col).unwrap_err(), TheoremError::NotCubic);
    }
}
