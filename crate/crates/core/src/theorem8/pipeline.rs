use std::fmt::Write as _;

use super::blowup::{expand_to_cubic, BlowUpRecord};
use super::cubic::{cubic_8_flow_with_budget, CubicCaseTranscript};
use crate::circuits::{is_flow_admissible, Method};
use crate::error::TheoremError;
use crate::flows::{verify_int_flow, IntFlow};
use crate::graph::{SignedGraph, VertexId};
use crate::lemmas::{eulerian_2_flow, klein_to_4_flow};
use crate::oracle::{z2z2_nz_flow_search, EdgeColoring, SearchBudget, SearchOutcome};
use crate::surgery::{suppress_preprocess, undo_suppress};

/// How one component was handled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComponentRoute {
    /// No edges.
    Trivial,
    /// A balanced circuit after suppression; carries a 2-flow.
    BareCircuit,
    /// Balanced; a 4-flow from the Klein-group flow.
    Balanced,
    /// Blown up to a cubic graph and solved by the cubic construction.
    Cubic { blowups: Vec<BlowUpRecord>, cubic: Box<CubicCaseTranscript> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentTranscript {
    pub vertices: Vec<VertexId>,
    pub edge_count: usize,
    pub merges: usize,
    pub removed_loops: usize,
    pub route: ComponentRoute,
    pub max_abs: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EightFlowTranscript {
    pub components: Vec<ComponentTranscript>,
}

impl EightFlowTranscript {
    /// Final cubic case of every component that went through the cubic construction.
    pub fn cubic_cases(&self) -> Vec<&CubicCaseTranscript> {
        self.components
            .iter()
            .filter_map(|c| match &c.route {
                ComponentRoute::Cubic { cubic, .. } => Some(cubic.as_ref()),
                _ => None,
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "components: {}", self.components.len()).unwrap();
        for (i, c) in self.components.iter().enumerate() {
            let vs: Vec<String> = c.vertices.iter().map(|v| v.to_string()).collect();
            writeln!(out, "component {i}: vertices {}", vs.join(" ")).unwrap();
            writeln!(out, "edges: {}", c.edge_count).unwrap();
            writeln!(out, "suppressed: {} merges, {} positive loops", c.merges, c.removed_loops).unwrap();
            match &c.route {
                ComponentRoute::Trivial => writeln!(out, "route: trivial").unwrap(),
                ComponentRoute::BareCircuit => writeln!(out, "route: balanced circuit").unwrap(),
                ComponentRoute::Balanced => writeln!(out, "route: balanced").unwrap(),
                ComponentRoute::Cubic { blowups, cubic } => {
                    writeln!(out, "route: cubic").unwrap();
                    for b in blowups {
                        let ce: Vec<String> = b.circuit_edges.iter().map(|e| e.to_string()).collect();
                        writeln!(
                            out,
                            "blowup: vertex {} degree {} {} a={} b={} c={} circuit {}",
                            b.vertex,
                            b.degree(),
                            b.case.label(),
                            b.a,
                            b.b,
                            b.c,
                            ce.join(" ")
                        )
                        .unwrap();
                    }
                    out.push_str(&cubic.to_text());
                }
            }
            writeln!(out, "max: {}", c.max_abs).unwrap();
        }
        out
    }
}

/// A nowhere-zero 8-flow on a flow-admissible signed graph whose underlying
/// graph has a nowhere-zero 4-flow.
pub fn eight_flow(g: &SignedGraph) -> Result<(IntFlow, EightFlowTranscript), TheoremError> {
    eight_flow_with_budget(g, &SearchBudget::default())
}

pub fn eight_flow_with_budget(g: &SignedGraph, budget: &SearchBudget) -> Result<(IntFlow, EightFlowTranscript), TheoremError> {
    let mut parts = Vec::new();
    let mut transcript = EightFlowTranscript::default();
    for comp in g.components() {
        let (f, t) = solve_component(&comp.graph, budget)?;
        parts.push(f);
        transcript.components.push(ComponentTranscript { vertices: comp.vertices, ..t });
    }
    let f = IntFlow::union(parts);
    if !verify_int_flow(g, &f, 8, true)? {
        return Err(TheoremError::Internal("assembled flow does not verify".into()));
    }
    Ok((f, transcript))
}

fn solve_component(g: &SignedGraph, budget: &SearchBudget) -> Result<(IntFlow, ComponentTranscript), TheoremError> {
    let mut t = ComponentTranscript {
        vertices: Vec::new(),
        edge_count: g.edge_count(),
        merges: 0,
        removed_loops: 0,
        route: ComponentRoute::Trivial,
        max_abs: 0,
    };
    if g.edge_count() == 0 {
        return Ok((IntFlow::default(), t));
    }
    let (h, srec) = suppress_preprocess(g);
    t.merges = srec.merge_count();
    t.removed_loops = srec.steps.len() - t.merges;
    if !is_flow_admissible(&h, Method::Deletion)? {
        return Err(TheoremError::NotFlowAdmissible);
    }
    let (hc, _) = h.without_isolated();
    let f = if hc.edge_count() == 0 {
        IntFlow::default()
    } else {
        let gf = match z2z2_nz_flow_search(&hc, budget)? {
            SearchOutcome::Found(gf) => gf,
            SearchOutcome::Absent => return Err(TheoremError::NoFourFlow),
            SearchOutcome::BudgetExhausted => return Err(TheoremError::Budget),
        };
        if !srec.bare_circuits.is_empty() {
            t.route = ComponentRoute::BareCircuit;
            eulerian_2_flow(&hc).ok_or_else(|| TheoremError::Internal("admissible circuit without a 2-flow".into()))?
        } else if hc.is_balanced() {
            t.route = ComponentRoute::Balanced;
            klein_to_4_flow(&hc, &gf)?
        } else {
            let (cubic, cubic_flow, blowups) = expand_to_cubic(&hc, &gf)?;
            let coloring = EdgeColoring::from_classes(&cubic_flow.classes());
            if !coloring.is_proper(&cubic) {
                return Err(TheoremError::Internal("group flow of the expansion is not a 3-edge-coloring".into()));
            }
            if !is_flow_admissible(&cubic, Method::Deletion)? {
                return Err(TheoremError::Internal("expansion lost flow-admissibility".into()));
            }
            let (mut f, ct) = cubic_8_flow_with_budget(&cubic, &coloring, budget).map_err(|e| match e {
                TheoremError::Budget => TheoremError::Budget,
                other => TheoremError::Internal(format!("cubic construction failed: {other}")),
            })?;
            // Graphs before each blow-up, rebuilt by contracting in reverse.
            let mut blown = cubic;
            for rec in blowups.iter().rev() {
                f = rec.push_forward_flow(&blown, &f)?;
                blown = rec.contract(&blown)?.0;
            }
            if blown != hc {
                return Err(TheoremError::Internal("contractions do not recover the reduced graph".into()));
            }
            t.route = ComponentRoute::Cubic { blowups, cubic: Box::new(ct) };
            f
        }
    };
    let f = undo_suppress(&srec, &f)?;
    if !verify_int_flow(g, &f, 8, true)? {
        return Err(TheoremError::Internal("component flow does not verify".into()));
    }
    t.max_abs = f.max_abs();
    Ok((f, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Sign::{Negative as N, Positive as P};

    #[test]
    fn balanced_triangle_with_chord_structure() {
        let g = SignedGraph::unsigned(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let (f, t) = eight_flow(&g).unwrap();
        assert_eq!(t.components[0].route, ComponentRoute::Balanced);
        assert!(f.max_abs() <= 3);
    }

    #[test]
    fn subdivided_circuit_is_bare() {
        let g = SignedGraph::from_triples(4, &[(0, 1, N), (1, 2, N), (2, 3, P), (3, 0, P)]).unwrap();
        let (f, t) = eight_flow(&g).unwrap();
        assert_eq!(t.components[0].route, ComponentRoute::BareCircuit);
        assert!(verify_int_flow(&g, &f, 2, true).unwrap());
    }

    #[test]
    fn unbalanced_circuit_is_rejected() {
        let g = SignedGraph::from_triples(3, &[(0, 1, N), (1, 2, P), (2, 0, P)]).unwrap();
        assert_eq!(eight_flow(&g).unwrap_err(), TheoremError::NotFlowAdmissible);
    }

    #[test]
    fn bouquet_goes_through_blow_up() {
        let g = SignedGraph::from_triples(1, &[(0, 0, N), (0, 0, N)]).unwrap();
        let (f, t) = eight_flow(&g).unwrap();
        assert!(matches!(t.components[0].route, ComponentRoute::Cubic { .. }));
        assert!(verify_int_flow(&g, &f, 8, true).unwrap());
    }

    #[test]
    fn two_components() {
        let g = SignedGraph::from_triples(5, &[(0, 1, P), (1, 2, P), (2, 0, P), (3, 3, N), (3, 4, P), (4, 4, N), (3, 4, P)]).unwrap();
        let (f, t) = eight_flow(&g).unwrap();
        assert_eq!(t.components.len(), 2);
        assert!(verify_int_flow(&g, &f, 8, true).unwrap());
        assert!(!t.to_text().is_empty());
    }
}
