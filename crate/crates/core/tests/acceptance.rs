//! One line per acceptance criterion, then a single assertion over all of
//! them. Run with `cargo test --test acceptance -- --nocapture` to see the
//! report.

mod common;

use std::collections::BTreeMap;
use std::process::Command;
use std::time::Instant;

use rayon::prelude::*;

use common::{circuit, eulerian_even, pairing_cubic, petersen, signed};
use signflow::circuits::{is_flow_admissible, Method};
use signflow::error::{AdmissibilityError, TheoremError};
use signflow::flows::{verify_int_flow, Group, GroupFlow, Klein};
use signflow::generators::{corpus, enumerate_tiny, Family, FamilySpec};
use signflow::graph::{Edge, EdgeId, Sign, SignedGraph, VertexId};
use signflow::lemmas::eulerian_2_flow;
use signflow::oracle::{flow_number, nz_k_flow_search, three_edge_coloring, z2z2_nz_flow_search, SearchBudget, SearchOutcome};
use signflow::theorem8::{blow_up_vertex, eight_flow, CasePath};

type Verdict = Result<String, String>;

fn e2e_corpus() -> Vec<SignedGraph> {
    let families: [(Family, &[usize]); 3] = [
        (Family::Cubic3ec, &[10, 12, 14, 16, 18, 20]),
        (Family::Hamiltonian, &[6, 7, 8, 9, 10, 11, 12]),
        (Family::PlanarBridgeless, &[6, 7, 8, 9, 10, 11, 12]),
    ];
    let mut out = Vec::new();
    for (fi, (family, sizes)) in families.iter().enumerate() {
        for (pi, p) in [0.1, 0.3, 0.5].into_iter().enumerate() {
            for &n in sizes.iter() {
                let spec = FamilySpec::new(*family, n, p, 1000 + 10 * fi as u64 + pi as u64 + 100 * n as u64);
                out.extend(corpus(&spec, 14).unwrap().into_iter().map(|i| i.graph));
            }
        }
    }
    out
}

fn hypotheses_hold(g: &SignedGraph) -> bool {
    is_flow_admissible(g, Method::CrossCheck).expect("methods agree")
        && z2z2_nz_flow_search(g, &SearchBudget::default()).unwrap().is_found()
}

struct Run {
    case: Option<CasePath>,
    max: i64,
    ok: Result<(), String>,
}

fn end_to_end(runs: &mut Vec<Run>) -> Verdict {
    let graphs = e2e_corpus();
    let generated = graphs.len();
    let accepted: Vec<SignedGraph> = graphs.into_par_iter().filter(hypotheses_hold).collect();
    *runs = accepted
        .par_iter()
        .map(|g| match eight_flow(g) {
            Ok((f, t)) => {
                let ok = if verify_int_flow(g, &f, 8, true).unwrap() { Ok(()) } else { Err("flow does not verify".into()) };
                let case = t.cubic_cases().first().map(|c| c.final_case());
                Run { case, max: f.max_abs(), ok }
            }
            Err(e) => Run { case: None, max: 0, ok: Err(e.to_string()) },
        })
        .collect();
    let failures: Vec<&String> = runs.iter().filter_map(|r| r.ok.as_ref().err()).collect();
    let detail = format!("{} accepted of {generated} generated, {} failures", runs.len(), failures.len());
    if runs.len() >= 500 && failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; first: {:?}", failures.first()))
    }
}

fn bounds(runs: &[Run]) -> Verdict {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut violations = 0;
    for r in runs {
        let Some(case) = r.case else { continue };
        *counts.entry(case.label()).or_default() += 1;
        let bound = if case == CasePath::Case2_1 { 5 } else { 7 };
        if r.max > bound {
            violations += 1;
        }
    }
    let all_within_seven = runs.iter().all(|r| r.max <= 7);
    let detail = format!(
        "{violations} violations; final cases {}",
        counts.iter().map(|(k, v)| format!("{k}:{v}")).collect::<Vec<_>>().join(" ")
    );
    if violations == 0 && all_within_seven && !counts.is_empty() {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// A hub vertex 0 with `a` spokes carrying (0,1), `b` carrying (1,0) and
/// `c` carrying (1,1); every spoke end closes through a digon to a second hub.
fn star(a: usize, b: usize, c: usize) -> (SignedGraph, GroupFlow) {
    let k = a + b + c;
    let spokes: Vec<Klein> = [(Klein::E01, a), (Klein::E10, b), (Klein::E11, c)]
        .into_iter()
        .flat_map(|(x, m)| std::iter::repeat_n(x, m))
        .collect();
    let mut edges = Vec::new();
    let mut vals = BTreeMap::new();
    for (i, &x) in spokes.iter().enumerate() {
        edges.push(Edge::new(i, 0, i + 1, Sign::Positive));
        vals.insert(EdgeId(i), x);
    }
    let mut id = k;
    for (i, &x) in spokes.iter().enumerate() {
        let others = [Klein::E01, Klein::E10, Klein::E11].into_iter().filter(|&y| y != x);
        for y in others {
            edges.push(Edge::new(id, i + 1, k + 1, Sign::Positive));
            vals.insert(EdgeId(id), y);
            id += 1;
        }
    }
    (SignedGraph::new(k + 2, edges).unwrap(), GroupFlow::new(Group::Z2xZ2, vals))
}

fn golden() -> Verdict {
    // Circuit-edge values read off the two figures, in circuit order from v_1.
    let figure1 = [(1, 1), (1, 0), (1, 1), (1, 0), (1, 1), (0, 1), (1, 1), (0, 1), (1, 0), (0, 1), (1, 0)];
    let figure2 = [(1, 1), (1, 0), (1, 1), (0, 1), (1, 1), (1, 0), (0, 1), (1, 0)];
    for ((a, b, c), want) in [((5, 3, 3), &figure1[..]), ((4, 2, 2), &figure2[..])] {
        let (g, gf) = star(a, b, c);
        if !gf.conserves(&g).unwrap() {
            return Err("test fixture does not conserve".into());
        }
        let (blown, flow, rec) = blow_up_vertex(&g, &gf, VertexId(0)).map_err(|e| e.to_string())?;
        let got: Vec<(u8, u8)> = rec.circuit_edges.iter().map(|&e| flow.get(e).unwrap().bits()).collect();
        if got != want {
            return Err(format!("({a},{b},{c}): circuit values {got:?}"));
        }
        if rec.contract(&blown).map_err(|e| e.to_string())?.0 != g {
            return Err(format!("({a},{b},{c}): contraction does not recover the graph"));
        }
        if rec.push_forward_group(&flow) != gf {
            return Err(format!("({a},{b},{c}): push-forward differs from the original flow"));
        }
    }
    Ok("figure 1 (5,3,3) and figure 2 (4,2,2) match; push-forward exact".into())
}

fn characterization(tiny: &[SignedGraph]) -> Verdict {
    let start = Instant::now();
    let mismatches: Vec<String> = tiny
        .par_iter()
        .filter_map(|g| {
            let admissible = match is_flow_admissible(g, Method::CrossCheck) {
                Ok(b) => b,
                Err(AdmissibilityError::Mismatch { .. }) => return Some("methods disagree".into()),
                Err(e) => return Some(e.to_string()),
            };
            match nz_k_flow_search(g, 11, None, &SearchBudget::default()).unwrap() {
                SearchOutcome::Found(f) if admissible && verify_int_flow(g, &f, 11, true).unwrap() => None,
                SearchOutcome::Absent if !admissible => None,
                other => Some(format!("admissible={admissible} oracle={}", other.label())),
            }
        })
        .collect();
    let admissible = tiny.iter().filter(|g| is_flow_admissible(g, Method::Deletion).unwrap()).count();
    let detail = format!(
        "{} instances, {admissible} admissible, {} mismatches, {:.1}s",
        tiny.len(),
        mismatches.len(),
        start.elapsed().as_secs_f64()
    );
    if mismatches.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; first: {}", mismatches[0]))
    }
}

fn eulerian_iff(tiny: &[SignedGraph]) -> Verdict {
    let mismatches = tiny
        .par_iter()
        .filter(|g| {
            let expected = eulerian_even(g);
            let lemma = match eulerian_2_flow(g) {
                Some(f) => verify_int_flow(g, &f, 2, true).unwrap(),
                None => false,
            };
            let oracle = nz_k_flow_search(g, 2, None, &SearchBudget::default()).unwrap().is_found();
            !(expected == lemma && lemma == oracle)
        })
        .count();
    let positives = tiny.iter().filter(|g| eulerian_even(g)).count();
    let detail = format!("{} instances, {positives} with a 2-flow, {mismatches} mismatches", tiny.len());
    if mismatches == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn cubic_equivalence(tiny: &[SignedGraph]) -> Verdict {
    let mut graphs: Vec<SignedGraph> = tiny.iter().filter(|g| g.is_cubic()).cloned().collect();
    for n in (4..=14).step_by(2) {
        for p in [0.0, 0.5] {
            graphs.extend(corpus(&FamilySpec::new(Family::Cubic3ec, n, p, 77 + n as u64), 10).unwrap().into_iter().map(|i| i.graph));
        }
    }
    for n in (2..=14).step_by(2) {
        graphs.extend((0..30).map(|s| pairing_cubic(n, 1 + s + 1000 * n as u64)));
    }
    let budget = SearchBudget::default();
    let results: Vec<(bool, bool)> = graphs
        .par_iter()
        .map(|g| {
            let col = three_edge_coloring(g, &budget).unwrap();
            let kl = z2z2_nz_flow_search(g, &budget).unwrap();
            assert!(!col.is_budget() && !kl.is_budget());
            (col.is_found(), kl.is_found())
        })
        .collect();
    let mismatches = results.iter().filter(|(a, b)| a != b).count();
    let uncolorable = results.iter().filter(|(a, _)| !a).count();
    let p = petersen(0);
    let pet_col = three_edge_coloring(&p, &budget).unwrap().is_absent();
    let pet_kl = z2z2_nz_flow_search(&p, &budget).unwrap().is_absent();
    let detail = format!(
        "{} cubic instances ({uncolorable} uncolorable), {mismatches} mismatches; petersen absent: coloring={pet_col} klein={pet_kl}",
        graphs.len()
    );
    if mismatches == 0 && pet_col && pet_kl {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn flow_numbers() -> Verdict {
    let budget = SearchBudget::default();
    let num = |g: &SignedGraph| flow_number(g, 11, &budget).unwrap().found();
    let balanced = num(&circuit(5, 0));
    let bouquet_graph = signed(1, &[(0, 0), (0, 0)], 0b11);
    let bouquet = num(&bouquet_graph);
    let k4 = num(&signed(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], 0));
    // The bouquet value is confirmed by an explicit witness: +1 and -1 on
    // the two loops cancel at the vertex.
    let witness = signflow::flows::IntFlow::from_pairs(&[(0, 1), (1, -1)]);
    let witnessed = verify_int_flow(&bouquet_graph, &witness, 2, true).unwrap();
    let detail = format!(
        "balanced circuit {balanced:?}, two-negative-loop bouquet {bouquet:?} (explicit 2-flow witness: {witnessed}), all-positive K4 {k4:?}"
    );
    if balanced == Some(2) && bouquet == Some(2) && witnessed && k4 == Some(4) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rejection() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_signflow");
    let dir = tempfile::tempdir().unwrap();
    let mut cases: Vec<(String, SignedGraph, &str)> = Vec::new();
    for mask in [0u32, 1, 0b11111 << 5, 0b101_0010_0110_1001, 0x7fff] {
        cases.push((format!("petersen-{mask:x}"), petersen(mask), ""));
    }
    cases.push(("triangle".into(), circuit(3, 1), "flow-admissible"));
    cases.push(("pentagon".into(), circuit(5, 3), "flow-admissible"));
    for (name, g, hypothesis) in &cases {
        let path = dir.path().join(format!("{name}.sgf"));
        let flow = dir.path().join(format!("{name}.flow"));
        std::fs::write(&path, signflow::sgf::write_sgf(g)).unwrap();
        let out = Command::new(bin).arg("flow8").arg(&path).arg("--flow").arg(&flow).output().unwrap();
        let stdout = String::from_utf8_lossy(&out.stdout);
        if out.status.code() != Some(2) || !stdout.starts_with("result: hypothesis-failed\n") {
            return Err(format!("{name}: exit {:?}: {stdout}", out.status.code()));
        }
        if flow.exists() || stdout.lines().any(|l| l.starts_with("f ")) {
            return Err(format!("{name}: a flow was produced"));
        }
        if !stdout.contains(&format!("hypothesis: {hypothesis}")) {
            return Err(format!("{name}: wrong hypothesis named: {stdout}"));
        }
    }
    // The library agrees on the reason for the lone circuits.
    if eight_flow(&circuit(3, 1)).unwrap_err() != TheoremError::NotFlowAdmissible {
        return Err("lone unbalanced circuit not rejected at the admissibility gate".into());
    }
    Ok(format!("{} inputs exit 2 with no flow; lone circuits fail admissibility", cases.len()))
}

#[test]
fn acceptance() {
    let tiny = enumerate_tiny(6);
    let mut runs = Vec::new();
    let mut report: Vec<(usize, &str, Verdict)> = Vec::new();
    let mut check = |n: usize, name: &'static str, f: &mut dyn FnMut() -> Verdict| {
        let start = Instant::now();
        let v = f();
        let status = if v.is_ok() { "PASS" } else { "FAIL" };
        let detail = v.as_ref().unwrap_or_else(|e| e);
        println!("criterion {n} [{status}] {name}: {detail} ({:.1}s)", start.elapsed().as_secs_f64());
        report.push((n, name, v));
    };
    check(1, "end-to-end 8-flow guarantee", &mut || end_to_end(&mut runs));
    check(2, "bound per case path", &mut || bounds(&runs));
    check(3, "blow-up golden patterns", &mut golden);
    check(4, "admissibility characterization", &mut || characterization(&tiny));
    check(5, "eulerian 2-flow iff", &mut || eulerian_iff(&tiny));
    check(6, "cubic coloring iff Klein flow", &mut || cubic_equivalence(&tiny));
    check(7, "known flow numbers", &mut flow_numbers);
    check(8, "hypothesis rejection", &mut rejection);
    let failed: Vec<usize> = report.iter().filter(|(_, _, v)| v.is_err()).map(|(n, _, _)| *n).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
