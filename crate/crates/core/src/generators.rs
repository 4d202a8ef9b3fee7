//! Seeded test families: 3-edge-colored cubic graphs, hamiltonian graphs,
//! small planar bridgeless graphs, and exhaustive tiny multigraphs.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuits::{is_flow_admissible, Method};
use crate::error::GenError;
use crate::graph::{Edge, EdgeId, Sign, SignedGraph};
use crate::oracle::EdgeColoring;

/// Attempts per instance before rejection sampling gives up.
pub const MAX_ATTEMPTS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Cubic3ec,
    Hamiltonian,
    PlanarBridgeless,
    ExhaustiveTiny,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Cubic3ec, Family::Hamiltonian, Family::PlanarBridgeless, Family::ExhaustiveTiny];

    pub fn name(self) -> &'static str {
        match self {
            Family::Cubic3ec => "cubic3ec",
            Family::Hamiltonian => "hamiltonian",
            Family::PlanarBridgeless => "planar-bridgeless",
            Family::ExhaustiveTiny => "exhaustive-tiny",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Family, GenError> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| GenError::InvalidSpec(format!("unknown family {s:?}")))
    }
}

/// What to generate. `n` is the vertex count, except for `exhaustive-tiny`
/// where it bounds the edge count. `chords` fixes the number of chords of a
/// hamiltonian instance instead of drawing it.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub family: Family,
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub chords: Option<usize>,
}

impl FamilySpec {
    pub fn new(family: Family, n: usize, p: f64, seed: u64) -> FamilySpec {
        FamilySpec { family, n, p, seed, chords: None }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(GenError::InvalidSpec(format!("probability {} outside [0, 1]", self.p)));
        }
        let n = self.n;
        let ok = match self.family {
            Family::Cubic3ec => n.is_multiple_of(2) && (4..=24).contains(&n),
            Family::Hamiltonian => (3..=14).contains(&n),
            Family::PlanarBridgeless => (4..=14).contains(&n),
            Family::ExhaustiveTiny => (1..=6).contains(&n),
        };
        if !ok {
            return Err(GenError::InvalidSpec(format!("size {n} out of range for {}", self.family)));
        }
        if let (Some(c), Family::Hamiltonian) = (self.chords, self.family) {
            if c > n * (n - 3) / 2 {
                return Err(GenError::InvalidSpec(format!("{c} chords do not fit on {n} vertices")));
            }
        }
        Ok(())
    }

    /// The spec of the `index`-th member of a corpus.
    pub fn at(&self, index: u64) -> FamilySpec {
        FamilySpec { seed: mix(self.seed, index), ..self.clone() }
    }
}

/// Splitmix64 finalizer over `(seed, index)`.
pub fn mix(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(0x6a09_e667_f3bc_c909);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A generated graph with the witness its family guarantees.
#[derive(Clone, Debug)]
pub struct Instance {
    pub spec: FamilySpec,
    pub graph: SignedGraph,
    /// Color classes of `cubic3ec` instances.
    pub coloring: Option<EdgeColoring>,
    /// The constructed hamiltonian cycle, as edge ids in cyclic order.
    pub hamiltonian_cycle: Option<Vec<EdgeId>>,
}

pub fn generate(spec: &FamilySpec) -> Result<SignedGraph, GenError> {
    generate_instance(spec).map(|i| i.graph)
}

pub fn generate_instance(spec: &FamilySpec) -> Result<Instance, GenError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (mut coloring, mut hamiltonian_cycle) = (None, None);
    let pairs = match spec.family {
        Family::Cubic3ec => {
            let (pairs, classes) = cubic_pairs(spec.n, &mut rng)?;
            coloring = Some(EdgeColoring::from_classes(&classes));
            pairs
        }
        Family::Hamiltonian => {
            let (pairs, cycle) = hamiltonian_pairs(spec.n, spec.chords, &mut rng);
            hamiltonian_cycle = Some(cycle);
            pairs
        }
        Family::PlanarBridgeless => planar_pairs(spec.n, &mut rng)?,
        Family::ExhaustiveTiny => {
            let all = enumerate_tiny(spec.n);
            let graph = all[rng.gen_range(0..all.len())].clone();
            return Ok(Instance { spec: spec.clone(), graph, coloring, hamiltonian_cycle });
        }
    };
    let edges = pairs.iter().enumerate().map(|(i, &(a, b))| {
        let sign = if rng.gen_bool(spec.p) { Sign::Negative } else { Sign::Positive };
        Edge::new(i, a, b, sign)
    });
    let graph = SignedGraph::new(spec.n, edges).expect("generated endpoints are in range");
    Ok(Instance { spec: spec.clone(), graph, coloring, hamiltonian_cycle })
}

/// The first `count` members of the corpus seeded by `spec`.
pub fn corpus(spec: &FamilySpec, count: usize) -> Result<Vec<Instance>, GenError> {
    (0..count as u64).map(|i| generate_instance(&spec.at(i))).collect()
}

/// Keeps the graphs that are flow-admissible by both characterizations.
/// A disagreement between them is a bug and panics.
pub fn filter_admissible(graphs: impl IntoIterator<Item = SignedGraph>) -> impl Iterator<Item = SignedGraph> {
    graphs.into_iter().filter(|g| is_flow_admissible(g, Method::CrossCheck).expect("admissibility methods agree"))
}

fn random_matching(n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order.chunks(2).map(|p| (p[0].min(p[1]), p[0].max(p[1]))).collect()
}

type Classes = [BTreeSet<EdgeId>; 3];

/// Three pairwise disjoint perfect matchings forming a simple connected graph.
fn cubic_pairs(n: usize, rng: &mut ChaCha8Rng) -> Result<(Vec<(usize, usize)>, Classes), GenError> {
    for _ in 0..MAX_ATTEMPTS {
        let mut pairs = Vec::with_capacity(3 * n / 2);
        let mut seen = BTreeSet::new();
        let mut classes: Classes = Default::default();
        let mut ok = true;
        for class in classes.iter_mut() {
            for p in random_matching(n, rng) {
                if !seen.insert(p) {
                    ok = false;
                    break;
                }
                class.insert(EdgeId(pairs.len()));
                pairs.push(p);
            }
            if !ok {
                break;
            }
        }
        if ok && SignedGraph::unsigned(n, &pairs).expect("in range").is_connected() {
            return Ok((pairs, classes));
        }
    }
    Err(GenError::Exhausted(MAX_ATTEMPTS))
}

/// A cycle on a random vertex order plus distinct chords.
fn hamiltonian_pairs(n: usize, chords: Option<usize>, rng: &mut ChaCha8Rng) -> (Vec<(usize, usize)>, Vec<EdgeId>) {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut pairs: Vec<(usize, usize)> = (0..n).map(|i| (order[i], order[(i + 1) % n])).collect();
    let cycle: Vec<EdgeId> = (0..n).map(EdgeId).collect();
    let norm = |(a, b): (usize, usize)| (a.min(b), a.max(b));
    let used: BTreeSet<(usize, usize)> = pairs.iter().map(|&p| norm(p)).collect();
    let mut candidates: Vec<(usize, usize)> =
        (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|p| !used.contains(p)).collect();
    candidates.shuffle(rng);
    let count = chords.unwrap_or_else(|| rng.gen_range(0..=candidates.len().min(n)));
    pairs.extend(candidates.into_iter().take(count));
    (pairs, cycle)
}

/// A stacked triangulation with edges deleted in random order whenever the
/// graph stays connected and bridgeless.
fn planar_pairs(n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(usize, usize)>, GenError> {
    let mut pairs = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut faces = vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
    for v in 4..n {
        let i = rng.gen_range(0..faces.len());
        let [x, y, z] = faces.swap_remove(i);
        pairs.extend([(x, v), (y, v), (z, v)]);
        faces.extend([[x, y, v], [x, z, v], [y, z, v]]);
    }
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.shuffle(rng);
    let mut keep = vec![true; pairs.len()];
    for i in order {
        if !rng.gen_bool(0.5) {
            continue;
        }
        keep[i] = false;
        let trial: Vec<(usize, usize)> = pairs.iter().zip(&keep).filter(|(_, k)| **k).map(|(p, _)| *p).collect();
        let g = SignedGraph::unsigned(n, &trial).expect("in range");
        if !g.is_connected() || !g.bridges().is_empty() {
            keep[i] = true;
        }
    }
    let out: Vec<(usize, usize)> = pairs.into_iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| p).collect();
    let g = SignedGraph::unsigned(n, &out).expect("in range");
    if !g.is_connected() || !g.bridges().is_empty() {
        return Err(GenError::Exhausted(1));
    }
    Ok(out)
}

type Multigraph = (usize, Vec<(usize, usize)>);

/// Canonical form of a multigraph: the least sorted edge list over vertex
/// relabelings that keep vertices sorted by (degree, loops).
fn canonical(n: usize, pairs: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut key = vec![(0usize, 0usize); n];
    for &(a, b) in pairs {
        key[a].0 += 1;
        key[b].0 += 1;
        if a == b {
            key[a].1 += 1;
        }
    }
    let mut verts: Vec<usize> = (0..n).collect();
    verts.sort_by_key(|&v| key[v]);
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for v in verts {
        match blocks.last_mut() {
            Some(b) if key[b[0]] == key[v] => b.push(v),
            _ => blocks.push(vec![v]),
        }
    }
    let mut best: Option<Vec<(usize, usize)>> = None;
    let mut label = vec![0usize; n];
    permute_blocks(&blocks, 0, 0, &mut label, &mut |label| {
        let mut e: Vec<(usize, usize)> = pairs
            .iter()
            .map(|&(a, b)| (label[a].min(label[b]), label[a].max(label[b])))
            .collect();
        e.sort_unstable();
        if best.as_ref().is_none_or(|b| e < *b) {
            best = Some(e);
        }
    });
    best.unwrap_or_default()
}

fn permute_blocks(blocks: &[Vec<usize>], bi: usize, next: usize, label: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
    if bi == blocks.len() {
        visit(label);
        return;
    }
    let mut block = blocks[bi].clone();
    let len = block.len();
    heap_permutations(&mut block, len, &mut |perm| {
        for (i, &v) in perm.iter().enumerate() {
            label[v] = next + i;
        }
        permute_blocks(blocks, bi + 1, next + perm.len(), label, visit);
    });
}

fn heap_permutations(items: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k <= 1 {
        visit(items);
        return;
    }
    for i in 0..k - 1 {
        heap_permutations(items, k - 1, visit);
        if k.is_multiple_of(2) {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
    heap_permutations(items, k - 1, visit);
}

/// Connected multigraphs (loops allowed) with exactly `m` edges, one per
/// isomorphism class, built by adding an edge or a pendant edge to the
/// classes with `m - 1` edges.
fn unlabeled_connected(max_edges: usize) -> Vec<Vec<Multigraph>> {
    let mut levels: Vec<Vec<Multigraph>> = vec![vec![(1, vec![])]];
    for m in 1..=max_edges {
        let mut seen = BTreeSet::new();
        for (n, pairs) in &levels[m - 1] {
            let mut grow = |n2: usize, p: (usize, usize)| {
                let mut e = pairs.clone();
                e.push(p);
                seen.insert((n2, canonical(n2, &e)));
            };
            for a in 0..*n {
                for b in a..*n {
                    grow(*n, (a, b));
                }
                grow(n + 1, (a, *n));
            }
        }
        levels.push(seen.into_iter().collect());
    }
    levels
}

/// All connected multigraphs with loops and between 1 and `max_edges`
/// edges (one per isomorphism class of the underlying multigraph), each
/// under all `2^|E|` signatures. Edge `i` is negative when bit `i` of the
/// signature index is set.
pub fn enumerate_tiny(max_edges: usize) -> Vec<SignedGraph> {
    let levels = unlabeled_connected(max_edges.min(6));
    let mut out = Vec::new();
    for level in levels.iter().skip(1) {
        for (n, pairs) in level {
            for mask in 0u32..1 << pairs.len() {
                let edges = pairs.iter().enumerate().map(|(i, &(a, b))| {
                    Edge::new(i, a, b, if mask >> i & 1 == 1 { Sign::Negative } else { Sign::Positive })
                });
                out.push(SignedGraph::new(*n, edges).expect("valid multigraph"));
            }
        }
    }
    out
}

/// Number of underlying multigraphs per edge count, from 1 to `max_edges`.
pub fn tiny_class_counts(max_edges: usize) -> Vec<usize> {
    unlabeled_connected(max_edges.min(6)).iter().skip(1).map(Vec::len).collect()
}
