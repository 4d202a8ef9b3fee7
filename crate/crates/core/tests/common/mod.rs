#![allow(dead_code)]

use signflow::graph::{Edge, Sign, SignedGraph};

pub const PETERSEN: [(usize, usize); 15] = [
    (0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
    (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
    (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
];

/// Petersen graph with edge `i` negative when bit `i` of `mask` is set.
pub fn petersen(mask: u32) -> SignedGraph {
    signed(10, &PETERSEN, mask)
}

pub fn signed(n: usize, pairs: &[(usize, usize)], mask: u32) -> SignedGraph {
    let edges = pairs.iter().enumerate().map(|(i, &(a, b))| {
        let sign = if mask >> i & 1 == 1 { Sign::Negative } else { Sign::Positive };
        Edge::new(i, a, b, sign)
    });
    SignedGraph::new(n, edges).unwrap()
}

pub fn circuit(len: usize, negatives: usize) -> SignedGraph {
    let pairs: Vec<(usize, usize)> = (0..len).map(|i| (i, (i + 1) % len)).collect();
    signed(len, &pairs, (1u32 << negatives) - 1)
}

/// Connected cubic multigraphs from a uniformly random pairing of `3n`
/// half-edges; loops and parallel edges are kept. Small xorshift so the
/// stream does not depend on the library's generators.
pub fn pairing_cubic(n: usize, seed: u64) -> SignedGraph {
    let mut state = seed.wrapping_mul(0x2545_f491_4f6c_dd1d) | 1;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    loop {
        let mut points: Vec<usize> = (0..3 * n).map(|p| p / 3).collect();
        for i in (1..points.len()).rev() {
            let j = (next() % (i as u64 + 1)) as usize;
            points.swap(i, j);
        }
        let mask = next() as u32;
        let pairs: Vec<(usize, usize)> = points.chunks(2).map(|c| (c[0], c[1])).collect();
        let g = signed(n, &pairs, mask & ((1u64 << pairs.len()) - 1) as u32);
        if g.is_connected() {
            return g;
        }
    }
}

/// Every component has even degrees and an even number of negative edges.
/// Computed from the edge list with a local union-find.
pub fn eulerian_even(g: &SignedGraph) -> bool {
    let n = g.vertex_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut deg = vec![0usize; n];
    for e in g.edges() {
        deg[e.a.0] += 1;
        deg[e.b.0] += 1;
        let (x, y) = (find(&mut parent, e.a.0), find(&mut parent, e.b.0));
        parent[x] = y;
    }
    let mut neg = vec![0usize; n];
    for e in g.edges() {
        if e.sign == Sign::Negative {
            let r = find(&mut parent, e.a.0);
            neg[r] += 1;
        }
    }
    deg.iter().all(|d| d % 2 == 0) && neg.iter().all(|c| c % 2 == 0)
}
