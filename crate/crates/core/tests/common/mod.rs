//! Fixtures and brute-force reference implementations shared by the
//! integration tests. Nothing here calls into the library's algorithms.

#![allow(dead_code)]

use std::collections::VecDeque;

use spinrank::netgen::{generate, GenSpec, WeightMode};
use spinrank::{build_network, SocialNetwork};

pub const KITE_EDGES: [(&str, &str); 18] = [
    ("Andre", "Beverly"),
    ("Andre", "Carol"),
    ("Andre", "Diane"),
    ("Andre", "Fernando"),
    ("Beverly", "Diane"),
    ("Beverly", "Ed"),
    ("Beverly", "Garth"),
    ("Carol", "Diane"),
    ("Carol", "Fernando"),
    ("Diane", "Ed"),
    ("Diane", "Fernando"),
    ("Diane", "Garth"),
    ("Ed", "Garth"),
    ("Fernando", "Garth"),
    ("Fernando", "Heather"),
    ("Garth", "Heather"),
    ("Heather", "Ike"),
    ("Ike", "Jane"),
];

/// Member, degree, closeness, betweenness as published for the kite network.
pub const KITE_TABLE: [(&str, f64, f64, f64); 10] = [
    ("Diane", 0.666, 0.600, 0.102),
    ("Fernando", 0.556, 0.643, 0.231),
    ("Garth", 0.556, 0.643, 0.231),
    ("Andre", 0.444, 0.529, 0.023),
    ("Beverly", 0.444, 0.529, 0.023),
    ("Carol", 0.333, 0.500, 0.000),
    ("Ed", 0.333, 0.500, 0.000),
    ("Heather", 0.333, 0.600, 0.389),
    ("Ike", 0.222, 0.429, 0.222),
    ("Jane", 0.111, 0.310, 0.000),
];

/// Kite network with every tie present in both directions, unit weights.
pub fn kite() -> SocialNetwork {
    build_network(KITE_EDGES.iter().flat_map(|&(a, b)| [(a, b, 1.0), (b, a, 1.0)])).unwrap()
}

/// Chain `a -> b -> c` with the answering edge `c -> b`, all weights 1.
pub fn chain() -> SocialNetwork {
    build_network([("a", "b", 1.0), ("b", "c", 1.0), ("c", "b", 1.0)]).unwrap()
}

/// Centre `c` with four leaves, ties in both directions, after redistribution.
pub fn star() -> SocialNetwork {
    let leaves = ["l1", "l2", "l3", "l4"];
    build_network(leaves.iter().flat_map(|&l| [("c", l, 0.25), (l, "c", 1.0)])).unwrap()
}

pub fn random_network(nodes: usize, edges: usize, seed: u64) -> SocialNetwork {
    generate(&GenSpec::new(nodes, edges, seed)).unwrap()
}

pub fn random_unit_network(nodes: usize, edges: usize, seed: u64) -> SocialNetwork {
    let spec = GenSpec { weight_mode: WeightMode::Unit, ..GenSpec::new(nodes, edges, seed) };
    generate(&spec).unwrap()
}

pub fn dense_matrix(net: &SocialNetwork) -> Vec<Vec<f64>> {
    let n = net.member_count();
    let mut c = vec![vec![0.0; n]; n];
    for e in net.edges() {
        c[e.from.index()][e.to.index()] = e.weight;
    }
    c
}

/// Plain Jacobi iteration `v' = (1 - eps) + eps * C^T v` on a dense matrix
/// until no member moves by more than `tau`.
pub fn dense_jacobi(net: &SocialNetwork, eps: f64, tau: f64, max_iter: usize) -> Vec<f64> {
    let c = dense_matrix(net);
    let n = c.len();
    let mut v = vec![1.0; n];
    for _ in 0..max_iter {
        let next: Vec<f64> = (0..n)
            .map(|x| (1.0 - eps) + eps * (0..n).map(|y| v[y] * c[y][x]).sum::<f64>())
            .collect();
        let delta = v.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        if delta <= tau {
            break;
        }
    }
    v
}

/// Exactly `steps` dense Jacobi steps from the all-ones vector.
pub fn dense_steps(net: &SocialNetwork, eps: f64, steps: usize) -> Vec<f64> {
    let c = dense_matrix(net);
    let n = c.len();
    let mut v = vec![1.0; n];
    for _ in 0..steps {
        v = (0..n)
            .map(|x| (1.0 - eps) + eps * (0..n).map(|y| v[y] * c[y][x]).sum::<f64>())
            .collect();
    }
    v
}

pub fn adjacency(net: &SocialNetwork) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); net.member_count()];
    for e in net.edges() {
        adj[e.from.index()].push(e.to.index());
    }
    adj
}

/// All-pairs hop distances by Floyd-Warshall; `usize::MAX` when unreachable.
pub fn hop_distances(net: &SocialNetwork) -> Vec<Vec<usize>> {
    let n = net.member_count();
    let inf = usize::MAX;
    let mut d = vec![vec![inf; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for e in net.edges() {
        d[e.from.index()][e.to.index()] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] != inf && d[k][j] != inf && d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

fn enumerate_paths(
    adj: &[Vec<usize>],
    path: &mut Vec<usize>,
    target: usize,
    len: usize,
    visit: &mut dyn FnMut(&[usize]),
) {
    let last = *path.last().unwrap();
    if path.len() - 1 == len {
        if last == target {
            visit(path);
        }
        return;
    }
    for &next in &adj[last] {
        if !path.contains(&next) {
            path.push(next);
            enumerate_paths(adj, path, target, len, visit);
            path.pop();
        }
    }
}

/// Betweenness by listing every shortest path explicitly. Symmetric networks
/// count each unordered pair once and normalise by `(n-1)(n-2)/2`; directed
/// ones count ordered pairs and normalise by `(n-1)(n-2)`.
pub fn brute_betweenness(net: &SocialNetwork, normalized: bool) -> Vec<f64> {
    let n = net.member_count();
    let adj = adjacency(net);
    let dist = hop_distances(net);
    let mut score = vec![0.0; n];
    for s in 0..n {
        for t in 0..n {
            if s == t || dist[s][t] == usize::MAX {
                continue;
            }
            let mut through = vec![0usize; n];
            let mut total = 0usize;
            let mut path = vec![s];
            enumerate_paths(&adj, &mut path, t, dist[s][t], &mut |p| {
                total += 1;
                for &v in &p[1..p.len() - 1] {
                    through[v] += 1;
                }
            });
            for v in 0..n {
                score[v] += through[v] as f64 / total as f64;
            }
        }
    }
    let symmetric = (0..n).all(|i| (0..n).all(|j| (dist[i][j] == 1) == (dist[j][i] == 1)));
    if symmetric {
        score.iter_mut().for_each(|v| *v /= 2.0);
    }
    if normalized && n > 2 {
        let pairs = ((n - 1) * (n - 2)) as f64 / if symmetric { 2.0 } else { 1.0 };
        score.iter_mut().for_each(|v| *v /= pairs);
    }
    score
}

/// Members that can reach `x`, by a reverse breadth-first search.
pub fn reachers(net: &SocialNetwork, x: usize) -> Vec<usize> {
    let n = net.member_count();
    let mut radj = vec![Vec::new(); n];
    for e in net.edges() {
        radj[e.to.index()].push(e.from.index());
    }
    let mut seen = vec![false; n];
    seen[x] = true;
    let mut q = VecDeque::from([x]);
    let mut out = Vec::new();
    while let Some(v) = q.pop_front() {
        for &u in &radj[v] {
            if !seen[u] {
                seen[u] = true;
                out.push(u);
                q.push_back(u);
            }
        }
    }
    out
}

/// Kendall's coefficient as the double sum of sign products. The summand is
/// symmetric in `i` and `j`, so each unordered pair is visited once and
/// counted twice.
pub fn kendall_double_loop(x: &[u64], y: &[u64]) -> f64 {
    let n = x.len();
    let mut s: i64 = 0;
    for i in 0..n {
        let (xi, yi) = (x[i] as i64, y[i] as i64);
        for j in i + 1..n {
            s += (x[j] as i64 - xi).signum() * (y[j] as i64 - yi).signum();
        }
    }
    2.0 * s as f64 / (n * (n - 1)) as f64
}

/// Competition ranking by counting strictly larger scores.
pub fn naive_ranking(scores: &[f64]) -> Vec<u64> {
    scores
        .iter()
        .map(|&s| 1 + scores.iter().filter(|&&o| o > s).count() as u64)
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
