//! Classical centrality and prestige measures on unweighted geodesics.
//!
//! Edge weights are ignored here: only the presence of `y -> x` matters.
//! Undirected inputs are expected as symmetric directed edge pairs.

use std::collections::VecDeque;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use crate::exec::{map_range, Execution};
use crate::graph::SocialNetwork;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    Degree,
    Indegree,
    Outdegree,
    Closeness,
    Betweenness,
    DegreePrestige,
    InfluenceDomain,
    ProximityPrestige,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::Degree => "degree",
            Measure::Indegree => "indegree",
            Measure::Outdegree => "outdegree",
            Measure::Closeness => "closeness",
            Measure::Betweenness => "betweenness",
            Measure::DegreePrestige => "degree_prestige",
            Measure::InfluenceDomain => "influence_domain",
            Measure::ProximityPrestige => "proximity_prestige",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s.replace('-', "_").as_str() {
            "degree" => Measure::Degree,
            "indegree" => Measure::Indegree,
            "outdegree" => Measure::Outdegree,
            "closeness" => Measure::Closeness,
            "betweenness" => Measure::Betweenness,
            "degree_prestige" => Measure::DegreePrestige,
            "influence_domain" => Measure::InfluenceDomain,
            "proximity_prestige" => Measure::ProximityPrestige,
            _ => return Err(format!("unknown measure `{s}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentralityScores {
    pub measure: Measure,
    pub normalized: bool,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeMode {
    In,
    Out,
    /// Distinct neighbours in either direction.
    Both,
}

/// Evaluate any measure by tag.
pub fn compute(net: &SocialNetwork, measure: Measure, normalized: bool, exec: Execution) -> CentralityScores {
    match measure {
        Measure::Degree => degree(net, DegreeMode::Both, normalized),
        Measure::Indegree => degree(net, DegreeMode::In, normalized),
        Measure::Outdegree => degree(net, DegreeMode::Out, normalized),
        Measure::DegreePrestige => CentralityScores {
            measure: Measure::DegreePrestige,
            ..degree(net, DegreeMode::In, normalized)
        },
        Measure::Closeness => closeness(net, normalized, exec),
        Measure::Betweenness => betweenness(net, normalized, exec),
        Measure::InfluenceDomain => influence_domain(net, exec),
        Measure::ProximityPrestige => proximity_prestige(net, normalized, exec),
    }
}

fn in_sources(net: &SocialNetwork, x: usize) -> impl Iterator<Item = usize> + '_ {
    let (from, _, _) = net.edge_arrays();
    net.in_edges(x).iter().map(move |&e| from[e as usize] as usize)
}

pub fn degree(net: &SocialNetwork, mode: DegreeMode, normalized: bool) -> CentralityScores {
    let n = net.member_count();
    let values = (0..n)
        .map(|x| {
            let d = match mode {
                DegreeMode::Out => net.out_targets(x).len(),
                DegreeMode::In => net.in_edges(x).len(),
                DegreeMode::Both => {
                    // Both lists are ascending; count the union.
                    let out = net.out_targets(x);
                    let inn: Vec<usize> = in_sources(net, x).collect();
                    let (mut i, mut j, mut count) = (0, 0, 0);
                    while i < out.len() || j < inn.len() {
                        match (out.get(i).map(|&v| v as usize), inn.get(j)) {
                            (Some(a), Some(&b)) if a == b => {
                                i += 1;
                                j += 1;
                            }
                            (Some(a), Some(&b)) if a < b => i += 1,
                            (Some(_), None) => i += 1,
                            _ => j += 1,
                        }
                        count += 1;
                    }
                    count
                }
            } as f64;
            if normalized && n > 1 {
                d / (n - 1) as f64
            } else {
                d
            }
        })
        .collect();
    let measure = match mode {
        DegreeMode::In => Measure::Indegree,
        DegreeMode::Out => Measure::Outdegree,
        DegreeMode::Both => Measure::Degree,
    };
    CentralityScores { measure, normalized, values }
}

/// Hop distances from `source`, following out-edges (`inward == false`) or
/// in-edges. Returns `(reached count excluding source, distance sum)`.
fn bfs_reach(net: &SocialNetwork, source: usize, inward: bool, dist: &mut [u32], queue: &mut VecDeque<usize>) -> (usize, u64) {
    dist.fill(u32::MAX);
    queue.clear();
    dist[source] = 0;
    queue.push_back(source);
    let (from, _, _) = net.edge_arrays();
    let (mut reached, mut total) = (0usize, 0u64);
    while let Some(v) = queue.pop_front() {
        let d = dist[v] + 1;
        let mut visit = |w: usize| {
            if dist[w] == u32::MAX {
                dist[w] = d;
                reached += 1;
                total += d as u64;
                queue.push_back(w);
            }
        };
        if inward {
            net.in_edges(v).iter().for_each(|&e| visit(from[e as usize] as usize));
        } else {
            net.out_targets(v).iter().for_each(|&w| visit(w as usize));
        }
    }
    (reached, total)
}

fn per_member_reach(net: &SocialNetwork, inward: bool, exec: Execution) -> Vec<(usize, u64)> {
    let n = net.member_count();
    const BLOCK: usize = 256;
    let blocks = map_range(exec, n.div_ceil(BLOCK), |b| {
        let mut dist = vec![u32::MAX; n];
        let mut queue = VecDeque::new();
        (b * BLOCK..((b + 1) * BLOCK).min(n))
            .map(|x| bfs_reach(net, x, inward, &mut dist, &mut queue))
            .collect::<Vec<_>>()
    });
    blocks.into_iter().flatten().collect()
}

/// Outward closeness. Members reaching nobody score 0. The normalised form is
/// `(r / sum) * (r / (n - 1))` with `r` the number of reachable members, which
/// is `(n - 1) / sum` on strongly connected inputs.
pub fn closeness(net: &SocialNetwork, normalized: bool, exec: Execution) -> CentralityScores {
    let n = net.member_count();
    let values = per_member_reach(net, false, exec)
        .into_iter()
        .map(|(r, sum)| match (r, normalized) {
            (0, _) => 0.0,
            (_, false) => 1.0 / sum as f64,
            (_, true) => (r as f64 / sum as f64) * (r as f64 / (n - 1) as f64),
        })
        .collect();
    CentralityScores { measure: Measure::Closeness, normalized, values }
}

/// Number of members with a directed path to each member.
pub fn influence_domain(net: &SocialNetwork, exec: Execution) -> CentralityScores {
    let values = per_member_reach(net, true, exec)
        .into_iter()
        .map(|(r, _)| r as f64)
        .collect();
    CentralityScores { measure: Measure::InfluenceDomain, normalized: false, values }
}

/// `I_x / sum` (or `I_x^2 / ((n - 1) sum)` normalised) with the distance sum
/// taken over the `I_x` members that reach `x`.
pub fn proximity_prestige(net: &SocialNetwork, normalized: bool, exec: Execution) -> CentralityScores {
    let n = net.member_count();
    let values = per_member_reach(net, true, exec)
        .into_iter()
        .map(|(i, sum)| match (i, normalized) {
            (0, _) => 0.0,
            (_, false) => i as f64 / sum as f64,
            (_, true) => (i * i) as f64 / ((n - 1) as f64 * sum as f64),
        })
        .collect();
    CentralityScores { measure: Measure::ProximityPrestige, normalized, values }
}

/// Shortest-path betweenness by dependency accumulation over BFS DAGs.
///
/// On symmetric inputs the value counts unordered pairs and normalises by
/// `(n-1)(n-2)/2`; otherwise ordered pairs and `(n-1)(n-2)`.
pub fn betweenness(net: &SocialNetwork, normalized: bool, exec: Execution) -> CentralityScores {
    let n = net.member_count();
    const BLOCK: usize = 64;
    let (from, _, _) = net.edge_arrays();
    let partial = map_range(exec, n.div_ceil(BLOCK), |b| {
        let mut acc = vec![0.0f64; n];
        let mut dist = vec![u32::MAX; n];
        let mut sigma = vec![0.0f64; n];
        let mut delta = vec![0.0f64; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::new();
        for s in b * BLOCK..((b + 1) * BLOCK).min(n) {
            dist.fill(u32::MAX);
            sigma.fill(0.0);
            delta.fill(0.0);
            order.clear();
            dist[s] = 0;
            sigma[s] = 1.0;
            queue.push_back(s);
            while let Some(v) = queue.pop_front() {
                order.push(v);
                for &w in net.out_targets(v) {
                    let w = w as usize;
                    if dist[w] == u32::MAX {
                        dist[w] = dist[v] + 1;
                        queue.push_back(w);
                    }
                    if dist[w] == dist[v] + 1 {
                        sigma[w] += sigma[v];
                    }
                }
            }
            for &w in order.iter().rev() {
                if dist[w] == 0 {
                    continue;
                }
                for &e in net.in_edges(w) {
                    let v = from[e as usize] as usize;
                    if dist[v] != u32::MAX && dist[v] + 1 == dist[w] {
                        delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
                    }
                }
                acc[w] += delta[w];
            }
        }
        acc
    });
    let mut raw = vec![0.0f64; n];
    for block in partial {
        for (r, v) in raw.iter_mut().zip(block) {
            *r += v;
        }
    }
    let symmetric = net.is_symmetric();
    let pairs = if n > 2 { ((n - 1) * (n - 2)) as f64 } else { 0.0 };
    let values = raw
        .into_iter()
        .map(|v| {
            let v = if symmetric { v / 2.0 } else { v };
            match (normalized, pairs > 0.0) {
                (false, _) => v,
                (true, false) => 0.0,
                (true, true) if symmetric => v / (pairs / 2.0),
                (true, true) => v / pairs,
            }
        })
        .collect();
    CentralityScores { measure: Measure::Betweenness, normalized, values }
}

/// `member;value` rows preceded by a `#` comment naming the measure.
pub fn write_scores<W: Write>(net: &SocialNetwork, scores: &CentralityScores, network: &str, mut w: W) -> io::Result<()> {
    writeln!(
        w,
        "# measure={} normalized={} network={}",
        scores.measure, scores.normalized, network
    )?;
    for (label, v) in net.labels().iter().zip(&scores.values) {
        writeln!(w, "{label};{v}")?;
    }
    Ok(())
}
