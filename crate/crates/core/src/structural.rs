//! Whole-network summary (average reachable distance, diameter, clustering,
//! average degree) and per-node degree, closeness and betweenness.

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{Direction, ForumGraph};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NetworkSummary {
    pub n: usize,
    pub arc_count: usize,
    /// Mean geodesic over ordered pairs that can reach each other.
    pub adarp: Option<f64>,
    /// Largest finite geodesic.
    pub diameter: Option<u32>,
    /// Global transitivity of the undirected projection.
    pub clustering: Option<f64>,
    /// `2 * arc_count / n`.
    pub avg_degree: Option<f64>,
}

/// Reachability profile of one source node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Reach {
    /// Nodes reachable from the source, itself excluded.
    pub reachable: u64,
    /// Sum of hop distances to those nodes.
    pub distance_sum: u64,
    /// Largest of those distances (0 when nothing is reachable).
    pub eccentricity: u32,
}

/// One BFS per source node.
pub fn reach_profile(graph: &ForumGraph, direction: Direction) -> Vec<Reach> {
    let n = graph.node_count();
    par::map_blocks(n, |sources| {
        sources
            .map(|s| {
                let mut r = Reach::default();
                for d in graph.distances_from(s, direction).into_iter().flatten() {
                    if d > 0 {
                        r.reachable += 1;
                        r.distance_sum += u64::from(d);
                        r.eccentricity = r.eccentricity.max(d);
                    }
                }
                r
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

pub fn network_summary(graph: &ForumGraph, direction: Direction) -> NetworkSummary {
    let n = graph.node_count();
    if n == 0 {
        return NetworkSummary::default();
    }
    let profile = reach_profile(graph, direction);
    let pairs: u64 = profile.iter().map(|r| r.reachable).sum();
    let total: u64 = profile.iter().map(|r| r.distance_sum).sum();
    let diameter = profile
        .iter()
        .map(|r| r.eccentricity)
        .max()
        .filter(|&d| d > 0);
    let arc_count = graph.arc_count();
    NetworkSummary {
        n,
        arc_count,
        adarp: (pairs > 0).then(|| total as f64 / pairs as f64),
        diameter,
        clustering: Some(global_clustering(graph)),
        avg_degree: Some(2.0 * arc_count as f64 / n as f64),
    }
}

/// Closed over connected triples on the undirected projection; 0 when the
/// graph has no connected triple.
pub fn global_clustering(graph: &ForumGraph) -> f64 {
    let n = graph.node_count();
    let mut mark = vec![false; n];
    let mut closed: u64 = 0;
    let mut triples: u64 = 0;
    for v in 0..n {
        let nb = graph.neighbors(v, Direction::Undirected);
        let k = nb.len() as u64;
        triples += k * k.saturating_sub(1) / 2;
        for &u in nb {
            mark[u] = true;
        }
        let mut links = 0u64;
        for &u in nb {
            links += graph
                .neighbors(u, Direction::Undirected)
                .iter()
                .filter(|&&w| mark[w])
                .count() as u64;
        }
        closed += links / 2;
        for &u in nb {
            mark[u] = false;
        }
    }
    if triples == 0 {
        0.0
    } else {
        closed as f64 / triples as f64
    }
}

/// Distinct in-neighbors plus distinct out-neighbors (directed) or distinct
/// neighbors (projection).
pub fn degrees(graph: &ForumGraph, direction: Direction) -> Vec<u32> {
    (0..graph.node_count())
        .map(|v| match direction {
            Direction::Directed => graph.out_neighbors(v).len() + graph.in_neighbors(v).len(),
            Direction::Undirected => graph.neighbors(v, Direction::Undirected).len(),
        } as u32)
        .collect()
}

/// `(r/(n-1)) * (r/sum)` with `r` the reachable count, 0 when nothing is
/// reachable.
pub fn closeness_from_reach(reach: &[Reach]) -> Vec<f64> {
    let n = reach.len();
    reach
        .iter()
        .map(|r| {
            if r.reachable == 0 || n < 2 {
                0.0
            } else {
                let r_u = r.reachable as f64;
                (r_u / (n - 1) as f64) * (r_u / r.distance_sum as f64)
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Centrality {
    pub degree: u32,
    pub closeness: f64,
    pub betweenness: f64,
}

pub fn node_centralities(graph: &ForumGraph, direction: Direction) -> Vec<Centrality> {
    let degree = degrees(graph, direction);
    let closeness = closeness_from_reach(&reach_profile(graph, direction));
    let betweenness = graph.betweenness(direction);
    degree
        .into_iter()
        .zip(closeness)
        .zip(betweenness)
        .map(|((degree, closeness), betweenness)| Centrality {
            degree,
            closeness,
            betweenness,
        })
        .collect()
}
