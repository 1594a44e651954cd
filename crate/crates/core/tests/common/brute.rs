//! Exhaustive reference for the structural metrics on tiny digraphs: every
//! simple path is enumerated, and clustering counts node triples directly.

use forumnet_core::structural::{self, network_summary};
use forumnet_core::{Corpus, Direction, ForumGraph, MessageEvent};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct Digraph {
    pub n: usize,
    pub arcs: Vec<(usize, usize)>,
}

/// 1 to 8 nodes, each ordered pair an arc with a per-graph probability.
pub fn random_digraph(seed: u64) -> Digraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=8);
    let p: f64 = rng.random_range(0.05..0.6);
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.random_bool(p) {
                arcs.push((u, v));
            }
        }
    }
    Digraph { n, arcs }
}

/// One opener per node and one reply per arc, so every node exists even
/// without arcs.
pub fn to_graph(d: &Digraph) -> ForumGraph {
    let mut events: Vec<MessageEvent> = (0..d.n)
        .map(|v| MessageEvent::opener(&format!("o{v}"), &format!("v{v}"), v as i64))
        .collect();
    for (i, &(u, v)) in d.arcs.iter().enumerate() {
        let parent = format!("o{v}");
        events.push(MessageEvent::reply(
            &format!("r{i}"),
            &parent,
            &parent,
            &format!("v{u}"),
            100 + i as i64,
        ));
    }
    ForumGraph::from_corpus(&Corpus::new(events))
}

#[derive(Debug, Clone)]
pub struct Expected {
    pub adarp: Option<f64>,
    pub diameter: Option<u32>,
    pub clustering: f64,
    pub closeness: Vec<f64>,
    pub betweenness: Vec<f64>,
}

fn adjacency(d: &Digraph, direction: Direction) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; d.n]; d.n];
    for &(u, v) in &d.arcs {
        adj[u][v] = true;
        if direction == Direction::Undirected {
            adj[v][u] = true;
        }
    }
    adj
}

fn simple_paths(adj: &[Vec<bool>], path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let last = *path.last().unwrap();
    for next in 0..adj.len() {
        if adj[last][next] && !path.contains(&next) {
            path.push(next);
            out.push(path.clone());
            simple_paths(adj, path, out);
            path.pop();
        }
    }
}

pub fn brute(d: &Digraph, direction: Direction) -> Expected {
    let n = d.n;
    let adj = adjacency(d, direction);
    let mut pairs = 0u64;
    let mut total = 0u64;
    let mut diameter = 0u32;
    let mut closeness = vec![0.0; n];
    let mut betweenness = vec![0.0; n];
    #[allow(clippy::needless_range_loop)]
    for s in 0..n {
        let mut paths = Vec::new();
        simple_paths(&adj, &mut vec![s], &mut paths);
        let (mut reach, mut sum) = (0u64, 0u64);
        for t in (0..n).filter(|&t| t != s) {
            let to_t: Vec<&Vec<usize>> = paths.iter().filter(|p| *p.last().unwrap() == t).collect();
            let Some(len) = to_t.iter().map(|p| p.len() - 1).min() else {
                continue;
            };
            let shortest: Vec<&&Vec<usize>> = to_t.iter().filter(|p| p.len() - 1 == len).collect();
            reach += 1;
            sum += len as u64;
            diameter = diameter.max(len as u32);
            for (v, b) in betweenness.iter_mut().enumerate() {
                let through = shortest
                    .iter()
                    .filter(|p| p[1..p.len() - 1].contains(&v))
                    .count();
                *b += through as f64 / shortest.len() as f64;
            }
        }
        pairs += reach;
        total += sum;
        if reach > 0 {
            let r = reach as f64;
            closeness[s] = (r / (n - 1) as f64) * (r / sum as f64);
        }
    }

    let und = adjacency(d, Direction::Undirected);
    let (mut triangles, mut triples) = (0u64, 0u64);
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if und[a][b] && und[b][c] && und[a][c] {
                    triangles += 1;
                }
            }
        }
    }
    for row in &und {
        let k = row.iter().filter(|&&e| e).count() as u64;
        triples += k * k.saturating_sub(1) / 2;
    }

    Expected {
        adarp: (pairs > 0).then(|| total as f64 / pairs as f64),
        diameter: (pairs > 0).then_some(diameter),
        clustering: if triples == 0 {
            0.0
        } else {
            3.0 * triangles as f64 / triples as f64
        },
        closeness,
        betweenness,
    }
}

/// Largest absolute deviation between the library and the reference, or a
/// description of the first structural mismatch.
pub fn deviation(d: &Digraph, direction: Direction) -> Result<f64, String> {
    let graph = to_graph(d);
    let want = brute(d, direction);
    let got = network_summary(&graph, direction);
    let cent = structural::node_centralities(&graph, direction);
    if got.diameter != want.diameter {
        return Err(format!(
            "diameter {:?} != {:?}",
            got.diameter, want.diameter
        ));
    }
    let mut worst: f64 = 0.0;
    match (got.adarp, want.adarp) {
        (Some(a), Some(b)) => worst = worst.max((a - b).abs()),
        (None, None) => {}
        (a, b) => return Err(format!("adarp {a:?} != {b:?}")),
    }
    worst = worst.max((got.clustering.unwrap_or(f64::NAN) - want.clustering).abs());
    for v in 0..d.n {
        let idx = graph.index_of(&format!("v{v}")).ok_or("missing node")?;
        worst = worst.max((cent[idx].closeness - want.closeness[v]).abs());
        worst = worst.max((cent[idx].betweenness - want.betweenness[v]).abs());
    }
    if worst.is_nan() {
        return Err("NaN metric".into());
    }
    Ok(worst)
}
