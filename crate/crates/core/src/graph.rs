//! The directed reply graph over author accounts and its traversal kernels.
//!
//! Nodes are authors, kept in ascending id order so that node indices double
//! as the id tie-break everywhere else. An arc `u -> v` with weight `k` means
//! `u` replied `k` times to messages authored by `v`. Self-replies create no
//! arc. Distances are hop counts; weights never enter a geodesic.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::event::{Corpus, Message};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Direction {
    /// Follow arcs from replier to replied-to.
    #[default]
    Directed,
    /// Treat every arc as an undirected tie.
    Undirected,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Directed => "directed",
            Direction::Undirected => "undirected",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentMode {
    Weak,
    Strong,
}

/// A node partition. Members are sorted, components are ordered by their
/// smallest member, and `giant` indexes the largest (ties go to the
/// component with the smallest member).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Components {
    pub members: Vec<Vec<usize>>,
    pub giant: Option<usize>,
}

impl Components {
    fn from_groups(mut groups: Vec<Vec<usize>>) -> Self {
        for g in &mut groups {
            g.sort_unstable();
        }
        groups.sort_by_key(|g| g[0]);
        let mut giant: Option<usize> = None;
        for (i, g) in groups.iter().enumerate() {
            if giant.is_none_or(|j| g.len() > groups[j].len()) {
                giant = Some(i);
            }
        }
        Components {
            members: groups,
            giant,
        }
    }

    pub fn giant_members(&self) -> &[usize] {
        self.giant
            .map(|g| self.members[g].as_slice())
            .unwrap_or(&[])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ForumGraph {
    ids: Vec<String>,
    out: Vec<Vec<usize>>,
    out_weight: Vec<Vec<u32>>,
    inc: Vec<Vec<usize>>,
    undirected: Vec<Vec<usize>>,
    messages: Vec<Vec<String>>,
}

impl ForumGraph {
    /// One node per author, one weighted arc per ordered replier/replied-to
    /// pair.
    pub fn from_corpus(corpus: &Corpus) -> Self {
        Self::from_messages(corpus.messages())
    }

    /// Builds from any time-ordered run of messages. Authors of resolved
    /// parents become nodes even when the parent itself is not in the run,
    /// which is what a time window or a filtered corpus needs.
    pub fn from_messages<'a, I>(messages: I) -> Self
    where
        I: IntoIterator<Item = &'a Message>,
        I::IntoIter: Clone,
    {
        let iter = messages.into_iter();
        let mut authors: BTreeSet<&str> = BTreeSet::new();
        for m in iter.clone() {
            authors.insert(&m.event.author_id);
            if let Some(p) = m.replied_author() {
                authors.insert(p);
            }
        }
        let ids: Vec<String> = authors.iter().map(|s| s.to_string()).collect();
        let index: BTreeMap<&str, usize> =
            authors.iter().enumerate().map(|(i, s)| (*s, i)).collect();

        let n = ids.len();
        let mut messages_of = vec![Vec::new(); n];
        let mut weights: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        for m in iter {
            let u = index[m.event.author_id.as_str()];
            messages_of[u].push(m.event.message_id.clone());
            if let Some(p) = m.replied_author() {
                *weights.entry((u, index[p])).or_insert(0) += 1;
            }
        }
        Self::assemble(ids, weights, messages_of)
    }

    fn assemble(
        ids: Vec<String>,
        weights: BTreeMap<(usize, usize), u32>,
        messages: Vec<Vec<String>>,
    ) -> Self {
        let n = ids.len();
        let mut out = vec![Vec::new(); n];
        let mut out_weight = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        // BTreeMap order gives sorted adjacency lists
        for (&(u, v), &w) in &weights {
            out[u].push(v);
            out_weight[u].push(w);
            inc[v].push(u);
        }
        let undirected = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = out[v].iter().chain(&inc[v]).copied().collect();
                nb.sort_unstable();
                nb.dedup();
                nb
            })
            .collect();
        ForumGraph {
            ids,
            out,
            out_weight,
            inc,
            undirected,
            messages,
        }
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    /// Number of distinct arcs.
    pub fn arc_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, node: usize) -> &str {
        &self.ids[node]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.binary_search_by(|s| s.as_str().cmp(id)).ok()
    }

    pub fn out_neighbors(&self, node: usize) -> &[usize] {
        &self.out[node]
    }

    pub fn in_neighbors(&self, node: usize) -> &[usize] {
        &self.inc[node]
    }

    /// Successors in the traversal sense of `direction`.
    pub fn neighbors(&self, node: usize, direction: Direction) -> &[usize] {
        match direction {
            Direction::Directed => &self.out[node],
            Direction::Undirected => &self.undirected[node],
        }
    }

    fn predecessors(&self, node: usize, direction: Direction) -> &[usize] {
        match direction {
            Direction::Directed => &self.inc[node],
            Direction::Undirected => &self.undirected[node],
        }
    }

    pub fn arc_weight(&self, from: usize, to: usize) -> Option<u32> {
        let pos = self.out[from].binary_search(&to).ok()?;
        Some(self.out_weight[from][pos])
    }

    /// `(source, target, weight)` in source-then-target order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.out[u]
                .iter()
                .zip(&self.out_weight[u])
                .map(move |(&v, &w)| (u, v, w))
        })
    }

    /// Authored message ids in time order.
    pub fn messages_of(&self, node: usize) -> &[String] {
        &self.messages[node]
    }

    /// Hop distances from `source`; `None` marks unreachable nodes.
    pub fn distances_from(&self, source: usize, direction: Direction) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.node_count()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or(0) + 1;
            for &w in self.neighbors(v, direction) {
                if dist[w].is_none() {
                    dist[w] = Some(d);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Distances keyed by node id.
    pub fn shortest_path_lengths(
        &self,
        source: &str,
        direction: Direction,
    ) -> Result<BTreeMap<&str, Option<u32>>> {
        let s = self
            .index_of(source)
            .ok_or_else(|| Error::UnknownNode(source.to_string()))?;
        Ok(self
            .distances_from(s, direction)
            .into_iter()
            .enumerate()
            .map(|(v, d)| (self.id(v), d))
            .collect())
    }

    pub fn connected_components(&self, mode: ComponentMode) -> Components {
        if self.is_empty() {
            return Components::default();
        }
        let groups = match mode {
            ComponentMode::Weak => self.weak_components(),
            ComponentMode::Strong => self.strong_components(),
        };
        Components::from_groups(groups)
    }

    fn weak_components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut groups = Vec::new();
        for root in 0..n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut group = vec![root];
            let mut i = 0;
            while i < group.len() {
                let v = group[i];
                i += 1;
                for &w in &self.undirected[v] {
                    if !seen[w] {
                        seen[w] = true;
                        group.push(w);
                    }
                }
            }
            groups.push(group);
        }
        groups
    }

    // Tarjan, with an explicit call stack.
    fn strong_components(&self) -> Vec<Vec<usize>> {
        const UNVISITED: usize = usize::MAX;
        let n = self.node_count();
        let mut index = vec![UNVISITED; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut calls: Vec<(usize, usize)> = Vec::new();
        let mut groups = Vec::new();
        let mut next = 0usize;

        for root in 0..n {
            if index[root] != UNVISITED {
                continue;
            }
            index[root] = next;
            low[root] = next;
            next += 1;
            stack.push(root);
            on_stack[root] = true;
            calls.push((root, 0));

            while let Some(&(v, pos)) = calls.last() {
                if let Some(&w) = self.out[v].get(pos) {
                    calls.last_mut().expect("non-empty").1 += 1;
                    if index[w] == UNVISITED {
                        index[w] = next;
                        low[w] = next;
                        next += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        calls.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                    continue;
                }
                calls.pop();
                if let Some(&(parent, _)) = calls.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut group = Vec::new();
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        group.push(w);
                        if w == v {
                            break;
                        }
                    }
                    groups.push(group);
                }
            }
        }
        groups
    }

    /// Unnormalized shortest-path betweenness over all ordered source/target
    /// pairs, with credit split evenly among equally short paths.
    pub fn betweenness(&self, direction: Direction) -> Vec<f64> {
        let n = self.node_count();
        let partials = par::map_blocks(n, |sources| {
            let mut scratch = BrandesScratch::new(n);
            let mut acc = vec![0.0; n];
            for s in sources {
                self.accumulate_dependencies(s, direction, &mut scratch, &mut acc);
            }
            acc
        });
        let mut total = vec![0.0; n];
        for block in partials {
            for (t, b) in total.iter_mut().zip(block) {
                *t += b;
            }
        }
        total
    }

    fn accumulate_dependencies(
        &self,
        source: usize,
        direction: Direction,
        scratch: &mut BrandesScratch,
        acc: &mut [f64],
    ) {
        let BrandesScratch {
            sigma,
            dist,
            delta,
            order,
            queue,
        } = scratch;
        for &v in order.iter() {
            sigma[v] = 0.0;
            dist[v] = u32::MAX;
            delta[v] = 0.0;
        }
        order.clear();
        queue.clear();

        sigma[source] = 1.0;
        dist[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in self.neighbors(v, direction) {
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
            if w == source {
                continue;
            }
            let coeff = (1.0 + delta[w]) / sigma[w];
            for &v in self.predecessors(w, direction) {
                if dist[v] != u32::MAX && dist[v] + 1 == dist[w] {
                    delta[v] += sigma[v] * coeff;
                }
            }
            acc[w] += delta[w];
        }
    }

    /// The graph without `removed` nodes and their incident arcs. Survivors
    /// keep their ids, arc weights and message index.
    pub fn without_nodes(&self, removed: &BTreeSet<usize>) -> ForumGraph {
        let keep: Vec<usize> = (0..self.node_count())
            .filter(|v| !removed.contains(v))
            .collect();
        let mut remap = vec![usize::MAX; self.node_count()];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        let mut weights = BTreeMap::new();
        for (u, v, w) in self.arcs() {
            if remap[u] != usize::MAX && remap[v] != usize::MAX {
                weights.insert((remap[u], remap[v]), w);
            }
        }
        let ids = keep.iter().map(|&v| self.ids[v].clone()).collect();
        let messages = keep.iter().map(|&v| self.messages[v].clone()).collect();
        Self::assemble(ids, weights, messages)
    }
}

struct BrandesScratch {
    sigma: Vec<f64>,
    dist: Vec<u32>,
    delta: Vec<f64>,
    order: Vec<usize>,
    queue: VecDeque<usize>,
}

impl BrandesScratch {
    fn new(n: usize) -> Self {
        BrandesScratch {
            sigma: vec![0.0; n],
            dist: vec![u32::MAX; n],
            delta: vec![0.0; n],
            order: Vec::with_capacity(n),
            queue: VecDeque::with_capacity(n),
        }
    }
}
