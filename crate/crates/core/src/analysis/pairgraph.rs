//! De Bruijn pair-graph deciders for automata on the integers.
//!
//! After interval-normalizing the memory, an input configuration is a
//! bi-infinite walk in the de Bruijn graph on `A^{d-1}`, and a pair of
//! configurations with equal images is a walk in the pair graph whose
//! edges are pairs of input words with equal rule output. Non-injectivity
//! is the existence of a bi-infinite pair walk through an edge with two
//! distinct input words; a pre-injectivity failure is a finite pair walk
//! between diagonal vertices through such an edge. Both witnesses come
//! back as explicit eventually periodic configuration pairs built from a
//! cycle–path–cycle decomposition of the walk.

use std::collections::HashMap;

use crate::symbolic::sofic::NormalizedRule;
use crate::symbolic::{
    decode_values, CellularAutomaton, Configuration, PeriodicConfiguration, Symbol, SymbolicError,
};

/// A pair edge: two input words with the same output label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct PairEdge {
    w1: usize,
    w2: usize,
}

struct PairGraph {
    rule: NormalizedRule,
    vertices: usize,
    edges: Vec<PairEdge>,
    by_source: Vec<Vec<usize>>,
    by_target: Vec<Vec<usize>>,
}

impl PairGraph {
    fn build(ca: &CellularAutomaton, state_cap: u64) -> Result<PairGraph, SymbolicError> {
        let rule = NormalizedRule::from_automaton(ca)?;
        let vertices = rule.vertex_count();
        let states = (vertices as u128) * (vertices as u128);
        let word_pairs = (rule.word_count() as u128) * (rule.word_count() as u128);
        if states > state_cap as u128 || word_pairs > state_cap as u128 {
            return Err(SymbolicError::StateBudget {
                what: "pair graph construction",
                cap: state_cap,
            });
        }
        let mut edges = Vec::new();
        let mut by_label: Vec<Vec<usize>> = vec![Vec::new(); rule.alphabet];
        for w in 0..rule.word_count() {
            by_label[rule.edge_label(w) as usize].push(w);
        }
        for bucket in &by_label {
            for &w1 in bucket {
                for &w2 in bucket {
                    edges.push(PairEdge { w1, w2 });
                }
            }
        }
        edges.sort();
        let mut by_source = vec![Vec::new(); vertices * vertices];
        let mut by_target = vec![Vec::new(); vertices * vertices];
        for (i, e) in edges.iter().enumerate() {
            let src = rule.edge_from(e.w1) * vertices + rule.edge_from(e.w2);
            let tgt = rule.edge_to(e.w1) * vertices + rule.edge_to(e.w2);
            by_source[src].push(i);
            by_target[tgt].push(i);
        }
        Ok(PairGraph {
            rule,
            vertices,
            edges,
            by_source,
            by_target,
        })
    }

    fn source(&self, e: PairEdge) -> usize {
        self.rule.edge_from(e.w1) * self.vertices + self.rule.edge_from(e.w2)
    }

    fn target(&self, e: PairEdge) -> usize {
        self.rule.edge_to(e.w1) * self.vertices + self.rule.edge_to(e.w2)
    }

    /// States admitting an infinite backward walk: the greatest set in
    /// which every state keeps a predecessor.
    fn backward_alive(&self) -> Vec<bool> {
        self.alive(|state, alive| {
            self.by_target[state]
                .iter()
                .any(|&i| alive[self.source(self.edges[i])])
        })
    }

    fn forward_alive(&self) -> Vec<bool> {
        self.alive(|state, alive| {
            self.by_source[state]
                .iter()
                .any(|&i| alive[self.target(self.edges[i])])
        })
    }

    fn alive(&self, keep: impl Fn(usize, &[bool]) -> bool) -> Vec<bool> {
        let n = self.vertices * self.vertices;
        let mut alive = vec![true; n];
        loop {
            let mut changed = false;
            for s in 0..n {
                if alive[s] && !keep(s, &alive) {
                    alive[s] = false;
                    changed = true;
                }
            }
            if !changed {
                return alive;
            }
        }
    }

    /// Walks backward from `state` through alive states, always taking the
    /// least available edge, until a state repeats. Returns the entered
    /// cycle and the path from the cycle to `state`, both in forward edge
    /// order.
    fn backward_decomposition(
        &self,
        state: usize,
        alive: &[bool],
    ) -> (Vec<PairEdge>, Vec<PairEdge>) {
        let mut states = vec![state];
        let mut pos: HashMap<usize, usize> = HashMap::from([(state, 0)]);
        let mut into_edges: Vec<PairEdge> = Vec::new(); // into_edges[i] enters states[i]
        loop {
            let cur = *states.last().unwrap();
            let e = self.by_target[cur]
                .iter()
                .map(|&i| self.edges[i])
                .find(|&e| alive[self.source(e)])
                .expect("alive state keeps an alive predecessor");
            into_edges.push(e);
            let prev = self.source(e);
            if let Some(&j) = pos.get(&prev) {
                // states[j..] plus prev closes a cycle
                let cycle: Vec<PairEdge> = into_edges[j..].iter().rev().copied().collect();
                let path: Vec<PairEdge> = into_edges[..j].iter().rev().copied().collect();
                return (cycle, path);
            }
            pos.insert(prev, states.len());
            states.push(prev);
        }
    }

    /// Forward twin of [`Self::backward_decomposition`]: the path from
    /// `state` to a cycle, then the cycle, in forward edge order.
    fn forward_decomposition(
        &self,
        state: usize,
        alive: &[bool],
    ) -> (Vec<PairEdge>, Vec<PairEdge>) {
        let mut states = vec![state];
        let mut pos: HashMap<usize, usize> = HashMap::from([(state, 0)]);
        let mut out_edges: Vec<PairEdge> = Vec::new(); // out_edges[i] leaves states[i]
        loop {
            let cur = *states.last().unwrap();
            let e = self.by_source[cur]
                .iter()
                .map(|&i| self.edges[i])
                .find(|&e| alive[self.target(e)])
                .expect("alive state keeps an alive successor");
            out_edges.push(e);
            let next = self.target(e);
            if let Some(&j) = pos.get(&next) {
                let path = out_edges[..j].to_vec();
                let cycle = out_edges[j..].to_vec();
                return (path, cycle);
            }
            pos.insert(next, states.len());
            states.push(next);
        }
    }

    fn first_symbols(&self, edges: &[PairEdge]) -> (Vec<Symbol>, Vec<Symbol>) {
        let xs = edges
            .iter()
            .map(|e| self.rule.word_first_symbol(e.w1))
            .collect();
        let ys = edges
            .iter()
            .map(|e| self.rule.word_first_symbol(e.w2))
            .collect();
        (xs, ys)
    }

    /// Assembles the two eventually periodic input configurations spelled
    /// by `left_cycle^inf · path · right_cycle^inf`, with the first path
    /// edge at coordinate `start`.
    fn witness_pair(
        &self,
        left_cycle: &[PairEdge],
        path: &[PairEdge],
        right_cycle: &[PairEdge],
        start: i64,
    ) -> (Configuration, Configuration) {
        let (lx, ly) = self.first_symbols(left_cycle);
        let (cx, cy) = self.first_symbols(path);
        let (rx, ry) = self.first_symbols(right_cycle);
        let x = PeriodicConfiguration::new(lx, cx, rx, start).expect("cycles are nonempty");
        let y = PeriodicConfiguration::new(ly, cy, ry, start).expect("cycles are nonempty");
        (Configuration::Periodic(x), Configuration::Periodic(y))
    }
}

/// Two distinct configurations with equal images, or `None` when the
/// automaton is injective. A non-diagonal pair edge lying on a
/// bi-infinite pair walk is exactly a collision.
pub(crate) fn noninjectivity_witness(
    ca: &CellularAutomaton,
    state_cap: u64,
) -> Result<Option<(Configuration, Configuration)>, SymbolicError> {
    let graph = PairGraph::build(ca, state_cap)?;
    let backward = graph.backward_alive();
    let forward = graph.forward_alive();
    let Some(&edge) = graph
        .edges
        .iter()
        .find(|e| e.w1 != e.w2 && backward[graph.source(**e)] && forward[graph.target(**e)])
    else {
        return Ok(None);
    };
    let (left_cycle, pre_path) = graph.backward_decomposition(graph.source(edge), &backward);
    let (post_path, right_cycle) = graph.forward_decomposition(graph.target(edge), &forward);
    let mut path = pre_path;
    let start = -(path.len() as i64);
    path.push(edge);
    path.extend_from_slice(&post_path);
    Ok(Some(graph.witness_pair(
        &left_cycle,
        &path,
        &right_cycle,
        start,
    )))
}

/// A diamond: two almost-equal distinct configurations with equal images,
/// or `None` when the automaton is pre-injective. Found as a pair walk
/// from a diagonal vertex to a diagonal vertex through a non-diagonal
/// edge; outside the walk both configurations continue with the same
/// periodic word.
pub(crate) fn diamond_witness(
    ca: &CellularAutomaton,
    state_cap: u64,
) -> Result<Option<(Configuration, Configuration)>, SymbolicError> {
    let graph = PairGraph::build(ca, state_cap)?;
    let v = graph.vertices;
    let d = graph.rule.diameter;
    let k = graph.rule.alphabet;
    // BFS over (pair state, seen-non-diagonal flag)
    let idx = |state: usize, flag: bool| state * 2 + flag as usize;
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; v * v * 2]; // (prev node, edge index)
    let mut visited = vec![false; v * v * 2];
    let mut queue = std::collections::VecDeque::new();
    for u in 0..v {
        let s = u * v + u;
        visited[idx(s, false)] = true;
        queue.push_back(idx(s, false));
    }
    let mut goal: Option<usize> = None;
    'bfs: while let Some(node) = queue.pop_front() {
        let state = node / 2;
        let flag = node % 2 == 1;
        for &i in &graph.by_source[state] {
            let e = graph.edges[i];
            let nflag = flag || e.w1 != e.w2;
            let nstate = graph.target(e);
            let nnode = idx(nstate, nflag);
            if visited[nnode] {
                continue;
            }
            visited[nnode] = true;
            parent[nnode] = Some((node, i));
            let (nu, nv) = (nstate / v, nstate % v);
            if nflag && nu == nv {
                goal = Some(nnode);
                break 'bfs;
            }
            queue.push_back(nnode);
        }
    }
    let Some(goal) = goal else {
        return Ok(None);
    };
    let mut rev_edges = Vec::new();
    let mut node = goal;
    while let Some((prev, edge_idx)) = parent[node] {
        rev_edges.push(graph.edges[edge_idx]);
        node = prev;
    }
    rev_edges.reverse();
    let path = rev_edges;
    let start_state = node / 2;
    let start_vertex = start_state / v;
    let end_vertex = (goal / 2) % v;
    // outside the walk both tracks repeat the diagonal vertex words
    let boundary_word = |vertex: usize| -> Vec<Symbol> {
        if d == 1 {
            vec![0]
        } else {
            decode_values(vertex, d - 1, k)
        }
    };
    let left = boundary_word(start_vertex);
    let right = boundary_word(end_vertex);
    let (cx, cy) = graph.first_symbols(&path);
    let x = PeriodicConfiguration::new(left.clone(), cx, right.clone(), 0).expect("nonempty");
    let y = PeriodicConfiguration::new(left, cy, right, 0).expect("nonempty");
    Ok(Some((
        Configuration::Periodic(x),
        Configuration::Periodic(y),
    )))
}
