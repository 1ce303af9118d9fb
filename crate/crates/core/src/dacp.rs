//! Directed acyclic complete partite graphs and their correspondence with
//! set partitions.
//!
//! A partition maps to the graph on its elements with an edge `a -> b`
//! whenever `a > b` lie in different blocks. Going back, any topological
//! order of a valid graph (sinks first) relabels it into the image of a
//! partition whose blocks are the non-adjacency classes; all such orders give
//! the same partition.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::partition::SetPartition;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DacpError {
    #[error("vertex {vertex} is outside 1..{n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("directed cycle through vertex {0}")]
    DirectedCycle(usize),
    #[error("complement is not a union of cliques: {a} and {c} are both non-adjacent to {b} but adjacent to each other")]
    NotCompletePartite { a: usize, b: usize, c: usize },
}

/// Wire form: `{"n": 5, "edges": [[2, 1], ...]}` with 1-based vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dacp {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Dacp {
    /// Builds and validates a graph.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, DacpError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let g = Dacp { n, edges: edges.into_iter().collect() };
        g.validate()?;
        Ok(g)
    }

    /// Builds a graph without validating it; [`from_dacp`] and
    /// [`Dacp::validate`] report any violation.
    pub fn new_unchecked<I>(n: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Dacp { n, edges: edges.into_iter().collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edges.contains(&(from, to))
    }

    /// Same graph with vertex `v` renamed to `perm[v - 1]`.
    pub fn relabeled(&self, perm: &[usize]) -> Dacp {
        Dacp {
            n: self.n,
            edges: self.edges.iter().map(|&(a, b)| (perm[a - 1], perm[b - 1])).collect(),
        }
    }

    // out[a][b] for 0-based vertices
    fn matrix(&self) -> Vec<Vec<bool>> {
        let mut m = vec![vec![false; self.n]; self.n];
        for &(a, b) in &self.edges {
            m[a - 1][b - 1] = true;
        }
        m
    }

    pub fn validate(&self) -> Result<(), DacpError> {
        let n = self.n;
        for &(a, b) in &self.edges {
            for v in [a, b] {
                if v == 0 || v > n {
                    return Err(DacpError::VertexOutOfRange { vertex: v, n });
                }
            }
            if a == b {
                return Err(DacpError::SelfLoop(a));
            }
        }
        let out = self.matrix();
        topological_order(&out).map_err(|v| DacpError::DirectedCycle(v + 1))?;
        let adjacent = |a: usize, b: usize| out[a][b] || out[b][a];
        for b in 0..n {
            for a in 0..n {
                if a == b || adjacent(a, b) {
                    continue;
                }
                for c in a + 1..n {
                    if c != b && !adjacent(b, c) && adjacent(a, c) {
                        return Err(DacpError::NotCompletePartite { a: a + 1, b: b + 1, c: c + 1 });
                    }
                }
            }
        }
        Ok(())
    }
}

// Kahn's algorithm emitting sinks first (smallest index among ties). On a
// cycle, returns some vertex on or behind it.
fn topological_order(out: &[Vec<bool>]) -> Result<Vec<usize>, usize> {
    let n = out.len();
    let mut out_degree: Vec<usize> =
        out.iter().map(|row| row.iter().filter(|&&e| e).count()).collect();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let Some(v) = (0..n).find(|&v| !placed[v] && out_degree[v] == 0) else {
            return Err((0..n).find(|&v| !placed[v]).expect("unplaced vertex"));
        };
        placed[v] = true;
        order.push(v);
        for (u, row) in out.iter().enumerate() {
            if row[v] {
                out_degree[u] -= 1;
            }
        }
    }
    Ok(order)
}

pub fn to_dacp(p: &SetPartition) -> Dacp {
    let n = p.n();
    let mut edges = BTreeSet::new();
    for a in 1..=n {
        for b in 1..a {
            if !p.same_block(a, b) {
                edges.insert((a, b));
            }
        }
    }
    Dacp { n, edges }
}

/// Recovers the partition whose graph is isomorphic to `g`.
pub fn from_dacp(g: &Dacp) -> Result<SetPartition, DacpError> {
    g.validate()?;
    let out = g.matrix();
    let order = topological_order(&out).expect("validated acyclic");
    // class label per vertex: first vertex in the order that is non-adjacent
    let mut labels = Vec::with_capacity(g.n);
    for (i, &v) in order.iter().enumerate() {
        let class = order[..i].iter().position(|&u| !out[u][v] && !out[v][u]).unwrap_or(i);
        labels.push(class);
    }
    Ok(SetPartition::from_labels(&labels))
}

/// Whether `pattern` is isomorphic to an induced subgraph of `host`.
///
/// Works on the graphs directly: vertices of `pattern` are placed one at a
/// time onto unused host vertices, checking edge presence and direction
/// against every vertex already placed.
pub fn dacp_contains(host: &Dacp, pattern: &Dacp) -> bool {
    if pattern.n > host.n {
        return false;
    }
    let h = host.matrix();
    let p = pattern.matrix();
    let mut image = Vec::with_capacity(pattern.n);
    let mut used = vec![false; host.n];
    place(&h, &p, &mut image, &mut used)
}

fn place(h: &[Vec<bool>], p: &[Vec<bool>], image: &mut Vec<usize>, used: &mut [bool]) -> bool {
    let j = image.len();
    if j == p.len() {
        return true;
    }
    for v in 0..h.len() {
        if used[v] {
            continue;
        }
        let consistent =
            image.iter().enumerate().all(|(i, &u)| p[i][j] == h[u][v] && p[j][i] == h[v][u]);
        if !consistent {
            continue;
        }
        used[v] = true;
        image.push(v);
        if place(h, p, image, used) {
            return true;
        }
        image.pop();
        used[v] = false;
    }
    false
}
