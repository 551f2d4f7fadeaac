//! Period-two Bratteli diagrams built from bipartite graphs, in particular the
//! simply-laced Coxeter-Dynkin graphs, together with graph norms.
//!
//! Vertex numbering:
//! * `A_r`: the path `0 - 1 - … - (r−1)`.
//! * `D_r`: the path `0 - … - (r−2)` with vertex `r−1` attached to `r−3`.
//! * `E_r`: the path `0 - … - (r−2)` with vertex `r−1` attached to vertex 2.
//!
//! The default start vertex is 0, an end of the long arm in every case.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

use crate::diagram::BratteliDiagram;
use crate::error::DiagramError;
use crate::matrix::Matrix;
use crate::perron::perron_bracket;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("unknown Dynkin type {0:?} (expected A, D or E)")]
    UnknownType(String),
    #[error("no {kind} graph of rank {rank}")]
    BadRank { kind: DynkinType, rank: usize },
    #[error("tower depth must be at least 1")]
    BadDepth,
    #[error("graph is not connected")]
    Disconnected,
    #[error("adjacency matrix is not square and symmetric")]
    NotSymmetric,
    #[error("graph is not bipartite")]
    NotBipartite,
    #[error("start vertex {0} out of range")]
    BadStart(usize),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DynkinType {
    A,
    D,
    E,
}

impl fmt::Display for DynkinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DynkinType::A => "A",
            DynkinType::D => "D",
            DynkinType::E => "E",
        })
    }
}

impl FromStr for DynkinType {
    type Err = TowerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(DynkinType::A),
            "D" | "d" => Ok(DynkinType::D),
            "E" | "e" => Ok(DynkinType::E),
            other => Err(TowerError::UnknownType(other.to_string())),
        }
    }
}

/// Connected bipartite multigraph with a distinguished start vertex. The
/// start vertex is always in class 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedGraph {
    adjacency: Matrix,
    classes: Vec<u8>,
    start: usize,
}

impl MarkedGraph {
    pub fn new(adjacency: Matrix, start: usize) -> Result<Self, TowerError> {
        let n = adjacency.rows();
        if !adjacency.is_square() || adjacency != adjacency.transpose() {
            return Err(TowerError::NotSymmetric);
        }
        if start >= n {
            return Err(TowerError::BadStart(start));
        }
        let mut classes = vec![u8::MAX; n];
        classes[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for w in 0..n {
                if adjacency.get(v, w).is_zero() {
                    continue;
                }
                if classes[w] == u8::MAX {
                    classes[w] = 1 - classes[v];
                    queue.push_back(w);
                } else if classes[w] == classes[v] {
                    return Err(TowerError::NotBipartite);
                }
            }
        }
        if classes.contains(&u8::MAX) {
            return Err(TowerError::Disconnected);
        }
        Ok(MarkedGraph {
            adjacency,
            classes,
            start,
        })
    }

    /// Same graph anchored at another vertex; classes are recomputed.
    pub fn with_start(self, start: usize) -> Result<Self, TowerError> {
        MarkedGraph::new(self.adjacency, start)
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.rows()
    }

    pub fn adjacency(&self) -> &Matrix {
        &self.adjacency
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn class_of(&self, v: usize) -> u8 {
        self.classes[v]
    }

    /// Vertices of the given colour class, in increasing order.
    pub fn class(&self, c: u8) -> Vec<usize> {
        (0..self.vertex_count())
            .filter(|&v| self.classes[v] == c)
            .collect()
    }

    pub fn degrees(&self) -> Vec<BigUint> {
        self.adjacency.row_iter().map(|r| r.iter().sum()).collect()
    }
}

fn graph_from_edges(n: usize, edges: &[(usize, usize)]) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for &(a, b) in edges {
        m.set(a, b, BigUint::from(1u32));
        m.set(b, a, BigUint::from(1u32));
    }
    m
}

pub fn dynkin(kind: DynkinType, rank: usize) -> Result<MarkedGraph, TowerError> {
    let ok = match kind {
        DynkinType::A => rank >= 2,
        DynkinType::D => rank >= 4,
        DynkinType::E => (6..=8).contains(&rank),
    };
    if !ok {
        return Err(TowerError::BadRank { kind, rank });
    }
    let arm = match kind {
        DynkinType::A => rank,
        DynkinType::D | DynkinType::E => rank - 1,
    };
    let mut edges: Vec<(usize, usize)> = (1..arm).map(|i| (i - 1, i)).collect();
    match kind {
        DynkinType::A => {}
        DynkinType::D => edges.push((rank - 3, rank - 1)),
        DynkinType::E => edges.push((2, rank - 1)),
    }
    MarkedGraph::new(graph_from_edges(rank, &edges), 0)
}

/// Tower diagram of depth `depth` (levels `0..=depth`). Level 0 is the start
/// vertex and level `n + 1` consists of the neighbours of level `n`; the
/// multiplicity matrix between consecutive levels is the corresponding block
/// of the adjacency matrix, so odd steps are the transposes of even ones.
pub fn tower_diagram(graph: &MarkedGraph, depth: usize) -> Result<BratteliDiagram, TowerError> {
    if depth == 0 {
        return Err(TowerError::BadDepth);
    }
    let adj = graph.adjacency();
    let mut levels = vec![vec![graph.start]];
    let mut matrices = Vec::with_capacity(depth);
    for _ in 0..depth {
        let prev = levels.last().unwrap();
        let next: Vec<usize> = (0..graph.vertex_count())
            .filter(|&w| prev.iter().any(|&v| !adj.get(v, w).is_zero()))
            .collect();
        let mut m = Matrix::zeros(next.len(), prev.len());
        for (r, &w) in next.iter().enumerate() {
            for (c, &v) in prev.iter().enumerate() {
                m.set(r, c, adj.get(w, v).clone());
            }
        }
        matrices.push(m);
        levels.push(next);
    }
    let sizes = levels.iter().map(Vec::len).collect();
    Ok(BratteliDiagram::new(sizes, matrices, false)?)
}

/// Largest adjacency eigenvalue with its bracket width below `tolerance`.
pub fn graph_norm(graph: &MarkedGraph, tolerance: f64) -> f64 {
    perron_bracket(graph.adjacency(), tolerance).value()
}

pub fn jones_index(graph: &MarkedGraph, tolerance: f64) -> f64 {
    let n = graph_norm(graph, tolerance);
    n * n
}
