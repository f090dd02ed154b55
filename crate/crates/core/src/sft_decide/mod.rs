//! Exact decision procedures for subshifts of finite type.
//!
//! Each property reduces to a criterion on the trimmed graph:
//!
//! | property | criterion |
//! |---|---|
//! | TT | strongly connected |
//! | DPP | no edge between distinct SCCs |
//! | MIN | a single simple cycle |
//! | infinite | some branching vertex lies on a cycle |
//! | S, ES | every vertex reaches a branching vertex |
//! | UEQ | finite |
//!
//! The criteria are cross-checked against [`brute_force_profile`], which
//! works on cylinders and never looks at components or branching.

mod brute;

use std::collections::BTreeSet;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::systems::{EventuallyPeriodicPoint, SftSystem};

pub use brute::{brute_force_profile, CylinderProfile, DEFAULT_DEPTH, DEFAULT_PERIOD_BOUND};

/// Structural facts about the trimmed graph of an [`SftSystem`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphAnalysis {
    /// Trimmed vertices, ascending.
    pub vertices: Vec<usize>,
    /// `component[v]` for trimmed `v`; `usize::MAX` for trimmed-away vertices.
    pub component: Vec<usize>,
    pub components: Vec<Vec<usize>>,
    pub branching: BTreeSet<usize>,
    /// Vertices with a path (possibly empty) to a branching vertex.
    pub reach_branching: BTreeSet<usize>,
    /// Vertices lying on some cycle.
    pub cycle_vertices: BTreeSet<usize>,
}

impl GraphAnalysis {
    pub fn new(s: &SftSystem) -> Self {
        let vertices = s.trimmed_vertices();
        let mut graph: DiGraph<usize, ()> = DiGraph::new();
        let mut node = vec![NodeIndex::end(); s.alphabet_size()];
        for &v in &vertices {
            node[v] = graph.add_node(v);
        }
        for (a, b) in s.trimmed_edges() {
            graph.add_edge(node[a], node[b], ());
        }

        let mut component = vec![usize::MAX; s.alphabet_size()];
        let mut components: Vec<Vec<usize>> = tarjan_scc(&graph)
            .into_iter()
            .map(|c| {
                let mut c: Vec<usize> = c.into_iter().map(|n| graph[n]).collect();
                c.sort_unstable();
                c
            })
            .collect();
        components.sort();
        for (i, c) in components.iter().enumerate() {
            for &v in c {
                component[v] = i;
            }
        }

        let cycle_vertices = components
            .iter()
            .filter(|c| c.len() > 1 || s.has_edge(c[0], c[0]))
            .flatten()
            .copied()
            .collect();
        let branching: BTreeSet<usize> = vertices.iter().copied().filter(|&v| s.is_branching(v)).collect();

        // Backward closure of the branching set.
        let mut reach_branching = branching.clone();
        let mut stack: Vec<usize> = branching.iter().copied().collect();
        while let Some(v) = stack.pop() {
            for (a, b) in s.trimmed_edges() {
                if b == v && reach_branching.insert(a) {
                    stack.push(a);
                }
            }
        }

        GraphAnalysis { vertices, component, components, branching, reach_branching, cycle_vertices }
    }

    /// Edges joining two different strongly connected components.
    pub fn cross_edges<'a>(&'a self, s: &'a SftSystem) -> impl Iterator<Item = (usize, usize)> + 'a {
        s.trimmed_edges().filter(move |&(a, b)| self.component[a] != self.component[b])
    }
}

/// The exact answer for sensitivity; the constant is always 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensitivityResult {
    pub sensitive: bool,
    pub constant: Option<f64>,
}

pub fn is_transitive_exact(s: &SftSystem) -> bool {
    GraphAnalysis::new(s).components.len() == 1
}

pub fn has_dense_periodic_points_exact(s: &SftSystem) -> bool {
    let g = GraphAnalysis::new(s);
    let none = g.cross_edges(s).next().is_none();
    none
}

pub fn is_minimal_exact(s: &SftSystem) -> bool {
    let g = GraphAnalysis::new(s);
    g.components.len() == 1 && g.vertices.iter().all(|&v| s.out_degree(v) == 1)
}

pub fn is_infinite_exact(s: &SftSystem) -> bool {
    let g = GraphAnalysis::new(s);
    g.branching.iter().any(|v| g.cycle_vertices.contains(v))
}

pub fn is_sensitive_exact(s: &SftSystem) -> SensitivityResult {
    let g = GraphAnalysis::new(s);
    let sensitive = g.reach_branching.len() == g.vertices.len();
    SensitivityResult { sensitive, constant: sensitive.then_some(1.0) }
}

/// Coincides with sensitivity on this class: a vertex outside the reach
/// set has a unique forward walk that never enters it.
pub fn is_eventually_sensitive_exact(s: &SftSystem) -> bool {
    is_sensitive_exact(s).sensitive
}

pub fn is_ueq_exact(s: &SftSystem) -> bool {
    !is_infinite_exact(s)
}

/// All purely periodic points of primitive period at most `period_bound`,
/// one per orbit (its least rotation).
pub fn periodic_points_up_to(s: &SftSystem, period_bound: usize) -> Result<BTreeSet<EventuallyPeriodicPoint>> {
    if period_bound == 0 {
        return Err(Error::InvalidParameter("period bound must be at least 1".into()));
    }
    let mut out = BTreeSet::new();
    for len in 1..=period_bound {
        out.extend(periodic_orbits_of_length(s, len));
    }
    Ok(out)
}

/// Up to `want` periodic orbit representatives, shortest periods first.
pub fn first_periodic_orbits(s: &SftSystem, period_bound: usize, want: usize) -> Vec<EventuallyPeriodicPoint> {
    let mut out = Vec::new();
    for len in 1..=period_bound {
        for p in periodic_orbits_of_length(s, len) {
            out.push(p);
            if out.len() == want {
                return out;
            }
        }
    }
    out
}

/// Least rotations of primitive closed walks of exactly `len` vertices.
fn periodic_orbits_of_length(s: &SftSystem, len: usize) -> Vec<EventuallyPeriodicPoint> {
    let mut out = Vec::new();
    let mut word = Vec::with_capacity(len);
    for start in s.trimmed_vertices() {
        word.clear();
        word.push(start);
        extend_closed(s, len, &mut word, &mut out);
    }
    out
}

fn extend_closed(s: &SftSystem, len: usize, word: &mut Vec<usize>, out: &mut Vec<EventuallyPeriodicPoint>) {
    let start = word[0];
    let last = *word.last().unwrap();
    if word.len() == len {
        if s.has_edge(last, start) && is_least_primitive_rotation(word) {
            out.push(EventuallyPeriodicPoint::periodic(word.clone()).expect("nonempty"));
        }
        return;
    }
    // The least rotation starts with its smallest letter.
    for &b in s.successors(last) {
        if b >= start {
            word.push(b);
            extend_closed(s, len, word, out);
            word.pop();
        }
    }
}

fn is_least_primitive_rotation(w: &[usize]) -> bool {
    let n = w.len();
    (1..n).all(|r| {
        let rotated = w[r..].iter().chain(&w[..r]);
        w.iter().cmp(rotated) == std::cmp::Ordering::Less
    })
}
