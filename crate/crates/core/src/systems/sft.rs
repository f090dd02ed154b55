use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ExactDistance;
use crate::error::{Error, Result};
use crate::monoid::{FiniteSubset, MonoidElement, ResidueClassSet};

/// One-sided vertex shift on the infinite walks of a finite digraph.
///
/// Vertices without outgoing edges are deleted iteratively at construction;
/// every operation works on the trimmed graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SftSystem {
    vertices: usize,
    edges: BTreeSet<(usize, usize)>,
    alive: Vec<bool>,
    succ: Vec<Vec<usize>>,
}

impl SftSystem {
    pub fn new(vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let edges: BTreeSet<(usize, usize)> = edges.into_iter().collect();
        if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| a >= vertices || b >= vertices) {
            return Err(Error::spec("edges", format!("edge ({a},{b}) uses a vertex outside 0..{vertices}")));
        }
        let alive = trim(vertices, &edges);
        if !alive.iter().any(|&a| a) {
            return Err(Error::EmptyShift);
        }
        let mut succ = vec![Vec::new(); vertices];
        for &(a, b) in &edges {
            if alive[a] && alive[b] {
                succ[a].push(b);
            }
        }
        Ok(SftSystem { vertices, edges, alive, succ })
    }

    /// The full shift on `m` symbols.
    pub fn full_shift(m: usize) -> Result<Self> {
        Self::new(m, (0..m).flat_map(|a| (0..m).map(move |b| (a, b))))
    }

    /// A single simple cycle `0 → 1 → … → n−1 → 0`.
    pub fn cycle(n: usize) -> Result<Self> {
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    /// Alphabet size before trimming.
    pub fn alphabet_size(&self) -> usize {
        self.vertices
    }

    /// Edges as given, before trimming.
    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn is_alive(&self, v: usize) -> bool {
        v < self.vertices && self.alive[v]
    }

    pub fn trimmed_vertices(&self) -> Vec<usize> {
        (0..self.vertices).filter(|&v| self.alive[v]).collect()
    }

    pub fn trimmed_vertex_count(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    pub fn trimmed_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ.iter().enumerate().flat_map(|(a, s)| s.iter().map(move |&b| (a, b)))
    }

    /// Out-neighbours in the trimmed graph, ascending.
    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.vertices && self.succ[a].binary_search(&b).is_ok()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.succ[v].len()
    }

    pub fn is_branching(&self, v: usize) -> bool {
        self.out_degree(v) >= 2
    }

    pub fn validate(&self, x: &EventuallyPeriodicPoint) -> Result<()> {
        let word: Vec<usize> = x.prefix.iter().chain(&x.cycle).copied().collect();
        if let Some(&v) = word.iter().find(|&&v| !self.is_alive(v)) {
            return Err(Error::InadmissiblePoint(format!("vertex {v} is not in the trimmed graph")));
        }
        let closing = (*x.cycle.last().unwrap(), x.cycle[0]);
        for (a, b) in word.windows(2).map(|w| (w[0], w[1])).chain(std::iter::once(closing)) {
            if !self.has_edge(a, b) {
                return Err(Error::InadmissiblePoint(format!("{a}→{b} is not an edge")));
            }
        }
        Ok(())
    }

    pub fn point(&self, prefix: Vec<usize>, cycle: Vec<usize>) -> Result<EventuallyPeriodicPoint> {
        let x = EventuallyPeriodicPoint::new(prefix, cycle)?;
        self.validate(&x)?;
        Ok(x)
    }

    pub fn act(&self, t: &MonoidElement, x: &EventuallyPeriodicPoint) -> Result<EventuallyPeriodicPoint> {
        if t.rank() != 1 {
            return Err(Error::RankMismatch { expected: 1, got: t.rank() });
        }
        self.validate(x)?;
        Ok(x.shift(t.coords()[0]))
    }

    pub fn exact_distance(&self, x: &EventuallyPeriodicPoint, y: &EventuallyPeriodicPoint) -> ExactDistance {
        match x.first_difference(y) {
            None => ExactDistance::Zero,
            Some(i) => ExactDistance::Dyadic(i as u32),
        }
    }

    pub fn distance(&self, x: &EventuallyPeriodicPoint, y: &EventuallyPeriodicPoint) -> f64 {
        self.exact_distance(x, y).to_f64()
    }

    /// `Fix(x)` under the shift: `|w|·ℕ₀` for purely periodic points, empty otherwise.
    pub fn fixer(&self, x: &EventuallyPeriodicPoint) -> Result<ResidueClassSet> {
        self.validate(x)?;
        if x.is_periodic() {
            ResidueClassSet::new(0.into(), (x.cycle.len() as u64).into(), [0.into()], FiniteSubset::new())
        } else {
            ResidueClassSet::finite(1, &FiniteSubset::new())
        }
    }

    /// The orbit of a purely periodic point: all rotations of its cycle.
    pub fn periodic_orbit(&self, x: &EventuallyPeriodicPoint) -> Result<BTreeSet<EventuallyPeriodicPoint>> {
        self.validate(x)?;
        if !x.is_periodic() {
            return Err(Error::NotPeriodic);
        }
        Ok((0..x.cycle.len() as u64).map(|t| x.shift(t)).collect())
    }

    /// `{k·x : k ∈ compact}`.
    pub fn orbit_under<'a>(
        &self,
        x: &EventuallyPeriodicPoint,
        compact: impl IntoIterator<Item = &'a MonoidElement>,
    ) -> Result<BTreeSet<EventuallyPeriodicPoint>> {
        compact.into_iter().map(|k| self.act(k, x)).collect()
    }

    /// Forward orbit of any point, provided it has at most `cap` points.
    pub fn bounded_orbit(&self, x: &EventuallyPeriodicPoint, cap: usize) -> Result<Option<BTreeSet<EventuallyPeriodicPoint>>> {
        self.validate(x)?;
        let size = x.prefix.len() + x.cycle.len();
        if size > cap {
            return Ok(None);
        }
        Ok(Some((0..size as u64).map(|t| x.shift(t)).collect()))
    }

    /// A random walk `a₀ a₁ …` from `start`, stopped once it revisits a vertex
    /// after `min_prefix` steps; the loop becomes the cycle.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R, start: usize, min_prefix: usize) -> EventuallyPeriodicPoint {
        let mut walk = vec![start];
        let mut pos = vec![usize::MAX; self.vertices];
        loop {
            let cur = *walk.last().unwrap();
            let i = walk.len() - 1;
            if i >= min_prefix {
                if pos[cur] != usize::MAX {
                    let j = pos[cur];
                    let cycle = walk[j..i].to_vec();
                    walk.truncate(j);
                    return EventuallyPeriodicPoint::new(walk, cycle).expect("nonempty cycle");
                }
                pos[cur] = i;
            }
            let s = &self.succ[cur];
            walk.push(s[rng.gen_range(0..s.len())]);
        }
    }

    /// Some point whose walk starts with `word` (which must be admissible).
    pub fn extend_word<R: Rng + ?Sized>(&self, rng: &mut R, word: &[usize]) -> Result<EventuallyPeriodicPoint> {
        if word.is_empty() {
            return Err(Error::InadmissiblePoint("empty word".into()));
        }
        for w in word.windows(2) {
            if !self.has_edge(w[0], w[1]) {
                return Err(Error::InadmissiblePoint(format!("{}→{} is not an edge", w[0], w[1])));
            }
        }
        if !self.is_alive(word[0]) {
            return Err(Error::InadmissiblePoint(format!("vertex {} is not in the trimmed graph", word[0])));
        }
        let last = *word.last().unwrap();
        let tail = self.random_point(rng, last, 0);
        let mut prefix = word[..word.len() - 1].to_vec();
        prefix.extend(tail.prefix);
        EventuallyPeriodicPoint::new(prefix, tail.cycle)
    }
}

fn trim(vertices: usize, edges: &BTreeSet<(usize, usize)>) -> Vec<bool> {
    let mut alive = vec![true; vertices];
    loop {
        let mut changed = false;
        for v in 0..vertices {
            if alive[v] && !edges.iter().any(|&(a, b)| a == v && alive[b]) {
                alive[v] = false;
                changed = true;
            }
        }
        if !changed {
            return alive;
        }
    }
}

/// The walk `u · w^∞`, kept in canonical form: `w` primitive and `u` as short as possible.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EventuallyPeriodicPoint {
    prefix: Vec<usize>,
    cycle: Vec<usize>,
}

impl EventuallyPeriodicPoint {
    pub fn new(prefix: Vec<usize>, cycle: Vec<usize>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InadmissiblePoint("cycle word must be nonempty".into()));
        }
        let mut p = EventuallyPeriodicPoint { prefix, cycle };
        p.canonicalize();
        Ok(p)
    }

    /// The purely periodic point `w^∞`.
    pub fn periodic(cycle: Vec<usize>) -> Result<Self> {
        Self::new(Vec::new(), cycle)
    }

    pub fn prefix(&self) -> &[usize] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[usize] {
        &self.cycle
    }

    pub fn is_periodic(&self) -> bool {
        self.prefix.is_empty()
    }

    pub fn period(&self) -> usize {
        self.cycle.len()
    }

    fn canonicalize(&mut self) {
        let n = self.cycle.len();
        if let Some(d) = (1..n).find(|&d| n % d == 0 && (d..n).all(|i| self.cycle[i] == self.cycle[i - d])) {
            self.cycle.truncate(d);
        }
        while let Some(&last) = self.prefix.last() {
            if last != *self.cycle.last().unwrap() {
                break;
            }
            self.prefix.pop();
            self.cycle.rotate_right(1);
        }
    }

    /// Letter at index `i`.
    pub fn at(&self, i: usize) -> usize {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// Letters `[0, len)`.
    pub fn word(&self, len: usize) -> Vec<usize> {
        (0..len).map(|i| self.at(i)).collect()
    }

    pub fn shift(&self, t: u64) -> Self {
        let drop = (t as usize).min(self.prefix.len());
        let rest = t - drop as u64;
        let mut cycle = self.cycle.clone();
        if drop == self.prefix.len() {
            let r = (rest % cycle.len() as u64) as usize;
            cycle.rotate_left(r);
        }
        let mut p = EventuallyPeriodicPoint { prefix: self.prefix[drop..].to_vec(), cycle };
        p.canonicalize();
        p
    }

    /// Length past which two points that still agree are equal.
    pub fn comparison_bound(&self, other: &Self) -> usize {
        self.prefix.len() + other.prefix.len() + self.cycle.len().lcm(&other.cycle.len())
    }

    /// First index where the two walks differ.
    pub fn first_difference(&self, other: &Self) -> Option<usize> {
        if self == other {
            return None;
        }
        (0..self.comparison_bound(other)).find(|&i| self.at(i) != other.at(i))
    }
}

impl fmt::Debug for EventuallyPeriodicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |w: &[usize]| w.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(".");
        if self.prefix.is_empty() {
            write!(f, "({})^∞", join(&self.cycle))
        } else {
            write!(f, "{}·({})^∞", join(&self.prefix), join(&self.cycle))
        }
    }
}
