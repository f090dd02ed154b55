use std::collections::{BTreeSet, VecDeque};

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::ExactDistance;
use crate::error::{Error, Result};
use crate::monoid::{box_elements, MonoidElement, ResidueClassSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FiniteMetric {
    /// `d(x, y) = 1` for `x ≠ y`.
    Discrete,
    /// Row-major `n × n` matrix of non-negative rationals.
    Matrix(Vec<Ratio<u64>>),
}

/// `k` pairwise commuting self-maps of `{0, …, n−1}` acting on a finite metric space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSemiflow {
    n: usize,
    metric: FiniteMetric,
    generators: Vec<Vec<usize>>,
}

impl FiniteSemiflow {
    pub fn new(n: usize, metric: FiniteMetric, generators: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("finite phase space must be nonempty".into()));
        }
        if generators.is_empty() {
            return Err(Error::InvalidGenerator("at least one generator is required".into()));
        }
        for (i, g) in generators.iter().enumerate() {
            if g.len() != n {
                return Err(Error::InvalidGenerator(format!("generator {i} has {} entries, expected {n}", g.len())));
            }
            if let Some(&bad) = g.iter().find(|&&v| v >= n) {
                return Err(Error::InvalidGenerator(format!("generator {i} maps to {bad}, outside 0..{n}")));
            }
        }
        if let FiniteMetric::Matrix(m) = &metric {
            check_metric(n, m)?;
        }
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                let (f, g) = (&generators[i], &generators[j]);
                if (0..n).any(|x| f[g[x]] != g[f[x]]) {
                    return Err(Error::NonCommuting(i, j));
                }
            }
        }
        Ok(FiniteSemiflow { n, metric, generators })
    }

    /// A single map with the discrete metric.
    pub fn cascade(map: Vec<usize>) -> Result<Self> {
        Self::new(map.len(), FiniteMetric::Discrete, vec![map])
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn metric(&self) -> &FiniteMetric {
        &self.metric
    }

    pub fn generators(&self) -> &[Vec<usize>] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &[usize] {
        &self.generators[i]
    }

    pub fn step(&self, i: usize, x: usize) -> usize {
        self.generators[i][x]
    }

    /// `f_i^steps(x)`, reduced through the eventual cycle of `x`.
    pub fn iterate(&self, i: usize, x: usize, steps: u64) -> usize {
        let g = &self.generators[i];
        let mut seen = vec![usize::MAX; self.n];
        let mut path = Vec::new();
        let mut cur = x;
        loop {
            if path.len() as u64 == steps {
                return cur;
            }
            if seen[cur] != usize::MAX {
                let start = seen[cur];
                let cycle = path.len() - start;
                let idx = start + ((steps - start as u64) % cycle as u64) as usize;
                return path[idx];
            }
            seen[cur] = path.len();
            path.push(cur);
            cur = g[cur];
        }
    }

    pub fn act(&self, t: &MonoidElement, x: usize) -> Result<usize> {
        if t.rank() != self.rank() {
            return Err(Error::RankMismatch { expected: self.rank(), got: t.rank() });
        }
        if x >= self.n {
            return Err(Error::ForeignPoint);
        }
        Ok(t.coords().iter().enumerate().fold(x, |acc, (i, &s)| self.iterate(i, acc, s)))
    }

    pub fn exact_distance(&self, x: usize, y: usize) -> ExactDistance {
        match &self.metric {
            FiniteMetric::Discrete if x == y => ExactDistance::Zero,
            FiniteMetric::Discrete => ExactDistance::Dyadic(0),
            FiniteMetric::Matrix(m) => ExactDistance::from_ratio(m[x * self.n + y]),
        }
    }

    pub fn distance(&self, x: usize, y: usize) -> f64 {
        self.exact_distance(x, y).to_f64()
    }

    /// Smallest positive distance, or `None` on a one-point space.
    pub fn min_positive_distance(&self) -> Option<ExactDistance> {
        (0..self.n)
            .flat_map(|x| (0..self.n).filter(move |&y| y != x).map(move |y| (x, y)))
            .map(|(x, y)| self.exact_distance(x, y))
            .min()
    }

    /// The forward orbit `Tx`.
    pub fn orbit(&self, x: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([x]);
        let mut queue = VecDeque::from([x]);
        while let Some(y) = queue.pop_front() {
            for g in &self.generators {
                if seen.insert(g[y]) {
                    queue.push_back(g[y]);
                }
            }
        }
        seen
    }

    /// `{k·x : k ∈ compact}`.
    pub fn orbit_under<'a>(&self, x: usize, compact: impl IntoIterator<Item = &'a MonoidElement>) -> Result<BTreeSet<usize>> {
        compact.into_iter().map(|k| self.act(k, x)).collect()
    }

    /// Per generator, the preperiod and period of `f_i` restricted to `subset`
    /// (which must be forward invariant).
    fn grid_on(&self, subset: &BTreeSet<usize>) -> (MonoidElement, MonoidElement) {
        let mut p = Vec::with_capacity(self.rank());
        let mut q = Vec::with_capacity(self.rank());
        for g in &self.generators {
            let (mut pre, mut per) = (0u64, 1u64);
            for &y in subset {
                let (mu, lambda) = tail_and_cycle(g, y, self.n);
                pre = pre.max(mu);
                per = per.lcm(&lambda);
            }
            p.push(pre);
            q.push(per);
        }
        (MonoidElement::new(p), MonoidElement::new(q))
    }

    /// Upper corner of the box `[0, p + q)` on which `t ↦ t·x` is determined for
    /// every `x` in `points`, jointly.
    pub fn time_box(&self, points: &[usize]) -> MonoidElement {
        let orbit: BTreeSet<usize> = points.iter().flat_map(|&x| self.orbit(x)).collect();
        let (p, q) = self.grid_on(&orbit);
        MonoidElement::new(p.coords().iter().zip(q.coords()).map(|(a, b)| a + b - 1).collect())
    }

    /// `Fix(x) = {t : t·x = x}` as an exact residue-class set.
    ///
    /// On the orbit of `x` each generator satisfies `f^(p+q) = f^p`, so `t·x`
    /// only depends on the cell of `t` in `[0, p + q)`.
    pub fn fixer(&self, x: usize) -> Result<ResidueClassSet> {
        if x >= self.n {
            return Err(Error::ForeignPoint);
        }
        let orbit = self.orbit(x);
        let (p, q) = self.grid_on(&orbit);
        let upper = MonoidElement::new(p.coords().iter().zip(q.coords()).map(|(a, b)| a + b - 1).collect());
        let mut cells = Vec::new();
        for t in box_elements(&upper) {
            if self.act(&t, x)? == x {
                cells.push(t);
            }
        }
        ResidueClassSet::from_cells(p, q, cells)
    }

    pub fn is_periodic(&self, x: usize) -> Result<bool> {
        Ok(crate::monoid::is_syndetic(&self.fixer(x)?).syndetic)
    }
}

/// Tail length and cycle length of `x, g(x), g²(x), …`.
pub(crate) fn tail_and_cycle(g: &[usize], x: usize, n: usize) -> (u64, u64) {
    let mut seen = vec![usize::MAX; n];
    let mut cur = x;
    let mut i = 0usize;
    while seen[cur] == usize::MAX {
        seen[cur] = i;
        cur = g[cur];
        i += 1;
    }
    (seen[cur] as u64, (i - seen[cur]) as u64)
}

fn check_metric(n: usize, m: &[Ratio<u64>]) -> Result<()> {
    if m.len() != n * n {
        return Err(Error::MetricAxiom(format!("matrix has {} entries, expected {}", m.len(), n * n)));
    }
    let d = |x: usize, y: usize| m[x * n + y];
    for x in 0..n {
        for y in 0..n {
            let zero = *d(x, y).numer() == 0;
            if zero != (x == y) {
                return Err(Error::MetricAxiom(format!("d({x},{y}) = {} violates identity of indiscernibles", d(x, y))));
            }
            if d(x, y) != d(y, x) {
                return Err(Error::MetricAxiom(format!("d({x},{y}) ≠ d({y},{x})")));
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if d(x, z) > d(x, y) + d(y, z) {
                    return Err(Error::MetricAxiom(format!("triangle inequality fails for ({x},{y},{z})")));
                }
            }
        }
    }
    Ok(())
}
