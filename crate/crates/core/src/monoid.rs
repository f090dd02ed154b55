//! Arithmetic on the acting monoid `ℕ₀ᵏ`.
//!
//! The monoid carries the discrete topology, so compact subsets are exactly
//! the finite ones. Subsets that arise as fixers of points in finite systems
//! are eventually periodic along every axis; [`ResidueClassSet`] represents
//! that class exactly and makes syndeticity decidable.

use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of `ℕ₀ᵏ`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MonoidElement(Vec<u64>);

impl MonoidElement {
    pub fn new(coords: Vec<u64>) -> Self {
        assert!(!coords.is_empty(), "monoid rank must be at least 1");
        MonoidElement(coords)
    }

    pub fn zero(rank: usize) -> Self {
        Self::new(vec![0; rank])
    }

    /// Rank-1 element `n`.
    pub fn scalar(n: u64) -> Self {
        MonoidElement(vec![n])
    }

    /// The `i`-th unit vector.
    pub fn unit(rank: usize, i: usize) -> Self {
        let mut c = vec![0; rank];
        c[i] = 1;
        MonoidElement(c)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Sum of coordinates.
    pub fn weight(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &MonoidElement) -> MonoidElement {
        debug_assert_eq!(self.rank(), other.rank());
        MonoidElement(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise `self − other`, or `None` if some coordinate would go negative.
    pub fn checked_sub(&self, other: &MonoidElement) -> Option<MonoidElement> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MonoidElement)
    }

    /// Componentwise order.
    pub fn dominated_by(&self, other: &MonoidElement) -> bool {
        self.rank() == other.rank() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn partial_cmp_componentwise(&self, other: &MonoidElement) -> Option<Ordering> {
        match (self.dominated_by(other), other.dominated_by(self)) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        }
    }

    pub fn join(&self, other: &MonoidElement) -> MonoidElement {
        MonoidElement(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }
}

impl fmt::Debug for MonoidElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<u64> for MonoidElement {
    fn from(n: u64) -> Self {
        MonoidElement::scalar(n)
    }
}

impl<const K: usize> From<[u64; K]> for MonoidElement {
    fn from(c: [u64; K]) -> Self {
        MonoidElement::new(c.to_vec())
    }
}

/// All `u` with `0 ≤ u ≤ upper` componentwise, in lexicographic order.
pub fn box_elements(upper: &MonoidElement) -> impl Iterator<Item = MonoidElement> + '_ {
    let rank = upper.rank();
    let mut cur = Some(vec![0u64; rank]);
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let mut next = out.clone();
        let mut i = rank;
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            if next[i] < upper.0[i] {
                next[i] += 1;
                cur = Some(next);
                break;
            }
            next[i] = 0;
        }
        Some(MonoidElement(out))
    })
}

/// A finite (hence compact) subset of `ℕ₀ᵏ`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiniteSubset(BTreeSet<MonoidElement>);

impl FiniteSubset {
    pub fn new() -> Self {
        FiniteSubset(BTreeSet::new())
    }

    /// The box `{u : 0 ≤ u ≤ upper}`.
    pub fn full_box(upper: &MonoidElement) -> Self {
        box_elements(upper).collect()
    }

    /// `{0, 1, …, m}` in rank 1.
    pub fn range(m: u64) -> Self {
        (0..=m).map(MonoidElement::scalar).collect()
    }

    pub fn insert(&mut self, e: MonoidElement) -> bool {
        self.0.insert(e)
    }

    pub fn contains(&self, e: &MonoidElement) -> bool {
        self.0.contains(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &MonoidElement> {
        self.0.iter()
    }

    /// The rank shared by all members, if nonempty.
    pub fn rank(&self) -> Option<usize> {
        self.0.iter().next().map(MonoidElement::rank)
    }

    /// Componentwise maximum over all members.
    pub fn upper_bound(&self) -> Option<MonoidElement> {
        let mut it = self.0.iter();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, e| acc.join(e)))
    }
}

impl FromIterator<MonoidElement> for FiniteSubset {
    fn from_iter<I: IntoIterator<Item = MonoidElement>>(iter: I) -> Self {
        FiniteSubset(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a FiniteSubset {
    type Item = &'a MonoidElement;
    type IntoIter = std::collections::btree_set::Iter<'a, MonoidElement>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A subset of `ℕ₀ᵏ` that is eventually periodic along every axis.
///
/// Along axis `i`, a coordinate below `preperiod[i]` is read literally and a
/// coordinate at or above it is read modulo `period[i]`. Membership of `t`
/// depends only on the reduced cell of `t` in the box `[0, p + q)`, and the
/// set stores the member cells. Cells `r ≥ p` are the residues; the remaining
/// cells are the exceptional part. In rank 1 each exceptional cell is a
/// single point. In higher rank an exceptional cell may stretch to infinity
/// along the axes where it lies at or above the preperiod.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResidueClassSet {
    preperiod: MonoidElement,
    period: MonoidElement,
    cells: BTreeSet<MonoidElement>,
}

impl ResidueClassSet {
    /// `exceptional ∪ { t ≥ p : (t − p) mod q ∈ residues }`.
    ///
    /// `exceptional` holds literal points, none of them `≥ p`.
    pub fn new(
        preperiod: MonoidElement,
        period: MonoidElement,
        residues: impl IntoIterator<Item = MonoidElement>,
        exceptional: FiniteSubset,
    ) -> Result<Self> {
        let k = preperiod.rank();
        if period.rank() != k {
            return Err(Error::RankMismatch { expected: k, got: period.rank() });
        }
        if period.coords().iter().any(|&q| q == 0) {
            return Err(Error::InvalidSet("period coordinates must be at least 1".into()));
        }
        let residues: BTreeSet<MonoidElement> = residues.into_iter().collect();
        for r in &residues {
            if r.rank() != k {
                return Err(Error::RankMismatch { expected: k, got: r.rank() });
            }
            if r.coords().iter().zip(period.coords()).any(|(a, b)| a >= b) {
                return Err(Error::InvalidSet(format!("residue {r:?} not below period {period:?}")));
            }
        }
        for e in &exceptional {
            if e.rank() != k {
                return Err(Error::RankMismatch { expected: k, got: e.rank() });
            }
            if preperiod.dominated_by(e) {
                return Err(Error::InvalidSet(format!(
                    "exceptional member {e:?} is above the preperiod {preperiod:?}"
                )));
            }
        }
        // Push the preperiod past every exceptional point so each of them is a literal cell.
        let widened = exceptional
            .iter()
            .fold(preperiod.clone(), |acc, e| {
                acc.join(&MonoidElement(e.coords().iter().map(|c| c + 1).collect()))
            });
        let member = |t: &MonoidElement| {
            exceptional.contains(t)
                || t.checked_sub(&preperiod).is_some_and(|d| {
                    let r = MonoidElement(
                        d.coords().iter().zip(period.coords()).map(|(a, q)| a % q).collect(),
                    );
                    residues.contains(&r)
                })
        };
        let upper = cell_upper(&widened, &period);
        let cells = box_elements(&upper).filter(|t| member(t)).collect();
        Ok(ResidueClassSet { preperiod: widened, period, cells })
    }

    /// Builds the set from its member cells in `[0, p + q)` directly.
    pub fn from_cells(
        preperiod: MonoidElement,
        period: MonoidElement,
        cells: impl IntoIterator<Item = MonoidElement>,
    ) -> Result<Self> {
        let k = preperiod.rank();
        if period.rank() != k {
            return Err(Error::RankMismatch { expected: k, got: period.rank() });
        }
        if period.coords().iter().any(|&q| q == 0) {
            return Err(Error::InvalidSet("period coordinates must be at least 1".into()));
        }
        let upper = cell_upper(&preperiod, &period);
        let cells: BTreeSet<MonoidElement> = cells.into_iter().collect();
        if let Some(c) = cells.iter().find(|c| c.rank() != k || !c.dominated_by(&upper)) {
            return Err(Error::InvalidSet(format!("cell {c:?} outside the box [0, p+q)")));
        }
        Ok(ResidueClassSet { preperiod, period, cells })
    }

    /// A finite set as a residue-class set with no residues.
    pub fn finite(rank: usize, members: &FiniteSubset) -> Result<Self> {
        let p = members
            .upper_bound()
            .map(|u| MonoidElement(u.coords().iter().map(|c| c + 1).collect()))
            .unwrap_or_else(|| MonoidElement::zero(rank));
        Self::new(p, MonoidElement::new(vec![1; rank]), [], members.clone())
    }

    pub fn rank(&self) -> usize {
        self.preperiod.rank()
    }

    pub fn preperiod(&self) -> &MonoidElement {
        &self.preperiod
    }

    pub fn period(&self) -> &MonoidElement {
        &self.period
    }

    /// Residues `r < q` such that every `t ≥ p` with `(t − p) mod q = r` is a member.
    pub fn residues(&self) -> FiniteSubset {
        self.cells.iter().filter_map(|c| c.checked_sub(&self.preperiod)).collect()
    }

    /// Member cells that are not `≥ p`.
    pub fn exceptional(&self) -> FiniteSubset {
        self.cells.iter().filter(|c| !self.preperiod.dominated_by(c)).cloned().collect()
    }

    /// Reduces `t` to its cell in `[0, p + q)`.
    pub fn reduce(&self, t: &MonoidElement) -> MonoidElement {
        reduce_cell(t, &self.preperiod, &self.period)
    }

    pub fn contains(&self, t: &MonoidElement) -> bool {
        t.rank() == self.rank() && self.cells.contains(&self.reduce(t))
    }

    /// Members inside the box `[0, upper]`.
    pub fn intersect_box(&self, upper: &MonoidElement) -> FiniteSubset {
        box_elements(upper).filter(|t| self.contains(t)).collect()
    }

    /// Rewrites the set over a coarser grid `(p', q')` with `p' ≥ p` and `q | q'`.
    fn regrid(&self, preperiod: &MonoidElement, period: &MonoidElement) -> BTreeSet<MonoidElement> {
        box_elements(&cell_upper(preperiod, period)).filter(|t| self.contains(t)).collect()
    }
}

impl PartialEq for ResidueClassSet {
    /// Set equality, independent of the chosen preperiod and period.
    fn eq(&self, other: &Self) -> bool {
        if self.rank() != other.rank() {
            return false;
        }
        let p = self.preperiod.join(&other.preperiod);
        let q = MonoidElement(
            self.period.coords().iter().zip(other.period.coords()).map(|(a, b)| a.lcm(b)).collect(),
        );
        self.regrid(&p, &q) == other.regrid(&p, &q)
    }
}

impl Eq for ResidueClassSet {}

fn cell_upper(p: &MonoidElement, q: &MonoidElement) -> MonoidElement {
    MonoidElement(p.coords().iter().zip(q.coords()).map(|(a, b)| a + b - 1).collect())
}

pub(crate) fn reduce_cell(t: &MonoidElement, p: &MonoidElement, q: &MonoidElement) -> MonoidElement {
    MonoidElement(
        t.coords()
            .iter()
            .zip(p.coords().iter().zip(q.coords()))
            .map(|(&ti, (&pi, &qi))| if ti < pi { ti } else { pi + (ti - pi) % qi })
            .collect(),
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyndeticVerdict {
    pub syndetic: bool,
    /// A corresponding compact when `syndetic`.
    pub compact: Option<FiniteSubset>,
}

/// Decides syndeticity exactly.
///
/// A nonempty residue class meets every translate of the box `[0, p + q]`.
/// Without residues the set sits in finitely many cells below the
/// preperiod along some axis, and translates far out along every axis miss it.
pub fn is_syndetic(set: &ResidueClassSet) -> SyndeticVerdict {
    let syndetic = set.cells.iter().any(|c| set.preperiod.dominated_by(c));
    let compact = syndetic.then(|| FiniteSubset::full_box(&set.preperiod.add(&set.period)));
    SyndeticVerdict { syndetic, compact }
}

/// Checks `(t + K) ∩ A ≠ ∅` for every `t` in the box `[0, window]`.
pub fn certify_syndetic_window(set: &ResidueClassSet, compact: &FiniteSubset, window: &MonoidElement) -> bool {
    if window.rank() != set.rank() || compact.iter().any(|k| k.rank() != set.rank()) {
        return false;
    }
    box_elements(window).all(|t| compact.iter().any(|k| set.contains(&t.add(k))))
}

/// Whether `t` is a sum of at most `bound` generators, repetition allowed.
pub fn submonoid_closure_contains(generators: &FiniteSubset, t: &MonoidElement, bound: usize) -> bool {
    if t.is_zero() {
        return true;
    }
    let gens: Vec<&MonoidElement> = generators
        .iter()
        .filter(|g| g.rank() == t.rank() && !g.is_zero() && g.dominated_by(t))
        .collect();
    let mut seen: BTreeSet<MonoidElement> = BTreeSet::new();
    let mut queue = VecDeque::from([(MonoidElement::zero(t.rank()), 0usize)]);
    seen.insert(MonoidElement::zero(t.rank()));
    while let Some((cur, depth)) = queue.pop_front() {
        if depth == bound {
            continue;
        }
        for g in &gens {
            let next = cur.add(g);
            if &next == t {
                return true;
            }
            if next.dominated_by(t) && seen.insert(next.clone()) {
                queue.push_back((next, depth + 1));
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn evens() -> ResidueClassSet {
        ResidueClassSet::new(0.into(), 2.into(), [0.into()], FiniteSubset::new()).unwrap()
    }

    fn quadrant_plus_origin() -> ResidueClassSet {
        ResidueClassSet::new(
            [1, 1].into(),
            [1, 1].into(),
            [[0, 0].into()],
            [MonoidElement::from([0, 0])].into_iter().collect(),
        )
        .unwrap()
    }

    #[test]
    fn partial_order_laws() {
        let a = MonoidElement::from([1, 2]);
        let b = MonoidElement::from([2, 2]);
        let c = MonoidElement::from([0, 3]);
        assert!(a.dominated_by(&a));
        assert!(a.dominated_by(&b) && !b.dominated_by(&a));
        assert_eq!(a.partial_cmp_componentwise(&c), None);
        assert_eq!(a.add(&MonoidElement::zero(2)), a);
    }

    #[test]
    fn box_enumeration_counts() {
        assert_eq!(box_elements(&[2, 3].into()).count(), 12);
        assert_eq!(box_elements(&0.into()).count(), 1);
    }

    #[test]
    fn evens_are_syndetic_with_small_box() {
        let v = is_syndetic(&evens());
        assert!(v.syndetic);
        let k = v.compact.unwrap();
        assert_eq!(k, FiniteSubset::range(2));
        assert!(certify_syndetic_window(&evens(), &k, &100.into()));
    }

    #[test]
    fn finite_set_is_not_syndetic() {
        let a = ResidueClassSet::finite(1, &[0, 3, 7].into_iter().map(MonoidElement::scalar).collect()).unwrap();
        assert!(a.contains(&7.into()) && !a.contains(&8.into()) && !a.contains(&4.into()));
        let v = is_syndetic(&a);
        assert!(!v.syndetic);
        assert!(v.compact.is_none());
    }

    #[test]
    fn quadrant_example() {
        let a = quadrant_plus_origin();
        assert!(a.contains(&[0, 0].into()));
        assert!(!a.contains(&[0, 5].into()));
        assert!(a.contains(&[1, 9].into()));
        assert!(is_syndetic(&a).syndetic);
        let single: FiniteSubset = [MonoidElement::from([1, 1])].into_iter().collect();
        assert!(certify_syndetic_window(&a, &single, &[10, 10].into()));
    }

    #[test]
    fn window_certificate_rejects_bad_compact() {
        let zero: FiniteSubset = [MonoidElement::scalar(0)].into_iter().collect();
        assert!(!certify_syndetic_window(&evens(), &zero, &100.into()));
        assert!(certify_syndetic_window(&evens(), &FiniteSubset::range(1), &100.into()));
    }

    #[test]
    fn closure_examples() {
        let g23: FiniteSubset = [2, 3].into_iter().map(MonoidElement::scalar).collect();
        assert!(submonoid_closure_contains(&g23, &7.into(), 5));
        assert!(!submonoid_closure_contains(&g23, &1.into(), 5));
        let g2: FiniteSubset = [MonoidElement::scalar(2)].into_iter().collect();
        assert!(!submonoid_closure_contains(&g2, &5.into(), 10));
        let g: FiniteSubset = [[1, 1].into(), [1, 2].into()].into_iter().collect();
        assert!(submonoid_closure_contains(&g, &[2, 3].into(), 4));
        assert!(!submonoid_closure_contains(&g, &[2, 3].into(), 1));
    }

    #[test]
    fn rejects_malformed_sets() {
        assert!(ResidueClassSet::new(0.into(), 0.into(), [], FiniteSubset::new()).is_err());
        assert!(ResidueClassSet::new(0.into(), 2.into(), [2.into()], FiniteSubset::new()).is_err());
        let above: FiniteSubset = [MonoidElement::scalar(5)].into_iter().collect();
        assert!(ResidueClassSet::new(3.into(), 1.into(), [], above).is_err());
    }

    #[test]
    fn equality_ignores_representation() {
        let a = evens();
        let b = ResidueClassSet::new(4.into(), 4.into(), [0.into(), 2.into()], {
            [0, 2].into_iter().map(MonoidElement::scalar).collect()
        })
        .unwrap();
        assert_eq!(a, b);
        let c = ResidueClassSet::new(0.into(), 3.into(), [0.into()], FiniteSubset::new()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn infinite_exceptional_cell_in_rank_two() {
        // {0} × ℕ₀: infinite, yet not syndetic in ℕ₀².
        let a = ResidueClassSet::from_cells([1, 0].into(), [1, 1].into(), [[0, 0].into()]).unwrap();
        assert!(a.contains(&[0, 1000].into()));
        assert!(!a.contains(&[1, 0].into()));
        assert!(!is_syndetic(&a).syndetic);
    }

    fn arb_set() -> impl Strategy<Value = ResidueClassSet> {
        (1usize..=2)
            .prop_flat_map(|k| {
                (
                    proptest::collection::vec(0u64..4, k),
                    proptest::collection::vec(1u64..4, k),
                    any::<u64>(),
                )
            })
            .prop_map(|(p, q, bits)| {
                let p = MonoidElement::new(p);
                let q = MonoidElement::new(q);
                let upper = MonoidElement(q.coords().iter().map(|c| c - 1).collect());
                let residues: Vec<MonoidElement> = box_elements(&upper)
                    .enumerate()
                    .filter(|(i, _)| bits >> (i % 32) & 1 == 1)
                    .map(|(_, r)| r)
                    .collect();
                let below: FiniteSubset = box_elements(&p)
                    .enumerate()
                    .filter(|(i, e)| bits >> (32 + i % 32) & 1 == 1 && !p.dominated_by(e))
                    .map(|(_, e)| e)
                    .collect();
                ResidueClassSet::new(p, q, residues, below).unwrap()
            })
    }

    proptest! {
        #[test]
        fn certificate_is_valid(a in arb_set(), w in 0u64..12) {
            let v = is_syndetic(&a);
            if let Some(k) = v.compact {
                let window = MonoidElement::new(vec![w; a.rank()]);
                prop_assert!(certify_syndetic_window(&a, &k, &window));
            }
        }

        #[test]
        fn non_syndetic_sets_have_empty_translates(a in arb_set()) {
            prop_assume!(a.residues().is_empty());
            // Any fixed finite K: the box [0, 2] is tried here.
            let k = FiniteSubset::full_box(&MonoidElement::new(vec![2; a.rank()]));
            let reach = a.preperiod().add(a.period()).coords().iter().copied().max().unwrap();
            let window = MonoidElement::new(vec![2 + reach + 1; a.rank()]);
            let escaped = box_elements(&window).any(|t| k.iter().all(|kk| !a.contains(&t.add(kk))));
            prop_assert!(escaped);
        }

        #[test]
        fn membership_matches_naive_definition(
            p in 0u64..4, q in 1u64..4, res_bits in 0u8..8, exc_bits in 0u8..16,
        ) {
            let residues: Vec<MonoidElement> =
                (0..q).filter(|r| res_bits >> r & 1 == 1).map(MonoidElement::scalar).collect();
            let exceptional: FiniteSubset =
                (0..p).filter(|e| exc_bits >> e & 1 == 1).map(MonoidElement::scalar).collect();
            let a = ResidueClassSet::new(p.into(), q.into(), residues.clone(), exceptional.clone()).unwrap();
            for t in 0..=(p + 3 * q) {
                let naive = exceptional.contains(&t.into())
                    || (t >= p && residues.contains(&MonoidElement::scalar((t - p) % q)));
                prop_assert_eq!(a.contains(&t.into()), naive);
            }
        }
    }
}
