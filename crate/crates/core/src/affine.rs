//! The affine version `M_H(L)` of a bounded graded lattice `L` of rank `n`,
//! for `H = (1/k)Z`.
//!
//! A point is a weakly increasing vector `u = (u_1, ..., u_n)` in `H^n` together
//! with the chain elements `c_r` of rank `r` at the jump positions `u_r < u_{r+1}`.
//! Coordinates are stored as integers counting multiples of `1/k`.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::sync::OnceLock;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::helly::Graph;
use crate::poset::{Elem, FinitePoset, PosetError};

pub type Rational = Ratio<i64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AffineError {
    #[error("base poset must be a bounded graded lattice of rank >= 1: {0}")]
    BadBase(String),
    #[error("coordinates must be weakly increasing")]
    NonMonotone,
    #[error("coordinate {0} is not a multiple of 1/{1}")]
    NotInGroup(Rational, i64),
    #[error("expected {expected} coordinates, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("not a maximal chain: {0}")]
    NotMaximalChain(String),
    #[error("chain entries do not match the jumps of u: {0}")]
    BadJumps(String),
    #[error("step is not admissible: {0}")]
    NotAdmissible(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("enumeration exceeded the cap of {0} points")]
    CapExceeded(usize),
    #[error("malformed point: {0}")]
    Malformed(String),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// A point of `M_H(L)` in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MPoint {
    /// `u[r - 1] = u_r`, in units of `1/k`.
    u: Vec<i64>,
    /// `chain[r]` for `0 <= r <= n`: always set at `0` and `n`, otherwise exactly at jumps.
    chain: Vec<Option<Elem>>,
}

impl MPoint {
    /// Coordinates in units of the group generator.
    pub fn units(&self) -> &[i64] {
        &self.u
    }

    /// `u_r` for `1 <= r <= n`.
    pub fn coord(&self, r: usize) -> i64 {
        self.u[r - 1]
    }

    /// Whether `u_r < u_{r+1}`, for `1 <= r < n`.
    pub fn is_jump(&self, r: usize) -> bool {
        self.u[r - 1] < self.u[r]
    }

    /// Chain element of rank `r` if the representative pins it down.
    pub fn entry(&self, r: usize) -> Option<Elem> {
        self.chain[r]
    }

    /// Jump positions with their chain elements.
    pub fn jumps(&self) -> impl Iterator<Item = (usize, Elem)> + '_ {
        (1..self.u.len()).filter_map(move |r| self.chain[r].map(|e| (r, e)))
    }
}

/// Raise `u_i = ... = u_j` by one unit, re-anchoring rank `i - 1` at `element`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ElementaryStep {
    pub start: usize,
    pub end: usize,
    pub element: Elem,
}

/// Which procedure decides the order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderMode {
    /// The chain-entry comparison on jump positions.
    Criterion,
    /// Reachability through elementary steps generated from all representing chains.
    Oracle,
}

/// `M_H(L)` for a fixed base lattice and group `H = (1/denominator) Z`.
#[derive(Debug)]
pub struct AffineLattice {
    base: FinitePoset,
    n: usize,
    ranks: Vec<usize>,
    by_rank: Vec<Vec<Elem>>,
    zero: Elem,
    one: Elem,
    denominator: i64,
    maximal_chains: OnceLock<Vec<Vec<Elem>>>,
    dual: OnceLock<Box<AffineLattice>>,
}

impl AffineLattice {
    pub fn new(base: FinitePoset, denominator: i64) -> Result<Self, AffineError> {
        if denominator < 1 {
            return Err(AffineError::Precondition("denominator must be positive".into()));
        }
        let profile = base.analyze();
        let rank = profile.rank.ok_or_else(|| AffineError::BadBase("not bounded and graded".into()))?;
        if !profile.lattice {
            return Err(AffineError::BadBase("not a lattice".into()));
        }
        if rank == 0 {
            return Err(AffineError::BadBase("rank 0".into()));
        }
        let ranks = base.ranks().expect("graded with minimum");
        let mut by_rank = vec![Vec::new(); rank + 1];
        for x in base.elements() {
            by_rank[ranks[x]].push(x);
        }
        let zero = base.minimum().expect("bounded");
        let one = base.maximum().expect("bounded");
        Ok(AffineLattice {
            base,
            n: rank,
            ranks,
            by_rank,
            zero,
            one,
            denominator,
            maximal_chains: OnceLock::new(),
            dual: OnceLock::new(),
        })
    }

    pub fn base(&self) -> &FinitePoset {
        &self.base
    }

    /// Rank `n` of the base lattice, which is the dimension of `M`.
    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn denominator(&self) -> i64 {
        self.denominator
    }

    pub fn element_rank(&self, x: Elem) -> usize {
        self.ranks[x]
    }

    fn entry_or_bound(&self, p: &MPoint, r: usize) -> Option<Elem> {
        if r == 0 {
            Some(self.zero)
        } else if r == self.n {
            Some(self.one)
        } else {
            p.chain[r]
        }
    }

    /// `value * k` as an integer count of units.
    pub fn to_units(&self, value: Rational) -> Result<i64, AffineError> {
        let scaled = value * self.denominator;
        if scaled.is_integer() {
            Ok(scaled.to_integer())
        } else {
            Err(AffineError::NotInGroup(value, self.denominator))
        }
    }

    pub fn to_rational(&self, units: i64) -> Rational {
        Rational::new(units, self.denominator)
    }

    fn check_monotone(&self, u: &[i64]) -> Result<(), AffineError> {
        if u.len() != self.n {
            return Err(AffineError::WrongLength { expected: self.n, got: u.len() });
        }
        if u.windows(2).any(|w| w[0] > w[1]) {
            return Err(AffineError::NonMonotone);
        }
        Ok(())
    }

    /// Canonical point from a full maximal chain `c_0 < ... < c_n` and coordinates in units.
    pub fn make_point(&self, chain: &[Elem], u: &[i64]) -> Result<MPoint, AffineError> {
        self.check_monotone(u)?;
        if chain.len() != self.n + 1 {
            return Err(AffineError::NotMaximalChain(format!(
                "expected {} elements, got {}",
                self.n + 1,
                chain.len()
            )));
        }
        for (r, &c) in chain.iter().enumerate() {
            if c >= self.base.len() || self.ranks[c] != r {
                return Err(AffineError::NotMaximalChain(format!("entry {r} has the wrong rank")));
            }
            if r > 0 && !self.base.leq(chain[r - 1], c) {
                return Err(AffineError::NotMaximalChain(format!("entries {} and {r} are not nested", r - 1)));
            }
        }
        Ok(self.canonical(u.to_vec(), |r| chain[r]))
    }

    /// Canonical point from rational coordinates and a full maximal chain.
    pub fn make_point_rational(&self, chain: &[Elem], u: &[Rational]) -> Result<MPoint, AffineError> {
        let units = u.iter().map(|&x| self.to_units(x)).collect::<Result<Vec<_>, _>>()?;
        self.make_point(chain, &units)
    }

    /// Point from coordinates and the chain elements at exactly the jump positions.
    pub fn point_from_jumps(&self, u: &[i64], jumps: &BTreeMap<usize, Elem>) -> Result<MPoint, AffineError> {
        self.check_monotone(u)?;
        let mut chain = vec![None; self.n + 1];
        chain[0] = Some(self.zero);
        chain[self.n] = Some(self.one);
        for r in 1..self.n {
            let jump = u[r - 1] < u[r];
            match (jump, jumps.get(&r)) {
                (true, Some(&e)) => {
                    if e >= self.base.len() || self.ranks[e] != r {
                        return Err(AffineError::BadJumps(format!("entry at {r} must have rank {r}")));
                    }
                    chain[r] = Some(e);
                }
                (true, None) => return Err(AffineError::BadJumps(format!("missing entry at jump {r}"))),
                (false, Some(_)) => {
                    return Err(AffineError::BadJumps(format!("entry given at non-jump {r}")))
                }
                (false, None) => {}
            }
        }
        if let Some(&r) = jumps.keys().find(|&&r| r == 0 || r >= self.n) {
            return Err(AffineError::BadJumps(format!("position {r} is out of range")));
        }
        let pinned: Vec<Elem> = chain.iter().flatten().copied().collect();
        if pinned.windows(2).any(|w| !self.base.leq(w[0], w[1])) {
            return Err(AffineError::BadJumps("entries do not form a chain".into()));
        }
        Ok(MPoint { u: u.to_vec(), chain })
    }

    fn canonical(&self, u: Vec<i64>, entry: impl Fn(usize) -> Elem) -> MPoint {
        let n = self.n;
        let chain = (0..=n)
            .map(|r| {
                if r == 0 || r == n || u[r - 1] < u[r] {
                    Some(entry(r))
                } else {
                    None
                }
            })
            .collect();
        MPoint { u, chain }
    }

    /// The point with all coordinates equal to `value` units.
    pub fn constant(&self, value: i64) -> MPoint {
        self.canonical(vec![value; self.n], |r| if r == 0 { self.zero } else { self.one })
    }

    pub fn origin(&self) -> MPoint {
        self.constant(0)
    }

    /// Maximal chains of the base lattice, from bottom to top.
    pub fn base_chains(&self) -> &[Vec<Elem>] {
        self.maximal_chains
            .get_or_init(|| self.base.maximal_chains(usize::MAX).expect("no cap"))
    }

    /// Full maximal chains representing `p`.
    pub fn representing_chains<'a>(&'a self, p: &'a MPoint) -> impl Iterator<Item = &'a Vec<Elem>> + 'a {
        self.base_chains()
            .iter()
            .filter(move |c| (0..=self.n).all(|r| p.chain[r].is_none_or(|e| c[r] == e)))
    }

    /// Every point with all coordinates in `lo..=hi` units, sorted.
    pub fn points_in_box(&self, lo: i64, hi: i64) -> Vec<MPoint> {
        let mut vectors = vec![Vec::new()];
        for _ in 0..self.n {
            vectors = vectors
                .into_iter()
                .flat_map(|v: Vec<i64>| {
                    let start = v.last().copied().unwrap_or(lo);
                    (start..=hi).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        let mut out: Vec<MPoint> = vectors
            .iter()
            .flat_map(|u| self.base_chains().iter().map(|c| self.make_point(c, u).expect("valid chain")))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// The grid-free form of `p`.
    pub fn to_rational_point(&self, p: &MPoint) -> RationalPoint {
        RationalPoint { u: p.u.iter().map(|&x| self.to_rational(x)).collect(), jumps: p.jumps().collect() }
    }

    /// Order test by the chain-entry criterion.
    pub fn leq(&self, a: &MPoint, b: &MPoint) -> bool {
        if a.u.iter().zip(&b.u).any(|(x, y)| x > y) {
            return false;
        }
        for j in 1..self.n {
            if !a.is_jump(j) {
                continue;
            }
            let target = a.u[j];
            // Smallest i in 0..=j with v_{i+1} >= u_{j+1}; i = 0 needs no check.
            let i = (0..=j).find(|&i| b.u[i] >= target).expect("i = j qualifies");
            if i == 0 {
                continue;
            }
            let bi = b.chain[i].expect("minimal i is a jump of v");
            let aj = a.chain[j].expect("j is a jump of u");
            if !self.base.leq(bi, aj) {
                return false;
            }
        }
        true
    }

    pub fn leq_with(&self, a: &MPoint, b: &MPoint, mode: OrderMode) -> bool {
        match mode {
            OrderMode::Criterion => self.leq(a, b),
            OrderMode::Oracle => self.leq_by_reachability(a, b),
        }
    }

    /// Order test by searching elementary steps from `a`, pruned to the box below `b`.
    pub fn leq_by_reachability(&self, a: &MPoint, b: &MPoint) -> bool {
        if a == b {
            return true;
        }
        if a.u.iter().zip(&b.u).any(|(x, y)| x > y) {
            return false;
        }
        let mut seen = HashSet::from([a.clone()]);
        let mut queue = VecDeque::from([a.clone()]);
        while let Some(x) = queue.pop_front() {
            for y in self.superiors_from_chains(&x) {
                if y == *b {
                    return true;
                }
                if y.u.iter().zip(&b.u).all(|(s, t)| s <= t) && seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        false
    }

    /// Elementary superiors obtained by raising blocks in every representing chain.
    pub fn superiors_from_chains(&self, p: &MPoint) -> Vec<MPoint> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for chain in self.representing_chains(p) {
            for (block_start, block_end) in self.blocks(p) {
                for i in block_start..=block_end {
                    let mut v = p.u.clone();
                    for x in &mut v[i - 1..block_end] {
                        *x = p.u[block_end - 1] + 1;
                    }
                    let q = self.canonical(v, |r| chain[r]);
                    if seen.insert(q.clone()) {
                        out.push(q);
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Maximal runs `[start, end]` of equal coordinates (1-based).
    fn blocks(&self, p: &MPoint) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut start = 1;
        for r in 1..=self.n {
            if r == self.n || p.u[r - 1] < p.u[r] {
                out.push((start, r));
                start = r + 1;
            }
        }
        out
    }

    fn block_start(&self, p: &MPoint, i: usize) -> usize {
        let mut s = i;
        while s > 1 && p.u[s - 2] == p.u[i - 1] {
            s -= 1;
        }
        s
    }

    /// Applies an elementary step after checking it is admissible.
    pub fn apply_step(&self, p: &MPoint, step: ElementaryStep) -> Result<MPoint, AffineError> {
        let ElementaryStep { start: i, end: j, element: b } = step;
        let n = self.n;
        if !(1 <= i && i <= j && j <= n) {
            return Err(AffineError::NotAdmissible(format!("range [{i}, {j}] is invalid")));
        }
        if p.u[i - 1] != p.u[j - 1] {
            return Err(AffineError::NotAdmissible("coordinates in the range differ".into()));
        }
        if j < n && p.u[j - 1] == p.u[j] {
            return Err(AffineError::NotAdmissible(format!("{j} is not the end of its block")));
        }
        let i0 = self.block_start(p, i);
        let lower = self.entry_or_bound(p, i0 - 1).expect("block start is anchored");
        let upper = self.entry_or_bound(p, j).expect("block end is anchored");
        if b >= self.base.len() || self.ranks[b] != i - 1 {
            return Err(AffineError::NotAdmissible(format!("element must have rank {}", i - 1)));
        }
        if !(self.base.leq(lower, b) && self.base.leq(b, upper)) {
            return Err(AffineError::NotAdmissible("element outside the allowed interval".into()));
        }
        let mut v = p.u.clone();
        let raised = p.u[j - 1] + 1;
        for x in &mut v[i - 1..j] {
            *x = raised;
        }
        Ok(self.canonical(v, |r| {
            if r == i - 1 {
                b
            } else {
                self.entry_or_bound(p, r).expect("other jumps of v are jumps of u")
            }
        }))
    }

    /// All admissible steps from `p`, each with the point it produces.
    pub fn elementary_superiors(&self, p: &MPoint) -> Vec<(ElementaryStep, MPoint)> {
        let mut out = Vec::new();
        for (i0, j) in self.blocks(p) {
            let lower = self.entry_or_bound(p, i0 - 1).expect("anchored");
            let upper = self.entry_or_bound(p, j).expect("anchored");
            for i in i0..=j {
                for &b in &self.by_rank[i - 1] {
                    if self.base.leq(lower, b) && self.base.leq(b, upper) {
                        let step = ElementaryStep { start: i, end: j, element: b };
                        let q = self.apply_step(p, step).expect("admissible by construction");
                        out.push((step, q));
                    }
                }
            }
        }
        out
    }

    /// A sequence of elementary steps from `from` to `to`; requires `from <= to`.
    pub fn elementary_path(&self, from: &MPoint, to: &MPoint) -> Result<Vec<ElementaryStep>, AffineError> {
        if !self.leq(from, to) {
            return Err(AffineError::Precondition("path endpoints are not ordered".into()));
        }
        let mut steps = Vec::new();
        let mut current = from.clone();
        while current != *to {
            let first = (1..=self.n)
                .find(|&r| current.u[r - 1] < to.u[r - 1])
                .expect("distinct comparable points differ in some coordinate");
            let options = self.elementary_superiors(&current);
            let pick = options
                .iter()
                .filter(|(s, _)| s.start == first)
                .chain(options.iter())
                .find(|(_, q)| self.leq(q, to))
                .cloned()
                .expect("some elementary superior stays below the target");
            steps.push(pick.0);
            current = pick.1;
        }
        Ok(steps)
    }

    pub fn apply_steps(&self, p: &MPoint, steps: &[ElementaryStep]) -> MPoint {
        steps.iter().fold(p.clone(), |acc, &s| self.apply_step(&acc, s).expect("recorded step is admissible"))
    }

    /// Shifts every coordinate by `t` units.
    pub fn translate(&self, p: &MPoint, t: i64) -> MPoint {
        MPoint { u: p.u.iter().map(|x| x + t).collect(), chain: p.chain.clone() }
    }

    pub fn translate_rational(&self, p: &MPoint, t: Rational) -> Result<MPoint, AffineError> {
        Ok(self.translate(p, self.to_units(t)?))
    }

    /// A common lower bound: `q` moved down until its top coordinate is below `r`'s bottom.
    fn common_lower_bound(&self, q: &MPoint, r: &MPoint) -> MPoint {
        let shift = (q.u[self.n - 1] - r.u[0] + 1).max(0);
        self.translate(q, -shift)
    }

    /// Least upper bound.
    pub fn join(&self, b: &MPoint, c: &MPoint) -> MPoint {
        let alpha = self.common_lower_bound(b, c);
        let to_b = self.elementary_path(&alpha, b).expect("alpha <= b");
        let to_c = self.elementary_path(&alpha, c).expect("alpha <= c");
        self.join_along(&alpha, &to_b, &to_c).0
    }

    /// Join of `base * p` and `base * q`, with step sequences from each to the join.
    ///
    /// The sequence returned from the first argument is no longer than `q`, and
    /// the one from the second no longer than `p`.
    fn join_along(
        &self,
        base: &MPoint,
        p: &[ElementaryStep],
        q: &[ElementaryStep],
    ) -> (MPoint, Vec<ElementaryStep>, Vec<ElementaryStep>) {
        if p.is_empty() {
            return (self.apply_steps(base, q), q.to_vec(), Vec::new());
        }
        if q.is_empty() {
            return (self.apply_steps(base, p), Vec::new(), p.to_vec());
        }
        if p.len() == 1 && q.len() == 1 {
            return self.join_of_steps(base, p[0], q[0]);
        }
        if p.len() < q.len() {
            let (d, from_c, from_b) = self.join_along(base, q, p);
            return (d, from_b, from_c);
        }
        let first = self.apply_step(base, p[0]).expect("recorded step is admissible");
        let (_, first_to_partial, c_to_partial) = self.join_along(base, &p[..1], q);
        let (d, b_to_d, partial_to_d) = self.join_along(&first, &p[1..], &first_to_partial);
        let mut c_to_d = c_to_partial;
        c_to_d.extend(partial_to_d);
        (d, b_to_d, c_to_d)
    }

    /// Join of two elementary superiors of `base`, each reached from the join in at most one step.
    fn join_of_steps(
        &self,
        base: &MPoint,
        s: ElementaryStep,
        t: ElementaryStep,
    ) -> (MPoint, Vec<ElementaryStep>, Vec<ElementaryStep>) {
        let beta = self.apply_step(base, s).expect("admissible");
        if s.end < t.start || t.end < s.start {
            let d = self.apply_step(&beta, t).expect("disjoint steps commute");
            return (d, vec![t], vec![s]);
        }
        debug_assert_eq!(s.end, t.end, "overlapping steps share their block end");
        if s.start > t.start {
            let (d, from_t, from_s) = self.join_of_steps(base, t, s);
            return (d, from_s, from_t);
        }
        if s.element == t.element {
            return (beta, Vec::new(), Vec::new());
        }
        if self.base.leq(s.element, t.element) {
            // The larger block of `s` already contains the result of `t`.
            let lift = ElementaryStep { start: s.start, end: t.start - 1, element: s.element };
            return (beta, Vec::new(), vec![lift]);
        }
        let g = self.base.meet(s.element, t.element).expect("base is a lattice");
        let r = self.ranks[g] + 1;
        let d = self
            .apply_step(base, ElementaryStep { start: r, end: s.end, element: g })
            .expect("meet lies in the allowed interval");
        (
            d,
            vec![ElementaryStep { start: r, end: s.start - 1, element: g }],
            vec![ElementaryStep { start: r, end: t.start - 1, element: g }],
        )
    }

    fn dual(&self) -> &AffineLattice {
        self.dual.get_or_init(|| {
            Box::new(AffineLattice::new(self.base.dual(), self.denominator).expect("dual of a lattice"))
        })
    }

    /// The image in `M_H(L^op)`: coordinates negated and reversed, ranks complemented.
    fn to_dual(&self, p: &MPoint) -> MPoint {
        let n = self.n;
        MPoint {
            u: p.u.iter().rev().map(|x| -x).collect(),
            chain: (0..=n).map(|r| p.chain[n - r]).collect(),
        }
    }

    /// Greatest lower bound, computed as a join in the dual lattice.
    pub fn meet(&self, b: &MPoint, c: &MPoint) -> MPoint {
        let dual = self.dual();
        let joined = dual.join(&self.to_dual(b), &self.to_dual(c));
        dual.to_dual(&joined)
    }

    /// Smallest `t >= 0` (in units) with `x - t <= y <= x + t`.
    pub fn distance_units(&self, x: &MPoint, y: &MPoint) -> i64 {
        self.distance_on_grid(x, y, 1)
    }

    pub fn distance(&self, x: &MPoint, y: &MPoint) -> Rational {
        self.to_rational(self.distance_units(x, y))
    }

    /// Smallest multiple `t` of `step` units with `x - t <= y <= x + t`.
    fn distance_on_grid(&self, x: &MPoint, y: &MPoint, step: i64) -> i64 {
        let n = self.n;
        let bound = (x.u[n - 1] - y.u[0]).max(y.u[n - 1] - x.u[0]).max(0);
        let within = |m: i64| {
            let t = m * step;
            self.leq(&self.translate(x, -t), y) && self.leq(y, &self.translate(x, t))
        };
        let (mut lo, mut hi) = (0i64, Integer::div_ceil(&bound, &step));
        debug_assert!(within(hi));
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if within(mid) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lo * step
    }

    /// The point `(x + r) meet (y + d - r)` at distance `r` from `x` and `d - r` from `y`.
    pub fn geodesic_point(&self, x: &MPoint, y: &MPoint, r: i64) -> Result<MPoint, AffineError> {
        let d = self.distance_units(x, y);
        if r < 0 || r > d {
            return Err(AffineError::Precondition(format!("need 0 <= r <= {d} units, got {r}")));
        }
        Ok(self.meet(&self.translate(x, r), &self.translate(y, d - r)))
    }

    /// Points of the interval `[lo, hi]`, sorted; walks elementary steps up from `lo`.
    pub fn interval(&self, lo: &MPoint, hi: &MPoint, cap: usize) -> Result<Vec<MPoint>, AffineError> {
        if !self.leq(lo, hi) {
            return Err(AffineError::Precondition("interval bounds are not ordered".into()));
        }
        let mut seen = HashSet::from([lo.clone()]);
        let mut queue = VecDeque::from([lo.clone()]);
        while let Some(x) = queue.pop_front() {
            for (_, y) in self.elementary_superiors(&x) {
                if !seen.contains(&y) && self.leq(&y, hi) {
                    if seen.len() >= cap {
                        return Err(AffineError::CapExceeded(cap));
                    }
                    seen.insert(y.clone());
                    queue.push_back(y);
                }
            }
        }
        let mut out: Vec<MPoint> = seen.into_iter().collect();
        out.sort();
        Ok(out)
    }

    /// Whether `x` and `y` are joined in the thickening: `x - 1 <= y <= x + 1` (one unit).
    pub fn thickening_adjacent(&self, x: &MPoint, y: &MPoint) -> bool {
        x != y && self.leq(&self.translate(x, -1), y) && self.leq(y, &self.translate(x, 1))
    }

    /// Neighbours of `x` in the thickening.
    pub fn thickening_neighbours(&self, x: &MPoint) -> Vec<MPoint> {
        let mut out = self
            .interval(&self.translate(x, -1), &self.translate(x, 1), usize::MAX)
            .expect("x - 1 <= x + 1");
        out.retain(|y| y != x);
        out
    }

    /// Breadth-first ball of radius `k` in the (infinite) thickening graph.
    pub fn graph_ball(&self, x: &MPoint, k: usize, cap: usize) -> Result<Vec<MPoint>, AffineError> {
        let mut seen = HashSet::from([x.clone()]);
        let mut frontier = vec![x.clone()];
        for _ in 0..k {
            let mut next = Vec::new();
            for y in &frontier {
                for z in self.thickening_neighbours(y) {
                    if seen.insert(z.clone()) {
                        if seen.len() > cap {
                            return Err(AffineError::CapExceeded(cap));
                        }
                        next.push(z);
                    }
                }
            }
            frontier = next;
        }
        let mut out: Vec<MPoint> = seen.into_iter().collect();
        out.sort();
        Ok(out)
    }

    /// The thickening restricted to `[center - radius, center + radius]` (radius in units).
    pub fn thickening_window(
        &self,
        center: &MPoint,
        radius: i64,
        cap: usize,
    ) -> Result<(Vec<MPoint>, Graph), AffineError> {
        let points =
            self.interval(&self.translate(center, -radius), &self.translate(center, radius), cap)?;
        let mut edges = Vec::new();
        for a in 0..points.len() {
            for b in a + 1..points.len() {
                if self.thickening_adjacent(&points[a], &points[b]) {
                    edges.push((a, b));
                }
            }
        }
        let names = points.iter().map(|p| self.describe(p)).collect();
        let graph = Graph::new(names, &edges).expect("distinct points");
        Ok((points, graph))
    }

    /// Short text form, `[u_1,...,u_n | r:id ...]`.
    pub fn describe(&self, p: &MPoint) -> String {
        let coords: Vec<String> = p.u.iter().map(|&x| self.to_rational(x).to_string()).collect();
        let jumps: Vec<String> = p.jumps().map(|(r, e)| format!("{r}:{}", self.base.id(e))).collect();
        format!("[{}|{}]", coords.join(","), jumps.join(" "))
    }

    pub fn to_json(&self, p: &MPoint) -> MPointJson {
        MPointJson {
            u: p.u.iter().map(|&x| RationalText(self.to_rational(x))).collect(),
            jumps: p.jumps().map(|(r, e)| (r.to_string(), self.base.id(e).to_string())).collect(),
        }
    }

    pub fn from_json(&self, json: &MPointJson) -> Result<MPoint, AffineError> {
        let u = json.u.iter().map(|x| self.to_units(x.0)).collect::<Result<Vec<_>, _>>()?;
        let mut jumps = BTreeMap::new();
        for (k, id) in &json.jumps {
            let r: usize = k.parse().map_err(|_| AffineError::Malformed(format!("bad position `{k}`")))?;
            jumps.insert(r, self.base.elem(id)?);
        }
        self.point_from_jumps(&u, &jumps)
    }
}

/// `{"u": [...], "jumps": {"i": element-id}}`; coordinates are integers or `"p/q"` strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MPointJson {
    pub u: Vec<RationalText>,
    #[serde(default)]
    pub jumps: BTreeMap<String, String>,
}

/// A rational read from or written to JSON as an integer or a `"p/q"` string.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RationalText(pub Rational);

impl Serialize for RationalText {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            s.serialize_i64(self.0.to_integer())
        } else {
            s.serialize_str(&self.0.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for RationalText {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(|v| RationalText(Rational::from_integer(v)))
                .ok_or_else(|| D::Error::custom("coordinates must be integers or \"p/q\" strings")),
            serde_json::Value::String(s) => parse_rational(&s).map(RationalText).map_err(D::Error::custom),
            other => Err(D::Error::custom(format!("unexpected coordinate {other}"))),
        }
    }
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (text, "1"),
    };
    let num: i64 = num.parse().map_err(|_| format!("bad numerator in `{text}`"))?;
    let den: i64 = den.parse().map_err(|_| format!("bad denominator in `{text}`"))?;
    if den == 0 {
        return Err(format!("zero denominator in `{text}`"));
    }
    Ok(Rational::new(num, den))
}

/// A point with arbitrary rational coordinates, independent of any grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPoint {
    pub u: Vec<Rational>,
    pub jumps: BTreeMap<usize, Elem>,
}

/// `d_k(x, y) = min { t in (1/k)N : x - t <= y <= x + t }` for points of `I(0_M, 1_M)`.
///
/// The points may have any rational coordinates; the order is evaluated exactly
/// on a common refinement of their denominators and `k`.
pub fn orthoscheme_distance(
    base: &FinitePoset,
    x: &RationalPoint,
    y: &RationalPoint,
    k: u32,
) -> Result<Rational, AffineError> {
    if k == 0 {
        return Err(AffineError::Precondition("resolution must be positive".into()));
    }
    let unit_interval = |p: &RationalPoint| {
        p.u.iter().all(|c| *c >= Rational::from_integer(0) && *c <= Rational::from_integer(1))
    };
    if !unit_interval(x) || !unit_interval(y) {
        return Err(AffineError::Precondition("points must lie in the unit interval [0_M, 1_M]".into()));
    }
    let common = x
        .u
        .iter()
        .chain(&y.u)
        .fold(k as i64, |acc, c| Integer::lcm(&acc, c.denom()));
    let ctx = AffineLattice::new(base.clone(), common)?;
    let lift = |p: &RationalPoint| {
        let u = p.u.iter().map(|&c| ctx.to_units(c)).collect::<Result<Vec<_>, _>>()?;
        ctx.point_from_jumps(&u, &p.jumps)
    };
    let (a, b) = (lift(x)?, lift(y)?);
    let step = common / k as i64;
    Ok(ctx.to_rational(ctx.distance_on_grid(&a, &b, step)))
}

/// The identification of `M_H(Boolean_n)` with `H^n`.
#[derive(Debug)]
pub struct BooleanModel<'a> {
    lattice: &'a AffineLattice,
    /// Bit mask of atoms below each element.
    atoms_below: Vec<u32>,
    element_of_mask: BTreeMap<u32, Elem>,
}

impl<'a> BooleanModel<'a> {
    /// Checks that the base is Boolean; coordinates follow the order of the atoms' indices.
    pub fn new(lattice: &'a AffineLattice) -> Result<Self, AffineError> {
        let base = lattice.base();
        let n = lattice.dimension();
        let atoms = &lattice.by_rank[1];
        if atoms.len() != n || n > 31 || base.len() != 1 << n {
            return Err(AffineError::BadBase("not a Boolean lattice".into()));
        }
        let atoms_below: Vec<u32> = base
            .elements()
            .map(|e| {
                atoms
                    .iter()
                    .enumerate()
                    .filter(|&(_, &a)| base.leq(a, e))
                    .fold(0u32, |m, (i, _)| m | 1 << i)
            })
            .collect();
        let element_of_mask: BTreeMap<u32, Elem> =
            atoms_below.iter().enumerate().map(|(e, &m)| (m, e)).collect();
        let order_matches = base.elements().all(|x| {
            base.elements().all(|y| base.leq(x, y) == (atoms_below[x] & !atoms_below[y] == 0))
        });
        if element_of_mask.len() != base.len() || !order_matches {
            return Err(AffineError::BadBase("not a Boolean lattice".into()));
        }
        Ok(BooleanModel { lattice, atoms_below, element_of_mask })
    }

    /// Coordinates in `H^n` (units): coordinate `m` takes the value of the block where atom `m` enters the chain.
    pub fn to_coords(&self, p: &MPoint) -> Vec<i64> {
        let ctx = self.lattice;
        let mut x = vec![0; ctx.n];
        for (start, end) in ctx.blocks(p) {
            let lower = self.atoms_below[ctx.entry_or_bound(p, start - 1).expect("anchored")];
            let upper = self.atoms_below[ctx.entry_or_bound(p, end).expect("anchored")];
            let added = upper & !lower;
            for (m, slot) in x.iter_mut().enumerate() {
                if added >> m & 1 == 1 {
                    *slot = p.u[start - 1];
                }
            }
        }
        x
    }

    /// The point whose chain lists coordinates from smallest to largest.
    pub fn from_coords(&self, x: &[i64]) -> Result<MPoint, AffineError> {
        let ctx = self.lattice;
        if x.len() != ctx.n {
            return Err(AffineError::WrongLength { expected: ctx.n, got: x.len() });
        }
        let mut order: Vec<usize> = (0..ctx.n).collect();
        order.sort_by_key(|&m| (x[m], m));
        let mut chain = vec![self.element_of_mask[&0]];
        let mut mask = 0u32;
        for &m in &order {
            mask |= 1 << m;
            chain.push(self.element_of_mask[&mask]);
        }
        let u: Vec<i64> = order.iter().map(|&m| x[m]).collect();
        ctx.make_point(&chain, &u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{generate, CatalogRecipe};

    fn lattice(recipe: CatalogRecipe, k: i64) -> AffineLattice {
        AffineLattice::new(generate(&recipe).unwrap(), k).unwrap()
    }

    fn boolean(n: usize) -> AffineLattice {
        lattice(CatalogRecipe::Boolean { n }, 1)
    }

    #[test]
    fn rejects_non_lattices() {
        let polar = generate(&CatalogRecipe::Polar { q: 2, dim: 4 }).unwrap();
        assert!(matches!(AffineLattice::new(polar, 1), Err(AffineError::BadBase(_))));
    }

    #[test]
    fn point_validation() {
        let m = boolean(2);
        let full = [0b00, 0b01, 0b11];
        assert!(m.make_point(&full, &[0, 1]).is_ok());
        assert_eq!(m.make_point(&full, &[1, 0]), Err(AffineError::NonMonotone));
        assert!(matches!(m.make_point(&[0b00, 0b11, 0b11], &[0, 1]), Err(AffineError::NotMaximalChain(_))));
        assert!(matches!(
            m.make_point_rational(&full, &[Rational::new(1, 2), Rational::from_integer(1)]),
            Err(AffineError::NotInGroup(..))
        ));
        let jumps = BTreeMap::from([(1, 0b10)]);
        assert!(m.point_from_jumps(&[0, 0], &jumps).is_err());
        assert!(m.point_from_jumps(&[0, 1], &BTreeMap::new()).is_err());
        assert_eq!(m.point_from_jumps(&[0, 1], &jumps).unwrap(), m.make_point(&[0, 0b10, 0b11], &[0, 1]).unwrap());
    }

    #[test]
    fn superior_counts() {
        assert_eq!(boolean(2).elementary_superiors(&boolean(2).origin()).len(), 3);
        assert_eq!(boolean(3).elementary_superiors(&boolean(3).origin()).len(), 7);
        let chain = lattice(CatalogRecipe::Chain { n: 1 }, 1);
        assert_eq!(chain.elementary_superiors(&chain.origin()).len(), 1);
    }

    #[test]
    fn superiors_match_chain_enumeration() {
        for recipe in [
            CatalogRecipe::Boolean { n: 3 },
            CatalogRecipe::WeakOrder { n: 3 },
            CatalogRecipe::Subspace { q: 2, n: 3 },
        ] {
            let m = lattice(recipe, 1);
            let mut frontier = vec![m.origin()];
            let mut seen = HashSet::new();
            for _ in 0..3 {
                let mut next = Vec::new();
                for p in &frontier {
                    let mut by_step: Vec<MPoint> =
                        m.elementary_superiors(p).into_iter().map(|(_, q)| q).collect();
                    by_step.sort();
                    by_step.dedup();
                    assert_eq!(by_step, m.superiors_from_chains(p));
                    for q in by_step {
                        if seen.insert(q.clone()) {
                            next.push(q);
                        }
                    }
                }
                frontier = next;
            }
        }
    }

    #[test]
    fn step_admissibility() {
        let m = boolean(2);
        let o = m.origin();
        let bad_end = ElementaryStep { start: 1, end: 1, element: 0 };
        assert!(matches!(m.apply_step(&o, bad_end), Err(AffineError::NotAdmissible(_))));
        let bad_rank = ElementaryStep { start: 2, end: 2, element: 0 };
        assert!(matches!(m.apply_step(&o, bad_rank), Err(AffineError::NotAdmissible(_))));
        let ok = ElementaryStep { start: 2, end: 2, element: 0b01 };
        assert_eq!(m.apply_step(&o, ok).unwrap().units(), &[0, 1]);
    }

    #[test]
    fn boolean_order_is_componentwise() {
        let m = boolean(2);
        let model = BooleanModel::new(&m).unwrap();
        let pts: Vec<Vec<i64>> = (0..3).flat_map(|a| (0..3).map(move |b| vec![a, b])).collect();
        for x in &pts {
            for y in &pts {
                let (p, q) = (model.from_coords(x).unwrap(), model.from_coords(y).unwrap());
                assert_eq!(model.to_coords(&p), *x);
                let componentwise = x.iter().zip(y).all(|(a, b)| a <= b);
                assert_eq!(m.leq(&p, &q), componentwise, "{x:?} {y:?}");
                assert_eq!(m.leq_by_reachability(&p, &q), componentwise, "{x:?} {y:?}");
            }
        }
    }

    #[test]
    fn distances() {
        let m = boolean(2);
        let model = BooleanModel::new(&m).unwrap();
        let far = model.from_coords(&[1, 1]).unwrap();
        assert_eq!(m.distance(&m.origin(), &far), Rational::from_integer(1));
        let m3 = lattice(CatalogRecipe::Boolean { n: 3 }, 2);
        let model3 = BooleanModel::new(&m3).unwrap();
        let y = model3.from_coords(&[1, 1, 2]).unwrap();
        assert_eq!(m3.distance(&m3.origin(), &y), Rational::from_integer(1));
        assert_eq!(m3.distance_units(&y, &y), 0);
    }

    #[test]
    fn translation_needs_group_elements() {
        let m = boolean(2);
        assert!(m.translate_rational(&m.origin(), Rational::new(1, 3)).is_err());
        assert_eq!(m.translate_rational(&m.origin(), Rational::from_integer(2)).unwrap(), m.constant(2));
    }

    #[test]
    fn join_and_meet_examples() {
        let w = lattice(CatalogRecipe::WeakOrder { n: 3 }, 1);
        let s1 = w.base().elem("s1").unwrap();
        let s2 = w.base().elem("s2").unwrap();
        let a = w.point_from_jumps(&[0, 1, 1], &BTreeMap::from([(1, s1)])).unwrap();
        let b = w.point_from_jumps(&[0, 1, 1], &BTreeMap::from([(1, s2)])).unwrap();
        assert_eq!(w.join(&a, &b), w.constant(1));
        assert_eq!(w.meet(&a, &b), w.origin());
        assert_eq!(w.join(&a, &a), a);
        assert_eq!(w.meet(&a, &w.constant(5)), a);
    }

    #[test]
    fn join_base_cases_on_boolean() {
        let m = boolean(2);
        let model = BooleanModel::new(&m).unwrap();
        let p = |x: &[i64]| model.from_coords(x).unwrap();
        assert_eq!(m.join(&p(&[0, 1]), &p(&[1, 1])), p(&[1, 1]));
        assert_eq!(m.join(&p(&[0, 1]), &p(&[1, 0])), p(&[1, 1]));
        assert_eq!(m.join(&p(&[2, 0]), &p(&[-1, 3])), p(&[2, 3]));
        assert_eq!(m.meet(&p(&[2, 0]), &p(&[-1, 3])), p(&[-1, 0]));
    }

    #[test]
    fn geodesic_points() {
        let m = boolean(3);
        let model = BooleanModel::new(&m).unwrap();
        let x = model.from_coords(&[0, 0, 0]).unwrap();
        let y = model.from_coords(&[3, -1, 2]).unwrap();
        let d = m.distance_units(&x, &y);
        assert_eq!(d, 3);
        for r in 0..=d {
            let z = m.geodesic_point(&x, &y, r).unwrap();
            assert_eq!(m.distance_units(&x, &z), r);
            assert_eq!(m.distance_units(&z, &y), d - r);
        }
        assert!(m.geodesic_point(&x, &y, 4).is_err());
    }

    #[test]
    fn king_window() {
        let m = boolean(2);
        let (points, graph) = m.thickening_window(&m.origin(), 2, 10_000).unwrap();
        assert_eq!(points.len(), 25);
        let king = Graph::king_grid(5, 5);
        let model = BooleanModel::new(&m).unwrap();
        let index = |p: &MPoint| {
            let c = model.to_coords(p);
            ((c[1] + 2) * 5 + c[0] + 2) as usize
        };
        let mut ours: Vec<(usize, usize)> = graph
            .edges()
            .into_iter()
            .map(|(a, b)| {
                let (x, y) = (index(&points[a]), index(&points[b]));
                (x.min(y), x.max(y))
            })
            .collect();
        ours.sort();
        assert_eq!(ours, king.edges());
    }

    #[test]
    fn orthoscheme_values() {
        let base = generate(&CatalogRecipe::Boolean { n: 3 }).unwrap();
        let m = AffineLattice::new(base.clone(), 2).unwrap();
        let model = BooleanModel::new(&m).unwrap();
        let y = model.from_coords(&[0, 1, 2]).unwrap();
        let rational = |p: &MPoint| RationalPoint {
            u: p.units().iter().map(|&v| Rational::new(v, 2)).collect(),
            jumps: p.jumps().collect(),
        };
        let origin = rational(&m.origin());
        let target = rational(&y);
        for k in [2, 4, 8] {
            let d = orthoscheme_distance(&base, &origin, &target, k).unwrap();
            assert_eq!(d, Rational::from_integer(1));
        }
        // A coordinate of 1/3 rounds up to the next multiple of 1/k.
        let third = RationalPoint { u: vec![Rational::new(1, 3); 3], jumps: BTreeMap::new() };
        let d2 = orthoscheme_distance(&base, &origin, &third, 2).unwrap();
        let d4 = orthoscheme_distance(&base, &origin, &third, 4).unwrap();
        assert_eq!((d2, d4), (Rational::new(1, 2), Rational::new(1, 2)));
        let d8 = orthoscheme_distance(&base, &origin, &third, 8).unwrap();
        assert_eq!(d8, Rational::new(3, 8));
        let outside = RationalPoint { u: vec![Rational::from_integer(2); 3], jumps: BTreeMap::new() };
        assert!(orthoscheme_distance(&base, &origin, &outside, 2).is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = lattice(CatalogRecipe::Boolean { n: 2 }, 2);
        let p = m.make_point(&[0, 0b10, 0b11], &[1, 3]).unwrap();
        let text = serde_json::to_string(&m.to_json(&p)).unwrap();
        assert_eq!(text, r#"{"u":["1/2","3/2"],"jumps":{"1":"{2}"}}"#);
        let back: MPointJson = serde_json::from_str(&text).unwrap();
        assert_eq!(m.from_json(&back).unwrap(), p);
        let int: MPointJson = serde_json::from_str(r#"{"u":[0,1],"jumps":{"1":"{1}"}}"#).unwrap();
        assert_eq!(m.from_json(&int).unwrap().units(), &[0, 2]);
    }

    #[test]
    fn criterion_matches_reachability_and_lattice_ops_are_extremal() {
        for recipe in [
            CatalogRecipe::Boolean { n: 3 },
            CatalogRecipe::WeakOrder { n: 3 },
            CatalogRecipe::Noncrossing { n: 3 },
            CatalogRecipe::Subspace { q: 2, n: 3 },
        ] {
            let m = lattice(recipe, 1);
            let pts = m.points_in_box(-1, 1);
            let order: Vec<Vec<bool>> = pts
                .iter()
                .map(|a| pts.iter().map(|b| m.leq(a, b)).collect())
                .collect();
            for (a, row) in pts.iter().zip(&order) {
                for (b, &le) in pts.iter().zip(row) {
                    assert_eq!(le, m.leq_by_reachability(a, b), "{} {}", m.describe(a), m.describe(b));
                }
            }
            for x in 0..pts.len() {
                for y in x..pts.len() {
                    let uppers: Vec<usize> = (0..pts.len()).filter(|&z| order[x][z] && order[y][z]).collect();
                    let least: Vec<usize> =
                        uppers.iter().copied().filter(|&z| uppers.iter().all(|&w| order[z][w])).collect();
                    assert_eq!(least.len(), 1);
                    assert_eq!(m.join(&pts[x], &pts[y]), pts[least[0]]);
                    let lowers: Vec<usize> = (0..pts.len()).filter(|&z| order[z][x] && order[z][y]).collect();
                    let greatest: Vec<usize> =
                        lowers.iter().copied().filter(|&z| lowers.iter().all(|&w| order[w][z])).collect();
                    assert_eq!(greatest.len(), 1);
                    assert_eq!(m.meet(&pts[x], &pts[y]), pts[greatest[0]]);
                }
            }
        }
    }

    #[test]
    fn join_of_two_steps_is_one_step_away() {
        for recipe in [CatalogRecipe::Boolean { n: 3 }, CatalogRecipe::Partition { n: 4 }] {
            let m = lattice(recipe, 1);
            for alpha in m.points_in_box(0, 1) {
                let sup = m.elementary_superiors(&alpha);
                for &(s, ref beta) in &sup {
                    for &(t, ref gamma) in &sup {
                        let (d, from_beta, from_gamma) = m.join_of_steps(&alpha, s, t);
                        assert!(from_beta.len() <= 1 && from_gamma.len() <= 1);
                        assert_eq!(m.apply_steps(beta, &from_beta), d);
                        assert_eq!(m.apply_steps(gamma, &from_gamma), d);
                        assert_eq!(m.join(beta, gamma), d);
                    }
                }
            }
        }
    }

    #[test]
    fn boolean_model_requires_boolean_base() {
        let w = lattice(CatalogRecipe::WeakOrder { n: 3 }, 1);
        assert!(BooleanModel::new(&w).is_err());
    }
}
