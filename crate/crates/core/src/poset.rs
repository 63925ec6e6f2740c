//! Finite posets stored as dense up-set / down-set bit rows.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Exec;

/// Index of an element inside a [`FinitePoset`].
pub type Elem = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("duplicate element identifier `{0}`")]
    DuplicateId(String),
    #[error("relation is not reflexive at `{0}`")]
    NotReflexive(String),
    #[error("relation is not antisymmetric: `{0}` and `{1}`")]
    NotAntisymmetric(String, String),
    #[error("relation is not transitive: `{0}` <= `{1}` <= `{2}`")]
    NotTransitive(String, String, String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("more than {cap} maximal chains")]
    CapExceeded { cap: usize },
    #[error("malformed poset description: {0}")]
    Malformed(String),
}

/// A finite partially ordered set.
#[derive(Clone, Debug)]
pub struct FinitePoset {
    ids: Vec<String>,
    index: HashMap<String, Elem>,
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
    upper_covers: Vec<Vec<Elem>>,
    lower_covers: Vec<Vec<Elem>>,
    topo: Vec<Elem>,
}

/// Which bound [`FinitePoset::bound`] computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Meet,
    Join,
}

/// Result of asking for a meet or join of two elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    Unique(Elem),
    /// No common lower (or upper) bound at all.
    Missing,
    /// Several maximal lower (or minimal upper) bounds.
    Ambiguous(Vec<Elem>),
}

impl Bound {
    pub fn unique(&self) -> Option<Elem> {
        match self {
            Bound::Unique(e) => Some(*e),
            _ => None,
        }
    }
}

/// Summary of the structural properties of a poset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PosetProfile {
    pub bounded_below: Option<Elem>,
    pub bounded_above: Option<Elem>,
    /// Every interval has a rank.
    pub graded: bool,
    /// Present only when the poset is bounded and graded.
    pub rank: Option<usize>,
    pub meet_semilattice: bool,
    pub lattice: bool,
    /// Pairwise upper-bounded triples have a common upper bound.
    pub flag: bool,
}

impl PosetProfile {
    pub fn bounded(&self) -> bool {
        self.bounded_below.is_some() && self.bounded_above.is_some()
    }
}

/// Four distinct elements with `a, c` minimal upper bounds of `b, d`
/// and `b, d` maximal lower bounds of `a, c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bowtie {
    pub a: Elem,
    pub b: Elem,
    pub c: Elem,
    pub d: Elem,
}

/// Outcome of checking a family of intervals for a common element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntervalHelly {
    Common(Elem),
    /// The intervals at these family positions do not meet.
    Disjoint(usize, usize),
    /// Pairwise intersecting, yet no element lies in all of them.
    Violation,
}

fn empty_set(n: usize) -> FixedBitSet {
    FixedBitSet::with_capacity(n)
}

impl FinitePoset {
    /// Builds a poset from its cover (Hasse) edges, taking the reflexive transitive closure.
    pub fn from_covers(ids: Vec<String>, covers: &[(Elem, Elem)]) -> Result<Self, PosetError> {
        let n = ids.len();
        let index = build_index(&ids)?;
        let mut succ = vec![Vec::new(); n];
        let mut indegree = vec![0usize; n];
        for &(lo, hi) in covers {
            if lo >= n || hi >= n {
                return Err(PosetError::UnknownElement(format!("#{}", lo.max(hi))));
            }
            if lo == hi {
                return Err(PosetError::NotAntisymmetric(ids[lo].clone(), ids[hi].clone()));
            }
            succ[lo].push(hi);
            indegree[hi] += 1;
        }
        let mut order = Vec::with_capacity(n);
        let mut stack: Vec<Elem> = (0..n).filter(|&x| indegree[x] == 0).collect();
        while let Some(x) = stack.pop() {
            order.push(x);
            for &y in &succ[x] {
                indegree[y] -= 1;
                if indegree[y] == 0 {
                    stack.push(y);
                }
            }
        }
        if order.len() < n {
            let stuck = (0..n).find(|&x| indegree[x] > 0).unwrap_or(0);
            return Err(PosetError::NotAntisymmetric(ids[stuck].clone(), ids[stuck].clone()));
        }
        let mut up = vec![empty_set(n); n];
        for &x in order.iter().rev() {
            let mut row = empty_set(n);
            row.insert(x);
            for &y in &succ[x] {
                row.union_with(&up[y]);
            }
            up[x] = row;
        }
        Ok(Self::from_up_sets(ids, index, up))
    }

    /// Builds a poset from an order predicate, validating the partial order axioms.
    pub fn from_leq<F>(ids: Vec<String>, leq: F) -> Result<Self, PosetError>
    where
        F: Fn(Elem, Elem) -> bool,
    {
        let n = ids.len();
        let index = build_index(&ids)?;
        let mut up = vec![empty_set(n); n];
        for (x, row) in up.iter_mut().enumerate() {
            for y in 0..n {
                if leq(x, y) {
                    row.insert(y);
                }
            }
            if !row.contains(x) {
                return Err(PosetError::NotReflexive(ids[x].clone()));
            }
        }
        for x in 0..n {
            for y in up[x].ones() {
                if y != x && up[y].contains(x) {
                    return Err(PosetError::NotAntisymmetric(ids[x].clone(), ids[y].clone()));
                }
                if !up[y].is_subset(&up[x]) {
                    let z = up[y].difference(&up[x]).next().unwrap_or(y);
                    return Err(PosetError::NotTransitive(
                        ids[x].clone(),
                        ids[y].clone(),
                        ids[z].clone(),
                    ));
                }
            }
        }
        Ok(Self::from_up_sets(ids, index, up))
    }

    fn from_up_sets(ids: Vec<String>, index: HashMap<String, Elem>, up: Vec<FixedBitSet>) -> Self {
        let n = ids.len();
        let mut down = vec![empty_set(n); n];
        for (x, row) in up.iter().enumerate() {
            for y in row.ones() {
                down[y].insert(x);
            }
        }
        let mut upper_covers = vec![Vec::new(); n];
        let mut lower_covers = vec![Vec::new(); n];
        for x in 0..n {
            let mut strict = up[x].clone();
            strict.set(x, false);
            for y in strict.ones() {
                if down[y].intersection(&strict).count() == 1 {
                    upper_covers[x].push(y);
                    lower_covers[y].push(x);
                }
            }
        }
        let mut topo: Vec<Elem> = (0..n).collect();
        topo.sort_by_key(|&x| (down[x].count_ones(..), x));
        Self { ids, index, up, down, upper_covers, lower_covers, topo }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.len()
    }

    pub fn id(&self, x: Elem) -> &str {
        &self.ids[x]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    /// Looks an element up by identifier.
    pub fn elem(&self, id: &str) -> Result<Elem, PosetError> {
        self.index.get(id).copied().ok_or_else(|| PosetError::UnknownElement(id.to_string()))
    }

    fn check(&self, x: Elem) -> Result<(), PosetError> {
        if x < self.len() {
            Ok(())
        } else {
            Err(PosetError::UnknownElement(format!("#{x}")))
        }
    }

    pub fn leq(&self, x: Elem, y: Elem) -> bool {
        self.up[x].contains(y)
    }

    pub fn lt(&self, x: Elem, y: Elem) -> bool {
        x != y && self.leq(x, y)
    }

    pub fn comparable(&self, x: Elem, y: Elem) -> bool {
        self.leq(x, y) || self.leq(y, x)
    }

    /// `{y : x <= y}`.
    pub fn up_set(&self, x: Elem) -> &FixedBitSet {
        &self.up[x]
    }

    /// `{y : y <= x}`.
    pub fn down_set(&self, x: Elem) -> &FixedBitSet {
        &self.down[x]
    }

    pub fn upper_covers(&self, x: Elem) -> &[Elem] {
        &self.upper_covers[x]
    }

    pub fn lower_covers(&self, x: Elem) -> &[Elem] {
        &self.lower_covers[x]
    }

    /// All cover pairs `(lo, hi)` in element order.
    pub fn cover_pairs(&self) -> Vec<(Elem, Elem)> {
        self.elements()
            .flat_map(|x| self.upper_covers[x].iter().map(move |&y| (x, y)))
            .collect()
    }

    /// A linear extension of the order.
    pub fn linear_extension(&self) -> &[Elem] {
        &self.topo
    }

    /// Elements of the closed interval `[lo, hi]`.
    pub fn interval(&self, lo: Elem, hi: Elem) -> FixedBitSet {
        &self.up[lo] & &self.down[hi]
    }

    pub fn minimum(&self) -> Option<Elem> {
        self.elements().find(|&x| self.up[x].count_ones(..) == self.len())
    }

    pub fn maximum(&self) -> Option<Elem> {
        self.elements().find(|&x| self.down[x].count_ones(..) == self.len())
    }

    pub fn minimal_elements(&self) -> Vec<Elem> {
        self.elements().filter(|&x| self.lower_covers[x].is_empty()).collect()
    }

    pub fn maximal_elements(&self) -> Vec<Elem> {
        self.elements().filter(|&x| self.upper_covers[x].is_empty()).collect()
    }

    /// The same elements with the order reversed.
    pub fn dual(&self) -> FinitePoset {
        Self::from_up_sets(self.ids.clone(), self.index.clone(), self.down.clone())
    }

    /// The subposet induced on `elems`, keeping identifiers.
    pub fn induced(&self, elems: &[Elem]) -> FinitePoset {
        let ids = elems.iter().map(|&x| self.ids[x].clone()).collect();
        FinitePoset::from_leq(ids, |i, j| self.leq(elems[i], elems[j]))
            .expect("restriction of a partial order is a partial order")
    }

    /// Maximal elements of a subset.
    pub fn maximal_in(&self, set: &FixedBitSet) -> Vec<Elem> {
        set.ones().filter(|&m| self.up[m].intersection(set).count() == 1).collect()
    }

    /// Minimal elements of a subset.
    pub fn minimal_in(&self, set: &FixedBitSet) -> Vec<Elem> {
        set.ones().filter(|&m| self.down[m].intersection(set).count() == 1).collect()
    }

    /// Meet or join of two elements.
    pub fn bound(&self, x: Elem, y: Elem, kind: BoundKind) -> Result<Bound, PosetError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.bound_unchecked(x, y, kind))
    }

    fn bound_unchecked(&self, x: Elem, y: Elem, kind: BoundKind) -> Bound {
        let (common, extremal) = match kind {
            BoundKind::Meet => {
                let c = &self.down[x] & &self.down[y];
                let m = self.maximal_in(&c);
                (c, m)
            }
            BoundKind::Join => {
                let c = &self.up[x] & &self.up[y];
                let m = self.minimal_in(&c);
                (c, m)
            }
        };
        match extremal.len() {
            0 if common.is_clear() => Bound::Missing,
            1 => Bound::Unique(extremal[0]),
            _ => Bound::Ambiguous(extremal),
        }
    }

    pub fn meet(&self, x: Elem, y: Elem) -> Option<Elem> {
        self.bound_unchecked(x, y, BoundKind::Meet).unique()
    }

    pub fn join(&self, x: Elem, y: Elem) -> Option<Elem> {
        self.bound_unchecked(x, y, BoundKind::Join).unique()
    }

    /// Whether `x` and `y` have a common upper bound.
    pub fn upper_bounded(&self, x: Elem, y: Elem) -> bool {
        self.up[x].intersection(&self.up[y]).next().is_some()
    }

    /// Whether `x` and `y` have a common lower bound.
    pub fn lower_bounded(&self, x: Elem, y: Elem) -> bool {
        self.down[x].intersection(&self.down[y]).next().is_some()
    }

    /// Whether every interval has all its maximal chains of one length.
    pub fn is_graded(&self) -> bool {
        self.elements().all(|x| self.chain_lengths_from(x).is_some())
    }

    /// Common length of maximal chains from `x` to every `y >= x`, if uniform.
    fn chain_lengths_from(&self, x: Elem) -> Option<Vec<usize>> {
        let n = self.len();
        let mut shortest = vec![usize::MAX; n];
        let mut longest = vec![0usize; n];
        shortest[x] = 0;
        for &y in &self.topo {
            if shortest[y] == usize::MAX {
                continue;
            }
            for &z in &self.upper_covers[y] {
                shortest[z] = shortest[z].min(shortest[y] + 1);
                longest[z] = longest[z].max(longest[y] + 1);
            }
        }
        self.up[x].ones().all(|y| shortest[y] == longest[y]).then_some(shortest)
    }

    /// Rank of every element above the minimum, for graded posets with a minimum.
    pub fn ranks(&self) -> Option<Vec<usize>> {
        let bottom = self.minimum()?;
        if !self.is_graded() {
            return None;
        }
        self.chain_lengths_from(bottom)
    }

    pub fn is_meet_semilattice(&self, exec: Exec) -> bool {
        self.all_pairs_bounded(exec, BoundKind::Meet)
    }

    fn all_pairs_bounded(&self, exec: Exec, kind: BoundKind) -> bool {
        let n = self.len();
        exec.find_first_in_range(n, |x| {
            (x + 1..n).find(|&y| self.bound_unchecked(x, y, kind).unique().is_none())
        })
        .is_none()
    }

    /// Whether any three pairwise upper-bounded elements share an upper bound.
    pub fn is_flag(&self, exec: Exec) -> bool {
        if self.maximum().is_some() {
            return true;
        }
        self.flag_violation(exec).is_none()
    }

    /// A pairwise upper-bounded triple without a common upper bound.
    pub fn flag_violation(&self, exec: Exec) -> Option<(Elem, Elem, Elem)> {
        let n = self.len();
        exec.find_first_in_range(n, |x| {
            for y in x + 1..n {
                let xy = &self.up[x] & &self.up[y];
                if xy.is_clear() {
                    continue;
                }
                for z in y + 1..n {
                    if self.upper_bounded(x, z)
                        && self.upper_bounded(y, z)
                        && xy.intersection(&self.up[z]).next().is_none()
                    {
                        return Some((x, y, z));
                    }
                }
            }
            None
        })
    }

    pub fn analyze(&self) -> PosetProfile {
        self.analyze_with(Exec::default())
    }

    pub fn analyze_with(&self, exec: Exec) -> PosetProfile {
        let bounded_below = self.minimum();
        let bounded_above = self.maximum();
        let graded = self.is_graded();
        let rank = match (bounded_below, bounded_above, graded) {
            (Some(lo), Some(_), true) => self.chain_lengths_from(lo).and_then(|r| r.into_iter().max()),
            _ => None,
        };
        let meet_semilattice = self.is_meet_semilattice(exec);
        let lattice = meet_semilattice && self.all_pairs_bounded(exec, BoundKind::Join);
        let flag = self.is_flag(exec);
        PosetProfile { bounded_below, bounded_above, graded, rank, meet_semilattice, lattice, flag }
    }

    /// Searches for a bowtie; the poset must be bounded and graded.
    pub fn find_bowtie(&self) -> Result<Option<Bowtie>, PosetError> {
        if self.minimum().is_none() || self.maximum().is_none() {
            return Err(PosetError::Precondition("bowtie search needs a bounded poset".into()));
        }
        if !self.is_graded() {
            return Err(PosetError::Precondition("bowtie search needs a graded poset".into()));
        }
        let n = self.len();
        for b in 0..n {
            for d in b + 1..n {
                if self.comparable(b, d) {
                    continue;
                }
                let uppers = self.minimal_in(&(&self.up[b] & &self.up[d]));
                for (i, &a) in uppers.iter().enumerate() {
                    for &c in &uppers[i + 1..] {
                        let lowers = self.maximal_in(&(&self.down[a] & &self.down[c]));
                        if lowers.contains(&b) && lowers.contains(&d) {
                            return Ok(Some(Bowtie { a, b, c, d }));
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    /// Checks a family of intervals `[lo, hi]` for a common element.
    pub fn interval_helly_check(&self, family: &[(Elem, Elem)]) -> Result<IntervalHelly, PosetError> {
        if family.is_empty() {
            return Err(PosetError::Precondition("empty interval family".into()));
        }
        for &(lo, hi) in family {
            self.check(lo)?;
            self.check(hi)?;
            if !self.leq(lo, hi) {
                return Err(PosetError::Precondition(format!(
                    "`{}` is not below `{}`",
                    self.ids[lo], self.ids[hi]
                )));
            }
        }
        let sets: Vec<FixedBitSet> = family.iter().map(|&(lo, hi)| self.interval(lo, hi)).collect();
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                if sets[i].intersection(&sets[j]).next().is_none() {
                    return Ok(IntervalHelly::Disjoint(i, j));
                }
            }
        }
        let lower_join = family[1..]
            .iter()
            .try_fold(family[0].0, |acc, &(lo, _)| self.join(acc, lo));
        if let Some(j) = lower_join {
            if sets.iter().all(|s| s.contains(j)) {
                return Ok(IntervalHelly::Common(j));
            }
        }
        let mut all = sets[0].clone();
        for s in &sets[1..] {
            all.intersect_with(s);
        }
        Ok(match all.ones().next() {
            Some(e) => IntervalHelly::Common(e),
            None => IntervalHelly::Violation,
        })
    }

    /// Enumerates maximal chains, failing once more than `cap` are found.
    pub fn maximal_chains(&self, cap: usize) -> Result<Vec<Vec<Elem>>, PosetError> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        for start in self.minimal_elements() {
            path.push(start);
            self.extend_chains(&mut path, &mut out, cap)?;
            path.pop();
        }
        Ok(out)
    }

    fn extend_chains(
        &self,
        path: &mut Vec<Elem>,
        out: &mut Vec<Vec<Elem>>,
        cap: usize,
    ) -> Result<(), PosetError> {
        let last = *path.last().expect("non-empty path");
        if self.upper_covers[last].is_empty() {
            if out.len() == cap {
                return Err(PosetError::CapExceeded { cap });
            }
            out.push(path.clone());
            return Ok(());
        }
        for &next in &self.upper_covers[last] {
            path.push(next);
            self.extend_chains(path, out, cap)?;
            path.pop();
        }
        Ok(())
    }

    /// An order isomorphism onto `other`, if one exists.
    pub fn isomorphism_to(&self, other: &FinitePoset) -> Option<Vec<Elem>> {
        if self.len() != other.len() {
            return None;
        }
        let signature = |p: &FinitePoset, x: Elem| (p.down[x].count_ones(..), p.up[x].count_ones(..));
        let mut mine: Vec<_> = self.elements().map(|x| signature(self, x)).collect();
        let mut theirs: Vec<_> = other.elements().map(|x| signature(other, x)).collect();
        let (a, b) = (mine.clone(), theirs.clone());
        mine.sort_unstable();
        theirs.sort_unstable();
        if mine != theirs {
            return None;
        }
        let order = self.topo.clone();
        let mut image = vec![usize::MAX; self.len()];
        let mut used = vec![false; other.len()];
        fn search(
            k: usize,
            order: &[Elem],
            p: &FinitePoset,
            q: &FinitePoset,
            sig_p: &[(usize, usize)],
            sig_q: &[(usize, usize)],
            image: &mut [Elem],
            used: &mut [bool],
        ) -> bool {
            if k == order.len() {
                return true;
            }
            let x = order[k];
            for y in q.elements() {
                if used[y] || sig_p[x] != sig_q[y] {
                    continue;
                }
                let consistent = order[..k].iter().all(|&w| {
                    p.leq(w, x) == q.leq(image[w], y) && p.leq(x, w) == q.leq(y, image[w])
                });
                if !consistent {
                    continue;
                }
                image[x] = y;
                used[y] = true;
                if search(k + 1, order, p, q, sig_p, sig_q, image, used) {
                    return true;
                }
                used[y] = false;
            }
            false
        }
        search(0, &order, self, other, &a, &b, &mut image, &mut used).then_some(image)
    }

    pub fn is_isomorphic(&self, other: &FinitePoset) -> bool {
        self.isomorphism_to(other).is_some()
    }

    /// Serializable cover description.
    pub fn to_json(&self) -> PosetJson {
        PosetJson {
            elements: self.ids.clone(),
            covers: self
                .cover_pairs()
                .into_iter()
                .map(|(lo, hi)| [self.ids[lo].clone(), self.ids[hi].clone()])
                .collect(),
        }
    }

    pub fn from_json(json: &PosetJson) -> Result<Self, PosetError> {
        let index = build_index(&json.elements)?;
        let lookup = |id: &String| {
            index.get(id).copied().ok_or_else(|| PosetError::UnknownElement(id.clone()))
        };
        let covers = json
            .covers
            .iter()
            .map(|[lo, hi]| Ok((lookup(lo)?, lookup(hi)?)))
            .collect::<Result<Vec<_>, PosetError>>()?;
        Self::from_covers(json.elements.clone(), &covers)
    }

    pub fn from_json_str(text: &str) -> Result<Self, PosetError> {
        let json: PosetJson =
            serde_json::from_str(text).map_err(|e| PosetError::Malformed(e.to_string()))?;
        Self::from_json(&json)
    }
}

fn build_index(ids: &[String]) -> Result<HashMap<String, Elem>, PosetError> {
    let mut index = HashMap::with_capacity(ids.len());
    for (i, id) in ids.iter().enumerate() {
        if index.insert(id.clone(), i).is_some() {
            return Err(PosetError::DuplicateId(id.clone()));
        }
    }
    Ok(index)
}

/// `{"elements": [...], "covers": [[lo, hi], ...]}`; numeric identifiers are read as text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetJson {
    #[serde(deserialize_with = "ident::many")]
    pub elements: Vec<String>,
    #[serde(deserialize_with = "ident::pairs")]
    pub covers: Vec<[String; 2]>,
}

mod ident {
    use serde::{Deserialize, Deserializer};
    use serde_json::Value;

    fn text<E: serde::de::Error>(v: Value) -> Result<String, E> {
        match v {
            Value::String(s) => Ok(s),
            Value::Number(n) => Ok(n.to_string()),
            other => Err(E::custom(format!("identifier must be a string or number, got {other}"))),
        }
    }

    pub fn many<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<String>, D::Error> {
        Vec::<Value>::deserialize(d)?.into_iter().map(text).collect()
    }

    pub fn pairs<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<[String; 2]>, D::Error> {
        Vec::<(Value, Value)>::deserialize(d)?
            .into_iter()
            .map(|(a, b)| Ok([text(a)?, text(b)?]))
            .collect()
    }
}

/// A graded flag meet-semilattice with a minimum, validated once.
#[derive(Clone, Debug)]
pub struct FlagSemilattice<'a> {
    poset: &'a FinitePoset,
    bottom: Elem,
    rank: Vec<usize>,
}

impl FinitePoset {
    /// Validates the hypotheses needed for joins of pairwise upper-bounded families.
    pub fn flag_semilattice(&self) -> Result<FlagSemilattice<'_>, PosetError> {
        let bottom = self
            .minimum()
            .ok_or_else(|| PosetError::Precondition("poset has no minimum".into()))?;
        let rank = self
            .ranks()
            .ok_or_else(|| PosetError::Precondition("poset is not graded".into()))?;
        if !self.is_meet_semilattice(Exec::Sequential) {
            return Err(PosetError::Precondition("poset is not a meet-semilattice".into()));
        }
        if !self.is_flag(Exec::Sequential) {
            return Err(PosetError::Precondition("poset is not flag".into()));
        }
        Ok(FlagSemilattice { poset: self, bottom, rank })
    }
}

impl<'a> FlagSemilattice<'a> {
    pub fn poset(&self) -> &'a FinitePoset {
        self.poset
    }

    pub fn rank(&self, x: Elem) -> usize {
        self.rank[x]
    }

    /// Least upper bound of a pairwise upper-bounded family; `None` when some pair is unbounded.
    ///
    /// Grows a subfamily whose join has strictly increasing rank until every member lies below it.
    pub fn join(&self, family: &[Elem]) -> Result<Option<Elem>, PosetError> {
        let p = self.poset;
        for &x in family {
            p.check(x)?;
        }
        for (i, &x) in family.iter().enumerate() {
            if family[i + 1..].iter().any(|&y| !p.upper_bounded(x, y)) {
                return Ok(None);
            }
        }
        let mut current = self.bottom;
        loop {
            let mut grown = false;
            for &a in family {
                if p.leq(a, current) {
                    continue;
                }
                let next = p.join(current, a).ok_or_else(|| {
                    PosetError::Precondition(format!(
                        "`{}` and `{}` have no join",
                        p.id(current),
                        p.id(a)
                    ))
                })?;
                debug_assert!(self.rank[next] > self.rank[current]);
                current = next;
                grown = true;
            }
            if !grown {
                return Ok(Some(current));
            }
        }
    }
}

/// Join of a family in a graded flag meet-semilattice with minimum.
pub fn family_join(p: &FinitePoset, family: &[Elem]) -> Result<Option<Elem>, PosetError> {
    p.flag_semilattice()?.join(family)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn named(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    fn boolean(n: usize) -> FinitePoset {
        FinitePoset::from_leq(named(1 << n), |x, y| x & y == x).unwrap()
    }

    /// 0 < b, d < a, c < 1 with both middle ranks complete bipartite.
    fn bowtie_poset() -> FinitePoset {
        let ids = ["0", "b", "d", "a", "c", "1"].map(String::from).to_vec();
        let covers = [(0, 1), (0, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 5), (4, 5)];
        FinitePoset::from_covers(ids, &covers).unwrap()
    }

    #[test]
    fn boolean_three_profile() {
        let p = boolean(3);
        let prof = p.analyze();
        assert_eq!(prof.bounded_below, Some(0));
        assert_eq!(prof.bounded_above, Some(7));
        assert!(prof.graded && prof.lattice && prof.flag && prof.meet_semilattice);
        assert_eq!(prof.rank, Some(3));
        assert_eq!(p.find_bowtie().unwrap(), None);
    }

    #[test]
    fn bowtie_poset_profile() {
        let p = bowtie_poset();
        let prof = p.analyze();
        assert!(prof.graded);
        assert_eq!(prof.rank, Some(3));
        assert!(!prof.meet_semilattice);
        assert!(!prof.lattice);
        let bt = p.find_bowtie().unwrap().expect("bowtie");
        let mut lower = [p.id(bt.b), p.id(bt.d)];
        let mut upper = [p.id(bt.a), p.id(bt.c)];
        lower.sort();
        upper.sort();
        assert_eq!(lower, ["b", "d"]);
        assert_eq!(upper, ["a", "c"]);
        assert_eq!(p.bound(1, 2, BoundKind::Join).unwrap(), Bound::Ambiguous(vec![3, 4]));
    }

    #[test]
    fn boolean_meet_and_errors() {
        let p = boolean(3);
        // {1,2} = 0b011, {2,3} = 0b110
        assert_eq!(p.bound(0b011, 0b110, BoundKind::Meet).unwrap(), Bound::Unique(0b010));
        assert_eq!(p.bound(0b011, 0b110, BoundKind::Join).unwrap(), Bound::Unique(0b111));
        assert!(matches!(p.bound(0, 99, BoundKind::Meet), Err(PosetError::UnknownElement(_))));
        assert!(matches!(p.elem("nope"), Err(PosetError::UnknownElement(_))));
    }

    #[test]
    fn missing_bounds() {
        let p = FinitePoset::from_leq(named(2), |x, y| x == y).unwrap();
        assert_eq!(p.bound(0, 1, BoundKind::Meet).unwrap(), Bound::Missing);
        let prof = p.analyze();
        assert!(prof.graded && !prof.meet_semilattice && prof.flag);
        assert_eq!(prof.rank, None);
    }

    #[test]
    fn bowtie_precondition() {
        let antichain = FinitePoset::from_leq(named(2), |x, y| x == y).unwrap();
        assert!(matches!(antichain.find_bowtie(), Err(PosetError::Precondition(_))));
        // 0 < a < b < 1 and 0 < c < 1: bounded, not graded.
        let ids = named(5);
        let p = FinitePoset::from_covers(ids, &[(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)]).unwrap();
        assert!(!p.is_graded());
        assert!(matches!(p.find_bowtie(), Err(PosetError::Precondition(_))));
    }

    #[test]
    fn relation_validation() {
        assert!(matches!(
            FinitePoset::from_leq(named(2), |_, _| true),
            Err(PosetError::NotAntisymmetric(_, _))
        ));
        assert!(matches!(
            FinitePoset::from_leq(named(3), |x, y| x == y || (x, y) == (0, 1) || (x, y) == (1, 2)),
            Err(PosetError::NotTransitive(_, _, _))
        ));
        assert!(matches!(
            FinitePoset::from_covers(named(2), &[(0, 1), (1, 0)]),
            Err(PosetError::NotAntisymmetric(_, _))
        ));
        assert!(matches!(
            FinitePoset::from_covers(vec!["a".into(), "a".into()], &[]),
            Err(PosetError::DuplicateId(_))
        ));
    }

    #[test]
    fn flag_counterexample() {
        // 0 < x, y, z; xy above x, y; yz above y, z; xz above x, z.
        let ids = ["0", "x", "y", "z", "xy", "yz", "xz"].map(String::from).to_vec();
        let covers = [(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (2, 5), (3, 5), (1, 6), (3, 6)];
        let p = FinitePoset::from_covers(ids, &covers).unwrap();
        let prof = p.analyze();
        assert!(!prof.flag);
        assert!(prof.meet_semilattice && prof.graded);
        assert_eq!(p.flag_violation(Exec::Sequential), Some((1, 2, 3)));
        assert!(matches!(family_join(&p, &[1, 2]), Err(PosetError::Precondition(_))));
    }

    #[test]
    fn family_join_in_boolean() {
        let p = boolean(3);
        assert_eq!(family_join(&p, &[0b001, 0b010, 0b100]).unwrap(), Some(0b111));
        assert_eq!(family_join(&p, &[]).unwrap(), Some(0));
        assert_eq!(family_join(&p, &[0b011, 0b001]).unwrap(), Some(0b011));
    }

    #[test]
    fn family_join_unbounded_pair() {
        // 0 < x, y with no upper bound: graded flag meet-semilattice.
        let p = FinitePoset::from_covers(named(3), &[(0, 1), (0, 2)]).unwrap();
        assert_eq!(family_join(&p, &[1, 2]).unwrap(), None);
        assert_eq!(family_join(&p, &[1]).unwrap(), Some(1));
    }

    #[test]
    fn interval_family_in_boolean() {
        let p = boolean(3);
        // I(0, {1,2}), I({2}, {1,2,3}), I(0, {2,3})
        let fam = [(0, 0b011), (0b010, 0b111), (0, 0b110)];
        assert_eq!(p.interval_helly_check(&fam).unwrap(), IntervalHelly::Common(0b010));
        assert_eq!(
            p.interval_helly_check(&[(0b001, 0b001), (0b010, 0b111)]).unwrap(),
            IntervalHelly::Disjoint(0, 1)
        );
        assert!(p.interval_helly_check(&[(0b111, 0)]).is_err());
    }

    #[test]
    fn interval_violation_in_non_lattice() {
        let p = bowtie_poset();
        // I(0,a), I(0,c), I(b,1), I(d,1) meet pairwise but not jointly.
        let fam = [(0, 3), (0, 4), (1, 5), (2, 5)];
        assert_eq!(p.interval_helly_check(&fam).unwrap(), IntervalHelly::Violation);
        assert_eq!(
            p.interval_helly_check(&[(1, 3), (2, 4)]).unwrap(),
            IntervalHelly::Disjoint(0, 1)
        );
    }

    #[test]
    fn chains_counts() {
        assert_eq!(boolean(2).maximal_chains(100).unwrap().len(), 2);
        assert_eq!(boolean(3).maximal_chains(100).unwrap().len(), 6);
        assert_eq!(
            boolean(3).maximal_chains(5),
            Err(PosetError::CapExceeded { cap: 5 })
        );
    }

    #[test]
    fn json_round_trip_and_numbers() {
        let p = bowtie_poset();
        let text = serde_json::to_string(&p.to_json()).unwrap();
        let q = FinitePoset::from_json_str(&text).unwrap();
        assert!(p.is_isomorphic(&q));
        let r = FinitePoset::from_json_str(r#"{"elements":[1,2],"covers":[[1,2]]}"#).unwrap();
        assert!(r.leq(r.elem("1").unwrap(), r.elem("2").unwrap()));
        assert!(FinitePoset::from_json_str(r#"{"elements":["a"],"covers":[["a","b"]]}"#).is_err());
    }

    #[test]
    fn isomorphism_checks() {
        let b2 = boolean(2);
        let chain = FinitePoset::from_leq(named(4), |x, y| x <= y).unwrap();
        assert!(!b2.is_isomorphic(&chain));
        assert!(boolean(3).is_isomorphic(&boolean(3).dual()));
        assert!(bowtie_poset().is_isomorphic(&bowtie_poset().dual()));
    }

    #[test]
    fn covers_and_ranks() {
        let p = boolean(3);
        assert_eq!(p.upper_covers(0), &[1, 2, 4]);
        assert_eq!(p.ranks().unwrap(), vec![0, 1, 1, 2, 1, 2, 2, 3]);
        assert_eq!(p.interval(0b001, 0b111).count_ones(..), 4);
    }
}
