//! Thin models on `Z^n`: the extended complex of type `Ã_{n-1}` and the complex of type `C̃_n`.
//!
//! In the extended `Ã` complex two vertices are adjacent when they differ by a
//! nonzero 0/1 vector, and the smaller one lies below. In `C̃_n` the vertex `x`
//! has type equal to its number of odd coordinates; the fundamental simplex has
//! vertices `z_a = (0, ..., 0, 1, ..., 1)` with `a` trailing ones, and two
//! vertices are adjacent when a group element carries both onto such vertices.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::helly::{thickening_from_relation, Graph};
use crate::poset::{FinitePoset, PosetError};

pub const MAX_DIMENSION: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    AExtended,
    C,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::AExtended => "a_extended",
            Family::C => "c",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoxeterError {
    #[error("points belong to different families ({0} and {1})")]
    FamilyMismatch(Family, Family),
    #[error("dimension mismatch: {0} and {1}")]
    DimensionMismatch(usize, usize),
    #[error("unsupported dimension {dim} for family {family}")]
    BadDimension { family: Family, dim: usize },
    #[error("no generator {index} for family {family} in dimension {dim}")]
    BadGenerator { family: Family, dim: usize, index: usize },
    #[error(transparent)]
    Poset(#[from] PosetError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub family: Family,
    pub coords: Vec<i64>,
}

impl std::fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn check_dimension(family: Family, dim: usize) -> Result<(), CoxeterError> {
    let low = match family {
        Family::AExtended => 2,
        Family::C => 1,
    };
    if (low..=MAX_DIMENSION).contains(&dim) {
        Ok(())
    } else {
        Err(CoxeterError::BadDimension { family, dim })
    }
}

impl LatticePoint {
    pub fn new(family: Family, coords: Vec<i64>) -> Result<Self, CoxeterError> {
        check_dimension(family, coords.len())?;
        Ok(LatticePoint { family, coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Sum of coordinates.
    pub fn height(&self) -> i64 {
        self.coords.iter().sum()
    }

    /// Building type: height mod `n` for `Ã`, number of odd coordinates for `C̃`.
    pub fn vertex_type(&self) -> usize {
        match self.family {
            Family::AExtended => self.height().rem_euclid(self.dim() as i64) as usize,
            Family::C => self.coords.iter().filter(|x| x.rem_euclid(2) == 1).count(),
        }
    }

    fn with(&self, coords: Vec<i64>) -> LatticePoint {
        LatticePoint { family: self.family, coords }
    }

    fn offset(&self, delta: &[i64]) -> LatticePoint {
        self.with(self.coords.iter().zip(delta).map(|(x, d)| x + d).collect())
    }
}

fn same_space(u: &LatticePoint, v: &LatticePoint) -> Result<(), CoxeterError> {
    if u.family != v.family {
        return Err(CoxeterError::FamilyMismatch(u.family, v.family));
    }
    if u.dim() != v.dim() {
        return Err(CoxeterError::DimensionMismatch(u.dim(), v.dim()));
    }
    check_dimension(u.family, u.dim())
}

/// `v - u` in `{0,1}^n`, nonzero.
fn box_below(u: &LatticePoint, v: &LatticePoint) -> bool {
    let mut any = false;
    for (a, b) in u.coords.iter().zip(&v.coords) {
        match b - a {
            0 => {}
            1 => any = true,
            _ => return false,
        }
    }
    any
}

/// Signed permutations of `0..n` as `(perm, signs)`: `(pi x)_i = sign_i * x_{perm_i}`.
fn signed_permutations(n: usize) -> Vec<(Vec<usize>, Vec<i64>)> {
    let mut perms: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..n {
        perms = perms
            .into_iter()
            .flat_map(|p| {
                let free: Vec<usize> = (0..n).filter(|i| !p.contains(i)).collect();
                free.into_iter().map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect();
    }
    let mut out = Vec::new();
    for p in perms {
        for mask in 0..1u32 << n {
            let signs = (0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            out.push((p.clone(), signs));
        }
    }
    out
}

fn point_group(n: usize) -> &'static [(Vec<usize>, Vec<i64>)] {
    use std::sync::OnceLock;
    static GROUPS: OnceLock<Vec<Vec<(Vec<usize>, Vec<i64>)>>> = OnceLock::new();
    &GROUPS.get_or_init(|| (0..=MAX_DIMENSION).map(signed_permutations).collect())[n]
}

/// Vertex `z_a` of the fundamental simplex of `C̃_n`.
fn fundamental_vertex(n: usize, a: usize) -> Vec<i64> {
    (0..n).map(|i| i64::from(i >= n - a)).collect()
}

/// Index `a` with `x = z_a`, if any.
fn fundamental_index(x: &[i64]) -> Option<usize> {
    let n = x.len();
    let a = x.iter().filter(|&&c| c == 1).count();
    (x == fundamental_vertex(n, a).as_slice()).then_some(a)
}

fn c_adjacent(u: &[i64], v: &[i64]) -> bool {
    if u == v {
        return false;
    }
    let n = u.len();
    for (perm, signs) in point_group(n) {
        let act = |x: &[i64]| -> Vec<i64> { (0..n).map(|i| signs[i] * x[perm[i]]).collect() };
        let (pu, pv) = (act(u), act(v));
        for a in 0..=n {
            let z = fundamental_vertex(n, a);
            let shift: Vec<i64> = z.iter().zip(&pu).map(|(z, p)| z - p).collect();
            if shift.iter().any(|t| t.rem_euclid(2) != 0) {
                continue;
            }
            let image: Vec<i64> = pv.iter().zip(&shift).map(|(p, t)| p + t).collect();
            if fundamental_index(&image).is_some() {
                return true;
            }
        }
    }
    false
}

/// Whether `u` and `v` span an edge.
pub fn adjacent(u: &LatticePoint, v: &LatticePoint) -> Result<bool, CoxeterError> {
    same_space(u, v)?;
    Ok(match u.family {
        Family::AExtended => box_below(u, v) || box_below(v, u),
        Family::C => c_adjacent(&u.coords, &v.coords),
    })
}

/// `Some(Less)` when `u < v`, `None` when incomparable.
pub fn compare(u: &LatticePoint, v: &LatticePoint) -> Result<Option<Ordering>, CoxeterError> {
    same_space(u, v)?;
    if u == v {
        return Ok(Some(Ordering::Equal));
    }
    Ok(match u.family {
        Family::AExtended => {
            if box_below(u, v) {
                Some(Ordering::Less)
            } else if box_below(v, u) {
                Some(Ordering::Greater)
            } else {
                None
            }
        }
        Family::C => {
            if c_adjacent(&u.coords, &v.coords) {
                Some(u.vertex_type().cmp(&v.vertex_type()))
            } else {
                None
            }
        }
    })
}

fn lt(u: &LatticePoint, v: &LatticePoint) -> bool {
    compare(u, v).expect("same space") == Some(Ordering::Less)
}

/// Number of generators: `w_1..w_n` for `Ã`, `s_0..s_n` for `C̃`.
pub fn generator_indices(family: Family, dim: usize) -> std::ops::RangeInclusive<usize> {
    match family {
        Family::AExtended => 1..=dim,
        Family::C => 0..=dim,
    }
}

/// Applies one generator.
///
/// `Ã`: `w_i` swaps coordinates `i, i+1` for `i < n`, and
/// `w_n (x_1, ..., x_n) = (x_n - 1, x_2, ..., x_{n-1}, x_1 + 1)`.
/// `C̃`: `s_0` negates `x_1`, `s_i` swaps `i, i+1`, and `s_n` sends `x_n` to `2 - x_n`.
pub fn apply_generator(x: &LatticePoint, index: usize) -> Result<LatticePoint, CoxeterError> {
    let n = x.dim();
    check_dimension(x.family, n)?;
    if !generator_indices(x.family, n).contains(&index) {
        return Err(CoxeterError::BadGenerator { family: x.family, dim: n, index });
    }
    let mut c = x.coords.clone();
    match (x.family, index) {
        (_, i) if (1..n).contains(&i) => c.swap(i - 1, i),
        (Family::AExtended, _) => {
            let (first, last) = (c[0], c[n - 1]);
            c[0] = last - 1;
            c[n - 1] = first + 1;
        }
        (Family::C, 0) => c[0] = -c[0],
        (Family::C, _) => c[n - 1] = 2 - c[n - 1],
    }
    Ok(x.with(c))
}

/// Applies generators left to right.
pub fn apply_word(x: &LatticePoint, word: &[usize]) -> Result<LatticePoint, CoxeterError> {
    word.iter().try_fold(x.clone(), |acc, &g| apply_generator(&acc, g))
}

/// `Ã`: `x_1 <= ... <= x_n <= x_1 + 1`. `C̃`: `0 <= x_1 <= ... <= x_n <= 1`.
pub fn in_fundamental_domain(x: &LatticePoint) -> bool {
    let c = &x.coords;
    let n = c.len();
    let sorted = c.windows(2).all(|w| w[0] <= w[1]);
    match x.family {
        Family::AExtended => sorted && c[n - 1] <= c[0] + 1,
        Family::C => sorted && c[0] >= 0 && c[n - 1] <= 1,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduction {
    /// Generator indices, applied left to right.
    pub witness: Vec<usize>,
    pub point: LatticePoint,
}

/// Moves `x` into the fundamental domain by reflecting across violated walls.
pub fn reduce_to_fundamental(x: &LatticePoint) -> Result<Reduction, CoxeterError> {
    let n = x.dim();
    check_dimension(x.family, n)?;
    let mut word = Vec::new();
    let mut cur = x.clone();
    loop {
        let c = &cur.coords;
        let next = match x.family {
            Family::AExtended => (0..n - 1)
                .find(|&i| c[i] > c[i + 1])
                .map(|i| i + 1)
                .or_else(|| (c[n - 1] > c[0] + 1).then_some(n)),
            Family::C => {
                if c[0] < 0 {
                    Some(0)
                } else if c[n - 1] > 1 {
                    Some(n)
                } else {
                    (0..n - 1).find(|&i| c[i] > c[i + 1]).map(|i| i + 1)
                }
            }
        };
        match next {
            Some(g) => {
                cur = apply_generator(&cur, g)?;
                word.push(g);
            }
            None => break,
        }
    }
    debug_assert!(in_fundamental_domain(&cur));
    Ok(Reduction { witness: word, point: cur })
}

/// Candidate neighbours: `v + d` for `d` in `{-1,0,1}^n` minus zero.
fn unit_offsets(n: usize) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|d| {
                [-1, 0, 1].into_iter().map(move |s| {
                    let mut e = d.clone();
                    e.push(s);
                    e
                })
            })
            .collect();
    }
    out.retain(|d| d.iter().any(|&s| s != 0));
    out
}

/// All vertices adjacent to `v`, sorted.
pub fn neighbours(v: &LatticePoint) -> Result<Vec<LatticePoint>, CoxeterError> {
    check_dimension(v.family, v.dim())?;
    let mut out: Vec<LatticePoint> = unit_offsets(v.dim())
        .iter()
        .map(|d| v.offset(d))
        .filter(|w| adjacent(v, w).expect("same space"))
        .collect();
    out.sort();
    Ok(out)
}

/// The local poset at a vertex, split by comparison with the centre.
#[derive(Clone, Debug)]
pub struct LocalPoset {
    pub center: LatticePoint,
    pub below: Vec<LatticePoint>,
    pub above: Vec<LatticePoint>,
    /// `below`, the centre and `above`, ordered by the complex.
    pub poset: FinitePoset,
}

fn poset_on(points: &[LatticePoint]) -> Result<FinitePoset, CoxeterError> {
    let ids = points.iter().map(LatticePoint::to_string).collect();
    Ok(FinitePoset::from_leq(ids, |a, b| a == b || lt(&points[a], &points[b]))?)
}

impl LocalPoset {
    /// `below` with the centre on top.
    pub fn lower_half(&self) -> Result<FinitePoset, CoxeterError> {
        let mut points = self.below.clone();
        points.push(self.center.clone());
        poset_on(&points)
    }

    /// `above` with the centre at the bottom.
    pub fn upper_half(&self) -> Result<FinitePoset, CoxeterError> {
        let mut points = vec![self.center.clone()];
        points.extend(self.above.iter().cloned());
        poset_on(&points)
    }

    /// Below/above pairs that are not directly comparable.
    pub fn product_violations(&self) -> Vec<(LatticePoint, LatticePoint)> {
        let mut out = Vec::new();
        for b in &self.below {
            for a in &self.above {
                if !lt(b, a) {
                    out.push((b.clone(), a.clone()));
                }
            }
        }
        out
    }
}

/// `Ã`: the interval `[v, v + (1, ..., 1)]`, whose proper part lists the vertices
/// adjacent to `v` in the non-extended complex. `C̃`: all neighbours of `v`.
pub fn local_poset(v: &LatticePoint) -> Result<LocalPoset, CoxeterError> {
    let n = v.dim();
    check_dimension(v.family, n)?;
    let (below, above) = match v.family {
        Family::AExtended => {
            let mut above: Vec<LatticePoint> =
                (1..1u32 << n).map(|m| v.offset(&(0..n).map(|i| i64::from(m >> i & 1)).collect::<Vec<_>>())).collect();
            above.sort();
            (Vec::new(), above)
        }
        Family::C => {
            let (below, above): (Vec<_>, Vec<_>) =
                neighbours(v)?.into_iter().partition(|w| w.vertex_type() < v.vertex_type());
            (below, above)
        }
    };
    let mut points = below.clone();
    points.push(v.clone());
    points.extend(above.iter().cloned());
    let poset = poset_on(&points)?;
    Ok(LocalPoset { center: v.clone(), below, above, poset })
}

/// Vertices of `[-radius, radius]^n`, sorted.
pub fn window(family: Family, dim: usize, radius: i64) -> Result<Vec<LatticePoint>, CoxeterError> {
    check_dimension(family, dim)?;
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|c| {
                (-radius..=radius).map(move |x| {
                    let mut d = c.clone();
                    d.push(x);
                    d
                })
            })
            .collect();
    }
    Ok(out.into_iter().map(|coords| LatticePoint { family, coords }).collect())
}

/// The order of the `C̃_n` complex restricted to a window.
pub fn window_poset(dim: usize, radius: i64) -> Result<(Vec<LatticePoint>, FinitePoset), CoxeterError> {
    let points = window(Family::C, dim, radius)?;
    let poset = poset_on(&points)?;
    Ok((points, poset))
}

/// Thickening of a window: vertices lying in a common simplex between two comparable vertices.
pub fn window_thickening(family: Family, dim: usize, radius: i64) -> Result<(Vec<LatticePoint>, Graph), CoxeterError> {
    let points = window(family, dim, radius)?;
    let names = points.iter().map(LatticePoint::to_string).collect();
    let graph = thickening_from_relation(names, |a, b| a == b || lt(&points[a], &points[b]));
    Ok((points, graph))
}

/// An affine map `x -> (x_{perm_i} + shift_i)_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct AffinePerm {
    perm: Vec<usize>,
    shift: Vec<i64>,
}

impl AffinePerm {
    fn identity(n: usize) -> Self {
        AffinePerm { perm: (0..n).collect(), shift: vec![0; n] }
    }

    fn apply(&self, x: &[i64]) -> Vec<i64> {
        (0..x.len()).map(|i| x[self.perm[i]] + self.shift[i]).collect()
    }

    /// `self` followed by `next`.
    fn then(&self, next: &AffinePerm) -> AffinePerm {
        let n = self.perm.len();
        AffinePerm {
            perm: (0..n).map(|i| self.perm[next.perm[i]]).collect(),
            shift: (0..n).map(|i| self.shift[next.perm[i]] + next.shift[i]).collect(),
        }
    }
}

/// The generator `w_i` of the `Ã` family as an affine map, read off from [`apply_generator`].
fn a_generator(n: usize, i: usize) -> AffinePerm {
    let zero = LatticePoint { family: Family::AExtended, coords: vec![0; n] };
    let shift = apply_generator(&zero, i).expect("valid generator").coords;
    let probe = LatticePoint { family: Family::AExtended, coords: (0..n as i64).map(|k| k * 1000).collect() };
    let moved = apply_generator(&probe, i).expect("valid generator").coords;
    let perm = moved.iter().zip(&shift).map(|(m, s)| ((m - s) / 1000) as usize).collect();
    AffinePerm { perm, shift }
}

/// Strict order relations of the extended `Ã` complex inside `[-radius, radius]^n`, generated
/// from the vertex chains of the fundamental column and their images under the group.
///
/// The column's vertices `c_{kn+j} = k(1,...,1) + (0,...,0,1,...,1)` (`j` trailing ones)
/// form a line; any `n + 1` consecutive ones span a maximal simplex. Group elements are
/// generated from `w_1..w_n`, keeping those whose translation part stays within `radius + n + 2`.
pub fn a_extended_relations_from_orbits(dim: usize, radius: i64) -> Result<BTreeSet<(Vec<i64>, Vec<i64>)>, CoxeterError> {
    check_dimension(Family::AExtended, dim)?;
    let n = dim;
    let bound = radius + n as i64 + 2;
    let generators: Vec<AffinePerm> = (1..=n).map(|i| a_generator(n, i)).collect();
    let mut seen = HashSet::from([AffinePerm::identity(n)]);
    let mut queue = VecDeque::from([AffinePerm::identity(n)]);
    while let Some(g) = queue.pop_front() {
        for w in &generators {
            let h = g.then(w);
            if h.shift.iter().all(|t| t.abs() <= bound) && seen.insert(h.clone()) {
                queue.push_back(h);
            }
        }
    }
    let column = |p: i64| -> Vec<i64> {
        let (k, j) = (p.div_euclid(n as i64), p.rem_euclid(n as i64) as usize);
        (0..n).map(|i| k + i64::from(i >= n - j)).collect()
    };
    let reach = (n as i64) * (radius + 1) + n as i64;
    let inside = |x: &[i64]| x.iter().all(|c| c.abs() <= radius);
    let mut out = BTreeSet::new();
    for g in &seen {
        for p in -reach..=reach {
            let low = g.apply(&column(p));
            if !inside(&low) {
                continue;
            }
            for q in p + 1..=p + n as i64 {
                let high = g.apply(&column(q));
                if inside(&high) {
                    out.insert((low.clone(), high));
                }
            }
        }
    }
    Ok(out)
}

/// Pairs in the window on which the box criterion and the generated relation disagree.
pub fn a_extended_mismatches(dim: usize, radius: i64) -> Result<Vec<(Vec<i64>, Vec<i64>)>, CoxeterError> {
    let generated = a_extended_relations_from_orbits(dim, radius)?;
    let points = window(Family::AExtended, dim, radius)?;
    let mut out = Vec::new();
    for u in &points {
        for v in &points {
            let key = (u.coords.clone(), v.coords.clone());
            if box_below(u, v) != generated.contains(&key) {
                out.push(key);
            }
        }
    }
    Ok(out)
}

/// Orbit search for the fundamental-domain representative, independent of [`reduce_to_fundamental`].
pub fn orbit_representative(x: &LatticePoint, max_steps: usize) -> Option<LatticePoint> {
    let n = x.dim();
    let mut dist = HashMap::from([(x.clone(), 0usize)]);
    let mut queue = VecDeque::from([x.clone()]);
    while let Some(y) = queue.pop_front() {
        if in_fundamental_domain(&y) {
            return Some(y);
        }
        let d = dist[&y];
        if d == max_steps {
            continue;
        }
        for g in generator_indices(x.family, n) {
            let z = apply_generator(&y, g).ok()?;
            if !dist.contains_key(&z) {
                dist.insert(z.clone(), d + 1);
                queue.push_back(z);
            }
        }
    }
    None
}

/// Walls of the `C̃_n` arrangement: `x_i = k`, and `x_i + x_j = 2k` or `x_i - x_j = 2k`.
/// The `D̃_n` arrangement consists of the second kind only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hyperplane {
    Coordinate { i: usize, k: i64 },
    Sum { i: usize, j: usize, k: i64 },
    Difference { i: usize, j: usize, k: i64 },
}

impl Hyperplane {
    pub fn contains(&self, x: &[Ratio<i64>]) -> bool {
        let int = Ratio::from_integer;
        match *self {
            Hyperplane::Coordinate { i, k } => x[i] == int(k),
            Hyperplane::Sum { i, j, k } => x[i] + x[j] == int(2 * k),
            Hyperplane::Difference { i, j, k } => x[i] - x[j] == int(2 * k),
        }
    }

    pub fn in_d_tilde(&self) -> bool {
        !matches!(self, Hyperplane::Coordinate { .. })
    }
}

/// Vertices grouped by type, as a census of a window.
pub fn type_census(points: &[LatticePoint]) -> BTreeMap<usize, usize> {
    let mut out = BTreeMap::new();
    for p in points {
        *out.entry(p.vertex_type()).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{generate, CatalogRecipe};
    use crate::exec::Exec;
    use crate::helly::{helly_check_window, Graph};

    fn a(c: &[i64]) -> LatticePoint {
        LatticePoint::new(Family::AExtended, c.to_vec()).unwrap()
    }

    fn c(c: &[i64]) -> LatticePoint {
        LatticePoint::new(Family::C, c.to_vec()).unwrap()
    }

    #[test]
    fn comparisons() {
        assert_eq!(compare(&a(&[0, 0, 0]), &a(&[1, 0, 1])).unwrap(), Some(Ordering::Less));
        assert_eq!(compare(&a(&[1, 0, 1]), &a(&[0, 0, 0])).unwrap(), Some(Ordering::Greater));
        assert_eq!(compare(&a(&[0, 0, 0]), &a(&[2, 0, 0])).unwrap(), None);
        assert_eq!(compare(&c(&[0, 0]), &c(&[1, 0])).unwrap(), Some(Ordering::Less));
        assert_eq!(compare(&c(&[1, 0]), &c(&[1, 1])).unwrap(), Some(Ordering::Less));
        assert_eq!(compare(&c(&[0, 0]), &c(&[2, 0])).unwrap(), None);
        assert!(matches!(compare(&a(&[0, 0]), &a(&[0, 0, 0])), Err(CoxeterError::DimensionMismatch(2, 3))));
        assert!(matches!(compare(&a(&[0, 0]), &c(&[0, 0])), Err(CoxeterError::FamilyMismatch(..))));
        assert!(LatticePoint::new(Family::AExtended, vec![0]).is_err());
    }

    #[test]
    fn reductions() {
        let r = reduce_to_fundamental(&a(&[3, 1, 2])).unwrap();
        assert_eq!(r.point, a(&[2, 2, 2]));
        assert_eq!(apply_word(&a(&[3, 1, 2]), &r.witness).unwrap(), r.point);
        let inside = reduce_to_fundamental(&a(&[0, 0, 1])).unwrap();
        assert!(inside.witness.is_empty());
        let r = reduce_to_fundamental(&c(&[-1, 3])).unwrap();
        assert_eq!(r.point, c(&[1, 1]));
        assert_eq!(apply_word(&c(&[-1, 3]), &r.witness).unwrap(), r.point);
    }

    #[test]
    fn reduction_agrees_with_orbit_search() {
        for family in [Family::AExtended, Family::C] {
            for p in window(family, 2, 3).unwrap() {
                let r = reduce_to_fundamental(&p).unwrap();
                assert_eq!(orbit_representative(&p, 40), Some(r.point), "{p}");
            }
        }
    }

    #[test]
    fn box_criterion_matches_orbits() {
        assert!(a_extended_mismatches(2, 3).unwrap().is_empty());
        assert!(a_extended_mismatches(3, 2).unwrap().is_empty());
    }

    #[test]
    fn generators_preserve_order() {
        for (family, dim) in [(Family::AExtended, 2), (Family::AExtended, 3), (Family::C, 1), (Family::C, 2), (Family::C, 3)] {
            let pts = window(family, dim, 3).unwrap();
            for g in generator_indices(family, dim) {
                for u in &pts {
                    let gu = apply_generator(u, g).unwrap();
                    for v in &pts {
                        let gv = apply_generator(v, g).unwrap();
                        assert_eq!(compare(u, v).unwrap(), compare(&gu, &gv).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn adjacent_types_differ() {
        for p in window(Family::C, 3, 1).unwrap() {
            for q in neighbours(&p).unwrap() {
                assert_ne!(p.vertex_type(), q.vertex_type());
            }
        }
        for p in window(Family::AExtended, 3, 1).unwrap() {
            for q in neighbours(&p).unwrap() {
                let step = (q.height() - p.height()).unsigned_abs() as usize;
                assert!((1..=3).contains(&step));
                assert_eq!(p.vertex_type() == q.vertex_type(), step == 3);
            }
        }
    }

    #[test]
    fn a_local_poset_is_boolean() {
        let boolean = generate(&CatalogRecipe::Boolean { n: 3 }).unwrap();
        let local = local_poset(&a(&[0, 1, -1])).unwrap();
        assert_eq!(local.poset.len(), 8);
        assert!(local.poset.is_isomorphic(&boolean));
    }

    #[test]
    fn local_posets_in_windows() {
        for dim in 2..=4 {
            let boolean = generate(&CatalogRecipe::Boolean { n: dim }).unwrap();
            for p in window(Family::AExtended, dim, 1).unwrap() {
                assert!(local_poset(&p).unwrap().poset.is_isomorphic(&boolean), "{p}");
            }
        }
        for dim in 2..=3 {
            for p in window(Family::C, dim, 2).unwrap() {
                let local = local_poset(&p).unwrap();
                assert!(local.product_violations().is_empty(), "{p}");
                let upper = local.upper_half().unwrap();
                let lower = local.lower_half().unwrap().dual();
                for half in [upper, lower] {
                    let profile = half.analyze();
                    assert!(profile.graded && profile.meet_semilattice, "{p}");
                    assert!(half.flag_semilattice().is_ok(), "{p}");
                }
            }
        }
    }

    #[test]
    fn c_local_posets() {
        let origin = local_poset(&c(&[0, 0])).unwrap();
        assert!(origin.below.is_empty());
        let points: Vec<_> = origin.above.iter().filter(|p| p.vertex_type() == 1).cloned().collect();
        let lines: Vec<_> = origin.above.iter().filter(|p| p.vertex_type() == 2).cloned().collect();
        assert_eq!(points, vec![c(&[-1, 0]), c(&[0, -1]), c(&[0, 1]), c(&[1, 0])]);
        assert_eq!(lines, vec![c(&[-1, -1]), c(&[-1, 1]), c(&[1, -1]), c(&[1, 1])]);
        let upper = origin.upper_half().unwrap();
        assert!(upper.flag_semilattice().is_ok());
        assert_eq!(upper.len(), 9);

        let edge = local_poset(&c(&[1, 0])).unwrap();
        assert_eq!(edge.below, vec![c(&[0, 0]), c(&[2, 0])]);
        assert_eq!(edge.above, vec![c(&[1, -1]), c(&[1, 1])]);
        assert!(edge.product_violations().is_empty());
        assert!(edge.lower_half().unwrap().dual().flag_semilattice().is_ok());
    }

    #[test]
    fn a_thickening_is_king_graph() {
        let (points, graph) = window_thickening(Family::AExtended, 2, 2).unwrap();
        let index = |p: &LatticePoint| ((p.coords[1] + 2) * 5 + p.coords[0] + 2) as usize;
        let mut edges: Vec<(usize, usize)> = graph
            .edges()
            .into_iter()
            .map(|(x, y)| {
                let (i, j) = (index(&points[x]), index(&points[y]));
                (i.min(j), i.max(j))
            })
            .collect();
        edges.sort();
        assert_eq!(edges, Graph::king_grid(5, 5).edges());
    }

    #[test]
    fn c_window_thickening_is_helly_inside() {
        let (points, graph) = window_thickening(Family::C, 2, 5).unwrap();
        let (_, poset) = window_poset(2, 5).unwrap();
        assert_eq!(poset.len(), points.len());
        let core: Vec<usize> =
            (0..points.len()).filter(|&i| points[i].coords.iter().all(|x| x.abs() <= 1)).collect();
        let (_, outcome) = helly_check_window(&graph, &core, 1, 1_000_000, Exec::default()).unwrap();
        assert!(outcome.passed());
    }

    #[test]
    fn hyperplanes() {
        let half = Ratio::new(1, 2);
        let x = [half, Ratio::from_integer(3) + half];
        assert!(Hyperplane::Sum { i: 0, j: 1, k: 2 }.contains(&x));
        assert!(!Hyperplane::Coordinate { i: 0, k: 0 }.contains(&x));
        assert!(Hyperplane::Difference { i: 1, j: 0, k: 1 }.contains(&[Ratio::from_integer(0), Ratio::from_integer(2)]));
        assert!(Hyperplane::Difference { i: 1, j: 0, k: 1 }.in_d_tilde());
    }

    #[test]
    fn census() {
        let pts = window(Family::C, 2, 1).unwrap();
        assert_eq!(type_census(&pts), BTreeMap::from([(0, 1), (1, 4), (2, 4)]));
    }
}
