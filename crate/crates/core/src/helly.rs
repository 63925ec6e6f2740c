//! Graph balls, Helly and clique-Helly checks, epsilon-graphs and
//! coarse injectivity on finite metric samples.

use std::collections::{BTreeMap, HashMap, VecDeque};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Exec;
use crate::poset::FinitePoset;

/// Distances within this slack count as equal in metric samples.
pub const METRIC_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HellyError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("malformed graph: {0}")]
    Malformed(String),
    #[error("enumeration exceeded the cap of {0}")]
    CapExceeded(usize),
    #[error("not a metric: {0}")]
    NotMetric(String),
    #[error("ill-posed family: balls {0} and {1} are too far apart to intersect")]
    IllPosed(usize, usize),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

/// A finite simple undirected graph.
#[derive(Clone, Debug)]
pub struct Graph {
    names: Vec<String>,
    adjacency: Vec<FixedBitSet>,
}

impl Graph {
    pub fn new(names: Vec<String>, edges: &[(usize, usize)]) -> Result<Self, HellyError> {
        let n = names.len();
        let mut seen = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if seen.insert(name.clone(), i).is_some() {
                return Err(HellyError::Malformed(format!("repeated vertex `{name}`")));
            }
        }
        let mut adjacency = vec![FixedBitSet::with_capacity(n); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(HellyError::Malformed(format!("edge ({a}, {b}) out of range")));
            }
            if a == b {
                return Err(HellyError::Malformed(format!("loop at `{}`", names[a])));
            }
            adjacency[a].insert(b);
            adjacency[b].insert(a);
        }
        Ok(Graph { names, adjacency })
    }

    /// Vertices named `0..n`.
    pub fn unnamed(n: usize, edges: &[(usize, usize)]) -> Self {
        Self::new((0..n).map(|i| i.to_string()).collect(), edges).expect("valid edge list")
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::unnamed(n, &edges)
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Self::unnamed(n, &edges)
    }

    /// King's-move graph on a `width x height` grid; vertex `(x, y)` has index `y * width + x`.
    pub fn king_grid(width: usize, height: usize) -> Self {
        let mut edges = Vec::new();
        let idx = |x: usize, y: usize| y * width + x;
        for y in 0..height {
            for x in 0..width {
                for (dx, dy) in [(1i64, 0i64), (0, 1), (1, 1), (1, -1)] {
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    if nx >= 0 && ny >= 0 && (nx as usize) < width && (ny as usize) < height {
                        edges.push((idx(x, y), idx(nx as usize, ny as usize)));
                    }
                }
            }
        }
        let names = (0..height).flat_map(|y| (0..width).map(move |x| format!("({x},{y})"))).collect();
        Self::new(names, &edges).expect("grid edges are valid")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn vertex(&self, name: &str) -> Result<usize, HellyError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| HellyError::UnknownVertex(name.to_string()))
    }

    pub fn neighbours(&self, v: usize) -> &FixedBitSet {
        &self.adjacency[v]
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].contains(b)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|a| self.adjacency[a].ones().filter(move |&b| b > a).map(move |b| (a, b)))
            .collect()
    }

    /// Breadth-first distances from `v`; `None` for unreachable vertices.
    pub fn distances_from(&self, v: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        dist[v] = Some(0);
        let mut queue = VecDeque::from([v]);
        while let Some(x) = queue.pop_front() {
            let d = dist[x].expect("queued vertices are reached");
            for y in self.adjacency[x].ones() {
                if dist[y].is_none() {
                    dist[y] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Closed ball `{w : d(v, w) <= r}`.
    pub fn ball(&self, v: usize, r: usize) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.len());
        for (w, d) in self.distances_from(v).into_iter().enumerate() {
            if d.is_some_and(|d| d <= r) {
                set.insert(w);
            }
        }
        set
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            vertices: self.names.clone(),
            edges: self
                .edges()
                .into_iter()
                .map(|(a, b)| [self.names[a].clone(), self.names[b].clone()])
                .collect(),
        }
    }

    pub fn from_json(json: &GraphJson) -> Result<Self, HellyError> {
        let index: HashMap<&str, usize> =
            json.vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let lookup = |v: &String| {
            index.get(v.as_str()).copied().ok_or_else(|| HellyError::UnknownVertex(v.clone()))
        };
        let edges = json
            .edges
            .iter()
            .map(|[a, b]| Ok((lookup(a)?, lookup(b)?)))
            .collect::<Result<Vec<_>, HellyError>>()?;
        Self::new(json.vertices.clone(), &edges)
    }
}

/// `{"vertices": [...], "edges": [[u, v], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
}

/// A ball `B(center, radius)` named by vertex index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Ball {
    pub center: usize,
    pub radius: usize,
}

/// Result of a Helly-type check over a set family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HellyOutcome {
    Pass,
    /// Positions of a pairwise-intersecting subfamily with empty intersection.
    Violation(Vec<usize>),
}

impl HellyOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, HellyOutcome::Pass)
    }
}

/// Maximal cliques by Bron-Kerbosch with pivoting; fails past `cap` cliques.
pub fn maximal_cliques(adjacency: &[FixedBitSet], cap: usize) -> Result<Vec<Vec<usize>>, HellyError> {
    let n = adjacency.len();
    let mut out = Vec::new();
    let mut candidates = FixedBitSet::with_capacity(n);
    candidates.insert_range(..);
    let excluded = FixedBitSet::with_capacity(n);
    extend_clique(adjacency, &mut Vec::new(), candidates, excluded, &mut out, cap)?;
    Ok(out)
}

fn extend_clique(
    adjacency: &[FixedBitSet],
    clique: &mut Vec<usize>,
    mut candidates: FixedBitSet,
    mut excluded: FixedBitSet,
    out: &mut Vec<Vec<usize>>,
    cap: usize,
) -> Result<(), HellyError> {
    if candidates.is_clear() {
        if excluded.is_clear() {
            if out.len() == cap {
                return Err(HellyError::CapExceeded(cap));
            }
            let mut found = clique.clone();
            found.sort_unstable();
            out.push(found);
        }
        return Ok(());
    }
    let pivot = candidates
        .ones()
        .chain(excluded.ones())
        .max_by_key(|&u| adjacency[u].intersection(&candidates).count())
        .expect("candidates are non-empty");
    let branch: Vec<usize> = candidates.difference(&adjacency[pivot]).collect();
    for v in branch {
        clique.push(v);
        extend_clique(
            adjacency,
            clique,
            &candidates & &adjacency[v],
            &excluded & &adjacency[v],
            out,
            cap,
        )?;
        clique.pop();
        candidates.set(v, false);
        excluded.insert(v);
    }
    Ok(())
}

/// Helly property of an arbitrary finite set family over `universe` points.
///
/// Every maximal pairwise-intersecting subfamily must have a common point.
pub fn family_helly(sets: &[FixedBitSet], cap: usize, exec: Exec) -> Result<HellyOutcome, HellyError> {
    // Identical sets never change the verdict.
    let mut representative: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut keep = Vec::new();
    for (i, s) in sets.iter().enumerate() {
        if representative.insert(s.ones().collect(), i).is_none() {
            keep.push(i);
        }
    }
    let k = keep.len();
    let mut meets = vec![FixedBitSet::with_capacity(k); k];
    for a in 0..k {
        for b in a + 1..k {
            if sets[keep[a]].intersection(&sets[keep[b]]).next().is_some() {
                meets[a].insert(b);
                meets[b].insert(a);
            }
        }
    }
    let cliques = maximal_cliques(&meets, cap)?;
    let bad = exec.find_first(&cliques, |clique| {
        let mut common = sets[keep[clique[0]]].clone();
        for &c in &clique[1..] {
            common.intersect_with(&sets[keep[c]]);
        }
        common.is_clear().then(|| clique.iter().map(|&c| keep[c]).collect::<Vec<_>>())
    });
    Ok(match bad {
        Some(mut family) => {
            family.sort_unstable();
            HellyOutcome::Violation(family)
        }
        None => HellyOutcome::Pass,
    })
}

/// Helly property via Berge's triangle criterion: for every three points, the
/// sets containing at least two of them must share a point.
pub fn family_helly_by_triangles(sets: &[FixedBitSet], universe: usize) -> bool {
    for a in 0..universe {
        for b in a + 1..universe {
            for c in b + 1..universe {
                let mut common: Option<FixedBitSet> = None;
                for set in sets {
                    let hits = [a, b, c].iter().filter(|&&p| set.contains(p)).count();
                    if hits >= 2 {
                        match &mut common {
                            None => common = Some(set.clone()),
                            Some(acc) => acc.intersect_with(set),
                        }
                    }
                }
                if common.is_some_and(|c| c.is_clear()) {
                    return false;
                }
            }
        }
    }
    true
}

/// Helly check for a given family of balls.
pub fn helly_check(g: &Graph, family: &[Ball], cap: usize) -> Result<HellyOutcome, HellyError> {
    for b in family {
        if b.center >= g.len() {
            return Err(HellyError::UnknownVertex(format!("#{}", b.center)));
        }
    }
    let sets: Vec<FixedBitSet> = family.iter().map(|b| g.ball(b.center, b.radius)).collect();
    family_helly(&sets, cap, Exec::default())
}

/// All balls with centres in `core` and radii up to `max_radius`.
///
/// The answer speaks for the infinite graph only when every such ball, and the
/// paths realising it, stay clear of the boundary of the finite window `g`.
pub fn helly_check_window(
    g: &Graph,
    core: &[usize],
    max_radius: usize,
    cap: usize,
    exec: Exec,
) -> Result<(Vec<Ball>, HellyOutcome), HellyError> {
    let family: Vec<Ball> = core
        .iter()
        .flat_map(|&c| (0..=max_radius).map(move |r| Ball { center: c, radius: r }))
        .collect();
    let sets = exec.map(&family, |b| g.ball(b.center, b.radius));
    let outcome = family_helly(&sets, cap, exec)?;
    Ok((family, outcome))
}

/// Helly property of the family of maximal cliques of `g`.
pub fn clique_helly_check(g: &Graph, cap: usize) -> Result<HellyOutcome, HellyError> {
    let cliques = maximal_cliques(&g.adjacency, cap)?;
    let sets: Vec<FixedBitSet> = cliques
        .iter()
        .map(|c| {
            let mut s = FixedBitSet::with_capacity(g.len());
            for &v in c {
                s.insert(v);
            }
            s
        })
        .collect();
    family_helly(&sets, cap, Exec::default())
}

/// A finite metric space given by a distance table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    pub names: Vec<String>,
    pub dist: Vec<Vec<f64>>,
}

impl MetricSample {
    /// Validates symmetry, zero diagonal, non-negativity and the triangle inequality.
    pub fn new(names: Vec<String>, dist: Vec<Vec<f64>>) -> Result<Self, HellyError> {
        let n = names.len();
        if dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(HellyError::NotMetric("table is not square".into()));
        }
        for i in 0..n {
            if dist[i][i].abs() > METRIC_TOLERANCE {
                return Err(HellyError::NotMetric(format!("d({0},{0}) != 0", names[i])));
            }
            for j in 0..n {
                let d = dist[i][j];
                if !d.is_finite() || d < 0.0 || (d - dist[j][i]).abs() > METRIC_TOLERANCE {
                    return Err(HellyError::NotMetric(format!(
                        "bad or asymmetric entry between {} and {}",
                        names[i], names[j]
                    )));
                }
                if i != j && d <= METRIC_TOLERANCE {
                    return Err(HellyError::NotMetric(format!(
                        "{} and {} are at distance zero",
                        names[i], names[j]
                    )));
                }
                for k in 0..n {
                    if dist[i][k] > d + dist[j][k] + METRIC_TOLERANCE {
                        return Err(HellyError::NotMetric(format!(
                            "triangle inequality fails for {}, {}, {}",
                            names[i], names[j], names[k]
                        )));
                    }
                }
            }
        }
        Ok(MetricSample { names, dist })
    }

    /// Points in the plane under a norm given as a closure.
    pub fn from_points<F>(points: &[(f64, f64)], norm: F) -> Result<Self, HellyError>
    where
        F: Fn(f64, f64) -> f64,
    {
        let names = points.iter().map(|(x, y)| format!("({x},{y})")).collect();
        let dist = points
            .iter()
            .map(|a| points.iter().map(|b| norm(a.0 - b.0, a.1 - b.1)).collect())
            .collect();
        Self::new(names, dist)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Graph joining points at distance at most `eps`.
pub fn epsilon_graph(m: &MetricSample, eps: f64) -> Result<Graph, HellyError> {
    if !(eps > 0.0) {
        return Err(HellyError::Precondition("epsilon must be positive".into()));
    }
    let n = m.len();
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| m.dist[i][j] <= eps + METRIC_TOLERANCE)
        .collect();
    Graph::new(m.names.clone(), &edges)
}

/// A ball in a metric sample: centre index and real radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricBall {
    pub center: usize,
    pub radius: f64,
}

/// Searches the sample for a point within `radius + eps` of every centre.
///
/// The family must be pairwise compatible: `d(x_i, x_j) <= r_i + r_j`.
pub fn coarse_injectivity_check(
    m: &MetricSample,
    family: &[MetricBall],
    eps: f64,
) -> Result<Option<usize>, HellyError> {
    if eps < 0.0 {
        return Err(HellyError::Precondition("epsilon must be non-negative".into()));
    }
    for (i, a) in family.iter().enumerate() {
        if a.center >= m.len() {
            return Err(HellyError::UnknownVertex(format!("#{}", a.center)));
        }
        if a.radius < 0.0 {
            return Err(HellyError::Precondition("radii must be non-negative".into()));
        }
        for (j, b) in family.iter().enumerate().skip(i + 1) {
            if b.center < m.len() && m.dist[a.center][b.center] > a.radius + b.radius + METRIC_TOLERANCE {
                return Err(HellyError::IllPosed(i, j));
            }
        }
    }
    Ok((0..m.len()).find(|&p| {
        family.iter().all(|b| m.dist[p][b.center] <= b.radius + eps + METRIC_TOLERANCE)
    }))
}

/// Thickening of the order complex of `p`: `x ~ y` when some chain `a <= x, y <= b` exists.
pub fn thickening_from_poset(p: &FinitePoset) -> Graph {
    thickening_from_relation(p.ids().to_vec(), |a, b| p.leq(a, b))
}

/// Thickening of an ordered flag complex given by its comparability-within-a-simplex relation.
///
/// `related(a, b)` must hold exactly when `a <= b` and `{a, b}` spans a simplex
/// (in particular for `a == b`); `x ~ y` when `a, x, y, b` lie in a common simplex
/// with `a` below and `b` above both.
pub fn thickening_from_relation<F>(names: Vec<String>, related: F) -> Graph
where
    F: Fn(usize, usize) -> bool,
{
    let n = names.len();
    let mut above = vec![FixedBitSet::with_capacity(n); n];
    for a in 0..n {
        for b in 0..n {
            if related(a, b) {
                above[a].insert(b);
            }
        }
    }
    let mut below = vec![FixedBitSet::with_capacity(n); n];
    for a in 0..n {
        for b in above[a].ones() {
            below[b].insert(a);
        }
    }
    let mut adjacency = vec![FixedBitSet::with_capacity(n); n];
    for a in 0..n {
        for b in above[a].ones() {
            let between = &above[a] & &below[b];
            for x in between.ones() {
                adjacency[x].union_with(&between);
            }
        }
    }
    for (x, row) in adjacency.iter_mut().enumerate() {
        row.set(x, false);
    }
    Graph { names, adjacency }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{generate, CatalogRecipe, CoxeterGraph};

    fn set(n: usize, items: &[usize]) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(n);
        for &i in items {
            s.insert(i);
        }
        s
    }

    #[test]
    fn six_cycle_balls() {
        let g = Graph::cycle(6);
        let family = [0, 2, 4].map(|c| Ball { center: c, radius: 1 });
        assert_eq!(helly_check(&g, &family, 1000).unwrap(), HellyOutcome::Violation(vec![0, 1, 2]));
        assert!(clique_helly_check(&g, 1000).unwrap().passed());
        let (_, outcome) = helly_check_window(&g, &[0, 1, 2, 3, 4, 5], 2, 1000, Exec::Sequential).unwrap();
        assert!(!outcome.passed());
    }

    #[test]
    fn complete_and_trees() {
        assert!(clique_helly_check(&Graph::complete(5), 100).unwrap().passed());
        let star = Graph::unnamed(5, &[(0, 1), (0, 2), (0, 3), (3, 4)]);
        let all: Vec<usize> = (0..5).collect();
        let (_, outcome) = helly_check_window(&star, &all, 3, 10_000, Exec::Sequential).unwrap();
        assert!(outcome.passed());
    }

    #[test]
    fn king_interior() {
        let g = Graph::king_grid(9, 9);
        let core: Vec<usize> = (3..6).flat_map(|y| (3..6).map(move |x| y * 9 + x)).collect();
        let (family, outcome) = helly_check_window(&g, &core, 1, 100_000, Exec::Sequential).unwrap();
        assert_eq!(family.len(), 18);
        assert!(outcome.passed());
        assert_eq!(g.ball(40, 1).count_ones(..), 9);
    }

    #[test]
    fn cliques_of_small_graphs() {
        let c = maximal_cliques(&Graph::cycle(5).adjacency, 100).unwrap();
        assert_eq!(c.len(), 5);
        let c = maximal_cliques(&Graph::complete(4).adjacency, 100).unwrap();
        assert_eq!(c, vec![vec![0, 1, 2, 3]]);
        assert!(matches!(maximal_cliques(&Graph::cycle(8).adjacency, 3), Err(HellyError::CapExceeded(3))));
    }

    #[test]
    fn triangle_criterion_agrees() {
        let sets = vec![set(3, &[0, 1]), set(3, &[1, 2]), set(3, &[0, 2])];
        assert!(!family_helly_by_triangles(&sets, 3));
        assert!(!family_helly(&sets, 100, Exec::Sequential).unwrap().passed());
        let sets = vec![set(4, &[0, 1, 2]), set(4, &[1, 2, 3]), set(4, &[0, 1, 3])];
        assert!(family_helly_by_triangles(&sets, 4));
        assert!(family_helly(&sets, 100, Exec::Sequential).unwrap().passed());
    }

    #[test]
    fn epsilon_graph_on_a_line() {
        let names: Vec<String> = (0..=10).map(|i| i.to_string()).collect();
        let dist = (0..=10)
            .map(|i| (0..=10).map(|j| (i as f64 - j as f64).abs() / 10.0).collect())
            .collect();
        let m = MetricSample::new(names, dist).unwrap();
        let g = epsilon_graph(&m, 0.1).unwrap();
        assert_eq!(g.edges().len(), 10);
        assert!(g.edges().iter().all(|&(a, b)| b == a + 1));
        assert!(epsilon_graph(&m, 0.0).is_err());
    }

    #[test]
    fn metric_validation() {
        let names = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let bad = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
        assert!(matches!(MetricSample::new(names.clone(), bad), Err(HellyError::NotMetric(_))));
        let asym = vec![vec![0.0, 1.0, 1.0], vec![2.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]];
        assert!(matches!(MetricSample::new(names, asym), Err(HellyError::NotMetric(_))));
    }

    fn grid(step: f64, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        let count = ((hi - lo) / step).round() as i64;
        (0..=count)
            .flat_map(|i| (0..=count).map(move |j| (lo + i as f64 * step, lo + j as f64 * step)))
            .collect()
    }

    #[test]
    fn coarse_injectivity_sup_norm() {
        let pts = grid(0.5, -1.0, 3.0);
        let m = MetricSample::from_points(&pts, |dx, dy| dx.abs().max(dy.abs())).unwrap();
        let find = |p: (f64, f64)| pts.iter().position(|&q| q == p).unwrap();
        let family = [
            MetricBall { center: find((0.0, 0.0)), radius: 1.0 },
            MetricBall { center: find((2.0, 0.0)), radius: 1.0 },
            MetricBall { center: find((1.0, 2.0)), radius: 1.0 },
        ];
        let witness = coarse_injectivity_check(&m, &family, 0.0).unwrap();
        assert_eq!(witness.map(|w| pts[w]), Some((1.0, 1.0)));
        let far = [family[0], MetricBall { center: find((3.0, 3.0)), radius: 0.5 }];
        assert!(matches!(coarse_injectivity_check(&m, &far, 0.0), Err(HellyError::IllPosed(0, 1))));
    }

    #[test]
    fn coarse_injectivity_euclidean_disks() {
        // Pairwise tangent unit disks: the centroid is 2/sqrt(3) away from each centre.
        let h = 3f64.sqrt();
        let mut pts = grid(0.25, -1.0, 3.0);
        pts.push((1.0, h));
        let m = MetricSample::from_points(&pts, |dx, dy| dx.hypot(dy)).unwrap();
        let family: Vec<MetricBall> = [(0.0, 0.0), (2.0, 0.0), (1.0, h)]
            .iter()
            .map(|c| MetricBall { center: pts.iter().position(|p| p == c).unwrap(), radius: 1.0 })
            .collect();
        assert_eq!(coarse_injectivity_check(&m, &family, 0.0).unwrap(), None);
        assert!(coarse_injectivity_check(&m, &family, 0.3).unwrap().is_some());
    }

    #[test]
    fn poset_thickenings() {
        let b3 = generate(&CatalogRecipe::Boolean { n: 3 }).unwrap();
        let t = thickening_from_poset(&b3);
        assert_eq!(t.edges().len(), 8 * 7 / 2);
        let path = generate(&CatalogRecipe::FcLocal {
            graph: CoxeterGraph::right_angled(3, &[(0, 1), (1, 2)]),
        })
        .unwrap();
        let t = thickening_from_poset(&path);
        let (s, tt, u) = (path.elem("s0").unwrap(), path.elem("s1").unwrap(), path.elem("s2").unwrap());
        assert!(t.adjacent(s, tt));
        assert!(!t.adjacent(s, u));
    }

    #[test]
    fn graph_json_round_trip() {
        let g = Graph::cycle(4);
        let json = g.to_json();
        let h = Graph::from_json(&json).unwrap();
        assert_eq!(h.edges(), g.edges());
        let bad = GraphJson { vertices: vec!["a".into()], edges: vec![["a".into(), "b".into()]] };
        assert!(matches!(Graph::from_json(&bad), Err(HellyError::UnknownVertex(_))));
    }
}
