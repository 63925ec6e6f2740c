//! Generators for the standard families of finite posets.

use std::collections::{BTreeSet, HashSet};

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poset::{FinitePoset, PosetError};

/// Largest poset a generator will build unless told otherwise.
pub const DEFAULT_CAP: usize = 5000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("poset would have {size} elements, above the cap of {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error("graph is not right-angled: {0}")]
    NotRightAngled(String),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// A named family member, `{"kind": ..., "params": {...}}` in JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum CatalogRecipe {
    Boolean { n: usize },
    Partition { n: usize },
    Chain { n: usize },
    Product { left: Box<CatalogRecipe>, right: Box<CatalogRecipe> },
    Dual { of: Box<CatalogRecipe> },
    Subspace { q: usize, n: usize },
    Polar { q: usize, dim: usize },
    WeakOrder { n: usize },
    Noncrossing { n: usize },
    FcLocal { graph: CoxeterGraph },
    RandomGraded { seed: u64, size: usize },
}

/// A Coxeter graph: vertices are generators, edges carry labels (2 when omitted).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoxeterGraph {
    pub vertices: Vec<String>,
    pub edges: Vec<GraphEdge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphEdge {
    Plain(String, String),
    Labeled(String, String, u32),
}

impl CoxeterGraph {
    /// Right-angled graph on `s0, s1, ...` with the given commuting pairs.
    pub fn right_angled(n: usize, edges: &[(usize, usize)]) -> Self {
        let vertices: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
        let edges = edges
            .iter()
            .map(|&(a, b)| GraphEdge::Plain(vertices[a].clone(), vertices[b].clone()))
            .collect();
        CoxeterGraph { vertices, edges }
    }
}

pub fn generate(recipe: &CatalogRecipe) -> Result<FinitePoset, CatalogError> {
    generate_with_cap(recipe, DEFAULT_CAP)
}

pub fn generate_with_cap(recipe: &CatalogRecipe, cap: usize) -> Result<FinitePoset, CatalogError> {
    let poset = match recipe {
        CatalogRecipe::Boolean { n } => boolean(*n, cap)?,
        CatalogRecipe::Partition { n } => partition_lattice(*n, false, cap)?,
        CatalogRecipe::Noncrossing { n } => partition_lattice(*n, true, cap)?,
        CatalogRecipe::Chain { n } => {
            within_cap(n.saturating_add(1), cap)?;
            FinitePoset::from_leq((0..=*n).map(|i| i.to_string()).collect(), |x, y| x <= y)?
        }
        CatalogRecipe::Product { left, right } => {
            let a = generate_with_cap(left, cap)?;
            let b = generate_with_cap(right, cap)?;
            within_cap(a.len().saturating_mul(b.len()), cap)?;
            product(&a, &b)
        }
        CatalogRecipe::Dual { of } => generate_with_cap(of, cap)?.dual(),
        CatalogRecipe::Subspace { q, n } => subspaces(*q, *n, cap)?,
        CatalogRecipe::Polar { q, dim } => polar(*q, *dim, cap)?,
        CatalogRecipe::WeakOrder { n } => weak_order(*n, cap)?,
        CatalogRecipe::FcLocal { graph } => fc_local(graph, cap)?,
        CatalogRecipe::RandomGraded { seed, size } => random_graded(*seed, *size)?,
    };
    within_cap(poset.len(), cap)?;
    Ok(poset)
}

fn within_cap(size: usize, cap: usize) -> Result<(), CatalogError> {
    if size > cap {
        Err(CatalogError::TooLarge { size, cap })
    } else {
        Ok(())
    }
}

fn subset_label(mask: usize, n: usize) -> String {
    let items: Vec<String> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", items.join(","))
}

/// Subsets of `{1..n}`; element index equals the bitmask.
fn boolean(n: usize, cap: usize) -> Result<FinitePoset, CatalogError> {
    if n > 24 {
        return Err(CatalogError::TooLarge { size: usize::MAX, cap });
    }
    within_cap(1 << n, cap)?;
    let ids = (0..1usize << n).map(|m| subset_label(m, n)).collect();
    Ok(FinitePoset::from_leq(ids, |x, y| x & y == x)?)
}

/// Cartesian product with the componentwise order.
pub fn product(a: &FinitePoset, b: &FinitePoset) -> FinitePoset {
    let nb = b.len();
    let ids = a
        .elements()
        .flat_map(|x| b.elements().map(move |y| (x, y)))
        .map(|(x, y)| format!("({},{})", a.id(x), b.id(y)))
        .collect();
    FinitePoset::from_leq(ids, |i, j| a.leq(i / nb, j / nb) && b.leq(i % nb, j % nb))
        .expect("product of partial orders")
}

/// Set partitions of `{1..n}` as block-label vectors in restricted growth form.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    fn grow(n: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        let next_block = current.iter().max().map_or(0, |m| m + 1);
        for b in 0..=next_block {
            current.push(b);
            grow(n, current, out);
            current.pop();
        }
    }
    grow(n, &mut current, &mut out);
    out
}

fn is_noncrossing(blocks: &[usize]) -> bool {
    let n = blocks.len();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    if blocks[a] == blocks[c] && blocks[b] == blocks[d] && blocks[a] != blocks[b] {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn partition_label(blocks: &[usize]) -> String {
    let count = blocks.iter().max().map_or(0, |m| m + 1);
    (0..count)
        .map(|b| {
            blocks
                .iter()
                .enumerate()
                .filter(|&(_, &x)| x == b)
                .map(|(i, _)| (i + 1).to_string())
                .collect::<String>()
        })
        .collect::<Vec<_>>()
        .join("|")
}

fn partition_lattice(n: usize, noncrossing: bool, cap: usize) -> Result<FinitePoset, CatalogError> {
    if n == 0 {
        return Err(CatalogError::InvalidParameter("partitions need n >= 1".into()));
    }
    if n > 12 {
        return Err(CatalogError::TooLarge { size: usize::MAX, cap });
    }
    let mut parts = set_partitions(n);
    if noncrossing {
        parts.retain(|p| is_noncrossing(p));
    }
    within_cap(parts.len(), cap)?;
    parts.sort_by_key(|p| std::cmp::Reverse(p.iter().max().copied()));
    let ids = parts.iter().map(|p| partition_label(p)).collect();
    let refines = |x: &Vec<usize>, y: &Vec<usize>| {
        (0..n).all(|i| (i + 1..n).all(|j| x[i] != x[j] || y[i] == y[j]))
    };
    Ok(FinitePoset::from_leq(ids, |i, j| refines(&parts[i], &parts[j]))?)
}

/// Arithmetic in the fields with 2, 3, 4 and 5 elements.
#[derive(Clone, Debug)]
pub struct FiniteField {
    q: usize,
    add: Vec<Vec<u8>>,
    mul: Vec<Vec<u8>>,
}

impl FiniteField {
    pub fn new(q: usize) -> Result<Self, CatalogError> {
        let (add, mul): (Vec<Vec<u8>>, Vec<Vec<u8>>) = match q {
            2 | 3 | 5 => (
                (0..q).map(|a| (0..q).map(|b| ((a + b) % q) as u8).collect()).collect(),
                (0..q).map(|a| (0..q).map(|b| ((a * b) % q) as u8).collect()).collect(),
            ),
            // Polynomials over F2 modulo x^2 + x + 1, encoded as bit pairs.
            4 => (
                (0..4).map(|a| (0..4).map(|b| (a ^ b) as u8).collect()).collect(),
                (0..4u8)
                    .map(|a| {
                        (0..4u8)
                            .map(|b| {
                                let mut prod = 0u8;
                                for i in 0..2 {
                                    if b >> i & 1 == 1 {
                                        prod ^= a << i;
                                    }
                                }
                                if prod & 0b100 != 0 {
                                    prod ^= 0b111;
                                }
                                prod
                            })
                            .collect()
                    })
                    .collect(),
            ),
            _ => {
                return Err(CatalogError::InvalidParameter(format!(
                    "field size {q} unsupported; use 2, 3, 4 or 5"
                )))
            }
        };
        Ok(FiniteField { q, add, mul })
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize][b as usize]
    }

    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize][b as usize]
    }

    pub fn neg(&self, a: u8) -> u8 {
        (0..self.q as u8).find(|&b| self.add(a, b) == 0).expect("additive inverse")
    }
}

/// A subspace of `F_q^n` given by its reduced row echelon basis.
#[derive(Clone, Debug)]
struct Subspace {
    rows: Vec<Vec<u8>>,
    members: FixedBitSet,
}

fn encode(v: &[u8], q: usize) -> usize {
    v.iter().rev().fold(0, |acc, &c| acc * q + c as usize)
}

fn span(field: &FiniteField, rows: &[Vec<u8>], n: usize) -> FixedBitSet {
    let q = field.order();
    let mut members = FixedBitSet::with_capacity(q.pow(n as u32));
    let k = rows.len();
    for combo in 0..q.pow(k as u32) {
        let mut v = vec![0u8; n];
        let mut c = combo;
        for row in rows {
            let coeff = (c % q) as u8;
            c /= q;
            for (slot, &x) in v.iter_mut().zip(row) {
                *slot = field.add(*slot, field.mul(coeff, x));
            }
        }
        members.insert(encode(&v, q));
    }
    members
}

/// Every subspace of `F_q^n`, enumerated by pivot columns and free entries.
fn all_subspaces(field: &FiniteField, n: usize) -> Vec<Subspace> {
    let q = field.order();
    let mut out = Vec::new();
    for pivots_mask in 0usize..1 << n {
        let pivots: Vec<usize> = (0..n).filter(|i| pivots_mask >> i & 1 == 1).collect();
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &p)| (p + 1..n).filter(|c| !pivots.contains(c)).map(move |c| (r, c)))
            .collect();
        for assignment in 0..q.pow(free.len() as u32) {
            let mut rows = vec![vec![0u8; n]; pivots.len()];
            for (r, &p) in pivots.iter().enumerate() {
                rows[r][p] = 1;
            }
            let mut a = assignment;
            for &(r, c) in &free {
                rows[r][c] = (a % q) as u8;
                a /= q;
            }
            let members = span(field, &rows, n);
            out.push(Subspace { rows, members });
        }
    }
    out.sort_by_key(|s| s.rows.len());
    out
}

fn subspace_label(rows: &[Vec<u8>]) -> String {
    let parts: Vec<String> =
        rows.iter().map(|r| r.iter().map(|d| d.to_string()).collect()).collect();
    format!("<{}>", parts.join(","))
}

fn subspace_poset(spaces: &[Subspace]) -> Result<FinitePoset, CatalogError> {
    let ids = spaces.iter().map(|s| subspace_label(&s.rows)).collect();
    Ok(FinitePoset::from_leq(ids, |i, j| spaces[i].members.is_subset(&spaces[j].members))?)
}

fn subspace_count(q: usize, n: usize) -> usize {
    // Sum of Gaussian binomials.
    let mut total = 0usize;
    for k in 0..=n {
        let mut num = 1u128;
        let mut den = 1u128;
        for i in 0..k {
            num *= (q as u128).pow((n - i) as u32) - 1;
            den *= (q as u128).pow((i + 1) as u32) - 1;
        }
        total = total.saturating_add((num / den).min(usize::MAX as u128) as usize);
    }
    total
}

fn subspaces(q: usize, n: usize, cap: usize) -> Result<FinitePoset, CatalogError> {
    let field = FiniteField::new(q)?;
    if n == 0 {
        return Err(CatalogError::InvalidParameter("subspace lattice needs n >= 1".into()));
    }
    within_cap(subspace_count(q, n), cap)?;
    subspace_poset(&all_subspaces(&field, n))
}

/// Totally isotropic subspaces (including 0) for the form `sum x_i y'_i - y_i x'_i`,
/// coordinates ordered `x_1..x_m, y_1..y_m`.
fn polar(q: usize, dim: usize, cap: usize) -> Result<FinitePoset, CatalogError> {
    let field = FiniteField::new(q)?;
    if dim == 0 || !dim.is_multiple_of(2) {
        return Err(CatalogError::InvalidParameter(format!(
            "polar space dimension must be even and positive, got {dim}"
        )));
    }
    within_cap(subspace_count(q, dim), cap.saturating_mul(4))?;
    let m = dim / 2;
    let form = |v: &[u8], w: &[u8]| {
        (0..m).fold(0u8, |acc, i| {
            let plus = field.mul(v[i], w[m + i]);
            let minus = field.neg(field.mul(v[m + i], w[i]));
            field.add(acc, field.add(plus, minus))
        })
    };
    let mut spaces = all_subspaces(&field, dim);
    spaces.retain(|s| s.rows.iter().all(|a| s.rows.iter().all(|b| form(a, b) == 0)));
    within_cap(spaces.len(), cap)?;
    subspace_poset(&spaces)
}

/// Permutations of `{1..n}` in one-line notation.
fn permutations(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut current: Vec<u8> = (1..=n as u8).collect();
    fn heap(k: usize, a: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, a, out);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            a.swap(j, k - 1);
        }
    }
    heap(n, &mut current, &mut out);
    out.sort_by_key(|p| inversion_pairs(p).len());
    out
}

/// Value pairs `(a, b)`, `a < b`, with `b` left of `a` in one-line notation.
pub fn inversion_pairs(perm: &[u8]) -> BTreeSet<(u8, u8)> {
    let mut inv = BTreeSet::new();
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inv.insert((perm[j], perm[i]));
            }
        }
    }
    inv
}

/// Reduced word built by repeatedly stripping the smallest right descent.
pub fn permutation_word(perm: &[u8]) -> String {
    let mut w = perm.to_vec();
    let mut letters = Vec::new();
    while let Some(i) = (0..w.len().saturating_sub(1)).find(|&i| w[i] > w[i + 1]) {
        w.swap(i, i + 1);
        letters.push(i + 1);
    }
    if letters.is_empty() {
        return "1".into();
    }
    letters.iter().rev().map(|i| format!("s{i}")).collect()
}

/// Applies a word in the simple transpositions to the identity, acting on positions.
pub fn permutation_of_word(n: usize, word: &[usize]) -> Vec<u8> {
    let mut w: Vec<u8> = (1..=n as u8).collect();
    for &i in word {
        w.swap(i - 1, i);
    }
    w
}

fn weak_order(n: usize, cap: usize) -> Result<FinitePoset, CatalogError> {
    if n == 0 {
        return Err(CatalogError::InvalidParameter("weak order needs n >= 1".into()));
    }
    let size = (1..=n).try_fold(1usize, |acc, k| acc.checked_mul(k)).unwrap_or(usize::MAX);
    within_cap(size, cap)?;
    let perms = permutations(n);
    let invs: Vec<_> = perms.iter().map(|p| inversion_pairs(p)).collect();
    let ids = perms.iter().map(|p| permutation_word(p)).collect();
    Ok(FinitePoset::from_leq(ids, |i, j| invs[i].is_subset(&invs[j]))?)
}

/// Local poset of a right-angled Coxeter graph: its cliques ordered by inclusion.
fn fc_local(graph: &CoxeterGraph, cap: usize) -> Result<FinitePoset, CatalogError> {
    let n = graph.vertices.len();
    if n > 20 {
        return Err(CatalogError::TooLarge { size: usize::MAX, cap });
    }
    let mut seen = HashSet::new();
    for v in &graph.vertices {
        if !seen.insert(v.as_str()) {
            return Err(CatalogError::InvalidParameter(format!("repeated vertex `{v}`")));
        }
    }
    let position = |name: &str| {
        graph
            .vertices
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| CatalogError::InvalidParameter(format!("edge uses unknown vertex `{name}`")))
    };
    let mut adjacent = vec![0usize; n];
    for edge in &graph.edges {
        let (a, b, label) = match edge {
            GraphEdge::Plain(a, b) => (a, b, 2),
            GraphEdge::Labeled(a, b, m) => (a, b, *m),
        };
        if label != 2 {
            return Err(CatalogError::NotRightAngled(format!(
                "edge {a}-{b} has label {label}; only commuting (label 2) edges are supported"
            )));
        }
        let (i, j) = (position(a)?, position(b)?);
        if i == j {
            return Err(CatalogError::InvalidParameter(format!("loop at `{a}`")));
        }
        adjacent[i] |= 1 << j;
        adjacent[j] |= 1 << i;
    }
    let is_clique = |mask: usize| {
        (0..n).filter(|i| mask >> i & 1 == 1).all(|i| mask & !(1 << i) & !adjacent[i] == 0)
    };
    let mut cliques: Vec<usize> = (0..1usize << n).filter(|&m| is_clique(m)).collect();
    within_cap(cliques.len(), cap)?;
    cliques.sort_by_key(|m| (m.count_ones(), *m));
    let ids = cliques
        .iter()
        .map(|&m| {
            if m == 0 {
                "1".to_string()
            } else {
                (0..n).filter(|i| m >> i & 1 == 1).map(|i| graph.vertices[i].as_str()).collect()
            }
        })
        .collect();
    Ok(FinitePoset::from_leq(ids, |i, j| cliques[i] & cliques[j] == cliques[i])?)
}

/// Layer sizes (bottom and top included) and the relations between consecutive layers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Layered {
    sizes: Vec<usize>,
    links: Vec<Vec<Vec<bool>>>,
}

impl Layered {
    fn build(&self) -> FinitePoset {
        let mut offsets = vec![0];
        for s in &self.sizes {
            offsets.push(offsets.last().unwrap() + s);
        }
        let total = *offsets.last().unwrap();
        let mut ids = Vec::with_capacity(total);
        for (r, &s) in self.sizes.iter().enumerate() {
            for i in 0..s {
                ids.push(format!("r{r}.{i}"));
            }
        }
        let mut covers = Vec::new();
        for (r, rel) in self.links.iter().enumerate() {
            for (i, row) in rel.iter().enumerate() {
                for (j, &on) in row.iter().enumerate() {
                    if on {
                        covers.push((offsets[r] + i, offsets[r + 1] + j));
                    }
                }
            }
        }
        FinitePoset::from_covers(ids, &covers).expect("layered relation is acyclic")
    }

    fn well_formed(&self) -> bool {
        self.links.iter().all(|rel| {
            rel.iter().all(|row| row.iter().any(|&b| b))
                && (0..rel[0].len()).all(|j| rel.iter().any(|row| row[j]))
        })
    }

    /// Smallest relation encoding over all permutations within each layer.
    fn canonical(&self) -> Vec<bool> {
        let perms: Vec<Vec<Vec<usize>>> = self.sizes.iter().map(|&s| index_permutations(s)).collect();
        let mut choice = vec![0usize; self.sizes.len()];
        let mut best: Option<Vec<bool>> = None;
        loop {
            let mut code = Vec::new();
            for (r, rel) in self.links.iter().enumerate() {
                let (pa, pb) = (&perms[r][choice[r]], &perms[r + 1][choice[r + 1]]);
                for &i in pa {
                    for &j in pb {
                        code.push(rel[i][j]);
                    }
                }
            }
            if best.as_ref().is_none_or(|b| code < *b) {
                best = Some(code);
            }
            let mut r = 0;
            loop {
                if r == choice.len() {
                    return best.unwrap_or_default();
                }
                choice[r] += 1;
                if choice[r] < perms[r].len() {
                    break;
                }
                choice[r] = 0;
                r += 1;
            }
        }
    }
}

fn index_permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in index_permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

fn compositions(total: usize) -> Vec<Vec<usize>> {
    if total == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 1..=total {
        for mut rest in compositions(total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every bounded graded poset with at most `max_size` elements, one per isomorphism class.
pub fn bounded_graded_posets(max_size: usize) -> Vec<FinitePoset> {
    let mut out = Vec::new();
    if max_size >= 1 {
        out.push(FinitePoset::from_covers(vec!["r0.0".into()], &[]).expect("single point"));
    }
    for middle in 0..=max_size.saturating_sub(2) {
        for comp in compositions(middle) {
            let mut sizes = vec![1];
            sizes.extend(&comp);
            sizes.push(1);
            let free_bits: Vec<(usize, usize, usize)> = (1..sizes.len() - 2)
                .flat_map(|r| {
                    let (a, b) = (sizes[r], sizes[r + 1]);
                    (0..a).flat_map(move |i| (0..b).map(move |j| (r, i, j)))
                })
                .collect();
            let mut seen = HashSet::new();
            for assignment in 0u64..1 << free_bits.len() {
                let mut links: Vec<Vec<Vec<bool>>> = (0..sizes.len() - 1)
                    .map(|r| vec![vec![r == 0 || r == sizes.len() - 2; sizes[r + 1]]; sizes[r]])
                    .collect();
                for (bit, &(r, i, j)) in free_bits.iter().enumerate() {
                    links[r][i][j] = assignment >> bit & 1 == 1;
                }
                let layered = Layered { sizes: sizes.clone(), links };
                if layered.well_formed() && seen.insert(layered.canonical()) {
                    out.push(layered.build());
                }
            }
        }
    }
    out
}

/// A seeded bounded graded poset with at most `size` elements (and at least two).
pub fn random_graded(seed: u64, size: usize) -> Result<FinitePoset, CatalogError> {
    if size < 2 {
        return Err(CatalogError::InvalidParameter("random graded posets need size >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut sizes = vec![1];
        let mut budget = size - 2;
        let max_rank = rng.gen_range(1..=5usize);
        while sizes.len() < max_rank && budget > 0 {
            let s = rng.gen_range(1..=budget.min(4));
            sizes.push(s);
            budget -= s;
        }
        sizes.push(1);
        let mut links: Vec<Vec<Vec<bool>>> = (0..sizes.len() - 1)
            .map(|r| {
                (0..sizes[r])
                    .map(|_| (0..sizes[r + 1]).map(|_| rng.gen_bool(0.5)).collect())
                    .collect()
            })
            .collect();
        for r in 0..links.len() {
            let (a, b) = (sizes[r], sizes[r + 1]);
            for i in 0..a {
                if !links[r][i].iter().any(|&x| x) {
                    let j = rng.gen_range(0..b);
                    links[r][i][j] = true;
                }
            }
            for j in 0..b {
                if !(0..a).any(|i| links[r][i][j]) {
                    let i = rng.gen_range(0..a);
                    links[r][i][j] = true;
                }
            }
        }
        let poset = Layered { sizes, links }.build();
        if poset.minimum().is_some() && poset.maximum().is_some() && poset.is_graded() {
            return Ok(poset);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Exec;
    use crate::poset::family_join;

    fn gen(recipe: CatalogRecipe) -> FinitePoset {
        generate(&recipe).unwrap()
    }

    #[test]
    fn boolean_and_chain() {
        let b = gen(CatalogRecipe::Boolean { n: 3 });
        assert_eq!(b.len(), 8);
        assert_eq!(b.id(0b011), "{1,2}");
        let c = gen(CatalogRecipe::Chain { n: 4 });
        assert_eq!(c.analyze().rank, Some(4));
    }

    #[test]
    fn partition_four() {
        let p = gen(CatalogRecipe::Partition { n: 4 });
        assert_eq!(p.len(), 15);
        assert_eq!(p.analyze().rank, Some(3));
        let a = p.elem("12|3|4").unwrap();
        let b = p.elem("1|23|4").unwrap();
        assert_eq!(p.join(a, b), Some(p.elem("123|4").unwrap()));
        assert!(p.analyze().lattice);
    }

    #[test]
    fn noncrossing_four() {
        let p = gen(CatalogRecipe::Noncrossing { n: 4 });
        assert_eq!(p.len(), 14);
        assert!(p.elem("13|24").is_err());
        assert!(p.analyze().lattice);
    }

    #[test]
    fn subspace_counts() {
        assert_eq!(gen(CatalogRecipe::Subspace { q: 2, n: 3 }).len(), 16);
        assert_eq!(gen(CatalogRecipe::Subspace { q: 3, n: 3 }).len(), 28);
        assert_eq!(gen(CatalogRecipe::Subspace { q: 4, n: 2 }).len(), 7);
        assert_eq!(gen(CatalogRecipe::Subspace { q: 2, n: 4 }).len(), 67);
        assert_eq!(subspace_count(5, 2), 8);
        assert!(matches!(
            generate(&CatalogRecipe::Subspace { q: 6, n: 2 }),
            Err(CatalogError::InvalidParameter(_))
        ));
    }

    #[test]
    fn field_of_four() {
        let f = FiniteField::new(4).unwrap();
        for a in 1..4u8 {
            assert!((1..4u8).any(|b| f.mul(a, b) == 1), "{a} invertible");
            for b in 0..4u8 {
                for c in 0..4u8 {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                }
            }
        }
    }

    #[test]
    fn polar_two_four() {
        let p = gen(CatalogRecipe::Polar { q: 2, dim: 4 });
        assert_eq!(p.len(), 31);
        let prof = p.analyze();
        assert!(prof.graded && prof.meet_semilattice && prof.flag);
        assert!(prof.bounded_below.is_some() && prof.bounded_above.is_none());
        let e1 = p.elem("<1000>").unwrap();
        let e2 = p.elem("<0100>").unwrap();
        let e12 = p.elem("<1100>").unwrap();
        let f1 = p.elem("<0010>").unwrap();
        assert_eq!(family_join(&p, &[e1, e2, e12]).unwrap(), Some(p.elem("<1000,0100>").unwrap()));
        assert_eq!(family_join(&p, &[e1, f1]).unwrap(), None);
        assert!(matches!(
            generate(&CatalogRecipe::Polar { q: 2, dim: 3 }),
            Err(CatalogError::InvalidParameter(_))
        ));
    }

    #[test]
    fn polar_point_and_line_counts() {
        // (q^4 - 1)/(q - 1) points and (q^2 + 1)(q + 1) lines.
        for q in [2usize, 3] {
            let p = gen(CatalogRecipe::Polar { q, dim: 4 });
            let ranks = p.ranks().unwrap();
            let points = ranks.iter().filter(|&&r| r == 1).count();
            let lines = ranks.iter().filter(|&&r| r == 2).count();
            assert_eq!(points, (q.pow(4) - 1) / (q - 1));
            assert_eq!(lines, (q * q + 1) * (q + 1));
        }
    }

    #[test]
    fn weak_order_four() {
        let p = gen(CatalogRecipe::WeakOrder { n: 4 });
        assert_eq!(p.len(), 24);
        let top = p.maximum().unwrap();
        assert_eq!(p.id(top), "s1s2s3s1s2s1");
        assert_eq!(permutation_of_word(4, &[1, 2, 3, 1, 2, 1]), vec![4, 3, 2, 1]);
        assert!(p.analyze().lattice);
        assert_eq!(gen(CatalogRecipe::WeakOrder { n: 3 }).maximal_chains(10).unwrap().len(), 2);
    }

    #[test]
    fn words_are_reduced() {
        for perm in permutations(4) {
            let word = permutation_word(&perm);
            let letters: Vec<usize> = if word == "1" {
                vec![]
            } else {
                word.split('s').skip(1).map(|d| d.parse().unwrap()).collect()
            };
            assert_eq!(letters.len(), inversion_pairs(&perm).len());
            assert_eq!(permutation_of_word(4, &letters), perm);
        }
    }

    #[test]
    fn fc_local_examples() {
        let edge = gen(CatalogRecipe::FcLocal { graph: CoxeterGraph::right_angled(2, &[(0, 1)]) });
        assert_eq!(edge.len(), 4);
        let path = gen(CatalogRecipe::FcLocal {
            graph: CoxeterGraph::right_angled(3, &[(0, 1), (1, 2)]),
        });
        assert_eq!(path.len(), 6);
        let prof = path.analyze();
        assert!(prof.meet_semilattice && prof.flag && prof.graded && !prof.lattice);
        let tri = gen(CatalogRecipe::FcLocal {
            graph: CoxeterGraph::right_angled(3, &[(0, 1), (1, 2), (0, 2)]),
        });
        assert_eq!(tri.len(), 8);
        assert!(tri.is_isomorphic(&gen(CatalogRecipe::Boolean { n: 3 })));
    }

    #[test]
    fn fc_local_rejects_labels() {
        let graph = CoxeterGraph {
            vertices: vec!["s".into(), "t".into()],
            edges: vec![GraphEdge::Labeled("s".into(), "t".into(), 3)],
        };
        assert!(matches!(
            generate(&CatalogRecipe::FcLocal { graph }),
            Err(CatalogError::NotRightAngled(_))
        ));
        let json = r#"{"kind":"fc_local","params":{"graph":{"vertices":["s","t","u"],"edges":[["s","t"],["t","u",2]]}}}"#;
        let recipe: CatalogRecipe = serde_json::from_str(json).unwrap();
        assert_eq!(generate(&recipe).unwrap().len(), 6);
    }

    #[test]
    fn fc_local_all_small_graphs() {
        for n in 1..=5usize {
            let pairs: Vec<(usize, usize)> =
                (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
            for mask in 0u32..1 << pairs.len() {
                let edges: Vec<_> =
                    pairs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &e)| e).collect();
                let p = gen(CatalogRecipe::FcLocal { graph: CoxeterGraph::right_angled(n, &edges) });
                let prof = p.analyze_with(Exec::Sequential);
                assert!(prof.graded && prof.meet_semilattice && prof.flag, "n={n} mask={mask}");
            }
        }
    }

    #[test]
    fn product_and_dual() {
        let recipe = CatalogRecipe::Product {
            left: Box::new(CatalogRecipe::Chain { n: 1 }),
            right: Box::new(CatalogRecipe::Chain { n: 1 }),
        };
        let sq = gen(recipe);
        assert!(sq.is_isomorphic(&gen(CatalogRecipe::Boolean { n: 2 })));
        let d = gen(CatalogRecipe::Dual { of: Box::new(CatalogRecipe::Partition { n: 3 }) });
        assert!(d.is_isomorphic(&gen(CatalogRecipe::Partition { n: 3 })));
        let json = serde_json::to_string(&CatalogRecipe::Dual { of: Box::new(CatalogRecipe::Chain { n: 2 }) }).unwrap();
        assert_eq!(json, r#"{"kind":"dual","params":{"of":{"kind":"chain","params":{"n":2}}}}"#);
    }

    #[test]
    fn caps_are_enforced() {
        assert!(matches!(
            generate_with_cap(&CatalogRecipe::Boolean { n: 10 }, 100),
            Err(CatalogError::TooLarge { .. })
        ));
        assert!(matches!(
            generate_with_cap(&CatalogRecipe::WeakOrder { n: 8 }, 1000),
            Err(CatalogError::TooLarge { .. })
        ));
    }

    #[test]
    fn graded_enumeration_is_isomorphism_free() {
        let all = bounded_graded_posets(6);
        for (i, p) in all.iter().enumerate() {
            assert!(p.minimum().is_some() && p.maximum().is_some() && p.is_graded());
            for q in &all[i + 1..] {
                assert!(!p.is_isomorphic(q));
            }
        }
        // Sizes 1..=4: point, 2-chain, 3-chain, 4-chain and the square.
        assert_eq!(bounded_graded_posets(4).len(), 5);
    }

    #[test]
    fn random_graded_is_deterministic() {
        for seed in 0..50 {
            let a = random_graded(seed, 12).unwrap();
            let b = random_graded(seed, 12).unwrap();
            assert!(a.len() <= 12);
            assert_eq!(a.to_json(), b.to_json());
            assert!(a.is_graded());
        }
    }
}
