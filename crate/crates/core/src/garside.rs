//! The classical Garside structure on the braid group `B_n`, `2 <= n <= 6`.
//!
//! Simple elements are permutations of `{0..n}` in one-line notation. The
//! prefix order on simples is containment of value-inversion sets, and a
//! braid is kept in left normal form `delta^inf * s_1 * ... * s_k`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::catalog::permutation_word;

/// Index of a simple element inside a [`Garside`] table.
pub type Simple = u16;

const MAX_STRANDS: usize = 6;

type Perm = [u8; MAX_STRANDS];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GarsideError {
    #[error("braid groups are supported for 2 <= n <= 6, got {0}")]
    UnsupportedStrands(usize),
    #[error("generator s{index} does not exist in B_{n}")]
    BadGenerator { index: i64, n: usize },
    #[error("cannot parse braid word: {0}")]
    Parse(String),
    #[error("window bounds are not ordered")]
    EmptyWindow,
    #[error("element lies outside the window")]
    OutsideWindow,
    #[error("enumeration exceeded the cap of {0} elements")]
    CapExceeded(usize),
    #[error("graph ball and interval differ ({ball} vs {interval} elements)")]
    BallMismatch { ball: usize, interval: usize },
}

/// A braid in left normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Braid {
    inf: i64,
    factors: Vec<Simple>,
}

impl Braid {
    /// Exponent of the leading power of `delta`.
    pub fn inf(&self) -> i64 {
        self.inf
    }

    /// The proper simple factors after the `delta` power.
    pub fn factors(&self) -> &[Simple] {
        &self.factors
    }

    pub fn canonical_length(&self) -> usize {
        self.factors.len()
    }
}

/// Tables for the simple elements of `B_n`.
#[derive(Clone, Debug)]
pub struct Garside {
    n: usize,
    perms: Vec<Perm>,
    masks: Vec<u32>,
    index: HashMap<Perm, Simple>,
    pair_bit: [[u8; MAX_STRANDS]; MAX_STRANDS],
    identity: Simple,
    delta: Simple,
    /// `perm_length(delta) = n(n-1)/2`
    delta_length: u32,
}

impl Garside {
    pub fn new(n: usize) -> Result<Self, GarsideError> {
        if !(2..=MAX_STRANDS).contains(&n) {
            return Err(GarsideError::UnsupportedStrands(n));
        }
        let mut pair_bit = [[0u8; MAX_STRANDS]; MAX_STRANDS];
        let mut bit = 0;
        for a in 0..n {
            for b in a + 1..n {
                pair_bit[a][b] = bit;
                bit += 1;
            }
        }
        let mut perms = Vec::new();
        let mut current: Vec<u8> = (0..n as u8).collect();
        permute(&mut current, 0, &mut perms);
        let mut g = Garside {
            n,
            perms: Vec::new(),
            masks: Vec::new(),
            index: HashMap::new(),
            pair_bit,
            identity: 0,
            delta: 0,
            delta_length: (n * (n - 1) / 2) as u32,
        };
        perms.sort_by_key(|p| (g.mask_of(p).count_ones(), *p));
        g.masks = perms.iter().map(|p| g.mask_of(p)).collect();
        g.index = perms.iter().enumerate().map(|(i, p)| (*p, i as Simple)).collect();
        g.perms = perms;
        g.delta = (g.perms.len() - 1) as Simple;
        Ok(g)
    }

    pub fn strands(&self) -> usize {
        self.n
    }

    pub fn simples(&self) -> impl Iterator<Item = Simple> {
        0..self.perms.len() as Simple
    }

    pub fn simple_count(&self) -> usize {
        self.perms.len()
    }

    pub fn identity_simple(&self) -> Simple {
        self.identity
    }

    pub fn delta_simple(&self) -> Simple {
        self.delta
    }

    /// The atom `s_i`, `1 <= i < n`.
    pub fn atom(&self, i: usize) -> Simple {
        let mut p = self.perms[self.identity as usize];
        p.swap(i - 1, i);
        self.index[&p]
    }

    fn mask_of(&self, p: &Perm) -> u32 {
        let mut pos = [0usize; MAX_STRANDS];
        for (i, &v) in p[..self.n].iter().enumerate() {
            pos[v as usize] = i;
        }
        let mut m = 0;
        for a in 0..self.n {
            for b in a + 1..self.n {
                if pos[a] > pos[b] {
                    m |= 1 << self.pair_bit[a][b];
                }
            }
        }
        m
    }

    /// Length of a simple as a positive word in the atoms.
    pub fn simple_length(&self, s: Simple) -> u32 {
        self.masks[s as usize].count_ones()
    }

    /// Prefix order on simples: `a` left-divides `b`.
    pub fn simple_leq(&self, a: Simple, b: Simple) -> bool {
        let (ma, mb) = (self.masks[a as usize], self.masks[b as usize]);
        ma & mb == ma
    }

    fn compose(&self, a: Simple, b: Simple) -> Simple {
        let (pa, pb) = (&self.perms[a as usize], &self.perms[b as usize]);
        let mut out = *pa;
        for i in 0..self.n {
            out[i] = pa[pb[i] as usize];
        }
        self.index[&out]
    }

    fn inverse_perm(&self, a: Simple) -> Simple {
        let pa = &self.perms[a as usize];
        let mut out = *pa;
        for i in 0..self.n {
            out[pa[i] as usize] = i as u8;
        }
        self.index[&out]
    }

    /// `a^-1 * delta`.
    pub fn right_complement(&self, a: Simple) -> Simple {
        self.compose(self.inverse_perm(a), self.delta)
    }

    /// `delta * a^-1`.
    pub fn left_complement(&self, a: Simple) -> Simple {
        self.compose(self.delta, self.inverse_perm(a))
    }

    /// Conjugation by `delta`, an involution on simples.
    pub fn flip(&self, a: Simple) -> Simple {
        self.compose(self.compose(self.delta, a), self.delta)
    }

    fn right_atom(&self, a: Simple, i: usize) -> Simple {
        let mut p = self.perms[a as usize];
        p.swap(i - 1, i);
        self.index[&p]
    }

    /// Greatest common prefix of two simples.
    pub fn simple_meet(&self, a: Simple, b: Simple) -> Simple {
        let bound = self.masks[a as usize] & self.masks[b as usize];
        let mut m = self.identity;
        'grow: loop {
            for i in 1..self.n {
                let next = self.right_atom(m, i);
                let mask = self.masks[next as usize];
                if mask.count_ones() > self.masks[m as usize].count_ones() && mask & bound == mask {
                    m = next;
                    continue 'grow;
                }
            }
            return m;
        }
    }

    /// Least common multiple of two simples in the prefix order.
    pub fn simple_join(&self, a: Simple, b: Simple) -> Simple {
        let need = self.masks[a as usize] | self.masks[b as usize];
        let mut m = self.delta;
        'shrink: loop {
            for i in 1..self.n {
                let next = self.right_atom(m, i);
                let mask = self.masks[next as usize];
                if mask.count_ones() < self.masks[m as usize].count_ones() && mask & need == need {
                    m = next;
                    continue 'shrink;
                }
            }
            return m;
        }
    }

    /// One-line notation (values `1..=n`) of a simple.
    pub fn one_line(&self, s: Simple) -> Vec<u8> {
        self.perms[s as usize][..self.n].iter().map(|v| v + 1).collect()
    }

    /// Simple with the given one-line notation (values `1..=n`).
    pub fn simple_from_one_line(&self, one_line: &[u8]) -> Option<Simple> {
        if one_line.len() != self.n {
            return None;
        }
        let mut p: Perm = std::array::from_fn(|i| i as u8);
        for (slot, &v) in p.iter_mut().zip(one_line) {
            *slot = v.checked_sub(1)?;
        }
        self.index.get(&p).copied()
    }

    pub fn identity(&self) -> Braid {
        Braid { inf: 0, factors: Vec::new() }
    }

    pub fn delta_power(&self, k: i64) -> Braid {
        Braid { inf: k, factors: Vec::new() }
    }

    /// The braid of a single simple element.
    pub fn from_simple(&self, s: Simple) -> Braid {
        let mut w = Word::new(self);
        w.push(s);
        w.finish()
    }

    /// Normal form of a word in signed atoms: `i` is `s_i`, `-i` is its inverse.
    pub fn normal_form(&self, word: &[i64]) -> Result<Braid, GarsideError> {
        let mut w = Word::new(self);
        for &letter in word {
            let i = letter.unsigned_abs() as usize;
            if letter == 0 || i >= self.n {
                return Err(GarsideError::BadGenerator { index: letter, n: self.n });
            }
            if letter > 0 {
                w.push(self.atom(i));
            } else {
                w.push_inverse(self.atom(i));
            }
        }
        Ok(w.finish())
    }

    pub fn multiply(&self, a: &Braid, b: &Braid) -> Braid {
        let mut w = Word::new(self);
        w.push_braid(a);
        w.push_braid(b);
        w.finish()
    }

    pub fn inverse(&self, a: &Braid) -> Braid {
        let mut w = Word::new(self);
        w.push_inverse_braid(a);
        w.finish()
    }

    /// `a^-1 * b` without normalizing twice.
    pub fn left_quotient(&self, a: &Braid, b: &Braid) -> Braid {
        let mut w = Word::new(self);
        w.push_inverse_braid(a);
        w.push_braid(b);
        w.finish()
    }

    /// `g * delta^k`.
    pub fn times_delta(&self, g: &Braid, k: i64) -> Braid {
        let mut w = Word::new(self);
        w.push_braid(g);
        w.push_delta(k);
        w.finish()
    }

    /// `delta^-1 * g * delta`.
    pub fn conjugate_by_delta(&self, g: &Braid) -> Braid {
        Braid { inf: g.inf, factors: g.factors.iter().map(|&s| self.flip(s)).collect() }
    }

    /// Prefix order: `g^-1 h` is a positive braid.
    pub fn prefix_leq(&self, g: &Braid, h: &Braid) -> bool {
        self.left_quotient(g, h).inf >= 0
    }

    /// Sum of exponents in any word for the braid; strictly monotone in the prefix order.
    pub fn exponent_sum(&self, g: &Braid) -> i64 {
        g.inf * self.delta_length as i64
            + g.factors.iter().map(|&s| self.simple_length(s) as i64).sum::<i64>()
    }

    /// Whether the adjacent factors are left-weighted.
    pub fn is_left_weighted(&self, a: Simple, b: Simple) -> bool {
        self.simple_meet(self.right_complement(a), b) == self.identity
    }

    /// Elements of the interval `[lo, hi]` in the prefix order, sorted.
    pub fn interval(&self, lo: &Braid, hi: &Braid, cap: usize) -> Result<Vec<Braid>, GarsideError> {
        let gap = self.left_quotient(lo, hi);
        if gap.inf < 0 {
            return Err(GarsideError::EmptyWindow);
        }
        // Walk up from `lo`, tracking the remaining positive quotient to `hi`.
        let mut seen: HashSet<Braid> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(lo.clone());
        queue.push_back((lo.clone(), gap));
        while let Some((x, rest)) = queue.pop_front() {
            if rest.inf == 0 && rest.factors.is_empty() {
                continue;
            }
            let head = if rest.inf > 0 { self.delta } else { rest.factors[0] };
            for i in 1..self.n {
                let a = self.atom(i);
                if !self.simple_leq(a, head) {
                    continue;
                }
                let y = self.multiply(&x, &self.from_simple(a));
                if seen.contains(&y) {
                    continue;
                }
                if seen.len() >= cap {
                    return Err(GarsideError::CapExceeded(cap));
                }
                let mut w = Word::new(self);
                w.push_inverse(a);
                w.push_braid(&rest);
                seen.insert(y.clone());
                queue.push_back((y, w.finish()));
            }
        }
        let mut out: Vec<Braid> = seen.into_iter().collect();
        out.sort();
        Ok(out)
    }

    /// Meet and join of `g` and `h`, found by scanning the window `[lo, hi]`.
    pub fn lattice_ops_window(
        &self,
        g: &Braid,
        h: &Braid,
        lo: &Braid,
        hi: &Braid,
        cap: usize,
    ) -> Result<(Braid, Braid), GarsideError> {
        for x in [g, h] {
            if !self.prefix_leq(lo, x) || !self.prefix_leq(x, hi) {
                return Err(GarsideError::OutsideWindow);
            }
        }
        let window = self.interval(lo, hi, cap)?;
        let lower: Vec<&Braid> =
            window.iter().filter(|z| self.prefix_leq(z, g) && self.prefix_leq(z, h)).collect();
        let upper: Vec<&Braid> =
            window.iter().filter(|z| self.prefix_leq(g, z) && self.prefix_leq(h, z)).collect();
        let meet = lower
            .iter()
            .max_by_key(|z| self.exponent_sum(z))
            .expect("lo is a common lower bound");
        let join = upper
            .iter()
            .min_by_key(|z| self.exponent_sum(z))
            .expect("hi is a common upper bound");
        debug_assert!(lower.iter().all(|z| self.prefix_leq(z, meet)));
        debug_assert!(upper.iter().all(|z| self.prefix_leq(join, z)));
        Ok(((*meet).clone(), (*join).clone()))
    }

    /// Neighbours of `g` in the thickening: `g delta^-1 <= h <= g delta`, `h != g`.
    pub fn thickening_neighbours(&self, g: &Braid) -> Vec<Braid> {
        let lo = self.times_delta(g, -1);
        let hi = self.times_delta(g, 1);
        let mut out = self.interval(&lo, &hi, usize::MAX).expect("g delta^-1 <= g delta");
        out.retain(|h| h != g);
        out
    }

    /// Graph ball of radius `k` about `g` in the thickening, checked against
    /// the interval `[g delta^-k, g delta^k]`.
    pub fn thickening_ball(&self, g: &Braid, k: u32, cap: usize) -> Result<Vec<Braid>, GarsideError> {
        let mut seen: HashSet<Braid> = HashSet::from([g.clone()]);
        let mut frontier = vec![g.clone()];
        for _ in 0..k {
            let mut next = Vec::new();
            for x in &frontier {
                for y in self.thickening_neighbours(x) {
                    if seen.insert(y.clone()) {
                        if seen.len() > cap {
                            return Err(GarsideError::CapExceeded(cap));
                        }
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
        let mut ball: Vec<Braid> = seen.into_iter().collect();
        ball.sort();
        let interval =
            self.interval(&self.times_delta(g, -(k as i64)), &self.times_delta(g, k as i64), cap)?;
        if ball != interval {
            return Err(GarsideError::BallMismatch { ball: ball.len(), interval: interval.len() });
        }
        Ok(ball)
    }

    /// Parses `s1,s2,-s1`; `d` and `-d` stand for `delta` and its inverse.
    pub fn parse(&self, text: &str) -> Result<Braid, GarsideError> {
        let mut w = Word::new(self);
        for token in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (negative, body) = match token.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, token),
            };
            if body == "d" {
                w.push_delta(if negative { -1 } else { 1 });
                continue;
            }
            let index: i64 = body
                .strip_prefix('s')
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| GarsideError::Parse(format!("unexpected token `{token}`")))?;
            if index < 1 || index as usize >= self.n {
                return Err(GarsideError::BadGenerator { index, n: self.n });
            }
            let a = self.atom(index as usize);
            if negative {
                w.push_inverse(a);
            } else {
                w.push(a);
            }
        }
        Ok(w.finish())
    }

    /// Text rendering `d^p | s1s2 . s1`.
    pub fn display<'a>(&'a self, g: &'a Braid) -> impl fmt::Display + 'a {
        struct Show<'a>(&'a Garside, &'a Braid);
        impl fmt::Display for Show<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let body: Vec<String> =
                    self.1.factors.iter().map(|&s| permutation_word(&self.0.one_line(s))).collect();
                write!(f, "d^{} |", self.1.inf)?;
                if !body.is_empty() {
                    write!(f, " {}", body.join(" . "))?;
                }
                Ok(())
            }
        }
        Show(self, g)
    }
}

fn permute(current: &mut Vec<u8>, k: usize, out: &mut Vec<Perm>) {
    if k == current.len() {
        let mut p: Perm = std::array::from_fn(|i| i as u8);
        p[..current.len()].copy_from_slice(current);
        out.push(p);
        return;
    }
    for i in k..current.len() {
        current.swap(k, i);
        permute(current, k + 1, out);
        current.swap(k, i);
    }
}

/// `delta^power * f_1 * ... * f_k` with positive simple factors, not yet normalized.
struct Word<'a> {
    g: &'a Garside,
    power: i64,
    factors: Vec<Simple>,
}

impl<'a> Word<'a> {
    fn new(g: &'a Garside) -> Self {
        Word { g, power: 0, factors: Vec::new() }
    }

    fn push(&mut self, s: Simple) {
        if s != self.g.identity {
            self.factors.push(s);
        }
    }

    /// `X delta^k = delta^k X'` with `X'` conjugated `k` times.
    fn push_delta(&mut self, k: i64) {
        if k % 2 != 0 {
            for f in &mut self.factors {
                *f = self.g.flip(*f);
            }
        }
        self.power += k;
    }

    /// `s^-1 = delta^-1 (delta s^-1)`.
    fn push_inverse(&mut self, s: Simple) {
        self.push_delta(-1);
        self.push(self.g.left_complement(s));
    }

    fn push_braid(&mut self, b: &Braid) {
        self.push_delta(b.inf);
        for &s in &b.factors {
            self.push(s);
        }
    }

    fn push_inverse_braid(&mut self, b: &Braid) {
        for &s in b.factors.iter().rev() {
            self.push_inverse(s);
        }
        self.push_delta(-b.inf);
    }

    /// Left-weights adjacent pairs until stable, then pulls leading `delta`s into the power.
    fn finish(mut self) -> Braid {
        let g = self.g;
        loop {
            let mut changed = false;
            for i in (1..self.factors.len()).rev() {
                let (a, b) = (self.factors[i - 1], self.factors[i]);
                let c = g.simple_meet(g.right_complement(a), b);
                if c != g.identity {
                    self.factors[i - 1] = g.compose(a, c);
                    self.factors[i] = g.compose(g.inverse_perm(c), b);
                    changed = true;
                }
            }
            self.factors.retain(|&f| f != g.identity);
            if !changed {
                break;
            }
        }
        let deltas = self.factors.iter().take_while(|&&f| f == g.delta).count();
        self.factors.drain(..deltas);
        Braid { inf: self.power + deltas as i64, factors: self.factors }
    }
}
