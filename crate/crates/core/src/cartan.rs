//! Finite-type Cartan data, weights, Weyl group combinatorics and reduced
//! words of the longest element.
//!
//! Weights are stored in fundamental-weight coordinates ([`Weight`]) and
//! elements of the root lattice in simple-root coordinates ([`RootVec`]).
//! The invariant form is normalized so that `(alpha_i, alpha_i) = 2 d_i`
//! with `d_i` the symmetrizers, short roots having `d_i = 1`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TypeLetter {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

/// A Cartan type such as `A2` or `B2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TypeLabel {
    pub letter: TypeLetter,
    pub rank: usize,
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.letter, self.rank)
    }
}

impl FromStr for TypeLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let letter = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => TypeLetter::A,
            Some('B') => TypeLetter::B,
            Some('C') => TypeLetter::C,
            Some('D') => TypeLetter::D,
            Some('E') => TypeLetter::E,
            Some('F') => TypeLetter::F,
            Some('G') => TypeLetter::G,
            _ => return Err(Error::Parse(format!("bad Cartan type {s:?}"))),
        };
        let rank = chars.as_str().parse().map_err(|_| Error::Parse(format!("bad Cartan type {s:?}")))?;
        Ok(TypeLabel { letter, rank })
    }
}

/// An integral weight in fundamental-weight coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Weight(pub Vec<i64>);

/// An element of the root lattice in simple-root coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootVec(pub Vec<i64>);

impl Weight {
    pub fn zero(n: usize) -> Self {
        Weight(vec![0; n])
    }

    pub fn fundamental(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        Weight(v)
    }

    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> Weight {
        Weight(self.0.iter().map(|a| a * k).collect())
    }

    /// `self <= other` in the order `mu - lambda in P+`.
    pub fn dominated_by(&self, other: &Weight) -> bool {
        other.sub(self).is_dominant()
    }
}

impl RootVec {
    pub fn zero(n: usize) -> Self {
        RootVec(vec![0; n])
    }

    pub fn simple(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        RootVec(v)
    }

    pub fn add(&self, other: &RootVec) -> RootVec {
        RootVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &RootVec) -> RootVec {
        RootVec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> RootVec {
        RootVec(self.0.iter().map(|a| a * k).collect())
    }

    pub fn is_nonneg(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Sum of the coordinates (`tr` of a homogeneous element).
    pub fn height(&self) -> i64 {
        self.0.iter().sum()
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
    }
}

impl fmt::Display for RootVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
    }
}

/// Parse comma-separated integer coordinates such as `"1,0"`.
pub fn parse_coords(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad coordinate list {s:?}"))))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanData {
    pub label: TypeLabel,
    /// `a_ij = 2 (alpha_i, alpha_j) / (alpha_i, alpha_i)`.
    pub matrix: Vec<Vec<i64>>,
    /// `d_i = (alpha_i, alpha_i) / 2`.
    pub symmetrizers: Vec<i64>,
    /// Smallest `d` with `(P, P)` contained in `(2/d) Z`.
    pub denom: u32,
    positive_roots: Vec<RootVec>,
}

fn edges_of(label: TypeLabel) -> Result<(Vec<(usize, usize)>, Vec<i64>)> {
    use TypeLetter::*;
    let n = label.rank;
    let bad = || Error::UnsupportedType(label.to_string());
    let chain: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    Ok(match label.letter {
        A if n >= 1 => (chain, vec![1; n]),
        B if n >= 2 => {
            let mut d = vec![2; n];
            d[n - 1] = 1;
            (chain, d)
        }
        C if n >= 2 => {
            let mut d = vec![1; n];
            d[n - 1] = 2;
            (chain, d)
        }
        D if n >= 4 => {
            let mut e: Vec<_> = (0..n - 2).map(|i| (i, i + 1)).collect();
            e.push((n - 3, n - 1));
            (e, vec![1; n])
        }
        E if (6..=8).contains(&n) => {
            // Bourbaki numbering: 1-3-4-5-6(-7-8), 2 attached to 4.
            let mut e = vec![(0, 2), (1, 3), (2, 3)];
            for i in 3..n - 1 {
                e.push((i, i + 1));
            }
            (e, vec![1; n])
        }
        F if n == 4 => (chain, vec![2, 2, 1, 1]),
        G if n == 2 => (chain, vec![1, 3]),
        _ => return Err(bad()),
    })
}

impl CartanData {
    /// Build and validate Cartan data for a supported finite type.
    ///
    /// `B_n` has `alpha_n` short (so in `B2` the weight `varpi_2` is
    /// minuscule); `C_n` has `alpha_n` long; `G2` has `alpha_1` short.
    pub fn build(label: TypeLabel) -> Result<Self> {
        let n = label.rank;
        let (edges, d) = edges_of(label)?;
        // symmetrized form b_ij = (alpha_i, alpha_j)
        let mut b = vec![vec![0i64; n]; n];
        for i in 0..n {
            b[i][i] = 2 * d[i];
        }
        for &(i, j) in &edges {
            let v = -d[i].max(d[j]);
            b[i][j] = v;
            b[j][i] = v;
        }
        let mut a = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                if b[i][j] % d[i] != 0 {
                    return Err(Error::UnsupportedType(label.to_string()));
                }
                a[i][j] = b[i][j] / d[i];
            }
        }
        let mut cd = CartanData { label, matrix: a, symmetrizers: d, denom: 1, positive_roots: Vec::new() };
        cd.validate()?;
        cd.denom = cd.compute_denom();
        cd.positive_roots = cd.compute_positive_roots();
        Ok(cd)
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::build(s.parse()?)
    }

    fn validate(&self) -> Result<()> {
        let n = self.rank();
        let bad = || Error::UnsupportedType(self.label.to_string());
        for i in 0..n {
            if self.matrix[i][i] != 2 {
                return Err(bad());
            }
            for j in 0..n {
                if i != j && self.matrix[i][j] > 0 {
                    return Err(bad());
                }
                if self.symmetrizers[i] * self.matrix[i][j] != self.symmetrizers[j] * self.matrix[j][i] {
                    return Err(bad());
                }
            }
        }
        // positive definiteness via leading principal minors of the symmetrized form
        let b: Vec<Vec<Rational64>> = (0..n)
            .map(|i| (0..n).map(|j| Rational64::from_integer(self.form_simple(i, j))).collect())
            .collect();
        for k in 1..=n {
            if det(&b[..k].iter().map(|r| r[..k].to_vec()).collect::<Vec<_>>()) <= Rational64::from_integer(0) {
                return Err(bad());
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.label.rank
    }

    /// `(alpha_i, alpha_j) = d_i a_ij`.
    pub fn form_simple(&self, i: usize, j: usize) -> i64 {
        self.symmetrizers[i] * self.matrix[i][j]
    }

    /// Form on the root lattice (always an integer, even on the diagonal).
    pub fn form_roots(&self, x: &RootVec, y: &RootVec) -> i64 {
        let n = self.rank();
        let mut acc = 0;
        for i in 0..n {
            if x.0[i] == 0 {
                continue;
            }
            for j in 0..n {
                acc += x.0[i] * y.0[j] * self.form_simple(i, j);
            }
        }
        acc
    }

    /// `(lambda, beta)` for a weight and a root-lattice element.
    pub fn form_weight_root(&self, w: &Weight, r: &RootVec) -> i64 {
        (0..self.rank()).map(|j| w.0[j] * r.0[j] * self.symmetrizers[j]).sum()
    }

    /// Simple-root coordinates of a weight (rational in general).
    pub fn weight_to_roots(&self, w: &Weight) -> Vec<Rational64> {
        // alpha_j = sum_i a_ij varpi_i, so varpi-coords = A c with c the root coords.
        let n = self.rank();
        let a: Vec<Vec<Rational64>> = (0..n)
            .map(|i| (0..n).map(|j| Rational64::from_integer(self.matrix[i][j])).collect())
            .collect();
        let rhs: Vec<Rational64> = w.0.iter().map(|&x| Rational64::from_integer(x)).collect();
        solve_rational(a, rhs)
    }

    pub fn root_to_weight(&self, r: &RootVec) -> Weight {
        let n = self.rank();
        Weight((0..n).map(|i| (0..n).map(|j| self.matrix[i][j] * r.0[j]).sum()).collect())
    }

    /// Exact root coordinates of a weight lying in the root lattice.
    pub fn weight_to_rootvec(&self, w: &Weight) -> Option<RootVec> {
        let c = self.weight_to_roots(w);
        c.iter().all(|x| x.is_integer()).then(|| RootVec(c.iter().map(|x| x.to_integer()).collect()))
    }

    /// The invariant form on weights.
    pub fn form_weights(&self, x: &Weight, y: &Weight) -> Rational64 {
        let c = self.weight_to_roots(y);
        (0..self.rank())
            .map(|j| c[j] * Rational64::from_integer(x.0[j] * self.symmetrizers[j]))
            .sum()
    }

    fn compute_denom(&self) -> u32 {
        let n = self.rank();
        let mut d: i64 = 1;
        for i in 0..n {
            for k in 0..n {
                let v = self.form_weights(&Weight::fundamental(n, i), &Weight::fundamental(n, k)) / 2;
                d = d.lcm(v.denom());
            }
        }
        d as u32
    }

    /// `<beta, alpha_i^vee>`.
    pub fn coroot_pairing(&self, r: &RootVec, i: usize) -> i64 {
        (0..self.rank()).map(|j| r.0[j] * self.matrix[i][j]).sum()
    }

    pub fn reflect_root(&self, i: usize, r: &RootVec) -> RootVec {
        let c = self.coroot_pairing(r, i);
        let mut out = r.clone();
        out.0[i] -= c;
        out
    }

    pub fn reflect_weight(&self, i: usize, w: &Weight) -> Weight {
        let c = w.0[i];
        let n = self.rank();
        Weight((0..n).map(|k| w.0[k] - c * self.matrix[k][i]).collect())
    }

    fn compute_positive_roots(&self) -> Vec<RootVec> {
        let n = self.rank();
        let mut seen: BTreeSet<RootVec> = (0..n).map(|i| RootVec::simple(n, i)).collect();
        let mut frontier: Vec<RootVec> = seen.iter().cloned().collect();
        while let Some(r) = frontier.pop() {
            for i in 0..n {
                let s = self.reflect_root(i, &r);
                if s.is_nonneg() && !s.is_zero() && seen.insert(s.clone()) {
                    frontier.push(s);
                }
            }
        }
        let mut v: Vec<RootVec> = seen.into_iter().collect();
        v.sort_by_key(|r| (r.height(), r.clone()));
        v
    }

    pub fn positive_roots(&self) -> &[RootVec] {
        &self.positive_roots
    }

    /// Number of positive roots.
    pub fn num_positive_roots(&self) -> usize {
        self.positive_roots.len()
    }

    pub fn rho(&self) -> Weight {
        Weight(vec![1; self.rank()])
    }

    /// `w lambda` for `w = s_{i_1} ... s_{i_k}` given as a 0-based letter list.
    pub fn act(&self, w: &[usize], lambda: &Weight) -> Weight {
        w.iter().rev().fold(lambda.clone(), |acc, &i| self.reflect_weight(i, &acc))
    }

    pub fn act_root(&self, w: &[usize], r: &RootVec) -> RootVec {
        w.iter().rev().fold(r.clone(), |acc, &i| self.reflect_root(i, &acc))
    }

    pub fn longest_element_action(&self, lambda: &Weight) -> Weight {
        let w0 = self.some_reduced_word_w0();
        self.act(&w0, lambda)
    }

    pub fn element(&self, w: &[usize]) -> WeylElement {
        WeylElement(self.act(w, &self.rho()))
    }

    /// A reduced word for `w`, obtained by peeling left descents.
    pub fn reduced_word_of(&self, w: &WeylElement) -> Vec<usize> {
        let mut v = w.0.clone();
        let mut out = Vec::new();
        while let Some(i) = (0..self.rank()).find(|&i| v.0[i] < 0) {
            out.push(i);
            v = self.reflect_weight(i, &v);
        }
        out
    }

    pub fn length(&self, w: &WeylElement) -> usize {
        self.reduced_word_of(w).len()
    }

    /// All elements of `W`.
    pub fn weyl_elements(&self) -> Vec<WeylElement> {
        let mut seen: HashSet<Weight> = HashSet::new();
        let rho = self.rho();
        seen.insert(rho.clone());
        let mut frontier = vec![rho];
        while let Some(v) = frontier.pop() {
            for i in 0..self.rank() {
                let s = self.reflect_weight(i, &v);
                if seen.insert(s.clone()) {
                    frontier.push(s);
                }
            }
        }
        let mut all: Vec<WeylElement> = seen.into_iter().map(WeylElement).collect();
        all.sort_by_key(|w| (self.length(w), w.0.clone()));
        all
    }

    /// Bruhat order via the subword property.
    pub fn bruhat_leq(&self, w: &WeylElement, w2: &WeylElement) -> bool {
        let word = self.reduced_word_of(w2);
        let lw = self.length(w);
        if lw > word.len() {
            return false;
        }
        let mut reach: HashSet<Weight> = HashSet::new();
        reach.insert(self.rho());
        // elements represented by subwords, built right to left
        for &i in word.iter().rev() {
            let next: Vec<Weight> = reach.iter().map(|v| self.reflect_weight(i, v)).collect();
            reach.extend(next);
        }
        reach.contains(&w.0)
    }

    /// Expand a reduced word of `w_0` by depth-first search.
    pub fn reduced_words_w0(&self) -> Vec<ReducedWord> {
        let n_roots = self.num_positive_roots();
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        self.dfs_words(&mut prefix, n_roots, &mut out);
        out.into_iter().map(|letters| ReducedWord::new(self, letters).expect("dfs yields reduced words")).collect()
    }

    fn dfs_words(&self, prefix: &mut Vec<usize>, target: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == target {
            out.push(prefix.clone());
            return;
        }
        for i in 0..self.rank() {
            let beta = self.act_root(prefix, &RootVec::simple(self.rank(), i));
            if beta.is_nonneg() {
                prefix.push(i);
                self.dfs_words(prefix, target, out);
                prefix.pop();
            }
        }
    }

    pub fn some_reduced_word_w0(&self) -> Vec<usize> {
        let n_roots = self.num_positive_roots();
        let mut prefix = Vec::new();
        while prefix.len() < n_roots {
            let i = (0..self.rank())
                .find(|&i| self.act_root(&prefix, &RootVec::simple(self.rank(), i)).is_nonneg())
                .expect("a length-increasing letter exists below w0");
            prefix.push(i);
        }
        prefix
    }

    /// Whether `letters` is a sink sequence for some orientation of the Dynkin graph.
    pub fn is_quiver_adapted(&self, letters: &[usize]) -> bool {
        let n = self.rank();
        let edges: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| self.matrix[i][j] != 0).collect();
        for mask in 0u64..(1u64 << edges.len()) {
            // orient[e] = true means edge points i -> j (head j)
            let mut orient: Vec<bool> = (0..edges.len()).map(|e| mask >> e & 1 == 1).collect();
            let ok = letters.iter().all(|&v| {
                let sink = edges.iter().zip(&orient).all(|(&(i, j), &fwd)| {
                    if i == v {
                        !fwd
                    } else if j == v {
                        fwd
                    } else {
                        true
                    }
                });
                if sink {
                    for (e, &(i, j)) in edges.iter().enumerate() {
                        if i == v || j == v {
                            orient[e] = !orient[e];
                        }
                    }
                }
                sink
            });
            if ok {
                return true;
            }
        }
        false
    }
}

fn det(m: &[Vec<Rational64>]) -> Rational64 {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = Rational64::from_integer(1);
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| a[r][c] != Rational64::from_integer(0)) else {
            return Rational64::from_integer(0);
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                let v = a[c][k];
                a[r][k] -= f * v;
            }
        }
    }
    d
}

fn solve_rational(mut a: Vec<Vec<Rational64>>, mut b: Vec<Rational64>) -> Vec<Rational64> {
    let n = a.len();
    for c in 0..n {
        let p = (c..n).find(|&r| a[r][c] != Rational64::from_integer(0)).expect("nonsingular Cartan matrix");
        a.swap(p, c);
        b.swap(p, c);
        for r in 0..n {
            if r != c && a[r][c] != Rational64::from_integer(0) {
                let f = a[r][c] / a[c][c];
                for k in 0..n {
                    let v = a[c][k];
                    a[r][k] -= f * v;
                }
                let v = b[c];
                b[r] -= f * v;
            }
        }
    }
    (0..n).map(|i| b[i] / a[i][i]).collect()
}

/// A Weyl group element, identified by its action on `rho`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylElement(pub Weight);

/// A reduced word of `w_0` with its induced sequence of positive roots.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReducedWord {
    /// 0-based node indices.
    pub letters: Vec<usize>,
    pub betas: Vec<RootVec>,
}

impl ReducedWord {
    pub fn new(cartan: &CartanData, letters: Vec<usize>) -> Result<Self> {
        let n = cartan.rank();
        if letters.iter().any(|&i| i >= n) {
            return Err(Error::Parse(format!("letter out of range for {}", cartan.label)));
        }
        let betas = positive_root_sequence(cartan, &letters)?;
        if letters.len() != cartan.num_positive_roots() {
            return Err(Error::NotReducedForW0(format_letters(&letters)));
        }
        Ok(ReducedWord { letters, betas })
    }

    /// Parse a word of 1-based digits such as `"121"`.
    pub fn parse(cartan: &CartanData, s: &str) -> Result<Self> {
        let letters = s
            .trim()
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .filter(|&d| d >= 1)
                    .map(|d| d as usize - 1)
                    .ok_or_else(|| Error::Parse(format!("bad word {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(cartan, letters)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Position (0-based) of a positive root in the sequence.
    pub fn position_of(&self, beta: &RootVec) -> Option<usize> {
        self.betas.iter().position(|b| b == beta)
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_letters(&self.letters))
    }
}

pub fn format_letters(letters: &[usize]) -> String {
    letters.iter().map(|i| char::from_digit(*i as u32 + 1, 10).unwrap_or('?')).collect()
}

/// `beta_s = s_{i_1} ... s_{i_{s-1}} (alpha_{i_s})`; errors if the word is not reduced.
pub fn positive_root_sequence(cartan: &CartanData, letters: &[usize]) -> Result<Vec<RootVec>> {
    let n = cartan.rank();
    let mut out = Vec::with_capacity(letters.len());
    for s in 0..letters.len() {
        let beta = cartan.act_root(&letters[..s], &RootVec::simple(n, letters[s]));
        if !beta.is_nonneg() {
            return Err(Error::NotReduced(format_letters(letters)));
        }
        out.push(beta);
    }
    Ok(out)
}

/// Kostant partition function: number of multisets of positive roots summing to `beta`.
pub fn kostant_partition(cartan: &CartanData, beta: &RootVec) -> u64 {
    fn go(roots: &[RootVec], k: usize, rest: &RootVec, memo: &mut HashMap<(usize, RootVec), u64>) -> u64 {
        if rest.is_zero() {
            return 1;
        }
        if k == roots.len() {
            return 0;
        }
        if let Some(&v) = memo.get(&(k, rest.clone())) {
            return v;
        }
        let mut total = 0;
        let mut r = rest.clone();
        loop {
            total += go(roots, k + 1, &r, memo);
            r = r.sub(&roots[k]);
            if !r.is_nonneg() {
                break;
            }
        }
        memo.insert((k, rest.clone()), total);
        total
    }
    go(cartan.positive_roots(), 0, beta, &mut HashMap::new())
}

/// All nonzero `beta` in `Q+` with height at most `cap`, sorted by height then coordinates.
pub fn weights_up_to_height(n: usize, cap: i64) -> Vec<RootVec> {
    let mut out = Vec::new();
    fn rec(n: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<RootVec>) {
        if cur.len() == n {
            out.push(RootVec(cur.clone()));
            return;
        }
        for v in 0..=left {
            cur.push(v);
            rec(n, left - v, cur, out);
            cur.pop();
        }
    }
    rec(n, cap, &mut Vec::new(), &mut out);
    out.retain(|r| !r.is_zero());
    out.sort_by_key(|r| (r.height(), r.clone()));
    out
}
