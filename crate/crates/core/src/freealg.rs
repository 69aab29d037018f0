//! The word model of `U_q(n)` and `U_q(n^-)`: word-vectors, the Drinfeld
//! pairing, the involutions `eta` and `sigma`, and per-weight bases of the
//! Serre quotient.
//!
//! An element of the quotient is identified by its pairings against all
//! F-words of its weight; the kernel of the pairing is the Serre ideal.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, RwLock};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cartan::{CartanData, RootVec};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::{phi, qbinom, qfact, LaurentScalar, RationalScalar};

/// A word in the generators, letters 0-based.
pub type Word = Vec<u8>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    E,
    F,
}

/// A finite linear combination of words on one side.
#[derive(Clone, PartialEq, Eq)]
pub struct WordElement {
    pub side: Side,
    terms: BTreeMap<Word, RationalScalar>,
}

pub fn word_weight(n: usize, w: &[u8]) -> RootVec {
    let mut v = vec![0; n];
    for &l in w {
        v[l as usize] += 1;
    }
    RootVec(v)
}

pub fn format_word(w: &[u8]) -> String {
    w.iter().map(|&l| char::from_digit(l as u32 + 1, 10).unwrap_or('?')).collect()
}

pub fn parse_word(s: &str) -> Result<Word> {
    s.chars()
        .map(|c| match c.to_digit(10) {
            Some(d) if d >= 1 => Ok(d as u8 - 1),
            _ => Err(Error::Parse(format!("bad word {s:?}"))),
        })
        .collect()
}

impl WordElement {
    pub fn zero(side: Side) -> Self {
        WordElement { side, terms: BTreeMap::new() }
    }

    pub fn one(side: Side) -> Self {
        Self::word(side, Vec::new())
    }

    pub fn word(side: Side, w: Word) -> Self {
        Self::monomial(side, w, RationalScalar::one())
    }

    pub fn monomial(side: Side, w: Word, c: RationalScalar) -> Self {
        let mut out = Self::zero(side);
        out.add_term(w, &c);
        out
    }

    pub fn generator(side: Side, i: usize) -> Self {
        Self::word(side, vec![i as u8])
    }

    pub fn from_terms<I: IntoIterator<Item = (Word, RationalScalar)>>(side: Side, it: I) -> Self {
        let mut out = Self::zero(side);
        for (w, c) in it {
            out.add_term(w, &c);
        }
        out
    }

    pub fn add_term(&mut self, w: Word, c: &RationalScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c.clone());
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &RationalScalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &[u8]) -> RationalScalar {
        self.terms.get(w).cloned().unwrap_or_else(RationalScalar::zero)
    }

    /// The common weight of all words, if homogeneous and nonzero.
    pub fn weight(&self, n: usize) -> Option<RootVec> {
        let mut it = self.terms.keys().map(|w| word_weight(n, w));
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }

    pub fn is_homogeneous(&self, n: usize) -> bool {
        self.is_zero() || self.weight(n).is_some()
    }

    /// Split into homogeneous components.
    pub fn components(&self, n: usize) -> BTreeMap<RootVec, WordElement> {
        let mut out: BTreeMap<RootVec, WordElement> = BTreeMap::new();
        for (w, c) in &self.terms {
            out.entry(word_weight(n, w)).or_insert_with(|| Self::zero(self.side)).add_term(w.clone(), c);
        }
        out
    }

    pub fn add(&self, other: &WordElement) -> Result<WordElement> {
        self.check_side(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &WordElement) -> Result<WordElement> {
        self.add(&other.scale(&RationalScalar::from_int(-1)))
    }

    pub fn scale(&self, c: &RationalScalar) -> WordElement {
        if c.is_zero() {
            return Self::zero(self.side);
        }
        WordElement { side: self.side, terms: self.terms.iter().map(|(w, x)| (w.clone(), x * c)).collect() }
    }

    fn check_side(&self, other: &WordElement) -> Result<()> {
        if self.side != other.side {
            return Err(Error::Invalid("word elements on different sides".into()));
        }
        Ok(())
    }

    /// Free-algebra (concatenation) product.
    pub fn concat_multiply(&self, other: &WordElement) -> Result<WordElement> {
        self.check_side(other)?;
        let mut out = Self::zero(self.side);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let mut w = a.clone();
                w.extend_from_slice(b);
                out.add_term(w, &(x * y));
            }
        }
        Ok(out)
    }

    /// Bars every coefficient.
    pub fn eta(&self) -> WordElement {
        WordElement { side: self.side, terms: self.terms.iter().map(|(w, c)| (w.clone(), c.bar())).collect() }
    }

    /// Reverses every word.
    pub fn sigma(&self) -> WordElement {
        WordElement {
            side: self.side,
            terms: self.terms.iter().map(|(w, c)| (w.iter().rev().copied().collect(), c.clone())).collect(),
        }
    }

    /// The same words on the other side (`E_i <-> F_i`).
    pub fn flip_side(&self) -> WordElement {
        let side = match self.side {
            Side::E => Side::F,
            Side::F => Side::E,
        };
        WordElement { side, terms: self.terms.clone() }
    }
}

impl fmt::Debug for WordElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for WordElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let side = match self.side {
            Side::E => "E",
            Side::F => "F",
        };
        let parts: Vec<String> =
            self.terms.iter().map(|(w, c)| format!("({c}){side}[{}]", format_word(w))).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
struct WordElementJson {
    side: Side,
    terms: Vec<(String, RationalScalar)>,
}

impl Serialize for WordElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WordElementJson {
            side: self.side,
            terms: self.terms.iter().map(|(w, c)| (format_word(w), c.clone())).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WordElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = WordElementJson::deserialize(d)?;
        let mut out = WordElement::zero(j.side);
        for (w, c) in j.terms {
            out.add_term(parse_word(&w).map_err(D::Error::custom)?, &c);
        }
        Ok(out)
    }
}

/// `sum_{r+s=1-a_ij} (-1)^r E_i^{(r)} E_j E_i^{(s)}` as a word-vector, scaled by
/// `[1-a_ij]_i!` so that the coefficients are Gaussian binomials.
pub fn serre_element(cartan: &CartanData, i: usize, j: usize) -> Result<WordElement> {
    if i == j {
        return Err(Error::Invalid("Serre element needs distinct nodes".into()));
    }
    let di = cartan.symmetrizers[i];
    let top = 1 - cartan.matrix[i][j];
    let mut out = WordElement::zero(Side::E);
    for r in 0..=top {
        let s = top - r;
        let sign = LaurentScalar::from_int(if r % 2 == 0 { 1 } else { -1 });
        let coeff = RationalScalar::from(&sign * &qbinom(top, r, di)?);
        let mut w = vec![i as u8; r as usize];
        w.push(j as u8);
        w.extend(std::iter::repeat_n(i as u8, s as usize));
        out.add_term(w, &coeff);
    }
    Ok(out)
}

/// Dimensions, pivots and coordinate data of one weight space of the quotient.
#[derive(Clone, Debug)]
pub struct WeightSpaceBasis {
    pub beta: RootVec,
    /// All words of weight `beta`, lexicographic.
    pub words: Vec<Word>,
    /// Normalized pairing of E-word `words[r]` with F-word `words[c]`.
    pub gram: Vec<Vec<LaurentScalar>>,
    pub rank: usize,
    /// Indices of the first independent E-words (rows).
    pub pivot_rows: Vec<usize>,
    /// Indices of the first independent F-words (columns).
    pub pivot_cols: Vec<usize>,
    /// Inverse of the square pivot block `gram[pivot_rows][pivot_cols]`.
    block_inv: Matrix,
}

impl WeightSpaceBasis {
    pub fn pivot_words(&self) -> Vec<&Word> {
        self.pivot_rows.iter().map(|&r| &self.words[r]).collect()
    }

    pub fn pivot_f_words(&self) -> Vec<&Word> {
        self.pivot_cols.iter().map(|&c| &self.words[c]).collect()
    }

    /// Coefficients on pivot E-words of the element with the given pairing vector.
    pub fn coords_from_pairings(&self, v: &[RationalScalar]) -> Vec<RationalScalar> {
        // a^T G = v^T  =>  a = (G^{-1})^T v
        (0..self.rank)
            .map(|r| {
                let mut acc = RationalScalar::zero();
                for (c, vc) in v.iter().enumerate() {
                    if !vc.is_zero() && !self.block_inv[c][r].is_zero() {
                        acc += &(vc * &self.block_inv[c][r]);
                    }
                }
                acc
            })
            .collect()
    }
}

fn words_of_weight(beta: &RootVec) -> Vec<Word> {
    let mut out = Vec::new();
    let mut left = beta.0.clone();
    let len = beta.height() as usize;
    let mut cur = Vec::with_capacity(len);
    fn rec(left: &mut Vec<i64>, cur: &mut Word, len: usize, out: &mut Vec<Word>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in 0..left.len() {
            if left[i] > 0 {
                left[i] -= 1;
                cur.push(i as u8);
                rec(left, cur, len, out);
                cur.pop();
                left[i] += 1;
            }
        }
    }
    rec(&mut left, &mut cur, len, &mut out);
    out
}

/// Ambient context for computations in `U_q(n)`: Cartan data, the pairing
/// memo and the per-weight bases of the quotient.
pub struct Algebra {
    pub cartan: CartanData,
    pub height_cap: i64,
    /// `(alpha_i, alpha_j)` cached.
    form: Vec<Vec<i64>>,
    pair_memo: Mutex<HashMap<(Word, Word), LaurentScalar>>,
    bases: RwLock<HashMap<RootVec, Arc<WeightSpaceBasis>>>,
}

pub const DEFAULT_HEIGHT_CAP: i64 = 8;

impl Algebra {
    pub fn new(cartan: CartanData) -> Self {
        Self::with_cap(cartan, DEFAULT_HEIGHT_CAP)
    }

    pub fn with_cap(cartan: CartanData, height_cap: i64) -> Self {
        let n = cartan.rank();
        let form = (0..n).map(|i| (0..n).map(|j| cartan.form_simple(i, j)).collect()).collect();
        Algebra {
            cartan,
            height_cap,
            form,
            pair_memo: Mutex::new(HashMap::new()),
            bases: RwLock::new(HashMap::new()),
        }
    }

    pub fn rank(&self) -> usize {
        self.cartan.rank()
    }

    /// Normalized pairing of an E-word with an F-word, `(E_i, F_i) = 1`.
    ///
    /// Deleting the last letter `j` of the F-word gives
    /// `P(x, y j) = sum_{x_p = j} q^{-(alpha_j, wt(x_{>p}))} P(x without p, y)`.
    pub fn pair_words(&self, x: &[u8], y: &[u8]) -> LaurentScalar {
        if x.len() != y.len() {
            return LaurentScalar::zero();
        }
        if x.is_empty() {
            return LaurentScalar::one();
        }
        let n = self.rank();
        if word_weight(n, x) != word_weight(n, y) {
            return LaurentScalar::zero();
        }
        self.pair_rec(x, y)
    }

    fn pair_rec(&self, x: &[u8], y: &[u8]) -> LaurentScalar {
        if x.len() <= 1 {
            return if x == y { LaurentScalar::one() } else { LaurentScalar::zero() };
        }
        let key = (x.to_vec(), y.to_vec());
        if let Some(v) = self.pair_memo.lock().expect("pairing memo poisoned").get(&key) {
            return v.clone();
        }
        let (&j, rest) = y.split_last().expect("nonempty");
        let mut acc = LaurentScalar::zero();
        let mut exp = 0i64;
        for p in (0..x.len()).rev() {
            if x[p] == j {
                let mut sub = x.to_vec();
                sub.remove(p);
                let v = self.pair_rec(&sub, rest);
                if !v.is_zero() {
                    acc += &v.shift(-exp);
                }
            }
            exp += self.form[j as usize][x[p] as usize];
        }
        self.pair_memo.lock().expect("pairing memo poisoned").insert(key, acc.clone());
        acc
    }

    /// Normalized pairing `(E_i, F_i) = 1`, bilinear in both arguments.
    pub fn pair(&self, x: &WordElement, y: &WordElement) -> Result<RationalScalar> {
        if x.side != Side::E || y.side != Side::F {
            return Err(Error::Invalid("pairing expects an E-element and an F-element".into()));
        }
        let mut acc = RationalScalar::zero();
        for (a, cx) in x.terms() {
            for (b, cy) in y.terms() {
                let v = self.pair_words(a, b);
                if !v.is_zero() {
                    acc += &(&(cx * cy) * &RationalScalar::from(v));
                }
            }
        }
        Ok(acc)
    }

    /// `prod_i (1 - q_i^2)^{m_i}`: ratio between the normalized pairing and
    /// the pairing with `(E_i, F_i) = (1 - q_i^2)^{-1}`.
    pub fn normalization(&self, beta: &RootVec) -> LaurentScalar {
        let mut acc = LaurentScalar::one();
        for (i, &m) in beta.0.iter().enumerate() {
            let qi2 = LaurentScalar::q_pow(2 * self.cartan.symmetrizers[i]);
            acc = &acc * &phi(1, &qi2).expect("nonnegative").pow(m as u32);
        }
        acc
    }

    /// The Drinfeld pairing with `(E_i, F_i) = (1 - q_i^2)^{-1}`.
    pub fn drinfeld_pair(&self, x: &WordElement, y: &WordElement) -> Result<RationalScalar> {
        let n = self.rank();
        let mut acc = RationalScalar::zero();
        for (beta, xc) in x.components(n) {
            let Some(yc) = y.components(n).remove(&beta) else { continue };
            let p = self.pair(&xc, &yc)?;
            acc += &(&p / &RationalScalar::from(self.normalization(&beta)));
        }
        Ok(acc)
    }

    fn check_height(&self, beta: &RootVec) -> Result<()> {
        if beta.height() > self.height_cap {
            return Err(Error::HeightCapExceeded { height: beta.height(), cap: self.height_cap });
        }
        Ok(())
    }

    /// The weight space basis of `U_q(n)_beta` (cached).
    pub fn basis(&self, beta: &RootVec) -> Result<Arc<WeightSpaceBasis>> {
        if !beta.is_nonneg() {
            return Err(Error::Invalid(format!("weight {beta} is not in Q+")));
        }
        self.check_height(beta)?;
        Ok(self.basis_uncapped(beta))
    }

    /// The weight space basis without the height check, for internal
    /// intermediate computations.
    pub(crate) fn basis_uncapped(&self, beta: &RootVec) -> Arc<WeightSpaceBasis> {
        if let Some(b) = self.bases.read().expect("basis cache poisoned").get(beta) {
            return b.clone();
        }
        let b = Arc::new(self.build_basis(beta));
        let mut cache = self.bases.write().expect("basis cache poisoned");
        cache.entry(beta.clone()).or_insert(b).clone()
    }

    fn build_basis(&self, beta: &RootVec) -> WeightSpaceBasis {
        let words = words_of_weight(beta);
        let gram: Vec<Vec<LaurentScalar>> =
            words.iter().map(|x| words.iter().map(|y| self.pair_words(x, y)).collect()).collect();
        let m: Matrix = gram.iter().map(|r| r.iter().cloned().map(RationalScalar::from).collect()).collect();
        let pivot_cols = linalg::pivot_columns(&m);
        let pivot_rows = linalg::pivot_columns(&linalg::transpose(&m));
        let block: Matrix =
            pivot_rows.iter().map(|&r| pivot_cols.iter().map(|&c| m[r][c].clone()).collect()).collect();
        let block_inv = linalg::inverse(&block).expect("pivot block of the Gram matrix is invertible");
        WeightSpaceBasis { beta: beta.clone(), rank: pivot_cols.len(), words, gram, pivot_rows, pivot_cols, block_inv }
    }

    /// Pairings of a homogeneous E-element against the pivot F-words of its weight.
    pub fn pairing_vector(&self, x: &WordElement, beta: &RootVec) -> Result<Vec<RationalScalar>> {
        let b = self.basis(beta)?;
        Ok(b.pivot_f_words()
            .into_iter()
            .map(|y| {
                let mut acc = RationalScalar::zero();
                for (w, c) in x.terms() {
                    let v = self.pair_words(w, y);
                    if !v.is_zero() {
                        acc += &(c * &RationalScalar::from(v));
                    }
                }
                acc
            })
            .collect())
    }

    /// Coordinates of a homogeneous E-element on the pivot words of its weight.
    pub fn reduce(&self, x: &WordElement, beta: &RootVec) -> Result<Vec<RationalScalar>> {
        if x.side != Side::E {
            return Err(Error::Invalid("reduce expects an E-element".into()));
        }
        if let Some(w) = x.weight(self.rank()) {
            if &w != beta {
                return Err(Error::Invalid(format!("element has weight {w}, expected {beta}")));
            }
        }
        let b = self.basis(beta)?;
        let v = self.pairing_vector(x, beta)?;
        Ok(b.coords_from_pairings(&v))
    }

    /// The element with the given pivot coordinates.
    pub fn lift(&self, beta: &RootVec, coords: &[RationalScalar]) -> Result<WordElement> {
        let b = self.basis(beta)?;
        Ok(WordElement::from_terms(
            Side::E,
            b.pivot_words().into_iter().zip(coords).map(|(w, c)| (w.clone(), c.clone())),
        ))
    }

    /// Equality in the quotient `U_q(n)`.
    pub fn equal_in_quotient(&self, x: &WordElement, y: &WordElement) -> Result<bool> {
        let d = x.sub(y)?;
        for (beta, comp) in d.components(self.rank()) {
            if self.pairing_vector(&comp, &beta)?.iter().any(|v| !v.is_zero()) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_zero_in_quotient(&self, x: &WordElement) -> Result<bool> {
        self.equal_in_quotient(x, &WordElement::zero(x.side))
    }

    /// Divided power `E_i^{(m)}` as a word-vector.
    pub fn divided_power(&self, side: Side, i: usize, m: i64) -> Result<WordElement> {
        let f = qfact(m, self.cartan.symmetrizers[i])?;
        Ok(WordElement::monomial(side, vec![i as u8; m as usize], RationalScalar::new(LaurentScalar::one(), f)?))
    }

}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(t: &str) -> Algebra {
        Algebra::new(CartanData::parse(t).unwrap())
    }

    fn e(w: &str) -> WordElement {
        WordElement::word(Side::E, parse_word(w).unwrap())
    }

    fn f(w: &str) -> WordElement {
        WordElement::word(Side::F, parse_word(w).unwrap())
    }

    #[test]
    fn concatenation() {
        let x = e("1").concat_multiply(&e("2")).unwrap();
        assert_eq!(x, e("12"));
        let s = e("1").add(&e("2")).unwrap().concat_multiply(&e("1")).unwrap();
        assert_eq!(s, e("11").add(&e("21")).unwrap());
        assert_eq!(s.concat_multiply(&WordElement::one(Side::E)).unwrap(), s);
        assert!(e("1").concat_multiply(&f("1")).is_err());
    }

    #[test]
    fn involutions() {
        let x = e("12").scale(&RationalScalar::q_pow(1));
        assert_eq!(x.eta(), e("12").scale(&RationalScalar::q_pow(-1)));
        assert_eq!(e("112").sigma(), e("211"));
        let y = x.add(&e("121")).unwrap();
        assert_eq!(y.eta().eta(), y);
        assert_eq!(y.sigma().sigma(), y);
    }

    #[test]
    fn simple_pairings() {
        let a = alg("A2");
        let one_minus_q2 = RationalScalar::from(LaurentScalar::one() - LaurentScalar::q_pow(2));
        assert_eq!(a.drinfeld_pair(&e("1"), &f("1")).unwrap(), one_minus_q2.inv().unwrap());
        assert!(a.drinfeld_pair(&e("1"), &f("2")).unwrap().is_zero());
        assert!(a.pair(&e("1"), &f("1")).unwrap().is_one());
    }

    #[test]
    fn serre_elements() {
        let a = alg("A2");
        let s = serre_element(&a.cartan, 0, 1).unwrap();
        let two = RationalScalar::from(LaurentScalar::q_pow(1) + LaurentScalar::q_pow(-1));
        let expect = e("112").sub(&e("121").scale(&two)).unwrap().add(&e("211")).unwrap();
        assert_eq!(s, expect);
        assert!(serre_element(&a.cartan, 0, 0).is_err());
        let a2 = CartanData::build("A2".parse().unwrap()).unwrap();
        let mut a1a1 = a2.clone();
        a1a1.matrix = vec![vec![2, 0], vec![0, 2]];
        assert_eq!(serre_element(&a1a1, 0, 1).unwrap(), e("21").sub(&e("12")).unwrap());
        for t in ["A2", "B2", "G2", "A3"] {
            let a = alg(t);
            let n = a.rank();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let s = serre_element(&a.cartan, i, j).unwrap();
                        assert!(a.is_zero_in_quotient(&s).unwrap(), "{t} {i} {j}");
                    }
                }
            }
        }
    }

    #[test]
    fn weight_space_ranks() {
        let a = alg("A2");
        let b = a.basis(&RootVec(vec![1, 1])).unwrap();
        assert_eq!(b.rank, 2);
        assert_eq!(b.words.len(), 2);
        let b = a.basis(&RootVec(vec![2, 1])).unwrap();
        assert_eq!(b.rank, 2);
        assert_eq!(b.words.len(), 3);
        assert_eq!(a.basis(&RootVec(vec![1, 0])).unwrap().rank, 1);
        assert!(matches!(a.basis(&RootVec(vec![5, 4])), Err(Error::HeightCapExceeded { .. })));
    }

    #[test]
    fn reduce_and_lift() {
        let a = alg("A2");
        let beta = RootVec(vec![2, 1]);
        let x = e("121");
        let c = a.reduce(&x, &beta).unwrap();
        let y = a.lift(&beta, &c).unwrap();
        assert!(a.equal_in_quotient(&x, &y).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let x = e("12").scale(&RationalScalar::q_pow(2)).add(&e("21")).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert!(s.starts_with("{\"side\":\"E\",\"terms\":[[\"12\""));
        let y: WordElement = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
    }
}
