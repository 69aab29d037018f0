//! Triangular normal form in the full quantized enveloping algebra, the
//! braid group operators, root vectors and the PBW / dual PBW bases.
//!
//! Relations: `K_l E_j K_{-l} = q^{(l, alpha_j)} E_j`,
//! `K_l F_j K_{-l} = q^{-(l, alpha_j)} F_j` and
//! `E_i F_j - F_j E_i = delta_ij (K_i - K_i^{-1}) / (q_i - q_i^{-1})`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::cartan::{CartanData, ReducedWord, RootVec, Weight};
use crate::error::{Error, Result};
use crate::freealg::{format_word, word_weight, Algebra, Side, Word, WordElement};
use crate::linalg::{self, Matrix};
use crate::scalar::{phi, qfact, LaurentScalar, RationalScalar};

/// Key of a normal-ordered monomial `F_a K_l E_x`.
pub type TriKey = (Word, Vec<i64>, Word);

/// A linear combination of normal-ordered monomials `F_a K_l E_x`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct TriangularElement {
    terms: BTreeMap<TriKey, RationalScalar>,
}

impl TriangularElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scalar(c: RationalScalar) -> Self {
        Self::monomial(Vec::new(), Vec::new(), Vec::new(), c)
    }

    pub fn one() -> Self {
        Self::scalar(RationalScalar::one())
    }

    pub fn monomial(f: Word, k: Vec<i64>, e: Word, c: RationalScalar) -> Self {
        let mut out = Self::zero();
        out.add_term((f, k, e), &c);
        out
    }

    pub fn e_word(w: Word) -> Self {
        Self::monomial(Vec::new(), Vec::new(), w, RationalScalar::one())
    }

    pub fn f_word(w: Word) -> Self {
        Self::monomial(w, Vec::new(), Vec::new(), RationalScalar::one())
    }

    pub fn k(l: &Weight) -> Self {
        Self::monomial(Vec::new(), l.0.clone(), Vec::new(), RationalScalar::one())
    }

    pub fn from_e(x: &WordElement) -> Self {
        let mut out = Self::zero();
        for (w, c) in x.terms() {
            let key = match x.side {
                Side::E => (Vec::new(), Vec::new(), w.clone()),
                Side::F => (w.clone(), Vec::new(), Vec::new()),
            };
            out.add_term(key, c);
        }
        out
    }

    pub fn add_term(&mut self, mut key: TriKey, c: &RationalScalar) {
        if c.is_zero() {
            return;
        }
        if key.1.iter().all(|&v| v == 0) {
            key.1.clear();
        }
        match self.terms.get_mut(&key) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c.clone());
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TriKey, &RationalScalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c);
        }
        out
    }

    pub fn scale(&self, c: &RationalScalar) -> Self {
        let mut out = Self::zero();
        for (k, x) in &self.terms {
            out.add_term(k.clone(), &(x * c));
        }
        out
    }

    /// The part `F_{} K_0 E_x` as an E-side word-vector.
    pub fn e_part(&self) -> WordElement {
        WordElement::from_terms(
            Side::E,
            self.terms
                .iter()
                .filter(|((f, k, _), _)| f.is_empty() && k.is_empty())
                .map(|((_, _, e), c)| (e.clone(), c.clone())),
        )
    }

    /// Counit: keeps the coefficients of the pure `K` terms.
    pub fn counit(&self) -> RationalScalar {
        let mut acc = RationalScalar::zero();
        for ((f, _, e), c) in &self.terms {
            if f.is_empty() && e.is_empty() {
                acc += c;
            }
        }
        acc
    }
}

impl fmt::Debug for TriangularElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((a, k, e), c)| format!("({c})F[{}]K[{:?}]E[{}]", format_word(a), k, format_word(e)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A generator of the full algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    E(usize),
    F(usize),
    K(Weight),
}

/// The four braid group operator conventions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TVariant {
    /// `E_i -> -K_{ei} F_i`, `E_j -> sum (-1)^r q_i^{er} E_i^{(r)} E_j E_i^{(s)}`.
    Prime(i8),
    /// `E_i -> -F_i K_{-ei}`, `E_j -> sum (-1)^r q_i^{er} E_i^{(s)} E_j E_i^{(r)}`.
    DoublePrime(i8),
}

impl TVariant {
    pub const ALL: [TVariant; 4] =
        [TVariant::Prime(1), TVariant::Prime(-1), TVariant::DoublePrime(1), TVariant::DoublePrime(-1)];
}

/// The operator convention used for root vectors.
pub const DEFAULT_T_VARIANT: TVariant = TVariant::DoublePrime(1);

/// Straightening engine for the full algebra.
pub struct Quantum {
    pub cartan: CartanData,
    ef_memo: Mutex<HashMap<(Word, Word), TriangularElement>>,
}

impl Quantum {
    pub fn new(cartan: CartanData) -> Self {
        Quantum { cartan, ef_memo: Mutex::new(HashMap::new()) }
    }

    fn alpha(&self, i: usize) -> Vec<i64> {
        let n = self.cartan.rank();
        (0..n).map(|k| self.cartan.matrix[k][i]).collect()
    }

    fn pair_k(&self, l: &[i64], w: &[u8]) -> i64 {
        if l.is_empty() {
            return 0;
        }
        w.iter().map(|&j| l[j as usize] * self.cartan.symmetrizers[j as usize]).sum()
    }

    fn qi_diff(&self, i: usize) -> RationalScalar {
        let d = self.cartan.symmetrizers[i];
        RationalScalar::from(LaurentScalar::q_pow(d) - LaurentScalar::q_pow(-d))
    }

    /// Right multiplication by `K_m`.
    fn times_k(&self, x: &TriangularElement, m: &[i64]) -> TriangularElement {
        let mut out = TriangularElement::zero();
        for ((f, k, e), c) in x.terms() {
            let s = self.pair_k(m, e);
            let mut kk = if k.is_empty() { vec![0; m.len()] } else { k.clone() };
            for (a, b) in kk.iter_mut().zip(m) {
                *a += b;
            }
            out.add_term((f.clone(), kk, e.clone()), &c.shift(-s));
        }
        out
    }

    fn times_e(x: &TriangularElement, i: u8) -> TriangularElement {
        let mut out = TriangularElement::zero();
        for ((f, k, e), c) in x.terms() {
            let mut e2 = e.clone();
            e2.push(i);
            out.add_term((f.clone(), k.clone(), e2), c);
        }
        out
    }

    /// Normal form of `E_x F_b`.
    pub fn ef(&self, x: &[u8], b: &[u8]) -> TriangularElement {
        if x.is_empty() || b.is_empty() {
            return TriangularElement::monomial(b.to_vec(), Vec::new(), x.to_vec(), RationalScalar::one());
        }
        let key = (x.to_vec(), b.to_vec());
        if let Some(v) = self.ef_memo.lock().expect("straightening memo poisoned").get(&key) {
            return v.clone();
        }
        let (&i, xs) = x.split_last().expect("nonempty");
        let mut out = Self::times_e(&self.ef(xs, b), i);
        let ai = self.alpha(i as usize);
        let neg_ai: Vec<i64> = ai.iter().map(|v| -v).collect();
        let denom = self.qi_diff(i as usize).inv().expect("nonzero");
        for p in 0..b.len() {
            if b[p] != i {
                continue;
            }
            let s = self.pair_k(&ai, &b[p + 1..]);
            let mut bp = b.to_vec();
            bp.remove(p);
            let base = self.ef(xs, &bp);
            let plus = self.times_k(&base, &ai).scale(&(&RationalScalar::q_pow(-s) * &denom));
            let minus = self.times_k(&base, &neg_ai).scale(&(&RationalScalar::q_pow(s) * &denom));
            out = out.add(&plus).add(&minus.scale(&RationalScalar::from_int(-1)));
        }
        self.ef_memo.lock().expect("straightening memo poisoned").insert(key, out.clone());
        out
    }

    pub fn mul(&self, x: &TriangularElement, y: &TriangularElement) -> TriangularElement {
        let mut out = TriangularElement::zero();
        for ((a, l, xw), cx) in x.terms() {
            for ((b, m, yw), cy) in y.terms() {
                let mid = self.ef(xw, b);
                let c = cx * cy;
                for ((fc, nu, ez), cm) in mid.terms() {
                    let s = self.pair_k(l, fc) + self.pair_k(m, ez);
                    let mut f = a.clone();
                    f.extend_from_slice(fc);
                    let mut e = ez.clone();
                    e.extend_from_slice(yw);
                    let n = self.cartan.rank();
                    let mut k = vec![0i64; n];
                    for v in [l, nu, m] {
                        if !v.is_empty() {
                            for (t, u) in k.iter_mut().zip(v) {
                                *t += u;
                            }
                        }
                    }
                    out.add_term((f, k, e), &(&c * cm).shift(-s));
                }
            }
        }
        out
    }

    /// Normal form of a product of generators.
    pub fn normal_form(&self, gens: &[Generator]) -> TriangularElement {
        gens.iter().fold(TriangularElement::one(), |acc, g| self.mul(&acc, &self.generator(g)))
    }

    pub fn generator(&self, g: &Generator) -> TriangularElement {
        match g {
            Generator::E(i) => TriangularElement::e_word(vec![*i as u8]),
            Generator::F(i) => TriangularElement::f_word(vec![*i as u8]),
            Generator::K(l) => TriangularElement::k(l),
        }
    }

    fn divided(&self, side: Side, i: usize, m: i64) -> TriangularElement {
        let f = qfact(m, self.cartan.symmetrizers[i]).expect("nonnegative");
        let c = RationalScalar::new(LaurentScalar::one(), f).expect("nonzero");
        let w = vec![i as u8; m as usize];
        match side {
            Side::E => TriangularElement::monomial(Vec::new(), Vec::new(), w, c),
            Side::F => TriangularElement::monomial(w, Vec::new(), Vec::new(), c),
        }
    }

    /// The braid operator on a single generator.
    pub fn t_generator(&self, variant: TVariant, i: usize, g: &Generator) -> TriangularElement {
        let minus_one = RationalScalar::from_int(-1);
        let ai = Weight(self.alpha(i));
        let (prime, e) = match variant {
            TVariant::Prime(e) => (true, e as i64),
            TVariant::DoublePrime(e) => (false, e as i64),
        };
        let di = self.cartan.symmetrizers[i];
        match g {
            Generator::K(l) => TriangularElement::k(&self.cartan.reflect_weight(i, l)),
            Generator::E(j) if *j == i => {
                let (kpos, f) = (self.generator(&Generator::K(ai.scale(e))), self.generator(&Generator::F(i)));
                if prime {
                    self.mul(&kpos, &f).scale(&minus_one)
                } else {
                    self.mul(&f, &TriangularElement::k(&ai.scale(-e))).scale(&minus_one)
                }
            }
            Generator::F(j) if *j == i => {
                let ei = self.generator(&Generator::E(i));
                if prime {
                    self.mul(&ei, &TriangularElement::k(&ai.scale(-e))).scale(&minus_one)
                } else {
                    self.mul(&TriangularElement::k(&ai.scale(e)), &ei).scale(&minus_one)
                }
            }
            Generator::E(j) | Generator::F(j) => {
                let side = if matches!(g, Generator::E(_)) { Side::E } else { Side::F };
                let top = -self.cartan.matrix[i][*j];
                let sgn = if side == Side::E { e } else { -e };
                let mut out = TriangularElement::zero();
                for r in 0..=top {
                    let s = top - r;
                    let c = RationalScalar::q_pow(sgn * di * r).scale_sign(r);
                    let mid = self.generator(&Generator::E(*j));
                    let mid = if side == Side::E { mid } else { self.generator(&Generator::F(*j)) };
                    // E-side: prime puts E_i^{(r)} left; F-side is mirrored.
                    let (left, right) = if prime == (side == Side::E) { (r, s) } else { (s, r) };
                    let t = self.mul(&self.mul(&self.divided(side, i, left), &mid), &self.divided(side, i, right));
                    out = out.add(&t.scale(&c));
                }
                out
            }
        }
    }

    /// Apply a braid operator to a normal-form element.
    pub fn lusztig_t(&self, variant: TVariant, i: usize, x: &TriangularElement) -> TriangularElement {
        let mut gen_cache: HashMap<(bool, u8), TriangularElement> = HashMap::new();
        let mut image = |is_e: bool, l: u8| {
            gen_cache
                .entry((is_e, l))
                .or_insert_with(|| {
                    let g = if is_e { Generator::E(l as usize) } else { Generator::F(l as usize) };
                    self.t_generator(variant, i, &g)
                })
                .clone()
        };
        let mut out = TriangularElement::zero();
        for ((f, k, e), c) in x.terms() {
            let mut acc = TriangularElement::scalar(c.clone());
            for &l in f {
                acc = self.mul(&acc, &image(false, l));
            }
            if !k.is_empty() {
                acc = self.mul(&acc, &TriangularElement::k(&self.cartan.reflect_weight(i, &Weight(k.clone()))));
            }
            for &l in e {
                acc = self.mul(&acc, &image(true, l));
            }
            out = out.add(&acc);
        }
        out
    }
}

trait ScaleSign {
    fn scale_sign(self, r: i64) -> Self;
}

impl ScaleSign for RationalScalar {
    fn scale_sign(self, r: i64) -> Self {
        if r % 2 == 0 {
            self
        } else {
            -self
        }
    }
}

/// Whether a normal-form element vanishes, comparing E- and F-parts in
/// their Serre quotients.
pub fn is_zero_mod_serre(alg: &Algebra, x: &TriangularElement) -> Result<bool> {
    Ok(split_mod_serre(alg, x)?.1)
}

/// Splits off the `U_q(n)` component; the flag reports whether everything
/// else vanishes in the quotient.
pub fn split_mod_serre(alg: &Algebra, x: &TriangularElement) -> Result<(WordElement, bool)> {
    let n = alg.rank();
    let mut groups: BTreeMap<(Vec<i64>, RootVec, RootVec), Vec<(Word, Word, RationalScalar)>> = BTreeMap::new();
    for ((f, k, e), c) in x.terms() {
        groups
            .entry((k.clone(), word_weight(n, f), word_weight(n, e)))
            .or_default()
            .push((f.clone(), e.clone(), c.clone()));
    }
    let mut e_part = WordElement::zero(Side::E);
    let mut rest_zero = true;
    for ((k, fw, ew), items) in groups {
        if k.is_empty() && fw.is_zero() {
            for (_, e, c) in items {
                e_part.add_term(e, &c);
            }
            continue;
        }
        if !rest_zero {
            continue;
        }
        let rows: Vec<Word> = if fw.is_zero() {
            vec![Vec::new()]
        } else {
            alg.basis_uncapped(&fw).pivot_words().into_iter().cloned().collect()
        };
        let cols: Vec<Word> = if ew.is_zero() {
            vec![Vec::new()]
        } else {
            alg.basis_uncapped(&ew).pivot_f_words().into_iter().cloned().collect()
        };
        'outer: for r in &rows {
            for cw in &cols {
                let mut acc = RationalScalar::zero();
                for (f, e, c) in &items {
                    let a = alg.pair_words(r, f);
                    if a.is_zero() {
                        continue;
                    }
                    let b = alg.pair_words(e, cw);
                    if b.is_zero() {
                        continue;
                    }
                    acc += &(c * &RationalScalar::from(&a * &b));
                }
                if !acc.is_zero() {
                    rest_zero = false;
                    break 'outer;
                }
            }
        }
    }
    Ok((e_part, rest_zero))
}

/// A PBW index: a reduced word and an exponent vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PbwIndex {
    pub word: String,
    pub m: Vec<i64>,
}

/// Root vectors, PBW monomials and coordinate maps for one reduced word.
pub struct PbwBasis {
    pub alg: Arc<Algebra>,
    pub word: ReducedWord,
    pub variant: TVariant,
    /// `E_{beta_s}` in pivot form.
    pub root_vectors: Vec<WordElement>,
    monomials: Mutex<HashMap<Vec<i64>, Vec<RationalScalar>>>,
    transitions: Mutex<HashMap<RootVec, Arc<Transition>>>,
}

/// Change of basis between PBW monomials and pivot words in one weight.
#[derive(Debug)]
pub struct Transition {
    pub indices: Vec<Vec<i64>>,
    /// Column `k` is the pivot coordinate vector of `E(indices[k])`.
    pub to_pivot: Matrix,
    pub from_pivot: Matrix,
}

impl PbwBasis {
    pub fn new(alg: Arc<Algebra>, word: ReducedWord) -> Result<Self> {
        Self::with_variant(alg, word, DEFAULT_T_VARIANT)
    }

    pub fn with_variant(alg: Arc<Algebra>, word: ReducedWord, variant: TVariant) -> Result<Self> {
        let q = Quantum::new(alg.cartan.clone());
        let root_vectors = root_vectors(&alg, &q, &word, variant)?;
        Ok(PbwBasis {
            alg,
            word,
            variant,
            root_vectors,
            monomials: Mutex::new(HashMap::new()),
            transitions: Mutex::new(HashMap::new()),
        })
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn index(&self, m: &[i64]) -> PbwIndex {
        PbwIndex { word: self.word.to_string(), m: m.to_vec() }
    }

    pub fn weight_of(&self, m: &[i64]) -> RootVec {
        let n = self.alg.rank();
        let mut acc = RootVec::zero(n);
        for (s, &k) in m.iter().enumerate() {
            acc = acc.add(&self.word.betas[s].scale(k));
        }
        acc
    }

    /// All exponent vectors of weight `beta`, in lexicographic order.
    pub fn indices(&self, beta: &RootVec) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.enum_indices(0, beta.clone(), &mut cur, &mut out);
        out.sort();
        out
    }

    fn enum_indices(&self, s: usize, rest: RootVec, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if s == self.len() {
            if rest.is_zero() {
                out.push(cur.clone());
            }
            return;
        }
        let mut r = rest;
        let mut k = 0;
        while r.is_nonneg() {
            cur.push(k);
            self.enum_indices(s + 1, r.clone(), cur, out);
            cur.pop();
            r = r.sub(&self.word.betas[s]);
            k += 1;
        }
    }

    fn root_q_step(&self, s: usize) -> i64 {
        self.alg.cartan.form_roots(&self.word.betas[s], &self.word.betas[s]) / 2
    }

    /// Pivot coordinates of `E(m) = E_{beta_N}^{(m_N)} ... E_{beta_1}^{(m_1)}`.
    pub fn monomial_coords(&self, m: &[i64]) -> Result<Vec<RationalScalar>> {
        if m.len() != self.len() || m.iter().any(|&v| v < 0) {
            return Err(Error::Invalid(format!("bad PBW exponent {m:?}")));
        }
        let beta = self.weight_of(m);
        self.alg.basis(&beta)?;
        if let Some(v) = self.monomials.lock().expect("monomial cache poisoned").get(m) {
            return Ok(v.clone());
        }
        let mut acc = WordElement::one(Side::E);
        let mut scale = LaurentScalar::one();
        for s in (0..self.len()).rev() {
            for _ in 0..m[s] {
                acc = self.reduce_product(&acc, &self.root_vectors[s])?;
            }
            scale = &scale * &qfact(m[s], self.root_q_step(s))?;
        }
        let c = if beta.is_zero() {
            vec![RationalScalar::one()]
        } else {
            let inv = RationalScalar::new(LaurentScalar::one(), scale)?;
            self.alg.reduce(&acc, &beta)?.iter().map(|x| x * &inv).collect()
        };
        self.monomials.lock().expect("monomial cache poisoned").insert(m.to_vec(), c.clone());
        Ok(c)
    }

    fn reduce_product(&self, x: &WordElement, y: &WordElement) -> Result<WordElement> {
        let p = x.concat_multiply(y)?;
        match p.weight(self.alg.rank()) {
            Some(beta) => {
                let c = self.alg.reduce(&p, &beta)?;
                self.alg.lift(&beta, &c)
            }
            None => Ok(p),
        }
    }

    pub fn pbw_monomial(&self, m: &[i64]) -> Result<WordElement> {
        let beta = self.weight_of(m);
        if beta.is_zero() {
            return Ok(WordElement::one(Side::E));
        }
        self.alg.lift(&beta, &self.monomial_coords(m)?)
    }

    /// `prod_s phi_{m_s}(q_s^2) / prod_i (1 - q_i^2)^{b_i}` for `E(m)` of weight
    /// `b`: the inverse of the normalized pairing `(E(m), F(m))`.
    pub fn dual_scalar(&self, m: &[i64]) -> Result<RationalScalar> {
        let mut num = LaurentScalar::one();
        for (s, &k) in m.iter().enumerate() {
            num = &num * &phi(k, &LaurentScalar::q_pow(2 * self.root_q_step(s)))?;
        }
        RationalScalar::new(num, self.alg.normalization(&self.weight_of(m)))
    }

    pub fn dual_pbw(&self, m: &[i64]) -> Result<WordElement> {
        Ok(self.pbw_monomial(m)?.scale(&self.dual_scalar(m)?))
    }

    pub fn dual_coords(&self, m: &[i64]) -> Result<Vec<RationalScalar>> {
        let c = self.dual_scalar(m)?;
        Ok(self.monomial_coords(m)?.iter().map(|x| x * &c).collect())
    }

    pub fn transition(&self, beta: &RootVec) -> Result<Arc<Transition>> {
        if let Some(t) = self.transitions.lock().expect("transition cache poisoned").get(beta) {
            return Ok(t.clone());
        }
        let indices = self.indices(beta);
        let cols: Vec<Vec<RationalScalar>> =
            indices.iter().map(|m| self.monomial_coords(m)).collect::<Result<_>>()?;
        let to_pivot = linalg::transpose(&cols);
        let from_pivot = linalg::inverse(&to_pivot)
            .ok_or_else(|| Error::Convention(format!("PBW monomials of weight {beta} are not a basis")))?;
        let t = Arc::new(Transition { indices, to_pivot, from_pivot });
        self.transitions.lock().expect("transition cache poisoned").insert(beta.clone(), t.clone());
        Ok(t)
    }

    /// Expansion of a homogeneous element in the PBW basis of its weight.
    pub fn pbw_coordinates(&self, x: &WordElement) -> Result<BTreeMap<Vec<i64>, RationalScalar>> {
        let mut out = BTreeMap::new();
        for (beta, comp) in x.components(self.alg.rank()) {
            if beta.is_zero() {
                out.insert(vec![0; self.len()], comp.coeff(&[]));
                continue;
            }
            let t = self.transition(&beta)?;
            let v = linalg::mat_vec(&t.from_pivot, &self.alg.reduce(&comp, &beta)?);
            for (m, c) in t.indices.iter().zip(v) {
                if !c.is_zero() {
                    out.insert(m.clone(), c);
                }
            }
        }
        Ok(out)
    }

    /// PBW coordinates from pivot coordinates.
    pub fn coords_from_pivot(&self, beta: &RootVec, v: &[RationalScalar]) -> Result<Vec<RationalScalar>> {
        Ok(linalg::mat_vec(&self.transition(beta)?.from_pivot, v))
    }

    /// `F(n)`: image of `E(n)` under `E_i -> F_i`.
    pub fn f_monomial(&self, m: &[i64]) -> Result<WordElement> {
        Ok(self.pbw_monomial(m)?.flip_side())
    }

    /// PBW expansion of `E_{beta_b} E_{beta_a} - q^{(beta_a, beta_b)} E_{beta_a} E_{beta_b}`
    /// for root positions `a < b`.
    pub fn ls_commutator(&self, a: usize, b: usize) -> Result<BTreeMap<Vec<i64>, RationalScalar>> {
        if a >= b || b >= self.len() {
            return Err(Error::Invalid("expected root positions a < b".into()));
        }
        let ea = &self.root_vectors[a];
        let eb = &self.root_vectors[b];
        let form = self.alg.cartan.form_roots(&self.word.betas[a], &self.word.betas[b]);
        let lhs = eb.concat_multiply(ea)?;
        let rhs = ea.concat_multiply(eb)?.scale(&RationalScalar::q_pow(form));
        self.pbw_coordinates(&lhs.sub(&rhs)?)
    }

    /// Whether the commutator of [`Self::ls_commutator`] is supported strictly
    /// below `e_a + e_b` in the lexicographic order.
    pub fn ls_filtration_check(&self, a: usize, b: usize) -> Result<bool> {
        let mut top = vec![0; self.len()];
        top[a] += 1;
        top[b] += 1;
        Ok(self.ls_commutator(a, b)?.keys().all(|m| lex_less(m, &top)))
    }
}

/// The lexicographic order used for the PBW filtration, comparing from the
/// last root backwards.
pub fn lex_less(m: &[i64], n: &[i64]) -> bool {
    m.iter().rev().cmp(n.iter().rev()) == std::cmp::Ordering::Less
}

/// `E_{beta_s} = T_{i_1} ... T_{i_{s-1}} (E_{i_s})`, each checked to lie in
/// `U_q(n)` with weight `beta_s`.
pub fn root_vectors(alg: &Algebra, q: &Quantum, word: &ReducedWord, variant: TVariant) -> Result<Vec<WordElement>> {
    let n = alg.rank();
    let mut out = Vec::with_capacity(word.len());
    for s in 0..word.len() {
        let mut x = WordElement::generator(Side::E, word.letters[s]);
        for &i in word.letters[..s].iter().rev() {
            let t = q.lusztig_t(variant, i, &TriangularElement::from_e(&x));
            let (e_part, rest_zero) = split_mod_serre(alg, &t)?;
            if !rest_zero {
                return Err(Error::Convention(format!(
                    "braid operator left U_q(n) computing root {} of word {}",
                    s + 1,
                    word
                )));
            }
            x = e_part;
            if let Some(beta) = x.weight(n) {
                let c = alg.reduce(&x, &beta)?;
                x = alg.lift(&beta, &c)?;
            }
        }
        if x.weight(n).as_ref() != Some(&word.betas[s]) || alg.is_zero_in_quotient(&x)? {
            return Err(Error::Convention(format!("root vector {} of word {} has the wrong weight", s + 1, word)));
        }
        out.push(x);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(t: &str) -> (Arc<Algebra>, Quantum) {
        let c = CartanData::parse(t).unwrap();
        (Arc::new(Algebra::new(c.clone())), Quantum::new(c))
    }

    #[test]
    fn commutation_relations() {
        let (_, q) = setup("A2");
        let l = Weight(vec![1, 0]);
        let x = q.normal_form(&[Generator::K(l.clone()), Generator::E(0), Generator::K(l.scale(-1))]);
        assert_eq!(x, TriangularElement::e_word(vec![0]).scale(&RationalScalar::q_pow(1)));
        let x = q.normal_form(&[Generator::E(0), Generator::F(1)]);
        assert_eq!(x, q.normal_form(&[Generator::F(1), Generator::E(0)]));
        let x = q.normal_form(&[Generator::E(0), Generator::F(0)]);
        let y = q.normal_form(&[Generator::F(0), Generator::E(0)]);
        let diff = x.add(&y.scale(&RationalScalar::from_int(-1)));
        assert!(diff.counit().is_zero());
        assert_eq!(diff.terms().count(), 2);
    }

    /// Checks that each variant respects the defining relations on generators.
    #[test]
    fn braid_operators_preserve_relations() {
        for t in ["A2", "B2"] {
            let (alg, q) = setup(t);
            let n = alg.rank();
            for v in TVariant::ALL {
                for i in 0..n {
                    for a in 0..n {
                        for b in 0..n {
                            let te = q.t_generator(v, i, &Generator::E(a));
                            let tf = q.t_generator(v, i, &Generator::F(b));
                            let lhs = q.mul(&te, &tf).add(&q.mul(&tf, &te).scale(&RationalScalar::from_int(-1)));
                            let rhs = if a == b {
                                let ea = q.normal_form(&[Generator::E(a), Generator::F(a)]);
                                let fa = q.normal_form(&[Generator::F(a), Generator::E(a)]);
                                let comm = ea.add(&fa.scale(&RationalScalar::from_int(-1)));
                                q.lusztig_t(v, i, &comm)
                            } else {
                                TriangularElement::zero()
                            };
                            let d = lhs.add(&rhs.scale(&RationalScalar::from_int(-1)));
                            assert!(is_zero_mod_serre(&alg, &d).unwrap(), "{t} {v:?} T_{i} [E_{a},F_{b}]");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn braid_operator_on_k_and_one() {
        let (_, q) = setup("A2");
        let l = Weight(vec![1, 0]);
        let t = q.lusztig_t(DEFAULT_T_VARIANT, 0, &TriangularElement::k(&l));
        assert_eq!(t, TriangularElement::k(&q.cartan.reflect_weight(0, &l)));
        assert_eq!(q.lusztig_t(DEFAULT_T_VARIANT, 0, &TriangularElement::one()), TriangularElement::one());
    }
}
