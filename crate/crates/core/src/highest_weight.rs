//! Simple modules `V(lambda)`, extremal vectors and the matrix-coefficient
//! elements `X^r` (quantum minors) and `z_lambda` of `U_q(n)`.
//!
//! `V(lambda)` is realized as `U_q(n^-) v_lambda` modulo the radical of the
//! Shapovalov form, one weight space at a time.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};

use crate::canonical::CanonicalBasis;
use crate::cartan::{CartanData, RootVec, Weight};
use crate::error::{Error, Result};
use crate::freealg::{Algebra, Side, Word, WordElement};
use crate::linalg::{self, Matrix};
use crate::scalar::{qfact, qint, LaurentScalar, RationalScalar};

/// One weight space `V(lambda)_{lambda - gamma}`.
#[derive(Debug)]
pub struct ModuleWeightSpace {
    pub depth: RootVec,
    /// All F-words of weight `gamma`.
    pub words: Vec<Word>,
    pub dim: usize,
    /// Independent E-words (rows of the Shapovalov matrix).
    pub pivot_rows: Vec<Word>,
    /// F-words whose images form a basis.
    pub pivot_cols: Vec<Word>,
    block_inv: Matrix,
}

/// A vector of `V(lambda)`, homogeneous of weight `lambda - depth`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleVector {
    pub depth: RootVec,
    /// Coordinates on `F_b v_lambda` for the pivot F-words `b` of the weight space.
    pub coords: Vec<RationalScalar>,
}

impl ModuleVector {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(RationalScalar::is_zero)
    }

    pub fn scale(&self, c: &RationalScalar) -> Self {
        ModuleVector { depth: self.depth.clone(), coords: self.coords.iter().map(|x| x * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.depth, other.depth);
        ModuleVector { depth: self.depth.clone(), coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect() }
    }
}

/// The simple module of highest weight `lambda`.
pub struct SimpleModule {
    pub alg: Arc<Algebra>,
    pub lambda: Weight,
    /// Upper bound on the height of weight spaces built.
    pub depth_cap: i64,
    /// Height of `lambda - w_0 lambda`; deeper weight spaces vanish.
    pub max_depth: i64,
    shap: Mutex<HashMap<(Word, Word), LaurentScalar>>,
    spaces: RwLock<HashMap<RootVec, Arc<ModuleWeightSpace>>>,
}

fn signed_qint(n: i64, d: i64) -> LaurentScalar {
    if n >= 0 {
        qint(n, d).expect("nonnegative")
    } else {
        -qint(-n, d).expect("nonnegative")
    }
}

fn words_of_weight(gamma: &RootVec) -> Vec<Word> {
    let len = gamma.height() as usize;
    let mut out = Vec::new();
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
    rec(&mut gamma.0.clone(), &mut Vec::new(), len, &mut out);
    out
}

impl SimpleModule {
    pub fn new(alg: Arc<Algebra>, lambda: Weight, depth_cap: i64) -> Result<Self> {
        if lambda.0.len() != alg.rank() || !lambda.is_dominant() {
            return Err(Error::Invalid(format!("{lambda} is not a dominant weight")));
        }
        let c = &alg.cartan;
        let max_depth = c
            .weight_to_rootvec(&lambda.sub(&c.longest_element_action(&lambda)))
            .map(|r| r.height())
            .unwrap_or(0);
        Ok(SimpleModule {
            alg,
            lambda,
            depth_cap,
            max_depth,
            shap: Mutex::new(HashMap::new()),
            spaces: RwLock::new(HashMap::new()),
        })
    }

    pub fn rank(&self) -> usize {
        self.alg.rank()
    }

    /// `<lambda - gamma, alpha_i^vee>`.
    pub fn coroot_value(&self, i: usize, gamma: &RootVec) -> i64 {
        self.lambda.0[i] - self.alg.cartan.coroot_pairing(gamma, i)
    }

    /// Scalar `E_x F_b v_lambda / v_lambda` for words of equal weight.
    pub fn shapovalov(&self, x: &[u8], b: &[u8]) -> LaurentScalar {
        if x.len() != b.len() {
            return LaurentScalar::zero();
        }
        if x.is_empty() {
            return LaurentScalar::one();
        }
        let key = (x.to_vec(), b.to_vec());
        if let Some(v) = self.shap.lock().expect("shapovalov memo poisoned").get(&key) {
            return v.clone();
        }
        let n = self.rank();
        let (&i, xs) = x.split_last().expect("nonempty");
        let di = self.alg.cartan.symmetrizers[i as usize];
        let mut acc = LaurentScalar::zero();
        let mut tail = RootVec::zero(n);
        for p in (0..b.len()).rev() {
            if b[p] == i {
                let mut bp = b.to_vec();
                bp.remove(p);
                let inner = self.shapovalov(xs, &bp);
                if !inner.is_zero() {
                    acc += &(&signed_qint(self.coroot_value(i as usize, &tail), di) * &inner);
                }
            }
            tail.0[b[p] as usize] += 1;
        }
        self.shap.lock().expect("shapovalov memo poisoned").insert(key, acc.clone());
        acc
    }

    /// The weight space at depth `gamma` (empty if `lambda - gamma` is not a weight).
    pub fn space(&self, gamma: &RootVec) -> Result<Arc<ModuleWeightSpace>> {
        if !gamma.is_nonneg() {
            return Err(Error::Invalid(format!("depth {gamma} is not in Q+")));
        }
        if gamma.height() > self.max_depth {
            return Ok(Arc::new(ModuleWeightSpace {
                depth: gamma.clone(),
                words: Vec::new(),
                dim: 0,
                pivot_rows: Vec::new(),
                pivot_cols: Vec::new(),
                block_inv: Vec::new(),
            }));
        }
        if gamma.height() > self.depth_cap {
            return Err(Error::HeightCapExceeded { height: gamma.height(), cap: self.depth_cap });
        }
        if let Some(s) = self.spaces.read().expect("module cache poisoned").get(gamma) {
            return Ok(s.clone());
        }
        let words = words_of_weight(gamma);
        let s: Matrix = words
            .iter()
            .map(|x| words.iter().map(|b| RationalScalar::from(self.shapovalov(x, b))).collect())
            .collect();
        let pc = linalg::pivot_columns(&s);
        let pr = linalg::pivot_columns(&linalg::transpose(&s));
        let block: Matrix = pr.iter().map(|&r| pc.iter().map(|&c| s[r][c].clone()).collect()).collect();
        let block_inv = linalg::inverse(&block).expect("Shapovalov pivot block is invertible");
        let space = Arc::new(ModuleWeightSpace {
            depth: gamma.clone(),
            dim: pc.len(),
            pivot_rows: pr.iter().map(|&r| words[r].clone()).collect(),
            pivot_cols: pc.iter().map(|&c| words[c].clone()).collect(),
            words,
            block_inv,
        });
        let mut cache = self.spaces.write().expect("module cache poisoned");
        Ok(cache.entry(gamma.clone()).or_insert(space).clone())
    }

    pub fn dim_at(&self, gamma: &RootVec) -> Result<usize> {
        Ok(self.space(gamma)?.dim)
    }

    /// Total dimension, enumerating weight spaces up to the depth cap.
    pub fn dim(&self) -> Result<usize> {
        let n = self.rank();
        let mut total = 1;
        for gamma in crate::cartan::weights_up_to_height(n, self.depth_cap.min(self.max_depth)) {
            total += self.dim_at(&gamma)?;
        }
        Ok(total)
    }

    pub fn highest(&self) -> ModuleVector {
        ModuleVector { depth: RootVec::zero(self.rank()), coords: vec![RationalScalar::one()] }
    }

    pub fn zero_at(&self, gamma: &RootVec) -> Result<ModuleVector> {
        Ok(ModuleVector { depth: gamma.clone(), coords: vec![RationalScalar::zero(); self.space(gamma)?.dim] })
    }

    /// Reduce `sum c_b F_b v_lambda` (words of weight `gamma`) to basis coordinates.
    pub fn reduce_words(&self, gamma: &RootVec, terms: &[(Word, RationalScalar)]) -> Result<ModuleVector> {
        let sp = self.space(gamma)?;
        let v: Vec<RationalScalar> = sp
            .pivot_rows
            .iter()
            .map(|x| {
                let mut acc = RationalScalar::zero();
                for (b, c) in terms {
                    let s = self.shapovalov(x, b);
                    if !s.is_zero() {
                        acc += &(c * &RationalScalar::from(s));
                    }
                }
                acc
            })
            .collect();
        // a^T G = v^T over pivot columns
        let coords = (0..sp.dim)
            .map(|c| {
                let mut acc = RationalScalar::zero();
                for (r, vr) in v.iter().enumerate() {
                    if !vr.is_zero() && !sp.block_inv[c][r].is_zero() {
                        acc += &(vr * &sp.block_inv[c][r]);
                    }
                }
                acc
            })
            .collect();
        Ok(ModuleVector { depth: gamma.clone(), coords })
    }

    fn as_terms(&self, v: &ModuleVector) -> Result<Vec<(Word, RationalScalar)>> {
        let sp = self.space(&v.depth)?;
        Ok(sp.pivot_cols.iter().cloned().zip(v.coords.iter().cloned()).filter(|(_, c)| !c.is_zero()).collect())
    }

    /// Action of an F-side word-vector.
    pub fn act_f(&self, y: &WordElement, v: &ModuleVector) -> Result<ModuleVector> {
        if y.side != Side::F {
            return Err(Error::Invalid("expected an F-side element".into()));
        }
        let n = self.rank();
        let Some(delta) = y.weight(n) else {
            return Err(Error::Invalid("expected a homogeneous element".into()));
        };
        let gamma = v.depth.add(&delta);
        let mut terms = Vec::new();
        for (a, ca) in y.terms() {
            for (b, cb) in self.as_terms(v)? {
                let mut w = a.clone();
                w.extend_from_slice(&b);
                terms.push((w, ca * &cb));
            }
        }
        self.reduce_words(&gamma, &terms)
    }

    pub fn f_i(&self, i: usize, v: &ModuleVector) -> Result<ModuleVector> {
        self.act_f(&WordElement::generator(Side::F, i), v)
    }

    /// `F_i^{(k)} v`.
    pub fn f_divided(&self, i: usize, k: i64, v: &ModuleVector) -> Result<ModuleVector> {
        let y = self.alg.divided_power(Side::F, i, k)?;
        self.act_f(&y, v)
    }

    pub fn e_i(&self, i: usize, v: &ModuleVector) -> Result<ModuleVector> {
        let n = self.rank();
        if v.depth.0[i] == 0 {
            let mut d = v.depth.clone();
            d.0[i] -= 1;
            return Ok(ModuleVector { depth: d, coords: Vec::new() });
        }
        let mut gamma = v.depth.clone();
        gamma.0[i] -= 1;
        let di = self.alg.cartan.symmetrizers[i];
        let mut terms = Vec::new();
        for (b, c) in self.as_terms(v)? {
            let mut tail = RootVec::zero(n);
            for p in (0..b.len()).rev() {
                if b[p] as usize == i {
                    let mut bp = b.clone();
                    bp.remove(p);
                    let k = RationalScalar::from(signed_qint(self.coroot_value(i, &tail), di));
                    terms.push((bp, &c * &k));
                }
                tail.0[b[p] as usize] += 1;
            }
        }
        self.reduce_words(&gamma, &terms)
    }

    /// `v_{w lambda}` for `w = s_{j_1} ... s_{j_k}` (0-based letters).
    pub fn extremal_vector(&self, w: &[usize]) -> Result<ModuleVector> {
        let mut v = self.highest();
        let mut mu = self.lambda.clone();
        for &j in w.iter().rev() {
            let a = mu.0[j];
            if a < 0 {
                return Err(Error::Invalid("word is not reduced for the extremal vector".into()));
            }
            if a > 0 {
                v = self.f_divided(j, a, &v)?;
            }
            mu = self.alg.cartan.reflect_weight(j, &mu);
        }
        Ok(v)
    }

    /// Depth of the weight `w lambda`.
    pub fn depth_of(&self, mu: &Weight) -> Option<RootVec> {
        self.alg.cartan.weight_to_rootvec(&self.lambda.sub(mu))
    }
}

/// Ratio `u / v` for vectors in a one-dimensional weight space.
fn coefficient_on(u: &ModuleVector, v: &ModuleVector) -> Result<RationalScalar> {
    let k = v.coords.iter().position(|c| !c.is_zero()).ok_or_else(|| Error::Invalid("zero extremal vector".into()))?;
    Ok(&u.coords[k] / &v.coords[k])
}

/// The element `X` of weight `lambda - y lambda` with
/// `(X, F_b) = v*_{y lambda}(F_b v_lambda)` for all F-words `b`.
pub fn matrix_coefficient_element(module: &SimpleModule, y: &[usize]) -> Result<WordElement> {
    let alg = &module.alg;
    let mu = alg.cartan.act(y, &module.lambda);
    let beta = module.depth_of(&mu).ok_or_else(|| Error::Invalid("weight outside the root lattice".into()))?;
    if beta.is_zero() {
        return Ok(WordElement::one(Side::E));
    }
    let ext = module.extremal_vector(y)?;
    if module.dim_at(&beta)? != 1 {
        return Err(Error::Invalid("extremal weight space is not one-dimensional".into()));
    }
    let basis = alg.basis(&beta)?;
    let targets: Vec<RationalScalar> = basis
        .pivot_f_words()
        .into_iter()
        .map(|b| {
            let u = module.reduce_words(&beta, &[(b.clone(), RationalScalar::one())])?;
            coefficient_on(&u, &ext)
        })
        .collect::<Result<_>>()?;
    let coords = basis.coords_from_pairings(&targets);
    alg.lift(&beta, &coords)
}

/// Rescale a nonzero element proportional to a dual canonical element so
/// that it equals that element exactly.
pub fn normalize_dual_canonical(cb: &CanonicalBasis, x: &WordElement) -> Result<(WordElement, Vec<i64>)> {
    let n = cb.rank();
    let beta = x.weight(n).ok_or_else(|| Error::Invalid("inhomogeneous element".into()))?;
    if beta.is_zero() {
        return Ok((WordElement::one(Side::E), vec![0; cb.pbw.len()]));
    }
    let coords = cb.dual_canonical_coordinates(x, &beta)?;
    let nz: Vec<_> = coords.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    if nz.len() != 1 {
        return Err(Error::Convention(format!("element of weight {beta} is not proportional to a dual canonical element")));
    }
    let (m, c) = &nz[0];
    Ok((x.scale(&c.inv()?), m.clone()))
}

/// `X^r` for `1 <= r <= N`, normalized into the dual canonical basis, with
/// its Lusztig parameter in the basis's own word.
pub fn minor_element(cb: &CanonicalBasis, r: usize) -> Result<(WordElement, Vec<i64>)> {
    let word = &cb.pbw.word;
    if r == 0 || r > word.len() {
        return Err(Error::Invalid(format!("minor index {r} out of range")));
    }
    let i = word.letters[r - 1];
    let n = cb.rank();
    let lambda = Weight::fundamental(n, i);
    let y = &word.letters[..r];
    let depth = cb.pbw.alg.cartan.weight_to_rootvec(&lambda.sub(&cb.pbw.alg.cartan.act(y, &lambda)))
        .ok_or_else(|| Error::Invalid("weight outside the root lattice".into()))?;
    let module = SimpleModule::new(cb.pbw.alg.clone(), lambda, depth.height())?;
    let x = matrix_coefficient_element(&module, y)?;
    normalize_dual_canonical(cb, &x)
}

/// `z_lambda`, normalized into the dual canonical basis.
pub fn z_element(cb: &CanonicalBasis, lambda: &Weight) -> Result<(WordElement, Vec<i64>)> {
    let cartan = &cb.pbw.alg.cartan;
    let w0 = cartan.some_reduced_word_w0();
    let depth = cartan
        .weight_to_rootvec(&lambda.sub(&cartan.act(&w0, lambda)))
        .ok_or_else(|| Error::Invalid("weight outside the root lattice".into()))?;
    let module = SimpleModule::new(cb.pbw.alg.clone(), lambda.clone(), depth.height())?;
    let x = matrix_coefficient_element(&module, &w0)?;
    normalize_dual_canonical(cb, &x)
}

/// Exponent `k` in `z_lambda z_mu = q^k z_{lambda+mu}` for the normalized
/// elements: `k = -(lambda, mu - w0 mu)`. The products
/// `(K_{-lambda} z_lambda)(K_{-mu} z_mu)` multiply without a q-power.
pub fn z_product_twist(cartan: &CartanData, lambda: &Weight, mu: &Weight) -> Result<i64> {
    let w0 = cartan.some_reduced_word_w0();
    let depth = cartan
        .weight_to_rootvec(&mu.sub(&cartan.act(&w0, mu)))
        .ok_or_else(|| Error::Invalid("weight outside the root lattice".into()))?;
    Ok(-cartan.form_weight_root(lambda, &depth))
}

/// Index `r(k)` (1-based) of the last occurrence of node `k` in the word.
pub fn last_occurrence(letters: &[usize], k: usize) -> Option<usize> {
    letters.iter().rposition(|&l| l == k).map(|p| p + 1)
}

/// Divided-power helper: `[n]_{q^d}!` as a rational scalar.
pub fn qfact_scalar(n: i64, d: i64) -> Result<RationalScalar> {
    Ok(RationalScalar::from(qfact(n, d)?))
}
