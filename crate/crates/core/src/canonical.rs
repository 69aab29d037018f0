//! The bar involution on PBW coordinates, the canonical basis `B`, the dual
//! canonical basis `B*`, Lusztig parameters and the multiplicativity tests.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::cartan::RootVec;
use crate::error::{Error, Result};
use crate::freealg::{Side, WordElement};
use crate::linalg::{self, Matrix};
use crate::pbw::{lex_less, PbwBasis};
use crate::scalar::{LaurentScalar, RationalScalar};

/// Canonical basis elements of one weight for one reduced word.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CanonicalSlice {
    pub word: String,
    pub weight: RootVec,
    /// PBW indices in the order used by the matrices.
    pub indices: Vec<Vec<i64>>,
    /// `B(m) = sum_n C[n][m] E(n)`.
    pub transition: Vec<Vec<LaurentScalar>>,
    /// Pivot-word coordinates of each `B(m)`.
    pub elements: Vec<Vec<RationalScalar>>,
}

/// Dual canonical basis elements of one weight for one reduced word.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualCanonicalSlice {
    pub word: String,
    pub weight: RootVec,
    pub indices: Vec<Vec<i64>>,
    /// `B*(m) = sum_n D[n][m] E(n)*`, `D = (C^{-1})^T`.
    pub transition: Vec<Vec<LaurentScalar>>,
    pub elements: Vec<Vec<RationalScalar>>,
}

impl CanonicalSlice {
    pub fn position(&self, m: &[i64]) -> Option<usize> {
        self.indices.iter().position(|x| x == m)
    }
}

impl DualCanonicalSlice {
    pub fn position(&self, m: &[i64]) -> Option<usize> {
        self.indices.iter().position(|x| x == m)
    }
}

fn to_laurent(x: &RationalScalar, what: &str) -> Result<LaurentScalar> {
    x.to_laurent().ok_or_else(|| Error::Convention(format!("{what} has a non-Laurent entry {x}")))
}

fn lmat(m: &[Vec<LaurentScalar>]) -> Matrix {
    m.iter().map(|r| r.iter().cloned().map(RationalScalar::from).collect()).collect()
}

/// Canonical and dual canonical bases for one reduced word, computed per
/// weight on demand.
pub struct CanonicalBasis {
    pub pbw: Arc<PbwBasis>,
    slices: Mutex<HashMap<RootVec, Arc<CanonicalSlice>>>,
    duals: Mutex<HashMap<RootVec, Arc<DualCanonicalSlice>>>,
}

impl CanonicalBasis {
    pub fn new(pbw: Arc<PbwBasis>) -> Self {
        CanonicalBasis { pbw, slices: Mutex::new(HashMap::new()), duals: Mutex::new(HashMap::new()) }
    }

    pub fn word(&self) -> String {
        self.pbw.word.to_string()
    }

    pub fn rank(&self) -> usize {
        self.pbw.alg.rank()
    }

    /// Seed the slice cache (used by the on-disk cache).
    pub fn insert_slice(&self, slice: CanonicalSlice) {
        self.slices.lock().expect("slice cache poisoned").insert(slice.weight.clone(), Arc::new(slice));
    }

    /// Matrix of `eta` on PBW coordinates: `eta(E(m)) = sum_n M[n][m] E(n)`.
    pub fn bar_matrix(&self, beta: &RootVec) -> Result<Vec<Vec<LaurentScalar>>> {
        let t = self.pbw.transition(beta)?;
        let barred: Matrix = t.to_pivot.iter().map(|r| r.iter().map(RationalScalar::bar).collect()).collect();
        let m = linalg::mat_mul(&t.from_pivot, &barred);
        m.iter().map(|r| r.iter().map(|x| to_laurent(x, "bar matrix")).collect()).collect()
    }

    pub fn canonical_slice(&self, beta: &RootVec) -> Result<Arc<CanonicalSlice>> {
        if let Some(s) = self.slices.lock().expect("slice cache poisoned").get(beta) {
            return Ok(s.clone());
        }
        let s = Arc::new(self.compute_slice(beta)?);
        self.slices.lock().expect("slice cache poisoned").insert(beta.clone(), s.clone());
        Ok(s)
    }

    fn compute_slice(&self, beta: &RootVec) -> Result<CanonicalSlice> {
        let t = self.pbw.transition(beta)?;
        let k = t.indices.len();
        let m = self.bar_matrix(beta)?;
        // order: n before m whenever eta(E(m)) involves E(n)
        let order = topological_order(&m)?;
        for i in 0..k {
            if !m[i][i].is_one() {
                return Err(Error::Convention(format!("bar matrix diagonal is {} at {:?}", m[i][i], t.indices[i])));
            }
        }
        // columns of C, filled in topological order
        let mut c: Vec<Option<Vec<LaurentScalar>>> = vec![None; k];
        for (pos, &mi) in order.iter().enumerate() {
            // rho: eta(E(m)) - E(m) in the basis of previously built B(n)
            let mut r: Vec<LaurentScalar> = m.iter().map(|row| row[mi].clone()).collect();
            r[mi] = &r[mi] - &LaurentScalar::one();
            let mut col = vec![LaurentScalar::zero(); k];
            col[mi] = LaurentScalar::one();
            // peel off from the top of the order downward
            for &ni in order[..pos].iter().rev() {
                let rho = r[ni].clone();
                if rho.is_zero() {
                    continue;
                }
                if !(&rho + &rho.bar()).is_zero() {
                    return Err(Error::Convention(format!(
                        "bar recursion coefficient {rho} at {:?} is not antisymmetric",
                        t.indices[ni]
                    )));
                }
                let bn = c[ni].as_ref().expect("earlier column");
                for (x, y) in r.iter_mut().zip(bn) {
                    *x = &*x - &(&rho * y);
                }
                let p = rho.positive_part();
                for (x, y) in col.iter_mut().zip(bn) {
                    *x = &*x + &(&p * y);
                }
            }
            if r.iter().any(|x| !x.is_zero()) {
                return Err(Error::Convention("bar matrix is not triangular in the discovered order".into()));
            }
            c[mi] = Some(col);
        }
        let cols: Vec<Vec<LaurentScalar>> = c.into_iter().map(|x| x.expect("all columns built")).collect();
        let transition: Vec<Vec<LaurentScalar>> = (0..k).map(|n| (0..k).map(|j| cols[j][n].clone()).collect()).collect();
        let elements = (0..k)
            .map(|j| {
                let v: Vec<RationalScalar> = cols[j].iter().cloned().map(RationalScalar::from).collect();
                linalg::mat_vec(&t.to_pivot, &v)
            })
            .collect();
        Ok(CanonicalSlice { word: self.word(), weight: beta.clone(), indices: t.indices.clone(), transition, elements })
    }

    pub fn dual_canonical_slice(&self, beta: &RootVec) -> Result<Arc<DualCanonicalSlice>> {
        if let Some(s) = self.duals.lock().expect("slice cache poisoned").get(beta) {
            return Ok(s.clone());
        }
        let cs = self.canonical_slice(beta)?;
        let c = lmat(&cs.transition);
        let cinv = linalg::inverse(&c).ok_or_else(|| Error::Convention("canonical transition is singular".into()))?;
        let d = linalg::transpose(&cinv);
        let transition: Vec<Vec<LaurentScalar>> = d
            .iter()
            .map(|r| r.iter().map(|x| to_laurent(x, "dual canonical transition")).collect())
            .collect::<Result<_>>()?;
        let k = cs.indices.len();
        let duals: Vec<Vec<RationalScalar>> =
            cs.indices.iter().map(|m| self.pbw.dual_coords(m)).collect::<Result<_>>()?;
        let elements = (0..k)
            .map(|j| {
                let mut acc = vec![RationalScalar::zero(); duals[0].len()];
                for n in 0..k {
                    if d[n][j].is_zero() {
                        continue;
                    }
                    for (a, b) in acc.iter_mut().zip(&duals[n]) {
                        *a += &(&d[n][j] * b);
                    }
                }
                acc
            })
            .collect();
        let s = Arc::new(DualCanonicalSlice {
            word: self.word(),
            weight: beta.clone(),
            indices: cs.indices.clone(),
            transition,
            elements,
        });
        self.duals.lock().expect("slice cache poisoned").insert(beta.clone(), s.clone());
        Ok(s)
    }

    fn weight_of(&self, m: &[i64]) -> RootVec {
        self.pbw.weight_of(m)
    }

    pub fn canonical_element(&self, m: &[i64]) -> Result<WordElement> {
        let beta = self.weight_of(m);
        if beta.is_zero() {
            return Ok(WordElement::one(Side::E));
        }
        let s = self.canonical_slice(&beta)?;
        let j = s.position(m).ok_or_else(|| Error::Invalid(format!("no PBW index {m:?}")))?;
        self.pbw.alg.lift(&beta, &s.elements[j])
    }

    pub fn dual_canonical_element(&self, m: &[i64]) -> Result<WordElement> {
        let beta = self.weight_of(m);
        if beta.is_zero() {
            return Ok(WordElement::one(Side::E));
        }
        let s = self.dual_canonical_slice(&beta)?;
        let j = s.position(m).ok_or_else(|| Error::Invalid(format!("no PBW index {m:?}")))?;
        self.pbw.alg.lift(&beta, &s.elements[j])
    }

    /// Coordinates of a homogeneous element in the dual PBW basis.
    pub fn dual_pbw_coordinates(&self, x: &WordElement) -> Result<BTreeMap<Vec<i64>, RationalScalar>> {
        let mut out = BTreeMap::new();
        for (m, c) in self.pbw.pbw_coordinates(x)? {
            let s = self.pbw.dual_scalar(&m)?;
            out.insert(m, &c / &s);
        }
        Ok(out)
    }

    /// Coordinates of a homogeneous element in the dual canonical basis.
    pub fn dual_canonical_coordinates(
        &self,
        x: &WordElement,
        beta: &RootVec,
    ) -> Result<Vec<(Vec<i64>, RationalScalar)>> {
        let s = self.dual_canonical_slice(beta)?;
        let a = self.dual_pbw_coordinates(x)?;
        let cs = self.canonical_slice(beta)?;
        // b = C^T a
        Ok(s.indices
            .iter()
            .enumerate()
            .map(|(j, m)| {
                let mut acc = RationalScalar::zero();
                for (n, idx) in cs.indices.iter().enumerate() {
                    if let Some(v) = a.get(idx) {
                        if !cs.transition[n][j].is_zero() {
                            acc += &(v * &RationalScalar::from(cs.transition[n][j].clone()));
                        }
                    }
                }
                (m.clone(), acc)
            })
            .collect())
    }

    /// `(k, m)` with `x = q^k B*(m)`, if such exist.
    pub fn is_dual_canonical(&self, x: &WordElement) -> Result<Option<(i64, Vec<i64>)>> {
        let n = self.rank();
        let Some(beta) = x.weight(n) else { return Ok(None) };
        if beta.is_zero() {
            return Ok(x.coeff(&[]).is_q_power().and_then(|e| e.integer()).map(|k| (k, vec![0; self.pbw.len()])));
        }
        let coords = self.dual_canonical_coordinates(x, &beta)?;
        let nz: Vec<_> = coords.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if nz.len() != 1 {
            return Ok(None);
        }
        let (m, c) = &nz[0];
        Ok(c.is_q_power().and_then(|e| e.integer()).map(|k| (k, m.clone())))
    }

    /// The index `m` with `x = q^k E(m)* mod q^{k+1} L*`, for `x` proportional to
    /// a dual canonical element.
    pub fn lusztig_param(&self, x: &WordElement) -> Result<(i64, Vec<i64>)> {
        let coords = self.dual_pbw_coordinates(x)?;
        let mut best: Option<i64> = None;
        for c in coords.values() {
            let v = c.valuation().ok_or_else(|| Error::Invalid("zero coefficient".into()))?;
            best = Some(best.map_or(v, |b| b.min(v)));
        }
        let k = best.ok_or_else(|| Error::Invalid("zero element has no parameter".into()))?;
        let lead: Vec<_> = coords.iter().filter(|(_, c)| c.valuation() == Some(k)).collect();
        if lead.len() != 1 {
            return Err(Error::Invalid("element is not proportional to a dual canonical element".into()));
        }
        let (m, c) = lead[0];
        let one = num_rational::BigRational::from_integer(1.into());
        let unit = c.shift(-k).value_at_zero().is_some_and(|v| v == one || v == -one.clone());
        if !unit {
            return Err(Error::Invalid("leading coefficient is not a unit".into()));
        }
        Ok((k, m.clone()))
    }

    /// `m` with `xy = q^m yx` in `U_q(n)`.
    pub fn q_commute_check(&self, x: &WordElement, y: &WordElement) -> Result<Option<i64>> {
        q_commute(&self.pbw.alg, x, y)
    }

    /// Whether `B*(m) - E*(m)` lies strictly below `m` in the PBW filtration.
    pub fn dual_is_pbw_lower(&self, m: &[i64]) -> Result<bool> {
        if !self.pbw.alg.cartan.is_quiver_adapted(&self.pbw.word.letters) {
            return Err(Error::Invalid(format!("word {} is not quiver-adapted", self.word())));
        }
        let beta = self.weight_of(m);
        if beta.is_zero() {
            return Ok(true);
        }
        let s = self.dual_canonical_slice(&beta)?;
        let j = s.position(m).ok_or_else(|| Error::Invalid(format!("no PBW index {m:?}")))?;
        Ok(s.indices.iter().enumerate().all(|(n, idx)| n == j || s.transition[n][j].is_zero() || lex_less(idx, m)))
    }

    /// The index `m'` with `sigma(B*(m))` proportional to `B*(m')`.
    pub fn sigma_param(&self, m: &[i64]) -> Result<(i64, Vec<i64>)> {
        let x = self.dual_canonical_element(m)?;
        self.is_dual_canonical(&x.sigma())?
            .ok_or_else(|| Error::Convention(format!("sigma(B*({m:?})) is not a dual canonical element")))
    }

    /// `k` with `eta(B*(m)) = q^k sigma(B*(m))`, if it exists.
    pub fn twist_exponent(&self, m: &[i64]) -> Result<Option<i64>> {
        let x = self.dual_canonical_element(m)?;
        proportional_power(&self.pbw.alg, &x.eta(), &x.sigma())
    }

    /// The exponent predicted for [`Self::twist_exponent`] at weight `beta`:
    /// `sum_i d_i beta_i - (beta, beta) / 2`.
    pub fn predicted_twist(&self, beta: &RootVec) -> i64 {
        let c = &self.pbw.alg.cartan;
        let lin: i64 = beta.0.iter().zip(&c.symmetrizers).map(|(b, d)| b * d).sum();
        lin - c.form_roots(beta, beta) / 2
    }

    /// `eta(B*(m)) = q^k sigma(B*(m))` with the predicted `k`.
    pub fn twisted_identity(&self, m: &[i64]) -> Result<bool> {
        Ok(self.twist_exponent(m)? == Some(self.predicted_twist(&self.weight_of(m))))
    }
}

/// `k` with `x = q^k y` in the quotient, for homogeneous elements.
pub fn proportional_power(alg: &crate::freealg::Algebra, x: &WordElement, y: &WordElement) -> Result<Option<i64>> {
    let n = alg.rank();
    let (wx, wy) = (x.weight(n), y.weight(n));
    if x.is_zero() || y.is_zero() {
        return Ok(None);
    }
    if wx != wy {
        return Ok(None);
    }
    let beta = wx.ok_or_else(|| Error::Invalid("inhomogeneous element".into()))?;
    if beta.is_zero() {
        return Ok((&x.coeff(&[]) / &y.coeff(&[])).is_q_power().and_then(|e| e.integer()));
    }
    let u = alg.pairing_vector(x, &beta)?;
    let v = alg.pairing_vector(y, &beta)?;
    let mut ratio: Option<RationalScalar> = None;
    for (a, b) in u.iter().zip(&v) {
        match (a.is_zero(), b.is_zero()) {
            (true, true) => continue,
            (false, false) => {
                let r = a / b;
                match &ratio {
                    None => ratio = Some(r),
                    Some(prev) if *prev == r => {}
                    Some(_) => return Ok(None),
                }
            }
            _ => return Ok(None),
        }
    }
    Ok(ratio.and_then(|r| r.is_q_power()).and_then(|e| e.integer()))
}

/// `m` with `xy = q^m yx`.
pub fn q_commute(alg: &crate::freealg::Algebra, x: &WordElement, y: &WordElement) -> Result<Option<i64>> {
    let xy = x.concat_multiply(y)?;
    let yx = y.concat_multiply(x)?;
    if xy.is_zero() && yx.is_zero() {
        return Ok(Some(0));
    }
    proportional_power(alg, &xy, &yx)
}

/// An order on indices compatible with the support of a square matrix: `n`
/// comes before `m` whenever `M[n][m] != 0`.
fn topological_order(m: &[Vec<LaurentScalar>]) -> Result<Vec<usize>> {
    let k = m.len();
    let mut indeg = vec![0usize; k];
    for (n, row) in m.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if n != j && !x.is_zero() {
                indeg[j] += 1;
            }
        }
    }
    let mut out = Vec::with_capacity(k);
    let mut ready: Vec<usize> = (0..k).filter(|&i| indeg[i] == 0).collect();
    while let Some(n) = ready.first().copied() {
        ready.remove(0);
        out.push(n);
        for j in 0..k {
            if n != j && !m[n][j].is_zero() {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    ready.push(j);
                    ready.sort_unstable();
                }
            }
        }
    }
    if out.len() != k {
        return Err(Error::Convention("bar matrix support has a cycle".into()));
    }
    Ok(out)
}
