//! Adapted algebras generated by the quantum minors `X^r` of a reduced word,
//! their parameter semigroups, the q-center decomposition and the
//! q-commutation versus multiplicativity verifier.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::canonical::{q_commute, CanonicalBasis};
use crate::cartan::{format_letters, weights_up_to_height, RootVec, Weight};
use crate::error::{Error, Result};
use crate::freealg::{Side, WordElement};
use crate::highest_weight::{minor_element, z_element};
use crate::linalg;
use crate::scalar::RationalScalar;

pub type Param = Vec<i64>;

/// The generators `X^1, ..., X^N` of `A_w` for one reduced word `w`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdaptedAlgebra {
    pub word: String,
    pub elements: Vec<WordElement>,
    /// Lusztig parameters in the word's own parametrization.
    pub params: Vec<Param>,
    /// `q_commute[r][s] = m` with `X^r X^s = q^m X^s X^r`.
    pub q_commute: Vec<Vec<i64>>,
}

pub fn adapted_algebra(cb: &CanonicalBasis) -> Result<AdaptedAlgebra> {
    let n = cb.pbw.len();
    let mut elements = Vec::with_capacity(n);
    let mut params = Vec::with_capacity(n);
    for r in 1..=n {
        let (x, m) = minor_element(cb, r)?;
        elements.push(x);
        params.push(m);
    }
    let mut qc = vec![vec![0; n]; n];
    for r in 0..n {
        for s in r + 1..n {
            let m = q_commute(&cb.pbw.alg, &elements[r], &elements[s])?
                .ok_or_else(|| Error::Convention(format!("X^{} and X^{} do not q-commute", r + 1, s + 1)))?;
            qc[r][s] = m;
            qc[s][r] = -m;
        }
    }
    Ok(AdaptedAlgebra { word: cb.word(), elements, params, q_commute: qc })
}

/// A finitely generated subsemigroup of `N^N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemigroupCone {
    pub dim: usize,
    pub generators: Vec<Param>,
    /// The word of the parametrization.
    pub word: String,
}

impl SemigroupCone {
    pub fn new(word: impl Into<String>, mut generators: Vec<Param>) -> Self {
        generators.sort();
        generators.dedup();
        let dim = generators.first().map_or(0, Vec::len);
        SemigroupCone { dim, generators, word: word.into() }
    }

    pub fn generator_set(&self) -> BTreeSet<Param> {
        self.generators.iter().cloned().collect()
    }

    /// Nonnegative integer coefficients expressing `p` in the generators.
    pub fn decompose(&self, p: &[i64]) -> Option<Vec<i64>> {
        fn rec(gens: &[Param], k: usize, rest: &mut Vec<i64>, coef: &mut Vec<i64>) -> bool {
            if rest.iter().all(|&x| x == 0) {
                return true;
            }
            if k == gens.len() {
                return false;
            }
            let g = &gens[k];
            let max = g
                .iter()
                .zip(rest.iter())
                .filter(|(gi, _)| **gi > 0)
                .map(|(gi, ri)| ri / gi)
                .min()
                .unwrap_or(0);
            for a in (0..=max).rev() {
                for (r, gi) in rest.iter_mut().zip(g) {
                    *r -= a * gi;
                }
                coef[k] = a;
                if rest.iter().all(|&x| x >= 0) && rec(gens, k + 1, rest, coef) {
                    return true;
                }
                for (r, gi) in rest.iter_mut().zip(g) {
                    *r += a * gi;
                }
            }
            coef[k] = 0;
            false
        }
        if p.len() != self.dim || p.iter().any(|&x| x < 0) {
            return None;
        }
        let mut rest = p.to_vec();
        let mut coef = vec![0; self.generators.len()];
        rec(&self.generators, 0, &mut rest, &mut coef).then_some(coef)
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        self.decompose(p).is_some()
    }

    /// No generator lies in the semigroup of the others.
    pub fn is_minimal(&self) -> bool {
        (0..self.generators.len()).all(|k| {
            let mut others = self.generators.clone();
            let g = others.remove(k);
            !SemigroupCone::new(self.word.clone(), others).contains(&g)
        })
    }

    fn det(&self) -> Option<RationalScalar> {
        if self.generators.len() != self.dim {
            return None;
        }
        let m: linalg::Matrix =
            self.generators.iter().map(|g| g.iter().map(|&x| RationalScalar::from_int(x)).collect()).collect();
        // determinant via elimination on integer entries
        let mut a = m;
        let n = self.dim;
        let mut det = RationalScalar::one();
        for c in 0..n {
            let p = (c..n).find(|&r| !a[r][c].is_zero())?;
            if p != c {
                a.swap(p, c);
                det = -det;
            }
            det = &det * &a[c][c];
            let inv = a[c][c].inv().ok()?;
            for r in c + 1..n {
                if a[r][c].is_zero() {
                    continue;
                }
                let f = &a[r][c] * &inv;
                for k in c..n {
                    let t = &f * &a[c][k];
                    a[r][k] = &a[r][k] - &t;
                }
            }
        }
        Some(det)
    }

    /// `N` linearly independent generators.
    pub fn is_simplicial(&self) -> bool {
        self.det().is_some_and(|d| !d.is_zero())
    }

    /// The generators span `Z^N` as a group (unimodular).
    pub fn generates_lattice(&self) -> bool {
        self.det().is_some_and(|d| d == RationalScalar::one() || d == -RationalScalar::one())
    }

    /// All points with entries at most `bound` (as a set).
    pub fn points_with_entries_at_most(&self, bound: i64) -> BTreeSet<Param> {
        lattice_box(self.dim, bound).into_iter().filter(|p| self.contains(p)).collect()
    }
}

/// All points of `N^dim` with entries at most `bound`.
pub fn lattice_box(dim: usize, bound: i64) -> Vec<Param> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=bound).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

/// `C^{gen}_{param}`: parameters, for `param_cb`'s word, of the generators of
/// the adapted algebra of `gen_cb`'s word.
pub fn cone(param_cb: &CanonicalBasis, gen_cb: &CanonicalBasis) -> Result<SemigroupCone> {
    let cartan = &param_cb.pbw.alg.cartan;
    if !cartan.is_quiver_adapted(&param_cb.pbw.word.letters) {
        return Err(Error::Invalid(format!("word {} is not quiver-adapted", param_cb.word())));
    }
    let minors = adapted_algebra(gen_cb)?;
    let gens = minors
        .elements
        .iter()
        .map(|x| {
            param_cb
                .is_dual_canonical(x)?
                .map(|(_, m)| m)
                .ok_or_else(|| Error::Convention("minor is not a dual canonical element".into()))
        })
        .collect::<Result<_>>()?;
    Ok(SemigroupCone::new(param_cb.word(), gens))
}

/// Image of a cone under `sigma`, read in the same parametrization.
pub fn sigma_cone(cb: &CanonicalBasis, c: &SemigroupCone) -> Result<SemigroupCone> {
    let gens = c.generators.iter().map(|g| cb.sigma_param(g).map(|(_, m)| m)).collect::<Result<_>>()?;
    Ok(SemigroupCone::new(c.word.clone(), gens))
}

/// Outcome of a verification run.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct VerificationReport {
    pub type_label: String,
    pub word: String,
    pub height: i64,
    pub pairs_examined: usize,
    pub q_commuting: usize,
    pub multiplicative: usize,
    /// Multiplicative but not q-commuting.
    pub mult_not_qcommute: Vec<(Param, Param)>,
    /// q-commuting but not multiplicative.
    pub qcommute_not_mult: Vec<(Param, Param)>,
    /// Other failed checks, as human-readable lines.
    pub failures: Vec<String>,
    /// Items skipped because they exceed the algebra's height cap.
    pub skipped: usize,
    /// Informational lines, such as computed generator lists.
    #[serde(default)]
    pub notes: Vec<String>,
    pub elapsed_ms: u128,
}

impl VerificationReport {
    pub(crate) fn start(cb: &CanonicalBasis, height: i64) -> Self {
        VerificationReport {
            type_label: cb.pbw.alg.cartan.label.to_string(),
            word: cb.word(),
            height,
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.mult_not_qcommute.is_empty() && self.qcommute_not_mult.is_empty() && self.failures.is_empty()
    }
}

/// All Lusztig parameters of weight height between 1 and `height`.
pub fn params_up_to(cb: &CanonicalBasis, height: i64) -> Vec<Param> {
    let n = cb.rank();
    weights_up_to_height(n, height).iter().flat_map(|b| cb.pbw.indices(b)).collect()
}

fn height_of(cb: &CanonicalBasis, m: &[i64]) -> i64 {
    cb.pbw.weight_of(m).height()
}

/// Memoized dual canonical elements and pair predicates.
struct Pairs<'a> {
    cb: &'a CanonicalBasis,
    elems: Mutex<HashMap<Param, WordElement>>,
}

impl<'a> Pairs<'a> {
    fn new(cb: &'a CanonicalBasis) -> Self {
        Pairs { cb, elems: Mutex::new(HashMap::new()) }
    }

    fn elem(&self, m: &[i64]) -> Result<WordElement> {
        if let Some(x) = self.elems.lock().expect("memo poisoned").get(m) {
            return Ok(x.clone());
        }
        let x = self.cb.dual_canonical_element(m)?;
        self.elems.lock().expect("memo poisoned").insert(m.to_vec(), x.clone());
        Ok(x)
    }

    /// `Some(k, m)` with `x y = q^k B*(m)`.
    fn product(&self, a: &[i64], b: &[i64]) -> Result<Option<(i64, Param)>> {
        let p = self.elem(a)?.concat_multiply(&self.elem(b)?)?;
        self.cb.is_dual_canonical(&p)
    }

    fn q_commute(&self, a: &[i64], b: &[i64]) -> Result<Option<i64>> {
        q_commute(&self.cb.pbw.alg, &self.elem(a)?, &self.elem(b)?)
    }
}

/// Multiplicativity and maximality of the semigroup generated by `candidates`
/// (parameters for `cb`'s word), on elements of height at most `height`.
pub fn verify_adapted(cb: &CanonicalBasis, candidates: &SemigroupCone, height: i64) -> Result<VerificationReport> {
    let t0 = Instant::now();
    let mut rep = VerificationReport::start(cb, height);
    let cap = cb.pbw.alg.height_cap;
    let pairs = Pairs::new(cb);
    let all = params_up_to(cb, height);
    // multiplicativity: ordered products of generator powers
    for p in all.iter().filter(|p| candidates.contains(p)) {
        let coef = candidates.decompose(p).expect("member");
        let mut x = WordElement::one(Side::E);
        for (g, &a) in candidates.generators.iter().zip(&coef) {
            for _ in 0..a {
                x = x.concat_multiply(&pairs.elem(g)?)?;
            }
        }
        rep.pairs_examined += 1;
        match cb.is_dual_canonical(&x)? {
            Some((_, m)) if m == *p => rep.multiplicative += 1,
            Some((_, m)) => rep.failures.push(format!("product for {p:?} has parameter {m:?}")),
            None => rep.failures.push(format!("product for {p:?} is not in the dual canonical basis up to q-power")),
        }
    }
    // maximality: every outside element has a non-multiplicative partner in
    // the semigroup; partners are searched by height under the cap
    let partners: Vec<Param> = {
        let mut v: Vec<Param> = params_up_to(cb, cap).into_iter().filter(|p| candidates.contains(p)).collect();
        v.sort_by_key(|p| height_of(cb, p));
        v
    };
    let max_gen = candidates.generators.iter().map(|g| height_of(cb, g)).max().unwrap_or(0);
    for q in all.iter().filter(|p| !candidates.contains(p)) {
        let hq = height_of(cb, q);
        let mut witnessed = false;
        for g in partners.iter().take_while(|g| hq + height_of(cb, g) <= cap) {
            if pairs.product(g, q)?.is_none() {
                witnessed = true;
                break;
            }
        }
        if witnessed {
            continue;
        }
        if hq + max_gen > cap {
            rep.skipped += 1;
        } else {
            rep.failures.push(format!("{q:?} is multiplicative with every partner under the cap"));
        }
    }
    rep.elapsed_ms = t0.elapsed().as_millis();
    Ok(rep)
}

/// `(z_part, h_part)` of `m`, with `n[k]` the parameter of `z_{varpi_k}` and
/// `z_part = sum_k min_{r in I_k} m_r n_k`.
pub fn qcenter_decompose(m: &[i64], letters: &[usize], n: &[Param]) -> (Param, Param) {
    let len = m.len();
    let mut z = vec![0; len];
    for (k, nk) in n.iter().enumerate() {
        let mk = letters.iter().zip(m).filter(|(l, _)| **l == k).map(|(_, v)| *v).min().unwrap_or(0);
        for (zi, ni) in z.iter_mut().zip(nk) {
            *zi += mk * ni;
        }
    }
    let h = m.iter().zip(&z).map(|(a, b)| a - b).collect();
    (z, h)
}

/// Parameters `n_k` of the `z_{varpi_k}`.
pub fn center_parameters(cb: &CanonicalBasis) -> Result<Vec<Param>> {
    let n = cb.rank();
    (0..n).map(|k| z_element(cb, &Weight::fundamental(n, k)).map(|(_, m)| m)).collect()
}

/// Multiplicativity against the `z_{varpi_k}`, factorization through the
/// q-center decomposition, and freeness of the `z h` products.
pub fn qcenter_tests(cb: &CanonicalBasis, height: i64) -> Result<VerificationReport> {
    let t0 = Instant::now();
    let mut rep = VerificationReport::start(cb, height);
    let cap = cb.pbw.alg.height_cap;
    let ns = center_parameters(cb)?;
    let pairs = Pairs::new(cb);
    let all = params_up_to(cb, height);
    for m in &all {
        let hm = height_of(cb, m);
        // (a) b* and z_{varpi_k} are multiplicative, with additive parameters
        for nk in &ns {
            if hm + height_of(cb, nk) > cap {
                rep.skipped += 1;
                continue;
            }
            rep.pairs_examined += 1;
            let want: Param = m.iter().zip(nk).map(|(a, b)| a + b).collect();
            match pairs.product(m, nk)? {
                Some((_, p)) if p == want => rep.multiplicative += 1,
                other => rep.failures.push(format!("{m:?} * z{nk:?} gave {other:?}")),
            }
        }
    }
    qcenter_factorization_into(cb, &pairs, height, &ns, &mut rep)?;
    rep.elapsed_ms = t0.elapsed().as_millis();
    Ok(rep)
}

/// Factorization `b* = q^k z h` through `qcenter_decompose`, and linear
/// independence of the `z h` products, at heights up to `height`.
pub fn qcenter_factorization(cb: &CanonicalBasis, height: i64) -> Result<VerificationReport> {
    let t0 = Instant::now();
    let mut rep = VerificationReport::start(cb, height);
    let ns = center_parameters(cb)?;
    qcenter_factorization_into(cb, &Pairs::new(cb), height, &ns, &mut rep)?;
    rep.elapsed_ms = t0.elapsed().as_millis();
    Ok(rep)
}

fn qcenter_factorization_into(
    cb: &CanonicalBasis,
    pairs: &Pairs<'_>,
    height: i64,
    ns: &[Param],
    rep: &mut VerificationReport,
) -> Result<()> {
    let letters = &cb.pbw.word.letters;
    for beta in weights_up_to_height(cb.rank(), height) {
        let idx = cb.pbw.indices(&beta);
        let mut rows = Vec::with_capacity(idx.len());
        for m in &idx {
            let (z, h) = qcenter_decompose(m, letters, ns);
            let x = pairs.elem(&z)?.concat_multiply(&pairs.elem(&h)?)?;
            match cb.is_dual_canonical(&x)? {
                Some((_, p)) if p == *m => {}
                other => rep.failures.push(format!("{m:?} does not factor as z{z:?} h{h:?}: {other:?}")),
            }
            rows.push(cb.pbw.alg.reduce(&x, &beta)?);
        }
        if linalg::rank(&rows) != idx.len() {
            rep.failures.push(format!("z h products of weight {beta} are dependent"));
        }
    }
    Ok(())
}

/// The semigroup `P(Z_q)` generated by the `n_k`.
pub fn center_semigroup(cb: &CanonicalBasis) -> Result<SemigroupCone> {
    Ok(SemigroupCone::new(cb.word(), center_parameters(cb)?))
}

/// Minimal nonzero elements of a finite set closed under the relevant sums.
fn minimal_generators(points: &BTreeSet<Param>) -> Vec<Param> {
    let nonzero: Vec<&Param> = points.iter().filter(|p| p.iter().any(|&x| x != 0)).collect();
    nonzero
        .iter()
        .filter(|p| {
            !nonzero.iter().any(|a| {
                *a != **p && {
                    let rest: Param = p.iter().zip(a.iter()).map(|(x, y)| x - y).collect();
                    rest.iter().all(|&v| v >= 0) && rest.iter().any(|&v| v != 0) && points.contains(&rest)
                }
            })
        })
        .map(|p| (*p).clone())
        .collect()
}

/// Intersection, up to `height`, of the parameter sets of the adapted
/// algebras of `gen_bases`, read in `param_cb`'s parametrization.
pub fn intersection_semigroup(param_cb: &CanonicalBasis, gen_bases: &[&CanonicalBasis], height: i64) -> Result<SemigroupCone> {
    let cones: Vec<SemigroupCone> = gen_bases.iter().map(|g| cone(param_cb, g)).collect::<Result<_>>()?;
    let mut points: BTreeSet<Param> = BTreeSet::new();
    points.insert(vec![0; param_cb.pbw.len()]);
    for p in params_up_to(param_cb, height) {
        if cones.iter().all(|c| c.contains(&p)) {
            points.insert(p);
        }
    }
    Ok(SemigroupCone::new(param_cb.word(), minimal_generators(&points)))
}

/// Exhaustive check of "q-commute if and only if multiplicative" for pairs of
/// dual canonical elements whose product has height at most `height`.
pub fn bz_verify(cb: &CanonicalBasis, height: i64) -> Result<VerificationReport> {
    let t0 = Instant::now();
    let mut rep = VerificationReport::start(cb, height);
    let pairs = Pairs::new(cb);
    let all = params_up_to(cb, height);
    for (a_idx, a) in all.iter().enumerate() {
        for b in &all[a_idx..] {
            if height_of(cb, a) + height_of(cb, b) > height {
                continue;
            }
            rep.pairs_examined += 1;
            let qc = pairs.q_commute(a, b)?.is_some();
            let mult = pairs.product(a, b)?.is_some();
            rep.q_commuting += qc as usize;
            rep.multiplicative += mult as usize;
            match (qc, mult) {
                (false, true) => rep.mult_not_qcommute.push((a.clone(), b.clone())),
                (true, false) => rep.qcommute_not_mult.push((a.clone(), b.clone())),
                _ => {}
            }
        }
    }
    rep.elapsed_ms = t0.elapsed().as_millis();
    Ok(rep)
}

/// Generator lists of the two cones for A2 with parametrizing word `121`.
pub fn a2_listed_cones() -> BTreeMap<&'static str, Vec<Param>> {
    BTreeMap::from([
        ("C(121,121)", vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 0, 1]]),
        ("C(121,212)", vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 1]]),
    ])
}

/// Generator lists of the six cones for B2 with parametrizing word `2121`.
pub fn b2_listed_cones() -> BTreeMap<&'static str, Vec<Param>> {
    let c = [1, 0, 1, 0];
    let d = [0, 1, 0, 1];
    let with_center = |a: [i64; 4], b: [i64; 4]| vec![a.to_vec(), b.to_vec(), c.to_vec(), d.to_vec()];
    BTreeMap::from([
        ("C(2121,2121)", with_center([1, 0, 0, 0], [0, 1, 0, 0])),
        ("C(2121,1212)", with_center([0, 0, 0, 1], [1, 0, 0, 1])),
        ("sigma C(2121,2121)", with_center([1, 0, 0, 0], [2, 0, 0, 1])),
        ("sigma C(2121,1212)", with_center([0, 0, 0, 1], [0, 0, 1, 0])),
        ("D", with_center([0, 1, 0, 0], [0, 0, 1, 0])),
        ("sigma D", with_center([2, 0, 0, 1], [1, 0, 0, 1])),
    ])
}

/// Coverage of the box `[0, bound]^4` by the six cones, and factorization of
/// each covered element of height at most `height` over the union of the
/// generator lists.
pub fn b2_decomposition_check(cb: &CanonicalBasis, bound: i64, height: i64) -> Result<VerificationReport> {
    let t0 = Instant::now();
    let mut rep = VerificationReport::start(cb, height);
    if cb.pbw.alg.cartan.label.to_string() != "B2" || format_letters(&cb.pbw.word.letters) != "2121" {
        return Err(Error::Invalid("the decomposition check is for B2 with the word 2121".into()));
    }
    let cones: Vec<SemigroupCone> =
        b2_listed_cones().into_values().map(|g| SemigroupCone::new(cb.word(), g)).collect();
    for p in lattice_box(4, bound) {
        rep.pairs_examined += 1;
        if !cones.iter().any(|c| c.contains(&p)) {
            rep.failures.push(format!("{p:?} is not covered"));
        }
    }
    let pairs = Pairs::new(cb);
    for p in params_up_to(cb, height) {
        let Some((cone, coef)) = cones.iter().find_map(|c| c.decompose(&p).map(|k| (c, k))) else {
            rep.failures.push(format!("{p:?} is not covered"));
            continue;
        };
        let mut x = WordElement::one(Side::E);
        for (g, &a) in cone.generators.iter().zip(&coef) {
            for _ in 0..a {
                x = x.concat_multiply(&pairs.elem(g)?)?;
            }
        }
        match cb.is_dual_canonical(&x)? {
            Some((_, m)) if m == p => rep.multiplicative += 1,
            other => rep.failures.push(format!("{p:?} does not factor over the generators: {other:?}")),
        }
    }
    rep.elapsed_ms = t0.elapsed().as_millis();
    Ok(rep)
}

/// Predicted parameter of `X^r` for a quiver-adapted word: entry `k` is `1`
/// when `i_k = i_r` and `k <= r`.
pub fn minor_param_formula(letters: &[usize], r: usize) -> Param {
    let ir = letters[r - 1];
    letters.iter().enumerate().map(|(k, &l)| i64::from(l == ir && k < r)).collect()
}

/// Linear independence of the monomials `prod_r (X^r)^{a_r}` (fixed order)
/// of total height at most `height`, weight by weight.
pub fn minor_monomials_independent(cb: &CanonicalBasis, minors: &AdaptedAlgebra, height: i64) -> Result<bool> {
    let alg = &cb.pbw.alg;
    let n = cb.rank();
    let heights: Vec<RootVec> = minors.elements.iter().map(|x| x.weight(n).expect("homogeneous")).collect();
    let mut by_weight: BTreeMap<RootVec, Vec<Vec<RationalScalar>>> = BTreeMap::new();
    fn rec(
        k: usize,
        cur: WordElement,
        wt: RootVec,
        height: i64,
        minors: &AdaptedAlgebra,
        heights: &[RootVec],
        alg: &crate::freealg::Algebra,
        out: &mut BTreeMap<RootVec, Vec<Vec<RationalScalar>>>,
    ) -> Result<()> {
        if k == minors.elements.len() {
            if !wt.is_zero() {
                out.entry(wt.clone()).or_default().push(alg.reduce(&cur, &wt)?);
            }
            return Ok(());
        }
        let mut x = cur;
        let mut w = wt;
        loop {
            rec(k + 1, x.clone(), w.clone(), height, minors, heights, alg, out)?;
            w = w.add(&heights[k]);
            if w.height() > height {
                return Ok(());
            }
            x = x.concat_multiply(&minors.elements[k])?;
        }
    }
    rec(0, WordElement::one(Side::E), RootVec::zero(n), height, minors, &heights, alg, &mut by_weight)?;
    Ok(by_weight.values().all(|rows| linalg::rank(rows) == rows.len()))
}
