//! Kashiwara operators at `q = 0`, computed by exact sl2-string
//! decomposition inside simple modules, together with string parameters,
//! Demazure subsets and the tensor product rule.
//!
//! Crystal vertices of `V(lambda)` are labelled by the Lusztig parameter `m`
//! of the canonical basis element `B(m)` with `[B(m) v_lambda]` the vertex.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;
use std::sync::{Arc, Mutex, RwLock};

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::canonical::CanonicalBasis;
use crate::cartan::{RootVec, Weight};
use crate::error::{Error, Result};
use crate::highest_weight::{ModuleVector, SimpleModule};
use crate::linalg::{self, Matrix};
use crate::scalar::{qfact, RationalScalar};

pub type Label = Vec<i64>;

/// Reduce coordinates in a crystal basis mod `q`: `Some(j)` if they are
/// `e_j` mod `q`, `None` if they vanish mod `q`.
fn reduce_mod_q(coords: &[RationalScalar]) -> Result<Option<usize>> {
    let mut hit = None;
    for (j, c) in coords.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let v = c.valuation().expect("nonzero");
        if v < 0 {
            return Err(Error::Convention(format!("vector outside the crystal lattice (coefficient {c})")));
        }
        if v == 0 {
            let at0 = c.value_at_zero().expect("regular at zero");
            if hit.is_some() || !at0.is_integer() || at0.to_integer() != 1.into() {
                return Err(Error::Convention(format!("vector is not a crystal basis element mod q (coefficient {c})")));
            }
            hit = Some(j);
        }
    }
    Ok(hit)
}

struct Level {
    labels: Vec<Label>,
    vectors: Vec<ModuleVector>,
    /// Module coordinates to crystal basis coordinates.
    to_crystal: Matrix,
}

/// The sl2 decomposition of one weight space along the `i`-string.
struct StringData {
    /// `(k, u)` with `E_i u = 0`, `u` of depth `gamma - k alpha_i`.
    parts: Vec<(i64, ModuleVector)>,
    /// Inverse of the matrix whose columns are `F_i^{(k)} u`.
    inv: Matrix,
}

/// The crystal of `V(lambda)` realized inside the module.
pub struct ModuleCrystal {
    pub cb: Arc<CanonicalBasis>,
    pub module: SimpleModule,
    levels: RwLock<HashMap<RootVec, Arc<Level>>>,
    strings: RwLock<HashMap<(usize, RootVec), Arc<StringData>>>,
    e_memo: Mutex<HashMap<(usize, Label), Option<Label>>>,
    f_memo: Mutex<HashMap<(usize, Label), Option<Label>>>,
}

impl ModuleCrystal {
    pub fn new(cb: Arc<CanonicalBasis>, lambda: Weight, depth_cap: i64) -> Result<Self> {
        let module = SimpleModule::new(cb.pbw.alg.clone(), lambda, depth_cap)?;
        Ok(ModuleCrystal {
            cb,
            module,
            levels: RwLock::new(HashMap::new()),
            strings: RwLock::new(HashMap::new()),
            e_memo: Mutex::new(HashMap::new()),
            f_memo: Mutex::new(HashMap::new()),
        })
    }

    pub fn rank(&self) -> usize {
        self.module.rank()
    }

    pub fn lambda(&self) -> &Weight {
        &self.module.lambda
    }

    pub fn depth_of(&self, m: &[i64]) -> RootVec {
        self.cb.pbw.weight_of(m)
    }

    pub fn weight_of(&self, m: &[i64]) -> Weight {
        let c = &self.cb.pbw.alg.cartan;
        self.lambda().sub(&c.root_to_weight(&self.depth_of(m)))
    }

    pub fn highest(&self) -> Label {
        vec![0; self.cb.pbw.len()]
    }

    fn level(&self, gamma: &RootVec) -> Result<Arc<Level>> {
        if let Some(l) = self.levels.read().expect("crystal cache poisoned").get(gamma) {
            return Ok(l.clone());
        }
        let dim = self.module.dim_at(gamma)?;
        let v0 = self.module.highest();
        let mut labels = Vec::new();
        let mut vectors = Vec::new();
        if dim > 0 {
            for m in self.cb.pbw.indices(gamma) {
                let b = self.cb.canonical_element(&m)?.flip_side();
                let v = self.module.act_f(&b, &v0)?;
                if !v.is_zero() {
                    labels.push(m);
                    vectors.push(v);
                }
            }
        }
        if labels.len() != dim {
            return Err(Error::Convention(format!(
                "{} nonzero canonical images in a weight space of dimension {dim}",
                labels.len()
            )));
        }
        let cols: Matrix = vectors.iter().map(|v| v.coords.clone()).collect();
        let to_crystal = linalg::inverse(&linalg::transpose(&cols))
            .ok_or_else(|| Error::Convention(format!("canonical images at depth {gamma} are dependent")))?;
        let level = Arc::new(Level { labels, vectors, to_crystal });
        let mut cache = self.levels.write().expect("crystal cache poisoned");
        Ok(cache.entry(gamma.clone()).or_insert(level).clone())
    }

    /// Labels of the crystal basis at depth `gamma`.
    pub fn labels_at(&self, gamma: &RootVec) -> Result<Vec<Label>> {
        Ok(self.level(gamma)?.labels.clone())
    }

    /// Whether `B(m) v_lambda` is nonzero.
    pub fn contains(&self, m: &[i64]) -> Result<bool> {
        let gamma = self.depth_of(m);
        Ok(self.level(&gamma)?.labels.iter().any(|l| l == m))
    }

    /// The module vector `B(m) v_lambda`.
    pub fn vector(&self, m: &[i64]) -> Result<ModuleVector> {
        let level = self.level(&self.depth_of(m))?;
        let j = level.labels.iter().position(|l| l == m).ok_or_else(|| Error::Invalid(format!("{m:?} is not a vertex")))?;
        Ok(level.vectors[j].clone())
    }

    fn e_kernel(&self, i: usize, delta: &RootVec) -> Result<Vec<ModuleVector>> {
        let dim = self.module.dim_at(delta)?;
        let units: Vec<ModuleVector> = (0..dim)
            .map(|j| {
                let mut c = vec![RationalScalar::zero(); dim];
                c[j] = RationalScalar::one();
                ModuleVector { depth: delta.clone(), coords: c }
            })
            .collect();
        if delta.0[i] == 0 {
            return Ok(units);
        }
        let images: Vec<ModuleVector> = units.iter().map(|u| self.module.e_i(i, u)).collect::<Result<_>>()?;
        let target = images.first().map_or(0, |v| v.coords.len());
        let mat: Matrix = (0..target).map(|r| images.iter().map(|v| v.coords[r].clone()).collect()).collect();
        Ok(linalg::nullspace(&mat, dim).into_iter().map(|c| ModuleVector { depth: delta.clone(), coords: c }).collect())
    }

    fn strings(&self, i: usize, gamma: &RootVec) -> Result<Arc<StringData>> {
        let key = (i, gamma.clone());
        if let Some(s) = self.strings.read().expect("crystal cache poisoned").get(&key) {
            return Ok(s.clone());
        }
        let mut parts = Vec::new();
        let mut cols = Vec::new();
        let mut k = 0;
        let mut delta = gamma.clone();
        while delta.is_nonneg() {
            for u in self.e_kernel(i, &delta)? {
                let img = self.module.f_divided(i, k, &u)?;
                if img.is_zero() {
                    continue;
                }
                cols.push(img.coords);
                parts.push((k, u));
            }
            delta.0[i] -= 1;
            k += 1;
        }
        let inv = linalg::inverse(&linalg::transpose(&cols))
            .ok_or_else(|| Error::Convention(format!("sl2 strings do not span depth {gamma}")))?;
        let data = Arc::new(StringData { parts, inv });
        let mut cache = self.strings.write().expect("crystal cache poisoned");
        Ok(cache.entry(key).or_insert(data).clone())
    }

    /// `v = sum_k F_i^{(k)} u_k` with `E_i u_k = 0`; returns `(k, u_k)` for nonzero parts.
    pub fn string_decomposition(&self, i: usize, v: &ModuleVector) -> Result<Vec<(i64, ModuleVector)>> {
        let s = self.strings(i, &v.depth)?;
        let c = linalg::mat_vec(&s.inv, &v.coords);
        let mut parts: BTreeMap<i64, ModuleVector> = BTreeMap::new();
        for ((k, u), ck) in s.parts.iter().zip(c) {
            if ck.is_zero() {
                continue;
            }
            let term = u.scale(&ck);
            parts.entry(*k).and_modify(|acc| *acc = acc.add(&term)).or_insert(term);
        }
        Ok(parts.into_iter().filter(|(_, u)| !u.is_zero()).collect())
    }

    /// Kashiwara `F~_i` on a module vector.
    pub fn kashiwara_f(&self, i: usize, v: &ModuleVector) -> Result<ModuleVector> {
        let mut depth = v.depth.clone();
        depth.0[i] += 1;
        let mut acc = self.module.zero_at(&depth)?;
        for (k, u) in self.string_decomposition(i, v)? {
            acc = acc.add(&self.module.f_divided(i, k + 1, &u)?);
        }
        Ok(acc)
    }

    /// Kashiwara `E~_i` on a module vector.
    pub fn kashiwara_e(&self, i: usize, v: &ModuleVector) -> Result<Option<ModuleVector>> {
        let mut depth = v.depth.clone();
        if depth.0[i] == 0 {
            return Ok(None);
        }
        depth.0[i] -= 1;
        let mut acc = self.module.zero_at(&depth)?;
        for (k, u) in self.string_decomposition(i, v)? {
            if k >= 1 {
                acc = acc.add(&self.module.f_divided(i, k - 1, &u)?);
            }
        }
        Ok(Some(acc))
    }

    /// The vertex represented by `v` mod `q L(lambda)`.
    pub fn classify(&self, v: &ModuleVector) -> Result<Option<Label>> {
        if v.depth.height() > self.module.max_depth || v.is_zero() {
            return Ok(None);
        }
        let level = self.level(&v.depth)?;
        let c = linalg::mat_vec(&level.to_crystal, &v.coords);
        Ok(reduce_mod_q(&c)?.map(|j| level.labels[j].clone()))
    }

    pub fn f(&self, i: usize, m: &[i64]) -> Result<Option<Label>> {
        let key = (i, m.to_vec());
        if let Some(r) = self.f_memo.lock().expect("crystal memo poisoned").get(&key) {
            return Ok(r.clone());
        }
        let v = self.kashiwara_f(i, &self.vector(m)?)?;
        let r = self.classify(&v)?;
        self.f_memo.lock().expect("crystal memo poisoned").insert(key, r.clone());
        Ok(r)
    }

    pub fn e(&self, i: usize, m: &[i64]) -> Result<Option<Label>> {
        let key = (i, m.to_vec());
        if let Some(r) = self.e_memo.lock().expect("crystal memo poisoned").get(&key) {
            return Ok(r.clone());
        }
        let r = match self.kashiwara_e(i, &self.vector(m)?)? {
            Some(v) => self.classify(&v)?,
            None => None,
        };
        self.e_memo.lock().expect("crystal memo poisoned").insert(key, r.clone());
        Ok(r)
    }

    pub fn epsilon(&self, i: usize, m: &[i64]) -> Result<i64> {
        let mut cur = m.to_vec();
        let mut r = 0;
        while let Some(next) = self.e(i, &cur)? {
            cur = next;
            r += 1;
        }
        Ok(r)
    }

    pub fn phi(&self, i: usize, m: &[i64]) -> Result<i64> {
        Ok(self.epsilon(i, m)? + self.module.coroot_value(i, &self.depth_of(m)))
    }

    /// `E(b) = sum_i epsilon_i(b) varpi_i`.
    pub fn cap_e(&self, m: &[i64]) -> Result<Weight> {
        Ok(Weight((0..self.rank()).map(|i| self.epsilon(i, m)).collect::<Result<_>>()?))
    }

    /// The extremal vertex of weight `w lambda`, `w = s_{j_1} ... s_{j_k}`.
    pub fn extremal(&self, w: &[usize]) -> Result<Label> {
        let v = self.module.extremal_vector(w)?;
        self.classify(&v)?.ok_or_else(|| Error::Convention("extremal vector vanishes mod q".into()))
    }

    /// The Demazure subset `B_w(lambda)` for a reduced word of `w`.
    pub fn demazure(&self, w: &[usize]) -> Result<BTreeSet<Label>> {
        let mut set: BTreeSet<Label> = [self.highest()].into();
        for &j in w.iter().rev() {
            let mut next = set.clone();
            for b in &set {
                let mut cur = b.clone();
                while let Some(c) = self.f(j, &cur)? {
                    next.insert(c.clone());
                    cur = c;
                }
            }
            set = next;
        }
        Ok(set)
    }

    pub fn demazure_membership(&self, m: &[i64], w: &[usize]) -> Result<bool> {
        Ok(self.demazure(w)?.contains(m))
    }

    /// The whole crystal graph, by breadth-first search from the highest weight.
    pub fn graph(&self) -> Result<CrystalGraph> {
        let n = self.rank();
        let top = self.highest();
        let mut index: HashMap<Label, usize> = HashMap::new();
        let mut labels = vec![top.clone()];
        index.insert(top, 0);
        let mut queue = VecDeque::from([0usize]);
        let mut f_edges: Vec<Vec<Option<usize>>> = vec![vec![None; n]];
        while let Some(v) = queue.pop_front() {
            for i in 0..n {
                if let Some(t) = self.f(i, &labels[v].clone())? {
                    let id = match index.get(&t) {
                        Some(&id) => id,
                        None => {
                            let id = labels.len();
                            index.insert(t.clone(), id);
                            labels.push(t);
                            f_edges.push(vec![None; n]);
                            queue.push_back(id);
                            id
                        }
                    };
                    f_edges[v][i] = Some(id);
                }
            }
        }
        let mut e_edges = vec![vec![None; n]; labels.len()];
        for (v, row) in f_edges.iter().enumerate() {
            for (i, t) in row.iter().enumerate() {
                if let Some(t) = t {
                    e_edges[*t][i] = Some(v);
                }
            }
        }
        let weights = labels.iter().map(|m| self.weight_of(m)).collect();
        Ok(CrystalGraph { rank: n, lambda: self.lambda().clone(), labels, weights, f: f_edges, e: e_edges })
    }
}

/// Crystal operators on the canonical basis of `U_q(n^-)`, obtained through
/// `B -> B(lambda)` with `lambda` large enough for the height range.
pub struct InfinityCrystal {
    pub inner: ModuleCrystal,
    pub height: i64,
}

impl InfinityCrystal {
    /// Valid for elements of height at most `height`; needs an algebra cap of
    /// at least `height + 1`.
    pub fn new(cb: Arc<CanonicalBasis>, height: i64) -> Result<Self> {
        if cb.pbw.alg.height_cap < height + 1 {
            return Err(Error::HeightCapExceeded { height: height + 1, cap: cb.pbw.alg.height_cap });
        }
        let n = cb.rank();
        let lambda = Weight(vec![height + 1; n]);
        Ok(InfinityCrystal { inner: ModuleCrystal::new(cb, lambda, height + 1)?, height })
    }

    fn check(&self, m: &[i64]) -> Result<()> {
        let h = self.inner.depth_of(m).height();
        if h > self.height {
            return Err(Error::HeightCapExceeded { height: h, cap: self.height });
        }
        Ok(())
    }

    pub fn e(&self, i: usize, m: &[i64]) -> Result<Option<Label>> {
        self.check(m)?;
        self.inner.e(i, m)
    }

    pub fn f(&self, i: usize, m: &[i64]) -> Result<Option<Label>> {
        self.check(m)?;
        let r = self.inner.f(i, m)?;
        if r.is_none() {
            return Err(Error::Convention("f~ vanished on an embedded element".into()));
        }
        Ok(r)
    }

    pub fn epsilon(&self, i: usize, m: &[i64]) -> Result<i64> {
        self.check(m)?;
        self.inner.epsilon(i, m)
    }

    pub fn cap_e(&self, m: &[i64]) -> Result<Weight> {
        self.check(m)?;
        self.inner.cap_e(m)
    }

    /// The label `m'` with `sigma(B(m)) = B(m')`.
    pub fn sigma(&self, m: &[i64]) -> Result<Label> {
        let cb = &self.inner.cb;
        let beta = cb.pbw.weight_of(m);
        if beta.is_zero() {
            return Ok(m.to_vec());
        }
        let x = cb.canonical_element(m)?.sigma();
        let coords = cb.pbw.alg.reduce(&x, &beta)?;
        let slice = cb.canonical_slice(&beta)?;
        slice
            .elements
            .iter()
            .position(|e| *e == coords)
            .map(|j| slice.indices[j].clone())
            .ok_or_else(|| Error::Convention(format!("sigma(B({m:?})) is not a canonical basis element")))
    }

    /// `b` in `B(lambda)`, i.e. `E(sigma(b)) <= lambda`.
    pub fn in_b_lambda(&self, m: &[i64], lambda: &Weight) -> Result<bool> {
        let e = self.cap_e(&self.sigma(m)?)?;
        Ok(lambda.sub(&e).is_dominant())
    }

    /// The string parametrization along `word` (0-based letters).
    pub fn string_param(&self, word: &[usize], m: &[i64]) -> Result<StringDatum> {
        let mut cur = m.to_vec();
        let mut values = Vec::with_capacity(word.len());
        for &i in word {
            let mut k = 0;
            while let Some(next) = self.e(i, &cur)? {
                cur = next;
                k += 1;
            }
            values.push(k);
        }
        if cur.iter().any(|&x| x != 0) {
            return Err(Error::Convention("string recursion did not reach the highest weight".into()));
        }
        Ok(StringDatum { word: crate::cartan::format_letters(word), a: values })
    }
}

/// A string parametrization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StringDatum {
    pub word: String,
    pub a: Vec<i64>,
}

/// A finite colored crystal graph.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrystalGraph {
    pub rank: usize,
    pub lambda: Weight,
    pub labels: Vec<Label>,
    pub weights: Vec<Weight>,
    pub f: Vec<Vec<Option<usize>>>,
    pub e: Vec<Vec<Option<usize>>>,
}

impl CrystalGraph {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, m: &[i64]) -> Option<usize> {
        self.labels.iter().position(|l| l == m)
    }

    pub fn epsilon(&self, i: usize, v: usize) -> i64 {
        let mut cur = v;
        let mut r = 0;
        while let Some(next) = self.e[cur][i] {
            cur = next;
            r += 1;
        }
        r
    }

    pub fn phi(&self, i: usize, v: usize) -> i64 {
        let mut cur = v;
        let mut r = 0;
        while let Some(next) = self.f[cur][i] {
            cur = next;
            r += 1;
        }
        r
    }

    /// Every vertex is reachable from the highest weight vertex.
    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            if std::mem::replace(&mut seen[v], true) {
                continue;
            }
            stack.extend(self.f[v].iter().flatten().copied());
        }
        seen.iter().all(|&s| s)
    }

    /// DOT rendering with edges labelled by the (1-based) color.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph crystal {\n");
        for (v, m) in self.labels.iter().enumerate() {
            let _ = writeln!(out, "  v{v} [label=\"{m:?} {}\"];", self.weights[v]);
        }
        for (v, row) in self.f.iter().enumerate() {
            for (i, t) in row.iter().enumerate() {
                if let Some(t) = t {
                    let _ = writeln!(out, "  v{v} -> v{t} [label=\"{}\"];", i + 1);
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Tensor products of crystal graphs, `b_1 (x) b_2 (x) ... (x) b_r`, with the
/// signature rule: `f~` acts on the leftmost unmatched `+`, `e~` on the
/// rightmost unmatched `-`, each factor contributing `-^{epsilon} +^{phi}`.
#[derive(Clone, Debug)]
pub struct TensorCrystal {
    pub factors: Vec<Arc<CrystalGraph>>,
    pub convention: TensorConvention,
}

/// Order in which factors are read by the signature rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TensorConvention {
    /// `f~(b_1 (x) b_2) = f~b_1 (x) b_2` iff `phi(b_1) > epsilon(b_2)`.
    Kashiwara,
    /// The mirror rule, realized by `Delta F_i = F_i (x) K_i^{-1} + 1 (x) F_i`
    /// at `q = infinity`.
    Reversed,
}

impl TensorCrystal {
    pub fn new(factors: Vec<Arc<CrystalGraph>>) -> Self {
        TensorCrystal { factors, convention: TensorConvention::Kashiwara }
    }

    pub fn with_convention(factors: Vec<Arc<CrystalGraph>>, convention: TensorConvention) -> Self {
        TensorCrystal { factors, convention }
    }

    pub fn rank(&self) -> usize {
        self.factors[0].rank
    }

    /// Factor positions of the unmatched `-` (rightmost) and `+` (leftmost).
    fn signature(&self, i: usize, v: &[usize]) -> (Option<usize>, Option<usize>) {
        // stack of unmatched '+' factor positions
        let mut plus: Vec<usize> = Vec::new();
        let mut minus: Vec<usize> = Vec::new();
        let order: Vec<usize> = match self.convention {
            TensorConvention::Kashiwara => (0..v.len()).collect(),
            TensorConvention::Reversed => (0..v.len()).rev().collect(),
        };
        for k in order {
            let (b, g) = (v[k], &self.factors[k]);
            for _ in 0..g.epsilon(i, b) {
                if plus.pop().is_none() {
                    minus.push(k);
                }
            }
            for _ in 0..g.phi(i, b) {
                plus.push(k);
            }
        }
        (minus.last().copied(), plus.first().copied())
    }

    pub fn f(&self, i: usize, v: &[usize]) -> Option<Vec<usize>> {
        let (_, p) = self.signature(i, v);
        let k = p?;
        let mut out = v.to_vec();
        out[k] = self.factors[k].f[v[k]][i]?;
        Some(out)
    }

    pub fn e(&self, i: usize, v: &[usize]) -> Option<Vec<usize>> {
        let (m, _) = self.signature(i, v);
        let k = m?;
        let mut out = v.to_vec();
        out[k] = self.factors[k].e[v[k]][i]?;
        Some(out)
    }

    pub fn epsilon(&self, i: usize, v: &[usize]) -> i64 {
        let mut cur = v.to_vec();
        let mut r = 0;
        while let Some(next) = self.e(i, &cur) {
            cur = next;
            r += 1;
        }
        r
    }

    pub fn weight(&self, v: &[usize]) -> Weight {
        let n = self.rank();
        v.iter().zip(&self.factors).fold(Weight::zero(n), |acc, (&b, g)| acc.add(&g.weights[b]))
    }

    /// Highest weight vertex of the component of `v`, and the color sequence
    /// of `e~` steps taken to reach it.
    pub fn highest_of(&self, v: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let mut cur = v.to_vec();
        let mut path = Vec::new();
        'outer: loop {
            for i in 0..self.rank() {
                if let Some(next) = self.e(i, &cur) {
                    cur = next;
                    path.push(i);
                    continue 'outer;
                }
            }
            return (cur, path);
        }
    }

    /// Whether `v` lies in the component of highest weight `sum lambda_k`,
    /// the one through `b_{lambda_1} (x) ... (x) b_{lambda_r}`.
    pub fn in_top_component(&self, v: &[usize]) -> bool {
        let (top, _) = self.highest_of(v);
        top.iter().all(|&b| b == 0)
    }

    /// The string parametrization of `v` along a word, with `e~^max` steps.
    pub fn string_param(&self, word: &[usize], v: &[usize]) -> Vec<i64> {
        let mut cur = v.to_vec();
        word.iter()
            .map(|&i| {
                let mut k = 0;
                while let Some(next) = self.e(i, &cur) {
                    cur = next;
                    k += 1;
                }
                k
            })
            .collect()
    }

    /// Image of a top-component vertex in `B(sum lambda_k)`.
    pub fn identify(&self, v: &[usize], target: &CrystalGraph) -> Option<usize> {
        let (top, path) = self.highest_of(v);
        if top.iter().any(|&b| b != 0) {
            return None;
        }
        let mut cur = 0;
        for &i in path.iter().rev() {
            cur = target.f[cur][i]?;
        }
        Some(cur)
    }

    /// All vertices.
    pub fn vertices(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for g in &self.factors {
            out = out.into_iter().flat_map(|p| (0..g.len()).map(move |b| {
                let mut q = p.clone();
                q.push(b);
                q
            })).collect();
        }
        out
    }
}

/// `V(mu) (x) V(lambda)` with the coproduct
/// `Delta E_i = E_i (x) 1 + K_i (x) E_i`, `Delta F_i = F_i (x) K_i^{-1} + 1 (x) F_i`,
/// in the crystal bases of the factors. Used to certify the tensor rule.
pub struct TensorModule<'a> {
    pub left: &'a ModuleCrystal,
    pub right: &'a ModuleCrystal,
    pub left_graph: &'a CrystalGraph,
    pub right_graph: &'a CrystalGraph,
    /// `E_i`, `F_i` on each factor in crystal coordinates, per vertex:
    /// sparse images `(vertex, coefficient)`.
    ops: [Vec<Vec<Vec<(usize, RationalScalar)>>>; 4],
    /// Reduce at `q = infinity` instead of `q = 0`.
    pub at_infinity: bool,
}

/// A vector of a tensor module: sparse coefficients on pairs of vertices.
pub type TensorVector = BTreeMap<(usize, usize), RationalScalar>;

impl<'a> TensorModule<'a> {
    pub fn new(
        left: &'a ModuleCrystal,
        left_graph: &'a CrystalGraph,
        right: &'a ModuleCrystal,
        right_graph: &'a CrystalGraph,
    ) -> Result<Self> {
        let n = left.rank();
        let side_ops = |mc: &ModuleCrystal, g: &CrystalGraph, raise: bool| -> Result<Vec<Vec<Vec<(usize, RationalScalar)>>>> {
            (0..n)
                .map(|i| {
                    g.labels
                        .iter()
                        .map(|m| {
                            let v = mc.vector(m)?;
                            let img = if raise { mc.module.e_i(i, &v)? } else { mc.module.f_i(i, &v)? };
                            if img.coords.is_empty() || img.is_zero() || img.depth.height() > mc.module.max_depth {
                                return Ok(Vec::new());
                            }
                            let level = mc.level(&img.depth)?;
                            let c = linalg::mat_vec(&level.to_crystal, &img.coords);
                            Ok(c.into_iter()
                                .enumerate()
                                .filter(|(_, x)| !x.is_zero())
                                .map(|(j, x)| (g.index_of(&level.labels[j]).expect("graph vertex"), x))
                                .collect())
                        })
                        .collect()
                })
                .collect()
        };
        let ops = [
            side_ops(left, left_graph, true)?,
            side_ops(left, left_graph, false)?,
            side_ops(right, right_graph, true)?,
            side_ops(right, right_graph, false)?,
        ];
        Ok(TensorModule { left, right, left_graph, right_graph, ops, at_infinity: true })
    }

    fn k_exp(&self, i: usize, w: &Weight) -> i64 {
        let c = &self.left.cb.pbw.alg.cartan;
        c.symmetrizers[i] * w.0[i]
    }

    fn add_into(out: &mut TensorVector, key: (usize, usize), c: RationalScalar) {
        let entry = out.entry(key).or_insert_with(RationalScalar::zero);
        *entry += &c;
        if entry.is_zero() {
            out.remove(&key);
        }
    }

    pub fn delta_e(&self, i: usize, v: &TensorVector) -> TensorVector {
        let mut out = TensorVector::new();
        for (&(a, b), c) in v {
            for (a2, x) in &self.ops[0][i][a] {
                Self::add_into(&mut out, (*a2, b), c * x);
            }
            let k = RationalScalar::q_pow(self.k_exp(i, &self.left_graph.weights[a]));
            for (b2, x) in &self.ops[2][i][b] {
                Self::add_into(&mut out, (a, *b2), &(c * x) * &k);
            }
        }
        out
    }

    pub fn delta_f(&self, i: usize, v: &TensorVector) -> TensorVector {
        let mut out = TensorVector::new();
        for (&(a, b), c) in v {
            let k = RationalScalar::q_pow(-self.k_exp(i, &self.right_graph.weights[b]));
            for (a2, x) in &self.ops[1][i][a] {
                Self::add_into(&mut out, (*a2, b), &(c * x) * &k);
            }
            for (b2, x) in &self.ops[3][i][b] {
                Self::add_into(&mut out, (a, *b2), c * x);
            }
        }
        out
    }

    fn delta_f_divided(&self, i: usize, k: i64, v: &TensorVector) -> Result<TensorVector> {
        let mut cur = v.clone();
        for _ in 0..k {
            cur = self.delta_f(i, &cur);
        }
        let d = self.left.cb.pbw.alg.cartan.symmetrizers[i];
        let inv = RationalScalar::from(qfact(k, d)?).inv()?;
        Ok(cur.into_iter().map(|(key, c)| (key, &c * &inv)).collect())
    }

    /// All basis pairs of total weight `w`.
    fn pairs_of_weight(&self, w: &Weight) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, wa) in self.left_graph.weights.iter().enumerate() {
            for (b, wb) in self.right_graph.weights.iter().enumerate() {
                if wa.add(wb) == *w {
                    out.push((a, b));
                }
            }
        }
        out
    }

    fn weight_of(&self, key: (usize, usize)) -> Weight {
        self.left_graph.weights[key.0].add(&self.right_graph.weights[key.1])
    }

    /// Kashiwara `F~_i` (or `E~_i` when `raise`) on a basis pair, reduced mod `q`.
    pub fn kashiwara(&self, i: usize, key: (usize, usize), raise: bool) -> Result<Option<(usize, usize)>> {
        let c = &self.left.cb.pbw.alg.cartan;
        let w = self.weight_of(key);
        let alpha = c.root_to_weight(&RootVec::simple(self.left.rank(), i));
        // sl2 strings through weight w: kernel of Delta E_i at w + k alpha_i
        let basis_w = self.pairs_of_weight(&w);
        let mut parts: Vec<(i64, TensorVector)> = Vec::new();
        let mut cols: Vec<Vec<RationalScalar>> = Vec::new();
        let mut k = 0;
        loop {
            let wk = w.add(&alpha.scale(k));
            let basis_k = self.pairs_of_weight(&wk);
            if basis_k.is_empty() {
                break;
            }
            let target = self.pairs_of_weight(&wk.add(&alpha));
            let units: Vec<TensorVector> = basis_k.iter().map(|&p| [(p, RationalScalar::one())].into()).collect();
            let images: Vec<TensorVector> = units.iter().map(|u| self.delta_e(i, u)).collect();
            let mat: Matrix = target
                .iter()
                .map(|t| images.iter().map(|im| im.get(t).cloned().unwrap_or_else(RationalScalar::zero)).collect())
                .collect();
            for x in linalg::nullspace(&mat, basis_k.len()) {
                let u: TensorVector = basis_k.iter().copied().zip(x).filter(|(_, c)| !c.is_zero()).collect();
                let img = self.delta_f_divided(i, k, &u)?;
                if img.is_empty() {
                    continue;
                }
                cols.push(basis_w.iter().map(|p| img.get(p).cloned().unwrap_or_else(RationalScalar::zero)).collect());
                parts.push((k, u));
            }
            k += 1;
        }
        let inv = linalg::inverse(&linalg::transpose(&cols))
            .ok_or_else(|| Error::Convention("tensor sl2 strings do not span".into()))?;
        let pos = basis_w.iter().position(|&p| p == key).expect("key of weight w");
        let mut unit = vec![RationalScalar::zero(); basis_w.len()];
        unit[pos] = RationalScalar::one();
        let coef = linalg::mat_vec(&inv, &unit);
        let mut acc = TensorVector::new();
        for ((k, u), c) in parts.iter().zip(coef) {
            if c.is_zero() {
                continue;
            }
            let shifted = if raise {
                if *k == 0 {
                    continue;
                }
                self.delta_f_divided(i, k - 1, u)?
            } else {
                self.delta_f_divided(i, k + 1, u)?
            };
            for (p, x) in shifted {
                Self::add_into(&mut acc, p, &x * &c);
            }
        }
        let keys: Vec<(usize, usize)> = acc.keys().copied().collect();
        let vals: Vec<RationalScalar> = acc.values().map(|c| if self.at_infinity { c.bar() } else { c.clone() }).collect();
        Ok(reduce_mod_q(&vals)?.map(|j| keys[j]))
    }
}

/// Result of a multiplication-rule check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicationRule {
    /// `m` with `q^m b_1* ... b_r* = b* mod q L*`.
    pub shift: i64,
    /// Whether the identity holds exactly.
    pub exact: bool,
}

/// Checks `q^m b_1* b_2* ... b_r* = b*` mod `q L*`, returning the shift and
/// whether equality is exact; `None` if the product is not of this form.
pub fn multiplication_rule_check(cb: &CanonicalBasis, factors: &[Label], target: &[i64]) -> Result<Option<MultiplicationRule>> {
    let mut prod = crate::freealg::WordElement::one(crate::freealg::Side::E);
    for m in factors {
        prod = prod.concat_multiply(&cb.dual_canonical_element(m)?)?;
    }
    let beta = cb.pbw.weight_of(target);
    if prod.weight(cb.rank()).as_ref() != Some(&beta) {
        return Ok(None);
    }
    if beta.is_zero() {
        let c = prod.coeff(&[]);
        return Ok(c.is_q_power().and_then(|e| e.integer()).map(|e| MultiplicationRule { shift: -e, exact: true }));
    }
    let coords = cb.dual_canonical_coordinates(&prod, &beta)?;
    let Some((_, lead)) = coords.iter().find(|(m, _)| m == target) else { return Ok(None) };
    if lead.is_zero() {
        return Ok(None);
    }
    let v = lead.valuation().expect("nonzero");
    let shift = -v;
    let scaled = lead.shift(shift);
    if !scaled.value_at_zero().is_some_and(|x| x.is_one()) {
        return Ok(None);
    }
    for (m, c) in &coords {
        if m != target && !c.is_zero() && c.valuation().expect("nonzero") + shift <= 0 {
            return Ok(None);
        }
    }
    let exact = scaled.is_one() && coords.iter().all(|(m, c)| m == target || c.is_zero());
    Ok(Some(MultiplicationRule { shift, exact }))
}

/// The `b''*`-component of `b* b'*`, where `A(b) + A(b') = A(b'')`.
pub fn product_component(cb: &CanonicalBasis, m1: &[i64], m2: &[i64], target: &[i64]) -> Result<RationalScalar> {
    let prod = cb.dual_canonical_element(m1)?.concat_multiply(&cb.dual_canonical_element(m2)?)?;
    let beta = cb.pbw.weight_of(target);
    let coords = cb.dual_canonical_coordinates(&prod, &beta)?;
    Ok(coords.into_iter().find(|(m, _)| m == target).map(|(_, c)| c).unwrap_or_else(RationalScalar::zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{CartanData, ReducedWord};
    use crate::freealg::Algebra;
    use crate::pbw::PbwBasis;

    fn basis(t: &str, w: &str, cap: i64) -> Arc<CanonicalBasis> {
        let c = CartanData::parse(t).unwrap();
        let rw = ReducedWord::parse(&c, w).unwrap();
        let alg = Arc::new(Algebra::with_cap(c, cap));
        Arc::new(CanonicalBasis::new(Arc::new(PbwBasis::new(alg, rw).unwrap())))
    }

    fn graph(cb: &Arc<CanonicalBasis>, l: &[i64]) -> (ModuleCrystal, Arc<CrystalGraph>) {
        let mc = ModuleCrystal::new(cb.clone(), Weight(l.to_vec()), 8).unwrap();
        let g = Arc::new(mc.graph().unwrap());
        (mc, g)
    }

    #[test]
    fn fundamental_crystals_of_a2() {
        let cb = basis("A2", "121", 6);
        let (mc, g) = graph(&cb, &[1, 0]);
        assert_eq!(g.len(), 3);
        assert!(g.is_connected());
        let hw = mc.highest();
        assert_eq!(mc.e(0, &hw).unwrap(), None);
        let f1 = mc.f(0, &hw).unwrap().unwrap();
        assert_eq!(mc.weight_of(&f1), Weight(vec![-1, 1]));
        assert_eq!(mc.epsilon(0, &f1).unwrap(), 1);
        // string length <lambda, alpha_1^vee> = 1
        assert_eq!(mc.f(0, &f1).unwrap(), None);
        assert_eq!(g.labels, vec![vec![0, 0, 0], vec![1, 0, 0], vec![1, 0, 1]]);
        let (_, g0) = graph(&cb, &[0, 0]);
        assert_eq!(g0.len(), 1);
        assert!(g0.to_dot().contains("digraph"));
    }

    #[test]
    fn operators_are_inverse() {
        let cb = basis("B2", "2121", 8);
        let (mc, g) = graph(&cb, &[1, 1]);
        assert_eq!(g.len(), 16);
        for m in &g.labels {
            for i in 0..2 {
                if let Some(up) = mc.e(i, m).unwrap() {
                    assert_eq!(mc.f(i, &up).unwrap().as_ref(), Some(m));
                }
            }
        }
    }

    #[test]
    fn demazure_subsets() {
        let cb = basis("A2", "121", 6);
        let (mc, g) = graph(&cb, &[1, 1]);
        assert_eq!(mc.demazure(&[]).unwrap().len(), 1);
        let w0 = cb.pbw.alg.cartan.some_reduced_word_w0();
        assert_eq!(mc.demazure(&w0).unwrap().len(), g.len());
        let ext = mc.extremal(&[0, 1]).unwrap();
        assert!(mc.demazure_membership(&ext, &[0, 1]).unwrap());
    }

    #[test]
    fn infinity_crystal_embeds_b_lambda() {
        let cb = basis("A2", "121", 6);
        let inf = InfinityCrystal::new(cb.clone(), 4).unwrap();
        assert!(inf.in_b_lambda(&[0, 0, 0], &Weight(vec![0, 0])).unwrap());
        // E_1^(2) is not in B(varpi_1)
        assert!(!inf.in_b_lambda(&[2, 0, 0], &Weight(vec![1, 0])).unwrap());
        let datum = inf.string_param(&[0, 1, 0], &[1, 0, 1]).unwrap();
        assert_eq!(datum.word, "121");
        assert_eq!(inf.string_param(&[0, 1, 0], &[0, 0, 0]).unwrap().a, vec![0, 0, 0]);
        // sigma of a simple root vector is itself
        assert_eq!(inf.sigma(&[1, 0, 0]).unwrap(), vec![1, 0, 0]);
    }

    #[test]
    fn string_data_do_not_depend_on_lambda() {
        let cb = basis("A2", "121", 8);
        let small = InfinityCrystal::new(cb.clone(), 3).unwrap();
        let big = InfinityCrystal::new(cb.clone(), 6).unwrap();
        for beta in crate::cartan::weights_up_to_height(2, 3) {
            for m in cb.pbw.indices(&beta) {
                assert_eq!(small.string_param(&[1, 0, 1], &m).unwrap(), big.string_param(&[1, 0, 1], &m).unwrap());
            }
        }
    }

    #[test]
    fn tensor_rule_basics() {
        let cb = basis("A2", "121", 6);
        let (_, g1) = graph(&cb, &[1, 0]);
        let (_, g2) = graph(&cb, &[0, 1]);
        let t = TensorCrystal::new(vec![g1.clone(), g2.clone()]);
        for i in 0..2 {
            assert_eq!(t.epsilon(i, &[0, 0]), 0);
        }
        // 3 x 3 = 8 + 1
        let top = t.vertices().iter().filter(|v| t.in_top_component(v)).count();
        assert_eq!(top, 8);
        // (**) and (*) when f~_i(c) = 0
        for v in t.vertices() {
            for i in 0..2 {
                if g1.f[v[0]][i].is_none() {
                    assert_eq!(t.epsilon(i, &v), g1.epsilon(i, v[0]) + g2.epsilon(i, v[1]));
                }
            }
        }
    }

    #[test]
    fn coproduct_realizes_the_reversed_rule() {
        let cb = basis("A2", "121", 6);
        let (m1, g1) = graph(&cb, &[1, 0]);
        let (m2, g2) = graph(&cb, &[0, 1]);
        let tm = TensorModule::new(&m1, &g1, &m2, &g2).unwrap();
        let t = TensorCrystal::with_convention(vec![g1.clone(), g2.clone()], TensorConvention::Reversed);
        for v in t.vertices() {
            for i in 0..2 {
                let want = t.f(i, &v).map(|w| (w[0], w[1]));
                assert_eq!(tm.kashiwara(i, (v[0], v[1]), false).unwrap(), want, "{v:?} {i}");
            }
        }
    }

    #[test]
    fn multiplication_rule_trivial_case() {
        let cb = basis("A2", "121", 6);
        let r = multiplication_rule_check(&cb, &[vec![1, 0, 1]], &[1, 0, 1]).unwrap().unwrap();
        assert_eq!(r, MultiplicationRule { shift: 0, exact: true });
        assert!(product_component(&cb, &[1, 0, 0], &[0, 0, 1], &[1, 0, 1]).unwrap().is_q_power().is_some());
    }
}
