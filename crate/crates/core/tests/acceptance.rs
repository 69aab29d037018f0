//! Acceptance suite. Runs the twelve criteria (in parallel), prints one
//! status line per criterion and exits nonzero on any unexpected failure.
//!
//! Reference data (cone generator lists, semigroup generators) is written out
//! literally here. Independent oracles (Kostant partition counts, Weyl
//! dimensions, the q-center decomposition uniqueness scan) are implemented in
//! this file with their own root data.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;
use std::time::Instant;

use qcanon_core::adapted::*;
use qcanon_core::canonical::{q_commute, CanonicalBasis};
use qcanon_core::cartan::*;
use qcanon_core::crystal::*;
use qcanon_core::freealg::{serre_element, Side, WordElement};
use qcanon_core::highest_weight::*;
use qcanon_core::scalar::RationalScalar;
use qcanon_core::session::Session;
use qcanon_core::Result;

/// Outcome of one criterion.
#[derive(Default)]
struct Check {
    failures: Vec<String>,
    /// Failures that are expected and whose exact form was confirmed.
    deviations: Vec<String>,
    notes: Vec<String>,
}

impl Check {
    fn ensure(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

struct Sessions {
    a2: Session,
    b2: Session,
    a3: Session,
    g2: Session,
}

fn set(xs: &[&[i64]]) -> BTreeSet<Vec<i64>> {
    xs.iter().map(|x| x.to_vec()).collect()
}

fn both_words(t: &str) -> [&'static str; 2] {
    match t {
        "A2" => ["121", "212"],
        "B2" => ["2121", "1212"],
        _ => unreachable!(),
    }
}

fn session<'a>(s: &'a Sessions, t: &str) -> &'a Session {
    match t {
        "A2" => &s.a2,
        "B2" => &s.b2,
        "A3" => &s.a3,
        "G2" => &s.g2,
        _ => unreachable!(),
    }
}

fn all_params(cb: &CanonicalBasis, height: i64) -> Vec<Vec<i64>> {
    let mut v = vec![vec![0; cb.pbw.len()]];
    v.extend(params_up_to(cb, height));
    v
}

fn depth(c: &CartanData, lambda: &Weight) -> i64 {
    c.weight_to_rootvec(&lambda.sub(&c.longest_element_action(lambda))).expect("root lattice").height()
}

fn module_graph(cb: &Arc<CanonicalBasis>, lambda: &[i64]) -> Result<(ModuleCrystal, Arc<CrystalGraph>)> {
    let c = &cb.pbw.alg.cartan;
    let lambda = Weight(lambda.to_vec());
    let mc = ModuleCrystal::new(cb.clone(), lambda.clone(), depth(c, &lambda))?;
    let g = Arc::new(mc.graph()?);
    Ok((mc, g))
}

// ---------------------------------------------------------------------------
// independent oracles

/// Positive roots in simple-root coordinates and the symmetrizers `d_i`,
/// written out by hand.
fn root_data(t: &str) -> (Vec<Vec<i64>>, Vec<i64>) {
    match t {
        "A2" => (vec![vec![1, 0], vec![0, 1], vec![1, 1]], vec![1, 1]),
        // alpha_2 short
        "B2" => (vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![1, 2]], vec![2, 1]),
        // alpha_1 short
        "G2" => (
            vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![2, 1], vec![3, 1], vec![3, 2]],
            vec![1, 3],
        ),
        "A3" => (
            vec![
                vec![1, 0, 0],
                vec![0, 1, 0],
                vec![0, 0, 1],
                vec![1, 1, 0],
                vec![0, 1, 1],
                vec![1, 1, 1],
            ],
            vec![1, 1, 1],
        ),
        _ => unreachable!(),
    }
}

/// Number of ways to write `beta` as an unordered sum of positive roots.
fn kostant_oracle(roots: &[Vec<i64>], beta: &[i64]) -> u64 {
    fn rec(roots: &[Vec<i64>], k: usize, rest: Vec<i64>, memo: &mut HashMap<(usize, Vec<i64>), u64>) -> u64 {
        if rest.iter().all(|&x| x == 0) {
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
            total += rec(roots, k + 1, r.clone(), memo);
            for (x, y) in r.iter_mut().zip(&roots[k]) {
                *x -= y;
            }
            if r.iter().any(|&x| x < 0) {
                break;
            }
        }
        memo.insert((k, rest), total);
        total
    }
    rec(roots, 0, beta.to_vec(), &mut HashMap::new())
}

/// Weyl dimension formula, `prod (lambda + rho, beta) / (rho, beta)`, with
/// `(varpi_i, alpha_j) = d_i delta_ij`.
fn weyl_oracle(t: &str, lambda: &[i64]) -> i64 {
    let (roots, d) = root_data(t);
    let mut num = 1i128;
    let mut den = 1i128;
    for beta in &roots {
        let pair = |w: &dyn Fn(usize) -> i64| -> i128 { (0..d.len()).map(|i| (w(i) * d[i] * beta[i]) as i128).sum() };
        num *= pair(&|i| lambda[i] + 1);
        den *= pair(&|_| 1);
    }
    assert_eq!(num % den, 0);
    (num / den) as i64
}

/// All decompositions `m = z + h` with `z` in the semigroup of the block
/// indicators and `h` vanishing somewhere on every block.
fn center_splittings(m: &[i64], letters: &[usize], n: usize) -> Vec<(Vec<i64>, Vec<i64>)> {
    let blocks: Vec<Vec<usize>> = (0..n).map(|k| (0..letters.len()).filter(|&r| letters[r] == k).collect()).collect();
    let maxes: Vec<i64> = blocks.iter().map(|b| b.iter().map(|&r| m[r]).min().unwrap_or(0)).collect();
    let mut out = Vec::new();
    let mut coef = vec![0i64; n];
    loop {
        let mut z = vec![0; m.len()];
        for (k, b) in blocks.iter().enumerate() {
            for &r in b {
                z[r] += coef[k];
            }
        }
        let h: Vec<i64> = m.iter().zip(&z).map(|(a, b)| a - b).collect();
        if h.iter().all(|&x| x >= 0) && blocks.iter().all(|b| b.iter().any(|&r| h[r] == 0)) {
            out.push((z, h));
        }
        // odometer over 0..=maxes[k]
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            if coef[k] < maxes[k] {
                coef[k] += 1;
                break;
            }
            coef[k] = 0;
            k += 1;
        }
    }
}

/// Words over `0..n` with the given letter counts.
fn words_of_weight(beta: &[i64]) -> Vec<Vec<u8>> {
    let total: i64 = beta.iter().sum();
    if total == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..beta.len() {
        if beta[i] > 0 {
            let mut rest = beta.to_vec();
            rest[i] -= 1;
            for mut w in words_of_weight(&rest) {
                w.insert(0, i as u8);
                out.push(w);
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// criteria

/// A2 cones for the words 121 and 212.
fn criterion_1(s: &Sessions) -> Result<Check> {
    let mut ck = Check::default();
    let a = s.a2.basis_for("121")?;
    let b = s.a2.basis_for("212")?;
    let c_aa = cone(&a, &a)?;
    let c_ab = cone(&a, &b)?;
    let want_aa = set(&[&[1, 0, 0], &[0, 1, 0], &[1, 0, 1]]);
    let want_ab = set(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 1]]);
    ck.ensure(c_aa.generator_set() == want_aa, || format!("cone(121,121) = {:?}", c_aa.generators));
    ck.ensure(c_ab.generator_set() == want_ab, || format!("cone(121,212) = {:?}", c_ab.generators));
    for c in [&c_aa, &c_ab] {
        let sc = sigma_cone(&a, c)?;
        ck.ensure(sc.generator_set() == c.generator_set(), || format!("sigma moves {:?} to {:?}", c.generators, sc.generators));
    }
    let points = lattice_box(3, 5);
    let uncovered = points.iter().filter(|p| !c_aa.contains(p) && !c_ab.contains(p)).count();
    ck.ensure(uncovered == 0, || format!("{uncovered} points with entries <= 5 uncovered"));
    ck.note(format!("{} points covered", points.len()));
    Ok(ck)
}

/// B2 cones, the center semigroup and the six-cone decomposition.
fn criterion_2(s: &Sessions) -> Result<Check> {
    let mut ck = Check::default();
    let a = s.b2.basis_for("2121")?;
    let b = s.b2.basis_for("1212")?;
    let c = [1, 0, 1, 0];
    let d = [0, 1, 0, 1];
    let lists: BTreeMap<&str, BTreeSet<Vec<i64>>> = BTreeMap::from([
        ("C(2121,2121)", set(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &c, &d])),
        ("C(2121,1212)", set(&[&[0, 0, 0, 1], &[1, 0, 0, 1], &c, &d])),
        ("sigma C(2121,2121)", set(&[&[1, 0, 0, 0], &[2, 0, 0, 1], &c, &d])),
        ("sigma C(2121,1212)", set(&[&[0, 0, 0, 1], &[0, 0, 1, 0], &c, &d])),
        ("D", set(&[&[0, 1, 0, 0], &[0, 0, 1, 0], &c, &d])),
        ("sigma D", set(&[&[2, 0, 0, 1], &[1, 0, 0, 1], &c, &d])),
    ]);
    let c1 = cone(&a, &a)?;
    let c2 = cone(&a, &b)?;
    let d_cone = SemigroupCone::new("2121", lists["D"].iter().cloned().collect());
    let computed: BTreeMap<&str, SemigroupCone> = BTreeMap::from([
        ("C(2121,2121)", c1.clone()),
        ("C(2121,1212)", c2.clone()),
        ("sigma C(2121,2121)", sigma_cone(&a, &c1)?),
        ("sigma C(2121,1212)", sigma_cone(&a, &c2)?),
        ("D", d_cone.clone()),
        ("sigma D", sigma_cone(&a, &d_cone)?),
    ]);
    for (name, want) in &lists {
        let got = computed[name].generator_set();
        ck.ensure(got == *want, || format!("{name}: got {got:?}"));
    }
    let shipped = b2_listed_cones();
    for (name, want) in &lists {
        let got: BTreeSet<Vec<i64>> = shipped[name].iter().cloned().collect();
        ck.ensure(got == *want, || format!("shipped list {name} differs"));
    }
    // D is data; its adaptedness is verified
    for name in ["D", "sigma D"] {
        let r = verify_adapted(&a, &computed[name], 6)?;
        ck.ensure(r.passed() && r.skipped == 0, || format!("{name} not adapted: {:?} skipped {}", r.failures, r.skipped));
    }
    let z = center_semigroup(&a)?;
    ck.ensure(z.generator_set() == set(&[&c, &d]), || format!("P(Z_q) = {:?}", z.generators));
    let r = b2_decomposition_check(&a, 4, 10)?;
    ck.ensure(r.passed(), || format!("decomposition: {:?}", r.failures));
    ck.note(format!(
        "{} points with entries <= 4 covered; {} elements of height <= 10 factor over G*",
        r.pairs_examined, r.multiplicative
    ));
    Ok(ck)
}

/// `(E(m)*, F(n)) = delta_{m,n}`.
fn criterion_3(s: &Sessions) -> Result<Check> {
    let mut ck = Check::default();
    let mut count = 0;
    for t in ["A2", "B2"] {
        let ses = session(s, t);
        for w in both_words(t) {
            let cb = ses.basis_for(w)?;
            for beta in weights_up_to_height(cb.rank(), 6) {
                let idx = cb.pbw.indices(&beta);
                let duals: Vec<WordElement> = idx.iter().map(|m| cb.pbw.dual_pbw(m)).collect::<Result<_>>()?;
                let fs: Vec<WordElement> = idx.iter().map(|m| cb.pbw.f_monomial(m)).collect::<Result<_>>()?;
                for (i, x) in duals.iter().enumerate() {
                    for (j, y) in fs.iter().enumerate() {
                        let v = ses.alg.pair(x, y)?;
                        count += 1;
                        let ok = if i == j { v.is_one() } else { v.is_zero() };
                        ck.ensure(ok, || format!("{t}/{w}: (E({:?})*, F({:?})) = {v}", idx[i], idx[j]));
                    }
                }
            }
        }
    }
    ck.note(format!("{count} same-weight pairs"));
    Ok(ck)
}

/// Bar invariance, unitriangularity, word independence, twisted identity.
fn criterion_4(s: &Sessions) -> Result<Check> {
    let mut ck = Check::default();
    let mut count = 0;
    for t in ["A2", "B2"] {
        let ses = session(s, t);
        let [w1, w2] = both_words(t);
        let (b1, b2) = (ses.basis_for(w1)?, ses.basis_for(w2)?);
        for beta in weights_up_to_height(b1.rank(), 6) {
            for cb in [&b1, &b2] {
                let sl = cb.canonical_slice(&beta)?;
                for (j, e) in sl.elements.iter().enumerate() {
                    count += 1;
                    ck.ensure(e.iter().all(|c| c.bar() == *c), || format!("{t}/{}: B({:?}) not bar invariant", cb.word(), sl.indices[j]));
                    for (n, row) in sl.transition.iter().enumerate() {
                        let ok = if n == j { row[j].is_one() } else { row[j].in_q_ideal() };
                        ck.ensure(ok, || format!("{t}/{}: B({:?}) not in E(m) + qL", cb.word(), sl.indices[j]));
                    }
                    ck.ensure(cb.twisted_identity(&sl.indices[j])?, || {
                        format!("{t}/{}: twisted identity fails at {:?}", cb.word(), sl.indices[j])
                    });
                }
            }
            let key = |v: &Vec<RationalScalar>| format!("{v:?}");
            let sa: BTreeSet<String> = b1.canonical_slice(&beta)?.elements.iter().map(key).collect();
            let sb: BTreeSet<String> = b2.canonical_slice(&beta)?.elements.iter().map(key).collect();
            ck.ensure(sa == sb, || format!("{t}: canonical bases of weight {beta} differ between words"));
        }
    }
    ck.note(format!("{count} elements certified"));
    Ok(ck)
}

/// Leading terms of dual canonical elements for quiver-adapted words.
fn criterion_5(s: &Sessions) -> Result<Check> {
    let mut ck = Check::default();
    let mut count = 0;
    for (ses, w) in [(&s.a2, "121"), (&s.b2, "2121")] {
        let cb = ses.basis_for(w)?;
        for m in params_up_to(&cb, 6) {
            count += 1;
            ck.ensure(cb.dual_is_pbw_lower(&m)?, || format!("{w}: leading term mismatch at {m:?}"));
        }
    }
    ck.note(format!("{count} elements"));
    Ok(ck)
}

fn bz_runs(s: &Sessions) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for t in ["A2", "B2"] {
        for w in both_words(t) {
            out.push(bz_verify(&*session(s, t).basis_for(w)?, 6)?);
        }
    }
    Ok(out)
}

/// Multiplicative pairs q-commute.
fn criterion_6(s: &Sessions) -> Result<Check> {
    let mut ck = Check::default();
    for r in bz_runs(s)? {
        ck.ensure(r.mult_not_qcommute.is_empty(), || format!("{}/{}: {:?}", r.type_label, r.word, r.mult_not_qcommute));
        ck.note(format!("{}/{}: {} pairs, {} multiplicative", r.type_label, r.word, r.pairs_examined, r.multiplicative));
    }
    Ok(ck)
}

/// q-commuting if and only if multiplicative.
fn criterion_7(s: &Sessions) -> Result<Check> {
    let mut ck = Check::default();
    for r in bz_runs(s)? {
        ck.ensure(r.passed(), || {
            format!("{}/{}: {:?} / {:?}", r.type_label, r.word, r.mult_not_qcommute, r.qcommute_not_mult)
        });
        ck.note(format!("{}/{}: {} pairs, {} q-commuting", r.type_label, r.word, r.pairs_examined, r.q_commuting));
    }
    let r = bz_verify(&*s.a3.basis_for("121321")?, 4)?;
    ck.note(format!(
        "A3/121321 height 4 (report only): {} pairs, {} + {} violations, {} ms",
        r.pairs_examined,
        r.mult_not_qcommute.len(),
        r.qcommute_not_mult.len(),
        r.elapsed_ms
    ));
    Ok(ck)
}

/// The minors `X^r` and adaptedness of their semigroups.
fn criterion_8(s: &Sessions) -> Result<Check> {
    let mut ck = Check::default();
    for t in ["A2", "B2"] {
        let ses = session(s, t);
        for w in ses.cartan().reduced_words_w0() {
            let cb = ses.basis(&w)?;
            let minors = match adapted_algebra(&cb) {
                Ok(minors) => minors,
                Err(e) => {
                    ck.failures.push(format!("{t}/{}: {e}", cb.word()));
                    continue;
                }
            };
            let e1 = WordElement::generator(Side::E, w.letters[0]);
            ck.ensure(ses.alg.equal_in_quotient(&minors.elements[0], &e1)?, || format!("{t}/{}: X^1 is not E_i1", cb.word()));
            for r in 1..=w.len() {
                ck.ensure(minors.params[r - 1] == minor_param_formula(&w.letters, r), || {
                    format!("{t}/{}: X^{r} has parameter {:?}", cb.word(), minors.params[r - 1])
                });
            }
            ck.ensure(minor_monomials_independent(&cb, &minors, 6)?, || format!("{t}/{}: X-monomials dependent", cb.word()));
        }
        for pw in both_words(t) {
            for gw in both_words(t) {
                let (p, g) = (ses.basis_for(pw)?, ses.basis_for(gw)?);
                let c = cone(&p, &g)?;
                ck.ensure(c.generators.len() == p.pbw.len() && c.is_minimal() && c.generates_lattice(), || {
                    format!("{t}: cone({pw},{gw}) = {:?} is not a unimodular basis", c.generators)
                });
                let r = verify_adapted(&p, &c, 6)?;
                ck.ensure(r.passed() && r.skipped == 0, || {
                    format!("{t}: cone({pw},{gw}) not adapted: {:?}, {} unverified", r.failures, r.skipped)
                });
            }
        }
    }
    // A3: assert on quiver-adapted words, report the others
    let mut other = Vec::new();
    for w in s.a3.cartan().reduced_words_w0() {
        let cb = s.a3.basis(&w)?;
        let holds = (1..=w.len()).map(|r| Ok(minor_element(&cb, r)?.1 == minor_param_formula(&w.letters, r))).collect::<Result<Vec<_>>>()?;
        let all = holds.iter().all(|&h| h);
        if s.a3.cartan().is_quiver_adapted(&w.letters) {
            ck.ensure(all, || format!("A3/{}: parameter formula fails", cb.word()));
        } else {
            other.push(format!("{}:{}", cb.word(), if all { "holds" } else { "fails" }));
        }
    }
    ck.note(format!("A3 non-adapted words (report only): {}", other.join(" ")));
    Ok(ck)
}

/// The q-center.
fn criterion_9(s: &Sessions) -> Result<Check> {
    let mut ck = Check::default();
    let lams = [vec![1, 0], vec![0, 1], vec![1, 1]];
    for t in ["A2", "B2"] {
        let ses = session(s, t);
        let c = ses.cartan().clone();
        let cap = ses.alg.height_cap;
        let [w1, w2] = both_words(t);
        let cb = ses.basis_for(w1)?;
        let z = |l: &[i64]| z_element(&cb, &Weight(l.to_vec()));
        for l in &lams {
            for m in &lams {
                let sum: Vec<i64> = l.iter().zip(m).map(|(a, b)| a + b).collect();
                if depth(&c, &Weight(sum.clone())) > cap {
                    continue;
                }
                let prod = z(l)?.0.concat_multiply(&z(m)?.0)?;
                let target = z(&sum)?.0;
                let k = z_product_twist(&c, &Weight(l.clone()), &Weight(m.clone()))?;
                if ses.alg.equal_in_quotient(&prod, &target)? {
                    ck.note(format!("{t}: z{l:?} z{m:?} = z{sum:?}"));
                } else if ses.alg.equal_in_quotient(&prod, &target.scale(&RationalScalar::q_pow(k)))? {
                    ck.deviations.push(format!("{t}: z{l:?} z{m:?} = q^{k} z{sum:?}"));
                } else {
                    ck.failures.push(format!("{t}: z{l:?} z{m:?} is not a q-power times z{sum:?}"));
                }
            }
        }
        for k in 0..c.rank() {
            let zk = z(&Weight::fundamental(c.rank(), k).0)?.0;
            for i in 0..c.rank() {
                let ok = q_commute(&ses.alg, &zk, &WordElement::generator(Side::E, i))?.is_some();
                ck.ensure(ok, || format!("{t}: z_varpi{} and E_{} do not q-commute", k + 1, i + 1));
            }
        }
        for w in [w1, w2] {
            let cbw = ses.basis_for(w)?;
            let letters = &cbw.pbw.word.letters;
            for l in lams.iter().chain(&[vec![2, 0], vec![0, 2]]) {
                if depth(&c, &Weight(l.clone())) > cap {
                    continue;
                }
                let want: Vec<i64> = letters.iter().map(|&k| l[k]).collect();
                let got = z_element(&cbw, &Weight(l.clone()))?.1;
                ck.ensure(got == want, || format!("{t}/{w}: z{l:?} has parameter {got:?}, expected {want:?}"));
            }
        }
        let r = qcenter_tests(&cb, 6)?;
        ck.ensure(r.passed() && r.skipped == 0, || format!("{t}: q-center multiplicativity {:?}, {} skipped", r.failures, r.skipped));
        let r = qcenter_factorization(&cb, 8)?;
        ck.ensure(r.passed(), || format!("{t}: factorization {:?}", r.failures));
        let ns = center_parameters(&cb)?;
        let mut scanned = 0;
        for m in params_up_to(&cb, 8) {
            scanned += 1;
            let sp = center_splittings(&m, &cb.pbw.word.letters, c.rank());
            let mine = qcenter_decompose(&m, &cb.pbw.word.letters, &ns);
            ck.ensure(sp.len() == 1 && sp[0] == mine, || format!("{t}: {m:?} splits as {sp:?}, decomposition gave {mine:?}"));
        }
        ck.note(format!("{t}: {scanned} decompositions unique"));
        let b = ses.basis_for(w2)?;
        let inter = intersection_semigroup(&cb, &[&cb, &b], 8)?;
        let pz = center_semigroup(&cb)?;
        ck.ensure(inter.generator_set() == pz.generator_set(), || {
            format!("{t}: intersection {:?} vs P(Z_q) {:?}", inter.generators, pz.generators)
        });
    }
    Ok(ck)
}

/// Weight-space ranks, module dimensions, Serre elements.
fn criterion_10(s: &Sessions) -> Result<Check> {
    let mut ck = Check::default();
    for (t, h) in [("A2", 8), ("B2", 8), ("A3", 6), ("G2", 6)] {
        let ses = session(s, t);
        let (roots, _) = root_data(t);
        let n = ses.cartan().rank();
        for beta in weights_up_to_height(n, h) {
            let rank = ses.alg.basis(&beta)?.rank as u64;
            let want = kostant_oracle(&roots, &beta.0);
            ck.ensure(rank == want, || format!("{t}: rank at {beta} is {rank}, partitions {want}"));
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let sr = serre_element(ses.cartan(), i, j)?;
                let beta = sr.weight(n).expect("homogeneous");
                for fw in words_of_weight(&beta.0) {
                    let v = ses.alg.pair(&sr, &WordElement::word(Side::F, fw.clone()))?;
                    ck.ensure(v.is_zero(), || format!("{t}: Serre({},{}) pairs to {v} with F-word {fw:?}", i + 1, j + 1));
                }
            }
        }
    }
    let modules: [(&str, &[i64]); 11] = [
        ("A2", &[1, 0]),
        ("A2", &[0, 1]),
        ("A2", &[1, 1]),
        ("A2", &[2, 0]),
        ("B2", &[1, 0]),
        ("B2", &[0, 1]),
        ("B2", &[1, 1]),
        ("B2", &[0, 2]),
        ("A3", &[1, 0, 0]),
        ("A3", &[0, 1, 0]),
        ("G2", &[1, 0]),
    ];
    for (t, l) in modules {
        let ses = session(s, t);
        let lambda = Weight(l.to_vec());
        let m = SimpleModule::new(ses.alg.clone(), lambda.clone(), depth(ses.cartan(), &lambda))?;
        let (got, want) = (m.dim()? as i64, weyl_oracle(t, l));
        ck.ensure(got == want, || format!("{t}: dim V{l:?} = {got}, expected {want}"));
    }
    ck.note(format!("{} modules", modules.len()));
    Ok(ck)
}

/// The PBW commutation filtration.
fn criterion_11(s: &Sessions) -> Result<Check> {
    let mut ck = Check::default();
    let mut count = 0;
    for t in ["A2", "B2"] {
        let ses = session(s, t);
        for w in ses.cartan().reduced_words_w0() {
            let cb = ses.basis(&w)?;
            for b in 0..w.len() {
                for a in 0..b {
                    count += 1;
                    ck.ensure(cb.pbw.ls_filtration_check(a, b)?, || format!("{t}/{}: roots {a},{b}", cb.word()));
                }
            }
        }
    }
    ck.note(format!("{count} root pairs"));
    Ok(ck)
}

/// Reduced word of `w` completed on the right to a reduced word of `w0`.
fn completion(c: &CartanData, w: &WeylElement) -> Vec<usize> {
    let l = c.length(w);
    c.reduced_words_w0()
        .into_iter()
        .map(|r| r.letters)
        .find(|r| c.element(&r[..l]) == *w)
        .expect("every element is a prefix of w0")
}

/// String data of a single crystal vertex along a word.
fn vertex_string(g: &Arc<CrystalGraph>, word: &[usize], v: usize) -> Vec<i64> {
    TensorCrystal::new(vec![g.clone()]).string_param(word, &[v])
}

/// Crystal suite.
fn criterion_12(s: &Sessions) -> Result<Check> {
    let mut ck = Check::default();
    let cb = s.a2.basis_for("121")?;
    let c = s.a2.cartan().clone();
    let word = vec![0, 1, 0];

    // string-map injectivity and the q-power component property
    let inf = InfinityCrystal::new(cb.clone(), 5)?;
    let elems = all_params(&cb, 5);
    let mut by_string: HashMap<Vec<i64>, Vec<i64>> = HashMap::new();
    for m in &elems {
        let a = inf.string_param(&word, m)?.a;
        if let Some(prev) = by_string.insert(a.clone(), m.clone()) {
            ck.failures.push(format!("strings of {prev:?} and {m:?} coincide: {a:?}"));
        }
    }
    let strings: HashMap<Vec<i64>, Vec<i64>> = by_string.iter().map(|(a, m)| (m.clone(), a.clone())).collect();
    let mut triples = 0;
    for m1 in &elems {
        for m2 in &elems {
            let h = cb.pbw.weight_of(m1).height() + cb.pbw.weight_of(m2).height();
            if h > 5 || h == 0 {
                continue;
            }
            let sum: Vec<i64> = strings[m1].iter().zip(&strings[m2]).map(|(a, b)| a + b).collect();
            let Some(m3) = by_string.get(&sum) else { continue };
            triples += 1;
            let comp = product_component(&cb, m1, m2, m3)?;
            ck.ensure(comp.is_q_power().is_some(), || format!("component of B*{m3:?} in B*{m1:?} B*{m2:?} is {comp}"));
        }
    }
    ck.note(format!("{} strings distinct, {triples} additive triples", elems.len()));

    // tensor components
    let lams = [vec![1, 0], vec![0, 1], vec![1, 1]];
    let mods: Vec<(ModuleCrystal, Arc<CrystalGraph>)> = lams.iter().map(|l| module_graph(&cb, l)).collect::<Result<_>>()?;
    let weyl = c.weyl_elements();
    let w0 = c.some_reduced_word_w0();
    let (mut na, mut nb, mut nc, mut nadd) = (0, 0, 0, 0);
    for (mmu, gmu) in &mods {
        for (mla, gla) in &mods {
            let t = TensorCrystal::new(vec![gmu.clone(), gla.clone()]);
            for y1 in &weyl {
                for y2 in weyl.iter().filter(|y2| c.bruhat_leq(y1, y2)) {
                    let b1 = gla.index_of(&mla.extremal(&c.reduced_word_of(y1))?).expect("vertex");
                    let b2 = gmu.index_of(&mmu.extremal(&c.reduced_word_of(y2))?).expect("vertex");
                    na += 1;
                    ck.ensure(t.in_top_component(&[b2, b1]), || format!("A: {:?} (x) {:?}", gmu.labels[b2], gla.labels[b1]));
                }
            }
            let cv = gmu.index_of(&mmu.extremal(&w0)?).expect("vertex");
            for b in 0..gla.len() {
                nb += 1;
                ck.ensure(t.in_top_component(&[cv, b]), || format!("B: {:?} (x) {:?}", gmu.labels[cv], gla.labels[b]));
            }
            for w in &weyl {
                let rw = c.reduced_word_of(w);
                let full = completion(&c, w);
                let cv = gmu.index_of(&mmu.extremal(&rw)?).expect("vertex");
                for m in mla.demazure(&rw)? {
                    let b = gla.index_of(&m).expect("vertex");
                    nc += 1;
                    ck.ensure(t.in_top_component(&[cv, b]), || format!("C: {:?} (x) {m:?}", gmu.labels[cv]));
                    let lhs = t.string_param(&full, &[cv, b]);
                    let rhs: Vec<i64> =
                        vertex_string(gmu, &full, cv).iter().zip(vertex_string(gla, &full, b)).map(|(x, y)| x + y).collect();
                    nadd += 1;
                    ck.ensure(lhs == rhs, || format!("string additivity along {full:?}: {:?} (x) {m:?}", gmu.labels[cv]));
                }
            }
        }
    }
    ck.note(format!("A {na}, B {nb}, C {nc} pairs in the top component; {nadd} additive strings"));

    // multiplication rule, adapted-algebra route: X^s (x) X^r, s >= r
    let minors = adapted_algebra(&cb)?;
    let letters = cb.pbw.word.letters.clone();
    let fund: Vec<(ModuleCrystal, Arc<CrystalGraph>)> =
        (0..c.rank()).map(|k| module_graph(&cb, &Weight::fundamental(c.rank(), k).0)).collect::<Result<_>>()?;
    let mut instances = 0;
    let mut targets: HashMap<Vec<i64>, Arc<CrystalGraph>> = HashMap::new();
    for r in 0..letters.len() {
        for s_ in r..letters.len() {
            let (ir, is) = (letters[r], letters[s_]);
            let gr = &fund[ir].1;
            let gs = &fund[is].1;
            let br = gr.index_of(&minors.params[r]).expect("X^r is a vertex");
            let bs = gs.index_of(&minors.params[s_]).expect("X^s is a vertex");
            ck.ensure(fund[ir].0.extremal(&letters[..=r])? == minors.params[r], || format!("X^{} is not extremal", r + 1));
            let t = TensorCrystal::new(vec![gs.clone(), gr.clone()]);
            let mut lam = vec![0; c.rank()];
            lam[ir] += 1;
            lam[is] += 1;
            if !targets.contains_key(&lam) {
                targets.insert(lam.clone(), module_graph(&cb, &lam)?.1);
            }
            let target = &targets[&lam];
            let Some(v) = t.identify(&[bs, br], target) else {
                ck.failures.push(format!("X^{} (x) X^{} outside the top component", s_ + 1, r + 1));
                continue;
            };
            let label = target.labels[v].clone();
            let additive = c.reduced_words_w0().iter().any(|w| {
                let lhs = vertex_string(target, &w.letters, v);
                let rhs: Vec<i64> =
                    vertex_string(gs, &w.letters, bs).iter().zip(vertex_string(gr, &w.letters, br)).map(|(x, y)| x + y).collect();
                lhs == rhs
            });
            ck.ensure(additive, || format!("X^{} (x) X^{}: no additive string word", s_ + 1, r + 1));
            instances += 1;
            let rule = multiplication_rule_check(&cb, &[minors.params[s_].clone(), minors.params[r].clone()], &label)?;
            ck.ensure(rule.as_ref().is_some_and(|x| x.exact), || format!("X^{} X^{} -> {label:?}: {rule:?}", s_ + 1, r + 1));
        }
    }

    // multiplication rule, q-center route in B2: z_varpi_k (x) b
    let cb2 = s.b2.basis_for("2121")?;
    let c2 = s.b2.cartan().clone();
    let ns = center_parameters(&cb2)?;
    let w0b = c2.some_reduced_word_w0();
    for k in 0..2 {
        let (mk, gk) = module_graph(&cb2, &Weight::fundamental(2, k).0)?;
        let cv = gk.index_of(&mk.extremal(&w0b)?).expect("vertex");
        ck.ensure(gk.labels[cv] == ns[k], || format!("lowest vertex of B(varpi_{}) is not z", k + 1));
        for l in [vec![1, 0], vec![0, 1]] {
            let (_, gl) = module_graph(&cb2, &l)?;
            let mut lam = l.clone();
            lam[k] += 1;
            let (_, target) = module_graph(&cb2, &lam)?;
            let t = TensorCrystal::new(vec![gk.clone(), gl.clone()]);
            for b in 0..gl.len() {
                let Some(v) = t.identify(&[cv, b], &target) else {
                    ck.failures.push(format!("z (x) {:?} outside the top component", gl.labels[b]));
                    continue;
                };
                instances += 1;
                let label = &target.labels[v];
                let sum: Vec<i64> = ns[k].iter().zip(&gl.labels[b]).map(|(x, y)| x + y).collect();
                ck.ensure(*label == sum, || format!("z{:?} (x) {:?} identified with {label:?}", ns[k], gl.labels[b]));
                let rule = multiplication_rule_check(&cb2, &[ns[k].clone(), gl.labels[b].clone()], label)?;
                ck.ensure(rule.as_ref().is_some_and(|x| x.exact), || format!("z{:?} b{:?}: {rule:?}", ns[k], gl.labels[b]));
            }
        }
    }
    ck.note(format!("{instances} multiplication-rule instances"));
    Ok(ck)
}

type Criterion = fn(&Sessions) -> Result<Check>;

fn main() {
    let sessions = Sessions {
        a2: Session::parse("A2", 10).expect("A2"),
        b2: Session::parse("B2", 10).expect("B2"),
        a3: Session::parse("A3", 6).expect("A3"),
        g2: Session::parse("G2", 6).expect("G2"),
    };
    let criteria: [(&str, Criterion); 12] = [
        ("A2 cones", criterion_1),
        ("B2 cones and decomposition", criterion_2),
        ("dual PBW basis identity", criterion_3),
        ("canonical basis certification", criterion_4),
        ("leading terms of dual canonical elements", criterion_5),
        ("multiplicative implies q-commuting", criterion_6),
        ("q-commuting iff multiplicative", criterion_7),
        ("quantum minors and adapted algebras", criterion_8),
        ("q-center", criterion_9),
        ("structural oracles", criterion_10),
        ("PBW commutation filtration", criterion_11),
        ("crystal suite", criterion_12),
    ];
    let t0 = Instant::now();
    let results: Vec<(Result<Check>, u128)> = std::thread::scope(|scope| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|(_, f)| {
                let s = &sessions;
                scope.spawn(move || {
                    let t = Instant::now();
                    (f(s), t.elapsed().as_millis())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("criterion panicked")).collect()
    });
    let mut unexpected = 0;
    let mut documented = 0;
    for (k, ((name, _), (res, ms))) in criteria.iter().zip(results).enumerate() {
        let n = k + 1;
        match res {
            Err(e) => {
                unexpected += 1;
                println!("criterion {n:>2} FAIL  {name}: error: {e}  [{ms} ms]");
            }
            Ok(ck) => {
                let status = if ck.failures.is_empty() && ck.deviations.is_empty() { "PASS" } else { "FAIL" };
                println!("criterion {n:>2} {status}  {name}  [{ms} ms]");
                for f in ck.failures.iter().take(10) {
                    println!("      failure: {f}");
                }
                if ck.failures.len() > 10 {
                    println!("      ... {} more failures", ck.failures.len() - 10);
                }
                for d in &ck.deviations {
                    println!("      known deviation: {d}");
                }
                for note in &ck.notes {
                    println!("      {note}");
                }
                if !ck.failures.is_empty() {
                    unexpected += 1;
                } else if !ck.deviations.is_empty() {
                    documented += 1;
                }
            }
        }
    }
    println!(
        "acceptance: {} passed, {documented} failed with a documented deviation, {unexpected} failed unexpectedly  [{} ms]",
        12 - documented - unexpected,
        t0.elapsed().as_millis()
    );
    if unexpected > 0 {
        std::process::exit(1);
    }
}
