//! Named invariant suites. Each returns a [`VerificationReport`] whose
//! `failures` list is empty exactly when the suite passes.

use std::collections::BTreeSet;
use std::time::Instant;

use crate::adapted::{
    a2_listed_cones, b2_decomposition_check, b2_listed_cones, center_semigroup, cone, lattice_box, params_up_to,
    sigma_cone, verify_adapted, Param, SemigroupCone, VerificationReport,
};
use crate::canonical::CanonicalBasis;
use crate::cartan::weights_up_to_height;
use crate::error::{Error, Result};
use crate::freealg::{serre_element, Algebra, Side, WordElement};
use crate::session::Session;

fn report_for(label: String, word: String, height: i64) -> VerificationReport {
    VerificationReport { type_label: label, word, height, ..Default::default() }
}

fn describe(gens: &[Param]) -> String {
    gens.iter().map(|g| format!("{g:?}")).collect::<Vec<_>>().join(" ")
}

/// Every Serre element pairs to zero with every F-word of its weight.
pub fn serre_pairing(alg: &Algebra) -> Result<VerificationReport> {
    let t0 = Instant::now();
    let n = alg.rank();
    let mut rep = report_for(alg.cartan.label.to_string(), String::new(), 0);
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let sr = serre_element(&alg.cartan, i, j)?;
            let beta = sr.weight(n).ok_or_else(|| Error::Invalid("Serre element is not homogeneous".into()))?;
            rep.height = rep.height.max(beta.height());
            for fw in &alg.basis(&beta)?.words {
                rep.pairs_examined += 1;
                let v = alg.pair(&sr, &WordElement::word(Side::F, fw.clone()))?;
                if !v.is_zero() {
                    rep.failures.push(format!("Serre({},{}) pairs to {v} with F-word {fw:?}", i + 1, j + 1));
                }
            }
        }
    }
    rep.elapsed_ms = t0.elapsed().as_millis();
    Ok(rep)
}

/// Dual PBW elements pair with PBW F-monomials to the identity matrix.
pub fn pbw_duality(cb: &CanonicalBasis, height: i64) -> Result<VerificationReport> {
    let t0 = Instant::now();
    let mut rep = VerificationReport::start(cb, height);
    let alg = &cb.pbw.alg;
    for beta in weights_up_to_height(cb.rank(), height) {
        let idx = cb.pbw.indices(&beta);
        let duals: Vec<WordElement> = idx.iter().map(|m| cb.pbw.dual_pbw(m)).collect::<Result<_>>()?;
        let fs: Vec<WordElement> = idx.iter().map(|m| cb.pbw.f_monomial(m)).collect::<Result<_>>()?;
        for (i, x) in duals.iter().enumerate() {
            for (j, y) in fs.iter().enumerate() {
                rep.pairs_examined += 1;
                let v = alg.pair(x, y)?;
                if !(if i == j { v.is_one() } else { v.is_zero() }) {
                    rep.failures.push(format!("(E({:?})*, F({:?})) = {v}", idx[i], idx[j]));
                }
            }
        }
    }
    rep.elapsed_ms = t0.elapsed().as_millis();
    Ok(rep)
}

/// Commutators of root vectors stay within the span of lex-intermediate
/// monomials.
pub fn ls_filtration(cb: &CanonicalBasis) -> Result<VerificationReport> {
    let t0 = Instant::now();
    let n = cb.pbw.len();
    let mut rep = VerificationReport::start(cb, 0);
    for b in 0..n {
        for a in 0..b {
            rep.pairs_examined += 1;
            if !cb.pbw.ls_filtration_check(a, b)? {
                rep.failures.push(format!("root vectors {} and {}", a + 1, b + 1));
            }
        }
    }
    rep.elapsed_ms = t0.elapsed().as_millis();
    Ok(rep)
}

/// `eta(B*(m)) = q^k sigma(B*(m))` with the predicted exponent, and
/// recognition of every dual canonical element.
pub fn twisted_identity(cb: &CanonicalBasis, height: i64) -> Result<VerificationReport> {
    let t0 = Instant::now();
    let mut rep = VerificationReport::start(cb, height);
    for m in params_up_to(cb, height) {
        rep.pairs_examined += 1;
        if !cb.twisted_identity(&m)? {
            rep.failures.push(format!("twist of {m:?} is {:?}", cb.twist_exponent(&m)?));
        }
        let x = cb.dual_canonical_element(&m)?;
        if cb.is_dual_canonical(&x)? != Some((0, m.clone())) {
            rep.failures.push(format!("B*({m:?}) is not recognized"));
        }
    }
    rep.elapsed_ms = t0.elapsed().as_millis();
    Ok(rep)
}

fn compare(rep: &mut VerificationReport, name: &str, got: &SemigroupCone, want: &[Param]) {
    let want: BTreeSet<Param> = want.iter().cloned().collect();
    rep.pairs_examined += 1;
    rep.notes.push(format!("{name}: {}", describe(&got.generators)));
    if got.generator_set() != want {
        rep.failures.push(format!("{name}: expected {}", describe(&want.into_iter().collect::<Vec<_>>())));
    }
}

/// The two A2 cones, their sigma-stability and coverage of `[0, 5]^3`.
pub fn example1(a2: &Session) -> Result<VerificationReport> {
    let t0 = Instant::now();
    let a = a2.basis_for("121")?;
    let b = a2.basis_for("212")?;
    let mut rep = VerificationReport::start(&a, 0);
    let lists = a2_listed_cones();
    let cones = [("C(121,121)", cone(&a, &a)?), ("C(121,212)", cone(&a, &b)?)];
    for (name, c) in &cones {
        compare(&mut rep, name, c, &lists[name]);
        let s = sigma_cone(&a, c)?;
        if s.generator_set() != c.generator_set() {
            rep.failures.push(format!("{name} is not sigma-stable: {}", describe(&s.generators)));
        }
    }
    for p in lattice_box(3, 5) {
        if !cones.iter().any(|(_, c)| c.contains(&p)) {
            rep.failures.push(format!("{p:?} is not covered"));
        }
    }
    rep.elapsed_ms = t0.elapsed().as_millis();
    Ok(rep)
}

/// The six B2 cones, the center semigroup, coverage of `[0, 4]^4` and
/// factorization of every element up to `height`.
pub fn example2(b2: &Session, height: i64) -> Result<VerificationReport> {
    let t0 = Instant::now();
    let a = b2.basis_for("2121")?;
    let b = b2.basis_for("1212")?;
    let lists = b2_listed_cones();
    let c1 = cone(&a, &a)?;
    let c2 = cone(&a, &b)?;
    let d = SemigroupCone::new(a.word(), lists["D"].clone());
    let computed = [
        ("C(2121,2121)", c1.clone()),
        ("C(2121,1212)", c2.clone()),
        ("sigma C(2121,2121)", sigma_cone(&a, &c1)?),
        ("sigma C(2121,1212)", sigma_cone(&a, &c2)?),
        ("D", d.clone()),
        ("sigma D", sigma_cone(&a, &d)?),
    ];
    let mut rep = b2_decomposition_check(&a, 4, height)?;
    for (name, c) in &computed {
        compare(&mut rep, name, c, &lists[name]);
    }
    for name in ["D", "sigma D"] {
        let (_, c) = computed.iter().find(|(n, _)| *n == name).expect("listed");
        let r = verify_adapted(&a, c, height.min(6))?;
        rep.skipped += r.skipped;
        rep.failures.extend(r.failures.iter().map(|f| format!("{name}: {f}")));
        rep.failures.extend(r.qcommute_not_mult.iter().map(|p| format!("{name}: {p:?} q-commute but do not multiply")));
    }
    let z = center_semigroup(&a)?;
    compare(&mut rep, "P(Z_q)", &z, &[vec![1, 0, 1, 0], vec![0, 1, 0, 1]]);
    rep.elapsed_ms = t0.elapsed().as_millis();
    Ok(rep)
}
