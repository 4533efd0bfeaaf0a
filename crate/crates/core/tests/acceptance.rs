//! End-to-end acceptance suite. Every criterion is exact; each prints one
//! PASS/FAIL line and the final test asserts all of them.

mod common;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use superderiv::algebra::gens::*;
use superderiv::cli::{jacobi_sweep, run_command};
use superderiv::linalg::{rat, ratio};
use superderiv::two_local::{
    globalize, homogeneity_check, make_adversarial_oracle, make_honest_oracle, AdversarialKind,
    Certificate, TestSet, Verdict,
};
use superderiv::{
    annihilator_basis, bracket, leibniz_defect, Element, Family, GradedWindow, Index, Kind,
    LocalMap, SuperDerivation,
};

fn report(n: u32, title: &str, failures: &[String]) -> bool {
    let ok = failures.is_empty();
    println!(
        "criterion {n} [{}] {title}",
        if ok { "PASS" } else { "FAIL" }
    );
    for f in failures.iter().take(5) {
        println!("    {f}");
    }
    ok
}

fn c1_structure() -> Vec<String> {
    let mut failures = Vec::new();
    for family in Family::ALL {
        let (triples, violations, first) = jacobi_sweep(family, 4);
        if violations > 0 {
            failures.push(format!(
                "{family}: {violations}/{triples} Jacobi violations, first {first:?}"
            ));
        }
        let basis: Vec<Element> = family
            .basis_within(&rat(4))
            .into_iter()
            .map(|b| Element::from_basis(family, b))
            .collect();
        for u in &basis {
            for v in &basis {
                let sign = rat(u
                    .homogeneous_parity()
                    .unwrap()
                    .sign(v.homogeneous_parity().unwrap()));
                let lhs = bracket(u, v).unwrap();
                let rhs = bracket(v, u).unwrap().scale(&sign).neg();
                if lhs != rhs {
                    failures.push(format!("{family}: antisymmetry fails on ({u:?}, {v:?})"));
                }
                let reference =
                    common::bracket_vec(family, &common::from_element(u), &common::from_element(v));
                if common::from_element(&lhs) != reference {
                    failures.push(format!("{family}: bracket disagrees with reference model"));
                }
            }
        }
        if family == Family::SVir12 && !basis.iter().any(|e| e == &g_half(family, 7)) {
            failures.push("svir12 sweep misses half-integer G indices".into());
        }
    }
    failures
}

fn c2_outer() -> Vec<String> {
    let f = Family::SW22;
    let d = LocalMap::Derivation(SuperDerivation::outer(f, rat(1)).unwrap());
    let basis = f.basis_within(&rat(3));
    let mut failures = Vec::new();
    for x in &basis {
        for y in &basis {
            let (x, y) = (Element::from_basis(f, *x), Element::from_basis(f, *y));
            let defect = leibniz_defect(&d, &x, &y).unwrap();
            if !defect.is_zero() {
                failures.push(format!("D defect on ({x:?}, {y:?})"));
            }
        }
    }
    failures
}

fn c3_g_annihilators() -> Vec<String> {
    let mut failures = Vec::new();
    let cases: Vec<(Family, Index)> = (-3..=3)
        .map(|i| (Family::SVir0, Index::int(i)))
        .chain(
            (-5..=5)
                .step_by(2)
                .map(|n| (Family::SVir12, Index::half(n))),
        )
        .collect();
    for (family, i) in cases {
        // 2|i| + 2
        let bound = i.twice().abs() + 2;
        let target = Element::basis(family, Kind::G, i).unwrap();
        let space = annihilator_basis(&target, &GradedWindow::int(bound as u32)).unwrap();
        let want = vec![SuperDerivation::inner(
            Element::basis(family, Kind::L, i + i).unwrap(),
        )];
        if space.basis != want {
            failures.push(format!("{family} G[{i}]: basis {:?}", space.basis));
        }
        let dense = common::annihilator_dim(family, &common::from_element(&target), bound);
        if dense != 1 {
            failures.push(format!(
                "{family} G[{i}]: dense reference dimension {dense}"
            ));
        }
    }
    failures
}

fn c4_sw22_g() -> Vec<String> {
    let f = Family::SW22;
    let mut failures = Vec::new();
    for r in -2..=2i64 {
        let bound = 2 * r.unsigned_abs() as u32 + 2;
        let space = annihilator_basis(&g(f, r), &GradedWindow::int(bound)).unwrap();
        let want = vec![
            SuperDerivation::inner(l(f, 2 * r)),
            SuperDerivation::inner(i(f, 2 * r)),
            SuperDerivation::outer(f, rat(1)).unwrap(),
        ];
        if space.dim() != 3 || space.basis != want {
            failures.push(format!(
                "G[{r}]: dim {} basis {:?}",
                space.dim(),
                space.basis
            ));
        }
        let dense = common::annihilator_dim(f, &common::from_element(&g(f, r)), i64::from(bound));
        if dense != 3 {
            failures.push(format!("G[{r}]: dense reference dimension {dense}"));
        }
    }
    failures
}

fn c5_i0_q0() -> Vec<String> {
    let f = Family::SW22;
    let target = i(f, 0).add(&q(f, 0)).unwrap();
    let l1_g1 = SuperDerivation::inner(l(f, 1).sub(&g(f, 1).scale(&ratio(1, 2))).unwrap());
    let mut failures = Vec::new();
    for w in [2u32, 3, 4] {
        let space = annihilator_basis(&target, &GradedWindow::int(w)).unwrap();
        let want = 4 * w as usize + 4;
        if space.dim() != want {
            failures.push(format!("W={w}: dim {} != {want}", space.dim()));
        }
        let dense = common::annihilator_dim(f, &common::from_element(&target), i64::from(w));
        if dense != want {
            failures.push(format!("W={w}: dense reference dimension {dense}"));
        }
        if !space.contains(&SuperDerivation::inner(l(f, 0))) || !space.contains(&l1_g1) {
            failures.push(format!("W={w}: missing ad(L0) or ad(L1 - G1/2)"));
        }
        if space.basis.iter().any(|d| !d.outer_lambda().is_zero()) {
            failures.push(format!("W={w}: member with outer part"));
        }
        for d in &space.basis {
            if !common::apply(f, d, &common::from_element(&target)).is_empty() {
                failures.push(format!(
                    "W={w}: reference model says {d:?} does not annihilate"
                ));
            }
        }
    }
    failures
}

fn c6_mixed() -> Vec<String> {
    let f = Family::SW22;
    let mut failures = Vec::new();
    for p in [-3i64, -1, 1, 3] {
        let target = l(f, p)
            .add(&i(f, 2 * p))
            .unwrap()
            .add(&q(f, 2 * p))
            .unwrap();
        let bound = 3 * p.unsigned_abs() as u32;
        let space = annihilator_basis(&target, &GradedWindow::int(bound)).unwrap();
        let ok = space.dim() == 2
            && space.contains(&SuperDerivation::inner(target.clone()))
            && space.contains(&SuperDerivation::inner(i(f, p)));
        if !ok {
            failures.push(format!(
                "p={p}: dim {} basis {:?}",
                space.dim(),
                space.basis
            ));
        }
        let dense = common::annihilator_dim(f, &common::from_element(&target), i64::from(bound));
        if dense != 2 {
            failures.push(format!("p={p}: dense reference dimension {dense}"));
        }
    }
    failures
}

const COEFFS: [(i64, i64); 6] = [(-3, 1), (-2, 1), (-1, 1), (1, 2), (1, 1), (2, 1)];

/// A random superderivation with inner support in `[-5, 5]` and, for
/// SW(2,2), outer coefficient in `{-3..3}`.
fn random_derivation(family: Family, seed: u64) -> SuperDerivation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gens = family.generators_within(&rat(5));
    let mut inner = Element::zero(family);
    for _ in 0..rng.gen_range(1..=4) {
        let b = *gens.choose(&mut rng).unwrap();
        let (n, d) = *COEFFS.choose(&mut rng).unwrap();
        inner
            .add_scaled(&Element::from_basis(family, b), &ratio(n, d))
            .unwrap();
    }
    let lambda = if family == Family::SW22 {
        rat(rng.gen_range(-3..=3))
    } else {
        rat(0)
    };
    SuperDerivation::new(inner, lambda).unwrap()
}

fn honest_certificate(family: Family, seed: u64) -> (SuperDerivation, Certificate) {
    let d = random_derivation(family, seed);
    let o = make_honest_oracle(d.clone(), GradedWindow::int(4), seed);
    let cert = globalize(&o, &TestSet::new(3, 20, seed)).unwrap();
    (d, cert)
}

const GLOBAL_FAMILIES: [Family; 3] = [Family::SVir0, Family::SVir12, Family::SW22];

fn c7_round_trip() -> Vec<String> {
    let mut failures = Vec::new();
    for family in GLOBAL_FAMILIES {
        for seed in 0..100u64 {
            let (d, cert) = honest_certificate(family, seed);
            if cert.verdict != Verdict::Pass {
                failures.push(format!(
                    "{family} seed {seed}: verdict fail at {:?}",
                    cert.failure_witness
                ));
            }
            for check in &cert.checks {
                if check.got != d.apply(&check.element).unwrap() {
                    failures.push(format!(
                        "{family} seed {seed}: action differs on {:?}",
                        check.element
                    ));
                }
            }
            if family == Family::SW22 && &cert.mu != d.outer_lambda() {
                failures.push(format!(
                    "{family} seed {seed}: mu {} != lambda {}",
                    cert.mu,
                    d.outer_lambda()
                ));
            }
            if cert.checks.len() < 20 {
                failures.push(format!(
                    "{family} seed {seed}: only {} checks",
                    cert.checks.len()
                ));
            }
        }
    }
    failures
}

fn adversarial_certificate(kind: AdversarialKind, family: Family, seed: u64) -> Certificate {
    globalize(
        &make_adversarial_oracle(kind, family),
        &TestSet::new(3, 20, seed),
    )
    .unwrap()
}

fn c8_adversarial() -> Vec<String> {
    let mut failures = Vec::new();
    for kind in AdversarialKind::ALL {
        for family in GLOBAL_FAMILIES {
            for seed in 0..20u64 {
                let cert = adversarial_certificate(kind, family, seed);
                let witnessed = cert.verdict == Verdict::Fail
                    && cert
                        .failure_witness
                        .as_ref()
                        .is_some_and(|w| cert.checks.iter().any(|c| &c.element == w && !c.pass));
                if !witnessed {
                    failures.push(format!(
                        "{} on {family} seed {seed}: not detected",
                        kind.name()
                    ));
                }
            }
        }
    }
    let o = make_adversarial_oracle(AdversarialKind::CoefficientSquare, Family::SVir0);
    let homogeneous = homogeneity_check(&o, &[(rat(2), l(Family::SVir0, 1))]).unwrap();
    if homogeneous != vec![false] {
        failures.push("coefficient_square passes homogeneity on (2, L1)".into());
    }
    failures
}

fn c9_determinism() -> Vec<String> {
    let mut failures = Vec::new();
    for family in GLOBAL_FAMILIES {
        for seed in [0u64, 7, 99] {
            let a = honest_certificate(family, seed).1.to_json();
            let b = honest_certificate(family, seed).1.to_json();
            if a != b {
                failures.push(format!("honest {family} seed {seed}: JSON differs"));
            }
        }
        for kind in AdversarialKind::ALL {
            let a = adversarial_certificate(kind, family, 3).to_json();
            let b = adversarial_certificate(kind, family, 3).to_json();
            if a != b {
                failures.push(format!("{} {family}: JSON differs", kind.name()));
            }
        }
    }
    let argv = [
        "superderiv",
        "--algebra",
        "sw22",
        "globalize",
        "--oracle",
        "honest:2*L[1] - I[-3] + 1/2*Q[2]",
        "--lambda",
        "-2",
        "--seed",
        "11",
    ];
    let first = run_command(&argv, None);
    let second = run_command(&argv, None);
    if first.code != 0 || first != second {
        failures.push(format!(
            "CLI globalize not reproducible (exit {})",
            first.code
        ));
    }
    failures
}

#[test]
fn acceptance_suite() {
    let results = [
        report(
            1,
            "anti-symmetry and graded Jacobi, indices in [-4,4], all families",
            &c1_structure(),
        ),
        report(
            2,
            "outer derivation has zero Leibniz defect on SW(2,2), [-3,3]",
            &c2_outer(),
        ),
        report(
            3,
            "annihilator of G_i is span{ad(L_2i)} in SVir[0] and SVir[1/2]",
            &c3_g_annihilators(),
        ),
        report(
            4,
            "annihilator of G_r in SW(2,2) is span{ad(L_2r), ad(I_2r), D}",
            &c4_sw22_g(),
        ),
        report(
            5,
            "annihilator of I_0+Q_0 has dimension 4W+4, W in {2,3,4}",
            &c5_i0_q0(),
        ),
        report(
            6,
            "annihilator of L_p+I_2p+Q_2p is span{itself, ad(I_p)}",
            &c6_mixed(),
        ),
        report(
            7,
            "honest oracles globalize to the generating derivation (3 x 100 seeds)",
            &c7_round_trip(),
        ),
        report(
            8,
            "adversarial oracles fail with a witness (3 kinds x 20 seeds)",
            &c8_adversarial(),
        ),
        report(
            9,
            "certificates are byte-identical across repeated runs",
            &c9_determinism(),
        ),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    assert!(results.iter().all(|&ok| ok));
}

#[test]
fn random_derivations_cover_the_parameter_range() {
    let lambdas: std::collections::BTreeSet<String> = (0..100)
        .map(|s| {
            random_derivation(Family::SW22, s)
                .outer_lambda()
                .to_string()
        })
        .collect();
    assert_eq!(lambdas.len(), 7);
    for family in GLOBAL_FAMILIES {
        for seed in 0..100 {
            let d = random_derivation(family, seed);
            assert!(d.inner_part().max_abs_index() <= rat(5));
        }
        assert!(random_derivation(family, 0).outer_lambda().is_zero() || family == Family::SW22);
    }
}
