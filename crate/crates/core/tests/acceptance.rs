//! Acceptance suite: one test per criterion, each printing a pass line.
//! All checks are exact (integer or rational); the stated runtime budgets
//! are asserted.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use morsecert_core::autf::{
    self, freeness_chain, is_inner, phi, phi_inv, pingpong_search, psi, psi_inv, sigma,
    verify_relations, FreeGroupEndo, InnerVerdict, IntMatrix,
};
use morsecert_core::builders::{
    build_example, hexagon_complex_from, hexagon_shift, wedge_complex, BuiltExample, ExampleSpec,
    HexagonFaceFamily,
};
use morsecert_core::complex::{homology, HomologyGroup};
use morsecert_core::curvature::{
    min_link_cycle_angle, CornerAngleAssignment, CurvatureRule, Verdict,
};
use morsecert_core::group::{
    conjugacy_oracle, iota, morse_degree, swap_word, witness, ConjugacyVerdict, DoubledFreeElement,
};
use morsecert_core::morse::{
    finiteness_report, product_ascending_link, product_descending_link, FinitenessConclusion,
    MorseWeighting,
};
use morsecert_core::symmetry::{
    certify_model_situation, free_action_report, induced_link_permutation, CellularAutomorphism,
    ModelInput,
};
use morsecert_core::words::{FreeWord, Letter};

fn pass(criterion: u32, elapsed: Duration, message: &str) {
    println!("[acceptance] criterion {criterion} PASS ({elapsed:?}): {message}");
}

fn built(spec: ExampleSpec) -> BuiltExample {
    build_example(&spec).expect("example builds")
}

fn random_reduced_word(rng: &mut ChaCha8Rng, rank: u16, max_len: usize) -> FreeWord {
    let len = rng.gen_range(0..=max_len);
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    for _ in 0..len {
        loop {
            let l = Letter::new(rng.gen_range(0..rank), rng.gen_bool(0.5));
            if letters
                .last()
                .is_none_or(|&last| !(last.gen == l.gen && last.inv != l.inv))
            {
                letters.push(l);
                break;
            }
        }
    }
    FreeWord::from_letters(letters)
}

#[test]
fn criterion_1_raag_certification() {
    let t0 = Instant::now();
    for n in 1..=4usize {
        let example = built(ExampleSpec::Raag { n });
        let cert = certify_model_situation(&example.input).expect("certifier runs");
        assert!(cert.checks.all(), "raag-{n} checks: {:?}", cert.failed);
        assert_eq!(cert.order, Some(2), "raag-{n} symmetry order");
        assert!(cert.conclusion.is_some());

        let p = example.input.product();
        let asc =
            product_ascending_link(&p, &example.input.weightings, &example.input.base_vertices)
                .unwrap();
        let desc =
            product_descending_link(&p, &example.input.weightings, &example.input.base_vertices)
                .unwrap();
        for link in [&asc, &desc] {
            assert_eq!(
                link.vertex_count(),
                2 * n,
                "raag-{n} link is a join of {n} 0-spheres"
            );
            let h = homology(link.base());
            for d in 0..n.saturating_sub(1) {
                assert!(h.group(d).is_zero(), "raag-{n} link reduced H_{d} vanishes");
            }
            assert_eq!(
                h.group(n - 1),
                HomologyGroup::free(1),
                "raag-{n} link H_{}",
                n - 1
            );
        }
        let report = finiteness_report(&asc, &desc);
        assert_eq!(
            report.conclusion,
            FinitenessConclusion::ExactlyF { m: n - 1 },
            "raag-{n} kernel is F_{} but not F_{}",
            n - 1,
            n
        );
    }
    let elapsed = t0.elapsed();
    assert!(
        elapsed < Duration::from_secs(5),
        "budget exceeded: {elapsed:?}"
    );
    pass(
        1,
        elapsed,
        "raag-1..4 certify with order 2, sphere links, F_{n-1} not F_n",
    );
}

#[test]
fn criterion_2_hexagon_complex() {
    let t0 = Instant::now();
    let example = built(ExampleSpec::Hexagon);
    let input = &example.input;
    let c = &input.factors[0];
    let w = &input.weightings[0];
    let v = &input.base_vertices[0];

    let link = morsecert_core::complex::vertex_link(c, v).unwrap();
    assert_eq!(link.vertex_count(), 16);
    assert_eq!(link.corner_edges().len(), 48);

    let angles = CornerAngleAssignment::right_angled(c);
    let min = min_link_cycle_angle(&link, &angles).unwrap();
    assert_eq!(
        min,
        Some(num::rational::Ratio::from_integer(2)),
        "minimum link cycle angle is exactly 2π"
    );

    let curv = morsecert_core::curvature::certify_2complex(c, &angles).unwrap();
    assert_eq!(curv.verdict, Verdict::CatMinusOne);

    let asc = morsecert_core::morse::ascending_link(c, w, v).unwrap();
    let desc = morsecert_core::morse::descending_link(c, w, v).unwrap();
    for link in [&asc, &desc] {
        assert_eq!(link.vertex_count(), 8);
        assert_eq!(link.base().simplices_of_dim(1).len(), 8);
        assert!(link.base().is_connected());
        let h = homology(link.base());
        assert!(h.group(0).is_zero());
        assert_eq!(h.group(1), HomologyGroup::free(1));
    }

    let report = finiteness_report(&asc, &desc);
    assert_eq!(report.conclusion, FinitenessConclusion::ExactlyF { m: 1 });

    let shift = &input.automorphisms[0];
    assert_eq!(morsecert_core::symmetry::order_of(c, shift).unwrap(), 8);
    let action = morsecert_core::symmetry::acts_freely_on_link(c, shift, v).unwrap();
    assert!(action.free, "no invariant simplex: {:?}", action.witness);
    // informational power reports: every nontrivial power also acts freely here
    assert!(action.power_free.values().all(|&free| free));

    let cert = certify_model_situation(input).unwrap();
    assert!(cert.checks.all(), "failed: {:?}", cert.failed);
    assert_eq!(cert.order, Some(8));
    let conclusion = cert.conclusion.expect("conclusion emitted");
    assert!(
        conclusion.contains("infinitely many conjugacy classes of elements of order 8"),
        "got: {conclusion}"
    );
    let elapsed = t0.elapsed();
    assert!(
        elapsed < Duration::from_secs(5),
        "budget exceeded: {elapsed:?}"
    );
    pass(
        2,
        elapsed,
        "hexagon: 16/48 link, girth 2π, CAT(-1), circle links, order-8 conclusion",
    );
}

#[test]
fn criterion_3_hexagon_product() {
    let t0 = Instant::now();
    let example = built(ExampleSpec::HexagonProduct);
    let input = &example.input;
    let p = input.product();

    let asc = product_ascending_link(&p, &input.weightings, &input.base_vertices).unwrap();
    let desc = product_descending_link(&p, &input.weightings, &input.base_vertices).unwrap();
    for link in [&asc, &desc] {
        assert_eq!(link.vertex_count(), 16);
        assert_eq!(link.base().simplex_count(), 288);
        let h = homology(link.base());
        assert!(
            h.is_zero_through(2),
            "reduced homology vanishes through dim 2"
        );
        assert_eq!(h.group(3), HomologyGroup::free(1), "three-sphere signature");
    }

    let report = finiteness_report(&asc, &desc);
    assert_eq!(report.conclusion, FinitenessConclusion::ExactlyF { m: 3 });

    let cert = certify_model_situation(input).unwrap();
    assert!(cert.checks.all(), "failed: {:?}", cert.failed);
    assert_eq!(cert.curvature.rule, CurvatureRule::ProductOfNpc);
    assert_eq!(cert.curvature.verdict, Verdict::Npc);
    assert_eq!(cert.order, Some(8));

    // the diagonal shift freely permutes the join, all orbits of size 8
    let autos: Vec<&CellularAutomorphism> = input.automorphisms.iter().collect();
    for link in [&asc, &desc] {
        let perm = induced_link_permutation(link, &autos).unwrap();
        let action = free_action_report(link, &perm, 8);
        assert!(action.free, "invariant simplex: {:?}", action.witness);
        assert_eq!(action.orbit_sizes, BTreeMap::from([(8usize, 36usize)]));
    }
    let elapsed = t0.elapsed();
    assert!(
        elapsed < Duration::from_secs(30),
        "budget exceeded: {elapsed:?}"
    );
    pass(
        3,
        elapsed,
        "product: 3-sphere links, F_3 not F_4, NPC by product rule, free orbits of 8",
    );
}

#[test]
fn criterion_4_conjugacy_oracle() {
    let t0 = Instant::now();
    for n in [1usize, 2] {
        let t = DoubledFreeElement::standard_t(n);
        let witnesses: Vec<DoubledFreeElement> = (0..=5).map(|j| witness(j, &t).unwrap()).collect();

        // six pairwise-distinct invariants
        let iotas: Vec<i64> = witnesses.iter().map(|w| iota(w).unwrap()).collect();
        assert_eq!(iotas, vec![0, 1, 2, 3, 4, 5]);

        // kernel-restricted exhaustion separates witnesses 0..=3
        for j in 0..=3usize {
            for k in (j + 1)..=3 {
                let verdict = conjugacy_oracle(&witnesses[j], &witnesses[k], 6, true).unwrap();
                match verdict {
                    ConjugacyVerdict::NoConjugator { tested, .. } => {
                        assert!(tested > 0 && tested <= 1_000_000);
                    }
                    ConjugacyVerdict::Conjugate { witness } => panic!(
                        "witness({j}) and witness({k}) must not be kernel-conjugate; found {witness}"
                    ),
                }
            }
        }

        // planted conjugators are always found
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for j in 0..=2u32 {
            let g = &witnesses[j as usize];
            let coords: Vec<FreeWord> = (0..n)
                .map(|_| random_reduced_word(&mut rng, 2, 2))
                .collect();
            let c = DoubledFreeElement::new(coords, rng.gen_bool(0.5)).unwrap();
            let h = g.conjugate_by(&c).unwrap();
            match conjugacy_oracle(g, &h, 6, false).unwrap() {
                ConjugacyVerdict::Conjugate { witness } => {
                    assert_eq!(g.conjugate_by(&witness).unwrap(), h);
                }
                other => panic!("planted conjugator {c} not found: {other:?}"),
            }
        }
    }
    let elapsed = t0.elapsed();
    assert!(
        elapsed < Duration::from_secs(60),
        "budget exceeded: {elapsed:?}"
    );
    pass(
        4,
        elapsed,
        "iota separates witnesses 0..5; kernel search through length 6 finds nothing",
    );
}

#[test]
fn criterion_5_iota_shift_law() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let n = 2usize;
    let mut checked = 0u32;
    while checked < 1000 {
        // g = (u σ(u)^-1, σ) has a twisted square root by construction
        let u: Vec<FreeWord> = (0..n)
            .map(|_| random_reduced_word(&mut rng, 2, 3))
            .collect();
        let coords: Vec<FreeWord> = u
            .iter()
            .map(|w| w.concat(&swap_word(w).inverse()))
            .collect();
        let g = DoubledFreeElement::new(coords, true).unwrap();
        let c = DoubledFreeElement::new(
            (0..n)
                .map(|_| random_reduced_word(&mut rng, 2, 3))
                .collect(),
            rng.gen_bool(0.5),
        )
        .unwrap();
        let conj = g.conjugate_by(&c).unwrap();
        assert_eq!(
            iota(&conj).unwrap(),
            iota(&g).unwrap() + morse_degree(&c),
            "ι(c g c^-1) = ι(g) + deg(c) for g={g}, c={c}"
        );
        checked += 1;
    }
    let elapsed = t0.elapsed();
    pass(
        5,
        elapsed,
        "ι(c g c^-1) = ι(g) + deg(c) on 1000 random samples, exactly",
    );
}

#[test]
fn criterion_6_relations_and_matrices() {
    let t0 = Instant::now();
    for k in [2usize, 4, 6] {
        let report = verify_relations(k).unwrap();
        assert!(
            report.all_hold,
            "relations fail at rank {k}: {:?}",
            report.checks
        );
    }
    assert_eq!(
        phi(1, 2).unwrap().abelianization(),
        IntMatrix::from_rows(vec![vec![2, 1], vec![1, 1]])
    );
    assert_eq!(
        psi(1, 2).unwrap().abelianization(),
        IntMatrix::from_rows(vec![vec![1, 1], vec![1, 2]])
    );
    let elapsed = t0.elapsed();
    pass(
        6,
        elapsed,
        "relations hold at k = 2, 4, 6; abelianizations are [2 1;1 1] and [1 1;1 2]",
    );
}

#[test]
fn criterion_7_pingpong_certificate() {
    let t0 = Instant::now();
    let a = IntMatrix::from_rows(vec![vec![2, 1], vec![1, 1]]);
    let b = IntMatrix::from_rows(vec![vec![1, 1], vec![1, 2]]);
    let cert = pingpong_search(&a, &b, 16)
        .unwrap()
        .expect("a certificate with N <= 16 must exist; the bound may only be revised with a recorded derivation");
    assert!(cert.n <= 16);
    assert!(autf::pingpong::replay_certificate(&a, &b, &cert).unwrap());
    assert!(cert.inclusions.iter().all(|c| c.holds));

    let chain = freeness_chain(&a, &b, Some(&cert)).unwrap();
    assert_eq!(chain.n, cert.n);
    assert!(chain.steps.iter().any(|s| s.contains("ping-pong")));
    assert!(chain.steps.iter().any(|s| s.contains("Hopfian")));
    let elapsed = t0.elapsed();
    pass(
        7,
        elapsed,
        &format!("replayable ping-pong certificate at N = {}", cert.n),
    );
}

#[test]
fn criterion_8_inner_automorphism_test() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(77);

    // 100 random inner automorphisms: the exact conjugator comes back
    let mut found = 0u32;
    while found < 100 {
        let k = rng.gen_range(2..=6usize);
        let x = random_reduced_word(&mut rng, k as u16, 6);
        let e = FreeGroupEndo::conjugation(k, &x).unwrap();
        assert_eq!(e.abelianization(), IntMatrix::identity(k));
        match is_inner(&e) {
            InnerVerdict::Inner { conjugator } => assert_eq!(conjugator, x),
            InnerVerdict::NotInner => panic!("conjugation by {x:?} must be inner"),
        }
        found += 1;
    }

    // the generators themselves are not inner
    assert_eq!(is_inner(&phi(1, 2).unwrap()), InnerVerdict::NotInner);
    assert_eq!(is_inner(&psi(1, 2).unwrap()), InnerVerdict::NotInner);
    assert_eq!(is_inner(&sigma(2)), InnerVerdict::NotInner);
    assert_eq!(is_inner(&sigma(6)), InnerVerdict::NotInner);

    // 50 random non-identity products of the subgroup generators
    let k = 6usize;
    let n = pingpong_search(
        &phi(1, 2).unwrap().abelianization(),
        &psi(1, 2).unwrap().abelianization(),
        16,
    )
    .unwrap()
    .expect("power from the freeness certificate")
    .n;
    let mut generators: Vec<FreeGroupEndo> = vec![sigma(k)];
    for i in 1..=(k / 2) {
        generators.push(phi(i, k).unwrap().pow(n).unwrap());
        generators.push(psi(i, k).unwrap().pow(n).unwrap());
        generators.push(phi_inv(i, k).unwrap().pow(n).unwrap());
        generators.push(psi_inv(i, k).unwrap().pow(n).unwrap());
    }
    let mut rejected = 0u32;
    while rejected < 50 {
        let len = rng.gen_range(1..=4usize);
        let mut product = FreeGroupEndo::identity(k);
        for _ in 0..len {
            let g = &generators[rng.gen_range(0..generators.len())];
            product = g.compose(&product).unwrap();
        }
        if product.is_identity() {
            continue;
        }
        assert_eq!(
            is_inner(&product),
            InnerVerdict::NotInner,
            "nontrivial generator product detected as inner"
        );
        rejected += 1;
    }
    let elapsed = t0.elapsed();
    pass(
        8,
        elapsed,
        "100 planted conjugators recovered exactly; 50 generator products not inner",
    );
}

#[test]
fn criterion_9_negative_controls() {
    let t0 = Instant::now();

    // (a) a face family that fails to close up: zero-sum violated, and
    // nothing else (the corner multiset is unchanged)
    let drift = hexagon_complex_from(&HexagonFaceFamily::drift_family());
    let shift = hexagon_shift(&drift).unwrap();
    let control_a = ModelInput {
        weightings: vec![MorseWeighting::unit(&drift)],
        angles: vec![CornerAngleAssignment::right_angled(&drift)],
        automorphisms: vec![shift],
        base_vertices: vec!["v".into()],
        metadata: BTreeMap::new(),
        factors: vec![drift],
    };
    let cert = certify_model_situation(&control_a).unwrap();
    assert!(cert.conclusion.is_none());
    assert_eq!(cert.failed, vec!["morse_valid".to_string()]);

    // (b) non-equivariant weights on the double wedge
    let raag2 = built(ExampleSpec::Raag { n: 2 });
    let mut control_b = raag2.input.clone();
    control_b.weightings[0].weights.insert("b".into(), 2);
    let cert = certify_model_situation(&control_b).unwrap();
    assert!(cert.conclusion.is_none());
    assert_eq!(cert.failed, vec!["equivariant".to_string()]);

    // (c) a symmetry with an invariant link simplex: swap in one factor,
    // identity in the other
    let mut control_c = raag2.input.clone();
    control_c.automorphisms[1] = CellularAutomorphism::identity(&wedge_complex());
    let cert = certify_model_situation(&control_c).unwrap();
    assert!(cert.conclusion.is_none());
    assert_eq!(cert.failed, vec!["free_on_link".to_string()]);
    let action = cert.free_action.expect("free action report present");
    assert!(action.witness.is_some());

    // (d) non-epimorphic weighting: every hexagon edge wraps twice
    let hexagon = built(ExampleSpec::Hexagon);
    let mut control_d = hexagon.input.clone();
    for v in control_d.weightings[0].weights.values_mut() {
        *v = 2;
    }
    let cert = certify_model_situation(&control_d).unwrap();
    assert!(cert.conclusion.is_none());
    assert_eq!(cert.failed, vec!["epi_onto_Z".to_string()]);

    let elapsed = t0.elapsed();
    pass(
        9,
        elapsed,
        "each broken hypothesis withholds the conclusion and is named exactly",
    );
}

#[test]
fn alternative_degree_one_elements_reach_the_same_conclusion() {
    // the choice of t is free in the witness family; two alternatives give
    // the same separating invariants
    let alt1 =
        DoubledFreeElement::new(vec![FreeWord::generator(1), FreeWord::identity()], false).unwrap(); // (b, 1)
    let alt2 =
        DoubledFreeElement::new(vec![FreeWord::identity(), FreeWord::generator(0)], false).unwrap(); // (1, a)
    for t in [alt1, alt2] {
        assert_eq!(morse_degree(&t), 1);
        let ws: Vec<DoubledFreeElement> = (0..=3).map(|j| witness(j, &t).unwrap()).collect();
        let iotas: Vec<i64> = ws.iter().map(|w| iota(w).unwrap()).collect();
        assert_eq!(iotas, vec![0, 1, 2, 3]);
        for j in 0..ws.len() {
            for k in (j + 1)..ws.len() {
                match conjugacy_oracle(&ws[j], &ws[k], 4, true).unwrap() {
                    ConjugacyVerdict::NoConjugator { .. } => {}
                    ConjugacyVerdict::Conjugate { witness } => {
                        panic!("alternative-t witnesses conjugate via {witness}")
                    }
                }
            }
        }
    }
}
