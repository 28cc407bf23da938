#![allow(dead_code)]

use std::collections::BTreeSet;

use matchstab::audit::{corpus, corpus_case, CorpusCase};
use matchstab::concepts::{check_af_fractional, check_concept, Concept, VerdictRecord};
use matchstab::decomposition::{
    enumerate_realizable, oracle_all_decompositions, solve_convex_feasibility, FeasibilitySystem,
};
use matchstab::deterministic::check_weakly_stable_det;
use matchstab::matching::enumerate_deterministic;
use matchstab::rational::rat;
use matchstab::transform::{restrict_back, to_associated_instance, to_associated_matching};
use matchstab::{bvn_decompose, Decomposition, DeterministicMatching, Instance, ModelTier, Part, RandomMatching};

pub const CAP: usize = 16;

pub fn case(id: &str) -> CorpusCase {
    corpus_case(id).unwrap_or_else(|| panic!("no corpus case {id}"))
}

pub fn record(c: &CorpusCase, concept: Concept) -> VerdictRecord {
    check_concept(&c.instance, &c.matching, c.tier, concept, CAP)
        .unwrap()
        .to_record(&c.instance)
}

pub fn det(inst: &Instance, pairs: &[(&str, &str)]) -> DeterministicMatching {
    let idx: Vec<(usize, usize)> = pairs
        .iter()
        .map(|(a, o)| (inst.agent_index(a).unwrap(), inst.object_index(o).unwrap()))
        .collect();
    DeterministicMatching::from_pairs(inst.n(), inst.m(), &idx).unwrap()
}

pub fn rows(text: &[&[(i64, i64)]]) -> Vec<Vec<matchstab::Rat>> {
    text.iter()
        .map(|r| r.iter().map(|&(a, b)| rat(a, b)).collect())
        .collect()
}

fn expect(failures: &mut Vec<String>, ok: bool, what: impl Into<String>) {
    if !ok {
        failures.push(what.into());
    }
}

/// Tuple of witness labels: `(agent, other_agent, object, other_object)`.
fn tuple(r: &VerdictRecord) -> (String, Option<String>, String, Option<String>) {
    let w = r.witness.as_ref().expect("witness present");
    (
        w.agent.clone(),
        w.other_agent.clone(),
        w.object.clone(),
        w.other_object.clone(),
    )
}

fn s(x: &str) -> String {
    x.to_string()
}

pub fn expectation_failures() -> Vec<String> {
    let mut failures = Vec::new();
    for c in corpus() {
        let outcome = c.run(CAP);
        for k in outcome.checks.iter().filter(|k| k.actual != Some(k.expected)) {
            failures.push(format!(
                "{} {}: expected {}, got {:?} {}",
                c.id,
                k.key,
                k.expected,
                k.actual,
                k.error.clone().unwrap_or_default()
            ));
        }
    }
    failures
}

pub fn ex1_failures() -> Vec<String> {
    let mut f = Vec::new();
    let c = case("EX1");
    let decs = oracle_all_decompositions(&c.matching, c.tier, CAP).unwrap();
    expect(
        &mut f,
        decs.len() == 2,
        format!("EX1 has {} vertex decompositions", decs.len()),
    );
    let all_stable = decs
        .iter()
        .flat_map(|d| d.parts())
        .all(|p| check_weakly_stable_det(&c.instance, &p.matching, c.tier).is_ok());
    expect(&mut f, all_stable, "EX1 decomposition with an unstable part");
    let i = &c.instance;
    let half = |a: DeterministicMatching, b: DeterministicMatching| {
        part_set(
            &Decomposition::new(vec![
                Part {
                    weight: rat(1, 2),
                    matching: a,
                },
                Part {
                    weight: rat(1, 2),
                    matching: b,
                },
            ])
            .unwrap(),
        )
    };
    let expected: BTreeSet<_> = [
        half(
            det(i, &[("1", "w"), ("2", "x"), ("3", "y"), ("4", "z")]),
            det(i, &[("1", "x"), ("2", "w"), ("3", "z"), ("4", "y")]),
        ),
        half(
            det(i, &[("1", "w"), ("2", "x"), ("3", "z"), ("4", "y")]),
            det(i, &[("1", "x"), ("2", "w"), ("3", "y"), ("4", "z")]),
        ),
    ]
    .into_iter()
    .collect();
    let got: BTreeSet<_> = decs.iter().map(part_set).collect();
    expect(
        &mut f,
        got == expected,
        "EX1 decompositions differ from the two block choices",
    );
    let canonical = part_set(&bvn_decompose(&c.matching));
    expect(
        &mut f,
        expected.contains(&canonical),
        "EX1 canonical decomposition is not one of the two",
    );
    f
}

/// Order-free view of a decomposition.
pub fn part_set(d: &Decomposition) -> BTreeSet<(String, Vec<Vec<u8>>)> {
    d.parts()
        .iter()
        .map(|p| (p.weight.to_string(), p.matching.rows()))
        .collect()
}

pub fn p4_failures() -> Vec<String> {
    let mut f = Vec::new();
    let c = case("P4");
    let r = record(&c, Concept::ExAnte);
    expect(
        &mut f,
        tuple(&r) == (s("1"), Some(s("2")), s("y"), Some(s("z"))),
        format!("P4 ex-ante witness {:?}", r.witness),
    );
    let af = check_af_fractional(&c.instance, &c.matching);
    let w = af.witness.expect("P4 af witness");
    expect(
        &mut f,
        (w.agent, w.object) == (0, 1) && w.values == vec![rat(1, 2), rat(1, 2)],
        "P4 af witness is not (1, y) with sums 1/2, 1/2",
    );
    let i = &c.instance;
    let pa = det(i, &[("1", "x"), ("2", "y"), ("3", "z")]);
    let po = det(i, &[("1", "z"), ("2", "x"), ("3", "y")]);
    let realizable = enumerate_realizable(&c.matching, c.tier, CAP).unwrap();
    expect(
        &mut f,
        realizable == vec![po.clone(), pa.clone()] || realizable == vec![pa.clone(), po.clone()],
        "P4 realizable set",
    );
    let decs = oracle_all_decompositions(&c.matching, c.tier, CAP).unwrap();
    expect(
        &mut f,
        decs.len() == 1 && decs[0].len() == 2 && decs[0].contains(&pa) && decs[0].contains(&po),
        "P4 has a decomposition other than {pA, pO}",
    );
    f
}

pub fn p6_failures() -> Vec<String> {
    let mut f = Vec::new();
    let c = case("P6");
    let i = &c.instance;
    let stable = [
        det(i, &[("1", "x"), ("2", "y"), ("3", "z")]),
        det(i, &[("1", "z"), ("2", "x"), ("3", "y")]),
        det(i, &[("1", "y"), ("2", "z"), ("3", "x")]),
    ];
    let v = check_concept(i, &c.matching, c.tier, Concept::ExPost, CAP).unwrap();
    let cert = v.certificate.expect("P6 ex-post certificate");
    expect(
        &mut f,
        cert.len() == 3
            && stable.iter().all(|q| cert.contains(q))
            && cert.parts().iter().all(|p| p.weight == rat(1, 3)),
        "P6 certificate is not 1/3 of each stable matching",
    );
    let sys = FeasibilitySystem::new(stable.to_vec(), c.matching.clone()).unwrap();
    expect(
        &mut f,
        solve_convex_feasibility(&sys) == Some(vec![rat(1, 3), rat(1, 3), rat(1, 3)]),
        "P6 feasibility weights",
    );
    let robust = check_concept(i, &c.matching, c.tier, Concept::RobustExPost, CAP).unwrap();
    let d = robust.certificate.expect("P6 robust counter-decomposition");
    expect(
        &mut f,
        !robust.holds
            && d.reconstructs(&c.matching)
            && d.parts()
                .iter()
                .all(|p| check_weakly_stable_det(i, &p.matching, c.tier).is_err()),
        "P6 robust failure does not come with an all-unstable decomposition",
    );
    let realizable = enumerate_realizable(&c.matching, c.tier, CAP).unwrap();
    expect(
        &mut f,
        realizable.len() == 6,
        "uniform 3x3 does not realize all six permutations",
    );
    f
}

pub fn p10_failures() -> Vec<String> {
    let mut f = Vec::new();
    let c = case("P10");
    let r = record(&c, Concept::Fractional);
    let w = r.witness.clone().expect("P10 fractional witness");
    expect(
        &mut f,
        (w.agent.as_str(), w.object.as_str()) == ("2", "x") && r.values == Some(vec![s("2/3"), s("1/3")]),
        format!("P10 fractional witness {:?} {:?}", w, r.values),
    );
    let stable = enumerate_deterministic(&c.instance, true, c.tier, CAP).unwrap();
    expect(
        &mut f,
        stable.len() == 3,
        format!("P10 has {} stable matchings", stable.len()),
    );
    expect(
        &mut f,
        stable.iter().all(|q| q.partner(0) != Some(1)),
        "agent 1 gets y in a stable matching",
    );
    let sys = FeasibilitySystem::new(stable, c.matching.clone()).unwrap();
    expect(
        &mut f,
        solve_convex_feasibility(&sys).is_none(),
        "P10 stable matchings decompose the uniform matching",
    );
    f
}

pub fn p16_failures() -> Vec<String> {
    let mut f = Vec::new();
    let c = case("P16");
    let realizable = enumerate_realizable(&c.matching, c.tier, CAP).unwrap();
    expect(
        &mut f,
        realizable.len() == 2,
        format!("P16 realizes {} matchings", realizable.len()),
    );
    let unstable = realizable
        .iter()
        .filter(|q| check_weakly_stable_det(&c.instance, q, c.tier).is_err())
        .count();
    expect(
        &mut f,
        unstable == 1,
        "P16 unique decomposition should hold exactly one unstable part",
    );
    f
}

pub fn p33_failures() -> Vec<String> {
    let mut f = Vec::new();
    let c = case("P33");
    let r = record(&c, Concept::Claimwise);
    expect(
        &mut f,
        tuple(&r) == (s("2"), Some(s("3")), s("x"), None) && r.values == Some(vec![s("1/2"), s("1/4")]),
        format!("P33 claim {:?} {:?}", r.witness, r.values),
    );
    f
}

pub fn ex3_failures() -> Vec<String> {
    let mut f = Vec::new();
    let c = case("EX3");
    let pa = to_associated_matching(&c.matching);
    let golden = rows(&[
        &[(1, 3), (1, 2), (1, 6), (0, 1), (0, 1)],
        &[(0, 1), (1, 2), (0, 1), (1, 2), (0, 1)],
        &[(2, 3), (0, 1), (0, 1), (0, 1), (1, 3)],
        &[(0, 1), (0, 1), (1, 3), (0, 1), (2, 3)],
        &[(0, 1), (0, 1), (1, 2), (1, 2), (0, 1)],
    ]);
    expect(&mut f, pa.rows() == golden, "EX3 associated matrix differs");
    let (assoc, map) = to_associated_instance(&c.instance);
    let expected = "agents: 1 2 3 d_x d_y\n\
        objects: x y phi_1 phi_2 phi_3\n\
        pref 1: x > y > phi_1 > phi_2 > phi_3 > @\n\
        pref 2: y > x > phi_2 > phi_1 > phi_3 > @\n\
        pref 3: x > phi_3 > phi_1 > phi_2 > y > @\n\
        pref d_x: x > y > phi_2 > phi_3 > phi_1 > @\n\
        pref d_y: y > x > phi_1 > phi_2 > phi_3 > @\n\
        prio x: 2 > 3 > 1 > d_x > d_y > @\n\
        prio y: 1 > 2 > d_y > d_x > 3 > @\n\
        prio phi_1: 1 > 2 > 3 > d_x > d_y > @\n\
        prio phi_2: 2 > 1 > 3 > d_y > d_x > @\n\
        prio phi_3: 3 > 1 > 2 > d_x > d_y > @\n";
    expect(
        &mut f,
        assoc.render() == expected,
        format!("EX3 associated instance:\n{}", assoc.render()),
    );
    expect(
        &mut f,
        restrict_back(&pa, map).unwrap() == c.matching,
        "EX3 restriction does not return p",
    );
    f
}

pub fn ex7_failures() -> Vec<String> {
    let mut f = Vec::new();
    let c = case("EX7");
    let (assoc, _) = to_associated_instance(&c.instance);
    let pa = to_associated_matching(&c.matching);
    let v = check_concept(&assoc, &pa, assoc.classify_tier(), Concept::Claimwise, CAP).unwrap();
    let r = v.to_record(&assoc);
    expect(
        &mut f,
        !r.holds && tuple(&r) == (s("d_x"), Some(s("d_z")), s("phi_2"), None),
        format!("EX7 associated claim {:?}", r.witness),
    );
    let d_block = (3..6).all(|a| (3..6).all(|o| *pa.get(a, o) == rat(1, 3)));
    expect(&mut f, d_block, "EX7 dummy-null block is not uniform");
    f
}

/// Red arrows of the implication diagrams, each with the corpus case that separates it.
pub const SEPARATIONS: &[(&str, &str, &str, &str)] = &[
    (
        "robust ex-post does not imply ex-ante",
        "P4",
        "robust-ex-post",
        "ex-ante",
    ),
    (
        "ex-post does not imply robust ex-post",
        "P6",
        "ex-post",
        "robust-ex-post",
    ),
    ("claimwise does not imply fractional", "P10", "claimwise", "fractional"),
    ("claimwise does not imply ex-post", "P10", "claimwise", "ex-post"),
    (
        "weak sd-stability does not imply claimwise",
        "P33",
        "sd-weak",
        "claimwise",
    ),
    (
        "fractional does not imply ex-post under ties",
        "P16",
        "fractional",
        "ex-post",
    ),
    (
        "stable decomposition does not give ex-post when wasteful",
        "EX5",
        "stable-decomposition",
        "ex-post",
    ),
    (
        "the inequalities do not give non-wastefulness",
        "EX2",
        "fractional-inequalities",
        "det-non-wasteful",
    ),
    (
        "associated fractional stability does not give fractional",
        "EX6",
        "assoc:fractional",
        "fractional",
    ),
    (
        "claimwise does not transfer to the associated matching",
        "EX7",
        "claimwise",
        "assoc:claimwise",
    ),
    (
        "associated claimwise stability does not give claimwise",
        "EX8",
        "assoc:claimwise",
        "claimwise",
    ),
];

pub fn separation_failures() -> Vec<String> {
    let mut f = Vec::new();
    for &(name, id, holds, fails) in SEPARATIONS {
        let c = case(id);
        let get = |k: &str| matchstab::audit::evaluate_key(&c.instance, &c.matching, c.tier, k, CAP).ok();
        if get(holds) != Some(true) || get(fails) != Some(false) {
            f.push(format!("{id} does not separate: {name}"));
        }
    }
    f
}

pub fn all_corpus_failures() -> Vec<String> {
    let mut f = expectation_failures();
    for g in [
        ex1_failures,
        p4_failures,
        p6_failures,
        p10_failures,
        p16_failures,
        p33_failures,
        ex3_failures,
        ex7_failures,
        separation_failures,
    ] {
        f.extend(g());
    }
    f
}

pub fn uniform(n: usize) -> RandomMatching {
    RandomMatching::from_rows(vec![vec![rat(1, n as i64); n]; n]).unwrap()
}

pub fn tier_of(name: &str) -> ModelTier {
    ModelTier::from_name(name).unwrap()
}

/// Cross-checks every decomposition path on `(inst, p)` against vertex enumeration.
pub fn decomposition_oracle_failures(inst: &Instance, p: &RandomMatching, tier: ModelTier, cap: usize) -> Vec<String> {
    use matchstab::concepts::{check_ex_post, check_robust_ex_post};
    use matchstab::decomposition::decomposition_containing;
    use matchstab::deterministic::check_non_wasteful;

    let mut f = Vec::new();
    let decs = oracle_all_decompositions(p, tier, cap).unwrap();
    expect(&mut f, !decs.is_empty(), "no vertex decomposition");
    expect(
        &mut f,
        decs.iter().all(|d| d.reconstructs(p)),
        "vertex decomposition does not reconstruct",
    );
    let union: BTreeSet<Vec<u8>> = decs.iter().flat_map(|d| d.parts()).map(|q| q.matching.key()).collect();
    let realizable = enumerate_realizable(p, tier, cap).unwrap();
    let listed: BTreeSet<Vec<u8>> = realizable.iter().map(DeterministicMatching::key).collect();
    expect(
        &mut f,
        union == listed,
        format!("realizable {listed:?} but vertices use {union:?}"),
    );
    for q in &realizable {
        let ok = decomposition_containing(p, q).is_some_and(|d| d.reconstructs(p) && d.contains(q));
        expect(&mut f, ok, format!("no decomposition built around {:?}", q.rows()));
    }
    expect(
        &mut f,
        bvn_decompose(p).reconstructs(p),
        "canonical decomposition does not reconstruct",
    );

    let stable = |q: &DeterministicMatching| check_weakly_stable_det(inst, q, tier).is_ok();
    let nw = tier != ModelTier::Generalized || check_non_wasteful(inst, p).is_ok();
    let ex_post = check_ex_post(inst, p, tier, cap).unwrap();
    let some_stable_vertex = decs.iter().any(|d| d.parts().iter().all(|q| stable(&q.matching)));
    expect(
        &mut f,
        ex_post.holds == (nw && some_stable_vertex),
        "ex-post disagrees with vertex enumeration",
    );
    if let Some(d) = &ex_post.certificate {
        expect(
            &mut f,
            d.reconstructs(p) && d.parts().iter().all(|q| stable(&q.matching)),
            "bad ex-post certificate",
        );
    }
    let robust = check_robust_ex_post(inst, p, tier, cap).unwrap();
    expect(
        &mut f,
        robust.holds == (nw && realizable.iter().all(stable)),
        "robust ex-post disagrees with vertex enumeration",
    );
    if let Some(d) = &robust.certificate {
        expect(&mut f, d.reconstructs(p), "robust certificate does not reconstruct");
        if !robust.holds && nw {
            expect(
                &mut f,
                d.parts().iter().any(|q| !stable(&q.matching)),
                "robust counter-decomposition is all stable",
            );
        }
    }
    f
}
