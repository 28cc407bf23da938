//! Hand-checked cases with known verdicts.
//!
//! Expectation keys are concept names (`ex-ante`, `claimwise`, …), the bare inequality
//! systems `fractional-inequalities` and `claimwise-inequalities`, `stable-decomposition`
//! (a weakly stable decomposition exists, waste ignored), `respects-nw` and `respects-ir`
//! for the associated matching, and `assoc:<concept>` for a concept evaluated on the
//! associated instance and matching.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::concepts::{
    check_claim_inequalities, check_concept, check_fractional_inequalities, stable_decomposition, Concept,
};
use crate::error::{Error, Result};
use crate::instance::{Instance, ModelTier};
use crate::matching::{parse_matching, RandomMatching};
use crate::transform::{
    respects_individual_rationality, respects_non_wastefulness, to_associated_instance, to_associated_matching,
};

#[derive(Clone, Debug)]
pub struct CorpusCase {
    pub id: &'static str,
    /// What the case demonstrates.
    pub source: &'static str,
    pub tier: ModelTier,
    pub instance: Instance,
    pub matching: RandomMatching,
    pub expected: BTreeMap<String, bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseCheck {
    pub key: String,
    pub expected: bool,
    pub actual: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseOutcome {
    pub id: String,
    pub checks: Vec<CaseCheck>,
}

impl CaseOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.actual == Some(c.expected))
    }
}

impl CorpusCase {
    pub fn run(&self, cap: usize) -> CaseOutcome {
        let checks = self
            .expected
            .iter()
            .map(|(key, &expected)| {
                let r = evaluate_key(&self.instance, &self.matching, self.tier, key, cap);
                CaseCheck {
                    key: key.clone(),
                    expected,
                    actual: r.as_ref().ok().copied(),
                    error: r.err().map(|e| e.to_string()),
                }
            })
            .collect();
        CaseOutcome {
            id: self.id.to_string(),
            checks,
        }
    }
}

/// Evaluates one expectation key on `(inst, p)` under `tier`.
pub fn evaluate_key(inst: &Instance, p: &RandomMatching, tier: ModelTier, key: &str, cap: usize) -> Result<bool> {
    if let Some(rest) = key.strip_prefix("assoc:") {
        let (assoc, _) = to_associated_instance(inst);
        let pa = to_associated_matching(p);
        return evaluate_key(&assoc, &pa, assoc.classify_tier(), rest, cap);
    }
    match key {
        "fractional-inequalities" => Ok(check_fractional_inequalities(inst, p).is_ok()),
        "claimwise-inequalities" => Ok(check_claim_inequalities(inst, p).is_ok()),
        "stable-decomposition" => Ok(stable_decomposition(inst, p, tier)?.is_some()),
        "respects-nw" => respects_non_wastefulness(inst, p, &to_associated_matching(p)),
        "respects-ir" => respects_individual_rationality(inst, p, &to_associated_matching(p)),
        _ => {
            let concept =
                Concept::from_name(key).ok_or_else(|| Error::UnknownEntity(format!("expectation `{key}`")))?;
            Ok(check_concept(inst, p, tier, concept, cap)?.holds)
        }
    }
}

struct CaseDef {
    id: &'static str,
    source: &'static str,
    tier: ModelTier,
    instance: &'static str,
    matching: &'static str,
    expected: &'static [(&'static str, bool)],
}

const CYCLE3: &str = include_str!("../../corpus/cycle3.inst");
const CLAIMS3: &str = include_str!("../../corpus/claims3.inst");
const UNIFORM3: &str = include_str!("../../corpus/uniform3.match");
const WASTEFUL: &str = include_str!("../../corpus/wasteful.match");
const EX4: &str = include_str!("../../corpus/ex4.inst");

const CASES: &[CaseDef] = &[
    CaseDef {
        id: "EX1",
        source: "4x4 market whose half-half matching is ex-ante stable and has exactly two decompositions",
        tier: ModelTier::Base,
        instance: include_str!("../../corpus/ex1.inst"),
        matching: include_str!("../../corpus/ex1.match"),
        expected: &[
            ("ex-ante", true),
            ("robust-ex-post", true),
            ("ex-post", true),
            ("fractional", true),
            ("fractional-dual", true),
            ("claimwise", true),
            ("af", true),
            ("sd-strong", true),
            ("sd-weak", true),
        ],
    },
    CaseDef {
        id: "P4",
        source: "cyclic market: robust ex-post stable but not ex-ante stable",
        tier: ModelTier::Base,
        instance: CYCLE3,
        matching: include_str!("../../corpus/p4.match"),
        expected: &[
            ("ex-ante", false),
            ("robust-ex-post", true),
            ("ex-post", true),
            ("fractional", true),
            ("claimwise", true),
            ("af", false),
            ("sd-strong", false),
        ],
    },
    CaseDef {
        id: "P6",
        source: "cyclic market, uniform matching: ex-post stable but not robust ex-post stable",
        tier: ModelTier::Base,
        instance: CYCLE3,
        matching: UNIFORM3,
        expected: &[
            ("ex-ante", false),
            ("robust-ex-post", false),
            ("ex-post", true),
            ("fractional", true),
            ("claimwise", true),
        ],
    },
    CaseDef {
        id: "P10",
        source: "uniform matching that admits no claim but is neither fractionally nor ex-post stable",
        tier: ModelTier::Base,
        instance: CLAIMS3,
        matching: UNIFORM3,
        expected: &[
            ("claimwise", true),
            ("fractional", false),
            ("fractional-dual", false),
            ("ex-post", false),
            ("robust-ex-post", false),
            ("ex-ante", false),
        ],
    },
    CaseDef {
        id: "P16",
        source: "weak orders: fractionally weakly stable but not ex-post weakly stable",
        tier: ModelTier::WeakOrders,
        instance: include_str!("../../corpus/p16.inst"),
        matching: include_str!("../../corpus/p16.match"),
        expected: &[
            ("fractional", true),
            ("fractional-dual", true),
            ("claimwise", true),
            ("ex-post", false),
            ("robust-ex-post", false),
        ],
    },
    CaseDef {
        id: "P33",
        source: "weakly sd-stable matching with a claim",
        tier: ModelTier::Base,
        instance: CLAIMS3,
        matching: include_str!("../../corpus/p33.match"),
        expected: &[("sd-weak", true), ("claimwise", false)],
    },
    CaseDef {
        id: "EX2",
        source: "wasteful, individually rational matching satisfying the fractional inequalities",
        tier: ModelTier::Generalized,
        instance: include_str!("../../corpus/ex2.inst"),
        matching: WASTEFUL,
        expected: &[
            ("det-non-wasteful", false),
            ("det-ir", true),
            ("fractional-inequalities", true),
            ("fractional", false),
        ],
    },
    CaseDef {
        id: "EX3",
        source: "general market used to illustrate the associated instance and matching",
        tier: ModelTier::Generalized,
        instance: include_str!("../../corpus/ex3.inst"),
        matching: include_str!("../../corpus/ex3.match"),
        expected: &[("det-ir", true), ("respects-ir", true)],
    },
    CaseDef {
        id: "EX4-1",
        source: "empty matching: no envy and individually rational, but wasteful",
        tier: ModelTier::Generalized,
        instance: EX4,
        matching: include_str!("../../corpus/ex4-1.match"),
        expected: &[("det-no-envy", true), ("det-ir", true), ("det-non-wasteful", false)],
    },
    CaseDef {
        id: "EX4-2",
        source: "no envy and non-wasteful, but individually irrational",
        tier: ModelTier::Generalized,
        instance: EX4,
        matching: include_str!("../../corpus/ex4-2.match"),
        expected: &[("det-no-envy", true), ("det-ir", false), ("det-non-wasteful", true)],
    },
    CaseDef {
        id: "EX4-3",
        source: "individually rational and non-wasteful, but with envy",
        tier: ModelTier::Generalized,
        instance: EX4,
        matching: include_str!("../../corpus/ex4-3.match"),
        expected: &[("det-no-envy", false), ("det-ir", true), ("det-non-wasteful", true)],
    },
    CaseDef {
        id: "EX4-4",
        source: "the only matching with all three axioms",
        tier: ModelTier::Generalized,
        instance: EX4,
        matching: include_str!("../../corpus/ex4-4.match"),
        expected: &[
            ("det-no-envy", true),
            ("det-ir", true),
            ("det-non-wasteful", true),
            ("det-weakly-stable", true),
        ],
    },
    CaseDef {
        id: "EX5",
        source: "wasteful matching that splits into two weakly stable deterministic matchings",
        tier: ModelTier::Generalized,
        instance: include_str!("../../corpus/ex5.inst"),
        matching: include_str!("../../corpus/ex5.match"),
        expected: &[
            ("det-non-wasteful", false),
            ("det-ir", true),
            ("stable-decomposition", true),
            ("fractional-inequalities", true),
            ("ex-post", false),
            ("fractional", false),
        ],
    },
    CaseDef {
        id: "EX6",
        source: "wasteful matching whose associated matching is fractionally stable",
        tier: ModelTier::Generalized,
        instance: include_str!("../../corpus/ex6.inst"),
        matching: WASTEFUL,
        expected: &[
            ("assoc:fractional", true),
            ("respects-nw", false),
            ("fractional", false),
        ],
    },
    CaseDef {
        id: "EX7",
        source: "claimwise weakly stable matching whose associated matching has a claim",
        tier: ModelTier::Generalized,
        instance: CLAIMS3,
        matching: UNIFORM3,
        expected: &[
            ("claimwise", true),
            ("det-ir", true),
            ("det-non-wasteful", true),
            ("respects-nw", true),
            ("respects-ir", true),
            ("assoc:claimwise", false),
        ],
    },
    CaseDef {
        id: "EX8",
        source: "individually irrational matching whose associated matching is claimwise stable",
        tier: ModelTier::Generalized,
        instance: include_str!("../../corpus/ex8.inst"),
        matching: include_str!("../../corpus/ex8.match"),
        expected: &[
            ("det-ir", false),
            ("det-non-wasteful", true),
            ("claimwise-inequalities", true),
            ("respects-ir", false),
            ("assoc:claimwise", true),
            ("claimwise", false),
        ],
    },
];

fn build(def: &CaseDef) -> CorpusCase {
    let instance = Instance::parse(def.instance).expect("corpus instance parses");
    let matching = parse_matching(def.matching, &instance, def.tier).expect("corpus matching parses");
    CorpusCase {
        id: def.id,
        source: def.source,
        tier: def.tier,
        instance,
        matching,
        expected: def.expected.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
    }
}

pub fn corpus() -> Vec<CorpusCase> {
    CASES.iter().map(build).collect()
}

pub fn corpus_case(id: &str) -> Option<CorpusCase> {
    CASES.iter().find(|s| s.id.eq_ignore_ascii_case(id)).map(build)
}
