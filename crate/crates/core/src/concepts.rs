//! Stability concepts for random matchings, dispatched on the model tier.
//!
//! Square tiers (base, weak orders) use the definitions with full acceptability; the
//! generalized tier adds individual rationality and non-wastefulness where needed and
//! restricts pairwise conditions to mutually acceptable pairs. On a square instance the
//! generalized definitions reduce to the square ones, so overriding the tier upwards is safe.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::decomposition::{
    bvn_decompose, decomposition_containing, enumerate_realizable, find_decomposition, Decomposition, FeasibilitySystem,
};
use crate::deterministic::{
    check_individually_rational, check_no_envy, check_non_wasteful, check_weakly_stable_det, Witness, WitnessKind,
};
use crate::error::{Error, Result};
use crate::instance::{Instance, ModelTier, WeakOrder};
use crate::matching::{check_cap, matchings_within, DeterministicMatching, RandomMatching};
use crate::rational::{one, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Concept {
    ExAnte,
    RobustExPost,
    ExPost,
    Fractional,
    FractionalDual,
    Claimwise,
    AfFractional,
    SdWeak,
    SdStrong,
    DetNoEnvy,
    DetNonWasteful,
    DetIndividuallyRational,
    DetWeaklyStable,
}

impl Concept {
    pub const ALL: [Concept; 13] = [
        Concept::ExAnte,
        Concept::RobustExPost,
        Concept::ExPost,
        Concept::Fractional,
        Concept::FractionalDual,
        Concept::Claimwise,
        Concept::AfFractional,
        Concept::SdWeak,
        Concept::SdStrong,
        Concept::DetNoEnvy,
        Concept::DetNonWasteful,
        Concept::DetIndividuallyRational,
        Concept::DetWeaklyStable,
    ];

    /// The five main concepts, strongest first.
    pub const CHAIN: [Concept; 5] = [
        Concept::ExAnte,
        Concept::RobustExPost,
        Concept::ExPost,
        Concept::Fractional,
        Concept::Claimwise,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Concept::ExAnte => "ex-ante",
            Concept::RobustExPost => "robust-ex-post",
            Concept::ExPost => "ex-post",
            Concept::Fractional => "fractional",
            Concept::FractionalDual => "fractional-dual",
            Concept::Claimwise => "claimwise",
            Concept::AfFractional => "af",
            Concept::SdWeak => "sd-weak",
            Concept::SdStrong => "sd-strong",
            Concept::DetNoEnvy => "det-no-envy",
            Concept::DetNonWasteful => "det-non-wasteful",
            Concept::DetIndividuallyRational => "det-ir",
            Concept::DetWeaklyStable => "det-weakly-stable",
        }
    }

    pub fn from_name(name: &str) -> Option<Concept> {
        Concept::ALL.into_iter().find(|c| c.name() == name)
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of one concept check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub concept: Concept,
    pub holds: bool,
    pub witness: Option<Witness>,
    /// Stable decomposition when ex-post holds; the offending decomposition when robust fails.
    pub certificate: Option<Decomposition>,
    pub note: Option<String>,
}

impl Verdict {
    fn from_check(concept: Concept, r: std::result::Result<(), Witness>) -> Verdict {
        Verdict {
            concept,
            holds: r.is_ok(),
            witness: r.err(),
            certificate: None,
            note: None,
        }
    }

    pub fn to_record(&self, inst: &Instance) -> VerdictRecord {
        VerdictRecord {
            concept: self.concept.name().to_string(),
            holds: self.holds,
            witness: self.witness.as_ref().map(|w| WitnessRecord {
                kind: serde_json::to_value(w.kind)
                    .ok()
                    .and_then(|v| v.as_str().map(String::from))
                    .unwrap_or_default(),
                agent: inst.agent_label(w.agent).to_string(),
                other_agent: w.other_agent.map(|j| inst.agent_label(j).to_string()),
                object: inst.object_label(w.object).to_string(),
                other_object: w.other_object.map(|o| inst.object_label(o).to_string()),
                matching: w.matching.as_ref().map(|q| q.rows()),
                description: w.describe(inst),
            }),
            certificate: self.certificate.as_ref().map(|d| {
                d.parts()
                    .iter()
                    .map(|p| PartRecord {
                        weight: p.weight.to_string(),
                        matching: p.matching.rows(),
                    })
                    .collect()
            }),
            values: self
                .witness
                .as_ref()
                .map(|w| w.values.iter().map(ToString::to_string).collect()),
            note: self.note.clone(),
        }
    }
}

/// Stable JSON shape of a verdict: `{concept, holds, witness?, certificate?, values?}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub concept: String,
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Vec<PartRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub kind: String,
    pub agent: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub other_agent: Option<String>,
    pub object: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub other_object: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matching: Option<Vec<Vec<u8>>>,
    pub description: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartRecord {
    pub weight: String,
    pub matching: Vec<Vec<u8>>,
}

fn prepare(inst: &Instance, p: &RandomMatching, tier: ModelTier) -> Result<()> {
    inst.resolve_tier(Some(tier))?;
    p.validate_for(inst, tier)
}

/// `Σ p(i,o′)` over objects `o′` that `keep` admits given `i`'s rank of `o′` and of `o`.
fn agent_sum(inst: &Instance, p: &RandomMatching, i: usize, o: usize, keep: impl Fn(usize, usize) -> bool) -> Rat {
    let r = inst.agent_rank(i, o);
    (0..p.m())
        .filter(|&o2| keep(inst.agent_rank(i, o2), r) && (o2 != o || keep(r, r)))
        .map(|o2| p.get(i, o2))
        .sum()
}

/// `Σ p(j,o)` over agents `j` that `keep` admits given `o`'s rank of `j` and of `i`.
fn object_sum(inst: &Instance, p: &RandomMatching, o: usize, i: usize, keep: impl Fn(usize, usize) -> bool) -> Rat {
    let r = inst.object_rank(o, i);
    (0..p.n())
        .filter(|&j| keep(inst.object_rank(o, j), r) && (j != i || keep(r, r)))
        .map(|j| p.get(j, o))
        .sum()
}

/// `Σ_{o′≿_i o} p(i,o′)`.
pub fn agent_weak_upper(inst: &Instance, p: &RandomMatching, i: usize, o: usize) -> Rat {
    agent_sum(inst, p, i, o, |a, b| a <= b)
}

/// `Σ_{j≿_o i} p(j,o)`.
pub fn object_weak_upper(inst: &Instance, p: &RandomMatching, o: usize, i: usize) -> Rat {
    object_sum(inst, p, o, i, |a, b| a <= b)
}

/// `Σ_{o′≿_i o, o′≠o} p(i,o′)`; equals the strict upper contour under strict orders.
fn agent_upper_excl(inst: &Instance, p: &RandomMatching, i: usize, o: usize) -> Rat {
    agent_weak_upper(inst, p, i, o) - p.get(i, o)
}

fn object_upper_excl(inst: &Instance, p: &RandomMatching, o: usize, i: usize) -> Rat {
    object_weak_upper(inst, p, o, i) - p.get(i, o)
}

fn agent_strict_upper(inst: &Instance, p: &RandomMatching, i: usize, o: usize) -> Rat {
    agent_sum(inst, p, i, o, |a, b| a < b)
}

fn object_strict_upper(inst: &Instance, p: &RandomMatching, o: usize, i: usize) -> Rat {
    object_sum(inst, p, o, i, |a, b| a < b)
}

fn agent_lower(inst: &Instance, p: &RandomMatching, i: usize, o: usize) -> Rat {
    agent_sum(inst, p, i, o, |a, b| a > b)
}

fn object_lower(inst: &Instance, p: &RandomMatching, o: usize, i: usize) -> Rat {
    object_sum(inst, p, o, i, |a, b| a > b)
}

/// Pairs the pairwise conditions range over, in lexicographic order.
fn pairs(inst: &Instance) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..inst.n())
        .flat_map(move |i| (0..inst.m()).map(move |o| (i, o)))
        .filter(|&(i, o)| inst.is_acceptable_pair(i, o))
}

fn generalized_prerequisites(inst: &Instance, p: &RandomMatching, tier: ModelTier) -> std::result::Result<(), Witness> {
    if tier == ModelTier::Generalized {
        check_individually_rational(inst, p)?;
        check_non_wasteful(inst, p)?;
    }
    Ok(())
}

/// No ex-ante envy in the generalized sense: no acceptable `(i, o)` and `j ≺_o i` with
/// `Σ_{o′≿_i o} p(i,o′) < 1` and `p(j,o) > 0`.
pub fn check_no_ex_ante_envy(inst: &Instance, p: &RandomMatching) -> std::result::Result<(), Witness> {
    for i in 0..p.n() {
        for j in 0..p.n() {
            for o in 0..p.m() {
                if inst.is_acceptable_pair(i, o)
                    && inst.object_rank(o, i) < inst.object_rank(o, j)
                    && p.get(j, o).is_positive()
                {
                    let upper = agent_weak_upper(inst, p, i, o);
                    if upper < one() {
                        return Err(
                            Witness::new(WitnessKind::Envy, i, o, vec![upper, p.get(j, o).clone()]).with_other_agent(j)
                        );
                    }
                }
            }
        }
    }
    Ok(())
}

fn ex_ante_square(inst: &Instance, p: &RandomMatching) -> std::result::Result<(), Witness> {
    let n = p.n();
    let m = p.m();
    for i in 0..n {
        for j in 0..n {
            for o in 0..m {
                if !p.get(j, o).is_positive() || inst.object_rank(o, i) >= inst.object_rank(o, j) {
                    continue;
                }
                for o2 in 0..m {
                    if p.get(i, o2).is_positive() && inst.agent_rank(i, o) < inst.agent_rank(i, o2) {
                        return Err(Witness::new(
                            WitnessKind::Envy,
                            i,
                            o,
                            vec![p.get(i, o2).clone(), p.get(j, o).clone()],
                        )
                        .with_other_agent(j)
                        .with_other_object(Some(o2)));
                    }
                }
            }
        }
    }
    Ok(())
}

fn ex_ante_generalized(inst: &Instance, p: &RandomMatching) -> std::result::Result<(), Witness> {
    check_individually_rational(inst, p)?;
    for (i, o) in pairs(inst) {
        let u = agent_weak_upper(inst, p, i, o);
        let v = object_weak_upper(inst, p, o, i);
        if u < one() && v < one() {
            return Err(Witness::new(WitnessKind::Block, i, o, vec![u, v]));
        }
    }
    Ok(())
}

pub fn check_ex_ante(inst: &Instance, p: &RandomMatching, tier: ModelTier) -> Result<Verdict> {
    prepare(inst, p, tier)?;
    let r = if tier.is_square() {
        ex_ante_square(inst, p)
    } else {
        let r = ex_ante_generalized(inst, p);
        debug_assert_eq!(
            r.is_ok(),
            check_no_ex_ante_envy(inst, p).is_ok()
                && check_individually_rational(inst, p).is_ok()
                && check_non_wasteful(inst, p).is_ok(),
            "ex-ante forms disagree"
        );
        r
    };
    Ok(Verdict::from_check(Concept::ExAnte, r))
}

/// For every acceptable pair, `Σ_{o′≿_i o} p(i,o′) = 1` or `Σ_{j≿_o i} p(j,o) = 1`.
pub fn check_af_fractional(inst: &Instance, p: &RandomMatching) -> Verdict {
    let r = pairs(inst).try_for_each(|(i, o)| {
        let u = agent_weak_upper(inst, p, i, o);
        let v = object_weak_upper(inst, p, o, i);
        if u.is_one() || v.is_one() {
            Ok(())
        } else {
            Err(Witness::new(WitnessKind::Block, i, o, vec![u, v]))
        }
    });
    Verdict::from_check(Concept::AfFractional, r)
}

/// `Σ_{o′≿_i o, o′≠o} p(i,o′) ≥ Σ_{j≺_o i} p(j,o) + p(∅,o)` for every acceptable pair,
/// without the generalized prerequisites.
pub fn check_fractional_inequalities(inst: &Instance, p: &RandomMatching) -> std::result::Result<(), Witness> {
    for (i, o) in pairs(inst) {
        let lhs = agent_upper_excl(inst, p, i, o);
        let rhs = object_lower(inst, p, o, i) + p.object_slack(o);
        if rhs > lhs {
            return Err(Witness::new(WitnessKind::Inequality, i, o, vec![rhs, lhs]));
        }
    }
    Ok(())
}

pub fn check_fractional(inst: &Instance, p: &RandomMatching, tier: ModelTier) -> Result<Verdict> {
    prepare(inst, p, tier)?;
    let r = generalized_prerequisites(inst, p, tier).and_then(|()| check_fractional_inequalities(inst, p));
    Ok(Verdict::from_check(Concept::Fractional, r))
}

/// Object-side form: `Σ_{j≿_o i, j≠i} p(j,o) ≥ Σ_{o′≺_i o} p(i,o′) + p(i,∅)`.
pub fn check_fractional_dual(inst: &Instance, p: &RandomMatching, tier: ModelTier) -> Result<Verdict> {
    prepare(inst, p, tier)?;
    let r = generalized_prerequisites(inst, p, tier).and_then(|()| {
        for (i, o) in pairs(inst) {
            let lhs = object_upper_excl(inst, p, o, i);
            let rhs = agent_lower(inst, p, i, o) + p.agent_slack(i);
            if rhs > lhs {
                return Err(Witness::new(WitnessKind::Inequality, i, o, vec![rhs, lhs]));
            }
        }
        Ok(())
    });
    Ok(Verdict::from_check(Concept::FractionalDual, r))
}

/// No claim: for acceptable `(i, o)` and `j` with `i ≻_o j`,
/// `Σ_{o′≿_i o, o′≠o} p(i,o′) ≥ p(j,o) + p(∅,o)`, without the generalized prerequisites.
pub fn check_claim_inequalities(inst: &Instance, p: &RandomMatching) -> std::result::Result<(), Witness> {
    for i in 0..p.n() {
        for j in 0..p.n() {
            for o in 0..p.m() {
                if !inst.is_acceptable_pair(i, o) || inst.object_rank(o, i) >= inst.object_rank(o, j) {
                    continue;
                }
                let lhs = agent_upper_excl(inst, p, i, o);
                let rhs = p.get(j, o) + p.object_slack(o);
                if rhs > lhs {
                    return Err(Witness::new(WitnessKind::Claim, i, o, vec![rhs, lhs]).with_other_agent(j));
                }
            }
        }
    }
    Ok(())
}

pub fn check_claimwise(inst: &Instance, p: &RandomMatching, tier: ModelTier) -> Result<Verdict> {
    prepare(inst, p, tier)?;
    let r = generalized_prerequisites(inst, p, tier).and_then(|()| check_claim_inequalities(inst, p));
    Ok(Verdict::from_check(Concept::Claimwise, r))
}

/// Weakly stable deterministic matchings inside the support of `p`.
fn stable_columns(inst: &Instance, p: &RandomMatching, tier: ModelTier) -> Vec<DeterministicMatching> {
    matchings_within(
        p.n(),
        p.m(),
        tier.is_square(),
        &|i, o| p.get(i, o).is_positive(),
        &|_| true,
    )
    .into_iter()
    .filter(|q| check_weakly_stable_det(inst, q, tier).is_ok())
    .collect()
}

/// A decomposition of `p` into weakly stable deterministic matchings, ignoring waste.
pub fn stable_decomposition(inst: &Instance, p: &RandomMatching, tier: ModelTier) -> Result<Option<Decomposition>> {
    let sys = FeasibilitySystem::new(stable_columns(inst, p, tier), p.clone())?;
    Ok(find_decomposition(&sys))
}

/// Decomposable into weakly stable deterministic matchings (and non-wasteful when generalized).
pub fn check_ex_post(inst: &Instance, p: &RandomMatching, tier: ModelTier, cap: usize) -> Result<Verdict> {
    prepare(inst, p, tier)?;
    check_cap(p.n(), p.m(), cap)?;
    if tier == ModelTier::Generalized {
        if let Err(w) = check_non_wasteful(inst, p) {
            return Ok(Verdict::from_check(Concept::ExPost, Err(w)));
        }
    }
    let certificate = stable_decomposition(inst, p, tier)?;
    let verdict = Verdict {
        concept: Concept::ExPost,
        holds: certificate.is_some(),
        witness: None,
        note: certificate
            .is_none()
            .then(|| "no decomposition into weakly stable matchings exists".to_string()),
        certificate,
    };
    debug_assert!(
        tier != ModelTier::Base || check_fractional(inst, p, tier).map(|v| v.holds).ok() == Some(verdict.holds),
        "ex-post and fractional disagree under strict orders"
    );
    Ok(verdict)
}

/// Every decomposition uses only weakly stable matchings (and non-wasteful when generalized).
pub fn check_robust_ex_post(inst: &Instance, p: &RandomMatching, tier: ModelTier, cap: usize) -> Result<Verdict> {
    prepare(inst, p, tier)?;
    if tier == ModelTier::Generalized {
        if let Err(w) = check_non_wasteful(inst, p) {
            return Ok(Verdict::from_check(Concept::RobustExPost, Err(w)));
        }
    }
    let realizable = enumerate_realizable(p, tier, cap)?;
    let unstable: Vec<(DeterministicMatching, Witness)> = realizable
        .into_iter()
        .filter_map(|q| check_weakly_stable_det(inst, &q, tier).err().map(|w| (q, w)))
        .collect();
    if unstable.is_empty() {
        return Ok(Verdict {
            concept: Concept::RobustExPost,
            holds: true,
            witness: None,
            certificate: Some(bvn_decompose(p)),
            note: None,
        });
    }
    // Prefer a decomposition made only of unstable parts; otherwise build one around the first.
    let sys = FeasibilitySystem::new(unstable.iter().map(|(q, _)| q.clone()).collect(), p.clone())?;
    let (decomposition, note) = match find_decomposition(&sys) {
        Some(d) => (d, "every part of this decomposition is unstable"),
        None => (
            decomposition_containing(p, &unstable[0].0).expect("realizable matching has a decomposition"),
            "this decomposition contains an unstable part",
        ),
    };
    let (q, w) = unstable
        .into_iter()
        .find(|(q, _)| decomposition.contains(q))
        .expect("the decomposition uses an unstable part");
    let mut witness = w;
    witness.matching = Some(Box::new(q));
    Ok(Verdict {
        concept: Concept::RobustExPost,
        holds: false,
        witness: Some(witness),
        certificate: Some(decomposition),
        note: Some(note.to_string()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdRelation {
    /// Dominates and differs.
    Strictly,
    /// Dominates but is equal.
    Weakly,
    No,
}

/// First-order stochastic dominance of `a` over `b` along a strict order.
pub fn sd_dominates(order: &WeakOrder, a: &[Rat], b: &[Rat]) -> Result<SdRelation> {
    if !order.is_strict() {
        return Err(Error::TiesInOrder("sd comparison".to_string()));
    }
    if a.len() != order.len() || b.len() != order.len() {
        return Err(Error::InvalidMatching("sd vectors have the wrong length".to_string()));
    }
    let mut ca = Rat::zero();
    let mut cb = Rat::zero();
    for k in order.tie_broken() {
        ca += &a[k];
        cb += &b[k];
        if ca < cb {
            return Ok(SdRelation::No);
        }
    }
    Ok(if a == b {
        SdRelation::Weakly
    } else {
        SdRelation::Strictly
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdStrength {
    /// No pair strongly sd-blocks.
    Weak,
    /// No pair weakly sd-blocks.
    Strong,
}

/// Deterministic matching with `q(i,o) = 1`, the others paired in index order.
fn canonical_completion(n: usize, i: usize, o: usize) -> DeterministicMatching {
    let mut objects = (0..n).filter(|&k| k != o);
    let partner = (0..n).map(|a| if a == i { Some(o) } else { objects.next() }).collect();
    DeterministicMatching::from_partner_unchecked(n, partner)
}

/// sd-stability on strict square instances.
///
/// Strong: no pair `(i, o)` with `Σ_{o′≿_i o} p(i,o′) < 1` and `Σ_{j≿_o i} p(j,o) < 1`,
/// i.e. neither side's current lottery weakly sd-dominates getting the other for sure.
/// Weak: no pair where some matching with `q(i,o) = 1` strictly sd-improves both `i` and `o`;
/// only `q(i)` and `q(o)` matter, so one completion per pair is tested.
pub fn check_sd_stability(inst: &Instance, p: &RandomMatching, strength: SdStrength) -> Result<Verdict> {
    let actual = inst.classify_tier();
    if actual != ModelTier::Base {
        return Err(Error::UnsupportedTier {
            required: ModelTier::Base,
            actual,
        });
    }
    p.validate_for(inst, ModelTier::Base)?;
    let n = p.n();
    let concept = match strength {
        SdStrength::Weak => Concept::SdWeak,
        SdStrength::Strong => Concept::SdStrong,
    };
    for i in 0..n {
        for o in 0..n {
            let blocked = match strength {
                SdStrength::Strong => {
                    let u = agent_weak_upper(inst, p, i, o);
                    let v = object_weak_upper(inst, p, o, i);
                    (u < one() && v < one()).then(|| Witness::new(WitnessKind::Block, i, o, vec![u, v]))
                }
                SdStrength::Weak => {
                    let q = canonical_completion(n, i, o).to_random();
                    let col = |m: &RandomMatching| (0..n).map(|j| m.get(j, o).clone()).collect::<Vec<_>>();
                    let agent_gain = sd_dominates(inst.pref(i), q.row(i), p.row(i))?;
                    let object_gain = sd_dominates(inst.prio(o), &col(&q), &col(p))?;
                    (agent_gain == SdRelation::Strictly && object_gain == SdRelation::Strictly && q != *p).then(|| {
                        Witness::new(
                            WitnessKind::Block,
                            i,
                            o,
                            vec![agent_strict_upper(inst, p, i, o), object_strict_upper(inst, p, o, i)],
                        )
                    })
                }
            };
            if let Some(w) = blocked {
                return Ok(Verdict::from_check(concept, Err(w)));
            }
        }
    }
    Ok(Verdict::from_check(concept, Ok(())))
}

/// Runs one concept. `det-*` concepts that need a deterministic matching reject others.
pub fn check_concept(
    inst: &Instance,
    p: &RandomMatching,
    tier: ModelTier,
    concept: Concept,
    cap: usize,
) -> Result<Verdict> {
    let det = || {
        prepare(inst, p, tier)?;
        p.to_deterministic().ok_or(Error::NotDeterministic)
    };
    match concept {
        Concept::ExAnte => check_ex_ante(inst, p, tier),
        Concept::RobustExPost => check_robust_ex_post(inst, p, tier, cap),
        Concept::ExPost => check_ex_post(inst, p, tier, cap),
        Concept::Fractional => check_fractional(inst, p, tier),
        Concept::FractionalDual => check_fractional_dual(inst, p, tier),
        Concept::Claimwise => check_claimwise(inst, p, tier),
        Concept::AfFractional => {
            prepare(inst, p, tier)?;
            Ok(check_af_fractional(inst, p))
        }
        Concept::SdWeak => check_sd_stability(inst, p, SdStrength::Weak),
        Concept::SdStrong => check_sd_stability(inst, p, SdStrength::Strong),
        Concept::DetNoEnvy => Ok(Verdict::from_check(concept, check_no_envy(inst, &det()?, tier))),
        Concept::DetWeaklyStable => Ok(Verdict::from_check(
            concept,
            check_weakly_stable_det(inst, &det()?, tier),
        )),
        Concept::DetNonWasteful => {
            prepare(inst, p, tier)?;
            Ok(Verdict::from_check(concept, check_non_wasteful(inst, p)))
        }
        Concept::DetIndividuallyRational => {
            prepare(inst, p, tier)?;
            Ok(Verdict::from_check(concept, check_individually_rational(inst, p)))
        }
    }
}

/// The five main concepts, the object-side fractional form and the AF form, plus both
/// sd strengths when the instance is in the base tier.
pub fn check_all(inst: &Instance, p: &RandomMatching, tier: ModelTier, cap: usize) -> Result<Vec<Verdict>> {
    let mut concepts = vec![
        Concept::ExAnte,
        Concept::RobustExPost,
        Concept::ExPost,
        Concept::Fractional,
        Concept::FractionalDual,
        Concept::Claimwise,
        Concept::AfFractional,
    ];
    if tier == ModelTier::Base && inst.classify_tier() == ModelTier::Base {
        concepts.extend([Concept::SdWeak, Concept::SdStrong]);
    }
    concepts
        .into_iter()
        .map(|c| check_concept(inst, p, tier, c, cap))
        .collect()
}
