//! Random instance generation and the implication audit.
//!
//! Every sample is a deterministic function of `(seed, tier, index)`: a ChaCha8 generator is
//! seeded with the audit seed and switched to a stream derived from the tier and index, so
//! samples can be regenerated one at a time and evaluated in any order.

mod corpus;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::RangeInclusive;

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use corpus::{corpus, corpus_case, evaluate_key, CaseCheck, CaseOutcome, CorpusCase};

use crate::concepts::{
    check_all, check_claimwise, check_fractional, check_fractional_inequalities, check_no_ex_ante_envy, Concept,
    Verdict,
};
use crate::decomposition::bvn_decompose;
use crate::deterministic::{check_individually_rational, check_non_wasteful, check_weakly_stable_det, tight_sum};
use crate::error::{Error, Result};
use crate::instance::{Entity, Instance, ModelTier, Side, WeakOrder};
use crate::matching::{enumerate_deterministic, render_matching, DeterministicMatching, RandomMatching, DEFAULT_CAP};
use crate::rational::{is_unit_interval, rat, Rat};
use crate::transform::{
    respects_individual_rationality, respects_non_wastefulness, restrict_back, to_associated_deterministic,
    to_associated_instance, to_associated_matching,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditConfig {
    pub seed: u64,
    /// Samples per tier.
    pub count: usize,
    pub n: RangeInclusive<usize>,
    /// Ignored for square tiers, which use `m = n`.
    pub m: RangeInclusive<usize>,
    pub tie_probability: Rat,
    pub unacceptable_probability: Rat,
    /// Number of deterministic matchings mixed into each random matching.
    pub parts: RangeInclusive<usize>,
    /// Chance that a mixed-in matching is drawn from the weakly stable ones.
    pub stable_bias: Rat,
    pub tiers: Vec<ModelTier>,
    /// Enumeration cap; must cover the associated instance when the generalized tier is audited.
    pub cap: usize,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig::with_max(0, 500, 4)
    }
}

impl AuditConfig {
    /// `count` samples per tier with `1 ≤ n, m ≤ max`, tie and unacceptability probability 1/4.
    pub fn with_max(seed: u64, count: usize, max: usize) -> AuditConfig {
        AuditConfig {
            seed,
            count,
            n: 1..=max,
            m: 1..=max,
            tie_probability: rat(1, 4),
            unacceptable_probability: rat(1, 4),
            parts: 1..=4,
            stable_bias: rat(1, 2),
            tiers: ModelTier::ALL.to_vec(),
            cap: DEFAULT_CAP.max(4 * max),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidMatching(format!("audit config: {what}")));
        for (name, r) in [
            ("tie probability", &self.tie_probability),
            ("unacceptability probability", &self.unacceptable_probability),
            ("stable bias", &self.stable_bias),
        ] {
            if !is_unit_interval(r) {
                return bad(&format!("{name} must lie in [0, 1]"));
            }
        }
        if self.n.is_empty() || self.m.is_empty() || self.parts.is_empty() || *self.parts.start() == 0 {
            return bad("ranges must be non-empty and mix at least one part");
        }
        Ok(())
    }
}

fn tier_index(tier: ModelTier) -> u64 {
    match tier {
        ModelTier::Base => 0,
        ModelTier::WeakOrders => 1,
        ModelTier::Generalized => 2,
    }
}

/// Generator for one purpose (`salt`) of one sample.
fn sample_rng(seed: u64, tier: ModelTier, index: usize, salt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((tier_index(tier) << 56) | (salt << 48) | index as u64);
    rng
}

fn bernoulli(rng: &mut impl Rng, p: &Rat) -> bool {
    let (Some(num), Some(den)) = (p.numer().to_u64(), p.denom().to_u64()) else {
        return p.is_one();
    };
    rng.random_range(0..den) < num
}

/// A uniformly shuffled strict order, adjacent entries merged into ties, and for the
/// generalized tier an independent acceptability cut per entity.
fn random_order(
    rng: &mut ChaCha8Rng,
    cfg: &AuditConfig,
    tier: ModelTier,
    side: Side,
    len: usize,
    owner: &str,
) -> WeakOrder {
    let entity = |k| match side {
        Side::Agent => Entity::Agent(k),
        Side::Object => Entity::Object(k),
    };
    let mut order: Vec<usize> = (0..len).collect();
    order.shuffle(rng);
    let mut tiers: Vec<Vec<usize>> = Vec::new();
    for k in order {
        match tiers.last_mut() {
            Some(last) if tier != ModelTier::Base && bernoulli(rng, &cfg.tie_probability) => last.push(k),
            _ => tiers.push(vec![k]),
        }
    }
    let acceptable: Vec<bool> = (0..len)
        .map(|_| tier != ModelTier::Generalized || !bernoulli(rng, &cfg.unacceptable_probability))
        .collect();
    let keep = |want: bool| {
        tiers
            .iter()
            .map(|t| {
                t.iter()
                    .filter(|&&k| acceptable[k] == want)
                    .map(|&k| entity(k))
                    .collect::<Vec<_>>()
            })
            .filter(|t| !t.is_empty())
            .collect::<Vec<_>>()
    };
    let mut out = keep(true);
    out.push(vec![Entity::Null]);
    out.extend(keep(false));
    WeakOrder::new(side, len, out, owner).expect("generated order is valid")
}

pub fn gen_instance(cfg: &AuditConfig, tier: ModelTier, index: usize) -> Instance {
    let mut rng = sample_rng(cfg.seed, tier, index, 0);
    let n = rng.random_range(cfg.n.clone());
    let m = if tier.is_square() {
        n
    } else {
        rng.random_range(cfg.m.clone())
    };
    let agents = Instance::numbered_agents(n);
    let objects: Vec<String> = (1..=m).map(|k| format!("o{k}")).collect();
    let prefs = (0..n)
        .map(|i| random_order(&mut rng, cfg, tier, Side::Object, m, &agents[i]))
        .collect();
    let prios = (0..m)
        .map(|o| random_order(&mut rng, cfg, tier, Side::Agent, n, &objects[o]))
        .collect();
    Instance::new(agents, objects, prefs, prios).expect("generated instance is valid")
}

/// A random deterministic matching: a permutation for square tiers; otherwise agents in
/// random order each take a free object or stay single, mostly among acceptable pairs.
fn random_deterministic(
    rng: &mut ChaCha8Rng,
    inst: &Instance,
    cfg: &AuditConfig,
    tier: ModelTier,
) -> DeterministicMatching {
    let (n, m) = (inst.n(), inst.m());
    if tier.is_square() {
        let mut objects: Vec<usize> = (0..m).collect();
        objects.shuffle(rng);
        return DeterministicMatching::from_partner_unchecked(m, objects.into_iter().map(Some).collect());
    }
    let mut agents: Vec<usize> = (0..n).collect();
    agents.shuffle(rng);
    let mut taken = vec![false; m];
    let mut partner = vec![None; n];
    for i in agents {
        let any = bernoulli(rng, &cfg.unacceptable_probability);
        let free: Vec<usize> = (0..m)
            .filter(|&o| !taken[o] && (any || inst.is_acceptable_pair(i, o)))
            .collect();
        let pick = rng.random_range(0..=free.len());
        if let Some(&o) = free.get(pick) {
            taken[o] = true;
            partner[i] = Some(o);
        }
    }
    DeterministicMatching::from_partner_unchecked(m, partner)
}

fn mixture(
    rng: &mut ChaCha8Rng,
    inst: &Instance,
    cfg: &AuditConfig,
    tier: ModelTier,
    stable: &[DeterministicMatching],
) -> RandomMatching {
    let k = rng.random_range(cfg.parts.clone());
    let mut parts = Vec::with_capacity(k);
    for _ in 0..k {
        let q = if !stable.is_empty() && bernoulli(rng, &cfg.stable_bias) {
            stable[rng.random_range(0..stable.len())].clone()
        } else {
            random_deterministic(rng, inst, cfg, tier)
        };
        parts.push((rng.random_range(1..=6i64), q));
    }
    let total: i64 = parts.iter().map(|(w, _)| w).sum();
    let (n, m) = (inst.n(), inst.m());
    let mut cells = vec![Rat::zero(); n * m];
    for (w, q) in &parts {
        let w = rat(*w, total);
        for (i, o) in q.partners().iter().enumerate() {
            if let Some(o) = o {
                cells[i * m + o] += &w;
            }
        }
    }
    RandomMatching::new(n, m, cells).expect("mixture of matchings is valid")
}

fn stable_matchings(inst: &Instance, tier: ModelTier, cap: usize) -> Vec<DeterministicMatching> {
    enumerate_deterministic(inst, true, tier, cap).unwrap_or_default()
}

/// A convex combination of random deterministic matchings with rational weights.
pub fn gen_matching(inst: &Instance, cfg: &AuditConfig, tier: ModelTier, index: usize) -> RandomMatching {
    let mut rng = sample_rng(cfg.seed, tier, index, 1);
    let stable = stable_matchings(inst, tier, cfg.cap);
    mixture(&mut rng, inst, cfg, tier, &stable)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub tier: ModelTier,
    pub index: usize,
    pub property: String,
    pub detail: String,
    pub instance: String,
    pub matching: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TierSummary {
    pub samples: usize,
    /// How often each property was evaluated.
    pub checks: BTreeMap<String, u64>,
    /// How often each separation (one concept holding without another) was observed.
    pub separations: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub seed: u64,
    pub count: usize,
    pub tiers: BTreeMap<ModelTier, TierSummary>,
    pub violations: Vec<Violation>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "audit seed={} count={}", self.seed, self.count);
        for (tier, s) in &self.tiers {
            let _ = writeln!(out, "\n[{tier}] {} samples", s.samples);
            let _ = writeln!(out, "  {:<36} {:>8}", "property", "checked");
            for (k, v) in &s.checks {
                let _ = writeln!(out, "  {k:<36} {v:>8}");
            }
            if !s.separations.is_empty() {
                let _ = writeln!(out, "  {:<36} {:>8}", "separation", "seen");
                for (k, v) in &s.separations {
                    let _ = writeln!(out, "  {k:<36} {v:>8}");
                }
            }
        }
        let _ = writeln!(out, "\nviolations: {}", self.violations.len());
        for v in &self.violations {
            let _ = writeln!(out, "- [{}#{}] {}: {}", v.tier, v.index, v.property, v.detail);
            let _ = writeln!(out, "  instance:\n{}", indent(&v.instance));
            let _ = writeln!(out, "  matching:\n{}", indent(&v.matching));
        }
        out
    }
}

fn indent(text: &str) -> String {
    text.lines().map(|l| format!("    {l}")).collect::<Vec<_>>().join("\n")
}

/// What one sample contributed to the report.
#[derive(Clone, Debug, Default)]
pub struct SampleOutcome {
    pub checks: Vec<&'static str>,
    pub separations: Vec<&'static str>,
    pub failures: Vec<(&'static str, String)>,
}

impl SampleOutcome {
    fn check(&mut self, property: &'static str, ok: bool, detail: impl FnOnce() -> String) {
        self.checks.push(property);
        if !ok {
            self.failures.push((property, detail()));
        }
    }

    fn separation(&mut self, name: &'static str, seen: bool) {
        if seen {
            self.separations.push(name);
        }
    }
}

fn holds(verdicts: &[Verdict], c: Concept) -> bool {
    verdicts.iter().find(|v| v.concept == c).is_some_and(|v| v.holds)
}

/// Every property the sample's tier supports, evaluated on `(inst, p)`.
pub fn audit_pair(inst: &Instance, p: &RandomMatching, tier: ModelTier, cap: usize) -> Result<SampleOutcome> {
    let mut out = SampleOutcome::default();
    let verdicts = check_all(inst, p, tier, cap)?;
    let h = |c| holds(&verdicts, c);
    let (ex_ante, robust, ex_post, fractional, claimwise) = (
        h(Concept::ExAnte),
        h(Concept::RobustExPost),
        h(Concept::ExPost),
        h(Concept::Fractional),
        h(Concept::Claimwise),
    );
    let ir = check_individually_rational(inst, p).is_ok();
    let nw = check_non_wasteful(inst, p).is_ok();

    for (name, a, b) in [
        ("ex-ante=>robust-ex-post", ex_ante, robust),
        ("robust-ex-post=>ex-post", robust, ex_post),
        ("ex-post=>fractional", ex_post, fractional),
        ("fractional=>claimwise", fractional, claimwise),
    ] {
        out.check(name, !a || b, || "premise holds, conclusion fails".into());
    }
    out.separation("robust-ex-post-not-ex-ante", robust && !ex_ante);
    out.separation("ex-post-not-robust-ex-post", ex_post && !robust);
    out.separation("fractional-not-ex-post", fractional && !ex_post);
    out.separation("claimwise-not-fractional", claimwise && !fractional);
    if tier == ModelTier::Base {
        out.check("fractional=>ex-post", !fractional || ex_post, || {
            "fractional holds, ex-post fails".into()
        });
    }

    let af = h(Concept::AfFractional);
    let af_expected = if tier.is_square() { af } else { af && ir };
    out.check("af-equals-ex-ante", af_expected == ex_ante, || {
        format!("af={af} ir={ir} ex-ante={ex_ante}")
    });
    let dual = h(Concept::FractionalDual);
    out.check("dual-agreement", dual == fractional, || {
        format!("fractional={fractional} dual={dual}")
    });

    if let Some(q) = p.to_deterministic() {
        let stable = check_weakly_stable_det(inst, &q, tier).is_ok();
        out.check(
            "deterministic-collapse",
            [ex_ante, robust, ex_post, fractional, claimwise]
                .iter()
                .all(|&v| v == stable),
            || {
                format!(
                    "weakly stable={stable}, concepts={:?}",
                    [ex_ante, robust, ex_post, fractional, claimwise]
                )
            },
        );
    }

    let certificates_ok = verdicts
        .iter()
        .filter_map(|v| v.certificate.as_ref())
        .chain(std::iter::once(&bvn_decompose(p)))
        .all(|d| d.reconstructs(p));
    out.check("certificates-reconstruct", certificates_ok, || {
        "a decomposition misses p".into()
    });

    match tier {
        ModelTier::Base => {
            let strong = holds(&verdicts, Concept::SdStrong);
            let weak = holds(&verdicts, Concept::SdWeak);
            out.check("sd-strong-equals-ex-ante", strong == ex_ante, || {
                format!("sd-strong={strong} ex-ante={ex_ante}")
            });
            out.check("claimwise=>sd-weak", !claimwise || weak, || {
                "claimwise holds, sd-weak fails".into()
            });
            out.separation("sd-weak-not-claimwise", weak && !claimwise);
            if fractional {
                let loose = (0..p.n())
                    .flat_map(|i| (0..p.m()).map(move |o| (i, o)))
                    .find(|&(i, o)| p.get(i, o).is_positive() && !tight_sum(inst, p, i, o).is_one());
                out.check("tight-support-inequality", loose.is_none(), || {
                    format!("loose at {loose:?}")
                });
            }
        }
        ModelTier::WeakOrders => {}
        ModelTier::Generalized => {
            let envy_free = check_no_ex_ante_envy(inst, p).is_ok();
            out.check("ex-ante-envy-form", ex_ante == (envy_free && ir && nw), || {
                format!("ex-ante={ex_ante} no-envy={envy_free} ir={ir} nw={nw}")
            });
            if inst.is_strict() {
                let ineq = check_fractional_inequalities(inst, p).is_ok();
                out.check("rural-hospital", !(ir && ineq) || nw, || {
                    "ir and inequalities hold, waste remains".into()
                });
            }
            audit_transform(inst, p, &verdicts, cap, &mut out)?;
        }
    }
    Ok(out)
}

fn audit_transform(
    inst: &Instance,
    p: &RandomMatching,
    verdicts: &[Verdict],
    cap: usize,
    out: &mut SampleOutcome,
) -> Result<()> {
    let h = |c| holds(verdicts, c);
    let (assoc, map) = to_associated_instance(inst);
    let at = assoc.classify_tier();
    let pa = to_associated_matching(p);
    out.check(
        "associated-bistochastic",
        pa.is_bistochastic() && restrict_back(&pa, map)? == *p,
        || "associated matching is not a bistochastic extension".into(),
    );
    let nw = respects_non_wastefulness(inst, p, &pa)?;
    let ir = respects_individual_rationality(inst, p, &pa)?;
    let av = check_all(&assoc, &pa, at, cap)?;
    let ah = |c| holds(&av, c);
    for (name, lhs, rhs) in [
        ("associated-ex-ante", h(Concept::ExAnte), ah(Concept::ExAnte)),
        ("associated-ex-post", h(Concept::ExPost), ah(Concept::ExPost) && nw),
        (
            "associated-robust-ex-post",
            h(Concept::RobustExPost),
            ah(Concept::RobustExPost) && nw,
        ),
        (
            "associated-fractional",
            h(Concept::Fractional),
            ah(Concept::Fractional) && nw,
        ),
    ] {
        out.check(name, lhs == rhs, || {
            format!("source={lhs} associated={rhs} respects-nw={nw}")
        });
    }
    let claim_assoc = ah(Concept::Claimwise);
    let claim = h(Concept::Claimwise);
    out.check(
        "associated-claimwise=>claimwise",
        !(claim_assoc && nw && ir) || claim,
        || format!("associated claimwise, respects nw and ir, source claimwise={claim}"),
    );
    out.separation("claimwise-not-associated-claimwise", claim && !claim_assoc);
    out.separation("associated-fractional-wasteful", ah(Concept::Fractional) && !nw);
    out.separation("associated-claimwise-irrational", claim_assoc && !ir);
    if let Some(q) = p.to_deterministic() {
        let stable = check_weakly_stable_det(inst, &q, ModelTier::Generalized).is_ok();
        let stable_assoc = check_weakly_stable_det(&assoc, &to_associated_deterministic(&q), at).is_ok();
        out.check("associated-deterministic", stable == stable_assoc, || {
            format!("source={stable} associated={stable_assoc}")
        });
    }
    Ok(())
}

/// Generates and audits one sample.
pub fn audit_sample(cfg: &AuditConfig, tier: ModelTier, index: usize) -> (Instance, RandomMatching, SampleOutcome) {
    let inst = gen_instance(cfg, tier, index);
    let p = gen_matching(&inst, cfg, tier, index);
    let outcome = audit_pair(&inst, &p, tier, cfg.cap).unwrap_or_else(|e| SampleOutcome {
        failures: vec![("evaluation", e.to_string())],
        ..SampleOutcome::default()
    });
    (inst, p, outcome)
}

pub fn run_audit(cfg: &AuditConfig) -> Result<AuditReport> {
    cfg.validate()?;
    let jobs: Vec<(ModelTier, usize)> = cfg
        .tiers
        .iter()
        .flat_map(|&t| (0..cfg.count).map(move |i| (t, i)))
        .collect();
    let results: Vec<(ModelTier, usize, Instance, RandomMatching, SampleOutcome)> = jobs
        .into_par_iter()
        .map(|(t, i)| {
            let (inst, p, o) = audit_sample(cfg, t, i);
            (t, i, inst, p, o)
        })
        .collect();
    let mut report = AuditReport {
        seed: cfg.seed,
        count: cfg.count,
        tiers: cfg.tiers.iter().map(|&t| (t, TierSummary::default())).collect(),
        violations: Vec::new(),
    };
    for (tier, index, inst, p, outcome) in results {
        let s = report.tiers.entry(tier).or_default();
        s.samples += 1;
        for c in outcome.checks {
            *s.checks.entry(c.to_string()).or_default() += 1;
        }
        for c in outcome.separations {
            *s.separations.entry(c.to_string()).or_default() += 1;
        }
        for (property, detail) in outcome.failures {
            report.violations.push(Violation {
                tier,
                index,
                property: property.to_string(),
                detail,
                instance: inst.render(),
                matching: render_matching(&p, &inst),
            });
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvexConcept {
    Fractional,
    Claimwise,
}

/// Two matchings satisfying a concept, a weight and whether their mixture satisfies it.
#[derive(Clone, Debug)]
pub struct ConvexityTrial {
    pub instance: Instance,
    pub p: RandomMatching,
    pub q: RandomMatching,
    pub lambda: Rat,
    pub mixture_holds: bool,
}

/// Draws candidates for sample `index` until two distinct ones satisfy `concept`, then mixes
/// them with a random rational weight. `None` if no such pair turns up within `attempts`.
pub fn convexity_trial(
    cfg: &AuditConfig,
    tier: ModelTier,
    index: usize,
    concept: ConvexConcept,
    attempts: usize,
) -> Result<Option<ConvexityTrial>> {
    let inst = gen_instance(cfg, tier, index);
    let mut rng = sample_rng(cfg.seed, tier, index, 2);
    let stable = stable_matchings(&inst, tier, cfg.cap);
    let passes = |p: &RandomMatching| -> Result<bool> {
        Ok(match concept {
            ConvexConcept::Fractional => check_fractional(&inst, p, tier)?.holds,
            ConvexConcept::Claimwise => check_claimwise(&inst, p, tier)?.holds,
        })
    };
    let mut found: Vec<RandomMatching> = Vec::new();
    for _ in 0..attempts {
        let p = mixture(&mut rng, &inst, cfg, tier, &stable);
        if !found.contains(&p) && passes(&p)? {
            found.push(p);
            if found.len() == 2 {
                break;
            }
        }
    }
    if found.len() < 2 {
        return Ok(None);
    }
    let den = rng.random_range(2..=12i64);
    let lambda = rat(rng.random_range(1..den), den);
    let q = found.pop().expect("two candidates");
    let p = found.pop().expect("two candidates");
    let mixed = p.mix(&lambda, &q)?;
    let mixture_holds = passes(&mixed)?;
    Ok(Some(ConvexityTrial {
        instance: inst,
        p,
        q,
        lambda,
        mixture_holds,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let cfg = AuditConfig::with_max(1, 10, 4);
        for tier in ModelTier::ALL {
            assert_eq!(gen_instance(&cfg, tier, 0), gen_instance(&cfg, tier, 0));
            let inst = gen_instance(&cfg, tier, 3);
            assert_eq!(gen_matching(&inst, &cfg, tier, 3), gen_matching(&inst, &cfg, tier, 3));
        }
    }

    #[test]
    fn zero_probabilities_stay_in_tier() {
        let mut cfg = AuditConfig::with_max(7, 10, 4);
        cfg.tie_probability = Rat::zero();
        for i in 0..20 {
            assert!(gen_instance(&cfg, ModelTier::WeakOrders, i).is_strict());
        }
        cfg.unacceptable_probability = Rat::zero();
        cfg.n = 3..=3;
        cfg.m = 3..=3;
        for i in 0..20 {
            assert!(gen_instance(&cfg, ModelTier::Generalized, i).classify_tier() <= ModelTier::WeakOrders);
        }
    }

    #[test]
    fn generated_matchings_are_valid() {
        let cfg = AuditConfig::with_max(3, 10, 4);
        for tier in ModelTier::ALL {
            for i in 0..30 {
                let inst = gen_instance(&cfg, tier, i);
                let p = gen_matching(&inst, &cfg, tier, i);
                assert!(p.validate_for(&inst, tier).is_ok());
                let text = render_matching(&p, &inst);
                assert_eq!(crate::matching::parse_matching(&text, &inst, tier).unwrap(), p);
            }
        }
    }

    #[test]
    fn single_part_gives_deterministic_matching() {
        let mut cfg = AuditConfig::with_max(5, 10, 4);
        cfg.parts = 1..=1;
        for tier in ModelTier::ALL {
            for i in 0..10 {
                let inst = gen_instance(&cfg, tier, i);
                assert!(gen_matching(&inst, &cfg, tier, i).is_deterministic());
            }
        }
    }

    #[test]
    fn stable_mixtures_are_ex_post() {
        let mut cfg = AuditConfig::with_max(11, 10, 4);
        cfg.stable_bias = Rat::one();
        for i in 0..20 {
            let inst = gen_instance(&cfg, ModelTier::Base, i);
            let p = gen_matching(&inst, &cfg, ModelTier::Base, i);
            assert!(
                crate::concepts::check_ex_post(&inst, &p, ModelTier::Base, 12)
                    .unwrap()
                    .holds
            );
        }
    }

    #[test]
    fn empty_audit() {
        let cfg = AuditConfig::with_max(0, 0, 4);
        let report = run_audit(&cfg).unwrap();
        assert!(report.passed());
        assert!(report.tiers.values().all(|s| s.samples == 0));
    }

    #[test]
    fn small_audit_is_clean_and_reproducible() {
        let cfg = AuditConfig::with_max(2, 15, 3);
        let a = run_audit(&cfg).unwrap();
        assert!(a.passed(), "{}", a.table());
        assert_eq!(a.to_json(), run_audit(&cfg).unwrap().to_json());
    }

    #[test]
    fn invalid_config_is_rejected() {
        let cfg = AuditConfig {
            tie_probability: rat(3, 2),
            ..AuditConfig::default()
        };
        assert!(run_audit(&cfg).is_err());
        let cfg = AuditConfig {
            parts: 0..=0,
            ..AuditConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
