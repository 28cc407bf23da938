use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use matchstab::concepts::{check_all, check_concept, check_ex_post, Concept, Verdict, VerdictRecord};
use matchstab::matching::{enumerate_deterministic, parse_matching, render_matching};
use matchstab::{
    bvn_decompose, corpus, run_audit, to_associated_instance, to_associated_matching, AuditConfig, Decomposition,
    Error, Instance, ModelTier, RandomMatching, DEFAULT_CAP,
};
use serde::Serialize;

use crate::{AuditArgs, CheckArgs, Common, DecomposeArgs, EnumerateArgs, ExamplesArgs, TransformArgs};

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = if matches!(e, Error::CapExceeded { .. }) { 3 } else { 2 };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<ExitCode, Failure>;

/// Enumeration cap: `MATCHSTAB_CAP` if set, else the library default.
fn cap() -> Result<usize, Failure> {
    match std::env::var("MATCHSTAB_CAP") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("MATCHSTAB_CAP must be a non-negative integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_CAP),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn parse_tier(name: &str) -> Result<ModelTier, Failure> {
    ModelTier::from_name(name)
        .ok_or_else(|| Failure::usage(format!("unknown tier `{name}` (expected base, weak or generalized)")))
}

fn load(common: &Common) -> Result<(Instance, ModelTier), Failure> {
    let inst = Instance::parse(&read(&common.instance)?)
        .map_err(|e| Failure::usage(format!("{}: {e}", common.instance.display())))?;
    let claimed = common.tier.as_deref().map(parse_tier).transpose()?;
    let tier = inst.resolve_tier(claimed)?;
    Ok((inst, tier))
}

fn load_matching(path: &Path, inst: &Instance, tier: ModelTier) -> Result<RandomMatching, Failure> {
    parse_matching(&read(path)?, inst, tier).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

fn verdict_text(inst: &Instance, v: &Verdict) -> String {
    let mut s = format!("{}: {}", v.concept.name(), if v.holds { "holds" } else { "fails" });
    if let Some(w) = &v.witness {
        let _ = write!(s, "\n  witness: {}", w.describe(inst));
    }
    if let Some(note) = &v.note {
        let _ = write!(s, "\n  note: {note}");
    }
    if let Some(d) = &v.certificate {
        let label = if v.holds { "certificate" } else { "decomposition" };
        let _ = write!(s, "\n  {label}:");
        s.push_str(&indent(&decomposition_text(inst, d), 4));
    }
    s.push('\n');
    s
}

fn indent(text: &str, by: usize) -> String {
    text.lines().map(|l| format!("\n{:by$}{l}", "")).collect()
}

fn decomposition_text(inst: &Instance, d: &Decomposition) -> String {
    let mut s = String::new();
    for part in d.parts() {
        let _ = write!(s, "weight {}", part.weight);
        s.push_str(&indent(&render_matching(&part.matching.to_random(), inst), 2));
        s.push('\n');
    }
    s
}

pub fn check(a: CheckArgs) -> Outcome {
    let (inst, tier) = load(&a.common)?;
    let p = load_matching(&a.matching, &inst, tier)?;
    let cap = cap()?;
    let verdicts = if a.concept == "all" {
        let mut vs = check_all(&inst, &p, tier, cap)?;
        if p.is_deterministic() {
            for c in [
                Concept::DetNoEnvy,
                Concept::DetNonWasteful,
                Concept::DetIndividuallyRational,
                Concept::DetWeaklyStable,
            ] {
                vs.push(check_concept(&inst, &p, tier, c, cap)?);
            }
        }
        vs
    } else {
        let concept = Concept::from_name(&a.concept).ok_or_else(|| {
            let names: Vec<&str> = Concept::ALL.iter().map(|c| c.name()).collect();
            Failure::usage(format!(
                "unknown concept `{}` (expected all or one of {})",
                a.concept,
                names.join(", ")
            ))
        })?;
        vec![check_concept(&inst, &p, tier, concept, cap)?]
    };
    let text = if a.common.json {
        let records: Vec<VerdictRecord> = verdicts.iter().map(|v| v.to_record(&inst)).collect();
        if a.concept == "all" {
            json(&records)
        } else {
            json(&records[0])
        }
    } else {
        let mut s = format!("tier: {tier}\n");
        for v in &verdicts {
            s.push_str(&verdict_text(&inst, v));
        }
        s
    };
    emit(a.common.out.as_ref(), &text)?;
    Ok(if a.assert && verdicts.iter().any(|v| !v.holds) {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

pub fn decompose(a: DecomposeArgs) -> Outcome {
    let (inst, tier) = load(&a.common)?;
    let p = load_matching(&a.matching, &inst, tier)?;
    let d = if a.stable {
        let v = check_ex_post(&inst, &p, tier, cap()?)?;
        match v.certificate {
            Some(d) => d,
            None => {
                let why = v.witness.map(|w| w.describe(&inst)).or(v.note).unwrap_or_default();
                eprintln!("matchstab: no stable decomposition: {why}");
                return Ok(ExitCode::from(1));
            }
        }
    } else {
        bvn_decompose(&p)
    };
    let text = if a.common.json {
        json(&d)
    } else {
        decomposition_text(&inst, &d)
    };
    emit(a.common.out.as_ref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct TransformOutput {
    instance: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    matching: Option<String>,
}

pub fn transform(a: TransformArgs) -> Outcome {
    let (inst, tier) = load(&a.common)?;
    let p = a
        .matching
        .as_deref()
        .map(|m| load_matching(m, &inst, tier))
        .transpose()?;
    let (assoc, _) = to_associated_instance(&inst);
    let out = TransformOutput {
        instance: assoc.render(),
        matching: p.map(|p| render_matching(&to_associated_matching(&p), &assoc)),
    };
    let text = if a.common.json {
        json(&out)
    } else {
        match &out.matching {
            Some(m) => format!("{}\n{m}", out.instance),
            None => out.instance,
        }
    };
    emit(a.common.out.as_ref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

pub fn enumerate(a: EnumerateArgs) -> Outcome {
    let (inst, tier) = load(&a.common)?;
    let all = enumerate_deterministic(&inst, a.stable, tier, cap()?)?;
    let text = if a.common.json {
        json(&all)
    } else {
        let blocks: Vec<String> = all.iter().map(|q| render_matching(&q.to_random(), &inst)).collect();
        blocks.join("\n")
    };
    emit(a.common.out.as_ref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

pub fn audit(a: AuditArgs) -> Outcome {
    let mut cfg = AuditConfig::with_max(a.seed, a.count, a.max_n);
    if std::env::var_os("MATCHSTAB_CAP").is_some() {
        cfg.cap = cap()?;
    }
    if !a.tier.is_empty() {
        cfg.tiers = a.tier.iter().map(|t| parse_tier(t)).collect::<Result<_, _>>()?;
    }
    let report = run_audit(&cfg)?;
    let text = if a.json {
        report.to_json() + "\n"
    } else {
        report.table()
    };
    emit(a.out.as_ref(), &text)?;
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

pub fn examples(a: ExamplesArgs) -> Outcome {
    let mut cases = corpus();
    if let Some(id) = &a.id {
        cases.retain(|c| c.id.eq_ignore_ascii_case(id));
        if cases.is_empty() {
            return Err(Failure::usage(format!("no corpus case `{id}`")));
        }
    }
    if a.list {
        let mut s = String::new();
        for c in &cases {
            let _ = writeln!(s, "{:<6} {:<12} {}", c.id, c.tier.name(), c.source);
        }
        print!("{s}");
        return Ok(ExitCode::SUCCESS);
    }
    let cap = cap()?;
    let outcomes: Vec<_> = cases.iter().map(|c| c.run(cap)).collect();
    if a.json {
        print!("{}", json(&outcomes));
    } else {
        for o in &outcomes {
            println!(
                "{:<6} {} ({} checks)",
                o.id,
                if o.passed() { "PASS" } else { "FAIL" },
                o.checks.len()
            );
            for c in o.checks.iter().filter(|c| c.actual != Some(c.expected)) {
                let got = match (&c.actual, &c.error) {
                    (Some(v), _) => v.to_string(),
                    (None, Some(e)) => format!("error: {e}"),
                    (None, None) => "nothing".to_string(),
                };
                println!("  {}: expected {}, got {got}", c.key, c.expected);
            }
        }
    }
    Ok(if outcomes.iter().all(|o| o.passed()) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
