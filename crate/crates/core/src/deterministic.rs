//! Axioms for deterministic matchings, shared witness type, and deferred acceptance.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::instance::{Instance, ModelTier};
use crate::matching::{DeterministicMatching, RandomMatching};
use crate::rational::{one, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    /// Agent `agent` envies `other_agent` over `object`.
    Envy,
    /// `agent` wants more of `object`, which is not fully allocated.
    Waste,
    /// Positive probability on an unacceptable pair.
    Irrationality,
    /// `(agent, object)` would both rather have each other.
    Block,
    /// `agent` has a claim against `other_agent` over `object`.
    Claim,
    /// A pairwise inequality fails at `(agent, object)`; `values` is `[lhs, rhs]` with `lhs > rhs`.
    Inequality,
    /// A deterministic part of a decomposition is not weakly stable.
    UnstablePart,
}

/// A violating tuple `(i, j, o, o′)` with the numbers that violate the condition.
///
/// Indices are 0-based; rendering adds labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub kind: WitnessKind,
    pub agent: usize,
    pub other_agent: Option<usize>,
    pub object: usize,
    pub other_object: Option<usize>,
    pub values: Vec<Rat>,
    /// The offending deterministic matching, when the violation lives inside one.
    pub matching: Option<Box<DeterministicMatching>>,
}

impl Witness {
    pub fn new(kind: WitnessKind, agent: usize, object: usize, values: Vec<Rat>) -> Witness {
        Witness {
            kind,
            agent,
            other_agent: None,
            object,
            other_object: None,
            values,
            matching: None,
        }
    }

    pub fn with_other_agent(mut self, j: usize) -> Witness {
        self.other_agent = Some(j);
        self
    }

    pub fn with_other_object(mut self, o: Option<usize>) -> Witness {
        self.other_object = o;
        self
    }

    /// One-line description using the instance's labels.
    pub fn describe(&self, inst: &Instance) -> String {
        let a = inst.agent_label(self.agent);
        let o = inst.object_label(self.object);
        let j = self.other_agent.map(|j| inst.agent_label(j));
        let values: Vec<String> = self.values.iter().map(ToString::to_string).collect();
        let values = values.join(" vs ");
        match self.kind {
            WitnessKind::Envy => match self.other_object {
                Some(o2) => format!(
                    "agent {a} holds {} but envies agent {} over {o} [{values}]",
                    inst.object_label(o2),
                    j.unwrap_or("?")
                ),
                None => format!("agent {a} envies agent {} over {o} [{values}]", j.unwrap_or("?")),
            },
            WitnessKind::Waste => format!("agent {a} wants more of {o}, which is not fully allocated [{values}]"),
            WitnessKind::Irrationality => format!("agent {a} gets unacceptable pairing with {o} [{values}]"),
            WitnessKind::Block => format!("agent {a} and object {o} block [{values}]"),
            WitnessKind::Claim => format!(
                "agent {a} has a claim against agent {} over {o} [{values}]",
                j.unwrap_or("?")
            ),
            WitnessKind::Inequality => format!("inequality fails at agent {a}, object {o} [{values}]"),
            WitnessKind::UnstablePart => {
                format!("decomposition part is unstable: agent {a}, object {o} [{values}]")
            }
        }
    }
}

/// No justified envy.
///
/// Square tiers: no `(i, j, o, o′)` with `q(i,o′) = 1`, `q(j,o) = 1`, `o ≻_i o′`, `i ≻_o j`.
/// Generalized: no acceptable `(i, o)` and `j` with `i` holding nothing `≿_i o`, `q(j,o) = 1`
/// and `i ≻_o j`; `o′` is then reported as `i`'s current object, if any.
pub fn check_no_envy(inst: &Instance, q: &DeterministicMatching, tier: ModelTier) -> Result<(), Witness> {
    let n = q.n();
    for i in 0..n {
        let own = q.partner(i);
        for j in 0..n {
            let Some(o) = q.partner(j) else { continue };
            if j == i || inst.object_rank(o, i) >= inst.object_rank(o, j) {
                continue;
            }
            let envies = if tier.is_square() {
                own.is_some_and(|o2| inst.agent_rank(i, o) < inst.agent_rank(i, o2))
            } else {
                inst.is_acceptable_pair(i, o) && own.is_none_or(|o2| inst.agent_rank(i, o2) > inst.agent_rank(i, o))
            };
            if envies {
                let values = if tier.is_square() {
                    vec![one(), one()]
                } else {
                    vec![Rat::zero(), one()]
                };
                return Err(Witness::new(WitnessKind::Envy, i, o, values)
                    .with_other_agent(j)
                    .with_other_object(own));
            }
        }
    }
    Ok(())
}

/// Inequality form of no envy for strict square instances:
/// `q(i,o) + Σ_{o′≻_i o} q(i,o′) + Σ_{j≻_o i} q(j,o) ≥ 1` for every pair.
pub fn check_no_envy_inequalities(inst: &Instance, p: &RandomMatching) -> Result<(), Witness> {
    for i in 0..p.n() {
        for o in 0..p.m() {
            let lhs = tight_sum(inst, p, i, o);
            if lhs < one() {
                return Err(Witness::new(WitnessKind::Inequality, i, o, vec![one(), lhs]));
            }
        }
    }
    Ok(())
}

/// `p(i,o) + Σ_{o′≻_i o} p(i,o′) + Σ_{j≻_o i} p(j,o)`.
pub fn tight_sum(inst: &Instance, p: &RandomMatching, i: usize, o: usize) -> Rat {
    let mut s = p.get(i, o).clone();
    for o2 in 0..p.m() {
        if inst.agent_rank(i, o2) < inst.agent_rank(i, o) {
            s += p.get(i, o2);
        }
    }
    for j in 0..p.n() {
        if inst.object_rank(o, j) < inst.object_rank(o, i) {
            s += p.get(j, o);
        }
    }
    s
}

/// No acceptable `(i, o)` where `i` wants more of `o` (`Σ_{o′≿_i o} p(i,o′) < 1`)
/// and `o` is not fully allocated.
pub fn check_non_wasteful(inst: &Instance, p: &RandomMatching) -> Result<(), Witness> {
    let col: Vec<Rat> = (0..p.m()).map(|o| p.col_sum(o)).collect();
    for i in 0..p.n() {
        for (o, filled) in col.iter().enumerate() {
            if !inst.is_acceptable_pair(i, o) || *filled >= one() {
                continue;
            }
            let upper: Rat = (0..p.m())
                .filter(|&o2| inst.agent_rank(i, o2) <= inst.agent_rank(i, o))
                .map(|o2| p.get(i, o2))
                .sum();
            if upper < one() {
                return Err(Witness::new(WitnessKind::Waste, i, o, vec![upper, filled.clone()]));
            }
        }
    }
    Ok(())
}

/// No probability on any pair that is unacceptable to either side.
pub fn check_individually_rational(inst: &Instance, p: &RandomMatching) -> Result<(), Witness> {
    for i in 0..p.n() {
        for o in 0..p.m() {
            if !inst.is_acceptable_pair(i, o) && p.get(i, o).is_positive() {
                return Err(Witness::new(
                    WitnessKind::Irrationality,
                    i,
                    o,
                    vec![p.get(i, o).clone()],
                ));
            }
        }
    }
    Ok(())
}

/// Weak stability. Square tiers: no envy. Generalized: individually rational and no
/// acceptable pair that both strictly prefer each other to their current match.
pub fn check_weakly_stable_det(inst: &Instance, q: &DeterministicMatching, tier: ModelTier) -> Result<(), Witness> {
    if tier.is_square() {
        return check_no_envy(inst, q, tier);
    }
    for (i, o) in q.partners().iter().enumerate() {
        if let Some(o) = *o {
            if !inst.is_acceptable_pair(i, o) {
                return Err(Witness::new(WitnessKind::Irrationality, i, o, vec![one()]));
            }
        }
    }
    let holders = q.holders();
    for i in 0..q.n() {
        for (o, holder) in holders.iter().enumerate() {
            if !inst.is_acceptable_pair(i, o) {
                continue;
            }
            let agent_wants = q
                .partner(i)
                .is_none_or(|o2| inst.agent_rank(i, o2) > inst.agent_rank(i, o));
            let object_wants = holder.is_none_or(|j| inst.object_rank(o, j) > inst.object_rank(o, i));
            if agent_wants && object_wants {
                return Err(Witness::new(WitnessKind::Block, i, o, vec![Rat::zero(), Rat::zero()])
                    .with_other_agent_opt(*holder)
                    .with_other_object(q.partner(i)));
            }
        }
    }
    Ok(())
}

impl Witness {
    fn with_other_agent_opt(mut self, j: Option<usize>) -> Witness {
        self.other_agent = j;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Proposing {
    Agents,
    Objects,
}

/// Deferred acceptance on the tie-broken profile (ties broken by lower index first);
/// unacceptable partners are never proposed to or accepted.
pub fn deferred_acceptance(inst: &Instance, proposing: Proposing) -> DeterministicMatching {
    let (n, m) = (inst.n(), inst.m());
    // Proposers' lists and receivers' strict ranks of proposers.
    let (k, r) = match proposing {
        Proposing::Agents => (n, m),
        Proposing::Objects => (m, n),
    };
    let lists: Vec<Vec<usize>> = (0..k)
        .map(|a| match proposing {
            Proposing::Agents => inst.pref(a).acceptable_tie_broken(),
            Proposing::Objects => inst.prio(a).acceptable_tie_broken(),
        })
        .collect();
    let receiver_rank: Vec<Vec<Option<usize>>> = (0..r)
        .map(|b| {
            let order = match proposing {
                Proposing::Agents => inst.prio(b),
                Proposing::Objects => inst.pref(b),
            };
            let mut rank = vec![None; k];
            for (pos, a) in order.acceptable_tie_broken().into_iter().enumerate() {
                rank[a] = Some(pos);
            }
            rank
        })
        .collect();
    let mut next = vec![0usize; k];
    let mut held: Vec<Option<usize>> = vec![None; r];
    let mut free: Vec<usize> = (0..k).rev().collect();
    while let Some(a) = free.pop() {
        while next[a] < lists[a].len() {
            let b = lists[a][next[a]];
            next[a] += 1;
            let Some(ra) = receiver_rank[b][a] else { continue };
            match held[b] {
                None => {
                    held[b] = Some(a);
                    break;
                }
                Some(c) if receiver_rank[b][c].is_some_and(|rc| ra < rc) => {
                    held[b] = Some(a);
                    free.push(c);
                    break;
                }
                Some(_) => {}
            }
        }
    }
    let mut partner = vec![None; n];
    for (b, a) in held.iter().enumerate() {
        if let Some(a) = *a {
            match proposing {
                Proposing::Agents => partner[a] = Some(b),
                Proposing::Objects => partner[b] = Some(a),
            }
        }
    }
    DeterministicMatching::new(m, partner).expect("deferred acceptance yields a matching")
}
