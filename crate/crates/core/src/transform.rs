//! Transformation of a general instance into its associated square, fully acceptable one.
//!
//! Every object `o_j` gains a dummy agent `d_j` and every agent `i` a personal null object
//! `φ_i`. Agents rank their acceptable objects, then `φ_i`, then the other null objects in
//! index order, then their unacceptable objects. Objects rank symmetrically with dummies.
//! A dummy `d_j` ranks `o_j`, the other objects, then `Φ` the way `o_j` ranks agents; a null
//! object `φ_i` ranks `i`, the other agents, then `D` the way `i` ranks objects.

use std::collections::HashSet;

use num_traits::{One, Zero};

use crate::decomposition::associated_square;
use crate::deterministic::{check_individually_rational, check_non_wasteful};
use crate::error::{Error, Result};
use crate::instance::{Entity, Instance, Side, WeakOrder};
use crate::matching::{DeterministicMatching, RandomMatching};
use crate::rational::Rat;

/// Index bookkeeping between a source instance with `n` agents and `m` objects and its
/// associated instance with `n + m` on each side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AssociationMap {
    pub n: usize,
    pub m: usize,
}

impl AssociationMap {
    pub fn size(&self) -> usize {
        self.n + self.m
    }

    /// Agent index of the dummy `d_j` of object `j`.
    pub fn dummy(&self, j: usize) -> usize {
        self.n + j
    }

    /// Object index of the null object `φ_i` of agent `i`.
    pub fn null_object(&self, i: usize) -> usize {
        self.m + i
    }

    /// Source object of an associated agent index, if it is a dummy.
    pub fn dummy_owner(&self, agent: usize) -> Option<usize> {
        (agent >= self.n && agent < self.size()).then(|| agent - self.n)
    }

    /// Source agent of an associated object index, if it is a null object.
    pub fn null_owner(&self, object: usize) -> Option<usize> {
        (object >= self.m && object < self.size()).then(|| object - self.m)
    }
}

fn unique_labels(base: &[String], extra: impl Iterator<Item = String>) -> Vec<String> {
    let mut seen: HashSet<String> = base.iter().cloned().collect();
    let mut out = base.to_vec();
    for mut label in extra {
        while seen.contains(&label) {
            label.push('_');
        }
        seen.insert(label.clone());
        out.push(label);
    }
    out
}

/// Tiers of `order` strictly above and strictly below its null marker.
fn split_at_null(order: &WeakOrder) -> (Vec<Vec<Entity>>, Vec<Vec<Entity>>) {
    let tiers = order.tiers();
    let null = order.null_rank();
    (tiers[..null].to_vec(), tiers[null + 1..].to_vec())
}

fn singletons(it: impl Iterator<Item = Entity>) -> impl Iterator<Item = Vec<Entity>> {
    it.map(|e| vec![e])
}

/// Copies the real tiers of `order`, renaming each entity.
fn relabelled(order: &WeakOrder, f: impl Fn(Entity) -> Entity) -> Vec<Vec<Entity>> {
    order
        .tiers()
        .iter()
        .filter(|t| t[0] != Entity::Null)
        .map(|t| t.iter().map(|&e| f(e)).collect())
        .collect()
}

pub fn to_associated_instance(inst: &Instance) -> (Instance, AssociationMap) {
    let (n, m) = (inst.n(), inst.m());
    let map = AssociationMap { n, m };
    let k = map.size();
    let mut prefs = Vec::with_capacity(k);
    for i in 0..n {
        let (above, below) = split_at_null(inst.pref(i));
        let mut tiers = above;
        tiers.push(vec![Entity::Object(map.null_object(i))]);
        tiers.extend(singletons(
            (0..n).filter(|&a| a != i).map(|a| Entity::Object(map.null_object(a))),
        ));
        tiers.extend(below);
        tiers.push(vec![Entity::Null]);
        prefs.push(WeakOrder::new(Side::Object, k, tiers, inst.agent_label(i)).expect("associated preference"));
    }
    for j in 0..m {
        let mut tiers = vec![vec![Entity::Object(j)]];
        tiers.extend(singletons((0..m).filter(|&o| o != j).map(Entity::Object)));
        tiers.extend(relabelled(inst.prio(j), |e| match e {
            Entity::Agent(a) => Entity::Object(map.null_object(a)),
            other => other,
        }));
        tiers.push(vec![Entity::Null]);
        prefs.push(WeakOrder::new(Side::Object, k, tiers, inst.object_label(j)).expect("dummy preference"));
    }
    let mut prios = Vec::with_capacity(k);
    for j in 0..m {
        let (above, below) = split_at_null(inst.prio(j));
        let mut tiers = above;
        tiers.push(vec![Entity::Agent(map.dummy(j))]);
        tiers.extend(singletons(
            (0..m).filter(|&o| o != j).map(|o| Entity::Agent(map.dummy(o))),
        ));
        tiers.extend(below);
        tiers.push(vec![Entity::Null]);
        prios.push(WeakOrder::new(Side::Agent, k, tiers, inst.object_label(j)).expect("associated priority"));
    }
    for i in 0..n {
        let mut tiers = vec![vec![Entity::Agent(i)]];
        tiers.extend(singletons((0..n).filter(|&a| a != i).map(Entity::Agent)));
        tiers.extend(relabelled(inst.pref(i), |e| match e {
            Entity::Object(o) => Entity::Agent(map.dummy(o)),
            other => other,
        }));
        tiers.push(vec![Entity::Null]);
        prios.push(WeakOrder::new(Side::Agent, k, tiers, inst.agent_label(i)).expect("null priority"));
    }
    let agents = unique_labels(
        inst.agent_labels(),
        inst.object_labels().iter().map(|o| format!("d_{o}")),
    );
    let objects = unique_labels(
        inst.object_labels(),
        inst.agent_labels().iter().map(|a| format!("phi_{a}")),
    );
    let assoc = Instance::new(agents, objects, prefs, prios).expect("associated instance is well formed");
    (assoc, map)
}

/// The bistochastic `(n+m)×(n+m)` matrix with `p` top-left, agent slack on the `φ` diagonal,
/// object slack on the dummy diagonal and `pᵀ` in the dummy–null block.
pub fn to_associated_matching(p: &RandomMatching) -> RandomMatching {
    associated_square(p)
}

pub fn to_associated_deterministic(q: &DeterministicMatching) -> DeterministicMatching {
    to_associated_matching(&q.to_random())
        .to_deterministic()
        .expect("associated matching of a deterministic matching is deterministic")
}

/// The top-left `n×m` block.
pub fn restrict_back(p_assoc: &RandomMatching, map: AssociationMap) -> Result<RandomMatching> {
    if p_assoc.n() != map.size() || p_assoc.m() != map.size() {
        return Err(Error::InvalidMatching(format!(
            "expected a {0}×{0} associated matching, got {1}×{2}",
            map.size(),
            p_assoc.n(),
            p_assoc.m()
        )));
    }
    let cells = (0..map.n)
        .flat_map(|i| (0..map.m).map(move |o| (i, o)))
        .map(|(i, o)| p_assoc.get(i, o).clone())
        .collect();
    RandomMatching::new(map.n, map.m, cells)
}

fn check_pair(p: &RandomMatching, p_assoc: &RandomMatching) -> Result<()> {
    if to_associated_matching(p) == *p_assoc {
        Ok(())
    } else {
        Err(Error::PairMismatch)
    }
}

/// No acceptable `(i, o_j)` with `Σ_{o′≿′_i o_j} p′(i,o′) < 1` and `Σ_{k∈N} p′(k,o_j) < 1`.
pub fn respects_non_wastefulness(inst: &Instance, p: &RandomMatching, p_assoc: &RandomMatching) -> Result<bool> {
    check_pair(p, p_assoc)?;
    let (assoc, _) = to_associated_instance(inst);
    let respects = (0..inst.n())
        .flat_map(|i| (0..inst.m()).map(move |o| (i, o)))
        .filter(|&(i, o)| inst.is_acceptable_pair(i, o))
        .all(|(i, o)| {
            let r = assoc.agent_rank(i, o);
            let upper: Rat = (0..assoc.m())
                .filter(|&o2| assoc.agent_rank(i, o2) <= r)
                .map(|o2| p_assoc.get(i, o2))
                .sum();
            let held: Rat = (0..inst.n()).map(|k| p_assoc.get(k, o)).sum();
            upper.is_one() || held.is_one()
        });
    assert_eq!(
        respects,
        check_non_wasteful(inst, p).is_ok(),
        "non-wastefulness forms disagree"
    );
    Ok(respects)
}

/// `p′(i,o_j) = 0` and `p′(d_j,φ_i) = 0` for every unacceptable `(i, o_j)`.
pub fn respects_individual_rationality(inst: &Instance, p: &RandomMatching, p_assoc: &RandomMatching) -> Result<bool> {
    check_pair(p, p_assoc)?;
    let map = AssociationMap {
        n: inst.n(),
        m: inst.m(),
    };
    let respects = (0..inst.n())
        .flat_map(|i| (0..inst.m()).map(move |o| (i, o)))
        .filter(|&(i, o)| !inst.is_acceptable_pair(i, o))
        .all(|(i, o)| p_assoc.get(i, o).is_zero() && p_assoc.get(map.dummy(o), map.null_object(i)).is_zero());
    assert_eq!(
        respects,
        check_individually_rational(inst, p).is_ok(),
        "individual rationality forms disagree"
    );
    Ok(respects)
}
