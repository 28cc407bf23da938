//! Birkhoff–von Neumann decomposition, exact convex feasibility, and realizability.

mod simplex;

use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::instance::ModelTier;
use crate::matching::{check_cap, matchings_within, DeterministicMatching, RandomMatching};
use crate::rational::{one, zero, Rat};

/// Bases visited by the vertex oracle before it gives up.
const ORACLE_BASIS_LIMIT: usize = 200_000;

/// One weighted deterministic matching in a decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Part {
    pub weight: Rat,
    pub matching: DeterministicMatching,
}

impl Serialize for Part {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Part", 2)?;
        st.serialize_field("weight", &self.weight.to_string())?;
        st.serialize_field("matching", &self.matching)?;
        st.end()
    }
}

/// Positive weights on deterministic matchings, summing to one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Decomposition {
    parts: Vec<Part>,
}

impl Decomposition {
    /// Rejects empty decompositions, non-positive weights, mixed shapes, and totals other than one.
    pub fn new(parts: Vec<Part>) -> Result<Decomposition> {
        let Some(first) = parts.first() else {
            return Err(Error::InvalidMatching("empty decomposition".to_string()));
        };
        let shape = (first.matching.n(), first.matching.m());
        if parts.iter().any(|p| (p.matching.n(), p.matching.m()) != shape) {
            return Err(Error::InvalidMatching(
                "decomposition parts differ in shape".to_string(),
            ));
        }
        if parts.iter().any(|p| !p.weight.is_positive()) {
            return Err(Error::InvalidMatching(
                "decomposition weight is not positive".to_string(),
            ));
        }
        let total: Rat = parts.iter().map(|p| &p.weight).sum();
        if !total.is_one() {
            return Err(Error::InvalidMatching(format!("decomposition weights sum to {total}")));
        }
        Ok(Decomposition { parts })
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `Σ λ_s Q_s`.
    pub fn reconstruct(&self) -> RandomMatching {
        let (n, m) = (self.parts[0].matching.n(), self.parts[0].matching.m());
        let mut cells = vec![zero(); n * m];
        for part in &self.parts {
            for (i, o) in part.matching.partners().iter().enumerate() {
                if let Some(o) = *o {
                    cells[i * m + o] += &part.weight;
                }
            }
        }
        RandomMatching::from_cells_unchecked(n, m, cells)
    }

    pub fn reconstructs(&self, p: &RandomMatching) -> bool {
        self.reconstruct() == *p
    }

    pub fn contains(&self, q: &DeterministicMatching) -> bool {
        self.parts.iter().any(|p| p.matching == *q)
    }
}

/// `Σ_s λ_s Q_s = target`, `Σ_s λ_s = 1`, `λ ≥ 0`.
#[derive(Clone, Debug)]
pub struct FeasibilitySystem {
    pub columns: Vec<DeterministicMatching>,
    pub target: RandomMatching,
}

impl FeasibilitySystem {
    pub fn new(columns: Vec<DeterministicMatching>, target: RandomMatching) -> Result<FeasibilitySystem> {
        if columns.iter().any(|q| (q.n(), q.m()) != (target.n(), target.m())) {
            return Err(Error::InvalidMatching("column shape differs from target".to_string()));
        }
        Ok(FeasibilitySystem { columns, target })
    }

    /// Drops columns that put mass where the target has none (their weight must be zero)
    /// and the rows that become identically zero. Returns kept column indices, `A`, `b`.
    fn reduced(&self) -> (Vec<usize>, Vec<Vec<Rat>>, Vec<Rat>) {
        let p = &self.target;
        let kept: Vec<usize> = (0..self.columns.len())
            .filter(|&s| {
                let q = &self.columns[s];
                q.partners()
                    .iter()
                    .enumerate()
                    .all(|(i, o)| o.is_none_or(|o| p.get(i, o).is_positive()))
            })
            .collect();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in 0..p.n() {
            for o in 0..p.m() {
                if p.get(i, o).is_positive() {
                    a.push(
                        kept.iter()
                            .map(|&s| if self.columns[s].has(i, o) { one() } else { zero() })
                            .collect(),
                    );
                    b.push(p.get(i, o).clone());
                }
            }
        }
        a.push(vec![one(); kept.len()]);
        b.push(one());
        (kept, a, b)
    }

    fn decomposition_from(&self, kept: &[usize], weights: &[Rat]) -> Decomposition {
        let parts = kept
            .iter()
            .zip(weights)
            .filter(|(_, w)| w.is_positive())
            .map(|(&s, w)| Part {
                weight: w.clone(),
                matching: self.columns[s].clone(),
            })
            .collect();
        Decomposition::new(parts).expect("feasible weights form a decomposition")
    }
}

/// Exact phase-I simplex with Bland's rule. Returns one weight per column.
pub fn solve_convex_feasibility(sys: &FeasibilitySystem) -> Option<Vec<Rat>> {
    let (kept, a, b) = sys.reduced();
    let x = simplex::feasible_point(&a, &b, kept.len())?;
    let mut weights = vec![zero(); sys.columns.len()];
    for (k, s) in kept.into_iter().enumerate() {
        weights[s] = x[k].clone();
    }
    Some(weights)
}

/// Like [`solve_convex_feasibility`], packaged as a decomposition with zero parts dropped.
pub fn find_decomposition(sys: &FeasibilitySystem) -> Option<Decomposition> {
    let weights = solve_convex_feasibility(sys)?;
    let all: Vec<usize> = (0..sys.columns.len()).collect();
    Some(sys.decomposition_from(&all, &weights))
}

/// Pads `p` to the `(n+m) × (n+m)` bistochastic square form: rows are agents then one
/// dummy per object, columns are objects then one null object per agent.
pub(crate) fn associated_square(p: &RandomMatching) -> RandomMatching {
    let (n, m) = (p.n(), p.m());
    let k = n + m;
    let mut cells = vec![zero(); k * k];
    for i in 0..n {
        for o in 0..m {
            cells[i * k + o] = p.get(i, o).clone();
            cells[(n + o) * k + m + i] = p.get(i, o).clone();
        }
        cells[i * k + m + i] = p.agent_slack(i);
    }
    for o in 0..m {
        cells[(n + o) * k + o] = p.object_slack(o);
    }
    RandomMatching::from_cells_unchecked(k, k, cells)
}

/// Perfect matching on the positive support by augmenting paths, agents and objects
/// scanned in index order.
fn perfect_support_matching(p: &RandomMatching) -> Option<Vec<usize>> {
    fn augment(i: usize, p: &RandomMatching, seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for o in 0..p.m() {
            if p.get(i, o).is_positive() && !seen[o] {
                seen[o] = true;
                if owner[o].is_none_or(|j| augment(j, p, seen, owner)) {
                    owner[o] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    let mut owner = vec![None; p.m()];
    for i in 0..p.n() {
        if !augment(i, p, &mut vec![false; p.m()], &mut owner) {
            return None;
        }
    }
    let mut partner = vec![0; p.n()];
    for (o, i) in owner.iter().enumerate() {
        partner[i.expect("perfect matching covers every object")] = o;
    }
    Some(partner)
}

/// Greedy Birkhoff–von Neumann decomposition.
///
/// Bistochastic inputs are decomposed directly; others are padded to the associated
/// square form and the parts restricted back. Parts that coincide after restriction are
/// merged, and if more than `nonzero + 1` remain a basic solution over them is taken.
pub fn bvn_decompose(p: &RandomMatching) -> Decomposition {
    let (n, m) = (p.n(), p.m());
    let mut rest = if p.is_bistochastic() {
        p.clone()
    } else {
        associated_square(p)
    };
    let k = rest.n();
    let mut parts: Vec<Part> = Vec::new();
    loop {
        if k == 0 {
            parts.push(Part {
                weight: one(),
                matching: DeterministicMatching::from_partner_unchecked(m, vec![None; n]),
            });
            break;
        }
        if rest.cells().iter().all(Zero::is_zero) {
            break;
        }
        let perm = perfect_support_matching(&rest).expect("bistochastic residue has a perfect matching");
        let weight = perm
            .iter()
            .enumerate()
            .map(|(i, &o)| rest.get(i, o).clone())
            .min()
            .expect("non-empty matching");
        let mut cells = rest.cells().to_vec();
        for (i, &o) in perm.iter().enumerate() {
            cells[i * k + o] -= &weight;
        }
        rest = RandomMatching::from_cells_unchecked(k, k, cells);
        let partner = (0..n).map(|i| Some(perm[i]).filter(|&o| o < m)).collect();
        let matching = DeterministicMatching::from_partner_unchecked(m, partner);
        match parts.iter_mut().find(|q| q.matching == matching) {
            Some(existing) => existing.weight += weight,
            None => parts.push(Part { weight, matching }),
        }
    }
    let mut d = Decomposition::new(parts).expect("greedy weights sum to one");
    if d.len() > p.nonzero_count() + 1 {
        let sys = FeasibilitySystem {
            columns: d.parts.iter().map(|q| q.matching.clone()).collect(),
            target: p.clone(),
        };
        d = find_decomposition(&sys).expect("the greedy parts already decompose p");
    }
    d
}

/// Whether `q` can carry positive weight in some decomposition of `p`: its support lies
/// inside `p`'s, and every entity it leaves unmatched has positive slack in `p`.
pub fn is_realizable(p: &RandomMatching, q: &DeterministicMatching) -> bool {
    let holders = q.holders();
    q.partners().iter().enumerate().all(|(i, o)| match *o {
        Some(o) => p.get(i, o).is_positive(),
        None => p.agent_slack(i).is_positive(),
    }) && holders
        .iter()
        .enumerate()
        .all(|(o, h)| h.is_some() || p.object_slack(o).is_positive())
}

/// Every deterministic matching that appears with positive weight in some decomposition of `p`.
pub fn enumerate_realizable(p: &RandomMatching, tier: ModelTier, cap: usize) -> Result<Vec<DeterministicMatching>> {
    check_cap(p.n(), p.m(), cap)?;
    let perfect = tier.is_square() && p.is_bistochastic();
    let all = matchings_within(p.n(), p.m(), perfect, &|i, o| p.get(i, o).is_positive(), &|i| {
        p.agent_slack(i).is_positive()
    });
    Ok(all.into_iter().filter(|q| is_realizable(p, q)).collect())
}

/// A decomposition of `p` that gives `q` positive weight, or `None` if `q` is not realizable.
///
/// Takes the largest `λ` with `p − λq ≥ 0` and enough slack, then decomposes the rescaled rest.
pub fn decomposition_containing(p: &RandomMatching, q: &DeterministicMatching) -> Option<Decomposition> {
    if !is_realizable(p, q) {
        return None;
    }
    let holders = q.holders();
    let lambda = q
        .partners()
        .iter()
        .enumerate()
        .map(|(i, o)| match *o {
            Some(o) => p.get(i, o).clone(),
            None => p.agent_slack(i),
        })
        .chain(
            holders
                .iter()
                .enumerate()
                .filter(|(_, h)| h.is_none())
                .map(|(o, _)| p.object_slack(o)),
        )
        .min()
        .unwrap_or_else(one)
        .min(one());
    if lambda.is_one() {
        return Some(
            Decomposition::new(vec![Part {
                weight: one(),
                matching: q.clone(),
            }])
            .expect("single unit part"),
        );
    }
    let scale = (one() - &lambda).recip();
    let qr = q.to_random();
    let cells = p
        .cells()
        .iter()
        .zip(qr.cells())
        .map(|(a, b)| (a - &lambda * b) * &scale)
        .collect();
    let rest = RandomMatching::new(p.n(), p.m(), cells).expect("realizable residue is a valid matching");
    let mut parts = vec![Part {
        weight: lambda.clone(),
        matching: q.clone(),
    }];
    for part in bvn_decompose(&rest).parts {
        let w = part.weight * (one() - &lambda);
        match parts.iter_mut().find(|x| x.matching == part.matching) {
            Some(x) => x.weight += w,
            None => parts.push(Part {
                weight: w,
                matching: part.matching,
            }),
        }
    }
    Some(Decomposition::new(parts).expect("mixture of decompositions"))
}

/// Every vertex decomposition of `p` over the tier's deterministic matchings.
///
/// Validation oracle: decompositions of `p` form a polytope over the weights, and every
/// decomposition is a mixture of its vertices, so the union of vertex supports is exactly
/// the set of matchings that can carry positive weight. Independent of [`is_realizable`].
pub fn oracle_all_decompositions(p: &RandomMatching, tier: ModelTier, cap: usize) -> Result<Vec<Decomposition>> {
    check_cap(p.n(), p.m(), cap)?;
    let columns = matchings_within(p.n(), p.m(), tier.is_square(), &|_, _| true, &|_| true);
    let sys = FeasibilitySystem::new(columns, p.clone())?;
    let (kept, a, b) = sys.reduced();
    let size = p.n() + p.m();
    let vertices = simplex::vertices(&a, &b, kept.len(), ORACLE_BASIS_LIMIT).ok_or(Error::CapExceeded { size, cap })?;
    Ok(vertices.iter().map(|x| sys.decomposition_from(&kept, x)).collect())
}
