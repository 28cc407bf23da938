//! Random (doubly substochastic) and deterministic matchings.

use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::deterministic::check_weakly_stable_det;
use crate::error::{Error, Result};
use crate::instance::{Instance, ModelTier};
use crate::rational::{one, parse_rat, zero, Rat};

/// Default bound on `n + m` for anything that enumerates matchings.
pub const DEFAULT_CAP: usize = 12;

/// An `n × m` matrix of probabilities with row and column sums at most one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RandomMatching {
    n: usize,
    m: usize,
    cells: Vec<Rat>,
}

impl RandomMatching {
    /// Validates nonnegativity and the row/column bounds.
    pub fn new(n: usize, m: usize, cells: Vec<Rat>) -> Result<RandomMatching> {
        if cells.len() != n * m {
            return Err(Error::InvalidMatching(format!(
                "expected {} cells, got {}",
                n * m,
                cells.len()
            )));
        }
        let p = RandomMatching { n, m, cells };
        for i in 0..n {
            for o in 0..m {
                if p.get(i, o).is_negative() {
                    return Err(Error::InvalidMatching(format!("negative cell ({}, {})", i + 1, o + 1)));
                }
            }
            if p.row_sum(i) > one() {
                return Err(Error::InvalidMatching(format!(
                    "row {} sums to {}",
                    i + 1,
                    p.row_sum(i)
                )));
            }
        }
        for o in 0..m {
            if p.col_sum(o) > one() {
                return Err(Error::InvalidMatching(format!(
                    "column {} sums to {}",
                    o + 1,
                    p.col_sum(o)
                )));
            }
        }
        Ok(p)
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<RandomMatching> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidMatching("ragged rows".to_string()));
        }
        RandomMatching::new(n, m, rows.into_iter().flatten().collect())
    }

    pub(crate) fn from_cells_unchecked(n: usize, m: usize, cells: Vec<Rat>) -> RandomMatching {
        debug_assert_eq!(cells.len(), n * m);
        RandomMatching { n, m, cells }
    }

    pub fn zeros(n: usize, m: usize) -> RandomMatching {
        RandomMatching::from_cells_unchecked(n, m, vec![zero(); n * m])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, o: usize) -> &Rat {
        &self.cells[i * self.m + o]
    }

    pub fn cells(&self) -> &[Rat] {
        &self.cells
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.cells[i * self.m..(i + 1) * self.m]
    }

    pub fn rows(&self) -> Vec<Vec<Rat>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn row_sum(&self, i: usize) -> Rat {
        self.row(i).iter().sum()
    }

    pub fn col_sum(&self, o: usize) -> Rat {
        (0..self.n).map(|i| self.get(i, o)).sum()
    }

    /// `p(i,∅) = 1 − Σ_o p(i,o)`.
    pub fn agent_slack(&self, i: usize) -> Rat {
        one() - self.row_sum(i)
    }

    /// `p(∅,o) = 1 − Σ_i p(i,o)`.
    pub fn object_slack(&self, o: usize) -> Rat {
        one() - self.col_sum(o)
    }

    pub fn slack(&self) -> SlackVector {
        SlackVector {
            agent_slack: (0..self.n).map(|i| self.agent_slack(i)).collect(),
            object_slack: (0..self.m).map(|o| self.object_slack(o)).collect(),
        }
    }

    pub fn is_bistochastic(&self) -> bool {
        self.n == self.m
            && (0..self.n).all(|i| self.row_sum(i).is_one())
            && (0..self.m).all(|o| self.col_sum(o).is_one())
    }

    pub fn is_deterministic(&self) -> bool {
        self.cells.iter().all(|c| c.is_zero() || c.is_one())
    }

    pub fn to_deterministic(&self) -> Option<DeterministicMatching> {
        if !self.is_deterministic() {
            return None;
        }
        let partner = (0..self.n).map(|i| self.row(i).iter().position(One::is_one)).collect();
        Some(DeterministicMatching::from_partner_unchecked(self.m, partner))
    }

    pub fn nonzero_count(&self) -> usize {
        self.cells.iter().filter(|c| !c.is_zero()).count()
    }

    /// `λ·self + (1 − λ)·other` for `λ ∈ [0, 1]`.
    pub fn mix(&self, lambda: &Rat, other: &RandomMatching) -> Result<RandomMatching> {
        if (self.n, self.m) != (other.n, other.m) {
            return Err(Error::InvalidMatching(
                "mixing matchings of different shapes".to_string(),
            ));
        }
        if lambda.is_negative() || *lambda > one() {
            return Err(Error::InvalidMatching(format!(
                "mixture weight {lambda} outside [0, 1]"
            )));
        }
        let rest = one() - lambda;
        let cells = self
            .cells
            .iter()
            .zip(&other.cells)
            .map(|(a, b)| lambda * a + &rest * b)
            .collect();
        RandomMatching::new(self.n, self.m, cells)
    }

    /// Checks the shape against `inst` and, for square tiers, bistochasticity.
    pub fn validate_for(&self, inst: &Instance, tier: ModelTier) -> Result<()> {
        if (self.n, self.m) != (inst.n(), inst.m()) {
            return Err(Error::InvalidMatching(format!(
                "matching is {}×{}, instance is {}×{}",
                self.n,
                self.m,
                inst.n(),
                inst.m()
            )));
        }
        if tier.is_square() && !self.is_bistochastic() {
            return Err(Error::InvalidMatching(format!(
                "the {tier} tier requires every row and column to sum to 1"
            )));
        }
        Ok(())
    }

    pub fn support_graph(&self) -> SupportGraph {
        support_graph(self)
    }
}

impl Serialize for RandomMatching {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.n)
            .map(|i| self.row(i).iter().map(ToString::to_string).collect())
            .collect();
        rows.serialize(s)
    }
}

/// Unassigned probability per agent and per object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlackVector {
    pub agent_slack: Vec<Rat>,
    pub object_slack: Vec<Rat>,
}

/// A matching with 0/1 cells, stored as each agent's partner.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DeterministicMatching {
    m: usize,
    partner: Vec<Option<usize>>,
}

impl DeterministicMatching {
    pub fn new(m: usize, partner: Vec<Option<usize>>) -> Result<DeterministicMatching> {
        let mut taken = vec![false; m];
        for (i, &o) in partner.iter().enumerate() {
            if let Some(o) = o {
                if o >= m || std::mem::replace(&mut taken[o], true) {
                    return Err(Error::InvalidMatching(format!(
                        "agent {} cannot take object {}",
                        i + 1,
                        o + 1
                    )));
                }
            }
        }
        Ok(DeterministicMatching { m, partner })
    }

    pub(crate) fn from_partner_unchecked(m: usize, partner: Vec<Option<usize>>) -> DeterministicMatching {
        DeterministicMatching { m, partner }
    }

    /// Builds from `(agent, object)` pairs.
    pub fn from_pairs(n: usize, m: usize, pairs: &[(usize, usize)]) -> Result<DeterministicMatching> {
        let mut partner = vec![None; n];
        for &(i, o) in pairs {
            if i >= n || partner[i].replace(o).is_some() {
                return Err(Error::InvalidMatching(format!(
                    "agent {} listed twice or out of range",
                    i + 1
                )));
            }
        }
        DeterministicMatching::new(m, partner)
    }

    pub fn n(&self) -> usize {
        self.partner.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn partner(&self, i: usize) -> Option<usize> {
        self.partner[i]
    }

    pub fn partners(&self) -> &[Option<usize>] {
        &self.partner
    }

    /// Agent holding each object.
    pub fn holders(&self) -> Vec<Option<usize>> {
        let mut h = vec![None; self.m];
        for (i, o) in self.partner.iter().enumerate() {
            if let Some(o) = *o {
                h[o] = Some(i);
            }
        }
        h
    }

    pub fn has(&self, i: usize, o: usize) -> bool {
        self.partner[i] == Some(o)
    }

    pub fn to_random(&self) -> RandomMatching {
        let mut cells = vec![zero(); self.n() * self.m];
        for (i, o) in self.partner.iter().enumerate() {
            if let Some(o) = *o {
                cells[i * self.m + o] = one();
            }
        }
        RandomMatching::from_cells_unchecked(self.n(), self.m, cells)
    }

    /// Row-major 0/1 cells; enumerations are sorted by this key.
    pub fn key(&self) -> Vec<u8> {
        self.rows().concat()
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        self.partner
            .iter()
            .map(|o| (0..self.m).map(|k| u8::from(*o == Some(k))).collect())
            .collect()
    }
}

impl Serialize for DeterministicMatching {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

/// Positive-support edges plus edges to the null entity where slack is positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportGraph {
    pub edges: Vec<(usize, usize)>,
    pub agent_slack_edges: Vec<usize>,
    pub object_slack_edges: Vec<usize>,
}

pub fn support_graph(p: &RandomMatching) -> SupportGraph {
    let edges = (0..p.n)
        .flat_map(|i| (0..p.m).map(move |o| (i, o)))
        .filter(|&(i, o)| !p.get(i, o).is_zero())
        .collect();
    SupportGraph {
        edges,
        agent_slack_edges: (0..p.n).filter(|&i| p.agent_slack(i).is_positive()).collect(),
        object_slack_edges: (0..p.m).filter(|&o| p.object_slack(o).is_positive()).collect(),
    }
}

pub fn slack(p: &RandomMatching) -> SlackVector {
    p.slack()
}

pub fn is_deterministic(p: &RandomMatching) -> bool {
    p.is_deterministic()
}

/// Parses `<agent>: <obj>=<rat> ...` lines; omitted cells are zero.
pub fn parse_matching(text: &str, inst: &Instance, tier: ModelTier) -> Result<RandomMatching> {
    let (n, m) = (inst.n(), inst.m());
    let mut cells: Vec<Option<Rat>> = vec![None; n * m];
    let mut seen = vec![false; n];
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let syntax = |column: usize, message: String| Error::Syntax { line, column, message };
        let (head, body) = content
            .split_once(':')
            .ok_or_else(|| syntax(1, "expected `<agent>:`".to_string()))?;
        let agent = head.trim();
        let i = inst
            .agent_index(agent)
            .ok_or_else(|| Error::UnknownEntity(agent.to_string()))?;
        if std::mem::replace(&mut seen[i], true) {
            return Err(syntax(1, format!("second line for agent `{agent}`")));
        }
        let body_col = head.chars().count() + 2;
        let mut offset = 0;
        for word in body.split_whitespace() {
            let pos = body[offset..].find(word).map_or(offset, |p| p + offset);
            offset = pos + word.len();
            let column = body_col + body[..pos].chars().count();
            let (obj, value) = word
                .split_once('=')
                .ok_or_else(|| syntax(column, format!("expected `<object>=<rational>`, got `{word}`")))?;
            let o = inst
                .object_index(obj)
                .ok_or_else(|| syntax(column, format!("unknown object `{obj}`")))?;
            let r = parse_rat(value).ok_or_else(|| syntax(column, format!("bad rational `{value}`")))?;
            if cells[i * m + o].replace(r).is_some() {
                return Err(syntax(column, format!("cell ({agent}, {obj}) given twice")));
            }
        }
    }
    let p = RandomMatching::new(n, m, cells.into_iter().map(Option::unwrap_or_default).collect())?;
    p.validate_for(inst, tier)?;
    Ok(p)
}

/// Canonical text for a matching; every agent gets a line, zero cells are omitted.
pub fn render_matching(p: &RandomMatching, inst: &Instance) -> String {
    let mut out = String::new();
    for i in 0..p.n() {
        out.push_str(inst.agent_label(i));
        out.push(':');
        for o in 0..p.m() {
            let c = p.get(i, o);
            if !c.is_zero() {
                out.push_str(&format!(" {}={}", inst.object_label(o), c));
            }
        }
        out.push('\n');
    }
    out
}

pub(crate) fn check_cap(n: usize, m: usize, cap: usize) -> Result<()> {
    if n + m > cap {
        return Err(Error::CapExceeded { size: n + m, cap });
    }
    Ok(())
}

/// All matchings using only `allowed` cells, sorted by [`DeterministicMatching::key`].
///
/// With `perfect`, every agent and object is matched (requires `n == m`).
/// `may_skip(i)` says whether agent `i` may stay unmatched otherwise.
pub(crate) fn matchings_within(
    n: usize,
    m: usize,
    perfect: bool,
    allowed: &dyn Fn(usize, usize) -> bool,
    may_skip: &dyn Fn(usize) -> bool,
) -> Vec<DeterministicMatching> {
    struct Walk<'a> {
        m: usize,
        perfect: bool,
        allowed: &'a dyn Fn(usize, usize) -> bool,
        may_skip: &'a dyn Fn(usize) -> bool,
        taken: Vec<bool>,
        partner: Vec<Option<usize>>,
        out: Vec<DeterministicMatching>,
    }
    impl Walk<'_> {
        fn go(&mut self, i: usize, n: usize) {
            if i == n {
                self.out.push(DeterministicMatching::from_partner_unchecked(
                    self.m,
                    self.partner.clone(),
                ));
                return;
            }
            if !self.perfect && (self.may_skip)(i) {
                self.partner.push(None);
                self.go(i + 1, n);
                self.partner.pop();
            }
            for o in (0..self.m).rev() {
                if !self.taken[o] && (self.allowed)(i, o) {
                    self.taken[o] = true;
                    self.partner.push(Some(o));
                    self.go(i + 1, n);
                    self.partner.pop();
                    self.taken[o] = false;
                }
            }
        }
    }
    if perfect && n != m {
        return Vec::new();
    }
    let mut walk = Walk {
        m,
        perfect,
        allowed,
        may_skip,
        taken: vec![false; m],
        partner: Vec::with_capacity(n),
        out: Vec::new(),
    };
    walk.go(0, n);
    let mut out = walk.out;
    // The traversal already visits keys in ascending order; keep the sort as the contract.
    out.sort_by_cached_key(DeterministicMatching::key);
    out
}

/// Every deterministic matching of the tier (perfect for square tiers, partial otherwise).
pub fn enumerate_deterministic(
    inst: &Instance,
    stable_only: bool,
    tier: ModelTier,
    cap: usize,
) -> Result<Vec<DeterministicMatching>> {
    let (n, m) = (inst.n(), inst.m());
    check_cap(n, m, cap)?;
    let all = matchings_within(n, m, tier.is_square(), &|_, _| true, &|_| true);
    Ok(if stable_only {
        all.into_iter()
            .filter(|q| check_weakly_stable_det(inst, q, tier).is_ok())
            .collect()
    } else {
        all
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse_instance;
    use crate::rational::rat;

    fn square(n: usize) -> Instance {
        let objects: Vec<String> = (0..n).map(|k| format!("o{k}")).collect();
        let mut text = format!("agents: {n}\nobjects: {}\n", objects.join(" "));
        for i in 1..=n {
            text.push_str(&format!("pref {i}: {} > @\n", objects.join(" > ")));
        }
        for o in &objects {
            let agents: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
            text.push_str(&format!("prio {o}: {} > @\n", agents.join(" > ")));
        }
        parse_instance(&text).unwrap()
    }

    fn two_objects() -> Instance {
        parse_instance(
            "agents: 3\nobjects: x y\npref 1: x > y > @\npref 2: y > x > @\npref 3: x > @ > y\n\
             prio x: 2 > 3 > 1 > @\nprio y: 1 > 2 > @ > 3\n",
        )
        .unwrap()
    }

    #[test]
    fn uniform_is_bistochastic() {
        let inst = square(3);
        let text = "1: o0=1/3 o1=1/3 o2=1/3\n2: o0=1/3 o1=1/3 o2=1/3\n3: o0=1/3 o1=1/3 o2=1/3\n";
        let p = parse_matching(text, &inst, ModelTier::Base).unwrap();
        assert!(p.is_bistochastic());
        assert!(!p.is_deterministic());
        assert_eq!(render_matching(&p, &inst), text);
    }

    #[test]
    fn substochastic_matching_and_slack() {
        let inst = two_objects();
        let p = parse_matching("1: x=1/3 y=1/2\n2: y=1/2\n3: x=2/3\n", &inst, ModelTier::Generalized).unwrap();
        let s = p.slack();
        assert_eq!(s.agent_slack, vec![rat(1, 6), rat(1, 2), rat(1, 3)]);
        assert_eq!(s.object_slack, vec![zero(), zero()]);
        let g = p.support_graph();
        assert_eq!(g.edges, vec![(0, 0), (0, 1), (1, 1), (2, 0)]);
        assert_eq!(g.agent_slack_edges, vec![0, 1, 2]);
        assert!(g.object_slack_edges.is_empty());
    }

    #[test]
    fn rejects_invalid_matrices() {
        let inst = square(2);
        for bad in [
            "1: o0=1 o1=1/2\n2: o1=1/2\n",
            "1: o0=-1/2\n",
            "1: o0=1/2 o0=1/2\n",
            "3: o0=1\n",
            "1: o9=1\n",
            "1: o0=x\n",
            "1: o0=1\n1: o1=0\n",
        ] {
            assert!(parse_matching(bad, &inst, ModelTier::Generalized).is_err(), "{bad}");
        }
        // Valid substochastic but not bistochastic.
        assert!(parse_matching("1: o0=1/2\n", &inst, ModelTier::Generalized).is_ok());
        assert!(parse_matching("1: o0=1/2\n", &inst, ModelTier::Base).is_err());
    }

    #[test]
    fn zero_matrix_has_full_slack() {
        let p = RandomMatching::zeros(2, 2);
        assert_eq!(p.slack().agent_slack, vec![one(), one()]);
        assert_eq!(p.slack().object_slack, vec![one(), one()]);
        assert!(p.is_deterministic());
        assert_eq!(p.to_deterministic().unwrap().partners(), &[None, None]);
    }

    #[test]
    fn enumeration_counts() {
        for n in 0..=4 {
            let inst = square(n);
            let all = enumerate_deterministic(&inst, false, ModelTier::Base, DEFAULT_CAP).unwrap();
            assert_eq!(all.len(), (1..=n).product::<usize>());
            let partial = enumerate_deterministic(&inst, false, ModelTier::Generalized, DEFAULT_CAP).unwrap();
            // Σ_k C(n,k)² k!
            let expected = [1, 2, 7, 34, 209][n];
            assert_eq!(partial.len(), expected);
            assert!(partial.windows(2).all(|w| w[0].key() < w[1].key()));
        }
    }

    #[test]
    fn enumeration_respects_cap() {
        let inst = square(4);
        assert!(matches!(
            enumerate_deterministic(&inst, false, ModelTier::Base, 7),
            Err(Error::CapExceeded { size: 8, cap: 7 })
        ));
    }

    #[test]
    fn one_by_one_stable_matching_is_the_full_match() {
        let inst = square(1);
        let stable = enumerate_deterministic(&inst, true, ModelTier::Generalized, DEFAULT_CAP).unwrap();
        assert_eq!(stable.len(), 1);
        assert_eq!(stable[0].partners(), &[Some(0)]);
    }

    #[test]
    fn mixture_stays_valid() {
        let a = DeterministicMatching::from_pairs(2, 2, &[(0, 0), (1, 1)])
            .unwrap()
            .to_random();
        let b = DeterministicMatching::from_pairs(2, 2, &[(0, 1)]).unwrap().to_random();
        let mix = a.mix(&rat(1, 3), &b).unwrap();
        assert_eq!(mix.get(0, 1), &rat(2, 3));
        assert!(a.mix(&rat(4, 3), &b).is_err());
    }

    #[test]
    fn deterministic_validation() {
        assert!(DeterministicMatching::new(2, vec![Some(0), Some(0)]).is_err());
        assert!(DeterministicMatching::new(2, vec![Some(2)]).is_err());
        let q = DeterministicMatching::new(3, vec![Some(2), None]).unwrap();
        assert_eq!(q.holders(), vec![None, None, Some(0)]);
        assert_eq!(q.rows(), vec![vec![0, 0, 1], vec![0, 0, 0]]);
    }
}
