//! Dense exact simplex for `A x = b, x ≥ 0` with `b ≥ 0`.
//!
//! Phase I uses one artificial variable per row and Bland's rule. The feasible-basis
//! walk enumerates every vertex of the feasible region by exploring all pivots that
//! keep the basis feasible (the feasible-basis graph is connected).

use std::collections::{BTreeSet, HashSet, VecDeque};

use num_traits::{Signed, Zero};

use crate::rational::Rat;

#[derive(Clone, Debug)]
pub(crate) struct Tableau {
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
    /// Reduced costs of the phase-I objective.
    cost: Vec<Rat>,
    structural: usize,
}

impl Tableau {
    fn new(a: &[Vec<Rat>], b: &[Rat], structural: usize) -> Tableau {
        let r = a.len();
        let cols = structural + r;
        let mut rows = Vec::with_capacity(r);
        let mut cost = vec![Rat::zero(); cols];
        for (k, row) in a.iter().enumerate() {
            let mut full = Vec::with_capacity(cols);
            full.extend(row.iter().cloned());
            full.extend((0..r).map(|c| {
                if c == k {
                    Rat::from_integer(1.into())
                } else {
                    Rat::zero()
                }
            }));
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    cost[j] -= v;
                }
            }
            rows.push(full);
        }
        Tableau {
            rows,
            rhs: b.to_vec(),
            basis: (structural..structural + r).collect(),
            cost,
            structural,
        }
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let inv = self.rows[pr][pc].recip();
        let nz: Vec<usize> = (0..self.rows[pr].len())
            .filter(|&j| !self.rows[pr][j].is_zero())
            .collect();
        for &j in &nz {
            self.rows[pr][j] *= &inv;
        }
        self.rhs[pr] *= &inv;
        let prow: Vec<(usize, Rat)> = nz.iter().map(|&j| (j, self.rows[pr][j].clone())).collect();
        let prhs = self.rhs[pr].clone();
        for r in 0..self.rows.len() {
            if r == pr || self.rows[r][pc].is_zero() {
                continue;
            }
            let f = self.rows[r][pc].clone();
            for (j, v) in &prow {
                self.rows[r][*j] -= &f * v;
            }
            self.rhs[r] -= &f * &prhs;
        }
        if !self.cost[pc].is_zero() {
            let f = self.cost[pc].clone();
            for (j, v) in &prow {
                self.cost[*j] -= &f * v;
            }
        }
        self.basis[pr] = pc;
    }

    /// Runs phase I to optimality; returns whether the system is feasible.
    fn phase_one(&mut self) -> bool {
        while let Some(pc) = (0..self.cost.len()).find(|&j| self.cost[j].is_negative()) {
            let mut best: Option<(usize, Rat)> = None;
            for r in 0..self.rows.len() {
                let t = &self.rows[r][pc];
                if !t.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / t;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            // Phase I is bounded below by zero, so an entering column always has a pivot row.
            let (pr, _) = best.expect("phase I cannot be unbounded");
            self.pivot(pr, pc);
        }
        self.rows
            .iter()
            .enumerate()
            .all(|(r, _)| self.basis[r] < self.structural || self.rhs[r].is_zero())
    }

    /// Pivots zero-level artificials out of the basis and drops rows that turn out redundant.
    fn expel_artificials(&mut self) {
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= self.structural {
                match (0..self.structural).find(|&j| !self.rows[r][j].is_zero()) {
                    Some(j) => self.pivot(r, j),
                    None => {
                        self.rows.remove(r);
                        self.rhs.remove(r);
                        self.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    fn solution(&self) -> Vec<Rat> {
        let mut x = vec![Rat::zero(); self.structural];
        for (r, &j) in self.basis.iter().enumerate() {
            if j < self.structural {
                x[j] = self.rhs[r].clone();
            }
        }
        x
    }
}

/// A nonnegative solution of `A x = b`, if one exists. Requires `b ≥ 0`.
pub(crate) fn feasible_point(a: &[Vec<Rat>], b: &[Rat], structural: usize) -> Option<Vec<Rat>> {
    debug_assert!(b.iter().all(|v| !v.is_negative()));
    let mut t = Tableau::new(a, b, structural);
    t.phase_one().then(|| t.solution())
}

/// Every vertex of `{x ≥ 0 : A x = b}`, or `None` if more than `limit` bases are visited.
pub(crate) fn vertices(a: &[Vec<Rat>], b: &[Rat], structural: usize, limit: usize) -> Option<Vec<Vec<Rat>>> {
    let mut start = Tableau::new(a, b, structural);
    if !start.phase_one() {
        return Some(Vec::new());
    }
    start.expel_artificials();
    let key = |t: &Tableau| {
        let mut k = t.basis.clone();
        k.sort_unstable();
        k
    };
    let mut seen: HashSet<Vec<usize>> = HashSet::from([key(&start)]);
    let mut found: BTreeSet<Vec<Rat>> = BTreeSet::new();
    let mut queue = VecDeque::from([start]);
    while let Some(t) = queue.pop_front() {
        found.insert(t.solution());
        let basic: HashSet<usize> = t.basis.iter().copied().collect();
        for j in (0..structural).filter(|j| !basic.contains(j)) {
            let min_ratio = t
                .rows
                .iter()
                .enumerate()
                .filter(|(_, row)| row[j].is_positive())
                .map(|(r, row)| &t.rhs[r] / &row[j])
                .min();
            for r in 0..t.rows.len() {
                let v = &t.rows[r][j];
                let ok = if t.rhs[r].is_zero() {
                    !v.is_zero()
                } else {
                    v.is_positive() && min_ratio.as_ref() == Some(&(&t.rhs[r] / v))
                };
                if !ok {
                    continue;
                }
                let mut next_basis = t.basis.clone();
                next_basis[r] = j;
                next_basis.sort_unstable();
                if seen.insert(next_basis) {
                    if seen.len() > limit {
                        return None;
                    }
                    let mut next = t.clone();
                    next.pivot(r, j);
                    queue.push_back(next);
                }
            }
        }
    }
    Some(found.into_iter().collect())
}
