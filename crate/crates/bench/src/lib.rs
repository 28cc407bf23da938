//! Shared fixtures for the benchmarks.

use matchstab::audit::{gen_instance, gen_matching, AuditConfig};
use matchstab::{Instance, ModelTier, RandomMatching};

/// Generated `(instance, matching)` pairs of one tier with exactly `n` agents and objects.
pub fn samples(tier: ModelTier, n: usize, count: usize) -> Vec<(Instance, RandomMatching)> {
    let mut cfg = AuditConfig::with_max(7, count, n);
    cfg.n = n..=n;
    cfg.m = n..=n;
    cfg.tiers = vec![tier];
    (0..count)
        .map(|k| {
            let inst = gen_instance(&cfg, tier, k);
            let p = gen_matching(&inst, &cfg, tier, k);
            (inst, p)
        })
        .collect()
}

/// Enumeration cap large enough for the associated instance of an `n x n` market.
pub fn cap(n: usize) -> usize {
    (4 * n).max(matchstab::DEFAULT_CAP)
}
