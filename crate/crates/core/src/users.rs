//! Who uses the hashtags of a cluster: top-user sets, the top user score and
//! unique-user ratios.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// The `ceil(fraction * U)` heaviest users of one hashtag, `U` being the
/// number of distinct users. Equal counts are ordered by user id.
pub fn top_users<U: Ord + Clone>(usage: &BTreeMap<U, u64>, fraction: f64) -> Result<BTreeSet<U>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(invalid("top-user fraction must lie in (0, 1]"));
    }
    let users = usage.iter().filter(|(_, &c)| c > 0).count();
    // Guard against e.g. 0.1 * 30 = 3.0000000000000004 rounding up to 4.
    let keep = libm::ceil(fraction * users as f64 - 1e-9).max(0.0) as usize;
    let mut ranked: Vec<(&U, u64)> = usage
        .iter()
        .filter(|(_, &c)| c > 0)
        .map(|(u, &c)| (u, c))
        .collect();
    // BTreeMap iteration is already id-ordered; a stable sort keeps that for ties.
    ranked.sort_by_key(|&(_, c)| core::cmp::Reverse(c));
    Ok(ranked
        .into_iter()
        .take(keep.min(users))
        .map(|(u, _)| u.clone())
        .collect())
}

/// Size of the union of the per-hashtag top-user sets over the sum of
/// their sizes. 1 means no two hashtags share a top user.
pub fn top_user_score<U: Ord>(top_user_sets: &[BTreeSet<U>]) -> Result<f64> {
    let total: usize = top_user_sets.iter().map(BTreeSet::len).sum();
    if total == 0 {
        return Err(invalid("top user score needs at least one top user"));
    }
    let union: BTreeSet<&U> = top_user_sets.iter().flatten().collect();
    Ok(union.len() as f64 / total as f64)
}

/// Distinct users over total uses of one hashtag.
pub fn unique_user_ratio<U: Ord>(usage: &BTreeMap<U, u64>) -> Result<f64> {
    let uses: u64 = usage.values().sum();
    if uses == 0 {
        return Err(invalid("unique user ratio of an unused hashtag"));
    }
    let users = usage.values().filter(|&&c| c > 0).count();
    Ok(users as f64 / uses as f64)
}
