//! Coalitions and partitions of the UAV set, Bell counting and set-partition
//! enumeration, nearest-first iteration scheduling, and the merge-and-split
//! search for a stable partition.

use std::fmt;
use std::str::FromStr;

use crate::auction::{self, AuctionOutcome};
use crate::error::{Error, Result};
use crate::radio::max_iterations;
use crate::scenario::{distance, selected_worker_count, CellSpec, ScenarioConfig};

/// Default cap on exhaustive set-partition enumeration.
pub const ENUMERATION_CAP: usize = 10;

/// A non-empty set of UAV ids acting as one seller. Members are kept sorted
/// ascending so equality and ordering are structural.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coalition {
    members: Vec<u32>,
}

impl Coalition {
    /// Build from any id collection; sorts and deduplicates.
    pub fn new(mut members: Vec<u32>) -> Coalition {
        members.sort_unstable();
        members.dedup();
        assert!(!members.is_empty(), "coalition cannot be empty");
        Coalition { members }
    }

    pub fn singleton(id: u32) -> Coalition {
        Coalition { members: vec![id] }
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_multi(&self) -> bool {
        self.members.len() >= 2
    }

    pub fn contains(&self, id: u32) -> bool {
        self.members.binary_search(&id).is_ok()
    }

    /// Union of two disjoint coalitions.
    pub fn merged(&self, other: &Coalition) -> Coalition {
        let mut members = self.members.clone();
        members.extend_from_slice(&other.members);
        Coalition::new(members)
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "}}")
    }
}

impl FromStr for Coalition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Coalition> {
        let inner = s
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| Error::Parse(format!("coalition `{s}` not brace-delimited")))?;
        let members = inner
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::Parse(format!("coalition member `{tok}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if members.is_empty() {
            return Err(Error::Parse("empty coalition".into()));
        }
        Ok(Coalition::new(members))
    }
}

/// A set of disjoint coalitions covering every UAV. Coalitions are kept in
/// canonical (ascending member) order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition {
    coalitions: Vec<Coalition>,
}

impl Partition {
    pub fn new(mut coalitions: Vec<Coalition>) -> Partition {
        coalitions.sort();
        Partition { coalitions }
    }

    /// Every UAV alone.
    pub fn singletons(ids: &[u32]) -> Partition {
        Partition::new(ids.iter().map(|&m| Coalition::singleton(m)).collect())
    }

    /// All UAVs in one coalition.
    pub fn grand(ids: &[u32]) -> Partition {
        Partition::new(vec![Coalition::new(ids.to_vec())])
    }

    pub fn coalitions(&self) -> &[Coalition] {
        &self.coalitions
    }

    pub fn len(&self) -> usize {
        self.coalitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coalitions.is_empty()
    }

    pub fn max_coalition_size(&self) -> usize {
        self.coalitions.iter().map(Coalition::len).max().unwrap_or(0)
    }

    /// Check disjointness and that the union equals `ids`.
    pub fn is_valid_over(&self, ids: &[u32]) -> bool {
        let mut covered: Vec<u32> = self
            .coalitions
            .iter()
            .flat_map(|c| c.members().iter().copied())
            .collect();
        covered.sort_unstable();
        let mut expect = ids.to_vec();
        expect.sort_unstable();
        expect.dedup();
        covered.windows(2).all(|w| w[0] != w[1]) && covered == expect
    }

    /// Replace the two coalitions at `i` and `j` by their union.
    fn with_merged(&self, i: usize, j: usize) -> Partition {
        let mut rest: Vec<Coalition> = Vec::with_capacity(self.coalitions.len() - 1);
        for (k, c) in self.coalitions.iter().enumerate() {
            if k != i && k != j {
                rest.push(c.clone());
            }
        }
        rest.push(self.coalitions[i].merged(&self.coalitions[j]));
        Partition::new(rest)
    }

    /// Replace the coalition at `i` by the blocks of `sub`.
    fn with_split(&self, i: usize, sub: &[Coalition]) -> Partition {
        let mut rest: Vec<Coalition> = Vec::with_capacity(self.coalitions.len() + sub.len() - 1);
        for (k, c) in self.coalitions.iter().enumerate() {
            if k != i {
                rest.push(c.clone());
            }
        }
        rest.extend(sub.iter().cloned());
        Partition::new(rest)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.coalitions.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Partition> {
        let inner = s
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| Error::Parse(format!("partition `{s}` not brace-delimited")))?;
        let mut coalitions = Vec::new();
        let mut depth = 0usize;
        let mut start = None;
        for (i, ch) in inner.char_indices() {
            match ch {
                '{' => {
                    if depth == 0 {
                        start = Some(i);
                    }
                    depth += 1;
                }
                '}' => {
                    depth = depth.checked_sub(1).ok_or_else(|| {
                        Error::Parse(format!("unbalanced braces in partition `{s}`"))
                    })?;
                    if depth == 0 {
                        let st = start.take().expect("open brace recorded");
                        coalitions.push(inner[st..=i].parse::<Coalition>()?);
                    }
                }
                _ => {}
            }
        }
        if depth != 0 {
            return Err(Error::Parse(format!("unbalanced braces in partition `{s}`")));
        }
        Ok(Partition::new(coalitions))
    }
}

/// Bell number D_u via the binomial recurrence
/// D_u = sum_{j=0}^{u-1} C(u-1, j) D_j, D_0 = 1.
pub fn bell_number(u: u32) -> Result<u64> {
    let n = u as usize;
    let mut bell: Vec<u64> = Vec::with_capacity(n + 1);
    bell.push(1);
    for k in 1..=n {
        // C(k-1, j) built incrementally alongside the sum.
        let mut binom: u64 = 1;
        let mut sum: u64 = bell[0];
        for (j, &b_j) in bell.iter().enumerate().take(k).skip(1) {
            binom = binom
                .checked_mul((k - j) as u64)
                .map(|b| b / j as u64)
                .ok_or(Error::BellOverflow(u))?;
            let term = binom.checked_mul(b_j).ok_or(Error::BellOverflow(u))?;
            sum = sum.checked_add(term).ok_or(Error::BellOverflow(u))?;
        }
        bell.push(sum);
    }
    Ok(bell[n])
}

/// Iterator over every set partition of `ids`, in restricted-growth-string
/// order. Yields exactly `bell_number(ids.len())` partitions.
pub struct PartitionIter {
    ids: Vec<u32>,
    /// Restricted growth string; rgs[i] is the block index of ids[i].
    rgs: Vec<usize>,
    done: bool,
}

impl Iterator for PartitionIter {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let current = self.materialize();
        // Advance: rightmost position whose block index may still grow
        // (rgs[i] <= max of the prefix) increments; everything after resets.
        let n = self.rgs.len();
        self.done = true;
        for i in (1..n).rev() {
            let prefix_max = *self.rgs[..i].iter().max().expect("nonempty prefix");
            if self.rgs[i] <= prefix_max {
                self.rgs[i] += 1;
                for slot in &mut self.rgs[i + 1..] {
                    *slot = 0;
                }
                self.done = false;
                break;
            }
        }
        Some(current)
    }
}

impl PartitionIter {
    fn materialize(&self) -> Partition {
        let blocks = self.rgs.iter().max().map_or(0, |m| m + 1);
        let mut groups: Vec<Vec<u32>> = vec![Vec::new(); blocks];
        for (i, &b) in self.rgs.iter().enumerate() {
            groups[b].push(self.ids[i]);
        }
        Partition::new(groups.into_iter().map(Coalition::new).collect())
    }
}

/// Enumerate every set partition of `ids` exactly once, deterministically.
pub fn enumerate_partitions(ids: &[u32]) -> Result<PartitionIter> {
    enumerate_partitions_with_cap(ids, ENUMERATION_CAP)
}

/// As [`enumerate_partitions`] with an explicit element cap.
pub fn enumerate_partitions_with_cap(ids: &[u32], cap: usize) -> Result<PartitionIter> {
    if ids.len() > cap {
        return Err(Error::EnumerationCap { n: ids.len(), cap });
    }
    let mut ids = ids.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let n = ids.len();
    Ok(PartitionIter {
        ids,
        rgs: vec![0; n],
        done: false,
    })
}

/// Which UAV runs how many iterations for a cell, in takeover order.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationSchedule {
    pub cell_id: u32,
    /// (uav id, iterations), sorted by ascending travel time; UAVs that
    /// never take over are omitted.
    pub assignments: Vec<(u32, u32)>,
}

impl IterationSchedule {
    pub fn total_iterations(&self) -> u32 {
        self.assignments.iter().map(|(_, n)| n).sum()
    }

    pub fn iterations_for(&self, uav_id: u32) -> u32 {
        self.assignments
            .iter()
            .find(|(m, _)| *m == uav_id)
            .map_or(0, |(_, n)| *n)
    }
}

/// Nearest-first takeover schedule: training starts when the nearest member
/// arrives; each member runs until its budget is spent or the remaining
/// iteration count hits zero, then the next-nearest takes over.
pub fn schedule_iterations(
    coalition: &Coalition,
    cell: &CellSpec,
    scenario: &ScenarioConfig,
) -> Result<IterationSchedule> {
    let workers = selected_worker_count(cell, scenario.game.importance_threshold);
    let multi = coalition.is_multi();
    let mut order: Vec<(f64, u32)> = coalition
        .members()
        .iter()
        .map(|&m| {
            let uav = scenario.uav(m)?;
            Ok((distance(uav.depot, cell.position) / uav.velocity_mps, m))
        })
        .collect::<Result<Vec<_>>>()?;
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

    let mut remaining = scenario.game.required_iterations;
    let mut assignments = Vec::new();
    for (_, m) in order {
        if remaining == 0 {
            break;
        }
        let uav = scenario.uav(m)?;
        let cap = max_iterations(uav, cell, &scenario.radio, workers, multi)?;
        let n = cap.min(remaining);
        if n > 0 {
            assignments.push((m, n));
            remaining -= n;
        }
    }
    Ok(IterationSchedule {
        cell_id: cell.id,
        assignments,
    })
}

/// One committed (or initial/final) step of the merge-and-split search.
#[derive(Debug, Clone)]
pub enum SearchEvent {
    /// Search started; carries the initial partition and its allocation.
    Initial {
        partition: Partition,
        outcome: AuctionOutcome,
    },
    /// A pairwise merge strictly improved total profit.
    Merge {
        first: Coalition,
        second: Coalition,
        before: Partition,
        after: Partition,
        gamma_before: f64,
        gamma_after: f64,
    },
    /// Splitting one coalition strictly improved total profit.
    Split {
        coalition: Coalition,
        parts: Vec<Coalition>,
        before: Partition,
        after: Partition,
        gamma_before: f64,
        gamma_after: f64,
    },
    /// Fixed point reached.
    Final {
        partition: Partition,
        outcome: AuctionOutcome,
    },
}

/// Merge-and-split from `initial` until no pairwise merge and no split of a
/// single coalition strictly improves the total profit.
///
/// Candidate order is deterministic: merge pairs scan in lexicographic order
/// of canonical coalitions (restarting after each commit), splits scan each
/// coalition's sub-partitions in enumeration order. Moves that leave the
/// profit unchanged are rejected, so the profit sequence strictly increases
/// and the search terminates.
pub fn merge_and_split(
    initial: Partition,
    scenario: &ScenarioConfig,
) -> Result<(Partition, AuctionOutcome)> {
    merge_and_split_observed(initial, scenario, |_| {})
}

/// As [`merge_and_split`], reporting each committed move to `observer`.
pub fn merge_and_split_observed(
    initial: Partition,
    scenario: &ScenarioConfig,
    mut observer: impl FnMut(&SearchEvent),
) -> Result<(Partition, AuctionOutcome)> {
    let mut partition = initial;
    let mut outcome = auction::allocate(&partition, scenario)?;
    observer(&SearchEvent::Initial {
        partition: partition.clone(),
        outcome: outcome.clone(),
    });

    loop {
        let mut changed = false;

        // Merge phase: first strictly improving pair commits, then rescan.
        'merge: loop {
            let n = partition.len();
            for i in 0..n {
                for j in i + 1..n {
                    let candidate = partition.with_merged(i, j);
                    let trial = auction::allocate(&candidate, scenario)?;
                    if trial.total_profit > outcome.total_profit {
                        observer(&SearchEvent::Merge {
                            first: partition.coalitions()[i].clone(),
                            second: partition.coalitions()[j].clone(),
                            before: partition.clone(),
                            after: candidate.clone(),
                            gamma_before: outcome.total_profit,
                            gamma_after: trial.total_profit,
                        });
                        partition = candidate;
                        outcome = trial;
                        changed = true;
                        continue 'merge;
                    }
                }
            }
            break;
        }

        // Split phase: first strictly improving sub-partition commits.
        'split: loop {
            let n = partition.len();
            for i in 0..n {
                let coalition = &partition.coalitions()[i];
                if !coalition.is_multi() {
                    continue;
                }
                for sub in enumerate_partitions_with_cap(coalition.members(), usize::MAX)? {
                    if sub.len() < 2 {
                        continue; // the identity split changes nothing
                    }
                    let candidate = partition.with_split(i, sub.coalitions());
                    let trial = auction::allocate(&candidate, scenario)?;
                    if trial.total_profit > outcome.total_profit {
                        observer(&SearchEvent::Split {
                            coalition: coalition.clone(),
                            parts: sub.coalitions().to_vec(),
                            before: partition.clone(),
                            after: candidate.clone(),
                            gamma_before: outcome.total_profit,
                            gamma_after: trial.total_profit,
                        });
                        partition = candidate;
                        outcome = trial;
                        changed = true;
                        continue 'split;
                    }
                }
            }
            break;
        }

        if !changed {
            break;
        }
    }

    observer(&SearchEvent::Final {
        partition: partition.clone(),
        outcome: outcome.clone(),
    });
    Ok((partition, outcome))
}

/// True iff no pairwise merge and no split of one coalition strictly
/// increases total profit under the auction allocation.
pub fn is_merge_split_stable(partition: &Partition, scenario: &ScenarioConfig) -> Result<bool> {
    let gamma = auction::allocate(partition, scenario)?.total_profit;
    let n = partition.len();
    for i in 0..n {
        for j in i + 1..n {
            let trial = auction::allocate(&partition.with_merged(i, j), scenario)?;
            if trial.total_profit > gamma {
                return Ok(false);
            }
        }
    }
    for i in 0..n {
        let coalition = &partition.coalitions()[i];
        if !coalition.is_multi() {
            continue;
        }
        for sub in enumerate_partitions_with_cap(coalition.members(), usize::MAX)? {
            if sub.len() < 2 {
                continue;
            }
            let trial = auction::allocate(&partition.with_split(i, sub.coalitions()), scenario)?;
            if trial.total_profit > gamma {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_reference_values() {
        assert_eq!(bell_number(0).unwrap(), 1);
        assert_eq!(bell_number(1).unwrap(), 1);
        assert_eq!(bell_number(2).unwrap(), 2);
        assert_eq!(bell_number(6).unwrap(), 203);
        assert_eq!(bell_number(8).unwrap(), 4140);
        assert!(bell_number(40).is_err());
    }

    #[test]
    fn enumeration_counts_match_bell() {
        assert_eq!(enumerate_partitions(&[1]).unwrap().count(), 1);
        let two: Vec<_> = enumerate_partitions(&[1, 2]).unwrap().collect();
        assert_eq!(two.len(), 2);
        assert!(two.contains(&Partition::singletons(&[1, 2])));
        assert!(two.contains(&Partition::grand(&[1, 2])));
        for n in 0..=8u32 {
            let ids: Vec<u32> = (1..=n).collect();
            let count = enumerate_partitions(&ids).unwrap().count() as u64;
            assert_eq!(count, bell_number(n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn enumeration_is_unique_and_covering() {
        let ids = [1u32, 2, 5, 9];
        let all: Vec<Partition> = enumerate_partitions(&ids).unwrap().collect();
        for p in &all {
            assert!(p.is_valid_over(&ids), "{p}");
        }
        let mut dedup = all.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), all.len());
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let ids: Vec<u32> = (1..=11).collect();
        assert!(enumerate_partitions(&ids).is_err());
    }

    #[test]
    fn canonical_strings_round_trip() {
        let p: Partition = "{{1,3},{2},{4},{5},{6}}".parse().unwrap();
        assert_eq!(p.to_string(), "{{1,3},{2},{4},{5},{6}}");
        assert_eq!(p.len(), 5);
        let c: Coalition = "{2,6}".parse().unwrap();
        assert_eq!(c.members(), &[2, 6]);
        assert!("{}".parse::<Coalition>().is_err());
        assert!("1,2".parse::<Partition>().is_err());
    }
}
