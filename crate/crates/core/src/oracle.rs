//! Brute-force verification of the search and the greedy allocation:
//! global-optimal partition search, exhaustive assignment search, and an
//! independent stability certificate.
//!
//! The oracle deliberately re-derives partition enumeration (recursive
//! insertion rather than growth strings) and stability checking from the
//! definitions instead of reusing the coalition-module predicates, so it
//! can catch bugs in them. Profits still come from the auction, which is
//! the value function of the game itself.

use crate::auction::{allocate, coalition_profit, feasible};
use crate::coalition::{bell_number, merge_and_split, Coalition, Partition};
use crate::error::{Error, Result};
use crate::scenario::ScenarioConfig;

/// Hard cap on the UAV count for exhaustive partition search.
pub const PARTITION_SEARCH_CAP: usize = 10;
/// Hard cap on either side of the exhaustive assignment search.
pub const ASSIGNMENT_SEARCH_CAP: usize = 8;

/// What the exhaustive searches found, next to what the algorithm achieved.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub best_partition: Partition,
    pub best_total_profit: f64,
    pub algorithm_total_profit: f64,
    /// Relative shortfall of the algorithm against the optimum (zero when
    /// the optimum is nonpositive).
    pub optimality_gap: f64,
    /// Whether the merge-and-split result passed the independent
    /// stability certificate.
    pub stability_certified: bool,
    pub partitions_evaluated: u64,
}

/// Recursive-insertion enumeration of every partition of `ids`.
fn all_partitions(ids: &[u32]) -> Vec<Vec<Vec<u32>>> {
    match ids.split_first() {
        None => vec![vec![]],
        Some((&first, rest)) => {
            let mut out = Vec::new();
            for sub in all_partitions(rest) {
                for i in 0..sub.len() {
                    let mut grown = sub.clone();
                    grown[i].push(first);
                    out.push(grown);
                }
                let mut fresh = sub;
                fresh.push(vec![first]);
                out.push(fresh);
            }
            out
        }
    }
}

fn to_partition(blocks: &[Vec<u32>]) -> Partition {
    Partition::new(blocks.iter().map(|b| Coalition::new(b.clone())).collect())
}

/// Evaluate the auction on every partition of the UAV set and compare the
/// best total profit with what merge-and-split reaches from singletons.
pub fn exhaustive_best_partition(scenario: &ScenarioConfig) -> Result<OracleReport> {
    let ids = scenario.uav_ids();
    if ids.len() > PARTITION_SEARCH_CAP {
        return Err(Error::EnumerationCap {
            n: ids.len(),
            cap: PARTITION_SEARCH_CAP,
        });
    }

    let mut best: Option<(f64, Partition)> = None;
    let mut evaluated = 0u64;
    for blocks in all_partitions(&ids) {
        let partition = to_partition(&blocks);
        let gamma = allocate(&partition, scenario)?.total_profit;
        evaluated += 1;
        let better = match &best {
            None => true,
            Some((g, p)) => gamma > *g || (gamma == *g && partition < *p),
        };
        if better {
            best = Some((gamma, partition));
        }
    }
    let (best_total_profit, best_partition) = best.expect("at least the empty partition");
    debug_assert_eq!(evaluated, bell_number(ids.len() as u32).unwrap_or(u64::MAX));

    let (stable_partition, outcome) =
        merge_and_split(Partition::singletons(&ids), scenario)?;
    let algorithm_total_profit = outcome.total_profit;
    let stability_certified = certify_stability(&stable_partition, scenario)?;

    let diff = best_total_profit - algorithm_total_profit;
    let optimality_gap = if best_total_profit > 1e-12 {
        diff / best_total_profit
    } else {
        0.0
    };
    Ok(OracleReport {
        best_partition,
        best_total_profit,
        algorithm_total_profit,
        optimality_gap,
        stability_certified,
        partitions_evaluated: evaluated,
    })
}

/// Best injective assignment of coalitions to cells over positive-profit
/// feasible pairs, by straight enumeration.
pub fn exhaustive_best_assignment(
    partition: &Partition,
    scenario: &ScenarioConfig,
) -> Result<(Vec<(Coalition, u32)>, f64)> {
    let coalitions = partition.coalitions();
    let cells = &scenario.cells;
    if coalitions.len() > ASSIGNMENT_SEARCH_CAP || cells.len() > ASSIGNMENT_SEARCH_CAP {
        return Err(Error::AssignmentCap {
            coalitions: coalitions.len(),
            cells: cells.len(),
            cap: ASSIGNMENT_SEARCH_CAP,
        });
    }

    // Profit matrix over positive-profit feasible pairs only.
    let mut profits: Vec<Vec<Option<f64>>> = Vec::with_capacity(coalitions.len());
    for coalition in coalitions {
        let mut row = Vec::with_capacity(cells.len());
        for cell in cells {
            let entry = if feasible(coalition, cell, scenario)? {
                let (_, _, profit) = coalition_profit(coalition, cell, scenario)?;
                (profit > 0.0).then_some(profit)
            } else {
                None
            };
            row.push(entry);
        }
        profits.push(row);
    }

    fn search(
        row: usize,
        used: &mut Vec<bool>,
        chosen: &mut Vec<Option<usize>>,
        profits: &[Vec<Option<f64>>],
        best: &mut (f64, Vec<Option<usize>>),
    ) {
        if row == profits.len() {
            let total: f64 = chosen
                .iter()
                .enumerate()
                .filter_map(|(r, c)| c.map(|c| profits[r][c].unwrap()))
                .sum();
            if total > best.0 {
                *best = (total, chosen.clone());
            }
            return;
        }
        chosen.push(None);
        search(row + 1, used, chosen, profits, best);
        chosen.pop();
        for c in 0..used.len() {
            if !used[c] && profits[row][c].is_some() {
                used[c] = true;
                chosen.push(Some(c));
                search(row + 1, used, chosen, profits, best);
                chosen.pop();
                used[c] = false;
            }
        }
    }

    let mut best = (0.0, vec![None; coalitions.len()]);
    let mut used = vec![false; cells.len()];
    let mut chosen = Vec::new();
    search(0, &mut used, &mut chosen, &profits, &mut best);

    let assignment = best
        .1
        .iter()
        .enumerate()
        .filter_map(|(r, c)| c.map(|c| (coalitions[r].clone(), cells[c].id)))
        .collect();
    Ok((assignment, best.0))
}

/// Independent merge-split stability certificate: enumerate every pairwise
/// merge and every split of one coalition directly from the definitions
/// and check that none strictly improves total profit.
pub fn certify_stability(partition: &Partition, scenario: &ScenarioConfig) -> Result<bool> {
    let gamma = allocate(partition, scenario)?.total_profit;
    let blocks: Vec<Vec<u32>> = partition
        .coalitions()
        .iter()
        .map(|c| c.members().to_vec())
        .collect();

    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            let mut merged: Vec<Vec<u32>> = Vec::new();
            for (k, b) in blocks.iter().enumerate() {
                if k != i && k != j {
                    merged.push(b.clone());
                }
            }
            let mut joint = blocks[i].clone();
            joint.extend_from_slice(&blocks[j]);
            merged.push(joint);
            if allocate(&to_partition(&merged), scenario)?.total_profit > gamma {
                return Ok(false);
            }
        }
    }

    for i in 0..blocks.len() {
        if blocks[i].len() < 2 {
            continue;
        }
        for sub in all_partitions(&blocks[i]) {
            if sub.len() < 2 {
                continue;
            }
            let mut split: Vec<Vec<u32>> = Vec::new();
            for (k, b) in blocks.iter().enumerate() {
                if k != i {
                    split.push(b.clone());
                }
            }
            split.extend(sub);
            if allocate(&to_partition(&split), scenario)?.total_profit > gamma {
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
    fn recursive_enumeration_matches_bell() {
        for n in 0..=7u32 {
            let ids: Vec<u32> = (1..=n).collect();
            assert_eq!(all_partitions(&ids).len() as u64, bell_number(n).unwrap());
        }
    }
}
