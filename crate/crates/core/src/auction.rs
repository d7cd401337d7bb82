//! The sealed-bid auction between cells (buyers) and UAV coalitions
//! (sellers): valuations, feasibility, payments, costs, profits, and the
//! allocation of coalitions to cells for a given partition.
//!
//! Two payment rules are supported. `BidPrice` runs the greedy round-based
//! allocation: every unallocated coalition targets its highest-profit
//! remaining cell, contested cells go to the coalition the cell bids most
//! for, and the winner collects its own bid. `SecondPrice` treats each
//! coalition as one sealed-bid auction over the full bid table: only the
//! top-bidding cell can win a coalition and it pays the highest competing
//! bid (its own bid when it stands alone), which is what gives the
//! mechanism individual rationality and truthfulness. In both modes a
//! coalition only accepts an allocation with strictly positive profit.

use std::collections::BTreeMap;

use crate::coalition::{schedule_iterations, Coalition, IterationSchedule, Partition};
use crate::error::{Error, Result};
use crate::radio::{flying_energy, max_iterations, per_iteration_energy};
use crate::scenario::{
    cell_importance, distance, selected_worker_count, CellSpec, PaymentRule, ScenarioConfig,
};

/// Floor on the farthest-member travel time so a UAV parked on the cell
/// does not blow up the latency term.
pub const MIN_TRAVEL_TIME_S: f64 = 1e-6;

/// A cell's sealed bid for one coalition. Bids exist only for feasible
/// (coalition, cell) pairs and equal the cell's true valuation.
#[derive(Debug, Clone, PartialEq)]
pub struct Bid {
    pub cell_id: u32,
    pub coalition: Coalition,
    pub value: f64,
}

/// One allocated (coalition, cell) pair with its iteration schedule and the
/// winning bid it was allocated under.
#[derive(Debug, Clone)]
pub struct AllocatedPair {
    pub coalition: Coalition,
    pub cell_id: u32,
    pub schedule: IterationSchedule,
    /// The allocated cell's bid for this coalition.
    pub bid_value: f64,
}

/// Result of allocating one partition: the matching, the money, and who was
/// left out.
#[derive(Debug, Clone, Default)]
pub struct AuctionOutcome {
    pub allocation: Vec<AllocatedPair>,
    pub payments: BTreeMap<Coalition, f64>,
    pub coalition_costs: BTreeMap<Coalition, f64>,
    pub coalition_profits: BTreeMap<Coalition, f64>,
    pub total_profit: f64,
    pub unallocated_coalitions: Vec<Coalition>,
    pub unserved_cells: Vec<u32>,
}

impl AuctionOutcome {
    pub fn allocated_cell(&self, coalition: &Coalition) -> Option<u32> {
        self.allocation
            .iter()
            .find(|a| &a.coalition == coalition)
            .map(|a| a.cell_id)
    }
}

/// Farthest-member travel time to the cell, each UAV at its own velocity.
pub fn coalition_travel_time(
    coalition: &Coalition,
    cell: &CellSpec,
    scenario: &ScenarioConfig,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &m in coalition.members() {
        let uav = scenario.uav(m)?;
        worst = worst.max(distance(uav.depot, cell.position) / uav.velocity_mps);
    }
    Ok(worst.max(MIN_TRAVEL_TIME_S))
}

/// A cell's valuation of a coalition: theta1 * q * sigma plus a latency
/// term that decays with the farthest member's travel time.
pub fn valuation(cell: &CellSpec, coalition: &Coalition, scenario: &ScenarioConfig) -> Result<f64> {
    let sigma = cell_importance(cell, scenario.game.importance_threshold);
    let t = coalition_travel_time(coalition, cell, scenario)?;
    Ok(scenario.game.weight_importance * cell.price_per_importance * sigma
        + scenario.game.weight_latency * scenario.game.latency_scale_s / t)
}

/// A coalition can serve a cell iff its members' combined iteration budget
/// covers the required count.
pub fn feasible(coalition: &Coalition, cell: &CellSpec, scenario: &ScenarioConfig) -> Result<bool> {
    let workers = selected_worker_count(cell, scenario.game.importance_threshold);
    let multi = coalition.is_multi();
    let mut capacity: u64 = 0;
    for &m in coalition.members() {
        let uav = scenario.uav(m)?;
        capacity += u64::from(max_iterations(uav, cell, &scenario.radio, workers, multi)?);
    }
    Ok(capacity >= u64::from(scenario.game.required_iterations))
}

/// Truthful bids for every feasible (cell, coalition) pair, ordered by cell
/// id then canonical coalition order.
pub fn collect_bids(partition: &Partition, scenario: &ScenarioConfig) -> Result<Vec<Bid>> {
    let mut bids = Vec::new();
    for cell in &scenario.cells {
        for coalition in partition.coalitions() {
            if feasible(coalition, cell, scenario)? {
                bids.push(Bid {
                    cell_id: cell.id,
                    coalition: coalition.clone(),
                    value: valuation(cell, coalition, scenario)?,
                });
            }
        }
    }
    Ok(bids)
}

/// Price the winning cell pays for one coalition, from that coalition's bid
/// list. Under `SecondPrice` the winner pays the highest competing bid, or
/// its own bid when no other cell bid.
pub fn payment(bids_for_coalition: &[Bid], winner: u32, rule: PaymentRule) -> Result<f64> {
    if bids_for_coalition.is_empty() {
        return Err(Error::Payment("no bids submitted".into()));
    }
    let own = bids_for_coalition
        .iter()
        .find(|b| b.cell_id == winner)
        .ok_or_else(|| Error::Payment(format!("winner cell {winner} did not bid")))?
        .value;
    match rule {
        PaymentRule::BidPrice => Ok(own),
        PaymentRule::SecondPrice => {
            let best_other = bids_for_coalition
                .iter()
                .filter(|b| b.cell_id != winner)
                .map(|b| b.value)
                .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));
            Ok(best_other.unwrap_or(own))
        }
    }
}

/// Energy-priced cost of a coalition serving a cell under a given schedule:
/// every member pays its round-trip flight and, in a multi-UAV coalition,
/// its cooperation cost, whether or not it runs any iterations; scheduled
/// iterations are charged at the per-iteration energy.
pub fn coalition_cost(
    coalition: &Coalition,
    cell: &CellSpec,
    schedule: &IterationSchedule,
    scenario: &ScenarioConfig,
) -> Result<f64> {
    let workers = selected_worker_count(cell, scenario.game.importance_threshold);
    let multi = coalition.is_multi();
    let mut total = 0.0;
    for &m in coalition.members() {
        let uav = scenario.uav(m)?;
        total += uav.energy_price_per_j * 2.0 * flying_energy(uav, cell, &scenario.radio);
        if multi {
            total += uav.cooperation_cost_j;
        }
        let n = schedule.iterations_for(m);
        if n > 0 {
            let per = per_iteration_energy(uav, &scenario.radio, workers)?.total();
            total += uav.energy_price_per_j * f64::from(n) * per;
        }
    }
    Ok(total)
}

/// Revenue, cost, and profit of one feasible (coalition, cell) pair,
/// evaluated against the current truthful bids under the configured
/// payment rule.
pub fn coalition_profit(
    coalition: &Coalition,
    cell: &CellSpec,
    scenario: &ScenarioConfig,
) -> Result<(f64, f64, f64)> {
    if !feasible(coalition, cell, scenario)? {
        return Err(Error::InfeasiblePair {
            coalition: coalition.to_string(),
            cell: cell.id,
        });
    }
    let mut bids = Vec::new();
    for c in &scenario.cells {
        if feasible(coalition, c, scenario)? {
            bids.push(Bid {
                cell_id: c.id,
                coalition: coalition.clone(),
                value: valuation(c, coalition, scenario)?,
            });
        }
    }
    let revenue = payment(&bids, cell.id, scenario.game.payment_rule)?;
    let schedule = schedule_iterations(coalition, cell, scenario)?;
    let cost = coalition_cost(coalition, cell, &schedule, scenario)?;
    Ok((revenue, cost, revenue - cost))
}

/// Allocate coalitions of `partition` to cells under the configured payment
/// rule with truthful bids.
pub fn allocate(partition: &Partition, scenario: &ScenarioConfig) -> Result<AuctionOutcome> {
    let bids = collect_bids(partition, scenario)?;
    allocate_with_bids(partition, &bids, scenario)
}

/// Allocate against an explicit bid table. Exposed so property tests can
/// perturb individual bids; `allocate` feeds it the truthful table.
pub fn allocate_with_bids(
    partition: &Partition,
    bids: &[Bid],
    scenario: &ScenarioConfig,
) -> Result<AuctionOutcome> {
    match scenario.game.payment_rule {
        PaymentRule::BidPrice => allocate_bid_price(partition, bids, scenario),
        PaymentRule::SecondPrice => allocate_second_price(partition, bids, scenario),
    }
}

struct Proposal {
    coalition: Coalition,
    cell_id: u32,
    bid_value: f64,
    payment: f64,
    cost: f64,
    profit: f64,
}

fn commit(outcome: &mut AuctionOutcome, p: Proposal, scenario: &ScenarioConfig) -> Result<()> {
    let cell = scenario.cell(p.cell_id)?;
    let schedule = schedule_iterations(&p.coalition, cell, scenario)?;
    outcome.payments.insert(p.coalition.clone(), p.payment);
    outcome.coalition_costs.insert(p.coalition.clone(), p.cost);
    outcome.coalition_profits.insert(p.coalition.clone(), p.profit);
    outcome.total_profit += p.profit;
    outcome.allocation.push(AllocatedPair {
        coalition: p.coalition,
        cell_id: p.cell_id,
        schedule,
        bid_value: p.bid_value,
    });
    Ok(())
}

/// Greedy rounds: each remaining coalition proposes its most profitable
/// remaining cell; one cell resolves per round (a contested cell first,
/// lowest cell id otherwise) and the allocated pair leaves the game.
fn allocate_bid_price(
    partition: &Partition,
    bids: &[Bid],
    scenario: &ScenarioConfig,
) -> Result<AuctionOutcome> {
    let table: BTreeMap<(u32, &Coalition), f64> = bids
        .iter()
        .map(|b| ((b.cell_id, &b.coalition), b.value))
        .collect();
    let mut remaining_cells: Vec<u32> = scenario.cells.iter().map(|c| c.id).collect();
    remaining_cells.sort_unstable();
    let mut remaining: Vec<Coalition> = partition.coalitions().to_vec();
    let mut outcome = AuctionOutcome::default();

    while !remaining.is_empty() && !remaining_cells.is_empty() {
        let mut proposals: Vec<Proposal> = Vec::new();
        for coalition in &remaining {
            let mut best: Option<Proposal> = None;
            for &cell_id in &remaining_cells {
                let Some(&bid_value) = table.get(&(cell_id, coalition)) else {
                    continue;
                };
                let cell = scenario.cell(cell_id)?;
                let schedule = schedule_iterations(coalition, cell, scenario)?;
                let cost = coalition_cost(coalition, cell, &schedule, scenario)?;
                let profit = bid_value - cost;
                if profit <= 0.0 {
                    continue;
                }
                // Strict improvement keeps the lowest cell id on ties.
                if best.as_ref().is_none_or(|b| profit > b.profit) {
                    best = Some(Proposal {
                        coalition: coalition.clone(),
                        cell_id,
                        bid_value,
                        payment: bid_value,
                        cost,
                        profit,
                    });
                }
            }
            if let Some(p) = best {
                proposals.push(p);
            }
        }
        if proposals.is_empty() {
            break;
        }

        let mut by_cell: BTreeMap<u32, Vec<Proposal>> = BTreeMap::new();
        for p in proposals {
            by_cell.entry(p.cell_id).or_default().push(p);
        }
        let winner = match by_cell.iter().find(|(_, ps)| ps.len() >= 2) {
            Some((&cell_id, _)) => {
                // The cell keeps the coalition it bids most for; equal bids
                // go to the smaller canonical coalition.
                let mut ps = by_cell.remove(&cell_id).expect("contested cell present");
                ps.sort_by(|a, b| {
                    a.bid_value
                        .partial_cmp(&b.bid_value)
                        .unwrap()
                        .then_with(|| b.coalition.cmp(&a.coalition))
                });
                ps.pop().expect("at least two proposals")
            }
            None => {
                let (_, mut ps) = by_cell.pop_first().expect("nonempty proposals");
                ps.pop().expect("sole proposal")
            }
        };
        remaining.retain(|c| c != &winner.coalition);
        remaining_cells.retain(|&c| c != winner.cell_id);
        commit(&mut outcome, winner, scenario)?;
    }

    outcome.unallocated_coalitions = remaining;
    outcome.unserved_cells = remaining_cells;
    Ok(outcome)
}

/// Static per-coalition sealed-bid auctions: a coalition can only be won by
/// its top-bidding cell at the second price; a cell offered several
/// coalitions keeps the one with the best utility.
fn allocate_second_price(
    partition: &Partition,
    bids: &[Bid],
    scenario: &ScenarioConfig,
) -> Result<AuctionOutcome> {
    let mut by_cell: BTreeMap<u32, Vec<Proposal>> = BTreeMap::new();
    for coalition in partition.coalitions() {
        let coalition_bids: Vec<&Bid> = bids.iter().filter(|b| &b.coalition == coalition).collect();
        if coalition_bids.is_empty() {
            continue;
        }
        let top = coalition_bids
            .iter()
            .max_by(|a, b| {
                a.value
                    .partial_cmp(&b.value)
                    .unwrap()
                    .then_with(|| b.cell_id.cmp(&a.cell_id))
            })
            .expect("nonempty bid list");
        let pay = coalition_bids
            .iter()
            .filter(|b| b.cell_id != top.cell_id)
            .map(|b| b.value)
            .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))))
            .unwrap_or(top.value);
        let cell = scenario.cell(top.cell_id)?;
        let schedule = schedule_iterations(coalition, cell, scenario)?;
        let cost = coalition_cost(coalition, cell, &schedule, scenario)?;
        let profit = pay - cost;
        if profit <= 0.0 {
            continue;
        }
        by_cell.entry(top.cell_id).or_default().push(Proposal {
            coalition: coalition.clone(),
            cell_id: top.cell_id,
            bid_value: top.value,
            payment: pay,
            cost,
            profit,
        });
    }

    let mut outcome = AuctionOutcome::default();
    let mut allocated: Vec<Coalition> = Vec::new();
    for (_, mut ps) in by_cell {
        // Cell keeps its best-utility proposal; ties to the smaller
        // canonical coalition.
        ps.sort_by(|a, b| {
            let ua = a.bid_value - a.payment;
            let ub = b.bid_value - b.payment;
            ua.partial_cmp(&ub)
                .unwrap()
                .then_with(|| b.coalition.cmp(&a.coalition))
        });
        let winner = ps.pop().expect("nonempty proposals");
        allocated.push(winner.coalition.clone());
        commit(&mut outcome, winner, scenario)?;
    }

    outcome.unallocated_coalitions = partition
        .coalitions()
        .iter()
        .filter(|c| !allocated.contains(c))
        .cloned()
        .collect();
    let served: Vec<u32> = outcome.allocation.iter().map(|a| a.cell_id).collect();
    outcome.unserved_cells = scenario
        .cells
        .iter()
        .map(|c| c.id)
        .filter(|id| !served.contains(id))
        .collect();
    Ok(outcome)
}

/// Utility a cell took from the auction: winning bid minus payment when the
/// pair was allocated, zero otherwise.
pub fn cell_utility(cell_id: u32, coalition: &Coalition, outcome: &AuctionOutcome) -> f64 {
    match outcome
        .allocation
        .iter()
        .find(|a| a.cell_id == cell_id && &a.coalition == coalition)
    {
        Some(pair) => pair.bid_value - outcome.payments.get(coalition).copied().unwrap_or(0.0),
        None => 0.0,
    }
}

/// Informational payment rate the model owner grants the cell: importance
/// value per second of task completion time.
pub fn cell_revenue_rate(cell: &CellSpec, threshold: f64, completion_time_s: f64) -> Result<f64> {
    if completion_time_s <= 0.0 {
        return Err(Error::NonPositive {
            what: "completion time",
            value: completion_time_s,
        });
    }
    Ok(cell.price_per_importance * cell_importance(cell, threshold) / completion_time_s)
}
