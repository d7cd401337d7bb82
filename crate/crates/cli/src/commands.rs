//! The five experiment commands, as pure functions of a scenario.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coalsim_core::auction::{
    allocate, coalition_profit, coalition_travel_time, feasible, valuation, AuctionOutcome,
};
use coalsim_core::coalition::{enumerate_partitions, merge_and_split_observed, Coalition};
use coalsim_core::error::{Error, Result};
use coalsim_core::oracle::exhaustive_best_partition;
use coalsim_core::radio::{dbm_per_hz_to_w_per_hz, per_iteration_time, shannon_rate, transmission_time};
use coalsim_core::scenario::selected_worker_count;
use coalsim_core::{bell_number, Partition, ScenarioConfig};

use crate::report::{
    allocation_string, AllocationRow, CommtimeRow, CompareRow, ExperimentRecord, OracleRow,
    RunReport, TableRow, TraceRow,
};

fn allocation_rows(outcome: &AuctionOutcome, scenario: &ScenarioConfig) -> Result<Vec<AllocationRow>> {
    let mut rows = Vec::new();
    for pair in &outcome.allocation {
        let cell = scenario.cell(pair.cell_id)?;
        let workers = selected_worker_count(cell, scenario.game.importance_threshold);
        let mut completion = coalition_travel_time(&pair.coalition, cell, scenario)?;
        for &(uav_id, iterations) in &pair.schedule.assignments {
            let uav = scenario.uav(uav_id)?;
            completion += f64::from(iterations) * per_iteration_time(uav, &scenario.radio, workers)?;
        }
        rows.push(AllocationRow {
            coalition: pair.coalition.to_string(),
            cell: pair.cell_id,
            revenue: outcome.payments[&pair.coalition],
            cost: outcome.coalition_costs[&pair.coalition],
            profit: outcome.coalition_profits[&pair.coalition],
            completion_time_s: completion,
            schedule: pair.schedule.assignments.clone(),
        });
    }
    Ok(rows)
}

/// Merge-and-split from singletons plus the final allocation; optionally
/// the committed-move trace and the exhaustive-oracle digest.
pub fn cmd_run(scenario: &ScenarioConfig, oracle: bool, trace: bool) -> Result<RunReport> {
    let mut events = Vec::new();
    let singles = Partition::singletons(&scenario.uav_ids());
    let (partition, outcome) = merge_and_split_observed(singles, scenario, |e| {
        events.push(TraceRow::from_event(e))
    })?;

    let record = ExperimentRecord::new("run", scenario.game.rng_seed, &partition, &outcome);
    let allocations = allocation_rows(&outcome, scenario)?;
    let oracle = if oracle {
        Some(OracleRow::from(&exhaustive_best_partition(scenario)?))
    } else {
        None
    };
    Ok(RunReport {
        record,
        allocations,
        trace: trace.then_some(events),
        oracle,
    })
}

/// Coalitions listed in the reference revenue/cost/profit table, kept when
/// all their members exist in the scenario.
fn table_coalitions(scenario: &ScenarioConfig) -> Vec<Coalition> {
    let ids = scenario.uav_ids();
    [
        vec![3u32],
        vec![1, 3],
        vec![2, 3],
        vec![1, 2, 3],
        vec![6],
        vec![2, 6],
    ]
    .into_iter()
    .filter(|members| members.iter().all(|m| ids.contains(m)))
    .map(Coalition::new)
    .collect()
}

/// The cell-valuation matrix over singleton UAVs and the
/// revenue/cost/profit matrix over the reference coalitions. Infeasible
/// pairs emit all-zero rows.
pub fn cmd_tables(scenario: &ScenarioConfig) -> Result<Vec<TableRow>> {
    let mut rows = Vec::new();
    for uav in &scenario.uavs {
        let coalition = Coalition::singleton(uav.id);
        for cell in &scenario.cells {
            let value = if feasible(&coalition, cell, scenario)? {
                valuation(cell, &coalition, scenario)?
            } else {
                0.0
            };
            rows.push(TableRow {
                table: "valuation".into(),
                coalition: coalition.to_string(),
                cell: cell.id,
                value,
                revenue: 0.0,
                cost: 0.0,
                profit: 0.0,
            });
        }
    }
    for coalition in table_coalitions(scenario) {
        for cell in &scenario.cells {
            let (revenue, cost, profit) = if feasible(&coalition, cell, scenario)? {
                coalition_profit(&coalition, cell, scenario)?
            } else {
                (0.0, 0.0, 0.0)
            };
            rows.push(TableRow {
                table: "profit".into(),
                coalition: coalition.to_string(),
                cell: cell.id,
                value: 0.0,
                revenue,
                cost,
                profit,
            });
        }
    }
    Ok(rows)
}

/// Which scenario knob a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// Overrides every UAV's cooperation cost.
    CooperationCost,
    /// Overrides the required FL iteration count.
    RequiredIterations,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::CooperationCost => "cooperation_cost",
            SweepParameter::RequiredIterations => "required_iterations",
        }
    }
}

/// Re-run the full pipeline once per value of the swept parameter.
pub fn cmd_sweep(
    scenario: &ScenarioConfig,
    parameter: SweepParameter,
    values: &[f64],
) -> Result<Vec<ExperimentRecord>> {
    let mut records = Vec::new();
    for &value in values {
        let mut sc = scenario.clone();
        match parameter {
            SweepParameter::CooperationCost => {
                if value < 0.0 {
                    return Err(Error::Validation {
                        path: "sweep.values".into(),
                        message: format!("cooperation cost must be >= 0, got {value}"),
                    });
                }
                for uav in &mut sc.uavs {
                    uav.cooperation_cost_j = value;
                }
            }
            SweepParameter::RequiredIterations => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(Error::Validation {
                        path: "sweep.values".into(),
                        message: format!("iteration counts must be whole numbers >= 1, got {value}"),
                    });
                }
                sc.game.required_iterations = value as u32;
            }
        }
        let singles = Partition::singletons(&sc.uav_ids());
        let (partition, outcome) = coalsim_core::merge_and_split(singles, &sc)?;
        records.push(
            ExperimentRecord::new("sweep", sc.game.rng_seed, &partition, &outcome)
                .swept(parameter.name(), value),
        );
    }
    Ok(records)
}

/// Uniformly random injective allocation of coalitions to feasible cells,
/// ignoring profitability. Consumes `rng` in coalition-shuffle order, then
/// one draw per coalition with feasible cells left.
fn random_feasible_allocation(
    partition: &Partition,
    scenario: &ScenarioConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, String)> {
    let mut order: Vec<&Coalition> = partition.coalitions().iter().collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut remaining: Vec<u32> = scenario.cells.iter().map(|c| c.id).collect();
    let mut total = 0.0;
    let mut pairs = Vec::new();
    for coalition in order {
        let mut feasible_cells = Vec::new();
        for &cell_id in &remaining {
            if feasible(coalition, scenario.cell(cell_id)?, scenario)? {
                feasible_cells.push(cell_id);
            }
        }
        if feasible_cells.is_empty() {
            continue;
        }
        let cell_id = feasible_cells[rng.gen_range(0..feasible_cells.len())];
        let cell = scenario.cell(cell_id)?;
        let (_, _, profit) = coalition_profit(coalition, cell, scenario)?;
        total += profit;
        pairs.push((coalition.clone(), cell_id));
        remaining.retain(|&c| c != cell_id);
    }
    pairs.sort();
    let text = pairs
        .iter()
        .map(|(c, id)| format!("{c}->{id}"))
        .collect::<Vec<_>>()
        .join(";");
    Ok((total, text))
}

/// Uniformly random partition drawn by index into the full enumeration.
fn random_partition(scenario: &ScenarioConfig, rng: &mut ChaCha8Rng) -> Result<Partition> {
    let ids = scenario.uav_ids();
    let count = bell_number(ids.len() as u32)?;
    let index = rng.gen_range(0..count);
    enumerate_partitions(&ids)?
        .nth(index as usize)
        .ok_or_else(|| Error::Parse("partition index out of range".into()))
}

/// Per seeded round, evaluate: (a) the joint pipeline, (b) the stable
/// partition with a random feasible allocation, and (c) a random partition
/// under the profit-seeking allocation. Round r uses seed base + r.
pub fn cmd_compare(scenario: &ScenarioConfig, rounds: u32) -> Result<Vec<CompareRow>> {
    let singles = Partition::singletons(&scenario.uav_ids());
    let (stable, joint_outcome) = coalsim_core::merge_and_split(singles, scenario)?;
    let mut rows = Vec::new();
    for round in 1..=rounds {
        let seed = scenario.game.rng_seed.wrapping_add(u64::from(round));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rows.push(CompareRow {
            round,
            scheme: "joint".into(),
            seed,
            total_profit: joint_outcome.total_profit,
            partition: stable.to_string(),
            allocation: allocation_string(&joint_outcome),
        });

        let (random_alloc_profit, random_alloc) =
            random_feasible_allocation(&stable, scenario, &mut rng)?;
        rows.push(CompareRow {
            round,
            scheme: "random_allocation".into(),
            seed,
            total_profit: random_alloc_profit,
            partition: stable.to_string(),
            allocation: random_alloc,
        });

        let sampled = random_partition(scenario, &mut rng)?;
        let outcome = allocate(&sampled, scenario)?;
        rows.push(CompareRow {
            round,
            scheme: "random_partition".into(),
            seed,
            total_profit: outcome.total_profit,
            partition: sampled.to_string(),
            allocation: allocation_string(&outcome),
        });
    }
    Ok(rows)
}

/// Sample worker and UAV uplink draws from the configured ranges and time
/// the worker update against the cell aggregate. Each draw consumes the
/// stream in worker (bandwidth, power, gain) then UAV (bandwidth, power,
/// gain) order.
pub fn cmd_commtime(scenario: &ScenarioConfig, draws: u32) -> Result<Vec<CommtimeRow>> {
    let ranges = &scenario.radio.sampling_ranges;
    let n0 = dbm_per_hz_to_w_per_hz(scenario.radio.noise_psd_dbm_per_hz);
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.game.rng_seed);
    let mut rows = Vec::new();
    for draw in 0..draws {
        let wb = rng.gen_range(ranges.worker_bandwidth_hz.0..=ranges.worker_bandwidth_hz.1);
        let wp = rng.gen_range(ranges.worker_tx_power_w.0..=ranges.worker_tx_power_w.1);
        let wg = rng.gen_range(ranges.worker_channel_gain_db.0..=ranges.worker_channel_gain_db.1);
        let ub = rng.gen_range(ranges.uav_bandwidth_hz.0..=ranges.uav_bandwidth_hz.1);
        let up = rng.gen_range(ranges.uav_tx_power_w.0..=ranges.uav_tx_power_w.1);
        let ug = rng.gen_range(ranges.uav_channel_gain_db.0..=ranges.uav_channel_gain_db.1);
        let worker_rate = shannon_rate(wb, wp, wg, scenario.radio.uplink_interference_w, n0)?;
        let uav_rate = shannon_rate(ub, up, ug, scenario.radio.uplink_interference_w, n0)?;
        rows.push(CommtimeRow {
            draw,
            worker_time_s: transmission_time(scenario.radio.worker_update_bits(), worker_rate)?,
            uav_time_s: transmission_time(scenario.radio.cell_aggregate_bits(), uav_rate)?,
        });
    }
    Ok(rows)
}
