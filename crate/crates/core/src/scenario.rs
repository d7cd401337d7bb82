//! Scenario description: cells of FL workers, UAVs, the radio environment,
//! and game parameters, plus loading/validation from a TOML document.
//!
//! All distances are planar meters on the configured grid, powers are watts,
//! energies joules, bandwidths Hz. Data sizes are written in megabytes in the
//! scenario file and converted at 1 MB = 8,000,000 bits by the accessors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bits per megabyte used for all size conversions.
pub const BITS_PER_MB: f64 = 8_000_000.0;

/// Base of the worker-importance log: a sampling rate of 19 sps maps to
/// importance 1.0.
const IMPORTANCE_LOG_BASE: f64 = 20.0;

/// Planar position in meters.
pub type Point = (f64, f64);

/// Euclidean distance between two grid points.
pub fn distance(a: Point, b: Point) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// One FL worker (vehicle or RSU) inside a cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkerSpec {
    pub id: u32,
    /// Sensor sampling rate in samples per second.
    pub sampling_rate_sps: f64,
}

/// A geographic cell of workers acting as one buyer in the auction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSpec {
    pub id: u32,
    /// Cell center on the grid, meters.
    pub position: Point,
    /// Price paid by the model owner per unit of cell importance (q_i).
    pub price_per_importance: f64,
    /// Direct cell importance, bypassing per-worker aggregation. Scenario
    /// files may state the importance outright when the underlying worker
    /// sampling rates are not known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub importance_override: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub workers: Vec<WorkerSpec>,
}

/// A UAV available for relay duty: geometry, energy budget, compute, and
/// radio front-end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Uav {
    pub id: u32,
    /// Home position the UAV launches from and returns to, meters.
    pub depot: Point,
    /// Battery budget for one engagement, joules.
    pub energy_capacity_j: f64,
    /// Constant cruise velocity, m/s.
    pub velocity_mps: f64,
    /// Power drawn while flying, watts.
    pub flight_power_w: f64,
    /// Terrain weight of the depot side of a flight leg.
    #[serde(default = "default_one")]
    pub flight_weight_depot: f64,
    /// Energy charged for coordinating inside a multi-UAV coalition, joules.
    pub cooperation_cost_j: f64,
    /// CPU cycles needed for one edge aggregation.
    pub cpu_cycles_per_aggregation: f64,
    /// CPU clock, Hz.
    pub cpu_frequency_hz: f64,
    /// Architecture-dependent energy coefficient of the CPU.
    pub cpu_coefficient: f64,
    /// Uplink bandwidth toward the model owner, Hz.
    pub bandwidth_hz: f64,
    pub tx_power_w: f64,
    pub rx_power_w: f64,
    /// Channel gain toward the model owner, dB. (The source material labels
    /// gains in dBm; they behave as dimensionless dB ratios and are treated
    /// as such here.)
    pub channel_gain_db: f64,
    /// Energy to hover near the cell for one iteration, joules.
    pub hover_energy_j: f64,
    /// On-board circuit energy per iteration, joules.
    pub circuit_energy_j: f64,
    /// Cost coefficient per joule spent (delta_m).
    #[serde(default = "default_energy_price")]
    pub energy_price_per_j: f64,
}

fn default_one() -> f64 {
    1.0
}

fn default_energy_price() -> f64 {
    0.03
}

/// Uniform sampling ranges for the communication-time experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingRanges {
    pub worker_bandwidth_hz: (f64, f64),
    pub worker_tx_power_w: (f64, f64),
    pub worker_channel_gain_db: (f64, f64),
    pub uav_bandwidth_hz: (f64, f64),
    pub uav_tx_power_w: (f64, f64),
    pub uav_channel_gain_db: (f64, f64),
}

impl Default for SamplingRanges {
    fn default() -> Self {
        SamplingRanges {
            worker_bandwidth_hz: (50e3, 150e3),
            worker_tx_power_w: (1e-3, 10e-3),
            worker_channel_gain_db: (2.0, 8.0),
            uav_bandwidth_hz: (200e3, 400e3),
            uav_tx_power_w: (0.5, 5.0),
            uav_channel_gain_db: (5.0, 25.0),
        }
    }
}

/// Shared radio environment: noise, the model-owner downlink, the
/// representative worker uplink profile, and payload sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadioEnv {
    /// Noise power spectral density, dBm/Hz.
    pub noise_psd_dbm_per_hz: f64,
    /// Co-channel interference on the allocated resource block, watts.
    /// One orthogonal block per transmitter is assumed, so this defaults
    /// to zero.
    #[serde(default)]
    pub uplink_interference_w: f64,
    /// Model-owner broadcast bandwidth, Hz.
    pub owner_bandwidth_hz: f64,
    pub owner_tx_power_w: f64,
    /// Global model parameters, megabytes.
    pub global_model_size_mb: f64,
    /// Cell-aggregated model parameters a UAV relays upward, megabytes.
    pub cell_aggregate_size_mb: f64,
    /// One worker's local update, megabytes.
    pub worker_update_size_mb: f64,
    /// Representative worker uplink profile, identical for all workers.
    pub worker_bandwidth_hz: f64,
    pub worker_tx_power_w: f64,
    pub worker_channel_gain_db: f64,
    /// Terrain weight on the cell side of a flight leg.
    #[serde(default = "default_one")]
    pub cell_flight_weight: f64,
    /// Ranges for the `commtime` experiment; defaults cover the stock
    /// parameter table.
    #[serde(default, skip_serializing_if = "is_default_ranges")]
    pub sampling_ranges: SamplingRanges,
}

fn is_default_ranges(r: &SamplingRanges) -> bool {
    *r == SamplingRanges::default()
}

impl RadioEnv {
    pub fn global_model_bits(&self) -> f64 {
        self.global_model_size_mb * BITS_PER_MB
    }

    pub fn cell_aggregate_bits(&self) -> f64 {
        self.cell_aggregate_size_mb * BITS_PER_MB
    }

    pub fn worker_update_bits(&self) -> f64 {
        self.worker_update_size_mb * BITS_PER_MB
    }
}

/// Which price an allocated coalition collects from its cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PaymentRule {
    /// The winner pays its own bid. Reproduces the published revenue
    /// figures.
    BidPrice,
    /// The winner pays the highest competing bid (its own bid when it is
    /// the only bidder).
    SecondPrice,
}

/// Game-level knobs shared by every auction evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    /// FL iterations the model owner requires (mu).
    pub required_iterations: u32,
    /// Minimum worker importance for selection (zeta).
    pub importance_threshold: f64,
    /// Weight of cell importance in the valuation (theta_1).
    pub weight_importance: f64,
    /// Weight of the latency term in the valuation (theta_2).
    pub weight_latency: f64,
    /// Scale of the latency term, seconds. Calibrated constant multiplying
    /// weight_latency / max-travel-time.
    #[serde(default = "default_latency_scale")]
    pub latency_scale_s: f64,
    #[serde(default = "default_payment_rule")]
    pub payment_rule: PaymentRule,
    #[serde(default)]
    pub rng_seed: u64,
}

fn default_latency_scale() -> f64 {
    1000.0
}

fn default_payment_rule() -> PaymentRule {
    PaymentRule::BidPrice
}

/// Grid extent in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub width_m: f64,
    pub height_m: f64,
}

/// Complete, validated scenario. Immutable after construction; safe to share
/// across threads for parallel evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub grid: Grid,
    pub cells: Vec<CellSpec>,
    pub uavs: Vec<Uav>,
    pub radio: RadioEnv,
    pub game: GameParams,
}

impl ScenarioConfig {
    pub fn cell(&self, id: u32) -> Result<&CellSpec> {
        self.cells
            .iter()
            .find(|c| c.id == id)
            .ok_or(Error::UnknownId { kind: "cell", id })
    }

    pub fn uav(&self, id: u32) -> Result<&Uav> {
        self.uavs
            .iter()
            .find(|u| u.id == id)
            .ok_or(Error::UnknownId { kind: "uav", id })
    }

    pub fn uav_ids(&self) -> Vec<u32> {
        self.uavs.iter().map(|u| u.id).collect()
    }

    /// Serialize back to the TOML scenario format.
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scenario serializes")
    }
}

/// Importance of one worker as a concave, nondecreasing function of its
/// sampling rate: log10(rate + 1) / log10(20).
pub fn worker_importance(sampling_rate_sps: f64) -> Result<f64> {
    if sampling_rate_sps < 0.0 {
        return Err(Error::Negative {
            what: "sampling rate",
            value: sampling_rate_sps,
        });
    }
    Ok((sampling_rate_sps + 1.0).log10() / IMPORTANCE_LOG_BASE.log10())
}

/// Workers whose importance strictly exceeds the threshold, in input order.
pub fn select_workers(cell: &CellSpec, threshold: f64) -> Vec<&WorkerSpec> {
    cell.workers
        .iter()
        .filter(|w| worker_importance(w.sampling_rate_sps).is_ok_and(|imp| imp > threshold))
        .collect()
}

/// Cell importance sigma_i: the override when present, otherwise the sum of
/// selected workers' importances.
pub fn cell_importance(cell: &CellSpec, threshold: f64) -> f64 {
    if let Some(sigma) = cell.importance_override {
        return sigma;
    }
    select_workers(cell, threshold)
        .iter()
        .map(|w| worker_importance(w.sampling_rate_sps).unwrap_or(0.0))
        .sum()
}

/// Number of selected workers a UAV must exchange parameters with.
pub fn selected_worker_count(cell: &CellSpec, threshold: f64) -> usize {
    select_workers(cell, threshold).len()
}

/// Parse and fully validate a scenario document.
pub fn load_scenario(source: &str) -> Result<ScenarioConfig> {
    let config: ScenarioConfig =
        toml::from_str(source).map_err(|e| Error::Parse(e.to_string()))?;
    validate(&config)?;
    Ok(config)
}

fn err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Validation {
        path: path.into(),
        message: message.into(),
    }
}

fn check_positive(path: &str, value: f64) -> Result<()> {
    if value > 0.0 {
        Ok(())
    } else {
        Err(err(path, format!("must be > 0, got {value}")))
    }
}

fn check_nonnegative(path: &str, value: f64) -> Result<()> {
    if value >= 0.0 {
        Ok(())
    } else {
        Err(err(path, format!("must be >= 0, got {value}")))
    }
}

fn check_in_grid(path: &str, p: Point, grid: &Grid) -> Result<()> {
    if p.0 < 0.0 || p.0 > grid.width_m || p.1 < 0.0 || p.1 > grid.height_m {
        return Err(err(
            path,
            format!(
                "position ({}, {}) outside grid {} x {}",
                p.0, p.1, grid.width_m, grid.height_m
            ),
        ));
    }
    Ok(())
}

/// Check every scenario invariant, naming the failing field.
pub fn validate(config: &ScenarioConfig) -> Result<()> {
    check_positive("grid.width_m", config.grid.width_m)?;
    check_positive("grid.height_m", config.grid.height_m)?;

    let mut seen = std::collections::BTreeSet::new();
    for (i, cell) in config.cells.iter().enumerate() {
        let path = format!("cells[{i}]");
        if !seen.insert(cell.id) {
            return Err(err(format!("{path}.id"), format!("duplicate cell id {}", cell.id)));
        }
        check_in_grid(&format!("{path}.position"), cell.position, &config.grid)?;
        check_nonnegative(&format!("{path}.price_per_importance"), cell.price_per_importance)?;
        if let Some(sigma) = cell.importance_override {
            check_nonnegative(&format!("{path}.importance_override"), sigma)?;
        } else if cell.workers.is_empty() {
            return Err(err(
                format!("{path}.workers"),
                "workers must be non-empty when importance_override is absent",
            ));
        }
        let mut wseen = std::collections::BTreeSet::new();
        for (j, w) in cell.workers.iter().enumerate() {
            let wpath = format!("{path}.workers[{j}]");
            if !wseen.insert(w.id) {
                return Err(err(format!("{wpath}.id"), format!("duplicate worker id {}", w.id)));
            }
            check_positive(&format!("{wpath}.sampling_rate_sps"), w.sampling_rate_sps)?;
        }
    }

    let mut seen = std::collections::BTreeSet::new();
    for (i, uav) in config.uavs.iter().enumerate() {
        let path = format!("uavs[{i}]");
        if !seen.insert(uav.id) {
            return Err(err(format!("{path}.id"), format!("duplicate uav id {}", uav.id)));
        }
        check_in_grid(&format!("{path}.depot"), uav.depot, &config.grid)?;
        check_positive(&format!("{path}.energy_capacity_j"), uav.energy_capacity_j)?;
        check_positive(&format!("{path}.velocity_mps"), uav.velocity_mps)?;
        check_positive(&format!("{path}.bandwidth_hz"), uav.bandwidth_hz)?;
        check_positive(&format!("{path}.tx_power_w"), uav.tx_power_w)?;
        check_positive(&format!("{path}.rx_power_w"), uav.rx_power_w)?;
        check_nonnegative(&format!("{path}.cooperation_cost_j"), uav.cooperation_cost_j)?;
        check_nonnegative(&format!("{path}.hover_energy_j"), uav.hover_energy_j)?;
        check_nonnegative(&format!("{path}.circuit_energy_j"), uav.circuit_energy_j)?;
        check_nonnegative(&format!("{path}.energy_price_per_j"), uav.energy_price_per_j)?;
    }

    let r = &config.radio;
    check_nonnegative("radio.uplink_interference_w", r.uplink_interference_w)?;
    check_positive("radio.owner_bandwidth_hz", r.owner_bandwidth_hz)?;
    check_positive("radio.owner_tx_power_w", r.owner_tx_power_w)?;
    check_positive("radio.global_model_size_mb", r.global_model_size_mb)?;
    check_positive("radio.cell_aggregate_size_mb", r.cell_aggregate_size_mb)?;
    check_positive("radio.worker_update_size_mb", r.worker_update_size_mb)?;
    check_positive("radio.worker_bandwidth_hz", r.worker_bandwidth_hz)?;
    check_positive("radio.worker_tx_power_w", r.worker_tx_power_w)?;

    let g = &config.game;
    if g.required_iterations < 1 {
        return Err(err("game.required_iterations", "must be >= 1"));
    }
    check_nonnegative("game.importance_threshold", g.importance_threshold)?;
    check_nonnegative("game.weight_importance", g.weight_importance)?;
    check_nonnegative("game.weight_latency", g.weight_latency)?;
    check_positive("game.latency_scale_s", g.latency_scale_s)?;

    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell_with_rates(rates: &[f64]) -> CellSpec {
        CellSpec {
            id: 1,
            position: (0.0, 0.0),
            price_per_importance: 1.0,
            importance_override: None,
            workers: rates
                .iter()
                .enumerate()
                .map(|(i, &r)| WorkerSpec {
                    id: i as u32 + 1,
                    sampling_rate_sps: r,
                })
                .collect(),
        }
    }

    #[test]
    fn importance_reference_points() {
        assert_eq!(worker_importance(0.0).unwrap(), 0.0);
        assert!((worker_importance(19.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((worker_importance(399.0).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn importance_rejects_negative_rate() {
        assert!(worker_importance(-1.0).is_err());
    }

    #[test]
    fn selection_is_strict() {
        let cell = cell_with_rates(&[0.0, 19.0, 399.0]);
        let picked = select_workers(&cell, 1.0);
        assert_eq!(picked.len(), 1);
        assert_eq!(picked[0].sampling_rate_sps, 399.0);
    }

    #[test]
    fn selection_over_stock_rate_range() {
        let cell = cell_with_rates(&[250.0, 32_000.0]);
        assert_eq!(select_workers(&cell, 1.0).len(), 2);
        assert!(select_workers(&cell, f64::MAX).is_empty());
    }

    #[test]
    fn cell_importance_paths() {
        let mut cell = cell_with_rates(&[19.0, 399.0]);
        assert!((cell_importance(&cell, 0.5) - 3.0).abs() < 1e-12);
        cell.importance_override = Some(18.4);
        assert_eq!(cell_importance(&cell, 0.5), 18.4);
        let empty = cell_with_rates(&[1.0]);
        assert_eq!(cell_importance(&empty, 10.0), 0.0);
    }
}
