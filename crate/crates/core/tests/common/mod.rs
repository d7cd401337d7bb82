#![allow(dead_code)] // each test binary uses a different subset

//! Builders for small synthetic scenarios used across integration tests.
//!
//! The synthetic UAVs fly at 10 m/s drawing 1 W with unit terrain weights,
//! so a one-way flight leg costs d/10 joules. Payload sizes are zero and
//! the CPU coefficient is zero, so one iteration costs exactly
//! hover + circuit joules. That makes capacities and costs round numbers
//! that tests can stage directly.

use coalsim_core::scenario::{
    CellSpec, GameParams, Grid, PaymentRule, Point, RadioEnv, ScenarioConfig, Uav,
};

pub fn cell(id: u32, position: Point, price: f64, sigma: f64) -> CellSpec {
    CellSpec {
        id,
        position,
        price_per_importance: price,
        importance_override: Some(sigma),
        workers: vec![],
    }
}

pub fn uav(id: u32, depot: Point, energy_j: f64, per_iteration_j: f64) -> Uav {
    Uav {
        id,
        depot,
        energy_capacity_j: energy_j,
        velocity_mps: 10.0,
        flight_power_w: 1.0,
        flight_weight_depot: 1.0,
        cooperation_cost_j: 2.0,
        cpu_cycles_per_aggregation: 1e9,
        cpu_frequency_hz: 1e8,
        cpu_coefficient: 0.0,
        bandwidth_hz: 400e3,
        tx_power_w: 1.0,
        rx_power_w: 0.5,
        channel_gain_db: 5.0,
        hover_energy_j: per_iteration_j / 2.0,
        circuit_energy_j: per_iteration_j / 2.0,
        energy_price_per_j: 0.03,
    }
}

pub fn zero_payload_radio() -> RadioEnv {
    RadioEnv {
        noise_psd_dbm_per_hz: -174.0,
        uplink_interference_w: 0.0,
        owner_bandwidth_hz: 5e6,
        owner_tx_power_w: 10.0,
        global_model_size_mb: 0.0,
        cell_aggregate_size_mb: 0.0,
        worker_update_size_mb: 0.0,
        worker_bandwidth_hz: 150e3,
        worker_tx_power_w: 0.01,
        worker_channel_gain_db: 8.0,
        cell_flight_weight: 1.0,
        sampling_ranges: Default::default(),
    }
}

pub fn scenario(
    cells: Vec<CellSpec>,
    uavs: Vec<Uav>,
    mu: u32,
    latency_scale_s: f64,
) -> ScenarioConfig {
    ScenarioConfig {
        grid: Grid {
            width_m: 10_000.0,
            height_m: 10_000.0,
        },
        cells,
        uavs,
        radio: zero_payload_radio(),
        game: GameParams {
            required_iterations: mu,
            importance_threshold: 1.0,
            weight_importance: 0.5,
            weight_latency: 0.5,
            latency_scale_s,
            payment_rule: PaymentRule::BidPrice,
            rng_seed: 7,
        },
    }
}

/// The stock 3-cell / 6-UAV scenario shipped with the repo.
pub fn paper_baseline() -> ScenarioConfig {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../scenarios/paper_baseline.toml"
    ))
    .expect("baseline scenario file");
    coalsim_core::load_scenario(&text).expect("baseline scenario is valid")
}
