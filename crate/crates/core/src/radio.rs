//! Physical-layer arithmetic: link rates, per-iteration energies, flight
//! energy, iteration budgets, and transmission times.
//!
//! Everything here is a pure function of immutable inputs.

use crate::error::{Error, Result};
use crate::scenario::{distance, CellSpec, RadioEnv, Uav};

/// dB ratio to linear.
pub fn db_to_linear(value_db: f64) -> f64 {
    10f64.powf(value_db / 10.0)
}

/// dBm/Hz power spectral density to W/Hz.
pub fn dbm_per_hz_to_w_per_hz(value_dbm: f64) -> f64 {
    10f64.powf((value_dbm - 30.0) / 10.0)
}

/// Shannon rate of one resource block in bits/s:
/// b * log2(1 + p * 10^(g/10) / (I + b * N0)).
pub fn shannon_rate(
    bandwidth_hz: f64,
    signal_power_w: f64,
    gain_db: f64,
    interference_w: f64,
    noise_psd_w_per_hz: f64,
) -> Result<f64> {
    if bandwidth_hz <= 0.0 {
        return Err(Error::NonPositive {
            what: "bandwidth",
            value: bandwidth_hz,
        });
    }
    let snr = signal_power_w * db_to_linear(gain_db)
        / (interference_w + bandwidth_hz * noise_psd_w_per_hz);
    Ok(bandwidth_hz * (1.0 + snr).log2())
}

/// Energy for one flight leg from the UAV's depot to the cell:
/// (g_cell/2 + g_depot/2) * flight_power * d / v. Callers double it for a
/// round trip.
pub fn flying_energy(uav: &Uav, cell: &CellSpec, env: &RadioEnv) -> f64 {
    let d = distance(uav.depot, cell.position);
    0.5 * (env.cell_flight_weight + uav.flight_weight_depot) * uav.flight_power_w * d
        / uav.velocity_mps
}

/// Energy for one edge aggregation: kappa * cycles * f^2.
pub fn compute_energy(uav: &Uav) -> f64 {
    uav.cpu_coefficient * uav.cpu_cycles_per_aggregation * uav.cpu_frequency_hz.powi(2)
}

/// Per-iteration energy of one UAV serving one cell, split by component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerIterationEnergy {
    /// Receiving local updates from every selected worker.
    pub receive_from_workers: f64,
    /// Receiving the global model from the owner.
    pub receive_from_owner: f64,
    /// Relaying the cell aggregate up to the owner.
    pub transmit_to_owner: f64,
    /// Broadcasting the global model to every selected worker.
    pub transmit_to_workers: f64,
    pub compute: f64,
    pub hover: f64,
    pub circuit: f64,
}

impl PerIterationEnergy {
    pub fn total(&self) -> f64 {
        self.receive_from_workers
            + self.receive_from_owner
            + self.transmit_to_owner
            + self.transmit_to_workers
            + self.compute
            + self.hover
            + self.circuit
    }
}

fn link_energy(power_w: f64, payload_bits: f64, rate: f64, link: &'static str) -> Result<f64> {
    if payload_bits == 0.0 {
        return Ok(0.0);
    }
    if rate <= 0.0 {
        return Err(Error::InfeasibleLink {
            link,
            payload_bits,
        });
    }
    Ok(power_w * payload_bits / rate)
}

/// All energy a UAV spends on one FL iteration for a cell with the given
/// number of selected workers. Workers share one radio profile, so the
/// per-worker sums collapse to a multiple of the representative link.
pub fn per_iteration_energy(
    uav: &Uav,
    env: &RadioEnv,
    selected_worker_count: usize,
) -> Result<PerIterationEnergy> {
    let n0 = dbm_per_hz_to_w_per_hz(env.noise_psd_dbm_per_hz);
    let w = selected_worker_count as f64;

    let uplink = shannon_rate(
        uav.bandwidth_hz,
        uav.tx_power_w,
        uav.channel_gain_db,
        env.uplink_interference_w,
        n0,
    )?;
    let downlink = shannon_rate(
        env.owner_bandwidth_hz,
        env.owner_tx_power_w,
        uav.channel_gain_db,
        0.0,
        n0,
    )?;
    let worker_uplink = shannon_rate(
        env.worker_bandwidth_hz,
        env.worker_tx_power_w,
        env.worker_channel_gain_db,
        env.uplink_interference_w,
        n0,
    )?;
    // Broadcast to a worker runs on the UAV's own block but through the
    // worker-side channel gain.
    let worker_downlink = shannon_rate(
        uav.bandwidth_hz,
        uav.tx_power_w,
        env.worker_channel_gain_db,
        0.0,
        n0,
    )?;

    Ok(PerIterationEnergy {
        receive_from_workers: link_energy(
            uav.rx_power_w,
            w * env.worker_update_bits(),
            worker_uplink,
            "worker_uplink",
        )?,
        receive_from_owner: link_energy(
            uav.rx_power_w,
            env.global_model_bits(),
            downlink,
            "owner_downlink",
        )?,
        transmit_to_owner: link_energy(
            uav.tx_power_w,
            env.cell_aggregate_bits(),
            uplink,
            "uav_uplink",
        )?,
        transmit_to_workers: link_energy(
            uav.tx_power_w,
            w * env.global_model_bits(),
            worker_downlink,
            "worker_downlink",
        )?,
        compute: compute_energy(uav),
        hover: uav.hover_energy_j,
        circuit: uav.circuit_energy_j,
    })
}

/// Maximum whole iterations a UAV can support for a cell after paying the
/// round-trip flight and, inside a multi-UAV coalition, its cooperation
/// cost. Infeasibility shows up as zero.
pub fn max_iterations(
    uav: &Uav,
    cell: &CellSpec,
    env: &RadioEnv,
    selected_worker_count: usize,
    in_multi_uav_coalition: bool,
) -> Result<u32> {
    let coop = if in_multi_uav_coalition {
        uav.cooperation_cost_j
    } else {
        0.0
    };
    let budget = uav.energy_capacity_j - 2.0 * flying_energy(uav, cell, env) - coop;
    if budget <= 0.0 {
        return Ok(0);
    }
    let per_iter = per_iteration_energy(uav, env, selected_worker_count)?.total();
    if per_iter <= 0.0 {
        // A costless iteration never drains the budget.
        return Ok(u32::MAX);
    }
    Ok((budget / per_iter).floor() as u32)
}

/// Wall-clock seconds one FL iteration takes a UAV: the four parameter
/// transfers plus the aggregation compute. The timing twin of
/// [`per_iteration_energy`], used for informational completion-time
/// reporting only.
pub fn per_iteration_time(uav: &Uav, env: &RadioEnv, selected_worker_count: usize) -> Result<f64> {
    let n0 = dbm_per_hz_to_w_per_hz(env.noise_psd_dbm_per_hz);
    let w = selected_worker_count as f64;
    let uplink = shannon_rate(
        uav.bandwidth_hz,
        uav.tx_power_w,
        uav.channel_gain_db,
        env.uplink_interference_w,
        n0,
    )?;
    let downlink = shannon_rate(
        env.owner_bandwidth_hz,
        env.owner_tx_power_w,
        uav.channel_gain_db,
        0.0,
        n0,
    )?;
    let worker_uplink = shannon_rate(
        env.worker_bandwidth_hz,
        env.worker_tx_power_w,
        env.worker_channel_gain_db,
        env.uplink_interference_w,
        n0,
    )?;
    let worker_downlink = shannon_rate(
        uav.bandwidth_hz,
        uav.tx_power_w,
        env.worker_channel_gain_db,
        0.0,
        n0,
    )?;
    let compute_s = uav.cpu_cycles_per_aggregation / uav.cpu_frequency_hz;
    Ok(transmission_time(env.cell_aggregate_bits(), uplink)?
        + transmission_time(env.global_model_bits(), downlink)?
        + transmission_time(w * env.worker_update_bits(), worker_uplink)?
        + transmission_time(w * env.global_model_bits(), worker_downlink)?
        + compute_s)
}

/// Seconds to move a payload over a link.
pub fn transmission_time(payload_bits: f64, rate_bits_per_s: f64) -> Result<f64> {
    if payload_bits == 0.0 {
        return Ok(0.0);
    }
    if rate_bits_per_s <= 0.0 {
        return Err(Error::InfeasibleLink {
            link: "transmission",
            payload_bits,
        });
    }
    Ok(payload_bits / rate_bits_per_s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Point;

    pub(crate) fn test_uav(depot: Point, energy: f64) -> Uav {
        Uav {
            id: 1,
            depot,
            energy_capacity_j: energy,
            velocity_mps: 10.0,
            flight_power_w: 1.0,
            flight_weight_depot: 1.0,
            cooperation_cost_j: 2.0,
            cpu_cycles_per_aggregation: 2e9,
            cpu_frequency_hz: 1e8,
            cpu_coefficient: 1e-26,
            bandwidth_hz: 400e3,
            tx_power_w: 1.0,
            rx_power_w: 0.5,
            channel_gain_db: 5.0,
            hover_energy_j: 5.0,
            circuit_energy_j: 5.0,
            energy_price_per_j: 0.03,
        }
    }

    fn test_cell(position: Point) -> CellSpec {
        CellSpec {
            id: 1,
            position,
            price_per_importance: 3.0,
            importance_override: Some(10.0),
            workers: vec![],
        }
    }

    fn test_env() -> RadioEnv {
        RadioEnv {
            noise_psd_dbm_per_hz: -174.0,
            uplink_interference_w: 0.0,
            owner_bandwidth_hz: 5e6,
            owner_tx_power_w: 10.0,
            global_model_size_mb: 5.0,
            cell_aggregate_size_mb: 5.0,
            worker_update_size_mb: 5.0,
            worker_bandwidth_hz: 150e3,
            worker_tx_power_w: 0.01,
            worker_channel_gain_db: 8.0,
            cell_flight_weight: 1.0,
            sampling_ranges: Default::default(),
        }
    }

    #[test]
    fn db_conversions() {
        assert_eq!(db_to_linear(0.0), 1.0);
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
        let n0 = dbm_per_hz_to_w_per_hz(-174.0);
        assert!((n0 - 3.981e-21).abs() / 3.981e-21 < 1e-3);
    }

    #[test]
    fn flying_energy_matches_geometry() {
        let env = test_env();
        let uav = test_uav((100.0, 600.0), 1000.0);
        let at_depot = test_cell((100.0, 600.0));
        assert_eq!(flying_energy(&uav, &at_depot, &env), 0.0);

        let cell = test_cell((200.0, 300.0));
        let e = flying_energy(&uav, &cell, &env);
        assert!((e - 31.6228).abs() < 1e-3, "{e}");

        let mut fast = uav.clone();
        fast.velocity_mps *= 2.0;
        assert!((flying_energy(&fast, &cell, &env) - e / 2.0).abs() < 1e-9);
    }

    #[test]
    fn compute_energy_scales_with_clock_squared() {
        let mut uav = test_uav((0.0, 0.0), 100.0);
        uav.cpu_coefficient = 0.0;
        assert_eq!(compute_energy(&uav), 0.0);

        uav.cpu_coefficient = 1e-26;
        uav.cpu_cycles_per_aggregation = 2e9;
        uav.cpu_frequency_hz = 1e8;
        assert!((compute_energy(&uav) - 0.2).abs() < 1e-12);

        uav.cpu_frequency_hz = 2e8;
        assert!((compute_energy(&uav) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn shannon_rate_reference_point() {
        assert_eq!(shannon_rate(400e3, 0.0, 5.0, 0.0, 3.981e-21).unwrap(), 0.0);
        let r = shannon_rate(400e3, 1.0, 5.0, 0.0, 3.981e-21).unwrap();
        assert!((r - 2.03e7).abs() / 2.03e7 < 5e-3, "{r}");
        let r2 = shannon_rate(400e3, 2.0, 5.0, 0.0, 3.981e-21).unwrap();
        assert!(r2 > r);
        assert!(shannon_rate(0.0, 1.0, 5.0, 0.0, 3.981e-21).is_err());
    }

    #[test]
    fn per_iteration_components() {
        let env = test_env();
        let uav = test_uav((0.0, 0.0), 1000.0);

        let none = per_iteration_energy(&uav, &env, 0).unwrap();
        assert_eq!(none.receive_from_workers, 0.0);
        assert_eq!(none.transmit_to_workers, 0.0);
        assert_eq!(none.hover, 5.0);
        assert_eq!(none.circuit, 5.0);

        let some = per_iteration_energy(&uav, &env, 2).unwrap();
        assert!((some.total()
            - (some.receive_from_workers
                + some.receive_from_owner
                + some.transmit_to_owner
                + some.transmit_to_workers
                + some.compute
                + some.hover
                + some.circuit))
            .abs()
            < 1e-12);

        let mut bigger = env.clone();
        bigger.global_model_size_mb *= 2.0;
        assert!(per_iteration_energy(&uav, &bigger, 2).unwrap().total() > some.total());
    }

    #[test]
    fn zero_rate_with_payload_is_infeasible() {
        let env = test_env();
        let mut uav = test_uav((0.0, 0.0), 1000.0);
        uav.tx_power_w = 0.0; // bypasses load-time validation on purpose
        let err = per_iteration_energy(&uav, &env, 1).unwrap_err();
        assert!(err.to_string().contains("uav_uplink"), "{err}");
    }

    /// Hover 5 J + circuit 5 J and nothing else: exactly 10 J per iteration.
    fn flat_ten_joule_env() -> RadioEnv {
        let mut env = test_env();
        env.global_model_size_mb = 0.0;
        env.cell_aggregate_size_mb = 0.0;
        env.worker_update_size_mb = 0.0;
        env
    }

    #[test]
    fn iteration_budget_floors() {
        let env = flat_ten_joule_env();
        let mut uav = test_uav((0.0, 0.0), 200.0);
        uav.cpu_coefficient = 0.0;

        let per = per_iteration_energy(&uav, &env, 0).unwrap().total();
        assert_eq!(per, 10.0);
        // Round trip to 500 m out costs 100 J, leaving 100 J for 10 rounds.
        let cell = test_cell((500.0, 0.0));
        assert_eq!(max_iterations(&uav, &cell, &env, 0, false).unwrap(), 10);

        let far = test_cell((1250.0, 0.0)); // round trip 250 J > capacity
        assert_eq!(max_iterations(&uav, &far, &env, 0, false).unwrap(), 0);
    }

    #[test]
    fn cooperation_cost_can_drop_one_iteration() {
        // Budget slack under the cooperation cost: 201 - 100 = 101 J alone
        // (10 iterations) vs 99 J in a coalition (9 iterations).
        let env = flat_ten_joule_env();
        let mut uav = test_uav((0.0, 0.0), 201.0);
        uav.cpu_coefficient = 0.0;
        let cell = test_cell((500.0, 0.0));

        assert_eq!(max_iterations(&uav, &cell, &env, 0, false).unwrap(), 10);
        assert_eq!(max_iterations(&uav, &cell, &env, 0, true).unwrap(), 9);
    }

    #[test]
    fn transmission_time_reference() {
        assert_eq!(transmission_time(0.0, 1.0).unwrap(), 0.0);
        let t = transmission_time(4e9, 2.03e7).unwrap();
        assert!((t - 197.0).abs() < 1.0, "{t}");
        let t2 = transmission_time(4e9, 2.03e7 / 2.0).unwrap();
        assert!((t2 - 2.0 * t).abs() < 1e-9);
        assert!(transmission_time(1.0, 0.0).is_err());
    }
}
