//! Shared by the integration tests: scenario builders and an independent
//! collision oracle.
#![allow(dead_code)]

pub mod oracle;

use coexist::scenario::{parse_scenario, Scenario};

pub const ORIGIN_LON: f64 = -97.5;
pub const ORIGIN_LAT: f64 = 39.5;
const METRES_PER_DEG: f64 = 6_371_000.0 * std::f64::consts::PI / 180.0;

/// Longitude and latitude of a point `(east, north)` metres from the origin.
pub fn lonlat(east: f64, north: f64) -> (f64, f64) {
    (
        ORIGIN_LON + east / (METRES_PER_DEG * ORIGIN_LAT.to_radians().cos()),
        ORIGIN_LAT + north / METRES_PER_DEG,
    )
}

/// Centre frequency of downlink PRB `k` on the 3.7–3.709 GHz plan.
pub fn prb_centre(k: u32) -> f64 {
    3.7e9 + 180e3 * (k - 1) as f64 + 90e3
}

/// A satellite that hangs still (no Doppler) over `(east, north)` with a pencil beam.
pub fn parked_satellite(id: &str, east: f64, north: f64, carrier_hz: f64, horizon: f64) -> String {
    let (lon, lat) = lonlat(east, north);
    format!(
        r#"
[[satellite]]
id = "{id}"
beamwidth_deg = 0.01
ground_speed_mps = 1.0
carriers = [{{ frequency_hz = {carrier_hz:.1}, bandwidth_hz = 100000.0 }}]
waypoints = [[0.0, {lon}, {lat}, 550000.0], [{horizon:.1}, {lon}, {lat}, 550000.0]]
"#
    )
}

/// One three-sector site at the origin plus the given satellite tables.
pub fn one_site(horizon: f64, simulation_extra: &str, band_extra: &str, satellites: &str) -> String {
    format!(
        r#"
version = 1
seed = 1

[origin]
lon = {ORIGIN_LON}
lat = {ORIGIN_LAT}

[simulation]
horizon_s = {horizon:.1}
slot_s = 1.0
utilization = [1.0]
ues_per_sector = 4
association = "voronoi_ideal"
{simulation_extra}

[band]
f_start_hz = 3700000000.0
f_end_hz = 3709000000.0
n_prb = 50
subcarrier_spacing_hz = 15000.0
subcarriers_per_prb = 12
{band_extra}

[[bs]]
id = "A"
lon = {ORIGIN_LON}
lat = {ORIGIN_LAT}
azimuths_deg = [0.0, 120.0, 240.0]
{satellites}
"#
    )
}

pub fn parse(text: &str) -> Scenario {
    match parse_scenario(text) {
        Ok(l) => l.scenario,
        Err(e) => panic!("test scenario rejected: {e}\n{text}"),
    }
}

/// Bundled scenario with selected overrides.
pub fn default_with(f: impl FnOnce(&mut Scenario)) -> Scenario {
    let mut s = Scenario::bundled_default();
    f(&mut s);
    s
}
