//! Scenario files: a versioned TOML document describing sites, band plan,
//! satellites and simulation settings.
//!
//! Loading fills every omitted optional value with its default and records
//! it, warns about keys it does not recognise, and validates all
//! invariants. [`Scenario::to_toml`] writes a fully explicit echo that loads
//! back to an identical value.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use toml::{Table, Value};

use crate::geometry::{GeoPoint, PlanePoint};
use crate::orbit::{SatelliteTrajectory, Waypoint};
use crate::radio::{thermal_noise_power, PathLossModel};
use crate::spectrum::{BandPlan, CarrierTone, DuplexMode};

pub const SCENARIO_VERSION: i64 = 1;

/// The scenario bundled with the crate: five sites, three satellite passes.
pub const DEFAULT_SCENARIO: &str = include_str!("../scenarios/default.toml");

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed scenario file: {0}")]
    Parse(String),
    #[error("unsupported scenario version {found} (expected {SCENARIO_VERSION})")]
    Version { found: i64 },
    #[error("missing required section [{0}]")]
    MissingSection(String),
    #[error("missing required field `{0}`")]
    MissingField(String),
    #[error("field `{field}` must be {expected}")]
    Type { field: String, expected: &'static str },
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid {
        field: field.into(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssociationMode {
    /// Strongest large-scale received power, shadowing included.
    Realistic,
    /// Every UE is served by the sector whose cell it lies in.
    VoronoiIdeal,
}

impl AssociationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            AssociationMode::Realistic => "realistic",
            AssociationMode::VoronoiIdeal => "voronoi_ideal",
        }
    }
}

/// Which beam an interfering link is projected on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterferenceBeams {
    /// The victim's serving beam (combining view).
    Serving,
    /// The interferer's own best beam toward its own user (downlink only).
    Own,
}

impl InterferenceBeams {
    pub fn as_str(self) -> &'static str {
        match self {
            InterferenceBeams::Serving => "serving",
            InterferenceBeams::Own => "own",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BsSite {
    pub id: String,
    pub position: GeoPoint,
    /// Sector boresights, degrees clockwise from north.
    pub azimuths: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSettings {
    /// Total base-station power, W.
    pub bs: f64,
    /// Maximum UE power, W.
    pub ue: f64,
    /// Satellite power per carrier, W.
    pub satellite: f64,
    /// Receiver noise per PRB, W.
    pub noise: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaSettings {
    pub num_antennas: usize,
    pub num_beams: usize,
    /// Apply the horizontal sector pattern on top of path loss.
    pub sector_pattern: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub seed: u64,
    pub origin: GeoPoint,
    pub horizon: f64,
    pub slot: f64,
    pub utilization: Vec<f64>,
    pub ues_per_sector: usize,
    pub association: AssociationMode,
    pub sector_offset: f64,
    pub bounds_margin: f64,
    pub non_blankable: Vec<u32>,
    pub channel_draws: usize,
    pub collision_window: usize,
    pub interference_beams: InterferenceBeams,
    /// A sector colliding in a direction loses that direction's rate for the slot.
    pub collision_outage: bool,
    pub band: BandPlan,
    pub power: PowerSettings,
    pub antenna: AntennaSettings,
    pub pathloss: PathLossModel,
    pub satellite_pathloss: PathLossModel,
    pub bs_sites: Vec<BsSite>,
    pub satellites: Vec<SatelliteTrajectory>,
}

/// A validated scenario plus what the loader had to assume.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    /// `key = value` for every default the loader filled in.
    pub defaults: Vec<String>,
    /// Unrecognised keys.
    pub warnings: Vec<String>,
    /// SHA-256 of the file bytes, hex.
    pub hash: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<LoadedScenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario(&text)
}

pub fn parse_scenario(text: &str) -> Result<LoadedScenario, ScenarioError> {
    let root: Table = toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    let mut ctx = Ctx::default();
    let scenario = read_root(root, &mut ctx)?;
    Ok(LoadedScenario {
        scenario,
        defaults: ctx.defaults,
        warnings: ctx.warnings,
        hash: sha256_hex(text.as_bytes()),
    })
}

#[derive(Default)]
struct Ctx {
    defaults: Vec<String>,
    warnings: Vec<String>,
}

/// A table being consumed key by key; leftovers become warnings.
struct Section {
    path: String,
    table: Table,
}

impl Section {
    fn new(path: impl Into<String>, table: Table) -> Self {
        Section {
            path: path.into(),
            table,
        }
    }

    fn field(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.path)
        }
    }

    fn take(&mut self, key: &str) -> Option<Value> {
        self.table.remove(key)
    }

    fn require(&mut self, key: &str) -> Result<Value, ScenarioError> {
        self.take(key).ok_or_else(|| ScenarioError::MissingField(self.field(key)))
    }

    fn f64(&mut self, key: &str) -> Result<f64, ScenarioError> {
        let v = self.require(key)?;
        as_f64(&v, &self.field(key))
    }

    fn f64_or(&mut self, key: &str, default: f64, ctx: &mut Ctx) -> Result<f64, ScenarioError> {
        match self.take(key) {
            Some(v) => as_f64(&v, &self.field(key)),
            None => {
                ctx.defaults.push(format!("{} = {default}", self.field(key)));
                Ok(default)
            }
        }
    }

    fn u64_or(&mut self, key: &str, default: u64, ctx: &mut Ctx) -> Result<u64, ScenarioError> {
        match self.take(key) {
            Some(v) => as_u64(&v, &self.field(key)),
            None => {
                ctx.defaults.push(format!("{} = {default}", self.field(key)));
                Ok(default)
            }
        }
    }

    fn bool_or(&mut self, key: &str, default: bool, ctx: &mut Ctx) -> Result<bool, ScenarioError> {
        match self.take(key) {
            Some(Value::Boolean(b)) => Ok(b),
            Some(_) => Err(type_err(self.field(key), "a boolean")),
            None => {
                ctx.defaults.push(format!("{} = {default}", self.field(key)));
                Ok(default)
            }
        }
    }

    fn string(&mut self, key: &str) -> Result<String, ScenarioError> {
        match self.require(key)? {
            Value::String(s) => Ok(s),
            _ => Err(type_err(self.field(key), "a string")),
        }
    }

    fn string_or(&mut self, key: &str, default: &str, ctx: &mut Ctx) -> Result<String, ScenarioError> {
        match self.take(key) {
            Some(Value::String(s)) => Ok(s),
            Some(_) => Err(type_err(self.field(key), "a string")),
            None => {
                ctx.defaults.push(format!("{} = \"{default}\"", self.field(key)));
                Ok(default.to_string())
            }
        }
    }

    fn array(&mut self, key: &str) -> Result<Option<Vec<Value>>, ScenarioError> {
        match self.take(key) {
            Some(Value::Array(a)) => Ok(Some(a)),
            Some(_) => Err(type_err(self.field(key), "an array")),
            None => Ok(None),
        }
    }

    fn section(&mut self, key: &str) -> Result<Option<Section>, ScenarioError> {
        match self.take(key) {
            Some(Value::Table(t)) => Ok(Some(Section::new(self.field(key), t))),
            Some(_) => Err(type_err(self.field(key), "a table")),
            None => Ok(None),
        }
    }

    fn finish(self, ctx: &mut Ctx) {
        for key in self.table.keys() {
            let name = if self.path.is_empty() {
                key.clone()
            } else {
                format!("{}.{key}", self.path)
            };
            ctx.warnings.push(format!("unknown key `{name}` ignored"));
        }
    }
}

fn type_err(field: String, expected: &'static str) -> ScenarioError {
    ScenarioError::Type { field, expected }
}

fn as_f64(v: &Value, field: &str) -> Result<f64, ScenarioError> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(type_err(field.to_string(), "a number")),
    }
}

fn as_u64(v: &Value, field: &str) -> Result<u64, ScenarioError> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        _ => Err(type_err(field.to_string(), "a non-negative integer")),
    }
}

fn f64_list(values: Vec<Value>, field: &str) -> Result<Vec<f64>, ScenarioError> {
    values.iter().map(|v| as_f64(v, field)).collect()
}

fn read_root(root: Table, ctx: &mut Ctx) -> Result<Scenario, ScenarioError> {
    let mut root = Section::new("", root);
    match root.take("version") {
        Some(Value::Integer(SCENARIO_VERSION)) => {}
        Some(Value::Integer(found)) => return Err(ScenarioError::Version { found }),
        Some(_) => return Err(type_err("version".into(), "an integer")),
        None => return Err(ScenarioError::MissingField("version".into())),
    }
    let seed = root.u64_or("seed", 1, ctx)?;

    let mut sim = match root.section("simulation")? {
        Some(s) => s,
        None => Section::new("simulation", Table::new()),
    };
    let horizon = sim.f64_or("horizon_s", 300.0, ctx)?;
    let slot = sim.f64_or("slot_s", 1.0, ctx)?;
    let utilization = match sim.array("utilization")? {
        Some(a) => f64_list(a, "simulation.utilization")?,
        None => {
            let d = vec![0.1, 0.3, 0.5, 0.7, 0.9, 1.0];
            ctx.defaults.push(format!("simulation.utilization = {d:?}"));
            d
        }
    };
    let ues_per_sector = sim.u64_or("ues_per_sector", 10, ctx)? as usize;
    let association = match sim.string_or("association", "realistic", ctx)?.as_str() {
        "realistic" => AssociationMode::Realistic,
        "voronoi_ideal" => AssociationMode::VoronoiIdeal,
        other => {
            return Err(invalid(
                "simulation.association",
                format!("unknown mode \"{other}\" (expected \"realistic\" or \"voronoi_ideal\")"),
            ))
        }
    };
    let sector_offset = sim.f64_or("sector_offset_m", 50.0, ctx)?;
    let bounds_margin = sim.f64_or("bounds_margin_m", 10_000.0, ctx)?;
    let non_blankable = match sim.array("non_blankable")? {
        Some(a) => a
            .iter()
            .map(|v| as_u64(v, "simulation.non_blankable").map(|k| k as u32))
            .collect::<Result<Vec<_>, _>>()?,
        None => {
            ctx.defaults.push("simulation.non_blankable = [1, 2]".into());
            vec![1, 2]
        }
    };
    let channel_draws = sim.u64_or("channel_draws", 2, ctx)? as usize;
    let collision_window = sim.u64_or("collision_window", 2, ctx)? as usize;
    let interference_beams = match sim.string_or("interference_beams", "serving", ctx)?.as_str() {
        "serving" => InterferenceBeams::Serving,
        "own" => InterferenceBeams::Own,
        other => {
            return Err(invalid(
                "simulation.interference_beams",
                format!("unknown mode \"{other}\" (expected \"serving\" or \"own\")"),
            ))
        }
    };
    let collision_outage = sim.bool_or("collision_outage", true, ctx)?;
    sim.finish(ctx);

    let band = {
        let mut s = root
            .section("band")?
            .ok_or_else(|| ScenarioError::MissingSection("band".into()))?;
        let f_start = s.f64("f_start_hz")?;
        let f_end = s.f64("f_end_hz")?;
        let n_prb = s.u64_or("n_prb", 50, ctx)? as u32;
        let scs = s.f64_or("subcarrier_spacing_hz", 15e3, ctx)?;
        let sc = s.u64_or("subcarriers_per_prb", 12, ctx)? as u32;
        let duplex = match s.string_or("duplex", "tdd", ctx)?.as_str() {
            "tdd" => DuplexMode::Tdd,
            "fdd" => DuplexMode::Fdd,
            other => return Err(invalid("band.duplex", format!("unknown duplex mode \"{other}\""))),
        };
        let dd = s.f64_or("duplex_distance_hz", 0.0, ctx)?;
        s.finish(ctx);
        BandPlan {
            f_start,
            f_end,
            n_prb,
            subcarrier_spacing: scs,
            subcarriers_per_prb: sc,
            duplex_mode: duplex,
            duplex_distance: dd,
        }
    };
    band.validate().map_err(|e| invalid("band", e.to_string()))?;

    let power = {
        let mut s = root.section("power")?.unwrap_or_else(|| Section::new("power", Table::new()));
        let bs = s.f64_or("bs_w", 40.0, ctx)?;
        let ue = s.f64_or("ue_w", 0.2, ctx)?;
        let satellite = s.f64_or("satellite_w", 10.0, ctx)?;
        let noise = match s.take("noise_w") {
            Some(v) => as_f64(&v, "power.noise_w")?,
            None => {
                let nf = s.f64_or("noise_figure_db", 9.0, ctx)?;
                let n = thermal_noise_power(band.prb_width(), nf);
                ctx.defaults.push(format!("power.noise_w = {n}"));
                n
            }
        };
        s.finish(ctx);
        PowerSettings { bs, ue, satellite, noise }
    };

    let antenna = {
        let mut s = root.section("antenna")?.unwrap_or_else(|| Section::new("antenna", Table::new()));
        let num_antennas = s.u64_or("num_antennas", 4, ctx)? as usize;
        let num_beams = s.u64_or("num_beams", 2 * num_antennas as u64, ctx)? as usize;
        let sector_pattern = s.bool_or("sector_pattern", true, ctx)?;
        s.finish(ctx);
        AntennaSettings {
            num_antennas,
            num_beams,
            sector_pattern,
        }
    };

    let pathloss = read_pathloss(root.section("pathloss")?, "pathloss", PathLossModel::TERRESTRIAL, ctx)?;
    let satellite_pathloss = read_pathloss(
        root.section("satellite_pathloss")?,
        "satellite_pathloss",
        PathLossModel::SATELLITE,
        ctx,
    )?;

    let mut bs_sites = Vec::new();
    match root.take("bs") {
        Some(Value::Array(items)) => {
            for (i, item) in items.into_iter().enumerate() {
                let Value::Table(t) = item else {
                    return Err(type_err(format!("bs[{i}]"), "a table"));
                };
                bs_sites.push(read_bs(Section::new(format!("bs[{i}]"), t), ctx)?);
            }
        }
        Some(_) => return Err(type_err("bs".into(), "an array of tables")),
        None => return Err(ScenarioError::MissingSection("bs".into())),
    }

    let mut satellites = Vec::new();
    match root.take("satellite") {
        Some(Value::Array(items)) => {
            for (i, item) in items.into_iter().enumerate() {
                let Value::Table(t) = item else {
                    return Err(type_err(format!("satellite[{i}]"), "a table"));
                };
                satellites.push(read_satellite(Section::new(format!("satellite[{i}]"), t), ctx)?);
            }
        }
        Some(_) => return Err(type_err("satellite".into(), "an array of tables")),
        None => ctx.defaults.push("satellite = [] (no satellites)".into()),
    }

    let origin = match root.section("origin")? {
        Some(mut s) => {
            let lon = s.f64("lon")?;
            let lat = s.f64("lat")?;
            s.finish(ctx);
            GeoPoint::new(lon, lat).map_err(|e| invalid("origin", e.to_string()))?
        }
        None => {
            let n = bs_sites.len().max(1) as f64;
            let lon = bs_sites.iter().map(|b| b.position.longitude).sum::<f64>() / n;
            let lat = bs_sites.iter().map(|b| b.position.latitude).sum::<f64>() / n;
            ctx.defaults.push(format!("origin = {{ lon = {lon}, lat = {lat} }} (site centroid)"));
            GeoPoint::new(lon, lat).map_err(|e| invalid("origin", e.to_string()))?
        }
    };
    root.finish(ctx);

    let scenario = Scenario {
        seed,
        origin,
        horizon,
        slot,
        utilization,
        ues_per_sector,
        association,
        sector_offset,
        bounds_margin,
        non_blankable,
        channel_draws,
        collision_window,
        interference_beams,
        collision_outage,
        band,
        power,
        antenna,
        pathloss,
        satellite_pathloss,
        bs_sites,
        satellites,
    };
    scenario.validate()?;
    Ok(scenario)
}

fn read_pathloss(
    section: Option<Section>,
    name: &str,
    default: PathLossModel,
    ctx: &mut Ctx,
) -> Result<PathLossModel, ScenarioError> {
    let mut s = section.unwrap_or_else(|| Section::new(name, Table::new()));
    let m = PathLossModel {
        exponent: s.f64_or("exponent", default.exponent, ctx)?,
        reference_loss_db: s.f64_or("reference_loss_db", default.reference_loss_db, ctx)?,
        reference_distance: s.f64_or("reference_distance_m", default.reference_distance, ctx)?,
        shadowing_sigma_db: s.f64_or("shadowing_sigma_db", default.shadowing_sigma_db, ctx)?,
    };
    s.finish(ctx);
    Ok(m)
}

fn read_bs(mut s: Section, ctx: &mut Ctx) -> Result<BsSite, ScenarioError> {
    let id = s.string("id")?;
    let lon = s.f64("lon")?;
    let lat = s.f64("lat")?;
    let position = GeoPoint::new(lon, lat).map_err(|e| invalid(format!("bs \"{id}\""), e.to_string()))?;
    let field = format!("bs \"{id}\" azimuths_deg");
    let az = match s.array("azimuths_deg")? {
        Some(a) => f64_list(a, &field)?,
        None => {
            ctx.defaults.push(format!("{} = [0, 120, 240]", s.field("azimuths_deg")));
            vec![0.0, 120.0, 240.0]
        }
    };
    if az.len() != 3 {
        return Err(invalid(field, format!("expected exactly 3 sector azimuths, got {}", az.len())));
    }
    s.finish(ctx);
    Ok(BsSite {
        id,
        position,
        azimuths: [az[0], az[1], az[2]],
    })
}

fn read_satellite(mut s: Section, ctx: &mut Ctx) -> Result<SatelliteTrajectory, ScenarioError> {
    let id = s.string("id")?;
    let name = format!("satellite \"{id}\"");
    let beamwidth = s.f64_or("beamwidth_deg", 60.0, ctx)?;
    let ground_speed = s.f64_or("ground_speed_mps", 7_800.0, ctx)?;
    let carriers = s
        .array("carriers")?
        .ok_or_else(|| ScenarioError::MissingField(format!("{name}.carriers")))?
        .into_iter()
        .map(|c| {
            let Value::Table(t) = c else {
                return Err(type_err(format!("{name}.carriers"), "an array of tables"));
            };
            let mut c = Section::new(format!("{name}.carriers"), t);
            let f = c.f64("frequency_hz")?;
            let bw = c.f64_or("bandwidth_hz", 0.0, ctx)?;
            c.finish(ctx);
            CarrierTone::new(f, bw).map_err(|e| invalid(format!("{name}.carriers"), e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let waypoints = s
        .array("waypoints")?
        .ok_or_else(|| ScenarioError::MissingField(format!("{name}.waypoints")))?
        .into_iter()
        .map(|w| {
            let field = format!("{name}.waypoints");
            let Value::Array(row) = w else {
                return Err(type_err(field, "a list of [t_s, lon, lat, alt_m] rows"));
            };
            let row = f64_list(row, &field)?;
            if row.len() != 4 {
                return Err(invalid(field, "each waypoint is [t_s, lon, lat, alt_m]"));
            }
            Ok(Waypoint {
                time: row[0],
                position: GeoPoint::new(row[1], row[2]).map_err(|e| invalid(field, e.to_string()))?,
                altitude: row[3],
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    s.finish(ctx);
    Ok(SatelliteTrajectory {
        id,
        waypoints,
        ground_speed,
        carriers,
        beamwidth,
    })
}

impl Scenario {
    /// Parses the bundled default scenario.
    pub fn bundled_default() -> Scenario {
        parse_scenario(DEFAULT_SCENARIO)
            .expect("bundled scenario is valid")
            .scenario
    }

    pub fn num_sectors(&self) -> usize {
        3 * self.bs_sites.len()
    }

    /// Number of simulated slots, `horizon / slot`.
    pub fn num_slots(&self) -> usize {
        (self.horizon / self.slot + 1e-9).floor() as usize
    }

    /// Downlink power per PRB, `P_BS / N_PRB`.
    pub fn dl_power_per_prb(&self) -> f64 {
        self.power.bs / f64::from(self.band.n_prb)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(self.slot > 0.0) {
            return Err(invalid("simulation.slot_s", "must be positive"));
        }
        if !(self.horizon >= self.slot) {
            return Err(invalid("simulation.horizon_s", "must be at least one slot"));
        }
        if self.utilization.is_empty() {
            return Err(invalid("simulation.utilization", "must list at least one value"));
        }
        if let Some(u) = self.utilization.iter().find(|u| !(**u > 0.0 && **u <= 1.0)) {
            return Err(invalid("simulation.utilization", format!("{u} is outside (0, 1]")));
        }
        if self.ues_per_sector == 0 {
            return Err(invalid("simulation.ues_per_sector", "must be at least 1"));
        }
        if !(self.sector_offset > 0.0) {
            return Err(invalid("simulation.sector_offset_m", "must be positive"));
        }
        if !(self.bounds_margin > 0.0) {
            return Err(invalid("simulation.bounds_margin_m", "must be positive"));
        }
        if let Some(k) = self.non_blankable.iter().find(|k| **k == 0 || **k > self.band.n_prb) {
            return Err(invalid("simulation.non_blankable", format!("PRB {k} is outside 1..={}", self.band.n_prb)));
        }
        if self.channel_draws == 0 {
            return Err(invalid("simulation.channel_draws", "must be at least 1"));
        }
        self.band.validate().map_err(|e| invalid("band", e.to_string()))?;
        for (name, v) in [("power.bs_w", self.power.bs), ("power.ue_w", self.power.ue), ("power.satellite_w", self.power.satellite)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(name, "must be a non-negative number of watts"));
            }
        }
        if !(self.power.noise > 0.0) {
            return Err(invalid("power.noise_w", "must be positive"));
        }
        if self.antenna.num_antennas == 0 || self.antenna.num_beams == 0 {
            return Err(invalid("antenna", "antenna and beam counts must be at least 1"));
        }
        for (name, m) in [("pathloss", &self.pathloss), ("satellite_pathloss", &self.satellite_pathloss)] {
            if !(m.reference_distance > 0.0 && m.exponent >= 0.0 && m.shadowing_sigma_db >= 0.0) {
                return Err(invalid(name, "needs a positive reference distance and non-negative exponent and sigma"));
            }
        }
        if self.bs_sites.is_empty() {
            return Err(invalid("bs", "at least one base station is required"));
        }
        for (i, a) in self.bs_sites.iter().enumerate() {
            if !is_plain_id(&a.id) {
                return Err(invalid(format!("bs[{i}].id"), "use letters, digits, '-', '_' or '.'"));
            }
            for b in &self.bs_sites[..i] {
                if a.id == b.id {
                    return Err(invalid("bs", format!("duplicate id \"{}\"", a.id)));
                }
                if a.position == b.position {
                    return Err(invalid(
                        "bs",
                        format!("bs \"{}\" has the same coordinates as bs \"{}\"", a.id, b.id),
                    ));
                }
            }
            if let Err(e) = crate::geometry::project_to_plane(a.position, self.origin) {
                return Err(invalid(format!("bs \"{}\"", a.id), e.to_string()));
            }
        }
        for (i, s) in self.satellites.iter().enumerate() {
            let name = format!("satellite \"{}\"", s.id);
            if !is_plain_id(&s.id) {
                return Err(invalid(format!("satellite[{i}].id"), "use letters, digits, '-', '_' or '.'"));
            }
            if self.satellites[..i].iter().any(|o| o.id == s.id) {
                return Err(invalid("satellite", format!("duplicate id \"{}\"", s.id)));
            }
            s.validate().map_err(|e| invalid(&name, e.to_string()))?;
            let (start, end) = s.span();
            if start > 0.0 || end < self.horizon {
                return Err(invalid(
                    name,
                    format!("waypoints span [{start}, {end}] s but must cover [0, {}] s", self.horizon),
                ));
            }
        }
        Ok(())
    }

    /// Writes a fully explicit scenario file that parses back to `self`.
    pub fn to_toml(&self) -> String {
        let mut root = Table::new();
        root.insert("version".into(), Value::Integer(SCENARIO_VERSION));
        root.insert("seed".into(), Value::Integer(self.seed as i64));

        let mut origin = Table::new();
        origin.insert("lon".into(), self.origin.longitude.into());
        origin.insert("lat".into(), self.origin.latitude.into());
        root.insert("origin".into(), Value::Table(origin));

        let mut sim = Table::new();
        sim.insert("horizon_s".into(), self.horizon.into());
        sim.insert("slot_s".into(), self.slot.into());
        sim.insert("utilization".into(), floats(&self.utilization));
        sim.insert("ues_per_sector".into(), Value::Integer(self.ues_per_sector as i64));
        sim.insert("association".into(), self.association.as_str().into());
        sim.insert("sector_offset_m".into(), self.sector_offset.into());
        sim.insert("bounds_margin_m".into(), self.bounds_margin.into());
        sim.insert(
            "non_blankable".into(),
            Value::Array(self.non_blankable.iter().map(|k| Value::Integer(i64::from(*k))).collect()),
        );
        sim.insert("channel_draws".into(), Value::Integer(self.channel_draws as i64));
        sim.insert("collision_window".into(), Value::Integer(self.collision_window as i64));
        sim.insert("interference_beams".into(), self.interference_beams.as_str().into());
        sim.insert("collision_outage".into(), self.collision_outage.into());
        root.insert("simulation".into(), Value::Table(sim));

        let b = &self.band;
        let mut band = Table::new();
        band.insert("f_start_hz".into(), b.f_start.into());
        band.insert("f_end_hz".into(), b.f_end.into());
        band.insert("n_prb".into(), Value::Integer(i64::from(b.n_prb)));
        band.insert("subcarrier_spacing_hz".into(), b.subcarrier_spacing.into());
        band.insert("subcarriers_per_prb".into(), Value::Integer(i64::from(b.subcarriers_per_prb)));
        let duplex = match b.duplex_mode {
            DuplexMode::Tdd => "tdd",
            DuplexMode::Fdd => "fdd",
        };
        band.insert("duplex".into(), duplex.into());
        band.insert("duplex_distance_hz".into(), b.duplex_distance.into());
        root.insert("band".into(), Value::Table(band));

        let mut power = Table::new();
        power.insert("bs_w".into(), self.power.bs.into());
        power.insert("ue_w".into(), self.power.ue.into());
        power.insert("satellite_w".into(), self.power.satellite.into());
        power.insert("noise_w".into(), self.power.noise.into());
        root.insert("power".into(), Value::Table(power));

        let mut antenna = Table::new();
        antenna.insert("num_antennas".into(), Value::Integer(self.antenna.num_antennas as i64));
        antenna.insert("num_beams".into(), Value::Integer(self.antenna.num_beams as i64));
        antenna.insert("sector_pattern".into(), self.antenna.sector_pattern.into());
        root.insert("antenna".into(), Value::Table(antenna));

        for (name, m) in [("pathloss", &self.pathloss), ("satellite_pathloss", &self.satellite_pathloss)] {
            let mut t = Table::new();
            t.insert("exponent".into(), m.exponent.into());
            t.insert("reference_loss_db".into(), m.reference_loss_db.into());
            t.insert("reference_distance_m".into(), m.reference_distance.into());
            t.insert("shadowing_sigma_db".into(), m.shadowing_sigma_db.into());
            root.insert(name.into(), Value::Table(t));
        }

        let bs = self
            .bs_sites
            .iter()
            .map(|b| {
                let mut t = Table::new();
                t.insert("id".into(), b.id.clone().into());
                t.insert("lon".into(), b.position.longitude.into());
                t.insert("lat".into(), b.position.latitude.into());
                t.insert("azimuths_deg".into(), floats(&b.azimuths));
                Value::Table(t)
            })
            .collect();
        root.insert("bs".into(), Value::Array(bs));

        {
            let sats = self
                .satellites
                .iter()
                .map(|s| {
                    let mut t = Table::new();
                    t.insert("id".into(), s.id.clone().into());
                    t.insert("beamwidth_deg".into(), s.beamwidth.into());
                    t.insert("ground_speed_mps".into(), s.ground_speed.into());
                    let carriers = s
                        .carriers
                        .iter()
                        .map(|c| {
                            let mut ct = Table::new();
                            ct.insert("frequency_hz".into(), c.sky_frequency.into());
                            ct.insert("bandwidth_hz".into(), c.occupied_bandwidth.into());
                            Value::Table(ct)
                        })
                        .collect();
                    t.insert("carriers".into(), Value::Array(carriers));
                    let wps = s
                        .waypoints
                        .iter()
                        .map(|w| floats(&[w.time, w.position.longitude, w.position.latitude, w.altitude]))
                        .collect();
                    t.insert("waypoints".into(), Value::Array(wps));
                    Value::Table(t)
                })
                .collect();
            root.insert("satellite".into(), Value::Array(sats));
        }

        toml::to_string(&root).expect("scenario tables serialize")
    }

    /// Human-readable one-line-per-setting listing of the resolved scenario.
    pub fn describe(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} base stations ({} sectors), {} satellites, {} slots of {} s",
            self.bs_sites.len(),
            self.num_sectors(),
            self.satellites.len(),
            self.num_slots(),
            self.slot
        );
        let _ = writeln!(
            s,
            "band {:.3}-{:.3} MHz, {} PRBs, association {}",
            self.band.f_start / 1e6,
            self.band.f_end / 1e6,
            self.band.n_prb,
            self.association.as_str()
        );
        s
    }
}

fn floats(values: &[f64]) -> Value {
    Value::Array(values.iter().map(|v| Value::Float(*v)).collect())
}

fn is_plain_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

/// Planar position of every sector site: the BS site moved `sector_offset`
/// meters along the sector azimuth. Sector `3b + i` is azimuth `i` of BS `b`.
pub fn sector_sites(scenario: &Scenario) -> Result<Vec<(String, PlanePoint)>, ScenarioError> {
    let mut out = Vec::with_capacity(scenario.num_sectors());
    for b in &scenario.bs_sites {
        let base = crate::geometry::project_to_plane(b.position, scenario.origin)
            .map_err(|e| invalid(format!("bs \"{}\"", b.id), e.to_string()))?;
        for (i, az) in b.azimuths.iter().enumerate() {
            let a = az.to_radians();
            let p = base.translate(scenario.sector_offset * a.sin(), scenario.sector_offset * a.cos());
            out.push((format!("{}-{}", b.id, i + 1), p));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> String {
        r#"
version = 1
[band]
f_start_hz = 3.7e9
f_end_hz = 3.709e9
[[bs]]
id = "A"
lon = -97.5
lat = 39.5
azimuths_deg = [0, 90, 240]
"#
        .to_string()
    }

    #[test]
    fn bundled_default_loads_without_warnings() {
        let loaded = parse_scenario(DEFAULT_SCENARIO).unwrap();
        assert!(loaded.warnings.is_empty(), "{:?}", loaded.warnings);
        assert_eq!(loaded.scenario.bs_sites.len(), 5);
        assert_eq!(loaded.scenario.satellites.len(), 3);
        assert_eq!(sector_sites(&loaded.scenario).unwrap().len(), 15);
    }

    #[test]
    fn defaults_are_listed() {
        let loaded = parse_scenario(&minimal()).unwrap();
        let s = &loaded.scenario;
        assert_eq!(s.horizon, 300.0);
        assert_eq!(s.non_blankable, vec![1, 2]);
        assert_eq!(s.band.n_prb, 50);
        assert!((s.dl_power_per_prb() - 0.8).abs() < 1e-12);
        for key in ["simulation.horizon_s", "band.n_prb", "power.noise_w", "pathloss.exponent", "origin"] {
            assert!(loaded.defaults.iter().any(|d| d.starts_with(key)), "{key} not listed");
        }
    }

    #[test]
    fn sector_offsets_follow_azimuth() {
        let s = parse_scenario(&minimal()).unwrap().scenario;
        let sites = sector_sites(&s).unwrap();
        assert_eq!(sites[0].0, "A-1");
        assert!(sites[0].1.x.abs() < 1e-9 && (sites[0].1.y - 50.0).abs() < 1e-9);
        assert!((sites[1].1.x - 50.0).abs() < 1e-9 && sites[1].1.y.abs() < 1e-9);
    }

    #[test]
    fn two_azimuths_names_the_bs() {
        let text = minimal().replace("[0, 90, 240]", "[0, 90]");
        let err = parse_scenario(&text).unwrap_err().to_string();
        assert!(err.contains("\"A\""), "{err}");
    }

    #[test]
    fn duplicate_coordinates_rejected() {
        let text = minimal() + "[[bs]]\nid = \"B\"\nlon = -97.5\nlat = 39.5\n";
        let err = parse_scenario(&text).unwrap_err().to_string();
        assert!(err.contains("same coordinates"), "{err}");
    }

    #[test]
    fn missing_band_names_section() {
        let text = minimal().replace("[band]\nf_start_hz = 3.7e9\nf_end_hz = 3.709e9\n", "");
        assert!(matches!(parse_scenario(&text), Err(ScenarioError::MissingSection(s)) if s == "band"));
    }

    #[test]
    fn unknown_keys_warn() {
        let text = minimal().replace("[band]", "colour = \"blue\"\n[band]\nflavour = 1");
        let loaded = parse_scenario(&text).unwrap();
        assert_eq!(loaded.warnings.len(), 2, "{:?}", loaded.warnings);
    }

    #[test]
    fn version_mismatch() {
        let text = minimal().replace("version = 1", "version = 2");
        assert!(matches!(parse_scenario(&text), Err(ScenarioError::Version { found: 2 })));
    }

    #[test]
    fn echo_round_trip_is_identical() {
        for text in [DEFAULT_SCENARIO.to_string(), minimal()] {
            let first = parse_scenario(&text).unwrap();
            let echo = first.scenario.to_toml();
            let second = parse_scenario(&echo).unwrap();
            assert_eq!(first.scenario, second.scenario);
            assert!(second.defaults.is_empty(), "{:?}", second.defaults);
            assert!(second.warnings.is_empty());
            assert_eq!(echo, second.scenario.to_toml());
        }
    }

    #[test]
    fn trajectories_must_cover_horizon() {
        let mut s = Scenario::bundled_default();
        s.horizon = 10_000.0;
        assert!(s.validate().unwrap_err().to_string().contains("must cover"));
    }
}
