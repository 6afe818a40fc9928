//! Result sets and their on-disk form: CSV tables, an echo of the scenario
//! and a JSON manifest.

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::{Action, Cause, Policy};
use crate::experiment::CellResult;
use crate::scenario::{sha256_hex, Scenario};
use crate::spectrum::Direction;

pub const COLLISIONS_CSV: &str = "collisions.csv";
pub const SUMRATE_DL_CSV: &str = "sumrate_dl.csv";
pub const SUMRATE_UL_CSV: &str = "sumrate_ul.csv";
pub const ACTIONS_CSV: &str = "actions.csv";
pub const MANIFEST_JSON: &str = "manifest.json";
pub const SCENARIO_ECHO: &str = "scenario.toml";

pub const COLLISIONS_HEADER: [&str; 8] = ["policy", "seed", "utilization", "slot", "direction", "sector", "satellite", "prb"];
pub const SUMRATE_HEADER: [&str; 5] = ["policy", "seed", "utilization", "slot", "value_bits_per_cu"];
pub const ACTIONS_HEADER: [&str; 9] = ["policy", "seed", "utilization", "slot", "sector", "direction", "prb", "action", "cause"];

/// Everything one `run` invocation produced.
#[derive(Debug, Clone)]
pub struct ResultSet {
    pub scenario: Scenario,
    /// SHA-256 of the scenario file as read.
    pub scenario_hash: String,
    pub defaults: Vec<String>,
    pub grid: RunGrid,
    /// Cells in grid order (seed-major, then utilization).
    pub cells: Vec<CellResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunGrid {
    pub policies: Vec<Policy>,
    pub seeds: Vec<u64>,
    pub utilizations: Vec<f64>,
    /// Utilizations whose sum rates were evaluated.
    pub rate_utilizations: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    /// Data rows, header excluded.
    pub rows: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub scenario_sha256: String,
    /// Hash of the `scenario.toml` echo written next to the results.
    pub scenario_echo_sha256: String,
    pub slots: usize,
    pub collision_window: usize,
    pub grid: RunGrid,
    pub files: Vec<FileEntry>,
    /// Every value the scenario loader filled in.
    pub defaults: Vec<String>,
}

impl Manifest {
    pub fn read(dir: &Path) -> io::Result<Manifest> {
        let text = fs::read_to_string(dir.join(MANIFEST_JSON))?;
        serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }

    pub fn file(&self, name: &str) -> Option<&FileEntry> {
        self.files.iter().find(|f| f.name == name)
    }
}

fn cause_str(scenario: &Scenario, cause: Cause) -> String {
    match cause {
        Cause::Satellite(v) => scenario.satellites[v].id.clone(),
        Cause::Clear => "clear".to_string(),
    }
}

/// Writes the CSV tables, the scenario echo and the manifest into `out_dir`
/// (created if needed). Byte-identical for identical inputs.
pub fn persist_results(rs: &ResultSet, out_dir: &Path) -> io::Result<Manifest> {
    fs::create_dir_all(out_dir)?;
    let sc = &rs.scenario;
    let sector_id = |q: usize| format!("{}-{}", sc.bs_sites[q / 3].id, q % 3 + 1);

    let mut collisions = Table::new(&COLLISIONS_HEADER);
    let mut sumrate = [Table::new(&SUMRATE_HEADER), Table::new(&SUMRATE_HEADER)];
    let mut actions = Table::new(&ACTIONS_HEADER);
    for cell in &rs.cells {
        let seed = cell.seed.to_string();
        let util = cell.utilization.to_string();
        for r in &cell.results {
            let policy = r.policy.as_str();
            for (slot, c) in &r.collisions {
                collisions.row([
                    policy.to_string(),
                    seed.clone(),
                    util.clone(),
                    slot.to_string(),
                    c.direction.to_string(),
                    sector_id(c.sector),
                    sc.satellites[c.satellite].id.clone(),
                    c.prb.to_string(),
                ]);
            }
            for d in Direction::BOTH {
                for s in &r.sum_rate[d.index()] {
                    sumrate[d.index()].row([
                        policy.to_string(),
                        seed.clone(),
                        util.clone(),
                        s.slot.to_string(),
                        s.value.to_string(),
                    ]);
                }
            }
            for a in &r.actions {
                actions.row([
                    policy.to_string(),
                    seed.clone(),
                    util.clone(),
                    a.slot.to_string(),
                    sector_id(a.sector),
                    a.direction.to_string(),
                    a.prb.to_string(),
                    match a.action {
                        Action::Blank => "blank",
                        Action::Unblank => "unblank",
                    }
                    .to_string(),
                    cause_str(sc, a.cause),
                ]);
            }
        }
    }

    let [dl, ul] = sumrate;
    let mut files = Vec::new();
    for (name, table) in [
        (COLLISIONS_CSV, collisions),
        (SUMRATE_DL_CSV, dl),
        (SUMRATE_UL_CSV, ul),
        (ACTIONS_CSV, actions),
    ] {
        let rows = table.rows;
        let bytes = table.finish()?;
        fs::write(out_dir.join(name), &bytes)?;
        files.push(FileEntry {
            name: name.to_string(),
            rows,
            sha256: sha256_hex(&bytes),
        });
    }
    let echo = sc.to_toml();
    fs::write(out_dir.join(SCENARIO_ECHO), &echo)?;

    let manifest = Manifest {
        format_version: 1,
        scenario_sha256: rs.scenario_hash.clone(),
        scenario_echo_sha256: sha256_hex(echo.as_bytes()),
        slots: sc.num_slots(),
        collision_window: sc.collision_window,
        grid: rs.grid.clone(),
        files,
        defaults: rs.defaults.clone(),
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(io::Error::other)?;
    fs::write(out_dir.join(MANIFEST_JSON), json + "\n")?;
    Ok(manifest)
}

struct Table {
    writer: csv::Writer<Vec<u8>>,
    rows: usize,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Table { writer, rows: 0 }
    }

    fn row<const N: usize>(&mut self, fields: [String; N]) {
        self.writer.write_record(&fields).expect("in-memory write");
        self.rows += 1;
    }

    fn finish(self) -> io::Result<Vec<u8>> {
        self.writer.into_inner().map_err(|e| io::Error::other(e.to_string()))
    }
}
