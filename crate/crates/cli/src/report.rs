use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use coexist::engine::Policy;
use coexist::metrics::{collision_summary, CollisionSummaryRow, EmpiricalCdf, RunCollisions};
use coexist::results::{Manifest, COLLISIONS_CSV, SCENARIO_ECHO, SUMRATE_DL_CSV, SUMRATE_UL_CSV};
use coexist::scenario::sha256_hex;
use coexist::spectrum::Direction;
use serde::Deserialize;

use crate::{plot, CmdResult, Failure};

/// Evenly spaced abscissae of the CDF tables.
pub const CDF_POINTS: usize = 512;
/// Probabilities at which quantiles are tabulated.
pub const QUANTILE_PS: [f64; 2] = [0.6, 0.8];

#[derive(Debug, Clone)]
pub struct ReportSpec {
    pub dirs: Vec<PathBuf>,
    pub out: PathBuf,
    /// Utilization whose sum rates are summarised; the largest evaluated one by default.
    pub utilization: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantileRow {
    pub direction: Direction,
    pub p: f64,
    pub epa: f64,
    pub proposed: f64,
    /// `proposed / epa` (infinite when EPA's quantile is zero).
    pub ratio: f64,
}

/// Sum-rate distribution summary for one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionReport {
    pub direction: Direction,
    pub epa: EmpiricalCdf,
    pub proposed: EmpiricalCdf,
    /// The common evenly spaced abscissae.
    pub grid: Vec<f64>,
    /// Largest `F_proposed(w) - F_epa(w)` over the grid; `<= 0` means the
    /// proposed policy dominates everywhere.
    pub max_dominance_gap: f64,
    pub quantiles: Vec<QuantileRow>,
}

impl DirectionReport {
    pub fn quantile(&self, p: f64) -> Option<&QuantileRow> {
        self.quantiles.iter().find(|q| q.p == p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub collisions: Vec<CollisionSummaryRow>,
    /// Utilization of the sum-rate summaries, if any were evaluated.
    pub rate_utilization: Option<f64>,
    /// Downlink then uplink; empty without sum-rate data.
    pub directions: Vec<DirectionReport>,
    pub files: Vec<PathBuf>,
}

impl Report {
    pub fn direction(&self, d: Direction) -> Option<&DirectionReport> {
        self.directions.iter().find(|r| r.direction == d)
    }

    pub fn collision_mean(&self, policy: Policy, utilization: f64) -> Option<f64> {
        self.collisions
            .iter()
            .find(|r| r.policy == policy && r.utilization == utilization)
            .map(|r| r.mean)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for r in &self.collisions {
            let _ = writeln!(
                s,
                "collisions {:<8} u={:<4} mean {:>10.2} ± {:.2} ({} runs)",
                r.policy, r.utilization, r.mean, r.stderr, r.runs
            );
        }
        if let Some(u) = self.rate_utilization {
            let _ = writeln!(s, "sum rate at utilization {u}:");
        }
        for d in &self.directions {
            let _ = writeln!(
                s,
                "  {} F(0): epa {:.3}, proposed {:.3}; max F_proposed - F_epa {:.4}",
                d.direction,
                d.epa.eval(0.0),
                d.proposed.eval(0.0),
                d.max_dominance_gap
            );
            for q in &d.quantiles {
                let _ = writeln!(
                    s,
                    "  {} q{}: epa {:.4}, proposed {:.4}, ratio {:.2}",
                    q.direction, q.p, q.epa, q.proposed, q.ratio
                );
            }
        }
        for f in &self.files {
            let _ = writeln!(s, "wrote {}", f.display());
        }
        s
    }
}

#[derive(Deserialize)]
struct CollisionRow {
    policy: Policy,
    seed: u64,
    utilization: f64,
}

#[derive(Deserialize)]
struct SumRateRow {
    policy: Policy,
    utilization: f64,
    value_bits_per_cu: f64,
}

fn io_err(e: impl Into<anyhow::Error>, what: &Path) -> Failure {
    Failure::Io(e.into().context(format!("reading {}", what.display())))
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> CmdResult<Vec<T>> {
    let bytes = fs::read(path).map_err(|e| io_err(e, path))?;
    csv::Reader::from_reader(bytes.as_slice())
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| Failure::Input(anyhow!(e).context(format!("malformed {}", path.display()))))
}

/// Confirms that the echo and every listed file still match their recorded hashes.
fn verify(dir: &Path, m: &Manifest) -> CmdResult<()> {
    let echo = dir.join(SCENARIO_ECHO);
    let bytes = fs::read(&echo).map_err(|e| io_err(e, &echo))?;
    if sha256_hex(&bytes) != m.scenario_echo_sha256 {
        return Err(Failure::Input(anyhow!("{} does not match its manifest hash", echo.display())));
    }
    for f in &m.files {
        let path = dir.join(&f.name);
        let bytes = fs::read(&path).map_err(|e| io_err(e, &path))?;
        if sha256_hex(&bytes) != f.sha256 {
            return Err(Failure::Input(anyhow!("{} does not match its manifest hash", path.display())));
        }
    }
    Ok(())
}

/// Aggregates result directories into `collisions_summary.csv`,
/// `cdf_{dl,ul}.csv`, `quantiles.csv` and SVG plots under `spec.out`.
pub fn cmd_report(spec: &ReportSpec) -> CmdResult<Report> {
    let mut manifests = Vec::new();
    for dir in &spec.dirs {
        let m = Manifest::read(dir).map_err(|e| io_err(e, &dir.join("manifest.json")))?;
        verify(dir, &m)?;
        if let Some(first) = manifests.first().map(|(_, m): &(PathBuf, Manifest)| m) {
            if first.scenario_sha256 != m.scenario_sha256 {
                return Err(Failure::Input(anyhow!("{} was produced from a different scenario", dir.display())));
            }
        }
        manifests.push((dir.clone(), m));
    }

    // collision totals, with zero for runs that never collided
    let mut runs = Vec::new();
    for (dir, m) in &manifests {
        let mut totals: HashMap<(Policy, u64, u64), usize> = HashMap::new();
        for r in read_rows::<CollisionRow>(&dir.join(COLLISIONS_CSV))? {
            *totals.entry((r.policy, r.seed, r.utilization.to_bits())).or_default() += 1;
        }
        for &policy in &m.grid.policies {
            for &seed in &m.grid.seeds {
                for &u in &m.grid.utilizations {
                    runs.push(RunCollisions {
                        policy,
                        seed,
                        utilization: u,
                        total: totals.get(&(policy, seed, u.to_bits())).copied().unwrap_or(0),
                    });
                }
            }
        }
    }
    let collisions = collision_summary(&runs).map_err(|e| Failure::Input(anyhow!(e)))?;

    let evaluated: Vec<f64> = manifests.iter().flat_map(|(_, m)| m.grid.rate_utilizations.clone()).collect();
    let rate_utilization = match spec.utilization {
        Some(u) if !evaluated.contains(&u) => {
            return Err(Failure::Input(anyhow!("no sum-rate data at utilization {u}")));
        }
        Some(u) => Some(u),
        None => evaluated.iter().copied().reduce(f64::max),
    };

    let mut directions = Vec::new();
    if let Some(u) = rate_utilization {
        for d in Direction::BOTH {
            let name = match d {
                Direction::Downlink => SUMRATE_DL_CSV,
                Direction::Uplink => SUMRATE_UL_CSV,
            };
            let mut samples: HashMap<Policy, Vec<f64>> = HashMap::new();
            for (dir, m) in &manifests {
                if !m.grid.rate_utilizations.contains(&u) {
                    continue;
                }
                for r in read_rows::<SumRateRow>(&dir.join(name))? {
                    if r.utilization == u {
                        samples.entry(r.policy).or_default().push(r.value_bits_per_cu);
                    }
                }
            }
            let cdf = |p: Policy| -> CmdResult<EmpiricalCdf> {
                let s = samples.get(&p).map(Vec::as_slice).unwrap_or(&[]);
                EmpiricalCdf::new(s).map_err(|_| Failure::Input(anyhow!("no {d} sum-rate samples for {p} at utilization {u}")))
            };
            directions.push(direction_report(d, cdf(Policy::Epa)?, cdf(Policy::Proposed)?));
        }
    }

    let mut report = Report {
        collisions,
        rate_utilization,
        directions,
        files: Vec::new(),
    };
    write_outputs(&spec.out, &mut report)?;
    Ok(report)
}

fn direction_report(direction: Direction, epa: EmpiricalCdf, proposed: EmpiricalCdf) -> DirectionReport {
    let lo = epa.samples()[0].min(proposed.samples()[0]);
    let hi = epa.samples()[epa.len() - 1].max(proposed.samples()[proposed.len() - 1]);
    let grid: Vec<f64> = (0..CDF_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (CDF_POINTS - 1) as f64)
        .collect();
    let max_dominance_gap = grid
        .iter()
        .map(|&w| proposed.eval(w) - epa.eval(w))
        .fold(f64::NEG_INFINITY, f64::max);
    let quantiles = QUANTILE_PS
        .iter()
        .map(|&p| {
            // p lies in (0, 1], so these cannot fail
            let e = epa.quantile(p).expect("valid probability");
            let q = proposed.quantile(p).expect("valid probability");
            QuantileRow {
                direction,
                p,
                epa: e,
                proposed: q,
                ratio: q / e,
            }
        })
        .collect();
    DirectionReport {
        direction,
        epa,
        proposed,
        grid,
        max_dominance_gap,
        quantiles,
    }
}

fn short(d: Direction) -> &'static str {
    match d {
        Direction::Downlink => "dl",
        Direction::Uplink => "ul",
    }
}

/// The CDF of `cdf` on the common grid plus its own sample points.
fn curve(d: &DirectionReport, cdf: &EmpiricalCdf) -> Vec<(f64, f64)> {
    let mut xs = d.grid.clone();
    xs.extend_from_slice(cdf.samples());
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs.into_iter().map(|x| (x, cdf.eval(x))).collect()
}

fn write_outputs(out: &Path, report: &mut Report) -> CmdResult<()> {
    let fail = |e: anyhow::Error| Failure::Io(e.context(format!("writing into {}", out.display())));
    fs::create_dir_all(out).map_err(|e| fail(e.into()))?;
    let mut files = Vec::new();
    let mut write_csv = |name: &str, header: &[&str], rows: Vec<Vec<String>>| -> CmdResult<()> {
        let path = out.join(name);
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(&path)
            .map_err(|e| fail(e.into()))?;
        w.write_record(header).map_err(|e| fail(e.into()))?;
        for r in rows {
            w.write_record(&r).map_err(|e| fail(e.into()))?;
        }
        w.flush().map_err(|e| fail(e.into()))?;
        files.push(path);
        Ok(())
    };

    write_csv(
        "collisions_summary.csv",
        &["policy", "utilization", "runs", "mean", "stderr"],
        report
            .collisions
            .iter()
            .map(|r| vec![r.policy.to_string(), r.utilization.to_string(), r.runs.to_string(), r.mean.to_string(), r.stderr.to_string()])
            .collect(),
    )?;
    for d in &report.directions {
        let mut rows = Vec::new();
        for (policy, cdf) in [(Policy::Epa, &d.epa), (Policy::Proposed, &d.proposed)] {
            for (x, f) in curve(d, cdf) {
                rows.push(vec![policy.to_string(), x.to_string(), f.to_string()]);
            }
        }
        write_csv(&format!("cdf_{}.csv", short(d.direction)), &["policy", "value_bits_per_cu", "cdf"], rows)?;
    }
    if !report.directions.is_empty() {
        write_csv(
            "quantiles.csv",
            &["direction", "p", "epa", "proposed", "ratio"],
            report
                .directions
                .iter()
                .flat_map(|d| &d.quantiles)
                .map(|q| vec![q.direction.to_string(), q.p.to_string(), q.epa.to_string(), q.proposed.to_string(), q.ratio.to_string()])
                .collect(),
        )?;
    }

    let svg = out.join("collisions.svg");
    plot::collisions(&svg, &report.collisions).map_err(fail)?;
    files.push(svg);
    for d in &report.directions {
        let svg = out.join(format!("cdf_{}.svg", short(d.direction)));
        let curves = [("epa", curve(d, &d.epa)), ("proposed", curve(d, &d.proposed))];
        plot::cdf(&svg, &format!("{} sum rate", d.direction), &curves)
            .with_context(|| format!("plotting {}", svg.display()))
            .map_err(fail)?;
        files.push(svg);
    }
    report.files = files;
    Ok(())
}
