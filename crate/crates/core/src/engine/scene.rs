use crate::error::Result;
use crate::geometry::{project_to_plane, region_circle_overlap, voronoi_tessellate, PlanePoint, Region, Tessellation};
use crate::orbit::{motion_at, Motion, SatelliteFootprint};
use crate::radio::{grid_of_beams, sector_antenna_gain_db, BeamCodebook};
use crate::rng::{keyed_normal, stream, Purpose};
use crate::scenario::{AssociationMode, Scenario};
use crate::spectrum::{corrected_frequency, Direction};

use super::PrbSet;

/// How many nearest base stations (the own one included) are considered when
/// a UE picks its server and when interference is summed. Farther sites are
/// tens of dB below the serving link.
pub const NEIGHBOUR_SITES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct Sector {
    /// `<bs id>-<1..3>`.
    pub id: String,
    pub bs: usize,
    pub site: PlanePoint,
    /// Boresight, degrees clockwise from north.
    pub azimuth: f64,
}

/// A UE dropped for one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ue {
    pub position: PlanePoint,
    /// Sector whose cell it was dropped in.
    pub home: usize,
    /// Sector serving it.
    pub serving: usize,
}

/// One satellite as seen by every sector in one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SatelliteView {
    pub footprint: SatelliteFootprint,
    /// Whether each sector's cell touches the footprint.
    pub overlap: Vec<bool>,
    /// Range-rate sign relative to each sector site.
    pub motion: Vec<Motion>,
    /// PRBs the corrected carriers occupy, per sector and direction.
    pub occupied: Vec<[PrbSet; 2]>,
}

/// Everything about a scenario that stays fixed over a run.
#[derive(Debug, Clone)]
pub struct Scene {
    pub scenario: Scenario,
    pub sectors: Vec<Sector>,
    pub bs_positions: Vec<PlanePoint>,
    pub tessellation: Tessellation,
    pub codebook: BeamCodebook,
    /// Per BS: nearest `NEIGHBOUR_SITES` base stations, own first.
    pub bs_neighbours: Vec<Vec<usize>>,
    pub non_blankable: PrbSet,
}

impl Scene {
    pub fn new(scenario: Scenario) -> Result<Scene> {
        let mut sectors = Vec::with_capacity(scenario.num_sectors());
        let mut bs_positions = Vec::with_capacity(scenario.bs_sites.len());
        for (b, site) in scenario.bs_sites.iter().enumerate() {
            let base = project_to_plane(site.position, scenario.origin)?;
            bs_positions.push(base);
            for (i, &az) in site.azimuths.iter().enumerate() {
                let a = az.to_radians();
                sectors.push(Sector {
                    id: format!("{}-{}", site.id, i + 1),
                    bs: b,
                    site: base.translate(scenario.sector_offset * a.sin(), scenario.sector_offset * a.cos()),
                    azimuth: az,
                });
            }
        }
        let sites: Vec<PlanePoint> = sectors.iter().map(|s| s.site).collect();
        let bounds = Region::bounding_box(&sites, scenario.bounds_margin)?;
        let tessellation = voronoi_tessellate(&sites, &bounds)?;
        let codebook = grid_of_beams(scenario.antenna.num_antennas, scenario.antenna.num_beams)?;

        let bs_neighbours = bs_positions
            .iter()
            .enumerate()
            .map(|(b, &p)| {
                let mut order: Vec<(f64, usize)> =
                    bs_positions.iter().enumerate().map(|(j, &q)| (p.distance_sq(q), j)).collect();
                let keep = NEIGHBOUR_SITES.min(order.len());
                if keep < order.len() {
                    order.select_nth_unstable_by(keep - 1, |a, b| a.partial_cmp(b).expect("finite"));
                    order.truncate(keep);
                }
                order.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
                debug_assert_eq!(order[0].1, b);
                order.into_iter().map(|(_, j)| j).collect()
            })
            .collect();

        let non_blankable = PrbSet::from_iter_n(scenario.band.n_prb, scenario.non_blankable.iter().copied());
        Ok(Scene {
            scenario,
            sectors,
            bs_positions,
            tessellation,
            codebook,
            bs_neighbours,
            non_blankable,
        })
    }

    pub fn num_sectors(&self) -> usize {
        self.sectors.len()
    }

    pub fn num_slots(&self) -> usize {
        self.scenario.num_slots()
    }

    pub fn slot_time(&self, slot: usize) -> f64 {
        slot as f64 * self.scenario.slot
    }

    /// Sectors whose base station is among the neighbours of sector `q`'s,
    /// `q` itself first.
    pub fn neighbour_sectors(&self, q: usize) -> impl Iterator<Item = usize> + '_ {
        let own = q;
        std::iter::once(own).chain(
            self.bs_neighbours[self.sectors[q].bs]
                .iter()
                .flat_map(|&b| 3 * b..3 * b + 3)
                .filter(move |&s| s != own),
        )
    }

    /// Footprint, overlap, motion and carrier occupancy of every satellite
    /// at `slot`, as seen from every sector.
    pub fn satellite_views(&self, slot: usize) -> Result<Vec<SatelliteView>> {
        let t = self.slot_time(slot);
        let dt = self.scenario.slot;
        let origin = self.scenario.origin;
        let band = &self.scenario.band;
        let n = band.n_prb;
        self.scenario
            .satellites
            .iter()
            .map(|sat| {
                let footprint = sat.footprint_at(t, origin)?;
                // Occupancy depends on the sector only through the motion tag.
                let by_motion = |m: Motion| -> [PrbSet; 2] {
                    Direction::BOTH.map(|d| {
                        let mut set = PrbSet::new(n);
                        for c in &sat.carriers {
                            let f = corrected_frequency(c, sat.ground_speed, m);
                            for k in band.occupied_prbs(f, c.occupied_bandwidth, d) {
                                set.insert(k);
                            }
                        }
                        set
                    })
                };
                let table = [
                    by_motion(Motion::Approaching),
                    by_motion(Motion::Departing),
                    by_motion(Motion::Stationary),
                ];
                let mut overlap = Vec::with_capacity(self.sectors.len());
                let mut motion = Vec::with_capacity(self.sectors.len());
                let mut occupied = Vec::with_capacity(self.sectors.len());
                for (q, sector) in self.sectors.iter().enumerate() {
                    overlap.push(region_circle_overlap(
                        self.tessellation.cell(q),
                        footprint.center,
                        footprint.radius,
                    )?);
                    let m = motion_at(sat, sector.site, t, dt, origin)?;
                    motion.push(m);
                    occupied.push(
                        table[match m {
                            Motion::Approaching => 0,
                            Motion::Departing => 1,
                            Motion::Stationary => 2,
                        }]
                        .clone(),
                    );
                }
                Ok(SatelliteView {
                    footprint,
                    overlap,
                    motion,
                    occupied,
                })
            })
            .collect()
    }

    /// Large-scale gain in dB from sector `s`'s base station to `p`,
    /// including the sector pattern and the given shadowing.
    pub fn link_gain_db(&self, s: usize, p: PlanePoint, shadowing_db: f64) -> f64 {
        let sector = &self.sectors[s];
        let bs = self.bs_positions[sector.bs];
        let mut g = self.scenario.pathloss.gain_db(bs.distance(p), shadowing_db);
        if self.scenario.antenna.sector_pattern {
            let bearing = (p.x - bs.x).atan2(p.y - bs.y).to_degrees();
            g += sector_antenna_gain_db(bearing - sector.azimuth);
        }
        g
    }

    /// Shadowing between UE `ue` and base station `bs` in `slot`, dB.
    pub fn shadowing_db(&self, seed: u64, slot: usize, ue: usize, bs: usize) -> f64 {
        let sigma = self.scenario.pathloss.shadowing_sigma_db;
        if sigma == 0.0 {
            return 0.0;
        }
        sigma * keyed_normal(seed, Purpose::Shadowing, &[slot as u64, ue as u64, bs as u64])
    }

    /// Drops `ues_per_sector` UEs uniformly in every cell and associates them.
    /// UE `q * ues_per_sector + i` is the `i`-th UE dropped in cell `q`.
    pub fn draw_ues(&self, seed: u64, slot: usize) -> Vec<Ue> {
        let per = self.scenario.ues_per_sector;
        let mut ues = Vec::with_capacity(per * self.sectors.len());
        for q in 0..self.sectors.len() {
            let mut rng = stream(seed, Purpose::UePlacement, &[slot as u64, q as u64]);
            let cell = self.tessellation.cell(q);
            for _ in 0..per {
                let position = cell.sample_uniform(&mut rng);
                ues.push(Ue {
                    position,
                    home: q,
                    serving: q,
                });
            }
        }
        if self.scenario.association == AssociationMode::Realistic {
            for (u, ue) in ues.iter_mut().enumerate() {
                let mut best = (f64::NEG_INFINITY, usize::MAX);
                for s in self.neighbour_sectors(ue.home) {
                    let shadow = self.shadowing_db(seed, slot, u, self.sectors[s].bs);
                    let g = self.link_gain_db(s, ue.position, shadow);
                    if g > best.0 || (g == best.0 && s < best.1) {
                        best = (g, s);
                    }
                }
                ue.serving = best.1;
            }
        }
        ues
    }
}
