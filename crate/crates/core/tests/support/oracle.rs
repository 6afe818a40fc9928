//! Brute-force collision count: every (sector, satellite, direction, PRB)
//! tuple is re-derived from the trajectories, the cells and the slot's
//! masks, without the engine's precomputed views.

use coexist::engine::{Collision, Scene, SlotRecord};
use coexist::geometry::region_circle_overlap;
use coexist::orbit::{motion_at, Motion};
use coexist::spectrum::{Direction, PrbIndex};

const C: f64 = 299_792_458.0;

pub fn collisions(scene: &Scene, record: &SlotRecord) -> Vec<Collision> {
    let sc = &scene.scenario;
    let t = record.slot as f64 * sc.slot;
    let mut out = Vec::new();
    for (v, sat) in sc.satellites.iter().enumerate() {
        let fp = sat.footprint_at(t, sc.origin).unwrap();
        for (q, sector) in scene.sectors.iter().enumerate() {
            let cell_hit = region_circle_overlap(scene.tessellation.cell(q), fp.center, fp.radius).unwrap();
            let ue_hit = record
                .ues
                .iter()
                .any(|u| u.serving == q && u.position.distance(fp.center) <= fp.radius);
            if !(cell_hit || ue_hit) {
                continue;
            }
            let sign = match motion_at(sat, sector.site, t, sc.slot, sc.origin).unwrap() {
                Motion::Approaching => 1.0,
                Motion::Departing => -1.0,
                Motion::Stationary => 0.0,
            };
            for d in Direction::BOTH {
                for k in 1..=sc.band.n_prb {
                    let hit = sat.carriers.iter().any(|c| {
                        let f = c.sky_frequency * (1.0 + sign * sat.ground_speed / C);
                        sc.band
                            .carrier_occupies_prb(f, c.occupied_bandwidth, PrbIndex::new(k, d))
                            .unwrap()
                    });
                    let live = record.scheduled[q][d.index()].contains(k) && !record.blanked[q][d.index()].contains(k);
                    if hit && live {
                        out.push(Collision {
                            sector: q,
                            satellite: v,
                            direction: d,
                            prb: k,
                        });
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Number of slots whose engine tally differs from the oracle.
pub fn mismatched_slots(scene: &Scene, records: &[SlotRecord]) -> usize {
    records
        .iter()
        .filter(|r| {
            let mut engine = r.collisions.clone();
            engine.sort_unstable();
            engine != collisions(scene, r)
        })
        .count()
}
