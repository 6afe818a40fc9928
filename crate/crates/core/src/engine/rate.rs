use crate::error::Result;
use crate::radio::{best_beam, db_to_linear, sinr, spectral_efficiency, ChannelRealization, Interferer, LinkPowers};
use crate::rng::{keyed_index, stream, Purpose};
use crate::scenario::InterferenceBeams;
use crate::spectrum::Direction;

use super::{Scene, SlotRecord};

/// Rate of one scheduled PRB: mean of `log2(1 + SINR)` over channel draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrbRate {
    pub slot: usize,
    pub direction: Direction,
    pub sector: usize,
    pub prb: u32,
    pub value: f64,
}

struct Link {
    gain: f64,
    power: f64,
    active: bool,
}

/// Rates of every scheduled PRB of the `victims` sectors in one slot and
/// direction.
///
/// Each scheduled PRB serves one UE, picked by a keyed draw among the
/// sector's UEs. In the uplink that UE splits `P_UE` evenly over its PRBs.
/// Co-channel interference comes from neighbouring sectors transmitting on
/// the same PRB and from satellites whose footprint covers the receiver and
/// whose corrected carrier occupies the PRB. Channel draws are keyed by
/// `(seed, slot, sector, direction, prb, draw)` and always cover every
/// candidate link in a fixed order, so both policies see the same channels.
///
/// With collision outage enabled, a sector that collides in this slot and
/// direction gets rate 0 on all its PRBs.
pub fn evaluate_rates(
    scene: &Scene,
    seed: u64,
    record: &SlotRecord,
    direction: Direction,
    victims: &[usize],
) -> Result<Vec<PrbRate>> {
    let sc = &scene.scenario;
    let t = record.slot;
    let d = direction.index();
    let m = sc.antenna.num_antennas;
    let served = record.served_ues(scene.num_sectors());
    let assigned = |q: usize, k: u32| -> Option<usize> {
        let list = &served[q];
        if list.is_empty() {
            return None;
        }
        let i = keyed_index(seed, Purpose::UeAssignment, &[t as u64, q as u64, d as u64, u64::from(k)], list.len());
        Some(list[i])
    };
    // uplink PRB count per UE, for the power split
    let mut ul_prbs = vec![0usize; record.ues.len()];
    if direction == Direction::Uplink {
        for (q, masks) in record.scheduled.iter().enumerate() {
            for k in masks[d].iter() {
                if let Some(u) = assigned(q, k) {
                    ul_prbs[u] += 1;
                }
            }
        }
    }
    let ue_power = |u: usize| sc.power.ue / ul_prbs[u].max(1) as f64;
    let dl_power = sc.dl_power_per_prb();

    let mut out = Vec::new();
    for &q in victims {
        let outage = sc.collision_outage
            && record
                .collisions
                .iter()
                .any(|c| c.sector == q && c.direction == direction);
        let neighbours: Vec<usize> = scene.neighbour_sectors(q).collect();
        for k in record.scheduled[q][d].iter() {
            let Some(u) = assigned(q, k) else { continue };
            if outage {
                out.push(PrbRate { slot: t, direction, sector: q, prb: k, value: 0.0 });
                continue;
            }
            let ue = record.ues[u];
            // link 0 is the serving link; then the other neighbours; then satellites
            let mut links: Vec<Link> = Vec::with_capacity(neighbours.len() + record.satellites.len());
            for &j in &neighbours {
                let transmitting = j == q || record.scheduled[j][d].contains(k);
                let link = match direction {
                    Direction::Downlink => {
                        let shadow = scene.shadowing_db(seed, t, u, scene.sectors[j].bs);
                        Link {
                            gain: db_to_linear(scene.link_gain_db(j, ue.position, shadow)),
                            power: dl_power,
                            active: transmitting,
                        }
                    }
                    Direction::Uplink => {
                        let tx = if j == q { Some(u) } else if transmitting { assigned(j, k) } else { None };
                        match tx {
                            Some(tx) => {
                                let shadow = scene.shadowing_db(seed, t, tx, scene.sectors[q].bs);
                                Link {
                                    gain: db_to_linear(scene.link_gain_db(q, record.ues[tx].position, shadow)),
                                    power: ue_power(tx),
                                    active: true,
                                }
                            }
                            None => Link { gain: 0.0, power: 0.0, active: false },
                        }
                    }
                };
                links.push(link);
            }
            let receiver = match direction {
                Direction::Downlink => ue.position,
                Direction::Uplink => scene.bs_positions[scene.sectors[q].bs],
            };
            for (v, view) in record.satellites.iter().enumerate() {
                let active = view.footprint.contains(receiver) && view.occupied[q][d].contains(k);
                let link = if active {
                    let slant = sc.satellites[v].slant_range(scene.slot_time(t), receiver, sc.origin)?;
                    Link {
                        gain: db_to_linear(sc.satellite_pathloss.gain_db(slant, 0.0)),
                        power: sc.power.satellite,
                        active: true,
                    }
                } else {
                    Link { gain: 0.0, power: 0.0, active: false }
                };
                links.push(link);
            }

            let mut total = 0.0;
            for r in 0..sc.channel_draws {
                let mut rng = stream(seed, Purpose::Channel, &[t as u64, q as u64, d as u64, u64::from(k), r as u64]);
                let channels: Vec<ChannelRealization> =
                    links.iter().map(|l| ChannelRealization::draw(m, l.gain, &mut rng)).collect();
                let beam = scene.codebook.beam(best_beam(&channels[0], &scene.codebook)?);
                let own_beams: Vec<Option<usize>> = if sc.interference_beams == InterferenceBeams::Own
                    && direction == Direction::Downlink
                {
                    neighbours
                        .iter()
                        .enumerate()
                        .map(|(i, &j)| {
                            if i == 0 || !links[i].active {
                                return Ok(None);
                            }
                            let mut own = stream(seed, Purpose::Channel, &[t as u64, j as u64, d as u64, u64::from(k), r as u64]);
                            let h = ChannelRealization::draw(m, 1.0, &mut own);
                            best_beam(&h, &scene.codebook).map(Some)
                        })
                        .collect::<Result<_>>()?
                } else {
                    Vec::new()
                };
                let interferers: Vec<Interferer> = links
                    .iter()
                    .enumerate()
                    .skip(1)
                    .filter(|(_, l)| l.active)
                    .map(|(i, l)| Interferer {
                        channel: &channels[i],
                        tx_power: l.power,
                        beam: own_beams.get(i).copied().flatten().map(|b| scene.codebook.beam(b)),
                    })
                    .collect();
                let powers = LinkPowers {
                    tx_power: links[0].power,
                    noise_power: sc.power.noise,
                };
                total += spectral_efficiency(sinr(&channels[0], powers, beam, &interferers)?)?;
            }
            out.push(PrbRate {
                slot: t,
                direction,
                sector: q,
                prb: k,
                value: total / sc.channel_draws as f64,
            });
        }
    }
    Ok(out)
}
