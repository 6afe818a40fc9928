use crate::error::Result;
use crate::metrics::count_collisions;
use crate::rng::{stream, Purpose};
use crate::spectrum::Direction;

use super::schedule::{schedule_prbs, target_prb_count};
use super::{apply_actions, avoidance_step, epa_step, BlankingAction, Collision, Policy, PrbSet, SatelliteView, Scene, SectorState, Ue};

/// What happened in one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotRecord {
    pub slot: usize,
    /// Per sector and direction; never intersects `blanked`.
    pub scheduled: Vec<[PrbSet; 2]>,
    pub blanked: Vec<[PrbSet; 2]>,
    pub satellites: Vec<SatelliteView>,
    pub ues: Vec<Ue>,
    pub collisions: Vec<Collision>,
}

impl SlotRecord {
    pub fn collision_count(&self, direction: Direction) -> usize {
        self.collisions.iter().filter(|c| c.direction == direction).count()
    }

    /// UEs served by each sector, in UE order.
    pub fn served_ues(&self, num_sectors: usize) -> Vec<Vec<usize>> {
        let mut served = vec![Vec::new(); num_sectors];
        for (u, ue) in self.ues.iter().enumerate() {
            served[ue.serving].push(u);
        }
        served
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub actions: Vec<BlankingAction>,
    pub records: Vec<SlotRecord>,
}

/// Slot-by-slot driver for one `(policy, seed, utilization)` run.
pub struct Simulator<'a> {
    scene: &'a Scene,
    policy: Policy,
    seed: u64,
    utilization: f64,
    slot: usize,
    states: Vec<SectorState>,
    views: Vec<SatelliteView>,
    pending: Vec<BlankingAction>,
}

impl<'a> Simulator<'a> {
    /// Prepares slot 0; under the proposed policy this already blanks for
    /// any satellite overlapping at slot 0.
    pub fn new(scene: &'a Scene, policy: Policy, seed: u64, utilization: f64) -> Result<Self> {
        target_prb_count(utilization, scene.scenario.band.n_prb)?;
        let n = scene.scenario.band.n_prb;
        let mut states = vec![SectorState::new(n, scene.non_blankable.clone()); scene.num_sectors()];
        let views = scene.satellite_views(0)?;
        let pending = decide(scene, policy, &views, &states, 0, 0);
        apply_actions(&mut states, &pending);
        Ok(Simulator {
            scene,
            policy,
            seed,
            utilization,
            slot: 0,
            states,
            views,
            pending,
        })
    }

    pub fn states(&self) -> &[SectorState] {
        &self.states
    }

    /// Runs the next slot. Returns the record and the actions decided during
    /// it (including the slot-0 priming actions on the first call), or
    /// `None` past the horizon.
    pub fn step(&mut self) -> Result<Option<(SlotRecord, Vec<BlankingAction>)>> {
        let scene = self.scene;
        let t = self.slot;
        if t >= scene.num_slots() {
            return Ok(None);
        }
        let ues = scene.draw_ues(self.seed, t);
        let mut has_ue = vec![false; scene.num_sectors()];
        for ue in &ues {
            has_ue[ue.serving] = true;
        }
        let n = scene.scenario.band.n_prb;
        for (q, state) in self.states.iter_mut().enumerate() {
            for d in Direction::BOTH {
                state.scheduled[d.index()] = if has_ue[q] {
                    let mut rng = stream(self.seed, Purpose::Schedule, &[t as u64, q as u64, d.index() as u64]);
                    schedule_prbs(self.utilization, &state.blanked[d.index()], &mut rng)?
                } else {
                    PrbSet::new(n)
                };
            }
        }
        let mut record = SlotRecord {
            slot: t,
            scheduled: self.states.iter().map(|s| s.scheduled.clone()).collect(),
            blanked: self.states.iter().map(|s| s.blanked.clone()).collect(),
            satellites: std::mem::take(&mut self.views),
            ues,
            collisions: Vec::new(),
        };
        record.collisions = count_collisions(&record).entries;

        let mut actions = std::mem::take(&mut self.pending);
        if t + 1 < scene.num_slots() {
            self.views = scene.satellite_views(t + 1)?;
            let next = decide(scene, self.policy, &self.views, &self.states, t, t + 1);
            apply_actions(&mut self.states, &next);
            actions.extend(next);
        }
        self.slot += 1;
        Ok(Some((record, actions)))
    }
}

fn decide(
    scene: &Scene,
    policy: Policy,
    views: &[SatelliteView],
    states: &[SectorState],
    slot: usize,
    effective_slot: usize,
) -> Vec<BlankingAction> {
    match policy {
        Policy::Proposed => avoidance_step(scene, views, states, slot, effective_slot),
        Policy::Epa => epa_step(scene, states),
    }
}

/// Runs the whole horizon. Deterministic in `(scene, policy, seed, utilization)`.
pub fn run(scene: &Scene, policy: Policy, seed: u64, utilization: f64) -> Result<RunOutput> {
    let mut sim = Simulator::new(scene, policy, seed, utilization)?;
    let mut out = RunOutput {
        actions: Vec::new(),
        records: Vec::with_capacity(scene.num_slots()),
    };
    while let Some((record, actions)) = sim.step()? {
        out.records.push(record);
        out.actions.extend(actions);
    }
    Ok(out)
}
