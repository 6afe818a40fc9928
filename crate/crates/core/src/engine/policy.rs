use crate::spectrum::Direction;

use super::{Action, BlankingAction, Cause, PrbSet, SatelliteView, Scene, SectorState};

/// Blank/unblank actions that make every sector's masks match the satellite
/// geometry in `views` (taken at `effective_slot`).
///
/// A PRB must be blanked when some satellite footprint touches the sector's
/// cell and one of its Doppler-corrected carriers occupies the PRB, unless
/// the PRB is non-blankable. Blanked PRBs that no satellite requires any more
/// are released. Actions come out ordered by sector, direction, then PRB.
pub fn avoidance_step(
    scene: &Scene,
    views: &[SatelliteView],
    states: &[SectorState],
    slot: usize,
    effective_slot: usize,
) -> Vec<BlankingAction> {
    let n = scene.scenario.band.n_prb;
    let mut actions = Vec::new();
    for (q, state) in states.iter().enumerate() {
        for d in Direction::BOTH {
            let mut desired = PrbSet::new(n);
            let mut causes = Vec::new();
            for (v, view) in views.iter().enumerate() {
                if !view.overlap[q] {
                    continue;
                }
                for k in view.occupied[q][d.index()].iter() {
                    if !state.non_blankable.contains(k) && desired.insert(k) {
                        causes.push((k, v));
                    }
                }
            }
            let blanked = &state.blanked[d.index()];
            causes.sort_unstable();
            for (k, v) in causes {
                if !blanked.contains(k) {
                    actions.push(BlankingAction {
                        slot,
                        effective_slot,
                        sector: q,
                        direction: d,
                        prb: k,
                        action: Action::Blank,
                        cause: Cause::Satellite(v),
                    });
                }
            }
            for k in blanked.difference(&desired) {
                actions.push(BlankingAction {
                    slot,
                    effective_slot,
                    sector: q,
                    direction: d,
                    prb: k,
                    action: Action::Unblank,
                    cause: Cause::Clear,
                });
            }
        }
    }
    actions.sort_by_key(|a| (a.sector, a.direction, a.prb));
    actions
}

/// Equal power allocation: nothing is ever blanked.
pub fn epa_step(_scene: &Scene, _states: &[SectorState]) -> Vec<BlankingAction> {
    Vec::new()
}

pub fn apply_actions(states: &mut [SectorState], actions: &[BlankingAction]) {
    for a in actions {
        let mask = &mut states[a.sector].blanked[a.direction.index()];
        match a.action {
            Action::Blank => {
                mask.insert(a.prb);
            }
            Action::Unblank => {
                mask.remove(a.prb);
            }
        }
    }
}
