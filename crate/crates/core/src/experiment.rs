//! One cell of the experiment grid: both policies at one `(seed, utilization)`.
//!
//! EPA always runs, even when only the proposed policy is requested, because
//! the set of collision-affected sectors is defined by where EPA collides.

use crate::engine::{evaluate_rates, run, Action, BlankingAction, Collision, Policy, RunOutput, Scene, SlotRecord};
use crate::error::{Error, Result};
use crate::metrics::{affected_sectors, collision_windows, count_collisions, sum_rate, SumRateSample};
use crate::spectrum::Direction;

#[derive(Debug, Clone, PartialEq)]
pub struct CellSpec {
    pub seed: u64,
    pub utilization: f64,
    /// Policies to report, in output order.
    pub policies: Vec<Policy>,
    /// Evaluate sum rates (the expensive part).
    pub rates: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyResult {
    pub policy: Policy,
    pub actions: Vec<BlankingAction>,
    /// `(slot, collision)` in slot order.
    pub collisions: Vec<(usize, Collision)>,
    /// Collisions per slot and direction.
    pub per_slot: Vec<[usize; 2]>,
    /// Sum-rate samples per direction (empty when rates were not requested).
    pub sum_rate: [Vec<SumRateSample>; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub seed: u64,
    pub utilization: f64,
    pub results: Vec<PolicyResult>,
}

impl CellResult {
    pub fn get(&self, policy: Policy) -> Option<&PolicyResult> {
        self.results.iter().find(|r| r.policy == policy)
    }
}

pub fn run_cell(scene: &Scene, spec: &CellSpec) -> Result<CellResult> {
    let epa = run(scene, Policy::Epa, spec.seed, spec.utilization)?;
    let proposed = run(scene, Policy::Proposed, spec.seed, spec.utilization)?;
    check_invariants(&epa, "epa")?;
    check_invariants(&proposed, "proposed")?;

    let per_slot = |out: &RunOutput| -> Vec<[usize; 2]> {
        out.records
            .iter()
            .map(|r| Direction::BOTH.map(|d| r.collision_count(d)))
            .collect()
    };
    let counts = [per_slot(&epa), per_slot(&proposed)];
    let w = scene.scenario.collision_window;
    let windows = collision_windows(&counts, w);
    let epa_collisions: Vec<Vec<Collision>> = epa.records.iter().map(|r| r.collisions.clone()).collect();
    let affected = affected_sectors(&epa_collisions, w);

    let mut results = Vec::with_capacity(spec.policies.len());
    for &policy in &spec.policies {
        let (out, slot_counts) = match policy {
            Policy::Epa => (&epa, &counts[0]),
            Policy::Proposed => (&proposed, &counts[1]),
        };
        let sum_rate = if spec.rates {
            rates_for(scene, spec.seed, &out.records, &windows, &affected)?
        } else {
            [Vec::new(), Vec::new()]
        };
        results.push(PolicyResult {
            policy,
            actions: out.actions.clone(),
            collisions: out
                .records
                .iter()
                .flat_map(|r| r.collisions.iter().map(move |c| (r.slot, *c)))
                .collect(),
            per_slot: slot_counts.clone(),
            sum_rate,
        });
    }
    Ok(CellResult {
        seed: spec.seed,
        utilization: spec.utilization,
        results,
    })
}

fn rates_for(
    scene: &Scene,
    seed: u64,
    records: &[SlotRecord],
    windows: &[Vec<bool>; 2],
    affected: &[Vec<Vec<usize>>; 2],
) -> Result<[Vec<SumRateSample>; 2]> {
    let mut out = [Vec::new(), Vec::new()];
    for d in Direction::BOTH {
        let i = d.index();
        let mut rates = Vec::new();
        for (t, record) in records.iter().enumerate() {
            if windows[i][t] && !affected[i][t].is_empty() {
                rates.extend(evaluate_rates(scene, seed, record, d, &affected[i][t])?);
            }
        }
        out[i] = sum_rate(&rates, d, &windows[i], &affected[i]);
    }
    Ok(out)
}

/// Mask discipline, action alternation and collision bookkeeping.
fn check_invariants(out: &RunOutput, policy: &str) -> Result<()> {
    for r in &out.records {
        for (q, (s, b)) in r.scheduled.iter().zip(&r.blanked).enumerate() {
            for d in Direction::BOTH {
                if !s[d.index()].is_disjoint(&b[d.index()]) {
                    return Err(Error::Invariant(format!(
                        "mask discipline: {policy} sector {q} schedules a blanked {d} PRB in slot {}",
                        r.slot
                    )));
                }
            }
        }
        if count_collisions(r).entries != r.collisions {
            return Err(Error::Invariant(format!("collision tally of {policy} slot {} is stale", r.slot)));
        }
    }
    let mut last = std::collections::HashMap::new();
    for a in &out.actions {
        let key = (a.sector, a.direction, a.prb);
        let expected = match last.get(&key) {
            None | Some(Action::Unblank) => Action::Blank,
            Some(Action::Blank) => Action::Unblank,
        };
        if a.action != expected {
            return Err(Error::Invariant(format!(
                "alternation: {policy} emitted {} twice for sector {} {} PRB {}",
                a.action.as_str(),
                a.sector,
                a.direction,
                a.prb
            )));
        }
        last.insert(key, a.action);
    }
    Ok(())
}
