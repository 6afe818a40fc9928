//! Collision counting, collision windows, sum rate and empirical CDFs.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::engine::{Collision, Policy, PrbRate, SlotRecord};
use crate::error::{Error, Result};
use crate::spectrum::Direction;

/// Collision indicators that fired in one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionTally {
    pub slot: usize,
    /// Sorted by sector, satellite, direction, PRB.
    pub entries: Vec<Collision>,
}

impl CollisionTally {
    pub fn total(&self) -> usize {
        self.entries.len()
    }
}

/// Counts `(sector, satellite, direction, prb)` tuples where the satellite
/// reaches the sector, its corrected carrier occupies the PRB, and the PRB is
/// scheduled and not blanked.
///
/// The satellite reaches a sector when the footprint touches the sector's
/// cell, or when a UE the sector serves stands inside the footprint. The
/// second case is what lets collisions through under realistic association:
/// the policy only sees cells, while service areas differ from them.
pub fn count_collisions(record: &SlotRecord) -> CollisionTally {
    let mut entries = Vec::new();
    for (v, view) in record.satellites.iter().enumerate() {
        let mut reached = view.overlap.clone();
        for ue in &record.ues {
            if !reached[ue.serving] && view.footprint.contains(ue.position) {
                reached[ue.serving] = true;
            }
        }
        for (q, hit) in reached.iter().enumerate() {
            if !hit {
                continue;
            }
            for d in Direction::BOTH {
                let live = &record.scheduled[q][d.index()];
                for k in view.occupied[q][d.index()].iter() {
                    if live.contains(k) && !record.blanked[q][d.index()].contains(k) {
                        entries.push(Collision {
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
    entries.sort_unstable();
    CollisionTally {
        slot: record.slot,
        entries,
    }
}

/// Slots within `±window` of a slot where any of the given per-slot
/// collision counts is positive, per direction.
///
/// `counts[p][t][d]` is the collision count of run `p` at slot `t`.
pub fn collision_windows(counts: &[Vec<[usize; 2]>], window: usize) -> [Vec<bool>; 2] {
    let n = counts.iter().map(Vec::len).max().unwrap_or(0);
    Direction::BOTH.map(|d| {
        let mut inside = vec![false; n];
        for t in 0..n {
            if counts.iter().any(|c| c.get(t).is_some_and(|x| x[d.index()] > 0)) {
                inside[t.saturating_sub(window)..=(t + window).min(n - 1)].fill(true);
            }
        }
        inside
    })
}

/// Sectors that collide within `±window` of each slot, per direction.
///
/// `collisions[t]` lists the collisions of slot `t` of the reference (EPA)
/// run.
pub fn affected_sectors(collisions: &[Vec<Collision>], window: usize) -> [Vec<Vec<usize>>; 2] {
    let n = collisions.len();
    Direction::BOTH.map(|d| {
        let mut sets = vec![BTreeSet::new(); n];
        for (t, list) in collisions.iter().enumerate() {
            for c in list.iter().filter(|c| c.direction == d) {
                for set in &mut sets[t.saturating_sub(window)..=(t + window).min(n - 1)] {
                    set.insert(c.sector);
                }
            }
        }
        sets.into_iter().map(|s| s.into_iter().collect()).collect()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumRateSample {
    pub slot: usize,
    pub direction: Direction,
    /// Bits per channel use.
    pub value: f64,
}

/// One sum-rate sample per window slot: the rates of all PRBs of the
/// affected sectors in that slot and direction. Sectors outside the affected
/// set, and PRBs without a rate entry (blanked, unscheduled), add nothing.
pub fn sum_rate(
    rates: &[PrbRate],
    direction: Direction,
    window: &[bool],
    affected: &[Vec<usize>],
) -> Vec<SumRateSample> {
    let mut by_slot: BTreeMap<usize, f64> = BTreeMap::new();
    for r in rates.iter().filter(|r| r.direction == direction) {
        if window.get(r.slot).copied().unwrap_or(false) && affected[r.slot].binary_search(&r.sector).is_ok() {
            *by_slot.entry(r.slot).or_default() += r.value;
        }
    }
    window
        .iter()
        .enumerate()
        .filter(|(_, w)| **w)
        .map(|(t, _)| SumRateSample {
            slot: t,
            direction,
            value: by_slot.get(&t).copied().unwrap_or(0.0),
        })
        .collect()
}

/// Empirical CDF over a fixed sample set.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySamples);
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(EmpiricalCdf { sorted })
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// `F(w)`: fraction of samples `<= w`.
    pub fn eval(&self, w: f64) -> f64 {
        self.sorted.partition_point(|&x| x <= w) as f64 / self.sorted.len() as f64
    }

    /// `F⁻¹(p)`: the smallest sample `w` with `F(w) >= p`, for `p` in (0, 1].
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidProbability(p));
        }
        let n = self.sorted.len();
        let mut c = ((p * n as f64).ceil() as usize).clamp(1, n);
        while c > 1 && (c - 1) as f64 / n as f64 >= p {
            c -= 1;
        }
        while c < n && (c as f64 / n as f64) < p {
            c += 1;
        }
        Ok(self.sorted[c - 1])
    }

    /// `points` evenly spaced abscissae from the smallest to the largest sample.
    pub fn grid(&self, points: usize) -> Vec<f64> {
        let lo = self.sorted[0];
        let hi = self.sorted[self.sorted.len() - 1];
        if points <= 1 || hi == lo {
            return vec![lo; points.max(1)];
        }
        (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect()
    }

    /// The CDF at `points` evenly spaced abscissae plus every distinct sample
    /// value, ascending.
    pub fn curve(&self, points: usize) -> Vec<(f64, f64)> {
        let mut xs = self.grid(points);
        xs.extend_from_slice(&self.sorted);
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs.into_iter().map(|x| (x, self.eval(x))).collect()
    }
}

/// Total collisions of one completed run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunCollisions {
    pub policy: Policy,
    pub seed: u64,
    pub utilization: f64,
    pub total: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionSummaryRow {
    pub policy: Policy,
    pub utilization: f64,
    pub runs: usize,
    pub mean: f64,
    /// Standard error of the mean across seeds (0 for a single seed).
    pub stderr: f64,
}

/// Mean collisions and standard error per `(policy, utilization)`. Every
/// policy must have run every utilization with the same seeds.
pub fn collision_summary(runs: &[RunCollisions]) -> Result<Vec<CollisionSummaryRow>> {
    let mut cells: BTreeMap<(Policy, u64), Vec<&RunCollisions>> = BTreeMap::new();
    for r in runs {
        cells.entry((r.policy, r.utilization.to_bits())).or_default().push(r);
    }
    let policies: BTreeSet<Policy> = runs.iter().map(|r| r.policy).collect();
    let utils: BTreeSet<u64> = runs.iter().map(|r| r.utilization.to_bits()).collect();
    let mut reference: Option<Vec<u64>> = None;
    let mut rows = Vec::new();
    for &p in &policies {
        for &u in &utils {
            let list = cells.get(&(p, u)).map(Vec::as_slice).unwrap_or(&[]);
            let mut seeds: Vec<u64> = list.iter().map(|r| r.seed).collect();
            seeds.sort_unstable();
            let utilization = f64::from_bits(u);
            if seeds.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::MismatchedGrid(format!("{p} at utilization {utilization} repeats a seed")));
            }
            match &reference {
                None => reference = Some(seeds.clone()),
                Some(r) if *r != seeds => {
                    return Err(Error::MismatchedGrid(format!(
                        "{p} at utilization {utilization} ran seeds {seeds:?}, expected {r:?}"
                    )))
                }
                _ => {}
            }
            let n = list.len();
            let mean = list.iter().map(|r| r.total as f64).sum::<f64>() / n as f64;
            let stderr = if n > 1 {
                let var = list.iter().map(|r| (r.total as f64 - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
                (var / n as f64).sqrt()
            } else {
                0.0
            };
            rows.push(CollisionSummaryRow {
                policy: p,
                utilization,
                runs: n,
                mean,
                stderr,
            });
        }
    }
    rows.sort_by(|a, b| a.utilization.total_cmp(&b.utilization).then(a.policy.cmp(&b.policy)));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cdf_examples() {
        let f = EmpiricalCdf::new(&[0.0, 1.0, 0.0]).unwrap();
        assert!((f.eval(0.0) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(f.quantile(0.6).unwrap(), 0.0);
        assert_eq!(f.quantile(1.0).unwrap(), 1.0);
        assert_eq!(f.eval(-1.0), 0.0);
        assert_eq!(f.eval(5.0), 1.0);
        assert!(EmpiricalCdf::new(&[]).is_err());
        assert!(f.quantile(0.0).is_err());
    }

    #[test]
    fn curve_has_grid_and_samples() {
        let f = EmpiricalCdf::new(&[0.0, 0.5, 3.0]).unwrap();
        let c = f.curve(512);
        assert!(c.len() >= 512);
        assert!(c.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1));
        assert!(c.iter().any(|&(x, _)| x == 0.5));
    }

    #[test]
    fn windows_and_affected() {
        let a = |s, d| Collision { sector: s, satellite: 0, direction: d, prb: 7 };
        let mut col = vec![Vec::new(); 10];
        col[5].push(a(3, Direction::Downlink));
        col[5].push(a(1, Direction::Downlink));
        let aff = affected_sectors(&col, 2);
        assert_eq!(aff[0][3], vec![1, 3]);
        assert_eq!(aff[0][7], vec![1, 3]);
        assert!(aff[0][8].is_empty() && aff[1][5].is_empty());
        let mut counts = vec![[0, 0]; 10];
        counts[0] = [1, 0];
        let w = collision_windows(&[counts, vec![[0, 0]; 10]], 2);
        assert_eq!(w[0], [true, true, true, false, false, false, false, false, false, false]);
        assert!(w[1].iter().all(|x| !x));
    }

    #[test]
    fn sum_rate_examples() {
        let r = |slot, sector, value| PrbRate { slot, direction: Direction::Uplink, sector, prb: 3, value };
        let window = vec![true, true];
        let affected = vec![vec![0, 2], vec![]];
        let rates = [r(0, 0, (1.0f64 + 3.0).log2()), r(0, 2, 0.5), r(0, 1, 9.0), r(1, 0, 4.0)];
        let s = sum_rate(&rates, Direction::Uplink, &window, &affected);
        assert_eq!(s.len(), 2);
        assert!((s[0].value - 2.5).abs() < 1e-12);
        assert_eq!(s[1].value, 0.0);
        assert!(sum_rate(&rates, Direction::Downlink, &window, &affected).iter().all(|x| x.value == 0.0));
    }

    #[test]
    fn summary_statistics_and_grid_checks() {
        let run = |policy, seed, utilization, total| RunCollisions { policy, seed, utilization, total };
        let rows = collision_summary(&[
            run(Policy::Epa, 1, 1.0, 4),
            run(Policy::Epa, 2, 1.0, 6),
            run(Policy::Proposed, 1, 1.0, 0),
            run(Policy::Proposed, 2, 1.0, 0),
        ])
        .unwrap();
        assert_eq!(rows.len(), 2);
        let epa = rows.iter().find(|r| r.policy == Policy::Epa).unwrap();
        assert_eq!(epa.mean, 5.0);
        assert!((epa.stderr - 1.0).abs() < 1e-12);
        let bad = collision_summary(&[run(Policy::Epa, 1, 1.0, 4), run(Policy::Proposed, 2, 1.0, 0)]);
        assert!(matches!(bad, Err(Error::MismatchedGrid(_))));
    }

    proptest! {
        #[test]
        fn cdf_quantile_consistency(xs in proptest::collection::vec(-1e3f64..1e3, 1..60), p in 0.001f64..=1.0) {
            let f = EmpiricalCdf::new(&xs).unwrap();
            let q = f.quantile(p).unwrap();
            prop_assert!(f.eval(q) >= p);
            // no smaller sample reaches p
            prop_assert!(f.samples().iter().filter(|&&x| x < q).all(|&x| f.eval(x) < p));
            let c = f.curve(64);
            prop_assert!(c.windows(2).all(|w| w[0].1 <= w[1].1));
        }
    }
}
