use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

use super::PrbSet;

/// `round(utilization * n_prb)`.
pub fn target_prb_count(utilization: f64, n_prb: u32) -> Result<usize> {
    if !(utilization > 0.0 && utilization <= 1.0) {
        return Err(Error::InvalidUtilization(utilization));
    }
    Ok((utilization * f64::from(n_prb)).round() as usize)
}

/// Full-buffer scheduler: draws a random priority order over all PRBs and
/// keeps the first `round(utilization * n_prb)` that are not blanked. When
/// too few PRBs are unblanked, all of them are scheduled.
///
/// The order does not depend on the blanked set, so two policies sharing an
/// rng key schedule the same PRBs wherever neither blanks.
pub fn schedule_prbs<R: Rng + ?Sized>(utilization: f64, blanked: &PrbSet, rng: &mut R) -> Result<PrbSet> {
    let n = blanked.n_prb();
    let target = target_prb_count(utilization, n)?;
    let mut order: Vec<u32> = (1..=n).collect();
    order.shuffle(rng);
    let mut out = PrbSet::new(n);
    for k in order.into_iter().filter(|&k| !blanked.contains(k)).take(target) {
        out.insert(k);
    }
    Ok(out)
}
