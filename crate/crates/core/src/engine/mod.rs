//! Simulation clock, scheduling and the two policies.
//!
//! A run advances in slots. In slot `t` every sector transmits on the PRBs it
//! scheduled, given the blanking masks in force; afterwards the policy looks at
//! the satellite geometry of slot `t + 1` and updates the masks for that slot.
//! The proposed policy blanks; EPA never does.

mod policy;
mod prbset;
mod rate;
mod scene;
mod schedule;
mod sim;

pub use policy::{apply_actions, avoidance_step, epa_step};
pub use prbset::PrbSet;
pub use rate::{evaluate_rates, PrbRate};
pub use scene::{SatelliteView, Scene, Sector, Ue, NEIGHBOUR_SITES};
pub use schedule::{schedule_prbs, target_prb_count};
pub use sim::{run, RunOutput, Simulator, SlotRecord};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::spectrum::Direction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    /// Proactive blanking driven by footprint overlap and corrected carriers.
    Proposed,
    /// Equal power allocation, never blanks.
    Epa,
}

impl Policy {
    pub const ALL: [Policy; 2] = [Policy::Proposed, Policy::Epa];

    pub fn as_str(self) -> &'static str {
        match self {
            Policy::Proposed => "proposed",
            Policy::Epa => "epa",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "proposed" => Ok(Policy::Proposed),
            "epa" => Ok(Policy::Epa),
            other => Err(format!("unknown policy \"{other}\" (expected \"proposed\" or \"epa\")")),
        }
    }
}

/// Per-sector PRB masks, indexed by [`Direction::index`].
#[derive(Debug, Clone, PartialEq)]
pub struct SectorState {
    pub scheduled: [PrbSet; 2],
    pub blanked: [PrbSet; 2],
    pub non_blankable: PrbSet,
}

impl SectorState {
    pub fn new(n_prb: u32, non_blankable: PrbSet) -> Self {
        SectorState {
            scheduled: [PrbSet::new(n_prb), PrbSet::new(n_prb)],
            blanked: [PrbSet::new(n_prb), PrbSet::new(n_prb)],
            non_blankable,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Blank,
    Unblank,
}

impl Action {
    pub fn as_str(self) -> &'static str {
        match self {
            Action::Blank => "blank",
            Action::Unblank => "unblank",
        }
    }
}

/// Why an action was taken: the (lowest-index) satellite that required the
/// blank, or `Clear` when no satellite needs the PRB blanked any more.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cause {
    Satellite(usize),
    Clear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlankingAction {
    /// Slot in which the decision was taken.
    pub slot: usize,
    /// First slot the new mask applies to.
    pub effective_slot: usize,
    pub sector: usize,
    pub direction: Direction,
    pub prb: u32,
    pub action: Action,
    pub cause: Cause,
}

/// One collision indicator that fired: `(sector, satellite, direction, prb)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Collision {
    pub sector: usize,
    pub satellite: usize,
    pub direction: Direction,
    pub prb: u32,
}
