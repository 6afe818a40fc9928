//! PRB/frequency arithmetic, duplexing and Doppler correction.
//!
//! PRB `k` (1-based) of a direction starts at
//! `f_start + (f_end - f_start) / n_prb * (k - 1)` and occupies the half-open
//! interval `[start, start + n_sc * subcarrier_spacing)`. When the PRB spacing
//! is wider than the occupied width a guard sliver remains between PRBs; the
//! two widths are kept separate on purpose.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbit::Motion;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Downlink,
    Uplink,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Downlink, Direction::Uplink];

    /// Position in `[downlink, uplink]` arrays.
    pub fn index(self) -> usize {
        match self {
            Direction::Downlink => 0,
            Direction::Uplink => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Downlink => "downlink",
            Direction::Uplink => "uplink",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "downlink" | "dl" => Ok(Direction::Downlink),
            "uplink" | "ul" => Ok(Direction::Uplink),
            other => Err(format!("unknown direction `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DuplexMode {
    Fdd,
    Tdd,
}

/// One physical resource block of one direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrbIndex {
    pub k: u32,
    pub direction: Direction,
}

impl PrbIndex {
    pub fn new(k: u32, direction: Direction) -> Self {
        Self { k, direction }
    }
}

/// A satellite carrier: transmit sky frequency and occupied bandwidth, Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarrierTone {
    pub sky_frequency: f64,
    pub occupied_bandwidth: f64,
}

impl CarrierTone {
    pub fn new(sky_frequency: f64, occupied_bandwidth: f64) -> Result<Self> {
        if !(sky_frequency > 0.0 && sky_frequency.is_finite()) {
            return Err(Error::InvalidBandPlan(format!("carrier frequency {sky_frequency} must be positive")));
        }
        if !(occupied_bandwidth >= 0.0 && occupied_bandwidth.is_finite()) {
            return Err(Error::InvalidBandPlan(format!(
                "carrier bandwidth {occupied_bandwidth} must be non-negative"
            )));
        }
        Ok(Self {
            sky_frequency,
            occupied_bandwidth,
        })
    }
}

/// Terrestrial band plan. Frequencies in Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandPlan {
    /// Usable downlink start (guard bands excluded).
    pub f_start: f64,
    /// Usable downlink end.
    pub f_end: f64,
    pub n_prb: u32,
    pub subcarrier_spacing: f64,
    pub subcarriers_per_prb: u32,
    pub duplex_mode: DuplexMode,
    /// Uplink sits this far below downlink (FDD only, zero for TDD).
    pub duplex_distance: f64,
}

impl BandPlan {
    pub fn new(
        f_start: f64,
        f_end: f64,
        n_prb: u32,
        subcarrier_spacing: f64,
        subcarriers_per_prb: u32,
        duplex_mode: DuplexMode,
        duplex_distance: f64,
    ) -> Result<Self> {
        let plan = BandPlan {
            f_start,
            f_end,
            n_prb,
            subcarrier_spacing,
            subcarriers_per_prb,
            duplex_mode,
            duplex_distance,
        };
        plan.validate()?;
        Ok(plan)
    }

    /// C-band TDD plan: 50 PRBs of 12 x 15 kHz between 3.700 and 3.709 GHz.
    pub fn c_band_default() -> Self {
        BandPlan {
            f_start: 3.700e9,
            f_end: 3.709e9,
            n_prb: 50,
            subcarrier_spacing: 15e3,
            subcarriers_per_prb: 12,
            duplex_mode: DuplexMode::Tdd,
            duplex_distance: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidBandPlan(msg));
        if !(self.f_start > 0.0 && self.f_start.is_finite() && self.f_end.is_finite()) {
            return bad(format!("f_start {} must be positive", self.f_start));
        }
        if self.f_end <= self.f_start {
            return bad(format!("f_end {} must exceed f_start {}", self.f_end, self.f_start));
        }
        if self.n_prb == 0 {
            return bad("n_prb must be at least 1".into());
        }
        if !(self.subcarrier_spacing > 0.0) || self.subcarriers_per_prb == 0 {
            return bad("subcarrier spacing and subcarriers per PRB must be positive".into());
        }
        match self.duplex_mode {
            DuplexMode::Fdd if !(self.duplex_distance > 0.0) => {
                bad(format!("FDD needs a positive duplex distance, got {}", self.duplex_distance))
            }
            DuplexMode::Fdd if self.duplex_distance >= self.f_start => {
                bad("duplex distance pushes the uplink band below 0 Hz".into())
            }
            DuplexMode::Tdd if self.duplex_distance != 0.0 => {
                bad(format!("TDD requires duplex distance 0, got {}", self.duplex_distance))
            }
            _ => Ok(()),
        }
    }

    /// Distance between consecutive PRB starts.
    pub fn prb_spacing(&self) -> f64 {
        (self.f_end - self.f_start) / f64::from(self.n_prb)
    }

    /// Occupied width of one PRB, `N_SC * Δf`.
    pub fn prb_width(&self) -> f64 {
        f64::from(self.subcarriers_per_prb) * self.subcarrier_spacing
    }

    /// Usable `(start, end)` of a direction.
    pub fn band_edges(&self, direction: Direction) -> (f64, f64) {
        match (direction, self.duplex_mode) {
            (Direction::Uplink, DuplexMode::Fdd) => {
                (self.f_start - self.duplex_distance, self.f_end - self.duplex_distance)
            }
            _ => (self.f_start, self.f_end),
        }
    }

    fn check(&self, k: u32) -> Result<()> {
        if k == 0 || k > self.n_prb {
            return Err(Error::PrbOutOfRange { k, n_prb: self.n_prb });
        }
        Ok(())
    }

    /// Start frequency of PRB `k`.
    pub fn prb_start_frequency(&self, prb: PrbIndex) -> Result<f64> {
        self.check(prb.k)?;
        let (start, end) = self.band_edges(prb.direction);
        Ok(start + (end - start) / f64::from(self.n_prb) * f64::from(prb.k - 1))
    }

    /// Half-open `[start, end)` interval occupied by PRB `k`.
    pub fn prb_interval(&self, prb: PrbIndex) -> Result<(f64, f64)> {
        let start = self.prb_start_frequency(prb)?;
        Ok((start, start + self.prb_width()))
    }

    /// PRB whose interval contains `f`, if any.
    pub fn frequency_to_prb(&self, f: f64, direction: Direction) -> Option<PrbIndex> {
        let (start, _) = self.band_edges(direction);
        let guess = ((f - start) / self.prb_spacing()).floor();
        if !guess.is_finite() {
            return None;
        }
        // Rounding can put the guess one PRB off either way.
        let lo = (guess - 1.0).max(0.0) as u64 + 1;
        let hi = (guess + 1.0).min(f64::from(self.n_prb) - 1.0);
        if hi < 0.0 {
            return None;
        }
        (lo..=hi as u64 + 1)
            .filter(|&k| k <= u64::from(self.n_prb))
            .map(|k| PrbIndex::new(k as u32, direction))
            .find(|&prb| {
                let (a, b) = self.prb_interval(prb).expect("k in range");
                a <= f && f < b
            })
    }

    /// Whether a carrier centered on `f` with bandwidth `bw` lands on PRB `k`.
    ///
    /// A zero-width carrier occupies the PRB containing it. A carrier of
    /// positive width occupies every PRB its half-open band
    /// `[f - bw/2, f + bw/2)` intersects, so a carrier sitting exactly on one
    /// PRB does not also claim the neighbour it merely touches.
    pub fn carrier_occupies_prb(&self, f: f64, bw: f64, prb: PrbIndex) -> Result<bool> {
        let (a, b) = self.prb_interval(prb)?;
        if bw <= 0.0 {
            return Ok(a <= f && f < b);
        }
        let (lo, hi) = (f - bw / 2.0, f + bw / 2.0);
        Ok(lo < b && hi > a)
    }

    /// All PRBs (ascending `k`) occupied by a carrier in one direction.
    pub fn occupied_prbs(&self, f: f64, bw: f64, direction: Direction) -> Vec<u32> {
        let (start, _) = self.band_edges(direction);
        let spacing = self.prb_spacing();
        let half = bw.max(0.0) / 2.0;
        let first = (((f - half - start) / spacing).floor() - 1.0).max(0.0);
        let last = (((f + half - start) / spacing).floor() + 1.0).min(f64::from(self.n_prb) - 1.0);
        if !(first.is_finite() && last.is_finite()) || last < first {
            return Vec::new();
        }
        (first as u32 + 1..=last as u32 + 1)
            .filter(|&k| {
                self.carrier_occupies_prb(f, bw, PrbIndex::new(k, direction))
                    .unwrap_or(false)
            })
            .collect()
    }
}

/// Doppler offset `(v_s / c) * f0`.
pub fn doppler_correction(ground_speed: f64, f0: f64) -> Result<f64> {
    if ground_speed < 0.0 || ground_speed.is_nan() {
        return Err(Error::NegativeSpeed(ground_speed));
    }
    Ok(ground_speed / SPEED_OF_LIGHT * f0)
}

/// Carrier frequency after Doppler correction: raised while the satellite
/// approaches, lowered while it departs.
pub fn corrected_frequency(carrier: &CarrierTone, ground_speed: f64, motion: Motion) -> f64 {
    let f0 = carrier.sky_frequency;
    let shift = ground_speed.abs() / SPEED_OF_LIGHT * f0;
    match motion {
        Motion::Approaching => f0 + shift,
        Motion::Departing => f0 - shift,
        Motion::Stationary => f0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dl(k: u32) -> PrbIndex {
        PrbIndex::new(k, Direction::Downlink)
    }

    fn fdd() -> BandPlan {
        BandPlan::new(2.0e9, 2.009e9, 50, 15e3, 12, DuplexMode::Fdd, 300e6).unwrap()
    }

    /// Spacing 200 kHz, width 180 kHz: 20 kHz guard between PRBs.
    fn gapped() -> BandPlan {
        BandPlan::new(1.0e9, 1.0e9 + 2.0e6, 10, 15e3, 12, DuplexMode::Tdd, 0.0).unwrap()
    }

    #[test]
    fn first_prb_starts_at_band_start() {
        let plan = BandPlan::c_band_default();
        assert_eq!(plan.prb_start_frequency(dl(1)).unwrap(), 3.7e9);
        assert_eq!(plan.prb_interval(dl(1)).unwrap().0, 3.7e9);
    }

    #[test]
    fn last_prb_of_default_plan() {
        let plan = BandPlan::c_band_default();
        let f = plan.prb_start_frequency(dl(50)).unwrap();
        let expected = 3.7e9 + (9e6 / 50.0) * 49.0;
        assert_eq!(expected, 3_708_820_000.0);
        assert!((f - expected).abs() <= 1e-9 * expected);
    }

    #[test]
    fn fdd_uplink_is_shifted_by_duplex_distance() {
        let plan = fdd();
        let ul = plan.prb_start_frequency(PrbIndex::new(1, Direction::Uplink)).unwrap();
        assert_eq!(ul, 2.0e9 - 3.0e8);
        let tdd = BandPlan::c_band_default();
        assert_eq!(
            tdd.prb_start_frequency(PrbIndex::new(7, Direction::Uplink)).unwrap(),
            tdd.prb_start_frequency(dl(7)).unwrap()
        );
    }

    #[test]
    fn prb_width_is_180_khz() {
        let plan = BandPlan::c_band_default();
        let (a, b) = plan.prb_interval(dl(13)).unwrap();
        assert!((b - a - 180_000.0).abs() < 1e-6);
    }

    #[test]
    fn guard_gap_between_prbs() {
        let plan = gapped();
        let (_, end3) = plan.prb_interval(dl(3)).unwrap();
        let (start4, _) = plan.prb_interval(dl(4)).unwrap();
        let gap = start4 - end3;
        assert!((gap - (plan.prb_spacing() - plan.prb_width())).abs() < 1e-6);
        assert!((gap - 20_000.0).abs() < 1e-6);
        let f = end3 + gap / 2.0;
        assert_eq!(plan.frequency_to_prb(f, Direction::Downlink), None);
        for k in 1..=plan.n_prb {
            assert!(!plan.carrier_occupies_prb(f, 0.0, dl(k)).unwrap());
        }
    }

    #[test]
    fn out_of_range_prb() {
        let plan = BandPlan::c_band_default();
        assert_eq!(plan.prb_start_frequency(dl(0)), Err(Error::PrbOutOfRange { k: 0, n_prb: 50 }));
        assert!(plan.prb_interval(dl(51)).is_err());
    }

    #[test]
    fn out_of_band_frequency_maps_to_nothing() {
        let plan = BandPlan::c_band_default();
        assert_eq!(plan.frequency_to_prb(plan.f_end + 1.0, Direction::Downlink), None);
        assert_eq!(plan.frequency_to_prb(plan.f_start - 1.0, Direction::Downlink), None);
        assert_eq!(plan.frequency_to_prb(1.0, Direction::Downlink), None);
    }

    #[test]
    fn round_trip_every_prb_both_directions() {
        for plan in [BandPlan::c_band_default(), fdd(), gapped()] {
            for direction in Direction::BOTH {
                for k in 1..=plan.n_prb {
                    let prb = PrbIndex::new(k, direction);
                    let f = plan.prb_start_frequency(prb).unwrap();
                    assert_eq!(plan.frequency_to_prb(f, direction), Some(prb));
                }
            }
        }
    }

    #[test]
    fn band_plan_validation() {
        assert!(BandPlan::new(3.7e9, 3.6e9, 50, 15e3, 12, DuplexMode::Tdd, 0.0).is_err());
        assert!(BandPlan::new(3.7e9, 3.709e9, 0, 15e3, 12, DuplexMode::Tdd, 0.0).is_err());
        assert!(BandPlan::new(3.7e9, 3.709e9, 50, 15e3, 12, DuplexMode::Fdd, 0.0).is_err());
        assert!(BandPlan::new(3.7e9, 3.709e9, 50, 15e3, 12, DuplexMode::Tdd, 1.0).is_err());
    }

    #[test]
    fn doppler_golden_value() {
        let v = 7800.0;
        let f0 = 3.5e9;
        let expected = 7800.0 / 299_792_458.0 * 3.5e9;
        let got = doppler_correction(v, f0).unwrap();
        assert!((got - expected).abs() <= 1e-12 * expected);
        assert!((got - 91_062.998).abs() < 1e-3);
        assert_eq!(doppler_correction(0.0, f0).unwrap(), 0.0);
        assert!((doppler_correction(v, 2.0 * f0).unwrap() - 2.0 * got).abs() < 1e-9);
        assert!(matches!(doppler_correction(-1.0, f0), Err(Error::NegativeSpeed(_))));
    }

    #[test]
    fn corrected_frequency_signs() {
        let c = CarrierTone::new(3.5e9, 180e3).unwrap();
        assert_eq!(corrected_frequency(&c, 7800.0, Motion::Stationary), 3.5e9);
        let up = corrected_frequency(&c, 7800.0, Motion::Approaching);
        let down = corrected_frequency(&c, 7800.0, Motion::Departing);
        assert!((up - 3_500_091_062.998).abs() < 1e-3);
        assert!(((up - 3.5e9) + (down - 3.5e9)).abs() < 1e-6);
    }

    #[test]
    fn carrier_occupancy_cases() {
        let plan = BandPlan::c_band_default();
        let (a, b) = plan.prb_interval(dl(7)).unwrap();
        let mid = (a + b) / 2.0;
        assert!(plan.carrier_occupies_prb(mid, 0.0, dl(7)).unwrap());
        assert!(!plan.carrier_occupies_prb(mid, 0.0, dl(8)).unwrap());
        // straddling the 7/8 boundary
        assert!(plan.carrier_occupies_prb(b, 100e3, dl(7)).unwrap());
        assert!(plan.carrier_occupies_prb(b, 100e3, dl(8)).unwrap());
        assert!(!plan.carrier_occupies_prb(b, 100e3, dl(9)).unwrap());
        assert_eq!(plan.occupied_prbs(b, 100e3, Direction::Downlink), vec![7, 8]);
        // one PRB wide, centered: exactly that PRB
        assert_eq!(plan.occupied_prbs(mid, 180e3, Direction::Downlink), vec![7]);
        assert!(plan.occupied_prbs(plan.f_end + 1e6, 180e3, Direction::Downlink).is_empty());
    }

    proptest! {
        #[test]
        fn frequency_to_prb_matches_linear_scan(offset in 0.0f64..1.0) {
            for plan in [BandPlan::c_band_default(), gapped(), fdd()] {
                for direction in Direction::BOTH {
                    let (start, end) = plan.band_edges(direction);
                    let f = start + offset * (end - start);
                    let scan = (1..=plan.n_prb).map(|k| PrbIndex::new(k, direction)).find(|&p| {
                        let (a, b) = plan.prb_interval(p).unwrap();
                        a <= f && f < b
                    });
                    prop_assert_eq!(plan.frequency_to_prb(f, direction), scan);
                }
            }
        }

        #[test]
        fn occupied_prbs_matches_brute_force(offset in -0.05f64..1.05, bw in 0.0f64..600e3) {
            let plan = gapped();
            let (start, end) = plan.band_edges(Direction::Downlink);
            let f = start + offset * (end - start);
            let brute: Vec<u32> = (1..=plan.n_prb).filter(|&k| {
                let (a, b) = plan.prb_interval(dl(k)).unwrap();
                if bw == 0.0 { a <= f && f < b } else { f - bw / 2.0 < b && f + bw / 2.0 > a }
            }).collect();
            prop_assert_eq!(plan.occupied_prbs(f, bw, Direction::Downlink), brute);
        }

        #[test]
        fn prb_intervals_are_disjoint(i in 1u32..50, j in 1u32..50) {
            prop_assume!(i != j);
            let plan = BandPlan::c_band_default();
            let (a1, b1) = plan.prb_interval(dl(i)).unwrap();
            let (a2, b2) = plan.prb_interval(dl(j)).unwrap();
            prop_assert!(b1 <= a2 || b2 <= a1);
        }

        #[test]
        fn fdd_directions_never_intersect(i in 1u32..=50, j in 1u32..=50) {
            let plan = fdd();
            let (a1, b1) = plan.prb_interval(dl(i)).unwrap();
            let (a2, b2) = plan.prb_interval(PrbIndex::new(j, Direction::Uplink)).unwrap();
            prop_assert!(b1 <= a2 || b2 <= a1);
        }
    }
}
