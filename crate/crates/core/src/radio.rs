//! Link-level radio model: grid-of-beams codebook, small-scale channel draws,
//! large-scale gain, SINR and spectral efficiency.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Thermal noise density at 290 K, dBm/Hz.
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

/// Fixed set of beamforming vectors, each with squared norm equal to the
/// antenna count.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamCodebook {
    num_antennas: usize,
    beams: Vec<Vec<Complex64>>,
}

impl BeamCodebook {
    pub fn num_antennas(&self) -> usize {
        self.num_antennas
    }

    pub fn beams(&self) -> &[Vec<Complex64>] {
        &self.beams
    }

    pub fn beam(&self, index: usize) -> &[Complex64] {
        &self.beams[index]
    }

    pub fn len(&self) -> usize {
        self.beams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beams.is_empty()
    }
}

/// Oversampled DFT grid of beams: beam `j` has element
/// `exp(i 2π m j / num_beams)` on antenna `m`.
pub fn grid_of_beams(num_antennas: usize, num_beams: usize) -> Result<BeamCodebook> {
    if num_antennas == 0 {
        return Err(Error::ZeroCount("antenna count"));
    }
    if num_beams == 0 {
        return Err(Error::ZeroCount("beam count"));
    }
    let beams = (0..num_beams)
        .map(|j| {
            let beam: Vec<Complex64> = (0..num_antennas)
                .map(|m| Complex64::from_polar(1.0, 2.0 * PI * (m * j) as f64 / num_beams as f64))
                .collect();
            // unit-modulus entries already give ‖f‖² = M; rescale anyway so
            // rounding in from_polar cannot drift the norm
            let norm_sq: f64 = beam.iter().map(Complex64::norm_sqr).sum();
            let scale = (num_antennas as f64 / norm_sq).sqrt();
            beam.into_iter().map(|c| c * scale).collect()
        })
        .collect();
    Ok(BeamCodebook { num_antennas, beams })
}

/// Small-scale channel vector plus large-scale power gain of one link.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h: Vec<Complex64>,
    pub large_scale_gain: f64,
}

impl ChannelRealization {
    /// i.i.d. circular Gaussian entries with variance `1/M`, so `E‖h‖² = 1`.
    pub fn draw<R: Rng + ?Sized>(num_antennas: usize, large_scale_gain: f64, rng: &mut R) -> Self {
        let sd = 1.0 / (SQRT_2 * (num_antennas as f64).sqrt());
        let h = (0..num_antennas)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re * sd, im * sd)
            })
            .collect();
        ChannelRealization { h, large_scale_gain }
    }
}

/// `|hᴴ f|²`.
pub fn beamformed_power(h: &[Complex64], f: &[Complex64]) -> f64 {
    h.iter().zip(f).map(|(a, b)| a.conj() * b).sum::<Complex64>().norm_sqr()
}

/// Beam maximizing `|√G hᴴ f|²`; ties go to the lowest index.
pub fn best_beam(ch: &ChannelRealization, cb: &BeamCodebook) -> Result<usize> {
    if ch.h.len() != cb.num_antennas {
        return Err(Error::DimensionMismatch {
            expected: cb.num_antennas,
            got: ch.h.len(),
        });
    }
    let mut best = 0;
    let mut best_power = f64::NEG_INFINITY;
    for (j, beam) in cb.beams.iter().enumerate() {
        let p = ch.large_scale_gain * beamformed_power(&ch.h, beam);
        if p > best_power {
            best = j;
            best_power = p;
        }
    }
    Ok(best)
}

/// Transmit power on one PRB and receiver noise power, watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkPowers {
    pub tx_power: f64,
    pub noise_power: f64,
}

/// One co-channel interferer as seen through the victim's combiner.
#[derive(Debug, Clone, Copy)]
pub struct Interferer<'a> {
    pub channel: &'a ChannelRealization,
    pub tx_power: f64,
    /// Beam the interference is projected on; `None` uses the serving beam.
    pub beam: Option<&'a [Complex64]>,
}

/// Per-draw SINR: `G P |hᴴ f|² / (σ² + Σ G' P' |h'ᴴ f|²)`.
pub fn sinr(
    serving: &ChannelRealization,
    powers: LinkPowers,
    beam: &[Complex64],
    interferers: &[Interferer<'_>],
) -> Result<f64> {
    if !(powers.noise_power > 0.0) {
        return Err(Error::NonPositiveNoise(powers.noise_power));
    }
    if serving.h.len() != beam.len() {
        return Err(Error::DimensionMismatch {
            expected: beam.len(),
            got: serving.h.len(),
        });
    }
    let signal = serving.large_scale_gain * powers.tx_power * beamformed_power(&serving.h, beam);
    let mut denominator = powers.noise_power;
    for i in interferers {
        let f = i.beam.unwrap_or(beam);
        if i.channel.h.len() != f.len() {
            return Err(Error::DimensionMismatch {
                expected: f.len(),
                got: i.channel.h.len(),
            });
        }
        denominator += i.channel.large_scale_gain * i.tx_power * beamformed_power(&i.channel.h, f);
    }
    Ok(signal / denominator)
}

/// `log2(1 + sinr)` in bits per channel use.
pub fn spectral_efficiency(sinr: f64) -> Result<f64> {
    if sinr < 0.0 || sinr.is_nan() {
        return Err(Error::NegativeSinr(sinr));
    }
    Ok((1.0 + sinr).log2())
}

/// Log-distance path loss with log-normal shadowing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossModel {
    pub exponent: f64,
    /// Loss at the reference distance, dB.
    pub reference_loss_db: f64,
    /// Meters; shorter distances clamp to it.
    pub reference_distance: f64,
    /// Standard deviation of the shadowing term, dB.
    pub shadowing_sigma_db: f64,
}

impl PathLossModel {
    pub const TERRESTRIAL: PathLossModel = PathLossModel {
        exponent: 3.5,
        reference_loss_db: 92.0,
        reference_distance: 35.0,
        shadowing_sigma_db: 6.0,
    };

    /// Free-space exponent, no shadowing; used for satellite-to-ground links.
    pub const SATELLITE: PathLossModel = PathLossModel {
        exponent: 2.0,
        reference_loss_db: 92.0,
        reference_distance: 35.0,
        shadowing_sigma_db: 0.0,
    };

    pub fn gain_db(&self, distance: f64, shadowing_db: f64) -> f64 {
        let d = distance.max(self.reference_distance);
        -(self.reference_loss_db + 10.0 * self.exponent * (d / self.reference_distance).log10()) + shadowing_db
    }
}

/// Linear large-scale gain `10^(G_dB / 10)` of a link at `distance`.
pub fn large_scale_gain(distance: f64, model: &PathLossModel, shadowing_db: f64) -> f64 {
    db_to_linear(model.gain_db(distance, shadowing_db))
}

/// Horizontal pattern of a sector antenna: `-min(12 (φ/φ3dB)², A_m)` dB with
/// φ3dB = 65° and A_m = 20 dB.
pub fn sector_antenna_gain_db(off_boresight_deg: f64) -> f64 {
    let phi = (off_boresight_deg + 180.0).rem_euclid(360.0) - 180.0;
    -(12.0 * (phi / 65.0).powi(2)).min(20.0)
}

/// Noise power in watts over `bandwidth_hz` with the given noise figure.
pub fn thermal_noise_power(bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    dbm_to_watts(THERMAL_NOISE_DBM_PER_HZ + 10.0 * bandwidth_hz.log10() + noise_figure_db)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}
