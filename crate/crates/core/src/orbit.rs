//! Satellite ground tracks and nadir footprints.
//!
//! Trajectories are piecewise-linear in (longitude, latitude, altitude)
//! between timed waypoints. The local projection is affine in longitude and
//! latitude, so a linear segment on the globe is also a straight segment in
//! the simulation plane.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{project_unguarded, GeoPoint, PlanePoint};
use crate::spectrum::CarrierTone;

/// Range-rate differences below this are treated as no motion, in meters.
pub const STATIONARY_EPS_M: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    /// Seconds since scenario start.
    pub time: f64,
    pub position: GeoPoint,
    /// Meters above the surface.
    pub altitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatelliteTrajectory {
    pub id: String,
    pub waypoints: Vec<Waypoint>,
    /// Ground speed used for the Doppler correction, m/s.
    pub ground_speed: f64,
    pub carriers: Vec<CarrierTone>,
    /// Full cone beamwidth, degrees.
    pub beamwidth: f64,
}

/// Projected coverage disc of a satellite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SatelliteFootprint {
    pub center: PlanePoint,
    pub radius: f64,
}

impl SatelliteFootprint {
    pub fn contains(&self, p: PlanePoint) -> bool {
        self.center.distance(p) <= self.radius
    }
}

/// Sign of the range rate between a footprint center and a ground point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Motion {
    Approaching,
    Departing,
    Stationary,
}

impl SatelliteTrajectory {
    pub fn new(
        id: impl Into<String>,
        waypoints: Vec<Waypoint>,
        ground_speed: f64,
        carriers: Vec<CarrierTone>,
        beamwidth: f64,
    ) -> Result<Self> {
        let traj = SatelliteTrajectory {
            id: id.into(),
            waypoints,
            ground_speed,
            carriers,
            beamwidth,
        };
        traj.validate()?;
        Ok(traj)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidTrajectory(format!("{}: {m}", self.id)));
        if self.waypoints.is_empty() {
            return bad("no waypoints".into());
        }
        if self.waypoints.windows(2).any(|w| !(w[1].time > w[0].time)) {
            return bad("waypoint times must be strictly increasing".into());
        }
        if let Some(w) = self.waypoints.iter().find(|w| !(w.altitude > 0.0)) {
            return bad(format!("altitude {} at t = {} must be positive", w.altitude, w.time));
        }
        if !(self.ground_speed > 0.0 && self.ground_speed.is_finite()) {
            return bad(format!("ground speed {} must be positive", self.ground_speed));
        }
        if !(self.beamwidth > 0.0 && self.beamwidth < 180.0) {
            return Err(Error::InvalidBeamwidth(self.beamwidth));
        }
        Ok(())
    }

    /// `(first, last)` waypoint times.
    pub fn span(&self) -> (f64, f64) {
        (self.waypoints[0].time, self.waypoints[self.waypoints.len() - 1].time)
    }

    /// Interpolated position and altitude at `t`.
    pub fn position_at(&self, t: f64) -> Result<(GeoPoint, f64)> {
        let (start, end) = self.span();
        if !(t >= start && t <= end) {
            return Err(Error::TimeOutOfSpan { t, start, end });
        }
        let i = self.waypoints.partition_point(|w| w.time <= t);
        let b = &self.waypoints[i.max(1).min(self.waypoints.len() - 1)];
        let a = &self.waypoints[i.max(1) - 1];
        if a.time == t || self.waypoints.len() == 1 {
            return Ok((a.position, a.altitude));
        }
        if b.time == t {
            return Ok((b.position, b.altitude));
        }
        let s = (t - a.time) / (b.time - a.time);
        let lerp = |u: f64, v: f64| u + s * (v - u);
        let position = GeoPoint {
            longitude: lerp(a.position.longitude, b.position.longitude),
            latitude: lerp(a.position.latitude, b.position.latitude),
        };
        Ok((position, lerp(a.altitude, b.altitude)))
    }

    /// Nadir footprint at `t` in the plane around `origin`.
    pub fn footprint_at(&self, t: f64, origin: GeoPoint) -> Result<SatelliteFootprint> {
        let (position, altitude) = self.position_at(t)?;
        Ok(SatelliteFootprint {
            center: project_unguarded(position, origin),
            radius: footprint_radius(altitude, self.beamwidth)?,
        })
    }

    /// Three-dimensional distance from a ground point to the satellite.
    pub fn slant_range(&self, t: f64, ground: PlanePoint, origin: GeoPoint) -> Result<f64> {
        let (position, altitude) = self.position_at(t)?;
        Ok(project_unguarded(position, origin).distance(ground).hypot(altitude))
    }
}

/// Radius of the nadir cone footprint, `altitude * (1 - cos θ) / sin θ`.
pub fn footprint_radius(altitude: f64, beamwidth_deg: f64) -> Result<f64> {
    if !(beamwidth_deg > 0.0 && beamwidth_deg < 180.0) {
        return Err(Error::InvalidBeamwidth(beamwidth_deg));
    }
    if !(altitude > 0.0) {
        return Err(Error::InvalidAltitude(altitude));
    }
    let theta = beamwidth_deg.to_radians();
    Ok(altitude * (1.0 - theta.cos()) / theta.sin())
}

/// Classifies the footprint center as approaching or departing a ground point
/// by comparing their distance at `t` and `t + dt`.
pub fn range_rate_sign(
    traj: &SatelliteTrajectory,
    sector_pos: PlanePoint,
    t: f64,
    dt: f64,
    origin: GeoPoint,
) -> Result<Motion> {
    if !(dt > 0.0) {
        return Err(Error::InvalidTimeStep(dt));
    }
    let now = project_unguarded(traj.position_at(t)?.0, origin).distance(sector_pos);
    let next = project_unguarded(traj.position_at(t + dt)?.0, origin).distance(sector_pos);
    let delta = next - now;
    Ok(if delta.abs() < STATIONARY_EPS_M {
        Motion::Stationary
    } else if delta < 0.0 {
        Motion::Approaching
    } else {
        Motion::Departing
    })
}

/// Motion tag at `t`, looking `dt` ahead when the trajectory extends that far
/// and `dt` behind otherwise.
pub fn motion_at(
    traj: &SatelliteTrajectory,
    sector_pos: PlanePoint,
    t: f64,
    dt: f64,
    origin: GeoPoint,
) -> Result<Motion> {
    let (start, end) = traj.span();
    if t + dt <= end {
        range_rate_sign(traj, sector_pos, t, dt, origin)
    } else if t - dt >= start {
        range_rate_sign(traj, sector_pos, t - dt, dt, origin)
    } else {
        Err(Error::TimeOutOfSpan { t: t + dt, start, end })
    }
}
