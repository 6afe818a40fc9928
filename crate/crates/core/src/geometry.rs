//! Planar geometry for the sector layout.
//!
//! Geographic coordinates are flattened with a local equirectangular
//! projection, sector sites are tessellated into Voronoi cells (clipped to a
//! rectangular bounding box), and satellite footprints are tested against the
//! cells with a closed-set circle/polygon overlap predicate.
//!
//! The tessellation is built per site by successive half-plane clipping
//! against the perpendicular bisectors of the other sites, visited in order of
//! increasing distance. Clipping stops as soon as the next site is farther
//! than twice the current cell radius, since no remaining bisector can cut the
//! cell. Worst case is O(q² log q); for the sparse layouts used here the
//! clipping itself touches only a handful of neighbours per site.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean Earth radius used by the local projection, in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Largest longitude or latitude offset from the origin that
/// [`project_to_plane`] accepts.
pub const MAX_PROJECTION_OFFSET_DEG: f64 = 2.0;

/// Points closer than this to a polygon boundary count as on it.
const BOUNDARY_EPS_M: f64 = 1e-9;

/// Longitude/latitude pair in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub longitude: f64,
    pub latitude: f64,
}

impl GeoPoint {
    pub fn new(longitude: f64, latitude: f64) -> Result<Self> {
        if !(-180.0..=180.0).contains(&longitude) {
            return Err(Error::InvalidCoordinate(format!("longitude {longitude} outside [-180, 180]")));
        }
        if !(-90.0..=90.0).contains(&latitude) {
            return Err(Error::InvalidCoordinate(format!("latitude {latitude} outside [-90, 90]")));
        }
        Ok(Self { longitude, latitude })
    }
}

/// Point in the local tangent plane: meters east (`x`) and north (`y`) of the
/// projection origin.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: PlanePoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn distance_sq(self, other: PlanePoint) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn translate(self, dx: f64, dy: f64) -> PlanePoint {
        PlanePoint::new(self.x + dx, self.y + dy)
    }
}

fn sub(a: PlanePoint, b: PlanePoint) -> (f64, f64) {
    (a.x - b.x, a.y - b.y)
}

fn cross(a: (f64, f64), b: (f64, f64)) -> f64 {
    a.0 * b.1 - a.1 * b.0
}

fn dot(a: (f64, f64), b: (f64, f64)) -> f64 {
    a.0 * b.0 + a.1 * b.1
}

/// Equirectangular projection of `p` around `origin`.
///
/// Rejects points more than [`MAX_PROJECTION_OFFSET_DEG`] away from the origin
/// in either coordinate, where the flat-Earth distortion stops being small at
/// cluster scale.
pub fn project_to_plane(p: GeoPoint, origin: GeoPoint) -> Result<PlanePoint> {
    if (p.longitude - origin.longitude).abs() > MAX_PROJECTION_OFFSET_DEG
        || (p.latitude - origin.latitude).abs() > MAX_PROJECTION_OFFSET_DEG
    {
        return Err(Error::ProjectionRange {
            lon: p.longitude,
            lat: p.latitude,
            max_deg: MAX_PROJECTION_OFFSET_DEG,
        });
    }
    Ok(project_unguarded(p, origin))
}

/// Same mapping as [`project_to_plane`] without the proximity guard.
///
/// Used for satellite nadir points, which matter while still hundreds of
/// kilometers away from the cluster.
pub fn project_unguarded(p: GeoPoint, origin: GeoPoint) -> PlanePoint {
    let k = PI / 180.0 * EARTH_RADIUS_M;
    PlanePoint {
        x: (p.longitude - origin.longitude) * k * origin.latitude.to_radians().cos(),
        y: (p.latitude - origin.latitude) * k,
    }
}

/// Inverse of [`project_to_plane`].
pub fn unproject(q: PlanePoint, origin: GeoPoint) -> Result<GeoPoint> {
    let k = PI / 180.0 * EARTH_RADIUS_M;
    let cos_lat = origin.latitude.to_radians().cos();
    GeoPoint::new(origin.longitude + q.x / (k * cos_lat), origin.latitude + q.y / k)
}

/// Convex polygon with counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    vertices: Vec<PlanePoint>,
}

impl Region {
    /// Validates that the vertices form a convex, counter-clockwise polygon
    /// with nonzero area.
    pub fn new(vertices: Vec<PlanePoint>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidRegion(format!("{} vertices, need at least 3", vertices.len())));
        }
        if vertices.iter().any(|v| !v.x.is_finite() || !v.y.is_finite()) {
            return Err(Error::InvalidRegion("non-finite vertex".into()));
        }
        let region = Region { vertices };
        let area = region.signed_area();
        if area <= 0.0 {
            return Err(Error::InvalidRegion(format!(
                "signed area {area} is not positive (vertices must be counter-clockwise)"
            )));
        }
        let n = region.vertices.len();
        for i in 0..n {
            let a = region.vertices[i];
            let b = region.vertices[(i + 1) % n];
            let c = region.vertices[(i + 2) % n];
            let turn = cross(sub(b, a), sub(c, b));
            if turn < -1e-9 * area.max(1.0) {
                return Err(Error::InvalidRegion(format!("reflex vertex at index {}", (i + 1) % n)));
            }
        }
        // A convex polygon that winds more than once is self-intersecting.
        let winding = exterior_angle_sum(&region.vertices);
        if (winding - 2.0 * PI).abs() > 1e-6 {
            return Err(Error::InvalidRegion("polygon is self-intersecting".into()));
        }
        Ok(region)
    }

    /// Axis-aligned rectangle spanning `min` to `max`.
    pub fn rectangle(min: PlanePoint, max: PlanePoint) -> Result<Self> {
        Region::new(vec![
            min,
            PlanePoint::new(max.x, min.y),
            max,
            PlanePoint::new(min.x, max.y),
        ])
    }

    /// Bounding rectangle of `points`, grown by `margin` meters on every side.
    pub fn bounding_box(points: &[PlanePoint], margin: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::NoSites);
        }
        let mut min = PlanePoint::new(f64::INFINITY, f64::INFINITY);
        let mut max = PlanePoint::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        Region::rectangle(min.translate(-margin, -margin), max.translate(margin, margin))
    }

    pub fn vertices(&self) -> &[PlanePoint] {
        &self.vertices
    }

    fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % n];
                a.x * b.y - b.x * a.y
            })
            .sum::<f64>()
            / 2.0
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    /// Closed containment test; boundary points are inside.
    pub fn contains(&self, p: PlanePoint) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let edge = sub(b, a);
            let len = edge.0.hypot(edge.1);
            cross(edge, sub(p, a)) >= -BOUNDARY_EPS_M * len
        })
    }

    /// Euclidean distance from `p` to the closed polygon (zero inside).
    pub fn distance_to(&self, p: PlanePoint) -> f64 {
        if self.contains(p) {
            return 0.0;
        }
        let n = self.vertices.len();
        (0..n)
            .map(|i| segment_distance(p, self.vertices[i], self.vertices[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn translate(&self, dx: f64, dy: f64) -> Region {
        Region {
            vertices: self.vertices.iter().map(|v| v.translate(dx, dy)).collect(),
        }
    }

    /// Uniform sample from the polygon interior (fan triangulation).
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> PlanePoint {
        let v0 = self.vertices[0];
        let areas: Vec<f64> = self
            .vertices
            .windows(2)
            .skip(1)
            .map(|w| cross(sub(w[0], v0), sub(w[1], v0)).abs() / 2.0)
            .collect();
        let total: f64 = areas.iter().sum();
        let mut pick = rng.random::<f64>() * total;
        let mut tri = areas.len() - 1;
        for (i, a) in areas.iter().enumerate() {
            if pick < *a {
                tri = i;
                break;
            }
            pick -= a;
        }
        let (b, c) = (self.vertices[tri + 1], self.vertices[tri + 2]);
        let r1 = rng.random::<f64>().sqrt();
        let r2 = rng.random::<f64>();
        PlanePoint::new(
            (1.0 - r1) * v0.x + r1 * (1.0 - r2) * b.x + r1 * r2 * c.x,
            (1.0 - r1) * v0.y + r1 * (1.0 - r2) * b.y + r1 * r2 * c.y,
        )
    }

    /// Keeps the part of the polygon where `normal · (r - anchor) <= 0`.
    /// Returns `None` when nothing with positive area remains.
    fn clip_half_plane(&self, normal: (f64, f64), anchor: PlanePoint) -> Option<Region> {
        let n = self.vertices.len();
        let side: Vec<f64> = self.vertices.iter().map(|v| dot(normal, sub(*v, anchor))).collect();
        if side.iter().all(|s| *s <= 0.0) {
            return Some(self.clone());
        }
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let j = (i + 1) % n;
            let (a, b) = (self.vertices[i], self.vertices[j]);
            let (da, db) = (side[i], side[j]);
            if da <= 0.0 {
                out.push(a);
            }
            if (da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0) {
                let t = da / (da - db);
                out.push(PlanePoint::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
            }
        }
        dedup_ring(&mut out);
        if out.len() < 3 {
            return None;
        }
        let region = Region { vertices: out };
        (region.signed_area() > 0.0).then_some(region)
    }
}

fn exterior_angle_sum(vertices: &[PlanePoint]) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|i| {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            let (u, v) = (sub(b, a), sub(c, b));
            cross(u, v).atan2(dot(u, v))
        })
        .sum()
}

fn dedup_ring(points: &mut Vec<PlanePoint>) {
    points.dedup_by(|b, a| a.distance(*b) < BOUNDARY_EPS_M);
    while points.len() > 1 && points[0].distance(points[points.len() - 1]) < BOUNDARY_EPS_M {
        points.pop();
    }
}

fn segment_distance(p: PlanePoint, a: PlanePoint, b: PlanePoint) -> f64 {
    let ab = sub(b, a);
    let len_sq = dot(ab, ab);
    if len_sq == 0.0 {
        return p.distance(a);
    }
    let t = (dot(sub(p, a), ab) / len_sq).clamp(0.0, 1.0);
    p.distance(PlanePoint::new(a.x + t * ab.0, a.y + t * ab.1))
}

/// Voronoi partition of the sites, clipped to `bounds`. `cells[i]` belongs to
/// `sites[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tessellation {
    sites: Vec<PlanePoint>,
    cells: Vec<Region>,
    bounds: Region,
}

impl Tessellation {
    pub fn sites(&self) -> &[PlanePoint] {
        &self.sites
    }

    pub fn cells(&self) -> &[Region] {
        &self.cells
    }

    pub fn cell(&self, index: usize) -> &Region {
        &self.cells[index]
    }

    pub fn bounds(&self) -> &Region {
        &self.bounds
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Index of the first cell whose closed polygon contains `p`.
    pub fn cell_containing(&self, p: PlanePoint) -> Option<usize> {
        self.cells.iter().position(|c| c.contains(p))
    }
}

/// Builds the bounded Voronoi tessellation of `sites`.
pub fn voronoi_tessellate(sites: &[PlanePoint], bounds: &Region) -> Result<Tessellation> {
    if sites.is_empty() {
        return Err(Error::NoSites);
    }
    let mut order: Vec<usize> = (0..sites.len()).collect();
    order.sort_by(|&a, &b| sites[a].x.total_cmp(&sites[b].x).then(sites[a].y.total_cmp(&sites[b].y)));
    for w in order.windows(2) {
        if sites[w[0]] == sites[w[1]] {
            let (first, second) = (w[0].min(w[1]), w[0].max(w[1]));
            return Err(Error::DuplicateSite { first, second });
        }
    }
    if let Some(i) = sites.iter().position(|s| !bounds.contains(*s)) {
        return Err(Error::SiteOutsideBounds(i));
    }

    let mut cells = Vec::with_capacity(sites.len());
    let mut neighbours: Vec<(f64, usize)> = Vec::with_capacity(sites.len());
    for (i, &site) in sites.iter().enumerate() {
        neighbours.clear();
        neighbours.extend(
            sites
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(j, s)| (site.distance_sq(*s), j)),
        );
        neighbours.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        let mut cell = bounds.clone();
        let mut reach_sq = max_vertex_distance_sq(&cell, site);
        for &(d_sq, j) in &neighbours {
            // Bisector lies at d/2; it cannot cut a cell of radius r when d > 2r.
            if d_sq > 4.0 * reach_sq {
                break;
            }
            let other = sites[j];
            let normal = sub(other, site);
            let mid = PlanePoint::new((site.x + other.x) / 2.0, (site.y + other.y) / 2.0);
            cell = cell.clip_half_plane(normal, mid).ok_or_else(|| {
                Error::InvalidRegion(format!("cell of site {i} vanished while clipping against site {j}"))
            })?;
            reach_sq = max_vertex_distance_sq(&cell, site);
        }
        cells.push(cell);
    }

    Ok(Tessellation {
        sites: sites.to_vec(),
        cells,
        bounds: bounds.clone(),
    })
}

fn max_vertex_distance_sq(cell: &Region, site: PlanePoint) -> f64 {
    cell.vertices.iter().map(|v| v.distance_sq(site)).fold(0.0, f64::max)
}

/// Index of the site nearest to `p`; ties go to the lowest index.
pub fn nearest_site(p: PlanePoint, t: &Tessellation) -> Result<usize> {
    if !t.bounds.contains(p) {
        return Err(Error::PointOutsideBounds { x: p.x, y: p.y });
    }
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, s) in t.sites.iter().enumerate() {
        let d = p.distance_sq(*s);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    Ok(best)
}

/// Overlap indicator between a closed polygon and a closed disc: true when
/// the disc reaches the polygon, boundary contact included.
pub fn region_circle_overlap(r: &Region, center: PlanePoint, radius: f64) -> Result<bool> {
    if radius < 0.0 || radius.is_nan() {
        return Err(Error::NegativeRadius(radius));
    }
    Ok(r.distance_to(center) <= radius)
}
