//! Terminal-centric satellite geometry.
//!
//! The frame has its z-axis at the terminal's zenith and x/y aligned with
//! the array axes. Elevation is measured from the x-y plane, azimuth from
//! the x-axis towards y.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};

/// Mean spherical Earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Position of one satellite as seen from the terminal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SatellitePosition {
    distance: f64,
    elevation: f64,
    azimuth: f64,
}

impl SatellitePosition {
    /// Distance in meters, elevation and azimuth in radians. Azimuth is
    /// wrapped to `[0, 2π)`.
    pub fn new(distance: f64, elevation: f64, azimuth: f64) -> Result<Self> {
        if !(distance > 0.0) || !distance.is_finite() {
            return Err(Error::invalid(format!("distance must be > 0, got {distance}")));
        }
        if !(0.0..=FRAC_PI_2).contains(&elevation) {
            return Err(Error::invalid(format!(
                "elevation must lie in [0, π/2], got {elevation}"
            )));
        }
        if !azimuth.is_finite() {
            return Err(Error::invalid("azimuth must be finite"));
        }
        Ok(Self {
            distance,
            elevation,
            azimuth: wrap_azimuth(azimuth),
        })
    }

    /// Converts a Cartesian point in the terminal frame.
    pub fn from_cartesian(p: [f64; 3]) -> Result<Self> {
        let d = norm3(p);
        if !(d > 0.0) {
            return Err(Error::invalid("point coincides with the terminal"));
        }
        let el = (p[2] / d).clamp(-1.0, 1.0).asin();
        let az = p[1].atan2(p[0]);
        Self::new(d, el.min(FRAC_PI_2), az)
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn elevation(&self) -> f64 {
        self.elevation
    }

    pub fn azimuth(&self) -> f64 {
        self.azimuth
    }

    /// Unit direction from the terminal towards the satellite.
    pub fn direction(&self) -> [f64; 3] {
        direction(self.elevation, self.azimuth)
    }

    pub fn to_cartesian(&self) -> [f64; 3] {
        let u = self.direction();
        [u[0] * self.distance, u[1] * self.distance, u[2] * self.distance]
    }
}

/// Direction cosines `(φ_x, φ_y)` of a satellite with respect to the array
/// axes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpaceAngles {
    pub x: f64,
    pub y: f64,
}

impl SpaceAngles {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

impl std::ops::Neg for SpaceAngles {
    type Output = SpaceAngles;

    fn neg(self) -> SpaceAngles {
        SpaceAngles::new(-self.x, -self.y)
    }
}

/// `φ_x = cos θ_el cos θ_az`, `φ_y = cos θ_el sin θ_az`.
pub fn space_angles(pos: &SatellitePosition) -> SpaceAngles {
    let ce = pos.elevation.cos();
    SpaceAngles::new(ce * pos.azimuth.cos(), ce * pos.azimuth.sin())
}

/// Slant range from a ground terminal to a point at altitude `altitude`
/// seen under `elevation`, on a spherical Earth of radius `earth_radius`.
pub fn slant_range(altitude: f64, elevation: f64, earth_radius: f64) -> f64 {
    let rs = earth_radius * elevation.sin();
    (rs * rs + 2.0 * earth_radius * altitude + altitude * altitude).sqrt() - rs
}

/// Pointing of the swarm centroid as seen from the terminal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwarmPlacement {
    /// Centroid elevation in radians.
    pub elevation: f64,
    /// Centroid azimuth in radians.
    pub azimuth: f64,
    /// Orbit altitude in meters.
    pub altitude: f64,
    /// Lowest admissible centroid elevation in radians.
    pub min_elevation: f64,
    pub earth_radius: f64,
}

impl SwarmPlacement {
    pub fn zenith(altitude: f64) -> Self {
        Self {
            elevation: FRAC_PI_2,
            azimuth: 0.0,
            altitude,
            min_elevation: PI / 6.0,
            earth_radius: EARTH_RADIUS_M,
        }
    }
}

/// A static satellite swarm.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmGeometry {
    pub positions: Vec<SatellitePosition>,
    pub inter_sat_distance: f64,
    pub altitude: f64,
}

impl SwarmGeometry {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn space_angles(&self) -> Vec<SpaceAngles> {
        self.positions.iter().map(space_angles).collect()
    }

    /// Largest relative deviation of any pairwise distance from
    /// `inter_sat_distance`.
    pub fn formation_error(&self) -> f64 {
        let pts: Vec<_> = self.positions.iter().map(|p| p.to_cartesian()).collect();
        let mut worst = 0.0_f64;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let d = norm3(sub3(pts[i], pts[j]));
                let err = if self.inter_sat_distance > 0.0 {
                    (d - self.inter_sat_distance).abs() / self.inter_sat_distance
                } else {
                    d / self.altitude
                };
                worst = worst.max(err);
            }
        }
        worst
    }
}

/// Three satellites on an equilateral triangle of side `side` centered on the
/// centroid ray.
///
/// The triangle lies in the plane orthogonal to the centroid ray. Vertex 0
/// points along the projection of the array y-axis onto that plane (the
/// zenith is used instead if the ray is parallel to y); vertices 1 and 2
/// follow at ±120°.
pub fn triangle_swarm(placement: &SwarmPlacement, side: f64) -> Result<SwarmGeometry> {
    let SwarmPlacement {
        elevation,
        azimuth,
        altitude,
        min_elevation,
        earth_radius,
    } = *placement;
    if !(side >= 0.0) || !side.is_finite() {
        return Err(Error::invalid(format!("inter-satellite distance must be >= 0, got {side}")));
    }
    if !(altitude > 0.0) {
        return Err(Error::invalid(format!("altitude must be > 0, got {altitude}")));
    }
    if !(elevation >= min_elevation) || elevation > FRAC_PI_2 {
        return Err(Error::invalid(format!(
            "centroid elevation {:.4}° outside [{:.4}°, 90°]",
            elevation.to_degrees(),
            min_elevation.to_degrees()
        )));
    }
    let range = slant_range(altitude, elevation, earth_radius);
    let u = direction(elevation, azimuth);
    let centroid = scale3(u, range);

    let mut north = reject3([0.0, 1.0, 0.0], u);
    if norm3(north) < 1e-9 {
        north = reject3([0.0, 0.0, 1.0], u);
    }
    let north = scale3(north, 1.0 / norm3(north));
    let east = cross3(u, north);

    let radius = side / 3f64.sqrt();
    let positions = (0..3)
        .map(|k| {
            let a = TAU * k as f64 / 3.0;
            let offset = add3(scale3(north, radius * a.cos()), scale3(east, radius * a.sin()));
            SatellitePosition::from_cartesian(add3(centroid, offset))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SwarmGeometry {
        positions,
        inter_sat_distance: side,
        altitude,
    })
}

fn direction(elevation: f64, azimuth: f64) -> [f64; 3] {
    let ce = elevation.cos();
    [ce * azimuth.cos(), ce * azimuth.sin(), elevation.sin()]
}

fn wrap_azimuth(az: f64) -> f64 {
    let w = az.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

fn add3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn scale3(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Component of `a` orthogonal to the unit vector `u`.
fn reject3(a: [f64; 3], u: [f64; 3]) -> [f64; 3] {
    sub3(a, scale3(u, dot3(a, u)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn zenith_has_zero_space_angles() {
        for az in [0.0, 1.0, 4.0] {
            let s = space_angles(&SatellitePosition::new(1.0, FRAC_PI_2, az).unwrap());
            assert!(s.x.abs() < 1e-16 && s.y.abs() < 1e-16);
        }
    }

    #[test]
    fn horizon_along_x() {
        let s = space_angles(&SatellitePosition::new(1.0, 0.0, 0.0).unwrap());
        assert_eq!(s, SpaceAngles::new(1.0, 0.0));
    }

    #[test]
    fn thirty_degrees_along_y() {
        let s = space_angles(&SatellitePosition::new(1.0, PI / 6.0, FRAC_PI_2).unwrap());
        assert!(s.x.abs() < 1e-16);
        assert_relative_eq!(s.y, 3f64.sqrt() / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_positions() {
        assert!(SatellitePosition::new(0.0, 0.1, 0.0).is_err());
        assert!(SatellitePosition::new(1.0, -0.1, 0.0).is_err());
        assert!(SatellitePosition::new(1.0, 1.6, 0.0).is_err());
        assert_relative_eq!(
            SatellitePosition::new(1.0, 0.1, -FRAC_PI_2).unwrap().azimuth(),
            1.5 * PI
        );
    }

    #[test]
    fn slant_range_at_zenith_is_altitude() {
        assert_relative_eq!(slant_range(600e3, FRAC_PI_2, EARTH_RADIUS_M), 600e3, max_relative = 1e-12);
        assert!(slant_range(1e-9, 0.3, EARTH_RADIUS_M) < 1e-6);
    }

    #[test]
    fn slant_range_matches_law_of_cosines() {
        // Triangle Earth-center / terminal / satellite: the angle at the
        // terminal is 90° + elevation; solve the quadratic from the law of
        // cosines for the side opposite the Earth-center angle.
        let (h, el, re) = (600e3_f64, 30f64.to_radians(), 6371e3_f64);
        let rs = re + h;
        let gamma = FRAC_PI_2 + el;
        // rs² = re² + d² − 2 re d cos γ  ⇒  d² − 2 re cos γ d + re² − rs² = 0
        let b = -2.0 * re * gamma.cos();
        let c = re * re - rs * rs;
        let oracle = (-b + (b * b - 4.0 * c).sqrt()) / 2.0;
        assert_relative_eq!(slant_range(h, el, re), oracle, max_relative = 1e-12);
        // ≈ 1075 km
        assert!((oracle - 1_075_000.0).abs() < 2_000.0);
    }

    #[test]
    fn degenerate_triangle_collapses_to_centroid() {
        let g = triangle_swarm(&SwarmPlacement::zenith(600e3), 0.0).unwrap();
        for p in &g.positions {
            assert_relative_eq!(p.distance(), 600e3, max_relative = 1e-12);
            assert_relative_eq!(p.elevation(), FRAC_PI_2, epsilon = 1e-12);
        }
    }

    #[test]
    fn zenith_vertex_range_from_circumradius() {
        let side = 40e3;
        let g = triangle_swarm(&SwarmPlacement::zenith(600e3), side).unwrap();
        let want = (600e3_f64.powi(2) + (side / 3f64.sqrt()).powi(2)).sqrt();
        for p in &g.positions {
            assert_relative_eq!(p.distance(), want, max_relative = 1e-12);
        }
        assert!(g.formation_error() < 1e-9);
    }

    #[test]
    fn rejects_low_centroid() {
        let mut pl = SwarmPlacement::zenith(600e3);
        pl.elevation = 20f64.to_radians();
        assert!(triangle_swarm(&pl, 10e3).is_err());
        assert!(triangle_swarm(&SwarmPlacement::zenith(600e3), -1.0).is_err());
    }

    proptest! {
        #[test]
        fn space_angle_norm_is_cos_elevation(el in 0.0..FRAC_PI_2, az in 0.0..TAU) {
            let s = space_angles(&SatellitePosition::new(1.0, el, az).unwrap());
            prop_assert!((s.norm() - el.cos()).abs() < 1e-12);
            prop_assert!(s.norm() <= 1.0 + 1e-15);
        }

        #[test]
        fn slant_range_decreases_with_elevation(h in 1e3..2e6_f64, a in 0.0..1.5_f64, b in 0.0..1.5_f64) {
            prop_assume!((a - b).abs() > 1e-6);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(slant_range(h, lo, EARTH_RADIUS_M) > slant_range(h, hi, EARTH_RADIUS_M));
        }

        #[test]
        fn triangle_distances_equal_side(
            el in (PI / 6.0)..FRAC_PI_2,
            az in 0.0..TAU,
            side in 1.0..200e3_f64,
        ) {
            let pl = SwarmPlacement { elevation: el, azimuth: az, ..SwarmPlacement::zenith(600e3) };
            let g = triangle_swarm(&pl, side).unwrap();
            prop_assert!(g.formation_error() < 1e-9);
        }

        #[test]
        fn triangle_distances_invariant_under_azimuth(
            el in (PI / 6.0)..1.5,
            az in 0.0..TAU,
            side in 1e3..200e3_f64,
        ) {
            let base = SwarmPlacement { elevation: el, ..SwarmPlacement::zenith(600e3) };
            let rotated = SwarmPlacement { azimuth: az, ..base };
            let pairwise = |g: &SwarmGeometry| {
                let p: Vec<_> = g.positions.iter().map(|p| p.to_cartesian()).collect();
                [norm3(sub3(p[0], p[1])), norm3(sub3(p[1], p[2])), norm3(sub3(p[0], p[2]))]
            };
            let a = pairwise(&triangle_swarm(&base, side).unwrap());
            let b = pairwise(&triangle_swarm(&rotated, side).unwrap());
            for (x, y) in a.iter().zip(b.iter()) {
                prop_assert!((x - y).abs() / x < 1e-9);
            }
        }
    }
}
