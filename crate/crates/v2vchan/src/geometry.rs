//! Planar terminal motion, antenna arrays, and scattering-cluster placement.
//!
//! Both link ends move in the 2D azimuth plane with linearly varying speed
//! `v(t) = v0 + a0·t` and linearly varying heading `α_v(t) = α_v + b0·t`.
//! Every quantity in this module is expressed in the terminal's own initial
//! frame: the terminal starts at the origin, clusters are placed by their
//! initial range and bearing, and antenna elements are fixed offsets from the
//! terminal reference point.
//!
//! The displaced position has the closed form of the integral
//! `∫ (v0 + a0·s)·[cos, sin](α_v + b0·s) ds`, which is evaluated here through
//! cancellation-free kernels so that a vanishing heading rate degrades
//! gracefully into the straight-line formula instead of dividing by `b0²`.

use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Ranges below this are treated as a terminal/cluster collision: the bearing
/// of the cluster is no longer defined.
pub const MIN_RANGE_M: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Failure modes of the kinematic layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    /// Evaluation times must be finite and non-negative.
    #[error("time {t} s is outside the model domain (t must be finite and >= 0)")]
    TimeOutOfDomain { t: f64 },
    /// The linear speed ramp reached zero before the requested time; the
    /// motion model does not describe terminals driving backwards.
    #[error("speed becomes negative at {stops_at} s, before the requested time {t} s")]
    SpeedReversal { t: f64, stops_at: f64 },
    /// The terminal passed through (or numerically onto) the cluster, so the
    /// cluster bearing is undefined.
    #[error("terminal-to-cluster range is below {MIN_RANGE_M} m at {t} s; bearing undefined")]
    DegenerateRange { t: f64 },
    /// A constructor argument violated its invariant.
    #[error("{name} = {value} violates `{invariant}`")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        invariant: &'static str,
    },
}

fn ensure(
    ok: bool,
    name: &'static str,
    value: f64,
    invariant: &'static str,
) -> Result<(), GeometryError> {
    if ok {
        Ok(())
    } else {
        Err(GeometryError::InvalidParameter {
            name,
            value,
            invariant,
        })
    }
}

// ---------------------------------------------------------------------------
// Angles and vectors
// ---------------------------------------------------------------------------

/// Wraps an angle to the half-open interval `(-π, π]`.
///
/// Angles already inside the interval are returned bit-for-bit unchanged, so
/// the function is idempotent and safe to apply to round-tripped values.
pub fn wrap_angle(rad: f64) -> f64 {
    if rad > -std::f64::consts::PI && rad <= std::f64::consts::PI {
        return rad;
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut a = rad % two_pi;
    if a <= -std::f64::consts::PI {
        a += two_pi;
    } else if a > std::f64::consts::PI {
        a -= two_pi;
    }
    a
}

/// A point or displacement in the horizontal plane, in metres.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// Bearing of this vector from the positive x axis, wrapped to `(-π, π]`.
    pub fn bearing(self) -> f64 {
        wrap_angle(self.y.atan2(self.x))
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

// ---------------------------------------------------------------------------
// Velocity profile
// ---------------------------------------------------------------------------

/// Linearly varying speed and heading of one terminal.
///
/// * speed: `v(t) = v0 + a0·t` (m/s), required to stay non-negative over the
///   evaluated horizon;
/// * heading: `α_v(t) = α_v + b0·t` (rad), measured from the positive x axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityProfile {
    /// Initial speed `v0` in m/s (>= 0).
    pub v0: f64,
    /// Linear speed ramp `a0` in m/s².
    pub a0: f64,
    /// Initial heading in rad, stored wrapped to `(-π, π]`.
    pub alpha_v: f64,
    /// Heading rate `b0` in rad/s.
    pub b0: f64,
}

impl VelocityProfile {
    pub fn new(v0: f64, a0: f64, alpha_v: f64, b0: f64) -> Result<Self, GeometryError> {
        ensure(
            v0.is_finite() && v0 >= 0.0,
            "v0",
            v0,
            "v0 is finite and >= 0",
        )?;
        ensure(a0.is_finite(), "a0", a0, "a0 is finite")?;
        ensure(alpha_v.is_finite(), "alpha_v", alpha_v, "alpha_v is finite")?;
        ensure(b0.is_finite(), "b0", b0, "b0 is finite")?;
        Ok(VelocityProfile {
            v0,
            a0,
            alpha_v: wrap_angle(alpha_v),
            b0,
        })
    }

    /// A terminal that never moves.
    pub fn stationary() -> Self {
        VelocityProfile {
            v0: 0.0,
            a0: 0.0,
            alpha_v: 0.0,
            b0: 0.0,
        }
    }

    /// Instant at which the speed ramp crosses zero, if it ever does.
    pub fn time_of_stop(&self) -> Option<f64> {
        if self.a0 < 0.0 {
            Some(-self.v0 / self.a0)
        } else {
            None
        }
    }

    fn check_time(&self, t: f64) -> Result<(), GeometryError> {
        if !t.is_finite() || t < 0.0 {
            return Err(GeometryError::TimeOutOfDomain { t });
        }
        if self.v0 + self.a0 * t < 0.0 {
            return Err(GeometryError::SpeedReversal {
                t,
                stops_at: self.time_of_stop().unwrap_or(f64::INFINITY),
            });
        }
        Ok(())
    }

    /// Speed `v0 + a0·t` at time `t`.
    pub fn speed_at(&self, t: f64) -> Result<f64, GeometryError> {
        self.check_time(t)?;
        Ok(self.v0 + self.a0 * t)
    }

    /// Heading `α_v + b0·t` at time `t`, wrapped to `(-π, π]`.
    pub fn heading_at(&self, t: f64) -> Result<f64, GeometryError> {
        self.check_time(t)?;
        Ok(wrap_angle(self.alpha_v + self.b0 * t))
    }

    /// The profile re-based at time `s`: same ramps, with `v0` and `α_v`
    /// advanced so that `advanced(s).position_at(u) = position_at(s + u) -
    /// position_at(s)` (up to the frame translation).
    pub fn advanced(&self, s: f64) -> Result<VelocityProfile, GeometryError> {
        self.check_time(s)?;
        Ok(VelocityProfile {
            v0: self.v0 + self.a0 * s,
            a0: self.a0,
            alpha_v: wrap_angle(self.alpha_v + self.b0 * s),
            b0: self.b0,
        })
    }
}

// ---------------------------------------------------------------------------
// Displacement kernels
// ---------------------------------------------------------------------------

/// `sin(x)/x` with the removable singularity filled in.
fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Kernels `A(β) = (cos β - 1 + β sin β)/β²` and
/// `B(β) = (sin β - β cos β)/β²`, i.e. `∫₀¹ u·cos(βu) du` and
/// `∫₀¹ u·sin(βu) du`. For small `β` the closed forms cancel catastrophically,
/// so below |β| = 0.5 they are summed as their (rapidly converging) power
/// series instead.
fn ramp_kernels(beta: f64) -> (f64, f64) {
    if beta.abs() <= 0.5 {
        // A = Σ_{k>=1} (-1)^{k+1} (2k-1) β^{2k-2} / (2k)!
        // B = Σ_{k>=1} (-1)^{k+1} (2k)   β^{2k-1} / (2k+1)!
        let b2 = beta * beta;
        let mut a_sum = 0.0;
        let mut b_sum = 0.0;
        // term_a(k) carries (-1)^{k+1} β^{2k-2} / (2k)!; term_b analogous.
        let mut term_a = 0.5;
        let mut term_b = beta / 6.0;
        for k in 1..25u32 {
            let k = f64::from(k);
            let a_contrib = (2.0 * k - 1.0) * term_a;
            let b_contrib = (2.0 * k) * term_b;
            a_sum += a_contrib;
            b_sum += b_contrib;
            if a_contrib.abs() < 1e-18 && b_contrib.abs() < 1e-18 * beta.abs().max(1e-300) {
                break;
            }
            term_a *= -b2 / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
            term_b *= -b2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
        }
        (a_sum, b_sum)
    } else {
        let (s, c) = beta.sin_cos();
        let inv_b2 = 1.0 / (beta * beta);
        ((c - 1.0 + beta * s) * inv_b2, (s - beta * c) * inv_b2)
    }
}

/// Terminal position at time `t`, relative to its position at `t = 0`.
///
/// Evaluates the exact displacement integral of the linearly varying speed and
/// heading. The formulation is uniformly stable in the heading rate; `b0 = 0`
/// reproduces the straight-line result `(v0·t + a0·t²/2)·(cos α_v, sin α_v)`
/// exactly.
pub fn position_at(profile: &VelocityProfile, t: f64) -> Result<Vec2, GeometryError> {
    profile.check_time(t)?;
    let beta = profile.b0 * t;
    let half = 0.5 * beta;
    let (sin_mid, cos_mid) = (profile.alpha_v + half).sin_cos();
    let sinc_half = sinc(half);
    let (sin_a, cos_a) = profile.alpha_v.sin_cos();
    let (ka, kb) = ramp_kernels(beta);

    let c1 = cos_mid * sinc_half;
    let s1 = sin_mid * sinc_half;
    let c2 = cos_a * ka - sin_a * kb;
    let s2 = sin_a * ka + cos_a * kb;

    let vt = profile.v0 * t;
    let at2 = profile.a0 * t * t;
    Ok(Vec2::new(vt * c1 + at2 * c2, vt * s1 + at2 * s2))
}

// ---------------------------------------------------------------------------
// Clusters
// ---------------------------------------------------------------------------

/// A static scattering cluster, placed by its initial range and bearing as
/// seen from the terminal at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterGeometry {
    distance_m: f64,
    mean_angle: f64,
}

impl ClusterGeometry {
    pub fn new(distance_m: f64, mean_angle_rad: f64) -> Result<Self, GeometryError> {
        ensure(
            distance_m.is_finite() && distance_m >= MIN_RANGE_M,
            "distance_m",
            distance_m,
            "initial range is finite and >= MIN_RANGE_M",
        )?;
        ensure(
            mean_angle_rad.is_finite(),
            "mean_angle_rad",
            mean_angle_rad,
            "mean angle is finite",
        )?;
        Ok(ClusterGeometry {
            distance_m,
            mean_angle: wrap_angle(mean_angle_rad),
        })
    }

    /// Initial range to the cluster in metres.
    pub fn distance_m(&self) -> f64 {
        self.distance_m
    }

    /// Initial bearing of the cluster in rad, wrapped to `(-π, π]`.
    pub fn mean_angle(&self) -> f64 {
        self.mean_angle
    }

    /// Cluster position in the terminal's initial frame.
    pub fn position(&self) -> Vec2 {
        let (s, c) = self.mean_angle.sin_cos();
        Vec2::new(self.distance_m * c, self.distance_m * s)
    }
}

/// Exact terminal-to-cluster range at time `t`.
pub fn distance_exact(
    cluster: &ClusterGeometry,
    profile: &VelocityProfile,
    t: f64,
) -> Result<f64, GeometryError> {
    let p = position_at(profile, t)?;
    Ok((cluster.position() - p).norm())
}

/// First-order range approximation `d - v0·cos(ᾱ - α_v)·t`, linearised around
/// `t = 0`.
pub fn distance_linearized(cluster: &ClusterGeometry, profile: &VelocityProfile, t: f64) -> f64 {
    cluster.distance_m - profile.v0 * (cluster.mean_angle - profile.alpha_v).cos() * t
}

/// Exact cluster bearing `ᾱ(t)` seen from the moving terminal, wrapped to
/// `(-π, π]`. Fails with [`GeometryError::DegenerateRange`] if the terminal
/// gets within [`MIN_RANGE_M`] of the cluster.
pub fn mean_angle_at(
    cluster: &ClusterGeometry,
    profile: &VelocityProfile,
    t: f64,
) -> Result<f64, GeometryError> {
    let p = position_at(profile, t)?;
    let rel = cluster.position() - p;
    if rel.norm() < MIN_RANGE_M {
        return Err(GeometryError::DegenerateRange { t });
    }
    Ok(rel.bearing())
}

// ---------------------------------------------------------------------------
// Antenna arrays
// ---------------------------------------------------------------------------

/// Axis along which a uniform linear array is laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Antenna element offsets from the terminal reference point, in metres.
///
/// The closed-form spatial correlation in [`crate::stats`] assumes elements
/// spaced along the x axis (broadside arrays measured against the cosine of
/// the ray angle); [`AntennaArray::ula`] with [`Axis::X`] builds exactly that
/// layout.
#[derive(Debug, Clone, PartialEq)]
pub struct AntennaArray {
    elements: Vec<Vec2>,
}

impl AntennaArray {
    /// Uniform linear array of `count` elements with `spacing_m` metres
    /// between neighbours, element 0 at the reference point.
    pub fn ula(count: usize, spacing_m: f64, axis: Axis) -> Result<Self, GeometryError> {
        if count == 0 {
            return Err(GeometryError::InvalidParameter {
                name: "count",
                value: 0.0,
                invariant: "array has at least one element",
            });
        }
        ensure(
            spacing_m.is_finite() && (spacing_m > 0.0 || count == 1),
            "spacing_m",
            spacing_m,
            "element spacing is finite and > 0",
        )?;
        let step = match axis {
            Axis::X => Vec2::new(spacing_m, 0.0),
            Axis::Y => Vec2::new(0.0, spacing_m),
        };
        Ok(AntennaArray {
            elements: (0..count).map(|k| step * k as f64).collect(),
        })
    }

    /// Arbitrary element layout.
    pub fn from_elements(elements: Vec<Vec2>) -> Result<Self, GeometryError> {
        if elements.is_empty() {
            return Err(GeometryError::InvalidParameter {
                name: "elements",
                value: 0.0,
                invariant: "array has at least one element",
            });
        }
        for e in &elements {
            ensure(
                e.x.is_finite() && e.y.is_finite(),
                "elements",
                f64::NAN,
                "element offsets are finite",
            )?;
        }
        Ok(AntennaArray { elements })
    }

    pub fn count(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, index: usize) -> Vec2 {
        self.elements[index]
    }

    pub fn elements(&self) -> &[Vec2] {
        &self.elements
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
